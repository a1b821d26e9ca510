//! A map together with its dual, splitting and adapted norm.

use crate::adapted_norm::{build_adapted_norm, AdaptedNorm};
use crate::error::Result;
use crate::fourier::FourierSeries;
use crate::lattice::{AffineTorusMap, DualMap};
use crate::scalar::Scalar;
use crate::solver::{self, ObstructionReport, SolveError, SolveOptions, SolveResult};
use crate::spectral::{analyze, HyperbolicSplitting, DEFAULT_BAND};

#[derive(Clone, Debug)]
pub struct HyperbolicSystem<T> {
    pub map: AffineTorusMap,
    pub dual: DualMap,
    pub norm: AdaptedNorm<T>,
}

impl<T: Scalar> HyperbolicSystem<T> {
    /// Fails with `NotHyperbolic` when some eigenvalue of `A` lies within
    /// `band` of the unit circle.
    pub fn new(map: AffineTorusMap, band: T) -> Result<Self> {
        let dual = map.dual();
        let splitting = analyze::<T>(dual.matrix(), band)?;
        let norm = build_adapted_norm(&splitting)?;
        Ok(HyperbolicSystem { map, dual, norm })
    }

    pub fn with_default_band(map: AffineTorusMap) -> Result<Self> {
        Self::new(map, T::c(DEFAULT_BAND))
    }

    pub fn dim(&self) -> usize {
        self.map.dim()
    }

    pub fn splitting(&self) -> &HyperbolicSplitting<T> {
        self.norm.splitting()
    }

    pub fn check(&self, g: &FourierSeries<T>, tol: T) -> Result<ObstructionReport<T>> {
        solver::check_obstructions(g, &self.map, &self.norm, tol)
    }

    pub fn solve(&self, g: &FourierSeries<T>, opts: &SolveOptions<T>) -> Result<SolveResult<T>, SolveError<T>> {
        solver::solve(g, &self.map, &self.norm, opts)
    }
}
