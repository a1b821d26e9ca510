//! JSON formats: series files, problem configs and reports.
//!
//! Floats are written with 17 significant digits and object keys are sorted,
//! so identical inputs produce byte-identical output.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex;
use num_rational::BigRational;
use serde::Deserialize;
use serde_json::{json, Map, Number, Value};

use crate::adapted_norm::AdaptedNorm;
use crate::error::{Error, Result};
use crate::fourier::FourierSeries;
use crate::lattice::{parse_rational, AffineTorusMap, IntMatrix};
use crate::scalar::Scalar;
use crate::solver::{ContinuityRow, ObstructionReport, SolveResult};
use crate::spectral::{char_poly, HyperbolicSplitting, Spectrum};

/// A float as a JSON number with 17 significant digits; `null` if not finite.
pub fn float(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let x = if x == 0.0 { 0.0 } else { x };
    Number::from_str(&format!("{x:.16e}")).map(Value::Number).unwrap_or(Value::Null)
}

fn complex<T: Scalar>(z: Complex<T>) -> Value {
    json!({ "re": float(z.re.as_f64()), "im": float(z.im.as_f64()) })
}

#[derive(Debug, Deserialize)]
struct TermJson {
    m: Vec<i64>,
    #[serde(default)]
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Debug, Deserialize)]
struct SeriesJson {
    p: usize,
    terms: Vec<TermJson>,
}

fn series_from_terms<T: Scalar>(p: usize, terms: Vec<TermJson>) -> Result<FourierSeries<T>> {
    FourierSeries::from_terms(p, terms.into_iter().map(|t| (t.m, Complex::new(T::c(t.re), T::c(t.im)))))
}

pub fn series_from_json<T: Scalar>(text: &str) -> Result<FourierSeries<T>> {
    let s: SeriesJson = serde_json::from_str(text).map_err(|e| Error::Invalid(format!("series: {e}")))?;
    series_from_terms(s.p, s.terms)
}

pub fn series_to_value<T: Scalar>(h: &FourierSeries<T>) -> Value {
    let terms: Vec<Value> = h
        .terms()
        .map(|(m, c)| json!({ "m": m, "re": float(c.re.as_f64()), "im": float(c.im.as_f64()) }))
        .collect();
    json!({ "p": h.dim(), "terms": terms })
}

pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

pub fn series_to_json<T: Scalar>(h: &FourierSeries<T>) -> String {
    to_pretty(&series_to_value(h))
}

pub fn read_series<T: Scalar>(path: &Path) -> Result<FourierSeries<T>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
    series_from_json(&text)
}

// Numbers are kept as written, so decimals like 0.1 parse to 1/10 exactly.
fn rational_from_value(v: &Value) -> Result<BigRational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => parse_rational(&n.to_string()),
        other => Err(Error::Invalid(format!("expected a rational, found {other}"))),
    }
}

/// Problem description read by the command-line front end.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub p: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<i64>>,
    #[serde(default)]
    b: Option<Vec<Value>>,
    /// A path to a series file, an inline series object, or a bare term list.
    #[serde(default)]
    g: Option<Value>,
    #[serde(default)]
    f: Option<Value>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default, rename = "hyperbolicityBand")]
    pub hyperbolicity_band: Option<f64>,
    #[serde(skip)]
    base: Option<PathBuf>,
}

impl ProblemConfig {
    /// Parses a config; relative series paths resolve against `base`.
    pub fn from_json(text: &str, base: Option<&Path>) -> Result<Self> {
        let mut cfg: ProblemConfig = serde_json::from_str(text).map_err(|e| Error::Invalid(format!("config: {e}")))?;
        cfg.base = base.map(Path::to_path_buf);
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.a.len() != self.p {
            return Err(Error::DimensionMismatch { expected: self.p, found: self.a.len() });
        }
        if let Some(row) = self.a.iter().find(|r| r.len() != self.p) {
            return Err(Error::DimensionMismatch { expected: self.p, found: row.len() });
        }
        if let Some(b) = &self.b {
            if b.len() != self.p {
                return Err(Error::DimensionMismatch { expected: self.p, found: b.len() });
            }
        }
        Ok(())
    }

    pub fn matrix(&self) -> Result<IntMatrix> {
        IntMatrix::from_rows(self.a.clone())
    }

    pub fn translation(&self) -> Result<Vec<BigRational>> {
        match &self.b {
            None => Ok(vec![BigRational::from_integer(0.into()); self.p]),
            Some(b) => b.iter().map(rational_from_value).collect(),
        }
    }

    pub fn map(&self) -> Result<AffineTorusMap> {
        AffineTorusMap::new(self.matrix()?, self.translation()?)
    }

    fn load<T: Scalar>(&self, src: &Option<Value>, name: &str) -> Result<FourierSeries<T>> {
        let bad = |e: serde_json::Error| Error::Invalid(format!("series `{name}`: {e}"));
        let series = match src {
            None => return Err(Error::Invalid(format!("config has no `{name}` series"))),
            Some(Value::String(p)) => {
                let path = match &self.base {
                    Some(base) if Path::new(p).is_relative() => base.join(p),
                    _ => PathBuf::from(p),
                };
                read_series(&path)?
            }
            Some(v @ Value::Object(_)) => {
                let s: SeriesJson = serde_json::from_value(v.clone()).map_err(bad)?;
                series_from_terms(s.p, s.terms)?
            }
            Some(v @ Value::Array(_)) => {
                let terms: Vec<TermJson> = serde_json::from_value(v.clone()).map_err(bad)?;
                series_from_terms(self.p, terms)?
            }
            Some(other) => return Err(Error::Invalid(format!("series `{name}`: unexpected {other}"))),
        };
        if series.dim() != self.p {
            return Err(Error::DimensionMismatch { expected: self.p, found: series.dim() });
        }
        Ok(series)
    }

    pub fn g<T: Scalar>(&self) -> Result<FourierSeries<T>> {
        self.load(&self.g, "g")
    }

    pub fn f<T: Scalar>(&self) -> Result<FourierSeries<T>> {
        self.load(&self.f, "f")
    }

    pub fn has_g(&self) -> bool {
        self.g.is_some()
    }
}

/// Config value for a matrix with zero translation and no series.
pub fn config_for_matrix(a: &IntMatrix) -> Value {
    json!({ "p": a.dim(), "A": a.rows(), "b": vec!["0"; a.dim()] })
}

pub fn obstruction_report_value<T: Scalar>(r: &ObstructionReport<T>) -> Value {
    let checks: Vec<Value> = r
        .orbit_checks
        .iter()
        .map(|c| {
            json!({
                "representative": c.representative,
                "phi": complex(c.phi),
                "abs": float(c.modulus.as_f64()),
                "pass": c.pass,
            })
        })
        .collect();
    json!({
        "phiZero": complex(r.phi_zero),
        "orbitChecks": checks,
        "tol": float(r.tol.as_f64()),
        "solvable": r.solvable,
    })
}

fn continuity_value<T: Scalar>(row: &ContinuityRow<T>) -> Value {
    json!({
        "r": row.r,
        "lhs": float(row.lhs.as_f64()),
        "rhsPaper": float(row.rhs_original.as_f64()),
        "rhsCorrected": float(row.rhs_corrected.as_f64()),
        "holdsPaper": row.holds_original,
        "holdsCorrected": row.holds_corrected,
    })
}

/// The solve report; the solution series itself goes to its own file.
pub fn solve_result_value<T: Scalar>(res: &SolveResult<T>, obstructions: &ObstructionReport<T>) -> Value {
    let mut m = Map::new();
    m.insert("status".into(), json!("solved"));
    m.insert("obstructions".into(), obstruction_report_value(obstructions));
    m.insert("residualNorm".into(), float(res.residual_norm.as_f64()));
    m.insert("searchRadius".into(), float(res.search_radius.as_f64()));
    m.insert("candidateCount".into(), json!(res.candidate_count));
    m.insert("terms".into(), json!(res.f.len()));
    m.insert("continuity".into(), Value::Array(res.continuity.iter().map(continuity_value).collect()));
    if let Some(t) = res.truncation_tail {
        m.insert("truncationTail".into(), float(t.as_f64()));
    }
    Value::Object(m)
}

pub fn spectrum_value<T: Scalar>(a: &IntMatrix, s: &Spectrum<T>, band: T) -> Value {
    let roots: Vec<Value> = s
        .roots
        .iter()
        .map(|r| {
            json!({
                "re": float(r.value.re.as_f64()),
                "im": float(r.value.im.as_f64()),
                "modulus": float(r.modulus().as_f64()),
                "multiplicity": r.multiplicity,
            })
        })
        .collect();
    json!({
        "matrix": a.rows(),
        "charPoly": char_poly(a).to_string(),
        "roots": roots,
        "hyperbolic": s.is_hyperbolic(band),
        "band": float(band.as_f64()),
        "diagonalizableHint": !s.has_repeated_roots(),
    })
}

pub fn splitting_value<T: Scalar>(sp: &HyperbolicSplitting<T>, nm: &AdaptedNorm<T>) -> Value {
    json!({
        "ranks": { "minus": sp.stable_dim(), "plus": sp.unstable_dim() },
        "rhoMinus": float(sp.rho_minus.as_f64()),
        "rhoPlusInv": float(sp.rho_plus_inv.as_f64()),
        "residual": float(sp.residuals().max().as_f64()),
        "n": nm.n,
        "thetaMinus": float(nm.theta_minus.as_f64()),
        "thetaPlusInv": float(nm.theta_plus_inv.as_f64()),
        "eta": float(nm.eta.as_f64()),
        "mu": float(nm.mu.as_f64()),
    })
}
