use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use serde_json::json;

use toruscohom::fixtures;
use toruscohom::io::{self as tio, ProblemConfig};
use toruscohom::lattice::IntMatrix;
use toruscohom::oracle;
use toruscohom::solver::{self, SolveError, SolveOptions, DEFAULT_TOL};
use toruscohom::spectral::{char_poly, companion_matrix, roots, IntPolynomial, DEFAULT_BAND, DEFAULT_ROOT_TOL};
use toruscohom::{Error, Series, System};

const EXIT_OBSTRUCTED: u8 = 2;
const EXIT_NOT_HYPERBOLIC: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "toruscohom", version, about = "Solve f - f o gamma = g for hyperbolic affine maps of the torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Problem config (JSON); stdin when absent or `-`.
    #[arg(long, global = true)]
    config: Option<String>,
    /// Obstruction and residual tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Hyperbolicity band around the unit circle.
    #[arg(long, global = true)]
    band: Option<f64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Characteristic polynomial, roots, splitting and adapted-norm constants.
    Spectrum,
    /// Evaluate the obstructions of `g`; writes report.json.
    Check,
    /// Solve for `f`; writes f.json and report.json.
    Solve,
    /// Residual of the `f` and `g` given in the config.
    Verify,
    /// Round trip random coboundaries through the solver.
    Oracle {
        #[arg(long, default_value_t = 2)]
        p: usize,
        #[arg(long = "box-radius", default_value_t = 4)]
        box_radius: i64,
        #[arg(long, default_value_t = 50)]
        seeds: u64,
    },
    /// Evaluate a series on an N x N grid of the 2-torus as CSV.
    Sample {
        /// Series file; defaults to `f`, then `g`, of the config.
        #[arg(long)]
        series: Option<PathBuf>,
        #[arg(long, default_value_t = 32)]
        grid: usize,
    },
    /// Print a config for a named fixture.
    Gen {
        /// cat, fib, cubic3, companionQ, rot2, random-unimodular or companion
        name: String,
        /// Ascending coefficients for `companion`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        coeffs: Vec<i64>,
        /// Dimension for `random-unimodular`.
        #[arg(long, default_value_t = 2)]
        p: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<u8> {
    match &cli.command {
        Command::Spectrum => cmd_spectrum(cli),
        Command::Check => cmd_check(cli),
        Command::Solve => cmd_solve(cli),
        Command::Verify => cmd_verify(cli),
        Command::Oracle { p, box_radius, seeds } => cmd_oracle(cli, *p, *box_radius, *seeds),
        Command::Sample { series, grid } => cmd_sample(cli, series.as_deref(), *grid),
        Command::Gen { name, coeffs, p } => cmd_gen(cli, name, coeffs, *p),
    }
}

fn load_config(cli: &Cli) -> anyhow::Result<ProblemConfig> {
    let (text, base) = match cli.config.as_deref() {
        None | Some("-") => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).context("reading config from stdin")?;
            (s, None)
        }
        Some(path) => {
            let p = Path::new(path);
            let text = fs::read_to_string(p).with_context(|| format!("reading {path}"))?;
            (text, p.parent().map(Path::to_path_buf))
        }
    };
    Ok(ProblemConfig::from_json(&text, base.as_deref())?)
}

fn tol(cli: &Cli, cfg: &ProblemConfig) -> f64 {
    cli.tol.or(cfg.tol).unwrap_or(DEFAULT_TOL)
}

fn band(cli: &Cli, cfg: &ProblemConfig) -> f64 {
    cli.band.or(cfg.hyperbolicity_band).unwrap_or(DEFAULT_BAND)
}

fn out_dir(cli: &Cli) -> anyhow::Result<PathBuf> {
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

fn write(dir: &Path, name: &str, contents: &str) -> anyhow::Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

/// `Ok(None)` when the map is not hyperbolic; the message is already printed.
fn system(cli: &Cli, cfg: &ProblemConfig) -> anyhow::Result<Option<System>> {
    match System::new(cfg.map()?, band(cli, cfg)) {
        Ok(s) => Ok(Some(s)),
        Err(e @ (Error::NotHyperbolic(_) | Error::IllConditioned(_))) => {
            eprintln!("not hyperbolic: {e}");
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_spectrum(cli: &Cli) -> anyhow::Result<u8> {
    let cfg = load_config(cli)?;
    let a = cfg.matrix()?;
    let band = band(cli, &cfg);
    let dual = cfg.map()?.dual();
    let spectrum = roots::<f64>(&char_poly(&a), DEFAULT_ROOT_TOL)?;
    let mut report = tio::spectrum_value(&a, &spectrum, band);
    let hyperbolic = spectrum.is_hyperbolic(band);
    if hyperbolic {
        let sys = System::new(cfg.map()?, band)?;
        report["splitting"] = tio::splitting_value(sys.splitting(), &sys.norm);
        report["dualMatrix"] = json!(dual.matrix().rows());
    }
    print!("{}", tio::to_pretty(&report));
    Ok(if hyperbolic { 0 } else { EXIT_OBSTRUCTED })
}

fn cmd_check(cli: &Cli) -> anyhow::Result<u8> {
    let cfg = load_config(cli)?;
    let Some(sys) = system(cli, &cfg)? else { return Ok(EXIT_NOT_HYPERBOLIC) };
    let g: Series = cfg.g()?;
    let report = sys.check(&g, tol(cli, &cfg))?;
    write(&out_dir(cli)?, "report.json", &tio::to_pretty(&tio::obstruction_report_value(&report)))?;
    println!("{}", if report.solvable { "solvable".to_string() } else { format!("obstructed: {report}") });
    Ok(if report.solvable { 0 } else { EXIT_OBSTRUCTED })
}

fn cmd_solve(cli: &Cli) -> anyhow::Result<u8> {
    let cfg = load_config(cli)?;
    let Some(sys) = system(cli, &cfg)? else { return Ok(EXIT_NOT_HYPERBOLIC) };
    let g: Series = cfg.g()?;
    let tol = tol(cli, &cfg);
    let dir = out_dir(cli)?;
    match sys.solve(&g, &SolveOptions::with_tol(tol)) {
        Ok(res) => {
            let obstructions = sys.check(&g, tol)?;
            write(&dir, "f.json", &tio::series_to_json(&res.f))?;
            write(&dir, "report.json", &tio::to_pretty(&tio::solve_result_value(&res, &obstructions)))?;
            println!("solved: {} terms, residual {:e}", res.f.len(), res.residual_norm);
            Ok(0)
        }
        Err(SolveError::Obstructed(report)) => {
            let v = json!({ "status": "obstructed", "obstructions": tio::obstruction_report_value(&report) });
            write(&dir, "report.json", &tio::to_pretty(&v))?;
            println!("obstructed: {report}");
            Ok(EXIT_OBSTRUCTED)
        }
        Err(SolveError::Failed(e)) => Err(e.into()),
    }
}

fn cmd_verify(cli: &Cli) -> anyhow::Result<u8> {
    let cfg = load_config(cli)?;
    let map = cfg.map()?;
    let (f, g): (Series, Series) = (cfg.f()?, cfg.g()?);
    let residual = solver::residual(&f, &g, &map)?;
    let tol = tol(cli, &cfg);
    let pass = residual <= tol;
    let v = json!({ "residualNorm": tio::float(residual), "tol": tio::float(tol), "pass": pass });
    print!("{}", tio::to_pretty(&v));
    Ok(if pass { 0 } else { EXIT_OBSTRUCTED })
}

fn cmd_oracle(cli: &Cli, p: usize, box_radius: i64, seeds: u64) -> anyhow::Result<u8> {
    let tol = cli.tol.unwrap_or(DEFAULT_TOL);
    let outcomes = oracle::run(p, box_radius, seeds, tol);
    let mut passed = 0;
    for o in &outcomes {
        if o.passed(tol) {
            passed += 1;
        } else {
            eprintln!(
                "seed {}: deviation {:e}, residual {:e}, {}",
                o.seed,
                o.max_deviation,
                o.residual,
                o.error.as_deref().unwrap_or("continuity bound violated")
            );
        }
    }
    println!("{passed}/{} pass", outcomes.len());
    Ok(if passed == outcomes.len() { 0 } else { EXIT_OBSTRUCTED })
}

fn cmd_sample(cli: &Cli, series: Option<&Path>, grid: usize) -> anyhow::Result<u8> {
    let h: Series = match series {
        Some(path) => tio::read_series(path)?,
        None => {
            let cfg = load_config(cli)?;
            cfg.f().or_else(|_| cfg.g())?
        }
    };
    if h.dim() != 2 {
        bail!("sample needs a series on the 2-torus, got p = {}", h.dim());
    }
    if grid == 0 {
        bail!("grid must be positive");
    }
    let sink: Box<dyn Write> = match &cli.out {
        Some(_) => Box::new(fs::File::create(out_dir(cli)?.join("sample.csv"))?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["x1", "x2", "re", "im"])?;
    let n = grid as f64;
    for i in 0..grid {
        for j in 0..grid {
            let x = [i as f64 / n, j as f64 / n];
            let v = h.evaluate(&x)?;
            w.write_record([x[0], x[1], v.re, v.im].map(|t| format!("{t:.16e}")))?;
        }
    }
    w.flush()?;
    Ok(0)
}

fn cmd_gen(cli: &Cli, name: &str, coeffs: &[i64], p: usize) -> anyhow::Result<u8> {
    let a: IntMatrix = match name {
        "random-unimodular" => fixtures::random_unimodular(p, cli.seed.unwrap_or(0))?,
        "companion" => {
            if coeffs.is_empty() {
                bail!("companion needs --coeffs c0,c1,...");
            }
            companion_matrix(&IntPolynomial::from_i64(coeffs))?
        }
        other => match fixtures::by_name(other) {
            Some(a) => a,
            None => bail!("unknown fixture `{other}`; expected one of {:?}, random-unimodular, companion", fixtures::NAMES),
        },
    };
    print!("{}", tio::to_pretty(&tio::config_for_matrix(&a)));
    Ok(0)
}

