//! Run configuration: defaults, a `key = value` file, then flags.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use polyinv::linalg::SparseMatrix;
use polyinv::matrices::{self, MatrixMarketData, RhsKind};
use polyinv::poly::Stabilization;
use serde::Serialize;

use crate::error::{CliError, CliResult};

/// Environment variable consulted for the seed when none is configured.
pub const SEED_ENV: &str = "POLYINV_SEED";

/// Built-in matrix generator with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Generator {
    Convdiff2d { grid_n: usize, alpha: f64, beta: f64, gamma: f64 },
    Convdiff1d { n: usize, alpha: f64, gamma: f64 },
    Bidiag11 { case: u32 },
    Gapdiag,
    Powerlaw { p: f64 },
    Outlier,
    Circulant { n: usize },
}

/// Names accepted by [`Generator::parse`].
pub const GENERATORS: &str = "convdiff2d:grid_n,alpha,beta,gamma | convdiff1d:n,alpha,gamma | bidiag11:case | gapdiag | powerlaw:p | outlier | circulant:n";

fn num<T: FromStr>(s: &str, what: &str) -> CliResult<T> {
    s.trim()
        .parse()
        .map_err(|_| CliError::Config(format!("invalid {what} '{s}'")))
}

impl Generator {
    /// Parses `name:p1,p2,...`.
    pub fn parse(spec: &str) -> CliResult<Self> {
        let (name, params) = spec.split_once(':').unwrap_or((spec, ""));
        let p: Vec<&str> = if params.trim().is_empty() {
            Vec::new()
        } else {
            params.split(',').collect()
        };
        let arity = |k: usize| -> CliResult<()> {
            if p.len() == k {
                Ok(())
            } else {
                Err(CliError::Config(format!(
                    "generator '{name}' takes {k} parameter(s), got {}; expected one of {GENERATORS}",
                    p.len()
                )))
            }
        };
        let g = match name.trim() {
            "convdiff2d" => {
                arity(4)?;
                Generator::Convdiff2d {
                    grid_n: num(p[0], "grid size")?,
                    alpha: num(p[1], "alpha")?,
                    beta: num(p[2], "beta")?,
                    gamma: num(p[3], "gamma")?,
                }
            }
            "convdiff1d" => {
                arity(3)?;
                Generator::Convdiff1d {
                    n: num(p[0], "size")?,
                    alpha: num(p[1], "alpha")?,
                    gamma: num(p[2], "gamma")?,
                }
            }
            "bidiag11" => {
                arity(1)?;
                Generator::Bidiag11 { case: num(p[0], "case")? }
            }
            "gapdiag" => {
                arity(0)?;
                Generator::Gapdiag
            }
            "powerlaw" => {
                arity(1)?;
                Generator::Powerlaw { p: num(p[0], "exponent")? }
            }
            "outlier" => {
                arity(0)?;
                Generator::Outlier
            }
            "circulant" => {
                arity(1)?;
                Generator::Circulant { n: num(p[0], "size")? }
            }
            other => {
                return Err(CliError::Config(format!(
                    "unknown generator '{other}'; expected one of {GENERATORS}"
                )))
            }
        };
        Ok(g)
    }

    pub fn build(&self) -> CliResult<SparseMatrix<f64>> {
        let m = match *self {
            Generator::Convdiff2d { grid_n, alpha, beta, gamma } => matrices::gen_convdiff_2d(grid_n, alpha, beta, gamma),
            Generator::Convdiff1d { n, alpha, gamma } => matrices::gen_convdiff_1d(n, alpha, gamma),
            Generator::Bidiag11 { case } => matrices::gen_bidiag_example11(case),
            Generator::Gapdiag => Ok(matrices::gen_gap_diag()),
            Generator::Powerlaw { p } => matrices::gen_powerlaw_diag(p),
            Generator::Outlier => Ok(matrices::gen_outlier_demo()),
            Generator::Circulant { n } => matrices::gen_circulant_shift(n),
        };
        m.map_err(|e| CliError::Config(e.to_string()))
    }
}

/// Where the matrix comes from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixSource {
    Generator(Generator),
    File(PathBuf),
}

/// A loaded operator, real or complex.
pub enum Matrix {
    Real(SparseMatrix<f64>),
    Complex(SparseMatrix<Complex64>),
}

impl MatrixSource {
    /// A value ending in `.mtx` is a file, anything else a generator spec.
    pub fn parse(s: &str) -> CliResult<Self> {
        if s.ends_with(".mtx") {
            Ok(MatrixSource::File(PathBuf::from(s)))
        } else {
            Ok(MatrixSource::Generator(Generator::parse(s)?))
        }
    }

    pub fn load(&self) -> CliResult<Matrix> {
        match self {
            MatrixSource::Generator(g) => Ok(Matrix::Real(g.build()?)),
            MatrixSource::File(path) => match matrices::read_matrix_market(path)? {
                MatrixMarketData::Real(a) => Ok(Matrix::Real(a)),
                MatrixMarketData::Complex(a) => Ok(Matrix::Complex(a)),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Gmres,
    GmresRestarted,
    Double,
    Bicg,
    Bicgstab,
    Deflated,
}

impl FromStr for Method {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        Ok(match s {
            "gmres" => Method::Gmres,
            "gmres_restarted" => Method::GmresRestarted,
            "double" => Method::Double,
            "bicg" => Method::Bicg,
            "bicgstab" => Method::Bicgstab,
            "deflated" => Method::Deflated,
            other => {
                return Err(CliError::Config(format!(
                    "unknown method '{other}'; expected gmres, gmres_restarted, double, bicg, bicgstab or deflated"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PrecondKind {
    None,
    Ilu0,
}

/// Fully resolved settings of a `solve` run.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub matrix: MatrixSource,
    /// Right-hand sides from an array-format Matrix Market file instead of
    /// the generator.
    pub rhs_file: Option<PathBuf>,
    pub rhs_kind: RhsKind,
    pub nrhs: usize,
    pub method: Method,
    pub rtol1: f64,
    pub rtol2: f64,
    pub rtol3: f64,
    pub d_phi_in: usize,
    pub restart: usize,
    pub nev: usize,
    pub max_reapply: usize,
    pub eig_residual_max: Option<f64>,
    pub pofcutoff: f64,
    pub stabilization: Stabilization,
    pub precond: PrecondKind,
    pub max_it: usize,
    pub seed: u64,
    pub threads: usize,
    #[serde(skip)]
    pub out: PathBuf,
}

/// Settings as collected from file and flags, before validation.
#[derive(Debug, Default, Clone)]
pub struct RawConfig {
    matrix: Option<String>,
    rhs_file: Option<String>,
    rhs_kind: Option<String>,
    nrhs: Option<String>,
    method: Option<String>,
    rtol1: Option<String>,
    rtol2: Option<String>,
    rtol3: Option<String>,
    d_phi_in: Option<String>,
    restart: Option<String>,
    nev: Option<String>,
    max_reapply: Option<String>,
    eig_residual_max: Option<String>,
    pofcutoff: Option<String>,
    stabilization: Option<String>,
    precond: Option<String>,
    max_it: Option<String>,
    seed: Option<String>,
    threads: Option<String>,
    out: Option<String>,
}

/// Keys accepted in configuration files (flags use the same names with
/// dashes).
pub const KEYS: [&str; 20] = [
    "matrix",
    "rhs_file",
    "rhs_kind",
    "nrhs",
    "method",
    "rtol1",
    "rtol2",
    "rtol3",
    "d_phi_in",
    "restart",
    "nev",
    "max_reapply",
    "eig_residual_max",
    "pofcutoff",
    "stabilization",
    "precond",
    "max_it",
    "seed",
    "threads",
    "out",
];

impl RawConfig {
    /// Sets one key; aliases `gen`, `mtx`, `rtol` and `dphi_in` are accepted.
    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        let v = Some(value.trim().to_string());
        let key = key.trim().replace('-', "_");
        match key.as_str() {
            "matrix" | "gen" | "mtx" => self.matrix = v,
            "rhs_file" => self.rhs_file = v,
            "rhs_kind" => self.rhs_kind = v,
            "nrhs" => self.nrhs = v,
            "method" => self.method = v,
            "rtol" | "rtol1" => self.rtol1 = v,
            "rtol2" => self.rtol2 = v,
            "rtol3" => self.rtol3 = v,
            "d_phi_in" | "dphi_in" => self.d_phi_in = v,
            "restart" | "m" => self.restart = v,
            "nev" => self.nev = v,
            "max_reapply" => self.max_reapply = v,
            "eig_residual_max" => self.eig_residual_max = v,
            "pofcutoff" => self.pofcutoff = v,
            "stabilization" => self.stabilization = v,
            "precond" => self.precond = v,
            "max_it" => self.max_it = v,
            "seed" => self.seed = v,
            "threads" => self.threads = v,
            "out" => self.out = v,
            other => {
                return Err(CliError::Config(format!(
                    "unknown key '{other}'; expected one of {}",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Reads `key = value` lines; blank lines and `#` comments are skipped.
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse_text(&text)
    }

    pub fn parse_text(text: &str) -> CliResult<Self> {
        let mut raw = RawConfig::default();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected 'key = value'", no + 1)))?;
            raw.set(k, v)?;
        }
        Ok(raw)
    }

    /// Validates and fills in defaults. The seed falls back to
    /// `env_seed` (from [`SEED_ENV`]) and then to 0.
    pub fn resolve(self, env_seed: Option<String>) -> CliResult<RunConfig> {
        fn opt<T: FromStr>(v: &Option<String>, what: &str, default: T) -> CliResult<T> {
            v.as_deref().map_or(Ok(default), |s| num(s, what))
        }
        fn tol(v: &Option<String>, what: &str, default: f64) -> CliResult<f64> {
            let t: f64 = opt(v, what, default)?;
            if t > 0.0 && t < 1.0 {
                Ok(t)
            } else {
                Err(CliError::Config(format!("{what} must lie in (0, 1), got {t}")))
            }
        }
        let matrix = MatrixSource::parse(
            self.matrix
                .as_deref()
                .ok_or_else(|| CliError::Config("no matrix given (use --gen or --mtx)".into()))?,
        )?;
        let rhs_kind = match self.rhs_kind.as_deref().unwrap_or("normal_unit") {
            "normal_unit" => RhsKind::NormalUnit,
            "four_phase" => RhsKind::FourPhase,
            other => {
                return Err(CliError::Config(format!(
                    "unknown rhs kind '{other}'; expected normal_unit or four_phase"
                )))
            }
        };
        let stabilization = match self.stabilization.as_deref() {
            None => Stabilization::Updating,
            Some(s) => s.parse().map_err(|_| {
                CliError::Config(format!("unknown stabilization '{s}'; expected none, basic or updating"))
            })?,
        };
        let precond = match self.precond.as_deref().unwrap_or("none") {
            "none" => PrecondKind::None,
            "ilu0" => PrecondKind::Ilu0,
            other => return Err(CliError::Config(format!("unknown preconditioner '{other}'; expected none or ilu0"))),
        };
        let seed_text = self.seed.clone().or(env_seed);
        let seed = opt(&seed_text, "seed", 0u64)?;
        let cfg = RunConfig {
            matrix,
            rhs_file: self.rhs_file.as_ref().map(PathBuf::from),
            rhs_kind,
            nrhs: opt(&self.nrhs, "nrhs", 1usize)?,
            method: self.method.as_deref().unwrap_or("gmres").parse()?,
            rtol1: tol(&self.rtol1, "rtol1", 1e-10)?,
            rtol2: tol(&self.rtol2, "rtol2", 1e-9)?,
            rtol3: tol(&self.rtol3, "rtol3", 1e-8)?,
            d_phi_in: opt(&self.d_phi_in, "d_phi_in", 25usize)?,
            restart: opt(&self.restart, "restart", 50usize)?,
            nev: opt(&self.nev, "nev", 30usize)?,
            max_reapply: opt(&self.max_reapply, "max_reapply", 8usize)?,
            eig_residual_max: self
                .eig_residual_max
                .as_deref()
                .map(|s| num(s, "eig_residual_max"))
                .transpose()?,
            pofcutoff: opt(&self.pofcutoff, "pofcutoff", 8.0f64)?,
            stabilization,
            precond,
            max_it: opt(&self.max_it, "max_it", 3000usize)?,
            seed,
            threads: opt(&self.threads, "threads", 1usize)?,
            out: PathBuf::from(self.out.as_deref().unwrap_or("out")),
        };
        if cfg.nrhs == 0 || cfg.d_phi_in == 0 || cfg.restart == 0 || cfg.max_it == 0 || cfg.threads == 0 {
            return Err(CliError::Config(
                "nrhs, d_phi_in, restart, max_it and threads must be positive".into(),
            ));
        }
        if cfg.method == Method::Deflated && cfg.nrhs < 2 && cfg.rhs_file.is_none() {
            return Err(CliError::Config("method deflated needs nrhs >= 2".into()));
        }
        Ok(cfg)
    }
}
