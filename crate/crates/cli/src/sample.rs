//! The `sample-poly` command: scalar evaluation of a stored polynomial.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use polyinv::composite::DoublePolynomial;
use polyinv::poly::{eval_scalar, RootPolynomial};

use crate::error::{CliError, CliResult};

/// A polynomial read from `poly.json`.
#[derive(Debug, Clone)]
pub enum StoredPolynomial {
    Single(RootPolynomial),
    Double(DoublePolynomial),
}

impl StoredPolynomial {
    /// Accepts the envelope written by `solve` or a bare root list or
    /// double polynomial.
    pub fn from_value(mut v: serde_json::Value) -> CliResult<Self> {
        if let Some(inner) = v.get_mut("polynomial") {
            v = inner.take();
        }
        if v.is_null() {
            return Err(CliError::Config("the file holds no polynomial (bicgstab run?)".into()));
        }
        let parsed = if v.get("inner").is_some() {
            serde_json::from_value(v).map(StoredPolynomial::Double)
        } else {
            serde_json::from_value(v).map(StoredPolynomial::Single)
        };
        parsed.map_err(|e| CliError::Input(e.into()))
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| CliError::Input(e.into()))?;
        Self::from_value(v)
    }

    /// `(π(z), p(z), φ(z))`.
    pub fn eval(&self, z: Complex64) -> (Complex64, Complex64, Complex64) {
        match self {
            StoredPolynomial::Single(p) => eval_scalar(p, z),
            StoredPolynomial::Double(d) => {
                let (_, p_in, phi_in) = eval_scalar(&d.inner, z);
                let (_, p_out, _) = eval_scalar(&d.outer, phi_in);
                let p = p_in * p_out;
                let phi = z * p;
                (Complex64::new(1.0, 0.0) - phi, p, phi)
            }
        }
    }
}

/// Parses `x0,x1,nx` (points on the real axis) or `x0,x1,nx,y0,y1,ny`
/// (a rectangular grid, x fastest).
pub fn parse_grid(spec: &str) -> CliResult<Vec<Complex64>> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    let bad = || CliError::Config(format!("invalid grid '{spec}'; expected x0,x1,nx or x0,x1,nx,y0,y1,ny"));
    let axis = |lo: &str, hi: &str, n: &str| -> CliResult<Vec<f64>> {
        let lo: f64 = lo.parse().map_err(|_| bad())?;
        let hi: f64 = hi.parse().map_err(|_| bad())?;
        let n: usize = n.parse().map_err(|_| bad())?;
        Ok(match n {
            0 => return Err(bad()),
            1 => vec![lo],
            _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
        })
    };
    match parts.as_slice() {
        [x0, x1, nx] => Ok(axis(x0, x1, nx)?.into_iter().map(|x| Complex64::new(x, 0.0)).collect()),
        [x0, x1, nx, y0, y1, ny] => {
            let xs = axis(x0, x1, nx)?;
            let ys = axis(y0, y1, ny)?;
            Ok(ys
                .iter()
                .flat_map(|&y| xs.iter().map(move |&x| Complex64::new(x, y)))
                .collect())
        }
        _ => Err(bad()),
    }
}

/// Reads points, one per line as `re` or `re,im` (commas or whitespace);
/// `#` starts a comment.
pub fn read_points(path: &Path) -> CliResult<Vec<Complex64>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<f64> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| CliError::Config(format!("{}: line {}: invalid number", path.display(), no + 1)))?;
        match fields.as_slice() {
            [re] => out.push(Complex64::new(*re, 0.0)),
            [re, im] => out.push(Complex64::new(*re, *im)),
            _ => {
                return Err(CliError::Config(format!(
                    "{}: line {}: expected one or two numbers",
                    path.display(),
                    no + 1
                )))
            }
        }
    }
    Ok(out)
}

/// CSV with real and imaginary parts of `z, π(z), p(z), φ(z), 1/z`. The
/// `1/z` fields are empty at `z = 0`.
pub fn sample_csv(poly: &StoredPolynomial, points: &[Complex64]) -> String {
    let mut out = String::from("z_re,z_im,pi_re,pi_im,p_re,p_im,phi_re,phi_im,inv_re,inv_im\n");
    for &z in points {
        let (pi, p, phi) = poly.eval(z);
        write!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},",
            z.re, z.im, pi.re, pi.im, p.re, p.im, phi.re, phi.im
        )
        .expect("string write");
        if z == Complex64::new(0.0, 0.0) {
            out.push_str(",\n");
        } else {
            let inv = z.inv();
            writeln!(out, "{:.16e},{:.16e}", inv.re, inv.im).expect("string write");
        }
    }
    out
}
