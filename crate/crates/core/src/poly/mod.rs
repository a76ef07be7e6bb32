//! Residual polynomials in root form.
//!
//! A [`RootPolynomial`] stores the roots `θ_j` of `π(z) = ∏(1 - z/θ_j)` in
//! application order. The inverse approximation `p` and `φ(z) = z p(z)` are
//! defined through `π(z) = 1 - z p(z)`, so all three share one root list.

mod apply;
mod leja;
mod stabilize;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use apply::{apply_p, apply_phi, apply_pi, eval_scalar, PhiOperator};
pub use leja::{leja_order, leja_permutation};
pub use stabilize::{
    compute_pof, log10_pof, stabilize, stabilize_basic, stabilize_updating, StabilizeParams,
    Stabilization,
};

use crate::error::{Error, Result};

/// Relative tolerance for recognizing `θ_j` as the conjugate of `θ_i`.
pub const CONJ_PAIR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RootPolynomialData", into = "RootPolynomialData")]
pub struct RootPolynomial {
    roots: Vec<Complex64>,
    added: Vec<bool>,
    pofcutoff_used: Option<f64>,
    leja_generation: u32,
    real: bool,
}

/// Serialized form; validated on the way back in.
#[derive(Serialize, Deserialize)]
struct RootPolynomialData {
    roots: Vec<[f64; 2]>,
    added_flags: Vec<bool>,
    pofcutoff_used: Option<f64>,
    leja_generation: u32,
    real: bool,
}

impl TryFrom<RootPolynomialData> for RootPolynomial {
    type Error = Error;

    fn try_from(d: RootPolynomialData) -> Result<Self> {
        if d.added_flags.len() != d.roots.len() {
            return Err(Error::InvalidArgument(
                "added_flags and roots differ in length".into(),
            ));
        }
        let roots = d.roots.iter().map(|r| Complex64::new(r[0], r[1])).collect();
        let mut p = RootPolynomial::new(roots, d.real)?;
        p.added = d.added_flags;
        p.pofcutoff_used = d.pofcutoff_used;
        p.leja_generation = d.leja_generation;
        Ok(p)
    }
}

impl From<RootPolynomial> for RootPolynomialData {
    fn from(p: RootPolynomial) -> Self {
        RootPolynomialData {
            roots: p.roots.iter().map(|z| [z.re, z.im]).collect(),
            added_flags: p.added,
            pofcutoff_used: p.pofcutoff_used,
            leja_generation: p.leja_generation,
            real: p.real,
        }
    }
}

/// A run of roots applied together: one real root, one complex root, or an
/// adjacent conjugate pair on the real path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Block {
    Single(usize),
    Pair(usize),
}

impl RootPolynomial {
    /// Wraps roots already in application order.
    ///
    /// With `real = true` every non-real root must be immediately followed
    /// (or preceded) by its conjugate; the second member is snapped to the
    /// exact conjugate of the first so the real-arithmetic path is exact.
    pub fn new(mut roots: Vec<Complex64>, real: bool) -> Result<Self> {
        for (i, z) in roots.iter().enumerate() {
            if *z == Complex64::new(0.0, 0.0) {
                return Err(Error::ZeroRoot { index: i });
            }
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::InvalidArgument(format!("root {i} is not finite")));
            }
        }
        if real {
            let mut i = 0;
            while i < roots.len() {
                if roots[i].im == 0.0 {
                    i += 1;
                    continue;
                }
                let ok = i + 1 < roots.len() && is_conj_pair(roots[i], roots[i + 1]);
                if !ok {
                    return Err(Error::UnpairedRoot { index: i });
                }
                roots[i + 1] = roots[i].conj();
                i += 2;
            }
        }
        let n = roots.len();
        Ok(RootPolynomial {
            roots,
            added: vec![false; n],
            pofcutoff_used: None,
            leja_generation: 0,
            real,
        })
    }

    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    pub fn added_flags(&self) -> &[bool] {
        &self.added
    }

    pub fn added_count(&self) -> usize {
        self.added.iter().filter(|&&a| a).count()
    }

    pub fn pofcutoff_used(&self) -> Option<f64> {
        self.pofcutoff_used
    }

    pub fn leja_generation(&self) -> u32 {
        self.leja_generation
    }

    /// Whether non-real roots come in adjacent conjugate pairs, so the
    /// polynomial has real coefficients.
    pub fn is_real(&self) -> bool {
        self.real
    }

    /// Degree of `π`.
    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    /// Degree of `p`, one less than that of `π`.
    pub fn degree_p(&self) -> usize {
        self.roots.len().saturating_sub(1)
    }

    pub(crate) fn blocks(&self) -> Vec<Block> {
        let mut out = Vec::with_capacity(self.roots.len());
        let mut i = 0;
        while i < self.roots.len() {
            if self.real && self.roots[i].im != 0.0 {
                out.push(Block::Pair(i));
                i += 2;
            } else {
                out.push(Block::Single(i));
                i += 1;
            }
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

pub(crate) fn is_conj_pair(a: Complex64, b: Complex64) -> bool {
    a.im != 0.0 && (a - b.conj()).norm() <= CONJ_PAIR_TOL * a.norm()
}
