use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::leja::leja_permutation;
use super::RootPolynomial;
use crate::rng::Rng;

/// Which root-adding rule to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stabilization {
    None,
    /// Single pass in Leja order with pof computed once.
    Basic,
    /// Increasing-magnitude scan with pof updating and a second Leja pass.
    #[default]
    Updating,
}

impl std::str::FromStr for Stabilization {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> crate::error::Result<Self> {
        match s {
            "none" => Ok(Stabilization::None),
            "basic" => Ok(Stabilization::Basic),
            "updating" => Ok(Stabilization::Updating),
            other => Err(crate::error::Error::InvalidArgument(format!(
                "unknown stabilization {other:?} (expected none, basic or updating)"
            ))),
        }
    }
}

/// Applies the selected rule.
pub fn stabilize(p: &RootPolynomial, mode: Stabilization, params: &StabilizeParams) -> RootPolynomial {
    match mode {
        Stabilization::None => p.clone(),
        Stabilization::Basic => stabilize_basic(p, params),
        Stabilization::Updating => stabilize_updating(p, params),
    }
}

/// Controls for adding stabilizing roots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilizeParams {
    /// Roots whose `log10(pof)` exceeds this value receive extra copies.
    pub pofcutoff: f64,
    /// Each copy is credited with this many orders of magnitude.
    pub copy_divisor: f64,
    /// Seed for the perturbation used by the second Leja ordering.
    pub seed: u64,
}

impl Default for StabilizeParams {
    fn default() -> Self {
        StabilizeParams {
            pofcutoff: 8.0,
            copy_divisor: 14.0,
            seed: 0,
        }
    }
}

impl StabilizeParams {
    /// `⌈(log10 pof - pofcutoff) / copy_divisor⌉` when strictly above the
    /// cutoff, otherwise zero.
    pub fn copies(&self, log10_pof: f64) -> usize {
        if log10_pof > self.pofcutoff {
            ((log10_pof - self.pofcutoff) / self.copy_divisor).ceil() as usize
        } else {
            0
        }
    }
}

/// `log10 ∏_{i≠k} |1 - θ_k/θ_i|` for every root, accumulated as a sum of
/// logarithms. A root with an exact duplicate gets `-∞`.
pub fn log10_pof(roots: &[Complex64]) -> Vec<f64> {
    (0..roots.len())
        .map(|k| {
            roots
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, &t)| (1.0 - roots[k] / t).norm().log10())
                .sum()
        })
        .collect()
}

/// The "product of other factors" for every root, `10^log10_pof`.
pub fn compute_pof(p: &RootPolynomial) -> Vec<f64> {
    log10_pof(p.roots()).into_iter().map(|l| 10f64.powf(l)).collect()
}

/// Working list during root addition: value, added flag, and the index of
/// the original root it came from (`None` for copies).
struct Work {
    roots: Vec<Complex64>,
    added: Vec<bool>,
    origin: Vec<Option<usize>>,
    real: bool,
}

impl Work {
    fn new(p: &RootPolynomial) -> Self {
        Work {
            roots: p.roots().to_vec(),
            added: p.added_flags().to_vec(),
            origin: (0..p.degree()).map(Some).collect(),
            real: p.is_real(),
        }
    }

    fn is_pair_start(&self, i: usize) -> bool {
        self.real && self.roots[i].im != 0.0
    }

    /// Positions at which a new block may be inserted without splitting a
    /// conjugate pair.
    fn boundary_at_or_after(&self, q: usize) -> usize {
        let mut i = 0;
        while i < q && i < self.roots.len() {
            i += if self.is_pair_start(i) { 2 } else { 1 };
        }
        i
    }

    fn insert_block(&mut self, at: usize, block: &[Complex64]) {
        for (offset, &z) in block.iter().enumerate() {
            self.roots.insert(at + offset, z);
            self.added.insert(at + offset, true);
            self.origin.insert(at + offset, None);
        }
    }

    /// Adds `copies` copies of the block starting at original root `k`: the
    /// first at the end, the rest spread evenly between the first occurrence
    /// and that final copy.
    fn add_copies(&mut self, k: usize, block: &[Complex64], copies: usize) {
        if copies == 0 {
            return;
        }
        let first = self
            .origin
            .iter()
            .position(|&o| o == Some(k))
            .expect("original root is present");
        let end = self.roots.len();
        self.insert_block(end, block);
        let span = end - first;
        let mut positions: Vec<usize> = (1..copies)
            .map(|i| self.boundary_at_or_after((first + i * span / copies).max(first + block.len())))
            .collect();
        positions.sort_unstable();
        for &q in positions.iter().rev() {
            self.insert_block(q.min(end), block);
        }
    }

    fn finish(self, template: &RootPolynomial, params: &StabilizeParams) -> RootPolynomial {
        let mut out = RootPolynomial::new(self.roots, template.is_real())
            .expect("copies preserve root validity and pairing");
        out.added = self.added;
        out.pofcutoff_used = Some(params.pofcutoff);
        out.leja_generation = template.leja_generation();
        out
    }
}

/// Members of the block that starts at `i` in `roots`.
fn block_of(p: &RootPolynomial, i: usize) -> Vec<Complex64> {
    if p.is_real() && p.roots()[i].im != 0.0 {
        vec![p.roots()[i], p.roots()[i + 1]]
    } else {
        vec![p.roots()[i]]
    }
}

/// Single pass in the existing order with pof values computed once.
pub fn stabilize_basic(p: &RootPolynomial, params: &StabilizeParams) -> RootPolynomial {
    let logs = log10_pof(p.roots());
    let mut work = Work::new(p);
    for block in p.blocks() {
        let (start, len) = match block {
            super::Block::Single(i) => (i, 1),
            super::Block::Pair(i) => (i, 2),
        };
        let lp = logs[start..start + len].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let copies = params.copies(lp);
        work.add_copies(start, &block_of(p, start), copies);
    }
    work.finish(p, params)
}

/// Root addition with pof updating: roots are examined by increasing
/// magnitude, each addition updates the pof of the roots not yet examined,
/// and a second (perturbed) Leja ordering fixes the final order.
pub fn stabilize_updating(p: &RootPolynomial, params: &StabilizeParams) -> RootPolynomial {
    let mut logs = log10_pof(p.roots());
    let mut work = Work::new(p);
    let starts: Vec<(usize, usize)> = p
        .blocks()
        .into_iter()
        .map(|b| match b {
            super::Block::Single(i) => (i, 1),
            super::Block::Pair(i) => (i, 2),
        })
        .collect();
    let mut scan: Vec<(usize, usize)> = starts.clone();
    scan.sort_by(|a, b| {
        p.roots()[a.0]
            .norm()
            .partial_cmp(&p.roots()[b.0].norm())
            .expect("finite roots")
            .then(a.0.cmp(&b.0))
    });
    let mut considered = vec![false; p.degree()];
    for &(start, len) in &scan {
        for c in considered.iter_mut().skip(start).take(len) {
            *c = true;
        }
        let lp = logs[start..start + len].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let copies = params.copies(lp);
        if copies == 0 {
            continue;
        }
        let block = block_of(p, start);
        work.add_copies(start, &block, copies);
        for j in 0..p.degree() {
            if considered[j] {
                continue;
            }
            let gain: f64 = block
                .iter()
                .map(|&t| (1.0 - p.roots()[j] / t).norm().log10())
                .sum();
            logs[j] += copies as f64 * gain;
        }
    }
    let mut out = work.finish(p, params);
    second_leja(&mut out, params.seed);
    out
}

/// Reorders with Leja on keys `(1 + 1e-12 g) θ`, one normal draw `g` per
/// block so that conjugate pairs stay exact conjugates.
fn second_leja(p: &mut RootPolynomial, seed: u64) {
    let mut rng = Rng::new(seed);
    let n = p.degree();
    let mut keys = p.roots().to_vec();
    let mut partner = vec![None; n];
    for block in p.blocks() {
        let g = 1.0 + 1e-12 * rng.normal();
        match block {
            super::Block::Single(i) => keys[i] *= g,
            super::Block::Pair(i) => {
                keys[i] *= g;
                keys[i + 1] *= g;
                partner[i] = Some(i + 1);
                partner[i + 1] = Some(i);
            }
        }
    }
    let perm = leja_permutation(&keys, &partner);
    // The permutation keeps partners adjacent but may put the lower member
    // first; RootPolynomial only requires adjacency.
    p.roots = perm.iter().map(|&i| p.roots[i]).collect();
    p.added = perm.iter().map(|&i| p.added[i]).collect();
    p.leja_generation = 1;
}
