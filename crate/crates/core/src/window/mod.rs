//! Window certification: the support mask Ω(g) of the ambiguity function,
//! difference sets and the classification report.

mod compensated;
pub mod construct;

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::signal::{wrap, CyclicSignal};
use crate::spectral::ambiguity;

pub use compensated::{ambiguity_entry_compensated, row_scales};
pub use construct::*;

/// Which magnitude an ambiguity entry is compared against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdRule {
    /// `|V_gg(k,l)| > tau · Σ_j |g_j|·|g_{j−k}|`: relative to the size of the
    /// terms summed in row `k`.
    RowScale,
    /// `|V_gg(k,l)| > tau · max |V_gg|`.
    Peak,
}

impl ThresholdRule {
    pub fn name(self) -> &'static str {
        match self {
            ThresholdRule::RowScale => "row-scale",
            ThresholdRule::Peak => "peak",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    pub rule: ThresholdRule,
    pub tau: f64,
}

impl Threshold {
    pub const DEFAULT_ROW_TAU: f64 = 1e-13;
    pub const DEFAULT_PEAK_TAU: f64 = 1e-9;

    pub fn row_scale(tau: f64) -> Self {
        Self { rule: ThresholdRule::RowScale, tau }
    }

    pub fn peak(tau: f64) -> Self {
        Self { rule: ThresholdRule::Peak, tau }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(Error::InvalidParameter(format!("threshold tau must lie in (0, 1), got {}", self.tau)));
        }
        Ok(())
    }
}

impl Default for Threshold {
    fn default() -> Self {
        Self::row_scale(Self::DEFAULT_ROW_TAU)
    }
}

/// Boolean support mask of an ambiguity function.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaMask {
    d: usize,
    mask: Vec<bool>,
    threshold: Threshold,
}

impl OmegaMask {
    pub fn from_fn(d: usize, threshold: Threshold, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut mask = Vec::with_capacity(d * d);
        for k in 0..d {
            for l in 0..d {
                mask.push(f(k, l));
            }
        }
        Self { d, mask, threshold }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn threshold(&self) -> Threshold {
        self.threshold
    }

    #[inline]
    pub fn get(&self, k: usize, l: usize) -> bool {
        self.mask[k * self.d + l]
    }

    pub fn at(&self, k: i64, l: i64) -> bool {
        self.get(wrap(k, self.d), wrap(l, self.d))
    }

    pub fn row_full(&self, k: usize) -> bool {
        (0..self.d).all(|l| self.get(k, l))
    }

    pub fn row_empty(&self, k: usize) -> bool {
        (0..self.d).all(|l| !self.get(k, l))
    }

    pub fn all_true(&self) -> bool {
        self.mask.iter().all(|&b| b)
    }

    pub fn count_true(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    /// Entries where the mask is false, in row-major order.
    pub fn false_entries(&self) -> Vec<(usize, usize)> {
        (0..self.d)
            .flat_map(|k| (0..self.d).map(move |l| (k, l)))
            .filter(|&(k, l)| !self.get(k, l))
            .collect()
    }

    /// Masks agree entrywise; thresholds are not compared.
    pub fn same_support(&self, other: &OmegaMask) -> bool {
        self.d == other.d && self.mask == other.mask
    }

    pub fn is_symmetric(&self) -> bool {
        let d = self.d as i64;
        (0..d).all(|k| (0..d).all(|l| self.at(k, l) == self.at(-k, -l)))
    }
}

/// Ω(g) under the given threshold.
///
/// Entries that the plain transform already shows to be clearly nonzero are
/// accepted directly; the rest are re-evaluated in double-double arithmetic
/// so that exact structural zeros and tiny genuine values separate cleanly.
pub fn omega_mask(g: &CyclicSignal, threshold: Threshold) -> Result<OmegaMask> {
    threshold.validate()?;
    if g.is_zero() {
        return Err(Error::ZeroWindow);
    }
    let d = g.dim();
    let fast = ambiguity(g);
    let scales = row_scales(g);
    let peak = fast.max_abs();
    let mut decided = vec![false; d * d];
    for k in 0..d {
        for l in 0..d {
            let cutoff = match threshold.rule {
                ThresholdRule::RowScale => threshold.tau * scales[k],
                ThresholdRule::Peak => threshold.tau * peak,
            };
            if scales[k] == 0.0 {
                continue;
            }
            let v = fast.get(k, l).norm();
            let clear = cutoff.max(1e-8 * scales[k]);
            decided[k * d + l] = if v > clear { true } else { ambiguity_entry_compensated(g, k, l) > cutoff };
        }
    }
    // decide each (k,l), (−k,−l) pair once so the mask is exactly symmetric
    Ok(OmegaMask::from_fn(d, threshold, |k, l| {
        let (nk, nl) = ((d - k) % d, (d - l) % d);
        let (ck, cl) = if (k, l) <= (nk, nl) { (k, l) } else { (nk, nl) };
        decided[ck * d + cl]
    }))
}

/// The band `Ω_L^d`: rows `0..=L` and `d−L..d`.
pub fn omega_l_d(d: usize, l: usize) -> Result<OmegaMask> {
    if d < 2 || 2 * l >= d {
        return Err(Error::InvalidParameter(format!("need 0 <= L < d/2, got d={d}, L={l}")));
    }
    Ok(OmegaMask::from_fn(d, Threshold::default(), |k, _| k <= l || k >= d - l))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Cyclic(usize),
    Line,
}

/// `D_g = {l − j : j, l ∈ supp(g)}`, reduced mod d in cyclic mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferenceSet {
    domain: Domain,
    members: BTreeSet<i64>,
}

impl DifferenceSet {
    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn members(&self) -> &BTreeSet<i64> {
        &self.members
    }

    pub fn contains(&self, k: i64) -> bool {
        match self.domain {
            Domain::Cyclic(d) => self.members.contains(&(wrap(k, d) as i64)),
            Domain::Line => self.members.contains(&k),
        }
    }

    /// Every residue mod d is a difference (always false on the line).
    pub fn covers_all(&self) -> bool {
        match self.domain {
            Domain::Cyclic(d) => self.members.len() == d,
            Domain::Line => false,
        }
    }

    /// Smallest positive integer that is not a difference.
    pub fn smallest_gap(&self) -> Option<i64> {
        let limit = match self.domain {
            Domain::Cyclic(d) => d as i64,
            Domain::Line => i64::MAX,
        };
        (1..limit).find(|k| !self.contains(*k))
    }
}

pub fn difference_set(support: &[i64], domain: Domain) -> Result<DifferenceSet> {
    if support.is_empty() {
        return Err(Error::EmptySupport);
    }
    let mut members = BTreeSet::new();
    for &a in support {
        for &b in support {
            let diff = a - b;
            members.insert(match domain {
                Domain::Cyclic(d) => wrap(diff, d) as i64,
                Domain::Line => diff,
            });
        }
    }
    Ok(DifferenceSet { domain, members })
}

/// Summary of a window's class.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowReport {
    pub window: CyclicSignal,
    pub support: Vec<usize>,
    /// `y` such that `window.shifted(-y)` has its support starting at index 0.
    pub canonical_shift: usize,
    /// Present iff the support fits in a cyclic interval of length `L + 1` with `L < d/2`.
    pub short_l: Option<usize>,
    pub omega: OmegaMask,
    pub dg: DifferenceSet,
    pub is_generic_short: bool,
    pub is_full: bool,
    pub real_valued: bool,
}

impl WindowReport {
    pub fn dim(&self) -> usize {
        self.window.dim()
    }

    /// The window translated to its canonical position.
    pub fn canonical_window(&self) -> CyclicSignal {
        self.window.shifted(-(self.canonical_shift as i64))
    }

    /// Window lies in `C_L^d` after the canonical shift.
    pub fn is_short_block(&self) -> bool {
        matches!(self.short_l, Some(l) if self.support.len() == l + 1)
    }
}

/// Smallest cyclic interval containing `support`: `(start, length − 1)`.
pub fn cyclic_hull(support: &[usize], d: usize) -> Option<(usize, usize)> {
    let n = support.len();
    if n == 0 {
        return None;
    }
    let mut best_gap = 0;
    let mut start = support[0];
    for i in 0..n {
        let a = support[i];
        let b = if i + 1 < n { support[i + 1] } else { support[0] + d };
        if b - a > best_gap {
            best_gap = b - a;
            start = support[(i + 1) % n];
        }
    }
    Some((start, d - best_gap))
}

pub fn analyze_window(g: &CyclicSignal, threshold: Threshold) -> Result<WindowReport> {
    let omega = omega_mask(g, threshold)?;
    let d = g.dim();
    let support = g.nonzero_support();
    let (start, l) = cyclic_hull(&support, d).ok_or(Error::ZeroWindow)?;
    let short_l = (2 * l < d).then_some(l);
    let dg = difference_set(&support.iter().map(|&j| j as i64).collect::<Vec<_>>(), Domain::Cyclic(d))?;
    let is_generic_short = match short_l {
        Some(l) if support.len() == l + 1 => omega.same_support(&omega_l_d(d, l)?),
        _ => false,
    };
    Ok(WindowReport {
        window: g.clone(),
        canonical_shift: if short_l.is_some() { start } else { 0 },
        support,
        short_l,
        is_full: omega.all_true(),
        omega,
        dg,
        is_generic_short,
        real_valued: g.is_real(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_short_window, rng_for};
    use crate::signal::C64;

    #[test]
    fn delta_window_mask_is_row_zero() {
        let m = omega_mask(&CyclicSignal::delta(4, 0).unwrap(), Threshold::default()).unwrap();
        for k in 0..4 {
            for l in 0..4 {
                assert_eq!(m.get(k, l), k == 0);
            }
        }
    }

    #[test]
    fn zero_window_rejected() {
        assert_eq!(omega_mask(&CyclicSignal::zeros(4).unwrap(), Threshold::default()), Err(Error::ZeroWindow));
    }

    #[test]
    fn bad_tau_rejected() {
        let g = CyclicSignal::delta(4, 0).unwrap();
        assert!(omega_mask(&g, Threshold::peak(0.0)).is_err());
        assert!(omega_mask(&g, Threshold::row_scale(1.5)).is_err());
    }

    #[test]
    fn band_masks() {
        let m = omega_l_d(8, 3).unwrap();
        for k in 0..8 {
            assert_eq!(m.row_full(k), k != 4);
            assert_eq!(m.row_empty(k), k == 4);
        }
        let m = omega_l_d(6, 0).unwrap();
        assert!((0..6).all(|k| m.row_full(k) == (k == 0)));
        assert!(omega_l_d(5, 2).unwrap().all_true());
        assert!(omega_l_d(8, 4).is_err());
    }

    #[test]
    fn difference_sets() {
        let s = difference_set(&[0], Domain::Line).unwrap();
        assert_eq!(s.members().iter().copied().collect::<Vec<_>>(), vec![0]);
        let s = difference_set(&[0, 1, 2, 3], Domain::Line).unwrap();
        assert_eq!(s.members().iter().copied().collect::<Vec<_>>(), (-3..=3).collect::<Vec<_>>());
        let s = difference_set(&[0, 1, 2, 3], Domain::Cyclic(7)).unwrap();
        assert!(s.covers_all());
        assert!(difference_set(&[], Domain::Line).is_err());
        let s = difference_set(&[0, 1], Domain::Cyclic(8)).unwrap();
        assert!(!s.contains(4) && s.contains(-1));
        assert_eq!(s.smallest_gap(), Some(2));
    }

    #[test]
    fn hull_wraps() {
        assert_eq!(cyclic_hull(&[0, 1, 7], 8), Some((7, 2)));
        assert_eq!(cyclic_hull(&[3], 8), Some((3, 0)));
        assert_eq!(cyclic_hull(&[0, 4], 8), Some((4, 4)));
    }

    #[test]
    fn report_for_shifted_generic_window() {
        let mut rng = rng_for(4, 0);
        let g = random_short_window(&mut rng, 11, 4).shifted(6);
        let r = analyze_window(&g, Threshold::default()).unwrap();
        assert_eq!(r.short_l, Some(4));
        assert_eq!(r.canonical_shift, 6);
        assert!(r.is_generic_short && !r.is_full);
        assert_eq!(r.canonical_window().nonzero_support(), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn report_for_interior_zero() {
        let g = CyclicSignal::new(vec![
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.5),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
        ])
        .unwrap();
        let r = analyze_window(&g, Threshold::default()).unwrap();
        assert_eq!(r.short_l, Some(2));
        assert!(!r.is_short_block());
        assert!(!r.is_generic_short);
    }
}
