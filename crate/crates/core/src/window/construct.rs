//! Explicit window constructions with certified ambiguity supports.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use crate::error::{Error, Result};
use crate::sampling::rng_for;
use crate::signal::{CyclicSignal, LineSignal, C64};
use crate::twiddle::root_of_unity;

use super::{omega_l_d, omega_mask, OmegaMask, Threshold};

/// `g_j = 2^j` on `0..=L`, zero elsewhere.
pub fn construct_power_window(d: usize, l: usize) -> Result<CyclicSignal> {
    if d < 2 || 2 * l >= d {
        return Err(Error::InvalidParameter(format!("need L < d/2, got d={d}, L={l}")));
    }
    let mut g = CyclicSignal::zeros(d)?;
    for j in 0..=l {
        g.set(j as i64, C64::new((2.0f64).powi(j as i32), 0.0));
    }
    Ok(g)
}

/// Window with `|g_j| = 2^j` whose only ambiguity zero is at `(d/2, d/2)`.
///
/// Entries past `d/2` carry phases chosen so the row `d/2` sums cancel only at
/// frequency `d/2`. For `d ≡ 2 (mod 4)` the imaginary parts follow the pattern
/// `1, 3, 2, 2, …` (times `2^{-i}`, `i = j − d/2`). For `d > 48` the window is
/// divided by `2^{d−1}`.
pub fn construct_punctured_center_window(d: usize) -> Result<CyclicSignal> {
    if d < 4 || d % 2 == 1 {
        return Err(Error::InvalidParameter(format!("need even d >= 4, got {d}")));
    }
    let h = d / 2;
    let shift = if d > 48 { d as i32 - 1 } else { 0 };
    let mut g = CyclicSignal::zeros(d)?;
    for j in 0..d {
        let mag = (2.0f64).powi(j as i32 - shift);
        if j < h {
            g.set(j as i64, C64::new(mag, 0.0));
            continue;
        }
        let i = (j - h) as i32;
        // unit vector (a, b) with g_j = 2^j (a + ib)
        let (a, b) = if d % 4 == 0 {
            let re = if i <= 1 { 1.0 } else { 2.0 };
            let a = re * (2.0f64).powi(-i - j as i32);
            (a, (1.0 - a * a).sqrt())
        } else {
            let c = match i {
                0 => 1.0,
                1 => 3.0,
                _ => 2.0,
            };
            let b = c * (2.0f64).powi(-i - j as i32);
            ((1.0 - b * b).sqrt(), b)
        };
        g.set(j as i64, C64::new(mag * a, mag * b));
    }
    Ok(g)
}

/// `l* = 2` for `d = 6`, `(d−1)/2` for odd `d`, `d/2 − 1` for `4 | d`, `d/2 − 2` otherwise.
pub fn lstar(d: usize) -> Result<usize> {
    if d < 5 {
        return Err(Error::InvalidParameter(format!("l* needs d >= 5, got {d}")));
    }
    Ok(if d == 6 {
        2
    } else if d % 2 == 1 {
        (d - 1) / 2
    } else if d % 4 == 0 {
        d / 2 - 1
    } else {
        d / 2 - 2
    })
}

/// Coefficients `a_0..=a_m` of `p(z) = (z² − 2cos(2πl*/d)z + 1)(z + 2)^{m−2}`, `m = ⌊d/2⌋`.
pub fn dc_polynomial(d: usize) -> Result<Vec<f64>> {
    let ls = lstar(d)?;
    let m = d / 2;
    let c = root_of_unity(ls as i64, d).re;
    let mut p = vec![1.0, -2.0 * c, 1.0];
    for _ in 0..m - 2 {
        let mut next = vec![0.0; p.len() + 1];
        for (i, &a) in p.iter().enumerate() {
            next[i] += 2.0 * a;
            next[i + 1] += a;
        }
        p = next;
    }
    Ok(p)
}

/// Window whose ambiguity function vanishes exactly at `(0, ±l*)`.
///
/// `g_j = sqrt(a_j)` for `j < m`; `g_m` is drawn from the circle of radius
/// `sqrt(a_m)` avoiding the values that would create further zeros. Every
/// accepted draw is certified against the full mask.
pub fn construct_punctured_dc_window(d: usize, seed: u64) -> Result<CyclicSignal> {
    const MAX_DRAWS: usize = 1000;
    let ls = lstar(d)?;
    let m = d / 2;
    let a = dc_polynomial(d)?;
    if let Some(bad) = a.iter().position(|&x| x <= 0.0) {
        return Err(Error::PreconditionViolated(format!("coefficient a_{bad} of p is not positive")));
    }
    let mut g = CyclicSignal::zeros(d)?;
    for j in 0..m {
        g.set(j as i64, C64::new(a[j].sqrt(), 0.0));
    }
    let radius = a[m].sqrt();

    // values of g_m that zero some V_gg(k,l) with 1 <= k < d/2
    let mut bad = vec![
        C64::new(radius, 0.0),
        C64::new(-radius, 0.0),
        C64::new(0.0, radius),
        C64::new(0.0, -radius),
    ];
    for k in 1..m + 1 {
        if 2 * k >= d {
            break;
        }
        for l in 0..d {
            let partial: C64 = (k..m)
                .map(|j| g.at(j as i64) * g.at(j as i64 - k as i64).conj() * root_of_unity(-((j * l) as i64), d))
                .sum();
            bad.push(-root_of_unity((l * m) as i64, d) * partial / g.at((m - k) as i64).conj());
        }
    }

    let target = expected_dc_mask(d, ls);
    let mut rng = rng_for(seed, 0);
    for _ in 0..MAX_DRAWS {
        let theta: f64 = rng.random::<f64>() * std::f64::consts::TAU;
        let s = C64::from_polar(radius, theta);
        if bad.iter().any(|b| (s - b).norm() < 1e-4 * radius) {
            continue;
        }
        g.set(m as i64, s);
        if omega_mask(&g, Threshold::default())?.same_support(&target) {
            return Ok(g);
        }
    }
    Err(Error::RejectionLimit(MAX_DRAWS))
}

fn expected_dc_mask(d: usize, ls: usize) -> OmegaMask {
    OmegaMask::from_fn(d, Threshold::default(), |k, l| !(k == 0 && (l == ls || l == d - ls)))
}

/// Mask of `Z_d × Z_d` with the single entry `(d/2, d/2)` removed.
pub fn expected_center_mask(d: usize) -> OmegaMask {
    OmegaMask::from_fn(d, Threshold::default(), |k, l| !(k == d / 2 && l == d / 2))
}

/// Mask of `Z_d × Z_d` with `(0, ±l*)` removed.
pub fn expected_dc_pair_mask(d: usize) -> Result<OmegaMask> {
    Ok(expected_dc_mask(d, lstar(d)?))
}

/// Positions `a_0, a_1, …` with `a_0 = b_0 = 0`,
/// `b_{n+1} = min(N_0 \ {a_m − a_l : m, l ≤ 2n})`,
/// `a_{2n+1} = 2a_{2n} + 2b_{n+1}` and `a_{2n+2} = 2a_{2n} + 3b_{n+1}`.
pub fn sidon_positions(n_terms: usize) -> Result<Vec<i64>> {
    if n_terms == 0 {
        return Err(Error::InvalidParameter("need at least one term".into()));
    }
    let overflow = || Error::Overflow(format!("positions exceed i64 before {n_terms} terms"));
    let mut a = vec![0i64];
    let mut n = 0usize;
    while a.len() < n_terms {
        let diffs: BTreeSet<i64> = a[..=2 * n].iter().flat_map(|&x| a[..=2 * n].iter().map(move |&y| x - y)).collect();
        let b = (0i64..).find(|v| !diffs.contains(v)).expect("finite set has a gap");
        let base = a[2 * n].checked_mul(2).ok_or_else(overflow)?;
        a.push(base.checked_add(b.checked_mul(2).ok_or_else(overflow)?).ok_or_else(overflow)?);
        a.push(base.checked_add(b.checked_mul(3).ok_or_else(overflow)?).ok_or_else(overflow)?);
        n += 1;
    }
    a.truncate(n_terms);
    Ok(a)
}

/// Number of ordered pairs `(m, l)` with `a_m − a_l = k`, for every positive `k` that occurs.
pub fn difference_multiplicities(positions: &[i64]) -> BTreeMap<i64, usize> {
    let mut out = BTreeMap::new();
    for &x in positions {
        for &y in positions {
            if x > y {
                *out.entry(x - y).or_insert(0) += 1;
            }
        }
    }
    out
}

/// Sparse line window `Σ c_n δ_{a_n}` on the positions of [`sidon_positions`].
#[derive(Debug, Clone, PartialEq)]
pub struct LineDifferenceWindow {
    pub positions: Vec<i64>,
    pub window: LineSignal,
}

impl LineDifferenceWindow {
    /// The same window with term `n` removed.
    pub fn without_term(&self, n: usize) -> Result<LineDifferenceWindow> {
        if n >= self.positions.len() {
            return Err(Error::InvalidParameter(format!("term {n} out of range")));
        }
        let mut positions = self.positions.clone();
        let removed = positions.remove(n);
        let mut entries = self.window.entries().clone();
        entries.remove(&removed);
        Ok(LineDifferenceWindow { positions, window: LineSignal::new(entries) })
    }
}

pub fn construct_line_difference_window(coeffs: &[C64]) -> Result<LineDifferenceWindow> {
    if let Some(i) = coeffs.iter().position(|c| c.norm_sqr() == 0.0) {
        return Err(Error::InvalidParameter(format!("coefficient {i} is zero")));
    }
    let positions = sidon_positions(coeffs.len())?;
    let window = LineSignal::new(positions.iter().copied().zip(coeffs.iter().copied()).collect());
    Ok(LineDifferenceWindow { positions, window })
}

/// Whether some real-valued window has full ambiguity support in dimension `d`.
#[derive(Debug, Clone, PartialEq)]
pub enum RealWindowVerdict {
    /// Every real window vanishes on these entries.
    Infeasible { forced_zeros: Vec<(usize, usize)> },
    Feasible { witness: CyclicSignal },
}

pub fn real_window_feasibility(d: usize) -> Result<RealWindowVerdict> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("need d >= 2, got {d}")));
    }
    if d % 2 == 0 {
        let forced_zeros = (1..d).step_by(2).map(|l| (d / 2, l)).collect();
        Ok(RealWindowVerdict::Infeasible { forced_zeros })
    } else {
        Ok(RealWindowVerdict::Feasible { witness: construct_power_window(d, (d - 1) / 2)? })
    }
}

/// Replace `g_0` so that `V_gg(k, l) = 0` for a window supported on `0..=L`, `1 ≤ k ≤ L`.
///
/// Solves the `j = k` term of the row-`k` sum for `g_0`; the other entries of
/// `g` are kept.
pub fn force_ambiguity_zero(g: &CyclicSignal, l_len: usize, k: usize, l: usize) -> Result<CyclicSignal> {
    let d = g.dim();
    if k == 0 || k > l_len || 2 * l_len >= d {
        return Err(Error::InvalidParameter(format!("need 1 <= k <= L < d/2, got k={k}, L={l_len}, d={d}")));
    }
    let gk = g.at(k as i64);
    if gk.norm_sqr() == 0.0 {
        return Err(Error::InvalidParameter(format!("g_{k} is zero")));
    }
    let rest: C64 = (k + 1..=l_len)
        .map(|j| g.at(j as i64).conj() * g.at((j - k) as i64) * root_of_unity((j * l) as i64, d))
        .sum();
    let mut out = g.clone();
    out.set(0, -rest * root_of_unity(-((k * l) as i64), d) / gk.conj());
    Ok(out)
}

/// The mask a generic window of length `L + 1` would have.
pub fn generic_mask(d: usize, l: usize) -> Result<OmegaMask> {
    omega_l_d(d, l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_real_signal, random_short_window};
    use crate::spectral::ambiguity;
    use crate::window::{analyze_window, difference_set, Domain};

    fn mask(g: &CyclicSignal) -> OmegaMask {
        omega_mask(g, Threshold::default()).unwrap()
    }

    #[test]
    fn power_window_masks() {
        assert!(mask(&construct_power_window(7, 3).unwrap()).all_true());
        assert!(mask(&construct_power_window(8, 3).unwrap()).same_support(&omega_l_d(8, 3).unwrap()));
        assert!(construct_power_window(8, 4).is_err());
    }

    #[test]
    fn power_window_d4() {
        let g = construct_power_window(4, 1).unwrap();
        let want = [1.0, 2.0, 0.0, 0.0];
        for (z, w) in g.entries().iter().zip(want) {
            assert_eq!(*z, C64::new(w, 0.0));
        }
        // V_gg(1,l) = g_1·conj(g_0)·e^{-2πil/4} has modulus 2
        let a = ambiguity(&g);
        for l in 0..4 {
            assert!((a.get(1, l).norm() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn punctured_center_d8() {
        let g = construct_punctured_center_window(8).unwrap();
        for j in 0..8 {
            assert!((g.entries()[j].norm() - (2.0f64).powi(j as i32)).abs() < 1e-9);
        }
        let m = mask(&g);
        assert_eq!(m.false_entries(), vec![(4, 4)]);
        let a = ambiguity(&g);
        for l in [0usize, 2, 6] {
            assert!(a.get(4, l).norm() > 1.0);
        }
    }

    #[test]
    fn punctured_center_d12_and_d10() {
        assert_eq!(mask(&construct_punctured_center_window(12).unwrap()).false_entries(), vec![(6, 6)]);
        assert_eq!(mask(&construct_punctured_center_window(10).unwrap()).false_entries(), vec![(5, 5)]);
        assert!(construct_punctured_center_window(7).is_err());
    }

    #[test]
    fn punctured_center_large_d_is_scaled() {
        let g = construct_punctured_center_window(50).unwrap();
        assert!((g.max_abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lstar_values() {
        assert_eq!(lstar(6).unwrap(), 2);
        assert_eq!(lstar(9).unwrap(), 4);
        assert_eq!(lstar(12).unwrap(), 5);
        assert_eq!(lstar(14).unwrap(), 5);
        assert!(lstar(4).is_err());
    }

    fn naive_poly(d: usize) -> Vec<f64> {
        // expand from the roots directly
        let ls = lstar(d).unwrap();
        let m = d / 2;
        let mut roots = vec![root_of_unity(-(ls as i64), d), root_of_unity(ls as i64, d)];
        roots.extend(std::iter::repeat(C64::new(-2.0, 0.0)).take(m - 2));
        let mut p = vec![C64::new(1.0, 0.0)];
        for r in roots {
            let mut next = vec![C64::new(0.0, 0.0); p.len() + 1];
            for (i, &c) in p.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * r;
            }
            p = next;
        }
        p.iter().map(|c| c.re).collect()
    }

    #[test]
    fn dc_polynomial_positive_and_matches_roots() {
        for d in 5..=16 {
            let p = dc_polynomial(d).unwrap();
            let q = naive_poly(d);
            assert_eq!(p.len(), d / 2 + 1);
            for (a, b) in p.iter().zip(&q) {
                assert!(*a > 0.0);
                assert!((a - b).abs() < 1e-9 * b.abs().max(1.0));
            }
        }
    }

    #[test]
    fn punctured_dc_small() {
        let g = construct_punctured_dc_window(5, 1).unwrap();
        assert_eq!(mask(&g).false_entries(), vec![(0, 2), (0, 3)]);
        let g = construct_punctured_dc_window(6, 1).unwrap();
        assert_eq!(mask(&g).false_entries(), vec![(0, 2), (0, 4)]);
        assert!(g.nonzero_support().iter().all(|&j| j <= 3));
    }

    #[test]
    fn sidon_prefix() {
        let a = sidon_positions(8).unwrap();
        assert_eq!(&a[..5], &[0, 2, 3, 14, 18]);
        assert!(difference_multiplicities(&a).values().all(|&c| c == 1));
    }

    #[test]
    fn sidon_dropping_a_term_leaves_a_gap() {
        let coeffs = vec![C64::new(1.0, 0.0); 7];
        let w = construct_line_difference_window(&coeffs).unwrap();
        let full = difference_set(&w.positions, Domain::Line).unwrap();
        for n in 0..7 {
            let cut = w.without_term(n).unwrap();
            let ds = difference_set(&cut.positions, Domain::Line).unwrap();
            assert!(full.members().iter().any(|&k| k > 0 && !ds.contains(k)));
        }
    }

    #[test]
    fn zero_coefficient_rejected() {
        assert!(construct_line_difference_window(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]).is_err());
    }

    #[test]
    fn real_windows() {
        match real_window_feasibility(6).unwrap() {
            RealWindowVerdict::Infeasible { forced_zeros } => assert_eq!(forced_zeros, vec![(3, 1), (3, 3), (3, 5)]),
            other => panic!("{other:?}"),
        }
        let mut rng = crate::sampling::rng_for(1, 0);
        let g = random_real_signal(&mut rng, 6);
        let a = ambiguity(&g);
        for l in [1, 3, 5] {
            assert!(a.get(3, l).norm() < 1e-12);
        }
        match real_window_feasibility(7).unwrap() {
            RealWindowVerdict::Feasible { witness } => assert!(mask(&witness).all_true()),
            other => panic!("{other:?}"),
        }
        assert!(matches!(real_window_feasibility(2).unwrap(), RealWindowVerdict::Infeasible { .. }));
    }

    #[test]
    fn forced_zero_window_is_non_generic() {
        let mut rng = crate::sampling::rng_for(12, 0);
        let g = random_short_window(&mut rng, 12, 4);
        let h = force_ambiguity_zero(&g, 4, 2, 5).unwrap();
        assert!(ambiguity(&h).get(2, 5).norm() < 1e-12);
        let r = analyze_window(&h, Threshold::default()).unwrap();
        assert!(!r.is_generic_short);
        assert!(!r.omega.get(2, 5) && !r.omega.get(10, 7));
    }
}
