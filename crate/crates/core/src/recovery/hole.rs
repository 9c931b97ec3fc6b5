use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::connectivity::components_mod_d;
use crate::error::{Error, Result};
use crate::signal::{wrap, CyclicSignal, SpectrogramMeasurement, C64};

use super::{
    measurement_coeffs, propagate_phases, support_from_a0, window_coeffs, zero_signal_outcome, CorrelationData,
    MeasurementCoefficients, RecoveryStatus, Route, RecoveryOutcome, Tolerances, WindowCoefficients,
};

/// Length of the zero run the anchor certifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HoleKind {
    /// `f` vanishes on `anchor..=anchor+L`.
    Full,
    /// `f_anchor ≠ 0` and `f` vanishes on `anchor+1..=anchor+L`.
    Short,
}

/// Every `j*` with `b^{(k)}_j = 0` for `1 ≤ k ≤ L`, `j*+1−k ≤ j ≤ j*+k`,
/// and `b^{(k)}_{j*−k} ≠ 0` for some `1 ≤ k ≤ L`.
pub fn hole_classifier(b: &MeasurementCoefficients, tol: &Tolerances) -> Vec<usize> {
    let (d, l) = (b.dim(), b.len_l());
    let scale = b.scale();
    if scale == 0.0 || l == 0 {
        return Vec::new();
    }
    let zero = |z: C64| z.norm() <= tol.zero_tol * scale;
    (0..d)
        .filter(|&js| {
            let js = js as i64;
            let block_zero = (1..=l).all(|k| {
                let k = k as i64;
                (js + 1 - k..=js + k).all(|j| zero(b.get(k as usize, j)))
            });
            block_zero && (1..=l).any(|k| !zero(b.get(k, js - k as i64)))
        })
        .collect()
}

/// Solves row `k` of the banded system given `a^{(k)} = 0` on the cyclic run
/// `start .. start+zeros`. Forward steps divide by `conj(c_L)`, backward steps by
/// `conj(c_k)`; each pass covers half of the unknowns.
pub(crate) fn solve_row(c: &WindowCoefficients, b: &[C64], k: usize, start: usize, zeros: usize) -> Vec<C64> {
    let d = b.len();
    let l = c.len_l();
    let mut a = vec![C64::new(0.0, 0.0); d];
    if zeros >= d {
        return a;
    }
    let n = d - zeros;
    let pos = |i: usize| (start + zeros + i) % d;
    let nf = n.div_ceil(2);
    for i in 0..nf {
        let u = (start + zeros + i) as i64;
        let j = u - l as i64;
        let sum: C64 = (k..l).map(|m| c.get(k, m).conj() * a[wrap(j + m as i64, d)]).sum();
        a[pos(i)] = (b[wrap(j, d)] - sum) / c.get(k, l).conj();
    }
    for i in (nf..n).rev() {
        let u = (start + zeros + i) as i64;
        let j = u - k as i64;
        let sum: C64 = (k + 1..=l).map(|m| c.get(k, m).conj() * a[wrap(j + m as i64, d)]).sum();
        a[pos(i)] = (b[wrap(j, d)] - sum) / c.get(k, k).conj();
    }
    let direct = a.clone();
    let direct_res = row_residual(c, b, k, &direct);
    if direct_res == 0.0 {
        return direct;
    }
    // least-squares polish over all d equations
    let mut mat = DMatrix::<C64>::zeros(d, n);
    for j in 0..d {
        for m in k..=l {
            let p = (j + m) % d;
            let rel = (p + d - (start + zeros) % d) % d;
            if rel < n {
                mat[(j, rel)] += c.get(k, m).conj();
            }
        }
    }
    let rhs = DVector::from_column_slice(b);
    let Ok(sol) = mat.svd(true, true).solve(&rhs, 0.0) else {
        return direct;
    };
    let mut ls = vec![C64::new(0.0, 0.0); d];
    for i in 0..n {
        ls[pos(i)] = sol[i];
    }
    if row_residual(c, b, k, &ls) < direct_res {
        ls
    } else {
        direct
    }
}

fn row_residual(c: &WindowCoefficients, b: &[C64], k: usize, a: &[C64]) -> f64 {
    let d = b.len();
    (0..d)
        .map(|j| {
            let s: C64 = (k..=c.len_l()).map(|m| c.get(k, m).conj() * a[(j + m) % d]).sum();
            (b[j] - s).norm()
        })
        .fold(0.0, f64::max)
}

/// Recovery for a window in canonical position (`g_j ≠ 0 ⇔ 0 ≤ j ≤ L`) when
/// the signal has a certified zero run after `anchor`.
pub fn recover_with_hole(
    x: &SpectrogramMeasurement,
    g: &CyclicSignal,
    l: usize,
    anchor: usize,
    kind: HoleKind,
    tol: &Tolerances,
) -> Result<RecoveryOutcome> {
    let d = x.dim();
    if g.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: g.dim() });
    }
    if anchor >= d {
        return Err(Error::InvalidParameter(format!("anchor {anchor} outside 0..{d}")));
    }
    let c = window_coeffs(g, l)?;
    let b = measurement_coeffs(x, l)?;
    let route = match kind {
        HoleKind::Full => Route::HoleFull,
        HoleKind::Short => Route::HoleShort,
    };
    let scale0 = b.row(0).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale0 == 0.0 {
        return zero_signal_outcome(d, route, components_mod_d(&[], d, l)?);
    }
    let start = match kind {
        HoleKind::Full => {
            if b.get(0, anchor as i64).norm() > tol.zero_tol * scale0 {
                return Err(Error::AnchorInvalid(format!("b^(0) does not vanish at {anchor}")));
            }
            anchor
        }
        HoleKind::Short => {
            if !hole_classifier(&b, tol).contains(&anchor) {
                return Err(Error::AnchorInvalid(format!("{anchor} fails the hole classifier")));
            }
            (anchor + 1) % d
        }
    };

    let mut corr = CorrelationData::new(d);
    let mut eq_residual: f64 = 0.0;
    for k in 0..=l {
        let zeros = match kind {
            HoleKind::Full => l + k + 1,
            HoleKind::Short => l + k,
        };
        let mut row = solve_row(&c, b.row(k), k, start, zeros);
        eq_residual = eq_residual.max(row_residual(&c, b.row(k), k, &row));
        if k == 0 {
            row.iter_mut().for_each(|z| *z = C64::new(z.re, 0.0));
        } else {
            let mirror = (0..d as i64).map(|j| row[wrap(j + k as i64, d)].conj()).collect();
            corr.insert(d - k, mirror)?;
        }
        corr.insert(k, row)?;
    }

    let a0 = corr.row(0).expect("row 0 inserted");
    let support = support_from_a0(a0, tol.tau_supp);
    let partition = components_mod_d(&support, d, l)?;
    let mut out = propagate_phases(&corr, &partition, tol)?.with_route(route);
    let b_scale = b.scale();
    if eq_residual > tol.residual_tol * b_scale {
        out.status = RecoveryStatus::Inconsistent;
        out.notes.push(format!("banded system residual {eq_residual:.3e} exceeds tolerance"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recovery::{compare_up_to_phase, recover_generic_short};
    use crate::sampling::{random_short_window, random_signal_on, rng_for};
    use crate::spectral::measure;
    use crate::window::construct_power_window;

    fn classify(f: &CyclicSignal, g: &CyclicSignal, l: usize) -> Vec<usize> {
        hole_classifier(&measurement_coeffs(&measure(f, g).unwrap(), l).unwrap(), &Tolerances::default())
    }

    // condition (i) evaluated on the signal itself
    fn naive_anchors(f: &CyclicSignal, l: usize) -> Vec<usize> {
        let d = f.dim();
        let nz = |j: i64| f.at(j).norm() > 0.0;
        (0..d)
            .filter(|&js| {
                let js = js as i64;
                nz(js) && (1..=l as i64).all(|i| !nz(js + i)) && (1..=l as i64).any(|i| nz(js - i))
            })
            .collect()
    }

    #[test]
    fn classifier_two_deltas() {
        let g = construct_power_window(8, 3).unwrap();
        let f = CyclicSignal::from_real(&[1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let found = classify(&f, &g, 3);
        assert!(found.contains(&1));
        assert_eq!(found, naive_anchors(&f, 3));
    }

    #[test]
    fn classifier_periodic_has_no_anchor() {
        let g = CyclicSignal::from_real(&[1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let f = CyclicSignal::from_real(&[1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0]).unwrap();
        assert!(classify(&f, &g, 3).is_empty());
    }

    #[test]
    fn classifier_zero_signal() {
        let g = construct_power_window(8, 3).unwrap();
        assert!(classify(&CyclicSignal::zeros(8).unwrap(), &g, 3).is_empty());
    }

    #[test]
    fn classifier_matches_condition_on_random_signals() {
        let mut rng = rng_for(30, 0);
        for trial in 0..40 {
            let g = random_short_window(&mut rng, 12, 3);
            let supp: Vec<usize> = (0..12).filter(|j| (j * 7 + trial) % 5 < 2).collect();
            let f = random_signal_on(&mut rng, 12, &supp);
            assert_eq!(classify(&f, &g, 3), naive_anchors(&f, 3), "trial {trial}");
        }
    }

    #[test]
    fn full_hole_recovery() {
        let mut rng = rng_for(31, 0);
        let g = random_short_window(&mut rng, 8, 3);
        let f = random_signal_on(&mut rng, 8, &[0, 1, 2, 3]);
        let out = recover_with_hole(&measure(&f, &g).unwrap(), &g, 3, 4, HoleKind::Full, &Tolerances::default()).unwrap();
        assert_eq!(out.status, RecoveryStatus::UniqueUpToGlobalPhase);
        assert!(compare_up_to_phase(&f, out.estimate.as_ref().unwrap()).unwrap().1 < 1e-9);
    }

    #[test]
    fn short_hole_recovery() {
        let mut rng = rng_for(32, 0);
        let g = random_short_window(&mut rng, 8, 3);
        let f = random_signal_on(&mut rng, 8, &[5, 0, 1]);
        let x = measure(&f, &g).unwrap();
        let anchors = hole_classifier(&measurement_coeffs(&x, 3).unwrap(), &Tolerances::default());
        assert!(anchors.contains(&1));
        let out = recover_with_hole(&x, &g, 3, 1, HoleKind::Short, &Tolerances::default()).unwrap();
        assert!(out.is_success());
        assert!(compare_up_to_phase(&f, out.estimate.as_ref().unwrap()).unwrap().1 < 1e-9);
    }

    #[test]
    fn invalid_anchors_rejected() {
        let g = CyclicSignal::from_real(&[1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let f = CyclicSignal::from_real(&[1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0]).unwrap();
        let x = measure(&f, &g).unwrap();
        for j in 0..8 {
            assert!(matches!(recover_with_hole(&x, &g, 3, j, HoleKind::Short, &Tolerances::default()), Err(Error::AnchorInvalid(_))));
            assert!(matches!(recover_with_hole(&x, &g, 3, j, HoleKind::Full, &Tolerances::default()), Err(Error::AnchorInvalid(_))));
        }
    }

    #[test]
    fn agrees_with_generic_solver() {
        let mut rng = rng_for(33, 0);
        let g = random_short_window(&mut rng, 12, 3);
        let f = random_signal_on(&mut rng, 12, &[0, 1, 2, 3, 4, 5, 6]);
        let x = measure(&f, &g).unwrap();
        let tol = Tolerances::default();
        let a = recover_with_hole(&x, &g, 3, 7, HoleKind::Full, &tol).unwrap();
        let b = recover_generic_short(&x, &g, 3, &tol).unwrap();
        let (_, err) = compare_up_to_phase(b.estimate.as_ref().unwrap(), a.estimate.as_ref().unwrap()).unwrap();
        assert!(err < 1e-9);
    }
}
