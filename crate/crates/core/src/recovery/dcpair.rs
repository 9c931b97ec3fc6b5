use std::collections::BTreeSet;

use crate::connectivity::components_by_shifts;
use crate::error::{Error, Result};
use crate::signal::{CyclicSignal, SpectrogramMeasurement, C64};
use crate::spectral::{ambiguity, dft, relation_transform};
use crate::twiddle::root_of_unity;
use crate::window::{omega_mask, Threshold};

use super::{
    propagate_phases, recover_autocorrelations, support_from_a0, zero_signal_outcome, CorrelationData, RecoveryOutcome,
    RecoveryStatus, Route, Tolerances,
};

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Least squares for `(x, y)` in `scale·(x cos θ_j − y sin θ_j) = t_j` over the given rows.
fn fit_pair(rows: &[(f64, f64, f64)]) -> Option<(f64, f64)> {
    let (mut s11, mut s12, mut s22, mut r1, mut r2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(p, q, t) in rows {
        s11 += p * p;
        s12 += p * q;
        s22 += q * q;
        r1 += p * t;
        r2 += q * t;
    }
    let det = s11 * s22 - s12 * s12;
    if det.abs() <= 1e-12 * (s11 * s22).max(f64::MIN_POSITIVE) {
        return None;
    }
    Some(((r1 * s22 - r2 * s12) / det, (s11 * r2 - s12 * r1) / det))
}

/// Recovery when row 0 of `V_ff` is known except at `±l*`.
///
/// `row0[l]` holds `V_ff(0, l)` or `None`; every shift `k ≠ 0` must be present
/// in `corr`. Magnitudes come from the off-diagonal products
/// `|f_j|² = |f_j||f_a| · |f_j||f_b| / (|f_a||f_b|)`; small supports are fixed
/// by requiring zeros off the support. The result is checked against the
/// known row-0 data.
pub fn recover_missing_dc_pair(
    corr: &CorrelationData,
    row0: &[Option<C64>],
    lstar: usize,
    tol: &Tolerances,
) -> Result<RecoveryOutcome> {
    let d = corr.dim();
    if d < 5 {
        return Err(Error::PreconditionViolated(format!("need d >= 5, got {d}")));
    }
    if row0.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: row0.len() });
    }
    if lstar == 0 || lstar >= d || !(gcd(lstar, d) == 1 || (d == 6 && (lstar == 2 || lstar == 4))) {
        return Err(Error::PreconditionViolated(format!("l*={lstar} is not admissible for d={d}")));
    }
    if let Some(k) = (1..d).find(|&k| !corr.has(k)) {
        return Err(Error::PreconditionViolated(format!("shift {k} is missing")));
    }
    let nrm = row0[0].ok_or_else(|| Error::PreconditionViolated("V_ff(0,0) is unknown".into()))?.re;
    let all: BTreeSet<usize> = (0..d).collect();
    if nrm <= 0.0 {
        return zero_signal_outcome(d, Route::DcPair, components_by_shifts(&[], d, &all)?);
    }

    let known: Vec<usize> = (0..d).filter(|&l| row0[l].is_some()).collect();
    let base: Vec<f64> = (0..d)
        .map(|j| {
            known.iter().map(|&l| (row0[l].unwrap() * root_of_unity(((j * l) % d) as i64, d)).re).sum::<f64>() / d as f64
        })
        .collect();
    let theta: Vec<C64> = (0..d).map(|j| root_of_unity(((j * lstar) % d) as i64, d)).collect();
    let coef = 2.0 / d as f64;
    let eq = |j: usize, target: f64| (coef * theta[j].re, -coef * theta[j].im, target - base[j]);

    let off = |j: usize, i: usize| corr.get(j as i64 - i as i64, j as i64).expect("known shift").norm();
    let thr = tol.tau_supp * nrm;
    let s_off: Vec<usize> = (0..d).filter(|&j| (0..d).any(|i| i != j && off(j, i) > thr)).collect();

    let mut notes = Vec::new();
    let a0: Vec<f64> = if s_off.len() >= 2 {
        let mut rows = Vec::with_capacity(d);
        for j in 0..d {
            if !s_off.contains(&j) {
                rows.push(eq(j, 0.0));
            } else if s_off.len() >= 3 {
                let mut partners: Vec<usize> = s_off.iter().copied().filter(|&i| i != j).collect();
                partners.sort_by(|&p, &q| off(j, q).total_cmp(&off(j, p)));
                let (p, q) = (partners[0], partners[1]);
                rows.push(eq(j, off(j, p) * off(j, q) / off(p, q)));
            }
        }
        let (x, y) = fit_pair(&rows).ok_or_else(|| Error::PreconditionViolated("magnitude system is singular".into()))?;
        notes.push(format!("off-diagonal support of size {}", s_off.len()));
        (0..d).map(|j| base[j] + coef * (x * theta[j].re - y * theta[j].im)).collect()
    } else {
        // a single support point p: V_ff(0,l) = ‖f‖² e^{−2πipl/d}
        let misfit = |p: usize| {
            known
                .iter()
                .map(|&l| (row0[l].unwrap() - nrm * root_of_unity(-(((p * l) % d) as i64), d)).norm())
                .fold(0.0, f64::max)
        };
        let p = (0..d).min_by(|&a, &b| misfit(a).total_cmp(&misfit(b))).expect("d >= 5");
        notes.push(format!("single support point {p}"));
        (0..d).map(|j| if j == p { nrm } else { 0.0 }).collect()
    };

    let spectrum = dft(&a0.iter().map(|&v| C64::new(v, 0.0)).collect::<Vec<_>>())?;
    let row_residual = known.iter().map(|&l| (spectrum[l] - row0[l].unwrap()).norm()).fold(0.0, f64::max);

    let mut full = corr.clone();
    full.insert(0, a0.iter().map(|&v| C64::new(v, 0.0)).collect())?;
    let support = support_from_a0(full.row(0).unwrap(), tol.tau_supp);
    let partition = components_by_shifts(&support, d, &all)?;
    let mut out = propagate_phases(&full, &partition, tol)?.with_route(Route::DcPair);
    out.notes.extend(notes);
    out.residual = out.residual.max(row_residual);
    if row_residual > tol.residual_tol * nrm {
        out.status = RecoveryStatus::Inconsistent;
        out.notes.push(format!("row-0 residual {row_residual:.3e} exceeds tolerance"));
    }
    Ok(out)
}

/// Builds the inputs of [`recover_missing_dc_pair`] from a measurement whose
/// window's mask is missing exactly `(0, ±l*)`.
pub fn recover_dc_from_measurement(x: &SpectrogramMeasurement, g: &CyclicSignal, tol: &Tolerances) -> Result<RecoveryOutcome> {
    let d = x.dim();
    if g.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: g.dim() });
    }
    let omega = omega_mask(g, Threshold::default())?;
    let holes = omega.false_entries();
    let lstar = match holes.as_slice() {
        [(0, a), (0, b)] if a + b == d => *a,
        _ => return Err(Error::PreconditionViolated(format!("mask zeros {holes:?} are not a pair (0, ±l*)"))),
    };
    let corr = recover_autocorrelations(x, g, &omega)?;
    let r = relation_transform(x);
    let vgg = ambiguity(g);
    let row0: Vec<Option<C64>> =
        (0..d).map(|l| omega.get(0, l).then(|| r.get(0, l) / vgg.get(0, l).conj())).collect();
    recover_missing_dc_pair(&corr, &row0, lstar, tol)
}
