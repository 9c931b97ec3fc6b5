use std::collections::BTreeSet;

use crate::connectivity::components_by_shifts;
use crate::error::{Error, Result};
use crate::signal::{CyclicSignal, SpectrogramMeasurement, C64};
use crate::spectral::{ambiguity, relation_transform};
use crate::twiddle::root_of_unity;
use crate::window::{omega_mask, Threshold};

use super::{
    propagate_phases, recover_autocorrelations, support_from_a0, zero_signal_outcome, CorrelationData, RecoveryOutcome,
    Route, Tolerances,
};

/// Recovery when every shift except `d/2` is known.
///
/// `r_row` is row `d/2` of the relation transform with `None` where the window's
/// ambiguity function vanishes; `vgg_row` is the same row of `V_gg`. The row is
/// only consulted when the support is an antipodal pair `{j, j + d/2}`.
pub fn recover_missing_center(
    corr: &CorrelationData,
    r_row: &[Option<C64>],
    vgg_row: &[C64],
    tol: &Tolerances,
) -> Result<RecoveryOutcome> {
    let d = corr.dim();
    if d < 4 || d % 2 != 0 {
        return Err(Error::PreconditionViolated(format!("need even d >= 4, got {d}")));
    }
    for v in [r_row.len(), vgg_row.len()] {
        if v != d {
            return Err(Error::DimensionMismatch { expected: d, found: v });
        }
    }
    let h = d / 2;
    if let Some(k) = (0..d).find(|&k| k != h && !corr.has(k)) {
        return Err(Error::PreconditionViolated(format!("shift {k} is missing")));
    }
    let a0 = corr.row(0).expect("checked above");
    let support = support_from_a0(a0, tol.tau_supp);
    let mut shifts = corr.known_shifts();
    shifts.remove(&h);
    let partition = components_by_shifts(&support, d, &shifts)?;
    if support.is_empty() {
        return zero_signal_outcome(d, Route::Center, partition);
    }
    if partition.is_connected() {
        let mut trimmed = corr.clone();
        trimmed.remove(h);
        return Ok(propagate_phases(&trimmed, &partition, tol)?.with_route(Route::Center));
    }
    if support.len() != 2 || support[1] - support[0] != h {
        return Err(Error::PreconditionViolated(format!(
            "support {support:?} splits without being an antipodal pair"
        )));
    }

    // V_ff(d/2,l)·e^{2πijl/d} = c + conj(c)·(−1)^l with c = f_j conj(f_{j+d/2})
    let j = support[0];
    let (mut re_num, mut re_w, mut im_num, mut im_w) = (0.0, 0.0, 0.0, 0.0);
    for l in 0..d {
        let (Some(r), v) = (r_row[l], vgg_row[l]) else { continue };
        let w = v.norm_sqr();
        if w == 0.0 {
            continue;
        }
        let val = r / v.conj() * root_of_unity(((j * l) % d) as i64, d);
        if l % 2 == 0 {
            re_num += w * val.re / 2.0;
            re_w += w;
        } else {
            im_num += w * val.im / 2.0;
            im_w += w;
        }
    }
    if re_w == 0.0 || im_w == 0.0 {
        return Err(Error::PreconditionViolated("row d/2 lacks entries of both parities".into()));
    }
    let (re_est, im_est) = (re_num / re_w, im_num / im_w);
    let mag = (a0[j].re.max(0.0) * a0[j + h].re.max(0.0)).sqrt();
    let c = if re_w >= im_w {
        let re = re_est.clamp(-mag, mag);
        C64::new(re, im_est.signum() * (mag * mag - re * re).max(0.0).sqrt())
    } else {
        let im = im_est.clamp(-mag, mag);
        C64::new(re_est.signum() * (mag * mag - im * im).max(0.0).sqrt(), im)
    };
    let mut row = vec![C64::new(0.0, 0.0); d];
    row[j] = c;
    row[j + h] = c.conj();
    let mut full = corr.clone();
    full.insert(h, row)?;
    let all: BTreeSet<usize> = (0..d).collect();
    let partition = components_by_shifts(&support, d, &all)?;
    let mut out = propagate_phases(&full, &partition, tol)?.with_route(Route::Center);
    out.notes.push(format!("antipodal pair {{{j}, {}}} resolved from row d/2", j + h));
    Ok(out)
}

/// Builds the inputs of [`recover_missing_center`] from a measurement whose
/// window has a single mask zero at `(d/2, d/2)`.
pub fn recover_center_from_measurement(x: &SpectrogramMeasurement, g: &CyclicSignal, tol: &Tolerances) -> Result<RecoveryOutcome> {
    let d = x.dim();
    if g.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: g.dim() });
    }
    if d % 2 != 0 {
        return Err(Error::PreconditionViolated(format!("need even d, got {d}")));
    }
    let h = d / 2;
    let omega = omega_mask(g, Threshold::default())?;
    if omega.false_entries() != vec![(h, h)] {
        return Err(Error::PreconditionViolated("mask is not missing exactly (d/2, d/2)".into()));
    }
    let corr = recover_autocorrelations(x, g, &omega)?;
    let r = relation_transform(x);
    let vgg = ambiguity(g);
    let r_row: Vec<Option<C64>> = (0..d).map(|l| omega.get(h, l).then(|| r.get(h, l))).collect();
    recover_missing_center(&corr, &r_row, vgg.row(h), tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recovery::{compare_up_to_phase, RecoveryStatus};
    use crate::sampling::{random_signal, random_signal_on, rng_for};
    use crate::spectral::measure;
    use crate::window::construct_punctured_center_window;

    fn run(f: &CyclicSignal) -> RecoveryOutcome {
        let g = construct_punctured_center_window(f.dim()).unwrap();
        recover_center_from_measurement(&measure(f, &g).unwrap(), &g, &Tolerances::default()).unwrap()
    }

    #[test]
    fn antipodal_pair() {
        let mut rng = rng_for(40, 0);
        let f = random_signal_on(&mut rng, 8, &[0, 4]);
        let out = run(&f);
        assert_eq!(out.status, RecoveryStatus::UniqueUpToGlobalPhase);
        assert!(compare_up_to_phase(&f, out.estimate.as_ref().unwrap()).unwrap().1 < 1e-9);
    }

    #[test]
    fn three_point_support() {
        let mut rng = rng_for(41, 0);
        let f = random_signal_on(&mut rng, 8, &[0, 1, 4]);
        let out = run(&f);
        assert_eq!(out.status, RecoveryStatus::UniqueUpToGlobalPhase);
        assert!(compare_up_to_phase(&f, out.estimate.as_ref().unwrap()).unwrap().1 < 1e-9);
    }

    #[test]
    fn delta_is_trivial() {
        let f = CyclicSignal::delta(8, 0).unwrap();
        let out = run(&f);
        assert!(compare_up_to_phase(&f, out.estimate.as_ref().unwrap()).unwrap().1 < 1e-12);
    }

    #[test]
    fn dense_signal_d12() {
        let mut rng = rng_for(42, 0);
        let f = random_signal(&mut rng, 12);
        let out = run(&f);
        assert!(compare_up_to_phase(&f, out.estimate.as_ref().unwrap()).unwrap().1 < 1e-7);
    }

    #[test]
    fn odd_dimension_rejected() {
        let corr = CorrelationData::new(7);
        assert!(recover_missing_center(&corr, &[None; 7], &[C64::new(0.0, 0.0); 7], &Tolerances::default()).is_err());
    }
}
