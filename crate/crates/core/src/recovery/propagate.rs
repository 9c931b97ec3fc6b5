use std::collections::{BTreeSet, VecDeque};

use crate::connectivity::ConnectivityPartition;
use crate::error::{Error, Result};
use crate::signal::{wrap, CyclicSignal, C64};

use super::{CorrelationData, RecoveryOutcome, RecoveryStatus, Route, Tolerances};

/// Magnitudes from `a[0]` and phases by breadth-first search inside each
/// component, anchoring its smallest index to a positive real value.
///
/// Neighbours are visited by ascending shift, then ascending index. An edge
/// is used only when its entry carries at least half of `|f_u||f_v|`.
pub fn propagate_phases(corr: &CorrelationData, partition: &ConnectivityPartition, tol: &Tolerances) -> Result<RecoveryOutcome> {
    let d = corr.dim();
    let a0 = corr.row(0).ok_or_else(|| Error::PreconditionViolated("row 0 of the autocorrelation is unknown".into()))?;
    let peak = corr.peak();
    let mut mag = vec![0.0; d];
    for &j in &partition.universe {
        if j < 0 || j as usize >= d {
            return Err(Error::InvalidParameter(format!("support index {j} outside 0..{d}")));
        }
        mag[j as usize] = a0[j as usize].re.max(0.0).sqrt();
    }
    let shifts: Vec<usize> = corr.known_shifts().into_iter().filter(|&k| k != 0).collect();

    let mut phase = vec![C64::new(1.0, 0.0); d];
    let mut unreached = Vec::new();
    for comp in &partition.components {
        let members: BTreeSet<usize> = comp.iter().map(|&j| j as usize).collect();
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        let anchor = comp[0] as usize;
        seen.insert(anchor);
        queue.push_back(anchor);
        while let Some(u) = queue.pop_front() {
            let mut next: Vec<(usize, usize, C64)> = Vec::new();
            for &k in &shifts {
                let v = wrap(u as i64 - k as i64, d);
                // a[k][u] = f_u conj(f_v)
                let a = corr.get(k as i64, u as i64).expect("known shift");
                next.push((k, v, phase[u] * (a / a.norm()).conj()));
                let v = wrap(u as i64 + k as i64, d);
                // a[k][v] = f_v conj(f_u)
                let a = corr.get(k as i64, v as i64).expect("known shift");
                next.push((k, v, phase[u] * a / a.norm()));
            }
            next.sort_by_key(|&(k, v, _)| (k, v));
            for (k, v, p) in next {
                if !members.contains(&v) || seen.contains(&v) {
                    continue;
                }
                let a = if wrap(u as i64 - k as i64, d) == v {
                    corr.get(k as i64, u as i64)
                } else {
                    corr.get(k as i64, v as i64)
                }
                .expect("known shift");
                if !(a.norm() >= 0.5 * mag[u] * mag[v]) || !p.re.is_finite() {
                    continue;
                }
                phase[v] = p;
                seen.insert(v);
                queue.push_back(v);
            }
        }
        unreached.extend(members.difference(&seen).copied());
    }

    let estimate = CyclicSignal::new((0..d).map(|j| phase[j] * mag[j]).collect())?;
    let mut residual: f64 = 0.0;
    let mut phase_fail = 0usize;
    for &k in &corr.known_shifts() {
        for j in 0..d as i64 {
            let a = corr.get(k as i64, j).expect("known shift");
            let est = estimate.at(j) * estimate.at(j - k as i64).conj();
            let diff = (a - est).norm();
            residual = residual.max(diff);
            if a.norm() >= 1e-6 * peak && est.norm() > 0.0 {
                let angle = (a * est.conj()).arg().abs();
                if angle > tol.phase_tol && diff > tol.residual_tol * peak {
                    phase_fail += 1;
                }
            }
        }
    }

    let mut notes = Vec::new();
    let consistent = unreached.is_empty() && phase_fail == 0 && residual <= tol.residual_tol * peak.max(f64::MIN_POSITIVE);
    if !unreached.is_empty() {
        notes.push(format!("indices {unreached:?} not reachable through usable edges"));
    }
    if phase_fail > 0 {
        notes.push(format!("{phase_fail} entries fail the phase check"));
    }
    let status = if !consistent {
        RecoveryStatus::Inconsistent
    } else if partition.count() <= 1 {
        RecoveryStatus::UniqueUpToGlobalPhase
    } else {
        RecoveryStatus::UniquePerComponent
    };
    Ok(RecoveryOutcome {
        status,
        route: Route::None,
        estimate: Some(estimate),
        partition: Some(partition.clone()),
        free_phases: partition.count(),
        residual,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connectivity::{components_by_shifts, components_mod_d};
    use crate::recovery::{compare_per_component, compare_up_to_phase};
    use crate::sampling::{random_signal, random_signal_on, rng_for};

    #[test]
    fn full_data_recovers_signal() {
        let mut rng = rng_for(3, 0);
        let f = random_signal(&mut rng, 9);
        let corr = CorrelationData::from_signal(&f, 0..9);
        let part = components_by_shifts(&(0..9).collect::<Vec<_>>(), 9, &corr.known_shifts()).unwrap();
        let out = propagate_phases(&corr, &part, &Tolerances::default()).unwrap();
        assert_eq!(out.status, RecoveryStatus::UniqueUpToGlobalPhase);
        let (_, err) = compare_up_to_phase(&f, out.estimate.as_ref().unwrap()).unwrap();
        assert!(err < 1e-12);
        assert!(out.estimate.unwrap().at(0).im.abs() < 1e-15);
    }

    #[test]
    fn band_data_per_component() {
        let mut rng = rng_for(4, 0);
        let f = random_signal_on(&mut rng, 12, &[0, 1, 6, 7]);
        let shifts = [0, 1, 2, 10, 11];
        let corr = CorrelationData::from_signal(&f, shifts);
        let part = components_mod_d(&[0, 1, 6, 7], 12, 2).unwrap();
        let out = propagate_phases(&corr, &part, &Tolerances::default()).unwrap();
        assert_eq!(out.status, RecoveryStatus::UniquePerComponent);
        assert_eq!(out.free_phases, 2);
        let err = compare_per_component(&f, out.estimate.as_ref().unwrap(), &part).unwrap();
        assert!(err < 1e-12);
    }

    #[test]
    fn contradictory_data_flagged() {
        let mut rng = rng_for(5, 0);
        let f = random_signal(&mut rng, 7);
        let mut corr = CorrelationData::from_signal(&f, 0..7);
        let mut row = corr.row(1).unwrap().to_vec();
        row[3] *= C64::from_polar(1.0, 0.5);
        corr.insert(1, row).unwrap();
        let part = components_by_shifts(&(0..7).collect::<Vec<_>>(), 7, &corr.known_shifts()).unwrap();
        let out = propagate_phases(&corr, &part, &Tolerances::default()).unwrap();
        assert_eq!(out.status, RecoveryStatus::Inconsistent);
    }

    #[test]
    fn missing_row_zero_is_error() {
        let f = CyclicSignal::delta(5, 0).unwrap();
        let corr = CorrelationData::from_signal(&f, [1]);
        let part = components_mod_d(&[0], 5, 1).unwrap();
        assert!(propagate_phases(&corr, &part, &Tolerances::default()).is_err());
    }
}
