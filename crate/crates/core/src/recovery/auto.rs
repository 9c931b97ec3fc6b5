use crate::error::{Error, Result};
use crate::signal::{CyclicSignal, SpectrogramMeasurement};
use crate::window::{analyze_window, Threshold};

use super::{
    hole_classifier, measurement_coeffs, recover_center_from_measurement, recover_dc_from_measurement, recover_full,
    recover_generic_short, recover_with_hole, zero_signal_outcome, HoleKind, RecoveryOutcome, Route, Tolerances,
};
use crate::connectivity::components_mod_d;

/// Measurement for the window translated by `−shift`: `X'(k,l) = X(k − shift, l)`.
pub fn canonicalize_measurement(x: &SpectrogramMeasurement, shift: usize) -> SpectrogramMeasurement {
    let d = x.dim();
    let rows = (0..d).map(|k| x.row((k + d - shift % d) % d).to_vec()).collect();
    SpectrogramMeasurement::from_rows(rows).expect("rows of a valid measurement")
}

/// Tries the recovery routes in the order full, generic short, hole of
/// length `L + 1`, hole of length `L`, punctured center, punctured DC pair.
pub fn recover_auto(x: &SpectrogramMeasurement, g: &CyclicSignal, tol: &Tolerances) -> Result<RecoveryOutcome> {
    if x.dim() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), found: x.dim() });
    }
    let d = x.dim();
    let report = analyze_window(g, Threshold::default())?;
    if report.is_full {
        return recover_full(x, g, tol);
    }
    if report.is_generic_short {
        return recover_generic_short(x, g, report.short_l.expect("generic windows are short"), tol);
    }
    if report.is_short_block() {
        let l = report.short_l.expect("short block");
        let gc = report.canonical_window();
        let xc = canonicalize_measurement(x, report.canonical_shift);
        let b = measurement_coeffs(&xc, l)?;
        let scale0 = b.row(0).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if scale0 == 0.0 {
            return zero_signal_outcome(d, Route::HoleFull, components_mod_d(&[], d, l)?);
        }
        if let Some(j) = (0..d).find(|&j| b.get(0, j as i64).norm() <= tol.zero_tol * scale0) {
            return recover_with_hole(&xc, &gc, l, j, HoleKind::Full, tol);
        }
        if let Some(&j) = hole_classifier(&b, tol).first() {
            return recover_with_hole(&xc, &gc, l, j, HoleKind::Short, tol);
        }
    }
    let holes = report.omega.false_entries();
    if d % 2 == 0 && holes == vec![(d / 2, d / 2)] {
        return recover_center_from_measurement(x, g, tol);
    }
    if matches!(holes.as_slice(), [(0, a), (0, b)] if a + b == d) {
        return recover_dc_from_measurement(x, g, tol);
    }
    Ok(RecoveryOutcome::undecidable(match report.short_l {
        Some(l) if report.is_short_block() => {
            format!("non-generic window of length {} and no certified hole in the signal", l + 1)
        }
        _ => format!("no route covers a mask with {} zeros", holes.len()),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recovery::{compare_up_to_phase, RecoveryStatus};
    use crate::sampling::{random_short_window, random_signal, random_signal_on, rng_for};
    use crate::spectral::measure;
    use crate::window::{construct_punctured_center_window, construct_punctured_dc_window, force_ambiguity_zero};

    #[test]
    fn canonical_shift_matches_window_shift() {
        let mut rng = rng_for(70, 0);
        let g = random_short_window(&mut rng, 10, 3);
        let f = random_signal(&mut rng, 10);
        let shifted = measure(&f, &g.shifted(4)).unwrap();
        let back = canonicalize_measurement(&shifted, 4);
        assert!(back.max_abs_diff(&measure(&f, &g).unwrap()) < 1e-9);
    }

    #[test]
    fn routes() {
        let mut rng = rng_for(71, 0);
        let tol = Tolerances::default();
        let f = random_signal(&mut rng, 12);
        let g = random_signal(&mut rng, 12);
        assert_eq!(recover_auto(&measure(&f, &g).unwrap(), &g, &tol).unwrap().route, Route::Full);
        let g = random_short_window(&mut rng, 12, 3);
        assert_eq!(recover_auto(&measure(&f, &g).unwrap(), &g, &tol).unwrap().route, Route::GenericShort);
        let g = construct_punctured_center_window(12).unwrap();
        assert_eq!(recover_auto(&measure(&f, &g).unwrap(), &g, &tol).unwrap().route, Route::Center);
        let g = construct_punctured_dc_window(11, 5).unwrap();
        let f11 = random_signal(&mut rng, 11);
        assert_eq!(recover_auto(&measure(&f11, &g).unwrap(), &g, &tol).unwrap().route, Route::DcPair);
    }

    #[test]
    fn hole_routes_on_shifted_nongeneric_window() {
        let mut rng = rng_for(72, 0);
        let tol = Tolerances::default();
        let g = force_ambiguity_zero(&random_short_window(&mut rng, 12, 4), 4, 2, 3).unwrap().shifted(3);
        let f = random_signal_on(&mut rng, 12, &[0, 1, 2, 3, 4, 5, 6]);
        let out = recover_auto(&measure(&f, &g).unwrap(), &g, &tol).unwrap();
        assert_eq!(out.route, Route::HoleFull);
        assert!(compare_up_to_phase(&f, out.estimate.as_ref().unwrap()).unwrap().1 < 1e-7);

        let f = random_signal_on(&mut rng, 12, &[0, 1, 2, 3, 4, 5, 6, 11]);
        let out = recover_auto(&measure(&f, &g).unwrap(), &g, &tol).unwrap();
        assert_eq!(out.route, Route::HoleShort);
        assert!(compare_up_to_phase(&f, out.estimate.as_ref().unwrap()).unwrap().1 < 1e-7);

        let f = random_signal(&mut rng, 12);
        let out = recover_auto(&measure(&f, &g).unwrap(), &g, &tol).unwrap();
        assert_eq!(out.status, RecoveryStatus::Undecidable);
    }
}
