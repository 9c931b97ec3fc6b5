use crate::connectivity::{components_by_shifts, components_mod_d};
use crate::error::{Error, Result};
use crate::signal::{CyclicSignal, SpectrogramMeasurement};
use crate::window::{omega_l_d, omega_mask, OmegaMask, Threshold};

use super::{propagate_phases, recover_autocorrelations, support_from_a0, zero_signal_outcome, RecoveryOutcome, Route, Tolerances};

fn check_dims(x: &SpectrogramMeasurement, g: &CyclicSignal) -> Result<()> {
    if x.dim() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), found: x.dim() });
    }
    Ok(())
}

/// Recovery for a window whose mask equals the band `Ω_L^d`.
///
/// The window may sit anywhere on `Z_d`; only the mask matters.
pub fn recover_generic_short(x: &SpectrogramMeasurement, g: &CyclicSignal, l: usize, tol: &Tolerances) -> Result<RecoveryOutcome> {
    check_dims(x, g)?;
    let omega = omega_mask(g, Threshold::default())?;
    if !omega.same_support(&omega_l_d(g.dim(), l)?) {
        return Err(Error::NonGenericWindow(format!("mask of the window is not the L={l} band")));
    }
    recover_on_mask(x, g, &omega, Some(l), tol, Route::GenericShort)
}

/// Recovery for a window with no zero in its ambiguity function.
pub fn recover_full(x: &SpectrogramMeasurement, g: &CyclicSignal, tol: &Tolerances) -> Result<RecoveryOutcome> {
    check_dims(x, g)?;
    let omega = omega_mask(g, Threshold::default())?;
    if !omega.all_true() {
        return Err(Error::PreconditionViolated("ambiguity function has zeros".into()));
    }
    recover_on_mask(x, g, &omega, None, tol, Route::Full)
}

pub(crate) fn recover_on_mask(
    x: &SpectrogramMeasurement,
    g: &CyclicSignal,
    omega: &OmegaMask,
    band: Option<usize>,
    tol: &Tolerances,
    route: Route,
) -> Result<RecoveryOutcome> {
    let d = x.dim();
    let corr = recover_autocorrelations(x, g, omega)?;
    let a0 = corr.row(0).ok_or_else(|| Error::PreconditionViolated("row 0 of the mask is not full".into()))?;
    let support = support_from_a0(a0, tol.tau_supp);
    let partition = match band {
        Some(l) => components_mod_d(&support, d, l)?,
        None => components_by_shifts(&support, d, &corr.known_shifts())?,
    };
    if support.is_empty() {
        return zero_signal_outcome(d, route, partition);
    }
    Ok(propagate_phases(&corr, &partition, tol)?.with_route(route))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recovery::{compare_per_component, compare_up_to_phase, RecoveryStatus};
    use crate::sampling::{random_short_window, random_signal, random_signal_on, rng_for};
    use crate::spectral::measure;
    use crate::window::construct_power_window;

    #[test]
    fn generic_connected() {
        let mut rng = rng_for(10, 0);
        let g = random_short_window(&mut rng, 16, 3);
        let f = random_signal(&mut rng, 16);
        let out = recover_generic_short(&measure(&f, &g).unwrap(), &g, 3, &Tolerances::default()).unwrap();
        assert_eq!(out.status, RecoveryStatus::UniqueUpToGlobalPhase);
        assert!(compare_up_to_phase(&f, out.estimate.as_ref().unwrap()).unwrap().1 < 1e-9);
    }

    #[test]
    fn generic_shifted_window() {
        let mut rng = rng_for(11, 0);
        let g = random_short_window(&mut rng, 12, 2).shifted(5);
        let f = random_signal(&mut rng, 12);
        let out = recover_generic_short(&measure(&f, &g).unwrap(), &g, 2, &Tolerances::default()).unwrap();
        assert!(compare_up_to_phase(&f, out.estimate.as_ref().unwrap()).unwrap().1 < 1e-9);
    }

    #[test]
    fn generic_two_components() {
        let mut rng = rng_for(12, 0);
        let g = construct_power_window(16, 2).unwrap();
        let f = random_signal_on(&mut rng, 16, &[0, 1, 2, 8, 9]);
        let out = recover_generic_short(&measure(&f, &g).unwrap(), &g, 2, &Tolerances::default()).unwrap();
        assert_eq!(out.status, RecoveryStatus::UniquePerComponent);
        assert_eq!(out.free_phases, 2);
        let part = out.partition.as_ref().unwrap();
        assert!(compare_per_component(&f, out.estimate.as_ref().unwrap(), part).unwrap() < 1e-9);
    }

    #[test]
    fn generic_zero_signal() {
        let g = construct_power_window(8, 2).unwrap();
        let f = CyclicSignal::zeros(8).unwrap();
        let out = recover_generic_short(&measure(&f, &g).unwrap(), &g, 2, &Tolerances::default()).unwrap();
        assert!(out.estimate.unwrap().is_zero());
    }

    #[test]
    fn generic_rejects_wrong_band() {
        let g = construct_power_window(8, 2).unwrap();
        let f = CyclicSignal::delta(8, 0).unwrap();
        assert!(matches!(
            recover_generic_short(&measure(&f, &g).unwrap(), &g, 3, &Tolerances::default()),
            Err(Error::NonGenericWindow(_))
        ));
    }

    #[test]
    fn full_window() {
        let mut rng = rng_for(13, 0);
        let g = random_signal(&mut rng, 9);
        let f = random_signal(&mut rng, 9);
        let out = recover_full(&measure(&f, &g).unwrap(), &g, &Tolerances::default()).unwrap();
        assert_eq!(out.status, RecoveryStatus::UniqueUpToGlobalPhase);
        assert!(compare_up_to_phase(&f, out.estimate.as_ref().unwrap()).unwrap().1 < 1e-9);
    }
}
