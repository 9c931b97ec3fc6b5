//! Signal recovery from spectrogram measurements.
//!
//! Every route first turns the measurement into autocorrelation rows
//! `a[k][j] = f_j · conj(f_{j−k})` and then fixes phases along the
//! connectivity graph of the recovered support.

mod auto;
mod center;
mod corr;
mod dcpair;
mod decide;
mod generic;
mod hole;
mod line;
mod propagate;

use serde::Serialize;

use crate::connectivity::ConnectivityPartition;
use crate::error::{Error, Result};
use crate::signal::{CyclicSignal, C64};

pub use auto::{canonicalize_measurement, recover_auto};
pub use center::{recover_center_from_measurement, recover_missing_center};
pub use corr::{
    measurement_coeffs, recover_autocorrelations, window_coeffs, CorrelationData, MeasurementCoefficients,
    WindowCoefficients,
};
pub use dcpair::{recover_dc_from_measurement, recover_missing_dc_pair};
pub use decide::{decide_retrievability, translation_probe, Decision, Verdict, Witness};
pub use generic::{recover_full, recover_generic_short};
pub use hole::{hole_classifier, recover_with_hole, HoleKind};
pub use line::{recover_line, recover_line_limited, LineLimitedOutcome, LineOutcome, LinePath, LineSamples};
pub use propagate::propagate_phases;

/// Numerical tolerances shared by the recovery routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// `j` is in the support iff `a[0][j] > tau_supp · max a[0]`.
    pub tau_supp: f64,
    /// Largest accepted phase mismatch (radians) on a consistency check.
    pub phase_tol: f64,
    /// Largest accepted data residual relative to `max a[0]`.
    pub residual_tol: f64,
    /// Relative level under which a coefficient is treated as zero.
    pub zero_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { tau_supp: 1e-10, phase_tol: 1e-6, residual_tol: 1e-6, zero_tol: 1e-9 }
    }
}

/// Which reconstruction path produced an outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    Full,
    GenericShort,
    HoleFull,
    HoleShort,
    Center,
    DcPair,
    Line,
    None,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::Full => "full",
            Route::GenericShort => "generic-short",
            Route::HoleFull => "hole-full",
            Route::HoleShort => "hole-short",
            Route::Center => "center",
            Route::DcPair => "dc-pair",
            Route::Line => "line",
            Route::None => "none",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecoveryStatus {
    UniqueUpToGlobalPhase,
    /// One free phase per connectivity component.
    UniquePerComponent,
    /// The data contradict the reconstruction beyond tolerance.
    Inconsistent,
    /// No implemented route applies.
    Undecidable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryOutcome {
    pub status: RecoveryStatus,
    pub route: Route,
    /// Present unless the status is `Undecidable`.
    pub estimate: Option<CyclicSignal>,
    pub partition: Option<ConnectivityPartition>,
    /// Number of free unimodular constants in the answer.
    pub free_phases: usize,
    /// Largest absolute misfit against the autocorrelation data used.
    pub residual: f64,
    pub notes: Vec<String>,
}

impl RecoveryOutcome {
    pub(crate) fn undecidable(reason: impl Into<String>) -> Self {
        Self {
            status: RecoveryStatus::Undecidable,
            route: Route::None,
            estimate: None,
            partition: None,
            free_phases: 0,
            residual: f64::NAN,
            notes: vec![reason.into()],
        }
    }

    pub(crate) fn with_route(mut self, route: Route) -> Self {
        self.route = route;
        self
    }

    pub fn is_success(&self) -> bool {
        matches!(self.status, RecoveryStatus::UniqueUpToGlobalPhase | RecoveryStatus::UniquePerComponent)
    }
}

/// `γ` = phase of `⟨estimate, truth⟩` (1 if it vanishes) and the relative
/// error `‖estimate − γ·truth‖ / ‖truth‖`.
pub fn compare_up_to_phase(truth: &CyclicSignal, estimate: &CyclicSignal) -> Result<(C64, f64)> {
    truth.check_same_dim(estimate)?;
    let n = truth.norm();
    if n == 0.0 {
        return Err(Error::ZeroSignal);
    }
    let ip = estimate.inner(truth)?;
    let gamma = if ip.norm() > 0.0 { ip / ip.norm() } else { C64::new(1.0, 0.0) };
    let err = estimate
        .entries()
        .iter()
        .zip(truth.entries())
        .map(|(e, t)| (e - gamma * t).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok((gamma, err / n))
}

/// Like [`compare_up_to_phase`] but aligning each component separately.
pub fn compare_per_component(truth: &CyclicSignal, estimate: &CyclicSignal, partition: &ConnectivityPartition) -> Result<f64> {
    truth.check_same_dim(estimate)?;
    let d = truth.dim();
    let mut err = 0.0;
    let mut covered = vec![false; d];
    for comp in &partition.components {
        let mut ip = C64::new(0.0, 0.0);
        for &j in comp {
            ip += truth.at(j) * estimate.at(j).conj();
        }
        let gamma = if ip.norm() > 0.0 { ip / ip.norm() } else { C64::new(1.0, 0.0) };
        for &j in comp {
            err += (truth.at(j) - gamma * estimate.at(j)).norm_sqr();
            covered[crate::signal::wrap(j, d)] = true;
        }
    }
    for j in 0..d {
        if !covered[j] {
            err += (truth.at(j as i64) - estimate.at(j as i64)).norm_sqr();
        }
    }
    let n = truth.norm();
    Ok(if n > 0.0 { err.sqrt() / n } else { err.sqrt() })
}

pub(crate) fn zero_signal_outcome(d: usize, route: Route, partition: ConnectivityPartition) -> Result<RecoveryOutcome> {
    Ok(RecoveryOutcome {
        status: RecoveryStatus::UniqueUpToGlobalPhase,
        route,
        estimate: Some(CyclicSignal::zeros(d)?),
        partition: Some(partition),
        free_phases: 0,
        residual: 0.0,
        notes: vec!["measurement is identically zero".into()],
    })
}

/// Support of `a[0]` at relative level `tau`.
pub(crate) fn support_from_a0(a0: &[C64], tau: f64) -> Vec<usize> {
    let peak = a0.iter().map(|z| z.re).fold(0.0, f64::max);
    if peak <= 0.0 {
        return Vec::new();
    }
    (0..a0.len()).filter(|&j| a0[j].re > tau * peak).collect()
}
