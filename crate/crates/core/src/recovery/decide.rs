use std::collections::BTreeSet;

use serde::Serialize;

use crate::connectivity::{components_by_shifts, components_mod_d, ConnectivityPartition};
use crate::error::{Error, Result};
use crate::signal::{SpectrogramMeasurement, C64};
use crate::spectral::{ambiguity, relation_transform};
use crate::window::{OmegaMask, WindowReport};

use super::hole::solve_row;
use super::{
    canonicalize_measurement, hole_classifier, measurement_coeffs, recover_autocorrelations, support_from_a0, window_coeffs,
    Route, Tolerances,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// The support splits into this many components; rotating one of them
    /// leaves the measurement unchanged.
    Components { count: usize },
    /// `T_shift f` has the same measurement but a different modulus pattern.
    Translation { shift: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    Retrievable,
    NotRetrievable { witness: Witness },
    Undecidable { reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub verdict: Verdict,
    pub route: Route,
    pub partition: Option<ConnectivityPartition>,
    pub notes: Vec<String>,
}

fn by_components(partition: ConnectivityPartition, route: Route) -> Decision {
    let verdict = if partition.is_connected() {
        Verdict::Retrievable
    } else {
        Verdict::NotRetrievable { witness: Witness::Components { count: partition.count() } }
    };
    Decision { verdict, route, partition: Some(partition), notes: Vec::new() }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Smallest `m` such that the measurement cannot tell `f` from `T_m f` while
/// `|f|` is provably not `m`-periodic.
///
/// On the mask, `V_ff(k,l)·(e^{−2πiml/d} − 1)` must vanish; a fully known row
/// `k ≢ 0` with `k ≡ 0 (mod gcd(m,d))` that is identically zero then rules out
/// `gcd(m,d)`-periodic support.
pub fn translation_probe(
    x: &SpectrogramMeasurement,
    g: &crate::signal::CyclicSignal,
    omega: &OmegaMask,
    tol: &Tolerances,
) -> Option<usize> {
    let d = x.dim();
    let r = relation_transform(x);
    let vgg = ambiguity(g);
    let y: Vec<Vec<Option<C64>>> = (0..d)
        .map(|k| {
            (0..d)
                .map(|l| (omega.get(k, l) && vgg.get(k, l).norm() > 0.0).then(|| r.get(k, l) / vgg.get(k, l).conj()))
                .collect()
        })
        .collect();
    let scale = y.iter().flatten().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return None;
    }
    let small = |z: C64| z.norm() <= tol.zero_tol * scale;
    let norm_ok = y[0][0].is_some_and(|z| !small(z));
    if !norm_ok {
        return None;
    }
    (1..d).find(|&m| {
        let invariant = (0..d).all(|k| {
            (0..d).all(|l| match y[k][l] {
                Some(v) => small(v * (crate::root_of_unity(-(((m * l) % d) as i64), d) - C64::new(1.0, 0.0))),
                None => true,
            })
        });
        let p = gcd(m, d);
        invariant
            && (1..d).any(|k| k % p == 0 && omega.row_full(k) && (0..d).all(|l| y[k][l].is_some_and(small)))
    })
}

/// Decides from the measurement alone whether the signal is determined up to
/// a global phase, for the window classes with a known characterization.
pub fn decide_retrievability(x: &SpectrogramMeasurement, report: &WindowReport, tol: &Tolerances) -> Result<Decision> {
    let d = x.dim();
    if report.dim() != d {
        return Err(Error::DimensionMismatch { expected: report.dim(), found: d });
    }
    let g = &report.window;
    if report.is_full || report.is_generic_short {
        let corr = recover_autocorrelations(x, g, &report.omega)?;
        let support = support_from_a0(corr.row(0).expect("row 0 is full"), tol.tau_supp);
        return Ok(match (report.is_full, report.short_l) {
            (true, _) => by_components(components_by_shifts(&support, d, &corr.known_shifts())?, Route::Full),
            (false, Some(l)) => by_components(components_mod_d(&support, d, l)?, Route::GenericShort),
            (false, None) => unreachable!("generic windows are short"),
        });
    }
    if report.is_short_block() {
        let l = report.short_l.expect("short block");
        let xc = canonicalize_measurement(x, report.canonical_shift);
        let b = measurement_coeffs(&xc, l)?;
        let c = window_coeffs(&report.canonical_window(), l)?;
        let scale0 = b.row(0).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if scale0 == 0.0 {
            return Ok(by_components(components_mod_d(&[], d, l)?, Route::HoleFull));
        }
        let hole = (0..d).find(|&j| b.get(0, j as i64).norm() <= tol.zero_tol * scale0);
        let anchor = match hole {
            Some(j) => Some((j, l + 1, Route::HoleFull)),
            None => hole_classifier(&b, tol).first().map(|&j| ((j + 1) % d, l, Route::HoleShort)),
        };
        if let Some((start, zeros, route)) = anchor {
            let a0 = solve_row(&c, b.row(0), 0, start, zeros);
            let support = support_from_a0(&a0, tol.tau_supp);
            return Ok(by_components(components_mod_d(&support, d, l)?, route));
        }
    }
    let holes = report.omega.false_entries();
    if d % 2 == 0 && holes == vec![(d / 2, d / 2)] {
        let corr = recover_autocorrelations(x, g, &report.omega)?;
        let support = support_from_a0(corr.row(0).expect("row 0 is full"), tol.tau_supp);
        let all: BTreeSet<usize> = (0..d).collect();
        return Ok(by_components(components_by_shifts(&support, d, &all)?, Route::Center));
    }
    if let [(0, a), (0, b)] = holes.as_slice() {
        if a + b == d && (gcd(*a, d) == 1 || (d == 6 && *a == 2)) {
            return Ok(Decision { verdict: Verdict::Retrievable, route: Route::DcPair, partition: None, notes: Vec::new() });
        }
    }
    if report.is_short_block() {
        let xc = canonicalize_measurement(x, report.canonical_shift);
        if let Some(m) = translation_probe(&xc, &report.canonical_window(), &report.omega, tol) {
            return Ok(Decision {
                verdict: Verdict::NotRetrievable { witness: Witness::Translation { shift: m } },
                route: Route::None,
                partition: None,
                notes: vec![format!("measurement is invariant under translation by {m}")],
            });
        }
        return Ok(Decision {
            verdict: Verdict::Undecidable { reason: "short non-generic window and no certified hole in the signal".into() },
            route: Route::None,
            partition: None,
            notes: Vec::new(),
        });
    }
    Ok(Decision {
        verdict: Verdict::Undecidable { reason: format!("no theorem covers a mask with {} zeros", holes.len()) },
        route: Route::None,
        partition: None,
        notes: Vec::new(),
    })
}
