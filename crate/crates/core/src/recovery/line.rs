use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::connectivity::{components_line, ConnectivityPartition, LineGaps};
use crate::error::{Error, Result};
use crate::signal::{wrap, CyclicSignal, LineSignal, SpectrogramMeasurement, C64};
use crate::spectral::{ambiguity, relation_transform};
use crate::twiddle::root_of_unity;
use crate::window::{difference_set, Domain};

use super::{propagate_phases, support_from_a0, CorrelationData, RecoveryStatus, Tolerances};

#[derive(Debug, Clone, PartialEq)]
pub struct LineOutcome {
    pub status: RecoveryStatus,
    pub estimate: LineSignal,
    pub partition: ConnectivityPartition,
    pub free_phases: usize,
    pub residual: f64,
    pub notes: Vec<String>,
}

fn lstsq(mat: DMatrix<C64>, rhs: DVector<C64>) -> Result<DVector<C64>> {
    mat.svd(true, true).solve(&rhs, 0.0).map_err(|e| Error::PreconditionViolated(format!("least squares failed: {e}")))
}

/// Line-mode recovery from the cyclic measurement of an embedded pair.
///
/// `x` is the measurement of `(f', g')` where `f'` is `f` moved to start at 0
/// with extent at most `f_extent`, and `g'` is `g` moved likewise. Rows
/// `k ∈ D_g` are solved by least squares on `R(k,·) = conj(V_gg(k,·))·DFT(a[k])`,
/// which needs no mask. The estimate is returned at `f_origin + j`.
pub fn recover_line(
    x: &SpectrogramMeasurement,
    g: &LineSignal,
    f_origin: i64,
    f_extent: usize,
    tol: &Tolerances,
) -> Result<LineOutcome> {
    let d = x.dim();
    let g0 = g.min_index().ok_or(Error::ZeroWindow)?;
    let g_ext = g.extent() as usize;
    let need = 2 * ((f_extent + 1) + (g_ext + 1)) + 3;
    if d < need {
        return Err(Error::PreconditionViolated(format!("dimension {d} is below the no-wrap bound {need}")));
    }
    let mut gc = CyclicSignal::zeros(d)?;
    for (&j, &v) in g.entries() {
        gc.set(j - g0, v);
    }
    let rel: Vec<i64> = g.support().iter().map(|j| j - g0).collect();
    let dg = difference_set(&rel, Domain::Line)?;

    let r = relation_transform(x);
    let vgg = ambiguity(&gc);
    let mut corr = CorrelationData::new(d);
    for k in 0..=f_extent {
        if !dg.contains(k as i64) {
            continue;
        }
        let n = f_extent - k + 1;
        let mut mat = DMatrix::<C64>::zeros(d, n);
        for l in 0..d {
            let v = vgg.get(k, l).conj();
            for i in 0..n {
                let j = k + i;
                mat[(l, i)] = v * root_of_unity(-(((j * l) % d) as i64), d);
            }
        }
        let sol = lstsq(mat, DVector::from_column_slice(r.row(k)))?;
        let mut row = vec![C64::new(0.0, 0.0); d];
        for i in 0..n {
            row[k + i] = sol[i];
        }
        if k == 0 {
            row.iter_mut().for_each(|z| *z = C64::new(z.re, 0.0));
        } else {
            let mirror = (0..d as i64).map(|j| row[wrap(j + k as i64, d)].conj()).collect();
            corr.insert(d - k, mirror)?;
        }
        corr.insert(k, row)?;
    }
    let a0 = corr.row(0).ok_or_else(|| Error::PreconditionViolated("row 0 missing".into()))?;
    let support: Vec<i64> = support_from_a0(a0, tol.tau_supp).into_iter().map(|j| j as i64).collect();
    let partition = components_line(&support, LineGaps::Set(&dg));
    let (status, estimate, residual, notes) = if support.is_empty() {
        (RecoveryStatus::UniqueUpToGlobalPhase, LineSignal::default(), 0.0, vec!["measurement is identically zero".into()])
    } else {
        let out = propagate_phases(&corr, &partition, tol)?;
        let est = out.estimate.expect("propagation yields an estimate");
        let line = LineSignal::new(support.iter().map(|&j| (j + f_origin, est.at(j))).collect());
        (out.status, line, out.residual, out.notes)
    };
    let partition = ConnectivityPartition {
        relation: partition.relation,
        components: partition.components.iter().map(|c| c.iter().map(|j| j + f_origin).collect()).collect(),
        universe: partition.universe.iter().map(|j| j + f_origin).collect(),
    };
    Ok(LineOutcome { status, estimate, free_phases: partition.count(), partition, residual, notes })
}

/// Samples `(z, V_ff(k, z))` per nonnegative shift `k`, with
/// `V_ff(k, z) = Σ_j f_j conj(f_{j−k}) z^{−j}`.
pub type LineSamples = BTreeMap<usize, Vec<(C64, C64)>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinePath {
    /// Zero or one support point.
    Trivial,
    /// Support spread of at least `2k* + 1`.
    Wide,
    /// Inward two-point elimination.
    Induction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineLimitedOutcome {
    pub status: RecoveryStatus,
    pub estimate: LineSignal,
    pub path: LinePath,
    pub residual: f64,
}

fn distinct_points(samples: &[(C64, C64)]) -> usize {
    let mut pts: Vec<C64> = Vec::new();
    for &(z, _) in samples {
        if pts.iter().all(|p| (p - z).norm() > 1e-12) {
            pts.push(z);
        }
    }
    pts.len()
}

fn row_lstsq(samples: &[(C64, C64)], js: std::ops::RangeInclusive<i64>) -> Result<Vec<C64>> {
    let idx: Vec<i64> = js.collect();
    if distinct_points(samples) < idx.len() {
        return Err(Error::InsufficientSamples(format!("{} points for {} unknowns", distinct_points(samples), idx.len())));
    }
    let mut mat = DMatrix::<C64>::zeros(samples.len(), idx.len());
    for (s, &(z, _)) in samples.iter().enumerate() {
        for (i, &j) in idx.iter().enumerate() {
            mat[(s, i)] = z.powi(-(j as i32));
        }
    }
    let rhs = DVector::from_iterator(samples.len(), samples.iter().map(|&(_, v)| v));
    Ok(lstsq(mat, rhs)?.iter().copied().collect())
}

fn row<'a>(samples: &'a LineSamples, k: usize) -> Result<&'a [(C64, C64)]> {
    samples
        .get(&k)
        .map(|v| v.as_slice())
        .filter(|v| !v.is_empty())
        .ok_or_else(|| Error::InsufficientSamples(format!("no samples for shift {k}")))
}

/// Recovery of a line signal supported in `0..=n_bound` from full rows
/// `k = 0` and `k > k*` and a few samples of the rows `0 < k ≤ k*`.
pub fn recover_line_limited(samples: &LineSamples, k_star: usize, n_bound: usize, tol: &Tolerances) -> Result<LineLimitedOutcome> {
    let nb = n_bound as i64;
    let a0: Vec<f64> = row_lstsq(row(samples, 0)?, 0..=nb)?.iter().map(|z| z.re).collect();
    let peak = a0.iter().copied().fold(0.0, f64::max);
    let supp: Vec<i64> = (0..=nb).filter(|&j| peak > 0.0 && a0[j as usize] > tol.tau_supp * peak).collect();
    let (Some(&j0), Some(&jn)) = (supp.first(), supp.last()) else {
        return Ok(LineLimitedOutcome {
            status: RecoveryStatus::UniqueUpToGlobalPhase,
            estimate: LineSignal::default(),
            path: LinePath::Trivial,
            residual: 0.0,
        });
    };
    let n = (jn - j0) as usize;
    let mut f: BTreeMap<i64, C64> = BTreeMap::new();
    let f0 = a0[j0 as usize].sqrt();
    f.insert(j0, C64::new(f0, 0.0));

    // a^{(k)} on j ∈ [j0 + k, jn] for a fully sampled row k > k*
    let full_row = |k: usize| -> Result<BTreeMap<i64, C64>> {
        let lo = j0 + k as i64;
        let vals = row_lstsq(row(samples, k)?, lo..=jn)?;
        Ok((lo..=jn).zip(vals).collect())
    };

    let path = if n == 0 {
        LinePath::Trivial
    } else if n > 2 * k_star {
        let top = full_row(n)?[&jn] / f0;
        f.insert(jn, top);
        for j in j0 + k_star as i64 + 1..jn {
            let k = (j - j0) as usize;
            f.insert(j, full_row(k)?[&j] / f0);
        }
        for j in j0 + 1..=j0 + k_star as i64 {
            let k = (jn - j) as usize;
            f.insert(j, (full_row(k)?[&jn] / top).conj());
        }
        LinePath::Wide
    } else {
        let top = if n > k_star {
            full_row(n)?[&jn] / f0
        } else {
            let s = row(samples, n)?;
            let a: C64 = s.iter().map(|&(z, v)| v * z.powi(jn as i32)).sum::<C64>() / s.len() as f64;
            a / f0
        };
        f.insert(jn, top);
        let mut l = 0usize;
        while 2 * l + 2 <= n {
            let r = n - l - 1;
            let s = row(samples, r)?;
            // W(z) = V(r,z) − Σ_{j=jn−l}^{jn−1} f_j conj(f_{j−r}) z^{−j} = A z^{−jn} + B z^{−(j0+r)}
            let (ea, eb) = (jn, j0 + r as i64);
            let mut m = [[C64::new(0.0, 0.0); 2]; 2];
            let mut rhs = [C64::new(0.0, 0.0); 2];
            for &(z, v) in s {
                let mid: C64 = (jn - l as i64..jn).map(|j| f[&j] * f[&(j - r as i64)].conj() * z.powi(-(j as i32))).sum();
                let w = v - mid;
                let cols = [z.powi(-(ea as i32)), z.powi(-(eb as i32))];
                for p in 0..2 {
                    for q in 0..2 {
                        m[p][q] += cols[p].conj() * cols[q];
                    }
                    rhs[p] += cols[p].conj() * w;
                }
            }
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            if det.norm() <= 1e-9 * (m[0][0].norm() * m[1][1].norm()).max(f64::MIN_POSITIVE) {
                return Err(Error::InsufficientSamples(format!("shift {r}: sample points do not separate the two unknowns")));
            }
            let a = (rhs[0] * m[1][1] - m[0][1] * rhs[1]) / det;
            let b = (m[0][0] * rhs[1] - m[1][0] * rhs[0]) / det;
            let low = j0 + l as i64 + 1;
            f.insert(j0 + r as i64, b / f0);
            if low != j0 + r as i64 {
                f.insert(low, (a / top).conj());
            }
            l += 1;
        }
        LinePath::Induction
    };
    for j in j0..=jn {
        if a0[j as usize] <= tol.tau_supp * peak {
            f.insert(j, C64::new(0.0, 0.0));
        }
    }
    let estimate = LineSignal::new(f);
    let mut residual: f64 = 0.0;
    for (&k, pts) in samples {
        for &(z, v) in pts {
            residual = residual.max((estimate.stft_at(&estimate, k as i64, z) - v).norm());
        }
    }
    let status = if residual <= tol.residual_tol * a0.iter().sum::<f64>() {
        RecoveryStatus::UniqueUpToGlobalPhase
    } else {
        RecoveryStatus::Inconsistent
    };
    Ok(LineLimitedOutcome { status, estimate, path, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_line_signal, rng_for};
    use crate::spectral::{embed_line, measure};

    fn line_err(f: &LineSignal, e: &LineSignal) -> f64 {
        let lo = f.min_index().unwrap().min(e.min_index().unwrap_or(0));
        let hi = f.max_index().unwrap().max(e.max_index().unwrap_or(0));
        let a = CyclicSignal::new(f.dense(lo, hi + 1)).unwrap();
        let b = CyclicSignal::new(e.dense(lo, hi + 1)).unwrap();
        crate::recovery::compare_up_to_phase(&a, &b).unwrap().1
    }

    fn samples_for(f: &LineSignal, k_star: usize, full: usize) -> LineSamples {
        let ext = f.max_index().unwrap() as usize;
        let mut out = LineSamples::new();
        for k in 0..=ext {
            let m = if k == 0 || k > k_star { full } else { k_star + 1 };
            let pts = (0..m)
                .map(|i| {
                    let z = root_of_unity(i as i64, m);
                    (z, f.stft_at(f, k as i64, z))
                })
                .collect();
            out.insert(k, pts);
        }
        out
    }

    #[test]
    fn line_block_window() {
        let mut rng = rng_for(60, 0);
        let f = random_line_signal(&mut rng, 8, 0.0);
        let g = LineSignal::from_slice(0, &[C64::new(1.0, 0.0), C64::new(0.5, 0.2), C64::new(-0.3, 0.1)]);
        let emb = embed_line(&f, &g).unwrap();
        let x = measure(&emb.f, &emb.g).unwrap();
        let out = recover_line(&x, &g, f.min_index().unwrap(), f.extent() as usize, &Tolerances::default()).unwrap();
        assert_eq!(out.status, RecoveryStatus::UniqueUpToGlobalPhase);
        assert!(line_err(&f, &out.estimate) < 1e-9);
    }

    #[test]
    fn line_disconnected() {
        let f = LineSignal::from_slice(3, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 2.0)]);
        let g = LineSignal::from_slice(0, &[C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
        let emb = embed_line(&f, &g).unwrap();
        let x = measure(&emb.f, &emb.g).unwrap();
        let out = recover_line(&x, &g, 3, 4, &Tolerances::default()).unwrap();
        assert_eq!(out.status, RecoveryStatus::UniquePerComponent);
        assert_eq!(out.partition.components, vec![vec![3], vec![7]]);
    }

    #[test]
    fn limited_induction() {
        let mut rng = rng_for(61, 0);
        let f = LineSignal::from_slice(0, &(0..4).map(|_| crate::sampling::complex_gaussian_floor(&mut rng, 0.2)).collect::<Vec<_>>());
        let out = recover_line_limited(&samples_for(&f, 2, 9), 2, 3, &Tolerances::default()).unwrap();
        assert_eq!(out.path, LinePath::Induction);
        assert_eq!(out.status, RecoveryStatus::UniqueUpToGlobalPhase);
        assert!(line_err(&f, &out.estimate) < 1e-9);
    }

    #[test]
    fn limited_wide() {
        let f = LineSignal::from_slice(0, &[C64::new(1.0, 0.5), C64::new(0.0, 0.0), C64::new(0.3, -0.2), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-0.7, 0.1)]);
        let out = recover_line_limited(&samples_for(&f, 2, 15), 2, 6, &Tolerances::default()).unwrap();
        assert_eq!(out.path, LinePath::Wide);
        assert!(line_err(&f, &out.estimate) < 1e-9);
    }

    #[test]
    fn limited_delta() {
        let f = LineSignal::from_slice(0, &[C64::new(2.0, 0.0)]);
        let mut s = LineSamples::new();
        s.insert(0, vec![(C64::new(1.0, 0.0), C64::new(4.0, 0.0))]);
        let out = recover_line_limited(&s, 2, 0, &Tolerances::default()).unwrap();
        assert_eq!(out.path, LinePath::Trivial);
        assert!(line_err(&f, &out.estimate) < 1e-12);
    }

    #[test]
    fn limited_needs_two_points() {
        let f = LineSignal::from_slice(0, &[C64::new(1.0, 0.0), C64::new(1.0, 1.0), C64::new(0.5, 0.0)]);
        let mut s = samples_for(&f, 2, 7);
        s.get_mut(&1).unwrap().truncate(1);
        assert!(matches!(recover_line_limited(&s, 2, 2, &Tolerances::default()), Err(Error::InsufficientSamples(_))));
    }
}
