//! DFT, STFT, ambiguity function and the spectrogram relation on Z_d.
//!
//! Conventions: `dft(v)[l] = Σ_j v_j e^{-2πijl/d}` (unnormalized), the inverse
//! carries the factor `1/d`, and
//! `V_g f(k,l) = Σ_j f_j · conj(g_{j−k}) · e^{-2πijl/d}`.

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::signal::{wrap, ComplexTable, CyclicSignal, LineSignal, SpectrogramMeasurement, C64};

/// Forward and inverse transforms of one length, planned once.
#[derive(Clone)]
pub struct DftPlan {
    d: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl DftPlan {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter(format!("transform length must be at least 2, got {d}")));
        }
        let mut planner = FftPlanner::new();
        Ok(Self { d, forward: planner.plan_fft_forward(d), inverse: planner.plan_fft_inverse(d) })
    }

    pub fn len(&self) -> usize {
        self.d
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn check(&self, n: usize) -> Result<()> {
        if n != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, found: n });
        }
        Ok(())
    }

    pub fn forward_in_place(&self, buf: &mut [C64]) -> Result<()> {
        self.check(buf.len())?;
        self.forward.process(buf);
        Ok(())
    }

    pub fn inverse_in_place(&self, buf: &mut [C64]) -> Result<()> {
        self.check(buf.len())?;
        self.inverse.process(buf);
        let s = 1.0 / self.d as f64;
        buf.iter_mut().for_each(|z| *z *= s);
        Ok(())
    }
}

pub fn dft(v: &[C64]) -> Result<Vec<C64>> {
    let plan = DftPlan::new(v.len())?;
    let mut out = v.to_vec();
    plan.forward_in_place(&mut out)?;
    Ok(out)
}

pub fn inverse_dft(v: &[C64]) -> Result<Vec<C64>> {
    let plan = DftPlan::new(v.len())?;
    let mut out = v.to_vec();
    plan.inverse_in_place(&mut out)?;
    Ok(out)
}

/// Cyclic STFT, computed row by row as `dft(f · conj(T_k g))`.
pub fn stft(f: &CyclicSignal, g: &CyclicSignal) -> Result<ComplexTable> {
    f.check_same_dim(g)?;
    let d = f.dim();
    let plan = DftPlan::new(d)?;
    let mut table = ComplexTable::zeros(d);
    let fe = f.entries();
    let ge = g.entries();
    for k in 0..d {
        let row = table.row_mut(k);
        for j in 0..d {
            row[j] = fe[j] * ge[(j + d - k) % d].conj();
        }
        plan.forward_in_place(row)?;
    }
    Ok(table)
}

pub fn measure(f: &CyclicSignal, g: &CyclicSignal) -> Result<SpectrogramMeasurement> {
    let table = stft(f, g)?;
    SpectrogramMeasurement::new(f.dim(), table.values().iter().map(|z| z.norm_sqr()).collect())
}

/// The ambiguity function `V_g g`.
pub fn ambiguity(g: &CyclicSignal) -> ComplexTable {
    stft(g, g).expect("a signal always matches its own dimension")
}

/// `R(k,l) = (1/d) Σ_{k',l'} X(k',l') e^{-2πik'l/d} e^{2πil'k/d}`.
///
/// For `X = measure(f, g)` this equals `V_ff(k,l) · conj(V_gg(k,l))`.
pub fn relation_transform(x: &SpectrogramMeasurement) -> ComplexTable {
    let d = x.dim();
    let plan = DftPlan::new(d).expect("measurements have d >= 2");
    // y(k', k) = (1/d) Σ_{l'} X(k',l') e^{2πil'k/d}
    let mut y = ComplexTable::zeros(d);
    for kp in 0..d {
        let row = y.row_mut(kp);
        for (dst, &v) in row.iter_mut().zip(x.row(kp)) {
            *dst = C64::new(v, 0.0);
        }
        // carries the outer 1/d
        plan.inverse_in_place(row).expect("row length is d");
    }
    let mut out = ComplexTable::zeros(d);
    let mut col = vec![C64::new(0.0, 0.0); d];
    for k in 0..d {
        for kp in 0..d {
            col[kp] = y.get(kp, k);
        }
        plan.forward_in_place(&mut col).expect("column length is d");
        out.row_mut(k).copy_from_slice(&col);
    }
    out
}

/// Result of placing two finitely supported line signals into a common Z_d.
#[derive(Debug, Clone, PartialEq)]
pub struct LineEmbedding {
    pub f: CyclicSignal,
    pub g: CyclicSignal,
    pub d: usize,
}

impl LineEmbedding {
    /// Cyclic shift index for a line shift `k` (negative shifts wrap to `d + k`).
    pub fn row_of(&self, k: i64) -> usize {
        wrap(k, self.d)
    }
}

/// Shift both supports to start at 0 and zero-pad into Z_d with
/// `d = 2·(span(f) + span(g)) + 3`, where `span = extent + 1`.
///
/// Each embedded signal records its original minimum index as `origin_offset`.
pub fn embed_line(f: &LineSignal, g: &LineSignal) -> Result<LineEmbedding> {
    let (f0, g0) = match (f.min_index(), g.min_index()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::EmptySupport),
    };
    let span = (f.extent() + 1) + (g.extent() + 1);
    let d = usize::try_from(2 * span + 3).map_err(|_| Error::Overflow("embedding dimension".into()))?;
    let place = |s: &LineSignal, origin: i64| -> Result<CyclicSignal> {
        let mut out = CyclicSignal::zeros(d)?;
        for (&j, &v) in s.entries() {
            out.set(j - origin, v);
        }
        Ok(out.with_origin(origin))
    };
    Ok(LineEmbedding { f: place(f, f0)?, g: place(g, g0)?, d })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_signal, rng_for};

    fn naive_dft(v: &[C64]) -> Vec<C64> {
        let d = v.len();
        (0..d)
            .map(|l| {
                (0..d)
                    .map(|j| {
                        let x = -std::f64::consts::TAU * (j * l) as f64 / d as f64;
                        v[j] * C64::new(x.cos(), x.sin())
                    })
                    .sum()
            })
            .collect()
    }

    fn naive_stft(f: &CyclicSignal, g: &CyclicSignal) -> ComplexTable {
        let d = f.dim();
        ComplexTable::from_fn(d, |k, l| {
            (0..d)
                .map(|j| {
                    let x = -std::f64::consts::TAU * (j * l) as f64 / d as f64;
                    f.entries()[j] * g.at(j as i64 - k as i64).conj() * C64::new(x.cos(), x.sin())
                })
                .sum()
        })
    }

    fn one() -> C64 {
        C64::new(1.0, 0.0)
    }

    #[test]
    fn dft_of_delta_is_flat() {
        let v = CyclicSignal::delta(4, 0).unwrap();
        let out = dft(v.entries()).unwrap();
        assert!(out.iter().all(|z| (z - one()).norm() < 1e-15));
    }

    #[test]
    fn dft_of_constant_is_spike() {
        let out = dft(&[one(); 4]).unwrap();
        assert!((out[0] - C64::new(4.0, 0.0)).norm() < 1e-15);
        assert!(out[1..].iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn dft_matches_oracle_and_round_trips() {
        let mut rng = rng_for(7, 0);
        let v = random_signal(&mut rng, 7).into_entries();
        let fast = dft(&v).unwrap();
        let slow = naive_dft(&v);
        let scale = slow.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).norm() < 1e-12 * scale);
        }
        let back = inverse_dft(&fast).unwrap();
        for (a, b) in back.iter().zip(&v) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn dft_rejects_length_one() {
        assert!(dft(&[one()]).is_err());
    }

    #[test]
    fn stft_of_deltas() {
        let d = 5;
        let t = stft(&CyclicSignal::delta(d, 0).unwrap(), &CyclicSignal::delta(d, 0).unwrap()).unwrap();
        for k in 0..d {
            for l in 0..d {
                let want = if k == 0 { one() } else { C64::new(0.0, 0.0) };
                assert!((t.get(k, l) - want).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn stft_matches_oracle() {
        let mut rng = rng_for(11, 0);
        let f = random_signal(&mut rng, 6);
        let g = random_signal(&mut rng, 6);
        let fast = stft(&f, &g).unwrap();
        let slow = naive_stft(&f, &g);
        assert!(fast.max_abs_diff(&slow) < 1e-12 * slow.max_abs());
    }

    #[test]
    fn stft_dimension_mismatch() {
        let f = CyclicSignal::zeros(4).unwrap();
        let g = CyclicSignal::zeros(5).unwrap();
        assert!(matches!(stft(&f, &g), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn window_translation_shifts_rows() {
        let mut rng = rng_for(3, 0);
        let d = 9;
        let f = random_signal(&mut rng, d);
        let g = random_signal(&mut rng, d);
        for y in 0..d as i64 {
            let a = stft(&f, &g.shifted(y)).unwrap();
            let b = stft(&f, &g).unwrap();
            for k in 0..d as i64 {
                for l in 0..d as i64 {
                    assert!((a.at(k, l).norm() - b.at(k + y, l).norm()).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn measure_of_zero_and_deltas() {
        let g = CyclicSignal::from_real(&[1.0, 2.0, 3.0]).unwrap();
        let x = measure(&CyclicSignal::zeros(3).unwrap(), &g).unwrap();
        assert!(x.values().iter().all(|&v| v == 0.0));
        let d0 = CyclicSignal::delta(3, 0).unwrap();
        let x = measure(&d0, &d0).unwrap();
        for l in 0..3 {
            assert!((x.get(0, l) - 1.0).abs() < 1e-15);
            assert!(x.get(1, l) < 1e-30 && x.get(2, l) < 1e-30);
        }
    }

    #[test]
    fn measure_parseval() {
        let mut rng = rng_for(5, 0);
        let f = random_signal(&mut rng, 8);
        let g = random_signal(&mut rng, 8);
        let x = measure(&f, &g).unwrap();
        let want = 8.0 * f.norm_sq() * g.norm_sq();
        assert!((x.total() - want).abs() < 1e-9 * want);
    }

    #[test]
    fn ambiguity_basics() {
        let t = ambiguity(&CyclicSignal::delta(4, 0).unwrap());
        for l in 0..4 {
            assert!((t.get(0, l) - one()).norm() < 1e-15);
            for k in 1..4 {
                assert!(t.get(k, l).norm() < 1e-15);
            }
        }
        let mut rng = rng_for(13, 0);
        let g = random_signal(&mut rng, 5);
        let a = ambiguity(&g);
        assert!((a.get(0, 0).re - g.norm_sq()).abs() < 1e-12);
        for k in 0..5i64 {
            for l in 0..5i64 {
                let lhs = a.at(-k, -l);
                let rhs = crate::twiddle::root_of_unity(k * l, 5).conj() * a.at(k, l).conj();
                assert!((lhs - rhs).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn relation_transform_contract() {
        let mut rng = rng_for(17, 0);
        let f = random_signal(&mut rng, 6);
        let g = random_signal(&mut rng, 6);
        let r = relation_transform(&measure(&f, &g).unwrap());
        let vff = ambiguity(&f);
        let vgg = ambiguity(&g);
        for k in 0..6 {
            for l in 0..6 {
                assert!((r.get(k, l) - vff.get(k, l) * vgg.get(k, l).conj()).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn relation_transform_of_zero_signal() {
        let g = CyclicSignal::from_real(&[1.0, 2.0, 0.0, 1.0]).unwrap();
        let r = relation_transform(&measure(&CyclicSignal::zeros(4).unwrap(), &g).unwrap());
        assert_eq!(r.max_abs(), 0.0);
    }

    #[test]
    fn relation_transform_with_delta_window() {
        let mut rng = rng_for(19, 0);
        let f = random_signal(&mut rng, 5);
        let g = CyclicSignal::delta(5, 0).unwrap();
        let r = relation_transform(&measure(&f, &g).unwrap());
        let vff = ambiguity(&f);
        for l in 0..5 {
            assert!((r.get(0, l) - vff.get(0, l)).norm() < 1e-12);
            for k in 1..5 {
                assert!(r.get(k, l).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn embed_single_points() {
        let one_pt = LineSignal::from_slice(0, &[one()]);
        let e = embed_line(&one_pt, &one_pt).unwrap();
        assert!(e.d >= 3);
        assert_eq!(e.f, CyclicSignal::delta(e.d, 0).unwrap().with_origin(0));
    }

    #[test]
    fn embed_rejects_empty() {
        let one_pt = LineSignal::from_slice(0, &[one()]);
        assert_eq!(embed_line(&LineSignal::default(), &one_pt), Err(Error::EmptySupport));
    }

    #[test]
    fn embedded_rows_match_line_stft() {
        let mut rng = rng_for(23, 0);
        let f = LineSignal::from_slice(0, random_signal(&mut rng, 10).entries());
        let g = LineSignal::from_slice(0, &random_signal(&mut rng, 5).entries()[..5]);
        let e = embed_line(&f, &g).unwrap();
        assert!(e.d >= 31);
        let t = stft(&e.f, &e.g).unwrap();
        for k in 0..5i64 {
            for l in 0..e.d {
                let z = crate::twiddle::root_of_unity(l as i64, e.d);
                let want = f.stft_at(&g, k, z);
                assert!((t.get(e.row_of(k), l) - want).norm() < 1e-11);
            }
        }
    }
}
