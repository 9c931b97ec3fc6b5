//! Self-checking constructions of signals that a window cannot tell apart.
//!
//! Each generator returns a [`CounterexampleBundle`] only after verifying that
//! all signals produce the same spectrogram while no two agree up to a global
//! phase. A failed check is reported as [`Error::InvalidBundle`].

use std::collections::BTreeSet;

use rand::Rng;

use crate::error::{Error, Result};
use crate::recovery::compare_up_to_phase;
use crate::sampling::{complex_gaussian_floor, rng_for};
use crate::signal::{wrap, CyclicSignal, LineSignal, C64};
use crate::spectral::{ambiguity, embed_line, measure};
use crate::twiddle::root_of_unity;
use crate::window::{difference_set, omega_mask, Domain, Threshold};

/// Relative bound on the measurement gap of a valid bundle.
pub const MEASUREMENT_GAP_TOL: f64 = 1e-9;
/// Minimum phase-aligned distance between any two signals of a valid bundle.
pub const PHASE_SEPARATION_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleBundle {
    pub family: String,
    pub window: CyclicSignal,
    pub signals: Vec<CyclicSignal>,
    /// Largest entrywise difference between any measurement and the first one.
    pub max_measurement_gap: f64,
    /// Largest measurement entry over all signals.
    pub scale: f64,
    /// Smallest phase-aligned relative distance over all pairs.
    pub pairwise_phase_err: f64,
    pub notes: Vec<String>,
}

impl CounterexampleBundle {
    /// Measures every signal and fills in the gap and separation figures.
    pub fn assemble(family: &str, window: CyclicSignal, signals: Vec<CyclicSignal>) -> Result<Self> {
        if signals.len() < 2 {
            return Err(Error::InvalidBundle(format!("need at least two signals, got {}", signals.len())));
        }
        let measurements = signals.iter().map(|f| measure(f, &window)).collect::<Result<Vec<_>>>()?;
        let scale = measurements.iter().map(|x| x.max()).fold(0.0, f64::max);
        let max_measurement_gap = measurements[1..].iter().map(|x| x.max_abs_diff(&measurements[0])).fold(0.0, f64::max);
        let mut pairwise_phase_err = f64::INFINITY;
        for (i, a) in signals.iter().enumerate() {
            for b in &signals[i + 1..] {
                pairwise_phase_err = pairwise_phase_err.min(compare_up_to_phase(a, b)?.1);
            }
        }
        Ok(Self {
            family: family.to_string(),
            window,
            signals,
            max_measurement_gap,
            scale,
            pairwise_phase_err,
            notes: Vec::new(),
        })
    }

    pub fn is_valid(&self) -> bool {
        self.max_measurement_gap < MEASUREMENT_GAP_TOL * self.scale && self.pairwise_phase_err > PHASE_SEPARATION_TOL
    }

    fn checked(self) -> Result<Self> {
        if self.is_valid() {
            Ok(self)
        } else {
            Err(Error::InvalidBundle(format!(
                "{}: gap {:.3e} at scale {:.3e}, separation {:.3e}",
                self.family, self.max_measurement_gap, self.scale, self.pairwise_phase_err
            )))
        }
    }
}

fn divides(a: usize, b: usize) -> bool {
    b % a == 0
}

/// Comb of spacing `r` measured with the box window on `0..=L`, together with
/// its translates by `0..r`.
pub fn periodic_family(d: usize, l_len: usize, r: usize) -> Result<CounterexampleBundle> {
    if r < 2 || !divides(r, d) || !divides(r, l_len + 1) || 2 * l_len >= d {
        return Err(Error::InvalidParameter(format!(
            "need r >= 2 dividing d and L+1 with L < d/2, got d={d}, L={l_len}, r={r}"
        )));
    }
    let window = CyclicSignal::from_real(&(0..d).map(|j| if j <= l_len { 1.0 } else { 0.0 }).collect::<Vec<_>>())?;
    let comb = CyclicSignal::from_real(&(0..d).map(|j| if j % r == 0 { 1.0 } else { 0.0 }).collect::<Vec<_>>())?;

    // V_gg must vanish wherever the comb's ambiguity is nonzero off l = 0
    let vgg = ambiguity(&window);
    let scale = vgg.max_abs();
    for k in (0..=l_len).filter(|k| k % r == 0) {
        for l in (d / r..d).step_by(d / r) {
            let v = vgg.get(k, l).norm();
            if v > 1e-12 * scale {
                return Err(Error::InvalidBundle(format!("V_gg({k},{l}) = {v:.3e} is not zero")));
            }
        }
    }
    let signals = (0..r).map(|m| comb.shifted(m as i64)).collect();
    let mut bundle = CounterexampleBundle::assemble("periodic", window, signals)?;
    bundle.notes.push(format!("comb of spacing {r} and its {r} translates"));
    bundle.checked()
}

/// Window argument of [`delta_pair`].
#[derive(Debug, Clone, Copy)]
pub enum DeltaMode<'a> {
    Cyclic(&'a CyclicSignal),
    Line(&'a LineSignal),
}

/// `δ_0 + δ_k` and `δ_0 − δ_k` for a shift `k` the window never pairs.
///
/// In line mode both signals and the window are embedded into a cyclic group
/// large enough that no difference wraps around.
pub fn delta_pair(k: i64, mode: DeltaMode<'_>) -> Result<CounterexampleBundle> {
    let (window, plus, minus, domain_note) = match mode {
        DeltaMode::Cyclic(g) => {
            let d = g.dim();
            let support: Vec<i64> = g.nonzero_support().into_iter().map(|j| j as i64).collect();
            if difference_set(&support, Domain::Cyclic(d))?.contains(k) {
                return Err(Error::ShiftInDifferenceSet(wrap(k, d) as i64));
            }
            let one = C64::new(1.0, 0.0);
            let mut plus = CyclicSignal::delta(d, 0)?;
            plus.set(k, one);
            let mut minus = CyclicSignal::delta(d, 0)?;
            minus.set(k, -one);
            (g.clone(), plus, minus, format!("cyclic d={d}"))
        }
        DeltaMode::Line(g) => {
            if difference_set(&g.support(), Domain::Line)?.contains(k) {
                return Err(Error::ShiftInDifferenceSet(k));
            }
            let one = C64::new(1.0, 0.0);
            let plus = LineSignal::new([(0, one), (k, one)].into_iter().collect());
            let minus = LineSignal::new([(0, one), (k, -one)].into_iter().collect());
            let ep = embed_line(&plus, g)?;
            let em = embed_line(&minus, g)?;
            let d = ep.d;
            (ep.g, ep.f, em.f, format!("line, embedded in Z_{d}"))
        }
    };

    let d = window.dim();
    let kk = wrap(k, d);
    for f in [&plus, &minus] {
        let vff = ambiguity(f);
        for row in (0..d).filter(|&r| r != 0 && r != kk && r != wrap(-k, d)) {
            if vff.row(row).iter().any(|z| z.norm() > 1e-12) {
                return Err(Error::InvalidBundle(format!("V_ff row {row} is not zero")));
            }
        }
    }
    let mut bundle = CounterexampleBundle::assemble("delta", window, vec![plus, minus])?;
    bundle.notes.push(format!("shift {k}, {domain_note}"));
    bundle.checked()
}

/// The pair `δ_0 + (1 ± i)δ_{d/2}`, indistinguishable under any real window.
pub fn real_even_pair(d: usize, g: &CyclicSignal) -> Result<CounterexampleBundle> {
    if d < 2 || d % 2 != 0 {
        return Err(Error::InvalidParameter(format!("need even d, got {d}")));
    }
    if g.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: g.dim() });
    }
    if !g.is_real() {
        return Err(Error::PreconditionViolated("window is not real-valued".into()));
    }
    let pair = |s: f64| -> Result<CyclicSignal> {
        let mut f = CyclicSignal::delta(d, 0)?;
        f.set((d / 2) as i64, C64::new(1.0, s));
        Ok(f)
    };
    CounterexampleBundle::assemble("real-even", g.clone(), vec![pair(1.0)?, pair(-1.0)?])?.checked()
}

/// The orbit `{(k, l), (−k, −l)}` of a single punctured entry.
fn orbit(d: usize, k: usize, l: usize) -> BTreeSet<(usize, usize)> {
    [(k % d, l % d), ((d - k % d) % d, (d - l % d) % d)].into_iter().collect()
}

/// A window on `Z_d` whose ambiguity function vanishes exactly on the orbit of `(k, l)`.
///
/// Row 0 zeros come from unimodular entries; other rows solve the real-linear
/// equation in `g_0` that the entry imposes. Random starts are redrawn until
/// no other zero appears.
pub fn window_with_single_zero(d: usize, k: usize, l: usize, seed: u64) -> Result<CyclicSignal> {
    let (k, l) = (k % d, l % d);
    if (k, l) == (0, 0) {
        return Err(Error::InvalidParameter("V_gg(0,0) vanishes only for g = 0".into()));
    }
    let target = orbit(d, k, l);
    if d == 2 && k == 1 {
        // row 1 is 2·Re or 2i·Im of g_0 conj(g_1): make the product imaginary or real
        let g1 = if l == 0 { C64::new(0.0, 2.0) } else { C64::new(2.0, 0.0) };
        return CyclicSignal::new(vec![C64::new(1.0, 0.0), g1]);
    }
    let mut rng = rng_for(seed, 0x5a11);
    const ATTEMPTS: usize = 256;
    for _ in 0..ATTEMPTS {
        let mut g = CyclicSignal::new((0..d).map(|_| complex_gaussian_floor(&mut rng, 0.2)).collect())?;
        if k == 0 {
            // |g_j| constant makes every l != 0 entry of row 0 vanish
            if d > 3 {
                return Err(Error::InvalidParameter(format!("row 0 cannot lose a single orbit for d={d}")));
            }
            g = CyclicSignal::new((0..d).map(|_| root_of_unity(rng.random_range(0..1024), 1024)).collect())?;
        } else {
            let a = g.at(-(k as i64)).conj();
            let b = g.at(k as i64) * root_of_unity(-((k * l) as i64), d);
            let c: C64 = (1..d)
                .filter(|&j| j != k)
                .map(|j| g.at(j as i64) * g.at(j as i64 - k as i64).conj() * root_of_unity(-((j * l) as i64), d))
                .sum();
            // (a + b)x + i(a − b)y = −c for g_0 = x + iy; terms where g_0 meets itself do not occur for k != 0
            let (p, q) = (a + b, C64::new(0.0, 1.0) * (a - b));
            let det = p.re * q.im - p.im * q.re;
            if det.abs() < 1e-6 {
                continue;
            }
            let rhs = -c;
            let x = (rhs.re * q.im - rhs.im * q.re) / det;
            let y = (p.re * rhs.im - p.im * rhs.re) / det;
            if C64::new(x, y).norm() < 1e-3 {
                continue;
            }
            g.set(0, C64::new(x, y));
        }
        let zeros: BTreeSet<(usize, usize)> = omega_mask(&g, Threshold::default())?.false_entries().into_iter().collect();
        if zeros == target {
            return Ok(g);
        }
    }
    Err(Error::RejectionLimit(ATTEMPTS))
}

/// Closed-form witness pair for a window on `Z_2` or `Z_3` with one punctured orbit.
pub fn small_d_witness(d: usize, zero_at: (usize, usize), seed: u64) -> Result<CounterexampleBundle> {
    let (k, l) = (zero_at.0 % d.max(1), zero_at.1 % d.max(1));
    if !(d == 2 || d == 3) {
        return Err(Error::InvalidParameter(format!("need d in {{2, 3}}, got {d}")));
    }
    if (k, l) == (0, 0) {
        return Err(Error::InvalidParameter("puncturing (0,0) forces g = 0".into()));
    }
    let c = |re: f64, im: f64| C64::new(re, im);
    let (f, ft): (Vec<C64>, Vec<C64>) = if d == 2 {
        match (k, l) {
            (0, 1) => (vec![c(2., 0.), c(1., 0.)], vec![c(1., 0.), c(2., 0.)]),
            (1, 0) => (vec![c(2., 0.), c(1., 0.)], vec![c(2., 0.), c(-1., 0.)]),
            _ => (vec![c(2., 0.), c(0., 1.)], vec![c(2., 0.), c(0., -1.)]),
        }
    } else if k == 0 {
        (vec![c(1., 0.), c(0., 0.), c(0., 0.)], vec![c(0., 0.), c(1., 0.), c(0., 0.)])
    } else {
        // entries are 3^{-1/2} times twelfth roots of unity
        let s = 1.0 / 3f64.sqrt();
        let base = [0i64, -1, 5];
        let other = [0i64, -3, -5];
        // (1,1) and (2,2) use the base pair; (1,2) and (2,1) rotate f_1 by e^{2πi/3}; (1,0) and (2,0) by e^{−2πi/3}
        let twist = match orbit(3, k, l).into_iter().next().expect("orbit is non-empty") {
            (1, 1) => 0,
            (1, 2) => 4,
            _ => -4,
        };
        let build = |p: [i64; 3]| -> Vec<C64> {
            (0..3)
                .map(|j| {
                    let mag = if j == 0 { 1.0 } else { s };
                    let turn = if j == 1 { p[j] + twist } else { p[j] };
                    root_of_unity(turn, 12) * mag
                })
                .collect()
        };
        (build(base), build(other))
    };
    let (f, ft) = (CyclicSignal::new(f)?, CyclicSignal::new(ft)?);

    let target = orbit(d, k, l);
    let (va, vb) = (ambiguity(&f), ambiguity(&ft));
    for kk in 0..d {
        for ll in 0..d {
            if !target.contains(&(kk, ll)) && (va.get(kk, ll) - vb.get(kk, ll)).norm() > 1e-12 {
                return Err(Error::InvalidBundle(format!("ambiguity functions differ at ({kk},{ll})")));
            }
        }
    }
    let window = window_with_single_zero(d, k, l, seed)?;
    let mut bundle = CounterexampleBundle::assemble("small-d", window, vec![f, ft])?;
    bundle.notes.push(format!("punctured orbit {target:?}"));
    bundle.checked()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::random_real_signal;
    use crate::window::construct_line_difference_window;

    fn naive_measurement(f: &CyclicSignal, g: &CyclicSignal) -> Vec<f64> {
        let d = f.dim();
        let mut out = Vec::with_capacity(d * d);
        for k in 0..d {
            for l in 0..d {
                let v: C64 = (0..d)
                    .map(|j| {
                        let x = -std::f64::consts::TAU * (j * l) as f64 / d as f64;
                        f.entries()[j] * g.at(j as i64 - k as i64).conj() * C64::new(x.cos(), x.sin())
                    })
                    .sum();
                out.push(v.norm_sqr());
            }
        }
        out
    }

    fn agree_naively(b: &CounterexampleBundle) {
        let first = naive_measurement(&b.signals[0], &b.window);
        for s in &b.signals[1..] {
            let other = naive_measurement(s, &b.window);
            let gap = first.iter().zip(&other).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(gap < 1e-9 * b.scale, "gap {gap}");
        }
    }

    #[test]
    fn periodic_d8() {
        let b = periodic_family(8, 3, 2).unwrap();
        assert_eq!(b.signals.len(), 2);
        assert_ne!(b.signals[0].nonzero_support(), b.signals[1].nonzero_support());
        agree_naively(&b);
    }

    #[test]
    fn periodic_d9_three_translates() {
        let b = periodic_family(9, 2, 3).unwrap();
        assert_eq!(b.signals.len(), 3);
        agree_naively(&b);
    }

    #[test]
    fn periodic_full_length_spacing() {
        // spacing L + 1 leaves L consecutive zeros between comb teeth
        let b = periodic_family(12, 3, 4).unwrap();
        assert_eq!(b.signals.len(), 4);
        agree_naively(&b);
    }

    #[test]
    fn periodic_rejects_bad_divisors() {
        assert!(periodic_family(8, 2, 2).is_err());
        assert!(periodic_family(9, 3, 2).is_err());
        assert!(periodic_family(8, 3, 1).is_err());
        assert!(periodic_family(6, 3, 2).is_err());
    }

    #[test]
    fn delta_cyclic() {
        let mut g = CyclicSignal::zeros(8).unwrap();
        g.set(0, C64::new(1.0, 0.5));
        g.set(1, C64::new(-0.3, 1.0));
        let b = delta_pair(4, DeltaMode::Cyclic(&g)).unwrap();
        agree_naively(&b);
        assert!(matches!(delta_pair(1, DeltaMode::Cyclic(&g)), Err(Error::ShiftInDifferenceSet(1))));
        assert!(matches!(delta_pair(0, DeltaMode::Cyclic(&g)), Err(Error::ShiftInDifferenceSet(0))));
    }

    #[test]
    fn delta_line_truncated_difference_window() {
        let coeffs: Vec<C64> = (0..5).map(|n| C64::new(1.0 + n as f64, 0.5)).collect();
        let full = construct_line_difference_window(&coeffs).unwrap();
        let cut = full.without_term(3).unwrap();
        let diffs = difference_set(&cut.window.support(), Domain::Line).unwrap();
        let k = diffs.smallest_gap().unwrap();
        let b = delta_pair(k, DeltaMode::Line(&cut.window)).unwrap();
        assert!(b.is_valid());
        agree_naively(&b);
        assert!(matches!(delta_pair(k, DeltaMode::Line(&full.window)), Err(Error::ShiftInDifferenceSet(_))));
    }

    #[test]
    fn real_even_examples() {
        let g = CyclicSignal::from_real(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        agree_naively(&real_even_pair(4, &g).unwrap());
        let mut rng = rng_for(60, 0);
        for d in [6, 8, 10] {
            let g = random_real_signal(&mut rng, d);
            agree_naively(&real_even_pair(d, &g).unwrap());
        }
        assert!(real_even_pair(5, &CyclicSignal::from_real(&[1.0; 5]).unwrap()).is_err());
        let complex = CyclicSignal::new(vec![C64::new(1.0, 1.0); 4]).unwrap();
        assert!(matches!(real_even_pair(4, &complex), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn small_d2_table() {
        let b = small_d_witness(2, (1, 0), 1).unwrap();
        assert_eq!(b.signals[0].entries(), &[C64::new(2.0, 0.0), C64::new(1.0, 0.0)]);
        assert_eq!(b.signals[1].entries(), &[C64::new(2.0, 0.0), C64::new(-1.0, 0.0)]);
        for zero in [(0, 1), (1, 1)] {
            agree_naively(&small_d_witness(2, zero, 1).unwrap());
        }
    }

    #[test]
    fn small_d3_all_orbits() {
        for k in 0..3 {
            for l in 0..3 {
                if (k, l) == (0, 0) {
                    assert!(small_d_witness(3, (k, l), 1).is_err());
                    continue;
                }
                let b = small_d_witness(3, (k, l), 7).unwrap();
                agree_naively(&b);
                let zeros: BTreeSet<_> = omega_mask(&b.window, Threshold::default()).unwrap().false_entries().into_iter().collect();
                assert_eq!(zeros, orbit(3, k, l));
            }
        }
    }

    #[test]
    fn small_d3_base_pair_differs_only_on_orbit() {
        let b = small_d_witness(3, (1, 1), 3).unwrap();
        let (va, vb) = (ambiguity(&b.signals[0]), ambiguity(&b.signals[1]));
        assert!((va.get(1, 1) - vb.get(1, 1)).norm() > 1e-3);
        assert!((va.get(2, 2) - vb.get(2, 2)).norm() > 1e-3);
    }

    #[test]
    fn small_d_rejects_other_dimensions() {
        assert!(small_d_witness(4, (1, 1), 0).is_err());
    }
}
