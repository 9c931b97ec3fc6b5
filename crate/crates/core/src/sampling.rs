//! Seeded random signals, windows and supports for tests, benches and the acceptance suite.
//!
//! Every trial is addressed by `(seed, stream)` so batch drivers can run trials
//! in any order and still reproduce them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::signal::{CyclicSignal, LineSignal, C64};

pub type TrialRng = ChaCha8Rng;

pub fn rng_for(seed: u64, stream: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard complex Gaussian sample.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Complex Gaussian conditioned on `|z| ≥ floor`.
pub fn complex_gaussian_floor<R: Rng + ?Sized>(rng: &mut R, floor: f64) -> C64 {
    loop {
        let z = complex_gaussian(rng);
        if z.norm() >= floor {
            return z;
        }
    }
}

pub fn random_signal<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CyclicSignal {
    CyclicSignal::new((0..d).map(|_| complex_gaussian(rng)).collect()).expect("d >= 2")
}

pub fn random_real_signal<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CyclicSignal {
    let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
    CyclicSignal::from_real(&v).expect("d >= 2")
}

/// Random signal with entries bounded away from zero on `support` and zero elsewhere.
pub fn random_signal_on<R: Rng + ?Sized>(rng: &mut R, d: usize, support: &[usize]) -> CyclicSignal {
    let mut f = CyclicSignal::zeros(d).expect("d >= 2");
    for &j in support {
        f.set(j as i64, complex_gaussian_floor(rng, 0.2));
    }
    f
}

/// Random window with `g_j ≠ 0 ⇔ 0 ≤ j ≤ L`.
pub fn random_short_window<R: Rng + ?Sized>(rng: &mut R, d: usize, l: usize) -> CyclicSignal {
    let mut g = CyclicSignal::zeros(d).expect("d >= 2");
    for j in 0..=l {
        g.set(j as i64, complex_gaussian_floor(rng, 0.2));
    }
    g
}

/// Nonempty support whose consecutive cyclic gaps are at most `l`, except
/// possibly one.
pub fn random_connected_support<R: Rng + ?Sized>(rng: &mut R, d: usize, l: usize) -> Vec<usize> {
    let span = rng.random_range(0..d);
    let start = rng.random_range(0..d);
    let mut out = vec![start];
    let mut p = 0usize;
    loop {
        p += rng.random_range(1..=l.max(1));
        if p > span {
            break;
        }
        out.push((start + p) % d);
    }
    out.sort_unstable();
    out
}

/// Support with exactly `n` L-connectivity components mod `d`.
///
/// Returns `None` when `n·(L+1) > d` makes that impossible.
pub fn random_support_with_components<R: Rng + ?Sized>(
    rng: &mut R,
    d: usize,
    l: usize,
    n: usize,
) -> Option<Vec<usize>> {
    if n == 0 || n * (l + 1) > d {
        return None;
    }
    // clusters have span s_i, separating gaps are L+1+e_i, and Σ s_i + Σ e_i = d − n(L+1)
    let free = d - n * (l + 1);
    let mut cuts: Vec<usize> = (0..2 * n - 1).map(|_| rng.random_range(0..=free)).collect();
    cuts.sort_unstable();
    let mut parts = Vec::with_capacity(2 * n);
    let mut prev = 0;
    for c in cuts {
        parts.push(c - prev);
        prev = c;
    }
    parts.push(free - prev);
    let start = rng.random_range(0..d);
    let mut pos = 0usize;
    let mut out = Vec::new();
    for i in 0..n {
        let span = parts[2 * i];
        out.push((start + pos) % d);
        let mut p = 0usize;
        while p < span {
            p = (p + rng.random_range(1..=l.max(1))).min(span);
            out.push((start + pos + p) % d);
        }
        pos += span + l + 1 + parts[2 * i + 1];
    }
    out.sort_unstable();
    out.dedup();
    Some(out)
}

/// Random line signal on `0..=extent` with both endpoints nonzero and every
/// interior entry zero with probability `p_zero`.
pub fn random_line_signal<R: Rng + ?Sized>(rng: &mut R, extent: usize, p_zero: f64) -> LineSignal {
    let vals: Vec<C64> = (0..=extent)
        .map(|j| {
            if j != 0 && j != extent && rng.random::<f64>() < p_zero {
                C64::new(0.0, 0.0)
            } else {
                complex_gaussian_floor(rng, 0.2)
            }
        })
        .collect();
    LineSignal::from_slice(0, &vals)
}
