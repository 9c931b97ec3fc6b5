//! Double-double evaluation of single ambiguity entries.

use twofloat::TwoFloat;

use crate::signal::CyclicSignal;
use crate::twiddle::root_of_unity;

/// `S(k) = Σ_j |g_j|·|g_{j−k}|`, the natural magnitude of row `k` of `V_gg`.
pub fn row_scales(g: &CyclicSignal) -> Vec<f64> {
    let d = g.dim();
    let mags: Vec<f64> = g.entries().iter().map(|z| z.norm()).collect();
    (0..d).map(|k| (0..d).map(|j| mags[j] * mags[(j + d - k) % d]).sum()).collect()
}

/// `|V_gg(k,l)|` with products and sums carried in double-double precision.
///
/// The products `g_j·conj(g_{j−k})` are exact; the only rounding left is in
/// the twiddle factors, whose reflection symmetries are exact.
pub fn ambiguity_entry_compensated(g: &CyclicSignal, k: usize, l: usize) -> f64 {
    let d = g.dim();
    let e = g.entries();
    let mut re = TwoFloat::from(0.0);
    let mut im = TwoFloat::from(0.0);
    for j in 0..d {
        let a = e[j];
        let b = e[(j + d - k) % d];
        if a.norm_sqr() == 0.0 || b.norm_sqr() == 0.0 {
            continue;
        }
        // a·conj(b)
        let p_re = TwoFloat::new_mul(a.re, b.re) + TwoFloat::new_mul(a.im, b.im);
        let p_im = TwoFloat::new_mul(a.im, b.re) - TwoFloat::new_mul(a.re, b.im);
        let w = root_of_unity(-(((j * l) % d) as i64), d);
        re += p_re * w.re - p_im * w.im;
        im += p_re * w.im + p_im * w.re;
    }
    let (r, i) = (f64::from(re), f64::from(im));
    r.hypot(i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_signal, rng_for};
    use crate::spectral::ambiguity;

    #[test]
    fn agrees_with_plain_transform() {
        let mut rng = rng_for(8, 0);
        let g = random_signal(&mut rng, 9);
        let a = ambiguity(&g);
        for k in 0..9 {
            for l in 0..9 {
                assert!((ambiguity_entry_compensated(&g, k, l) - a.get(k, l).norm()).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn row_scale_bounds_entries() {
        let mut rng = rng_for(9, 0);
        let g = random_signal(&mut rng, 7);
        let a = ambiguity(&g);
        let s = row_scales(&g);
        for k in 0..7 {
            assert!(a.row(k).iter().all(|z| z.norm() <= s[k] * (1.0 + 1e-12)));
        }
    }
}
