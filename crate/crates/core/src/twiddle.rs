//! Roots of unity with exact reflection symmetries.
//!
//! The angle is reduced to the first octant with integer arithmetic before
//! calling `sin`/`cos`, so `w(d-m) = conj(w(m))` and `w(m+d/2) = -w(m)` hold
//! bit for bit.

use crate::signal::C64;

fn cis_reduced(num: i128, den: i128) -> (f64, f64) {
    // angle 2π·num/den with 0 ≤ num < den and 8 | den
    if 2 * num > den {
        let (c, s) = cis_reduced(den - num, den);
        return (c, -s);
    }
    if 4 * num > den {
        let (c, s) = cis_reduced(den / 2 - num, den);
        return (-c, s);
    }
    if 8 * num > den {
        let (c, s) = cis_reduced(den / 4 - num, den);
        return (s, c);
    }
    let x = std::f64::consts::TAU * (num as f64) / (den as f64);
    (x.cos(), x.sin())
}

/// `e^{2πi m/d}`.
pub fn root_of_unity(m: i64, d: usize) -> C64 {
    let den = 8 * d as i128;
    let num = 8 * (m as i128).rem_euclid(d as i128);
    let (c, s) = cis_reduced(num, den);
    C64::new(c, s)
}

#[cfg(test)]
/// Table of `e^{-2πi m/d}` for `m = 0..d`.
pub fn forward_table(d: usize) -> Vec<C64> {
    (0..d).map(|m| root_of_unity(m as i64, d).conj()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetries_are_exact() {
        for d in 2..70usize {
            let w = forward_table(d);
            for m in 0..d {
                assert_eq!(w[(d - m) % d], w[m].conj(), "d={d} m={m}");
                if d % 2 == 0 {
                    assert_eq!(w[(m + d / 2) % d], -w[m], "d={d} m={m}");
                }
            }
        }
    }

    #[test]
    fn matches_libm() {
        for d in 2..40usize {
            for m in 0..d {
                let x = std::f64::consts::TAU * m as f64 / d as f64;
                let z = root_of_unity(m as i64, d);
                assert!((z - C64::new(x.cos(), x.sin())).norm() < 1e-14);
            }
        }
    }
}
