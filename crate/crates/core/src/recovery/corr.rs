use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::signal::{wrap, CyclicSignal, SpectrogramMeasurement, C64};
use crate::spectral::{ambiguity, relation_transform, DftPlan};
use crate::window::OmegaMask;

/// Autocorrelations `a[k][j] = f_j · conj(f_{j−k})` for a set of known shifts.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationData {
    d: usize,
    rows: BTreeMap<usize, Vec<C64>>,
}

impl CorrelationData {
    pub fn new(d: usize) -> Self {
        Self { d, rows: BTreeMap::new() }
    }

    /// All rows of a known signal for the given shifts.
    pub fn from_signal(f: &CyclicSignal, shifts: impl IntoIterator<Item = usize>) -> Self {
        let d = f.dim();
        let mut out = Self::new(d);
        for k in shifts {
            let row = (0..d).map(|j| f.at(j as i64) * f.at(j as i64 - k as i64).conj()).collect();
            out.rows.insert(k % d, row);
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn insert(&mut self, k: usize, row: Vec<C64>) -> Result<()> {
        if row.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, found: row.len() });
        }
        self.rows.insert(k % self.d, row);
        Ok(())
    }

    pub fn remove(&mut self, k: usize) -> Option<Vec<C64>> {
        self.rows.remove(&(k % self.d))
    }

    pub fn row(&self, k: usize) -> Option<&[C64]> {
        self.rows.get(&(k % self.d)).map(|v| v.as_slice())
    }

    /// `a[k][j]` with cyclic indices, if row `k` is known.
    pub fn get(&self, k: i64, j: i64) -> Option<C64> {
        self.row(wrap(k, self.d)).map(|r| r[wrap(j, self.d)])
    }

    pub fn known_shifts(&self) -> BTreeSet<usize> {
        self.rows.keys().copied().collect()
    }

    pub fn has(&self, k: usize) -> bool {
        self.rows.contains_key(&(k % self.d))
    }

    /// Largest `|a[k][j] − conj(a[d−k][j−k])|` over pairs of known rows.
    pub fn hermitian_defect(&self) -> f64 {
        let d = self.d as i64;
        let mut worst: f64 = 0.0;
        for &k in self.rows.keys() {
            let k = k as i64;
            if !self.has(wrap(-k, self.d)) {
                continue;
            }
            for j in 0..d {
                let a = self.get(k, j).expect("known");
                let b = self.get(-k, j - k).expect("known");
                worst = worst.max((a - b.conj()).norm());
            }
        }
        worst
    }

    /// Largest entry of `a[0]`, i.e. `max_j |f_j|²`.
    pub fn peak(&self) -> f64 {
        self.row(0).map(|r| r.iter().map(|z| z.re).fold(0.0, f64::max)).unwrap_or(0.0)
    }
}

/// Window products `c[k][m] = g_m · conj(g_{m−k})` for `k ≤ m ≤ L`.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowCoefficients {
    l: usize,
    c: Vec<Vec<C64>>,
}

impl WindowCoefficients {
    pub fn len_l(&self) -> usize {
        self.l
    }

    /// `c_m^{(k)}`, for `k ≤ m ≤ L`.
    pub fn get(&self, k: usize, m: usize) -> C64 {
        self.c[k][m - k]
    }

    pub fn row(&self, k: usize) -> &[C64] {
        &self.c[k]
    }
}

/// Requires `g_j ≠ 0 ⇔ 0 ≤ j ≤ L` with `L < d/2`.
pub fn window_coeffs(g: &CyclicSignal, l: usize) -> Result<WindowCoefficients> {
    let d = g.dim();
    if 2 * l >= d {
        return Err(Error::NotShortWindow(format!("L={l} is not below d/2 for d={d}")));
    }
    let support = g.nonzero_support();
    if support != (0..=l).collect::<Vec<_>>() {
        return Err(Error::NotShortWindow(format!("support {support:?} is not 0..={l}")));
    }
    let c = (0..=l)
        .map(|k| (k..=l).map(|m| g.at(m as i64) * g.at((m - k) as i64).conj()).collect())
        .collect();
    Ok(WindowCoefficients { l, c })
}

/// `b_j^{(k)}`: the inverse DFT of row `k` of the relation transform, `0 ≤ k ≤ L`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementCoefficients {
    d: usize,
    l: usize,
    b: Vec<Vec<C64>>,
}

impl MeasurementCoefficients {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len_l(&self) -> usize {
        self.l
    }

    pub fn get(&self, k: usize, j: i64) -> C64 {
        self.b[k][wrap(j, self.d)]
    }

    pub fn row(&self, k: usize) -> &[C64] {
        &self.b[k]
    }

    /// Largest `|b_j^{(k)}|` over all rows.
    pub fn scale(&self) -> f64 {
        self.b.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

pub fn measurement_coeffs(x: &SpectrogramMeasurement, l: usize) -> Result<MeasurementCoefficients> {
    let d = x.dim();
    if 2 * l >= d {
        return Err(Error::InvalidParameter(format!("need L < d/2, got d={d}, L={l}")));
    }
    let r = relation_transform(x);
    let plan = DftPlan::new(d)?;
    let mut b = Vec::with_capacity(l + 1);
    for k in 0..=l {
        let mut row = r.row(k).to_vec();
        plan.inverse_in_place(&mut row)?;
        b.push(row);
    }
    Ok(MeasurementCoefficients { d, l, b })
}

/// Rows of `a` whose mask row is entirely true: `a[k] = idft(R(k,·) / conj(V_gg(k,·)))`.
pub fn recover_autocorrelations(x: &SpectrogramMeasurement, g: &CyclicSignal, omega: &OmegaMask) -> Result<CorrelationData> {
    let d = x.dim();
    if g.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: g.dim() });
    }
    if omega.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: omega.dim() });
    }
    let r = relation_transform(x);
    let vgg = ambiguity(g);
    let plan = DftPlan::new(d)?;
    let mut out = CorrelationData::new(d);
    for k in 0..d {
        if !omega.row_full(k) {
            continue;
        }
        let mut row = Vec::with_capacity(d);
        for l in 0..d {
            let den = vgg.get(k, l).conj();
            if den.norm_sqr() == 0.0 {
                return Err(Error::MaskViolation { k, l });
            }
            row.push(r.get(k, l) / den);
        }
        plan.inverse_in_place(&mut row)?;
        out.insert(k, row)?;
    }
    Ok(out)
}
