//! Containers for signals, d×d tables and spectrogram measurements.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Reduce an arbitrary integer index modulo `d` into `0..d`.
#[inline]
pub fn wrap(j: i64, d: usize) -> usize {
    j.rem_euclid(d as i64) as usize
}

/// A complex vector of length `d` indexed cyclically.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicSignal {
    entries: Vec<C64>,
    origin_offset: Option<i64>,
}

impl CyclicSignal {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "signal dimension must be at least 2, got {}",
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite signal entry".into()));
        }
        Ok(Self { entries, origin_offset: None })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_parts(re: &[f64], im: &[f64]) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::DimensionMismatch { expected: re.len(), found: im.len() });
        }
        Self::new(re.iter().zip(im).map(|(&a, &b)| C64::new(a, b)).collect())
    }

    pub fn zeros(d: usize) -> Result<Self> {
        Self::new(vec![C64::new(0.0, 0.0); d])
    }

    pub fn delta(d: usize, j: i64) -> Result<Self> {
        let mut s = Self::zeros(d)?;
        s.entries[wrap(j, d)] = C64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn with_origin(mut self, offset: i64) -> Self {
        self.origin_offset = Some(offset);
        self
    }

    pub fn origin_offset(&self) -> Option<i64> {
        self.origin_offset
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<C64> {
        self.entries
    }

    /// Entry at a cyclic index.
    #[inline]
    pub fn at(&self, j: i64) -> C64 {
        self.entries[wrap(j, self.dim())]
    }

    pub fn set(&mut self, j: i64, value: C64) {
        let d = self.dim();
        self.entries[wrap(j, d)] = value;
    }

    pub fn check_same_dim(&self, other: &CyclicSignal) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }

    /// Translation `(T_y f)_j = f_{j-y}`.
    pub fn shifted(&self, y: i64) -> Self {
        let d = self.dim();
        let entries = (0..d).map(|j| self.at(j as i64 - y)).collect();
        Self { entries, origin_offset: None }
    }

    /// Modulation `(M_l f)_j = e^{2πijl/d} f_j`.
    pub fn modulated(&self, l: i64) -> Self {
        let d = self.dim();
        let entries = (0..d)
            .map(|j| self.entries[j] * crate::twiddle::root_of_unity((j as i64) * l, d))
            .collect();
        Self { entries, origin_offset: None }
    }

    /// Reflection `(R f)_j = f_{-j}`.
    pub fn reflected(&self) -> Self {
        let d = self.dim();
        let entries = (0..d).map(|j| self.at(-(j as i64))).collect();
        Self { entries, origin_offset: None }
    }

    pub fn conj(&self) -> Self {
        Self { entries: self.entries.iter().map(|z| z.conj()).collect(), origin_offset: None }
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self {
            entries: self.entries.iter().map(|z| z * c).collect(),
            origin_offset: self.origin_offset,
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `⟨self, other⟩ = Σ_j self_j · conj(other_j)`.
    pub fn inner(&self, other: &CyclicSignal) -> Result<C64> {
        self.check_same_dim(other)?;
        Ok(self.entries.iter().zip(&other.entries).map(|(a, b)| a * b.conj()).sum())
    }

    /// Indices of exactly nonzero entries.
    pub fn nonzero_support(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&j| self.entries[j] != C64::new(0.0, 0.0)).collect()
    }

    /// Indices with `|f_j|² > tau · max_j |f_j|²`.
    pub fn support(&self, tau: f64) -> Vec<usize> {
        let peak = self.entries.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
        if peak == 0.0 {
            return Vec::new();
        }
        (0..self.dim()).filter(|&j| self.entries[j].norm_sqr() > tau * peak).collect()
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|z| z.im == 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|z| z.norm_sqr() == 0.0)
    }
}

/// A d×d complex table indexed by (time shift k, frequency l).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTable {
    d: usize,
    values: Vec<C64>,
}

impl ComplexTable {
    pub fn zeros(d: usize) -> Self {
        Self { d, values: vec![C64::new(0.0, 0.0); d * d] }
    }

    pub fn from_fn(d: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut values = Vec::with_capacity(d * d);
        for k in 0..d {
            for l in 0..d {
                values.push(f(k, l));
            }
        }
        Self { d, values }
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let d = rows.len();
        let mut values = Vec::with_capacity(d * d);
        for row in rows {
            if row.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: row.len() });
            }
            values.extend(row);
        }
        Ok(Self { d, values })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn get(&self, k: usize, l: usize) -> C64 {
        self.values[k * self.d + l]
    }

    /// Entry at cyclic indices.
    #[inline]
    pub fn at(&self, k: i64, l: i64) -> C64 {
        self.get(wrap(k, self.d), wrap(l, self.d))
    }

    pub fn set(&mut self, k: usize, l: usize, v: C64) {
        self.values[k * self.d + l] = v;
    }

    pub fn row(&self, k: usize) -> &[C64] {
        &self.values[k * self.d..(k + 1) * self.d]
    }

    pub fn row_mut(&mut self, k: usize) -> &mut [C64] {
        &mut self.values[k * self.d..(k + 1) * self.d]
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &ComplexTable) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `Σ_{k,l} self(k,l) · conj(other(k,l))`.
    pub fn inner(&self, other: &ComplexTable) -> C64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum()
    }
}

/// Squared STFT magnitudes `|V_g f(k,l)|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrogramMeasurement {
    d: usize,
    sq_mag: Vec<f64>,
}

impl SpectrogramMeasurement {
    /// Build from row-major values; every entry must be finite and nonnegative.
    pub fn new(d: usize, sq_mag: Vec<f64>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter(format!("dimension must be at least 2, got {d}")));
        }
        if sq_mag.len() != d * d {
            return Err(Error::DimensionMismatch { expected: d * d, found: sq_mag.len() });
        }
        for (i, &v) in sq_mag.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::NegativeMeasurement { k: i / d, l: i % d, value: v });
            }
        }
        Ok(Self { d, sq_mag })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let d = rows.len();
        let mut flat = Vec::with_capacity(d * d);
        for row in rows {
            if row.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: row.len() });
            }
            flat.extend(row);
        }
        Self::new(d, flat)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.sq_mag[k * self.d + l]
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.sq_mag[k * self.d..(k + 1) * self.d]
    }

    pub fn values(&self) -> &[f64] {
        &self.sq_mag
    }

    pub fn total(&self) -> f64 {
        self.sq_mag.iter().sum()
    }

    pub fn max(&self) -> f64 {
        self.sq_mag.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &SpectrogramMeasurement) -> f64 {
        self.sq_mag.iter().zip(&other.sq_mag).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// A finitely supported signal on the integer line.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LineSignal {
    entries: BTreeMap<i64, C64>,
}

impl LineSignal {
    /// Entries that are exactly zero are dropped.
    pub fn new(entries: BTreeMap<i64, C64>) -> Self {
        let entries = entries.into_iter().filter(|(_, v)| *v != C64::new(0.0, 0.0)).collect();
        Self { entries }
    }

    pub fn from_slice(offset: i64, values: &[C64]) -> Self {
        Self::new(values.iter().enumerate().map(|(i, &v)| (offset + i as i64, v)).collect())
    }

    pub fn entries(&self) -> &BTreeMap<i64, C64> {
        &self.entries
    }

    pub fn get(&self, j: i64) -> C64 {
        self.entries.get(&j).copied().unwrap_or_default()
    }

    pub fn support(&self) -> Vec<i64> {
        self.entries.keys().copied().collect()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn min_index(&self) -> Option<i64> {
        self.entries.keys().next().copied()
    }

    pub fn max_index(&self) -> Option<i64> {
        self.entries.keys().next_back().copied()
    }

    /// `max index − min index`, zero for empty signals.
    pub fn extent(&self) -> i64 {
        match (self.min_index(), self.max_index()) {
            (Some(a), Some(b)) => b - a,
            _ => 0,
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries.values().map(|z| z.norm_sqr()).sum()
    }

    /// Dense copy of the entries on `lo..=hi`.
    pub fn dense(&self, lo: i64, hi: i64) -> Vec<C64> {
        (lo..=hi).map(|j| self.get(j)).collect()
    }

    /// Line STFT `V_g f(k, z) = Σ_j f_j · conj(g_{j−k}) · z^{−j}` at a point of the unit circle.
    pub fn stft_at(&self, g: &LineSignal, k: i64, z: C64) -> C64 {
        let zinv = z.inv();
        self.entries
            .iter()
            .map(|(&j, &fj)| fj * g.get(j - k).conj() * zinv.powi(j as i32))
            .sum()
    }
}
