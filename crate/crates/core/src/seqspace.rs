//! Generalized Hahn space `h_d`.
//!
//! Elements are sequences `m = (m_1, m_2, …)` with `m_n → 0` and
//! `‖m‖ = Σ d_n |m_n − m_{n+1}| < ∞`. Every vector handled here is finitely
//! supported, so the norm and the forward differences are exact finite sums.
//! Indices in the public API are 1-based where they name a sequence position
//! (`d_n`, sections, tails) to line up with `Σ_{n=1}^∞`.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Positive, nondecreasing weights `d = (d_n)_{n ≥ 1}`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(try_from = "WeightDescriptor", into = "WeightDescriptor")
)]
pub enum WeightSequence {
    /// `d_n = n`, the classical Hahn weights.
    Linear,
    /// `d_n = n^p`, `p ≥ 0`.
    Power(f64),
    /// `d_n = 1`; the space degenerates to `bv_0`.
    Constant,
    /// Tabulated `d_1 … d_L`, extended geometrically past the table.
    Table(WeightTable),
}

/// Validated weight table.
///
/// Beyond the last entry the table grows by its last ratio `d_L / d_{L−1}`,
/// clamped below at 1 so the extension never decreases.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    values: Vec<f64>,
    growth: f64,
}

impl WeightTable {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter {
                name: "table",
                reason: "weight table must not be empty".into(),
            });
        }
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidParameter {
                name: "table",
                reason: alloc::format!("weights must be positive and finite, found {bad}"),
            });
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter {
                name: "table",
                reason: "weights must be nondecreasing".into(),
            });
        }
        let growth = match values.len() {
            1 => 1.0,
            len => (values[len - 1] / values[len - 2]).max(1.0),
        };
        Ok(WeightTable { values, growth })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn get(&self, n: usize) -> f64 {
        let len = self.values.len();
        if n <= len {
            self.values[n - 1]
        } else {
            self.values[len - 1] * libm::pow(self.growth, (n - len) as f64)
        }
    }
}

impl WeightSequence {
    pub fn power(p: f64) -> Result<Self> {
        if !(p.is_finite() && p >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "p",
                reason: alloc::format!("power exponent must be finite and >= 0, got {p}"),
            });
        }
        Ok(WeightSequence::Power(p))
    }

    pub fn table(values: Vec<f64>) -> Result<Self> {
        WeightTable::new(values).map(WeightSequence::Table)
    }

    /// Weight `d_n` for `n ≥ 1`.
    ///
    /// # Panics
    ///
    /// Panics if `n == 0`; the sequence is indexed from 1.
    pub fn get(&self, n: usize) -> f64 {
        assert!(n >= 1, "weight sequence is indexed from n = 1");
        match self {
            WeightSequence::Linear => n as f64,
            WeightSequence::Power(p) => libm::pow(n as f64, *p),
            WeightSequence::Constant => 1.0,
            WeightSequence::Table(t) => t.get(n),
        }
    }

    /// `d_1 … d_len` as a vector.
    pub fn prefix(&self, len: usize) -> Vec<f64> {
        (1..=len).map(|n| self.get(n)).collect()
    }
}

/// Serialized form of [`WeightSequence`].
#[cfg(feature = "serde")]
#[derive(serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightDescriptor {
    kind: WeightKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    table: Option<Vec<f64>>,
}

#[cfg(feature = "serde")]
#[derive(serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
enum WeightKind {
    Linear,
    Power,
    Constant,
    Table,
}

#[cfg(feature = "serde")]
impl TryFrom<WeightDescriptor> for WeightSequence {
    type Error = Error;

    fn try_from(desc: WeightDescriptor) -> Result<Self> {
        match desc.kind {
            WeightKind::Linear => Ok(WeightSequence::Linear),
            WeightKind::Constant => Ok(WeightSequence::Constant),
            WeightKind::Power => match desc.p {
                Some(p) => WeightSequence::power(p),
                None => Err(Error::InvalidParameter {
                    name: "p",
                    reason: "power weights need an exponent `p`".into(),
                }),
            },
            WeightKind::Table => match desc.table {
                Some(values) => WeightSequence::table(values),
                None => Err(Error::InvalidParameter {
                    name: "table",
                    reason: "table weights need a `table` array".into(),
                }),
            },
        }
    }
}

#[cfg(feature = "serde")]
impl From<WeightSequence> for WeightDescriptor {
    fn from(w: WeightSequence) -> Self {
        let (kind, p, table) = match w {
            WeightSequence::Linear => (WeightKind::Linear, None, None),
            WeightSequence::Constant => (WeightKind::Constant, None, None),
            WeightSequence::Power(p) => (WeightKind::Power, Some(p), None),
            WeightSequence::Table(t) => (WeightKind::Table, None, Some(t.values)),
        };
        WeightDescriptor { kind, p, table }
    }
}

/// A finitely supported element `(m_1, …, m_N, 0, 0, …)` of `h_d`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HahnVector {
    values: Vec<f64>,
}

impl HahnVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter {
                name: "values",
                reason: "support length must be positive".into(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "values",
                reason: alloc::format!("entry {} is not finite", pos + 1),
            });
        }
        Ok(HahnVector { values })
    }

    pub fn zeros(len: usize) -> Self {
        HahnVector {
            values: vec![0.0; len.max(1)],
        }
    }

    /// Unit vector `e^(j)` with support length `j`.
    pub fn unit(j: usize) -> Self {
        assert!(j >= 1, "unit vectors are indexed from 1");
        let mut values = vec![0.0; j];
        values[j - 1] = 1.0;
        HahnVector { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `m_n` for `n ≥ 1`, zero past the support.
    pub fn get(&self, n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        self.values.get(n - 1).copied().unwrap_or(0.0)
    }

    pub fn scale(&self, alpha: f64) -> Self {
        HahnVector {
            values: self.values.iter().map(|v| alpha * v).collect(),
        }
    }

    /// Linear combination `a·self + b·other`, padded to the longer support.
    pub fn combine(&self, a: f64, other: &HahnVector, b: f64) -> Self {
        let len = self.len().max(other.len());
        let values = (1..=len).map(|n| a * self.get(n) + b * other.get(n)).collect();
        HahnVector { values }
    }

    pub fn add(&self, other: &HahnVector) -> Self {
        self.combine(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &HahnVector) -> Self {
        self.combine(1.0, other, -1.0)
    }
}

/// `Δm_n = m_n − m_{n+1}` for `n = 1 … N`; the last entry is `m_N`.
pub fn forward_difference(m: &HahnVector) -> Vec<f64> {
    differences(m.values()).collect()
}

fn differences(values: &[f64]) -> impl Iterator<Item = f64> + '_ {
    let next = values.iter().skip(1).chain(core::iter::once(&0.0));
    values.iter().zip(next).map(|(a, b)| a - b)
}

/// `Σ_{n ≥ k} d_n |Δm_n|` over a raw slice of `m_1 … m_N`.
pub(crate) fn tail_norm_slice(values: &[f64], k: usize, d: &WeightSequence) -> f64 {
    differences(values)
        .enumerate()
        .skip(k.saturating_sub(1))
        .map(|(idx, diff)| d.get(idx + 1) * diff.abs())
        .sum()
}

/// `‖m‖_{h_d} = Σ_{n ≥ 1} d_n |m_n − m_{n+1}|`.
pub fn hahn_norm(m: &HahnVector, d: &WeightSequence) -> f64 {
    tail_norm_slice(m.values(), 1, d)
}

/// Tail sum `Σ_{n ≥ k} d_n |Δm_n|` for `k ≥ 1`; zero once `k > N`.
pub fn tail_norm(m: &HahnVector, k: usize, d: &WeightSequence) -> f64 {
    tail_norm_slice(m.values(), k.max(1), d)
}

/// The `r`-section `m^[r] = Σ_{n ≤ r} m_n e^(n)`.
///
/// The result keeps the first `min(r, N)` entries.
pub fn section(m: &HahnVector, r: usize) -> HahnVector {
    let keep = r.min(m.len());
    if keep == 0 {
        return HahnVector::zeros(1);
    }
    HahnVector {
        values: m.values[..keep].to_vec(),
    }
}

/// `‖m − m^[r]‖_{h_d}`; measures how far the section is from `m`.
pub fn ak_defect(m: &HahnVector, r: usize, d: &WeightSequence) -> f64 {
    hahn_norm(&m.sub(&section(m, r)), d)
}

/// Hahn's original norm `Σ n|Δm_n| + sup|m_n|`, kept for reference only.
pub fn hahn_original_norm(m: &HahnVector) -> f64 {
    let sup = m.values().iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    hahn_norm(m, &WeightSequence::Linear) + sup
}
