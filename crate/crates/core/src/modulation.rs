//! Unipolar M-PAM with complement symbols.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How log2(M)-bit labels are assigned to intensity levels.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BitMapping {
    #[default]
    Gray,
    Natural,
}

impl BitMapping {
    /// Label carried by level `index`.
    pub fn label(self, index: usize) -> usize {
        match self {
            BitMapping::Gray => index ^ (index >> 1),
            BitMapping::Natural => index,
        }
    }

    /// Level index carrying `label`.
    pub fn index(self, label: usize) -> usize {
        match self {
            BitMapping::Gray => {
                let mut index = label;
                let mut shift = label >> 1;
                while shift != 0 {
                    index ^= shift;
                    shift >>= 1;
                }
                index
            }
            BitMapping::Natural => label,
        }
    }
}

/// Intensity levels x_i = 2 i Ip / (M + 1), i = 1..M, and their complements
/// 2 Ip - x_i. No level is zero, so an active LED is never dark.
#[derive(Clone, Debug, PartialEq)]
pub struct PamAlphabet {
    order: usize,
    mean_power: f64,
    levels: Vec<f64>,
    complements: Vec<f64>,
    mapping: BitMapping,
}

pub fn build_alphabet(order: usize, mean_power: f64) -> Result<PamAlphabet> {
    PamAlphabet::new(order, mean_power, BitMapping::Gray)
}

impl PamAlphabet {
    pub fn new(order: usize, mean_power: f64, mapping: BitMapping) -> Result<Self> {
        if order < 2 || !order.is_power_of_two() {
            return Err(Error::Modulation(format!(
                "modulation order must be a power of 2 and at least 2, got {order}"
            )));
        }
        if !(mean_power.is_finite() && mean_power > 0.0) {
            return Err(Error::Modulation(format!(
                "mean optical power must be positive, got {mean_power}"
            )));
        }
        let step = 2.0 * mean_power / (order as f64 + 1.0);
        let levels: Vec<f64> = (1..=order).map(|i| i as f64 * step).collect();
        let complements = levels.iter().map(|x| 2.0 * mean_power - x).collect();
        Ok(Self {
            order,
            mean_power,
            levels,
            complements,
            mapping,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.order.trailing_zeros() as usize
    }

    pub fn mean_power(&self) -> f64 {
        self.mean_power
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn complements(&self) -> &[f64] {
        &self.complements
    }

    pub fn mapping(&self) -> BitMapping {
        self.mapping
    }

    /// Spacing between adjacent levels, 2 Ip / (M + 1).
    pub fn spacing(&self) -> f64 {
        2.0 * self.mean_power / (self.order as f64 + 1.0)
    }

    pub fn complement(&self, x: f64) -> f64 {
        2.0 * self.mean_power - x
    }

    /// Index of the level nearest to `x`; ties go to the lower index.
    pub fn slice(&self, x: f64) -> usize {
        let t = x / self.spacing() - 1.0;
        if !(t > 0.0) {
            return 0;
        }
        let last = self.order - 1;
        if t >= last as f64 {
            return last;
        }
        let lo = t.floor() as usize;
        if t - lo as f64 > 0.5 {
            lo + 1
        } else {
            lo
        }
    }

    /// Level index encoded by one log2(M)-bit group (MSB first).
    pub fn index_from_bits(&self, bits: &[u8]) -> usize {
        let label = bits
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
        self.mapping.index(label)
    }

    /// Appends the label bits of level `index` (MSB first).
    pub fn push_bits(&self, index: usize, out: &mut Vec<u8>) {
        let label = self.mapping.label(index);
        let k = self.bits_per_symbol();
        out.extend((0..k).rev().map(|b| ((label >> b) & 1) as u8));
    }

    pub fn bits_to_indices(&self, bits: &[u8]) -> Result<Vec<usize>> {
        let k = self.bits_per_symbol();
        if !bits.len().is_multiple_of(k) {
            return Err(Error::BitLength {
                expected: bits.len().div_ceil(k) * k,
                actual: bits.len(),
            });
        }
        Ok(bits.chunks(k).map(|c| self.index_from_bits(c)).collect())
    }

    pub fn indices_to_bits(&self, indices: &[usize]) -> Vec<u8> {
        let mut out = Vec::with_capacity(indices.len() * self.bits_per_symbol());
        for &i in indices {
            self.push_bits(i, &mut out);
        }
        out
    }
}

/// Maps consecutive log2(M)-bit groups to intensity levels.
pub fn bits_to_symbols(bits: &[u8], alphabet: &PamAlphabet) -> Result<Vec<f64>> {
    Ok(alphabet
        .bits_to_indices(bits)?
        .into_iter()
        .map(|i| alphabet.levels[i])
        .collect())
}

/// Inverse of [`bits_to_symbols`]; each intensity is sliced to its nearest level.
pub fn symbols_to_bits(symbols: &[f64], alphabet: &PamAlphabet) -> Vec<u8> {
    let indices: Vec<usize> = symbols.iter().map(|&x| alphabet.slice(x)).collect();
    alphabet.indices_to_bits(&indices)
}
