//! LED activation patterns and their index-bit labels.

use std::fmt;

use crate::error::{Error, Result};

/// An ordered set of active LEDs (0-based, ascending) plus its label in
/// the pattern book.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ActivationPattern {
    id: usize,
    leds: Vec<usize>,
}

impl ActivationPattern {
    pub fn new(id: usize, mut leds: Vec<usize>) -> Self {
        leds.sort_unstable();
        Self { id, leds }
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn leds(&self) -> &[usize] {
        &self.leds
    }
}

impl fmt::Display for ActivationPattern {
    /// 1-based LED set, e.g. `{1,2}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, led) in self.leds.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", led + 1)?;
        }
        write!(f, "}}")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PatternBook {
    nt: usize,
    na: usize,
    patterns: Vec<ActivationPattern>,
    index_bits: usize,
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Largest power of two not exceeding `n` (n >= 1).
pub fn floor_pow2(n: u64) -> u64 {
    1u64 << (63 - n.leading_zeros())
}

/// The first `floor_pow2(C(nt, na))` Na-subsets of {1..Nt} in lexicographic
/// order, labelled in natural binary.
pub fn build_patternbook(nt: usize, na: usize) -> Result<PatternBook> {
    PatternBook::new(nt, na)
}

impl PatternBook {
    pub const MAX_LEDS: usize = 8;

    pub fn new(nt: usize, na: usize) -> Result<Self> {
        check_sizes(nt, na)?;
        let count = floor_pow2(binomial(nt, na)) as usize;
        let patterns = Combinations::new(nt, na)
            .take(count)
            .enumerate()
            .map(|(id, leds)| ActivationPattern::new(id, leds))
            .collect();
        Ok(Self::from_parts(nt, na, patterns))
    }

    /// User-supplied pattern list (0-based LED indices), labelled in list order.
    pub fn with_patterns(nt: usize, na: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        check_sizes(nt, na)?;
        if sets.is_empty() || !sets.len().is_power_of_two() {
            return Err(Error::Pattern(format!(
                "pattern count must be a power of 2, got {}",
                sets.len()
            )));
        }
        let patterns: Vec<ActivationPattern> = sets
            .into_iter()
            .enumerate()
            .map(|(id, leds)| ActivationPattern::new(id, leds))
            .collect();
        for p in &patterns {
            if p.leds.len() != na {
                return Err(Error::Pattern(format!("{p} does not have {na} LEDs")));
            }
            if p.leds.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Pattern(format!("{p} repeats an LED")));
            }
            if p.leds.iter().any(|&l| l >= nt) {
                return Err(Error::Pattern(format!("{p} names an LED beyond {nt}")));
            }
        }
        for (i, p) in patterns.iter().enumerate() {
            if patterns[..i].iter().any(|q| q.leds == p.leds) {
                return Err(Error::Pattern(format!("{p} listed twice")));
            }
        }
        Ok(Self::from_parts(nt, na, patterns))
    }

    fn from_parts(nt: usize, na: usize, patterns: Vec<ActivationPattern>) -> Self {
        let index_bits = patterns.len().trailing_zeros() as usize;
        Self {
            nt,
            na,
            patterns,
            index_bits,
        }
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn na(&self) -> usize {
        self.na
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn index_bits(&self) -> usize {
        self.index_bits
    }

    pub fn patterns(&self) -> &[ActivationPattern] {
        &self.patterns
    }

    pub fn pattern(&self, id: usize) -> Option<&ActivationPattern> {
        self.patterns.get(id)
    }

    /// Pattern selected by `index_bits()` bits, MSB first.
    pub fn index_bits_to_pattern(&self, bits: &[u8]) -> Result<&ActivationPattern> {
        if bits.len() != self.index_bits {
            return Err(Error::BitLength {
                expected: self.index_bits,
                actual: bits.len(),
            });
        }
        let id = bits
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
        Ok(&self.patterns[id])
    }

    pub fn pattern_to_bits(&self, pattern: &ActivationPattern) -> Result<Vec<u8>> {
        let id = self
            .patterns
            .iter()
            .position(|p| p.leds == pattern.leds)
            .ok_or_else(|| Error::Pattern(format!("{pattern} is not in the pattern book")))?;
        Ok(self.label_bits(id))
    }

    pub fn label_bits(&self, id: usize) -> Vec<u8> {
        (0..self.index_bits)
            .rev()
            .map(|b| ((id >> b) & 1) as u8)
            .collect()
    }

    /// Number of differing label bits between two patterns.
    pub fn hamming(&self, a: usize, b: usize) -> u32 {
        (a ^ b).count_ones()
    }
}

fn check_sizes(nt: usize, na: usize) -> Result<()> {
    if nt == 0 || nt > PatternBook::MAX_LEDS {
        return Err(Error::Pattern(format!(
            "Nt must be in 1..={}, got {nt}",
            PatternBook::MAX_LEDS
        )));
    }
    if na == 0 || na > nt {
        return Err(Error::Pattern(format!(
            "Na must be in 1..=Nt ({nt}), got {na}"
        )));
    }
    Ok(())
}

/// Lexicographic k-subsets of 0..n.
struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            current: (k <= n).then(|| (0..k).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}
