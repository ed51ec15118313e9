//! Single-slot reference schemes: multiple-active SM and repetition-coded SM.

use crate::error::{Error, Result};
use crate::geometry::{channels_for_book, ChannelVector, OpticsConfig, RoomConfig};
use crate::link::{bits_to_usize, next_index, Link};
use crate::modulation::PamAlphabet;
use crate::spatial::{ActivationPattern, PatternBook};
use crate::transceiver::Detection;

#[derive(Clone, Debug, PartialEq)]
pub struct MasmFrame {
    pub pattern: ActivationPattern,
    pub symbols: Vec<usize>,
    pub bits: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RcsmFrame {
    pub pattern: ActivationPattern,
    pub symbol: usize,
    pub bits: Vec<u8>,
}

#[derive(Clone, Debug)]
struct Common {
    book: PatternBook,
    alphabet: PamAlphabet,
    channels: Vec<ChannelVector>,
    scale: f64,
}

impl Common {
    fn new(
        book: PatternBook,
        alphabet: PamAlphabet,
        channels: Vec<ChannelVector>,
        responsivity: f64,
    ) -> Result<Self> {
        if channels.len() != book.len() {
            return Err(Error::Dimension(format!(
                "{} patterns but {} channel vectors",
                book.len(),
                channels.len()
            )));
        }
        if let Some(h) = channels.iter().find(|h| h.len() != book.na()) {
            return Err(Error::Dimension(format!(
                "pattern {} has {} gains, expected {}",
                h.pattern_id,
                h.len(),
                book.na()
            )));
        }
        if !(responsivity.is_finite() && responsivity > 0.0) {
            return Err(Error::Geometry(format!(
                "responsivity must be positive, got {responsivity}"
            )));
        }
        Ok(Self {
            scale: responsivity / book.na() as f64,
            book,
            alphabet,
            channels,
        })
    }

    fn from_geometry(
        room: &RoomConfig,
        optics: &OpticsConfig,
        book: PatternBook,
        alphabet: PamAlphabet,
    ) -> Result<Self> {
        room.validate()?;
        optics.validate()?;
        if room.nt() != book.nt() {
            return Err(Error::Dimension(format!(
                "room has {} LEDs, pattern book expects {}",
                room.nt(),
                book.nt()
            )));
        }
        let channels = channels_for_book(room, optics, &book)?;
        Self::new(book, alphabet, channels, optics.responsivity)
    }

    fn split(&self, bits: &[u8], symbols: usize) -> Result<(usize, Vec<usize>)> {
        let nb = self.book.index_bits();
        let expected = nb + symbols * self.alphabet.bits_per_symbol();
        if bits.len() != expected {
            return Err(Error::BitLength {
                expected,
                actual: bits.len(),
            });
        }
        Ok((
            bits_to_usize(&bits[..nb]),
            self.alphabet.bits_to_indices(&bits[nb..])?,
        ))
    }

    fn to_bits(&self, det: &Detection, out: &mut Vec<u8>) {
        out.clear();
        out.extend(self.book.label_bits(det.pattern));
        for &i in &det.symbols {
            self.alphabet.push_bits(i, out);
        }
    }
}

/// Na independent PAM symbols, one per active LED, in a single slot.
#[derive(Clone, Debug)]
pub struct MasmLink {
    inner: Common,
}

impl MasmLink {
    pub fn new(
        book: PatternBook,
        alphabet: PamAlphabet,
        channels: Vec<ChannelVector>,
        responsivity: f64,
    ) -> Result<Self> {
        Ok(Self {
            inner: Common::new(book, alphabet, channels, responsivity)?,
        })
    }

    pub fn from_geometry(
        room: &RoomConfig,
        optics: &OpticsConfig,
        book: PatternBook,
        alphabet: PamAlphabet,
    ) -> Result<Self> {
        Ok(Self {
            inner: Common::from_geometry(room, optics, book, alphabet)?,
        })
    }

    pub fn book(&self) -> &PatternBook {
        &self.inner.book
    }

    pub fn alphabet(&self) -> &PamAlphabet {
        &self.inner.alphabet
    }

    pub fn channels(&self) -> &[ChannelVector] {
        &self.inner.channels
    }

    pub fn hypotheses(&self) -> u64 {
        let c = &self.inner;
        (c.alphabet.order() as u64).pow(c.book.na() as u32) * c.book.len() as u64
    }

    pub fn transmit(&self, bits: &[u8]) -> Result<MasmFrame> {
        let (p, symbols) = self.inner.split(bits, self.inner.book.na())?;
        Ok(MasmFrame {
            pattern: self.inner.book.patterns()[p].clone(),
            symbols,
            bits: bits.to_vec(),
        })
    }

    /// (η/Na) h^T x for one hypothesis.
    pub fn noiseless(&self, pattern: usize, symbols: &[usize]) -> f64 {
        let c = &self.inner;
        let levels = c.alphabet.levels();
        let s: f64 = c.channels[pattern]
            .gains
            .iter()
            .zip(symbols)
            .map(|(h, &i)| h * levels[i])
            .sum();
        c.scale * s
    }

    pub fn detect(&self, y: f64) -> Detection {
        let c = &self.inner;
        let na = c.book.na();
        let mut best = Detection {
            pattern: 0,
            symbols: vec![0; na],
            metric: f64::INFINITY,
            evaluations: 0,
        };
        let mut idx = vec![0usize; na];
        for p in 0..c.book.len() {
            loop {
                let e = y - self.noiseless(p, &idx);
                best.evaluations += 1;
                if e * e < best.metric {
                    best.metric = e * e;
                    best.pattern = p;
                    best.symbols.copy_from_slice(&idx);
                }
                if !next_index(&mut idx, c.alphabet.order()) {
                    break;
                }
            }
        }
        best
    }
}

impl Link for MasmLink {
    fn scheme(&self) -> &'static str {
        "masm"
    }

    fn frame_bits(&self) -> usize {
        let c = &self.inner;
        c.book.index_bits() + c.book.na() * c.alphabet.bits_per_symbol()
    }

    fn index_bits(&self) -> usize {
        self.inner.book.index_bits()
    }

    fn slots(&self) -> usize {
        1
    }

    fn mean_power(&self) -> f64 {
        self.inner.alphabet.mean_power()
    }

    fn modulate(&self, bits: &[u8], y: &mut [f64]) -> Result<()> {
        let (p, symbols) = self.inner.split(bits, self.inner.book.na())?;
        y[0] = self.noiseless(p, &symbols);
        Ok(())
    }

    fn demodulate(&self, y: &[f64], bits: &mut Vec<u8>) {
        let det = self.detect(y[0]);
        self.inner.to_bits(&det, bits);
    }
}

/// One PAM symbol repeated on every active LED, in a single slot.
#[derive(Clone, Debug)]
pub struct RcsmLink {
    inner: Common,
    sums: Vec<f64>,
}

impl RcsmLink {
    pub fn new(
        book: PatternBook,
        alphabet: PamAlphabet,
        channels: Vec<ChannelVector>,
        responsivity: f64,
    ) -> Result<Self> {
        Ok(Self::wrap(Common::new(
            book,
            alphabet,
            channels,
            responsivity,
        )?))
    }

    pub fn from_geometry(
        room: &RoomConfig,
        optics: &OpticsConfig,
        book: PatternBook,
        alphabet: PamAlphabet,
    ) -> Result<Self> {
        Ok(Self::wrap(Common::from_geometry(
            room, optics, book, alphabet,
        )?))
    }

    fn wrap(inner: Common) -> Self {
        let sums = inner
            .channels
            .iter()
            .map(|h| h.gains.iter().sum())
            .collect();
        Self { inner, sums }
    }

    pub fn book(&self) -> &PatternBook {
        &self.inner.book
    }

    pub fn alphabet(&self) -> &PamAlphabet {
        &self.inner.alphabet
    }

    pub fn hypotheses(&self) -> u64 {
        (self.inner.alphabet.order() * self.inner.book.len()) as u64
    }

    pub fn transmit(&self, bits: &[u8]) -> Result<RcsmFrame> {
        let (p, symbols) = self.inner.split(bits, 1)?;
        Ok(RcsmFrame {
            pattern: self.inner.book.patterns()[p].clone(),
            symbol: symbols[0],
            bits: bits.to_vec(),
        })
    }

    pub fn noiseless(&self, pattern: usize, symbol: usize) -> f64 {
        self.inner.scale * self.sums[pattern] * self.inner.alphabet.levels()[symbol]
    }

    pub fn detect(&self, y: f64) -> Detection {
        let c = &self.inner;
        let mut best = Detection {
            pattern: 0,
            symbols: vec![0],
            metric: f64::INFINITY,
            evaluations: 0,
        };
        for p in 0..c.book.len() {
            for i in 0..c.alphabet.order() {
                let e = y - self.noiseless(p, i);
                best.evaluations += 1;
                if e * e < best.metric {
                    best.metric = e * e;
                    best.pattern = p;
                    best.symbols[0] = i;
                }
            }
        }
        best
    }
}

impl Link for RcsmLink {
    fn scheme(&self) -> &'static str {
        "rc-sm"
    }

    fn frame_bits(&self) -> usize {
        self.inner.book.index_bits() + self.inner.alphabet.bits_per_symbol()
    }

    fn index_bits(&self) -> usize {
        self.inner.book.index_bits()
    }

    fn slots(&self) -> usize {
        1
    }

    fn mean_power(&self) -> f64 {
        self.inner.alphabet.mean_power()
    }

    fn modulate(&self, bits: &[u8], y: &mut [f64]) -> Result<()> {
        let (p, symbols) = self.inner.split(bits, 1)?;
        y[0] = self.noiseless(p, symbols[0]);
        Ok(())
    }

    fn demodulate(&self, y: &[f64], bits: &mut Vec<u8>) {
        let det = self.detect(y[0]);
        self.inner.to_bits(&det, bits);
    }
}
