//! Common frame-level interface shared by STBC-SM and the baselines.

use crate::error::Result;

/// A complete transmitter/receiver pair over a fixed channel table.
///
/// `modulate` produces the noiseless received block for one frame of bits;
/// the Monte-Carlo engine adds noise and hands the block to `demodulate`.
pub trait Link: Send + Sync {
    fn scheme(&self) -> &'static str;

    /// Bits per frame, index bits first.
    fn frame_bits(&self) -> usize;

    fn index_bits(&self) -> usize;

    /// Channel uses per frame.
    fn slots(&self) -> usize;

    /// Average optical power Ip of the alphabet.
    fn mean_power(&self) -> f64;

    /// Bits per channel use.
    fn spectral_efficiency(&self) -> f64 {
        self.frame_bits() as f64 / self.slots() as f64
    }

    /// Writes the noiseless photocurrents of one frame into `y` (length `slots()`).
    fn modulate(&self, bits: &[u8], y: &mut [f64]) -> Result<()>;

    /// Detected frame bits, written into `bits` (cleared first).
    fn demodulate(&self, y: &[f64], bits: &mut Vec<u8>);
}

/// Lexicographic odometer over `len` digits in base `base`.
pub(crate) fn next_index(idx: &mut [usize], base: usize) -> bool {
    for d in idx.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

pub(crate) fn bits_to_usize(bits: &[u8]) -> usize {
    bits.iter()
        .fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize)
}
