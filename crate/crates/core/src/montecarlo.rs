//! Deterministic parallel Monte-Carlo BER sweeps.
//!
//! Every frame draws from its own ChaCha8 stream keyed by
//! (master seed, SNR index, frame index), and the stopping rule is only
//! checked between batches whose sizes do not depend on the worker count,
//! so a sweep is a pure function of its spec.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::link::Link;

/// Transmit SNR Ip^2 / σ^2 in dB to noise std. +inf maps to σ = 0.
pub fn snr_to_sigma(snr_db: f64, mean_power: f64) -> f64 {
    if snr_db == f64::INFINITY {
        return 0.0;
    }
    mean_power / 10f64.powf(snr_db / 20.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSpec {
    pub snr_db: Vec<f64>,
    pub max_frames: u64,
    pub target_errors: u64,
    pub master_seed: u64,
    /// First batch size; later batches double up to 64x this.
    pub batch_size: u64,
    /// Worker threads, 0 for all cores.
    pub workers: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            snr_db: (100..=180).step_by(10).map(f64::from).collect(),
            max_frames: 1_000_000,
            target_errors: 400,
            master_seed: 1,
            batch_size: 1024,
            workers: 0,
        }
    }
}

impl SweepSpec {
    pub const MIN_FRAMES: u64 = 10_000;
    pub const MIN_TARGET_ERRORS: u64 = 100;

    pub fn validate(&self) -> Result<()> {
        if self.snr_db.is_empty() {
            return Err(Error::Sweep("SNR grid is empty".into()));
        }
        if self
            .snr_db
            .iter()
            .any(|s| s.is_nan() || *s == f64::NEG_INFINITY)
        {
            return Err(Error::Sweep("SNR grid contains NaN or -inf".into()));
        }
        if self.snr_db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Sweep("SNR grid must be strictly increasing".into()));
        }
        if self.max_frames < Self::MIN_FRAMES {
            return Err(Error::Sweep(format!(
                "max_frames must be at least {}, got {}",
                Self::MIN_FRAMES,
                self.max_frames
            )));
        }
        if self.target_errors < Self::MIN_TARGET_ERRORS {
            return Err(Error::Sweep(format!(
                "target_errors must be at least {}, got {}",
                Self::MIN_TARGET_ERRORS,
                self.target_errors
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::Sweep("batch_size must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub snr_db: f64,
    pub sigma: f64,
    pub frames: u64,
    pub bit_errors: u64,
    pub index_bit_errors: u64,
    pub frame_errors: u64,
    pub ber: f64,
    pub ber_stderr: f64,
    /// Error rate of the index bits alone.
    pub index_error_rate: f64,
    /// (1 - BER) η.
    pub throughput: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub scheme: String,
    pub frame_bits: usize,
    pub index_bits: usize,
    pub slots: usize,
    pub spectral_efficiency: f64,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    /// SNR (dB) where the BER curve crosses `target`, interpolated on
    /// log10(BER). None if the curve never reaches it.
    pub fn snr_at_ber(&self, target: f64) -> Option<f64> {
        let pts: Vec<&SweepPoint> = self
            .points
            .iter()
            .filter(|p| p.snr_db.is_finite())
            .collect();
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if a.ber >= target && b.ber <= target {
                if b.ber <= 0.0 || a.ber == b.ber {
                    return Some(b.snr_db);
                }
                let (la, lb, lt) = (a.ber.log10(), b.ber.log10(), target.log10());
                return Some(a.snr_db + (la - lt) / (la - lb) * (b.snr_db - a.snr_db));
            }
        }
        pts.first().filter(|p| p.ber <= target).map(|p| p.snr_db)
    }

    pub fn point(&self, snr_db: f64) -> Option<&SweepPoint> {
        self.points.iter().find(|p| p.snr_db == snr_db)
    }
}

/// Progress report after each batch.
#[derive(Clone, Copy, Debug)]
pub struct Progress {
    pub point: usize,
    pub points: usize,
    pub snr_db: f64,
    pub frames: u64,
    pub bit_errors: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of one frame's private stream.
pub fn frame_seed(master: u64, snr_index: usize, frame: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ snr_index as u64) ^ frame)
}

#[derive(Clone, Copy, Default)]
struct Tally {
    bit_errors: u64,
    index_bit_errors: u64,
    frame_errors: u64,
}

impl std::ops::Add for Tally {
    type Output = Tally;
    fn add(self, o: Tally) -> Tally {
        Tally {
            bit_errors: self.bit_errors + o.bit_errors,
            index_bit_errors: self.index_bit_errors + o.index_bit_errors,
            frame_errors: self.frame_errors + o.frame_errors,
        }
    }
}

struct Scratch {
    bits: Vec<u8>,
    detected: Vec<u8>,
    y: Vec<f64>,
}

/// Simulates one frame with its own RNG stream.
fn run_frame(link: &dyn Link, sigma: f64, seed: u64, s: &mut Scratch) -> Tally {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = link.frame_bits();
    s.bits.clear();
    while s.bits.len() < n {
        let w: u64 = rng.random();
        let take = (n - s.bits.len()).min(64);
        s.bits.extend((0..take).map(|b| ((w >> b) & 1) as u8));
    }
    link.modulate(&s.bits, &mut s.y)
        .expect("frame length is fixed by the link");
    if sigma > 0.0 {
        for v in s.y.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *v += sigma * z;
        }
    }
    link.demodulate(&s.y, &mut s.detected);
    let nb = link.index_bits();
    let mut t = Tally::default();
    for (k, (a, b)) in s.bits.iter().zip(&s.detected).enumerate() {
        if a != b {
            t.bit_errors += 1;
            if k < nb {
                t.index_bit_errors += 1;
            }
        }
    }
    t.frame_errors = (t.bit_errors > 0) as u64;
    t
}

pub fn run_sweep(link: &dyn Link, spec: &SweepSpec) -> Result<SweepResult> {
    run_sweep_with_progress(link, spec, |_| {})
}

pub fn run_sweep_with_progress(
    link: &dyn Link,
    spec: &SweepSpec,
    mut progress: impl FnMut(Progress),
) -> Result<SweepResult> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers)
        .build()
        .map_err(|e| Error::Sweep(format!("cannot start worker pool: {e}")))?;
    let frame_bits = link.frame_bits() as u64;
    let index_bits = link.index_bits() as u64;
    let eta = link.spectral_efficiency();
    let mut points = Vec::with_capacity(spec.snr_db.len());
    for (si, &snr_db) in spec.snr_db.iter().enumerate() {
        let sigma = snr_to_sigma(snr_db, link.mean_power());
        let mut frames = 0u64;
        let mut tally = Tally::default();
        let mut batch = spec.batch_size;
        while frames < spec.max_frames && tally.bit_errors < spec.target_errors {
            let end = (frames + batch).min(spec.max_frames);
            let part = pool.install(|| {
                (0..(end - frames) as usize)
                    .into_par_iter()
                    .with_min_len(64)
                    .map_init(
                        || Scratch {
                            bits: Vec::with_capacity(frame_bits as usize),
                            detected: Vec::with_capacity(frame_bits as usize),
                            y: vec![0.0; link.slots()],
                        },
                        |s, i| {
                            let f = frames + i as u64;
                            run_frame(link, sigma, frame_seed(spec.master_seed, si, f), s)
                        },
                    )
                    .reduce(Tally::default, |a, b| a + b)
            });
            tally = tally + part;
            frames = end;
            batch = (batch * 2).min(spec.batch_size * 64);
            progress(Progress {
                point: si,
                points: spec.snr_db.len(),
                snr_db,
                frames,
                bit_errors: tally.bit_errors,
            });
        }
        let nbits = (frames * frame_bits) as f64;
        let ber = tally.bit_errors as f64 / nbits;
        let index_error_rate = if index_bits > 0 {
            tally.index_bit_errors as f64 / (frames * index_bits) as f64
        } else {
            0.0
        };
        points.push(SweepPoint {
            snr_db,
            sigma,
            frames,
            bit_errors: tally.bit_errors,
            index_bit_errors: tally.index_bit_errors,
            frame_errors: tally.frame_errors,
            ber,
            ber_stderr: (ber * (1.0 - ber) / nbits).sqrt(),
            index_error_rate,
            throughput: (1.0 - ber) * eta,
        });
    }
    Ok(SweepResult {
        scheme: link.scheme().to_string(),
        frame_bits: frame_bits as usize,
        index_bits: index_bits as usize,
        slots: link.slots(),
        spectral_efficiency: eta,
        points,
    })
}
