//! Closed-form error bounds, spectral efficiency and achievable rate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::Scheme;
use crate::error::{Error, Result};
use crate::link::{next_index, Link};
use crate::spatial::{binomial, floor_pow2, PatternBook};
use crate::transceiver::StbcSmLink;

/// Gaussian tail probability, Q(x) = erfc(x / sqrt 2) / 2.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// How the union bound averages over the transmitted codeword.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CodewordAveraging {
    /// Exhaustive up to [`CodewordAveraging::EXHAUSTIVE_LIMIT`] codewords,
    /// otherwise 2000 seeded draws.
    #[default]
    Auto,
    Exhaustive,
    MonteCarlo {
        draws: usize,
        seed: u64,
    },
}

impl CodewordAveraging {
    pub const EXHAUSTIVE_LIMIT: u64 = 4096;
    pub const DEFAULT_DRAWS: usize = 2000;
    pub const DEFAULT_SEED: u64 = 0x005e_edb0_u64;
}

/// Pairwise error event of the index detector.
#[derive(Clone, Debug, PartialEq)]
pub struct PairwiseTerm {
    pub pattern: usize,
    pub competitor: usize,
    pub symbols: Vec<usize>,
    /// Noiseless minimizer under the competing pattern.
    pub competitor_symbols: Vec<usize>,
    /// ‖(η/Na)(X h_ℓ - X̂_min h_ℓ̂)‖ including the DC parts.
    pub distance: f64,
}

impl PairwiseTerm {
    pub fn pep(&self, sigma: f64) -> f64 {
        q_function(self.distance / (2.0 * sigma))
    }
}

/// Noiseless minimizer X̂_min of ‖X h_ℓ - X̂ h_ℓ̂‖ and the PEP term.
pub fn pairwise_term(
    link: &StbcSmLink,
    pattern: usize,
    competitor: usize,
    symbols: &[usize],
) -> Result<PairwiseTerm> {
    let n = link.book().len();
    if pattern >= n || competitor >= n {
        return Err(Error::Analysis(format!(
            "pattern index out of range 0..{n}"
        )));
    }
    if pattern == competitor {
        return Err(Error::Analysis(
            "pairwise error needs two different patterns".into(),
        ));
    }
    if symbols.len() != link.code().symbols() {
        return Err(Error::Dimension(format!(
            "expected {} symbols, got {}",
            link.code().symbols(),
            symbols.len()
        )));
    }
    let mut v = vec![0.0; link.slots()];
    link.noiseless(pattern, symbols, &mut v);
    let competitor_symbols = if link.is_decoupled() {
        link.detect_symbols(&v, competitor).symbols
    } else {
        exhaustive_minimizer(link, &v, competitor)
    };
    let distance = link.metric(&v, competitor, &competitor_symbols).sqrt();
    Ok(PairwiseTerm {
        pattern,
        competitor,
        symbols: symbols.to_vec(),
        competitor_symbols,
        distance,
    })
}

/// Brute-force X̂_min over every codeword of `pattern`.
pub fn exhaustive_minimizer(link: &StbcSmLink, y: &[f64], pattern: usize) -> Vec<usize> {
    let mut idx = vec![0; link.code().symbols()];
    let mut best = (f64::INFINITY, idx.clone());
    loop {
        let d = link.metric(y, pattern, &idx);
        if d < best.0 {
            best = (d, idx.clone());
        }
        if !next_index(&mut idx, link.alphabet().order()) {
            break;
        }
    }
    best.1
}

/// PEP of deciding pattern ℓ̂ when (ℓ, X) was sent.
pub fn pep_index(
    link: &StbcSmLink,
    pattern: usize,
    competitor: usize,
    symbols: &[usize],
    sigma: f64,
) -> Result<f64> {
    check_sigma(sigma)?;
    Ok(pairwise_term(link, pattern, competitor, symbols)?.pep(sigma))
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::Analysis(format!(
            "noise std must be positive and finite, got {sigma}"
        )));
    }
    Ok(())
}

/// Bound evaluator with the σ-independent distance table precomputed.
#[derive(Clone, Debug)]
pub struct BoundCalculator<'a> {
    link: &'a StbcSmLink,
    averaging: CodewordAveraging,
    codewords: usize,
    /// (weight, distance): weight folds D(ℓ, ℓ̂), the 1/(N 2^N) prefactor
    /// and the codeword average.
    terms: Vec<(f64, f64)>,
}

impl<'a> BoundCalculator<'a> {
    pub fn new(link: &'a StbcSmLink, averaging: CodewordAveraging) -> Result<Self> {
        let nsym = link.code().symbols();
        let m = link.alphabet().order();
        let total = link.codewords_per_pattern();
        let averaging = match averaging {
            CodewordAveraging::Auto if total <= CodewordAveraging::EXHAUSTIVE_LIMIT => {
                CodewordAveraging::Exhaustive
            }
            CodewordAveraging::Auto => CodewordAveraging::MonteCarlo {
                draws: CodewordAveraging::DEFAULT_DRAWS,
                seed: CodewordAveraging::DEFAULT_SEED,
            },
            CodewordAveraging::Exhaustive if total > CodewordAveraging::EXHAUSTIVE_LIMIT => {
                return Err(Error::Analysis(format!(
                    "exhaustive averaging over {total} codewords exceeds the limit of {}",
                    CodewordAveraging::EXHAUSTIVE_LIMIT
                )))
            }
            CodewordAveraging::MonteCarlo { draws: 0, .. } => {
                return Err(Error::Analysis("codeword draws must be positive".into()))
            }
            a => a,
        };
        let codewords: Vec<Vec<usize>> = match averaging {
            CodewordAveraging::MonteCarlo { draws, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..draws)
                    .map(|_| (0..nsym).map(|_| rng.random_range(0..m)).collect())
                    .collect()
            }
            _ => {
                let mut all = Vec::with_capacity(total as usize);
                let mut idx = vec![0; nsym];
                loop {
                    all.push(idx.clone());
                    if !next_index(&mut idx, m) {
                        break;
                    }
                }
                all
            }
        };
        let book = link.book();
        let nb = book.index_bits();
        let mut terms = Vec::new();
        if nb > 0 {
            let prefactor = 1.0 / (nb as f64 * book.len() as f64 * codewords.len() as f64);
            for l in 0..book.len() {
                for lh in (0..book.len()).filter(|&lh| lh != l) {
                    let w = book.hamming(l, lh) as f64 * prefactor;
                    for x in &codewords {
                        let t = pairwise_term(link, l, lh, x)?;
                        terms.push((w, t.distance));
                    }
                }
            }
        }
        Ok(Self {
            link,
            averaging,
            codewords: codewords.len(),
            terms,
        })
    }

    pub fn averaging(&self) -> CodewordAveraging {
        self.averaging
    }

    pub fn codewords_averaged(&self) -> usize {
        self.codewords
    }

    /// Union bound on the index-bit error probability.
    pub fn union_bound_index(&self, sigma: f64) -> Result<f64> {
        check_sigma(sigma)?;
        Ok(self
            .terms
            .iter()
            .map(|&(w, d)| w * q_function(d / (2.0 * sigma)))
            .sum())
    }

    /// PAM bit error probability given a correct index decision, averaged
    /// over patterns.
    pub fn ber_symbols_given_index(&self, sigma: f64) -> Result<f64> {
        check_sigma(sigma)?;
        let alph = self.link.alphabet();
        let m = alph.order() as f64;
        let prefactor = 2.0 * (m - 1.0) / (m * m.log2());
        let c = self.link.scale();
        let channels = self.link.channels();
        let sum: f64 = channels
            .iter()
            .map(|h| {
                let arg = c * h.norm_sqr().sqrt() * alph.mean_power() / ((m + 1.0) * sigma);
                prefactor * q_function(arg)
            })
            .sum();
        Ok(sum / channels.len() as f64)
    }

    /// P_ℓ + P_X (1 - P_ℓ), clamped to [0, 1].
    pub fn ber_upper_bound(&self, sigma: f64) -> Result<f64> {
        let pl = self.union_bound_index(sigma)?.clamp(0.0, 1.0);
        let px = self.ber_symbols_given_index(sigma)?;
        Ok((pl + px * (1.0 - pl)).clamp(0.0, 1.0))
    }
}

/// Bits per channel use of a scheme.
pub fn spectral_efficiency(scheme: Scheme, nt: usize, na: usize, m: usize) -> Result<f64> {
    let book = PatternBook::new(nt, na)?;
    if m < 2 || !m.is_power_of_two() {
        return Err(Error::Modulation(format!(
            "modulation order must be a power of 2 and at least 2, got {m}"
        )));
    }
    let nb = book.index_bits() as f64;
    let k = m.trailing_zeros() as f64;
    Ok(match scheme {
        Scheme::StbcSm => {
            if !(2..=8).contains(&na) {
                return Err(Error::Code(format!(
                    "OSTBC supports 2..=8 active LEDs, got {na}"
                )));
            }
            let t = na.next_power_of_two() as f64;
            (t * k + nb) / t
        }
        Scheme::QostbcSm => {
            if na != 2 {
                return Err(Error::Code(format!("QOSTBC needs 2 active LEDs, got {na}")));
            }
            (4.0 * k + nb) / 2.0
        }
        Scheme::Masm => na as f64 * k + nb,
        Scheme::RcSm => k + nb,
    })
}

/// Index bits available from C(nt, na) patterns.
pub fn index_bits(nt: usize, na: usize) -> u32 {
    floor_pow2(binomial(nt, na).max(1)).trailing_zeros()
}

/// Error-free throughput (1 - BER) η.
pub fn achievable_rate(eta: f64, ber: f64) -> f64 {
    (1.0 - ber.clamp(0.0, 1.0)) * eta
}
