//! STBC-SM transmitter, AWGN channel, and the joint and two-step detectors.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::codebook::{effective_channel, CodeStructure};
use crate::error::{Error, Result};
use crate::geometry::{channels_for_book, ChannelVector, OpticsConfig, RoomConfig};
use crate::link::{bits_to_usize, next_index, Link};
use crate::modulation::PamAlphabet;
use crate::spatial::{ActivationPattern, PatternBook};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Detector {
    /// Exhaustive search over every pattern and codeword.
    JointMl,
    /// Pattern first, then per-symbol (or per-pair) decisions.
    #[default]
    TwoStep,
}

/// Detector output. `evaluations` counts metric evaluations spent on the frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Detection {
    pub pattern: usize,
    pub symbols: Vec<usize>,
    pub metric: f64,
    pub evaluations: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TxBlock {
    pub pattern: ActivationPattern,
    pub symbols: Vec<usize>,
    pub codeword: DMatrix<f64>,
    pub bits: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RxBlock {
    pub y: DVector<f64>,
    pub sigma: f64,
}

#[derive(Clone, Debug)]
struct PatternState {
    h_eff: DMatrix<f64>,
    dc: DVector<f64>,
    gram: DMatrix<f64>,
}

#[derive(Clone, Debug)]
pub struct StbcSmLink {
    book: PatternBook,
    code: CodeStructure,
    alphabet: PamAlphabet,
    channels: Vec<ChannelVector>,
    responsivity: f64,
    scale: f64,
    states: Vec<PatternState>,
    groups: Vec<Vec<usize>>,
    decoupled: bool,
    detector: Detector,
}

impl StbcSmLink {
    pub fn new(
        book: PatternBook,
        code: CodeStructure,
        alphabet: PamAlphabet,
        channels: Vec<ChannelVector>,
        responsivity: f64,
        detector: Detector,
    ) -> Result<Self> {
        if code.leds() != book.na() {
            return Err(Error::Code(format!(
                "code drives {} LEDs but patterns activate {}",
                code.leds(),
                book.na()
            )));
        }
        if channels.len() != book.len() {
            return Err(Error::Dimension(format!(
                "{} patterns but {} channel vectors",
                book.len(),
                channels.len()
            )));
        }
        if !(responsivity.is_finite() && responsivity > 0.0) {
            return Err(Error::Geometry(format!(
                "responsivity must be positive, got {responsivity}"
            )));
        }
        let mut states = Vec::with_capacity(channels.len());
        for h in &channels {
            let eff = effective_channel(&code, h, alphabet.mean_power(), responsivity)?;
            let gram = eff.h_eff.transpose() * &eff.h_eff;
            states.push(PatternState {
                h_eff: eff.h_eff,
                dc: eff.dc,
                gram,
            });
        }
        let groups = code.decoupled_groups();
        let decoupled = states.iter().all(|s| groups_decouple(&s.gram, &groups));
        Ok(Self {
            scale: responsivity / code.leds() as f64,
            book,
            code,
            alphabet,
            channels,
            responsivity,
            states,
            groups,
            decoupled,
            detector,
        })
    }

    /// Link over the LoS channels of `room`.
    pub fn from_geometry(
        room: &RoomConfig,
        optics: &OpticsConfig,
        book: PatternBook,
        code: CodeStructure,
        alphabet: PamAlphabet,
        detector: Detector,
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
        Self::new(
            book,
            code,
            alphabet,
            channels,
            optics.responsivity,
            detector,
        )
    }

    pub fn book(&self) -> &PatternBook {
        &self.book
    }

    pub fn code(&self) -> &CodeStructure {
        &self.code
    }

    pub fn alphabet(&self) -> &PamAlphabet {
        &self.alphabet
    }

    pub fn channels(&self) -> &[ChannelVector] {
        &self.channels
    }

    pub fn responsivity(&self) -> f64 {
        self.responsivity
    }

    pub fn detector(&self) -> Detector {
        self.detector
    }

    pub fn with_detector(mut self, detector: Detector) -> Self {
        self.detector = detector;
        self
    }

    /// η / Na.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Whether the two-step detector can split every pattern's search into
    /// the code's independent symbol groups.
    pub fn is_decoupled(&self) -> bool {
        self.decoupled
    }

    pub fn effective(&self, pattern: usize) -> (&DMatrix<f64>, &DVector<f64>) {
        let s = &self.states[pattern];
        (&s.h_eff, &s.dc)
    }

    pub fn symbol_bits(&self) -> usize {
        self.code.symbols() * self.alphabet.bits_per_symbol()
    }

    /// Codewords per pattern, M^Nsym.
    pub fn codewords_per_pattern(&self) -> u64 {
        (self.alphabet.order() as u64).pow(self.code.symbols() as u32)
    }

    pub fn joint_ml_evaluations(&self) -> u64 {
        self.codewords_per_pattern() * self.book.len() as u64
    }

    pub fn two_step_evaluations(&self) -> u64 {
        let m = self.alphabet.order() as u64;
        let stage2: u64 = if self.decoupled {
            self.groups
                .iter()
                .map(|g| if g.len() == 1 { m } else { g.len() as u64 * m })
                .sum()
        } else {
            self.codewords_per_pattern()
        };
        stage2 + self.book.len() as u64
    }

    pub fn transmit(&self, bits: &[u8]) -> Result<TxBlock> {
        let (pattern, symbols) = self.split_bits(bits)?;
        let x: Vec<f64> = symbols.iter().map(|&i| self.alphabet.levels()[i]).collect();
        let codeword = self.code.instantiate(&x, self.alphabet.mean_power())?;
        Ok(TxBlock {
            pattern: self.book.patterns()[pattern].clone(),
            symbols,
            codeword,
            bits: bits.to_vec(),
        })
    }

    /// y = (η/Na) X h + z with i.i.d. N(0, sigma^2) per slot.
    pub fn apply_channel<R: Rng + ?Sized>(
        &self,
        tx: &TxBlock,
        sigma: f64,
        rng: &mut R,
    ) -> Result<RxBlock> {
        if !(sigma >= 0.0) {
            return Err(Error::Dimension(format!(
                "noise std must be >= 0, got {sigma}"
            )));
        }
        let h = DVector::from_column_slice(&self.channels[tx.pattern.id()].gains);
        let mut y = &tx.codeword * h * self.scale;
        if sigma > 0.0 {
            for v in y.iter_mut() {
                let z: f64 = rng.sample(StandardNormal);
                *v += sigma * z;
            }
        }
        Ok(RxBlock { y, sigma })
    }

    fn split_bits(&self, bits: &[u8]) -> Result<(usize, Vec<usize>)> {
        let nb = self.book.index_bits();
        let expected = nb + self.symbol_bits();
        if bits.len() != expected {
            return Err(Error::BitLength {
                expected,
                actual: bits.len(),
            });
        }
        let pattern = bits_to_usize(&bits[..nb]);
        let symbols = self.alphabet.bits_to_indices(&bits[nb..])?;
        Ok((pattern, symbols))
    }

    /// Noiseless received block dc + (η/Na) H_eff x.
    pub fn noiseless(&self, pattern: usize, symbols: &[usize], out: &mut [f64]) {
        let s = &self.states[pattern];
        let levels = self.alphabet.levels();
        for (t, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (k, &i) in symbols.iter().enumerate() {
                acc += s.h_eff[(t, k)] * levels[i];
            }
            *o = s.dc[t] + self.scale * acc;
        }
    }

    /// ‖y - (η/Na) X h_ℓ‖² for one hypothesis.
    pub fn metric(&self, y: &[f64], pattern: usize, symbols: &[usize]) -> f64 {
        let s = &self.states[pattern];
        let levels = self.alphabet.levels();
        let mut total = 0.0;
        for (t, &yt) in y.iter().enumerate() {
            let mut acc = 0.0;
            for (k, &i) in symbols.iter().enumerate() {
                acc += s.h_eff[(t, k)] * levels[i];
            }
            let e = yt - s.dc[t] - self.scale * acc;
            total += e * e;
        }
        total
    }

    pub fn detect(&self, y: &[f64], detector: Detector) -> Detection {
        match detector {
            Detector::JointMl => self.detect_joint_ml(y),
            Detector::TwoStep => self.detect_two_step(y),
        }
    }

    pub fn detect_joint_ml(&self, y: &[f64]) -> Detection {
        let nsym = self.code.symbols();
        let m = self.alphabet.order();
        let mut best = Detection {
            pattern: 0,
            symbols: vec![0; nsym],
            metric: f64::INFINITY,
            evaluations: 0,
        };
        let mut idx = vec![0usize; nsym];
        for p in 0..self.book.len() {
            loop {
                let d = self.metric(y, p, &idx);
                best.evaluations += 1;
                if d < best.metric {
                    best.metric = d;
                    best.pattern = p;
                    best.symbols.copy_from_slice(&idx);
                }
                if !next_index(&mut idx, m) {
                    break;
                }
            }
        }
        best
    }

    /// Pattern metric with the codeword minimized out, for every pattern.
    pub fn stage1_metrics(&self, y: &[f64]) -> Vec<f64> {
        (0..self.book.len())
            .map(|p| {
                let (symbols, _) = self.inner_minimizer(y, p);
                self.metric(y, p, &symbols)
            })
            .collect()
    }

    pub fn detect_two_step(&self, y: &[f64]) -> Detection {
        let mut pattern = 0;
        let mut best = f64::INFINITY;
        for (p, d) in self.stage1_metrics(y).into_iter().enumerate() {
            if d < best {
                best = d;
                pattern = p;
            }
        }
        let mut det = self.detect_symbols(y, pattern);
        det.evaluations += self.book.len() as u64;
        det
    }

    /// Symbol decisions for a known pattern.
    pub fn detect_symbols(&self, y: &[f64], pattern: usize) -> Detection {
        let (symbols, evaluations) = self.inner_minimizer(y, pattern);
        Detection {
            metric: self.metric(y, pattern, &symbols),
            pattern,
            symbols,
            evaluations,
        }
    }

    /// Exact codeword minimizer for one pattern and the number of candidate
    /// evaluations it took.
    fn inner_minimizer(&self, y: &[f64], pattern: usize) -> (Vec<usize>, u64) {
        let nsym = self.code.symbols();
        if !self.decoupled {
            let mut idx = vec![0usize; nsym];
            let mut best = (f64::INFINITY, idx.clone());
            let mut evals = 0;
            loop {
                let d = self.metric(y, pattern, &idx);
                evals += 1;
                if d < best.0 {
                    best = (d, idx.clone());
                }
                if !next_index(&mut idx, self.alphabet.order()) {
                    break;
                }
            }
            return (best.1, evals);
        }
        let s = &self.states[pattern];
        // matched filter in symbol units: H^T (y - dc) / (η/Na)
        let mut mf = vec![0.0; nsym];
        for (k, v) in mf.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (t, &yt) in y.iter().enumerate() {
                acc += s.h_eff[(t, k)] * (yt - s.dc[t]);
            }
            *v = acc / self.scale;
        }
        let levels = self.alphabet.levels();
        let mut symbols = vec![0usize; nsym];
        let mut evals = 0;
        for g in &self.groups {
            match g.as_slice() {
                [k] => {
                    let (gkk, mk) = (s.gram[(*k, *k)], mf[*k]);
                    let mut best = f64::INFINITY;
                    for (i, &x) in levels.iter().enumerate() {
                        let f = gkk * x * x - 2.0 * mk * x;
                        evals += 1;
                        if f < best {
                            best = f;
                            symbols[*k] = i;
                        }
                    }
                }
                [i, j] => {
                    let (a, b, e) = self.pair_search(&s.gram, &mf, *i, *j);
                    symbols[*i] = a;
                    symbols[*j] = b;
                    evals += e;
                }
                _ => unreachable!("groups have one or two symbols"),
            }
        }
        (symbols, evals)
    }

    /// Exact minimizer of x^T G x - 2 m^T x over a symbol pair: each symbol
    /// in turn runs over the alphabet while the partner is sliced.
    fn pair_search(&self, g: &DMatrix<f64>, mf: &[f64], i: usize, j: usize) -> (usize, usize, u64) {
        let levels = self.alphabet.levels();
        let f = |xi: f64, xj: f64| {
            g[(i, i)] * xi * xi + 2.0 * g[(i, j)] * xi * xj + g[(j, j)] * xj * xj
                - 2.0 * mf[i] * xi
                - 2.0 * mf[j] * xj
        };
        let mut best = (f64::INFINITY, 0usize, 0usize);
        let mut consider = |v: f64, a: usize, b: usize| {
            if v < best.0 || (v == best.0 && (a, b) < (best.1, best.2)) {
                best = (v, a, b);
            }
        };
        for (a, &xi) in levels.iter().enumerate() {
            let b = self.alphabet.slice((mf[j] - g[(i, j)] * xi) / g[(j, j)]);
            consider(f(xi, levels[b]), a, b);
        }
        for (b, &xj) in levels.iter().enumerate() {
            let a = self.alphabet.slice((mf[i] - g[(i, j)] * xj) / g[(i, i)]);
            consider(f(levels[a], xj), a, b);
        }
        (best.1, best.2, 2 * levels.len() as u64)
    }

    pub fn detection_bits(&self, det: &Detection, out: &mut Vec<u8>) {
        out.clear();
        out.extend(self.book.label_bits(det.pattern));
        for &i in &det.symbols {
            self.alphabet.push_bits(i, out);
        }
    }
}

fn groups_decouple(gram: &DMatrix<f64>, groups: &[Vec<usize>]) -> bool {
    let scale = gram.diagonal().amax().max(f64::MIN_POSITIVE);
    let group_of = |k: usize| groups.iter().position(|g| g.contains(&k));
    for r in 0..gram.nrows() {
        for c in 0..gram.ncols() {
            if group_of(r) != group_of(c) && gram[(r, c)].abs() > 1e-9 * scale {
                return false;
            }
        }
    }
    true
}

impl Link for StbcSmLink {
    fn scheme(&self) -> &'static str {
        if self.code.is_orthogonal() {
            "stbc-sm"
        } else {
            "qostbc-sm"
        }
    }

    fn frame_bits(&self) -> usize {
        self.book.index_bits() + self.symbol_bits()
    }

    fn index_bits(&self) -> usize {
        self.book.index_bits()
    }

    fn slots(&self) -> usize {
        self.code.slots()
    }

    fn mean_power(&self) -> f64 {
        self.alphabet.mean_power()
    }

    fn modulate(&self, bits: &[u8], y: &mut [f64]) -> Result<()> {
        let (pattern, symbols) = self.split_bits(bits)?;
        self.noiseless(pattern, &symbols, y);
        Ok(())
    }

    fn demodulate(&self, y: &[f64], bits: &mut Vec<u8>) {
        let det = self.detect(y, self.detector);
        self.detection_bits(&det, bits);
    }
}
