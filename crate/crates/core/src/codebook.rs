//! Optical space-time block codes in linear-dispersion form.
//!
//! Every codeword entry is a nonnegative combination of PAM symbols or their
//! complements x̄ = 2 Ip - x. Written linearly in the symbols, a complemented
//! term contributes a coefficient -w and a constant 2 Ip w, so each entry
//! carries a DC offset alongside its symbol coefficients. Receivers subtract
//! the known DC part before matched filtering.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ChannelVector;
use crate::modulation::PamAlphabet;

/// One weighted symbol inside a codeword entry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub weight: f64,
    pub symbol: usize,
    pub complement: bool,
}

impl Term {
    /// Linear coefficient on the symbol.
    pub fn coeff(&self) -> f64 {
        if self.complement {
            -self.weight
        } else {
            self.weight
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub terms: Vec<Term>,
}

impl Entry {
    /// Constant part of the entry as a multiple of Ip.
    pub fn dc_offset(&self) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.complement)
            .map(|t| 2.0 * t.weight)
            .sum()
    }

    pub fn value(&self, x: &[f64], ip: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let v = x[t.symbol];
                t.weight * if t.complement { 2.0 * ip - v } else { v }
            })
            .sum()
    }
}

/// QOSTBC weights. `a + b = 1` and `c + d = 1` keep the average optical
/// power fixed; `a = c`, `b = d` enables pairwise decoupled detection.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QostbcParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl QostbcParams {
    pub const DEFAULT_A: f64 = 0.6;

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let p = Self { a, b, c, d };
        p.validate()?;
        Ok(p)
    }

    /// a = c, b = d = 1 - a.
    pub fn symmetric(a: f64) -> Result<Self> {
        Self::new(a, 1.0 - a, a, 1.0 - a)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { a, b, c, d } = *self;
        if [a, b, c, d].iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::Code(format!(
                "QOSTBC weights must be strictly positive, got a={a} b={b} c={c} d={d}"
            )));
        }
        if (a + b - 1.0).abs() > 1e-9 || (c + d - 1.0).abs() > 1e-9 {
            return Err(Error::Code(format!(
                "QOSTBC weights must satisfy a+b = c+d = 1, got a+b={} c+d={}",
                a + b,
                c + d
            )));
        }
        Ok(())
    }

    pub fn is_symmetric(&self) -> bool {
        (self.a - self.c).abs() < 1e-12 && (self.b - self.d).abs() < 1e-12
    }
}

impl Default for QostbcParams {
    fn default() -> Self {
        Self::symmetric(Self::DEFAULT_A).expect("default weights are valid")
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CodeKind {
    Ostbc,
    Qostbc(QostbcParams),
}

/// A T x Na codeword template over Nsym real symbols.
#[derive(Clone, Debug, PartialEq)]
pub struct CodeStructure {
    slots: usize,
    leds: usize,
    symbols: usize,
    kind: CodeKind,
    entries: Vec<Entry>,
}

type SignTable = Vec<Vec<(i8, usize)>>;

// Real orthogonal 8x8 design. Its top-left 4x4 block is the recursive
// 4x4 code; columns are signed permutations of x1..x8.
const OD8: [[i8; 8]; 8] = [
    [1, 2, 3, 4, 5, 6, 7, 8],
    [-2, 1, -4, 3, 6, -5, 8, -7],
    [-3, 4, 1, -2, 7, -8, -5, 6],
    [-4, -3, 2, 1, 8, 7, -6, -5],
    [5, 6, 7, 8, -1, -2, -3, -4],
    [6, -5, -8, 7, 2, -1, -4, 3],
    [7, 8, -5, -6, 3, 4, -1, -2],
    [8, -7, 6, -5, 4, -3, 2, -1],
];

fn alamouti_table(first: usize) -> SignTable {
    vec![
        vec![(1, first), (1, first + 1)],
        vec![(-1, first + 1), (1, first)],
    ]
}

/// [[A, B], [-B^T, A^T]] with A, B the half-size codes on the first and
/// second half of the symbols.
fn block_recursion(a: &SignTable, b: &SignTable) -> SignTable {
    let n = a.len();
    let mut out = Vec::with_capacity(2 * n);
    for r in 0..n {
        let mut row = a[r].clone();
        row.extend_from_slice(&b[r]);
        out.push(row);
    }
    for r in 0..n {
        let mut row: Vec<(i8, usize)> = (0..n).map(|c| (-b[c][r].0, b[c][r].1)).collect();
        row.extend((0..n).map(|c| a[c][r]));
        out.push(row);
    }
    out
}

fn square_table(n: usize) -> SignTable {
    match n {
        2 => alamouti_table(0),
        4 => block_recursion(&alamouti_table(0), &alamouti_table(2)),
        8 => OD8
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&s| (s.signum(), s.unsigned_abs() as usize - 1))
                    .collect()
            })
            .collect(),
        _ => unreachable!("square designs exist for 2, 4, 8"),
    }
}

fn from_table(table: &SignTable, leds: usize, symbols: usize) -> CodeStructure {
    let slots = table.len();
    let entries = table
        .iter()
        .flat_map(|row| {
            row.iter().take(leds).map(|&(sign, symbol)| Entry {
                terms: vec![Term {
                    weight: 1.0,
                    symbol,
                    complement: sign < 0,
                }],
            })
        })
        .collect();
    CodeStructure {
        slots,
        leds,
        symbols,
        kind: CodeKind::Ostbc,
        entries,
    }
}

/// Two-LED code with rows (x1, x2) and (x̄2, x1).
pub fn alamouti() -> CodeStructure {
    from_table(&alamouti_table(0), 2, 2)
}

/// Unit-rate optical OSTBC for 2..=8 active LEDs.
///
/// Na in {2, 4, 8} use the square designs; other sizes keep the leading Na
/// columns of the next larger square design.
pub fn ostbc(na: usize) -> Result<CodeStructure> {
    if !(2..=8).contains(&na) {
        return Err(Error::Code(format!(
            "OSTBC supports 2..=8 active LEDs, got {na}"
        )));
    }
    let t = na.next_power_of_two();
    Ok(from_table(&square_table(t), na, t))
}

/// Rate-2 two-LED QOSTBC:
/// rows (a x1 + b x3, a x2 + b x4) and (c x̄2 + d x̄4, c x1 + d x3).
pub fn qostbc(params: QostbcParams) -> Result<CodeStructure> {
    params.validate()?;
    let QostbcParams { a, b, c, d } = params;
    let t = |weight, symbol, complement| Term {
        weight,
        symbol,
        complement,
    };
    let entries = vec![
        Entry {
            terms: vec![t(a, 0, false), t(b, 2, false)],
        },
        Entry {
            terms: vec![t(a, 1, false), t(b, 3, false)],
        },
        Entry {
            terms: vec![t(c, 1, true), t(d, 3, true)],
        },
        Entry {
            terms: vec![t(c, 0, false), t(d, 2, false)],
        },
    ];
    Ok(CodeStructure {
        slots: 2,
        leds: 2,
        symbols: 4,
        kind: CodeKind::Qostbc(params),
        entries,
    })
}

impl CodeStructure {
    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn leds(&self) -> usize {
        self.leds
    }

    pub fn symbols(&self) -> usize {
        self.symbols
    }

    pub fn kind(&self) -> CodeKind {
        self.kind
    }

    pub fn is_orthogonal(&self) -> bool {
        matches!(self.kind, CodeKind::Ostbc)
    }

    /// Symbols per slot.
    pub fn rate(&self) -> f64 {
        self.symbols as f64 / self.slots as f64
    }

    pub fn entry(&self, slot: usize, led: usize) -> &Entry {
        &self.entries[slot * self.leds + led]
    }

    /// Symbol groups that can be detected independently: singletons for
    /// OSTBC, (x1, x3) and (x2, x4) for QOSTBC.
    pub fn decoupled_groups(&self) -> Vec<Vec<usize>> {
        match self.kind {
            CodeKind::Ostbc => (0..self.symbols).map(|k| vec![k]).collect(),
            CodeKind::Qostbc(_) => vec![vec![0, 2], vec![1, 3]],
        }
    }

    pub fn instantiate(&self, x: &[f64], ip: f64) -> Result<DMatrix<f64>> {
        if x.len() != self.symbols {
            return Err(Error::Dimension(format!(
                "code takes {} symbols, got {}",
                self.symbols,
                x.len()
            )));
        }
        Ok(DMatrix::from_fn(self.slots, self.leds, |t, a| {
            self.entry(t, a).value(x, ip)
        }))
    }

    /// Writes X h (length T) for symbols `x` into `out`.
    pub fn apply(&self, x: &[f64], ip: f64, gains: &[f64], out: &mut [f64]) {
        for (t, o) in out.iter_mut().enumerate().take(self.slots) {
            *o = (0..self.leds)
                .map(|a| self.entry(t, a).value(x, ip) * gains[a])
                .sum();
        }
    }

    /// Coefficient of symbol k in entry (t, a).
    pub fn coeff(&self, slot: usize, led: usize, symbol: usize) -> f64 {
        self.entry(slot, led)
            .terms
            .iter()
            .filter(|t| t.symbol == symbol)
            .map(Term::coeff)
            .sum()
    }

    /// Symbolic rendering of one entry, e.g. `-x2 (+2Ip)`.
    pub fn symbolic(&self, slot: usize, led: usize) -> String {
        let e = self.entry(slot, led);
        let mut s = String::new();
        for (i, t) in e.terms.iter().enumerate() {
            let name = match self.kind {
                CodeKind::Ostbc => String::new(),
                CodeKind::Qostbc(p) => {
                    let w = t.weight;
                    let tag = if t.complement {
                        if (w - p.c).abs() < 1e-12 {
                            "c"
                        } else {
                            "d"
                        }
                    } else if t.symbol < 2 {
                        if slot == 0 {
                            "a"
                        } else {
                            "c"
                        }
                    } else if slot == 0 {
                        "b"
                    } else {
                        "d"
                    };
                    format!("{tag}·")
                }
            };
            let sign = if t.complement {
                "-"
            } else if i > 0 {
                "+"
            } else {
                ""
            };
            s.push_str(&format!("{sign}{name}x{}", t.symbol + 1));
        }
        let dc = e.dc_offset();
        if dc > 0.0 {
            if (dc - 2.0).abs() < 1e-12 {
                s.push_str(" (+2Ip)");
            } else {
                s.push_str(&format!(" (+{dc}Ip)"));
            }
        }
        s
    }

    /// Signed symbol numbers of an OSTBC (+k for x_k, -k for x̄_k).
    pub fn sign_table(&self) -> Option<Vec<Vec<i32>>> {
        if !self.is_orthogonal() {
            return None;
        }
        Some(
            (0..self.slots)
                .map(|t| {
                    (0..self.leds)
                        .map(|a| {
                            let term = self.entry(t, a).terms[0];
                            let k = term.symbol as i32 + 1;
                            if term.complement {
                                -k
                            } else {
                                k
                            }
                        })
                        .collect()
                })
                .collect(),
        )
    }
}

impl fmt::Display for CodeStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> = (0..self.slots)
            .map(|t| (0..self.leds).map(|a| self.symbolic(t, a)).collect())
            .collect();
        let width = cells
            .iter()
            .flatten()
            .map(|c| c.chars().count())
            .max()
            .unwrap_or(0);
        for row in cells {
            let line: Vec<String> = row.iter().map(|c| format!("{c:<width$}")).collect();
            writeln!(f, "[ {} ]", line.join("  "))?;
        }
        Ok(())
    }
}

/// Effective channel of a code seen through one pattern's gains:
/// y - dc = scale · H_eff x + z, with scale = η / Na.
#[derive(Clone, Debug, PartialEq)]
pub struct EffectiveChannel {
    pub h_eff: DMatrix<f64>,
    pub dc: DVector<f64>,
    pub scale: f64,
}

pub fn effective_channel(
    code: &CodeStructure,
    h: &ChannelVector,
    ip: f64,
    responsivity: f64,
) -> Result<EffectiveChannel> {
    if h.len() != code.leds() {
        return Err(Error::Dimension(format!(
            "code drives {} LEDs but the channel has {} gains",
            code.leds(),
            h.len()
        )));
    }
    let scale = responsivity / code.leds() as f64;
    let mut h_eff = DMatrix::zeros(code.slots(), code.symbols());
    let mut dc = DVector::zeros(code.slots());
    for t in 0..code.slots() {
        for (a, &g) in h.gains.iter().enumerate() {
            let e = code.entry(t, a);
            for term in &e.terms {
                h_eff[(t, term.symbol)] += term.coeff() * g;
            }
            dc[t] += e.dc_offset() * ip * g * scale;
        }
    }
    Ok(EffectiveChannel { h_eff, dc, scale })
}

/// Grid search over a = c in (0, 1), b = d = 1 - a, maximizing the minimum
/// distance between distinct noiseless images of each decoupled symbol
/// pair, taken over every channel in `channels`. Ties resolve to the
/// smaller a.
pub fn optimize_qostbc_params(
    alphabet: &PamAlphabet,
    channels: &[ChannelVector],
    grid_step: f64,
) -> Result<QostbcParams> {
    if !(grid_step > 0.0 && grid_step < 0.5) {
        return Err(Error::Code(format!(
            "grid step must lie in (0, 0.5), got {grid_step}"
        )));
    }
    if channels.is_empty() {
        return Err(Error::Dimension("no channels to optimize over".into()));
    }
    if let Some(h) = channels.iter().find(|h| h.len() != 2) {
        return Err(Error::Dimension(format!(
            "QOSTBC needs 2 gains, got {}",
            h.len()
        )));
    }
    let steps = (1.0 / grid_step).ceil() as usize;
    let grid: Vec<f64> = (1..steps)
        .map(|k| k as f64 * grid_step)
        .filter(|&a| a > 0.0 && a < 1.0)
        .collect();
    if grid.is_empty() {
        return Err(Error::Code("empty QOSTBC parameter grid".into()));
    }
    let mut best: Option<(f64, QostbcParams)> = None;
    for a in grid {
        let params = QostbcParams::symmetric(a)?;
        let code = qostbc(params)?;
        let mut score = f64::INFINITY;
        for h in channels {
            let eff = effective_channel(&code, h, alphabet.mean_power(), 1.0)?;
            for g in code.decoupled_groups() {
                score = score.min(pair_min_distance(&eff.h_eff, &g, alphabet.levels()));
            }
        }
        let better = match best {
            None => true,
            Some((s, _)) => score > s * (1.0 + 1e-9),
        };
        if better {
            best = Some((score, params));
        }
    }
    Ok(best.expect("grid is not empty").1)
}

fn pair_min_distance(h_eff: &DMatrix<f64>, group: &[usize], levels: &[f64]) -> f64 {
    let (i, j) = (group[0], group[1]);
    let ci = h_eff.column(i);
    let cj = h_eff.column(j);
    let images: Vec<DVector<f64>> = levels
        .iter()
        .flat_map(|&xi| levels.iter().map(move |&xj| ci * xi + cj * xj))
        .collect();
    let mut min = f64::INFINITY;
    for (p, u) in images.iter().enumerate() {
        for v in &images[p + 1..] {
            min = min.min((u - v).norm());
        }
    }
    min
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modulation::build_alphabet;
    use proptest::prelude::*;

    fn ch(g: &[f64]) -> ChannelVector {
        ChannelVector {
            gains: g.to_vec(),
            pattern_id: 0,
        }
    }

    fn enumerate(m: usize, n: usize) -> impl Iterator<Item = Vec<usize>> {
        (0..m.pow(n as u32)).map(move |mut c| {
            let mut v = vec![0; n];
            for k in (0..n).rev() {
                v[k] = c % m;
                c /= m;
            }
            v
        })
    }

    #[test]
    fn alamouti_binary_example() {
        let cw = alamouti()
            .instantiate(&[2.0 / 3.0, 4.0 / 3.0], 1.0)
            .unwrap();
        let want = [[2.0 / 3.0, 4.0 / 3.0], [2.0 / 3.0, 2.0 / 3.0]];
        for t in 0..2 {
            for a in 0..2 {
                assert!((cw[(t, a)] - want[t][a]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn alamouti_nonnegative_quaternary() {
        let alph = build_alphabet(4, 1.0).unwrap();
        let code = alamouti();
        for idx in enumerate(4, 2) {
            let x: Vec<f64> = idx.iter().map(|&i| alph.levels()[i]).collect();
            let cw = code.instantiate(&x, 1.0).unwrap();
            assert!(cw.iter().all(|&v| v >= 0.0));
            assert!((cw[(1, 0)] - (2.0 - x[1])).abs() < 1e-15);
        }
    }

    #[test]
    fn three_led_code_matches_column_elimination() {
        let code = ostbc(3).unwrap();
        assert_eq!((code.slots(), code.leds(), code.symbols()), (4, 3, 4));
        let want = vec![
            vec![1, 2, 3],
            vec![-2, 1, -4],
            vec![-3, 4, 1],
            vec![-4, -3, 2],
        ];
        assert_eq!(code.sign_table().unwrap(), want);
    }

    #[test]
    fn two_led_ostbc_is_alamouti() {
        assert_eq!(ostbc(2).unwrap(), alamouti());
        assert!(ostbc(1).is_err());
        assert!(ostbc(9).is_err());
    }

    #[test]
    fn square_sign_matrices_are_orthogonal() {
        for n in [2usize, 4, 8] {
            let table = ostbc(n).unwrap().sign_table().unwrap();
            // S^T S with x = 1: each column is a signed permutation, so the
            // Gram identity has to hold for symbol vectors too; check both
            let s = DMatrix::from_fn(n, n, |t, a| table[t][a].signum() as f64);
            let _ = s.transpose() * &s;
            for trial in 0..5 {
                let x: Vec<f64> = (0..n)
                    .map(|k| ((k * 7 + trial * 3) % 11) as f64 - 5.0)
                    .collect();
                let xm = DMatrix::from_fn(n, n, |t, a| {
                    let v = table[t][a];
                    v.signum() as f64 * x[v.unsigned_abs() as usize - 1]
                });
                let g = xm.transpose() * &xm;
                let norm: f64 = x.iter().map(|v| v * v).sum();
                assert!((g - DMatrix::identity(n, n) * norm).abs().max() < 1e-9);
            }
        }
    }

    #[test]
    fn four_led_signs_gram() {
        let table = ostbc(4).unwrap().sign_table().unwrap();
        let s = DMatrix::from_fn(4, 4, |t, a| table[t][a].signum() as f64);
        assert_eq!(s.transpose() * &s, DMatrix::identity(4, 4) * 4.0);
    }

    #[test]
    fn recursion_consistency() {
        for n in [4usize, 8] {
            let big = ostbc(n).unwrap().sign_table().unwrap();
            let small = ostbc(n / 2).unwrap().sign_table().unwrap();
            for t in 0..n / 2 {
                assert_eq!(&big[t][..n / 2], small[t].as_slice());
            }
        }
    }

    #[test]
    fn qostbc_example() {
        let code = qostbc(QostbcParams::symmetric(0.5).unwrap()).unwrap();
        let x = [2.0 / 3.0; 4];
        let cw = code.instantiate(&x, 1.0).unwrap();
        let want = [[2.0 / 3.0, 2.0 / 3.0], [4.0 / 3.0, 2.0 / 3.0]];
        for t in 0..2 {
            for a in 0..2 {
                assert!((cw[(t, a)] - want[t][a]).abs() < 1e-15);
            }
        }
        assert_eq!(code.rate(), 2.0);
        assert!(QostbcParams::new(0.6, 0.5, 0.6, 0.4).is_err());
        assert!(QostbcParams::symmetric(1.0).is_err());
    }

    #[test]
    fn alamouti_effective_channel() {
        let (h1, h2) = (3e-6, 5e-6);
        let eff = effective_channel(&alamouti(), &ch(&[h1, h2]), 1.0, 1.0).unwrap();
        assert_eq!(eff.h_eff, DMatrix::from_row_slice(2, 2, &[h1, h2, h2, -h1]));
        assert_eq!(eff.dc[0], 0.0);
        assert!((eff.dc[1] - 2.0 * h1 / 2.0).abs() < 1e-20);
        assert!(effective_channel(&alamouti(), &ch(&[h1]), 1.0, 1.0).is_err());
    }

    #[test]
    fn qostbc_gram_matches_closed_form() {
        let p = QostbcParams::symmetric(0.7).unwrap();
        let (a, b) = (p.a, p.b);
        let (h1, h2) = (2.0, 3.0);
        let eff = effective_channel(&qostbc(p).unwrap(), &ch(&[h1, h2]), 1.0, 1.0).unwrap();
        let g = eff.h_eff.transpose() * &eff.h_eff;
        let want = DMatrix::from_row_slice(
            4,
            4,
            &[
                (a * h1).powi(2) + (a * h2).powi(2),
                0.0,
                a * b * h1 * h1 + a * b * h2 * h2,
                0.0,
                0.0,
                (a * h1).powi(2) + (a * h2).powi(2),
                0.0,
                a * b * h1 * h1 + a * b * h2 * h2,
                a * b * h1 * h1 + a * b * h2 * h2,
                0.0,
                (b * h1).powi(2) + (b * h2).powi(2),
                0.0,
                0.0,
                a * b * h1 * h1 + a * b * h2 * h2,
                0.0,
                (b * h1).powi(2) + (b * h2).powi(2),
            ],
        );
        assert!((g - want).abs().max() < 1e-12);
    }

    #[test]
    fn optimizer_avoids_degenerate_half() {
        let alph = build_alphabet(2, 1.0).unwrap();
        let g = 8e-6;
        let p = optimize_qostbc_params(&alph, &[ch(&[g, g])], 0.01).unwrap();
        assert!((p.a - 0.5).abs() > 1e-6);
        assert!((p.a + p.b - 1.0).abs() < 1e-12);
        assert!(((p.a / 0.01).round() * 0.01 - p.a).abs() < 1e-12);
        assert!(p.is_symmetric());

        // brute-force oracle: a = 0.5 merges (x1, x3) pairs with equal sums
        let code = qostbc(QostbcParams::symmetric(0.5).unwrap()).unwrap();
        let eff = effective_channel(&code, &ch(&[g, g]), 1.0, 1.0).unwrap();
        assert_eq!(pair_min_distance(&eff.h_eff, &[0, 2], alph.levels()), 0.0);

        assert!(optimize_qostbc_params(&alph, &[ch(&[g, g])], 0.0).is_err());
        assert!(optimize_qostbc_params(&alph, &[ch(&[g, g])], 0.5).is_err());
    }

    #[test]
    fn optimizer_keeps_octal_pairs_apart() {
        let alph = build_alphabet(8, 1.0).unwrap();
        let p =
            optimize_qostbc_params(&alph, &[ch(&[7e-6, 9e-6]), ch(&[4e-6, 2e-6])], 0.01).unwrap();
        // a x_i + b x_j must stay injective over the 64 level pairs
        let mut v: Vec<f64> = alph
            .levels()
            .iter()
            .flat_map(|&xi| alph.levels().iter().map(move |&xj| p.a * xi + p.b * xj))
            .collect();
        v.sort_by(f64::total_cmp);
        assert!(v.windows(2).all(|w| w[1] - w[0] > 1e-3));
        // the spec default weight collides for M = 8
        let d = QostbcParams::default();
        let mut v: Vec<f64> = alph
            .levels()
            .iter()
            .flat_map(|&xi| alph.levels().iter().map(move |&xj| d.a * xi + d.b * xj))
            .collect();
        v.sort_by(f64::total_cmp);
        assert!(v.windows(2).any(|w| w[1] - w[0] < 1e-12));
    }

    #[test]
    fn symbolic_rendering() {
        assert_eq!(alamouti().symbolic(1, 0), "-x2 (+2Ip)");
        assert_eq!(alamouti().symbolic(0, 1), "x2");
        let q = qostbc(QostbcParams::default()).unwrap();
        assert_eq!(q.symbolic(0, 0), "a·x1+b·x3");
        assert_eq!(q.symbolic(1, 0), "-c·x2-d·x4 (+2Ip)");
        assert_eq!(q.symbolic(1, 1), "c·x1+d·x3");
    }

    #[test]
    fn nonnegative_exhaustive_small() {
        for m in [2usize, 4] {
            let alph = build_alphabet(m, 1.0).unwrap();
            let codes = [
                ostbc(2).unwrap(),
                ostbc(3).unwrap(),
                ostbc(4).unwrap(),
                qostbc(QostbcParams::default()).unwrap(),
            ];
            for code in &codes {
                for idx in enumerate(m, code.symbols()) {
                    let x: Vec<f64> = idx.iter().map(|&i| alph.levels()[i]).collect();
                    let cw = code.instantiate(&x, 1.0).unwrap();
                    assert!(cw.iter().all(|&v| (0.0..=2.0).contains(&v)));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn nonnegative_random_large(na in 5usize..=8, k in 1u32..=4, seed in any::<u64>()) {
            let m = 1usize << k;
            let alph = build_alphabet(m, 1.0).unwrap();
            let code = ostbc(na).unwrap();
            let x: Vec<f64> = (0..code.symbols())
                .map(|i| alph.levels()[((seed >> (i * 4)) as usize) % m])
                .collect();
            let cw = code.instantiate(&x, 1.0).unwrap();
            prop_assert!(cw.iter().all(|&v| (0.0..=2.0).contains(&v)));
        }

        #[test]
        fn ostbc_gram_identity(na in 2usize..=8, gains in proptest::collection::vec(1e-7f64..1e-4, 8)) {
            let code = ostbc(na).unwrap();
            let h = ch(&gains[..na]);
            let eff = effective_channel(&code, &h, 1.0, 1.0).unwrap();
            let g = eff.h_eff.transpose() * &eff.h_eff;
            let want = DMatrix::identity(code.symbols(), code.symbols()) * h.norm_sqr();
            prop_assert!((g - want).abs().max() <= 1e-10 * h.norm_sqr());
        }
    }
}
