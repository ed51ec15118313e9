//! CSV and text outputs behind the command-line subcommands.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::analysis::{achievable_rate, spectral_efficiency, BoundCalculator};
use crate::config::{RunConfig, Scheme};
use crate::error::Result;
use crate::geometry::{channels_for_book, gain_table};
use crate::montecarlo::{run_sweep_with_progress, Progress, SweepResult, SweepSpec};

/// Nt, Na, M rows of the configuration table, in print order.
pub const TABLE2_ROWS: [(usize, usize, usize); 10] = [
    (6, 2, 2),
    (6, 3, 2),
    (6, 4, 2),
    (6, 2, 2),
    (6, 2, 4),
    (6, 2, 16),
    (4, 2, 2),
    (6, 2, 2),
    (7, 2, 2),
    (8, 2, 2),
];

pub const TABLE2_SNR_DB: f64 = 160.0;

/// Comment lines opening every CSV.
pub fn header(cfg: &RunConfig, extra: &[(&str, String)]) -> String {
    let mut s = format!("# config_hash={}\n", cfg.hash());
    for (k, v) in extra {
        let _ = writeln!(s, "# {k}={v}");
    }
    s
}

fn eta_of(cfg: &RunConfig) -> Result<f64> {
    spectral_efficiency(cfg.scheme, cfg.nt, cfg.na, cfg.m)
}

pub const SWEEP_COLUMNS: &str = "snr_db,scheme,Nt,Na,M,ber,stderr,index_err,throughput_bpcu";

fn sweep_rows(out: &mut String, cfg: &RunConfig, r: &SweepResult) {
    for p in &r.points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{:e},{:e},{:e},{}",
            p.snr_db,
            cfg.scheme,
            cfg.nt,
            cfg.na,
            cfg.m,
            p.ber,
            p.ber_stderr,
            p.index_error_rate,
            p.throughput
        );
    }
}

pub fn sweep_csv(cfg: &RunConfig, r: &SweepResult) -> Result<String> {
    let mut s = header(
        cfg,
        &[
            ("scheme", cfg.scheme.to_string()),
            ("eta_bpcu", eta_of(cfg)?.to_string()),
            ("detector", format!("{:?}", cfg.detector)),
        ],
    );
    s.push_str(SWEEP_COLUMNS);
    s.push('\n');
    sweep_rows(&mut s, cfg, r);
    Ok(s)
}

pub fn simulate(cfg: &RunConfig, progress: &mut dyn FnMut(Progress)) -> Result<SweepResult> {
    let link = cfg.build_link()?;
    run_sweep_with_progress(link.as_ref(), &cfg.sweep, progress)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundRow {
    pub snr_db: f64,
    pub p_index_bound: f64,
    pub p_symbol_cond: f64,
    pub ber_bound: f64,
    pub sim_ber: f64,
    pub sim_stderr: f64,
    pub sim_index_err: f64,
}

impl BoundRow {
    pub fn dominates(&self) -> bool {
        self.ber_bound >= self.sim_ber
    }
}

/// Analytic bounds next to a two-step simulation on the same grid.
pub fn bound_rows(cfg: &RunConfig, progress: &mut dyn FnMut(Progress)) -> Result<Vec<BoundRow>> {
    let link = cfg.build_stbc()?;
    let calc = BoundCalculator::new(&link, cfg.bound_averaging)?;
    let sim = run_sweep_with_progress(&link, &cfg.sweep, progress)?;
    sim.points
        .iter()
        .filter(|p| p.sigma > 0.0)
        .map(|p| {
            Ok(BoundRow {
                snr_db: p.snr_db,
                p_index_bound: calc.union_bound_index(p.sigma)?,
                p_symbol_cond: calc.ber_symbols_given_index(p.sigma)?,
                ber_bound: calc.ber_upper_bound(p.sigma)?,
                sim_ber: p.ber,
                sim_stderr: p.ber_stderr,
                sim_index_err: p.index_error_rate,
            })
        })
        .collect()
}

pub fn bound_csv(cfg: &RunConfig, rows: &[BoundRow]) -> Result<String> {
    let mut s = header(
        cfg,
        &[
            ("scheme", cfg.scheme.to_string()),
            ("eta_bpcu", eta_of(cfg)?.to_string()),
        ],
    );
    s.push_str("snr_db,p_index_bound,p_symbol_cond,ber_bound,sim_ber,sim_stderr,sim_index_err,bound_dominates\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{:e},{:e},{:e},{:e},{:e},{:e},{}",
            r.snr_db,
            r.p_index_bound,
            r.p_symbol_cond,
            r.ber_bound,
            r.sim_ber,
            r.sim_stderr,
            r.sim_index_err,
            r.dominates()
        );
    }
    Ok(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparison {
    /// STBC-SM against MASM, Nt = 6, Na = 2, M = 2.
    Fig4,
    /// STBC-SM against MASM at 4 and 5 bpcu.
    Fig5,
    /// QOSTBC-SM against RC-SM at 5 and 7 bpcu.
    Fig8,
    /// STBC-SM against MASM for the ten table configurations.
    Table2,
}

impl Comparison {
    /// (scheme, Nt, Na, M) curves of a figure comparison.
    pub fn curves(self) -> Vec<(Scheme, usize, usize, usize)> {
        match self {
            Comparison::Fig4 => vec![(Scheme::StbcSm, 6, 2, 2), (Scheme::Masm, 6, 2, 2)],
            Comparison::Fig5 => vec![
                (Scheme::StbcSm, 4, 2, 8),
                (Scheme::Masm, 4, 2, 2),
                (Scheme::StbcSm, 4, 2, 16),
                (Scheme::Masm, 6, 2, 2),
            ],
            Comparison::Fig8 => vec![
                (Scheme::QostbcSm, 4, 2, 4),
                (Scheme::RcSm, 4, 2, 8),
                (Scheme::QostbcSm, 4, 2, 8),
                (Scheme::RcSm, 4, 2, 32),
            ],
            Comparison::Table2 => TABLE2_ROWS
                .iter()
                .flat_map(|&(nt, na, m)| [(Scheme::StbcSm, nt, na, m), (Scheme::Masm, nt, na, m)])
                .collect(),
        }
    }
}

pub fn compare_csv(
    cfg: &RunConfig,
    which: Comparison,
    progress: &mut dyn FnMut(Progress),
) -> Result<String> {
    if which == Comparison::Table2 {
        return table2_csv(cfg, progress);
    }
    let mut s = header(cfg, &[("comparison", format!("{which:?}"))]);
    s.push_str("eta_bpcu,");
    s.push_str(SWEEP_COLUMNS);
    s.push('\n');
    for (scheme, nt, na, m) in which.curves() {
        let c = cfg.with_scheme(scheme, nt, na, m);
        c.validate()?;
        let r = simulate(&c, progress)?;
        let mut rows = String::new();
        sweep_rows(&mut rows, &c, &r);
        for line in rows.lines() {
            let _ = writeln!(s, "{},{line}", r.spectral_efficiency);
        }
    }
    Ok(s)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table2Row {
    pub nt: usize,
    pub na: usize,
    pub m: usize,
    pub ber_stbc: f64,
    pub ber_masm: f64,
    pub eta_stbc: f64,
    pub eta_masm: f64,
}

impl Table2Row {
    pub fn rate_stbc(&self) -> f64 {
        achievable_rate(self.eta_stbc, self.ber_stbc)
    }

    pub fn rate_masm(&self) -> f64 {
        achievable_rate(self.eta_masm, self.ber_masm)
    }
}

/// Simulates every table row at `snr_db`, reusing repeated configurations.
pub fn table2_rows(
    cfg: &RunConfig,
    snr_db: f64,
    progress: &mut dyn FnMut(Progress),
) -> Result<Vec<Table2Row>> {
    let spec = SweepSpec {
        snr_db: vec![snr_db],
        ..cfg.sweep.clone()
    };
    let mut cache: BTreeMap<(usize, usize, usize), Table2Row> = BTreeMap::new();
    let mut rows = Vec::new();
    for &(nt, na, m) in &TABLE2_ROWS {
        if let Some(r) = cache.get(&(nt, na, m)) {
            rows.push(r.clone());
            continue;
        }
        let mut run = |scheme| -> Result<(f64, f64)> {
            let mut c = cfg.with_scheme(scheme, nt, na, m);
            c.sweep = spec.clone();
            c.validate()?;
            let r = simulate(&c, progress)?;
            Ok((r.points[0].ber, r.spectral_efficiency))
        };
        let (ber_stbc, eta_stbc) = run(Scheme::StbcSm)?;
        let (ber_masm, eta_masm) = run(Scheme::Masm)?;
        let row = Table2Row {
            nt,
            na,
            m,
            ber_stbc,
            ber_masm,
            eta_stbc,
            eta_masm,
        };
        cache.insert((nt, na, m), row.clone());
        rows.push(row);
    }
    Ok(rows)
}

fn pct_diff(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        0.0
    } else {
        (b - a) / b * 100.0
    }
}

pub fn table2_csv(cfg: &RunConfig, progress: &mut dyn FnMut(Progress)) -> Result<String> {
    let rows = table2_rows(cfg, TABLE2_SNR_DB, progress)?;
    let mut s = header(cfg, &[("snr_db", TABLE2_SNR_DB.to_string())]);
    s.push_str("Nt,Na,M,ber_stbc_sm,ber_masm,ber_delta_pct,eta_stbc_sm,eta_masm,rate_stbc_sm,rate_masm,rate_delta_pct\n");
    for r in &rows {
        let _ = writeln!(
            s,
            "{},{},{},{:e},{:e},{:.4},{},{},{:.4},{:.4},{:.4}",
            r.nt,
            r.na,
            r.m,
            r.ber_stbc,
            r.ber_masm,
            pct_diff(r.ber_stbc, r.ber_masm),
            r.eta_stbc,
            r.eta_masm,
            r.rate_stbc(),
            r.rate_masm(),
            pct_diff(r.rate_stbc(), r.rate_masm()),
        );
    }
    Ok(s)
}

pub fn geometry_csv(cfg: &RunConfig) -> Result<String> {
    let room = cfg.room()?;
    let gains = gain_table(&room, &cfg.optics)?;
    let p = room.pd_position;
    let mut s = header(
        cfg,
        &[
            ("pd_position", format!("{} {} {}", p.x, p.y, p.z)),
            (
                "lambertian_order",
                cfg.optics.lambertian_order().to_string(),
            ),
        ],
    );
    s.push_str("led,x,y,z,distance_m,gain\n");
    for (i, (led, g)) in room.led_positions.iter().zip(gains).enumerate() {
        let _ = writeln!(
            s,
            "{},{},{},{},{:.6},{:e}",
            i + 1,
            led.x,
            led.y,
            led.z,
            led.sub(p).norm(),
            g
        );
    }
    Ok(s)
}

pub fn patterns_csv(cfg: &RunConfig) -> Result<String> {
    let book = cfg.book()?;
    let channels = channels_for_book(&cfg.room()?, &cfg.optics, &book)?;
    let mut s = header(
        cfg,
        &[
            ("patterns", book.len().to_string()),
            ("index_bits", book.index_bits().to_string()),
        ],
    );
    s.push_str("label,bits,leds,channel_norm\n");
    for (p, h) in book.patterns().iter().zip(&channels) {
        let bits: String = book
            .label_bits(p.id())
            .iter()
            .map(|b| char::from(b'0' + b))
            .collect();
        let leds: Vec<String> = p.leds().iter().map(|l| (l + 1).to_string()).collect();
        let _ = writeln!(
            s,
            "{},{},{},{:e}",
            p.id(),
            if bits.is_empty() { "-".into() } else { bits },
            leds.join(" "),
            h.norm_sqr().sqrt()
        );
    }
    Ok(s)
}

/// Symbolic codeword, rate, and the effective-channel Gram matrix of the
/// first pattern.
pub fn codebook_text(cfg: &RunConfig) -> Result<String> {
    let link = cfg.build_stbc()?;
    let code = link.code();
    let mut s = header(
        cfg,
        &[
            ("slots", code.slots().to_string()),
            ("leds", code.leds().to_string()),
            ("symbols", code.symbols().to_string()),
            ("rate", code.rate().to_string()),
        ],
    );
    s.push_str(&code.to_string());
    let (h, _) = link.effective(0);
    let g = h.transpose() * h;
    let norm = link.channels()[0].norm_sqr();
    s.push_str("# gram / |h|^2 for the first pattern\n");
    for r in 0..g.nrows() {
        let row: Vec<String> = (0..g.ncols())
            .map(|c| format!("{:8.4}", g[(r, c)] / norm))
            .collect();
        let _ = writeln!(s, "{}", row.join(" "));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> RunConfig {
        let mut c = RunConfig::default();
        c.sweep.snr_db = vec![120.0, 140.0];
        c.sweep.max_frames = 10_000;
        c.sweep.target_errors = 100;
        c
    }

    #[test]
    fn sweep_csv_layout() {
        let c = quick();
        let r = simulate(&c, &mut |_| {}).unwrap();
        let csv = sweep_csv(&c, &r).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# config_hash="));
        assert!(lines.contains(&"# eta_bpcu=2.5"));
        assert!(lines.contains(&SWEEP_COLUMNS));
        assert!(lines.last().unwrap().starts_with("140,stbc-sm,6,2,2,"));
        assert_eq!(
            csv,
            sweep_csv(&c, &simulate(&c, &mut |_| {}).unwrap()).unwrap()
        );
    }

    #[test]
    fn bound_csv_dominates() {
        let c = quick();
        let rows = bound_rows(&c, &mut |_| {}).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(BoundRow::dominates));
        assert!(bound_csv(&c, &rows).unwrap().contains("p_index_bound"));
    }

    #[test]
    fn static_reports() {
        let c = RunConfig::default();
        let g = geometry_csv(&c).unwrap();
        assert_eq!(g.lines().filter(|l| !l.starts_with('#')).count(), 7);
        let p = patterns_csv(&c).unwrap();
        assert!(p.contains("\n7,111,2 5,"));
        let t = codebook_text(&c).unwrap();
        assert!(t.contains("-x2 (+2Ip)"));
        assert!(t.contains("  1.0000   0.0000"));
    }

    #[test]
    fn table_layout() {
        assert_eq!(Comparison::Table2.curves().len(), 20);
        assert_eq!(pct_diff(0.0, 0.024), 100.0);
        assert!((pct_diff(2.5, 4.8) - 47.9167).abs() < 1e-4);
    }
}
