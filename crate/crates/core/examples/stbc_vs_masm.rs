//! STBC-SM against MASM at the same configuration, and the SNR each needs
//! for a BER of 1e-3.

use stbcsm::prelude::*;

fn main() -> stbcsm::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.sweep.snr_db = (0..=20).map(|k| 100.0 + 5.0 * k as f64).collect();
    cfg.sweep.max_frames = 100_000;
    for scheme in [Scheme::StbcSm, Scheme::Masm] {
        let c = cfg.with_scheme(scheme, 6, 2, 2);
        let r = run_sweep(c.build_link()?.as_ref(), &c.sweep)?;
        let at = r
            .snr_at_ber(1e-3)
            .map_or("not reached".into(), |s| format!("{s:.1} dB"));
        println!(
            "{scheme} ({} bpcu): BER 1e-3 at {at}",
            r.spectral_efficiency
        );
        for p in &r.points {
            println!("  {:5.1} dB  {:.3e}", p.snr_db, p.ber);
        }
    }
    Ok(())
}
