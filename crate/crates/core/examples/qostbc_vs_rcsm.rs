//! Rate-2 QOSTBC-SM against RC-SM at 5 and 7 bpcu.

use stbcsm::prelude::*;
use stbcsm::report::Comparison;

fn main() -> stbcsm::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.sweep.snr_db = vec![150.0, 160.0, 170.0, 180.0];
    cfg.sweep.max_frames = 100_000;
    for (scheme, nt, na, m) in Comparison::Fig8.curves() {
        let c = cfg.with_scheme(scheme, nt, na, m);
        if scheme == Scheme::QostbcSm {
            println!("QOSTBC weights {:?}", c.qostbc_params()?);
        }
        let r = run_sweep(c.build_link()?.as_ref(), &c.sweep)?;
        let bers: Vec<String> = r.points.iter().map(|p| format!("{:.2e}", p.ber)).collect();
        println!(
            "{scheme} Nt={nt} Na={na} M={m}, {} bpcu: {}",
            r.spectral_efficiency,
            bers.join(" ")
        );
    }
    Ok(())
}
