//! Analytic BER upper bound against a two-step simulation.

use stbcsm::prelude::*;

fn main() -> stbcsm::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.sweep.snr_db = (0..8).map(|k| 130.0 + 5.0 * k as f64).collect();
    cfg.sweep.max_frames = 200_000;
    let link = cfg.build_stbc()?;
    let calc = BoundCalculator::new(&link, CodewordAveraging::Auto)?;
    let sim = run_sweep(&link, &cfg.sweep)?;
    println!("snr_db  index_bound  ber_bound    sim_ber");
    for p in &sim.points {
        println!(
            "{:6.1}  {:.4e}   {:.4e}   {:.4e}",
            p.snr_db,
            calc.union_bound_index(p.sigma)?,
            calc.ber_upper_bound(p.sigma)?,
            p.ber
        );
    }
    Ok(())
}
