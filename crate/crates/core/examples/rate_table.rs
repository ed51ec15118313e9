//! Spectral efficiency, BER and error-free rate of STBC-SM and MASM over
//! the standard table of configurations.

use stbcsm::prelude::*;
use stbcsm::report::{table2_rows, TABLE2_SNR_DB};

fn main() -> stbcsm::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.sweep.max_frames = 100_000;
    let rows = table2_rows(&cfg, TABLE2_SNR_DB, &mut |_| {})?;
    println!("at {TABLE2_SNR_DB} dB");
    println!("Nt Na  M   BER stbc   BER masm   eta stbc  eta masm  rate stbc  rate masm");
    for r in rows {
        println!(
            "{:2} {:2} {:2}  {:.3e}  {:.3e}  {:8.3}  {:8.3}  {:9.4}  {:9.4}",
            r.nt,
            r.na,
            r.m,
            r.ber_stbc,
            r.ber_masm,
            r.eta_stbc,
            r.eta_masm,
            r.rate_stbc(),
            r.rate_masm()
        );
    }
    println!(
        "\nRC-SM Nt=4 Na=2 M=32: {} bpcu",
        spectral_efficiency(Scheme::RcSm, 4, 2, 32)?
    );
    Ok(())
}
