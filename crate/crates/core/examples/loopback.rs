//! One STBC-SM block through the channel: transmit, add noise, detect with
//! both detectors.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stbcsm::prelude::*;

fn main() -> stbcsm::Result<()> {
    let link = RunConfig::default()
        .with_scheme(Scheme::StbcSm, 6, 2, 4)
        .build_stbc()?;
    let bits = [1, 0, 1, 1, 0, 1, 0];
    let tx = link.transmit(&bits)?;
    println!(
        "bits {bits:?} -> pattern {} symbols {:?}",
        tx.pattern, tx.symbols
    );
    println!("codeword (slots x LEDs){:.4}", tx.codeword);

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for snr in [130.0, 150.0, 170.0] {
        let sigma = snr_to_sigma(snr, link.alphabet().mean_power());
        let rx = link.apply_channel(&tx, sigma, &mut rng)?;
        for det in [Detector::JointMl, Detector::TwoStep] {
            let d = link.detect(rx.y.as_slice(), det);
            let mut out = Vec::new();
            link.detection_bits(&d, &mut out);
            println!(
                "{snr} dB {det:?}: pattern {} symbols {:?} bits {out:?} ({} evaluations)",
                d.pattern, d.symbols, d.evaluations
            );
        }
    }
    Ok(())
}
