//! Optical OSTBC and QOSTBC codeword structures and one instantiated
//! codeword of each.

use stbcsm::prelude::*;

fn show(name: &str, code: &CodeStructure, alphabet: &PamAlphabet) -> stbcsm::Result<()> {
    println!(
        "{name}: {} slots x {} LEDs, {} symbols, rate {}",
        code.slots(),
        code.leds(),
        code.symbols(),
        code.rate()
    );
    println!("{code}");
    let x: Vec<f64> = (0..code.symbols())
        .map(|k| alphabet.levels()[k % alphabet.order()])
        .collect();
    let cw = code.instantiate(&x, alphabet.mean_power())?;
    println!("x = {x:.3?}{cw:.3}");
    Ok(())
}

fn main() -> stbcsm::Result<()> {
    let alphabet = build_alphabet(4, 1.0)?;
    show("Alamouti", &alamouti(), &alphabet)?;
    show("OSTBC, 3 LEDs", &ostbc(3)?, &alphabet)?;
    show("OSTBC, 4 LEDs", &ostbc(4)?, &alphabet)?;
    show(
        "QOSTBC, a = 0.7",
        &qostbc(QostbcParams::symmetric(0.7)?)?,
        &alphabet,
    )?;
    Ok(())
}
