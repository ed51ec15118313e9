//! Unipolar PAM levels, their complements and Gray labels.

use stbcsm::prelude::*;

fn main() -> stbcsm::Result<()> {
    for m in [2, 4, 8] {
        let a = build_alphabet(m, 1.0)?;
        println!("M = {m}, Ip = {}", a.mean_power());
        for (i, (x, c)) in a.levels().iter().zip(a.complements()).enumerate() {
            let label = a.mapping().label(i);
            println!(
                "  level {i}: x = {x:.4}, complement = {c:.4}, bits = {label:0w$b}",
                w = a.bits_per_symbol()
            );
        }
    }
    let a = build_alphabet(4, 1.0)?;
    let bits = [1, 0, 0, 1, 1, 1];
    let symbols = stbcsm::modulation::bits_to_symbols(&bits, &a)?;
    println!("\nbits {bits:?} -> {symbols:?}");
    println!(
        "back -> {:?}",
        stbcsm::modulation::symbols_to_bits(&symbols, &a)
    );
    Ok(())
}
