//! Activation-pattern books and the index bits they carry.

use stbcsm::prelude::*;

fn main() -> stbcsm::Result<()> {
    for (nt, na) in [(4, 2), (6, 2), (6, 3), (8, 4)] {
        let book = build_patternbook(nt, na)?;
        println!(
            "Nt = {nt}, Na = {na}: {} patterns, {} index bits",
            book.len(),
            book.index_bits()
        );
        for p in book.patterns() {
            let bits: String = book
                .label_bits(p.id())
                .iter()
                .map(|b| b.to_string())
                .collect();
            let leds: Vec<usize> = p.leds().iter().map(|l| l + 1).collect();
            println!("  {bits:>3} -> LEDs {leds:?}");
        }
    }
    Ok(())
}
