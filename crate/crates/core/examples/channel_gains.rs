//! LoS gains from every LED of the default room to the photodiode, plus a
//! coarse gain map across the receiver plane.

use stbcsm::prelude::*;

fn main() -> stbcsm::Result<()> {
    let room = RoomConfig::default_layout(6)?;
    let optics = OpticsConfig::default();
    println!("photodiode at {:?}", room.pd_position);
    for (i, led) in room.led_positions.iter().enumerate() {
        let g = los_gain(*led, room.pd_position, &optics)?;
        println!(
            "LED {} at ({:.2}, {:.2}, {:.2}): h = {g:.4e}",
            i + 1,
            led.x,
            led.y,
            led.z
        );
    }

    println!("\nsum of gains over the receiver plane (x across, y down):");
    for y in 0..=5 {
        let row: Vec<String> = (0..=5)
            .map(|x| {
                let pd = Point3::new(x as f64, y as f64, room.pd_position.z);
                let total: f64 = room
                    .led_positions
                    .iter()
                    .map(|&l| los_gain(l, pd, &optics).unwrap())
                    .sum();
                format!("{total:.2e}")
            })
            .collect();
        println!("{}", row.join(" "));
    }
    Ok(())
}
