//! Room layout and line-of-sight optical channel gains.
//!
//! LEDs are ceiling mounted and radiate straight down with a generalized
//! Lambertian pattern. The photodiode sits on a horizontal plane and sees
//! each LED through an optical filter and a non-imaging concentrator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spatial::{ActivationPattern, PatternBook};

/// A point (or direction) in room coordinates, meters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn sub(self, other: Point3) -> Point3 {
        Point3::new(self.x - other.x, self.y - other.y, self.z - other.z)
    }

    pub fn dot(self, other: Point3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }
}

impl From<[f64; 3]> for Point3 {
    fn from(p: [f64; 3]) -> Self {
        Point3::new(p[0], p[1], p[2])
    }
}

impl From<Point3> for [f64; 3] {
    fn from(p: Point3) -> Self {
        [p.x, p.y, p.z]
    }
}

/// Photodiode height above the floor.
pub const PD_HEIGHT: f64 = 0.8;

/// Default horizontal photodiode position. The user is placed off every
/// symmetry axis of the default LED grids so that no two activation
/// patterns share the same ordered gain vector.
pub const DEFAULT_PD_XY: (f64, f64) = (1.9, 1.7);

/// Room dimensions and transceiver placement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoomConfig {
    pub width: f64,
    pub depth: f64,
    pub height: f64,
    pub led_positions: Vec<Point3>,
    pub pd_position: Point3,
    pub pd_orientation: Point3,
}

impl RoomConfig {
    /// 5 x 5 x 4 m room with the default grid for `nt` LEDs and the
    /// photodiode at [`DEFAULT_PD_XY`], 0.8 m above the floor, facing up.
    pub fn default_layout(nt: usize) -> Result<Self> {
        let (width, depth, height) = (5.0, 5.0, 4.0);
        let room = RoomConfig {
            width,
            depth,
            height,
            led_positions: default_led_grid(nt, width, depth, height)?,
            pd_position: Point3::new(DEFAULT_PD_XY.0, DEFAULT_PD_XY.1, PD_HEIGHT),
            pd_orientation: Point3::new(0.0, 0.0, 1.0),
        };
        room.validate()?;
        Ok(room)
    }

    pub fn nt(&self) -> usize {
        self.led_positions.len()
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("width", self.width),
            ("depth", self.depth),
            ("height", self.height),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Geometry(format!(
                    "room {name} must be positive, got {v}"
                )));
            }
        }
        if self.led_positions.is_empty() {
            return Err(Error::Geometry("room has no LEDs".into()));
        }
        for (i, p) in self.led_positions.iter().enumerate() {
            if !self.contains(*p) {
                return Err(Error::Geometry(format!(
                    "LED {} at ({}, {}, {}) lies outside the room",
                    i + 1,
                    p.x,
                    p.y,
                    p.z
                )));
            }
            if (p.z - self.height).abs() > 1e-9 {
                return Err(Error::Geometry(format!(
                    "LED {} must be mounted at ceiling height {}, got z = {}",
                    i + 1,
                    self.height,
                    p.z
                )));
            }
            for (j, q) in self.led_positions.iter().enumerate().skip(i + 1) {
                if p.sub(*q).norm() < 1e-9 {
                    return Err(Error::Geometry(format!(
                        "LEDs {} and {} share the same position",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        let pd = self.pd_position;
        let strictly_inside = pd.x > 0.0
            && pd.x < self.width
            && pd.y > 0.0
            && pd.y < self.depth
            && pd.z > 0.0
            && pd.z < self.height;
        if !strictly_inside {
            return Err(Error::Geometry(format!(
                "photodiode at ({}, {}, {}) is not strictly inside the room",
                pd.x, pd.y, pd.z
            )));
        }
        let n = self.pd_orientation.norm();
        if !(n.is_finite() && (n - 1.0).abs() < 1e-9) {
            return Err(Error::Geometry(
                "photodiode orientation must be a unit vector".into(),
            ));
        }
        Ok(())
    }

    fn contains(&self, p: Point3) -> bool {
        (0.0..=self.width).contains(&p.x)
            && (0.0..=self.depth).contains(&p.y)
            && (0.0..=self.height).contains(&p.z)
    }
}

/// Centered symmetric grids at ceiling height.
///
/// Nt = 4 is a 2 x 2 square of side 2 m; Nt = 6 a 2 x 3 grid; Nt = 7 adds
/// the room center; Nt = 8 adds the room center and the middle of the
/// front row. Smaller counts are laid out on the same footprint.
pub fn default_led_grid(nt: usize, width: f64, depth: f64, height: f64) -> Result<Vec<Point3>> {
    let (cx, cy) = (width / 2.0, depth / 2.0);
    let xs = [cx - 1.0, cx + 1.0];
    let p = |x: f64, y: f64| Point3::new(x, y, height);
    let grid6 = || -> Vec<Point3> {
        [cy - 1.5, cy, cy + 1.5]
            .iter()
            .flat_map(|&y| xs.iter().map(move |&x| p(x, y)))
            .collect()
    };
    let leds = match nt {
        1 => vec![p(cx, cy)],
        2 => vec![p(xs[0], cy), p(xs[1], cy)],
        3 => vec![p(xs[0], cy - 1.0), p(xs[1], cy - 1.0), p(cx, cy + 1.0)],
        4 | 5 => {
            let mut v: Vec<Point3> = [cy - 1.0, cy + 1.0]
                .iter()
                .flat_map(|&y| xs.iter().map(move |&x| p(x, y)))
                .collect();
            if nt == 5 {
                v.push(p(cx, cy));
            }
            v
        }
        6 => grid6(),
        7 => {
            let mut v = grid6();
            v.push(p(cx, cy));
            v
        }
        8 => {
            let mut v = grid6();
            v.push(p(cx, cy));
            v.push(p(cx, cy - 1.5));
            v
        }
        _ => {
            return Err(Error::Geometry(format!(
                "no default layout for {nt} LEDs (supported: 1..=8)"
            )))
        }
    };
    Ok(leds)
}

/// Receiver and emitter optics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpticsConfig {
    /// Photodiode area, m^2.
    pub pd_area: f64,
    /// LED half-power semi-angle, degrees.
    pub half_power_semi_angle: f64,
    /// Photodiode field of view, degrees.
    pub fov: f64,
    pub refractive_index: f64,
    pub filter_gain: f64,
    /// Photodiode responsivity, A/W.
    pub responsivity: f64,
}

impl Default for OpticsConfig {
    fn default() -> Self {
        Self {
            pd_area: 1e-4,
            half_power_semi_angle: 60.0,
            fov: 60.0,
            refractive_index: 1.5,
            filter_gain: 1.0,
            responsivity: 1.0,
        }
    }
}

impl OpticsConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| Err(Error::Geometry(format!("invalid {what}: {v}")));
        if !(self.pd_area > 0.0) {
            return bad("pd_area", self.pd_area);
        }
        if !(self.half_power_semi_angle > 0.0 && self.half_power_semi_angle <= 90.0) {
            return bad("half_power_semi_angle", self.half_power_semi_angle);
        }
        if !(self.fov > 0.0 && self.fov <= 90.0) {
            return bad("fov", self.fov);
        }
        if !(self.refractive_index >= 1.0) {
            return bad("refractive_index", self.refractive_index);
        }
        if !(self.filter_gain > 0.0) {
            return bad("filter_gain", self.filter_gain);
        }
        if !(self.responsivity > 0.0) {
            return bad("responsivity", self.responsivity);
        }
        Ok(())
    }

    /// m = -ln 2 / ln cos(phi_1/2).
    pub fn lambertian_order(&self) -> f64 {
        -std::f64::consts::LN_2 / self.half_power_semi_angle.to_radians().cos().ln()
    }

    /// Concentrator gain n^2 / sin^2(fov) inside the field of view.
    pub fn concentrator_gain(&self) -> f64 {
        let s = self.fov.to_radians().sin();
        self.refractive_index * self.refractive_index / (s * s)
    }
}

/// LoS gains of the active LEDs of one pattern, ascending LED index.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelVector {
    pub gains: Vec<f64>,
    pub pattern_id: usize,
}

impl ChannelVector {
    pub fn norm_sqr(&self) -> f64 {
        self.gains.iter().map(|g| g * g).sum()
    }

    pub fn len(&self) -> usize {
        self.gains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gains.is_empty()
    }
}

/// LoS gain for a downward LED and an upward-facing photodiode.
pub fn los_gain(led: Point3, pd: Point3, optics: &OpticsConfig) -> Result<f64> {
    los_gain_oriented(led, pd, Point3::new(0.0, 0.0, 1.0), optics)
}

/// LoS gain with an arbitrary photodiode normal.
pub fn los_gain_oriented(
    led: Point3,
    pd: Point3,
    pd_normal: Point3,
    optics: &OpticsConfig,
) -> Result<f64> {
    let v = led.sub(pd);
    let d = v.norm();
    if d < 1e-12 {
        return Err(Error::Geometry(
            "LED and photodiode coincide (zero distance)".into(),
        ));
    }
    // irradiance angle at the LED, measured from its downward axis
    let cos_irr = v.z / d;
    let cos_inc = (pd_normal.dot(v) / (pd_normal.norm() * d)).clamp(-1.0, 1.0);
    if cos_irr <= 0.0 || cos_inc <= 0.0 {
        return Ok(0.0);
    }
    if cos_inc.acos() > optics.fov.to_radians() {
        return Ok(0.0);
    }
    let m = optics.lambertian_order();
    let radiant = (m + 1.0) / (2.0 * std::f64::consts::PI) * cos_irr.powf(m);
    Ok(optics.pd_area / (d * d)
        * radiant
        * optics.filter_gain
        * optics.concentrator_gain()
        * cos_inc)
}

/// Gains of every LED in the room, in LED order.
pub fn gain_table(room: &RoomConfig, optics: &OpticsConfig) -> Result<Vec<f64>> {
    room.led_positions
        .iter()
        .map(|&led| los_gain_oriented(led, room.pd_position, room.pd_orientation, optics))
        .collect()
}

pub fn channel_for_pattern(
    room: &RoomConfig,
    optics: &OpticsConfig,
    pattern: &ActivationPattern,
) -> Result<ChannelVector> {
    let gains = pattern
        .leds()
        .iter()
        .map(|&i| {
            let led = room.led_positions.get(i).copied().ok_or_else(|| {
                Error::Pattern(format!(
                    "LED {} is not in a room with {} LEDs",
                    i + 1,
                    room.nt()
                ))
            })?;
            los_gain_oriented(led, room.pd_position, room.pd_orientation, optics)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ChannelVector {
        gains,
        pattern_id: pattern.id(),
    })
}

/// Channel vectors for every pattern of a book, in label order.
pub fn channels_for_book(
    room: &RoomConfig,
    optics: &OpticsConfig,
    book: &PatternBook,
) -> Result<Vec<ChannelVector>> {
    book.patterns()
        .iter()
        .map(|p| channel_for_pattern(room, optics, p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table1() -> OpticsConfig {
        OpticsConfig::default()
    }

    #[test]
    fn center_gain_matches_hand_evaluation() {
        let h = los_gain(
            Point3::new(2.5, 2.5, 4.0),
            Point3::new(2.5, 2.5, 0.8),
            &table1(),
        )
        .unwrap();
        // A / d^2 * (1/pi) * 3 with d = 3.2
        let expected = 1e-4 / (3.2 * 3.2) / std::f64::consts::PI * 3.0;
        assert!((h - expected).abs() < 1e-18);
        assert!((h - 9.325e-6).abs() < 1e-9);
    }

    #[test]
    fn lambertian_order_is_one_at_sixty_degrees() {
        assert!((table1().lambertian_order() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn outside_fov_is_zero() {
        let optics = table1();
        let pd = Point3::new(0.0, 0.0, 0.0);
        let angle = 61f64.to_radians();
        let led = Point3::new(angle.tan(), 0.0, 1.0);
        assert_eq!(los_gain(led, pd, &optics).unwrap(), 0.0);
        let angle = 59f64.to_radians();
        let led = Point3::new(angle.tan(), 0.0, 1.0);
        assert!(los_gain(led, pd, &optics).unwrap() > 0.0);
    }

    #[test]
    fn inverse_square_at_normal_incidence() {
        let optics = table1();
        let pd = Point3::new(1.0, 1.0, 0.0);
        let h1 = los_gain(Point3::new(1.0, 1.0, 1.5), pd, &optics).unwrap();
        let h2 = los_gain(Point3::new(1.0, 1.0, 3.0), pd, &optics).unwrap();
        assert!((h1 / h2 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn zero_distance_rejected() {
        let p = Point3::new(1.0, 1.0, 1.0);
        assert!(los_gain(p, p, &table1()).is_err());
    }

    #[test]
    fn gain_decreases_with_distance() {
        let optics = table1();
        let pd = Point3::new(0.0, 0.0, 0.0);
        let mut last = f64::INFINITY;
        for k in 1..50 {
            let h = los_gain(Point3::new(0.0, 0.0, 0.1 * k as f64), pd, &optics).unwrap();
            assert!(h < last);
            last = h;
        }
    }

    #[test]
    fn default_layouts_scale() {
        let optics = table1();
        for nt in 1..=8 {
            let room = RoomConfig::default_layout(nt).unwrap();
            assert_eq!(room.nt(), nt);
            for g in gain_table(&room, &optics).unwrap() {
                assert!((1e-7..=1e-4).contains(&g), "nt={nt} gain {g}");
            }
        }
    }

    #[test]
    fn pattern_gains_follow_led_order() {
        let optics = table1();
        let room = RoomConfig::default_layout(6).unwrap();
        let table = gain_table(&room, &optics).unwrap();
        let pattern = ActivationPattern::new(3, vec![1, 4]);
        let ch = channel_for_pattern(&room, &optics, &pattern).unwrap();
        assert_eq!(ch.gains, vec![table[1], table[4]]);
        assert_eq!(ch.pattern_id, 3);
        for g in &ch.gains {
            assert!(*g > 0.0 && *g < 1e-4);
        }
    }

    #[test]
    fn directly_below_is_the_floor_maximum() {
        let optics = table1();
        let led = Point3::new(2.0, 2.0, 4.0);
        let below = los_gain(led, Point3::new(2.0, 2.0, 0.8), &optics).unwrap();
        for i in 0..=20 {
            for j in 0..=20 {
                let pd = Point3::new(0.25 * i as f64, 0.25 * j as f64, 0.8);
                assert!(los_gain(led, pd, &optics).unwrap() <= below + 1e-20);
            }
        }
    }

    #[test]
    fn permuting_leds_keeps_gains() {
        let optics = table1();
        let room = RoomConfig::default_layout(6).unwrap();
        let mut swapped = room.clone();
        swapped.led_positions.reverse();
        let a = gain_table(&room, &optics).unwrap();
        let mut b = gain_table(&swapped, &optics).unwrap();
        b.reverse();
        assert_eq!(a, b);
    }

    #[test]
    fn room_validation() {
        let mut room = RoomConfig::default_layout(4).unwrap();
        room.led_positions[1] = room.led_positions[0];
        assert!(room.validate().is_err());
        let mut room = RoomConfig::default_layout(4).unwrap();
        room.pd_position = Point3::new(5.0, 1.0, 0.8);
        assert!(room.validate().is_err());
        let mut room = RoomConfig::default_layout(4).unwrap();
        room.led_positions[0].z = 3.0;
        assert!(room.validate().is_err());
    }
}
