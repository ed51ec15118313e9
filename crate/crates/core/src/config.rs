//! Run configuration: JSON file with defaults, validation and link building.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::CodewordAveraging;
use crate::baselines::{MasmLink, RcsmLink};
use crate::codebook::{optimize_qostbc_params, ostbc, qostbc, CodeStructure, QostbcParams};
use crate::error::{Error, Result};
use crate::geometry::{
    channels_for_book, default_led_grid, OpticsConfig, Point3, RoomConfig, DEFAULT_PD_XY, PD_HEIGHT,
};
use crate::link::Link;
use crate::modulation::{BitMapping, PamAlphabet};
use crate::montecarlo::SweepSpec;
use crate::spatial::PatternBook;
use crate::transceiver::{Detector, StbcSmLink};

/// Environment variable naming the default config file.
pub const CONFIG_ENV: &str = "STBCSM_CONFIG";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    #[default]
    StbcSm,
    QostbcSm,
    Masm,
    RcSm,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::StbcSm, Scheme::QostbcSm, Scheme::Masm, Scheme::RcSm];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::StbcSm => "stbc-sm",
            Scheme::QostbcSm => "qostbc-sm",
            Scheme::Masm => "masm",
            Scheme::RcSm => "rc-sm",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| {
                Error::config(
                    "scheme",
                    format!("unknown scheme `{s}`, expected stbc-sm, qostbc-sm, masm or rc-sm"),
                )
            })
    }
}

/// Room section; missing LED or photodiode positions fall back to the
/// default grid and receiver spot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RoomSpec {
    pub width: f64,
    pub depth: f64,
    pub height: f64,
    pub led_positions: Option<Vec<Point3>>,
    pub pd_position: Option<Point3>,
    pub pd_orientation: Point3,
}

impl Default for RoomSpec {
    fn default() -> Self {
        Self {
            width: 5.0,
            depth: 5.0,
            height: 4.0,
            led_positions: None,
            pd_position: None,
            pd_orientation: Point3::new(0.0, 0.0, 1.0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QostbcKeyword {
    /// Grid search for the weights that keep symbol pairs apart.
    Optimize,
    /// a = c = 0.6, b = d = 0.4.
    Default,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QostbcSetting {
    Keyword(QostbcKeyword),
    Fixed(QostbcParams),
}

impl Default for QostbcSetting {
    fn default() -> Self {
        QostbcSetting::Keyword(QostbcKeyword::Optimize)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub room: RoomSpec,
    pub optics: OpticsConfig,
    pub scheme: Scheme,
    pub nt: usize,
    pub na: usize,
    pub m: usize,
    pub mean_power: f64,
    pub mapping: BitMapping,
    pub detector: Detector,
    pub qostbc: QostbcSetting,
    pub qostbc_grid_step: f64,
    /// Activation patterns as 1-based LED lists, in label order.
    pub patterns: Option<Vec<Vec<usize>>>,
    pub bound_averaging: CodewordAveraging,
    pub sweep: SweepSpec,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            room: RoomSpec::default(),
            optics: OpticsConfig::default(),
            scheme: Scheme::StbcSm,
            nt: 6,
            na: 2,
            m: 2,
            mean_power: 1.0,
            mapping: BitMapping::Gray,
            detector: Detector::TwoStep,
            qostbc: QostbcSetting::default(),
            qostbc_grid_step: 0.01,
            patterns: None,
            bound_averaging: CodewordAveraging::Auto,
            sweep: SweepSpec::default(),
            output: None,
        }
    }
}

/// Reads and validates a config file. Empty files give the defaults.
pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    RunConfig::from_json(&text)
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        if text.trim().is_empty() {
            return Ok(Self::default());
        }
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let key = if path == "." {
                "<root>".to_string()
            } else {
                path
            };
            Error::config(key, e.inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let canon = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(canon.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.nt == 0 || self.nt > PatternBook::MAX_LEDS {
            return Err(Error::config(
                "nt",
                format!("must be in 1..={}, got {}", PatternBook::MAX_LEDS, self.nt),
            ));
        }
        if self.na == 0 || self.na > self.nt {
            return Err(Error::config(
                "na, nt",
                format!("na must be in 1..=nt, got na={} nt={}", self.na, self.nt),
            ));
        }
        if self.m < 2 || !self.m.is_power_of_two() {
            return Err(Error::config(
                "m",
                format!("power of 2 required (at least 2), got {}", self.m),
            ));
        }
        if !(self.mean_power.is_finite() && self.mean_power > 0.0) {
            return Err(Error::config("mean_power", "must be positive"));
        }
        match self.scheme {
            Scheme::StbcSm if self.na < 2 => {
                return Err(Error::config("na", "stbc-sm needs at least 2 active LEDs"));
            }
            Scheme::QostbcSm if self.na != 2 => {
                return Err(Error::config("na", "qostbc-sm needs exactly 2 active LEDs"));
            }
            _ => {}
        }
        if let QostbcSetting::Fixed(p) = self.qostbc {
            p.validate()
                .map_err(|e| Error::config("qostbc", e.to_string()))?;
        }
        if !(self.qostbc_grid_step > 0.0 && self.qostbc_grid_step < 0.5) {
            return Err(Error::config("qostbc_grid_step", "must lie in (0, 0.5)"));
        }
        self.optics
            .validate()
            .map_err(|e| Error::config("optics", e.to_string()))?;
        if let Some(leds) = &self.room.led_positions {
            if leds.len() != self.nt {
                return Err(Error::config(
                    "room.led_positions",
                    format!("lists {} LEDs but nt is {}", leds.len(), self.nt),
                ));
            }
        }
        self.room()
            .map_err(|e| Error::config("room", e.to_string()))?;
        self.book()
            .map_err(|e| Error::config("patterns", e.to_string()))?;
        self.sweep
            .validate()
            .map_err(|e| Error::config("sweep", e.to_string()))?;
        Ok(())
    }

    pub fn room(&self) -> Result<RoomConfig> {
        let r = &self.room;
        let led_positions = match &r.led_positions {
            Some(p) => p.clone(),
            None => default_led_grid(self.nt, r.width, r.depth, r.height)?,
        };
        let room = RoomConfig {
            width: r.width,
            depth: r.depth,
            height: r.height,
            led_positions,
            pd_position: r.pd_position.unwrap_or(Point3::new(
                DEFAULT_PD_XY.0,
                DEFAULT_PD_XY.1,
                PD_HEIGHT,
            )),
            pd_orientation: r.pd_orientation,
        };
        room.validate()?;
        Ok(room)
    }

    pub fn book(&self) -> Result<PatternBook> {
        match &self.patterns {
            None => PatternBook::new(self.nt, self.na),
            Some(sets) => {
                let zero_based = sets
                    .iter()
                    .map(|s| {
                        s.iter()
                            .map(|&l| {
                                l.checked_sub(1)
                                    .ok_or_else(|| Error::Pattern("LED numbers are 1-based".into()))
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                PatternBook::with_patterns(self.nt, self.na, zero_based)
            }
        }
    }

    pub fn alphabet(&self) -> Result<PamAlphabet> {
        PamAlphabet::new(self.m, self.mean_power, self.mapping)
    }

    /// Code for the STBC-based schemes, with QOSTBC weights resolved.
    pub fn code(&self) -> Result<CodeStructure> {
        match self.scheme {
            Scheme::QostbcSm => qostbc(self.qostbc_params()?),
            _ => ostbc(self.na),
        }
    }

    pub fn qostbc_params(&self) -> Result<QostbcParams> {
        match self.qostbc {
            QostbcSetting::Fixed(p) => Ok(p),
            QostbcSetting::Keyword(QostbcKeyword::Default) => Ok(QostbcParams::default()),
            QostbcSetting::Keyword(QostbcKeyword::Optimize) => {
                let book = self.book()?;
                let channels = channels_for_book(&self.room()?, &self.optics, &book)?;
                optimize_qostbc_params(&self.alphabet()?, &channels, self.qostbc_grid_step)
            }
        }
    }

    /// STBC-SM or QOSTBC-SM link; errors for the single-slot baselines.
    pub fn build_stbc(&self) -> Result<StbcSmLink> {
        if !matches!(self.scheme, Scheme::StbcSm | Scheme::QostbcSm) {
            return Err(Error::config(
                "scheme",
                format!("{} is not a space-time coded scheme", self.scheme),
            ));
        }
        StbcSmLink::from_geometry(
            &self.room()?,
            &self.optics,
            self.book()?,
            self.code()?,
            self.alphabet()?,
            self.detector,
        )
    }

    pub fn build_link(&self) -> Result<Box<dyn Link>> {
        let room = self.room()?;
        Ok(match self.scheme {
            Scheme::StbcSm | Scheme::QostbcSm => Box::new(self.build_stbc()?),
            Scheme::Masm => Box::new(MasmLink::from_geometry(
                &room,
                &self.optics,
                self.book()?,
                self.alphabet()?,
            )?),
            Scheme::RcSm => Box::new(RcsmLink::from_geometry(
                &room,
                &self.optics,
                self.book()?,
                self.alphabet()?,
            )?),
        })
    }

    /// Same config with another scheme/size, for side-by-side runs.
    pub fn with_scheme(&self, scheme: Scheme, nt: usize, na: usize, m: usize) -> Self {
        let mut c = self.clone();
        c.scheme = scheme;
        c.nt = nt;
        c.na = na;
        c.m = m;
        if c.room.led_positions.as_ref().is_some_and(|l| l.len() != nt) {
            c.room.led_positions = None;
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn key_of(r: Result<RunConfig>) -> String {
        match r {
            Err(Error::Config { key, .. }) => key,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn empty_gives_defaults() {
        let c = RunConfig::from_json("").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!((c.scheme, c.nt, c.na, c.m), (Scheme::StbcSm, 6, 2, 2));
        assert_eq!(c.optics, OpticsConfig::default());
        assert_eq!(RunConfig::from_json("{}").unwrap(), c);
        let room = c.room().unwrap();
        assert_eq!((room.width, room.depth, room.height), (5.0, 5.0, 4.0));
        assert_eq!(room.pd_position.z, 0.8);
    }

    #[test]
    fn round_trip() {
        let c = RunConfig {
            scheme: Scheme::QostbcSm,
            nt: 4,
            m: 8,
            ..RunConfig::default()
        };
        assert_eq!(RunConfig::from_json(&c.to_json()).unwrap(), c);
        assert_eq!(c.hash(), RunConfig::from_json(&c.to_json()).unwrap().hash());
        assert_ne!(c.hash(), RunConfig::default().hash());
        assert_eq!(c.hash().len(), 64);
    }

    #[test]
    fn unknown_keys_name_their_path() {
        assert_eq!(key_of(RunConfig::from_json(r#"{"colour": 1}"#)), "colour");
        let e = RunConfig::from_json(r#"{"sweep": {"max_frame": 1}}"#).unwrap_err();
        assert!(e.to_string().contains("sweep"), "{e}");
        assert!(e.to_string().contains("max_frame"), "{e}");
        let e = RunConfig::from_json(r#"{"optics": {"fov_deg": 1}}"#).unwrap_err();
        assert!(e.to_string().contains("optics") && e.to_string().contains("fov_deg"));
        assert_eq!(key_of(RunConfig::from_json(r#"{"nt": "six"}"#)), "nt");
    }

    #[test]
    fn cross_field_errors() {
        let e = RunConfig::from_json(r#"{"na": 5, "nt": 4}"#).unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("na") && msg.contains("nt"), "{msg}");
        let e = RunConfig::from_json(r#"{"m": 3}"#).unwrap_err();
        assert!(e.to_string().contains("power of 2 required"));
        assert_eq!(
            key_of(RunConfig::from_json(r#"{"scheme": "qostbc-sm", "na": 3}"#)),
            "na"
        );
        assert_eq!(
            key_of(RunConfig::from_json(r#"{"sweep": {"target_errors": 5}}"#)),
            "sweep"
        );
        assert_eq!(
            key_of(RunConfig::from_json(r#"{"patterns": [[1,2],[2,3],[3,4]]}"#)),
            "patterns"
        );
        assert_eq!(
            key_of(RunConfig::from_json(
                r#"{"room": {"led_positions": [[1,1,4]]}}"#
            )),
            "room.led_positions"
        );
        assert_eq!(
            key_of(RunConfig::from_json(
                r#"{"qostbc": {"a": 0.5, "b": 0.6, "c": 0.5, "d": 0.5}}"#
            )),
            "qostbc"
        );
    }

    #[test]
    fn scheme_names() {
        for s in Scheme::ALL {
            assert_eq!(s.as_str().parse::<Scheme>().unwrap(), s);
        }
        assert!("stbc".parse::<Scheme>().is_err());
    }

    #[test]
    fn builds_every_scheme() {
        let base = RunConfig::default();
        let cases = [
            (Scheme::StbcSm, 6, 2, 2, 2.5),
            (Scheme::QostbcSm, 4, 2, 8, 7.0),
            (Scheme::Masm, 6, 2, 2, 5.0),
            (Scheme::RcSm, 4, 2, 32, 7.0),
        ];
        for (s, nt, na, m, eta) in cases {
            let c = base.with_scheme(s, nt, na, m);
            c.validate().unwrap();
            let l = c.build_link().unwrap();
            assert_eq!(l.spectral_efficiency(), eta);
            assert_eq!(l.scheme(), s.as_str());
        }
        assert!(base
            .with_scheme(Scheme::Masm, 6, 2, 2)
            .build_stbc()
            .is_err());
    }

    #[test]
    fn optimized_qostbc_weights_differ_from_default() {
        let c = RunConfig::default().with_scheme(Scheme::QostbcSm, 4, 2, 8);
        let p = c.qostbc_params().unwrap();
        assert!(p.is_symmetric());
        assert_ne!(p, QostbcParams::default());
        let fixed = RunConfig {
            qostbc: QostbcSetting::Keyword(QostbcKeyword::Default),
            ..c
        };
        assert_eq!(fixed.qostbc_params().unwrap(), QostbcParams::default());
        let parsed: RunConfig =
            RunConfig::from_json(r#"{"qostbc": {"a": 0.3, "b": 0.7, "c": 0.3, "d": 0.7}}"#)
                .unwrap();
        assert_eq!(
            parsed.qostbc,
            QostbcSetting::Fixed(QostbcParams::symmetric(0.3).unwrap())
        );
    }

    #[test]
    fn custom_patterns_are_one_based() {
        let c = RunConfig::from_json(r#"{"nt": 4, "patterns": [[1,4],[2,3]]}"#).unwrap();
        let b = c.book().unwrap();
        assert_eq!(b.patterns()[0].leds(), &[0, 3]);
        assert!(RunConfig::from_json(r#"{"nt": 4, "patterns": [[0,1],[2,3]]}"#).is_err());
    }

    #[test]
    fn reads_files() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, r#"{{"m": 4, "sweep": {{"snr_db": [150, 160]}}}}"#).unwrap();
        let c = parse_config(f.path()).unwrap();
        assert_eq!(c.m, 4);
        assert_eq!(c.sweep.snr_db, vec![150.0, 160.0]);
        assert!(parse_config(Path::new("/nonexistent/cfg.json")).is_err());
    }
}
