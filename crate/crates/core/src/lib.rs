//! Space-time block coded spatial modulation (STBC-SM) for indoor visible
//! light downlinks.
//!
//! The crate covers the whole link: line-of-sight Lambertian channel gains,
//! unipolar PAM with complement symbols, optical OSTBC/QOSTBC codebooks,
//! activation-pattern books, joint and two-step ML detection, MASM and RC-SM
//! baselines, closed-form BER bounds, and a deterministic parallel
//! Monte-Carlo engine.
//!
//! ```
//! use stbcsm::prelude::*;
//!
//! let alphabet = build_alphabet(2, 1.0).unwrap();
//! let code = alamouti();
//! let x = [alphabet.levels()[0], alphabet.levels()[1]];
//! let cw = code.instantiate(&x, alphabet.mean_power()).unwrap();
//! assert!((cw[(1, 0)] - 2.0 / 3.0).abs() < 1e-12);
//! ```

pub mod analysis;
pub mod baselines;
pub mod codebook;
pub mod config;
pub mod error;
pub mod geometry;
pub mod link;
pub mod modulation;
pub mod montecarlo;
pub mod report;
pub mod spatial;
pub mod transceiver;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::analysis::{
        achievable_rate, q_function, spectral_efficiency, BoundCalculator, CodewordAveraging,
    };
    pub use crate::baselines::{MasmLink, RcsmLink};
    pub use crate::codebook::{alamouti, ostbc, qostbc, CodeStructure, QostbcParams};
    pub use crate::config::{RunConfig, Scheme};
    pub use crate::geometry::{los_gain, ChannelVector, OpticsConfig, Point3, RoomConfig};
    pub use crate::link::Link;
    pub use crate::modulation::{build_alphabet, BitMapping, PamAlphabet};
    pub use crate::montecarlo::{run_sweep, snr_to_sigma, SweepResult, SweepSpec};
    pub use crate::spatial::{build_patternbook, ActivationPattern, PatternBook};
    pub use crate::transceiver::{Detection, Detector, StbcSmLink};
}
