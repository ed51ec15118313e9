//! Building a run from a JSON config and printing its CSV report.

use stbcsm::prelude::*;
use stbcsm::report;

const CONFIG: &str = r#"{
    "scheme": "qostbc-sm",
    "nt": 4,
    "na": 2,
    "m": 4,
    "room": { "pd_position": [1.2, 3.1, 0.8] },
    "sweep": { "snr_db": [140, 150, 160], "max_frames": 50000, "master_seed": 42 }
}"#;

fn main() -> stbcsm::Result<()> {
    let cfg = RunConfig::from_json(CONFIG)?;
    cfg.validate()?;
    let r = report::simulate(&cfg, &mut |_| {})?;
    print!("{}", report::sweep_csv(&cfg, &r)?);
    Ok(())
}
