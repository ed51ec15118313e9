use stbcsm::config::{RunConfig, Scheme};
use stbcsm::montecarlo::run_sweep;
use stbcsm::report::{self, Comparison, SWEEP_COLUMNS};
use stbcsm::transceiver::Detector;

fn quick(scheme: Scheme, nt: usize, na: usize, m: usize) -> RunConfig {
    let mut c = RunConfig::default().with_scheme(scheme, nt, na, m);
    c.sweep.snr_db = vec![130.0, 145.0, 160.0, f64::INFINITY];
    c.sweep.max_frames = 20_000;
    c.sweep.target_errors = 200;
    c
}

#[test]
fn every_scheme_sweeps_and_is_error_free_without_noise() {
    for (scheme, nt, na, m) in [
        (Scheme::StbcSm, 6, 2, 2),
        (Scheme::StbcSm, 6, 3, 4),
        (Scheme::QostbcSm, 4, 2, 4),
        (Scheme::Masm, 6, 2, 2),
        (Scheme::RcSm, 4, 2, 8),
    ] {
        let c = quick(scheme, nt, na, m);
        let r = report::simulate(&c, &mut |_| {}).unwrap();
        assert_eq!(r.points.len(), 4);
        assert_eq!(r.points[3].bit_errors, 0, "{scheme}");
        assert!(r.points[0].ber >= r.points[2].ber, "{scheme}");
        for p in &r.points {
            assert!((0.0..=0.5 + 1e-9).contains(&p.ber));
            assert!(p.throughput <= r.spectral_efficiency);
        }
    }
}

#[test]
fn detectors_agree_on_paired_seeds() {
    let mut c = quick(Scheme::StbcSm, 6, 2, 4);
    c.sweep.target_errors = u64::MAX;
    c.sweep.max_frames = 10_000;
    let mut a = c.clone();
    a.detector = Detector::JointMl;
    let ra = report::simulate(&a, &mut |_| {}).unwrap();
    let rb = report::simulate(&c, &mut |_| {}).unwrap();
    assert_eq!(ra, rb);
}

#[test]
fn sweep_csv_has_one_row_per_point() {
    let c = quick(Scheme::StbcSm, 6, 2, 2);
    let r = report::simulate(&c, &mut |_| {}).unwrap();
    let csv = report::sweep_csv(&c, &r).unwrap();
    let lines: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(lines[0], SWEEP_COLUMNS);
    assert_eq!(lines.len(), 1 + r.points.len());
    let cols = SWEEP_COLUMNS.split(',').count();
    assert!(lines.iter().all(|l| l.split(',').count() == cols));
    assert!(csv.starts_with(&format!("# config_hash={}", c.hash())));
}

#[test]
fn bound_rows_dominate_at_moderate_snr() {
    let mut c = quick(Scheme::StbcSm, 6, 2, 2);
    c.sweep.snr_db = vec![130.0, 140.0, 150.0];
    let rows = report::bound_rows(&c, &mut |_| {}).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.dominates()));
    assert!(rows.windows(2).all(|w| w[1].ber_bound < w[0].ber_bound));
}

#[test]
fn comparison_curves_share_rates() {
    for (which, pairs) in [(Comparison::Fig5, 2), (Comparison::Fig8, 2)] {
        let curves = which.curves();
        assert_eq!(curves.len(), 2 * pairs);
        for pair in curves.chunks(2) {
            let eta: Vec<f64> = pair
                .iter()
                .map(|&(s, nt, na, m)| stbcsm::analysis::spectral_efficiency(s, nt, na, m).unwrap())
                .collect();
            assert_eq!(eta[0], eta[1], "{which:?}");
        }
    }
}

#[test]
fn config_round_trips_through_json() {
    let mut c = RunConfig::default().with_scheme(Scheme::QostbcSm, 5, 2, 4);
    c.sweep.master_seed = 99;
    let back = RunConfig::from_json(&c.to_json()).unwrap();
    assert_eq!(back.to_json(), c.to_json());
    assert_eq!(back.hash(), c.hash());
    assert_ne!(RunConfig::default().hash(), c.hash());
}

#[test]
fn workers_do_not_change_results() {
    let c = quick(Scheme::QostbcSm, 4, 2, 2);
    let link = c.build_link().unwrap();
    let mut one = c.sweep.clone();
    one.workers = 1;
    let mut four = c.sweep.clone();
    four.workers = 4;
    assert_eq!(
        run_sweep(link.as_ref(), &one).unwrap(),
        run_sweep(link.as_ref(), &four).unwrap()
    );
}
