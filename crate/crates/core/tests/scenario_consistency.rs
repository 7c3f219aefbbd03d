//! Every number a scenario reports must be recomputable from the tables it
//! reports alongside.

use iongradim::protocol::{phase_rate, transfer_and_prepare, ZeemanConfig};
use iongradim::scenarios::{quoted, run, ScenarioConfig, ScenarioKind, ScenarioReport, ValueMode, ValueSource};

fn all_reports() -> Vec<ScenarioReport> {
    let kinds = [
        ScenarioKind::three_ion_spin(),
        ScenarioKind::ThreeIonSpin {
            x_moment: iongradim::constants().electron_magnetic_moment.abs(),
            compensation: false,
        },
        ScenarioKind::molecular_state_change(),
        ScenarioKind::double_well(),
        ScenarioKind::ghz_chain(),
    ];
    let mut out = Vec::new();
    for kind in kinds {
        for mode in [ValueMode::Computed, ValueMode::Paper] {
            out.push(run(&ScenarioConfig::new(kind.clone()).with_mode(mode)).unwrap());
        }
    }
    out
}

#[test]
fn trajectories_follow_their_field_tables() {
    for report in all_reports() {
        assert!(!report.trajectories.is_empty(), "{}", report.scenario);
        for t in &report.trajectories {
            let fields = report.field_table(&t.field_table).unwrap().fields();
            let probe = transfer_and_prepare(t.layout.clone(), 1.0).unwrap();
            let rate = phase_rate(&probe, &report.zeeman, &fields).unwrap();
            assert_eq!(rate, t.rate);
            for r in &t.records {
                let expected = rate * r.time;
                assert!(
                    (r.phase - expected).abs() <= 1e-12 * expected.abs().max(1e-300),
                    "{} {}",
                    report.scenario,
                    t.name
                );
                assert!((r.parity - t.contrast * r.phase.cos()).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn quoted_values_never_masquerade_as_computed() {
    for report in all_reports() {
        for q in &report.quantities {
            if q.name.ends_with("_quoted") {
                assert_eq!(q.source, ValueSource::Quoted, "{}", q.name);
            }
        }
        if report.mode == ValueMode::Computed {
            assert!(
                report.field_tables.iter().all(|f| f.source == ValueSource::Computed),
                "{}",
                report.scenario
            );
        }
    }
}

#[test]
fn three_ion_t_pi_matches_rate() {
    let mut cfg = ScenarioConfig::new(ScenarioKind::three_ion_spin()).with_mode(ValueMode::Paper);
    cfg.zeeman = ZeemanConfig::new(2.002).unwrap();
    let r = run(&cfg).unwrap();
    let rate = r.trajectory("spin_up").unwrap().rate;
    assert!((r.value("t_pi").unwrap() - std::f64::consts::PI / rate.abs()).abs() < 1e-9);
    assert!((r.value("t_pi").unwrap() - 26.2413083292684).abs() < 1e-9);
    assert_eq!(r.value("delta_b").unwrap(), quoted::DELTA_B);
}

#[test]
fn computed_fields_show_the_discrepancy() {
    let r = run(&ScenarioConfig::new(ScenarioKind::three_ion_spin())).unwrap();
    assert!((r.value("b_near").unwrap() / 1.68848620534508e-12 - 1.0).abs() < 1e-12);
    assert!((r.value("b_far").unwrap() / 2.11060775668135e-13 - 1.0).abs() < 1e-12);
    assert!((r.value("delta_b").unwrap().abs() / 1.47742542967695e-12 - 1.0).abs() < 1e-12);
    let ratio = r.value("b_near").unwrap() / quoted::B_NEAR;
    assert!(ratio > 2.0 && ratio < 2.3);
}
