use eolsr::analysis::{compare_against_reference, validation_report};
use eolsr::evo::{calibrate, calibration_seed, Evaluator, FitnessRecord, SimulationEvaluator};
use eolsr::olsr::{encode_genome, rfc_default, OlsrConfig, ParamSpace};
use eolsr::scenario::{generate_grid_scenario, FlowTemplate, GridSpec, Scenario};
use eolsr::sim::run_simulation;
use eolsr::Nic;

fn scenario(spec: GridSpec, seed: u64) -> Scenario {
    generate_grid_scenario(&spec, 5, &FlowTemplate::default(), seed).unwrap()
}

#[test]
fn rfc_genome_scores_its_own_reference() {
    let s = scenario(GridSpec::u2(20), 1);
    let nic = Nic::default();
    let (ctx, _) = calibrate(&s, &nic, 8).unwrap();
    let eval = SimulationEvaluator::new(&s, nic, ctx);
    let genes = encode_genome(&rfc_default());
    let r = eval.evaluate(&genes, calibration_seed(8)).unwrap();
    assert!(!r.penalized);
    assert!((r.f - (1.0 - 0.1 * ctx.pdr_rfc / 100.0)).abs() < 1e-12, "{}", r.f);
    let again = eval.evaluate(&genes, calibration_seed(8)).unwrap();
    assert_eq!(format!("{r:?}"), format!("{again:?}"));
}

#[test]
fn low_pdr_is_penalized() {
    let s = scenario(GridSpec::u2(20), 2);
    let nic = Nic::default();
    let (mut ctx, m) = calibrate(&s, &nic, 1).unwrap();
    // Pretend the reference delivered twice as much as this run.
    ctx.pdr_rfc = (2.0 * m.pdr.unwrap()).min(100.0);
    let r = FitnessRecord::from_metrics(m.clone(), &ctx);
    assert_eq!(r.penalized, m.pdr.unwrap() < 0.85 * ctx.pdr_rfc);
}

#[test]
fn self_comparison_has_zero_gaps() {
    let s = scenario(GridSpec::u2(20), 3);
    let c = compare_against_reference(&s, &rfc_default(), &Nic::default(), 4).unwrap();
    assert_eq!(c.gap_energy, 0.0);
    assert_eq!(c.gap_pdr, Some(0.0));
}

#[test]
fn slowest_intervals_send_less_control() {
    let s = scenario(GridSpec::u1(), 4);
    let space = ParamSpace::standard();
    let slow = OlsrConfig {
        hello_interval: 15.0,
        refresh_interval: 15.0,
        tc_interval: 35.0,
        ..rfc_default()
    };
    assert!(space.contains(&encode_genome(&slow)));
    let c = compare_against_reference(&s, &slow, &Nic::default(), 5).unwrap();
    assert!(c.candidate.control_transmissions < c.reference.control_transmissions);
}

#[test]
fn single_cell_report_matches_simulation() {
    let s = scenario(GridSpec::u2(20), 5);
    let nic = Nic::default();
    let r = validation_report(
        &[("rfc".into(), rfc_default())],
        std::slice::from_ref(&s),
        &nic,
        &[6],
        1,
    )
    .unwrap();
    let m = run_simulation(&s, &rfc_default(), &nic, 6).unwrap();
    assert_eq!(r.sections.len(), 2);
    assert_eq!(r.sections[0].label, "medium");
    let row = &r.sections[1].rows[0];
    assert_eq!(row.values[2], Some(m.e_total()));
    assert_eq!(row.values[4], m.pdr);
    assert_eq!(row.runs, 1);
    assert_eq!(r.runs[0], m.row(&s.name, "rfc", 6));
}

#[test]
fn duplicated_config_gives_identical_rows() {
    let scenarios = vec![scenario(GridSpec::u1(), 6), scenario(GridSpec::u3(30), 7)];
    let configs = vec![("a".to_string(), rfc_default()), ("b".to_string(), rfc_default())];
    let r = validation_report(&configs, &scenarios, &Nic::default(), &[1, 2], 2).unwrap();
    let labels: Vec<&str> = r.sections.iter().map(|s| s.label.as_str()).collect();
    assert_eq!(labels, ["small", "large", "overall"]);
    for section in &r.sections {
        assert_eq!(section.rows[0].values, section.rows[1].values);
        assert_eq!(section.rows[0].best, section.rows[1].best);
    }
    assert_eq!(r.runs.len(), 8);
    let mut csv = Vec::new();
    r.write_csv(&mut csv).unwrap();
    assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 7);
    assert!(r.to_text().contains("overall"));
}

#[test]
fn energy_aware_config_wins_energy_columns() {
    let scenarios: Vec<Scenario> = (0..5)
        .map(|i| scenario(GridSpec::u2(24 + 2 * i), 20 + i as u64))
        .collect();
    let configs = vec![
        ("rfc".to_string(), rfc_default()),
        ("best".to_string(), OlsrConfig::ENERGY_AWARE),
    ];
    let r = validation_report(&configs, &scenarios, &Nic::default(), &[3], 1).unwrap();
    let overall = r.sections.last().unwrap();
    let (rfc, best) = (&overall.rows[0], &overall.rows[1]);
    assert!(best.values[2] < rfc.values[2]);
    assert!(best.values[6] < rfc.values[6]);
    assert!(best.best[2] && !rfc.best[2]);
}
