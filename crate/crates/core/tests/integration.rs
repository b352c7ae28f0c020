//! Cross-module scenarios through the public API only.

use std::f64::consts::PI;

use num_complex::Complex64;

use emdet::farfield::{self, Cut, DipolePairGeometry};
use emdet::onephoton::{self, FieldScale, OnePhotonState};
use emdet::resonant::{self, DriveSpec, ResonantDetector};
use emdet::response::ComplexResponse;
use emdet::sampler::{self, SamplerConfig};

const K: f64 = 2.0 * PI;

#[test]
fn counting_experiment_recovers_closed_form_fringe() {
    // sample events for a detector, estimate visibility and phase from the
    // counts, and compare against the closed-form fringe summary
    let zeta = ComplexResponse::real(0.4).unwrap();
    let scale = FieldScale::default();
    let phi = 1.1;
    let state = OnePhotonState::from_relative_phase(phi);
    let cfg = SamplerConfig::for_wavenumber(300_000, 5, 64, K).unwrap();

    let events = sampler::sample_positions(&state, &zeta, &scale, K, &cfg).unwrap();
    let estimate = sampler::estimate_visibility(&events, K, &cfg).unwrap();
    let summary = onephoton::fringe_summary(&zeta, &scale);

    assert!((estimate.v_hat - summary.visibility).abs() <= 5.0 * estimate.v_err);
    // the estimated phase tracks the fringe maximum phi - delta
    let expected = phi - summary.phase_offset;
    let wrapped = (estimate.phase_hat - expected).rem_euclid(2.0 * PI);
    let dist = wrapped.min(2.0 * PI - wrapped);
    assert!(dist < 0.02, "phase mismatch {dist}");

    let chi = sampler::histogram_chi_square(&events, &state, &zeta, &scale, K, &cfg).unwrap();
    assert!(chi.p_value > 0.001);
}

#[test]
fn povm_reproduces_fringe_through_the_scan_table() {
    // probability column of a fringe scan equals the POVM expectation row
    // by row
    let zeta = ComplexResponse::new(Complex64::new(0.3, -0.2)).unwrap();
    let scale = FieldScale::new(1.4).unwrap();
    let state = OnePhotonState::from_relative_phase(-0.5);
    let table =
        onephoton::fringe_scan(&state, &zeta, &scale, K, (0.0, PI / K), 257).unwrap();
    let xs = table.column("x").unwrap();
    let ps = table.column("probability").unwrap();
    for (&x, &p) in xs.iter().zip(ps) {
        let element = onephoton::povm_element(&zeta, x, &scale, K);
        assert!((element.expectation(&state) - p).abs() <= 1e-12 * p.max(1.0));
    }
}

#[test]
fn spectrum_table_matches_pointwise_channel_outputs() {
    let det = ResonantDetector::new(0.0, 0.8, 0.2, 0.5).unwrap();
    let table = resonant::absorption_spectrum(&det, (-3.0, 3.0), 121).unwrap();
    let deltas = table.column("delta").unwrap();
    let absorption = table.column("absorption").unwrap();
    let bright = table.column("bright_out").unwrap();
    let dark = table.column("dark_out").unwrap();
    for i in 0..deltas.len() {
        let drive = DriveSpec::new(deltas[i], Complex64::new(1.0, 0.0)).unwrap();
        let out = resonant::channel_outputs(&det, &drive);
        assert!((bright[i] - out.s_b_out.norm_sqr()).abs() <= 1e-15);
        assert!((dark[i] - out.s_d_out.norm_sqr()).abs() <= 1e-15);
        assert!((absorption[i] - out.absorbed_fraction).abs() <= 1e-12);
        // all power accounted for
        assert!((bright[i] + dark[i] + out.absorbed_power - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn csv_output_parses_back_to_the_same_numbers() {
    let geom = DipolePairGeometry::from_d_over_lambda(2.0).unwrap();
    let zeta = ComplexResponse::new(Complex64::new(0.5, 0.5)).unwrap();
    let table = farfield::pattern_scan(&geom, &zeta, Cut::Polar { phi: 0.3 }, 91).unwrap();
    let csv = table.to_csv_string();

    let mut rows = Vec::new();
    let mut header: Vec<String> = Vec::new();
    for line in csv.lines() {
        if line.starts_with('#') {
            continue;
        }
        if header.is_empty() {
            header = line.split(',').map(str::to_string).collect();
            continue;
        }
        let row: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        rows.push(row);
    }
    assert_eq!(rows.len(), 91);
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let (angle_idx, glauber_idx, generalized_idx) =
        (col("angle"), col("glauber"), col("generalized"));
    for row in &rows {
        let dir = farfield::Direction::new(row[angle_idx], 0.3).unwrap();
        // 17 significant digits round-trip exactly
        assert_eq!(row[glauber_idx], farfield::glauber_pattern(&geom, &dir));
        assert_eq!(
            row[generalized_idx],
            farfield::generalized_pattern(&geom, &dir, &zeta)
        );
    }
}
