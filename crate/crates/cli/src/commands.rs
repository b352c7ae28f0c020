//! One function per subcommand: resolve parameters, call the library,
//! assemble the output table and a one-line summary.

use std::f64::consts::PI;

use num_complex::Complex64;

use emdet::farfield::{self, Cut, DipolePairGeometry};
use emdet::onephoton::{self, FieldScale, OnePhotonState};
use emdet::resonant::{self, DriveSpec, ResonantDetector};
use emdet::response::ComplexResponse;
use emdet::sampler::{self, SamplerConfig};
use emdet::scan::{fmt_complex, linspace, ScanTable};
use emdet::verify::{self, CheckResult};

use crate::config::{CliError, Params};

const DEFAULT_K: f64 = 2.0 * PI;

pub struct RunOutput {
    pub table: ScanTable,
    pub summary: String,
}

pub const FARFIELD_KEYS: [&str; 6] = ["d-over-lambda", "zeta", "cut", "phi", "theta", "points"];

pub fn run_farfield(params: &Params) -> Result<RunOutput, CliError> {
    params.validate_keys(&FARFIELD_KEYS)?;
    let d_over_lambda = params.get_f64("d-over-lambda", 3.0)?;
    let zeta = params.get_complex("zeta", Complex64::new(0.0, 0.0))?;
    let cut_name = params.get_choice("cut", &["polar", "azimuthal"], "polar")?;
    let phi = params.get_f64("phi", 0.0)?;
    let theta = params.get_f64("theta", PI / 2.0)?;
    let points = params.get_usize("points", 721)?;

    let geom = DipolePairGeometry::from_d_over_lambda(d_over_lambda)?;
    let resp = ComplexResponse::new(zeta)?;
    let cut = match cut_name.as_str() {
        "polar" => Cut::Polar { phi },
        _ => Cut::Azimuthal { theta },
    };
    let mut table = farfield::pattern_scan(&geom, &resp, cut, points)?;
    table.push_meta("command", "farfield");

    let peak = |name: &str| -> f64 {
        table
            .column(name)
            .expect("column present")
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let summary = format!(
        "farfield: cut={cut_name} points={points} zeta={} peak_glauber={:.4} peak_generalized={:.4}",
        fmt_complex(zeta),
        peak("glauber"),
        peak("generalized"),
    );
    Ok(RunOutput { table, summary })
}

pub const FRINGE_KEYS: [&str; 6] = ["zeta", "phi", "points", "periods", "amplitude", "k"];

pub fn run_fringe(params: &Params) -> Result<RunOutput, CliError> {
    params.validate_keys(&FRINGE_KEYS)?;
    let zeta = params.get_complex("zeta", Complex64::new(0.0, 0.0))?;
    let phi = params.get_f64("phi", 0.0)?;
    let points = params.get_usize("points", 1001)?;
    let periods = params.get_f64("periods", 1.0)?;
    let amplitude = params.get_f64("amplitude", 1.0)?;
    let k = params.get_f64("k", DEFAULT_K)?;

    let resp = ComplexResponse::new(zeta)?;
    let scale = FieldScale::new(amplitude)?;
    let state = OnePhotonState::from_relative_phase(phi);
    if !periods.is_finite() || periods < 1.0 {
        return Err(CliError::Numerical(format!(
            "periods must be >= 1, got {periods}"
        )));
    }
    if !(k.is_finite() && k > 0.0) {
        return Err(CliError::Numerical(format!(
            "k must be finite and > 0, got {k}"
        )));
    }
    let x_range = (0.0, periods * PI / k);
    let mut table = onephoton::fringe_scan(&state, &resp, &scale, k, x_range, points)?;
    table.push_meta("command", "fringe");
    table.push_meta("phi", phi);
    table.push_meta("periods", periods);

    let extracted = table.meta_f64("visibility_extracted").unwrap_or(f64::NAN);
    let closed = onephoton::visibility(&resp);
    let mean = table.meta_f64("mean_level").unwrap_or(f64::NAN);
    let summary = format!(
        "fringe: zeta={} visibility={extracted:.4} closed_form={closed:.4} mean={mean:.4}",
        fmt_complex(zeta)
    );
    Ok(RunOutput { table, summary })
}

pub const POVM_KEYS: [&str; 4] = ["zeta", "x", "amplitude", "k"];

pub fn run_povm(params: &Params) -> Result<RunOutput, CliError> {
    params.validate_keys(&POVM_KEYS)?;
    let zeta = params.get_complex("zeta", Complex64::new(0.0, 0.0))?;
    let x = params.get_f64("x", 0.0)?;
    let amplitude = params.get_f64("amplitude", 1.0)?;
    let k = params.get_f64("k", DEFAULT_K)?;

    let resp = ComplexResponse::new(zeta)?;
    let scale = FieldScale::new(amplitude)?;
    let element = onephoton::povm_element(&resp, x, &scale, k);
    let m = element.matrix();
    let (eig_min, eig_max) = element.eigenvalues();

    let mut table = ScanTable::new();
    table.push_meta("command", "povm");
    table.push_meta("zeta", fmt_complex(zeta));
    table.push_meta("x", x);
    table.push_meta("amplitude", amplitude);
    table.push_meta("wavenumber_k", k);
    table.push_column("pi_rr_re", vec![m[0][0].re])?;
    table.push_column("pi_rr_im", vec![m[0][0].im])?;
    table.push_column("pi_rl_re", vec![m[0][1].re])?;
    table.push_column("pi_rl_im", vec![m[0][1].im])?;
    table.push_column("pi_lr_re", vec![m[1][0].re])?;
    table.push_column("pi_lr_im", vec![m[1][0].im])?;
    table.push_column("pi_ll_re", vec![m[1][1].re])?;
    table.push_column("pi_ll_im", vec![m[1][1].im])?;
    table.push_column("eig_min", vec![eig_min])?;
    table.push_column("eig_max", vec![eig_max])?;
    table.push_column("trace", vec![element.trace()])?;

    let summary = format!(
        "povm: zeta={} trace={:.4} eigenvalues=({:.3e}, {:.4})",
        fmt_complex(zeta),
        element.trace(),
        eig_min,
        eig_max
    );
    Ok(RunOutput { table, summary })
}

pub const BLOCH_KEYS: [&str; 3] = ["zeta-range", "x", "k"];

pub fn run_bloch(params: &Params) -> Result<RunOutput, CliError> {
    params.validate_keys(&BLOCH_KEYS)?;
    let range = params.get_range("zeta-range", "-1:1:201")?;
    let x = params.get_f64("x", 0.0)?;
    let k = params.get_f64("k", DEFAULT_K)?;

    let zetas = linspace(range.lo, range.hi, range.count);
    let mut bx = Vec::with_capacity(zetas.len());
    let mut by = Vec::with_capacity(zetas.len());
    let mut bz = Vec::with_capacity(zetas.len());
    let mut bias = Vec::with_capacity(zetas.len());
    for &z in &zetas {
        let resp = ComplexResponse::real(z)?;
        let mode = onephoton::selected_mode(&resp, x, k);
        let v = onephoton::bloch_vector(&mode)?;
        bx.push(v[0]);
        by.push(v[1]);
        bz.push(v[2]);
        bias.push(onephoton::path_bias(z));
    }

    let mut table = ScanTable::new();
    table.push_meta("command", "bloch");
    table.push_meta("zeta_min", range.lo);
    table.push_meta("zeta_max", range.hi);
    table.push_meta("n_points", range.count);
    table.push_meta("x", x);
    table.push_meta("wavenumber_k", k);
    let (first, last) = (bz[0], bz[range.count - 1]);
    table.push_column("zeta", zetas)?;
    table.push_column("bloch_x", bx)?;
    table.push_column("bloch_y", by)?;
    table.push_column("bloch_z", bz)?;
    table.push_column("path_bias", bias)?;

    let summary = format!(
        "bloch: zeta in [{}, {}] ({} points) z_start={first:.4} z_end={last:.4}",
        range.lo, range.hi, range.count
    );
    Ok(RunOutput { table, summary })
}

pub const RESONANCE_KEYS: [&str; 4] = ["gamma-e", "gamma-m", "gamma-i", "delta-range"];

pub fn run_resonance(params: &Params) -> Result<RunOutput, CliError> {
    params.validate_keys(&RESONANCE_KEYS)?;
    let gamma_e = params.get_f64("gamma-e", 1.0)?;
    let gamma_m = params.get_f64("gamma-m", 1.0)?;
    let gamma_i = params.get_f64("gamma-i", 2.0)?;
    let range = params.get_range("delta-range", "-10:10:801")?;

    let det = ResonantDetector::new(0.0, gamma_e, gamma_m, gamma_i)?;
    let mut table = resonant::absorption_spectrum(&det, (range.lo, range.hi), range.count)?;
    table.push_meta("command", "resonance");
    table.push_meta("delta_min", range.lo);
    table.push_meta("delta_max", range.hi);

    let summary = format!(
        "resonance: peak_absorption={:.4} at delta={:.4} fwhm={:.4}",
        table.meta_f64("peak_absorption").unwrap_or(f64::NAN),
        table.meta_f64("peak_delta").unwrap_or(f64::NAN),
        table.meta_f64("fwhm").unwrap_or(f64::NAN),
    );
    Ok(RunOutput { table, summary })
}

pub const EVOLVE_KEYS: [&str; 8] = [
    "gamma-e", "gamma-m", "gamma-i", "delta", "s-in", "a0", "t-end", "dt",
];

pub fn run_evolve(params: &Params) -> Result<RunOutput, CliError> {
    params.validate_keys(&EVOLVE_KEYS)?;
    let gamma_e = params.get_f64("gamma-e", 1.0)?;
    let gamma_m = params.get_f64("gamma-m", 1.0)?;
    let gamma_i = params.get_f64("gamma-i", 2.0)?;
    let delta = params.get_f64("delta", 0.0)?;
    let s_in = params.get_complex("s-in", Complex64::new(1.0, 0.0))?;
    let a0 = params.get_complex("a0", Complex64::new(0.0, 0.0))?;

    let det = ResonantDetector::new(0.0, gamma_e, gamma_m, gamma_i)?;
    let gamma = det.total_linewidth();
    let t_end = params.get_f64("t-end", 20.0 / gamma)?;
    let dt = params.get_f64("dt", 0.005 / gamma)?;
    let drive = DriveSpec::new(delta, s_in)?;

    let mut table = resonant::time_evolve(&det, &drive, t_end, dt, a0)?;
    table.push_meta("command", "evolve");
    table.push_meta("t_end", t_end);

    let a_ss = resonant::steady_amplitude(&det, &drive);
    let re = table.column("a_re").expect("column present");
    let im = table.column("a_im").expect("column present");
    let last = Complex64::new(*re.last().unwrap(), *im.last().unwrap());
    let summary = format!(
        "evolve: steps={} final_a=({:.6}, {:.6}) steady_a=({:.6}, {:.6})",
        re.len() - 1,
        last.re,
        last.im,
        a_ss.re,
        a_ss.im
    );
    Ok(RunOutput { table, summary })
}

pub const CRITICAL_KEYS: [&str; 2] = ["gamma-r", "points"];

pub fn run_critical(params: &Params) -> Result<RunOutput, CliError> {
    params.validate_keys(&CRITICAL_KEYS)?;
    let gamma_r = params.get_f64("gamma-r", 1.0)?;
    let points = params.get_usize("points", 401)?;

    let mut table = resonant::critical_coupling_locus(gamma_r, points)?;
    table.push_meta("command", "critical");

    let ratios = table.column("gamma_i_over_gamma_r").expect("column present");
    let absorbed = table
        .column("absorption_on_resonance")
        .expect("column present");
    let (idx, peak) = absorbed
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| {
            if v > acc.1 {
                (i, v)
            } else {
                acc
            }
        });
    let summary = format!(
        "critical: peak_absorption={peak:.4} at gamma_i/gamma_r={:.4}",
        ratios[idx]
    );
    Ok(RunOutput { table, summary })
}

pub const SAMPLE_KEYS: [&str; 7] = ["zeta", "phi", "events", "seed", "bins", "amplitude", "k"];

pub fn run_sample(params: &Params) -> Result<RunOutput, CliError> {
    params.validate_keys(&SAMPLE_KEYS)?;
    let zeta = params.get_complex("zeta", Complex64::new(0.0, 0.0))?;
    let phi = params.get_f64("phi", 0.0)?;
    let events = params.get_usize("events", 100_000)?;
    let seed = params.get_u64("seed", 0)?;
    let bins = params.get_usize("bins", 64)?;
    let amplitude = params.get_f64("amplitude", 1.0)?;
    let k = params.get_f64("k", DEFAULT_K)?;

    let resp = ComplexResponse::new(zeta)?;
    let scale = FieldScale::new(amplitude)?;
    let state = OnePhotonState::from_relative_phase(phi);
    let cfg = SamplerConfig::for_wavenumber(events, seed, bins, k)?;
    let positions = sampler::sample_positions(&state, &resp, &scale, k, &cfg)?;
    let mut table = sampler::events_table(&positions, &resp, phi, &scale, k, &cfg)?;
    table.push_meta("command", "sample");

    let summary = if events >= 100 {
        let est = sampler::estimate_visibility(&positions, k, &cfg)?;
        let chi = sampler::histogram_chi_square(&positions, &state, &resp, &scale, k, &cfg)?;
        table.push_meta("v_hat", est.v_hat);
        table.push_meta("v_err", est.v_err);
        table.push_meta("phase_hat", est.phase_hat);
        table.push_meta("chi2_statistic", chi.statistic);
        table.push_meta("chi2_p_value", chi.p_value);
        format!(
            "sample: N={events} seed={seed} v_hat={:.4}+-{:.4} phase_hat={:.4} chi2_p={:.4}",
            est.v_hat, est.v_err, est.phase_hat, chi.p_value
        )
    } else {
        format!("sample: N={events} seed={seed} (too few events for estimation)")
    };
    Ok(RunOutput { table, summary })
}

pub const VERIFY_KEYS: [&str; 0] = [];

pub struct VerifyOutput {
    pub results: Vec<CheckResult>,
    pub all_passed: bool,
}

pub fn run_verify(params: &Params) -> Result<VerifyOutput, CliError> {
    params.validate_keys(&VERIFY_KEYS)?;
    let results = verify::run_all();
    let all_passed = results.iter().all(|r| r.passed);
    Ok(VerifyOutput {
        results,
        all_passed,
    })
}

/// One report line per invariant check.
pub fn format_check_line(check: &CheckResult) -> String {
    format!(
        "[{}] {}: max_error={:.3e} threshold={:.1e} ({})",
        if check.passed { "PASS" } else { "FAIL" },
        check.name,
        check.max_error,
        check.threshold,
        check.detail
    )
}
