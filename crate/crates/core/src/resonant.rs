//! Lossy resonant detector in amplitude-level input-output theory.
//!
//! A localized mode of frequency ω₀ couples radiatively to an electric
//! channel (rate γ_e) and a magnetic channel (rate γ_m), and decays
//! irreversibly into internal degrees of freedom at rate γ_i. The two
//! radiative channels reorganize into a bright superposition, where the
//! electric and magnetic reradiation amplitudes add, and a dark one, where
//! they subtract:
//!
//! ```text
//! γ_b = (√γ_e + √γ_m)²/2,    γ_d = (√γ_e - √γ_m)²/2,
//! γ_b + γ_d = γ_e + γ_m = γ_r,   Γ = γ_r + γ_i.
//! ```
//!
//! Driving the bright superposition with amplitude s_in (|s_in|² = incident
//! power flux) at detuning Δ = ω - ω₀ gives the steady state
//! a = √γ_b·s_in/(Γ/2 - iΔ), outputs s_b = s_in - √γ_b·a and
//! s_d = -√γ_d·a, and the absorbed fraction A = γ_b·γ_i/(Δ² + (Γ/2)²).
//! The dark output vanishes identically at γ_e = γ_m; on resonance and at
//! critical coupling γ_i = γ_r the bright output vanishes too and A = 1.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scan::{fmt_complex, linspace, ScanTable};

/// Resonance frequency and coupling rates of the lossy detector mode.
///
/// All rates are non-negative and at least one must be positive, so the
/// total linewidth Γ of a constructed detector is always > 0; operations on
/// a `ResonantDetector` are total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonantDetector {
    omega0: f64,
    gamma_e: f64,
    gamma_m: f64,
    gamma_i: f64,
}

impl ResonantDetector {
    pub fn new(omega0: f64, gamma_e: f64, gamma_m: f64, gamma_i: f64) -> Result<Self> {
        for (name, value) in [
            ("gamma_e", gamma_e),
            ("gamma_m", gamma_m),
            ("gamma_i", gamma_i),
        ] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and >= 0, got {value}"
                )));
            }
        }
        if !omega0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "omega0 must be finite, got {omega0}"
            )));
        }
        if gamma_e + gamma_m + gamma_i <= 0.0 {
            return Err(Error::InvalidParameter(
                "total linewidth gamma_e + gamma_m + gamma_i must be > 0".to_string(),
            ));
        }
        Ok(Self {
            omega0,
            gamma_e,
            gamma_m,
            gamma_i,
        })
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn gamma_e(&self) -> f64 {
        self.gamma_e
    }

    pub fn gamma_m(&self) -> f64 {
        self.gamma_m
    }

    pub fn gamma_i(&self) -> f64 {
        self.gamma_i
    }

    /// Total radiative rate γ_r = γ_e + γ_m.
    pub fn gamma_r(&self) -> f64 {
        self.gamma_e + self.gamma_m
    }

    /// Total linewidth Γ = γ_e + γ_m + γ_i.
    pub fn total_linewidth(&self) -> f64 {
        self.gamma_e + self.gamma_m + self.gamma_i
    }

    /// Bright/dark reorganization of this detector's radiative channels.
    pub fn bright_dark(&self) -> BrightDarkRates {
        bright_dark_rates(self.gamma_e, self.gamma_m)
            .expect("rates validated at construction")
    }

    /// Whether the electric and magnetic couplings are balanced, making the
    /// dark channel decouple. Exact equality, or √γ_e and √γ_m within
    /// 1e-12·√γ_r for inputs that went through floating-point arithmetic.
    pub fn is_balanced(&self) -> bool {
        if self.gamma_e == self.gamma_m {
            return true;
        }
        let gr = self.gamma_r();
        gr > 0.0 && (self.gamma_e.sqrt() - self.gamma_m.sqrt()).abs() < 1e-12 * gr.sqrt()
    }
}

/// Bright, dark and total radiative rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrightDarkRates {
    pub gamma_b: f64,
    pub gamma_d: f64,
    pub gamma_r: f64,
}

/// Splits (γ_e, γ_m) into γ_b = (√γ_e + √γ_m)²/2 and γ_d = (√γ_e - √γ_m)²/2.
pub fn bright_dark_rates(gamma_e: f64, gamma_m: f64) -> Result<BrightDarkRates> {
    for (name, value) in [("gamma_e", gamma_e), ("gamma_m", gamma_m)] {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "{name} must be finite and >= 0, got {value}"
            )));
        }
    }
    let (se, sm) = (gamma_e.sqrt(), gamma_m.sqrt());
    Ok(BrightDarkRates {
        gamma_b: (se + sm) * (se + sm) / 2.0,
        gamma_d: (se - sm) * (se - sm) / 2.0,
        gamma_r: gamma_e + gamma_m,
    })
}

/// Monochromatic drive matched to the bright radiative superposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSpec {
    detuning: f64,
    s_in: Complex64,
}

impl DriveSpec {
    /// Detuning Δ = ω - ω₀ and input amplitude with |s_in|² the incident
    /// power flux.
    pub fn new(detuning: f64, s_in: Complex64) -> Result<Self> {
        if !detuning.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "detuning must be finite, got {detuning}"
            )));
        }
        if !s_in.re.is_finite() || !s_in.im.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "s_in must be finite, got {s_in}"
            )));
        }
        Ok(Self { detuning, s_in })
    }

    pub fn detuning(&self) -> f64 {
        self.detuning
    }

    pub fn s_in(&self) -> Complex64 {
        self.s_in
    }
}

/// Steady state and channel amplitudes of the driven resonance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelOutputs {
    /// Steady-state mode amplitude (units of √energy).
    pub a_ss: Complex64,
    /// Outgoing amplitude in the bright radiative channel.
    pub s_b_out: Complex64,
    /// Outgoing amplitude in the dark radiative channel.
    pub s_d_out: Complex64,
    /// Fraction of incident power absorbed internally, in [0, 1].
    pub absorbed_fraction: f64,
    /// Internally dissipated power γ_i·|a|².
    pub absorbed_power: f64,
}

/// Complex denominator Γ/2 - iΔ of the driven-resonance response.
fn response_denominator(det: &ResonantDetector, detuning: f64) -> Complex64 {
    Complex64::new(det.total_linewidth() / 2.0, -detuning)
}

/// Steady-state amplitude a = √γ_b·s_in/(Γ/2 - iΔ).
pub fn steady_amplitude(det: &ResonantDetector, drive: &DriveSpec) -> Complex64 {
    let rates = det.bright_dark();
    rates.gamma_b.sqrt() * drive.s_in / response_denominator(det, drive.detuning)
}

/// Steady-state amplitude and both channel outputs, with the absorbed power
/// and absorbed fraction.
pub fn channel_outputs(det: &ResonantDetector, drive: &DriveSpec) -> ChannelOutputs {
    let incident = drive.s_in.norm_sqr();
    if incident == 0.0 {
        return ChannelOutputs {
            a_ss: Complex64::new(0.0, 0.0),
            s_b_out: Complex64::new(0.0, 0.0),
            s_d_out: Complex64::new(0.0, 0.0),
            absorbed_fraction: 0.0,
            absorbed_power: 0.0,
        };
    }
    let rates = det.bright_dark();
    let denom = response_denominator(det, drive.detuning);
    let a_ss = rates.gamma_b.sqrt() * drive.s_in / denom;
    let s_b_out = (Complex64::new(1.0, 0.0) - rates.gamma_b / denom) * drive.s_in;
    let s_d_out = -(rates.gamma_b * rates.gamma_d).sqrt() * drive.s_in / denom;
    let absorbed_power = det.gamma_i() * a_ss.norm_sqr();
    let radiated = s_b_out.norm_sqr() + s_d_out.norm_sqr();
    let absorbed_fraction = (1.0 - radiated / incident).clamp(0.0, 1.0);
    ChannelOutputs {
        a_ss,
        s_b_out,
        s_d_out,
        absorbed_fraction,
        absorbed_power,
    }
}

/// Absorbed fraction A(Δ) = γ_b·γ_i/(Δ² + (Γ/2)²) of the matched input.
///
/// γ_b·γ_i <= (Γ/2)² by the AM-GM inequality, so A <= 1; roundoff residue
/// is clamped.
pub fn absorption(det: &ResonantDetector, detuning: f64) -> f64 {
    let rates = det.bright_dark();
    let half = det.total_linewidth() / 2.0;
    let a = rates.gamma_b * det.gamma_i() / (detuning * detuning + half * half);
    a.clamp(0.0, 1.0)
}

/// Internally dissipated power γ_i·|a|² computed from the steady-state
/// amplitude; agrees with `absorption` times the incident flux.
pub fn absorbed_power_rate(det: &ResonantDetector, drive: &DriveSpec) -> f64 {
    det.gamma_i() * steady_amplitude(det, drive).norm_sqr()
}

/// Sweeps the detuning and tabulates (Δ, A, |s_b|²/|s_in|², |s_d|²/|s_in|²)
/// for a unit-flux bright drive. The peak value, its location and the
/// numerically extracted FWHM are attached as metadata.
pub fn absorption_spectrum(
    det: &ResonantDetector,
    delta_range: (f64, f64),
    n_points: usize,
) -> Result<ScanTable> {
    if n_points < 3 {
        return Err(Error::TooFewPoints {
            min: 3,
            got: n_points,
        });
    }
    let (lo, hi) = delta_range;
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(Error::InvalidRange {
            lo,
            hi,
            reason: "range must satisfy lo < hi".to_string(),
        });
    }

    let deltas = linspace(lo, hi, n_points);
    let mut absorbed = Vec::with_capacity(n_points);
    let mut bright = Vec::with_capacity(n_points);
    let mut dark = Vec::with_capacity(n_points);
    for &delta in &deltas {
        let drive = DriveSpec::new(delta, Complex64::new(1.0, 0.0))?;
        let out = channel_outputs(det, &drive);
        absorbed.push(absorption(det, delta));
        bright.push(out.s_b_out.norm_sqr());
        dark.push(out.s_d_out.norm_sqr());
    }

    let (peak_idx, peak) = absorbed
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| {
            if v > acc.1 {
                (i, v)
            } else {
                acc
            }
        });
    let fwhm = extract_fwhm(&deltas, &absorbed, peak_idx);

    let mut table = ScanTable::new();
    table.push_meta("omega0", det.omega0());
    table.push_meta("gamma_e", det.gamma_e());
    table.push_meta("gamma_m", det.gamma_m());
    table.push_meta("gamma_i", det.gamma_i());
    let rates = det.bright_dark();
    table.push_meta("gamma_b", rates.gamma_b);
    table.push_meta("gamma_d", rates.gamma_d);
    table.push_meta("gamma_r", rates.gamma_r);
    table.push_meta("total_linewidth", det.total_linewidth());
    table.push_meta("n_points", n_points);
    table.push_meta("peak_absorption", peak);
    table.push_meta("peak_delta", deltas[peak_idx]);
    table.push_meta("fwhm", fwhm);
    table.push_column("delta", deltas)?;
    table.push_column("absorption", absorbed)?;
    table.push_column("bright_out", bright)?;
    table.push_column("dark_out", dark)?;
    Ok(table)
}

/// Full width at half maximum by linear interpolation on the grid; NaN when
/// either half crossing lies outside the scanned range.
fn extract_fwhm(xs: &[f64], ys: &[f64], peak_idx: usize) -> f64 {
    let peak = ys[peak_idx];
    if !peak.is_finite() || peak <= 0.0 {
        return f64::NAN;
    }
    let half = peak / 2.0;
    let crossing = |i: usize, j: usize| -> f64 {
        let t = (half - ys[i]) / (ys[j] - ys[i]);
        xs[i] + t * (xs[j] - xs[i])
    };
    let mut left = f64::NAN;
    for i in (0..peak_idx).rev() {
        if ys[i] <= half {
            left = crossing(i, i + 1);
            break;
        }
    }
    let mut right = f64::NAN;
    for (i, &y) in ys.iter().enumerate().skip(peak_idx + 1) {
        if y <= half {
            right = crossing(i, i - 1);
            break;
        }
    }
    right - left
}

/// Integrates da/dt = (iΔ - Γ/2)·a + √γ_b·s_in from `a0` with the classical
/// fixed-step fourth-order Runge-Kutta scheme and tabulates
/// (t, Re a, Im a, γ_i|a|²).
///
/// Requires 0 < dt <= 0.1/Γ (stability bound) and t_end >= dt.
pub fn time_evolve(
    det: &ResonantDetector,
    drive: &DriveSpec,
    t_end: f64,
    dt: f64,
    a0: Complex64,
) -> Result<ScanTable> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "dt must be finite and > 0, got {dt}"
        )));
    }
    let bound = 0.1 / det.total_linewidth();
    if dt > bound {
        return Err(Error::UnstableStep { dt, bound });
    }
    if !t_end.is_finite() || t_end < dt {
        return Err(Error::InvalidRange {
            lo: dt,
            hi: t_end,
            reason: "t_end must be finite and >= dt".to_string(),
        });
    }
    if !a0.re.is_finite() || !a0.im.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "a0 must be finite, got {a0}"
        )));
    }

    let lambda = Complex64::new(-det.total_linewidth() / 2.0, drive.detuning());
    let forcing = det.bright_dark().gamma_b.sqrt() * drive.s_in();
    let n_steps = ((t_end / dt) - 1e-9).ceil().max(1.0) as usize;

    let mut times = Vec::with_capacity(n_steps + 1);
    let mut re = Vec::with_capacity(n_steps + 1);
    let mut im = Vec::with_capacity(n_steps + 1);
    let mut dissipated = Vec::with_capacity(n_steps + 1);
    let mut a = a0;
    for step in 0..=n_steps {
        times.push(step as f64 * dt);
        re.push(a.re);
        im.push(a.im);
        dissipated.push(det.gamma_i() * a.norm_sqr());
        if step < n_steps {
            a = rk4_step(a, dt, lambda, forcing);
        }
    }

    let mut table = ScanTable::new();
    table.push_meta("omega0", det.omega0());
    table.push_meta("gamma_e", det.gamma_e());
    table.push_meta("gamma_m", det.gamma_m());
    table.push_meta("gamma_i", det.gamma_i());
    table.push_meta("detuning", drive.detuning());
    table.push_meta("s_in", fmt_complex(drive.s_in()));
    table.push_meta("a0", fmt_complex(a0));
    table.push_meta("dt", dt);
    table.push_meta("n_steps", n_steps);
    table.push_column("t", times)?;
    table.push_column("a_re", re)?;
    table.push_column("a_im", im)?;
    table.push_column("absorbed_power", dissipated)?;
    Ok(table)
}

fn rk4_step(a: Complex64, dt: f64, lambda: Complex64, forcing: Complex64) -> Complex64 {
    let f = |y: Complex64| lambda * y + forcing;
    let k1 = f(a);
    let k2 = f(a + k1 * (dt / 2.0));
    let k3 = f(a + k2 * (dt / 2.0));
    let k4 = f(a + k3 * dt);
    a + (k1 + 2.0 * (k2 + k3) + k4) * (dt / 6.0)
}

/// On-resonance absorption 4·γ_r·γ_i/(γ_r + γ_i)² of a balanced detector as
/// a function of the loss ratio γ_i/γ_r, swept over [0, 4].
pub fn critical_coupling_locus(gamma_r: f64, n_points: usize) -> Result<ScanTable> {
    if !gamma_r.is_finite() || gamma_r <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "gamma_r must be finite and > 0, got {gamma_r}"
        )));
    }
    if n_points < 2 {
        return Err(Error::TooFewPoints {
            min: 2,
            got: n_points,
        });
    }
    let ratios = linspace(0.0, 4.0, n_points);
    let absorbed: Vec<f64> = ratios
        .iter()
        .map(|&ratio| {
            let gamma_i = ratio * gamma_r;
            let sum = gamma_r + gamma_i;
            4.0 * gamma_r * gamma_i / (sum * sum)
        })
        .collect();
    let mut table = ScanTable::new();
    table.push_meta("gamma_r", gamma_r);
    table.push_meta("ratio_min", 0.0);
    table.push_meta("ratio_max", 4.0);
    table.push_meta("n_points", n_points);
    table.push_column("gamma_i_over_gamma_r", ratios)?;
    table.push_column("absorption_on_resonance", absorbed)?;
    Ok(table)
}
