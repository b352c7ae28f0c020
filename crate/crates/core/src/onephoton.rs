//! Two-mode single-photon measurement with a tunable detection basis.
//!
//! A one-dimensional field of wavenumber k is restricted to a right-moving
//! mode and a left-moving mode. A detector at position x with
//! electric-magnetic response ratio ζ couples to the mode combination
//! (1+ζ)·a_R·e^{ikx} + (1-ζ)·a_L·e^{-ikx}: the electric field probes the
//! symmetric superposition of the two propagation directions and the
//! magnetic field the antisymmetric one, so ζ continuously rotates the
//! measured one-photon basis between them.
//!
//! For the equal-weight state with relative phase φ the detection
//! probability is a fringe
//!
//! ```text
//! P(x) = E²(1+|ζ|²) · [1 + V_ζ · cos(2kx - φ + δ_ζ)]
//! ```
//!
//! with visibility V_ζ = |1-ζ²|/(1+|ζ|²) and phase offset
//! δ_ζ = -arg[(1+ζ)*·(1-ζ)]; the fringe maximum sits at
//! 2kx - φ ≡ -δ_ζ (mod 2π). For real ζ the offset is 0 or π and the sign
//! convention is immaterial. Visibility trades off against the signed path
//! bias B_ζ = 2ζ/(1+ζ²) through the exact relation V_ζ² + B_ζ² = 1.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::response::ComplexResponse;
use crate::scan::{fmt_complex, linspace, ScanTable};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Normalized amplitudes on the (right-moving, left-moving) one-photon basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnePhotonState {
    alpha: Complex64,
    beta: Complex64,
}

impl OnePhotonState {
    /// Requires |α|² + |β|² = 1 within 1e-12.
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if !norm.is_finite() {
            return Err(Error::InvalidParameter(
                "state amplitudes must be finite".to_string(),
            ));
        }
        let deviation = (norm - 1.0).abs();
        if deviation > 1e-12 {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(Self { alpha, beta })
    }

    /// Equal-weight state (|R> + e^{iφ}|L>)/√2.
    pub fn from_relative_phase(phi: f64) -> Self {
        Self {
            alpha: Complex64::new(FRAC_1_SQRT_2, 0.0),
            beta: Complex64::from_polar(FRAC_1_SQRT_2, phi),
        }
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }
}

/// Single-photon field amplitude E (arbitrary units, strictly positive).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldScale {
    amplitude: f64,
}

impl FieldScale {
    pub fn new(single_photon_amplitude: f64) -> Result<Self> {
        if !single_photon_amplitude.is_finite() || single_photon_amplitude <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "single-photon amplitude must be finite and > 0, got {single_photon_amplitude}"
            )));
        }
        Ok(Self {
            amplitude: single_photon_amplitude,
        })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }
}

impl Default for FieldScale {
    fn default() -> Self {
        Self { amplitude: 1.0 }
    }
}

/// Mean level, visibility and phase offset of the detected fringe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringeSummary {
    /// E²(1+|ζ|²), the x-average of the fringe.
    pub mean_level: f64,
    /// V_ζ = |1-ζ²|/(1+|ζ|²), in [0, 1].
    pub visibility: f64,
    /// δ_ζ = -arg[(1+ζ)*·(1-ζ)] in (-π, π]; 0 when the visibility vanishes.
    pub phase_offset: f64,
}

/// Rank-1 positive operator on the (|R>, |L>) one-photon subspace whose
/// expectation value is the detection probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PovmElement {
    m: [[Complex64; 2]; 2],
}

impl PovmElement {
    /// Validates hermiticity (1e-12), positive semidefiniteness
    /// (eigenvalues >= -1e-12) and rank <= 1 (smaller eigenvalue at most
    /// 1e-10 of the larger).
    pub fn from_matrix(m: [[Complex64; 2]; 2]) -> Result<Self> {
        let herm_dev = (m[0][1] - m[1][0].conj())
            .norm()
            .max(m[0][0].im.abs())
            .max(m[1][1].im.abs());
        if herm_dev > 1e-12 {
            return Err(Error::InvalidPovm(format!(
                "hermiticity deviation {herm_dev:e}"
            )));
        }
        let element = Self { m };
        let (lo, hi) = element.eigenvalues();
        if lo < -1e-12 {
            return Err(Error::InvalidPovm(format!(
                "negative eigenvalue {lo:e}"
            )));
        }
        if lo > 1e-10 * hi.max(f64::MIN_POSITIVE) {
            return Err(Error::InvalidPovm(format!(
                "rank exceeds 1: eigenvalues ({lo:e}, {hi:e})"
            )));
        }
        Ok(element)
    }

    pub fn matrix(&self) -> &[[Complex64; 2]; 2] {
        &self.m
    }

    /// Trace (real part; the imaginary part vanishes for Hermitian input).
    pub fn trace(&self) -> f64 {
        (self.m[0][0] + self.m[1][1]).re
    }

    /// Eigenvalues (min, max) of the 2x2 Hermitian matrix in closed form.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let a = self.m[0][0].re;
        let d = self.m[1][1].re;
        let half_tr = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + self.m[0][1].norm_sqr()).sqrt();
        (half_tr - radius, half_tr + radius)
    }

    /// <ψ|Π|ψ>.
    pub fn expectation(&self, state: &OnePhotonState) -> f64 {
        let c = [state.alpha, state.beta];
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                acc += c[i].conj() * self.m[i][j] * c[j];
            }
        }
        acc.re
    }

    /// Largest deviation from hermiticity, |Π01 - Π10*| or an imaginary
    /// diagonal part.
    pub fn hermiticity_deviation(&self) -> f64 {
        (self.m[0][1] - self.m[1][0].conj())
            .norm()
            .max(self.m[0][0].im.abs())
            .max(self.m[1][1].im.abs())
    }
}

/// Detector mode weights E·(1+ζ)e^{ikx} and E·(1-ζ)e^{-ikx} on (|R>, |L>).
fn mode_weights(resp: &ComplexResponse, x: f64, scale: &FieldScale, k: f64) -> [Complex64; 2] {
    let z = resp.zeta();
    let e = scale.amplitude;
    [
        (ONE + z) * Complex64::from_polar(e, k * x),
        (ONE - z) * Complex64::from_polar(e, -k * x),
    ]
}

/// Vacuum amplitude produced by detecting the equal-weight state with
/// relative phase φ: (E/√2)[(1+ζ)e^{ikx} + (1-ζ)e^{-ikx}e^{iφ}].
pub fn detection_amplitude(
    resp: &ComplexResponse,
    x: f64,
    phi: f64,
    scale: &FieldScale,
    k: f64,
) -> Complex64 {
    let state = OnePhotonState::from_relative_phase(phi);
    let [w_r, w_l] = mode_weights(resp, x, scale, k);
    w_r * state.alpha + w_l * state.beta
}

/// Detection probability E²·|(1+ζ)·α·e^{ikx} + (1-ζ)·β·e^{-ikx}|² for a
/// general one-photon qubit.
pub fn detection_probability(
    state: &OnePhotonState,
    resp: &ComplexResponse,
    x: f64,
    scale: &FieldScale,
    k: f64,
) -> f64 {
    let [w_r, w_l] = mode_weights(resp, x, scale, k);
    (w_r * state.alpha + w_l * state.beta).norm_sqr()
}

/// Fringe visibility V_ζ = |1-ζ²|/(1+|ζ|²).
pub fn visibility(resp: &ComplexResponse) -> f64 {
    let z = resp.zeta();
    let v = (ONE - z * z).norm() / (1.0 + z.norm_sqr());
    v.min(1.0)
}

/// Signed path bias B_ζ = 2ζ/(1+ζ²) for a real response ratio; |B_ζ| is the
/// path distinguishability. Complex ζ is excluded by the signature.
pub fn path_bias(zeta_real: f64) -> f64 {
    2.0 * zeta_real / (1.0 + zeta_real * zeta_real)
}

/// Mean level, visibility and phase offset of the fringe; see the module
/// docs for the sign convention of the offset.
pub fn fringe_summary(resp: &ComplexResponse, scale: &FieldScale) -> FringeSummary {
    let z = resp.zeta();
    let e2 = scale.amplitude * scale.amplitude;
    let q = (ONE + z).conj() * (ONE - z);
    let phase_offset = if q.norm_sqr() == 0.0 {
        0.0
    } else {
        let mut delta = -q.arg();
        if delta == -PI {
            delta = PI;
        }
        delta
    };
    FringeSummary {
        mean_level: e2 * (1.0 + z.norm_sqr()),
        visibility: visibility(resp),
        phase_offset,
    }
}

/// The normalized one-photon mode the detector projects onto:
/// [(1+ζ)e^{ikx}, (1-ζ)e^{-ikx}] / √(2(1+|ζ|²)).
pub fn selected_mode(resp: &ComplexResponse, x: f64, k: f64) -> [Complex64; 2] {
    let z = resp.zeta();
    let norm = (2.0 * (1.0 + z.norm_sqr())).sqrt();
    [
        (ONE + z) * Complex64::from_polar(1.0, k * x) / norm,
        (ONE - z) * Complex64::from_polar(1.0, -k * x) / norm,
    ]
}

/// The POVM element 2E²(1+|ζ|²)·|χ><χ| as an explicit 2x2 matrix; its
/// expectation in any state equals [`detection_probability`].
pub fn povm_element(resp: &ComplexResponse, x: f64, scale: &FieldScale, k: f64) -> PovmElement {
    let w = mode_weights(resp, x, scale, k);
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = w[i].conj() * w[j];
        }
    }
    PovmElement { m }
}

/// Bloch vector (2Re(c_R*·c_L), 2Im(c_R*·c_L), |c_R|² - |c_L|²) of a unit
/// mode vector. Rejects inputs whose norm deviates from 1 by more than 1e-9.
pub fn bloch_vector(mode: &[Complex64; 2]) -> Result<[f64; 3]> {
    let norm = mode[0].norm_sqr() + mode[1].norm_sqr();
    let deviation = (norm - 1.0).abs();
    if !norm.is_finite() || deviation > 1e-9 {
        return Err(Error::NotUnit { deviation });
    }
    let cross = mode[0].conj() * mode[1];
    Ok([
        2.0 * cross.re,
        2.0 * cross.im,
        mode[0].norm_sqr() - mode[1].norm_sqr(),
    ])
}

/// Sweeps the detection probability over x and tabulates (x, P, P/mean).
///
/// The range must span at least one fringe period π/k and the grid at least
/// 3 points. The numerically extracted contrast (max-min)/(max+min) is
/// attached as metadata under `visibility_extracted`.
pub fn fringe_scan(
    state: &OnePhotonState,
    resp: &ComplexResponse,
    scale: &FieldScale,
    k: f64,
    x_range: (f64, f64),
    n_points: usize,
) -> Result<ScanTable> {
    if n_points < 3 {
        return Err(Error::TooFewPoints {
            min: 3,
            got: n_points,
        });
    }
    if !k.is_finite() || k <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "wavenumber k must be finite and > 0, got {k}"
        )));
    }
    let (lo, hi) = x_range;
    let period = PI / k;
    let span = hi - lo;
    if !span.is_finite() || span <= 0.0 {
        return Err(Error::InvalidRange {
            lo,
            hi,
            reason: "range must satisfy lo < hi".to_string(),
        });
    }
    if span < period * (1.0 - 1e-12) {
        return Err(Error::InvalidRange {
            lo,
            hi,
            reason: format!("range must span at least one period pi/k = {period}"),
        });
    }

    let xs = linspace(lo, hi, n_points);
    let probabilities: Vec<f64> = xs
        .iter()
        .map(|&x| detection_probability(state, resp, x, scale, k))
        .collect();

    // Analytic x-average of the probability for this state.
    let z = resp.zeta();
    let e2 = scale.amplitude * scale.amplitude;
    let mean = e2
        * ((ONE + z).norm_sqr() * state.alpha.norm_sqr()
            + (ONE - z).norm_sqr() * state.beta.norm_sqr());

    let max = probabilities.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = probabilities.iter().cloned().fold(f64::INFINITY, f64::min);
    let extracted = if max + min > 0.0 {
        (max - min) / (max + min)
    } else {
        0.0
    };

    let relative: Vec<f64> = if mean > 0.0 {
        probabilities.iter().map(|&p| p / mean).collect()
    } else {
        vec![0.0; probabilities.len()]
    };

    let mut table = ScanTable::new();
    table.push_meta("zeta", fmt_complex(z));
    table.push_meta("alpha", fmt_complex(state.alpha));
    table.push_meta("beta", fmt_complex(state.beta));
    table.push_meta("amplitude", scale.amplitude);
    table.push_meta("wavenumber_k", k);
    table.push_meta("x_min", lo);
    table.push_meta("x_max", hi);
    table.push_meta("n_points", n_points);
    table.push_meta("mean_level", mean);
    table.push_meta("visibility_closed_form", visibility(resp));
    table.push_meta("visibility_extracted", extracted);
    table.push_column("x", xs)?;
    table.push_column("probability_over_mean", relative)?;
    table.push_column("probability", probabilities)?;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;
    use rand_chacha::rand_core::{RngCore, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    const K: f64 = 2.0 * PI;

    fn resp(re: f64, im: f64) -> ComplexResponse {
        ComplexResponse::new(Complex64::new(re, im)).unwrap()
    }

    fn unit_scale() -> FieldScale {
        FieldScale::default()
    }

    fn u01(rng: &mut ChaCha12Rng) -> f64 {
        (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn random_state(rng: &mut ChaCha12Rng) -> OnePhotonState {
        let a = Complex64::new(u01(rng) - 0.5, u01(rng) - 0.5);
        let b = Complex64::new(u01(rng) - 0.5, u01(rng) - 0.5);
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt().max(1e-6);
        OnePhotonState::new(a / norm, b / norm).unwrap()
    }

    #[test]
    fn state_normalization_enforced() {
        assert!(OnePhotonState::new(ONE, ONE).is_err());
        let s = OnePhotonState::from_relative_phase(0.7);
        assert_relative_eq!(
            s.alpha().norm_sqr() + s.beta().norm_sqr(),
            1.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(s.beta().arg(), 0.7, max_relative = 1e-12);
    }

    #[test]
    fn field_scale_positive() {
        assert!(FieldScale::new(0.0).is_err());
        assert!(FieldScale::new(-1.0).is_err());
        assert!(FieldScale::new(2.5).is_ok());
    }

    #[test]
    fn amplitude_examples() {
        let scale = unit_scale();
        // zeta = 1 keeps only the right-moving term: sqrt(2) E e^{ikx}
        let x = 0.37;
        let a = detection_amplitude(&resp(1.0, 0.0), x, 1.2, &scale, K);
        let expected = Complex64::from_polar(2.0_f64.sqrt(), K * x);
        assert!((a - expected).norm() < 1e-12);
        // zeta = 0 at x = 0, phi = 0: both terms equal E/sqrt(2)
        let a = detection_amplitude(&resp(0.0, 0.0), 0.0, 0.0, &scale, K);
        assert!((a - Complex64::new(2.0_f64.sqrt(), 0.0)).norm() < 1e-12);
        // dark fringe at 2kx - phi = pi
        let x = PI / (2.0 * K);
        let a = detection_amplitude(&resp(0.0, 0.0), x, 0.0, &scale, K);
        assert!(a.norm() < 1e-12);
    }

    #[test]
    fn probability_examples() {
        let scale = unit_scale();
        let phi = 0.4;
        let state = OnePhotonState::from_relative_phase(phi);
        // standing-wave law 1 + cos(2kx - phi)
        for &x in &linspace(-0.4, 0.9, 37) {
            let p = detection_probability(&state, &resp(0.0, 0.0), x, &scale, K);
            let law = 1.0 + (2.0 * K * x - phi).cos();
            assert_abs_diff_eq!(p, law, epsilon = 1e-12);
        }
        // zeta = ±1: flat at 2 E²
        for z in [1.0, -1.0] {
            for &x in &linspace(0.0, 0.5, 11) {
                let p = detection_probability(&state, &resp(z, 0.0), x, &scale, K);
                assert_abs_diff_eq!(p, 2.0, epsilon = 1e-12);
            }
        }
        // pure |R> photon is invisible to the zeta = -1 detector
        let right = OnePhotonState::new(ONE, Complex64::new(0.0, 0.0)).unwrap();
        for &x in &linspace(0.0, 0.5, 11) {
            assert_eq!(
                detection_probability(&right, &resp(-1.0, 0.0), x, &scale, K),
                0.0
            );
        }
    }

    // Oracle: contrast extracted from a dense scan of the probability.
    fn scanned_visibility(r: &ComplexResponse, n: usize) -> f64 {
        let state = OnePhotonState::from_relative_phase(0.0);
        let scale = unit_scale();
        let mut max = f64::NEG_INFINITY;
        let mut min = f64::INFINITY;
        for &x in &linspace(0.0, PI / K, n) {
            let p = detection_probability(&state, r, x, &scale, K);
            max = max.max(p);
            min = min.min(p);
        }
        if max + min > 0.0 {
            (max - min) / (max + min)
        } else {
            0.0
        }
    }

    #[test]
    fn visibility_examples() {
        assert_eq!(visibility(&resp(0.0, 0.0)), 1.0);
        assert_eq!(visibility(&resp(1.0, 0.0)), 0.0);
        assert_eq!(visibility(&resp(-1.0, 0.0)), 0.0);
        // closed form at zeta = 0.5 equals 0.6 and matches the scan oracle
        let v = visibility(&resp(0.5, 0.0));
        assert_abs_diff_eq!(v, 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(v, scanned_visibility(&resp(0.5, 0.0), 10_001), epsilon = 1e-6);
    }

    #[test]
    fn path_bias_examples() {
        assert_eq!(path_bias(0.0), 0.0);
        assert_eq!(path_bias(1.0), 1.0);
        let b = path_bias(0.5);
        assert_abs_diff_eq!(b, 0.8, epsilon = 1e-12);
        let v = visibility(&resp(0.5, 0.0));
        assert_abs_diff_eq!(v * v + b * b, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn fringe_summary_examples() {
        let scale = unit_scale();
        let s = fringe_summary(&resp(0.0, 0.0), &scale);
        assert_eq!(s.mean_level, 1.0);
        assert_eq!(s.visibility, 1.0);
        assert_eq!(s.phase_offset, 0.0);

        let s = fringe_summary(&resp(0.0, 1.0), &scale);
        assert_abs_diff_eq!(s.mean_level, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.visibility, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.phase_offset, PI / 2.0, epsilon = 1e-12);

        // visibility zero makes the offset unobservable; define it as 0
        let s = fringe_summary(&resp(1.0, 0.0), &scale);
        assert_abs_diff_eq!(s.mean_level, 2.0, epsilon = 1e-12);
        assert_eq!(s.visibility, 0.0);
        assert_eq!(s.phase_offset, 0.0);
    }

    #[test]
    fn fringe_maximum_sits_at_minus_offset() {
        // Oracle: locate the maximum of a dense scan and compare the fringe
        // phase 2k·x_max - phi against the documented convention -delta.
        let scale = unit_scale();
        let phi = 0.9;
        let state = OnePhotonState::from_relative_phase(phi);
        for r in [resp(0.0, 1.0), resp(0.4, -0.7), resp(2.0, 0.0), resp(0.3, 0.0)] {
            let summary = fringe_summary(&r, &scale);
            if summary.visibility < 0.05 {
                continue;
            }
            let xs = linspace(0.0, PI / K, 40_001);
            let (x_max, _) = xs
                .iter()
                .map(|&x| (x, detection_probability(&state, &r, x, &scale, K)))
                .fold((0.0, f64::NEG_INFINITY), |acc, cur| {
                    if cur.1 > acc.1 {
                        cur
                    } else {
                        acc
                    }
                });
            let wrapped = (2.0 * K * x_max - phi + summary.phase_offset).rem_euclid(2.0 * PI);
            let dist = wrapped.min(2.0 * PI - wrapped);
            assert!(
                dist < 1e-3,
                "maximum at the wrong phase for zeta={}: dist={dist}",
                r.zeta()
            );
        }
    }

    #[test]
    fn fringe_law_pointwise() {
        let scale = FieldScale::new(1.7).unwrap();
        let phi = -1.3;
        let state = OnePhotonState::from_relative_phase(phi);
        for r in [
            resp(0.0, 0.0),
            resp(0.5, 0.0),
            resp(-2.0, 0.0),
            resp(0.3, 0.8),
            resp(0.0, -1.5),
        ] {
            let s = fringe_summary(&r, &scale);
            for &x in &linspace(-1.0, 1.0, 101) {
                let p = detection_probability(&state, &r, x, &scale, K);
                let law = s.mean_level
                    * (1.0 + s.visibility * (2.0 * K * x - phi + s.phase_offset).cos());
                assert!(
                    (p - law).abs() <= 1e-12 * s.mean_level,
                    "law violated at x={x}, zeta={}",
                    r.zeta()
                );
                // for real zeta the offset is 0 or pi, so the sign of the
                // offset term is immaterial and the -delta form holds too
                if r.is_real() {
                    let flipped = s.mean_level
                        * (1.0 + s.visibility * (2.0 * K * x - phi - s.phase_offset).cos());
                    assert!((p - flipped).abs() <= 1e-12 * s.mean_level);
                }
            }
        }
    }

    #[test]
    fn periodicity() {
        let scale = unit_scale();
        let state = OnePhotonState::from_relative_phase(0.3);
        let r = resp(0.4, 0.2);
        let period = PI / K;
        for &x in &linspace(0.0, 1.0, 67) {
            let a = detection_probability(&state, &r, x, &scale, K);
            let b = detection_probability(&state, &r, x + period, &scale, K);
            assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        }
    }

    #[test]
    fn complementarity_dense() {
        let mut worst: f64 = 0.0;
        for &z in &linspace(-5.0, 5.0, 1001) {
            let v = visibility(&resp(z, 0.0));
            let b = path_bias(z);
            worst = worst.max((v * v + b * b - 1.0).abs());
        }
        assert!(worst <= 1e-12, "max deviation {worst:e}");
    }

    #[test]
    fn channel_weight_identity() {
        for &z in &linspace(-4.0, 4.0, 801) {
            let w_r = (1.0 + z) * (1.0 + z);
            let w_l = (1.0 - z) * (1.0 - z);
            let from_weights = (w_r - w_l) / (w_r + w_l);
            assert!((from_weights - path_bias(z)).abs() <= 1e-12);
        }
    }

    #[test]
    fn selected_mode_examples() {
        let m = selected_mode(&resp(1.0, 0.0), 0.0, K);
        assert_eq!(m[0], ONE);
        assert_eq!(m[1], Complex64::new(0.0, 0.0));
        let m = selected_mode(&resp(-1.0, 0.0), 0.0, K);
        assert_eq!(m[0], Complex64::new(0.0, 0.0));
        assert_eq!(m[1], ONE);
        let m = selected_mode(&resp(0.0, 0.0), 0.0, K);
        assert!((m[0] - Complex64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((m[1] - Complex64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn povm_examples() {
        let scale = unit_scale();
        let p = povm_element(&resp(0.0, 0.0), 0.0, &scale, K);
        for i in 0..2 {
            for j in 0..2 {
                assert!((p.matrix()[i][j] - ONE).norm() < 1e-15);
            }
        }
        let p = povm_element(&resp(1.0, 0.0), 0.8, &scale, K);
        assert_abs_diff_eq!(p.matrix()[0][0].re, 4.0, epsilon = 1e-12);
        assert!(p.matrix()[0][1].norm() == 0.0);
        assert!(p.matrix()[1][1].norm() == 0.0);
        // trace = 2 E² (1+|zeta|²)
        let scale = FieldScale::new(1.3).unwrap();
        let r = resp(0.7, -0.4);
        let p = povm_element(&r, 0.21, &scale, K);
        let expected = 2.0 * 1.3 * 1.3 * (1.0 + r.zeta().norm_sqr());
        assert!((p.trace() - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn povm_validation() {
        let bad = [
            [ONE, Complex64::new(0.0, 1.0)],
            [Complex64::new(0.0, 1.0), ONE],
        ];
        assert!(PovmElement::from_matrix(bad).is_err()); // not Hermitian
        let negative = [
            [Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
        ];
        assert!(PovmElement::from_matrix(negative).is_err()); // not PSD
        let rank2 = [
            [ONE, Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), ONE],
        ];
        assert!(PovmElement::from_matrix(rank2).is_err()); // rank 2
        let ok = povm_element(&resp(0.2, 0.4), 0.3, &unit_scale(), K);
        assert!(PovmElement::from_matrix(*ok.matrix()).is_ok());
    }

    #[test]
    fn bloch_examples() {
        let m = [ONE, Complex64::new(0.0, 0.0)];
        assert_eq!(bloch_vector(&m).unwrap(), [0.0, 0.0, 1.0]);
        let m = [
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::new(FRAC_1_SQRT_2, 0.0),
        ];
        let v = bloch_vector(&m).unwrap();
        assert_abs_diff_eq!(v[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v[2], 0.0, epsilon = 1e-12);
        // z-component of the selected mode equals the path bias
        let v = bloch_vector(&selected_mode(&resp(0.5, 0.0), 0.0, K)).unwrap();
        assert_abs_diff_eq!(v[2], 0.8, epsilon = 1e-12);
        // rejects non-normalized input
        let bad = [ONE, ONE];
        assert!(matches!(bloch_vector(&bad), Err(Error::NotUnit { .. })));
    }

    #[test]
    fn bloch_z_matches_path_bias_at_any_position() {
        for &z in &linspace(-3.0, 3.0, 121) {
            for &x in &[0.0, 0.17, -2.4] {
                let v = bloch_vector(&selected_mode(&resp(z, 0.0), x, K)).unwrap();
                assert!((v[2] - path_bias(z)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn mean_level_matches_period_average() {
        // Trapezoid over one exact period is exact for a single harmonic.
        let scale = FieldScale::new(0.8).unwrap();
        let state = OnePhotonState::from_relative_phase(1.1);
        for r in [resp(0.0, 0.0), resp(0.6, 0.0), resp(0.2, -0.9)] {
            let n = 64;
            let period = PI / K;
            let mut acc = 0.0;
            for j in 0..n {
                let x = period * (j as f64) / (n as f64);
                acc += detection_probability(&state, &r, x, &scale, K);
            }
            let mean_num = acc / (n as f64);
            let mean = fringe_summary(&r, &scale).mean_level;
            assert!((mean_num - mean).abs() <= 1e-10 * mean.max(1.0));
        }
    }

    #[test]
    fn fringe_scan_examples() {
        let scale = unit_scale();
        let state = OnePhotonState::from_relative_phase(0.0);
        let period = PI / K;

        let t = fringe_scan(&state, &resp(0.0, 0.0), &scale, K, (0.0, period), 1001).unwrap();
        let v = t.meta_f64("visibility_extracted").unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-4);

        let t = fringe_scan(&state, &resp(1.0, 0.0), &scale, K, (0.0, period), 1001).unwrap();
        assert!(t.meta_f64("visibility_extracted").unwrap() <= 1e-12);

        let t = fringe_scan(&state, &resp(0.25, 0.0), &scale, K, (0.0, period), 1001).unwrap();
        let expected = (1.0 - 0.0625) / 1.0625;
        assert_abs_diff_eq!(
            t.meta_f64("visibility_extracted").unwrap(),
            expected,
            epsilon = 1e-4
        );

        // rejects short ranges and coarse grids
        assert!(fringe_scan(&state, &resp(0.0, 0.0), &scale, K, (0.0, 0.9 * period), 101).is_err());
        assert!(fringe_scan(&state, &resp(0.0, 0.0), &scale, K, (0.0, period), 2).is_err());
    }

    #[test]
    fn povm_expectation_matches_probability_random() {
        let mut rng = ChaCha12Rng::from_seed([7; 32]);
        let scale = FieldScale::new(1.2).unwrap();
        for _ in 0..200 {
            let r = resp(4.0 * (u01(&mut rng) - 0.5), 4.0 * (u01(&mut rng) - 0.5));
            let x = 2.0 * (u01(&mut rng) - 0.5);
            let state = random_state(&mut rng);
            let pi = povm_element(&r, x, &scale, K);
            let direct = detection_probability(&state, &r, x, &scale, K);
            assert!(
                (pi.expectation(&state) - direct).abs() <= 1e-12 * direct.max(1.0),
                "mismatch for zeta={}",
                r.zeta()
            );
        }
    }

    proptest! {
        #[test]
        fn selected_mode_unit_norm(re in -4.0..4.0f64, im in -4.0..4.0f64, x in -3.0..3.0f64) {
            let m = selected_mode(&resp(re, im), x, K);
            let norm = m[0].norm_sqr() + m[1].norm_sqr();
            prop_assert!((norm - 1.0).abs() <= 1e-12);
            let b = bloch_vector(&m).unwrap();
            let len = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
            prop_assert!((len - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn probability_nonnegative_and_povm_consistent(
            re in -3.0..3.0f64,
            im in -3.0..3.0f64,
            x in -2.0..2.0f64,
            phi in -6.0..6.0f64,
        ) {
            let state = OnePhotonState::from_relative_phase(phi);
            let r = resp(re, im);
            let scale = unit_scale();
            let p = detection_probability(&state, &r, x, &scale, K);
            prop_assert!(p >= 0.0);
            let pi = povm_element(&r, x, &scale, K);
            prop_assert!((pi.expectation(&state) - p).abs() <= 1e-12 * p.max(1.0));
            let amp = detection_amplitude(&r, x, phi, &scale, K);
            prop_assert!((amp.norm_sqr() - p).abs() <= 1e-12 * p.max(1.0));
        }
    }
}
