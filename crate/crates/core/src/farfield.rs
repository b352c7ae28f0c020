//! Two-dipole far-field detection patterns.
//!
//! Two in-phase Hertzian dipoles along z sit at positions ±d/2 on the x
//! axis. A far-field detector in direction (θ, φ) sees the interference
//! phase δ = k·d·sinθ·cosφ. A purely electric detector records the Glauber
//! weight sin²θ·cos²(δ/2); a detector with electric-magnetic response ratio
//! ζ rescales it by |1+ζ|², because both projected field amplitudes share
//! the same angular factor in this geometry. The detector therefore changes
//! the weight of the pattern but never the fringe positions, and cancels it
//! entirely at ζ = -1.
//!
//! The polarization projections are fixed to u_e = θ̂ and u_m = φ̂. All
//! weights are unnormalized (proportionality constants set to 1); scans
//! carry separately normalized columns for plotting.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::response::ComplexResponse;
use crate::scan::{fmt_complex, linspace, normalized, ScanTable};

/// Separation and wavenumber of the two-dipole pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipolePairGeometry {
    separation_d: f64,
    wavenumber_k: f64,
}

impl DipolePairGeometry {
    /// Requires `separation_d >= 0` and `wavenumber_k > 0`.
    pub fn new(separation_d: f64, wavenumber_k: f64) -> Result<Self> {
        if !separation_d.is_finite() || separation_d < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "separation_d must be finite and >= 0, got {separation_d}"
            )));
        }
        if !wavenumber_k.is_finite() || wavenumber_k <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "wavenumber_k must be finite and > 0, got {wavenumber_k}"
            )));
        }
        Ok(Self {
            separation_d,
            wavenumber_k,
        })
    }

    /// Geometry with unit wavelength (k = 2π) and separation given in
    /// wavelengths.
    pub fn from_d_over_lambda(ratio: f64) -> Result<Self> {
        Self::new(ratio, 2.0 * PI)
    }

    pub fn separation(&self) -> f64 {
        self.separation_d
    }

    pub fn wavenumber(&self) -> f64 {
        self.wavenumber_k
    }

    /// The dimensionless product k·d.
    pub fn kd(&self) -> f64 {
        self.wavenumber_k * self.separation_d
    }

    pub fn d_over_lambda(&self) -> f64 {
        self.kd() / (2.0 * PI)
    }
}

/// Observation direction in spherical angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    theta: f64,
    phi: f64,
}

impl Direction {
    /// Requires θ in [0, π]; φ is reduced modulo 2π.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidParameter(format!(
                "theta must lie in [0, pi], got {theta}"
            )));
        }
        if !phi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "phi must be finite, got {phi}"
            )));
        }
        Ok(Self {
            theta,
            phi: phi.rem_euclid(2.0 * PI),
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// Cut through the pattern: vary θ at fixed φ, or vary φ at fixed θ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cut {
    /// θ runs over [0, π] at fixed azimuth.
    Polar { phi: f64 },
    /// φ runs over [0, 2π] at fixed polar angle.
    Azimuthal { theta: f64 },
}

/// Far-field phase difference δ = k·d·sinθ·cosφ between the two sources.
pub fn phase_delta(geom: &DipolePairGeometry, dir: &Direction) -> f64 {
    geom.kd() * dir.theta.sin() * dir.phi.cos()
}

/// Electric-only detection weight sin²θ·cos²(δ/2).
pub fn glauber_pattern(geom: &DipolePairGeometry, dir: &Direction) -> f64 {
    let s = dir.theta.sin();
    let c = (phase_delta(geom, dir) / 2.0).cos();
    s * s * c * c
}

/// Detector weight 1 + |ζ|² + 2·Re(ζ) = |1+ζ|²; zero exactly at ζ = -1.
pub fn detector_factor(resp: &ComplexResponse) -> f64 {
    let z = resp.zeta();
    1.0 + z.norm_sqr() + 2.0 * z.re
}

/// Generalized detection weight: the Glauber pattern rescaled by the
/// detector factor.
pub fn generalized_pattern(
    geom: &DipolePairGeometry,
    dir: &Direction,
    resp: &ComplexResponse,
) -> f64 {
    glauber_pattern(geom, dir) * detector_factor(resp)
}

/// Sweeps one cut and tabulates both weights plus per-column normalized
/// copies (each divided by its own maximum; identically zero stays zero).
pub fn pattern_scan(
    geom: &DipolePairGeometry,
    resp: &ComplexResponse,
    cut: Cut,
    n_points: usize,
) -> Result<ScanTable> {
    if n_points < 2 {
        return Err(Error::TooFewPoints {
            min: 2,
            got: n_points,
        });
    }
    let (angles, dirs): (Vec<f64>, Vec<Direction>) = match cut {
        Cut::Polar { phi } => {
            if !phi.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "fixed phi must be finite, got {phi}"
                )));
            }
            let grid = linspace(0.0, PI, n_points);
            let dirs = grid
                .iter()
                .map(|&theta| Direction::new(theta, phi))
                .collect::<Result<Vec<_>>>()?;
            (grid, dirs)
        }
        Cut::Azimuthal { theta } => {
            if !theta.is_finite() || !(0.0..=PI).contains(&theta) {
                return Err(Error::InvalidParameter(format!(
                    "fixed theta must lie in [0, pi], got {theta}"
                )));
            }
            let grid = linspace(0.0, 2.0 * PI, n_points);
            let dirs = grid
                .iter()
                .map(|&phi| Direction::new(theta, phi))
                .collect::<Result<Vec<_>>>()?;
            (grid, dirs)
        }
    };

    let glauber: Vec<f64> = dirs.iter().map(|d| glauber_pattern(geom, d)).collect();
    let factor = detector_factor(resp);
    let generalized: Vec<f64> = glauber.iter().map(|&g| g * factor).collect();

    let mut table = ScanTable::new();
    match cut {
        Cut::Polar { phi } => {
            table.push_meta("cut", "polar");
            table.push_meta("fixed_phi", phi);
        }
        Cut::Azimuthal { theta } => {
            table.push_meta("cut", "azimuthal");
            table.push_meta("fixed_theta", theta);
        }
    }
    table.push_meta("separation_d", geom.separation_d);
    table.push_meta("wavenumber_k", geom.wavenumber_k);
    table.push_meta("d_over_lambda", geom.d_over_lambda());
    table.push_meta("zeta", fmt_complex(resp.zeta()));
    table.push_meta("detector_factor", factor);
    table.push_meta("n_points", n_points);

    table.push_column("angle", angles)?;
    table.push_column("glauber_norm", normalized(&glauber))?;
    table.push_column("generalized_norm", normalized(&generalized))?;
    table.push_column("glauber", glauber)?;
    table.push_column("generalized", generalized)?;
    Ok(table)
}
