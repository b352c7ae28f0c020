//! Synthetic detection events and statistical recovery of the fringe.
//!
//! The counting model is deliberately minimal: detection events are
//! independent draws from the normalized fringe density P(x)/∫P over one
//! period, conditioned on a fixed total event count. No absolute rate
//! scale, dead time, dark counts or multi-photon effects are modeled; this
//! is an artifact-level assumption, not a derived result.
//!
//! Sampling uses inverse-CDF transformation. The cumulative integral of a
//! constant-plus-cosine density is available in closed form and is inverted
//! by bracketed Newton iteration to a tolerance of 1e-12 of the period, so
//! streams are exact and bit-reproducible for a fixed seed.
//!
//! RNG: ChaCha12, keyed by writing the 64-bit seed little-endian into the
//! first 8 bytes of the 32-byte key (remaining bytes zero). Uniform doubles
//! take the top 53 bits of each 64-bit output. The algorithm name is
//! recorded in all event-table metadata.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::onephoton::{FieldScale, OnePhotonState};
use crate::response::ComplexResponse;
use crate::scan::{fmt_complex, ScanTable};

/// Name of the event-stream generator recorded in output metadata.
pub const RNG_ALGORITHM: &str = "chacha12";

/// Event count, seed, histogram resolution and sampling period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    n_events: usize,
    seed: u64,
    n_bins: usize,
    x_period: f64,
}

impl SamplerConfig {
    /// Requires `n_events >= 1`, `n_bins >= 8` and a positive period.
    pub fn new(n_events: usize, seed: u64, n_bins: usize, x_period: f64) -> Result<Self> {
        if n_events < 1 {
            return Err(Error::InvalidConfig("n_events must be >= 1".to_string()));
        }
        if n_bins < 8 {
            return Err(Error::InvalidConfig(format!(
                "n_bins must be >= 8, got {n_bins}"
            )));
        }
        if !x_period.is_finite() || x_period <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "x_period must be finite and > 0, got {x_period}"
            )));
        }
        Ok(Self {
            n_events,
            seed,
            n_bins,
            x_period,
        })
    }

    /// Config with the period set to π/k for wavenumber k.
    pub fn for_wavenumber(n_events: usize, seed: u64, n_bins: usize, k: f64) -> Result<Self> {
        if !k.is_finite() || k <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "wavenumber k must be finite and > 0, got {k}"
            )));
        }
        Self::new(n_events, seed, n_bins, PI / k)
    }

    pub fn n_events(&self) -> usize {
        self.n_events
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn x_period(&self) -> f64 {
        self.x_period
    }
}

/// First-harmonic estimate of visibility and fringe phase from counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilityEstimate {
    /// Estimated visibility, clipped to [0, 1].
    pub v_hat: f64,
    /// Approximate one-sigma uncertainty √((2 - v̂²)/(2N)); a large-N
    /// delta-method formula.
    pub v_err: f64,
    /// Estimated fringe phase ψ in (-π, π]: the density is reconstructed as
    /// ∝ 1 + v̂·cos(2kx - ψ). For an equal-weight state with relative phase
    /// φ this estimates φ - δ_ζ (equal to φ + δ_ζ modulo 2π for real ζ).
    pub phase_hat: f64,
    pub n_events: usize,
}

/// Pearson chi-square of binned events against the analytic density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Fringe density over one period: p(x) ∝ m + 2ρ·cos(2kx - σ).
struct FringeDensity {
    mean: f64,
    rho: f64,
    sigma: f64,
    sin_sigma: f64,
    k: f64,
    period: f64,
}

impl FringeDensity {
    fn build(
        state: &OnePhotonState,
        resp: &ComplexResponse,
        k: f64,
        period: f64,
    ) -> Result<Self> {
        let z = resp.zeta();
        let u = (Complex64::new(1.0, 0.0) + z) * state.alpha();
        let w = (Complex64::new(1.0, 0.0) - z) * state.beta();
        let mean = u.norm_sqr() + w.norm_sqr();
        if mean <= 0.0 {
            return Err(Error::InvalidConfig(
                "detection probability vanishes identically; no sampling density".to_string(),
            ));
        }
        let cross = u.conj() * w;
        // rho <= mean/2 holds analytically; clamp roundoff so the density
        // never goes negative at its minimum.
        let rho = cross.norm().min(mean / 2.0);
        let sigma = cross.arg();
        Ok(Self {
            mean,
            rho,
            sigma,
            sin_sigma: sigma.sin(),
            k,
            period,
        })
    }

    /// ∫₀ˣ p dt, unnormalized.
    fn cumulative(&self, x: f64) -> f64 {
        self.mean * x + self.rho / self.k * ((2.0 * self.k * x - self.sigma).sin() + self.sin_sigma)
    }

    fn total(&self) -> f64 {
        self.mean * self.period
    }

    /// Inverse CDF by bracketed Newton iteration.
    fn quantile(&self, u: f64) -> f64 {
        let target = u * self.total();
        let tol_x = 1e-12 * self.period;
        let tol_f = 1e-14 * self.total();
        let mut lo = 0.0;
        let mut hi = self.period;
        let mut x = u * self.period;
        for _ in 0..200 {
            let (s, c) = (2.0 * self.k * x - self.sigma).sin_cos();
            let g = self.mean * x + self.rho / self.k * (s + self.sin_sigma) - target;
            if g.abs() <= tol_f {
                break;
            }
            if g > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            if hi - lo <= tol_x {
                break;
            }
            let deriv = self.mean + 2.0 * self.rho * c;
            let newton = x - g / deriv;
            x = if deriv > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        x.clamp(0.0, self.period)
    }
}

/// ChaCha12 stream for a 64-bit seed; see the module docs for the keying.
pub fn event_rng(seed: u64) -> ChaCha12Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    ChaCha12Rng::from_seed(key)
}

/// Uniform double in [0, 1) from the top 53 bits of one RNG output.
pub fn uniform_u01<R: RngCore>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Draws `cfg.n_events` detector positions over one period from the
/// normalized fringe density of (state, ζ). Deterministic for a fixed seed.
///
/// The configured period must match π/k.
pub fn sample_positions(
    state: &OnePhotonState,
    resp: &ComplexResponse,
    _scale: &FieldScale,
    k: f64,
    cfg: &SamplerConfig,
) -> Result<Vec<f64>> {
    if !k.is_finite() || k <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "wavenumber k must be finite and > 0, got {k}"
        )));
    }
    let period = PI / k;
    if (cfg.x_period - period).abs() > 1e-9 * period {
        return Err(Error::InvalidConfig(format!(
            "x_period {} does not match pi/k = {period}",
            cfg.x_period
        )));
    }
    let density = FringeDensity::build(state, resp, k, cfg.x_period)?;
    let mut rng = event_rng(cfg.seed);
    Ok((0..cfg.n_events)
        .map(|_| density.quantile(uniform_u01(&mut rng)))
        .collect())
}

/// Recovers visibility and fringe phase from the first circular moment
/// m = (1/N)·Σ e^{i·2k·x_j}: v̂ = 2|m| (clipped to [0, 1]) and ψ̂ = arg m.
///
/// Requires at least 100 events.
pub fn estimate_visibility(
    positions: &[f64],
    k: f64,
    _cfg: &SamplerConfig,
) -> Result<VisibilityEstimate> {
    let n = positions.len();
    if n < 100 {
        return Err(Error::InvalidParameter(format!(
            "visibility estimation needs >= 100 events, got {n}"
        )));
    }
    let mut re = 0.0;
    let mut im = 0.0;
    for &x in positions {
        let (s, c) = (2.0 * k * x).sin_cos();
        re += c;
        im += s;
    }
    let m = Complex64::new(re / n as f64, im / n as f64);
    let v_hat = (2.0 * m.norm()).clamp(0.0, 1.0);
    let v_err = ((2.0 - v_hat * v_hat) / (2.0 * n as f64)).sqrt();
    Ok(VisibilityEstimate {
        v_hat,
        v_err,
        phase_hat: m.arg(),
        n_events: n,
    })
}

/// Pearson chi-square of the binned events against the analytic density,
/// with expected counts from exact CDF differences and `n_bins - 1` degrees
/// of freedom.
pub fn histogram_chi_square(
    positions: &[f64],
    state: &OnePhotonState,
    resp: &ComplexResponse,
    _scale: &FieldScale,
    k: f64,
    cfg: &SamplerConfig,
) -> Result<ChiSquareTest> {
    if positions.is_empty() {
        return Err(Error::InvalidParameter(
            "chi-square test needs at least one event".to_string(),
        ));
    }
    let density = FringeDensity::build(state, resp, k, cfg.x_period)?;
    let bins = cfg.n_bins;
    let mut observed = vec![0u64; bins];
    for &x in positions {
        let folded = x.rem_euclid(cfg.x_period);
        let idx = ((folded / cfg.x_period * bins as f64) as usize).min(bins - 1);
        observed[idx] += 1;
    }
    let n = positions.len() as f64;
    let total = density.total();
    let mut statistic = 0.0;
    for (j, &count) in observed.iter().enumerate() {
        let lo = cfg.x_period * j as f64 / bins as f64;
        let hi = cfg.x_period * (j + 1) as f64 / bins as f64;
        let expected = n * (density.cumulative(hi) - density.cumulative(lo)) / total;
        if expected <= 0.0 {
            if count > 0 {
                statistic = f64::INFINITY;
            }
            continue;
        }
        let diff = count as f64 - expected;
        statistic += diff * diff / expected;
    }
    let dof = bins - 1;
    let dist = ChiSquared::new(dof as f64)
        .map_err(|e| Error::InvalidConfig(format!("chi-square setup failed: {e}")))?;
    let p_value = if statistic.is_finite() {
        1.0 - dist.cdf(statistic)
    } else {
        0.0
    };
    Ok(ChiSquareTest {
        statistic,
        dof,
        p_value,
    })
}

/// Single-column event table with the reproducibility metadata header
/// (rng, seed, N, ζ, φ, k, amplitude, period, bins).
pub fn events_table(
    positions: &[f64],
    resp: &ComplexResponse,
    phi: f64,
    scale: &FieldScale,
    k: f64,
    cfg: &SamplerConfig,
) -> Result<ScanTable> {
    let mut table = ScanTable::new();
    table.push_meta("rng", RNG_ALGORITHM);
    table.push_meta("seed", cfg.seed);
    table.push_meta("n_events", positions.len());
    table.push_meta("zeta", fmt_complex(resp.zeta()));
    table.push_meta("phi", phi);
    table.push_meta("wavenumber_k", k);
    table.push_meta("amplitude", scale.amplitude());
    table.push_meta("x_period", cfg.x_period);
    table.push_meta("n_bins", cfg.n_bins);
    table.push_column("x", positions.to_vec())?;
    Ok(table)
}
