//! The detector's electric-magnetic response ratio.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dimensionless complex ratio `zeta` of the detector's magnetic response
/// amplitude to its electric one.
///
/// `zeta = 0` is a purely electric detector; `zeta = -1` cancels the
/// monitored amplitude completely in geometries where the projected electric
/// and magnetic fields are proportional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexResponse {
    zeta: Complex64,
}

impl ComplexResponse {
    /// Builds a response from a complex ratio. Rejects non-finite parts.
    pub fn new(zeta: Complex64) -> Result<Self> {
        if !zeta.re.is_finite() || !zeta.im.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "zeta must have finite real and imaginary parts, got {zeta}"
            )));
        }
        Ok(Self { zeta })
    }

    /// Convenience constructor for a real-valued response ratio.
    pub fn real(zeta: f64) -> Result<Self> {
        Self::new(Complex64::new(zeta, 0.0))
    }

    pub fn zeta(&self) -> Complex64 {
        self.zeta
    }

    /// Whether the ratio is purely real (exactly zero imaginary part).
    pub fn is_real(&self) -> bool {
        self.zeta.im == 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        assert!(ComplexResponse::new(Complex64::new(f64::NAN, 0.0)).is_err());
        assert!(ComplexResponse::new(Complex64::new(0.0, f64::INFINITY)).is_err());
        assert!(ComplexResponse::real(f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn stores_value() {
        let r = ComplexResponse::new(Complex64::new(0.5, -0.25)).unwrap();
        assert_eq!(r.zeta(), Complex64::new(0.5, -0.25));
        assert!(!r.is_real());
        assert!(ComplexResponse::real(-1.0).unwrap().is_real());
    }
}
