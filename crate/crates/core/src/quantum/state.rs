use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64};
use crate::quantum::OperatorMatrix;

/// Tolerance on `sum |c_i|^2 - 1` for a state to count as normalized.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Probability amplitudes of a pure state in a fixed basis.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amplitudes: CVector,
}

impl QuantumState {
    pub fn new(amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::InvalidState(format!(
                "dimension must be at least 2, got {}",
                amplitudes.len()
            )));
        }
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        Ok(Self { amplitudes })
    }

    pub fn from_slice(amplitudes: &[C64]) -> Result<Self> {
        Self::new(CVector::from_column_slice(amplitudes))
    }

    /// Basis vector `|k>` of an `n`-dimensional space.
    pub fn basis(n: usize, k: usize) -> Result<Self> {
        if k >= n {
            return Err(Error::InvalidParameter(format!("basis index {k} >= {n}")));
        }
        let mut v = CVector::zeros(n);
        v[k] = C64::new(1.0, 0.0);
        Self::new(v)
    }

    pub(crate) fn from_vector_unchecked(amplitudes: CVector) -> Self {
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORMALIZATION_TOL
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidState(format!(
                "cannot normalize state of norm {n}"
            )));
        }
        Ok(Self {
            amplitudes: &self.amplitudes / C64::new(n, 0.0),
        })
    }

    pub(crate) fn require_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::NotNormalized { norm: self.norm() })
        }
    }

    /// Multiplies every amplitude by `exp(i alpha)`.
    pub fn with_global_phase(&self, alpha: f64) -> Self {
        Self {
            amplitudes: &self.amplitudes * C64::from_polar(1.0, alpha),
        }
    }

    /// `|psi><psi|` (not normalized by the norm).
    pub fn projector(&self) -> CMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    /// `<psi|other>`.
    pub fn inner(&self, other: &QuantumState) -> Result<C64> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }
}

/// `<psi|op|psi>` for a normalized state.
pub fn expectation(state: &QuantumState, op: &OperatorMatrix) -> Result<C64> {
    op.check_dim(state.dim())?;
    state.require_normalized()?;
    Ok(raw_expectation(state.amplitudes(), op.matrix()))
}

/// `psi† A psi` without any normalization; the diffusion metric field uses this
/// off the unit sphere.
pub(crate) fn raw_expectation(psi: &CVector, a: &CMatrix) -> C64 {
    psi.dotc(&(a * psi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{bloch_to_state, BlochPoint};
    use std::f64::consts::PI;

    #[test]
    fn north_pole_is_sigma_z_eigenstate() {
        let s = bloch_to_state(&BlochPoint::new(0.0, 1.3).unwrap());
        let z = expectation(&s, &OperatorMatrix::pauli_z()).unwrap();
        assert!((z - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn equator_expectations() {
        let s = bloch_to_state(&BlochPoint::new(PI / 2.0, 0.0).unwrap());
        let x = expectation(&s, &OperatorMatrix::pauli_x()).unwrap();
        assert!((x.re - 1.0).abs() < 1e-12 && x.im.abs() < 1e-12);
        let s = bloch_to_state(&BlochPoint::new(PI / 2.0, PI / 2.0).unwrap());
        let z = expectation(&s, &OperatorMatrix::pauli_z()).unwrap();
        assert!(z.norm() < 1e-12);
    }

    #[test]
    fn expectation_errors() {
        let s = QuantumState::basis(3, 0).unwrap();
        assert!(matches!(
            expectation(&s, &OperatorMatrix::pauli_z()),
            Err(Error::DimensionMismatch { .. })
        ));
        let s = QuantumState::from_slice(&[C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
        assert!(matches!(
            expectation(&s, &OperatorMatrix::pauli_z()),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn rejects_one_dimensional_state() {
        assert!(QuantumState::from_slice(&[C64::new(1.0, 0.0)]).is_err());
    }
}
