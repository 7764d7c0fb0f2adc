use crate::error::{Error, Result};
use crate::linalg::{hermiticity_defect, CMatrix, CVector, C64};

/// Entrywise tolerance used by [`OperatorMatrix::is_hermitian`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// A square complex matrix acting on an `n`-dimensional Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    entries: CMatrix,
}

impl OperatorMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::NotSquare {
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        if entries.nrows() == 0 {
            return Err(Error::InvalidParameter("operator of dimension 0".into()));
        }
        Ok(Self { entries })
    }

    /// Builds an operator from row-major entries.
    pub fn from_rows(n: usize, rows: &[C64]) -> Result<Self> {
        if rows.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: rows.len(),
            });
        }
        Self::new(CMatrix::from_row_slice(n, n, rows))
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            entries: CMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            entries: CMatrix::identity(n, n),
        }
    }

    pub fn pauli_x() -> Self {
        Self::real2([[0.0, 1.0], [1.0, 0.0]])
    }

    pub fn pauli_y() -> Self {
        let z = C64::new(0.0, 0.0);
        let i = C64::new(0.0, 1.0);
        Self {
            entries: CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        }
    }

    pub fn pauli_z() -> Self {
        Self::real2([[1.0, 0.0], [0.0, -1.0]])
    }

    /// Raising operator `|e><g|`; index 0 is the excited state.
    pub fn sigma_plus() -> Self {
        Self::real2([[0.0, 1.0], [0.0, 0.0]])
    }

    /// Lowering operator `|g><e|`.
    pub fn sigma_minus() -> Self {
        Self::real2([[0.0, 0.0], [1.0, 0.0]])
    }

    fn real2(rows: [[f64; 2]; 2]) -> Self {
        let c = |v: f64| C64::new(v, 0.0);
        Self {
            entries: CMatrix::from_row_slice(
                2,
                2,
                &[c(rows[0][0]), c(rows[0][1]), c(rows[1][0]), c(rows[1][1])],
            ),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    pub fn dagger(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            entries: &self.entries * C64::new(factor, 0.0),
        }
    }

    pub fn plus(&self, other: &OperatorMatrix) -> Result<Self> {
        self.check_dim(other.dim())?;
        Ok(Self {
            entries: &self.entries + &other.entries,
        })
    }

    pub fn is_hermitian(&self) -> bool {
        hermiticity_defect(&self.entries) < HERMITIAN_TOL
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|z| *z == C64::new(0.0, 0.0))
    }

    pub fn apply(&self, v: &CVector) -> Result<CVector> {
        self.check_dim(v.len())?;
        Ok(&self.entries * v)
    }

    pub(crate) fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: n,
            });
        }
        Ok(())
    }
}

/// Serialized as a row-major list of `[re, im]` pairs.
impl serde::Serialize for OperatorMatrix {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        crate::serde_complex::matrix_to_pairs(&self.entries).serialize(serializer)
    }
}

impl<'de> serde::Deserialize<'de> for OperatorMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let pairs = crate::serde_complex::Pairs::deserialize(deserializer)?;
        crate::serde_complex::matrix_from_pairs(&pairs)
            .and_then(Self::new)
            .map_err(D::Error::custom)
    }
}

impl std::ops::Index<(usize, usize)> for OperatorMatrix {
    type Output = C64;

    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.entries[idx]
    }
}
