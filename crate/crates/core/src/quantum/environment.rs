use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::quantum::OperatorMatrix;
use crate::serde_complex::{matrix_from_pairs, matrix_to_pairs, Pairs};

/// Which preset an [`EnvironmentModel`] was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvironmentKind {
    /// `L = mu sigma_+ sigma_-`
    Dephasing,
    /// `L = mu1 sigma_+ + mu2 sigma_-`, a single channel
    Thermal,
    /// `L = mu sigma_z`
    Measurement,
    Custom,
}

impl std::fmt::Display for EnvironmentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::Dephasing => "dephasing",
            Self::Thermal => "thermal",
            Self::Measurement => "measurement",
            Self::Custom => "custom",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for EnvironmentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dephasing" => Ok(Self::Dephasing),
            "thermal" => Ok(Self::Thermal),
            "measurement" => Ok(Self::Measurement),
            "custom" => Ok(Self::Custom),
            other => Err(Error::InvalidParameter(format!(
                "unknown environment kind `{other}`"
            ))),
        }
    }
}

/// Coupling strengths; presets use `mu` or the pair `mu1`, `mu2`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Couplings {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu2: Option<f64>,
}

impl Couplings {
    pub fn single(mu: f64) -> Self {
        Self {
            mu: Some(mu),
            ..Self::default()
        }
    }

    pub fn pair(mu1: f64, mu2: f64) -> Self {
        Self {
            mu1: Some(mu1),
            mu2: Some(mu2),
            ..Self::default()
        }
    }

    /// Point on the sweep ray of a preset: `mu = c` or `mu1 = 2 mu2 = 2 c`.
    pub fn on_ray(kind: EnvironmentKind, c: f64) -> Self {
        match kind {
            EnvironmentKind::Thermal => Self::pair(2.0 * c, c),
            _ => Self::single(c),
        }
    }

    fn require(value: Option<f64>, name: &'static str) -> Result<f64> {
        let v = value.ok_or(Error::MissingCoupling(name))?;
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidCoupling { name, value: v });
        }
        Ok(v)
    }

    pub fn mu(&self) -> Result<f64> {
        Self::require(self.mu, "mu")
    }

    pub fn mu1(&self) -> Result<f64> {
        Self::require(self.mu1, "mu1")
    }

    pub fn mu2(&self) -> Result<f64> {
        Self::require(self.mu2, "mu2")
    }
}

/// Hamiltonian plus Lindblad operators of one open system.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentModel {
    kind: EnvironmentKind,
    couplings: Couplings,
    hamiltonian: OperatorMatrix,
    lindblads: Vec<OperatorMatrix>,
}

/// Builds one of the qubit presets with `H = 0`.
pub fn make_environment(kind: EnvironmentKind, couplings: Couplings) -> Result<EnvironmentModel> {
    let lindblad = match kind {
        EnvironmentKind::Dephasing => {
            let mu = couplings.mu()?;
            let proj = OperatorMatrix::new(
                OperatorMatrix::sigma_plus().matrix() * OperatorMatrix::sigma_minus().matrix(),
            )?;
            proj.scaled(mu)
        }
        EnvironmentKind::Thermal => {
            let (mu1, mu2) = (couplings.mu1()?, couplings.mu2()?);
            OperatorMatrix::sigma_plus()
                .scaled(mu1)
                .plus(&OperatorMatrix::sigma_minus().scaled(mu2))?
        }
        EnvironmentKind::Measurement => OperatorMatrix::pauli_z().scaled(couplings.mu()?),
        EnvironmentKind::Custom => {
            return Err(Error::InvalidParameter(
                "custom environments are built with EnvironmentModel::custom".into(),
            ))
        }
    };
    Ok(EnvironmentModel {
        kind,
        couplings,
        hamiltonian: OperatorMatrix::zeros(2),
        lindblads: vec![lindblad],
    })
}

impl EnvironmentModel {
    pub fn custom(hamiltonian: OperatorMatrix, lindblads: Vec<OperatorMatrix>) -> Result<Self> {
        Self::assemble(
            EnvironmentKind::Custom,
            Couplings::default(),
            hamiltonian,
            lindblads,
        )
    }

    /// Closed system of dimension `n` with the given Hamiltonian.
    pub fn closed(hamiltonian: OperatorMatrix) -> Result<Self> {
        Self::custom(hamiltonian, Vec::new())
    }

    fn assemble(
        kind: EnvironmentKind,
        couplings: Couplings,
        hamiltonian: OperatorMatrix,
        lindblads: Vec<OperatorMatrix>,
    ) -> Result<Self> {
        let n = hamiltonian.dim();
        for l in &lindblads {
            l.check_dim(n)?;
        }
        let max = n * n - 1;
        if lindblads.len() > max {
            return Err(Error::TooManyChannels {
                dim: n,
                count: lindblads.len(),
                max,
            });
        }
        Ok(Self {
            kind,
            couplings,
            hamiltonian,
            lindblads,
        })
    }

    /// Replaces the Hamiltonian, keeping kind and couplings.
    pub fn with_hamiltonian(mut self, hamiltonian: OperatorMatrix) -> Result<Self> {
        hamiltonian.check_dim(self.dim())?;
        self.hamiltonian = hamiltonian;
        Ok(self)
    }

    pub fn kind(&self) -> EnvironmentKind {
        self.kind
    }

    pub fn couplings(&self) -> Couplings {
        self.couplings
    }

    pub fn hamiltonian(&self) -> &OperatorMatrix {
        &self.hamiltonian
    }

    pub fn lindblads(&self) -> &[OperatorMatrix] {
        &self.lindblads
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn channels(&self) -> usize {
        self.lindblads.len()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelRepr {
    kind: EnvironmentKind,
    #[serde(default)]
    couplings: Couplings,
    hamiltonian: Pairs,
    lindblads: Vec<Pairs>,
}

impl Serialize for EnvironmentModel {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        ModelRepr {
            kind: self.kind,
            couplings: self.couplings,
            hamiltonian: matrix_to_pairs(self.hamiltonian.matrix()),
            lindblads: self
                .lindblads
                .iter()
                .map(|l| matrix_to_pairs(l.matrix()))
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for EnvironmentModel {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ModelRepr::deserialize(deserializer)?;
        let op =
            |p: &Pairs| -> Result<OperatorMatrix> { OperatorMatrix::new(matrix_from_pairs(p)?) };
        let hamiltonian = op(&repr.hamiltonian).map_err(D::Error::custom)?;
        let lindblads = repr
            .lindblads
            .iter()
            .map(op)
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        EnvironmentModel::assemble(repr.kind, repr.couplings, hamiltonian, lindblads)
            .map_err(D::Error::custom)
    }
}

/// Builds the qubit Hamiltonian `hx sigma_x + hy sigma_y + hz sigma_z`.
pub fn qubit_hamiltonian(hx: f64, hy: f64, hz: f64) -> OperatorMatrix {
    let m: CMatrix = OperatorMatrix::pauli_x().matrix() * num_complex::Complex64::new(hx, 0.0)
        + OperatorMatrix::pauli_y().matrix() * num_complex::Complex64::new(hy, 0.0)
        + OperatorMatrix::pauli_z().matrix() * num_complex::Complex64::new(hz, 0.0);
    OperatorMatrix::new(m).expect("2x2 is square")
}
