//! Parameter and state types shared by every analysis, plus the mean-field
//! equations of motion.
//!
//! Units: rates and detunings are angular frequencies in rad/µs (numerically
//! the MHz figures used throughout), time is in µs and ħ = 1.

use std::fmt;

use nalgebra::{Matrix5, Vector5};

use crate::error::{Error, Result};

/// Physical parameters of one run.
///
/// `gamma` only enters the master-equation simulation; the mean-field,
/// stability and fluctuation analyses treat the atoms as lossless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Cavity detuning Δ_C.
    pub delta_c: f64,
    /// Atomic detuning Δ_A.
    pub delta_a: f64,
    /// Collective atom-cavity coupling λ.
    pub lambda: f64,
    /// Two-photon (squeezed) drive strength G.
    pub g_drive: f64,
    /// Cavity field decay κ.
    pub kappa: f64,
    /// Atomic decay γ.
    pub gamma: f64,
    pub n_atoms: usize,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            delta_c: 5.0,
            delta_a: 5.0,
            lambda: 4.5,
            g_drive: 0.0,
            kappa: 0.5,
            gamma: 0.001,
            n_atoms: 4,
        }
    }
}

impl ModelParams {
    /// Equal detunings Δ_C = Δ_A = `delta`, no atomic decay, N = 1.
    pub fn resonant(delta: f64, lambda: f64, g_drive: f64, kappa: f64) -> Self {
        Self {
            delta_c: delta,
            delta_a: delta,
            lambda,
            g_drive,
            kappa,
            gamma: 0.0,
            n_atoms: 1,
        }
    }

    pub fn with_lambda(self, lambda: f64) -> Self {
        Self { lambda, ..self }
    }

    pub fn with_g_drive(self, g_drive: f64) -> Self {
        Self { g_drive, ..self }
    }

    pub fn with_kappa(self, kappa: f64) -> Self {
        Self { kappa, ..self }
    }

    pub fn with_gamma(self, gamma: f64) -> Self {
        Self { gamma, ..self }
    }

    /// Sets both detunings.
    pub fn with_delta(self, delta: f64) -> Self {
        Self {
            delta_c: delta,
            delta_a: delta,
            ..self
        }
    }

    pub fn with_n_atoms(self, n_atoms: usize) -> Self {
        Self { n_atoms, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("delta_c", self.delta_c),
            ("delta_a", self.delta_a),
            ("lambda", self.lambda),
            ("g_drive", self.g_drive),
            ("kappa", self.kappa),
            ("gamma", self.gamma),
        ];
        for (field, v) in finite {
            if !v.is_finite() {
                return Err(Error::InvalidParams {
                    field,
                    reason: format!("{v} is not finite"),
                });
            }
        }
        let non_negative = [
            ("lambda", self.lambda),
            ("g_drive", self.g_drive),
            ("kappa", self.kappa),
            ("gamma", self.gamma),
        ];
        for (field, v) in non_negative {
            if v < 0.0 {
                return Err(Error::InvalidParams {
                    field,
                    reason: format!("{v} is negative"),
                });
            }
        }
        if self.n_atoms == 0 {
            return Err(Error::InvalidParams {
                field: "n_atoms",
                reason: "at least one atom is required".into(),
            });
        }
        Ok(())
    }

    /// Checks the extra conditions of the closed-form mean-field solution and
    /// returns the common detuning Δ.
    pub fn meanfield_delta(&self) -> Result<f64> {
        self.validate()?;
        if self.delta_c != self.delta_a {
            return Err(Error::UnequalDetuning {
                delta_c: self.delta_c,
                delta_a: self.delta_a,
            });
        }
        if self.delta_c == 0.0 {
            return Err(Error::DegenerateDetuning);
        }
        Ok(self.delta_c)
    }

    /// Largest rate or detuning magnitude, used to scale tolerances.
    pub fn max_rate(&self) -> f64 {
        [
            self.kappa,
            self.delta_c.abs(),
            self.delta_a.abs(),
            self.lambda,
            self.g_drive,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// One mean-field configuration: ⟨a⟩ = √N (α_Re + iα_Im) and ⟨S_β⟩ = N β.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SemiclassicalState {
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl SemiclassicalState {
    pub fn new(alpha_re: f64, alpha_im: f64, x: f64, y: f64, z: f64) -> Self {
        Self {
            alpha_re,
            alpha_im,
            x,
            y,
            z,
        }
    }

    /// Empty cavity, all atoms in the ground state.
    pub fn ground() -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0, -0.5)
    }

    /// Empty cavity, all atoms excited.
    pub fn inverted() -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0, 0.5)
    }

    pub fn to_vector(&self) -> Vector5<f64> {
        Vector5::new(self.alpha_re, self.alpha_im, self.x, self.y, self.z)
    }

    pub fn from_vector(v: &Vector5<f64>) -> Self {
        Self::new(v[0], v[1], v[2], v[3], v[4])
    }

    /// |α|.
    pub fn amplitude(&self) -> f64 {
        self.alpha_re.hypot(self.alpha_im)
    }

    /// The Z₂ partner (α, X, Y) → (−α, −X, −Y).
    pub fn z2_partner(&self) -> Self {
        Self::new(-self.alpha_re, -self.alpha_im, -self.x, -self.y, self.z)
    }
}

impl fmt::Display for SemiclassicalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(α = {:.7} {:+.7}i, X = {:.7}, Y = {:.7}, Z = {:.7})",
            self.alpha_re, self.alpha_im, self.x, self.y, self.z
        )
    }
}

/// Phase of a parameter point, from which kinds of fixed points are stable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    NormalPhase,
    SuperradiantPhase,
    Coexistence,
}

impl Phase {
    pub fn as_str(&self) -> &'static str {
        match self {
            Phase::NormalPhase => "NP",
            Phase::SuperradiantPhase => "SP",
            Phase::Coexistence => "NP+SP",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseLabel {
    pub phase: Phase,
    /// Number of stable fixed points (1, 2 or 3 in the regimes of interest).
    pub stable_count: usize,
}

/// Mean-field time derivatives (dα_Re, dα_Im, dX, dY, dZ)/dt.
pub fn semiclassical_rhs(state: &SemiclassicalState, params: &ModelParams) -> Vector5<f64> {
    let SemiclassicalState {
        alpha_re: ar,
        alpha_im: ai,
        x,
        y,
        z,
    } = *state;
    let (dc, da, l, g, k) = (
        params.delta_c,
        params.delta_a,
        params.lambda,
        params.g_drive,
        params.kappa,
    );
    Vector5::new(
        (dc - 2.0 * g) * ai - k * ar - l * y,
        -(dc + 2.0 * g) * ar - k * ai - l * x,
        -da * y - 2.0 * l * z * ai,
        da * x - 2.0 * l * z * ar,
        2.0 * l * (y * ar + x * ai),
    )
}

/// Analytic Jacobian of [`semiclassical_rhs`] with respect to
/// (α_Re, α_Im, X, Y, Z).
pub fn rhs_jacobian(state: &SemiclassicalState, params: &ModelParams) -> Matrix5<f64> {
    let SemiclassicalState {
        alpha_re: ar,
        alpha_im: ai,
        x,
        y,
        z,
    } = *state;
    let (dc, da, l, g, k) = (
        params.delta_c,
        params.delta_a,
        params.lambda,
        params.g_drive,
        params.kappa,
    );
    #[rustfmt::skip]
    let jac = Matrix5::new(
        -k,            dc - 2.0 * g,  0.0,           -l,            0.0,
        -(dc + 2.0 * g), -k,          -l,            0.0,           0.0,
        0.0,           -2.0 * l * z,  0.0,           -da,           -2.0 * l * ai,
        -2.0 * l * z,  0.0,           da,            0.0,           -2.0 * l * ar,
        2.0 * l * y,   2.0 * l * x,   2.0 * l * ai,  2.0 * l * ar,  0.0,
    );
    jac
}

/// The conserved spin length X² + Y² + Z² (1/4 on the physical shell).
pub fn spin_norm(state: &SemiclassicalState) -> f64 {
    state.x * state.x + state.y * state.y + state.z * state.z
}
