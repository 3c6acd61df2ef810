use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::hilbert::HilbertSpec;
use crate::error::{Error, Result};

/// What the rows and columns of a density matrix index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// Dicke sector ⊗ Fock space.
    Joint(HilbertSpec),
    /// Fock space alone, truncated at `cutoff` photons.
    Cavity { cutoff: usize },
}

impl Layout {
    pub fn dimension(&self) -> usize {
        match self {
            Layout::Joint(spec) => spec.dimension(),
            Layout::Cavity { cutoff } => cutoff + 1,
        }
    }

    pub fn fock_cutoff(&self) -> usize {
        match self {
            Layout::Joint(spec) => spec.fock_cutoff(),
            Layout::Cavity { cutoff } => *cutoff,
        }
    }

    /// Photon number of basis index `i`.
    pub fn photons(&self, i: usize) -> usize {
        match self {
            Layout::Joint(spec) => spec.split(i).1,
            Layout::Cavity { .. } => i,
        }
    }
}

/// Largest entry modulus.
pub fn max_modulus(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    layout: Layout,
    matrix: DMatrix<Complex64>,
}

/// Numerical health of a density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityReport {
    pub trace_error: f64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

impl DensityReport {
    /// Trace within 10⁻¹⁰, Hermitian to 10⁻¹², eigenvalues ≥ −10⁻⁹.
    pub fn is_physical(&self) -> bool {
        self.trace_error <= 1e-10 && self.hermiticity_error <= 1e-12 && self.min_eigenvalue >= -1e-9
    }
}

impl DensityMatrix {
    /// Wraps a matrix as-is; no normalization is applied.
    pub fn from_matrix(layout: Layout, matrix: DMatrix<Complex64>) -> Result<Self> {
        let d = layout.dimension();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::Shape(format!(
                "density matrix is {}x{}, layout needs {d}x{d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { layout, matrix })
    }

    /// |ψ⟩⟨ψ| for a (not necessarily normalized) vector.
    pub fn from_pure(layout: Layout, psi: &DVector<Complex64>) -> Result<Self> {
        let norm = psi.norm();
        let psi = psi / Complex64::new(norm, 0.0);
        Self::from_matrix(layout, &psi * psi.adjoint())
    }

    /// Fock state |n⟩ of a lone cavity.
    pub fn fock(cutoff: usize, n: usize) -> Self {
        let mut m = DMatrix::zeros(cutoff + 1, cutoff + 1);
        m[(n, n)] = Complex64::new(1.0, 0.0);
        Self {
            layout: Layout::Cavity { cutoff },
            matrix: m,
        }
    }

    /// |m, n⟩⟨m, n| in the joint space.
    pub fn basis_state(spec: HilbertSpec, spin_index: usize, photons: usize) -> Self {
        let d = spec.dimension();
        let mut m = DMatrix::zeros(d, d);
        let i = spec.index(spin_index, photons);
        m[(i, i)] = Complex64::new(1.0, 0.0);
        Self {
            layout: Layout::Joint(spec),
            matrix: m,
        }
    }

    /// Vacuum with every atom in the ground state.
    pub fn ground(spec: HilbertSpec) -> Self {
        Self::basis_state(spec, 0, 0)
    }

    /// Column-stacked vectorization, the same layout the Liouvillian acts on.
    pub fn from_vectorized(layout: Layout, vec: &[Complex64]) -> Result<Self> {
        let d = layout.dimension();
        if vec.len() != d * d {
            return Err(Error::Shape(format!(
                "vector of length {} for dimension {d}",
                vec.len()
            )));
        }
        Ok(Self {
            layout,
            matrix: DMatrix::from_column_slice(d, d, vec),
        })
    }

    pub fn vectorized(&self) -> &[Complex64] {
        self.matrix.as_slice()
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        max_modulus(&(&self.matrix - self.matrix.adjoint()))
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn report(&self) -> DensityReport {
        DensityReport {
            trace_error: (self.trace() - Complex64::new(1.0, 0.0)).norm(),
            hermiticity_error: self.hermiticity_error(),
            min_eigenvalue: self.eigenvalues().first().copied().unwrap_or(0.0),
        }
    }

    /// (ρ + ρ†)/2 rescaled to unit trace.
    pub fn hermitized(&self) -> Self {
        let h = (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        let tr = h.trace().re;
        Self {
            layout: self.layout,
            matrix: h / Complex64::new(tr, 0.0),
        }
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// ½‖ρ − σ‖₁.
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        if self.layout != other.layout {
            return Err(Error::Shape(
                "trace distance between different layouts".into(),
            ));
        }
        let diff = &self.matrix - &other.matrix;
        let h = (&diff + diff.adjoint()) * Complex64::new(0.5, 0.0);
        Ok(0.5
            * h.symmetric_eigenvalues()
                .iter()
                .map(|v| v.abs())
                .sum::<f64>())
    }

    /// Population of Fock levels n ≥ `from`.
    pub fn photon_tail(&self, from: usize) -> f64 {
        (0..self.dimension())
            .filter(|&i| self.layout.photons(i) >= from)
            .map(|i| self.matrix[(i, i)].re)
            .sum()
    }

    /// Photon-number distribution P(n), n = 0..=cutoff.
    pub fn photon_distribution(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.layout.fock_cutoff() + 1];
        for i in 0..self.dimension() {
            p[self.layout.photons(i)] += self.matrix[(i, i)].re;
        }
        p
    }
}
