//! Symmetric Dicke sector ⊗ truncated Fock space.
//!
//! Basis states are |j, m⟩ ⊗ |n⟩ with j = N/2, m = −j..=j and n = 0..=N_ph,
//! stored at index (m + j)(N_ph + 1) + n.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Largest atom number accepted by the exact solver.
pub const MAX_ATOMS: usize = 12;
pub const DEFAULT_FOCK_CUTOFF: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HilbertSpec {
    n_atoms: usize,
    fock_cutoff: usize,
}

impl HilbertSpec {
    pub fn new(n_atoms: usize, fock_cutoff: usize) -> Result<Self> {
        if n_atoms == 0 {
            return Err(Error::InvalidParams {
                field: "n_atoms",
                reason: "at least one atom is required".into(),
            });
        }
        if fock_cutoff == 0 {
            return Err(Error::InvalidParams {
                field: "fock_cutoff",
                reason: "cutoff must be at least 1".into(),
            });
        }
        if n_atoms > MAX_ATOMS {
            return Err(Error::DimensionTooLarge {
                dimension: (n_atoms + 1) * (fock_cutoff + 1),
                limit: (MAX_ATOMS + 1) * (fock_cutoff + 1),
            });
        }
        Ok(Self {
            n_atoms,
            fock_cutoff,
        })
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn fock_cutoff(&self) -> usize {
        self.fock_cutoff
    }

    pub fn with_fock_cutoff(&self, fock_cutoff: usize) -> Result<Self> {
        Self::new(self.n_atoms, fock_cutoff)
    }

    /// Total spin j = N/2.
    pub fn spin_j(&self) -> f64 {
        self.n_atoms as f64 / 2.0
    }

    pub fn spin_dim(&self) -> usize {
        self.n_atoms + 1
    }

    pub fn fock_dim(&self) -> usize {
        self.fock_cutoff + 1
    }

    pub fn dimension(&self) -> usize {
        self.spin_dim() * self.fock_dim()
    }

    /// Index of |m = s − j⟩ ⊗ |n⟩.
    pub fn index(&self, spin_index: usize, photons: usize) -> usize {
        spin_index * self.fock_dim() + photons
    }

    /// (spin index, photon number) of a basis index.
    pub fn split(&self, index: usize) -> (usize, usize) {
        (index / self.fock_dim(), index % self.fock_dim())
    }

    /// Parity of n + m + j, conserved by H and both jump operators up to a
    /// common flip.
    pub fn parity(&self, index: usize) -> usize {
        let (s, n) = self.split(index);
        (s + n) % 2
    }

    /// m for a spin index.
    pub fn magnetization(&self, spin_index: usize) -> f64 {
        spin_index as f64 - self.spin_j()
    }

    fn spin_part(&self, op: CsrMatrix) -> CsrMatrix {
        op.kron(&CsrMatrix::identity(self.fock_dim()))
    }

    fn fock_part(&self, op: CsrMatrix) -> CsrMatrix {
        CsrMatrix::identity(self.spin_dim()).kron(&op)
    }

    /// a on the full space.
    pub fn annihilation(&self) -> CsrMatrix {
        self.fock_part(fock_annihilation(self.fock_cutoff))
    }

    pub fn number(&self) -> CsrMatrix {
        self.fock_part(CsrMatrix::diagonal(
            &(0..self.fock_dim())
                .map(|n| Complex64::new(n as f64, 0.0))
                .collect::<Vec<_>>(),
        ))
    }

    /// S₊ = Σ √(j(j+1) − m(m+1)) |m+1⟩⟨m|.
    pub fn s_plus(&self) -> CsrMatrix {
        let j = self.spin_j();
        let triplets = (0..self.n_atoms)
            .map(|s| {
                let m = self.magnetization(s);
                (
                    s + 1,
                    s,
                    Complex64::new((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0),
                )
            })
            .collect();
        self.spin_part(CsrMatrix::from_triplets(
            self.spin_dim(),
            self.spin_dim(),
            triplets,
        ))
    }

    pub fn s_minus(&self) -> CsrMatrix {
        self.s_plus().adjoint()
    }

    pub fn s_z(&self) -> CsrMatrix {
        self.spin_part(CsrMatrix::diagonal(
            &(0..self.spin_dim())
                .map(|s| Complex64::new(self.magnetization(s), 0.0))
                .collect::<Vec<_>>(),
        ))
    }

    pub fn s_x(&self) -> CsrMatrix {
        self.s_plus()
            .add(&self.s_minus())
            .scale(Complex64::new(0.5, 0.0))
    }

    pub fn s_y(&self) -> CsrMatrix {
        self.s_plus()
            .add(&self.s_minus().scale(Complex64::new(-1.0, 0.0)))
            .scale(Complex64::new(0.0, -0.5))
    }
}

/// a on a Fock space truncated at `cutoff` photons.
pub fn fock_annihilation(cutoff: usize) -> CsrMatrix {
    let dim = cutoff + 1;
    CsrMatrix::from_triplets(
        dim,
        dim,
        (1..dim)
            .map(|n| (n - 1, n, Complex64::new((n as f64).sqrt(), 0.0)))
            .collect(),
    )
}
