//! Hamiltonian and Lindblad generator in the collective basis.

use num_complex::Complex64;

use super::density::{max_modulus, DensityMatrix, Layout};
use super::hilbert::HilbertSpec;
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::sparse::CsrMatrix;

/// H = Δ_C a†a + Δ_A S_z + (λ/√N)(S₊a + S₋a†) + G(a² + a†²).
pub fn build_hamiltonian(params: &ModelParams, spec: &HilbertSpec) -> Result<CsrMatrix> {
    params.validate()?;
    check_atoms(params, spec)?;
    let c = |v: f64| Complex64::new(v, 0.0);
    let a = spec.annihilation();
    let ad = a.adjoint();
    let sp = spec.s_plus();
    let sm = spec.s_minus();
    let coupling = params.lambda / (spec.n_atoms() as f64).sqrt();
    let h = spec
        .number()
        .scale(c(params.delta_c))
        .add(&spec.s_z().scale(c(params.delta_a)))
        .add(&sp.matmul(&a).add(&sm.matmul(&ad)).scale(c(coupling)))
        .add(&a.matmul(&a).add(&ad.matmul(&ad)).scale(c(params.g_drive)));
    Ok(h)
}

fn check_atoms(params: &ModelParams, spec: &HilbertSpec) -> Result<()> {
    if params.n_atoms != spec.n_atoms() {
        return Err(Error::Shape(format!(
            "params have N = {} but the Hilbert space has N = {}",
            params.n_atoms,
            spec.n_atoms()
        )));
    }
    Ok(())
}

/// Column-stacked Lindblad superoperator: vec(ρ̇) = L vec(ρ), with
/// vec index i + d·j for ρ_ij.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    spec: HilbertSpec,
    params: ModelParams,
    matrix: CsrMatrix,
}

impl Liouvillian {
    pub fn spec(&self) -> &HilbertSpec {
        &self.spec
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    /// Hilbert-space dimension d (the superoperator is d² × d²).
    pub fn hilbert_dimension(&self) -> usize {
        self.spec.dimension()
    }

    pub fn layout(&self) -> Layout {
        Layout::Joint(self.spec)
    }

    /// L ρ.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.layout() != self.layout() {
            return Err(Error::Shape(
                "state does not match the Liouvillian space".into(),
            ));
        }
        DensityMatrix::from_vectorized(self.layout(), &self.matrix.mul_vec(rho.vectorized()))
    }

    /// max |(Lρ)_ij|.
    pub fn residual(&self, rho: &DensityMatrix) -> Result<f64> {
        Ok(max_modulus(self.apply(rho)?.matrix()))
    }
}

/// dρ/dt = −i[H, ρ] + κ(2aρa† − a†aρ − ρa†a) + (γ/N)(2S₋ρS₊ − S₊S₋ρ − ρS₊S₋).
pub fn build_liouvillian(params: &ModelParams, spec: &HilbertSpec) -> Result<Liouvillian> {
    let h = build_hamiltonian(params, spec)?;
    let jumps = [
        (params.kappa, spec.annihilation()),
        (params.gamma / spec.n_atoms() as f64, spec.s_minus()),
    ];
    let d = spec.dimension();
    let i = Complex64::new(0.0, 1.0);

    // K = H − i Σ r c†c, so −iKρ + iρK† covers the commutator and the
    // anticommutator parts.
    let mut k = h;
    for (rate, c) in &jumps {
        if *rate > 0.0 {
            k = k.add(&c.adjoint().matmul(c).scale(Complex64::new(0.0, -rate)));
        }
    }

    let vec_idx = |row: usize, col: usize| row + d * col;
    let mut triplets = Vec::with_capacity(2 * k.nnz() * d);
    for (r, c, v) in k.iter() {
        for j in 0..d {
            // −i K ρ
            triplets.push((vec_idx(r, j), vec_idx(c, j), -i * v));
            // +i ρ K†: (ρK†)_{j r} gets ρ_{j c} conj(K_{r c})
            triplets.push((vec_idx(j, r), vec_idx(j, c), i * v.conj()));
        }
    }
    for (rate, c) in &jumps {
        if *rate <= 0.0 {
            continue;
        }
        let two_r = Complex64::new(2.0 * rate, 0.0);
        for (r1, c1, v1) in c.iter() {
            for (r2, c2, v2) in c.iter() {
                triplets.push((vec_idx(r1, r2), vec_idx(c1, c2), two_r * v1 * v2.conj()));
            }
        }
    }
    Ok(Liouvillian {
        spec: *spec,
        params: *params,
        matrix: CsrMatrix::from_triplets(d * d, d * d, triplets),
    })
}
