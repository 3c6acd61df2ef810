//! Steady-state Gaussian fluctuations around stable mean-field solutions.
//!
//! The linearized Langevin dynamics ḟ = A f + η has a stationary covariance
//! V solving A V + V Aᵀ = −D. Only the part of phase space reachable from the
//! noise is solved for: at the normal point δZ decouples entirely, and at
//! every fixed point the spin-norm direction carries no noise. Unreachable
//! directions get zero covariance.

use nalgebra::{DMatrix, Matrix5};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::meanfield::{fixed_points, label_from_points, BranchLabel};
use crate::model::{ModelParams, PhaseLabel, SemiclassicalState};
use crate::stability::{eigenvalues, jacobian, DriftMatrix};

const RANK_TOL: f64 = 1e-10;
const STRICT_STABILITY_TOL: f64 = 1e-12;

/// Input-noise diffusion matrix, symmetric positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionMatrix(Matrix5<f64>);

impl DiffusionMatrix {
    /// Vacuum input on the cavity quadratures: diag(κ, κ, 0, 0, 0).
    pub fn vacuum(kappa: f64) -> Self {
        Self(Matrix5::from_diagonal(&nalgebra::Vector5::new(
            kappa, kappa, 0.0, 0.0, 0.0,
        )))
    }

    pub fn new(matrix: Matrix5<f64>) -> Result<Self> {
        if (matrix - matrix.transpose()).amax() > 1e-14 * matrix.amax().max(1.0) {
            return Err(Error::Shape("diffusion matrix must be symmetric".into()));
        }
        Ok(Self(matrix))
    }

    pub fn zero() -> Self {
        Self(Matrix5::zeros())
    }

    pub fn matrix(&self) -> &Matrix5<f64> {
        &self.0
    }
}

/// Symmetrized steady-state covariance V_ij = ⟨f_i f_j + f_j f_i⟩/2 in the
/// basis (δQ, δP, δX, δY, δZ).
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix(Matrix5<f64>);

impl CovarianceMatrix {
    pub fn matrix(&self) -> &Matrix5<f64> {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    /// max |A V + V Aᵀ + D|.
    pub fn residual(&self, drift: &DriftMatrix, diffusion: &DiffusionMatrix) -> f64 {
        let a = drift.matrix();
        (a * self.0 + self.0 * a.transpose() + diffusion.matrix()).amax()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.0.symmetric_eigenvalues().min()
    }

    /// V₁₁V₂₂ − V₁₂², bounded below by 1/4 for a physical field state.
    pub fn field_uncertainty_product(&self) -> f64 {
        self.0[(0, 0)] * self.0[(1, 1)] - self.0[(0, 1)] * self.0[(0, 1)]
    }
}

/// Orthonormal basis of the smallest A-invariant subspace containing the
/// range of D (the Krylov space of the noise directions).
fn reachable_basis(a: &DMatrix<f64>, d: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let scale = d.amax();
    if scale == 0.0 {
        return DMatrix::zeros(n, 0);
    }
    let mut krylov = DMatrix::<f64>::zeros(n, n * n);
    let mut block = d.clone() / scale;
    for k in 0..n {
        krylov.view_mut((0, k * n), (n, n)).copy_from(&block);
        block = a * &block;
        let m = block.amax();
        if m > 0.0 {
            block /= m;
        }
    }
    let svd = krylov.svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.max();
    let mut cols: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > RANK_TOL * smax)
        .collect();
    cols.truncate(n);
    DMatrix::from_columns(&cols.iter().map(|&i| u.column(i)).collect::<Vec<_>>())
}

/// Solves A V + V Aᵀ = −D on the noise-reachable subspace of A.
pub fn lyapunov_solve(
    drift: &DriftMatrix,
    diffusion: &DiffusionMatrix,
) -> Result<CovarianceMatrix> {
    let a = DMatrix::from_column_slice(5, 5, drift.matrix().as_slice());
    let d = DMatrix::from_column_slice(5, 5, diffusion.matrix().as_slice());
    let basis = reachable_basis(&a, &d);
    let r = basis.ncols();
    if r == 0 {
        return Ok(CovarianceMatrix(Matrix5::zeros()));
    }
    let a_r = basis.transpose() * &a * &basis;
    let d_r = basis.transpose() * &d * &basis;

    let max_re = eigenvalues(&a_r)?
        .iter()
        .map(|e| e.re)
        .fold(f64::NEG_INFINITY, f64::max);
    if max_re >= -STRICT_STABILITY_TOL * a.amax() {
        return Err(Error::UnstableDrift {
            max_real_part: max_re,
        });
    }

    // (I ⊗ A + A ⊗ I) vec(V) = −vec(D), column-major vec.
    let eye = DMatrix::<f64>::identity(r, r);
    let op = eye.kronecker(&a_r) + a_r.kronecker(&eye);
    let rhs = -DMatrix::from_column_slice(r * r, 1, d_r.as_slice());
    let sol = op.lu().solve(&rhs).ok_or(Error::UnstableDrift {
        max_real_part: max_re,
    })?;
    let v_r = DMatrix::from_column_slice(r, r, sol.as_slice());
    let v_r = (&v_r + v_r.transpose()) * 0.5;
    let v = &basis * v_r * basis.transpose();
    let mut out = Matrix5::zeros();
    out.copy_from(&((&v + v.transpose()) * 0.5));
    Ok(CovarianceMatrix(out))
}

/// ⟨δα†δα⟩ = ((V₁₁ + V₂₂) − 1)/2.
pub fn photon_fluctuation(v: &CovarianceMatrix) -> f64 {
    (v.get(0, 0) + v.get(1, 1) - 1.0) / 2.0
}

/// Closed-form normal-phase quadrature variance, evaluated as written:
///
/// 2G²[(2Δ²−λ²) + Δ²(κ²−4G²+λ²)] / {(κ²−4G²+4Δ²)[(Δ²−λ²) + Δ²(κ²−4G²)]}
///
/// It does not agree with the Lyapunov solution in general; the latter is the
/// reference value.
pub fn np_variance_closed_form(params: &ModelParams) -> Result<f64> {
    let d = params.meanfield_delta()?;
    let (l, g, k) = (params.lambda, params.g_drive, params.kappa);
    let (d2, l2, g2, k2) = (d * d, l * l, g * g, k * k);
    let num = 2.0 * g2 * ((2.0 * d2 - l2) + d2 * (k2 - 4.0 * g2 + l2));
    let first = k2 - 4.0 * g2 + 4.0 * d2;
    let second = (d2 - l2) + d2 * (k2 - 4.0 * g2);
    let magnitude = (k2 + 4.0 * g2 + 4.0 * d2 + l2 + d2 * (k2 + 4.0 * g2)).max(f64::MIN_POSITIVE);
    if first.abs() <= 1e-14 * magnitude || second.abs() <= 1e-14 * magnitude {
        return Err(Error::BoundaryPole);
    }
    Ok(num / (first * second))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchFluctuation {
    pub branch: BranchLabel,
    pub state: SemiclassicalState,
    /// ⟨δa†δa⟩ per atom-normalized mode (⟨δα†δα⟩).
    pub photon_fluctuation: f64,
    pub lyapunov_residual: f64,
}

impl BranchFluctuation {
    /// ln(⟨δa†δa⟩ + 1).
    pub fn log_fluctuation(&self) -> f64 {
        self.photon_fluctuation.ln_1p()
    }
}

/// Phase label plus fluctuations on every stable fixed point.
#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationCell {
    pub phase: PhaseLabel,
    pub branches: Vec<BranchFluctuation>,
}

impl FluctuationCell {
    pub fn normal(&self) -> Option<&BranchFluctuation> {
        self.branches.iter().find(|b| b.branch.is_normal())
    }

    pub fn superradiant(&self) -> Option<&BranchFluctuation> {
        self.branches.iter().find(|b| !b.branch.is_normal())
    }
}

/// Fluctuations at one parameter point.
pub fn stable_fluctuations(params: &ModelParams) -> Result<FluctuationCell> {
    let points = fixed_points(params)?;
    let phase = label_from_points(&points)?;
    let diffusion = DiffusionMatrix::vacuum(params.kappa);
    let branches = points
        .iter()
        .filter(|p| p.stable)
        .map(|p| {
            let drift = jacobian(&p.state, params);
            let v = lyapunov_solve(&drift, &diffusion)?;
            Ok(BranchFluctuation {
                branch: p.branch,
                state: p.state,
                photon_fluctuation: photon_fluctuation(&v),
                lyapunov_residual: v.residual(&drift, &diffusion),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FluctuationCell { phase, branches })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationPoint {
    pub lambda: f64,
    pub g_drive: f64,
    pub cell: Result<FluctuationCell>,
}

/// Evaluates [`stable_fluctuations`] over the (λ, G) grid. Output is ordered
/// λ-major (index = i_λ · len(G) + i_G) regardless of thread count; per-point
/// failures are kept in place.
pub fn fluctuation_map(lambdas: &[f64], gs: &[f64], base: &ModelParams) -> Vec<FluctuationPoint> {
    let n_g = gs.len();
    (0..lambdas.len() * n_g)
        .into_par_iter()
        .map(|idx| {
            let (lambda, g_drive) = (lambdas[idx / n_g], gs[idx % n_g]);
            let params = base.with_lambda(lambda).with_g_drive(g_drive);
            FluctuationPoint {
                lambda,
                g_drive,
                cell: stable_fluctuations(&params),
            }
        })
        .collect()
}
