//! Linear stability of mean-field fixed points.
//!
//! The drift matrix acts on the fluctuation vector (δQ, δP, δX, δY, δZ) with
//! δQ = √2 δα_Re and δP = √2 δα_Im. Because X² + Y² + Z² is conserved, its
//! gradient (0, 0, X, Y, Z) is a left null vector of the drift matrix at every
//! fixed point. That zero mode only moves the solution off the spin shell, so
//! the verdict is taken on the invariant hyperplane orthogonal to the gradient.

use nalgebra::{DMatrix, Matrix5, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{ModelParams, SemiclassicalState};

const EPS_STAB_REL: f64 = 1e-9;
const SCHUR_EPS: f64 = 1e-14;
const SCHUR_MAX_ITER: usize = 10_000;

/// Drift matrix of the linearized fluctuation dynamics, together with the
/// spin point it was built at.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftMatrix {
    matrix: Matrix5<f64>,
    spin: Vector3<f64>,
}

impl DriftMatrix {
    pub fn matrix(&self) -> &Matrix5<f64> {
        &self.matrix
    }

    /// (X, Y, Z) at the linearization point.
    pub fn spin(&self) -> &Vector3<f64> {
        &self.spin
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.amax()
    }

    /// All five eigenvalues, sorted by descending real part.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        eigenvalues(&DMatrix::from_column_slice(5, 5, self.matrix.as_slice()))
    }

    /// Orthonormal basis (5 × 4) of the hyperplane orthogonal to the
    /// spin-norm gradient. Falls back to the identity when the spin vanishes.
    pub fn shell_tangent_basis(&self) -> DMatrix<f64> {
        let norm = self.spin.norm();
        if norm == 0.0 {
            return DMatrix::identity(5, 5);
        }
        let mut seed = DMatrix::<f64>::zeros(5, 6);
        for (i, v) in self.spin.iter().enumerate() {
            seed[(i + 2, 0)] = v / norm;
        }
        for i in 0..5 {
            seed[(i, i + 1)] = 1.0;
        }
        let q = seed.qr().q();
        q.columns(1, 4).into_owned()
    }

    /// The drift restricted to the shell tangent hyperplane.
    pub fn deflated(&self) -> DMatrix<f64> {
        let basis = self.shell_tangent_basis();
        let full = DMatrix::from_column_slice(5, 5, self.matrix.as_slice());
        basis.transpose() * full * &basis
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityVerdict {
    pub max_real_part: f64,
    pub stable: bool,
    pub marginal: bool,
}

/// Drift matrix at `state`.
pub fn jacobian(state: &SemiclassicalState, params: &ModelParams) -> DriftMatrix {
    let s2 = std::f64::consts::SQRT_2;
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
    let matrix = Matrix5::new(
        -k,              dc - 2.0 * g,    0.0,           -s2 * l,       0.0,
        -dc - 2.0 * g,   -k,              -s2 * l,       0.0,           0.0,
        0.0,             -s2 * l * z,     0.0,           -da,           -2.0 * l * ai,
        -s2 * l * z,     0.0,             da,            0.0,           -2.0 * l * ar,
        s2 * l * y,      s2 * l * x,      2.0 * l * ai,  2.0 * l * ar,  0.0,
    );
    DriftMatrix {
        matrix,
        spin: Vector3::new(x, y, z),
    }
}

/// Classifies the fixed point the drift matrix was built at.
///
/// The threshold is ε = 10⁻⁹ · max|A_ij|; points within ε of the imaginary
/// axis are reported as marginal and never as stable.
pub fn assess_stability(matrix: &DriftMatrix) -> Result<StabilityVerdict> {
    if matrix.matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigenFailure);
    }
    let eps = EPS_STAB_REL * matrix.max_abs();
    let spectrum = eigenvalues(&matrix.deflated())?;
    let max_real_part = spectrum
        .iter()
        .map(|e| e.re)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(StabilityVerdict {
        max_real_part,
        stable: max_real_part < -eps,
        marginal: max_real_part.abs() <= eps,
    })
}

/// Eigenvalues of a general real square matrix, sorted by descending real
/// part (ties by imaginary part).
pub fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    if m.is_empty() {
        return Ok(Vec::new());
    }
    let schur = nalgebra::Schur::try_new(m.clone(), SCHUR_EPS, SCHUR_MAX_ITER)
        .ok_or(Error::EigenFailure)?;
    let mut ev: Vec<Complex64> = schur
        .complex_eigenvalues()
        .iter()
        .map(|c| Complex64::new(c.re, c.im))
        .collect();
    ev.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    Ok(ev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{rhs_jacobian, semiclassical_rhs};
    use std::f64::consts::SQRT_2;

    fn paper(lambda: f64, g: f64) -> ModelParams {
        ModelParams::resonant(5.0, lambda, g, 0.5)
    }

    fn sp_point() -> SemiclassicalState {
        crate::meanfield::fixed_points(&paper(4.5, 0.6))
            .unwrap()
            .into_iter()
            .find(|f| f.branch == crate::meanfield::BranchLabel::SpPlusPos)
            .unwrap()
            .state
    }

    #[test]
    fn normal_point_entries() {
        let lambda = 4.5;
        let a = jacobian(&SemiclassicalState::ground(), &paper(lambda, 0.3));
        let m = a.matrix();
        assert_eq!(m[(2, 1)], SQRT_2 * lambda / 2.0);
        assert_eq!(m[(3, 0)], SQRT_2 * lambda / 2.0);
        assert_eq!(m[(2, 4)], 0.0);
        assert_eq!(m[(3, 4)], 0.0);
        for j in 0..5 {
            assert_eq!(m[(4, j)], 0.0);
        }
    }

    #[test]
    fn first_two_rows_do_not_depend_on_state() {
        let p = paper(3.0, 0.4);
        let a = jacobian(&SemiclassicalState::ground(), &p);
        let b = jacobian(&sp_point(), &p);
        for i in 0..2 {
            for j in 0..5 {
                assert_eq!(a.matrix()[(i, j)], b.matrix()[(i, j)]);
            }
        }
        assert_eq!(a.matrix()[(0, 1)], 5.0 - 0.8);
        assert_eq!(a.matrix()[(1, 0)], -5.0 - 0.8);
    }

    #[test]
    fn matches_finite_difference_in_quadratures() {
        let p = paper(4.5, 0.6);
        let s = sp_point();
        let a = jacobian(&s, &p);
        let scale = [SQRT_2, SQRT_2, 1.0, 1.0, 1.0];
        let h = 1e-5;
        for j in 0..5 {
            let mut plus = s.to_vector();
            let mut minus = s.to_vector();
            plus[j] += h;
            minus[j] -= h;
            let col = (semiclassical_rhs(&SemiclassicalState::from_vector(&plus), &p)
                - semiclassical_rhs(&SemiclassicalState::from_vector(&minus), &p))
                / (2.0 * h);
            for i in 0..5 {
                let fd = scale[i] * col[i] / scale[j];
                assert!((fd - a.matrix()[(i, j)]).abs() < 1e-6, "({i},{j})");
            }
        }
        // and the analytic state-space Jacobian is the same map
        let jac = rhs_jacobian(&s, &p);
        for i in 0..5 {
            for j in 0..5 {
                let v = scale[i] * jac[(i, j)] / scale[j];
                assert!((v - a.matrix()[(i, j)]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn zero_coupling_is_block_diagonal() {
        let a = jacobian(&sp_point(), &paper(0.0, 0.3));
        let m = a.matrix();
        for i in 0..2 {
            for j in 2..5 {
                assert_eq!(m[(i, j)], 0.0);
                assert_eq!(m[(j, i)], 0.0);
            }
        }
        assert_eq!(m[(0, 0)], -0.5);
        assert_eq!(m[(0, 1)], 5.0 - 0.6);
        assert_eq!(m[(1, 0)], -5.0 - 0.6);
        assert_eq!(m[(1, 1)], -0.5);
    }

    #[test]
    fn paper_stability_examples() {
        let np = SemiclassicalState::ground();
        assert!(
            assess_stability(&jacobian(&np, &paper(4.5, 0.2)))
                .unwrap()
                .stable
        );
        let v = assess_stability(&jacobian(&np, &paper(4.5, 0.7))).unwrap();
        assert!(!v.stable && !v.marginal);
    }

    #[test]
    fn full_spectrum_contains_conserved_zero_mode() {
        let a = jacobian(&sp_point(), &paper(4.5, 0.6));
        let ev = a.eigenvalues().unwrap();
        assert_eq!(ev.len(), 5);
        let min_abs = ev.iter().map(|e| e.norm()).fold(f64::INFINITY, f64::min);
        assert!(min_abs < 1e-10, "{ev:?}");
        let trace: f64 = ev.iter().map(|e| e.re).sum();
        assert!((trace + 1.0).abs() < 1e-10);
    }

    #[test]
    fn deflation_keeps_trace() {
        let a = jacobian(&sp_point(), &paper(4.5, 0.6));
        assert!((a.deflated().trace() + 1.0).abs() < 1e-12);
        let b = jacobian(&SemiclassicalState::ground(), &paper(4.5, 0.6));
        let d = b.deflated();
        assert_eq!(d.nrows(), 4);
        assert!((d.trace() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_finite_input_fails() {
        let mut s = sp_point();
        s.x = f64::NAN;
        assert_eq!(
            assess_stability(&jacobian(&s, &paper(4.5, 0.6))),
            Err(Error::EigenFailure)
        );
    }
}
