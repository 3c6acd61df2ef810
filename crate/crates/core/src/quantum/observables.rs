//! Expectation values and partial traces.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::density::{DensityMatrix, Layout};
use crate::error::{Error, Result};

/// ⟨a†a⟩.
pub fn mean_photon(rho: &DensityMatrix) -> f64 {
    let layout = rho.layout();
    (0..rho.dimension())
        .map(|i| layout.photons(i) as f64 * rho.matrix()[(i, i)].re)
        .sum()
}

/// ⟨a†a⟩ / N, comparable with the mean-field |α|².
pub fn scaled_photon_number(rho: &DensityMatrix) -> Result<f64> {
    match rho.layout() {
        Layout::Joint(spec) => Ok(mean_photon(rho) / spec.n_atoms() as f64),
        Layout::Cavity { .. } => Err(Error::Shape("cavity-only state has no atom number".into())),
    }
}

/// (⟨S_x⟩, ⟨S_y⟩, ⟨S_z⟩).
pub fn collective_spin(rho: &DensityMatrix) -> Result<[f64; 3]> {
    let Layout::Joint(spec) = rho.layout() else {
        return Err(Error::Shape("collective spin needs the joint space".into()));
    };
    let expect = |op: crate::sparse::CsrMatrix| -> f64 {
        // Tr(Oρ) = Σ O_rc ρ_cr
        op.iter()
            .map(|(r, c, v)| v * rho.matrix()[(c, r)])
            .sum::<Complex64>()
            .re
    };
    Ok([expect(spec.s_x()), expect(spec.s_y()), expect(spec.s_z())])
}

/// Partial trace over the spin; a cavity-only state is returned unchanged.
pub fn reduced_cavity(rho: &DensityMatrix) -> DensityMatrix {
    let spec = match rho.layout() {
        Layout::Joint(spec) => spec,
        Layout::Cavity { .. } => return rho.clone(),
    };
    let f = spec.fock_dim();
    let m = rho.matrix();
    let reduced = DMatrix::from_fn(f, f, |n, k| {
        (0..spec.spin_dim())
            .map(|s| m[(spec.index(s, n), spec.index(s, k))])
            .sum::<Complex64>()
    });
    DensityMatrix::from_matrix(
        Layout::Cavity {
            cutoff: spec.fock_cutoff(),
        },
        reduced,
    )
    .expect("dimension matches by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::density::max_modulus;
    use crate::quantum::hilbert::HilbertSpec;
    use nalgebra::DVector;

    #[test]
    fn fock_expectations() {
        assert_eq!(mean_photon(&DensityMatrix::fock(5, 0)), 0.0);
        assert_eq!(mean_photon(&DensityMatrix::fock(5, 3)), 3.0);
        let spec = HilbertSpec::new(2, 4).unwrap();
        let rho = DensityMatrix::basis_state(spec, 2, 1);
        assert_eq!(mean_photon(&rho), 1.0);
        assert_eq!(scaled_photon_number(&rho).unwrap(), 0.5);
        let s = collective_spin(&rho).unwrap();
        assert!(s[0].abs() < 1e-15 && s[1].abs() < 1e-15);
        assert!((s[2] - 1.0).abs() < 1e-15);
        assert!(collective_spin(&DensityMatrix::fock(2, 0)).is_err());
    }

    #[test]
    fn product_state_reduces_to_its_cavity_factor() {
        let spec = HilbertSpec::new(1, 3).unwrap();
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let spin = DVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        let field = DVector::from_vec(vec![c(0.5, 0.0), c(0.5, 0.5), c(0.0, -0.5), c(0.0, 0.0)]);
        let rho = DensityMatrix::from_pure(Layout::Joint(spec), &spin.kronecker(&field)).unwrap();
        let cav = reduced_cavity(&rho);
        let expected = &field * field.adjoint();
        assert!(max_modulus(&(cav.matrix() - expected)) < 1e-14);
        assert!((cav.trace().re - 1.0).abs() < 1e-14);
        assert_eq!(cav.dimension(), 4);
    }

    #[test]
    fn correlated_state_marginal() {
        // ½(|g,0⟩⟨g,0| + |e,2⟩⟨e,2|) plus coherences that the trace must drop
        let spec = HilbertSpec::new(1, 2).unwrap();
        let d = spec.dimension();
        let (a, b) = (spec.index(0, 0), spec.index(1, 2));
        let mut m = DMatrix::zeros(d, d);
        m[(a, a)] = Complex64::new(0.5, 0.0);
        m[(b, b)] = Complex64::new(0.5, 0.0);
        m[(a, b)] = Complex64::new(0.5, 0.0);
        m[(b, a)] = Complex64::new(0.5, 0.0);
        let cav = reduced_cavity(&DensityMatrix::from_matrix(Layout::Joint(spec), m).unwrap());
        assert_eq!(cav.photon_distribution(), vec![0.5, 0.0, 0.5]);
        assert_eq!(cav.matrix()[(0, 2)], Complex64::new(0.0, 0.0));
    }
}
