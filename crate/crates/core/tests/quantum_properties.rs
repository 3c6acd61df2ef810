use srlab_core::quantum::{
    build_liouvillian, mean_photon, steady_state, wigner, GridSpec, HilbertSpec,
};
use srlab_core::ModelParams;

fn params(lambda: f64, g: f64, n_atoms: usize) -> ModelParams {
    ModelParams::resonant(5.0, lambda, g, 0.5)
        .with_gamma(0.001)
        .with_n_atoms(n_atoms)
}

#[test]
fn undriven_steady_state_is_dark() {
    for (lambda, n) in [(4.5, 1), (7.0, 2), (9.0, 3)] {
        let p = params(lambda, 0.0, n);
        let l = build_liouvillian(&p, &HilbertSpec::new(n, 12).unwrap()).unwrap();
        let rho = steady_state(&l).unwrap();
        assert!(
            mean_photon(&rho) < 1e-8,
            "lambda {lambda}: {}",
            mean_photon(&rho)
        );
    }
}

#[test]
fn steady_state_wigner_is_inversion_symmetric() {
    for (lambda, g) in [(4.5, 0.9), (7.0, 0.6)] {
        let p = params(lambda, g, 2);
        let l = build_liouvillian(&p, &HilbertSpec::new(2, 30).unwrap()).unwrap();
        let rho = steady_state(&l).unwrap();
        let w = wigner(&rho, &GridSpec::square(5.0, 61)).unwrap();
        assert!(
            w.inversion_asymmetry() < 1e-6,
            "asymmetry {}",
            w.inversion_asymmetry()
        );
        assert!((w.integral() - 1.0).abs() < 1e-2);
    }
}

#[test]
fn steady_state_meets_density_bounds() {
    let p = params(7.0, 0.6, 2);
    let l = build_liouvillian(&p, &HilbertSpec::new(2, 30).unwrap()).unwrap();
    let rho = steady_state(&l).unwrap();
    let report = rho.report();
    assert!(report.is_physical(), "{report:?}");
    assert!(l.residual(&rho).unwrap() < 1e-9 * l.matrix().max_abs());
}
