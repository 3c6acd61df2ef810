//! Steady states and time evolution of the master equation.

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use num_complex::Complex64;

use super::density::DensityMatrix;
use super::liouvillian::Liouvillian;
use crate::error::{Error, Result};

/// Steady-state acceptance: max|Lρ| < 10⁻⁹ · max|L|.
pub const STEADY_RESIDUAL_REL: f64 = 1e-9;

const RTOL: f64 = 1e-9;
const ATOL: f64 = 1e-11;

/// Unique steady state of `l`.
///
/// Solves L vec(ρ) = 0 with the equation for ρ₀₀ replaced by Tr ρ = 1 (that
/// row is linearly dependent because L preserves the trace). Falls back to
/// time evolution from the ground state when the factorization fails.
pub fn steady_state(l: &Liouvillian) -> Result<DensityMatrix> {
    let tol = STEADY_RESIDUAL_REL * l.matrix().max_abs();
    let rho = match bordered_solve(l) {
        Some(rho) => rho,
        None => relax(l, &DensityMatrix::ground(*l.spec()), tol)?,
    };
    let residual = l.residual(&rho)?;
    if !(residual < tol) {
        return Err(Error::NonConvergence { residual });
    }
    Ok(rho)
}

fn bordered_solve(l: &Liouvillian) -> Option<DensityMatrix> {
    let spec = l.spec();
    let d = l.hilbert_dimension();
    // L maps the block {ρ_ij : parity(i) = parity(j)} into itself and the
    // trace lives there, so the steady state can be solved on that block.
    let mut reduced = vec![usize::MAX; d * d];
    let mut full = Vec::with_capacity(d * d / 2 + d);
    for j in 0..d {
        for i in 0..d {
            if spec.parity(i) == spec.parity(j) {
                reduced[i + d * j] = full.len();
                full.push(i + d * j);
            }
        }
    }
    let n = full.len();
    let mut triplets: Vec<Triplet<usize, usize, Complex64>> =
        Vec::with_capacity(l.matrix().nnz() / 2);
    for (r, c, v) in l.matrix().iter() {
        let (rr, cc) = (reduced[r], reduced[c]);
        if rr == 0 || rr == usize::MAX || cc == usize::MAX {
            continue;
        }
        triplets.push(Triplet::new(rr, cc, v));
    }
    triplets.extend((0..d).map(|i| Triplet::new(0, reduced[i + d * i], Complex64::new(1.0, 0.0))));
    let mat = SparseColMat::<usize, Complex64>::try_new_from_triplets(n, n, &triplets).ok()?;
    let lu = mat.sp_lu().ok()?;
    let mut rhs = Mat::<Complex64>::zeros(n, 1);
    rhs[(0, 0)] = Complex64::new(1.0, 0.0);
    lu.solve_in_place(rhs.as_mut());
    let mut sol = vec![Complex64::new(0.0, 0.0); d * d];
    for (k, &idx) in full.iter().enumerate() {
        let v = rhs[(k, 0)];
        if !v.re.is_finite() || !v.im.is_finite() {
            return None;
        }
        sol[idx] = v;
    }
    let rho = DensityMatrix::from_vectorized(l.layout(), &sol).ok()?;
    Some(rho.hermitized())
}

/// Integrates from `start` until max|Lρ| < `tol`, or gives up after a fixed
/// horizon.
fn relax(l: &Liouvillian, start: &DensityMatrix, tol: f64) -> Result<DensityMatrix> {
    let rate = l.params().kappa.max(l.params().gamma).max(1e-3);
    let chunk = 10.0 / rate;
    let mut rho = start.clone();
    let mut residual = f64::INFINITY;
    for _ in 0..200 {
        rho = evolve_to(l, &rho, chunk, chunk / 10.0)?.hermitized();
        residual = l.residual(&rho)?;
        if residual < tol {
            return Ok(rho);
        }
    }
    Err(Error::NonConvergence { residual })
}

/// Sampled solution of the master equation.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
}

impl Trajectory {
    pub fn last(&self) -> &DensityMatrix {
        self.states
            .last()
            .expect("trajectory has at least the initial state")
    }
}

/// Adaptive Dormand-Prince 5(4) integration, sampled at 0, dt, 2dt, …,
/// t_final.
pub fn time_evolve(
    l: &Liouvillian,
    rho0: &DensityMatrix,
    t_final: f64,
    dt: f64,
) -> Result<Trajectory> {
    if rho0.layout() != l.layout() {
        return Err(Error::Shape(
            "initial state does not match the Liouvillian".into(),
        ));
    }
    if !(dt > 0.0) || !(t_final >= 0.0) {
        return Err(Error::InvalidParams {
            field: "dt",
            reason: format!("need dt > 0 and t_final >= 0 (dt = {dt}, t_final = {t_final})"),
        });
    }
    let samples = (t_final / dt).round() as usize;
    let mut integrator = Integrator::new(l, rho0.vectorized().to_vec(), dt);
    let mut times = vec![0.0];
    let mut states = vec![rho0.clone()];
    for k in 1..=samples {
        let target = (k as f64 * dt).min(t_final);
        integrator.advance_to(target)?;
        times.push(target);
        states.push(DensityMatrix::from_vectorized(l.layout(), &integrator.y)?);
    }
    Ok(Trajectory { times, states })
}

/// Final state of [`time_evolve`] without storing samples.
pub fn evolve_to(
    l: &Liouvillian,
    rho0: &DensityMatrix,
    t_final: f64,
    h0: f64,
) -> Result<DensityMatrix> {
    let mut integrator = Integrator::new(l, rho0.vectorized().to_vec(), h0);
    integrator.advance_to(t_final)?;
    DensityMatrix::from_vectorized(l.layout(), &integrator.y)
}

// Dormand-Prince tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// 5th-order minus embedded 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Integrator<'a> {
    l: &'a Liouvillian,
    t: f64,
    h: f64,
    y: Vec<Complex64>,
    k: [Vec<Complex64>; 7],
    scratch: Vec<Complex64>,
    have_first_stage: bool,
}

impl<'a> Integrator<'a> {
    fn new(l: &'a Liouvillian, y: Vec<Complex64>, h: f64) -> Self {
        let n = y.len();
        let zero = || vec![Complex64::new(0.0, 0.0); n];
        Self {
            l,
            t: 0.0,
            h,
            y,
            k: std::array::from_fn(|_| zero()),
            scratch: zero(),
            have_first_stage: false,
        }
    }

    fn advance_to(&mut self, target: f64) -> Result<()> {
        if !self.have_first_stage {
            self.l.matrix().mul_vec_into(&self.y, &mut self.k[0]);
            self.have_first_stage = true;
        }
        while self.t < target {
            let remaining = target - self.t;
            let last = self.h >= remaining;
            let h = if last { remaining } else { self.h };
            let min_step = 1e-13 * target.abs().max(1.0);
            if h < min_step && !last {
                return Err(Error::StepRejected { t: self.t, dt: h });
            }
            #[allow(clippy::needless_range_loop)]
            for s in 1..7 {
                for (i, out) in self.scratch.iter_mut().enumerate() {
                    let mut acc = self.y[i];
                    for (j, a) in A[s].iter().enumerate().take(s) {
                        if *a != 0.0 {
                            acc += self.k[j][i] * (h * a);
                        }
                    }
                    *out = acc;
                }
                let (head, tail) = self.k.split_at_mut(s);
                let _ = head;
                self.l.matrix().mul_vec_into(&self.scratch, &mut tail[0]);
            }
            // scratch holds the 5th-order solution (stage 7 input = y_new)
            let mut err: f64 = 0.0;
            for i in 0..self.y.len() {
                let mut e = Complex64::new(0.0, 0.0);
                for (j, w) in E.iter().enumerate() {
                    if *w != 0.0 {
                        e += self.k[j][i] * (h * w);
                    }
                }
                let scale = ATOL + RTOL * self.y[i].norm().max(self.scratch[i].norm());
                err = err.max(e.norm() / scale);
            }
            if !err.is_finite() {
                return Err(Error::StepRejected { t: self.t, dt: h });
            }
            if err <= 1.0 {
                self.t = if last { target } else { self.t + h };
                std::mem::swap(&mut self.y, &mut self.scratch);
                self.k.swap(0, 6);
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if !(last && err <= 1.0) {
                self.h = h * factor;
            }
        }
        let _ = C;
        Ok(())
    }
}
