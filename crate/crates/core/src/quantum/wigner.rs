//! Wigner quasiprobability of a cavity state, W(α) = (2/π) Tr[ρ D(α) Π D†(α)]
//! with α = x + ip.
//!
//! Matrix elements of the displaced parity are generated with a stable
//! Laguerre-type recursion, so every grid point costs O(N_ph²).

use num_complex::Complex64;
use rayon::prelude::*;

use super::density::DensityMatrix;
use super::observables::reduced_cavity;
use crate::error::{Error, Result};

/// Tail population above which the Fock truncation is considered too tight.
pub const TAIL_LIMIT: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub nx: usize,
    pub np: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self::square(5.0, 101)
    }
}

impl GridSpec {
    /// [−extent, extent]² with `points` samples per axis.
    pub fn square(extent: f64, points: usize) -> Self {
        Self {
            x_min: -extent,
            x_max: extent,
            p_min: -extent,
            p_max: extent,
            nx: points,
            np: points,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.np < 2 {
            return Err(Error::InvalidParams {
                field: "points",
                reason: "need at least 2 points per axis".into(),
            });
        }
        if !(self.x_max > self.x_min) || !(self.p_max > self.p_min) {
            return Err(Error::InvalidParams {
                field: "extent",
                reason: "grid range must be increasing".into(),
            });
        }
        Ok(())
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + (self.x_max - self.x_min) * i as f64 / (self.nx - 1) as f64
    }

    pub fn p(&self, j: usize) -> f64 {
        self.p_min + (self.p_max - self.p_min) * j as f64 / (self.np - 1) as f64
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / (self.np - 1) as f64
    }
}

/// W sampled on a grid; `values[i * np + j]` is W(x_i, p_j).
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl WignerGrid {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.np + j]
    }

    /// Riemann sum of W dx dp.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.dx() * self.grid.dp()
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Grid coordinates (x, p) of the global maximum (first in row order).
    pub fn argmax(&self) -> (f64, f64) {
        let mut best = 0;
        for (k, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = k;
            }
        }
        (
            self.grid.x(best / self.grid.np),
            self.grid.p(best % self.grid.np),
        )
    }

    /// Interior points strictly above their 8 neighbours and above
    /// `rel_floor` times the global maximum.
    pub fn local_maxima(&self, rel_floor: f64) -> Vec<(f64, f64, f64)> {
        let floor = rel_floor * self.max();
        let (nx, np) = (self.grid.nx, self.grid.np);
        let mut peaks = Vec::new();
        for i in 1..nx.saturating_sub(1) {
            for j in 1..np.saturating_sub(1) {
                let w = self.get(i, j);
                if w <= floor {
                    continue;
                }
                let is_peak = (-1i64..=1).all(|di| {
                    (-1i64..=1).all(|dj| {
                        (di == 0 && dj == 0)
                            || w > self.get((i as i64 + di) as usize, (j as i64 + dj) as usize)
                    })
                });
                if is_peak {
                    peaks.push((self.grid.x(i), self.grid.p(j), w));
                }
            }
        }
        peaks
    }

    /// max |W(x, p) − W(−x, −p)|, assuming a grid symmetric about the origin.
    pub fn inversion_asymmetry(&self) -> f64 {
        let (nx, np) = (self.grid.nx, self.grid.np);
        let mut worst: f64 = 0.0;
        for i in 0..nx {
            for j in 0..np {
                worst = worst.max((self.get(i, j) - self.get(nx - 1 - i, np - 1 - j)).abs());
            }
        }
        worst
    }
}

/// Wigner function of the cavity; joint states are traced over the spin
/// first.
pub fn wigner(rho: &DensityMatrix, grid: &GridSpec) -> Result<WignerGrid> {
    grid.validate()?;
    let cav = reduced_cavity(rho);
    let cutoff = cav.layout().fock_cutoff();
    let band = (cutoff / 10).max(1);
    let tail = cav.photon_tail(cutoff + 1 - band);
    if tail > TAIL_LIMIT {
        return Err(Error::CutoffTooSmall {
            tail_population: tail,
        });
    }
    let m = cav.matrix();
    let dim = cav.dimension();
    let sqrt: Vec<f64> = (0..=dim).map(|n| (n as f64).sqrt()).collect();
    let values = (0..grid.nx)
        .into_par_iter()
        .flat_map_iter(|i| {
            let x = grid.x(i);
            let sqrt = &sqrt;
            (0..grid.np).map(move |j| point(m, dim, Complex64::new(x, grid.p(j)), sqrt))
        })
        .collect();
    Ok(WignerGrid {
        grid: *grid,
        values,
    })
}

fn point(m: &nalgebra::DMatrix<Complex64>, dim: usize, a: Complex64, sqrt: &[f64]) -> f64 {
    let mut w = vec![Complex64::new(0.0, 0.0); dim];
    w[0] = Complex64::new((-2.0 * a.norm_sqr()).exp() / std::f64::consts::PI, 0.0);
    let mut acc = m[(0, 0)].re * w[0].re;
    for n in 1..dim {
        w[n] = a * 2.0 * w[n - 1] / sqrt[n];
        acc += 2.0 * (m[(0, n)] * w[n]).re;
    }
    let ac = a.conj();
    for k in 1..dim {
        let mut temp = w[k];
        w[k] = (ac * 2.0 * temp - w[k - 1] * sqrt[k]) / sqrt[k];
        acc += (m[(k, k)] * w[k]).re;
        for n in k + 1..dim {
            let next = (a * 2.0 * w[n - 1] - temp * sqrt[k]) / sqrt[n];
            temp = w[n];
            w[n] = next;
            acc += 2.0 * (m[(k, n)] * w[n]).re;
        }
    }
    2.0 * acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::density::Layout;
    use nalgebra::{DMatrix, DVector};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// (2/π) Tr[ρ D Π D†] with D = exp(βa† − β*a) built in a much larger
    /// Fock space.
    fn displaced_parity_oracle(rho: &DMatrix<Complex64>, beta: Complex64) -> f64 {
        let big = 90;
        let mut a = DMatrix::<Complex64>::zeros(big, big);
        for n in 1..big {
            a[(n - 1, n)] = c((n as f64).sqrt(), 0.0);
        }
        let gen = a.adjoint() * beta - &a * beta.conj();
        let d = gen.exp();
        let parity = DMatrix::from_diagonal(&DVector::from_fn(big, |n, _| {
            c(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
        }));
        let op = &d * parity * d.adjoint();
        let k = rho.nrows();
        let mut tr = c(0.0, 0.0);
        for r in 0..k {
            for s in 0..k {
                tr += rho[(r, s)] * op[(s, r)];
            }
        }
        2.0 / PI * tr.re
    }

    fn random_cavity_state(cutoff: usize, seed: u64) -> DensityMatrix {
        let d = cutoff + 1;
        let mut s = seed;
        let mut next = || {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        // weight toward low photon numbers so the tail check passes
        let m = DMatrix::from_fn(d, d, |i, _| c(next(), next()) * (-(i as f64)).exp());
        let rho = &m * m.adjoint();
        let tr = rho.trace();
        DensityMatrix::from_matrix(Layout::Cavity { cutoff }, rho / tr).unwrap()
    }

    #[test]
    fn vacuum_peak_and_normalization() {
        let w = wigner(&DensityMatrix::fock(10, 0), &GridSpec::default()).unwrap();
        assert!((w.max() - 2.0 / PI).abs() < 1e-12);
        assert_eq!(w.argmax(), (0.0, 0.0));
        assert!((w.integral() - 1.0).abs() < 1e-6);
        // isotropic Gaussian: W(x, 0) = W(0, x)
        let g = w.grid;
        assert!((w.get(60, 50) - w.get(50, 60)).abs() < 1e-15);
        assert!((w.get(60, 50) - 2.0 / PI * (-2.0 * g.x(60).powi(2)).exp()).abs() < 1e-14);
        assert_eq!(w.local_maxima(0.01).len(), 1);
    }

    #[test]
    fn single_photon_is_negative_at_origin() {
        let w = wigner(&DensityMatrix::fock(10, 1), &GridSpec::default()).unwrap();
        assert!((w.get(50, 50) + 2.0 / PI).abs() < 1e-12);
        assert!((w.integral() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn matches_displaced_parity_oracle() {
        let rho = random_cavity_state(8, 3);
        let grid = GridSpec::square(2.0, 5);
        let w = wigner(&rho, &grid).unwrap();
        for i in 0..grid.nx {
            for j in 0..grid.np {
                let beta = c(grid.x(i), grid.p(j));
                let want = displaced_parity_oracle(rho.matrix(), beta);
                assert!(
                    (w.get(i, j) - want).abs() < 1e-9,
                    "{beta}: {} vs {want}",
                    w.get(i, j)
                );
            }
        }
    }

    #[test]
    fn coherent_state_peak_sits_at_its_amplitude() {
        let beta = c(1.2, -0.8);
        let cutoff = 30;
        let mut psi = DVector::<Complex64>::zeros(cutoff + 1);
        let mut coeff = c((-beta.norm_sqr() / 2.0).exp(), 0.0);
        for n in 0..=cutoff {
            psi[n] = coeff;
            coeff *= beta / ((n + 1) as f64).sqrt();
        }
        let rho = DensityMatrix::from_pure(Layout::Cavity { cutoff }, &psi).unwrap();
        let w = wigner(&rho, &GridSpec::square(3.0, 31)).unwrap();
        let (x, p) = w.argmax();
        assert!((x - 1.2).abs() < 1e-12 && (p + 0.8).abs() < 1e-12);
        assert!((w.max() - 2.0 / PI).abs() < 1e-9);
    }

    #[test]
    fn tight_cutoff_is_reported() {
        let rho = DensityMatrix::fock(10, 10);
        assert!(matches!(
            wigner(&rho, &GridSpec::default()),
            Err(Error::CutoffTooSmall { .. })
        ));
    }

    #[test]
    fn rejects_degenerate_grid() {
        let rho = DensityMatrix::fock(4, 0);
        assert!(wigner(&rho, &GridSpec::square(1.0, 1)).is_err());
        assert!(wigner(&rho, &GridSpec::square(-1.0, 5)).is_err());
    }
}
