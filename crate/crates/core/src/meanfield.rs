//! Mean-field steady states for equal detunings Δ_C = Δ_A = Δ.
//!
//! Non-trivial solutions require the steady cavity equation to be singular,
//! which fixes Z to one of Z± = Δ/(2λ²)(−Δ ± √(4G² − κ²)). The amplitude then
//! follows from the spin shell X² + Y² + Z² = 1/4 with X = 2λZα_Re/Δ and
//! Y = −2λZα_Im/Δ.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{
    rhs_jacobian, semiclassical_rhs, spin_norm, ModelParams, Phase, PhaseLabel, SemiclassicalState,
};
use crate::stability::{assess_stability, jacobian, StabilityVerdict};

const NEWTON_MAX_ITER: usize = 50;
const NEWTON_MAX_HALVINGS: usize = 30;
/// Below this |2λ²Z + Δ² − 2GΔ| the ratio form of α_Im is replaced by the
/// null vector of the steady cavity system.
const RATIO_DENOMINATOR_MIN: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BranchLabel {
    /// α = 0, Z = −1/2.
    NpDown,
    /// α = 0, Z = +1/2.
    NpUp,
    SpPlusPos,
    SpPlusNeg,
    SpMinusPos,
    SpMinusNeg,
}

impl BranchLabel {
    pub fn is_normal(&self) -> bool {
        matches!(self, BranchLabel::NpDown | BranchLabel::NpUp)
    }

    pub fn is_plus(&self) -> bool {
        matches!(self, BranchLabel::SpPlusPos | BranchLabel::SpPlusNeg)
    }

    pub fn is_minus(&self) -> bool {
        matches!(self, BranchLabel::SpMinusPos | BranchLabel::SpMinusNeg)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            BranchLabel::NpDown => "np_down",
            BranchLabel::NpUp => "np_up",
            BranchLabel::SpPlusPos => "sp_plus_pos",
            BranchLabel::SpPlusNeg => "sp_plus_neg",
            BranchLabel::SpMinusPos => "sp_minus_pos",
            BranchLabel::SpMinusNeg => "sp_minus_neg",
        }
    }
}

impl fmt::Display for BranchLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which root of the Z constraint a branch value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZRoot {
    Plus,
    Minus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint {
    pub state: SemiclassicalState,
    pub branch: BranchLabel,
    pub stable: bool,
    pub verdict: StabilityVerdict,
    /// All five drift-matrix eigenvalues, descending real part.
    pub spectrum: Vec<Complex64>,
}

impl FixedPoint {
    pub fn residual(&self, params: &ModelParams) -> f64 {
        semiclassical_rhs(&self.state, params).amax()
    }
}

fn require_coupling(params: &ModelParams) -> Result<f64> {
    let delta = params.meanfield_delta()?;
    if params.lambda == 0.0 {
        return Err(Error::ZeroCoupling);
    }
    Ok(delta)
}

/// Real roots Z± of the non-trivial steady-state condition. Empty when
/// 4G² < κ²; a single value when the roots coincide.
pub fn z_branches(params: &ModelParams) -> Result<Vec<(ZRoot, f64)>> {
    let delta = require_coupling(params)?;
    let disc = 4.0 * params.g_drive * params.g_drive - params.kappa * params.kappa;
    if disc < 0.0 {
        return Ok(Vec::new());
    }
    let root = disc.sqrt();
    let pre = delta / (2.0 * params.lambda * params.lambda);
    let plus = pre * (-delta + root);
    if root == 0.0 {
        return Ok(vec![(ZRoot::Plus, plus)]);
    }
    Ok(vec![
        (ZRoot::Plus, plus),
        (ZRoot::Minus, pre * (-delta - root)),
    ])
}

/// The ± pair of shell states with the given Z, positive α_Re first.
pub fn alpha_from_z(
    z: f64,
    params: &ModelParams,
) -> Result<(SemiclassicalState, SemiclassicalState)> {
    let delta = require_coupling(params)?;
    let (l, g, k) = (params.lambda, params.g_drive, params.kappa);
    if 2.0 * g < k {
        return Err(Error::InvalidParams {
            field: "g_drive",
            reason: format!("non-trivial amplitudes need 2G >= kappa (G = {g}, kappa = {k})"),
        });
    }
    let p = 0.25 - z * z;
    if p < 0.0 {
        return Err(Error::OffShell { z });
    }
    let q = 4.0 * l * l * z * z / (delta * delta);
    if q == 0.0 {
        return Err(Error::UnboundedAmplitude { z });
    }
    let den = 2.0 * l * l * z + delta * delta - 2.0 * g * delta;
    let (ar, ai) = if den.abs() > RATIO_DENOMINATOR_MIN {
        let ratio = k * delta / den;
        let ar = (p / (q + q * ratio * ratio)).sqrt();
        (ar, ratio * ar)
    } else {
        // Null vector of [[−κ, Δ − 2G + u], [−(Δ + 2G + u), −κ]], u = 2λ²Z/Δ.
        let u = 2.0 * l * l * z / delta;
        let rows = [[-k, delta - 2.0 * g + u], [-(delta + 2.0 * g + u), -k]];
        let row = if rows[0][0].hypot(rows[0][1]) >= rows[1][0].hypot(rows[1][1]) {
            rows[0]
        } else {
            rows[1]
        };
        let (mut vr, mut vi) = (row[1], -row[0]);
        let n = vr.hypot(vi);
        if n == 0.0 {
            vr = 1.0;
            vi = 0.0;
        } else {
            vr /= n;
            vi /= n;
        }
        if vr < 0.0 || (vr == 0.0 && vi < 0.0) {
            vr = -vr;
            vi = -vi;
        }
        let amp = (p / q).sqrt();
        (amp * vr, amp * vi)
    };
    let c = 2.0 * l * z / delta;
    let pos = SemiclassicalState::new(ar, ai, c * ar, -c * ai, z);
    Ok((pos, pos.z2_partner()))
}

/// Gauss-Newton polish of a mean-field solution on the 5 RHS equations plus
/// the spin-shell constraint. Steps are halved while they increase the
/// residual.
pub fn refine(state: &SemiclassicalState, params: &ModelParams) -> SemiclassicalState {
    let residual = |s: &SemiclassicalState| -> DVector<f64> {
        let r = semiclassical_rhs(s, params);
        DVector::from_iterator(6, r.iter().copied().chain([spin_norm(s) - 0.25]))
    };
    let mut current = *state;
    let mut res = residual(&current);
    let mut res_norm = res.norm();
    for _ in 0..NEWTON_MAX_ITER {
        if res_norm == 0.0 {
            break;
        }
        let jac5 = rhs_jacobian(&current, params);
        let mut jac = DMatrix::<f64>::zeros(6, 5);
        jac.view_mut((0, 0), (5, 5)).copy_from(&jac5);
        jac[(5, 2)] = 2.0 * current.x;
        jac[(5, 3)] = 2.0 * current.y;
        jac[(5, 4)] = 2.0 * current.z;
        let svd = jac.svd(true, true);
        let Ok(step) = svd.solve(&(-&res), 1e-14) else {
            break;
        };
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..NEWTON_MAX_HALVINGS {
            let trial = SemiclassicalState::from_vector(
                &(current.to_vector() + step.fixed_rows::<5>(0) * scale),
            );
            let trial_res = residual(&trial);
            let trial_norm = trial_res.norm();
            if trial_norm < res_norm {
                current = trial;
                res = trial_res;
                res_norm = trial_norm;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    current
}

fn fixed_point(
    state: SemiclassicalState,
    branch: BranchLabel,
    params: &ModelParams,
) -> Result<FixedPoint> {
    let state = refine(&state, params);
    let drift = jacobian(&state, params);
    let verdict = assess_stability(&drift)?;
    Ok(FixedPoint {
        state,
        branch,
        stable: verdict.stable,
        verdict,
        spectrum: drift.eigenvalues()?,
    })
}

/// Every mean-field fixed point on the spin shell, with stability.
pub fn fixed_points(params: &ModelParams) -> Result<Vec<FixedPoint>> {
    let branches = z_branches(params)?;
    let mut out = vec![
        fixed_point(SemiclassicalState::ground(), BranchLabel::NpDown, params)?,
        fixed_point(SemiclassicalState::inverted(), BranchLabel::NpUp, params)?,
    ];
    for (root, z) in branches {
        let (pos, neg) = match alpha_from_z(z, params) {
            Ok(pair) => pair,
            Err(Error::OffShell { .. } | Error::UnboundedAmplitude { .. }) => continue,
            Err(e) => return Err(e),
        };
        // p = 0 collapses onto the normal points already listed
        if pos.amplitude() == 0.0 {
            continue;
        }
        let (lp, ln) = match root {
            ZRoot::Plus => (BranchLabel::SpPlusPos, BranchLabel::SpPlusNeg),
            ZRoot::Minus => (BranchLabel::SpMinusPos, BranchLabel::SpMinusNeg),
        };
        out.push(fixed_point(pos, lp, params)?);
        out.push(fixed_point(neg, ln, params)?);
    }
    Ok(out)
}

/// The G = κ/2 line below which only the normal phase exists.
pub fn boundary_g_lower(params: &ModelParams) -> f64 {
    params.kappa / 2.0
}

/// G at which Z+ = −1/2 for the given coupling:
/// G = √(κ² + (Δ² − λ²)²/Δ²) / 2.
pub fn boundary_g_upper(lambda: f64, params: &ModelParams) -> Result<f64> {
    let delta = params.meanfield_delta()?;
    let d2 = delta * delta;
    let shift = (d2 - lambda * lambda) / delta;
    Ok((params.kappa * params.kappa + shift * shift).sqrt() / 2.0)
}

/// Phase from which kinds of fixed points are stable.
pub fn classify_phase(params: &ModelParams) -> Result<PhaseLabel> {
    let points = fixed_points(params)?;
    label_from_points(&points)
}

pub fn label_from_points(points: &[FixedPoint]) -> Result<PhaseLabel> {
    let normal = points
        .iter()
        .filter(|p| p.stable && p.branch.is_normal())
        .count();
    let superradiant = points
        .iter()
        .filter(|p| p.stable && !p.branch.is_normal())
        .count();
    let phase = match (normal > 0, superradiant > 0) {
        (true, false) => Phase::NormalPhase,
        (false, true) => Phase::SuperradiantPhase,
        (true, true) => Phase::Coexistence,
        (false, false) => return Err(Error::NoStableSolution),
    };
    Ok(PhaseLabel {
        phase,
        stable_count: normal + superradiant,
    })
}
