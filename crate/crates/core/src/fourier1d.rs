//! Exact per-mode analysis of the Schwarz iteration.
//!
//! Expanding the 2D iterates in the eigenfunctions of the external pair,
//! every coefficient obeys an independent 1D iteration on the chain:
//! `-u'' + λu = 0` on each `(a_j, b_j)`, with traces exchanged between
//! neighbours. The iteration acts linearly on the interface data, and the
//! spectral radius of that map is the exact contraction factor of the mode.
//!
//! The state vector holds two values per interior interface, ordered left
//! to right: for interface `i` (between subdomains `i` and `i+1`), first
//! the datum subdomain `i+1` receives at `a_{i+1}`, then the datum
//! subdomain `i` receives at `b_i`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::bounds::{rho, Convention, ROOT_TOL};
use crate::error::{Error, Result};
use crate::geometry::DomainChain;
use crate::linalg;
use crate::spectral::{find_root_k, CharKind};

/// Slack for `radius <= bound` comparisons.
pub const BOUND_SLACK: f64 = 1e-10;

/// Interface condition exchanged between neighbours.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TransmissionKind {
    /// Dirichlet traces: the parallel Schwarz method.
    Dirichlet,
    /// Robin traces `p u ∓ ∂_x u`: the optimized Schwarz method.
    Robin { p: f64 },
}

impl TransmissionKind {
    pub fn robin(p: f64) -> Result<Self> {
        if p.is_finite() && p > 0.0 {
            Ok(TransmissionKind::Robin { p })
        } else {
            Err(Error::InvalidParameter(format!(
                "Robin transmission parameter must be positive, got {p}"
            )))
        }
    }

    pub fn short_name(&self) -> &'static str {
        match self {
            TransmissionKind::Dirichlet => "PSM",
            TransmissionKind::Robin { .. } => "OSM",
        }
    }

    /// Left trace `u(x)` or `p u(x) - u'(x)`.
    pub fn left_trace(&self, value: f64, slope: f64) -> f64 {
        match *self {
            TransmissionKind::Dirichlet => value,
            TransmissionKind::Robin { p } => p * value - slope,
        }
    }

    /// Right trace `u(x)` or `p u(x) + u'(x)`.
    pub fn right_trace(&self, value: f64, slope: f64) -> f64 {
        match *self {
            TransmissionKind::Dirichlet => value,
            TransmissionKind::Robin { p } => p * value + slope,
        }
    }
}

/// `sinh(s t) / sinh(s w)` and its `t`-derivative, without overflow.
/// For `s = 0` this is the affine limit `t / w`.
fn ratio(s: f64, t: f64, w: f64) -> (f64, f64) {
    if s == 0.0 {
        return (t / w, 1.0 / w);
    }
    let den = -(-2.0 * s * w).exp_m1();
    let lead = (s * (t - w)).exp();
    let value = lead * -(-2.0 * s * t).exp_m1() / den;
    let slope = s * lead * (1.0 + (-2.0 * s * t).exp()) / den;
    (value, slope)
}

/// Solution of the homogeneous mode equation on one subdomain.
///
/// Stored in the normalized basis
/// `ψ_r(x) = sinh(s(x-a)) / sinh(s(b-a))` and
/// `ψ_l(x) = sinh(s(b-x)) / sinh(s(b-a))`, `s = √λ`
/// (affine `(x-a)/(b-a)`, `(b-x)/(b-a)` when `λ = 0`), so that
/// `u = c_r ψ_r + c_l ψ_l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSolution {
    pub lambda: f64,
    pub a: f64,
    pub b: f64,
    pub c_right: f64,
    pub c_left: f64,
}

impl ModeSolution {
    fn s(&self) -> f64 {
        self.lambda.sqrt()
    }

    /// Value and slope at `x`.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let w = self.b - self.a;
        let (r1, d1) = ratio(self.s(), x - self.a, w);
        let (r2, d2) = ratio(self.s(), self.b - x, w);
        (
            self.c_right * r1 + self.c_left * r2,
            self.c_right * d1 - self.c_left * d2,
        )
    }

    /// Coefficients `(A, B)` of `A sinh(s(x-a)) + B sinh(s(b-x))`, or of
    /// `A (x-a) + B (b-x)` when `λ = 0`. May overflow to zero for very
    /// large `s (b-a)`; [`ModeSolution::eval`] does not.
    pub fn sinh_coefficients(&self) -> (f64, f64) {
        let w = self.b - self.a;
        let scale = if self.lambda == 0.0 { w } else { (self.s() * w).sinh() };
        (self.c_right / scale, self.c_left / scale)
    }
}

/// Solves `-u'' + λu = 0` on `(a, b)` with `left` data `g_left` at `a` and
/// `right` data `g_right` at `b`.
pub fn subdomain_mode_solution_sides(
    lambda: f64,
    a: f64,
    b: f64,
    left: TransmissionKind,
    right: TransmissionKind,
    g_left: f64,
    g_right: f64,
) -> Result<ModeSolution> {
    if !(b > a) {
        return Err(Error::InvalidGeometry(format!("need b > a, got ({a}, {b})")));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("lambda must be >= 0, got {lambda}")));
    }
    let s = lambda.sqrt();
    let w = b - a;
    // basis values/slopes at both ends
    let (r_at_a, dr_at_a) = ratio(s, 0.0, w);
    let (r_at_b, dr_at_b) = ratio(s, w, w);
    // ψ_r(a) = r(0), ψ_r'(a) = r'(0); ψ_l(a) = r(w), ψ_l'(a) = -r'(w)
    let m11 = left.left_trace(r_at_a, dr_at_a);
    let m12 = left.left_trace(r_at_b, -dr_at_b);
    // ψ_r(b) = r(w), ψ_r'(b) = r'(w); ψ_l(b) = r(0), ψ_l'(b) = -r'(0)
    let m21 = right.right_trace(r_at_b, dr_at_b);
    let m22 = right.right_trace(r_at_a, -dr_at_a);
    let det = m11 * m22 - m12 * m21;
    let scale = (m11.abs() + m12.abs()) * (m21.abs() + m22.abs());
    if !(det.abs() > 1e-13 * scale) {
        return Err(Error::Singular(format!(
            "trace system singular for lambda = {lambda}, width = {w}, {left:?}/{right:?}"
        )));
    }
    // [m11 m12; m21 m22] [c_r; c_l] = [g_l; g_r]
    let c_right = (g_left * m22 - m12 * g_right) / det;
    let c_left = (m11 * g_right - m21 * g_left) / det;
    Ok(ModeSolution {
        lambda,
        a,
        b,
        c_right,
        c_left,
    })
}

/// Single-kind variant: both ends carry the same transmission condition.
pub fn subdomain_mode_solution(
    lambda: f64,
    a: f64,
    b: f64,
    trans: TransmissionKind,
    g_left: f64,
    g_right: f64,
) -> Result<ModeSolution> {
    subdomain_mode_solution_sides(lambda, a, b, trans, trans, g_left, g_right)
}

/// Linear map on interface data for one mode, with its spectral radius.
#[derive(Debug, Clone)]
pub struct ModeIteration {
    pub chain: DomainChain,
    pub lambda: f64,
    pub transmission: TransmissionKind,
    pub matrix: DMatrix<f64>,
    pub spectral_radius: f64,
}

fn left_slot(interface: usize) -> usize {
    2 * (interface - 1)
}

fn right_slot(interface: usize) -> usize {
    2 * (interface - 1) + 1
}

/// Assembles the interface-data iteration matrix for one mode.
pub fn assemble_mode_matrix(
    chain: &DomainChain,
    lambda: f64,
    trans: TransmissionKind,
) -> Result<DMatrix<f64>> {
    let n = chain.n_sub();
    let dim = 2 * (n - 1);
    let mut m = DMatrix::<f64>::zeros(dim, dim);

    for j in 1..=n {
        let (a, b) = chain.subdomain(j);
        let left = if j == 1 { TransmissionKind::Dirichlet } else { trans };
        let right = if j == n { TransmissionKind::Dirichlet } else { trans };

        let mut inputs = Vec::with_capacity(2);
        if j >= 2 {
            inputs.push((left_slot(j - 1), 1.0, 0.0));
        }
        if j < n {
            inputs.push((right_slot(j), 0.0, 1.0));
        }
        for (col, gl, gr) in inputs {
            let sol = subdomain_mode_solution_sides(lambda, a, b, left, right, gl, gr)?;
            if j < n {
                let (v, d) = sol.eval(chain.a(j + 1));
                m[(left_slot(j), col)] = trans.left_trace(v, d);
            }
            if j >= 2 {
                let (v, d) = sol.eval(chain.b(j - 1));
                m[(right_slot(j - 1), col)] = trans.right_trace(v, d);
            }
        }
    }
    Ok(m)
}

/// Builds the mode iteration and computes its spectral radius.
pub fn build_mode_iteration(
    chain: &DomainChain,
    lambda: f64,
    trans: TransmissionKind,
) -> Result<ModeIteration> {
    let matrix = assemble_mode_matrix(chain, lambda, trans)?;
    let spectral_radius = linalg::spectral_radius(&matrix)?;
    Ok(ModeIteration {
        chain: chain.clone(),
        lambda,
        transmission: trans,
        matrix,
        spectral_radius,
    })
}

/// Exact mode radius next to its closed-form bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusComparison {
    pub n_sub: usize,
    pub lambda: f64,
    pub transmission: TransmissionKind,
    pub convention: Convention,
    pub radius: f64,
    pub bound: f64,
    pub bound_holds: bool,
}

pub fn mode_radius_vs_bound(
    chain: &DomainChain,
    lambda: f64,
    trans: TransmissionKind,
    convention: Convention,
) -> Result<RadiusComparison> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda must be > 0, got {lambda}")));
    }
    let it = build_mode_iteration(chain, lambda, trans)?;
    let bound = rho(convention.decay(lambda), chain.half_overlap(), chain.sub_len());
    Ok(RadiusComparison {
        n_sub: chain.n_sub(),
        lambda,
        transmission: trans,
        convention,
        radius: it.spectral_radius,
        bound,
        bound_holds: it.spectral_radius <= bound + BOUND_SLACK,
    })
}

/// Outcome of checking both bound conventions against exact radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConventionEvidence {
    pub selected: Option<Convention>,
    pub cases: Vec<RadiusComparison>,
}

impl ConventionEvidence {
    pub fn holds_for(&self, convention: Convention) -> bool {
        self.cases
            .iter()
            .filter(|c| c.convention == convention)
            .all(|c| c.bound_holds)
    }
}

/// Eigenvalues used to validate the bound: the slowest modes of DN, NR(10),
/// DR(10) and DD.
pub fn validation_eigenvalues() -> Result<Vec<f64>> {
    Ok(vec![
        PI * PI / 4.0,
        find_root_k(CharKind::NR, 10.0, 1, ROOT_TOL)?.powi(2),
        find_root_k(CharKind::DR, 10.0, 1, ROOT_TOL)?.powi(2),
        PI * PI,
    ])
}

/// Chooses the bound convention that is a valid upper bound on every exact
/// mode radius over `lambdas x n_list x {Dirichlet, Robin(p)}`.
///
/// `Paper` is kept when both conventions hold; `None` means neither does.
pub fn select_convention(
    sub_len: f64,
    delta: f64,
    lambdas: &[f64],
    n_list: &[usize],
    p: f64,
) -> Result<ConventionEvidence> {
    let transmissions = [TransmissionKind::Dirichlet, TransmissionKind::robin(p)?];
    let mut cases = Vec::new();
    for &n in n_list {
        let chain = DomainChain::new(n, sub_len, delta)?;
        for &lambda in lambdas {
            for trans in transmissions {
                for convention in Convention::ALL {
                    cases.push(mode_radius_vs_bound(&chain, lambda, trans, convention)?);
                }
            }
        }
    }
    let mut evidence = ConventionEvidence { selected: None, cases };
    evidence.selected = [Convention::Paper, Convention::Sqrt]
        .into_iter()
        .find(|&c| evidence.holds_for(c));
    Ok(evidence)
}

/// Default validation set: `δ = 0.1`, `L = 1`, `N ∈ {3, 5, 10}`, `p = 10`.
pub fn select_convention_default() -> Result<ConventionEvidence> {
    select_convention(1.0, 0.1, &validation_eigenvalues()?, &[3, 5, 10], 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirichlet_interpolant() {
        let sol = subdomain_mode_solution(1.0, 0.0, 1.0, TransmissionKind::Dirichlet, 1.0, 0.0)
            .unwrap();
        for &x in &[0.0, 0.25, 0.6, 1.0] {
            let expected = (1.0f64 - x).sinh() / 1.0f64.sinh();
            assert!((sol.eval(x).0 - expected).abs() < 1e-15);
        }
        let (a, b) = sol.sinh_coefficients();
        assert!(a.abs() < 1e-15);
        assert!((b - 1.0 / 1.0f64.sinh()).abs() < 1e-15);
    }

    #[test]
    fn harmonic_interpolant() {
        let sol = subdomain_mode_solution(0.0, 0.0, 1.0, TransmissionKind::Dirichlet, 0.0, 1.0)
            .unwrap();
        for &x in &[0.0, 0.3, 1.0] {
            let (v, d) = sol.eval(x);
            assert!((v - x).abs() < 1e-15);
            assert!((d - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn robin_trace_system_residual() {
        let t = TransmissionKind::robin(10.0).unwrap();
        let sol = subdomain_mode_solution(4.0, 0.0, 1.2, t, 1.0, 1.0).unwrap();
        let (va, da) = sol.eval(0.0);
        let (vb, db) = sol.eval(1.2);
        assert!((t.left_trace(va, da) - 1.0).abs() < 1e-12);
        assert!((t.right_trace(vb, db) - 1.0).abs() < 1e-12);
        // independent route: explicit sinh basis with exact hyperbolic entries
        let s = 2.0f64;
        let w = 1.2f64;
        let m11 = 10.0 * 0.0 - s; // A sinh(s(x-a)) at a: value 0, slope s
        let m12 = 10.0 * (s * w).sinh() + s * (s * w).cosh();
        let m21 = 10.0 * (s * w).sinh() + s * (s * w).cosh();
        let m22 = 10.0 * 0.0 - s;
        let det = m11 * m22 - m12 * m21;
        let a = (1.0 * m22 - m12 * 1.0) / det;
        let b = (m11 * 1.0 - m21 * 1.0) / det;
        let (ca, cb) = sol.sinh_coefficients();
        assert!((ca - a).abs() < 1e-13 && (cb - b).abs() < 1e-13);
    }

    #[test]
    fn large_lambda_does_not_overflow() {
        let sol = subdomain_mode_solution(1e8, 0.0, 1.5, TransmissionKind::Dirichlet, 1.0, 1.0)
            .unwrap();
        let (mid, _) = sol.eval(0.75);
        assert!(mid.is_finite() && mid.abs() < 1e-300);
        assert!((sol.eval(0.0).0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_subdomain() {
        assert!(subdomain_mode_solution(1.0, 1.0, 0.0, TransmissionKind::Dirichlet, 0.0, 0.0)
            .is_err());
        assert!(subdomain_mode_solution(-1.0, 0.0, 1.0, TransmissionKind::Dirichlet, 0.0, 0.0)
            .is_err());
        assert!(TransmissionKind::robin(0.0).is_err());
    }

    #[test]
    fn two_subdomain_harmonic_matrix() {
        // hand assembly from affine interpolants on (0, L+2δ) and (L, 2L+2δ)
        let (l, d) = (1.0, 0.1);
        let chain = DomainChain::new(2, l, d).unwrap();
        let m = assemble_mode_matrix(&chain, 0.0, TransmissionKind::Dirichlet).unwrap();
        let w = l + 2.0 * d;
        // subdomain 1: u = g * x / w, sampled at a_2 = L
        // subdomain 2: u = g * (b_2 - x) / w, sampled at b_1 = L + 2δ
        let c = l / w;
        assert!((m[(0, 1)] - c).abs() < 1e-15);
        assert!((m[(1, 0)] - c).abs() < 1e-15);
        assert_eq!(m[(0, 0)], 0.0);
        assert_eq!(m[(1, 1)], 0.0);
        let it = build_mode_iteration(&chain, 0.0, TransmissionKind::Dirichlet).unwrap();
        assert!((it.spectral_radius - c).abs() < 1e-14);
        assert!(it.spectral_radius < 1.0);
    }
}
