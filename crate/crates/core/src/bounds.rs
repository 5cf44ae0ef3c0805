//! Closed-form contraction bounds and the ordering of the per-pair bounds.
//!
//! The bound for a Fourier mode with decay rate θ on subdomains of core
//! length `L` and overlap half-width δ is
//!
//! ```text
//! ρ(θ, δ) = (e^{2θδ} + e^{θL}) / (e^{2θδ+θL} + 1)
//! ```
//!
//! Two readings of θ are supported. [`Convention::Paper`] puts the
//! eigenvalue λ itself in the exponent; [`Convention::Sqrt`] uses √λ, the
//! actual decay rate of the mode equation `-u'' + λu = 0`. Which one is a
//! valid upper bound is checked against the exact mode iteration in
//! [`crate::fourier1d`].

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BcPair, PairLabel};
use crate::spectral::{find_root_k, CharKind};

/// Bisection tolerance used when bounds need a Robin frequency.
pub const ROOT_TOL: f64 = 1e-15;

/// Strict margin for the ordering inequalities.
pub const ORDER_MARGIN: f64 = 1e-14;

/// Which quantity is substituted for the decay rate θ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// θ = λ.
    Paper,
    /// θ = √λ.
    Sqrt,
}

impl Convention {
    pub const ALL: [Convention; 2] = [Convention::Paper, Convention::Sqrt];

    /// Decay rate θ for an eigenvalue λ ≥ 0.
    pub fn decay(self, eigenvalue: f64) -> f64 {
        match self {
            Convention::Paper => eigenvalue,
            Convention::Sqrt => eigenvalue.sqrt(),
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Paper => "paper",
            Convention::Sqrt => "sqrt",
        })
    }
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "paper" => Ok(Convention::Paper),
            "sqrt" => Ok(Convention::Sqrt),
            other => Err(Error::InvalidParameter(format!("unknown convention {other:?}"))),
        }
    }
}

/// `ρ(θ, δ)` evaluated with every exponential scaled by `e^{-(2θδ+θL)}`.
pub fn rho(decay: f64, delta: f64, sub_len: f64) -> f64 {
    debug_assert!(decay >= 0.0);
    let e_l = (-decay * sub_len).exp();
    let e_d = (-2.0 * decay * delta).exp();
    (e_l + e_d) / (1.0 + e_l * e_d)
}

/// The Robin-transmission auxiliary function φ(λ, δ, p).
pub fn phi_osm(lambda: f64, delta: f64, p: f64, sub_len: f64) -> f64 {
    let plus = lambda + p;
    let minus = lambda - p;
    let l = sub_len;
    // scaled by e^{-(λL + 2λδ)}
    let num = plus * plus * (-lambda * l).exp()
        - minus * minus * (-lambda * l - 4.0 * lambda * delta).exp()
        + plus * minus.abs() * ((-2.0 * lambda * delta).exp() - (-2.0 * lambda * l - 2.0 * lambda * delta).exp());
    let den = plus * plus - minus * minus * (-2.0 * lambda * l - 4.0 * lambda * delta).exp();
    num / den
}

/// The Robin-transmission auxiliary function ζ(λ, δ, p).
pub fn zeta_osm(lambda: f64, delta: f64, p: f64, sub_len: f64) -> Result<f64> {
    let plus = lambda + p;
    let minus = lambda - p;
    let l = sub_len;
    // scaled by e^{-λ(L + 2δ)}
    let num = plus * (-2.0 * lambda * l - 2.0 * lambda * delta).exp()
        + minus * (-2.0 * lambda * delta).exp();
    let den = plus + minus * (-2.0 * lambda * (l + 2.0 * delta)).exp();
    if den.abs() <= 1e-300 || !den.is_finite() || den.abs() < 1e-14 * (plus.abs() + minus.abs()) {
        return Err(Error::Singular(format!(
            "zeta denominator vanishes at lambda = {lambda}, delta = {delta}, p = {p}"
        )));
    }
    Ok(num / den)
}

/// A bound value together with the inputs that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractionBound {
    pub decay: f64,
    pub delta: f64,
    pub sub_len: f64,
    pub value: f64,
}

impl ContractionBound {
    pub fn new(decay: f64, delta: f64, sub_len: f64) -> Self {
        Self {
            decay,
            delta,
            sub_len,
            value: rho(decay, delta, sub_len),
        }
    }
}

/// Smallest eigenvalue admitted by a pair.
pub fn first_eigenvalue(label: PairLabel, q: Option<f64>) -> Result<f64> {
    let need_q = || {
        q.filter(|q| q.is_finite() && *q > 0.0).ok_or_else(|| {
            Error::InvalidParameter(format!("pair {label} needs a positive q"))
        })
    };
    Ok(match label {
        PairLabel::DD => PI * PI,
        PairLabel::DN => PI * PI / 4.0,
        PairLabel::NN => 0.0,
        PairLabel::DR => find_root_k(CharKind::DR, need_q()?, 1, ROOT_TOL)?.powi(2),
        PairLabel::RR => find_root_k(CharKind::RR, need_q()?, 1, ROOT_TOL)?.powi(2),
        PairLabel::NR => find_root_k(CharKind::NR, need_q()?, 1, ROOT_TOL)?.powi(2),
    })
}

/// Bound on the contraction factor of the whole method for one pair: the
/// mode bound at the slowest admissible frequency.
pub fn pair_bound(
    label: PairLabel,
    delta: f64,
    sub_len: f64,
    q: Option<f64>,
    convention: Convention,
) -> Result<ContractionBound> {
    check_overlap(delta, sub_len)?;
    let lambda = first_eigenvalue(label, q)?;
    Ok(ContractionBound::new(convention.decay(lambda), delta, sub_len))
}

/// Same as [`pair_bound`] for a full [`BcPair`].
pub fn theorem3_bound(
    pair: &BcPair,
    delta: f64,
    sub_len: f64,
    convention: Convention,
) -> Result<ContractionBound> {
    pair_bound(pair.label(), delta, sub_len, pair.q, convention)
}

fn check_overlap(delta: f64, sub_len: f64) -> Result<()> {
    if !(sub_len > 0.0 && delta > 0.0 && delta < sub_len / 2.0) {
        return Err(Error::InvalidParameter(format!(
            "delta = {delta} must lie in (0, L/2) with L = {sub_len}"
        )));
    }
    Ok(())
}

/// One strict inequality `lower < upper` of an ordering chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    pub lower: String,
    pub upper: String,
    pub lower_value: f64,
    pub upper_value: f64,
    pub margin: f64,
    pub holds: bool,
}

/// Both ordering chains evaluated at one `(δ, L, q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingReport {
    pub delta: f64,
    pub sub_len: f64,
    pub q: f64,
    pub convention: Convention,
    pub values: Vec<(PairLabel, f64)>,
    /// DD < DR < DN < NR < NN.
    pub chain_mixed: Vec<Inequality>,
    /// DD < RR < NN.
    pub chain_robin: Vec<Inequality>,
}

impl OrderingReport {
    pub fn all_hold(&self) -> bool {
        self.chain_mixed.iter().chain(&self.chain_robin).all(|i| i.holds)
    }

    pub fn value(&self, label: PairLabel) -> f64 {
        self.values
            .iter()
            .find(|(l, _)| *l == label)
            .map(|(_, v)| *v)
            .expect("all six pairs are evaluated")
    }
}

fn chain(labels: &[PairLabel], values: &[(PairLabel, f64)]) -> Vec<Inequality> {
    let get = |l: PairLabel| values.iter().find(|(x, _)| *x == l).map(|(_, v)| *v).unwrap();
    labels
        .windows(2)
        .map(|w| {
            let (lo, hi) = (get(w[0]), get(w[1]));
            let margin = hi - lo;
            Inequality {
                lower: w[0].to_string(),
                upper: w[1].to_string(),
                lower_value: lo,
                upper_value: hi,
                margin,
                holds: margin > ORDER_MARGIN,
            }
        })
        .collect()
}

/// Evaluates the two ordering chains of the per-pair bounds.
pub fn ordering_check(
    delta: f64,
    sub_len: f64,
    q: f64,
    convention: Convention,
) -> Result<OrderingReport> {
    let values = PairLabel::ALL
        .iter()
        .map(|&l| pair_bound(l, delta, sub_len, Some(q), convention).map(|b| (l, b.value)))
        .collect::<Result<Vec<_>>>()?;
    use PairLabel::*;
    Ok(OrderingReport {
        delta,
        sub_len,
        q,
        convention,
        chain_mixed: chain(&[DD, DR, DN, NR, NN], &values),
        chain_robin: chain(&[DD, RR, NN], &values),
        values,
    })
}
