//! Eigenpairs of the 1D Laplacian on (0, 1) under the six external
//! condition pairs.
//!
//! For `DD`, `DN` and `NN` the frequencies are explicit multiples of π.
//! For the Robin pairs they are roots of a transcendental characteristic
//! function, located by bisection on a bracket that is known to contain
//! exactly one sign change:
//!
//! | pair | characteristic function        | bracket of the k-th root  |
//! |------|--------------------------------|---------------------------|
//! | DR   | `q sin x + x cos x`            | `(kπ - π/2, kπ)`          |
//! | NR   | `x sin x - q cos x`            | `((k-1)π, (k-1/2)π)`      |
//! | RR   | `2qx cos x + (q² - x²) sin x`  | `((k-1)π, kπ)`            |

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BcPair, PairLabel};
use crate::quadrature;

/// Endpoint nudge applied before the sign check.
const BRACKET_NUDGE: f64 = 1e-12;

/// The three pairs whose frequencies come from a characteristic function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CharKind {
    DR,
    RR,
    NR,
}

impl CharKind {
    pub const ALL: [CharKind; 3] = [CharKind::DR, CharKind::RR, CharKind::NR];

    fn name(self) -> &'static str {
        match self {
            CharKind::DR => "DR",
            CharKind::RR => "RR",
            CharKind::NR => "NR",
        }
    }

    pub fn from_label(label: PairLabel) -> Option<Self> {
        match label {
            PairLabel::DR => Some(CharKind::DR),
            PairLabel::RR => Some(CharKind::RR),
            PairLabel::NR => Some(CharKind::NR),
            _ => None,
        }
    }

    /// Open interval containing the `k`-th root, `k >= 1`.
    pub fn bracket(self, k: usize) -> (f64, f64) {
        let k = k as f64;
        match self {
            CharKind::DR => (k * PI - FRAC_PI_2, k * PI),
            CharKind::NR => ((k - 1.0) * PI, (k - 0.5) * PI),
            CharKind::RR => ((k - 1.0) * PI, k * PI),
        }
    }
}

/// Which end of the Robin coefficient range a limit refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QLimit {
    Zero,
    Infinity,
}

/// Characteristic function of the given Robin pair, evaluated as written.
pub fn char_function(kind: CharKind, q: f64, x: f64) -> f64 {
    match kind {
        CharKind::DR => q * x.sin() + x * x.cos(),
        CharKind::RR => 2.0 * q * x * x.cos() + (q * q - x * x) * x.sin(),
        CharKind::NR => x * x.sin() - q * x.cos(),
    }
}

/// Finds the `k`-th root of the characteristic function by bisection.
///
/// Bisection stops once the bracket is narrower than `tol` or no longer
/// shrinks in floating point.
pub fn find_root_k(kind: CharKind, q: f64, k: usize, tol: f64) -> Result<f64> {
    if !(q.is_finite() && q > 0.0) {
        return Err(Error::InvalidParameter(format!("q must be positive, got {q}")));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("root index starts at 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }

    let (lo0, hi0) = kind.bracket(k);
    let mut lo = lo0 + BRACKET_NUDGE;
    let mut hi = hi0 - BRACKET_NUDGE;
    let f = |x: f64| char_function(kind, q, x);
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoSignChange {
            kind: kind.name(),
            q,
            k,
            lo,
            hi,
        });
    }

    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Analytic limit of the first frequency as `q` tends to 0 or infinity.
pub fn limit_frequency(kind: CharKind, limit: QLimit) -> f64 {
    match (kind, limit) {
        (CharKind::DR, QLimit::Zero) => FRAC_PI_2,
        (CharKind::DR, QLimit::Infinity) => PI,
        (CharKind::RR, QLimit::Zero) => 0.0,
        (CharKind::RR, QLimit::Infinity) => PI,
        (CharKind::NR, QLimit::Zero) => 0.0,
        (CharKind::NR, QLimit::Infinity) => FRAC_PI_2,
    }
}

/// One L²(0,1)-normalized eigenpair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenMode {
    pub index: usize,
    /// Frequency ω with λ = ω².
    pub freq: f64,
    pub eigenvalue: f64,
    pub norm_const: f64,
    pub label: PairLabel,
    /// True when the pair is the bottom/top mirror of `label` (e.g. `RD`).
    pub mirrored: bool,
    pub q: Option<f64>,
}

impl EigenMode {
    fn shape(&self, y: f64) -> f64 {
        let w = self.freq;
        match self.label {
            PairLabel::DD | PairLabel::DR | PairLabel::DN => (w * y).sin(),
            PairLabel::NR | PairLabel::NN => (w * y).cos(),
            PairLabel::RR => {
                let q = self.q.unwrap_or(0.0);
                q * (w * y).sin() + w * (w * y).cos()
            }
        }
    }

    /// Evaluates the normalized eigenfunction at `y` in `[0, 1]`.
    pub fn eval(&self, y: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&y) {
            return Err(Error::InvalidParameter(format!("y = {y} outside [0, 1]")));
        }
        let y = if self.mirrored { 1.0 - y } else { y };
        Ok(self.norm_const * self.shape(y))
    }
}

/// Alias matching the operation name used by the CLI.
pub fn eval_eigenfunction(mode: &EigenMode, y: f64) -> Result<f64> {
    mode.eval(y)
}

fn mode_for(pair: &BcPair, k: usize, tol: f64) -> Result<EigenMode> {
    let label = pair.label();
    let q = pair.q;
    let (freq, norm_const) = match label {
        PairLabel::DD => (PI * k as f64, SQRT_2),
        PairLabel::DN => ((2 * k + 1) as f64 * FRAC_PI_2, SQRT_2),
        PairLabel::NN if k == 0 => (0.0, 1.0),
        PairLabel::NN => (PI * k as f64, SQRT_2),
        PairLabel::DR => {
            let mu = find_root_k(CharKind::DR, pair.q_or_zero(), k, tol)?;
            (mu, (4.0 * mu / (2.0 * mu - (2.0 * mu).sin())).sqrt())
        }
        PairLabel::NR => {
            let nu = find_root_k(CharKind::NR, pair.q_or_zero(), k, tol)?;
            (nu, (4.0 * nu / (2.0 * nu + (2.0 * nu).sin())).sqrt())
        }
        PairLabel::RR => {
            let qv = pair.q_or_zero();
            let tau = find_root_k(CharKind::RR, qv, k, tol)?;
            let denom = (tau * tau - qv * qv) * (2.0 * tau).sin()
                + 4.0 * qv * tau * tau.sin().powi(2)
                + 2.0 * tau.powi(3)
                + 2.0 * qv * qv * tau;
            let c = (4.0 * tau / denom).sqrt();
            let c = if c.is_finite() && c > 0.0 {
                c
            } else {
                rr_quadrature_norm(qv, tau)?
            };
            (tau, c)
        }
    };
    Ok(EigenMode {
        index: k,
        freq,
        eigenvalue: freq * freq,
        norm_const,
        label,
        mirrored: pair.is_mirrored(),
        q,
    })
}

fn rr_quadrature_norm(q: f64, tau: f64) -> Result<f64> {
    let sq = quadrature::integrate(
        |y| (q * (tau * y).sin() + tau * (tau * y).cos()).powi(2),
        0.0,
        1.0,
        256,
    );
    if sq.is_finite() && sq > 0.0 {
        Ok(1.0 / sq.sqrt())
    } else {
        Err(Error::Numerical(format!(
            "RR eigenfunction has no finite norm for q = {q}, tau = {tau}"
        )))
    }
}

/// Eigenpairs with indices from the first admissible one up to `k_max`,
/// in increasing eigenvalue order.
pub fn eigenmodes(pair: &BcPair, k_max: usize, tol: f64) -> Result<Vec<EigenMode>> {
    let first = pair.label().first_index();
    if k_max < first {
        return Err(Error::InvalidParameter(format!(
            "k_max = {k_max} below first admissible index {first} for {}",
            pair.label()
        )));
    }
    (first..=k_max).map(|k| mode_for(pair, k, tol)).collect()
}

/// The slowest mode of a pair: the one with the smallest eigenvalue.
pub fn first_mode(pair: &BcPair, tol: f64) -> Result<EigenMode> {
    let first = pair.label().first_index();
    mode_for(pair, first, tol)
}
