//! Chain-of-rectangles geometry and external boundary-condition pairs.
//!
//! The domain is a row of `N` rectangles `(a_j, b_j) x (0, 1)` of width
//! `L + 2δ`, each overlapping its neighbours on a strip of width `2δ`.
//! Abscissae use the one-based labels `a_1..a_{N+1}` and `b_0..b_N`; the
//! backing vectors are zero-based, `a[i] = a_{i+1}` and `b[i] = b_i`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Geometry of `N` fixed-size overlapping subdomains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainChain {
    n_sub: usize,
    sub_len: f64,
    half_overlap: f64,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl DomainChain {
    /// Builds the chain for `n_sub >= 2` subdomains of core length `sub_len`
    /// and overlap half-width `half_overlap` in `(0, sub_len / 2)`.
    pub fn new(n_sub: usize, sub_len: f64, half_overlap: f64) -> Result<Self> {
        if n_sub < 2 {
            return Err(Error::InvalidGeometry(format!(
                "need at least 2 subdomains, got {n_sub}"
            )));
        }
        if !(sub_len.is_finite() && sub_len > 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "subdomain length must be positive, got {sub_len}"
            )));
        }
        if !(half_overlap.is_finite() && half_overlap > 0.0 && half_overlap < sub_len / 2.0) {
            return Err(Error::InvalidGeometry(format!(
                "half overlap must lie in (0, {}), got {half_overlap}",
                sub_len / 2.0
            )));
        }

        // a_1 = 0, a_j = L + a_{j-1}; b_j = a_{j+1} + 2δ.
        let mut a = Vec::with_capacity(n_sub + 1);
        a.push(0.0);
        for i in 1..=n_sub {
            a.push(a[i - 1] + sub_len);
        }
        let b: Vec<f64> = a.iter().map(|&x| x + 2.0 * half_overlap).collect();

        let tol = 1e-12 * (n_sub as f64 * sub_len);
        for (i, &x) in a.iter().enumerate() {
            let closed = i as f64 * sub_len;
            if (x - closed).abs() > tol {
                return Err(Error::Numerical(format!(
                    "abscissa a_{} drifted from closed form: {x} vs {closed}",
                    i + 1
                )));
            }
        }

        Ok(Self {
            n_sub,
            sub_len,
            half_overlap,
            a,
            b,
        })
    }

    pub fn n_sub(&self) -> usize {
        self.n_sub
    }

    pub fn sub_len(&self) -> f64 {
        self.sub_len
    }

    pub fn half_overlap(&self) -> f64 {
        self.half_overlap
    }

    /// Left abscissa `a_j` for `j` in `1..=N+1`.
    pub fn a(&self, j: usize) -> f64 {
        assert!((1..=self.n_sub + 1).contains(&j), "a_{j} out of range");
        self.a[j - 1]
    }

    /// Right abscissa `b_j` for `j` in `0..=N`.
    pub fn b(&self, j: usize) -> f64 {
        assert!(j <= self.n_sub, "b_{j} out of range");
        self.b[j]
    }

    /// All left abscissae `a_1..a_{N+1}`.
    pub fn left_abscissae(&self) -> &[f64] {
        &self.a
    }

    /// All right abscissae `b_0..b_N`.
    pub fn right_abscissae(&self) -> &[f64] {
        &self.b
    }

    /// Width of every subdomain, `L + 2δ`.
    pub fn sub_width(&self) -> f64 {
        self.sub_len + 2.0 * self.half_overlap
    }

    /// Total length `b_N - a_1 = N L + 2δ`.
    pub fn total_len(&self) -> f64 {
        self.b[self.n_sub] - self.a[0]
    }

    /// Subdomain `j` (one-based) as the interval `(a_j, b_j)`.
    pub fn subdomain(&self, j: usize) -> (f64, f64) {
        assert!((1..=self.n_sub).contains(&j), "subdomain {j} out of range");
        (self.a[j - 1], self.b[j])
    }
}

/// Kind of external operator applied on the bottom or top edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BcKind {
    Dirichlet,
    Neumann,
    Robin,
}

impl BcKind {
    fn letter(self) -> char {
        match self {
            BcKind::Dirichlet => 'D',
            BcKind::Neumann => 'N',
            BcKind::Robin => 'R',
        }
    }

    fn from_letter(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'D' => Some(BcKind::Dirichlet),
            'N' => Some(BcKind::Neumann),
            'R' => Some(BcKind::Robin),
            _ => None,
        }
    }
}

/// The six canonical external condition pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairLabel {
    DD,
    DR,
    DN,
    RR,
    NR,
    NN,
}

impl PairLabel {
    pub const ALL: [PairLabel; 6] = [
        PairLabel::DD,
        PairLabel::DR,
        PairLabel::DN,
        PairLabel::RR,
        PairLabel::NR,
        PairLabel::NN,
    ];

    pub fn has_robin(self) -> bool {
        matches!(self, PairLabel::DR | PairLabel::RR | PairLabel::NR)
    }

    /// Smallest admissible mode index.
    pub fn first_index(self) -> usize {
        match self {
            PairLabel::DN | PairLabel::NN => 0,
            _ => 1,
        }
    }

    /// Bottom/top kinds in the canonical orientation.
    pub fn kinds(self) -> (BcKind, BcKind) {
        use BcKind::*;
        match self {
            PairLabel::DD => (Dirichlet, Dirichlet),
            PairLabel::DR => (Dirichlet, Robin),
            PairLabel::DN => (Dirichlet, Neumann),
            PairLabel::RR => (Robin, Robin),
            PairLabel::NR => (Neumann, Robin),
            PairLabel::NN => (Neumann, Neumann),
        }
    }
}

impl fmt::Display for PairLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (b, t) = self.kinds();
        write!(f, "{}{}", b.letter(), t.letter())
    }
}

/// Bottom and top external conditions, with the Robin coefficient `q`
/// present exactly when one side is Robin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BcPair {
    pub bottom: BcKind,
    pub top: BcKind,
    pub q: Option<f64>,
}

impl BcPair {
    pub fn new(bottom: BcKind, top: BcKind, q: Option<f64>) -> Result<Self> {
        let robin = bottom == BcKind::Robin || top == BcKind::Robin;
        match (robin, q) {
            (true, Some(q)) if q.is_finite() && q > 0.0 => {}
            (true, Some(q)) => {
                return Err(Error::InvalidParameter(format!(
                    "Robin coefficient must be positive, got {q}"
                )))
            }
            (true, None) => {
                return Err(Error::InvalidParameter(
                    "Robin side requires a coefficient q".into(),
                ))
            }
            (false, Some(_)) => {
                return Err(Error::InvalidParameter(
                    "q given but no side is Robin".into(),
                ))
            }
            (false, None) => {}
        }
        Ok(Self { bottom, top, q })
    }

    /// Canonical pair; `q` is ignored unless the label has a Robin side.
    pub fn from_label(label: PairLabel, q: f64) -> Result<Self> {
        let (b, t) = label.kinds();
        Self::new(b, t, label.has_robin().then_some(q))
    }

    /// Canonical label; mirrored pairs such as `RD` map to `DR`.
    pub fn label(&self) -> PairLabel {
        self.label_and_mirror().0
    }

    /// Whether this pair is the top/bottom mirror of its canonical label.
    pub fn is_mirrored(&self) -> bool {
        self.label_and_mirror().1
    }

    fn label_and_mirror(&self) -> (PairLabel, bool) {
        use BcKind::*;
        match (self.bottom, self.top) {
            (Dirichlet, Dirichlet) => (PairLabel::DD, false),
            (Dirichlet, Robin) => (PairLabel::DR, false),
            (Robin, Dirichlet) => (PairLabel::DR, true),
            (Dirichlet, Neumann) => (PairLabel::DN, false),
            (Neumann, Dirichlet) => (PairLabel::DN, true),
            (Robin, Robin) => (PairLabel::RR, false),
            (Neumann, Robin) => (PairLabel::NR, false),
            (Robin, Neumann) => (PairLabel::NR, true),
            (Neumann, Neumann) => (PairLabel::NN, false),
        }
    }

    /// Robin coefficient, or 0 when no side is Robin.
    pub fn q_or_zero(&self) -> f64 {
        self.q.unwrap_or(0.0)
    }
}

impl fmt::Display for BcPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.bottom.letter(), self.top.letter())?;
        if let Some(q) = self.q {
            write!(f, "({q})")?;
        }
        Ok(())
    }
}

impl FromStr for PairLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.trim().chars().collect();
        if chars.len() != 2 {
            return Err(Error::InvalidParameter(format!("bad pair label {s:?}")));
        }
        let bottom = BcKind::from_letter(chars[0]);
        let top = BcKind::from_letter(chars[1]);
        match (bottom, top) {
            (Some(b), Some(t)) => Ok(BcPair { bottom: b, top: t, q: None }.label()),
            _ => Err(Error::InvalidParameter(format!("bad pair label {s:?}"))),
        }
    }
}

impl BcPair {
    /// Parses labels like `DR`, `RD` or `NN`; `q` is attached when needed.
    pub fn parse(s: &str, q: f64) -> Result<Self> {
        let chars: Vec<char> = s.trim().chars().collect();
        let kinds = (chars.len() == 2)
            .then(|| (BcKind::from_letter(chars[0]), BcKind::from_letter(chars[1])));
        match kinds {
            Some((Some(b), Some(t))) => {
                let robin = b == BcKind::Robin || t == BcKind::Robin;
                Self::new(b, t, robin.then_some(q))
            }
            _ => Err(Error::InvalidParameter(format!("bad pair label {s:?}"))),
        }
    }
}
