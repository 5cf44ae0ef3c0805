//! Second-order finite differences for `-Δ` on one subdomain.
//!
//! A subdomain grid has `nx x ny` interior nodes; node `(i, k)` sits at
//! `(a_j + i hx, k hy)` for `i in 0..=nx+1`, `k in 0..=ny+1`. Unknowns are
//! the interior nodes plus every boundary node that carries a Neumann or
//! Robin closure; those closures are imposed by eliminating a centred ghost
//! node. Dirichlet boundaries (external, outer ends, Dirichlet transmission)
//! are not unknowns and enter through the right-hand side.
//!
//! Unknowns are numbered x-major (`pos = ix * my + iy`), which gives a
//! band of half-width `my` and makes a banded LU the natural direct solver.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier1d::TransmissionKind;
use crate::geometry::{BcKind, BcPair, DomainChain};
use crate::linalg::{BandedLu, BandedMatrix};

/// How the subdomain mesh is specified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridSpec {
    /// Uniform mesh width in both directions; `L`, `δ` and `1` must be
    /// integer multiples of it.
    MeshWidth(f64),
    /// Explicit interior point counts; interfaces need not be grid lines.
    Counts { nx: usize, ny: usize },
}

/// Mesh of one subdomain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubdomainGrid {
    /// One-based subdomain index.
    pub index: usize,
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
    /// `(a_j, 0)`.
    pub origin: (f64, f64),
    /// `L + 2δ`.
    pub width: f64,
    /// Local abscissa of `a_{j+1}`, i.e. `L`.
    pub left_interface_offset: f64,
    /// Local abscissa of `b_{j-1}`, i.e. `2δ`.
    pub right_interface_offset: f64,
    /// Whether both interface offsets are grid lines.
    pub aligned: bool,
}

impl SubdomainGrid {
    /// Number of nodes per x column, boundary rows included.
    pub fn column_len(&self) -> usize {
        self.ny + 2
    }

    /// Number of nodes in the full local array, boundaries included.
    pub fn node_count(&self) -> usize {
        (self.nx + 2) * (self.ny + 2)
    }

    /// Index of node `(i, k)` in a full local array.
    pub fn node(&self, i: usize, k: usize) -> usize {
        i * (self.ny + 2) + k
    }

    pub fn x_at(&self, i: usize) -> f64 {
        self.origin.0 + i as f64 * self.hx
    }

    pub fn y_at(&self, k: usize) -> f64 {
        k as f64 * self.hy
    }

    /// Grid-line index of a local abscissa when it lies on a grid line.
    pub fn line_index(&self, x_local: f64) -> Option<usize> {
        let r = x_local / self.hx;
        let i = r.round();
        ((r - i).abs() < 1e-8 && i >= 0.0 && i <= (self.nx + 1) as f64).then_some(i as usize)
    }
}

fn integer_ratio(len: f64, h: f64) -> Option<usize> {
    let r = len / h;
    let n = r.round();
    ((r - n).abs() <= 1e-10 * r.max(1.0) && n >= 1.0).then_some(n as usize)
}

/// Builds the grid of subdomain `j` (one-based).
pub fn make_grid(chain: &DomainChain, j: usize, spec: GridSpec) -> Result<SubdomainGrid> {
    if !(1..=chain.n_sub()).contains(&j) {
        return Err(Error::InvalidParameter(format!(
            "subdomain {j} outside 1..={}",
            chain.n_sub()
        )));
    }
    let l = chain.sub_len();
    let two_delta = 2.0 * chain.half_overlap();
    let width = chain.sub_width();

    let (nx, ny, hx, hy) = match spec {
        GridSpec::MeshWidth(h) => {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::InvalidParameter(format!("mesh width must be positive, got {h}")));
            }
            let cells_l = integer_ratio(l, h).ok_or_else(|| {
                Error::GridAlignment(format!(
                    "L = {l} is not a multiple of h = {h} (remainder {:e})",
                    l - (l / h).floor() * h
                ))
            })?;
            let delta = chain.half_overlap();
            let cells_half = integer_ratio(delta, h).ok_or_else(|| {
                Error::GridAlignment(format!(
                    "δ = {delta} is not a multiple of h = {h} (remainder {:e})",
                    delta - (delta / h).floor() * h
                ))
            })?;
            let cells_o = 2 * cells_half;
            let cells_y = integer_ratio(1.0, h).ok_or_else(|| {
                Error::GridAlignment(format!("unit height is not a multiple of h = {h}"))
            })?;
            (cells_l + cells_o - 1, cells_y - 1, h, h)
        }
        GridSpec::Counts { nx, ny } => {
            if nx == 0 || ny == 0 {
                return Err(Error::InvalidParameter("grid counts must be positive".into()));
            }
            (nx, ny, width / (nx + 1) as f64, 1.0 / (ny + 1) as f64)
        }
    };
    if nx < 3 {
        return Err(Error::InvalidParameter(format!("need at least 3 interior x points, got {nx}")));
    }

    let mut grid = SubdomainGrid {
        index: j,
        nx,
        ny,
        hx,
        hy,
        origin: (chain.a(j), 0.0),
        width,
        left_interface_offset: l,
        right_interface_offset: two_delta,
        aligned: false,
    };
    grid.aligned = grid.line_index(l).is_some() && grid.line_index(two_delta).is_some();
    Ok(grid)
}

/// Which x ends of a subdomain are ends of the whole chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct EndFlags {
    pub left_outer: bool,
    pub right_outer: bool,
}

impl EndFlags {
    pub fn for_subdomain(j: usize, n_sub: usize) -> Self {
        Self {
            left_outer: j == 1,
            right_outer: j == n_sub,
        }
    }
}

/// Assembled and factored subdomain operator.
#[derive(Debug, Clone)]
pub struct SubdomainOperator {
    grid: SubdomainGrid,
    bc: BcPair,
    transmission: TransmissionKind,
    end_flags: EndFlags,
    left: TransmissionKind,
    right: TransmissionKind,
    x_nodes: Vec<usize>,
    y_nodes: Vec<usize>,
    matrix: BandedMatrix,
    lu: BandedLu,
}

fn y_unknowns(bc: &BcPair, ny: usize) -> Vec<usize> {
    let mut v = Vec::with_capacity(ny + 2);
    if bc.bottom != BcKind::Dirichlet {
        v.push(0);
    }
    v.extend(1..=ny);
    if bc.top != BcKind::Dirichlet {
        v.push(ny + 1);
    }
    v
}

fn x_unknowns(left: TransmissionKind, right: TransmissionKind, nx: usize) -> Vec<usize> {
    let mut v = Vec::with_capacity(nx + 2);
    if matches!(left, TransmissionKind::Robin { .. }) {
        v.push(0);
    }
    v.extend(1..=nx);
    if matches!(right, TransmissionKind::Robin { .. }) {
        v.push(nx + 1);
    }
    v
}

/// Three-point second difference along one direction with centred ghost
/// elimination at closed ends. Returns `(diag, [(offset, coeff)])` where the
/// offset is -1 or +1 in unknown positions.
fn line_stencil(
    pos: usize,
    count: usize,
    first_is_boundary: bool,
    last_is_boundary: bool,
    low_robin: f64,
    high_robin: f64,
    h: f64,
) -> (f64, Vec<(isize, f64)>) {
    let inv = 1.0 / (h * h);
    let mut diag = 2.0 * inv;
    let mut off = Vec::with_capacity(2);
    let at_low = pos == 0;
    let at_high = pos + 1 == count;
    if at_low && first_is_boundary {
        // ghost u_{-1} = u_1 - 2h c u_0 (c = Robin coefficient, 0 for Neumann)
        diag += 2.0 * low_robin / h;
        off.push((1, -2.0 * inv));
        return (diag, off);
    }
    if at_high && last_is_boundary {
        diag += 2.0 * high_robin / h;
        off.push((-1, -2.0 * inv));
        return (diag, off);
    }
    if !at_low {
        off.push((-1, -inv));
    }
    if !at_high {
        off.push((1, -inv));
    }
    (diag, off)
}

fn robin_coeff(kind: BcKind, q: f64) -> f64 {
    if kind == BcKind::Robin {
        q
    } else {
        0.0
    }
}

fn robin_p(t: TransmissionKind) -> f64 {
    match t {
        TransmissionKind::Robin { p } => p,
        TransmissionKind::Dirichlet => 0.0,
    }
}

/// Assembles `-Δ_h` for the subdomain and factors it.
pub fn assemble_operator(
    grid: &SubdomainGrid,
    bc: &BcPair,
    trans: TransmissionKind,
    end_flags: EndFlags,
) -> Result<SubdomainOperator> {
    let left = if end_flags.left_outer { TransmissionKind::Dirichlet } else { trans };
    let right = if end_flags.right_outer { TransmissionKind::Dirichlet } else { trans };
    let x_nodes = x_unknowns(left, right, grid.nx);
    let y_nodes = y_unknowns(bc, grid.ny);
    let (mx, my) = (x_nodes.len(), y_nodes.len());
    let mut matrix = BandedMatrix::zeros(mx * my, my, my);

    let q = bc.q_or_zero();
    let y_low_closed = bc.bottom != BcKind::Dirichlet;
    let y_high_closed = bc.top != BcKind::Dirichlet;
    let x_low_closed = matches!(left, TransmissionKind::Robin { .. });
    let x_high_closed = matches!(right, TransmissionKind::Robin { .. });

    for ix in 0..mx {
        let (dx, offx) = line_stencil(
            ix,
            mx,
            x_low_closed,
            x_high_closed,
            robin_p(left),
            robin_p(right),
            grid.hx,
        );
        for iy in 0..my {
            let (dy, offy) = line_stencil(
                iy,
                my,
                y_low_closed,
                y_high_closed,
                robin_coeff(bc.bottom, q),
                robin_coeff(bc.top, q),
                grid.hy,
            );
            let row = ix * my + iy;
            matrix.add(row, row, dx + dy);
            for &(o, c) in &offx {
                let col = (ix as isize + o) as usize * my + iy;
                matrix.add(row, col, c);
            }
            for &(o, c) in &offy {
                let col = ix * my + (iy as isize + o) as usize;
                matrix.add(row, col, c);
            }
        }
    }

    let lu = matrix.clone().factor().map_err(|e| {
        Error::Singular(format!(
            "factorization failed for {bc} with {left:?}/{right:?} ends: {e}"
        ))
    })?;
    Ok(SubdomainOperator {
        grid: *grid,
        bc: *bc,
        transmission: trans,
        end_flags,
        left,
        right,
        x_nodes,
        y_nodes,
        matrix,
        lu,
    })
}

impl SubdomainOperator {
    pub fn grid(&self) -> &SubdomainGrid {
        &self.grid
    }

    pub fn bc(&self) -> &BcPair {
        &self.bc
    }

    pub fn transmission(&self) -> TransmissionKind {
        self.transmission
    }

    pub fn end_flags(&self) -> EndFlags {
        self.end_flags
    }

    /// Condition actually imposed on the left and right x ends.
    pub fn sides(&self) -> (TransmissionKind, TransmissionKind) {
        (self.left, self.right)
    }

    /// Local node indices `i` that are unknowns.
    pub fn x_nodes(&self) -> &[usize] {
        &self.x_nodes
    }

    /// Local node indices `k` that are unknowns.
    pub fn y_nodes(&self) -> &[usize] {
        &self.y_nodes
    }

    pub fn unknowns(&self) -> usize {
        self.x_nodes.len() * self.y_nodes.len()
    }

    /// `A x` for a vector of unknowns.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; x.len()];
        self.matrix.matvec(x, &mut y);
        y
    }

    /// Solves `A x = rhs` in place with the stored factors.
    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        self.lu.solve_in_place(rhs);
    }

    /// Right-hand side for source values `f` at the unknowns (or zero) and
    /// interface data columns `g_left`, `g_right` indexed by y node
    /// `0..=ny+1`. Data on an outer end is ignored (homogeneous Dirichlet).
    pub fn rhs(&self, source: Option<&[f64]>, g_left: Option<&[f64]>, g_right: Option<&[f64]>) -> Vec<f64> {
        let my = self.y_nodes.len();
        let mx = self.x_nodes.len();
        let mut rhs = match source {
            Some(f) => {
                assert_eq!(f.len(), mx * my);
                f.to_vec()
            }
            None => vec![0.0; mx * my],
        };
        let hx = self.grid.hx;
        let inv = 1.0 / (hx * hx);
        let sides = [
            (g_left, self.left, 0usize, self.end_flags.left_outer),
            (g_right, self.right, mx - 1, self.end_flags.right_outer),
        ];
        for (data, kind, ix, outer) in sides {
            let Some(g) = data else { continue };
            if outer {
                continue;
            }
            let weight = match kind {
                // neighbour of the Dirichlet column
                TransmissionKind::Dirichlet => inv,
                // ghost elimination contributes 2 g / h
                TransmissionKind::Robin { .. } => 2.0 / hx,
            };
            for (iy, &k) in self.y_nodes.iter().enumerate() {
                rhs[ix * my + iy] += weight * g[k];
            }
        }
        rhs
    }

    /// Scatters unknowns into a full local node array and fills Dirichlet
    /// transmission columns with their data.
    pub fn scatter(&self, x: &[f64], g_left: Option<&[f64]>, g_right: Option<&[f64]>, field: &mut [f64]) {
        let g = &self.grid;
        assert_eq!(field.len(), g.node_count());
        field.iter_mut().for_each(|v| *v = 0.0);
        let my = self.y_nodes.len();
        for (ix, &i) in self.x_nodes.iter().enumerate() {
            for (iy, &k) in self.y_nodes.iter().enumerate() {
                field[g.node(i, k)] = x[ix * my + iy];
            }
        }
        let sides = [
            (g_left, self.left, 0usize, self.end_flags.left_outer),
            (g_right, self.right, g.nx + 1, self.end_flags.right_outer),
        ];
        for (data, kind, i, outer) in sides {
            if outer || kind != TransmissionKind::Dirichlet {
                continue;
            }
            if let Some(d) = data {
                for &k in &self.y_nodes {
                    field[g.node(i, k)] = d[k];
                }
            }
        }
    }

    /// Gathers the unknowns out of a full local node array.
    pub fn gather(&self, field: &[f64]) -> Vec<f64> {
        let g = &self.grid;
        let mut x = Vec::with_capacity(self.unknowns());
        for &i in &self.x_nodes {
            for &k in &self.y_nodes {
                x.push(field[g.node(i, k)]);
            }
        }
        x
    }
}

/// Which neighbour side a trace is taken for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceSide {
    /// `T_l`: data for the left end of the right neighbour.
    Left,
    /// `T_r`: data for the right end of the left neighbour.
    Right,
}

/// Lagrange weights for value and first derivative at `t` through nodes
/// `0..n` (unit spacing).
fn lagrange_weights(t: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut w = vec![0.0; n];
    let mut dw = vec![0.0; n];
    for m in 0..n {
        let mut denom = 1.0;
        for r in 0..n {
            if r != m {
                denom *= m as f64 - r as f64;
            }
        }
        let mut prod = 1.0;
        for r in 0..n {
            if r != m {
                prod *= t - r as f64;
            }
        }
        w[m] = prod / denom;
        let mut d = 0.0;
        for s in 0..n {
            if s == m {
                continue;
            }
            let mut p = 1.0;
            for r in 0..n {
                if r != m && r != s {
                    p *= t - r as f64;
                }
            }
            d += p;
        }
        dw[m] = d / denom;
    }
    (w, dw)
}

/// Trace of a sender's local field along the vertical line at local
/// abscissa `x_local`, for every y node `0..=ny+1`.
///
/// On a grid line the value is sampled directly and `∂_x u` is the centred
/// difference; off grid lines both come from four-point Lagrange
/// interpolation in x.
pub fn apply_trace(
    grid: &SubdomainGrid,
    field: &[f64],
    x_local: f64,
    side: TraceSide,
    trans: TransmissionKind,
) -> Result<Vec<f64>> {
    let ny2 = grid.ny + 2;
    if field.len() != grid.node_count() {
        return Err(Error::InvalidParameter(format!(
            "field has {} values, grid needs {}",
            field.len(),
            grid.node_count()
        )));
    }
    if !(x_local > 0.0 && x_local < grid.width) {
        return Err(Error::InvalidParameter(format!(
            "trace line x = {x_local} not inside the sender (0, {})",
            grid.width
        )));
    }
    let mut out = vec![0.0; ny2];
    let combine = |v: f64, d: f64| match side {
        TraceSide::Left => trans.left_trace(v, d),
        TraceSide::Right => trans.right_trace(v, d),
    };
    let col = |i: usize| &field[i * ny2..(i + 1) * ny2];

    if let Some(i) = grid.line_index(x_local).filter(|&i| i >= 1 && i <= grid.nx) {
        let (c, lo, hi) = (col(i), col(i - 1), col(i + 1));
        for k in 0..ny2 {
            let slope = (hi[k] - lo[k]) / (2.0 * grid.hx);
            out[k] = combine(c[k], slope);
        }
        return Ok(out);
    }

    let r = x_local / grid.hx;
    let last = grid.nx + 1;
    let start = (r.floor() as isize - 1).clamp(0, last as isize - 3) as usize;
    let (w, dw) = lagrange_weights(r - start as f64, 4);
    for k in 0..ny2 {
        let mut v = 0.0;
        let mut d = 0.0;
        for m in 0..4 {
            let u = field[(start + m) * ny2 + k];
            v += w[m] * u;
            d += dw[m] * u;
        }
        out[k] = combine(v, d / grid.hx);
    }
    Ok(out)
}
