//! The 2D parallel / optimized Schwarz iteration on the chain.
//!
//! Runs are in error-equation form: zero source, zero external data, so
//! each iterate is its own error. Every sweep solves all subdomains from
//! the traces of the previous iterate.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discretize::{
    apply_trace, assemble_operator, make_grid, EndFlags, GridSpec, SubdomainGrid, SubdomainOperator,
    TraceSide,
};
use crate::error::{Error, Result};
use crate::fourier1d::TransmissionKind;
use crate::geometry::{BcPair, DomainChain, PairLabel};

/// Default iteration cap.
pub const DEFAULT_MAX_ITER: usize = 401;
/// Default stopping tolerance on the error norm.
pub const DEFAULT_TOL: f64 = 1e-6;
/// Sweeps averaged by [`IterationReport::observed_rho`].
pub const RHO_WINDOW: usize = 10;

/// Global error norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    /// `sqrt(hx hy Σ u²)` over every subdomain's interior x lines.
    #[default]
    L2Grid,
    /// Largest absolute nodal value over the same nodes.
    Max,
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormKind::L2Grid => "l2_grid",
            NormKind::Max => "max",
        })
    }
}

/// Distribution of the initial iterate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    /// Uniform on `[0, 1]`.
    #[default]
    Unit,
    /// Uniform on `[-1, 1]`.
    Symmetric,
    /// All zeros.
    Zero,
}

impl fmt::Display for InitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InitKind::Unit => "unit",
            InitKind::Symmetric => "symmetric",
            InitKind::Zero => "zero",
        })
    }
}

/// Everything that determines one Schwarz run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub n_sub: usize,
    pub sub_len: f64,
    pub half_overlap: f64,
    pub bc: BcPair,
    pub transmission: TransmissionKind,
    pub grid: GridSpec,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    #[serde(default)]
    pub norm: NormKind,
    #[serde(default)]
    pub init: InitKind,
}

impl RunConfig {
    /// Reference setting: `L = 1`, `h = 1/51`, `δ = 10 h`, tolerance `1e-6`,
    /// at most 401 sweeps.
    pub fn reference(n_sub: usize, bc: BcPair, transmission: TransmissionKind) -> Self {
        let h = 1.0 / 51.0;
        Self {
            n_sub,
            sub_len: 1.0,
            half_overlap: 10.0 * h,
            bc,
            transmission,
            grid: GridSpec::MeshWidth(h),
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            seed: 0,
            norm: NormKind::L2Grid,
            init: InitKind::Unit,
        }
    }

    pub fn validate(&self) -> Result<DomainChain> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidParameter(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be at least 1".into()));
        }
        DomainChain::new(self.n_sub, self.sub_len, self.half_overlap)
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxIter,
}

/// Outcome of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationReport {
    pub config: RunConfig,
    /// Sweeps performed.
    pub sweeps: usize,
    pub terminated: Termination,
    /// Norm of the initial iterate.
    pub initial_norm: f64,
    /// Norm after each sweep; `error_history[n - 1]` follows sweep `n`.
    pub error_history: Vec<f64>,
    /// Geometric-mean contraction over the last sweeps, when there are any.
    pub observed_rho: Option<f64>,
}

impl IterationReport {
    /// Sweeps needed to reach the tolerance, `None` when the cap was hit.
    pub fn iters(&self) -> Option<usize> {
        (self.terminated == Termination::Converged).then_some(self.sweeps)
    }

    /// Iteration count, or `>cap` when the cap was hit.
    pub fn iters_label(&self) -> String {
        match self.iters() {
            Some(n) => n.to_string(),
            None => format!(">{}", self.config.max_iter),
        }
    }

    pub fn exceeded(&self) -> bool {
        self.terminated == Termination::MaxIter
    }

    /// Initial norm followed by the per-sweep history.
    pub fn norms(&self) -> Vec<f64> {
        std::iter::once(self.initial_norm)
            .chain(self.error_history.iter().copied())
            .collect()
    }

    pub fn final_norm(&self) -> f64 {
        self.error_history.last().copied().unwrap_or(self.initial_norm)
    }
}

/// Geometric mean of the last `window` successive ratios of `history`.
pub fn observed_contraction(history: &[f64], window: usize) -> Result<f64> {
    if window == 0 {
        return Err(Error::InvalidParameter("window must be at least 1".into()));
    }
    if history.len() < window + 1 {
        return Err(Error::InsufficientHistory {
            needed: window + 1,
            available: history.len(),
        });
    }
    let tail = &history[history.len() - window - 1..];
    let positive = tail.iter().filter(|&&v| v > 0.0 && v.is_finite()).count();
    if positive != tail.len() {
        return Err(Error::InsufficientHistory {
            needed: window + 1,
            available: positive,
        });
    }
    let first = tail[0];
    let last = tail[window];
    Ok(((last / first).ln() / window as f64).exp())
}

/// Subdomain grids and shared operators for one configuration.
pub struct SchwarzSolver {
    config: RunConfig,
    chain: DomainChain,
    grids: Vec<SubdomainGrid>,
    ops: Vec<Arc<SubdomainOperator>>,
}

impl SchwarzSolver {
    pub fn new(config: RunConfig) -> Result<Self> {
        let chain = config.validate()?;
        let n = chain.n_sub();
        let mut cache: HashMap<EndFlags, Arc<SubdomainOperator>> = HashMap::new();
        let mut grids = Vec::with_capacity(n);
        let mut ops = Vec::with_capacity(n);
        for j in 1..=n {
            let grid = make_grid(&chain, j, config.grid)?;
            let flags = EndFlags::for_subdomain(j, n);
            let op = match cache.get(&flags) {
                Some(op) => Arc::clone(op),
                None => {
                    let op = Arc::new(assemble_operator(&grid, &config.bc, config.transmission, flags)?);
                    cache.insert(flags, Arc::clone(&op));
                    op
                }
            };
            grids.push(grid);
            ops.push(op);
        }
        Ok(Self {
            config,
            chain,
            grids,
            ops,
        })
    }

    pub fn chain(&self) -> &DomainChain {
        &self.chain
    }

    pub fn grid(&self, j: usize) -> &SubdomainGrid {
        &self.grids[j - 1]
    }

    pub fn operator(&self, j: usize) -> &Arc<SubdomainOperator> {
        &self.ops[j - 1]
    }

    /// Number of distinct factored operators in use.
    pub fn distinct_operators(&self) -> usize {
        let mut ptrs: Vec<*const SubdomainOperator> = self.ops.iter().map(Arc::as_ptr).collect();
        ptrs.sort();
        ptrs.dedup();
        ptrs.len()
    }

    /// Seeded initial iterate, one stream consumed in subdomain order.
    pub fn initial_fields(&self) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        self.grids
            .iter()
            .zip(&self.ops)
            .map(|(g, op)| {
                let mut field = vec![0.0; g.node_count()];
                for &i in op.x_nodes() {
                    for &k in op.y_nodes() {
                        field[g.node(i, k)] = match self.config.init {
                            InitKind::Unit => rng.gen_range(0.0..=1.0),
                            InitKind::Symmetric => rng.gen_range(-1.0..=1.0),
                            InitKind::Zero => 0.0,
                        };
                    }
                }
                field
            })
            .collect()
    }

    /// One parallel sweep: every subdomain solved from `fields`.
    pub fn sweep(&self, fields: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        let n = self.chain.n_sub();
        let trans = self.config.transmission;
        (0..n)
            .into_par_iter()
            .map(|jj| {
                let g_left = if jj > 0 {
                    let sender = &self.grids[jj - 1];
                    Some(apply_trace(
                        sender,
                        &fields[jj - 1],
                        sender.left_interface_offset,
                        TraceSide::Left,
                        trans,
                    )?)
                } else {
                    None
                };
                let g_right = if jj + 1 < n {
                    let sender = &self.grids[jj + 1];
                    Some(apply_trace(
                        sender,
                        &fields[jj + 1],
                        sender.right_interface_offset,
                        TraceSide::Right,
                        trans,
                    )?)
                } else {
                    None
                };
                let op = &self.ops[jj];
                let mut x = op.rhs(None, g_left.as_deref(), g_right.as_deref());
                op.solve_in_place(&mut x);
                let mut field = vec![0.0; self.grids[jj].node_count()];
                op.scatter(&x, g_left.as_deref(), g_right.as_deref(), &mut field);
                Ok(field)
            })
            .collect()
    }

    /// Global error norm of a set of subdomain fields.
    pub fn norm(&self, fields: &[Vec<f64>]) -> f64 {
        let mut sum = 0.0;
        let mut max = 0.0f64;
        for ((g, op), field) in self.grids.iter().zip(&self.ops).zip(fields) {
            for i in 1..=g.nx {
                for &k in op.y_nodes() {
                    let v = field[g.node(i, k)];
                    sum += v * v;
                    max = max.max(v.abs());
                }
            }
        }
        match self.config.norm {
            NormKind::L2Grid => {
                let g = &self.grids[0];
                (g.hx * g.hy * sum).sqrt()
            }
            NormKind::Max => max,
        }
    }

    /// Iterates until the norm drops below the tolerance or the cap.
    pub fn run(&self) -> Result<IterationReport> {
        let cfg = self.config;
        let mut fields = self.initial_fields();
        let initial_norm = self.norm(&fields);
        let mut history = Vec::new();
        let mut terminated = Termination::MaxIter;
        if initial_norm < cfg.tol {
            terminated = Termination::Converged;
        } else {
            for sweep in 1..=cfg.max_iter {
                fields = self.sweep(&fields)?;
                let e = self.norm(&fields);
                if !e.is_finite() {
                    return Err(Error::Numerical(format!(
                        "error norm became {e} at sweep {sweep} ({} {}, N = {})",
                        cfg.bc,
                        cfg.transmission.short_name(),
                        cfg.n_sub
                    )));
                }
                history.push(e);
                if e < cfg.tol {
                    terminated = Termination::Converged;
                    break;
                }
            }
        }
        let mut norms = Vec::with_capacity(history.len() + 1);
        norms.push(initial_norm);
        norms.extend_from_slice(&history);
        let window = RHO_WINDOW.min(norms.len().saturating_sub(1));
        let observed_rho = if window == 0 {
            None
        } else {
            observed_contraction(&norms, window).ok()
        };
        Ok(IterationReport {
            config: cfg,
            sweeps: history.len(),
            terminated,
            initial_norm,
            error_history: history,
            observed_rho,
        })
    }
}

/// Runs one configuration to completion.
pub fn run_schwarz(config: RunConfig) -> Result<IterationReport> {
    SchwarzSolver::new(config)?.run()
}

/// One run per chain length with everything else (seed included) fixed.
pub fn scalability_sweep(base: RunConfig, n_list: &[usize]) -> Result<Vec<IterationReport>> {
    if n_list.is_empty() {
        return Err(Error::InvalidParameter("empty list of subdomain counts".into()));
    }
    if let Some(&bad) = n_list.iter().find(|&&n| n < 2) {
        return Err(Error::InvalidParameter(format!("need at least 2 subdomains, got {bad}")));
    }
    n_list
        .iter()
        .map(|&n| run_schwarz(RunConfig { n_sub: n, ..base }))
        .collect()
}

/// One column of the scalability table: an external boundary pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableColumn {
    pub bc: BcPair,
}

impl TableColumn {
    pub fn name(&self) -> String {
        let label = self.bc.label();
        match self.bc.q {
            Some(q) if label.has_robin() => format!("{label}({q})"),
            _ => label.to_string(),
        }
    }
}

/// The seven reference columns: DD, DR, DN, RR, NR, NN with `q_main`, and
/// RR again with `q_small`.
pub fn reference_columns(q_main: f64, q_small: f64) -> Result<Vec<TableColumn>> {
    let labels = [
        (PairLabel::DD, q_main),
        (PairLabel::DR, q_main),
        (PairLabel::DN, q_main),
        (PairLabel::RR, q_main),
        (PairLabel::NR, q_main),
        (PairLabel::NN, q_main),
        (PairLabel::RR, q_small),
    ];
    labels
        .iter()
        .map(|&(label, q)| Ok(TableColumn { bc: BcPair::from_label(label, q)? }))
        .collect()
}

/// PSM and OSM reports for one table cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableCell {
    pub n_sub: usize,
    pub column: String,
    pub psm: IterationReport,
    pub osm: IterationReport,
}

impl TableCell {
    /// `"PSM - OSM"` iteration pair.
    pub fn pair_label(&self) -> String {
        format!("{} - {}", self.psm.iters_label(), self.osm.iters_label())
    }
}

/// Runs both methods for one column and chain length; `base` supplies
/// everything except `n_sub`, `bc` and `transmission`.
pub fn table_cell(base: RunConfig, column: &TableColumn, n_sub: usize, p: f64) -> Result<TableCell> {
    let psm = run_schwarz(RunConfig {
        n_sub,
        bc: column.bc,
        transmission: TransmissionKind::Dirichlet,
        ..base
    })?;
    let osm = run_schwarz(RunConfig {
        n_sub,
        bc: column.bc,
        transmission: TransmissionKind::robin(p)?,
        ..base
    })?;
    Ok(TableCell {
        n_sub,
        column: column.name(),
        psm,
        osm,
    })
}
