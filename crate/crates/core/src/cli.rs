//! Command-line front end: every dataset and table as CSV or JSON.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::bounds::{self, rho, Convention};
use crate::discretize::GridSpec;
use crate::error::{Error, Result};
use crate::fourier1d::{self, build_mode_iteration, select_convention_default, TransmissionKind, BOUND_SLACK};
use crate::geometry::{BcPair, DomainChain, PairLabel};
use crate::output::{Cell, Dataset, Format};
use crate::schwarz::{
    reference_columns, run_schwarz, table_cell, InitKind, NormKind, RunConfig, TableCell, DEFAULT_MAX_ITER,
    DEFAULT_TOL,
};
use crate::spectral::{eigenmodes, find_root_k, CharKind};

/// Exit status for invalid arguments.
pub const EXIT_USAGE: i32 = 2;
/// Exit status for numerical failures.
pub const EXIT_NUMERICAL: i32 = 3;

const REFERENCE_H: f64 = 1.0 / 51.0;
const TABLE_N: [usize; 8] = [3, 4, 5, 10, 20, 30, 40, 50];

#[derive(Debug, Parser)]
#[command(name = "schwarz", version, about = "Schwarz-method convergence bounds and scalability experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

/// Flags shared by every command; a JSON config file supplies defaults
/// and explicit flags win.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GlobalArgs {
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Bound convention: paper, sqrt or auto.
    #[arg(long, global = true)]
    pub convention: Option<String>,
    /// JSON file with default values for these flags.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Number of subdomains.
    #[arg(long = "N", global = true)]
    #[serde(rename = "N")]
    pub n: Option<usize>,
    /// Subdomain length.
    #[arg(long = "L", global = true)]
    #[serde(rename = "L")]
    pub l: Option<f64>,
    /// Half overlap.
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    /// Robin transmission parameter.
    #[arg(long, global = true)]
    pub p: Option<f64>,
    /// Robin coefficient of the external conditions.
    #[arg(long, global = true)]
    pub q: Option<f64>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long = "max-iter", global = true)]
    #[serde(rename = "max-iter", alias = "max_iter")]
    pub max_iter: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

impl GlobalArgs {
    /// Fills unset flags from the config file, if one was given.
    pub fn merged(self) -> Result<Self> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let file: GlobalArgs = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidParameter(format!("config {}: {e}", path.display())))?;
        Ok(Self {
            out: self.out.or(file.out),
            format: self.format.or(file.format),
            convention: self.convention.or(file.convention),
            config: Some(path),
            n: self.n.or(file.n),
            l: self.l.or(file.l),
            delta: self.delta.or(file.delta),
            p: self.p.or(file.p),
            q: self.q.or(file.q),
            tol: self.tol.or(file.tol),
            max_iter: self.max_iter.or(file.max_iter),
            seed: self.seed.or(file.seed),
        })
    }

    fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TransArg {
    Dirichlet,
    Robin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GridArg {
    /// Counts derived from the mesh width.
    Derived,
    /// 90 x 50 interior points.
    Nx90,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenpairs of the 1D problems in y.
    Eigs {
        /// Pairs to list (default: all six).
        #[arg(long, value_delimiter = ',')]
        bc: Vec<String>,
        #[arg(long, default_value_t = 5)]
        k_max: usize,
    },
    /// Per-pair contraction bounds.
    Bounds,
    /// Exact per-mode radii of the interface iteration next to the bounds.
    Modes {
        /// Eigenvalues to test; defaults to the modes of --bc.
        #[arg(long, value_delimiter = ',')]
        lambda: Vec<f64>,
        #[arg(long, default_value = "DD")]
        bc: String,
        #[arg(long, default_value_t = 5)]
        k_max: usize,
        /// Chain lengths (default: --N or 5).
        #[arg(long, value_delimiter = ',')]
        n_list: Vec<usize>,
        #[arg(long, value_enum, default_value_t = TransArg::Dirichlet)]
        transmission: TransArg,
    },
    /// One 2D Schwarz run; rows are the per-sweep error norms.
    Solve {
        #[arg(long, default_value = "DD")]
        bc: String,
        #[arg(long, value_enum, default_value_t = TransArg::Dirichlet)]
        transmission: TransArg,
        #[command(flatten)]
        grid: GridOpts,
    },
    /// Iteration counts of both methods over chain lengths and pairs.
    Table2 {
        /// Chain lengths.
        #[arg(long, value_delimiter = ',')]
        n_list: Vec<usize>,
        /// Small Robin coefficient of the last column.
        #[arg(long, default_value_t = 0.1)]
        q_small: f64,
        /// Restrict to these column names (e.g. DD,NN).
        #[arg(long, value_delimiter = ',')]
        columns: Vec<String>,
        #[arg(long, value_enum, default_value_t = GridArg::Derived)]
        grid_kind: GridArg,
        /// Error norm; the max norm tracks the reference counts more closely.
        #[arg(long, value_enum, default_value_t = NormArg::Max)]
        norm: NormArg,
        #[arg(long, value_enum, default_value_t = InitArg::Unit)]
        init: InitArg,
    },
    /// First frequencies of the mixed problems as functions of q.
    Fig2left {
        #[command(flatten)]
        q_grid: QGrid,
    },
    /// Per-pair bounds as functions of q.
    Fig2right {
        #[command(flatten)]
        q_grid: QGrid,
    },
    /// Strict ordering chains of the per-pair bounds.
    Ordering {
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.05, 0.1, 0.2])]
        deltas: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.1, 1.0, 10.0, 100.0])]
        qs: Vec<f64>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct GridOpts {
    /// Mesh width (default 1/51 with δ = 10 h).
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long, requires = "ny")]
    pub nx: Option<usize>,
    #[arg(long, requires = "nx")]
    pub ny: Option<usize>,
    #[arg(long, value_enum, default_value_t = NormArg::L2Grid)]
    pub norm: NormArg,
    #[arg(long, value_enum, default_value_t = InitArg::Unit)]
    pub init: InitArg,
}

#[derive(Debug, Clone, Args)]
pub struct QGrid {
    #[arg(long, default_value_t = 1e-3)]
    pub q_min: f64,
    #[arg(long, default_value_t = 1e3)]
    pub q_max: f64,
    #[arg(long, default_value_t = 200)]
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    L2Grid,
    Max,
}

impl From<NormArg> for NormKind {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::L2Grid => NormKind::L2Grid,
            NormArg::Max => NormKind::Max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    Unit,
    Symmetric,
    Zero,
}

impl From<InitArg> for InitKind {
    fn from(i: InitArg) -> Self {
        match i {
            InitArg::Unit => InitKind::Unit,
            InitArg::Symmetric => InitKind::Symmetric,
            InitArg::Zero => InitKind::Zero,
        }
    }
}

/// Maps an error to the process exit status.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidGeometry(_)
        | Error::InvalidParameter(_)
        | Error::GridAlignment(_)
        | Error::Io(_) => EXIT_USAGE,
        Error::NoSignChange { .. }
        | Error::Singular(_)
        | Error::Numerical(_)
        | Error::InsufficientHistory { .. } => EXIT_NUMERICAL,
    }
}

/// Parses `args`, runs the command and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Convention requested on the command line, with `auto` resolved.
#[derive(Debug, Clone, Copy)]
struct ResolvedConvention {
    convention: Convention,
    auto: bool,
}

fn resolve_convention(arg: Option<&str>) -> Result<ResolvedConvention> {
    match arg.map(|s| s.trim().to_ascii_lowercase()) {
        None => resolve_convention(Some("auto")),
        Some(s) if s == "auto" => {
            let evidence = select_convention_default()?;
            let convention = evidence.selected.ok_or_else(|| {
                Error::Numerical("no bound convention dominates the exact mode radii".into())
            })?;
            Ok(ResolvedConvention { convention, auto: true })
        }
        Some(s) => Ok(ResolvedConvention {
            convention: s.parse()?,
            auto: false,
        }),
    }
}

fn echo_convention(d: &mut Dataset, c: ResolvedConvention) {
    d.set("convention", c.convention.to_string());
    d.set("convention_auto", c.auto);
}

fn emit(d: &Dataset, g: &GlobalArgs) -> Result<()> {
    match &g.out {
        Some(path) => {
            let f = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(f);
            d.write(g.format(), &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            d.write(g.format(), &mut lock)?;
        }
    }
    Ok(())
}

/// Runs a parsed command line.
pub fn run(cli: Cli) -> Result<()> {
    let g = cli.global.merged()?;
    let d = match cli.command {
        Command::Eigs { bc, k_max } => cmd_eigs(&g, &bc, k_max)?,
        Command::Bounds => cmd_bounds(&g)?,
        Command::Modes {
            lambda,
            bc,
            k_max,
            n_list,
            transmission,
        } => cmd_modes(&g, &lambda, &bc, k_max, &n_list, transmission)?,
        Command::Solve { bc, transmission, grid } => cmd_solve(&g, &bc, transmission, &grid)?,
        Command::Table2 {
            n_list,
            q_small,
            columns,
            grid_kind,
            norm,
            init,
        } => {
            let opts = TableOpts {
                n_list: if n_list.is_empty() { TABLE_N.to_vec() } else { n_list },
                q_small,
                columns,
                grid_kind,
                norm: norm.into(),
                init: init.into(),
            };
            let (table, cells) = cmd_table2(&g, &opts)?;
            if let Some(out) = &g.out {
                write_companion(out, &cells)?;
            }
            table
        }
        Command::Fig2left { q_grid } => cmd_fig2left(&g, &q_grid)?,
        Command::Fig2right { q_grid } => cmd_fig2right(&g, &q_grid)?,
        Command::Ordering { deltas, qs } => cmd_ordering(&g, &deltas, &qs)?,
    };
    emit(&d, &g)
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

fn transmission(arg: TransArg, p: f64) -> Result<TransmissionKind> {
    match arg {
        TransArg::Dirichlet => Ok(TransmissionKind::Dirichlet),
        TransArg::Robin => TransmissionKind::robin(p),
    }
}

pub fn cmd_eigs(g: &GlobalArgs, labels: &[String], k_max: usize) -> Result<Dataset> {
    let q = positive("q", g.q.unwrap_or(1.0))?;
    let pairs: Vec<BcPair> = if labels.is_empty() {
        PairLabel::ALL
            .iter()
            .map(|&l| BcPair::from_label(l, q))
            .collect::<Result<_>>()?
    } else {
        labels.iter().map(|s| BcPair::parse(s, q)).collect::<Result<_>>()?
    };
    let mut d = Dataset::new(&["pair", "q", "k", "frequency", "eigenvalue", "norm_const"], None);
    d.set("command", "eigs");
    d.set("q", q);
    d.set("k_max", k_max);
    for pair in &pairs {
        for m in eigenmodes(pair, k_max, bounds::ROOT_TOL)? {
            d.push(vec![
                pair.to_string().into(),
                pair.q.into(),
                m.index.into(),
                m.freq.into(),
                m.eigenvalue.into(),
                m.norm_const.into(),
            ]);
        }
    }
    Ok(d)
}

pub fn cmd_bounds(g: &GlobalArgs) -> Result<Dataset> {
    let conv = resolve_convention(g.convention.as_deref())?;
    let l = g.l.unwrap_or(1.0);
    let delta = g.delta.unwrap_or(0.1);
    let q = positive("q", g.q.unwrap_or(10.0))?;
    let mut d = Dataset::new(&["pair", "q", "first_eigenvalue", "decay", "rho"], None);
    d.set("command", "bounds");
    d.set("L", l);
    d.set("delta", delta);
    d.set("q", q);
    echo_convention(&mut d, conv);
    for label in PairLabel::ALL {
        let qq = label.has_robin().then_some(q);
        let lambda = bounds::first_eigenvalue(label, qq)?;
        let b = bounds::pair_bound(label, delta, l, qq, conv.convention)?;
        d.push(vec![
            label.to_string().into(),
            qq.into(),
            lambda.into(),
            b.decay.into(),
            b.value.into(),
        ]);
    }
    Ok(d)
}

pub fn cmd_modes(
    g: &GlobalArgs,
    lambdas: &[f64],
    bc: &str,
    k_max: usize,
    n_list: &[usize],
    trans: TransArg,
) -> Result<Dataset> {
    let l = g.l.unwrap_or(1.0);
    let delta = g.delta.unwrap_or(0.1);
    let p = g.p.unwrap_or(10.0);
    let q = g.q.unwrap_or(10.0);
    let trans = transmission(trans, p)?;
    let lambdas: Vec<f64> = if lambdas.is_empty() {
        let pair = BcPair::parse(bc, q)?;
        eigenmodes(&pair, k_max, bounds::ROOT_TOL)?
            .iter()
            .map(|m| m.eigenvalue)
            .collect()
    } else {
        lambdas.to_vec()
    };
    if let Some(bad) = lambdas.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
        return Err(Error::InvalidParameter(format!("eigenvalue must be >= 0, got {bad}")));
    }
    let n_list: Vec<usize> = if n_list.is_empty() {
        vec![g.n.unwrap_or(5)]
    } else {
        n_list.to_vec()
    };
    let mut d = Dataset::new(
        &[
            "N",
            "lambda",
            "transmission",
            "radius",
            "bound_paper",
            "bound_sqrt",
            "holds_paper",
            "holds_sqrt",
        ],
        None,
    );
    d.set("command", "modes");
    d.set("L", l);
    d.set("delta", delta);
    d.set("transmission", trans);
    d.set("bound_slack", BOUND_SLACK);
    for &n in &n_list {
        let chain = DomainChain::new(n, l, delta)?;
        for &lambda in &lambdas {
            let radius = build_mode_iteration(&chain, lambda, trans)?.spectral_radius;
            let bp = rho(Convention::Paper.decay(lambda), delta, l);
            let bs = rho(Convention::Sqrt.decay(lambda), delta, l);
            d.push(vec![
                n.into(),
                lambda.into(),
                trans.short_name().into(),
                radius.into(),
                bp.into(),
                bs.into(),
                (radius <= bp + BOUND_SLACK).into(),
                (radius <= bs + BOUND_SLACK).into(),
            ]);
        }
    }
    Ok(d)
}

fn grid_spec(opts: &GridOpts, default_h: f64) -> GridSpec {
    match (opts.nx, opts.ny) {
        (Some(nx), Some(ny)) => GridSpec::Counts { nx, ny },
        _ => GridSpec::MeshWidth(opts.h.unwrap_or(default_h)),
    }
}

fn echo_run_config(d: &mut Dataset, cfg: &RunConfig) {
    d.set("N", cfg.n_sub);
    d.set("L", cfg.sub_len);
    d.set("delta", cfg.half_overlap);
    d.set("bc", cfg.bc.to_string());
    d.set("transmission", cfg.transmission);
    d.set("grid", cfg.grid);
    d.set("tol", cfg.tol);
    d.set("max_iter", cfg.max_iter);
    d.set("norm", cfg.norm.to_string());
    d.set("init", cfg.init.to_string());
}

pub fn cmd_solve(g: &GlobalArgs, bc: &str, trans: TransArg, opts: &GridOpts) -> Result<Dataset> {
    let h = opts.h.unwrap_or(REFERENCE_H);
    let seed = g.seed.unwrap_or(0);
    let cfg = RunConfig {
        n_sub: g.n.unwrap_or(3),
        sub_len: g.l.unwrap_or(1.0),
        half_overlap: g.delta.unwrap_or(10.0 * h),
        bc: BcPair::parse(bc, g.q.unwrap_or(10.0))?,
        transmission: transmission(trans, g.p.unwrap_or(10.0))?,
        grid: grid_spec(opts, h),
        tol: g.tol.unwrap_or(DEFAULT_TOL),
        max_iter: g.max_iter.unwrap_or(DEFAULT_MAX_ITER),
        seed,
        norm: opts.norm.into(),
        init: opts.init.into(),
    };
    let rep = run_schwarz(cfg)?;
    let mut d = Dataset::new(&["sweep", "error_norm", "ratio"], Some(seed));
    d.set("command", "solve");
    echo_run_config(&mut d, &cfg);
    d.set("iters", rep.iters_label());
    d.set("exceeded", rep.exceeded());
    d.set("observed_rho", rep.observed_rho);
    let norms = rep.norms();
    for (n, w) in norms.iter().enumerate() {
        let ratio = (n > 0 && norms[n - 1] > 0.0).then(|| w / norms[n - 1]);
        d.push(vec![n.into(), (*w).into(), ratio.into()]);
    }
    Ok(d)
}

/// Options of the scalability table.
#[derive(Debug, Clone)]
pub struct TableOpts {
    pub n_list: Vec<usize>,
    pub q_small: f64,
    pub columns: Vec<String>,
    pub grid_kind: GridArg,
    pub norm: NormKind,
    pub init: InitKind,
}

/// Runs the table; CSV rows are `N` by column pairs `"PSM - OSM"`, JSON
/// rows are one per cell with explicit iteration counts and cap flags.
pub fn cmd_table2(g: &GlobalArgs, opts: &TableOpts) -> Result<(Dataset, Vec<TableCell>)> {
    let p = g.p.unwrap_or(10.0);
    let q = g.q.unwrap_or(10.0);
    let seed = g.seed.unwrap_or(0);
    let l = g.l.unwrap_or(1.0);
    let h = l / 51.0;
    let delta = g.delta.unwrap_or(10.0 * h);
    let mut columns = reference_columns(q, opts.q_small)?;
    if !opts.columns.is_empty() {
        let wanted: Vec<String> = opts.columns.iter().map(|c| c.trim().to_ascii_uppercase()).collect();
        columns.retain(|c| wanted.contains(&c.name().to_ascii_uppercase()));
        if columns.is_empty() {
            return Err(Error::InvalidParameter(format!("no column matches {:?}", opts.columns)));
        }
    }
    let grids: Vec<(&str, GridSpec)> = match opts.grid_kind {
        GridArg::Derived => vec![("derived", GridSpec::MeshWidth(h))],
        GridArg::Nx90 => vec![("nx90", GridSpec::Counts { nx: 90, ny: 50 })],
        GridArg::Both => vec![
            ("derived", GridSpec::MeshWidth(h)),
            ("nx90", GridSpec::Counts { nx: 90, ny: 50 }),
        ],
    };

    let mut cells = Vec::new();
    let mut table_rows = Vec::new();
    for &(grid_name, grid) in &grids {
        for &n in &opts.n_list {
            let mut row = Vec::new();
            for col in &columns {
                let base = RunConfig {
                    n_sub: n,
                    sub_len: l,
                    half_overlap: delta,
                    bc: col.bc,
                    transmission: TransmissionKind::Dirichlet,
                    grid,
                    tol: g.tol.unwrap_or(DEFAULT_TOL),
                    max_iter: g.max_iter.unwrap_or(DEFAULT_MAX_ITER),
                    seed,
                    norm: opts.norm,
                    init: opts.init,
                };
                let cell = table_cell(base, col, n, p)?;
                row.push(cell.clone());
                cells.push((grid_name, cell));
            }
            table_rows.push((grid_name, n, row));
        }
    }

    let mut d = match g.format() {
        Format::Csv => {
            let mut names = vec!["grid".to_string(), "N".to_string()];
            names.extend(columns.iter().map(|c| c.name()));
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let mut d = Dataset::new(&refs, Some(seed));
            for (grid_name, n, row) in &table_rows {
                let mut r: Vec<Cell> = vec![(*grid_name).into(), (*n).into()];
                r.extend(row.iter().map(|c| Cell::from(c.pair_label())));
                d.push(r);
            }
            d
        }
        Format::Json => {
            let mut d = Dataset::new(
                &[
                    "grid",
                    "N",
                    "column",
                    "psm_iters",
                    "psm_exceeded",
                    "osm_iters",
                    "osm_exceeded",
                    "psm_observed_rho",
                    "osm_observed_rho",
                    "pair",
                ],
                Some(seed),
            );
            for (grid_name, c) in &cells {
                d.push(vec![
                    (*grid_name).into(),
                    c.n_sub.into(),
                    c.column.clone().into(),
                    c.psm.iters().into(),
                    c.psm.exceeded().into(),
                    c.osm.iters().into(),
                    c.osm.exceeded().into(),
                    c.psm.observed_rho.into(),
                    c.osm.observed_rho.into(),
                    c.pair_label().into(),
                ]);
            }
            d
        }
    };
    d.set("command", "table2");
    d.set("L", l);
    d.set("delta", delta);
    d.set("h", h);
    d.set("p", p);
    d.set("q", q);
    d.set("q_small", opts.q_small);
    d.set("tol", g.tol.unwrap_or(DEFAULT_TOL));
    d.set("max_iter", g.max_iter.unwrap_or(DEFAULT_MAX_ITER));
    d.set("norm", opts.norm.to_string());
    d.set("init", opts.init.to_string());
    d.set("n_list", &opts.n_list);
    Ok((d, cells.into_iter().map(|(_, c)| c).collect()))
}

/// Full reports next to the table, at `<out>.reports.json`.
fn write_companion(out: &Path, cells: &[TableCell]) -> Result<()> {
    let mut name = out.as_os_str().to_owned();
    name.push(".reports.json");
    let path = PathBuf::from(name);
    let f = File::create(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::to_writer(BufWriter::new(f), cells).map_err(|e| Error::Io(e.to_string()))
}

fn log_grid(q: &QGrid) -> Result<Vec<f64>> {
    positive("q_min", q.q_min)?;
    positive("q_max", q.q_max)?;
    if q.points < 2 || q.q_max <= q.q_min {
        return Err(Error::InvalidParameter(format!(
            "need q_min < q_max and at least 2 points, got [{}, {}] x {}",
            q.q_min, q.q_max, q.points
        )));
    }
    let (a, b) = (q.q_min.ln(), q.q_max.ln());
    let n = q.points - 1;
    Ok((0..=n)
        .map(|i| match i {
            0 => q.q_min,
            i if i == n => q.q_max,
            i => (a + (b - a) * i as f64 / n as f64).exp(),
        })
        .collect())
}

fn first_freq(kind: CharKind, q: f64) -> Result<f64> {
    find_root_k(kind, q, 1, bounds::ROOT_TOL)
}

pub fn cmd_fig2left(_g: &GlobalArgs, grid: &QGrid) -> Result<Dataset> {
    let qs = log_grid(grid)?;
    let mut d = Dataset::new(&["q", "mu1", "nu1", "tau1"], None);
    d.set("command", "fig2left");
    d.set("q_min", grid.q_min);
    d.set("q_max", grid.q_max);
    d.set("points", grid.points);
    for q in qs {
        d.push(vec![
            q.into(),
            first_freq(CharKind::DR, q)?.into(),
            first_freq(CharKind::NR, q)?.into(),
            first_freq(CharKind::RR, q)?.into(),
        ]);
    }
    Ok(d)
}

pub fn cmd_fig2right(g: &GlobalArgs, grid: &QGrid) -> Result<Dataset> {
    let conv = resolve_convention(g.convention.as_deref())?;
    let l = g.l.unwrap_or(1.0);
    let delta = g.delta.unwrap_or(0.1);
    let qs = log_grid(grid)?;
    let mut d = Dataset::new(&["q", "rho_DR", "rho_NR", "rho_DD", "rho_DN", "convention"], None);
    d.set("command", "fig2right");
    d.set("L", l);
    d.set("delta", delta);
    d.set("q_min", grid.q_min);
    d.set("q_max", grid.q_max);
    d.set("points", grid.points);
    echo_convention(&mut d, conv);
    let c = conv.convention;
    let dd = bounds::pair_bound(PairLabel::DD, delta, l, None, c)?.value;
    let dn = bounds::pair_bound(PairLabel::DN, delta, l, None, c)?.value;
    for q in qs {
        d.push(vec![
            q.into(),
            bounds::pair_bound(PairLabel::DR, delta, l, Some(q), c)?.value.into(),
            bounds::pair_bound(PairLabel::NR, delta, l, Some(q), c)?.value.into(),
            dd.into(),
            dn.into(),
            c.to_string().into(),
        ]);
    }
    Ok(d)
}

pub fn cmd_ordering(g: &GlobalArgs, deltas: &[f64], qs: &[f64]) -> Result<Dataset> {
    let l = g.l.unwrap_or(1.0);
    let conventions: Vec<Convention> = match g.convention.as_deref() {
        None => Convention::ALL.to_vec(),
        Some(s) => vec![resolve_convention(Some(s))?.convention],
    };
    let mut d = Dataset::new(
        &["convention", "delta", "q", "lower", "upper", "lower_value", "upper_value", "margin", "holds"],
        None,
    );
    d.set("command", "ordering");
    d.set("L", l);
    d.set("margin_threshold", bounds::ORDER_MARGIN);
    let mut all = true;
    for &c in &conventions {
        for &delta in deltas {
            for &q in qs {
                let rep = bounds::ordering_check(delta, l, q, c)?;
                all &= rep.all_hold();
                for ineq in rep.chain_mixed.iter().chain(&rep.chain_robin) {
                    d.push(vec![
                        c.to_string().into(),
                        delta.into(),
                        q.into(),
                        ineq.lower.clone().into(),
                        ineq.upper.clone().into(),
                        ineq.lower_value.into(),
                        ineq.upper_value.into(),
                        ineq.margin.into(),
                        ineq.holds.into(),
                    ]);
                }
            }
        }
    }
    d.set("all_hold", all);
    Ok(d)
}

/// Evidence behind `--convention auto`, as a dataset.
pub fn convention_evidence() -> Result<Dataset> {
    let ev = fourier1d::select_convention_default()?;
    let mut d = Dataset::new(&["N", "lambda", "transmission", "convention", "radius", "bound", "holds"], None);
    d.set("selected", ev.selected.map(|c| c.to_string()));
    for c in &ev.cases {
        d.push(vec![
            c.n_sub.into(),
            c.lambda.into(),
            c.transmission.short_name().into(),
            c.convention.to_string().into(),
            c.radius.into(),
            c.bound.into(),
            c.bound_holds.into(),
        ]);
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("schwarz").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn paper_symbol_flags_parse() {
        let cli = parse(&["table2", "--N", "3", "--L", "1", "--delta", "0.2", "--max-iter", "5", "--seed", "9"]);
        assert_eq!(cli.global.n, Some(3));
        assert_eq!(cli.global.l, Some(1.0));
        assert_eq!(cli.global.max_iter, Some(5));
        assert_eq!(cli.global.seed, Some(9));
    }

    #[test]
    fn bad_arguments_exit_with_usage_code() {
        assert_eq!(main_with_args(["schwarz", "nonsense"]), EXIT_USAGE);
        assert_eq!(main_with_args(["schwarz", "bounds", "--delta", "0.7"]), EXIT_USAGE);
        assert_eq!(main_with_args(["schwarz", "bounds", "--convention", "bogus"]), EXIT_USAGE);
    }

    #[test]
    fn config_file_is_overridden_by_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"delta": 0.2, "q": 3.0, "max-iter": 7}"#).unwrap();
        let cli = parse(&["bounds", "--config", path.to_str().unwrap(), "--q", "5"]);
        let g = cli.global.merged().unwrap();
        assert_eq!(g.delta, Some(0.2));
        assert_eq!(g.q, Some(5.0));
        assert_eq!(g.max_iter, Some(7));
    }

    #[test]
    fn log_grid_endpoints() {
        let q = log_grid(&QGrid { q_min: 1e-3, q_max: 1e3, points: 200 }).unwrap();
        assert_eq!(q.len(), 200);
        assert_eq!(q[0], 1e-3);
        assert_eq!(q[199], 1e3);
        assert!(q.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn single_row_table() {
        let g = GlobalArgs {
            max_iter: Some(60),
            ..GlobalArgs::default()
        };
        let opts = TableOpts {
            n_list: vec![3],
            q_small: 0.1,
            columns: vec!["DD".into()],
            grid_kind: GridArg::Derived,
            norm: NormKind::Max,
            init: InitKind::Unit,
        };
        let (d, cells) = cmd_table2(&g, &opts).unwrap();
        assert_eq!(d.rows.len(), 1);
        assert_eq!(d.columns, vec!["grid", "N", "DD"]);
        assert_eq!(cells.len(), 1);
    }
}
