use schwarz_scaling::discretize::{
    apply_trace, assemble_operator, make_grid, EndFlags, GridSpec, SubdomainGrid, SubdomainOperator, TraceSide,
};
use schwarz_scaling::fourier1d::TransmissionKind;
use schwarz_scaling::geometry::{BcPair, DomainChain, PairLabel};
use schwarz_scaling::spectral::{first_mode, EigenMode};

const A: f64 = 2.1;
const B: f64 = 0.3;

fn chain() -> DomainChain {
    DomainChain::new(3, 1.0, 0.25).unwrap()
}

fn grid(cells_x: usize, cells_y: usize) -> SubdomainGrid {
    make_grid(&chain(), 2, GridSpec::Counts { nx: cells_x - 1, ny: cells_y - 1 }).unwrap()
}

/// `u = sin(A x' + B) φ(y)` with `φ` an eigenfunction of the pair, so that
/// `-Δu = (A² + λ) u`.
fn exact(mode: &EigenMode, x_local: f64, y: f64) -> (f64, f64) {
    let phi = mode.eval(y).unwrap();
    ((A * x_local + B).sin() * phi, A * (A * x_local + B).cos() * phi)
}

/// Max nodal error of the discrete solve for one pair and x closure.
fn solve_error(label: PairLabel, trans: TransmissionKind, cells_x: usize, cells_y: usize) -> f64 {
    let pair = BcPair::from_label(label, 3.0).unwrap();
    let mode = first_mode(&pair, 1e-15).unwrap();
    let g = grid(cells_x, cells_y);
    let op = assemble_operator(&g, &pair, trans, EndFlags::default()).unwrap();
    let shift = A * A + mode.eigenvalue;

    let mut f = Vec::with_capacity(op.unknowns());
    for &i in op.x_nodes() {
        for &k in op.y_nodes() {
            f.push(shift * exact(&mode, i as f64 * g.hx, g.y_at(k)).0);
        }
    }
    let side_data = |x: f64, sign: f64| -> Vec<f64> {
        (0..g.ny + 2)
            .map(|k| {
                let (v, d) = exact(&mode, x, g.y_at(k));
                match trans {
                    TransmissionKind::Dirichlet => v,
                    TransmissionKind::Robin { p } => p * v + sign * d,
                }
            })
            .collect()
    };
    let gl = side_data(0.0, -1.0);
    let gr = side_data(g.width, 1.0);
    let mut x = op.rhs(Some(&f), Some(&gl), Some(&gr));
    op.solve_in_place(&mut x);

    let mut err = 0.0f64;
    let mut idx = 0;
    for &i in op.x_nodes() {
        for &k in op.y_nodes() {
            let u = exact(&mode, i as f64 * g.hx, g.y_at(k)).0;
            err = err.max((x[idx] - u).abs());
            idx += 1;
        }
    }
    err
}

fn orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[test]
fn manufactured_dirichlet_solution_converges_at_second_order() {
    // u = sin(π x'/W) sin(π y) on the all-Dirichlet subdomain
    let pair = BcPair::from_label(PairLabel::DD, 0.0).unwrap();
    let mut errors = Vec::new();
    for m in [1, 2, 4] {
        let g = grid(24 * m, 16 * m);
        let op = assemble_operator(&g, &pair, TransmissionKind::Dirichlet, EndFlags { left_outer: true, right_outer: true })
            .unwrap();
        let w = g.width;
        let u = |i: usize, k: usize| (std::f64::consts::PI * i as f64 * g.hx / w).sin() * (std::f64::consts::PI * g.y_at(k)).sin();
        let shift = std::f64::consts::PI.powi(2) * (1.0 / (w * w) + 1.0);
        let f: Vec<f64> = op
            .x_nodes()
            .iter()
            .flat_map(|&i| op.y_nodes().iter().map(move |&k| (i, k)))
            .map(|(i, k)| shift * u(i, k))
            .collect();
        let mut x = op.rhs(Some(&f), None, None);
        op.solve_in_place(&mut x);
        let mut idx = 0;
        let mut err = 0.0f64;
        for &i in op.x_nodes() {
            for &k in op.y_nodes() {
                err = err.max((x[idx] - u(i, k)).abs());
                idx += 1;
            }
        }
        errors.push(err);
    }
    for o in orders(&errors) {
        assert!((1.8..=2.2).contains(&o), "orders {:?} from errors {errors:?}", orders(&errors));
    }
}

#[test]
fn every_pair_and_closure_is_second_order() {
    let robin = TransmissionKind::robin(10.0).unwrap();
    for label in PairLabel::ALL {
        for trans in [TransmissionKind::Dirichlet, robin] {
            let errors: Vec<f64> = [1, 2, 4].iter().map(|&m| solve_error(label, trans, 24 * m, 16 * m)).collect();
            let o = orders(&errors);
            assert!(
                o.iter().all(|v| (1.8..=2.2).contains(v)),
                "{label} {}: orders {o:?} errors {errors:?}",
                trans.short_name()
            );
        }
    }
}

fn residual_ratio(op: &SubdomainOperator, b: &[f64]) -> f64 {
    let mut x = b.to_vec();
    op.solve_in_place(&mut x);
    let r = op.apply(&x);
    let num: f64 = r.iter().zip(b).map(|(a, c)| (a - c).powi(2)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    num / den
}

#[test]
fn factorization_is_reused_across_solves() {
    let chain = DomainChain::new(4, 1.0, 10.0 / 51.0).unwrap();
    let g = make_grid(&chain, 2, GridSpec::MeshWidth(1.0 / 51.0)).unwrap();
    let pair = BcPair::from_label(PairLabel::NR, 10.0).unwrap();
    let op = assemble_operator(&g, &pair, TransmissionKind::robin(10.0).unwrap(), EndFlags::default()).unwrap();
    let n = op.unknowns();
    let b1: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
    let b2: Vec<f64> = (0..n).map(|i| ((i * i) % 17) as f64 - 8.0).collect();
    assert!(residual_ratio(&op, &b1) <= 1e-10);
    assert!(residual_ratio(&op, &b2) <= 1e-10);
}

#[test]
fn robin_trace_of_a_polynomial_is_second_order() {
    // u = x³ - x² y; the centred difference is exact up to u''' h²/6
    let trans = TransmissionKind::robin(10.0).unwrap();
    let mut errors = Vec::new();
    for m in [1, 2, 4] {
        let g = grid(24 * m, 8);
        let mut field = vec![0.0; g.node_count()];
        for i in 0..g.nx + 2 {
            for k in 0..g.ny + 2 {
                let (x, y) = (i as f64 * g.hx, g.y_at(k));
                field[g.node(i, k)] = x.powi(3) - x * x * y;
            }
        }
        let c = g.left_interface_offset;
        let tr = apply_trace(&g, &field, c, TraceSide::Left, trans).unwrap();
        let err = (0..g.ny + 2)
            .map(|k| {
                let y = g.y_at(k);
                let exact = 10.0 * (c.powi(3) - c * c * y) - (3.0 * c * c - 2.0 * c * y);
                (tr[k] - exact).abs()
            })
            .fold(0.0, f64::max);
        errors.push(err);
    }
    for o in orders(&errors) {
        assert!((1.8..=2.2).contains(&o), "{errors:?}");
    }
}

#[test]
fn off_grid_traces_are_accurate() {
    let chain = DomainChain::new(3, 1.0, 10.0 / 51.0).unwrap();
    let g = make_grid(&chain, 2, GridSpec::Counts { nx: 90, ny: 50 }).unwrap();
    assert!(!g.aligned);
    let mut field = vec![0.0; g.node_count()];
    for i in 0..g.nx + 2 {
        for k in 0..g.ny + 2 {
            field[g.node(i, k)] = (1.3 * i as f64 * g.hx).sin() * g.y_at(k);
        }
    }
    let trans = TransmissionKind::robin(10.0).unwrap();
    for (x, side, sign) in [
        (g.left_interface_offset, TraceSide::Left, -1.0),
        (g.right_interface_offset, TraceSide::Right, 1.0),
    ] {
        let tr = apply_trace(&g, &field, x, side, trans).unwrap();
        for k in 0..g.ny + 2 {
            let y = g.y_at(k);
            let exact = 10.0 * (1.3 * x).sin() * y + sign * 1.3 * (1.3 * x).cos() * y;
            assert!((tr[k] - exact).abs() < 1e-5, "{side:?} k={k}");
        }
    }
}

#[test]
fn interior_operator_is_shift_invariant() {
    let chain = DomainChain::new(5, 1.0, 10.0 / 51.0).unwrap();
    let pair = BcPair::from_label(PairLabel::DR, 10.0).unwrap();
    let trans = TransmissionKind::robin(10.0).unwrap();
    let g2 = make_grid(&chain, 2, GridSpec::MeshWidth(1.0 / 51.0)).unwrap();
    let g4 = make_grid(&chain, 4, GridSpec::MeshWidth(1.0 / 51.0)).unwrap();
    assert!((g4.origin.0 - g2.origin.0 - 2.0).abs() < 1e-14);
    let op2 = assemble_operator(&g2, &pair, trans, EndFlags::for_subdomain(2, 5)).unwrap();
    let op4 = assemble_operator(&g4, &pair, trans, EndFlags::for_subdomain(4, 5)).unwrap();
    let gl: Vec<f64> = (0..g2.ny + 2).map(|k| (k as f64 * 0.1).cos()).collect();
    let gr: Vec<f64> = (0..g2.ny + 2).map(|k| (k as f64 * 0.2).sin()).collect();
    let mut x2 = op2.rhs(None, Some(&gl), Some(&gr));
    let mut x4 = op4.rhs(None, Some(&gl), Some(&gr));
    op2.solve_in_place(&mut x2);
    op4.solve_in_place(&mut x4);
    let d = x2.iter().zip(&x4).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(d <= 1e-12);
}
