use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use proptest::prelude::*;
use schwarz_scaling::bounds::{self, ordering_check, phi_osm, rho, zeta_osm, Convention};
use schwarz_scaling::fourier1d::{build_mode_iteration, TransmissionKind};
use schwarz_scaling::geometry::{BcKind, BcPair, DomainChain, PairLabel};
use schwarz_scaling::linalg::{spectral_radius_dense, spectral_radius_power};
use schwarz_scaling::quadrature::integrate;
use schwarz_scaling::spectral::{char_function, eigenmodes, find_root_k, CharKind};

fn log_q() -> impl Strategy<Value = f64> {
    (-3.0f64..3.0).prop_map(|e| 10f64.powf(e))
}

fn any_pair() -> impl Strategy<Value = (BcKind, BcKind)> {
    let kind = prop_oneof![Just(BcKind::Dirichlet), Just(BcKind::Neumann), Just(BcKind::Robin)];
    (kind.clone(), kind)
}

fn pair_with_q(kinds: (BcKind, BcKind), q: f64) -> BcPair {
    let robin = kinds.0 == BcKind::Robin || kinds.1 == BcKind::Robin;
    BcPair::new(kinds.0, kinds.1, robin.then_some(q)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn roots_have_small_scaled_residual(q in log_q(), k in 1usize..6, which in 0usize..3) {
        let kind = CharKind::ALL[which];
        let x = find_root_k(kind, q, k, 1e-15).unwrap();
        let (lo, hi) = kind.bracket(k);
        prop_assert!(x > lo && x < hi);
        // magnitude of the individual terms at the root
        let scale = match kind {
            CharKind::DR | CharKind::NR => (1.0 + q) * (1.0 + x),
            CharKind::RR => (1.0 + q + x).powi(2),
        };
        prop_assert!(char_function(kind, q, x).abs() <= 1e-10 * scale);
    }

    #[test]
    fn first_frequencies_increase_with_q(a in log_q(), b in log_q()) {
        prop_assume!((a - b).abs() > 1e-9 * a.max(b));
        let (q1, q2) = if a < b { (a, b) } else { (b, a) };
        for kind in CharKind::ALL {
            let f1 = find_root_k(kind, q1, 1, 1e-15).unwrap();
            let f2 = find_root_k(kind, q2, 1, 1e-15).unwrap();
            prop_assert!(f1 < f2, "{kind:?}: {f1} !< {f2} for q {q1} < {q2}");
        }
        let mu = find_root_k(CharKind::DR, q1, 1, 1e-15).unwrap();
        let nu = find_root_k(CharKind::NR, q1, 1, 1e-15).unwrap();
        let tau = find_root_k(CharKind::RR, q1, 1, 1e-15).unwrap();
        prop_assert!(nu < FRAC_PI_2 && FRAC_PI_2 < mu && mu < PI);
        prop_assert!(tau > 0.0 && tau < PI);
    }

    #[test]
    fn modes_are_orthonormal(kinds in any_pair(), q in (-1.0f64..2.0).prop_map(|e| 10f64.powf(e))) {
        let pair = pair_with_q(kinds, q);
        let first = pair.label().first_index();
        let modes = eigenmodes(&pair, first + 7, 1e-15).unwrap();
        prop_assert_eq!(modes.len(), 8);
        for (i, mi) in modes.iter().enumerate() {
            for (j, mj) in modes.iter().enumerate().skip(i) {
                let g = integrate(|y| mi.eval(y).unwrap() * mj.eval(y).unwrap(), 0.0, 1.0, 2048 / 5 + 1);
                let expected = if i == j { 1.0 } else { 0.0 };
                prop_assert!((g - expected).abs() < 1e-8, "{pair}: G[{i}][{j}] = {g}");
            }
        }
    }

    #[test]
    fn modes_solve_the_ode(kinds in any_pair(), q in log_q()) {
        let pair = pair_with_q(kinds, q);
        let h = 1e-4;
        for m in eigenmodes(&pair, pair.label().first_index() + 3, 1e-15).unwrap() {
            for s in 0..11 {
                let y = 0.05 + 0.09 * s as f64;
                let f = |t: f64| m.eval(t).unwrap();
                let d2 = (-f(y + 2.0 * h) + 16.0 * f(y + h) - 30.0 * f(y) + 16.0 * f(y - h) - f(y - 2.0 * h))
                    / (12.0 * h * h);
                let residual = (d2 + m.eigenvalue * f(y)).abs();
                prop_assert!(residual <= 1e-4 * m.eigenvalue.max(1.0), "{pair} k={} y={y}: {residual}", m.index);
            }
        }
    }

    #[test]
    fn ordering_chains_hold(delta in 0.02f64..0.45, q in (-1.3f64..2.3).prop_map(|e| 10f64.powf(e))) {
        for c in Convention::ALL {
            let rep = ordering_check(delta, 1.0, q, c).unwrap();
            prop_assert!(rep.all_hold(), "{c} δ={delta} q={q}: {:?}", rep);
            for (_, v) in &rep.values {
                prop_assert!((0.0..=1.0).contains(v));
            }
        }
    }

    #[test]
    fn rho_decreases_in_decay(t1 in 0.0f64..100.0, dt in 1e-3f64..10.0, di in 0usize..3) {
        let delta = [0.05, 0.1, 0.2][di];
        let (a, b) = (rho(t1, delta, 1.0), rho(t1 + dt, delta, 1.0));
        prop_assert!(a > b || (a == 0.0 && b == 0.0));
        prop_assert!(a <= 1.0 && b >= 0.0);
    }

    #[test]
    fn phi_without_robin_is_rho(lambda in 0.1f64..50.0, delta in 0.01f64..0.49) {
        let d = (phi_osm(lambda, delta, 0.0, 1.0) - rho(lambda, delta, 1.0)).abs();
        prop_assert!(d <= 1e-12, "{d}");
    }

    #[test]
    fn radius_is_mirror_symmetric(n in 2usize..12, lambda in 0.0f64..40.0, robin in any::<bool>()) {
        let chain = DomainChain::new(n, 1.0, 0.1).unwrap();
        let trans = if robin { TransmissionKind::robin(10.0).unwrap() } else { TransmissionKind::Dirichlet };
        let it = build_mode_iteration(&chain, lambda, trans).unwrap();
        let m = &it.matrix;
        let dim = m.nrows();
        // right-to-left relabelling reverses the slot order
        let mirrored = DMatrix::from_fn(dim, dim, |i, j| m[(dim - 1 - i, dim - 1 - j)]);
        prop_assert!((m - &mirrored).amax() <= 1e-12 * m.amax().max(1.0));
        let r = spectral_radius_dense(&mirrored).unwrap();
        prop_assert!((r - it.spectral_radius).abs() <= 1e-10 * it.spectral_radius.max(1e-300));
    }

    #[test]
    fn power_and_dense_radii_agree(n in 2usize..15, lambda in 0.1f64..30.0, robin in any::<bool>()) {
        let chain = DomainChain::new(n, 1.0, 0.1).unwrap();
        let trans = if robin { TransmissionKind::robin(10.0).unwrap() } else { TransmissionKind::Dirichlet };
        let it = build_mode_iteration(&chain, lambda, trans).unwrap();
        let dense = spectral_radius_dense(&it.matrix).unwrap();
        let power = spectral_radius_power(&it.matrix, 1e-13).unwrap();
        prop_assert!((dense - power).abs() <= 1e-8 * dense.max(1e-12), "{dense} vs {power}");
    }
}

#[test]
fn robin_radius_never_exceeds_dirichlet_radius() {
    for n in [3, 5, 10] {
        let chain = DomainChain::new(n, 1.0, 0.1).unwrap();
        for lambda in [PI * PI / 4.0, PI * PI] {
            let d = build_mode_iteration(&chain, lambda, TransmissionKind::Dirichlet).unwrap();
            let r = build_mode_iteration(&chain, lambda, TransmissionKind::robin(10.0).unwrap()).unwrap();
            assert!(r.spectral_radius <= d.spectral_radius + 1e-10, "N={n} λ={lambda}");
        }
    }
}

#[test]
fn nonzero_modes_scale_and_zero_mode_does_not() {
    let lam = PI * PI / 4.0;
    let mut worst = 0.0f64;
    let mut zero = Vec::new();
    for n in 2..=30 {
        let chain = DomainChain::new(n, 1.0, 0.1).unwrap();
        worst = worst.max(build_mode_iteration(&chain, lam, TransmissionKind::Dirichlet).unwrap().spectral_radius);
        zero.push(build_mode_iteration(&chain, 0.0, TransmissionKind::Dirichlet).unwrap().spectral_radius);
    }
    assert!(worst < 0.9, "{worst}");
    assert!(zero.windows(2).all(|w| w[1] > w[0]));
    assert!(zero[0] < 1.0 && *zero.last().unwrap() > 0.99);
}

#[test]
fn zeta_decreases_in_p_and_changes_sign() {
    let ps = [0.0, 0.5, 1.0, 5.0, 50.0];
    for lambda in [0.5, 2.0, 10.0] {
        let z: Vec<f64> = ps.iter().map(|&p| zeta_osm(lambda, 0.1, p, 1.0).unwrap()).collect();
        assert!(z.windows(2).all(|w| w[1] < w[0]), "λ={lambda}: {z:?}");
        assert!(z[0] > 0.0);
        let far = zeta_osm(lambda, 0.1, 1e8, 1.0).unwrap();
        assert!(far < 0.0);
        let phi0 = phi_osm(lambda, 0.1, 0.0, 1.0);
        assert!(phi0 >= z[0].abs() && phi0 >= far.abs());
    }
}

#[test]
fn limits_of_the_pair_bounds() {
    for c in Convention::ALL {
        let near_one = |l: PairLabel, q: f64| bounds::pair_bound(l, 0.1, 1.0, Some(q), c).unwrap().value;
        let dd = bounds::pair_bound(PairLabel::DD, 0.1, 1.0, None, c).unwrap().value;
        assert!(1.0 - near_one(PairLabel::NR, 1e-3) < 1e-2, "{c}");
        assert!(1.0 - near_one(PairLabel::RR, 1e-3) < 1e-2, "{c}");
        assert!((near_one(PairLabel::DR, 1e3) - dd).abs() < 1e-2, "{c}");
        assert!((near_one(PairLabel::RR, 1e3) - dd).abs() < 1e-2, "{c}");
    }
}
