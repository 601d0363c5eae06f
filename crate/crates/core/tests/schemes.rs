use attenuant_core::attenuator::{self, CascadeSpec, ChannelSpec};
use attenuant_core::entropy::{self, coherent_info, g};
use attenuant_core::fock_core::{self, DensityMatrix, ModeDims};
use attenuant_core::majorization::lambda_grid;
use attenuant_core::schemes::{self, Branch, FigureGrid, FigureId, XiPrimeSign};
use attenuant_core::Error;

#[test]
fn larger_environment_cutoff_leaves_icoh_unchanged() {
    let psi = schemes::psi_state(0.4).unwrap().projector();
    let env = schemes::xi_state(0.4).unwrap().projector();
    let base = coherent_info(&attenuator::apply_bipartite(&ChannelSpec::new(0.6, env.clone()).unwrap(), &psi, 1).unwrap(), &[0]).unwrap();
    let padded = env.padded(&ModeDims::single(7).unwrap()).unwrap();
    let wide = coherent_info(&attenuator::apply_bipartite(&ChannelSpec::new(0.6, padded).unwrap(), &psi, 1).unwrap(), &[0]).unwrap();
    assert!((base - wide).abs() < 1e-9);

    let w = schemes::omega_ab(3, 0.3).unwrap();
    let env = DensityMatrix::fock1(3, 4).unwrap().padded(&ModeDims::single(9).unwrap()).unwrap();
    let w2 = attenuator::apply_bipartite(&ChannelSpec::new(0.3, env).unwrap(), &schemes::bell_state().projector(), 1).unwrap();
    assert!((coherent_info(&w, &[0]).unwrap() - coherent_info(&w2, &[0]).unwrap()).abs() < 1e-9);
}

#[test]
fn main_scheme_positive_inside_intervals() {
    for n in 2..=40 {
        for l in lambda_grid(n, 12).into_iter().skip(1).take(10) {
            if n == 2 && l >= 0.5 - schemes::DEFAULT_EPS {
                continue;
            }
            assert!(schemes::main_scheme_icoh(n, l).unwrap().icoh > 0.0, "n = {n}, λ = {l}");
        }
    }
}

#[test]
fn non_monotone_in_lambda() {
    for n in 3..=6 {
        let at_half = schemes::main_scheme_icoh(n, 0.5).unwrap().icoh;
        assert!(at_half.abs() < 1e-12, "n = {n}: {at_half}");
        let inside = schemes::main_scheme_icoh(n, 0.5 / n as f64 + 0.5 / (n + 1) as f64).unwrap().icoh;
        assert!(inside > 0.0);
    }
}

#[test]
fn xi_prime_sign_flips_icoh() {
    for n in [3, 7, 12] {
        let minus = schemes::scheme2_icoh_signed(n, XiPrimeSign::Minus).unwrap().icoh;
        let plus = schemes::scheme2_icoh_signed(n, XiPrimeSign::Plus).unwrap().icoh;
        assert!(minus > 0.0);
        assert!((minus + plus).abs() < 1e-10);
    }
}

#[test]
fn floor_branches() {
    let v = schemes::capacity_floor(0.75, 0.05).unwrap();
    assert_eq!(v.choice.branch, Branch::Vacuum);
    assert!((v.value - (g(0.375).unwrap() - g(0.125).unwrap())).abs() < 1e-12);

    let v = schemes::capacity_floor(0.5, 0.05).unwrap();
    assert_eq!(v.choice.branch, Branch::XiOneThird);
    assert!((v.value - schemes::scheme1_icoh(1.0 / 3.0, 0.5).unwrap().icoh).abs() < 1e-12);

    assert_eq!(schemes::capacity_floor(0.4, 0.05).unwrap().choice.branch, Branch::Fock(2));
    assert_eq!(schemes::capacity_floor(1.0 / 3.0, 0.05).unwrap().choice.branch, Branch::Fock(3));
}

#[test]
fn floor_sweep_is_positive_and_ordered() {
    let grid = schemes::floor_grid(0.005, 0.05, 200).unwrap();
    assert!(grid.windows(2).all(|w| w[0] < w[1]));
    let floors = schemes::floor_sweep(&grid, 0.05).unwrap();
    assert!(floors.iter().all(|f| f.value > 0.0));
    assert!(floors.iter().zip(&grid).all(|(f, l)| f.lambda == *l));
}

#[test]
fn afw_certificate_shrinks_with_width() {
    let narrow = entropy::afw_certificate(0.002).unwrap();
    let wide = entropy::afw_certificate(0.02).unwrap();
    assert!(narrow.certified > wide.certified);
    assert!(narrow.certified <= narrow.icoh_center);
    let grid: Vec<f64> = (1..=40).map(|k| k as f64 * 5e-4).collect();
    let interval = entropy::afw_interval(1e-6, &grid).unwrap().unwrap();
    assert!(interval.lambda_lo < 0.5 && interval.lambda_hi > 0.5);
    assert!(entropy::afw_interval(1.0, &grid).unwrap().is_none());
}

#[test]
fn cascade_of_two_equal_splitters() {
    let l = 0.5f64.sqrt();
    let sigma = DensityMatrix::fock1(1, 2).unwrap();
    let spec = CascadeSpec::equivalent_to(&sigma, vec![l, l]).unwrap();
    for rho in attenuator::probe_states(4).unwrap() {
        let lhs = attenuator::cascade_apply(&spec, &rho).unwrap();
        let rhs = attenuator::apply(&ChannelSpec::new(0.5, sigma.clone()).unwrap(), &rho).unwrap();
        assert!(fock_core::max_entry_diff(&lhs, &rhs).unwrap() <= 1e-8);
    }
}

#[test]
fn figure_tables() {
    let grid = FigureGrid { ns: vec![2, 5], points: 31, n_range: (3, 8) };
    let main = schemes::figure_data(FigureId::IcohMain, &grid).unwrap();
    assert_eq!(main.len(), 62);
    let xi = schemes::figure_data(FigureId::IcohXi, &grid).unwrap();
    let third = xi.iter().find(|p| p.x == 1.0 / 3.0).unwrap();
    assert!((third.y - 0.07392).abs() < 5e-5);
    let prime = schemes::figure_data(FigureId::IcohXiPrime, &grid).unwrap();
    assert_eq!(prime.iter().map(|p| p.x as usize).collect::<Vec<_>>(), vec![3, 4, 5, 6, 7, 8]);
    assert!(matches!("nope".parse::<FigureId>(), Err(Error::Argument(_))));
}

#[test]
fn lim_and_universal_bounds_sandwich_pure_loss() {
    for l in [0.6, 0.8, 0.95] {
        let q = entropy::pure_loss_capacity(l, 1.0).unwrap();
        let (lower, upper) = entropy::lim_bounds(l, 1.0, 0.0, 0.0).unwrap();
        assert!(lower <= q + 1e-12 && q <= upper + 1e-12);
        assert!(q <= entropy::universal_cap_upper(1, 1.0).unwrap());
    }
    assert_eq!(entropy::depolarizing_upper(0.7, 4), 0.0);
}
