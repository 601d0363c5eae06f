//! Acceptance run: one PASS/FAIL line per criterion. Exits nonzero on any failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use attenuant_core::attenuator::{self, CascadeSpec, ChannelSpec};
use attenuant_core::beamsplitter::bs_block;
use attenuant_core::entropy::{self, coherent_info, g};
use attenuant_core::fock_core::{self, DensityMatrix, ModeDims, StateVector};
use attenuant_core::majorization::{self, bound_chain, k_gap, p_dist, q_dist};
use attenuant_core::phase_space::verify_covariance;
use attenuant_core::schemes::{self, Branch};
use attenuant_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome, Option<u64>);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

// Fock-basis amplitudes of the splitter acting on |0⟩|n⟩ and |1⟩|n⟩.
fn oracle_0n(n: usize, lambda: f64, l: usize) -> f64 {
    binom(n, l).sqrt() * (1.0 - lambda).powf(l as f64 / 2.0) * lambda.powf((n - l) as f64 / 2.0)
}

fn oracle_1n(n: usize, lambda: f64, l: usize) -> f64 {
    let m = (n + 1) as f64;
    -1.0 / (m * (1.0 - lambda)).sqrt()
        * binom(n + 1, l).sqrt()
        * (1.0 - lambda).powf(l as f64 / 2.0)
        * lambda.powf((n as f64 - l as f64) / 2.0)
        * (m * (1.0 - lambda) - l as f64)
}

fn criterion_1() -> Outcome {
    let mut worst_low = 0.0f64;
    for k in 0..=10 {
        let l = k as f64 / 10.0;
        let r = (2.0 * l * (1.0 - l)).sqrt();
        let u1 = [[l.sqrt(), -(1.0 - l).sqrt()], [(1.0 - l).sqrt(), l.sqrt()]];
        let u2 = [[l, -r, 1.0 - l], [r, 2.0 * l - 1.0, -r], [1.0 - l, r, l]];
        let b1 = bs_block(1, l).map_err(e)?;
        let b2 = bs_block(2, l).map_err(e)?;
        for (i, row) in u1.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                worst_low = worst_low.max((b1.mat[[i, j]] - v).abs());
            }
        }
        for (i, row) in u2.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                worst_low = worst_low.max((b2.mat[[i, j]] - v).abs());
            }
        }
    }
    ensure(worst_low <= 1e-12, format!("low-photon blocks off by {worst_low:.3e}"))?;

    let mut worst_rows = 0.0f64;
    for k in 1..10 {
        let l = k as f64 / 10.0;
        for n in 0..=30 {
            let b = bs_block(n, l).map_err(e)?;
            for out in 0..=n {
                worst_rows = worst_rows.max((b.mat[[out, 0]] - oracle_0n(n, l, out)).abs());
            }
            let b = bs_block(n + 1, l).map_err(e)?;
            for out in 0..=n + 1 {
                worst_rows = worst_rows.max((b.mat[[out, 1]] - oracle_1n(n, l, out)).abs());
            }
        }
    }
    ensure(worst_rows <= 1e-10, format!("closed-form rows off by {worst_rows:.3e}"))?;
    Ok(format!("low blocks {worst_low:.1e}, rows n<=30 {worst_rows:.1e}"))
}

fn zeta_half_oracle(eta: f64) -> [[f64; 6]; 6] {
    let s2 = std::f64::consts::SQRT_2;
    let om = 1.0 - eta;
    let r00 = 0.5 * (1.0 + eta - 3.0 * eta * eta + eta.powi(3));
    let r02 = -om * om * eta / s2;
    let r03 = eta * om.sqrt();
    let r04 = -om * eta.powf(1.5) / s2;
    let r22 = 0.5 * om.powi(3);
    let r23 = -om.powf(1.5) * eta / s2;
    let r24 = 0.5 * om * om * eta.sqrt();
    let r33 = 0.5 * eta * (1.0 + eta);
    let r34 = -eta.powf(1.5) * om.sqrt() / s2;
    let r44 = 0.5 * om * eta;
    [
        [r00, 0.0, r02, r03, r04, 0.0],
        [0.0; 6],
        [r02, 0.0, r22, r23, r24, 0.0],
        [r03, 0.0, r23, r33, r34, 0.0],
        [r04, 0.0, r24, r34, r44, 0.0],
        [0.0; 6],
    ]
}

fn criterion_2() -> Outcome {
    let icoh = schemes::scheme1_icoh(1.0 / 3.0, 0.5).map_err(e)?.icoh;
    ensure((icoh - 0.07392).abs() <= 5e-5, format!("I_coh(1/2, 1/3) = {icoh}"))?;
    let (eta_star, best) = schemes::scheme1_max(0.5, 2001).map_err(e)?;
    ensure((best - 0.0748).abs() <= 1e-3, format!("max over η = {best}"))?;
    let mut worst = 0.0f64;
    for k in 1..20 {
        let eta = k as f64 / 20.0;
        let z = schemes::zeta_ab(0.5, eta).map_err(e)?;
        let o = zeta_half_oracle(eta);
        for (i, row) in o.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                worst = worst.max((z.mat[[i, j]] - C64::new(*v, 0.0)).norm());
            }
        }
    }
    ensure(worst <= 1e-10, format!("ζ_AB(1/2, η) off by {worst:.3e}"))?;
    Ok(format!("I_coh = {icoh:.6}, max {best:.6} at η = {eta_star:.4}, matrix residual {worst:.1e}"))
}

fn criterion_3() -> Outcome {
    let r = schemes::scheme2_icoh(54).map_err(e)?;
    ensure((r.icoh - 0.3530).abs() <= 1e-3, format!("scheme2(54) = {}", r.icoh))?;
    Ok(format!("I_coh(n = 54) = {:.6}, energy {}", r.icoh, r.energy))
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn criterion_4() -> Outcome {
    let (mut icoh_gap, mut spec_gap, mut diag_gap) = (0.0f64, 0.0f64, 0.0f64);
    for n in 2..=6 {
        for k in 1..=9 {
            let l = k as f64 / 10.0;
            // ABE is pure with orthogonal E-sectors, so the joint spectrum
            // pairs the two branches by total photon number.
            let a = |j: usize| if j <= n { oracle_0n(n, l, j) } else { 0.0 };
            let b = |j: usize| oracle_1n(n, l, j);
            let q_oracle: Vec<f64> =
                (0..=n + 1).map(|j| 0.5 * (b(j).powi(2) + if j >= 1 { a(j - 1).powi(2) } else { 0.0 })).collect();
            let p_oracle: Vec<f64> = (0..=n + 1).map(|j| 0.5 * (b(j).powi(2) + a(j).powi(2))).collect();

            let w = schemes::omega_ab(n, l).map_err(e)?;
            let all = sorted(w.spectrum().map_err(e)?);
            let (rest, spec) = all.split_at(all.len() - (n + 2));
            spec_gap = spec_gap.max(rest.iter().map(|x| x.abs()).fold(0.0, f64::max));
            let spec = spec.to_vec();
            let wb = fock_core::partial_trace(&w, &[1]).map_err(e)?;
            let diag: Vec<f64> = (0..=n + 1).map(|j| wb.mat[[j, j]].re).collect();

            let q = q_dist(n, l).map_err(e)?.dist.weights().to_vec();
            let p = p_dist(n, l).map_err(e)?.dist.weights().to_vec();
            spec_gap = spec_gap.max(max_gap(&spec, &sorted(q.clone()))).max(max_gap(&q, &q_oracle));
            diag_gap = diag_gap.max(max_gap(&diag, &p)).max(max_gap(&p, &p_oracle));

            let r = schemes::main_scheme_icoh(n, l).map_err(e)?;
            let sim = coherent_info(&w, &[0]).map_err(e)?;
            icoh_gap = icoh_gap.max((sim - r.icoh).abs());
        }
    }
    ensure(icoh_gap <= 1e-9, format!("ℐ closed vs simulated {icoh_gap:.3e}"))?;
    ensure(spec_gap <= 1e-10, format!("ω_AB spectrum vs q {spec_gap:.3e}"))?;
    ensure(diag_gap <= 1e-10, format!("ω_B diagonal vs p {diag_gap:.3e}"))?;
    Ok(format!("ℐ {icoh_gap:.1e}, spectrum {spec_gap:.1e}, diagonal {diag_gap:.1e}"))
}

fn criterion_5() -> Outcome {
    let r = majorization::sweep(200, 50).map_err(e)?;
    ensure(
        r.passed(),
        format!("{} violations, first {:?}", r.violations.len(), r.violations.first().map(|v| (&v.check, v.n, v.lambda))),
    )?;
    Ok(format!("{} points, worst partial-sum slack {:.3e}", r.points_checked, r.worst_majorization_slack))
}

fn criterion_6() -> Outcome {
    let mut worst_chain = f64::INFINITY;
    for n in 2..=200 {
        for l in majorization::lambda_grid(n, 50) {
            let r = bound_chain(n, l, 0.5 - l).map_err(e)?;
            ensure(r.chain_holds(1e-12), format!("chain broken at n = {n}, λ = {l}: {r:?}"))?;
            worst_chain = worst_chain.min((r.icoh - r.kl_sorted).min(r.kl_sorted - r.tv_term).min(r.tv_term - r.linf_term));
        }
    }
    let mut worst_floor = 0.0f64;
    for n in 3..=200 {
        let nf = n as f64;
        let want = (nf + 1.0) * (nf - 2.0) / (4.0 * nf * (nf - 1.0)) * (1.0 - 1.0 / nf).powf(nf);
        worst_floor = worst_floor.max((k_gap(n, 1.0 / nf).map_err(e)? - want).abs());
    }
    ensure(worst_floor <= 1e-12, format!("k_gap(n, 1/n) off by {worst_floor:.3e}"))?;
    let mut worst_n2 = 0.0f64;
    for k in 1..=16 {
        let eps = k as f64 / 100.0;
        worst_n2 = worst_n2.max((k_gap(2, 0.5 - eps).map_err(e)? - (eps / 4.0 + 3.0 * eps.powi(3))).abs());
    }
    ensure(worst_n2 <= 1e-12, format!("k_gap(2, 1/2 − ε) off by {worst_n2:.3e}"))?;
    Ok(format!("min chain slack {worst_chain:.3e}, k_gap(n,1/n) {worst_floor:.1e}, n = 2 {worst_n2:.1e}"))
}

fn criterion_7() -> Outcome {
    let ln2 = std::f64::consts::LN_2;
    let floor_c = 32.0 / (6561.0 * ln2);
    let grid = schemes::floor_grid(0.005, 0.05, 400).map_err(e)?;
    let floors = schemes::floor_sweep(&grid, 0.05).map_err(e)?;
    let fock_min = floors
        .iter()
        .filter(|f| matches!(f.choice.branch, Branch::Fock(n) if n >= 3))
        .map(|f| f.value)
        .fold(f64::INFINITY, f64::min);
    ensure(fock_min >= floor_c * (1.0 - 1e-12), format!("Fock-branch floor {fock_min} below {floor_c}"))?;

    let target = 1.0 / (8.0 * std::f64::consts::E.powi(2) * ln2);
    let tail = schemes::capacity_floor(1.0 / 1000.0, 0.05).map_err(e)?.value;
    ensure((tail - target).abs() <= 1e-3, format!("floor at λ = 1e-3 is {tail}, asymptote {target}"))?;

    let (n_min, l_min, direct) = schemes::direct_sweep_min(200, 50).map_err(e)?;
    ensure(direct > 0.066 / 3.0 && direct < 0.066 * 3.0, format!("direct sweep minimum {direct}"))?;

    let g_half = g(0.5).map_err(e)?;
    ensure((g_half - 1.377444).abs() <= 1e-5, format!("g(1/2) = {g_half}"))?;

    let eps_grid: Vec<f64> = (0..=80).map(|k| 1e-4 * 10f64.powf(k as f64 / 40.0)).collect();
    let bal = entropy::balanced_constant(&eps_grid).map_err(e)?;
    ensure(bal.value >= 1e-6, format!("AFW-balanced constant {}", bal.value))?;
    Ok(format!(
        "Fock floor {fock_min:.6} (≥ {floor_c:.6}), λ=1e-3 floor {tail:.6} vs {target:.6}, \
         direct min {direct:.4} at n = {n_min}, λ = {l_min:.5}, g(1/2) = {g_half:.6}, AFW constant {:.3e} at ε = {:.4}",
        bal.value, bal.eps
    ))
}

fn criterion_8() -> Outcome {
    let probes = attenuator::probe_states(4).map_err(e)?;
    let sigma = schemes::xi_state(0.3).map_err(e)?.projector();
    let omega = fock_core::thermal_state(0.2, 4).map_err(e)?;
    let mut comp = 0.0f64;
    for &(l, m) in &[(0.3, 0.6), (0.7, 0.5), (0.9, 0.2)] {
        comp = comp.max(attenuator::compose_check(l, &sigma, m, &omega, &probes).map_err(e)?);
        comp = comp.max(attenuator::compose_check(l, &omega, m, &DensityMatrix::fock1(2, 3).map_err(e)?, &probes).map_err(e)?);
    }
    ensure(comp <= 1e-8, format!("composition residual {comp:.3e}"))?;

    let mut cov = 0.0f64;
    for (z, l) in [(C64::new(0.3, -0.2), 0.4), (C64::new(-0.25, 0.35), 0.75)] {
        let rho = schemes::xi_state(0.6).map_err(e)?.projector();
        let r = verify_covariance(l, &sigma, z, &rho, 40).map_err(e)?;
        cov = cov.max(r.max());
    }
    ensure(cov <= 1e-7, format!("covariance residual {cov:.3e}"))?;

    let mut stab = 0.0f64;
    for &(eta, nu) in &[(0.3, 0.5), (0.8, 1.2)] {
        let spec = attenuator::thermal_attenuator(eta, nu, None).map_err(e)?;
        ensure(spec.tail_mass < 1e-12, format!("tail mass {}", spec.tail_mass))?;
        let tau = fock_core::thermal_state(nu, spec.env.dim()).map_err(e)?;
        let out = attenuator::apply(&spec, &tau).map_err(e)?;
        let want = fock_core::thermal_state(nu, out.dim()).map_err(e)?;
        stab = stab.max(fock_core::max_entry_diff(&out, &want).map_err(e)?);
    }
    ensure(stab <= 1e-8, format!("thermal stability residual {stab:.3e}"))?;

    let mut wc = 0.0f64;
    for n in 0..=5 {
        let spec = ChannelSpec::new(0.5, DensityMatrix::fock1(n, n + 1).map_err(e)?).map_err(e)?;
        for rho in &probes {
            let lhs = attenuator::weak_complementary(&spec, rho).map_err(e)?;
            let rhs = fock_core::parity_conjugate(&attenuator::apply(&spec, rho).map_err(e)?);
            wc = wc.max(fock_core::max_entry_diff(&lhs, &rhs).map_err(e)?);
        }
    }
    ensure(wc <= 1e-10, format!("weak-complementary residual {wc:.3e}"))?;

    let mut lim_max = f64::NEG_INFINITY;
    for i in 1..=10 {
        let l = 0.05 * i as f64;
        for nn in [0.1, 0.5, 1.0, 3.0, 10.0] {
            for nu in [0.0, 0.2, 1.0, 5.0] {
                for s in [0.0, 0.3, 1.0, 2.5] {
                    let (lower, _) = entropy::lim_bounds(l, nn, nu, s).map_err(e)?;
                    lim_max = lim_max.max(lower);
                }
            }
        }
    }
    ensure(lim_max <= 0.0, format!("Lim lower bound reaches {lim_max}"))?;
    Ok(format!("composition {comp:.1e}, covariance {cov:.1e}, stability {stab:.1e}, weak complementary {wc:.1e}, Lim max {lim_max:.3e}"))
}

fn random_state(rng: &mut ChaCha8Rng, d: usize, rank: usize) -> DensityMatrix {
    let dims = ModeDims::single(d).unwrap();
    let mut mat = ndarray::Array2::<C64>::zeros((d, d));
    for _ in 0..rank {
        let amps = (0..d).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let v = StateVector::normalized(dims.clone(), amps).unwrap();
        mat = mat + v.projector().mat.mapv(|z| z / rank as f64);
    }
    DensityMatrix::new(dims, mat).unwrap()
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for k in [2usize, 3] {
        for _ in 0..2 {
            let lambdas: Vec<f64> = (0..k).map(|_| rng.gen_range(0.2..0.95)).collect();
            let sigma = random_state(&mut rng, 6, 2);
            let rho = random_state(&mut rng, 6, 2);
            let cascade = CascadeSpec::equivalent_to(&sigma, lambdas.clone()).map_err(e)?;
            let lhs = attenuator::cascade_apply(&cascade, &rho).map_err(e)?;
            let total: f64 = lambdas.iter().product();
            let rhs = attenuator::apply(&ChannelSpec::new(total, sigma).map_err(e)?, &rho).map_err(e)?;
            worst = worst.max(fock_core::max_entry_diff(&lhs, &rhs).map_err(e)?);
        }
    }
    ensure(worst <= 1e-7, format!("cascade residual {worst:.3e}"))?;
    Ok(format!("cascade residual {worst:.1e}"))
}

fn criterion_10() -> Outcome {
    let mut worst_eig = f64::NEG_INFINITY;
    let mut worst_oracle = 0.0f64;
    for k in 1..=99 {
        let l = k as f64 / 100.0;
        let m = schemes::ppt_check(l).map_err(e)?;
        let h = 0.5 * (1.0 - l);
        let want = 0.5 * (h - (h * h + l).sqrt());
        worst_eig = worst_eig.max(m);
        worst_oracle = worst_oracle.max((m - want).abs());
    }
    ensure(worst_eig < 0.0, format!("largest min-eigenvalue {worst_eig}"))?;
    ensure(worst_oracle <= 1e-12, format!("PT eigenvalue off closed form by {worst_oracle:.3e}"))?;
    Ok(format!("max over λ of min PT eigenvalue {worst_eig:.4e}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "beam-splitter fixtures", criterion_1, Some(1)),
        (2, "ξ(η) scheme", criterion_2, Some(5)),
        (3, "ξ'(n) scheme", criterion_3, Some(60)),
        (4, "Fock-environment scheme consistency", criterion_4, None),
        (5, "majorization sweep", criterion_5, Some(120)),
        (6, "entropy bound chain", criterion_6, None),
        (7, "constants", criterion_7, None),
        (8, "channel algebra", criterion_8, None),
        (9, "cascade", criterion_9, Some(30)),
        (10, "PPT witness", criterion_10, None),
    ];
    let mut failures = 0;
    for (id, name, run, budget) in criteria {
        let start = Instant::now();
        let mut outcome = run();
        let took = start.elapsed();
        if let (Ok(_), Some(b)) = (&outcome, budget) {
            if took > Duration::from_secs(b) {
                outcome = Err(format!("took {took:.2?}, budget {b} s"));
            }
        }
        match outcome {
            Ok(detail) => println!("criterion {id:>2} PASS  {name}: {detail} [{took:.2?}]"),
            Err(why) => {
                failures += 1;
                println!("criterion {id:>2} FAIL  {name}: {why} [{took:.2?}]");
            }
        }
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
