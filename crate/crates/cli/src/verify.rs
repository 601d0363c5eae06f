use std::collections::BTreeMap;

use attenuant_core::attenuator::{self, CascadeSpec, ChannelSpec};
use attenuant_core::beamsplitter::bs_block;
use attenuant_core::fock_core::{self, DensityMatrix};
use attenuant_core::majorization::{self, bound_chain, k_gap, k_gap_floor};
use attenuant_core::phase_space::verify_covariance;
use attenuant_core::{schemes, C64};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::CliError;
use crate::output::round12;

pub const SUITES: [&str; 7] = ["majorization", "unitarity", "bound_chain", "channel", "cascade", "ppt", "schemes"];

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: &'static str, residual: f64, tolerance: f64) -> Self {
        Self { name, residual: round12(residual), tolerance, passed: residual <= tolerance }
    }
}

#[derive(Debug, Serialize)]
pub struct Offense {
    pub check: String,
    pub n: Option<usize>,
    pub lambda: f64,
}

#[derive(Debug, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: bool,
    pub worst_residual: f64,
    pub grid: BTreeMap<&'static str, usize>,
    pub checks: Vec<Check>,
    pub offending: Vec<Offense>,
}

impl SuiteReport {
    fn new(name: &'static str, worst_residual: f64, grid: &[(&'static str, usize)], checks: Vec<Check>, offending: Vec<Offense>) -> Self {
        let passed = offending.is_empty() && checks.iter().all(|c| c.passed);
        Self { name, passed, worst_residual: round12(worst_residual), grid: grid.iter().cloned().collect(), checks, offending }
    }
}

pub struct Params {
    pub n_max: usize,
    pub points: usize,
    pub block_max: usize,
}

pub fn run(suite: &str, p: &Params) -> Result<SuiteReport, CliError> {
    match suite {
        "majorization" => majorization(p),
        "unitarity" => unitarity(p),
        "bound_chain" => chain(p),
        "channel" => channel(),
        "cascade" => cascade(),
        "ppt" => ppt(),
        "schemes" => scheme_values(),
        other => Err(CliError::Config(format!("unknown suite {other:?}; known: {}", SUITES.join(", ")))),
    }
}

fn majorization(p: &Params) -> Result<SuiteReport, CliError> {
    let r = majorization::sweep(p.n_max, p.points)?;
    let offending = r
        .violations
        .iter()
        .map(|v| Offense { check: v.check.clone(), n: Some(v.n), lambda: v.lambda })
        .collect();
    Ok(SuiteReport::new(
        "majorization",
        -r.worst_majorization_slack.min(0.0),
        &[("n_max", p.n_max), ("points_per_interval", p.points), ("points_checked", r.points_checked)],
        vec![],
        offending,
    ))
}

fn unitarity(p: &Params) -> Result<SuiteReport, CliError> {
    let jobs: Vec<(usize, usize)> = (0..=p.block_max).flat_map(|n| (0..=100).map(move |k| (n, k))).collect();
    let worst = jobs
        .par_iter()
        .map(|&(n, k)| Ok(bs_block(n, k as f64 / 100.0)?.unitarity_defect()))
        .collect::<Result<Vec<f64>, CliError>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(SuiteReport::new(
        "unitarity",
        worst,
        &[("block_max", p.block_max), ("lambda_points", 101)],
        vec![Check::at_most("max_block_defect", worst, 1e-12)],
        vec![],
    ))
}

fn chain(p: &Params) -> Result<SuiteReport, CliError> {
    let per_n = (2..=p.n_max)
        .into_par_iter()
        .map(|n| {
            let mut slack = f64::INFINITY;
            let mut bad = Vec::new();
            for l in majorization::lambda_grid(n, p.points) {
                let r = bound_chain(n, l, 0.5 - l)?;
                slack = slack.min((r.icoh - r.kl_sorted).min(r.kl_sorted - r.tv_term).min(r.tv_term - r.linf_term));
                if !r.chain_holds(majorization::SLACK) {
                    bad.push(Offense { check: "bound_chain".into(), n: Some(n), lambda: l });
                }
            }
            let floor_gap = if n >= 3 { (k_gap(n, 1.0 / n as f64)? - k_gap_floor(n)?).abs() } else { 0.0 };
            Ok((slack, floor_gap, bad))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut slack = f64::INFINITY;
    let mut floor_gap = 0.0f64;
    let mut offending = Vec::new();
    for (s, f, bad) in per_n {
        slack = slack.min(s);
        floor_gap = floor_gap.max(f);
        offending.extend(bad);
    }
    let mut n2 = 0.0f64;
    for k in 1..=16 {
        let eps = k as f64 / 100.0;
        n2 = n2.max((k_gap(2, 0.5 - eps)? - (eps / 4.0 + 3.0 * eps.powi(3))).abs());
    }
    Ok(SuiteReport::new(
        "bound_chain",
        (-slack).max(0.0).max(floor_gap).max(n2),
        &[("n_max", p.n_max), ("points_per_interval", p.points)],
        vec![Check::at_most("k_gap_at_inverse_n", floor_gap, 1e-12), Check::at_most("k_gap_n2_closed_form", n2, 1e-12)],
        offending,
    ))
}

fn channel() -> Result<SuiteReport, CliError> {
    let probes = attenuator::probe_states(4)?;
    let sigma = schemes::xi_state(0.3)?.projector();
    let omega = fock_core::thermal_state(0.2, 4)?;
    let mut comp = 0.0f64;
    for &(l, m) in &[(0.3, 0.6), (0.7, 0.5), (0.9, 0.2)] {
        comp = comp.max(attenuator::compose_check(l, &sigma, m, &omega, &probes)?);
    }
    let mut cov = 0.0f64;
    for (z, l) in [(C64::new(0.3, -0.2), 0.4), (C64::new(-0.25, 0.35), 0.75)] {
        cov = cov.max(verify_covariance(l, &sigma, z, &schemes::xi_state(0.6)?.projector(), 40)?.max());
    }
    let mut stab = 0.0f64;
    for &(eta, nu) in &[(0.3, 0.5), (0.8, 1.2)] {
        let spec = attenuator::thermal_attenuator(eta, nu, None)?;
        let out = attenuator::apply(&spec, &fock_core::thermal_state(nu, spec.env.dim())?)?;
        stab = stab.max(fock_core::max_entry_diff(&out, &fock_core::thermal_state(nu, out.dim())?)?);
    }
    let mut wc = 0.0f64;
    for n in 0..=5 {
        let spec = ChannelSpec::new(0.5, DensityMatrix::fock1(n, n + 1)?)?;
        for rho in &probes {
            let lhs = attenuator::weak_complementary(&spec, rho)?;
            let rhs = fock_core::parity_conjugate(&attenuator::apply(&spec, rho)?);
            wc = wc.max(fock_core::max_entry_diff(&lhs, &rhs)?);
        }
    }
    let checks = vec![
        Check::at_most("composition", comp, 1e-8),
        Check::at_most("covariance", cov, 1e-7),
        Check::at_most("thermal_stability", stab, 1e-8),
        Check::at_most("weak_complementary", wc, 1e-10),
    ];
    Ok(SuiteReport::new("channel", comp.max(cov).max(stab).max(wc), &[("probes", probes.len())], checks, vec![]))
}

fn cascade() -> Result<SuiteReport, CliError> {
    let sigma = fock_core::thermal_state(0.4, 6)?;
    let probes = attenuator::probe_states(6)?;
    let mut worst = 0.0f64;
    for lambdas in [vec![0.9, 0.35], vec![0.6, 0.8], vec![0.7, 0.5, 0.85]] {
        let spec = CascadeSpec::equivalent_to(&sigma, lambdas.clone())?;
        let direct = ChannelSpec::new(lambdas.iter().product(), sigma.clone())?;
        for rho in &probes {
            let lhs = attenuator::cascade_apply(&spec, rho)?;
            worst = worst.max(fock_core::max_entry_diff(&lhs, &attenuator::apply(&direct, rho)?)?);
        }
    }
    Ok(SuiteReport::new(
        "cascade",
        worst,
        &[("cutoff", 6), ("cascades", 3), ("probes", probes.len())],
        vec![Check::at_most("entangled_composition", worst, 1e-7)],
        vec![],
    ))
}

fn ppt() -> Result<SuiteReport, CliError> {
    let mins = (1..=99)
        .into_par_iter()
        .map(|k| Ok((k as f64 / 100.0, schemes::ppt_check(k as f64 / 100.0)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let worst = mins.iter().map(|m| m.1).fold(f64::NEG_INFINITY, f64::max);
    let offending = mins
        .iter()
        .filter(|m| m.1 >= 0.0)
        .map(|m| Offense { check: "ppt".into(), n: None, lambda: m.0 })
        .collect();
    Ok(SuiteReport::new("ppt", worst, &[("lambda_points", 99)], vec![], offending))
}

fn scheme_values() -> Result<SuiteReport, CliError> {
    let xi = schemes::scheme1_icoh(1.0 / 3.0, 0.5)?;
    let prime = schemes::scheme2_icoh(54)?;
    let mut sim = 0.0f64;
    for n in 2..=schemes::SIMULATION_MAX_N {
        for k in 1..=9 {
            sim = sim.max(schemes::main_scheme_icoh(n, k as f64 / 10.0)?.residual.unwrap_or(0.0));
        }
    }
    let checks = vec![
        Check::at_most("xi_one_third", (xi.icoh - 0.07392).abs(), 5e-5),
        Check::at_most("xi_closed_form", xi.residual.unwrap_or(0.0), 1e-10),
        Check::at_most("xi_prime_54", (prime.icoh - 0.3530).abs(), 1e-3),
        Check::at_most("fock_closed_vs_simulated", sim, 1e-9),
    ];
    let worst = checks.iter().map(|c| c.residual).fold(0.0, f64::max);
    Ok(SuiteReport::new("schemes", worst, &[("simulated_n_max", schemes::SIMULATION_MAX_N)], checks, vec![]))
}
