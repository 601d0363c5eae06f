//! Concrete transmission schemes, the environment selector and the
//! certified capacity floor.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::attenuator::{self, ChannelSpec};
use crate::beamsplitter;
use crate::entropy::{coherent_info, pure_loss_capacity, shannon, vn_entropy};
use crate::error::{arg, Error, Result};
use crate::fock_core::{self, DensityMatrix, ModeDims, StateVector};
use crate::majorization::{self, bound_chain, p_dist, q_dist};

pub const DEFAULT_EPS: f64 = 0.05;
pub const INPUT_ENERGY: f64 = 0.5;
const CROSS_CHECK_TOL: f64 = 1e-9;
const CLOSED_FORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct SchemeResult {
    pub scheme: &'static str,
    pub eta: Option<f64>,
    pub n: Option<usize>,
    pub lambda: f64,
    pub icoh: f64,
    pub energy: f64,
    pub cutoffs: Vec<usize>,
    /// Agreement with an independent evaluation, when one was made.
    pub residual: Option<f64>,
    pub degenerate: bool,
}

/// `√η|0⟩ − √(1−η)|1⟩`.
pub fn xi_state(eta: f64) -> Result<StateVector> {
    StateVector::from_real(&[2], &[eta.sqrt(), -(1.0 - eta).sqrt()])
}

/// `√(η(1−η))|00⟩ + (1−η)|01⟩ + √η|10⟩` on `A ⊗ B`.
pub fn psi_state(eta: f64) -> Result<StateVector> {
    StateVector::from_real(&[2, 2], &[(eta * (1.0 - eta)).sqrt(), 1.0 - eta, eta.sqrt(), 0.0])
}

fn check_eta(eta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eta) {
        return arg(format!("η must lie in [0, 1], got {eta}"));
    }
    Ok(())
}

/// `ζ_AB(λ, η) = (I ⊗ Φ_{λ,ξ(η)})(Ψ(η))` on `2 × 3` levels.
pub fn zeta_ab(lambda: f64, eta: f64) -> Result<DensityMatrix> {
    check_eta(eta)?;
    let spec = ChannelSpec::new(lambda, xi_state(eta)?.projector())?;
    attenuator::apply_bipartite(&spec, &psi_state(eta)?.projector(), 1)
}

/// Closed forms of `ζ_AB(1/2, η)` and `ζ_B(1/2, η)`.
pub fn zeta_half_closed(eta: f64) -> (Array2<f64>, Array2<f64>) {
    let e = eta;
    let s2 = std::f64::consts::SQRT_2;
    let a = 0.5 * (1.0 + e - 3.0 * e * e + e.powi(3));
    let b = -(1.0 - e).powi(2) * e / s2;
    let c = e * (1.0 - e).sqrt();
    let d = -(1.0 - e) * e.powf(1.5) / s2;
    let f = 0.5 * (1.0 - e).powi(3);
    let g = -(1.0 - e).powf(1.5) * e / s2;
    let h = 0.5 * (1.0 - e).powi(2) * e.sqrt();
    let k = 0.5 * e * (1.0 + e);
    let m = -e.powf(1.5) * (1.0 - e).sqrt() / s2;
    let p = 0.5 * (1.0 - e) * e;
    let ab = ndarray::arr2(&[
        [a, 0.0, b, c, d, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [b, 0.0, f, g, h, 0.0],
        [c, 0.0, g, k, m, 0.0],
        [d, 0.0, h, m, p, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    ]);
    let bb = ndarray::arr2(&[[0.5 * (1.0 + 2.0 * e - 2.0 * e * e + e.powi(3)), m, b], [m, p, 0.0], [b, 0.0, f]]);
    (ab, bb)
}

fn real_diff(z: &DensityMatrix, r: &Array2<f64>) -> f64 {
    z.mat.iter().zip(r.iter()).map(|(a, b)| (a - C64::new(*b, 0.0)).norm()).fold(0.0, f64::max)
}

pub fn scheme1_icoh(eta: f64, lambda: f64) -> Result<SchemeResult> {
    check_eta(eta)?;
    let energy = (1.0 - eta).powi(2);
    if eta == 0.0 || eta == 1.0 {
        return Ok(SchemeResult {
            scheme: "xi",
            eta: Some(eta),
            n: None,
            lambda,
            icoh: 0.0,
            energy,
            cutoffs: vec![2, 3],
            residual: None,
            degenerate: true,
        });
    }
    let z = zeta_ab(lambda, eta)?;
    let icoh = coherent_info(&z, &[0])?;
    let residual = if lambda == 0.5 {
        let (ab, b) = zeta_half_closed(eta);
        let zb = fock_core::partial_trace(&z, &[1])?;
        let r = real_diff(&z, &ab).max(real_diff(&zb, &b));
        if r > CLOSED_FORM_TOL {
            return Err(Error::Consistency(format!("ζ_AB(1/2, {eta}) deviates from closed form by {r:.3e}")));
        }
        Some(r)
    } else {
        None
    };
    Ok(SchemeResult {
        scheme: "xi",
        eta: Some(eta),
        n: None,
        lambda,
        icoh,
        energy,
        cutoffs: z.dims.dims().to_vec(),
        residual,
        degenerate: false,
    })
}

/// Best `η` for `I(A⟩B)` of `ζ_AB(λ, η)`: uniform scan then golden-section refinement.
pub fn scheme1_max(lambda: f64, points: usize) -> Result<(f64, f64)> {
    let f = |eta: f64| scheme1_icoh(eta, lambda).map(|r| r.icoh);
    let grid = majorization::span(0.0, 1.0, points.max(3));
    let vals = grid.par_iter().map(|&e| f(e)).collect::<Result<Vec<f64>>>()?;
    let k = (0..vals.len()).max_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap_or(0);
    let (mut lo, mut hi) = (grid[k.saturating_sub(1)], grid[(k + 1).min(grid.len() - 1)]);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut x1, mut x2) = (hi - phi * (hi - lo), lo + phi * (hi - lo));
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    while hi - lo > 1e-10 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1)?;
        }
    }
    let x = 0.5 * (lo + hi);
    let best = f(x)?.max(vals[k]);
    Ok(if best == vals[k] { (grid[k], best) } else { (x, best) })
}

/// Relative phase between `|n−1⟩` and `|n⟩` in `ξ'(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum XiPrimeSign {
    Plus,
    Minus,
}

pub fn xi_prime_state(n: usize, sign: XiPrimeSign) -> Result<StateVector> {
    if n < 1 {
        return arg("ξ'(n) needs n >= 1");
    }
    let mut amps = vec![0.0; n + 1];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    amps[n - 1] = s;
    amps[n] = if sign == XiPrimeSign::Plus { s } else { -s };
    StateVector::from_real(&[n + 1], &amps)
}

/// `½(|0⟩(|n−1⟩+|n⟩) + |1⟩(|n−3⟩+|n−2⟩))`.
pub fn psi_prime_state(n: usize) -> Result<StateVector> {
    if n < 3 {
        return arg(format!("Ψ'(n) needs n >= 3, got {n}"));
    }
    let d = n + 1;
    let mut amps = vec![0.0; 2 * d];
    for b in [n - 1, n] {
        amps[b] = 0.5;
    }
    for b in [n - 3, n - 2] {
        amps[d + b] = 0.5;
    }
    StateVector::from_real(&[2, d], &amps)
}

/// `I(A⟩B)` of `(I ⊗ Φ_{1/2,ξ'(n)})(Ψ'(n))` with `ξ'(n) = (|n−1⟩ − |n⟩)/√2`.
pub fn scheme2_icoh(n: usize) -> Result<SchemeResult> {
    scheme2_icoh_signed(n, XiPrimeSign::Minus)
}

pub fn scheme2_icoh_signed(n: usize, sign: XiPrimeSign) -> Result<SchemeResult> {
    let psi = psi_prime_state(n)?;
    let joint = psi.tensor(&xi_prime_state(n, sign)?);
    let out = beamsplitter::bs_apply_modes(&joint, 1, 2, 0.5, false)?;
    let need = 2 * n + 1;
    if out.dims.dims()[1] < need {
        return Err(Error::Dimension(format!("output cutoff {} below required {need}", out.dims.dims()[1])));
    }
    // the global state is pure, so S(AB) = S(E)
    let s_b = vn_entropy(&out.reduced(&[1])?)?;
    let s_e = vn_entropy(&out.reduced(&[2])?)?;
    let energy = fock_core::mean_photon_mode(&psi.projector(), 1)?;
    Ok(SchemeResult {
        scheme: "xi_prime",
        eta: None,
        n: Some(n),
        lambda: 0.5,
        icoh: s_b - s_e,
        energy,
        cutoffs: out.dims.dims().to_vec(),
        residual: None,
        degenerate: false,
    })
}

/// `(|01⟩ + |10⟩)/√2`.
pub fn bell_state() -> StateVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    StateVector::from_real(&[2, 2], &[0.0, s, s, 0.0]).expect("normalized")
}

/// `ω_AB(n, λ) = (I ⊗ Φ_{λ,|n⟩})(Ψ)` with `Ψ` the Bell state above.
pub fn omega_ab(n: usize, lambda: f64) -> Result<DensityMatrix> {
    let spec = ChannelSpec::new(lambda, DensityMatrix::fock1(n, n + 1)?)?;
    attenuator::apply_bipartite(&spec, &bell_state().projector(), 1)
}

pub const SIMULATION_MAX_N: usize = 6;

pub fn main_scheme_icoh(n: usize, lambda: f64) -> Result<SchemeResult> {
    let closed = shannon(&p_dist(n, lambda)?.dist) - shannon(&q_dist(n, lambda)?.dist);
    let mut residual = None;
    let mut cutoffs = vec![2, n + 2];
    if n <= SIMULATION_MAX_N {
        let w = omega_ab(n, lambda)?;
        let sim = coherent_info(&w, &[0])?;
        let r = (sim - closed).abs();
        if r > CROSS_CHECK_TOL {
            return Err(Error::Consistency(format!("ℐ({n}, {lambda}): closed form {closed} vs simulation {sim}")));
        }
        residual = Some(r);
        cutoffs = w.dims.dims().to_vec();
    }
    Ok(SchemeResult {
        scheme: "fock",
        eta: None,
        n: Some(n),
        lambda,
        icoh: closed,
        energy: fock_core::mean_photon_mode(&bell_state().projector(), 1)?,
        cutoffs,
        residual,
        degenerate: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "branch", content = "n", rename_all = "snake_case")]
pub enum Branch {
    Vacuum,
    XiOneThird,
    Fock(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaChoice {
    pub branch: Branch,
    pub eps: f64,
}

impl SigmaChoice {
    pub fn env_state(&self) -> Result<DensityMatrix> {
        match self.branch {
            Branch::Vacuum => DensityMatrix::fock1(0, 1),
            Branch::XiOneThird => Ok(xi_state(1.0 / 3.0)?.projector()),
            Branch::Fock(n) => DensityMatrix::fock1(n, n + 1),
        }
    }
}

fn check_floor_args(lambda: f64, eps: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return arg(format!("λ must lie in (0, 1], got {lambda}"));
    }
    if !(eps > 0.0 && eps < 1.0 / 6.0) {
        return arg(format!("ε must lie in (0, 1/6), got {eps}"));
    }
    Ok(())
}

/// Environment achieving the floor at `λ`. `λ = 1/n` selects `|n⟩`.
pub fn sigma_selector(lambda: f64, eps: f64) -> Result<SigmaChoice> {
    check_floor_args(lambda, eps)?;
    let branch = if lambda >= 0.5 + eps {
        Branch::Vacuum
    } else if (lambda - 0.5).abs() <= eps {
        Branch::XiOneThird
    } else {
        let n = (1.0 / lambda + 1e-9).floor() as usize;
        Branch::Fock(n.max(2))
    };
    Ok(SigmaChoice { branch, eps })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FloorValue {
    pub lambda: f64,
    pub choice: SigmaChoice,
    pub value: f64,
}

/// Branch-wise certified lower bound on the single-copy quantum capacity at
/// input energy 1/2.
pub fn capacity_floor(lambda: f64, eps: f64) -> Result<FloorValue> {
    let choice = sigma_selector(lambda, eps)?;
    let value = match choice.branch {
        Branch::Vacuum => pure_loss_capacity(lambda, INPUT_ENERGY)?,
        Branch::XiOneThird => coherent_info(&zeta_ab(lambda, 1.0 / 3.0)?, &[0])?,
        Branch::Fock(n) => bound_chain(n, lambda, eps)?.certified,
    };
    if value.is_nan() || value <= 0.0 {
        return Err(Error::Falsified(format!("non-positive floor {value} at λ = {lambda} ({:?})", choice.branch)));
    }
    Ok(FloorValue { lambda, choice, value })
}

/// `1/(8 e² ln 2)`, the `λ → 0` limit of the certified floor.
pub fn small_lambda_asymptote() -> f64 {
    1.0 / (8.0 * std::f64::consts::E.powi(2) * std::f64::consts::LN_2)
}

/// Grid for floor sweeps: log-uniform points on `[λ_min, 1]` merged with
/// every `1/n` and the branch edges inside the range.
pub fn floor_grid(lambda_min: f64, eps: f64, points: usize) -> Result<Vec<f64>> {
    check_floor_args(lambda_min, eps)?;
    let (a, b) = (lambda_min.ln(), 0.0f64);
    let mut grid: Vec<f64> = majorization::span(a, b, points.max(2)).into_iter().map(f64::exp).collect();
    let mut n = 1;
    while 1.0 / n as f64 >= lambda_min {
        grid.push(1.0 / n as f64);
        n += 1;
    }
    for edge in [0.5 - eps, 0.5, 0.5 + eps, 1.0 / 3.0] {
        if edge >= lambda_min {
            grid.push(edge);
        }
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|x, y| (*x - *y).abs() < 1e-15);
    Ok(grid)
}

pub fn floor_sweep(grid: &[f64], eps: f64) -> Result<Vec<FloorValue>> {
    grid.par_iter().map(|&l| capacity_floor(l, eps)).collect()
}

/// Minimum of `ℐ(n, λ)` over `n = 3..=n_max`, `points` values per interval.
pub fn direct_sweep_min(n_max: usize, points: usize) -> Result<(usize, f64, f64)> {
    let mins = (3..=n_max)
        .into_par_iter()
        .map(|n| {
            let mut best = (n, f64::NAN, f64::INFINITY);
            for l in majorization::lambda_grid(n, points) {
                let v = shannon(&p_dist(n, l)?.dist) - shannon(&q_dist(n, l)?.dist);
                if v < best.2 {
                    best = (n, l, v);
                }
            }
            Ok(best)
        })
        .collect::<Result<Vec<_>>>()?;
    mins.into_iter().min_by(|a, b| a.2.total_cmp(&b.2)).ok_or_else(|| Error::Argument("n_max must be >= 3".into()))
}

/// Minimum eigenvalue of the partial transpose of `(I ⊗ E_λ)(Ψ)`.
pub fn ppt_check(lambda: f64) -> Result<f64> {
    let out = attenuator::apply_bipartite(&attenuator::pure_loss(lambda)?, &bell_state().projector(), 1)?;
    let pt = fock_core::partial_transpose(&out, &[1])?;
    Ok(crate::linalg::hermitian_eigvals(&pt.mat)?[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    IcohMain,
    IcohXi,
    IcohXiPrime,
}

impl std::str::FromStr for FigureId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "icoh_main" => Ok(Self::IcohMain),
            "icoh_xi" => Ok(Self::IcohXi),
            "icoh_xi_prime" => Ok(Self::IcohXiPrime),
            other => arg(format!("unknown figure id {other:?}")),
        }
    }
}

impl FigureId {
    pub fn name(&self) -> &'static str {
        match self {
            Self::IcohMain => "icoh_main",
            Self::IcohXi => "icoh_xi",
            Self::IcohXiPrime => "icoh_xi_prime",
        }
    }
}

#[derive(Debug, Clone)]
pub struct FigureGrid {
    /// Curves of the main figure.
    pub ns: Vec<usize>,
    /// Points per curve for the λ and η axes.
    pub points: usize,
    pub n_range: (usize, usize),
}

impl Default for FigureGrid {
    fn default() -> Self {
        Self { ns: vec![2, 5, 10, 20], points: 301, n_range: (3, 35) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub curve: String,
    pub x: f64,
    pub y: f64,
}

pub fn figure_data(id: FigureId, grid: &FigureGrid) -> Result<Vec<CurvePoint>> {
    if grid.points < 2 {
        return arg("figure grids need at least 2 points");
    }
    match id {
        FigureId::IcohMain => {
            let mut jobs = Vec::new();
            for &n in &grid.ns {
                if n < 1 {
                    return arg("curve index n must be >= 1");
                }
                for k in 1..=grid.points {
                    jobs.push((n, k as f64 / (grid.points + 1) as f64));
                }
            }
            jobs.par_iter()
                .map(|&(n, l)| {
                    let y = shannon(&p_dist(n, l)?.dist) - shannon(&q_dist(n, l)?.dist);
                    Ok(CurvePoint { curve: format!("n={n}"), x: l, y })
                })
                .collect()
        }
        FigureId::IcohXi => {
            let mut etas = majorization::span(0.0, 1.0, grid.points);
            if !etas.contains(&(1.0 / 3.0)) {
                etas.push(1.0 / 3.0);
                etas.sort_by(f64::total_cmp);
            }
            etas.par_iter()
                .map(|&e| Ok(CurvePoint { curve: "lambda=0.5".into(), x: e, y: scheme1_icoh(e, 0.5)?.icoh }))
                .collect()
        }
        FigureId::IcohXiPrime => {
            let (lo, hi) = grid.n_range;
            (lo.max(3)..=hi)
                .into_par_iter()
                .map(|n| Ok(CurvePoint { curve: "xi_prime".into(), x: n as f64, y: scheme2_icoh(n)?.icoh }))
                .collect()
        }
    }
}

/// `I(A⟩B)` of `ζ_AB(λ, 1/3)` for the continuity certificate in [`entropy`].
pub fn xi_third_icoh(lambda: f64) -> Result<f64> {
    coherent_info(&zeta_ab(lambda, 1.0 / 3.0)?, &[0])
}

/// Environment `|n⟩` as a one-mode space with `n + 1` levels.
pub fn fock_env(n: usize) -> Result<DensityMatrix> {
    DensityMatrix::fock(ModeDims::single(n + 1)?, &[n])
}
