//! Entropies in bits, the bosonic entropy `g`, capacity formulas and bounds,
//! and the continuity certificate for the `ξ(1/3)` family around `λ = 1/2`.

use serde::Serialize;

use crate::error::{arg, Error, Result};
use crate::fock_core::{self, DensityMatrix};
use crate::schemes;

pub use crate::linalg::hermitian_eigs;

const NEG_CLAMP: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbDist {
    weights: Vec<f64>,
}

impl ProbDist {
    /// Entries in `[-1e-14, 0)` are clamped to zero; the sum must be 1 within 1e-12.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        let mut weights = weights;
        for w in weights.iter_mut() {
            if !w.is_finite() || *w < -NEG_CLAMP {
                return Err(Error::Data(format!("invalid probability {w}")));
            }
            if *w < 0.0 {
                *w = 0.0;
            }
        }
        let s: f64 = weights.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::Data(format!("probabilities sum to {s}")));
        }
        Ok(Self { weights })
    }

    pub fn uniform(n: usize) -> Self {
        Self { weights: vec![1.0 / n as f64; n] }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Stable ascending sort.
    pub fn ascending(&self) -> ProbDist {
        let mut w = self.weights.clone();
        w.sort_by(f64::total_cmp);
        ProbDist { weights: w }
    }

    pub fn padded(&self, len: usize) -> ProbDist {
        let mut w = self.weights.clone();
        w.resize(len.max(w.len()), 0.0);
        ProbDist { weights: w }
    }
}

fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

pub fn shannon(p: &ProbDist) -> f64 {
    -p.weights.iter().map(|&x| xlog2x(x)).sum::<f64>()
}

fn aligned(u: &ProbDist, v: &ProbDist) -> (ProbDist, ProbDist) {
    let n = u.len().max(v.len());
    (u.padded(n), v.padded(n))
}

/// `D(u‖v)` in bits; `+∞` when `supp u ⊄ supp v`.
pub fn kl_divergence(u: &ProbDist, v: &ProbDist) -> f64 {
    let (u, v) = aligned(u, v);
    let mut acc = 0.0;
    for (&a, &b) in u.weights.iter().zip(&v.weights) {
        if a > 0.0 {
            if b <= 0.0 {
                return f64::INFINITY;
            }
            acc += a * (a / b).log2();
        }
    }
    acc.max(0.0)
}

/// `Σ |u_i − v_i|` (not halved).
pub fn total_variation(u: &ProbDist, v: &ProbDist) -> f64 {
    let (u, v) = aligned(u, v);
    u.weights.iter().zip(&v.weights).map(|(a, b)| (a - b).abs()).sum()
}

pub fn spectrum(rho: &DensityMatrix) -> Result<ProbDist> {
    ProbDist::new(rho.spectrum()?)
}

pub fn vn_entropy(rho: &DensityMatrix) -> Result<f64> {
    Ok(shannon(&spectrum(rho)?))
}

/// `I(A⟩B) = S(B) − S(AB)` where `A` is the listed modes and `B` the rest.
pub fn coherent_info(rho: &DensityMatrix, a_modes: &[usize]) -> Result<f64> {
    let b: Vec<usize> = (0..rho.dims.modes()).filter(|m| !a_modes.contains(m)).collect();
    if b.is_empty() || a_modes.is_empty() {
        return arg("both sides of the bipartition must be nonempty");
    }
    for &m in a_modes {
        rho.dims.check_mode(m)?;
    }
    let rho_b = fock_core::partial_trace(rho, &b)?;
    Ok(vn_entropy(&rho_b)? - vn_entropy(rho)?)
}

fn g_raw(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        (x + 1.0) * (x + 1.0).log2() - x * x.log2()
    }
}

/// Bosonic entropy `g(x) = (x+1) log2(x+1) − x log2 x`.
pub fn g(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return arg(format!("g needs x >= 0, got {x}"));
    }
    Ok(g_raw(x))
}

pub fn g_inverse(y: f64) -> Result<f64> {
    if !y.is_finite() || y < 0.0 {
        return arg(format!("g⁻¹ needs y >= 0, got {y}"));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    while g_raw(hi) < y {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    while hi - lo > 1e-12 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if g_raw(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn pure_loss_capacity(lambda: f64, n: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&lambda) || n.is_nan() || n < 0.0 {
        return arg(format!("need λ in [0, 1] and N >= 0, got {lambda}, {n}"));
    }
    Ok((g_raw(lambda * n) - g_raw((1.0 - lambda) * n)).max(0.0))
}

pub fn universal_cap_upper(m: usize, n: f64) -> Result<f64> {
    if m == 0 {
        return arg("mode count must be >= 1");
    }
    Ok(m as f64 * g(n / m as f64)?)
}

/// Lower and upper capacity bounds for `Φ_{λ,σ}` from the mean photon
/// number `ν_σ` and entropy `S_σ` (bits) of the environment.
pub fn lim_bounds(lambda: f64, n: f64, nu: f64, s: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&lambda) || [n, nu, s].iter().any(|v| v.is_nan() || *v < 0.0) {
        return arg(format!("invalid parameters λ={lambda}, N={n}, ν={nu}, S={s}"));
    }
    let lower = g_raw((1.0 - lambda) * g_inverse(s)? + lambda * n) - s - g_raw(lambda * nu + (1.0 - lambda) * n);
    let upper = g_raw(lambda * n + (1.0 - lambda) * nu) - (lambda + (1.0 - lambda) * s.exp2()).log2();
    Ok((lower, upper))
}

pub fn depolarizing_upper(lambda: f64, d: usize) -> f64 {
    ((1.0 - 2.0 * lambda) * (d as f64).log2()).max(0.0)
}

fn binary_entropy(x: f64) -> f64 {
    -xlog2x(x) - xlog2x(1.0 - x)
}

/// Continuity bound for conditional entropy: `|ΔH(A|B)| ≤ 2ε log2 d_A + (1+ε) h(ε/(1+ε))`
/// with `ε` the trace distance (half the trace norm).
pub fn afw_bound(eps: f64, dim_a: usize) -> f64 {
    if eps <= 0.0 {
        return 0.0;
    }
    2.0 * eps * (dim_a as f64).log2() + (1.0 + eps) * binary_entropy(eps / (1.0 + eps))
}

const AFW_ETA: f64 = 1.0 / 3.0;
const AFW_SUBGRID: usize = 21;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AfwCertificate {
    pub eps: f64,
    pub max_trace_distance: f64,
    pub icoh_center: f64,
    pub certified: f64,
}

/// Certificate valid on `[1/2 − ε, 1/2 + ε]` for `I(A⟩B)` of `ζ_AB(λ, 1/3)`.
/// The trace distance to the `λ = 1/2` state is maximized over a 21-point sub-grid.
pub fn afw_certificate(eps: f64) -> Result<AfwCertificate> {
    if !(0.0..0.5).contains(&eps) {
        return arg(format!("ε must lie in [0, 1/2), got {eps}"));
    }
    let center = schemes::zeta_ab(0.5, AFW_ETA)?;
    let icoh_center = coherent_info(&center, &[0])?;
    let mut max_trace_distance = 0.0f64;
    if eps > 0.0 {
        for k in 0..AFW_SUBGRID {
            let lambda = 0.5 - eps + 2.0 * eps * k as f64 / (AFW_SUBGRID - 1) as f64;
            let z = schemes::zeta_ab(lambda, AFW_ETA)?;
            max_trace_distance = max_trace_distance.max(0.5 * fock_core::trace_norm_diff(&z, &center)?);
        }
    }
    Ok(AfwCertificate { eps, max_trace_distance, icoh_center, certified: icoh_center - afw_bound(max_trace_distance, 2) })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AfwInterval {
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    pub certified: f64,
}

/// Widest `[1/2 − ε, 1/2 + ε]`, `ε ∈ eps_grid`, whose certificate reaches
/// `c_target`; `None` when no grid point does.
pub fn afw_interval(c_target: f64, eps_grid: &[f64]) -> Result<Option<AfwInterval>> {
    let mut best: Option<AfwInterval> = None;
    for &eps in eps_grid {
        let c = afw_certificate(eps)?;
        if c.certified >= c_target && c.certified > 0.0 && best.is_none_or(|b| 0.5 - eps < b.lambda_lo) {
            best = Some(AfwInterval { lambda_lo: 0.5 - eps, lambda_hi: 0.5 + eps, certified: c.certified });
        }
    }
    Ok(best)
}

/// `n = 2` certificate with the gap lower bound `ε/4`: `(2/ln 2)(ε/4)²`.
pub fn n2_branch_floor(eps: f64) -> f64 {
    eps * eps / (8.0 * std::f64::consts::LN_2)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BalancedConstant {
    pub eps: f64,
    pub afw_part: f64,
    pub n2_part: f64,
    pub value: f64,
}

/// `max_ε min(c_AFW(ε), ε²/(8 ln 2))` over `eps_grid`.
pub fn balanced_constant(eps_grid: &[f64]) -> Result<BalancedConstant> {
    let mut best = BalancedConstant { eps: 0.0, afw_part: 0.0, n2_part: 0.0, value: f64::NEG_INFINITY };
    for &eps in eps_grid {
        let afw_part = afw_certificate(eps)?.certified;
        let n2_part = n2_branch_floor(eps);
        let value = afw_part.min(n2_part);
        if value > best.value {
            best = BalancedConstant { eps, afw_part, n2_part, value };
        }
    }
    if best.value == f64::NEG_INFINITY {
        return arg("empty ε grid");
    }
    Ok(best)
}
