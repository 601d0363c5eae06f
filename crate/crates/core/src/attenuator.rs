//! General attenuator `Φ_{λ,σ}(ρ) = Tr_E[U_λ (ρ ⊗ σ) U_λ†]`, its weak
//! complementary, the composition law and the multi-splitter cascade.
//!
//! Outputs are exact: a mode with `d_in` levels mixed with an environment of
//! `d_env` levels leaves the splitter with `d_in + d_env − 1` levels.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::beamsplitter::{self, BlockCache};
use crate::error::{arg, Error, Result};
use crate::fock_core::{self, DensityMatrix, ModeDims, StateVector};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const COMPONENT_CUT: f64 = 1e-15;

#[derive(Debug, Clone)]
pub struct ChannelSpec {
    pub lambda: f64,
    pub env: DensityMatrix,
    /// Probability mass dropped when the environment was truncated.
    pub tail_mass: f64,
}

impl ChannelSpec {
    pub fn new(lambda: f64, env: DensityMatrix) -> Result<Self> {
        beamsplitter::check_lambda(lambda)?;
        if env.dims.modes() != 1 {
            return arg(format!("environment must be single-mode, got {} modes", env.dims.modes()));
        }
        Ok(Self { lambda, env, tail_mass: 0.0 })
    }

    pub fn out_cutoff(&self, d_in: usize) -> usize {
        d_in + self.env.dim() - 1
    }
}

pub fn pure_loss(lambda: f64) -> Result<ChannelSpec> {
    ChannelSpec::new(lambda, DensityMatrix::fock1(0, 1)?)
}

/// Thermal attenuator with environment τ_ν. Without an explicit cutoff the
/// environment is truncated at tail mass below 1e-12.
pub fn thermal_attenuator(lambda: f64, nu: f64, cutoff: Option<usize>) -> Result<ChannelSpec> {
    let cutoff = match cutoff {
        Some(c) => c,
        None => fock_core::thermal_cutoff(nu, 1e-12)?,
    };
    let mut spec = ChannelSpec::new(lambda, fock_core::thermal_state(nu, cutoff)?)?;
    spec.tail_mass = fock_core::thermal_tail(nu, cutoff);
    Ok(spec)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Keep {
    System,
    Environment,
}

fn act(spec: &ChannelSpec, rho: &DensityMatrix, mode: usize, keep: Keep) -> Result<DensityMatrix> {
    rho.dims.check_mode(mode)?;
    let d_in = rho.dims.dims()[mode];
    let d_out = spec.out_cutoff(d_in);
    let cache = BlockCache::new(spec.lambda, d_out - 1)?;
    let out_dims = rho.dims.with_mode(mode, d_out);
    let stride = out_dims.strides()[mode];

    let (occ, base): (Vec<usize>, Vec<usize>) = (0..rho.dim())
        .map(|i| {
            let mut o = rho.dims.occupation(i);
            let b = o[mode];
            o[mode] = 0;
            (b, out_dims.index(&o).expect("spectator index"))
        })
        .unzip();
    let env: Vec<(usize, usize, C64)> = spec
        .env
        .mat
        .indexed_iter()
        .filter(|(_, z)| **z != ZERO)
        .map(|((e, f), z)| (e, f, *z))
        .collect();

    let d = out_dims.total();
    let mut out = Array2::<C64>::zeros((d, d));
    for ((i, j), &r) in rho.mat.indexed_iter() {
        if r == ZERO {
            continue;
        }
        let (b1, b2) = (occ[i], occ[j]);
        for &(e, f, s) in &env {
            let (n1, n2) = (b1 + e, b2 + f);
            let w = s * r;
            // `k` is the traced output occupation; the kept one is `n - k`.
            for k in 0..=n1.min(n2) {
                let (c1, c2, k1, k2) = match keep {
                    Keep::System => (cache.elem(n1, n1 - k, b1), cache.elem(n2, n2 - k, b2), n1 - k, n2 - k),
                    Keep::Environment => (cache.elem(n1, k, b1), cache.elem(n2, k, b2), n1 - k, n2 - k),
                };
                let c = c1 * c2;
                if c == 0.0 {
                    continue;
                }
                out[[base[i] + k1 * stride, base[j] + k2 * stride]] += w * c;
            }
        }
    }
    DensityMatrix::from_parts(out_dims, out)
}

fn single_mode(rho: &DensityMatrix) -> Result<()> {
    if rho.dims.modes() != 1 {
        return Err(Error::Dimension(format!("expected a single-mode state, got {} modes", rho.dims.modes())));
    }
    Ok(())
}

pub fn apply(spec: &ChannelSpec, rho: &DensityMatrix) -> Result<DensityMatrix> {
    single_mode(rho)?;
    act(spec, rho, 0, Keep::System)
}

/// `(I ⊗ Φ)(ρ)` with the channel on `mode` and identity elsewhere.
pub fn apply_bipartite(spec: &ChannelSpec, rho: &DensityMatrix, mode: usize) -> Result<DensityMatrix> {
    act(spec, rho, mode, Keep::System)
}

/// `Tr_B[U_λ (ρ ⊗ σ) U_λ†]`.
pub fn weak_complementary(spec: &ChannelSpec, rho: &DensityMatrix) -> Result<DensityMatrix> {
    single_mode(rho)?;
    act(spec, rho, 0, Keep::Environment)
}

pub fn weak_complementary_bipartite(spec: &ChannelSpec, rho: &DensityMatrix, mode: usize) -> Result<DensityMatrix> {
    act(spec, rho, mode, Keep::Environment)
}

/// A fixed, varied set of single-mode probe states on `d` levels.
pub fn probe_states(d: usize) -> Result<Vec<DensityMatrix>> {
    let dims = ModeDims::single(d)?;
    let mut out = vec![DensityMatrix::fock(dims.clone(), &[0])?, DensityMatrix::fock(dims.clone(), &[d - 1])?];
    if d >= 2 {
        let amps = (0..d).map(|k| C64::from_polar(1.0 / (1.0 + k as f64), 0.7 * k as f64)).collect();
        out.push(StateVector::normalized(dims.clone(), amps)?.projector());
        let probs: Vec<f64> = (0..d).map(|k| (k + 1) as f64).collect();
        let s: f64 = probs.iter().sum();
        let mut mixed = DensityMatrix::diagonal(dims.clone(), &probs.iter().map(|p| p / s).collect::<Vec<_>>())?;
        let c = 0.5 * (mixed.mat[[0, 0]].re * mixed.mat[[1, 1]].re).sqrt();
        mixed.mat[[0, 1]] = C64::new(0.0, c);
        mixed.mat[[1, 0]] = C64::new(0.0, -c);
        out.push(mixed);
    }
    Ok(out)
}

/// Max entrywise gap between `Φ_{λ,σ}∘Φ_{μ,ω}` and `Φ_{λμ,τ}` with
/// `τ = Φ_{λ(1−μ)/(1−λμ),σ}(ω)`, over `probes`.
pub fn compose_check(
    lambda: f64,
    sigma: &DensityMatrix,
    mu: f64,
    omega: &DensityMatrix,
    probes: &[DensityMatrix],
) -> Result<f64> {
    if !(lambda > 0.0 && lambda < 1.0 && mu > 0.0 && mu < 1.0) {
        return arg(format!("composition needs λ, μ in (0, 1), got {lambda}, {mu}"));
    }
    let kappa = lambda * (1.0 - mu) / (1.0 - lambda * mu);
    let tau = apply(&ChannelSpec::new(kappa, sigma.clone())?, omega)?;
    let outer = ChannelSpec::new(lambda, sigma.clone())?;
    let inner = ChannelSpec::new(mu, omega.clone())?;
    let joint = ChannelSpec::new(lambda * mu, tau)?;
    let residuals = probes
        .par_iter()
        .map(|rho| {
            let lhs = apply(&outer, &apply(&inner, rho)?)?;
            let rhs = apply(&joint, rho)?;
            fock_core::max_entry_diff(&lhs, &rhs)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(residuals.into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Clone)]
pub struct CascadeSpec {
    pub lambdas: Vec<f64>,
    /// Joint state of the arms `B_1..B_k`, one mode each.
    pub omega: DensityMatrix,
}

impl CascadeSpec {
    pub fn new(lambdas: Vec<f64>, omega: DensityMatrix) -> Result<Self> {
        if lambdas.len() < 2 {
            return arg("a cascade needs at least two splitters");
        }
        for &l in &lambdas {
            beamsplitter::check_lambda(l)?;
        }
        if omega.dims.modes() != lambdas.len() {
            return Err(Error::Dimension(format!(
                "{} transmissivities but Ω has {} modes",
                lambdas.len(),
                omega.dims.modes()
            )));
        }
        Ok(Self { lambdas, omega })
    }

    /// The cascade reproducing `Φ_{Πλ_i, σ}`.
    pub fn equivalent_to(sigma: &DensityMatrix, lambdas: Vec<f64>) -> Result<Self> {
        let omega = build_omega(sigma, &lambdas)?;
        Self::new(lambdas, omega)
    }
}

/// `η_i = λ_i (1 − λ_1…λ_{i−1}) / (1 − λ_1…λ_i)` for `i = 2..=k`.
pub fn eta_chain(lambdas: &[f64]) -> Result<Vec<f64>> {
    if lambdas.len() < 2 {
        return arg("η chain needs at least two transmissivities");
    }
    for &l in lambdas {
        beamsplitter::check_lambda(l)?;
    }
    let mut prev = lambdas[0];
    let mut out = Vec::with_capacity(lambdas.len() - 1);
    for &l in &lambdas[1..] {
        let cur = prev * l;
        out.push(if (1.0 - cur).abs() < 1e-14 { l } else { l * (1.0 - prev) / (1.0 - cur) });
        prev = cur;
    }
    Ok(out)
}

fn mix(parts: Vec<(f64, DensityMatrix)>) -> Result<DensityMatrix> {
    let mut dims = parts.first().ok_or_else(|| Error::Data("empty ensemble".into()))?.1.dims.clone();
    for (_, r) in &parts[1..] {
        dims = dims.join(&r.dims)?;
    }
    let d = dims.total();
    let mut mat = Array2::<C64>::zeros((d, d));
    for (w, r) in parts {
        mat.scaled_add(C64::new(w, 0.0), &r.padded(&dims)?.mat);
    }
    DensityMatrix::from_parts(dims, mat)
}

/// `Ω = U_{η_2}†…U_{η_k}† (σ ⊗ |0…0⟩⟨0…0|) U_{η_k}…U_{η_2}` on modes `B_1..B_k`.
pub fn build_omega(sigma: &DensityMatrix, lambdas: &[f64]) -> Result<DensityMatrix> {
    single_mode(sigma)?;
    let etas = eta_chain(lambdas)?;
    let k = lambdas.len();
    let rest = StateVector::vacuum(ModeDims::new(vec![1; k - 1])?);
    let parts = sigma
        .pure_components(COMPONENT_CUT)?
        .into_par_iter()
        .map(|(w, s)| {
            let mut psi = s.tensor(&rest);
            for i in (2..=k).rev() {
                psi = beamsplitter::bs_apply_modes(&psi, 0, i - 1, etas[i - 2], true)?;
            }
            Ok((w, psi.projector()))
        })
        .collect::<Result<Vec<_>>>()?;
    mix(parts)
}

/// `Tr_{B_1…B_k}[U_{λ_k}^{AB_k}…U_{λ_1}^{AB_1} (ρ ⊗ Ω) (…)†]`.
pub fn cascade_apply(spec: &CascadeSpec, rho: &DensityMatrix) -> Result<DensityMatrix> {
    single_mode(rho)?;
    if spec.lambdas.iter().product::<f64>() <= 0.0 {
        return arg("cascade needs λ_1…λ_k > 0");
    }
    let inputs = rho.pure_components(COMPONENT_CUT)?;
    let envs = spec.omega.pure_components(COMPONENT_CUT)?;
    let pairs: Vec<(f64, &StateVector, &StateVector)> =
        inputs.iter().flat_map(|(wa, a)| envs.iter().map(move |(wb, b)| (wa * wb, a, b))).collect();
    let parts = pairs
        .into_par_iter()
        .map(|(w, a, b)| {
            let mut psi = a.tensor(b);
            for (i, &l) in spec.lambdas.iter().enumerate() {
                psi = beamsplitter::bs_apply_modes(&psi, 0, i + 1, l, false)?;
            }
            Ok((w, psi.reduced(&[0])?))
        })
        .collect::<Result<Vec<_>>>()?;
    mix(parts)
}
