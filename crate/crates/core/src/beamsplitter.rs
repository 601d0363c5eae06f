//! Beam splitter `U_λ = exp(θ (a†b − a b†))`, `θ = arccos √λ`.
//!
//! `U_λ` conserves `a†a + b†b`, so it is a direct sum of blocks. Block `N`
//! acts on `|ℓ⟩|N−ℓ⟩`, `ℓ = 0..=N`, indexed by the first-mode occupation.
//! In that basis the generator is real antisymmetric and tridiagonal,
//! `G[ℓ+1][ℓ] = √((ℓ+1)(N−ℓ)) = −G[ℓ][ℓ+1]`.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;

use crate::error::{arg, Error, Result};
use crate::fock_core::{ModeDims, StateVector};
use crate::linalg;

#[derive(Debug, Clone)]
pub struct BlockUnitary {
    pub n: usize,
    pub mat: Array2<f64>,
}

impl BlockUnitary {
    /// `‖UᵀU − I‖_max`.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.mat.t().dot(&self.mat);
        let mut worst = 0.0f64;
        for ((i, j), x) in p.indexed_iter() {
            let e = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((x - e).abs());
        }
        worst
    }
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda) {
        return arg(format!("transmissivity must lie in [0, 1], got {lambda}"));
    }
    Ok(())
}

pub fn bs_block(n: usize, lambda: f64) -> Result<BlockUnitary> {
    check_lambda(lambda)?;
    let d = n + 1;
    let theta = lambda.sqrt().acos();
    if theta == 0.0 || n == 0 {
        return Ok(BlockUnitary { n, mat: Array2::eye(d) });
    }
    // H = iG is Hermitian; exp(θG) = V diag(exp(-iθw)) V†.
    let mut h = Array2::<C64>::zeros((d, d));
    for l in 0..n {
        let g = (((l + 1) * (n - l)) as f64).sqrt();
        h[[l + 1, l]] = C64::new(0.0, g);
        h[[l, l + 1]] = C64::new(0.0, -g);
    }
    let eig = linalg::hermitian_eigs(&h)?;
    let phases: Vec<C64> = eig.values.iter().map(|&w| C64::from_polar(1.0, -theta * w)).collect();
    let v = &eig.vectors;
    let mut mat = Array2::<f64>::zeros((d, d));
    let mut worst_imag = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..d {
                acc += v[[i, k]] * phases[k] * v[[j, k]].conj();
            }
            mat[[i, j]] = acc.re;
            worst_imag = worst_imag.max(acc.im.abs());
        }
    }
    if worst_imag > 1e-9 {
        return Err(Error::Consistency(format!("block {n} has imaginary part {worst_imag:.3e}")));
    }
    Ok(BlockUnitary { n, mat })
}

/// All blocks `0..=max_n` for one transmissivity.
#[derive(Debug, Clone)]
pub struct BlockCache {
    pub lambda: f64,
    blocks: Vec<BlockUnitary>,
}

impl BlockCache {
    pub fn new(lambda: f64, max_n: usize) -> Result<Self> {
        check_lambda(lambda)?;
        let blocks = (0..=max_n).into_par_iter().map(|n| bs_block(n, lambda)).collect::<Result<Vec<_>>>()?;
        Ok(Self { lambda, blocks })
    }

    pub fn max_n(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn block(&self, n: usize) -> &BlockUnitary {
        &self.blocks[n]
    }

    /// `⟨ℓ_out, N−ℓ_out| U |ℓ_in, N−ℓ_in⟩`.
    #[inline]
    pub fn elem(&self, n: usize, l_out: usize, l_in: usize) -> f64 {
        self.blocks[n].mat[[l_out, l_in]]
    }
}

fn ln_binom(n: usize, k: usize) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// Coefficient of `|ℓ⟩|n−ℓ⟩` in `U_λ|0⟩|n⟩`.
pub fn coeff_0n(n: usize, lambda: f64, l: usize) -> Result<f64> {
    check_lambda(lambda)?;
    if l > n {
        return arg(format!("ℓ = {l} exceeds n = {n}"));
    }
    let mag = (0.5 * ln_binom(n, l)).exp() * (1.0 - lambda).powf(l as f64 / 2.0) * lambda.powf((n - l) as f64 / 2.0);
    Ok(mag)
}

/// Coefficient of `|ℓ⟩|n+1−ℓ⟩` in `U_λ|1⟩|n⟩`, for `λ ∈ (0, 1)`.
pub fn coeff_1n(n: usize, lambda: f64, l: usize) -> Result<f64> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return arg(format!("closed form needs λ in (0, 1), got {lambda}"));
    }
    if l > n + 1 {
        return arg(format!("ℓ = {l} exceeds n + 1 = {}", n + 1));
    }
    let m = (n + 1) as f64;
    let pref = -1.0 / (m * (1.0 - lambda)).sqrt();
    let root = (0.5 * ln_binom(n + 1, l)).exp()
        * (1.0 - lambda).powf(l as f64 / 2.0)
        * lambda.powf((n as f64 - l as f64) / 2.0);
    Ok(pref * root * (m * (1.0 - lambda) - l as f64))
}

fn apply_pair(
    psi: &StateVector,
    first: usize,
    second: usize,
    cache: &BlockCache,
    adjoint: bool,
    out_dims: ModeDims,
) -> Result<StateVector> {
    let out_strides = out_dims.strides();
    let mut out = Array1::<C64>::zeros(out_dims.total());
    for (idx, &amp) in psi.amps.iter().enumerate() {
        if amp == C64::new(0.0, 0.0) {
            continue;
        }
        let occ = psi.dims.occupation(idx);
        let (l, n) = (occ[first], occ[first] + occ[second]);
        let mut base = 0;
        for (k, &o) in occ.iter().enumerate() {
            if k != first && k != second {
                base += o * out_strides[k];
            }
        }
        for lo in 0..=n {
            let c = if adjoint { cache.elem(n, l, lo) } else { cache.elem(n, lo, l) };
            if c == 0.0 {
                continue;
            }
            if lo >= out_dims.dims()[first] || n - lo >= out_dims.dims()[second] {
                return Err(Error::Dimension(format!("output cutoffs {:?} too small for N = {n}", out_dims.dims())));
            }
            out[base + lo * out_strides[first] + (n - lo) * out_strides[second]] += amp * c;
        }
    }
    Ok(StateVector { dims: out_dims, amps: out })
}

/// Two-mode beam splitter; both output modes get `d_a + d_b − 1` levels.
pub fn bs_apply(psi: &StateVector, lambda: f64) -> Result<StateVector> {
    if psi.dims.modes() != 2 {
        return arg(format!("bs_apply needs a two-mode state, got {} modes", psi.dims.modes()));
    }
    let d = psi.dims.dims()[0] + psi.dims.dims()[1] - 1;
    let cache = BlockCache::new(lambda, d - 1)?;
    apply_pair(psi, 0, 1, &cache, false, ModeDims::new(vec![d, d])?)
}

/// Largest `n_first + n_second` over the support of `psi`.
pub fn max_pair_photons(psi: &StateVector, first: usize, second: usize) -> usize {
    psi.amps
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm_sqr() > 0.0)
        .map(|(i, _)| {
            let occ = psi.dims.occupation(i);
            occ[first] + occ[second]
        })
        .max()
        .unwrap_or(0)
}

/// Applies `U_λ` (or `U_λ†`) to modes `(first, second)` of a multi-mode state.
/// Modes `first`/`second` play the roles of `a`/`b`; both are resized to the
/// exact photon bound of the support.
pub fn bs_apply_modes(psi: &StateVector, first: usize, second: usize, lambda: f64, adjoint: bool) -> Result<StateVector> {
    psi.dims.check_mode(first)?;
    psi.dims.check_mode(second)?;
    if first == second {
        return arg("beam splitter needs two distinct modes");
    }
    let n_max = max_pair_photons(psi, first, second);
    let cache = BlockCache::new(lambda, n_max)?;
    let out_dims = psi.dims.with_mode(first, n_max + 1).with_mode(second, n_max + 1);
    apply_pair(psi, first, second, &cache, adjoint, out_dims)
}
