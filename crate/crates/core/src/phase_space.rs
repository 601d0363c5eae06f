//! Displacement operators `D(α) = exp(α a† − ᾱ a)` on a truncated mode and
//! characteristic functions `χ_ρ(α) = Tr[ρ D(α)]`.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use statrs::function::gamma::ln_gamma;

use crate::attenuator::{self, ChannelSpec};
use crate::error::{Error, Result};
use crate::fock_core::{self, DensityMatrix, ModeDims, Operator};

pub const TAIL_BUDGET: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub alpha: C64,
}

/// `L_k^{(a)}(x)` for `k = 0..len`.
fn laguerre_column(a: usize, x: f64, len: usize) -> Vec<f64> {
    let a = a as f64;
    let mut out = Vec::with_capacity(len);
    if len == 0 {
        return out;
    }
    out.push(1.0);
    if len == 1 {
        return out;
    }
    out.push(1.0 + a - x);
    for k in 1..len - 1 {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + a - x) * out[k] - (kf + a) * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

/// Rectangular block `⟨m|D(α)|n⟩`, `m < rows`, `n < cols`, of the infinite matrix.
pub fn displacement_block(alpha: C64, rows: usize, cols: usize) -> Array2<C64> {
    let x = alpha.norm_sqr();
    let mut mat = Array2::<C64>::zeros((rows, cols));
    let size = rows.max(cols);
    for a in 0..size {
        // m − n = a below the diagonal, n − m = a above it
        let lag = laguerre_column(a, x, size - a);
        let unit = if x == 0.0 { C64::new(1.0, 0.0) } else { alpha / alpha.norm() };
        let phase_lo = unit.powu(a as u32);
        let phase_hi = (-unit.conj()).powu(a as u32);
        for k in 0..size - a {
            let mag = if a == 0 {
                (-x / 2.0).exp()
            } else if x == 0.0 {
                0.0
            } else {
                (0.5 * (ln_gamma(k as f64 + 1.0) - ln_gamma((k + a) as f64 + 1.0)) + 0.5 * a as f64 * x.ln() - x / 2.0)
                    .exp()
            };
            let v = mag * lag[k];
            if k + a < rows && k < cols {
                mat[[k + a, k]] = phase_lo * v;
            }
            if a > 0 && k < rows && k + a < cols {
                mat[[k, k + a]] = phase_hi * v;
            }
        }
    }
    mat
}

pub fn displacement_matrix(alpha: C64, cutoff: usize) -> Result<Operator> {
    Operator::new(ModeDims::single(cutoff)?, displacement_block(alpha, cutoff, cutoff))
}

/// Largest leading block of the truncated `D(α)` whose columns have leaked
/// less than `1e-16` of their norm past the cutoff.
pub fn inner_block(alpha: C64, cutoff: usize) -> usize {
    let extra = 64 + (16.0 * alpha.norm_sqr()).ceil() as usize;
    let d = displacement_block(alpha, 2 * cutoff + extra, cutoff);
    (0..cutoff)
        .take_while(|&n| d.column(n).iter().skip(cutoff).map(|z| z.norm_sqr()).sum::<f64>() < 1e-16)
        .count()
}

fn single_mode(rho: &DensityMatrix) -> Result<()> {
    if rho.dims.modes() != 1 {
        return Err(Error::Dimension(format!("expected a single-mode state, got {} modes", rho.dims.modes())));
    }
    Ok(())
}

pub fn char_fn(rho: &DensityMatrix, alpha: C64) -> Result<C64> {
    single_mode(rho)?;
    let d = displacement_block(alpha, rho.dim(), rho.dim());
    Ok(rho.mat.dot(&d).diag().sum())
}

/// `P D(z) ρ D(z)† P` on `cutoff` levels (unnormalized) and the mass cut off.
pub fn displace(rho: &DensityMatrix, z: C64, cutoff: usize) -> Result<(DensityMatrix, f64)> {
    single_mode(rho)?;
    let d = displacement_block(z, cutoff, rho.dim());
    let mat = d.dot(&rho.mat).dot(&d.t().mapv(|w| w.conj()));
    let out = DensityMatrix::from_parts(ModeDims::single(cutoff)?, mat)?;
    let tail = (1.0 - out.trace().re).max(0.0);
    Ok((out, tail))
}

fn check_tail(tail: f64) -> Result<()> {
    if tail > TAIL_BUDGET {
        return Err(Error::Truncation { tail, budget: TAIL_BUDGET });
    }
    Ok(())
}

/// Residuals of `Φ_{λ,σ}∘D_z = D_{√λ z}∘Φ_{λ,σ}` and
/// `Φ_{λ,D_z(σ)} = D_{√(1−λ) z}∘Φ_{λ,σ}`, evaluated on `cutoff` levels for
/// every displaced state.
#[derive(Debug, Clone, Copy)]
pub struct CovarianceResidual {
    pub input_side: f64,
    pub environment_side: f64,
    pub worst_tail: f64,
}

impl CovarianceResidual {
    pub fn max(&self) -> f64 {
        self.input_side.max(self.environment_side)
    }
}

pub fn verify_covariance(
    lambda: f64,
    sigma: &DensityMatrix,
    z: C64,
    rho: &DensityMatrix,
    cutoff: usize,
) -> Result<CovarianceResidual> {
    single_mode(rho)?;
    single_mode(sigma)?;
    if cutoff < rho.dim().max(sigma.dim()) {
        return Err(Error::Argument(format!("cutoff {cutoff} below the state cutoffs")));
    }
    let spec = ChannelSpec::new(lambda, sigma.clone())?;
    let base = attenuator::apply(&spec, rho)?;
    let mut worst_tail = 0.0f64;

    let (rho_z, t) = displace(rho, z, cutoff)?;
    worst_tail = worst_tail.max(t);
    let lhs = attenuator::apply(&spec, &rho_z)?;
    let (rhs, t) = displace(&base, z * lambda.sqrt(), lhs.dim())?;
    worst_tail = worst_tail.max(t);
    let input_side = fock_core::max_entry_diff(&lhs, &rhs)?;

    let (sigma_z, t) = displace(sigma, z, cutoff)?;
    worst_tail = worst_tail.max(t);
    let lhs = attenuator::apply(&ChannelSpec::new(lambda, sigma_z)?, rho)?;
    let (rhs, t) = displace(&base, z * (1.0 - lambda).sqrt(), lhs.dim())?;
    worst_tail = worst_tail.max(t);
    let environment_side = fock_core::max_entry_diff(&lhs, &rhs)?;

    check_tail(worst_tail)?;
    Ok(CovarianceResidual { input_side, environment_side, worst_tail })
}
