//! Truncated multi-mode Fock space: states, operators and the structural
//! maps (tensor product, partial trace, partial transpose, parity).
//!
//! Mode `j` holds the levels `0..dims[j]`. Basis indices are row-major in
//! the occupation tuple, so the last mode varies fastest.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{arg, Error, Result};
use crate::linalg::{self, Eigh};

pub const STATE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModeDims {
    dims: Vec<usize>,
}

impl ModeDims {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return arg("at least one mode is required");
        }
        if dims.contains(&0) {
            return arg(format!("every cutoff must be >= 1, got {dims:?}"));
        }
        Ok(Self { dims })
    }

    pub fn single(d: usize) -> Result<Self> {
        Self::new(vec![d])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn modes(&self) -> usize {
        self.dims.len()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dims.len()];
        for j in (0..self.dims.len().saturating_sub(1)).rev() {
            s[j] = s[j + 1] * self.dims[j + 1];
        }
        s
    }

    pub fn index(&self, occ: &[usize]) -> Result<usize> {
        if occ.len() != self.dims.len() {
            return Err(Error::Dimension(format!(
                "occupation has {} modes, space has {}",
                occ.len(),
                self.dims.len()
            )));
        }
        let mut idx = 0;
        for (&n, &d) in occ.iter().zip(&self.dims) {
            if n >= d {
                return arg(format!("occupation {occ:?} outside cutoffs {:?}", self.dims));
            }
            idx = idx * d + n;
        }
        Ok(idx)
    }

    pub fn occupation(&self, mut idx: usize) -> Vec<usize> {
        let mut occ = vec![0; self.dims.len()];
        for j in (0..self.dims.len()).rev() {
            occ[j] = idx % self.dims[j];
            idx /= self.dims[j];
        }
        occ
    }

    pub fn concat(&self, other: &ModeDims) -> ModeDims {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        ModeDims { dims }
    }

    pub fn with_mode(&self, mode: usize, d: usize) -> ModeDims {
        let mut dims = self.dims.clone();
        dims[mode] = d;
        ModeDims { dims }
    }

    /// Elementwise maximum of two dimension lists with the same mode count.
    pub fn join(&self, other: &ModeDims) -> Result<ModeDims> {
        if self.modes() != other.modes() {
            return Err(Error::Dimension(format!("{:?} vs {:?}", self.dims, other.dims)));
        }
        Ok(ModeDims { dims: self.dims.iter().zip(&other.dims).map(|(a, b)| *a.max(b)).collect() })
    }

    pub(crate) fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.modes() {
            return arg(format!("mode {mode} out of range for {} modes", self.modes()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct StateVector {
    pub dims: ModeDims,
    pub amps: Array1<C64>,
}

impl StateVector {
    pub fn new(dims: ModeDims, amps: Array1<C64>) -> Result<Self> {
        if amps.len() != dims.total() {
            return Err(Error::Dimension(format!("{} amplitudes for {} basis states", amps.len(), dims.total())));
        }
        let norm2: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > STATE_TOL {
            return Err(Error::Data(format!("state norm^2 = {norm2}")));
        }
        Ok(Self { dims, amps })
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(dims: ModeDims, amps: Array1<C64>) -> Result<Self> {
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::Data("zero vector".into()));
        }
        Self::new(dims, amps.mapv(|z| z / norm))
    }

    pub fn from_real(dims: &[usize], amps: &[f64]) -> Result<Self> {
        Self::new(ModeDims::new(dims.to_vec())?, amps.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn fock(dims: ModeDims, occ: &[usize]) -> Result<Self> {
        let mut amps = Array1::zeros(dims.total());
        amps[dims.index(occ)?] = ONE;
        Ok(Self { dims, amps })
    }

    pub fn vacuum(dims: ModeDims) -> Self {
        let mut amps = Array1::zeros(dims.total());
        amps[0] = ONE;
        Self { dims, amps }
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn projector(&self) -> DensityMatrix {
        let n = self.amps.len();
        let mut mat = Array2::zeros((n, n));
        for i in 0..n {
            let a = self.amps[i];
            if a == ZERO {
                continue;
            }
            for j in 0..n {
                mat[[i, j]] = a * self.amps[j].conj();
            }
        }
        DensityMatrix { dims: self.dims.clone(), mat }
    }

    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut amps = Array1::zeros(self.amps.len() * other.amps.len());
        let m = other.amps.len();
        for (i, a) in self.amps.iter().enumerate() {
            for (j, b) in other.amps.iter().enumerate() {
                amps[i * m + j] = a * b;
            }
        }
        StateVector { dims: self.dims.concat(&other.dims), amps }
    }

    /// Reduced density matrix on `keep`.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let layout = TraceLayout::new(&self.dims, keep)?;
        let dk = layout.kept.total();
        let mut mat = Array2::zeros((dk, dk));
        for group in &layout.groups {
            for &(i, ki) in group {
                let a = self.amps[i];
                if a == ZERO {
                    continue;
                }
                for &(j, kj) in group {
                    mat[[ki, kj]] += a * self.amps[j].conj();
                }
            }
        }
        Ok(DensityMatrix { dims: layout.kept, mat })
    }
}

#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub dims: ModeDims,
    pub mat: Array2<C64>,
}

impl DensityMatrix {
    /// Validated constructor: Hermitian and unit trace within 1e-12, spectrum >= -1e-10.
    pub fn new(dims: ModeDims, mat: Array2<C64>) -> Result<Self> {
        let rho = Self::from_parts(dims, mat)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Shape-checked constructor without the spectral checks.
    pub fn from_parts(dims: ModeDims, mat: Array2<C64>) -> Result<Self> {
        let d = dims.total();
        if mat.dim() != (d, d) {
            return Err(Error::Dimension(format!("{:?} matrix for dims {:?}", mat.dim(), dims.dims())));
        }
        Ok(Self { dims, mat })
    }

    pub fn validate(&self) -> Result<()> {
        let defect = linalg::hermiticity_defect(&self.mat);
        if defect > STATE_TOL {
            return Err(Error::Data(format!("not Hermitian (defect {defect:.3e})")));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::Data(format!("trace {tr}")));
        }
        let min = linalg::hermitian_eigvals(&self.mat)?.first().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::Data(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }

    pub fn fock(dims: ModeDims, occ: &[usize]) -> Result<Self> {
        Ok(StateVector::fock(dims, occ)?.projector())
    }

    pub fn fock1(n: usize, cutoff: usize) -> Result<Self> {
        Self::fock(ModeDims::single(cutoff)?, &[n])
    }

    pub fn diagonal(dims: ModeDims, probs: &[f64]) -> Result<Self> {
        let d = dims.total();
        if probs.len() != d {
            return Err(Error::Dimension(format!("{} weights for {d} basis states", probs.len())));
        }
        let mut mat = Array2::zeros((d, d));
        for (i, &p) in probs.iter().enumerate() {
            mat[[i, i]] = C64::new(p, 0.0);
        }
        Self::new(dims, mat)
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.mat.diag().sum()
    }

    pub fn eigh(&self) -> Result<Eigh> {
        linalg::hermitian_eigs(&self.mat)
    }

    /// Eigenvalues with rounding noise in `[-1e-10, 0)` clamped to zero and
    /// the result renormalized.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        clamp_spectrum(linalg::hermitian_eigvals(&self.mat)?)
    }

    /// Eigen-ensemble `{(w_k, |v_k>)}` with weights above `cut`.
    pub fn pure_components(&self, cut: f64) -> Result<Vec<(f64, StateVector)>> {
        let eig = self.eigh()?;
        let mut out = Vec::new();
        for (k, &w) in eig.values.iter().enumerate().rev() {
            if w > cut {
                let amps = eig.vectors.column(k).to_owned();
                out.push((w, StateVector { dims: self.dims.clone(), amps }));
            }
        }
        Ok(out)
    }

    /// Zero-pads every mode up to `dims`.
    pub fn padded(&self, dims: &ModeDims) -> Result<DensityMatrix> {
        if dims.modes() != self.dims.modes() || dims.dims().iter().zip(self.dims.dims()).any(|(a, b)| a < b) {
            return Err(Error::Dimension(format!("cannot pad {:?} to {:?}", self.dims.dims(), dims.dims())));
        }
        if dims == &self.dims {
            return Ok(self.clone());
        }
        let map: Vec<usize> =
            (0..self.dim()).map(|i| dims.index(&self.dims.occupation(i)).expect("padded index")).collect();
        let d = dims.total();
        let mut mat = Array2::zeros((d, d));
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                mat[[map[i], map[j]]] = self.mat[[i, j]];
            }
        }
        Ok(DensityMatrix { dims: dims.clone(), mat })
    }

    /// Keeps levels below `dims` in every mode. The result is not renormalized.
    pub fn truncated(&self, dims: &ModeDims) -> Result<DensityMatrix> {
        if dims.modes() != self.dims.modes() {
            return Err(Error::Dimension(format!("{:?} vs {:?}", self.dims.dims(), dims.dims())));
        }
        let keep: Vec<(usize, usize)> = (0..self.dim())
            .filter_map(|i| dims.index(&self.dims.occupation(i)).ok().map(|k| (i, k)))
            .collect();
        let d = dims.total();
        let mut mat = Array2::zeros((d, d));
        for &(i, ki) in &keep {
            for &(j, kj) in &keep {
                mat[[ki, kj]] = self.mat[[i, j]];
            }
        }
        Ok(DensityMatrix { dims: dims.clone(), mat })
    }
}

pub(crate) fn clamp_spectrum(mut w: Vec<f64>) -> Result<Vec<f64>> {
    for x in w.iter_mut() {
        if *x < 0.0 {
            if *x < -PSD_TOL {
                return Err(Error::Data(format!("negative eigenvalue {x:.3e}")));
            }
            *x = 0.0;
        }
    }
    let s: f64 = w.iter().sum();
    if s <= 0.0 {
        return Err(Error::Data("zero trace".into()));
    }
    Ok(w.into_iter().map(|x| x / s).collect())
}

/// Largest entrywise deviation after zero-padding both matrices to common cutoffs.
pub fn max_entry_diff(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    let dims = a.dims.join(&b.dims)?;
    let (pa, pb) = (a.padded(&dims)?, b.padded(&dims)?);
    Ok((&pa.mat - &pb.mat).iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Trace norm `||a - b||_1` after zero-padding.
pub fn trace_norm_diff(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    let dims = a.dims.join(&b.dims)?;
    let diff = &a.padded(&dims)?.mat - &b.padded(&dims)?.mat;
    Ok(linalg::hermitian_eigvals(&diff)?.iter().map(|x| x.abs()).sum())
}

#[derive(Debug, Clone)]
pub struct Operator {
    pub dims: ModeDims,
    pub mat: Array2<C64>,
}

impl Operator {
    pub fn new(dims: ModeDims, mat: Array2<C64>) -> Result<Self> {
        let d = dims.total();
        if mat.dim() != (d, d) {
            return Err(Error::Dimension(format!("{:?} matrix for dims {:?}", mat.dim(), dims.dims())));
        }
        Ok(Self { dims, mat })
    }

    pub fn identity(dims: ModeDims) -> Self {
        let d = dims.total();
        Self { dims, mat: Array2::eye(d) }
    }

    pub fn dagger(&self) -> Operator {
        Operator { dims: self.dims.clone(), mat: self.mat.t().mapv(|z| z.conj()) }
    }

    pub fn compose(&self, other: &Operator) -> Result<Operator> {
        if self.dims != other.dims {
            return Err(Error::Dimension(format!("{:?} vs {:?}", self.dims.dims(), other.dims.dims())));
        }
        Ok(Operator { dims: self.dims.clone(), mat: self.mat.dot(&other.mat) })
    }

    /// `O ρ O†`. The result is not revalidated.
    pub fn conjugate(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if self.dims != rho.dims {
            return Err(Error::Dimension(format!("{:?} vs {:?}", self.dims.dims(), rho.dims.dims())));
        }
        let m = self.mat.dot(&rho.mat).dot(&self.mat.t().mapv(|z| z.conj()));
        Ok(DensityMatrix { dims: rho.dims.clone(), mat: m })
    }

    pub fn expectation(&self, rho: &DensityMatrix) -> Result<C64> {
        if self.dims != rho.dims {
            return Err(Error::Dimension(format!("{:?} vs {:?}", self.dims.dims(), rho.dims.dims())));
        }
        Ok(rho.mat.dot(&self.mat).diag().sum())
    }
}

pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> DensityMatrix {
    let (da, db) = (a.dim(), b.dim());
    let mut mat = Array2::zeros((da * db, da * db));
    for i in 0..da {
        for j in 0..da {
            let x = a.mat[[i, j]];
            if x == ZERO {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    mat[[i * db + k, j * db + l]] = x * b.mat[[k, l]];
                }
            }
        }
    }
    DensityMatrix { dims: a.dims.concat(&b.dims), mat }
}

/// Full indices grouped by the occupation of the traced modes, each paired
/// with its index in the kept subspace.
struct TraceLayout {
    kept: ModeDims,
    groups: Vec<Vec<(usize, usize)>>,
}

impl TraceLayout {
    fn new(dims: &ModeDims, keep: &[usize]) -> Result<Self> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.is_empty() {
            return arg("keep set is empty");
        }
        for &k in &keep {
            dims.check_mode(k)?;
        }
        let traced: Vec<usize> = (0..dims.modes()).filter(|m| !keep.contains(m)).collect();
        let kept = ModeDims { dims: keep.iter().map(|&k| dims.dims()[k]).collect() };
        let dt: usize = traced.iter().map(|&t| dims.dims()[t]).product();
        let mut groups = vec![Vec::new(); dt];
        for i in 0..dims.total() {
            let occ = dims.occupation(i);
            let ki = keep.iter().fold(0, |acc, &k| acc * dims.dims()[k] + occ[k]);
            let ti = traced.iter().fold(0, |acc, &t| acc * dims.dims()[t] + occ[t]);
            groups[ti].push((i, ki));
        }
        Ok(Self { kept, groups })
    }
}

pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let layout = TraceLayout::new(&rho.dims, keep)?;
    let dk = layout.kept.total();
    let mut mat = Array2::zeros((dk, dk));
    for group in &layout.groups {
        for &(i, ki) in group {
            for &(j, kj) in group {
                mat[[ki, kj]] += rho.mat[[i, j]];
            }
        }
    }
    Ok(DensityMatrix { dims: layout.kept, mat })
}

/// Transposes the indices of the listed modes.
pub fn partial_transpose(rho: &DensityMatrix, modes: &[usize]) -> Result<DensityMatrix> {
    for &m in modes {
        rho.dims.check_mode(m)?;
    }
    let d = rho.dim();
    let occs: Vec<Vec<usize>> = (0..d).map(|i| rho.dims.occupation(i)).collect();
    let mut mat = Array2::zeros((d, d));
    for i in 0..d {
        for j in 0..d {
            let (mut oi, mut oj) = (occs[i].clone(), occs[j].clone());
            for &m in modes {
                std::mem::swap(&mut oi[m], &mut oj[m]);
            }
            mat[[rho.dims.index(&oi)?, rho.dims.index(&oj)?]] = rho.mat[[i, j]];
        }
    }
    Ok(DensityMatrix { dims: rho.dims.clone(), mat })
}

/// Total photon number `H = Σ_j a_j† a_j`.
pub fn number_operator(dims: &ModeDims) -> Operator {
    let d = dims.total();
    let mut mat = Array2::zeros((d, d));
    for i in 0..d {
        mat[[i, i]] = C64::new(dims.occupation(i).iter().sum::<usize>() as f64, 0.0);
    }
    Operator { dims: dims.clone(), mat }
}

pub fn mean_photon(rho: &DensityMatrix) -> f64 {
    (0..rho.dim()).map(|i| rho.mat[[i, i]].re * rho.dims.occupation(i).iter().sum::<usize>() as f64).sum()
}

pub fn mean_photon_mode(rho: &DensityMatrix, mode: usize) -> Result<f64> {
    rho.dims.check_mode(mode)?;
    Ok((0..rho.dim()).map(|i| rho.mat[[i, i]].re * rho.dims.occupation(i)[mode] as f64).sum())
}

/// Geometric tail mass `(ν/(ν+1))^cutoff` discarded by truncating τ_ν.
pub fn thermal_tail(nu: f64, cutoff: usize) -> f64 {
    if nu == 0.0 {
        return 0.0;
    }
    (nu / (nu + 1.0)).powi(cutoff as i32)
}

/// Smallest cutoff whose thermal tail mass is below `tail`.
pub fn thermal_cutoff(nu: f64, tail: f64) -> Result<usize> {
    if !nu.is_finite() || nu < 0.0 {
        return arg(format!("mean photon number must be >= 0, got {nu}"));
    }
    if nu == 0.0 {
        return Ok(1);
    }
    let r = nu / (nu + 1.0);
    let mut k = (tail.ln() / r.ln()).floor().max(1.0) as usize;
    while r.powi(k as i32) >= tail {
        k += 1;
    }
    Ok(k)
}

/// Thermal state τ_ν truncated to `cutoff` levels and renormalized.
pub fn thermal_state(nu: f64, cutoff: usize) -> Result<DensityMatrix> {
    if !nu.is_finite() || nu < 0.0 {
        return arg(format!("mean photon number must be >= 0, got {nu}"));
    }
    if cutoff == 0 {
        return arg("cutoff must be >= 1");
    }
    let r = nu / (nu + 1.0);
    let raw: Vec<f64> = (0..cutoff).map(|k| r.powi(k as i32) / (nu + 1.0)).collect();
    let s: f64 = raw.iter().sum();
    let probs: Vec<f64> = raw.iter().map(|p| p / s).collect();
    let mut mat = Array2::zeros((cutoff, cutoff));
    for (k, p) in probs.into_iter().enumerate() {
        mat[[k, k]] = C64::new(p, 0.0);
    }
    Ok(DensityMatrix { dims: ModeDims::single(cutoff)?, mat })
}

/// `V ρ V†` with `V = (-1)^H`.
pub fn parity_conjugate(rho: &DensityMatrix) -> DensityMatrix {
    let d = rho.dim();
    let parity: Vec<bool> = (0..d).map(|i| rho.dims.occupation(i).iter().sum::<usize>() % 2 == 1).collect();
    let mut mat = rho.mat.clone();
    for i in 0..d {
        for j in 0..d {
            if parity[i] != parity[j] {
                mat[[i, j]] = -mat[[i, j]];
            }
        }
    }
    DensityMatrix { dims: rho.dims.clone(), mat }
}
