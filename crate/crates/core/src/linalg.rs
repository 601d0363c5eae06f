//! Dense Hermitian eigensolver (cyclic complex Jacobi).
//!
//! Matrices are first split into the connected components of their nonzero
//! pattern, so block-diagonal inputs (photon-number sectors) are solved
//! block by block.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-8;
const OFF_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with the matching unit eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: Array2<C64>,
}

pub fn hermitian_eigs(mat: &Array2<C64>) -> Result<Eigh> {
    let (values, vectors) = solve(mat, true)?;
    Ok(Eigh { values, vectors: vectors.expect("vectors requested") })
}

pub fn hermitian_eigvals(mat: &Array2<C64>) -> Result<Vec<f64>> {
    Ok(solve(mat, false)?.0)
}

pub fn hermiticity_defect(mat: &Array2<C64>) -> f64 {
    let n = mat.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((mat[[i, j]] - mat[[j, i]].conj()).norm());
        }
    }
    worst
}

fn solve(mat: &Array2<C64>, want_vectors: bool) -> Result<(Vec<f64>, Option<Array2<C64>>)> {
    let n = mat.nrows();
    if mat.ncols() != n {
        return Err(Error::Dimension(format!("{}x{} matrix is not square", n, mat.ncols())));
    }
    let defect = hermiticity_defect(mat);
    if defect > HERMITIAN_TOL {
        return Err(Error::Data(format!("matrix is not Hermitian (defect {defect:.3e})")));
    }

    let mut values = vec![0.0; n];
    let mut vectors = want_vectors.then(|| Array2::<C64>::zeros((n, n)));
    for comp in components(mat) {
        let m = comp.len();
        let mut a = vec![C64::new(0.0, 0.0); m * m];
        for (r, &i) in comp.iter().enumerate() {
            for (c, &j) in comp.iter().enumerate() {
                a[r * m + c] = 0.5 * (mat[[i, j]] + mat[[j, i]].conj());
            }
        }
        let mut v = want_vectors.then(|| identity(m));
        jacobi(&mut a, v.as_deref_mut(), m)?;
        for (r, &i) in comp.iter().enumerate() {
            values[i] = a[r * m + r].re;
        }
        if let (Some(out), Some(v)) = (vectors.as_mut(), v.as_ref()) {
            // eigenvector c of the block lands in column comp[c]
            for (c, &col) in comp.iter().enumerate() {
                for (r, &row) in comp.iter().enumerate() {
                    out[[row, col]] = v[r * m + c];
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| values[x].total_cmp(&values[y]));
    let sorted: Vec<f64> = order.iter().map(|&k| values[k]).collect();
    let vectors = vectors.map(|v| {
        let mut out = Array2::<C64>::zeros((n, n));
        for (new, &old) in order.iter().enumerate() {
            out.column_mut(new).assign(&v.column(old));
        }
        out
    });
    Ok((sorted, vectors))
}

fn identity(m: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); m * m];
    for i in 0..m {
        v[i * m + i] = C64::new(1.0, 0.0);
    }
    v
}

/// Connected components of the graph with an edge wherever `mat[i][j] != 0`.
fn components(mat: &Array2<C64>) -> Vec<Vec<usize>> {
    let n = mat.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if mat[[i, j]] != C64::new(0.0, 0.0) || mat[[j, i]] != C64::new(0.0, 0.0) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

fn off_norm(a: &[C64], m: usize) -> (f64, f64) {
    let mut off = 0.0;
    let mut total = 0.0;
    for i in 0..m {
        for j in 0..m {
            let x = a[i * m + j].norm_sqr();
            total += x;
            if i != j {
                off += x;
            }
        }
    }
    (off.sqrt(), total.sqrt())
}

fn jacobi(a: &mut [C64], mut v: Option<&mut [C64]>, m: usize) -> Result<()> {
    if m == 1 {
        a[0] = C64::new(a[0].re, 0.0);
        return Ok(());
    }
    for _ in 0..MAX_SWEEPS {
        let (off, total) = off_norm(a, m);
        if off < OFF_TOL * total.max(1.0) {
            for i in 0..m {
                a[i * m + i] = C64::new(a[i * m + i].re, 0.0);
            }
            return Ok(());
        }
        for p in 0..m - 1 {
            for q in (p + 1)..m {
                let b = a[p * m + q];
                let r = b.norm();
                if r < 1e-300 {
                    continue;
                }
                let phase = b / r;
                let app = a[p * m + p].re;
                let aqq = a[q * m + q].re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let pc = phase.conj();
                // G = [[c, s], [-s e^{-iφ}, c e^{-iφ}]]
                let g10 = -s * pc;
                let g11 = c * pc;
                for k in 0..m {
                    let x = a[k * m + p];
                    let y = a[k * m + q];
                    a[k * m + p] = x * c + y * g10;
                    a[k * m + q] = x * s + y * g11;
                }
                for k in 0..m {
                    let x = a[p * m + k];
                    let y = a[q * m + k];
                    a[p * m + k] = x * c + y * g10.conj();
                    a[q * m + k] = x * s + y * g11.conj();
                }
                a[p * m + q] = C64::new(0.0, 0.0);
                a[q * m + p] = C64::new(0.0, 0.0);
                a[p * m + p] = C64::new(a[p * m + p].re, 0.0);
                a[q * m + q] = C64::new(a[q * m + q].re, 0.0);
                if let Some(v) = v.as_deref_mut() {
                    for k in 0..m {
                        let x = v[k * m + p];
                        let y = v[k * m + q];
                        v[k * m + p] = x * c + y * g10;
                        v[k * m + q] = x * s + y * g11;
                    }
                }
            }
        }
    }
    Err(Error::Consistency(format!("Jacobi did not converge in {MAX_SWEEPS} sweeps")))
}

/// Reconstructs `V diag(w) V†`.
pub fn reconstruct(eig: &Eigh) -> Array2<C64> {
    let n = eig.values.len();
    let mut out = Array2::<C64>::zeros((n, n));
    for k in 0..n {
        let w = eig.values[k];
        if w == 0.0 {
            continue;
        }
        let col = eig.vectors.column(k);
        for i in 0..n {
            let vi = col[i] * w;
            if vi == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                out[[i, j]] += vi * col[j].conj();
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random_hermitian(n: usize, seed: u64) -> Array2<C64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut m = Array2::<C64>::zeros((n, n));
        for i in 0..n {
            m[[i, i]] = C64::new(rng.gen_range(-1.0..1.0), 0.0);
            for j in (i + 1)..n {
                let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m[[i, j]] = z;
                m[[j, i]] = z.conj();
            }
        }
        m
    }

    #[test]
    fn reconstructs_random_matrices() {
        for (n, seed) in [(1, 1), (2, 2), (7, 3), (40, 4), (120, 5)] {
            let m = random_hermitian(n, seed);
            let eig = hermitian_eigs(&m).unwrap();
            let r = reconstruct(&eig);
            let worst = (&r - &m).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(worst < 1e-10, "n={n} reconstruction error {worst}");
            assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn block_diagonal_input() {
        let mut m = Array2::<C64>::zeros((4, 4));
        m[[0, 0]] = C64::new(2.0, 0.0);
        m[[1, 1]] = C64::new(1.0, 0.0);
        m[[1, 3]] = C64::new(0.0, 1.0);
        m[[3, 1]] = C64::new(0.0, -1.0);
        m[[3, 3]] = C64::new(1.0, 0.0);
        let eig = hermitian_eigs(&m).unwrap();
        let expect = [0.0, 0.0, 2.0, 2.0];
        for (a, b) in eig.values.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
        let r = reconstruct(&eig);
        assert!((&r - &m).iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = Array2::<C64>::zeros((2, 2));
        m[[0, 1]] = C64::new(1.0, 0.0);
        assert!(matches!(hermitian_eigvals(&m), Err(Error::Data(_))));
    }
}
