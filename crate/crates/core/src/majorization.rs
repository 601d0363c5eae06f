//! Output distributions of the Fock-environment scheme and the certificates
//! around them: sorting patterns, majorization, and the entropy bound chain.
//!
//! For `Ψ = (|01⟩ + |10⟩)/√2` sent through `Φ_{λ,|n⟩}`, `q(n, λ)` is the
//! spectrum of the joint output and `p(n, λ)` the diagonal of the channel
//! output. Both have `n + 2` entries.

use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::entropy::{kl_divergence, shannon, total_variation, ProbDist};
use crate::error::{arg, Error, Result};

pub const SLACK: f64 = 1e-12;
pub const GRID_POINTS: usize = 50;

#[derive(Debug, Clone, Serialize)]
pub struct SchemeDist {
    pub n: usize,
    pub lambda: f64,
    pub dist: ProbDist,
}

impl SchemeDist {
    pub fn get(&self, l: usize) -> f64 {
        self.dist.weights()[l]
    }
}

fn binom(n: usize, k: usize) -> f64 {
    if n > 40 {
        return (ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)).exp();
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k as u64 {
        acc = acc * (n as u64 - i) / (i + 1);
    }
    acc as f64
}

/// `C(n+1, ℓ) (1−λ)^ℓ λ^(n−ℓ) / (2(n+1)(1−λ))`.
fn prefactor(n: usize, lambda: f64, l: usize) -> f64 {
    let m = (n + 1) as f64;
    let base = if n > 40 {
        (ln_gamma(m + 1.0) - ln_gamma(l as f64 + 1.0) - ln_gamma(m - l as f64 + 1.0)
            + l as f64 * (1.0 - lambda).ln()
            + (n as f64 - l as f64) * lambda.ln())
        .exp()
    } else {
        binom(n + 1, l) * (1.0 - lambda).powi(l as i32) * lambda.powi(n as i32 - l as i32)
    };
    base / (2.0 * m * (1.0 - lambda))
}

fn check(n: usize, lambda: f64) -> Result<()> {
    if n < 1 {
        return arg("n must be >= 1");
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return arg(format!("λ must lie in (0, 1), got {lambda}"));
    }
    Ok(())
}

pub fn p_dist(n: usize, lambda: f64) -> Result<SchemeDist> {
    check(n, lambda)?;
    let m = (n + 1) as f64;
    let w = (0..=n + 1)
        .map(|l| {
            let lf = l as f64;
            let t = m * (1.0 - lambda) - lf;
            prefactor(n, lambda, l) * ((1.0 - lambda) * (m - lf) + t * t)
        })
        .collect();
    Ok(SchemeDist { n, lambda, dist: ProbDist::new(w)? })
}

pub fn q_dist(n: usize, lambda: f64) -> Result<SchemeDist> {
    check(n, lambda)?;
    let m = (n + 1) as f64;
    let w = (0..=n + 1)
        .map(|l| {
            let lf = l as f64;
            let t = m * (1.0 - lambda) - lf;
            prefactor(n, lambda, l) * (lambda * lf + t * t)
        })
        .collect();
    Ok(SchemeDist { n, lambda, dist: ProbDist::new(w)? })
}

fn partial_sums(p: &ProbDist) -> Vec<f64> {
    p.ascending()
        .weights()
        .iter()
        .scan(0.0, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

/// Smallest `Σ_{ℓ≤k} r↑_ℓ − Σ_{ℓ≤k} s↑_ℓ` over `k`; nonnegative iff `r ≺ s`.
pub fn majorization_slack(r: &ProbDist, s: &ProbDist) -> f64 {
    let n = r.len().max(s.len());
    let (a, b) = (partial_sums(&r.padded(n)), partial_sums(&s.padded(n)));
    a.iter().zip(&b).map(|(x, y)| x - y).fold(f64::INFINITY, f64::min)
}

/// `true` iff `r ≺ s`, i.e. `s` majorizes `r`, up to 1e-12 on partial sums.
pub fn majorizes(s: &ProbDist, r: &ProbDist) -> bool {
    majorization_slack(r, s) >= -SLACK
}

pub struct ThresholdFns;

impl ThresholdFns {
    pub fn lambda_plus(n: usize) -> f64 {
        let n = n as f64;
        3.0 / (n + 2.0) * (1.0 - ((n - 1.0) / (3.0 * (n + 1.0))).sqrt())
    }

    pub fn lambda_minus(n: usize) -> f64 {
        let n = n as f64;
        2.0 / (n + 2.0) * (1.0 - (n / (2.0 * (n + 1.0))).sqrt())
    }

    pub fn lambda_plus_tilde(n: usize) -> f64 {
        let (a, b) = (3f64.cbrt(), 2f64.cbrt());
        a / (b * n as f64 + a - b)
    }
}

pub fn verify_q_sorted(n: usize, lambda: f64) -> Result<bool> {
    let q = q_dist(n, lambda)?;
    Ok(q.dist.weights().windows(2).all(|w| w[0] <= w[1] + SLACK))
}

/// Index order for each admissible ascending arrangement of `p`.
pub fn p_pattern(n: usize, id: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n.saturating_sub(2)).collect();
    let tail = match id {
        1 => [n, n + 1, n - 2, n - 1],
        2 => [n, n - 2, n + 1, n - 1],
        _ => [n - 2, n, n + 1, n - 1],
    };
    order.extend_from_slice(&tail);
    order
}

/// Which of the three arrangements sorts `p(n, λ)` ascending (first match).
pub fn verify_p_pattern(n: usize, lambda: f64) -> Result<usize> {
    if n < 2 {
        return arg("patterns need n >= 2");
    }
    let p = p_dist(n, lambda)?;
    for id in 1..=3 {
        let order = p_pattern(n, id);
        if order.windows(2).all(|w| p.get(w[0]) <= p.get(w[1]) + SLACK) {
            return Ok(id);
        }
    }
    Err(Error::Falsified(format!("no sorting pattern fits p(n={n}, λ={lambda}): {:?}", p.dist.weights())))
}

pub fn k_gap(n: usize, lambda: f64) -> Result<f64> {
    if n < 2 {
        return arg("k gap needs n >= 2");
    }
    Ok(q_dist(n, lambda)?.get(n + 1) - p_dist(n, lambda)?.get(n - 1))
}

pub fn k_gap_floor(n: usize) -> Result<f64> {
    if n < 3 {
        return arg(format!("k gap floor needs n >= 3, got {n}"));
    }
    let nf = n as f64;
    Ok((nf + 1.0) * (nf - 2.0) / (4.0 * nf * (nf - 1.0)) * (1.0 - 1.0 / nf).powi(n as i32))
}

/// `p↑_ℓ ≥ q↑_ℓ` for `ℓ ≤ n` and `p↑_{n+1} ≤ q↑_{n+1}`.
pub fn elementwise_compare(n: usize, lambda: f64) -> Result<bool> {
    if n < 4 {
        return arg(format!("elementwise comparison needs n >= 4, got {n}"));
    }
    let (lo, hi) = (1.0 / (n + 1) as f64, 1.0 / n as f64);
    if lambda < lo - 1e-15 || lambda > hi + 1e-15 {
        return arg(format!("λ = {lambda} outside [1/(n+1), 1/n]"));
    }
    let p = p_dist(n, lambda)?.dist.ascending();
    let q = q_dist(n, lambda)?.dist.ascending();
    let (p, q) = (p.weights(), q.weights());
    Ok((0..=n).all(|l| p[l] >= q[l] - SLACK) && p[n + 1] <= q[n + 1] + SLACK)
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub n: usize,
    pub lambda: f64,
    pub h_p: f64,
    pub h_q: f64,
    pub icoh: f64,
    pub kl_sorted: f64,
    pub tv_term: f64,
    pub linf_term: f64,
    pub k_gap: f64,
    pub certified: f64,
    /// `ε/4 + 3ε³`, attached for `n = 2`.
    pub n2_gap_closed: Option<f64>,
}

impl BoundReport {
    /// `icoh ≥ kl_sorted ≥ tv_term ≥ linf_term`, each with slack `tol`.
    pub fn chain_holds(&self, tol: f64) -> bool {
        self.icoh >= self.kl_sorted - tol && self.kl_sorted >= self.tv_term - tol && self.tv_term >= self.linf_term - tol
    }
}

pub fn bound_chain(n: usize, lambda: f64, eps: f64) -> Result<BoundReport> {
    if n < 2 {
        return arg("bound chain needs n >= 2");
    }
    let p = p_dist(n, lambda)?;
    let q = q_dist(n, lambda)?;
    let (ps, qs) = (p.dist.ascending(), q.dist.ascending());
    let (h_p, h_q) = (shannon(&p.dist), shannon(&q.dist));
    let ln2 = std::f64::consts::LN_2;
    let tv = total_variation(&qs, &ps);
    let top = qs.weights()[n + 1] - ps.weights()[n + 1];
    let k_gap = q.get(n + 1) - p.get(n - 1);
    Ok(BoundReport {
        n,
        lambda,
        h_p,
        h_q,
        icoh: h_p - h_q,
        kl_sorted: kl_divergence(&qs, &ps),
        tv_term: tv * tv / (2.0 * ln2),
        linf_term: 2.0 / ln2 * top * top,
        k_gap,
        certified: 2.0 / ln2 * k_gap * k_gap,
        n2_gap_closed: (n == 2).then(|| eps / 4.0 + 3.0 * eps.powi(3)),
    })
}

/// `points` values spanning `[1/(n+1), 1/n]`, endpoints included.
pub fn lambda_grid(n: usize, points: usize) -> Vec<f64> {
    span(1.0 / (n + 1) as f64, 1.0 / n as f64, points)
}

pub(crate) fn span(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points < 2 {
        return vec![lo];
    }
    (0..points).map(|k| if k + 1 == points { hi } else { lo + (hi - lo) * k as f64 / (points - 1) as f64 }).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub check: String,
    pub n: usize,
    pub lambda: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub n_max: usize,
    pub points_per_interval: usize,
    pub points_checked: usize,
    pub worst_majorization_slack: f64,
    pub worst_chain_slack: f64,
    pub worst_floor_margin: f64,
    pub violations: Vec<Violation>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

struct PointOutcome {
    maj_slack: f64,
    chain_slack: f64,
    floor_margin: f64,
    failed: Vec<&'static str>,
}

fn check_point(n: usize, lambda: f64) -> Result<PointOutcome> {
    let p = p_dist(n, lambda)?;
    let q = q_dist(n, lambda)?;
    let mut failed = Vec::new();
    let maj_slack = majorization_slack(&p.dist, &q.dist);
    if maj_slack < -SLACK {
        failed.push("majorization");
    }
    if shannon(&p.dist) < shannon(&q.dist) - SLACK {
        failed.push("schur_concavity");
    }
    match verify_p_pattern(n, lambda) {
        Ok(id) if n >= 4 && lambda <= ThresholdFns::lambda_plus_tilde(n) && id != 1 => failed.push("p_pattern_first"),
        Ok(_) => {}
        Err(_) => failed.push("p_pattern"),
    }
    let pmax = p.dist.weights().iter().cloned().fold(0.0, f64::max);
    let qmax = q.dist.weights().iter().cloned().fold(0.0, f64::max);
    if p.get(n - 1) < pmax - SLACK {
        failed.push("p_max_at_n_minus_1");
    }
    if q.get(n + 1) < qmax - SLACK {
        failed.push("q_max_at_n_plus_1");
    }
    if n >= 4 && !elementwise_compare(n, lambda)? {
        failed.push("elementwise");
    }
    if lambda <= 2.0 / (n + 1) as f64 && (0..n).any(|l| q.get(l) > p.get(l) + SLACK) {
        failed.push("q_below_p");
    }
    let r = bound_chain(n, lambda, 0.5 - lambda)?;
    let chain_slack = (r.icoh - r.kl_sorted).min(r.kl_sorted - r.tv_term).min(r.tv_term - r.linf_term);
    if !r.chain_holds(SLACK) {
        failed.push("bound_chain");
    }
    if (r.linf_term - r.certified).abs() > SLACK {
        failed.push("linf_equals_certified");
    }
    let floor_margin = if n >= 3 { r.k_gap - k_gap_floor(n)? } else { f64::INFINITY };
    if floor_margin < -SLACK {
        failed.push("k_gap_floor");
    }
    Ok(PointOutcome { maj_slack, chain_slack, floor_margin, failed })
}

/// Every certificate on `points` λ-values per `[1/(n+1), 1/n]`, `n = 2..=n_max`,
/// plus `q` sortedness on `[1/(n+1), λ₊(n)]`.
pub fn sweep(n_max: usize, points: usize) -> Result<SweepReport> {
    if n_max < 2 || points < 2 {
        return arg("sweep needs n_max >= 2 and at least 2 points");
    }
    let per_n = (2..=n_max)
        .into_par_iter()
        .map(|n| {
            let mut out = Vec::new();
            for lambda in lambda_grid(n, points) {
                out.push((lambda, check_point(n, lambda)?));
            }
            let mut unsorted = Vec::new();
            for lambda in span(1.0 / (n + 1) as f64, ThresholdFns::lambda_plus(n), points) {
                if !verify_q_sorted(n, lambda)? {
                    unsorted.push(lambda);
                }
            }
            Ok((n, out, unsorted))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = SweepReport {
        n_max,
        points_per_interval: points,
        points_checked: 0,
        worst_majorization_slack: f64::INFINITY,
        worst_chain_slack: f64::INFINITY,
        worst_floor_margin: f64::INFINITY,
        violations: Vec::new(),
    };
    for (n, outcomes, unsorted) in per_n {
        for (lambda, o) in outcomes {
            report.points_checked += 1;
            report.worst_majorization_slack = report.worst_majorization_slack.min(o.maj_slack);
            report.worst_chain_slack = report.worst_chain_slack.min(o.chain_slack);
            report.worst_floor_margin = report.worst_floor_margin.min(o.floor_margin);
            for check in o.failed {
                report.violations.push(Violation { check: check.to_string(), n, lambda });
            }
        }
        for lambda in unsorted {
            report.violations.push(Violation { check: "q_sorted".into(), n, lambda });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_case_values() {
        let q = q_dist(2, 0.5).unwrap();
        for (a, b) in q.dist.weights().iter().zip([0.1875, 0.1875, 0.3125, 0.3125]) {
            assert!((a - b).abs() < 1e-15);
        }
        let p = p_dist(2, 0.5).unwrap();
        let rev: Vec<f64> = q.dist.weights().iter().rev().cloned().collect();
        assert_eq!(p.dist.weights(), rev.as_slice());
    }

    #[test]
    fn rejects_endpoints() {
        assert!(p_dist(3, 0.0).is_err());
        assert!(q_dist(3, 1.0).is_err());
        assert!(k_gap_floor(2).is_err());
        assert!(elementwise_compare(3, 0.3).is_err());
        assert!(elementwise_compare(5, 0.5).is_err());
    }

    #[test]
    fn majorization_basics() {
        let r = ProbDist::new(vec![0.1, 0.2, 0.7]).unwrap();
        assert!(majorizes(&r, &r));
        assert!(majorizes(&r, &ProbDist::uniform(3)));
        assert!(!majorizes(&ProbDist::uniform(3), &r));
    }

    #[test]
    fn binomials_agree_across_methods() {
        for k in 0..=40 {
            let exact = binom(40, k);
            let lg = (ln_gamma(41.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((40 - k) as f64 + 1.0)).exp();
            assert!((exact - lg).abs() / exact < 1e-12);
        }
    }

    #[test]
    fn pattern_layout() {
        assert_eq!(p_pattern(2, 1), vec![2, 3, 0, 1]);
        assert_eq!(p_pattern(5, 3), vec![0, 1, 2, 3, 5, 6, 4]);
    }
}
