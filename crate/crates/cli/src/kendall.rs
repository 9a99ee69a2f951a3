//! Kendall rank correlation between pattern rankings.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KendallResult {
    pub tau: f64,
    /// Two-sided p-value from the normal approximation.
    pub p_value: f64,
}

/// Sizes of the tie groups in `v`.
fn tie_groups(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let mut groups = Vec::new();
    let mut run = 1.0;
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            run += 1.0;
        } else {
            if run > 1.0 {
                groups.push(run);
            }
            run = 1.0;
        }
    }
    if run > 1.0 {
        groups.push(run);
    }
    groups
}

/// Tau-b with tie-corrected variance. Returns `None` when fewer than two
/// items are given or either side is constant.
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> Option<KendallResult> {
    assert_eq!(x.len(), y.len());
    let n = x.len();
    if n < 2 {
        return None;
    }
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let a = (x[i] - x[j]).signum() * f64::from(x[i] != x[j]);
            let b = (y[i] - y[j]).signum() * f64::from(y[i] != y[j]);
            s += a * b;
        }
    }
    let nf = n as f64;
    let n0 = nf * (nf - 1.0) / 2.0;
    let (tx, ty) = (tie_groups(x), tie_groups(y));
    let pairs = |g: &[f64]| g.iter().map(|t| t * (t - 1.0) / 2.0).sum::<f64>();
    let (n1, n2) = (pairs(&tx), pairs(&ty));
    let denom = ((n0 - n1) * (n0 - n2)).sqrt();
    if denom == 0.0 {
        return None;
    }
    let tau = s / denom;

    let m = nf * (nf - 1.0);
    let v1 = |g: &[f64]| g.iter().map(|t| t * (t - 1.0) * (2.0 * t + 5.0)).sum::<f64>();
    let v2 = |g: &[f64]| g.iter().map(|t| t * (t - 1.0) * (t - 2.0)).sum::<f64>();
    let mut var = (m * (2.0 * nf + 5.0) - v1(&tx) - v1(&ty)) / 18.0 + 2.0 * n1 * n2 / m;
    if n > 2 {
        var += v2(&tx) * v2(&ty) / (9.0 * m * (nf - 2.0));
    }
    let z = s / var.sqrt();
    Some(KendallResult { tau, p_value: erfc(z.abs() / std::f64::consts::SQRT_2) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    #[test]
    fn identical_and_reversed() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let r = kendall_tau_b(&x, &x).unwrap();
        assert!(close(r.tau, 1.0));
        let rev: Vec<f64> = x.iter().rev().copied().collect();
        let r = kendall_tau_b(&x, &rev).unwrap();
        assert!(close(r.tau, -1.0));
        // scipy.stats.kendalltau(method="asymptotic")
        assert!(close(r.p_value, 0.014305878435429648));
    }

    #[test]
    fn reference_values_with_ties() {
        // scipy.stats.kendalltau
        let r = kendall_tau_b(&[3., 1., 4., 1., 5., 9., 2., 6.], &[2., 7., 1., 8., 2., 8., 1., 8.]).unwrap();
        assert!(close(r.tau, 0.16051447078102563));
        assert!(close(r.p_value, 0.6020603043805803));
        let r = kendall_tau_b(&[0.5, 0.3, 0.3, 0.1, 0.05, 0.05], &[0.2, 0.4, 0.0, 0.1, 0.0, 0.3]).unwrap();
        assert!(close(r.tau, 0.14824986333222023));
        assert!(close(r.p_value, 0.6918703516458972));
    }

    #[test]
    fn reference_value_without_ties() {
        let x: Vec<f64> = (0..12).map(f64::from).collect();
        let y = [3., 1., 2., 0., 5., 4., 7., 6., 9., 11., 8., 10.];
        let r = kendall_tau_b(&x, &y).unwrap();
        assert!(close(r.tau, 0.6969696969696969));
        assert!(close(r.p_value, 0.0016086309320193421));
    }

    #[test]
    fn degenerate_inputs() {
        assert!(kendall_tau_b(&[1.0], &[2.0]).is_none());
        assert!(kendall_tau_b(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_none());
    }
}
