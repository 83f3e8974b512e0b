//! Reference implementations used to cross-check the optimised paths.
//!
//! Everything here works directly from per-instance votes and labels by
//! plain summation — no shared code with the incremental accumulator or the
//! QR solve — so tests can compare the two routes independently.

use crate::float::Float;
use crate::score::ScoreVector;

/// A window snapshot for the reference routines: each entry is one
/// instance's per-component normalised votes plus its true label.
pub type VoteWindow<F> = Vec<(Vec<ScoreVector<F>>, usize)>;

/// Squared distance between the weighted vote combination and the one-hot
/// target, summed over instances and classes.
pub fn objective<F: Float>(window: &VoteWindow<F>, p: usize, w: &[F]) -> F {
    let mut total = F::zero();
    for (votes, label) in window {
        for k in 0..p {
            let mut combined = F::zero();
            for (j, vote) in votes.iter().enumerate() {
                combined += w[j] * vote[k];
            }
            let target = if k == *label { F::one() } else { F::zero() };
            let diff = combined - target;
            total += diff * diff;
        }
    }
    total
}

/// Analytic gradient of [`objective`] with respect to the weights.
pub fn gradient<F: Float>(window: &VoteWindow<F>, p: usize, w: &[F]) -> Vec<F> {
    let m = w.len();
    let mut grad = vec![F::zero(); m];
    for (votes, label) in window {
        for k in 0..p {
            let mut combined = F::zero();
            for (j, vote) in votes.iter().enumerate() {
                combined += w[j] * vote[k];
            }
            let target = if k == *label { F::one() } else { F::zero() };
            let residual = combined - target;
            for q in 0..m {
                grad[q] += (residual + residual) * votes[q][k];
            }
        }
    }
    grad
}

/// Central finite-difference gradient of [`objective`].
pub fn finite_difference_gradient<F: Float>(
    window: &VoteWindow<F>,
    p: usize,
    w: &[F],
    step: F,
) -> Vec<F> {
    let mut grad = vec![F::zero(); w.len()];
    let mut probe = w.to_vec();
    for q in 0..w.len() {
        let h = step * (F::one() + w[q].abs());
        probe[q] = w[q] + h;
        let plus = objective(window, p, &probe);
        probe[q] = w[q] - h;
        let minus = objective(window, p, &probe);
        probe[q] = w[q];
        grad[q] = (plus - minus) / (h + h);
    }
    grad
}

/// Gradient-based numeric minimiser of [`objective`]: conjugate gradient
/// with exact line search on the quadratic, restarted enough times to
/// converge on ill-conditioned and rank-deficient systems.
pub fn minimize<F: Float>(window: &VoteWindow<F>, p: usize, m: usize) -> Vec<F> {
    let mut w = vec![F::zero(); m];
    let mut g = gradient(window, p, &w);
    let mut dir: Vec<F> = g.iter().map(|&v| -v).collect();
    let mut g_dot = dot(&g, &g);
    let rounds = 6 * m + 12;
    for _ in 0..rounds {
        if g_dot.sqrt() < F::of(1e-14) {
            break;
        }
        // Exact step for a quadratic: t = -g.dir / (dir' H dir), with the
        // curvature probed by finite evaluation of the gradient along dir.
        let probe: Vec<F> = w.iter().zip(&dir).map(|(&wi, &di)| wi + di).collect();
        let g_probe = gradient(window, p, &probe);
        let mut curvature = F::zero();
        for q in 0..m {
            curvature += (g_probe[q] - g[q]) * dir[q];
        }
        if curvature <= F::zero() {
            break;
        }
        let step = -dot(&g, &dir) / curvature;
        for q in 0..m {
            w[q] += step * dir[q];
        }
        let g_new = gradient(window, p, &w);
        let g_new_dot = dot(&g_new, &g_new);
        let beta = g_new_dot / g_dot;
        for q in 0..m {
            dir[q] = -g_new[q] + beta * dir[q];
        }
        g = g_new;
        g_dot = g_new_dot;
    }
    w
}

/// Brute-force system build by direct double summation over the window.
#[allow(clippy::needless_range_loop)]
pub fn build_system_direct<F: Float>(window: &VoteWindow<F>, m: usize) -> (Vec<F>, Vec<F>) {
    let mut a = vec![F::zero(); m * m];
    let mut d = vec![F::zero(); m];
    for (votes, label) in window {
        for q in 0..m {
            for j in 0..m {
                let mut s = F::zero();
                for k in 0..votes[q].len() {
                    s += votes[q][k] * votes[j][k];
                }
                a[q * m + j] += s;
            }
            d[q] += votes[q][*label];
        }
    }
    (a, d)
}

/// Eigenvalues of a symmetric matrix by the cyclic Jacobi method, ascending.
pub fn symmetric_eigenvalues<F: Float>(a: &[F], n: usize) -> Vec<F> {
    let mut m = a.to_vec();
    let idx = |i: usize, j: usize| i * n + j;
    for _sweep in 0..64 {
        let mut off = F::zero();
        for i in 0..n {
            for j in i + 1..n {
                off += m[idx(i, j)] * m[idx(i, j)];
            }
        }
        if off.sqrt() < F::of(1e-14) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[idx(p, q)];
                if apq == F::zero() {
                    continue;
                }
                let app = m[idx(p, p)];
                let aqq = m[idx(q, q)];
                let theta = (aqq - app) / (F::of(2.0) * apq);
                let t = {
                    let sign = if theta >= F::zero() {
                        F::one()
                    } else {
                        -F::one()
                    };
                    sign / (theta.abs() + (theta * theta + F::one()).sqrt())
                };
                let c = F::one() / (t * t + F::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[idx(k, p)];
                    let mkq = m[idx(k, q)];
                    m[idx(k, p)] = c * mkp - s * mkq;
                    m[idx(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[idx(p, k)];
                    let mqk = m[idx(q, k)];
                    m[idx(p, k)] = c * mpk - s * mqk;
                    m[idx(q, k)] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eig: Vec<F> = (0..n).map(|i| m[idx(i, i)]).collect();
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    eig
}

fn dot<F: Float>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}
