//! Symmetric tridiagonal eigensolver: bisection on the Sturm sequence for
//! eigenvalues, inverse iteration with a partially pivoted LU for
//! eigenvectors, Gram–Schmidt re-orthogonalization for clustered pairs, and
//! deterministic randomized restarts when an iteration stalls.

use crate::error::{Error, Result};
use crate::grid::TridiagonalOperator;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Number of eigenvalues of (T - x I) that are negative, via the LDL^T
/// recurrence on the shifted matrix.
pub fn count_below(op: &TridiagonalOperator, x: f64) -> usize {
    let d = &op.diagonal;
    let e = &op.off_diagonal;
    let n = d.len();
    // Pivot floor keeps the recurrence from dividing by an exact zero.
    let scale = op.norm_inf().max(1.0);
    let pivmin = f64::MIN_POSITIVE.max(f64::EPSILON * f64::EPSILON * scale);
    // A pivot in (-pivmin, pivmin) is clamped to -pivmin *before* the sign
    // test, so an exactly hit eigenvalue counts as below. Clamping only the
    // divisor would drop those counts, and on Toeplitz matrices whole cycles
    // of zero pivots (e.g. x = diagonal/2 on the free operator) would go
    // uncounted.
    let mut count = 0;
    let mut q = d[0] - x;
    if q.abs() < pivmin {
        q = -pivmin;
    }
    if q < 0.0 {
        count += 1;
    }
    for i in 1..n {
        q = (d[i] - x) - e[i - 1] * e[i - 1] / q;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Gershgorin bounds on the spectrum.
pub fn spectral_bounds(op: &TridiagonalOperator) -> (f64, f64) {
    let n = op.n();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let mut r = 0.0;
        if i > 0 {
            r += op.off_diagonal[i - 1].abs();
        }
        if i + 1 < n {
            r += op.off_diagonal[i].abs();
        }
        lo = lo.min(op.diagonal[i] - r);
        hi = hi.max(op.diagonal[i] + r);
    }
    (lo, hi)
}

/// The `count` algebraically smallest eigenvalues by index bisection,
/// polished later by Rayleigh quotients from the eigenvectors.
pub fn lowest_eigenvalues(op: &TridiagonalOperator, count: usize) -> Vec<f64> {
    let (glo, ghi) = spectral_bounds(op);
    let mut out = Vec::with_capacity(count);
    for j in 0..count {
        let mut lo = if let Some(&prev) = out.last() { prev } else { glo };
        let mut hi = ghi;
        // Width target gives ~1e-12 relative accuracy before polish.
        loop {
            let mid = 0.5 * (lo + hi);
            if !(mid > lo && mid < hi) {
                break; // interval at floating-point resolution
            }
            if count_below(op, mid) >= j + 1 {
                hi = mid;
            } else {
                lo = mid;
            }
            let tol = 1e-13 * lo.abs().max(hi.abs()).max(1e-30);
            if hi - lo <= tol {
                break;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    out
}

/// LU factorization of a shifted tridiagonal matrix with partial pivoting.
/// Row swaps introduce a second superdiagonal.
struct TriLu {
    n: usize,
    low: Vec<f64>,  // multipliers
    diag: Vec<f64>, // U main diagonal
    up1: Vec<f64>,  // U first superdiagonal
    up2: Vec<f64>,  // U second superdiagonal (fill-in)
    swap: Vec<bool>,
}

impl TriLu {
    fn factor(op: &TridiagonalOperator, shift: f64) -> TriLu {
        let n = op.n();
        let e = &op.off_diagonal;
        let mut low = vec![0.0; n.saturating_sub(1)];
        let mut diag: Vec<f64> = op.diagonal.iter().map(|d| d - shift).collect();
        let mut up1 = vec![0.0; n.saturating_sub(1)];
        let mut up2 = vec![0.0; n.saturating_sub(2)];
        let mut swap = vec![false; n.saturating_sub(1)];
        up1.copy_from_slice(e);
        let scale = op.norm_inf().max(1.0);
        let tiny = f64::EPSILON * scale * 1e-3;
        for i in 0..n.saturating_sub(1) {
            let sub = e[i];
            if diag[i].abs() >= sub.abs() {
                // No swap; eliminate the subdiagonal entry.
                let piv = if diag[i].abs() < tiny {
                    tiny.copysign(if diag[i] == 0.0 { 1.0 } else { diag[i] })
                } else {
                    diag[i]
                };
                diag[i] = piv;
                let f = sub / piv;
                low[i] = f;
                diag[i + 1] -= f * up1[i];
                if i + 2 < n {
                    // up2 stays as initialized (zero) without a swap
                }
            } else {
                // Swap rows i and i+1.
                swap[i] = true;
                let f = diag[i] / sub;
                low[i] = f;
                let d_next = diag[i + 1];
                diag[i] = sub;
                let u1 = up1[i];
                up1[i] = d_next;
                diag[i + 1] = u1 - f * d_next;
                if i + 2 < n {
                    up2[i] = e[i + 1];
                    up1[i + 1] = -f * e[i + 1];
                }
            }
        }
        if n > 0 {
            let last = n - 1;
            if diag[last].abs() < tiny {
                diag[last] = tiny.copysign(if diag[last] == 0.0 { 1.0 } else { diag[last] });
            }
        }
        TriLu { n, low, diag, up1, up2, swap }
    }

    fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        for i in 0..n.saturating_sub(1) {
            if self.swap[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= self.low[i] * b[i];
        }
        for i in (0..n).rev() {
            let mut x = b[i];
            if i + 1 < n {
                x -= self.up1[i] * b[i + 1];
            }
            if i + 2 < n {
                x -= self.up2[i] * b[i + 2];
            }
            b[i] = x / self.diag[i];
        }
    }
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
}

fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for w in basis {
        let dot: f64 = v.iter().zip(w).map(|(a, b)| a * b).sum();
        for (x, y) in v.iter_mut().zip(w) {
            *x -= dot * y;
        }
    }
}

fn residual_norm(op: &TridiagonalOperator, lambda: f64, v: &[f64]) -> f64 {
    let mut av = vec![0.0; v.len()];
    op.matvec(v, &mut av);
    av.iter().zip(v).map(|(a, x)| (a - lambda * x) * (a - lambda * x)).sum::<f64>().sqrt()
}

/// Inverse iteration for the eigenvector at `lambda`, kept orthogonal to
/// `prior`. Start vectors come from a ChaCha12 stream seeded only by the
/// matrix size and attempt number, so restarts are deterministic.
pub fn eigenvector(
    op: &TridiagonalOperator,
    lambda: f64,
    prior: &[Vec<f64>],
) -> Result<(Vec<f64>, f64, f64)> {
    let n = op.n();
    let scale = op.norm_inf();
    let target = 1e-8 * scale;
    let lu = TriLu::factor(op, lambda);
    let mut best: Option<(Vec<f64>, f64, f64)> = None;
    for attempt in 0..6u64 {
        let mut rng = ChaCha12Rng::seed_from_u64(
            0x5eed_0000_0000_0000u64 ^ (n as u64) ^ (attempt << 32),
        );
        let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        orthogonalize(&mut v, prior);
        normalize(&mut v);
        for _ in 0..4 {
            lu.solve_in_place(&mut v);
            orthogonalize(&mut v, prior);
            orthogonalize(&mut v, prior); // second pass for clustered pairs
            normalize(&mut v);
        }
        // Rayleigh polish of the eigenvalue.
        let mut av = vec![0.0; n];
        op.matvec(&v, &mut av);
        let rayleigh: f64 = av.iter().zip(&v).map(|(a, x)| a * x).sum();
        let res = residual_norm(op, rayleigh, &v);
        match &best {
            Some((_, _, r)) if *r <= res => {}
            _ => best = Some((v.clone(), rayleigh, res)),
        }
        if res <= target {
            break;
        }
    }
    let (mut v, rayleigh, res) = best.expect("at least one attempt ran");
    if res > target {
        return Err(Error::NonConvergence {
            context: format!("inverse iteration at lambda = {lambda:.6e}"),
            iterations: 6 * 4,
            energy: rayleigh,
            residual: res,
            last_iterate: v,
        });
    }
    // Deterministic sign: first component of significant magnitude positive.
    let lead = v.iter().find(|x| x.abs() > 1e-8).copied().unwrap_or(1.0);
    if lead < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
    Ok((v, rayleigh, res))
}

/// Eigenvalues and orthonormal eigenvectors (Euclidean normalization) of the
/// `count` lowest states.
pub fn lowest_eigenpairs_euclidean(
    op: &TridiagonalOperator,
    count: usize,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let mut values = lowest_eigenvalues(op, count);
    let scale = op.norm_inf();
    let cluster = 1e-8 * scale;
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(count);
    for j in 0..count {
        // Orthogonalize only against members of the same cluster; distinct
        // eigenvalues separate on their own.
        let prior: Vec<Vec<f64>> = (0..j)
            .filter(|&i| (values[i] - values[j]).abs() <= cluster.max(1e-10 * values[j].abs()))
            .map(|i| vectors[i].clone())
            .collect();
        let (v, rayleigh, _res) = eigenvector(op, values[j], &prior)?;
        // The Rayleigh quotient is quadratically more accurate than the
        // bisection midpoint; accept it when consistent, clamped so a
        // degenerate pair cannot come out reordered by round-off.
        if (rayleigh - values[j]).abs() <= cluster.max(1e-9 * values[j].abs()) {
            values[j] = if j == 0 { rayleigh } else { rayleigh.max(values[j - 1]) };
        }
        vectors.push(v);
    }
    Ok((values, vectors))
}
