//! Lanczos evaluation of `f(K) v` for a real symmetric operator.

use nalgebra::{DMatrix, SymmetricEigen};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Approximates `f(K) v` in the Krylov space of `(K, v)`, with full
/// reorthogonalisation. Stops at an invariant subspace (then the result is exact
/// up to rounding) or after `max_iter` steps.
pub(crate) fn lanczos_fn(
    apply: impl Fn(&[f64], &mut [f64]),
    v: &[f64],
    f: impl Fn(f64) -> f64,
    max_iter: usize,
) -> Vec<f64> {
    let n = v.len();
    let norm = dot(v, v).sqrt();
    if norm == 0.0 {
        return vec![0.0; n];
    }
    let mut q: Vec<Vec<f64>> = vec![v.iter().map(|x| x / norm).collect()];
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let mut scale = 0.0f64;
    for _ in 0..max_iter.min(n) {
        let cur = q.last().unwrap();
        w.iter_mut().for_each(|x| *x = 0.0);
        apply(cur, &mut w);
        let a = dot(&w, cur);
        alpha.push(a);
        for _ in 0..2 {
            for b in &q {
                let c = dot(&w, b);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let b = dot(&w, &w).sqrt();
        scale = scale.max(a.abs()).max(b);
        if b <= 1e-12 * scale {
            break;
        }
        beta.push(b);
        q.push(w.iter().map(|x| x / b).collect());
    }
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j || j + 1 == i {
            beta[i.min(j)]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    // f(T) e₁
    let mut coef = vec![0.0; m];
    for (k, &theta) in eig.eigenvalues.iter().enumerate() {
        let s = f(theta) * eig.eigenvectors[(0, k)];
        for (i, c) in coef.iter_mut().enumerate() {
            *c += s * eig.eigenvectors[(i, k)];
        }
    }
    let mut out = vec![0.0; n];
    for (c, qi) in coef.iter().zip(&q) {
        out.iter_mut().zip(qi).for_each(|(o, x)| *o += norm * c * x);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_square_root_of_diagonal() {
        let diag = [4.0, 1.0, 0.25, 9.0, 0.0];
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        let apply = |x: &[f64], y: &mut [f64]| {
            for i in 0..5 {
                y[i] += diag[i] * x[i];
            }
        };
        let got = lanczos_fn(apply, &v, |t| if t > 1e-9 { 1.0 / t.sqrt() } else { 0.0 }, 50);
        let want = [0.5, 2.0, 6.0, 4.0 / 3.0, 0.0];
        for i in 0..5 {
            assert!((got[i] - want[i]).abs() < 1e-9, "{i}: {} vs {}", got[i], want[i]);
        }
    }
}
