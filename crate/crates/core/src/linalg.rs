//! Small dense linear-algebra helpers over `DMatrix<Complex64>`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
pub use num_complex::Complex64 as C64;

pub type CMat = DMatrix<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

pub fn is_prime(d: usize) -> bool {
    if d < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= d {
        if d % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// `d^n` with an overflow guard returned as u128 so callers can compare to caps.
pub fn dim_u128(d: usize, n: usize) -> u128 {
    (d as u128).saturating_pow(n as u32)
}

/// Primitive d-th root of unity raised to `k`.
pub fn omega(d: usize, k: i64) -> C64 {
    let k = k.rem_euclid(d as i64) as f64;
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k / d as f64)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn dagger(a: &CMat) -> CMat {
    a.adjoint()
}

pub fn mat_pow(a: &CMat, k: u32) -> CMat {
    let mut out = identity(a.nrows());
    for _ in 0..k {
        out = &out * a;
    }
    out
}

/// Largest entry modulus.
pub fn max_abs(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Frobenius distance, used for matrix-equality assertions.
pub fn frob_dist(a: &CMat, b: &CMat) -> f64 {
    (a - b).norm()
}

/// Max-entry distance after removing the best global phase from `b`.
pub fn dist_up_to_phase(a: &CMat, b: &CMat) -> f64 {
    let ip = b.dotc(a);
    let phase = if ip.norm() > 1e-300 { ip / ip.norm() } else { ONE };
    max_abs(&(a - b * phase))
}

pub fn is_unitary(u: &CMat, tol: f64) -> bool {
    u.is_square() && frob_dist(&(u.adjoint() * u), &identity(u.nrows())) < tol
}

/// Eigen-decomposition of a Hermitian matrix (input is symmetrised first).
pub fn hermitian_eig(m: &CMat) -> (Vec<f64>, CMat) {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    SymmetricEigen::new(h).eigenvalues.iter().copied().collect()
}

/// Apply `f` to the spectrum of a Hermitian matrix.
pub fn hermitian_fn(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = hermitian_eig(m);
    let n = m.nrows();
    let mut scaled = vecs.clone();
    for (j, v) in vals.iter().enumerate() {
        let s = C64::new(f(*v), 0.0);
        for i in 0..n {
            scaled[(i, j)] *= s;
        }
    }
    scaled * vecs.adjoint()
}

pub fn psd_sqrt(m: &CMat) -> CMat {
    hermitian_fn(m, |x| x.max(0.0).sqrt())
}

/// Pseudo-inverse square root: eigenvalues below `tol` are mapped to zero.
pub fn pinv_sqrt(m: &CMat, tol: f64) -> CMat {
    hermitian_fn(m, |x| if x > tol { 1.0 / x.sqrt() } else { 0.0 })
}

/// Projector onto the eigenspace with eigenvalue below `tol`.
pub fn kernel_projector(m: &CMat, tol: f64) -> CMat {
    hermitian_fn(m, |x| if x > tol { 0.0 } else { 1.0 })
}

pub fn trace(m: &CMat) -> C64 {
    m.trace()
}

/// `½‖A‖₁` for Hermitian A.
pub fn half_trace_norm(m: &CMat) -> f64 {
    0.5 * hermitian_eigenvalues(m).iter().map(|x| x.abs()).sum::<f64>()
}

/// ½‖V₁V₁† − V₂V₂†‖₁ without forming the full operators.
///
/// The difference lives in the column span of `[V₁ V₂]`; it is diagonalised in
/// an orthonormal basis of that span from a QR factorisation. Working with the
/// difference directly keeps nearly equal inputs at rounding-level distance.
pub fn low_rank_trace_distance(v1: &CMat, v2: &CMat) -> f64 {
    assert_eq!(v1.nrows(), v2.nrows());
    let (c1, c2) = (v1.ncols(), v2.ncols());
    if c1 + c2 == 0 {
        return 0.0;
    }
    let mut w = CMat::zeros(v1.nrows(), c1 + c2);
    w.columns_mut(0, c1).copy_from(v1);
    w.columns_mut(c1, c2).copy_from(v2);
    let q = w.qr().q();
    let a = q.adjoint() * v1;
    let b = q.adjoint() * v2;
    half_trace_norm(&(&a * a.adjoint() - &b * b.adjoint()))
}

/// Column-compress a factor `V` so that `V V†` is unchanged and the columns are
/// orthogonal. Columns carrying less than `tol` weight are dropped.
pub fn compress_factor(v: &CMat, tol: f64) -> CMat {
    if v.ncols() == 0 {
        return v.clone();
    }
    let g = v.adjoint() * v;
    let (vals, vecs) = hermitian_eig(&g);
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > tol).collect();
    let mut out = CMat::zeros(v.nrows(), keep.len());
    for (c, &i) in keep.iter().enumerate() {
        out.set_column(c, &(v * vecs.column(i)));
    }
    out
}

pub fn column(v: &[C64]) -> CMat {
    CMat::from_column_slice(v.len(), 1, v)
}

pub fn dvec(v: &[C64]) -> DVector<C64> {
    DVector::from_column_slice(v)
}

/// Row-major flat list of complex entries into a square matrix.
pub fn from_row_major(n: usize, entries: &[C64]) -> CMat {
    CMat::from_row_slice(n, n, entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        let p: Vec<usize> = (0..20).filter(|&d| is_prime(d)).collect();
        assert_eq!(p, vec![2, 3, 5, 7, 11, 13, 17, 19]);
    }

    #[test]
    fn low_rank_distance_matches_dense() {
        let a = CMat::from_fn(4, 2, |i, j| C64::new((i + j) as f64 * 0.1, (i as f64 - j as f64) * 0.05));
        let b = CMat::from_fn(4, 1, |i, _| C64::new(0.2 * i as f64, 0.1));
        let dense = half_trace_norm(&(&a * a.adjoint() - &b * b.adjoint()));
        assert!((low_rank_trace_distance(&a, &b) - dense).abs() < 1e-12);
    }

    #[test]
    fn compress_keeps_operator() {
        let a = CMat::from_fn(5, 7, |i, j| C64::new(((i * 3 + j) % 4) as f64, (j % 2) as f64));
        let c = compress_factor(&a, 1e-14);
        assert!(c.ncols() <= 5);
        assert!(frob_dist(&(&a * a.adjoint()), &(&c * c.adjoint())) < 1e-10);
    }
}
