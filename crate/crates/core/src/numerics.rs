//! Dense complex-matrix kernel: Hermitian eigendecompositions, support-restricted
//! matrix functions, Schatten norms, tensor products, partial traces and
//! subsystem permutations.
//!
//! All operations are pure functions of their inputs and hold no global state.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Error, Result};

pub type Complex64 = Complex<f64>;
pub type CMat = DMatrix<Complex64>;

/// Relative tolerance for the Hermiticity check.
pub const HERM_TOL: f64 = 1e-10;
/// Relative tolerance below which a negative eigenvalue disqualifies a PSD claim.
pub const PSD_TOL: f64 = 1e-10;
/// Relative factor for the support cutoff: an eigenvalue is treated as zero
/// iff it is at most `dim * lambda_max * RANK_CUTOFF_FACTOR`.
pub const RANK_CUTOFF_FACTOR: f64 = 1e-12;

pub fn rank_cutoff(dim: usize, lambda_max: f64) -> f64 {
    dim as f64 * lambda_max * RANK_CUTOFF_FACTOR
}

/// Largest absolute entry; cheap stand-in scale for relative comparisons.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn all_finite(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Checks squareness and approximate Hermiticity (relative to the matrix scale).
pub fn check_hermitian(m: &CMat) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::Shape(format!(
            "expected square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if !all_finite(m) {
        return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
    }
    let scale = max_abs(m);
    let deviation = max_abs(&(m - m.adjoint()));
    // absolute floor so numerically-zero matrices (scale at roundoff level)
    // still count as Hermitian
    if deviation > (HERM_TOL * scale).max(1e-14) {
        return Err(Error::NotHermitian { deviation, scale });
    }
    Ok(())
}

/// Spectral data of a Hermitian operator, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, ordered consistently with `values`.
    pub vectors: CMat,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn lambda_max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc: f64, v| acc.max(v.abs()))
    }

    /// Reassembles sum_i f(lambda_i) |i><i| over eigenvalues selected by `keep`.
    pub fn assemble<F, K>(&self, mut f: F, mut keep: K) -> CMat
    where
        F: FnMut(f64) -> Complex64,
        K: FnMut(f64) -> bool,
    {
        let d = self.dim();
        let mut out = CMat::zeros(d, d);
        for (i, &lam) in self.values.iter().enumerate() {
            if keep(lam) {
                let v = self.vectors.column(i);
                let w = f(lam);
                out += (&v * v.adjoint()).map(|z| z * w);
            }
        }
        out
    }
}

fn fingerprint(m: &CMat) -> u64 {
    // FNV-1a over the entry bit patterns, for error diagnostics only.
    let mut h: u64 = 0xcbf29ce484222325;
    for z in m.iter() {
        for bits in [z.re.to_bits(), z.im.to_bits()] {
            for byte in bits.to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        }
    }
    h
}

/// Hermitian eigendecomposition with eigenvalues sorted ascending.
pub fn herm_eig(m: &CMat) -> Result<EigenSystem> {
    check_hermitian(m)?;
    let d = m.nrows();
    // Symmetrize first so that roundoff-level anti-Hermitian parts cannot leak
    // into the solver.
    let sym = (m + m.adjoint()).map(|z| z * Complex64::new(0.5, 0.0));
    let eig = nalgebra::SymmetricEigen::try_new(sym, f64::EPSILON, 10_000).ok_or(
        Error::EigenFailure {
            dim: d,
            fingerprint: fingerprint(m),
        },
    )?;
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(d, d);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }
    Ok(EigenSystem { values, vectors })
}

fn require_psd(eig: &EigenSystem) -> Result<()> {
    let scale = eig.lambda_max_abs();
    let min_eig = eig.values.first().copied().unwrap_or(0.0);
    if min_eig < -PSD_TOL * scale.max(1e-300) {
        return Err(Error::NotPsd { min_eig });
    }
    Ok(())
}

/// `A^z` restricted to the support of the PSD operator `A`: eigenvalues at or
/// below the rank cutoff contribute nothing, so negative exponents act as
/// pseudo-inverse powers and `z = it` yields a partial isometry on supp(A).
pub fn power_on_support(m: &CMat, z: Complex64) -> Result<CMat> {
    let eig = herm_eig(m)?;
    power_on_support_eig(&eig, z)
}

/// Same as [`power_on_support`] but reusing a precomputed eigensystem.
pub fn power_on_support_eig(eig: &EigenSystem, z: Complex64) -> Result<CMat> {
    require_psd(eig)?;
    let cutoff = rank_cutoff(eig.dim(), eig.lambda_max_abs());
    Ok(eig.assemble(|lam| (z * lam.ln()).exp(), |lam| lam > cutoff))
}

/// Projection onto the support of a PSD operator.
pub fn support_projector(m: &CMat) -> Result<CMat> {
    let eig = herm_eig(m)?;
    support_projector_eig(&eig)
}

pub fn support_projector_eig(eig: &EigenSystem) -> Result<CMat> {
    require_psd(eig)?;
    let cutoff = rank_cutoff(eig.dim(), eig.lambda_max_abs());
    Ok(eig.assemble(|_| Complex64::new(1.0, 0.0), |lam| lam > cutoff))
}

/// Rank of a PSD operator under the support cutoff.
pub fn support_rank(eig: &EigenSystem) -> usize {
    let cutoff = rank_cutoff(eig.dim(), eig.lambda_max_abs());
    eig.values.iter().filter(|&&lam| lam > cutoff).count()
}

/// Schatten p-norm via singular values; `p = f64::INFINITY` returns the
/// largest singular value directly rather than as a limit.
pub fn schatten_norm(m: &CMat, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "Schatten norm requires p >= 1, got {p}"
        )));
    }
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().fold(0.0, |acc: f64, s| acc.max(*s));
    if p.is_infinite() || top == 0.0 {
        return Ok(top);
    }
    // factor out the largest value so s^p cannot overflow at large p
    let sum: f64 = sv.iter().map(|s| (s / top).powf(p)).sum();
    Ok(top * sum.powf(1.0 / p))
}

pub fn trace_norm(m: &CMat) -> f64 {
    schatten_norm(m, 1.0).expect("p = 1 is always valid")
}

/// Largest |eigenvalue| of a Hermitian matrix; equals its Schatten-infinity
/// norm without going through an SVD.
pub fn herm_spectral_norm(m: &CMat) -> Result<f64> {
    let eig = herm_eig(m)?;
    Ok(eig.lambda_max_abs())
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn identity(dim: usize) -> CMat {
    CMat::identity(dim, dim)
}

fn check_dims(m: &CMat, dims: &[usize]) -> Result<usize> {
    let total: usize = dims.iter().product();
    if m.nrows() != m.ncols() || m.nrows() != total {
        return Err(Error::Shape(format!(
            "matrix is {}x{} but subsystem dims {:?} give total {}",
            m.nrows(),
            m.ncols(),
            dims,
            total
        )));
    }
    Ok(total)
}

/// Row-major strides for a mixed-radix index over `dims`.
fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Traces out the subsystems listed in `traced`; the kept subsystems retain
/// their relative order. Preserves the trace.
pub fn partial_trace(m: &CMat, dims: &[usize], traced: &[usize]) -> Result<CMat> {
    check_dims(m, dims)?;
    let n = dims.len();
    for &k in traced {
        if k >= n {
            return Err(Error::Shape(format!(
                "traced index {k} out of range for {n} subsystems"
            )));
        }
    }
    let mut seen = vec![false; n];
    for &k in traced {
        if seen[k] {
            return Err(Error::Shape(format!("traced index {k} repeated")));
        }
        seen[k] = true;
    }
    let kept: Vec<usize> = (0..n).filter(|i| !seen[*i]).collect();
    let kept_dims: Vec<usize> = kept.iter().map(|&i| dims[i]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&i| dims[i]).collect();
    let dk: usize = kept_dims.iter().product();
    let dt: usize = traced_dims.iter().product();
    let st = strides(dims);

    let mut out = CMat::zeros(dk, dk);
    let mut kept_idx = vec![0usize; kept.len()];
    for kr in 0..dk {
        decode(kr, &kept_dims, &mut kept_idx);
        let base_r: usize = kept_idx.iter().zip(&kept).map(|(&v, &i)| v * st[i]).sum();
        let mut kept_idx_c = vec![0usize; kept.len()];
        for kc in 0..dk {
            decode(kc, &kept_dims, &mut kept_idx_c);
            let base_c: usize = kept_idx_c.iter().zip(&kept).map(|(&v, &i)| v * st[i]).sum();
            let mut tr_idx = vec![0usize; traced.len()];
            let mut acc = Complex64::new(0.0, 0.0);
            for e in 0..dt {
                decode(e, &traced_dims, &mut tr_idx);
                let off: usize = tr_idx.iter().zip(traced).map(|(&v, &i)| v * st[i]).sum();
                acc += m[(base_r + off, base_c + off)];
            }
            out[(kr, kc)] = acc;
        }
    }
    Ok(out)
}

fn decode(mut flat: usize, dims: &[usize], out: &mut [usize]) {
    for i in (0..dims.len()).rev() {
        out[i] = flat % dims[i];
        flat /= dims[i];
    }
}

/// Reorders subsystems so that new position `k` holds old subsystem `perm[k]`.
/// Conjugation by the corresponding index permutation; the inverse permutation
/// undoes it exactly.
pub fn permute_systems(m: &CMat, dims: &[usize], perm: &[usize]) -> Result<CMat> {
    let total = check_dims(m, dims)?;
    let n = dims.len();
    if perm.len() != n {
        return Err(Error::InvalidParameter(format!(
            "permutation has length {} but there are {} subsystems",
            perm.len(),
            n
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::InvalidParameter(format!(
                "{perm:?} is not a permutation of 0..{n}"
            )));
        }
        seen[p] = true;
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let st_new = strides(&new_dims);
    // old flat index -> new flat index
    let mut map = vec![0usize; total];
    let mut idx = vec![0usize; n];
    for (flat, slot) in map.iter_mut().enumerate() {
        decode(flat, dims, &mut idx);
        *slot = perm.iter().enumerate().map(|(k, &p)| idx[p] * st_new[k]).sum();
    }
    let mut out = CMat::zeros(total, total);
    for r in 0..total {
        for c in 0..total {
            out[(map[r], map[c])] = m[(r, c)];
        }
    }
    Ok(out)
}

pub fn cmat_from_rows(rows: usize, cols: usize, entries: &[Complex64]) -> Result<CMat> {
    if entries.len() != rows * cols {
        return Err(Error::Shape(format!(
            "{} entries cannot fill a {}x{} matrix",
            entries.len(),
            rows,
            cols
        )));
    }
    Ok(CMat::from_row_slice(rows, cols, entries))
}

pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn im(x: f64) -> Complex64 {
    Complex64::new(0.0, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn diag(values: &[f64]) -> CMat {
        CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            values.len(),
            values.iter().map(|&v| re(v)),
        ))
    }

    #[test]
    fn herm_eig_diagonal() {
        let eig = herm_eig(&diag(&[2.0, 1.0])).unwrap();
        assert_abs_diff_eq!(eig.values[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(eig.values[1], 2.0, epsilon = 1e-14);
    }

    #[test]
    fn herm_eig_pauli_x() {
        let x = cmat_from_rows(2, 2, &[re(0.0), re(1.0), re(1.0), re(0.0)]).unwrap();
        let eig = herm_eig(&x).unwrap();
        assert_abs_diff_eq!(eig.values[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(eig.values[1], 1.0, epsilon = 1e-14);
        for col in 0..2 {
            let v = eig.vectors.column(col);
            assert_abs_diff_eq!(v[0].norm(), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
            assert_abs_diff_eq!(v[1].norm(), std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
        }
    }

    #[test]
    fn herm_eig_reconstructs_random() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let a = crate::quantum::random_hermitian(6, &mut rng);
        let eig = herm_eig(&a).unwrap();
        let rebuilt = eig.assemble(re, |_| true);
        let rel = max_abs(&(&rebuilt - &a)) / max_abs(&a);
        assert!(rel <= 1e-12, "relative reconstruction error {rel}");
        // columns orthonormal
        let gram = eig.vectors.adjoint() * &eig.vectors;
        assert!(max_abs(&(gram - identity(6))) <= 1e-12);
        // eigenvalue sum equals the trace
        let sum: f64 = eig.values.iter().sum();
        assert_abs_diff_eq!(sum, a.trace().re, epsilon = 1e-11 * max_abs(&a));
    }

    #[test]
    fn herm_eig_rejects_non_hermitian() {
        let m = cmat_from_rows(2, 2, &[re(0.0), re(1.0), re(2.0), re(0.0)]).unwrap();
        assert!(matches!(herm_eig(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn power_diagonal_square_root() {
        let p = power_on_support(&diag(&[4.0, 9.0]), re(0.5)).unwrap();
        assert!(max_abs(&(p - diag(&[2.0, 3.0]))) <= 1e-12);
    }

    #[test]
    fn power_negative_exponent_stays_on_support() {
        let p = power_on_support(&diag(&[0.5, 0.0]), re(-0.5)).unwrap();
        assert!(max_abs(&(p - diag(&[2f64.sqrt(), 0.0]))) <= 1e-12);
    }

    #[test]
    fn power_imaginary_exponent_is_phase() {
        let t = 0.37;
        let p = power_on_support(&diag(&[1.0, std::f64::consts::E]), im(t)).unwrap();
        assert_abs_diff_eq!(p[(0, 0)].re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p[(1, 1)].re, t.cos(), epsilon = 1e-12);
        assert_abs_diff_eq!(p[(1, 1)].im, t.sin(), epsilon = 1e-12);
    }

    #[test]
    fn power_rejects_negative_operator() {
        assert!(matches!(
            power_on_support(&diag(&[1.0, -0.5]), re(0.5)),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn power_additivity_on_support() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let rho = crate::quantum::random_density_matrix(5, 3, &mut rng);
        let (r, s) = (0.7, -0.3);
        let lhs = power_on_support(&rho, re(r)).unwrap() * power_on_support(&rho, re(s)).unwrap();
        let rhs = power_on_support(&rho, re(r + s)).unwrap();
        assert!(max_abs(&(lhs - rhs)) <= 1e-10);
    }

    #[test]
    fn imaginary_power_is_partial_isometry() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        let rho = crate::quantum::random_density_matrix(5, 2, &mut rng);
        let w = power_on_support(&rho, im(1.3)).unwrap();
        let pi = support_projector(&rho).unwrap();
        assert!(max_abs(&(w.adjoint() * w - pi)) <= 1e-10);
    }

    #[test]
    fn support_projector_examples() {
        let p = support_projector(&diag(&[0.3, 0.0, 0.7])).unwrap();
        assert!(max_abs(&(p - diag(&[1.0, 0.0, 1.0]))) <= 1e-12);
        let full = support_projector(&diag(&[0.25, 0.75])).unwrap();
        assert!(max_abs(&(full - identity(2))) <= 1e-12);
    }

    #[test]
    fn support_projector_pure_state() {
        let psi = CMat::from_column_slice(2, 1, &[re(0.6), re(0.8)]);
        let proj = &psi * psi.adjoint();
        let p = support_projector(&proj).unwrap();
        assert!(max_abs(&(p - proj)) <= 1e-12);
    }

    #[test]
    fn schatten_norm_diagonal() {
        let a = diag(&[3.0, -4.0]);
        assert_abs_diff_eq!(schatten_norm(&a, 1.0).unwrap(), 7.0, epsilon = 1e-12);
        assert_abs_diff_eq!(schatten_norm(&a, 2.0).unwrap(), 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(schatten_norm(&a, f64::INFINITY).unwrap(), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn schatten_norm_frobenius_identity() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let a = crate::quantum::random_hermitian(4, &mut rng);
        let frob: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert_abs_diff_eq!(schatten_norm(&a, 2.0).unwrap(), frob, epsilon = 1e-12);
    }

    #[test]
    fn schatten_norm_rejects_small_p() {
        assert!(matches!(
            schatten_norm(&identity(2), 0.5),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn kron_basics() {
        assert!(max_abs(&(kron(&identity(2), &identity(2)) - identity(4))) == 0.0);
        let got = kron(&diag(&[1.0, 2.0]), &diag(&[3.0, 4.0]));
        assert!(max_abs(&(got - diag(&[3.0, 4.0, 6.0, 8.0]))) == 0.0);
    }

    #[test]
    fn kron_mixed_product() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mats: Vec<CMat> = (0..4).map(|_| crate::quantum::random_hermitian(2, &mut rng)).collect();
        let (a, b, c, d) = (&mats[0], &mats[1], &mats[2], &mats[3]);
        let lhs = kron(a, b) * kron(c, d);
        let rhs = kron(&(a * c), &(b * d));
        assert!(max_abs(&(lhs - rhs)) <= 1e-12);
    }

    #[test]
    fn partial_trace_product_state() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let ra = crate::quantum::random_density_matrix(2, 2, &mut rng);
        let rb = crate::quantum::random_density_matrix(3, 3, &mut rng);
        let joint = kron(&ra, &rb);
        let got = partial_trace(&joint, &[2, 3], &[1]).unwrap();
        assert!(max_abs(&(got - &ra)) <= 1e-12);
        let got_b = partial_trace(&joint, &[2, 3], &[0]).unwrap();
        assert!(max_abs(&(got_b - &rb)) <= 1e-12);
    }

    #[test]
    fn partial_trace_bell_state() {
        let mut bell = CMat::zeros(4, 4);
        for (r, c) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            bell[(r, c)] = re(0.5);
        }
        for traced in [0usize, 1] {
            let red = partial_trace(&bell, &[2, 2], &[traced]).unwrap();
            assert!(max_abs(&(red - diag(&[0.5, 0.5]))) <= 1e-14);
        }
    }

    #[test]
    fn partial_trace_empty_set_is_identity_op() {
        let m = diag(&[1.0, 2.0, 3.0, 4.0]);
        let got = partial_trace(&m, &[2, 2], &[]).unwrap();
        assert!(max_abs(&(got - m)) == 0.0);
    }

    #[test]
    fn partial_trace_order_commutes() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let rho = crate::quantum::random_density_matrix(8, 8, &mut rng);
        let ab = partial_trace(&rho, &[2, 2, 2], &[0, 1]).unwrap();
        let a_then_b = partial_trace(
            &partial_trace(&rho, &[2, 2, 2], &[1]).unwrap(),
            &[2, 2],
            &[0],
        )
        .unwrap();
        assert!(max_abs(&(ab - a_then_b)) <= 1e-12);
    }

    #[test]
    fn partial_trace_shape_error() {
        assert!(matches!(
            partial_trace(&identity(3), &[2, 2], &[0]),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn permute_identity_and_swap() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let ra = crate::quantum::random_density_matrix(2, 2, &mut rng);
        let rb = crate::quantum::random_density_matrix(3, 3, &mut rng);
        let joint = kron(&ra, &rb);
        let same = permute_systems(&joint, &[2, 3], &[0, 1]).unwrap();
        assert!(max_abs(&(&same - &joint)) == 0.0);
        let swapped = permute_systems(&joint, &[2, 3], &[1, 0]).unwrap();
        assert!(max_abs(&(swapped - kron(&rb, &ra))) <= 1e-14);
    }

    #[test]
    fn permute_involution_is_exact() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(32);
        let rho = crate::quantum::random_density_matrix(12, 12, &mut rng);
        let perm = [2usize, 0, 1];
        let dims = [2usize, 2, 3];
        let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
        // inverse permutation
        let mut inv = [0usize; 3];
        for (k, &p) in perm.iter().enumerate() {
            inv[p] = k;
        }
        let forward = permute_systems(&rho, &dims, &perm).unwrap();
        let back = permute_systems(&forward, &new_dims, &inv).unwrap();
        assert!(max_abs(&(back - rho)) == 0.0);
    }

    #[test]
    fn permute_rejects_bad_permutation() {
        assert!(matches!(
            permute_systems(&identity(4), &[2, 2], &[0, 0]),
            Err(Error::InvalidParameter(_))
        ));
    }
}
