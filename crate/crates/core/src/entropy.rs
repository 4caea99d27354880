//! Entropic quantities in natural units: von Neumann entropy, (max-)relative
//! entropy, fidelity, relative-entropy differences under a channel, and the
//! Renyi-type difference / conditional-information family.
//!
//! All functions take raw matrices plus subsystem dimensions where needed;
//! preconditions (Hermitian, PSD, unit trace) are documented per function and
//! checked only to the extent required to keep answers meaningful.

use crate::error::{Error, Result};
use crate::numerics::{
    self, herm_eig, herm_spectral_norm, identity, kron, partial_trace, permute_systems,
    power_on_support, rank_cutoff, re, support_projector_eig, CMat,
};
use crate::quantum::QuantumMap;

/// Relative support-leak tolerance: supp(w) is declared inside supp(t) when
/// ||(I - P_t) w (I - P_t)||_inf <= dim * SUPPORT_TOL * ||w||_inf.
pub const SUPPORT_TOL: f64 = 1e-10;

/// A value in natural units of information. Finite, or a positive-infinity
/// sentinel for relative entropies with violated support; never NaN.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Nats(f64);

impl Nats {
    pub const ZERO: Nats = Nats(0.0);
    pub const INFINITY: Nats = Nats(f64::INFINITY);

    /// Wraps a finite value; panics on NaN or infinities, which must never be
    /// produced by arithmetic in this crate.
    pub fn finite(v: f64) -> Nats {
        assert!(v.is_finite(), "Nats::finite got {v}");
        Nats(v)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

impl std::fmt::Display for Nats {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{:.12e}", self.0)
        }
    }
}

/// A Renyi order away from 1, carrying alpha' = (alpha - 1)/alpha.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RenyiParam {
    alpha: f64,
    alpha_prime: f64,
}

impl RenyiParam {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 || alpha == 1.0 {
            return Err(Error::InvalidParameter(format!(
                "Renyi order must be positive and != 1, got {alpha}"
            )));
        }
        Ok(Self {
            alpha,
            alpha_prime: (alpha - 1.0) / alpha,
        })
    }

    pub fn alpha(self) -> f64 {
        self.alpha
    }

    pub fn alpha_prime(self) -> f64 {
        self.alpha_prime
    }
}

/// True when the support of `omega` is contained in the support of `tau`
/// within the tolerance of [`SUPPORT_TOL`]. Both must be Hermitian PSD.
pub fn support_contained(omega: &CMat, tau: &CMat) -> Result<bool> {
    let tau_eig = herm_eig(tau)?;
    let pi = support_projector_eig(&tau_eig)?;
    let q = identity(omega.nrows()) - pi;
    let leak = &q * omega * &q;
    let leak_norm = herm_spectral_norm(&leak)?;
    let scale = herm_spectral_norm(omega)?;
    Ok(leak_norm <= omega.nrows() as f64 * SUPPORT_TOL * scale.max(f64::MIN_POSITIVE))
}

/// -sum lambda ln lambda over the support of a state.
pub fn von_neumann(rho: &CMat) -> Result<Nats> {
    let eig = herm_eig(rho)?;
    let cut = rank_cutoff(eig.dim(), eig.lambda_max_abs());
    let h: f64 = eig
        .values
        .iter()
        .filter(|&&l| l > cut)
        .map(|&l| -l * l.ln())
        .sum();
    Ok(Nats::finite(h))
}

/// D(omega || tau) = Tr{omega (ln omega - ln tau)} with logarithms on the
/// respective supports; `Nats::INFINITY` when supp(omega) leaks out of
/// supp(tau). `omega` is a state, `tau` any PSD operator.
pub fn relative_entropy(omega: &CMat, tau: &CMat) -> Result<Nats> {
    let w_eig = herm_eig(omega)?;
    let t_eig = herm_eig(tau)?;

    let t_cut = rank_cutoff(t_eig.dim(), t_eig.lambda_max_abs());
    let pi = support_projector_eig(&t_eig)?;
    let q = identity(omega.nrows()) - pi;
    let leak = herm_spectral_norm(&(&q * omega * &q))?;
    let scale = herm_spectral_norm(omega)?;
    if leak > omega.nrows() as f64 * SUPPORT_TOL * scale.max(f64::MIN_POSITIVE) {
        return Ok(Nats::INFINITY);
    }

    let w_cut = rank_cutoff(w_eig.dim(), w_eig.lambda_max_abs());
    let term1: f64 = w_eig
        .values
        .iter()
        .filter(|&&l| l > w_cut)
        .map(|&l| l * l.ln())
        .sum();
    let log_tau = t_eig.assemble(|l| re(l.ln()), |l| l > t_cut);
    let term2 = (omega * log_tau).trace().re;
    Ok(Nats::finite(term1 - term2))
}

/// D_max(omega || tau) = ln || omega^{1/2} tau^+ omega^{1/2} ||_inf, with the
/// pseudo-inverse on the support of tau; infinite on support violation.
pub fn max_relative_entropy(omega: &CMat, tau: &CMat) -> Result<Nats> {
    if !support_contained(omega, tau)? {
        return Ok(Nats::INFINITY);
    }
    let w_half = power_on_support(omega, re(0.5))?;
    let t_pinv = power_on_support(tau, re(-1.0))?;
    let sandwich = &w_half * t_pinv * &w_half;
    let top = herm_spectral_norm(&sandwich)?;
    if top <= 0.0 {
        // omega = 0 on the support of tau; the ratio is degenerate
        return Err(Error::InvalidState(
            "max-relative entropy of a zero operator".into(),
        ));
    }
    Ok(Nats::finite(top.ln()))
}

/// Uhlmann fidelity F(rho, sigma) = || sqrt(rho) sqrt(sigma) ||_1^2, computed
/// as the squared sum of square roots of eig(sqrt(rho) sigma sqrt(rho)).
pub fn fidelity(rho: &CMat, sigma: &CMat) -> Result<f64> {
    let r_half = power_on_support(rho, re(0.5))?;
    let inner = &r_half * sigma * r_half;
    let eig = herm_eig(&inner)?;
    let root_sum: f64 = eig.values.iter().map(|&l| l.max(0.0).sqrt()).sum();
    Ok(root_sum * root_sum)
}

/// Delta = D(rho||sigma) - D(N(rho)||N(sigma)); nonnegative for a channel by
/// data processing. Requires supp(rho) inside supp(sigma).
pub fn rel_ent_difference(rho: &CMat, sigma: &CMat, n: &QuantumMap) -> Result<Nats> {
    if !support_contained(rho, sigma)? {
        return Err(Error::Support);
    }
    let d1 = relative_entropy(rho, sigma)?;
    let d2 = relative_entropy(&n.apply(rho)?, &n.apply(sigma)?)?;
    if d1.is_infinite() || d2.is_infinite() {
        return Err(Error::Support);
    }
    Ok(Nats::finite(d1.value() - d2.value()))
}

/// I(A;B|C) = H(AC) + H(BC) - H(ABC) - H(C) for a state on (A, B, C).
pub fn cmi(rho: &CMat, dims: &[usize; 3]) -> Result<Nats> {
    let h_ac = von_neumann(&partial_trace(rho, dims, &[1])?)?.value();
    let h_bc = von_neumann(&partial_trace(rho, dims, &[0])?)?.value();
    let h_c = von_neumann(&partial_trace(rho, dims, &[0, 1])?)?.value();
    let h_abc = von_neumann(rho)?.value();
    Ok(Nats::finite(h_ac + h_bc - h_abc - h_c))
}

/// I(B_1 : ... : B_l) = sum_i H(B_i) - H(B_1...B_l).
pub fn multipartite_info(rho: &CMat, dims: &[usize]) -> Result<Nats> {
    if dims.len() < 2 {
        return Err(Error::InvalidParameter(
            "multipartite information needs at least two subsystems".into(),
        ));
    }
    let mut total = -von_neumann(rho)?.value();
    for i in 0..dims.len() {
        let traced: Vec<usize> = (0..dims.len()).filter(|&j| j != i).collect();
        total += von_neumann(&partial_trace(rho, dims, &traced)?)?.value();
    }
    Ok(Nats::finite(total))
}

/// I(A_1 : ... : A_l | C) = sum_i H(A_i|C) - H(A_1...A_l|C); the last entry
/// of `dims` is the conditioning system C.
pub fn cond_multipartite_info(rho: &CMat, dims: &[usize]) -> Result<Nats> {
    let n = dims.len();
    if n < 3 {
        return Err(Error::InvalidParameter(
            "conditional multipartite information needs >= 2 parts plus C".into(),
        ));
    }
    let l = n - 1;
    let h_c = von_neumann(&partial_trace(rho, dims, &(0..l).collect::<Vec<_>>())?)?.value();
    let h_all = von_neumann(rho)?.value();
    let mut total = h_c - h_all - (l as f64) * h_c;
    for i in 0..l {
        let traced: Vec<usize> = (0..l).filter(|&j| j != i).collect();
        total += von_neumann(&partial_trace(rho, dims, &traced)?)?.value();
    }
    Ok(Nats::finite(total))
}

/// Schatten p-(quasi-)norm for any p > 0 via singular values.
fn schatten_any(m: &CMat, p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Schatten order must be positive, got {p}"
        )));
    }
    if p >= 1.0 {
        return numerics::schatten_norm(m, p);
    }
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().fold(0.0, |acc: f64, s| acc.max(*s));
    if top == 0.0 {
        return Ok(0.0);
    }
    let sum: f64 = sv.iter().map(|s| (s / top).powf(p)).sum();
    Ok(top * sum.powf(1.0 / p))
}

/// Renyi difference of relative entropies under a channel, evaluated through
/// an explicit isometric dilation of the channel:
///
/// (2 alpha / (alpha - 1)) ln || (N(rho)^{(1-a)/2a} N(sigma)^{(a-1)/2a} (x) I_E)
///                               V sigma^{(1-a)/2a} rho^{1/2} ||_{2a}
pub fn delta_tilde_with_dilation(
    rho: &CMat,
    sigma: &CMat,
    v: &crate::quantum::StinespringIsometry,
    alpha: &RenyiParam,
) -> Result<Nats> {
    if !support_contained(rho, sigma)? {
        return Err(Error::Support);
    }
    let a = alpha.alpha();
    let z = (1.0 - a) / (2.0 * a);

    let n_rho = v.marginal(rho)?;
    let n_sigma = v.marginal(sigma)?;

    let left = power_on_support(&n_rho, re(z))? * power_on_support(&n_sigma, re(-z))?;
    let right = power_on_support(sigma, re(z))? * power_on_support(rho, re(0.5))?;
    let x = kron(&left, &identity(v.env_dim())) * v.matrix() * right;

    let norm = schatten_any(&x, 2.0 * a)?;
    if norm <= 0.0 {
        return Err(Error::InvalidState(
            "vanishing operator inside the Renyi difference".into(),
        ));
    }
    Ok(Nats::finite((2.0 * a / (a - 1.0)) * norm.ln()))
}

/// [`delta_tilde_with_dilation`] using the canonical dilation built from the
/// channel's Kraus operators. The value does not depend on that choice.
pub fn delta_tilde(
    rho: &CMat,
    sigma: &CMat,
    n: &QuantumMap,
    alpha: &RenyiParam,
) -> Result<Nats> {
    delta_tilde_with_dilation(rho, sigma, &n.stinespring()?, alpha)
}

/// Lifts an operator acting on the (ascending) subsystem subset `subs` to the
/// full tensor product described by `dims`, tensoring identities elsewhere.
pub(crate) fn embed_on(x: &CMat, subs: &[usize], dims: &[usize]) -> Result<CMat> {
    let n = dims.len();
    for w in subs.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::InvalidParameter(
                "embedding subsystems must be strictly ascending".into(),
            ));
        }
    }
    if subs.iter().any(|&s| s >= n) {
        return Err(Error::Shape("embedding subsystem out of range".into()));
    }
    let sub_dim: usize = subs.iter().map(|&s| dims[s]).product();
    if x.nrows() != sub_dim || x.ncols() != sub_dim {
        return Err(Error::Shape(format!(
            "operator dim {} does not match subsystems dim {}",
            x.nrows(),
            sub_dim
        )));
    }
    let rest: Vec<usize> = (0..n).filter(|i| !subs.contains(i)).collect();
    let rest_dim: usize = rest.iter().map(|&i| dims[i]).product();
    let big = kron(x, &identity(rest_dim));
    let cur: Vec<usize> = subs.iter().chain(rest.iter()).copied().collect();
    let cur_dims: Vec<usize> = cur.iter().map(|&i| dims[i]).collect();
    let perm: Vec<usize> = (0..n)
        .map(|k| cur.iter().position(|&c| c == k).unwrap())
        .collect();
    permute_systems(&big, &cur_dims, &perm)
}

/// Renyi conditional mutual information of a state on (A, B, C):
///
/// (2/a') ln || rho_BC^{-a'/2} rho_C^{a'/2} rho_AC^{-a'/2} rho^{1/2} ||_{2a}
///
/// with marginals lifted by identity factors, a' = (alpha-1)/alpha.
pub fn renyi_cmi(rho: &CMat, dims: &[usize; 3], alpha: &RenyiParam) -> Result<Nats> {
    let ap = alpha.alpha_prime();
    let zm = re(-ap / 2.0);
    let zp = re(ap / 2.0);

    let bc = embed_on(
        &power_on_support(&partial_trace(rho, dims, &[0])?, zm)?,
        &[1, 2],
        dims,
    )?;
    let c = embed_on(
        &power_on_support(&partial_trace(rho, dims, &[0, 1])?, zp)?,
        &[2],
        dims,
    )?;
    let ac = embed_on(
        &power_on_support(&partial_trace(rho, dims, &[1])?, zm)?,
        &[0, 2],
        dims,
    )?;
    let p = bc * c * ac * power_on_support(rho, re(0.5))?;
    let norm = schatten_any(&p, 2.0 * alpha.alpha())?;
    if norm <= 0.0 {
        return Err(Error::InvalidState(
            "vanishing operator inside the Renyi conditional information".into(),
        ));
    }
    Ok(Nats::finite((2.0 / ap) * norm.ln()))
}

/// Multipartite generalization on (A_1, ..., A_l, C):
///
/// (2/a') ln || rho^{1/2} rho_{A_l C}^{-a'/2} rho_C^{a'/2}
///              rho_{A_{l-1} C}^{-a'/2} ... rho_{A_1 C}^{-a'/2} ||_{2a}
pub fn renyi_cond_multipartite(
    rho: &CMat,
    dims: &[usize],
    alpha: &RenyiParam,
) -> Result<Nats> {
    let n = dims.len();
    if n < 3 {
        return Err(Error::InvalidParameter(
            "Renyi conditional multipartite information needs >= 2 parts plus C".into(),
        ));
    }
    let l = n - 1;
    let ap = alpha.alpha_prime();
    let zm = re(-ap / 2.0);
    let zp = re(ap / 2.0);

    let c_power = embed_on(
        &power_on_support(
            &partial_trace(rho, dims, &(0..l).collect::<Vec<_>>())?,
            zp,
        )?,
        &[l],
        dims,
    )?;

    let mut p = power_on_support(rho, re(0.5))?;
    for i in (0..l).rev() {
        let traced: Vec<usize> = (0..l).filter(|&j| j != i).collect();
        let marg = embed_on(
            &power_on_support(&partial_trace(rho, dims, &traced)?, zm)?,
            &[i, l],
            dims,
        )?;
        p = p * marg;
        if i > 0 {
            p = p * &c_power;
        }
    }
    let norm = schatten_any(&p, 2.0 * alpha.alpha())?;
    if norm <= 0.0 {
        return Err(Error::InvalidState(
            "vanishing operator inside the Renyi conditional information".into(),
        ));
    }
    Ok(Nats::finite((2.0 / ap) * norm.ln()))
}

/// Two-point Richardson extrapolation of the alpha -> 1 limit from symmetric
/// averages S(h) = (f(1-h) + f(1+h)) / 2 at step sizes h1 > h2: the averages
/// have even error expansions in h, so the h^2 terms can be cancelled.
pub fn richardson_alpha_limit(
    mut eval: impl FnMut(f64) -> Result<f64>,
    h1: f64,
    h2: f64,
) -> Result<f64> {
    if !(h1 > h2 && h2 > 0.0 && h1 < 1.0) {
        return Err(Error::InvalidParameter(
            "Richardson steps need 0 < h2 < h1 < 1".into(),
        ));
    }
    let s1 = 0.5 * (eval(1.0 - h1)? + eval(1.0 + h1)?);
    let s2 = 0.5 * (eval(1.0 - h2)? + eval(1.0 + h2)?);
    let r = h2 * h2 / (h1 * h1);
    Ok((s2 - r * s1) / (1.0 - r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{im, max_abs, power_on_support_eig};
    use crate::quantum::{
        random_channel, random_density_matrix, QuantumMap,
    };
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn diag(entries: &[f64]) -> CMat {
        let n = entries.len();
        CMat::from_fn(n, n, |r, c| if r == c { re(entries[r]) } else { re(0.0) })
    }

    fn correlated_qubit() -> CMat {
        CMat::from_row_slice(2, 2, &[re(0.5), re(0.4), re(0.4), re(0.5)])
    }

    fn dephasing() -> QuantumMap {
        let mut k0 = CMat::zeros(2, 2);
        k0[(0, 0)] = re(1.0);
        let mut k1 = CMat::zeros(2, 2);
        k1[(1, 1)] = re(1.0);
        QuantumMap::from_kraus(vec![k0, k1]).unwrap()
    }

    fn ghz() -> CMat {
        let mut v = CMat::zeros(8, 1);
        v[(0, 0)] = re(std::f64::consts::FRAC_1_SQRT_2);
        v[(7, 0)] = re(std::f64::consts::FRAC_1_SQRT_2);
        &v * v.adjoint()
    }

    #[test]
    fn von_neumann_examples() {
        assert_abs_diff_eq!(
            von_neumann(&diag(&[0.5, 0.5])).unwrap().value(),
            std::f64::consts::LN_2,
            epsilon = 1e-14
        );
        let pure = random_density_matrix(3, 1, &mut rng(1));
        assert_abs_diff_eq!(von_neumann(&pure).unwrap().value(), 0.0, epsilon = 1e-10);
        // eigenvalues of the correlated qubit are 0.9 and 0.1
        assert_abs_diff_eq!(
            von_neumann(&correlated_qubit()).unwrap().value(),
            0.325082973391448,
            epsilon = 1e-12
        );
    }

    #[test]
    fn relative_entropy_examples() {
        assert_abs_diff_eq!(
            relative_entropy(&diag(&[0.5, 0.5]), &diag(&[0.75, 0.25]))
                .unwrap()
                .value(),
            0.143841036225890,
            epsilon = 1e-12
        );
        let rho = random_density_matrix(3, 3, &mut rng(2));
        assert_abs_diff_eq!(
            relative_entropy(&rho, &rho).unwrap().value(),
            0.0,
            epsilon = 1e-10
        );
    }

    #[test]
    fn relative_entropy_support_violation_is_infinite() {
        let d = relative_entropy(&diag(&[1.0, 0.0]), &diag(&[0.0, 1.0])).unwrap();
        assert!(d.is_infinite());
        let partial = relative_entropy(&diag(&[0.5, 0.5]), &diag(&[1.0, 0.0])).unwrap();
        assert!(partial.is_infinite());
    }

    #[test]
    fn relative_entropy_scaling_shift() {
        let mut r = rng(3);
        let rho = random_density_matrix(3, 3, &mut r);
        let tau = random_density_matrix(3, 3, &mut r);
        let c = 2.5;
        let d1 = relative_entropy(&rho, &tau).unwrap().value();
        let d2 = relative_entropy(&rho, &tau.map(|z| z * re(c))).unwrap().value();
        assert_abs_diff_eq!(d2, d1 - c.ln(), epsilon = 1e-10);
    }

    #[test]
    fn max_relative_entropy_examples() {
        assert_abs_diff_eq!(
            max_relative_entropy(&diag(&[0.5, 0.5]), &diag(&[0.25, 0.75]))
                .unwrap()
                .value(),
            std::f64::consts::LN_2,
            epsilon = 1e-12
        );
        assert!(max_relative_entropy(&diag(&[1.0, 0.0]), &diag(&[0.0, 1.0]))
            .unwrap()
            .is_infinite());
        // D_max dominates D
        let mut r = rng(4);
        let rho = random_density_matrix(3, 2, &mut r);
        let tau = random_density_matrix(3, 3, &mut r);
        let d = relative_entropy(&rho, &tau).unwrap().value();
        let dmax = max_relative_entropy(&rho, &tau).unwrap().value();
        assert!(dmax >= d - 1e-10);
    }

    #[test]
    fn fidelity_examples() {
        let rho = correlated_qubit();
        assert_abs_diff_eq!(fidelity(&rho, &rho).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            fidelity(&diag(&[1.0, 0.0]), &diag(&[0.0, 1.0])).unwrap(),
            0.0,
            epsilon = 1e-14
        );
        // worked dephasing example: F = ((sqrt(.9)+sqrt(.1))^2)/2 = 0.8
        assert_abs_diff_eq!(
            fidelity(&rho, &diag(&[0.5, 0.5])).unwrap(),
            0.8,
            epsilon = 1e-12
        );
        // commuting case reduces to the squared Bhattacharyya sum
        let p = diag(&[0.3, 0.7]);
        let q = diag(&[0.6, 0.4]);
        let expected = ((0.3f64 * 0.6).sqrt() + (0.7f64 * 0.4).sqrt()).powi(2);
        assert_abs_diff_eq!(fidelity(&p, &q).unwrap(), expected, epsilon = 1e-12);
    }

    #[test]
    fn fidelity_is_symmetric() {
        let mut r = rng(5);
        let a = random_density_matrix(3, 2, &mut r);
        let b = random_density_matrix(3, 3, &mut r);
        // square roots amplify eigenvalue noise for rank-deficient inputs,
        // so symmetry holds at the 1e-8 level rather than 1e-10
        assert_abs_diff_eq!(
            fidelity(&a, &b).unwrap(),
            fidelity(&b, &a).unwrap(),
            epsilon = 1e-8
        );
    }

    #[test]
    fn rel_ent_difference_dephasing_example() {
        let delta = rel_ent_difference(&correlated_qubit(), &diag(&[0.5, 0.5]), &dephasing())
            .unwrap()
            .value();
        assert_abs_diff_eq!(delta, 0.368064207168497, epsilon = 1e-12);
    }

    #[test]
    fn rel_ent_difference_rejects_support_violation() {
        let err = rel_ent_difference(&diag(&[0.5, 0.5]), &diag(&[1.0, 0.0]), &dephasing());
        assert!(matches!(err, Err(Error::Support)));
    }

    #[test]
    fn rel_ent_difference_is_nonnegative() {
        let mut r = rng(6);
        for _ in 0..20 {
            let rho = random_density_matrix(3, 3, &mut r);
            let sigma = random_density_matrix(3, 3, &mut r);
            let n = random_channel(3, 2, 2, &mut r).unwrap();
            let delta = rel_ent_difference(&rho, &sigma, &n).unwrap().value();
            assert!(delta >= -1e-9, "monotonicity violated: {delta}");
        }
    }

    #[test]
    fn cmi_examples() {
        assert_abs_diff_eq!(
            cmi(&ghz(), &[2, 2, 2]).unwrap().value(),
            std::f64::consts::LN_2,
            epsilon = 1e-10
        );
        let mut r = rng(7);
        let a = random_density_matrix(2, 2, &mut r);
        let bc = random_density_matrix(4, 4, &mut r);
        let prod = kron(&a, &bc);
        assert_abs_diff_eq!(cmi(&prod, &[2, 2, 2]).unwrap().value(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn cmi_nonnegative_on_random_states() {
        let mut r = rng(8);
        for _ in 0..10 {
            let rho = random_density_matrix(8, 8, &mut r);
            assert!(cmi(&rho, &[2, 2, 2]).unwrap().value() >= -1e-9);
        }
    }

    #[test]
    fn multipartite_info_reduces_to_mutual_information() {
        let mut r = rng(9);
        let rho = random_density_matrix(4, 4, &mut r);
        let i2 = multipartite_info(&rho, &[2, 2]).unwrap().value();
        let h_a = von_neumann(&partial_trace(&rho, &[2, 2], &[1]).unwrap())
            .unwrap()
            .value();
        let h_b = von_neumann(&partial_trace(&rho, &[2, 2], &[0]).unwrap())
            .unwrap()
            .value();
        let h_ab = von_neumann(&rho).unwrap().value();
        assert_abs_diff_eq!(i2, h_a + h_b - h_ab, epsilon = 1e-12);

        let prod = kron(&random_density_matrix(2, 2, &mut r), &random_density_matrix(2, 2, &mut r));
        assert_abs_diff_eq!(
            multipartite_info(&kron(&prod, &random_density_matrix(2, 2, &mut r)), &[2, 2, 2])
                .unwrap()
                .value(),
            0.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn cond_multipartite_matches_cmi_for_two_parts() {
        let mut r = rng(10);
        let rho = random_density_matrix(8, 8, &mut r);
        assert_abs_diff_eq!(
            cond_multipartite_info(&rho, &[2, 2, 2]).unwrap().value(),
            cmi(&rho, &[2, 2, 2]).unwrap().value(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn embed_on_matches_manual_kron() {
        let mut r = rng(11);
        let x = random_density_matrix(2, 2, &mut r);
        let lifted = embed_on(&x, &[1], &[2, 2, 3]).unwrap();
        let manual = kron(&kron(&identity(2), &x), &identity(3));
        assert!(max_abs(&(lifted - manual)) <= 1e-14);

        // non-contiguous pair (A, C) inside (A, B, C)
        let y = random_density_matrix(6, 6, &mut r);
        let lifted = embed_on(&y, &[0, 2], &[2, 2, 3]).unwrap();
        // check by tracing back out
        let back = partial_trace(&lifted, &[2, 2, 3], &[1]).unwrap();
        assert!(max_abs(&(back - y.map(|z| z * re(2.0)))) <= 1e-12);
        let tr = lifted.trace().re;
        assert_abs_diff_eq!(tr, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn delta_tilde_half_on_worked_example() {
        // at alpha = 1/2 the value is -ln F(rho, recovered); for the
        // dephasing example the Petz recovery composed with the channel is
        // the dephasing itself, so the reference value is -ln 0.8
        let alpha = RenyiParam::new(0.5).unwrap();
        let val = delta_tilde(&correlated_qubit(), &diag(&[0.5, 0.5]), &dephasing(), &alpha)
            .unwrap()
            .value();
        assert_abs_diff_eq!(val, -(0.8f64.ln()), epsilon = 1e-10);
    }

    #[test]
    fn delta_tilde_alpha_to_one_recovers_delta() {
        let rho = correlated_qubit();
        let sigma = diag(&[0.5, 0.5]);
        let n = dephasing();
        let delta = rel_ent_difference(&rho, &sigma, &n).unwrap().value();
        let lim = richardson_alpha_limit(
            |a| {
                delta_tilde(&rho, &sigma, &n, &RenyiParam::new(a).unwrap()).map(Nats::value)
            },
            0.01,
            0.001,
        )
        .unwrap();
        assert_abs_diff_eq!(lim, delta, epsilon = 1e-6);
    }

    #[test]
    fn delta_tilde_dilation_invariance() {
        let mut r = rng(12);
        let rho = random_density_matrix(2, 2, &mut r);
        let sigma = random_density_matrix(2, 2, &mut r);
        let n = random_channel(2, 2, 2, &mut r).unwrap();
        let v = n.stinespring().unwrap();
        let w = crate::quantum::random_isometry(v.env_dim(), v.env_dim() + 2, &mut r).unwrap();
        let v2 = v.extend_environment(&w).unwrap();
        for a in [0.6, 0.9, 1.3, 2.0] {
            let alpha = RenyiParam::new(a).unwrap();
            let d1 = delta_tilde_with_dilation(&rho, &sigma, &v, &alpha)
                .unwrap()
                .value();
            let d2 = delta_tilde_with_dilation(&rho, &sigma, &v2, &alpha)
                .unwrap()
                .value();
            assert_abs_diff_eq!(d1, d2, epsilon = 1e-9);
        }
    }

    #[test]
    fn delta_tilde_nonnegative_above_half() {
        let mut r = rng(13);
        for _ in 0..5 {
            let rho = random_density_matrix(2, 2, &mut r);
            let sigma = random_density_matrix(2, 2, &mut r);
            let n = random_channel(2, 2, 2, &mut r).unwrap();
            for a in [0.6, 0.8, 1.2, 2.0] {
                let alpha = RenyiParam::new(a).unwrap();
                let v = delta_tilde(&rho, &sigma, &n, &alpha).unwrap().value();
                assert!(v >= -1e-9, "alpha {a}: {v}");
            }
        }
    }

    #[test]
    fn renyi_cmi_alpha_to_one_recovers_cmi() {
        let mut r = rng(14);
        let rho = random_density_matrix(8, 8, &mut r);
        let target = cmi(&rho, &[2, 2, 2]).unwrap().value();
        let lim = richardson_alpha_limit(
            |a| {
                renyi_cmi(&rho, &[2, 2, 2], &RenyiParam::new(a).unwrap()).map(Nats::value)
            },
            0.01,
            0.001,
        )
        .unwrap();
        assert_abs_diff_eq!(lim, target, epsilon = 1e-6);
    }

    #[test]
    fn renyi_cmi_matches_delta_tilde_for_cmi_instance() {
        // Delta-tilde with rho_ABC, sigma = rho_AC (x) I_B and N = Tr_A
        // reproduces the Renyi conditional mutual information
        let mut r = rng(15);
        let rho = random_density_matrix(8, 8, &mut r);
        let dims = [2usize, 2, 2];
        let rho_ac = partial_trace(&rho, &dims, &[1]).unwrap();
        let sigma = embed_on(&rho_ac, &[0, 2], &dims).unwrap();
        let n = QuantumMap::trace_out_channel(&dims, &[0]).unwrap();
        for a in [0.7, 1.5] {
            let alpha = RenyiParam::new(a).unwrap();
            let lhs = delta_tilde(&rho, &sigma, &n, &alpha).unwrap().value();
            let rhs = renyi_cmi(&rho, &dims, &alpha).unwrap().value();
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-9);
        }
    }

    #[test]
    fn renyi_cond_multipartite_collapses_to_renyi_cmi() {
        // for two parts the operator product matches the conditional mutual
        // information with the roles (A, B) = (A_2, A_1)
        let mut r = rng(16);
        let rho = random_density_matrix(8, 8, &mut r);
        let dims = [2usize, 2, 2];
        let swapped = permute_systems(&rho, &dims, &[1, 0, 2]).unwrap();
        for a in [0.7, 1.5] {
            let alpha = RenyiParam::new(a).unwrap();
            let lhs = renyi_cond_multipartite(&rho, &dims, &alpha).unwrap().value();
            let rhs = renyi_cmi(&swapped, &dims, &alpha).unwrap().value();
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-9);
        }
    }

    #[test]
    fn renyi_cond_multipartite_alpha_to_one_limit() {
        let mut r = rng(17);
        let rho = random_density_matrix(8, 8, &mut r);
        let dims = [2usize, 2, 2];
        let target = cond_multipartite_info(&rho, &dims).unwrap().value();
        let lim = richardson_alpha_limit(
            |a| {
                renyi_cond_multipartite(&rho, &dims, &RenyiParam::new(a).unwrap())
                    .map(Nats::value)
            },
            0.01,
            0.001,
        )
        .unwrap();
        assert_abs_diff_eq!(lim, target, epsilon = 1e-6);
    }

    #[test]
    fn renyi_param_rejects_bad_orders() {
        assert!(RenyiParam::new(1.0).is_err());
        assert!(RenyiParam::new(0.0).is_err());
        assert!(RenyiParam::new(-2.0).is_err());
        let p = RenyiParam::new(2.0).unwrap();
        assert_abs_diff_eq!(p.alpha_prime(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn nats_display() {
        assert_eq!(Nats::INFINITY.to_string(), "inf");
        assert!(Nats::finite(1.5).to_string().starts_with("1.5"));
    }

    #[test]
    #[should_panic]
    fn nats_rejects_nan() {
        let _ = Nats::finite(f64::NAN);
    }

    // silence unused import warning for im in non-test builds is not needed;
    // the rotation parameter enters through the recovery module instead
    #[test]
    fn imaginary_power_is_partial_isometry_here_too() {
        let mut r = rng(18);
        let rho = random_density_matrix(3, 3, &mut r);
        let u = power_on_support(&rho, im(1.3)).unwrap();
        assert!(max_abs(&(u.adjoint() * &u - identity(3))) <= 1e-10);
    }

    #[test]
    fn power_via_eig_matches_direct() {
        let mut r = rng(19);
        let rho = random_density_matrix(3, 2, &mut r);
        let eig = herm_eig(&rho).unwrap();
        let a = power_on_support(&rho, re(0.5)).unwrap();
        let b = power_on_support_eig(&eig, re(0.5)).unwrap();
        assert!(max_abs(&(a - b)) <= 1e-14);
    }
}
