//! The verification engine: witness search over the rotation parameter t,
//! lower and upper bound checks, instance builders for each entropy-inequality
//! corollary, the sequential-recovery check, Renyi limit checks, and
//! functoriality identities.

use rand::Rng;
use serde::Serialize;

use crate::entropy::{
    self, cmi, cond_multipartite_info, fidelity, max_relative_entropy, rel_ent_difference,
    richardson_alpha_limit, support_contained, Nats, RenyiParam,
};
use crate::error::{Error, Result};
use crate::numerics::{
    herm_eig, identity, im, kron, max_abs, partial_trace, permute_systems, power_on_support,
    power_on_support_eig, rank_cutoff, re, trace_norm, CMat, EigenSystem,
};
use crate::quantum::{
    cq_state, measurement_channel, random_channel, random_density_matrix, random_ensemble,
    random_isometry, random_measurement, random_simplex, QuantumMap, RankOneMeasurement,
};
use crate::recovery::{eb_map, rotated_petz, rotation, sequential_recovery};

/// Absolute verdict tolerance in nats; dominated by eigendecomposition error
/// through roughly ten chained matrix functions.
pub const TOL_VERDICT: f64 = 1e-7;
/// Tolerance for the alpha -> 1 Richardson-extrapolated limit.
pub const LIMIT_TOL_ALPHA1: f64 = 1e-4;
/// Tolerance for the alpha -> infinity comparison at alpha = 200.
pub const LIMIT_TOL_DMAX: f64 = 1e-2;
/// Order used as the alpha -> infinity probe.
pub const ALPHA_INFINITY_PROBE: f64 = 200.0;
/// Cross-check tolerance for instance-construction audits.
pub const AUDIT_TOL: f64 = 1e-9;

/// Search window and refinement budget for the rotation parameter.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TSearchConfig {
    /// Symmetric window bound: t ranges over [-t_max, t_max].
    pub t_max: f64,
    /// Coarse grid size; odd so t = 0 is always on the grid.
    pub coarse_points: usize,
    /// Golden-section iterations around the best grid point.
    pub refine_iters: usize,
}

impl Default for TSearchConfig {
    fn default() -> Self {
        Self {
            t_max: 10.0,
            coarse_points: 401,
            refine_iters: 40,
        }
    }
}

impl TSearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "t window bound must be positive, got {}",
                self.t_max
            )));
        }
        if self.coarse_points < 3 || self.coarse_points % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "coarse grid needs an odd point count >= 3, got {}",
                self.coarse_points
            )));
        }
        Ok(())
    }

    /// One escalation step: a 4x denser grid and a longer refinement.
    pub fn escalated(&self) -> Self {
        Self {
            t_max: self.t_max,
            coarse_points: self.coarse_points * 4 - 3,
            refine_iters: self.refine_iters + 20,
        }
    }
}

/// Outcome of a one-dimensional witness search.
#[derive(Clone, Debug)]
pub struct TSearch {
    pub t: f64,
    pub value: f64,
    /// Coarse-grid trace (t, objective), sorted by t.
    pub trace: Vec<(f64, f64)>,
}

/// Maximizes `objective` on [-t_max, t_max]: full coarse grid, tie-break
/// towards the smallest |t|, then golden-section refinement in the bracket
/// around the best grid point. Deterministic.
pub fn t_search(
    mut objective: impl FnMut(f64) -> Result<f64>,
    cfg: &TSearchConfig,
) -> Result<TSearch> {
    cfg.validate()?;
    let n = cfg.coarse_points;
    let step = 2.0 * cfg.t_max / (n - 1) as f64;
    let mut trace = Vec::with_capacity(n);
    let mut best_idx = 0usize;
    for i in 0..n {
        let t = -cfg.t_max + step * i as f64;
        let v = objective(t)?;
        if !v.is_finite() {
            return Err(Error::Objective { t });
        }
        trace.push((t, v));
        let (bt, bv) = trace[best_idx];
        if v > bv || (v == bv && t.abs() < bt.abs()) {
            best_idx = i;
        }
    }

    let (mut best_t, mut best_v) = trace[best_idx];
    let a0 = trace[best_idx.saturating_sub(1)].0;
    let b0 = trace[(best_idx + 1).min(n - 1)].0;
    if b0 > a0 {
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (a0, b0);
        let mut c = b - phi * (b - a);
        let mut d = a + phi * (b - a);
        let mut fc = objective(c)?;
        let mut fd = objective(d)?;
        for _ in 0..cfg.refine_iters {
            if !(fc.is_finite() && fd.is_finite()) {
                return Err(Error::Objective { t: if fc.is_finite() { d } else { c } });
            }
            if fc >= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - phi * (b - a);
                fc = objective(c)?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + phi * (b - a);
                fd = objective(d)?;
            }
        }
        for (t, v) in [(c, fc), (d, fd)] {
            if v > best_v {
                best_t = t;
                best_v = v;
            }
        }
    }

    Ok(TSearch {
        t: best_t,
        value: best_v,
        trace,
    })
}

/// Corollary / scenario identifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CaseTag {
    Ssa,
    Concavity,
    JointConvexity,
    Discord,
    Holevo,
    Multipartite,
    Qec,
    Sequential,
}

impl CaseTag {
    pub const ALL: [CaseTag; 8] = [
        CaseTag::Ssa,
        CaseTag::Concavity,
        CaseTag::JointConvexity,
        CaseTag::Discord,
        CaseTag::Holevo,
        CaseTag::Multipartite,
        CaseTag::Qec,
        CaseTag::Sequential,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseTag::Ssa => "ssa",
            CaseTag::Concavity => "concavity",
            CaseTag::JointConvexity => "joint_convexity",
            CaseTag::Discord => "discord",
            CaseTag::Holevo => "holevo",
            CaseTag::Multipartite => "multipartite",
            CaseTag::Qec => "qec",
            CaseTag::Sequential => "sequential",
        }
    }
}

impl std::fmt::Display for CaseTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for CaseTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CaseTag::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown case tag {s:?}")))
    }
}

/// Knobs for the per-case instance builders.
#[derive(Clone, Debug)]
pub struct CaseParams {
    /// Subsystem dimensions; the meaning is case-specific (see
    /// [`build_instance`]).
    pub dims: Vec<usize>,
    /// Ensemble size for the flagged cases.
    pub ensemble_size: usize,
    /// Rank of the sampled state (or codespace); full rank when None.
    pub rank: Option<usize>,
}

impl CaseParams {
    pub fn defaults_for(case: CaseTag) -> Self {
        let dims = match case {
            CaseTag::Ssa | CaseTag::Sequential => vec![2, 2, 2],
            CaseTag::Concavity | CaseTag::Discord => vec![2, 2],
            CaseTag::JointConvexity | CaseTag::Holevo => vec![2],
            CaseTag::Multipartite => vec![2, 2, 2, 2],
            CaseTag::Qec => vec![4],
        };
        let rank = match case {
            CaseTag::Qec => Some(2),
            _ => None,
        };
        Self {
            dims,
            ensemble_size: 2,
            rank,
        }
    }
}

/// Extra structure kept from instance construction so the corollary
/// cross-checks can audit the generic verdict.
#[derive(Clone, Debug)]
pub enum CaseAux {
    None,
    /// Audit Delta against the conditional mutual information.
    Ssa,
    /// Flagged instance: classical flag at `flag_pos` inside the state's
    /// subsystem list, carrying weighted members for the fidelity split.
    Flagged {
        flag_pos: usize,
        probs: Vec<f64>,
        members: Vec<CMat>,
    },
    /// Measured-subsystem instance for the discord identity.
    Discord {
        rho_a: CMat,
        measurement: RankOneMeasurement,
        d_b: usize,
    },
}

/// A triple (rho, sigma, N) with bookkeeping for reports and audits.
#[derive(Clone, Debug)]
pub struct Instance {
    pub case: String,
    pub interpretation: String,
    pub rho: CMat,
    pub sigma: CMat,
    pub channel: QuantumMap,
    /// Subsystem dimensions of the state's space.
    pub dims: Vec<usize>,
    pub aux: CaseAux,
}

impl Instance {
    pub fn validate(&self) -> Result<()> {
        let total: usize = self.dims.iter().product();
        if self.rho.nrows() != total || self.sigma.nrows() != total {
            return Err(Error::Shape(
                "instance operators do not match the subsystem dims".into(),
            ));
        }
        if self.channel.in_dim() != total {
            return Err(Error::Shape(
                "channel input does not match the state space".into(),
            ));
        }
        if !self.channel.is_trace_preserving() {
            return Err(Error::InvalidChannel(
                "instance channel must be trace preserving".into(),
            ));
        }
        if !support_contained(&self.rho, &self.sigma)? {
            return Err(Error::Support);
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Result of one bound check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub case: String,
    pub seed: u64,
    pub dims: Vec<usize>,
    pub delta: Nats,
    pub bound: Nats,
    pub witness_t: f64,
    /// Delta - bound for the lower check, bound - Delta for the upper check;
    /// pass requires deficit >= -tol_verdict.
    pub deficit: f64,
    pub verdict: Verdict,
    #[serde(rename = "t_trace")]
    pub samples: Vec<(f64, f64)>,
}

impl CheckReport {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Caches the eigensystems needed to evaluate the rotated Petz recovery of
/// N(rho) at many values of t.
pub struct RecoveryObjective {
    s_eig: EigenSystem,
    ns_eig: EigenSystem,
    n_rho: CMat,
    kraus: Vec<CMat>,
}

impl RecoveryObjective {
    pub fn new(inst: &Instance) -> Result<Self> {
        Ok(Self {
            s_eig: herm_eig(&inst.sigma)?,
            ns_eig: herm_eig(&inst.channel.apply(&inst.sigma)?)?,
            n_rho: inst.channel.apply(&inst.rho)?,
            kraus: inst.channel.kraus().to_vec(),
        })
    }

    /// rotated_petz(sigma, N, t) applied to N(rho).
    pub fn recovered(&self, t: f64) -> Result<CMat> {
        // right factor of the recovery Kraus operators: N(sigma)^{-1/2-it}
        let right = power_on_support_eig(&self.ns_eig, re(-0.5) - im(t))?;
        let mid = &right * &self.n_rho * right.adjoint();
        let mut back = CMat::zeros(self.kraus[0].ncols(), self.kraus[0].ncols());
        for k in &self.kraus {
            back += k.adjoint() * &mid * k;
        }
        let left = power_on_support_eig(&self.s_eig, re(0.5) + im(t))?;
        Ok(&left * back * left.adjoint())
    }
}

fn fidelity_with_sqrt(sqrt_rho: &CMat, tau: &CMat) -> Result<f64> {
    let inner = sqrt_rho * tau * sqrt_rho;
    let eig = herm_eig(&inner)?;
    let s: f64 = eig.values.iter().map(|&l| l.max(0.0).sqrt()).sum();
    Ok(s * s)
}

/// Lower bound of the recoverability theorem: searches for a witness t with
/// -ln F(rho, R^{P,t}(N(rho))) <= Delta + tol. A failed first search is
/// retried once with an escalated grid; a still-unwitnessed instance is
/// verdict "inconclusive" (the theorem makes "fail" unreachable).
pub fn check_lower(inst: &Instance, cfg: &TSearchConfig) -> Result<CheckReport> {
    let delta = rel_ent_difference(&inst.rho, &inst.sigma, &inst.channel)?;
    let obj = RecoveryObjective::new(inst)?;
    let sqrt_rho = power_on_support(&inst.rho, re(0.5))?;
    let eval = |t: f64| fidelity_with_sqrt(&sqrt_rho, &obj.recovered(t)?);

    let mut search = t_search(eval, cfg)?;
    let bound_of = |v: f64| -> Nats {
        if v > 0.0 {
            Nats::finite(-v.ln())
        } else {
            Nats::INFINITY
        }
    };
    let deficit_of = |b: Nats| -> f64 {
        if b.is_infinite() {
            f64::NEG_INFINITY
        } else {
            delta.value() - b.value()
        }
    };

    let mut bound = bound_of(search.value);
    if deficit_of(bound) < -TOL_VERDICT {
        let retry = t_search(eval, &cfg.escalated())?;
        if retry.value > search.value {
            search = retry;
            bound = bound_of(search.value);
        }
    }
    let deficit = deficit_of(bound);
    let verdict = if deficit >= -TOL_VERDICT {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };
    Ok(CheckReport {
        case: inst.case.clone(),
        seed: 0,
        dims: inst.dims.clone(),
        delta,
        bound,
        witness_t: search.t,
        deficit,
        verdict,
        samples: search.trace,
    })
}

/// Upper bound for positive definite instances built from a unitary
/// dilation: a witness t with Delta <= D_max(rho, R^{P,t}(N(rho))) + tol.
pub fn check_upper(inst: &Instance, cfg: &TSearchConfig) -> Result<CheckReport> {
    for (name, op) in [
        ("rho", &inst.rho),
        ("sigma", &inst.sigma),
        ("N(rho)", &inst.channel.apply(&inst.rho)?),
        ("N(sigma)", &inst.channel.apply(&inst.sigma)?),
    ] {
        let eig = herm_eig(op)?;
        if eig.values[0] <= rank_cutoff(eig.dim(), eig.lambda_max_abs()) {
            return Err(Error::InvalidInstance(format!(
                "{name} is not positive definite"
            )));
        }
    }
    let delta = rel_ent_difference(&inst.rho, &inst.sigma, &inst.channel)?;
    let obj = RecoveryObjective::new(inst)?;
    let eval = |t: f64| -> Result<f64> {
        let d = max_relative_entropy(&inst.rho, &obj.recovered(t)?)?;
        if d.is_infinite() {
            return Err(Error::Objective { t });
        }
        Ok(d.value())
    };

    let mut search = t_search(eval, cfg)?;
    if search.value - delta.value() < -TOL_VERDICT {
        let retry = t_search(eval, &cfg.escalated())?;
        if retry.value > search.value {
            search = retry;
        }
    }
    let bound = Nats::finite(search.value);
    let deficit = bound.value() - delta.value();
    let verdict = if deficit >= -TOL_VERDICT {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };
    Ok(CheckReport {
        case: inst.case.clone(),
        seed: 0,
        dims: inst.dims.clone(),
        delta,
        bound,
        witness_t: search.t,
        deficit,
        verdict,
        samples: search.trace,
    })
}

/// A generic random triple satisfying the support condition: full-rank
/// sigma, a state of the given rank, and a random channel.
pub fn random_instance<R: Rng>(
    in_dim: usize,
    out_dim: usize,
    env_dim: usize,
    rho_rank: usize,
    rng: &mut R,
) -> Result<Instance> {
    let rho = random_density_matrix(in_dim, rho_rank, rng);
    let sigma = random_density_matrix(in_dim, in_dim, rng);
    let channel = random_channel(in_dim, out_dim, env_dim, rng)?;
    let inst = Instance {
        case: "random".into(),
        interpretation: "Delta = D(rho||sigma) - D(N(rho)||N(sigma))".into(),
        rho,
        sigma,
        channel,
        dims: vec![in_dim],
        aux: CaseAux::None,
    };
    inst.validate()?;
    Ok(inst)
}

/// Positive definite instance with a random unitary dilation: the input
/// space factors as listed in `dims`, the channel keeps the first factor and
/// traces the rest after a Haar unitary. Resamples positivity up to 100
/// times.
pub fn random_unitary_dilation_instance<R: Rng>(
    dims: &[usize],
    rng: &mut R,
) -> Result<Instance> {
    if dims.len() < 2 {
        return Err(Error::InvalidParameter(
            "a unitary dilation instance needs at least two factors".into(),
        ));
    }
    let total: usize = dims.iter().product();
    let out = dims[0];
    let env = total / out;
    for _ in 0..100 {
        let channel = random_channel(total, out, env, rng)?;
        let rho = random_density_matrix(total, total, rng);
        let sigma = random_density_matrix(total, total, rng);
        // the threshold keeps the instances well conditioned: the finite-alpha
        // probe of the D_max limit converges like (spread of ln-eigenvalues)/alpha,
        // so near-singular draws would need a much larger alpha
        let pd = |m: &CMat| -> Result<bool> {
            let eig = herm_eig(m)?;
            Ok(eig.values[0] > 1e-2 * eig.lambda_max_abs())
        };
        if pd(&rho)?
            && pd(&sigma)?
            && pd(&channel.apply(&rho)?)?
            && pd(&channel.apply(&sigma)?)?
        {
            let inst = Instance {
                case: "unitary_dilation".into(),
                interpretation: "Delta = D(rho||sigma) - D(N(rho)||N(sigma))".into(),
                rho,
                sigma,
                channel,
                dims: dims.to_vec(),
                aux: CaseAux::None,
            };
            inst.validate()?;
            return Ok(inst);
        }
    }
    Err(Error::InvalidInstance(
        "could not sample a positive definite dilation instance in 100 tries".into(),
    ))
}

/// Builds the (rho, sigma, N) substitution for one corollary case.
///
/// Dimension conventions per case (`params.dims`):
/// - ssa: (A, B, C); sigma = rho_AC (x) I_B, N = Tr_A
/// - concavity: (A, B); the state gains a flag X of size `ensemble_size`
/// - joint_convexity: (B,); two flagged ensembles with shared weights
/// - discord: (A, B); a random rank-one measurement acts on A
/// - holevo: (A,); a classical flag Y of size `ensemble_size` is appended
/// - multipartite: (A_1, A_1', ..., A_l, A_l'); N traces every unprimed part
/// - qec: (S,); sigma is a random codespace projector of rank `params.rank`
pub fn build_instance<R: Rng>(
    case: CaseTag,
    params: &CaseParams,
    rng: &mut R,
) -> Result<Instance> {
    let inst = match case {
        CaseTag::Ssa => {
            let dims = expect_dims(params, 3)?;
            let total: usize = dims.iter().product();
            let rho = random_density_matrix(total, params.rank.unwrap_or(total), rng);
            let rho_ac = partial_trace(&rho, &dims, &[1])?;
            let sigma = entropy::embed_on(&rho_ac, &[0, 2], &dims)?;
            Instance {
                case: case.as_str().into(),
                interpretation: "Delta = I(A;B|C)".into(),
                rho,
                sigma,
                channel: QuantumMap::trace_out_channel(&dims, &[0])?,
                dims,
                aux: CaseAux::Ssa,
            }
        }
        CaseTag::Concavity => {
            let ab = expect_dims(params, 2)?;
            let d_ab = ab[0] * ab[1];
            let e = random_ensemble(d_ab, params.ensemble_size, d_ab, rng)?;
            let rho = cq_state(&e);
            let sigma = kron(&identity(e.len()), &e.average());
            let dims = vec![e.len(), ab[0], ab[1]];
            Instance {
                case: case.as_str().into(),
                interpretation: "Delta = H(A|B)_avg - sum_x p_x H(A|B)_x".into(),
                rho,
                sigma,
                channel: QuantumMap::trace_out_channel(&dims, &[1])?,
                dims,
                aux: CaseAux::Flagged {
                    flag_pos: 0,
                    probs: e.probs().to_vec(),
                    members: e.members().to_vec(),
                },
            }
        }
        CaseTag::JointConvexity => {
            let b = expect_dims(params, 1)?[0];
            let probs = random_simplex(params.ensemble_size, rng);
            let rhos: Vec<CMat> = (0..params.ensemble_size)
                .map(|_| random_density_matrix(b, params.rank.unwrap_or(b), rng))
                .collect();
            let sigmas: Vec<CMat> = (0..params.ensemble_size)
                .map(|_| random_density_matrix(b, b, rng))
                .collect();
            let rho = cq_state(&crate::quantum::Ensemble::new(probs.clone(), rhos)?);
            let sigma = cq_state(&crate::quantum::Ensemble::new(probs, sigmas)?);
            let dims = vec![params.ensemble_size, b];
            Instance {
                case: case.as_str().into(),
                interpretation: "Delta = sum_x p_x D(rho_x||sigma_x) - D(rho_bar||sigma_bar)"
                    .into(),
                rho,
                sigma,
                channel: QuantumMap::trace_out_channel(&dims, &[0])?,
                dims,
                aux: CaseAux::None,
            }
        }
        CaseTag::Discord => {
            let dims = expect_dims(params, 2)?;
            let (da, db) = (dims[0], dims[1]);
            let rho = random_density_matrix(da * db, da * db, rng);
            let rho_a = partial_trace(&rho, &dims, &[1])?;
            let sigma = kron(&rho_a, &identity(db));
            let m = random_measurement(da, da, rng)?;
            let channel = measurement_channel(&m).tensor(&QuantumMap::identity_channel(db));
            Instance {
                case: case.as_str().into(),
                interpretation: "Delta = I(A;B) - I(X;B), measurement on A".into(),
                rho,
                sigma,
                channel,
                dims,
                aux: CaseAux::Discord {
                    rho_a,
                    measurement: m,
                    d_b: db,
                },
            }
        }
        CaseTag::Holevo => {
            let da = expect_dims(params, 1)?[0];
            let e = random_ensemble(da, params.ensemble_size, da, rng)?;
            // flag last: rho_AY = sum_y p_y rho_A^y (x) |y><y|
            let flagged_first = cq_state(&e);
            let rho = permute_systems(&flagged_first, &[e.len(), da], &[1, 0])?;
            let sigma = kron(&e.average(), &identity(e.len()));
            let m = random_measurement(da, da, rng)?;
            let channel = measurement_channel(&m).tensor(&QuantumMap::identity_channel(e.len()));
            let dims = vec![da, e.len()];
            Instance {
                case: case.as_str().into(),
                interpretation: "Delta = chi(ensemble) - I(X;Y) for the measured ensemble"
                    .into(),
                rho,
                sigma,
                channel,
                dims,
                aux: CaseAux::Flagged {
                    flag_pos: 1,
                    probs: e.probs().to_vec(),
                    members: e.members().to_vec(),
                },
            }
        }
        CaseTag::Multipartite => {
            let dims = params.dims.clone();
            if dims.len() < 4 || dims.len() % 2 != 0 {
                return Err(Error::InvalidParameter(
                    "multipartite case needs an even number (>= 4) of dims".into(),
                ));
            }
            let total: usize = dims.iter().product();
            let rho = random_density_matrix(total, params.rank.unwrap_or(total), rng);
            let mut sigma = CMat::from_element(1, 1, re(1.0));
            for pair in 0..dims.len() / 2 {
                let traced: Vec<usize> = (0..dims.len())
                    .filter(|&j| j / 2 != pair)
                    .collect();
                sigma = kron(&sigma, &partial_trace(&rho, &dims, &traced)?);
            }
            let unprimed: Vec<usize> = (0..dims.len()).step_by(2).collect();
            Instance {
                case: case.as_str().into(),
                interpretation: "Delta = I(A_1 A_1' : ... ) - I(A_1' : ...)".into(),
                rho,
                sigma,
                channel: QuantumMap::trace_out_channel(&dims, &unprimed)?,
                dims,
                aux: CaseAux::None,
            }
        }
        CaseTag::Qec => {
            let d = expect_dims(params, 1)?[0];
            let k = params.rank.unwrap_or((d / 2).max(1));
            if k < 1 || k > d {
                return Err(Error::InvalidParameter(format!(
                    "codespace rank {k} must be in 1..={d}"
                )));
            }
            let w = random_isometry(k, d, rng)?;
            let pi = &w * w.adjoint();
            let small = random_density_matrix(k, k, rng);
            let rho = &w * small * w.adjoint();
            let channel = random_channel(d, d, 2, rng)?;
            Instance {
                case: case.as_str().into(),
                interpretation: "Delta = D(rho||Pi) - D(N(rho)||N(Pi)) on a codespace".into(),
                rho,
                sigma: pi,
                channel,
                dims: vec![d],
                aux: CaseAux::None,
            }
        }
        CaseTag::Sequential => {
            return Err(Error::InvalidParameter(
                "the sequential case is a state check, not a channel instance".into(),
            ))
        }
    };
    inst.validate()?;
    Ok(inst)
}

fn expect_dims(params: &CaseParams, n: usize) -> Result<Vec<usize>> {
    if params.dims.len() != n {
        return Err(Error::InvalidParameter(format!(
            "case expects {n} dims, got {:?}",
            params.dims
        )));
    }
    if params.dims.iter().any(|&d| d < 2) {
        return Err(Error::InvalidParameter(
            "subsystem dims must be at least 2".into(),
        ));
    }
    Ok(params.dims.clone())
}

/// Extracts the x-th diagonal block of a flag subsystem sitting at
/// `flag_pos` inside `dims`.
fn flag_block(m: &CMat, dims: &[usize], flag_pos: usize, x: usize) -> Result<CMat> {
    let mut perm = vec![flag_pos];
    perm.extend((0..dims.len()).filter(|&i| i != flag_pos));
    let fronted = permute_systems(m, dims, &perm)?;
    let rest: usize = dims
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != flag_pos)
        .map(|(_, &d)| d)
        .product();
    Ok(fronted.view((x * rest, x * rest), (rest, rest)).into_owned())
}

/// Builds the instance for a corollary case, runs the lower-bound check, and
/// performs the case-specific construction audits.
pub fn check_corollary<R: Rng>(
    case: CaseTag,
    params: &CaseParams,
    cfg: &TSearchConfig,
    rng: &mut R,
) -> Result<CheckReport> {
    check_corollary_with_instance(case, params, cfg, rng).map(|(report, _)| report)
}

/// [`check_corollary`] that also hands back the built instance so callers can
/// persist it. The sequential case checks a state rather than a channel
/// triple, so no instance is returned for it.
pub fn check_corollary_with_instance<R: Rng>(
    case: CaseTag,
    params: &CaseParams,
    cfg: &TSearchConfig,
    rng: &mut R,
) -> Result<(CheckReport, Option<Instance>)> {
    if case == CaseTag::Sequential {
        let total: usize = params.dims.iter().product();
        let rho = random_density_matrix(total, params.rank.unwrap_or(total), rng);
        return check_sequential(&rho, &params.dims, cfg).map(|r| (r, None));
    }
    let inst = build_instance(case, params, rng)?;
    let report = check_lower(&inst, cfg)?;

    match &inst.aux {
        CaseAux::Ssa => {
            let dims: [usize; 3] = [inst.dims[0], inst.dims[1], inst.dims[2]];
            let i_cmi = cmi(&inst.rho, &dims)?.value();
            if (i_cmi - report.delta.value()).abs() > AUDIT_TOL {
                return Err(Error::InvalidInstance(format!(
                    "Delta {} differs from I(A;B|C) {}",
                    report.delta.value(),
                    i_cmi
                )));
            }
        }
        CaseAux::Flagged {
            flag_pos,
            probs,
            members,
        } => {
            // the flag survives the channel and the recovery, so the root
            // fidelity must split as a probability-weighted sum over blocks
            let obj = RecoveryObjective::new(&inst)?;
            let recovered = obj.recovered(report.witness_t)?;
            let mono = fidelity(&inst.rho, &recovered)?.sqrt();
            let mut split = 0.0;
            for (x, (p, member)) in probs.iter().zip(members).enumerate() {
                let block = flag_block(&recovered, &inst.dims, *flag_pos, x)?;
                let weighted = member.map(|z| z * re(*p));
                split += fidelity(&weighted, &block)?.sqrt();
            }
            if (mono - split).abs() > AUDIT_TOL {
                return Err(Error::InvalidInstance(format!(
                    "flag fidelity split {split} differs from monolithic {mono}"
                )));
            }
        }
        CaseAux::Discord {
            rho_a,
            measurement,
            d_b,
        } => {
            // recovery-then-measurement equals rotation composed with the
            // measure-and-prepare map, tensored with identity on B
            let t = report.witness_t;
            let lhs = rotated_petz(&inst.sigma, &inst.channel, t)?
                .map()
                .after(&inst.channel)?;
            let rhs = rotation(rho_a, t)?
                .after(&eb_map(rho_a, measurement)?)?
                .tensor(&QuantumMap::identity_channel(*d_b));
            let diff = max_abs(&(lhs.choi() - rhs.choi()));
            if diff > AUDIT_TOL {
                return Err(Error::InvalidInstance(format!(
                    "discord recovery identity violated by {diff:.3e}"
                )));
            }
        }
        CaseAux::None => {}
    }
    Ok((report, Some(inst)))
}

/// Sequential recovery of (A_2, ..., A_l) from (A_1, C): checks the lower
/// bound with the conditional multipartite information, and additionally the
/// D_max upper bound when the state is positive definite. The report carries
/// the lower bound; an upper-bound shortfall downgrades the verdict.
pub fn check_sequential(rho: &CMat, dims: &[usize], cfg: &TSearchConfig) -> Result<CheckReport> {
    let n = dims.len();
    if n < 3 {
        return Err(Error::Shape(
            "sequential check needs at least two parts plus C".into(),
        ));
    }
    let l = n - 1;
    let total: usize = dims.iter().product();
    if rho.nrows() != total {
        return Err(Error::Shape("state does not match dims".into()));
    }
    let delta = cond_multipartite_info(rho, dims)?;

    let traced_mid: Vec<usize> = (1..l).collect();
    let marg = partial_trace(rho, dims, &traced_mid)?;
    let sqrt_rho = power_on_support(rho, re(0.5))?;
    let eval = |t: f64| -> Result<f64> {
        let rec = sequential_recovery(rho, dims, t)?;
        fidelity_with_sqrt(&sqrt_rho, &rec.apply(&marg)?)
    };

    let mut search = t_search(eval, cfg)?;
    let mut bound = if search.value > 0.0 {
        Nats::finite(-search.value.ln())
    } else {
        Nats::INFINITY
    };
    let mut deficit = if bound.is_infinite() {
        f64::NEG_INFINITY
    } else {
        delta.value() - bound.value()
    };
    if deficit < -TOL_VERDICT {
        let retry = t_search(eval, &cfg.escalated())?;
        if retry.value > search.value {
            search = retry;
            bound = Nats::finite(-search.value.ln());
            deficit = delta.value() - bound.value();
        }
    }
    let mut verdict = if deficit >= -TOL_VERDICT {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };

    // upper bound branch for positive definite states
    let eig = herm_eig(rho)?;
    if eig.values[0] > rank_cutoff(eig.dim(), eig.lambda_max_abs()) {
        let upper_eval = |t: f64| -> Result<f64> {
            let rec = sequential_recovery(rho, dims, t)?;
            let d = max_relative_entropy(rho, &rec.apply(&marg)?)?;
            if d.is_infinite() {
                return Err(Error::Objective { t });
            }
            Ok(d.value())
        };
        let upper = t_search(upper_eval, cfg)?;
        if upper.value - delta.value() < -TOL_VERDICT {
            verdict = Verdict::Inconclusive;
        }
    }

    Ok(CheckReport {
        case: CaseTag::Sequential.as_str().into(),
        seed: 0,
        dims: dims.to_vec(),
        delta,
        bound,
        witness_t: search.t,
        deficit,
        verdict,
        samples: search.trace,
    })
}

/// Tabulated Renyi differences with the limit checks.
#[derive(Clone, Debug, Serialize)]
pub struct LimitReport {
    pub case: String,
    pub seed: u64,
    pub alphas: Vec<f64>,
    pub values: Vec<f64>,
    pub delta: Nats,
    /// Richardson extrapolation of the alpha -> 1 limit.
    pub extrapolated: f64,
    pub limit_ok: bool,
    /// Probe at alpha = 200 against D_max(rho || R^P(N(rho))); present only
    /// for positive definite instances.
    pub dmax_probe: Option<f64>,
    pub dmax_direct: Option<f64>,
    pub dmax_ok: Option<bool>,
    /// Chain alpha in (1/2, 1): Delta-tilde >= -ln(best F) - tol.
    pub chain_ok: bool,
}

/// Tabulates the Renyi difference over `alpha_grid`, checks the alpha -> 1
/// extrapolation against Delta, the alpha -> infinity probe against D_max
/// (positive definite instances only), and the alpha in (1/2, 1) chain
/// against the best fidelity witness.
pub fn check_limits(
    inst: &Instance,
    alpha_grid: &[f64],
    cfg: &TSearchConfig,
) -> Result<LimitReport> {
    let v = inst.channel.stinespring()?;
    let dt = |a: f64| -> Result<f64> {
        entropy::delta_tilde_with_dilation(&inst.rho, &inst.sigma, &v, &RenyiParam::new(a)?)
            .map(Nats::value)
    };

    let mut values = Vec::with_capacity(alpha_grid.len());
    for &a in alpha_grid {
        values.push(dt(a)?);
    }

    let delta = rel_ent_difference(&inst.rho, &inst.sigma, &inst.channel)?;
    let extrapolated = richardson_alpha_limit(dt, 0.01, 0.001)?;
    let limit_ok = (extrapolated - delta.value()).abs() <= LIMIT_TOL_ALPHA1;

    // alpha -> infinity probe only when everything is positive definite
    let pd = |m: &CMat| -> Result<bool> {
        let eig = herm_eig(m)?;
        Ok(eig.values[0] > rank_cutoff(eig.dim(), eig.lambda_max_abs()))
    };
    let all_pd = pd(&inst.rho)?
        && pd(&inst.sigma)?
        && pd(&inst.channel.apply(&inst.rho)?)?
        && pd(&inst.channel.apply(&inst.sigma)?)?;
    let (dmax_probe, dmax_direct, dmax_ok) = if all_pd {
        // the tail decays like 1/alpha, so one Richardson step in 1/alpha
        // (evaluations at the probe order and at half of it) cancels it
        let probe = 2.0 * dt(ALPHA_INFINITY_PROBE)? - dt(ALPHA_INFINITY_PROBE / 2.0)?;
        let obj = RecoveryObjective::new(inst)?;
        let direct = max_relative_entropy(&inst.rho, &obj.recovered(0.0)?)?.value();
        (
            Some(probe),
            Some(direct),
            Some((probe - direct).abs() <= LIMIT_TOL_DMAX),
        )
    } else {
        (None, None, None)
    };

    // chain: every alpha in (1/2, 1) on the grid dominates the best witness
    let lower = check_lower(inst, cfg)?;
    let best = if lower.bound.is_infinite() {
        f64::INFINITY
    } else {
        lower.bound.value()
    };
    let chain_ok = alpha_grid
        .iter()
        .zip(&values)
        .filter(|(&a, _)| a > 0.5 && a < 1.0)
        .all(|(_, &v)| v >= best - TOL_VERDICT);

    Ok(LimitReport {
        case: inst.case.clone(),
        seed: 0,
        alphas: alpha_grid.to_vec(),
        values,
        delta,
        extrapolated,
        limit_ok,
        dmax_probe,
        dmax_direct,
        dmax_ok,
        chain_ok,
    })
}

/// Functoriality identities of the rotated recovery family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FunctKind {
    Normalization,
    Parallel,
    Serial,
}

impl FunctKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FunctKind::Normalization => "normalization",
            FunctKind::Parallel => "parallel",
            FunctKind::Serial => "serial",
        }
    }
}

impl std::str::FromStr for FunctKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normalization" => Ok(FunctKind::Normalization),
            "parallel" => Ok(FunctKind::Parallel),
            "serial" => Ok(FunctKind::Serial),
            other => Err(Error::InvalidParameter(format!(
                "unknown functoriality kind {other:?}"
            ))),
        }
    }
}

/// Checks one functoriality identity at a randomly drawn t. The report
/// reuses the bound slot for the Choi mismatch; deficit = tol - mismatch.
pub fn check_functoriality<R: Rng>(
    kind: FunctKind,
    rng: &mut R,
) -> Result<CheckReport> {
    let t = rng.random::<f64>() * 10.0 - 5.0;
    let (mismatch, dims) = match kind {
        FunctKind::Normalization => {
            let sigma = random_density_matrix(3, 3, rng);
            let rec = rotated_petz(&sigma, &QuantumMap::identity_channel(3), t)?;
            let diff = max_abs(&(rec.map().choi() - QuantumMap::identity_channel(3).choi()));
            (diff, vec![3])
        }
        FunctKind::Parallel => {
            let s1 = random_density_matrix(2, 2, rng);
            let s2 = random_density_matrix(2, 2, rng);
            let n1 = random_channel(2, 2, 2, rng)?;
            let n2 = random_channel(2, 2, 2, rng)?;
            let joint = rotated_petz(&kron(&s1, &s2), &n1.tensor(&n2), t)?;
            let split = rotated_petz(&s1, &n1, t)?
                .map()
                .tensor(rotated_petz(&s2, &n2, t)?.map());
            (max_abs(&(joint.map().choi() - split.choi())), vec![2, 2])
        }
        FunctKind::Serial => {
            let sigma = random_density_matrix(3, 3, rng);
            let n1 = random_channel(3, 2, 2, rng)?;
            let n2 = random_channel(2, 2, 2, rng)?;
            let composed = rotated_petz(&sigma, &n2.after(&n1)?, t)?;
            let chained = rotated_petz(&sigma, &n1, t)?
                .map()
                .after(rotated_petz(&n1.apply(&sigma)?, &n2, t)?.map())?;
            (max_abs(&(composed.map().choi() - chained.choi())), vec![3])
        }
    };
    let verdict = if mismatch <= AUDIT_TOL {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(CheckReport {
        case: format!("functoriality_{}", kind.as_str()),
        seed: 0,
        dims,
        delta: Nats::ZERO,
        bound: Nats::finite(mismatch),
        witness_t: t,
        deficit: AUDIT_TOL - mismatch,
        verdict,
        samples: Vec::new(),
    })
}

/// Perfect recovery of sigma itself (trace-norm distance over random t).
pub fn sigma_recovery_residual<R: Rng>(inst: &Instance, rng: &mut R) -> Result<f64> {
    let n_sigma = inst.channel.apply(&inst.sigma)?;
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let t = rng.random::<f64>() * 10.0 - 5.0;
        let rec = rotated_petz(&inst.sigma, &inst.channel, t)?;
        let back = rec.apply(&n_sigma)?;
        worst = worst.max(trace_norm(&(back - &inst.sigma)));
    }
    Ok(worst)
}
