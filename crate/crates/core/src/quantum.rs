//! Validated quantum objects: states, channels, dilations, ensembles and
//! measurements, plus seeded random samplers for all of them.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::numerics::{
    self, herm_eig, identity, kron, max_abs, partial_trace, re, CMat, Complex64,
};

/// Trace of a state must match 1 within this.
pub const TRACE_TOL: f64 = 1e-10;
/// Kraus completeness tolerance for the trace-preserving flag.
pub const TP_TOL: f64 = 1e-9;
/// Slack for the trace-non-increasing flag.
pub const TNI_TOL: f64 = 1e-9;
/// Isometry audit tolerance.
pub const ISOMETRY_TOL: f64 = 1e-10;
/// Measurement completeness tolerance.
pub const MEASUREMENT_TOL: f64 = 1e-10;
/// Ensemble probability normalization tolerance.
pub const PROB_TOL: f64 = 1e-12;

/// Subsystem bookkeeping: unique names with their dimensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeLabels {
    names: Vec<String>,
    dims: Vec<usize>,
}

impl CompositeLabels {
    pub fn new(names: Vec<String>, dims: Vec<usize>) -> Result<Self> {
        if names.len() != dims.len() {
            return Err(Error::InvalidParameter(
                "labels need one name per dimension".into(),
            ));
        }
        if dims.iter().any(|&d| d < 1) {
            return Err(Error::InvalidParameter("subsystem dims must be >= 1".into()));
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate subsystem name {n:?}"
                )));
            }
        }
        Ok(Self { names, dims })
    }

    pub fn single(name: &str, dim: usize) -> Result<Self> {
        Self::new(vec![name.to_string()], vec![dim])
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Labels left after removing the listed subsystem indices.
    pub fn without(&self, traced: &[usize]) -> Result<Self> {
        let keep: Vec<usize> = (0..self.len()).filter(|i| !traced.contains(i)).collect();
        Self::new(
            keep.iter().map(|&i| self.names[i].clone()).collect(),
            keep.iter().map(|&i| self.dims[i]).collect(),
        )
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Self::new(
            self.names.iter().chain(&other.names).cloned().collect(),
            self.dims.iter().chain(&other.dims).copied().collect(),
        )
    }
}

fn check_psd(mat: &CMat) -> Result<()> {
    let eig = herm_eig(mat)?;
    let scale = eig.lambda_max_abs();
    let min_eig = eig.values.first().copied().unwrap_or(0.0);
    if min_eig < -numerics::PSD_TOL * scale.max(1e-300) {
        return Err(Error::NotPsd { min_eig });
    }
    Ok(())
}

/// A validated density operator: PSD with unit trace.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    labels: CompositeLabels,
    mat: CMat,
}

impl DensityOperator {
    pub fn new(labels: CompositeLabels, mat: CMat) -> Result<Self> {
        if mat.nrows() != labels.total_dim() {
            return Err(Error::Shape(format!(
                "matrix dim {} does not match labels total {}",
                mat.nrows(),
                labels.total_dim()
            )));
        }
        check_psd(&mat)?;
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "trace is {:.12} + {:.3e}i, expected 1",
                tr.re, tr.im
            )));
        }
        Ok(Self { labels, mat })
    }

    pub fn from_matrix(name: &str, mat: CMat) -> Result<Self> {
        let labels = CompositeLabels::single(name, mat.nrows())?;
        Self::new(labels, mat)
    }

    pub fn labels(&self) -> &CompositeLabels {
        &self.labels
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// Marginal after tracing out the listed subsystem indices.
    pub fn trace_out(&self, traced: &[usize]) -> Result<DensityOperator> {
        let mat = partial_trace(&self.mat, self.labels.dims(), traced)?;
        DensityOperator::new(self.labels.without(traced)?, mat)
    }

    pub fn tensor(&self, other: &DensityOperator) -> Result<DensityOperator> {
        DensityOperator::new(
            self.labels.tensor(&other.labels)?,
            kron(&self.mat, &other.mat),
        )
    }
}

/// A validated positive semi-definite operator; trace unconstrained.
#[derive(Debug, Clone)]
pub struct PsdOperator {
    labels: CompositeLabels,
    mat: CMat,
}

impl PsdOperator {
    pub fn new(labels: CompositeLabels, mat: CMat) -> Result<Self> {
        if mat.nrows() != labels.total_dim() {
            return Err(Error::Shape(format!(
                "matrix dim {} does not match labels total {}",
                mat.nrows(),
                labels.total_dim()
            )));
        }
        check_psd(&mat)?;
        Ok(Self { labels, mat })
    }

    pub fn from_matrix(name: &str, mat: CMat) -> Result<Self> {
        let labels = CompositeLabels::single(name, mat.nrows())?;
        Self::new(labels, mat)
    }

    pub fn labels(&self) -> &CompositeLabels {
        &self.labels
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }
}

impl From<DensityOperator> for PsdOperator {
    fn from(rho: DensityOperator) -> Self {
        PsdOperator {
            labels: rho.labels,
            mat: rho.mat,
        }
    }
}

/// A completely positive map in Kraus form. CP holds by construction; the
/// trace flags are computed once from sum K'K.
#[derive(Debug, Clone)]
pub struct QuantumMap {
    in_dim: usize,
    out_dim: usize,
    kraus: Vec<CMat>,
    trace_preserving: bool,
    trace_nonincreasing: bool,
}

impl QuantumMap {
    pub fn from_kraus(kraus: Vec<CMat>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidChannel("empty Kraus set".into()))?;
        let (out_dim, in_dim) = (first.nrows(), first.ncols());
        for k in &kraus {
            if k.nrows() != out_dim || k.ncols() != in_dim {
                return Err(Error::Shape(format!(
                    "Kraus operators must share shape {}x{}, got {}x{}",
                    out_dim,
                    in_dim,
                    k.nrows(),
                    k.ncols()
                )));
            }
            if !numerics::all_finite(k) {
                return Err(Error::InvalidParameter(
                    "Kraus operator has non-finite entries".into(),
                ));
            }
        }
        let mut completeness = CMat::zeros(in_dim, in_dim);
        for k in &kraus {
            completeness += k.adjoint() * k;
        }
        let gap = &completeness - identity(in_dim);
        let trace_preserving = max_abs(&gap) <= TP_TOL;
        // trace non-increasing iff sum K'K <= I + slack
        let top = herm_eig(&gap).map(|e| e.values.last().copied().unwrap_or(0.0))?;
        let trace_nonincreasing = top <= TNI_TOL;
        Ok(Self {
            in_dim,
            out_dim,
            kraus,
            trace_preserving,
            trace_nonincreasing,
        })
    }

    pub fn identity_channel(dim: usize) -> Self {
        Self::from_kraus(vec![identity(dim)]).expect("identity Kraus set is valid")
    }

    /// Channel that traces out the subsystems listed in `traced`.
    pub fn trace_out_channel(dims: &[usize], traced: &[usize]) -> Result<Self> {
        let total: usize = dims.iter().product();
        let probe = identity(total);
        // Reuse partial_trace index logic by building Kraus operators directly:
        // one per basis vector of the traced factor.
        let n = dims.len();
        for &k in traced {
            if k >= n {
                return Err(Error::Shape(format!("traced index {k} out of range")));
            }
        }
        let kept: Vec<usize> = (0..n).filter(|i| !traced.contains(i)).collect();
        let kept_dims: Vec<usize> = kept.iter().map(|&i| dims[i]).collect();
        let traced_dims: Vec<usize> = traced.iter().map(|&i| dims[i]).collect();
        let dk: usize = kept_dims.iter().product();
        let dt: usize = traced_dims.iter().product();
        let mut kraus = Vec::with_capacity(dt);
        for e in 0..dt {
            let mut k_op = CMat::zeros(dk, total);
            for full in 0..total {
                let (kept_flat, traced_flat) = split_index(full, dims, &kept, traced);
                if traced_flat == e {
                    k_op[(kept_flat, full)] = re(1.0);
                }
            }
            kraus.push(k_op);
        }
        let map = Self::from_kraus(kraus)?;
        debug_assert!(map.apply(&probe).is_ok());
        Ok(map)
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn kraus(&self) -> &[CMat] {
        &self.kraus
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    pub fn is_trace_nonincreasing(&self) -> bool {
        self.trace_nonincreasing
    }

    /// sum_k K X K'
    pub fn apply(&self, x: &CMat) -> Result<CMat> {
        if x.nrows() != self.in_dim || x.ncols() != self.in_dim {
            return Err(Error::Shape(format!(
                "input is {}x{} but channel input dim is {}",
                x.nrows(),
                x.ncols(),
                self.in_dim
            )));
        }
        let mut out = CMat::zeros(self.out_dim, self.out_dim);
        for k in &self.kraus {
            out += k * x * k.adjoint();
        }
        Ok(out)
    }

    /// Adjoint with respect to the Hilbert-Schmidt inner product: Kraus set {K'}.
    pub fn adjoint_map(&self) -> QuantumMap {
        let kraus = self.kraus.iter().map(|k| k.adjoint()).collect();
        QuantumMap::from_kraus(kraus).expect("adjoint Kraus set keeps valid shapes")
    }

    /// Serial composition: `self` applied after `inner`.
    pub fn after(&self, inner: &QuantumMap) -> Result<QuantumMap> {
        if self.in_dim != inner.out_dim {
            return Err(Error::Shape(format!(
                "cannot compose: outer input {} vs inner output {}",
                self.in_dim, inner.out_dim
            )));
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * inner.kraus.len());
        for a in &self.kraus {
            for b in &inner.kraus {
                kraus.push(a * b);
            }
        }
        QuantumMap::from_kraus(kraus)
    }

    pub fn tensor(&self, other: &QuantumMap) -> QuantumMap {
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(kron(a, b));
            }
        }
        QuantumMap::from_kraus(kraus).expect("tensor Kraus set keeps valid shapes")
    }

    /// Isometric extension with environment dimension equal to the number of
    /// Kraus operators: V = sum_e K_e (x) |e>.
    pub fn stinespring(&self) -> Result<StinespringIsometry> {
        if !self.trace_preserving {
            return Err(Error::InvalidChannel(
                "Stinespring dilation requires a trace-preserving map".into(),
            ));
        }
        let env = self.kraus.len();
        let mut v = CMat::zeros(self.out_dim * env, self.in_dim);
        for (e, k) in self.kraus.iter().enumerate() {
            for b in 0..self.out_dim {
                for s in 0..self.in_dim {
                    v[(b * env + e, s)] = k[(b, s)];
                }
            }
        }
        StinespringIsometry::new(v, env)
    }

    /// Choi operator (id (x) map) applied to the unnormalized maximally
    /// entangled projector; reference factor first.
    pub fn choi(&self) -> CMat {
        let d = self.in_dim;
        let n = d * self.out_dim;
        let mut choi = CMat::zeros(n, n);
        for k in &self.kraus {
            // |v> = sum_i |i> (x) K|i>
            let mut v = CMat::zeros(n, 1);
            for i in 0..d {
                for b in 0..self.out_dim {
                    v[(i * self.out_dim + b, 0)] = k[(b, i)];
                }
            }
            choi += &v * v.adjoint();
        }
        choi
    }
}

fn split_index(full: usize, dims: &[usize], kept: &[usize], traced: &[usize]) -> (usize, usize) {
    let n = dims.len();
    let mut idx = vec![0usize; n];
    let mut rem = full;
    for i in (0..n).rev() {
        idx[i] = rem % dims[i];
        rem /= dims[i];
    }
    let mut kept_flat = 0;
    for &i in kept {
        kept_flat = kept_flat * dims[i] + idx[i];
    }
    let mut traced_flat = 0;
    for &i in traced {
        traced_flat = traced_flat * dims[i] + idx[i];
    }
    (kept_flat, traced_flat)
}

/// Isometric extension U_{S->BE} with a named environment dimension.
#[derive(Debug, Clone)]
pub struct StinespringIsometry {
    v: CMat,
    env_dim: usize,
}

impl StinespringIsometry {
    pub fn new(v: CMat, env_dim: usize) -> Result<Self> {
        if env_dim == 0 || v.nrows() % env_dim != 0 {
            return Err(Error::Shape(format!(
                "row count {} not divisible by environment dim {env_dim}",
                v.nrows()
            )));
        }
        let gap = v.adjoint() * &v - identity(v.ncols());
        let dev = max_abs(&gap);
        if dev > ISOMETRY_TOL {
            return Err(Error::InvalidChannel(format!(
                "V'V deviates from identity by {dev:.3e}"
            )));
        }
        Ok(Self { v, env_dim })
    }

    pub fn matrix(&self) -> &CMat {
        &self.v
    }

    pub fn env_dim(&self) -> usize {
        self.env_dim
    }

    pub fn out_dim(&self) -> usize {
        self.v.nrows() / self.env_dim
    }

    pub fn in_dim(&self) -> usize {
        self.v.ncols()
    }

    /// V X V' on the full output (x) environment space.
    pub fn conjugate(&self, x: &CMat) -> CMat {
        &self.v * x * self.v.adjoint()
    }

    /// Tr_E { V X V' }; the channel this isometry dilates.
    pub fn marginal(&self, x: &CMat) -> Result<CMat> {
        partial_trace(
            &self.conjugate(x),
            &[self.out_dim(), self.env_dim],
            &[1],
        )
    }

    /// A different dilation of the same channel: environment enlarged through
    /// the isometry `w` (env -> env').
    pub fn extend_environment(&self, w: &CMat) -> Result<StinespringIsometry> {
        if w.ncols() != self.env_dim {
            return Err(Error::Shape(format!(
                "environment isometry expects input dim {}, got {}",
                self.env_dim,
                w.ncols()
            )));
        }
        let big = kron(&identity(self.out_dim()), w) * &self.v;
        StinespringIsometry::new(big, w.nrows())
    }
}

/// Probability-weighted collection of operators with uniform dimensions.
#[derive(Debug, Clone)]
pub struct Ensemble {
    probs: Vec<f64>,
    members: Vec<CMat>,
}

impl Ensemble {
    pub fn new(probs: Vec<f64>, members: Vec<CMat>) -> Result<Self> {
        if probs.len() != members.len() || probs.is_empty() {
            return Err(Error::InvalidParameter(
                "ensemble needs matching, non-empty probs and members".into(),
            ));
        }
        if probs.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::InvalidParameter(
                "ensemble probabilities must be nonnegative".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidParameter(format!(
                "ensemble probabilities sum to {total}, expected 1"
            )));
        }
        let dim = members[0].nrows();
        for m in &members {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::Shape("ensemble members must share dimensions".into()));
            }
            check_psd(m)?;
        }
        Ok(Self { probs, members })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn members(&self) -> &[CMat] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn member_dim(&self) -> usize {
        self.members[0].nrows()
    }

    /// sum_x p_x member_x
    pub fn average(&self) -> CMat {
        let d = self.member_dim();
        let mut out = CMat::zeros(d, d);
        for (p, m) in self.probs.iter().zip(&self.members) {
            out += m.map(|z| z * re(*p));
        }
        out
    }
}

/// Classical-quantum flagged operator sum_x p_x |x><x|_X (x) w_x with the
/// flag in the computational basis; ordering (X, B).
pub fn cq_state(e: &Ensemble) -> CMat {
    let n = e.len();
    let d = e.member_dim();
    let mut out = CMat::zeros(n * d, n * d);
    for (x, (p, m)) in e.probs.iter().zip(e.members()).enumerate() {
        for r in 0..d {
            for c in 0..d {
                out[(x * d + r, x * d + c)] = m[(r, c)] * re(*p);
            }
        }
    }
    out
}

/// Rank-one measurement {|phi_x>} on one system, complete: sum |phi><phi| = I.
#[derive(Debug, Clone)]
pub struct RankOneMeasurement {
    vectors: Vec<CMat>,
}

impl RankOneMeasurement {
    pub fn new(vectors: Vec<CMat>) -> Result<Self> {
        let first = vectors
            .first()
            .ok_or_else(|| Error::InvalidMeasurement("empty measurement".into()))?;
        let d = first.nrows();
        let mut sum = CMat::zeros(d, d);
        for v in &vectors {
            if v.ncols() != 1 || v.nrows() != d {
                return Err(Error::Shape(
                    "measurement vectors must be uniform columns".into(),
                ));
            }
            sum += v * v.adjoint();
        }
        let dev = max_abs(&(sum - identity(d)));
        if dev > MEASUREMENT_TOL {
            return Err(Error::InvalidMeasurement(format!(
                "completeness violated by {dev:.3e}"
            )));
        }
        Ok(Self { vectors })
    }

    pub fn computational(dim: usize) -> Self {
        let vectors = (0..dim)
            .map(|i| {
                let mut v = CMat::zeros(dim, 1);
                v[(i, 0)] = re(1.0);
                v
            })
            .collect();
        Self::new(vectors).expect("computational basis is complete")
    }

    pub fn vectors(&self) -> &[CMat] {
        &self.vectors
    }

    pub fn outcomes(&self) -> usize {
        self.vectors.len()
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].nrows()
    }
}

/// Measurement channel (.) -> sum_x <phi_x|(.)|phi_x> |x><x|.
pub fn measurement_channel(m: &RankOneMeasurement) -> QuantumMap {
    let out = m.outcomes();
    let kraus = m
        .vectors
        .iter()
        .enumerate()
        .map(|(x, v)| {
            let mut e = CMat::zeros(out, 1);
            e[(x, 0)] = re(1.0);
            e * v.adjoint()
        })
        .collect();
    QuantumMap::from_kraus(kraus).expect("measurement Kraus set is valid")
}

// ---------------------------------------------------------------------------
// Seeded random samplers. All draws consume the passed stream only, so trials
// on disjoint substreams are reproducible and independent.
// ---------------------------------------------------------------------------

pub fn gaussian_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_ginibre<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    CMat::from_fn(rows, cols, |_, _| gaussian_complex(rng))
}

pub fn random_hermitian<R: Rng>(dim: usize, rng: &mut R) -> CMat {
    let g = random_ginibre(dim, dim, rng);
    (&g + g.adjoint()).map(|z| z * re(0.5))
}

/// GG'/Tr(GG') with G a dim x rank standard complex Gaussian draw.
pub fn random_density_matrix<R: Rng>(dim: usize, rank: usize, rng: &mut R) -> CMat {
    assert!(rank >= 1 && rank <= dim, "rank must be in 1..=dim");
    let g = random_ginibre(dim, rank, rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    m.map(|z| z / re(tr))
}

pub fn random_density<R: Rng>(dim: usize, rank: usize, rng: &mut R) -> Result<DensityOperator> {
    if rank < 1 || rank > dim {
        return Err(Error::InvalidParameter(format!(
            "rank {rank} must be in 1..={dim}"
        )));
    }
    DensityOperator::from_matrix("S", random_density_matrix(dim, rank, rng))
}

/// Haar-distributed unitary via QR of a Ginibre draw with phase correction.
pub fn random_unitary<R: Rng>(dim: usize, rng: &mut R) -> CMat {
    let g = random_ginibre(dim, dim, rng);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for i in 0..dim {
        let rii = r[(i, i)];
        let phase = if rii.norm() > 0.0 {
            rii / re(rii.norm())
        } else {
            re(1.0)
        };
        for row in 0..dim {
            q[(row, i)] *= phase;
        }
    }
    q
}

/// Isometry in_dim -> out_dim via orthonormalization of a Gaussian draw.
pub fn random_isometry<R: Rng>(in_dim: usize, out_dim: usize, rng: &mut R) -> Result<CMat> {
    if out_dim < in_dim {
        return Err(Error::InvalidParameter(format!(
            "isometry needs out_dim >= in_dim, got {out_dim} < {in_dim}"
        )));
    }
    let g = random_ginibre(out_dim, in_dim, rng);
    let q = g.qr().q();
    Ok(q.columns(0, in_dim).into_owned())
}

/// Random channel from a random dilation isometry V: Kraus K_e = (I (x) <e|) V.
pub fn random_channel<R: Rng>(
    in_dim: usize,
    out_dim: usize,
    env_dim: usize,
    rng: &mut R,
) -> Result<QuantumMap> {
    if out_dim * env_dim < in_dim {
        return Err(Error::InvalidParameter(format!(
            "need out_dim * env_dim >= in_dim, got {out_dim} * {env_dim} < {in_dim}"
        )));
    }
    let v = random_isometry(in_dim, out_dim * env_dim, rng)?;
    let mut kraus = Vec::with_capacity(env_dim);
    for e in 0..env_dim {
        let mut k = CMat::zeros(out_dim, in_dim);
        for b in 0..out_dim {
            for s in 0..in_dim {
                k[(b, s)] = v[(b * env_dim + e, s)];
            }
        }
        kraus.push(k);
    }
    QuantumMap::from_kraus(kraus)
}

/// Uniform point on the probability simplex via normalized exponentials.
pub fn random_simplex<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    let draws: Vec<f64> = (0..n)
        .map(|_| {
            let u: f64 = rng.random::<f64>();
            -(1.0 - u).ln()
        })
        .collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|d| d / total).collect()
}

pub fn random_ensemble<R: Rng>(
    dim: usize,
    size: usize,
    rank: usize,
    rng: &mut R,
) -> Result<Ensemble> {
    let probs = random_simplex(size, rng);
    let members = (0..size)
        .map(|_| random_density_matrix(dim, rank, rng))
        .collect();
    Ensemble::new(probs, members)
}

/// Random rank-one measurement with `outcomes >= dim` outcomes: the rows of a
/// Haar isometry give a complete vector set.
pub fn random_measurement<R: Rng>(
    dim: usize,
    outcomes: usize,
    rng: &mut R,
) -> Result<RankOneMeasurement> {
    let v = random_isometry(dim, outcomes, rng)?;
    let vectors = (0..outcomes)
        .map(|x| {
            let mut col = CMat::zeros(dim, 1);
            for s in 0..dim {
                col[(s, 0)] = v[(x, s)].conj();
            }
            col
        })
        .collect();
    RankOneMeasurement::new(vectors)
}
