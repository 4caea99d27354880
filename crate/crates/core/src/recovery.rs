//! Recovery channels: the Petz map, its rotated one-parameter family, the
//! conditional-information recovery of a traced-out subsystem, sequential
//! multi-system recovery, entanglement-breaking maps built from a state and a
//! rank-one measurement, and the pretty-good measurement.

use crate::error::{Error, Result};
use crate::numerics::{
    herm_eig, herm_spectral_norm, im, kron, power_on_support, power_on_support_eig, rank_cutoff,
    re, CMat,
};
use crate::quantum::{Ensemble, QuantumMap, RankOneMeasurement};

/// Which construction produced a recovery map.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Petz,
    RotatedPetz,
    Cmi,
    Sequential,
    Eb,
    Pgm,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Petz => "petz",
            Provenance::RotatedPetz => "rotated_petz",
            Provenance::Cmi => "cmi",
            Provenance::Sequential => "sequential",
            Provenance::Eb => "eb",
            Provenance::Pgm => "pgm",
        }
    }
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A quantum map together with its rotation parameter and construction tag.
#[derive(Clone, Debug)]
pub struct RecoveryMap {
    map: QuantumMap,
    t: f64,
    provenance: Provenance,
}

impl RecoveryMap {
    pub fn new(map: QuantumMap, t: f64, provenance: Provenance) -> Self {
        Self { map, t, provenance }
    }

    pub fn map(&self) -> &QuantumMap {
        &self.map
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn apply(&self, x: &CMat) -> Result<CMat> {
        self.map.apply(x)
    }
}

/// Petz recovery of a trace-preserving map `n` relative to the PSD operator
/// `sigma`: Kraus set { sigma^{1/2} K' N(sigma)^{-1/2} }. Negative powers are
/// pseudo-inverses on the support.
pub fn petz(sigma: &CMat, n: &QuantumMap) -> Result<RecoveryMap> {
    rotated_petz_tagged(sigma, n, 0.0, Provenance::Petz)
}

/// One-parameter rotated family: the Petz Kraus operators conjugated by
/// sigma^{it} on the output and N(sigma)^{-it} on the input.
pub fn rotated_petz(sigma: &CMat, n: &QuantumMap, t: f64) -> Result<RecoveryMap> {
    rotated_petz_tagged(sigma, n, t, Provenance::RotatedPetz)
}

fn rotated_petz_tagged(
    sigma: &CMat,
    n: &QuantumMap,
    t: f64,
    tag: Provenance,
) -> Result<RecoveryMap> {
    if !n.is_trace_preserving() {
        return Err(Error::InvalidChannel(
            "Petz recovery requires a trace-preserving map".into(),
        ));
    }
    if sigma.nrows() != n.in_dim() {
        return Err(Error::Shape(format!(
            "sigma dim {} does not match channel input {}",
            sigma.nrows(),
            n.in_dim()
        )));
    }
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "rotation parameter must be finite, got {t}"
        )));
    }
    let s_eig = herm_eig(sigma)?;
    let n_sigma = n.apply(sigma)?;
    let ns_eig = herm_eig(&n_sigma)?;

    // left = sigma^{it} sigma^{1/2}, right = N(sigma)^{-1/2} N(sigma)^{-it}
    let left = power_on_support_eig(&s_eig, Complexish::half_plus_it(t))?;
    let right = power_on_support_eig(&ns_eig, Complexish::neg_half_minus_it(t))?;

    let kraus = n
        .kraus()
        .iter()
        .map(|k| &left * k.adjoint() * &right)
        .collect();
    Ok(RecoveryMap::new(QuantumMap::from_kraus(kraus)?, t, tag))
}

// small helper so the exponents read clearly at the call sites
struct Complexish;
impl Complexish {
    fn half_plus_it(t: f64) -> crate::numerics::Complex64 {
        re(0.5) + im(t)
    }
    fn neg_half_minus_it(t: f64) -> crate::numerics::Complex64 {
        re(-0.5) - im(t)
    }
}

/// The unitary-on-the-support rotation X -> w^{it} X w^{-it} as a map.
pub fn rotation(omega: &CMat, t: f64) -> Result<QuantumMap> {
    let u = power_on_support(omega, im(t))?;
    QuantumMap::from_kraus(vec![u])
}

/// Recovery of subsystem A from C alone, relative to the joint marginal
/// rho_AC: Kraus G_j = rho_AC^{it} rho_AC^{1/2} (|j>_A (x) rho_C^{-1/2}
/// rho_C^{-it}). Coincides with the rotated Petz map of Tr_A for sigma =
/// rho_AC; satisfies R(rho_C) = rho_AC exactly for every t.
pub fn cmi_recovery(rho_ac: &CMat, dims: &(usize, usize), t: f64) -> Result<RecoveryMap> {
    let (da, dc) = *dims;
    if rho_ac.nrows() != da * dc {
        return Err(Error::Shape(format!(
            "operator dim {} does not match {} x {}",
            rho_ac.nrows(),
            da,
            dc
        )));
    }
    let ac_eig = herm_eig(rho_ac)?;
    let rho_c = crate::numerics::partial_trace(rho_ac, &[da, dc], &[0])?;
    let c_eig = herm_eig(&rho_c)?;

    let left = power_on_support_eig(&ac_eig, Complexish::half_plus_it(t))?;
    let right = power_on_support_eig(&c_eig, Complexish::neg_half_minus_it(t))?;

    let mut kraus = Vec::with_capacity(da);
    for j in 0..da {
        let mut basis = CMat::zeros(da, 1);
        basis[(j, 0)] = re(1.0);
        kraus.push(&left * kron(&basis, &right));
    }
    Ok(RecoveryMap::new(
        QuantumMap::from_kraus(kraus)?,
        t,
        Provenance::Cmi,
    ))
}

/// Sequential recovery of A_2, ..., A_l from (A_1, C): the composition of the
/// per-subsystem conditional recoveries, each acting on C and tensored with
/// the identity on everything already present. `dims` lists
/// (A_1, ..., A_l, C); the result maps A_1 C to A_1 ... A_l C.
pub fn sequential_recovery(rho: &CMat, dims: &[usize], t: f64) -> Result<RecoveryMap> {
    let n = dims.len();
    if n < 3 {
        return Err(Error::InvalidParameter(
            "sequential recovery needs at least two parts plus C".into(),
        ));
    }
    let l = n - 1;
    let dc = dims[l];
    let total: usize = dims.iter().product();
    if rho.nrows() != total {
        return Err(Error::Shape(format!(
            "state dim {} does not match subsystem dims",
            rho.nrows()
        )));
    }
    let mut map = QuantumMap::identity_channel(dims[0] * dc);
    let mut prefix_dim = dims[0];
    for i in 1..l {
        let traced: Vec<usize> = (0..l).filter(|&j| j != i).collect();
        let marg = crate::numerics::partial_trace(rho, dims, &traced)?;
        let step = cmi_recovery(&marg, &(dims[i], dc), t)?;
        let lifted = QuantumMap::identity_channel(prefix_dim).tensor(step.map());
        map = lifted.after(&map)?;
        prefix_dim *= dims[i];
    }
    Ok(RecoveryMap::new(map, t, Provenance::Sequential))
}

/// Measure-and-prepare map built from a state and a rank-one measurement:
/// K_x = rho^{1/2} |phi_x><phi_x| / sqrt(<phi_x|rho|phi_x>), with outcomes of
/// negligible weight dropped.
pub fn eb_map(rho: &CMat, m: &RankOneMeasurement) -> Result<QuantumMap> {
    if rho.nrows() != m.dim() {
        return Err(Error::Shape(format!(
            "state dim {} does not match measurement dim {}",
            rho.nrows(),
            m.dim()
        )));
    }
    let r_half = power_on_support(rho, re(0.5))?;
    let scale = herm_spectral_norm(rho)?;
    let cut = rank_cutoff(rho.nrows(), scale);
    let mut kraus = Vec::new();
    for v in m.vectors() {
        let p = (v.adjoint() * rho * v)[(0, 0)].re;
        if p > cut {
            let col = &r_half * v;
            kraus.push(col * v.adjoint().map(|z| z / re(p.sqrt())));
        }
    }
    if kraus.is_empty() {
        return Err(Error::InvalidState(
            "state has no weight on any measurement outcome".into(),
        ));
    }
    QuantumMap::from_kraus(kraus)
}

/// Pretty-good measurement of an ensemble, rotated by t: the channel
/// X -> sum_x Tr{ sbar^{1/2+it} sbar^{-1/2} p_x s_x sbar^{-1/2} sbar^{-it}
/// ... } |x><x| realized with rank-one Kraus pieces per POVM element. The
/// POVM elements sum to the projector onto the support of the average state.
pub fn pgm(e: &Ensemble, t: f64) -> Result<QuantumMap> {
    let sbar = e.average();
    let sbar_eig = herm_eig(&sbar)?;
    let s_mhalf = power_on_support_eig(&sbar_eig, re(-0.5))?;
    let s_mit = power_on_support_eig(&sbar_eig, -im(t))?;
    let d = e.member_dim();
    let outcomes = e.len();
    let cutoff_scale = sbar_eig.lambda_max_abs();

    let mut kraus = Vec::new();
    for (x, (p, s_x)) in e.probs().iter().zip(e.members()).enumerate() {
        let m_x = &s_mhalf * s_x.map(|z| z * re(*p)) * &s_mhalf;
        let eig = herm_eig(&m_x)?;
        let cut = rank_cutoff(d, cutoff_scale.max(eig.lambda_max_abs()) * 1e-4);
        for (idx, &lam) in eig.values.iter().enumerate() {
            if lam > cut {
                let vk = eig.vectors.column(idx).into_owned();
                let mut flag = CMat::zeros(outcomes, 1);
                flag[(x, 0)] = re(1.0);
                let row = (vk.adjoint() * &s_mit).map(|z| z * re(lam.sqrt()));
                kraus.push(&flag * row);
            }
        }
    }
    if kraus.is_empty() {
        return Err(Error::InvalidMeasurement(
            "pretty-good measurement has no nonzero elements".into(),
        ));
    }
    QuantumMap::from_kraus(kraus)
}
