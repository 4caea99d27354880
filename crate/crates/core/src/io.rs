//! JSON interchange for matrices, channels, recovery maps, and verification
//! instances, plus the deterministic number formatting used in CSV output.
//!
//! Matrix format: `{"rows": n, "cols": m, "re": [...], "im": [...]}` with
//! row-major entry order. Channel format: `{"in": d, "out": d2, "kraus":
//! [matrix, ...]}`. `Nats` serializes as an IEEE double, with the string
//! `"inf"` as the positive-infinity sentinel.

use std::path::Path;

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::entropy::Nats;
use crate::error::{Error, Result};
use crate::numerics::{CMat, Complex64};
use crate::quantum::QuantumMap;
use crate::recovery::RecoveryMap;
use crate::verify::{CaseAux, Instance};

impl Serialize for Nats {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.value())
        }
    }
}

impl<'de> Deserialize<'de> for Nats {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct NatsVisitor;

        impl Visitor<'_> for NatsVisitor {
            type Value = Nats;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a finite number or the string \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Nats, E> {
                if v.is_finite() {
                    Ok(Nats::finite(v))
                } else {
                    Err(E::custom("non-finite number; use the \"inf\" sentinel"))
                }
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Nats, E> {
                Ok(Nats::finite(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Nats, E> {
                Ok(Nats::finite(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Nats, E> {
                if v == "inf" {
                    Ok(Nats::INFINITY)
                } else {
                    Err(E::custom(format!("unknown sentinel {v:?}")))
                }
            }
        }

        d.deserialize_any(NatsVisitor)
    }
}

/// Dense complex matrix, row-major split into real and imaginary parts.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl MatrixJson {
    pub fn from_mat(m: &CMat) -> Self {
        let mut re = Vec::with_capacity(m.nrows() * m.ncols());
        let mut im = Vec::with_capacity(m.nrows() * m.ncols());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                re.push(m[(r, c)].re);
                im.push(m[(r, c)].im);
            }
        }
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            re,
            im,
        }
    }

    pub fn to_mat(&self) -> Result<CMat> {
        let n = self.rows * self.cols;
        if self.re.len() != n || self.im.len() != n {
            return Err(Error::Shape(format!(
                "matrix JSON claims {}x{} but carries {} + {}i entries",
                self.rows,
                self.cols,
                self.re.len(),
                self.im.len()
            )));
        }
        if self.re.iter().chain(&self.im).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "matrix JSON has non-finite entries".into(),
            ));
        }
        Ok(CMat::from_fn(self.rows, self.cols, |r, c| {
            let i = r * self.cols + c;
            Complex64::new(self.re[i], self.im[i])
        }))
    }
}

/// Channel as a Kraus list with declared dimensions.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChannelJson {
    #[serde(rename = "in")]
    pub in_dim: usize,
    pub out: usize,
    pub kraus: Vec<MatrixJson>,
}

impl ChannelJson {
    pub fn from_map(n: &QuantumMap) -> Self {
        Self {
            in_dim: n.in_dim(),
            out: n.out_dim(),
            kraus: n.kraus().iter().map(MatrixJson::from_mat).collect(),
        }
    }

    pub fn to_map(&self) -> Result<QuantumMap> {
        let kraus = self
            .kraus
            .iter()
            .map(|k| k.to_mat())
            .collect::<Result<Vec<_>>>()?;
        let map = QuantumMap::from_kraus(kraus)?;
        if map.in_dim() != self.in_dim || map.out_dim() != self.out {
            return Err(Error::Shape(format!(
                "channel JSON declares {} -> {} but Kraus operators are {} -> {}",
                self.in_dim,
                self.out,
                map.in_dim(),
                map.out_dim()
            )));
        }
        Ok(map)
    }
}

/// A recovery map with its construction metadata.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RecoveryJson {
    #[serde(flatten)]
    pub channel: ChannelJson,
    pub provenance: String,
    pub t: f64,
}

impl RecoveryJson {
    pub fn from_recovery(r: &RecoveryMap) -> Self {
        Self {
            channel: ChannelJson::from_map(r.map()),
            provenance: r.provenance().as_str().to_string(),
            t: r.t(),
        }
    }
}

/// A persisted verification instance. The case-specific audit structure is
/// not serialized; reloaded instances replay the generic bound checks.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceJson {
    pub case: String,
    pub interpretation: String,
    pub dims: Vec<usize>,
    pub rho: MatrixJson,
    pub sigma: MatrixJson,
    pub channel: ChannelJson,
}

impl InstanceJson {
    pub fn from_instance(inst: &Instance) -> Self {
        Self {
            case: inst.case.clone(),
            interpretation: inst.interpretation.clone(),
            dims: inst.dims.clone(),
            rho: MatrixJson::from_mat(&inst.rho),
            sigma: MatrixJson::from_mat(&inst.sigma),
            channel: ChannelJson::from_map(&inst.channel),
        }
    }

    pub fn to_instance(&self) -> Result<Instance> {
        let inst = Instance {
            case: self.case.clone(),
            interpretation: self.interpretation.clone(),
            rho: self.rho.to_mat()?,
            sigma: self.sigma.to_mat()?,
            channel: self.channel.to_map()?,
            dims: self.dims.clone(),
            aux: CaseAux::None,
        };
        inst.validate()?;
        Ok(inst)
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let bytes = std::fs::read(path)?;
    Ok(serde_json::from_slice(&bytes)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    std::fs::write(path, out)?;
    Ok(())
}

/// Deterministic, locale-independent formatting with 12 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x:.11e}")
    }
}

pub fn fmt_nats(x: Nats) -> String {
    if x.is_infinite() {
        "inf".into()
    } else {
        fmt_f64(x.value())
    }
}
