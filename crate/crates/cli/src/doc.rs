//! The NetDocument JSON format.
//!
//! Complex numbers are `[re, im]` pairs, quaternions `[w, x, y, z]`, and Q⁴ points the
//! 12 reals of their six Plücker coordinates. Values are stored normalized, so a
//! document survives a parse/serialize round trip bit for bit.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use twistor_core::contact::NullLine;
use twistor_core::nets::LatticeNet;
use twistor_core::proj4::{Bivector, CVector4, ProjPlane};
use twistor_core::quat::Quaternion;

use crate::CliError;

/// Current version of the document schema.
pub const SCHEMA_VERSION: u32 = 1;

/// What each lattice entry holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    /// Points of CP¹.
    Cp1,
    /// Points of HP¹, stored as a pair of quaternions.
    Hp1,
    /// Points of the Plücker quadric Q⁴ (two-spheres or points of S⁴).
    Q4,
    /// Principal contact elements over an HP¹ net.
    Pcen,
}

impl Kind {
    /// Number of complex homogeneous coordinates of the underlying lattice values.
    pub fn width(self) -> usize {
        match self {
            Kind::Cp1 => 2,
            Kind::Hp1 | Kind::Pcen => 4,
            Kind::Q4 => 6,
        }
    }
}

/// Optional annotations carried along with a net.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    /// Cross-ratio the net was built with.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<[f64; 2]>,
    /// The fixed sphere S of a Q²_S net.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sphere: Option<[f64; 12]>,
    /// Tolerance used when the document was produced.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Evolution mode that produced the net.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
}

impl Metadata {
    pub fn lambda(&self) -> Option<Complex64> {
        self.lambda.map(|[re, im]| Complex64::new(re, im))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    schema_version: u32,
    kind: Kind,
    dim: usize,
    lo: Vec<i64>,
    hi: Vec<i64>,
    entries: Vec<RawEntry>,
    #[serde(default)]
    metadata: Metadata,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    index: Vec<i64>,
    value: Value,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawElement {
    base: [[f64; 4]; 2],
    point: [[f64; 2]; 4],
    plane: [[[f64; 2]; 4]; 3],
    normal: [[f64; 2]; 4],
}

/// A lattice net together with its value kind and metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct NetDocument {
    pub kind: Kind,
    /// The lattice values; for PCEN documents these are the base points.
    pub net: LatticeNet,
    /// Contact elements, present only for PCEN documents.
    pub elements: BTreeMap<Vec<i64>, NullLine>,
    pub metadata: Metadata,
}

impl NetDocument {
    pub fn new(kind: Kind, net: LatticeNet, metadata: Metadata) -> Self {
        NetDocument {
            kind,
            net,
            elements: BTreeMap::new(),
            metadata,
        }
    }

    /// Parses a document and checks that its entries cover the declared box.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let doc = Self::from_json_partial(text)?;
        if let Some(idx) = doc
            .net
            .box_points()
            .into_iter()
            .find(|i| doc.net.get(i).is_err())
        {
            return Err(CliError::Usage(format!(
                "entries: no value for index {idx:?} of the declared box"
            )));
        }
        Ok(doc)
    }

    /// Parses a document whose entries may leave holes in the box.
    pub fn from_json_partial(text: &str) -> Result<Self, CliError> {
        let raw: RawDocument = serde_json::from_str(text)
            .map_err(|e| CliError::Usage(format!("malformed document: {e}")))?;
        if raw.schema_version != SCHEMA_VERSION {
            return Err(CliError::Usage(format!(
                "schema_version: expected {SCHEMA_VERSION}, found {}",
                raw.schema_version
            )));
        }
        let mut net = LatticeNet::new(raw.dim, raw.kind.width(), raw.lo, raw.hi)
            .map_err(|e| CliError::Usage(format!("dim/lo/hi: {e}")))?;
        let mut elements = BTreeMap::new();
        for (n, entry) in raw.entries.into_iter().enumerate() {
            let field = |e: String| CliError::Usage(format!("entries[{n}].value: {e}"));
            let value = match raw.kind {
                Kind::Cp1 => {
                    let v: [[f64; 2]; 2] =
                        serde_json::from_value(entry.value).map_err(|e| field(e.to_string()))?;
                    decode_complexes(v.as_flattened())
                }
                Kind::Hp1 => {
                    let v: [[f64; 4]; 2] =
                        serde_json::from_value(entry.value).map_err(|e| field(e.to_string()))?;
                    decode_hp1(&v).c.to_vec()
                }
                Kind::Q4 => {
                    let v: [f64; 12] =
                        serde_json::from_value(entry.value).map_err(|e| field(e.to_string()))?;
                    decode_complexes(&v)
                }
                Kind::Pcen => {
                    let v: RawElement =
                        serde_json::from_value(entry.value).map_err(|e| field(e.to_string()))?;
                    let vec4 = |c: &[[f64; 2]; 4]| {
                        CVector4::from_slice(&decode_complexes(c.as_flattened()))
                    };
                    let plane = ProjPlane {
                        basis: [vec4(&v.plane[0]), vec4(&v.plane[1]), vec4(&v.plane[2])],
                        normal: vec4(&v.normal),
                    };
                    elements.insert(
                        entry.index.clone(),
                        NullLine {
                            point: vec4(&v.point),
                            plane,
                        },
                    );
                    decode_hp1(&v.base).c.to_vec()
                }
            };
            if value
                .iter()
                .any(|c| !(c.re.is_finite() && c.im.is_finite()))
            {
                return Err(field("non-finite coordinate".into()));
            }
            if net.get(&entry.index).is_ok() {
                return Err(CliError::Usage(format!(
                    "entries[{n}].index: duplicate index {:?}",
                    entry.index
                )));
            }
            net.insert(entry.index.clone(), &value)
                .map_err(|e| CliError::Usage(format!("entries[{n}]: {e}")))?;
        }
        Ok(NetDocument {
            kind: raw.kind,
            net,
            elements,
            metadata: raw.metadata,
        })
    }

    /// Pretty-printed JSON with entries in lexicographic index order.
    pub fn to_json(&self) -> String {
        let entries = self
            .net
            .iter()
            .map(|(idx, v)| {
                let value = match self.kind {
                    Kind::Cp1 => serde_json::to_value(encode_complexes(v)),
                    Kind::Hp1 => serde_json::to_value(encode_hp1(v)),
                    Kind::Q4 => serde_json::to_value(
                        v.iter().flat_map(|c| [c.re, c.im]).collect::<Vec<f64>>(),
                    ),
                    Kind::Pcen => {
                        let l = &self.elements[idx];
                        let vec4 = |x: &CVector4| -> [[f64; 2]; 4] { x.c.map(|c| [c.re, c.im]) };
                        serde_json::to_value(RawElement {
                            base: encode_hp1(v),
                            point: vec4(&l.point),
                            plane: l.plane.basis.each_ref().map(vec4),
                            normal: vec4(&l.plane.normal),
                        })
                    }
                }
                .expect("plain arrays always serialize");
                RawEntry {
                    index: idx.clone(),
                    value,
                }
            })
            .collect();
        let raw = RawDocument {
            schema_version: SCHEMA_VERSION,
            kind: self.kind,
            dim: self.net.dim,
            lo: self.net.lo.clone(),
            hi: self.net.hi.clone(),
            entries,
            metadata: self.metadata.clone(),
        };
        let mut s = serde_json::to_string_pretty(&raw).expect("document always serializes");
        s.push('\n');
        s
    }
}

fn decode_complexes(v: &[f64]) -> Vec<Complex64> {
    v.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect()
}

fn encode_complexes(v: &[Complex64]) -> Vec<[f64; 2]> {
    v.iter().map(|c| [c.re, c.im]).collect()
}

fn decode_hp1(v: &[[f64; 4]; 2]) -> CVector4 {
    CVector4::from_quats(Quaternion::from_array(v[0]), Quaternion::from_array(v[1]))
}

fn encode_hp1(v: &[Complex64]) -> [[f64; 4]; 2] {
    let (a, b) = CVector4::from_slice(v).to_quats();
    [a.to_array(), b.to_array()]
}

/// Encodes a bivector as 12 reals for the metadata.
pub fn bivector_reals(b: &Bivector) -> [f64; 12] {
    let mut out = [0.0; 12];
    for (k, c) in b.p.iter().enumerate() {
        out[2 * k] = c.re;
        out[2 * k + 1] = c.im;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use twistor_core::contact::contact_element_at;
    use twistor_core::proj4::wedge;
    use twistor_core::twistor::HPoint;
    use twistor_core::xratio::Cp1;

    fn rc(rng: &mut ChaCha8Rng) -> Complex64 {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }

    fn random_doc(kind: Kind, seed: u64) -> NetDocument {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut net = LatticeNet::new(2, kind.width(), vec![-1, 0], vec![2, 3]).unwrap();
        let mut elements = BTreeMap::new();
        for idx in net.box_points() {
            let v: Vec<Complex64> = match kind {
                Kind::Q4 => {
                    let a = CVector4::new([0; 4].map(|_| rc(&mut rng)));
                    let b = CVector4::new([0; 4].map(|_| rc(&mut rng)));
                    wedge(&a, &b).p.to_vec()
                }
                _ => (0..kind.width()).map(|_| rc(&mut rng)).collect(),
            };
            if kind == Kind::Pcen {
                let p = HPoint::new(
                    Quaternion::from_pair(v[0], v[1]),
                    Quaternion::from_pair(v[2], v[3]),
                )
                .unwrap();
                let u = CVector4::new([0; 4].map(|_| rc(&mut rng)));
                elements.insert(
                    idx.clone(),
                    contact_element_at(&p, Cp1::finite(rc(&mut rng)), &u).unwrap(),
                );
            }
            net.insert(idx, &v).unwrap();
        }
        let metadata = Metadata {
            lambda: Some([rng.gen(), rng.gen()]),
            sphere: None,
            tol: Some(1e-8),
            mode: Some("complex".into()),
        };
        NetDocument {
            kind,
            net,
            elements,
            metadata,
        }
    }

    #[test]
    fn round_trip_is_exact() {
        for (s, kind) in [Kind::Cp1, Kind::Hp1, Kind::Q4, Kind::Pcen]
            .into_iter()
            .enumerate()
        {
            for seed in 0..20 {
                let doc = random_doc(kind, 100 * s as u64 + seed);
                let text = doc.to_json();
                let back = NetDocument::from_json(&text).unwrap();
                assert_eq!(back, doc, "{kind:?} seed {seed}");
                assert_eq!(back.to_json(), text);
            }
        }
    }

    #[test]
    fn diagnostics_name_the_field() {
        let mut v: Value = serde_json::from_str(&random_doc(Kind::Cp1, 1).to_json()).unwrap();
        v["entries"][3]["value"] = serde_json::json!([1.0, 2.0]);
        let err = NetDocument::from_json(&v.to_string()).unwrap_err();
        assert!(
            matches!(&err, CliError::Usage(m) if m.contains("entries[3].value")),
            "{err:?}"
        );
    }

    #[test]
    fn holes_are_rejected_unless_partial() {
        let mut v: Value = serde_json::from_str(&random_doc(Kind::Hp1, 2).to_json()).unwrap();
        v["entries"].as_array_mut().unwrap().pop();
        let text = v.to_string();
        assert!(NetDocument::from_json(&text).is_err());
        assert_eq!(NetDocument::from_json_partial(&text).unwrap().net.len(), 15);
    }

    #[test]
    fn schema_version_is_checked() {
        let mut v: Value = serde_json::from_str(&random_doc(Kind::Q4, 3).to_json()).unwrap();
        v["schema_version"] = serde_json::json!(7);
        assert!(
            matches!(NetDocument::from_json(&v.to_string()), Err(CliError::Usage(m)) if m.contains("schema_version"))
        );
    }
}
