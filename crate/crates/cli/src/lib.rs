//! Persistence and report machinery for the command-line front end:
//! the canonical JSON object schema, build traces, and content hashing.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thetatilt_core::builder::BuildTrace;
use thetatilt_core::lattice::QvMatrix;
use thetatilt_core::rootdata::{RootSystem, RootSystemSpec};
use thetatilt_core::{Error, GradedObject, PrimeConfig, Result, RingFrac, Weight};

/// Schema version 1 of an object file.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct ObjectFile {
    pub ring: RingSection,
    pub root: RootSection,
    pub weights: Vec<WeightEntry>,
    pub ops: Vec<OpEntry>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct RingSection {
    pub p: u64,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(untagged)]
pub enum RootSection {
    Label(String),
    Cartan { cartan: Vec<Vec<i64>> },
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct WeightEntry {
    pub coords: Vec<i64>,
    pub rank: usize,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct OpEntry {
    pub kind: String,
    pub mu: Vec<i64>,
    pub alpha: usize,
    pub n: u32,
    pub matrix: Vec<Vec<String>>,
}

impl ObjectFile {
    /// Canonical serialization of an object: weights sorted by coordinates,
    /// ops sorted by (kind, mu, alpha, n), fraction strings in the canonical
    /// text form.
    pub fn from_object(obj: &GradedObject) -> Self {
        let root = match obj.rs().label() {
            "custom" => RootSection::Cartan { cartan: obj.rs().cartan().clone() },
            label => RootSection::Label(label.to_string()),
        };
        let weights = obj
            .weights()
            .map(|(w, r)| WeightEntry { coords: w.coords().to_vec(), rank: r })
            .collect();
        let mut ops: Vec<OpEntry> = Vec::new();
        for (kind, entries) in [
            ("E", obj.e_entries().collect::<Vec<_>>()),
            ("F", obj.f_entries().collect::<Vec<_>>()),
        ] {
            for ((mu, alpha, n), m) in entries {
                let matrix = (0..m.rows())
                    .map(|i| (0..m.cols()).map(|j| m[(i, j)].canonical_string()).collect())
                    .collect();
                ops.push(OpEntry {
                    kind: kind.to_string(),
                    mu: mu.coords().to_vec(),
                    alpha: *alpha,
                    n: *n,
                    matrix,
                });
            }
        }
        ops.sort_by(|a, b| (&a.kind, &a.mu, a.alpha, a.n).cmp(&(&b.kind, &b.mu, b.alpha, b.n)));
        ObjectFile { ring: RingSection { p: obj.cfg().p() }, root, weights, ops }
    }

    /// Reconstructs and validates the in-memory object.
    pub fn into_object(self) -> Result<GradedObject> {
        let rs = match &self.root {
            RootSection::Label(l) => RootSystem::new(RootSystemSpec::Label(l.clone()))?,
            RootSection::Cartan { cartan } => {
                RootSystem::new(RootSystemSpec::Cartan(cartan.clone()))?
            }
        };
        let cfg = PrimeConfig::new(self.ring.p, rs.has_g2_component())?;
        let mut obj = GradedObject::new_empty(rs, cfg)?;
        for w in &self.weights {
            if w.rank == 0 {
                return Err(Error::MalformedObject("zero rank entry".into()));
            }
            obj.set_rank(Weight(w.coords.clone()), w.rank);
        }
        for op in &self.ops {
            let mu = Weight(op.mu.clone());
            let rows = op.matrix.len();
            let cols = op.matrix.first().map(|r| r.len()).unwrap_or(0);
            if op.matrix.iter().any(|r| r.len() != cols) {
                return Err(Error::MalformedObject("ragged matrix".into()));
            }
            let mut m = QvMatrix::zero(rows, cols);
            for (i, row) in op.matrix.iter().enumerate() {
                for (j, s) in row.iter().enumerate() {
                    let x = RingFrac::parse_canonical(s).ok_or_else(|| {
                        Error::MalformedObject(format!("bad fraction string '{s}'"))
                    })?;
                    m[(i, j)] = x;
                }
            }
            match op.kind.as_str() {
                "E" => obj.set_e_op(mu, op.alpha, op.n, m),
                "F" => obj.set_f_op(mu, op.alpha, op.n, m),
                other => {
                    return Err(Error::MalformedObject(format!("unknown op kind '{other}'")))
                }
            }
        }
        obj.validate()?;
        Ok(obj)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::MalformedObject(e.to_string()))
    }

    /// Content address: SHA-256 of the canonical serialization.
    pub fn sha256(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.to_json().as_bytes());
        hex_string(&h.finalize())
    }
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Serializable form of the build trace.
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct TraceFile {
    pub lambda: Vec<i64>,
    pub theta_levels: Vec<u32>,
    pub bound: u32,
    pub total_rank: usize,
    pub object_sha256: String,
    pub weights: Vec<TraceWeight>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct TraceWeight {
    pub mu: Vec<i64>,
    pub hat_dim: usize,
    pub hat_kernel_rank: usize,
    pub soft_rank: usize,
    pub rank_d: usize,
}

impl TraceFile {
    pub fn new(trace: &BuildTrace, object_sha256: String) -> Self {
        TraceFile {
            lambda: trace.lambda.coords().to_vec(),
            theta_levels: trace.theta_levels.clone(),
            bound: trace.bound,
            total_rank: trace.total_rank(),
            object_sha256,
            weights: trace
                .weights
                .iter()
                .map(|w| TraceWeight {
                    mu: w.mu.coords().to_vec(),
                    hat_dim: w.hat_dim,
                    hat_kernel_rank: w.hat_kernel_rank,
                    soft_rank: w.soft_rank,
                    rank_d: w.rank_d,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serialization cannot fail")
    }
}

/// Writes atomically: temp file in the same directory, then rename.
pub fn atomic_write(path: &std::path::Path, contents: &str) -> std::io::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty());
    if let Some(d) = dir {
        std::fs::create_dir_all(d)?;
    }
    let tmp = path.with_extension(format!("tmp-{}", std::process::id()));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Report structure emitted by `verify`.
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct VerifyReport {
    pub x1: String,
    pub x2: String,
    pub x3: String,
    pub theta_standard: String,
    pub pass: bool,
}

/// Character table line: weights by descending order with ranks, plus the
/// Weyl multiplicity decomposition.
pub fn character_line(obj: &GradedObject) -> Result<String> {
    let ch = obj.character();
    let mut parts: Vec<String> = Vec::new();
    for (w, m) in ch.mults.iter().rev() {
        parts.push(format!("{}:{}", format_weight(w), m));
    }
    let mults = thetatilt_core::analysis::weyl_multiplicities(&ch, obj.rs())?;
    let weyl: Vec<String> = mults
        .iter()
        .rev()
        .map(|(w, k)| {
            if *k == 1 {
                format!("Δ({})", format_weight(w))
            } else {
                format!("{k}×Δ({})", format_weight(w))
            }
        })
        .collect();
    let left = if parts.is_empty() { "(zero object)".to_string() } else { parts.join(" ") };
    let right = if weyl.is_empty() { "0".to_string() } else { weyl.join("+") };
    Ok(format!("{left} | Weyl: {right}"))
}

pub fn format_weight(w: &Weight) -> String {
    if w.coords().len() == 1 {
        format!("{}", w.coords()[0])
    } else {
        format!(
            "[{}]",
            w.coords().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
        )
    }
}

/// Key for the build cache: hash of the canonical configuration.
#[derive(Serialize)]
pub struct BuildKey<'a> {
    pub root: &'a RootSection,
    pub p: u64,
    pub lambda: &'a [i64],
    pub theta: &'a str,
    pub tau0: bool,
    pub max_level: Option<u32>,
}

impl BuildKey<'_> {
    pub fn sha256(&self) -> String {
        let mut h = Sha256::new();
        h.update(serde_json::to_string(self).unwrap().as_bytes());
        hex_string(&h.finalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use thetatilt_core::builder::{build_s_theta, ThetaSpec};

    #[test]
    fn round_trip_is_identity() {
        let rs = RootSystem::new(RootSystemSpec::Label("A1".into())).unwrap();
        let cfg = PrimeConfig::new(3, false).unwrap();
        let (obj, _) =
            build_s_theta(&rs, &cfg, &Weight(vec![3]), &ThetaSpec::finite([1])).unwrap();
        let file = ObjectFile::from_object(&obj);
        let json = file.to_json();
        let parsed = ObjectFile::from_json(&json).unwrap();
        assert_eq!(parsed, file);
        assert_eq!(parsed.to_json(), json);
        let obj2 = parsed.into_object().unwrap();
        assert_eq!(obj2.character(), obj.character());
        // Bit-exact re-serialization of the reconstructed object.
        assert_eq!(ObjectFile::from_object(&obj2).to_json(), json);
    }

    #[test]
    fn character_line_format() {
        let rs = RootSystem::new(RootSystemSpec::Label("A1".into())).unwrap();
        let cfg = PrimeConfig::new(3, false).unwrap();
        let (obj, _) =
            build_s_theta(&rs, &cfg, &Weight(vec![3]), &ThetaSpec::finite([1])).unwrap();
        let line = character_line(&obj).unwrap();
        assert_eq!(line, "3:1 1:2 -1:2 -3:1 | Weyl: Δ(3)+Δ(1)");
    }

    #[test]
    fn malformed_files_rejected() {
        assert!(ObjectFile::from_json("{").is_err());
        let bad = r#"{"ring":{"p":4},"root":"A1","weights":[],"ops":[]}"#;
        let f = ObjectFile::from_json(bad).unwrap();
        assert!(f.into_object().is_err());
        let bad_frac = r#"{"ring":{"p":3},"root":"A1","weights":[{"coords":[1],"rank":1},{"coords":[3],"rank":1}],"ops":[{"kind":"E","mu":[1],"alpha":0,"n":1,"matrix":[["nonsense"]]}]}"#;
        let f = ObjectFile::from_json(bad_frac).unwrap();
        assert!(f.into_object().is_err());
    }
}
