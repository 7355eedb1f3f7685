//! JSON point descriptors: the inputs needed to rebuild a point, plus the
//! derived schedule data for readers.

use serde::{Deserialize, Serialize};

use crate::construct::{bounded_block_point, intermediate_scaling_point, joint_spectrum_point, ConstructedPoint, PointMeta};
use crate::error::{Error, Result};
use crate::seqcore::{alternation_decode, AlternationCode, BinaryWord, SymbolSource};

pub const FORMAT: &str = "tmlab-point";
pub const VERSION: u32 = 1;
/// Longest prefix a descriptor may carry or a reconstruction may scan.
pub const MAX_PREFIX: usize = 1 << 34;
const MAX_DESCRIPTOR_BYTES: usize = 1 << 26;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PointSpec {
    Joint { alpha: f64, beta: f64, lambda: u64, seed: u64 },
    Intermediate { gamma: f64, alpha: f64, lambda: u64, seed: u64 },
    Bounded { lambda: u64, seed: u64 },
    /// `n_i = base^i`, `i = 1..=count`.
    Geometric { base: u64, count: usize },
    Explicit {
        blocks: Vec<u64>,
        #[serde(default)]
        first_symbol: u8,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Descriptor {
    pub format: String,
    pub version: u32,
    #[serde(flatten)]
    pub point: PointSpec,
    /// Schedule data recomputed on construction; ignored on input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derived: Option<PointMeta>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prefix: Option<String>,
}

/// A realized descriptor.
pub enum Point {
    Constructed(ConstructedPoint),
    Code { code: AlternationCode, first_symbol: u8 },
}

impl Descriptor {
    pub fn new(point: PointSpec) -> Self {
        Descriptor {
            format: FORMAT.into(),
            version: VERSION,
            point,
            derived: None,
            prefix: None,
        }
    }

    /// Builds the point, records its derived data and optionally the
    /// first `prefix_len` symbols.
    pub fn constructed(point: PointSpec, prefix_len: Option<usize>) -> Result<(Descriptor, Point)> {
        let mut d = Descriptor::new(point);
        let p = d.realize()?;
        if let Point::Constructed(c) = &p {
            d.derived = Some(c.meta.clone());
        }
        if let Some(len) = prefix_len {
            d.prefix = Some(p.prefix(len)?.to_string());
        }
        Ok((d, p))
    }

    pub fn from_json(s: &str) -> Result<Descriptor> {
        if s.len() > MAX_DESCRIPTOR_BYTES {
            return Err(Error::Parse("descriptor too large".into()));
        }
        let d: Descriptor = serde_json::from_str(s).map_err(|e| Error::Parse(format!("descriptor: {e}")))?;
        if d.format != FORMAT {
            return Err(Error::Parse(format!("unknown descriptor format '{}'", d.format)));
        }
        if d.version != VERSION {
            return Err(Error::Parse(format!("unsupported descriptor version {}", d.version)));
        }
        d.validate()?;
        Ok(d)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("descriptors serialize")
    }

    /// Parameter checks that need no construction.
    fn validate(&self) -> Result<()> {
        match &self.point {
            PointSpec::Joint { alpha, beta, .. } => finite(&[*alpha, *beta]),
            PointSpec::Intermediate { gamma, alpha, .. } => finite(&[*gamma, *alpha]),
            PointSpec::Bounded { .. } => Ok(()),
            PointSpec::Geometric { base, count } => {
                if *base == 0 || *count == 0 {
                    return Err(Error::Parse("geometric codes need base >= 1 and count >= 1".into()));
                }
                Ok(())
            }
            PointSpec::Explicit { blocks, first_symbol } => {
                if *first_symbol > 1 {
                    return Err(Error::Parse("first_symbol must be 0 or 1".into()));
                }
                if blocks.is_empty() || blocks.contains(&0) {
                    return Err(Error::Parse("explicit codes need positive blocks".into()));
                }
                Ok(())
            }
        }?;
        if let Some(p) = &self.prefix {
            if p.len() > MAX_PREFIX || p.bytes().any(|b| b != b'0' && b != b'1') {
                return Err(Error::Parse("prefix must be a string of 0s and 1s".into()));
            }
        }
        Ok(())
    }

    pub fn realize(&self) -> Result<Point> {
        Ok(match self.point {
            PointSpec::Joint {
                alpha,
                beta,
                lambda,
                seed,
            } => Point::Constructed(joint_spectrum_point(alpha, beta, lambda, seed)?),
            PointSpec::Intermediate {
                gamma,
                alpha,
                lambda,
                seed,
            } => Point::Constructed(intermediate_scaling_point(gamma, alpha, lambda, seed)?),
            PointSpec::Bounded { lambda, seed } => Point::Constructed(bounded_block_point(lambda, seed)?),
            PointSpec::Geometric { base, count } => Point::Code {
                code: AlternationCode::geometric(base, count)?,
                first_symbol: 0,
            },
            PointSpec::Explicit {
                ref blocks,
                first_symbol,
            } => Point::Code {
                code: AlternationCode::from_blocks(blocks.clone())?,
                first_symbol,
            },
        })
    }

    pub fn seed(&self) -> Option<u64> {
        match self.point {
            PointSpec::Joint { seed, .. } | PointSpec::Intermediate { seed, .. } | PointSpec::Bounded { seed, .. } => {
                Some(seed)
            }
            _ => None,
        }
    }
}

fn finite(v: &[f64]) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Parse("parameters must be finite numbers".into()))
    }
}

impl Point {
    /// A code whose total length reaches `n`.
    pub fn code_covering(&self, n: u128) -> Result<AlternationCode> {
        match self {
            Point::Code { code, .. } => {
                if code.total_length() < n {
                    return Err(Error::OutOfRange {
                        what: "code length",
                        requested: n,
                        available: code.total_length(),
                    });
                }
                Ok(code.clone())
            }
            Point::Constructed(p) => scan(p, |c| c.total_length() >= n),
        }
    }

    /// A code with at least `m` blocks.
    pub fn code_with_blocks(&self, m: usize) -> Result<AlternationCode> {
        match self {
            Point::Code { code, .. } => {
                if code.len() < m {
                    return Err(Error::OutOfRange {
                        what: "block index",
                        requested: m as u128,
                        available: code.len() as u128,
                    });
                }
                Ok(code.truncated(m))
            }
            Point::Constructed(p) => Ok(scan(p, |c| c.len() >= m)?.truncated(m)),
        }
    }

    pub fn prefix(&self, len: usize) -> Result<BinaryWord> {
        match self {
            Point::Constructed(p) => {
                if len > MAX_PREFIX {
                    return Err(Error::Infeasible(format!("prefix of {len} symbols requested")));
                }
                Ok(p.prefix(len))
            }
            Point::Code { code, first_symbol } => {
                if code.total_length() < len as u128 {
                    return Err(Error::OutOfRange {
                        what: "prefix length",
                        requested: len as u128,
                        available: code.total_length(),
                    });
                }
                let w = alternation_decode(&code.truncated(code.locate(len as u128).unwrap_or(code.len()) + 1), *first_symbol)?;
                Ok(BinaryWord::new(w.bits()[..len].to_vec())?)
            }
        }
    }
}

fn scan(p: &ConstructedPoint, done: impl Fn(&AlternationCode) -> bool) -> Result<AlternationCode> {
    let mut len = 1usize << 12;
    loop {
        let c = p.prefix_code(len)?;
        if done(&c) {
            return Ok(c);
        }
        if len >= MAX_PREFIX {
            return Err(Error::Infeasible(format!(
                "the schedule does not reach the requested horizon within {MAX_PREFIX} symbols"
            )));
        }
        len *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let (d, _) = Descriptor::constructed(
            PointSpec::Joint {
                alpha: 0.25,
                beta: 0.5,
                lambda: 64,
                seed: 3,
            },
            Some(40),
        )
        .unwrap();
        let s = d.to_json();
        let back = Descriptor::from_json(&s).unwrap();
        assert_eq!(back, d);
        assert_eq!(back.to_json(), s);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["kind"], "joint");
        assert!((v["derived"]["ell"].as_f64().unwrap() - 0.41421).abs() < 1e-5);
        assert!((v["derived"]["m"].as_f64().unwrap() - 3.14626).abs() < 1e-5);
    }

    #[test]
    fn intermediate_fields() {
        let (d, _) = Descriptor::constructed(
            PointSpec::Intermediate {
                gamma: 1.5,
                alpha: 1.0,
                lambda: 16,
                seed: 0,
            },
            None,
        )
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&d.to_json()).unwrap();
        assert_eq!(v["derived"]["r"], 3);
        assert_eq!(v["derived"]["delta"], 1.75);
    }

    #[test]
    fn rejects_bad_descriptors() {
        for s in [
            "",
            "{}",
            r#"{"format":"tmlab-point","version":2,"kind":"bounded","lambda":4,"seed":1}"#,
            r#"{"format":"other","version":1,"kind":"bounded","lambda":4,"seed":1}"#,
            r#"{"format":"tmlab-point","version":1,"kind":"explicit","blocks":[1,0]}"#,
            r#"{"format":"tmlab-point","version":1,"kind":"explicit","blocks":[1],"first_symbol":2}"#,
            r#"{"format":"tmlab-point","version":1,"kind":"geometric","base":2,"count":0}"#,
            r#"{"format":"tmlab-point","version":1,"kind":"bounded","lambda":4,"seed":1,"prefix":"012"}"#,
            r#"{"format":"tmlab-point","version":1,"kind":"spiral"}"#,
        ] {
            assert!(Descriptor::from_json(s).is_err(), "{s}");
        }
        let infeasible =
            Descriptor::from_json(r#"{"format":"tmlab-point","version":1,"kind":"joint","alpha":0.6,"beta":0.5,"lambda":64,"seed":1}"#)
                .unwrap();
        assert!(matches!(infeasible.realize(), Err(Error::Infeasible(_))));
    }

    #[test]
    fn explicit_prefix_and_coverage() {
        let d = Descriptor::from_json(r#"{"format":"tmlab-point","version":1,"kind":"explicit","blocks":[2,2,1,1],"first_symbol":1}"#)
            .unwrap();
        let p = d.realize().unwrap();
        assert_eq!(p.prefix(5).unwrap().to_string(), "11001");
        assert_eq!(p.prefix(6).unwrap().to_string(), "110010");
        assert!(p.prefix(7).is_err());
        assert!(p.code_covering(7).is_err());
        let g = Descriptor::new(PointSpec::Geometric { base: 2, count: 10 }).realize().unwrap();
        assert_eq!(g.code_with_blocks(4).unwrap().blocks(), &[2, 4, 8, 16]);
    }

    #[test]
    fn constructed_coverage() {
        let d = Descriptor::new(PointSpec::Bounded { lambda: 4, seed: 8 });
        let p = d.realize().unwrap();
        let c = p.code_covering(100_000).unwrap();
        assert!(c.total_length() >= 100_000);
        assert_eq!(p.code_with_blocks(500).unwrap().len(), 500);
    }
}
