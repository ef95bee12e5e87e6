//! Census cache files: versioned JSON with decimal-string rationals and a
//! checksum over the entries.

use super::{CensusEntry, CosetSpec, Strategy, ValuationCensus};
use crate::error::{Error, Result};
use crate::pvs::SpaceId;
use crate::Rat;
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;
use std::str::FromStr;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct EntryJson {
    pub m: u32,
    pub num: String,
    pub den: String,
    pub exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci_num: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci_den: Option<String>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct CosetJson {
    pub center: Vec<i64>,
    pub level: u32,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct CensusFile {
    pub schema_version: u32,
    pub space: String,
    pub p: u64,
    pub n: u32,
    pub strategy: String,
    pub m_max: u32,
    pub entries: Vec<EntryJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coset: Option<CosetJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision_exhausted: Option<f64>,
    pub tool_version: String,
    pub sha256_of_entries: String,
}

fn entries_digest(entries: &[EntryJson]) -> String {
    let mut hasher = Sha256::new();
    for e in entries {
        let line = format!(
            "m={}:{}/{}:{}:{}:{};",
            e.m,
            e.num,
            e.den,
            if e.exact { 1 } else { 0 },
            e.ci_num.as_deref().unwrap_or("-"),
            e.ci_den.as_deref().unwrap_or("-"),
        );
        hasher.update(line.as_bytes());
    }
    let out = hasher.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

impl CensusFile {
    pub fn from_census(census: &ValuationCensus) -> Self {
        let entries: Vec<EntryJson> = census
            .entries
            .iter()
            .map(|e| EntryJson {
                m: e.m,
                num: e.c.numer().to_string(),
                den: e.c.denom().to_string(),
                exact: e.exact,
                ci_num: e.ci.as_ref().map(|r| r.numer().to_string()),
                ci_den: e.ci.as_ref().map(|r| r.denom().to_string()),
            })
            .collect();
        let sha = entries_digest(&entries);
        CensusFile {
            schema_version: SCHEMA_VERSION,
            space: census.space.as_str().to_string(),
            p: census.p,
            n: census.n as u32,
            strategy: census.strategy.as_str().to_string(),
            m_max: census.m_max,
            entries,
            seed: census.seed,
            coset: census.coset.as_ref().map(|c| CosetJson {
                center: c.center.clone(),
                level: c.level,
            }),
            precision_exhausted: census.precision_exhausted,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            sha256_of_entries: sha,
        }
    }

    pub fn to_census(&self) -> Result<ValuationCensus> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::UnsupportedSchema(self.schema_version));
        }
        if entries_digest(&self.entries) != self.sha256_of_entries {
            return Err(Error::ChecksumMismatch);
        }
        let space = SpaceId::parse(&self.space)
            .ok_or_else(|| Error::MalformedCensus(format!("unknown space {}", self.space)))?;
        let strategy = Strategy::parse(&self.strategy)
            .ok_or_else(|| Error::MalformedCensus(format!("unknown strategy {}", self.strategy)))?;
        let parse_int = |s: &str| -> Result<BigInt> {
            BigInt::from_str(s).map_err(|e| Error::MalformedCensus(format!("bad integer: {e}")))
        };
        let mut entries = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            let den = parse_int(&e.den)?;
            if den.sign() != num_bigint::Sign::Plus {
                return Err(Error::MalformedCensus("nonpositive denominator".into()));
            }
            let ci = match (&e.ci_num, &e.ci_den) {
                (Some(a), Some(b)) => Some(Rat::new(parse_int(a)?, parse_int(b)?)),
                (None, None) => None,
                _ => return Err(Error::MalformedCensus("half-specified ci".into())),
            };
            entries.push(CensusEntry {
                m: e.m,
                c: Rat::new(parse_int(&e.num)?, den),
                exact: e.exact,
                ci,
            });
        }
        Ok(ValuationCensus {
            space,
            p: self.p,
            n: self.n as usize,
            strategy,
            m_max: self.m_max,
            entries,
            seed: self.seed,
            coset: self.coset.as_ref().map(|c| CosetSpec {
                center: c.center.clone(),
                level: c.level,
            }),
            precision_exhausted: self.precision_exhausted,
        })
    }
}

pub fn write_census_file(path: &Path, census: &ValuationCensus) -> Result<()> {
    let file = CensusFile::from_census(census);
    let json = serde_json::to_string_pretty(&file)?;
    std::fs::write(path, json + "\n")?;
    Ok(())
}

pub fn read_census_file(path: &Path) -> Result<ValuationCensus> {
    let text = std::fs::read_to_string(path)?;
    let file: CensusFile = serde_json::from_str(&text)?;
    file.to_census()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeta_padic::{census_exact, CensusOptions};

    #[test]
    fn round_trip_is_exact() {
        let census = census_exact(
            SpaceId::Matrix2,
            3,
            3,
            Strategy::BranchLift,
            &CensusOptions::default(),
        )
        .unwrap();
        let dir = std::env::temp_dir().join("pvzeta-cache-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("census.json");
        write_census_file(&path, &census).unwrap();
        let back = read_census_file(&path).unwrap();
        assert_eq!(back.p, census.p);
        assert_eq!(back.entries.len(), census.entries.len());
        for (a, b) in back.entries.iter().zip(&census.entries) {
            assert_eq!(a.c, b.c);
            assert_eq!(a.exact, b.exact);
        }
        // writing again is byte-identical
        let first = std::fs::read(&path).unwrap();
        write_census_file(&path, &back).unwrap();
        let second = std::fs::read(&path).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn tampering_is_detected() {
        let census = census_exact(
            SpaceId::Tate,
            3,
            2,
            Strategy::Direct,
            &CensusOptions::default(),
        )
        .unwrap();
        let mut file = CensusFile::from_census(&census);
        file.entries[0].num = "1".into();
        assert!(matches!(file.to_census(), Err(Error::ChecksumMismatch)));
        let mut file = CensusFile::from_census(&census);
        file.schema_version = 2;
        assert!(matches!(file.to_census(), Err(Error::UnsupportedSchema(2))));
    }
}
