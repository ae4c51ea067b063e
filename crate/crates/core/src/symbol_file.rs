//! JSON symbol files.
//!
//! ```json
//! {
//!   "n": 2,
//!   "entries": [
//!     [{"num": {"-1": [1, 0]}}, {"num": {}}],
//!     [{"num": {}}, {"num": {"-1": [0.5, 0]}, "den": {"0": [1, 0], "1": [0.25, 0]}}]
//!   ],
//!   "meta": {"grid": 4096, "tol_verify": 1e-8}
//! }
//! ```
//!
//! Keys are degrees of `z`; values are `[re, im]`. An entry is `num / den`,
//! or `num / prod l_r` when an exact `poles` list is given instead (this is
//! what the tool writes, so output files reload without refactoring).

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matfun::MatSymbol;
use crate::ring::{LaurentScalar, RationalScalar};
use crate::C64;

pub type CoeffMap = BTreeMap<String, [f64; 2]>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntrySpec {
    #[serde(default)]
    pub num: CoeffMap,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub den: Option<CoeffMap>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poles: Option<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_construct: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_verify: Option<f64>,
    #[serde(flatten)]
    pub extra: BTreeMap<String, serde_json::Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolFile {
    pub n: usize,
    pub entries: Vec<Vec<EntrySpec>>,
    #[serde(default, skip_serializing_if = "is_default_meta")]
    pub meta: Meta,
}

fn is_default_meta(m: &Meta) -> bool {
    *m == Meta::default()
}

fn parse_err(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse { location: location.into(), message: message.into() }
}

fn laurent_from_map(map: &CoeffMap, at: &str) -> Result<LaurentScalar> {
    let mut terms: Vec<(i64, C64)> = Vec::with_capacity(map.len());
    for (key, [re, im]) in map {
        let k: i64 = key
            .trim()
            .parse()
            .map_err(|_| parse_err(at, format!("degree key {key:?} is not an integer")))?;
        if !re.is_finite() || !im.is_finite() {
            return Err(parse_err(at, format!("non-finite coefficient at degree {k}")));
        }
        terms.push((k, C64::new(*re, *im)));
    }
    if terms.is_empty() {
        return Ok(LaurentScalar::zero());
    }
    let lo = terms.iter().map(|t| t.0).min().unwrap();
    let hi = terms.iter().map(|t| t.0).max().unwrap();
    if hi - lo > 1 << 16 {
        return Err(parse_err(at, "degree span too large"));
    }
    let mut coeffs = vec![C64::new(0.0, 0.0); (hi - lo + 1) as usize];
    for (k, c) in terms {
        coeffs[(k - lo) as usize] += c;
    }
    Ok(LaurentScalar::from_coeffs(lo, coeffs))
}

fn map_from_laurent(p: &LaurentScalar) -> CoeffMap {
    p.terms()
        .filter(|(_, c)| c.re != 0.0 || c.im != 0.0)
        .map(|(k, c)| (k.to_string(), [c.re, c.im]))
        .collect()
}

impl EntrySpec {
    pub fn from_scalar(f: &RationalScalar) -> Self {
        let poles = (!f.poles().is_empty()).then(|| f.poles().iter().map(|p| [p.re, p.im]).collect());
        Self { num: map_from_laurent(f.num()), den: None, poles }
    }

    /// `disk_free`: reject denominators vanishing in the closed unit disk.
    pub fn to_scalar(&self, at: &str, disk_free: bool) -> Result<RationalScalar> {
        let num = laurent_from_map(&self.num, &format!("{at}.num"))?;
        let f = match (&self.den, &self.poles) {
            (Some(_), Some(_)) => return Err(parse_err(at, "give either \"den\" or \"poles\", not both")),
            (Some(den), None) => {
                let den = laurent_from_map(den, &format!("{at}.den"))?;
                if den.is_zero() {
                    return Err(parse_err(format!("{at}.den"), "zero denominator"));
                }
                if disk_free && den.deg_lo() > 0 {
                    return Err(Error::DiskZeroDenominator { root: format!("0 (at {at})") });
                }
                RationalScalar::from_fraction(&num, &den).map_err(|e| locate(e, at))?
            }
            (None, Some(poles)) => {
                let poles = poles.iter().map(|[re, im]| C64::new(*re, *im)).collect();
                RationalScalar::new(num, poles).map_err(|e| locate(e, at))?
            }
            (None, None) => RationalScalar::laurent(num),
        };
        if disk_free {
            f.check_disk_free_denominator().map_err(|e| locate(e, at))?;
        }
        Ok(f)
    }
}

fn locate(e: Error, at: &str) -> Error {
    match e {
        Error::DiskZeroDenominator { root } => Error::DiskZeroDenominator { root: format!("{root} (at {at})") },
        Error::Parse { .. } => e,
        other => parse_err(at, other.to_string()),
    }
}

impl SymbolFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: SymbolFile = serde_json::from_str(text).map_err(|e| {
            parse_err(format!("line {}, column {}", e.line(), e.column()), e.to_string())
        })?;
        if file.n == 0 {
            return Err(parse_err("n", "size must be positive"));
        }
        if file.entries.len() != file.n {
            return Err(parse_err("entries", format!("{} rows for n = {}", file.entries.len(), file.n)));
        }
        for (i, row) in file.entries.iter().enumerate() {
            if row.len() != file.n {
                return Err(parse_err(format!("entries[{i}]"), format!("{} columns for n = {}", row.len(), file.n)));
            }
        }
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| parse_err(path.display().to_string(), e.to_string()))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("symbol files serialize")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")
            .map_err(|e| parse_err(path.display().to_string(), e.to_string()))
    }

    /// Builds the matrix symbol; `disk_free` enforces denominators without
    /// zeros in the closed disk (required for input symbols).
    pub fn to_symbol(&self, disk_free: bool) -> Result<MatSymbol> {
        let mut entries = Vec::with_capacity(self.n * self.n);
        for (i, row) in self.entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                entries.push(e.to_scalar(&format!("entries[{i}][{j}]"), disk_free)?);
            }
        }
        MatSymbol::new(self.n, entries)
    }

    pub fn from_symbol(phi: &MatSymbol, meta: Meta) -> Self {
        let n = phi.size();
        let entries = (0..n)
            .map(|i| (0..n).map(|j| EntrySpec::from_scalar(phi.get(i, j))).collect())
            .collect();
        Self { n, entries, meta }
    }
}
