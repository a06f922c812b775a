//! Chain files: JSON documents listing the stages `(A, m, i)` of a chain.
//!
//! ```json
//! {
//!   "name": "diagonal",
//!   "notes": "optional",
//!   "stages": [
//!     {"A": [[2, 0], [0, 2]], "m": 2, "i": [0, 0]}
//!   ]
//! }
//! ```
//!
//! `A` is row-major and `i` gives the offsets on the columns of the given `A`.
//! Integers may have any size; fractions and exponents are rejected.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde_json::{Map, Value};
use thiserror::Error;

use crate::lattice::IntMatrix;
use crate::subgroup::{SubgroupError, SubgroupTriple};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Field { path: String, message: String },
}

/// A stage that parsed but does not describe a valid normal subgroup.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("stage {stage}: {source}")]
pub struct StageError {
    pub stage: usize,
    pub source: SubgroupError,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageSpec {
    pub a: [[BigInt; 2]; 2],
    pub m: BigInt,
    pub i: [BigInt; 2],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainSpec {
    pub name: String,
    pub notes: Option<String>,
    pub stages: Vec<StageSpec>,
}

fn field(path: &str, message: impl Into<String>) -> ParseError {
    ParseError::Field {
        path: path.to_string(),
        message: message.into(),
    }
}

fn integer(v: &Value, path: &str) -> Result<BigInt, ParseError> {
    match v {
        Value::Number(n) => {
            let text = n.to_string();
            BigInt::from_str(&text).map_err(|_| field(path, format!("expected an integer, found {}", text)))
        }
        _ => Err(field(path, "expected an integer")),
    }
}

fn array<'a>(v: &'a Value, path: &str, len: usize) -> Result<&'a Vec<Value>, ParseError> {
    match v {
        Value::Array(xs) if xs.len() == len => Ok(xs),
        Value::Array(xs) => Err(field(path, format!("expected {} entries, found {}", len, xs.len()))),
        _ => Err(field(path, "expected an array")),
    }
}

fn pair(v: &Value, path: &str) -> Result<[BigInt; 2], ParseError> {
    let xs = array(v, path, 2)?;
    Ok([
        integer(&xs[0], &format!("{}[0]", path))?,
        integer(&xs[1], &format!("{}[1]", path))?,
    ])
}

fn object<'a>(v: &'a Value, path: &str, allowed: &[&str]) -> Result<&'a Map<String, Value>, ParseError> {
    let obj = v.as_object().ok_or_else(|| field(path, "expected an object"))?;
    if let Some(k) = obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(field(path, format!("unknown field \"{}\"", k)));
    }
    Ok(obj)
}

fn required<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value, ParseError> {
    obj.get(key).ok_or_else(|| field(path, format!("missing field \"{}\"", key)))
}

fn stage(v: &Value, path: &str) -> Result<StageSpec, ParseError> {
    let obj = object(v, path, &["A", "m", "i"])?;
    let a_path = format!("{}.A", path);
    let rows = array(required(obj, "A", path)?, &a_path, 2)?;
    let a = [
        pair(&rows[0], &format!("{}[0]", a_path))?,
        pair(&rows[1], &format!("{}[1]", a_path))?,
    ];
    let m = integer(required(obj, "m", path)?, &format!("{}.m", path))?;
    let i = pair(required(obj, "i", path)?, &format!("{}.i", path))?;
    Ok(StageSpec { a, m, i })
}

pub fn parse_chain(text: &str) -> Result<ChainSpec, ParseError> {
    let root: Value = serde_json::from_str(text).map_err(|e| ParseError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let obj = object(&root, "$", &["name", "notes", "stages"])?;
    let name = required(obj, "name", "$")?
        .as_str()
        .ok_or_else(|| field("$.name", "expected a string"))?
        .to_string();
    let notes = match obj.get("notes") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(field("$.notes", "expected a string")),
    };
    let stages_v = required(obj, "stages", "$")?
        .as_array()
        .ok_or_else(|| field("$.stages", "expected an array"))?;
    if stages_v.is_empty() {
        return Err(field("$.stages", "at least one stage is required"));
    }
    let stages = stages_v
        .iter()
        .enumerate()
        .map(|(k, v)| stage(v, &format!("$.stages[{}]", k)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ChainSpec { name, notes, stages })
}

impl FromStr for ChainSpec {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_chain(s)
    }
}

impl StageSpec {
    pub fn matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(self.a.iter().map(|r| r.to_vec()).collect()).expect("2x2 rows")
    }
}

impl ChainSpec {
    /// Canonical triples; stage numbers in errors are 1-based.
    pub fn to_triples(&self) -> Result<Vec<SubgroupTriple>, StageError> {
        self.stages
            .iter()
            .enumerate()
            .map(|(k, s)| {
                SubgroupTriple::new(&s.matrix(), s.m.clone(), s.i.clone())
                    .map_err(|source| StageError { stage: k + 1, source })
            })
            .collect()
    }

    /// A chain description whose stages are the canonical forms of `triples`.
    pub fn from_triples(name: &str, notes: Option<&str>, triples: &[SubgroupTriple]) -> ChainSpec {
        let stages = triples
            .iter()
            .map(|t| {
                let h = t.lat().matrix();
                StageSpec {
                    a: [
                        [h.get(0, 0).clone(), h.get(0, 1).clone()],
                        [h.get(1, 0).clone(), h.get(1, 1).clone()],
                    ],
                    m: t.m().clone(),
                    i: t.ivals().clone(),
                }
            })
            .collect();
        ChainSpec {
            name: name.to_string(),
            notes: notes.map(str::to_string),
            stages,
        }
    }
}

fn quote(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

impl fmt::Display for ChainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{{")?;
        writeln!(f, "  \"name\": {},", quote(&self.name))?;
        if let Some(n) = &self.notes {
            writeln!(f, "  \"notes\": {},", quote(n))?;
        }
        writeln!(f, "  \"stages\": [")?;
        for (k, s) in self.stages.iter().enumerate() {
            let sep = if k + 1 == self.stages.len() { "" } else { "," };
            writeln!(
                f,
                "    {{\"A\": [[{}, {}], [{}, {}]], \"m\": {}, \"i\": [{}, {}]}}{}",
                s.a[0][0], s.a[0][1], s.a[1][0], s.a[1][1], s.m, s.i[0], s.i[1], sep
            )?;
        }
        writeln!(f, "  ]")?;
        write!(f, "}}")
    }
}
