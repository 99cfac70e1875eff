//! JSON operator specification files.
//!
//! ```json
//! {
//!   "scalar": {"re": 1.0, "im": 0.0},
//!   "block": {"n": 2, "entries": [{"re": 0.0, "im": 0.0}, ...]},
//!   "tail": {"terms": [{"c": -1.0, "r": 1.0, "p": 2.0}]},
//!   "rank_one": [{"u": [{"i": 1, "re": 1.0, "im": 0.0}], "v": [...]}]
//! }
//! ```
//!
//! Floats are written in shortest round-trip form, so `parse(emit(spec))`
//! reproduces every value bit for bit.

use serde::{Deserialize, Serialize};

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::scalar::{cx, Cx};
use crate::structured::{EnvelopeTerm, FinVector, StructuredOperator, TailExpr, TailRule, MAX_BLOCK};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexSpec {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl From<Cx<f64>> for ComplexSpec {
    fn from(z: Cx<f64>) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexSpec> for Cx<f64> {
    fn from(z: ComplexSpec) -> Self {
        cx(z.re, z.im)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockSpec {
    pub n: usize,
    /// Row-major, `n * n` entries.
    pub entries: Vec<ComplexSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub c: f64,
    pub r: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailSpec {
    pub terms: Vec<TermSpec>,
}

/// One coordinate of a sparse vector, indexed from 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoordSpec {
    pub i: usize,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankOneSpec {
    pub u: Vec<CoordSpec>,
    pub v: Vec<CoordSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    pub scalar: ComplexSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block: Option<BlockSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<TailSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rank_one: Vec<RankOneSpec>,
}

fn parse_err(position: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse { position: position.into(), message: message.into() }
}

fn finite(position: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(parse_err(position, "value is not finite"))
    }
}

/// Reads the file format without validating the operator.
pub fn read_spec(text: &str) -> Result<OperatorSpec> {
    serde_json::from_str(text)
        .map_err(|e| parse_err(format!("line {}, column {}", e.line(), e.column()), e.to_string()))
}

/// Pretty-printed JSON with a trailing newline.
pub fn emit_spec(spec: &OperatorSpec) -> String {
    let mut s = serde_json::to_string_pretty(spec).expect("spec is always serializable");
    s.push('\n');
    s
}

fn sparse(position: &str, coords: &[CoordSpec]) -> Result<FinVector<f64>> {
    let mut v = FinVector::zero();
    for (k, c) in coords.iter().enumerate() {
        let at = format!("{position}[{k}]");
        if c.i == 0 {
            return Err(parse_err(at, "coordinates are indexed from 1"));
        }
        if c.i > MAX_BLOCK {
            return Err(parse_err(at, format!("index {} exceeds the block limit {MAX_BLOCK}", c.i)));
        }
        finite(&at, c.re)?;
        finite(&at, c.im)?;
        v.add_at(c.i, cx(c.re, c.im));
    }
    Ok(v)
}

/// Validates a spec and builds the operator, folding rank-one parts into the block.
pub fn build_operator(spec: &OperatorSpec) -> Result<StructuredOperator<f64>> {
    finite("scalar", spec.scalar.re)?;
    finite("scalar", spec.scalar.im)?;
    let mut block = match &spec.block {
        None => DenseMatrix::zeros(0),
        Some(b) => {
            if b.n > MAX_BLOCK {
                return Err(parse_err("block.n", format!("block size {} exceeds {MAX_BLOCK}", b.n)));
            }
            if b.entries.len() != b.n * b.n {
                return Err(parse_err(
                    "block.entries",
                    format!("expected {} entries, got {}", b.n * b.n, b.entries.len()),
                ));
            }
            for (k, z) in b.entries.iter().enumerate() {
                finite(&format!("block.entries[{k}]"), z.re)?;
                finite(&format!("block.entries[{k}]"), z.im)?;
            }
            DenseMatrix::from_row_major(b.n, b.entries.iter().map(|&z| z.into()).collect())
                .ok_or_else(|| parse_err("block", "block is not square"))?
        }
    };
    for (k, r1) in spec.rank_one.iter().enumerate() {
        let u = sparse(&format!("rank_one[{k}].u"), &r1.u)?;
        let v = sparse(&format!("rank_one[{k}].v"), &r1.v)?;
        let m = block.dim().max(u.max_index()).max(v.max_index());
        block = block.padded(m).add(&DenseMatrix::outer(&u.to_dense(m), &v.to_dense(m)));
    }
    let tail = match &spec.tail {
        None => TailRule::zero(),
        Some(t) => {
            let mut terms = Vec::with_capacity(t.terms.len());
            for (k, term) in t.terms.iter().enumerate() {
                let at = format!("tail.terms[{k}]");
                finite(&at, term.c)?;
                if !(term.r > 0.0 && term.r <= 1.0) {
                    return Err(parse_err(format!("{at}.r"), format!("r must lie in (0, 1], got {}", term.r)));
                }
                if !(term.p >= 0.0) || !term.p.is_finite() {
                    return Err(parse_err(format!("{at}.p"), format!("p must be >= 0, got {}", term.p)));
                }
                EnvelopeTerm::new(term.c.abs(), term.r, term.p)?;
                terms.push((term.c, term.r, term.p));
            }
            TailRule::from_terms(&terms)?
        }
    };
    StructuredOperator::new(spec.scalar.into(), block, tail)
}

/// `read_spec` followed by `build_operator`.
pub fn parse_spec(text: &str) -> Result<StructuredOperator<f64>> {
    build_operator(&read_spec(text)?)
}

/// Spec describing `t`, available when its tail is a real closed-form sum.
pub fn spec_of(t: &StructuredOperator<f64>) -> Option<OperatorSpec> {
    let tail = match t.tail().entry() {
        e if e.is_zero() => None,
        TailExpr::Terms(sum) => {
            let mut terms = Vec::new();
            for term in sum.terms() {
                if term.c.im != 0.0 {
                    return None;
                }
                terms.push(TermSpec { c: term.c.re, r: term.r, p: term.p });
            }
            Some(TailSpec { terms })
        }
        _ => return None,
    };
    let n = t.block_size();
    let block = (n > 0).then(|| BlockSpec { n, entries: t.block().entries().iter().map(|&z| z.into()).collect() });
    Some(OperatorSpec { scalar: t.scalar().into(), block, tail, rank_one: Vec::new() })
}

/// Sparse coordinate list of a vector.
pub fn coords_of(v: &FinVector<f64>) -> Vec<CoordSpec> {
    v.iter().map(|(i, z)| CoordSpec { i, re: z.re, im: z.im }).collect()
}
