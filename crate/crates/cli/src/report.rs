//! Report payloads. Every floating-point quantity travels with an
//! `error_bound`; exact quantities carry a bound of zero.

use serde::Serialize;
use spectrakit::io::{coords_of, spec_of, BlockSpec, ComplexSpec, CoordSpec, TailSpec};
use spectrakit::spectral::Witness;
use spectrakit::{Complex, Operator, Vector};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Bounded {
    pub value: f64,
    pub error_bound: f64,
}

impl Bounded {
    pub fn new(value: f64, error_bound: f64) -> Self {
        Self { value, error_bound }
    }

    pub fn exact(value: f64) -> Self {
        Self { value, error_bound: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundedComplex {
    pub re: f64,
    pub im: f64,
    pub error_bound: f64,
}

impl BoundedComplex {
    pub fn new(z: Complex, error_bound: f64) -> Self {
        Self { re: z.re, im: z.im, error_bound }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub vector: Vec<CoordSpec>,
    pub value: BoundedComplex,
}

impl WitnessReport {
    pub fn new(w: &Witness<f64>, error_bound: f64) -> Self {
        Self { vector: coords_of(&w.vector), value: BoundedComplex::new(w.value, error_bound) }
    }
}

pub fn coords(v: &Vector) -> Vec<CoordSpec> {
    coords_of(v)
}

/// Operator as block data plus a tail description. Closed-form tails are
/// also listed as terms; other tails only appear symbolically.
#[derive(Debug, Clone, Serialize)]
pub struct OperatorReport {
    pub scalar: ComplexSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block: Option<BlockSpec>,
    pub tail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_terms: Option<TailSpec>,
    /// Bound on the error of every listed entry.
    pub entry_error_bound: f64,
}

impl OperatorReport {
    pub fn new(t: &Operator, entry_error_bound: f64) -> Self {
        let n = t.block_size();
        let block = (n > 0).then(|| BlockSpec { n, entries: t.block().entries().iter().map(|&z| z.into()).collect() });
        Self {
            scalar: t.scalar().into(),
            block,
            tail: t.tail().entry().to_string(),
            tail_terms: spec_of(t).and_then(|s| s.tail),
            entry_error_bound,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub tol: f64,
    pub window: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report<T: Serialize> {
    pub command: Vec<String>,
    pub inputs: Vec<InputDigest>,
    pub tolerances: Tolerances,
    pub results: T,
}

/// Collects `(path, error_bound, value)` for every bound in a JSON tree.
pub fn bounds(v: &serde_json::Value) -> Vec<(String, f64, f64)> {
    fn walk(v: &serde_json::Value, path: &str, out: &mut Vec<(String, f64, f64)>) {
        match v {
            serde_json::Value::Object(m) => {
                for key in ["error_bound", "entry_error_bound"] {
                    if let Some(b) = m.get(key) {
                        let value = ["value", "re"]
                            .iter()
                            .find_map(|k| m.get(*k).and_then(|x| x.as_f64()))
                            .unwrap_or(0.0);
                        out.push((format!("{path}.{key}"), b.as_f64().unwrap_or(f64::INFINITY), value));
                    }
                }
                for (k, x) in m {
                    walk(x, &format!("{path}.{k}"), out);
                }
            }
            serde_json::Value::Array(a) => {
                for (i, x) in a.iter().enumerate() {
                    walk(x, &format!("{path}[{i}]"), out);
                }
            }
            _ => {}
        }
    }
    let mut out = Vec::new();
    walk(v, "$", &mut out);
    out
}

/// Bounds exceeding `tol * max(1, |value|)`.
pub fn bound_violations(v: &serde_json::Value, tol: f64) -> Vec<String> {
    bounds(v)
        .into_iter()
        .filter(|(_, b, x)| !(*b <= tol * x.abs().max(1.0)))
        .map(|(p, b, _)| format!("{p} = {b:e}"))
        .collect()
}
