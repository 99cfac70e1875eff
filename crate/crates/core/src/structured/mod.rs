//! The structured operator class `alpha I + B + D_tail` and its algebra.

mod envelope;
mod operator;
mod tail;
mod vector;

pub use envelope::{DecayEnvelope, EnvelopeTerm, SEARCH_CAP};
pub use operator::{StructuredOperator, MAX_BLOCK};
pub use tail::{SignTag, TailExpr, TailRule, Term, TermSum};
pub use vector::FinVector;
