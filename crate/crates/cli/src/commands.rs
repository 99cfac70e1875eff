//! One function per subcommand, each producing a serializable result.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use spectrakit::analysis::{an_check, an_reassemble, classify, ANVerdict, Classification};
use spectrakit::commutator::{maximizer_pair, maximizer_sandwich, maximizer_single, MaximizerReport};
use spectrakit::dense::hermitian_eigen;
use spectrakit::perturbation::attainify;
use spectrakit::spectral::{essential_min_modulus, min_modulus, modulus, operator_norm, spectrum_sa};
use spectrakit::{Complex, Operator, Result, Vector};

use crate::report::{coords, Bounded, BoundedComplex, OperatorReport, WitnessReport};

/// Random probe vectors used by `oracle-compare`.
pub const PROBES: usize = 8;

#[derive(Debug, Serialize)]
pub struct NormReport {
    pub norm: Bounded,
    pub attained: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessReport>,
}

#[derive(Debug, Serialize)]
pub struct EigenReport {
    pub eigenvalue: Bounded,
    pub multiplicity: usize,
    pub witness: Vec<spectrakit::io::CoordSpec>,
}

#[derive(Debug, Serialize)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<EigenReport>,
    pub essential_points: Vec<Bounded>,
    /// Every unlisted spectral point lies within this distance of an essential point.
    pub unlisted_radius: Bounded,
}

#[derive(Debug, Serialize)]
pub struct AnalyzeReport {
    pub classification: Classification,
    pub norm: NormReport,
    pub min_modulus: Bounded,
    pub essential_min_modulus: Bounded,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumReport>,
    pub an_verdict: &'static str,
}

pub fn analyze(t: &Operator, tol: f64, window: usize) -> Result<AnalyzeReport> {
    let classification = classify(t, tol)?;
    let nr = operator_norm(t, tol)?;
    let norm = NormReport {
        norm: Bounded::new(nr.value, nr.error_bound),
        attained: nr.attainment.kind(),
        witness: nr.attainment.witness().map(|w| WitnessReport::new(w, nr.error_bound)),
    };
    let m = min_modulus(t, tol)?;
    let spectrum = if classification.self_adjoint {
        let s = spectrum_sa(t, tol, window)?;
        Some(SpectrumReport {
            eigenvalues: s
                .eigenvalues
                .iter()
                .map(|e| EigenReport {
                    eigenvalue: Bounded::new(e.value, e.error_radius),
                    multiplicity: e.multiplicity,
                    witness: coords(&e.witness),
                })
                .collect(),
            essential_points: s.essential_points.iter().map(|&a| Bounded::exact(a)).collect(),
            unlisted_radius: Bounded::exact(s.cluster_radius),
        })
    } else {
        None
    };
    Ok(AnalyzeReport {
        classification,
        norm,
        min_modulus: Bounded::new(m.value, m.error_bound),
        essential_min_modulus: Bounded::exact(essential_min_modulus(t)),
        spectrum,
        an_verdict: an_check(t, tol)?.kind(),
    })
}

#[derive(Debug, Serialize)]
pub struct TripleReport {
    pub alpha: Bounded,
    pub k: OperatorReport,
    pub f: OperatorReport,
    /// Largest entry of `K - F + alpha I` minus the decomposed operator.
    pub reassembly_error: Bounded,
    /// `||K F||`.
    pub kf_norm: Bounded,
}

#[derive(Debug, Serialize)]
pub struct AnReport {
    pub verdict: &'static str,
    /// `operator` when positive input was decomposed directly, otherwise `modulus`.
    pub decomposed: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub offending: Vec<Bounded>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub triple: Option<TripleReport>,
}

impl AnReport {
    pub fn undecided(&self) -> bool {
        self.verdict == "undecided"
    }
}

pub fn an(t: &Operator, tol: f64, window: usize) -> Result<AnReport> {
    let positive = t.is_self_adjoint(tol) && classify(t, tol)?.positive;
    let p = if positive { t.clone() } else { modulus(t)? };
    let radius = if p.block_size() > 0 { hermitian_eigen(&p.shifted_block().hermitian_part())?.radius() } else { 0.0 };
    let decomposed = if positive { "operator" } else { "modulus" };
    let mut rep = AnReport { verdict: "", decomposed, reason: None, offending: Vec::new(), triple: None };
    let verdict = an_check(t, tol)?;
    rep.verdict = verdict.kind();
    match verdict {
        ANVerdict::InAN(tri) => {
            let m = p.block_size().max(tri.k.block_size()).max(tri.f.block_size()) + window;
            let reassembly = an_reassemble(&tri)?.section_distance(&p, m);
            let kf = operator_norm(&tri.k.multiply(&tri.f)?, tol)?;
            rep.triple = Some(TripleReport {
                alpha: Bounded::exact(tri.alpha),
                k: OperatorReport::new(&tri.k, reassembly),
                f: OperatorReport::new(&tri.f, reassembly),
                reassembly_error: Bounded::exact(reassembly),
                kf_norm: Bounded::new(kf.value, kf.error_bound),
            });
        }
        ANVerdict::NotAN { reason, offending } => {
            rep.reason = Some(format!("{reason:?}"));
            rep.offending = offending.into_iter().map(|v| Bounded::new(v, radius)).collect();
        }
        ANVerdict::Undecided(why) => rep.reason = Some(why),
    }
    Ok(rep)
}

#[derive(Debug, Serialize)]
pub struct CommutatorReport {
    pub mode: &'static str,
    pub achieved: Bounded,
    pub target: Bounded,
    pub x: OperatorReport,
    pub witnesses: Vec<WitnessReport>,
}

pub enum CommutatorMode<'a> {
    Single(&'a Operator),
    Pair(&'a Operator, &'a Operator),
    Sandwich(&'a Operator, &'a Operator),
}

pub fn commutator(mode: CommutatorMode<'_>, tol: f64) -> Result<CommutatorReport> {
    let norm_err = |t: &Operator| operator_norm(t, tol).map(|n| n.error_bound);
    let (name, rep, product, target_err): (_, MaximizerReport<f64>, Operator, f64) = match mode {
        CommutatorMode::Single(e) => {
            let r = maximizer_single(e, tol)?;
            let c = e.multiply(&r.x)?.sub(&r.x.multiply(e)?)?;
            ("single", r, c, 2.0 * norm_err(e)?)
        }
        CommutatorMode::Pair(s, t) => {
            let r = maximizer_pair(s, t, tol)?;
            let c = s.multiply(&r.x)?.sub(&r.x.multiply(t)?)?;
            ("pair", r, c, norm_err(s)? + norm_err(t)?)
        }
        CommutatorMode::Sandwich(s, t) => {
            let r = maximizer_sandwich(s, t, tol)?;
            let c = s.multiply(&r.x)?.multiply(t)?;
            let (ns, nt) = (operator_norm(s, tol)?, operator_norm(t, tol)?);
            ("sandwich", r, c, ns.value * nt.error_bound + nt.value * ns.error_bound + ns.error_bound * nt.error_bound)
        }
    };
    let achieved_err = norm_err(&product)?;
    Ok(CommutatorReport {
        mode: name,
        achieved: Bounded::new(rep.achieved, achieved_err),
        target: Bounded::new(rep.target, target_err),
        x: OperatorReport::new(&rep.x, 0.0),
        witnesses: rep.witnesses.iter().map(|w| WitnessReport::new(w, target_err)).collect(),
    })
}

#[derive(Debug, Serialize)]
pub struct AttainifyReport {
    pub input_norm: Bounded,
    pub z: OperatorReport,
    pub n_star: Option<usize>,
    pub eta: WitnessReport,
    pub norm_preserved: Bounded,
    pub distance: Bounded,
    pub beta_achieved: BoundedComplex,
}

pub fn attainify_cmd(s: &Operator, alpha: f64, beta: Option<Complex>, tol: f64) -> Result<AttainifyReport> {
    let c = attainify(s, alpha, beta, tol)?;
    let input = operator_norm(s, tol)?;
    let s1 = s.scale(Complex::new(1.0 / c.input_norm, 0.0))?;
    let zn = operator_norm(&c.z, tol)?;
    let dn = operator_norm(&s1.sub(&c.z)?, tol)?;
    Ok(AttainifyReport {
        input_norm: Bounded::new(c.input_norm, input.error_bound),
        z: OperatorReport::new(&c.z, 0.0),
        n_star: c.n_star,
        eta: WitnessReport::new(&c.eta, 0.0),
        norm_preserved: Bounded::new(c.norm_preserved, zn.error_bound),
        distance: Bounded::new(c.distance, dn.error_bound),
        beta_achieved: BoundedComplex::new(c.beta_achieved, 0.0),
    })
}

#[derive(Debug, Serialize)]
pub struct Comparison {
    pub engine: Bounded,
    pub oracle: Bounded,
    /// `|engine - oracle|`, bounded by the two numerical errors.
    pub delta: Bounded,
    /// Largest gap explained by the part of the tail beyond the section.
    pub truncation_allowance: Bounded,
    pub consistent: bool,
}

impl Comparison {
    fn new(engine: Bounded, oracle: Bounded, truncation_allowance: f64, tol: f64) -> Self {
        let delta = (engine.value - oracle.value).abs();
        let err = engine.error_bound + oracle.error_bound;
        let consistent = delta <= truncation_allowance + err + tol;
        Self { engine, oracle, delta: Bounded::new(delta, err), truncation_allowance: Bounded::exact(truncation_allowance), consistent }
    }
}

#[derive(Debug, Serialize)]
pub struct OracleReport {
    pub dim_requested: usize,
    pub dim_used: usize,
    pub tail_envelope: Bounded,
    pub norm: Comparison,
    pub min_modulus: Comparison,
    /// Dense eigenvalues outside the certified spectral cover (self-adjoint input).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uncovered_eigenvalues: Option<usize>,
    /// `max | ||T x|| - ||T_M x|| |` over random probes.
    pub probe_delta: Bounded,
    pub consistent: bool,
}

fn sqrt_bound(x: f64, e: f64) -> f64 {
    if x > 0.0 {
        e.sqrt().min(e / x.sqrt())
    } else {
        e.sqrt()
    }
}

pub fn oracle_compare(t: &Operator, dim: usize, tol: f64, window: usize, seed: u64) -> Result<OracleReport> {
    // below the block size the section does not split off the tail
    let m = dim.max(t.block_size()).max(1);
    let section = t.truncate(m);
    let gram = hermitian_eigen(&section.adjoint().matmul(&section))?;
    let (lo, hi) = (gram.values[0].max(0.0), gram.values[m - 1].max(0.0));
    let r = gram.radius();
    let env = t.envelope_at(m + 1);
    let a = t.scalar().norm();

    let nr = operator_norm(t, tol)?;
    let dense_norm = hi.sqrt();
    let norm = Comparison::new(
        Bounded::new(nr.value, nr.error_bound),
        Bounded::new(dense_norm, sqrt_bound(hi, r)),
        (a + env - dense_norm).max(0.0),
        tol,
    );
    let mm = min_modulus(t, tol)?;
    let dense_min = lo.sqrt();
    let min_modulus = Comparison::new(
        Bounded::new(mm.value, mm.error_bound),
        Bounded::new(dense_min, sqrt_bound(lo, r)),
        (dense_min - (a - env)).max(0.0),
        tol,
    );

    let uncovered_eigenvalues = if t.is_self_adjoint(tol) {
        let s = spectrum_sa(t, tol, window)?;
        let e = hermitian_eigen(&section.hermitian_part())?;
        Some(e.values.iter().filter(|&&x| !s.covers(x, e.radius() + tol)).count())
    } else {
        None
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reach = m + PROBES;
    let wide = t.truncate(reach);
    let mut probe = 0.0f64;
    for _ in 0..PROBES {
        let dense: Vec<Complex> =
            (0..reach).map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let x = Vector::from_dense(&dense);
        let engine = t.apply(&x).norm();
        let oracle = wide.mul_vec(&dense).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        probe = probe.max((engine - oracle).abs() / x.norm().max(1.0));
    }
    let consistent = norm.consistent && min_modulus.consistent && uncovered_eigenvalues.unwrap_or(0) == 0 && probe <= tol;
    Ok(OracleReport {
        dim_requested: dim,
        dim_used: m,
        tail_envelope: Bounded::exact(env),
        norm,
        min_modulus,
        uncovered_eigenvalues,
        probe_delta: Bounded::exact(probe),
        consistent,
    })
}
