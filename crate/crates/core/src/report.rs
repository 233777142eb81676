//! Matrix file parsing and the structured certification report.

use std::path::Path;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::Value;

use crate::calculus::MuellerCandidate;
use crate::canonical::{classify, type1_binding, type2_checks_from_invariants, ConstraintCheck, Family};
use crate::choi::{jones_ensemble, mueller_jones_test, physicality};
use crate::conetest::certify_cone;
use crate::error::{CertError, Result};
use crate::witness::{expectation, extended_action, witness_certificate, witness_input};

/// Parse 16 reals in row-major order, separated by whitespace or commas,
/// with `#` comment lines; or a JSON object `{"mueller": [[..4..], ..]}`.
pub fn parse_matrix(text: &str) -> Result<Matrix4<f64>> {
    if text.trim_start().starts_with('{') {
        return parse_json(text);
    }
    let mut values = Vec::with_capacity(16);
    for line in text.lines() {
        if line.trim_start().starts_with('#') {
            continue;
        }
        for tok in line.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            let x: f64 = tok.parse().map_err(|_| CertError::Parse(format!("not a number: {tok:?}")))?;
            if !x.is_finite() {
                return Err(CertError::Parse(format!("non-finite entry: {tok:?}")));
            }
            values.push(x);
        }
    }
    if values.len() != 16 {
        return Err(CertError::Parse(format!("expected 16 entries, found {}", values.len())));
    }
    Ok(Matrix4::from_row_slice(&values))
}

fn parse_json(text: &str) -> Result<Matrix4<f64>> {
    #[derive(serde::Deserialize)]
    struct Doc {
        mueller: Vec<Vec<f64>>,
    }
    let doc: Doc = serde_json::from_str(text).map_err(|e| CertError::Parse(e.to_string()))?;
    if doc.mueller.len() != 4 || doc.mueller.iter().any(|r| r.len() != 4) {
        return Err(CertError::Parse("\"mueller\" must be a 4x4 array".into()));
    }
    Ok(Matrix4::from_fn(|r, c| doc.mueller[r][c]))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreMuellerSection {
    pub verdict: bool,
    pub intensity_margin: f64,
    pub lorentz_margin: f64,
    pub worst_input: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhysicalitySection {
    pub eigenvalues: [f64; 4],
    pub min_eigenvalue: f64,
    pub verdict: bool,
    pub rank: usize,
}

/// Complex entries are written as `[re, im]`; 2×2 matrices row by row.
type Cx = [f64; 2];

fn cx(z: Complex64) -> Cx {
    [z.re, z.im]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MuellerJonesSection {
    pub verdict: bool,
    pub jones: Option<[[Cx; 2]; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleEntry {
    pub weight: f64,
    pub jones: [[Cx; 2]; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CanonicalSection {
    pub family: Family,
    pub d: Option<[f64; 4]>,
    pub binding_constraint: Option<ConstraintCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub type2_invariants: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessSection {
    pub present: bool,
    pub vector: Option<[Cx; 4]>,
    pub expectation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub input_echo: [f64; 16],
    pub pre_mueller: PreMuellerSection,
    pub physicality: PhysicalitySection,
    pub mueller_jones: MuellerJonesSection,
    pub ensemble: Vec<EnsembleEntry>,
    pub canonical: CanonicalSection,
    pub witness: WitnessSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictTier {
    Mueller,
    PreMuellerOnly,
    NotPreMueller,
}

impl VerdictTier {
    pub fn exit_code(self) -> i32 {
        match self {
            VerdictTier::Mueller => 0,
            VerdictTier::PreMuellerOnly => 3,
            VerdictTier::NotPreMueller => 4,
        }
    }
}

pub const EXIT_PARSE: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;

impl Report {
    pub fn tier(&self) -> VerdictTier {
        if self.physicality.verdict {
            VerdictTier::Mueller
        } else if self.pre_mueller.verdict {
            VerdictTier::PreMuellerOnly
        } else {
            VerdictTier::NotPreMueller
        }
    }
}

fn jones_rows(j: &nalgebra::Matrix2<Complex64>) -> [[Cx; 2]; 2] {
    [[cx(j[(0, 0)]), cx(j[(0, 1)])], [cx(j[(1, 0)]), cx(j[(1, 1)])]]
}

/// Run every certification on `m`.
///
/// A Mueller matrix is always reported as pre-Mueller: positivity of `H`
/// implies cone preservation, and the two numerical tests can disagree only
/// within tolerance on the boundary.
pub fn analyze_matrix(m: &Matrix4<f64>, tol: f64) -> Report {
    let cand = MuellerCandidate::new(*m);
    let cone = certify_cone(&cand, tol);
    let phys = physicality(&cand, tol);
    let mj = mueller_jones_test(&cand, tol);
    let ensemble = jones_ensemble(&cand, tol)
        .map(|e| {
            e.items
                .iter()
                .map(|it| EnsembleEntry { weight: it.weight, jones: jones_rows(&it.jones.0) })
                .collect()
        })
        .unwrap_or_default();

    let class = classify(&cand, tol);
    let binding_constraint = match (class.family, class.d, class.type2_invariants) {
        (Family::TypeI, Some(d), _) => Some(type1_binding(&d, tol)),
        (Family::TypeII, _, Some([p, d2, d3])) => type2_checks_from_invariants(p, d2, d3, tol)
            .into_iter()
            .min_by(|a, b| a.slack.total_cmp(&b.slack)),
        _ => None,
    };

    let witness = witness_certificate(&cand, tol);
    let witness_value = witness.as_ref().and_then(|w| expectation(&extended_action(&cand, &witness_input()), w).ok());

    let w = cone.worst_input;
    Report {
        input_echo: std::array::from_fn(|k| m[(k / 4, k % 4)]),
        pre_mueller: PreMuellerSection {
            verdict: cone.is_pre_mueller || phys.is_mueller,
            intensity_margin: cone.intensity_margin,
            lorentz_margin: cone.lorentz_margin,
            worst_input: [w[0], w[1], w[2]],
        },
        physicality: PhysicalitySection {
            eigenvalues: phys.eigenvalues,
            min_eigenvalue: phys.min_eigenvalue,
            verdict: phys.is_mueller,
            rank: phys.rank,
        },
        mueller_jones: MuellerJonesSection { verdict: mj.is_some(), jones: mj.map(|j| jones_rows(&j.0)) },
        ensemble,
        canonical: CanonicalSection {
            family: class.family,
            d: class.d,
            binding_constraint,
            type2_invariants: class.type2_invariants,
            note: class.note,
        },
        witness: WitnessSection {
            present: witness.is_some(),
            vector: witness.map(|w| {
                let v: Vector4<Complex64> = w.0;
                [cx(v[0]), cx(v[1]), cx(v[2]), cx(v[3])]
            }),
            expectation: witness_value,
        },
    }
}

pub fn analyze_file(path: &Path, tol: f64) -> Result<Report> {
    let text = std::fs::read_to_string(path).map_err(|e| CertError::Parse(format!("{}: {e}", path.display())))?;
    Ok(analyze_matrix(&parse_matrix(&text)?, tol))
}

/// Round to 12 significant digits; `-0` becomes `0`.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    let y: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if y == 0.0 {
        0.0
    } else {
        y
    }
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64().and_then(|x| serde_json::Number::from_f64(sig12(x))) {
                *n = x;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with every float rounded to 12 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("report types serialize");
    round_value(&mut v);
    serde_json::to_string_pretty(&v).expect("value serializes")
}

fn fmt(x: f64) -> String {
    format!("{:.6}", sig12(x))
}

pub fn summary(r: &Report) -> String {
    let mut out = String::new();
    let tier = match r.tier() {
        VerdictTier::Mueller => "Mueller",
        VerdictTier::PreMuellerOnly => "pre-Mueller, not Mueller",
        VerdictTier::NotPreMueller => "not pre-Mueller",
    };
    out.push_str(&format!("verdict: {tier}\n"));
    out.push_str(&format!(
        "cone margins: intensity {}, lorentz {}\n",
        fmt(r.pre_mueller.intensity_margin),
        fmt(r.pre_mueller.lorentz_margin)
    ));
    let eigs: Vec<String> = r.physicality.eigenvalues.iter().map(|&x| fmt(x)).collect();
    out.push_str(&format!("H eigenvalues: {} (rank {})\n", eigs.join(", "), r.physicality.rank));
    if r.mueller_jones.verdict {
        out.push_str("Mueller-Jones: yes\n");
    }
    if !r.ensemble.is_empty() {
        out.push_str(&format!("Jones ensemble: {} members\n", r.ensemble.len()));
    }
    out.push_str(&format!("family: {}", r.canonical.family));
    if let Some(d) = r.canonical.d {
        let ds: Vec<String> = d.iter().map(|&x| fmt(x)).collect();
        out.push_str(&format!(", d = ({})", ds.join(", ")));
    }
    out.push('\n');
    if let Some(b) = r.canonical.binding_constraint {
        let state = if b.satisfied { "holds" } else { "violated" };
        out.push_str(&format!("binding constraint #{}: {} {state}, slack {}\n", b.index, b.formula, fmt(b.slack)));
    }
    if let (true, Some(e)) = (r.witness.present, r.witness.expectation) {
        out.push_str(&format!("entanglement witness: expectation {}\n", fmt(e)));
    }
    out
}
