//! Canonical families of pre-Mueller matrices under `M → L_ℓ M L_r`,
//! `L_ℓ, L_r ∈ SO(3,1)`, and the closed-form physicality constraints on
//! their canonical parameters.
//!
//! The family is read from `N = G Mᵀ G M`, which transforms by similarity
//! (`N → L_r⁻¹ N L_r`) under double cosets:
//!
//! * Type-I: `N` diagonalizable with one timelike eigenvector; the
//!   eigenvalues are `d0², d1², d2², d3²`.
//! * Type-II: `N` carries a 2×2 Jordan block at `d0·d1`.
//! * Polarizer / PinMap: rank-one `M = u vᵀ` with `u` lightlike and `v`
//!   lightlike (polarizer) or timelike (pin map).
//!
//! Structural decisions (clustering, ranks) use `√tol` on `M` scaled to unit
//! spectral norm; anything those tests cannot settle is `Indeterminate`.

use nalgebra::{DMatrix, Matrix4, Vector4};
use num_complex::Complex64;
use serde::Serialize;

use crate::calculus::{g_metric, MuellerCandidate, DEFAULT_TOL};
use crate::conetest::certify_cone;
use crate::error::{CertError, Result};
use crate::linalg::svd_sorted;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    TypeI,
    TypeII,
    Polarizer,
    PinMap,
    NotPreMueller,
    Indeterminate,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Family::TypeI => "TypeI",
            Family::TypeII => "TypeII",
            Family::Polarizer => "Polarizer",
            Family::PinMap => "PinMap",
            Family::NotPreMueller => "NotPreMueller",
            Family::Indeterminate => "Indeterminate",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzFactors {
    pub l_left: Matrix4<f64>,
    pub l_right: Matrix4<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalClass {
    pub family: Family,
    /// Canonical parameters `(d0, d1, d2, d3)` when determined. For the
    /// polarizer and pin-map families only `d0` is meaningful and it is not
    /// a double-coset invariant (boosts rescale null vectors); the value
    /// reported reproduces the canonical form when `M` is already in it.
    pub d: Option<[f64; 4]>,
    pub factors: Option<LorentzFactors>,
    /// Type-II invariants `(d0·d1, d2, d3)`; `d0` and `d1` separately are
    /// only read off when `M` is literally in Type-II canonical form.
    pub type2_invariants: Option<[f64; 3]>,
    pub n_eigenvalues: [Complex64; 4],
    pub note: Option<String>,
}

impl CanonicalClass {
    fn bare(family: Family, n_eigenvalues: [Complex64; 4]) -> Self {
        Self { family, d: None, factors: None, type2_invariants: None, n_eigenvalues, note: None }
    }

    fn indeterminate(n_eigenvalues: [Complex64; 4], note: impl Into<String>) -> Self {
        Self { note: Some(note.into()), ..Self::bare(Family::Indeterminate, n_eigenvalues) }
    }
}

/// `L_ℓ · diag(d) · L_r = M` for a Type-I matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Type1Factorization {
    pub l_left: Matrix4<f64>,
    pub d: [f64; 4],
    pub l_right: Matrix4<f64>,
    /// `‖L_ℓ D L_r − M‖_F / ‖M‖_F`.
    pub residual: f64,
}

/// One of the constraint inequalities, with `slack ≥ 0` when satisfied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstraintCheck {
    pub satisfied: bool,
    /// 1-based position in the family's list of constraints.
    pub index: usize,
    pub formula: &'static str,
    pub slack: f64,
}

pub const TYPE1_FORMULAS: [&str; 4] = [
    "-d1 - d2 - d3 <= d0",
    "-d1 + d2 + d3 <= d0",
    "d1 + d2 - d3 <= d0",
    "d1 - d2 + d3 <= d0",
];

pub const TYPE2_FORMULAS: [&str; 2] = ["d3 = d2", "d2^2 <= d0*d1"];

/// `N = G Mᵀ G M`.
pub fn n_matrix(m: &MuellerCandidate) -> Matrix4<f64> {
    *m.n()
}

fn d_scale(d: &[f64; 4]) -> f64 {
    d.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// `d0 − lhs` for each Type-I inequality, in listed order.
pub fn type1_slacks(d: &[f64; 4]) -> [f64; 4] {
    let [d0, d1, d2, d3] = *d;
    [d0 + d1 + d2 + d3, d0 + d1 - d2 - d3, d0 - d1 - d2 + d3, d0 - d1 + d2 - d3]
}

/// The tightest Type-I inequality (most negative slack).
pub fn type1_binding(d: &[f64; 4], tol: f64) -> ConstraintCheck {
    let slacks = type1_slacks(d);
    let (k, &slack) = slacks
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("four slacks");
    ConstraintCheck { satisfied: slack >= -tol * d_scale(d), index: k + 1, formula: TYPE1_FORMULAS[k], slack }
}

/// All four diagonal-form inequalities hold, i.e. `H_{diag(d)} ⪰ 0`.
pub fn type1_constraints(d: &[f64; 4]) -> bool {
    type1_constraints_tol(d, DEFAULT_TOL)
}

pub fn type1_constraints_tol(d: &[f64; 4], tol: f64) -> bool {
    type1_binding(d, tol).satisfied
}

/// Type-II conditions `d3 = d2` and `d2² ≤ d0·d1`, on `d` in the Type-II
/// domain `d0 > d1 > 0`.
pub fn type2_constraints(d: &[f64; 4], tol: f64) -> bool {
    type2_checks_from_invariants(d[0] * d[1], d[2], d[3], tol).iter().all(|c| c.satisfied)
}

/// Both Type-II checks from the invariants `(d0·d1, d2, d3)`.
pub fn type2_checks_from_invariants(product: f64, d2: f64, d3: f64, tol: f64) -> [ConstraintCheck; 2] {
    let scale = product.abs().sqrt().max(d2.abs()).max(d3.abs());
    let eq_slack = -(d3 - d2).abs();
    let sq_slack = product - d2 * d2;
    [
        ConstraintCheck { satisfied: -eq_slack <= tol * scale, index: 1, formula: TYPE2_FORMULAS[0], slack: eq_slack },
        ConstraintCheck { satisfied: sq_slack >= -tol * scale * scale, index: 2, formula: TYPE2_FORMULAS[1], slack: sq_slack },
    ]
}

/// Eigenvalues of `H_{diag(d)}`, descending: the two 2×2 blocks give
/// `(d0 + d1 ± (d2 + d3))/2` and `(d0 − d1 ± (d2 − d3))/2`.
pub fn h_eigs_diagonal(d: &[f64; 4]) -> [f64; 4] {
    let mut e = type1_slacks(d).map(|s| 0.5 * s);
    e.sort_by(|a, b| b.total_cmp(a));
    e
}

fn lorentz_norm(v: &Vector4<f64>) -> f64 {
    v[0] * v[0] - v[1] * v[1] - v[2] * v[2] - v[3] * v[3]
}

fn lorentz_dot(a: &Vector4<f64>, b: &Vector4<f64>) -> f64 {
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3]
}

struct Cluster {
    value: f64,
    algebraic: usize,
    basis: Vec<Vector4<f64>>,
}

fn clusters(n: &Matrix4<f64>, eigs: &[f64; 4], gap: f64) -> Vec<Cluster> {
    let mut sorted = *eigs;
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut groups: Vec<Vec<f64>> = Vec::new();
    for x in sorted {
        match groups.last_mut() {
            Some(g) if g.last().is_some_and(|&y| y - x <= gap) => g.push(x),
            _ => groups.push(vec![x]),
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let value = g.iter().sum::<f64>() / g.len() as f64;
            // geometric multiplicity lies in [1, algebraic]; the rank test only
            // matters for repeated eigenvalues
            let (sv, _, right) = svd_sorted(&(n - Matrix4::identity() * value));
            let below = sv.iter().filter(|&&x| x <= gap).count();
            let geometric = below.clamp(1, g.len());
            Cluster { value, algebraic: g.len(), basis: right[4 - geometric..].to_vec() }
        })
        .collect()
}

/// Number of positive, negative and near-zero eigenvalues of the G-Gram
/// matrix of an eigenspace basis.
fn signature(basis: &[Vector4<f64>], gap: f64) -> (usize, usize, usize) {
    let k = basis.len();
    let gram = DMatrix::from_fn(k, k, |i, j| lorentz_dot(&basis[i], &basis[j]));
    let eig = gram.symmetric_eigen();
    let pos = eig.eigenvalues.iter().filter(|&&x| x > gap).count();
    let neg = eig.eigenvalues.iter().filter(|&&x| x < -gap).count();
    (pos, neg, k - pos - neg)
}

fn in_type2_canonical_form(m: &Matrix4<f64>, tol: f64) -> Option<[f64; 4]> {
    let scale = m.norm();
    let off_pattern = (0..4)
        .flat_map(|r| (0..4).map(move |c| (r, c)))
        .filter(|&(r, c)| r != c && (r, c) != (0, 1))
        .map(|(r, c)| m[(r, c)].abs())
        .fold(0.0_f64, f64::max);
    let d = [m[(0, 0)], m[(1, 1)], m[(2, 2)], m[(3, 3)]];
    let coupling_ok = (m[(0, 1)] - (d[0] - d[1])).abs() <= tol * scale;
    (off_pattern <= tol * scale && coupling_ok && d[0] > d[1] && d[1] > 0.0).then_some(d)
}

/// Family of `M` under Lorentz double cosets, with canonical parameters.
pub fn classify(m: &MuellerCandidate, tol: f64) -> CanonicalClass {
    let raw_n = n_matrix(m);
    let n_eigenvalues: [Complex64; 4] = {
        let e = raw_n.complex_eigenvalues();
        [e[0], e[1], e[2], e[3]]
    };

    if !certify_cone(m, tol).is_pre_mueller {
        return CanonicalClass::bare(Family::NotPreMueller, n_eigenvalues);
    }
    let sigma = m.spectral_norm();
    if sigma == 0.0 {
        return CanonicalClass::indeterminate(n_eigenvalues, "zero matrix maps every state to the apex");
    }
    let gap = tol.sqrt();
    let mn = m.matrix() / sigma;
    let (sv, left, right) = svd_sorted(&mn);

    if sv[1] <= gap {
        let (mut u, mut v) = (left[0], right[0]);
        if u[0] < 0.0 {
            u = -u;
            v = -v;
        }
        let (gu, gv) = (lorentz_norm(&u), lorentz_norm(&v));
        let null = |x: f64| x.abs() <= gap;
        let fro = m.matrix().norm();
        match (null(gu), null(gv), gu > gap, gv > gap) {
            (true, true, _, _) => {
                return CanonicalClass {
                    d: Some([0.5 * fro, 0.0, 0.0, 0.0]),
                    ..CanonicalClass::bare(Family::Polarizer, n_eigenvalues)
                };
            }
            (true, false, _, true) => {
                return CanonicalClass {
                    d: Some([fro / 2f64.sqrt(), 0.0, 0.0, 0.0]),
                    ..CanonicalClass::bare(Family::PinMap, n_eigenvalues)
                };
            }
            (false, _, true, true) => {} // rank-one Type-I such as the depolarizer
            _ => {
                return CanonicalClass::indeterminate(
                    n_eigenvalues,
                    format!("rank-one matrix with output direction G-norm {gu:.3e} and input covector G-norm {gv:.3e}"),
                );
            }
        }
    }

    let n = n_matrix(&MuellerCandidate::new(mn));
    let ce = n.complex_eigenvalues();
    if ce.iter().any(|z| z.im.abs() > gap) {
        return CanonicalClass::indeterminate(n_eigenvalues, "N has complex eigenvalues");
    }
    let eigs = [ce[0].re, ce[1].re, ce[2].re, ce[3].re];
    if eigs.iter().any(|&x| x < -gap) {
        return CanonicalClass::indeterminate(n_eigenvalues, "N has a negative eigenvalue");
    }
    let groups = clusters(&n, &eigs, gap);
    let deficiency: usize = groups.iter().map(|c| c.algebraic - c.basis.len()).sum();
    let det_sign = if mn.determinant() < 0.0 { -1.0 } else { 1.0 };
    let root = |x: f64| sigma * x.max(0.0).sqrt();

    match deficiency {
        0 => {
            let mut timelike = Vec::new();
            let mut spacelike = Vec::new();
            for c in &groups {
                let (pos, neg, zero) = signature(&c.basis, gap);
                if zero > 0 {
                    return CanonicalClass::indeterminate(n_eigenvalues, "eigenspace of N contains a lightlike direction");
                }
                timelike.extend(std::iter::repeat_n(c.value, pos));
                spacelike.extend(std::iter::repeat_n(c.value, neg));
            }
            if timelike.len() != 1 {
                return CanonicalClass::indeterminate(
                    n_eigenvalues,
                    format!("expected one timelike eigenvector of N, found {}", timelike.len()),
                );
            }
            spacelike.sort_by(|a, b| b.total_cmp(a));
            if timelike[0] < spacelike[0] - gap {
                return CanonicalClass::indeterminate(n_eigenvalues, "timelike eigenvalue of N is not the largest");
            }
            let d = [root(timelike[0]), root(spacelike[0]), root(spacelike[1]), det_sign * root(spacelike[2])];
            let factors = factor_type1(m, tol).ok().map(|f| LorentzFactors { l_left: f.l_left, l_right: f.l_right });
            CanonicalClass { d: Some(d), factors, ..CanonicalClass::bare(Family::TypeI, n_eigenvalues) }
        }
        1 => {
            let jordan = groups.iter().find(|c| c.basis.len() < c.algebraic).expect("defective cluster");
            let mut rest: Vec<f64> = eigs.to_vec();
            for _ in 0..2 {
                let k = rest
                    .iter()
                    .enumerate()
                    .min_by(|a, b| (a.1 - jordan.value).abs().total_cmp(&(b.1 - jordan.value).abs()))
                    .map(|(k, _)| k)
                    .expect("nonempty");
                rest.remove(k);
            }
            rest.sort_by(|a, b| b.total_cmp(a));
            let invariants = [sigma * sigma * jordan.value, root(rest[0]), det_sign * root(rest[1])];
            CanonicalClass {
                d: in_type2_canonical_form(m.matrix(), tol),
                type2_invariants: Some(invariants),
                ..CanonicalClass::bare(Family::TypeII, n_eigenvalues)
            }
        }
        k => CanonicalClass::indeterminate(n_eigenvalues, format!("N has Jordan deficiency {k}")),
    }
}

/// G-orthonormalize in order; the first vector is timelike, the rest spacelike.
fn lorentz_gram_schmidt(vs: &mut [Vector4<f64>]) {
    for i in 0..vs.len() {
        for j in 0..i {
            let sign = lorentz_norm(&vs[j]).signum();
            let proj = lorentz_dot(&vs[i], &vs[j]) * sign;
            let step = vs[j] * proj;
            vs[i] -= step;
        }
        let nrm = lorentz_norm(&vs[i]).abs().sqrt();
        vs[i] /= nrm;
    }
}

fn factor_type1(m: &MuellerCandidate, tol: f64) -> Result<Type1Factorization> {
    let sigma = m.spectral_norm();
    if sigma == 0.0 {
        return Err(CertError::Singular);
    }
    let gap = tol.sqrt();
    let mn = m.matrix() / sigma;
    if svd_sorted(&mn).0[3] <= gap {
        return Err(CertError::Singular);
    }
    let n = n_matrix(&MuellerCandidate::new(mn));
    let ce = n.complex_eigenvalues();
    let mut eigs = [ce[0].re, ce[1].re, ce[2].re, ce[3].re];
    eigs.sort_by(|a, b| b.total_cmp(a));
    let min_gap = eigs.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min);
    if min_gap < gap {
        return Err(CertError::DegenerateSpectrum { gap: min_gap });
    }

    let mut vectors: Vec<(f64, Vector4<f64>)> = eigs
        .iter()
        .map(|&l| {
            let (_, _, right) = svd_sorted(&(n - Matrix4::identity() * l));
            (l, right[3])
        })
        .collect();
    let timelike: Vec<usize> = (0..4).filter(|&k| lorentz_norm(&vectors[k].1) > 0.0).collect();
    if timelike.len() != 1 {
        return Err(CertError::NotTypeI(format!("{} timelike eigenvectors of N", timelike.len())));
    }
    let t = vectors.remove(timelike[0]);
    // remaining spacelike vectors stay in descending eigenvalue order
    let mut basis = [t.1, vectors[0].1, vectors[1].1, vectors[2].1];
    let lambdas = [t.0, vectors[0].0, vectors[1].0, vectors[2].0];
    lorentz_gram_schmidt(&mut basis);
    if basis[0][0] < 0.0 {
        basis[0] = -basis[0];
    }
    let mut x = Matrix4::from_columns(&basis);
    if x.determinant() < 0.0 {
        x.set_column(3, &(-basis[3]));
    }

    let det_sign = if mn.determinant() < 0.0 { -1.0 } else { 1.0 };
    let d = [
        sigma * lambdas[0].max(0.0).sqrt(),
        sigma * lambdas[1].max(0.0).sqrt(),
        sigma * lambdas[2].max(0.0).sqrt(),
        det_sign * sigma * lambdas[3].max(0.0).sqrt(),
    ];
    let g = g_metric();
    let l_right = g * x.transpose() * g;
    let d_inv = Matrix4::from_diagonal(&Vector4::from(d.map(|v| 1.0 / v)));
    let l_left = m.matrix() * x * d_inv;
    let rebuilt = l_left * Matrix4::from_diagonal(&Vector4::from(d)) * l_right;
    let residual = (rebuilt - m.matrix()).norm() / m.matrix().norm();
    let lorentz_residual = (l_left.transpose() * g * l_left - g).norm() / l_left.norm_squared();
    if residual.max(lorentz_residual) > gap || l_left[(0, 0)] <= 0.0 {
        return Err(CertError::FactorizationFailed { residual: residual.max(lorentz_residual) });
    }
    Ok(Type1Factorization { l_left, d, l_right, residual })
}

/// `M = L_ℓ · diag(d) · L_r` for a nonsingular Type-I matrix whose `N` has
/// a nondegenerate spectrum.
pub fn type1_factor(m: &MuellerCandidate, tol: f64) -> Result<Type1Factorization> {
    let class = classify(m, tol);
    if class.family != Family::TypeI {
        return Err(CertError::NotTypeI(format!("classified as {}", class.family)));
    }
    factor_type1(m, tol)
}
