//! Pre-Mueller certification: does `M` map the solid Stokes cone into itself?
//!
//! The cone is the convex hull of its extreme rays (pure states
//! `S = (1, s)`, `‖s‖ = 1`), so by linearity it is enough to check that every
//! pure input lands in the closed forward cone. That reduces to two global
//! minimizations over the unit sphere:
//!
//! * intensity: `min_s M00 + r·s = M00 − ‖r‖` with `r = (M01, M02, M03)`,
//! * Lorentz form: `min_s (1, s)ᵀ Mᵀ G M (1, s)`, a quadratic on the sphere
//!   solved exactly by [`sphere_quadratic_min`].

use nalgebra::{Matrix3, Vector3};

use crate::calculus::{g_metric, MuellerCandidate};
use crate::linalg::{symmetric_eigen3, unit_or};

/// Minimum of `sᵀ A s + 2 bᵀ s` over the unit sphere and a point attaining it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereMin {
    pub value: f64,
    pub point: Vector3<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BindingMargin {
    Intensity,
    Lorentz,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeVerdict {
    pub is_pre_mueller: bool,
    /// `min` output `S0` over pure unit-intensity inputs.
    pub intensity_margin: f64,
    /// `min` output `SᵀGS` over pure unit-intensity inputs.
    pub lorentz_margin: f64,
    /// Input direction on the Poincaré sphere achieving the binding margin.
    pub worst_input: Vector3<f64>,
    pub binding: BindingMargin,
    /// Largest singular value of `M`, the scale the tolerance is applied at.
    pub scale: f64,
}

fn quad(a: &Matrix3<f64>, b: &Vector3<f64>, s: &Vector3<f64>) -> f64 {
    s.dot(&(a * s)) + 2.0 * b.dot(s)
}

/// Exact global minimizer of `sᵀ A s + 2 bᵀ s` subject to `‖s‖ = 1`.
///
/// Stationary points satisfy `(A − μI) s = −b`; the global one has
/// `μ ≤ λ_min(A)`. Writing `t = λ_min − μ ≥ 0` and `β = Vᵀ b` in the
/// eigenbasis of `A`, the multiplier solves the secular equation
/// `Σ β_i² / (λ_i − λ_min + t)² = 1`, which is monotone in `t` and is solved
/// by safeguarded Newton on `1/√φ(t) − 1` inside a bisection bracket. When
/// `b` has no component along the bottom eigenspace and the equation has no
/// root (`φ(0⁺) ≤ 1`), the minimizer is completed with a bottom eigenvector.
pub fn sphere_quadratic_min(a: &Matrix3<f64>, b: &Vector3<f64>) -> SphereMin {
    let (lambda, v) = symmetric_eigen3(a);
    let beta = v.transpose() * b;
    let scale = lambda[0].abs().max(lambda[2].abs()).max(b.norm());
    if scale == 0.0 {
        return SphereMin { value: 0.0, point: Vector3::x() };
    }
    let a = (a + a.transpose()).scale(0.5);

    let gaps: [f64; 3] = std::array::from_fn(|i| (lambda[i] - lambda[0]).max(0.0));
    let cluster = 1e-13 * scale;
    let bottom_mass: f64 = (0..3).filter(|&i| gaps[i] <= cluster).map(|i| beta[i] * beta[i]).sum();
    let upper_phi: f64 = (0..3)
        .filter(|&i| gaps[i] > cluster)
        .map(|i| (beta[i] / gaps[i]).powi(2))
        .sum();

    let secular_point = |t: f64| -> Vector3<f64> {
        let coeffs = Vector3::from_fn(|i, _| -beta[i] / (gaps[i] + t));
        v * coeffs
    };

    let point = if bottom_mass <= (1e-14 * scale).powi(2) && upper_phi <= 1.0 {
        // hard case: μ = λ_min, fill the remaining norm along the bottom eigenvector
        let partial = Vector3::from_fn(|i, _| if gaps[i] > cluster { -beta[i] / gaps[i] } else { 0.0 });
        let tail = (1.0 - partial.norm_squared()).max(0.0).sqrt();
        v * partial + v.column(0) * tail
    } else {
        let phi = |t: f64| -> f64 { (0..3).map(|i| (beta[i] / (gaps[i] + t)).powi(2)).sum() };
        let dphi = |t: f64| -> f64 { (0..3).map(|i| -2.0 * beta[i].powi(2) / (gaps[i] + t).powi(3)).sum() };
        // φ(‖b‖) ≤ 1 always, φ(0⁺) > 1 here
        let mut lo = 0.0_f64;
        let mut hi = b.norm();
        let mut t = hi;
        for _ in 0..200 {
            let p = phi(t);
            if p > 1.0 {
                lo = t;
            } else {
                hi = t;
            }
            if hi - lo <= 4.0 * f64::EPSILON * hi.max(f64::MIN_POSITIVE) {
                break;
            }
            // Newton on g(t) = 1/√φ − 1
            let g = 1.0 / p.sqrt() - 1.0;
            let dg = -0.5 * p.powf(-1.5) * dphi(t);
            let newton = t - g / dg;
            t = if newton.is_finite() && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        }
        secular_point(hi)
    };

    let point = unit_or(point, v.column(0).into_owned());
    let mut best = SphereMin { value: quad(&a, b, &point), point };
    // eigen-axis candidates are feasible points; keep whichever is lowest
    for i in 0..3 {
        for sign in [1.0, -1.0] {
            let s: Vector3<f64> = v.column(i) * sign;
            let val = quad(&a, b, &s);
            if val < best.value {
                best = SphereMin { value: val, point: s };
            }
        }
    }
    best
}

/// Decide whether `M` maps the solid Stokes cone into itself.
///
/// Margins are returned in the units of `M`; the verdict compares
/// `intensity_margin / σ` and `lorentz_margin / σ²` against `−tol`, with `σ`
/// the largest singular value, so it is invariant under rescaling. Pure
/// inputs mapped to the zero vector count as landing on the apex.
pub fn certify_cone(m: &MuellerCandidate, tol: f64) -> ConeVerdict {
    let mm = m.matrix();
    let scale = m.spectral_norm();

    let r = Vector3::new(mm[(0, 1)], mm[(0, 2)], mm[(0, 3)]);
    let intensity_margin = mm[(0, 0)] - r.norm();
    let intensity_input = unit_or(-r, Vector3::x());

    let g = g_metric();
    let q = mm.transpose() * g * mm;
    let a: Matrix3<f64> = q.fixed_view::<3, 3>(1, 1).into_owned();
    let b: Vector3<f64> = q.fixed_view::<3, 1>(1, 0).into_owned();
    let sm = sphere_quadratic_min(&a, &b);
    let lorentz_margin = q[(0, 0)] + sm.value;

    if scale == 0.0 {
        return ConeVerdict {
            is_pre_mueller: true,
            intensity_margin,
            lorentz_margin,
            worst_input: Vector3::x(),
            binding: BindingMargin::Intensity,
            scale,
        };
    }

    let norm_intensity = intensity_margin / scale;
    let norm_lorentz = lorentz_margin / (scale * scale);
    let (binding, worst_input) = if norm_intensity <= norm_lorentz {
        (BindingMargin::Intensity, intensity_input)
    } else {
        (BindingMargin::Lorentz, sm.point)
    };

    ConeVerdict {
        is_pre_mueller: norm_intensity >= -tol && norm_lorentz >= -tol,
        intensity_margin,
        lorentz_margin,
        worst_input,
        binding,
        scale,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::DEFAULT_TOL;
    use nalgebra::Matrix4;

    #[test]
    fn identity_quadratic() {
        let r = sphere_quadratic_min(&Matrix3::identity(), &Vector3::zeros());
        assert!((r.value - 1.0).abs() < 1e-15);
        assert!((r.point.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn smallest_eigenvalue_without_linear_term() {
        let a = Matrix3::from_diagonal(&Vector3::new(1.0, 2.0, 3.0));
        let r = sphere_quadratic_min(&a, &Vector3::zeros());
        assert!((r.value - 1.0).abs() < 1e-15);
        assert!((r.point[0].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_linear_term() {
        let r = sphere_quadratic_min(&Matrix3::zeros(), &Vector3::new(0.0, 0.0, 1.0));
        assert!((r.value + 2.0).abs() < 1e-14);
        assert!((r.point - Vector3::new(0.0, 0.0, -1.0)).norm() < 1e-7);
    }

    #[test]
    fn hard_case_with_small_gradient() {
        // b ⟂ bottom eigenvector, φ(0⁺) = 0.25 < 1
        let a = Matrix3::from_diagonal(&Vector3::new(-1.0, 1.0, 2.0));
        let b = Vector3::new(0.0, 1.0, 0.0);
        let r = sphere_quadratic_min(&a, &b);
        // s = (±√0.75, −0.5, 0) gives −0.75 + 0.25 − 1 = −1.5
        assert!((r.value + 1.5).abs() < 1e-13, "{}", r.value);
        assert!((r.point[1] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn near_hard_case_matches_limit() {
        let a = Matrix3::from_diagonal(&Vector3::new(-1.0, 1.0, 2.0));
        let b = Vector3::new(1e-12, 1.0, 0.0);
        let r = sphere_quadratic_min(&a, &b);
        assert!((r.value + 1.5).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn identity_is_pre_mueller_with_zero_lorentz_margin() {
        let v = certify_cone(&MuellerCandidate::new(Matrix4::identity()), DEFAULT_TOL);
        assert!(v.is_pre_mueller);
        assert!(v.lorentz_margin.abs() < 1e-14);
        assert!((v.intensity_margin - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mirror_is_pre_mueller() {
        let v = certify_cone(&MuellerCandidate::diagonal([1.0, 1.0, 1.0, -1.0]), DEFAULT_TOL);
        assert!(v.is_pre_mueller);
        assert!(v.lorentz_margin.abs() < 1e-14);
    }

    #[test]
    fn overamplified_axis_is_not_pre_mueller() {
        let v = certify_cone(&MuellerCandidate::diagonal([1.0, 1.5, 0.0, 0.0]), DEFAULT_TOL);
        assert!(!v.is_pre_mueller);
        assert!((v.lorentz_margin + 1.25).abs() < 1e-13);
        assert_eq!(v.binding, BindingMargin::Lorentz);
        assert!((v.worst_input[0].abs() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn backward_cone_image_caught_by_intensity() {
        let v = certify_cone(&MuellerCandidate::diagonal([-1.0, 0.0, 0.0, 0.0]), DEFAULT_TOL);
        assert!(!v.is_pre_mueller);
        assert_eq!(v.binding, BindingMargin::Intensity);
    }

    #[test]
    fn zero_matrix_maps_to_apex() {
        let v = certify_cone(&MuellerCandidate::new(Matrix4::zeros()), DEFAULT_TOL);
        assert!(v.is_pre_mueller);
    }

    #[test]
    fn diattenuator_margin() {
        // M00 = 1, M01 = 0.6: output intensity 1 + 0.6 s1, minimum 0.4 at s = (−1, 0, 0)
        let mut m = Matrix4::identity();
        m[(0, 1)] = 0.6;
        let v = certify_cone(&MuellerCandidate::new(m), DEFAULT_TOL);
        assert!((v.intensity_margin - 0.4).abs() < 1e-15);
    }
}
