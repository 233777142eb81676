// Shared random generators for the integration tests.
#![allow(dead_code)]

use mueller_cert::{mueller_from_jones, JonesMatrix, MuellerCandidate};
use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(r: &mut ChaCha8Rng) -> f64 {
    r.sample(StandardNormal)
}

pub fn gaussian_matrix(r: &mut ChaCha8Rng) -> Matrix4<f64> {
    Matrix4::from_fn(|_, _| normal(r))
}

pub fn gaussian_complex(r: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(normal(r), normal(r))
}

pub fn gaussian_jones(r: &mut ChaCha8Rng) -> JonesMatrix {
    JonesMatrix(Matrix2::from_fn(|_, _| gaussian_complex(r)))
}

/// Proper orthochronous Lorentz matrix from an SL(2,C) element near the
/// identity, `I + scale·Z` rescaled to unit determinant. Draws with boost
/// factor `L00 > 4` are rejected to keep conditioning moderate.
pub fn random_lorentz(r: &mut ChaCha8Rng, scale: f64) -> Matrix4<f64> {
    loop {
        let z = Matrix2::from_fn(|_, _| gaussian_complex(r) * scale);
        if let Some(j) = JonesMatrix(Matrix2::identity() + z).to_unit_determinant() {
            let l = *mueller_from_jones(&j).matrix();
            if l[(0, 0)] <= 4.0 {
                return l;
            }
        }
    }
}

/// `d0 > d1 > d2 > |d3|` with gaps of at least `gap` between the squares.
pub fn distinct_type1_d(r: &mut ChaCha8Rng, gap: f64) -> [f64; 4] {
    loop {
        let mut a: [f64; 4] = std::array::from_fn(|_| r.random_range(0.05..2.0));
        a.sort_by(|x, y| y.total_cmp(x));
        let sq: Vec<f64> = a.iter().map(|x| x * x).collect();
        if sq.windows(2).all(|w| w[0] - w[1] >= gap) {
            if r.random_bool(0.5) {
                a[3] = -a[3];
            }
            return a;
        }
    }
}

pub fn max_abs_diff(a: &Matrix4<f64>, b: &Matrix4<f64>) -> f64 {
    (a - b).abs().max()
}

pub fn candidate(m: Matrix4<f64>) -> MuellerCandidate {
    MuellerCandidate::new(m)
}

pub fn max_abs_complex(a: &Matrix4<Complex64>) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
