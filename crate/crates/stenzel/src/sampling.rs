//! Seeded, reproducible random geometry: points, tangents and rotations.
//! All draws happen in `f64` and are lifted into the scalar type, so a fixed
//! seed produces the same sample stream for every instantiation.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::quadric::{
    project_tangent, ComplexVector, CotangentPoint, OrthogonalMatrix, QuadricPoint, TangentVector,
};
use crate::scalar::Real;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal via Box-Muller on the uniform stream.
pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn unit_vector<T: Real>(rng: &mut ChaCha8Rng, dim: usize) -> Vec<T> {
    loop {
        let raw: Vec<f64> = (0..dim).map(|_| gaussian(rng)).collect();
        let norm: f64 = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return raw.iter().map(|&x| T::of(x / norm)).collect();
        }
    }
}

/// A random point of `T*S^n` with fiber radius uniform in `[0, rho_max]`.
pub fn cotangent_point<T: Real>(rng: &mut ChaCha8Rng, n: usize, rho_max: f64) -> CotangentPoint<T> {
    let x = unit_vector::<f64>(rng, n + 1);
    // Fiber direction: random vector orthogonalized against the base point.
    let dir = loop {
        let raw: Vec<f64> = (0..n + 1).map(|_| gaussian(rng)).collect();
        let dot: f64 = raw.iter().zip(&x).map(|(a, b)| a * b).sum();
        let ortho: Vec<f64> = raw.iter().zip(&x).map(|(a, b)| a - dot * b).collect();
        let norm: f64 = ortho.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-6 {
            break ortho.iter().map(|v| v / norm).collect::<Vec<f64>>();
        }
    };
    let rho: f64 = rng.gen_range(0.0..rho_max);
    let xv = x.iter().map(|&v| T::of(v)).collect();
    let xi = dir.iter().map(|&v| T::of(v * rho)).collect();
    CotangentPoint::new(xv, xi).expect("sampled point satisfies the bundle constraints")
}

pub fn quadric_point<T: Real>(rng: &mut ChaCha8Rng, n: usize, rho_max: f64) -> QuadricPoint<T> {
    cotangent_point::<T>(rng, n, rho_max)
        .to_quadric()
        .expect("embedding lands on the quadric")
}

/// A random element of `SO(dim)`: Gram-Schmidt of a Gaussian matrix with the
/// determinant sign fixed on the last column.
pub fn rotation<T: Real>(rng: &mut ChaCha8Rng, dim: usize) -> OrthogonalMatrix<T> {
    loop {
        let mut cols: Vec<Vec<f64>> = Vec::with_capacity(dim);
        let mut ok = true;
        for _ in 0..dim {
            let mut v: Vec<f64> = (0..dim).map(|_| gaussian(rng)).collect();
            for c in &cols {
                let dot: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
                for (vi, ci) in v.iter_mut().zip(c) {
                    *vi -= dot * ci;
                }
            }
            let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1e-8 {
                ok = false;
                break;
            }
            cols.push(v.iter().map(|x| x / norm).collect());
        }
        if !ok {
            continue;
        }
        // det sign: fix by flipping the last column when negative.
        let mut m = vec![vec![0.0f64; dim]; dim];
        for (j, col) in cols.iter().enumerate() {
            for i in 0..dim {
                m[i][j] = col[i];
            }
        }
        let det = crate::exterior::det_real(&mut m.clone());
        if det < 0.0 {
            for row in m.iter_mut() {
                row[dim - 1] = -row[dim - 1];
            }
        }
        let lifted: Vec<Vec<T>> = m.iter().map(|r| r.iter().map(|&v| T::of(v)).collect()).collect();
        return OrthogonalMatrix::new(lifted).expect("Gram-Schmidt output is orthogonal");
    }
}

/// A random holomorphic tangent vector at `z`, of Euclidean norm about one.
pub fn tangent_vector<T: Real>(rng: &mut ChaCha8Rng, z: &QuadricPoint<T>) -> TangentVector<T> {
    loop {
        let dim = z.vector().len();
        let raw = ComplexVector::<T>(
            (0..dim)
                .map(|_| num_complex::Complex::new(T::of(gaussian(rng)), T::of(gaussian(rng))))
                .collect(),
        );
        let v = project_tangent(z, &raw);
        let norm = v.norm();
        if norm > T::of(1e-3) {
            let v = v.scale(T::one() / norm);
            return TangentVector::new(z.clone(), v).expect("projected vector is tangent");
        }
    }
}
