//! The Calabi-Yau structure tensors on the quadric: the rescaled Liouville
//! 1-form, the Kähler form, the induced metric, the holomorphic volume form
//! and the normalization ratio relating the two volume expressions.
//!
//! The holomorphic form is evaluated as the raw ambient determinant with the
//! position vector in the first slot; the multiplicative normalization is
//! quantified separately by [`normalization_ratio`], so the "imaginary part
//! vanishes" tests are insensitive to it.

use num_complex::Complex;

use crate::exterior::{det_complex, pfaffian, sym_eigenvalues, wedge_conj_pairing};
use crate::potential::Profile;
use crate::quadric::{ComplexVector, QuadricPoint, TangentVector};
use crate::scalar::Real;
use crate::{Error, Result};

/// Flat Kähler pairing of `C^{n+1}`: `omega_0(a, b) = <J a, b>`.
pub fn omega0<T: Real>(a: &ComplexVector<T>, b: &ComplexVector<T>) -> T {
    -(a.hermitian(b)).im
}

/// The 1-form `alpha(v) = (1/2) u'(|z|^2) <v, J z>` at the base point of `v`.
pub fn one_form<T: Real>(profile: &Profile<T>, v: &TangentVector<T>) -> Result<T> {
    let z = v.base();
    let up = profile.u_prime(z.norm_sqr())?;
    Ok(T::of(0.5) * up * omega0(z.vector(), v.vector()))
}

/// The Kähler form on two raw ambient vectors given the potential
/// derivatives; shared with the cone evaluators which use different `u`.
pub(crate) fn kahler_form_raw<T: Real>(
    up: T,
    us: T,
    z: &ComplexVector<T>,
    v: &ComplexVector<T>,
    w: &ComplexVector<T>,
) -> T {
    let correction = w.inner(z) * omega0(v, z) - v.inner(z) * omega0(w, z);
    up * omega0(v, w) + us * correction
}

fn derivatives_at<T: Real>(profile: &Profile<T>, z: &QuadricPoint<T>) -> Result<(T, T)> {
    let tau = z.tau();
    Ok((profile.u_prime_at_tau(tau)?, profile.u_second_at_tau(tau)?))
}

/// The Kähler form of the Ricci-flat metric evaluated on two tangent
/// vectors at the same base point.
pub fn kahler_form<T: Real>(
    profile: &Profile<T>,
    v: &TangentVector<T>,
    w: &TangentVector<T>,
) -> Result<T> {
    if !v.same_base(w) {
        return Err(Error::Argument("tangent vectors have different base points".into()));
    }
    let (up, us) = derivatives_at(profile, v.base())?;
    Ok(kahler_form_raw(up, us, v.base().vector(), v.vector(), w.vector()))
}

/// The Riemannian metric `g(v, w) = omega(v, J w)`.
pub fn metric<T: Real>(
    profile: &Profile<T>,
    v: &TangentVector<T>,
    w: &TangentVector<T>,
) -> Result<T> {
    if !v.same_base(w) {
        return Err(Error::Argument("tangent vectors have different base points".into()));
    }
    let (up, us) = derivatives_at(profile, v.base())?;
    Ok(metric_raw(up, us, v.base().vector(), v.vector(), w.vector()))
}

pub(crate) fn metric_raw<T: Real>(
    up: T,
    us: T,
    z: &ComplexVector<T>,
    v: &ComplexVector<T>,
    w: &ComplexVector<T>,
) -> T {
    kahler_form_raw(up, us, z, v, &w.j())
}

/// A frame of `n` tangent vectors at a common base point, rank-checked on
/// construction: the Gram matrix must have its smallest eigenvalue above
/// `1e-8` times the largest.
#[derive(Clone, Debug)]
pub struct TangentFrame<T: Real> {
    base: QuadricPoint<T>,
    vectors: Vec<ComplexVector<T>>,
}

impl<T: Real> TangentFrame<T> {
    pub fn new(base: QuadricPoint<T>, vectors: Vec<ComplexVector<T>>) -> Result<Self> {
        let n = base.n();
        if vectors.len() != n {
            return Err(Error::Argument(format!(
                "frame needs {n} vectors, got {}",
                vectors.len()
            )));
        }
        for v in &vectors {
            let residual = base.vector().bilinear(v).norm();
            let tol = crate::quadric::constraint_tol::<T>()
                * (T::one() + base.vector().norm() * v.norm());
            if residual > tol {
                return Err(Error::Constraint {
                    what: "frame vector tangency",
                    residual: residual.as_f64(),
                    tol: tol.as_f64(),
                });
            }
        }
        let gram: Vec<Vec<T>> = vectors
            .iter()
            .map(|a| vectors.iter().map(|b| a.inner(b)).collect())
            .collect();
        let ev = sym_eigenvalues(&gram);
        let largest = ev[ev.len() - 1];
        if !(ev[0] > T::of(1e-8) * largest) {
            return Err(Error::Degenerate(format!(
                "frame rank below {n}: gram eigenvalue ratio {:.3e}",
                (ev[0] / largest).as_f64()
            )));
        }
        Ok(TangentFrame { base, vectors })
    }

    pub fn base(&self) -> &QuadricPoint<T> {
        &self.base
    }

    pub fn vectors(&self) -> &[ComplexVector<T>] {
        &self.vectors
    }

    /// Riemannian volume of the frame parallelepiped.
    pub fn volume(&self, profile: &Profile<T>) -> Result<T> {
        let (up, us) = derivatives_at(profile, &self.base)?;
        let z = self.base.vector();
        let gram: Vec<Vec<T>> = self
            .vectors
            .iter()
            .map(|a| self.vectors.iter().map(|b| metric_raw(up, us, z, a, b)).collect())
            .collect();
        let det = crate::exterior::det_real(&mut gram.clone());
        if det <= T::zero() {
            return Err(Error::Degenerate("metric Gram determinant not positive".into()));
        }
        Ok(det.sqrt())
    }
}

/// The holomorphic n-form: the ambient `(n+1) x (n+1)` determinant with the
/// position vector in the first column and the frame in the rest.
pub fn holomorphic_volume<T: Real>(frame: &TangentFrame<T>) -> Complex<T> {
    holomorphic_volume_raw(frame.base().vector(), frame.vectors())
}

pub(crate) fn holomorphic_volume_raw<T: Real>(
    first: &ComplexVector<T>,
    vectors: &[ComplexVector<T>],
) -> Complex<T> {
    let dim = first.len();
    let mut m: Vec<Vec<Complex<T>>> = (0..dim)
        .map(|i| {
            let mut row = Vec::with_capacity(dim);
            row.push(first.0[i]);
            for v in vectors {
                row.push(v.0[i]);
            }
            row
        })
        .collect();
    det_complex(&mut m)
}

/// A real tangent frame orthonormal for the Ricci-flat metric, built by
/// Gram-Schmidt from the projected coordinate directions. Returns `2n`
/// vectors spanning the real tangent space at `z`.
pub fn orthonormal_frame<T: Real>(
    profile: &Profile<T>,
    z: &QuadricPoint<T>,
) -> Result<Vec<ComplexVector<T>>> {
    let n = z.n();
    let (up, us) = derivatives_at(profile, z)?;
    let zv = z.vector();
    let mut frame: Vec<ComplexVector<T>> = Vec::with_capacity(2 * n);
    let mut candidates = Vec::with_capacity(2 * (n + 1));
    for k in 0..=n {
        let mut e = ComplexVector::zeros(n + 1);
        e.0[k] = Complex::new(T::one(), T::zero());
        candidates.push(e.clone());
        candidates.push(e.j());
    }
    for cand in candidates {
        if frame.len() == 2 * n {
            break;
        }
        let mut v = crate::quadric::project_tangent(z, &cand);
        for prev in &frame {
            let coeff = metric_raw(up, us, zv, &v, prev);
            v = v.sub(&prev.scale(coeff));
        }
        let norm_sq = metric_raw(up, us, zv, &v, &v);
        if norm_sq > T::of(1e-12) {
            frame.push(v.scale(T::one() / norm_sq.sqrt()));
        }
    }
    if frame.len() != 2 * n {
        return Err(Error::Degenerate(format!(
            "orthonormalization produced {} of {} directions",
            frame.len(),
            2 * n
        )));
    }
    Ok(frame)
}

/// The ratio `(omega^n / n!)` over `(-1)^{n(n-1)/2} (i/2)^n Omega ∧ conj(Omega)`
/// on an orthonormal real frame. Constancy of this number over the quadric
/// is the normalization statement tying the metric volume to the
/// holomorphic volume form.
pub fn normalization_ratio<T: Real>(
    profile: &Profile<T>,
    z: &QuadricPoint<T>,
    frame: &[ComplexVector<T>],
) -> Result<T> {
    let n = z.n();
    if frame.len() != 2 * n {
        return Err(Error::Argument(format!("need 2n = {} frame vectors", 2 * n)));
    }
    let (up, us) = derivatives_at(profile, z)?;
    let zv = z.vector();
    // Orthonormality is a precondition; enforce it.
    for (i, a) in frame.iter().enumerate() {
        for (j, b) in frame.iter().enumerate() {
            let g = metric_raw(up, us, zv, a, b);
            let expect = if i == j { T::one() } else { T::zero() };
            if (g - expect).abs() > T::of(1e-8) {
                return Err(Error::Argument("frame is not orthonormal for the metric".into()));
            }
        }
    }

    let omega: Vec<Vec<T>> = frame
        .iter()
        .map(|a| frame.iter().map(|b| kahler_form_raw(up, us, zv, a, b)).collect())
        .collect();
    let numerator = pfaffian(&omega);

    let det_on = |subset: &[usize]| {
        let vectors: Vec<ComplexVector<T>> = subset.iter().map(|&i| frame[i].clone()).collect();
        holomorphic_volume_raw(zv, &vectors)
    };
    let pairing = wedge_conj_pairing(2 * n, det_on);
    // (i/2)^n (-1)^{n(n-1)/2}
    let mut unit = Complex::new(T::one(), T::zero());
    for _ in 0..n {
        unit = unit * Complex::new(T::zero(), T::of(0.5));
    }
    if (n * (n - 1) / 2) % 2 == 1 {
        unit = -unit;
    }
    let denominator = unit * pairing;
    if denominator.im.abs() > T::of(1e-8) * denominator.norm() {
        return Err(Error::Degenerate("volume pairing has a non-real value".into()));
    }
    if denominator.re == T::zero() {
        return Err(Error::Degenerate("volume pairing vanished".into()));
    }
    Ok(numerator / denominator.re)
}
