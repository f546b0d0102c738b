//! Independent finite-difference oracles used to cross-check the closed-form
//! tensor evaluators.
//!
//! All differencing happens inside a holomorphic chart of the quadric (solve
//! for the largest coordinate), so every probe point lies exactly on the
//! quadric and only the scalar potential is consumed - none of the evaluators
//! under test. Potential differences are integrated directly between the
//! radii of the probe points, which keeps the second-difference roundoff at
//! the level of the increments instead of the potential itself.

use num_complex::Complex;

use crate::forms::one_form;
use crate::potential::Profile;
use crate::quadric::{ComplexVector, QuadricPoint, TangentVector};
use crate::scalar::Real;
use crate::Result;

/// Default differencing step for the oracles; Richardson refinement is one
/// level, making them fourth order.
pub const ORACLE_STEP: f64 = 1e-4;

/// A graph chart of the quadric around a base point: the coordinate of
/// largest modulus is solved from the other `n`.
pub struct Chart<T: Real> {
    ell: usize,
    reference: Complex<T>,
    zeta0: Vec<Complex<T>>,
}

impl<T: Real> Chart<T> {
    pub fn at(z: &QuadricPoint<T>) -> Self {
        let v = z.vector();
        let mut ell = 0;
        let mut best = T::zero();
        for (i, c) in v.0.iter().enumerate() {
            if c.norm_sqr() > best {
                best = c.norm_sqr();
                ell = i;
            }
        }
        let zeta0 = v
            .0
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != ell)
            .map(|(_, c)| *c)
            .collect();
        Chart { ell, reference: v.0[ell], zeta0 }
    }

    pub fn zeta0(&self) -> &[Complex<T>] {
        &self.zeta0
    }

    /// Drops the solved coordinate of an ambient vector.
    pub fn project(&self, v: &ComplexVector<T>) -> Vec<Complex<T>> {
        v.0.iter()
            .enumerate()
            .filter(|(i, _)| *i != self.ell)
            .map(|(_, c)| *c)
            .collect()
    }

    /// Lifts chart coordinates back to the quadric, choosing the square root
    /// branch on the side of the base point.
    pub fn lift(&self, zeta: &[Complex<T>]) -> QuadricPoint<T> {
        let sum_sq = zeta
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z * z);
        let mut root = (Complex::new(T::one(), T::zero()) - sum_sq).sqrt();
        if (root * self.reference.conj()).re < T::zero() {
            root = -root;
        }
        let mut out = Vec::with_capacity(zeta.len() + 1);
        let mut it = zeta.iter();
        for i in 0..=zeta.len() {
            if i == self.ell {
                out.push(root);
            } else {
                out.push(*it.next().expect("chart dimension"));
            }
        }
        QuadricPoint::new(ComplexVector(out)).expect("lifted point satisfies the quadric equation")
    }

    /// The on-quadric curve `t -> lift(zeta0 + t dir)`; its velocity at
    /// `t = 0` is exactly the ambient tangent vector whose projection is
    /// `dir`.
    pub fn curve(&self, dir: &[Complex<T>], t: T) -> QuadricPoint<T> {
        let zeta: Vec<Complex<T>> =
            self.zeta0.iter().zip(dir).map(|(z, d)| z + d * t).collect();
        self.lift(&zeta)
    }

    /// `|lift(zeta0 + delta)|^2 - |lift(zeta0)|^2`, assembled purely from
    /// products of the base point with the displacement. Never differences
    /// the two radii, so the result keeps full relative accuracy however
    /// small the displacement is against the base.
    pub fn radius_shift(&self, delta: &[Complex<T>]) -> T {
        let mut flat = T::zero();
        let mut delta_sq = Complex::new(T::zero(), T::zero());
        for (z, d) in self.zeta0.iter().zip(delta) {
            flat = flat + T::of(2.0) * (d * z.conj()).re + d.norm_sqr();
            delta_sq = delta_sq + (z + z) * d + d * d;
        }
        // Solved coordinate: |q - dS| - |q| with q the squared lift.
        let q0 = self.reference * self.reference;
        let q1 = q0 - delta_sq;
        let numerator = delta_sq.norm_sqr() - T::of(2.0) * (q0.conj() * delta_sq).re;
        let lift_term = numerator / (q1.norm() + q0.norm());
        flat + lift_term
    }
}

/// `tau(r0^2 + delta) - tau0` evaluated without differencing large radii:
/// every ingredient is built from `tau0` and the radius increment, so the
/// result keeps full relative accuracy even when `delta` is tiny against
/// `r0^2`. (`acosh x = ln(x + sqrt(x^2 - 1))`, differenced in log form.)
fn tau_shift<T: Real>(tau0: T, delta_r2: T) -> T {
    if delta_r2 == T::zero() {
        return T::zero();
    }
    let half = T::of(0.5);
    let c0m1 = {
        let s = (tau0 * half).sinh();
        T::of(2.0) * s * s // cosh(tau0) - 1
    };
    let r0 = c0m1 + T::one(); // cosh(tau0)
    let r1m1 = (c0m1 + delta_r2).max(T::zero()); // r1^2 - 1
    let s1 = (r1m1 * (r1m1 + T::of(2.0))).sqrt(); // sinh(tau1)
    let s0 = tau0.sinh();
    let r1 = r1m1 + T::one();
    // s1 - s0 = delta (r1^2 + r0^2) / (s1 + s0)
    let ratio = if s1 + s0 > T::zero() {
        delta_r2 * (r1 + r0) / (s1 + s0)
    } else {
        T::zero()
    };
    ((delta_r2 + ratio) / (r0 + s0)).ln_1p()
}

/// Finite-difference `i del delbar u` evaluated on two tangent vectors: the
/// oracle for the Kähler form. `step` is the chart-coordinate h.
pub fn ddbar_kahler<T: Real>(
    profile: &Profile<T>,
    v: &TangentVector<T>,
    w: &TangentVector<T>,
    step: T,
) -> Result<T> {
    let z = v.base();
    let chart = Chart::at(z);
    let tau0 = z.tau();
    // Potential relative to the base point as a function of the chart
    // displacement; radius increment and integration both keep the small
    // quantities separate from the large base values.
    let f = |delta: &[Complex<T>]| -> Result<T> {
        let delta_r2 = chart.radius_shift(delta);
        let dtau = tau_shift(tau0, delta_r2);
        profile.u_delta_rel(tau0, dtau)
    };
    let a = chart.project(v.vector());
    let b = chart.project(w.vector());
    let ja: Vec<Complex<T>> = a.iter().map(|c| c * Complex::new(T::zero(), T::one())).collect();
    let jb: Vec<Complex<T>> = b.iter().map(|c| c * Complex::new(T::zero(), T::one())).collect();

    // (i del delbar F)(a, b) = (Hess F(Ja, b) - Hess F(a, Jb)) / 2. The
    // Kähler form here is normalized as d(u' alpha_0) with the Liouville
    // form alpha_0(v) = <v, Jz>/2, which is half of i del delbar u; the
    // oracle carries that conversion factor.
    let hess_ja_b = mixed_second(&f, &ja, &b, step)?;
    let hess_a_jb = mixed_second(&f, &a, &jb, step)?;
    Ok(T::of(0.25) * (hess_ja_b - hess_a_jb))
}

/// Mixed second derivative of a displacement scalar along two real chart
/// directions, fourth order via one Richardson level.
fn mixed_second<T: Real>(
    f: &impl Fn(&[Complex<T>]) -> Result<T>,
    a: &[Complex<T>],
    b: &[Complex<T>],
    step: T,
) -> Result<T> {
    let eval = |h: T| -> Result<T> {
        let probe = |sa: T, sb: T| -> Result<T> {
            let delta: Vec<Complex<T>> = a
                .iter()
                .zip(b)
                .map(|(da, db)| da * (sa * h) + db * (sb * h))
                .collect();
            f(&delta)
        };
        let pp = probe(T::one(), T::one())?;
        let pm = probe(T::one(), -T::one())?;
        let mp = probe(-T::one(), T::one())?;
        let mm = probe(-T::one(), -T::one())?;
        Ok((pp - pm - mp + mm) / (T::of(4.0) * h * h))
    };
    let coarse = eval(step)?;
    let fine = eval(step * T::of(0.5))?;
    Ok((T::of(4.0) * fine - coarse) / T::of(3.0))
}

/// Finite-difference exterior derivative of the 1-form on a pair of tangent
/// vectors, via commuting chart-constant extensions:
/// `d alpha(v, w) = d/dt alpha(w~)|_{gamma_v} - d/dt alpha(v~)|_{gamma_w}`.
pub fn d_one_form<T: Real>(
    profile: &Profile<T>,
    v: &TangentVector<T>,
    w: &TangentVector<T>,
    step: T,
) -> Result<T> {
    let z = v.base();
    let chart = Chart::at(z);
    let a = chart.project(v.vector());
    let b = chart.project(w.vector());

    // alpha evaluated at the lifted point on the chart-constant extension of
    // direction `dir`.
    let alpha_along = |zeta_dir: &[Complex<T>], t: T, dir: &[Complex<T>]| -> Result<T> {
        let p = chart.curve_from(zeta_dir, t);
        let amb = chart.ambient_extension(&p, dir);
        let tv = TangentVector::new(p.clone(), amb)?;
        one_form(profile, &tv)
    };

    let deriv = |move_dir: &[Complex<T>], eval_dir: &[Complex<T>]| -> Result<T> {
        let d = |h: T| -> Result<T> {
            let plus = alpha_along(move_dir, h, eval_dir)?;
            let minus = alpha_along(move_dir, -h, eval_dir)?;
            Ok((plus - minus) / (T::of(2.0) * h))
        };
        let coarse = d(step)?;
        let fine = d(step * T::of(0.5))?;
        Ok((T::of(4.0) * fine - coarse) / T::of(3.0))
    };

    Ok(deriv(&a, &b)? - deriv(&b, &a)?)
}

impl<T: Real> Chart<T> {
    fn curve_from(&self, dir: &[Complex<T>], t: T) -> QuadricPoint<T> {
        self.curve(dir, t)
    }

    /// The ambient representative, at `p`, of the chart-constant vector
    /// field with chart components `dir`.
    pub fn ambient_extension(&self, p: &QuadricPoint<T>, dir: &[Complex<T>]) -> ComplexVector<T> {
        let z = p.vector();
        let mut coupled = Complex::new(T::zero(), T::zero());
        let mut it = dir.iter();
        let mut out = vec![Complex::new(T::zero(), T::zero()); z.len()];
        for i in 0..z.len() {
            if i != self.ell {
                let d = *it.next().expect("chart dimension");
                out[i] = d;
                coupled = coupled + z.0[i] * d;
            }
        }
        out[self.ell] = -coupled / z.0[self.ell];
        ComplexVector(out)
    }
}

/// Derivative of a scalar along the on-quadric curve with velocity `v`.
pub fn directional_derivative<T: Real>(
    z: &QuadricPoint<T>,
    v: &ComplexVector<T>,
    step: T,
    f: impl Fn(&QuadricPoint<T>) -> Result<T>,
) -> Result<T> {
    let chart = Chart::at(z);
    let dir = chart.project(v);
    let d = |h: T| -> Result<T> {
        let plus = f(&chart.curve(&dir, h))?;
        let minus = f(&chart.curve(&dir, -h))?;
        Ok((plus - minus) / (T::of(2.0) * h))
    };
    let coarse = d(step)?;
    let fine = d(step * T::of(0.5))?;
    Ok((T::of(4.0) * fine - coarse) / T::of(3.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::kahler_form;
    use crate::sampling;
    use approx::assert_relative_eq;

    fn profile3() -> Profile<f64> {
        Profile::build(3, 1.0, 14.0).unwrap()
    }

    #[test]
    fn chart_lift_roundtrip() {
        let mut r = sampling::rng(1);
        for _ in 0..20 {
            let z = sampling::quadric_point::<f64>(&mut r, 3, 4.0);
            let chart = Chart::at(&z);
            let back = chart.lift(chart.zeta0());
            let diff = back.vector().sub(z.vector()).norm();
            assert!(diff < 1e-12 * z.vector().norm());
        }
    }

    #[test]
    fn chart_curve_velocity_matches_tangent() {
        let mut r = sampling::rng(2);
        let z = sampling::quadric_point::<f64>(&mut r, 3, 3.0);
        let v = sampling::tangent_vector(&mut r, &z);
        let chart = Chart::at(&z);
        let dir = chart.project(v.vector());
        let h = 1e-6;
        let plus = chart.curve(&dir, h);
        let minus = chart.curve(&dir, -h);
        let fd = plus.vector().sub(minus.vector()).scale(1.0 / (2.0 * h));
        let diff = fd.sub(v.vector()).norm();
        assert!(diff < 1e-9, "velocity mismatch {diff}");
    }

    #[test]
    fn oracle_matches_kahler_form_on_random_samples() {
        let p = profile3();
        let mut r = sampling::rng(3);
        for _ in 0..25 {
            let z = sampling::quadric_point::<f64>(&mut r, 3, 5.0);
            let v = sampling::tangent_vector(&mut r, &z);
            let w = sampling::tangent_vector(&mut r, &z);
            let closed = kahler_form(&p, &v, &w).unwrap();
            let fd = ddbar_kahler(&p, &v, &w, ORACLE_STEP).unwrap();
            let scale = closed.abs().max(fd.abs()).max(1e-10);
            assert!(
                (closed - fd).abs() / scale < 1e-5,
                "oracle disagrees: closed {closed}, fd {fd}"
            );
        }
    }

    #[test]
    fn oracle_zero_on_real_frames_at_real_points() {
        let p = profile3();
        let z = QuadricPoint::new(ComplexVector::from_real(&[0.0, 1.0, 0.0, 0.0])).unwrap();
        let v = TangentVector::new(z.clone(), ComplexVector::from_real(&[1.0, 0.0, 0.0, 0.0])).unwrap();
        let w = TangentVector::new(z.clone(), ComplexVector::from_real(&[0.0, 0.0, 0.0, 1.0])).unwrap();
        let fd = ddbar_kahler(&p, &v, &w, ORACLE_STEP).unwrap();
        assert!(fd.abs() < 1e-9);
    }

    #[test]
    fn oracle_antisymmetry() {
        let p = profile3();
        let mut r = sampling::rng(6);
        let z = sampling::quadric_point::<f64>(&mut r, 3, 3.0);
        let v = sampling::tangent_vector(&mut r, &z);
        let w = sampling::tangent_vector(&mut r, &z);
        let vw = ddbar_kahler(&p, &v, &w, ORACLE_STEP).unwrap();
        let wv = ddbar_kahler(&p, &w, &v, ORACLE_STEP).unwrap();
        assert!((vw + wv).abs() < 1e-8 * vw.abs().max(1.0));
    }

    #[test]
    fn exterior_derivative_of_one_form_is_kahler_form() {
        let p = profile3();
        let mut r = sampling::rng(7);
        for _ in 0..10 {
            let z = sampling::quadric_point::<f64>(&mut r, 3, 4.0);
            let v = sampling::tangent_vector(&mut r, &z);
            let w = sampling::tangent_vector(&mut r, &z);
            let omega = kahler_form(&p, &v, &w).unwrap();
            let fd = d_one_form(&p, &v, &w, ORACLE_STEP).unwrap();
            let scale = omega.abs().max(1e-8);
            assert!((omega - fd).abs() / scale < 1e-5, "d alpha mismatch: {omega} vs {fd}");
        }
    }

    #[test]
    fn directional_derivative_of_radius() {
        // d |z|^2 along v equals 2 <v, z>.
        let mut r = sampling::rng(12);
        let z = sampling::quadric_point::<f64>(&mut r, 3, 3.0);
        let v = sampling::tangent_vector(&mut r, &z);
        let got = directional_derivative(&z, v.vector(), 1e-4, |p| Ok(p.norm_sqr())).unwrap();
        let expect = 2.0 * v.vector().inner(z.vector());
        assert_relative_eq!(got, expect, max_relative = 1e-8);
    }
}
