//! The singular quadric cone `sum z_i^2 = 0` in `C^4` with its Ricci-flat
//! cone structure (potential `(3/2) r^{4/3}`), the limiting special
//! Lagrangian cones of the invariant families, and quantitative asymptotic
//! distance measurements along traced leaf branches.

use num_complex::Complex;
use serde::Serialize;

use crate::families::{Family, LeafSpec};
use crate::forms::{holomorphic_volume_raw, kahler_form_raw};
use crate::moment::MomentValue;
use crate::quadric::{ComplexVector, GroupPreset};
use crate::scalar::Real;
use crate::{Error, Result};

/// Points closer to the apex than this are rejected; the cone derivatives
/// blow up there.
pub const APEX_RADIUS: f64 = 1e-6;

/// A point of the cone `sum z_i^2 = 0`, away from the apex.
#[derive(Clone, Debug)]
pub struct ConePoint<T: Real> {
    z: ComplexVector<T>,
}

impl<T: Real> ConePoint<T> {
    pub fn new(z: ComplexVector<T>) -> Result<Self> {
        let norm_sq = z.norm_sqr();
        if norm_sq < T::of(APEX_RADIUS * APEX_RADIUS) {
            return Err(Error::Domain {
                what: "cone point too close to the apex",
                value: norm_sq.sqrt().as_f64(),
            });
        }
        let residual = z.bilinear_sq().norm();
        let tol = crate::quadric::constraint_tol::<T>() * norm_sq;
        if residual > tol {
            return Err(Error::Constraint {
                what: "cone equation sum z_i^2 = 0",
                residual: residual.as_f64(),
                tol: tol.as_f64(),
            });
        }
        Ok(ConePoint { z })
    }

    pub fn vector(&self) -> &ComplexVector<T> {
        &self.z
    }

    pub fn norm_sqr(&self) -> T {
        self.z.norm_sqr()
    }
}

/// Cone potential derivatives in the `r^2` argument:
/// `u(s) = (3/2) s^{2/3}`, so `u' = s^{-1/3}`, `u'' = -(1/3) s^{-4/3}`.
pub fn cone_derivatives<T: Real>(s: T) -> (T, T) {
    let third = T::one() / T::of(3.0);
    let up = s.powf(-third);
    let us = -third * s.powf(-T::of(4.0) * third);
    (up, us)
}

fn check_cone_tangent<T: Real>(z: &ConePoint<T>, v: &ComplexVector<T>) -> Result<()> {
    let residual = z.vector().bilinear(v).norm();
    let tol = T::of(1e-9) * (T::one() + z.vector().norm() * v.norm());
    if residual > tol {
        return Err(Error::Constraint {
            what: "cone tangency sum z_i v_i = 0",
            residual: residual.as_f64(),
            tol: tol.as_f64(),
        });
    }
    Ok(())
}

/// The cone Kähler form on two tangent vectors.
pub fn cone_kahler_form<T: Real>(
    z: &ConePoint<T>,
    v: &ComplexVector<T>,
    w: &ComplexVector<T>,
) -> Result<T> {
    check_cone_tangent(z, v)?;
    check_cone_tangent(z, w)?;
    let (up, us) = cone_derivatives(z.norm_sqr());
    Ok(kahler_form_raw(up, us, z.vector(), v, w))
}

/// The cone metric `g(v, w) = omega(v, J w)`.
pub fn cone_metric<T: Real>(
    z: &ConePoint<T>,
    v: &ComplexVector<T>,
    w: &ComplexVector<T>,
) -> Result<T> {
    check_cone_tangent(z, v)?;
    check_cone_tangent(z, w)?;
    let (up, us) = cone_derivatives(z.norm_sqr());
    Ok(kahler_form_raw(up, us, z.vector(), v, &w.j()))
}

/// The cone holomorphic 3-form: `(1/|z|^2) det(conj z, v1, v2, v3)`.
/// The conjugate position vector replaces the position vector, which is
/// itself tangent to the cone and would annihilate the determinant.
pub fn cone_holomorphic_volume<T: Real>(
    z: &ConePoint<T>,
    frame: &[ComplexVector<T>; 3],
) -> Result<Complex<T>> {
    for v in frame {
        check_cone_tangent(z, v)?;
    }
    let det = holomorphic_volume_raw(&z.vector().conj(), frame);
    Ok(det / Complex::new(z.norm_sqr(), T::zero()))
}

/// Moment map components on the cone, with the cone potential derivative.
pub fn cone_moment<T: Real>(preset: &GroupPreset<T>, z: &ConePoint<T>) -> MomentValue<T> {
    let (up, _) = cone_derivatives(z.norm_sqr());
    let half = T::of(0.5);
    let jz = z.vector().j();
    let components = preset
        .generators()
        .iter()
        .map(|a| half * up * a.apply(z.vector()).inner(&jz))
        .collect();
    MomentValue(components)
}

/// The limiting special Lagrangian cone cross-sections.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConeKind {
    /// `(1/sqrt 2)(cos a, sin a, i cos b, i sin b)`: torus limit of the
    /// leaves collapsing onto the first real block.
    TorusA,
    /// `(1/sqrt 2)(i cos a, i sin a, cos b, sin b)`: the other torus limit.
    TorusC,
    /// `(1/2)(1 - i, (1+i) * unit vector)`: the 2-sphere limit of the
    /// rotation-invariant family.
    Sphere,
}

/// A parametrized cone cross-section at scale `s > 0`.
#[derive(Clone, Debug)]
pub struct ConeSpec<T: Real> {
    pub kind: ConeKind,
    pub scale: T,
}

impl<T: Real> ConeSpec<T> {
    pub fn new(kind: ConeKind, scale: T) -> Result<Self> {
        if !(scale > T::zero()) {
            return Err(Error::Argument("cone scale must be positive".into()));
        }
        Ok(ConeSpec { kind, scale })
    }

    /// The cone point at the given pair of cross-section angles.
    pub fn point(&self, a: T, b: T) -> Result<ConePoint<T>> {
        ConePoint::new(self.raw_point(a, b))
    }

    fn raw_point(&self, a: T, b: T) -> ComplexVector<T> {
        let s = self.scale;
        let zero = T::zero();
        match self.kind {
            ConeKind::TorusA => {
                let r = s * T::of(1.0 / std::f64::consts::SQRT_2);
                ComplexVector(vec![
                    Complex::new(r * a.cos(), zero),
                    Complex::new(r * a.sin(), zero),
                    Complex::new(zero, r * b.cos()),
                    Complex::new(zero, r * b.sin()),
                ])
            }
            ConeKind::TorusC => {
                let r = s * T::of(1.0 / std::f64::consts::SQRT_2);
                ComplexVector(vec![
                    Complex::new(zero, r * a.cos()),
                    Complex::new(zero, r * a.sin()),
                    Complex::new(r * b.cos(), zero),
                    Complex::new(r * b.sin(), zero),
                ])
            }
            ConeKind::Sphere => {
                // a = longitude, b = latitude of the unit 3-vector.
                let half = s * T::of(0.5);
                let dir = [b.cos() * a.cos(), b.cos() * a.sin(), b.sin()];
                ComplexVector(vec![
                    Complex::new(half, -half),
                    Complex::new(half * dir[0], half * dir[0]),
                    Complex::new(half * dir[1], half * dir[1]),
                    Complex::new(half * dir[2], half * dir[2]),
                ])
            }
        }
    }

    /// Tangent frame at the angles: radial direction plus the two
    /// cross-section derivatives (scaled by the radius).
    pub fn frame(&self, a: T, b: T) -> Result<(ConePoint<T>, [ComplexVector<T>; 3])> {
        let point = self.point(a, b)?;
        let radial = point.vector().scale(T::one() / self.scale);
        let da = self.angle_derivative(a, b, true);
        let db = self.angle_derivative(a, b, false);
        Ok((point, [radial, da, db]))
    }

    fn angle_derivative(&self, a: T, b: T, first: bool) -> ComplexVector<T> {
        let s = self.scale;
        let zero = T::zero();
        match self.kind {
            ConeKind::TorusA => {
                let r = s * T::of(1.0 / std::f64::consts::SQRT_2);
                if first {
                    ComplexVector(vec![
                        Complex::new(-r * a.sin(), zero),
                        Complex::new(r * a.cos(), zero),
                        Complex::new(zero, zero),
                        Complex::new(zero, zero),
                    ])
                } else {
                    ComplexVector(vec![
                        Complex::new(zero, zero),
                        Complex::new(zero, zero),
                        Complex::new(zero, -r * b.sin()),
                        Complex::new(zero, r * b.cos()),
                    ])
                }
            }
            ConeKind::TorusC => {
                let r = s * T::of(1.0 / std::f64::consts::SQRT_2);
                if first {
                    ComplexVector(vec![
                        Complex::new(zero, -r * a.sin()),
                        Complex::new(zero, r * a.cos()),
                        Complex::new(zero, zero),
                        Complex::new(zero, zero),
                    ])
                } else {
                    ComplexVector(vec![
                        Complex::new(zero, zero),
                        Complex::new(zero, zero),
                        Complex::new(-r * b.sin(), zero),
                        Complex::new(r * b.cos(), zero),
                    ])
                }
            }
            ConeKind::Sphere => {
                let half = s * T::of(0.5);
                let (ca, sa) = (a.cos(), a.sin());
                let (cb, sb) = (b.cos(), b.sin());
                let dir = if first {
                    [-cb * sa, cb * ca, zero]
                } else {
                    [-sb * ca, -sb * sa, cb]
                };
                ComplexVector(vec![
                    Complex::new(zero, zero),
                    Complex::new(half * dir[0], half * dir[0]),
                    Complex::new(half * dir[1], half * dir[1]),
                    Complex::new(half * dir[2], half * dir[2]),
                ])
            }
        }
    }
}

/// Chordal distance from the normalized ambient point to the torus-A cone
/// cross-section (minimized over both torus angles in closed form).
pub fn distance_to_torus_cone<T: Real>(unit: &ComplexVector<T>) -> T {
    let half = T::of(0.5);
    let sqrt2 = T::of(std::f64::consts::SQRT_2);
    let w1 = [unit.0[0], unit.0[1]];
    let w2 = [unit.0[2], unit.0[3]];
    let re_norm = (w1[0].re * w1[0].re + w1[1].re * w1[1].re).sqrt();
    let im_norm = (w2[0].im * w2[0].im + w2[1].im * w2[1].im).sqrt();
    let m1 = w1[0].norm_sqr() + w1[1].norm_sqr() + half - sqrt2 * re_norm;
    let m2 = w2[0].norm_sqr() + w2[1].norm_sqr() + half - sqrt2 * im_norm;
    (m1 + m2).max(T::zero()).sqrt()
}

/// Chordal distance from the normalized ambient point to the sphere cone
/// cross-section (minimized over the orbit sphere in closed form).
pub fn distance_to_sphere_cone<T: Real>(unit: &ComplexVector<T>) -> T {
    let half = T::of(0.5);
    let kappa = Complex::new(half, half);
    let first = unit.0[0] - Complex::new(half, -half);
    let u = [unit.0[1], unit.0[2], unit.0[3]];
    let m: Vec<T> = u.iter().map(|c| (c * kappa.conj()).re).collect();
    let m_norm = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt();
    let u_norm_sq: T = u.iter().map(|c| c.norm_sqr()).sum();
    let rest = u_norm_sq + half - T::of(2.0) * m_norm;
    (first.norm_sqr() + rest).max(T::zero()).sqrt()
}

/// One row of the asymptotics report.
#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticsRow {
    pub rho: f64,
    pub dist_to_cone: f64,
    pub t_deviation: f64,
}

/// Locates the leaf-curve point at fiber radius `rho` and measures how close
/// the normalized ambient point is to the limiting cone cross-section, plus
/// the deviation of the profile angle from its limit.
///
/// Supported: the rotation-invariant family (limit `t = pi/4`, sphere cone)
/// and torus leaves with constants `(0, 0, c3)` (limit `sin t -> 0`, torus
/// cone).
pub fn asymptotic_row<T: Real>(spec: &LeafSpec<T>, rho: T) -> Result<AsymptoticsRow> {
    if !(rho > T::zero()) {
        return Err(Error::Argument("rho must be positive".into()));
    }
    let two = T::of(2.0);
    match spec.family() {
        Family::So3 => {
            let c = spec.constants()[2];
            let arg = (two * rho - c) / (two * rho).sinh();
            if arg.abs() > T::one() {
                return Err(Error::OutOfRange(format!(
                    "branch does not reach rho = {}",
                    rho.as_f64()
                )));
            }
            let t = arg.acos() * T::of(0.5);
            let z = crate::families::rotation_slice_point(3, t, rho);
            let unit = z.scale(T::one() / z.norm());
            let dist = distance_to_sphere_cone(&unit);
            let t_dev = (t - T::FRAC_PI_4()).abs();
            Ok(AsymptoticsRow {
                rho: rho.as_f64(),
                dist_to_cone: dist.as_f64(),
                t_deviation: t_dev.as_f64(),
            })
        }
        Family::T2 => {
            let cs = spec.constants();
            if cs[0] != T::zero() || cs[1] != T::zero() {
                return Err(Error::Argument(
                    "torus asymptotics are computed on the (0, 0, c3) subfamily".into(),
                ));
            }
            // On the cos(phi) = 1 branch: sin(2t) sinh(2 rho) = -2 c3, with
            // the branch collapsing onto sin t -> 0 as rho grows.
            let arg = -two * cs[2] / (two * rho).sinh();
            if arg.abs() > T::one() {
                return Err(Error::OutOfRange(format!(
                    "branch does not reach rho = {}",
                    rho.as_f64()
                )));
            }
            let t_half = arg.asin() * T::of(0.5);
            // Pick the representative in [0, pi): small positive t, or the
            // mirror near pi when the constant forces sin(2t) < 0.
            let t = if t_half >= T::zero() { t_half } else { T::PI() + t_half };
            let x = [t, rho, T::zero(), T::zero()];
            let z = crate::families::t2_slice_point(&x);
            let unit = z.scale(T::one() / z.norm());
            let dist = distance_to_torus_cone(&unit);
            let t_dev = t.min((T::PI() - t).abs());
            Ok(AsymptoticsRow {
                rho: rho.as_f64(),
                dist_to_cone: dist.as_f64(),
                t_deviation: t_dev.as_f64(),
            })
        }
        Family::SoN => Err(Error::Argument(
            "asymptotics rows are provided for the t2 and so3 families".into(),
        )),
    }
}

/// Sweeps [`asymptotic_row`] over a grid of fiber radii.
pub fn asymptotics_sweep<T: Real>(spec: &LeafSpec<T>, rhos: &[T]) -> Result<Vec<AsymptoticsRow>> {
    rhos.iter().map(|&r| asymptotic_row(spec, r)).collect()
}
