//! The cohomogeneity-one special Lagrangian families: torus-invariant leaves
//! in dimension three, the axis-stabilizing SO(3) family, and its SO(n)
//! generalization. Leaves are level sets of two moment components plus one
//! holomorphic integral; in profile coordinates each leaf is an implicit
//! curve traced by continuation and then swept by the group action.
//!
//! Constant conventions: torus constants are the values of
//! `(u' Im(z0 conj z1), u' Im(z2 conj z3), Im(z0^2 + z1^2))`; the SO(3)
//! third constant is stored as `Im(2 arccos z0 - sin(2 arccos z0))`, the
//! normalization in which the profile-plane equation reads
//! `2 rho - cos(2t) sinh(2 rho) = c`; the SO(n) third constant is
//! `Im Int_0^{arccos z0} sin^{n-1}`, which for n = 3 is a quarter of the
//! SO(3) one.

use num_complex::Complex;
use rand::Rng;

use crate::continuation::{trace, ImplicitCurve, StopReason, TraceOptions, TracedCurve};
use crate::forms::{holomorphic_volume, kahler_form_raw, metric_raw, TangentFrame};
use crate::potential::Profile;
use crate::quadrature::integrate_segment;
use crate::quadric::{ComplexVector, GroupKind, GroupPreset, OrthogonalMatrix, QuadricPoint};
use crate::sampling;
use crate::scalar::Real;
use crate::{Error, Result};

/// Which invariant family a leaf belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Family {
    /// Maximal-torus invariant leaves (n = 3).
    T2,
    /// Axis-stabilizing SO(3)-invariant leaves (n = 3).
    So3,
    /// The SO(n) generalization, any n >= 2.
    SoN,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::T2 => "t2",
            Family::So3 => "so3",
            Family::SoN => "son",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "t2" => Some(Family::T2),
            "so3" => Some(Family::So3),
            "son" => Some(Family::SoN),
            _ => None,
        }
    }

    /// The symmetry group whose orbits sweep the leaf.
    pub fn group_kind(self) -> GroupKind {
        match self {
            Family::T2 => GroupKind::T2,
            Family::So3 => GroupKind::So3Stab,
            Family::SoN => GroupKind::SonStab,
        }
    }
}

/// The constants selecting one leaf out of a family.
#[derive(Clone, Debug)]
pub struct LeafSpec<T: Real> {
    family: Family,
    n: usize,
    constants: Vec<T>,
}

impl<T: Real> LeafSpec<T> {
    pub fn new(family: Family, n: usize, constants: Vec<T>) -> Result<Self> {
        let expected = match family {
            Family::T2 | Family::So3 => {
                if n != 3 {
                    return Err(Error::Argument(format!(
                        "family {} requires n = 3, got {n}",
                        family.name()
                    )));
                }
                3
            }
            Family::SoN => {
                if n < 2 {
                    return Err(Error::Argument("need n >= 2".into()));
                }
                n
            }
        };
        if constants.len() != expected {
            return Err(Error::Argument(format!(
                "family {} with n = {n} takes {expected} constants, got {}",
                family.name(),
                constants.len()
            )));
        }
        if constants.iter().any(|c| !c.is_finite()) {
            return Err(Error::Argument("leaf constants must be finite".into()));
        }
        Ok(LeafSpec { family, n, constants })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn constants(&self) -> &[T] {
        &self.constants
    }
}

/// `arccos` normalized to the vertical strip `Re in [0, pi]` (and `Im >= 0`
/// on the real cut, where the sign is a convention). Errors when `z0` sits
/// at the double points `z0 = +-1` where the branch degenerates.
pub fn strip_arccos<T: Real>(z0: Complex<T>) -> Result<Complex<T>> {
    let sin_sq = Complex::new(T::one(), T::zero()) - z0 * z0;
    if sin_sq.norm() < T::of(1e-13) * (T::one() + z0.norm_sqr()) {
        return Err(Error::Branch {
            what: "arccos branch degenerates at z0 = +-1",
            re: z0.re.as_f64(),
            im: z0.im.as_f64(),
        });
    }
    let mut tau = z0.acos();
    // On the real cut |Re z0| > 1 the two half-strips touch; normalize the
    // ambiguous imaginary sign upward (harmless exactly when sin(Re tau) = 0).
    if tau.im < T::zero() && tau.re.sin().abs() < T::of(1e-12) {
        tau = Complex::new(tau.re, -tau.im);
    }
    Ok(tau)
}

/// `Im(2 tau - sin 2 tau)` at `tau = arccos z0`: the SO(3) third invariant.
pub fn so3_third_invariant<T: Real>(z0: Complex<T>) -> Result<T> {
    let tau = strip_arccos(z0)?;
    let two_tau = tau + tau;
    Ok((two_tau - two_tau.sin()).im)
}

/// The same invariant through the intrinsic expression
/// `Im(arccos z0 - z0 sqrt(1 - z0^2))` with the root taken as
/// `sin(arccos z0)`; equals half of [`so3_third_invariant`].
pub fn so3_third_intrinsic<T: Real>(z0: Complex<T>) -> Result<T> {
    let tau = strip_arccos(z0)?;
    Ok((tau - z0 * tau.sin()).im)
}

/// `Im Int_0^{arccos z0} sin^{n-1}`, by quadrature along the straight
/// segment: the SO(n) third invariant.
pub fn son_third_invariant<T: Real>(n: usize, z0: Complex<T>) -> Result<T> {
    let tau = strip_arccos(z0)?;
    Ok(son_integral(n, tau).im)
}

fn son_integral<T: Real>(n: usize, tau: Complex<T>) -> Complex<T> {
    integrate_segment(Complex::new(T::zero(), T::zero()), tau, T::of(0.5), |s| {
        s.sin().powi(n as i32 - 1)
    })
}

/// The residual vector of the leaf's defining equations at `z`.
pub fn residual<T: Real>(
    profile: &Profile<T>,
    spec: &LeafSpec<T>,
    z: &QuadricPoint<T>,
) -> Result<Vec<T>> {
    if z.n() != spec.n {
        return Err(Error::Argument(format!(
            "point lives on Q^{} but the leaf has n = {}",
            z.n(),
            spec.n
        )));
    }
    let values = invariant_values(profile, spec.family, z)?;
    Ok(values.iter().zip(&spec.constants).map(|(&v, &c)| v - c).collect())
}

/// The left-hand sides of the family's defining equations at `z`.
fn invariant_values<T: Real>(
    profile: &Profile<T>,
    family: Family,
    z: &QuadricPoint<T>,
) -> Result<Vec<T>> {
    let up = profile.u_prime_at_tau(z.tau())?;
    let zv = z.vector();
    let im = |a: usize, b: usize| (zv.0[a] * zv.0[b].conj()).im;
    match family {
        Family::T2 => {
            let third = (zv.0[0] * zv.0[0] + zv.0[1] * zv.0[1]).im;
            Ok(vec![up * im(0, 1), up * im(2, 3), third])
        }
        Family::So3 => Ok(vec![up * im(1, 2), up * im(2, 3), so3_third_invariant(zv.0[0])?]),
        Family::SoN => {
            let n = z.n();
            let mut vals = Vec::with_capacity(n);
            for j in 2..=n {
                vals.push(up * im(1, j));
            }
            vals.push(son_third_invariant(n, zv.0[0])?);
            Ok(vals)
        }
    }
}

/// The unique leaf of `family` through `z`: evaluate the defining functions
/// and freeze them as the constants.
pub fn classify<T: Real>(
    profile: &Profile<T>,
    family: Family,
    z: &QuadricPoint<T>,
) -> Result<LeafSpec<T>> {
    let constants = invariant_values(profile, family, z)?;
    LeafSpec::new(family, z.n(), constants)
}

// ---------------------------------------------------------------------------
// Profile-coordinate slices and their curve systems.
// ---------------------------------------------------------------------------

/// Torus slice point `z(t, rho, phi, psi)` with the torus angles at zero.
pub fn t2_slice_point<T: Real>(x: &[T]) -> ComplexVector<T> {
    let (t, rho, phi, psi) = (x[0], x[1], x[2], x[3]);
    let (ct, st) = (t.cos(), t.sin());
    let (ch, sh) = (rho.cosh(), rho.sinh());
    let (cphi, sphi) = (phi.cos(), phi.sin());
    let (cpsi, spsi) = (psi.cos(), psi.sin());
    ComplexVector(vec![
        Complex::new(ct * ch, -sh * cphi * st),
        Complex::new(T::zero(), sh * sphi * cpsi),
        Complex::new(st * ch, sh * cphi * ct),
        Complex::new(T::zero(), sh * sphi * spsi),
    ])
}

/// Partial derivatives of the torus slice in `(t, rho, phi, psi)`.
pub fn t2_slice_jacobian<T: Real>(x: &[T]) -> [ComplexVector<T>; 4] {
    let (t, rho, phi, psi) = (x[0], x[1], x[2], x[3]);
    let (ct, st) = (t.cos(), t.sin());
    let (ch, sh) = (rho.cosh(), rho.sinh());
    let (cphi, sphi) = (phi.cos(), phi.sin());
    let (cpsi, spsi) = (psi.cos(), psi.sin());
    let zero = T::zero();
    let d_t = ComplexVector(vec![
        Complex::new(-st * ch, -sh * cphi * ct),
        Complex::new(zero, zero),
        Complex::new(ct * ch, -sh * cphi * st),
        Complex::new(zero, zero),
    ]);
    let d_rho = ComplexVector(vec![
        Complex::new(ct * sh, -ch * cphi * st),
        Complex::new(zero, ch * sphi * cpsi),
        Complex::new(st * sh, ch * cphi * ct),
        Complex::new(zero, ch * sphi * spsi),
    ]);
    let d_phi = ComplexVector(vec![
        Complex::new(zero, sh * sphi * st),
        Complex::new(zero, sh * cphi * cpsi),
        Complex::new(zero, -sh * sphi * ct),
        Complex::new(zero, sh * cphi * spsi),
    ]);
    let d_psi = ComplexVector(vec![
        Complex::new(zero, zero),
        Complex::new(zero, -sh * sphi * spsi),
        Complex::new(zero, zero),
        Complex::new(zero, sh * sphi * cpsi),
    ]);
    [d_t, d_rho, d_phi, d_psi]
}

/// Rotation-family slice point `(cos tau, sin tau, 0, ..., 0)`,
/// `tau = t + i rho`.
pub fn rotation_slice_point<T: Real>(n: usize, t: T, rho: T) -> ComplexVector<T> {
    let tau = Complex::new(t, rho);
    let mut v = ComplexVector::zeros(n + 1);
    v.0[0] = tau.cos();
    v.0[1] = tau.sin();
    v
}

/// Velocity of the rotation slice under `(dt, drho)`.
pub fn rotation_slice_velocity<T: Real>(n: usize, t: T, rho: T, dt: T, drho: T) -> ComplexVector<T> {
    let tau = Complex::new(t, rho);
    let dtau = Complex::new(dt, drho);
    let mut v = ComplexVector::zeros(n + 1);
    v.0[0] = -tau.sin() * dtau;
    v.0[1] = tau.cos() * dtau;
    v
}

struct T2System<'a, T: Real> {
    profile: &'a Profile<T>,
    constants: [T; 3],
    rho_max: T,
}

impl<T: Real> T2System<'_, T> {
    /// `P = u'(cosh 2 rho) sinh(2 rho)` and its rho-derivative. Newton
    /// trials may wander to negative or oversized rho before the chart
    /// check rejects them; the profile arguments are evaluated on the even
    /// extension, capped at the table range.
    fn p_and_dp(&self, rho: T) -> (T, T) {
        let two = T::of(2.0);
        let tau = two * rho;
        let tau_eval = tau.abs().min(self.profile.tau_max());
        let sh = tau.sinh();
        let ch = tau.cosh();
        let up = self.profile.u_prime_at_tau(tau_eval).unwrap_or(T::nan());
        let us = self.profile.u_second_at_tau(tau_eval).unwrap_or(T::nan());
        (up * sh, two * (us * sh * sh + up * ch))
    }
}

impl<T: Real> ImplicitCurve<T> for T2System<'_, T> {
    fn dim(&self) -> usize {
        4
    }

    fn residual(&self, x: &[T], out: &mut [T]) {
        let (t, rho, phi, psi) = (x[0], x[1], x[2], x[3]);
        let half = T::of(0.5);
        let (p, _) = self.p_and_dp(rho);
        let s2 = (rho + rho).sinh();
        out[0] = -half * p * t.cos() * phi.sin() * psi.cos() - self.constants[0];
        out[1] = -half * p * t.sin() * phi.sin() * psi.sin() - self.constants[1];
        out[2] = -half * s2 * (t + t).sin() * phi.cos() - self.constants[2];
    }

    fn jacobian(&self, x: &[T], out: &mut [Vec<T>]) {
        let (t, rho, phi, psi) = (x[0], x[1], x[2], x[3]);
        let half = T::of(0.5);
        let (p, dp) = self.p_and_dp(rho);
        let s2 = (rho + rho).sinh();
        let c2 = (rho + rho).cosh();
        let (ct, st) = (t.cos(), t.sin());
        let (cphi, sphi) = (phi.cos(), phi.sin());
        let (cpsi, spsi) = (psi.cos(), psi.sin());
        // f0 = -1/2 P cos t sin phi cos psi - c0
        out[0][0] = half * p * st * sphi * cpsi;
        out[0][1] = -half * dp * ct * sphi * cpsi;
        out[0][2] = -half * p * ct * cphi * cpsi;
        out[0][3] = half * p * ct * sphi * spsi;
        // f1 = -1/2 P sin t sin phi sin psi - c1
        out[1][0] = -half * p * ct * sphi * spsi;
        out[1][1] = -half * dp * st * sphi * spsi;
        out[1][2] = -half * p * st * cphi * spsi;
        out[1][3] = -half * p * st * sphi * cpsi;
        // f2 = -1/2 sinh(2 rho) sin(2t) cos phi - c2
        let s2t = (t + t).sin();
        let c2t = (t + t).cos();
        out[2][0] = -s2 * c2t * cphi;
        out[2][1] = -c2 * s2t * cphi;
        out[2][2] = half * s2 * s2t * sphi;
        out[2][3] = T::zero();
    }

    fn out_of_chart(&self, x: &[T]) -> bool {
        let eps = T::of(1e-9);
        x[0] < -eps || x[0] > T::PI() || x[1] < -eps || x[1] > self.rho_max
    }
}

/// Torus leaves with both moment constants zero: the solution set lives on
/// `sin(phi) = 0` where `psi` parametrizes nothing (the slice coordinates
/// collapse), so the curve is traced in `(t, rho)` with `cos(phi) = sign`.
struct T2ReducedSystem<T: Real> {
    /// `cos(phi)` on the branch: `+1` or `-1`.
    sign: T,
    c3: T,
    rho_max: T,
}

impl<T: Real> ImplicitCurve<T> for T2ReducedSystem<T> {
    fn dim(&self) -> usize {
        2
    }

    fn residual(&self, x: &[T], out: &mut [T]) {
        let (t, rho) = (x[0], x[1]);
        out[0] = -T::of(0.5) * (rho + rho).sinh() * (t + t).sin() * self.sign - self.c3;
    }

    fn jacobian(&self, x: &[T], out: &mut [Vec<T>]) {
        let (t, rho) = (x[0], x[1]);
        out[0][0] = -(rho + rho).sinh() * (t + t).cos() * self.sign;
        out[0][1] = -(rho + rho).cosh() * (t + t).sin() * self.sign;
    }

    fn out_of_chart(&self, x: &[T]) -> bool {
        let eps = T::of(1e-9);
        x[0] < -eps || x[0] > T::PI() || x[1] < -eps || x[1] > self.rho_max
    }
}

struct So3System<T: Real> {
    c: T,
    rho_max: T,
}

impl<T: Real> ImplicitCurve<T> for So3System<T> {
    fn dim(&self) -> usize {
        2
    }

    fn residual(&self, x: &[T], out: &mut [T]) {
        let (t, rho) = (x[0], x[1]);
        out[0] = rho + rho - (t + t).cos() * (rho + rho).sinh() - self.c;
    }

    fn jacobian(&self, x: &[T], out: &mut [Vec<T>]) {
        let (t, rho) = (x[0], x[1]);
        let two = T::of(2.0);
        out[0][0] = two * (t + t).sin() * (rho + rho).sinh();
        out[0][1] = two - two * (t + t).cos() * (rho + rho).cosh();
    }

    fn out_of_chart(&self, x: &[T]) -> bool {
        let eps = T::of(1e-9);
        x[0] < -eps || x[0] > T::PI() || x[1] < -eps || x[1] > self.rho_max
    }
}

struct SonSystem<T: Real> {
    n: usize,
    c: T,
    rho_max: T,
}

impl<T: Real> ImplicitCurve<T> for SonSystem<T> {
    fn dim(&self) -> usize {
        2
    }

    fn residual(&self, x: &[T], out: &mut [T]) {
        let tau = Complex::new(x[0], x[1]);
        out[0] = son_integral(self.n, tau).im - self.c;
    }

    fn jacobian(&self, x: &[T], out: &mut [Vec<T>]) {
        // d/dtau F = sin^{n-1}(tau); t and rho directions pick out the
        // imaginary parts of F' and i F'.
        let tau = Complex::new(x[0], x[1]);
        let fp = tau.sin().powi(self.n as i32 - 1);
        out[0][0] = fp.im;
        out[0][1] = fp.re;
    }

    fn out_of_chart(&self, x: &[T]) -> bool {
        let eps = T::of(1e-9);
        x[0] < -eps || x[0] > T::PI() || x[1] < -eps || x[1] > self.rho_max
    }
}

/// Options for leaf-curve tracing.
#[derive(Clone, Debug)]
pub struct LeafTraceOptions<T> {
    pub rho_max: T,
    pub max_branches: usize,
    pub seed_attempts: usize,
    pub seed: u64,
    pub trace: TraceOptions<T>,
}

impl<T: Real> Default for LeafTraceOptions<T> {
    fn default() -> Self {
        LeafTraceOptions {
            rho_max: T::of(4.0),
            max_branches: 8,
            seed_attempts: 400,
            seed: 1,
            trace: TraceOptions::default(),
        }
    }
}

/// Traces the leaf's solution set in profile coordinates, returning the
/// discovered branches. The all-zero torus leaf is the zero section, which
/// is not a curve; it is returned as the `rho = 0` axis polyline.
pub fn trace_leaf_curves<T: Real>(
    profile: &Profile<T>,
    spec: &LeafSpec<T>,
    opts: &LeafTraceOptions<T>,
) -> Result<Vec<TracedCurve<T>>> {
    if T::of(2.0) * opts.rho_max > profile.tau_max() {
        return Err(Error::Argument(
            "profile tau_max must cover 2 rho_max for leaf tracing".into(),
        ));
    }
    match spec.family {
        Family::T2 => {
            let zero = spec.constants.iter().all(|c| *c == T::zero());
            if zero {
                return Ok(vec![axis_polyline(4)]);
            }
            if spec.constants[0] == T::zero() && spec.constants[1] == T::zero() {
                // Degenerate subfamily: trace both sin(phi) = 0 branches in
                // the (t, rho) plane and lift back to slice coordinates.
                let mut curves = Vec::new();
                for sign in [T::one(), -T::one()] {
                    let system =
                        T2ReducedSystem { sign, c3: spec.constants[2], rho_max: opts.rho_max };
                    if let Ok(found) = trace_scalar_system(&system, false, opts) {
                        let phi = if sign > T::zero() { T::zero() } else { T::PI() };
                        curves.extend(found.into_iter().map(|c| lift_reduced_curve(c, phi)));
                    }
                }
                if curves.is_empty() {
                    return Err(Error::NoSolution);
                }
                return Ok(curves);
            }
            let system = T2System {
                profile,
                constants: [spec.constants[0], spec.constants[1], spec.constants[2]],
                rho_max: opts.rho_max,
            };
            trace_with_random_seeds(&system, opts)
        }
        Family::So3 => {
            let system = So3System { c: spec.constants[2], rho_max: opts.rho_max };
            trace_scalar_system(&system, spec.constants[2] == T::zero(), opts)
        }
        Family::SoN => {
            let system =
                SonSystem { n: spec.n, c: spec.constants[spec.n - 1], rho_max: opts.rho_max };
            trace_scalar_system(&system, spec.constants[spec.n - 1] == T::zero(), opts)
        }
    }
}

/// Lifts a `(t, rho)` curve to the four slice coordinates at fixed `phi`,
/// `psi = 0`.
fn lift_reduced_curve<T: Real>(curve: TracedCurve<T>, phi: T) -> TracedCurve<T> {
    let lift_point = |p: &Vec<T>| vec![p[0], p[1], phi, T::zero()];
    let lift_tan = |t: &Vec<T>| vec![t[0], t[1], T::zero(), T::zero()];
    TracedCurve {
        points: curve.points.iter().map(lift_point).collect(),
        tangents: curve.tangents.iter().map(lift_tan).collect(),
        stop_forward: curve.stop_forward,
        stop_backward: curve.stop_backward,
        branch_points: curve.branch_points,
    }
}

/// The `rho = 0` axis as a synthetic traced curve (the zero section).
fn axis_polyline<T: Real>(dim: usize) -> TracedCurve<T> {
    let steps = 64;
    let mut points = Vec::with_capacity(steps);
    let mut tangents = Vec::with_capacity(steps);
    for k in 0..steps {
        let t = T::PI() * T::of((k as f64 + 0.5) / steps as f64);
        let mut x = vec![T::zero(); dim];
        x[0] = t;
        points.push(x);
        let mut tan = vec![T::zero(); dim];
        tan[0] = T::one();
        tangents.push(tan);
    }
    TracedCurve {
        points,
        tangents,
        stop_forward: StopReason::ChartBoundary,
        stop_backward: StopReason::ChartBoundary,
        branch_points: Vec::new(),
    }
}

fn trace_with_random_seeds<T: Real>(
    system: &impl ImplicitCurve<T>,
    opts: &LeafTraceOptions<T>,
) -> Result<Vec<TracedCurve<T>>> {
    let mut rng = sampling::rng(opts.seed);
    let mut curves: Vec<TracedCurve<T>> = Vec::new();
    for _ in 0..opts.seed_attempts {
        if curves.len() >= opts.max_branches {
            break;
        }
        let guess = vec![
            T::of(rng.gen_range(0.05..std::f64::consts::PI - 0.05)),
            T::of(rng.gen_range(0.05..opts.rho_max.as_f64().min(3.0))),
            T::of(rng.gen_range(0.0..std::f64::consts::TAU)),
            T::of(rng.gen_range(0.0..std::f64::consts::TAU)),
        ];
        let mut refined = guess;
        if !crate::continuation::refine_seed(system, &mut refined, &opts.trace) {
            continue;
        }
        if system.out_of_chart(&refined) {
            continue;
        }
        if near_existing(&curves, &refined, opts.trace.max_step * T::of(2.0)) {
            continue;
        }
        if let Ok(curve) = trace(system, &refined, &opts.trace) {
            curves.push(curve);
        }
    }
    if curves.is_empty() {
        return Err(Error::NoSolution);
    }
    Ok(curves)
}

/// Seeds a scalar `(t, rho)` system by scanning columns for sign changes
/// plus, for the zero level, the `rho = 0` axis itself.
fn trace_scalar_system<T: Real>(
    system: &impl ImplicitCurve<T>,
    zero_level: bool,
    opts: &LeafTraceOptions<T>,
) -> Result<Vec<TracedCurve<T>>> {
    let mut curves: Vec<TracedCurve<T>> = Vec::new();
    let t_cols = 48;
    let rho_rows = 96;
    let mut f = [T::zero()];
    for i in 0..t_cols {
        if curves.len() >= opts.max_branches {
            break;
        }
        let t = T::PI() * T::of((i as f64 + 0.5) / t_cols as f64);
        let mut prev_rho = T::zero();
        system.residual(&[t, prev_rho], &mut f);
        let mut prev_val = f[0];
        for j in 1..=rho_rows {
            let rho = opts.rho_max * T::of(j as f64 / rho_rows as f64);
            system.residual(&[t, rho], &mut f);
            let val = f[0];
            if prev_val * val < T::zero() {
                // Bisect then hand to the tracer.
                let (mut lo, mut hi) = (prev_rho, rho);
                let (mut flo, _) = (prev_val, val);
                for _ in 0..80 {
                    let mid = (lo + hi) * T::of(0.5);
                    system.residual(&[t, mid], &mut f);
                    if f[0] * flo <= T::zero() {
                        hi = mid;
                    } else {
                        lo = mid;
                        flo = f[0];
                    }
                }
                let seed = vec![t, (lo + hi) * T::of(0.5)];
                if !near_existing(&curves, &seed, opts.trace.max_step * T::of(2.0)) {
                    if let Ok(curve) = trace(system, &seed, &opts.trace) {
                        curves.push(curve);
                    }
                }
            }
            prev_rho = rho;
            prev_val = val;
        }
    }
    if zero_level {
        let seed = vec![T::PI() * T::of(0.5), T::zero()];
        if !near_existing(&curves, &seed, opts.trace.max_step) {
            if let Ok(curve) = trace(system, &seed, &opts.trace) {
                curves.push(curve);
            }
        }
    }
    if curves.is_empty() {
        return Err(Error::NoSolution);
    }
    Ok(curves)
}

fn near_existing<T: Real>(curves: &[TracedCurve<T>], x: &[T], tol: T) -> bool {
    curves.iter().any(|c| {
        c.points.iter().any(|p| {
            let d: T = p.iter().zip(x).map(|(&a, &b)| (a - b) * (a - b)).sum::<T>().sqrt();
            d < tol
        })
    })
}

// ---------------------------------------------------------------------------
// Sampling leaves and verifying the special Lagrangian conditions.
// ---------------------------------------------------------------------------

/// One sampled leaf point: the ambient position, the tangent frame (group
/// directions plus the curve velocity; `None` where the orbit degenerates),
/// and diagnostics.
#[derive(Clone, Debug)]
pub struct LeafPoint<T: Real> {
    pub z: QuadricPoint<T>,
    pub frame: Option<TangentFrame<T>>,
    /// The curve velocity pushed to the sample point (part of the frame).
    pub velocity: ComplexVector<T>,
    pub curve_coords: Vec<T>,
    pub residual_norm: T,
}

/// A swept leaf: curve points times a grid of group parameters.
#[derive(Clone, Debug)]
pub struct LeafSample<T: Real> {
    pub spec: LeafSpec<T>,
    pub points: Vec<LeafPoint<T>>,
}

/// Sweeps the traced curve by the group action over an angle grid, attaching
/// tangent frames. `angle_res` is the number of grid points per group angle.
pub fn sample_leaf<T: Real>(
    profile: &Profile<T>,
    spec: &LeafSpec<T>,
    curves: &[TracedCurve<T>],
    angle_res: usize,
    max_curve_points: usize,
) -> Result<LeafSample<T>> {
    let preset = GroupPreset::<T>::new(spec.family.group_kind(), spec.n)?;
    let mut points = Vec::new();
    for curve in curves {
        let stride = (curve.points.len() / max_curve_points.max(1)).max(1);
        for (x, tangent) in curve.points.iter().zip(&curve.tangents).step_by(stride) {
            let (slice_z, slice_v) = match spec.family {
                Family::T2 => {
                    let jac = t2_slice_jacobian(x);
                    let mut v = ComplexVector::zeros(4);
                    for (j, d) in jac.iter().enumerate() {
                        v = v.add(&d.scale(tangent[j]));
                    }
                    (t2_slice_point(x), v)
                }
                Family::So3 | Family::SoN => (
                    rotation_slice_point(spec.n, x[0], x[1]),
                    rotation_slice_velocity(spec.n, x[0], x[1], tangent[0], tangent[1]),
                ),
            };
            for g in group_grid::<T>(spec.family, spec.n, angle_res) {
                let zv = g.apply_complex(&slice_z);
                let z = QuadricPoint::new(zv)?;
                let velocity = g.apply_complex(&slice_v);
                let res = residual(profile, spec, &z)?;
                let residual_norm = res.iter().map(|&r| r * r).sum::<T>().sqrt();
                let frame = build_frame(&preset, &z, &velocity);
                points.push(LeafPoint { z, frame, velocity, curve_coords: x.clone(), residual_norm });
            }
        }
    }
    Ok(LeafSample { spec: spec.clone(), points })
}

/// Group elements sweeping the orbit directions, on a regular angle grid.
fn group_grid<T: Real>(family: Family, n: usize, res: usize) -> Vec<OrthogonalMatrix<T>> {
    let mut out = Vec::new();
    match family {
        Family::T2 => {
            for i in 0..res {
                for j in 0..res {
                    let a = T::of(std::f64::consts::TAU * i as f64 / res as f64);
                    let b = T::of(std::f64::consts::TAU * j as f64 / res as f64);
                    out.push(OrthogonalMatrix::torus(a, b));
                }
            }
        }
        Family::So3 | Family::SoN => {
            // Rotations of the last n coordinates taking e_1 around the
            // sphere; for n = 3 these are the usual longitude/latitude
            // angles, higher n walks the leading three axes.
            for i in 0..res {
                for j in 0..res {
                    let a = T::of(std::f64::consts::TAU * i as f64 / res as f64);
                    let b = T::of(std::f64::consts::PI * (j as f64 + 0.5) / res as f64
                        - std::f64::consts::FRAC_PI_2);
                    let g1 = OrthogonalMatrix::plane_rotation(n + 1, 1, 2, a);
                    let g2 = OrthogonalMatrix::plane_rotation(n + 1, 1, (3).min(n), b);
                    out.push(compose(&g1, &g2));
                }
            }
        }
    }
    out
}

fn compose<T: Real>(a: &OrthogonalMatrix<T>, b: &OrthogonalMatrix<T>) -> OrthogonalMatrix<T> {
    let dim = a.dim();
    let am = a.matrix();
    let bm = b.matrix();
    let mut m = vec![vec![T::zero(); dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = T::zero();
            for k in 0..dim {
                acc = acc + am[i][k] * bm[k][j];
            }
            m[i][j] = acc;
        }
    }
    OrthogonalMatrix::new(m).expect("product of orthogonal matrices")
}

/// Frame at a sample: independent generator fields topped up with the curve
/// velocity. Returns `None` at degenerate orbit points.
fn build_frame<T: Real>(
    preset: &GroupPreset<T>,
    z: &QuadricPoint<T>,
    velocity: &ComplexVector<T>,
) -> Option<TangentFrame<T>> {
    let n = z.n();
    let mut vectors: Vec<ComplexVector<T>> = Vec::with_capacity(n);
    let mut kept: Vec<ComplexVector<T>> = Vec::new();
    for gen in preset.generators() {
        if kept.len() == n - 1 {
            break;
        }
        let field = gen.apply(z.vector());
        let norm = field.norm();
        if norm < T::of(1e-9) {
            continue;
        }
        let mut reduced = field.clone();
        for prev in &kept {
            let coeff = reduced.inner(prev) / prev.norm_sqr();
            reduced = reduced.sub(&prev.scale(coeff));
        }
        if reduced.norm() > T::of(1e-6) * norm {
            kept.push(field);
        }
    }
    if kept.len() != n - 1 {
        return None;
    }
    vectors.extend(kept);
    vectors.push(velocity.clone());
    TangentFrame::new(z.clone(), vectors).ok()
}

/// Statistics of the special Lagrangian verification over a leaf sample.
#[derive(Clone, Debug, serde::Serialize)]
pub struct SlReport {
    /// Max over samples and frame pairs of `|omega(Y_i, Y_j)|` scaled by the
    /// metric norms of the pair.
    pub max_omega: f64,
    /// Max over samples of `|Im Omega| / |Omega|` on the frame.
    pub max_im_omega: f64,
    /// Coefficient of variation of `|Omega| / volume` across samples.
    pub calibration_cv: f64,
    /// Max defining-equation residual norm over all samples.
    pub max_residual: f64,
    pub samples_used: usize,
    pub samples_skipped: usize,
}

/// Evaluates the Lagrangian and special conditions over a swept sample.
pub fn verify_sample<T: Real>(profile: &Profile<T>, sample: &LeafSample<T>) -> Result<SlReport> {
    let mut max_omega = 0f64;
    let mut max_im = 0f64;
    let mut max_residual = 0f64;
    let mut ratios: Vec<f64> = Vec::new();
    let mut used = 0usize;
    let mut skipped = 0usize;
    for point in &sample.points {
        max_residual = max_residual.max(point.residual_norm.as_f64());
        let frame = match &point.frame {
            Some(f) => f,
            None => {
                skipped += 1;
                continue;
            }
        };
        used += 1;
        let tau = point.z.tau();
        let up = profile.u_prime_at_tau(tau)?;
        let us = profile.u_second_at_tau(tau)?;
        let zv = point.z.vector();
        let vs = frame.vectors();
        let norms: Vec<T> = vs.iter().map(|v| metric_raw(up, us, zv, v, v).sqrt()).collect();
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                let omega = kahler_form_raw(up, us, zv, &vs[i], &vs[j]).abs();
                let scaled = omega / (norms[i] * norms[j]);
                max_omega = max_omega.max(scaled.as_f64());
            }
        }
        let volume_form = holomorphic_volume(frame);
        let magnitude = volume_form.norm();
        if magnitude > T::zero() {
            max_im = max_im.max((volume_form.im.abs() / magnitude).as_f64());
        }
        let vol = frame.volume(profile)?;
        ratios.push((magnitude / vol).as_f64());
    }
    let calibration_cv = coefficient_of_variation(&ratios);
    Ok(SlReport {
        max_omega,
        max_im_omega: max_im,
        calibration_cv,
        max_residual,
        samples_used: used,
        samples_skipped: skipped,
    })
}

pub(crate) fn coefficient_of_variation(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    if mean == 0.0 {
        return 0.0;
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / values.len() as f64;
    var.sqrt() / mean.abs()
}

/// Negative control: re-evaluates the sample with every point nudged off the
/// leaf by `delta` along a seeded random quadric-tangent direction, frames
/// rebuilt at the nudged points. A sound verifier must flag this sample.
pub fn perturbed_control<T: Real>(
    profile: &Profile<T>,
    sample: &LeafSample<T>,
    delta: T,
    seed: u64,
) -> Result<SlReport> {
    let preset = GroupPreset::<T>::new(sample.spec.family.group_kind(), sample.spec.n)?;
    let mut rng = sampling::rng(seed);
    let mut points = Vec::with_capacity(sample.points.len());
    for point in &sample.points {
        let dir = sampling::tangent_vector(&mut rng, &point.z);
        let moved = point.z.vector().add(&dir.vector().scale(delta));
        let z = requadric(&moved)?;
        let velocity = crate::quadric::project_tangent(&z, &point.velocity);
        let res = residual(profile, &sample.spec, &z)?;
        let residual_norm = res.iter().map(|&r| r * r).sum::<T>().sqrt();
        let frame = build_frame(&preset, &z, &velocity);
        points.push(LeafPoint {
            z,
            frame,
            velocity,
            curve_coords: point.curve_coords.clone(),
            residual_norm,
        });
    }
    verify_sample(profile, &LeafSample { spec: sample.spec.clone(), points })
}

/// Rescales an ambient vector back onto the quadric (complex square root of
/// the bilinear square).
pub fn requadric<T: Real>(v: &ComplexVector<T>) -> Result<QuadricPoint<T>> {
    let s = v.bilinear_sq();
    if s.norm() < T::of(1e-8) {
        return Err(Error::Degenerate("vector too close to the cone to rescale".into()));
    }
    let scale = s.sqrt().inv();
    QuadricPoint::new(v.scale_complex(scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuation::TraceOptions;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn profile3() -> Profile<f64> {
        Profile::build(3, 1.0, 16.0).unwrap()
    }

    #[test]
    fn strip_arccos_inverts_cos_on_strip() {
        for &(t, rho) in &[(0.3, 0.0), (1.2, 0.8), (2.9, 2.0), (0.05, 3.0)] {
            let tau = Complex64::new(t, rho);
            let back = strip_arccos(tau.cos()).unwrap();
            assert!((back - tau).norm() < 1e-12 * (1.0 + tau.norm()));
        }
    }

    #[test]
    fn strip_arccos_flags_double_points() {
        assert!(strip_arccos(Complex64::new(1.0, 0.0)).is_err());
        assert!(strip_arccos(Complex64::new(-1.0, 0.0)).is_err());
    }

    #[test]
    fn strip_arccos_on_real_cut_picks_upper_branch() {
        let tau = strip_arccos(Complex64::new(2.0, 0.0)).unwrap();
        assert!(tau.im > 0.0);
        assert!((tau.cos().re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn so3_third_matches_profile_plane_expression() {
        // Im(2 tau - sin 2 tau) = 2 rho - cos(2t) sinh(2 rho).
        for &(t, rho) in &[(0.4, 0.3), (1.0, 1.5), (2.2, 0.9)] {
            let tau = Complex64::new(t, rho);
            let val = so3_third_invariant(tau.cos()).unwrap();
            let expect = 2.0 * rho - (2.0 * t).cos() * (2.0 * rho).sinh();
            assert_relative_eq!(val, expect, max_relative = 1e-12);
        }
    }

    #[test]
    fn intrinsic_form_is_half_the_invariant() {
        for &(t, rho) in &[(0.7, 0.4), (1.9, 1.1)] {
            let z0 = Complex64::new(t, rho).cos();
            let a = so3_third_invariant(z0).unwrap();
            let b = so3_third_intrinsic(z0).unwrap();
            assert_relative_eq!(b, 0.5 * a, max_relative = 1e-12);
        }
    }

    #[test]
    fn son_reduces_to_so3_for_n3() {
        // Int sin^2 = (2 tau - sin 2 tau)/4.
        for &(t, rho) in &[(0.5, 0.2), (1.4, 1.0), (2.8, 2.5)] {
            let z0 = Complex64::new(t, rho).cos();
            let son = son_third_invariant(3, z0).unwrap();
            let so3 = so3_third_invariant(z0).unwrap();
            assert!((son - 0.25 * so3).abs() < 1e-9 * so3.abs().max(1.0));
        }
    }

    #[test]
    fn son_n2_reduces_to_im_z0() {
        // F(tau) = 1 - cos tau, so Im F(arccos z0) = -Im z0.
        for &(t, rho) in &[(0.5, 0.7), (2.0, 1.3)] {
            let z0 = Complex64::new(t, rho).cos();
            let val = son_third_invariant(2, z0).unwrap();
            assert_relative_eq!(val, -z0.im, max_relative = 1e-12);
        }
    }

    #[test]
    fn zero_section_lies_on_all_zero_leaves() {
        let p = profile3();
        let z = QuadricPoint::new(ComplexVector::from_real(&[0.36f64.sqrt(), 0.0, 0.8, 0.0])).unwrap();
        for family in [Family::T2, Family::So3, Family::SoN] {
            let spec = LeafSpec::new(family, 3, vec![0.0; 3]).unwrap();
            let res = residual(&p, &spec, &z).unwrap();
            for r in res {
                assert!(r.abs() < 1e-12, "{:?}", family);
            }
        }
    }

    #[test]
    fn classify_then_residual_vanishes() {
        let p = profile3();
        let mut r = sampling::rng(61);
        for _ in 0..200 {
            let z = sampling::quadric_point::<f64>(&mut r, 3, 3.0);
            for family in [Family::T2, Family::So3, Family::SoN] {
                let spec = match classify(&p, family, &z) {
                    Ok(s) => s,
                    Err(Error::Branch { .. }) => continue,
                    Err(e) => panic!("{e}"),
                };
                let res = residual(&p, &spec, &z).unwrap();
                for v in res {
                    assert_eq!(v, 0.0);
                }
            }
        }
    }

    #[test]
    fn classify_real_point_torus_constants_vanish() {
        let p = profile3();
        let z = QuadricPoint::new(ComplexVector::from_real(&[0.6, 0.8, 0.0, 0.0])).unwrap();
        let spec = classify(&p, Family::T2, &z).unwrap();
        for c in spec.constants() {
            assert!(c.abs() < 1e-14);
        }
    }

    #[test]
    fn t2_slice_point_is_on_quadric_and_jacobian_is_tangent() {
        let xs = [
            [0.7, 0.9, 0.4, 1.1],
            [2.1, 0.2, 3.0, 5.5],
            [1.5, 2.5, 1.0, 0.3],
        ];
        for x in xs {
            let z = t2_slice_point::<f64>(&x);
            assert!((z.bilinear_sq() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
            for d in t2_slice_jacobian::<f64>(&x) {
                assert!(z.bilinear(&d).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn t2_slice_jacobian_matches_finite_differences() {
        let x = [0.8, 1.1, 0.5, 2.2];
        let jac = t2_slice_jacobian::<f64>(&x);
        let h = 1e-6;
        for k in 0..4 {
            let mut xp = x;
            xp[k] += h;
            let mut xm = x;
            xm[k] -= h;
            let fd = t2_slice_point::<f64>(&xp)
                .sub(&t2_slice_point::<f64>(&xm))
                .scale(1.0 / (2.0 * h));
            assert!(fd.sub(&jac[k]).norm() < 1e-8);
        }
    }

    #[test]
    fn t2_parametrized_point_lies_on_its_classified_leaf() {
        let p = profile3();
        let x = [0.9, 0.8, 0.7, 1.3];
        let z = QuadricPoint::new(t2_slice_point::<f64>(&x)).unwrap();
        let spec = classify(&p, Family::T2, &z).unwrap();
        // An independently rotated point of the same parametrized leaf.
        let g = OrthogonalMatrix::torus(1.0, 2.0);
        let gz = g.apply_quadric(&z).unwrap();
        let res = residual(&p, &spec, &gz).unwrap();
        for v in res {
            assert!(v.abs() < 1e-10);
        }
    }

    #[test]
    fn so3_slice_equation_matches_residual() {
        let p = profile3();
        let (t, rho) = (0.8f64, 0.6f64);
        let c = 2.0 * rho - (2.0 * t).cos() * (2.0 * rho).sinh();
        let spec = LeafSpec::new(Family::So3, 3, vec![0.0, 0.0, c]).unwrap();
        let z = QuadricPoint::new(rotation_slice_point::<f64>(3, t, rho)).unwrap();
        let res = residual(&p, &spec, &z).unwrap();
        assert!(res[0].abs() < 1e-12);
        assert!(res[1].abs() < 1e-12);
        assert!(res[2].abs() < 1e-9);
    }

    #[test]
    fn torus_invariance_of_t2_residual() {
        let p = profile3();
        let mut r = sampling::rng(71);
        use rand::Rng;
        for _ in 0..20 {
            let z = sampling::quadric_point::<f64>(&mut r, 3, 3.0);
            let spec = classify(&p, Family::T2, &z).unwrap();
            let g = OrthogonalMatrix::torus(r.gen_range(0.0..std::f64::consts::TAU), r.gen_range(0.0..std::f64::consts::TAU));
            let gz = g.apply_quadric(&z).unwrap();
            let res = residual(&p, &spec, &gz).unwrap();
            for v in res {
                assert!(v.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn so3_invariance_on_zero_moment_leaves() {
        // For c1 = c2 = 0 leaves the whole residual vector is SO(3)-
        // invariant; the third equation only sees z0 which the stabilizer
        // fixes.
        let p = profile3();
        let (t, rho) = (1.1f64, 0.9f64);
        let c = 2.0 * rho - (2.0 * t).cos() * (2.0 * rho).sinh();
        let spec = LeafSpec::new(Family::So3, 3, vec![0.0, 0.0, c]).unwrap();
        let z = QuadricPoint::new(rotation_slice_point::<f64>(3, t, rho)).unwrap();
        let mut r = sampling::rng(73);
        use rand::Rng;
        for _ in 0..20 {
            let a = r.gen_range(0.0..std::f64::consts::TAU);
            let b = r.gen_range(0.0..std::f64::consts::TAU);
            let g = compose(
                &OrthogonalMatrix::plane_rotation(4, 1, 2, a),
                &OrthogonalMatrix::plane_rotation(4, 2, 3, b),
            );
            let gz = g.apply_quadric(&z).unwrap();
            let res = residual(&p, &spec, &gz).unwrap();
            assert!(res[0].abs() < 1e-10);
            assert!(res[1].abs() < 1e-10);
            assert!((res[2]).abs() < 1e-9);
            // The third invariant itself is untouched by any stabilizer
            // rotation, leaf or not.
            let v3 = so3_third_invariant(gz.vector().0[0]).unwrap();
            let v3_orig = so3_third_invariant(z.vector().0[0]).unwrap();
            assert!((v3 - v3_orig).abs() < 1e-10);
        }
    }

    #[test]
    fn so3_trace_finds_the_closed_form_point() {
        // At t = pi/4 the curve equation degenerates to 2 rho = c.
        let p = profile3();
        let spec = LeafSpec::new(Family::So3, 3, vec![0.0, 0.0, 1.0]).unwrap();
        let opts = LeafTraceOptions { rho_max: 4.0, ..Default::default() };
        let curves = trace_leaf_curves(&p, &spec, &opts).unwrap();
        // Closed-form anchor satisfies the implicit equation exactly.
        let sys = So3System { c: 1.0, rho_max: 4.0 };
        let mut f = [0.0];
        sys.residual(&[std::f64::consts::FRAC_PI_4, 0.5], &mut f);
        assert!(f[0].abs() < 1e-12);
        // ... and some traced branch passes through it.
        let target = [std::f64::consts::FRAC_PI_4, 0.5];
        let mind = curves
            .iter()
            .flat_map(|c| c.points.iter())
            .map(|p| ((p[0] - target[0]).powi(2) + (p[1] - target[1]).powi(2)).sqrt())
            .fold(f64::INFINITY, f64::min);
        assert!(mind < 0.05, "closest approach {mind}");
        // Every traced vertex satisfies the equation to the Newton tolerance.
        for c in &curves {
            for pt in &c.points {
                sys.residual(pt, &mut f);
                assert!(f[0].abs() < 1e-11);
            }
        }
    }

    #[test]
    fn so3_zero_level_matches_bisection_oracle() {
        // Independent oracle: for each t with cos(2t) in (0,1), bisect
        // 2 rho = cos(2t) sinh(2 rho) for its positive root.
        let p = profile3();
        let spec = LeafSpec::new(Family::So3, 3, vec![0.0, 0.0, 0.0]).unwrap();
        let opts = LeafTraceOptions { rho_max: 4.0, ..Default::default() };
        let curves = trace_leaf_curves(&p, &spec, &opts).unwrap();
        let g = |t: f64, rho: f64| 2.0 * rho - (2.0 * t).cos() * (2.0 * rho).sinh();
        for &t in &[0.15, 0.3, 0.6] {
            // Root is above the tangency scale; bracket from 0.1 to 4.
            let mut lo = 0.1;
            let mut hi = 4.0;
            assert!(g(t, hi) < 0.0, "bracket must straddle");
            if g(t, lo) < 0.0 {
                continue; // t too close to pi/4, no positive root above 0.1
            }
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if g(t, mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let rho_oracle = 0.5 * (lo + hi);
            let mind = curves
                .iter()
                .flat_map(|c| c.points.iter())
                .map(|p| ((p[0] - t).powi(2) + (p[1] - rho_oracle).powi(2)).sqrt())
                .fold(f64::INFINITY, f64::min);
            assert!(mind < 0.06, "t={t}: oracle point missed by {mind}");
        }
        // At t = 0 the only solution is rho = 0: 2 rho = sinh(2 rho).
        assert!(g(0.0, 1e-3) < 0.0);
        // The axis branch must be among the traced curves.
        let has_axis = curves
            .iter()
            .any(|c| c.points.iter().all(|p| p[1].abs() < 1e-9) && c.points.len() > 10);
        assert!(has_axis, "zero level must include the rho = 0 axis");
    }

    #[test]
    fn t2_trace_figure_anchor() {
        // Torus constants (0, 0, 1/2): on the sin(phi) = 0 branch the third
        // equation is sin(2t) sinh(2 rho) = 1, so t = pi/4 pairs with
        // rho = arcsinh(1)/2.
        let p = profile3();
        let spec = LeafSpec::new(Family::T2, 3, vec![0.0, 0.0, 0.5]).unwrap();
        let opts = LeafTraceOptions { rho_max: 4.0, seed: 5, ..Default::default() };
        let curves = trace_leaf_curves(&p, &spec, &opts).unwrap();
        let rho_anchor = 1.0f64.asinh() / 2.0;
        assert_relative_eq!(rho_anchor, 0.44068679350977147, max_relative = 1e-12);
        let anchor = [std::f64::consts::FRAC_PI_4, rho_anchor, std::f64::consts::PI];
        let mind = curves
            .iter()
            .flat_map(|c| c.points.iter())
            .map(|p| {
                // psi is free on this branch; compare (t, rho, phi mod 2pi).
                let dphi = {
                    let raw = (p[2] - anchor[2]).abs() % std::f64::consts::TAU;
                    raw.min(std::f64::consts::TAU - raw)
                };
                ((p[0] - anchor[0]).powi(2) + (p[1] - anchor[1]).powi(2) + dphi.powi(2)).sqrt()
            })
            .fold(f64::INFINITY, f64::min);
        assert!(mind < 0.1, "anchor missed by {mind}");
    }

    #[test]
    fn t2_zero_constants_sample_the_zero_section() {
        let p = profile3();
        let spec = LeafSpec::new(Family::T2, 3, vec![0.0; 3]).unwrap();
        let curves = trace_leaf_curves(&p, &spec, &LeafTraceOptions::default()).unwrap();
        let sample = sample_leaf(&p, &spec, &curves, 4, 16).unwrap();
        assert!(!sample.points.is_empty());
        for pt in &sample.points {
            assert!(pt.z.vector().im().iter().all(|v| v.abs() < 1e-12));
            assert!(pt.residual_norm < 1e-12);
        }
    }

    #[test]
    fn zero_section_sample_statistics_vanish() {
        let p = profile3();
        let spec = LeafSpec::new(Family::T2, 3, vec![0.0; 3]).unwrap();
        let curves = trace_leaf_curves(&p, &spec, &LeafTraceOptions::default()).unwrap();
        let sample = sample_leaf(&p, &spec, &curves, 6, 24).unwrap();
        let report = verify_sample(&p, &sample).unwrap();
        assert!(report.samples_used > 100);
        assert!(report.max_omega < 1e-12);
        assert!(report.max_im_omega < 1e-12);
        assert!(report.calibration_cv < 1e-12);
    }

    #[test]
    fn sampled_so3_leaf_is_special_lagrangian() {
        let p = profile3();
        let spec = LeafSpec::new(Family::So3, 3, vec![0.0, 0.0, 1.0]).unwrap();
        let opts = LeafTraceOptions { rho_max: 3.0, ..Default::default() };
        let curves = trace_leaf_curves(&p, &spec, &opts).unwrap();
        let sample = sample_leaf(&p, &spec, &curves, 6, 24).unwrap();
        assert!(sample.points.len() >= 24 * 36 / 2);
        let report = verify_sample(&p, &sample).unwrap();
        assert!(report.max_residual < 1e-9, "residual {}", report.max_residual);
        assert!(report.max_omega < 1e-8, "omega {}", report.max_omega);
        assert!(report.max_im_omega < 1e-8, "im {}", report.max_im_omega);
        assert!(report.calibration_cv < 1e-4, "cv {}", report.calibration_cv);
    }

    #[test]
    fn negative_control_trips_the_verifier() {
        let p = profile3();
        let spec = LeafSpec::new(Family::So3, 3, vec![0.0, 0.0, 1.0]).unwrap();
        let opts = LeafTraceOptions { rho_max: 3.0, ..Default::default() };
        let curves = trace_leaf_curves(&p, &spec, &opts).unwrap();
        let sample = sample_leaf(&p, &spec, &curves, 4, 12).unwrap();
        let control = perturbed_control(&p, &sample, 1e-3, 99).unwrap();
        assert!(control.max_omega > 1e-5, "control too quiet: {}", control.max_omega);
    }

    #[test]
    fn leaf_spec_validation() {
        assert!(LeafSpec::<f64>::new(Family::T2, 4, vec![0.0; 3]).is_err());
        assert!(LeafSpec::<f64>::new(Family::T2, 3, vec![0.0; 2]).is_err());
        assert!(LeafSpec::<f64>::new(Family::SoN, 4, vec![0.0; 4]).is_ok());
        assert!(LeafSpec::<f64>::new(Family::SoN, 4, vec![0.0; 3]).is_err());
        assert!(LeafSpec::<f64>::new(Family::So3, 3, vec![f64::NAN, 0.0, 0.0]).is_err());
    }

    #[test]
    fn distinct_constants_are_disjoint_leaves() {
        let p = profile3();
        let mut r = sampling::rng(91);
        let z = sampling::quadric_point::<f64>(&mut r, 3, 2.0);
        let spec_a = classify(&p, Family::T2, &z).unwrap();
        let spec_b = LeafSpec::new(
            Family::T2,
            3,
            vec![spec_a.constants()[0] + 0.1, spec_a.constants()[1], spec_a.constants()[2]],
        )
        .unwrap();
        let res = residual(&p, &spec_b, &z).unwrap();
        assert!(res[0].abs() > 0.09);
    }

    #[test]
    fn son_trace_n4_produces_valid_samples() {
        let p = Profile::build(4, 1.0, 12.0).unwrap();
        let mut constants = vec![0.0; 4];
        constants[3] = 0.8;
        let spec = LeafSpec::new(Family::SoN, 4, constants).unwrap();
        let opts = LeafTraceOptions { rho_max: 2.5, trace: TraceOptions::default(), ..Default::default() };
        let curves = trace_leaf_curves(&p, &spec, &opts).unwrap();
        let sample = sample_leaf(&p, &spec, &curves, 4, 10).unwrap();
        let report = verify_sample(&p, &sample).unwrap();
        assert!(report.max_residual < 1e-9);
        assert!(report.max_omega < 1e-8);
        assert!(report.max_im_omega < 1e-8);
    }
}
