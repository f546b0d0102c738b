//! The two models of the cotangent bundle of the n-sphere: the bundle
//! picture `(x, xi)` with `|x| = 1`, `x . xi = 0`, and the affine quadric
//! `sum z_i^2 = 1` in `C^{n+1}`, together with the diffeomorphism between
//! them and the `SO(n+1)` action shared by both.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::scalar::{acosh_stable, Real};
use crate::{Error, Result};

/// Default tolerance for the quadric and orthogonality constraints
/// (in `f64`; wider scalar types widen it through [`constraint_tol`]).
pub const EPS_Q: f64 = 1e-10;

/// The constraint tolerance for the scalar in use: `1e-10` for `f64`,
/// proportionally wider where the machine epsilon is larger.
pub fn constraint_tol<T: Real>() -> T {
    T::of(EPS_Q).max(T::epsilon() * T::of(100.0))
}

/// A vector in the ambient `C^{n+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexVector<T: Real>(pub Vec<Complex<T>>);

impl<T: Real> ComplexVector<T> {
    pub fn zeros(len: usize) -> Self {
        ComplexVector(vec![Complex::new(T::zero(), T::zero()); len])
    }

    pub fn from_real(x: &[T]) -> Self {
        ComplexVector(x.iter().map(|&r| Complex::new(r, T::zero())).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Bilinear square `sum z_i^2` (no conjugation).
    pub fn bilinear_sq(&self) -> Complex<T> {
        self.0
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z * z)
    }

    /// Bilinear pairing `sum a_i b_i`.
    pub fn bilinear(&self, other: &Self) -> Complex<T> {
        self.0
            .iter()
            .zip(&other.0)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a * b)
    }

    /// Hermitian pairing `sum a_i conj(b_i)`.
    pub fn hermitian(&self, other: &Self) -> Complex<T> {
        self.0
            .iter()
            .zip(&other.0)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a * b.conj())
    }

    /// Euclidean inner product of `R^{2(n+1)}`: `Re sum a_i conj(b_i)`.
    pub fn inner(&self, other: &Self) -> T {
        self.hermitian(other).re
    }

    /// Squared Euclidean norm `sum |z_i|^2`.
    pub fn norm_sqr(&self) -> T {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    /// Ambient complex structure: multiplication by `i`.
    pub fn j(&self) -> Self {
        ComplexVector(self.0.iter().map(|z| z * Complex::new(T::zero(), T::one())).collect())
    }

    pub fn conj(&self) -> Self {
        ComplexVector(self.0.iter().map(|z| z.conj()).collect())
    }

    pub fn scale(&self, s: T) -> Self {
        ComplexVector(self.0.iter().map(|z| z * s).collect())
    }

    pub fn scale_complex(&self, s: Complex<T>) -> Self {
        ComplexVector(self.0.iter().map(|z| z * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        ComplexVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        ComplexVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn re(&self) -> Vec<T> {
        self.0.iter().map(|z| z.re).collect()
    }

    pub fn im(&self) -> Vec<T> {
        self.0.iter().map(|z| z.im).collect()
    }

    /// Flat `[re, im]` pairs, the point serialization used by the CLI.
    pub fn to_re_im_pairs(&self) -> Vec<[f64; 2]> {
        self.0.iter().map(|z| [z.re.as_f64(), z.im.as_f64()]).collect()
    }

    pub fn from_re_im_pairs(pairs: &[[f64; 2]]) -> Self {
        ComplexVector(pairs.iter().map(|p| Complex::new(T::of(p[0]), T::of(p[1]))).collect())
    }
}

/// A point on the affine quadric `sum z_i^2 = 1`, validated at construction.
#[derive(Clone, Debug)]
pub struct QuadricPoint<T: Real> {
    z: ComplexVector<T>,
}

impl<T: Real> QuadricPoint<T> {
    pub fn new(z: ComplexVector<T>) -> Result<Self> {
        Self::with_tol(z, constraint_tol::<T>())
    }

    pub fn with_tol(z: ComplexVector<T>, tol: T) -> Result<Self> {
        let residual = (z.bilinear_sq() - Complex::new(T::one(), T::zero())).norm();
        if residual > tol {
            return Err(Error::Constraint {
                what: "quadric equation sum z_i^2 = 1",
                residual: residual.as_f64(),
                tol: tol.as_f64(),
            });
        }
        Ok(QuadricPoint { z })
    }

    pub fn vector(&self) -> &ComplexVector<T> {
        &self.z
    }

    /// Ambient dimension minus one: the `n` of `T*S^n`.
    pub fn n(&self) -> usize {
        self.z.len() - 1
    }

    pub fn norm_sqr(&self) -> T {
        self.z.norm_sqr()
    }

    /// `tau = arccosh |z|^2`, the radial coordinate.
    pub fn tau(&self) -> T {
        acosh_stable(self.norm_sqr())
    }

    /// Inverse of the bundle-to-quadric identification.
    ///
    /// `rho = arccosh(|z|^2)/2`, `x = Re z / cosh rho`,
    /// `xi = Im z * rho / sinh rho` (with the `rho -> 0` limit `xi = Im z`).
    pub fn to_cotangent(&self) -> Result<CotangentPoint<T>> {
        let r2 = self.norm_sqr();
        if r2 < T::one() - constraint_tol::<T>() {
            return Err(Error::Constraint {
                what: "|z|^2 >= 1 on the quadric",
                residual: (T::one() - r2).as_f64(),
                tol: EPS_Q,
            });
        }
        let rho = acosh_stable(r2) * T::of(0.5);
        let cosh_rho = rho.cosh();
        let factor = rho_over_sinh(rho);
        let x: Vec<T> = self.z.0.iter().map(|z| z.re / cosh_rho).collect();
        let xi: Vec<T> = self.z.0.iter().map(|z| z.im * factor).collect();
        CotangentPoint::new(x, xi)
    }
}

/// A holomorphic tangent vector to the quadric at a base point:
/// `sum z_i v_i = 0`.
#[derive(Clone, Debug)]
pub struct TangentVector<T: Real> {
    base: QuadricPoint<T>,
    v: ComplexVector<T>,
}

impl<T: Real> TangentVector<T> {
    pub fn new(base: QuadricPoint<T>, v: ComplexVector<T>) -> Result<Self> {
        let scale = T::one() + base.vector().norm() * v.norm();
        let residual = base.vector().bilinear(&v).norm();
        let tol = constraint_tol::<T>() * scale;
        if residual > tol {
            return Err(Error::Constraint {
                what: "holomorphic tangency sum z_i v_i = 0",
                residual: residual.as_f64(),
                tol: tol.as_f64(),
            });
        }
        Ok(TangentVector { base, v })
    }

    pub fn base(&self) -> &QuadricPoint<T> {
        &self.base
    }

    pub fn vector(&self) -> &ComplexVector<T> {
        &self.v
    }

    pub fn same_base(&self, other: &Self) -> bool {
        let diff = self.base.vector().sub(other.base.vector()).norm();
        diff <= constraint_tol::<T>() * (T::one() + self.base.vector().norm())
    }
}

/// Projects an arbitrary ambient vector onto the holomorphic tangent space
/// at `z` (removes the component violating `sum z_i v_i = 0`).
pub fn project_tangent<T: Real>(z: &QuadricPoint<T>, v: &ComplexVector<T>) -> ComplexVector<T> {
    let excess = z.vector().bilinear(v) / Complex::new(z.norm_sqr(), T::zero());
    v.sub(&z.vector().conj().scale_complex(excess))
}

/// A point of `T*S^n` in bundle coordinates.
#[derive(Clone, Debug)]
pub struct CotangentPoint<T: Real> {
    x: Vec<T>,
    xi: Vec<T>,
}

impl<T: Real> CotangentPoint<T> {
    pub fn new(x: Vec<T>, xi: Vec<T>) -> Result<Self> {
        Self::with_tol(x, xi, constraint_tol::<T>())
    }

    pub fn with_tol(x: Vec<T>, xi: Vec<T>, tol: T) -> Result<Self> {
        if x.len() != xi.len() || x.len() < 3 {
            return Err(Error::Argument(format!(
                "base and fiber must share length n+1 >= 3, got {} and {}",
                x.len(),
                xi.len()
            )));
        }
        let norm: T = x.iter().map(|&a| a * a).sum::<T>().sqrt();
        let unit_residual = (norm - T::one()).abs();
        if unit_residual > tol {
            return Err(Error::Constraint {
                what: "|x| = 1",
                residual: unit_residual.as_f64(),
                tol: tol.as_f64(),
            });
        }
        let dot: T = x.iter().zip(&xi).map(|(&a, &b)| a * b).sum();
        let fiber_scale = T::one() + xi.iter().map(|&a| a * a).sum::<T>().sqrt();
        if dot.abs() > tol * fiber_scale {
            return Err(Error::Constraint {
                what: "x . xi = 0",
                residual: dot.abs().as_f64(),
                tol: (tol * fiber_scale).as_f64(),
            });
        }
        Ok(CotangentPoint { x, xi })
    }

    pub fn base(&self) -> &[T] {
        &self.x
    }

    pub fn fiber(&self) -> &[T] {
        &self.xi
    }

    pub fn n(&self) -> usize {
        self.x.len() - 1
    }

    /// Fiber radius `rho = |xi|`.
    pub fn rho(&self) -> T {
        self.xi.iter().map(|&a| a * a).sum::<T>().sqrt()
    }

    /// The identification with the affine quadric:
    /// `z = x cosh|xi| + i (sinh|xi| / |xi|) xi`.
    pub fn to_quadric(&self) -> Result<QuadricPoint<T>> {
        let rho = self.rho();
        let cosh_rho = rho.cosh();
        let factor = sinh_over_rho(rho);
        let z: Vec<Complex<T>> = self
            .x
            .iter()
            .zip(&self.xi)
            .map(|(&x, &xi)| Complex::new(x * cosh_rho, xi * factor))
            .collect();
        QuadricPoint::new(ComplexVector(z))
    }
}

/// `sinh(rho)/rho` with its removable singularity at zero filled by series.
fn sinh_over_rho<T: Real>(rho: T) -> T {
    if rho < T::of(1e-4) {
        let r2 = rho * rho;
        T::one() + r2 / T::of(6.0) + r2 * r2 / T::of(120.0)
    } else {
        rho.sinh() / rho
    }
}

/// `rho/sinh(rho)`, the inverse factor used by the inverse map.
fn rho_over_sinh<T: Real>(rho: T) -> T {
    if rho < T::of(1e-4) {
        let r2 = rho * rho;
        // 1/(1 + r2/6 + r2^2/120) = 1 - r2/6 + 7 r2^2/360 + O(r2^3)
        T::one() - r2 / T::of(6.0) + r2 * r2 * T::of(7.0 / 360.0)
    } else {
        rho / rho.sinh()
    }
}

/// A real antisymmetric matrix, an infinitesimal rotation of `R^{n+1}`.
#[derive(Clone, Debug)]
pub struct LieAlgebraElement<T: Real> {
    a: Vec<Vec<T>>,
}

impl<T: Real> LieAlgebraElement<T> {
    /// Requires exact antisymmetry; presets are built from exact entries.
    pub fn new(a: Vec<Vec<T>>) -> Result<Self> {
        let dim = a.len();
        for row in &a {
            if row.len() != dim {
                return Err(Error::Argument("generator matrix must be square".into()));
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                if a[i][j] != -a[j][i] {
                    return Err(Error::Argument(format!(
                        "generator must be antisymmetric, entry ({i},{j})"
                    )));
                }
            }
        }
        Ok(LieAlgebraElement { a })
    }

    /// The rotation generator in the `(a, b)` coordinate plane whose moment
    /// component is `u' Im(z_a conj(z_b))`: entries `A[a][b] = -1`, `A[b][a] = 1`.
    pub fn plane(dim: usize, a: usize, b: usize) -> Self {
        let mut m = vec![vec![T::zero(); dim]; dim];
        m[a][b] = -T::one();
        m[b][a] = T::one();
        LieAlgebraElement { a: m }
    }

    pub fn zero(dim: usize) -> Self {
        LieAlgebraElement { a: vec![vec![T::zero(); dim]; dim] }
    }

    pub fn matrix(&self) -> &[Vec<T>] {
        &self.a
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// Applies the (real) matrix to a complex vector.
    pub fn apply(&self, v: &ComplexVector<T>) -> ComplexVector<T> {
        let dim = self.dim();
        let mut out = ComplexVector::zeros(dim);
        for i in 0..dim {
            let mut acc = Complex::new(T::zero(), T::zero());
            for j in 0..dim {
                acc = acc + v.0[j] * self.a[i][j];
            }
            out.0[i] = acc;
        }
        out
    }

    /// The induced vector field on the quadric, `z -> A z`; tangency is
    /// automatic because `A` is antisymmetric.
    pub fn field_at(&self, z: &QuadricPoint<T>) -> Result<TangentVector<T>> {
        TangentVector::new(z.clone(), self.apply(z.vector()))
    }

    pub fn sum(&self, other: &Self) -> Self {
        let dim = self.dim();
        let mut m = vec![vec![T::zero(); dim]; dim];
        for i in 0..dim {
            for j in 0..dim {
                m[i][j] = self.a[i][j] + other.a[i][j];
            }
        }
        LieAlgebraElement { a: m }
    }
}

/// A real orthogonal matrix acting on both models, validated at construction.
#[derive(Clone, Debug)]
pub struct OrthogonalMatrix<T: Real> {
    g: Vec<Vec<T>>,
}

impl<T: Real> OrthogonalMatrix<T> {
    pub fn new(g: Vec<Vec<T>>) -> Result<Self> {
        let dim = g.len();
        let tol = T::of(1e-12).max(T::epsilon() * T::of(100.0));
        for i in 0..dim {
            if g[i].len() != dim {
                return Err(Error::Argument("matrix must be square".into()));
            }
            for j in 0..dim {
                let mut acc = T::zero();
                for k in 0..dim {
                    acc = acc + g[k][i] * g[k][j];
                }
                let expect = if i == j { T::one() } else { T::zero() };
                if (acc - expect).abs() > tol {
                    return Err(Error::Argument(format!(
                        "matrix is not orthogonal to 1e-12 at entry ({i},{j})"
                    )));
                }
            }
        }
        Ok(OrthogonalMatrix { g })
    }

    pub fn identity(dim: usize) -> Self {
        let mut g = vec![vec![T::zero(); dim]; dim];
        for (i, row) in g.iter_mut().enumerate() {
            row[i] = T::one();
        }
        OrthogonalMatrix { g }
    }

    /// Block rotation by `theta_1` in the (0,1)-plane and `theta_2` in the
    /// (2,3)-plane: the maximal torus of `SO(4)`.
    pub fn torus(theta1: T, theta2: T) -> Self {
        let mut g = Self::identity(4).g;
        let (c1, s1) = (theta1.cos(), theta1.sin());
        let (c2, s2) = (theta2.cos(), theta2.sin());
        g[0][0] = c1;
        g[0][1] = -s1;
        g[1][0] = s1;
        g[1][1] = c1;
        g[2][2] = c2;
        g[2][3] = -s2;
        g[3][2] = s2;
        g[3][3] = c2;
        OrthogonalMatrix { g }
    }

    /// Plane rotation by `theta` in coordinates `(a, b)` of `R^dim`.
    pub fn plane_rotation(dim: usize, a: usize, b: usize, theta: T) -> Self {
        let mut g = Self::identity(dim).g;
        let (c, s) = (theta.cos(), theta.sin());
        g[a][a] = c;
        g[a][b] = -s;
        g[b][a] = s;
        g[b][b] = c;
        OrthogonalMatrix { g }
    }

    pub fn matrix(&self) -> &[Vec<T>] {
        &self.g
    }

    pub fn dim(&self) -> usize {
        self.g.len()
    }

    pub fn apply_real(&self, x: &[T]) -> Vec<T> {
        let dim = self.dim();
        let mut out = vec![T::zero(); dim];
        for i in 0..dim {
            for j in 0..dim {
                out[i] = out[i] + self.g[i][j] * x[j];
            }
        }
        out
    }

    pub fn apply_complex(&self, v: &ComplexVector<T>) -> ComplexVector<T> {
        let dim = self.dim();
        let mut out = ComplexVector::zeros(dim);
        for i in 0..dim {
            let mut acc = Complex::new(T::zero(), T::zero());
            for j in 0..dim {
                acc = acc + v.0[j] * self.g[i][j];
            }
            out.0[i] = acc;
        }
        out
    }

    /// Componentwise action `g.(x, xi) = (g x, g xi)`.
    pub fn apply_cotangent(&self, p: &CotangentPoint<T>) -> Result<CotangentPoint<T>> {
        CotangentPoint::new(self.apply_real(p.base()), self.apply_real(p.fiber()))
    }

    /// Complex-linear action on the quadric.
    pub fn apply_quadric(&self, p: &QuadricPoint<T>) -> Result<QuadricPoint<T>> {
        QuadricPoint::new(self.apply_complex(p.vector()))
    }
}

/// The subgroups of `SO(4)` (plus the general `SO(n)` stabilizer) whose
/// actions the toolkit studies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupKind {
    /// Full `SO(4)`, six generators.
    So4,
    /// The diagonal `SO(3)` copy (unit-quaternion left multiplication).
    So3Tilde,
    /// `S^1 x SO(3)`, four generators.
    S1xSo3,
    /// Maximal torus of `SO(4)`, two generators.
    T2,
    /// `SO(3)` stabilizing the first coordinate axis of `R^4`.
    So3Stab,
    /// `SO(n)` stabilizing the first coordinate axis of `R^{n+1}`.
    SonStab,
}

impl GroupKind {
    pub fn name(self) -> &'static str {
        match self {
            GroupKind::So4 => "so4",
            GroupKind::So3Tilde => "so3-tilde",
            GroupKind::S1xSo3 => "s1xso3",
            GroupKind::T2 => "t2",
            GroupKind::So3Stab => "so3-stab",
            GroupKind::SonStab => "son-stab",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "so4" => Some(GroupKind::So4),
            "so3-tilde" | "so3tilde" => Some(GroupKind::So3Tilde),
            "s1xso3" => Some(GroupKind::S1xSo3),
            "t2" => Some(GroupKind::T2),
            "so3-stab" | "so3stab" => Some(GroupKind::So3Stab),
            "son-stab" | "sonstab" => Some(GroupKind::SonStab),
        _ => None,
        }
    }
}

/// A named subgroup together with its infinitesimal generators.
#[derive(Clone, Debug)]
pub struct GroupPreset<T: Real> {
    kind: GroupKind,
    n: usize,
    generators: Vec<LieAlgebraElement<T>>,
}

impl<T: Real> GroupPreset<T> {
    /// Builds the preset for the configured sphere dimension `n`. All
    /// presets except `SonStab` require `n = 3`.
    pub fn new(kind: GroupKind, n: usize) -> Result<Self> {
        if kind != GroupKind::SonStab && n != 3 {
            return Err(Error::Argument(format!(
                "preset {} is specific to n = 3, got n = {n}",
                kind.name()
            )));
        }
        if n < 2 {
            return Err(Error::Argument("need n >= 2".into()));
        }
        let generators = match kind {
            GroupKind::So4 => so4_generators(),
            GroupKind::So3Tilde => so3_tilde_generators(),
            GroupKind::S1xSo3 => {
                let mut gens = vec![LieAlgebraElement::plane(4, 0, 1)];
                gens.extend(so3_tilde_generators());
                gens
            }
            GroupKind::T2 => vec![
                LieAlgebraElement::plane(4, 0, 1),
                LieAlgebraElement::plane(4, 2, 3),
            ],
            GroupKind::So3Stab => so3_stab_generators(),
            GroupKind::SonStab => {
                let dim = n + 1;
                let mut gens = Vec::new();
                for a in 1..dim {
                    for b in a + 1..dim {
                        gens.push(LieAlgebraElement::plane(dim, a, b));
                    }
                }
                gens
            }
        };
        Ok(GroupPreset { kind, n, generators })
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[LieAlgebraElement<T>] {
        &self.generators
    }

    /// Whether the level `c` of the moment map can contain a G-invariant
    /// submanifold: for non-abelian presets only the zero level qualifies;
    /// the torus admits every level and the circle factor of `S^1 x SO(3)`
    /// is unconstrained.
    pub fn admissible_level(&self, c: &[T]) -> bool {
        if c.len() != self.generators.len() {
            return false;
        }
        let zero = |v: T| v == T::zero();
        match self.kind {
            GroupKind::T2 => true,
            GroupKind::S1xSo3 => c[1..].iter().copied().all(zero),
            GroupKind::SonStab if self.n == 2 => true,
            _ => c.iter().copied().all(zero),
        }
    }
}

/// The six `SO(4)` generators, entry for entry as used throughout.
fn so4_generators<T: Real>() -> Vec<LieAlgebraElement<T>> {
    let e = |rows: [[i8; 4]; 4]| from_signs(rows);
    vec![
        e([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]),
        e([[0, 0, -1, 0], [0, 0, 0, 0], [1, 0, 0, 0], [0, 0, 0, 0]]),
        e([[0, 0, 0, -1], [0, 0, 0, 0], [0, 0, 0, 0], [1, 0, 0, 0]]),
        e([[0, 0, 0, 0], [0, 0, 1, 0], [0, -1, 0, 0], [0, 0, 0, 0]]),
        e([[0, 0, 0, 0], [0, 0, 0, 1], [0, 0, 0, 0], [0, -1, 0, 0]]),
        e([[0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]]),
    ]
}

/// Generators of the diagonal `SO(3)` copy inside `SO(4)`.
fn so3_tilde_generators<T: Real>() -> Vec<LieAlgebraElement<T>> {
    let e = |rows: [[i8; 4]; 4]| from_signs(rows);
    vec![
        e([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]]),
        e([[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]]),
        e([[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]]),
    ]
}

/// Generators `A_1, A_2, A_3` of the axis-stabilizing `SO(3)`.
fn so3_stab_generators<T: Real>() -> Vec<LieAlgebraElement<T>> {
    let e = |rows: [[i8; 4]; 4]| from_signs(rows);
    vec![
        e([[0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]]),
        e([[0, 0, 0, 0], [0, 0, 0, 1], [0, 0, 0, 0], [0, -1, 0, 0]]),
        e([[0, 0, 0, 0], [0, 0, -1, 0], [0, 1, 0, 0], [0, 0, 0, 0]]),
    ]
}

fn from_signs<T: Real>(rows: [[i8; 4]; 4]) -> LieAlgebraElement<T> {
    let a = rows
        .iter()
        .map(|row| row.iter().map(|&v| T::of(v as f64)).collect())
        .collect();
    LieAlgebraElement::new(a).expect("preset matrices are antisymmetric")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn embed_zero_fiber_is_real_point() {
        let p = CotangentPoint::new(vec![0.0, 1.0, 0.0, 0.0], vec![0.0; 4]).unwrap();
        let z = p.to_quadric().unwrap();
        assert_eq!(z.vector().0[1], c(1.0, 0.0));
        assert_eq!(z.vector().0[0], c(0.0, 0.0));
    }

    #[test]
    fn embed_axis_fiber_closed_form() {
        let rho = 0.8f64;
        let p = CotangentPoint::new(vec![1.0, 0.0, 0.0, 0.0], vec![0.0, rho, 0.0, 0.0]).unwrap();
        let z = p.to_quadric().unwrap();
        assert_relative_eq!(z.vector().0[0].re, rho.cosh(), max_relative = 1e-15);
        assert_relative_eq!(z.vector().0[1].im, rho.sinh(), max_relative = 1e-15);
        assert_eq!(z.vector().0[2], c(0.0, 0.0));
        // |z|^2 = cosh(2 rho)
        assert_relative_eq!(z.norm_sqr(), (2.0 * rho).cosh(), max_relative = 1e-14);
    }

    #[test]
    fn unembed_closed_form() {
        let z = QuadricPoint::new(ComplexVector(vec![
            c(1.0f64.cosh(), 0.0),
            c(0.0, 1.0f64.sinh()),
            c(0.0, 0.0),
            c(0.0, 0.0),
        ]))
        .unwrap();
        let p = z.to_cotangent().unwrap();
        assert_relative_eq!(p.base()[0], 1.0, max_relative = 1e-14);
        assert_relative_eq!(p.fiber()[1], 1.0, max_relative = 1e-14);
    }

    #[test]
    fn unembed_real_point() {
        let z = QuadricPoint::new(ComplexVector::from_real(&[0.6f64, 0.8, 0.0, 0.0])).unwrap();
        let p = z.to_cotangent().unwrap();
        assert_relative_eq!(p.base()[0], 0.6, max_relative = 1e-14);
        assert!(p.rho() < 1e-12);
    }

    #[test]
    fn off_quadric_rejected() {
        let bad = ComplexVector(vec![c(1.1, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(QuadricPoint::new(bad).is_err());
    }

    #[test]
    fn cotangent_invariants_enforced() {
        assert!(CotangentPoint::new(vec![1.0, 0.1, 0.0, 0.0], vec![0.0; 4]).is_err());
        assert!(CotangentPoint::new(vec![1.0, 0.0, 0.0, 0.0], vec![0.5, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn torus_half_turn_negates_first_block() {
        let g = OrthogonalMatrix::torus(std::f64::consts::PI, 0.0);
        let z = CotangentPoint::new(vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 0.3, 0.4, 0.0])
            .unwrap()
            .to_quadric()
            .unwrap();
        let gz = g.apply_quadric(&z).unwrap();
        let want0 = -z.vector().0[0];
        let want1 = -z.vector().0[1];
        assert!((gz.vector().0[0] - want0).norm() < 1e-12);
        assert!((gz.vector().0[1] - want1).norm() < 1e-12);
        assert!((gz.vector().0[2] - z.vector().0[2]).norm() < 1e-12);
    }

    #[test]
    fn identity_acts_trivially() {
        let g = OrthogonalMatrix::<f64>::identity(4);
        let p = CotangentPoint::new(vec![0.0, 0.0, 1.0, 0.0], vec![1.5, 0.0, 0.0, 0.0]).unwrap();
        let q = g.apply_cotangent(&p).unwrap();
        assert_eq!(q.base(), p.base());
        assert_eq!(q.fiber(), p.fiber());
    }

    #[test]
    fn non_orthogonal_rejected() {
        let mut g = OrthogonalMatrix::<f64>::identity(4).matrix().to_vec();
        g[0][0] = 1.0 + 1e-6;
        assert!(OrthogonalMatrix::new(g).is_err());
    }

    #[test]
    fn generator_field_b1() {
        let preset = GroupPreset::<f64>::new(GroupKind::T2, 3).unwrap();
        let z = CotangentPoint::new(vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 0.4, 0.2, 0.1])
            .unwrap()
            .to_quadric()
            .unwrap();
        let field = preset.generators()[0].field_at(&z).unwrap();
        let zv = z.vector();
        assert!((field.vector().0[0] + zv.0[1]).norm() < 1e-15);
        assert!((field.vector().0[1] - zv.0[0]).norm() < 1e-15);
        assert_eq!(field.vector().0[2], c(0.0, 0.0));
    }

    #[test]
    fn generator_field_a3_on_slice() {
        let preset = GroupPreset::<f64>::new(GroupKind::So3Stab, 3).unwrap();
        let tau = Complex64::new(0.7, 0.25);
        let z = QuadricPoint::new(ComplexVector(vec![tau.cos(), tau.sin(), c(0.0, 0.0), c(0.0, 0.0)]))
            .unwrap();
        let a3 = &preset.generators()[2];
        let field = a3.field_at(&z).unwrap();
        assert_eq!(field.vector().0[0], c(0.0, 0.0));
        assert_eq!(field.vector().0[1], c(0.0, 0.0));
        assert!((field.vector().0[2] - tau.sin()).norm() < 1e-15);
        // A_1 annihilates the slice point.
        let a1 = &preset.generators()[0];
        assert_eq!(a1.apply(z.vector()).norm(), 0.0);
    }

    #[test]
    fn zero_generator_gives_zero_field() {
        let a = LieAlgebraElement::<f64>::zero(4);
        let z = QuadricPoint::new(ComplexVector::from_real(&[1.0, 0.0, 0.0, 0.0])).unwrap();
        assert_eq!(a.field_at(&z).unwrap().vector().norm(), 0.0);
    }

    #[test]
    fn preset_generator_counts() {
        assert_eq!(GroupPreset::<f64>::new(GroupKind::So4, 3).unwrap().generators().len(), 6);
        assert_eq!(GroupPreset::<f64>::new(GroupKind::So3Tilde, 3).unwrap().generators().len(), 3);
        assert_eq!(GroupPreset::<f64>::new(GroupKind::S1xSo3, 3).unwrap().generators().len(), 4);
        assert_eq!(GroupPreset::<f64>::new(GroupKind::T2, 3).unwrap().generators().len(), 2);
        assert_eq!(GroupPreset::<f64>::new(GroupKind::So3Stab, 3).unwrap().generators().len(), 3);
        assert_eq!(GroupPreset::<f64>::new(GroupKind::SonStab, 4).unwrap().generators().len(), 6);
        assert!(GroupPreset::<f64>::new(GroupKind::So4, 4).is_err());
    }

    #[test]
    fn admissible_levels_by_kind() {
        let t2 = GroupPreset::<f64>::new(GroupKind::T2, 3).unwrap();
        assert!(t2.admissible_level(&[0.3, -1.0]));
        let so4 = GroupPreset::<f64>::new(GroupKind::So4, 3).unwrap();
        assert!(so4.admissible_level(&[0.0; 6]));
        assert!(!so4.admissible_level(&[0.1, 0.0, 0.0, 0.0, 0.0, 0.0]));
        let s1so3 = GroupPreset::<f64>::new(GroupKind::S1xSo3, 3).unwrap();
        assert!(s1so3.admissible_level(&[2.5, 0.0, 0.0, 0.0]));
        assert!(!s1so3.admissible_level(&[2.5, 0.1, 0.0, 0.0]));
    }

    #[test]
    fn tangent_projection_is_tangent() {
        let z = CotangentPoint::new(vec![0.0, 1.0, 0.0, 0.0], vec![0.5, 0.0, 0.5, 0.0])
            .unwrap()
            .to_quadric()
            .unwrap();
        let raw = ComplexVector(vec![c(0.2, -0.1), c(1.0, 0.4), c(-0.3, 0.9), c(0.0, 2.0)]);
        let v = project_tangent(&z, &raw);
        assert!(z.vector().bilinear(&v).norm() < 1e-14);
        assert!(TangentVector::new(z, v).is_ok());
    }
}
