//! The Kähler potential profile of the Ricci-flat metric on the quadric.
//!
//! With `tau = arccosh(r^2)` and `w = du/dtau`, the potential solves
//! `d/dtau (w^n) = c n sinh^{n-1}(tau)`, `w(0) = 0`, i.e.
//! `w = (c n Int_0^tau sinh^{n-1})^{1/n}`. Closed forms exist for `n = 2`
//! (`w = 2 sqrt(c) sinh(tau/2)`) and `n = 3`
//! (`w^3 = (3c/2)(sinh(2 tau)/2 - tau)`); other dimensions go through
//! cumulative Gauss-Legendre tables.
//!
//! Derivative-argument convention: `w` is the tau-derivative. The
//! r^2-derivatives used by the form evaluators are exposed separately as
//! [`Profile::u_prime`] (`du/d(r^2) = w/sinh(tau)`) and [`Profile::u_second`];
//! the two conventions are never overloaded onto one name. Near `tau = 0`
//! every evaluator switches to a series in `tau^2` to avoid cancellation at
//! the removable singularity.

use serde::{Deserialize, Serialize};

use crate::quadrature::{gl16, integrate};
use crate::scalar::{acosh_stable, Real};
use crate::{Error, Result};

/// Below this `tau` the series expansions take over from the direct formulas.
const TAU_SERIES: f64 = 0.02;

/// Panel width of the cumulative quadrature tables.
const PANEL: f64 = 0.05;

/// Taylor data in `tau^2` around the branch point, derived once per `n`.
#[derive(Clone, Debug)]
struct Series<T> {
    /// `w = c^{1/n} tau (1 + c2 t2 + c4 t2^2 + c6 t2^3)`, `t2 = tau^2`.
    c2: T,
    c4: T,
    c6: T,
    /// `du/d(r^2) = c^{1/n} (1 + d2 t2 + d4 t2^2 + d6 t2^3)`.
    d2: T,
    d4: T,
    d6: T,
}

impl<T: Real> Series<T> {
    fn for_dimension(n: usize) -> Self {
        let nf = n as f64;
        let m = nf - 1.0;
        let a2 = m / 6.0;
        let a4 = m * m / 72.0 - m / 180.0;
        let a6 = m * m * m / 1296.0 - m * m / 1080.0 + m / 2835.0;
        let b2 = nf * a2 / (nf + 2.0);
        let b4 = nf * a4 / (nf + 4.0);
        let b6 = nf * a6 / (nf + 6.0);
        let nu = 1.0 / nf;
        let c2 = nu * b2;
        let c4 = nu * b4 + nu * (nu - 1.0) / 2.0 * b2 * b2;
        let c6 = nu * b6 + nu * (nu - 1.0) * b2 * b4 + nu * (nu - 1.0) * (nu - 2.0) / 6.0 * b2 * b2 * b2;
        let d2 = c2 - 1.0 / 6.0;
        let d4 = c4 - c2 / 6.0 + 7.0 / 360.0;
        let d6 = c6 - c4 / 6.0 + 7.0 * c2 / 360.0 - 31.0 / 15120.0;
        Series {
            c2: T::of(c2),
            c4: T::of(c4),
            c6: T::of(c6),
            d2: T::of(d2),
            d4: T::of(d4),
            d6: T::of(d6),
        }
    }
}

/// Evaluator for the potential derivative profile at fixed `(n, c)`.
///
/// Holds cumulative quadrature tables on a `tau` grid up to `tau_max`;
/// evaluation combines the table with a closing Gauss-Legendre tail, so
/// values are accurate to machine precision at any `tau` in range.
#[derive(Clone, Debug)]
pub struct Profile<T: Real> {
    n: usize,
    c: T,
    tau_max: T,
    /// Grid nodes (panel boundaries), geometric near zero then uniform.
    tau_grid: Vec<T>,
    /// `w` at the grid nodes.
    w_grid: Vec<T>,
    /// Cumulative `Int_0^{tau_k} sinh^{n-1}`.
    cum_sinh: Vec<T>,
    /// Cumulative `Int_0^{tau_k} w` (the potential itself, up to a constant).
    cum_w: Vec<T>,
    series: Series<T>,
    root: T,
}

impl<T: Real> Profile<T> {
    /// Builds the profile for dimension `n >= 2`, ODE constant `c > 0`,
    /// covering `tau` in `[0, tau_max]`.
    pub fn build(n: usize, c: T, tau_max: T) -> Result<Self> {
        if n < 2 {
            return Err(Error::Argument(format!("need n >= 2, got {n}")));
        }
        if !(c > T::zero()) {
            return Err(Error::Domain { what: "ODE constant c must be positive", value: c.as_f64() });
        }
        if !(tau_max > T::zero()) {
            return Err(Error::Argument("tau_max must be positive".into()));
        }
        let series = Series::for_dimension(n);
        let root = c.powf(T::one() / T::of(n as f64));

        let mut tau_grid = vec![T::zero()];
        let mut t = 1e-4;
        while t < 0.1 && t < tau_max.as_f64() {
            tau_grid.push(T::of(t));
            t *= 2.0;
        }
        let mut t = 0.1f64.min(tau_max.as_f64());
        while t < tau_max.as_f64() {
            tau_grid.push(T::of(t));
            t += PANEL;
        }
        tau_grid.push(tau_max);

        let mut profile = Profile {
            n,
            c,
            tau_max,
            tau_grid,
            w_grid: Vec::new(),
            cum_sinh: Vec::new(),
            cum_w: Vec::new(),
            series,
            root,
        };
        profile.fill_tables();
        Ok(profile)
    }

    fn fill_tables(&mut self) {
        let n = self.n;
        let mut cum_sinh = Vec::with_capacity(self.tau_grid.len());
        let mut acc = T::zero();
        cum_sinh.push(acc);
        for k in 1..self.tau_grid.len() {
            let (a, b) = (self.tau_grid[k - 1], self.tau_grid[k]);
            acc = acc + gl16(a, b, |s| sinh_pow(s, n));
            cum_sinh.push(acc);
        }
        self.cum_sinh = cum_sinh;
        self.w_grid = self.tau_grid.iter().map(|&t| self.w(t)).collect();

        let mut cum_w = Vec::with_capacity(self.tau_grid.len());
        let mut acc = T::zero();
        cum_w.push(acc);
        for k in 1..self.tau_grid.len() {
            let (a, b) = (self.tau_grid[k - 1], self.tau_grid[k]);
            acc = acc + gl16(a, b, |s| self.w(s));
            cum_w.push(acc);
        }
        self.cum_w = cum_w;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c(&self) -> T {
        self.c
    }

    pub fn tau_max(&self) -> T {
        self.tau_max
    }

    pub fn tau_grid(&self) -> &[T] {
        &self.tau_grid
    }

    pub fn w_grid(&self) -> &[T] {
        &self.w_grid
    }

    /// `c^{1/n}`, the limit of `du/d(r^2)` at the zero section.
    pub fn u_prime_limit(&self) -> T {
        self.root
    }

    fn check_tau(&self, tau: T) -> Result<()> {
        if tau < T::zero() || !tau.is_finite() {
            return Err(Error::Domain { what: "tau must be >= 0", value: tau.as_f64() });
        }
        if tau > self.tau_max * (T::one() + T::of(1e-12)) {
            return Err(Error::Domain { what: "tau beyond profile range", value: tau.as_f64() });
        }
        Ok(())
    }

    /// `Int_0^tau sinh^{n-1}`, closed form for n = 2, 3, tables otherwise.
    fn sinh_integral(&self, tau: T) -> T {
        match self.n {
            2 => {
                let s = (tau * T::of(0.5)).sinh();
                T::of(2.0) * s * s
            }
            3 => sinh3_bracket(tau) * T::of(0.5),
            _ => self.sinh_integral_quadrature(tau),
        }
    }

    /// The pure quadrature route (used for every `n` as the cross-check
    /// against the closed forms).
    pub fn sinh_integral_quadrature(&self, tau: T) -> T {
        let n = self.n;
        let k = match self.tau_grid.binary_search_by(|probe| probe.partial_cmp(&tau).unwrap()) {
            Ok(idx) => return self.cum_sinh[idx],
            Err(idx) => idx.saturating_sub(1),
        };
        self.cum_sinh[k] + integrate(self.tau_grid[k], tau, T::of(PANEL), |s| sinh_pow(s, n))
    }

    /// `w(tau) = du/dtau`.
    pub fn w(&self, tau: T) -> T {
        let base = self.c * T::of(self.n as f64) * self.sinh_integral(tau);
        match self.n {
            2 => base.sqrt(),
            3 => base.cbrt(),
            _ => base.powf(T::one() / T::of(self.n as f64)),
        }
    }

    /// `w` evaluated through the quadrature tables regardless of `n`.
    pub fn w_quadrature(&self, tau: T) -> T {
        let base = self.c * T::of(self.n as f64) * self.sinh_integral_quadrature(tau);
        base.powf(T::one() / T::of(self.n as f64))
    }

    /// `dw/dtau = c sinh^{n-1}(tau) / w^{n-1}`, by series at the origin.
    pub fn dw_dtau(&self, tau: T) -> T {
        if tau.as_f64() < TAU_SERIES {
            let t2 = tau * tau;
            let s = &self.series;
            return self.root
                * (T::one()
                    + T::of(3.0) * s.c2 * t2
                    + T::of(5.0) * s.c4 * t2 * t2
                    + T::of(7.0) * s.c6 * t2 * t2 * t2);
        }
        let w = self.w(tau);
        self.c * sinh_pow(tau, self.n) / w.powi(self.n as i32 - 1)
    }

    fn u_prime_tau(&self, tau: T) -> T {
        if tau.as_f64() < TAU_SERIES {
            let t2 = tau * tau;
            let s = &self.series;
            return self.root * (T::one() + s.d2 * t2 + s.d4 * t2 * t2 + s.d6 * t2 * t2 * t2);
        }
        self.w(tau) / tau.sinh()
    }

    fn u_second_tau(&self, tau: T) -> T {
        if tau.as_f64() < TAU_SERIES {
            let t2 = tau * tau;
            let s = &self.series;
            let e0 = T::of(2.0) * s.d2;
            let e2 = T::of(4.0) * s.d4 - s.d2 / T::of(3.0);
            let e4 = T::of(6.0) * s.d6 - T::of(2.0) * s.d4 / T::of(3.0) + T::of(7.0 / 180.0) * s.d2;
            return self.root * (e0 + e2 * t2 + e4 * t2 * t2);
        }
        let sh = tau.sinh();
        let ch = tau.cosh();
        let w = self.w(tau);
        let wp = self.c * sinh_pow(tau, self.n) / w.powi(self.n as i32 - 1);
        (wp * sh - w * ch) / (sh * sh * sh)
    }

    /// First derivative of the potential in the `r^2` argument.
    pub fn u_prime(&self, r2: T) -> Result<T> {
        let tau = self.tau_of_r2(r2)?;
        Ok(self.u_prime_tau(tau))
    }

    /// Second derivative of the potential in the `r^2` argument.
    pub fn u_second(&self, r2: T) -> Result<T> {
        let tau = self.tau_of_r2(r2)?;
        Ok(self.u_second_tau(tau))
    }

    /// Same derivatives parametrized by `tau` directly.
    pub fn u_prime_at_tau(&self, tau: T) -> Result<T> {
        self.check_tau(tau)?;
        Ok(self.u_prime_tau(tau))
    }

    pub fn u_second_at_tau(&self, tau: T) -> Result<T> {
        self.check_tau(tau)?;
        Ok(self.u_second_tau(tau))
    }

    /// Converts the `r^2` argument, rejecting `r^2 < 1`.
    pub fn tau_of_r2(&self, r2: T) -> Result<T> {
        if r2 < T::one() - T::of(1e-9) || !r2.is_finite() {
            return Err(Error::Domain { what: "r^2 must be >= 1 on the quadric", value: r2.as_f64() });
        }
        let tau = acosh_stable(r2);
        self.check_tau(tau)?;
        Ok(tau)
    }

    /// `u(tau) - u(0) = Int_0^tau w`, the potential normalized at the zero
    /// section.
    pub fn u_tau(&self, tau: T) -> Result<T> {
        self.check_tau(tau)?;
        let k = match self.tau_grid.binary_search_by(|probe| probe.partial_cmp(&tau).unwrap()) {
            Ok(idx) => return Ok(self.cum_w[idx]),
            Err(idx) => idx.saturating_sub(1),
        };
        Ok(self.cum_w[k] + integrate(self.tau_grid[k], tau, T::of(PANEL), |s| self.w(s)))
    }

    /// `u(tau_b) - u(tau_a)` integrated directly over `[tau_a, tau_b]`.
    ///
    /// For nearby arguments this is far more accurate than differencing
    /// [`Profile::u_tau`]; the finite-difference oracles depend on that.
    pub fn u_delta(&self, tau_a: T, tau_b: T) -> Result<T> {
        self.check_tau(tau_a)?;
        self.check_tau(tau_b)?;
        Ok(integrate(tau_a, tau_b, T::of(PANEL), |s| self.w(s)))
    }

    /// `u(tau0 + dtau) - u(tau0)` with the increment kept separate: the
    /// integral runs over the unit parameter so the tiny width never gets
    /// rounded into the large base argument. This is what keeps the
    /// second-difference oracles clean at large radius.
    pub fn u_delta_rel(&self, tau0: T, dtau: T) -> Result<T> {
        self.check_tau(tau0)?;
        self.check_tau((tau0 + dtau).max(T::zero()))?;
        let width = dtau.abs();
        if width == T::zero() {
            return Ok(T::zero());
        }
        let panels = (width / T::of(PANEL)).ceil().as_f64().max(1.0) as usize;
        let val = (0..panels)
            .map(|k| {
                let lo = T::of(k as f64 / panels as f64);
                let hi = T::of((k + 1) as f64 / panels as f64);
                gl16(lo, hi, |s| self.w((tau0 + s * dtau).max(T::zero())))
            })
            .fold(T::zero(), |acc, v| acc + v);
        Ok(val * dtau)
    }

    /// Scaled residual of the defining ODE at `tau`, measured by a
    /// fourth-order central difference of `w^n` against `c n sinh^{n-1}`.
    /// The scale is `max(1, |rhs|)`.
    pub fn ode_residual_scaled(&self, tau: T) -> T {
        let h = T::of(1e-3).min(tau * T::of(0.25)).max(T::of(1e-6));
        let wn = |t: T| {
            let t = t.max(T::zero());
            self.w(t).powi(self.n as i32)
        };
        let two = T::of(2.0);
        let fd = (-wn(tau + two * h) + T::of(8.0) * wn(tau + h) - T::of(8.0) * wn(tau - h)
            + wn(tau - two * h))
            / (T::of(12.0) * h);
        let rhs = self.c * T::of(self.n as f64) * sinh_pow(tau, self.n);
        (fd - rhs).abs() / T::one().max(rhs.abs())
    }

    /// Serializes the profile grid as JSON `{n, c, tau, w}`.
    pub fn to_json(&self) -> String {
        let dump = ProfileDump {
            n: self.n,
            c: self.c.as_f64(),
            tau: self.tau_grid.iter().map(|t| t.as_f64()).collect(),
            w: self.w_grid.iter().map(|w| w.as_f64()).collect(),
        };
        serde_json::to_string_pretty(&dump).expect("profile dump serializes")
    }

    /// Rebuilds a profile from a JSON dump, revalidating the stored `w`
    /// values against the recomputed ones.
    pub fn from_json(text: &str) -> Result<Self> {
        let dump: ProfileDump =
            serde_json::from_str(text).map_err(|e| Error::Argument(format!("bad profile JSON: {e}")))?;
        let tau_max = *dump
            .tau
            .last()
            .ok_or_else(|| Error::Argument("profile dump has empty grid".into()))?;
        let profile = Profile::build(dump.n, T::of(dump.c), T::of(tau_max))?;
        for (&tau, &w_stored) in dump.tau.iter().zip(&dump.w) {
            let w_here = profile.w(T::of(tau)).as_f64();
            if (w_here - w_stored).abs() > 1e-9 * w_here.abs().max(1.0) {
                return Err(Error::Constraint {
                    what: "stored profile w disagrees with recomputation",
                    residual: (w_here - w_stored).abs(),
                    tol: 1e-9,
                });
            }
        }
        Ok(profile)
    }
}

#[derive(Serialize, Deserialize)]
struct ProfileDump {
    n: usize,
    c: f64,
    tau: Vec<f64>,
    w: Vec<f64>,
}

fn sinh_pow<T: Real>(tau: T, n: usize) -> T {
    tau.sinh().powi(n as i32 - 1)
}

/// `sinh(2 tau)/2 - tau`, by series below `tau = 1/2` where the direct
/// subtraction cancels.
fn sinh3_bracket<T: Real>(tau: T) -> T {
    if tau.as_f64() >= 0.5 {
        return (tau + tau).sinh() * T::of(0.5) - tau;
    }
    let t2 = tau * tau;
    let mut term = T::of(2.0 / 3.0) * tau * t2; // k = 1: 4 tau^3 / 3!
    let mut acc = term;
    let mut k = 1.0;
    loop {
        // term_{k+1} = term_k * 4 tau^2 / ((2k+2)(2k+3))
        term = term * T::of(4.0) * t2 / T::of((2.0 * k + 2.0) * (2.0 * k + 3.0));
        let next = acc + term;
        if next == acc {
            return acc;
        }
        acc = next;
        k += 1.0;
    }
}
