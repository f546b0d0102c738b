//! The batteries-included verification suites behind the `verify` command:
//! each suite exercises one module's invariants with fixed seeds and
//! spec-level tolerances and reports named metrics. Runs are deterministic
//! for a fixed configuration.

use serde::{Deserialize, Serialize};

use crate::conifold::{
    asymptotics_sweep, cone_holomorphic_volume, cone_kahler_form, cone_moment, ConeKind, ConeSpec,
};
use crate::families::{
    classify, perturbed_control, residual, sample_leaf, trace_leaf_curves, verify_sample, Family,
    LeafSpec, LeafTraceOptions,
};
use crate::forms::{kahler_form, metric, normalization_ratio, orthonormal_frame};
use crate::moment::{hamiltonian_residual, homogeneous_scan};
use crate::oracle::{ddbar_kahler, ORACLE_STEP};
use crate::potential::Profile;
use crate::quadric::{GroupKind, GroupPreset};
use crate::sampling;
use crate::Result;

/// Configuration of a verification run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub n: usize,
    pub c: f64,
    pub seed: u64,
    /// Agreement tolerance for the finite-difference cross-checks (Kähler
    /// oracle, Hamiltonian identity) and the normalization-ratio constancy.
    pub oracle_tol: f64,
    /// Sample counts: oracle comparisons and Hamiltonian samples.
    pub samples: usize,
    /// Slice samples per preset in the homogeneous scan.
    pub scan_samples: usize,
    /// Random torus constant triples to verify.
    pub t2_leaves: usize,
    /// Rotation-family constants to verify.
    pub so3_constants: Vec<f64>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            n: 3,
            c: 1.0,
            seed: 2024,
            oracle_tol: 1e-5,
            samples: 120,
            scan_samples: 10_000,
            t2_leaves: 5,
            so3_constants: vec![0.0, 0.5, 1.0, 2.0],
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub pass: bool,
    pub metrics: Vec<Metric>,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        SuiteReport { name: name.to_string(), pass: true, metrics: Vec::new() }
    }

    fn check_below(&mut self, name: &str, value: f64, bound: f64) {
        self.metrics.push(Metric { name: format!("{name} (<= {bound:e})"), value });
        if !(value <= bound) {
            self.pass = false;
        }
    }

    fn check_above(&mut self, name: &str, value: f64, bound: f64) {
        self.metrics.push(Metric { name: format!("{name} (> {bound:e})"), value });
        if !(value > bound) {
            self.pass = false;
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub version: String,
    pub config: VerifyConfig,
    pub suites: Vec<SuiteReport>,
    pub pass: bool,
}

/// Runs every suite; `pass` is the conjunction.
pub fn run_all(config: &VerifyConfig) -> Result<VerifyReport> {
    let mut suites = Vec::new();
    suites.push(potential_suite(config)?);
    suites.push(kahler_oracle_suite(config)?);
    suites.push(normalization_suite(config)?);
    suites.push(hamiltonian_suite(config)?);
    suites.push(scan_suite(config)?);
    suites.push(leaf_suite(config)?);
    suites.push(cone_suite(config)?);
    suites.push(asymptotics_suite(config)?);
    let pass = suites.iter().all(|s| s.pass);
    Ok(VerifyReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        suites,
        pass,
    })
}

/// Potential profile: closed forms, ODE residual, derivative consistency.
pub fn potential_suite(config: &VerifyConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("potential");

    // n = 2, c = 1/8 against u = sqrt(1 + r^2).
    let p2 = Profile::<f64>::build(2, 0.125, 12.0)?;
    let mut worst_u = 0f64;
    let mut worst_up = 0f64;
    for k in 0..=200 {
        let tau = 10.0 * k as f64 / 200.0;
        let r2 = tau.cosh();
        let expect = (1.0 + r2).sqrt();
        let got = 2.0f64.sqrt() + p2.u_tau(tau)?;
        worst_u = worst_u.max((got - expect).abs() / expect);
        let up = p2.u_prime_at_tau(tau)?;
        let up_expect = 0.5 / (1.0 + r2).sqrt();
        worst_up = worst_up.max((up - up_expect).abs() / up_expect);
    }
    report.check_below("n=2 potential vs sqrt(1+r^2) rel", worst_u, 1e-9);
    report.check_below("n=2 u' rel", worst_up, 1e-9);

    // Dimension sweep: scaled ODE residual at grid midpoints.
    for n in 2..=5 {
        let p = Profile::<f64>::build(n, config.c, 11.0)?;
        let mut worst = 0f64;
        let grid = p.tau_grid().to_vec();
        for pair in grid.windows(2) {
            let mid = 0.5 * (pair[0] + pair[1]);
            if mid + 2.1e-3 > p.tau_max() {
                continue;
            }
            worst = worst.max(p.ode_residual_scaled(mid));
        }
        report.check_below(&format!("n={n} ODE residual"), worst, 1e-8);
    }

    // n = 3 closed form vs quadrature path.
    let p3 = Profile::<f64>::build(3, config.c, 11.0)?;
    let mut worst = 0f64;
    for k in 0..=100 {
        let tau = 10.0 * k as f64 / 100.0;
        let a = p3.w(tau);
        let b = p3.w_quadrature(tau);
        worst = worst.max((a - b).abs() / a.abs().max(1.0));
    }
    report.check_below("n=3 closed form vs quadrature", worst, 1e-9);

    // u' positivity and chain rule.
    let mut min_up = f64::INFINITY;
    let mut worst_chain = 0f64;
    for k in 1..=60 {
        let tau = 10.0 * k as f64 / 60.0;
        min_up = min_up.min(p3.u_prime_at_tau(tau)?);
        let h = 1e-4;
        let lhs = (p3.u_prime_at_tau(tau + h)? - p3.u_prime_at_tau(tau - h)?) / (2.0 * h);
        let rhs = p3.u_second_at_tau(tau)? * tau.sinh();
        worst_chain = worst_chain.max((lhs - rhs).abs() / rhs.abs().max(1.0));
    }
    report.check_above("n=3 min u' on (0, 10]", min_up, 0.0);
    report.check_below("chain-rule residual", worst_chain, 1e-6);
    Ok(report)
}

/// Kähler form against the finite-difference potential oracle.
pub fn kahler_oracle_suite(config: &VerifyConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("kahler-oracle");
    let profile = Profile::<f64>::build(config.n, config.c, 14.0)?;
    let mut rng = sampling::rng(config.seed);
    let mut worst_rel = 0f64;
    let mut worst_antisym = 0f64;
    let mut min_metric = f64::INFINITY;
    for _ in 0..config.samples {
        let z = sampling::quadric_point::<f64>(&mut rng, config.n, 5.0);
        let v = sampling::tangent_vector(&mut rng, &z);
        let w = sampling::tangent_vector(&mut rng, &z);
        let closed = kahler_form(&profile, &v, &w)?;
        let fd = ddbar_kahler(&profile, &v, &w, ORACLE_STEP)?;
        let scale = closed.abs().max(fd.abs()).max(1e-10);
        worst_rel = worst_rel.max((closed - fd).abs() / scale);
        let flipped = kahler_form(&profile, &w, &v)?;
        worst_antisym = worst_antisym.max((closed + flipped).abs() / scale);
        min_metric = min_metric.min(metric(&profile, &v, &v)?);
    }
    report.check_below("oracle relative deviation", worst_rel, config.oracle_tol);
    report.check_below("antisymmetry", worst_antisym, 1e-10);
    report.check_above("metric positivity", min_metric, 0.0);
    Ok(report)
}

/// Constancy of the volume-normalization ratio across the quadric.
pub fn normalization_suite(config: &VerifyConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("normalization-ratio");
    let profile = Profile::<f64>::build(config.n, config.c, 14.0)?;
    let mut rng = sampling::rng(config.seed ^ 0x5eed);
    let mut ratios = Vec::with_capacity(config.samples);
    for _ in 0..config.samples.max(100) {
        let z = sampling::quadric_point::<f64>(&mut rng, config.n, 4.0);
        let frame = orthonormal_frame(&profile, &z)?;
        ratios.push(normalization_ratio(&profile, &z, &frame)?);
    }
    let cv = crate::families::coefficient_of_variation(&ratios);
    report.check_below("ratio coefficient of variation", cv, 1e-4);
    report
        .metrics
        .push(Metric { name: "ratio mean".into(), value: ratios.iter().sum::<f64>() / ratios.len() as f64 });
    Ok(report)
}

/// The Hamiltonian identity for all five n = 3 presets.
pub fn hamiltonian_suite(config: &VerifyConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("hamiltonian-identity");
    let profile = Profile::<f64>::build(3, config.c, 14.0)?;
    for kind in [
        GroupKind::So4,
        GroupKind::So3Tilde,
        GroupKind::S1xSo3,
        GroupKind::T2,
        GroupKind::So3Stab,
    ] {
        let preset = GroupPreset::<f64>::new(kind, 3)?;
        let mut rng = sampling::rng(config.seed ^ (kind as u64 + 1));
        let mut worst = 0f64;
        for _ in 0..config.samples.max(100) {
            let z = sampling::quadric_point::<f64>(&mut rng, 3, 4.0);
            let v = sampling::tangent_vector(&mut rng, &z);
            worst = worst.max(hamiltonian_residual(&profile, &preset, &z, &v)?);
        }
        report.check_below(&format!("{} residual", kind.name()), worst, config.oracle_tol);
    }
    Ok(report)
}

/// Homogeneous-classification scan over the three large subgroups.
pub fn scan_suite(config: &VerifyConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("homogeneous-scan");
    let profile = Profile::<f64>::build(3, config.c, 14.0)?;
    for kind in [GroupKind::So4, GroupKind::So3Tilde, GroupKind::S1xSo3] {
        let preset = GroupPreset::<f64>::new(kind, 3)?;
        let scan = homogeneous_scan(&profile, &preset, config.scan_samples, config.seed)?;
        report.check_above(&format!("{} min scaled moment", kind.name()), scan.min_scaled_norm, 1e-8);
        if let Some(xi) = scan.xi_system {
            report.check_above("xi-system min determinant", xi.min_determinant, 1e-8);
            report.check_above("xi-system first-equation ratio", xi.min_first_equation_ratio, 1e-8);
        }
    }
    Ok(report)
}

/// Special Lagrangian verification for the configured leaf families,
/// including the off-leaf negative control.
pub fn leaf_suite(config: &VerifyConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("leaf-families");
    let profile = Profile::<f64>::build(3, config.c, 16.0)?;
    let mut rng = sampling::rng(config.seed ^ 0x1ea5);
    use rand::Rng;

    for leaf_idx in 0..config.t2_leaves {
        let constants: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let spec = LeafSpec::new(Family::T2, 3, constants.clone())?;
        let opts = LeafTraceOptions { rho_max: 3.5, seed: config.seed + leaf_idx as u64, ..Default::default() };
        let curves = trace_leaf_curves(&profile, &spec, &opts)?;
        let sample = sample_leaf(&profile, &spec, &curves, 6, 32)?;
        let sl = verify_sample(&profile, &sample)?;
        let tag = format!("t2[{leaf_idx}]");
        report.check_below(&format!("{tag} residual"), sl.max_residual, 1e-9);
        report.check_below(&format!("{tag} max |omega|"), sl.max_omega, 1e-8);
        report.check_below(&format!("{tag} max |Im Omega|"), sl.max_im_omega, 1e-8);
        report.check_below(&format!("{tag} calibration CV"), sl.calibration_cv, 1e-4);
        if leaf_idx == 0 {
            let control = perturbed_control(&profile, &sample, 1e-3, config.seed)?;
            report.check_above("t2 negative control max |omega|", control.max_omega, 1e-5);
        }
    }

    for (idx, &c) in config.so3_constants.iter().enumerate() {
        let spec = LeafSpec::new(Family::So3, 3, vec![0.0, 0.0, c])?;
        let opts = LeafTraceOptions { rho_max: 3.5, seed: config.seed + idx as u64, ..Default::default() };
        let curves = trace_leaf_curves(&profile, &spec, &opts)?;
        let sample = sample_leaf(&profile, &spec, &curves, 6, 32)?;
        let sl = verify_sample(&profile, &sample)?;
        let tag = format!("so3[c={c}]");
        report.check_below(&format!("{tag} residual"), sl.max_residual, 1e-9);
        report.check_below(&format!("{tag} max |omega|"), sl.max_omega, 1e-8);
        report.check_below(&format!("{tag} max |Im Omega|"), sl.max_im_omega, 1e-8);
        report.check_below(&format!("{tag} calibration CV"), sl.calibration_cv, 1e-4);
    }

    // Foliation spot check: classifying a sampled point reproduces the
    // constants it was sampled from.
    let spec = LeafSpec::new(Family::So3, 3, vec![0.0, 0.0, 1.0])?;
    let opts = LeafTraceOptions { rho_max: 3.0, ..Default::default() };
    let curves = trace_leaf_curves(&profile, &spec, &opts)?;
    let sample = sample_leaf(&profile, &spec, &curves, 4, 16)?;
    let mut worst_drift = 0f64;
    for point in &sample.points {
        let classified = classify(&profile, Family::So3, &point.z)?;
        let drift = classified.constants()[2] - 1.0;
        worst_drift = worst_drift.max(drift.abs());
        let res = residual(&profile, &classified, &point.z)?;
        assert!(res.iter().all(|r| *r == 0.0));
    }
    report.check_below("so3 foliation constant drift", worst_drift, 1e-9);
    Ok(report)
}

/// The limiting cone checks: both torus cones and the sphere cone are
/// special Lagrangian, moment values vanish, moments elsewhere do not.
pub fn cone_suite(_config: &VerifyConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("cone");
    let mut worst_omega = 0f64;
    let mut worst_im = 0f64;
    for kind in [ConeKind::TorusA, ConeKind::TorusC, ConeKind::Sphere] {
        for &scale in &[0.5f64, 1.0, 2.0] {
            let spec = ConeSpec::new(kind, scale)?;
            for i in 0..8 {
                for j in 0..8 {
                    let a = std::f64::consts::TAU * (i as f64 + 0.31) / 8.0;
                    let b = 2.6 * ((j as f64 + 0.5) / 8.0 - 0.5);
                    let (p, frame) = spec.frame(a, b)?;
                    let norms: Vec<f64> = frame.iter().map(|v| v.norm()).collect();
                    if norms.iter().any(|&n| n < 1e-6) {
                        continue;
                    }
                    for x in 0..3 {
                        for y in x + 1..3 {
                            let omega = cone_kahler_form(&p, &frame[x], &frame[y])?;
                            worst_omega = worst_omega.max(omega.abs() / (norms[x] * norms[y]));
                        }
                    }
                    let vol = cone_holomorphic_volume(&p, &frame)?;
                    if vol.norm() > 1e-12 {
                        worst_im = worst_im.max(vol.im.abs() / vol.norm());
                    }
                }
            }
        }
    }
    report.check_below("cone |omega| scaled", worst_omega, 1e-9);
    report.check_below("cone |Im Omega| scaled", worst_im, 1e-10);

    let t2 = GroupPreset::<f64>::new(GroupKind::T2, 3)?;
    let so3 = GroupPreset::<f64>::new(GroupKind::So3Stab, 3)?;
    let torus = ConeSpec::new(ConeKind::TorusA, 1.0f64)?;
    let sphere = ConeSpec::new(ConeKind::Sphere, 1.0f64)?;
    let mut worst_mu = 0f64;
    for i in 0..12 {
        let a = std::f64::consts::TAU * i as f64 / 12.0;
        worst_mu = worst_mu.max(cone_moment(&t2, &torus.point(a, 1.3 * a)?).norm());
        worst_mu = worst_mu.max(cone_moment(&so3, &sphere.point(a, 0.4 * a - 0.7)?).norm());
    }
    report.check_below("cone moment on matching cones", worst_mu, 1e-10);
    Ok(report)
}

/// Asymptotic convergence of the invariant leaves to their cones.
pub fn asymptotics_suite(_config: &VerifyConfig) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("asymptotics");
    let c = 1.0f64;
    let spec = LeafSpec::new(Family::So3, 3, vec![0.0, 0.0, c])?;
    let rhos: Vec<f64> = (0..=12).map(|k| 2.0 + 0.5 * k as f64).collect();
    let rows = asymptotics_sweep(&spec, &rhos)?;
    let mut monotone = true;
    let mut worst_t_ratio = 0f64;
    for (k, row) in rows.iter().enumerate() {
        if k > 0 && row.dist_to_cone >= rows[k - 1].dist_to_cone {
            monotone = false;
        }
        // Bound from inverting the profile equation: the deviation is
        // arcsin((2 rho - c)/sinh 2 rho)/2, below (2 rho - c)/sinh(2 rho).
        let bound = (2.0 * row.rho - c) / (2.0 * row.rho).sinh();
        worst_t_ratio = worst_t_ratio.max(row.t_deviation / bound);
    }
    report.check_above("so3 dist monotone decreasing", if monotone { 1.0 } else { 0.0 }, 0.5);
    report.check_below("so3 t-deviation / inversion bound", worst_t_ratio, 1.0);
    let at6 = asymptotics_sweep(&spec, &[6.0])?;
    report.check_below("so3 dist at rho=6", at6[0].dist_to_cone, 1e-4);

    let t2spec = LeafSpec::new(Family::T2, 3, vec![0.0, 0.0, 0.4])?;
    let t2rows = asymptotics_sweep(&t2spec, &[2.0, 4.0, 6.0])?;
    let t2monotone = t2rows[0].dist_to_cone > t2rows[1].dist_to_cone
        && t2rows[1].dist_to_cone > t2rows[2].dist_to_cone;
    report.check_above("t2 dist monotone decreasing", if t2monotone { 1.0 } else { 0.0 }, 0.5);
    report.check_below("t2 dist at rho=6", t2rows[2].dist_to_cone, 1e-4);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_suites_pass() {
        // Scaled-down sample counts keep the unit test quick; acceptance
        // runs the full configuration.
        let config = VerifyConfig {
            samples: 25,
            scan_samples: 500,
            t2_leaves: 1,
            so3_constants: vec![1.0],
            ..Default::default()
        };
        let report = run_all(&config).unwrap();
        for suite in &report.suites {
            assert!(suite.pass, "suite {} failed: {:?}", suite.name, suite.metrics);
        }
        assert!(report.pass);
    }

    #[test]
    fn broken_tolerance_fails() {
        let config = VerifyConfig {
            samples: 10,
            scan_samples: 100,
            t2_leaves: 1,
            so3_constants: vec![],
            oracle_tol: 1e-20,
            ..Default::default()
        };
        let report = run_all(&config).unwrap();
        assert!(!report.pass);
    }

    #[test]
    fn report_serializes_deterministically() {
        let config = VerifyConfig {
            samples: 10,
            scan_samples: 100,
            t2_leaves: 1,
            so3_constants: vec![0.5],
            ..Default::default()
        };
        let a = serde_json::to_string_pretty(&run_all(&config).unwrap()).unwrap();
        let b = serde_json::to_string_pretty(&run_all(&config).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
