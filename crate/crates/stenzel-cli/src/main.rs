//! Command-line surface for the stenzel toolkit: verification suites, phase
//! portraits, leaf sampling/export, asymptotics reports and potential-profile
//! dumps. Outputs are deterministic for a fixed seed and configuration.

mod config;
mod portrait;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{pick, pick_opt, FileConfig};
use portrait::Equation;
use stenzel::conifold::asymptotic_row;
use stenzel::families::{
    sample_leaf, trace_leaf_curves, verify_sample, Family, LeafSample, LeafSpec, LeafTraceOptions,
};
use stenzel::potential::Profile;
use stenzel::verify::{run_all, VerifyConfig};
use stenzel::Error as LibError;

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exit codes: 0 pass, 1 verification failure, 2 usage error, 3 I/O error.
enum CliError {
    Verification(String),
    Usage(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Verification(m) | CliError::Usage(m) | CliError::Io(m) => m,
        }
    }
}

impl From<LibError> for CliError {
    fn from(e: LibError) -> Self {
        match e {
            LibError::Argument(m) => CliError::Usage(m),
            other => CliError::Verification(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "stenzel",
    version,
    about = "Numerics for the Ricci-flat structure on T*S^n and its special Lagrangian families"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification suites and write a JSON report.
    Verify(VerifyArgs),
    /// Export contour polylines of the profile-plane equations as CSV.
    PhasePortrait(PortraitArgs),
    /// Trace, sample and verify one special Lagrangian leaf, then export it.
    SampleLeaf(SampleArgs),
    /// Sweep the asymptotic distance of a leaf branch to its limit cone.
    Asymptotics(AsymptoticsArgs),
    /// Dump (or validate) a potential profile as JSON.
    Profile(ProfileArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON config file with the same keys as the flags; flags win.
    #[arg(long)]
    config: Option<String>,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Sphere dimension n.
    #[arg(long)]
    n: Option<usize>,
    /// Potential ODE constant c.
    #[arg(long)]
    c: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Cross-check tolerance for the oracle-based suites.
    #[arg(long)]
    tol: Option<f64>,
    /// Samples per oracle suite.
    #[arg(long)]
    samples: Option<usize>,
    /// Slice samples per preset in the homogeneous scan.
    #[arg(long)]
    scan_samples: Option<usize>,
    /// Random torus leaves to verify.
    #[arg(long)]
    t2_leaves: Option<usize>,
}

#[derive(Args)]
struct PortraitArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Which profile-plane equation to contour: "t2-zero" or "so3".
    #[arg(long)]
    equation: Option<String>,
    /// Contour levels.
    #[arg(long, value_delimiter = ',')]
    c_values: Option<Vec<f64>>,
    /// Columns across t in [0, pi).
    #[arg(long)]
    t_samples: Option<usize>,
    /// Half-height of the s range.
    #[arg(long)]
    s_max: Option<f64>,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Leaf family: t2, so3 or son.
    #[arg(long)]
    family: Option<String>,
    /// Leaf constants (3 for t2/so3, n for son).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    constants: Option<Vec<f64>>,
    /// Fiber-radius bound for tracing.
    #[arg(long)]
    rho_max: Option<f64>,
    /// Group-angle grid resolution per angle.
    #[arg(long)]
    angle_res: Option<usize>,
    /// Curve points retained per traced branch.
    #[arg(long)]
    curve_points: Option<usize>,
    /// Refuse-to-emit threshold on the scaled Im Omega statistic.
    #[arg(long)]
    tol: Option<f64>,
    /// Emit even when verification exceeds the tolerance.
    #[arg(long)]
    force: bool,
    /// Output format: csv or json.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct AsymptoticsArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Leaf family: so3 or t2.
    #[arg(long)]
    family: Option<String>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    constants: Option<Vec<f64>>,
    /// Fiber radii to sweep.
    #[arg(long, value_delimiter = ',')]
    rho_grid: Option<Vec<f64>>,
}

#[derive(Args)]
struct ProfileArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Grid extent in tau.
    #[arg(long)]
    tau_max: Option<f64>,
    /// Validate an existing dump instead of writing one.
    #[arg(long)]
    load: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Verify(args) => cmd_verify(args),
        Command::PhasePortrait(args) => cmd_phase_portrait(args),
        Command::SampleLeaf(args) => cmd_sample_leaf(args),
        Command::Asymptotics(args) => cmd_asymptotics(args),
        Command::Profile(args) => cmd_profile(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn load_config(common: &CommonArgs) -> Result<FileConfig, CliError> {
    match &common.config {
        Some(path) => FileConfig::load(path).map_err(CliError::Usage),
        None => Ok(FileConfig::default()),
    }
}

fn write_output(out: &Option<String>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {path}: {e}"))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<(), CliError> {
    let file = load_config(&args.common)?;
    let defaults = VerifyConfig::default();
    let config = VerifyConfig {
        n: pick(&args.common.n, &file.n, defaults.n),
        c: pick(&args.common.c, &file.c, defaults.c),
        seed: pick(&args.common.seed, &file.seed, defaults.seed),
        oracle_tol: pick(&args.tol, &file.tol, defaults.oracle_tol),
        samples: pick(&args.samples, &file.samples, defaults.samples),
        scan_samples: pick(&args.scan_samples, &file.scan_samples, defaults.scan_samples),
        t2_leaves: pick(&args.t2_leaves, &file.t2_leaves, defaults.t2_leaves),
        so3_constants: defaults.so3_constants,
    };
    if !(config.oracle_tol > 0.0) {
        return Err(CliError::Usage("tolerance must be positive".into()));
    }
    let report = run_all(&config)?;
    for suite in &report.suites {
        eprintln!("suite {}: {}", suite.name, if suite.pass { "PASS" } else { "FAIL" });
        if !suite.pass {
            for metric in &suite.metrics {
                eprintln!("  {} = {:e}", metric.name, metric.value);
            }
        }
    }
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    let out = pick_opt(&args.common.out, &file.out);
    write_output(&out, &text)?;
    if report.pass {
        Ok(())
    } else {
        Err(CliError::Verification("verification suites failed".into()))
    }
}

fn cmd_phase_portrait(args: PortraitArgs) -> Result<(), CliError> {
    let file = load_config(&args.common)?;
    let equation_name = pick(&args.equation, &file.equation, "so3".to_string());
    let equation = Equation::parse(&equation_name)
        .ok_or_else(|| CliError::Usage(format!("unknown equation {equation_name:?}")))?;
    let c_values = pick(&args.c_values, &file.c_values, vec![0.0, 0.5, 1.0, 2.0]);
    let t_samples = pick(&args.t_samples, &file.t_samples, 400);
    let s_max = pick(&args.s_max, &file.s_max, 3.0);
    if t_samples < 4 || !(s_max > 0.0) {
        return Err(CliError::Usage("need t_samples >= 4 and s_max > 0".into()));
    }
    let lines = portrait::contours(equation, &c_values, t_samples, s_max, 2 * t_samples);

    let mut text = String::new();
    text += &format!("# stenzel phase-portrait v{VERSION}\n");
    text += &format!("# equation: {}\n", equation.name());
    text += &format!("# c values: {c_values:?}\n");
    text += &format!("# t samples: {t_samples}, s max: {s_max}\n");
    for &c in &c_values {
        if !lines.iter().any(|l| l.c == c) {
            text += &format!("# note: no contour found for c = {c}\n");
        }
    }
    text += "c,branch,t,s\n";
    for line in &lines {
        for &(t, s) in &line.vertices {
            if equation.eval(t, s, line.c).abs() > 1e-10 {
                return Err(CliError::Verification(format!(
                    "vertex ({t}, {s}) violates the contour equation"
                )));
            }
            text += &format!("{},{},{},{}\n", line.c, line.branch, t, s);
        }
    }
    write_output(&pick_opt(&args.common.out, &file.out), &text)
}

fn cmd_sample_leaf(args: SampleArgs) -> Result<(), CliError> {
    let file = load_config(&args.common)?;
    let family_name = pick(&args.family, &file.family, "so3".to_string());
    let family = Family::parse(&family_name)
        .ok_or_else(|| CliError::Usage(format!("unknown family {family_name:?}")))?;
    let n = pick(&args.common.n, &file.n, 3);
    let c = pick(&args.common.c, &file.c, 1.0);
    let constants = pick(&args.constants, &file.constants, vec![0.0, 0.0, 1.0]);
    let rho_max = pick(&args.rho_max, &file.rho_max, 3.0);
    let angle_res = pick(&args.angle_res, &file.angle_res, 6);
    let curve_points = pick(&args.curve_points, &file.curve_points, 32);
    let seed = pick(&args.common.seed, &file.seed, 1);
    let tol = pick(&args.tol, &file.tol, 1e-8);
    let force = args.force || file.force.unwrap_or(false);
    let format = pick(&args.format, &file.format, "csv".to_string());
    if !(tol > 0.0) {
        return Err(CliError::Usage("tolerance must be positive".into()));
    }

    let spec = LeafSpec::new(family, n, constants.clone())?;
    let profile = Profile::<f64>::build(n, c, 2.0 * rho_max + 1.0)?;
    let opts = LeafTraceOptions { rho_max, seed, ..Default::default() };
    let curves = match trace_leaf_curves(&profile, &spec, &opts) {
        Ok(c) => c,
        Err(LibError::NoSolution) => {
            return Err(CliError::Verification(format!(
                "no leaf found for constants {constants:?} within rho <= {rho_max}"
            )))
        }
        Err(e) => return Err(e.into()),
    };
    let sample = sample_leaf(&profile, &spec, &curves, angle_res, curve_points)?;
    let report = verify_sample(&profile, &sample)?;
    if report.max_im_omega > tol && !force {
        return Err(CliError::Verification(format!(
            "holomorphic-volume imaginary part {:.3e} exceeds tolerance {tol:.3e}; pass --force to emit anyway",
            report.max_im_omega
        )));
    }

    let text = match format.as_str() {
        "csv" => render_sample_csv(&sample, n, c, seed, &report),
        "json" => render_sample_json(&sample, n, c, seed, &report),
        other => return Err(CliError::Usage(format!("unknown format {other:?}"))),
    };
    write_output(&pick_opt(&args.common.out, &file.out), &text)
}

fn render_sample_csv(
    sample: &LeafSample<f64>,
    n: usize,
    c: f64,
    seed: u64,
    report: &stenzel::families::SlReport,
) -> String {
    let mut text = String::new();
    text += &format!("# stenzel sample-leaf v{VERSION}\n");
    text += &format!(
        "# n: {n}, c: {c}, family: {}, constants: {:?}, seed: {seed}\n",
        sample.spec.family().name(),
        sample.spec.constants()
    );
    text += &format!(
        "# verification: max_omega={:e}, max_im_omega={:e}, calibration_cv={:e}, used={}, skipped={}\n",
        report.max_omega, report.max_im_omega, report.calibration_cv, report.samples_used,
        report.samples_skipped
    );
    let coord_names: &[&str] = match sample.spec.family() {
        Family::T2 => &["t", "rho", "phi", "psi"],
        Family::So3 | Family::SoN => &["t", "rho"],
    };
    let mut header: Vec<String> = coord_names.iter().map(|s| s.to_string()).collect();
    for i in 0..=n {
        header.push(format!("z{i}_re"));
        header.push(format!("z{i}_im"));
    }
    header.push("residual".into());
    header.push("frame_ok".into());
    text += &header.join(",");
    text += "\n";
    for point in &sample.points {
        let mut row: Vec<String> = point.curve_coords.iter().map(|v| format!("{v}")).collect();
        for pair in point.z.vector().to_re_im_pairs() {
            row.push(format!("{}", pair[0]));
            row.push(format!("{}", pair[1]));
        }
        row.push(format!("{}", point.residual_norm));
        row.push(format!("{}", u8::from(point.frame.is_some())));
        text += &row.join(",");
        text += "\n";
    }
    text
}

fn render_sample_json(
    sample: &LeafSample<f64>,
    n: usize,
    c: f64,
    seed: u64,
    report: &stenzel::families::SlReport,
) -> String {
    use serde_json::json;
    let points: Vec<serde_json::Value> = sample
        .points
        .iter()
        .map(|p| {
            json!({
                "coords": p.curve_coords,
                "z": p.z.vector().to_re_im_pairs(),
                "residual": p.residual_norm,
                "frame_ok": p.frame.is_some(),
            })
        })
        .collect();
    let value = json!({
        "version": VERSION,
        "n": n,
        "c": c,
        "family": sample.spec.family().name(),
        "constants": sample.spec.constants(),
        "seed": seed,
        "verification": report,
        "points": points,
    });
    serde_json::to_string_pretty(&value).expect("sample serializes")
}

fn cmd_asymptotics(args: AsymptoticsArgs) -> Result<(), CliError> {
    let file = load_config(&args.common)?;
    let family_name = pick(&args.family, &file.family, "so3".to_string());
    let family = Family::parse(&family_name)
        .ok_or_else(|| CliError::Usage(format!("unknown family {family_name:?}")))?;
    let constants = pick(&args.constants, &file.constants, vec![0.0, 0.0, 1.0]);
    let rho_grid = pick(&args.rho_grid, &file.rho_grid, vec![1.0, 2.0, 4.0, 6.0]);
    let spec = LeafSpec::new(family, 3, constants.clone())?;

    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for &rho in &rho_grid {
        match asymptotic_row(&spec, rho) {
            Ok(row) => rows.push(row),
            Err(LibError::OutOfRange(msg)) => {
                skipped.push(serde_json::json!({ "rho": rho, "reason": msg }))
            }
            Err(e) => return Err(e.into()),
        }
    }
    let value = serde_json::json!({
        "version": VERSION,
        "family": family.name(),
        "constants": constants,
        "rho_grid": rho_grid,
        "rows": rows,
        "skipped": skipped,
    });
    let text = serde_json::to_string_pretty(&value).expect("rows serialize");
    write_output(&pick_opt(&args.common.out, &file.out), &text)
}

fn cmd_profile(args: ProfileArgs) -> Result<(), CliError> {
    let file = load_config(&args.common)?;
    if let Some(path) = &args.load {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {path}: {e}")))?;
        Profile::<f64>::from_json(&text)?;
        eprintln!("profile {path} validates against recomputation");
        return Ok(());
    }
    let n = pick(&args.common.n, &file.n, 3);
    let c = pick(&args.common.c, &file.c, 1.0);
    let tau_max = pick(&args.tau_max, &file.tau_max, 12.0);
    let profile = Profile::<f64>::build(n, c, tau_max)?;
    write_output(&pick_opt(&args.common.out, &file.out), &profile.to_json())
}
