//! Run configuration: an optional JSON config file supplies the same keys
//! as the command-line flags; flags win.

use serde::Deserialize;

/// Keys accepted in a `--config` file. Every field is optional; subcommands
/// read the ones they understand.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub n: Option<usize>,
    pub c: Option<f64>,
    pub family: Option<String>,
    pub constants: Option<Vec<f64>>,
    pub tol: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<String>,
    pub format: Option<String>,
    pub force: Option<bool>,
    pub equation: Option<String>,
    pub c_values: Option<Vec<f64>>,
    pub rho_grid: Option<Vec<f64>>,
    pub rho_max: Option<f64>,
    pub tau_max: Option<f64>,
    pub s_max: Option<f64>,
    pub t_samples: Option<usize>,
    pub angle_res: Option<usize>,
    pub curve_points: Option<usize>,
    pub scan_samples: Option<usize>,
    pub t2_leaves: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &str) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {path}: {e}"))?;
        serde_json::from_str(&text).map_err(|e| format!("bad config {path}: {e}"))
    }
}

/// Flag value if present, else config value, else the default.
pub fn pick<T: Clone>(flag: &Option<T>, file: &Option<T>, default: T) -> T {
    flag.clone().or_else(|| file.clone()).unwrap_or(default)
}

/// Flag value if present, else config value.
pub fn pick_opt<T: Clone>(flag: &Option<T>, file: &Option<T>) -> Option<T> {
    flag.clone().or_else(|| file.clone())
}
