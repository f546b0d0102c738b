//! Phase portraits of the profile-plane equations as contour polylines:
//! `sin(2t) sinh(2s) = c` (the torus family with vanishing moment) and
//! `2s - cos(2t) sinh(2s) = c` (the rotation family). Roots are found
//! column by column in `t` and Newton-polished, so every emitted vertex
//! satisfies its equation to well below the 1e-10 contract.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Equation {
    /// `sin(2t) sinh(2s) = c`.
    T2Zero,
    /// `2s - cos(2t) sinh(2s) = c`.
    So3,
}

impl Equation {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "t2-zero" | "t2_zero" | "t2zero" => Some(Equation::T2Zero),
            "so3" => Some(Equation::So3),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Equation::T2Zero => "sin(2t) sinh(2s) = c",
            Equation::So3 => "2s - cos(2t) sinh(2s) = c",
        }
    }

    pub fn eval(self, t: f64, s: f64, c: f64) -> f64 {
        match self {
            Equation::T2Zero => (2.0 * t).sin() * (2.0 * s).sinh() - c,
            Equation::So3 => 2.0 * s - (2.0 * t).cos() * (2.0 * s).sinh() - c,
        }
    }

    fn ds(self, t: f64, s: f64) -> f64 {
        match self {
            Equation::T2Zero => 2.0 * (2.0 * t).sin() * (2.0 * s).cosh(),
            Equation::So3 => 2.0 - 2.0 * (2.0 * t).cos() * (2.0 * s).cosh(),
        }
    }
}

/// One polyline of one contour level.
#[derive(Clone, Debug)]
pub struct Polyline {
    pub c: f64,
    pub branch: usize,
    pub vertices: Vec<(f64, f64)>,
}

/// Traces the contour lines of `equation = c` for each requested level over
/// `t in [0, pi)`, `s in [-s_max, s_max]`.
pub fn contours(
    equation: Equation,
    c_values: &[f64],
    t_samples: usize,
    s_max: f64,
    s_scan: usize,
) -> Vec<Polyline> {
    let mut out = Vec::new();
    let mut branch_counter = 0usize;
    for &c in c_values {
        let columns: Vec<(f64, ColumnRoots)> = (0..t_samples)
            .map(|k| {
                let t = std::f64::consts::PI * k as f64 / t_samples as f64;
                (t, column_roots(equation, t, c, s_max, s_scan))
            })
            .collect();

        // Whole-column root lines (the vertical branches of c = 0).
        for (t, col) in &columns {
            if col.everywhere {
                let mut vertices = Vec::with_capacity(s_scan + 1);
                for j in 0..=s_scan {
                    let s = -s_max + 2.0 * s_max * j as f64 / s_scan as f64;
                    vertices.push((*t, s));
                }
                out.push(Polyline { c, branch: branch_counter, vertices });
                branch_counter += 1;
            }
        }

        // Stitch isolated roots into polylines across columns.
        let jump_tol = (4.0 * s_max / s_scan as f64).max(0.15);
        let mut active: Vec<(usize, f64)> = Vec::new(); // (index into out, last s)
        for (t, col) in &columns {
            let mut next_active: Vec<(usize, f64)> = Vec::new();
            let mut taken = vec![false; active.len()];
            for &s in &col.roots {
                let mut best: Option<(usize, f64)> = None;
                for (slot, &(_, last_s)) in active.iter().enumerate() {
                    if taken[slot] {
                        continue;
                    }
                    let d = (s - last_s).abs();
                    if d <= jump_tol && best.map_or(true, |(_, bd)| d < bd) {
                        best = Some((slot, d));
                    }
                }
                match best {
                    Some((slot, _)) => {
                        taken[slot] = true;
                        let idx = active[slot].0;
                        out[idx].vertices.push((*t, s));
                        next_active.push((idx, s));
                    }
                    None => {
                        out.push(Polyline { c, branch: branch_counter, vertices: vec![(*t, s)] });
                        next_active.push((out.len() - 1, s));
                        branch_counter += 1;
                    }
                }
            }
            active = next_active;
        }
    }
    out.retain(|p| !p.vertices.is_empty());
    out
}

struct ColumnRoots {
    roots: Vec<f64>,
    /// The whole column solves the equation (degenerate level).
    everywhere: bool,
}

fn column_roots(equation: Equation, t: f64, c: f64, s_max: f64, s_scan: usize) -> ColumnRoots {
    let f = |s: f64| equation.eval(t, s, c);
    let mut max_abs = 0f64;
    let grid: Vec<(f64, f64)> = (0..=s_scan)
        .map(|j| {
            let s = -s_max + 2.0 * s_max * j as f64 / s_scan as f64;
            let v = f(s);
            max_abs = max_abs.max(v.abs());
            (s, v)
        })
        .collect();
    if max_abs < 1e-13 {
        return ColumnRoots { roots: Vec::new(), everywhere: true };
    }
    let mut roots = Vec::new();
    for pair in grid.windows(2) {
        let (s0, f0) = pair[0];
        let (s1, f1) = pair[1];
        if f0 == 0.0 {
            roots.push(polish(equation, t, c, s0));
        } else if f0 * f1 < 0.0 {
            // Bisection bracket, then Newton.
            let (mut lo, mut hi, mut flo) = (s0, s1, f0);
            for _ in 0..40 {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid);
                if fm * flo <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            roots.push(polish(equation, t, c, 0.5 * (lo + hi)));
        }
    }
    if let Some((s_last, f_last)) = grid.last() {
        if *f_last == 0.0 && roots.last().map_or(true, |r| (r - s_last).abs() > 1e-9) {
            roots.push(polish(equation, t, c, *s_last));
        }
    }
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    ColumnRoots { roots, everywhere: false }
}

fn polish(equation: Equation, t: f64, c: f64, mut s: f64) -> f64 {
    for _ in 0..60 {
        let f = equation.eval(t, s, c);
        if f.abs() < 1e-13 {
            break;
        }
        let d = equation.ds(t, s);
        if d.abs() < 1e-14 {
            break;
        }
        let step = f / d;
        s -= step.clamp(-0.1, 0.1);
    }
    s
}
