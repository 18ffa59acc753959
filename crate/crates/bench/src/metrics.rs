//! Shifted geometric means and performance profiles.
//!
//! Times are indexed `[solver][problem]`. A failed solve is charged the
//! failure cap in the geometric mean and never counts as solved in a
//! profile.

/// `(prod (t_p + k))^(1/N) - k`, with failed entries replaced by `cap`.
/// Computed through logarithms so long runs do not overflow.
pub fn shifted_geometric_mean(times: &[f64], failed: &[bool], shift: f64, cap: f64) -> f64 {
    assert!(!times.is_empty(), "need at least one time");
    assert_eq!(times.len(), failed.len());
    let sum: f64 = times.iter().zip(failed).map(|(&t, &f)| (if f { cap } else { t } + shift).ln()).sum();
    (sum / times.len() as f64).exp() - shift
}

/// `g_s / min g`, so the fastest solver scores 1.
pub fn normalize(g: &[f64]) -> Vec<f64> {
    let best = g.iter().copied().fold(f64::INFINITY, f64::min);
    g.iter().map(|&v| v / best).collect()
}

/// A right-continuous step function, given by its value at each breakpoint.
/// It is zero left of the first breakpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub taus: Vec<f64>,
    pub values: Vec<f64>,
}

impl Curve {
    pub fn at(&self, tau: f64) -> f64 {
        match self.taus.partition_point(|&t| t <= tau) {
            0 => 0.0,
            i => self.values[i - 1],
        }
    }

    /// Value after the last breakpoint.
    pub fn terminal(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Profiles {
    /// Fraction of problems solved within `tau` times the fastest solver.
    pub relative: Vec<Curve>,
    /// Fraction of problems solved within `tau` seconds.
    pub absolute: Vec<Curve>,
}

/// Fraction of `vals` that are `<= tau`, sampled at every value in `taus`.
fn sample(vals: &[f64], taus: &[f64], total: usize) -> Curve {
    let mut sorted = vals.to_vec();
    sorted.sort_by(f64::total_cmp);
    let values = taus.iter().map(|&t| sorted.partition_point(|&v| v <= t) as f64 / total as f64).collect();
    Curve { taus: taus.to_vec(), values }
}

fn breakpoints(per_solver: &[Vec<f64>]) -> Vec<f64> {
    let mut all: Vec<f64> = per_solver.iter().flatten().copied().collect();
    all.sort_by(f64::total_cmp);
    all.dedup();
    all
}

/// Relative and absolute profiles. All curves of one kind share the union
/// of breakpoints, so they can be tabulated side by side.
pub fn performance_profiles(times: &[Vec<f64>], failed: &[Vec<bool>]) -> Profiles {
    assert!(!times.is_empty() && !times[0].is_empty(), "need a solver and a problem");
    let np = times[0].len();
    assert_eq!(times.len(), failed.len());
    assert!(times.iter().zip(failed).all(|(t, f)| t.len() == np && f.len() == np));
    let ok = |s: usize, p: usize| !failed[s][p];
    let fastest: Vec<f64> = (0..np)
        .map(|p| (0..times.len()).filter(|&s| ok(s, p)).map(|s| times[s][p]).fold(f64::INFINITY, f64::min))
        .collect();
    let solved = |s: usize| (0..np).filter(move |&p| ok(s, p));
    let ratios: Vec<Vec<f64>> =
        (0..times.len()).map(|s| solved(s).map(|p| times[s][p] / fastest[p]).collect()).collect();
    let raw: Vec<Vec<f64>> = (0..times.len()).map(|s| solved(s).map(|p| times[s][p]).collect()).collect();
    let (rt, at) = (breakpoints(&ratios), breakpoints(&raw));
    Profiles {
        relative: ratios.iter().map(|r| sample(r, &rt, np)).collect(),
        absolute: raw.iter().map(|r| sample(r, &at, np)).collect(),
    }
}
