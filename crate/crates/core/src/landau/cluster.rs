use serde::Serialize;

use super::LandauError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cluster {
    pub center: f64,
    pub multiplicity: usize,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClusterOptions {
    /// A gap splits two clusters when it exceeds `gap_factor` times the
    /// median consecutive gap.
    pub gap_factor: f64,
    /// Gaps below `relative_floor * max|eig|` never split.
    pub relative_floor: f64,
}

impl Default for ClusterOptions {
    fn default() -> Self {
        Self {
            gap_factor: 5.0,
            relative_floor: 1e-6,
        }
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

pub fn cluster_analysis(eigs: &[f64], gap_factor: f64) -> Result<Vec<Cluster>, LandauError> {
    cluster_analysis_with(
        eigs,
        &ClusterOptions {
            gap_factor,
            ..ClusterOptions::default()
        },
    )
}

/// Greedy split of an ascending list at large consecutive gaps.
pub fn cluster_analysis_with(eigs: &[f64], opts: &ClusterOptions) -> Result<Vec<Cluster>, LandauError> {
    if eigs.windows(2).any(|w| !(w[0] <= w[1])) || eigs.iter().any(|e| !e.is_finite()) {
        return Err(LandauError::Parameter("eigenvalues must be finite and ascending".into()));
    }
    if eigs.is_empty() {
        return Ok(Vec::new());
    }
    let gaps: Vec<f64> = eigs.windows(2).map(|w| w[1] - w[0]).collect();
    let scale = eigs.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let threshold = (opts.gap_factor * median(gaps.clone())).max(opts.relative_floor * scale);

    let mut clusters = Vec::new();
    let mut start = 0;
    for i in 0..eigs.len() {
        let split = i + 1 == eigs.len() || gaps[i] > threshold;
        if split {
            let members = &eigs[start..=i];
            clusters.push(Cluster {
                center: members.iter().sum::<f64>() / members.len() as f64,
                multiplicity: members.len(),
                min: members[0],
                max: members[members.len() - 1],
            });
            start = i + 1;
        }
    }
    Ok(clusters)
}

/// Clusters with at least `min_multiplicity` members; isolated edge states
/// between levels are dropped.
pub fn flat_clusters(clusters: &[Cluster], min_multiplicity: usize) -> Vec<Cluster> {
    clusters.iter().copied().filter(|c| c.multiplicity >= min_multiplicity).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapLaw {
    /// `(c_{l+1} - c_l) / (2 c_0)` for consecutive flat clusters.
    pub ratios: Vec<f64>,
    pub max_relative_error: Option<f64>,
    /// `(c_1 - c_0) / B`, if two clusters exist.
    pub spacing_over_field: Option<f64>,
}

/// Even-spacing law `c_{l+1} - c_l = 2 c_0` over at most `levels` clusters.
pub fn gap_law(flat: &[Cluster], levels: usize, field: f64) -> GapLaw {
    let used = &flat[..flat.len().min(levels)];
    let ratios: Vec<f64> = match used.first() {
        Some(c0) => used.windows(2).map(|w| (w[1].center - w[0].center) / (2.0 * c0.center)).collect(),
        None => Vec::new(),
    };
    let max_relative_error = ratios.iter().map(|r| (r - 1.0).abs()).reduce(f64::max);
    let spacing_over_field = if used.len() >= 2 && field > 0.0 {
        Some((used[1].center - used[0].center) / field)
    } else {
        None
    };
    GapLaw {
        ratios,
        max_relative_error,
        spacing_over_field,
    }
}
