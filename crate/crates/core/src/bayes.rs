//! Grid-based Bayesian phase inference on [0, pi]: posterior updates from
//! count records, posterior statistics, the half-sample mode, and shot-count
//! selection rules.
//!
//! Posteriors are carried in log domain (canonical) with max-subtraction at
//! every renormalization; products of dozens of sharp likelihoods underflow
//! linear-domain doubles long before nu = 30. Normalization is certified by
//! the trapezoidal rule on the uniform grid.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kahan::KahanSum;
use crate::mzi::{likelihood_grid, TwoModeInput};

/// Smallest accepted grid size.
pub const MIN_GRID: usize = 64;
/// Default grid size; doubling it moves Fig.-4-scale posterior widths by
/// well under half a percent.
pub const DEFAULT_GRID: usize = 2048;
/// Default credible-interval level.
pub const DEFAULT_LEVEL: f64 = 0.68;
/// Local maxima below this fraction of the global peak do not count as
/// modes (keeps unimodality decisions reproducible against grid noise).
pub const MODE_PROMINENCE: f64 = 1e-3;

/// Discretized probability density over phi in [0, pi].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PhasePosterior {
    grid: Vec<f64>,
    /// Canonical representation; density = exp(log_density).
    log_density: Vec<f64>,
    density: Vec<f64>,
    shots_absorbed: usize,
}

/// Summary statistics of one posterior.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PosteriorStats {
    pub mean: f64,
    /// Posterior standard deviation; the headline Delta-phi.
    pub sd: f64,
    pub map_estimate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub level: f64,
    pub unimodal: bool,
    pub n_modes: usize,
}

fn trapezoid(values: &[f64], h: f64) -> f64 {
    let mut acc = KahanSum::new();
    for (i, &v) in values.iter().enumerate() {
        let w = if i == 0 || i == values.len() - 1 { 0.5 } else { 1.0 };
        acc.add(w * v);
    }
    acc.value() * h
}

impl PhasePosterior {
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn log_density(&self) -> &[f64] {
        &self.log_density
    }

    pub fn shots_absorbed(&self) -> usize {
        self.shots_absorbed
    }

    /// Grid spacing pi/(G-1).
    pub fn spacing(&self) -> f64 {
        PI / (self.grid.len() - 1) as f64
    }

    /// Trapezoidal integral of the density; 1 within 1e-9 by construction.
    pub fn total_mass(&self) -> f64 {
        trapezoid(&self.density, self.spacing())
    }

    /// CSV dump with '#' metadata lines, columns phi,density.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("# grid_points = {}\n", self.grid.len()));
        s.push_str(&format!("# shots_absorbed = {}\n", self.shots_absorbed));
        s.push_str("phi,density\n");
        for (phi, d) in self.grid.iter().zip(&self.density) {
            s.push_str(&format!("{:.17e},{:.17e}\n", phi, d));
        }
        s
    }
}

/// Uniform prior 1/pi on a G-point inclusive grid over [0, pi].
pub fn uniform_prior(g: usize) -> Result<PhasePosterior> {
    if g < MIN_GRID {
        return Err(Error::GridTooCoarse { got: g, min: MIN_GRID });
    }
    let h = PI / (g - 1) as f64;
    let grid: Vec<f64> = (0..g)
        .map(|i| if i == g - 1 { PI } else { i as f64 * h })
        .collect();
    Ok(PhasePosterior {
        grid,
        log_density: vec![-PI.ln(); g],
        density: vec![1.0 / PI; g],
        shots_absorbed: 0,
    })
}

/// Renormalize log weights into a posterior; None when everything is -inf.
fn renormalize(
    grid: Vec<f64>,
    mut log_density: Vec<f64>,
    shots_absorbed: usize,
) -> Option<PhasePosterior> {
    let max = log_density.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max.is_nan() {
        return None;
    }
    let h = PI / (grid.len() - 1) as f64;
    let weights: Vec<f64> = log_density.iter().map(|l| (l - max).exp()).collect();
    let z = trapezoid(&weights, h);
    if z <= 0.0 || !z.is_finite() {
        return None;
    }
    let shift = max + z.ln();
    let mut density = Vec::with_capacity(grid.len());
    for l in &mut log_density {
        *l -= shift;
        density.push(l.exp());
    }
    Some(PhasePosterior { grid, log_density, density, shots_absorbed })
}

/// One Bayes step from a precomputed pointwise log-likelihood of `outcome`
/// (the Monte-Carlo hot path; grids for repeated outcomes are cached by the
/// caller). The outcome labels the error if the likelihood vanishes
/// identically on the grid.
pub fn bayes_update_cached(
    post: &PhasePosterior,
    outcome: (usize, usize),
    log_likelihood: &[f64],
) -> Result<PhasePosterior> {
    assert_eq!(
        log_likelihood.len(),
        post.grid.len(),
        "log-likelihood grid size mismatch"
    );
    let log: Vec<f64> = post
        .log_density
        .iter()
        .zip(log_likelihood)
        .map(|(a, b)| a + b)
        .collect();
    renormalize(post.grid.clone(), log, post.shots_absorbed + 1).ok_or(
        Error::DegenerateUpdate { n1: outcome.0, n2: outcome.1 },
    )
}

/// One Bayes step: multiply in p(outcome | phi) pointwise and renormalize.
pub fn bayes_update(
    post: &PhasePosterior,
    outcome: (usize, usize),
    input: &TwoModeInput,
) -> Result<PhasePosterior> {
    let lik = likelihood_grid(outcome.0, outcome.1, &post.grid, input)?;
    let log_lik: Vec<f64> = lik.iter().map(|p| p.ln()).collect();
    bayes_update_cached(post, outcome, &log_lik)
}

/// Posterior after folding all outcomes over a uniform prior.
pub fn sequential_posterior(
    outcomes: &[(usize, usize)],
    input: &TwoModeInput,
    g: usize,
) -> Result<PhasePosterior> {
    let mut post = uniform_prior(g)?;
    for &outcome in outcomes {
        post = bayes_update(&post, outcome, input)?;
    }
    Ok(post)
}

/// Mean/sd by trapezoidal quadrature, MAP with parabolic refinement,
/// equal-tail credible interval, and the mode count under the prominence
/// rule (strict local maxima, boundaries included, at or above
/// [`MODE_PROMINENCE`] of the peak).
pub fn posterior_stats(post: &PhasePosterior, level: f64) -> PosteriorStats {
    assert!(
        level > 0.0 && level < 1.0,
        "credible level must lie in (0, 1), got {level}"
    );
    let h = post.spacing();
    let d = &post.density;
    let g = d.len();

    let mean = trapezoid(
        &post.grid.iter().zip(d).map(|(x, p)| x * p).collect::<Vec<_>>(),
        h,
    );
    let second = trapezoid(
        &post.grid.iter().zip(d).map(|(x, p)| x * x * p).collect::<Vec<_>>(),
        h,
    );
    let sd = (second - mean * mean).max(0.0).sqrt();

    // MAP: grid argmax, refined by the parabola through its neighbors.
    let (i_max, &d_max) = d
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty grid");
    let mut map_estimate = post.grid[i_max];
    if i_max > 0 && i_max + 1 < g {
        let denom = d[i_max - 1] - 2.0 * d[i_max] + d[i_max + 1];
        if denom < 0.0 {
            let delta = 0.5 * (d[i_max - 1] - d[i_max + 1]) / denom;
            map_estimate = (post.grid[i_max] + delta * h).clamp(0.0, PI);
        }
    }

    // Equal-tail interval from the piecewise-linear CDF.
    let mut cdf = Vec::with_capacity(g);
    let mut acc = KahanSum::new();
    cdf.push(0.0);
    for i in 1..g {
        acc.add(0.5 * h * (d[i - 1] + d[i]));
        cdf.push(acc.value());
    }
    let total = *cdf.last().expect("nonempty");
    let quantile = |t: f64| -> f64 {
        let target = t * total;
        let i = cdf.partition_point(|&c| c < target);
        if i == 0 {
            return post.grid[0];
        }
        if i >= g {
            return post.grid[g - 1];
        }
        let w = cdf[i] - cdf[i - 1];
        if w <= 0.0 {
            return post.grid[i];
        }
        post.grid[i - 1] + h * (target - cdf[i - 1]) / w
    };
    let tail = 0.5 * (1.0 - level);
    let ci_lo = quantile(tail);
    let ci_hi = quantile(1.0 - tail);

    // Mode census: strict maxima (one-sided at the boundaries) above the
    // prominence floor. A flat plateau has no strict maximum.
    let floor = MODE_PROMINENCE * d_max;
    let mut n_modes = 0;
    for i in 0..g {
        if d[i] < floor {
            continue;
        }
        let left_ok = i == 0 || d[i] > d[i - 1];
        let right_ok = i + 1 == g || d[i] > d[i + 1];
        if left_ok && right_ok {
            n_modes += 1;
        }
    }

    PosteriorStats {
        mean,
        sd,
        map_estimate,
        ci_lo,
        ci_hi,
        level,
        unimodal: n_modes == 1,
        n_modes,
    }
}

/// Robertson-Cryer half-sample mode: repeatedly keep the shortest window of
/// ceil(k/2) sorted samples; ties resolve to the leftmost window. The final
/// 3 samples reduce to the mean of the closest pair (middle value on ties),
/// 2 to their average, 1 to itself.
pub fn half_sample_mode(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let mut v: Vec<f64> = samples.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    let mut lo = 0;
    let mut hi = v.len(); // exclusive
    while hi - lo > 3 {
        let n = hi - lo;
        let w = n.div_ceil(2);
        let mut best = lo;
        let mut best_width = f64::INFINITY;
        for i in lo..=(hi - w) {
            let width = v[i + w - 1] - v[i];
            if width < best_width {
                best_width = width;
                best = i;
            }
        }
        lo = best;
        hi = best + w;
    }
    let s = &v[lo..hi];
    Ok(match s.len() {
        1 => s[0],
        2 => 0.5 * (s[0] + s[1]),
        _ => {
            let d01 = s[1] - s[0];
            let d12 = s[2] - s[1];
            if d01 < d12 {
                0.5 * (s[0] + s[1])
            } else if d12 < d01 {
                0.5 * (s[1] + s[2])
            } else {
                s[1]
            }
        }
    })
}

/// Shot count minimizing the composite cost C(nu) = 1/(nu F) + lambda S^nu
/// over nu in [1, nu_max]; ties resolve to the smaller nu. lambda = 0 means
/// no compute penalty, so the scan degenerates to nu_max.
pub fn nu_opt(f: f64, lambda: f64, s: u32, nu_max: u32) -> Result<u32> {
    if f <= 0.0 {
        return Err(Error::NonPositiveFisher(f));
    }
    if nu_max == 0 {
        return Err(Error::InvalidConfig("nu_max must be positive".into()));
    }
    if s < 2 {
        return Err(Error::InvalidConfig(format!("cost base S must be >= 2, got {s}")));
    }
    if lambda < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "cost weight lambda must be >= 0, got {lambda}"
        )));
    }
    if lambda == 0.0 {
        return Ok(nu_max);
    }
    let mut best = 1;
    let mut best_cost = f64::INFINITY;
    for nu in 1..=nu_max {
        let cost = 1.0 / (nu as f64 * f) + lambda * (s as f64).powi(nu as i32);
        if cost < best_cost {
            best_cost = cost;
            best = nu;
        }
    }
    Ok(best)
}

/// Smallest prefix of `outcomes` whose sequential posterior is unimodal;
/// None if no prefix is (including the empty record).
pub fn first_unimodal_nu(
    outcomes: &[(usize, usize)],
    input: &TwoModeInput,
    g: usize,
) -> Result<Option<usize>> {
    let mut post = uniform_prior(g)?;
    for (i, &outcome) in outcomes.iter().enumerate() {
        post = bayes_update(&post, outcome, input)?;
        if posterior_stats(&post, DEFAULT_LEVEL).unimodal {
            return Ok(Some(i + 1));
        }
    }
    Ok(None)
}
