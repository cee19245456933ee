//! Truncated Fock-basis probe states: q-coherent and q-cat amplitude
//! vectors, photon-number moments, and amplitude solving for a target mean.
//!
//! States are built at a caller-specified cutoff `n_max` and renormalized.
//! The probability mass the untruncated series would carry beyond the cutoff
//! is estimated by a geometric-ratio bound and recorded as `tail_bound`, so
//! truncation error stays auditable instead of silent.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kahan::kahan_sum;
use crate::qalgebra::{log_q_factorial, q_number, DeformationParameter};

/// Which probe state a coefficient vector represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    QCoherent,
    QCatEven,
    QCatOdd,
    Custom,
}

impl StateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StateKind::QCoherent => "q_coherent",
            StateKind::QCatEven => "q_cat_even",
            StateKind::QCatOdd => "q_cat_odd",
            StateKind::Custom => "custom",
        }
    }
}

/// Cat-state parity selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CatParity {
    Even,
    Odd,
}

impl CatParity {
    pub fn as_str(self) -> &'static str {
        match self {
            CatParity::Even => "even",
            CatParity::Odd => "odd",
        }
    }
}

impl std::fmt::Display for CatParity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Truncation acceptance policy for state constructors.
///
/// `eps_tail` is the largest estimated beyond-cutoff probability mass a
/// constructor accepts; `allow_excess` overrides the gate (the tail bound is
/// still recorded on the state).
#[derive(Clone, Copy, Debug)]
pub struct TruncationPolicy {
    pub eps_tail: f64,
    pub allow_excess: bool,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self { eps_tail: 1e-10, allow_excess: false }
    }
}

impl TruncationPolicy {
    /// Accept any tail; used where the truncated vector itself is the object
    /// of study and the beyond-cutoff mass is reported instead of gated.
    pub fn permissive() -> Self {
        Self { eps_tail: 1e-10, allow_excess: true }
    }
}

/// Normalized single-mode amplitude vector over Fock states `0..=n_max`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FockAmplitudes {
    pub kind: StateKind,
    pub q: DeformationParameter,
    /// Generator amplitude (zero for `Custom` vectors).
    pub alpha: Complex64,
    pub n_max: usize,
    /// `amplitudes[n]` multiplies `|n>`; normalized so the squared moduli sum to 1.
    pub amplitudes: Vec<Complex64>,
    /// Estimated probability mass of the untruncated state beyond `n_max`
    /// (upper bound; 1.0 when the untruncated series does not converge).
    pub tail_bound: f64,
}

/// First and second photon-number moments of a truncated state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhotonMoments {
    pub mean: f64,
    pub variance: f64,
}

/// Log-domain unnormalized series weights `ln t_n = 2n ln|alpha| - ln [n]_q!`
/// for the q-exponential normalization series. Entry n is `None` when the
/// state kind zeroes that Fock component.
fn log_weights(
    alpha_abs: f64,
    q: DeformationParameter,
    n_max: usize,
    keep: impl Fn(usize) -> bool,
) -> Vec<Option<f64>> {
    let ln_a2 = if alpha_abs > 0.0 { 2.0 * alpha_abs.ln() } else { f64::NEG_INFINITY };
    (0..=n_max)
        .map(|n| {
            if !keep(n) {
                return None;
            }
            if n == 0 {
                return Some(0.0);
            }
            if alpha_abs == 0.0 {
                return None;
            }
            Some(n as f64 * ln_a2 - log_q_factorial(n as u32, q))
        })
        .collect()
}

/// Geometric bound on the relative mass of the series beyond `n_max`.
///
/// With `t_n = |alpha|^{2n}/[n]_q!`, consecutive ratios `t_{n+1}/t_n =
/// |alpha|^2/[n+1]_q` decrease in n, so the tail is dominated by a geometric
/// series with ratio `r = |alpha|^2/[n_max+2]_q`. Returns 1.0 when the ratio
/// reaches 1 (series diverges beyond the cutoff; all mass estimates are off).
fn tail_bound(
    alpha_abs: f64,
    q: DeformationParameter,
    n_max: usize,
    log_w: &[Option<f64>],
) -> f64 {
    if alpha_abs == 0.0 {
        return 0.0;
    }
    let a2 = alpha_abs * alpha_abs;
    let r = a2 / q_number(n_max as u32 + 2, q);
    if r >= 1.0 {
        return 1.0;
    }
    // ln t_{n_max+1}
    let ln_t_next =
        (n_max as f64 + 1.0) * 2.0 * alpha_abs.ln() - log_q_factorial(n_max as u32 + 1, q);
    let max_lw = log_w
        .iter()
        .flatten()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let surviving: f64 = kahan_sum(log_w.iter().flatten().map(|lw| (lw - max_lw).exp()));
    // Tau = (bound on tail sum) / (surviving truncated sum), in max-shifted units.
    let tau = (ln_t_next - max_lw).exp() / (1.0 - r) / surviving;
    (tau / (1.0 + tau)).min(1.0)
}

/// Build the normalized amplitude vector from log-domain weights, carrying
/// the phase `e^{i n arg(alpha)}` separately from the magnitudes.
fn normalize_from_log_weights(
    log_w: &[Option<f64>],
    alpha_arg: f64,
) -> Result<Vec<Complex64>> {
    let max_lw = log_w
        .iter()
        .flatten()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    if max_lw == f64::NEG_INFINITY {
        return Err(Error::ZeroNorm);
    }
    let total: f64 = kahan_sum(log_w.iter().flatten().map(|lw| (lw - max_lw).exp()));
    let ln_norm = 0.5 * (max_lw + total.ln());
    Ok(log_w
        .iter()
        .enumerate()
        .map(|(n, lw)| match lw {
            Some(lw) => {
                let mag = (0.5 * lw - ln_norm).exp();
                Complex64::from_polar(mag, n as f64 * alpha_arg)
            }
            None => Complex64::ZERO,
        })
        .collect())
}

/// q-deformed coherent state `sum_n alpha^n / sqrt([n]_q!) |n>`, truncated
/// at `n_max` and renormalized, with the default truncation policy.
pub fn q_coherent(
    alpha: Complex64,
    q: DeformationParameter,
    n_max: usize,
) -> Result<FockAmplitudes> {
    q_coherent_with(alpha, q, n_max, TruncationPolicy::default())
}

pub fn q_coherent_with(
    alpha: Complex64,
    q: DeformationParameter,
    n_max: usize,
    policy: TruncationPolicy,
) -> Result<FockAmplitudes> {
    let log_w = log_weights(alpha.norm(), q, n_max, |_| true);
    let tail = tail_bound(alpha.norm(), q, n_max, &log_w);
    if tail > policy.eps_tail && !policy.allow_excess {
        return Err(Error::TruncationExcess { tail_bound: tail, eps_tail: policy.eps_tail });
    }
    let amplitudes = normalize_from_log_weights(&log_w, alpha.arg())?;
    Ok(FockAmplitudes {
        kind: StateKind::QCoherent,
        q,
        alpha,
        n_max,
        amplitudes,
        tail_bound: tail,
    })
}

/// q-deformed cat state, the even or odd superposition of `|alpha>` and
/// `|-alpha>`: amplitudes proportional to `[1 +/- (-1)^n] alpha^n / sqrt([n]_q!)`.
pub fn q_cat(
    alpha: Complex64,
    q: DeformationParameter,
    parity: CatParity,
    n_max: usize,
) -> Result<FockAmplitudes> {
    q_cat_with(alpha, q, parity, n_max, TruncationPolicy::default())
}

pub fn q_cat_with(
    alpha: Complex64,
    q: DeformationParameter,
    parity: CatParity,
    n_max: usize,
    policy: TruncationPolicy,
) -> Result<FockAmplitudes> {
    let (kind, keep): (StateKind, fn(usize) -> bool) = match parity {
        CatParity::Even => (StateKind::QCatEven, |n| n % 2 == 0),
        CatParity::Odd => (StateKind::QCatOdd, |n| n % 2 == 1),
    };
    if parity == CatParity::Odd && alpha.norm() == 0.0 {
        return Err(Error::DegenerateCat);
    }
    let log_w = log_weights(alpha.norm(), q, n_max, keep);
    let tail = tail_bound(alpha.norm(), q, n_max, &log_w);
    if tail > policy.eps_tail && !policy.allow_excess {
        return Err(Error::TruncationExcess { tail_bound: tail, eps_tail: policy.eps_tail });
    }
    let amplitudes = normalize_from_log_weights(&log_w, alpha.arg())?;
    Ok(FockAmplitudes { kind, q, alpha, n_max, amplitudes, tail_bound: tail })
}

/// Wrap an arbitrary amplitude vector (normalized here) as a probe state.
pub fn custom_state(
    amplitudes: Vec<Complex64>,
    q: DeformationParameter,
) -> Result<FockAmplitudes> {
    let norm_sq = kahan_sum(amplitudes.iter().map(|a| a.norm_sqr()));
    if norm_sq <= 0.0 || !norm_sq.is_finite() {
        return Err(Error::ZeroNorm);
    }
    let scale = norm_sq.sqrt().recip();
    let n_max = amplitudes.len().saturating_sub(1);
    Ok(FockAmplitudes {
        kind: StateKind::Custom,
        q,
        alpha: Complex64::ZERO,
        n_max,
        amplitudes: amplitudes.into_iter().map(|a| a * scale).collect(),
        tail_bound: 0.0,
    })
}

impl FockAmplitudes {
    /// Probability of finding n photons, `|a_n|^2`.
    #[inline]
    pub fn prob(&self, n: usize) -> f64 {
        self.amplitudes.get(n).map_or(0.0, |a| a.norm_sqr())
    }

    pub fn norm_sqr(&self) -> f64 {
        kahan_sum(self.amplitudes.iter().map(|a| a.norm_sqr()))
    }
}

/// Mean and variance of the photon-number distribution of a truncated state.
pub fn photon_moments(state: &FockAmplitudes) -> PhotonMoments {
    let mean = kahan_sum(
        state.amplitudes.iter().enumerate().map(|(n, a)| n as f64 * a.norm_sqr()),
    );
    let second = kahan_sum(
        state
            .amplitudes
            .iter()
            .enumerate()
            .map(|(n, a)| (n as f64) * (n as f64) * a.norm_sqr()),
    );
    PhotonMoments { mean, variance: (second - mean * mean).max(0.0) }
}

/// Builder used by the amplitude solver; `Custom` has no generator amplitude.
fn build_kind(
    kind: StateKind,
    alpha: f64,
    q: DeformationParameter,
    n_max: usize,
) -> Result<FockAmplitudes> {
    let a = Complex64::new(alpha, 0.0);
    // The solver explores alpha freely; truncation is the caller's concern.
    let policy = TruncationPolicy::permissive();
    match kind {
        StateKind::QCoherent => q_coherent_with(a, q, n_max, policy),
        StateKind::QCatEven => q_cat_with(a, q, CatParity::Even, n_max, policy),
        StateKind::QCatOdd => q_cat_with(a, q, CatParity::Odd, n_max, policy),
        StateKind::Custom => Err(Error::InvalidConfig(
            "cannot solve amplitude for a custom state".into(),
        )),
    }
}

/// Solve for the real non-negative generator amplitude whose truncated state
/// hits `target_mean`, by geometric bracket growth followed by bisection.
///
/// The photon mean of each kind is monotone increasing in alpha; this is
/// asserted numerically along the bracket search. Targets outside the
/// attainable range of the truncated family are reported as errors.
pub fn solve_amplitude(
    target_mean: f64,
    q: DeformationParameter,
    kind: StateKind,
    n_max: usize,
) -> Result<f64> {
    const MEAN_TOL: f64 = 1e-9;
    let mean_at = |alpha: f64| -> Result<f64> {
        Ok(photon_moments(&build_kind(kind, alpha, q, n_max)?).mean)
    };
    let unreachable = |min_mean: f64, max_mean: f64| Error::UnreachableMean {
        target: target_mean,
        kind: kind.as_str(),
        q: q.value(),
        n_max,
        min_mean,
        max_mean,
    };

    if !(target_mean >= 0.0) {
        return Err(unreachable(0.0, n_max as f64));
    }

    // Lower end of the attainable range: alpha -> 0 gives the vacuum for
    // coherent/even-cat (mean 0) and |1> for the odd cat (mean 1).
    let (mut lo, lo_mean) = match kind {
        StateKind::QCatOdd => {
            let eps = 1e-8;
            (eps, mean_at(eps)?)
        }
        _ => (0.0, 0.0),
    };
    if target_mean <= lo_mean + MEAN_TOL {
        if (target_mean - lo_mean).abs() <= MEAN_TOL {
            return Ok(if kind == StateKind::QCatOdd { lo } else { 0.0 });
        }
        return Err(unreachable(lo_mean, n_max as f64));
    }

    // Grow the upper bracket geometrically until the target is enclosed,
    // checking monotonicity of the mean as we go.
    let mut hi = 1.0_f64.max(2.0 * lo);
    let mut hi_mean = mean_at(hi)?;
    let mut prev_mean = hi_mean;
    let mut growths = 0;
    while hi_mean < target_mean {
        growths += 1;
        // The truncated mean saturates below n_max; stop once alpha is
        // absurdly large relative to the cutoff scale.
        if growths > 60 {
            return Err(unreachable(lo_mean, hi_mean));
        }
        hi *= 2.0;
        hi_mean = mean_at(hi)?;
        if hi_mean + 1e-12 < prev_mean {
            return Err(Error::InvalidConfig(format!(
                "photon mean is not monotone in alpha near alpha = {hi} (kind {}, q {})",
                kind.as_str(),
                q
            )));
        }
        prev_mean = hi_mean;
    }

    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let m = mean_at(mid)?;
        if (m - target_mean).abs() <= MEAN_TOL {
            return Ok(mid);
        }
        if m < target_mean {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi.max(1.0) {
            break;
        }
    }
    let alpha = 0.5 * (lo + hi);
    let residual = (mean_at(alpha)? - target_mean).abs();
    if residual <= MEAN_TOL {
        Ok(alpha)
    } else {
        Err(unreachable(lo_mean, mean_at(hi)?))
    }
}

/// Build the state of the given kind at a real non-negative amplitude with a
/// permissive truncation policy; companion to [`solve_amplitude`].
pub fn build_state(
    kind: StateKind,
    alpha: f64,
    q: DeformationParameter,
    n_max: usize,
) -> Result<FockAmplitudes> {
    build_kind(kind, alpha, q, n_max)
}
