//! Built-in oracle-equivalence suite behind the `selftest` subcommand: fast
//! spot checks of every numerical pillar, reporting one named PASS/FAIL per
//! check without involving the test harness.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bayes::{bayes_update, posterior_stats, uniform_prior, DEFAULT_LEVEL};
use crate::fisher::{cfi, qfi_closed_form, qfi_variance};
use crate::mzi::{full_distribution, oracle_distribution, TwoModeInput};
use crate::qalgebra::DeformationParameter;
use crate::rng::u01;
use crate::states::{custom_state, q_cat, q_coherent, CatParity};
use crate::wigner::{wigner_d, wigner_d_row, SpinIndex};

use super::bayes_sim::run_bayes_single;
use super::config::ExperimentConfig;

/// Outcome of one named check.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<String, String>) -> CheckResult {
    match f() {
        Ok(detail) => CheckResult { name, passed: true, detail },
        Err(detail) => CheckResult { name, passed: false, detail },
    }
}

fn qp(v: f64) -> DeformationParameter {
    DeformationParameter::new(v).expect("valid q")
}

/// Random normalized complex amplitude vectors on a shared cutoff.
fn random_input(seed: u64, n_max: usize) -> TwoModeInput {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |_: usize| {
        Complex64::new(2.0 * u01(&mut rng) - 1.0, 2.0 * u01(&mut rng) - 1.0)
    };
    let a: Vec<Complex64> = (0..=n_max).map(&mut draw).collect();
    let b: Vec<Complex64> = (0..=n_max).map(&mut draw).collect();
    let a = custom_state(a, qp(1.0)).expect("nonzero norm");
    let b = custom_state(b, qp(1.0)).expect("nonzero norm");
    TwoModeInput::new(a, b).expect("shared cutoff")
}

fn rotation_row_orthonormality() -> Result<String, String> {
    let mut worst: f64 = 0.0;
    for &two_mp in &[0i32, 14, 60, -60] {
        let row_a = wigner_d_row(60, two_mp, FRAC_PI_2).map_err(|e| e.to_string())?;
        let norm: f64 = row_a.iter().map(|d| d * d).sum();
        worst = worst.max((norm - 1.0).abs());
    }
    let row_a = wigner_d_row(60, 0, FRAC_PI_2).map_err(|e| e.to_string())?;
    let row_b = wigner_d_row(60, 14, FRAC_PI_2).map_err(|e| e.to_string())?;
    let dot: f64 = row_a.iter().zip(&row_b).map(|(x, y)| x * y).sum();
    worst = worst.max(dot.abs());
    if worst < 1e-12 {
        Ok(format!("defect {worst:.2e} at two_j = 60"))
    } else {
        Err(format!("defect {worst:.2e} >= 1e-12 at two_j = 60"))
    }
}

fn rotation_closed_forms() -> Result<String, String> {
    let phi: f64 = 0.7654;
    let half = (phi / 2.0).cos();
    let cases = [
        (1, 1, 1, half),
        (1, 1, -1, -(phi / 2.0).sin()),
        (2, 2, 2, half * half),
        (2, 0, 0, phi.cos()),
        (2, 2, 0, -phi.sin() / 2f64.sqrt()),
    ];
    let mut worst: f64 = 0.0;
    for &(tj, tmp, tm, want) in &cases {
        let idx = SpinIndex::new(tj, tmp, tm).map_err(|e| e.to_string())?;
        worst = worst.max((wigner_d(idx, phi) - want).abs());
    }
    if worst < 1e-14 {
        Ok(format!("max deviation {worst:.2e} from spin-1/2 and spin-1 forms"))
    } else {
        Err(format!("deviation {worst:.2e} >= 1e-14"))
    }
}

fn likelihood_oracle_equivalence() -> Result<String, String> {
    let input = random_input(7, 5);
    let phi = 1.234;
    let full = full_distribution(phi, &input, 10).map_err(|e| e.to_string())?;
    let oracle = oracle_distribution(phi, &input, 10).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for (a, b) in full.entries.iter().zip(&oracle.entries) {
        if (a.n1, a.n2) != (b.n1, b.n2) {
            return Err("entry orderings diverge".into());
        }
        worst = worst.max((a.p - b.p).abs());
    }
    if worst < 1e-9 {
        Ok(format!("max |p - p_oracle| = {worst:.2e}"))
    } else {
        Err(format!("max |p - p_oracle| = {worst:.2e} >= 1e-9"))
    }
}

fn qfi_closed_vs_variance() -> Result<String, String> {
    let a = q_coherent(Complex64::new(1.3, 0.0), qp(0.9), 25).map_err(|e| e.to_string())?;
    let b = q_cat(Complex64::new(1.1, 0.0), qp(0.9), CatParity::Even, 25)
        .map_err(|e| e.to_string())?;
    let input = TwoModeInput::new(a, b).map_err(|e| e.to_string())?;
    let closed = qfi_closed_form(&input);
    let variance = qfi_variance(&input);
    let rel = (closed - variance).abs() / variance.max(1e-300);
    if rel < 1e-8 {
        Ok(format!("relative gap {rel:.2e}"))
    } else {
        Err(format!("relative gap {rel:.2e} >= 1e-8"))
    }
}

fn single_photon_information() -> Result<String, String> {
    let one = custom_state(
        vec![Complex64::ZERO, Complex64::new(1.0, 0.0)],
        qp(1.0),
    )
    .map_err(|e| e.to_string())?;
    let vac = custom_state(
        vec![Complex64::new(1.0, 0.0), Complex64::ZERO],
        qp(1.0),
    )
    .map_err(|e| e.to_string())?;
    let input = TwoModeInput::new(one, vac).map_err(|e| e.to_string())?;
    let fq = qfi_closed_form(&input);
    let fc = cfi(&input, 1.1).map_err(|e| e.to_string())?;
    let worst = (fq - 1.0).abs().max((fc - 1.0).abs());
    if worst < 1e-9 {
        Ok(format!("|F - 1| <= {worst:.2e}"))
    } else {
        Err(format!("|F - 1| = {worst:.2e} >= 1e-9"))
    }
}

fn posterior_normalization() -> Result<String, String> {
    let a = q_coherent(Complex64::new(1.0, 0.0), qp(0.9), 16).map_err(|e| e.to_string())?;
    let b = q_cat(Complex64::new(1.0, 0.0), qp(0.9), CatParity::Even, 16)
        .map_err(|e| e.to_string())?;
    let input = TwoModeInput::new(a, b).map_err(|e| e.to_string())?;
    let mut post = uniform_prior(256).map_err(|e| e.to_string())?;
    for outcome in [(1usize, 1usize), (2, 0), (0, 2)] {
        post = bayes_update(&post, outcome, &input).map_err(|e| e.to_string())?;
    }
    let defect = (post.total_mass() - 1.0).abs();
    let stats = posterior_stats(&post, DEFAULT_LEVEL);
    if defect < 1e-9 && stats.sd > 0.0 {
        Ok(format!("normalization defect {defect:.2e} after 3 shots"))
    } else {
        Err(format!("normalization defect {defect:.2e} >= 1e-9"))
    }
}

fn undeformed_reduction() -> Result<String, String> {
    // At q = 1 the coherent amplitudes are Poissonian:
    // a_n = e^{-|b|^2/2} b^n / sqrt(n!).
    let beta = 1.7;
    let s = q_coherent(Complex64::new(beta, 0.0), qp(1.0), 40).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    let mut log_fact = 0.0;
    for n in 0..=40usize {
        if n > 0 {
            log_fact += (n as f64).ln();
        }
        let want = (-beta * beta / 2.0 + n as f64 * beta.ln() - 0.5 * log_fact).exp();
        worst = worst.max((s.amplitudes[n].re - want).abs());
    }
    if worst < 1e-8 {
        Ok(format!("sup-norm gap {worst:.2e} to the undeformed amplitudes"))
    } else {
        Err(format!("sup-norm gap {worst:.2e} >= 1e-8"))
    }
}

fn monte_carlo_determinism() -> Result<String, String> {
    let config = ExperimentConfig {
        n_max: 8,
        nu: 4,
        runs: 3,
        grid_g: 128,
        seed: 11,
        ..Default::default()
    };
    let a = run_bayes_single(&config, 1.5).map_err(|e| e.to_string())?;
    let b = run_bayes_single(&config, 1.5).map_err(|e| e.to_string())?;
    if a == b {
        Ok("identical groups across repeat executions".into())
    } else {
        Err("repeat execution diverged".into())
    }
}

fn phase_estimate_sanity() -> Result<String, String> {
    // A handful of shots at phi = pi/2 must concentrate the posterior near
    // the truth: |mean - pi/2| well inside the prior sd.
    let config = ExperimentConfig {
        n_max: 12,
        nu: 12,
        runs: 2,
        grid_g: 512,
        seed: 5,
        ..Default::default()
    };
    let group = run_bayes_single(&config, 4.0).map_err(|e| e.to_string())?;
    let prior_sd = PI / 12f64.sqrt();
    for r in &group.runs {
        let err = (r.mean_estimate - FRAC_PI_2).abs();
        if err > 0.5 * prior_sd {
            return Err(format!(
                "run {} posterior mean off by {err:.3} (prior sd {prior_sd:.3})",
                r.run_index
            ));
        }
    }
    Ok(format!(
        "posterior means within {:.3} of the true phase",
        group
            .runs
            .iter()
            .map(|r| (r.mean_estimate - FRAC_PI_2).abs())
            .fold(0.0, f64::max)
    ))
}

/// Run every check; failures carry details.
pub fn selftest() -> Vec<CheckResult> {
    vec![
        check("rotation_row_orthonormality", rotation_row_orthonormality),
        check("rotation_closed_forms", rotation_closed_forms),
        check("likelihood_oracle_equivalence", likelihood_oracle_equivalence),
        check("qfi_closed_vs_variance", qfi_closed_vs_variance),
        check("single_photon_information", single_photon_information),
        check("posterior_normalization", posterior_normalization),
        check("undeformed_reduction", undeformed_reduction),
        check("monte_carlo_determinism", monte_carlo_determinism),
        check("phase_estimate_sanity", phase_estimate_sanity),
    ]
}
