//! Fisher-information sweeps over (q, mean) operating points.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fisher::{cfi, heisenberg_reference, qfi_closed_form, qfi_variance, FisherReport};
use crate::mzi::TwoModeInput;
use crate::qalgebra::DeformationParameter;
use crate::states::{build_state, solve_amplitude, CatParity, StateKind};

use super::config::{ExperimentConfig, SweepSpec};

/// One sweep row: the Fisher report plus the operating-point bookkeeping
/// that reproduces it (solved amplitudes, truncation tails, references).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QfiRow {
    #[serde(flatten)]
    pub fisher: FisherReport,
    pub mean_total: f64,
    /// Heisenberg reference information mean_total^2.
    pub f_hl: f64,
    /// Solved real generator amplitudes.
    pub alpha_a: f64,
    pub alpha_b: f64,
    /// Untruncated-state mass beyond n_max (upper bounds).
    pub tail_bound_a: f64,
    pub tail_bound_b: f64,
}

impl QfiRow {
    pub const CSV_HEADER: &'static str =
        "q,mean_a,mean_b,parity,fq_closed,fq_variance,fc,phi_eval,\
         mean_total,f_hl,alpha_a,alpha_b,tail_bound_a,tail_bound_b";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            self.fisher.csv_row(),
            self.mean_total,
            self.f_hl,
            self.alpha_a,
            self.alpha_b,
            self.tail_bound_a,
            self.tail_bound_b
        )
    }
}

/// The cat-role state kind for a parity.
pub fn cat_kind(parity: CatParity) -> StateKind {
    match parity {
        CatParity::Even => StateKind::QCatEven,
        CatParity::Odd => StateKind::QCatOdd,
    }
}

/// Solve both generator amplitudes to the target per-mode means and build
/// the phase-matched input. Returns the input and the solved amplitudes.
pub fn build_input_for_means(
    q: DeformationParameter,
    parity: CatParity,
    mean_a: f64,
    mean_b: f64,
    n_max: usize,
) -> Result<(TwoModeInput, f64, f64)> {
    let alpha_a = solve_amplitude(mean_a, q, StateKind::QCoherent, n_max)?;
    let alpha_b = solve_amplitude(mean_b, q, cat_kind(parity), n_max)?;
    let mode_a = build_state(StateKind::QCoherent, alpha_a, q, n_max)?;
    let mode_b = build_state(cat_kind(parity), alpha_b, q, n_max)?;
    let input = TwoModeInput::new(mode_a, mode_b)?;
    Ok((input, alpha_a, alpha_b))
}

/// Evaluate one operating point: QFI both ways and the CFI at phi_eval.
pub fn qfi_point(
    q_value: f64,
    parity: CatParity,
    mean_a: f64,
    mean_b: f64,
    n_max: usize,
    phi_eval: f64,
) -> Result<QfiRow> {
    let q = DeformationParameter::new(q_value)?;
    let (input, alpha_a, alpha_b) = build_input_for_means(q, parity, mean_a, mean_b, n_max)?;
    let mean_total = mean_a + mean_b;
    Ok(QfiRow {
        fisher: FisherReport {
            q: q_value,
            mean_a,
            mean_b,
            parity,
            fq_closed: qfi_closed_form(&input),
            fq_variance: qfi_variance(&input),
            fc: cfi(&input, phi_eval)?,
            phi_eval,
            nu: None,
        },
        mean_total,
        f_hl: heisenberg_reference(mean_total),
        alpha_a,
        alpha_b,
        tail_bound_a: input.mode_a().tail_bound,
        tail_bound_b: input.mode_b().tail_bound,
    })
}

/// Run the configured QFI sweep. Points are evaluated in parallel but rows
/// come back sorted by (q, mean_total): output order never depends on the
/// scheduler. The CFI column is evaluated at the config's phi_true.
pub fn run_qfi_sweep(config: &ExperimentConfig) -> Result<Vec<QfiRow>> {
    config.validate()?;
    let points: Vec<(f64, f64, f64)> = match &config.sweep {
        Some(SweepSpec::QfiVsN { means, qs }) => qs
            .iter()
            .flat_map(|&q| means.iter().map(move |&m| (q, m, m)))
            .collect(),
        Some(SweepSpec::QfiVsQ { qs, mean_total }) => {
            let (ma, mb) = config.split_rule.per_mode_means(*mean_total);
            qs.iter().map(|&q| (q, ma, mb)).collect()
        }
        Some(SweepSpec::Bayes { .. }) => {
            return Err(Error::InvalidConfig(
                "bayes sweep given to run_qfi_sweep; use run_bayes_experiment".into(),
            ))
        }
        None => {
            return Err(Error::InvalidConfig(
                "config.sweep is required for run_qfi_sweep".into(),
            ))
        }
    };
    if points.is_empty() {
        return Err(Error::EmptySweep);
    }
    let mut points = points;
    points.sort_by(|a, b| (a.0, a.1 + a.2).partial_cmp(&(b.0, b.1 + b.2)).expect("finite"));
    points.dedup();
    points
        .into_par_iter()
        .map(|(q, ma, mb)| qfi_point(q, config.parity, ma, mb, config.n_max, config.phi_true))
        .collect()
}
