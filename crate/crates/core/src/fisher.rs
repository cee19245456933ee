//! Quantum Fisher information (closed form and variance oracle), classical
//! Fisher information from count probabilities, and derived phase bounds.
//!
//! Two independent QFI routes cross-check each other: the closed-form double
//! sum over the input coefficients, and 4 Var(J_y) built by direct ladder
//! action on the truncated product state. The classical information uses the
//! analytic likelihood derivative from the Wigner ladder recurrence.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kahan::KahanSum;
use crate::mzi::{amplitude_and_derivative, TwoModeInput};
use crate::states::CatParity;

/// Below this probability an outcome is treated as a zero of the amplitude
/// and its CFI contribution switches to the limiting form (see [`cfi`]).
pub const CFI_PROB_FLOOR: f64 = 1e-15;

/// Blocks carrying less input mass than this cannot produce any outcome
/// above [`CFI_PROB_FLOOR`] and are skipped wholesale.
const BLOCK_MASS_FLOOR: f64 = 1e-18;

/// Fisher quantities for one interferometer configuration.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FisherReport {
    pub q: f64,
    pub mean_a: f64,
    pub mean_b: f64,
    pub parity: CatParity,
    pub fq_closed: f64,
    pub fq_variance: f64,
    pub fc: f64,
    pub phi_eval: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<u32>,
}

impl FisherReport {
    pub const CSV_HEADER: &'static str =
        "q,mean_a,mean_b,parity,fq_closed,fq_variance,fc,phi_eval";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.17e},{:.17e},{:.17e},{:.17e}",
            self.q,
            self.mean_a,
            self.mean_b,
            self.parity,
            self.fq_closed,
            self.fq_variance,
            self.fc,
            self.phi_eval
        )
    }
}

/// Closed-form QFI: the double sum
///
/// F_Q = sum_{n,m} |C_n|^2 |K_m|^2 (n + m + 2mn)
///       - 2 Re(K_m K*_{m+2} C*_n C_{n+2}) sqrt((n+1)(n+2)(m+1)(m+2))
///
/// over the phase-matched coefficients, with both terms sharing the double
/// sum (that reading is validated against [`qfi_variance`] in the tests).
pub fn qfi_closed_form(input: &TwoModeInput) -> f64 {
    let n_max = input.n_max();
    let mut acc = KahanSum::new();
    for n in 0..=n_max {
        let cn = input.coeff_c(n);
        let cn_sq = cn.norm_sqr();
        let c_cross = cn.conj() * input.coeff_c(n + 2);
        for m in 0..=n_max {
            let km = input.coeff_k(m);
            let diag = cn_sq * km.norm_sqr() * (n + m + 2 * m * n) as f64;
            let cross = (km * input.coeff_k(m + 2).conj() * c_cross).re
                * (((n + 1) * (n + 2) * (m + 1) * (m + 2)) as f64).sqrt();
            acc.add(diag - 2.0 * cross);
        }
    }
    acc.value()
}

/// J_y acting on the product state, on a grid extended one step past the
/// cutoff (ladder operators spill outward). Returns (<J_y^2>, <J_y>).
fn jy_moments(input: &TwoModeInput) -> (f64, f64) {
    let n_max = input.n_max();
    let side = n_max + 2;
    let psi = |n1: usize, n2: usize| input.coeff_c(n1) * input.coeff_k(n2);
    let mut second = KahanSum::new();
    let mut mean = KahanSum::new();
    for n1 in 0..side {
        for n2 in 0..side {
            // (J_y psi)_{n1,n2} = -i/2 [sqrt(n1(n2+1)) psi_{n1-1,n2+1}
            //                            - sqrt((n1+1)n2) psi_{n1+1,n2-1}]
            let mut v = num_complex::Complex64::ZERO;
            if n1 > 0 {
                v += ((n1 * (n2 + 1)) as f64).sqrt() * psi(n1 - 1, n2 + 1);
            }
            if n2 > 0 {
                v -= (((n1 + 1) * n2) as f64).sqrt() * psi(n1 + 1, n2 - 1);
            }
            v *= num_complex::Complex64::new(0.0, -0.5);
            second.add(v.norm_sqr());
            // <J_y> = <psi|J_y psi>; imaginary parts cancel for Hermitian J_y.
            mean.add((psi(n1, n2).conj() * v).re);
        }
    }
    (second.value(), mean.value())
}

/// QFI as 4 Var(J_y) on the truncated product state.
pub fn qfi_variance(input: &TwoModeInput) -> f64 {
    let (second, mean) = jy_moments(input);
    4.0 * (second - mean * mean)
}

/// <J_y> of the input. Zero (to rounding) for coherent (x) definite-parity
/// cat inputs; exposed so tests assert that instead of assuming it.
pub fn jy_mean(input: &TwoModeInput) -> f64 {
    jy_moments(input).1
}

/// Classical Fisher information of the photon-count distribution at phi:
/// F_C = sum (d_phi p)^2 / p with the analytic derivative
/// d_phi p = 2 Re(A* d_phi A).
///
/// Amplitudes are analytic in phi, and at isolated phases some outcomes have
/// first-order amplitude zeros (parity selection at phi = pi/2, for one).
/// There p and d_phi p vanish together and the ratio tends to 4 |d_phi A|^2,
/// which is what the expected log-likelihood curvature retains; summing the
/// limiting value keeps F_C continuous in phi instead of dropping to a
/// lower-semicontinuous envelope at those phases. Higher-order zeros get a
/// vanishing d_phi A and contribute 0 through the same branch.
pub fn cfi(input: &TwoModeInput, phi: f64) -> Result<f64> {
    let n_cap = 2 * input.n_max();
    let covered: f64 = (0..=n_cap).map(|n| input.block_mass(n)).sum();
    if 1.0 - covered > 1e-8 {
        return Err(Error::ExcessDeficiency { deficiency: 1.0 - covered, limit: 1e-8 });
    }
    let mut acc = KahanSum::new();
    for n_total in 0..=n_cap {
        if input.block_mass(n_total) < BLOCK_MASS_FLOOR {
            continue;
        }
        for n1 in 0..=n_total {
            let (a, da) = amplitude_and_derivative(n1, n_total - n1, phi, input)?;
            let p = a.norm_sqr();
            if p < CFI_PROB_FLOOR {
                acc.add(4.0 * da.norm_sqr());
            } else {
                let dp = 2.0 * (a.conj() * da).re;
                acc.add(dp * dp / p);
            }
        }
    }
    Ok(acc.value())
}

/// Cramer-Rao phase bound 1/sqrt(nu F).
pub fn qcrb_delta_phi(f: f64, nu: u32) -> Result<f64> {
    if f <= 0.0 {
        return Err(Error::NonPositiveFisher(f));
    }
    if nu == 0 {
        return Err(Error::InvalidConfig("nu must be positive".into()));
    }
    Ok(1.0 / (nu as f64 * f).sqrt())
}

/// Heisenberg-limit reference information F_HL = mean_total^2.
pub fn heisenberg_reference(mean_total: f64) -> f64 {
    mean_total * mean_total
}

/// Second-order corrected lower bound on the mean-square error:
/// 1/(nu F) + (1/nu^2)(-1/F + gamma1/F^3 + gamma2/F^4).
/// The gammas are caller-supplied score-cumulant combinations.
pub fn corrected_mse_bound(f: f64, nu: u32, gamma1: f64, gamma2: f64) -> Result<f64> {
    if f <= 0.0 {
        return Err(Error::NonPositiveFisher(f));
    }
    if nu == 0 {
        return Err(Error::InvalidConfig("nu must be positive".into()));
    }
    let nu = nu as f64;
    let f2 = f * f;
    Ok(1.0 / (nu * f) + (-1.0 / f + gamma1 / (f2 * f) + gamma2 / (f2 * f2)) / (nu * nu))
}
