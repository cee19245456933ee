//! State-construction checks against an extended-precision series oracle and
//! the undeformed (Poissonian) closed form.

mod common;

use common::dd::Dd;
use common::qp;
use num_complex::Complex64;
use qmzi_core::states::StateKind;
use qmzi_core::{
    build_state, photon_moments, q_cat_with, q_coherent_with, solve_amplitude, CatParity,
    TruncationPolicy,
};

/// Normalized amplitude moduli of the truncated q-coherent (parity = None)
/// or q-cat (parity = Some) state, summed entirely in double-double.
fn dd_amplitudes(alpha: f64, q: f64, n_max: usize, parity: Option<CatParity>) -> Vec<f64> {
    let one = Dd::from_f64(1.0);
    let qd = Dd::from_f64(q);
    let one_minus_q = one.sub(qd);
    let alpha_sq = Dd::from_f64(alpha).mul(Dd::from_f64(alpha));

    let keep = |n: usize| match parity {
        None => true,
        Some(CatParity::Even) => n % 2 == 0,
        Some(CatParity::Odd) => n % 2 == 1,
    };

    // term_n = alpha^{2n} / [n]_q!, built by the recurrence
    // term_n = term_{n-1} * alpha^2 / [n]_q with [n]_q = (1 - q^n)/(1 - q).
    let mut terms = Vec::with_capacity(n_max + 1);
    let mut term = one;
    let mut q_pow = one;
    terms.push(term);
    for n in 1..=n_max {
        q_pow = q_pow.mul(qd);
        let qn = if q == 1.0 {
            Dd::from_f64(n as f64)
        } else {
            one.sub(q_pow).div(one_minus_q)
        };
        term = term.mul(alpha_sq).div(qn);
        terms.push(term);
    }

    let mut norm = Dd::from_f64(0.0);
    for (n, t) in terms.iter().enumerate() {
        if keep(n) {
            norm = norm.add(*t);
        }
    }
    terms
        .iter()
        .enumerate()
        .map(|(n, t)| if keep(n) { t.div(norm).sqrt().to_f64() } else { 0.0 })
        .collect()
}

#[test]
fn coherent_amplitudes_match_dd_series() {
    for &q in &[0.9, 0.8] {
        let n_max = 60;
        let s = q_coherent_with(
            Complex64::new(2.0, 0.0),
            qp(q),
            n_max,
            TruncationPolicy::permissive(),
        )
        .unwrap();
        let oracle = dd_amplitudes(2.0, q, n_max, None);
        let mut worst = 0.0f64;
        for n in 0..=n_max {
            assert_eq!(s.amplitudes[n].im, 0.0, "real alpha keeps amplitudes real");
            worst = worst.max((s.amplitudes[n].re - oracle[n]).abs());
        }
        assert!(worst < 1e-12, "q={q}: sup deviation {worst:.3e}");
    }
}

#[test]
fn cat_amplitudes_match_dd_series() {
    for parity in [CatParity::Even, CatParity::Odd] {
        let n_max = 60;
        let s = q_cat_with(
            Complex64::new(2.0, 0.0),
            qp(0.9),
            parity,
            n_max,
            TruncationPolicy::permissive(),
        )
        .unwrap();
        let oracle = dd_amplitudes(2.0, 0.9, n_max, Some(parity));
        let mut worst = 0.0f64;
        for n in 0..=n_max {
            worst = worst.max((s.amplitudes[n].re - oracle[n]).abs());
            assert_eq!(s.amplitudes[n].im, 0.0);
        }
        assert!(worst < 1e-12, "{parity:?}: sup deviation {worst:.3e}");
    }
}

/// Poissonian closed form at q = 1 and stability of the q -> 1 limit.
#[test]
fn glauber_reduction() {
    let beta = 1.7f64;
    let n_max = 40;
    let poisson: Vec<f64> = {
        let mut log_fact = 0.0;
        (0..=n_max)
            .map(|n| {
                if n > 0 {
                    log_fact += (n as f64).ln();
                }
                (-beta * beta / 2.0 + n as f64 * beta.ln() - 0.5 * log_fact).exp()
            })
            .collect()
    };
    for &q in &[1.0, 1.0 - 1e-12] {
        let s = q_coherent_with(
            Complex64::new(beta, 0.0),
            qp(q),
            n_max,
            TruncationPolicy::permissive(),
        )
        .unwrap();
        let mut worst = 0.0f64;
        for n in 0..=n_max {
            worst = worst.max((s.amplitudes[n].re - poisson[n]).abs());
        }
        assert!(worst < 1e-8, "q={q}: sup deviation from Poisson {worst:.3e}");
    }
}

#[test]
fn solved_amplitudes_reproduce_target_means() {
    let n_max = 30;
    for &q in &[0.5, 0.9, 1.0] {
        for &target in &[0.5, 1.0, 5.0, 10.0, 20.0] {
            for kind in [StateKind::QCoherent, StateKind::QCatEven, StateKind::QCatOdd] {
                // The odd cat cannot go below one photon.
                if kind == StateKind::QCatOdd && target < 1.0 {
                    continue;
                }
                let alpha = solve_amplitude(target, qp(q), kind, n_max).unwrap();
                let mean = photon_moments(&build_state(kind, alpha, qp(q), n_max).unwrap()).mean;
                assert!(
                    (mean - target).abs() <= 2e-9,
                    "kind={kind:?} q={q} target={target}: mean={mean}"
                );
            }
        }
    }
}

#[test]
fn divergent_series_reports_full_tail() {
    // |alpha|^2 = 2.25 >= 1/(1-q) = 2: the untruncated series diverges and
    // the tail estimate degrades to its 1.0 sentinel.
    let s = q_coherent_with(
        Complex64::new(1.5, 0.0),
        qp(0.5),
        30,
        TruncationPolicy::permissive(),
    )
    .unwrap();
    assert_eq!(s.tail_bound, 1.0);
}

#[test]
fn tail_bound_decreases_with_cutoff() {
    let at = |n_max: usize| {
        q_coherent_with(
            Complex64::new(1.0, 0.0),
            qp(0.9),
            n_max,
            TruncationPolicy::permissive(),
        )
        .unwrap()
        .tail_bound
    };
    let (t8, t16, t32) = (at(8), at(16), at(32));
    assert!(t8 > t16 && t16 > t32, "{t8} {t16} {t32}");
    assert!(t32 < 1e-10);
}
