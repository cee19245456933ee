//! Wigner small d-matrix elements d^j_{m',m}(phi) and their phi derivatives
//! for integer and half-integer j.
//!
//! Convention: d^j_{m',m}(phi) = <j,m'| exp(-i phi J_y) |j,m>, evaluated by
//! the explicit factorial sum. Indices are carried doubled (two_j = 2j, ...)
//! so half-integers never touch floating point.
//!
//! Terms of the sum reach ~4^j/sqrt(j) while the result stays in [-1, 1];
//! the cancellation at j = 30 wipes out eight digits, so terms and the
//! accumulator use double-double arithmetic ([`crate::dd`]) and only the
//! final element is rounded to f64. Factorial prefactors are hoisted into
//! prepared per-element term lists ([`PreparedRow`]) so sweeps over phi pay
//! only for powers of cos and sin.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::dd::Dd;
use crate::error::{Error, Result};

/// Largest supported two_j. Factorial ratios stay below ~1e199 here, inside
/// the safe range of the Dekker split used by [`crate::dd`].
pub const TWO_J_MAX: u32 = 120;

/// Validated (j, m', m) triple in doubled-integer encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpinIndex {
    two_j: u32,
    two_mp: i32,
    two_m: i32,
}

impl SpinIndex {
    /// Requires |two_mp| <= two_j, |two_m| <= two_j, and both sharing the
    /// parity of two_j (m, m' run over -j..j in integer steps).
    pub fn new(two_j: u32, two_mp: i32, two_m: i32) -> Result<Self> {
        if two_j > TWO_J_MAX {
            return Err(Error::SpinTooLarge { two_j, max: TWO_J_MAX });
        }
        let j = two_j as i32;
        let in_range = |v: i32| v.abs() <= j && (v - j) % 2 == 0;
        if !in_range(two_mp) || !in_range(two_m) {
            return Err(Error::InvalidSpinIndex {
                two_j,
                two_mp: two_mp as i64,
                two_m: two_m as i64,
            });
        }
        Ok(Self { two_j, two_mp, two_m })
    }

    pub fn two_j(&self) -> u32 {
        self.two_j
    }

    pub fn two_mp(&self) -> i32 {
        self.two_mp
    }

    pub fn two_m(&self) -> i32 {
        self.two_m
    }
}

/// Double-double factorials 0! ..= TWO_J_MAX!.
fn fac_dd(n: u32) -> Dd {
    static TABLE: OnceLock<Vec<Dd>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(TWO_J_MAX as usize + 1);
        t.push(Dd::ONE);
        for k in 1..=TWO_J_MAX {
            let prev = *t.last().expect("nonempty");
            t.push(prev.mul_f64(k as f64));
        }
        t
    });
    table[n as usize]
}

/// Product of the integers lo+1 ..= hi, i.e. hi!/lo!; empty product is 1.
fn rising_product(lo: u32, hi: u32) -> Dd {
    let mut p = Dd::ONE;
    for k in (lo + 1)..=hi {
        p = p.mul_f64(k as f64);
    }
    p
}

/// One monomial of the d-matrix sum: coeff * cos(phi/2)^p_cos * sin(phi/2)^p_sin.
#[derive(Clone, Copy, Debug)]
struct Term {
    coeff: Dd,
    p_cos: u32,
    p_sin: u32,
}

/// Factorial sum for one element, as prepared terms. The sum index s runs
/// over max(0, m - m') ..= min(j + m, j - m'); the leading coefficient is a
/// square root of factorial ratios and consecutive coefficients follow a
/// small-integer recurrence, so no intermediate exceeds hi!/lo! magnitudes.
fn build_terms(idx: SpinIndex) -> Vec<Term> {
    let jm = (idx.two_j as i32 + idx.two_m) / 2; // j + m
    let jmm = (idx.two_j as i32 - idx.two_m) / 2; // j - m
    let jmp = (idx.two_j as i32 + idx.two_mp) / 2; // j + m'
    let jmmp = (idx.two_j as i32 - idx.two_mp) / 2; // j - m'
    let k = (idx.two_mp - idx.two_m) / 2; // m' - m

    let s0 = 0.max(-k);
    let s1 = jm.min(jmmp);
    debug_assert!(s0 <= s1, "valid SpinIndex always yields at least one term");

    let mut coeff = if k >= 0 {
        let r = rising_product(jm as u32, jmp as u32)
            .sqrt()
            .mul(rising_product(jmmp as u32, jmm as u32).sqrt())
            .div(fac_dd(k as u32));
        if k % 2 == 0 {
            r
        } else {
            r.neg()
        }
    } else {
        rising_product(jmp as u32, jm as u32)
            .sqrt()
            .mul(rising_product(jmm as u32, jmmp as u32).sqrt())
            .div(fac_dd((-k) as u32))
    };

    let mut terms = Vec::with_capacity((s1 - s0 + 1) as usize);
    for s in s0..=s1 {
        terms.push(Term {
            coeff,
            p_cos: ((jm - s) + (jmmp - s)) as u32,
            p_sin: (s + (k + s)) as u32,
        });
        if s < s1 {
            let num = ((jm - s) * (jmmp - s)) as f64;
            let den = ((s + 1) * (k + s + 1)) as f64;
            coeff = coeff.mul_f64(-num).div_f64(den);
        }
    }
    terms
}

/// cos and sin of the half angle, with phi reduced modulo 4*pi first
/// (d-matrices for half-integer j are 4*pi-periodic).
fn half_angle(phi: f64) -> (f64, f64) {
    let h = 0.5 * phi.rem_euclid(4.0 * PI);
    (h.cos(), h.sin())
}

/// Double-double power tables c^0..c^max, s^0..s^max for one evaluation.
fn power_tables(c: f64, s: f64, max_pow: u32) -> (Vec<Dd>, Vec<Dd>) {
    let n = max_pow as usize + 1;
    let mut ctab = Vec::with_capacity(n);
    let mut stab = Vec::with_capacity(n);
    ctab.push(Dd::ONE);
    stab.push(Dd::ONE);
    for p in 1..n {
        ctab.push(ctab[p - 1].mul_f64(c));
        stab.push(stab[p - 1].mul_f64(s));
    }
    (ctab, stab)
}

fn eval_terms(terms: &[Term], ctab: &[Dd], stab: &[Dd]) -> f64 {
    let mut sum = Dd::ZERO;
    for t in terms {
        sum = sum.add(t.coeff.mul(ctab[t.p_cos as usize].mul(stab[t.p_sin as usize])));
    }
    sum.to_f64()
}

/// A full row d^j_{m', .}(phi) with factorial prefactors precomputed, for
/// amortized evaluation across many phi values.
#[derive(Clone, Debug)]
pub struct PreparedRow {
    two_j: u32,
    two_mp: i32,
    /// elements[k] is the element at two_m = 2k - two_j (m ascending).
    elements: Vec<Vec<Term>>,
}

impl PreparedRow {
    pub fn new(two_j: u32, two_mp: i32) -> Result<Self> {
        let elements = (0..=two_j)
            .map(|kk| {
                let two_m = 2 * kk as i32 - two_j as i32;
                Ok(build_terms(SpinIndex::new(two_j, two_mp, two_m)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { two_j, two_mp, elements })
    }

    pub fn two_j(&self) -> u32 {
        self.two_j
    }

    pub fn two_mp(&self) -> i32 {
        self.two_mp
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Evaluate the row at one phi, ascending in m. `out` is cleared first.
    pub fn eval_into(&self, phi: f64, out: &mut Vec<f64>) {
        let (c, s) = half_angle(phi);
        let (ctab, stab) = power_tables(c, s, self.two_j);
        out.clear();
        out.extend(self.elements.iter().map(|t| eval_terms(t, &ctab, &stab)));
    }

    pub fn eval(&self, phi: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.elements.len());
        self.eval_into(phi, &mut out);
        out
    }
}

/// d^j_{m',m}(phi) for a single validated index.
pub fn wigner_d(idx: SpinIndex, phi: f64) -> f64 {
    let terms = build_terms(idx);
    let (c, s) = half_angle(phi);
    let max_pow = terms
        .iter()
        .map(|t| t.p_cos.max(t.p_sin))
        .max()
        .unwrap_or(0);
    let (ctab, stab) = power_tables(c, s, max_pow);
    eval_terms(&terms, &ctab, &stab)
}

/// The row d^j_{m', .}(phi) over m = -j ..= j ascending.
pub fn wigner_d_row(two_j: u32, two_mp: i32, phi: f64) -> Result<Vec<f64>> {
    Ok(PreparedRow::new(two_j, two_mp)?.eval(phi))
}

/// Ladder coefficient c_plus(m) = sqrt((j - m)(j + m + 1)), doubled encoding.
fn c_plus(two_j: u32, two_m: i32) -> f64 {
    let a = (two_j as i32 - two_m) as f64;
    let b = (two_j as i32 + two_m + 2) as f64;
    0.5 * (a * b).sqrt()
}

/// Ladder coefficient c_minus(m) = sqrt((j + m)(j - m + 1)), doubled encoding.
fn c_minus(two_j: u32, two_m: i32) -> f64 {
    let a = (two_j as i32 + two_m) as f64;
    let b = (two_j as i32 - two_m + 2) as f64;
    0.5 * (a * b).sqrt()
}

/// d/dphi of d^j_{m',m}(phi), via the ladder recurrence
/// d' = (c_minus(m) d_{m',m-1} - c_plus(m) d_{m',m+1}) / 2.
pub fn wigner_d_derivative(idx: SpinIndex, phi: f64) -> f64 {
    let cm = c_minus(idx.two_j, idx.two_m);
    let cp = c_plus(idx.two_j, idx.two_m);
    let mut d = 0.0;
    if cm != 0.0 {
        let lower = SpinIndex::new(idx.two_j, idx.two_mp, idx.two_m - 2)
            .expect("m - 1 is in range whenever c_minus(m) != 0");
        d += 0.5 * cm * wigner_d(lower, phi);
    }
    if cp != 0.0 {
        let upper = SpinIndex::new(idx.two_j, idx.two_mp, idx.two_m + 2)
            .expect("m + 1 is in range whenever c_plus(m) != 0");
        d -= 0.5 * cp * wigner_d(upper, phi);
    }
    d
}

/// Derivative of a whole row from its evaluated values: out[k] combines the
/// neighbors of row[k] with the ladder coefficients. Boundary neighbors have
/// zero coefficient, so nothing is read out of range.
pub fn derivative_row(two_j: u32, row: &[f64]) -> Vec<f64> {
    assert_eq!(row.len(), two_j as usize + 1, "row length must be 2j + 1");
    (0..row.len())
        .map(|k| {
            let two_m = 2 * k as i32 - two_j as i32;
            let cm = c_minus(two_j, two_m);
            let cp = c_plus(two_j, two_m);
            let lower = if k > 0 { cm * row[k - 1] } else { 0.0 };
            let upper = if k + 1 < row.len() { cp * row[k + 1] } else { 0.0 };
            0.5 * (lower - upper)
        })
        .collect()
}
