//! Shared oracle machinery for the integration suites. Everything here is
//! deliberately written against different primitives than the library paths
//! it checks: dense eigendecompositions instead of factorial sums, fma-based
//! extended precision instead of the library kernel.

#![allow(dead_code)]

pub mod dd;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use qmzi_core::mzi::TwoModeInput;
use qmzi_core::rng::{run_rng, u01};
use qmzi_core::states::{custom_state, FockAmplitudes};
use qmzi_core::DeformationParameter;

pub fn qp(v: f64) -> DeformationParameter {
    DeformationParameter::new(v).unwrap()
}

/// Wigner d-matrix row by dense eigendecomposition in the spin basis.
///
/// In the ladder basis k = j + m (k = 0..2j), conjugating J_y by diag(i^k)
/// gives the real symmetric tridiagonal T with off-diagonal
/// sqrt((k+1)(2j-k))/2, so
/// d^j_{m',m}(phi) = [conj(i^{k'}) (V e^{-i phi L} V^T)_{k',k} i^k] with
/// k' = j+m', k = j+m; the result is real up to rounding.
pub fn eigen_d_row(two_j: u32, two_mp: i32, phi: f64) -> Vec<f64> {
    let dim = two_j as usize + 1;
    let kp = ((two_j as i32 + two_mp) / 2) as usize;
    let mut t = DMatrix::<f64>::zeros(dim, dim);
    for k in 0..dim - 1 {
        let v = 0.5 * (((k + 1) * (dim - 1 - k)) as f64).sqrt();
        t[(k + 1, k)] = v;
        t[(k, k + 1)] = v;
    }
    let eig = SymmetricEigen::new(t);
    let i_pow = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ];
    (0..dim)
        .map(|k| {
            let mut acc = Complex64::ZERO;
            for r in 0..dim {
                acc += eig.eigenvectors[(kp, r)]
                    * eig.eigenvectors[(k, r)]
                    * Complex64::from_polar(1.0, -phi * eig.eigenvalues[r]);
            }
            (i_pow[kp % 4].conj() * acc * i_pow[k % 4]).re
        })
        .collect()
}

/// Dense two-mode oracle: J_y = (i/2)(b^dag a - a^dag b) on the full
/// (n_max+1)^2 Fock grid, exponentiated once by Hermitian eigendecomposition.
/// Entirely independent of the Wigner-row machinery.
pub struct DenseMzi {
    eig: SymmetricEigen<Complex64, nalgebra::Dyn>,
    jy: DMatrix<Complex64>,
    d: usize,
}

impl DenseMzi {
    pub fn new(n_max: usize) -> Self {
        let d = n_max + 1;
        let dims = d * d;
        let idx = |na: usize, nb: usize| na * d + nb;
        let mut m = DMatrix::<Complex64>::zeros(dims, dims);
        for na in 0..d {
            for nb in 0..d {
                // b^dag a |na,nb> = sqrt(na(nb+1)) |na-1,nb+1>
                if na > 0 && nb + 1 < d {
                    m[(idx(na - 1, nb + 1), idx(na, nb))] +=
                        Complex64::new(0.0, 0.5) * ((na * (nb + 1)) as f64).sqrt();
                }
                // -a^dag b |na,nb> = -sqrt((na+1)nb) |na+1,nb-1>
                if nb > 0 && na + 1 < d {
                    m[(idx(na + 1, nb - 1), idx(na, nb))] -=
                        Complex64::new(0.0, 0.5) * (((na + 1) * nb) as f64).sqrt();
                }
            }
        }
        Self { eig: SymmetricEigen::new(m.clone()), jy: m, d }
    }

    pub fn side(&self) -> usize {
        self.d
    }

    fn psi(&self, input: &TwoModeInput) -> DVector<Complex64> {
        DVector::from_fn(self.d * self.d, |i, _| {
            input.coeff_c(i / self.d) * input.coeff_k(i % self.d)
        })
    }

    /// Output amplitude grid: element na*d+nb is <na,nb|e^{-i phi J_y}|psi>.
    pub fn amplitudes(&self, input: &TwoModeInput, phi: f64) -> DVector<Complex64> {
        let vd = self.eig.eigenvectors.adjoint() * self.psi(input);
        let scaled = DVector::from_fn(vd.len(), |i, _| {
            vd[i] * Complex64::from_polar(1.0, -phi * self.eig.eigenvalues[i])
        });
        &self.eig.eigenvectors * scaled
    }

    /// d/dphi of [`Self::amplitudes`]: -i J_y applied to the output.
    pub fn amplitude_derivatives(
        &self,
        amps: &DVector<Complex64>,
    ) -> DVector<Complex64> {
        (&self.jy * amps) * Complex64::new(0.0, -1.0)
    }

    pub fn prob(&self, amps: &DVector<Complex64>, n1: usize, n2: usize) -> f64 {
        amps[n1 * self.d + n2].norm_sqr()
    }

    /// 4 Var(J_y) on the (truncated) product input.
    pub fn fq(&self, input: &TwoModeInput) -> f64 {
        let psi = self.psi(input);
        let jpsi = &self.jy * &psi;
        let second = jpsi.dotc(&jpsi).re;
        let mean = psi.dotc(&jpsi).re;
        4.0 * (second - mean * mean)
    }

    /// Classical Fisher information with the same amplitude-zero limit rule
    /// as the library: outcomes with p below the floor contribute 4|A'|^2.
    pub fn fc(&self, input: &TwoModeInput, phi: f64) -> f64 {
        let amps = self.amplitudes(input, phi);
        let damps = self.amplitude_derivatives(&amps);
        let mut fc = 0.0;
        for i in 0..amps.len() {
            let p = amps[i].norm_sqr();
            if p < 1e-15 {
                fc += 4.0 * damps[i].norm_sqr();
            } else {
                let dp = 2.0 * (amps[i].conj() * damps[i]).re;
                fc += dp * dp / p;
            }
        }
        fc
    }
}

/// Random normalized custom state on 0..=n_max with complex entries drawn
/// uniformly from the square, via the library's deterministic stream.
pub fn random_state(seed: u64, stream: u64, n_max: usize) -> FockAmplitudes {
    let mut rng = run_rng(seed, stream);
    let v: Vec<Complex64> = (0..=n_max)
        .map(|_| Complex64::new(u01(&mut rng) - 0.5, u01(&mut rng) - 0.5))
        .collect();
    custom_state(v, qp(1.0)).expect("random vector has positive norm")
}
