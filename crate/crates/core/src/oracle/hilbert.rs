//! Exact evolution in the full `2^N` Hilbert space, for small chains.
//!
//! Bit `i` of a basis index is spin `i - (N-1)/2`, set when the spin points up.
//! The reference state `|F⟩` has every spin down and the quench is
//! `S_0^+ |F⟩`. The Hamiltonian is real symmetric in this basis and is
//! diagonalized with cyclic Jacobi rotations.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::chain::ChainParams;
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Largest chain accepted by [`full_hilbert_check`].
pub const MAX_SITES: usize = 8;

/// 2×2 reduced density matrix of one spin in the `(↑, ↓)` basis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedDensity<T> {
    pub site: i64,
    pub up_up: T,
    pub down_down: T,
    pub up_down: Complex<T>,
}

impl<T: Real> ReducedDensity<T> {
    pub fn determinant(&self) -> T {
        self.up_up * self.down_down - self.up_down.norm_sqr()
    }

    pub fn off_diagonal(&self) -> T {
        self.up_down.norm()
    }
}

/// Dense real symmetric matrix, row-major.
struct SymMatrix<T> {
    n: usize,
    a: Vec<T>,
}

impl<T: Real> SymMatrix<T> {
    fn at(&self, i: usize, j: usize) -> T {
        self.a[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: T) {
        self.a[i * self.n + j] = v;
    }
}

fn xxz_hamiltonian<T: Real>(params: &ChainParams<T>) -> SymMatrix<T> {
    let n = params.n_sites();
    let dim = 1usize << n;
    let j = params.coupling_j();
    let delta = params.anisotropy_delta();
    let half: T = lit(0.5);
    let mut h = SymMatrix { n: dim, a: vec![T::zero(); dim * dim] };
    for state in 0..dim {
        let mut diag = T::zero();
        for i in 0..n {
            let k = (i + 1) % n;
            let si = (state >> i) & 1;
            let sk = (state >> k) & 1;
            if si != sk {
                // -JΔ (Sz Sz - 1/4) on an anti-aligned bond
                diag = diag + j * delta * half;
                // -J (SxSx + SySy) = -(J/2)(S+S- + S-S+)
                let flipped = state ^ (1 << i) ^ (1 << k);
                h.set(flipped, state, h.at(flipped, state) - j * half);
            }
        }
        h.set(state, state, diag);
    }
    h
}

/// Eigenvalues and column eigenvectors of a real symmetric matrix.
fn jacobi_eigen<T: Real>(mut m: SymMatrix<T>) -> Result<(Vec<T>, SymMatrix<T>)> {
    let n = m.n;
    let mut v = SymMatrix { n, a: vec![T::zero(); n * n] };
    for i in 0..n {
        v.set(i, i, T::one());
    }
    let frob = m.a.iter().fold(T::zero(), |acc, x| acc + *x * *x).sqrt();
    let target = frob * T::epsilon() * lit(0.1);
    for _sweep in 0..64 {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off = off + m.at(p, q) * m.at(p, q);
            }
        }
        if off.sqrt() <= target {
            let evals = (0..n).map(|i| m.at(i, i)).collect();
            return Ok((evals, v));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.at(p, q);
                if apq == T::zero() {
                    continue;
                }
                let app = m.at(p, p);
                let aqq = m.at(q, q);
                let theta = (aqq - app) / (lit::<T>(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m.at(k, p);
                    let akq = m.at(k, q);
                    m.set(k, p, c * akp - s * akq);
                    m.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = m.at(p, k);
                    let aqk = m.at(q, k);
                    m.set(p, k, c * apk - s * aqk);
                    m.set(q, k, s * apk + c * aqk);
                }
                for k in 0..n {
                    let vkp = v.at(k, p);
                    let vkq = v.at(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    Err(Error::InvariantViolation(
        "Jacobi eigensolver did not converge in 64 sweeps".into(),
    ))
}

/// Spectral decomposition of the full XXZ Hamiltonian, reusable across times.
pub struct FullHilbertPropagator<T> {
    params: ChainParams<T>,
    energies: Vec<T>,
    vectors: SymMatrix<T>,
}

impl<T: Real> FullHilbertPropagator<T> {
    pub fn new(params: &ChainParams<T>) -> Result<Self> {
        if params.n_sites() > MAX_SITES {
            return Err(Error::Capability(format!(
                "full Hilbert space evolution supports at most {MAX_SITES} sites, got {}",
                params.n_sites()
            )));
        }
        let (energies, vectors) = jacobi_eigen(xxz_hamiltonian(params))?;
        Ok(Self { params: *params, energies, vectors })
    }

    /// `exp(-iHt/ħ) S_0^+ |F⟩` in the computational basis.
    pub fn state(&self, t: T) -> Vec<Complex<T>> {
        let dim = self.energies.len();
        let start = 1usize << self.params.half_width();
        let mut out = vec![Complex::new(T::zero(), T::zero()); dim];
        for (k, &e) in self.energies.iter().enumerate() {
            let overlap = self.vectors.at(start, k);
            if overlap == T::zero() {
                continue;
            }
            let phase = -(e * t / self.params.hbar());
            let coeff = Complex::new(phase.cos(), phase.sin()) * overlap;
            for (i, o) in out.iter_mut().enumerate() {
                *o = *o + coeff * self.vectors.at(i, k);
            }
        }
        out
    }

    /// Reduced density matrices of every spin, ordered by site.
    pub fn reduced_densities(&self, t: T) -> Vec<ReducedDensity<T>> {
        let psi = self.state(t);
        let h = self.params.half_width();
        self.params
            .site_range()
            .map(|site| {
                let bit = 1usize << (site + h);
                let mut up = T::zero();
                let mut down = T::zero();
                let mut coh = Complex::new(T::zero(), T::zero());
                for (i, amp) in psi.iter().enumerate() {
                    if i & bit != 0 {
                        up = up + amp.norm_sqr();
                        coh = coh + amp * psi[i ^ bit].conj();
                    } else {
                        down = down + amp.norm_sqr();
                    }
                }
                ReducedDensity { site, up_up: up, down_down: down, up_down: coh }
            })
            .collect()
    }
}

/// Per-spin reduced density matrices after evolving the quenched state in the
/// unrestricted `2^N` space.
pub fn full_hilbert_check<T: Real>(params: &ChainParams<T>, t: T) -> Result<Vec<ReducedDensity<T>>> {
    if !(t.is_finite() && t >= T::zero()) {
        return Err(Error::Validation(format!("time must be finite and non-negative, got {t}")));
    }
    Ok(FullHilbertPropagator::new(params)?.reduced_densities(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::amplitude;
    use crate::oracle::entanglement_from_amplitude;

    #[test]
    fn rejects_large_chains() {
        let p = ChainParams::<f64>::unit(9, 0.0).unwrap();
        assert!(matches!(full_hilbert_check(&p, 1.0), Err(Error::Capability(_))));
    }

    #[test]
    fn initial_state_is_unentangled() {
        let p = ChainParams::<f64>::unit(7, 0.5).unwrap();
        for rho in full_hilbert_check(&p, 0.0).unwrap() {
            assert!(rho.off_diagonal() < 1e-14);
            assert!(rho.determinant().abs() < 1e-14);
        }
    }

    #[test]
    fn agrees_with_one_magnon_closed_form() {
        let p = ChainParams::<f64>::unit(7, 1.0).unwrap();
        let rhos = full_hilbert_check(&p, 1.3).unwrap();
        for rho in rhos {
            assert!(rho.off_diagonal() <= 1e-10);
            let c = amplitude(&p, rho.site, 1.3).unwrap();
            let q = entanglement_from_amplitude(c).unwrap();
            assert!((rho.determinant() - q).abs() <= 1e-8, "site {}", rho.site);
        }
    }

    #[test]
    fn ferromagnetic_state_has_zero_energy() {
        let p = ChainParams::<f64>::unit(5, 0.7).unwrap();
        let h = xxz_hamiltonian(&p);
        assert_eq!(h.at(0, 0), 0.0);
        assert_eq!(h.at(31, 31), 0.0);
        // one magnon: two anti-aligned bonds, energy JΔ
        assert!((h.at(1, 1) - 0.7).abs() < 1e-15);
    }
}
