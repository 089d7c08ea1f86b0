//! Quantum model: real coordinates on the space of Hermitian d x d matrices.
//!
//! Coordinates are taken against an orthonormal (trace form) Hermitian
//! basis: the diagonal units E_ii, then for each i < j the pair
//! (E_ij + E_ji)/sqrt(2) and i(E_ij - E_ji)/sqrt(2). With this choice the
//! dual pairing of effect and state coordinates is exactly Tr(E rho).

use crate::error::{GptError, Result};
use crate::linalg;
use crate::system::{EffectVec, Face, LinearMapA, Measurement, StateVec, System};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const C0: Complex64 = Complex64::new(0.0, 0.0);

/// Orthonormal Hermitian basis of the d x d matrices.
#[derive(Debug, Clone)]
pub struct HermBasis {
    d: usize,
    mats: Vec<DMatrix<Complex64>>,
}

impl HermBasis {
    pub fn new(d: usize) -> Self {
        let mut mats = Vec::with_capacity(d * d);
        for i in 0..d {
            let mut m = DMatrix::from_element(d, d, C0);
            m[(i, i)] = Complex64::new(1.0, 0.0);
            mats.push(m);
        }
        let s = 1.0 / 2.0_f64.sqrt();
        for i in 0..d {
            for j in (i + 1)..d {
                let mut re = DMatrix::from_element(d, d, C0);
                re[(i, j)] = Complex64::new(s, 0.0);
                re[(j, i)] = Complex64::new(s, 0.0);
                mats.push(re);
                let mut im = DMatrix::from_element(d, d, C0);
                im[(i, j)] = Complex64::new(0.0, s);
                im[(j, i)] = Complex64::new(0.0, -s);
                mats.push(im);
            }
        }
        Self { d, mats }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Real coordinates of a Hermitian matrix: Re Tr(X B_k).
    pub fn coords_of(&self, x: &DMatrix<Complex64>) -> DVector<f64> {
        DVector::from_iterator(
            self.mats.len(),
            self.mats.iter().map(|b| {
                let mut tr = C0;
                for i in 0..self.d {
                    for j in 0..self.d {
                        tr += x[(i, j)] * b[(j, i)];
                    }
                }
                tr.re
            }),
        )
    }

    /// Hermitian matrix with the given coordinates.
    pub fn matrix_of(&self, coords: &DVector<f64>) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_element(self.d, self.d, C0);
        for (k, b) in self.mats.iter().enumerate() {
            let c = Complex64::new(coords[k], 0.0);
            m += b * c;
        }
        m
    }
}

/// Projector |psi><psi| for a unit ket.
fn projector(ket: &DVector<Complex64>) -> DMatrix<Complex64> {
    ket * ket.adjoint()
}

fn random_ket(d: usize, rng: &mut ChaCha8Rng) -> DVector<Complex64> {
    let v = DVector::from_fn(d, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}

/// Haar-style random unitary: QR of a complex Gaussian matrix with the
/// phases of the R diagonal absorbed into Q.
pub fn random_unitary(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let a = DMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = a.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / Complex64::new(rjj.norm(), 0.0)
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, j)] *= phase.conj();
        }
    }
    q
}

pub fn cone_margin(sys: &System, x: &DVector<f64>) -> f64 {
    let m = sys.herm().matrix_of(x);
    let eig = m.symmetric_eigen();
    eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

pub fn effect_margins(sys: &System, e: &EffectVec) -> (f64, f64) {
    let m = sys.herm().matrix_of(e.coords());
    let eig = m.symmetric_eigen();
    let lo = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    (lo, 1.0 - hi)
}

pub fn pure_sample(sys: &System, rng: &mut ChaCha8Rng) -> StateVec {
    let basis = sys.herm();
    let ket = random_ket(basis.d(), rng);
    StateVec::new_unchecked(basis.coords_of(&projector(&ket)), true)
}

/// Random full-rank density matrix (Hilbert-Schmidt style: G G* / Tr).
pub fn mixed_sample(sys: &System, rng: &mut ChaCha8Rng) -> StateVec {
    let basis = sys.herm();
    let d = basis.d();
    let g = DMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let rho = &g * g.adjoint();
    let tr: f64 = (0..d).map(|i| rho[(i, i)].re).sum();
    let rho = rho / Complex64::new(tr, 0.0);
    StateVec::new_unchecked(basis.coords_of(&rho), true)
}

/// Real matrix of the coordinate action of X -> U X U*.
pub fn unitary_to_map(sys: &System, u: &DMatrix<Complex64>) -> LinearMapA {
    let basis = sys.herm();
    let dim = sys.dim();
    let cols: Vec<DVector<f64>> = (0..dim)
        .map(|k| {
            let mut coords = DVector::zeros(dim);
            coords[k] = 1.0;
            let b = basis.matrix_of(&coords);
            basis.coords_of(&(u * b * u.adjoint()))
        })
        .collect();
    LinearMapA::new(DMatrix::from_columns(&cols))
}

pub fn reversible_sample(sys: &System, rng: &mut ChaCha8Rng) -> LinearMapA {
    let u = random_unitary(sys.herm().d(), rng);
    unitary_to_map(sys, &u)
}

/// Eigendecomposition of the state: all d parts, eigenvalues descending,
/// tiny negatives clamped to zero. Within a degenerate eigenvalue the
/// eigenvectors are whatever the solver produced, deterministically.
pub fn decompose(sys: &System, omega: &StateVec) -> Result<Vec<(f64, StateVec)>> {
    let basis = sys.herm();
    let rho = basis.matrix_of(omega.coords());
    let eig = rho.symmetric_eigen();
    let d = basis.d();
    let mut parts: Vec<(f64, StateVec)> = (0..d)
        .map(|i| {
            let p = eig.eigenvalues[i].max(0.0);
            let ket = eig.eigenvectors.column(i).clone_owned();
            let coords = basis.coords_of(&projector(&ket));
            (p, StateVec::new_unchecked(coords, true))
        })
        .collect();
    parts.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    Ok(parts)
}

/// Rank-one measurement along the eigenbasis of the state.
pub fn spectral_measurement(sys: &System, omega: &StateVec) -> Result<Measurement> {
    let parts = decompose(sys, omega)?;
    Ok(Measurement::new(
        parts
            .into_iter()
            .map(|(_, s)| EffectVec::new(s.coords().clone()))
            .collect(),
    ))
}

pub fn is_pure(sys: &System, omega: &StateVec) -> bool {
    let rho = sys.herm().matrix_of(omega.coords());
    let eig = rho.symmetric_eigen();
    let t = sys.tolerances().lp;
    let top = eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let rest: f64 = eig.eigenvalues.iter().map(|l| l.abs()).sum::<f64>() - top.abs();
    (top - 1.0).abs() <= t && rest <= t * sys.herm().d() as f64
}

pub fn is_atomic(sys: &System, e: &EffectVec) -> bool {
    // atomic effects are rank-one projectors
    is_pure(sys, &StateVec::new_unchecked(e.coords().clone(), true))
}

/// Pure state extremizing the effect: eigenvector of the extreme eigenvalue.
pub fn extremal_state_for(sys: &System, e: &EffectVec, maximize: bool) -> StateVec {
    let basis = sys.herm();
    let m = basis.matrix_of(e.coords());
    let eig = m.symmetric_eigen();
    let mut pick = 0;
    for i in 1..eig.eigenvalues.len() {
        let better = if maximize {
            eig.eigenvalues[i] > eig.eigenvalues[pick]
        } else {
            eig.eigenvalues[i] < eig.eigenvalues[pick]
        };
        if better {
            pick = i;
        }
    }
    let ket = eig.eigenvectors.column(pick).clone_owned();
    StateVec::new_unchecked(basis.coords_of(&projector(&ket)), true)
}

/// Deterministic pure-state net for LP validity constraints.
pub fn pure_net(sys: &System, size: usize) -> Vec<DVector<f64>> {
    let mut rng = crate::rng::rng(0x51_AD_4E_7);
    let basis = sys.herm();
    let d = basis.d();
    let mut net = Vec::with_capacity(size + d);
    // include the computational basis
    for i in 0..d {
        let mut ket = DVector::from_element(d, C0);
        ket[i] = Complex64::new(1.0, 0.0);
        net.push(basis.coords_of(&projector(&ket)));
    }
    while net.len() < size {
        let ket = random_ket(d, &mut rng);
        net.push(basis.coords_of(&projector(&ket)));
    }
    net
}

/// Random rank-one POVM with k outcomes: Gram-symmetrized kets
/// E_i = G^{-1/2} |psi_i><psi_i| G^{-1/2}, G = sum |psi_i><psi_i|.
pub fn fine_grained_sample(sys: &System, rng: &mut ChaCha8Rng) -> Result<Measurement> {
    let basis = sys.herm();
    let d = basis.d();
    for _attempt in 0..32 {
        let k = rng.gen_range(d..=2 * d + 1);
        let kets: Vec<DVector<Complex64>> = (0..k).map(|_| random_ket(d, rng)).collect();
        let mut gram = DMatrix::from_element(d, d, C0);
        for ket in &kets {
            gram += projector(ket);
        }
        let eig = gram.symmetric_eigen();
        let min_eig = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_eig < 1e-6 {
            continue;
        }
        // G^{-1/2}
        let mut inv_sqrt = DMatrix::from_element(d, d, C0);
        for i in 0..d {
            let col = eig.eigenvectors.column(i).clone_owned();
            let scale = Complex64::new(1.0 / eig.eigenvalues[i].sqrt(), 0.0);
            inv_sqrt += projector(&col) * scale;
        }
        let effects: Vec<EffectVec> = kets
            .iter()
            .map(|ket| {
                let e = &inv_sqrt * projector(ket) * &inv_sqrt;
                EffectVec::new(basis.coords_of(&e))
            })
            .collect();
        return Ok(Measurement::new(effects));
    }
    Err(GptError::LpNumericalFailure(
        "could not draw a nonsingular ket family".into(),
    ))
}

pub fn face_of(sys: &System, omega: &StateVec) -> Result<Face> {
    let basis = sys.herm();
    let rho = basis.matrix_of(omega.coords());
    let eig = rho.symmetric_eigen();
    let t = sys.tolerances().lp;
    let d = basis.d();
    let mut q = DMatrix::from_element(d, d, C0);
    let mut rank = 0;
    for i in 0..d {
        if eig.eigenvalues[i] > t {
            let ket = eig.eigenvectors.column(i).clone_owned();
            q += projector(&ket);
            rank += 1;
        }
    }
    Ok(if rank == d {
        Face::Full
    } else if rank == 0 {
        Face::Empty
    } else {
        Face::Quantum(q)
    })
}

/// Filter X -> Q X Q with complement X -> (1-Q) X (1-Q).
pub fn filter_pair(sys: &System, q: &DMatrix<Complex64>) -> Result<(LinearMapA, LinearMapA, Face)> {
    let basis = sys.herm();
    let d = basis.d();
    let dim = sys.dim();
    let qc = DMatrix::identity(d, d).map(|x| Complex64::new(x, 0.0)) - q;
    let compress = |proj: &DMatrix<Complex64>| {
        let cols: Vec<DVector<f64>> = (0..dim)
            .map(|k| {
                let mut coords = DVector::zeros(dim);
                coords[k] = 1.0;
                let b = basis.matrix_of(&coords);
                basis.coords_of(&(proj * b * proj))
            })
            .collect();
        LinearMapA::new(DMatrix::from_columns(&cols))
    };
    Ok((compress(q), compress(&qc), Face::Quantum(qc)))
}

/// Random rank-r projector.
pub fn random_projector(sys: &System, rank: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let d = sys.herm().d();
    assert!(rank <= d);
    let a = DMatrix::from_fn(d, rank, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let q = a.qr().q();
    let mut proj = DMatrix::from_element(d, d, C0);
    for j in 0..rank {
        let col = q.column(j).clone_owned();
        proj += projector(&col);
    }
    proj
}

/// Unitary taking one pure state to another.
pub fn reversible_to(sys: &System, from: &StateVec, to: &StateVec) -> Result<LinearMapA> {
    let basis = sys.herm();
    let ket_of = |s: &StateVec| -> DVector<Complex64> {
        let rho = basis.matrix_of(s.coords());
        let eig = rho.symmetric_eigen();
        let mut pick = 0;
        for i in 1..eig.eigenvalues.len() {
            if eig.eigenvalues[i] > eig.eigenvalues[pick] {
                pick = i;
            }
        }
        eig.eigenvectors.column(pick).clone_owned()
    };
    let bf = linalg::complete_unitary(&ket_of(from));
    let bt = linalg::complete_unitary(&ket_of(to));
    let u = bt * bf.adjoint();
    Ok(unitary_to_map(sys, &u))
}

/// State with the given diagonal entries in the computational basis.
pub fn diagonal_state(sys: &System, diag: &[f64]) -> StateVec {
    let basis = sys.herm();
    let d = basis.d();
    assert_eq!(diag.len(), d);
    let mut m = DMatrix::from_element(d, d, C0);
    for i in 0..d {
        m[(i, i)] = Complex64::new(diag[i], 0.0);
    }
    StateVec::new_unchecked(basis.coords_of(&m), true)
}

/// Effect given by a Hermitian operator.
pub fn effect_from_operator(sys: &System, op: &DMatrix<Complex64>) -> EffectVec {
    EffectVec::new(sys.herm().coords_of(op))
}

/// Pure state from an explicit ket (normalized internally).
pub fn pure_from_ket(sys: &System, ket: &[Complex64]) -> StateVec {
    let v = DVector::from_iterator(ket.len(), ket.iter().copied());
    let n = v.norm();
    let v = v / Complex64::new(n, 0.0);
    StateVec::new_unchecked(sys.herm().coords_of(&projector(&v)), true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::make_quantum;
    use approx::assert_relative_eq;

    #[test]
    fn basis_is_orthonormal() {
        let basis = HermBasis::new(3);
        for (i, a) in basis.mats.iter().enumerate() {
            for (j, b) in basis.mats.iter().enumerate() {
                let mut tr = C0;
                for r in 0..3 {
                    for c in 0..3 {
                        tr += a[(r, c)] * b[(c, r)];
                    }
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(tr.re, expect, epsilon = 1e-12);
                assert_relative_eq!(tr.im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn coords_round_trip() {
        let sys = make_quantum(2);
        let mut rng = crate::rng::rng(11);
        let s = pure_sample(&sys, &mut rng);
        let m = sys.herm().matrix_of(s.coords());
        let back = sys.herm().coords_of(&m);
        assert_relative_eq!((back - s.coords()).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn pairing_is_trace_form() {
        let sys = make_quantum(2);
        let rho = diagonal_state(&sys, &[0.75, 0.25]);
        // effect = |0><0|
        let ket0 = pure_from_ket(&sys, &[Complex64::new(1.0, 0.0), C0]);
        let e = EffectVec::new(ket0.coords().clone());
        assert_relative_eq!(sys.evaluate(&e, &rho).unwrap(), 0.75, epsilon = 1e-12);
    }

    #[test]
    fn decompose_diagonal_state() {
        let sys = make_quantum(2);
        let rho = diagonal_state(&sys, &[0.75, 0.25]);
        let parts = decompose(&sys, &rho).unwrap();
        assert_relative_eq!(parts[0].0, 0.75, epsilon = 1e-12);
        assert_relative_eq!(parts[1].0, 0.25, epsilon = 1e-12);
    }

    #[test]
    fn unitary_conjugation_preserves_eigenvalues() {
        let sys = make_quantum(2);
        let rho = diagonal_state(&sys, &[0.75, 0.25]);
        let mut rng = crate::rng::rng(5);
        let t = reversible_sample(&sys, &mut rng);
        let image = sys.apply_map(&t, &rho).unwrap();
        let before: Vec<f64> = decompose(&sys, &rho).unwrap().iter().map(|p| p.0).collect();
        let after: Vec<f64> = decompose(&sys, &image).unwrap().iter().map(|p| p.0).collect();
        for (x, y) in before.iter().zip(after.iter()) {
            assert_relative_eq!(x, y, epsilon = 1e-9);
        }
    }

    #[test]
    fn filter_is_idempotent() {
        let sys = make_quantum(3);
        let mut rng = crate::rng::rng(9);
        let q = random_projector(&sys, 2, &mut rng);
        let (p, _, _) = filter_pair(&sys, &q).unwrap();
        let diff = (&p.matrix * &p.matrix) - &p.matrix;
        assert!(crate::linalg::max_abs(&diff) < 1e-10);
    }

    #[test]
    fn povm_sums_to_identity() {
        let sys = make_quantum(2);
        let mut rng = crate::rng::rng(13);
        let m = fine_grained_sample(&sys, &mut rng).unwrap();
        let check = sys.is_valid_measurement(&m);
        assert!(check.valid, "sum deviation {}", check.sum_deviation);
    }

    #[test]
    fn nonorthogonal_pair_is_not_distinguishable() {
        let sys = make_quantum(2);
        let zero = pure_from_ket(&sys, &[Complex64::new(1.0, 0.0), C0]);
        let plus = pure_from_ket(
            &sys,
            &[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)],
        );
        // overlap bound: any effect that is 1 on |0> has value >= |<0|+>|^2
        // on |+>, and that overlap is strictly positive
        let overlap = sys.pairing(&EffectVec::new(zero.coords().clone()), &plus);
        assert!(overlap > 0.4);
        let res = sys.perfectly_distinguishable(&[zero, plus]).unwrap();
        assert!(res.is_none());
    }

    #[test]
    fn orthogonal_pair_is_distinguishable() {
        let sys = make_quantum(2);
        let zero = pure_from_ket(&sys, &[Complex64::new(1.0, 0.0), C0]);
        let one = pure_from_ket(&sys, &[C0, Complex64::new(1.0, 0.0)]);
        let m = sys.perfectly_distinguishable(&[zero, one]).unwrap();
        assert!(m.is_some());
        assert!(sys.is_valid_measurement(&m.unwrap()).valid);
    }
}
