//! Lorentz-cone model: normalized states are `(1, v)` with `|v| <= 1`.
//!
//! Atomic effects are `(1 + w.v)/2` for unit `w`; every mixed state splits
//! along the diameter through its own direction with probabilities
//! `(1 +- |v|)/2`.

use crate::error::{GptError, Result};
use crate::system::{EffectVec, Face, LinearMapA, Measurement, StateVec, System};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn random_direction(k: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(k, |_, _| rng.sample::<f64, _>(StandardNormal));
        let n = v.norm();
        if n > 1e-9 {
            return v / n;
        }
    }
}

pub fn pure_from_direction(w: &DVector<f64>) -> StateVec {
    let k = w.len();
    let mut coords = DVector::zeros(k + 1);
    coords[0] = 1.0;
    for i in 0..k {
        coords[1 + i] = w[i];
    }
    StateVec::new_unchecked(coords, true)
}

pub fn atom_from_direction(w: &DVector<f64>) -> EffectVec {
    let k = w.len();
    let mut coords = DVector::zeros(k + 1);
    coords[0] = 0.5;
    for i in 0..k {
        coords[1 + i] = 0.5 * w[i];
    }
    EffectVec::new(coords)
}

/// First canonical axis, the deterministic tie-break for the center.
fn axis(k: usize) -> DVector<f64> {
    DVector::from_fn(k, |i, _| if i == 0 { 1.0 } else { 0.0 })
}

/// Antipodal decomposition: probabilities `(1 + r)/2` and `(1 - r)/2` on
/// the boundary points `+- v/r`; the center splits evenly along the first
/// canonical axis.
pub fn decompose(sys: &System, omega: &StateVec) -> Result<Vec<(f64, StateVec)>> {
    let k = sys.dim() - 1;
    let v = omega.coords().rows(1, k).clone_owned();
    let r = v.norm();
    let dir = if r < 1e-13 { axis(k) } else { v / r };
    let p_plus = (1.0 + r) / 2.0;
    let p_minus = (1.0 - r) / 2.0;
    Ok(vec![
        (p_plus, pure_from_direction(&dir)),
        (p_minus, pure_from_direction(&(-dir))),
    ])
}

pub fn spectral_measurement(sys: &System, omega: &StateVec) -> Result<Measurement> {
    let parts = decompose(sys, omega)?;
    let k = sys.dim() - 1;
    let effects = parts
        .iter()
        .map(|(_, s)| atom_from_direction(&s.coords().rows(1, k).clone_owned()))
        .collect();
    Ok(Measurement::new(effects))
}

/// Block rotation `1 (+) R` with `R` drawn from O(k) by QR.
pub fn reversible_sample(k: usize, rng: &mut ChaCha8Rng) -> LinearMapA {
    let a = DMatrix::from_fn(k, k, |_, _| rng.sample::<f64, _>(StandardNormal));
    let q = a.qr().q();
    rotation_map(&q)
}

/// Embed an orthogonal map on the direction part.
pub fn rotation_map(r: &DMatrix<f64>) -> LinearMapA {
    let k = r.nrows();
    let mut m = DMatrix::zeros(k + 1, k + 1);
    m[(0, 0)] = 1.0;
    for i in 0..k {
        for j in 0..k {
            m[(1 + i, 1 + j)] = r[(i, j)];
        }
    }
    LinearMapA::new(m)
}

/// Rank-one filter onto a boundary point, complemented by the antipode.
pub fn filter_pair(sys: &System, w: &DVector<f64>) -> Result<(LinearMapA, LinearMapA, Face)> {
    let make = |dir: &DVector<f64>| {
        let hat = pure_from_direction(dir);
        let tilde = atom_from_direction(dir);
        LinearMapA::new(hat.coords() * tilde.coords().transpose())
    };
    let _ = sys;
    Ok((make(w), make(&-w), Face::BallPoint(-w)))
}

/// Fine-grained measurement: random atoms with a balancing tail so the
/// effects sum to the order unit, rejected until every scalar is <= 1.
pub fn fine_grained_sample(sys: &System, rng: &mut ChaCha8Rng) -> Result<Measurement> {
    let k = sys.dim() - 1;
    'attempt: for _ in 0..256 {
        let count = rng.gen_range(2..=6);
        if count == 2 {
            let w = random_direction(k, rng);
            return Ok(Measurement::new(vec![
                atom_from_direction(&w),
                atom_from_direction(&(-w)),
            ]));
        }
        // draw count-1 weighted directions, close with a balancing term
        let mut dirs: Vec<DVector<f64>> = Vec::new();
        let mut weights: Vec<f64> = Vec::new();
        for _ in 0..count - 1 {
            dirs.push(random_direction(k, rng));
            weights.push(rng.gen::<f64>() + 0.05);
        }
        let mut resid = DVector::zeros(k);
        for (w, c) in dirs.iter().zip(weights.iter()) {
            resid -= w * *c;
        }
        let tail = resid.norm();
        if tail < 1e-9 {
            continue 'attempt;
        }
        dirs.push(resid / tail);
        weights.push(tail);
        // rescale so the scalars sum to 2 (so the effects sum to u)
        let total: f64 = weights.iter().sum();
        for c in &mut weights {
            *c *= 2.0 / total;
            if *c > 1.0 {
                continue 'attempt;
            }
        }
        let effects: Vec<EffectVec> = dirs
            .iter()
            .zip(weights.iter())
            .map(|(w, c)| EffectVec::new(atom_from_direction(w).coords() * *c))
            .collect();
        return Ok(Measurement::new(effects));
    }
    Err(GptError::LpNumericalFailure(
        "rejection sampling of ball measurements stalled".into(),
    ))
}

/// Deterministic direction net for LP validity constraints.
pub fn pure_net(sys: &System, size: usize) -> Vec<nalgebra::DVector<f64>> {
    let k = sys.dim() - 1;
    let mut rng = crate::rng::rng(0xB0_11);
    let mut net = Vec::with_capacity(size + 2 * k);
    for i in 0..k {
        let mut e = DVector::zeros(k);
        e[i] = 1.0;
        net.push(pure_from_direction(&e).coords().clone());
        net.push(pure_from_direction(&(-e)).coords().clone());
    }
    while net.len() < size {
        net.push(pure_from_direction(&random_direction(k, &mut rng)).coords().clone());
    }
    net
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::make_ball;
    use approx::assert_relative_eq;

    #[test]
    fn center_splits_evenly_on_first_axis() {
        let sys = make_ball(3);
        let center = sys
            .state(DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]))
            .unwrap();
        let parts = decompose(&sys, &center).unwrap();
        assert_relative_eq!(parts[0].0, 0.5, epsilon = 1e-15);
        assert_relative_eq!(parts[1].0, 0.5, epsilon = 1e-15);
        assert_relative_eq!(parts[0].1.coords()[1], 1.0, epsilon = 1e-15);
        assert_relative_eq!(parts[1].1.coords()[1], -1.0, epsilon = 1e-15);
    }

    #[test]
    fn off_center_probabilities() {
        let sys = make_ball(3);
        let omega = sys
            .state(DVector::from_vec(vec![1.0, 0.0, 0.0, 0.5]))
            .unwrap();
        let parts = decompose(&sys, &omega).unwrap();
        assert_relative_eq!(parts[0].0, 0.75, epsilon = 1e-15);
        assert_relative_eq!(parts[1].0, 0.25, epsilon = 1e-15);
    }

    #[test]
    fn boundary_state_is_pure_spectrum() {
        let sys = make_ball(2);
        let omega = sys.state(DVector::from_vec(vec![1.0, 0.0, 1.0])).unwrap();
        let parts = decompose(&sys, &omega).unwrap();
        assert_relative_eq!(parts[0].0, 1.0, epsilon = 1e-15);
        assert_relative_eq!(parts[1].0, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn ball_decomposition_example() {
        // v = (0.6, 0): parts 0.8 on (1,1,0) and 0.2 on (1,-1,0)
        let sys = make_ball(2);
        let omega = sys.state(DVector::from_vec(vec![1.0, 0.6, 0.0])).unwrap();
        let parts = decompose(&sys, &omega).unwrap();
        assert_relative_eq!(parts[0].0, 0.8, epsilon = 1e-12);
        assert_relative_eq!(parts[1].0, 0.2, epsilon = 1e-12);
        assert_relative_eq!(parts[0].1.coords()[1], 1.0, epsilon = 1e-12);
        assert_relative_eq!(parts[1].1.coords()[1], -1.0, epsilon = 1e-12);
    }

    #[test]
    fn filters_are_idempotent_and_positive_on_samples() {
        let sys = make_ball(2);
        let w = DVector::from_vec(vec![1.0, 0.0]);
        let (p, pc, _) = filter_pair(&sys, &w).unwrap();
        let diff = (&p.matrix * &p.matrix) - &p.matrix;
        assert!(crate::linalg::max_abs(&diff) < 1e-12);
        let mut rng = crate::rng::rng(3);
        for _ in 0..50 {
            let s = crate::catalog::mixed_sample(&sys, &mut rng);
            let image = p.apply_coords(s.coords());
            assert!(sys.cone_margin(&image) > -1e-10);
            let image_c = pc.apply_coords(s.coords());
            assert!(sys.cone_margin(&image_c) > -1e-10);
        }
    }

    #[test]
    fn fine_grained_sums_to_unit() {
        let sys = make_ball(3);
        let mut rng = crate::rng::rng(17);
        for _ in 0..20 {
            let m = fine_grained_sample(&sys, &mut rng).unwrap();
            let check = sys.is_valid_measurement(&m);
            assert!(check.valid, "diagnostic: {:?}", check.failure);
        }
    }

    #[test]
    fn lorentz_membership_matches_dual_pairing_samples() {
        // the second-order cone is self-dual: membership agrees with
        // nonnegative pairing against sampled cone rays
        let sys = make_ball(3);
        let mut rng = crate::rng::rng(23);
        for _ in 0..100 {
            let x = crate::catalog::mixed_sample(&sys, &mut rng);
            for _ in 0..20 {
                let y = crate::catalog::pure_sample(&sys, &mut rng);
                assert!(x.coords().dot(y.coords()) > -1e-12);
            }
        }
    }
}
