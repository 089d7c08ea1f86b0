//! Strictly convex planar model parametrized by its support function.
//!
//! The boundary point with outward normal `n(theta) = (cos t, sin t)` is
//! `p(t) = h(t) n(t) + h'(t) n'(t)`. We use
//!
//! `h(t) = sqrt(a^2 cos^2 t + b^2 sin^2 t) + tau cos(3t)`, `tau = (a-b)/24`.
//!
//! At `a == b` this is the circle of radius `a`. For `a != b` the
//! third-harmonic term breaks central symmetry (a pure translation would
//! only add first harmonics), so the body is a smooth, strictly convex
//! "puffed triangle" shape: two boundary points are perfectly
//! distinguishable exactly when their tangents are parallel, and through a
//! generic interior state run several such chords with different splitting
//! ratios. The coefficient keeps the curvature radius `h + h''` positive
//! for the axis ratios used here (it is checked at construction).
//!
//! Decomposition chords are found by scanning the diameter angle on a grid
//! (default 10^4 points) with bisection polishing.

use crate::error::{GptError, Result};
use crate::system::{EffectVec, Face, LinearMapA, Measurement, StateVec, System};
use nalgebra::{DMatrix, DVector, Vector2};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};

#[derive(Debug, Clone)]
pub struct EggShape {
    a: f64,
    b: f64,
    tau: f64,
    /// Diameter-scan resolution over half a turn.
    pub chord_grid: usize,
}

impl EggShape {
    pub fn new(a: f64, b: f64) -> Self {
        // the third harmonic subtracts up to 8*tau from the curvature
        // radius h + h'', whose ellipse part bottoms out at min(b^2/a, a^2/b);
        // the clamp keeps the body strictly convex for any axis pair
        let r_min = (b * b / a).min(a * a / b);
        let tau = (a - b).signum() * ((a - b).abs() / 18.0).min(r_min / 9.0);
        let shape = Self {
            a,
            b,
            tau,
            chord_grid: 10_000,
        };
        debug_assert!(shape.min_curvature_radius() > 0.0, "shape must stay convex");
        shape
    }

    /// Support function.
    pub fn h(&self, t: f64) -> f64 {
        let (s, c) = t.sin_cos();
        (self.a * self.a * c * c + self.b * self.b * s * s).sqrt() + self.tau * (3.0 * t).cos()
    }

    /// Derivative of the support function.
    pub fn dh(&self, t: f64) -> f64 {
        let (s, c) = t.sin_cos();
        let q = (self.a * self.a * c * c + self.b * self.b * s * s).sqrt();
        (self.b * self.b - self.a * self.a) * s * c / q - 3.0 * self.tau * (3.0 * t).sin()
    }

    /// Boundary point with outward normal angle `t`.
    pub fn boundary(&self, t: f64) -> Vector2<f64> {
        let (s, c) = t.sin_cos();
        let n = Vector2::new(c, s);
        let n_perp = Vector2::new(-s, c);
        n * self.h(t) + n_perp * self.dh(t)
    }

    fn min_curvature_radius(&self) -> f64 {
        let mut min = f64::INFINITY;
        for i in 0..720 {
            let t = TAU * i as f64 / 720.0;
            // h + h'' by central difference on h'
            let eps = 1e-5;
            let h2 = (self.dh(t + eps) - self.dh(t - eps)) / (2.0 * eps);
            min = min.min(self.h(t) + h2);
        }
        min
    }

    /// Maximum of `n(t).x - h(t)`; nonpositive iff `x` is in the body.
    /// Returns the maximizing angle too.
    pub fn support_violation(&self, x: &Vector2<f64>) -> (f64, f64) {
        let f = |t: f64| t.cos() * x.x + t.sin() * x.y - self.h(t);
        maximize_periodic(f)
    }
}

/// Maximize a smooth 2-pi-periodic function: coarse net then golden-section
/// polish around the best cell. Returns (argmax, max).
fn maximize_periodic<F: Fn(f64) -> f64>(f: F) -> (f64, f64) {
    const NET: usize = 256;
    let mut best_i = 0;
    let mut best = f64::NEG_INFINITY;
    for i in 0..NET {
        let t = TAU * i as f64 / NET as f64;
        let v = f(t);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let step = TAU / NET as f64;
    let mut lo = TAU * best_i as f64 / NET as f64 - step;
    let mut hi = lo + 2.0 * step;
    let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        }
    }
    let t = 0.5 * (lo + hi);
    (wrap_angle(t), f(t))
}

pub fn wrap_angle(t: f64) -> f64 {
    let mut t = t % TAU;
    if t < 0.0 {
        t += TAU;
    }
    t
}

pub fn angle_distance(a: f64, b: f64) -> f64 {
    let d = (wrap_angle(a) - wrap_angle(b)).abs();
    d.min(TAU - d)
}

fn xy_of(omega: &StateVec) -> Vector2<f64> {
    Vector2::new(omega.coords()[1], omega.coords()[2])
}

pub fn cone_margin(sys: &System, x: &DVector<f64>) -> f64 {
    let egg = sys.egg();
    let t = x[0];
    let xy = Vector2::new(x[1], x[2]);
    // min over angles of t*h - n.xy
    let f = |th: f64| -(t * egg.h(th) - th.cos() * xy.x - th.sin() * xy.y);
    let (_, neg_min) = maximize_periodic(f);
    -neg_min
}

pub fn pure_at(sys: &System, t: f64) -> StateVec {
    let p = sys.egg().boundary(t);
    StateVec::new_unchecked(DVector::from_vec(vec![1.0, p.x, p.y]), true)
}

/// Atomic effect with value 1 exactly at the boundary point with normal
/// angle `t` and 0 at its antipode (the point with the opposite normal).
pub fn atom_at(sys: &System, t: f64) -> EffectVec {
    let egg = sys.egg();
    let h = egg.h(t);
    let hbar = egg.h(t + PI);
    let denom = h + hbar;
    EffectVec::new(DVector::from_vec(vec![
        hbar / denom,
        t.cos() / denom,
        t.sin() / denom,
    ]))
}

pub fn pure_sample(sys: &System, rng: &mut ChaCha8Rng) -> StateVec {
    pure_at(sys, rng.gen::<f64>() * TAU)
}

pub fn is_pure(sys: &System, omega: &StateVec) -> bool {
    if (omega.coords()[0] - 1.0).abs() > sys.tolerances().lp {
        return false;
    }
    let (_, viol) = sys.egg().support_violation(&xy_of(omega));
    viol.abs() <= sys.tolerances().lp
}

/// Normal angle of a boundary point.
pub fn normal_angle_of(sys: &System, omega: &StateVec) -> Result<f64> {
    let (t, viol) = sys.egg().support_violation(&xy_of(omega));
    if viol.abs() > sys.tolerances().lp {
        return Err(GptError::NotPure(format!(
            "support violation {viol:.3e} is not on the boundary"
        )));
    }
    Ok(t)
}

pub fn tilde(sys: &System, omega: &StateVec) -> Result<EffectVec> {
    Ok(atom_at(sys, normal_angle_of(sys, omega)?))
}

pub fn hat(sys: &System, e: &EffectVec) -> Result<StateVec> {
    let f = Vector2::new(e.coords()[1], e.coords()[2]);
    if f.norm() < 1e-13 {
        return Err(GptError::NotAtomic("direction part vanishes".into()));
    }
    Ok(pure_at(sys, f.y.atan2(f.x)))
}

pub fn is_atomic(sys: &System, e: &EffectVec) -> bool {
    let f = Vector2::new(e.coords()[1], e.coords()[2]);
    if f.norm() < 1e-13 {
        return false;
    }
    let t = f.y.atan2(f.x);
    let atom = atom_at(sys, t);
    (atom.coords() - e.coords()).norm() <= sys.tolerances().lp
}

/// All antipodal chords through `omega`: pairs of boundary points with
/// parallel tangents whose connecting segment contains the state. Returns
/// `(angle, weight on p(angle))`, angles in [0, pi).
pub fn diameters_through(sys: &System, omega: &StateVec) -> Vec<(f64, f64)> {
    let egg = sys.egg();
    let w = xy_of(omega);
    let g = |t: f64| {
        let p = egg.boundary(t);
        let q = egg.boundary(t + PI);
        (q.x - p.x) * (w.y - p.y) - (q.y - p.y) * (w.x - p.x)
    };
    let n = egg.chord_grid;
    let step = PI / n as f64;
    let vals: Vec<f64> = (0..n).map(|i| g(step * i as f64)).collect();
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    let mut roots: Vec<f64> = Vec::new();
    if scale < 1e-12 {
        // every diameter passes through the state (circle center):
        // deterministic tie-break on the first axis
        roots.push(0.0);
    } else {
        for i in 0..n {
            let (a, b) = (vals[i], if i + 1 < n { vals[i + 1] } else { -vals[0] });
            if a == 0.0 {
                roots.push(step * i as f64);
            } else if a * b < 0.0 {
                // bisection polish
                let (mut lo, mut hi) = (step * i as f64, step * (i + 1) as f64);
                let (mut glo, _) = (a, b);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    let gm = g(mid);
                    if glo * gm <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                        glo = gm;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
        }
    }
    // angles are modulo pi: a root at the wrap duplicates the one at 0
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    if roots.len() > 1 {
        let first = roots[0];
        let last = *roots.last().unwrap();
        if (PI - last + first).abs() < 1e-6 {
            roots.pop();
        }
    }

    roots
        .into_iter()
        .filter_map(|t| {
            let p = egg.boundary(t);
            let q = egg.boundary(t + PI);
            let chord = p - q;
            let mu = (w - q).dot(&chord) / chord.norm_squared();
            if (-1e-9..=1.0 + 1e-9).contains(&mu) {
                Some((t, mu.clamp(0.0, 1.0)))
            } else {
                None
            }
        })
        .collect()
}

/// First antipodal chord through the state (smallest diameter angle).
fn first_diameter(sys: &System, omega: &StateVec) -> Result<(f64, f64)> {
    if is_pure(sys, omega) {
        let t = normal_angle_of(sys, omega)?;
        // the chord through the point itself carries weight 1
        return Ok((if t < PI { t } else { t - PI }, if t < PI { 1.0 } else { 0.0 }));
    }
    diameters_through(sys, omega)
        .into_iter()
        .next()
        .ok_or_else(|| {
            GptError::DecompositionUnavailable("no antipodal chord found through state".into())
        })
}

pub fn decompose(sys: &System, omega: &StateVec) -> Result<Vec<(f64, StateVec)>> {
    let (t, mu) = first_diameter(sys, omega)?;
    let mut parts = vec![
        (mu, pure_at(sys, t)),
        (1.0 - mu, pure_at(sys, t + PI)),
    ];
    parts.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    Ok(parts)
}

pub fn spectral_measurement(sys: &System, omega: &StateVec) -> Result<Measurement> {
    let (t, _) = first_diameter(sys, omega)?;
    Ok(Measurement::new(vec![atom_at(sys, t), atom_at(sys, t + PI)]))
}

pub fn face_of(sys: &System, omega: &StateVec) -> Result<Face> {
    if is_pure(sys, omega) {
        Ok(Face::EggPoint(normal_angle_of(sys, omega)?))
    } else {
        Ok(Face::Full)
    }
}

pub fn filter_pair(sys: &System, t: f64) -> Result<(LinearMapA, LinearMapA, Face)> {
    let make = |angle: f64| {
        let hat_s = pure_at(sys, angle);
        let tilde_e = atom_at(sys, angle);
        LinearMapA::new(hat_s.coords() * tilde_e.coords().transpose())
    };
    Ok((make(t), make(t + PI), Face::EggPoint(wrap_angle(t + PI))))
}

/// The linear symmetry group of a generic egg: identity and the mirror
/// across the x-axis (the support function is even in the angle).
pub fn reversible_sample(rng: &mut ChaCha8Rng) -> LinearMapA {
    let mirror: bool = rng.gen();
    let mut m = DMatrix::identity(3, 3);
    if mirror {
        m[(2, 2)] = -1.0;
    }
    LinearMapA::new(m)
}

pub fn reversible_to(sys: &System, from: &StateVec, to: &StateVec) -> Result<LinearMapA> {
    let tf = normal_angle_of(sys, from)?;
    let tt = normal_angle_of(sys, to)?;
    let tol = 1e-9;
    if angle_distance(tf, tt) <= tol {
        return Ok(LinearMapA::identity(3));
    }
    if angle_distance(tf, -tt) <= tol {
        let mut m = DMatrix::identity(3, 3);
        m[(2, 2)] = -1.0;
        return Ok(LinearMapA::new(m));
    }
    Err(GptError::NoReversibleMap)
}

/// Mixtures of antipodal-pair measurements: effects `lambda_j` times the
/// atoms at `t_j` and `t_j + pi`. Exactly fine-grained and summing to `u`.
pub fn fine_grained_sample(sys: &System, rng: &mut ChaCha8Rng) -> Result<Measurement> {
    let pairs = rng.gen_range(1..=3);
    let lambda = super::dirichlet(rng, pairs);
    let mut effects = Vec::with_capacity(2 * pairs);
    for lam in lambda {
        let t = rng.gen::<f64>() * TAU;
        effects.push(EffectVec::new(atom_at(sys, t).coords() * lam));
        effects.push(EffectVec::new(atom_at(sys, t + PI).coords() * lam));
    }
    Ok(Measurement::new(effects))
}

pub fn effect_margins(sys: &System, e: &EffectVec) -> (f64, f64) {
    let egg = sys.egg();
    let e0 = e.coords()[0];
    let f = Vector2::new(e.coords()[1], e.coords()[2]);
    let val = |t: f64| {
        let p = egg.boundary(t);
        e0 + f.x * p.x + f.y * p.y
    };
    let (_, max) = maximize_periodic(val);
    let (_, neg_min) = maximize_periodic(|t| -val(t));
    (-neg_min, 1.0 - max)
}

pub fn extremal_state_for(sys: &System, e: &EffectVec, max: bool) -> StateVec {
    let egg = sys.egg();
    let e0 = e.coords()[0];
    let f = Vector2::new(e.coords()[1], e.coords()[2]);
    let val = move |t: f64| {
        let p = egg.boundary(t);
        let v = e0 + f.x * p.x + f.y * p.y;
        if max {
            v
        } else {
            -v
        }
    };
    let (t, _) = maximize_periodic(val);
    pure_at(sys, t)
}

pub fn pure_net(sys: &System, size: usize) -> Vec<DVector<f64>> {
    (0..size)
        .map(|i| pure_at(sys, TAU * i as f64 / size as f64).coords().clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::make_ellipse;
    use approx::assert_relative_eq;

    #[test]
    fn unit_axes_give_the_circle() {
        let sys = make_ellipse(1.0, 1.0).unwrap();
        for i in 0..32 {
            let t = TAU * i as f64 / 32.0;
            let p = sys.egg().boundary(t);
            assert_relative_eq!(p.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn circle_behavior_matches_ball() {
        // decomposition at v = (0.6, 0) must match the ball model values
        let sys = make_ellipse(1.0, 1.0).unwrap();
        let omega = sys.state(DVector::from_vec(vec![1.0, 0.6, 0.0])).unwrap();
        let parts = decompose(&sys, &omega).unwrap();
        assert_relative_eq!(parts[0].0, 0.8, epsilon = 1e-6);
        assert_relative_eq!(parts[1].0, 0.2, epsilon = 1e-6);
    }

    #[test]
    fn circle_center_splits_evenly() {
        let sys = make_ellipse(1.0, 1.0).unwrap();
        let omega = sys.state(DVector::from_vec(vec![1.0, 0.0, 0.0])).unwrap();
        let dec = diameters_through(&sys, &omega);
        for (_, mu) in dec {
            assert_relative_eq!(mu, 0.5, epsilon = 1e-9);
        }
    }

    #[test]
    fn atoms_evaluate_to_one_on_their_state() {
        let sys = make_ellipse(2.0, 1.0).unwrap();
        for i in 0..16 {
            let t = TAU * i as f64 / 16.0;
            let atom = atom_at(&sys, t);
            let s = pure_at(&sys, t);
            assert_relative_eq!(sys.pairing(&atom, &s), 1.0, epsilon = 1e-12);
            let anti = pure_at(&sys, t + PI);
            assert_relative_eq!(sys.pairing(&atom, &anti), 0.0, epsilon = 1e-12);
            // valid effect
            let (lo, hi) = effect_margins(&sys, &atom);
            assert!(lo > -1e-10 && hi > -1e-10, "margins {lo} {hi}");
        }
    }

    #[test]
    fn antipodal_atoms_sum_to_unit() {
        let sys = make_ellipse(2.0, 1.0).unwrap();
        let t = 0.7;
        let sum = atom_at(&sys, t).coords() + atom_at(&sys, t + PI).coords();
        assert_relative_eq!((sum - sys.unit_coords()).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn off_center_state_has_multiple_decompositions() {
        // a state inside the envelope of affine diameters lies on three
        // antipodal chords with different splitting ratios
        let sys = make_ellipse(2.0, 1.0).unwrap();
        let omega = sys.state(DVector::from_vec(vec![1.0, 0.06, 0.14])).unwrap();
        let dec = diameters_through(&sys, &omega);
        assert!(dec.len() >= 2, "found {} chord(s)", dec.len());
        let mut ratios: Vec<f64> = dec.iter().map(|(_, mu)| mu.max(1.0 - mu)).collect();
        ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(
            ratios.last().unwrap() - ratios.first().unwrap() > 0.02,
            "ratios too close: {ratios:?}"
        );
    }

    #[test]
    fn reversible_mirror_preserves_the_body() {
        let sys = make_ellipse(2.0, 1.0).unwrap();
        let mut rng = crate::rng::rng(4);
        for _ in 0..20 {
            let s = pure_sample(&sys, &mut rng);
            let mut m = DMatrix::identity(3, 3);
            m[(2, 2)] = -1.0;
            let image = sys.apply_map(&LinearMapA::new(m), &s).unwrap();
            assert!(is_pure(&sys, &image));
        }
    }
}
