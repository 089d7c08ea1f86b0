//! Concrete model systems with closed-form primitives.
//!
//! Each constructor fixes coordinates so that the dual pairing is the plain
//! dot product, precomputes whatever the model needs (Hermitian basis,
//! facet data, symmetry group), and reports `n_max`, the maximal number of
//! perfectly distinguishable pure states.

pub mod ball;
pub mod ellipse;
pub mod poly;
pub mod quantum;

use crate::error::{GptError, Result};
use crate::polyhedral::PolytopeSpec;
use crate::system::{EffectVec, Face, LinearMapA, Measurement, ModelKind, StateVec, System};
use crate::tol::Tolerances;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Probability simplex on `n` outcomes: cone is the nonnegative orthant,
/// the order unit sums coordinates, pure states are the basis vectors.
pub fn make_classical(n: usize) -> System {
    assert!(n >= 1, "classical model needs n >= 1");
    System {
        kind: ModelKind::Classical { n },
        dim: n,
        n_max: n,
        unit: DVector::from_element(n, 1.0),
        tol: Tolerances::default(),
        herm: None,
        poly: None,
        egg: None,
        poly_distinguishable: Vec::new(),
        poly_group: Vec::new(),
    }
}

/// d-level quantum system over the real space of Hermitian d x d matrices
/// (dimension d^2); the cone is positive semidefiniteness and the order
/// unit is the trace functional.
pub fn make_quantum(d: usize) -> System {
    assert!(d >= 2, "quantum model needs d >= 2");
    let basis = quantum::HermBasis::new(d);
    let unit = basis.coords_of(&DMatrix::identity(d, d).map(|x| num_complex::Complex64::new(x, 0.0)));
    System {
        kind: ModelKind::Quantum { d },
        dim: d * d,
        n_max: d,
        unit,
        tol: Tolerances::default(),
        herm: Some(basis),
        poly: None,
        egg: None,
        poly_distinguishable: Vec::new(),
        poly_group: Vec::new(),
    }
}

/// Lorentz cone over the unit ball in R^k; normalized states are `(1, v)`
/// with `|v| <= 1` and the pure states form the unit sphere.
pub fn make_ball(k: usize) -> System {
    assert!(k >= 2, "ball model needs k >= 2");
    let mut unit = DVector::zeros(k + 1);
    unit[0] = 1.0;
    System {
        kind: ModelKind::Ball { k },
        dim: k + 1,
        n_max: 2,
        unit,
        tol: Tolerances::default(),
        herm: None,
        poly: None,
        egg: None,
        poly_distinguishable: Vec::new(),
        poly_group: Vec::new(),
    }
}

/// Cone over the unit square `[-1,1]^2`.
pub fn make_square_bit() -> System {
    let points = vec![
        vec![1.0, 1.0],
        vec![1.0, -1.0],
        vec![-1.0, 1.0],
        vec![-1.0, -1.0],
    ];
    make_polytope_model(ModelKind::SquareBit, &points).expect("square data is nondegenerate")
}

/// Cone over the triangular bipyramid: an origin-centered equilateral
/// triangle in the z = 0 plane plus poles at z = +-1. A polyhedral stand-in
/// for a smoothly puffed triangle; the barycenter has decompositions with
/// probabilities (1/3, 1/3, 1/3) and (1/2, 1/2).
pub fn make_bipyramid() -> System {
    let mut points = Vec::new();
    for j in 0..3 {
        let th = 2.0 * std::f64::consts::PI * j as f64 / 3.0;
        points.push(vec![th.cos(), th.sin(), 0.0]);
    }
    points.push(vec![0.0, 0.0, 1.0]);
    points.push(vec![0.0, 0.0, -1.0]);
    make_polytope_model(ModelKind::Bipyramid, &points).expect("bipyramid data is nondegenerate")
}

/// Strictly convex planar state space with axis parameters `a`, `b`.
///
/// At `a == b` this is exactly the disc of radius `a`. For `a != b` the
/// boundary is the ellipse support profile plus a third-harmonic term
/// proportional to `a - b`, which breaks central symmetry while keeping the
/// body smooth and strictly convex; states then admit antipodal
/// decompositions with genuinely different probabilities.
pub fn make_ellipse(a: f64, b: f64) -> Result<System> {
    if !(a > 0.0) {
        return Err(GptError::InvalidAxis(a));
    }
    if !(b > 0.0) {
        return Err(GptError::InvalidAxis(b));
    }
    let egg = ellipse::EggShape::new(a, b);
    let mut unit = DVector::zeros(3);
    unit[0] = 1.0;
    Ok(System {
        kind: ModelKind::Ellipse { a, b },
        dim: 3,
        n_max: 2,
        unit,
        tol: Tolerances::default(),
        herm: None,
        poly: None,
        egg: Some(egg),
        poly_distinguishable: Vec::new(),
        poly_group: Vec::new(),
    })
}

/// User-supplied polytope given by affine vertex coordinates.
pub fn make_polytope(name: &str, points: &[Vec<f64>]) -> Result<System> {
    make_polytope_model(
        ModelKind::Custom {
            name: name.to_string(),
        },
        points,
    )
}

fn make_polytope_model(kind: ModelKind, points: &[Vec<f64>]) -> Result<System> {
    let spec = PolytopeSpec::from_points(points)?;
    let dim = spec.ambient_dim();
    let n_vertices = spec.vertices.len();
    let mut unit = DVector::zeros(dim);
    unit[0] = 1.0;
    let mut sys = System {
        kind,
        dim,
        // upper bound until the distinguishable subsets are enumerated
        n_max: n_vertices,
        unit,
        tol: Tolerances::default(),
        herm: None,
        poly: Some(spec),
        egg: None,
        poly_distinguishable: Vec::new(),
        poly_group: Vec::new(),
    };
    let subsets = poly::maximal_distinguishable_subsets(&sys)?;
    sys.n_max = subsets.iter().map(|s| s.len()).max().unwrap_or(1);
    sys.poly_distinguishable = subsets;
    sys.poly_group = poly::symmetry_group(&sys);
    Ok(sys)
}

// ----------------------------------------------------------------------
// samplers and primitive dispatch
// ----------------------------------------------------------------------

/// Flat Dirichlet weights (normalized exponentials).
pub(crate) fn dirichlet(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..m)
        .map(|_| -(1.0 - rng.gen::<f64>()).ln())
        .collect();
    let s: f64 = w.iter().sum();
    for x in &mut w {
        *x /= s;
    }
    w
}

pub(crate) fn pure_sample(sys: &System, rng: &mut ChaCha8Rng) -> StateVec {
    match sys.kind() {
        ModelKind::Classical { n } => {
            let i = rng.gen_range(0..*n);
            StateVec::new_unchecked(
                DVector::from_fn(*n, |j, _| if j == i { 1.0 } else { 0.0 }),
                true,
            )
        }
        ModelKind::Quantum { .. } => quantum::pure_sample(sys, rng),
        ModelKind::Ball { k } => ball::pure_from_direction(&ball::random_direction(*k, rng)),
        ModelKind::Ellipse { .. } => ellipse::pure_sample(sys, rng),
        ModelKind::SquareBit | ModelKind::Bipyramid | ModelKind::Custom { .. } => {
            let poly = sys.poly().expect("polytope data");
            let i = rng.gen_range(0..poly.vertices.len());
            StateVec::new_unchecked(poly.vertices[i].clone(), true)
        }
    }
}

pub(crate) fn mixed_sample(sys: &System, rng: &mut ChaCha8Rng) -> StateVec {
    match sys.kind() {
        ModelKind::Quantum { .. } => quantum::mixed_sample(sys, rng),
        _ => {
            let m = sys.n_max().max(2);
            let w = dirichlet(rng, m);
            let mut coords = DVector::zeros(sys.dim());
            for wi in w {
                coords += pure_sample(sys, rng).coords() * wi;
            }
            StateVec::new_unchecked(coords, true)
        }
    }
}

pub(crate) fn reversible_sample(sys: &System, rng: &mut ChaCha8Rng) -> LinearMapA {
    match sys.kind() {
        ModelKind::Classical { n } => {
            // random permutation matrix (Fisher-Yates)
            let mut perm: Vec<usize> = (0..*n).collect();
            for i in (1..*n).rev() {
                let j = rng.gen_range(0..=i);
                perm.swap(i, j);
            }
            LinearMapA::new(DMatrix::from_fn(*n, *n, |r, c| {
                if perm[c] == r {
                    1.0
                } else {
                    0.0
                }
            }))
        }
        ModelKind::Quantum { .. } => quantum::reversible_sample(sys, rng),
        ModelKind::Ball { k } => ball::reversible_sample(*k, rng),
        ModelKind::Ellipse { .. } => ellipse::reversible_sample(rng),
        ModelKind::SquareBit | ModelKind::Bipyramid | ModelKind::Custom { .. } => {
            let group = &sys.poly_group;
            let i = rng.gen_range(0..group.len());
            LinearMapA::new(group[i].clone())
        }
    }
}

pub(crate) fn decompose_parts(sys: &System, omega: &StateVec) -> Result<Vec<(f64, StateVec)>> {
    match sys.kind() {
        ModelKind::Classical { n } => {
            let parts = (0..*n)
                .map(|i| {
                    let pure = StateVec::new_unchecked(
                        DVector::from_fn(*n, |j, _| if j == i { 1.0 } else { 0.0 }),
                        true,
                    );
                    (omega.coords()[i], pure)
                })
                .collect();
            Ok(parts)
        }
        ModelKind::Quantum { .. } => quantum::decompose(sys, omega),
        ModelKind::Ball { .. } => ball::decompose(sys, omega),
        ModelKind::Ellipse { .. } => ellipse::decompose(sys, omega),
        ModelKind::SquareBit | ModelKind::Bipyramid | ModelKind::Custom { .. } => {
            poly::decompose(sys, omega)
        }
    }
}

pub(crate) fn spectral_measurement(sys: &System, omega: &StateVec) -> Result<Measurement> {
    match sys.kind() {
        ModelKind::Classical { n } => Ok(Measurement::new(
            (0..*n)
                .map(|i| {
                    EffectVec::new(DVector::from_fn(*n, |j, _| if j == i { 1.0 } else { 0.0 }))
                })
                .collect(),
        )),
        ModelKind::Quantum { .. } => quantum::spectral_measurement(sys, omega),
        ModelKind::Ball { .. } => ball::spectral_measurement(sys, omega),
        ModelKind::Ellipse { .. } => ellipse::spectral_measurement(sys, omega),
        ModelKind::SquareBit | ModelKind::Bipyramid | ModelKind::Custom { .. } => {
            poly::spectral_measurement(sys, omega)
        }
    }
}

pub(crate) fn tilde(sys: &System, omega: &StateVec) -> Result<EffectVec> {
    if !is_pure(sys, omega) {
        return Err(GptError::NotPure("tilde needs a pure state".into()));
    }
    match sys.kind() {
        ModelKind::Classical { .. } | ModelKind::Quantum { .. } => {
            // self-dual coordinates: the atomic effect has the same coordinates
            Ok(EffectVec::new(omega.coords().clone()))
        }
        ModelKind::Ball { k } => {
            let w = omega.coords().rows(1, *k).clone_owned();
            let mut coords = DVector::zeros(*k + 1);
            coords[0] = 0.5;
            for i in 0..*k {
                coords[1 + i] = 0.5 * w[i];
            }
            Ok(EffectVec::new(coords))
        }
        ModelKind::Ellipse { .. } => ellipse::tilde(sys, omega),
        ModelKind::SquareBit | ModelKind::Bipyramid | ModelKind::Custom { .. } => Err(
            GptError::ModelUnsupported("polytopal atoms take the value 1 on a whole face".into()),
        ),
    }
}

pub(crate) fn hat(sys: &System, e: &EffectVec) -> Result<StateVec> {
    if !is_atomic(sys, e) {
        return Err(GptError::NotAtomic("hat needs an atomic effect".into()));
    }
    match sys.kind() {
        ModelKind::Classical { .. } | ModelKind::Quantum { .. } => {
            Ok(StateVec::new_unchecked(e.coords().clone(), true))
        }
        ModelKind::Ball { k } => {
            let f = e.coords().rows(1, *k).clone_owned();
            let dir = f / e.coords()[0];
            Ok(ball::pure_from_direction(&dir))
        }
        ModelKind::Ellipse { .. } => ellipse::hat(sys, e),
        ModelKind::SquareBit | ModelKind::Bipyramid | ModelKind::Custom { .. } => Err(
            GptError::ModelUnsupported("polytopal atoms take the value 1 on a whole face".into()),
        ),
    }
}

pub(crate) fn is_pure(sys: &System, omega: &StateVec) -> bool {
    match sys.kind() {
        ModelKind::Classical { .. } => {
            omega
                .coords()
                .iter()
                .filter(|&&x| x.abs() > sys.tolerances().lp)
                .count()
                == 1
                && (omega.coords().amax() - 1.0).abs() <= sys.tolerances().lp
        }
        ModelKind::Quantum { .. } => quantum::is_pure(sys, omega),
        ModelKind::Ball { k } => {
            let v = omega.coords().rows(1, *k).norm();
            (omega.coords()[0] - 1.0).abs() <= sys.tolerances().lp
                && (v - 1.0).abs() <= sys.tolerances().lp
        }
        ModelKind::Ellipse { .. } => ellipse::is_pure(sys, omega),
        ModelKind::SquareBit | ModelKind::Bipyramid | ModelKind::Custom { .. } => {
            let poly = sys.poly().expect("polytope data");
            poly.vertices
                .iter()
                .any(|v| (v - omega.coords()).norm() <= sys.tolerances().lp)
        }
    }
}

pub(crate) fn is_atomic(sys: &System, e: &EffectVec) -> bool {
    match sys.kind() {
        ModelKind::Classical { .. } => {
            let nonzero: Vec<f64> = e
                .coords()
                .iter()
                .cloned()
                .filter(|x| x.abs() > sys.tolerances().lp)
                .collect();
            nonzero.len() == 1 && (nonzero[0] - 1.0).abs() <= sys.tolerances().lp
        }
        ModelKind::Quantum { .. } => quantum::is_atomic(sys, e),
        ModelKind::Ball { k } => {
            let f = e.coords().rows(1, *k).norm();
            (e.coords()[0] - 0.5).abs() <= sys.tolerances().lp
                && (f - 0.5).abs() <= sys.tolerances().lp
        }
        ModelKind::Ellipse { .. } => ellipse::is_atomic(sys, e),
        ModelKind::SquareBit | ModelKind::Bipyramid | ModelKind::Custom { .. } => {
            let poly = sys.poly().expect("polytope data");
            poly.atoms()
                .iter()
                .any(|a| (a - e.coords()).norm() <= sys.tolerances().lp)
        }
    }
}

pub(crate) fn atom_sample(sys: &System, rng: &mut ChaCha8Rng) -> Result<EffectVec> {
    match sys.kind() {
        ModelKind::Classical { n } => {
            let i = rng.gen_range(0..*n);
            Ok(EffectVec::new(DVector::from_fn(*n, |j, _| {
                if j == i {
                    1.0
                } else {
                    0.0
                }
            })))
        }
        ModelKind::Quantum { .. } => Ok(EffectVec::new(
            quantum::pure_sample(sys, rng).coords().clone(),
        )),
        ModelKind::Ball { k } => {
            let w = ball::random_direction(*k, rng);
            let mut coords = DVector::zeros(*k + 1);
            coords[0] = 0.5;
            for i in 0..*k {
                coords[1 + i] = 0.5 * w[i];
            }
            Ok(EffectVec::new(coords))
        }
        ModelKind::Ellipse { .. } => Ok(ellipse::atom_at(sys, rng.gen::<f64>() * std::f64::consts::TAU)),
        ModelKind::SquareBit | ModelKind::Bipyramid | ModelKind::Custom { .. } => {
            let atoms = sys.poly().expect("polytope data").atoms();
            let i = rng.gen_range(0..atoms.len());
            Ok(EffectVec::new(atoms[i].clone()))
        }
    }
}

pub(crate) fn fine_grained_sample(sys: &System, rng: &mut ChaCha8Rng) -> Result<Measurement> {
    match sys.kind() {
        ModelKind::Classical { n } => {
            // each coordinate functional split into random positive pieces
            let n = *n;
            let extra = rng.gen_range(0..=n);
            let mut effects = Vec::new();
            let mut owners: Vec<usize> = (0..n).collect();
            for _ in 0..extra {
                owners.push(rng.gen_range(0..n));
            }
            let mut split: Vec<Vec<f64>> = vec![Vec::new(); n];
            for (slot, &j) in owners.iter().enumerate() {
                split[j].push(slot as f64);
            }
            for j in 0..n {
                let parts = split[j].len();
                let w = dirichlet(rng, parts.max(1));
                for &wi in &w {
                    let mut coords = DVector::zeros(n);
                    coords[j] = wi;
                    effects.push(EffectVec::new(coords));
                }
            }
            Ok(Measurement::new(effects))
        }
        ModelKind::Quantum { .. } => quantum::fine_grained_sample(sys, rng),
        ModelKind::Ball { .. } => ball::fine_grained_sample(sys, rng),
        ModelKind::Ellipse { .. } => ellipse::fine_grained_sample(sys, rng),
        ModelKind::SquareBit | ModelKind::Bipyramid | ModelKind::Custom { .. } => {
            poly::fine_grained_sample(sys, rng)
        }
    }
}

pub(crate) fn face_of(sys: &System, omega: &StateVec) -> Result<Face> {
    match sys.kind() {
        ModelKind::Classical { .. } => {
            let support: Vec<usize> = omega
                .coords()
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > sys.tolerances().lp)
                .map(|(i, _)| i)
                .collect();
            Ok(if support.len() == sys.dim() {
                Face::Full
            } else if support.is_empty() {
                Face::Empty
            } else {
                Face::Classical(support)
            })
        }
        ModelKind::Quantum { .. } => quantum::face_of(sys, omega),
        ModelKind::Ball { k } => {
            let v = omega.coords().rows(1, *k).clone_owned();
            let r = v.norm();
            if (r - 1.0).abs() <= sys.tolerances().lp {
                Ok(Face::BallPoint(v / r))
            } else {
                Ok(Face::Full)
            }
        }
        ModelKind::Ellipse { .. } => ellipse::face_of(sys, omega),
        ModelKind::SquareBit | ModelKind::Bipyramid | ModelKind::Custom { .. } => {
            let poly = sys.poly().expect("polytope data");
            let vs = poly.face_of(omega.coords())?;
            Ok(if vs.len() == poly.vertices.len() {
                Face::Full
            } else if vs.is_empty() {
                Face::Empty
            } else {
                Face::Poly(vs)
            })
        }
    }
}

pub(crate) fn face_complement(sys: &System, f: &Face) -> Result<Face> {
    match (sys.kind(), f) {
        (_, Face::Empty) => Ok(Face::Full),
        (_, Face::Full) => Ok(Face::Empty),
        (ModelKind::Classical { n }, Face::Classical(s)) => Ok(Face::Classical(
            (0..*n).filter(|i| !s.contains(i)).collect(),
        )),
        (ModelKind::Quantum { .. }, Face::Quantum(q)) => {
            let d = q.nrows();
            Ok(Face::Quantum(
                DMatrix::identity(d, d).map(|x| num_complex::Complex64::new(x, 0.0)) - q,
            ))
        }
        (ModelKind::Ball { .. }, Face::BallPoint(w)) => Ok(Face::BallPoint(-w)),
        (ModelKind::Ellipse { .. }, Face::EggPoint(th)) => {
            Ok(Face::EggPoint(ellipse::wrap_angle(th + std::f64::consts::PI)))
        }
        _ => Err(GptError::NotProjective(
            "no orthocomplement for this face".into(),
        )),
    }
}

pub(crate) fn face_leq(sys: &System, f: &Face, g: &Face) -> bool {
    match (f, g) {
        (Face::Empty, _) => true,
        (_, Face::Full) => true,
        (Face::Full, _) => false,
        (_, Face::Empty) => false,
        (Face::Classical(a), Face::Classical(b)) => a.iter().all(|i| b.contains(i)),
        (Face::Quantum(qa), Face::Quantum(qb)) => {
            // containment of ranges: qb qa = qa
            ((qb * qa) - qa).iter().map(|c| c.norm()).fold(0.0, f64::max)
                <= sys.tolerances().map
        }
        (Face::BallPoint(a), Face::BallPoint(b)) => (a - b).norm() <= sys.tolerances().lp,
        (Face::EggPoint(a), Face::EggPoint(b)) => {
            ellipse::angle_distance(*a, *b) <= sys.tolerances().lp
        }
        (Face::Poly(a), Face::Poly(b)) => a.iter().all(|i| b.contains(i)),
        _ => false,
    }
}

pub(crate) fn filter_pair(sys: &System, f: &Face) -> Result<(LinearMapA, LinearMapA, Face)> {
    let dim = sys.dim();
    match (sys.kind(), f) {
        (_, Face::Full) => Ok((
            LinearMapA::identity(dim),
            LinearMapA::new(DMatrix::zeros(dim, dim)),
            Face::Empty,
        )),
        (_, Face::Empty) => Ok((
            LinearMapA::new(DMatrix::zeros(dim, dim)),
            LinearMapA::identity(dim),
            Face::Full,
        )),
        (ModelKind::Classical { n }, Face::Classical(s)) => {
            let ind = |set: &Vec<usize>| {
                LinearMapA::new(DMatrix::from_fn(*n, *n, |r, c| {
                    if r == c && set.contains(&r) {
                        1.0
                    } else {
                        0.0
                    }
                }))
            };
            let comp: Vec<usize> = (0..*n).filter(|i| !s.contains(i)).collect();
            Ok((ind(s), ind(&comp), Face::Classical(comp)))
        }
        (ModelKind::Quantum { .. }, Face::Quantum(q)) => quantum::filter_pair(sys, q),
        (ModelKind::Ball { .. }, Face::BallPoint(w)) => ball::filter_pair(sys, w),
        (ModelKind::Ellipse { .. }, Face::EggPoint(th)) => ellipse::filter_pair(sys, *th),
        (_, Face::Poly(vs)) => poly::filter_pair(sys, vs),
        _ => Err(GptError::NotProjective("face kind does not match model".into())),
    }
}

pub(crate) fn reversible_to(sys: &System, from: &StateVec, to: &StateVec) -> Result<LinearMapA> {
    if !is_pure(sys, from) || !is_pure(sys, to) {
        return Err(GptError::NotPure(
            "reversible alignment needs pure endpoints".into(),
        ));
    }
    match sys.kind() {
        ModelKind::Classical { n } => {
            let idx = |s: &StateVec| {
                s.coords()
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                    .map(|(i, _)| i)
                    .unwrap()
            };
            let (i, j) = (idx(from), idx(to));
            // transposition (i j)
            Ok(LinearMapA::new(DMatrix::from_fn(*n, *n, |r, c| {
                let target = if c == i {
                    j
                } else if c == j {
                    i
                } else {
                    c
                };
                if r == target {
                    1.0
                } else {
                    0.0
                }
            })))
        }
        ModelKind::Quantum { .. } => quantum::reversible_to(sys, from, to),
        ModelKind::Ball { k } => {
            let wf = from.coords().rows(1, *k).clone_owned();
            let wt = to.coords().rows(1, *k).clone_owned();
            Ok(ball::rotation_map(&crate::linalg::reflection_between(
                &wf, &wt,
            )))
        }
        ModelKind::Ellipse { .. } => ellipse::reversible_to(sys, from, to),
        ModelKind::SquareBit | ModelKind::Bipyramid | ModelKind::Custom { .. } => {
            for g in &sys.poly_group {
                let image = g * from.coords();
                if (image - to.coords()).norm() <= sys.tolerances().lp {
                    return Ok(LinearMapA::new(g.clone()));
                }
            }
            Err(GptError::NoReversibleMap)
        }
    }
}
