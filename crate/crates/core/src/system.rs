//! The system abstraction: an ordered real vector space with a distinguished
//! cone, an order unit `u` picking out the normalized states, effects as
//! functionals with values in [0,1], measurements as finite effect families
//! summing to `u`, and positive linear maps as dynamics.
//!
//! Effects and states are both stored as coordinate vectors; the dual
//! pairing is the coordinate dot product. Each model in the catalog fixes
//! coordinates so this holds (quantum uses an orthonormal Hermitian basis,
//! so the pairing is the trace form).

use crate::catalog;
use crate::error::{GptError, Result};
use crate::lp::{LpOutcome, LpProblem};
use crate::polyhedral::PolytopeSpec;
use crate::tol::Tolerances;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;

/// Model tag with the model-defining parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    /// Probability simplex on `n` outcomes.
    Classical { n: usize },
    /// d-level quantum system; ambient space is the Hermitian d x d matrices.
    Quantum { d: usize },
    /// Lorentz cone over the unit ball in R^k.
    Ball { k: usize },
    /// Cone over the unit square.
    SquareBit,
    /// Cone over the triangular bipyramid (equilateral triangle plus poles).
    Bipyramid,
    /// Strictly convex planar body with axes `a`, `b`. At `a == b` it is the
    /// disc of radius `a`; away from that it is "puffed" off-center so that
    /// decomposition probabilities are no longer unique.
    Ellipse { a: f64, b: f64 },
    /// User-supplied polytope.
    Custom { name: String },
}

/// A state: element of the cone, normalized when `u` evaluates to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVec {
    pub(crate) coords: DVector<f64>,
    pub(crate) normalized: bool,
}

impl StateVec {
    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub(crate) fn new_unchecked(coords: DVector<f64>, normalized: bool) -> Self {
        Self { coords, normalized }
    }
}

/// An effect: functional on the state space with values in [0,1] on
/// normalized states.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectVec {
    pub(crate) coords: DVector<f64>,
}

impl EffectVec {
    pub fn new(coords: DVector<f64>) -> Self {
        Self { coords }
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            coords: DVector::zeros(dim),
        }
    }
}

/// Finite family of effects adding up to the order unit.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub effects: Vec<EffectVec>,
}

impl Measurement {
    pub fn new(effects: Vec<EffectVec>) -> Self {
        Self { effects }
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    /// Outcome distribution on a state.
    pub fn outcome_probabilities(&self, sys: &System, omega: &StateVec) -> Result<Vec<f64>> {
        self.effects
            .iter()
            .map(|e| sys.evaluate(e, omega))
            .collect()
    }
}

/// Linear map on the ambient space A; acts on effects through the adjoint.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMapA {
    pub matrix: DMatrix<f64>,
}

impl LinearMapA {
    pub fn new(matrix: DMatrix<f64>) -> Self {
        Self { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn apply_coords(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.matrix * x
    }

    /// Adjoint action on effect coordinates.
    pub fn adjoint_coords(&self, e: &DVector<f64>) -> DVector<f64> {
        self.matrix.transpose() * e
    }

    pub fn compose(&self, other: &LinearMapA) -> LinearMapA {
        LinearMapA::new(&self.matrix * &other.matrix)
    }
}

/// A face of the normalized state space, in model-specific terms.
#[derive(Debug, Clone)]
pub enum Face {
    Empty,
    Full,
    /// Coordinate subset (sorted) of the simplex.
    Classical(Vec<usize>),
    /// Orthogonal projector onto a subspace of the Hilbert space.
    Quantum(DMatrix<Complex64>),
    /// Extreme point of the ball: unit direction in R^k.
    BallPoint(DVector<f64>),
    /// Boundary point of the planar body at normal angle theta.
    EggPoint(f64),
    /// Vertex index set of a polytopal face.
    Poly(Vec<usize>),
}

/// Diagnostic from a measurement validity check.
#[derive(Debug, Clone)]
pub struct MeasurementCheck {
    pub valid: bool,
    /// Componentwise deviation of the effect sum from the order unit.
    pub sum_deviation: f64,
    /// Worst validity margin over all effects (negative means invalid).
    pub worst_effect_margin: f64,
    pub failure: Option<String>,
}

/// A finite-dimensional system from the catalog.
#[derive(Debug, Clone)]
pub struct System {
    pub(crate) kind: ModelKind,
    pub(crate) dim: usize,
    pub(crate) n_max: usize,
    pub(crate) unit: DVector<f64>,
    pub(crate) tol: Tolerances,
    pub(crate) herm: Option<catalog::quantum::HermBasis>,
    pub(crate) poly: Option<PolytopeSpec>,
    pub(crate) egg: Option<catalog::ellipse::EggShape>,
    /// Maximal perfectly distinguishable vertex subsets, for polytopal
    /// models (precomputed).
    pub(crate) poly_distinguishable: Vec<Vec<usize>>,
    /// Linear symmetry group permuting the vertices, for polytopal models.
    pub(crate) poly_group: Vec<DMatrix<f64>>,
}

impl System {
    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    /// Ambient dimension of A.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Maximal number of perfectly distinguishable pure states.
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn unit(&self) -> EffectVec {
        EffectVec::new(self.unit.clone())
    }

    pub fn unit_coords(&self) -> &DVector<f64> {
        &self.unit
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn set_tolerances(&mut self, tol: Tolerances) {
        self.tol = tol;
    }

    pub(crate) fn herm(&self) -> &catalog::quantum::HermBasis {
        self.herm.as_ref().expect("quantum basis present")
    }

    pub fn poly(&self) -> Option<&PolytopeSpec> {
        self.poly.as_ref()
    }

    pub(crate) fn egg(&self) -> &catalog::ellipse::EggShape {
        self.egg.as_ref().expect("egg shape present")
    }

    // ------------------------------------------------------------------
    // pairing and validation
    // ------------------------------------------------------------------

    /// Raw dual pairing without range checks.
    pub fn pairing(&self, e: &EffectVec, x: &StateVec) -> f64 {
        e.coords.dot(&x.coords)
    }

    /// Dual pairing of an effect with a state, clamped to [0,1]; values
    /// outside by more than the linear tolerance are an error.
    pub fn evaluate(&self, e: &EffectVec, omega: &StateVec) -> Result<f64> {
        if e.coords.len() != omega.coords.len() {
            return Err(GptError::DimensionMismatch {
                expected: omega.coords.len(),
                got: e.coords.len(),
            });
        }
        let v = e.coords.dot(&omega.coords);
        let t = self.tol.linear;
        if v < -t || v > 1.0 + t {
            return Err(GptError::OutOfRange { value: v });
        }
        Ok(v.clamp(0.0, 1.0))
    }

    /// Worst facet/eigenvalue margin of cone membership; nonnegative iff
    /// `x` is in the cone (up to the membership tolerance).
    pub fn cone_margin(&self, x: &DVector<f64>) -> f64 {
        match &self.kind {
            ModelKind::Classical { .. } => x.iter().cloned().fold(f64::INFINITY, f64::min),
            ModelKind::Quantum { .. } => catalog::quantum::cone_margin(self, x),
            ModelKind::Ball { .. } => x[0] - x.rows(1, x.len() - 1).norm(),
            ModelKind::Ellipse { .. } => catalog::ellipse::cone_margin(self, x),
            ModelKind::SquareBit | ModelKind::Bipyramid | ModelKind::Custom { .. } => {
                self.poly().expect("polytope data").cone_margin(x)
            }
        }
    }

    pub fn cone_contains(&self, x: &DVector<f64>) -> bool {
        self.cone_margin(x) >= -self.tol.map * x.amax().max(1.0)
    }

    /// Validated state constructor.
    pub fn state(&self, coords: DVector<f64>) -> Result<StateVec> {
        if coords.len() != self.dim {
            return Err(GptError::DimensionMismatch {
                expected: self.dim,
                got: coords.len(),
            });
        }
        let margin = self.cone_margin(&coords);
        if margin < -self.tol.map * coords.amax().max(1.0) {
            return Err(GptError::NotAState { margin });
        }
        let normalized = (self.unit.dot(&coords) - 1.0).abs() <= self.tol.linear;
        Ok(StateVec { coords, normalized })
    }

    /// Validated effect constructor.
    pub fn effect(&self, coords: DVector<f64>) -> Result<EffectVec> {
        if coords.len() != self.dim {
            return Err(GptError::DimensionMismatch {
                expected: self.dim,
                got: coords.len(),
            });
        }
        let e = EffectVec::new(coords);
        let (lo, hi) = self.effect_margins(&e);
        if lo < -self.tol.lp || hi < -self.tol.lp {
            return Err(GptError::OutOfRange {
                value: if lo < hi { -lo } else { 1.0 + (-hi) },
            });
        }
        Ok(e)
    }

    /// Validity margins of an effect: `(min e, 1 - max e)` over the
    /// normalized state space. Exact for every catalog model (polyhedral
    /// models check vertices; quantum diagonalizes; ball and the planar
    /// body have closed forms).
    pub fn effect_margins(&self, e: &EffectVec) -> (f64, f64) {
        match &self.kind {
            ModelKind::Classical { .. } => {
                let lo = e.coords.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = e.coords.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                (lo, 1.0 - hi)
            }
            ModelKind::Quantum { .. } => catalog::quantum::effect_margins(self, e),
            ModelKind::Ball { .. } => {
                let e0 = e.coords[0];
                let f = e.coords.rows(1, self.dim - 1).norm();
                (e0 - f, 1.0 - e0 - f)
            }
            ModelKind::Ellipse { .. } => catalog::ellipse::effect_margins(self, e),
            ModelKind::SquareBit | ModelKind::Bipyramid | ModelKind::Custom { .. } => {
                let poly = self.poly().expect("polytope data");
                let vals: Vec<f64> = poly.vertices.iter().map(|v| e.coords.dot(v)).collect();
                let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                (lo, 1.0 - hi)
            }
        }
    }

    pub fn is_valid_effect(&self, e: &EffectVec) -> bool {
        let (lo, hi) = self.effect_margins(e);
        lo >= -self.tol.lp && hi >= -self.tol.lp
    }

    /// Check that the effects sum to the order unit and each effect is
    /// valid; the diagnostic names the failing condition.
    pub fn is_valid_measurement(&self, m: &Measurement) -> MeasurementCheck {
        if m.effects.is_empty() {
            return MeasurementCheck {
                valid: false,
                sum_deviation: f64::INFINITY,
                worst_effect_margin: f64::NEG_INFINITY,
                failure: Some("measurement has no effects".into()),
            };
        }
        let mut sum = DVector::zeros(self.dim);
        for e in &m.effects {
            sum += &e.coords;
        }
        let sum_deviation = (sum - &self.unit).amax();
        let worst = m
            .effects
            .iter()
            .map(|e| {
                let (lo, hi) = self.effect_margins(e);
                lo.min(hi)
            })
            .fold(f64::INFINITY, f64::min);
        let sum_ok = sum_deviation <= 1e-10;
        let margins_ok = worst >= -self.tol.lp;
        MeasurementCheck {
            valid: sum_ok && margins_ok,
            sum_deviation,
            worst_effect_margin: worst,
            failure: if sum_ok && margins_ok {
                None
            } else if !sum_ok {
                Some(format!(
                    "effects sum deviates from the order unit by {sum_deviation:.3e}"
                ))
            } else {
                Some(format!("an effect leaves [0,1] by {:.3e}", -worst))
            },
        }
    }

    /// Apply a positive map to a state.
    pub fn apply_map(&self, t: &LinearMapA, omega: &StateVec) -> Result<StateVec> {
        let coords = t.apply_coords(&omega.coords);
        let margin = self.cone_margin(&coords);
        if margin < -1e-10 * coords.amax().max(1.0) {
            return Err(GptError::NotAState { margin });
        }
        let normalized = (self.unit.dot(&coords) - 1.0).abs() <= 1e-10;
        Ok(StateVec { coords, normalized })
    }

    // ------------------------------------------------------------------
    // perfect distinguishability (LP feasibility)
    // ------------------------------------------------------------------

    /// Search for a measurement `{e_i}` with `e_i(omega_j) = delta_ij`.
    ///
    /// The feasibility LP carries the delta conditions, the sum-to-unit
    /// constraint, and nonnegativity of every effect on a validity net:
    /// exact facet/vertex constraints for polyhedral and classical models, a
    /// deterministic pure-state net for the smooth ones. For smooth models a
    /// found measurement is verified exactly a posteriori and violated pure
    /// states are added as cuts until the certificate holds.
    pub fn perfectly_distinguishable(
        &self,
        states: &[StateVec],
    ) -> Result<Option<Measurement>> {
        let m = states.len();
        if m == 0 {
            return Ok(None);
        }
        if m > self.n_max {
            // more states than any distinguishable family can hold
            return Ok(None);
        }
        let mut net = self.validity_net();
        for s in states {
            net.push(s.coords.clone());
        }

        for _round in 0..12 {
            let lp = self.distinguishability_lp(states, &net);
            match lp.solve()? {
                LpOutcome::Infeasible => return Ok(None),
                LpOutcome::Feasible(x) => {
                    let effects: Vec<EffectVec> = (0..m)
                        .map(|i| {
                            EffectVec::new(DVector::from_iterator(
                                self.dim,
                                x[i * self.dim..(i + 1) * self.dim].iter().copied(),
                            ))
                        })
                        .collect();
                    let meas = Measurement::new(effects);
                    // exact a-posteriori verification
                    let mut worst_violation = 0.0f64;
                    let mut cuts: Vec<DVector<f64>> = Vec::new();
                    for e in &meas.effects {
                        let (lo, hi) = self.effect_margins(e);
                        if lo < -self.tol.lp {
                            worst_violation = worst_violation.max(-lo);
                            cuts.push(self.extremal_state_for(e, false).coords);
                        }
                        if hi < -self.tol.lp {
                            worst_violation = worst_violation.max(-hi);
                            cuts.push(self.extremal_state_for(e, true).coords);
                        }
                    }
                    if worst_violation == 0.0 {
                        if self.delta_conditions_hold(&meas, states) {
                            return Ok(Some(meas));
                        }
                        return Err(GptError::LpNumericalFailure(
                            "solution lost the delta conditions".into(),
                        ));
                    }
                    net.extend(cuts);
                }
            }
        }
        Err(GptError::LpNumericalFailure(
            "cutting-plane refinement did not converge".into(),
        ))
    }

    fn distinguishability_lp(&self, states: &[StateVec], net: &[DVector<f64>]) -> LpProblem {
        let m = states.len();
        let n = m * self.dim;
        let mut lp = LpProblem::new(n);
        // delta conditions
        for i in 0..m {
            for (j, s) in states.iter().enumerate() {
                let mut row = vec![0.0; n];
                for k in 0..self.dim {
                    row[i * self.dim + k] = s.coords[k];
                }
                lp.eq(row, if i == j { 1.0 } else { 0.0 });
            }
        }
        // sum to unit
        for k in 0..self.dim {
            let mut row = vec![0.0; n];
            for i in 0..m {
                row[i * self.dim + k] = 1.0;
            }
            lp.eq(row, self.unit[k]);
        }
        // nonnegativity on the net (values <= 1 follow from the two above)
        for sigma in net {
            for i in 0..m {
                let mut row = vec![0.0; n];
                for k in 0..self.dim {
                    row[i * self.dim + k] = sigma[k];
                }
                lp.lb(row, 0.0);
            }
        }
        lp
    }

    pub(crate) fn delta_conditions_hold(&self, meas: &Measurement, states: &[StateVec]) -> bool {
        for (i, e) in meas.effects.iter().enumerate() {
            for (j, s) in states.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                if (self.pairing(e, s) - want).abs() > self.tol.lp {
                    return false;
                }
            }
        }
        true
    }

    /// Deterministic quasi-uniform net of pure states used as validity
    /// constraints for the smooth models; exact vertex lists for the
    /// polyhedral ones.
    fn validity_net(&self) -> Vec<DVector<f64>> {
        match &self.kind {
            ModelKind::Classical { n } => (0..*n)
                .map(|i| DVector::from_fn(*n, |j, _| if i == j { 1.0 } else { 0.0 }))
                .collect(),
            ModelKind::SquareBit | ModelKind::Bipyramid | ModelKind::Custom { .. } => {
                self.poly().expect("polytope data").vertices.clone()
            }
            ModelKind::Quantum { d } => catalog::quantum::pure_net(self, 6 * d * d),
            ModelKind::Ball { k } => catalog::ball::pure_net(self, 16 * k),
            ModelKind::Ellipse { .. } => catalog::ellipse::pure_net(self, 64),
        }
    }

    /// Pure state extremizing an effect (max when `maximize`, else min).
    fn extremal_state_for(&self, e: &EffectVec, maximize: bool) -> StateVec {
        match &self.kind {
            ModelKind::Classical { n } => {
                let iter = e.coords.iter().enumerate();
                let pick = if maximize {
                    iter.max_by(|a, b| a.1.partial_cmp(b.1).unwrap()).map(|(i, _)| i)
                } else {
                    iter.min_by(|a, b| a.1.partial_cmp(b.1).unwrap()).map(|(i, _)| i)
                }
                .unwrap_or(0);
                StateVec::new_unchecked(
                    DVector::from_fn(*n, |j, _| if j == pick { 1.0 } else { 0.0 }),
                    true,
                )
            }
            ModelKind::Quantum { .. } => catalog::quantum::extremal_state_for(self, e, maximize),
            ModelKind::Ball { k } => {
                let f = e.coords.rows(1, *k).clone_owned();
                let n = f.norm();
                let dir = if n < 1e-14 {
                    DVector::from_fn(*k, |j, _| if j == 0 { 1.0 } else { 0.0 })
                } else if maximize {
                    f / n
                } else {
                    -f / n
                };
                catalog::ball::pure_from_direction(&dir)
            }
            ModelKind::Ellipse { .. } => catalog::ellipse::extremal_state_for(self, e, maximize),
            ModelKind::SquareBit | ModelKind::Bipyramid | ModelKind::Custom { .. } => {
                let poly = self.poly().expect("polytope data");
                let vals: Vec<f64> = poly.vertices.iter().map(|v| e.coords.dot(v)).collect();
                let pick = if maximize {
                    (0..vals.len()).max_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap())
                } else {
                    (0..vals.len()).min_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap())
                }
                .unwrap_or(0);
                StateVec::new_unchecked(poly.vertices[pick].clone(), true)
            }
        }
    }

    // ------------------------------------------------------------------
    // model primitive dispatch
    // ------------------------------------------------------------------

    /// Seeded pure-state sampler.
    pub fn pure_sample(&self, rng: &mut ChaCha8Rng) -> StateVec {
        catalog::pure_sample(self, rng)
    }

    /// Seeded sampler of generic (usually mixed) normalized states.
    pub fn mixed_sample(&self, rng: &mut ChaCha8Rng) -> StateVec {
        catalog::mixed_sample(self, rng)
    }

    /// Seeded sampler of reversible dynamics.
    pub fn reversible_sample(&self, rng: &mut ChaCha8Rng) -> LinearMapA {
        catalog::reversible_sample(self, rng)
    }

    /// Convex decomposition of a state into perfectly distinguishable pure
    /// states; the full family, including zero-probability members where the
    /// model provides them naturally.
    pub fn decompose_parts(&self, omega: &StateVec) -> Result<Vec<(f64, StateVec)>> {
        catalog::decompose_parts(self, omega)
    }

    /// A fine-grained measurement whose outcome distribution on `omega` is
    /// the decomposition probability vector (with zeros), for the models
    /// where one exists in closed form.
    pub fn spectral_measurement(&self, omega: &StateVec) -> Result<Measurement> {
        catalog::spectral_measurement(self, omega)
    }

    /// Atomic effect taking the value 1 exactly on the given pure state.
    pub fn tilde(&self, omega: &StateVec) -> Result<EffectVec> {
        catalog::tilde(self, omega)
    }

    /// The unique normalized state on which the given atomic effect is 1.
    pub fn hat(&self, e: &EffectVec) -> Result<StateVec> {
        catalog::hat(self, e)
    }

    /// Extremality certificate for states.
    pub fn is_pure(&self, omega: &StateVec) -> bool {
        catalog::is_pure(self, omega)
    }

    /// Certificate that an effect is atomic (extreme dual ray, maximal).
    pub fn is_atomic(&self, e: &EffectVec) -> bool {
        catalog::is_atomic(self, e)
    }

    /// Seeded sampler of atomic effects.
    pub fn atom_sample(&self, rng: &mut ChaCha8Rng) -> Result<EffectVec> {
        catalog::atom_sample(self, rng)
    }

    /// Seeded sampler of fine-grained measurements (all effects proportional
    /// to atoms).
    pub fn fine_grained_sample(&self, rng: &mut ChaCha8Rng) -> Result<Measurement> {
        catalog::fine_grained_sample(self, rng)
    }

    /// Smallest face containing the state.
    pub fn face_of(&self, omega: &StateVec) -> Result<Face> {
        catalog::face_of(self, omega)
    }

    /// Orthocomplement of a face, where the model provides one.
    pub fn face_complement(&self, f: &Face) -> Result<Face> {
        catalog::face_complement(self, f)
    }

    /// Face order: is `f` contained in `g`?
    pub fn face_leq(&self, f: &Face, g: &Face) -> bool {
        catalog::face_leq(self, f, g)
    }

    /// Filter and complement filter projecting onto the span of a face.
    pub fn filter_pair(&self, f: &Face) -> Result<(LinearMapA, LinearMapA, Face)> {
        catalog::filter_pair(self, f)
    }

    /// Reversible map sending one pure state to another, if the model's
    /// reversible group provides one.
    pub fn reversible_to(&self, from: &StateVec, to: &StateVec) -> Result<LinearMapA> {
        catalog::reversible_to(self, from, to)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{make_classical, make_quantum};
    use approx::assert_relative_eq;

    #[test]
    fn evaluate_unit_on_normalized_state_is_one() {
        let sys = make_classical(3);
        let omega = sys
            .state(DVector::from_vec(vec![0.2, 0.5, 0.3]))
            .unwrap();
        assert_relative_eq!(
            sys.evaluate(&sys.unit(), &omega).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn evaluate_zero_effect_is_zero() {
        let sys = make_classical(3);
        let omega = sys
            .state(DVector::from_vec(vec![0.2, 0.5, 0.3]))
            .unwrap();
        let zero = EffectVec::zero(3);
        assert_eq!(sys.evaluate(&zero, &omega).unwrap(), 0.0);
    }

    #[test]
    fn evaluate_coordinate_indicator() {
        let sys = make_classical(3);
        let omega = sys
            .state(DVector::from_vec(vec![0.2, 0.5, 0.3]))
            .unwrap();
        let e = EffectVec::new(DVector::from_vec(vec![1.0, 0.0, 0.0]));
        assert_relative_eq!(sys.evaluate(&e, &omega).unwrap(), 0.2, epsilon = 1e-12);
    }

    #[test]
    fn evaluate_rejects_dimension_mismatch() {
        let sys = make_classical(3);
        let omega = sys
            .state(DVector::from_vec(vec![0.2, 0.5, 0.3]))
            .unwrap();
        let e = EffectVec::new(DVector::from_vec(vec![1.0, 0.0]));
        assert!(matches!(
            sys.evaluate(&e, &omega),
            Err(GptError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn evaluate_rejects_out_of_range() {
        let sys = make_classical(2);
        let omega = sys.state(DVector::from_vec(vec![0.5, 0.5])).unwrap();
        let e = EffectVec::new(DVector::from_vec(vec![3.0, 0.0]));
        assert!(matches!(
            sys.evaluate(&e, &omega),
            Err(GptError::OutOfRange { .. })
        ));
    }

    #[test]
    fn coordinate_measurement_is_valid() {
        let sys = make_classical(2);
        let m = Measurement::new(vec![
            EffectVec::new(DVector::from_vec(vec![1.0, 0.0])),
            EffectVec::new(DVector::from_vec(vec![0.0, 1.0])),
        ]);
        assert!(sys.is_valid_measurement(&m).valid);
    }

    #[test]
    fn short_sum_measurement_is_invalid() {
        let sys = make_classical(2);
        let m = Measurement::new(vec![
            EffectVec::new(DVector::from_vec(vec![1.0, 0.0])),
            EffectVec::new(DVector::from_vec(vec![0.0, 0.5])),
        ]);
        let check = sys.is_valid_measurement(&m);
        assert!(!check.valid);
        assert!(check.failure.unwrap().contains("sum"));
    }

    #[test]
    fn projective_qubit_measurement_is_valid() {
        let sys = make_quantum(2);
        let m = sys
            .spectral_measurement(&catalog::quantum::diagonal_state(&sys, &[1.0, 0.0]))
            .unwrap();
        assert!(sys.is_valid_measurement(&m).valid);
    }

    #[test]
    fn classical_vertices_are_distinguishable() {
        let sys = make_classical(3);
        let e1 = sys
            .state(DVector::from_vec(vec![1.0, 0.0, 0.0]))
            .unwrap();
        let e2 = sys
            .state(DVector::from_vec(vec![0.0, 1.0, 0.0]))
            .unwrap();
        let m = sys.perfectly_distinguishable(&[e1, e2]).unwrap();
        assert!(m.is_some());
        assert!(sys.is_valid_measurement(&m.unwrap()).valid);
    }

    #[test]
    fn permutation_map_permutes_coordinates() {
        let sys = make_classical(3);
        // cycle 1->2->3->1 acting on coordinates
        let t = LinearMapA::new(DMatrix::from_row_slice(
            3,
            3,
            &[0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0],
        ));
        let omega = sys
            .state(DVector::from_vec(vec![0.5, 0.3, 0.2]))
            .unwrap();
        let image = sys.apply_map(&t, &omega).unwrap();
        assert_relative_eq!(image.coords()[0], 0.2, epsilon = 1e-15);
        assert_relative_eq!(image.coords()[1], 0.5, epsilon = 1e-15);
        assert_relative_eq!(image.coords()[2], 0.3, epsilon = 1e-15);
    }

    #[test]
    fn identity_map_fixes_states() {
        let sys = make_classical(3);
        let omega = sys
            .state(DVector::from_vec(vec![0.5, 0.3, 0.2]))
            .unwrap();
        let image = sys.apply_map(&LinearMapA::identity(3), &omega).unwrap();
        assert_eq!(image.coords(), omega.coords());
    }

    #[test]
    fn negative_map_output_is_rejected() {
        let sys = make_classical(2);
        let t = LinearMapA::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]));
        let omega = sys.state(DVector::from_vec(vec![0.5, 0.5])).unwrap();
        assert!(matches!(
            sys.apply_map(&t, &omega),
            Err(GptError::NotAState { .. })
        ));
    }
}
