//! Primitives shared by the polytopal models (square bit, bipyramid, user
//! polytopes): LP-backed distinguishable-subset enumeration, decomposition
//! by convex weights over those subsets, the vertex-permutation symmetry
//! group, and a certified filter construction.

use crate::error::{GptError, Result};
use crate::linalg;
use crate::lp::{LpOutcome, LpProblem};
use crate::system::{EffectVec, Face, LinearMapA, Measurement, StateVec, System};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const MAX_ENUM_VERTICES: usize = 12;

fn vertex_states(sys: &System) -> Vec<StateVec> {
    sys.poly()
        .expect("polytope data")
        .vertices
        .iter()
        .map(|v| StateVec::new_unchecked(v.clone(), true))
        .collect()
}

/// All maximal perfectly distinguishable vertex subsets.
///
/// Distinguishability is hereditary (drop an effect and merge it into the
/// rest), so subsets are grown level by level and a set is tested only when
/// all its sub-families already passed.
pub fn maximal_distinguishable_subsets(sys: &System) -> Result<Vec<Vec<usize>>> {
    let verts = vertex_states(sys);
    let n = verts.len();
    if n > MAX_ENUM_VERTICES {
        return Err(GptError::EnumerationBudgetExceeded(format!(
            "{n} vertices"
        )));
    }
    let mut good: Vec<u64> = Vec::new();
    let mut by_size: Vec<Vec<u64>> = vec![Vec::new(); n + 1];
    for i in 0..n {
        let mask = 1u64 << i;
        good.push(mask);
        by_size[1].push(mask);
    }
    for size in 2..=n {
        let prev = by_size[size - 1].clone();
        for &mask in &prev {
            let top = 64 - mask.leading_zeros() as usize;
            for i in top..n {
                let cand = mask | (1u64 << i);
                // heredity: every sub-family of one element less must pass
                let hereditary = (0..n)
                    .filter(|j| cand & (1 << j) != 0)
                    .all(|j| good.contains(&(cand & !(1 << j))));
                if !hereditary || good.contains(&cand) {
                    continue;
                }
                let states: Vec<StateVec> = (0..n)
                    .filter(|j| cand & (1 << j) != 0)
                    .map(|j| verts[j].clone())
                    .collect();
                if sys.perfectly_distinguishable(&states)?.is_some() {
                    good.push(cand);
                    by_size[size].push(cand);
                }
            }
        }
        if by_size[size].is_empty() {
            break;
        }
    }
    // keep the maximal masks
    let mut maximal: Vec<Vec<usize>> = good
        .iter()
        .filter(|&&m| !good.iter().any(|&g| g != m && g & m == m))
        .map(|&m| (0..n).filter(|i| m & (1 << i) != 0).collect())
        .collect();
    maximal.sort_by_key(|s: &Vec<usize>| (usize::MAX - s.len(), s.clone()));
    Ok(maximal)
}

/// Convex weights expressing `x` over the given vertex subset, if any.
fn convex_weights(sys: &System, subset: &[usize], x: &DVector<f64>) -> Option<Vec<f64>> {
    let poly = sys.poly().expect("polytope data");
    let cols: Vec<DVector<f64>> = subset.iter().map(|&i| poly.vertices[i].clone()).collect();
    let v = DMatrix::from_columns(&cols);
    let svd = v.clone().svd(true, true);
    let mu = svd.solve(x, 1e-12).ok()?;
    let resid = (&v * &mu - x).norm();
    if resid > 1e-9 * x.amax().max(1.0) {
        return None;
    }
    if mu.iter().any(|&w| w < -1e-9) {
        return None;
    }
    Some(mu.iter().map(|w| w.max(0.0)).collect())
}

/// Every decomposition of the state over the maximal distinguishable
/// subsets, as (subset, weights).
pub fn all_decompositions(sys: &System, omega: &StateVec) -> Vec<(Vec<usize>, Vec<f64>)> {
    sys.poly_distinguishable
        .iter()
        .filter_map(|s| convex_weights(sys, s, omega.coords()).map(|w| (s.clone(), w)))
        .collect()
}

/// First decomposition in the deterministic subset order (largest subsets
/// first, then lexicographic).
pub fn decompose(sys: &System, omega: &StateVec) -> Result<Vec<(f64, StateVec)>> {
    let poly = sys.poly().expect("polytope data");
    for subset in &sys.poly_distinguishable {
        if let Some(w) = convex_weights(sys, subset, omega.coords()) {
            return Ok(subset
                .iter()
                .zip(w.iter())
                .map(|(&i, &wi)| {
                    (wi, StateVec::new_unchecked(poly.vertices[i].clone(), true))
                })
                .collect());
        }
    }
    Err(GptError::DecompositionUnavailable(
        "state is on no chord/simplex of mutually distinguishable vertices".into(),
    ))
}

/// The certifying measurement for the decomposition's subset.
pub fn spectral_measurement(sys: &System, omega: &StateVec) -> Result<Measurement> {
    let verts = vertex_states(sys);
    for subset in &sys.poly_distinguishable {
        if convex_weights(sys, subset, omega.coords()).is_some() {
            let states: Vec<StateVec> = subset.iter().map(|&i| verts[i].clone()).collect();
            if let Some(m) = sys.perfectly_distinguishable(&states)? {
                return Ok(m);
            }
        }
    }
    Err(GptError::DecompositionUnavailable(
        "no distinguishing measurement for the state's decomposition".into(),
    ))
}

/// Linear symmetry group: vertex permutations that extend to linear maps.
pub fn symmetry_group(sys: &System) -> Vec<DMatrix<f64>> {
    let poly = sys.poly().expect("polytope data");
    let n = poly.vertices.len();
    let dim = sys.dim();
    let mut group = vec![DMatrix::identity(dim, dim)];
    if n > 8 {
        return group;
    }
    let v = DMatrix::from_columns(&poly.vertices);
    let pinv = v
        .clone()
        .svd(true, true)
        .pseudo_inverse(1e-10)
        .expect("pseudo-inverse of the vertex matrix");

    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        // candidate map sending v_i to v_perm(i)
        let cols: Vec<DVector<f64>> = perm.iter().map(|&i| poly.vertices[i].clone()).collect();
        let target = DMatrix::from_columns(&cols);
        let t = &target * &pinv;
        if linalg::max_abs(&(&t * &v - &target)) < 1e-9 {
            let already = group.iter().any(|g| linalg::max_abs(&(g - &t)) < 1e-9);
            if !already {
                group.push(t);
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    group
}

fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// Fine-grained measurement: scalars on the facet atoms solving
/// `sum c_i pi_i = u` with randomized positive lower bounds (LP feasibility,
/// rejection on infeasible draws).
pub fn fine_grained_sample(sys: &System, rng: &mut ChaCha8Rng) -> Result<Measurement> {
    let poly = sys.poly().expect("polytope data");
    let atoms = poly.atoms();
    let m = atoms.len();
    let dim = sys.dim();
    for _ in 0..64 {
        let floor: Vec<f64> = (0..m).map(|_| rng.gen::<f64>() * 0.1).collect();
        let mut lp = LpProblem::new(m);
        for k in 0..dim {
            let row: Vec<f64> = atoms.iter().map(|a| a[k]).collect();
            lp.eq(row, sys.unit_coords()[k]);
        }
        for i in 0..m {
            let mut row = vec![0.0; m];
            row[i] = 1.0;
            lp.lb(row.clone(), floor[i]);
            lp.ub(row, 1.0);
        }
        if let LpOutcome::Feasible(c) = lp.solve()? {
            let effects: Vec<EffectVec> = atoms
                .iter()
                .zip(c.iter())
                .filter(|(_, &ci)| ci > 1e-12)
                .map(|(a, &ci)| EffectVec::new(a * ci))
                .collect();
            let meas = Measurement::new(effects);
            if sys.is_valid_measurement(&meas).valid {
                return Ok(meas);
            }
        }
    }
    Err(GptError::LpNumericalFailure(
        "no fine-grained atom weighting found".into(),
    ))
}

/// Affinely independent spanning subset of a face's vertices.
fn face_basis(sys: &System, vs: &[usize]) -> Vec<usize> {
    let poly = sys.poly().expect("polytope data");
    let mut basis: Vec<usize> = Vec::new();
    let mut cols: Vec<DVector<f64>> = Vec::new();
    for &i in vs {
        let mut trial = cols.clone();
        trial.push(poly.vertices[i].clone());
        let m = DMatrix::from_columns(&trial);
        if linalg::rank(&m, 1e-10) == trial.len() {
            cols = trial;
            basis.push(i);
        }
    }
    basis
}

/// Filter onto the span of the face `vs`, built as `P = sum_i v_i g_i^T`
/// from functionals found by LP against each candidate complement face, and
/// certified exactly on the vertices. `NotProjective` when no candidate
/// admits a positive, normalized, complemented pair.
pub fn filter_pair(sys: &System, vs: &[usize]) -> Result<(LinearMapA, LinearMapA, Face)> {
    let poly = sys.poly().expect("polytope data");
    let n = poly.vertices.len();
    let dim = sys.dim();
    let f_basis = face_basis(sys, vs);
    if f_basis.is_empty() {
        return Err(GptError::NotProjective("empty face basis".into()));
    }

    // candidate complement faces: disjoint, largest first
    let mut candidates: Vec<Vec<usize>> = poly
        .face_lattice()
        .into_iter()
        .filter(|g| !g.is_empty() && g.len() < n && g.iter().all(|i| !vs.contains(i)))
        .collect();
    candidates.sort_by_key(|g| usize::MAX - g.len());

    'cand: for gface in candidates {
        let g_basis = face_basis(sys, &gface);
        let kf = f_basis.len();
        let kg = g_basis.len();
        let nvars = (kf + kg) * dim;
        let mut lp = LpProblem::new(nvars);
        let gvar = |i: usize, k: usize| i * dim + k;
        let hvar = |j: usize, k: usize| (kf + j) * dim + k;

        // delta conditions and face-interpolation conditions for g
        for (bi, &i) in f_basis.iter().enumerate() {
            for &j in vs {
                // coefficient of v_j in the face basis
                let want = if i == j { 1.0 } else { 0.0 };
                let mut row = vec![0.0; nvars];
                for k in 0..dim {
                    row[gvar(bi, k)] = poly.vertices[j][k];
                }
                if f_basis.contains(&j) {
                    lp.eq(row, want);
                } else {
                    // non-basis face vertices must reproduce their own
                    // affine coordinates: P w = w
                    let coords = convex_like_coords(sys, &f_basis, j);
                    lp.eq(row, coords[bi]);
                }
            }
            // g vanishes on the complement face
            for &j in &gface {
                let mut row = vec![0.0; nvars];
                for k in 0..dim {
                    row[gvar(bi, k)] = poly.vertices[j][k];
                }
                lp.eq(row, 0.0);
            }
        }
        // mirror conditions for h
        for (bj, &j) in g_basis.iter().enumerate() {
            for &l in &gface {
                let want = if j == l { 1.0 } else { 0.0 };
                let mut row = vec![0.0; nvars];
                for k in 0..dim {
                    row[hvar(bj, k)] = poly.vertices[l][k];
                }
                if g_basis.contains(&l) {
                    lp.eq(row, want);
                } else {
                    let coords = convex_like_coords(sys, &g_basis, l);
                    lp.eq(row, coords[bj]);
                }
            }
            for &l in vs {
                let mut row = vec![0.0; nvars];
                for k in 0..dim {
                    row[hvar(bj, k)] = poly.vertices[l][k];
                }
                lp.eq(row, 0.0);
            }
        }
        // positivity and normalization on every vertex, with a small margin
        // keeping the kernels no larger than the complement faces
        for v in 0..n {
            let vert = &poly.vertices[v];
            for bi in 0..kf {
                let mut row = vec![0.0; nvars];
                for k in 0..dim {
                    row[gvar(bi, k)] = vert[k];
                }
                lp.lb(row, 0.0);
            }
            for bj in 0..kg {
                let mut row = vec![0.0; nvars];
                for k in 0..dim {
                    row[hvar(bj, k)] = vert[k];
                }
                lp.lb(row, 0.0);
            }
            let mut sum_g = vec![0.0; nvars];
            for bi in 0..kf {
                for k in 0..dim {
                    sum_g[gvar(bi, k)] = vert[k];
                }
            }
            lp.ub(sum_g.clone(), 1.0);
            if !gface.contains(&v) {
                lp.lb(sum_g, 1e-3);
            }
            let mut sum_h = vec![0.0; nvars];
            for bj in 0..kg {
                for k in 0..dim {
                    sum_h[hvar(bj, k)] = vert[k];
                }
            }
            lp.ub(sum_h.clone(), 1.0);
            if !vs.contains(&v) {
                lp.lb(sum_h, 1e-3);
            }
        }

        let LpOutcome::Feasible(x) = lp.solve()? else {
            continue 'cand;
        };
        let mut p = DMatrix::zeros(dim, dim);
        for (bi, &i) in f_basis.iter().enumerate() {
            let gi = DVector::from_iterator(dim, (0..dim).map(|k| x[gvar(bi, k)]));
            p += &poly.vertices[i] * gi.transpose();
        }
        let mut pc = DMatrix::zeros(dim, dim);
        for (bj, &j) in g_basis.iter().enumerate() {
            let hj = DVector::from_iterator(dim, (0..dim).map(|k| x[hvar(bj, k)]));
            pc += &poly.vertices[j] * hj.transpose();
        }
        // exact certification on vertices
        if linalg::max_abs(&(&p * &p - &p)) > 1e-8 || linalg::max_abs(&(&pc * &pc - &pc)) > 1e-8
        {
            continue 'cand;
        }
        for v in 0..n {
            let img = &p * &poly.vertices[v];
            let img_c = &pc * &poly.vertices[v];
            if poly.cone_margin(&img) < -1e-8 || poly.cone_margin(&img_c) < -1e-8 {
                continue 'cand;
            }
        }
        return Ok((LinearMapA::new(p), LinearMapA::new(pc), Face::Poly(gface)));
    }
    Err(GptError::NotProjective(format!(
        "no complemented positive projection onto face {vs:?}"
    )))
}

/// Coordinates of vertex `j` in the affine basis `basis` (least squares).
fn convex_like_coords(sys: &System, basis: &[usize], j: usize) -> Vec<f64> {
    let poly = sys.poly().expect("polytope data");
    let cols: Vec<DVector<f64>> = basis.iter().map(|&i| poly.vertices[i].clone()).collect();
    let v = DMatrix::from_columns(&cols);
    let svd = v.svd(true, true);
    let sol = svd
        .solve(&poly.vertices[j], 1e-12)
        .expect("face vertex expressible in its basis");
    sol.iter().copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{make_bipyramid, make_square_bit};
    use approx::assert_relative_eq;

    #[test]
    fn square_has_six_distinguishable_pairs_max() {
        let sys = make_square_bit();
        assert_eq!(sys.n_max(), 2);
        // adjacent and opposite pairs are all distinguishable
        assert_eq!(sys.poly_distinguishable.len(), 6);
    }

    #[test]
    fn square_center_decomposes_evenly() {
        let sys = make_square_bit();
        let center = sys.state(DVector::from_vec(vec![1.0, 0.0, 0.0])).unwrap();
        let decs = all_decompositions(&sys, &center);
        // both diagonals, each with weights (1/2, 1/2)
        assert_eq!(decs.len(), 2);
        for (_, w) in decs {
            for wi in w {
                assert_relative_eq!(wi, 0.5, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn generic_square_state_has_no_decomposition() {
        // a state away from every edge and diagonal: weak spectrality fails
        let sys = make_square_bit();
        let omega = sys.state(DVector::from_vec(vec![1.0, 0.3, 0.1])).unwrap();
        assert!(matches!(
            decompose(&sys, &omega),
            Err(GptError::DecompositionUnavailable(_))
        ));
    }

    #[test]
    fn square_symmetry_group_is_dihedral() {
        let sys = make_square_bit();
        assert_eq!(sys.poly_group.len(), 8);
    }

    #[test]
    fn bipyramid_group_order() {
        let sys = make_bipyramid();
        // triangle symmetries times the pole swap
        assert_eq!(sys.poly_group.len(), 12);
    }

    #[test]
    fn bipyramid_barycenter_two_probability_vectors() {
        let sys = make_bipyramid();
        let bary = sys
            .state(DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]))
            .unwrap();
        let decs = all_decompositions(&sys, &bary);
        assert_eq!(decs.len(), 2);
        let mut sizes: Vec<usize> = decs.iter().map(|(s, _)| s.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 3]);
        for (s, w) in &decs {
            let expect = 1.0 / s.len() as f64;
            for &wi in w {
                assert_relative_eq!(wi, expect, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn bipyramid_triangle_is_distinguishable_with_valid_measurement() {
        let sys = make_bipyramid();
        // the barycentric functionals 1/3 + (2/3) cos(theta - theta_i) on
        // the triangle, constant 1/3 at both poles
        let mut effects = Vec::new();
        for j in 0..3 {
            let th = 2.0 * std::f64::consts::PI * j as f64 / 3.0;
            effects.push(EffectVec::new(DVector::from_vec(vec![
                1.0 / 3.0,
                2.0 / 3.0 * th.cos(),
                2.0 / 3.0 * th.sin(),
                0.0,
            ])));
        }
        let m = Measurement::new(effects);
        let check = sys.is_valid_measurement(&m);
        assert!(check.valid, "{:?}", check.failure);
        // and the LP also finds one
        let verts = vertex_states(&sys);
        let found = sys
            .perfectly_distinguishable(&[verts[0].clone(), verts[1].clone(), verts[2].clone()])
            .unwrap();
        assert!(found.is_some());
    }

    #[test]
    fn square_vertex_filter_exists_but_edge_filter_does_not() {
        let sys = make_square_bit();
        let vertex = filter_pair(&sys, &[0]);
        assert!(vertex.is_ok(), "{vertex:?}");
        let (p, pc, _) = vertex.unwrap();
        assert!(linalg::max_abs(&(&p.matrix * &p.matrix - &p.matrix)) < 1e-8);
        assert!(linalg::max_abs(&(&pc.matrix * &pc.matrix - &pc.matrix)) < 1e-8);
        // edges of the square admit no filter
        let lattice = sys.poly().unwrap().face_lattice();
        let edge = lattice.iter().find(|f| f.len() == 2).unwrap().clone();
        assert!(matches!(
            filter_pair(&sys, &edge),
            Err(GptError::NotProjective(_))
        ));
    }

    #[test]
    fn poly_fine_grained_measurements_are_valid() {
        let sys = make_square_bit();
        let mut rng = crate::rng::rng(77);
        for _ in 0..10 {
            let m = fine_grained_sample(&sys, &mut rng).unwrap();
            assert!(sys.is_valid_measurement(&m).valid);
        }
    }
}
