//! Exact engine for polytopal state spaces.
//!
//! States live as rays of the cone over a polytope whose vertices are
//! homogenized with a leading 1. Facets are enumerated by brute force over
//! affinely independent vertex subsets: inputs are desk scale (at most a few
//! dozen vertices in ambient dimension <= 6), so the O(C(n, d)) scan is
//! acceptable and the code stays auditable.

use crate::error::{GptError, Result};
use crate::linalg;
use nalgebra::{DMatrix, DVector};

/// Tightness tolerance for facet/vertex incidence.
const INCIDENCE_TOL: f64 = 1e-9;

const MAX_VERTICES: usize = 64;
const MAX_AMBIENT: usize = 7; // homogenized dimension of a 6-dim input

/// V- and H-representation of a polytopal state space plus its face lattice.
#[derive(Debug, Clone)]
pub struct PolytopeSpec {
    /// Homogenized vertices `(1, x)`, one ray per pure state.
    pub vertices: Vec<DVector<f64>>,
    /// Unit-norm facet functionals `g` of the cone: `g . v >= 0` for all
    /// vertices, tight on an affinely (d-1)-dimensional subset.
    pub facets: Vec<DVector<f64>>,
}

impl PolytopeSpec {
    /// Build from affine vertex coordinates (without the leading 1).
    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let rays: Vec<DVector<f64>> = points
            .iter()
            .map(|p| {
                let mut v = Vec::with_capacity(p.len() + 1);
                v.push(1.0);
                v.extend_from_slice(p);
                DVector::from_vec(v)
            })
            .collect();
        Self::from_rays(rays)
    }

    /// Build from homogenized rays.
    pub fn from_rays(rays: Vec<DVector<f64>>) -> Result<Self> {
        let facets = cone_facets(&rays)?;
        Ok(Self {
            vertices: rays,
            facets,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.vertices.first().map(|v| v.len()).unwrap_or(0)
    }

    /// Worst facet margin; nonnegative iff `x` is in the cone.
    pub fn cone_margin(&self, x: &DVector<f64>) -> f64 {
        self.facets
            .iter()
            .map(|g| g.dot(x))
            .fold(f64::INFINITY, f64::min)
    }

    /// Indices of facets tight at `x`.
    fn tight_facets(&self, x: &DVector<f64>) -> Vec<usize> {
        let scale = x.amax().max(1.0);
        self.facets
            .iter()
            .enumerate()
            .filter(|(_, g)| g.dot(x).abs() <= INCIDENCE_TOL * scale)
            .map(|(i, _)| i)
            .collect()
    }

    /// Vertex set of the tight region of facet `f`.
    pub fn facet_vertex_set(&self, f: usize) -> Vec<usize> {
        let g = &self.facets[f];
        self.vertices
            .iter()
            .enumerate()
            .filter(|(_, v)| g.dot(v).abs() <= INCIDENCE_TOL * v.amax().max(1.0))
            .map(|(i, _)| i)
            .collect()
    }

    /// Smallest face containing `x`, as a sorted vertex index set. The full
    /// polytope comes back for interior points.
    pub fn face_of(&self, x: &DVector<f64>) -> Result<Vec<usize>> {
        let margin = self.cone_margin(x);
        if margin < -INCIDENCE_TOL * x.amax().max(1.0) {
            return Err(GptError::NotInCone { margin });
        }
        let tight = self.tight_facets(x);
        let mut face: Vec<usize> = (0..self.vertices.len()).collect();
        for f in tight {
            let vs = self.facet_vertex_set(f);
            face.retain(|i| vs.contains(i));
        }
        Ok(face)
    }

    /// All faces as sorted vertex index sets, from the empty face to the
    /// whole polytope. Closed under intersection by construction.
    pub fn face_lattice(&self) -> Vec<Vec<usize>> {
        let full: Vec<usize> = (0..self.vertices.len()).collect();
        let mut faces: Vec<Vec<usize>> = vec![full];
        for f in 0..self.facets.len() {
            let vs = self.facet_vertex_set(f);
            if !faces.contains(&vs) {
                faces.push(vs);
            }
        }
        // close under pairwise intersection
        loop {
            let mut added = false;
            let snapshot = faces.clone();
            for a in &snapshot {
                for b in &snapshot {
                    let inter: Vec<usize> =
                        a.iter().copied().filter(|i| b.contains(i)).collect();
                    if !faces.contains(&inter) {
                        faces.push(inter);
                        added = true;
                    }
                }
            }
            if !added {
                break;
            }
        }
        if !faces.contains(&Vec::new()) {
            faces.push(Vec::new());
        }
        faces.sort_by_key(|f| (f.len(), f.clone()));
        faces
    }

    /// Maximal normalized effects on the extreme rays of the dual cone:
    /// one atom per facet, scaled so the largest value on a vertex is 1.
    pub fn atoms(&self) -> Vec<DVector<f64>> {
        self.facets
            .iter()
            .map(|g| {
                let top = self
                    .vertices
                    .iter()
                    .map(|v| g.dot(v))
                    .fold(f64::NEG_INFINITY, f64::max);
                g / top
            })
            .collect()
    }
}

/// Advance `idx` to the next k-subset of `0..n` in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] != i + n - k {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Facet functionals of the cone generated by `rays`: complete and
/// irredundant, unit norm, oriented so `g . v >= 0` on every ray.
///
/// Errors with `DegenerateInput` when the rays do not span the ambient
/// space (the affine-hull dimension is reported inside).
pub fn cone_facets(rays: &[DVector<f64>]) -> Result<Vec<DVector<f64>>> {
    let n = rays.len();
    if n == 0 {
        return Err(GptError::Invalid("no rays given".into()));
    }
    let d = rays[0].len();
    if n > MAX_VERTICES || d > MAX_AMBIENT {
        return Err(GptError::EnumerationBudgetExceeded(format!(
            "{n} rays in ambient dimension {d}"
        )));
    }
    let ray_mat = DMatrix::from_columns(rays).transpose();
    let r = linalg::rank(&ray_mat, 1e-10);
    if r < d {
        return Err(GptError::DegenerateInput { hull_dim: r });
    }
    if d == 1 {
        // half-line: the single facet is the identity functional
        return Ok(vec![DVector::from_vec(vec![1.0])]);
    }
    if n < d - 1 {
        return Ok(Vec::new());
    }

    let mut facets: Vec<DVector<f64>> = Vec::new();
    let mut idx: Vec<usize> = (0..d - 1).collect();
    loop {
        // candidate normal orthogonal to the chosen d-1 rays
        let rows: Vec<_> = idx.iter().map(|&i| rays[i].transpose()).collect();
        let m = DMatrix::from_rows(&rows);
        let ns = linalg::nullspace(&m, 1e-10);
        if ns.len() == 1 {
            let mut g = ns[0].clone();
            let vals: Vec<f64> = rays.iter().map(|v| g.dot(v)).collect();
            let pos = vals.iter().any(|&v| v > INCIDENCE_TOL);
            let neg = vals.iter().any(|&v| v < -INCIDENCE_TOL);
            if !(pos && neg) {
                if neg {
                    g = -g;
                }
                let tight: Vec<usize> = vals
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| v.abs() <= INCIDENCE_TOL)
                    .map(|(i, _)| i)
                    .collect();
                let tight_rows: Vec<_> = tight.iter().map(|&i| rays[i].transpose()).collect();
                let tight_rank = if tight_rows.is_empty() {
                    0
                } else {
                    linalg::rank(&DMatrix::from_rows(&tight_rows), 1e-10)
                };
                if tight_rank == d - 1 {
                    let g = g.normalize();
                    let dup = facets
                        .iter()
                        .any(|f| (f - &g).norm() < 1e-8 || (f + &g).norm() < 1e-8);
                    if !dup {
                        facets.push(g);
                    }
                }
            }
        }
        if !next_combination(&mut idx, n) {
            return Ok(facets);
        }
    }
}

/// Generating rays of the internal dual cone `{ y : (y, x) >= 0 for all x }`
/// with respect to the inner product given by the symmetric positive-definite
/// matrix `ip`. Exact via facet-ray duality: `(y, x) = (ip y) . x`, so the
/// dual rays are `ip^{-1}` images of the standard-dual extreme rays.
pub fn dual_cone(rays: &[DVector<f64>], ip: &DMatrix<f64>) -> Result<Vec<DVector<f64>>> {
    let facets = cone_facets(rays)?;
    let inv = ip
        .clone()
        .try_inverse()
        .ok_or(GptError::SingularInnerProduct)?;
    Ok(facets.iter().map(|g| (&inv * g).normalize()).collect())
}

/// Compare two ray sets up to positive scaling and reordering.
pub fn same_ray_set(a: &[DVector<f64>], b: &[DVector<f64>], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let norm_a: Vec<_> = a.iter().map(|r| r.normalize()).collect();
    let norm_b: Vec<_> = b.iter().map(|r| r.normalize()).collect();
    norm_a
        .iter()
        .all(|ra| norm_b.iter().any(|rb| (ra - rb).norm() < tol))
        && norm_b
            .iter()
            .all(|rb| norm_a.iter().any(|ra| (ra - rb).norm() < tol))
}

/// Vertices of the bounded polyhedron `{ x : a_i . x <= b_i }`, by brute
/// force over d-subsets of tight constraints.
pub fn hpoly_vertices(ineqs: &[(DVector<f64>, f64)]) -> Result<Vec<DVector<f64>>> {
    if ineqs.is_empty() {
        return Ok(Vec::new());
    }
    let d = ineqs[0].0.len();
    let n = ineqs.len();
    if n > 2 * MAX_VERTICES || d > MAX_AMBIENT {
        return Err(GptError::EnumerationBudgetExceeded(format!(
            "{n} inequalities in dimension {d}"
        )));
    }
    if n < d {
        return Ok(Vec::new());
    }
    let mut verts: Vec<DVector<f64>> = Vec::new();
    let mut idx: Vec<usize> = (0..d).collect();
    loop {
        let rows: Vec<_> = idx.iter().map(|&i| ineqs[i].0.transpose()).collect();
        let m = DMatrix::from_rows(&rows);
        let rhs = DVector::from_iterator(d, idx.iter().map(|&i| ineqs[i].1));
        if let Some(sol) = m.lu().solve(&rhs) {
            let consistent = idx
                .iter()
                .all(|&i| (ineqs[i].0.dot(&sol) - ineqs[i].1).abs() < 1e-7);
            let feasible = ineqs
                .iter()
                .all(|(a, b)| a.dot(&sol) <= b + INCIDENCE_TOL * (1.0 + b.abs()));
            if consistent && feasible {
                let dup = verts.iter().any(|v| (v - &sol).norm() < 1e-8);
                if !dup {
                    verts.push(sol);
                }
            }
        }
        if !next_combination(&mut idx, n) {
            return Ok(verts);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> PolytopeSpec {
        PolytopeSpec::from_points(&[
            vec![1.0, 1.0],
            vec![1.0, -1.0],
            vec![-1.0, 1.0],
            vec![-1.0, -1.0],
        ])
        .unwrap()
    }

    #[test]
    fn square_has_four_facets() {
        assert_eq!(unit_square().facets.len(), 4);
    }

    #[test]
    fn simplex_has_n_facets() {
        for n in 1..=5usize {
            // standard simplex as rays = coordinate basis of R^n
            let rays: Vec<DVector<f64>> = (0..n)
                .map(|i| DVector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 }))
                .collect();
            let facets = cone_facets(&rays).unwrap();
            assert_eq!(facets.len(), n, "orthant in dim {n}");
        }
    }

    #[test]
    fn bipyramid_has_six_facets() {
        let mut pts = Vec::new();
        for j in 0..3 {
            let th = 2.0 * std::f64::consts::PI * j as f64 / 3.0;
            pts.push(vec![th.cos(), th.sin(), 0.0]);
        }
        pts.push(vec![0.0, 0.0, 1.0]);
        pts.push(vec![0.0, 0.0, -1.0]);
        let spec = PolytopeSpec::from_points(&pts).unwrap();
        assert_eq!(spec.facets.len(), 6);
    }

    #[test]
    fn degenerate_input_reports_hull_dimension() {
        // three collinear points in the plane
        let res = PolytopeSpec::from_points(&[vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]);
        match res {
            Err(GptError::DegenerateInput { hull_dim }) => assert_eq!(hull_dim, 2),
            other => panic!("expected DegenerateInput, got {other:?}"),
        }
    }

    #[test]
    fn orthant_is_self_dual() {
        let rays: Vec<DVector<f64>> = (0..3)
            .map(|i| DVector::from_fn(3, |j, _| if i == j { 1.0 } else { 0.0 }))
            .collect();
        let dual = dual_cone(&rays, &DMatrix::identity(3, 3)).unwrap();
        assert!(same_ray_set(&rays, &dual, 1e-9));
    }

    #[test]
    fn square_cone_dual_is_rotated_square_cone() {
        let spec = unit_square();
        let dual = dual_cone(&spec.vertices, &DMatrix::identity(3, 3)).unwrap();
        // dual base vertices sit over (+-1, 0) and (0, +-1): the square
        // rotated 45 degrees about the axis
        let expected: Vec<DVector<f64>> = [
            [1.0, 1.0, 0.0],
            [1.0, -1.0, 0.0],
            [1.0, 0.0, 1.0],
            [1.0, 0.0, -1.0],
        ]
        .iter()
        .map(|v| DVector::from_vec(v.to_vec()))
        .collect();
        assert!(same_ray_set(&dual, &expected, 1e-9));
    }

    #[test]
    fn double_duality_restores_square_cone() {
        let spec = unit_square();
        let ip = DMatrix::identity(3, 3);
        let dual = dual_cone(&spec.vertices, &ip).unwrap();
        let ddual = dual_cone(&dual, &ip).unwrap();
        assert!(same_ray_set(&spec.vertices, &ddual, 1e-9));
    }

    #[test]
    fn face_of_levels() {
        let spec = unit_square();
        // vertex atom
        let v0 = spec.vertices[0].clone();
        assert_eq!(spec.face_of(&v0).unwrap().len(), 1);
        // relative interior of an edge between vertices 0=(1,1) and 1=(1,-1)
        let edge_pt = DVector::from_vec(vec![1.0, 1.0, 0.2]);
        let face = spec.face_of(&edge_pt).unwrap();
        assert_eq!(face, vec![0, 1]);
        // interior point
        let inner = DVector::from_vec(vec![1.0, 0.1, -0.2]);
        assert_eq!(spec.face_of(&inner).unwrap().len(), 4);
    }

    #[test]
    fn face_of_rejects_outside_points() {
        let spec = unit_square();
        let out = DVector::from_vec(vec![1.0, 2.0, 0.0]);
        assert!(matches!(
            spec.face_of(&out),
            Err(GptError::NotInCone { .. })
        ));
    }

    #[test]
    fn square_lattice_size() {
        // empty, 4 vertices, 4 edges, full: 10 faces
        let spec = unit_square();
        assert_eq!(spec.face_lattice().len(), 10);
    }

    #[test]
    fn square_atoms_are_edge_functionals() {
        let spec = unit_square();
        let atoms = spec.atoms();
        assert_eq!(atoms.len(), 4);
        for a in &atoms {
            let vals: Vec<f64> = spec.vertices.iter().map(|v| a.dot(v)).collect();
            let top = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let bot = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!((top - 1.0).abs() < 1e-9);
            assert!(bot.abs() < 1e-9);
            // each atom is 1 on exactly two vertices (an edge)
            assert_eq!(vals.iter().filter(|v| (**v - 1.0).abs() < 1e-9).count(), 2);
        }
    }

    #[test]
    fn effect_polytope_vertices_of_interval() {
        // [0,1]^2 as an H-polytope
        let ineqs = vec![
            (DVector::from_vec(vec![1.0, 0.0]), 1.0),
            (DVector::from_vec(vec![-1.0, 0.0]), 0.0),
            (DVector::from_vec(vec![0.0, 1.0]), 1.0),
            (DVector::from_vec(vec![0.0, -1.0]), 0.0),
        ];
        let verts = hpoly_vertices(&ineqs).unwrap();
        assert_eq!(verts.len(), 4);
    }
}
