//! Simplicial fans: construction (including the Weyl-chamber fans of type A),
//! smoothness and completeness checks, fan automorphism groups, fan morphisms,
//! divisor pullback, and star fans of divisors.

use crate::gmodule::FiniteGroup;
use crate::zlattice::{kernel_basis, smith_normal_form, IntMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FanError {
    #[error("ray {0} is not primitive")]
    NotPrimitive(usize),
    #[error("rays {0} and {1} coincide")]
    DuplicateRay(usize, usize),
    #[error("cone {0} has an out-of-range or repeated ray index")]
    BadConeIndex(usize),
    #[error("cone {0} is not simplicial (rays are linearly dependent)")]
    NotSimplicial(usize),
    #[error("ray {0} belongs to no maximal cone")]
    OrphanRay(usize),
    #[error("cones {0} and {1} do not intersect in a common face")]
    IntersectionNotFace(usize, usize),
    #[error("cone {0} is not full-dimensional")]
    NotFullDimensional(usize),
    #[error("image of source cone {0} is contained in no target cone")]
    NotCompatible(usize),
    #[error("the type-A fan is only built for n in 1..=3, got {0}")]
    UnsupportedN(usize),
}

/// A simplicial fan given by its primitive ray vectors and maximal cones
/// (as ray-index sets).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fan {
    pub rank: usize,
    pub rays: Vec<Vec<BigInt>>,
    pub max_cones: Vec<Vec<usize>>,
    /// Whether the pairwise face-intersection property was verified
    /// exhaustively (done only for fans with full-dimensional cones and at
    /// most 50 maximal cones).
    pub fully_validated: bool,
}

impl Fan {
    pub fn new(
        rank: usize,
        rays: Vec<Vec<BigInt>>,
        max_cones: Vec<Vec<usize>>,
    ) -> Result<Self, FanError> {
        for (i, v) in rays.iter().enumerate() {
            if v.len() != rank || !is_primitive(v) {
                return Err(FanError::NotPrimitive(i));
            }
            for (j, w) in rays.iter().enumerate().take(i) {
                if v == w {
                    return Err(FanError::DuplicateRay(j, i));
                }
            }
        }
        let mut max_cones = max_cones;
        for (ci, cone) in max_cones.iter_mut().enumerate() {
            cone.sort_unstable();
            if cone.iter().any(|&r| r >= rays.len()) || cone.windows(2).any(|w| w[0] == w[1]) {
                return Err(FanError::BadConeIndex(ci));
            }
            let m = ray_matrix(&rays, cone);
            if m.rank() != cone.len() {
                return Err(FanError::NotSimplicial(ci));
            }
        }
        for r in 0..rays.len() {
            if !max_cones.iter().any(|c| c.contains(&r)) {
                return Err(FanError::OrphanRay(r));
            }
        }
        let full_dim = max_cones.iter().all(|c| c.len() == rank);
        let fully_validated = if rank <= 1 {
            true
        } else if max_cones.len() <= 50 && full_dim {
            check_face_intersections(rank, &rays, &max_cones)?;
            true
        } else {
            false
        };
        Ok(Fan { rank, rays, max_cones, fully_validated })
    }

    pub fn from_i64(rank: usize, rays: &[Vec<i64>], max_cones: &[Vec<usize>]) -> Result<Self, FanError> {
        Fan::new(
            rank,
            rays.iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect()).collect(),
            max_cones.to_vec(),
        )
    }

    pub fn ray_index(&self, v: &[BigInt]) -> Option<usize> {
        self.rays.iter().position(|r| r.as_slice() == v)
    }
}

fn is_primitive(v: &[BigInt]) -> bool {
    let mut g = BigInt::zero();
    for x in v {
        g = g.gcd(x);
    }
    g.is_one()
}

fn primitivize(v: &[BigInt]) -> Vec<BigInt> {
    let mut g = BigInt::zero();
    for x in v {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

/// Columns are the rays of the cone.
fn ray_matrix(rays: &[Vec<BigInt>], cone: &[usize]) -> IntMatrix {
    let rank = rays.first().map_or(0, |r| r.len());
    IntMatrix::from_fn(rank, cone.len(), |i, j| rays[cone[j]][i].clone())
}

/// Solve `sum_j x_j cols[j] = target` over the rationals; `None` if
/// inconsistent. Free variables (if any) are set to zero.
fn solve_rational(cols: &[&Vec<BigInt>], target: &[BigInt]) -> Option<Vec<BigRational>> {
    let rows = target.len();
    let n = cols.len();
    let mut a: Vec<Vec<BigRational>> = (0..rows)
        .map(|i| {
            let mut row: Vec<BigRational> =
                cols.iter().map(|c| BigRational::from(c[i].clone())).collect();
            row.push(BigRational::from(target[i].clone()));
            row
        })
        .collect();
    let mut pivot_cols = vec![];
    let mut r = 0;
    for c in 0..n {
        if let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) {
            a.swap(r, p);
            let inv = a[r][c].clone();
            for x in a[r].iter_mut() {
                *x = &*x / &inv;
            }
            for i in 0..rows {
                if i != r && !a[i][c].is_zero() {
                    let f = a[i][c].clone();
                    for j in 0..=n {
                        let delta = &f * &a[r][j];
                        a[i][j] = &a[i][j] - &delta;
                    }
                }
            }
            pivot_cols.push(c);
            r += 1;
        }
    }
    if (r..rows).any(|i| !a[i][n].is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); n];
    for (ri, &c) in pivot_cols.iter().enumerate() {
        x[c] = a[ri][n].clone();
    }
    Some(x)
}

/// Whether a lattice point lies in the cone spanned by the given rays.
pub fn in_cone(fan: &Fan, cone_index: usize, point: &[BigInt]) -> bool {
    let cone = &fan.max_cones[cone_index];
    let cols: Vec<&Vec<BigInt>> = cone.iter().map(|&r| &fan.rays[r]).collect();
    match solve_rational(&cols, point) {
        None => false,
        Some(x) => {
            // with simplicial cones the solution is unique; verify and
            // check nonnegativity
            for i in 0..point.len() {
                let mut s = BigRational::zero();
                for (j, c) in cols.iter().enumerate() {
                    s += &x[j] * BigRational::from(c[i].clone());
                }
                if s != BigRational::from(point[i].clone()) {
                    return false;
                }
            }
            x.iter().all(|c| !c.is_negative())
        }
    }
}

/// Integer adjugate: adj(m) * m = det(m) * I.
fn adjugate(m: &IntMatrix) -> IntMatrix {
    let n = m.rows;
    if n == 1 {
        return IntMatrix::identity(1);
    }
    IntMatrix::from_fn(n, n, |i, j| {
        let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
        let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
        let minor = m.submatrix(&rows, &cols);
        let cof = minor.det();
        if (i + j) % 2 == 0 {
            cof
        } else {
            -cof
        }
    })
}

/// Exhaustive pairwise check that cone intersections are faces, via the
/// inequality descriptions of the (full-dimensional simplicial) cones.
fn check_face_intersections(
    rank: usize,
    rays: &[Vec<BigInt>],
    max_cones: &[Vec<usize>],
) -> Result<(), FanError> {
    // inequality rows for each cone: rows of sign(det) * adj(V)
    let ineqs: Vec<IntMatrix> = max_cones
        .iter()
        .map(|cone| {
            let v = ray_matrix(rays, cone);
            let adj = adjugate(&v);
            if v.det().is_negative() {
                adj.neg()
            } else {
                adj
            }
        })
        .collect();
    for a in 0..max_cones.len() {
        for b in (a + 1)..max_cones.len() {
            let common: Vec<usize> = max_cones[a]
                .iter()
                .filter(|r| max_cones[b].contains(r))
                .cloned()
                .collect();
            // extreme rays of the intersection cone {x : A x >= 0}
            let stacked = ineqs[a].vcat(&ineqs[b]);
            for dir in extreme_rays(&stacked, rank) {
                let cols: Vec<&Vec<BigInt>> = common.iter().map(|&r| &rays[r]).collect();
                let inside = match solve_rational(&cols, &dir) {
                    None => false,
                    Some(x) => {
                        let consistent = (0..rank).all(|i| {
                            let mut s = BigRational::zero();
                            for (j, c) in cols.iter().enumerate() {
                                s += &x[j] * BigRational::from(c[i].clone());
                            }
                            s == BigRational::from(dir[i].clone())
                        });
                        consistent && x.iter().all(|c| !c.is_negative())
                    }
                };
                if !inside {
                    return Err(FanError::IntersectionNotFace(a, b));
                }
            }
        }
    }
    Ok(())
}

/// Extreme-ray candidates of {x : a x >= 0}: 1-dimensional kernels of
/// (rank-1)-subsets of the rows, filtered by the inequalities.
fn extreme_rays(a: &IntMatrix, rank: usize) -> Vec<Vec<BigInt>> {
    if rank < 2 {
        return vec![];
    }
    let mut out: Vec<Vec<BigInt>> = vec![];
    let row_subsets = subsets_of_size(a.rows, rank - 1);
    for s in row_subsets {
        let sub = a.submatrix(&s, &(0..rank).collect::<Vec<_>>());
        let ker = kernel_basis(&sub);
        if ker.cols != 1 {
            continue;
        }
        let d: Vec<BigInt> = (0..rank).map(|i| ker.at(i, 0).clone()).collect();
        for cand in [d.clone(), d.iter().map(|x| -x).collect::<Vec<_>>()] {
            let ok = (0..a.rows).all(|r| {
                let mut s = BigInt::zero();
                for c in 0..rank {
                    s += a.at(r, c) * &cand[c];
                }
                !s.is_negative()
            });
            if ok {
                let p = primitivize(&cand);
                if !out.contains(&p) {
                    out.push(p);
                }
            }
        }
    }
    out
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut cur = vec![];
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// The fan of Weyl chambers of the root system A_n, in Z^{n+1}/Z(e_0+...+e_n)
/// realized in Z^n via the basis e_0,...,e_{n-1}. Rays are the images of
/// e_I = sum_{i in I} e_i for proper nonempty I, ordered by (|I|, lex);
/// maximal cones are the chains I_1 < I_2 < ... < I_n.
pub fn build_an_fan(n: usize) -> Result<Fan, FanError> {
    if !(1..=3).contains(&n) {
        return Err(FanError::UnsupportedN(n));
    }
    let points = n + 1;
    let mut subsets: Vec<Vec<usize>> = (1u32..(1 << points) - 1)
        .map(|mask| (0..points).filter(|i| mask >> i & 1 == 1).collect())
        .collect();
    subsets.sort_by_key(|s| (s.len(), s.clone()));
    let ray_of_subset = |s: &[usize]| -> Vec<BigInt> {
        // e_i for i < n; e_n = -(e_0 + ... + e_{n-1})
        let mut v = vec![BigInt::zero(); n];
        for &i in s {
            if i < n {
                v[i] += 1;
            } else {
                for x in v.iter_mut() {
                    *x -= 1;
                }
            }
        }
        v
    };
    let rays: Vec<Vec<BigInt>> = subsets.iter().map(|s| ray_of_subset(s)).collect();
    let index_of: BTreeMap<Vec<usize>, usize> =
        subsets.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    // chains of subsets <-> permutations: the k-th subset is the first k
    // letters of the permutation, sorted
    let mut max_cones = vec![];
    for perm in permutations(points) {
        let mut cone = vec![];
        for k in 1..=n {
            let mut s: Vec<usize> = perm[..k].to_vec();
            s.sort_unstable();
            cone.push(index_of[&s]);
        }
        max_cones.push(cone);
    }
    Fan::new(n, rays, max_cones)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut cur: Vec<usize> = vec![];
    let mut used = vec![false; n];
    fn rec(n: usize, cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(n, cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    rec(n, &mut cur, &mut used, &mut out);
    out
}

/// True iff every maximal cone is unimodular. Errors if some maximal cone is
/// not full-dimensional.
pub fn is_smooth(f: &Fan) -> Result<bool, FanError> {
    for (ci, cone) in f.max_cones.iter().enumerate() {
        if cone.len() != f.rank {
            return Err(FanError::NotFullDimensional(ci));
        }
        if !ray_matrix(&f.rays, cone).det().abs().is_one() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff every facet lies in exactly two maximal cones and the facet
/// adjacency graph is connected (valid for full-dimensional simplicial fans).
pub fn is_complete(f: &Fan) -> Result<bool, FanError> {
    if f.rank == 0 {
        return Ok(f.max_cones.len() == 1);
    }
    for (ci, cone) in f.max_cones.iter().enumerate() {
        if cone.len() != f.rank {
            return Err(FanError::NotFullDimensional(ci));
        }
    }
    let mut facets: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (ci, cone) in f.max_cones.iter().enumerate() {
        for drop in 0..cone.len() {
            let facet: Vec<usize> =
                cone.iter().enumerate().filter(|&(k, _)| k != drop).map(|(_, &r)| r).collect();
            facets.entry(facet).or_default().push(ci);
        }
    }
    if facets.values().any(|cs| cs.len() != 2) {
        return Ok(false);
    }
    // connectivity of the adjacency graph
    let n = f.max_cones.len();
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(c) = stack.pop() {
        for cs in facets.values() {
            if cs.contains(&c) {
                for &d in cs {
                    if !seen[d] {
                        seen[d] = true;
                        stack.push(d);
                    }
                }
            }
        }
    }
    Ok(seen.iter().all(|&s| s))
}

/// The full symmetry group of a fan: unimodular matrices permuting the ray
/// set and preserving the maximal-cone set.
#[derive(Clone, Debug)]
pub struct FanAut {
    pub matrices: Vec<IntMatrix>,
    pub ray_permutations: Vec<Vec<usize>>,
    pub group: FiniteGroup,
}

impl FanAut {
    pub fn order(&self) -> usize {
        self.matrices.len()
    }
}

/// Compute the automorphism group by fixing the first maximal cone and
/// filtering the candidate linear maps sending it onto each maximal cone.
/// Elements are ordered canonically: identity first, then lexicographically
/// by matrix entries.
pub fn fan_aut(f: &Fan) -> Result<FanAut, FanError> {
    assert!(is_smooth(f)? && is_complete(f)?, "fan_aut expects a smooth complete fan");
    let base = &f.max_cones[0];
    let v0 = ray_matrix(&f.rays, base);
    let v0inv = {
        let adj = adjugate(&v0);
        if v0.det().is_negative() {
            adj.neg()
        } else {
            adj
        }
    };
    let mut matrices: Vec<IntMatrix> = vec![];
    for target in &f.max_cones {
        for perm in permutations(f.rank) {
            let permuted: Vec<usize> = perm.iter().map(|&k| target[k]).collect();
            let vt = ray_matrix(&f.rays, &permuted);
            let m = vt.mul(&v0inv);
            if !m.is_unimodular() {
                continue;
            }
            if matrices.contains(&m) {
                continue;
            }
            if let Some(_) = ray_permutation(f, &m) {
                if cones_preserved(f, &m) {
                    matrices.push(m);
                }
            }
        }
    }
    matrices.sort_by_key(|m| {
        let entries: Vec<BigInt> =
            (0..m.rows).flat_map(|i| (0..m.cols).map(move |j| m.at(i, j).clone())).collect();
        (!m.is_identity(), entries)
    });
    let ray_permutations: Vec<Vec<usize>> =
        matrices.iter().map(|m| ray_permutation(f, m).expect("filtered above")).collect();
    let n = matrices.len();
    let mul: Vec<Vec<usize>> = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    let p = matrices[a].mul(&matrices[b]);
                    matrices.iter().position(|m| *m == p).expect("closed under product")
                })
                .collect()
        })
        .collect();
    let generators: Vec<usize> = (1..n).collect();
    let group = FiniteGroup::new(mul, generators).expect("automorphisms form a group");
    Ok(FanAut { matrices, ray_permutations, group })
}

/// The induced map on ray indices, if the matrix permutes the ray set.
fn ray_permutation(f: &Fan, m: &IntMatrix) -> Option<Vec<usize>> {
    let mut perm = vec![];
    let mut hit = vec![false; f.rays.len()];
    for v in &f.rays {
        let w = m.mul_vec(v);
        let idx = f.ray_index(&w)?;
        if hit[idx] {
            return None;
        }
        hit[idx] = true;
        perm.push(idx);
    }
    Some(perm)
}

fn cones_preserved(f: &Fan, m: &IntMatrix) -> bool {
    let perm = match ray_permutation(f, m) {
        Some(p) => p,
        None => return false,
    };
    f.max_cones.iter().all(|cone| {
        let mut image: Vec<usize> = cone.iter().map(|&r| perm[r]).collect();
        image.sort_unstable();
        f.max_cones.contains(&image)
    })
}

/// A verified map of fans: a lattice map sending every source cone into some
/// target cone.
#[derive(Clone, Debug)]
pub struct FanMorphism {
    pub matrix: IntMatrix,
    pub source: Fan,
    pub target: Fan,
}

pub fn check_morphism(m: &IntMatrix, source: &Fan, target: &Fan) -> Result<FanMorphism, FanError> {
    assert_eq!((m.rows, m.cols), (target.rank, source.rank), "matrix shape mismatch");
    for (ci, cone) in source.max_cones.iter().enumerate() {
        let images: Vec<Vec<BigInt>> =
            cone.iter().map(|&r| m.mul_vec(&source.rays[r])).collect();
        let ok = (0..target.max_cones.len())
            .any(|tc| images.iter().all(|w| in_cone(target, tc, w)));
        if !ok {
            return Err(FanError::NotCompatible(ci));
        }
    }
    Ok(FanMorphism { matrix: m.clone(), source: source.clone(), target: target.clone() })
}

/// Pull back an invariant divisor (given by its coefficient list on target
/// rays) along a fan morphism: the pullback's coefficient at a source ray v
/// is -<m_sigma, M v> for the support-function datum m_sigma of a target cone
/// containing M v. The target must be smooth (Cartier data are integral).
pub fn pullback_divisor(morphism: &FanMorphism, target_coeffs: &[BigInt]) -> Vec<BigInt> {
    let t = &morphism.target;
    assert_eq!(target_coeffs.len(), t.rays.len(), "coefficient count mismatch");
    morphism
        .source
        .rays
        .iter()
        .map(|v| {
            let w = morphism.matrix.mul_vec(v);
            let tc = (0..t.max_cones.len())
                .find(|&tc| in_cone(t, tc, &w))
                .expect("target fan is complete");
            // solve <m, u_rho> = -a_rho for the rays of the cone
            let cone = &t.max_cones[tc];
            let cols: Vec<&Vec<BigInt>> = cone.iter().map(|&r| &t.rays[r]).collect();
            // transpose system: m^T V = -a, i.e. V^T m = -a
            let vt_cols: Vec<Vec<BigInt>> = (0..t.rank)
                .map(|i| cols.iter().map(|c| c[i].clone()).collect())
                .collect();
            let vt_refs: Vec<&Vec<BigInt>> = vt_cols.iter().collect();
            let rhs: Vec<BigInt> = cone.iter().map(|&r| -&target_coeffs[r]).collect();
            let msol = solve_rational(&vt_refs, &rhs).expect("cone rays are independent");
            let mut val = BigRational::zero();
            for (i, x) in msol.iter().enumerate() {
                val += x * BigRational::from(w[i].clone());
            }
            let coeff = -val;
            assert!(coeff.is_integer(), "pullback of a Cartier divisor is integral");
            coeff.to_integer()
        })
        .collect()
}

/// The star fan of a ray: the fan of the divisor D_rho as a toric variety in
/// the quotient lattice N / Z v_rho. Also returns the projection matrix and
/// the map from star-fan ray indices back to ambient ray indices.
pub struct StarFan {
    pub fan: Fan,
    pub projection: IntMatrix,
    pub ambient_ray: Vec<usize>,
}

pub fn divisor_star_fan(f: &Fan, ray_index: usize) -> StarFan {
    assert!(ray_index < f.rays.len(), "ray index out of range");
    let v = IntMatrix::column_vector(&f.rays[ray_index]);
    let (u, d, _) = smith_normal_form(&v);
    assert!(d.at(0, 0).is_one(), "rays are primitive");
    // rows 1.. of u form a basis of the quotient lattice
    let projection = u.submatrix(
        &(1..f.rank).collect::<Vec<_>>(),
        &(0..f.rank).collect::<Vec<_>>(),
    );
    let mut rays: Vec<Vec<BigInt>> = vec![];
    let mut ambient_ray: Vec<usize> = vec![];
    let mut max_cones: Vec<Vec<usize>> = vec![];
    for cone in &f.max_cones {
        if !cone.contains(&ray_index) {
            continue;
        }
        let mut image_cone = vec![];
        for &r in cone {
            if r == ray_index {
                continue;
            }
            let p = primitivize(&projection.mul_vec(&f.rays[r]));
            let idx = match rays.iter().position(|x| *x == p) {
                Some(i) => i,
                None => {
                    rays.push(p);
                    ambient_ray.push(r);
                    rays.len() - 1
                }
            };
            image_cone.push(idx);
        }
        max_cones.push(image_cone);
    }
    let fan = Fan::new(f.rank - 1, rays, max_cones).expect("star of a ray in a valid fan");
    StarFan { fan, projection, ambient_ray }
}

#[cfg(test)]
pub mod tests {
    use super::*;
    use crate::gmodule::{augmentation_ideal, module_isomorphic, GLattice, IsoResult};

    pub fn p1_fan() -> Fan {
        Fan::from_i64(1, &[vec![1], vec![-1]], &[vec![0], vec![1]]).unwrap()
    }

    pub fn p1xp1_fan() -> Fan {
        Fan::from_i64(
            2,
            &[vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]],
            &[vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3]],
        )
        .unwrap()
    }

    #[test]
    fn an_fan_counts() {
        for (n, nrays, ncones) in [(1, 2, 2), (2, 6, 6), (3, 14, 24)] {
            let f = build_an_fan(n).unwrap();
            assert_eq!(f.rays.len(), nrays);
            assert_eq!(f.max_cones.len(), ncones);
            assert!(f.fully_validated);
            assert!(is_smooth(&f).unwrap());
            assert!(is_complete(&f).unwrap());
        }
        assert!(build_an_fan(0).is_err());
        assert!(build_an_fan(4).is_err());
    }

    #[test]
    fn a1_fan_is_p1() {
        assert_eq!(build_an_fan(1).unwrap(), p1_fan());
    }

    #[test]
    fn a3_ray_vectors_pinned() {
        let f = build_an_fan(3).unwrap();
        let expected: Vec<Vec<i64>> = vec![
            vec![1, 0, 0],
            vec![0, 1, 0],
            vec![0, 0, 1],
            vec![-1, -1, -1],
            vec![1, 1, 0],
            vec![1, 0, 1],
            vec![0, -1, -1],
            vec![0, 1, 1],
            vec![-1, 0, -1],
            vec![-1, -1, 0],
            vec![1, 1, 1],
            vec![0, 0, -1],
            vec![0, -1, 0],
            vec![-1, 0, 0],
        ];
        for (i, e) in expected.iter().enumerate() {
            let v: Vec<BigInt> = e.iter().map(|&x| BigInt::from(x)).collect();
            assert_eq!(f.rays[i], v, "ray {i}");
        }
    }

    #[test]
    fn smoothness_examples() {
        let singular =
            Fan::from_i64(2, &[vec![1, 0], vec![1, 2]], &[vec![0, 1]]).unwrap();
        assert!(!is_smooth(&singular).unwrap());
        assert!(is_smooth(&p1_fan()).unwrap());
    }

    #[test]
    fn completeness_examples() {
        let one_cone = Fan::from_i64(2, &[vec![1, 0], vec![0, 1]], &[vec![0, 1]]).unwrap();
        assert!(!is_complete(&one_cone).unwrap());
        assert!(is_complete(&p1xp1_fan()).unwrap());
    }

    #[test]
    fn fan_aut_p1() {
        let a = fan_aut(&p1_fan()).unwrap();
        assert_eq!(a.order(), 2);
        assert!(a.matrices[0].is_identity());
    }

    #[test]
    fn fan_aut_dp6_order_and_oracle() {
        let f = build_an_fan(2).unwrap();
        let a = fan_aut(&f).unwrap();
        assert_eq!(a.order(), 12);
        // independent oracle: determine the map from its action on two
        // independent rays and keep those that permute rays and cones
        let mut count = 0;
        for i in 0..f.rays.len() {
            for j in 0..f.rays.len() {
                let m = IntMatrix::from_fn(2, 2, |r, c| {
                    if c == 0 {
                        f.rays[i][r].clone()
                    } else {
                        f.rays[j][r].clone()
                    }
                });
                // rays 0 and 1 of dP6 are the standard basis, so m sends
                // e_0, e_1 to rays i, j
                if m.is_unimodular() && ray_permutation(&f, &m).is_some() && cones_preserved(&f, &m)
                {
                    count += 1;
                }
            }
        }
        assert_eq!(count, 12);
    }

    #[test]
    fn fan_aut_a3_is_s4_times_c2() {
        let f = build_an_fan(3).unwrap();
        let a = fan_aut(&f).unwrap();
        assert_eq!(a.order(), 48);
        // the center is {1, -1}
        let center = a.group.center();
        assert_eq!(center.len(), 2);
        let neg = &a.matrices[center[1]];
        assert_eq!(*neg, IntMatrix::identity(3).neg());
        // quotient by the center has the order census of S4
        let q = a.group.quotient(&center);
        let census = q.order_census();
        let expected: std::collections::BTreeMap<usize, usize> =
            [(1, 1), (2, 9), (3, 8), (4, 6)].into_iter().collect();
        assert_eq!(census, expected);
    }

    #[test]
    fn descent_generators_are_fan_automorphisms_and_match_augmentation_ideal() {
        let f = build_an_fan(3).unwrap();
        let a = fan_aut(&f).unwrap();
        let sigma =
            IntMatrix::from_rows(&[vec![-1, 0, 0], vec![0, 0, -1], vec![0, -1, 0]]);
        let tau = IntMatrix::from_rows(&[vec![1, 0, 0], vec![1, -1, 0], vec![1, 0, -1]]);
        assert!(a.matrices.contains(&sigma));
        assert!(a.matrices.contains(&tau));
        // the fan lattice with this action is the augmentation-kernel
        // lattice on the nose
        let g = crate::gmodule::FiniteGroup::klein_four();
        let n_lattice = GLattice::from_generator_matrices(g.clone(), &[sigma, tau]);
        let aug = augmentation_ideal(&g);
        match module_isomorphic(&n_lattice, &aug) {
            IsoResult::Isomorphic(p) => assert!(p.is_identity()),
            other => panic!("expected identity intertwiner, got {:?}", other),
        }
    }

    pub fn a3_to_a1xa1_projection() -> IntMatrix {
        // the pair of weights (x0 - x1, x2 - x3) in the basis e0, e1, e2
        IntMatrix::from_rows(&[vec![1, -1, 0], vec![0, 0, 1]])
    }

    #[test]
    fn morphism_examples() {
        let a3 = build_an_fan(3).unwrap();
        let id = IntMatrix::identity(3);
        assert!(check_morphism(&id, &a3, &a3).is_ok());

        let target = p1xp1_fan();
        let pi = a3_to_a1xa1_projection();
        assert!(check_morphism(&pi, &a3, &target).is_ok());

        let zero = IntMatrix::zero(1, 3);
        assert!(check_morphism(&zero, &a3, &p1_fan()).is_ok());

        // a generic map is not a fan morphism
        let bad = IntMatrix::from_rows(&[vec![1, 1, 0], vec![0, 1, 1]]);
        assert!(check_morphism(&bad, &a3, &target).is_err());
    }

    #[test]
    fn pullback_examples() {
        let a3 = build_an_fan(3).unwrap();
        let id = check_morphism(&IntMatrix::identity(3), &a3, &a3).unwrap();
        let d: Vec<BigInt> = (0..14).map(|i| BigInt::from(i % 3 - 1)).collect();
        assert_eq!(pullback_divisor(&id, &d), d);
        let zero = vec![BigInt::zero(); 14];
        assert_eq!(pullback_divisor(&id, &zero), zero);
    }

    #[test]
    fn pullback_respects_linear_equivalence() {
        // pulling back div(chi^m) gives div of the composed character
        let a3 = build_an_fan(3).unwrap();
        let target = p1xp1_fan();
        let pi = check_morphism(&a3_to_a1xa1_projection(), &a3, &target).unwrap();
        for m in [[1i64, 0], [0, 1], [2, -3], [-1, -1]] {
            // div(chi^m) on target: coefficient <m, v_rho>
            let div_m: Vec<BigInt> = target
                .rays
                .iter()
                .map(|v| BigInt::from(m[0]) * &v[0] + BigInt::from(m[1]) * &v[1])
                .collect();
            let pulled = pullback_divisor(&pi, &div_m);
            let composed: Vec<BigInt> = a3
                .rays
                .iter()
                .map(|v| {
                    let w = pi.matrix.mul_vec(v);
                    BigInt::from(m[0]) * &w[0] + BigInt::from(m[1]) * &w[1]
                })
                .collect();
            assert_eq!(pulled, composed);
        }
    }

    #[test]
    fn star_fan_examples() {
        let p1 = p1_fan();
        let star = divisor_star_fan(&p1, 0);
        assert_eq!(star.fan.rank, 0);
        assert_eq!(star.fan.max_cones.len(), 1);

        let dp6 = build_an_fan(2).unwrap();
        let star = divisor_star_fan(&dp6, 0);
        assert_eq!(star.fan.rank, 1);
        assert_eq!(star.fan.rays.len(), 2);

        // middle-weight ray of the A3 fan: a pair subset, e.g. {0,1} at
        // canonical index 4; its divisor is a quadric surface
        let a3 = build_an_fan(3).unwrap();
        let star = divisor_star_fan(&a3, 4);
        assert_eq!(star.fan.rank, 2);
        assert_eq!(star.fan.rays.len(), 4);
        assert_eq!(star.fan.max_cones.len(), 4);
        // isomorphic to the product fan: match by a linear map determined on
        // two independent rays, as in the dP6 oracle
        let target = p1xp1_fan();
        let f = &star.fan;
        let found = (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).any(|(i, j)| {
            let m = IntMatrix::from_fn(2, 2, |r, c| {
                if c == 0 {
                    target.rays[i][r].clone()
                } else {
                    target.rays[j][r].clone()
                }
            });
            // send the first two star rays (if independent) to target rays
            let v = IntMatrix::from_fn(2, 2, |r, c| f.rays[c][r].clone());
            if !v.det().abs().is_one() {
                return false;
            }
            let adj = adjugate(&v);
            let vinv = if v.det().is_negative() { adj.neg() } else { adj };
            let cand = m.mul(&vinv);
            if !cand.is_unimodular() {
                return false;
            }
            // cand maps star rays into target rays bijectively and cones to
            // cones
            let mut perm = vec![];
            for ray in &f.rays {
                match target.ray_index(&cand.mul_vec(ray)) {
                    Some(k) => perm.push(k),
                    None => return false,
                }
            }
            let mut sorted = perm.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != 4 {
                return false;
            }
            f.max_cones.iter().all(|cone| {
                let mut image: Vec<usize> = cone.iter().map(|&r| perm[r]).collect();
                image.sort_unstable();
                target.max_cones.contains(&image)
            })
        });
        assert!(found, "star fan of a middle ray is the product fan");
    }

    #[test]
    fn invalid_fan_inputs() {
        // non-primitive ray
        assert!(Fan::from_i64(1, &[vec![2]], &[vec![0]]).is_err());
        // duplicate rays
        assert!(Fan::from_i64(1, &[vec![1], vec![1]], &[vec![0], vec![1]]).is_err());
        // dependent rays in one cone
        assert!(Fan::from_i64(2, &[vec![1, 0], vec![-1, 0]], &[vec![0, 1]]).is_err());
        // orphan ray
        assert!(Fan::from_i64(2, &[vec![1, 0], vec![0, 1], vec![1, 1]], &[vec![0, 1]]).is_err());
        // overlapping cones that do not meet in a face
        let bad = Fan::from_i64(
            2,
            &[vec![1, 0], vec![0, 1], vec![1, -1]],
            &[vec![0, 1], vec![1, 2]],
        );
        assert!(matches!(bad, Err(FanError::IntersectionNotFace(_, _))));
    }

    #[test]
    fn aut_matrices_are_ray_and_cone_permutations() {
        for n in 1..=3 {
            let f = build_an_fan(n).unwrap();
            let a = fan_aut(&f).unwrap();
            assert_eq!(a.order() % 2, 0);
            for (m, perm) in a.matrices.iter().zip(&a.ray_permutations) {
                for (ri, ray) in f.rays.iter().enumerate() {
                    assert_eq!(m.mul_vec(ray), f.rays[perm[ri]]);
                }
                assert!(cones_preserved(&f, m));
            }
            // the outer involution -1 is always present
            let neg = IntMatrix::identity(f.rank).neg();
            assert!(a.matrices.contains(&neg));
        }
    }
}
