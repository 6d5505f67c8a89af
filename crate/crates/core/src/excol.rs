//! Exceptional collections of torsion complete-intersection objects on smooth
//! complete toric varieties: Koszul resolutions, Ext computation by Cech
//! hypercohomology over the maximal-cone cover, collection verification, and
//! the standard collections on the type-A Weyl-chamber fans.

use crate::divclass::{self, CohomologyDims, DivClassError, TDivisor};
use crate::fan::{build_an_fan, check_morphism, Fan, FanError};
use crate::zlattice::IntMatrix;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use std::collections::{BTreeSet, HashMap};
use std::sync::Mutex;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExcolError {
    #[error("vanishing rays of object '{0}' do not span a cone of the fan")]
    VanishingNotACone(String),
    #[error("duplicate object label '{0}'")]
    DuplicateLabel(String),
    #[error("collection has {labels} labels for {objects} objects")]
    LabelCountMismatch { labels: usize, objects: usize },
    #[error(transparent)]
    Cohomology(#[from] DivClassError),
    #[error(transparent)]
    Fan(#[from] FanError),
}

/// A torsion complete-intersection object R(chi)/(x_rho : rho in vanishing):
/// the line bundle O(chi) restricted to the closed stratum cut out by the
/// vanishing rays. An empty vanishing set gives the line bundle itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TCIObject {
    pub chi: TDivisor,
    /// Sorted ray indices; they must span a cone of the fan so that the
    /// corresponding coordinates form a regular sequence.
    pub vanishing: Vec<usize>,
}

impl TCIObject {
    pub fn new(f: &Fan, chi: TDivisor, mut vanishing: Vec<usize>) -> Result<Self, ExcolError> {
        vanishing.sort_unstable();
        vanishing.dedup();
        let spans_cone = vanishing.is_empty()
            || f.max_cones.iter().any(|c| vanishing.iter().all(|r| c.contains(r)));
        if vanishing.iter().any(|&r| r >= f.rays.len()) || !spans_cone {
            return Err(ExcolError::VanishingNotACone(format!("{vanishing:?}")));
        }
        Ok(TCIObject { chi, vanishing })
    }

    pub fn line_bundle(f: &Fan, chi: TDivisor) -> Self {
        TCIObject::new(f, chi, vec![]).expect("empty vanishing set")
    }

    pub fn structure_sheaf(f: &Fan) -> Self {
        TCIObject::line_bundle(f, TDivisor::zero(f))
    }
}

/// An ordered list of labelled objects.
#[derive(Clone, Debug)]
pub struct Collection {
    pub objects: Vec<TCIObject>,
    pub labels: Vec<String>,
}

impl Collection {
    pub fn new(objects: Vec<TCIObject>, labels: Vec<String>) -> Result<Self, ExcolError> {
        if objects.len() != labels.len() {
            return Err(ExcolError::LabelCountMismatch {
                labels: labels.len(),
                objects: objects.len(),
            });
        }
        let mut seen = BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.clone()) {
                return Err(ExcolError::DuplicateLabel(l.clone()));
            }
        }
        Ok(Collection { objects, labels })
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }
}

/// The Koszul resolution of a torsion complete-intersection object: term p
/// holds the twists chi - D_P over the p-element subsets P of the vanishing
/// set. Construction checks that the differential squares to zero.
#[derive(Clone, Debug)]
pub struct KoszulComplex {
    /// terms[p] lists (subset, twist) with |subset| = p.
    pub terms: Vec<Vec<(Vec<usize>, TDivisor)>>,
}

/// Sign of x_l inside the sorted subset encoded by `mask`: parity of the
/// number of members below l.
fn subset_sign(mask: u32, l: usize) -> i64 {
    if (mask & ((1u32 << l) - 1)).count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn koszul(f: &Fan, obj: &TCIObject) -> KoszulComplex {
    let k = obj.vanishing.len();
    let mut terms: Vec<Vec<(Vec<usize>, TDivisor)>> = vec![vec![]; k + 1];
    for mask in 0u32..(1 << k) {
        let subset: Vec<usize> =
            (0..k).filter(|&i| mask >> i & 1 == 1).map(|i| obj.vanishing[i]).collect();
        let mut coeffs = obj.chi.coeffs.clone();
        for &r in &subset {
            coeffs[r] -= 1;
        }
        terms[subset.len()].push((subset, TDivisor::new(f, coeffs)));
    }
    // d(e_P) = sum_{l in P} sign(l, P) x_l e_{P \ l}; check that composing
    // two steps cancels: the coefficient of each (target, {l, l'}) is zero
    let mut square: HashMap<(u32, usize, usize), i64> = HashMap::new();
    for mask in 0u32..(1 << k) {
        for l in 0..k {
            if mask >> l & 1 == 0 {
                continue;
            }
            let mid = mask & !(1u32 << l);
            for l2 in 0..k {
                if mid >> l2 & 1 == 0 {
                    continue;
                }
                let target = mid & !(1u32 << l2);
                let s = subset_sign(mask, l) * subset_sign(mid, l2);
                let key = (target, l.min(l2), l.max(l2));
                *square.entry(key).or_insert(0) += s;
            }
        }
    }
    assert!(square.values().all(|&s| s == 0), "Koszul differential squares to zero");
    KoszulComplex { terms }
}

/// One line-bundle strand of the Hom complex Hom(Koszul(E), Koszul(F)):
/// the generator g_{P,Q} in degree |P| - |Q| with twist
/// (chi_F - D_Q) - (chi_E - D_P).
struct Strand {
    degree: i64,
    /// Twist coefficients as i64 (the bundled data is small).
    coeffs: Vec<i64>,
    twist: TDivisor,
}

/// A component of the Hom-complex differential: multiplication by a single
/// coordinate from strand `from` to strand `to`, with the Koszul sign. On
/// each character-graded piece the map is the scalar `sign` wherever both
/// sides are present.
struct Arrow {
    from: usize,
    to: usize,
    sign: i64,
}

/// Ext computation engine for one fan, with a shared cache of per-character
/// complex cohomology keyed by the bad-ray pattern of each strand.
pub struct ExtEngine {
    pub fan: Fan,
    rays_i64: Vec<Vec<i64>>,
    /// Per ray: bitmask of the maximal cones containing it.
    stars: Vec<u32>,
    cache: Mutex<HashMap<(usize, usize, Vec<u32>), (i64, Vec<usize>)>>,
}

impl ExtEngine {
    pub fn new(f: &Fan) -> Self {
        assert!(f.max_cones.len() <= 32, "at most 32 maximal cones supported");
        assert!(f.rays.len() <= 32, "at most 32 rays supported");
        let rays_i64: Vec<Vec<i64>> = f
            .rays
            .iter()
            .map(|v| v.iter().map(|x| x.to_i64().expect("small ray coordinates")).collect())
            .collect();
        let stars: Vec<u32> = (0..f.rays.len())
            .map(|r| {
                f.max_cones
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.contains(&r))
                    .fold(0u32, |acc, (ci, _)| acc | 1 << ci)
            })
            .collect();
        ExtEngine { fan: f.clone(), rays_i64, stars, cache: Mutex::new(HashMap::new()) }
    }

    /// Dimensions of Ext^n(E, F) for n = 0.. (at least up to the fan rank).
    ///
    /// Method: Hom(Koszul(E), Koszul(F)) is a complex of line bundles; its
    /// hypercohomology is computed character by character from the Cech
    /// complex over the affine cover by maximal cones. For each character the
    /// Cech complex of a strand is the complement, inside the full simplex on
    /// the cover, of the subcomplex K generated by the stars of the strand's
    /// bad rays; the total complex is therefore quasi-isomorphic to the
    /// mapping fiber of (strand generators) -> (total complex of the K's),
    /// which is finite and exact to compute.
    pub fn ext_dims(&self, e: &TCIObject, f: &TCIObject) -> Result<CohomologyDims, ExcolError> {
        let (strands, arrows) = self.build_strands(e, f);
        let mut lo = vec![i64::MAX; self.fan.rank];
        let mut hi = vec![i64::MIN; self.fan.rank];
        for s in &strands {
            let (l, h) = divclass::candidate_box(&self.fan, &s.twist);
            for i in 0..self.fan.rank {
                lo[i] = lo[i].min(l[i]);
                hi[i] = hi[i].max(h[i]);
            }
        }
        let mut acc: HashMap<i64, usize> = HashMap::new();
        let mut m = lo.clone();
        'outer: loop {
            let masks: Vec<u32> = strands.iter().map(|s| self.bad_mask(s, &m)).collect();
            let (n_lo, dims) = self.cached_contribution(&strands, &arrows, masks);
            let on_shell =
                m.iter().zip(lo.iter().zip(&hi)).any(|(&x, (&l, &h))| x == l || x == h);
            if on_shell && dims.iter().any(|&d| d != 0) {
                return Err(DivClassError::ShellNotVanishing.into());
            }
            for (k, &d) in dims.iter().enumerate() {
                if d != 0 {
                    *acc.entry(n_lo + k as i64).or_insert(0) += d;
                }
            }
            let mut pos = 0;
            loop {
                if pos == m.len() {
                    break 'outer;
                }
                if m[pos] < hi[pos] {
                    m[pos] += 1;
                    break;
                }
                m[pos] = lo[pos];
                pos += 1;
            }
        }
        let top = acc.keys().cloned().max().unwrap_or(0).max(self.fan.rank as i64);
        for (&n, &d) in &acc {
            assert!(n >= 0 || d == 0, "Ext in negative degree {n}");
        }
        let dims: Vec<usize> =
            (0..=top).map(|n| acc.get(&n).cloned().unwrap_or(0)).collect();
        Ok(CohomologyDims { dims })
    }

    fn bad_mask(&self, s: &Strand, m: &[i64]) -> u32 {
        let mut mask = 0u32;
        for (r, v) in self.rays_i64.iter().enumerate() {
            let pairing: i64 = v.iter().zip(m).map(|(a, b)| a * b).sum();
            if pairing < -s.coeffs[r] {
                mask |= 1 << r;
            }
        }
        mask
    }

    fn build_strands(&self, e: &TCIObject, f: &TCIObject) -> (Vec<Strand>, Vec<Arrow>) {
        let ke = e.vanishing.len();
        let kf = f.vanishing.len();
        let index = |p: u32, q: u32| -> usize { (p as usize) << kf | q as usize };
        let mut strands = Vec::with_capacity(1 << (ke + kf));
        let mut arrows = vec![];
        for p in 0u32..(1 << ke) {
            for q in 0u32..(1 << kf) {
                let degree = p.count_ones() as i64 - q.count_ones() as i64;
                let mut coeffs_big = f.chi.sub(&e.chi).coeffs;
                for l in 0..kf {
                    if q >> l & 1 == 1 {
                        coeffs_big[f.vanishing[l]] -= 1;
                    }
                }
                for l in 0..ke {
                    if p >> l & 1 == 1 {
                        coeffs_big[e.vanishing[l]] += 1;
                    }
                }
                let coeffs: Vec<i64> = coeffs_big
                    .iter()
                    .map(|x| x.to_i64().expect("small twist coefficients"))
                    .collect();
                strands.push(Strand {
                    degree,
                    coeffs,
                    twist: TDivisor::new(&self.fan, coeffs_big),
                });
                // d(g_{P,Q}) = sum_{l in Q} sign(l,Q) x_l g_{P, Q-l}
                //            - (-1)^deg sum_{l not in P} sign(l,P+l) x_l g_{P+l, Q}
                for l in 0..kf {
                    if q >> l & 1 == 1 {
                        arrows.push(Arrow {
                            from: index(p, q),
                            to: index(p, q & !(1 << l)),
                            sign: subset_sign(q, l),
                        });
                    }
                }
                let flip = if degree % 2 == 0 { -1 } else { 1 };
                for l in 0..ke {
                    if p >> l & 1 == 0 {
                        arrows.push(Arrow {
                            from: index(p, q),
                            to: index(p | 1 << l, q),
                            sign: flip * subset_sign(p | 1 << l, l),
                        });
                    }
                }
            }
        }
        (strands, arrows)
    }

    fn cached_contribution(
        &self,
        strands: &[Strand],
        arrows: &[Arrow],
        masks: Vec<u32>,
    ) -> (i64, Vec<usize>) {
        // the result depends only on the Koszul shape (strand count per
        // side) and the bad-ray pattern of each strand
        let ke = strands.iter().map(|s| s.degree).max().unwrap() as usize;
        let kf = (-strands.iter().map(|s| s.degree).min().unwrap()) as usize;
        let key = (ke, kf, masks);
        if let Some(hit) = self.cache.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let value = contribution(strands, arrows, &key.2, &self.stars);
        self.cache.lock().unwrap().insert(key, value.clone());
        value
    }
}

/// Basis item of the per-character total complex: a strand generator
/// (mask 0) or a simplex of the strand's bad-star complex (mask = the set of
/// maximal cones, always nonzero).
type Item = (usize, u32);

/// Assemble the per-character total complex for one bad-mask pattern:
/// returns the lowest degree, the bases per degree and the differential
/// matrices (entry [n] maps degree n to degree n+1).
fn assemble_complex(
    strands: &[Strand],
    arrows: &[Arrow],
    masks: &[u32],
    stars: &[u32],
) -> (i64, Vec<Vec<Item>>, Vec<Vec<Vec<i64>>>) {
    // simplices of K_s: all nonempty subsets of star(rho) over bad rays rho
    let cells: Vec<BTreeSet<u32>> = masks
        .iter()
        .map(|&mask| {
            let mut set = BTreeSet::new();
            for (r, &star) in stars.iter().enumerate() {
                if mask >> r & 1 == 0 {
                    continue;
                }
                let mut sub = star;
                while sub != 0 {
                    set.insert(sub);
                    sub = (sub - 1) & star;
                }
            }
            set
        })
        .collect();
    let n_lo = strands.iter().map(|s| s.degree).min().unwrap();
    let n_hi = strands
        .iter()
        .enumerate()
        .map(|(si, s)| {
            s.degree + cells[si].iter().map(|c| c.count_ones() as i64).max().unwrap_or(0)
        })
        .max()
        .unwrap();
    // basis per total degree: strand s itself in degree deg(s); simplex S of
    // K_s in degree deg(s) + |S| (the K's enter shifted by one)
    let levels = (n_hi - n_lo + 1) as usize;
    let mut basis: Vec<Vec<Item>> = vec![vec![]; levels];
    let mut pos: HashMap<Item, usize> = HashMap::new();
    for (si, s) in strands.iter().enumerate() {
        let lvl = (s.degree - n_lo) as usize;
        pos.insert((si, 0), basis[lvl].len());
        basis[lvl].push((si, 0));
        for &c in &cells[si] {
            let lvl = (s.degree - n_lo + c.count_ones() as i64) as usize;
            pos.insert((si, c), basis[lvl].len());
            basis[lvl].push((si, c));
        }
    }
    let by_source: HashMap<usize, Vec<&Arrow>> = {
        let mut map: HashMap<usize, Vec<&Arrow>> = HashMap::new();
        for a in arrows {
            map.entry(a.from).or_default().push(a);
        }
        map
    };
    let mut mats: Vec<Vec<Vec<i64>>> = Vec::with_capacity(levels.saturating_sub(1));
    for n in 0..levels.saturating_sub(1) {
        let rows = basis[n + 1].len();
        let cols = basis[n].len();
        let mut mat = vec![vec![0i64; cols]; rows];
        for (col, &(si, cell)) in basis[n].iter().enumerate() {
            if cell == 0 {
                // strand generator: shape differential plus the map to the
                // constant cochain on the vertices of K_s
                if let Some(list) = by_source.get(&si) {
                    for a in list {
                        mat[pos[&(a.to, 0)]][col] += a.sign;
                    }
                }
                for &c in &cells[si] {
                    if c.count_ones() == 1 {
                        mat[pos[&(si, c)]][col] += 1;
                    }
                }
            } else {
                // simplicial coboundary within K_s (negated by the shift)
                for v in 0..32u32 {
                    let bigger = cell | 1 << v;
                    if bigger != cell && cells[si].contains(&bigger) {
                        let sign = subset_sign(bigger, v as usize);
                        mat[pos[&(si, bigger)]][col] -= sign;
                    }
                }
                // cross maps: restriction to K_t where the simplex survives;
                // the sign alternates with the Cech degree |S| - 1 so that
                // the constant cochains form a chain map from the strand
                // generators
                let cross = if cell.count_ones() % 2 == 1 { 1 } else { -1 };
                if let Some(list) = by_source.get(&si) {
                    for a in list {
                        if cells[a.to].contains(&cell) {
                            mat[pos[&(a.to, cell)]][col] -= cross * a.sign;
                        }
                    }
                }
            }
        }
        mats.push(mat);
    }
    (n_lo, basis, mats)
}

fn contribution(
    strands: &[Strand],
    arrows: &[Arrow],
    masks: &[u32],
    stars: &[u32],
) -> (i64, Vec<usize>) {
    let (n_lo, basis, mats) = assemble_complex(strands, arrows, masks, stars);
    let ranks: Vec<usize> = mats.iter().map(|m| matrix_rank(m)).collect();
    let dims: Vec<usize> = (0..basis.len())
        .map(|n| {
            let out = if n < ranks.len() { ranks[n] } else { 0 };
            let inc = if n > 0 { ranks[n - 1] } else { 0 };
            basis[n].len() - out - inc
        })
        .collect();
    (n_lo, dims)
}

/// Rank over the rationals. Fast path: integer Gaussian elimination in i64
/// with gcd reduction of rows; falls back to exact big-integer elimination
/// on overflow.
fn matrix_rank(mat: &[Vec<i64>]) -> usize {
    let rows = mat.len();
    let cols = if rows == 0 { 0 } else { mat[0].len() };
    if rows == 0 || cols == 0 {
        return 0;
    }
    match rank_i64(mat.to_vec()) {
        Some(r) => r,
        None => IntMatrix::from_fn(rows, cols, |i, j| BigInt::from(mat[i][j])).rank(),
    }
}

fn rank_i64(mut a: Vec<Vec<i64>>) -> Option<usize> {
    let rows = a.len();
    let cols = a[0].len();
    let mut rank = 0;
    for c in 0..cols {
        // prefer the smallest nonzero pivot to limit growth
        let p = (rank..rows)
            .filter(|&i| a[i][c] != 0)
            .min_by_key(|&i| a[i][c].unsigned_abs());
        let p = match p {
            Some(p) => p,
            None => continue,
        };
        a.swap(rank, p);
        for i in (rank + 1)..rows {
            if a[i][c] == 0 {
                continue;
            }
            let g = gcd_i64(a[rank][c], a[i][c]);
            let fp = a[i][c] / g;
            let fr = a[rank][c] / g;
            let mut row_gcd: i64 = 0;
            for j in c..cols {
                let x = (a[rank][j] as i128)
                    .checked_mul(fp as i128)?
                    .checked_sub((a[i][j] as i128).checked_mul(fr as i128)?)?;
                a[i][j] = i64::try_from(x).ok()?;
                row_gcd = gcd_i64(row_gcd, a[i][j]);
            }
            if row_gcd > 1 {
                for j in c..cols {
                    a[i][j] /= row_gcd;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    Some(rank)
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

/// The full Ext table of a collection, filled in parallel.
pub fn ext_table(
    engine: &ExtEngine,
    c: &Collection,
) -> Result<Vec<Vec<CohomologyDims>>, ExcolError> {
    let n = c.len();
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let computed: Result<Vec<CohomologyDims>, ExcolError> = pairs
        .par_iter()
        .map(|&(i, j)| engine.ext_dims(&c.objects[i], &c.objects[j]))
        .collect();
    let computed = computed?;
    Ok(computed.chunks(n).map(|row| row.to_vec()).collect())
}

/// Result of checking a collection for exceptionality.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub labels: Vec<String>,
    pub table: Vec<Vec<CohomologyDims>>,
    /// Human-readable violations; empty iff the collection is exceptional.
    pub failures: Vec<String>,
    /// Whether all forward Ext groups are concentrated in degree zero.
    pub strong: bool,
    /// Maximal contiguous segments of pairwise fully orthogonal objects.
    pub blocks: Vec<Vec<usize>>,
    pub passed: bool,
}

pub fn verify_exceptional_collection(
    engine: &ExtEngine,
    c: &Collection,
) -> Result<VerifyReport, ExcolError> {
    let table = ext_table(engine, c)?;
    let n = c.len();
    let mut failures = vec![];
    for i in 0..n {
        let d = &table[i][i].dims;
        if d[0] != 1 || d[1..].iter().any(|&x| x != 0) {
            failures.push(format!(
                "object '{}' is not exceptional: Ext dims {:?}",
                c.labels[i], d
            ));
        }
    }
    for j in 0..n {
        for i in 0..j {
            if table[j][i].dims.iter().any(|&x| x != 0) {
                failures.push(format!(
                    "nonzero backward Ext from '{}' to '{}': {:?}",
                    c.labels[j], c.labels[i], table[j][i].dims
                ));
            }
        }
    }
    let strong = (0..n).all(|i| {
        (i..n).all(|j| table[i][j].dims[1..].iter().all(|&x| x == 0))
    });
    let orthogonal = |i: usize, j: usize| {
        table[i][j].dims.iter().all(|&x| x == 0) && table[j][i].dims.iter().all(|&x| x == 0)
    };
    let mut blocks: Vec<Vec<usize>> = vec![];
    let mut start = 0;
    for i in 0..n {
        let extend = (start..i).all(|j| orthogonal(j, i));
        if !extend {
            blocks.push((start..i).collect());
            start = i;
        }
    }
    if n > 0 {
        blocks.push((start..n).collect());
    }
    let passed = failures.is_empty();
    Ok(VerifyReport { labels: c.labels.clone(), table, failures, strong, blocks, passed })
}

/// Numerical fullness evidence: the Euler pairing Gram matrix in the
/// collection order must be unit upper triangular of size equal to the rank
/// of K_0, which is the number of maximal cones.
#[derive(Clone, Debug)]
pub struct FullnessReport {
    pub size: usize,
    pub expected: usize,
    pub gram: Vec<Vec<BigInt>>,
    pub unit_upper_triangular: bool,
    pub determinant_is_unit: bool,
    pub passed: bool,
}

pub fn numerical_fullness(f: &Fan, table: &[Vec<CohomologyDims>]) -> FullnessReport {
    let n = table.len();
    let gram: Vec<Vec<BigInt>> =
        table.iter().map(|row| row.iter().map(|d| d.euler_char()).collect()).collect();
    let unit_upper_triangular = (0..n).all(|i| {
        gram[i][i].is_one() && (0..i).all(|j| gram[i][j].is_zero())
    });
    let det = IntMatrix::from_fn(n, n, |i, j| gram[i][j].clone()).det();
    FullnessReport {
        size: n,
        expected: f.max_cones.len(),
        gram,
        unit_upper_triangular,
        determinant_is_unit: det.abs().is_one(),
        passed: n == f.max_cones.len() && unit_upper_triangular && det.abs().is_one(),
    }
}

/// Search for an ordering of the objects with no backward Ext: build the
/// digraph of nonzero Ext between distinct objects and topologically sort
/// it (smallest original index first among available objects). Returns
/// `None` if some pair has nonzero Ext in both directions.
pub fn find_exceptional_order(
    engine: &ExtEngine,
    c: &Collection,
) -> Result<Option<Vec<usize>>, ExcolError> {
    let table = ext_table(engine, c)?;
    let n = c.len();
    let nonzero = |i: usize, j: usize| table[i][j].dims.iter().any(|&x| x != 0);
    for i in 0..n {
        for j in 0..i {
            if nonzero(i, j) && nonzero(j, i) {
                return Ok(None);
            }
        }
    }
    let mut order = vec![];
    let mut placed = vec![false; n];
    while order.len() < n {
        let next = (0..n)
            .find(|&i| !placed[i] && (0..n).all(|j| placed[j] || j == i || !nonzero(j, i)));
        match next {
            Some(i) => {
                placed[i] = true;
                order.push(i);
            }
            None => return Ok(None), // a directed cycle of nonzero Ext
        }
    }
    Ok(Some(order))
}

/// The two-object collection {O(-1), O} on the A_1 fan (the projective
/// line).
fn a1_collection(f: &Fan) -> Collection {
    let o_minus = TCIObject::line_bundle(f, TDivisor::from_i64(f, &[-1, 0]));
    let o = TCIObject::structure_sheaf(f);
    Collection::new(vec![o_minus, o], vec!["O(-1)".into(), "O".into()]).unwrap()
}

/// The six-object collection on the A_2 fan (the del Pezzo surface of degree
/// six): H is the pullback of a line under the blowdown to the plane and
/// E_1, E_2, E_3 are the exceptional classes over the middle rays.
fn a2_collection(f: &Fan) -> Collection {
    let lb = |coeffs: &[i64]| TCIObject::line_bundle(f, TDivisor::from_i64(f, coeffs));
    let h = [1i64, 0, 0, 1, 1, 0];
    let e = [[0i64, 0, 0, 1, 0, 0], [0, 0, 0, 0, 1, 0], [0, 0, 0, 0, 0, 1]];
    let combine = |ch: i64, es: &[i64; 3]| -> Vec<i64> {
        (0..6)
            .map(|r| ch * h[r] + es[0] * e[0][r] + es[1] * e[1][r] + es[2] * e[2][r])
            .collect()
    };
    let objects = vec![
        lb(&combine(-1, &[0, 0, 0])),
        lb(&combine(-2, &[1, 1, 1])),
        lb(&combine(-1, &[1, 0, 0])),
        lb(&combine(-1, &[0, 1, 0])),
        lb(&combine(-1, &[0, 0, 1])),
        TCIObject::structure_sheaf(f),
    ];
    let labels = vec![
        "O(-H)".into(),
        "O(-2H+E1+E2+E3)".into(),
        "O(-H+E1)".into(),
        "O(-H+E2)".into(),
        "O(-H+E3)".into(),
        "O".into(),
    ];
    Collection::new(objects, labels).unwrap()
}

/// The projection weight x_i - x_j on the A_3 lattice in the basis
/// e_0, e_1, e_2 (with x_3 = 0 on representatives).
fn weight_row(i: usize, j: usize) -> Vec<i64> {
    let mut row = vec![0i64; 3];
    if i < 3 {
        row[i] += 1;
    }
    if j < 3 {
        row[j] -= 1;
    }
    row
}

fn p1_target() -> Fan {
    Fan::from_i64(1, &[vec![1], vec![-1]], &[vec![0], vec![1]]).unwrap()
}

fn p1xp1_target() -> Fan {
    Fan::from_i64(
        2,
        &[vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]],
        &[vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3]],
    )
    .unwrap()
}

/// Pullback of O(-1,-1) on the product of two lines along the projection
/// determined by the partition {a,b} | {c,d} of {0,1,2,3}.
fn partition_pullback(f: &Fan, part: [usize; 4]) -> Result<TDivisor, ExcolError> {
    let [a, b, c, d] = part;
    let m = IntMatrix::from_rows(&[weight_row(a, b), weight_row(c, d)]);
    let target = p1xp1_target();
    let mor = check_morphism(&m, f, &target)?;
    let coeffs = crate::fan::pullback_divisor(
        &mor,
        &[-BigInt::one(), BigInt::zero(), -BigInt::one(), BigInt::zero()],
    );
    Ok(TDivisor::new(f, coeffs))
}

/// Nef divisor of a lattice polytope from its vertex list (in character
/// coordinates): a_rho = -min over vertices of <m, v_rho>.
fn polytope_divisor(f: &Fan, verts: &[[i64; 3]]) -> TDivisor {
    let coeffs: Vec<BigInt> = f
        .rays
        .iter()
        .map(|v| {
            let min = verts
                .iter()
                .map(|m| (0..3).map(|i| BigInt::from(m[i]) * &v[i]).sum::<BigInt>())
                .min()
                .unwrap();
            -min
        })
        .collect();
    TDivisor::new(f, coeffs)
}

/// The nef divisors of the translated weight polytopes of the three
/// fundamental weights of A_3. Their negatives are the line bundles pulled
/// back from the closure of the torus in the wonderful compactification;
/// a sum-zero weight acts on the x_3 = 0 representatives through its first
/// three coordinates.
fn fundamental_weight_divisors(f: &Fan) -> [TDivisor; 3] {
    let w1: Vec<[i64; 3]> = vec![[0, 0, 0], [-1, 1, 0], [-1, 0, 1], [-1, 0, 0]];
    let w2: Vec<[i64; 3]> = vec![
        [0, 0, 0],
        [0, -1, 1],
        [0, -1, 0],
        [-1, 0, 1],
        [-1, 0, 0],
        [-1, -1, 1],
    ];
    let w3: Vec<[i64; 3]> = vec![[0, 0, 0], [0, 0, -1], [0, -1, 0], [-1, 0, 0]];
    [polytope_divisor(f, &w1), polytope_divisor(f, &w2), polytope_divisor(f, &w3)]
}

/// The 24-object collection on the A_3 fan, in its pinned exceptional
/// order: six torsion objects supported on the quadric divisors of the
/// middle rays, the three weight-polytope line bundles, the pullbacks of
/// the degree-six del Pezzo cuspidal pair along the four projections to the
/// A_2 fan, the pullbacks of O(-1) along the six projections to the A_1
/// fan, and the structure sheaf.
fn a3_collection(f: &Fan) -> Result<Collection, ExcolError> {
    let mut objects = vec![];
    let mut labels = vec![];
    // torsion objects: O(-1,-1) on the quadric divisor of each middle ray,
    // lifted through the partition pullback that contracts the ray
    let pair_subsets: [[usize; 2]; 6] = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];
    for (k, pair) in pair_subsets.iter().enumerate() {
        let ray = 4 + k; // middle rays sit at canonical indices 4..=9
        let rest: Vec<usize> = (0..4).filter(|x| !pair.contains(x)).collect();
        let chi = partition_pullback(f, [pair[0], pair[1], rest[0], rest[1]])?;
        objects.push(TCIObject::new(f, chi, vec![ray])?);
        labels.push(format!("tors({}{})", pair[0], pair[1]));
    }
    // the three weight-polytope line bundles
    for (k, d) in fundamental_weight_divisors(f).iter().enumerate() {
        objects.push(TCIObject::line_bundle(f, TDivisor::zero(f).sub(d)));
        labels.push(format!("O(-Dw{})", k + 1));
    }
    // pullbacks of the degree-six del Pezzo pair along the four forgetful
    // projections to the A_2 fan
    let dp6 = build_an_fan(2)?;
    let trios: [[usize; 3]; 4] = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
    for pass in 0..2 {
        for trio in trios {
            let [s0, s1, s2] = trio;
            let m = IntMatrix::from_rows(&[weight_row(s0, s2), weight_row(s1, s2)]);
            let mor = check_morphism(&m, f, &dp6)?;
            let (coeffs, name): ([i64; 6], &str) = if pass == 0 {
                ([-1, 0, 0, -1, -1, 0], "O(-H)")
            } else {
                ([-2, 0, 0, -1, -1, 1], "O(-2H+E1+E2+E3)")
            };
            let big: Vec<BigInt> = coeffs.iter().map(|&x| BigInt::from(x)).collect();
            let pulled = crate::fan::pullback_divisor(&mor, &big);
            objects.push(TCIObject::line_bundle(f, TDivisor::new(f, pulled)));
            labels.push(format!("pi({s0}{s1}{s2})*{name}"));
        }
    }
    // pullbacks of O(-1) along the six projections to the A_1 fan
    let p1 = p1_target();
    for i in 0..4usize {
        for j in (i + 1)..4 {
            let m = IntMatrix::from_rows(&[weight_row(i, j)]);
            let mor = check_morphism(&m, f, &p1)?;
            let pulled = crate::fan::pullback_divisor(&mor, &[-BigInt::one(), BigInt::zero()]);
            objects.push(TCIObject::line_bundle(f, TDivisor::new(f, pulled)));
            labels.push(format!("pi({i}{j})*O(-1)"));
        }
    }
    objects.push(TCIObject::structure_sheaf(f));
    labels.push("O".into());
    Collection::new(objects, labels)
}

/// The standard full exceptional collection bundled for the A_n fan,
/// n = 1, 2, 3, in its pinned order.
pub fn build_ct_collection(n: usize) -> Result<(Fan, Collection), ExcolError> {
    let f = build_an_fan(n)?;
    let c = match n {
        1 => a1_collection(&f),
        2 => a2_collection(&f),
        3 => a3_collection(&f)?,
        _ => unreachable!("build_an_fan validated n"),
    };
    Ok((f, c))
}
