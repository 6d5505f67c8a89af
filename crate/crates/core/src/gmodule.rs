//! Finite groups acting on lattices, group cohomology H^0/H^1, restriction,
//! the kernel-of-restriction-to-cyclic-subgroups invariant, and the standard
//! augmentation-ideal lattices.

use crate::zlattice::{
    self, kernel_basis, smith_normal_form, solve_integer, AbelianGroupInvariants, IntMatrix,
};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GModuleError {
    #[error("element list is not closed under multiplication and inverse")]
    NotASubgroup,
    #[error("isomorphism search bound exhausted; result inconclusive")]
    Inconclusive,
    #[error("invalid multiplication table: {0}")]
    BadTable(String),
}

/// A finite group given by its full multiplication table. Element 0 is the
/// identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    mul: Vec<Vec<usize>>,
    generators: Vec<usize>,
}

impl FiniteGroup {
    pub fn new(mul: Vec<Vec<usize>>, generators: Vec<usize>) -> Result<Self, GModuleError> {
        let n = mul.len();
        if n == 0 {
            return Err(GModuleError::BadTable("empty table".into()));
        }
        for row in &mul {
            if row.len() != n || row.iter().any(|&x| x >= n) {
                return Err(GModuleError::BadTable("ragged or out-of-range row".into()));
            }
        }
        for g in 0..n {
            if mul[0][g] != g || mul[g][0] != g {
                return Err(GModuleError::BadTable("0 is not an identity".into()));
            }
        }
        for g in 0..n {
            if !(0..n).any(|h| mul[g][h] == 0) {
                return Err(GModuleError::BadTable(format!("element {g} has no inverse")));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                        return Err(GModuleError::BadTable("not associative".into()));
                    }
                }
            }
        }
        let group = FiniteGroup { mul, generators };
        if group.closure(&group.generators).len() != n {
            return Err(GModuleError::BadTable("generators do not generate".into()));
        }
        Ok(group)
    }

    pub fn order(&self) -> usize {
        self.mul.len()
    }

    pub fn elements(&self) -> impl Iterator<Item = usize> {
        0..self.mul.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.elements().find(|&b| self.mul[a][b] == 0).expect("validated at construction")
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    /// Cyclic group of order n with generator 1.
    pub fn cyclic(n: usize) -> Self {
        let mul = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        let generators = if n > 1 { vec![1] } else { vec![] };
        FiniteGroup::new(mul, generators).expect("cyclic table is valid")
    }

    /// C2 x C2 with elements [1, s, t, st] and generators s, t.
    pub fn klein_four() -> Self {
        let mul = (0..4usize).map(|a| (0..4).map(|b| a ^ b).collect()).collect();
        FiniteGroup::new(mul, vec![1, 2]).expect("klein table is valid")
    }

    pub fn closure(&self, seed: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        seen[0] = true;
        let mut stack: Vec<usize> = vec![0];
        let mut frontier: Vec<usize> = seed.to_vec();
        while let Some(g) = frontier.pop() {
            if !seen[g] {
                seen[g] = true;
                stack.push(g);
                for &s in seed {
                    frontier.push(self.mul[g][s]);
                    frontier.push(self.mul[s][g]);
                }
                frontier.push(self.inverse(g));
            }
        }
        // re-close products of found elements
        loop {
            let current: Vec<usize> = (0..self.order()).filter(|&g| seen[g]).collect();
            let mut grew = false;
            for &a in &current {
                for &b in &current {
                    let p = self.mul[a][b];
                    if !seen[p] {
                        seen[p] = true;
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        (0..self.order()).filter(|&g| seen[g]).collect()
    }

    pub fn is_subgroup(&self, elements: &[usize]) -> bool {
        let mut sorted = elements.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if !sorted.contains(&0) {
            return false;
        }
        for &a in &sorted {
            if a >= self.order() || sorted.binary_search(&self.inverse(a)).is_err() {
                return false;
            }
            for &b in &sorted {
                if sorted.binary_search(&self.mul[a][b]).is_err() {
                    return false;
                }
            }
        }
        true
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut n = 1;
        while x != 0 {
            x = self.mul[x][g];
            n += 1;
        }
        n
    }

    /// All cyclic subgroups, each as a sorted element list (includes the
    /// trivial subgroup).
    pub fn cyclic_subgroups(&self) -> Vec<Vec<usize>> {
        let mut subs: Vec<Vec<usize>> = vec![];
        for g in self.elements() {
            let mut members = vec![0];
            let mut x = g;
            while x != 0 {
                members.push(x);
                x = self.mul[x][g];
            }
            members.sort_unstable();
            if !subs.contains(&members) {
                subs.push(members);
            }
        }
        subs
    }

    pub fn center(&self) -> Vec<usize> {
        self.elements()
            .filter(|&g| self.elements().all(|h| self.mul[g][h] == self.mul[h][g]))
            .collect()
    }

    /// Multiset of element orders, as order -> count.
    pub fn order_census(&self) -> BTreeMap<usize, usize> {
        let mut census = BTreeMap::new();
        for g in self.elements() {
            *census.entry(self.element_order(g)).or_insert(0) += 1;
        }
        census
    }

    /// Quotient by a normal subgroup (given as element list). Panics if the
    /// subgroup is not normal.
    pub fn quotient(&self, normal: &[usize]) -> FiniteGroup {
        assert!(self.is_subgroup(normal), "quotient by a non-subgroup");
        let mut sorted = normal.to_vec();
        sorted.sort_unstable();
        for &n in &sorted {
            for g in self.elements() {
                let conj = self.mul[self.mul[g][n]][self.inverse(g)];
                assert!(sorted.binary_search(&conj).is_ok(), "subgroup is not normal");
            }
        }
        // cosets, identity coset first
        let mut coset_of = vec![usize::MAX; self.order()];
        let mut reps: Vec<usize> = vec![];
        for g in self.elements() {
            if coset_of[g] == usize::MAX {
                let id = reps.len();
                reps.push(g);
                for &n in &sorted {
                    coset_of[self.mul[g][n]] = id;
                }
            }
        }
        let k = reps.len();
        let mul: Vec<Vec<usize>> =
            (0..k).map(|a| (0..k).map(|b| coset_of[self.mul[reps[a]][reps[b]]]).collect()).collect();
        let generators: Vec<usize> = (1..k).collect();
        FiniteGroup::new(mul, generators).expect("coset table is a valid group")
    }

    /// Express every element as a word in the generators (indices into
    /// `generators()`), via right multiplication.
    pub(crate) fn generator_words(&self) -> Vec<Vec<usize>> {
        let mut words: Vec<Option<Vec<usize>>> = vec![None; self.order()];
        words[0] = Some(vec![]);
        let mut frontier = vec![0usize];
        while let Some(g) = frontier.pop() {
            let w = words[g].clone().unwrap();
            for (si, &s) in self.generators.iter().enumerate() {
                let gs = self.mul[g][s];
                if words[gs].is_none() {
                    let mut w2 = w.clone();
                    w2.push(si);
                    words[gs] = Some(w2);
                    frontier.push(gs);
                }
            }
        }
        words.into_iter().map(|w| w.expect("generators generate")).collect()
    }
}

/// A lattice with an action of a finite group by unimodular matrices.
#[derive(Clone, Debug)]
pub struct GLattice {
    pub group: FiniteGroup,
    pub rank: usize,
    action: Vec<IntMatrix>,
}

impl GLattice {
    pub fn new(group: FiniteGroup, action: Vec<IntMatrix>) -> Self {
        assert_eq!(action.len(), group.order());
        let rank = action[0].rows;
        for m in &action {
            assert_eq!((m.rows, m.cols), (rank, rank));
            assert!(m.is_unimodular(), "action matrix is not unimodular");
        }
        assert!(action[0].is_identity(), "identity must act trivially");
        for a in group.elements() {
            for b in group.elements() {
                assert_eq!(
                    action[a].mul(&action[b]),
                    action[group.mul(a, b)],
                    "action is not a homomorphism"
                );
            }
        }
        GLattice { group, rank, action }
    }

    /// Build the action from matrices for the group generators.
    pub fn from_generator_matrices(group: FiniteGroup, gen_action: &[IntMatrix]) -> Self {
        assert_eq!(gen_action.len(), group.generators().len());
        let rank = gen_action.first().map_or(0, |m| m.rows);
        let words = group.generator_words();
        let action: Vec<IntMatrix> = words
            .iter()
            .map(|w| {
                let mut m = IntMatrix::identity(rank);
                for &si in w {
                    m = m.mul(&gen_action[si]);
                }
                m
            })
            .collect();
        GLattice::new(group, action)
    }

    pub fn trivial(group: FiniteGroup, rank: usize) -> Self {
        let n = group.order();
        GLattice::new(group, vec![IntMatrix::identity(rank); n])
    }

    /// Permutation lattice from an action of the group on {0..n-1}, given as
    /// images perm[g][i].
    pub fn permutation(group: FiniteGroup, perm: &[Vec<usize>]) -> Self {
        let n = perm[0].len();
        let action = perm
            .iter()
            .map(|p| {
                IntMatrix::from_fn(n, n, |i, j| {
                    if p[j] == i { BigInt::one() } else { BigInt::zero() }
                })
            })
            .collect();
        GLattice::new(group, action)
    }

    /// Regular representation Z[G].
    pub fn regular(group: FiniteGroup) -> Self {
        let perm: Vec<Vec<usize>> =
            group.elements().map(|g| group.elements().map(|h| group.mul(g, h)).collect()).collect();
        GLattice::permutation(group, &perm)
    }

    pub fn action(&self, g: usize) -> &IntMatrix {
        &self.action[g]
    }
}

/// Saturated basis of the fixed sublattice, as columns.
pub fn h0(l: &GLattice) -> IntMatrix {
    let id = IntMatrix::identity(l.rank);
    let mut stacked: Option<IntMatrix> = None;
    for g in l.group.elements().skip(1) {
        let block = l.action(g).sub(&id);
        stacked = Some(match stacked {
            None => block,
            Some(s) => s.vcat(&block),
        });
    }
    match stacked {
        None => id,
        Some(s) => kernel_basis(&s),
    }
}

/// The cocycle lattice Z^1(G, L) as a saturated column basis inside
/// L^{|G|} (cochains indexed by group elements, identity included).
pub(crate) fn cocycle_basis(l: &GLattice) -> IntMatrix {
    let n = l.group.order();
    let r = l.rank;
    // unknowns: c_g for every g (n*r of them); equations: for every pair
    // (g, h): c_{gh} - c_g - g . c_h = 0
    let mut rows: Vec<Vec<BigInt>> = vec![];
    for g in l.group.elements() {
        for h in l.group.elements() {
            let gh = l.group.mul(g, h);
            for i in 0..r {
                let mut row = vec![BigInt::zero(); n * r];
                row[gh * r + i] += BigInt::one();
                row[g * r + i] -= BigInt::one();
                for j in 0..r {
                    row[h * r + j] -= l.action(g).at(i, j);
                }
                rows.push(row);
            }
        }
    }
    let m = IntMatrix::from_fn(rows.len(), n * r, |i, j| rows[i][j].clone());
    kernel_basis(&m)
}

/// Coboundary generators (columns): m -> (g.m - m)_g stacked over elements.
pub(crate) fn coboundary_map(l: &GLattice) -> IntMatrix {
    let n = l.group.order();
    let r = l.rank;
    let id = IntMatrix::identity(r);
    IntMatrix::from_fn(n * r, r, |row, col| {
        let g = row / r;
        let i = row % r;
        l.action(g).sub(&id).at(i, col).clone()
    })
}

/// First group cohomology H^1(G, L) = Z^1 / B^1.
pub fn h1(l: &GLattice) -> AbelianGroupInvariants {
    let z = cocycle_basis(l);
    let b = coboundary_map(l);
    zlattice::quotient_invariants(&z, &b)
}

/// Restrict the action to a subgroup given as an element list.
pub fn restrict(l: &GLattice, subgroup_elements: &[usize]) -> Result<GLattice, GModuleError> {
    if !l.group.is_subgroup(subgroup_elements) {
        return Err(GModuleError::NotASubgroup);
    }
    let mut elems = subgroup_elements.to_vec();
    elems.sort_unstable();
    elems.dedup();
    // identity is 0 and sorts first
    let index_of = |g: usize| elems.binary_search(&g).expect("closed by assumption");
    let k = elems.len();
    let mul: Vec<Vec<usize>> = (0..k)
        .map(|a| (0..k).map(|b| index_of(l.group.mul(elems[a], elems[b]))).collect())
        .collect();
    let generators: Vec<usize> = (1..k).collect();
    let group = FiniteGroup::new(mul, generators).expect("subgroup table is valid");
    let action = elems.iter().map(|&g| l.action(g).clone()).collect();
    Ok(GLattice::new(group, action))
}

/// Kernel of H^1(G, L) -> prod over cyclic subgroups C of H^1(C, L),
/// computed at the cocycle level.
pub fn sha_omega(l: &GLattice) -> AbelianGroupInvariants {
    let z = cocycle_basis(l); // (n*r) x z
    let r = l.rank;
    let zdim = z.cols;
    let cyclics: Vec<Vec<usize>> =
        l.group.cyclic_subgroups().into_iter().filter(|c| c.len() > 1).collect();

    // A cocycle (in Z^1 coordinates) lies in the locally-coboundary sublattice
    // W iff for every cyclic C there is y_C with c_g = g.y_C - y_C for g in C.
    // Set up [restrictions | -coboundaries] and project its kernel to the
    // Z^1 coordinates.
    let total_rows: usize = cyclics.iter().map(|c| c.len() * r).sum();
    let aux_cols: usize = cyclics.len() * r;
    let mut m = IntMatrix::zero(total_rows, zdim + aux_cols);
    let id = IntMatrix::identity(r);
    let mut row0 = 0;
    for (ci, c) in cyclics.iter().enumerate() {
        for (gi, &g) in c.iter().enumerate() {
            let diff = l.action(g).sub(&id);
            for i in 0..r {
                let row = row0 + gi * r + i;
                for col in 0..zdim {
                    m.set(row, col, z.at(g * r + i, col).clone());
                }
                for j in 0..r {
                    m.set(row, zdim + ci * r + j, -diff.at(i, j));
                }
            }
        }
        row0 += c.len() * r;
    }
    let ker = kernel_basis(&m);
    // W generators inside Z^1 coordinates
    let w = ker.submatrix(&(0..zdim).collect::<Vec<_>>(), &(0..ker.cols).collect::<Vec<_>>());
    // basis of W (sublattice of Z^zdim): image lattice of w
    let w_basis = image_basis(&w);
    // coboundaries of G expressed in Z^1 coordinates
    let b = zlattice::solve_integer_matrix(&z, &coboundary_map(l))
        .expect("coboundaries are cocycles in the saturated basis");
    zlattice::quotient_invariants(&w_basis, &b)
}

/// A basis (columns) of the lattice generated by the columns of m.
/// The basis spans exactly the integer column span (not its saturation).
fn image_basis(m: &IntMatrix) -> IntMatrix {
    let (u, d, _) = smith_normal_form(m);
    // columns of u^{-1} scaled by the diagonal span the image
    let uinv = invert_unimodular(&u);
    let n = m.rows.min(m.cols);
    let nz: Vec<usize> = (0..n).filter(|&i| !d.at(i, i).is_zero()).collect();
    IntMatrix::from_fn(m.rows, nz.len(), |i, j| uinv.at(i, nz[j]) * d.at(nz[j], nz[j]))
}

pub fn invert_unimodular(u: &IntMatrix) -> IntMatrix {
    let sol = zlattice::solve_integer_matrix(u, &IntMatrix::identity(u.rows))
        .expect("matrix is unimodular");
    sol
}

/// Cartier-duality on lattices: the dual carries the inverse-transpose action.
pub fn dual(l: &GLattice) -> GLattice {
    let action = l
        .group
        .elements()
        .map(|g| l.action(l.group.inverse(g)).transpose())
        .collect();
    GLattice::new(l.group.clone(), action)
}

/// The kernel of the augmentation Z[G] -> Z with its multiplication action.
///
/// For a Klein four group the basis is (1-s, t-1, s-st) with s, t the two
/// listed generators; in general the basis is {g-1 : g != 1}.
pub fn augmentation_ideal(g: &FiniteGroup) -> GLattice {
    let n = g.order();
    assert!(n > 1, "augmentation ideal of the trivial group is zero");
    let klein = n == 4 && g.elements().all(|x| g.element_order(x) <= 2);
    // basis vectors as elements of Z[G]
    let mut basis: Vec<Vec<BigInt>> = vec![];
    if klein {
        let s = g.generators()[0];
        let t = g.generators()[1];
        let st = g.mul(s, t);
        let mut v1 = vec![BigInt::zero(); n];
        v1[0] += 1;
        v1[s] -= 1;
        let mut v2 = vec![BigInt::zero(); n];
        v2[t] += 1;
        v2[0] -= 1;
        let mut v3 = vec![BigInt::zero(); n];
        v3[s] += 1;
        v3[st] -= 1;
        basis = vec![v1, v2, v3];
    } else {
        for h in g.elements().skip(1) {
            let mut v = vec![BigInt::zero(); n];
            v[h] += 1;
            v[0] -= 1;
            basis.push(v);
        }
    }
    let b = IntMatrix::from_fn(n, n - 1, |i, j| basis[j][i].clone());
    let action = g
        .elements()
        .map(|h| {
            // h . basis_j, in Z[G] coordinates: (h.x)_{g'} = x_{h^{-1} g'}
            let hinv = g.inverse(h);
            let image = IntMatrix::from_fn(n, n - 1, |i, j| basis[j][g.mul(hinv, i)].clone());
            zlattice::solve_integer_matrix(&b, &image)
                .expect("augmentation ideal is closed under the action")
        })
        .collect();
    GLattice::new(g.clone(), action)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsoResult {
    /// A unimodular intertwiner P with P a1(g) = a2(g) P for all g.
    Isomorphic(IntMatrix),
    /// Proven distinct via an invariant mismatch.
    NonIsomorphic(String),
    /// Search bound exhausted without a verdict.
    Inconclusive,
}

/// Search for a unimodular intertwiner between two lattices over the same
/// group. Definite negatives come only from invariant mismatches.
pub fn module_isomorphic(l1: &GLattice, l2: &GLattice) -> IsoResult {
    assert_eq!(l1.group, l2.group, "lattices over different groups");
    assert_eq!(l1.rank, l2.rank, "lattices of different rank");
    let r = l1.rank;
    if l1.group.elements().all(|g| l1.action(g) == l2.action(g)) {
        return IsoResult::Isomorphic(IntMatrix::identity(r));
    }
    // invariants: fixed ranks and H^1 over every cyclic subgroup and the group
    if h0(l1).cols != h0(l2).cols {
        return IsoResult::NonIsomorphic("fixed-lattice ranks differ".into());
    }
    if h1(l1) != h1(l2) {
        return IsoResult::NonIsomorphic("H^1 over the full group differs".into());
    }
    for c in l1.group.cyclic_subgroups() {
        let r1 = restrict(l1, &c).expect("cyclic subgroup");
        let r2 = restrict(l2, &c).expect("cyclic subgroup");
        if h0(&r1).cols != h0(&r2).cols || h1(&r1) != h1(&r2) {
            return IsoResult::NonIsomorphic(format!(
                "invariants differ on the cyclic subgroup {:?}",
                c
            ));
        }
    }

    // intertwiner space: P a1(g) - a2(g) P = 0 as linear equations in P
    let vars = r * r;
    let mut rows: Vec<Vec<BigInt>> = vec![];
    for g in l1.group.elements().skip(1) {
        let a = l1.action(g);
        let b = l2.action(g);
        for i in 0..r {
            for j in 0..r {
                // (P a - b P)_{ij} = sum_k P_{ik} a_{kj} - b_{ik} P_{kj}
                let mut row = vec![BigInt::zero(); vars];
                for k in 0..r {
                    row[i * r + k] += a.at(k, j);
                    row[k * r + j] -= b.at(i, k);
                }
                rows.push(row);
            }
        }
    }
    let m = IntMatrix::from_fn(rows.len(), vars, |i, j| rows[i][j].clone());
    let ker = kernel_basis(&m);
    let s = ker.cols;
    if s == 0 {
        // no nonzero intertwiners at all, yet invariants matched
        return IsoResult::Inconclusive;
    }
    const BOUND: i64 = 5;
    const MAX_CANDIDATES: u64 = 4_000_000;
    let span = (2 * BOUND + 1) as u64;
    if span.checked_pow(s as u32).map_or(true, |total| total > MAX_CANDIDATES) {
        return IsoResult::Inconclusive;
    }
    // enumerate small coefficient combinations ordered by max-norm so simple
    // intertwiners are found first
    let mut coeffs = vec![0i64; s];
    for radius in 1..=BOUND {
        if let Some(p) = search_radius(&ker, &mut coeffs, 0, radius, r) {
            return IsoResult::Isomorphic(p);
        }
    }
    IsoResult::Inconclusive
}

fn search_radius(
    ker: &IntMatrix,
    coeffs: &mut Vec<i64>,
    pos: usize,
    radius: i64,
    r: usize,
) -> Option<IntMatrix> {
    if pos == coeffs.len() {
        if coeffs.iter().all(|&c| c.abs() < radius) {
            return None; // already tried at a smaller radius
        }
        let mut p = IntMatrix::zero(r, r);
        for (ci, &c) in coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for i in 0..r {
                for j in 0..r {
                    let x = p.at(i, j) + BigInt::from(c) * ker.at(i * r + j, ci);
                    p.set(i, j, x);
                }
            }
        }
        if p.is_unimodular() {
            return Some(p);
        }
        return None;
    }
    for c in -radius..=radius {
        coeffs[pos] = c;
        if let Some(p) = search_radius(ker, coeffs, pos + 1, radius, r) {
            return Some(p);
        }
    }
    None
}

/// Exhaustive reference implementations, kept independent of the linear
/// algebra route above. Slow; for tests only.
pub mod oracle {
    use super::*;

    /// All cocycles whose generator values have coordinates in [-bound, bound],
    /// as full cochains (value for every group element, flattened).
    pub fn boxed_cocycles(l: &GLattice, bound: i64) -> Vec<Vec<BigInt>> {
        let gens = l.group.generators().to_vec();
        let r = l.rank;
        let mut out = vec![];
        let per_gen = (2 * bound + 1).pow(r as u32) as usize;
        let total = per_gen.pow(gens.len() as u32);
        for code in 0..total {
            let mut c = code;
            let mut gen_vals: Vec<Vec<BigInt>> = vec![];
            for _ in 0..gens.len() {
                let mut v = vec![];
                let mut x = c % per_gen;
                c /= per_gen;
                for _ in 0..r {
                    v.push(BigInt::from((x % (2 * bound + 1) as usize) as i64 - bound));
                    x /= (2 * bound + 1) as usize;
                }
                gen_vals.push(v);
            }
            if let Some(full) = extend_cocycle(l, &gens, &gen_vals) {
                out.push(full);
            }
        }
        out
    }

    /// Extend generator values to a full cocycle via c_{gh} = c_g + g.c_h;
    /// None if the extension is inconsistent.
    fn extend_cocycle(
        l: &GLattice,
        gens: &[usize],
        gen_vals: &[Vec<BigInt>],
    ) -> Option<Vec<BigInt>> {
        let n = l.group.order();
        let r = l.rank;
        let mut vals: Vec<Option<Vec<BigInt>>> = vec![None; n];
        vals[0] = Some(vec![BigInt::zero(); r]);
        let mut frontier = vec![0usize];
        while let Some(g) = frontier.pop() {
            let cg = vals[g].clone().unwrap();
            for (si, &s) in gens.iter().enumerate() {
                let gs = l.group.mul(g, s);
                // c_{gs} = c_g + g . c_s
                let gcs = l.action(g).mul_vec(&gen_vals[si]);
                let cand: Vec<BigInt> = (0..r).map(|i| &cg[i] + &gcs[i]).collect();
                match &vals[gs] {
                    None => {
                        vals[gs] = Some(cand);
                        frontier.push(gs);
                    }
                    Some(existing) => {
                        if *existing != cand {
                            return None;
                        }
                    }
                }
            }
        }
        let full: Vec<Vec<BigInt>> = vals.into_iter().map(|v| v.unwrap()).collect();
        // verify the cocycle condition on every pair
        for g in l.group.elements() {
            for h in l.group.elements() {
                let gh = l.group.mul(g, h);
                let gch = l.action(g).mul_vec(&full[h]);
                for i in 0..r {
                    if full[gh][i] != &full[g][i] + &gch[i] {
                        return None;
                    }
                }
            }
        }
        Some(full.concat())
    }

    pub fn is_coboundary(l: &GLattice, cochain: &[BigInt]) -> bool {
        let b = super::coboundary_map(l);
        solve_integer(&b, cochain).is_some()
    }

    /// Number of distinct cohomology classes among the boxed cocycles.
    pub fn class_count(l: &GLattice, bound: i64) -> usize {
        let cocycles = boxed_cocycles(l, bound);
        let mut reps: Vec<Vec<BigInt>> = vec![];
        for z in cocycles {
            let fresh = reps.iter().all(|rep| {
                let diff: Vec<BigInt> = z.iter().zip(rep).map(|(a, b)| a - b).collect();
                !is_coboundary(l, &diff)
            });
            if fresh {
                reps.push(z);
            }
        }
        reps.len()
    }
}
