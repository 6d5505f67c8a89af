//! Divisor class groups of fans, the induced symmetry action on the Picard
//! lattice, and cohomology of invariant divisors via the character-graded
//! simplicial method.

use crate::fan::Fan;
use crate::zlattice::{cokernel, solve_integer_matrix, IntMatrix};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DivClassError {
    #[error("a character on the padding shell of the candidate box contributed to cohomology")]
    ShellNotVanishing,
}

/// An invariant divisor sum a_rho D_rho, as its coefficient list in ray order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TDivisor {
    pub coeffs: Vec<BigInt>,
}

impl TDivisor {
    pub fn new(f: &Fan, coeffs: Vec<BigInt>) -> Self {
        assert_eq!(coeffs.len(), f.rays.len(), "one coefficient per ray");
        TDivisor { coeffs }
    }

    pub fn from_i64(f: &Fan, coeffs: &[i64]) -> Self {
        TDivisor::new(f, coeffs.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zero(f: &Fan) -> Self {
        TDivisor { coeffs: vec![BigInt::zero(); f.rays.len()] }
    }

    /// The canonical divisor -K has all coefficients 1; K has all -1.
    pub fn canonical(f: &Fan) -> Self {
        TDivisor { coeffs: vec![-BigInt::one(); f.rays.len()] }
    }

    /// div(chi^m): coefficient <m, v_rho> at each ray.
    pub fn of_character(f: &Fan, m: &[BigInt]) -> Self {
        assert_eq!(m.len(), f.rank);
        TDivisor {
            coeffs: f.rays.iter().map(|v| dot(m, v)).collect(),
        }
    }

    pub fn add(&self, other: &TDivisor) -> TDivisor {
        TDivisor {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &TDivisor) -> TDivisor {
        TDivisor {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        }
    }

    /// The divisor with permuted coefficients: (g.D)_{perm(rho)} = D_rho.
    pub fn permute(&self, ray_perm: &[usize]) -> TDivisor {
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len()];
        for (i, &j) in ray_perm.iter().enumerate() {
            coeffs[j] = self.coeffs[i].clone();
        }
        TDivisor { coeffs }
    }
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The divisor class group with the projection from divisor coordinates.
#[derive(Clone, Debug)]
pub struct ClassGroup {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
    /// Projection from divisor coordinates onto the free part of the class
    /// group (rows: class coordinates, columns: rays).
    pub class_of: IntMatrix,
}

/// Cokernel of the pairing map M -> Div, m -> (<m, v_rho>)_rho.
pub fn class_group(f: &Fan) -> ClassGroup {
    let pairing = IntMatrix::from_fn(f.rays.len(), f.rank, |i, j| f.rays[i][j].clone());
    let (inv, proj) = cokernel(&pairing);
    ClassGroup { free_rank: inv.free_rank, torsion: inv.torsion, class_of: proj }
}

/// The induced matrix on class-group coordinates of a fan symmetry, given by
/// its ray permutation: lift each class to a divisor, permute, project.
pub fn pic_action(cg: &ClassGroup, ray_perm: &[usize]) -> IntMatrix {
    assert!(cg.torsion.is_empty(), "free class group expected (smooth complete fan)");
    let k = cg.free_rank;
    let section = solve_integer_matrix(&cg.class_of, &IntMatrix::identity(k))
        .expect("class projection is onto");
    let n = ray_perm.len();
    let perm_matrix = IntMatrix::from_fn(n, n, |i, j| {
        if ray_perm[j] == i {
            BigInt::one()
        } else {
            BigInt::zero()
        }
    });
    cg.class_of.mul(&perm_matrix.mul(&section))
}

/// Cohomology dimensions h^0..h^rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyDims {
    pub dims: Vec<usize>,
}

impl CohomologyDims {
    pub fn euler_char(&self) -> BigInt {
        let mut chi = BigInt::zero();
        for (i, &d) in self.dims.iter().enumerate() {
            if i % 2 == 0 {
                chi += d;
            } else {
                chi -= d;
            }
        }
        chi
    }
}

/// Cohomology of O(D) for an invariant divisor D: for each character m the
/// rays with <m, v_rho> < -a_rho span a subcomplex V of the fan's boundary
/// complex, and H^i picks up the reduced (i-1)-st cohomology of V. The
/// character sum is finite and enumerated over a bounding box with a
/// verified vanishing shell.
pub fn cohomology(f: &Fan, d: &TDivisor) -> Result<CohomologyDims, DivClassError> {
    assert_eq!(d.coeffs.len(), f.rays.len());
    let (lo, hi) = candidate_box(f, d);
    let mut dims = vec![0usize; f.rank + 1];
    let mut m = lo.clone();
    loop {
        let contribution = contribution_at(f, d, &m);
        let on_shell = m.iter().zip(lo.iter().zip(&hi)).any(|(&x, (&l, &h))| x == l || x == h);
        if on_shell && contribution.iter().any(|&c| c != 0) {
            return Err(DivClassError::ShellNotVanishing);
        }
        for (acc, c) in dims.iter_mut().zip(&contribution) {
            *acc += c;
        }
        // odometer
        let mut pos = 0;
        loop {
            if pos == m.len() {
                return Ok(CohomologyDims { dims });
            }
            if m[pos] < hi[pos] {
                m[pos] += 1;
                break;
            }
            m[pos] = lo[pos];
            pos += 1;
        }
    }
}

pub fn euler_char(f: &Fan, d: &TDivisor) -> Result<BigInt, DivClassError> {
    Ok(cohomology(f, d)?.euler_char())
}

/// Per-character contribution: reduced cohomology of the bad-ray subcomplex,
/// shifted by one.
fn contribution_at(f: &Fan, d: &TDivisor, m: &[i64]) -> Vec<usize> {
    let mb: Vec<BigInt> = m.iter().map(|&x| BigInt::from(x)).collect();
    let bad: Vec<usize> = (0..f.rays.len())
        .filter(|&r| dot(&mb, &f.rays[r]) < -&d.coeffs[r])
        .collect();
    let complex = generated_complex(f, &bad);
    let reduced = reduced_cohomology_dims(&complex);
    let mut out = vec![0usize; f.rank + 1];
    for (p, &h) in reduced.iter().enumerate() {
        // index p corresponds to reduced degree p-1, contributing to h^p
        if p < out.len() {
            out[p] += h;
        }
    }
    out
}

/// All subsets of (cone rays intersected with the bad set), over all maximal
/// cones; includes the empty simplex.
fn generated_complex(f: &Fan, bad: &[usize]) -> BTreeSet<Vec<usize>> {
    let mut simplices = BTreeSet::new();
    simplices.insert(vec![]);
    for cone in &f.max_cones {
        let present: Vec<usize> = cone.iter().filter(|r| bad.contains(r)).cloned().collect();
        for mask in 1u64..(1 << present.len()) {
            let s: Vec<usize> = present
                .iter()
                .enumerate()
                .filter(|&(k, _)| mask >> k & 1 == 1)
                .map(|(_, &r)| r)
                .collect();
            simplices.insert(s);
        }
    }
    simplices
}

/// Reduced cohomology ranks over the rationals; entry p is the reduced
/// cohomology in degree p-1 (so entry 0 is 1 exactly when the complex is
/// just the empty simplex).
fn reduced_cohomology_dims(simplices: &BTreeSet<Vec<usize>>) -> Vec<usize> {
    let maxdim = simplices.iter().map(|s| s.len()).max().unwrap_or(0);
    // level k holds the k-element simplices (reduced degree k-1)
    let levels: Vec<Vec<&Vec<usize>>> = (0..=maxdim)
        .map(|k| simplices.iter().filter(|s| s.len() == k).collect())
        .collect();
    // coboundary matrices D_k : C^{k-1} -> C^k between levels k and k+1
    let ranks: Vec<usize> = (0..maxdim)
        .map(|k| {
            let rows = levels[k + 1].len();
            let cols = levels[k].len();
            let d = IntMatrix::from_fn(rows, cols, |i, j| {
                let big = levels[k + 1][i];
                let small = levels[k][j];
                match facet_sign(small, big) {
                    Some(s) => BigInt::from(s),
                    None => BigInt::zero(),
                }
            });
            d.rank()
        })
        .collect();
    (0..=maxdim)
        .map(|k| {
            let dim = levels[k].len();
            let out_rank = if k < maxdim { ranks[k] } else { 0 };
            let in_rank = if k > 0 { ranks[k - 1] } else { 0 };
            dim - out_rank - in_rank
        })
        .collect()
}

/// The sign of `small` as a facet of `big` (both sorted), if it is one.
fn facet_sign(small: &[usize], big: &[usize]) -> Option<i64> {
    if small.len() + 1 != big.len() {
        return None;
    }
    let mut missing = None;
    let mut si = 0;
    for (bi, &v) in big.iter().enumerate() {
        if si < small.len() && small[si] == v {
            si += 1;
        } else if missing.is_none() {
            missing = Some(bi);
        } else {
            return None;
        }
    }
    if si != small.len() {
        return None;
    }
    missing.map(|bi| if bi % 2 == 0 { 1 } else { -1 })
}

/// Integer bounding box (padded by one) containing all vertices of the
/// hyperplane arrangement <m, v_rho> = -a_rho.
pub(crate) fn candidate_box(f: &Fan, d: &TDivisor) -> (Vec<i64>, Vec<i64>) {
    let rank = f.rank;
    let mut lo = vec![i64::MAX; rank];
    let mut hi = vec![i64::MIN; rank];
    let mut any = false;
    for subset in subsets_of_size(f.rays.len(), rank) {
        let cols: Vec<Vec<BigInt>> = (0..rank)
            .map(|i| subset.iter().map(|&r| f.rays[r][i].clone()).collect())
            .collect();
        let rhs: Vec<BigInt> = subset.iter().map(|&r| -&d.coeffs[r]).collect();
        if let Some(vertex) = solve_square_rational(&cols, &rhs) {
            any = true;
            for i in 0..rank {
                let fl = vertex[i].floor().to_integer().to_i64().expect("small coordinates");
                let ce = vertex[i].ceil().to_integer().to_i64().expect("small coordinates");
                lo[i] = lo[i].min(fl);
                hi[i] = hi[i].max(ce);
            }
        }
    }
    assert!(any, "complete fan has at least one vertex in the arrangement");
    for i in 0..rank {
        lo[i] -= 1;
        hi[i] += 1;
    }
    (lo, hi)
}

/// Solve the square system sum_j x_j cols[j] = rhs; `None` if singular.
/// `cols[j]` is the column of coefficients of x_j.
fn solve_square_rational(cols: &[Vec<BigInt>], rhs: &[BigInt]) -> Option<Vec<BigRational>> {
    let n = rhs.len();
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> =
                cols.iter().map(|c| BigRational::from(c[i].clone())).collect();
            row.push(BigRational::from(rhs[i].clone()));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        let inv = a[c][c].clone();
        for x in a[c].iter_mut() {
            *x = &*x / &inv;
        }
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let fct = a[i][c].clone();
                for j in 0..=n {
                    let delta = &fct * &a[c][j];
                    a[i][j] = &a[i][j] - &delta;
                }
            }
        }
    }
    Some((0..n).map(|i| a[i][n].clone()).collect())
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        if n - start < k - cur.len() {
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut vec![], &mut out);
    out
}
