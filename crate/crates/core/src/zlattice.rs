//! Exact integer linear algebra: Smith normal form, kernels, cokernels and
//! integer linear solving. Everything downstream (class groups, group
//! cohomology, the Ext engine) reduces to the routines in this module, so all
//! arithmetic is arbitrary precision and exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Dense integer matrix, row major.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.at(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, entries: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Self::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged row in matrix literal");
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, BigInt::from(x));
            }
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut m = Self::zero(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn column_vector(v: &[BigInt]) -> Self {
        Self::from_fn(v.len(), 1, |i, _| v[i].clone())
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<BigInt> {
        (0..self.cols).map(|j| self.at(i, j).clone()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in matrix product");
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.at(k, j);
                    if !b.is_zero() {
                        let cur = out.at(i, j) + a * b;
                        out.set(i, j, cur);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.at(i, j) * &v[j]).sum())
            .collect()
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self.at(i, j) + other.at(i, j))
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self.at(i, j) - other.at(i, j))
    }

    pub fn neg(&self) -> IntMatrix {
        Self::from_fn(self.rows, self.cols, |i, j| -self.at(i, j))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j { self.at(i, j).is_one() } else { self.at(i, j).is_zero() }
                })
            })
    }

    /// Horizontal concatenation [self | other].
    pub fn hcat(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows);
        Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols { self.at(i, j).clone() } else { other.at(i, j - self.cols).clone() }
        })
    }

    /// Vertical concatenation [self; other].
    pub fn vcat(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.cols);
        Self::from_fn(self.rows + other.rows, self.cols, |i, j| {
            if i < self.rows { self.at(i, j).clone() } else { other.at(i - self.rows, j).clone() }
        })
    }

    pub fn submatrix(&self, row_ids: &[usize], col_ids: &[usize]) -> IntMatrix {
        Self::from_fn(row_ids.len(), col_ids.len(), |i, j| {
            self.at(row_ids[i], col_ids[j]).clone()
        })
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.at(k, k).is_zero() {
                match (k + 1..n).find(|&i| !a.at(i, k).is_zero()) {
                    Some(i) => {
                        for j in 0..n {
                            let tmp = a.at(k, j).clone();
                            a.set(k, j, a.at(i, j).clone());
                            a.set(i, j, tmp);
                        }
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = a.at(i, j) * a.at(k, k) - a.at(i, k) * a.at(k, j);
                    a.set(i, j, num / &prev);
                }
            }
            prev = a.at(k, k).clone();
        }
        sign * a.at(n - 1, n - 1).clone()
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && self.det().abs().is_one()
    }

    /// Rank over the rationals, via integer Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        let mut row = 0;
        for col in 0..a.cols {
            // prefer a +-1 pivot to limit coefficient growth
            let pivot = (row..a.rows)
                .filter(|&i| !a.at(i, col).is_zero())
                .min_by_key(|&i| a.at(i, col).abs());
            let Some(p) = pivot else { continue };
            if p != row {
                for j in 0..a.cols {
                    let tmp = a.at(row, j).clone();
                    a.set(row, j, a.at(p, j).clone());
                    a.set(p, j, tmp);
                }
            }
            for i in row + 1..a.rows {
                if a.at(i, col).is_zero() {
                    continue;
                }
                // integer row operation: piv * R_i - entry * R_row, then strip content
                let piv = a.at(row, col).clone();
                let ent = a.at(i, col).clone();
                let mut g = BigInt::zero();
                for j in col..a.cols {
                    let v = a.at(i, j) * &piv - a.at(row, j) * &ent;
                    if !v.is_zero() {
                        g = g.gcd(&v);
                    }
                    a.set(i, j, v);
                }
                if !g.is_zero() && !g.is_one() {
                    for j in col..a.cols {
                        let v = a.at(i, j) / &g;
                        a.set(i, j, v);
                    }
                }
            }
            rank += 1;
            row += 1;
            if row == a.rows {
                break;
            }
        }
        rank
    }
}

/// Invariants of a finitely generated abelian group: free rank plus invariant
/// factors d_1 | d_2 | ... (each >= 2).
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct AbelianGroupInvariants {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl AbelianGroupInvariants {
    pub fn trivial() -> Self {
        AbelianGroupInvariants { free_rank: 0, torsion: vec![] }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Order of the torsion part; None when the group is infinite.
    pub fn order(&self) -> Option<BigInt> {
        if self.free_rank > 0 {
            return None;
        }
        Some(self.torsion.iter().product())
    }
}

impl fmt::Display for AbelianGroupInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = vec![];
        if self.free_rank == 1 {
            parts.push("Z".to_string());
        } else if self.free_rank > 1 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        for d in &self.torsion {
            parts.push(format!("Z/{}", d));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Smith normal form: returns (u, d, v) with u * m * v = d, u and v
/// unimodular, d diagonal with nonnegative entries forming a divisibility
/// chain d_1 | d_2 | ...
pub fn smith_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let mut d = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut v = IntMatrix::identity(m.cols);
    let n = m.rows.min(m.cols);

    for t in 0..n {
        if !move_pivot(&mut d, &mut u, &mut v, t) {
            break; // remaining block is zero
        }
        loop {
            clear_column(&mut d, &mut u, t);
            clear_row(&mut d, &mut v, t);
            // column and row at t are clear; ensure pivot divides the rest
            if column_clear(&d, t) && row_clear(&d, t) {
                match find_nondivisible(&d, t) {
                    Some((i, j)) => {
                        // add row i to row t, bringing a non-divisible entry
                        // into play, then continue reducing
                        add_row(&mut d, &mut u, i, t, &BigInt::one());
                        let _ = j;
                    }
                    None => break,
                }
            }
        }
    }

    // sign normalization
    for t in 0..n {
        if d.at(t, t).is_negative() {
            negate_row(&mut d, &mut u, t);
        }
    }
    (u, d, v)
}

fn move_pivot(d: &mut IntMatrix, u: &mut IntMatrix, v: &mut IntMatrix, t: usize) -> bool {
    let mut best: Option<(usize, usize)> = None;
    for i in t..d.rows {
        for j in t..d.cols {
            if !d.at(i, j).is_zero() {
                let better = match best {
                    None => true,
                    Some((bi, bj)) => d.at(i, j).abs() < d.at(bi, bj).abs(),
                };
                if better {
                    best = Some((i, j));
                }
            }
        }
    }
    let Some((i, j)) = best else { return false };
    if i != t {
        swap_rows(d, u, i, t);
    }
    if j != t {
        swap_cols(d, v, j, t);
    }
    true
}

fn column_clear(d: &IntMatrix, t: usize) -> bool {
    (t + 1..d.rows).all(|i| d.at(i, t).is_zero())
}

fn row_clear(d: &IntMatrix, t: usize) -> bool {
    (t + 1..d.cols).all(|j| d.at(t, j).is_zero())
}

fn find_nondivisible(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let p = d.at(t, t).clone();
    for i in t + 1..d.rows {
        for j in t + 1..d.cols {
            if !(d.at(i, j) % &p).is_zero() {
                return Some((i, j));
            }
        }
    }
    None
}

fn clear_column(d: &mut IntMatrix, u: &mut IntMatrix, t: usize) {
    loop {
        // keep the smallest nonzero entry of the column at the pivot
        if let Some(i) = (t + 1..d.rows)
            .filter(|&i| !d.at(i, t).is_zero())
            .min_by_key(|&i| d.at(i, t).abs())
        {
            if d.at(t, t).is_zero() || d.at(i, t).abs() < d.at(t, t).abs() {
                swap_rows(d, u, i, t);
            }
        } else {
            return;
        }
        for i in t + 1..d.rows {
            if !d.at(i, t).is_zero() {
                let q = d.at(i, t) / d.at(t, t);
                if !q.is_zero() {
                    sub_row(d, u, i, t, &q);
                }
            }
        }
        if column_clear(d, t) {
            return;
        }
    }
}

fn clear_row(d: &mut IntMatrix, v: &mut IntMatrix, t: usize) {
    loop {
        if let Some(j) = (t + 1..d.cols)
            .filter(|&j| !d.at(t, j).is_zero())
            .min_by_key(|&j| d.at(t, j).abs())
        {
            if d.at(t, t).is_zero() || d.at(t, j).abs() < d.at(t, t).abs() {
                swap_cols(d, v, j, t);
            }
        } else {
            return;
        }
        for j in t + 1..d.cols {
            if !d.at(t, j).is_zero() {
                let q = d.at(t, j) / d.at(t, t);
                if !q.is_zero() {
                    sub_col(d, v, j, t, &q);
                }
            }
        }
        if row_clear(d, t) {
            return;
        }
    }
}

fn swap_rows(d: &mut IntMatrix, u: &mut IntMatrix, a: usize, b: usize) {
    for j in 0..d.cols {
        let tmp = d.at(a, j).clone();
        d.set(a, j, d.at(b, j).clone());
        d.set(b, j, tmp);
    }
    for j in 0..u.cols {
        let tmp = u.at(a, j).clone();
        u.set(a, j, u.at(b, j).clone());
        u.set(b, j, tmp);
    }
}

fn swap_cols(d: &mut IntMatrix, v: &mut IntMatrix, a: usize, b: usize) {
    for i in 0..d.rows {
        let tmp = d.at(i, a).clone();
        d.set(i, a, d.at(i, b).clone());
        d.set(i, b, tmp);
    }
    for i in 0..v.rows {
        let tmp = v.at(i, a).clone();
        v.set(i, a, v.at(i, b).clone());
        v.set(i, b, tmp);
    }
}

/// row_a -= q * row_b (tracked in u)
fn sub_row(d: &mut IntMatrix, u: &mut IntMatrix, a: usize, b: usize, q: &BigInt) {
    for j in 0..d.cols {
        let x = d.at(a, j) - q * d.at(b, j);
        d.set(a, j, x);
    }
    for j in 0..u.cols {
        let x = u.at(a, j) - q * u.at(b, j);
        u.set(a, j, x);
    }
}

fn add_row(d: &mut IntMatrix, u: &mut IntMatrix, src: usize, dst: usize, q: &BigInt) {
    for j in 0..d.cols {
        let x = d.at(dst, j) + q * d.at(src, j);
        d.set(dst, j, x);
    }
    for j in 0..u.cols {
        let x = u.at(dst, j) + q * u.at(src, j);
        u.set(dst, j, x);
    }
}

/// col_a -= q * col_b (tracked in v)
fn sub_col(d: &mut IntMatrix, v: &mut IntMatrix, a: usize, b: usize, q: &BigInt) {
    for i in 0..d.rows {
        let x = d.at(i, a) - q * d.at(i, b);
        d.set(i, a, x);
    }
    for i in 0..v.rows {
        let x = v.at(i, a) - q * v.at(i, b);
        v.set(i, a, x);
    }
}

fn negate_row(d: &mut IntMatrix, u: &mut IntMatrix, t: usize) {
    for j in 0..d.cols {
        let x = -d.at(t, j);
        d.set(t, j, x);
    }
    for j in 0..u.cols {
        let x = -u.at(t, j);
        u.set(t, j, x);
    }
}

/// Columns form a saturated Z-basis of { x : m x = 0 }.
pub fn kernel_basis(m: &IntMatrix) -> IntMatrix {
    let (_, d, v) = smith_normal_form(m);
    let n = m.rows.min(m.cols);
    let r = (0..n).filter(|&i| !d.at(i, i).is_zero()).count();
    // kernel of d is spanned by e_r..e_{cols-1}; push through v
    let ids: Vec<usize> = (r..m.cols).collect();
    v.submatrix(&(0..m.cols).collect::<Vec<_>>(), &ids)
}

/// Invariants of Z^rows / im(m), plus a projection from Z^rows onto the free
/// part coordinates.
pub fn cokernel(m: &IntMatrix) -> (AbelianGroupInvariants, IntMatrix) {
    let (u, d, _) = smith_normal_form(m);
    let n = m.rows.min(m.cols);
    let mut torsion = vec![];
    let mut rank_im = 0;
    for i in 0..n {
        let di = d.at(i, i);
        if di.is_zero() {
            continue;
        }
        rank_im += 1;
        if !di.is_one() {
            torsion.push(di.clone());
        }
    }
    let free_rank = m.rows - rank_im;
    let free_ids: Vec<usize> = (rank_im..m.rows).collect();
    let proj = u.submatrix(&free_ids, &(0..m.rows).collect::<Vec<_>>());
    (AbelianGroupInvariants { free_rank, torsion }, proj)
}

/// Some x with m x = b over Z, if one exists.
pub fn solve_integer(m: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(b.len(), m.rows, "right-hand side length must equal rows");
    let (u, d, v) = smith_normal_form(m);
    let ub = u.mul_vec(b);
    let n = m.rows.min(m.cols);
    let mut y = vec![BigInt::zero(); m.cols];
    for i in 0..m.rows {
        if i < n && !d.at(i, i).is_zero() {
            let (q, r) = ub[i].div_rem(d.at(i, i));
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !ub[i].is_zero() {
            return None;
        }
    }
    Some(v.mul_vec(&y))
}

/// Solve m X = b columnwise; None if any column has no integral solution.
pub fn solve_integer_matrix(m: &IntMatrix, b: &IntMatrix) -> Option<IntMatrix> {
    assert_eq!(b.rows, m.rows);
    let mut out = IntMatrix::zero(m.cols, b.cols);
    for j in 0..b.cols {
        let x = solve_integer(m, &b.col(j))?;
        for (i, xi) in x.into_iter().enumerate() {
            out.set(i, j, xi);
        }
    }
    Some(out)
}

/// Invariants of the quotient (column span of `basis`) / (column span of
/// `gens`). `basis` must be a basis of its span and the span of `gens` must
/// lie inside it over Z.
pub fn quotient_invariants(basis: &IntMatrix, gens: &IntMatrix) -> AbelianGroupInvariants {
    let coords = solve_integer_matrix(basis, gens)
        .expect("sublattice generators do not lie in the ambient lattice");
    cokernel(&coords).0
}
