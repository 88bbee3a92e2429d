//! Dense matrices over `ℚ(v)` with exact elimination.

use crate::qring::{normalize_primitive, poly_gcd, LaurentPoly, RingFrac};
use std::fmt;

/// A dense matrix over `ℚ(v)` in row-major layout.
#[derive(Clone, PartialEq, Eq)]
pub struct QvMatrix {
    rows: usize,
    cols: usize,
    data: Vec<RingFrac>,
}

impl QvMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QvMatrix { rows, cols, data: vec![RingFrac::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = RingFrac::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<RingFrac>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        assert!(rows.iter().all(|x| x.len() == c));
        QvMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_columns(cols: Vec<Vec<RingFrac>>, ambient_rows: usize) -> Self {
        let c = cols.len();
        let mut m = Self::zero(ambient_rows, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), ambient_rows);
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn column(&self, j: usize) -> Vec<RingFrac> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[RingFrac]) {
        assert_eq!(col.len(), self.rows);
        for (i, x) in col.iter().enumerate() {
            self[(i, j)] = x.clone();
        }
    }

    pub fn row(&self, i: usize) -> Vec<RingFrac> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn transpose(&self) -> QvMatrix {
        let mut out = QvMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn mul(&self, rhs: &QvMatrix) -> QvMatrix {
        assert_eq!(self.cols, rhs.rows);
        let mut out = QvMatrix::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                out[(i, j)] = dot_product(
                    (0..self.cols).map(|k| (&self[(i, k)], &rhs[(k, j)])),
                );
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[RingFrac]) -> Vec<RingFrac> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| dot_product((0..self.cols).map(|j| (&self[(i, j)], &v[j]))))
            .collect()
    }

    pub fn add(&self, rhs: &QvMatrix) -> QvMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a = &*a + b;
        }
        out
    }

    pub fn sub(&self, rhs: &QvMatrix) -> QvMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a = &*a - b;
        }
        out
    }

    pub fn scale(&self, c: &RingFrac) -> QvMatrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a = &*a * c;
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Stacks `self` above `other`.
    pub fn vstack(&self, other: &QvMatrix) -> QvMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        QvMatrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Places `self` left of `other`.
    pub fn hstack(&self, other: &QvMatrix) -> QvMatrix {
        assert_eq!(self.rows, other.rows);
        let mut out = QvMatrix::zero(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                out[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        out
    }

    /// Rank over `ℚ(v)`.
    pub fn rank(&self) -> usize {
        Rref::of(self).rank()
    }

    /// A `ℚ(v)`-basis of the kernel, columns cleared to primitive integer
    /// Laurent form (no common polynomial factor, unit monomials removed).
    pub fn kernel(&self) -> QvMatrix {
        let rref = Rref::of(self);
        rref.kernel_primitive()
    }
}

impl std::ops::Index<(usize, usize)> for QvMatrix {
    type Output = RingFrac;
    fn index(&self, (i, j): (usize, usize)) -> &RingFrac {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QvMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut RingFrac {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for QvMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| format!("{:?}", self[(i, j)])).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Reduced row echelon form with pivot bookkeeping, reused for rank, kernel,
/// and linear solves.
pub struct Rref {
    pub reduced: QvMatrix,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn of(m: &QvMatrix) -> Self {
        let mut a = m.clone();
        let (rows, cols) = (a.rows, a.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            // Choose the structurally cheapest nonzero pivot in this column.
            let mut best: Option<(usize, usize)> = None;
            for i in r..rows {
                if !a[(i, c)].is_zero() {
                    let w = a[(i, c)].num().num_terms() + a[(i, c)].den().num_terms();
                    if best.map(|(_, bw)| w < bw).unwrap_or(true) {
                        best = Some((i, w));
                    }
                }
            }
            let Some((p, _)) = best else { continue };
            a.swap_rows(r, p);
            let inv = a[(r, c)].inv();
            for j in c..cols {
                a[(r, j)] = &a[(r, j)] * &inv;
            }
            for i in 0..rows {
                if i != r && !a[(i, c)].is_zero() {
                    let f = a[(i, c)].clone();
                    for j in c..cols {
                        let delta = &f * &a[(r, j)];
                        a[(i, j)] = &a[(i, j)] - &delta;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref { reduced: a, pivots }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Kernel basis with one column per free column of the original matrix,
    /// cleared to primitive integer form.
    pub fn kernel_primitive(&self) -> QvMatrix {
        let cols = self.reduced.cols;
        let free: Vec<usize> = (0..cols).filter(|c| !self.pivots.contains(c)).collect();
        let mut out = QvMatrix::zero(cols, free.len());
        for (k, &fc) in free.iter().enumerate() {
            let mut col = vec![RingFrac::zero(); cols];
            col[fc] = RingFrac::one();
            for (r, &pc) in self.pivots.iter().enumerate() {
                let x = &self.reduced[(r, fc)];
                if !x.is_zero() {
                    col[pc] = -x;
                }
            }
            let col = clear_to_primitive(&col);
            for (i, x) in col.into_iter().enumerate() {
                out[(i, k)] = x;
            }
        }
        out
    }

    /// Solves `A x = b` for the original matrix `A`; `None` if inconsistent.
    /// Free variables are set to zero (the lexicographically minimal pivot
    /// choice: pivots were taken greedily left to right).
    pub fn solve(&self, a_original: &QvMatrix, b: &[RingFrac]) -> Option<Vec<RingFrac>> {
        // Reduce b alongside a fresh elimination of [A | b] reusing the pivots:
        // cheaper to just eliminate the augmented column by replaying row ops is
        // not available, so run a small forward solve: express b over pivot
        // columns by elimination on [A|b].
        let aug = {
            let mut m = a_original.clone();
            let extra = QvMatrix::from_columns(vec![b.to_vec()], b.len());
            m = m.hstack(&extra);
            m
        };
        let rref = Rref::of(&aug);
        let bcol = a_original.cols;
        // Inconsistent iff b's column is a pivot.
        if rref.pivots.contains(&bcol) {
            return None;
        }
        let mut x = vec![RingFrac::zero(); a_original.cols];
        for (r, &pc) in rref.pivots.iter().enumerate() {
            x[pc] = rref.reduced[(r, bcol)].clone();
        }
        Some(x)
    }
}

/// Solves `A·X = B` column-wise in one elimination; `None` when some column
/// of `B` is outside the column space of `A`. Free variables are zero.
pub fn solve_matrix(a: &QvMatrix, b: &QvMatrix) -> Option<QvMatrix> {
    assert_eq!(a.rows(), b.rows());
    let aug = a.hstack(b);
    let rref = Rref::of(&aug);
    if rref.pivots.iter().any(|&p| p >= a.cols()) {
        return None;
    }
    let mut x = QvMatrix::zero(a.cols(), b.cols());
    for (r, &pc) in rref.pivots.iter().enumerate() {
        for j in 0..b.cols() {
            x[(pc, j)] = rref.reduced[(r, a.cols() + j)].clone();
        }
    }
    Some(x)
}

impl QvMatrix {
    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

/// Exact dot product `Σ aᵢ·bᵢ` with a single canonicalization at the end:
/// numerators and the common denominator accumulate as plain Laurent
/// polynomials, avoiding a gcd pass per term.
pub fn dot_product<'a>(terms: impl Iterator<Item = (&'a RingFrac, &'a RingFrac)>) -> RingFrac {
    let mut num = LaurentPoly::zero();
    let mut den = LaurentPoly::one();
    for (a, b) in terms {
        if a.is_zero() || b.is_zero() {
            continue;
        }
        let tn = a.num() * b.num();
        let td = a.den() * b.den();
        if td.is_one() {
            if den.is_one() {
                num = &num + &tn;
            } else {
                num = &num + &(&tn * &den);
            }
        } else if td == den {
            num = &num + &tn;
        } else {
            num = &(&num * &td) + &(&tn * &den);
            den = &den * &td;
        }
    }
    if num.is_zero() {
        return RingFrac::zero();
    }
    if den.is_one() {
        return RingFrac::from_poly(num);
    }
    RingFrac::new(num, den)
}

/// Tests `Σ aᵢ·bᵢ = expected` by cross-multiplied comparison of the lazy
/// accumulator, avoiding any gcd normalization.
pub fn dot_equals<'a>(
    terms: impl Iterator<Item = (&'a RingFrac, &'a RingFrac)>,
    expected: &RingFrac,
) -> bool {
    let mut num = LaurentPoly::zero();
    let mut den = LaurentPoly::one();
    for (a, b) in terms {
        if a.is_zero() || b.is_zero() {
            continue;
        }
        let tn = a.num() * b.num();
        let td = a.den() * b.den();
        if td.is_one() {
            if den.is_one() {
                num = &num + &tn;
            } else {
                num = &num + &(&tn * &den);
            }
        } else if td == den {
            num = &num + &tn;
        } else {
            num = &(&num * &td) + &(&tn * &den);
            den = &den * &td;
        }
    }
    // num/den == expected ⟺ num·expected.den == expected.num·den.
    &(&num * expected.den()) == &(expected.num() * &den)
}

/// Scales a `ℚ(v)`-vector to primitive integer Laurent form: clears
/// denominators, strips the common polynomial factor, integer content, and
/// monomial units.
pub fn clear_to_primitive(v: &[RingFrac]) -> Vec<RingFrac> {
    if v.iter().all(|x| x.is_zero()) {
        return v.to_vec();
    }
    // Common denominator.
    let mut den = LaurentPoly::one();
    for x in v {
        if x.is_zero() {
            continue;
        }
        // den := den · x.den / gcd(den, x.den)
        let g = poly_gcd(&den, x.den());
        let extra = x.den().divide_exact(&g).expect("gcd divides");
        den = &den * &extra;
    }
    let mut nums: Vec<LaurentPoly> = v
        .iter()
        .map(|x| {
            if x.is_zero() {
                LaurentPoly::zero()
            } else {
                let co = den.divide_exact(x.den()).expect("common denominator");
                x.num() * &co
            }
        })
        .collect();
    // Strip the common primitive factor and content.
    let mut g = LaurentPoly::zero();
    for n in &nums {
        if n.is_zero() {
            continue;
        }
        g = poly_gcd(&g, n);
        if g.is_one() {
            break;
        }
    }
    if !g.is_one() && !g.is_zero() {
        for n in nums.iter_mut() {
            *n = n.divide_exact(&g).expect("common factor divides");
        }
    }
    let mut content = num_bigint::BigInt::from(0);
    use num_integer::Integer;
    for n in &nums {
        content = content.gcd(&n.content());
        if content == num_bigint::BigInt::from(1) {
            break;
        }
    }
    if content > num_bigint::BigInt::from(1) {
        for n in nums.iter_mut() {
            *n = n.div_content(&content);
        }
    }
    // Shift exponents so the minimal one is zero, and fix the sign of the
    // first nonzero entry's leading coefficient for determinism.
    let min_exp = nums.iter().filter_map(|n| n.min_exp()).min().unwrap_or(0);
    if min_exp != 0 {
        for n in nums.iter_mut() {
            *n = n.shifted(-min_exp);
        }
    }
    if let Some(first) = nums.iter().find(|n| !n.is_zero()) {
        use num_traits::Signed;
        if first.leading_coeff().is_negative() {
            for n in nums.iter_mut() {
                *n = -&*n;
            }
        }
    }
    nums.into_iter().map(RingFrac::from_poly).collect()
}

/// Strips each row of a matrix by its primitive content; preserves kernels
/// and row spaces.
pub fn strip_rows(m: &QvMatrix) -> QvMatrix {
    let rows: Vec<Vec<RingFrac>> = (0..m.rows()).map(|i| clear_to_primitive(&m.row(i))).collect();
    QvMatrix::from_rows(rows)
}

/// Determinant over `ℚ(v)` by fraction-free (Bareiss) elimination on the
/// denominator-cleared integer matrix, with content stripping per pivot step.
pub fn det_bareiss(m: &QvMatrix) -> RingFrac {
    assert_eq!(m.rows(), m.cols());
    let n = m.rows();
    if n == 0 {
        return RingFrac::one();
    }
    // Clear denominators row by row, tracking the correction factor.
    let mut work: Vec<Vec<LaurentPoly>> = Vec::with_capacity(n);
    let mut correction = RingFrac::one();
    for i in 0..n {
        let cleared = clear_to_primitive(&m.row(i));
        // row_original = factor · cleared, so det(m) = Π factor · det(cleared).
        // Recover the factor from the first nonzero entry.
        let mut factor = RingFrac::one();
        for j in 0..n {
            if !m[(i, j)].is_zero() {
                factor = &m[(i, j)] / &cleared[j];
                break;
            }
        }
        if m.row(i).iter().all(|x| x.is_zero()) {
            return RingFrac::zero();
        }
        correction = &correction * &factor;
        work.push(cleared.into_iter().map(|x| x.num().clone()).collect());
    }
    // Bareiss.
    let mut sign = false;
    let mut prev = LaurentPoly::one();
    for k in 0..n - 1 {
        if work[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !work[r][k].is_zero()) else {
                return RingFrac::zero();
            };
            work.swap(k, p);
            sign = !sign;
        }
        let pivot = work[k][k].clone();
        for i in k + 1..n {
            for j in k + 1..n {
                let t1 = &work[i][j] * &pivot;
                let t2 = &work[i][k] * &work[k][j];
                let num = &t1 - &t2;
                work[i][j] = num.divide_exact(&prev).expect("Bareiss division is exact");
            }
            work[i][k] = LaurentPoly::zero();
        }
        prev = pivot;
    }
    let mut det = RingFrac::from_poly(work[n - 1][n - 1].clone());
    if sign {
        det = -&det;
    }
    &det * &correction
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qring::quantum_integer;

    fn f(p: LaurentPoly) -> RingFrac {
        RingFrac::from_poly(p)
    }

    fn fi(c: i64) -> RingFrac {
        RingFrac::from_int(c)
    }

    #[test]
    fn kernel_of_identity_is_empty() {
        let m = QvMatrix::identity(3);
        let k = m.kernel();
        assert_eq!(k.cols(), 0);
        assert_eq!(m.rank(), 3);
    }

    #[test]
    fn kernel_of_nonzero_scalar() {
        let m = QvMatrix::from_rows(vec![vec![f(quantum_integer(3, 1))]]);
        assert_eq!(m.kernel().cols(), 0);
    }

    #[test]
    fn kernel_simple() {
        // ([3], −[3]) has kernel spanned by (1,1).
        let q3 = f(quantum_integer(3, 1));
        let m = QvMatrix::from_rows(vec![vec![q3.clone(), -&q3]]);
        let k = m.kernel();
        assert_eq!(k.cols(), 1);
        assert_eq!(k[(0, 0)], fi(1));
        assert_eq!(k[(1, 0)], fi(1));
        // A·K = 0 and rank(A) + cols(K) = cols(A).
        assert!(m.mul(&k).is_zero());
        assert_eq!(m.rank() + k.cols(), m.cols());
    }

    #[test]
    fn solve_unique_and_inconsistent() {
        let m = QvMatrix::from_rows(vec![
            vec![fi(1), fi(2)],
            vec![fi(0), fi(1)],
        ]);
        let rref = Rref::of(&m);
        let x = rref.solve(&m, &[fi(5), fi(2)]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![fi(5), fi(2)]);
        let sing = QvMatrix::from_rows(vec![vec![fi(1), fi(1)], vec![fi(1), fi(1)]]);
        let r2 = Rref::of(&sing);
        assert!(r2.solve(&sing, &[fi(1), fi(2)]).is_none());
        assert!(r2.solve(&sing, &[fi(1), fi(1)]).is_some());
    }

    #[test]
    fn bareiss_det() {
        let q2 = f(quantum_integer(2, 1));
        let q3 = f(quantum_integer(3, 1));
        let m = QvMatrix::from_rows(vec![
            vec![q2.clone(), q3.clone()],
            vec![q3.clone(), q2.clone()],
        ]);
        let expected = &(&q2 * &q2) - &(&q3 * &q3);
        assert_eq!(det_bareiss(&m), expected);
        // Singular matrix.
        let s = QvMatrix::from_rows(vec![
            vec![q2.clone(), q2.clone()],
            vec![q3.clone(), q3.clone()],
        ]);
        assert!(det_bareiss(&s).is_zero());
        assert_eq!(det_bareiss(&QvMatrix::identity(4)), fi(1));
    }

    #[test]
    fn primitive_clearing() {
        let q2 = quantum_integer(2, 1);
        let q3 = quantum_integer(3, 1);
        let v = vec![
            RingFrac::new(q3.clone(), q2.clone()),
            RingFrac::new(&q3 * &q3, LaurentPoly::one()),
        ];
        let c = clear_to_primitive(&v);
        // All entries integral with no common factor.
        assert!(c.iter().all(|x| x.den().is_one()));
        let g = poly_gcd(c[0].num(), c[1].num());
        assert!(g.is_one());
    }
}
