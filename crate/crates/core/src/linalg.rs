//! Dense exact matrices over [`Scalar`] and small symbolic matrices over [`Expr`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use ambient_expr::{Expr, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect()).collect())
    }

    /// `E_{ij}`: one in position `(i, j)`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        m[(i, j)] = Scalar::one();
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * c).collect() }
    }

    pub fn trace(&self) -> Scalar {
        let mut s = Scalar::zero();
        for i in 0..self.rows.min(self.cols) {
            s += &self[(i, i)];
        }
        s
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut s = Scalar::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        s += &(a * b);
                    }
                }
                s
            })
            .collect()
    }

    /// `[A, B] = AB - BA`.
    pub fn bracket(&self, other: &Matrix) -> Matrix {
        &(self * other) - &(other * self)
    }

    pub fn rank(&self) -> usize {
        rref(self.clone()).1.len()
    }

    /// Basis of the right kernel `{v : Mv = 0}`.
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        let (r, pivots) = rref(self.clone());
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Scalar::zero(); self.cols];
                v[f] = Scalar::one();
                for (k, &p) in pivots.iter().enumerate() {
                    v[p] = -&r[(k, f)];
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Scalar::one();
        }
        let (r, pivots) = rref(aug);
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    /// Inertia `(positive, negative, zero)` of a symmetric matrix, by
    /// symmetric elimination with exact pivots.
    pub fn inertia(&self) -> (usize, usize, usize) {
        assert_eq!(self.rows, self.cols);
        let mut a = self.clone();
        let n = self.rows;
        let (mut pos, mut neg, mut zero) = (0, 0, 0);
        let mut active: Vec<usize> = (0..n).collect();
        while !active.is_empty() {
            if let Some(&k) = active.iter().find(|&&k| !a[(k, k)].is_zero()) {
                match a[(k, k)].signum() {
                    std::cmp::Ordering::Greater => pos += 1,
                    _ => neg += 1,
                }
                let piv = a[(k, k)].inv().expect("nonzero pivot");
                active.retain(|&x| x != k);
                for &i in &active {
                    let f = &a[(i, k)] * &piv;
                    if f.is_zero() {
                        continue;
                    }
                    for &j in &active {
                        let v = &a[(i, j)] - &(&f * &a[(k, j)]);
                        a[(i, j)] = v;
                    }
                }
                continue;
            }
            // No diagonal pivot: pair (k, l) with a_kl != 0 contributes one of each sign.
            let pair = active.iter().flat_map(|&k| active.iter().map(move |&l| (k, l))).find(|&(k, l)| k != l && !a[(k, l)].is_zero());
            match pair {
                None => {
                    zero += active.len();
                    break;
                }
                Some((k, l)) => {
                    // replace row/col k by k + l: new diagonal 2 a_kl
                    for &j in &active {
                        let v = &a[(k, j)] + &a[(l, j)];
                        a[(k, j)] = v;
                    }
                    for &i in &active {
                        let v = &a[(i, k)] + &a[(i, l)];
                        a[(i, k)] = v;
                    }
                }
            }
        }
        (pos, neg, zero)
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).iter().map(Scalar::to_f64).collect()).collect()
    }
}

/// Reduced row echelon form; returns the reduced matrix and pivot columns.
pub fn rref(mut m: Matrix) -> (Matrix, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        // prefer single-term pivots; their inverses are cheap
        let cand = (r..m.rows)
            .filter(|&i| !m[(i, c)].is_zero())
            .min_by_key(|&i| (m[(i, c)].terms().len(), i));
        let Some(p) = cand else { continue };
        if p != r {
            for j in 0..m.cols {
                m.data.swap(p * m.cols + j, r * m.cols + j);
            }
        }
        let inv = m[(r, c)].inv().expect("nonzero pivot is invertible");
        for j in c..m.cols {
            let v = &m[(r, j)] * &inv;
            m[(r, j)] = v;
        }
        for i in 0..m.rows {
            if i == r || m[(i, c)].is_zero() {
                continue;
            }
            let f = m[(i, c)].clone();
            for j in c..m.cols {
                if m[(r, j)].is_zero() {
                    continue;
                }
                let v = &m[(i, j)] - &(&f * &m[(r, j)]);
                m[(i, j)] = v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

/// Rank of a list of vectors.
pub fn span_rank(vectors: &[Vec<Scalar>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    Matrix::from_rows(vectors.to_vec()).rank()
}

/// Indices of a maximal independent subfamily, chosen greedily in order.
pub fn independent_subset(vectors: &[Vec<Scalar>]) -> Vec<usize> {
    let mut basis: Vec<Vec<Scalar>> = Vec::new();
    let mut keep = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        basis.push(v.clone());
        if span_rank(&basis) == basis.len() {
            keep.push(i);
        } else {
            basis.pop();
        }
    }
    keep
}

/// Intersection of two subspaces given by spanning sets.
pub fn intersect(a: &[Vec<Scalar>], b: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let n = a[0].len();
    // solve Σ x_i a_i - Σ y_j b_j = 0
    let cols = a.len() + b.len();
    let mut m = Matrix::zeros(n, cols);
    for (j, v) in a.iter().enumerate() {
        for i in 0..n {
            m[(i, j)] = v[i].clone();
        }
    }
    for (j, v) in b.iter().enumerate() {
        for i in 0..n {
            m[(i, a.len() + j)] = -&v[i];
        }
    }
    let mut out: Vec<Vec<Scalar>> = m
        .kernel()
        .into_iter()
        .map(|k| {
            let mut v = vec![Scalar::zero(); n];
            for (j, aj) in a.iter().enumerate() {
                if k[j].is_zero() {
                    continue;
                }
                for i in 0..n {
                    v[i] += &(&k[j] * &aj[i]);
                }
            }
            v
        })
        .collect();
    let keep = independent_subset(&out);
    out = keep.into_iter().map(|i| out[i].clone()).collect();
    out
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows);
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += &(a * b);
                    }
                }
            }
        }
        out
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| -a).collect() }
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Square symbolic matrix.
pub type ExprMatrix = Vec<Vec<Expr>>;

fn single_term_pivot(e: &Expr) -> bool {
    e.as_term().is_some()
}

/// Inverse and determinant by Gauss–Jordan elimination, preferring
/// single-term pivots so that monomial denominators stay monomial.
pub fn expr_inverse(m: &ExprMatrix) -> Option<(ExprMatrix, Expr)> {
    let n = m.len();
    let mut a: Vec<Vec<Expr>> = m.clone();
    let mut inv: Vec<Vec<Expr>> = (0..n).map(|i| (0..n).map(|j| if i == j { Expr::one() } else { Expr::zero() }).collect()).collect();
    let mut det = Expr::one();
    for c in 0..n {
        let cand: Vec<usize> = (c..n).filter(|&i| !a[i][c].is_zero()).collect();
        let p = *cand
            .iter()
            .min_by_key(|&&i| (!single_term_pivot(&a[i][c]), a[i][c].term_count(), i))?;
        if p != c {
            a.swap(p, c);
            inv.swap(p, c);
            det = -det;
        }
        let piv = a[c][c].clone();
        det = &det * &piv;
        let pinv = Expr::one() / &piv;
        for j in 0..n {
            if !a[c][j].is_zero() {
                a[c][j] = &a[c][j] * &pinv;
            }
            if !inv[c][j].is_zero() {
                inv[c][j] = &inv[c][j] * &pinv;
            }
        }
        for i in 0..n {
            if i == c || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for j in 0..n {
                if !a[c][j].is_zero() {
                    a[i][j] = &a[i][j] - &(&f * &a[c][j]);
                }
                if !inv[c][j].is_zero() {
                    inv[i][j] = &inv[i][j] - &(&f * &inv[c][j]);
                }
            }
        }
    }
    Some((inv, det))
}

/// Rank of a symbolic matrix over the field of rational expressions.
pub fn expr_rank(m: &[Vec<Expr>]) -> usize {
    let mut a: Vec<Vec<Expr>> = m.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let cand = (r..rows).filter(|&i| !a[i][c].is_zero()).min_by_key(|&i| (!single_term_pivot(&a[i][c]), a[i][c].term_count()));
        let Some(p) = cand else { continue };
        a.swap(p, r);
        let pinv = Expr::one() / &a[r][c];
        for i in r + 1..rows {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &pinv;
            for j in c..cols {
                if !a[r][j].is_zero() {
                    a[i][j] = &a[i][j] - &(&f * &a[r][j]);
                }
            }
        }
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trip() {
        let m = Matrix::from_ints(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, Matrix::identity(3));
    }

    #[test]
    fn kernel_dimension() {
        let m = Matrix::from_ints(&[&[1, 2, 3], &[2, 4, 6]]);
        let k = m.kernel();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(m.apply(v).iter().all(Scalar::is_zero));
        }
    }

    #[test]
    fn inertia_of_hyperbolic_plane() {
        let m = Matrix::from_ints(&[&[0, 1], &[1, 0]]);
        assert_eq!(m.inertia(), (1, 1, 0));
        let d = Matrix::from_ints(&[&[1, 0, 0], &[0, -2, 0], &[0, 0, 0]]);
        assert_eq!(d.inertia(), (1, 1, 1));
    }

    #[test]
    fn symbolic_inverse() {
        let t = Expr::var("t");
        let m = vec![vec![Expr::zero(), t.clone()], vec![t.clone(), Expr::var("r")]];
        let (inv, det) = expr_inverse(&m).unwrap();
        assert!(det.equals(&-(&t * &t)));
        let prod = &(&m[1][0] * &inv[0][1]) + &(&m[1][1] * &inv[1][1]);
        assert!(prod.is_one());
    }

    #[test]
    fn intersection_of_planes() {
        let e = |v: [i64; 3]| v.iter().map(|&x| Scalar::from_int(x)).collect::<Vec<_>>();
        let a = vec![e([1, 0, 0]), e([0, 1, 0])];
        let b = vec![e([0, 1, 0]), e([0, 0, 1])];
        assert_eq!(intersect(&a, &b).len(), 1);
    }
}
