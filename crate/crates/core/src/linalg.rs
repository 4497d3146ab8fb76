//! Dense exact linear algebra: vectors, matrices, bilinear forms,
//! determinants, linear solvers and nullspaces. Dimensions stay small
//! (n <= 16), so everything is row-major dense.
//!
//! Determinants over the rationals go through fraction-free Bareiss
//! elimination on the scaled integer matrix; other fields use ordinary
//! Gaussian elimination, which is exact there.

use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};

use crate::scalar::{BaseField, Field, Scalar};

pub type Vector = Vec<Scalar>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    field: Field,
    data: Vec<Scalar>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinalgError {
    ShapeMismatch { expected: String, got: String },
    NotSymmetric,
    Degenerate,
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::ShapeMismatch { expected, got } => {
                write!(f, "shape mismatch: expected {expected}, got {got}")
            }
            LinalgError::NotSymmetric => write!(f, "matrix is not symmetric"),
            LinalgError::Degenerate => write!(f, "bilinear form is degenerate"),
        }
    }
}

impl std::error::Error for LinalgError {}

pub fn zero_vec(field: &Field, n: usize) -> Vector {
    vec![field.zero(); n]
}

pub fn basis_vec(field: &Field, n: usize, i: usize) -> Vector {
    let mut v = zero_vec(field, n);
    v[i] = field.one();
    v
}

pub fn vec_add(u: &[Scalar], v: &[Scalar]) -> Vector {
    assert_eq!(u.len(), v.len(), "vector length mismatch");
    u.iter().zip(v).map(|(a, b)| a.add(b)).collect()
}

pub fn vec_sub(u: &[Scalar], v: &[Scalar]) -> Vector {
    assert_eq!(u.len(), v.len(), "vector length mismatch");
    u.iter().zip(v).map(|(a, b)| a.sub(b)).collect()
}

pub fn vec_scale(c: &Scalar, v: &[Scalar]) -> Vector {
    v.iter().map(|a| c.mul(a)).collect()
}

pub fn vec_neg(v: &[Scalar]) -> Vector {
    v.iter().map(|a| a.neg()).collect()
}

pub fn vec_is_zero(v: &[Scalar]) -> bool {
    v.iter().all(|a| a.is_zero())
}

impl Matrix {
    pub fn zero(field: &Field, rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            field: field.clone(),
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Matrix {
        let mut m = Matrix::zero(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_fn(field: &Field, rows: usize, cols: usize, f: impl Fn(usize, usize) -> Scalar) -> Matrix {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix {
            rows,
            cols,
            field: field.clone(),
            data,
        }
    }

    pub fn from_rows(field: &Field, rows: Vec<Vector>) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            field: field.clone(),
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_cols(field: &Field, cols: Vec<Vector>) -> Matrix {
        Matrix::from_rows(field, cols).transpose()
    }

    pub fn diag(field: &Field, entries: &[Scalar]) -> Matrix {
        let n = entries.len();
        let mut m = Matrix::zero(field, n, n);
        for (i, e) in entries.iter().enumerate() {
            m.set(i, i, e.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(&self.field, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        Matrix::from_fn(&self.field, self.rows, self.cols, |i, j| {
            self.get(i, j).add(other.get(i, j))
        })
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        Matrix::from_fn(&self.field, self.rows, self.cols, |i, j| {
            self.get(i, j).sub(other.get(i, j))
        })
    }

    pub fn neg(&self) -> Matrix {
        Matrix::from_fn(&self.field, self.rows, self.cols, |i, j| self.get(i, j).neg())
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix::from_fn(&self.field, self.rows, self.cols, |i, j| c.mul(self.get(i, j)))
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in matrix product");
        let mut out = Matrix::zero(&self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(i, j).add(&a.mul(b));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vector {
        assert_eq!(self.cols, v.len(), "shape mismatch in matrix-vector product");
        let mut out = zero_vec(&self.field, self.rows);
        for i in 0..self.rows {
            let mut acc = self.field.zero();
            for j in 0..self.cols {
                let a = self.get(i, j);
                if !a.is_zero() && !v[j].is_zero() {
                    acc = acc.add(&a.mul(&v[j]));
                }
            }
            out[i] = acc;
        }
        out
    }

    pub fn trace(&self) -> Scalar {
        assert_eq!(self.rows, self.cols);
        let mut t = self.field.zero();
        for i in 0..self.rows {
            t = t.add(self.get(i, i));
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if self.get(i, j) != self.get(j, i) {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Matrix::identity(&self.field, self.rows)
    }

    pub fn det(&self) -> Scalar {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        if self.rows == 0 {
            return self.field.one();
        }
        if let BaseField::Q = self.field.base() {
            if let Field::Base(_) = self.field {
                return self.det_bareiss_q();
            }
        }
        self.det_gauss()
    }

    /// Bareiss fraction-free determinant on the denominator-cleared integer
    /// matrix; exact over Q without intermediate fraction blow-up.
    fn det_bareiss_q(&self) -> Scalar {
        let n = self.rows;
        let mut m: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        let mut scale = BigRational::one();
        for i in 0..n {
            let mut lcm = BigInt::one();
            for j in 0..n {
                if let Scalar::Rat(r) = self.get(i, j) {
                    lcm = num::integer::lcm(lcm, r.denom().clone());
                } else {
                    unreachable!("rational matrix expected");
                }
            }
            scale *= BigRational::from_integer(lcm.clone());
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                if let Scalar::Rat(r) = self.get(i, j) {
                    row.push(r.numer() * (&lcm / r.denom()));
                } else {
                    unreachable!()
                }
            }
            m.push(row);
        }
        let mut sign = 1i32;
        let mut prev = BigInt::one();
        for k in 0..n {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                    Some(i) => {
                        m.swap(k, i);
                        sign = -sign;
                    }
                    None => return self.field.zero(),
                }
            }
            for i in (k + 1)..n {
                for j in (k + 1)..n {
                    let num = &m[k][k] * &m[i][j] - &m[i][k] * &m[k][j];
                    m[i][j] = num / &prev;
                }
                m[i][k] = BigInt::zero();
            }
            prev = m[k][k].clone();
        }
        let mut det = BigRational::from_integer(m[n - 1][n - 1].clone()) / scale;
        if sign < 0 {
            det = -det;
        }
        Scalar::Rat(det)
    }

    fn det_gauss(&self) -> Scalar {
        let n = self.rows;
        let mut m = self.clone();
        let mut det = self.field.one();
        for k in 0..n {
            let pivot = (k..n).find(|&i| !m.get(i, k).is_zero());
            let pivot = match pivot {
                Some(p) => p,
                None => return self.field.zero(),
            };
            if pivot != k {
                for j in 0..n {
                    let a = m.get(k, j).clone();
                    let b = m.get(pivot, j).clone();
                    m.set(k, j, b);
                    m.set(pivot, j, a);
                }
                det = det.neg();
            }
            let pv = m.get(k, k).clone();
            det = det.mul(&pv);
            let pinv = pv.inv();
            for i in (k + 1)..n {
                let factor = m.get(i, k).mul(&pinv);
                if factor.is_zero() {
                    continue;
                }
                for j in k..n {
                    let v = m.get(i, j).sub(&factor.mul(m.get(k, j)));
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    /// Reduced row echelon form; returns pivot column indices.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let pivot = (r..self.rows).find(|&i| !self.get(i, c).is_zero());
            let pivot = match pivot {
                Some(p) => p,
                None => continue,
            };
            if pivot != r {
                for j in 0..self.cols {
                    let a = self.get(r, j).clone();
                    let b = self.get(pivot, j).clone();
                    self.set(r, j, b);
                    self.set(pivot, j, a);
                }
            }
            let pinv = self.get(r, c).inv();
            for j in c..self.cols {
                let v = self.get(r, j).mul(&pinv);
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r || self.get(i, c).is_zero() {
                    continue;
                }
                let factor = self.get(i, c).clone();
                for j in c..self.cols {
                    let v = self.get(i, j).sub(&factor.mul(self.get(r, j)));
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// One exact solution of `A x = rhs` (free variables set to zero), or
    /// None when the system is inconsistent.
    pub fn solve(&self, rhs: &[Scalar]) -> Option<Vector> {
        assert_eq!(self.rows, rhs.len(), "rhs length mismatch");
        let mut aug = Matrix::from_fn(&self.field, self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                rhs[i].clone()
            }
        });
        let pivots = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = zero_vec(&self.field, self.cols);
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug.get(r, self.cols).clone();
        }
        Some(x)
    }

    /// Echelon-normalized kernel basis: one vector per free column, with a 1
    /// in the free coordinate. Deterministic.
    pub fn nullspace(&self) -> Vec<Vector> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: Vec<bool> = {
            let mut s = vec![false; self.cols];
            for &c in &pivots {
                s[c] = true;
            }
            s
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set[free] {
                continue;
            }
            let mut v = zero_vec(&self.field, self.cols);
            v[free] = self.field.one();
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = m.get(r, free).neg();
            }
            basis.push(v);
        }
        basis
    }

    pub fn inverse(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Matrix::from_fn(&self.field, n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else if j - n == i {
                self.field.one()
            } else {
                self.field.zero()
            }
        });
        let pivots = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(Matrix::from_fn(&self.field, n, n, |i, j| {
            aug.get(i, n + j).clone()
        }))
    }

    /// Map entries into another field (used to move rational data into a
    /// quadratic extension).
    pub fn lift_to(&self, field: &Field) -> Matrix {
        Matrix::from_fn(field, self.rows, self.cols, |i, j| field.lift(self.get(i, j)))
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// A finite-dimensional space with the Gram matrix of a nondegenerate
/// symmetric bilinear form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadSpace {
    n: usize,
    gram: Matrix,
}

impl QuadSpace {
    pub fn new(gram: Matrix) -> Result<QuadSpace, LinalgError> {
        if !gram.is_symmetric() {
            return Err(LinalgError::NotSymmetric);
        }
        if gram.det().is_zero() {
            return Err(LinalgError::Degenerate);
        }
        Ok(QuadSpace {
            n: gram.rows(),
            gram,
        })
    }

    pub fn standard(field: &Field, n: usize) -> QuadSpace {
        QuadSpace {
            n,
            gram: Matrix::identity(field, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &Field {
        self.gram.field()
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn det(&self) -> Scalar {
        self.gram.det()
    }

    /// b(u, v) = u^T B v.
    pub fn bform(&self, u: &[Scalar], v: &[Scalar]) -> Scalar {
        assert_eq!(u.len(), self.n, "vector length mismatch");
        assert_eq!(v.len(), self.n, "vector length mismatch");
        let field = self.gram.field();
        let mut acc = field.zero();
        for i in 0..self.n {
            if u[i].is_zero() {
                continue;
            }
            for j in 0..self.n {
                let g = self.gram.get(i, j);
                if g.is_zero() || v[j].is_zero() {
                    continue;
                }
                acc = acc.add(&u[i].mul(g).mul(&v[j]));
            }
        }
        acc
    }

    pub fn bform_basis(&self, i: usize, j: usize) -> &Scalar {
        self.gram.get(i, j)
    }

    /// det(b(v_i, w_j)) for equal-length vector lists.
    pub fn gram_det(&self, vs: &[Vector], ws: &[Vector]) -> Scalar {
        assert_eq!(vs.len(), ws.len(), "gram_det needs equally many rows and columns");
        let r = vs.len();
        let field = self.gram.field();
        Matrix::from_fn(field, r, r, |i, j| self.bform(&vs[i], &ws[j])).det()
    }

    /// Replace B by mu*B.
    pub fn rescale(&self, mu: &Scalar) -> Result<QuadSpace, LinalgError> {
        QuadSpace::new(self.gram.scale(mu))
    }

    /// An orthogonal basis (columns) for the form; exists in characteristic
    /// not two by the standard pivoting argument.
    pub fn orthogonal_basis(&self) -> Vec<Vector> {
        let field = self.gram.field().clone();
        let mut basis: Vec<Vector> = (0..self.n).map(|i| basis_vec(&field, self.n, i)).collect();
        let mut done: Vec<Vector> = Vec::new();
        while !basis.is_empty() {
            // pick a non-isotropic vector among the remaining basis or a sum of two
            let mut pick: Option<Vector> = None;
            for v in &basis {
                if !self.bform(v, v).is_zero() {
                    pick = Some(v.clone());
                    break;
                }
            }
            if pick.is_none() {
                'outer: for a in 0..basis.len() {
                    for b in (a + 1)..basis.len() {
                        let s = vec_add(&basis[a], &basis[b]);
                        if !self.bform(&s, &s).is_zero() {
                            pick = Some(s);
                            break 'outer;
                        }
                    }
                }
            }
            let v = pick.expect("nondegenerate form has a non-isotropic vector");
            let q = self.bform(&v, &v);
            // project the rest onto the orthogonal complement of v
            basis = basis
                .into_iter()
                .map(|w| {
                    let c = self.bform(&v, &w).div(&q);
                    vec_sub(&w, &vec_scale(&c, &v))
                })
                .filter(|w| !vec_is_zero(w))
                .collect();
            // re-extract an independent set
            let field2 = field.clone();
            basis = independent_subset(&field2, basis);
            done.push(v);
        }
        assert_eq!(done.len(), self.n);
        done
    }
}

/// Keep a maximal linearly independent subset, preserving order.
pub fn independent_subset(field: &Field, vecs: Vec<Vector>) -> Vec<Vector> {
    let mut kept: Vec<Vector> = Vec::new();
    for v in vecs {
        let mut rows = kept.clone();
        rows.push(v.clone());
        let m = Matrix::from_rows(field, rows);
        if m.rank() == kept.len() + 1 {
            kept.push(v);
        }
    }
    kept
}
