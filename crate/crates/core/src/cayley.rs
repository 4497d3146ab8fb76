//! The split Cayley algebra in two fixed bases (the standard idempotent basis
//! and the Cayley-Dickson basis), quaternions, and every derived product:
//! norm, conjugation, para-Cayley product, the 2-fold cross product on the
//! trace-zero part, the 3C triple product, and the type I/II 3-fold cross
//! products.

use std::fmt;
use std::sync::OnceLock;

use crate::linalg::{Matrix, Vector};
use crate::scalar::{Field, Scalar};

pub const DIM: usize = 8;

/// Which multiplication table the coordinates refer to.
///
/// Standard basis: {e1, e2, u1, u2, u3, v1, v2, v3} (indices 0..8).
/// CD basis: {1, w1, ..., w7} with w_i^2 = -1 and w_i w_{i+1} = w_{i+3}
/// cyclically, indices mod 7.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    Std,
    Cd,
}

type Table = [[Option<(i8, usize)>; DIM]; DIM];

fn std_table() -> &'static Table {
    static T: OnceLock<Table> = OnceLock::new();
    T.get_or_init(|| {
        let mut t: Table = [[None; DIM]; DIM];
        let (e1, e2) = (0usize, 1usize);
        let u = |i: usize| 2 + i; // u1,u2,u3 at 2,3,4
        let v = |i: usize| 5 + i; // v1,v2,v3 at 5,6,7
        t[e1][e1] = Some((1, e1));
        t[e2][e2] = Some((1, e2));
        for i in 0..3 {
            t[e1][u(i)] = Some((1, u(i)));
            t[u(i)][e2] = Some((1, u(i)));
            t[e2][v(i)] = Some((1, v(i)));
            t[v(i)][e1] = Some((1, v(i)));
            t[u(i)][v(i)] = Some((-1, e1));
            t[v(i)][u(i)] = Some((-1, e2));
            let j = (i + 1) % 3;
            let k = (i + 2) % 3;
            t[u(i)][u(j)] = Some((1, v(k)));
            t[u(j)][u(i)] = Some((-1, v(k)));
            t[v(i)][v(j)] = Some((1, u(k)));
            t[v(j)][v(i)] = Some((-1, u(k)));
        }
        t
    })
}

fn cd_table() -> &'static Table {
    static T: OnceLock<Table> = OnceLock::new();
    T.get_or_init(|| {
        let mut t: Table = [[None; DIM]; DIM];
        for i in 0..DIM {
            t[0][i] = Some((1, i));
            t[i][0] = Some((1, i));
        }
        for i in 1..DIM {
            t[i][i] = Some((-1, 0));
        }
        for i in 1..=7usize {
            let a = i;
            let b = (i % 7) + 1;
            let c = ((i + 2) % 7) + 1;
            t[a][b] = Some((1, c));
            t[b][a] = Some((-1, c));
            t[b][c] = Some((1, a));
            t[c][b] = Some((-1, a));
            t[c][a] = Some((1, b));
            t[a][c] = Some((-1, b));
        }
        t
    })
}

/// Polar-form Gram matrix n(b_i, b_j) as small integers; b_n = polar/2.
fn polar_gram(basis: Basis) -> [[i8; DIM]; DIM] {
    let mut g = [[0i8; DIM]; DIM];
    match basis {
        Basis::Std => {
            g[0][1] = 1;
            g[1][0] = 1;
            for i in 0..3 {
                g[2 + i][5 + i] = 1;
                g[5 + i][2 + i] = 1;
            }
        }
        Basis::Cd => {
            for (i, row) in g.iter_mut().enumerate() {
                row[i] = 2;
            }
        }
    }
    g
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CayleyElement {
    pub basis: Basis,
    pub coords: Vector,
}

pub const STD_NAMES: [&str; 8] = ["e1", "e2", "u1", "u2", "u3", "v1", "v2", "v3"];
pub const CD_NAMES: [&str; 8] = ["1", "w1", "w2", "w3", "w4", "w5", "w6", "w7"];

impl fmt::Display for CayleyElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = match self.basis {
            Basis::Std => &STD_NAMES,
            Basis::Cd => &CD_NAMES,
        };
        let mut first = true;
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "({})*{}", c, names[i])?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl CayleyElement {
    pub fn zero(field: &Field, basis: Basis) -> CayleyElement {
        CayleyElement {
            basis,
            coords: crate::linalg::zero_vec(field, DIM),
        }
    }

    pub fn one(field: &Field, basis: Basis) -> CayleyElement {
        let mut x = CayleyElement::zero(field, basis);
        match basis {
            Basis::Std => {
                x.coords[0] = field.one();
                x.coords[1] = field.one();
            }
            Basis::Cd => x.coords[0] = field.one(),
        }
        x
    }

    pub fn basis_elem(field: &Field, basis: Basis, idx: usize) -> CayleyElement {
        let mut x = CayleyElement::zero(field, basis);
        x.coords[idx] = field.one();
        x
    }

    pub fn from_coords(basis: Basis, coords: Vector) -> CayleyElement {
        assert_eq!(coords.len(), DIM);
        CayleyElement { basis, coords }
    }

    pub fn field(&self) -> Field {
        self.coords[0].field()
    }

    pub fn is_zero(&self) -> bool {
        crate::linalg::vec_is_zero(&self.coords)
    }

    pub fn add(&self, other: &CayleyElement) -> CayleyElement {
        assert_eq!(self.basis, other.basis, "basis mismatch");
        CayleyElement {
            basis: self.basis,
            coords: crate::linalg::vec_add(&self.coords, &other.coords),
        }
    }

    pub fn sub(&self, other: &CayleyElement) -> CayleyElement {
        assert_eq!(self.basis, other.basis, "basis mismatch");
        CayleyElement {
            basis: self.basis,
            coords: crate::linalg::vec_sub(&self.coords, &other.coords),
        }
    }

    pub fn neg(&self) -> CayleyElement {
        CayleyElement {
            basis: self.basis,
            coords: crate::linalg::vec_neg(&self.coords),
        }
    }

    pub fn scale(&self, c: &Scalar) -> CayleyElement {
        CayleyElement {
            basis: self.basis,
            coords: crate::linalg::vec_scale(c, &self.coords),
        }
    }

    /// Bilinear extension of the basis table.
    pub fn mul(&self, other: &CayleyElement) -> CayleyElement {
        assert_eq!(self.basis, other.basis, "basis mismatch");
        let table = match self.basis {
            Basis::Std => std_table(),
            Basis::Cd => cd_table(),
        };
        let field = self.field();
        let mut out = CayleyElement::zero(&field, self.basis);
        for i in 0..DIM {
            if self.coords[i].is_zero() {
                continue;
            }
            for j in 0..DIM {
                if other.coords[j].is_zero() {
                    continue;
                }
                if let Some((sign, k)) = table[i][j] {
                    let mut term = self.coords[i].mul(&other.coords[j]);
                    if sign < 0 {
                        term = term.neg();
                    }
                    out.coords[k] = out.coords[k].add(&term);
                }
            }
        }
        out
    }

    /// b_n(x, y) = n(x, y)/2, the halved polar form of the norm.
    pub fn bn(&self, other: &CayleyElement) -> Scalar {
        assert_eq!(self.basis, other.basis, "basis mismatch");
        let field = self.field();
        let g = polar_gram(self.basis);
        let mut acc = field.zero();
        for i in 0..DIM {
            if self.coords[i].is_zero() {
                continue;
            }
            for j in 0..DIM {
                if g[i][j] == 0 || other.coords[j].is_zero() {
                    continue;
                }
                let mut t = self.coords[i].mul(&other.coords[j]);
                if g[i][j] == 2 {
                    t = t.add(&t);
                }
                acc = acc.add(&t);
            }
        }
        acc.div(&field.from_i64(2))
    }

    /// Polar form n(x, y) = n(x+y) - n(x) - n(y).
    pub fn polar(&self, other: &CayleyElement) -> Scalar {
        let b = self.bn(other);
        b.add(&b)
    }

    /// The multiplicative norm n(x).
    pub fn norm(&self) -> Scalar {
        self.bn(self)
    }

    /// Canonical involution x -> n(x,1) 1 - x.
    pub fn conj(&self) -> CayleyElement {
        let field = self.field();
        let one = CayleyElement::one(&field, self.basis);
        let t = self.polar(&one);
        one.scale(&t).sub(self)
    }

    /// Trace-zero test: x is in C0 iff n(x, 1) = 0.
    pub fn in_c0(&self) -> bool {
        let one = CayleyElement::one(&self.field(), self.basis);
        self.polar(&one).is_zero()
    }

    /// Para-Cayley product x . y = conj(x) conj(y).
    pub fn para_mul(&self, other: &CayleyElement) -> CayleyElement {
        self.conj().mul(&other.conj())
    }

    /// The 3C triple product {xyz} = (x conj(y)) z.
    pub fn triple_3c(&self, y: &CayleyElement, z: &CayleyElement) -> CayleyElement {
        self.mul(&y.conj()).mul(z)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CayleyError {
    NotInC0(String),
}

impl fmt::Display for CayleyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CayleyError::NotInC0(x) => write!(f, "element is not trace-zero: {x}"),
        }
    }
}

impl std::error::Error for CayleyError {}

/// The 2-fold cross product on C0: for trace-zero x, y the algebra product
/// splits as xy = -b_n(x,y) 1 + x ×  y, and this returns x × y.
pub fn c0_cross(x: &CayleyElement, y: &CayleyElement) -> Result<CayleyElement, CayleyError> {
    if !x.in_c0() {
        return Err(CayleyError::NotInC0(x.to_string()));
    }
    if !y.in_c0() {
        return Err(CayleyError::NotInC0(y.to_string()));
    }
    let field = x.field();
    let one = CayleyElement::one(&field, x.basis);
    Ok(x.mul(y).add(&one.scale(&x.bn(y))))
}

/// The type I (eps = +1) and type II (eps = -1) 3-fold cross products.
pub fn three_fold(
    eps: i32,
    x: &CayleyElement,
    y: &CayleyElement,
    z: &CayleyElement,
) -> CayleyElement {
    assert!(eps == 1 || eps == -1, "eps must be +1 or -1");
    let lead = if eps == 1 {
        x.mul(&y.conj()).mul(z)
    } else {
        x.mul(&y.conj().mul(z))
    };
    lead.sub(&z.scale(&x.bn(y)))
        .sub(&x.scale(&y.bn(z)))
        .add(&y.scale(&x.bn(z)))
}

/// Left / right multiplication operators as 8 x 8 matrices, in the algebra
/// product (L_x: y -> xy) or the para-Cayley product (l_x: y -> x.y).
pub fn left_mul_matrix(x: &CayleyElement) -> Matrix {
    let field = x.field();
    let cols: Vec<Vector> = (0..DIM)
        .map(|j| x.mul(&CayleyElement::basis_elem(&field, x.basis, j)).coords)
        .collect();
    Matrix::from_cols(&field, cols)
}

pub fn right_mul_matrix(x: &CayleyElement) -> Matrix {
    let field = x.field();
    let cols: Vec<Vector> = (0..DIM)
        .map(|j| CayleyElement::basis_elem(&field, x.basis, j).mul(x).coords)
        .collect();
    Matrix::from_cols(&field, cols)
}

pub fn para_left_matrix(x: &CayleyElement) -> Matrix {
    let field = x.field();
    let cols: Vec<Vector> = (0..DIM)
        .map(|j| {
            x.para_mul(&CayleyElement::basis_elem(&field, x.basis, j))
                .coords
        })
        .collect();
    Matrix::from_cols(&field, cols)
}

pub fn para_right_matrix(x: &CayleyElement) -> Matrix {
    let field = x.field();
    let cols: Vec<Vector> = (0..DIM)
        .map(|j| {
            CayleyElement::basis_elem(&field, x.basis, j)
                .para_mul(x)
                .coords
        })
        .collect();
    Matrix::from_cols(&field, cols)
}

/// Conjugation as an 8 x 8 matrix.
pub fn conj_matrix(field: &Field, basis: Basis) -> Matrix {
    let cols: Vec<Vector> = (0..DIM)
        .map(|j| CayleyElement::basis_elem(field, basis, j).conj().coords)
        .collect();
    Matrix::from_cols(field, cols)
}

/// The Gram matrix of b_n on the chosen basis.
pub fn bn_gram(field: &Field, basis: Basis) -> Matrix {
    let g = polar_gram(basis);
    let half = field.from_i64(1).div(&field.from_i64(2));
    Matrix::from_fn(field, DIM, DIM, |i, j| half.mul(&field.from_i64(g[i][j] as i64)))
}

/// Basis of the trace-zero subspace C0 in standard coordinates:
/// {e1 - e2, u1, u2, u3, v1, v2, v3}.
pub fn c0_basis_std(field: &Field) -> Vec<CayleyElement> {
    let e1 = CayleyElement::basis_elem(field, Basis::Std, 0);
    let e2 = CayleyElement::basis_elem(field, Basis::Std, 1);
    let mut out = vec![e1.sub(&e2)];
    for i in 2..8 {
        out.push(CayleyElement::basis_elem(field, Basis::Std, i));
    }
    out
}

/// Change of basis taking CD coordinates to standard coordinates, available
/// exactly when the field contains i = sqrt(-1): w1 = i(e1 - e2),
/// w2 = u1 + v1, w3 = u2 + v2, w4 = i(u1 - v1), w5 = u3 + v3,
/// w6 = i(u3 - v3), w7 = i(u2 - v2).
pub fn cd_to_std_matrix(field: &Field) -> Option<Matrix> {
    let i = field.from_i64(-1).sqrt_opt()?;
    let f = field;
    let z = || f.zero();
    let cols = vec![
        vec![f.one(), f.one(), z(), z(), z(), z(), z(), z()], // 1 = e1 + e2
        vec![i.clone(), i.neg(), z(), z(), z(), z(), z(), z()], // w1 = i(e1 - e2)
        vec![z(), z(), f.one(), z(), z(), f.one(), z(), z()], // w2 = u1 + v1
        vec![z(), z(), z(), f.one(), z(), z(), f.one(), z()], // w3 = u2 + v2
        vec![z(), z(), i.clone(), z(), z(), i.neg(), z(), z()], // w4 = i(u1 - v1)
        vec![z(), z(), z(), z(), f.one(), z(), z(), f.one()], // w5 = u3 + v3
        vec![z(), z(), z(), z(), i.clone(), z(), z(), i.neg()], // w6 = i(u3 - v3)
        vec![z(), z(), z(), i.clone(), z(), z(), i.neg(), z()], // w7 = i(u2 - v2)
    ];
    Some(Matrix::from_cols(field, cols))
}

/// Quaternions realized inside the CD table as span{1, w1, w2, w4}.
pub const QUAT_DIM: usize = 4;
const QUAT_IDX: [usize; QUAT_DIM] = [0, 1, 2, 4];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuaternionElement {
    pub coords: Vector,
}

impl QuaternionElement {
    pub fn zero(field: &Field) -> QuaternionElement {
        QuaternionElement {
            coords: crate::linalg::zero_vec(field, QUAT_DIM),
        }
    }

    pub fn one(field: &Field) -> QuaternionElement {
        let mut q = QuaternionElement::zero(field);
        q.coords[0] = field.one();
        q
    }

    pub fn basis_elem(field: &Field, idx: usize) -> QuaternionElement {
        let mut q = QuaternionElement::zero(field);
        q.coords[idx] = field.one();
        q
    }

    pub fn from_coords(coords: Vector) -> QuaternionElement {
        assert_eq!(coords.len(), QUAT_DIM);
        QuaternionElement { coords }
    }

    pub fn field(&self) -> Field {
        self.coords[0].field()
    }

    fn to_cayley(&self) -> CayleyElement {
        let field = self.field();
        let mut x = CayleyElement::zero(&field, Basis::Cd);
        for (k, &i) in QUAT_IDX.iter().enumerate() {
            x.coords[i] = self.coords[k].clone();
        }
        x
    }

    fn from_cayley(x: &CayleyElement) -> QuaternionElement {
        debug_assert_eq!(x.basis, Basis::Cd);
        for i in 0..DIM {
            if !QUAT_IDX.contains(&i) {
                debug_assert!(x.coords[i].is_zero(), "product left the quaternion subalgebra");
            }
        }
        QuaternionElement {
            coords: QUAT_IDX.iter().map(|&i| x.coords[i].clone()).collect(),
        }
    }

    pub fn add(&self, other: &QuaternionElement) -> QuaternionElement {
        QuaternionElement {
            coords: crate::linalg::vec_add(&self.coords, &other.coords),
        }
    }

    pub fn sub(&self, other: &QuaternionElement) -> QuaternionElement {
        QuaternionElement {
            coords: crate::linalg::vec_sub(&self.coords, &other.coords),
        }
    }

    pub fn mul(&self, other: &QuaternionElement) -> QuaternionElement {
        QuaternionElement::from_cayley(&self.to_cayley().mul(&other.to_cayley()))
    }

    pub fn conj(&self) -> QuaternionElement {
        QuaternionElement::from_cayley(&self.to_cayley().conj())
    }

    pub fn norm(&self) -> Scalar {
        self.to_cayley().norm()
    }

    pub fn polar(&self, other: &QuaternionElement) -> Scalar {
        self.to_cayley().polar(&other.to_cayley())
    }
}

/// The alternating quaternionic 3-fold cross product x conj(y) z - z conj(y) x
/// (quaternions are associative, so the products are unambiguous).
pub fn quaternion_cross(
    x: &QuaternionElement,
    y: &QuaternionElement,
    z: &QuaternionElement,
) -> QuaternionElement {
    let yc = y.conj();
    x.mul(&yc).mul(z).sub(&z.mul(&yc).mul(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q() -> Field {
        Field::rationals()
    }

    fn be(i: usize) -> CayleyElement {
        CayleyElement::basis_elem(&q(), Basis::Std, i)
    }

    fn w(i: usize) -> CayleyElement {
        CayleyElement::basis_elem(&q(), Basis::Cd, i)
    }

    #[test]
    fn std_table_examples() {
        let f = q();
        // u1 v1 = -e1
        assert_eq!(be(2).mul(&be(5)), be(0).neg());
        // unital
        let one = CayleyElement::one(&f, Basis::Std);
        for i in 0..DIM {
            assert_eq!(one.mul(&be(i)), be(i));
            assert_eq!(be(i).mul(&one), be(i));
        }
    }

    #[test]
    fn cd_table_examples() {
        // w1 w2 = w4, w4 w1 = w2
        assert_eq!(w(1).mul(&w(2)), w(4));
        assert_eq!(w(4).mul(&w(1)), w(2));
        for i in 1..8 {
            assert_eq!(w(i).mul(&w(i)), w(0).neg());
        }
    }

    #[test]
    fn norm_and_conj_examples() {
        let f = q();
        let one = CayleyElement::one(&f, Basis::Std);
        assert_eq!(one.norm(), f.one());
        for i in 1..8 {
            assert_eq!(w(i).norm(), f.one());
        }
        // conj(e1) = 1 - e1 = e2
        assert_eq!(be(0).conj(), be(1));
        assert_eq!(w(1).conj(), w(1).neg());
    }

    #[test]
    fn norm_composition_on_bases() {
        for basis in [Basis::Std, Basis::Cd] {
            let f = q();
            for i in 0..DIM {
                for j in 0..DIM {
                    let x = CayleyElement::basis_elem(&f, basis, i);
                    let y = CayleyElement::basis_elem(&f, basis, j);
                    assert_eq!(x.mul(&y).norm(), x.norm().mul(&y.norm()));
                }
            }
        }
    }

    #[test]
    fn associativity_of_norm_identities() {
        // n(xy, z) = n(y, conj(x) z) = n(x, z conj(y)) on all basis triples
        let f = q();
        for basis in [Basis::Std, Basis::Cd] {
            for i in 0..DIM {
                for j in 0..DIM {
                    for k in 0..DIM {
                        let x = CayleyElement::basis_elem(&f, basis, i);
                        let y = CayleyElement::basis_elem(&f, basis, j);
                        let z = CayleyElement::basis_elem(&f, basis, k);
                        let lhs = x.mul(&y).polar(&z);
                        assert_eq!(lhs, y.polar(&x.conj().mul(&z)));
                        assert_eq!(lhs, x.polar(&z.mul(&y.conj())));
                    }
                }
            }
        }
    }

    #[test]
    fn para_mul_examples() {
        let f = q();
        let one = CayleyElement::one(&f, Basis::Cd);
        assert_eq!(one.para_mul(&one), one);
        // x . 1 = conj(x)
        assert_eq!(w(3).para_mul(&one), w(3).conj());
        // w1 . w2 = (-w1)(-w2) = w4
        assert_eq!(w(1).para_mul(&w(2)), w(4));
    }

    #[test]
    fn c0_cross_examples() {
        let f = q();
        assert_eq!(c0_cross(&w(1), &w(2)).unwrap(), w(4));
        let x = w(1).add(&w(5).scale(&f.from_i64(3)));
        assert!(c0_cross(&x, &x).unwrap().is_zero());
        // u1 x v1 = (e2 - e1)/2
        let u1 = be(2);
        let v1 = be(5);
        let want = be(1).sub(&be(0)).scale(&f.from_ratio(1, 2));
        assert_eq!(c0_cross(&u1, &v1).unwrap(), want);
        // e1 is not trace-zero
        assert!(c0_cross(&be(0), &v1).is_err());
    }

    #[test]
    fn c0_cross_is_anticommutative_with_recoil_identity() {
        // (x ×  y) ×  y = b_n(x,y) y - b_n(y,y) x on all C0 basis pairs
        let f = q();
        let basis = c0_basis_std(&f);
        for x in &basis {
            for y in &basis {
                let xy = c0_cross(x, y).unwrap();
                let lhs = c0_cross(&xy, y).unwrap();
                let rhs = y.scale(&x.bn(y)).sub(&x.scale(&y.bn(y)));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn triple_3c_examples() {
        let f = q();
        let one = CayleyElement::one(&f, Basis::Cd);
        let z = w(5).add(&w(2));
        assert_eq!(one.triple_3c(&one, &z), z);
        // {w1 w2 1} = -w4
        assert_eq!(w(1).triple_3c(&w(2), &one), w(4).neg());
        // {x x y} = n(x) y = {y x x}
        let x = w(1).add(&w(3).scale(&f.from_i64(2)));
        let y = w(6).sub(&one);
        assert_eq!(x.triple_3c(&x, &y), y.scale(&x.norm()));
        assert_eq!(y.triple_3c(&x, &x), y.scale(&x.norm()));
    }

    #[test]
    fn three_fold_examples() {
        let f = q();
        let one = CayleyElement::one(&f, Basis::Std);
        let y = be(3).add(&be(6));
        assert!(three_fold(1, &one, &y, &one).is_zero());
        // X1(e1, e2, u1) = u1/2
        let got = three_fold(1, &be(0), &be(1), &be(2));
        assert_eq!(got, be(2).scale(&f.from_ratio(1, 2)));
        // X(x, x, z) = 0
        let x = be(0).add(&be(4));
        let z = be(7).sub(&be(1));
        assert!(three_fold(1, &x, &x, &z).is_zero());
        assert!(three_fold(-1, &x, &x, &z).is_zero());
    }

    #[test]
    fn quaternion_cross_examples() {
        let f = q();
        let one = QuaternionElement::one(&f);
        let w1 = QuaternionElement::basis_elem(&f, 1);
        let w2 = QuaternionElement::basis_elem(&f, 2);
        let w4 = QuaternionElement::basis_elem(&f, 3);
        // closure sanity: w1 w2 = w4 inside the quaternions
        assert_eq!(w1.mul(&w2), w4);
        let z = w2.add(&one);
        assert!(crate::linalg::vec_is_zero(
            &quaternion_cross(&w1, &w1, &z).coords
        ));
        assert!(crate::linalg::vec_is_zero(
            &quaternion_cross(&one, &one, &z).coords
        ));
        // X(1, w1, w2) = -2 w4
        let got = quaternion_cross(&one, &w1, &w2);
        assert_eq!(got, QuaternionElement::from_coords(crate::linalg::vec_scale(
            &f.from_i64(-2),
            &w4.coords,
        )));
    }

    #[test]
    fn cd_to_std_transport() {
        // over F5 (i = 2) the CD table is the transported standard table
        let f5 = Field::prime(5).unwrap();
        let m = cd_to_std_matrix(&f5).unwrap();
        for i in 0..DIM {
            for j in 0..DIM {
                let wi = CayleyElement::from_coords(Basis::Std, m.col(i));
                let wj = CayleyElement::from_coords(Basis::Std, m.col(j));
                let prod_std = wi.mul(&wj);
                let prod_cd = CayleyElement::basis_elem(&f5, Basis::Cd, i)
                    .mul(&CayleyElement::basis_elem(&f5, Basis::Cd, j));
                let transported = CayleyElement::from_coords(Basis::Std, m.mul_vec(&prod_cd.coords));
                assert_eq!(prod_std, transported, "basis elements {i}, {j}");
            }
        }
        assert!(cd_to_std_matrix(&q()).is_none());
    }

    fn arb_elem(basis: Basis) -> impl Strategy<Value = CayleyElement> {
        proptest::collection::vec(-5i64..5, DIM).prop_map(move |v| {
            let f = q();
            CayleyElement::from_coords(basis, v.into_iter().map(|x| f.from_i64(x)).collect())
        })
    }

    fn arb_quat() -> impl Strategy<Value = QuaternionElement> {
        proptest::collection::vec(-5i64..5, QUAT_DIM).prop_map(|v| {
            let f = q();
            QuaternionElement::from_coords(v.into_iter().map(|x| f.from_i64(x)).collect())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn cayley_hamilton(x in arb_elem(Basis::Std)) {
            let f = q();
            let one = CayleyElement::one(&f, Basis::Std);
            let lhs = x.mul(&x)
                .sub(&x.scale(&x.polar(&one)))
                .add(&one.scale(&x.norm()));
            prop_assert!(lhs.is_zero());
        }

        #[test]
        fn norm_multiplicative_fuzzed(x in arb_elem(Basis::Cd), y in arb_elem(Basis::Cd)) {
            prop_assert_eq!(x.mul(&y).norm(), x.norm().mul(&y.norm()));
        }

        #[test]
        fn triple_3c_norm_identity(x in arb_elem(Basis::Std), y in arb_elem(Basis::Std)) {
            prop_assert_eq!(x.triple_3c(&x, &y), y.scale(&x.norm()));
            prop_assert_eq!(y.triple_3c(&x, &x), y.scale(&x.norm()));
        }

        #[test]
        fn quaternion_lambda_identities(x in arb_quat(), y in arb_quat(), z in arb_quat()) {
            // coefficient-of-lambda^2 identity and its two companions
            let n = |a: &QuaternionElement| a.norm();
            let pol = |a: &QuaternionElement, b: &QuaternionElement| a.polar(b);
            let yc = y.conj();
            let xyz = x.mul(&yc).mul(&z);
            let zyx = z.mul(&yc).mul(&x);
            let xyx = x.mul(&yc).mul(&x);
            let zyz = z.mul(&yc).mul(&z);
            // (Qa): n(xyz + zyx) + n(xyx, zyz) = (n(x,z)^2 + 2 n(x) n(z)) n(y)
            let lhs_a = xyz.add(&zyx).norm().add(&pol(&xyx, &zyz));
            let two = q().from_i64(2);
            let rhs_a = pol(&x, &z).mul(&pol(&x, &z))
                .add(&two.mul(&n(&x)).mul(&n(&z)))
                .mul(&n(&y));
            prop_assert_eq!(lhs_a, rhs_a);
            // (Qb): n(xyz + zyx) = 2 n(x) n(y) n(z) + n(xyz, zyx)
            let lhs_b = xyz.add(&zyx).norm();
            let rhs_b = two.mul(&n(&x)).mul(&n(&y)).mul(&n(&z)).add(&pol(&xyz, &zyx));
            prop_assert_eq!(lhs_b, rhs_b);
            // (Qc): n(xyx, zyz) = n(x,y) n(y,z) n(z,x) - n(x) n(y,z)^2
            //       - n(z) n(x,y)^2 + 2 n(x) n(y) n(z)
            let lhs_c = pol(&xyx, &zyz);
            let rhs_c = pol(&x, &y).mul(&pol(&y, &z)).mul(&pol(&z, &x))
                .sub(&n(&x).mul(&pol(&y, &z)).mul(&pol(&y, &z)))
                .sub(&n(&z).mul(&pol(&x, &y)).mul(&pol(&x, &y)))
                .add(&two.mul(&n(&x)).mul(&n(&y)).mul(&n(&z)));
            prop_assert_eq!(lhs_c, rhs_c);
        }

        #[test]
        fn quaternion_cross_norm_is_gram_det(x in arb_quat(), y in arb_quat(), z in arb_quat()) {
            // n(X(x,y,z), X(x,y,z)) equals the 3x3 determinant of polar values
            let cross = quaternion_cross(&x, &y, &z);
            let pol = |a: &QuaternionElement, b: &QuaternionElement| a.polar(b);
            let f = q();
            let g = Matrix::from_fn(&f, 3, 3, |i, j| {
                let pick = |k: usize| match k { 0 => x.clone(), 1 => y.clone(), _ => z.clone() };
                pol(&pick(i), &pick(j))
            });
            prop_assert_eq!(cross.polar(&cross), g.det());
        }
    }
}
