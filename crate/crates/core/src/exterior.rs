//! Exterior algebra over a quadratic space: the induced bilinear form on
//! wedge powers, the star operator, and the (n-1)-fold cross product it
//! defines.

use std::collections::BTreeMap;
use std::fmt;

use crate::linalg::{zero_vec, Matrix, QuadSpace, Vector};
use crate::scalar::{Field, Scalar};

/// Homogeneous element of the exterior algebra: a map from strictly
/// increasing index tuples to coefficients. Zero coefficients are never
/// stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtElement {
    n: usize,
    degree: usize,
    field: Field,
    coeffs: BTreeMap<Vec<u8>, Scalar>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtError {
    DegreeOverflow { got: usize, max: usize },
    NonSquareDiscriminant(String),
    Arity { expected: usize, got: usize },
}

impl fmt::Display for ExtError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtError::DegreeOverflow { got, max } => {
                write!(f, "wedge degree {got} exceeds dimension {max}")
            }
            ExtError::NonSquareDiscriminant(d) => write!(
                f,
                "no volume element: 1/det(B) = {d} has no square root in the field"
            ),
            ExtError::Arity { expected, got } => {
                write!(f, "expected {expected} arguments, got {got}")
            }
        }
    }
}

impl std::error::Error for ExtError {}

impl ExtElement {
    pub fn zero(field: &Field, n: usize, degree: usize) -> ExtElement {
        ExtElement {
            n,
            degree,
            field: field.clone(),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn scalar(field: &Field, n: usize, c: Scalar) -> ExtElement {
        let mut e = ExtElement::zero(field, n, 0);
        if !c.is_zero() {
            e.coeffs.insert(Vec::new(), c);
        }
        e
    }

    pub fn from_vector(field: &Field, v: &[Scalar]) -> ExtElement {
        let mut e = ExtElement::zero(field, v.len(), 1);
        for (i, c) in v.iter().enumerate() {
            if !c.is_zero() {
                e.coeffs.insert(vec![i as u8], c.clone());
            }
        }
        e
    }

    pub fn blade(field: &Field, n: usize, indices: &[usize], c: Scalar) -> ExtElement {
        let mut e = ExtElement::zero(field, n, indices.len());
        assert!(indices.windows(2).all(|w| w[0] < w[1]), "blade indices must be strictly increasing");
        if !c.is_zero() {
            e.coeffs.insert(indices.iter().map(|&i| i as u8).collect(), c);
        }
        e
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, indices: &[usize]) -> Scalar {
        let key: Vec<u8> = indices.iter().map(|&i| i as u8).collect();
        self.coeffs.get(&key).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u8>, &Scalar)> {
        self.coeffs.iter()
    }

    pub fn add(&self, other: &ExtElement) -> ExtElement {
        assert_eq!(self.degree, other.degree, "degree mismatch in sum");
        let mut out = self.clone();
        for (k, v) in &other.coeffs {
            let cur = out.coeffs.get(k).cloned().unwrap_or_else(|| self.field.zero());
            let s = cur.add(v);
            if s.is_zero() {
                out.coeffs.remove(k);
            } else {
                out.coeffs.insert(k.clone(), s);
            }
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> ExtElement {
        let mut out = ExtElement::zero(&self.field, self.n, self.degree);
        if c.is_zero() {
            return out;
        }
        for (k, v) in &self.coeffs {
            out.coeffs.insert(k.clone(), c.mul(v));
        }
        out
    }

    /// As a coordinate vector (degree-1 elements only).
    pub fn to_vector(&self) -> Vector {
        assert_eq!(self.degree, 1);
        let mut v = zero_vec(&self.field, self.n);
        for (k, c) in &self.coeffs {
            v[k[0] as usize] = c.clone();
        }
        v
    }
}

/// Merge two strictly increasing tuples; returns (sign, merged) or None if
/// they overlap.
fn merge_blades(a: &[u8], b: &[u8]) -> Option<(i32, Vec<u8>)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut sign = 1i32;
    let mut i = 0;
    let mut j = 0;
    while i < a.len() && j < b.len() {
        if a[i] == b[j] {
            return None;
        }
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            // b[j] moves past the remaining a[i..] entries
            if (a.len() - i) % 2 == 1 {
                sign = -sign;
            }
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some((sign, out))
}

/// Graded-anticommutative wedge product in canonical form.
pub fn wedge(x: &ExtElement, y: &ExtElement) -> Result<ExtElement, ExtError> {
    assert_eq!(x.n, y.n);
    let deg = x.degree + y.degree;
    if deg > x.n {
        return Err(ExtError::DegreeOverflow { got: deg, max: x.n });
    }
    let mut out = ExtElement::zero(&x.field, x.n, deg);
    for (ka, ca) in &x.coeffs {
        for (kb, cb) in &y.coeffs {
            if let Some((sign, key)) = merge_blades(ka, kb) {
                let mut term = ca.mul(cb);
                if sign < 0 {
                    term = term.neg();
                }
                let cur = out.coeffs.get(&key).cloned().unwrap_or_else(|| x.field.zero());
                let s = cur.add(&term);
                if s.is_zero() {
                    out.coeffs.remove(&key);
                } else {
                    out.coeffs.insert(key, s);
                }
            }
        }
    }
    Ok(out)
}

/// The extension of b to the exterior algebra: zero across degrees, and
/// det(b(u_i, v_j)) on blade pairs of equal degree.
pub fn ext_form(space: &QuadSpace, x: &ExtElement, y: &ExtElement) -> Scalar {
    let field = space.field();
    if x.degree != y.degree {
        return field.zero();
    }
    let p = x.degree;
    let mut acc = field.zero();
    for (ka, ca) in &x.coeffs {
        for (kb, cb) in &y.coeffs {
            let sub = Matrix::from_fn(field, p, p, |i, j| {
                space.bform_basis(ka[i] as usize, kb[j] as usize).clone()
            });
            let d = sub.det();
            if !d.is_zero() {
                acc = acc.add(&ca.mul(cb).mul(&d));
            }
        }
    }
    acc
}

/// A volume element: omega = lambda * e_1 ^ ... ^ e_n with b(omega, omega) = 1.
/// The sign convention takes lambda to be the canonical square root of
/// 1/det(B); construction fails when det(B) is not a square.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VolumeElement {
    n: usize,
    pub lambda: Scalar,
}

impl VolumeElement {
    pub fn new(space: &QuadSpace) -> Result<VolumeElement, ExtError> {
        let det = space.det();
        let inv = det.inv();
        match inv.sqrt_opt() {
            Some(lambda) => Ok(VolumeElement {
                n: space.dim(),
                lambda,
            }),
            None => Err(ExtError::NonSquareDiscriminant(inv.to_string())),
        }
    }

    pub fn as_element(&self, field: &Field) -> ExtElement {
        let idx: Vec<usize> = (0..self.n).collect();
        ExtElement::blade(field, self.n, &idx, self.lambda.clone())
    }
}

/// Find mu with mu^n * det(B) a square, if one exists, so that (V, mu*B) has
/// discriminant one. For odd n, mu = det(B) always works.
pub fn rescale_to_disc_one(space: &QuadSpace) -> Option<QuadSpace> {
    if VolumeElement::new(space).is_ok() {
        return Some(space.clone());
    }
    if space.dim() % 2 == 1 {
        let mu = space.det();
        let rescaled = space.rescale(&mu).expect("rescaling keeps nondegeneracy");
        debug_assert!(VolumeElement::new(&rescaled).is_ok());
        return Some(rescaled);
    }
    None
}

/// The unique element of degree n-p with b(*x, y) = b(x ^ y, omega) for all y
/// of degree n-p, computed by solving the pairing system on the blade basis.
pub fn hodge_star(space: &QuadSpace, omega: &VolumeElement, x: &ExtElement) -> ExtElement {
    let n = space.dim();
    let field = space.field().clone();
    let p = x.degree();
    let q = n - p;
    let blades = blades_of_degree(n, q);
    let m = blades.len();
    let omega_el = omega.as_element(&field);
    // pairing matrix A[j][k] = b(f_k, f_j), rhs_j = b(x ^ f_j, omega)
    let a = Matrix::from_fn(&field, m, m, |j, k| {
        let fj = ExtElement::blade(&field, n, &blades[j], field.one());
        let fk = ExtElement::blade(&field, n, &blades[k], field.one());
        ext_form(space, &fk, &fj)
    });
    let mut rhs = Vec::with_capacity(m);
    for bj in &blades {
        let fj = ExtElement::blade(&field, n, bj, field.one());
        let xw = wedge(x, &fj).expect("degree fits");
        rhs.push(ext_form(space, &xw, &omega_el));
    }
    let sol = a
        .solve(&rhs)
        .expect("pairing on wedge powers is nondegenerate for nondegenerate B");
    let mut out = ExtElement::zero(&field, n, q);
    for (k, c) in sol.into_iter().enumerate() {
        if !c.is_zero() {
            out = out.add(&ExtElement::blade(&field, n, &blades[k], c));
        }
    }
    out
}

pub fn blades_of_degree(n: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..=(n - left) {
            cur.push(i);
            rec(i + 1, n, left - 1, cur, out);
            cur.pop();
        }
    }
    rec(0, n, p, &mut cur, &mut out);
    out
}

/// The (n-1)-fold cross product *(v_1 ^ ... ^ v_{n-1}), evaluated lazily.
pub fn star_cross(
    space: &QuadSpace,
    omega: &VolumeElement,
    vs: &[Vector],
) -> Result<Vector, ExtError> {
    let n = space.dim();
    if vs.len() != n - 1 {
        return Err(ExtError::Arity {
            expected: n - 1,
            got: vs.len(),
        });
    }
    let field = space.field().clone();
    let mut acc = ExtElement::scalar(&field, n, field.one());
    for v in vs {
        acc = wedge(&acc, &ExtElement::from_vector(&field, v))?;
        if acc.is_zero() {
            return Ok(zero_vec(&field, n));
        }
    }
    Ok(hodge_star(space, omega, &acc).to_vector())
}

/// Precomputed star operator restricted to (n-1)-blades, as an n x n matrix:
/// column k holds *(e_0 ^ ... e_k-hat ... ^ e_{n-1}).
pub fn star_matrix_on_hyperblades(space: &QuadSpace, omega: &VolumeElement) -> Matrix {
    let n = space.dim();
    let field = space.field().clone();
    let mut cols = Vec::with_capacity(n);
    for k in 0..n {
        let idx: Vec<usize> = (0..n).filter(|&i| i != k).collect();
        let blade = ExtElement::blade(&field, n, &idx, field.one());
        cols.push(hodge_star(space, omega, &blade).to_vector());
    }
    Matrix::from_cols(&field, cols)
}
