//! Uniform representation of r-fold cross products, verification of the two
//! defining axioms, constructors for all four families, and the solver that
//! recovers every bilinear form admitting a given product.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cayley::{self, Basis, CayleyElement};
use crate::exterior::{ExtError, VolumeElement};
use crate::linalg::{basis_vec, zero_vec, Matrix, QuadSpace, Vector};
use crate::scalar::{BaseField, Field, Scalar};

pub const DEFAULT_SEED: u64 = 0x5EED;
pub const EXHAUSTIVE_LIMIT: f64 = 3.0e6;
pub const SAMPLE_COUNT: usize = 1000;

#[derive(Debug, Clone)]
pub enum Payload {
    /// Dense structure tensor: entry `tensor[rank(i_1..i_r)]` is the value
    /// X(e_{i_1}, ..., e_{i_r}) as a coordinate vector.
    Tensor(Vec<Vector>),
    /// Lazy star-operator evaluator for arity n-1; never materializes an
    /// order-(n-1) tensor.
    Star(StarData),
}

#[derive(Debug, Clone)]
pub struct StarData {
    pub space: QuadSpace,
    pub omega: VolumeElement,
    /// Column k holds *(e_0 ^ ... e_k-hat ... ^ e_{n-1}).
    star_cols: Matrix,
}

#[derive(Debug, Clone)]
pub struct CrossProduct {
    pub arity: usize,
    pub dim: usize,
    pub field: Field,
    pub payload: Payload,
    /// The reference bilinear form the product was built with, when known.
    pub gram: Option<QuadSpace>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CrossError {
    NotSquare,
    NotComplexStructure,
    NonzeroTrace,
    OddDimension,
    EigensplitFailed,
    ZeroScale,
    MissingGram,
    UnexpectedSolutionSpace(usize),
    Exterior(String),
    BadForm(String),
}

impl fmt::Display for CrossError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CrossError::NotSquare => write!(f, "endomorphism matrix must be square"),
            CrossError::NotComplexStructure => write!(f, "J^2 != -id"),
            CrossError::NonzeroTrace => write!(f, "tr(J) != 0"),
            CrossError::OddDimension => write!(f, "dimension must be even"),
            CrossError::EigensplitFailed => {
                write!(f, "eigenspaces of J do not split the space evenly")
            }
            CrossError::ZeroScale => write!(f, "scale factor must be nonzero"),
            CrossError::MissingGram => write!(f, "cross product has no attached bilinear form"),
            CrossError::UnexpectedSolutionSpace(d) => {
                write!(f, "linear constraint space has unexpected dimension {d}")
            }
            CrossError::Exterior(e) => write!(f, "{e}"),
            CrossError::BadForm(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CrossError {}

impl From<ExtError> for CrossError {
    fn from(e: ExtError) -> CrossError {
        CrossError::Exterior(e.to_string())
    }
}

fn tuple_rank(idx: &[usize], n: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * n + i)
}

/// Iterate all multi-indices of the given length over 0..n.
pub fn multi_indices(n: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = n.pow(len as u32);
    (0..total).map(move |mut r| {
        let mut idx = vec![0usize; len];
        for k in (0..len).rev() {
            idx[k] = r % n;
            r /= n;
        }
        idx
    })
}

impl CrossProduct {
    pub fn from_tensor_fn(
        field: &Field,
        arity: usize,
        dim: usize,
        gram: Option<QuadSpace>,
        f: impl Fn(&[usize]) -> Vector,
    ) -> CrossProduct {
        let mut tensor = Vec::with_capacity(dim.pow(arity as u32));
        for idx in multi_indices(dim, arity) {
            tensor.push(f(&idx));
        }
        CrossProduct {
            arity,
            dim,
            field: field.clone(),
            payload: Payload::Tensor(tensor),
            gram,
        }
    }

    /// X evaluated on a tuple of basis vectors.
    pub fn eval_basis(&self, idx: &[usize]) -> Vector {
        assert_eq!(idx.len(), self.arity, "arity mismatch");
        match &self.payload {
            Payload::Tensor(t) => t[tuple_rank(idx, self.dim)].clone(),
            Payload::Star(data) => {
                // wedge of n-1 distinct basis vectors is +-1 times a hyperblade
                let n = self.dim;
                let mut seen = vec![false; n];
                for &i in idx {
                    if seen[i] {
                        return zero_vec(&self.field, n);
                    }
                    seen[i] = true;
                }
                let missing = (0..n).find(|&k| !seen[k]).unwrap();
                let mut sign = 1i32;
                for a in 0..idx.len() {
                    for b in (a + 1)..idx.len() {
                        if idx[a] > idx[b] {
                            sign = -sign;
                        }
                    }
                }
                let col = data.star_cols.col(missing);
                if sign < 0 {
                    crate::linalg::vec_neg(&col)
                } else {
                    col
                }
            }
        }
    }

    /// Multilinear evaluation on arbitrary vectors.
    pub fn eval(&self, vs: &[Vector]) -> Vector {
        assert_eq!(vs.len(), self.arity, "arity mismatch");
        for v in vs {
            assert_eq!(v.len(), self.dim, "dimension mismatch");
        }
        match &self.payload {
            Payload::Star(data) => {
                crate::exterior::star_cross(&data.space, &data.omega, vs).expect("arity checked")
            }
            Payload::Tensor(t) => {
                let n = self.dim;
                let supports: Vec<Vec<usize>> = vs
                    .iter()
                    .map(|v| (0..n).filter(|&i| !v[i].is_zero()).collect())
                    .collect();
                let mut out = zero_vec(&self.field, n);
                if supports.iter().any(|s| s.is_empty()) {
                    return out;
                }
                let mut pos = vec![0usize; self.arity];
                loop {
                    let mut coeff = self.field.one();
                    let mut idx = Vec::with_capacity(self.arity);
                    for (s, &p) in pos.iter().enumerate() {
                        let i = supports[s][p];
                        idx.push(i);
                        coeff = coeff.mul(&vs[s][i]);
                    }
                    let val = &t[tuple_rank(&idx, n)];
                    for k in 0..n {
                        if !val[k].is_zero() {
                            out[k] = out[k].add(&coeff.mul(&val[k]));
                        }
                    }
                    // advance the multi-index over the supports
                    let mut s = self.arity;
                    loop {
                        if s == 0 {
                            return out;
                        }
                        s -= 1;
                        pos[s] += 1;
                        if pos[s] < supports[s].len() {
                            break;
                        }
                        pos[s] = 0;
                    }
                }
            }
        }
    }

    pub fn attach_gram(mut self, space: QuadSpace) -> CrossProduct {
        self.gram = Some(space);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub ok: bool,
    pub checked: usize,
    pub witness: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum A2Mode {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub axiom1: CheckResult,
    pub axiom2: CheckResult,
    pub a2_mode: A2Mode,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub seed: u64,
    pub samples: usize,
    pub exhaustive_limit: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: DEFAULT_SEED,
            samples: SAMPLE_COUNT,
            exhaustive_limit: EXHAUSTIVE_LIMIT,
        }
    }
}

/// The polarization point set {e_a} union {e_a + e_b, a < b}: a polynomial
/// identity that is quadratic in each vector slot and vanishes on all tuples
/// from this set vanishes identically (characteristic not two).
fn polarization_points(field: &Field, n: usize) -> Vec<Vector> {
    let mut pts = Vec::new();
    for a in 0..n {
        pts.push(basis_vec(field, n, a));
    }
    for a in 0..n {
        for b in (a + 1)..n {
            let mut v = basis_vec(field, n, a);
            v[b] = field.one();
            pts.push(v);
        }
    }
    pts
}

/// Verify the two cross-product axioms for X against the form b.
///
/// Axiom (1) is checked through its bilinear polarization on all basis
/// tuples, which is exhaustive. Axiom (2) is quadratic in every slot; when
/// n^(2r) stays below the exhaustive limit it is checked on the full
/// polarization point set (a complete proof), otherwise on seeded exact
/// samples.
pub fn verify_axioms(x: &CrossProduct, space: &QuadSpace, opts: &VerifyOptions) -> AxiomReport {
    assert_eq!(space.dim(), x.dim, "dimension mismatch");
    let n = x.dim;
    let r = x.arity;
    let field = &x.field;

    // Precompute X on every basis tuple along with pairings against basis
    // vectors: pair_tab[t][c] = b(X(tuple t), e_c).
    let total = n.pow(r as u32);
    let mut xvals: Vec<Vector> = Vec::with_capacity(total);
    let mut pair_tab: Vec<Vector> = Vec::with_capacity(total);
    for idx in multi_indices(n, r) {
        let v = x.eval_basis(&idx);
        let mut pairs = Vec::with_capacity(n);
        for c in 0..n {
            pairs.push(space.bform(&v, &basis_vec(field, n, c)));
        }
        xvals.push(v);
        pair_tab.push(pairs);
    }

    // Axiom (1), polarized: b(X(..a..), e_c) + b(X(..c..), e_a) = 0 over all
    // slots, all basis assignments of the other slots, and all pairs (a, c)
    // including the diagonal.
    let mut a1 = CheckResult {
        ok: true,
        checked: 0,
        witness: None,
    };
    'a1: for slot in 0..r {
        for rest in multi_indices(n, r - 1) {
            let mut idx = vec![0usize; r];
            for (k, &v) in rest.iter().enumerate() {
                idx[if k < slot { k } else { k + 1 }] = v;
            }
            for a in 0..n {
                for c in a..n {
                    idx[slot] = a;
                    let ta = tuple_rank(&idx, n);
                    idx[slot] = c;
                    let tc = tuple_rank(&idx, n);
                    let val = pair_tab[ta][c].add(&pair_tab[tc][a]);
                    a1.checked += 1;
                    if !val.is_zero() {
                        a1.ok = false;
                        idx[slot] = a;
                        a1.witness = Some(format!(
                            "slot {slot}, tuple {idx:?}, pair ({a}, {c}): polarized value {val}"
                        ));
                        break 'a1;
                    }
                }
            }
        }
    }

    // Axiom (2): b(X(v..), X(v..)) = det(b(v_i, v_j)).
    let exhaustive = (n as f64).powi(2 * r as i32) <= opts.exhaustive_limit;
    let mut a2 = CheckResult {
        ok: true,
        checked: 0,
        witness: None,
    };
    if exhaustive {
        let pts = polarization_points(field, n);
        let m = pts.len();
        // supports of the points (coefficients are all one), pairwise form
        // values, and X on points via multilinear expansion of basis values
        let supports: Vec<Vec<usize>> = pts
            .iter()
            .map(|p| (0..n).filter(|&i| !p[i].is_zero()).collect())
            .collect();
        let pt_form: Vec<Vec<Scalar>> = (0..m)
            .map(|i| (0..m).map(|j| space.bform(&pts[i], &pts[j])).collect())
            .collect();
        'a2: for idx in multi_indices(m, r) {
            // X(p_1, ..., p_r) as a sum of precomputed basis tuples
            let mut xv = zero_vec(field, n);
            let mut combo = vec![0usize; r];
            loop {
                let mut rank = 0usize;
                for (s, &c) in combo.iter().enumerate() {
                    rank = rank * n + supports[idx[s]][c];
                }
                for (o, v) in xv.iter_mut().zip(&xvals[rank]) {
                    if !v.is_zero() {
                        *o = o.add(v);
                    }
                }
                let mut s = r;
                let done = loop {
                    if s == 0 {
                        break true;
                    }
                    s -= 1;
                    combo[s] += 1;
                    if combo[s] < supports[idx[s]].len() {
                        break false;
                    }
                    combo[s] = 0;
                };
                if done {
                    break;
                }
            }
            let lhs = space.bform(&xv, &xv);
            let rhs = Matrix::from_fn(field, r, r, |i, j| {
                pt_form[idx[i]][idx[j]].clone()
            })
            .det();
            let d = lhs.sub(&rhs);
            a2.checked += 1;
            if !d.is_zero() {
                a2.ok = false;
                a2.witness = Some(format!(
                    "polarization tuple {idx:?}: b(Xv, Xv) - gram det = {d}"
                ));
                break 'a2;
            }
        }
    } else {
        let diag_defect = |vs: &[Vector]| -> Scalar {
            let xv = x.eval(vs);
            let lhs = space.bform(&xv, &xv);
            let rhs = space.gram_det(vs, vs);
            lhs.sub(&rhs)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        for s in 0..opts.samples {
            let vs: Vec<Vector> = (0..r).map(|_| random_vector(&mut rng, field, n)).collect();
            let d = diag_defect(&vs);
            a2.checked += 1;
            if !d.is_zero() {
                a2.ok = false;
                a2.witness = Some(format!("sample {s}: b(Xv, Xv) - gram det = {d}"));
                break;
            }
        }
    }

    let pass = a1.ok && a2.ok;
    AxiomReport {
        axiom1: a1,
        axiom2: a2,
        a2_mode: if exhaustive {
            A2Mode::Exhaustive
        } else {
            A2Mode::Sampled
        },
        pass,
    }
}

pub fn random_vector(rng: &mut ChaCha8Rng, field: &Field, n: usize) -> Vector {
    (0..n)
        .map(|_| match field.base() {
            BaseField::Q => field.from_i64(rng.gen_range(-9..=9)),
            BaseField::Fp(p) => {
                let v = rng.gen_range(0..p) as i64;
                match field {
                    Field::Base(_) => field.from_i64(v),
                    Field::Ext(_) => {
                        let w = field.sqrt_gen().unwrap();
                        let b = rng.gen_range(0..p) as i64;
                        field.from_i64(v).add(&w.mul(&field.from_i64(b)))
                    }
                }
            }
        })
        .collect()
}

/// The 1-fold family: J with J^2 = -id and tr J = 0, together with an
/// admissible form. When the field contains i the form pairs the two
/// eigenspaces hyperbolically; otherwise the basis {v_i, J v_i} is declared
/// orthonormal.
pub fn build_one_fold(
    space: Option<QuadSpace>,
    j: &Matrix,
) -> Result<(CrossProduct, QuadSpace), CrossError> {
    if j.rows() != j.cols() {
        return Err(CrossError::NotSquare);
    }
    let n = j.rows();
    let field = j.field().clone();
    if n % 2 == 1 {
        return Err(CrossError::OddDimension);
    }
    let minus_id = Matrix::identity(&field, n).neg();
    if j.mul(j) != minus_id {
        return Err(CrossError::NotComplexStructure);
    }
    if !j.trace().is_zero() {
        return Err(CrossError::NonzeroTrace);
    }

    let b = match space {
        Some(space) => {
            // validate skewness; the isometry condition follows from it
            let bt = j.transpose().mul(space.gram());
            if bt.add(&bt.transpose()) != Matrix::zero(&field, n, n) {
                return Err(CrossError::BadForm(
                    "J is not skew relative to the supplied form".into(),
                ));
            }
            space
        }
        None => {
            if let Some(i) = field.from_i64(-1).sqrt_opt() {
                let id = Matrix::identity(&field, n);
                let plus = j.sub(&id.scale(&i)).nullspace();
                let minus = j.add(&id.scale(&i)).nullspace();
                if plus.len() != n / 2 || minus.len() != n / 2 {
                    return Err(CrossError::EigensplitFailed);
                }
                let mut cols = plus;
                cols.extend(minus);
                let c = Matrix::from_cols(&field, cols);
                let cinv = c.inverse().ok_or(CrossError::EigensplitFailed)?;
                let s = n / 2;
                let mut h = Matrix::zero(&field, n, n);
                for k in 0..s {
                    h.set(k, s + k, field.one());
                    h.set(s + k, k, field.one());
                }
                let b = cinv.transpose().mul(&h).mul(&cinv);
                QuadSpace::new(b).map_err(|e| CrossError::BadForm(e.to_string()))?
            } else {
                // greedy K-basis {v_1, J v_1, ..., v_s, J v_s}
                let mut cols: Vec<Vector> = Vec::new();
                for cand in 0..n {
                    if cols.len() == n {
                        break;
                    }
                    let v = basis_vec(&field, n, cand);
                    let jv = j.mul_vec(&v);
                    let mut test = cols.clone();
                    test.push(v.clone());
                    test.push(jv.clone());
                    if Matrix::from_rows(&field, test).rank() == cols.len() + 2 {
                        cols.push(v);
                        cols.push(jv);
                    }
                }
                if cols.len() != n {
                    return Err(CrossError::EigensplitFailed);
                }
                let c = Matrix::from_cols(&field, cols);
                let cinv = c.inverse().ok_or(CrossError::EigensplitFailed)?;
                let b = cinv.transpose().mul(&cinv);
                QuadSpace::new(b).map_err(|e| CrossError::BadForm(e.to_string()))?
            }
        }
    };

    let x = CrossProduct::from_tensor_fn(&field, 1, n, Some(b.clone()), |idx| j.col(idx[0]));
    Ok((x, b))
}

/// The (n-1)-fold family: the star-operator product on a space of
/// discriminant one.
pub fn build_star(space: QuadSpace) -> Result<CrossProduct, CrossError> {
    let n = space.dim();
    let field = space.field().clone();
    let omega = VolumeElement::new(&space)?;
    let star_cols = crate::exterior::star_matrix_on_hyperblades(&space, &omega);
    Ok(CrossProduct {
        arity: n - 1,
        dim: n,
        field,
        payload: Payload::Star(StarData {
            space: space.clone(),
            omega,
            star_cols,
        }),
        gram: Some(space),
    })
}

/// Basis change data for the 7-dimensional trace-zero subspace of the split
/// Cayley algebra: columns of the returned matrix are the C0 basis
/// {e1 - e2, u1, u2, u3, v1, v2, v3} in standard coordinates.
pub fn c0_embedding(field: &Field) -> Matrix {
    let basis = cayley::c0_basis_std(field);
    Matrix::from_cols(field, basis.into_iter().map(|x| x.coords).collect())
}

/// The (7, 2) family: the split product on C0 with the restriction of b_n
/// attached.
pub fn build_c0(field: &Field) -> CrossProduct {
    let emb = c0_embedding(field); // 8 x 7
    let mut cols: Vec<Vector> = (0..7).map(|j| emb.col(j)).collect();
    cols.push(CayleyElement::one(field, Basis::Std).coords);
    let s = Matrix::from_cols(field, cols);
    let sinv = s.inverse().expect("C0 basis plus unit spans");
    let bn = cayley::bn_gram(field, Basis::Std);
    let b7 = Matrix::from_fn(field, 7, 7, |i, j| {
        let bi = emb.col(i);
        let bj = emb.col(j);
        let mut acc = field.zero();
        for k in 0..8 {
            if bi[k].is_zero() {
                continue;
            }
            for l in 0..8 {
                let g = bn.get(k, l);
                if !g.is_zero() && !bj[l].is_zero() {
                    acc = acc.add(&bi[k].mul(g).mul(&bj[l]));
                }
            }
        }
        acc
    });
    let space = QuadSpace::new(b7).expect("b_n restricts nondegenerately to C0");
    CrossProduct::from_tensor_fn(field, 2, 7, Some(space), |idx| {
        let x = CayleyElement::from_coords(Basis::Std, emb.col(idx[0]));
        let y = CayleyElement::from_coords(Basis::Std, emb.col(idx[1]));
        let prod = cayley::c0_cross(&x, &y).expect("basis vectors are trace-zero");
        let coords8 = sinv.mul_vec(&prod.coords);
        debug_assert!(coords8[7].is_zero());
        coords8[..7].to_vec()
    })
}

/// The (8, 3) family: alpha times the type-eps product on the Cayley algebra,
/// with alpha * b_n attached.
pub fn build_three_fold(
    eps: i32,
    alpha: &Scalar,
    field: &Field,
    basis: Basis,
) -> Result<CrossProduct, CrossError> {
    if alpha.is_zero() {
        return Err(CrossError::ZeroScale);
    }
    let bn = cayley::bn_gram(field, basis).scale(alpha);
    let space = QuadSpace::new(bn).expect("scaled b_n stays nondegenerate");
    Ok(CrossProduct::from_tensor_fn(
        field,
        3,
        8,
        Some(space),
        |idx| {
            let x = CayleyElement::basis_elem(field, basis, idx[0]);
            let y = CayleyElement::basis_elem(field, basis, idx[1]);
            let z = CayleyElement::basis_elem(field, basis, idx[2]);
            cayley::three_fold(eps, &x, &y, &z).scale(alpha).coords
        },
    ))
}

/// The 3C triple product {xyz} = (x conj(y)) z as a trilinear tensor with b_n
/// attached. Not a cross product itself; it shares its automorphisms with
/// the type-I 3-fold product.
pub fn build_triple_3c(field: &Field, basis: Basis) -> CrossProduct {
    let space = QuadSpace::new(cayley::bn_gram(field, basis)).expect("b_n is nondegenerate");
    CrossProduct::from_tensor_fn(field, 3, 8, Some(space), |idx| {
        let x = CayleyElement::basis_elem(field, basis, idx[0]);
        let y = CayleyElement::basis_elem(field, basis, idx[1]);
        let z = CayleyElement::basis_elem(field, basis, idx[2]);
        x.triple_3c(&y, &z).coords
    })
}

/// All bilinear forms admitting X: the scaling class {mu b : mu^(r-1) = 1}
/// for r >= 2, each member fully re-verified, or the dimension of the space
/// of linearizable constraints for r = 1.
#[derive(Debug, Clone)]
pub enum AdmissibleForms {
    Finite(Vec<(Scalar, QuadSpace)>),
    Space { dim: usize },
}

pub fn admissible_forms(
    x: &CrossProduct,
    opts: &VerifyOptions,
) -> Result<AdmissibleForms, CrossError> {
    let reference = x.gram.as_ref().ok_or(CrossError::MissingGram)?;
    let n = x.dim;
    let r = x.arity;
    let field = &x.field;

    // symmetric unknowns s_{ab}, a <= b, in row-major upper-triangle order
    let m = n * (n + 1) / 2;
    let slot_of = |a: usize, b: usize| -> usize {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        a * n - a * (a + 1) / 2 + b
    };

    // polarized axiom (1) rows, kept only while they increase the rank
    let mut rows: Vec<Vector> = Vec::new();
    let mut rank = 0usize;
    for slot in 0..r {
        if rank == m {
            break;
        }
        for rest in multi_indices(n, r - 1) {
            let mut idx = vec![0usize; r];
            for (k, &v) in rest.iter().enumerate() {
                idx[if k < slot { k } else { k + 1 }] = v;
            }
            for a in 0..n {
                for c in a..n {
                    idx[slot] = a;
                    let y = x.eval_basis(&idx);
                    idx[slot] = c;
                    let z = x.eval_basis(&idx);
                    let mut row = zero_vec(field, m);
                    for k in 0..n {
                        if !y[k].is_zero() {
                            let s = slot_of(k, c);
                            row[s] = row[s].add(&y[k]);
                        }
                        if !z[k].is_zero() {
                            let s = slot_of(k, a);
                            row[s] = row[s].add(&z[k]);
                        }
                    }
                    if crate::linalg::vec_is_zero(&row) {
                        continue;
                    }
                    let mut cand = rows.clone();
                    cand.push(row.clone());
                    let new_rank = Matrix::from_rows(field, cand).rank();
                    if new_rank > rank {
                        rows.push(row);
                        rank = new_rank;
                    }
                }
            }
        }
    }
    let system = if rows.is_empty() {
        Matrix::zero(field, 1, m)
    } else {
        Matrix::from_rows(field, rows)
    };
    let kernel = system.nullspace();

    if r == 1 {
        return Ok(AdmissibleForms::Space { dim: kernel.len() });
    }

    if kernel.len() != 1 {
        return Err(CrossError::UnexpectedSolutionSpace(kernel.len()));
    }
    // sanity: the reference form solves the linear system
    let mut ref_vec = zero_vec(field, m);
    for a in 0..n {
        for b in a..n {
            ref_vec[slot_of(a, b)] = reference.gram().get(a, b).clone();
        }
    }
    debug_assert!(crate::linalg::vec_is_zero(&system.mul_vec(&ref_vec)));

    let mut out = Vec::new();
    for mu in field.roots_of_unity((r - 1) as u64) {
        let cand = QuadSpace::new(reference.gram().scale(&mu))
            .map_err(|e| CrossError::BadForm(e.to_string()))?;
        let report = verify_axioms(x, &cand, opts);
        if report.pass {
            out.push((mu, cand));
        }
    }
    Ok(AdmissibleForms::Finite(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::rationals()
    }

    fn f5() -> Field {
        Field::prime(5).unwrap()
    }

    fn rot2(field: &Field) -> Matrix {
        Matrix::from_cols(
            field,
            vec![
                vec![field.zero(), field.one()],
                vec![field.from_i64(-1), field.zero()],
            ],
        )
    }

    #[test]
    fn star_eval_matches_exterior() {
        let f = q();
        let x = build_star(QuadSpace::standard(&f, 3)).unwrap();
        assert_eq!(x.eval_basis(&[0, 1]), basis_vec(&f, 3, 2));
        assert_eq!(
            x.eval(&[basis_vec(&f, 3, 0), basis_vec(&f, 3, 1)]),
            basis_vec(&f, 3, 2)
        );
        assert_eq!(
            x.eval_basis(&[1, 0]),
            crate::linalg::vec_neg(&basis_vec(&f, 3, 2))
        );
        assert!(crate::linalg::vec_is_zero(&x.eval_basis(&[1, 1])));
    }

    #[test]
    fn one_fold_eval() {
        let f = q();
        let (x, _b) = build_one_fold(None, &rot2(&f)).unwrap();
        assert_eq!(x.eval(&[basis_vec(&f, 2, 0)]), basis_vec(&f, 2, 1));
    }

    #[test]
    fn one_fold_rejects_non_complex_structures() {
        let f = q();
        let id = Matrix::identity(&f, 2);
        assert_eq!(
            build_one_fold(None, &id).unwrap_err(),
            CrossError::NotComplexStructure
        );
        let odd = Matrix::identity(&f, 3);
        assert_eq!(
            build_one_fold(None, &odd).unwrap_err(),
            CrossError::OddDimension
        );
    }

    #[test]
    fn one_fold_forms_match_proof_construction() {
        // over Q: {v1, J v1} orthonormal gives the identity form
        let fq = q();
        let (_x, b) = build_one_fold(None, &rot2(&fq)).unwrap();
        assert_eq!(b.gram(), &Matrix::identity(&fq, 2));
        // over F5 (i = 2): the eigenlines are isotropic
        let f = f5();
        let (_x, b) = build_one_fold(None, &rot2(&f)).unwrap();
        let id = Matrix::identity(&f, 2);
        let plus = rot2(&f).sub(&id.scale(&f.from_i64(2))).nullspace();
        let v = &plus[0];
        assert!(b.bform(v, v).is_zero());
    }

    #[test]
    fn axioms_pass_for_families() {
        let opts = VerifyOptions::default();
        let c0 = build_c0(&q());
        assert_eq!((c0.arity, c0.dim), (2, 7));
        let g = c0.gram.clone().unwrap();
        assert!(verify_axioms(&c0, &g, &opts).pass);
        for eps in [1, -1] {
            let x = build_three_fold(eps, &q().one(), &q(), Basis::Std).unwrap();
            let g = x.gram.clone().unwrap();
            let rep = verify_axioms(&x, &g, &opts);
            assert_eq!(rep.a2_mode, A2Mode::Exhaustive);
            assert!(rep.pass, "eps {eps}: {rep:?}");
        }
        let star = build_star(QuadSpace::standard(&f5(), 4)).unwrap();
        let g = star.gram.clone().unwrap();
        assert!(verify_axioms(&star, &g, &opts).pass);
        let (x, b) = build_one_fold(None, &rot2(&q())).unwrap();
        assert!(verify_axioms(&x, &b, &opts).pass);
    }

    #[test]
    fn minus_bn_also_admits_type_i() {
        // flipping the sign of b flips the type but keeps both axioms
        let opts = VerifyOptions::default();
        let x = build_three_fold(1, &q().one(), &q(), Basis::Std).unwrap();
        let minus = QuadSpace::new(x.gram.as_ref().unwrap().gram().neg()).unwrap();
        assert!(verify_axioms(&x, &minus, &opts).pass);
    }

    #[test]
    fn scaled_form_fails_axiom_two_with_witness() {
        let opts = VerifyOptions::default();
        let x = build_three_fold(1, &q().one(), &q(), Basis::Std).unwrap();
        let doubled =
            QuadSpace::new(x.gram.as_ref().unwrap().gram().scale(&q().from_i64(2))).unwrap();
        let rep = verify_axioms(&x, &doubled, &opts);
        assert!(rep.axiom1.ok);
        assert!(!rep.axiom2.ok);
        assert!(rep.axiom2.witness.is_some());
        assert!(!rep.pass);
    }

    #[test]
    fn admissible_forms_by_family() {
        let opts = VerifyOptions::default();
        // (7, 2): exactly {b_n}
        let c0 = build_c0(&q());
        match admissible_forms(&c0, &opts).unwrap() {
            AdmissibleForms::Finite(v) => {
                assert_eq!(v.len(), 1);
                assert!(v[0].0.is_one());
            }
            _ => panic!("expected finite"),
        }
        // (8, 3) over Q: exactly {b_n, -b_n}
        let x1 = build_three_fold(1, &q().one(), &q(), Basis::Std).unwrap();
        match admissible_forms(&x1, &opts).unwrap() {
            AdmissibleForms::Finite(v) => {
                let mus: Vec<String> = v.iter().map(|(mu, _)| mu.to_string()).collect();
                assert_eq!(mus, vec!["-1", "1"]);
            }
            _ => panic!("expected finite"),
        }
        // star n=4 over F5: {b, -b} since mu^2 = 1
        let star = build_star(QuadSpace::standard(&f5(), 4)).unwrap();
        match admissible_forms(&star, &opts).unwrap() {
            AdmissibleForms::Finite(v) => assert_eq!(v.len(), 2),
            _ => panic!("expected finite"),
        }
        // r = 1 reports a dimension
        let (x, _) = build_one_fold(None, &rot2(&q())).unwrap();
        match admissible_forms(&x, &opts).unwrap() {
            AdmissibleForms::Space { dim } => assert_eq!(dim, 1),
            _ => panic!("expected space"),
        }
    }

    #[test]
    fn star_permutation_identity_via_eval() {
        // eval reproduces sign(s) * e_{s(n)} for every permutation
        let f = q();
        for n in [3usize, 4] {
            let x = build_star(QuadSpace::standard(&f, n)).unwrap();
            let perms = crate::perm::permutations(n);
            for p in &perms {
                let got = x.eval_basis(&p[..n - 1]);
                let mut want = basis_vec(&f, n, p[n - 1]);
                if crate::perm::perm_sign(p) < 0 {
                    want = crate::linalg::vec_neg(&want);
                }
                assert_eq!(got, want);
            }
        }
    }
}
