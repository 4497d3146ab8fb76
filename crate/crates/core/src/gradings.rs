//! Gradings by abelian groups on cross products: verification, the
//! dimension-map classification for the arity n-1 family, the Cartan and
//! Cayley-Dickson constructions for the 3-fold product, fine gradings with
//! their universal groups, and Weyl groups (by formula and by search).

use std::collections::BTreeMap;
use std::fmt;

use crate::abgroup::{fine_n1_presentation, AbGroup, GroupElem, Hom};
use crate::cayley::Basis;
use crate::crossprod::{
    build_star, build_triple_3c, multi_indices, CrossProduct,
};
use crate::linalg::{basis_vec, vec_is_zero, Matrix, QuadSpace, Vector};
use crate::scalar::Field;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructureTag {
    C0Cross,
    ThreeFold,
    Triple3C,
    Star,
    OneFold,
}

impl fmt::Display for StructureTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StructureTag::C0Cross => "c0x",
            StructureTag::ThreeFold => "x1",
            StructureTag::Triple3C => "3c",
            StructureTag::Star => "star",
            StructureTag::OneFold => "onefold",
        };
        f.write_str(s)
    }
}

/// A grading of a multilinear structure: a homogeneous basis with degrees in
/// a finitely generated abelian group.
#[derive(Debug, Clone)]
pub struct Grading {
    pub tag: StructureTag,
    pub map: CrossProduct,
    pub group: AbGroup,
    /// (vector, degree) pairs; the vectors form a basis of the space.
    pub basis: Vec<(Vector, GroupElem)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GradingError {
    NotABasis,
    ClosureViolated(String),
    PairingViolated(String),
    DeltaInvalid(String),
    Discriminant(String),
    RequiresClosedField,
    BadSubgroup(String),
    ShiftOrder,
    Classify(String),
}

impl fmt::Display for GradingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GradingError::NotABasis => write!(f, "homogeneous vectors do not form a basis"),
            GradingError::ClosureViolated(w) => write!(f, "closure violated: {w}"),
            GradingError::PairingViolated(w) => write!(f, "orthogonality violated: {w}"),
            GradingError::DeltaInvalid(w) => write!(f, "invalid dimension map: {w}"),
            GradingError::Discriminant(w) => write!(f, "{w}"),
            GradingError::RequiresClosedField =>

                write!(f, "normalization requires square roots missing from the field"),
            GradingError::BadSubgroup(w) => write!(f, "{w}"),
            GradingError::ShiftOrder => write!(f, "shift element must satisfy h^(r-1) = e"),
            GradingError::Classify(w) => write!(f, "classification failed: {w}"),
        }
    }
}

impl std::error::Error for GradingError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradingReport {
    pub ok: bool,
    pub checked: usize,
    pub violations: Vec<String>,
}

impl Grading {
    pub fn dim(&self) -> usize {
        self.map.dim
    }

    pub fn field(&self) -> Field {
        self.map.field.clone()
    }

    /// Basis matrix (columns are the homogeneous vectors) and its inverse.
    pub fn basis_matrices(&self) -> Result<(Matrix, Matrix), GradingError> {
        let field = self.field();
        let p = Matrix::from_cols(&field, self.basis.iter().map(|(v, _)| v.clone()).collect());
        let pinv = p.inverse().ok_or(GradingError::NotABasis)?;
        Ok((p, pinv))
    }

    /// Degrees in first-appearance order with the basis indices they own.
    pub fn components(&self) -> Vec<(GroupElem, Vec<usize>)> {
        let mut out: Vec<(GroupElem, Vec<usize>)> = Vec::new();
        for (i, (_, g)) in self.basis.iter().enumerate() {
            match out.iter_mut().find(|(d, _)| d == g) {
                Some((_, idxs)) => idxs.push(i),
                None => out.push((g.clone(), vec![i])),
            }
        }
        out
    }

    pub fn support(&self) -> Vec<GroupElem> {
        let mut s: Vec<GroupElem> = self.components().into_iter().map(|(g, _)| g).collect();
        s.sort();
        s
    }

    /// Every homogeneous component is one-dimensional.
    pub fn is_fine(&self) -> bool {
        self.components().iter().all(|(_, idxs)| idxs.len() == 1)
    }
}

/// Closure check: X applied to homogeneous basis tuples lands in the
/// component of the degree product. Exhaustive by multilinearity.
pub fn verify_grading(g: &Grading) -> Result<GradingReport, GradingError> {
    let (_, pinv) = g.basis_matrices()?;
    let n = g.dim();
    let r = g.map.arity;
    let mut violations = Vec::new();
    let mut checked = 0usize;
    for idx in multi_indices(n, r) {
        let vs: Vec<Vector> = idx.iter().map(|&i| g.basis[i].0.clone()).collect();
        let val = g.map.eval(&vs);
        checked += 1;
        if vec_is_zero(&val) {
            continue;
        }
        let target = g
            .group
            .product(&idx.iter().map(|&i| g.basis[i].1.clone()).collect::<Vec<_>>());
        let coords = pinv.mul_vec(&val);
        for (k, c) in coords.iter().enumerate() {
            if !c.is_zero() && g.basis[k].1 != target {
                violations.push(format!(
                    "tuple {idx:?}: output hits degree {} instead of {}",
                    g.basis[k].1, target
                ));
                break;
            }
        }
    }
    Ok(GradingReport {
        ok: violations.is_empty(),
        checked,
        violations,
    })
}

/// The distinguished element h = product of all basis degrees, together with
/// the orthogonality verdict: b(V_g1, V_g2) = 0 unless g1 g2 = h, and the
/// grading is compatible with b exactly when h = e.
pub fn form_compatibility(
    g: &Grading,
    space: &QuadSpace,
) -> Result<(bool, GroupElem), GradingError> {
    let degrees: Vec<GroupElem> = g.basis.iter().map(|(_, d)| d.clone()).collect();
    let h = g.group.product(&degrees);
    for i in 0..g.basis.len() {
        for j in 0..g.basis.len() {
            let pairing = space.bform(&g.basis[i].0, &g.basis[j].0);
            if !pairing.is_zero() {
                let prod = g.group.op(&g.basis[i].1, &g.basis[j].1);
                if prod != h {
                    return Err(GradingError::PairingViolated(format!(
                        "b(w_{i}, w_{j}) = {pairing} but degrees multiply to {prod}, not {h}"
                    )));
                }
            }
        }
    }
    Ok((h == g.group.identity(), h))
}

/// The dimension map of a grading: degree -> component dimension.
#[derive(Debug, Clone)]
pub struct DeltaMap {
    pub group: AbGroup,
    pub counts: BTreeMap<GroupElem, usize>,
}

impl DeltaMap {
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    /// h = product over the support of g^delta(g).
    pub fn distinguished(&self) -> GroupElem {
        let mut h = self.group.identity();
        for (g, &d) in &self.counts {
            h = self.group.op(&h, &self.group.pow(g, d as i64));
        }
        h
    }

    /// The two defining restrictions: total dimension n and the symmetry
    /// delta(g) = delta(g^-1 h).
    pub fn validate(&self, n: usize) -> Result<GroupElem, GradingError> {
        if self.total() != n {
            return Err(GradingError::DeltaInvalid(format!(
                "total dimension {} != {n}",
                self.total()
            )));
        }
        let h = self.distinguished();
        for (g, &d) in &self.counts {
            let partner = self.group.op(&self.group.inv(g), &h);
            let dp = self.counts.get(&partner).copied().unwrap_or(0);
            if dp != d {
                return Err(GradingError::DeltaInvalid(format!(
                    "delta({g}) = {d} but delta({partner}) = {dp}"
                )));
            }
        }
        Ok(h)
    }
}

pub fn delta_of(g: &Grading) -> DeltaMap {
    let mut counts = BTreeMap::new();
    for (_, d) in &g.basis {
        *counts.entry(d.clone()).or_insert(0) += 1;
    }
    DeltaMap {
        group: g.group.clone(),
        counts,
    }
}

/// Uniqueness of the dimension map makes equality the isomorphism test for
/// gradings of the (n-1)-fold product over a fixed group.
pub fn n1_isomorphic(a: &DeltaMap, b: &DeltaMap) -> bool {
    let na: BTreeMap<_, _> = a.counts.iter().filter(|(_, &d)| d > 0).collect();
    let nb: BTreeMap<_, _> = b.counts.iter().filter(|(_, &d)| d > 0).collect();
    na == nb
}

/// Realize a valid dimension map as a grading of the (n-1)-fold star
/// product: components with g^2 = h get orthonormal vectors, the remaining
/// support splits into hyperbolically paired component pairs.
pub fn build_gamma_delta(
    group: &AbGroup,
    delta: &DeltaMap,
    field: &Field,
) -> Result<Grading, GradingError> {
    let n = delta.total();
    let h = delta.validate(n)?;
    let mut assignments: Vec<GroupElem> = Vec::new();
    let mut fixed: Vec<GroupElem> = Vec::new();
    let mut paired: Vec<(GroupElem, GroupElem)> = Vec::new();
    for (g, &d) in &delta.counts {
        if d == 0 {
            continue;
        }
        let partner = group.op(&group.inv(g), &h);
        if partner == *g {
            fixed.push(g.clone());
        } else if *g < partner {
            paired.push((g.clone(), partner));
        }
    }
    let mut gram = Matrix::zero(field, n, n);
    let mut pos = 0usize;
    for g in fixed {
        for _ in 0..delta.counts[&g] {
            gram.set(pos, pos, field.one());
            assignments.push(g.clone());
            pos += 1;
        }
    }
    for (g, partner) in paired {
        for _ in 0..delta.counts[&g] {
            gram.set(pos, pos + 1, field.one());
            gram.set(pos + 1, pos, field.one());
            assignments.push(g.clone());
            assignments.push(partner.clone());
            pos += 2;
        }
    }
    debug_assert_eq!(pos, n);
    let space = QuadSpace::new(gram).map_err(|e| GradingError::Discriminant(e.to_string()))?;
    let map = build_star(space).map_err(|e| GradingError::Discriminant(e.to_string()))?;
    let basis = assignments
        .into_iter()
        .enumerate()
        .map(|(i, d)| (basis_vec(field, n, i), d))
        .collect();
    Ok(Grading {
        tag: StructureTag::Star,
        map,
        group: group.clone(),
        basis,
    })
}

/// The fine grading of the (n-1)-fold product for the pattern p + 2q = n:
/// universal group from the defining presentation, all components
/// one-dimensional.
pub fn fine_n1(
    p: usize,
    q: usize,
    n: usize,
    field: &Field,
) -> Result<(Grading, AbGroup), GradingError> {
    if p + 2 * q != n || n < 3 {
        return Err(GradingError::DeltaInvalid(format!(
            "need p + 2q = n >= 3, got p = {p}, q = {q}, n = {n}"
        )));
    }
    let (m, rels) = fine_n1_presentation(p, q);
    let group = AbGroup::from_presentation(m, &rels);
    let mut counts = BTreeMap::new();
    for i in 0..m {
        *counts.entry(group.generator(i)).or_insert(0usize) += 1;
    }
    let delta = DeltaMap {
        group: group.clone(),
        counts,
    };
    let grading = build_gamma_delta(&group, &delta, field)?;
    Ok((grading, group))
}

/// Coarsen a grading along a group homomorphism: degrees map, components
/// merge.
pub fn coarsen(g: &Grading, hom: &Hom) -> Grading {
    Grading {
        tag: g.tag,
        map: g.map.clone(),
        group: hom.dst.clone(),
        basis: g
            .basis
            .iter()
            .map(|(v, d)| (v.clone(), hom.apply(d)))
            .collect(),
    }
}

/// The shift of a grading by an element with h^(r-1) = e: every degree is
/// multiplied by h.
pub fn shift(g: &Grading, h: &GroupElem) -> Result<Grading, GradingError> {
    let r = g.map.arity as i64;
    if g.group.pow(h, r - 1) != g.group.identity() {
        return Err(GradingError::ShiftOrder);
    }
    Ok(Grading {
        tag: g.tag,
        map: g.map.clone(),
        group: g.group.clone(),
        basis: g
            .basis
            .iter()
            .map(|(v, d)| (v.clone(), g.group.op(h, d)))
            .collect(),
    })
}

/// The Cartan grading of the 3C triple system on the standard basis, with
/// degrees in Z^3.
pub fn cartan_grading(field: &Field) -> Grading {
    let group = AbGroup::free(3);
    let map = build_triple_3c(field, Basis::Std);
    let e = |a: i64, b: i64, c: i64| group.element_from_exponents(&[a, b, c]);
    let degrees = vec![
        e(-1, -1, -1), // e1
        e(1, 1, 1),    // e2
        e(1, 0, 0),    // u1
        e(0, 1, 0),    // u2
        e(0, 0, 1),    // u3
        e(-1, 0, 0),   // v1
        e(0, -1, 0),   // v2
        e(0, 0, -1),   // v3
    ];
    let basis = degrees
        .into_iter()
        .enumerate()
        .map(|(i, d)| (basis_vec(field, 8, i), d))
        .collect();
    Grading {
        tag: StructureTag::Triple3C,
        map,
        group,
        basis,
    }
}

/// The Cayley-Dickson grading of the 3C triple system over (Z/2)^4: the
/// components are the spans of the CD basis, with the unit in a degree
/// outside the subgroup generated by the algebra grading.
pub fn cd_grading(field: &Field) -> Grading {
    let group = AbGroup::elementary_2(4);
    let map = build_triple_3c(field, Basis::Cd);
    let e = |a: i64, b: i64, c: i64, d: i64| group.element_from_exponents(&[a, b, c, d]);
    let degrees = vec![
        e(1, 0, 0, 0), // 1
        e(1, 1, 0, 0), // w1
        e(1, 0, 1, 0), // w2
        e(1, 0, 0, 1), // w3
        e(1, 1, 1, 0), // w4 = w1 w2
        e(1, 0, 1, 1), // w5 = w2 w3
        e(1, 1, 1, 1), // w6 = w3 w4
        e(1, 1, 0, 1), // w7 = w1 w3
    ];
    let basis = degrees
        .into_iter()
        .enumerate()
        .map(|(i, d)| (basis_vec(field, 8, i), d))
        .collect();
    Grading {
        tag: StructureTag::Triple3C,
        map,
        group,
        basis,
    }
}

fn elementary_rank(group: &AbGroup, gens: &[GroupElem], rank: usize) -> Result<Vec<GroupElem>, GradingError> {
    for g in gens {
        if group.op(g, g) != group.identity() {
            return Err(GradingError::BadSubgroup(format!(
                "generator {g} does not have order dividing 2"
            )));
        }
    }
    let span = group
        .span(gens, 1 << (rank + 2))
        .ok_or_else(|| GradingError::BadSubgroup("subgroup too large".into()))?;
    if span.len() != 1 << rank {
        return Err(GradingError::BadSubgroup(format!(
            "generators span a subgroup of order {}, expected {}",
            span.len(),
            1 << rank
        )));
    }
    Ok(span)
}

/// The grading of the 3C triple system induced by an algebra grading over an
/// elementary 2-subgroup of rank 3: the CD basis vectors w1, w2, w3 get the
/// three generators.
pub fn gamma_gh(
    field: &Field,
    group: &AbGroup,
    gens: &[GroupElem; 3],
) -> Result<Grading, GradingError> {
    elementary_rank(group, gens, 3)?;
    let map = build_triple_3c(field, Basis::Cd);
    let [h1, h2, h3] = gens.clone();
    let degrees = vec![
        group.identity(),
        h1.clone(),
        h2.clone(),
        h3.clone(),
        group.op(&h1, &h2),
        group.op(&h2, &h3),
        group.product(&[h1.clone(), h2.clone(), h3.clone()]),
        group.op(&h1, &h3),
    ];
    let basis = degrees
        .into_iter()
        .enumerate()
        .map(|(i, d)| (basis_vec(field, 8, i), d))
        .collect();
    Ok(Grading {
        tag: StructureTag::Triple3C,
        map,
        group: group.clone(),
        basis,
    })
}

/// The shifted family: the rank-3 grading for K, shifted by an order-two
/// element outside K. Its support is the nontrivial coset of K inside
/// H = <K, h>.
pub fn gamma_ghk(
    field: &Field,
    group: &AbGroup,
    k_gens: &[GroupElem; 3],
    h: &GroupElem,
) -> Result<Grading, GradingError> {
    let k_set = elementary_rank(group, k_gens, 3)?;
    if group.op(h, h) != group.identity() || *h == group.identity() {
        return Err(GradingError::BadSubgroup(
            "shift element must have order two".into(),
        ));
    }
    if k_set.binary_search(h).is_ok() {
        return Err(GradingError::BadSubgroup(
            "shift element must lie outside K".into(),
        ));
    }
    let base = gamma_gh(field, group, k_gens)?;
    shift(&base, h)
}

/// Classification result for gradings of the 8-dimensional triple system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification83 {
    /// Coarsening of the Cartan grading along alpha: Z^3 -> G, recorded by
    /// the images of the three generators (canonicalized under the Weyl
    /// group action).
    CartanCoarsening { alpha: Vec<GroupElem> },
    /// Algebra-type grading with support an elementary rank-3 subgroup H.
    GammaGH { h_set: Vec<GroupElem> },
    /// Shifted grading with support H minus K.
    GammaGHK {
        h_set: Vec<GroupElem>,
        k_set: Vec<GroupElem>,
    },
}

/// The Weyl group of the Cartan grading as 48 integer matrices acting on the
/// degree lattice Z^3: the signed permutations conjugated into the
/// coordinates where the support is {+-eps_i, +-(1,1,1)}.
pub fn weyl_cartan_matrices() -> Vec<[[i64; 3]; 3]> {
    let f = Field::rationals();
    let half = f.from_ratio(1, 2);
    let mhalf = f.from_ratio(-1, 2);
    // columns are the images of the lattice generators
    let t = Matrix::from_cols(
        &f,
        vec![
            vec![half.clone(), mhalf.clone(), mhalf.clone()],
            vec![mhalf.clone(), half.clone(), mhalf.clone()],
            vec![mhalf.clone(), mhalf.clone(), half.clone()],
        ],
    );
    let tinv = t.inverse().unwrap();
    let mut out = Vec::with_capacity(48);
    for p in crate::perm::permutations(3) {
        for signs in 0..8u32 {
            let m = Matrix::from_fn(&f, 3, 3, |i, j| {
                if p[j] == i {
                    if signs >> j & 1 == 1 {
                        f.from_i64(-1)
                    } else {
                        f.one()
                    }
                } else {
                    f.zero()
                }
            });
            let w = tinv.mul(&m).mul(&t);
            let mut ints = [[0i64; 3]; 3];
            for (i, row) in ints.iter_mut().enumerate() {
                for (j, cell) in row.iter_mut().enumerate() {
                    let s = w.get(i, j);
                    let text = s.to_string();
                    *cell = text
                        .parse()
                        .expect("conjugated signed permutation must be integral");
                }
            }
            out.push(ints);
        }
    }
    out.sort_unstable();
    out.dedup();
    assert_eq!(out.len(), 48);
    out
}

/// alpha composed with a lattice automorphism given by an integer matrix:
/// the new image of generator j is prod_i alpha_i^(w[i][j]).
fn compose_alpha(group: &AbGroup, alpha: &[GroupElem], w: &[[i64; 3]; 3]) -> Vec<GroupElem> {
    (0..3)
        .map(|j| {
            let mut acc = group.identity();
            for (i, a) in alpha.iter().enumerate() {
                acc = group.op(&acc, &group.pow(a, w[i][j]));
            }
            acc
        })
        .collect()
}

fn canonical_alpha(group: &AbGroup, alpha: &[GroupElem]) -> Vec<GroupElem> {
    let gens3: Option<Vec<GroupElem>> = if group.generators() == 3 {
        Some((0..3).map(|i| group.generator(i)).collect())
    } else {
        None
    };
    let mut best: Option<Vec<GroupElem>> = None;
    for w in weyl_cartan_matrices() {
        let cand = compose_alpha(group, alpha, &w);
        if let Some(g3) = &gens3 {
            if &cand == g3 {
                return cand;
            }
        }
        if best.as_ref().is_none_or(|b| cand < *b) {
            best = Some(cand);
        }
    }
    best.unwrap()
}

/// A nonzero isotropic vector inside the span of the given basis vectors,
/// when one can be found with the field's square roots.
fn isotropic_in_component(
    space: &QuadSpace,
    vecs: &[Vector],
    field: &Field,
) -> Result<Option<Vector>, GradingError> {
    for v in vecs {
        if space.bform(v, v).is_zero() {
            return Ok(Some(v.clone()));
        }
    }
    if vecs.len() < 2 {
        return Ok(None);
    }
    // solve on pairs: n(a + t b) = n(a) + t polar(a, b) + t^2 n(b)
    let two = field.from_i64(2);
    let four = field.from_i64(4);
    for i in 0..vecs.len() {
        for j in 0..vecs.len() {
            if i == j {
                continue;
            }
            let qa = space.bform(&vecs[i], &vecs[i]);
            let qb = space.bform(&vecs[j], &vecs[j]);
            let pol = space.bform(&vecs[i], &vecs[j]).mul(&two);
            let disc = pol.mul(&pol).sub(&four.mul(&qa).mul(&qb));
            if let Some(s) = disc.sqrt_opt() {
                let t = s.sub(&pol).div(&two.mul(&qb));
                let cand = crate::linalg::vec_add(&vecs[i], &crate::linalg::vec_scale(&t, &vecs[j]));
                if !vec_is_zero(&cand) && space.bform(&cand, &cand).is_zero() {
                    return Ok(Some(cand));
                }
            }
        }
    }
    // anisotropic plane over a non-closed field: the classification
    // hypothesis fails
    Err(GradingError::RequiresClosedField)
}

/// Classify a grading of the 8-dimensional 3C triple system into one of the
/// three families, following the constructive normalization: an isotropic
/// homogeneous vector pins the grading to a coarsening of the Cartan
/// grading; otherwise the support is a coset of an elementary 2-subgroup.
pub fn classify_83(g: &Grading) -> Result<Classification83, GradingError> {
    if g.dim() != 8 || g.map.arity != 3 {
        return Err(GradingError::Classify(
            "classification applies to the 8-dimensional triple system".into(),
        ));
    }
    let report = verify_grading(g)?;
    if !report.ok {
        return Err(GradingError::ClosureViolated(report.violations.join("; ")));
    }
    let space = g
        .map
        .gram
        .clone()
        .ok_or_else(|| GradingError::Classify("structure carries no bilinear form".into()))?;
    let field = g.field();
    let (_, pinv) = g.basis_matrices()?;
    let components = g.components();

    // hunt for a nonzero isotropic homogeneous vector
    let mut found: Option<(Vector, GroupElem)> = None;
    for (deg, idxs) in &components {
        let vecs: Vec<Vector> = idxs.iter().map(|&i| g.basis[i].0.clone()).collect();
        if let Some(x) = isotropic_in_component(&space, &vecs, &field)? {
            found = Some((x, deg.clone()));
            break;
        }
    }

    if let Some((x, gdeg)) = found {
        // pair x with an isotropic y of inverse degree and polar value one
        let ginv = g.group.inv(&gdeg);
        let partner = components
            .iter()
            .find(|(d, _)| *d == ginv)
            .ok_or_else(|| {
                GradingError::Classify(format!("no component of inverse degree {ginv}"))
            })?;
        let two = field.from_i64(2);
        let mut y: Option<Vector> = None;
        for &i in &partner.1 {
            let w = &g.basis[i].0;
            let pol = space.bform(&x, w).mul(&two);
            if pol.is_zero() {
                continue;
            }
            let wn = crate::linalg::vec_scale(&pol.inv(), w);
            let nw = space.bform(&wn, &wn);
            let cand = crate::linalg::vec_sub(&wn, &crate::linalg::vec_scale(&nw, &x));
            debug_assert!(space.bform(&cand, &cand).is_zero());
            debug_assert!(space.bform(&x, &cand).mul(&two).is_one());
            y = Some(cand);
            break;
        }
        let y = y.ok_or_else(|| {
            GradingError::Classify("isotropic vector pairs with nothing".into())
        })?;

        // the graded 3-space {x C y}
        let spanning: Vec<Vector> = (0..8)
            .map(|k| g.map.eval(&[x.clone(), basis_vec(&field, 8, k), y.clone()]))
            .collect();
        let u_basis = crate::linalg::independent_subset(&field, spanning.clone());
        if u_basis.len() != 3 {
            return Err(GradingError::Classify(format!(
                "triple span has dimension {}, expected 3",
                u_basis.len()
            )));
        }
        // graded pieces: project the spanning set into each component
        let mut alpha: Vec<GroupElem> = Vec::new();
        let mut graded_basis: Vec<Vector> = Vec::new();
        for (deg, idxs) in &components {
            let mut projections: Vec<Vector> = Vec::new();
            for v in &spanning {
                let coords = pinv.mul_vec(v);
                let mut kept = crate::linalg::zero_vec(&field, 8);
                for &i in idxs {
                    kept[i] = coords[i].clone();
                }
                if vec_is_zero(&kept) {
                    continue;
                }
                let mut back = crate::linalg::zero_vec(&field, 8);
                for &i in idxs {
                    if !kept[i].is_zero() {
                        back =
                            crate::linalg::vec_add(&back, &crate::linalg::vec_scale(&kept[i], &g.basis[i].0));
                    }
                }
                projections.push(back);
            }
            for v in crate::linalg::independent_subset(&field, projections) {
                graded_basis.push(v);
                alpha.push(deg.clone());
            }
        }
        if graded_basis.len() != 3 {
            return Err(GradingError::Classify(format!(
                "graded pieces of the triple span total {}, expected 3",
                graded_basis.len()
            )));
        }
        // sanity: the determinant-type normalization constant is nonzero
        let mid = g.map.eval(&[graded_basis[1].clone(), x.clone(), graded_basis[2].clone()]);
        let c = space.bform(&graded_basis[0], &mid).mul(&two);
        if c.is_zero() {
            return Err(GradingError::Classify(
                "degenerate basis of the triple span".into(),
            ));
        }
        return Ok(Classification83::CartanCoarsening {
            alpha: canonical_alpha(&g.group, &alpha),
        });
    }

    // no isotropic homogeneous vectors: all components are one-dimensional
    // and the support lies in the 2-torsion
    if components.len() != 8 {
        return Err(GradingError::Classify(format!(
            "anisotropic grading with {} components",
            components.len()
        )));
    }
    let supp = g.support();
    for d in &supp {
        if g.group.op(d, d) != g.group.identity() {
            return Err(GradingError::Classify(format!(
                "support element {d} does not square to the identity"
            )));
        }
    }
    let e = g.group.identity();
    if supp.binary_search(&e).is_ok() {
        let h_set = g
            .group
            .span(&supp, 64)
            .ok_or_else(|| GradingError::BadSubgroup("support spans too much".into()))?;
        if h_set.len() != 8 || h_set != supp {
            return Err(GradingError::Classify(
                "support with identity must be a rank-3 subgroup".into(),
            ));
        }
        Ok(Classification83::GammaGH { h_set })
    } else {
        let h_set = g
            .group
            .span(&supp, 64)
            .ok_or_else(|| GradingError::BadSubgroup("support spans too much".into()))?;
        if h_set.len() != 16 {
            return Err(GradingError::Classify(format!(
                "support generates a subgroup of order {}, expected 16",
                h_set.len()
            )));
        }
        let k_set: Vec<GroupElem> = h_set
            .iter()
            .filter(|x| supp.binary_search(x).is_err())
            .cloned()
            .collect();
        // the complement of the support must be the index-two subgroup
        let k_span = g
            .group
            .span(&k_set, 64)
            .ok_or_else(|| GradingError::BadSubgroup("complement spans too much".into()))?;
        if k_span != k_set {
            return Err(GradingError::Classify(
                "support is not a coset of an index-two subgroup".into(),
            ));
        }
        Ok(Classification83::GammaGHK { h_set, k_set })
    }
}

/// Isomorphism of classified gradings over a common group: Weyl-orbit
/// equality of the Cartan coarsening maps, equality of H, equality of
/// (H, K).
pub fn iso_83(a: &Classification83, b: &Classification83, group: &AbGroup) -> bool {
    match (a, b) {
        (
            Classification83::CartanCoarsening { alpha: a1 },
            Classification83::CartanCoarsening { alpha: a2 },
        ) => weyl_cartan_matrices()
            .iter()
            .any(|w| &compose_alpha(group, a1, w) == a2),
        (Classification83::GammaGH { h_set: h1 }, Classification83::GammaGH { h_set: h2 }) => {
            h1 == h2
        }
        (
            Classification83::GammaGHK {
                h_set: h1,
                k_set: k1,
            },
            Classification83::GammaGHK {
                h_set: h2,
                k_set: k2,
            },
        ) => h1 == h2 && k1 == k2,
        _ => false,
    }
}

/// Identifiers for the Weyl groups delivered by formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeylId {
    /// Fine grading of the (n-1)-fold product with pattern (p, q).
    FineN1 { p: usize, q: usize },
    /// Cartan grading of the triple system: the B3 Weyl group.
    CartanB3,
    /// CD grading of the triple system: the affine group of F_2^3.
    Cd,
    /// Cartan grading of the Cayley algebra: dihedral of order 12.
    G2Cartan,
    /// (Z/2)^3 grading of the Cayley algebra: GL_3(F_2).
    G2Elem2,
    /// Fine grading of a 1-fold product on dimension 2s.
    OneFold { s: usize },
}

fn factorial(k: usize) -> u64 {
    (1..=k as u64).product::<u64>().max(1)
}

pub fn weyl_order(id: WeylId) -> u64 {
    match id {
        WeylId::FineN1 { p, q } => factorial(p) * (1u64 << q) * factorial(q),
        WeylId::CartanB3 => 48,
        WeylId::Cd => 1344,
        WeylId::G2Cartan => 12,
        WeylId::G2Elem2 => 168,
        WeylId::OneFold { s } => factorial(s) * factorial(s),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeylSearchCd {
    /// Signed permutations of the CD basis preserving the triple product.
    pub raw: u64,
    /// Those acting trivially on every component (diagonal sign characters).
    pub stabilizer: u64,
    /// Weyl group order: raw / stabilizer.
    pub order: u64,
}

/// Exhaustive search for the Weyl group of the CD grading: candidates are
/// signed permutations of the CD basis (scalars on one-dimensional
/// nonisotropic components must be +-1 for an isometry), filtered by
/// preservation of the triple product with first-failure pruning.
pub fn weyl_search_cd(threads: usize) -> WeylSearchCd {
    // integer triple-product table: {b_i b_j b_k} = sign * b_idx
    let f = Field::rationals();
    let mut table = [[[(1i8, 0u8); 8]; 8]; 8];
    for i in 0..8 {
        for j in 0..8 {
            for k in 0..8 {
                let x = crate::cayley::CayleyElement::basis_elem(&f, Basis::Cd, i);
                let y = crate::cayley::CayleyElement::basis_elem(&f, Basis::Cd, j);
                let z = crate::cayley::CayleyElement::basis_elem(&f, Basis::Cd, k);
                let t = x.triple_3c(&y, &z);
                let mut entry = None;
                for (idx, c) in t.coords.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    assert!(entry.is_none(), "triple of basis vectors must be a monomial");
                    let sign = if c.is_one() { 1i8 } else { -1i8 };
                    entry = Some((sign, idx as u8));
                }
                table[i][j][k] = entry.expect("triple of basis vectors is nonzero");
            }
        }
    }

    let total_perms = 40320usize; // 8!
    let workers = threads.max(1).min(total_perms);
    let chunk = total_perms.div_ceil(workers);
    let table_ref = &table;
    let mut raw = 0u64;
    let mut stab = 0u64;
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for wk in 0..workers {
            let lo = wk * chunk;
            let hi = ((wk + 1) * chunk).min(total_perms);
            handles.push(scope.spawn(move || {
                let mut raw = 0u64;
                let mut stab = 0u64;
                for rank in lo..hi {
                    let sigma_v = crate::perm::unrank(8, rank);
                    let mut sigma = [0u8; 8];
                    for (i, &s) in sigma_v.iter().enumerate() {
                        sigma[i] = s as u8;
                    }
                    // sign-free precheck: indices must match on every triple
                    let mut index_ok = true;
                    'pre: for i in 0..8 {
                        for j in 0..8 {
                            for k in 0..8 {
                                let t = table_ref[i][j][k];
                                let t2 = table_ref[sigma[i] as usize][sigma[j] as usize]
                                    [sigma[k] as usize];
                                if sigma[t.1 as usize] != t2.1 {
                                    index_ok = false;
                                    break 'pre;
                                }
                            }
                        }
                    }
                    if !index_ok {
                        continue;
                    }
                    for signs in 0..256u32 {
                        let s = |i: usize| -> i8 {
                            if signs >> i & 1 == 1 {
                                -1
                            } else {
                                1
                            }
                        };
                        let mut ok = true;
                        'chk: for i in 0..8 {
                            for j in 0..8 {
                                for k in 0..8 {
                                    let t = table_ref[i][j][k];
                                    let t2 = table_ref[sigma[i] as usize][sigma[j] as usize]
                                        [sigma[k] as usize];
                                    let lhs = t.0 * s(t.1 as usize);
                                    let rhs = s(i) * s(j) * s(k) * t2.0;
                                    if lhs != rhs {
                                        ok = false;
                                        break 'chk;
                                    }
                                }
                            }
                        }
                        if ok {
                            raw += 1;
                            if rank == 0 {
                                // identity permutation: a diagonal stabilizer element
                                stab += 1;
                            }
                        }
                    }
                }
                (raw, stab)
            }));
        }
        for h in handles {
            let (r, s) = h.join().expect("search worker panicked");
            raw += r;
            stab += s;
        }
    });
    assert!(stab > 0 && raw % stab == 0, "stabilizer must divide the match count");
    WeylSearchCd {
        raw,
        stabilizer: stab,
        order: raw / stab,
    }
}

/// Direct search oracle for the Weyl group of the fine (n-1)-fold grading in
/// the smallest mixed pattern (p, q) = (1, 1), n = 3: candidate support
/// permutations realized by monomial twisted isometries.
pub fn weyl_search_n1_11(field: &Field) -> Result<usize, GradingError> {
    let (grading, _group) = fine_n1(1, 1, 3, field)?;
    let f = grading.field();
    // basis order: fixed vector, then the hyperbolic pair
    let mut count = 0usize;
    for swap_pair in [false, true] {
        let mut realized = false;
        'attempt: for lam0 in [1i64, -1] {
            for lam1 in [1i64, -1] {
                for lam2 in [1i64, -1] {
                    let cols: Vec<Vector> = if swap_pair {
                        vec![
                            crate::linalg::vec_scale(&f.from_i64(lam0), &grading.basis[0].0),
                            crate::linalg::vec_scale(&f.from_i64(lam1), &grading.basis[2].0),
                            crate::linalg::vec_scale(&f.from_i64(lam2), &grading.basis[1].0),
                        ]
                    } else {
                        vec![
                            crate::linalg::vec_scale(&f.from_i64(lam0), &grading.basis[0].0),
                            crate::linalg::vec_scale(&f.from_i64(lam1), &grading.basis[1].0),
                            crate::linalg::vec_scale(&f.from_i64(lam2), &grading.basis[2].0),
                        ]
                    };
                    let phi = Matrix::from_cols(&f, cols);
                    if crate::autgrp::is_automorphism(&phi, &grading.map) {
                        realized = true;
                        break 'attempt;
                    }
                }
            }
        }
        if realized {
            count += 1;
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigInt;

    fn q() -> Field {
        Field::rationals()
    }

    fn f5() -> Field {
        Field::prime(5).unwrap()
    }

    #[test]
    fn cartan_grading_verifies() {
        let g = cartan_grading(&q());
        let rep = verify_grading(&g).unwrap();
        assert!(rep.ok, "{:?}", rep.violations);
        assert!(g.is_fine());
        // deg(e2) = (1,1,1)
        assert_eq!(g.basis[1].1, g.group.element_from_exponents(&[1, 1, 1]));
        // compatible with b_n: h = e
        let space = g.map.gram.clone().unwrap();
        let (compat, h) = form_compatibility(&g, &space).unwrap();
        assert!(compat);
        assert_eq!(h, g.group.identity());
    }

    #[test]
    fn cd_grading_verifies() {
        let g = cd_grading(&q());
        let rep = verify_grading(&g).unwrap();
        assert!(rep.ok, "{:?}", rep.violations);
        assert!(g.is_fine());
        let space = g.map.gram.clone().unwrap();
        let (compat, h) = form_compatibility(&g, &space).unwrap();
        // every degree is an involution and pairs with itself: h = e
        assert!(compat);
        assert_eq!(h, g.group.identity());
    }

    #[test]
    fn broken_cartan_fails_with_witness() {
        let mut g = cartan_grading(&q());
        g.basis[2].1 = g.group.identity(); // reassign deg(u1)
        let rep = verify_grading(&g).unwrap();
        assert!(!rep.ok);
        assert!(!rep.violations.is_empty());
    }

    #[test]
    fn delta_round_trip_on_paper_example() {
        // n = 5: h of order 3, g1 = h^2 (so g1^2 = h and the degree product
        // is h), delta(g2) = delta(g2^-1 h) = 2, inside G = Z/3 x Z/4
        let group = AbGroup::from_presentation(2, &[vec![3, 0], vec![0, 4]]);
        let h = group.element_from_exponents(&[1, 0]);
        let g1 = group.element_from_exponents(&[2, 0]);
        let g2 = group.element_from_exponents(&[0, 1]);
        assert_eq!(group.op(&g1, &g1), h);
        assert_ne!(group.op(&g2, &g2), h);
        let g2p = group.op(&group.inv(&g2), &h);
        let mut counts = BTreeMap::new();
        counts.insert(g1.clone(), 1usize);
        counts.insert(g2.clone(), 2usize);
        counts.insert(g2p.clone(), 2usize);
        let delta = DeltaMap {
            group: group.clone(),
            counts,
        };
        assert_eq!(delta.validate(5).unwrap(), h);
        let grading = build_gamma_delta(&group, &delta, &f5()).unwrap();
        let rep = verify_grading(&grading).unwrap();
        assert!(rep.ok, "{:?}", rep.violations);
        let space = grading.map.gram.clone().unwrap();
        let (compat, h2) = form_compatibility(&grading, &space).unwrap();
        assert!(!compat);
        assert_eq!(h2, h);
        assert!(n1_isomorphic(&delta_of(&grading), &delta));
        // components: V_g nondegenerate iff g^2 = h, totally isotropic else
        for (deg, idxs) in grading.components() {
            let vecs: Vec<Vector> = idxs.iter().map(|&i| grading.basis[i].0.clone()).collect();
            let sub = Matrix::from_fn(&grading.field(), vecs.len(), vecs.len(), |a, b| {
                space.bform(&vecs[a], &vecs[b])
            });
            if grading.group.op(&deg, &deg) == h {
                assert!(!sub.det().is_zero());
            } else {
                assert!(sub.det().is_zero());
            }
        }
    }

    #[test]
    fn trivial_and_hyperbolic_delta() {
        // delta concentrated at e: the trivial grading
        let group = AbGroup::free(1);
        let mut counts = BTreeMap::new();
        counts.insert(group.identity(), 4usize);
        let delta = DeltaMap {
            group: group.clone(),
            counts,
        };
        let g = build_gamma_delta(&group, &delta, &q()).unwrap();
        assert!(verify_grading(&g).unwrap().ok);
        assert!(!g.is_fine());
        // paired delta, n = 2, over F5 (disc -1 is a square there)
        let mut counts = BTreeMap::new();
        counts.insert(group.generator(0), 1usize);
        counts.insert(group.inv(&group.generator(0)), 1usize);
        let delta = DeltaMap {
            group: group.clone(),
            counts,
        };
        let g = build_gamma_delta(&group, &delta, &f5()).unwrap();
        assert!(verify_grading(&g).unwrap().ok);
        // and over Q it fails on the discriminant
        assert!(matches!(
            build_gamma_delta(&group, &delta, &q()),
            Err(GradingError::Discriminant(_))
        ));
    }

    #[test]
    fn fine_n1_families() {
        for (p, kq, want) in [(0usize, 2usize, "Z^2"), (2, 1, "Z x Z/4"), (4, 0, "Z/4 x Z/2 x Z/2")]
        {
            let (grading, group) = fine_n1(p, kq, 4, &f5()).unwrap();
            assert!(verify_grading(&grading).unwrap().ok, "(p,q) = ({p},{kq})");
            assert!(grading.is_fine());
            let (rank, tors) = group.isomorphism_type();
            let mut parts = Vec::new();
            if rank == 1 {
                parts.push("Z".to_string());
            } else if rank > 1 {
                parts.push(format!("Z^{rank}"));
            }
            let mut sorted = tors.clone();
            sorted.sort_by(|a: &BigInt, b: &BigInt| b.cmp(a));
            for d in sorted {
                parts.push(format!("Z/{d}"));
            }
            assert_eq!(parts.join(" x "), want);
        }
        let (_, u) = fine_n1(1, 1, 3, &f5()).unwrap();
        assert_eq!(u.type_string(), "Z");
        let (_, u) = fine_n1(3, 0, 3, &f5()).unwrap();
        assert_eq!(u.type_string(), "Z/2 x Z/2");
    }

    #[test]
    fn shift_is_involutive() {
        let g = cd_grading(&q());
        let h = g.group.element_from_exponents(&[0, 1, 1, 0]);
        let shifted = shift(&g, &h).unwrap();
        assert!(verify_grading(&shifted).unwrap().ok);
        let back = shift(&shifted, &h).unwrap();
        for (a, b) in g.basis.iter().zip(&back.basis) {
            assert_eq!(a.1, b.1);
        }
    }

    #[test]
    fn classify_cartan_is_identity() {
        let g = cartan_grading(&q());
        match classify_83(&g).unwrap() {
            Classification83::CartanCoarsening { alpha } => {
                let want: Vec<GroupElem> = (0..3).map(|i| g.group.generator(i)).collect();
                assert_eq!(alpha, want);
            }
            other => panic!("expected Cartan family, got {other:?}"),
        }
    }

    #[test]
    fn classify_cd_is_ghk() {
        let g = cd_grading(&q());
        match classify_83(&g).unwrap() {
            Classification83::GammaGHK { h_set, k_set } => {
                assert_eq!(h_set.len(), 16);
                assert_eq!(k_set.len(), 8);
                // K = 0 x (Z/2)^3
                let want_k = g
                    .group
                    .span(
                        &[
                            g.group.generator(1),
                            g.group.generator(2),
                            g.group.generator(3),
                        ],
                        64,
                    )
                    .unwrap();
                assert_eq!(k_set, want_k);
            }
            other => panic!("expected shifted family, got {other:?}"),
        }
    }

    #[test]
    fn classify_trivial_is_cartan_coarsening() {
        let field = q();
        let group = AbGroup::free(1);
        let map = build_triple_3c(&field, Basis::Std);
        let basis = (0..8)
            .map(|i| (basis_vec(&field, 8, i), group.identity()))
            .collect();
        let g = Grading {
            tag: StructureTag::Triple3C,
            map,
            group,
            basis,
        };
        match classify_83(&g).unwrap() {
            Classification83::CartanCoarsening { alpha } => {
                assert!(alpha.iter().all(|a| *a == g.group.identity()));
            }
            other => panic!("expected Cartan family, got {other:?}"),
        }
    }

    #[test]
    fn gamma_gh_round_trip() {
        let field = q();
        let group = AbGroup::elementary_2(5);
        let gens = [group.generator(0), group.generator(2), group.generator(4)];
        let g = gamma_gh(&field, &group, &gens).unwrap();
        assert!(verify_grading(&g).unwrap().ok);
        // support is exactly the subgroup
        let span = group.span(&gens, 64).unwrap();
        assert_eq!(g.support(), span);
        match classify_83(&g).unwrap() {
            Classification83::GammaGH { h_set } => assert_eq!(h_set, span),
            other => panic!("expected subgroup family, got {other:?}"),
        }
        // deg(w4) = h1 h2
        assert_eq!(g.basis[4].1, group.op(&gens[0], &gens[1]));
    }

    #[test]
    fn gamma_ghk_round_trip() {
        let field = q();
        let group = AbGroup::elementary_2(5);
        let k_gens = [group.generator(0), group.generator(1), group.generator(2)];
        let h = group.generator(3);
        let g = gamma_ghk(&field, &group, &k_gens, &h).unwrap();
        assert!(verify_grading(&g).unwrap().ok);
        let k_set = group.span(&k_gens, 64).unwrap();
        let mut h_gens = k_gens.to_vec();
        h_gens.push(h.clone());
        let h_set = group.span(&h_gens, 64).unwrap();
        // support is the nontrivial coset
        let supp = g.support();
        assert_eq!(supp.len(), 8);
        for s in &supp {
            assert!(h_set.binary_search(s).is_ok());
            assert!(k_set.binary_search(s).is_err());
        }
        match classify_83(&g).unwrap() {
            Classification83::GammaGHK {
                h_set: hh,
                k_set: kk,
            } => {
                assert_eq!(hh, h_set);
                assert_eq!(kk, k_set);
            }
            other => panic!("expected shifted family, got {other:?}"),
        }
        // shift by h inside K is rejected
        assert!(gamma_ghk(&field, &group, &k_gens, &group.generator(0)).is_err());
    }

    #[test]
    fn iso_83_weyl_action() {
        let g = cartan_grading(&q());
        let group = &g.group;
        let id_alpha: Vec<GroupElem> = (0..3).map(|i| group.generator(i)).collect();
        let ws = weyl_cartan_matrices();
        // alpha composed with any Weyl element stays isomorphic
        for w in ws.iter().take(6) {
            let twisted = compose_alpha(group, &id_alpha, w);
            assert!(iso_83(
                &Classification83::CartanCoarsening { alpha: id_alpha.clone() },
                &Classification83::CartanCoarsening { alpha: twisted },
                group
            ));
        }
        // a non-Weyl relabeling is not isomorphic: swap generator 0 with its
        // double
        let bad = vec![
            group.pow(&group.generator(0), 2),
            group.generator(1),
            group.generator(2),
        ];
        assert!(!iso_83(
            &Classification83::CartanCoarsening { alpha: id_alpha.clone() },
            &Classification83::CartanCoarsening { alpha: bad },
            group
        ));
    }

    #[test]
    fn weyl_matrices_form_a_group() {
        let ws = weyl_cartan_matrices();
        assert_eq!(ws.len(), 48);
        // closed under multiplication
        let mul = |a: &[[i64; 3]; 3], b: &[[i64; 3]; 3]| -> [[i64; 3]; 3] {
            let mut c = [[0i64; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    for (k, bk) in b.iter().enumerate() {
                        c[i][j] += a[i][k] * bk[j];
                    }
                }
            }
            c
        };
        for a in ws.iter().take(8) {
            for b in ws.iter().take(8) {
                let c = mul(a, b);
                assert!(ws.binary_search(&c).is_ok());
            }
        }
    }

    #[test]
    fn weyl_orders_by_formula() {
        assert_eq!(weyl_order(WeylId::FineN1 { p: 4, q: 0 }), 24);
        assert_eq!(weyl_order(WeylId::FineN1 { p: 0, q: 2 }), 8);
        assert_eq!(weyl_order(WeylId::FineN1 { p: 1, q: 1 }), 2);
        assert_eq!(weyl_order(WeylId::CartanB3), 48);
        assert_eq!(weyl_order(WeylId::Cd), 1344);
        assert_eq!(weyl_order(WeylId::G2Cartan), 12);
        assert_eq!(weyl_order(WeylId::G2Elem2), 168);
        assert_eq!(weyl_order(WeylId::OneFold { s: 3 }), 36);
    }

    #[test]
    fn weyl_search_n1_small() {
        assert_eq!(weyl_search_n1_11(&f5()).unwrap(), 2);
    }

    #[test]
    fn coarsening_functoriality() {
        let g = cartan_grading(&q());
        let z2 = AbGroup::elementary_2(1);
        let images = vec![z2.generator(0), z2.generator(0), z2.identity()];
        let h = crate::abgroup::hom(&g.group, &z2, images, &[]).unwrap();
        let cg = coarsen(&g, &h);
        assert!(verify_grading(&cg).unwrap().ok);
        for (orig, new) in g.basis.iter().zip(&cg.basis) {
            assert_eq!(h.apply(&orig.1), new.1);
        }
        // coarsening of Cartan classifies back into the first family
        assert!(matches!(
            classify_83(&cg).unwrap(),
            Classification83::CartanCoarsening { .. }
        ));
    }
}
