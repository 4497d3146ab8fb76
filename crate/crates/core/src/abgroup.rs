//! Finitely generated abelian groups by presentation: Smith normal form,
//! canonical element coordinates, orders, and homomorphisms. The substrate
//! for all grading groups.

use std::fmt;
use std::sync::Arc;

use num::bigint::BigInt;
use num::{Integer, One, Signed, Zero};

type IntMat = Vec<Vec<BigInt>>;

fn int_mat(rows: usize, cols: usize) -> IntMat {
    vec![vec![BigInt::zero(); cols]; rows]
}

fn identity_mat(n: usize) -> IntMat {
    let mut m = int_mat(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = BigInt::one();
    }
    m
}

#[derive(Debug)]
struct GroupData {
    gens: usize,
    /// y = x * Q maps generator exponents to diagonal coordinates.
    q: IntMat,
    qinv: IntMat,
    /// Full diagonal in the transformed coordinates: d_i >= 0, zero meaning
    /// a free coordinate; d_1 | d_2 | ... among the nonzero entries.
    diag: Vec<BigInt>,
    /// Transformed coordinates kept in normal forms (those with d_i != 1).
    kept: Vec<usize>,
}

/// A finitely generated abelian group, presented by generators and relations
/// and held in Smith normal form.
#[derive(Debug, Clone)]
pub struct AbGroup {
    data: Arc<GroupData>,
}

/// An element in normal-form coordinates: free coordinates are integers,
/// torsion coordinates least residues mod their invariant factor.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroupElem {
    coords: Vec<BigInt>,
    #[doc(hidden)]
    pub fingerprint: u64,
}

impl fmt::Display for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

fn smith_normal_form(rels: &[Vec<i64>], m: usize) -> (IntMat, IntMat, Vec<BigInt>) {
    let k = rels.len();
    let mut r: IntMat = rels
        .iter()
        .map(|row| {
            assert_eq!(row.len(), m, "relation length must equal generator count");
            row.iter().map(|&x| BigInt::from(x)).collect()
        })
        .collect();
    let mut q = identity_mat(m);
    let mut qinv = identity_mat(m);

    // column operations keep q and qinv in sync; row operations are free
    let col_swap = |r: &mut IntMat, q: &mut IntMat, qinv: &mut IntMat, a: usize, b: usize| {
        for row in r.iter_mut() {
            row.swap(a, b);
        }
        for row in q.iter_mut() {
            row.swap(a, b);
        }
        qinv.swap(a, b);
    };
    let col_add =
        |r: &mut IntMat, q: &mut IntMat, qinv: &mut IntMat, dst: usize, src: usize, c: &BigInt| {
            for row in r.iter_mut() {
                let t = &row[src] * c;
                row[dst] += t;
            }
            for row in q.iter_mut() {
                let t = &row[src] * c;
                row[dst] += t;
            }
            let delta: Vec<BigInt> = qinv[dst].iter().map(|x| x * c).collect();
            for (x, d) in qinv[src].iter_mut().zip(delta) {
                *x -= d;
            }
        };
    let col_neg = |r: &mut IntMat, q: &mut IntMat, qinv: &mut IntMat, a: usize| {
        for row in r.iter_mut() {
            row[a] = -row[a].clone();
        }
        for row in q.iter_mut() {
            row[a] = -row[a].clone();
        }
        for x in qinv[a].iter_mut() {
            *x = -x.clone();
        }
    };

    let mut t = 0usize;
    while t < k.min(m) {
        // locate the smallest nonzero entry in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..k {
            for j in t..m {
                if r[i][j].is_zero() {
                    continue;
                }
                if best.is_none() || {
                    let (bi, bj) = best.unwrap();
                    r[i][j].abs() < r[bi][bj].abs()
                } {
                    best = Some((i, j));
                }
            }
        }
        let (bi, bj) = match best {
            Some(b) => b,
            None => break,
        };
        r.swap(t, bi);
        if bj != t {
            col_swap(&mut r, &mut q, &mut qinv, t, bj);
        }
        loop {
            // clear the pivot column by row operations
            let mut dirty = false;
            for i in (t + 1)..k {
                if r[i][t].is_zero() {
                    continue;
                }
                let quo = r[i][t].div_floor(&r[t][t]);
                if !quo.is_zero() {
                    let base: Vec<BigInt> = r[t].iter().map(|x| x * &quo).collect();
                    for (x, b) in r[i].iter_mut().zip(base) {
                        *x -= b;
                    }
                }
                if !r[i][t].is_zero() {
                    r.swap(t, i);
                    dirty = true;
                }
            }
            // clear the pivot row by column operations
            for j in (t + 1)..m {
                if r[t][j].is_zero() {
                    continue;
                }
                let quo = r[t][j].div_floor(&r[t][t]);
                if !quo.is_zero() {
                    col_add(&mut r, &mut q, &mut qinv, j, t, &-quo);
                }
                if !r[t][j].is_zero() {
                    col_swap(&mut r, &mut q, &mut qinv, t, j);
                    dirty = true;
                }
            }
            if !dirty {
                break;
            }
        }
        // force the pivot to divide the rest of the block
        let mut fixed = true;
        'div: for i in (t + 1)..k {
            for j in (t + 1)..m {
                if !(&r[i][j] % &r[t][t]).is_zero() {
                    let row: Vec<BigInt> = r[i].clone();
                    for (x, b) in r[t].iter_mut().zip(row) {
                        *x += b;
                    }
                    fixed = false;
                    break 'div;
                }
            }
        }
        if !fixed {
            continue;
        }
        if r[t][t].is_negative() {
            col_neg(&mut r, &mut q, &mut qinv, t);
        }
        t += 1;
    }

    let mut diag = vec![BigInt::zero(); m];
    for (i, d) in diag.iter_mut().enumerate().take(t.min(m)) {
        *d = r[i][i].clone();
    }
    (q, qinv, diag)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupError {
    OwnerMismatch,
    RelationViolated(usize),
    ImageCount { expected: usize, got: usize },
}

impl fmt::Display for GroupError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupError::OwnerMismatch => write!(f, "elements belong to different groups"),
            GroupError::RelationViolated(i) => {
                write!(f, "generator images violate relation {i}")
            }
            GroupError::ImageCount { expected, got } => {
                write!(f, "expected {expected} generator images, got {got}")
            }
        }
    }
}

impl std::error::Error for GroupError {}

impl AbGroup {
    /// The group with `m` generators subject to the given relation rows
    /// (exponent vectors).
    pub fn from_presentation(m: usize, relations: &[Vec<i64>]) -> AbGroup {
        let (q, qinv, diag) = smith_normal_form(relations, m);
        let kept = (0..m).filter(|&i| !diag[i].is_one()).collect();
        AbGroup {
            data: Arc::new(GroupData {
                gens: m,
                q,
                qinv,
                diag,
                kept,
            }),
        }
    }

    pub fn free(rank: usize) -> AbGroup {
        AbGroup::from_presentation(rank, &[])
    }

    /// (Z/2)^k.
    pub fn elementary_2(k: usize) -> AbGroup {
        let rels: Vec<Vec<i64>> = (0..k)
            .map(|i| {
                let mut r = vec![0i64; k];
                r[i] = 2;
                r
            })
            .collect();
        AbGroup::from_presentation(k, &rels)
    }

    pub fn generators(&self) -> usize {
        self.data.gens
    }

    fn fingerprint(&self) -> u64 {
        // cheap structural tag to catch owner mixups
        let mut h: u64 = self.data.gens as u64;
        for d in &self.data.diag {
            let lo = d
                .to_string()
                .bytes()
                .fold(0u64, |a, b| a.wrapping_mul(31).wrapping_add(b as u64));
            h = h.wrapping_mul(1_000_003).wrapping_add(lo);
        }
        h
    }

    /// (free rank, invariant factors > 1 in divisibility order).
    pub fn isomorphism_type(&self) -> (usize, Vec<BigInt>) {
        let rank = self.data.diag.iter().filter(|d| d.is_zero()).count();
        let tors: Vec<BigInt> = self
            .data
            .diag
            .iter()
            .filter(|d| !d.is_zero() && !d.is_one())
            .cloned()
            .collect();
        (rank, tors)
    }

    pub fn type_string(&self) -> String {
        let (rank, tors) = self.isomorphism_type();
        let mut parts = Vec::new();
        if rank == 1 {
            parts.push("Z".to_string());
        } else if rank > 1 {
            parts.push(format!("Z^{rank}"));
        }
        for d in tors {
            parts.push(format!("Z/{d}"));
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join(" x ")
        }
    }

    pub fn is_finite(&self) -> bool {
        self.isomorphism_type().0 == 0
    }

    pub fn order(&self) -> Option<BigInt> {
        let (rank, tors) = self.isomorphism_type();
        if rank > 0 {
            return None;
        }
        Some(tors.iter().fold(BigInt::one(), |a, d| a * d))
    }

    fn reduce(&self, full: &mut [BigInt]) {
        for (i, d) in self.data.diag.iter().enumerate() {
            if !d.is_zero() {
                full[i] = full[i].mod_floor(d);
            }
        }
    }

    /// The element with the given exponents over the presentation generators.
    pub fn element_from_exponents(&self, exps: &[i64]) -> GroupElem {
        assert_eq!(exps.len(), self.data.gens, "exponent vector length mismatch");
        let mut full = vec![BigInt::zero(); self.data.gens];
        for (j, col) in full.iter_mut().enumerate() {
            for (i, &e) in exps.iter().enumerate() {
                if e != 0 {
                    *col += &self.data.q[i][j] * BigInt::from(e);
                }
            }
        }
        self.reduce(&mut full);
        GroupElem {
            coords: self.data.kept.iter().map(|&i| full[i].clone()).collect(),
            fingerprint: self.fingerprint(),
        }
    }

    pub fn identity(&self) -> GroupElem {
        GroupElem {
            coords: vec![BigInt::zero(); self.data.kept.len()],
            fingerprint: self.fingerprint(),
        }
    }

    pub fn generator(&self, i: usize) -> GroupElem {
        let mut exps = vec![0i64; self.data.gens];
        exps[i] = 1;
        self.element_from_exponents(&exps)
    }

    fn check_owner(&self, a: &GroupElem) {
        assert_eq!(a.fingerprint, self.fingerprint(), "group owner mismatch");
    }

    pub fn op(&self, a: &GroupElem, b: &GroupElem) -> GroupElem {
        self.check_owner(a);
        self.check_owner(b);
        let mut full = vec![BigInt::zero(); self.data.gens];
        for (k, &i) in self.data.kept.iter().enumerate() {
            full[i] = &a.coords[k] + &b.coords[k];
        }
        self.reduce(&mut full);
        GroupElem {
            coords: self.data.kept.iter().map(|&i| full[i].clone()).collect(),
            fingerprint: a.fingerprint,
        }
    }

    pub fn inv(&self, a: &GroupElem) -> GroupElem {
        self.pow(a, -1)
    }

    pub fn pow(&self, a: &GroupElem, k: i64) -> GroupElem {
        self.check_owner(a);
        let mut full = vec![BigInt::zero(); self.data.gens];
        for (idx, &i) in self.data.kept.iter().enumerate() {
            full[i] = &a.coords[idx] * BigInt::from(k);
        }
        self.reduce(&mut full);
        GroupElem {
            coords: self.data.kept.iter().map(|&i| full[i].clone()).collect(),
            fingerprint: a.fingerprint,
        }
    }

    pub fn product(&self, elems: &[GroupElem]) -> GroupElem {
        elems.iter().fold(self.identity(), |acc, e| self.op(&acc, e))
    }

    /// None means infinite order.
    pub fn order_of(&self, a: &GroupElem) -> Option<BigInt> {
        self.check_owner(a);
        let mut ord = BigInt::one();
        for (k, &i) in self.data.kept.iter().enumerate() {
            let d = &self.data.diag[i];
            if d.is_zero() {
                if !a.coords[k].is_zero() {
                    return None;
                }
            } else {
                let g = a.coords[k].gcd(d);
                ord = ord.lcm(&(d / g));
            }
        }
        Some(ord)
    }

    /// Express an element as one representative exponent vector over the
    /// presentation generators.
    pub fn representative_exponents(&self, a: &GroupElem) -> Vec<BigInt> {
        self.check_owner(a);
        let mut full = vec![BigInt::zero(); self.data.gens];
        for (k, &i) in self.data.kept.iter().enumerate() {
            full[i] = a.coords[k].clone();
        }
        let mut out = vec![BigInt::zero(); self.data.gens];
        for (j, o) in out.iter_mut().enumerate() {
            for (i, f) in full.iter().enumerate() {
                if !f.is_zero() {
                    *o += f * &self.data.qinv[i][j];
                }
            }
        }
        out
    }

    /// All elements of a finite group, sorted; None for infinite groups or
    /// when the order exceeds the guard.
    pub fn all_elements(&self, guard: usize) -> Option<Vec<GroupElem>> {
        let order = self.order()?;
        if order > BigInt::from(guard) {
            return None;
        }
        let moduli: Vec<BigInt> = self
            .data
            .kept
            .iter()
            .map(|&i| self.data.diag[i].clone())
            .collect();
        let mut out = vec![self.identity()];
        for (k, d) in moduli.iter().enumerate() {
            let dval: usize = d.to_string().parse().unwrap();
            let mut next = Vec::with_capacity(out.len() * dval);
            for e in &out {
                for v in 0..dval {
                    let mut coords = e.coords.clone();
                    coords[k] = BigInt::from(v);
                    next.push(GroupElem {
                        coords,
                        fingerprint: e.fingerprint,
                    });
                }
            }
            out = next;
        }
        out.sort();
        Some(out)
    }

    /// The subgroup generated by some elements of a finite group, as a
    /// sorted element list (closure under the group operation).
    pub fn span(&self, gens: &[GroupElem], guard: usize) -> Option<Vec<GroupElem>> {
        let mut seen = std::collections::BTreeSet::new();
        seen.insert(self.identity());
        let mut frontier = vec![self.identity()];
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = self.op(&x, g);
                if seen.insert(y.clone()) {
                    if seen.len() > guard {
                        return None;
                    }
                    frontier.push(y);
                }
            }
        }
        Some(seen.into_iter().collect())
    }
}

/// A homomorphism given by generator images; present only when the images
/// respect all relations.
#[derive(Debug, Clone)]
pub struct Hom {
    pub src: AbGroup,
    pub dst: AbGroup,
    pub images: Vec<GroupElem>,
}

pub fn hom(
    src: &AbGroup,
    dst: &AbGroup,
    images: Vec<GroupElem>,
    relations: &[Vec<i64>],
) -> Option<Hom> {
    if images.len() != src.generators() {
        return None;
    }
    for rel in relations {
        let mut acc = dst.identity();
        for (j, &e) in rel.iter().enumerate() {
            acc = dst.op(&acc, &dst.pow(&images[j], e));
        }
        if acc != dst.identity() {
            return None;
        }
    }
    Some(Hom {
        src: src.clone(),
        dst: dst.clone(),
        images,
    })
}

impl Hom {
    pub fn apply(&self, a: &GroupElem) -> GroupElem {
        let exps = self.src.representative_exponents(a);
        let mut acc = self.dst.identity();
        for (j, e) in exps.iter().enumerate() {
            // exponents stay tiny for every group built here
            let k: i64 = e.to_string().parse().expect("exponent fits in i64");
            acc = self.dst.op(&acc, &self.dst.pow(&self.images[j], k));
        }
        acc
    }
}

/// The universal fine-grading group of the (n-1)-fold product for the split
/// pattern (p, q): generators x_1..x_p, y_1, z_1, .., y_q, z_q subject to
/// x_i^2 = y_j z_j = (product of all generators) for all i, j.
pub fn fine_n1_presentation(p: usize, q: usize) -> (usize, Vec<Vec<i64>>) {
    let m = p + 2 * q;
    // items that must all be equal, as exponent vectors
    let mut items: Vec<Vec<i64>> = Vec::new();
    for i in 0..p {
        let mut v = vec![0i64; m];
        v[i] = 2;
        items.push(v);
    }
    for j in 0..q {
        let mut v = vec![0i64; m];
        v[p + 2 * j] = 1;
        v[p + 2 * j + 1] = 1;
        items.push(v);
    }
    items.push(vec![1i64; m]);
    let rels: Vec<Vec<i64>> = items[1..]
        .iter()
        .map(|it| {
            it.iter()
                .zip(&items[0])
                .map(|(a, b)| a - b)
                .collect::<Vec<i64>>()
        })
        .collect();
    (m, rels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fine_presentation_types() {
        // (p, q) = (0, 2): Z^2
        let (m, rels) = fine_n1_presentation(0, 2);
        let g = AbGroup::from_presentation(m, &rels);
        assert_eq!(g.type_string(), "Z^2");
        // (2, 1): Z x Z/4
        let (m, rels) = fine_n1_presentation(2, 1);
        let g = AbGroup::from_presentation(m, &rels);
        assert_eq!(g.type_string(), "Z x Z/4");
        // (4, 0): Z/4 x (Z/2)^2 -- invariant factors 2 | 2 | 4
        let (m, rels) = fine_n1_presentation(4, 0);
        let g = AbGroup::from_presentation(m, &rels);
        let (rank, tors) = g.isomorphism_type();
        assert_eq!(rank, 0);
        assert_eq!(
            tors,
            vec![BigInt::from(2), BigInt::from(2), BigInt::from(4)]
        );
    }

    #[test]
    fn element_arithmetic() {
        // Z x Z/4
        let g = AbGroup::from_presentation(2, &[vec![0, 4]]);
        let a = g.generator(0);
        let b = g.generator(1);
        assert_eq!(g.op(&g.identity(), &a), a);
        assert_eq!(g.pow(&b, 4), g.identity());
        assert_eq!(g.order_of(&a), None);
        assert_eq!(g.order_of(&b), Some(BigInt::from(4)));
        assert_eq!(g.order_of(&g.op(&a, &b)), None);
        // representative exponents round-trip
        let x = g.element_from_exponents(&[3, 7]);
        let reps = g.representative_exponents(&x);
        let back: Vec<i64> = reps.iter().map(|r| r.to_string().parse().unwrap()).collect();
        assert_eq!(g.element_from_exponents(&back), x);
    }

    #[test]
    fn hom_examples() {
        let z3 = AbGroup::free(3);
        let z2 = AbGroup::elementary_2(1);
        // Z^3 -> Z/2 sending each generator to the nonzero class
        let images = vec![z2.generator(0), z2.generator(0), z2.generator(0)];
        let h = hom(&z3, &z2, images, &[]).unwrap();
        assert_eq!(
            h.apply(&z3.element_from_exponents(&[1, 1, 0])),
            z2.identity()
        );
        // Z/2 -> Z sending the generator to 1 violates the relation
        let z = AbGroup::free(1);
        assert!(hom(&z2, &z, vec![z.generator(0)], &[vec![2]]).is_none());
        // trivial hom always exists
        assert!(hom(&z2, &z, vec![z.identity()], &[vec![2]]).is_some());
    }

    #[test]
    fn snf_invariant_under_representation_changes() {
        // the same group from sheared presentations
        let base = vec![vec![2i64, 0, 0], vec![0, 6, 0]];
        let g0 = AbGroup::from_presentation(3, &base);
        // unimodular row mixes of the same lattice
        let sheared = vec![vec![2i64, 0, 0], vec![2, 6, 0], vec![4, 18, 0]];
        let g1 = AbGroup::from_presentation(3, &sheared);
        assert_eq!(g0.isomorphism_type(), g1.isomorphism_type());
        assert_eq!(g0.type_string(), "Z x Z/2 x Z/6");
    }

    #[test]
    fn enumeration_and_span() {
        let g = AbGroup::elementary_2(3);
        let all = g.all_elements(100).unwrap();
        assert_eq!(all.len(), 8);
        let sub = g.span(&[g.generator(0), g.generator(1)], 100).unwrap();
        assert_eq!(sub.len(), 4);
    }

    #[test]
    fn n3_fine_groups() {
        // (1,1): x1 becomes trivial, U = Z
        let (m, rels) = fine_n1_presentation(1, 1);
        let g = AbGroup::from_presentation(m, &rels);
        assert_eq!(g.type_string(), "Z");
        // (3,0): Z/2 x Z/2 from the 2n-4 formula at n=3
        let (m, rels) = fine_n1_presentation(3, 0);
        let g = AbGroup::from_presentation(m, &rels);
        assert_eq!(g.type_string(), "Z/2 x Z/2");
    }
}
