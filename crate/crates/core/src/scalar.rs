//! Exact field arithmetic: rationals, odd prime fields, and quadratic
//! extensions of either. No floating point anywhere; equality is structural
//! because every value is kept in canonical form.

use std::fmt;
use std::sync::Arc;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

/// Error raised while constructing fields or parsing scalars.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldError {
    CharacteristicTwo,
    NotPrime(u64),
    SquareAdjoined(String),
    NestedExtension,
    Parse(String),
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::CharacteristicTwo => write!(f, "characteristic two is not supported"),
            FieldError::NotPrime(p) => write!(f, "{p} is not an odd prime"),
            FieldError::SquareAdjoined(d) => {
                write!(f, "cannot adjoin sqrt of {d}: already a square")
            }
            FieldError::NestedExtension => {
                write!(f, "quadratic extensions of quadratic extensions are not supported")
            }
            FieldError::Parse(s) => write!(f, "parse error: {s}"),
        }
    }
}

impl std::error::Error for FieldError {}

/// The base of a (possibly extended) field: the rationals or F_p, p an odd prime.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BaseField {
    Q,
    Fp(u64),
}

impl BaseField {
    pub fn characteristic(&self) -> u64 {
        match self {
            BaseField::Q => 0,
            BaseField::Fp(p) => *p,
        }
    }
}

/// A field descriptor: `Q`, `Fp:p`, or a quadratic extension `F(sqrt d)` of one
/// of those. Characteristic two is rejected at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Field {
    Base(BaseField),
    /// `base(sqrt d)` where `d` is a non-square of the base field.
    Ext(Arc<ExtField>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtField {
    pub base: BaseField,
    /// The adjoined square: elements are `a + b*sqrt(d)`.
    pub d: Scalar,
}

fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut k = 3u64;
    while k * k <= p {
        if p % k == 0 {
            return false;
        }
        k += 2;
    }
    true
}

impl Field {
    pub fn rationals() -> Field {
        Field::Base(BaseField::Q)
    }

    pub fn prime(p: u64) -> Result<Field, FieldError> {
        if p == 2 {
            return Err(FieldError::CharacteristicTwo);
        }
        if !is_odd_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(Field::Base(BaseField::Fp(p)))
    }

    /// Adjoin a square root of `d` to a base field. `d` must be a non-square
    /// scalar of that base field.
    pub fn quadratic(base: &Field, d: Scalar) -> Result<Field, FieldError> {
        let bf = match base {
            Field::Base(bf) => bf.clone(),
            Field::Ext(_) => return Err(FieldError::NestedExtension),
        };
        debug_assert_eq!(d.field(), base.clone());
        if d.is_zero() || d.sqrt_opt().is_some() {
            return Err(FieldError::SquareAdjoined(d.to_string()));
        }
        Ok(Field::Ext(Arc::new(ExtField { base: bf, d })))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Base(b) => b.characteristic(),
            Field::Ext(e) => e.base.characteristic(),
        }
    }

    pub fn base(&self) -> BaseField {
        match self {
            Field::Base(b) => b.clone(),
            Field::Ext(e) => e.base.clone(),
        }
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, k: i64) -> Scalar {
        match self {
            Field::Base(BaseField::Q) => Scalar::Rat(BigRational::from_integer(BigInt::from(k))),
            Field::Base(BaseField::Fp(p)) => Scalar::Mod {
                p: *p,
                v: (k.rem_euclid(*p as i64)) as u64,
            },
            Field::Ext(e) => {
                let base = Field::Base(e.base.clone());
                Scalar::Ext(Box::new(ExtElem {
                    field: e.clone(),
                    a: base.from_i64(k),
                    b: base.from_i64(0),
                }))
            }
        }
    }

    /// The rational a/b mapped into this field (b invertible).
    pub fn from_ratio(&self, a: i64, b: i64) -> Scalar {
        assert!(b != 0, "zero denominator");
        self.from_i64(a).div(&self.from_i64(b))
    }

    /// The element `sqrt(d)` of a quadratic extension.
    pub fn sqrt_gen(&self) -> Option<Scalar> {
        match self {
            Field::Ext(e) => {
                let base = Field::Base(e.base.clone());
                Some(Scalar::Ext(Box::new(ExtElem {
                    field: e.clone(),
                    a: base.from_i64(0),
                    b: base.from_i64(1),
                })))
            }
            _ => None,
        }
    }

    pub fn has_sqrt_minus_one(&self) -> bool {
        self.from_i64(-1).sqrt_opt().is_some()
    }

    /// All elements x of the field with x^m = 1, sorted canonically.
    ///
    /// For prime bases this walks the cyclic group F_p^*; for the rationals
    /// and their quadratic extensions the torsion is {±1} plus the fourth
    /// (sixth) roots when the extension contains i (a primitive cube root).
    pub fn roots_of_unity(&self, m: u64) -> Vec<Scalar> {
        assert!(m >= 1);
        let mut roots: Vec<Scalar> = Vec::new();
        match self {
            Field::Base(BaseField::Q) => {
                roots.push(self.one());
                if m % 2 == 0 {
                    roots.push(self.from_i64(-1));
                }
            }
            Field::Base(BaseField::Fp(p)) => {
                let g = num::integer::gcd(m, p - 1);
                let zeta = primitive_root(*p);
                let omega = pow_mod(zeta, (p - 1) / g, *p);
                let mut vals: Vec<u64> = Vec::with_capacity(g as usize);
                let mut cur = 1u64;
                for _ in 0..g {
                    vals.push(cur);
                    cur = mul_mod(cur, omega, *p);
                }
                vals.sort_unstable();
                vals.dedup();
                for v in vals {
                    roots.push(Scalar::Mod { p: *p, v });
                }
            }
            Field::Ext(e) => {
                let base = Field::Base(e.base.clone());
                for r in base.roots_of_unity(m) {
                    roots.push(self.lift(&r));
                }
                match &e.base {
                    BaseField::Fp(p) => {
                        // Walk the whole multiplicative group of F_{p^2}; fields
                        // here are tiny by construction.
                        assert!(
                            p * p <= 1_000_000,
                            "root enumeration over large quadratic extensions is unsupported"
                        );
                        for a in 0..*p {
                            for b in 1..*p {
                                let x = Scalar::Ext(Box::new(ExtElem {
                                    field: e.clone(),
                                    a: Scalar::Mod { p: *p, v: a },
                                    b: Scalar::Mod { p: *p, v: b },
                                }));
                                if x.pow(m as i64).is_one() {
                                    roots.push(x);
                                }
                            }
                        }
                    }
                    BaseField::Q => {
                        // Extra torsion exists only when the extension is
                        // Q(i) (d = -square) or Q(sqrt -3) (d = -3*square).
                        let d = &e.d;
                        if let Some(t) = d.neg().sqrt_opt() {
                            // i = sqrt(d)/t, of order 4.
                            if m % 4 == 0 {
                                let i = self.sqrt_gen().unwrap().div(&self.lift(&t));
                                roots.push(i.clone());
                                roots.push(i.neg());
                            }
                        }
                        let md3 = d.neg().div(&base.from_i64(3));
                        if let Some(t) = md3.sqrt_opt() {
                            // sqrt(-3) = t*sqrt(d); omega = (-1+sqrt(-3))/2 has order 3.
                            let s3 = self.sqrt_gen().unwrap().mul(&self.lift(&t));
                            let half = self.from_ratio(1, 2);
                            let omega = s3.sub(&self.one()).mul(&half);
                            let omega2 = omega.mul(&omega);
                            if m % 3 == 0 {
                                roots.push(omega.clone());
                                roots.push(omega2.clone());
                            }
                            if m % 6 == 0 {
                                roots.push(omega.neg());
                                roots.push(omega2.neg());
                            }
                        }
                    }
                }
            }
        }
        roots.sort_by_key(|s| s.to_string());
        roots.dedup();
        roots
    }

    /// Lift a base-field scalar into this field (identity on matching fields).
    pub fn lift(&self, x: &Scalar) -> Scalar {
        match (self, x) {
            (Field::Ext(e), Scalar::Rat(_)) | (Field::Ext(e), Scalar::Mod { .. }) => {
                debug_assert_eq!(Field::Base(e.base.clone()), x.field());
                Scalar::Ext(Box::new(ExtElem {
                    field: e.clone(),
                    a: x.clone(),
                    b: Field::Base(e.base.clone()).from_i64(0),
                }))
            }
            _ => {
                debug_assert_eq!(self, &x.field());
                x.clone()
            }
        }
    }

    /// Serialized descriptor: "Q", "Fp:5", "Q(i)", "Fp:5(sqrt:2)".
    pub fn descriptor(&self) -> String {
        match self {
            Field::Base(BaseField::Q) => "Q".to_string(),
            Field::Base(BaseField::Fp(p)) => format!("Fp:{p}"),
            Field::Ext(e) => {
                let base = match &e.base {
                    BaseField::Q => "Q".to_string(),
                    BaseField::Fp(p) => format!("Fp:{p}"),
                };
                if e.d == Field::Base(e.base.clone()).from_i64(-1) {
                    format!("{base}(i)")
                } else {
                    format!("{base}(sqrt:{})", e.d)
                }
            }
        }
    }

    pub fn parse(s: &str) -> Result<Field, FieldError> {
        let s = s.trim();
        let (base_str, ext_str) = match s.find('(') {
            Some(i) => {
                if !s.ends_with(')') {
                    return Err(FieldError::Parse(s.to_string()));
                }
                (&s[..i], Some(&s[i + 1..s.len() - 1]))
            }
            None => (s, None),
        };
        let base = if base_str == "Q" {
            Field::rationals()
        } else if let Some(p) = base_str.strip_prefix("Fp:") {
            let p: u64 = p
                .parse()
                .map_err(|_| FieldError::Parse(base_str.to_string()))?;
            Field::prime(p)?
        } else {
            return Err(FieldError::Parse(base_str.to_string()));
        };
        match ext_str {
            None => Ok(base),
            Some("i") => Field::quadratic(&base, base.from_i64(-1)),
            Some(e) => {
                let d_str = e
                    .strip_prefix("sqrt:")
                    .ok_or_else(|| FieldError::Parse(e.to_string()))?;
                let d = base.parse_scalar(d_str)?;
                Field::quadratic(&base, d)
            }
        }
    }

    /// Parse a scalar literal in this field. Base literals are "n" or "n/m";
    /// extension literals additionally allow "a+b*w" / "a-b*w" / "b*w" where
    /// `w` denotes the adjoined root.
    pub fn parse_scalar(&self, s: &str) -> Result<Scalar, FieldError> {
        let s = s.trim();
        match self {
            Field::Base(_) => self.parse_base_scalar(s),
            Field::Ext(e) => {
                let base = Field::Base(e.base.clone());
                if let Some(star) = s.find("*w") {
                    // forms: "a+b*w", "a-b*w", "b*w"
                    if star + 2 != s.len() {
                        return Err(FieldError::Parse(s.to_string()));
                    }
                    let body = &s[..star];
                    // split at the last +/- that is not leading and not after '/'
                    let mut split = None;
                    for (i, c) in body.char_indices().skip(1) {
                        if (c == '+' || c == '-') && !matches!(&body[i - 1..i], "/" | "+" | "-") {
                            split = Some(i);
                        }
                    }
                    let (a_str, b_str) = match split {
                        Some(i) => (&body[..i], &body[i..]),
                        None => ("0", body),
                    };
                    let a = base.parse_base_scalar(a_str)?;
                    let b_str = b_str.strip_prefix('+').unwrap_or(b_str);
                    let b = base.parse_base_scalar(b_str)?;
                    Ok(Scalar::Ext(Box::new(ExtElem {
                        field: e.clone(),
                        a,
                        b,
                    })))
                } else {
                    Ok(self.lift(&base.parse_base_scalar(s)?))
                }
            }
        }
    }

    fn parse_base_scalar(&self, s: &str) -> Result<Scalar, FieldError> {
        let err = || FieldError::Parse(s.to_string());
        match self.base() {
            BaseField::Q => {
                let (num, den) = match s.split_once('/') {
                    Some((n, d)) => (n, d),
                    None => (s, "1"),
                };
                let n: BigInt = num.trim().parse().map_err(|_| err())?;
                let d: BigInt = den.trim().parse().map_err(|_| err())?;
                if d.is_zero() {
                    return Err(err());
                }
                Ok(Scalar::Rat(BigRational::new(n, d)))
            }
            BaseField::Fp(p) => {
                let (num, den) = match s.split_once('/') {
                    Some((n, d)) => (n, d),
                    None => (s, "1"),
                };
                let n: i64 = num.trim().parse().map_err(|_| err())?;
                let d: i64 = den.trim().parse().map_err(|_| err())?;
                if d.rem_euclid(p as i64) == 0 {
                    return Err(err());
                }
                Ok(Field::Base(BaseField::Fp(p))
                    .from_i64(n)
                    .div(&Field::Base(BaseField::Fp(p)).from_i64(d)))
            }
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

/// An exact scalar. The variant pins the field: rationals, a prime field
/// residue, or `a + b*sqrt(d)` over one of those.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scalar {
    Rat(BigRational),
    Mod { p: u64, v: u64 },
    Ext(Box<ExtElem>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtElem {
    pub field: Arc<ExtField>,
    pub a: Scalar,
    pub b: Scalar,
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    assert!(a % p != 0, "division by zero in F_{p}");
    pow_mod(a, p - 2, p)
}

fn factorize(mut n: u64) -> Vec<u64> {
    let mut fs = Vec::new();
    let mut k = 2u64;
    while k * k <= n {
        if n % k == 0 {
            fs.push(k);
            while n % k == 0 {
                n /= k;
            }
        }
        k += 1;
    }
    if n > 1 {
        fs.push(n);
    }
    fs
}

fn primitive_root(p: u64) -> u64 {
    let phi = p - 1;
    let fs = factorize(phi);
    'cand: for g in 2..p {
        for q in &fs {
            if pow_mod(g, phi / q, p) == 1 {
                continue 'cand;
            }
        }
        return g;
    }
    unreachable!("no primitive root found for prime {p}")
}

/// Tonelli–Shanks square root in F_p; returns the least of the two roots.
fn sqrt_mod(n: u64, p: u64) -> Option<u64> {
    let n = n % p;
    if n == 0 {
        return Some(0);
    }
    if pow_mod(n, (p - 1) / 2, p) != 1 {
        return None;
    }
    let r = if p % 4 == 3 {
        pow_mod(n, (p + 1) / 4, p)
    } else {
        // write p-1 = q * 2^s with q odd
        let mut q = p - 1;
        let mut s = 0u32;
        while q % 2 == 0 {
            q /= 2;
            s += 1;
        }
        let mut z = 2u64;
        while pow_mod(z, (p - 1) / 2, p) != p - 1 {
            z += 1;
        }
        let mut m = s;
        let mut c = pow_mod(z, q, p);
        let mut t = pow_mod(n, q, p);
        let mut r = pow_mod(n, (q + 1) / 2, p);
        while t != 1 {
            let mut i = 0u32;
            let mut tt = t;
            while tt != 1 {
                tt = mul_mod(tt, tt, p);
                i += 1;
            }
            let b = pow_mod(c, 1 << (m - i - 1), p);
            m = i;
            c = mul_mod(b, b, p);
            t = mul_mod(t, c, p);
            r = mul_mod(r, b, p);
        }
        r
    };
    Some(r.min(p - r))
}

fn rat_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_zero() {
        return Some(BigRational::zero());
    }
    if x.is_negative() {
        return None;
    }
    let n = x.numer();
    let d = x.denom();
    let rn = n.sqrt();
    let rd = d.sqrt();
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        Some(BigRational::new(rn, rd))
    } else {
        None
    }
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Rat(_) => Field::Base(BaseField::Q),
            Scalar::Mod { p, .. } => Field::Base(BaseField::Fp(*p)),
            Scalar::Ext(e) => Field::Ext(e.field.clone()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Mod { v, .. } => *v == 0,
            Scalar::Ext(e) => e.a.is_zero() && e.b.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_one(),
            Scalar::Mod { v, .. } => *v == 1,
            Scalar::Ext(e) => e.a.is_one() && e.b.is_zero(),
        }
    }

    /// Lift (base, ext) operand pairs into the common field; panics on a
    /// genuine mismatch, which is a programming error.
    fn coerce(x: &Scalar, y: &Scalar) -> (Scalar, Scalar) {
        match (x, y) {
            (Scalar::Ext(e), Scalar::Rat(_)) | (Scalar::Ext(e), Scalar::Mod { .. }) => {
                (x.clone(), Field::Ext(e.field.clone()).lift(y))
            }
            (Scalar::Rat(_), Scalar::Ext(e)) | (Scalar::Mod { .. }, Scalar::Ext(e)) => {
                (Field::Ext(e.field.clone()).lift(x), y.clone())
            }
            _ => (x.clone(), y.clone()),
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        let (x, y) = Scalar::coerce(self, other);
        match (x, y) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            (Scalar::Mod { p, v }, Scalar::Mod { p: q, v: w }) => {
                assert_eq!(p, q, "scalar field mismatch");
                Scalar::Mod { p, v: (v + w) % p }
            }
            (Scalar::Ext(a), Scalar::Ext(b)) => {
                assert_eq!(a.field, b.field, "scalar field mismatch");
                Scalar::Ext(Box::new(ExtElem {
                    field: a.field.clone(),
                    a: a.a.add(&b.a),
                    b: a.b.add(&b.b),
                }))
            }
            _ => panic!("scalar field mismatch"),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rat(a) => Scalar::Rat(-a),
            Scalar::Mod { p, v } => Scalar::Mod {
                p: *p,
                v: if *v == 0 { 0 } else { p - v },
            },
            Scalar::Ext(e) => Scalar::Ext(Box::new(ExtElem {
                field: e.field.clone(),
                a: e.a.neg(),
                b: e.b.neg(),
            })),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        let (x, y) = Scalar::coerce(self, other);
        match (x, y) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            (Scalar::Mod { p, v }, Scalar::Mod { p: q, v: w }) => {
                assert_eq!(p, q, "scalar field mismatch");
                Scalar::Mod {
                    p,
                    v: mul_mod(v, w, p),
                }
            }
            (Scalar::Ext(x), Scalar::Ext(y)) => {
                assert_eq!(x.field, y.field, "scalar field mismatch");
                // (a + b w)(c + d w) = (ac + bd*d0) + (ad + bc) w,  w^2 = d0
                let d0 = &x.field.d;
                let a = x.a.mul(&y.a).add(&x.b.mul(&y.b).mul(d0));
                let b = x.a.mul(&y.b).add(&x.b.mul(&y.a));
                Scalar::Ext(Box::new(ExtElem {
                    field: x.field.clone(),
                    a,
                    b,
                }))
            }
            _ => panic!("scalar field mismatch"),
        }
    }

    pub fn inv(&self) -> Scalar {
        match self {
            Scalar::Rat(a) => {
                assert!(!a.is_zero(), "division by zero");
                Scalar::Rat(a.recip())
            }
            Scalar::Mod { p, v } => Scalar::Mod {
                p: *p,
                v: inv_mod(*v, *p),
            },
            Scalar::Ext(e) => {
                // (a + b w)^{-1} = (a - b w) / (a^2 - b^2 d); the norm is
                // nonzero because d is a non-square.
                let norm = e.a.mul(&e.a).sub(&e.b.mul(&e.b).mul(&e.field.d));
                assert!(!norm.is_zero(), "division by zero");
                let ninv = norm.inv();
                Scalar::Ext(Box::new(ExtElem {
                    field: e.field.clone(),
                    a: e.a.mul(&ninv),
                    b: e.b.neg().mul(&ninv),
                }))
            }
        }
    }

    pub fn div(&self, other: &Scalar) -> Scalar {
        self.mul(&other.inv())
    }

    pub fn pow(&self, k: i64) -> Scalar {
        let field = self.field();
        if k == 0 {
            return field.one();
        }
        let base = if k < 0 { self.inv() } else { self.clone() };
        let mut exp = k.unsigned_abs();
        let mut acc = field.one();
        let mut sq = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&sq);
            }
            sq = sq.mul(&sq);
            exp >>= 1;
        }
        acc
    }

    /// True for the canonical member of each {x, -x} pair: nonnegative over
    /// the rationals, least residue over F_p, lexicographic on coordinates in
    /// extensions. Used to pick deterministic square roots.
    pub fn is_canonical_sign(&self) -> bool {
        match self {
            Scalar::Rat(r) => !r.is_negative(),
            Scalar::Mod { p, v } => *v <= (p - 1) / 2,
            Scalar::Ext(e) => {
                if !e.a.is_zero() {
                    e.a.is_canonical_sign()
                } else {
                    e.b.is_canonical_sign()
                }
            }
        }
    }

    fn canonical_root(self) -> Scalar {
        if self.is_canonical_sign() {
            self
        } else {
            self.neg()
        }
    }

    /// The canonical square root of `self`, when one exists in the field.
    pub fn sqrt_opt(&self) -> Option<Scalar> {
        match self {
            Scalar::Rat(r) => rat_sqrt(r).map(Scalar::Rat),
            Scalar::Mod { p, v } => sqrt_mod(*v, *p).map(|r| Scalar::Mod { p: *p, v: r }),
            Scalar::Ext(e) => {
                let base = Field::Base(e.field.base.clone());
                let ext = Field::Ext(e.field.clone());
                let d = &e.field.d;
                if e.b.is_zero() {
                    if let Some(r) = e.a.sqrt_opt() {
                        return Some(ext.lift(&r).canonical_root());
                    }
                    // a = d * r^2  =>  sqrt(a) = r * w
                    if let Some(r) = e.a.div(d).sqrt_opt() {
                        let w = ext.sqrt_gen().unwrap();
                        return Some(ext.lift(&r).mul(&w).canonical_root());
                    }
                    return None;
                }
                // (x + y w)^2 = a + b w:  x^2 + d y^2 = a, 2xy = b.
                // x^2 is a root of t^2 - a t + d b^2/4.
                let half = base.from_i64(1).div(&base.from_i64(2));
                let disc = e.a.mul(&e.a).sub(&d.mul(&e.b).mul(&e.b));
                let s = disc.sqrt_opt()?;
                for cand in [e.a.add(&s).mul(&half), e.a.sub(&s).mul(&half)] {
                    if let Some(x) = cand.sqrt_opt() {
                        if x.is_zero() {
                            continue;
                        }
                        let y = e.b.mul(&half).div(&x);
                        let root = Scalar::Ext(Box::new(ExtElem {
                            field: e.field.clone(),
                            a: x,
                            b: y,
                        }));
                        if root.mul(&root) == *self {
                            return Some(root.canonical_root());
                        }
                    }
                }
                None
            }
        }
    }

    /// Literal form accepted back by `Field::parse_scalar`.
    pub fn literal(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Mod { v, .. } => write!(f, "{v}"),
            Scalar::Ext(e) => {
                if e.b.is_zero() {
                    write!(f, "{}", e.a)
                } else if e.a.is_zero() {
                    write!(f, "{}*w", e.b)
                } else {
                    write!(f, "{}+{}*w", e.a, e.b)
                }
            }
        }
    }
}
