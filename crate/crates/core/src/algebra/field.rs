//! Coefficient fields: `F_{p^m}` and the rational-function field `F_{p^m}(t)`
//! in one transcendental parameter.
//!
//! All arithmetic is exact. Elements are kept in canonical form: finite-field
//! elements as reduced coefficient vectors over the prime field, parametric
//! elements as coprime numerator/denominator polynomial pairs with monic
//! denominator. Canonical form makes equality representational, so values can
//! serve as map keys (pole maps, partition vertices).

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use smallvec::{smallvec, SmallVec};

use crate::error::{Error, Result};

/// Element of `F_{p^m}` as a dense coefficient vector over `F_p`
/// (ascending powers of the generator, always of length `m`).
pub type FF = SmallVec<[u64; 4]>;

/// Polynomial in the transcendental parameter over `F_{p^m}`,
/// ascending coefficients, no trailing zeros.
pub type TPoly = Vec<FF>;

pub(crate) mod fp {
    pub fn add(a: u64, b: u64, p: u64) -> u64 {
        let s = a + b;
        if s >= p {
            s - p
        } else {
            s
        }
    }

    pub fn sub(a: u64, b: u64, p: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + p - b
        }
    }

    pub fn neg(a: u64, p: u64) -> u64 {
        if a == 0 {
            0
        } else {
            p - a
        }
    }

    pub fn mul(a: u64, b: u64, p: u64) -> u64 {
        ((a as u128 * b as u128) % p as u128) as u64
    }

    pub fn is_prime(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2;
        while d * d <= n {
            if n.is_multiple_of(d) {
                return false;
            }
            d += 1;
        }
        true
    }
}

/// The finite field `F_{p^m}`, with `F_{p^m} = F_p[g]/(modulus)` for `m > 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteField {
    p: u64,
    m: usize,
    /// Monic irreducible of degree `m`, ascending coefficients; empty for `m == 1`.
    modulus: Vec<u64>,
}

impl FiniteField {
    pub fn new(p: u64, m: usize, modulus: Option<Vec<u64>>) -> Result<Self> {
        if !fp::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if m == 0 {
            return Err(Error::Unsupported("extension degree must be >= 1".into()));
        }
        if m == 1 {
            return Ok(FiniteField {
                p,
                m,
                modulus: Vec::new(),
            });
        }
        let modulus = match modulus {
            Some(mut q) => {
                while q.last() == Some(&0) {
                    q.pop();
                }
                for c in q.iter_mut() {
                    *c %= p;
                }
                if q.len() != m + 1 || q[m] != 1 {
                    return Err(Error::Unsupported(format!(
                        "modulus must be monic of degree {m}"
                    )));
                }
                if !poly_irreducible(&q, p) {
                    return Err(Error::ReducibleModulus { p, degree: m });
                }
                q
            }
            None => default_modulus(p, m),
        };
        Ok(FiniteField { p, m, modulus })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Field size `p^m`.
    pub fn order(&self) -> u64 {
        self.p.checked_pow(self.m as u32).expect("field order overflow")
    }

    pub fn zero(&self) -> FF {
        smallvec![0; self.m]
    }

    pub fn one(&self) -> FF {
        let mut v = self.zero();
        v[0] = 1 % self.p;
        v
    }

    pub fn from_u64(&self, c: u64) -> FF {
        let mut v = self.zero();
        v[0] = c % self.p;
        v
    }

    pub fn from_i64(&self, c: i64) -> FF {
        let r = c.rem_euclid(self.p as i64) as u64;
        self.from_u64(r)
    }

    /// The generator `g` of the extension (errors for the prime field).
    pub fn generator(&self) -> Result<FF> {
        if self.m == 1 {
            return Err(Error::Unsupported(
                "the prime field has no extension generator g".into(),
            ));
        }
        let mut v = self.zero();
        v[1] = 1;
        Ok(v)
    }

    pub fn is_zero(&self, a: &FF) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &FF, b: &FF) -> FF {
        a.iter()
            .zip(b.iter())
            .map(|(&x, &y)| fp::add(x, y, self.p))
            .collect()
    }

    pub fn sub(&self, a: &FF, b: &FF) -> FF {
        a.iter()
            .zip(b.iter())
            .map(|(&x, &y)| fp::sub(x, y, self.p))
            .collect()
    }

    pub fn neg(&self, a: &FF) -> FF {
        a.iter().map(|&x| fp::neg(x, self.p)).collect()
    }

    pub fn mul(&self, a: &FF, b: &FF) -> FF {
        if self.m == 1 {
            return smallvec![fp::mul(a[0], b[0], self.p)];
        }
        // Schoolbook convolution followed by reduction modulo the defining polynomial.
        let mut prod = vec![0u64; 2 * self.m - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = fp::add(prod[i + j], fp::mul(x, y, self.p), self.p);
            }
        }
        for i in (self.m..prod.len()).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for k in 0..self.m {
                let t = fp::mul(c, self.modulus[k], self.p);
                prod[i - self.m + k] = fp::sub(prod[i - self.m + k], t, self.p);
            }
        }
        prod.truncate(self.m);
        prod.into_iter().collect()
    }

    pub fn pow(&self, a: &FF, mut e: u64) -> FF {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &FF) -> Result<FF> {
        if self.is_zero(a) {
            return Err(Error::DivisionByZero);
        }
        // a^(q-2) = a^(-1) in F_q.
        Ok(self.pow(a, self.order() - 2))
    }

    pub fn frobenius(&self, a: &FF) -> FF {
        self.pow(a, self.p)
    }

    /// The inverse of `x -> x^p`; unique since Frobenius is bijective on a finite field.
    pub fn frobenius_inverse(&self, a: &FF) -> FF {
        // x^(p^(m-1)) inverts x -> x^p because x^(p^m) = x.
        let mut v = a.clone();
        for _ in 0..self.m - 1 {
            v = self.frobenius(&v);
        }
        v
    }

    /// Enumerates all `p^m` elements in a fixed (base-`p` digit) order.
    pub fn elements(&self) -> impl Iterator<Item = FF> + '_ {
        (0..self.order()).map(move |idx| self.decode(idx))
    }

    pub fn decode(&self, mut idx: u64) -> FF {
        let mut v = self.zero();
        for c in v.iter_mut() {
            *c = idx % self.p;
            idx /= self.p;
        }
        v
    }

    pub fn encode(&self, a: &FF) -> u64 {
        let mut idx = 0u64;
        for &c in a.iter().rev() {
            idx = idx * self.p + c;
        }
        idx
    }

    pub fn fmt_elem(&self, a: &FF) -> String {
        if self.m == 1 || a.iter().skip(1).all(|&c| c == 0) {
            return a[0].to_string();
        }
        let mut terms = Vec::new();
        for (i, &c) in a.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let t = match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "g".into(),
                (1, c) => format!("{c}*g"),
                (i, 1) => format!("g^{i}"),
                (i, c) => format!("{c}*g^{i}"),
            };
            terms.push(t);
        }
        terms.join(" + ")
    }
}

/// Smallest monic irreducible of degree `m` over `F_p` in lexicographic
/// coefficient order (used when no modulus is supplied).
fn default_modulus(p: u64, m: usize) -> Vec<u64> {
    let total = p.pow(m as u32);
    for idx in 0..total {
        let mut q = vec![0u64; m + 1];
        let mut k = idx;
        for c in q.iter_mut().take(m) {
            *c = k % p;
            k /= p;
        }
        q[m] = 1;
        if poly_irreducible(&q, p) {
            return q;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over F_p")
}

/// Irreducibility over `F_p` by trial division against all monic polynomials
/// of degree up to `deg/2` (desk-scale degrees only).
fn poly_irreducible(q: &[u64], p: u64) -> bool {
    let deg = q.len() - 1;
    if deg == 0 {
        return false;
    }
    if deg == 1 {
        return true;
    }
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for idx in 0..count {
            let mut f = vec![0u64; d + 1];
            let mut k = idx;
            for c in f.iter_mut().take(d) {
                *c = k % p;
                k /= p;
            }
            f[d] = 1;
            if poly_rem_is_zero(q, &f, p) {
                return false;
            }
        }
    }
    true
}

fn poly_rem_is_zero(num: &[u64], den: &[u64], p: u64) -> bool {
    let mut r: Vec<u64> = num.to_vec();
    let dd = den.len() - 1;
    while r.len() > dd {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dd;
        if lead != 0 {
            for (k, &c) in den.iter().enumerate() {
                r[shift + k] = fp::sub(r[shift + k], fp::mul(lead, c, p), p);
            }
        }
        r.pop();
        while r.len() > dd && r.last() == Some(&0) {
            r.pop();
        }
    }
    r.iter().all(|&c| c == 0)
}

/// Name of the transcendental parameter of a parametric field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Param {
    /// Deformation parameter `t`.
    T,
    /// Search parameter `a` (exactness obstructions).
    A,
}

impl Param {
    pub fn symbol(self) -> char {
        match self {
            Param::T => 't',
            Param::A => 'a',
        }
    }

    pub fn from_symbol(c: char) -> Option<Param> {
        match c {
            't' => Some(Param::T),
            'a' => Some(Param::A),
            _ => None,
        }
    }
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct FieldInner {
    fin: FiniteField,
    param: Option<Param>,
}

/// A coefficient field: `F_{p^m}` or `F_{p^m}(t)`. Cheap to clone and share.
#[derive(Clone)]
pub struct Field(Arc<FieldInner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Field {}

impl Hash for Field {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.hash(state);
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl Field {
    pub fn prime(p: u64) -> Result<Field> {
        Field::finite(p, 1, None)
    }

    pub fn finite(p: u64, m: usize, modulus: Option<Vec<u64>>) -> Result<Field> {
        Ok(Field(Arc::new(FieldInner {
            fin: FiniteField::new(p, m, modulus)?,
            param: None,
        })))
    }

    /// The fraction field `F_{p^m}(param)`; one transcendental only.
    pub fn parametric(p: u64, m: usize, modulus: Option<Vec<u64>>, param: Param) -> Result<Field> {
        Ok(Field(Arc::new(FieldInner {
            fin: FiniteField::new(p, m, modulus)?,
            param: Some(param),
        })))
    }

    /// Adds a transcendental to a finite field.
    pub fn with_param(&self, param: Param) -> Result<Field> {
        if self.is_parametric() {
            return Err(Error::NestedParameter);
        }
        Ok(Field(Arc::new(FieldInner {
            fin: self.0.fin.clone(),
            param: Some(param),
        })))
    }

    /// The underlying finite field of a parametric field (identity otherwise).
    pub fn base(&self) -> Field {
        if !self.is_parametric() {
            return self.clone();
        }
        Field(Arc::new(FieldInner {
            fin: self.0.fin.clone(),
            param: None,
        }))
    }

    pub fn p(&self) -> u64 {
        self.0.fin.p
    }

    pub fn m(&self) -> usize {
        self.0.fin.m
    }

    pub fn finite_field(&self) -> &FiniteField {
        &self.0.fin
    }

    pub fn is_parametric(&self) -> bool {
        self.0.param.is_some()
    }

    pub fn param(&self) -> Option<Param> {
        self.0.param
    }

    pub fn name(&self) -> String {
        let q = self.0.fin.order();
        match self.0.param {
            None => format!("F{q}"),
            Some(pr) => format!("F{q}({})", pr.symbol()),
        }
    }

    pub fn zero(&self) -> FieldValue {
        FieldValue {
            field: self.clone(),
            repr: self.repr_from_ff(self.0.fin.zero()),
        }
    }

    pub fn one(&self) -> FieldValue {
        FieldValue {
            field: self.clone(),
            repr: self.repr_from_ff(self.0.fin.one()),
        }
    }

    pub fn from_int(&self, c: i64) -> FieldValue {
        FieldValue {
            field: self.clone(),
            repr: self.repr_from_ff(self.0.fin.from_i64(c)),
        }
    }

    /// Embeds an `F_{p^m}` element (constant in the parametric case).
    pub fn constant(&self, a: FF) -> FieldValue {
        FieldValue {
            field: self.clone(),
            repr: self.repr_from_ff(a),
        }
    }

    pub fn generator(&self) -> Result<FieldValue> {
        let g = self.0.fin.generator()?;
        Ok(self.constant(g))
    }

    /// The transcendental parameter as a field value.
    pub fn parameter(&self) -> Result<FieldValue> {
        if !self.is_parametric() {
            return Err(Error::Unsupported(
                "field has no transcendental parameter".into(),
            ));
        }
        let fin = &self.0.fin;
        Ok(FieldValue {
            field: self.clone(),
            repr: Repr::Par(vec![fin.zero(), fin.one()], vec![fin.one()]),
        })
    }

    /// All elements of a finite field; errors for parametric fields.
    pub fn elements(&self) -> Result<Vec<FieldValue>> {
        if self.is_parametric() {
            return Err(Error::Unsupported(
                "cannot enumerate a parametric field".into(),
            ));
        }
        Ok(self.0.fin.elements().map(|a| self.constant(a)).collect())
    }

    fn repr_from_ff(&self, a: FF) -> Repr {
        if self.is_parametric() {
            let fin = &self.0.fin;
            if fin.is_zero(&a) {
                Repr::Par(Vec::new(), vec![fin.one()])
            } else {
                Repr::Par(vec![a], vec![fin.one()])
            }
        } else {
            Repr::Fin(a)
        }
    }

    // ----- polynomial arithmetic in the parameter over F_{p^m} -----

    pub(crate) fn tp_trim(&self, v: &mut TPoly) {
        while v.last().is_some_and(|c| self.0.fin.is_zero(c)) {
            v.pop();
        }
    }

    pub(crate) fn tp_add(&self, a: &TPoly, b: &TPoly) -> TPoly {
        let fin = &self.0.fin;
        let mut out = vec![fin.zero(); a.len().max(b.len())];
        for (i, c) in a.iter().enumerate() {
            out[i] = c.clone();
        }
        for (i, c) in b.iter().enumerate() {
            out[i] = fin.add(&out[i], c);
        }
        self.tp_trim(&mut out);
        out
    }

    pub(crate) fn tp_neg(&self, a: &TPoly) -> TPoly {
        a.iter().map(|c| self.0.fin.neg(c)).collect()
    }

    pub(crate) fn tp_mul(&self, a: &TPoly, b: &TPoly) -> TPoly {
        let fin = &self.0.fin;
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![fin.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if fin.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                let t = fin.mul(x, y);
                out[i + j] = fin.add(&out[i + j], &t);
            }
        }
        self.tp_trim(&mut out);
        out
    }

    /// Division with remainder; `b` must be nonzero.
    pub(crate) fn tp_divrem(&self, a: &TPoly, b: &TPoly) -> (TPoly, TPoly) {
        let fin = &self.0.fin;
        assert!(!b.is_empty(), "division by the zero polynomial");
        let db = b.len() - 1;
        let lead_inv = fin.inv(&b[db]).unwrap();
        let mut rem = a.clone();
        let mut quo = if a.len() > db {
            vec![fin.zero(); a.len() - db]
        } else {
            Vec::new()
        };
        while rem.len() > db {
            let dr = rem.len() - 1;
            let c = fin.mul(&rem[dr], &lead_inv);
            if !fin.is_zero(&c) {
                quo[dr - db] = c.clone();
                for (k, bc) in b.iter().enumerate() {
                    let t = fin.mul(&c, bc);
                    rem[dr - db + k] = fin.sub(&rem[dr - db + k], &t);
                }
            }
            rem.pop();
            self.tp_trim(&mut rem);
            if rem.len() <= db {
                break;
            }
        }
        self.tp_trim(&mut quo);
        (quo, rem)
    }

    pub(crate) fn tp_gcd(&self, a: &TPoly, b: &TPoly) -> TPoly {
        let mut x = a.clone();
        let mut y = b.clone();
        while !y.is_empty() {
            let (_, r) = self.tp_divrem(&x, &y);
            x = y;
            y = r;
        }
        self.tp_monic(&x)
    }

    pub(crate) fn tp_monic(&self, a: &TPoly) -> TPoly {
        let fin = &self.0.fin;
        match a.last() {
            None => Vec::new(),
            Some(l) if *l == fin.one() => a.clone(),
            Some(l) => {
                let li = fin.inv(l).unwrap();
                a.iter().map(|c| fin.mul(c, &li)).collect()
            }
        }
    }

    pub(crate) fn tp_eval(&self, a: &TPoly, at: &FF) -> FF {
        let fin = &self.0.fin;
        let mut acc = fin.zero();
        for c in a.iter().rev() {
            acc = fin.mul(&acc, at);
            acc = fin.add(&acc, c);
        }
        acc
    }

    /// `a^(1/p)` if it exists: every exponent with a nonzero coefficient must
    /// be divisible by p (the coefficient roots always exist in `F_{p^m}`).
    pub(crate) fn tp_pth_root(&self, a: &TPoly) -> Option<TPoly> {
        let fin = &self.0.fin;
        let p = self.p() as usize;
        for (i, c) in a.iter().enumerate() {
            if i % p != 0 && !fin.is_zero(c) {
                return None;
            }
        }
        let mut out = Vec::with_capacity(a.len() / p + 1);
        let mut i = 0;
        while i < a.len() {
            out.push(fin.frobenius_inverse(&a[i]));
            i += p;
        }
        self.tp_trim(&mut out);
        Some(out)
    }

    pub(crate) fn tp_frobenius(&self, a: &TPoly) -> TPoly {
        let fin = &self.0.fin;
        let p = self.p() as usize;
        if a.is_empty() {
            return Vec::new();
        }
        let mut out = vec![fin.zero(); (a.len() - 1) * p + 1];
        for (i, c) in a.iter().enumerate() {
            out[i * p] = fin.frobenius(c);
        }
        out
    }

    pub(crate) fn fmt_tpoly(&self, a: &TPoly) -> String {
        let fin = &self.0.fin;
        let sym = self.param().map(|q| q.symbol()).unwrap_or('t');
        if a.is_empty() {
            return "0".into();
        }
        let mut terms = Vec::new();
        for (i, c) in a.iter().enumerate().rev() {
            if fin.is_zero(c) {
                continue;
            }
            let cs = fin.fmt_elem(c);
            let needs_paren = cs.contains('+') || cs.contains(' ');
            let cs = if needs_paren { format!("({cs})") } else { cs };
            let t = match i {
                0 => cs,
                1 if cs == "1" => sym.to_string(),
                1 => format!("{cs}*{sym}"),
                _ if cs == "1" => format!("{sym}^{i}"),
                _ => format!("{cs}*{sym}^{i}"),
            };
            terms.push(t);
        }
        terms.join(" + ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Repr {
    /// Element of `F_{p^m}`.
    Fin(FF),
    /// `num/den` in the parameter, coprime, monic denominator.
    Par(TPoly, TPoly),
}

/// An element of a coefficient [`Field`], in canonical form.
#[derive(Clone)]
pub struct FieldValue {
    field: Field,
    repr: Repr,
}

impl PartialEq for FieldValue {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.repr == other.repr
    }
}

impl Eq for FieldValue {}

impl Hash for FieldValue {
    fn hash<H: Hasher>(&self, state: &mut H) {
        // Field equality is part of Eq; hashing the representation alone keeps
        // hashing cheap and stays consistent with Eq.
        self.repr.hash(state);
    }
}

impl PartialOrd for FieldValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FieldValue {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert!(self.field == other.field);
        match (&self.repr, &other.repr) {
            (Repr::Fin(a), Repr::Fin(b)) => a.cmp(b),
            (Repr::Par(an, ad), Repr::Par(bn, bd)) => {
                let key = |n: &TPoly, d: &TPoly| (d.len(), n.len());
                key(an, ad)
                    .cmp(&key(bn, bd))
                    .then_with(|| ad.cmp(bd))
                    .then_with(|| an.cmp(bn))
            }
            (Repr::Fin(_), Repr::Par(..)) => Ordering::Less,
            (Repr::Par(..), Repr::Fin(_)) => Ordering::Greater,
        }
    }
}

impl fmt::Debug for FieldValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for FieldValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Fin(a) => write!(f, "{}", self.field.finite_field().fmt_elem(a)),
            Repr::Par(num, den) => {
                if num.is_empty() {
                    return write!(f, "0");
                }
                let ns = self.field.fmt_tpoly(num);
                if den.len() == 1 {
                    return write!(f, "{ns}");
                }
                let ds = self.field.fmt_tpoly(den);
                let ns = if num.iter().filter(|c| !self.field.finite_field().is_zero(c)).count() > 1
                {
                    format!("({ns})")
                } else {
                    ns
                };
                let ds = if den.iter().filter(|c| !self.field.finite_field().is_zero(c)).count() > 1
                {
                    format!("({ds})")
                } else {
                    ds
                };
                write!(f, "{ns}/{ds}")
            }
        }
    }
}

impl FieldValue {
    pub fn field(&self) -> &Field {
        &self.field
    }

    fn par(field: Field, mut num: TPoly, mut den: TPoly) -> FieldValue {
        field.tp_trim(&mut num);
        field.tp_trim(&mut den);
        assert!(!den.is_empty(), "zero denominator in parametric value");
        if num.is_empty() {
            return FieldValue {
                repr: Repr::Par(Vec::new(), vec![field.finite_field().one()]),
                field,
            };
        }
        // Strip the shared power of the parameter before the full gcd; most
        // denominators in practice are parameter powers, and this keeps them
        // out of the Euclid loop entirely.
        let fin = field.finite_field();
        let vn = num.iter().position(|c| !fin.is_zero(c)).unwrap();
        let vd = den.iter().position(|c| !fin.is_zero(c)).unwrap();
        let v = vn.min(vd);
        if v > 0 {
            num.drain(..v);
            den.drain(..v);
        }
        if den.len() > 1 {
            let g = field.tp_gcd(&num, &den);
            if g.len() > 1 {
                num = field.tp_divrem(&num, &g).0;
                den = field.tp_divrem(&den, &g).0;
            }
        }
        let lead = den.last().unwrap().clone();
        if lead != field.finite_field().one() {
            let li = field.finite_field().inv(&lead).unwrap();
            num = num
                .iter()
                .map(|c| field.finite_field().mul(c, &li))
                .collect();
            den = den
                .iter()
                .map(|c| field.finite_field().mul(c, &li))
                .collect();
        }
        FieldValue {
            repr: Repr::Par(num, den),
            field,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Fin(a) => self.field.finite_field().is_zero(a),
            Repr::Par(num, _) => num.is_empty(),
        }
    }

    pub fn is_one(&self) -> bool {
        *self == self.field.one()
    }

    fn assert_same_field(&self, other: &FieldValue) {
        assert!(
            self.field == other.field,
            "operands belong to different coefficient fields"
        );
    }

    pub fn add(&self, other: &FieldValue) -> FieldValue {
        self.assert_same_field(other);
        match (&self.repr, &other.repr) {
            (Repr::Fin(a), Repr::Fin(b)) => self.field.constant(self.field.finite_field().add(a, b)),
            (Repr::Par(an, ad), Repr::Par(bn, bd)) => {
                let f = &self.field;
                let num = f.tp_add(&f.tp_mul(an, bd), &f.tp_mul(bn, ad));
                let den = f.tp_mul(ad, bd);
                FieldValue::par(f.clone(), num, den)
            }
            _ => unreachable!("mixed representations within one field"),
        }
    }

    pub fn sub(&self, other: &FieldValue) -> FieldValue {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> FieldValue {
        match &self.repr {
            Repr::Fin(a) => self.field.constant(self.field.finite_field().neg(a)),
            Repr::Par(num, den) => FieldValue {
                field: self.field.clone(),
                repr: Repr::Par(self.field.tp_neg(num), den.clone()),
            },
        }
    }

    pub fn mul(&self, other: &FieldValue) -> FieldValue {
        self.assert_same_field(other);
        match (&self.repr, &other.repr) {
            (Repr::Fin(a), Repr::Fin(b)) => self.field.constant(self.field.finite_field().mul(a, b)),
            (Repr::Par(an, ad), Repr::Par(bn, bd)) => {
                let f = &self.field;
                FieldValue::par(f.clone(), f.tp_mul(an, bn), f.tp_mul(ad, bd))
            }
            _ => unreachable!("mixed representations within one field"),
        }
    }

    pub fn inv(&self) -> Result<FieldValue> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match &self.repr {
            Repr::Fin(a) => self.field.constant(self.field.finite_field().inv(a)?),
            Repr::Par(num, den) => FieldValue::par(self.field.clone(), den.clone(), num.clone()),
        })
    }

    pub fn div(&self, other: &FieldValue) -> Result<FieldValue> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: u64) -> FieldValue {
        let mut acc = self.field.one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// `x -> x^p`; bijective on finite fields, injective on parametric ones.
    pub fn frobenius(&self) -> FieldValue {
        match &self.repr {
            Repr::Fin(a) => self.field.constant(self.field.finite_field().frobenius(a)),
            Repr::Par(num, den) => FieldValue {
                field: self.field.clone(),
                repr: Repr::Par(self.field.tp_frobenius(num), self.field.tp_frobenius(den)),
            },
        }
    }

    /// The unique `b` with `b^p = a` over a finite field; errors over a
    /// parametric field where Frobenius is not surjective.
    pub fn frobenius_inverse(&self) -> Result<FieldValue> {
        match &self.repr {
            Repr::Fin(a) => Ok(self
                .field
                .constant(self.field.finite_field().frobenius_inverse(a))),
            Repr::Par(..) => Err(Error::ParametricFrobenius),
        }
    }

    /// `b` with `b^p = a` when one exists in the field. Always succeeds over a
    /// finite field; over `F_q(t)` succeeds exactly when numerator and
    /// denominator are p-th powers as polynomials in the parameter.
    pub fn pth_root(&self) -> Option<FieldValue> {
        match &self.repr {
            Repr::Fin(a) => Some(
                self.field
                    .constant(self.field.finite_field().frobenius_inverse(a)),
            ),
            Repr::Par(num, den) => {
                let rn = self.field.tp_pth_root(num)?;
                let rd = self.field.tp_pth_root(den)?;
                Some(FieldValue {
                    field: self.field.clone(),
                    repr: Repr::Par(rn, rd),
                })
            }
        }
    }

    /// Substitutes the parameter by `value` (an element of the base finite
    /// field); errors if a denominator vanishes there.
    pub fn specialize(&self, value: &FieldValue) -> Result<FieldValue> {
        match &self.repr {
            Repr::Fin(_) => Ok(self.clone()),
            Repr::Par(num, den) => {
                let base = self.field.base();
                let at = match &value.repr {
                    Repr::Fin(a) => a.clone(),
                    Repr::Par(..) => {
                        return Err(Error::Unsupported(
                            "specialization value must be a finite-field element".into(),
                        ))
                    }
                };
                let fin = self.field.finite_field();
                let d = self.field.tp_eval(den, &at);
                if fin.is_zero(&d) {
                    return Err(Error::SpecializationPole);
                }
                let n = self.field.tp_eval(num, &at);
                Ok(base.constant(fin.mul(&n, &fin.inv(&d)?)))
            }
        }
    }

    /// The constant value of a parametric element, when it is constant.
    pub fn as_base_constant(&self) -> Option<FieldValue> {
        match &self.repr {
            Repr::Fin(_) => Some(self.clone()),
            Repr::Par(num, den) => {
                if den.len() == 1 && num.len() <= 1 {
                    let fin = self.field.finite_field();
                    let c = num.first().cloned().unwrap_or_else(|| fin.zero());
                    Some(self.field.base().constant(c))
                } else {
                    None
                }
            }
        }
    }

    /// t-adic valuation data for clustering: `Some(limit)` if the value has a
    /// finite limit as the parameter goes to 0, `None` if it escapes to
    /// infinity.
    pub fn limit_at_param_zero(&self) -> Option<FieldValue> {
        match &self.repr {
            Repr::Fin(_) => Some(self.clone()),
            Repr::Par(num, den) => {
                let fin = self.field.finite_field();
                let zero = fin.zero();
                let d0 = den.first().cloned().unwrap_or_else(|| zero.clone());
                if fin.is_zero(&d0) {
                    let n0 = num.first().cloned().unwrap_or(zero);
                    if fin.is_zero(&n0) {
                        // num and den share the root t=0 only if not coprime.
                        unreachable!("canonical form is coprime");
                    }
                    None
                } else {
                    let n0 = num.first().cloned().unwrap_or(zero);
                    Some(self.field.base().constant(fin.mul(&n0, &fin.inv(&d0).unwrap())))
                }
            }
        }
    }

    /// Numerator and denominator polynomials in the parameter (parametric
    /// values only).
    pub(crate) fn ratio_parts(&self) -> Option<(&TPoly, &TPoly)> {
        match &self.repr {
            Repr::Par(num, den) => Some((num, den)),
            Repr::Fin(_) => None,
        }
    }

    /// Reinterprets a finite-field value inside a parametric field over the
    /// same finite field.
    pub fn lift_to(&self, field: &Field) -> Result<FieldValue> {
        if &self.field == field {
            return Ok(self.clone());
        }
        if self.field == field.base() {
            if let Repr::Fin(a) = &self.repr {
                return Ok(field.constant(a.clone()));
            }
        }
        Err(Error::FieldMismatch)
    }
}

/// The four basic operations as a fallible call (the CLI-facing surface).
pub fn field_arith(a: &FieldValue, b: &FieldValue, op: &str) -> Result<FieldValue> {
    if a.field() != b.field() {
        return Err(Error::FieldMismatch);
    }
    match op {
        "add" => Ok(a.add(b)),
        "sub" => Ok(a.sub(b)),
        "mul" => Ok(a.mul(b)),
        "div" => a.div(b),
        other => Err(Error::Unsupported(format!("unknown operation `{other}`"))),
    }
}

impl std::ops::Add for &FieldValue {
    type Output = FieldValue;
    fn add(self, rhs: &FieldValue) -> FieldValue {
        FieldValue::add(self, rhs)
    }
}

impl std::ops::Sub for &FieldValue {
    type Output = FieldValue;
    fn sub(self, rhs: &FieldValue) -> FieldValue {
        FieldValue::sub(self, rhs)
    }
}

impl std::ops::Mul for &FieldValue {
    type Output = FieldValue;
    fn mul(self, rhs: &FieldValue) -> FieldValue {
        FieldValue::mul(self, rhs)
    }
}

impl std::ops::Neg for &FieldValue {
    type Output = FieldValue;
    fn neg(self) -> FieldValue {
        FieldValue::neg(self)
    }
}
