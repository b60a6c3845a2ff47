//! Length-n Witt vectors over a rational-function field: the additive group,
//! Frobenius, Verschiebung, the isogeny `℘ = F - id`, and cover-equality
//! testing. Ring multiplication of Witt vectors is intentionally absent; the
//! theory here only needs the additive structure.

pub mod sumpoly;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::algebra::field::{Field, FieldValue};
use crate::algebra::ratfunc::RatFunc;
use crate::error::{Error, Result};
use sumpoly::{sum_poly_table, SumPolyTable, TermList};

/// An element of `W_n(K(x))`: `n` rational functions over one coefficient field.
#[derive(Clone, PartialEq, Eq)]
pub struct WittVector {
    prime: u64,
    entries: Vec<RatFunc>,
}

impl WittVector {
    pub fn new(prime: u64, entries: Vec<RatFunc>) -> Result<WittVector> {
        if entries.is_empty() {
            return Err(Error::ShapeMismatch("Witt length must be >= 1".into()));
        }
        let field = entries[0].field().clone();
        if field.p() != prime {
            return Err(Error::ShapeMismatch(format!(
                "field characteristic {} does not match prime {prime}",
                field.p()
            )));
        }
        if entries.iter().any(|e| e.field() != &field) {
            return Err(Error::FieldMismatch);
        }
        Ok(WittVector { prime, entries })
    }

    pub fn zero(prime: u64, n: usize, field: &Field) -> WittVector {
        WittVector {
            prime,
            entries: vec![RatFunc::zero(field); n],
        }
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn field(&self) -> &Field {
        self.entries[0].field()
    }

    pub fn entries(&self) -> &[RatFunc] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<RatFunc> {
        self.entries
    }

    pub fn entry(&self, i: usize) -> &RatFunc {
        &self.entries[i]
    }

    /// Replaces one entry (used by the reduction loop, which rewrites a
    /// single level at a time).
    pub fn with_entry(&self, i: usize, f: RatFunc) -> WittVector {
        let mut entries = self.entries.clone();
        entries[i] = f;
        WittVector {
            prime: self.prime,
            entries,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// First `i` entries.
    pub fn truncate(&self, i: usize) -> Result<WittVector> {
        if i == 0 || i > self.len() {
            return Err(Error::ShapeMismatch(format!(
                "cannot truncate length {} to {i}",
                self.len()
            )));
        }
        Ok(WittVector {
            prime: self.prime,
            entries: self.entries[..i].to_vec(),
        })
    }

    fn table(&self) -> Result<Arc<SumPolyTable>> {
        sum_poly_table(self.prime, self.len())
    }

    fn check_shape(&self, other: &WittVector) -> Result<()> {
        if self.prime != other.prime || self.len() != other.len() {
            return Err(Error::ShapeMismatch(format!(
                "p={}, n={} vs p={}, n={}",
                self.prime,
                self.len(),
                other.prime,
                other.len()
            )));
        }
        if self.field() != other.field() {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &WittVector) -> Result<WittVector> {
        self.check_shape(other)?;
        let table = self.table()?;
        let vars: Vec<&RatFunc> = self
            .entries
            .iter()
            .chain(other.entries.iter())
            .collect();
        let mut cache = PowerCache::new(&vars);
        let entries = table
            .add
            .iter()
            .map(|terms| eval_terms(terms, &mut cache, self.field()))
            .collect();
        Ok(WittVector {
            prime: self.prime,
            entries,
        })
    }

    pub fn neg(&self) -> Result<WittVector> {
        let table = self.table()?;
        let vars: Vec<&RatFunc> = self.entries.iter().collect();
        let mut cache = PowerCache::new(&vars);
        let entries = table
            .neg
            .iter()
            .map(|terms| eval_terms(terms, &mut cache, self.field()))
            .collect();
        Ok(WittVector {
            prime: self.prime,
            entries,
        })
    }

    pub fn sub(&self, other: &WittVector) -> Result<WittVector> {
        self.add(&other.neg()?)
    }

    /// Multiplication by an integer (the m-fold sum, m taken mod p^n).
    pub fn int_mul(&self, m: i64) -> Result<WittVector> {
        let order = (self.prime as i64)
            .checked_pow(self.len() as u32)
            .ok_or_else(|| Error::ShapeMismatch("p^n overflows".into()))?;
        let mut m = m.rem_euclid(order) as u64;
        let mut acc = WittVector::zero(self.prime, self.len(), self.field());
        let mut base = self.clone();
        while m > 0 {
            if m & 1 == 1 {
                acc = acc.add(&base)?;
            }
            m >>= 1;
            if m > 0 {
                base = base.add(&base)?;
            }
        }
        Ok(acc)
    }

    /// Entrywise `x -> x^p` on coefficients and variable.
    pub fn frobenius(&self) -> WittVector {
        WittVector {
            prime: self.prime,
            entries: self.entries.iter().map(|e| e.frobenius()).collect(),
        }
    }

    /// Shift `(a_0,..,a_{n-1}) -> (0, a_0, .., a_{n-2})`.
    pub fn verschiebung(&self) -> WittVector {
        let mut entries = vec![RatFunc::zero(self.field())];
        entries.extend_from_slice(&self.entries[..self.len() - 1]);
        WittVector {
            prime: self.prime,
            entries,
        }
    }

    /// `℘(y) = F(y) - y`, the additive isogeny whose cokernel classifies
    /// cyclic p-power extensions.
    pub fn asw_isogeny(&self) -> Result<WittVector> {
        self.frobenius().sub(self)
    }
}

impl fmt::Debug for WittVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

struct PowerCache<'a> {
    vars: &'a [&'a RatFunc],
    powers: Vec<BTreeMap<u32, RatFunc>>,
}

impl<'a> PowerCache<'a> {
    fn new(vars: &'a [&'a RatFunc]) -> PowerCache<'a> {
        PowerCache {
            vars,
            powers: vec![BTreeMap::new(); vars.len()],
        }
    }

    fn power(&mut self, var: usize, e: u32) -> RatFunc {
        if e == 1 {
            return self.vars[var].clone();
        }
        if let Some(v) = self.powers[var].get(&e) {
            return v.clone();
        }
        let v = self.vars[var].pow(e as u64);
        self.powers[var].insert(e, v.clone());
        v
    }
}

fn eval_terms(terms: &TermList, cache: &mut PowerCache<'_>, field: &Field) -> RatFunc {
    let mut acc = RatFunc::zero(field);
    for (mono, c) in terms {
        let mut term = RatFunc::constant(field.from_int(*c as i64));
        for (v, e) in mono.iter().enumerate() {
            if *e == 0 {
                continue;
            }
            if term.is_zero() {
                break;
            }
            term = term.mul(&cache.power(v, *e));
        }
        acc = acc.add(&term);
    }
    acc
}

/// Units of Z/p^n (the scalars acting on covers without changing them).
pub fn units_mod_pn(p: u64, n: usize) -> Vec<u64> {
    let order = p.pow(n as u32);
    (1..order).filter(|m| m % p != 0).collect()
}

/// Whether two Witt vectors define the same cyclic cover: true iff
/// `u - m*v` is trivial for some unit m, where trivial means the reduced
/// difference is a constant vector lying in `℘(W_n)` of the constant field.
///
/// Restricted to finite coefficient fields (the constant-class membership is
/// decided by enumeration).
pub fn same_cover(u: &WittVector, v: &WittVector) -> Result<bool> {
    u.check_shape(v)?;
    if u.field().is_parametric() {
        return Err(Error::Unsupported(
            "cover equality requires a finite coefficient field".into(),
        ));
    }
    let n = u.len();
    let p = u.prime();
    let field = u.field().clone();
    let q = field.finite_field().order();
    let count = q.checked_pow(n as u32).filter(|&c| c <= 1 << 20).ok_or_else(|| {
        Error::Unsupported("constant field too large for cover-equality enumeration".into())
    })?;

    let ru = crate::ramify::reduce(u)?.reduced;
    let rv = crate::ramify::reduce(v)?.reduced;
    if ru.entry(0).is_zero() || rv.entry(0).is_zero() {
        return Err(Error::OrderDrop);
    }

    // Image of ℘ on constant vectors, by enumeration.
    let mut image: std::collections::HashSet<Vec<FieldValue>> = std::collections::HashSet::new();
    for idx in 0..count {
        let mut rem = idx;
        let mut entries = Vec::with_capacity(n);
        for _ in 0..n {
            let e = field.finite_field().decode(rem % q);
            rem /= q;
            entries.push(RatFunc::constant(field.constant(e)));
        }
        let w = WittVector::new(p, entries)?;
        let img = w.asw_isogeny()?;
        let consts: Vec<FieldValue> = img
            .entries()
            .iter()
            .map(|e| e.as_constant().expect("isogeny of constants is constant"))
            .collect();
        image.insert(consts);
    }

    for m in units_mod_pn(p, n) {
        let diff = ru.sub(&rv.int_mul(m as i64)?)?;
        let red = crate::ramify::reduce(&diff)?.reduced;
        let consts: Option<Vec<FieldValue>> =
            red.entries().iter().map(|e| e.as_constant()).collect();
        if let Some(c) = consts {
            if image.contains(&c) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_ratfunc;

    fn wv(p: u64, field: &Field, entries: &[&str]) -> WittVector {
        let entries = entries
            .iter()
            .map(|s| parse_ratfunc(s, field).unwrap())
            .collect();
        WittVector::new(p, entries).unwrap()
    }

    #[test]
    fn additive_identity_and_inverse() {
        let f2 = Field::prime(2).unwrap();
        let u = wv(2, &f2, &["x", "x^3 + 1"]);
        let zero = WittVector::zero(2, 2, &f2);
        assert_eq!(u.add(&zero).unwrap(), u);
        assert!(u.add(&u.neg().unwrap()).unwrap().is_zero());
    }

    #[test]
    fn neg_formula_p2() {
        // (a0, a1) + (a0, a0^2 + a1) = (0, 0) in characteristic 2.
        let f2 = Field::prime(2).unwrap();
        let u = wv(2, &f2, &["x", "0"]);
        let n = u.neg().unwrap();
        assert_eq!(n, wv(2, &f2, &["x", "x^2"]));
        // Hence (x,0) + (x,x^2) is the zero vector.
        assert!(u.add(&n).unwrap().is_zero());
    }

    #[test]
    fn isogeny_on_constants_vanishes() {
        let f3 = Field::prime(3).unwrap();
        let u = wv(3, &f3, &["2", "1", "2"]);
        assert!(u.asw_isogeny().unwrap().is_zero());
    }

    #[test]
    fn isogeny_example_p2() {
        // ℘(x, 0) = (x^2 + x, x^3 + x^2) over F_2.
        let f2 = Field::prime(2).unwrap();
        let u = wv(2, &f2, &["x", "0"]);
        let img = u.asw_isogeny().unwrap();
        assert_eq!(img, wv(2, &f2, &["x^2 + x", "x^3 + x^2"]));
    }

    #[test]
    fn int_mul_basics() {
        let f3 = Field::prime(3).unwrap();
        let u = wv(3, &f3, &["x", "x^2 + 1"]);
        assert_eq!(u.int_mul(1).unwrap(), u);
        assert!(u.int_mul(9).unwrap().is_zero());
        // m-fold sum agrees with the addition chain.
        let mut acc = WittVector::zero(3, 2, &f3);
        for _ in 0..5 {
            acc = acc.add(&u).unwrap();
        }
        assert_eq!(u.int_mul(5).unwrap(), acc);
    }

    #[test]
    fn verschiebung_frobenius_is_multiplication_by_p() {
        for p in [2u64, 3] {
            let field = Field::prime(p).unwrap();
            let u = wv(p, &field, &["x + 1", "x^2", "x^3 + x"]);
            let vf = u.frobenius().verschiebung();
            assert_eq!(vf, u.int_mul(p as i64).unwrap());
        }
    }

    #[test]
    fn isogeny_is_additive() {
        let f2 = Field::prime(2).unwrap();
        let u = wv(2, &f2, &["x", "x^3"]);
        let v = wv(2, &f2, &["x + 1", "x^2 + x"]);
        let lhs = u.add(&v).unwrap().asw_isogeny().unwrap();
        let rhs = u
            .asw_isogeny()
            .unwrap()
            .add(&v.asw_isogeny().unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let f2 = Field::prime(2).unwrap();
        let f3 = Field::prime(3).unwrap();
        let u = wv(2, &f2, &["x", "0"]);
        let v = wv(3, &f3, &["x", "0"]);
        assert!(matches!(u.add(&v), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn same_cover_orbit_and_isogeny_shift() {
        let f2 = Field::prime(2).unwrap();
        // n=1: 1/x and 1/x + x^2 + x differ by ℘(x).
        let u = wv(2, &f2, &["1/x"]);
        let v = wv(2, &f2, &["1/x + x^2 + x"]);
        assert!(same_cover(&u, &v).unwrap());
        assert!(same_cover(&u, &u).unwrap());
        // A genuinely different cover.
        let w = wv(2, &f2, &["1/(x-1)"]);
        assert!(!same_cover(&u, &w).unwrap());
    }

    #[test]
    fn same_cover_needs_a_finite_field() {
        let f2t = Field::parametric(2, 1, None, crate::algebra::Param::T).unwrap();
        let u = wv(2, &f2t, &["1/x"]);
        assert!(matches!(
            same_cover(&u, &u),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn same_cover_unit_orbit_n2() {
        let f5 = Field::prime(5).unwrap();
        let u = wv(5, &f5, &["1/x", "1/(x-1)^3"]);
        for m in units_mod_pn(5, 2) {
            let v = u.int_mul(m as i64).unwrap();
            assert!(same_cover(&u, &v).unwrap(), "unit {m} should fix the cover");
        }
    }
}
