//! Rational functions in `x` with split denominators.
//!
//! A [`RatFunc`] stores its denominator as a product of linear factors
//! `(x - r)^m`, so the pole set is always known exactly. This keeps partial
//! fractions, pole orders, and reduction arguments characteristic-safe: no
//! factorization over the coefficient field is ever needed once a value is
//! built, and the point at infinity is read off the numerator degree.

use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::field::{Field, FieldValue};
use crate::algebra::poly::Poly;
use crate::error::{Error, Result};

/// A point of the projective line over the coefficient field.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolePoint {
    Finite(FieldValue),
    Infinity,
}

impl fmt::Display for PolePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolePoint::Finite(v) => write!(f, "{v}"),
            PolePoint::Infinity => write!(f, "inf"),
        }
    }
}

/// Rational function `num / prod (x - r)^m` with `num` coprime to the
/// denominator. The polynomial part (including the pole at infinity) lives in
/// the numerator degree overshoot.
#[derive(Clone, PartialEq, Eq)]
pub struct RatFunc {
    field: Field,
    num: Poly,
    den: BTreeMap<FieldValue, u32>,
}

impl RatFunc {
    pub fn new(num: Poly, den: BTreeMap<FieldValue, u32>) -> RatFunc {
        let field = num.field().clone();
        let mut rf = RatFunc { field, num, den };
        rf.normalize();
        rf
    }

    pub fn zero(field: &Field) -> RatFunc {
        RatFunc {
            field: field.clone(),
            num: Poly::zero(field),
            den: BTreeMap::new(),
        }
    }

    pub fn one(field: &Field) -> RatFunc {
        RatFunc::from_poly(Poly::one(field))
    }

    pub fn constant(c: FieldValue) -> RatFunc {
        RatFunc::from_poly(Poly::constant(c))
    }

    pub fn from_poly(num: Poly) -> RatFunc {
        RatFunc {
            field: num.field().clone(),
            num,
            den: BTreeMap::new(),
        }
    }

    pub fn x(field: &Field) -> RatFunc {
        RatFunc::from_poly(Poly::x(field))
    }

    /// `c/(x-P)^order`, or `c*x^order` for the pole at infinity.
    pub fn pole_term(c: FieldValue, at: &PolePoint, order: u32) -> RatFunc {
        match at {
            PolePoint::Infinity => RatFunc::from_poly(Poly::monomial(c, order as usize)),
            PolePoint::Finite(r) => {
                let mut den = BTreeMap::new();
                if order > 0 {
                    den.insert(r.clone(), order);
                }
                RatFunc::new(Poly::constant(c), den)
            }
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den_factors(&self) -> &BTreeMap<FieldValue, u32> {
        &self.den
    }

    pub fn den_poly(&self) -> Poly {
        let mut d = Poly::one(&self.field);
        for (r, m) in &self.den {
            d = d.mul(&Poly::linear_from_root(r).pow(*m as u64));
        }
        d
    }

    pub fn den_degree(&self) -> usize {
        self.den.values().map(|&m| m as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Constant (pole-free, degree-0) values.
    pub fn as_constant(&self) -> Option<FieldValue> {
        if self.den.is_empty() && self.num.is_constant() {
            Some(self.num.coeff(0))
        } else {
            None
        }
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        let roots: Vec<FieldValue> = self.den.keys().cloned().collect();
        for r in roots {
            let lin = Poly::linear_from_root(&r);
            while self.den.get(&r).copied().unwrap_or(0) > 0 && self.num.eval(&r).is_zero() {
                self.num = self.num.div_exact(&lin);
                let m = self.den.get_mut(&r).unwrap();
                *m -= 1;
                if *m == 0 {
                    self.den.remove(&r);
                    break;
                }
            }
        }
    }

    fn assert_same_field(&self, other: &RatFunc) {
        assert!(self.field == other.field, "mixed coefficient fields");
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        self.assert_same_field(other);
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        // Common denominator = lcm of the factored denominators.
        let mut den: BTreeMap<FieldValue, u32> = self.den.clone();
        for (r, m) in &other.den {
            let e = den.entry(r.clone()).or_insert(0);
            *e = (*e).max(*m);
        }
        let mut a = self.num.clone();
        let mut b = other.num.clone();
        for (r, m) in &den {
            let lin = Poly::linear_from_root(r);
            let ma = self.den.get(r).copied().unwrap_or(0);
            let mb = other.den.get(r).copied().unwrap_or(0);
            if *m > ma {
                a = a.mul(&lin.pow((*m - ma) as u64));
            }
            if *m > mb {
                b = b.mul(&lin.pow((*m - mb) as u64));
            }
        }
        RatFunc::new(a.add(&b), den)
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            field: self.field.clone(),
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        self.assert_same_field(other);
        if self.is_zero() || other.is_zero() {
            return RatFunc::zero(&self.field);
        }
        let mut den = self.den.clone();
        for (r, m) in &other.den {
            *den.entry(r.clone()).or_insert(0) += *m;
        }
        RatFunc::new(self.num.mul(&other.num), den)
    }

    pub fn mul_scalar(&self, c: &FieldValue) -> RatFunc {
        if c.is_zero() {
            return RatFunc::zero(&self.field);
        }
        RatFunc {
            field: self.field.clone(),
            num: self.num.mul_scalar(c),
            den: self.den.clone(),
        }
    }

    pub fn pow(&self, e: u64) -> RatFunc {
        if e == 0 {
            return RatFunc::one(&self.field);
        }
        if self.is_zero() {
            return self.clone();
        }
        let den = self.den.iter().map(|(r, m)| (r.clone(), m * e as u32)).collect();
        RatFunc {
            field: self.field.clone(),
            num: self.num.pow(e),
            den,
        }
    }

    /// Reciprocal; requires the numerator to split into linear factors.
    pub fn recip(&self) -> Result<RatFunc> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (roots, rest) = self.num.roots();
        if !rest.is_constant() {
            let min_degree = rest.min_splitting_degree().unwrap_or(0);
            return Err(Error::UnsplitPole {
                factor: rest.to_string(),
                min_degree,
            });
        }
        let mut num = self.den_poly().mul_scalar(&rest.coeff(0).inv()?);
        let den: BTreeMap<FieldValue, u32> = roots.into_iter().collect();
        // The old denominator may share roots with the new one; normalize fixes that.
        let _ = &mut num;
        Ok(RatFunc::new(num, den))
    }

    pub fn div(&self, other: &RatFunc) -> Result<RatFunc> {
        Ok(self.mul(&other.recip()?))
    }

    /// `x -> x^p` on coefficients and variable; equals the p-th power.
    pub fn frobenius(&self) -> RatFunc {
        let p = self.field.p() as u32;
        RatFunc {
            field: self.field.clone(),
            num: self.num.frobenius(),
            den: self.den.iter().map(|(r, m)| (r.clone(), m * p)).collect(),
        }
    }

    /// Order of the pole at `at`; 0 when there is none. At infinity this is
    /// the degree of the polynomial part.
    pub fn pole_order(&self, at: &PolePoint) -> u32 {
        match at {
            PolePoint::Finite(r) => self.den.get(r).copied().unwrap_or(0),
            PolePoint::Infinity => {
                let dn = match self.num.degree() {
                    None => return 0,
                    Some(d) => d,
                };
                dn.saturating_sub(self.den_degree()) as u32
            }
        }
    }

    /// All poles (finite roots of the denominator, plus infinity when the
    /// numerator degree exceeds the denominator degree).
    pub fn poles(&self) -> Vec<PolePoint> {
        let mut out: Vec<PolePoint> = self.den.keys().cloned().map(PolePoint::Finite).collect();
        if self.pole_order(&PolePoint::Infinity) > 0 {
            out.push(PolePoint::Infinity);
        }
        out
    }

    /// Partial-fraction decomposition. The denominator is split by
    /// construction, so this always succeeds.
    pub fn partial_fractions(&self) -> PartialFractions {
        let den_poly = self.den_poly();
        let (poly_part, rem) = self.num.divrem(&den_poly);
        let mut poles = BTreeMap::new();
        for (r, &m) in &self.den {
            // Expand rem / prod_{s != r} (x - s)^{m_s} as a power series in
            // e = x - r up to order m-1; series coefficient j is the
            // coefficient of (x - r)^{-(m - j)}.
            let h = rem.shift(r); // numerator in e
            let mut dpoly = Poly::one(&self.field);
            for (s, &ms) in &self.den {
                if s == r {
                    continue;
                }
                let shifted = Poly::linear_from_root(s).shift(r); // e + (r - s)
                dpoly = dpoly.mul(&shifted.pow(ms as u64));
            }
            let m = m as usize;
            let d0_inv = dpoly.coeff(0).inv().expect("distinct roots");
            let mut series: Vec<FieldValue> = Vec::with_capacity(m);
            for j in 0..m {
                let mut acc = h.coeff(j);
                for (i, qi) in series.iter().enumerate() {
                    acc = acc.sub(&qi.mul(&dpoly.coeff(j - i)));
                }
                series.push(acc.mul(&d0_inv));
            }
            // series[j] multiplies e^(j-m); store as c_1..c_m for (x-r)^-1..(x-r)^-m.
            let coeffs: Vec<FieldValue> = (0..m).map(|k| series[m - 1 - k].clone()).collect();
            poles.insert(r.clone(), coeffs);
        }
        PartialFractions {
            field: self.field.clone(),
            poly_part,
            poles,
        }
    }

    /// Substitutes the parameter of the coefficient field; poles with the same
    /// specialized location merge.
    pub fn specialize(&self, value: &FieldValue) -> Result<RatFunc> {
        let base = self.field.base();
        let num_coeffs: Result<Vec<FieldValue>> = self
            .num
            .coeffs()
            .iter()
            .map(|c| c.specialize(value))
            .collect();
        let num = Poly::new(base.clone(), num_coeffs?);
        let mut den: BTreeMap<FieldValue, u32> = BTreeMap::new();
        for (r, m) in &self.den {
            let rs = r.specialize(value)?;
            *den.entry(rs).or_insert(0) += *m;
        }
        Ok(RatFunc::new(num, den))
    }

    /// Reinterprets a rational function over a finite field inside a
    /// parametric field over the same finite field.
    pub fn lift_to(&self, field: &Field) -> Result<RatFunc> {
        let coeffs: Result<Vec<FieldValue>> = self
            .num
            .coeffs()
            .iter()
            .map(|c| c.lift_to(field))
            .collect();
        let num = Poly::new(field.clone(), coeffs?);
        let mut den = BTreeMap::new();
        for (r, m) in &self.den {
            den.insert(r.lift_to(field)?, *m);
        }
        Ok(RatFunc::new(num, den))
    }

    /// d/dx via the quotient rule on the expanded denominator.
    pub fn derivative(&self) -> RatFunc {
        let d = self.den_poly();
        let num = self.num.derivative().mul(&d).sub(&self.num.mul(&d.derivative()));
        let den = self.den.iter().map(|(r, m)| (r.clone(), m * 2)).collect();
        RatFunc::new(num, den)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        let ns = self.num.to_string();
        let ns = if self.num.coeffs().iter().filter(|c| !c.is_zero()).count() > 1 {
            format!("({ns})")
        } else {
            ns
        };
        let mut dparts = Vec::new();
        for (r, m) in &self.den {
            let rs = r.to_string();
            let base = if r.is_zero() {
                "x".to_string()
            } else {
                let sep = if rs.contains('+') || rs.contains('/') || rs.contains(' ') {
                    format!("({rs})")
                } else {
                    rs
                };
                format!("(x - {sep})")
            };
            if *m == 1 {
                dparts.push(base);
            } else if base == "x" {
                dparts.push(format!("x^{m}"));
            } else {
                dparts.push(format!("{base}^{m}"));
            }
        }
        if dparts.len() == 1 {
            write!(f, "{ns}/{}", dparts[0])
        } else {
            write!(f, "{ns}/({})", dparts.join("*"))
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Partial-fraction form: polynomial part plus, per finite pole, the
/// coefficients `c_1..c_l` of `(x-P)^{-1} .. (x-P)^{-l}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialFractions {
    field: Field,
    pub poly_part: Poly,
    pub poles: BTreeMap<FieldValue, Vec<FieldValue>>,
}

impl PartialFractions {
    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Exact recombination back into a rational function.
    pub fn recombine(&self) -> RatFunc {
        let mut acc = RatFunc::from_poly(self.poly_part.clone());
        for (r, coeffs) in &self.poles {
            for (k, c) in coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                acc = acc.add(&RatFunc::pole_term(
                    c.clone(),
                    &PolePoint::Finite(r.clone()),
                    (k + 1) as u32,
                ));
            }
        }
        acc
    }

    /// Terms as (point, order, coefficient), including polynomial-part
    /// monomials of positive degree as orders at infinity.
    pub fn terms(&self) -> Vec<(PolePoint, u32, FieldValue)> {
        let mut out = Vec::new();
        for (r, coeffs) in &self.poles {
            for (k, c) in coeffs.iter().enumerate() {
                if !c.is_zero() {
                    out.push((PolePoint::Finite(r.clone()), (k + 1) as u32, c.clone()));
                }
            }
        }
        for (e, c) in self.poly_part.coeffs().iter().enumerate().skip(1) {
            if !c.is_zero() {
                out.push((PolePoint::Infinity, e as u32, c.clone()));
            }
        }
        out
    }
}
