//! Dense univariate polynomials in `x` over a coefficient [`Field`].

use std::fmt;

use crate::algebra::field::{Field, FieldValue};
use crate::error::{Error, Result};

/// Polynomial in `x`; ascending coefficients with no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    field: Field,
    coeffs: Vec<FieldValue>,
}

impl Poly {
    pub fn new(field: Field, mut coeffs: Vec<FieldValue>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { field, coeffs }
    }

    pub fn zero(field: &Field) -> Poly {
        Poly {
            field: field.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: &Field) -> Poly {
        Poly::constant(field.one())
    }

    pub fn constant(c: FieldValue) -> Poly {
        let field = c.field().clone();
        Poly::new(field, vec![c])
    }

    pub fn x(field: &Field) -> Poly {
        Poly::new(field.clone(), vec![field.zero(), field.one()])
    }

    /// `c * x^e`.
    pub fn monomial(c: FieldValue, e: usize) -> Poly {
        let field = c.field().clone();
        let mut coeffs = vec![field.zero(); e + 1];
        coeffs[e] = c;
        Poly::new(field, coeffs)
    }

    /// `x - r`.
    pub fn linear_from_root(r: &FieldValue) -> Poly {
        let field = r.field().clone();
        Poly::new(field.clone(), vec![r.neg(), field.one()])
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[FieldValue] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldValue {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&FieldValue> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i).add(&other.coeff(i)));
        }
        Poly::new(self.field.clone(), out)
    }

    pub fn neg(&self) -> Poly {
        Poly {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.field);
        }
        let mut out = vec![self.field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Poly::new(self.field.clone(), out)
    }

    pub fn mul_scalar(&self, c: &FieldValue) -> Poly {
        Poly::new(
            self.field.clone(),
            self.coeffs.iter().map(|a| a.mul(c)).collect(),
        )
    }

    pub fn pow(&self, mut e: u64) -> Poly {
        let mut acc = Poly::one(&self.field);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Quotient and remainder; the divisor must be nonzero.
    pub fn divrem(&self, den: &Poly) -> (Poly, Poly) {
        assert!(!den.is_zero(), "division by the zero polynomial");
        let dd = den.degree().unwrap();
        if self.coeffs.len() <= dd {
            return (Poly::zero(&self.field), self.clone());
        }
        let lead_inv = den.leading().unwrap().inv().unwrap();
        let mut rem = self.coeffs.clone();
        let mut quo = vec![self.field.zero(); rem.len() - dd];
        while rem.len() > dd {
            let dr = rem.len() - 1;
            let c = rem[dr].mul(&lead_inv);
            if !c.is_zero() {
                quo[dr - dd] = c.clone();
                for (k, bc) in den.coeffs.iter().enumerate() {
                    rem[dr - dd + k] = rem[dr - dd + k].sub(&c.mul(bc));
                }
            }
            rem.pop();
            while rem.last().is_some_and(|c| c.is_zero()) {
                rem.pop();
            }
        }
        (
            Poly::new(self.field.clone(), quo),
            Poly::new(self.field.clone(), rem),
        )
    }

    /// Exact division; panics if the remainder is nonzero.
    pub fn div_exact(&self, den: &Poly) -> Poly {
        let (q, r) = self.divrem(den);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => self.clone(),
            Some(l) if l.is_one() => self.clone(),
            Some(l) => self.mul_scalar(&l.inv().unwrap()),
        }
    }

    pub fn eval(&self, at: &FieldValue) -> FieldValue {
        let mut acc = self.field.zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(at).add(c);
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero(&self.field);
        }
        let out = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.mul(&self.field.from_int(i as i64)))
            .collect();
        Poly::new(self.field.clone(), out)
    }

    /// Coefficients of `f(x + c)` (Taylor shift via repeated synthetic division;
    /// characteristic-safe, no factorials).
    pub fn shift(&self, c: &FieldValue) -> Poly {
        if self.is_zero() || c.is_zero() {
            return self.clone();
        }
        let mut work = self.coeffs.clone();
        let mut out = Vec::with_capacity(work.len());
        while !work.is_empty() {
            // Synthetic division of `work` by (y - c): after the Horner sweep,
            // work[0] is the remainder f(c) and work[1..] is the quotient.
            let mut acc = self.field.zero();
            for k in (0..work.len()).rev() {
                acc = acc.mul(c).add(&work[k]);
                work[k] = acc.clone();
            }
            out.push(work.remove(0));
        }
        Poly::new(self.field.clone(), out)
    }

    /// The image under `x -> x^p` on coefficients and variable; equals `f^p`.
    pub fn frobenius(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let p = self.field.p() as usize;
        let mut out = vec![self.field.zero(); (self.coeffs.len() - 1) * p + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i * p] = c.frobenius();
        }
        Poly::new(self.field.clone(), out)
    }

    /// All roots in the coefficient field with multiplicity, plus the
    /// unsplit cofactor: `self = cofactor * prod (x - r)^m`. Finite fields
    /// search exhaustively; parametric fields split structurally (linear
    /// factors, repeated factors via gcd with the derivative, and perfect
    /// p-th powers — `(x - c)^p` expands to `x^p - c^p`).
    pub fn roots(&self) -> (Vec<(FieldValue, u32)>, Poly) {
        assert!(!self.is_zero());
        let mut roots: Vec<(FieldValue, u32)> = Vec::new();
        if !self.field.is_parametric() {
            let mut rest = self.clone();
            for cand in self.field.elements().unwrap() {
                let mut mult = 0u32;
                while !rest.is_constant() && rest.eval(&cand).is_zero() {
                    rest = rest.div_exact(&Poly::linear_from_root(&cand));
                    mult += 1;
                }
                if mult > 0 {
                    roots.push((cand, mult));
                }
                if rest.is_constant() {
                    break;
                }
            }
            roots.sort_by(|a, b| a.0.cmp(&b.0));
            return (roots, rest);
        }
        let lead = self.leading().unwrap().clone();
        let mut cofactor = Poly::constant(lead);
        let mut stack = vec![(self.monic(), 1u32)];
        while let Some((f, mult)) = stack.pop() {
            if f.is_constant() {
                continue; // monic constant = 1
            }
            if f.degree() == Some(1) {
                merge_root(&mut roots, f.coeff(0).neg(), mult);
                continue;
            }
            if f.coeff(0).is_zero() {
                // Split off the power of x.
                let mut g = f.clone();
                let mut k = 0u32;
                let x = Poly::x(&self.field);
                while g.coeff(0).is_zero() && !g.is_constant() {
                    g = g.div_exact(&x);
                    k += 1;
                }
                merge_root(&mut roots, self.field.zero(), k * mult);
                stack.push((g, mult));
                continue;
            }
            let d = f.derivative();
            if d.is_zero() {
                match f.pth_root_poly() {
                    Some(g) => stack.push((g, mult * self.field.p() as u32)),
                    None => cofactor = cofactor.mul(&f.pow(mult as u64)),
                }
                continue;
            }
            let g = f.gcd(&d);
            if g.degree() == Some(0) {
                // Squarefree with no structural handle.
                cofactor = cofactor.mul(&f.pow(mult as u64));
                continue;
            }
            stack.push((f.div_exact(&g), mult));
            stack.push((g, mult));
        }
        roots.sort_by(|a, b| a.0.cmp(&b.0));
        (roots, cofactor)
    }

    /// `g` with `g^p = self`, when the polynomial is a perfect p-th power
    /// (all exponents divisible by p, all coefficients p-th powers).
    pub fn pth_root_poly(&self) -> Option<Poly> {
        let p = self.field.p() as usize;
        if self.is_zero() {
            return Some(self.clone());
        }
        if !(self.coeffs.len() - 1).is_multiple_of(p) {
            return None;
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            if i % p != 0 && !c.is_zero() {
                return None;
            }
        }
        let mut out = Vec::with_capacity((self.coeffs.len() - 1) / p + 1);
        let mut i = 0;
        while i < self.coeffs.len() {
            out.push(self.coeffs[i].pth_root()?);
            i += p;
        }
        Some(Poly::new(self.field.clone(), out))
    }

    /// Minimal extension degree over which this (finite-field) polynomial
    /// splits into linear factors: the lcm of its irreducible factor degrees,
    /// found by distinct-degree sieving with `x^(q^i) mod f`.
    pub fn min_splitting_degree(&self) -> Result<usize> {
        if self.field.is_parametric() {
            return Err(Error::Unsupported(
                "splitting degree is computed over finite fields only".into(),
            ));
        }
        let mut f = self.monic();
        // Remove repeated factors so the sieve sees each irreducible once.
        let der = f.derivative();
        if !der.is_zero() {
            f = f.div_exact(&f.gcd(&der));
        } else {
            // f = g(x^p); its factors' degrees are those of the p-th root.
            return f.pth_root_poly().expect("zero derivative implies p-th power").min_splitting_degree();
        }
        let q = self.field.finite_field().order();
        let mut lcm = 1usize;
        let mut d = 0usize;
        let mut xq = Poly::x(&self.field); // x^(q^d) mod f
        while f.degree() > Some(0) {
            d += 1;
            xq = xq.modpow(q, &f);
            let g = f.gcd(&xq.sub(&Poly::x(&self.field)));
            if g.degree() > Some(0) {
                lcm = num_lcm(lcm, d);
                f = f.div_exact(&g);
                if !f.is_constant() {
                    let (_, r) = xq.divrem(&f);
                    xq = r;
                }
            }
        }
        Ok(lcm)
    }

    fn modpow(&self, mut e: u64, m: &Poly) -> Poly {
        let mut acc = Poly::one(&self.field);
        let mut base = self.divrem(m).1;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).divrem(m).1;
            }
            base = base.mul(&base).divrem(m).1;
            e >>= 1;
        }
        acc
    }
}

fn merge_root(roots: &mut Vec<(FieldValue, u32)>, root: FieldValue, mult: u32) {
    for (r, m) in roots.iter_mut() {
        if *r == root {
            *m += mult;
            return;
        }
    }
    roots.push((root, mult));
}

fn num_lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let cs = c.to_string();
            let needs_paren = cs.contains('+') || cs.contains('/') || cs.contains(' ');
            let cs = if needs_paren { format!("({cs})") } else { cs };
            let term = match i {
                0 => cs,
                1 if cs == "1" => "x".into(),
                1 => format!("{cs}*x"),
                _ if cs == "1" => format!("x^{i}"),
                _ => format!("{cs}*x^{i}"),
            };
            terms.push(term);
        }
        write!(f, "{}", terms.join(" + "))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
