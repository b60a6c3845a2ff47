//! Parser for rational-function expressions such as
//! `1/(x-1)^7 + 1/(x-2)^12` or `1/(x^2*(x-t^4))`.
//!
//! Evaluation keeps numerator and denominator as factor lists so that
//! syntactically factored denominators stay factored; only the final
//! conversion to [`RatFunc`] needs the factors to split.

use crate::algebra::field::{Field, FieldValue};
use crate::algebra::poly::Poly;
use crate::algebra::ratfunc::{PolePoint, RatFunc};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(u64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(input: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let mut chars = input.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            ' ' | '\t' | '\n' => {
                chars.next();
            }
            '0'..='9' => {
                let mut v: u64 = 0;
                while let Some(&d) = chars.peek() {
                    if let Some(dv) = d.to_digit(10) {
                        v = v
                            .checked_mul(10)
                            .and_then(|v| v.checked_add(dv as u64))
                            .ok_or_else(|| Error::Parse("integer literal overflow".into()))?;
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Tok::Int(v));
            }
            'a'..='z' | 'A'..='Z' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() {
                        s.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Tok::Ident(s));
            }
            '+' => {
                chars.next();
                out.push(Tok::Plus);
            }
            '-' | '−' => {
                chars.next();
                out.push(Tok::Minus);
            }
            '*' | '·' => {
                chars.next();
                out.push(Tok::Star);
            }
            '/' => {
                chars.next();
                out.push(Tok::Slash);
            }
            '^' => {
                chars.next();
                out.push(Tok::Caret);
            }
            '(' => {
                chars.next();
                out.push(Tok::LParen);
            }
            ')' => {
                chars.next();
                out.push(Tok::RParen);
            }
            other => return Err(Error::Parse(format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

/// Product-form value: `prod num_i^(e_i) / prod den_j^(e_j)`.
#[derive(Clone)]
struct Frac {
    field: Field,
    num: Vec<(Poly, u32)>,
    den: Vec<(Poly, u32)>,
}

impl Frac {
    fn from_poly(p: Poly) -> Frac {
        Frac {
            field: p.field().clone(),
            num: vec![(p, 1)],
            den: Vec::new(),
        }
    }

    fn mul(mut self, rhs: Frac) -> Frac {
        self.num.extend(rhs.num);
        self.den.extend(rhs.den);
        self
    }

    fn div(mut self, rhs: Frac) -> Frac {
        self.num.extend(rhs.den);
        self.den.extend(rhs.num);
        self
    }

    fn pow(mut self, e: u32) -> Frac {
        for (_, m) in self.num.iter_mut().chain(self.den.iter_mut()) {
            *m *= e;
        }
        if e == 0 {
            self.num.clear();
            self.den.clear();
        }
        self
    }

    fn neg(mut self) -> Frac {
        self.num.push((Poly::constant(self.field.from_int(-1)), 1));
        self
    }

    fn expand_num(&self) -> Poly {
        let mut acc = Poly::one(&self.field);
        for (f, m) in &self.num {
            acc = acc.mul(&f.pow(*m as u64));
        }
        acc
    }

    fn expand_den(&self) -> Poly {
        let mut acc = Poly::one(&self.field);
        for (f, m) in &self.den {
            acc = acc.mul(&f.pow(*m as u64));
        }
        acc
    }

    fn add(self, rhs: Frac) -> Frac {
        // n1/D1 + n2/D2 = (n1*D2 + n2*D1)/(D1*D2); common factors cancel
        // again at RatFunc construction.
        let n1 = self.expand_num();
        let n2 = rhs.expand_num();
        let d1 = self.expand_den();
        let d2 = rhs.expand_den();
        let num = n1.mul(&d2).add(&n2.mul(&d1));
        let mut den = self.den;
        den.extend(rhs.den);
        Frac {
            field: num.field().clone(),
            num: vec![(num, 1)],
            den,
        }
    }

    fn into_ratfunc(self) -> Result<RatFunc> {
        let field = self.field.clone();
        let num = self.expand_num();
        let mut den_map = std::collections::BTreeMap::new();
        let mut scale = field.one();
        for (f, m) in &self.den {
            if f.is_zero() {
                return Err(Error::DivisionByZero);
            }
            if f.is_constant() {
                scale = scale.mul(&f.coeff(0).pow(*m as u64).inv()?);
                continue;
            }
            let (roots, rest) = f.roots();
            if !rest.is_constant() {
                let min_degree = rest.min_splitting_degree().unwrap_or(0);
                return Err(Error::UnsplitPole {
                    factor: rest.to_string(),
                    min_degree,
                });
            }
            scale = scale.mul(&rest.coeff(0).pow(*m as u64).inv()?);
            for (r, k) in roots {
                *den_map.entry(r).or_insert(0u32) += k * m;
            }
        }
        Ok(RatFunc::new(num.mul_scalar(&scale), den_map))
    }
}

struct Parser<'a> {
    toks: &'a [Tok],
    pos: usize,
    field: Field,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Frac> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.next();
                    let rhs = self.term()?;
                    acc = acc.add(rhs);
                }
                Some(Tok::Minus) => {
                    self.next();
                    let rhs = self.term()?;
                    acc = acc.add(rhs.neg());
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Frac> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.next();
                    acc = acc.mul(self.unary()?);
                }
                Some(Tok::Slash) => {
                    self.next();
                    acc = acc.div(self.unary()?);
                }
                // Implicit multiplication: `2x`, `x(x-1)`, `(x-1)(x-2)`.
                Some(Tok::Int(_)) | Some(Tok::Ident(_)) | Some(Tok::LParen) => {
                    acc = acc.mul(self.unary()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Frac> {
        if let Some(Tok::Minus) = self.peek() {
            self.next();
            return Ok(self.unary()?.neg());
        }
        if let Some(Tok::Plus) = self.peek() {
            self.next();
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Frac> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.next();
            let mut negative = false;
            if let Some(Tok::Minus) = self.peek() {
                self.next();
                negative = true;
            }
            let e = match self.next() {
                Some(Tok::Int(e)) => e,
                other => {
                    return Err(Error::Parse(format!(
                        "expected integer exponent, found {other:?}"
                    )))
                }
            };
            let e = u32::try_from(e).map_err(|_| Error::Parse("exponent too large".into()))?;
            let v = base.pow(e);
            if negative {
                return Ok(Frac {
                    field: v.field.clone(),
                    num: v.den,
                    den: v.num,
                });
            }
            return Ok(v);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Frac> {
        match self.next() {
            Some(Tok::Int(v)) => Ok(Frac::from_poly(Poly::constant(
                self.field.from_int(v as i64),
            ))),
            Some(Tok::Ident(name)) => match name.as_str() {
                "x" => Ok(Frac::from_poly(Poly::x(&self.field))),
                "g" => Ok(Frac::from_poly(Poly::constant(self.field.generator()?))),
                "t" | "a" => {
                    let sym = name.chars().next().unwrap();
                    match self.field.param() {
                        Some(p) if p.symbol() == sym => {
                            Ok(Frac::from_poly(Poly::constant(self.field.parameter()?)))
                        }
                        _ => Err(Error::Parse(format!(
                            "`{name}` is not a parameter of {}",
                            self.field.name()
                        ))),
                    }
                }
                other => Err(Error::Parse(format!("unknown symbol `{other}`"))),
            },
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.next() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(Error::Parse("unbalanced parenthesis".into())),
                }
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

/// Parses a rational function in `x` over `field`.
pub fn parse_ratfunc(input: &str, field: &Field) -> Result<RatFunc> {
    let toks = lex(input)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        field: field.clone(),
    };
    let v = p.expr()?;
    if p.pos != toks.len() {
        return Err(Error::Parse(format!(
            "trailing input at token {}",
            p.pos
        )));
    }
    v.into_ratfunc()
}

/// Parses a constant of the coefficient field (a point, a coefficient, ...).
pub fn parse_value(input: &str, field: &Field) -> Result<FieldValue> {
    let rf = parse_ratfunc(input, field)?;
    rf.as_constant()
        .ok_or_else(|| Error::Parse(format!("`{input}` is not a constant of {}", field.name())))
}

/// Parses a point of the projective line (`inf` for the point at infinity).
pub fn parse_point(input: &str, field: &Field) -> Result<PolePoint> {
    let s = input.trim();
    if s == "inf" || s == "infty" || s == "oo" || s == "∞" {
        return Ok(PolePoint::Infinity);
    }
    Ok(PolePoint::Finite(parse_value(s, field)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::Param;
    use crate::algebra::ratfunc::PolePoint;

    #[test]
    fn parses_paper_inputs() {
        let f5 = Field::prime(5).unwrap();
        let f = parse_ratfunc("1/x + 1/(x-1)", &f5).unwrap();
        assert_eq!(f.pole_order(&PolePoint::Finite(f5.zero())), 1);
        assert_eq!(f.pole_order(&PolePoint::Finite(f5.one())), 1);

        let g = parse_ratfunc("1/(x-1)^7 + 1/(x-2)^12", &f5).unwrap();
        assert_eq!(g.pole_order(&PolePoint::Finite(f5.one())), 7);
        assert_eq!(g.pole_order(&PolePoint::Finite(f5.from_int(2))), 12);
    }

    #[test]
    fn parses_factored_parametric_denominators() {
        let f2t = Field::parametric(2, 1, None, Param::T).unwrap();
        let f = parse_ratfunc("1/(x^2(x-t^4))", &f2t).unwrap();
        let t = f2t.parameter().unwrap();
        assert_eq!(f.pole_order(&PolePoint::Finite(f2t.zero())), 2);
        assert_eq!(f.pole_order(&PolePoint::Finite(t.pow(4))), 1);
    }

    #[test]
    fn display_roundtrip() {
        let f5 = Field::prime(5).unwrap();
        for src in ["1/x + 1/(x-1)", "x^3 + x", "1/(x-1)^7 + 1/(x-2)^12", "x^5 + 1/x^5"] {
            let f = parse_ratfunc(src, &f5).unwrap();
            let g = parse_ratfunc(&f.to_string(), &f5).unwrap();
            assert_eq!(f, g, "round trip failed for {src}");
        }
    }

    #[test]
    fn rejects_unsplit_denominator() {
        let f5 = Field::prime(5).unwrap();
        let err = parse_ratfunc("1/(x^2+2)", &f5).unwrap_err();
        assert!(matches!(err, Error::UnsplitPole { .. }));
    }

    #[test]
    fn constant_and_point_parsing() {
        let f4 = Field::finite(2, 2, None).unwrap();
        let g = f4.generator().unwrap();
        assert_eq!(parse_value("g+1", &f4).unwrap(), g.add(&f4.one()));
        assert_eq!(parse_point("inf", &f4).unwrap(), PolePoint::Infinity);
        assert!(parse_value("x", &f4).is_err());
    }
}
