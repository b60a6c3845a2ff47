//! Test-only oracles: Witt addition through integer ghost components
//! (independent of the universal-polynomial tables), and seeded random
//! vector generators.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use asw_core::algebra::{Field, Poly, PolePoint, RatFunc};
use asw_core::witt::WittVector;

/// Integer polynomial in x, ascending coefficients.
type ZX = Vec<BigInt>;

fn zx_trim(a: &mut ZX) {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
}

fn zx_add(a: &ZX, b: &ZX) -> ZX {
    let mut out = vec![BigInt::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] += c;
    }
    zx_trim(&mut out);
    out
}

fn zx_sub(a: &ZX, b: &ZX) -> ZX {
    let mut out = vec![BigInt::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] -= c;
    }
    zx_trim(&mut out);
    out
}

fn zx_mul(a: &ZX, b: &ZX) -> ZX {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    zx_trim(&mut out);
    out
}

fn zx_pow(a: &ZX, mut e: u64) -> ZX {
    let mut acc = vec![BigInt::one()];
    let mut base = a.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = zx_mul(&acc, &base);
        }
        base = zx_mul(&base, &base);
        e >>= 1;
    }
    acc
}

fn zx_scale(a: &ZX, k: &BigInt) -> ZX {
    a.iter().map(|c| c * k).collect()
}

fn zx_div_exact(a: &ZX, k: &BigInt) -> ZX {
    a.iter()
        .map(|c| {
            assert!((c % k).is_zero(), "ghost recovery division must be exact");
            c / k
        })
        .collect()
}

/// `w_i(a_0..a_i) = sum p^j a_j^(p^(i-j))` over Z[x].
fn ghost(parts: &[ZX], i: usize, p: u64) -> ZX {
    let mut acc = Vec::new();
    let mut pj = BigInt::one();
    for (j, a) in parts.iter().enumerate().take(i + 1) {
        acc = zx_add(&acc, &zx_scale(&zx_pow(a, p.pow((i - j) as u32)), &pj));
        pj *= p;
    }
    acc
}

/// Recovers Witt components from a ghost vector (divisions are exact when
/// the ghost vector is a sum of genuine ghost images).
fn from_ghost(w: &[ZX], p: u64) -> Vec<ZX> {
    let mut parts: Vec<ZX> = Vec::with_capacity(w.len());
    for i in 0..w.len() {
        let mut rhs = w[i].clone();
        let mut pj = BigInt::one();
        for (j, a) in parts.iter().enumerate().take(i) {
            rhs = zx_sub(&rhs, &zx_scale(&zx_pow(a, p.pow((i - j) as u32)), &pj));
            pj *= p;
        }
        let pi = BigInt::from(p).pow(i as u32);
        parts.push(zx_div_exact(&rhs, &pi));
    }
    parts
}

fn zx_to_ratfunc(a: &ZX, field: &Field) -> RatFunc {
    let coeffs = a
        .iter()
        .map(|c| {
            let r = ((c % field.p()) + field.p()) % field.p();
            let digits = r.to_u64_digits();
            field.from_int(*digits.1.first().unwrap_or(&0) as i64)
        })
        .collect();
    RatFunc::from_poly(Poly::new(field.clone(), coeffs))
}

/// Adds `cases` random pairs through the ghost oracle and through the
/// universal-polynomial tables, asserting agreement. Returns the case count.
pub fn compare_witt_add(p: u64, n: usize, cases: usize) -> usize {
    let field = Field::prime(p).unwrap();
    let mut rng = StdRng::seed_from_u64(0x5eed_0000 + p * 100 + n as u64);
    for _ in 0..cases {
        let rand_zx = |rng: &mut StdRng| -> ZX {
            let deg = rng.gen_range(0..=2);
            let mut v: ZX = (0..=deg)
                .map(|_| BigInt::from(rng.gen_range(0..p)))
                .collect();
            zx_trim(&mut v);
            v
        };
        let u_lift: Vec<ZX> = (0..n).map(|_| rand_zx(&mut rng)).collect();
        let v_lift: Vec<ZX> = (0..n).map(|_| rand_zx(&mut rng)).collect();
        // Oracle route: add ghost components over the integers, recover.
        let w_sum: Vec<ZX> = (0..n)
            .map(|i| zx_add(&ghost(&u_lift, i, p), &ghost(&v_lift, i, p)))
            .collect();
        let expect: Vec<RatFunc> = from_ghost(&w_sum, p)
            .iter()
            .map(|a| zx_to_ratfunc(a, &field))
            .collect();
        // Implementation route.
        let u = WittVector::new(
            p,
            u_lift.iter().map(|a| zx_to_ratfunc(a, &field)).collect(),
        )
        .unwrap();
        let v = WittVector::new(
            p,
            v_lift.iter().map(|a| zx_to_ratfunc(a, &field)).collect(),
        )
        .unwrap();
        let got = u.add(&v).unwrap();
        assert_eq!(got.entries(), expect.as_slice(), "p={p}, n={n}");
    }
    cases
}

/// A random Witt vector with small poles and polynomial parts.
pub fn random_witt(field: &Field, n: usize, seed: u64) -> WittVector {
    let mut rng = StdRng::seed_from_u64(seed);
    let p = field.p();
    let entries = (0..n)
        .map(|_| {
            let mut f = RatFunc::zero(field);
            for _ in 0..rng.gen_range(1..=3) {
                let c = field.from_int(rng.gen_range(1..p) as i64);
                let at = rng.gen_range(0..p + 1);
                let order = rng.gen_range(1..=6u32);
                let point = if at == p {
                    PolePoint::Infinity
                } else {
                    PolePoint::Finite(field.from_int(at as i64))
                };
                f = f.add(&RatFunc::pole_term(c, &point, order));
            }
            f
        })
        .collect();
    WittVector::new(p, entries).unwrap()
}

/// A random Witt vector that defines a full-order cover: its first entry
/// keeps a pole of order coprime to p, which no reduction can remove.
pub fn random_cover(field: &Field, n: usize, seed: u64) -> WittVector {
    let base = random_witt(field, n, seed);
    let anchor = RatFunc::pole_term(field.one(), &PolePoint::Finite(field.zero()), 1);
    let first = base.entries()[0].add(&anchor);
    let mut entries = base.entries().to_vec();
    entries[0] = first;
    // Re-randomize if the anchor collided with an existing term.
    if entries[0].pole_order(&PolePoint::Finite(field.zero())).is_multiple_of(field.p() as u32) {
        return random_cover(field, n, seed + 1);
    }
    WittVector::new(field.p(), entries).unwrap()
}
