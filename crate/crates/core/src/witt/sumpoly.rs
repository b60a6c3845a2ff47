//! Universal Witt addition and negation polynomials.
//!
//! The tables are generated once per (p, n) by the exact integer ghost
//! recursion: with ghost components `w_i(Z) = sum_{j<=i} p^j Z_j^(p^(i-j))`,
//! the addition polynomial at level i is
//!
//!   S_i = (w_i(X) + w_i(Y) - sum_{j<i} p^j S_j^(p^(i-j))) / p^i
//!
//! and the division is exact over the integers. The identity
//! `w_i(S_0..S_i) = w_i(X) + w_i(Y)` is checked before reducing mod p, so the
//! recursion doubles as a self-test of the generated table.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the Witt length; the universal polynomials blow up
/// super-exponentially beyond it.
pub const DEFAULT_LEVEL_CAP: usize = 4;

/// Exponent vector over the variables X_0..X_{n-1}, Y_0..Y_{n-1}.
type Mono = Vec<u32>;

/// Sparse multivariate polynomial over the integers.
#[derive(Debug, Clone, PartialEq, Eq)]
struct ZPoly {
    nvars: usize,
    terms: BTreeMap<Mono, BigInt>,
}

impl ZPoly {
    fn zero(nvars: usize) -> ZPoly {
        ZPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    fn var(nvars: usize, idx: usize) -> ZPoly {
        let mut m = vec![0u32; nvars];
        m[idx] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(m, BigInt::one());
        ZPoly { nvars, terms }
    }

    fn add_term(&mut self, m: Mono, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            let key = self
                .terms
                .iter()
                .find(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone());
            if let Some(k) = key {
                self.terms.remove(&k);
            }
        }
    }

    fn add(&self, other: &ZPoly) -> ZPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    fn sub(&self, other: &ZPoly) -> ZPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    fn mul(&self, other: &ZPoly) -> ZPoly {
        let mut out = ZPoly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m: Mono = ma.iter().zip(mb.iter()).map(|(a, b)| a + b).collect();
                out.add_term(m, ca * cb);
            }
        }
        out
    }

    fn scale(&self, k: &BigInt) -> ZPoly {
        if k.is_zero() {
            return ZPoly::zero(self.nvars);
        }
        ZPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    fn pow(&self, mut e: u64) -> ZPoly {
        let mut acc = {
            let mut t = BTreeMap::new();
            t.insert(vec![0u32; self.nvars], BigInt::one());
            ZPoly {
                nvars: self.nvars,
                terms: t,
            }
        };
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

    /// Exact division by an integer; panics if any coefficient resists.
    fn div_exact(&self, k: &BigInt) -> ZPoly {
        ZPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let (q, r) = (c / k, c % k);
                    assert!(r.is_zero(), "ghost recursion division must be exact");
                    (m.clone(), q)
                })
                .collect(),
        }
    }

    fn reduce_mod(&self, p: u64) -> Vec<(Mono, u64)> {
        let pb = BigInt::from(p);
        let mut out = Vec::new();
        for (m, c) in &self.terms {
            let mut r = c % &pb;
            if r.is_negative() {
                r += &pb;
            }
            let r: u64 = r.try_into().unwrap();
            if r != 0 {
                out.push((m.clone(), r));
            }
        }
        out
    }
}

/// Ghost polynomial `w_i` evaluated on a slice of polynomials.
fn ghost(parts: &[ZPoly], i: usize, p: u64) -> ZPoly {
    let nvars = parts[0].nvars;
    let mut acc = ZPoly::zero(nvars);
    let mut pj = BigInt::one();
    for (j, z) in parts.iter().enumerate().take(i + 1) {
        let e = p.pow((i - j) as u32);
        acc = acc.add(&z.pow(e).scale(&pj));
        pj *= p;
    }
    acc
}

/// Term list of a universal polynomial reduced mod p.
pub type TermList = Vec<(Vec<u32>, u64)>;

/// Addition and negation polynomials for length-n Witt vectors mod p.
///
/// `add[i]` is S_i in X_0..X_{i}, Y_0..Y_{i} (variables indexed X_j = j,
/// Y_j = n + j); `neg[i]` is N_i in X_0..X_i.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SumPolyTable {
    pub p: u64,
    pub n: usize,
    pub add: Vec<TermList>,
    pub neg: Vec<TermList>,
}

impl SumPolyTable {
    /// Builds the table by integer ghost recursion, verifying the ghost
    /// identity before reduction mod p.
    pub fn build(p: u64, n: usize) -> Result<SumPolyTable> {
        Self::build_with_cap(p, n, DEFAULT_LEVEL_CAP)
    }

    pub fn build_with_cap(p: u64, n: usize, cap: usize) -> Result<SumPolyTable> {
        if n == 0 {
            return Err(Error::ShapeMismatch("Witt length must be >= 1".into()));
        }
        if n > cap {
            return Err(Error::LevelCap { n, cap });
        }
        if !crate::algebra::field::fp::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let nvars = 2 * n;
        let xs: Vec<ZPoly> = (0..n).map(|j| ZPoly::var(nvars, j)).collect();
        let ys: Vec<ZPoly> = (0..n).map(|j| ZPoly::var(nvars, n + j)).collect();

        let mut s: Vec<ZPoly> = Vec::with_capacity(n);
        for i in 0..n {
            let mut rhs = ghost(&xs, i, p).add(&ghost(&ys, i, p));
            let mut pj = BigInt::one();
            for (j, sj) in s.iter().enumerate().take(i) {
                let e = p.pow((i - j) as u32);
                rhs = rhs.sub(&sj.pow(e).scale(&pj));
                pj *= p;
            }
            let pi = BigInt::from(p).pow(i as u32);
            s.push(rhs.div_exact(&pi));
            // Ghost identity check at this level.
            let lhs = ghost(&s, i, p);
            let want = ghost(&xs, i, p).add(&ghost(&ys, i, p));
            assert_eq!(lhs, want, "ghost identity must hold over the integers");
        }

        let mut ng: Vec<ZPoly> = Vec::with_capacity(n);
        for i in 0..n {
            let mut rhs = ghost(&xs, i, p).scale(&BigInt::from(-1));
            let mut pj = BigInt::one();
            for (j, nj) in ng.iter().enumerate().take(i) {
                let e = p.pow((i - j) as u32);
                rhs = rhs.sub(&nj.pow(e).scale(&pj));
                pj *= p;
            }
            let pi = BigInt::from(p).pow(i as u32);
            ng.push(rhs.div_exact(&pi));
            let lhs = ghost(&ng, i, p);
            let want = ghost(&xs, i, p).scale(&BigInt::from(-1));
            assert_eq!(lhs, want, "negation ghost identity must hold");
        }

        Ok(SumPolyTable {
            p,
            n,
            add: s.iter().map(|z| z.reduce_mod(p)).collect(),
            neg: ng.iter().map(|z| z.reduce_mod(p)).collect(),
        })
    }
}

static TABLE_CACHE: OnceLock<Mutex<HashMap<(u64, usize), Arc<SumPolyTable>>>> = OnceLock::new();

/// Memoized table lookup; consults the on-disk cache at `$ASW_MODULI_CACHE`
/// when that variable is set.
pub fn sum_poly_table(p: u64, n: usize) -> Result<Arc<SumPolyTable>> {
    let cache = TABLE_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    {
        let guard = cache.lock().unwrap();
        if let Some(t) = guard.get(&(p, n)) {
            return Ok(t.clone());
        }
    }
    let disk_path = std::env::var_os("ASW_MODULI_CACHE").map(|dir| {
        let mut path = std::path::PathBuf::from(dir);
        path.push(format!("witt_p{p}_n{n}.json"));
        path
    });
    if let Some(path) = &disk_path {
        if let Ok(text) = std::fs::read_to_string(path) {
            if let Ok(table) = serde_json::from_str::<SumPolyTable>(&text) {
                if table.p == p && table.n == n {
                    let arc = Arc::new(table);
                    cache.lock().unwrap().insert((p, n), arc.clone());
                    return Ok(arc);
                }
            }
        }
    }
    let table = Arc::new(SumPolyTable::build(p, n)?);
    if let Some(path) = &disk_path {
        if let Some(dir) = path.parent() {
            let _ = std::fs::create_dir_all(dir);
        }
        if let Ok(text) = serde_json::to_string(table.as_ref()) {
            let _ = std::fs::write(path, text);
        }
    }
    cache.lock().unwrap().insert((p, n), table.clone());
    Ok(table)
}
