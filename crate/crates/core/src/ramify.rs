//! From a Witt vector to its reduced form, branch points, upper jumps,
//! conductors, Swan conductors, genus vector, and p-rank vector — and back
//! from a conductor matrix to an explicit cover.

use std::collections::BTreeSet;
use std::fmt;

use crate::algebra::field::Field;
use crate::algebra::ratfunc::{PolePoint, RatFunc};
use crate::error::{Error, Result};
use crate::witt::WittVector;

/// Conductor matrix of a cover: one row per branch point, one column per
/// level of the tower. Entry 0 marks an unbranched level (break -1).
#[derive(Clone, PartialEq, Eq)]
pub struct BranchingDatum {
    p: u64,
    rows: Vec<Vec<u64>>,
    points: Option<Vec<PolePoint>>,
}

impl BranchingDatum {
    /// A datum without attached branch points; rows are sorted into canonical
    /// (lexicographic) order. Validity is a separate check
    /// ([`crate::moduli::validate_datum`]).
    pub fn new(p: u64, rows: Vec<Vec<u64>>) -> Result<BranchingDatum> {
        if rows.is_empty() {
            return Err(Error::InvalidDatum("a datum needs at least one row".into()));
        }
        let n = rows[0].len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidDatum(
                "all rows must share one positive length".into(),
            ));
        }
        let mut rows = rows;
        rows.sort();
        Ok(BranchingDatum {
            p,
            rows,
            points: None,
        })
    }

    /// A datum with aligned branch points; row/point pairs are sorted by
    /// point. Points must be distinct, with at most one at infinity.
    pub fn with_points(
        p: u64,
        rows: Vec<Vec<u64>>,
        points: Vec<PolePoint>,
    ) -> Result<BranchingDatum> {
        if rows.len() != points.len() {
            return Err(Error::InvalidDatum(format!(
                "{} rows but {} points",
                rows.len(),
                points.len()
            )));
        }
        let d = BranchingDatum::new(p, rows.clone())?;
        let n = d.n();
        let distinct: BTreeSet<&PolePoint> = points.iter().collect();
        if distinct.len() != points.len() {
            return Err(Error::InvalidDatum("branch points must be distinct".into()));
        }
        let mut pairs: Vec<(PolePoint, Vec<u64>)> = points.into_iter().zip(rows).collect();
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        let (points, rows): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        debug_assert!(rows.iter().all(|r| r.len() == n));
        Ok(BranchingDatum {
            p,
            rows,
            points: Some(points),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Number of levels (columns).
    pub fn n(&self) -> usize {
        self.rows[0].len()
    }

    /// Number of branch points (rows).
    pub fn r(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn points(&self) -> Option<&[PolePoint]> {
        self.points.as_deref()
    }

    /// Conductor tuple: column sums.
    pub fn conductors(&self) -> Vec<u64> {
        let mut d = vec![0u64; self.n()];
        for row in &self.rows {
            for (i, e) in row.iter().enumerate() {
                d[i] += e;
            }
        }
        d
    }

    /// Rows in canonical sorted order, independent of attached points.
    pub fn canonical_rows(&self) -> Vec<Vec<u64>> {
        let mut rows = self.rows.clone();
        rows.sort();
        rows
    }

    /// Forgets the points (canonical row order).
    pub fn strip_points(&self) -> BranchingDatum {
        BranchingDatum::new(self.p, self.rows.clone()).expect("shape already checked")
    }

    /// Same matrix up to row permutation.
    pub fn same_matrix(&self, other: &BranchingDatum) -> bool {
        self.p == other.p && self.canonical_rows() == other.canonical_rows()
    }

    /// First `i` columns; all-zero rows are dropped and points stay aligned.
    pub fn truncate(&self, i: usize) -> Result<BranchingDatum> {
        if i == 0 || i > self.n() {
            return Err(Error::InvalidDatum(format!(
                "cannot truncate {} columns to {i}",
                self.n()
            )));
        }
        let mut rows = Vec::new();
        let mut points = self.points.as_ref().map(|_| Vec::new());
        for (j, row) in self.rows.iter().enumerate() {
            let head: Vec<u64> = row[..i].to_vec();
            if head.iter().all(|&e| e == 0) {
                continue;
            }
            rows.push(head);
            if let (Some(ps), Some(orig)) = (points.as_mut(), self.points.as_ref()) {
                ps.push(orig[j].clone());
            }
        }
        if rows.is_empty() {
            return Err(Error::InvalidDatum(
                "truncation removed every branched row".into(),
            ));
        }
        match points {
            Some(ps) => BranchingDatum::with_points(self.p, rows, ps),
            None => BranchingDatum::new(self.p, rows),
        }
    }
}

impl fmt::Display for BranchingDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self
            .rows
            .iter()
            .map(|r| {
                format!(
                    "[{}]",
                    r.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
                )
            })
            .collect();
        write!(f, "[{}]", body.join(","))
    }
}

impl fmt::Debug for BranchingDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Result of reduction: `input = reduced + ℘(correction)`.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub reduced: WittVector,
    pub correction: WittVector,
}

/// Whether no nonzero partial-fraction term (including polynomial-part
/// monomials of positive degree) has order divisible by p.
pub fn is_reduced(u: &WittVector) -> bool {
    let p = u.prime() as u32;
    u.entries().iter().all(|f| {
        f.partial_fractions()
            .terms()
            .iter()
            .all(|(_, ord, _)| ord % p != 0)
    })
}

/// Brings a Witt vector to reduced form, level by level, by cancelling every
/// p-divisible pole term with ℘ of a vector supported at that level. The
/// certificate `correction` witnesses `input = reduced + ℘(correction)`.
///
/// For a vector `h` supported at the level being processed, subtracting
/// `℘(h)` changes that level by exactly `h - h^p` (the universal cross terms
/// all carry factors from both summands below the level, which are zero), so
/// the whole cascade at one level is computed symbolically on the
/// partial-fraction coefficients — from the top order down, each term
/// `c/(x-P)^(pk)` dies and deposits `c^(1/p)/(x-P)^k` — and a single Witt
/// subtraction then propagates the correction to the higher levels.
pub fn reduce(u: &WittVector) -> Result<Reduction> {
    let p = u.prime();
    let pu = p as u32;
    let n = u.len();
    let field = u.field().clone();
    let mut v = u.clone();
    let mut h = WittVector::zero(p, n, &field);
    for level in 0..n {
        let mut pf = v.entry(level).partial_fractions();
        let mut correction = RatFunc::zero(&field);
        for (point, coeffs) in pf.poles.iter_mut() {
            let mut order = coeffs.len();
            while order >= p as usize {
                let c = coeffs[order - 1].clone();
                if order % p as usize == 0 && !c.is_zero() {
                    let root = c.pth_root().ok_or_else(|| Error::NoPthRoot {
                        value: c.to_string(),
                    })?;
                    coeffs[order - 1] = field.zero();
                    let low = order / p as usize;
                    coeffs[low - 1] = coeffs[low - 1].add(&root);
                    correction = correction.add(&RatFunc::pole_term(
                        root,
                        &PolePoint::Finite(point.clone()),
                        low as u32,
                    ));
                }
                order -= 1;
            }
        }
        let mut deg = pf.poly_part.degree().unwrap_or(0);
        while deg >= p as usize {
            let c = pf.poly_part.coeff(deg);
            if deg.is_multiple_of(p as usize) && !c.is_zero() {
                let root = c.pth_root().ok_or_else(|| Error::NoPthRoot {
                    value: c.to_string(),
                })?;
                let low = deg / p as usize;
                let delta = crate::algebra::poly::Poly::monomial(root.clone(), low)
                    .sub(&crate::algebra::poly::Poly::monomial(c, deg));
                pf.poly_part = pf.poly_part.add(&delta);
                correction =
                    correction.add(&RatFunc::pole_term(root, &PolePoint::Infinity, low as u32));
            }
            deg -= 1;
        }
        if correction.is_zero() {
            continue;
        }
        let hstep = WittVector::zero(p, n, &field).with_entry(level, correction);
        v = v.sub(&hstep.asw_isogeny()?)?;
        h = h.add(&hstep)?;
        debug_assert!(v
            .entry(level)
            .partial_fractions()
            .terms()
            .iter()
            .all(|(_, ord, _)| ord % pu != 0));
    }
    debug_assert!(is_reduced(&v));
    Ok(Reduction {
        reduced: v,
        correction: h,
    })
}

/// Per-branch-point ramification data of a cover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RamificationProfile {
    pub points: Vec<PolePoint>,
    /// Upper jumps per point per level; -1 at unbranched levels.
    pub jumps: Vec<Vec<i64>>,
    /// Inertia exponents: the inertia group at the j-th point is `Z/p^inertia[j]`.
    pub inertia: Vec<usize>,
    /// Swan conductor per point per level.
    pub swan: Vec<Vec<u64>>,
}

/// Full analysis of a cover given by a Witt vector.
#[derive(Debug, Clone)]
pub struct CoverAnalysis {
    pub reduced: WittVector,
    pub correction: WittVector,
    pub datum: BranchingDatum,
    pub profile: RamificationProfile,
}

/// Reduces (if necessary) and reads off the branching datum by the jump
/// formula `u_i = max_l p^(i-l) * ord_l` over the levels with a pole.
pub fn analyze_cover(u: &WittVector) -> Result<CoverAnalysis> {
    let reduction = reduce(u)?;
    let v = &reduction.reduced;
    let p = v.prime();
    let n = v.len();
    if v.entry(0).as_constant().is_some() {
        return Err(Error::OrderDrop);
    }
    let mut locus: BTreeSet<PolePoint> = BTreeSet::new();
    for e in v.entries() {
        locus.extend(e.poles());
    }
    let points: Vec<PolePoint> = locus.into_iter().collect();
    let mut rows = Vec::with_capacity(points.len());
    let mut jumps = Vec::with_capacity(points.len());
    let mut inertia = Vec::with_capacity(points.len());
    let mut swan_table = Vec::with_capacity(points.len());
    for pt in &points {
        let ords: Vec<u64> = v.entries().iter().map(|e| e.pole_order(pt) as u64).collect();
        let first = ords.iter().position(|&o| o > 0).expect("point is a pole");
        let mut row = Vec::with_capacity(n);
        let mut jrow = Vec::with_capacity(n);
        for i in 0..n {
            if i < first {
                row.push(0);
                jrow.push(-1);
                continue;
            }
            let jump = (0..=i)
                .map(|l| ords[l] * p.pow((i - l) as u32))
                .max()
                .unwrap();
            row.push(jump + 1);
            jrow.push(jump as i64);
        }
        let mut srow = Vec::with_capacity(n);
        let mut acc = 0u64;
        for (i, &e) in row.iter().enumerate() {
            acc += e * (p.pow(i as u32 + 1) - p.pow(i as u32));
            srow.push(acc);
        }
        rows.push(row);
        jumps.push(jrow);
        inertia.push(n - first);
        swan_table.push(srow);
    }
    let datum = BranchingDatum::with_points(p, rows, points.clone())?;
    // with_points sorts by point; our points were already sorted, so the
    // profile stays aligned.
    debug_assert_eq!(datum.points().unwrap(), points.as_slice());
    Ok(CoverAnalysis {
        datum,
        profile: RamificationProfile {
            points,
            jumps,
            inertia,
            swan: swan_table,
        },
        reduced: reduction.reduced,
        correction: reduction.correction,
    })
}

/// The branching datum (with points) and ramification profile of a cover.
pub fn branching_datum(u: &WittVector) -> Result<(BranchingDatum, RamificationProfile)> {
    let a = analyze_cover(u)?;
    Ok((a.datum, a.profile))
}

/// Genus of each subcover: `g_i = 1 + p^i (g_X - 1) + (1/2) sum_{l<=i} d_l (p^l - p^{l-1})`.
pub fn genus_vector(d: &BranchingDatum, base_genus: u64) -> Result<Vec<u64>> {
    let p = d.p as i128;
    let cond = d.conductors();
    let mut out = Vec::with_capacity(d.n());
    let mut wild: i128 = 0;
    for i in 1..=d.n() {
        let dl = cond[i - 1] as i128;
        wild += dl * (p.pow(i as u32) - p.pow(i as u32 - 1));
        if wild % 2 != 0 {
            return Err(Error::InvalidDatum(format!(
                "non-integral genus at level {i}"
            )));
        }
        let g = 1 + p.pow(i as u32) * (base_genus as i128 - 1) + wild / 2;
        if g < 0 {
            return Err(Error::InvalidDatum(format!(
                "negative genus {g} at level {i}"
            )));
        }
        out.push(g as u64);
    }
    Ok(out)
}

/// Swan conductor of row `j` at level `i` (1-based level).
pub fn swan(d: &BranchingDatum, row: usize, level: usize) -> u64 {
    let p = d.p;
    d.rows[row][..level]
        .iter()
        .enumerate()
        .map(|(l, &e)| e * (p.pow(l as u32 + 1) - p.pow(l as u32)))
        .sum()
}

/// p-ranks and the two branch-point counting vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PRankReport {
    /// sigma_i: p-rank of the level-i subcover.
    pub p_ranks: Vec<u64>,
    /// Number of branch points whose inertia is exactly p^i (i = 1..n).
    pub inertia_counts: Vec<u64>,
    /// Number of nonzero entries in column i (the stratification label).
    pub column_support: Vec<u64>,
}

/// Deuring–Shafarevich closed form on every truncation of the datum.
pub fn p_rank_vector(d: &BranchingDatum) -> PRankReport {
    let p = d.p as i128;
    let n = d.n();
    let mut p_ranks = Vec::with_capacity(n);
    for i in 1..=n {
        // Exact-inertia counts of the level-i truncation.
        let mut counts = vec![0u64; i];
        for row in &d.rows {
            if let Some(first) = row[..i].iter().position(|&e| e > 0) {
                counts[i - first - 1] += 1;
            }
        }
        let mut sigma: i128 = 1 - p.pow(i as u32);
        for (m, &c) in counts.iter().enumerate() {
            let m = m as u32 + 1;
            sigma += p.pow(i as u32 - m) * (p.pow(m) - 1) * c as i128;
        }
        debug_assert!(sigma >= 0, "p-rank of a valid datum is nonnegative");
        p_ranks.push(sigma as u64);
    }
    let mut inertia_counts = vec![0u64; n];
    for row in &d.rows {
        if let Some(first) = row.iter().position(|&e| e > 0) {
            inertia_counts[n - first - 1] += 1;
        }
    }
    let mut column_support = vec![0u64; n];
    for row in &d.rows {
        for (i, &e) in row.iter().enumerate() {
            if e > 0 {
                column_support[i] += 1;
            }
        }
    }
    // Triangular relation between the two counting vectors:
    // support at column i counts rows of inertia >= p^(n-i+1)... i.e. the
    // tail-sums of the inertia counts.
    debug_assert!((1..=n).all(|i| {
        column_support[i - 1] == inertia_counts[n - i..].iter().sum::<u64>()
    }));
    PRankReport {
        p_ranks,
        inertia_counts,
        column_support,
    }
}

/// Builds the standard cover with a prescribed branching datum:
/// `f_i = sum_j c_{j,i} / (x - P_j)^{u_{j,i}}` with `c = 1` exactly at
/// branched levels whose conductor is not 1 mod p.
pub fn construct_cover(d: &BranchingDatum, field: &Field) -> Result<WittVector> {
    let validation = crate::moduli::validate_datum(d);
    if !validation.valid {
        return Err(Error::InvalidDatum(
            validation.first_violation.unwrap_or_default(),
        ));
    }
    let points = d
        .points()
        .ok_or_else(|| Error::InvalidDatum("construction needs branch points".into()))?;
    if field.p() != d.p {
        return Err(Error::FieldMismatch);
    }
    for pt in points {
        if let PolePoint::Finite(v) = pt {
            if v.field() != field {
                return Err(Error::FieldMismatch);
            }
        }
    }
    let infinite = points.iter().filter(|p| **p == PolePoint::Infinity).count();
    if infinite > 1 {
        return Err(Error::InvalidDatum(
            "at most one row may sit at infinity".into(),
        ));
    }
    let p = d.p;
    let n = d.n();
    let mut entries = Vec::with_capacity(n);
    for i in 0..n {
        let mut f = RatFunc::zero(field);
        for (j, row) in d.rows().iter().enumerate() {
            let e = row[i];
            if e >= 2 && e % p != 1 {
                f = f.add(&RatFunc::pole_term(
                    field.one(),
                    &points[j],
                    (e - 1) as u32,
                ));
            }
        }
        entries.push(f);
    }
    WittVector::new(p, entries)
}

/// Picks `r` distinct finite points in the smallest extension of `F_p` that
/// holds them (a convenience for datum round-trips).
pub fn default_points(p: u64, r: usize) -> Result<(Field, Vec<PolePoint>)> {
    let mut m = 1usize;
    while (p.pow(m as u32) as usize) < r {
        m += 1;
    }
    let field = Field::finite(p, m, None)?;
    let pts = field
        .elements()?
        .into_iter()
        .take(r)
        .map(PolePoint::Finite)
        .collect();
    Ok((field, pts))
}
