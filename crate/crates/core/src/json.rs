//! JSON wire formats: Witt-vector and datum inputs, and the report shapes
//! emitted by the command-line tools (all carrying `format_version`).

use serde::{Deserialize, Serialize};

use crate::algebra::{parse_point, parse_ratfunc, Field, Param, PolePoint};
use crate::deform::DeformationCertificate;
use crate::error::{Error, Result};
use crate::moduli::PartitionGraph;
use crate::ramify::{BranchingDatum, CoverAnalysis, PRankReport};
use crate::witt::WittVector;

pub const FORMAT_VERSION: u32 = 1;

/// Builds a coefficient field from a name like `F5`, `F4`, `F25(a)`,
/// `F2(t)`; an explicit modulus overrides the default irreducible.
pub fn field_from_name(name: &str, modulus: Option<Vec<u64>>) -> Result<Field> {
    let name = name.trim();
    let rest = name
        .strip_prefix('F')
        .ok_or_else(|| Error::Parse(format!("field name `{name}` must start with F")))?;
    let (qpart, param) = match rest.find('(') {
        None => (rest, None),
        Some(i) => {
            let inner = rest[i..]
                .strip_prefix('(')
                .and_then(|s| s.strip_suffix(')'))
                .ok_or_else(|| Error::Parse(format!("malformed field name `{name}`")))?;
            let sym = inner.trim();
            let param = match sym {
                "t" => Param::T,
                "a" => Param::A,
                other => {
                    return Err(Error::Parse(format!(
                        "unknown field parameter `{other}` (expected t or a)"
                    )))
                }
            };
            (&rest[..i], Some(param))
        }
    };
    let q: u64 = qpart
        .parse()
        .map_err(|_| Error::Parse(format!("bad field order in `{name}`")))?;
    if q < 2 {
        return Err(Error::Parse(format!("field order {q} is too small")));
    }
    let mut p = 2;
    while !q.is_multiple_of(p) {
        p += 1;
    }
    let mut m = 0usize;
    let mut rem = q;
    while rem.is_multiple_of(p) {
        rem /= p;
        m += 1;
    }
    if rem != 1 {
        return Err(Error::Parse(format!("{q} is not a prime power")));
    }
    match param {
        None => Field::finite(p, m, modulus),
        Some(pr) => Field::parametric(p, m, modulus, pr),
    }
}

/// A Witt vector on the wire: header plus rational-function strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WittInput {
    pub p: u64,
    pub n: usize,
    pub field: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u64>>,
    pub entries: Vec<String>,
}

impl WittInput {
    pub fn to_witt(&self) -> Result<WittVector> {
        let field = field_from_name(&self.field, self.modulus.clone())?;
        if field.p() != self.p {
            return Err(Error::Parse(format!(
                "field {} has characteristic {}, not {}",
                self.field,
                field.p(),
                self.p
            )));
        }
        if self.entries.len() != self.n {
            return Err(Error::Parse(format!(
                "{} entries but n = {}",
                self.entries.len(),
                self.n
            )));
        }
        let entries: Result<Vec<_>> = self
            .entries
            .iter()
            .map(|s| parse_ratfunc(s, &field))
            .collect();
        WittVector::new(self.p, entries?)
    }

    pub fn from_witt(w: &WittVector) -> WittInput {
        WittInput {
            p: w.prime(),
            n: w.len(),
            field: w.field().name(),
            modulus: if w.field().m() > 1 {
                Some(w.field().finite_field().modulus().to_vec())
            } else {
                None
            },
            entries: w.entries().iter().map(|e| e.to_string()).collect(),
        }
    }
}

/// A branching datum on the wire.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatumInput {
    pub p: u64,
    pub n: usize,
    pub rows: Vec<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u64>>,
}

impl DatumInput {
    pub fn to_datum(&self) -> Result<BranchingDatum> {
        if self.rows.iter().any(|r| r.len() != self.n) {
            return Err(Error::Parse(format!("rows must have {} columns", self.n)));
        }
        match &self.points {
            None => BranchingDatum::new(self.p, self.rows.clone()),
            Some(pts) => {
                let field_name = self
                    .field
                    .clone()
                    .unwrap_or_else(|| format!("F{}", self.p));
                let field = field_from_name(&field_name, self.modulus.clone())?;
                let points: Result<Vec<PolePoint>> =
                    pts.iter().map(|s| parse_point(s, &field)).collect();
                BranchingDatum::with_points(self.p, self.rows.clone(), points?)
            }
        }
    }

    pub fn from_datum(d: &BranchingDatum) -> DatumInput {
        DatumInput {
            p: d.p(),
            n: d.n(),
            rows: d.rows().to_vec(),
            points: d
                .points()
                .map(|ps| ps.iter().map(|p| p.to_string()).collect()),
            field: None,
            modulus: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PointReport {
    pub point: String,
    pub conductors: Vec<u64>,
    pub jumps: Vec<i64>,
    pub inertia_exponent: usize,
    pub swan: Vec<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeReport {
    pub format_version: u32,
    pub field: String,
    pub p: u64,
    pub n: usize,
    pub reduced: Vec<String>,
    pub correction: Vec<String>,
    pub rows: Vec<Vec<u64>>,
    pub points: Vec<String>,
    pub conductors: Vec<u64>,
    pub branch_points: Vec<PointReport>,
    pub genus: Vec<u64>,
    pub p_rank: Vec<u64>,
    pub inertia_counts: Vec<u64>,
    pub column_support: Vec<u64>,
    pub truncated_rows: Vec<Vec<Vec<u64>>>,
}

pub fn analyze_report(a: &CoverAnalysis, pr: &PRankReport, genus: &[u64]) -> AnalyzeReport {
    let d = &a.datum;
    let truncated_rows = (1..=d.n())
        .map(|i| {
            d.truncate(i)
                .map(|t| t.canonical_rows())
                .unwrap_or_default()
        })
        .collect();
    AnalyzeReport {
        format_version: FORMAT_VERSION,
        field: a.reduced.field().name(),
        p: d.p(),
        n: d.n(),
        reduced: a.reduced.entries().iter().map(|e| e.to_string()).collect(),
        correction: a
            .correction
            .entries()
            .iter()
            .map(|e| e.to_string())
            .collect(),
        rows: d.rows().to_vec(),
        points: d
            .points()
            .map(|ps| ps.iter().map(|p| p.to_string()).collect())
            .unwrap_or_default(),
        conductors: d.conductors(),
        branch_points: a
            .profile
            .points
            .iter()
            .enumerate()
            .map(|(j, pt)| PointReport {
                point: pt.to_string(),
                conductors: d.rows()[j].clone(),
                jumps: a.profile.jumps[j].clone(),
                inertia_exponent: a.profile.inertia[j],
                swan: a.profile.swan[j].clone(),
            })
            .collect(),
        genus: genus.to_vec(),
        p_rank: pr.p_ranks.clone(),
        inertia_counts: pr.inertia_counts.clone(),
        column_support: pr.column_support.clone(),
        truncated_rows,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VertexReport {
    pub rows: Vec<Vec<u64>>,
    pub strata: Vec<u64>,
    pub essential_free: bool,
    pub dim_cover: u64,
    pub dim_curve: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnumerateReport {
    pub format_version: u32,
    pub p: u64,
    pub conductors: Vec<u64>,
    pub vertices: Vec<VertexReport>,
    pub edges: Vec<(usize, usize)>,
    pub components: Vec<usize>,
    pub irreducible: bool,
    pub irreducible_closed_form: bool,
    pub disconnected_criterion: bool,
    pub graph_disconnected: bool,
}

pub fn enumerate_report(g: &PartitionGraph) -> Result<EnumerateReport> {
    Ok(EnumerateReport {
        format_version: FORMAT_VERSION,
        p: g.p,
        conductors: g.conductors.clone(),
        vertices: g
            .vertices
            .iter()
            .zip(&g.info)
            .map(|(v, i)| VertexReport {
                rows: v.rows().to_vec(),
                strata: i.strata.clone(),
                essential_free: i.essential_free,
                dim_cover: i.dim_cover,
                dim_curve: i.dim_curve,
            })
            .collect(),
        edges: g.edges.clone(),
        components: g.component_indices(),
        irreducible: crate::moduli::irreducible(&g.conductors, g.p)?,
        irreducible_closed_form: crate::moduli::irreducible_closed_form(&g.conductors, g.p)?,
        disconnected_criterion: crate::moduli::disconnected_criterion(g.conductors[0], g.p),
        graph_disconnected: g.is_disconnected(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentsReport {
    pub format_version: u32,
    pub p: u64,
    pub conductors: Vec<u64>,
    pub components: Vec<VertexReport>,
    pub irreducible: bool,
    pub irreducible_closed_form: bool,
    pub disconnected_criterion: bool,
}

/// Component listing straight from the enumeration (no cover graph, so this
/// also works for large strata).
pub fn components_report(d: &[u64], p: u64) -> Result<ComponentsReport> {
    let comps = crate::moduli::components(d, p)?;
    Ok(ComponentsReport {
        format_version: FORMAT_VERSION,
        p,
        conductors: d.to_vec(),
        irreducible: comps.len() == 1,
        irreducible_closed_form: crate::moduli::irreducible_closed_form(d, p)?,
        disconnected_criterion: crate::moduli::disconnected_criterion(d[0], p),
        components: comps
            .into_iter()
            .map(|c| VertexReport {
                strata: crate::ramify::p_rank_vector(&c.datum).column_support,
                rows: c.datum.rows().to_vec(),
                essential_free: true,
                dim_cover: c.dim_cover,
                dim_curve: c.dim_curve,
            })
            .collect(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusterReport {
    pub special_point: String,
    pub special_row: Vec<u64>,
    pub generic_points: Vec<String>,
    pub generic_rows: Vec<Vec<u64>>,
    pub swan_special: Vec<u64>,
    pub swan_generic: Vec<u64>,
    pub swan_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub format_version: u32,
    pub p: u64,
    pub n: usize,
    pub valid: bool,
    pub special: Vec<String>,
    pub family: Vec<String>,
    pub deformation_type: String,
    pub special_rows: Vec<Vec<u64>>,
    pub generic_rows: Vec<Vec<u64>>,
    pub clusters: Vec<ClusterReport>,
    pub class_ok: bool,
    pub clusters_ok: bool,
    pub refines_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

pub fn certificate_report(c: &DeformationCertificate) -> CertificateReport {
    CertificateReport {
        format_version: FORMAT_VERSION,
        p: c.p,
        n: c.n,
        valid: c.valid,
        special: c.special.entries().iter().map(|e| e.to_string()).collect(),
        family: c.family.entries().iter().map(|e| e.to_string()).collect(),
        deformation_type: c.type_string(),
        special_rows: c.special_datum.rows().to_vec(),
        generic_rows: c.generic_datum.rows().to_vec(),
        clusters: c
            .clusters
            .iter()
            .map(|cl| ClusterReport {
                special_point: cl.special_point.to_string(),
                special_row: cl.special_row.clone(),
                generic_points: cl.generic.iter().map(|(p, _)| p.to_string()).collect(),
                generic_rows: cl.generic.iter().map(|(_, r)| r.clone()).collect(),
                swan_special: cl.swan_pairs.iter().map(|&(a, _)| a).collect(),
                swan_generic: cl.swan_pairs.iter().map(|&(_, b)| b).collect(),
                swan_ok: cl.swan_ok,
            })
            .collect(),
        class_ok: c.class_ok,
        clusters_ok: c.clusters_ok,
        refines_ok: c.refines_ok,
        failure: c.failure.clone(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitReport {
    pub format_version: u32,
    pub p: u64,
    pub input_row: Vec<u64>,
    pub rows: Vec<Vec<u64>>,
    pub column_sums: Vec<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExactnessSearchReport {
    pub format_version: u32,
    pub p: u64,
    pub pole_order_at_zero: u64,
    pub pole_order_at_a: u64,
    pub obstruction_numerators: Vec<String>,
    pub gcd: String,
    pub roots: Vec<String>,
    pub none_over_closure: bool,
    pub exact_for_all_nonzero: bool,
    pub verdict: String,
}

pub fn exactness_search_report(s: &crate::deform::ExactnessSearch) -> ExactnessSearchReport {
    let verdict = if s.exact_for_all_nonzero {
        "exact for every nonzero a".to_string()
    } else if s.none_over_closure {
        "no a; closure-certified".to_string()
    } else if s.roots.is_empty() {
        "no a found in the searched field".to_string()
    } else {
        format!("{} value(s) of a found", s.roots.len())
    };
    ExactnessSearchReport {
        format_version: FORMAT_VERSION,
        p: s.p,
        pole_order_at_zero: s.orders.0,
        pole_order_at_a: s.orders.1,
        obstruction_numerators: s.obstruction_numerators.clone(),
        gcd: s.gcd.clone(),
        roots: s.roots.iter().map(|r| r.to_string()).collect(),
        none_over_closure: s.none_over_closure,
        exact_for_all_nonzero: s.exact_for_all_nonzero,
        verdict,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_names() {
        assert_eq!(field_from_name("F5", None).unwrap().name(), "F5");
        let f4 = field_from_name("F4", None).unwrap();
        assert_eq!((f4.p(), f4.m()), (2, 2));
        let f2t = field_from_name("F2(t)", None).unwrap();
        assert!(f2t.is_parametric());
        assert!(field_from_name("F6", None).is_err());
        assert!(field_from_name("Q", None).is_err());
    }

    #[test]
    fn witt_roundtrip() {
        let src = WittInput {
            p: 5,
            n: 2,
            field: "F5".into(),
            modulus: None,
            entries: vec!["1/x + 1/(x-1)".into(), "1/(x-1)^7 + 1/(x-2)^12".into()],
        };
        let w = src.to_witt().unwrap();
        let back = WittInput::from_witt(&w);
        assert_eq!(back.to_witt().unwrap(), w);
    }

    #[test]
    fn datum_roundtrip_with_points() {
        let src = DatumInput {
            p: 5,
            n: 2,
            rows: vec![vec![2, 6], vec![2, 8], vec![0, 13]],
            points: Some(vec!["0".into(), "1".into(), "2".into()]),
            field: None,
            modulus: None,
        };
        let d = src.to_datum().unwrap();
        assert_eq!(d.conductors(), vec![4, 27]);
        let back = DatumInput::from_datum(&d);
        assert_eq!(back.to_datum().unwrap(), d);
    }
}
