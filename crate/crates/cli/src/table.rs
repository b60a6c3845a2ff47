//! Human-readable renderings of the JSON reports.

use std::fmt::Write;

use asw_core::json::{
    AnalyzeReport, CertificateReport, ComponentsReport, EnumerateReport, ExactnessSearchReport,
    SplitReport,
};

fn rows_string(rows: &[Vec<u64>]) -> String {
    rows.iter()
        .map(|r| {
            format!(
                "[{}]",
                r.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
            )
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn vec_string<T: ToString>(v: &[T]) -> String {
    format!(
        "({})",
        v.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
    )
}

pub fn analyze(r: &AnalyzeReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "field        {}   p={} n={}", r.field, r.p, r.n);
    let _ = writeln!(s, "reduced      {}", r.reduced.join(" | "));
    let _ = writeln!(s, "correction   {}", r.correction.join(" | "));
    let _ = writeln!(s, "conductors   {}", vec_string(&r.conductors));
    let _ = writeln!(s, "genus        {}", vec_string(&r.genus));
    let _ = writeln!(s, "p-rank       {}", vec_string(&r.p_rank));
    let _ = writeln!(s, "supports     {}", vec_string(&r.column_support));
    let _ = writeln!(s, "branch points:");
    for b in &r.branch_points {
        let _ = writeln!(
            s,
            "  {:<12} conductors {:<12} jumps {:<12} inertia p^{} swan {}",
            b.point,
            vec_string(&b.conductors),
            vec_string(&b.jumps),
            b.inertia_exponent,
            vec_string(&b.swan),
        );
    }
    for (i, rows) in r.truncated_rows.iter().enumerate() {
        let _ = writeln!(s, "level {:<2} datum {}", i + 1, rows_string(rows));
    }
    s
}

pub fn enumerate(r: &EnumerateReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "Omega_{} at p={}: {} matrices, {} edges",
        vec_string(&r.conductors),
        r.p,
        r.vertices.len(),
        r.edges.len()
    );
    for (i, v) in r.vertices.iter().enumerate() {
        let mark = if r.components.contains(&i) { "*" } else { " " };
        let _ = writeln!(
            s,
            " {mark} v{i}: {:<28} s={:<10} dim_cov={} dim_curve={}",
            rows_string(&v.rows),
            vec_string(&v.strata),
            v.dim_cover,
            v.dim_curve
        );
    }
    for (a, b) in &r.edges {
        let _ = writeln!(s, "   v{a} -> v{b}");
    }
    let _ = writeln!(
        s,
        "irreducible={} (closed form {}), disconnected_criterion={}, graph_disconnected={}",
        r.irreducible, r.irreducible_closed_form, r.disconnected_criterion, r.graph_disconnected
    );
    s
}

pub fn components(r: &ComponentsReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "components of Omega_{} at p={}: {}",
        vec_string(&r.conductors),
        r.p,
        r.components.len()
    );
    for v in &r.components {
        let _ = writeln!(
            s,
            "   {:<28} s={:<10} dim_cov={} dim_curve={}",
            rows_string(&v.rows),
            vec_string(&v.strata),
            v.dim_cover,
            v.dim_curve
        );
    }
    let _ = writeln!(
        s,
        "irreducible={} (closed form {}), disconnected_criterion={}",
        r.irreducible, r.irreducible_closed_form, r.disconnected_criterion
    );
    s
}

pub fn split(r: &SplitReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} -> {}  (column sums {})",
        vec_string(&r.input_row),
        rows_string(&r.rows),
        vec_string(&r.column_sums)
    );
    s
}

pub fn certificate(r: &CertificateReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{}: {}",
        if r.valid { "VALID" } else { "INVALID" },
        r.deformation_type
    );
    for c in &r.clusters {
        let _ = writeln!(
            s,
            "  over {:<10} {} -> {} [{}]  swan {} vs {} {}",
            c.special_point,
            vec_string(&c.special_row),
            rows_string(&c.generic_rows),
            c.generic_points.join(", "),
            vec_string(&c.swan_special),
            vec_string(&c.swan_generic),
            if c.swan_ok { "ok" } else { "MISMATCH" }
        );
    }
    if let Some(f) = &r.failure {
        let _ = writeln!(s, "  failure: {f}");
    }
    s
}

pub fn exactness(r: &ExactnessSearchReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "dx/(x^{}(x-a)^{}) at p={}: {}",
        r.pole_order_at_zero, r.pole_order_at_a, r.p, r.verdict
    );
    if !r.obstruction_numerators.is_empty() {
        let _ = writeln!(s, "  obstruction numerators: {}", r.obstruction_numerators.join("; "));
        let _ = writeln!(s, "  gcd: {}", r.gcd);
    }
    if !r.roots.is_empty() {
        let _ = writeln!(s, "  roots: {}", r.roots.join(", "));
    }
    s
}
