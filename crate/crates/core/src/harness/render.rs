use std::fmt::Write;

use super::{CatalogReport, CurvatureReport};

fn mark(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn vec_text(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("[{}]", parts.join(", "))
}

pub(super) fn report_text(r: &CurvatureReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} (seed {})", r.command, r.config.seed);
    if let Some(c) = &r.case {
        let id = c.id.map(|i| format!("case {i}: ")).unwrap_or_default();
        let _ = writeln!(s, "  space   {id}{}  dim g {}, dim h {}, dim m {}", c.label, c.dim_g, c.dim_h, c.dim_m);
    }
    if let Some(m) = &r.metric {
        if let Some(sc) = &m.scalars {
            let _ = writeln!(s, "  blocks  {}", vec_text(sc));
        }
        let kind = if m.riemannian { " (Riemannian)" } else { "" };
        let _ = writeln!(s, "  phi     {:?}, b = {:.6}{kind}", m.phi.family, m.b);
    }
    if let Some(q) = &r.search {
        let _ = writeln!(
            s,
            "  search  {} candidates ({} skipped), grid best {}, refined {}",
            q.candidates,
            q.skipped,
            vec_text(&q.grid_best),
            vec_text(&q.refined)
        );
        let _ = writeln!(s, "          min sectional {:.6e} over {} flagpoles, randers t = {:.6}", q.lie_min, q.poles, q.randers_t);
    }
    for c in &r.checks {
        let val = match (c.value, c.tolerance) {
            (Some(v), Some(t)) => format!("  value {v:.3e} (tol {t:.0e})"),
            (Some(v), None) => format!("  value {v:.3e}"),
            _ => String::new(),
        };
        let _ = writeln!(s, "  [{}] {}{val}  {}", mark(c.pass), c.name, c.detail);
    }
    if let Some(f) = &r.flag_curvature {
        let _ = writeln!(
            s,
            "  flag    min {:.6e} ({} pipeline, {} flagpoles sampled)",
            f.min, f.pipeline, f.poles
        );
        let _ = writeln!(s, "          pole {}", vec_text(&f.pole));
        let _ = writeln!(s, "          edge {}", vec_text(&f.edge));
    }
    if let Some(z) = &r.zero_flag {
        let _ = writeln!(
            s,
            "  zero    flags (v, {}): chart max |K| {:.3e}, commuting pair max |K| {:.3e}",
            z.plane, z.chart_max_abs, z.commuting_pair_max_abs
        );
    }
    if let Some(q) = &r.s_curvature {
        let _ = writeln!(s, "  S       max |S| {:.3e} over {} rays", q.max_abs, q.rays);
    }
    for o in &r.oracle {
        let _ = writeln!(
            s,
            "  [{}] {:<26} {:<40} residual {:.3e} (tol {:.0e}, {} points)",
            mark(o.pass),
            o.suite,
            o.case,
            o.max_residual,
            o.tolerance,
            o.points
        );
    }
    let _ = writeln!(s, "  result  {}  ({:.2} s)", mark(r.pass), r.wall_time_s);
    s
}

pub(super) fn catalog_text(r: &CatalogReport) -> String {
    let mut s = String::new();
    for c in &r.cases {
        let tag = if c.admissible { "admissible" } else { "excluded" };
        let _ = writeln!(s, "({:>2}) {:<12} {:<28} {:<10} {}", c.id, c.g, c.space, tag, c.parameters);
        if let Some(e) = &c.exclusion {
            let _ = writeln!(s, "      {e}");
        }
    }
    let _ = writeln!(s, "{} cases, {} admissible", r.cases.len(), r.admissible);
    s
}
