use std::sync::Arc;
use std::time::Instant;

use super::{
    build_metric, build_space, resolve_v, suites, BuiltMetric, CaseDescriptor, CatalogReport, Check,
    CurvatureReport, FlagSummary, MetricDescriptor, RunConfig, SScan, SearchSummary, ZeroFlagProbe,
    POSITIVE_MARGIN, S_TOL,
};
use crate::chartcurv::{min_flag_curvature, riemann_op, ChartContext};
use crate::error::{Error, Result};
use crate::homspace::{
    catalog, commuting_pair_sectional, kvcl_check, kvcl_check_data, localize_gv, min_lie_sectional,
    vanishing_s_equivalence, randers_perturb, s_curvature_hom, structural_checks, submersion_ratio,
    CosetSpace, InvariantABMetric, RiemannianHomMetric, StructuralReport,
};
use crate::minkowski::{positivity_check, POSITIVITY_GRID};
use crate::numkernel::linalg::axpy;
use crate::numkernel::minimize::SpherePointSet;
use crate::numkernel::{map_indexed, MinimizerConfig};

pub fn cmd_catalog() -> CatalogReport {
    let cases = catalog();
    let admissible = cases.iter().filter(|c| c.admissible).count();
    CatalogReport { cases, admissible }
}

/// `max |S|` at the origin over quasi-random unit rays.
pub(crate) fn s_scan(metric: &InvariantABMetric, rays: usize, seed: u64) -> Result<SScan> {
    let n = metric.n();
    let pts = SpherePointSet::new(&[n], seed);
    let vals = map_indexed(rays, true, |i| {
        let y = pts.point(i).remove(0);
        s_curvature_hom(metric, &y).map(|s| (s.abs(), y))
    });
    let mut best = (0.0, vec![0.0; n]);
    for r in vals {
        let (s, y) = r?;
        if s > best.0 {
            best = (s, y);
        }
    }
    Ok(SScan {
        rays,
        max_abs: best.0,
        argmax: best.1,
    })
}

fn chart_flag_scan(space: &Arc<CosetSpace>, metric: &InvariantABMetric, cfg: &MinimizerConfig) -> Result<FlagSummary> {
    let ctx = ChartContext::new(space.clone());
    let scan = min_flag_curvature(&ctx, &metric.norm_data(), cfg)?;
    Ok(FlagSummary {
        pipeline: "chart".into(),
        min: scan.min.value,
        pole: scan.min.y,
        edge: scan.min.w,
        poles: scan.poles,
    })
}

/// Flags with pole `v` and edge in the first root plane commuting with `v`,
/// through the chart and through the commuting-pair formula for `g_v`.
pub fn zero_flag_probe(metric: &InvariantABMetric, angles: usize) -> Result<Option<ZeroFlagProbe>> {
    let sp = &metric.space;
    let Some(roots) = &sp.roots else {
        return Ok(None);
    };
    if metric.is_riemannian() || !kvcl_check(metric).pass {
        return Ok(None);
    }
    let v = &metric.v;
    let vn = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let commutes = |w: &[f64]| {
        let br = sp.bracket_g(v, w);
        br.iter().fold(0.0f64, |m, x| m.max(x.abs())) <= 1e-12 * vn
    };
    let Some(plane) = roots.planes.iter().find(|p| p.basis.iter().all(|b| commutes(b))) else {
        return Ok(None);
    };
    let gv = localize_gv(metric)?;
    let ctx = ChartContext::new(sp.clone());
    let op = riemann_op(&ctx, &metric.norm_data(), &vec![0.0; sp.n()], v)?;
    let angles = angles.max(1);
    let mut chart_max: f64 = 0.0;
    let mut pair_max: f64 = 0.0;
    for k in 0..angles {
        let th = std::f64::consts::PI * k as f64 / angles as f64;
        let w = axpy(th.cos(), &plane.basis[0], &plane.basis[1].iter().map(|x| x * th.sin()).collect::<Vec<_>>());
        chart_max = chart_max.max(op.flag(&w)?.abs());
        pair_max = pair_max.max(commuting_pair_sectional(&gv, v, &w)?.abs());
    }
    Ok(Some(ZeroFlagProbe {
        plane: format!("plane({},{})", plane.root.0 + 1, plane.root.1 + 1),
        angles,
        chart_max_abs: chart_max,
        commuting_pair_max_abs: pair_max,
    }))
}

pub(crate) fn structural_rows(st: &StructuralReport) -> Vec<Check> {
    vec![
        Check::new(
            "rank_inequality",
            st.rank_ok,
            format!("rk g = {}, rk h = {}", st.rank_g, st.rank_h),
        ),
        Check::new("h_has_no_ideal", st.h_ideal_dim == 0, format!("ideal dimension {}", st.h_ideal_dim)),
        Check::new("k_closed", st.k_closed, "h + Rv under the bracket"),
        Check::new(
            "k_ideal_dim",
            st.k_ideal_dim.is_some_and(|d| d <= 1),
            format!("maximal ideal of g in h + Rv has dimension {:?}", st.k_ideal_dim),
        ),
        Check::new("ad_h_invariance", st.invariance.pass, "inner product on m")
            .value(st.invariance.worst, Some(1e-10)),
    ]
}

fn flag_check(name: &str, flag: &FlagSummary) -> Check {
    Check::new(
        name,
        flag.min > POSITIVE_MARGIN,
        format!(
            "sampled minimum over {} flagpoles ({} pipeline); sampled positivity, not a proof",
            flag.poles, flag.pipeline
        ),
    )
    .value(flag.min, Some(POSITIVE_MARGIN))
    .witness(Some(flag.pole.iter().chain(&flag.edge).cloned().collect()))
}

fn s_check(s: &SScan) -> Check {
    Check::new("s_vanishes", s.max_abs < S_TOL, format!("max |S| over {} rays", s.rays))
        .value(s.max_abs, Some(S_TOL))
        .witness(Some(s.argmax.clone()))
}

fn start(command: &str, cfg: &RunConfig) -> Result<(CurvatureReport, BuiltMetric)> {
    cfg.validate()?;
    let space = build_space(&cfg.space)?;
    let built = build_metric(space.clone(), &cfg.metric)?;
    let mut rep = CurvatureReport::new(command, cfg);
    rep.case = Some(CaseDescriptor::of(&space));
    rep.metric = Some(MetricDescriptor::of(&built));
    Ok((rep, built))
}

/// Structural checks, KVCL, the S/KVCL equivalence, the submersion ratio,
/// a flag-curvature scan at the origin and an S-curvature scan.
pub fn cmd_verify_case(cfg: &RunConfig) -> Result<CurvatureReport> {
    let t0 = Instant::now();
    let (mut rep, built) = start("verify-case", cfg)?;
    let space = built.space.clone();
    let m = &built.metric;

    let st = structural_checks(&space, &m.inner, &m.v, cfg.seed);
    if let Some(f) = &st.failure {
        return Err(Error::Structural(f.clone()));
    }
    rep.checks.extend(structural_rows(&st));

    let pos = positivity_check(&m.phi, m.b(), POSITIVITY_GRID);
    rep.checks.push(
        Check::new("positivity", pos.pass, format!("{POSITIVITY_GRID} points of [-b, b]"))
            .value(pos.min_criterion.min(pos.min_phi), Some(0.0))
            .witness(pos.witness.map(|w| vec![w.s, w.value])),
    );

    let kv = kvcl_check(m);
    rep.checks.push(
        Check::new("kvcl", kv.pass, "<[v,y]_m, y> = <[v,y]_m, v> = 0")
            .value(kv.quadratic_defect.max(kv.linear_defect), Some(crate::homspace::KVCL_TOL))
            .witness(kv.witness.clone()),
    );

    if !m.is_riemannian() {
        let p = vanishing_s_equivalence(m, cfg.scan.s_samples, cfg.seed)?;
        rep.checks.push(
            Check::new(
                "s_kvcl_equivalence",
                p.agree,
                format!("S vanishes: {}, KVCL: {}", p.s_vanishes, p.kvcl_pass),
            )
            .value(p.max_abs_s, Some(S_TOL)),
        );
        if kv.pass {
            let r = submersion_ratio(m, cfg.scan.s_samples.clamp(1, 200), cfg.seed)?;
            rep.checks.push(
                Check::new(
                    "submersion_ratio",
                    r.variance < 1e-8,
                    format!("mean {:.12} over {} fiber directions", r.mean, r.samples),
                )
                .value(r.variance, Some(1e-8)),
            );
        }
    }

    let flag = chart_flag_scan(&space, m, &cfg.scan.minimizer(cfg.seed))?;
    rep.zero_flag = zero_flag_probe(m, 16)?;
    let mut fc = flag_check("flag_positive", &flag);
    if let Some(z) = &rep.zero_flag {
        if z.chart_max_abs < POSITIVE_MARGIN {
            fc.pass = false;
            fc.detail = format!("{}; flags (v, {}) have zero curvature", fc.detail, z.plane);
        }
    }
    rep.checks.push(fc);
    rep.flag_curvature = Some(flag);

    let s = s_scan(m, cfg.scan.s_samples, cfg.seed)?;
    rep.checks.push(s_check(&s));
    rep.s_curvature = Some(s);

    rep.settle();
    rep.wall_time_s = t0.elapsed().as_secs_f64();
    Ok(rep)
}

/// Flag-curvature and S-curvature scans for the configured metric.
pub fn cmd_scan(cfg: &RunConfig) -> Result<CurvatureReport> {
    let t0 = Instant::now();
    let (mut rep, built) = start("scan", cfg)?;
    let flag = chart_flag_scan(&built.space, &built.metric, &cfg.scan.minimizer(cfg.seed))?;
    rep.checks.push(flag_check("flag_positive", &flag));
    rep.flag_curvature = Some(flag);
    rep.s_curvature = Some(s_scan(&built.metric, cfg.scan.s_samples, cfg.seed)?);
    rep.settle();
    rep.wall_time_s = t0.elapsed().as_secs_f64();
    Ok(rep)
}

/// Candidate block scalars: the grid in every block but the last, which is 1.
fn grid_candidates(grid: &[f64], blocks: usize) -> Vec<Vec<f64>> {
    let free = blocks.saturating_sub(1);
    let mut out = vec![Vec::new()];
    for _ in 0..free {
        out = out
            .into_iter()
            .flat_map(|c: Vec<f64>| {
                grid.iter().map(move |g| {
                    let mut d = c.clone();
                    d.push(*g);
                    d
                })
            })
            .collect();
    }
    for c in &mut out {
        c.push(1.0);
    }
    out
}

/// Grid plus multiplicative coordinate refinement over block scalars for
/// positive sectional curvature, then a Randers perturbation of the best
/// candidate.
pub fn cmd_search_metric(cfg: &RunConfig) -> Result<CurvatureReport> {
    let t0 = Instant::now();
    cfg.validate()?;
    if cfg.space.negative_control {
        return Err(Error::Config("search-metric needs an admissible case".into()));
    }
    let space = build_space(&cfg.space)?;
    if space.blocks.is_empty() {
        return Err(Error::Config(format!("{} has no block structure", space.label)));
    }
    let v = resolve_v(&space, &cfg.metric.v)?;
    let coarse = MinimizerConfig {
        samples: 64,
        refine_iters: 10,
        tol: 1e-4,
        seed: cfg.seed,
        starts: 1,
        parallel: true,
    };
    let score = |c: &[f64]| -> Option<f64> {
        let a = space.block_inner(c).ok()?;
        if !kvcl_check_data(&space, &a, &v).pass {
            return None;
        }
        let m = RiemannianHomMetric::new(space.clone(), a).ok()?;
        min_lie_sectional(&m, &coarse).ok().map(|r| r.value)
    };

    let cands = grid_candidates(&cfg.scan.grid, space.blocks.len());
    let mut skipped = 0;
    let mut best: Option<(f64, Vec<f64>)> = None;
    for c in &cands {
        match score(c) {
            Some(k) if best.as_ref().is_none_or(|b| k > b.0) => best = Some((k, c.clone())),
            Some(_) => {}
            None => skipped += 1,
        }
    }
    let Some((mut cur_k, grid_best)) = best else {
        return Err(Error::Precondition("no grid candidate admits a KVCL direction v".into()));
    };

    let mut cur = grid_best.clone();
    let mut factor: f64 = 1.25;
    let free = cur.len() - 1;
    for _ in 0..cfg.scan.refine_iters {
        if free == 0 || factor.ln() < 1e-3 {
            break;
        }
        let mut step: Option<(f64, Vec<f64>)> = None;
        for i in 0..free {
            for f in [factor, 1.0 / factor] {
                let mut c = cur.clone();
                c[i] *= f;
                if let Some(k) = score(&c) {
                    if k > cur_k && step.as_ref().is_none_or(|s| k > s.0) {
                        step = Some((k, c));
                    }
                }
            }
        }
        match step {
            Some((k, c)) => {
                cur_k = k;
                cur = c;
            }
            None => factor = factor.sqrt(),
        }
    }

    let alpha = RiemannianHomMetric::new(space.clone(), space.block_inner(&cur)?)?;
    let mcfg = cfg.scan.minimizer(cfg.seed);
    let lie = min_lie_sectional(&alpha, &mcfg)?;
    let b = alpha.inner.bilinear(&v, &v).sqrt();
    let t = match (cfg.metric.phi.family.as_str(), cfg.metric.phi.t) {
        ("randers", Some(t)) => t,
        _ => 0.05 / b,
    };
    let f = randers_perturb(&alpha, &v, t)?;

    let mut rep = CurvatureReport::new("search-metric", cfg);
    rep.case = Some(CaseDescriptor::of(&space));
    rep.metric = Some(MetricDescriptor::of(&BuiltMetric {
        space: space.clone(),
        alpha: alpha.clone(),
        metric: f.clone(),
        scalars: Some(cur.clone()),
    }));
    let lie_flag = FlagSummary {
        pipeline: "lie".into(),
        min: lie.value,
        pole: lie.pole.clone(),
        edge: lie.edge.clone(),
        poles: lie.poles,
    };
    rep.checks.push(flag_check("sectional_positive", &lie_flag));
    let flag = chart_flag_scan(&space, &f, &mcfg)?;
    rep.checks.push(flag_check("randers_flag_positive", &flag));
    rep.flag_curvature = Some(flag);
    let s = s_scan(&f, cfg.scan.s_samples, cfg.seed)?;
    rep.checks.push(s_check(&s));
    rep.s_curvature = Some(s);
    rep.search = Some(SearchSummary {
        candidates: cands.len(),
        skipped,
        grid_best,
        refined: cur,
        lie_min: lie.value,
        poles: lie.poles,
        randers_t: t,
        found: lie.value > POSITIVE_MARGIN,
    });
    rep.settle();
    rep.wall_time_s = t0.elapsed().as_secs_f64();
    Ok(rep)
}

/// Runs the enabled oracle suites over the built-in case set.
pub fn cmd_crosscheck(cfg: &RunConfig) -> Result<CurvatureReport> {
    let t0 = Instant::now();
    cfg.validate()?;
    let mut rep = CurvatureReport::new("crosscheck", cfg);
    let pts = cfg.scan.oracle_points.max(1);
    for suite in &cfg.oracle.enable {
        match suite.as_str() {
            "s-curvature" => rep.oracle.extend(suites::s_curvature_suite(pts, cfg.seed)?),
            "localization" => rep.oracle.extend(suites::localization_suite(pts.min(10), cfg.seed)?),
            "zero-flag" => rep.oracle.extend(suites::zero_flag_suite(3, cfg.seed)?),
            "riemannian" => rep.oracle.extend(suites::riemannian_suite(pts, cfg.seed)?),
            "structural" => rep.checks.extend(suites::structural_suite(cfg.seed)?),
            other => return Err(Error::Config(format!("unknown oracle suite '{other}'"))),
        }
    }
    rep.settle();
    rep.wall_time_s = t0.elapsed().as_secs_f64();
    Ok(rep)
}
