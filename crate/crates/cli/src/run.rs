//! Scenario dispatch.

use std::path::{Path, PathBuf};

use num_traits::ToPrimitive;
use shintani_core::embed::{Embedding, SignConfig};
use shintani_core::geom::{element_of, Geometry, Identity, IdentityCase, ShintaniSet};
use shintani_core::pipeline::{self, Case, ConstructionParams};
use shintani_core::plane::{check_fixgi, PlaneBasis};
use shintani_core::render::{self, default_styles};
use shintani_core::{Element, Error};

use crate::config::{parse_rational, ScenarioConfig, ScenarioKind};
use crate::report::{Check, Outcome, VerificationReport, Witness};

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub out: PathBuf,
    /// overrides the seed of sampling scenarios
    pub seed: Option<u64>,
    /// working precision: sign start level and plane basis bits
    pub bits: Option<u32>,
    /// precision cap
    pub max_bits: Option<u32>,
}

impl RunOptions {
    pub fn new(out: impl Into<PathBuf>) -> Self {
        RunOptions { out: out.into(), seed: None, bits: None, max_bits: None }
    }
}

/// Subcommand families; each selects scenario kinds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Verify,
    Construct,
    Classify,
    Identities,
    Fdcheck,
    Render,
    Cover,
}

impl Command {
    pub fn accepts(self, k: &ScenarioKind) -> bool {
        match self {
            Command::Verify => true,
            Command::Construct => matches!(k, ScenarioKind::Construction { .. }),
            Command::Classify => matches!(k, ScenarioKind::Case { .. } | ScenarioKind::Inclusion { .. }),
            Command::Identities => matches!(k, ScenarioKind::Identities { .. }),
            Command::Fdcheck => matches!(k, ScenarioKind::Fdcheck { .. }),
            Command::Render => matches!(k, ScenarioKind::Figures { figure, .. } if figure == "colmez"),
            Command::Cover => matches!(k, ScenarioKind::Figures { figure, .. } if figure == "cover"),
        }
    }
}

#[derive(Debug)]
struct Failure {
    outcome: Outcome,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let outcome = match e {
            Error::PrecisionExhausted(_) | Error::Inconclusive(_) => Outcome::Inconclusive,
            _ => Outcome::Error,
        };
        Failure { outcome, msg: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { outcome: Outcome::Error, msg: format!("io: {}", e) }
    }
}

fn bad(msg: impl Into<String>) -> Failure {
    Failure { outcome: Outcome::Error, msg: msg.into() }
}

type Step<T> = std::result::Result<T, Failure>;

struct Ctx<'a> {
    cfg: &'a ScenarioConfig,
    geo: Geometry,
    sign: SignConfig,
    bits: u32,
    out: &'a Path,
}

impl Ctx<'_> {
    fn el(&self, name: &str) -> Step<&Element> {
        self.cfg.get(name).ok_or_else(|| bad(format!("unknown element `{}`", name)))
    }

    fn pair(&self, names: &[String; 2]) -> Step<(&Element, &Element)> {
        Ok((self.el(&names[0])?, self.el(&names[1])?))
    }
}

fn effective_precision(cfg: &ScenarioConfig, opts: &RunOptions) -> Step<SignConfig> {
    let mut s = cfg.precision;
    if let Some(b) = opts.bits {
        s.start_bits = b;
    }
    if let Some(m) = opts.max_bits {
        s.max_bits = m;
    }
    s.validate()?;
    Ok(s)
}

/// Run one scenario and write its artifacts; the report itself is returned
/// unwritten.
pub fn run_scenario(cfg: &ScenarioConfig, id: &str, opts: &RunOptions) -> VerificationReport {
    let bits = [opts.bits.unwrap_or(cfg.precision.start_bits), opts.max_bits.unwrap_or(cfg.precision.max_bits)];
    let Some(sc) = cfg.scenario(id) else {
        return VerificationReport::new(id, "unknown", opts.seed.unwrap_or(0), bits)
            .errored(Outcome::Error, format!("UnknownScenario: no scenario with id `{}`", id));
    };
    let seed = match &sc.kind {
        ScenarioKind::Fdcheck { seed, .. } => opts.seed.unwrap_or(*seed),
        _ => opts.seed.unwrap_or(0),
    };
    let report = VerificationReport::new(id, sc.kind.name(), seed, bits);
    let sign = match effective_precision(cfg, opts) {
        Ok(s) => s,
        Err(f) => return report.errored(f.outcome, f.msg),
    };
    let emb = match Embedding::new(&cfg.spec, cfg.raw.field.embedding_order) {
        Ok(e) => e,
        Err(e) => return report.errored(Outcome::Error, e.to_string()),
    };
    let ctx = Ctx { cfg, geo: Geometry::new(emb, sign), sign, bits: sign.start_bits, out: &opts.out };
    let mut report = report;
    match dispatch(&ctx, id, &sc.kind, seed, &mut report) {
        Ok(()) => report.finish(),
        Err(f) => report.errored(f.outcome, f.msg),
    }
}

fn dispatch(ctx: &Ctx, id: &str, kind: &ScenarioKind, seed: u64, r: &mut VerificationReport) -> Step<()> {
    match kind {
        ScenarioKind::Counterexample { units, pi, window, expect_witnesses } => counterexample(ctx, units, pi, *window, expect_witnesses, r),
        ScenarioKind::Construction { units, pi, overrides, expect_l, l_max, min_power, q_max } => {
            let q = parse_rational(q_max).map_err(|e| bad(e.to_string()))?.to_f64().ok_or_else(|| bad("q_max out of range"))?;
            let (g1, g2) = ctx.pair(units)?;
            let ov = match overrides {
                Some(o) => {
                    let (a, b) = ctx.pair(o)?;
                    Some((a.clone(), b.clone()))
                }
                None => None,
            };
            let params = ConstructionParams { overrides: ov, l_max: *l_max, min_power: *min_power, q_max: q, bits: ctx.bits, ..ConstructionParams::default() };
            construction(ctx, g1, g2, ctx.el(pi)?, &params, *expect_l, r)
        }
        ScenarioKind::Inclusion { units, pi, window } => inclusion(ctx, units, pi, *window, r),
        ScenarioKind::Case { units, pi, expect, window } => case(ctx, units, pi, expect.as_deref(), *window, r),
        ScenarioKind::Identities { units, pi, case } => identities(ctx, units, pi, case.as_deref(), r),
        ScenarioKind::Fdcheck { domain, samples, window, .. } => fdcheck(ctx, &domain.domain, &domain.units, *samples, *window, seed, r),
        ScenarioKind::Direction { units, l, n_points, expect_pass } => direction(ctx, units, *l, *n_points, *expect_pass, r),
        ScenarioKind::Figures { figure, units, domain, pi, block, l, n_points, title } => {
            figures(ctx, id, figure, units, domain.as_deref(), pi.as_deref(), *block, *l, *n_points, title.as_deref(), r)
        }
    }
}

fn unit_power(u1: &Element, u2: &Element, k: (i64, i64)) -> Step<Element> {
    Ok(&u1.pow(k.0)? * &u2.pow(k.1)?)
}

fn counterexample(ctx: &Ctx, units: &[String; 2], pi: &str, window: i64, expect: &[(i64, i64)], r: &mut VerificationReport) -> Step<()> {
    let (u1, u2) = ctx.pair(units)?;
    let p = ctx.el(pi)?;
    let d = ctx.geo.colmez_domain(u1, u2)?;
    let support = ctx.geo.error_support(&d, p, u1, u2, window)?;
    let pd = d.scale_unchecked(&p.inv()?);
    let mut outside = vec![];
    for &k in support.iter().filter(|k| !(0..=1).contains(&k.0) || !(0..=1).contains(&k.1)) {
        let meet = d.scale_unchecked(&unit_power(u1, u2, k)?).intersect(&pd);
        let x = ctx.geo.sample_point(&meet)?;
        if !(meet.contains(&x) && pd.contains(&x)) {
            return Err(bad(format!("witness for {:?} failed its own membership test", k)));
        }
        outside.push(Witness::element("point of u^k D and pi^-1 D", &x).with_exponents(k));
    }
    r.push(Check::new("support", true, format!("{:?}", support)).informational());
    let n = outside.len();
    let c = Check::new("translates_outside_unit_square", n > 0, format!("{} translates outside {{0,1}}^2", n));
    r.push(if n > 0 { c.witnesses(outside) } else { c.witness(Witness::note("support", format!("{:?}", support))) });
    if !expect.is_empty() {
        let missing: Vec<_> = expect.iter().filter(|k| !support.contains(k)).copied().collect();
        let c = Check::new("expected_pairs_present", missing.is_empty(), format!("expected {:?}", expect));
        r.push(c.witnesses(missing.into_iter().map(|k| Witness::exponents("missing from the support", k))));
    }
    Ok(())
}

fn construction(ctx: &Ctx, g1: &Element, g2: &Element, pi: &Element, params: &ConstructionParams, expect_l: Option<i64>, r: &mut VerificationReport) -> Step<()> {
    let res = pipeline::build_construction(&ctx.geo, g1, g2, pi, params)?;
    for (name, ev) in &res.evidence {
        r.push(Check::new(name, ev.pass, ev.detail.clone()));
    }
    let again = res.reverify(&ctx.geo, pi)?;
    r.push(Check::new("reverify", again, "sign suite and target membership recomputed"));
    if let Some(l) = expect_l {
        r.push(Check::new("expected_power", res.l == l, format!("l = {}, expected {}", res.l, l)).witness(Witness::note("l", res.l.to_string())));
    }
    r.push(
        Check::new("result", true, format!("{:?}, box {:?}", res.case, res.cover.alpha))
            .informational()
            .witness(Witness::element("e1", &res.e1))
            .witness(Witness::element("e2", &res.e2))
            .witness(Witness::element("omega", &res.omega))
            .witness(Witness::element("omega pi", &(&res.omega * pi))),
    );
    Ok(())
}

fn inclusion(ctx: &Ctx, units: &[String; 2], pi: &str, window: i64, r: &mut VerificationReport) -> Step<()> {
    let (e1, e2) = ctx.pair(units)?;
    let p = ctx.el(pi)?;
    let b = ctx.geo.explicit_b(e1, e2)?;
    let cover = ctx.geo.translation_cover(&b, p, e1, e2, window)?;
    let bad_k: Vec<_> = cover.support.iter().filter(|k| k.0 < 0 || k.1 < 0 || k.0 > 1 || k.1 > 2).copied().collect();
    let c = Check::new("cover_within_1_2", bad_k.is_empty(), format!("cover box {:?}, support {:?}", cover.alpha, cover.support));
    r.push(c.witnesses(bad_k.into_iter().map(|k| Witness::exponents("translate outside [0,1]x[0,2]", k))));
    let mut block = ShintaniSet::empty();
    for k1 in 0..=cover.alpha.0.max(0) {
        for k2 in 0..=cover.alpha.1.max(0) {
            block = block.union(&b.scale_unchecked(&unit_power(e1, e2, (k1, k2))?));
        }
    }
    let pb = b.scale_unchecked(&p.inv()?);
    let gap = pb.difference_witness(&block);
    let c = Check::new("exact_inclusion", gap.is_none(), format!("pi^-1 B inside the {:?} block", cover.alpha));
    r.push(match gap {
        Some(v) => c.witness(Witness::element("point of pi^-1 B outside the block", &element_of(&ctx.cfg.spec, &v))),
        None => c,
    });
    Ok(())
}

fn parse_case(s: &str) -> Step<Case> {
    match s.to_ascii_lowercase().as_str() {
        "case1" => Ok(Case::Case1),
        "case2" => Ok(Case::Case2),
        _ => Err(bad(format!("unknown case `{}`", s))),
    }
}

fn case(ctx: &Ctx, units: &[String; 2], pi: &str, expect: Option<&str>, window: i64, r: &mut VerificationReport) -> Step<()> {
    let (e1, e2) = ctx.pair(units)?;
    let cr = pipeline::classify_case(&ctx.geo, e1, e2, ctx.el(pi)?, window)?;
    let detail = format!("{:?}, cover box {:?}, support {:?}", cr.case, cr.cover.alpha, cr.cover.support);
    match expect {
        Some(e) => {
            let want = parse_case(e)?;
            let c = Check::new("case", cr.case == want, detail);
            r.push(if cr.case == want { c } else { c.witness(Witness::exponents("cover box", cr.cover.alpha)) });
        }
        None => r.push(Check::new("case", true, detail)),
    }
    Ok(())
}

fn identities(ctx: &Ctx, units: &[String; 2], pi: &str, case: Option<&str>, r: &mut VerificationReport) -> Step<()> {
    let (e1, e2) = ctx.pair(units)?;
    let p = ctx.el(pi)?;
    let case = match case {
        Some(c) => parse_case(c)?,
        None => pipeline::classify_case(&ctx.geo, e1, e2, p, 6)?.case,
    };
    let (ic, ids): (IdentityCase, &[Identity]) = match case {
        Case::Case1 => (IdentityCase::Case1, &[Identity::Id1, Identity::Id2]),
        Case::Case2 => (IdentityCase::Case2, &[Identity::Id1, Identity::Id2, Identity::Case2Extra]),
    };
    for &id in ids {
        let rep = ctx.geo.verify_identity(ic, id, e1, e2, p)?;
        let detail = format!("{:?} in {:?}: {} and {} cells", id, ic, rep.lhs.len(), rep.rhs.len());
        let mut c = Check::new(&format!("{:?}", id), rep.holds, detail);
        if let Some(w) = &rep.witness {
            c = c.witness(Witness::element("point in exactly one side", w));
        }
        r.push(c);
        if let Some(f) = rep.expected_form {
            r.push(Check::new(&format!("{:?}_four_cell_form", id), f, "left side equals the explicit four-cell union"));
        }
    }
    Ok(())
}

fn domain_of(ctx: &Ctx, domain: &str, u: &Element, v: &Element) -> Step<ShintaniSet> {
    Ok(match domain {
        "colmez" => ctx.geo.colmez_domain(u, v)?,
        "b" => ctx.geo.explicit_b(u, v)?,
        "b1" => ctx.geo.explicit_b1(u, v)?,
        "b2" => ctx.geo.explicit_b2(u, v)?,
        other => return Err(bad(format!("unknown domain `{}`", other))),
    })
}

fn fdcheck(ctx: &Ctx, domain: &str, units: &[String; 2], samples: usize, window: i64, seed: u64, r: &mut VerificationReport) -> Step<()> {
    let (u, v) = ctx.pair(units)?;
    let d = domain_of(ctx, domain, u, v)?;
    let fd = ctx.geo.fundamental_domain_check(&d, u, v, samples, window, seed)?;
    let detail = format!(
        "{} samples, window {}, hit counts {:?}, {} boundary hits, {} exact fallbacks",
        fd.samples, fd.window, fd.histogram, fd.boundary_hits, fd.exact_fallbacks
    );
    let mut c = Check::new("one_translate_per_sample", fd.pass, detail);
    if let Some(w) = &fd.witness {
        let mut wt = Witness::note("sample with a wrong hit count", format!("hits {:?}", w.hits));
        if let [a, b, c] = &w.point[..] {
            wt.element = Some([a.clone(), b.clone(), c.clone()]);
        }
        c = c.witness(wt);
    }
    r.push(c);
    Ok(())
}

fn direction(ctx: &Ctx, units: &[String; 2], l: i64, n_points: usize, expect_pass: bool, r: &mut VerificationReport) -> Step<()> {
    let (g1, g2) = ctx.pair(units)?;
    let basis = PlaneBasis::new(ctx.geo.embedding(), g1, g2, ctx.bits)?;
    let mut checks = vec![];
    let fix = check_fixgi(ctx.geo.embedding(), g1, g2, &ctx.sign)?;
    checks.push(Check::new("fixgi_chain1", fix.chain1, format!("decided at {} bits", fix.bits_used)));
    checks.push(Check::new("fixgi_chain2", fix.chain2, format!("decided at {} bits", fix.bits_used)));
    for (i, t, s) in [(1u8, 0u8, 1), (1, 1, -1), (2, 0, -1), (2, 1, 1)] {
        let d = basis.endpoint_derivative(i, l, t)?;
        let ok = d.sign() == Some(s);
        checks.push(Check::new(&format!("slope_C{}_t{}", i, t), ok, format!("{:.6}, expected sign {}", d.mid_f64(), s)).margin(s as f64 * d.mid_f64()));
        if fix.pass() {
            let lim = basis.limit_derivative(i, t, &ctx.sign);
            let (ok, detail) = match &lim {
                Ok(q) => (true, format!("{:.6}", q.mid_f64())),
                Err(e) => (false, e.to_string()),
            };
            checks.push(Check::new(&format!("limit_C{}_t{}", i, t), ok, detail));
        }
    }
    let db = basis.check_direction_bounds(l, n_points, &ctx.sign)?;
    let c = Check::new("direction_bounds", db.pass, format!("l = {}, {} failures", db.l, db.failures.len())).margin(db.min_margin);
    checks.push(c.witnesses(db.failures.iter().take(8).map(|f| Witness::note("side condition", f.clone()))));
    if expect_pass {
        checks.into_iter().for_each(|c| r.push(c));
    } else {
        let failed: Vec<Witness> = checks.iter().filter(|c| !c.pass).map(|c| Witness::note(&c.name, c.detail.clone())).collect();
        checks.into_iter().for_each(|c| r.push(c.informational()));
        let any = !failed.is_empty();
        let c = Check::new("failure_reproduced", any, "these units are expected to violate the conditions");
        r.push(if any { c.witnesses(failed) } else { c });
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn figures(
    ctx: &Ctx,
    id: &str,
    figure: &str,
    units: &[String; 2],
    domain: Option<&str>,
    pi: Option<&str>,
    block: Option<(i64, i64)>,
    l: i64,
    n_points: usize,
    title: Option<&str>,
    r: &mut VerificationReport,
) -> Step<()> {
    let (u, v) = ctx.pair(units)?;
    let basis = PlaneBasis::new(ctx.geo.embedding(), u, v, ctx.bits)?;
    let mut scene = match figure {
        "colmez" => render::colmez_scene(&basis, l, n_points)?,
        "cover" => {
            let p = ctx.el(pi.ok_or_else(|| bad("cover figure needs `pi`"))?)?;
            let d = domain_of(ctx, domain.unwrap_or("colmez"), u, v)?;
            render::cover_scene(title.unwrap_or(id), &basis, &d, block.unwrap_or((1, 1)), p, n_points)?
        }
        other => return Err(bad(format!("unknown figure `{}`", other))),
    };
    if let Some(t) = title {
        scene.title = t.to_string();
    }
    let fig = render::render(&scene, &default_styles());
    std::fs::create_dir_all(ctx.out)?;
    let files = [
        (format!("{}.svg", id), fig.svg.clone()),
        (format!("{}.csv", id), fig.csv.clone()),
        (format!("{}.summary.json", id), serde_json::to_string_pretty(&fig.summary).expect("summary serializes") + "\n"),
    ];
    for (name, body) in files {
        std::fs::write(ctx.out.join(&name), body)?;
        r.artifacts.push(name);
    }
    let s = &fig.summary;
    r.push(Check::new("rendered", s.curves > 0, format!("{} curves, {} markers, bbox {:?}", s.curves, s.markers, s.bbox)));
    Ok(())
}

/// Scenario ids selected by a subcommand, in config order.
pub fn select(cfg: &ScenarioConfig, cmd: Command) -> Vec<String> {
    cfg.raw.scenarios.iter().filter(|s| cmd.accepts(&s.kind)).map(|s| s.id.clone()).collect()
}

/// Run a subcommand: every matching scenario, or just `only`. Reports are
/// written to the output directory and their paths plus artifacts returned.
pub fn run_command(cfg: &ScenarioConfig, cmd: Command, only: Option<&str>, opts: &RunOptions) -> std::io::Result<(Outcome, Vec<PathBuf>, Vec<VerificationReport>)> {
    let ids = match only {
        Some(id) => vec![id.to_string()],
        None => select(cfg, cmd),
    };
    let mut paths = vec![];
    let mut reports = vec![];
    for id in ids {
        let rep = match cfg.scenario(&id) {
            Some(sc) if !cmd.accepts(&sc.kind) => VerificationReport::new(&id, sc.kind.name(), opts.seed.unwrap_or(0), [0, 0])
                .errored(Outcome::Error, format!("scenario `{}` of kind {} is not handled by {:?}", id, sc.kind.name(), cmd)),
            _ => run_scenario(cfg, &id, opts),
        };
        paths.push(rep.write(&opts.out)?);
        paths.extend(rep.artifacts.iter().map(|a| opts.out.join(a)));
        reports.push(rep);
    }
    let outcome = Outcome::combine(reports.iter().map(|r| r.outcome));
    Ok((outcome, paths, reports))
}
