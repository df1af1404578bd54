use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CliError, Common, Input, Outcome, Report};
use crate::algebra::{GaussRat, IntervalBox, Poly, PolyMatrix, VarContext};
use crate::discs::{
    persistence_experiment, solve_bishop, verify_second_order, winding_count, Branch, DiscFamily,
    DiscProblem, TRange,
};
use crate::geometry::{cr_dimension_at, GenericSubmanifold};
use crate::images::{
    build_sharp_example, equidim_stability, image_singular_locus, perturb_2jet, perturbability,
    search_linear_perturbation, HoloMap, SearchOptions,
};
use crate::parser::{parse_constant, parse_expression, ProblemFile};
use crate::quadratic::{
    ck_example, classify as classify_ab, corresponds_parabolic, cr_image_obstruction,
    extract_quadratic, image_graph, not_bishop_small_sing, realize, removability_test, QuadClass,
    RayWitness, RemovabilityTag, DEFAULT_ORDER,
};

const DEFAULT_BUDGET: usize = 10_000;
const DEFAULT_DEPTH: usize = 20;

fn bad(msg: impl Into<String>) -> CliError {
    CliError::input("E_BAD_VALUE", msg)
}

fn constant(s: &str) -> Result<GaussRat, CliError> {
    Ok(parse_constant(s.trim(), 1, 1)?)
}

fn real_rat(s: &str) -> Result<BigRational, CliError> {
    let c = constant(s)?;
    if !c.is_real() {
        return Err(bad(format!("`{s}` must be real")));
    }
    Ok(c.re)
}

fn number<T: std::str::FromStr>(s: &str, what: &str) -> Result<T, CliError> {
    s.trim()
        .parse()
        .map_err(|_| bad(format!("{what} must be a number, got `{s}`")))
}

fn point_of(
    common: &Common,
    ctx: &Arc<VarContext>,
    file_point: &[GaussRat],
) -> Result<Vec<GaussRat>, CliError> {
    let Some(text) = common.point.as_ref() else {
        return Ok(file_point.to_vec());
    };
    let p: Vec<GaussRat> = text.split(',').map(constant).collect::<Result<_, _>>()?;
    if p.len() != ctx.len() {
        return Err(CliError::input(
            "E_DIMENSION",
            format!("point has {} coordinates, expected {}", p.len(), ctx.len()),
        ));
    }
    Ok(p)
}

/// `lo:hi` for every coordinate, or a comma-separated list of them. The
/// default is `[−1, 1]` per real coordinate.
fn parse_box(text: Option<String>, dims: usize) -> Result<IntervalBox, CliError> {
    let Some(text) = text else {
        return Ok(IntervalBox::unit(dims));
    };
    let parts: Vec<&str> = text.split(',').collect();
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for part in &parts {
        let (a, b) = part
            .split_once(':')
            .ok_or_else(|| bad(format!("box entry `{part}` is not lo:hi")))?;
        lo.push(real_rat(a)?);
        hi.push(real_rat(b)?);
    }
    if parts.len() == 1 {
        lo = vec![lo[0].clone(); dims];
        hi = vec![hi[0].clone(); dims];
    }
    if lo.len() != dims {
        return Err(CliError::input(
            "E_DIMENSION",
            format!("box has {} coordinates, expected {dims}", lo.len()),
        ));
    }
    IntervalBox::new(lo, hi).map_err(|e| bad(e.to_string()))
}

fn fmt_point(p: &[GaussRat]) -> String {
    if p.iter().all(GaussRat::is_zero) {
        "0".into()
    } else {
        format!(
            "({})",
            p.iter()
                .map(GaussRat::to_string)
                .collect::<Vec<_>>()
                .join(", ")
        )
    }
}

fn fmt_vec(v: &[GaussRat]) -> String {
    format!(
        "({})",
        v.iter()
            .map(GaussRat::to_string)
            .collect::<Vec<_>>()
            .join(", ")
    )
}

fn manifold(pf: &ProblemFile, p: Vec<GaussRat>) -> Result<GenericSubmanifold, CliError> {
    Ok(GenericSubmanifold::new(
        &pf.manifold.ctx,
        pf.manifold.real_equations(),
        p,
    )?)
}

fn holomap(pf: &ProblemFile) -> Result<HoloMap, CliError> {
    let m = pf
        .map
        .as_ref()
        .ok_or_else(|| CliError::input("E_MISSING_SECTION", "this task needs a [map] section"))?;
    Ok(HoloMap::new(&pf.manifold.ctx, m.components.clone())?)
}

fn describe_manifold(r: &mut Report, pf: &ProblemFile, p: &[GaussRat]) {
    r.text("variables", pf.manifold.ctx.names().join(", "));
    r.polys("real equations", pf.manifold.real_equations().iter());
    r.text("codimension", pf.manifold.codimension());
    r.text("point", fmt_point(p));
}

pub(super) fn analyze(input: &Input, common: &Common) -> Result<Outcome, CliError> {
    let pf = input.require()?;
    let ctx = &pf.manifold.ctx;
    let p = point_of(common, ctx, &pf.manifold.point)?;
    let mut r = Report::new("analyze");
    describe_manifold(&mut r, pf, &p);
    let eqs = pf.manifold.real_equations();
    let cr = cr_dimension_at(ctx, &eqs, &p)?;
    r.text("CR dimension at point", cr);
    match &pf.map {
        Some(_) => {
            let f = holomap(pf)?;
            let n = manifold(pf, p.clone())?;
            r.polys("map", f.components().iter());
            let locus = image_singular_locus(&n, &f)?;
            r.polys("minors", locus.minors.iter());
            r.text("local diffeomorphism at point", locus.local_diffeo);
            r.verdict = if locus.singular_at_base {
                format!("CR singular at F({})", fmt_point(&p))
            } else {
                format!("CR point at F({})", fmt_point(&p))
            };
            r.note("F restricted to N is checked to be a local diffeomorphism only; global injectivity is not decided");
        }
        None => {
            let n = ctx.len();
            let mut rows: Vec<Poly> = Vec::new();
            for e in &eqs {
                rows.extend((0..n).map(|l| {
                    if ctx.is_real(l) {
                        Poly::zero(ctx)
                    } else {
                        e.wirtinger(l, false)
                    }
                }));
            }
            for v in 0..n {
                if ctx.is_real(v) {
                    rows.extend((0..n).map(|l| {
                        if l == v {
                            Poly::one(ctx)
                        } else {
                            Poly::zero(ctx)
                        }
                    }));
                }
            }
            let generic =
                n - PolyMatrix::new(rows.len() / n.max(1), n, rows).map_or(0, |m| m.generic_rank());
            r.text("generic CR dimension", generic);
            r.verdict = if cr > generic {
                format!("CR singular at {}", fmt_point(&p))
            } else {
                format!("CR point at {}", fmt_point(&p))
            };
        }
    }
    Ok((r, None, None))
}

pub(super) fn stability(input: &Input, common: &Common) -> Result<Outcome, CliError> {
    let pf = input.require()?;
    let p = point_of(common, &pf.manifold.ctx, &pf.manifold.point)?;
    let n = manifold(pf, p.clone())?;
    let f = holomap(pf)?;
    let v = equidim_stability(&n, &f, &p)?;
    let mut r = Report::new("stability");
    describe_manifold(&mut r, pf, &p);
    r.polys("map", f.components().iter());
    r.text("det DF", &v.det);
    if let Some(init) = &v.initial_form {
        r.text("initial form of det DF", init);
    }
    r.list("H_pN basis", v.h.basis.iter().map(|b| fmt_vec(b)));
    if let Some(c) = v.cone_contains_h {
        r.text("H_pN inside tangent cone of {det DF = 0}", c);
    }
    r.verdict = v.tag.as_str().into();
    Ok((r, None, None))
}

pub(super) fn perturb(
    input: &Input,
    common: &Common,
    mode: Option<String>,
    delta: Option<String>,
    depth: Option<usize>,
) -> Result<Outcome, CliError> {
    let pf = input.require()?;
    let ctx = &pf.manifold.ctx;
    let p = point_of(common, ctx, &pf.manifold.point)?;
    let n = manifold(pf, p.clone())?;
    let f = holomap(pf)?;
    let (dim, k, m) = (f.n(), n.k(), f.m());
    let perturbable = perturbability(dim, k, m)?;
    let mode = input.param(mode, "mode").unwrap_or_else(|| {
        if perturbable {
            "linear".into()
        } else {
            "2jet".into()
        }
    });
    let seed = match common.seed {
        Some(s) => s,
        None => input
            .param(None, "seed")
            .map(|s| number(&s, "seed"))
            .transpose()?
            .unwrap_or(0),
    };
    let budget = match common.budget {
        Some(b) => b,
        None => input
            .param(None, "budget")
            .map(|s| number(&s, "budget"))
            .transpose()?
            .unwrap_or(DEFAULT_BUDGET),
    };
    let delta = real_rat(&input.param(delta, "delta").unwrap_or_else(|| "1/10".into()))?;
    if delta.is_negative() {
        return Err(bad("delta must be nonnegative"));
    }
    let depth = match depth {
        Some(d) => d,
        None => input
            .param(None, "depth")
            .map(|s| number(&s, "depth"))
            .transpose()?
            .unwrap_or(DEFAULT_DEPTH),
    };
    let mut r = Report::new("perturb");
    r.provenance.seed = Some(seed);
    describe_manifold(&mut r, pf, &p);
    r.polys("map", f.components().iter());
    r.text("(n, k, m)", format!("({dim}, {k}, {m})"));
    r.text("4n - k < 2(m + 1)", perturbable);
    r.text("mode", &mode);
    r.text("delta", &delta);
    let mut failure = None;
    match mode.as_str() {
        "linear" => {
            let b = parse_box(input.param(common.bbox.clone(), "box"), ctx.real_dims())?;
            r.text("box", &b);
            let opts = SearchOptions {
                b,
                budget,
                seed,
                delta,
                depth,
            };
            let res = search_linear_perturbation(&n, &f, &opts)?;
            r.text("attempts", res.attempts);
            match res.certificate {
                Some(c) => {
                    r.matrix("A", &c.a);
                    r.polys("G", c.g.components().iter());
                    if let crate::algebra::Certification::Certified { leaves, depth } =
                        c.certification
                    {
                        r.text("certificate", format!("no common zero of the maximal minors on N in the box ({leaves} leaves, depth {depth})"));
                    }
                    r.text("replay", c.replay(&n)?);
                    r.verdict = "Found".into();
                }
                None => {
                    r.verdict = "NotFound".into();
                    failure = Some(CliError::inconclusive(
                        "E_NOT_FOUND",
                        format!("budget of {budget} attempts exhausted"),
                    ));
                }
            }
        }
        "2jet" => {
            let res = perturb_2jet(&n, &f, &p, &delta, seed, budget)?;
            r.text("nu", res.nu);
            r.text("F: minors vanish at p", res.initial.all_minors_vanish);
            r.text("F: independent generators", res.initial.generators_found);
            r.text("F: transverse", res.initial.transverse);
            r.text("attempts", res.attempts);
            match res.map {
                Some(g) => {
                    r.polys("perturbed map", g.components().iter());
                    r.list(
                        "generators",
                        res.generators
                            .iter()
                            .map(|(rows, m)| format!("rows {rows:?}: {m}")),
                    );
                    r.verdict = "Found".into();
                    r.note("the CR singularity persists for all small perturbations of the perturbed map");
                }
                None => {
                    r.verdict = "NotFound".into();
                    failure = Some(CliError::inconclusive(
                        "E_NOT_FOUND",
                        format!("budget of {budget} attempts exhausted"),
                    ));
                }
            }
        }
        other => return Err(bad(format!("unknown perturb mode `{other}`"))),
    }
    Ok((r, failure, None))
}

/// `ρ` from `--rho` (in `vars`, default `z1,z2`) or from a `graph` key,
/// rebased to the variables other than `w`.
fn graph_function(
    input: &Input,
    rho: Option<String>,
    vars: Option<String>,
) -> Result<Poly, CliError> {
    if let Some(text) = rho {
        let names: Vec<String> = vars
            .unwrap_or_else(|| "z1,z2".into())
            .split(',')
            .map(|s| s.trim().to_string())
            .collect();
        let ctx = VarContext::new(names.clone(), vec![false; names.len()])
            .map_err(|e| bad(e.to_string()))?;
        return Ok(parse_expression(&text, &ctx)?);
    }
    let pf = input.require()?;
    let g = pf
        .manifold
        .graph
        .as_ref()
        .ok_or_else(|| CliError::input("E_MISSING_SECTION", "needs `graph = ...` or --rho"))?;
    let ctx = &pf.manifold.ctx;
    let names: Vec<&str> = ctx.names()[..ctx.len() - 1]
        .iter()
        .map(String::as_str)
        .collect();
    let z = VarContext::complex(&names);
    g.rebase(&z).map_err(|e| bad(e.to_string()))
}

pub(super) fn classify(
    input: &Input,
    _common: &Common,
    rho: Option<String>,
    vars: Option<String>,
) -> Result<Outcome, CliError> {
    let rho = graph_function(input, rho, vars)?;
    let n = rho.ctx().len();
    let (model, rest) = extract_quadratic(&rho, n)?;
    let class = classify_ab(&model.a, &model.b)?;
    let mut r = Report::new("classify");
    r.text("rho", &rho);
    r.matrix("A", &model.a);
    r.matrix("B", &model.b);
    r.matrix("C", &model.c);
    r.text("higher-order remainder", &rest);
    r.text(
        "rank [A*; B] <= 1",
        cr_image_obstruction(&model.a, &model.b)?,
    );
    if let QuadClass::Type3 { a_squared } = &class {
        r.text("a^2", a_squared);
        r.text(
            "parabolic Bishop quadric",
            corresponds_parabolic(&model.a, &model.b),
        );
    }
    if !model.c.is_zero() {
        r.note("the holomorphic quadratic part C is removable by w -> w - z^T C z and does not enter the type");
    }
    r.verdict = class.to_string();
    Ok((r, None, None))
}

fn removability_report(r: &mut Report, rho: &Poly, order: u32) -> Result<(), CliError> {
    let v = removability_test(rho, order)?;
    r.text("rho", rho);
    r.text("rho_zbar1", rho.wirtinger(0, true));
    r.text("rho_zbar2", rho.wirtinger(1, true));
    r.text("order", order);
    match &v.tag {
        RemovabilityTag::Removable { quotient, swapped }
        | RemovabilityTag::RemovableToOrder {
            quotient, swapped, ..
        } => {
            r.text("quotient", quotient);
            r.text(
                "direction",
                if *swapped {
                    "rho_zbar1 = q * rho_zbar2"
                } else {
                    "rho_zbar2 = q * rho_zbar1"
                },
            );
            if matches!(v.tag, RemovabilityTag::Removable { .. }) {
                r.text("verified by exact multiplication", v.verify(rho));
            }
        }
        RemovabilityTag::NotRemovable {
            obstructions,
            directions,
            witnesses,
        } => {
            r.text(
                "series obstructions (forward, swapped)",
                format!("({}, {})", obstructions[0], obstructions[1]),
            );
            r.list("direction witnesses", directions.iter());
            let show = |w: &Option<_>| {
                w.as_ref()
                    .map_or("none found".to_string(), |w: &RayWitness| w.to_string())
            };
            r.text("ray witness rho_zbar2/rho_zbar1", show(&witnesses[0]));
            r.text("ray witness rho_zbar1/rho_zbar2", show(&witnesses[1]));
        }
        RemovabilityTag::Unknown => {}
    }
    match not_bishop_small_sing(rho) {
        Ok(s) => {
            r.text("small singular set criterion", s.label());
        }
        Err(e) => {
            r.note(format!("small singular set criterion not evaluated: {e}"));
        }
    }
    for n in &v.notes {
        r.note(n.clone());
    }
    r.verdict = v.tag.label().into();
    Ok(())
}

pub(super) fn removable(
    input: &Input,
    common: &Common,
    rho: Option<String>,
) -> Result<Outcome, CliError> {
    let rho = graph_function(input, rho, None)?;
    let order = match common.order {
        Some(o) => o,
        None => input
            .param(None, "order")
            .map(|s| number(&s, "order"))
            .transpose()?
            .unwrap_or(DEFAULT_ORDER),
    };
    let mut r = Report::new("removable");
    removability_report(&mut r, &rho, order)?;
    Ok((r, None, None))
}

pub(super) fn construct_sharp(
    input: &Input,
    _common: &Common,
    n: Option<usize>,
    k: Option<usize>,
    m: Option<usize>,
) -> Result<Outcome, CliError> {
    let get = |v: Option<usize>, key: &str| -> Result<usize, CliError> {
        match v {
            Some(x) => Ok(x),
            None => input
                .param(None, key)
                .map(|s| number(&s, key))
                .transpose()?
                .ok_or_else(|| bad(format!("missing --{key}"))),
        }
    };
    let (n, k, m) = (get(n, "n")?, get(k, "k")?, get(m, "m")?);
    let ex = build_sharp_example(n, k, m)?;
    let mut r = Report::new("construct sharp");
    r.text("(n, k, m)", format!("({n}, {k}, {m})"));
    r.polys("real equations of N", ex.manifold.real_eqs().iter());
    r.polys("map", ex.map.components().iter());
    r.polys(
        "minors",
        ex.map
            .jacobian()
            .minors(n)
            .map_err(|e| bad(e.to_string()))?
            .iter(),
    );
    r.text("nu", ex.nu);
    r.list(
        "generators",
        ex.generators
            .iter()
            .map(|(rows, g)| format!("rows {rows:?}: {g}")),
    );
    r.text("transverse to N at 0", ex.transverse);
    r.verdict = if ex.transverse && ex.generators.len() == ex.nu {
        "CR singularity at F(0) persists under small perturbations".into()
    } else {
        "construction checks failed".into()
    };
    Ok((r, None, None))
}

fn parse_class(ty: &str, a: Option<String>) -> Result<QuadClass, CliError> {
    Ok(
        match ty
            .trim()
            .trim_start_matches("Type")
            .trim_start_matches("type")
        {
            "1" => QuadClass::Type1,
            "2" => QuadClass::Type2,
            "3" => {
                let a = real_rat(&a.ok_or_else(|| bad("type 3 needs --a"))?)?;
                if !a.is_positive() {
                    return Err(bad("a must be positive"));
                }
                QuadClass::type3(a)
            }
            "4" => QuadClass::Type4,
            "5" => QuadClass::Type5,
            other => return Err(bad(format!("unknown type `{other}`"))),
        },
    )
}

pub(super) fn construct_realize(
    input: &Input,
    _common: &Common,
    ty: Option<String>,
    a: Option<String>,
) -> Result<Outcome, CliError> {
    let ty = input
        .param(ty, "type")
        .ok_or_else(|| bad("missing --type"))?;
    let class = parse_class(&ty, input.param(a, "a"))?;
    let n = match &input.problem {
        Some(pf) => manifold(pf, pf.manifold.point.clone())?,
        None => {
            let ctx = VarContext::complex(&["zeta", "w1", "w2"]);
            let eqs = vec![
                Poly::var(&ctx, 1, false).imag_part(),
                Poly::var(&ctx, 2, false).imag_part(),
            ];
            GenericSubmanifold::new(&ctx, eqs, vec![GaussRat::zero(); 3])?
        }
    };
    let real = realize(&n, &class)?;
    let g = image_graph(&real, 3);
    let (model, _) = extract_quadratic(&g, real.z_ctx.len())?;
    let back = classify_ab(&model.a, &model.b)?;
    let mut r = Report::new("construct realize");
    r.polys("real equations of N", n.real_eqs().iter());
    r.polys("map", real.map.components().iter());
    r.text("model", &real.model);
    r.text("image graph to order 3", &g);
    r.text("generic rank", real.generic_rank);
    r.text("local diffeomorphism at 0", real.local_diffeo);
    r.text("reclassified", &back);
    r.verdict = class.to_string();
    Ok((r, None, None))
}

pub(super) fn construct_ck(
    input: &Input,
    common: &Common,
    k: Option<u32>,
) -> Result<Outcome, CliError> {
    let k = match k {
        Some(k) => k,
        None => input
            .param(None, "k")
            .map(|s| number(&s, "k"))
            .transpose()?
            .ok_or_else(|| bad("missing --k"))?,
    };
    let ex = ck_example(k);
    let mut r = Report::new("construct ck");
    r.text("k", k);
    removability_report(&mut r, &ex.rho, common.order.unwrap_or(DEFAULT_ORDER))?;
    r.note(format!(
        "rho_zbar2 / rho_zbar1 is C^{k} but not C^{} at 0",
        k + 1
    ));
    Ok((r, None, None))
}

fn random_perturbation(ctx: &Arc<VarContext>, rng: &mut ChaCha8Rng, size: f64) -> Poly {
    let mut coef = || {
        let re: f64 = rng.random_range(-size..=size);
        let im: f64 = rng.random_range(-size..=size);
        GaussRat::approx_f64(num_complex::Complex64::new(re, im), 1_000_000_000_000)
    };
    let mut p = Poly::constant(ctx, coef());
    for v in 0..ctx.len() {
        p = &p + &Poly::var(ctx, v, false).scale(&coef());
    }
    p
}

pub(super) fn disc(
    input: &Input,
    common: &Common,
    phi: Option<String>,
    t: Option<String>,
    perturbations: Option<usize>,
) -> Result<Outcome, CliError> {
    let pf = input.require()?;
    let ctx = &pf.manifold.ctx;
    if pf.manifold.imgraph.is_empty() {
        return Err(CliError::input(
            "E_MISSING_SECTION",
            "disc needs `imgraph = r1; ...`",
        ));
    }
    let phi_text = input
        .param(phi, "phi")
        .ok_or_else(|| bad("missing --phi"))?;
    let phi = parse_expression(&phi_text, ctx)?;
    let mut prob = DiscProblem::new(ctx, pf.manifold.imgraph.clone(), phi)?;
    if let Some(g) = common
        .grid
        .map(Ok)
        .or_else(|| input.param(None, "grid").map(|s| number(&s, "grid")))
    {
        prob.grid_size = g?;
    }
    if let Some(tol) = input.param(None, "tol") {
        prob.tol = number(&tol, "tol")?;
    }
    if let Some(it) = input.param(None, "max_iter") {
        prob.max_iter = number(&it, "max_iter")?;
    }
    let ts: Vec<f64> = input
        .param(t, "t")
        .unwrap_or_else(|| "0.05,0.1,0.15,0.2".into())
        .split(',')
        .map(|s| number(s, "t"))
        .collect::<Result<_, _>>()?;
    let count = match perturbations {
        Some(c) => c,
        None => input
            .param(None, "perturbations")
            .map(|s| number(&s, "perturbations"))
            .transpose()?
            .unwrap_or(20),
    };
    let seed = match common.seed {
        Some(s) => s,
        None => input
            .param(None, "seed")
            .map(|s| number(&s, "seed"))
            .transpose()?
            .unwrap_or(0),
    };

    let mut r = Report::new("disc");
    r.provenance.seed = Some(seed);
    r.text("variables", ctx.names().join(", "));
    r.polys("r", prob.r().iter());
    r.text("phi", prob.phi());
    r.text("grid", prob.grid_size);
    r.text("tol", format!("{:e}", prob.tol));

    let mut solutions = Vec::new();
    let mut rows = vec![[
        "t",
        "iterations",
        "residual",
        "negative energy",
        "attachment",
        "sup|g|/t^2",
        "winding",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect::<Vec<_>>()];
    for &t in &ts {
        let s = solve_bishop(&prob, t)?;
        let w = match winding_count(prob.phi(), &s, prob.tol) {
            Ok(w) => w.to_string(),
            Err(e) => format!("({e})"),
        };
        let d = &s.diagnostics;
        rows.push(vec![
            format!("{t}"),
            d.iterations.to_string(),
            format!("{:e}", d.residual),
            format!("{:e}", d.negative_energy),
            format!("{:e}", d.attachment),
            format!("{:e}", s.sup_norm() / (t * t)),
            w,
        ]);
        solutions.push(s);
    }
    r.table("discs", rows);
    match verify_second_order(&DiscFamily { solutions }) {
        Ok(rep) => {
            r.text(
                "second-order vanishing",
                if rep.passes { "passes" } else { "fails" },
            );
            r.text("median sup|g|/t^2", format!("{:e}", rep.median));
            r.text("max relative deviation", format!("{:e}", rep.max_deviation));
        }
        Err(e) => {
            r.note(format!("second-order check skipped: {e}"));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perts = vec![Poly::zero(ctx)];
    perts.extend((0..count).map(|_| random_perturbation(ctx, &mut rng, 1e-3)));
    let rep = persistence_experiment(&prob, &perts, &TRange::default())?;
    let trapped = rep
        .outcomes
        .iter()
        .filter(|o| matches!(o.branch, Branch::ZeroTrapped { .. }))
        .count();
    let crossed = rep.outcomes.len() - trapped;
    r.text(
        "perturbations",
        format!(
            "{} (zero perturbation plus {count} of size 1e-3)",
            perts.len()
        ),
    );
    r.text("zero trapped near p", trapped);
    r.text("zero crossed onto N", crossed);
    r.list(
        "outcomes",
        rep.outcomes
            .iter()
            .enumerate()
            .map(|(i, o)| match &o.branch {
                Branch::ZeroTrapped { t_min, winding } => format!(
                    "psi{i}: zero_trapped (t0 {:e}, winding {winding} at t {:e})",
                    o.t0, t_min
                ),
                Branch::ZeroOnN { t, modulus, .. } => format!(
                    "psi{i}: zero_on_n (t0 {:e}, crossing t {t:e}, |psi| {modulus:e})",
                    o.t0
                ),
            }),
    );
    r.note("double-precision experiment: a numerical witness, not a certificate");
    r.verdict = "every perturbation vanishes on N or keeps a zero near p".into();
    let csv = common.csv.clone().map(|path| (path, rep.to_csv()));
    Ok((r, None, csv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::CMatrix;

    #[test]
    fn boxes() {
        let b = parse_box(None, 3).unwrap();
        assert_eq!(b, IntervalBox::unit(3));
        let b = parse_box(Some("-1/2:1/2".into()), 2).unwrap();
        assert_eq!(b.lo()[1], crate::algebra::rat(-1, 2));
        assert!(parse_box(Some("0:1,0:1".into()), 3).is_err());
        assert!(parse_box(Some("1:0".into()), 1).is_err());
    }

    #[test]
    fn classes() {
        assert_eq!(
            parse_class("3", Some("1/2".into())).unwrap(),
            QuadClass::type3(crate::algebra::rat(1, 2))
        );
        assert!(parse_class("3", None).is_err());
        assert_eq!(parse_class("Type5", None).unwrap(), QuadClass::Type5);
        assert!(parse_class("6", None).is_err());
    }

    #[test]
    fn matrix_printing() {
        let mut r = Report::new("x");
        r.matrix("I", &CMatrix::identity(2));
        assert!(r.render_text().contains("[1, 0]"));
    }
}
