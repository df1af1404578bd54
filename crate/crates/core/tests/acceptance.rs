//! Acceptance criteria 1–17. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

mod common;

use std::panic;
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::{parse, random_holomorphic, random_point, random_poly, small_gauss};
use crsing::algebra::{
    certify_no_common_zero, divide_exact, initial_form, interval_eval, rat, CMatrix, CompiledPoly,
    GaussRat, IntervalBox, Poly, PolyMatrix, VarContext,
};
use crsing::discs::{solve_bishop, solve_family, verify_second_order, winding_count, DiscProblem};
use crsing::geometry::{real_transverse, GenericSubmanifold};
use crsing::images::{
    anchored_zero_perturbation, build_sharp_example, equidim_stability, image_singular_locus,
    perturbability, HoloMap, StabilityTag,
};
use crsing::parser::{parse_expression, parse_problem, TaskKind};
use crsing::quadratic::{
    ck_example, classify, cr_image_obstruction, extract_quadratic, image_graph, realize,
    removability_test, QuadClass, RemovabilityTag, DEFAULT_ORDER,
};
use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let el = start.elapsed();
    ensure(el < limit, format!("took {el:.2?}, limit {limit:?}"))
}

fn z12() -> Arc<VarContext> {
    VarContext::complex(&["z1", "z2"])
}

fn origin(n: usize) -> Vec<GaussRat> {
    vec![GaussRat::zero(); n]
}

const MODELS: [(&str, &str); 5] = [
    ("conj(z1)*z2 + conj(z1)^2", "Type1"),
    ("conj(z1)*z2", "Type2"),
    ("z1*conj(z1) + 1/2*conj(z1)^2", "Type3(a=1/2)"),
    ("conj(z1)^2", "Type4"),
    ("0", "Type5"),
];

fn class_of(rho: &Poly) -> QuadClass {
    let (m, _) = extract_quadratic(rho, 2).expect("normalized graph");
    classify(&m.a, &m.b).expect("2x2 data")
}

fn c1() -> Outcome {
    let start = Instant::now();
    let ctx = z12();
    for (src, want) in MODELS {
        let got = class_of(&parse(src, &ctx)).to_string();
        ensure(got == want, format!("{src}: {got}, expected {want}"))?;
    }
    within(start, Duration::from_secs(1))?;
    Ok(format!(
        "five forms labelled Type1..Type5 in {:.2?}",
        start.elapsed()
    ))
}

fn random_invertible(rng: &mut ChaCha8Rng) -> CMatrix {
    loop {
        let t = CMatrix::from_fn(2, 2, |_, _| {
            GaussRat::from_ints(rng.random_range(-3..=3), rng.random_range(-3..=3))
        });
        if !t.det().is_zero() {
            return t;
        }
    }
}

/// `ρ(Tz)`, computed by substitution rather than on the matrices.
fn pull_back(rho: &Poly, t: &CMatrix) -> Poly {
    let ctx = rho.ctx();
    let images: Vec<Poly> = (0..2)
        .map(|j| {
            (0..2).fold(Poly::zero(ctx), |acc, k| {
                &acc + &Poly::var(ctx, k, false).scale(t.get(j, k))
            })
        })
        .collect();
    rho.substitute_vars(ctx, &images, None)
}

fn c2() -> Outcome {
    let start = Instant::now();
    let ctx = z12();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut models: Vec<(String, QuadClass)> = MODELS
        .iter()
        .map(|(s, _)| (s.to_string(), class_of(&parse(s, &ctx))))
        .collect();
    models.push((
        "z1*conj(z1) + 1/3*conj(z1)^2".into(),
        QuadClass::type3(rat(1, 3)),
    ));
    let mut checked = 0;
    for (src, want) in &models {
        let rho = parse(src, &ctx);
        for _ in 0..200 {
            let t = random_invertible(&mut rng);
            let mut c = GaussRat::zero();
            while c.is_zero() {
                c = small_gauss(&mut rng);
            }
            let moved = pull_back(&rho, &t).scale(&c);
            let got = class_of(&moved);
            ensure(&got == want, format!("{src} under T = {t}, c = {c}: {got}"))?;
            if let (Some(a), Some(b)) = (got.exact_a(), want.exact_a()) {
                ensure(a == b, "Type3 a^2 changed")?;
            }
            checked += 1;
        }
    }
    within(start, Duration::from_secs(30))?;
    Ok(format!(
        "{checked} transports preserved the label (a^2 exact) in {:.2?}",
        start.elapsed()
    ))
}

fn random_symmetric(rng: &mut ChaCha8Rng) -> CMatrix {
    let mut g = || GaussRat::from_ints(rng.random_range(-3..=3), rng.random_range(-3..=3));
    let (a, b, c) = (g(), g(), g());
    CMatrix::from_rows(vec![vec![a, b.clone()], vec![b, c]])
}

/// Rank of `[A*; B]` is at least 2 iff some 2×2 minor of the 4×2 stack is nonzero.
fn stacked_rank_at_least_two(a: &CMatrix, b: &CMatrix) -> bool {
    let s = a.adjoint();
    let rows: Vec<Vec<GaussRat>> = (0..2)
        .map(|i| s.row(i))
        .chain((0..2).map(|i| b.row(i)))
        .collect();
    (0..4).any(|i| {
        (i + 1..4).any(|j| !(&(&rows[i][0] * &rows[j][1]) - &(&rows[i][1] * &rows[j][0])).is_zero())
    })
}

fn c3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut tested = 0;
    while tested < 100 {
        let a = CMatrix::from_fn(2, 2, |_, _| {
            GaussRat::from_ints(rng.random_range(-3..=3), rng.random_range(-3..=3))
        });
        let b = random_symmetric(&mut rng);
        if !stacked_rank_at_least_two(&a, &b) {
            continue;
        }
        ensure(
            !cr_image_obstruction(&a, &b).map_err(|e| e.to_string())?,
            format!("obstruction passed A = {a}"),
        )?;
        let got = classify(&a, &b).map_err(|e| e.to_string())?;
        ensure(
            got == QuadClass::NotCRImageCandidate,
            format!("A = {a}, B = {b} accepted as {got}"),
        )?;
        tested += 1;
    }
    Ok("100 stacked-rank-2 pairs rejected, 0 false accepts".into())
}

const REMOVABLE: &str = "1/2*(z1 + conj(z1))^2 - z1^2*z2^2*conj(z1)^2*conj(z2)^2 \
    - i*z1^2*z2^4*conj(z1)*conj(z2)^4 + 1/3i*z1^2*conj(z1)^3 + i*z2^2*conj(z1)*conj(z2)^2 \
    + i*z1*z2^2*conj(z2)^2 + 1/3*z1^2*z2^6*conj(z2)^6 - 1/2*z2^4*conj(z2)^4";

fn c4() -> Outcome {
    let start = Instant::now();
    let ctx = z12();
    let rho = parse(REMOVABLE, &ctx);
    let v = removability_test(&rho, DEFAULT_ORDER).map_err(|e| e.to_string())?;
    let want = parse("2i*z2^2*conj(z2)", &ctx);
    match &v.tag {
        RemovabilityTag::Removable {
            quotient,
            swapped: false,
        } => {
            ensure(quotient == &want, format!("quotient {quotient}"))?;
        }
        other => return Err(format!("verdict {other:?}")),
    }
    ensure(v.verify(&rho), "library re-verification failed")?;
    let (rz1, rz2) = (rho.wirtinger(0, true), rho.wirtinger(1, true));
    ensure(
        rz2 == &want * &rz1,
        "rho_zbar2 != 2i z2^2 conj(z2) rho_zbar1",
    )?;
    within(start, Duration::from_secs(1))?;
    Ok(format!(
        "Removable, quotient {want}, identity re-multiplied, {:.2?}",
        start.elapsed()
    ))
}

fn c5() -> Outcome {
    let start = Instant::now();
    let ctx = z12();
    let rho = parse("conj(z1)*z2 + conj(z2)^3", &ctx);
    let (a, b) = (rho.wirtinger(1, true), rho.wirtinger(0, true));
    let v = removability_test(&rho, DEFAULT_ORDER).map_err(|e| e.to_string())?;
    let detail = match &v.tag {
        RemovabilityTag::NotRemovable {
            witnesses: [Some(fw), Some(bw)],
            directions,
            ..
        } => {
            ensure(fw.check(&a, &b), "forward witness does not replay")?;
            ensure(bw.check(&b, &a), "swapped witness does not replay")?;
            format!(
                "forward [{fw}], swapped [{bw}], {} ray-limit pairs",
                directions.len() / 2
            )
        }
        other => return Err(format!("verdict {other:?}")),
    };
    for k in 0..5 {
        let ex = ck_example(k);
        let v = removability_test(&ex.rho, DEFAULT_ORDER).map_err(|e| e.to_string())?;
        ensure(
            v.tag.label() == "NotRemovable",
            format!("k = {k}: {}", v.tag.label()),
        )?;
    }
    within(start, Duration::from_secs(5))?;
    Ok(format!(
        "NotRemovable with {detail}; ck_example(0..4) NotRemovable; {:.2?}",
        start.elapsed()
    ))
}

fn example_c3_c4() -> (Arc<VarContext>, GenericSubmanifold, HoloMap) {
    let ctx = VarContext::complex(&["z1", "z2", "z3"]);
    let eq = parse("z1 - conj(z3)", &ctx);
    let n = GenericSubmanifold::new(&ctx, vec![eq.real_part(), eq.imag_part()], origin(3)).unwrap();
    let comps = ["z1", "z2", "z3^2", "z2*z3"]
        .iter()
        .map(|s| parse(s, &ctx))
        .collect();
    let f = HoloMap::new(&ctx, comps).unwrap();
    (ctx, n, f)
}

fn same_up_to_sign(got: &[Poly], want: &[Poly]) -> bool {
    got.len() == want.len()
        && want
            .iter()
            .all(|w| got.iter().any(|g| g == w || g == &-w.clone()))
        && got
            .iter()
            .all(|g| want.iter().any(|w| g == w || g == &-w.clone()))
}

fn c6() -> Outcome {
    let start = Instant::now();
    let (ctx, n, f) = example_c3_c4();
    let locus = image_singular_locus(&n, &f).map_err(|e| e.to_string())?;
    let want: Vec<Poly> = ["2*z3", "z2", "-2*z3^2", "0"]
        .iter()
        .map(|s| parse(s, &ctx))
        .collect();
    ensure(same_up_to_sign(&locus.minors, &want), "minors differ")?;
    let phi = vec![parse("2*z3", &ctx), parse("z2", &ctx)];
    ensure(
        real_transverse(&phi, &n, &origin(3)).map_err(|e| e.to_string())?,
        "not transverse",
    )?;
    let p = vec![
        GaussRat::from_rat(1, 40),
        GaussRat::from_rat(1, 80),
        GaussRat::from_rat(1, 40),
    ];
    ensure(n.contains(&p), "anchor not on N")?;
    let res = anchored_zero_perturbation(&phi, &n, &p, &rat(1, 10), &IntervalBox::unit(6), 6, 100)
        .map_err(|e| e.to_string())?;
    let w = res.witness.ok_or("anchored perturbation not found")?;
    ensure(w.psi.iter().all(|q| q.eval(&p).is_zero()), "psi(p) != 0")?;
    let jac = PolyMatrix::jacobian(&ctx, &w.psi).eval(&p);
    ensure(jac.rank() == 2, "d psi(p) not of rank 2")?;
    ensure(
        real_transverse(&w.psi, &n, &p).map_err(|e| e.to_string())?,
        "psi not transverse at p",
    )?;
    ensure(w.sup_bound < 0.1, "perturbation too large")?;
    within(start, Duration::from_secs(5))?;
    Ok(format!(
        "minors match, transverse, anchored psi certified (sup {:.3}); {:.2?}",
        w.sup_bound,
        start.elapsed()
    ))
}

fn c7() -> Outcome {
    let ex = build_sharp_example(3, 2, 4).map_err(|e| e.to_string())?;
    let (ctx, n, f) = example_c3_c4();
    ensure(
        ex.map.to_strings() == f.to_strings(),
        format!("map {:?}", ex.map.to_strings()),
    )?;
    let got: Vec<String> = ex.manifold.real_eqs().iter().map(Poly::to_string).collect();
    let want: Vec<String> = n.real_eqs().iter().map(Poly::to_string).collect();
    ensure(got == want, format!("N {got:?} vs {want:?}"))?;
    ensure(
        ex.manifold.ctx().names() == ctx.names(),
        "variable names differ",
    )?;
    Ok(format!(
        "F = ({}), N: z1 = conj(z3), byte-identical",
        ex.map.to_strings().join(", ")
    ))
}

fn c8() -> Outcome {
    let start = Instant::now();
    let ctx = VarContext::with_flags(&[("x", true), ("y", true)]);
    let p = |s: &str| parse(s, &ctx);
    let f = HoloMap::new(
        &ctx,
        vec![p("x + i*y"), p("(x^2 + y^2)^3"), p("(x^2 + y^2)^2")],
    )
    .unwrap();
    let want = [
        p("6*(x^2 + y^2)^2*(y - i*x)"),
        p("4*(x^2 + y^2)*(y - i*x)"),
        p("0"),
    ];
    let got = f.jacobian().minors(2).map_err(|e| e.to_string())?;
    ensure(same_up_to_sign(&got, &want), "minors of DF differ")?;
    let g = HoloMap::new(
        &ctx,
        vec![
            p("x + i*y"),
            p("(x^2 + y^2)^3 + 1/10*x"),
            p("(x^2 + y^2)^2"),
        ],
    )
    .unwrap();
    let want_g = [
        p("6*(x^2 + y^2)^2*(y - i*x) - 1/10i"),
        p("4*(x^2 + y^2)*(y - i*x)"),
        p("4*y*1/10*(x^2 + y^2)"),
    ];
    let got_g = g.jacobian().minors(2).map_err(|e| e.to_string())?;
    ensure(same_up_to_sign(&got_g, &want_g), "minors of DG differ")?;
    let cert = certify_no_common_zero(&got_g, &[], &IntervalBox::unit(2), 20)
        .map_err(|e| e.to_string())?;
    let depth = match cert {
        crsing::algebra::Certification::Certified { depth, leaves } => {
            format!("depth {depth}, {leaves} leaves")
        }
        _ => return Err("not certified at depth 20".into()),
    };
    within(start, Duration::from_secs(60))?;
    Ok(format!(
        "minors match; G certified on [-1,1]^2 ({depth}); {:.2?}",
        start.elapsed()
    ))
}

fn c9() -> Outcome {
    let table = [((2, 2, 3), true), ((3, 2, 4), false), ((1, 1, 1), true)];
    for ((n, k, m), want) in table {
        let got = perturbability(n, k, m).map_err(|e| e.to_string())?;
        ensure(got == want, format!("({n}, {k}, {m}) -> {got}"))?;
        ensure(
            (4 * n - k < 2 * (m + 1)) == want,
            "table inconsistent with 4n - k < 2(m + 1)",
        )?;
    }
    Ok("(2,2,3) true, (3,2,4) false, (1,1,1) true".into())
}

fn parabolic_ctx() -> Arc<VarContext> {
    VarContext::with_flags(&[("x", true), ("y", true), ("xi", false)])
}

fn c10() -> Outcome {
    let ctx = parabolic_ctx();
    let p = |s: &str| parse(s, &ctx);
    let n = GenericSubmanifold::whole(&ctx);
    let f = HoloMap::new(&ctx, vec![p("x + i*y"), p("xi"), p("x^2")]).unwrap();
    let v = equidim_stability(&n, &f, &origin(3)).map_err(|e| e.to_string())?;
    ensure(
        v.tag == StabilityTag::ConditionFails,
        format!("{:?}", v.tag),
    )?;
    ensure(v.cone_contains_h == Some(true), "cone evidence missing")?;
    let xi = vec![
        GaussRat::zero(),
        GaussRat::zero(),
        GaussRat::from_ints(1, 0),
    ];
    ensure(
        v.h.dim() == 1 && v.h.contains(&xi),
        "H_0N is not the xi-line",
    )?;
    ensure(v.initial_form.as_ref() == Some(&p("2i*x")), "initial form")?;
    let g = HoloMap::new(&ctx, vec![p("x + i*y"), p("xi"), p("x^2 + 1/10i*x")]).unwrap();
    let det = g.jacobian().det();
    ensure(
        det == p("2i*x - 1/10") || det == p("-2i*x + 1/10"),
        format!("det DG = {det}"),
    )?;
    let cert = certify_no_common_zero(std::slice::from_ref(&det), &[], &IntervalBox::unit(4), 20)
        .map_err(|e| e.to_string())?;
    ensure(cert.is_certified(), "det DG not certified nonvanishing")?;
    Ok(format!(
        "ConditionFails, H_0N = xi-line in {{x = 0}}; det DG = {det} certified on [-1,1]^4"
    ))
}

fn stable_fixture() -> HoloMap {
    let ctx = parabolic_ctx();
    let comps = ["x + i*y", "xi", "-y*xi - 1/3i*x^3"]
        .iter()
        .map(|s| parse(s, &ctx))
        .collect();
    HoloMap::new(&ctx, comps).unwrap()
}

/// Smallest `|det DG|` over the grid of step `h` on `[-r, r]^4` in `(x, y, Re ξ, Im ξ)`.
fn grid_min(det: &Poly, r: f64, h: f64) -> f64 {
    let c = CompiledPoly::new(det);
    let steps = (2.0 * r / h).round() as i64;
    let coord = |i: i64| -r + i as f64 * h;
    let mut best = f64::INFINITY;
    for a in 0..=steps {
        for b in 0..=steps {
            for u in 0..=steps {
                for v in 0..=steps {
                    let pt = [
                        Complex64::new(coord(a), 0.0),
                        Complex64::new(coord(b), 0.0),
                        Complex64::new(coord(u), coord(v)),
                    ];
                    best = best.min(c.eval(&pt).norm());
                }
            }
        }
    }
    best
}

fn perturb_coefficients(
    f: &HoloMap,
    rng: &mut ChaCha8Rng,
    size: f64,
    shift: Option<GaussRat>,
) -> HoloMap {
    let ctx = f.ctx();
    let mut monos = vec![Poly::one(ctx)];
    for d in 1..=3u32 {
        for a in 0..=d {
            for b in 0..=d - a {
                let e = vec![a, b, d - a - b, 0, 0, 0];
                monos.push(Poly::term(ctx, e, GaussRat::from_ints(1, 0)));
            }
        }
    }
    let mut comps: Vec<Poly> = f
        .components()
        .iter()
        .map(|c| {
            monos.iter().fold(c.clone(), |acc, m| {
                let r = if size > 0.0 {
                    rng.random_range(0.0..size)
                } else {
                    0.0
                };
                let th = rng.random_range(0.0..std::f64::consts::TAU);
                let coef = GaussRat::approx_f64(Complex64::from_polar(r, th), 1_000_000_000_000);
                &acc + &m.scale(&coef)
            })
        })
        .collect();
    if let Some(s) = shift {
        comps[2] = &comps[2] + &Poly::var(ctx, 1, false).scale(&s);
    }
    HoloMap::new(ctx, comps).unwrap()
}

fn c11() -> Outcome {
    let start = Instant::now();
    let f = stable_fixture();
    let ctx = f.ctx().clone();
    let n = GenericSubmanifold::whole(&ctx);
    let v = equidim_stability(&n, &f, &origin(3)).map_err(|e| e.to_string())?;
    ensure(
        v.tag == StabilityTag::StableSingularity,
        format!("fixture is {:?}", v.tag),
    )?;
    ensure(
        v.det == parse("xi + x^2", &ctx),
        format!("det DF = {}", v.det),
    )?;
    let (r, h) = (1.0 / 16.0, 1.0 / 128.0);
    let threshold = 1.5 * h;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let control = perturb_coefficients(&f, &mut rng, 0.0, Some(GaussRat::from_rat(1, 10)));
    let control_min = grid_min(&control.jacobian().det(), r, h);
    ensure(
        control_min > threshold,
        format!("grid oracle cannot see an escape ({control_min:.3e})"),
    )?;
    let mut escapes = 0;
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let g = perturb_coefficients(&f, &mut rng, 1e-3, None);
        let m = grid_min(&g.jacobian().det(), r, h);
        worst = worst.max(m);
        if m > threshold {
            escapes += 1;
        }
    }
    ensure(escapes == 0, format!("{escapes} perturbations escaped"))?;
    within(start, Duration::from_secs(300))?;
    Ok(format!(
        "200 perturbations keep a det zero on N (worst grid min {worst:.2e} <= {threshold:.2e}); 0 escapes; {:.2?}",
        start.elapsed()
    ))
}

fn zw() -> Arc<VarContext> {
    VarContext::complex(&["z", "w"])
}

fn c12() -> Outcome {
    let ctx = zw();
    let prob = DiscProblem::new(&ctx, vec![parse("z*conj(z)", &ctx)], parse("z - w", &ctx))
        .map_err(|e| e.to_string())?
        .with_grid(512);
    let mut worst = 0.0f64;
    for t in [0.1, 0.2, 0.3, 0.4] {
        let d = solve_bishop(&prob, t).map_err(|e| e.to_string())?;
        for j in 0..d.grid_size() {
            let pt = d.point(j);
            worst = worst.max((pt[0] - d.node(j) * t).norm());
            worst = worst.max((pt[1] - Complex64::new(0.0, t * t)).norm());
        }
        let wn = winding_count(prob.phi(), &d, 1e-12).map_err(|e| e.to_string())?;
        ensure(wn == 1, format!("winding {wn} at t = {t}"))?;
    }
    ensure(worst <= 1e-10, format!("max deviation {worst:.2e}"))?;
    Ok(format!(
        "g_t = (t xi, i t^2) to {worst:.1e}; winding 1 at t = 0.1..0.4"
    ))
}

const CUBIC_R: &str = "z*conj(z) + 1/8*(z + conj(z))^3";

fn c13() -> Outcome {
    let ctx = zw();
    let ts = [0.05, 0.1, 0.15, 0.2];
    let prob = DiscProblem::new(&ctx, vec![parse(CUBIC_R, &ctx)], parse("z - w", &ctx))
        .map_err(|e| e.to_string())?;
    let coarse = solve_family(&prob.clone().with_grid(512), &ts).map_err(|e| e.to_string())?;
    let fine = solve_family(&prob.with_grid(4096), &ts).map_err(|e| e.to_string())?;
    let rc = verify_second_order(&coarse).map_err(|e| e.to_string())?;
    let rf = verify_second_order(&fine).map_err(|e| e.to_string())?;
    ensure(rc.passes && rf.passes, "second-order check fails")?;
    let mut cross = 0.0f64;
    for ((_, a), (_, b)) in rc.ratios.iter().zip(&rf.ratios) {
        cross = cross.max((a - b).abs() / b.abs());
    }
    ensure(
        cross < 0.01,
        format!("grid 512 vs 4096 differ by {cross:.2e}"),
    )?;
    // Im w = t²(1 + t cos³θ) has harmonic conjugate −t³(3 sin θ + sin 3θ)/4, vanishing at θ = 0.
    let mut worst = 0.0f64;
    for s in &coarse.solutions {
        let t = s.t;
        for j in 0..s.grid_size() {
            let th = std::f64::consts::TAU * j as f64 / s.grid_size() as f64;
            let want = Complex64::new(
                -t.powi(3) * (3.0 * th.sin() + (3.0 * th).sin()) / 4.0,
                t * t * (1.0 + t * th.cos().powi(3)),
            );
            worst = worst.max((s.point(j)[1] - want).norm());
        }
    }
    ensure(worst < 1e-10, format!("closed-form deviation {worst:.2e}"))?;
    Ok(format!(
        "passes (median {:.4}, deviation {:.3}); 512 vs 4096 within {:.1e}; closed form to {worst:.1e}",
        rc.median, rc.max_deviation, cross
    ))
}

fn disc_fixtures(ctx: &Arc<VarContext>) -> Vec<(&'static str, DiscProblem)> {
    [
        ("|z|^2", "z*conj(z)"),
        ("|z|^2 + (Re z)^3", CUBIC_R),
        (
            "w-dependent",
            "z*conj(z) + 1/4*(w + conj(w))^2 + z^2*conj(z) + z*conj(z)^2",
        ),
    ]
    .into_iter()
    .map(|(name, r)| {
        (
            name,
            DiscProblem::new(ctx, vec![parse(r, ctx)], parse("z - w", ctx)).unwrap(),
        )
    })
    .collect()
}

fn c14() -> Outcome {
    let ctx = zw();
    let base = DiscProblem::new(&ctx, vec![parse("z*conj(z)", &ctx)], parse("z", &ctx))
        .map_err(|e| e.to_string())?;
    for grid in [256, 512] {
        let d = solve_bishop(&base.clone().with_grid(grid), 0.3).map_err(|e| e.to_string())?;
        for l in 1..=5u32 {
            let wn = winding_count(&parse(&format!("z^{l}"), &ctx), &d, 1e-12)
                .map_err(|e| e.to_string())?;
            ensure(
                wn == i64::from(l),
                format!("z^{l}: winding {wn} at grid {grid}"),
            )?;
        }
    }
    let mut pairs = 0;
    for (name, prob) in disc_fixtures(&ctx) {
        for t in [0.1, 0.3] {
            let a = solve_bishop(&prob.clone().with_grid(256), t).map_err(|e| e.to_string())?;
            let b = solve_bishop(&prob.clone().with_grid(512), t).map_err(|e| e.to_string())?;
            let phis = ["z - w", "z^2", "z^3 - w"];
            for src in phis {
                let phi = parse(src, &ctx);
                let (wa, wb) = (
                    winding_count(&phi, &a, 1e-12),
                    winding_count(&phi, &b, 1e-12),
                );
                ensure(
                    wa.as_ref().ok() == wb.as_ref().ok(),
                    format!("{name}, {src}, t = {t}: {wa:?} vs {wb:?}"),
                )?;
                pairs += 1;
            }
        }
    }
    Ok(format!(
        "z^l winds l for l = 1..5; {pairs} fixture windings stable under grid doubling"
    ))
}

fn c15() -> Outcome {
    let start = Instant::now();
    let ctx = VarContext::with_flags(&[("x", true), ("z1", false), ("z2", false)]);
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..300 {
        let p = random_poly(&mut rng, &ctx, 5, 2);
        let q = random_poly(&mut rng, &ctx, 5, 2);
        let (cp, cq) = (p.conj_involution(), q.conj_involution());
        ensure(cp.conj_involution() == p, "conj not involutive")?;
        ensure(
            (&p + &q).conj_involution() == &cp + &cq,
            "conj not additive",
        )?;
        ensure(
            (&p * &q).conj_involution() == &cp * &cq,
            "conj not multiplicative",
        )?;
        for v in 0..3 {
            for barred in [false, true] {
                let d = |r: &Poly| r.wirtinger(v, barred);
                ensure(
                    d(&(&p * &q)) == &(&d(&p) * &q) + &(&p * &d(&q)),
                    "Leibniz fails",
                )?;
                ensure(d(&(&p + &q)) == &d(&p) + &d(&q), "wirtinger not additive")?;
                if !ctx.is_real(v) {
                    ensure(
                        cp.wirtinger(v, barred) == p.wirtinger(v, !barred).conj_involution(),
                        "conj/wirtinger",
                    )?;
                }
            }
        }
        if !p.is_zero() && !q.is_zero() {
            let base = random_point(&mut rng, &ctx);
            let (ip, iq) = (
                initial_form(&p, &base).unwrap(),
                initial_form(&q, &base).unwrap(),
            );
            let ipq = initial_form(&(&p * &q), &base).unwrap();
            ensure(ipq == &ip * &iq, "initial form not multiplicative")?;
            let at0 = initial_form(&p, &origin(3)).unwrap();
            ensure(
                p.terms().all(|(m, _)| at0.total_degree() <= m.degree()),
                "initial form degree",
            )?;
            let back = divide_exact(&(&p * &q), &p).map_err(|e| e.to_string())?;
            ensure(back == q, "divide_exact round trip")?;
        }
    }
    let hctx = z12();
    for _ in 0..300 {
        let mut e: Vec<Poly> = (0..4)
            .map(|_| random_holomorphic(&mut rng, &hctx, 3, 2))
            .collect();
        if rng.random_bool(0.5) {
            let s = random_holomorphic(&mut rng, &hctx, 2, 1);
            e.extend([&e[0] * &s, &e[1] * &s]);
        } else {
            e.extend((0..2).map(|_| random_holomorphic(&mut rng, &hctx, 3, 2)));
        }
        let m = PolyMatrix::new(3, 2, e).unwrap();
        let pts = [origin(2), random_point(&mut rng, &hctx)];
        for x in &pts {
            let mx = m.eval(x);
            for s in 1..=2 {
                let minors_vanish = m.minors(s).unwrap().iter().all(|q| q.eval(x).is_zero());
                ensure(
                    (mx.rank() < s) == minors_vanish,
                    format!("rank/minor disagreement, s = {s}"),
                )?;
            }
        }
    }
    let mut samples = 0usize;
    while samples < 1_000_000 {
        let p = random_poly(&mut rng, &ctx, 6, 3);
        let lo: Vec<_> = (0..5).map(|_| rat(rng.random_range(-8..=4), 8)).collect();
        let hi: Vec<_> = lo
            .iter()
            .map(|l| l + rat(rng.random_range(0..=8), 8))
            .collect();
        let b = IntervalBox::new(lo, hi).unwrap();
        let enc = interval_eval(&p, &b).unwrap();
        let iv = b.intervals();
        let c = CompiledPoly::new(&p);
        for _ in 0..1000 {
            let s: Vec<f64> = iv
                .iter()
                .map(|i| {
                    if i.lo == i.hi {
                        i.lo
                    } else {
                        rng.random_range(i.lo..=i.hi)
                    }
                })
                .collect();
            let pt = [
                Complex64::new(s[0], 0.0),
                Complex64::new(s[1], s[2]),
                Complex64::new(s[3], s[4]),
            ];
            let val = c.eval(&pt);
            let slack = 1e-9 * (1.0 + val.norm());
            let inside = enc.re.lo - slack <= val.re
                && val.re <= enc.re.hi + slack
                && enc.im.lo - slack <= val.im
                && val.im <= enc.im.hi + slack;
            ensure(inside, format!("{val} outside {enc} for {p}"))?;
        }
        samples += 1000;
    }
    within(start, Duration::from_secs(120))?;
    Ok(format!(
        "ring, Leibniz, initial form, division, rank/minor and {samples} interval samples; {:.2?}",
        start.elapsed()
    ))
}

fn c16() -> Outcome {
    let ctx = VarContext::complex(&["zeta", "w1", "w2"]);
    let manifold = |eqs: [&str; 2]| {
        GenericSubmanifold::new(
            &ctx,
            eqs.iter().map(|s| parse(s, &ctx)).collect(),
            origin(3),
        )
        .unwrap()
    };
    let flat = manifold(["Im(w1)", "Im(w2)"]);
    let curved = manifold(["Im(w1) - zeta*conj(zeta)", "Im(w2) - Re(w1)^2 - Re(zeta)^3"]);
    let classes = [
        QuadClass::Type1,
        QuadClass::Type2,
        QuadClass::type3(rat(1, 4)),
        QuadClass::Type4,
        QuadClass::Type5,
    ];
    for (name, n) in [("flat", &flat), ("curved", &curved)] {
        for c in &classes {
            let r = realize(n, c).map_err(|e| e.to_string())?;
            ensure(
                r.local_diffeo,
                format!("{name} {c}: F|N not a local diffeomorphism"),
            )?;
            let g = image_graph(&r, 3);
            let (m, _) = extract_quadratic(&g, 2).map_err(|e| e.to_string())?;
            let got = classify(&m.a, &m.b).map_err(|e| e.to_string())?;
            ensure(&got == c, format!("{name} {c}: image classifies as {got}"))?;
        }
    }
    Ok("all five types round-trip on flat and curved N".into())
}

const FUZZ_TOKENS: [&str; 28] = [
    "z1",
    "z2",
    "x",
    "conj(",
    "Re(",
    "Im(",
    "(",
    ")",
    "+",
    "-",
    "*",
    "/",
    "^",
    "i",
    "2",
    "0",
    "1/3",
    "3i",
    " ",
    "1024",
    "99999999999999999999",
    "^^",
    "w",
    "conj",
    ",",
    ".",
    "é",
    "\n",
];

fn fuzz_input(rng: &mut ChaCha8Rng) -> String {
    let len = rng.random_range(0..24);
    let mut s = String::new();
    for _ in 0..len {
        if rng.random_bool(0.05) {
            s.push(char::from(rng.random_range(0x20u8..0x7f)));
        } else {
            s.push_str(FUZZ_TOKENS[rng.random_range(0..FUZZ_TOKENS.len())]);
        }
    }
    s
}

fn mutate_problem(rng: &mut ChaCha8Rng, base: &str) -> String {
    let mut bytes: Vec<u8> = base.bytes().collect();
    for _ in 0..rng.random_range(1..6) {
        let at = rng.random_range(0..bytes.len().max(1));
        match rng.random_range(0..3) {
            0 if !bytes.is_empty() => {
                bytes.remove(at.min(bytes.len() - 1));
            }
            1 => bytes.insert(
                at.min(bytes.len()),
                b"[]=;,^()\nz#"[rng.random_range(0..11)],
            ),
            _ => {
                if let Some(b) = bytes.get_mut(at) {
                    *b = rng.random_range(0x20..0x7f);
                }
            }
        }
    }
    String::from_utf8_lossy(&bytes).into_owned()
}

const EXAMPLE_FILE: &str = include_str!("../problems/example_c3_c4.crs");

fn c17() -> Outcome {
    let start = Instant::now();
    let ctx = VarContext::with_flags(&[("x", true), ("z1", false), ("z2", false)]);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..200 {
        let p = random_poly(&mut rng, &ctx, 6, 3);
        let printed = p.to_string();
        let back = parse_expression(&printed, &ctx).map_err(|e| format!("{printed}: {e}"))?;
        ensure(back == p, format!("parse(print(p)) != p for {printed}"))?;
        ensure(back.to_string() == printed, "print not canonical")?;
    }
    let hook = panic::take_hook();
    panic::set_hook(Box::new(|_| {}));
    let mut crashes = Vec::new();
    for k in 0..100_000 {
        let input = if k % 4 == 3 {
            mutate_problem(&mut rng, EXAMPLE_FILE)
        } else {
            fuzz_input(&mut rng)
        };
        let ok = panic::catch_unwind(|| {
            if k % 4 == 3 {
                let _ = parse_problem(&input);
            } else {
                let _ = parse_expression(&input, &ctx);
            }
        })
        .is_ok();
        if !ok && crashes.len() < 3 {
            crashes.push(input);
        }
    }
    panic::set_hook(hook);
    ensure(crashes.is_empty(), format!("crashes on {crashes:?}"))?;
    let pf = parse_problem(EXAMPLE_FILE).map_err(|e| e.to_string())?;
    let c = &pf.manifold.ctx;
    ensure(
        c.names() == ["z1", "z2", "z3"] && (0..3).all(|v| !c.is_real(v)),
        "variables",
    )?;
    ensure(pf.manifold.equations.len() == 1, "equations")?;
    ensure(
        pf.manifold.equations[0].expr == parse("z1 - conj(z3)", c),
        "eq1",
    )?;
    let map = pf.map.as_ref().ok_or("no map")?;
    let comps: Vec<String> = map.components.iter().map(Poly::to_string).collect();
    ensure(
        comps == ["z1", "z2", "z3^2", "z2*z3"] && map.target == 4,
        format!("map {comps:?}"),
    )?;
    ensure(pf.task.kind == TaskKind::Analyze, "task kind")?;
    Ok(format!(
        "200 round trips, 100000 fuzz inputs without a crash, example file parsed; {:.2?}",
        start.elapsed()
    ))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 17] = [
        (1, "five-model classification", c1),
        (2, "classification invariance", c2),
        (3, "CR image obstruction", c3),
        (4, "removable fixture", c4),
        (5, "non-removable fixture", c5),
        (6, "C3 -> C4 singular locus", c6),
        (7, "sharp example (3,2,4)", c7),
        (8, "|z|^6, |z|^4 perturbation", c8),
        (9, "perturbability truth table", c9),
        (10, "parabolic C3 stability", c10),
        (11, "equidimensional persistence", c11),
        (12, "disc closed form", c12),
        (13, "second-order vanishing", c13),
        (14, "winding model", c14),
        (15, "algebra properties", c15),
        (16, "realization round trip", c16),
        (17, "parser", c17),
    ];
    let mut failed = 0;
    for (k, name, f) in criteria {
        let res = panic::catch_unwind(f).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match res {
            Ok(detail) => println!("criterion {k:>2} PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {k:>2} FAIL  {name}: {why}");
            }
        }
    }
    println!("{} of 17 criteria passed", 17 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
