//! Analytic discs attached to `Im w = r(z, z̄, Re w)` through Bishop's
//! equation, their second-order vanishing in `t`, and winding numbers.

use crsing::algebra::VarContext;
use crsing::discs::{solve_bishop, solve_family, verify_second_order, winding_count, DiscProblem};
use crsing::parser::parse_expression;

fn main() {
    let ctx = VarContext::complex(&["z", "w"]);
    let p = |s: &str| parse_expression(s, &ctx).unwrap();

    let quad = DiscProblem::new(&ctx, vec![p("z*conj(z)")], p("z - w")).unwrap();
    for t in [0.1, 0.2, 0.4] {
        let d = solve_bishop(&quad, t).unwrap();
        let g0 = d.point(0)[1];
        println!(
            "|z|^2, t = {t}: g(1) = {g0:.12}, expected i t^2; winding of z - w: {}",
            winding_count(quad.phi(), &d, 1e-12).unwrap()
        );
    }

    let cubic = DiscProblem::new(
        &ctx,
        vec![p("z*conj(z) + 1/8*(z + conj(z))^3 + 1/4*(w + conj(w))^2")],
        p("z - w"),
    )
    .unwrap();
    let fam = solve_family(&cubic, &[0.05, 0.1, 0.15, 0.2]).unwrap();
    for s in &fam.solutions {
        let dg = &s.diagnostics;
        println!(
            "t = {}: {} iterations, residual {:.1e}, negative-frequency energy {:.1e}, |g|/t^2 = {:.4}",
            s.t,
            dg.iterations,
            dg.residual,
            dg.negative_energy,
            s.sup_norm() / (s.t * s.t)
        );
    }
    let rep = verify_second_order(&fam).unwrap();
    println!(
        "second-order vanishing: {} (median {:.4}, deviation {:.3})",
        rep.passes, rep.median, rep.max_deviation
    );

    for l in 1..=5 {
        let phi = p(&format!("z^{l}"));
        let prob = DiscProblem::new(&ctx, vec![p("z*conj(z)")], phi).unwrap();
        let d = solve_bishop(&prob, 0.3).unwrap();
        println!(
            "phi = z^{l}: winding {}",
            winding_count(prob.phi(), &d, 1e-12).unwrap()
        );
    }
}
