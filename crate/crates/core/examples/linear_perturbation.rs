//! Removes the CR singularity of `(|z|⁶, |z|⁴)` by a small linear
//! perturbation `G = F + A z`, with an interval certificate that
//! `rank DG = 2` on `N = R²` in the unit box.

use crsing::algebra::{certify_no_common_zero, rat, IntervalBox, Poly, VarContext};
use crsing::geometry::GenericSubmanifold;
use crsing::images::{perturbability, search_linear_perturbation, HoloMap, SearchOptions};
use crsing::parser::parse_expression;

fn main() {
    let ctx = VarContext::with_flags(&[("x", true), ("y", true)]);
    let p = |s: &str| parse_expression(s, &ctx).unwrap();
    let n = GenericSubmanifold::whole(&ctx);
    let f = HoloMap::new(
        &ctx,
        vec![p("x + i*y"), p("(x^2 + y^2)^3"), p("(x^2 + y^2)^2")],
    )
    .unwrap();
    println!(
        "4n - k < 2(m + 1) for (2, 2, 3): {}",
        perturbability(2, 2, 3).unwrap()
    );
    let minors: Vec<String> = f
        .jacobian()
        .minors(2)
        .unwrap()
        .iter()
        .map(Poly::to_string)
        .collect();
    println!("minors of DF: {}", minors.join(", "));

    let g = HoloMap::new(
        &ctx,
        vec![
            p("x + i*y"),
            p("(x^2 + y^2)^3 + 1/10*x"),
            p("(x^2 + y^2)^2"),
        ],
    )
    .unwrap();
    let gm = g.jacobian().minors(2).unwrap();
    let cert = certify_no_common_zero(&gm, &[], &IntervalBox::unit(2), 20).unwrap();
    println!(
        "G with eps x added: rank 2 on the box certified: {}",
        cert.is_certified()
    );

    let opts = SearchOptions {
        b: IntervalBox::unit(2),
        budget: 1000,
        seed: 0,
        delta: rat(1, 10),
        depth: 20,
    };
    let res = search_linear_perturbation(&n, &f, &opts).unwrap();
    if let Some(c) = res.certificate {
        println!("seeded search: {} attempts, A =\n{}", res.attempts, c.a);
        println!("replay: {}", c.replay(&n).unwrap());
    }
}
