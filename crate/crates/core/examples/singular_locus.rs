//! CR singularities of `F(N)` for `N = {z1 = z̄3}` and
//! `F = (z1, z2, z3², z2 z3)`: the rank-drop locus of `DF`, its transversality
//! to `N`, and an anchored perturbation of the generators through `0`.

use crsing::algebra::{rat, GaussRat, IntervalBox, Poly, VarContext};
use crsing::geometry::{cr_dimension_at, real_transverse, GenericSubmanifold};
use crsing::images::{anchored_zero_perturbation, image_singular_locus, HoloMap};
use crsing::parser::parse_expression;

fn main() {
    let ctx = VarContext::complex(&["z1", "z2", "z3"]);
    let p = |s: &str| parse_expression(s, &ctx).unwrap();
    let origin = vec![GaussRat::from_ints(0, 0); 3];
    let eq = p("z1 - conj(z3)");
    let n = GenericSubmanifold::new(&ctx, vec![eq.real_part(), eq.imag_part()], origin.clone())
        .unwrap();
    let f = HoloMap::new(&ctx, vec![p("z1"), p("z2"), p("z3^2"), p("z2*z3")]).unwrap();

    let locus = image_singular_locus(&n, &f).unwrap();
    let minors: Vec<String> = locus.minors.iter().map(Poly::to_string).collect();
    println!("maximal minors: {}", minors.join(", "));
    println!(
        "singular at 0: {}, F|N local diffeo: {}",
        locus.singular_at_base, locus.local_diffeo
    );
    println!(
        "CR dimension of N at 0: {}",
        cr_dimension_at(&ctx, n.real_eqs(), &origin).unwrap()
    );

    let phi = vec![p("2*z3"), p("z2")];
    println!(
        "{{2 z3 = z2 = 0}} transverse to N at 0: {}",
        real_transverse(&phi, &n, &origin).unwrap()
    );

    let anchor = vec![
        GaussRat::from_rat(1, 40),
        GaussRat::from_rat(1, 80),
        GaussRat::from_rat(1, 40),
    ];
    let res = anchored_zero_perturbation(
        &phi,
        &n,
        &anchor,
        &rat(1, 10),
        &IntervalBox::unit(6),
        3,
        200,
    )
    .unwrap();
    match res.witness {
        Some(w) => {
            let psi: Vec<String> = w.psi.iter().map(Poly::to_string).collect();
            let at: Vec<String> = anchor.iter().map(GaussRat::to_string).collect();
            println!("psi = ({}) vanishes at ({})", psi.join(", "), at.join(", "));
            println!(
                "  sup |psi - phi| <= {:.3e} after {} attempts",
                w.sup_bound, res.attempts
            );
        }
        None => println!("no anchored perturbation within budget"),
    }
}
