//! The equidimensional test `H_pN ⊄ C_p{det DF = 0}` on two maps of
//! `N = R² × C`, and an interval proof that a perturbation of the parabolic
//! one has no CR singularity near `0`.

use crsing::algebra::{certify_no_common_zero, rat, GaussRat, IntervalBox, VarContext};
use crsing::geometry::GenericSubmanifold;
use crsing::images::{equidim_stability, HoloMap};
use crsing::parser::parse_expression;

fn main() {
    let ctx = VarContext::with_flags(&[("x", true), ("y", true), ("xi", false)]);
    let n = GenericSubmanifold::whole(&ctx);
    let origin = vec![GaussRat::from_ints(0, 0); 3];
    let map = |srcs: [&str; 3]| {
        HoloMap::new(
            &ctx,
            srcs.iter()
                .map(|s| parse_expression(s, &ctx).unwrap())
                .collect(),
        )
        .unwrap()
    };

    for (name, f) in [
        ("parabolic", map(["x + i*y", "xi", "x^2"])),
        ("stable", map(["x + i*y", "xi", "-y*xi - 1/3i*x^3"])),
    ] {
        let v = equidim_stability(&n, &f, &origin).unwrap();
        println!("{name}: {} (det DF = {})", v.tag.as_str(), v.det);
        if let Some(c) = v.cone_contains_h {
            println!("  H_0N inside the tangent cone: {c}");
        }
    }

    let g = map(["x + i*y", "xi", "x^2 + 1/10i*x"]);
    let det = g.jacobian().det();
    let b = IntervalBox::centered(4, rat(1, 2));
    let cert = certify_no_common_zero(std::slice::from_ref(&det), &[], &b, 16).unwrap();
    println!(
        "perturbed det DG = {det}; nonvanishing on [-1/2, 1/2]^4: {}",
        cert.is_certified()
    );
}
