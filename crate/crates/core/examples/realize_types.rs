//! Realizes each of the five quadratic types as a CR image `F(N)` for a
//! flat and a curved codimension-2 `N ⊂ C³`.

use crsing::algebra::{rat, GaussRat, VarContext};
use crsing::geometry::GenericSubmanifold;
use crsing::parser::parse_expression;
use crsing::quadratic::{classify, extract_quadratic, image_graph, realize, QuadClass};

fn main() {
    let ctx = VarContext::complex(&["zeta", "w1", "w2"]);
    let manifold = |eqs: [&str; 2]| {
        let eqs = eqs
            .iter()
            .map(|s| parse_expression(s, &ctx).unwrap())
            .collect();
        GenericSubmanifold::new(&ctx, eqs, vec![GaussRat::from_ints(0, 0); 3]).unwrap()
    };
    let classes = [
        QuadClass::Type1,
        QuadClass::Type2,
        QuadClass::type3(rat(1, 5)),
        QuadClass::Type4,
        QuadClass::Type5,
    ];
    for (name, n) in [
        ("flat", manifold(["Im(w1)", "Im(w2)"])),
        (
            "curved",
            manifold(["Im(w1) - zeta*conj(zeta)", "Im(w2) - Re(w1)^2"]),
        ),
    ] {
        for c in &classes {
            let r = realize(&n, c).unwrap();
            let g = image_graph(&r, 3);
            let (m, _) = extract_quadratic(&g, 2).unwrap();
            println!(
                "{name} {c}: F = ({}), image type {}",
                r.map.to_strings().join(", "),
                classify(&m.a, &m.b).unwrap()
            );
        }
    }
}
