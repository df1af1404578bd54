//! Classifies the quadratic part of `w = ρ(z, z̄)` in `C³` into the five
//! CR image types, and shows the label survives linear changes of `z`.

use crsing::algebra::{CMatrix, GaussRat, VarContext};
use crsing::parser::parse_expression;
use crsing::quadratic::{classify, corresponds_parabolic, cr_image_obstruction, extract_quadratic};

fn main() {
    let ctx = VarContext::complex(&["z1", "z2"]);
    let forms = [
        "conj(z1)*z2 + conj(z1)^2",
        "conj(z1)*z2",
        "z1*conj(z1) + 1/3*conj(z1)^2",
        "conj(z1)^2",
        "z1*conj(z1)^2 + conj(z2)^3",
        "z1*conj(z1) + z2*conj(z2)",
    ];
    for src in forms {
        let rho = parse_expression(src, &ctx).expect("parses");
        let (m, rest) = extract_quadratic(&rho, 2).expect("normalized");
        let class = classify(&m.a, &m.b).expect("2x2 data");
        println!("w = {src}");
        println!(
            "  type {class}, rank [A*; B] <= 1: {}",
            cr_image_obstruction(&m.a, &m.b).unwrap()
        );
        println!(
            "  parabolic: {}, cubic remainder: {rest}",
            corresponds_parabolic(&m.a, &m.b)
        );
    }

    let rho = parse_expression("z1*conj(z1) + 1/3*conj(z1)^2", &ctx).unwrap();
    let (m, _) = extract_quadratic(&rho, 2).unwrap();
    let t = CMatrix::from_rows(vec![
        vec![GaussRat::from_ints(2, 1), GaussRat::from_ints(0, 0)],
        vec![GaussRat::from_ints(1, -3), GaussRat::from_ints(0, 1)],
    ]);
    let moved = m.transport(&t).scale_w(&GaussRat::from_ints(0, 5));
    println!(
        "after z -> Tz and w -> 5i w: {}",
        classify(&moved.a, &moved.b).unwrap()
    );
}
