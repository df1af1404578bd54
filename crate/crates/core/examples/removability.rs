//! Decides removability of CR singularities of `w = ρ(z, z̄)` in `C³` by
//! dividing `ρ_z̄2` by `ρ_z̄1`.

use crsing::algebra::VarContext;
use crsing::parser::parse_expression;
use crsing::quadratic::{
    ck_example, not_bishop_small_sing, removability_test, RemovabilityTag, DEFAULT_ORDER,
};

fn report(name: &str, src: &str) {
    let ctx = VarContext::complex(&["z1", "z2"]);
    let rho = parse_expression(src, &ctx).expect("parses");
    let v = removability_test(&rho, DEFAULT_ORDER).expect("two complex variables");
    println!("{name}: {}", v.tag.label());
    match &v.tag {
        RemovabilityTag::Removable { quotient, swapped } => {
            println!(
                "  quotient {quotient} (swapped: {swapped}), verified: {}",
                v.verify(&rho)
            );
        }
        RemovabilityTag::NotRemovable { witnesses, .. } => {
            for w in witnesses.iter().flatten() {
                println!("  witness: {w}");
            }
        }
        _ => {}
    }
    if let Ok(s) = not_bishop_small_sing(&rho) {
        println!("  small singular set criterion: {}", s.label());
    }
}

fn main() {
    report(
        "parabolic with removable singularity",
        "1/2*(z1 + conj(z1))^2 - z1^2*z2^2*conj(z1)^2*conj(z2)^2 - i*z1^2*z2^4*conj(z1)*conj(z2)^4 \
         + 1/3i*z1^2*conj(z1)^3 + i*z2^2*conj(z1)*conj(z2)^2 + i*z1*z2^2*conj(z2)^2 \
         + 1/3*z1^2*z2^6*conj(z2)^6 - 1/2*z2^4*conj(z2)^4",
    );
    report("cubic, V_0 a line", "conj(z1)*z2 + conj(z2)^3");
    report(
        "isolated singular set",
        "z1*conj(z1) + conj(z1)^2 + conj(z2)^2*z2",
    );
    for k in 0..5 {
        let ex = ck_example(k);
        let v = removability_test(&ex.rho, DEFAULT_ORDER).unwrap();
        println!("C^{k} example {}: {}", ex.rho, v.tag.label());
    }
}
