//! Follows the zero of `ψ ∘ g_t` as the discs shrink, for `φ = z − w` and
//! `ψ = φ + p` with small `p`, and prints the scan as CSV.

use crsing::algebra::VarContext;
use crsing::discs::{persistence_experiment, DiscProblem, TRange};
use crsing::parser::parse_expression;

fn main() {
    let ctx = VarContext::complex(&["z", "w"]);
    let p = |s: &str| parse_expression(s, &ctx).unwrap();
    let prob = DiscProblem::new(&ctx, vec![p("z*conj(z)")], p("z - w"))
        .unwrap()
        .with_grid(256);
    let perturbations = vec![p("0"), p("1/1000"), p("1/2000i*z + 1/1000*w")];
    let range = TRange {
        t_max: 0.4,
        t_min: 1e-4,
        steps: 16,
    };
    let rep = persistence_experiment(&prob, &perturbations, &range).unwrap();
    for o in &rep.outcomes {
        println!("psi = {}: {} (t0 = {})", o.psi, o.branch.label(), o.t0);
    }
    print!("{}", rep.to_csv());
}
