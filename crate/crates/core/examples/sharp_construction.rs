//! Builds the examples showing `4n − k < 2(m + 1)` is sharp, and applies a
//! 2-jet perturbation that keeps the singular locus transverse to `N`.

use crsing::algebra::{rat, GaussRat, Poly};
use crsing::images::{build_sharp_example, perturb_2jet, perturbability};

fn main() {
    for (n, k, m) in [(2, 2, 3), (3, 2, 4), (4, 3, 5), (4, 2, 6)] {
        println!(
            "(n, k, m) = ({n}, {k}, {m}): perturbable = {}",
            perturbability(n, k, m).unwrap()
        );
    }
    for (n, k, m) in [(3, 2, 4), (4, 3, 5), (5, 4, 7)] {
        let ex = build_sharp_example(n, k, m).unwrap();
        println!("({n}, {k}, {m}): F = ({})", ex.map.to_strings().join(", "));
        let eqs: Vec<String> = ex.manifold.real_eqs().iter().map(Poly::to_string).collect();
        println!("  N: {}", eqs.join(" = 0, "));
        let gens: Vec<String> = ex.generators.iter().map(|(_, g)| g.to_string()).collect();
        println!(
            "  singular locus generators: {}; transverse: {}",
            gens.join(", "),
            ex.transverse
        );
    }

    let ex = build_sharp_example(3, 2, 4).unwrap();
    let origin = vec![GaussRat::from_ints(0, 0); 3];
    let r = perturb_2jet(&ex.manifold, &ex.map, &origin, &rat(1, 100), 5, 500).unwrap();
    if let Some(g) = r.map {
        println!(
            "2-jet perturbation after {} attempts: ({})",
            r.attempts,
            g.to_strings().join(", ")
        );
    }
}
