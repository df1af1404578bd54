//! Parses a problem file and runs it through the command-line driver.

use crsing::parser::parse_problem;

const PROBLEM: &str = "\
[manifold]
variables = z1, z2, z3
eq1 = z1 - conj(z3)

[map]
f1 = z1
f2 = z2
f3 = z3^2
f4 = z2*z3

[task]
kind = analyze
";

fn main() {
    let pf = parse_problem(PROBLEM).expect("valid problem");
    println!("variables: {}", pf.manifold.ctx.names().join(", "));
    for e in &pf.manifold.equations {
        println!("{} = {} (real: {})", e.key, e.expr, e.real);
    }
    if let Some(m) = &pf.map {
        let comps: Vec<String> = m.components.iter().map(|c| c.to_string()).collect();
        println!("map to C^{}: ({})", m.target, comps.join(", "));
    }
    println!("task: {:?}", pf.task.kind);

    match parse_problem("[manifold]\nvariables = z\neq1 = z^\n") {
        Err(e) => println!("malformed input: {e}"),
        Ok(_) => unreachable!(),
    }

    let dir = std::env::temp_dir().join("crsing-parse-problem.crs");
    std::fs::write(&dir, PROBLEM).unwrap();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = crsing::cli::run_with(
        ["crsing", "run", "--input", dir.to_str().unwrap(), "--json"],
        &mut out,
        &mut err,
    );
    println!("exit {code}");
    print!("{}", String::from_utf8_lossy(&out));
}
