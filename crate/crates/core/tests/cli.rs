use std::path::PathBuf;

use crsing::cli::run_with;

struct Outcome {
    code: i32,
    out: String,
    err: String,
}

fn problem(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("problems")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Outcome {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("crsing").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    Outcome {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn verdict(o: &Outcome) -> &str {
    o.out
        .lines()
        .find_map(|l| l.strip_prefix("verdict: "))
        .unwrap_or("")
}

#[test]
fn every_problem_file_runs_with_its_verdict() {
    let expected = [
        ("example_c3_c4.crs", "CR singular at F(0)"),
        ("removable_parabolic.crs", "Removable"),
        ("cubic_nonremovable.crs", "NotRemovable"),
        ("sextic_perturb.crs", "Found"),
        ("parabolic_stability.crs", "ConditionFails"),
        ("quadric_type3.crs", "Type3(a=1/3)"),
        (
            "bishop_disc.crs",
            "every perturbation vanishes on N or keeps a zero near p",
        ),
    ];
    for (file, v) in expected {
        let o = run(&["run", "--input", &problem(file)]);
        assert_eq!(o.code, 0, "{file}: {}", o.err);
        assert_eq!(verdict(&o), v, "{file}");
        assert!(o.out.contains("  input: sha256:"), "{file}");
    }
}

#[test]
fn output_is_deterministic() {
    let file = problem("sextic_perturb.crs");
    let args = ["run", "--input", file.as_str(), "--seed", "11"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.out, b.out);
    assert!(a.out.contains("  seed: 11\n"));
}

#[test]
fn json_carries_every_text_field() {
    let file = problem("example_c3_c4.crs");
    let text = run(&["analyze", "--input", &file]);
    let json = run(&["analyze", "--input", &file, "--json"]);
    assert_eq!((text.code, json.code), (0, 0));
    let v: serde_json::Value = serde_json::from_str(&json.out).unwrap();
    assert_eq!(v["task"], "analyze");
    assert_eq!(
        text.out.lines().nth(1).unwrap(),
        format!("verdict: {}", v["verdict"].as_str().unwrap())
    );
    for e in v["evidence"].as_array().unwrap() {
        let label = e["label"].as_str().unwrap();
        match &e["value"] {
            serde_json::Value::String(s) => {
                assert!(text.out.contains(&format!("  {label}: {s}\n")))
            }
            serde_json::Value::Array(items) => {
                assert!(text.out.contains(&format!("  {label}:\n")));
                for it in items {
                    if let Some(s) = it.as_str() {
                        assert!(text.out.contains(&format!("    - {s}\n")), "{label}: {s}");
                    }
                }
            }
            other => panic!("unexpected evidence value {other}"),
        }
    }
    for n in v["notes"].as_array().unwrap() {
        assert!(text.out.contains(n.as_str().unwrap()));
    }
    assert!(text.out.contains(&format!(
        "  input: {}\n",
        v["provenance"]["input"].as_str().unwrap()
    )));
}

#[test]
fn exit_codes_follow_error_classes() {
    let o = run(&["bogus"]);
    assert_eq!(o.code, 1);
    assert!(o.err.starts_with("error E_USAGE:"));

    let o = run(&["construct", "sharp", "--n", "2", "--k", "3", "--m", "3"]);
    assert_eq!(o.code, 2);
    assert!(o.err.starts_with("error E_SHAPE:"));

    let o = run(&["classify", "--rho", "z1*"]);
    assert_eq!(o.code, 1);
    assert!(o.err.starts_with("error E_SYNTAX:"));

    let o = run(&["analyze", "--input", "/nonexistent/problem.crs"]);
    assert_eq!(o.code, 1);
    assert_eq!(o.err.lines().count(), 1);
}

#[test]
fn removable_order_twelve_prints_the_quotient() {
    let file = problem("removable_parabolic.crs");
    let o = run(&["removable", "--input", &file, "--order", "12"]);
    assert_eq!(o.code, 0, "{}", o.err);
    assert_eq!(verdict(&o), "Removable");
    assert!(o.out.contains("  quotient: 2i*z2^2*conj(z2)\n"));
}

#[test]
fn zero_rho_is_type5() {
    let o = run(&["classify", "--rho", "0"]);
    assert_eq!(o.code, 0);
    assert_eq!(verdict(&o), "Type5");
}

#[test]
fn disc_writes_csv() {
    let dir = std::env::temp_dir().join(format!("crsing-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("disc.csv");
    let file = problem("bishop_disc.crs");
    let o = run(&["disc", "--input", &file, "--csv", csv.to_str().unwrap()]);
    assert_eq!(o.code, 0, "{}", o.err);
    let body = std::fs::read_to_string(&csv).unwrap();
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("psi,t,residual,winding,branch"));
    assert!(lines.all(|l| l.split(',').count() == 5));
    std::fs::remove_dir_all(&dir).unwrap();
}
