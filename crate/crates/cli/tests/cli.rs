use npf_cli::{run, Outcome, CSV_HEADER, EXIT_ERROR, EXIT_OK};

fn npf(args: &[&str]) -> Outcome {
    run(std::iter::once("npf").chain(args.iter().copied()))
}

#[test]
fn polygon_csv_rows() {
    let out = npf(&["np", "x^2 + x*t + t^2", "--format", "csv"]);
    assert_eq!(out.code, EXIT_OK);
    assert_eq!(out.stdout, format!("{CSV_HEADER}\n0,2,0,1,2,1\n2,0,2,1,0,1\n"));
}

#[test]
fn csv_keeps_exact_columns() {
    let out = npf(&["leg", "x + x^{1/4}*t", "--s", "1/3", "--format", "csv"]);
    assert_eq!(out.stdout, format!("{CSV_HEADER}\n0.33333333333333333333,0.58333333333333333333,1,3,7,12\n"));
}

#[test]
fn zero_series_is_an_error() {
    let out = npf(&["np", "0"]);
    assert_eq!(out.code, EXIT_ERROR);
    assert!(out.stderr.starts_with("error:"));
    assert_eq!(npf(&["np", ""]).code, EXIT_ERROR);
}

#[test]
fn parse_errors() {
    let out = npf(&["np", "x^{-1}"]);
    assert_eq!(out.code, EXIT_ERROR);
    assert!(out.stderr.contains("negative"), "{}", out.stderr);
    assert_eq!(npf(&["np", "x*t^{1/3}", "--mode", "arithmetic", "--domain", "mixed"]).code, EXIT_ERROR);
}

#[test]
fn formal_literal_and_canonical_arithmetic() {
    let out = npf(&["canon", "x*t^{1/2} + x^{3}"]);
    assert_eq!(out.stdout, "x^{3} + x*t^{1/2}\n");
    let out = npf(&["canon", "3*p^{1/2} + 1", "--mode", "arithmetic"]);
    assert_eq!(out.stdout, "1 + p^{1/2} + p^{3/2} + O(p^{32})\n");
}

#[test]
fn arithmetic_product_carries() {
    let out = npf(&["mul", "1 + p", "1 + p", "--mode", "arithmetic", "--prec-N", "8"]);
    // 3 * 3 = 9 = 1 + 2^3
    assert_eq!(out.stdout, "1 + p^{3} + O(p^{8})\n");
}

#[test]
fn chain_pair_is_omega() {
    let out = npf(&["chain", "--mu", "1/4", "--mu", "1/2", "--depth", "256", "--format", "json"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    let pairs = v["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 1);
    assert_eq!(pairs[0]["class"]["verdict"], "Omega");
    let text = npf(&["chain", "--mu", "1/4", "--mu", "1/2", "--depth", "256"]);
    assert!(text.stdout.contains("pair mu=1/4 lambda=1/2: ω"));
}

#[test]
fn chain_rejects_unordered_grid() {
    assert_eq!(npf(&["chain", "--mu", "1/2", "--mu", "1/4"]).code, EXIT_ERROR);
    assert_eq!(npf(&["chain", "--mu", "1"]).code, EXIT_ERROR);
}

#[test]
fn verify_exit_codes() {
    let out = npf(&["verify", "multiplicativity", "--cases", "1000", "--seed", "7"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.starts_with("verify multiplicativity cases=1000 seed=7\n"));
    assert_eq!(npf(&["verify", "no-such-suite"]).code, EXIT_ERROR);
}

#[test]
fn verify_all_aggregates() {
    let out = npf(&["verify", "all", "--cases", "20"]);
    assert_eq!(out.code, EXIT_OK);
    assert_eq!(out.stdout.lines().filter(|l| l.starts_with("suite ")).count(), 20);
    assert!(out.stdout.ends_with("result: PASS (20 suites, 0 failed)\n"));
}

#[test]
fn output_is_deterministic() {
    let args = ["plot", "--object", "legendre", "x^{1/2} + x^{2}*t^{3/2} + t^{4}", "--format", "csv"];
    assert_eq!(npf(&args), npf(&args));
    let svg = npf(&["np", "x^2 + x*t + t^2", "--format", "svg"]);
    assert_eq!(svg, npf(&["np", "x^2 + x*t + t^2", "--format", "svg"]));
}

#[test]
fn svg_is_flagged_approximate() {
    let out = npf(&["plot", "--object", "polygon", "x^2 + x*t + t^2"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("floating-point approximations"));
    assert!(out.stdout.contains("<polyline"));
    assert!(out.stdout.contains("coefficient valuation"));
}

#[test]
fn plot_needs_its_inputs() {
    assert_eq!(npf(&["plot", "--object", "polygon"]).code, EXIT_ERROR);
    assert_eq!(npf(&["plot", "--object", "chain", "x"]).code, EXIT_ERROR);
    assert_eq!(npf(&["plot", "--object", "polygon", "x", "--format", "text"]).code, EXIT_ERROR);
}

#[test]
fn writes_to_out_path() {
    let dir = std::env::temp_dir().join(format!("npf-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("np.csv");
    let out = npf(&["np", "x + t", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().starts_with(CSV_HEADER));
    let blocked = dir.join("missing").join("np.csv");
    assert_eq!(npf(&["np", "x + t", "--out", blocked.to_str().unwrap()]).code, EXIT_ERROR);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn example_sup_at_one() {
    let out = npf(&["example-sup", "--depth", "100"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.starts_with("example s=1 depth=100 limit=3\n"));
    assert!(out.stdout.contains("n=100 value=601/200\n"));
    assert!(npf(&["example-sup", "--s", "0"]).code == EXIT_ERROR);
}

#[test]
fn approx_certificate() {
    let out = npf(&["approx", "--nodes", "1:1, 2:1/2, 3:1/3"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("node 3: target 1/3 -> 1/4 (k = 2, deviation 1/12 <= 1/9)"));
    assert_eq!(npf(&["approx", "--nodes", "1:1, 2:3, 3:1"]).code, EXIT_ERROR);
    assert_eq!(npf(&["approx", "--nodes", "1:1", "--rule", "bogus"]).code, EXIT_ERROR);
}
