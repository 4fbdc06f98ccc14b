use std::path::Path;
use std::process::{Command, Output};

use num_complex::Complex64;
use serde_json::Value;

use fracprop::io::{read_signal, write_signal, write_symbol};
use fracprop::{band_project, forward_transform, inverse_transform, BandSpec, MultiplierSpec, SampledSignal, SpatialGrid};

fn fracprop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracprop")).args(args).output().expect("spawn fracprop")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad JSON ({e}): {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn gaussian(dir: &Path, n: usize, x_max: f64) -> (SampledSignal, String) {
    let grid = SpatialGrid::new(n, x_max).unwrap();
    let f = SampledSignal::from_fn(grid, |x| Complex64::new((-x * x / 2.0).exp(), 0.0)).unwrap();
    let path = dir.join("in.csv");
    write_signal(std::fs::File::create(&path).unwrap(), &f).unwrap();
    (f, path.display().to_string())
}

fn symbol_file(dir: &Path, name: &str, spec: &MultiplierSpec) -> String {
    let path = dir.join(name);
    write_symbol(std::fs::File::create(&path).unwrap(), &spec.tabulate(-6.0, 6.0, 4096).unwrap()).unwrap();
    path.display().to_string()
}

fn evolve_args<'a>(input: &'a str, output: &'a str, beta: &'a str, band: &'a str) -> Vec<&'a str> {
    vec![
        "evolve", "--alpha", "2", "--beta", beta, "--t", "1", "--input", input, "--output", output, "--band", band,
    ]
}

#[test]
fn evolve_preserves_norm() {
    let dir = tempfile::tempdir().unwrap();
    let (_, input) = gaussian(dir.path(), 2048, 32.0);
    let output = dir.path().join("out.csv").display().to_string();
    let out = fracprop(&evolve_args(&input, &output, "1", "8"));
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["schema"], 1);
    let (norm_in, norm_out) = (r["norm_in"].as_f64().unwrap(), r["norm_out"].as_f64().unwrap());
    assert!((norm_in - norm_out).abs() <= 1e-10 * norm_in);
    assert_eq!(r["band"].as_f64(), Some(8.0));
    assert_eq!(r["t"].as_f64(), Some(1.0));
    // 17 significant digits in every float
    assert!(String::from_utf8_lossy(&out.stdout).contains("\"t\": 1.0000000000000000e0"));
}

#[test]
fn zero_coefficient_is_band_projection() {
    let dir = tempfile::tempdir().unwrap();
    let (f, input) = gaussian(dir.path(), 1024, 32.0);
    let output = dir.path().join("out.csv").display().to_string();
    let out = fracprop(&evolve_args(&input, &output, "0", "4"));
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let evolved = read_signal(std::fs::File::open(&output).unwrap(), None).unwrap();
    let band = BandSpec::new(4.0).unwrap();
    let projected = inverse_transform(&band_project(&forward_transform(&f).unwrap(), &band).unwrap()).unwrap();
    assert!(evolved.sup_distance(&projected).unwrap() <= 1e-12);
}

#[test]
fn evolve_errors_leave_no_output() {
    let dir = tempfile::tempdir().unwrap();
    let output = dir.path().join("out.csv");
    let out_s = output.display().to_string();

    let missing = dir.path().join("missing.csv").display().to_string();
    assert_eq!(code(&fracprop(&evolve_args(&missing, &out_s, "1", "8"))), 2);

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "x,re,im\n0,1\n").unwrap();
    assert_eq!(code(&fracprop(&evolve_args(&bad.display().to_string(), &out_s, "1", "8"))), 2);

    let (_, input) = gaussian(dir.path(), 256, 16.0);
    // R = 100 needs frequencies far beyond the grid's Nyquist limit
    assert_eq!(code(&fracprop(&evolve_args(&input, &out_s, "1", "100"))), 3);

    let mut args = evolve_args(&input, &out_s, "1", "2");
    args.extend(["--grid-n", "512", "--x-max", "16"]);
    assert_eq!(code(&fracprop(&args)), 2);

    let leftovers: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|name| !name.ends_with(".csv") || name == "out.csv")
        .collect();
    assert!(leftovers.is_empty(), "{leftovers:?}");
    assert!(!output.exists());
}

#[test]
fn identify_examples() {
    let dir = tempfile::tempdir().unwrap();
    let sym = symbol_file(dir.path(), "half.csv", &MultiplierSpec::closed_form(0.5, 1.5));
    let out = fracprop(&["identify", "--symbol", &sym, "--a", "4", "--b", "9"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert!((r["alpha"].as_f64().unwrap() - 0.5).abs() < 1e-8);
    assert!((r["beta"].as_f64().unwrap() - 1.5).abs() < 1e-8);
    assert_eq!(r["M"], 0);
    assert_eq!(r["N"], 0);

    let one = symbol_file(dir.path(), "one.csv", &MultiplierSpec::identity());
    let r = report(&fracprop(&["identify", "--symbol", &one, "--a", "2", "--b", "3"]));
    assert_eq!(r["is_identity"], true);
    assert_eq!(r["alpha"].as_f64(), Some(0.0));

    let sq = symbol_file(dir.path(), "sq.csv", &MultiplierSpec::closed_form(2.0, 1.0));
    let b = 3f64.sqrt().to_string();
    assert_eq!(code(&fracprop(&["identify", "--symbol", &sq, "--a", "1.5", "--b", &b])), 5);

    let missing = dir.path().join("nope.csv").display().to_string();
    assert_eq!(code(&fracprop(&["identify", "--symbol", &missing, "--a", "2", "--b", "3"])), 2);
}

#[test]
fn degenerate_symbol_exits_four() {
    // phase 1e-8·(r − 1) changes sign at r = 1
    let dir = tempfile::tempdir().unwrap();
    let r: Vec<f64> = (0..2048).map(|k| (-3.0 + 6.0 * k as f64 / 2047.0).exp()).collect();
    let v: Vec<Complex64> = r.iter().map(|&x| Complex64::from_polar(1.0, 1e-8 * (x - 1.0))).collect();
    let profile = fracprop::TabulatedProfile::new(&r, &v).unwrap();
    let path = dir.path().join("deg.csv");
    write_symbol(std::fs::File::create(&path).unwrap(), &profile).unwrap();
    let out = fracprop(&["identify", "--symbol", &path.display().to_string(), "--a", "2", "--b", "3", "--tol", "1e-12"]);
    assert_eq!(code(&out), 4, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn verify_reference_and_guards() {
    let out = fracprop(&["verify", "--alpha", "2", "--beta", "1", "--seed", "7"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["pass"], true);
    assert_eq!(r["tolerance_scale"].as_f64(), Some(1.0));
    let names: Vec<&str> = r["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    for expected in ["unitarity", "semistability", "order_symbol", "group_law", "scaling", "operator_distance"] {
        assert!(names.contains(&expected), "{names:?}");
    }

    assert_eq!(code(&fracprop(&["verify", "--alpha", "0", "--beta", "1", "--seed", "1"])), 2);

    let out = fracprop(&["verify", "--alpha", "2", "--beta", "1", "--seed", "7", "--fast", "--mutate-dilate", "1.4"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("order_symbol"));
}

#[test]
fn verify_is_deterministic() {
    let args = ["verify", "--alpha", "-1", "--beta", "0.7", "--seed", "42", "--fast"];
    let a = fracprop(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_fracprop")).args(args).env("FRACPROP_THREADS", "1").output().unwrap();
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn classify_from_file_and_stdin() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("terms.json");
    std::fs::write(&path, r#"[{"alpha": 0, "beta": 6.283185307179586}, {"alpha": 1.5, "beta": 3}, {"alpha": 1.5, "beta": -3}]"#)
        .unwrap();
    let r = report(&fracprop(&["classify", "--terms", &path.display().to_string()]));
    assert_eq!(r["is_identity"], true);
    assert_eq!(r["case_label"], "triple-c");

    let mut child = Command::new(env!("CARGO_BIN_EXE_fracprop"))
        .arg("classify")
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    use std::io::Write;
    child.stdin.take().unwrap().write_all(br#"[{"alpha": 1, "beta": 1}, {"alpha": 2, "beta": -1}]"#).unwrap();
    let out = child.wait_with_output().unwrap();
    let r = report(&out);
    assert_eq!(r["is_identity"], false);
    assert_eq!(r["witness"].as_f64(), Some(2.0));

    std::fs::write(&path, r#"[{"alpha": 1, "beta": 0}]"#).unwrap();
    assert_eq!(code(&fracprop(&["classify", "--terms", &path.display().to_string()])), 2);
    std::fs::write(&path, "not json").unwrap();
    assert_eq!(code(&fracprop(&["classify", "--terms", &path.display().to_string()])), 2);
}
