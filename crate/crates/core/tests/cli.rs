use std::path::Path;
use std::process::{Command, Output};

fn hubbard(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hubbard"))
        .current_dir(dir)
        .env_remove("HUBBARD_OUT_DIR")
        .args(args)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

const SMALL: &str = "schema_version = 1\n[model]\nsites = 3\nt = 1.0\nu = 1.0\n[plan]\nr_max = 3\n";

#[test]
fn evolve_then_plotdata() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("small.toml"), SMALL).unwrap();
    let out = hubbard(dir.path(), &["evolve", "-c", "small.toml", "-o", "run"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("run/results.json").exists());
    assert!(dir.path().join("run/timings.json").exists());

    let out = hubbard(dir.path(), &["plotdata", "--results", "run/results.json", "--kind", "all", "-o", "plots"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let neel = std::fs::read_to_string(dir.path().join("plots/neel_vs_time.csv")).unwrap();
    assert!(neel.starts_with("tau,value\n"));
    assert_eq!(neel.lines().count(), 4);
    let depth = std::fs::read_to_string(dir.path().join("plots/depth_first.csv")).unwrap();
    assert!(depth.starts_with("r,depth,cz_depth,cz_count\n1,23,"));
}

#[test]
fn build_and_depth() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("small.toml"), SMALL).unwrap();
    let out = hubbard(dir.path(), &["build", "-c", "small.toml", "--basis", "--format", "json", "-o", "c"]);
    assert_eq!(code(&out), 0);
    assert!(dir.path().join("c/first_r3.json").exists());
    let out = hubbard(dir.path(), &["depth", "--preset", "paper-L10", "-o", "d"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("46"));
    assert!(dir.path().join("d/depth_second-optimized.csv").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(p.join("bad.toml"), "schema_version = 1\nbogus = 1\n").unwrap();
    std::fs::write(p.join("old.toml"), "schema_version = 7\n").unwrap();
    std::fs::write(p.join("big.toml"), "schema_version = 1\n[model]\nsites = 14\nt = 1.0\nu = 1.0\n").unwrap();
    std::fs::write(
        p.join("num.toml"),
        "schema_version = 1\nbackend = \"exact\"\n[exact]\nkrylov_dim = 2\ntol = 1e-300\n[plan]\nr_max = 1\n[model]\nsites = 3\nt = 1.0\nu = 1.0\n",
    )
    .unwrap();
    assert_eq!(code(&hubbard(p, &["evolve", "-c", "bad.toml"])), 2);
    assert_eq!(code(&hubbard(p, &["evolve", "-c", "old.toml"])), 2);
    assert_eq!(code(&hubbard(p, &["evolve", "-c", "missing.toml"])), 2);
    assert_eq!(code(&hubbard(p, &["evolve", "--preset", "nope"])), 2);
    assert_eq!(code(&hubbard(p, &["frobnicate"])), 2);
    assert_eq!(code(&hubbard(p, &["--help"])), 0);
    assert_eq!(code(&hubbard(p, &["evolve", "-c", "big.toml"])), 3);
    assert_eq!(code(&hubbard(p, &["evolve", "-c", "num.toml"])), 4);
}
