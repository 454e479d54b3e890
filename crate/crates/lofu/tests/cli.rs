//! End-to-end tests of the command-line contract: exit codes, summary
//! output, machine-readable failure records and byte-identical
//! certificates.

use std::process::{Command, Output};

use lofu::cert::CochainFileDoc;
use lofu::complex::fixture;
use lofu::cover::DEFAULT_TUPLE_CAP;
use lofu::fiber::LoopSystem;
use lofu::group::parse_group_spec;
use lofu::homology::cohomology;
use lofu::transgression::transgress;

fn lofu(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lofu"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn last_stdout_line(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .last()
        .unwrap_or_default()
        .to_string()
}

#[test]
fn cohomology_prints_the_group() {
    let out = lofu(&["cohomology", "--complex", "circle", "--group", "Z", "--degree", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "Z");

    let out = lofu(&["cohomology", "--complex", "sphere2", "--group", "Z/6", "--degree", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "Z/6");

    let out = lofu(&["cohomology", "--complex", "sphere2", "--group", "Z", "--degree", "1"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "0");
}

#[test]
fn roundtrip_confirms_both_directions() {
    let out = lofu(&[
        "roundtrip", "--complex", "circle", "--group", "Z", "--degree", "1", "--lmax", "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("regress(transgress(alpha)) ~ alpha: verified"));
    assert!(text.contains("transgress(regress(omega)) ~ omega: verified"));
}

#[test]
fn lmax_zero_is_invalid_input() {
    let out = lofu(&[
        "transgress", "--complex", "circle", "--group", "Z", "--degree", "1", "--lmax", "0",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let record: serde_json::Value = serde_json::from_str(&last_stdout_line(&out)).unwrap();
    assert_eq!(record["failure"]["code"], 3);
}

#[test]
fn unknown_fixture_is_invalid_input() {
    let out = lofu(&["cohomology", "--complex", "klein", "--group", "Z", "--degree", "1"]);
    assert_eq!(out.status.code(), Some(3));
    let record: serde_json::Value = serde_json::from_str(&last_stdout_line(&out)).unwrap();
    assert_eq!(record["failure"]["kind"], "invalid-input");
}

#[test]
fn certificates_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = lofu(&[
            "transgress",
            "--complex",
            "circle",
            "--group",
            "Z",
            "--degree",
            "1",
            "--lmax",
            "2",
            "--seed",
            "3",
            "--emit-certificate",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let bytes_a = std::fs::read(&a).unwrap();
    let bytes_b = std::fs::read(&b).unwrap();
    assert!(!bytes_a.is_empty());
    assert_eq!(bytes_a, bytes_b);
}

fn omega_file(dir: &std::path::Path) -> std::path::PathBuf {
    let c = fixture("circle").unwrap();
    let g = parse_group_spec("Z").unwrap();
    let sys = LoopSystem::build(&c, &g, 1, 2, 0, 0, DEFAULT_TUPLE_CAP).unwrap();
    let h = cohomology(sys.base.nerve(1), &g, 1).unwrap();
    let cert = transgress(&sys, &h.generators[0]).unwrap();
    let doc = CochainFileDoc {
        degree: cert.omega.degree,
        values: cert.omega.export(),
    };
    let path = dir.join("omega.json");
    std::fs::write(&path, serde_json::to_vec_pretty(&doc).unwrap()).unwrap();
    path
}

#[test]
fn regress_and_verify_consume_cochain_files() {
    let dir = tempfile::tempdir().unwrap();
    let omega = omega_file(dir.path());
    let out = lofu(&[
        "verify-lf", "--complex", "circle", "--group", "Z", "--degree", "1", "--lmax", "2",
        "--omega", omega.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let out = lofu(&[
        "regress", "--complex", "circle", "--group", "Z", "--degree", "1", "--lmax", "2",
        "--omega", omega.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("class is -[alpha]"));
}

#[test]
fn non_fusion_cochains_fail_verification() {
    let dir = tempfile::tempdir().unwrap();
    // corrupt the winding cochain at one loop index
    let path = omega_file(dir.path());
    let mut doc: CochainFileDoc =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    doc.values[0].1[0] += 1;
    std::fs::write(&path, serde_json::to_vec(&doc).unwrap()).unwrap();
    let out = lofu(&[
        "verify-lf", "--complex", "circle", "--group", "Z", "--degree", "1", "--lmax", "2",
        "--omega", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let record: serde_json::Value = serde_json::from_str(&last_stdout_line(&out)).unwrap();
    assert_eq!(record["failure"]["kind"], "verification-failure");
}

#[test]
fn compat_reports_the_commuting_diagram() {
    let out = lofu(&[
        "compat", "--complex", "circle", "--group", "Z", "--degree", "1", "--lmax", "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("diagram commutes"));
}

#[test]
fn complex_documents_load_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pentagon.json");
    std::fs::write(
        &path,
        r#"{"vertices":5,"simplices":[[0,1],[1,2],[2,3],[3,4],[4,0]]}"#,
    )
    .unwrap();
    let out = lofu(&[
        "cohomology", "--complex", path.to_str().unwrap(), "--group", "Z", "--degree", "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "Z");
}
