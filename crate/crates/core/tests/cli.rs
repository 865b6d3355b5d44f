mod common;

use common::{cli, scratch};
use kmln::algebra::assemble;
use kmln::document::MatrixDocument;
use kmln::families::FamilyTag;
use kmln::rank3::VariantId;
use kmln::types::{Mat4, ParamSet};
use serde_json::Value;

fn doc(text: &str) -> MatrixDocument {
    MatrixDocument::from_json(text).unwrap()
}

#[test]
fn help_and_missing_command() {
    assert_eq!(cli(&["--help"], "").code, 0);
    let r = cli(&[], "");
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("Usage"));
}

#[test]
fn gen_k2_has_equal_diagonal_blocks() {
    let g = doc(&cli(&["gen", "K-2", "--seed", "7"], "").stdout).matrix();
    assert_eq!(g.block(0, 0), g.block(1, 1));
    assert_eq!(g.block(0, 1), Mat4::ZERO.block(0, 0));
    assert_eq!(g.block(1, 0), Mat4::ZERO.block(0, 0));
}

#[test]
fn gen_variant_00_has_zero_first_row_and_column() {
    let g = doc(&cli(&["gen", "00", "--seed", "7"], "").stdout).matrix();
    assert!(g.row(0).iter().chain(g.col(0).iter()).all(|z| z.norm() == 0.0));
}

#[test]
fn gen_is_deterministic_and_seed_dependent() {
    let a = cli(&["gen", "KM-5", "--seed", "3"], "").stdout;
    assert_eq!(a, cli(&["gen", "KM-5", "--seed", "3"], "").stdout);
    assert_ne!(a, cli(&["gen", "KM-5", "--seed", "4"], "").stdout);
}

#[test]
fn gen_real_mode_gives_real_matrices() {
    for tag in ["K-6", "NLM-1", "21"] {
        let g = doc(&cli(&["gen", tag, "--real", "--seed", "1"], "").stdout).matrix();
        assert_eq!(g.max_imag(), 0.0, "{tag}");
    }
}

#[test]
fn gen_errors() {
    let r = cli(&["gen", "K-9"], "");
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("K-1") && r.stderr.contains("NLM-1"));

    let r = cli(&["gen", "K-6", "--const", "A=0"], "");
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("nonzero"));

    assert_eq!(cli(&["gen", "K-2", "--const", "A=1"], "").code, 3);
    assert_eq!(cli(&["gen", "00", "--const", "A=1"], "").code, 3);
    assert_eq!(cli(&["gen", "K-3", "--const", "D"], "").code, 2);
    assert_eq!(cli(&["gen", "K-3", "--const", "Q=1"], "").code, 2);
    assert_eq!(cli(&["gen", "K-3", "--const", "D=1,2,3"], "").code, 2);
}

#[test]
fn gen_accepts_complex_constants() {
    let out = cli(&["gen", "K-7", "--const", "A=1,-0.5", "--const", "alpha=2"], "").stdout;
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["meta"]["constants"]["A"], serde_json::json!([1.0, -0.5]));
    assert_eq!(v["meta"]["constants"]["alpha"], serde_json::json!([2.0, 0.0]));
}

#[test]
fn gen_then_classify_reports_the_generator() {
    let names = FamilyTag::ALL
        .iter()
        .map(|t| t.name().to_string())
        .chain(VariantId::all().map(|v| v.to_string()));
    for name in names {
        let generated = cli(&["gen", &name, "--seed", "11"], "").stdout;
        let r = cli(&["classify"], &generated);
        assert_eq!(r.code, 0);
        let report: Value = serde_json::from_str(&r.stdout).unwrap();
        let listed = report["families"]
            .as_array()
            .unwrap()
            .iter()
            .any(|m| m["tag"] == name.as_str())
            || report["variants"]
                .as_array()
                .unwrap()
                .iter()
                .any(|v| v == name.as_str());
        assert!(listed, "{name}");
    }
}

#[test]
fn classify_k3_recovers_d() {
    let generated = cli(&["gen", "K-3", "--const", "D=2", "--seed", "5"], "").stdout;
    let report: Value = serde_json::from_str(&cli(&["classify"], &generated).stdout).unwrap();
    assert_eq!(report["rank"], 2);
    let k3 = report["families"]
        .as_array()
        .unwrap()
        .iter()
        .find(|m| m["tag"] == "K-3")
        .unwrap();
    let d = k3["constants"]["D"][0].as_f64().unwrap();
    assert!((d - 2.0).abs() < 1e-9);
}

#[test]
fn classify_identity_and_zero() {
    let identity = MatrixDocument::from_params(ParamSet::IDENTITY).to_json();
    let report: Value = serde_json::from_str(&cli(&["classify"], &identity).stdout).unwrap();
    assert_eq!(report["rank"], 4);
    assert_eq!(report["variants"].as_array().unwrap().len(), 0);

    let zero = MatrixDocument::from_params(ParamSet::ZERO).to_json();
    let report: Value = serde_json::from_str(&cli(&["classify"], &zero).stdout).unwrap();
    assert_eq!(report["rank"], 0);
    assert_eq!(report["families"].as_array().unwrap().len(), 39);
    assert_eq!(report["variants"].as_array().unwrap().len(), 16);
}

#[test]
fn classify_reads_files_and_matrix_only_documents() {
    let text = "{\"matrix\":[[[1,0],[0,0],[0,0],[0,0]],[[0,0],[1,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]]]}";
    let path = scratch("cli_matrix_only.json", text);
    let r = cli(&["classify", path.to_str().unwrap()], "");
    assert_eq!(r.code, 0, "{}", r.stderr);
    let report: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(report["rank"], 2);
    assert_eq!(report["real_matrix"], true);
}

#[test]
fn malformed_documents_exit_2_with_position() {
    let r = cli(&["classify"], "{\"params\": {\"k\": [[1, 0]]}}");
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("line 1 column"), "{}", r.stderr);
    assert_eq!(cli(&["classify"], "{}").code, 2);
    assert_eq!(cli(&["classify", "/nonexistent/doc.json"], "").code, 2);
    assert_eq!(cli(&["classify", "--tol", "-1"], "").code, 2);
}

#[test]
fn tampered_meta_is_rejected() {
    let generated = cli(&["gen", "K-3", "--const", "D=2", "--seed", "5"], "").stdout;
    let tampered = generated.replace("\"D\":[2.0,0.0]", "\"D\":[3.0,0.0]");
    assert_ne!(tampered, generated);
    let r = cli(&["classify"], &tampered);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("not a K-3 member"), "{}", r.stderr);
}

#[test]
fn compose_identity_is_neutral() {
    let x = cli(&["gen", "LN-2", "--seed", "2"], "").stdout;
    let identity = scratch("cli_identity.json", &MatrixDocument::from_params(ParamSet::IDENTITY).to_json());
    let r = cli(&["compose", identity.to_str().unwrap(), "-"], &x);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(doc(&r.stdout).params(), doc(&x).params());
}

#[test]
fn compose_matches_dense_product() {
    let a = cli(&["gen", "KMN-2", "--seed", "1"], "").stdout;
    let b = cli(&["gen", "N-3", "--seed", "2"], "").stdout;
    let left = scratch("cli_left.json", &a);
    let right = scratch("cli_right.json", &b);
    let r = cli(&["compose", left.to_str().unwrap(), right.to_str().unwrap()], "");
    let product = doc(&r.stdout);
    assert!(product.params.is_some() && product.matrix.is_some());
    let dense = doc(&a).matrix() * doc(&b).matrix();
    let g = assemble(&product.params());
    assert!(g.max_abs_diff(&dense) / dense.norm() < 1e-10);
}

#[test]
fn compose_rejects_two_stdin_factors() {
    assert_eq!(cli(&["compose", "-", "-"], "").code, 2);
}

#[test]
fn rank_command() {
    let generated = cli(&["gen", "12", "--seed", "3"], "").stdout;
    let v: Value = serde_json::from_str(&cli(&["rank"], &generated).stdout).unwrap();
    assert_eq!(v["rank"], 3);
    assert_eq!(v["singular_values"].as_array().unwrap().len(), 4);
}

#[test]
fn verify_single_family() {
    let r = cli(&["verify", "--families", "K-3", "--samples", "1"], "");
    assert_eq!(r.code, 0);
    let records: Vec<Value> = r.stdout.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(records.len(), 3 + 4 + 16 * 4);
    let subjects: Vec<&str> = records
        .iter()
        .filter(|r| r["check"].as_str().unwrap().starts_with("family") || r["check"] == "rank_profile")
        .map(|r| r["subject"].as_str().unwrap())
        .collect();
    assert!(subjects.iter().all(|s| *s == "K-3"));
    assert!(records.iter().all(|r| r["samples"] == 1 || r["check"] == "variant_table"));
    assert!(r.stderr.contains("0 fail"));
}

#[test]
fn verify_strict_and_fault_injection() {
    assert_eq!(cli(&["verify", "--family", "KN-1", "--variant", "00", "--samples", "5"], "").code, 0);
    assert_eq!(
        cli(&["verify", "--strict", "--family", "KN-1", "--variant", "00", "--samples", "5"], "").code,
        1
    );
    assert_eq!(
        cli(&["verify", "--strict", "--family", "K-3", "--variant", "00", "--samples", "5"], "").code,
        0
    );
    let r = cli(&["verify", "--inject-fault", "KMN-2", "--family", "KMN-2", "--samples", "5"], "");
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("\"status\":\"fail\""));
}

#[test]
fn verify_real_mode_and_output_file() {
    let path = std::path::PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli_verify.jsonl");
    let r = cli(&["verify", "--real", "--samples", "10", "--output", path.to_str().unwrap()], "");
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert!(!written.contains("\"status\":\"fail\""));
}

#[test]
fn verify_is_byte_deterministic() {
    let args = ["verify", "--seed", "9", "--samples", "10"];
    assert_eq!(cli(&args, "").stdout, cli(&args, "").stdout);
}

#[test]
fn verify_rejects_bad_flags() {
    assert_eq!(cli(&["verify", "--samples", "0"], "").code, 2);
    assert_eq!(cli(&["verify", "--tol", "0"], "").code, 2);
    assert_eq!(cli(&["verify", "--family", "Z-1"], "").code, 2);
    assert_eq!(cli(&["verify", "--variant", "44"], "").code, 2);
}
