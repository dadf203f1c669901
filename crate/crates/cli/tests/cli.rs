//! End-to-end subcommand tests: reports, JSON schema stability, and exit
//! codes.

use clap::Parser;
use largo_cli::app::{run, Cli};
use std::io::Write;
use std::path::PathBuf;

fn data(name: &str) -> String {
    let mut path = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    path.push("../../presentations");
    path.push(name);
    path.to_string_lossy().into_owned()
}

fn write_temp(dir: &tempfile::TempDir, name: &str, contents: &str) -> String {
    let path = dir.path().join(name);
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    path.to_string_lossy().into_owned()
}

fn invoke(args: &[&str]) -> (String, i32) {
    let cli = Cli::try_parse_from(args).expect("arguments parse");
    let mut out = Vec::new();
    let code = run(cli, &mut out);
    (String::from_utf8(out).unwrap(), code)
}

fn invoke_json(args: &[&str]) -> (serde_json::Value, i32) {
    let (text, code) = invoke(args);
    (serde_json::from_str(&text).expect("valid JSON"), code)
}

#[test]
fn certify_chained_pairs_json() {
    let file = data("chained_pairs_n5.pres");
    let (json, code) = invoke_json(&["largo", "certify", &file, "--format", "json"]);
    assert_eq!(code, 0);
    assert_eq!(json["rule"], "THM_FIN_ABEL_P1");
    assert_eq!(json["witnesses"]["inequality_lhs"], "3/2");
    assert_eq!(json["witnesses"]["threshold"], "1");
    assert_eq!(json["witnesses"]["l"], 6);
    let j_set: Vec<u64> =
        json["witnesses"]["j_set"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
    assert_eq!(j_set, vec![2, 4, 6, 8, 10, 11]);
    // Schema-stable envelope.
    for field in ["input", "presentation_summary", "rule", "witnesses", "timings"] {
        assert!(json.get(field).is_some(), "missing field {field}");
    }
    assert!(json["witnesses"]["abelian_summary"]["order"].is_string());
    assert_eq!(json["presentation_summary"]["deficiency"], -1);
}

#[test]
fn certify_rejections_json_and_exit_codes() {
    let file = data("cyclic6.pres");
    let (json, code) = invoke_json(&["largo", "certify", &file, "--format", "json"]);
    assert_eq!(code, 0);
    assert!(json.get("rule").is_none());
    let rejections = json["rejections"].as_array().unwrap();
    assert_eq!(rejections.len(), 4);
    for r in rejections {
        assert!(r["rule"].is_string());
        assert!(r["reason"].is_string());
        assert!(r["detail"].is_string());
    }
    assert_eq!(rejections[0]["rule"], "DEFICIENCY_GE_2");
    assert_eq!(rejections[1]["reason"], "FINITE_ABELIANISATION");
    assert_eq!(rejections[2]["reason"], "WRONG_DEFICIENCY");

    // --require turns the miss into exit code 2.
    let (_, code) = invoke(&["largo", "certify", &file, "--require"]);
    assert_eq!(code, 2);
}

#[test]
fn certify_cyclic_product_rule() {
    let file = data("cyclic_product.pres");
    let (json, code) = invoke_json(&["largo", "certify", &file, "--format", "json"]);
    assert_eq!(code, 0);
    assert_eq!(json["rule"], "THM_FIN_ABEL_P2");
    assert_eq!(json["witnesses"]["inequality_lhs"], "5/3");
    assert_eq!(json["witnesses"]["order"], "3");
}

#[test]
fn certify_commutator_tower() {
    let file = data("commutator_tower.pres");
    let (json, code) = invoke_json(&["largo", "certify", &file, "--format", "json"]);
    assert_eq!(code, 0);
    assert_eq!(json["rule"], "COR_INF_ABEL");
    assert_eq!(json["witnesses"]["prime"], 2);
    assert_eq!(json["witnesses"]["exempt"].as_array().unwrap().len(), 0);
    assert!(json["witnesses"]["phi"].is_object());
}

#[test]
fn certify_rule_order_flag() {
    // With the deficiency rule excluded, the prime-count rule certifies a
    // deficiency-two presentation instead.
    let dir = tempfile::tempdir().unwrap();
    let file = write_temp(&dir, "free.pres", "< x, y, z | x^2 >\n");
    let (json, _) = invoke_json(&["largo", "certify", &file, "--format", "json"]);
    assert_eq!(json["rule"], "DEFICIENCY_GE_2");
    let (json, _) = invoke_json(&[
        "largo",
        "certify",
        &file,
        "--rules",
        "COR_INF_ABEL",
        "--format",
        "json",
    ]);
    assert_eq!(json["rule"], "COR_INF_ABEL");

    let (_, code) = invoke(&["largo", "certify", &file, "--rules", "NO_SUCH_RULE"]);
    assert_eq!(code, 1);
}

#[test]
fn abel_reports() {
    let file = data("cyclic6.pres");
    let (text, code) = invoke(&["largo", "abel", &file]);
    assert_eq!(code, 0);
    assert!(text.contains("Z/6"), "unexpected output: {text}");
    assert!(text.contains("order 6"));

    let dir = tempfile::tempdir().unwrap();
    let file = write_temp(&dir, "klein.pres", "< a, t | a^2 >\n");
    let (json, _) = invoke_json(&["largo", "abel", &file, "--format", "json"]);
    assert_eq!(json["abelianisation"]["order"], "infinite");
    assert_eq!(json["abelianisation"]["free_rank"], 1);
    assert_eq!(json["surjection"]["t"], "1");
    assert_eq!(json["surjection"]["a"], "0");
}

#[test]
fn spectrum_reports() {
    let file = data("chained_pairs_n5.pres");
    let (json, code) = invoke_json(&["largo", "spectrum", &file, "--format", "json"]);
    assert_eq!(code, 0);
    let j_set: Vec<u64> =
        json["j_set"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
    assert_eq!(j_set, vec![2, 4, 6, 8, 10, 11]);
    assert_eq!(json["l"], 6);
    assert_eq!(json["records"].as_array().unwrap().len(), 11);
    assert_eq!(json["evidence"]["nontrivial"], true);
    assert_eq!(json["evidence"]["infinite_deletion"], 1);
}

#[test]
fn bound_reports() {
    let file = data("cyclic6.pres");
    let (json, code) = invoke_json(&["largo", "bound", &file, "--format", "json"]);
    assert_eq!(code, 0);
    assert_eq!(json["bound"], "2");
    assert_eq!(json["rdef"], "7/6");
    assert_eq!(json["index"], "6");

    // Infinite abelianisation is an input error for this subcommand.
    let dir = tempfile::tempdir().unwrap();
    let file = write_temp(&dir, "free.pres", "< a, t | a^2 >\n");
    let (_, code) = invoke(&["largo", "bound", &file]);
    assert_eq!(code, 1);
}

#[test]
fn delta_reports() {
    let dir = tempfile::tempdir().unwrap();
    // The canonical surjection here is a -> 0, t -> 1.
    let file = write_temp(&dir, "comm.pres", "< a, t | a^2 >\n");
    let (json, code) =
        invoke_json(&["largo", "delta", &file, "--word", "[a,t^3]", "--format", "json"]);
    assert_eq!(code, 0);
    assert_eq!(json["delta"], "3");

    // Explicit weights override the canonical choice.
    let (json, _) = invoke_json(&[
        "largo", "delta", &file, "--word", "t^5", "--phi", "t=1,a=0", "--format", "json",
    ]);
    assert_eq!(json["delta"], "5");

    // Finite abelianisation with no --phi cannot pick a map.
    let file = write_temp(&dir, "finite.pres", "< x | x^2 >\n");
    let (_, code) = invoke(&["largo", "delta", &file, "--word", "x"]);
    assert_eq!(code, 1);
}

#[test]
fn rewrite_triangular() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_temp(&dir, "p.pres", "< x, y | x y, y >\n");
    let (json, code) =
        invoke_json(&["largo", "rewrite", &file, "--mode", "triangular", "--format", "json"]);
    assert_eq!(code, 0);
    assert_eq!(json["presentation"], "< x, y | x, y >");
    assert_eq!(json["dictionaries"]["backward"]["x"], "x y");
}

#[test]
fn rewrite_t_zero() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_temp(&dir, "p.pres", "< x, y | (x y)^2 >\n");
    let (json, code) =
        invoke_json(&["largo", "rewrite", &file, "--mode", "t-zero", "--format", "json"]);
    assert_eq!(code, 0);
    assert_eq!(json["presentation"], "< y1, y2, t | (y1 t y2 t^-1)^2, y1 >");
    assert_eq!(json["dictionaries"]["forward"]["x"], "y1 t");
}

#[test]
fn rewrite_conjugate() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_temp(&dir, "p.pres", "< a, t | [a,t]^2 >\n");
    let (json, code) = invoke_json(&[
        "largo", "rewrite", &file, "--mode", "conjugate", "--phi", "t=1", "--format", "json",
    ]);
    assert_eq!(code, 0);
    assert_eq!(json["relators"][0]["text"], "a@0 a@1^-1");
    assert_eq!(json["relators"][0]["power"], 2);
    assert_eq!(json["relators"][0]["max_height"], 1);

    // Without --phi the mode has no stable generator to use.
    let (_, code) = invoke(&["largo", "rewrite", &file, "--mode", "conjugate"]);
    assert_eq!(code, 1);
}

#[test]
fn input_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_temp(&dir, "bad.pres", "< x, x | x^2 >\n");
    let (text, code) = invoke(&["largo", "abel", &file]);
    assert_eq!(code, 1);
    assert!(text.contains("duplicate"), "unexpected output: {text}");

    let (_, code) = invoke(&["largo", "abel", "/nonexistent/path.pres"]);
    assert_eq!(code, 1);
}

#[test]
fn multiple_files_keep_order() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_temp(&dir, "a.pres", "< x | x^2 >\n");
    let b = write_temp(&dir, "b.pres", "< y | y^3 >\n");
    let (text, code) = invoke(&["largo", "abel", &a, &b]);
    assert_eq!(code, 0);
    let pos_a = text.find("Z/2").unwrap();
    let pos_b = text.find("Z/3").unwrap();
    assert!(pos_a < pos_b, "reports out of order: {text}");

    // One bad file makes the whole run exit 1, but good reports still print.
    let bad = write_temp(&dir, "bad.pres", "garbage\n");
    let (text, code) = invoke(&["largo", "abel", &a, &bad]);
    assert_eq!(code, 1);
    assert!(text.contains("Z/2"));
}

#[test]
fn certify_text_output() {
    let file = data("chained_pairs_n5.pres");
    let (text, _) = invoke(&["largo", "certify", &file]);
    assert!(text.contains("certificate THM_FIN_ABEL_P1"), "output: {text}");
    assert!(text.contains("3/2"));

    let file = data("cyclic6.pres");
    let (text, _) = invoke(&["largo", "certify", &file]);
    assert!(text.contains("no certificate"));
    assert!(text.contains("DEFICIENCY_GE_2"));
}
