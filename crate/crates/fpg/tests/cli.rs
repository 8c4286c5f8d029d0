use std::process::{Command, Output};

fn fpg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fpg")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn order_with_both_strategies() {
    for s in ["hlt", "felsch"] {
        let o = fpg(&["order", "a5", "--strategy", s]);
        assert!(o.status.success());
        assert_eq!(stdout(&o).trim(), "60");
    }
}

#[test]
fn non_perfect_group_exits_with_hypothesis_code() {
    let o = fpg(&["main-construction", "z2"]);
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["violations"][0], "H₁ = ℤ/2 ≠ 0");
}

#[test]
fn trivial_group_has_no_h3_claim() {
    let o = fpg(&["main-construction", "trivial", "--format", "text"]);
    assert_eq!(o.status.code(), Some(2));
    let text = stdout(&o);
    assert!(text.contains("hypotheses violated: H₃ claim absent"), "{text}");
    assert!(text.contains("[----]"), "{text}");
}

#[test]
fn class_bound_is_limited() {
    let o = fpg(&["main-construction", "binary-icosahedral", "--class", "5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn dwyer_csv_has_one_row_per_k() {
    let o = fpg(&["dwyer", "heisenberg", "--k", "3", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4, "{text}");
    assert!(lines[0].starts_with("k,phi"));
}

#[test]
fn catalog_validate_reports_bad_entry() {
    let dir = std::env::temp_dir().join(format!("fpg-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    std::fs::write(&path, r#"[{"name": "broken", "generators": ["a", "b"], "relators": ["ab("]}]"#).unwrap();
    let o = fpg(&["catalog", "validate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("broken") && err.contains("relators[0]"), "{err}");
    std::fs::remove_dir_all(&dir).unwrap();

    let o = fpg(&["catalog", "list"]);
    assert!(stdout(&o).lines().count() >= 4);
}

#[test]
fn stallings_with_map_file() {
    let dir = std::env::temp_dir().join(format!("fpg-map-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("map.txt");
    std::fs::write(&path, "# a ↦ ab\nab\nb\n").unwrap();
    let o = fpg(&["stallings", "free-rank-2", "free-rank-2", "--map", path.to_str().unwrap(), "--class", "3"]);
    std::fs::remove_dir_all(&dir).unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("isomorphism through class 3: true"));
}
