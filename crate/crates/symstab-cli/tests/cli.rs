use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symstab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn hilbert_values_and_oracle() {
    let out = run(&["hilbert", "R", "-1", "-1"]);
    assert_eq!(stdout(&out).trim(), "-1");
    assert!(out.status.success());

    let out = run(&["hilbert", "Qp:3", "3", "3", "--oracle"]);
    assert_eq!(stdout(&out), "-1\noracle: -1 (agrees)\n");

    let out = run(&["hilbert", "Qp:5", "2", "3", "--oracle"]);
    assert!(stdout(&out).contains("agrees"));
    assert!(out.status.success());
}

#[test]
fn parse_errors_exit_with_two() {
    assert_eq!(run(&["hilbert", "Qp:4", "1", "1"]).status.code(), Some(2));
    assert_eq!(run(&["hilbert", "Qp:3", "0", "1"]).status.code(), Some(2));
    assert_eq!(run(&["form", "mu", "qf(Qp:3)[1,x]"]).status.code(), Some(2));
    assert_eq!(run(&["pair", "SLxGL", "--field", "Qp:3", "--dims", "2"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "O", "--field", "Qp:3", "--max-dim", "9"]).status.code(), Some(2));
}

#[test]
fn form_calculators() {
    let out = run(&["form", "mu", "qf(Qp:3)[1,-1]"]);
    assert_eq!(stdout(&out).trim(), "1");

    let out = run(&["form", "equiv", "qf(R)[+,-]", "qf(R)[-,+]"]);
    assert_eq!(stdout(&out).trim(), "true");
    assert_eq!(out.status.code(), Some(0));

    let out = run(&["form", "leq", "qf(Qp:3)[1]", "qf(Qp:3)[3,3]"]);
    assert_eq!(stdout(&out).trim(), "false");
    assert_eq!(out.status.code(), Some(1));

    let out = run(&["form", "witt", "qf(Qp:3)[1,1,3,2]"]);
    assert!(stdout(&out).starts_with("1 hyperbolic plane(s)"));

    let out = run(&["form", "invariants", "qf(Qp:3)[3,3]"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["hasse"], -1);
    assert_eq!(v["rank"], 2);

    let out = run(&["form", "rep", "qf(Qp:3)[1,1]", "3"]);
    assert_eq!(stdout(&out).trim(), "false");

    let out = run(&["form", "mu", "hf(Qp:3,d=p)[rank=2,det=nonnorm]"]);
    assert_eq!(stdout(&out).trim(), "1");
}

#[test]
fn pair_verdicts() {
    let out = run(&["pair", "SLxGL", "--field", "Qp:3", "--dims", "2,2"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    for key in ["stable", "s_stable", "p_stable", "gelfand"] {
        assert_eq!(v[key], "no", "{key}");
    }

    let out = run(&["pair", "quaternion", "-p", "7"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["stable"], "no");
    assert_eq!(v["family"], "Quaternion");

    let out = run(&["pair", "O", "--bplus", "qf(R)[+,+]", "--bminus", "qf(R)[+,-]"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["stable"], "yes");

    let out = run(&["pair", "SL_basechange", "--ext", "Qp:5,d=u", "--dim", "3", "--format", "plain"]);
    assert!(stdout(&out).contains("gelfand: yes"));
}

#[test]
fn pair_json_round_trips() {
    let out = run(&["pair", "U", "--bplus", "hf(Qp:3,d=p)[rank=1,det=norm]", "--bminus", "hf(Qp:3,d=p)[rank=2,det=nonnorm]"]);
    let row: symstab::stability::Row = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(symstab::stability::classify(&row.spec).unwrap(), row.verdict);
}

#[test]
fn sweep_formats_and_check() {
    let out = run(&["sweep", "O", "--field", "Qp:3", "--max-dim", "0", "--format", "csv"]);
    assert_eq!(stdout(&out).trim(), "family,params,stable,s_stable,p_stable,gelfand,citations");

    let out = run(&["sweep", "O", "--field", "Qp:3", "--max-dim", "4", "--format", "json", "--check"]);
    assert!(out.status.success());
    let rows: Vec<symstab::stability::Row> = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(!rows.is_empty());

    let out = run(&["sweep", "all", "--field", "Qp:3", "--max-dim", "6", "--summary"]);
    let text = stdout(&out);
    assert!(text.contains("| SLxGL | non-Archimedean | dim V+ != dim V- |"));
    assert!(text.contains("| O_pair | non-Archimedean | (A) | (C) | (B) |"));

    let dir = std::env::temp_dir().join(format!("symstab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("gl.md");
    let out = run(&["sweep", "GLxGL", "--field", "R", "--max-dim", "2", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(written.lines().count(), 2 + 5);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn cohomology_reports() {
    let out = run(&["cohom", "--builtin", "S3xS3", "--involution", "flip"]);
    assert!(stdout(&out).contains("|H^1| = 1\n"));
    assert!(out.status.success());

    let out = run(&["cohom", "--builtin", "1"]);
    assert!(stdout(&out).contains("|H^1| = 1\n"));

    let out = run(&["cohom", "--builtin", "D4", "--involution", "conj:s"]);
    assert!(stdout(&out).contains("agrees with double cosets on 8 of 8"));

    let dir = std::env::temp_dir().join(format!("symstab-cohom-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("z2.json");
    std::fs::write(&path, r#"{"elements": ["e", "a"], "mul": [[0, 1], [1, 0]]}"#).unwrap();
    let out = run(&["cohom", "--file", path.to_str().unwrap()]);
    assert!(stdout(&out).contains("|H^1| = 2\n"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn oracle_subcommands() {
    let out = run(&["oracle", "hilbert", "Qp:3", "3", "3"]);
    assert_eq!(stdout(&out).trim(), "-1");
    let out = run(&["oracle", "isotropy", "qf(Qp:3)[1,1,1]"]);
    assert_eq!(stdout(&out).trim(), "true");
    assert_eq!(run(&["oracle", "isotropy", "qf(Qp:3)[1,1]"]).status.code(), Some(1));
}
