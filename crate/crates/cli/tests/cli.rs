use std::path::PathBuf;

use assert_cmd::Command;
use tempfile::TempDir;

fn modcheck() -> Command {
    let mut c = Command::cargo_bin("modcheck").unwrap();
    c.env_remove("MODCHECK_CAP");
    c
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn edge_list(n: usize, edges: &[(usize, usize)]) -> String {
    let mut s = format!("n {n}\n");
    for (u, v) in edges {
        s.push_str(&format!("{u} {v}\n"));
    }
    s
}

fn stdout(c: &mut Command) -> String {
    let out = c.assert().success().get_output().stdout.clone();
    String::from_utf8(out).unwrap()
}

fn k5(dir: &TempDir) -> PathBuf {
    let edges: Vec<_> = (0..5).flat_map(|u| (u + 1..5).map(move |v| (u, v))).collect();
    write(dir, "k5", &edge_list(5, &edges))
}

#[test]
fn formula_on_an_edge_list() {
    let d = TempDir::new().unwrap();
    let g = write(&d, "k3", &edge_list(3, &[(0, 1), (1, 2), (0, 2)]));
    let out = stdout(
        modcheck()
            .arg("check")
            .arg(&g)
            .args(["-e", "exists x. exists y. E(x,y)"]),
    );
    assert!(out.contains("result: true"), "{out}");
    let out = stdout(
        modcheck()
            .arg("check")
            .arg(&g)
            .args(["-e", "forall x. forall y. not E(x,y)"]),
    );
    assert!(out.contains("result: false"), "{out}");
}

#[test]
fn formula_on_a_structure_file() {
    let d = TempDir::new().unwrap();
    let a = write(&d, "a", "vocab P/1 R/2\nuniverse 3\nrel P 0\nrel R 0 1\nrel R 1 2\n");
    let out = stdout(
        modcheck()
            .arg("check")
            .arg(&a)
            .args(["-e", "exists x. exists y. P(x) and R(x,y)"]),
    );
    assert!(out.contains("result: true"), "{out}");
}

#[test]
fn sentence_read_from_a_file() {
    let d = TempDir::new().unwrap();
    let g = k5(&d);
    let s = write(
        &d,
        "planarize",
        "mod(forall x. forall y. (not X(x) and not X(y)) -> x = y ; tw=1) |> (base(true ; excl{K5,K33}))\n",
    );
    let out = stdout(modcheck().arg("check").arg(&g).arg(&s));
    assert!(out.contains("kind: theta"), "{out}");
    assert!(out.contains("result: true"), "{out}");
    assert!(out.contains("witness:"), "{out}");
}

#[test]
fn record_mode() {
    let d = TempDir::new().unwrap();
    let g = write(&d, "p4", &edge_list(4, &[(0, 1), (1, 2), (2, 3)]));
    let out = stdout(modcheck().arg("--record").arg("measure").arg(&g).arg("ed"));
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines.contains(&"command=measure"), "{out}");
    assert!(lines.contains(&"value=2"), "{out}");
    assert!(lines
        .iter()
        .any(|l| l.starts_with("input.sha256=") && l.len() == 13 + 64));
}

#[test]
fn measures() {
    let d = TempDir::new().unwrap();
    let c5 = write(&d, "c5", &edge_list(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]));
    let out = stdout(
        modcheck()
            .arg("measure")
            .arg(&c5)
            .args(["pdist", "--target", "forests"]),
    );
    assert!(out.contains("value: 1"), "{out}");
    let out = stdout(modcheck().arg("measure").arg(&c5).args(["gtw"]));
    assert!(out.contains("value: 2"), "{out}");
    let out = stdout(modcheck().arg("measure").arg(&c5).args(["bd", "--target", "excl{K3}"]));
    assert!(out.contains("value: 1"), "{out}");
    let never = "base(false)";
    let out = stdout(modcheck().arg("measure").arg(&c5).args(["pdist", "--target", never]));
    assert!(out.contains("value: infinite"), "{out}");
}

#[test]
fn width_report() {
    let d = TempDir::new().unwrap();
    let g = k5(&d);
    let out = stdout(
        modcheck()
            .arg("width")
            .arg(&g)
            .args(["--decomposition", "--treedepth", "--bramble"]),
    );
    assert!(out.contains("treewidth: 4"), "{out}");
    assert!(out.contains("treedepth: 5"), "{out}");
    assert!(out.contains("max_bramble_order: 5"), "{out}");
    assert!(
        out.lines()
            .any(|l| l.trim().starts_with("s td") && l.trim().ends_with(" 5 5")),
        "{out}"
    );
}

#[test]
fn modification_string() {
    let d = TempDir::new().unwrap();
    let g = k5(&d);
    let out = stdout(modcheck().arg("mod-eval").arg(&g).arg("n^2 base(true ; excl{K3})"));
    assert!(out.contains("result: false"), "{out}");
    let out = stdout(modcheck().arg("mod-eval").arg(&g).arg("n^3 base(true ; excl{K3})"));
    assert!(out.contains("result: true"), "{out}");
}

#[test]
fn walls() {
    let d = TempDir::new().unwrap();
    let text = stdout(modcheck().args(["wall", "gen", "5"]));
    let w = write(&d, "w5", &text);
    let out = stdout(modcheck().args(["wall", "partition"]).arg(&w));
    assert!(out.contains("internal_bags: 9"), "{out}");
    let out = stdout(modcheck().args(["wall", "pseudogrid"]).arg(&w).arg("3"));
    assert!(out.contains("size: 3"), "{out}");
    let out = stdout(modcheck().args(["wall", "privileged"]).arg(&w).args(["--q", "3"]));
    assert!(out.contains("privileged_count: 1"), "{out}");
    let out = stdout(
        modcheck()
            .args(["wall", "privileged"])
            .arg(&w)
            .args(["--q", "3", "--x", "", "--scenario", "o"]),
    );
    assert!(out.contains("scenario:"), "{out}");
}

#[test]
fn exit_codes() {
    let d = TempDir::new().unwrap();
    let g = write(&d, "k3", &edge_list(3, &[(0, 1), (1, 2), (0, 2)]));
    let bad = write(&d, "bad", "n 3\n0 7\n");
    modcheck()
        .arg("check")
        .arg(&g)
        .args(["-e", "exists x. E(x"])
        .assert()
        .code(2);
    modcheck().arg("check").arg(&bad).args(["-e", "true"]).assert().code(2);
    modcheck()
        .arg("check")
        .arg(d.path().join("missing"))
        .args(["-e", "true"])
        .assert()
        .code(2);
    modcheck().arg("measure").arg(&g).arg("nope").assert().code(2);
    modcheck()
        .arg("--cap")
        .arg("2")
        .arg("measure")
        .arg(&g)
        .arg("ed")
        .assert()
        .code(3);
    modcheck()
        .env("MODCHECK_CAP", "2")
        .arg("measure")
        .arg(&g)
        .arg("ed")
        .assert()
        .code(3);
    modcheck()
        .arg("check")
        .arg(&g)
        .args(["-e", "mod(forall x. not X(x) ; tw=0) |> (base(true))"])
        .assert()
        .code(4);
}
