use std::path::Path;
use std::process::{Command, Output};

fn srlab(args: &[&str], dir: &Path, workers_env: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_srlab"));
    cmd.args(args).current_dir(dir).env_remove("SRLAB_WORKERS");
    if let Some(w) = workers_env {
        cmd.env("SRLAB_WORKERS", w);
    }
    cmd.output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const CURVE: &str = "mode = switching-curve\n[params]\ndelta = 5\nkappa = 0.5\nlambda = 7\n\
                     [axis1]\nname = g_drive\nmin = 0\nmax = 1\npoints = 5\n";

#[test]
fn successful_run_writes_data_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.conf"), CURVE).unwrap();
    let o = srlab(
        &["switching-curve", "--config", "c.conf", "--out", "res"],
        dir.path(),
        None,
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("res/c.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);
    assert!(csv.starts_with("g_drive,phase,"));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("res/c.json")).unwrap())
            .unwrap();
    assert_eq!(json["mode"], "switching-curve");
    assert_eq!(json["failures"], 0);
    assert!(dir.path().join("res/c_alpha.png").is_file());
}

#[test]
fn no_render_skips_images() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.conf"), CURVE).unwrap();
    let o = srlab(
        &[
            "switching-curve",
            "--config",
            "c.conf",
            "--out",
            "res",
            "--no-render",
        ],
        dir.path(),
        Some("2"),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(dir.path().join("res/c.csv").is_file());
    assert!(!dir.path().join("res/c_alpha.png").exists());
}

#[test]
fn config_errors_exit_1_with_line_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let bad = CURVE.replace("points = 5", "points = five");
    std::fs::write(dir.path().join("c.conf"), bad).unwrap();
    let o = srlab(&["switching-curve", "--config", "c.conf"], dir.path(), None);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(
        err.contains("line 10") && err.contains("axis1.points"),
        "{err}"
    );

    let unknown = CURVE.replace("kappa = 0.5", "kapa = 0.5");
    std::fs::write(dir.path().join("c.conf"), unknown).unwrap();
    let o = srlab(&["switching-curve", "--config", "c.conf"], dir.path(), None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("kapa"), "{}", stderr(&o));

    std::fs::write(dir.path().join("c.conf"), CURVE).unwrap();
    let o = srlab(&["wigner", "--config", "c.conf"], dir.path(), None);
    assert_eq!(o.status.code(), Some(1), "mode conflict");

    let o = srlab(
        &["switching-curve", "--config", "missing.conf"],
        dir.path(),
        None,
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("missing.conf"));
}

#[test]
fn argument_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.conf"), CURVE).unwrap();
    let o = srlab(&["phase-map", "--config", "c.conf"], dir.path(), None);
    assert_eq!(o.status.code(), Some(1));
    let o = srlab(
        &["switching-curve", "--config", "c.conf"],
        dir.path(),
        Some("0"),
    );
    assert_eq!(o.status.code(), Some(1), "zero workers");
    let o = srlab(
        &["switching-curve", "--config", "c.conf"],
        dir.path(),
        Some("many"),
    );
    assert_eq!(o.status.code(), Some(1));
    let o = srlab(&["--help"], dir.path(), None);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn partial_failure_exits_2_and_keeps_rows() {
    let dir = tempfile::tempdir().unwrap();
    let text = "mode = quantum-curve\n[params]\nlambda = 0\n[solver]\nfock_cutoff = 4\n\
                [axis1]\nname = n_atoms\nmin = 11\nmax = 13\npoints = 3\n";
    std::fs::write(dir.path().join("q.conf"), text).unwrap();
    let o = srlab(
        &["quantum-curve", "--config", "q.conf", "--out", "res"],
        dir.path(),
        None,
    );
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("res/q.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[1].ends_with(',') && rows[2].ends_with(','));
    assert!(!rows[3].ends_with(','));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("res/q.json")).unwrap())
            .unwrap();
    assert_eq!(json["failures"], 1);
}
