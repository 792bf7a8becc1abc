use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn sim(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_blowup-sim"));
    cmd.args(args)
        .env_remove("BLOWUP_SIM_THREADS")
        .env("RUST_LOG", "error");
    if let Some(t) = threads {
        cmd.env("BLOWUP_SIM_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn list_presets_prints_six() {
    let o = sim(&["list-presets"], None);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let names: Vec<&str> = text
        .lines()
        .map(|l| l.split_whitespace().next().unwrap())
        .collect();
    assert_eq!(names, ["fig2a", "fig2b", "fig2c", "fig4", "fig5", "fig6"]);
}

#[test]
fn validate_accepts_presets_and_reports_all_errors() {
    assert_eq!(
        sim(&["validate", "--preset", "fig6"], None).status.code(),
        Some(0)
    );

    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.ini");
    fs::write(
        &cfg,
        "[scenario]\nclip_fraction = 0\n[grid]\ncount = 100\n[time]\ndt = -1\n[packet]\nkind = gaussian\nsigma0 = 1\n",
    )
    .unwrap();
    let o = sim(&["validate", "--config", path(&cfg)], None);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    for needle in ["power of two", "dt must be > 0", "clip_fraction"] {
        assert!(err.contains(needle), "{err}");
    }
}

#[test]
fn usage_and_lookup_errors_exit_2() {
    assert_eq!(
        sim(&["validate", "--preset", "fig9"], None).status.code(),
        Some(2)
    );
    assert_eq!(sim(&["run"], None).status.code(), Some(2));
    assert_eq!(
        sim(&["validate", "--config", "/nonexistent/x.ini"], None)
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        sim(&["run", "--preset", "fig2b"], None).status.code(),
        Some(2),
        "no output directory"
    );
}

#[test]
fn run_applies_flag_overrides_and_echoes_config() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let o = sim(
        &[
            "run",
            "--preset",
            "fig2b",
            "--out",
            path(&out),
            "--t-end",
            "0.05",
            "--trajectories",
            "5",
            "--set",
            "output.formats=csv",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let echoed = fs::read_to_string(out.join("config.ini")).unwrap();
    assert!(echoed.contains("end = 0.05"));
    assert!(echoed.contains("count = 5"));
    assert!(!out.join("heatmap.svg").exists());
    let header = fs::read_to_string(out.join("trajectories.csv")).unwrap();
    assert!(header.starts_with("t,x_1,x_2,x_3,x_4,x_5\n"));

    // the echoed config reproduces the run
    let again = tmp.path().join("again");
    let o = sim(
        &[
            "run",
            "--config",
            path(&out.join("config.ini")),
            "--out",
            path(&again),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in ["moments.csv", "trajectories.csv", "field_end.csv"] {
        assert_eq!(
            fs::read(out.join(f)).unwrap(),
            fs::read(again.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn thread_cap_does_not_change_results() {
    let tmp = tempfile::tempdir().unwrap();
    let (one, many) = (tmp.path().join("one"), tmp.path().join("many"));
    let args = |d: &Path| {
        vec!["run", "--preset", "fig2a", "--t-end", "0.05", "--out"]
            .into_iter()
            .map(String::from)
            .chain([path(d).to_string()])
            .collect::<Vec<_>>()
    };
    let a = args(&one);
    let b = args(&many);
    let a: Vec<&str> = a.iter().map(String::as_str).collect();
    let b: Vec<&str> = b.iter().map(String::as_str).collect();
    assert_eq!(sim(&a, Some("1")).status.code(), Some(0));
    assert_eq!(sim(&b, Some("4")).status.code(), Some(0));
    for f in [
        "trajectories.csv",
        "trajectory_flags.csv",
        "moments.csv",
        "heatmap.svg",
    ] {
        assert_eq!(
            fs::read(one.join(f)).unwrap(),
            fs::read(many.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn invalid_thread_cap_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("x");
    for bad in ["0", "many", "-3"] {
        let o = sim(
            &[
                "run",
                "--preset",
                "fig2b",
                "--out",
                path(&out),
                "--t-end",
                "0.01",
            ],
            Some(bad),
        );
        assert_eq!(o.status.code(), Some(2), "{bad}");
        assert!(stderr(&o).contains("BLOWUP_SIM_THREADS"));
    }
    assert!(!out.exists());
}

#[test]
fn runtime_failure_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "not a directory").unwrap();
    let o = sim(
        &[
            "run",
            "--preset",
            "fig2b",
            "--out",
            path(&blocker.join("sub")),
            "--t-end",
            "0.01",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}
