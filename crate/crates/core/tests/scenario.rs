//! Config parsing, validation and end-to-end runs of shortened presets.

use std::fs;
use std::path::Path;

use blowup_core::io::read_snapshot;
use blowup_core::scenario::{list_presets, preset, run_scenario, Mode, Scenario, PRESET_NAMES};
use blowup_core::Error;

fn short(name: &str, end: f64) -> Scenario {
    let mut s = preset(name).unwrap();
    if s.mode != Mode::Spectra {
        s.time.end = end;
    }
    s
}

fn names_in(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    v.sort();
    v
}

fn config_errors(e: Error) -> Vec<String> {
    match e {
        Error::Config(v) => v,
        other => panic!("expected a config error, got {other}"),
    }
}

#[test]
fn exactly_six_presets() {
    let names: Vec<&str> = list_presets().iter().map(|p| p.0).collect();
    assert_eq!(names, PRESET_NAMES);
    assert!(list_presets().iter().all(|(_, d)| !d.is_empty()));
    assert!(preset("fig3").is_none());
}

#[test]
fn presets_survive_serialization() {
    for name in PRESET_NAMES {
        let s = preset(name).unwrap();
        let text = s.to_ini();
        assert_eq!(Scenario::load(&text, &[]).unwrap(), s);
        assert_eq!(Scenario::load(&text, &[]).unwrap().to_ini(), text);
    }
}

#[test]
fn overrides_replace_file_values() {
    let s = preset("fig2b").unwrap();
    let t = s
        .with_overrides(&[
            "grid.count=512".into(),
            "time.end=1".into(),
            "trajectories.count=11".into(),
        ])
        .unwrap();
    assert_eq!(t.grid.count, 512);
    assert_eq!(t.time.end, 1.0);
    assert_eq!(t.trajectories.unwrap().count, 11);
    assert!(s.with_overrides(&["bogus".into()]).is_err());
}

#[test]
fn validation_lists_every_violation() {
    let text = "\
[scenario]
mode = evolve
clip_fraction = 1.5
[grid]
length = 50
count = 1000
[time]
dt = 0
[trajectories]
count = 5
half_range = 40
[packet]
kind = gaussian
sigma0 = 1
";
    let errs = config_errors(Scenario::load(text, &[]).unwrap_err());
    let joined = errs.join("\n");
    for needle in [
        "power of two",
        "dt must be > 0",
        "clip_fraction",
        "seeds must lie inside",
    ] {
        assert!(joined.contains(needle), "missing `{needle}` in:\n{joined}");
    }
    assert_eq!(errs.len(), 4, "{joined}");
}

#[test]
fn structural_errors_are_collected() {
    let text = "[grid]\ncount = many\ncolour = red\n[nonsense]\n[packet]\nkind = gaussian\n";
    let errs = config_errors(Scenario::load(text, &[]).unwrap_err());
    let joined = errs.join("\n");
    assert!(joined.contains("cannot parse `many`"));
    assert!(joined.contains("unknown key `colour`"));
    assert!(joined.contains("unknown section [nonsense]"));
    assert!(joined.contains("sigma0: missing"));
    let errs = config_errors(Scenario::load("[grid\nlength 3\n", &[]).unwrap_err());
    assert_eq!(errs.len(), 2);
}

#[test]
fn aliasing_packets_are_rejected() {
    let s = preset("fig2a")
        .unwrap()
        .with_overrides(&["grid.count=256".into()]);
    let joined = config_errors(s.unwrap_err()).join("\n");
    assert!(joined.contains("Nyquist"), "{joined}");
}

#[test]
fn evolve_run_writes_fields_moments_trajectories_and_heatmap() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("fig2b");
    let s = short("fig2b", 0.1);
    let summary = run_scenario(&s, &dir).unwrap();
    let names = names_in(&dir);
    let expected = [
        "config.ini",
        "field_end.bups",
        "field_end.csv",
        "field_focus.bups",
        "field_focus.csv",
        "field_start.bups",
        "field_start.csv",
        "heatmap.svg",
        "moments.csv",
        "trajectories.csv",
        "trajectory_flags.csv",
    ];
    assert_eq!(names, expected);
    assert_eq!(summary.files.len(), expected.len());

    let echoed = fs::read_to_string(dir.join("config.ini")).unwrap();
    assert_eq!(Scenario::load(&echoed, &[]).unwrap(), s);

    let end = read_snapshot(&mut fs::File::open(dir.join("field_end.bups")).unwrap()).unwrap();
    assert!((end.time() - 0.1).abs() < 1e-12);
    assert_eq!(end.grid().count(), 1024);

    let moments = fs::read_to_string(dir.join("moments.csv")).unwrap();
    assert_eq!(moments.lines().count(), 1 + s.time.snapshot_times().len());
    let traj = fs::read_to_string(dir.join("trajectories.csv")).unwrap();
    assert!(traj.lines().next().unwrap().ends_with(",x_51"));
    let flags = fs::read_to_string(dir.join("trajectory_flags.csv")).unwrap();
    assert_eq!(flags.lines().count(), 52);
    let svg = fs::read_to_string(dir.join("heatmap.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    assert_eq!(svg.matches("<polyline").count(), 51);
}

#[test]
fn empty_trajectory_block_gives_fields_only() {
    let tmp = tempfile::tempdir().unwrap();
    let mut text = short("fig2b", 0.05).to_ini();
    // strip the trajectory entries but keep an empty header
    let start = text.find("[trajectories]").unwrap();
    let stop = start + text[start..].find("\n\n").unwrap();
    text.replace_range(start..stop, "[trajectories]");
    let s = Scenario::load(&text, &[]).unwrap();
    assert!(s.trajectories.is_none());
    run_scenario(&s, tmp.path()).unwrap();
    let names = names_in(tmp.path());
    assert!(
        names.iter().all(|n| !n.starts_with("trajector")),
        "{names:?}"
    );
    assert!(names.contains(&"moments.csv".to_string()));
    let svg = fs::read_to_string(tmp.path().join("heatmap.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 0);
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let s = short("fig2a", 0.05);
    let a = run_scenario(&s, &tmp.path().join("a")).unwrap();
    let b = run_scenario(&s, &tmp.path().join("b")).unwrap();
    assert_eq!(a.files.len(), b.files.len());
    for (fa, fb) in a.files.iter().zip(&b.files) {
        assert_eq!(fa.file_name(), fb.file_name());
        assert!(
            fs::read(fa).unwrap() == fs::read(fb).unwrap(),
            "{} differs",
            fa.display()
        );
    }
}

#[test]
fn fwhm_run_has_one_column_per_packet() {
    let tmp = tempfile::tempdir().unwrap();
    let s = short("fig6", 0.02);
    run_scenario(&s, tmp.path()).unwrap();
    assert_eq!(names_in(tmp.path()), ["config.ini", "fwhm.csv", "fwhm.svg"]);
    let csv = fs::read_to_string(tmp.path().join("fwhm.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,singular,gaussian_plus,gaussian_minus,rectangle"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 21);
    for r in rows {
        assert_eq!(r.split(',').count(), 5);
        assert!(r
            .split(',')
            .skip(1)
            .all(|v| v.parse::<f64>().unwrap() > 0.0));
    }
    let svg = fs::read_to_string(tmp.path().join("fwhm.svg")).unwrap();
    for label in ["singular", "gaussian_plus", "gaussian_minus", "rectangle"] {
        assert!(svg.contains(label));
    }
}

#[test]
fn spectra_run_emits_both_densities_for_all_packets() {
    let tmp = tempfile::tempdir().unwrap();
    run_scenario(&preset("fig5").unwrap(), tmp.path()).unwrap();
    assert_eq!(
        names_in(tmp.path()),
        [
            "config.ini",
            "momentum_density.csv",
            "momentum_density.svg",
            "position_density.csv",
            "position_density.svg",
            "spectra_report.txt"
        ]
    );
    for (file, head) in [
        ("position_density.csv", "x,"),
        ("momentum_density.csv", "k,"),
    ] {
        let csv = fs::read_to_string(tmp.path().join(file)).unwrap();
        assert!(csv.starts_with(&format!(
            "{head}singular,gaussian_plus,gaussian_minus,rectangle\n"
        )));
        assert_eq!(csv.lines().count(), 1025);
    }
    let report = fs::read_to_string(tmp.path().join("spectra_report.txt")).unwrap();
    // the narrow waist is the broadest in k among the two Gaussians
    let order = report.lines().last().unwrap();
    assert!(
        order.find("gaussian_plus").unwrap() < order.find("gaussian_minus").unwrap(),
        "{order}"
    );
}

#[test]
fn failed_validation_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("never");
    let mut s = preset("fig2b").unwrap();
    s.time.dt = -1.0;
    assert!(matches!(run_scenario(&s, &dir), Err(Error::Config(_))));
    assert!(!dir.exists());
}

#[test]
fn runtime_failure_removes_partial_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("partial");
    // a pre-existing file in the way of the heatmap forces a late write error
    let mut s = short("fig2b", 0.02);
    s.trajectories = None;
    fs::create_dir_all(dir.join("heatmap.svg")).unwrap();
    let err = run_scenario(&s, &dir).unwrap_err();
    assert!(matches!(err, Error::Io(_)), "{err}");
    assert_eq!(names_in(&dir), ["heatmap.svg"]);
}
