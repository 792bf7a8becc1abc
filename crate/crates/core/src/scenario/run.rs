//! Executes a validated scenario and writes its artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use log::{debug, info};

use super::{Mode, Scenario};
use crate::analysis::{self, FwhmSeries};
use crate::bohm::{integrate_trajectories, seed_positions, IntegrationOptions, TrajectoryBundle};
use crate::error::Result;
use crate::io::{self, num};
use crate::packets::sample_initial;
use crate::propagator::{Propagator, SpatialGrid, WaveField};
use crate::svg::{self, Overlay, Series};

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    /// Every file written, in creation order.
    pub files: Vec<PathBuf>,
}

struct Sink {
    dir: PathBuf,
    created_dir: bool,
    files: Vec<PathBuf>,
}

impl Sink {
    fn open(dir: &Path) -> Result<Self> {
        let created_dir = !dir.exists();
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            created_dir,
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        // track before writing so a half-written file is also cleaned up
        self.files.push(path.clone());
        fs::write(&path, bytes)?;
        debug!("wrote {}", path.display());
        Ok(())
    }

    fn discard(self) {
        for f in self.files.iter().rev() {
            let _ = fs::remove_file(f);
        }
        if self.created_dir {
            let _ = fs::remove_dir(&self.dir);
        }
    }
}

/// Runs `scenario` into `out_dir`. The effective configuration is written
/// as `config.ini`. On any failure every file written so far is removed.
pub fn run_scenario(scenario: &Scenario, out_dir: &Path) -> Result<RunSummary> {
    scenario.validate()?;
    let mut sink = Sink::open(out_dir)?;
    match execute(scenario, &mut sink) {
        Ok(()) => Ok(RunSummary {
            out_dir: sink.dir.clone(),
            files: sink.files,
        }),
        Err(e) => {
            sink.discard();
            Err(e)
        }
    }
}

fn execute(s: &Scenario, sink: &mut Sink) -> Result<()> {
    sink.write("config.ini", s.to_ini().as_bytes())?;
    let grid = Arc::new(SpatialGrid::new(s.grid.length, s.grid.count)?);
    let prop = Propagator::new(grid.clone());
    info!(
        "scenario {} ({}), N = {}, L = {}",
        s.name,
        s.mode.name(),
        grid.count(),
        grid.length()
    );
    match s.mode {
        Mode::Evolve => run_evolve(s, &prop, sink),
        Mode::Fwhm => run_fwhm(s, &prop, sink),
        Mode::Spectra => run_spectra(s, &prop, sink),
    }
}

fn initial_at_start(s: &Scenario, prop: &Propagator, index: usize) -> Result<WaveField> {
    let psi0 = sample_initial(&s.packets[index].spec, prop.grid())?;
    Ok(if s.time.start == 0.0 {
        psi0
    } else {
        prop.free_evolve(&psi0, s.time.start)
    })
}

fn write_field(sink: &mut Sink, s: &Scenario, stem: &str, field: &WaveField) -> Result<()> {
    if s.output.bups {
        let mut buf = Vec::new();
        io::write_snapshot(&mut buf, field)?;
        sink.write(&format!("{stem}.bups"), &buf)?;
    }
    if s.output.csv {
        sink.write(&format!("{stem}.csv"), io::field_csv(field).as_bytes())?;
    }
    Ok(())
}

fn run_evolve(s: &Scenario, prop: &Propagator, sink: &mut Sink) -> Result<()> {
    let packet = &s.packets[0];
    let start = initial_at_start(s, prop, 0)?;
    let times = s.time.snapshot_times();
    let series = prop.evolve_series(&start, &times)?;
    let moments = analysis::moment_series(&series);
    let widths = FwhmSeries::from_fields(&series);
    if s.output.csv {
        sink.write(
            "moments.csv",
            io::moments_csv(&moments, &widths.entries).as_bytes(),
        )?;
    }

    let tau = packet.spec.focus_time();
    let focus = series
        .iter()
        .min_by(|a, b| (a.time() - tau).abs().total_cmp(&(b.time() - tau).abs()))
        .expect("snapshot series is never empty");
    write_field(sink, s, "field_start", &series[0])?;
    write_field(sink, s, "field_focus", focus)?;
    write_field(sink, s, "field_end", series.last().unwrap())?;

    let bundle = match &s.trajectories {
        Some(tr) => {
            let seeds = seed_positions(tr.count, tr.half_range)?;
            let opts = IntegrationOptions {
                rho_floor: tr.rho_floor,
                store_every: tr.store_every,
                ..IntegrationOptions::default()
            };
            let source = prop.evolver(&start);
            let b = integrate_trajectories(
                &source,
                &seeds,
                s.time.start,
                s.time.end,
                s.time.dt,
                &opts,
            )?;
            info!(
                "{} trajectories, {} flagged",
                b.len(),
                b.flags
                    .iter()
                    .filter(|f| f.status() != crate::bohm::TrajectoryStatus::Ok)
                    .count()
            );
            if s.output.csv {
                sink.write("trajectories.csv", io::trajectories_csv(&b).as_bytes())?;
                sink.write("trajectory_flags.csv", io::flags_csv(&b).as_bytes())?;
            }
            Some(b)
        }
        None => None,
    };

    if s.output.svg {
        let density: Vec<Vec<f64>> = series.iter().map(WaveField::density).collect();
        let overlay = bundle.as_ref().map(|b: &TrajectoryBundle| Overlay {
            times: &b.times,
            positions: &b.positions,
        });
        let title = format!("{}: {}", s.name, packet.label);
        let doc = svg::render_heatmap(
            &title,
            &times,
            prop.grid().coords(),
            &density,
            overlay,
            s.clip_fraction,
        )?;
        sink.write("heatmap.svg", doc.as_bytes())?;
    }
    Ok(())
}

fn header_with_labels(first: &str, s: &Scenario) -> String {
    let mut h = String::from(first);
    for p in &s.packets {
        h.push(',');
        h.push_str(&p.label);
    }
    h.push('\n');
    h
}

fn columns_csv(first: &str, s: &Scenario, axis: &[f64], columns: &[Vec<f64>]) -> String {
    let mut out = header_with_labels(first, s);
    for (j, a) in axis.iter().enumerate() {
        out.push_str(&num(*a));
        for c in columns {
            out.push(',');
            out.push_str(&num(c[j]));
        }
        out.push('\n');
    }
    out
}

fn run_fwhm(s: &Scenario, prop: &Propagator, sink: &mut Sink) -> Result<()> {
    let times = s.time.snapshot_times();
    let mut columns = Vec::with_capacity(s.packets.len());
    for (i, p) in s.packets.iter().enumerate() {
        let start = initial_at_start(s, prop, i)?;
        let series = prop.evolve_series(&start, &times)?;
        let fw = FwhmSeries::from_fields(&series);
        if let Some((t, w)) = fw.minimum() {
            info!("{}: minimum FWHM {w} at t = {t}", p.label);
        }
        columns.push(fw.widths());
    }
    if s.output.csv {
        sink.write("fwhm.csv", columns_csv("t", s, &times, &columns).as_bytes())?;
    }
    if s.output.svg {
        let series: Vec<Series<'_>> = s
            .packets
            .iter()
            .zip(&columns)
            .map(|(p, c)| Series {
                label: &p.label,
                xs: &times,
                ys: c,
            })
            .collect();
        let doc = svg::render_lines(
            &format!("{}: FWHM", s.name),
            "t / tau",
            "FWHM / sigma",
            &series,
            false,
        )?;
        sink.write("fwhm.svg", doc.as_bytes())?;
    }
    Ok(())
}

fn run_spectra(s: &Scenario, prop: &Propagator, sink: &mut Sink) -> Result<()> {
    let xs = prop.grid().coords().to_vec();
    let mut rho = Vec::new();
    let mut spectra = Vec::new();
    let mut report = format!(
        "# {} at t = {}\nlabel,x_rms,fwhm,k_rms,k_peak\n",
        s.name,
        num(s.time.start)
    );
    for i in 0..s.packets.len() {
        let field = initial_at_start(s, prop, i)?;
        let m = analysis::moments(&field);
        let w = analysis::fwhm(&field).map_or(f64::NAN, |f| f.width());
        let md = prop.momentum_density(&field);
        let _ = writeln!(
            report,
            "{},{},{},{},{}",
            s.packets[i].label,
            num(m.variance().max(0.0).sqrt()),
            num(w),
            num(md.rms_width()),
            num(md.peak_k())
        );
        rho.push(field.density());
        spectra.push(md);
    }
    let ks = spectra[0].k.clone();
    let kd: Vec<Vec<f64>> = spectra.iter().map(|m| m.density.clone()).collect();

    let mut order: Vec<usize> = (0..s.packets.len()).collect();
    order.sort_by(|&a, &b| spectra[a].rms_width().total_cmp(&spectra[b].rms_width()));
    let names: Vec<&str> = order.iter().map(|&i| s.packets[i].label.as_str()).collect();
    let _ = writeln!(report, "# k_rms ascending: {}", names.join(" < "));

    if s.output.csv {
        sink.write(
            "position_density.csv",
            columns_csv("x", s, &xs, &rho).as_bytes(),
        )?;
        sink.write(
            "momentum_density.csv",
            columns_csv("k", s, &ks, &kd).as_bytes(),
        )?;
        sink.write("spectra_report.txt", report.as_bytes())?;
    }
    if s.output.svg {
        let pos: Vec<Series<'_>> = s
            .packets
            .iter()
            .zip(&rho)
            .map(|(p, r)| Series {
                label: &p.label,
                xs: &xs,
                ys: r,
            })
            .collect();
        let doc = svg::render_lines(
            &format!("{}: |psi(x)|^2", s.name),
            "x / sigma",
            "density",
            &pos,
            false,
        )?;
        sink.write("position_density.svg", doc.as_bytes())?;
        let mom: Vec<Series<'_>> = s
            .packets
            .iter()
            .zip(&kd)
            .map(|(p, d)| Series {
                label: &p.label,
                xs: &ks,
                ys: d,
            })
            .collect();
        let doc = svg::render_lines(
            &format!("{}: |psi(k)|^2", s.name),
            "k sigma",
            "density",
            &mom,
            true,
        )?;
        sink.write("momentum_density.svg", doc.as_bytes())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn discard_removes_created_directory() {
        let root = std::env::temp_dir().join(format!("blowup-sink-{}", std::process::id()));
        let dir = root.join("nested");
        let mut sink = Sink::open(&dir).unwrap();
        sink.write("a.txt", b"x").unwrap();
        sink.discard();
        assert!(!dir.exists());
        let _ = fs::remove_dir_all(&root);
    }

    #[test]
    fn runtime_error_cleans_up() {
        let mut s = super::super::preset("fig2b").unwrap();
        s.trajectories = None;
        s.time.end = 0.01;
        let dir = std::env::temp_dir().join(format!("blowup-run-{}", std::process::id()));
        // too small a cap for the snapshot series
        let grid = Arc::new(SpatialGrid::new(s.grid.length, s.grid.count).unwrap());
        let prop = Propagator::new(grid).with_sample_cap(16);
        let mut sink = Sink::open(&dir).unwrap();
        let err = run_evolve(&s, &prop, &mut sink).unwrap_err();
        assert!(matches!(err, Error::MemoryCap { .. }));
        sink.discard();
        assert!(!dir.exists());
    }
}
