//! Run configurations: INI (de)serialization, validation and the built-in
//! figure presets.

pub mod ini;
mod run;

use std::sync::Arc;

pub use ini::Document;
pub use run::{run_scenario, RunSummary};

use crate::error::{Error, Result};
use crate::packets::{matched_gaussian_width, sample_initial, waist_solutions};
use crate::packets::{
    GaussianSpec, PacketSpec, RectangularSpec, SingularSpec, TruncatedSingularSpec, UnitSystem,
};
use crate::propagator::SpatialGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// One packet: snapshots, moments, optional trajectories, heatmap.
    Evolve,
    /// FWHM series of every packet on a shared time axis.
    Fwhm,
    /// Position and momentum densities of every packet at the start time.
    Spectra,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Evolve => "evolve",
            Mode::Fwhm => "fwhm",
            Mode::Spectra => "spectra",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "evolve" => Some(Mode::Evolve),
            "fwhm" => Some(Mode::Fwhm),
            "spectra" => Some(Mode::Spectra),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PacketEntry {
    pub label: String,
    pub spec: PacketSpec,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    pub length: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeConfig {
    pub start: f64,
    pub end: f64,
    pub dt: f64,
    /// Keep a field snapshot every this many steps.
    pub snapshot_stride: usize,
}

impl TimeConfig {
    /// Number of dt steps from start to end.
    pub fn steps(&self) -> usize {
        ((self.end - self.start) / self.dt).round().max(0.0) as usize
    }

    /// Snapshot times: every stride-th step, always including the end.
    pub fn snapshot_times(&self) -> Vec<f64> {
        let n = self.steps();
        let stride = self.snapshot_stride.max(1);
        let mut out: Vec<f64> = (0..=n)
            .step_by(stride)
            .map(|k| self.start + k as f64 * self.dt)
            .collect();
        if !n.is_multiple_of(stride) {
            out.push(self.start + n as f64 * self.dt);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryConfig {
    pub count: usize,
    pub half_range: f64,
    pub store_every: usize,
    pub rho_floor: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputConfig {
    /// Output directory when none is given on the command line.
    pub dir: Option<String>,
    pub csv: bool,
    pub bups: bool,
    pub svg: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub mode: Mode,
    pub clip_fraction: f64,
    pub packets: Vec<PacketEntry>,
    pub grid: GridConfig,
    pub time: TimeConfig,
    pub trajectories: Option<TrajectoryConfig>,
    pub output: OutputConfig,
}

struct Reader<'a> {
    errors: &'a mut Vec<String>,
}

impl Reader<'_> {
    fn take<T: std::str::FromStr>(
        &mut self,
        doc: &Document,
        section: &str,
        key: &str,
        default: Option<T>,
    ) -> Option<T> {
        match doc.section(section).and_then(|s| s.get(key)) {
            Some(raw) => match raw.parse::<T>() {
                Ok(v) => Some(v),
                Err(_) => {
                    self.errors
                        .push(format!("[{section}] {key}: cannot parse `{raw}`"));
                    None
                }
            },
            None => {
                if default.is_none() {
                    self.errors.push(format!("[{section}] {key}: missing"));
                }
                default
            }
        }
    }

    fn check_keys(&mut self, doc: &Document, section: &str, allowed: &[&str]) {
        if let Some(s) = doc.section(section) {
            for (k, _) in &s.entries {
                if !allowed.contains(&k.as_str()) {
                    self.errors.push(format!("[{section}] unknown key `{k}`"));
                }
            }
        }
    }
}

const KNOWN_SECTIONS: &[&str] = &["scenario", "grid", "time", "trajectories", "output"];

fn packet_from_section(doc: &Document, name: &str, r: &mut Reader<'_>) -> Option<PacketSpec> {
    let kind: String = r.take(doc, name, "kind", None)?;
    let built = match kind.as_str() {
        "singular" | "truncated_singular" => {
            let nu = r.take(doc, name, "nu", None)?;
            let sigma = r.take(doc, name, "sigma", Some(1.0))?;
            let tau = r.take(doc, name, "tau", Some(1.0))?;
            if kind == "singular" {
                r.check_keys(doc, name, &["kind", "nu", "sigma", "tau"]);
                SingularSpec::new(nu, sigma, tau).map(PacketSpec::Singular)
            } else {
                r.check_keys(doc, name, &["kind", "nu", "sigma", "tau", "x_b"]);
                let x_b = r.take(doc, name, "x_b", None)?;
                SingularSpec::new(nu, sigma, tau)
                    .and_then(|b| TruncatedSingularSpec::new(b, x_b))
                    .map(PacketSpec::TruncatedSingular)
            }
        }
        "gaussian" => {
            r.check_keys(doc, name, &["kind", "sigma0", "tau"]);
            let sigma0 = r.take(doc, name, "sigma0", None)?;
            let tau = r.take(doc, name, "tau", Some(1.0))?;
            GaussianSpec::new(sigma0, tau).map(PacketSpec::Gaussian)
        }
        "rectangular" => {
            r.check_keys(doc, name, &["kind", "a", "tau"]);
            let a = r.take(doc, name, "a", None)?;
            let tau = r.take(doc, name, "tau", Some(1.0))?;
            RectangularSpec::new(a, tau).map(PacketSpec::Rectangular)
        }
        other => {
            r.errors
                .push(format!("[{name}] kind: unknown packet kind `{other}`"));
            return None;
        }
    };
    match built {
        Ok(p) => Some(p),
        Err(e) => {
            r.errors.push(format!("[{name}] {}", flatten(&e)));
            None
        }
    }
}

fn flatten(e: &Error) -> String {
    match e {
        Error::Config(list) => list.join("; "),
        other => other.to_string(),
    }
}

fn packet_section(p: &PacketEntry) -> ini::Section {
    let name = if p.label.is_empty() {
        "packet".to_string()
    } else {
        format!("packet.{}", p.label)
    };
    let mut s = ini::Section::new(name);
    s.push("kind", p.spec.kind());
    match p.spec {
        PacketSpec::Singular(b) => {
            s.push("nu", b.nu);
            s.push("sigma", b.sigma);
            s.push("tau", b.tau);
        }
        PacketSpec::TruncatedSingular(t) => {
            s.push("nu", t.base.nu);
            s.push("sigma", t.base.sigma);
            s.push("tau", t.base.tau);
            s.push("x_b", t.x_b);
        }
        PacketSpec::Gaussian(g) => {
            s.push("sigma0", g.sigma0);
            s.push("tau", g.tau);
        }
        PacketSpec::Rectangular(r) => {
            s.push("a", r.a);
            s.push("tau", r.tau);
        }
    }
    s
}

impl Scenario {
    /// Builds a scenario from a parsed document, collecting every
    /// structural problem (missing or malformed values, unknown keys).
    pub fn from_document(doc: &Document) -> Result<Self> {
        let mut errors = Vec::new();
        let mut r = Reader {
            errors: &mut errors,
        };
        for s in &doc.sections {
            if !KNOWN_SECTIONS.contains(&s.name.as_str())
                && s.name != "packet"
                && !s.name.starts_with("packet.")
            {
                r.errors.push(format!("unknown section [{}]", s.name));
            }
        }
        r.check_keys(
            doc,
            "scenario",
            &["name", "description", "mode", "clip_fraction"],
        );
        r.check_keys(doc, "grid", &["length", "count"]);
        r.check_keys(doc, "time", &["start", "end", "dt", "snapshot_stride"]);
        r.check_keys(
            doc,
            "trajectories",
            &["count", "half_range", "store_every", "rho_floor"],
        );
        r.check_keys(doc, "output", &["dir", "formats"]);

        let name = r.take(doc, "scenario", "name", Some(String::from("custom")));
        let description = r.take(doc, "scenario", "description", Some(String::new()));
        let mode_raw: Option<String> =
            r.take(doc, "scenario", "mode", Some(String::from("evolve")));
        let mode = mode_raw.and_then(|m| {
            let parsed = Mode::parse(&m);
            if parsed.is_none() {
                r.errors.push(format!(
                    "[scenario] mode: expected evolve, fwhm or spectra, got `{m}`"
                ));
            }
            parsed
        });
        let clip_fraction = r.take(doc, "scenario", "clip_fraction", Some(0.1));

        let length = r.take(doc, "grid", "length", Some(50.0));
        let count = r.take(doc, "grid", "count", Some(1024usize));

        let start = r.take(doc, "time", "start", Some(0.0));
        let end = r.take(doc, "time", "end", Some(2.0));
        let dt = r.take(doc, "time", "dt", Some(1e-3));
        let stride = r.take(doc, "time", "snapshot_stride", Some(10usize));

        // a missing or empty [trajectories] block disables trajectories
        let trajectories = match doc.section("trajectories") {
            Some(s) if !s.entries.is_empty() => {
                let count = r.take(doc, "trajectories", "count", None);
                let half_range = r.take(doc, "trajectories", "half_range", None);
                let store_every = r.take(doc, "trajectories", "store_every", Some(10usize));
                let rho_floor = r.take(doc, "trajectories", "rho_floor", Some(1e-8));
                match (count, half_range, store_every, rho_floor) {
                    (Some(c), Some(h), Some(s), Some(f)) if c > 0 => Some(Some(TrajectoryConfig {
                        count: c,
                        half_range: h,
                        store_every: s,
                        rho_floor: f,
                    })),
                    (Some(0), ..) => Some(None),
                    _ => None,
                }
            }
            _ => Some(None),
        };

        let dir = doc
            .section("output")
            .and_then(|s| s.get("dir"))
            .map(str::to_string);
        let formats: String = r
            .take(
                doc,
                "output",
                "formats",
                Some(String::from("csv, bups, svg")),
            )
            .unwrap_or_default();
        let mut output = OutputConfig {
            dir,
            ..OutputConfig::default()
        };
        for f in formats.split(',').map(str::trim).filter(|f| !f.is_empty()) {
            match f {
                "csv" => output.csv = true,
                "bups" => output.bups = true,
                "svg" => output.svg = true,
                other => r
                    .errors
                    .push(format!("[output] formats: unknown format `{other}`")),
            }
        }

        let mut packets = Vec::new();
        for s in doc
            .sections
            .iter()
            .filter(|s| s.name == "packet" || s.name.starts_with("packet."))
        {
            let label = s.name.strip_prefix("packet.").unwrap_or("").to_string();
            if let Some(spec) = packet_from_section(doc, &s.name, &mut r) {
                packets.push(PacketEntry { label, spec });
            }
        }

        match (
            name,
            description,
            mode,
            clip_fraction,
            length,
            count,
            start,
            end,
            dt,
            stride,
            trajectories,
        ) {
            (
                Some(name),
                Some(description),
                Some(mode),
                Some(clip_fraction),
                Some(length),
                Some(count),
                Some(start),
                Some(end),
                Some(dt),
                Some(snapshot_stride),
                Some(trajectories),
            ) if errors.is_empty() => Ok(Scenario {
                name,
                description,
                mode,
                clip_fraction,
                packets,
                grid: GridConfig { length, count },
                time: TimeConfig {
                    start,
                    end,
                    dt,
                    snapshot_stride,
                },
                trajectories,
                output,
            }),
            _ => Err(Error::Config(errors)),
        }
    }

    pub fn to_document(&self) -> Document {
        let mut doc = Document::default();
        let s = doc.section_mut("scenario");
        s.push("name", &self.name);
        s.push("description", &self.description);
        s.push("mode", self.mode.name());
        s.push("clip_fraction", self.clip_fraction);
        let g = doc.section_mut("grid");
        g.push("length", self.grid.length);
        g.push("count", self.grid.count);
        let t = doc.section_mut("time");
        t.push("start", self.time.start);
        t.push("end", self.time.end);
        t.push("dt", self.time.dt);
        t.push("snapshot_stride", self.time.snapshot_stride);
        if let Some(tr) = &self.trajectories {
            let s = doc.section_mut("trajectories");
            s.push("count", tr.count);
            s.push("half_range", tr.half_range);
            s.push("store_every", tr.store_every);
            s.push("rho_floor", tr.rho_floor);
        }
        let o = doc.section_mut("output");
        if let Some(dir) = &self.output.dir {
            o.push("dir", dir);
        }
        let formats: Vec<&str> = [
            (self.output.csv, "csv"),
            (self.output.bups, "bups"),
            (self.output.svg, "svg"),
        ]
        .iter()
        .filter(|(on, _)| *on)
        .map(|(_, n)| *n)
        .collect();
        o.push("formats", formats.join(", "));
        for p in &self.packets {
            doc.sections.push(packet_section(p));
        }
        doc
    }

    pub fn to_ini(&self) -> String {
        self.to_document().to_string()
    }

    /// Parses, applies `section.key=value` overrides, builds and validates.
    pub fn load(text: &str, overrides: &[String]) -> Result<Self> {
        let mut doc = Document::parse(text).map_err(Error::Config)?;
        let errs: Vec<String> = overrides
            .iter()
            .filter_map(|o| doc.apply_override(o).err())
            .collect();
        if !errs.is_empty() {
            return Err(Error::Config(errs));
        }
        let s = Self::from_document(&doc)?;
        s.validate()?;
        Ok(s)
    }

    /// Applies overrides to an existing scenario through its INI form.
    pub fn with_overrides(&self, overrides: &[String]) -> Result<Self> {
        Self::load(&self.to_ini(), overrides)
    }

    /// Semantic checks. Every violated constraint is listed.
    pub fn validate(&self) -> Result<()> {
        let mut v = Vec::new();
        let GridConfig { length, count } = self.grid;
        if !(length > 0.0 && length.is_finite()) {
            v.push(format!("grid length must be positive, got {length}"));
        }
        if !count.is_power_of_two() || count < 4 {
            v.push(format!(
                "grid count must be a power of two >= 4, got {count}"
            ));
        }
        let TimeConfig {
            start,
            end,
            dt,
            snapshot_stride,
        } = self.time;
        if !(dt > 0.0 && dt.is_finite()) {
            v.push(format!("time step dt must be > 0, got {dt}"));
        }
        if !start.is_finite() || !end.is_finite() {
            v.push("time bounds must be finite".to_string());
        } else if self.mode != Mode::Spectra && !(end > start) {
            v.push(format!("time end ({end}) must exceed start ({start})"));
        }
        if snapshot_stride == 0 {
            v.push("snapshot_stride must be >= 1".to_string());
        }
        if !(self.clip_fraction > 0.0 && self.clip_fraction <= 1.0) {
            v.push(format!(
                "clip_fraction must lie in (0, 1], got {}",
                self.clip_fraction
            ));
        }
        match (self.mode, self.packets.len()) {
            (_, 0) => v.push("at least one [packet] section is required".to_string()),
            (Mode::Evolve, n) if n > 1 => {
                v.push(format!("mode evolve takes exactly one packet, got {n}"))
            }
            _ => {}
        }
        let mut labels: Vec<&str> = self.packets.iter().map(|p| p.label.as_str()).collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            v.push("packet labels must be unique".to_string());
        }
        let grid = SpatialGrid::new(length, count).ok();
        if let Some(tr) = &self.trajectories {
            if self.mode != Mode::Evolve {
                v.push(format!(
                    "trajectories are only integrated in mode evolve, not {}",
                    self.mode.name()
                ));
            }
            if tr.count < 2 {
                v.push(format!("trajectory count must be >= 2, got {}", tr.count));
            }
            if tr.store_every == 0 {
                v.push("trajectory store_every must be >= 1".to_string());
            }
            if !(tr.rho_floor > 0.0) {
                v.push(format!("rho_floor must be > 0, got {}", tr.rho_floor));
            }
            if count > 0 {
                let limit = 0.5 * length - 2.0 * length / count as f64;
                if !(tr.half_range > 0.0 && tr.half_range < limit) {
                    v.push(format!(
                        "trajectory seeds must lie inside the grid interior |x| < {limit}, got half_range {}",
                        tr.half_range
                    ));
                }
            }
        }
        if let Some(g) = grid {
            let g = Arc::new(g);
            for p in &self.packets {
                if let Err(e @ Error::Aliasing { .. }) = sample_initial(&p.spec, &g) {
                    v.push(format!("packet `{}`: {e}", p.label));
                }
            }
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(v))
        }
    }
}

/// Rectangle width whose density drops to 1/10 of its maximum at the same
/// point as the nu = 1/3 singular packet.
pub fn matched_rectangle_width() -> f64 {
    2.0 * (10.0 * 10f64.sqrt() - 1.0).sqrt()
}

/// The two waist Gaussians matched to the nu = 1/3 singular packet at a
/// tenth of peak density, focusing at tau = 1: (sigma0_plus, sigma0_minus).
pub fn matched_waist_gaussians() -> (GaussianSpec, GaussianSpec) {
    let base = SingularSpec::new(1.0 / 3.0, 1.0, 1.0).expect("valid singular spec");
    let sg0 = matched_gaussian_width(&base, 0.1).expect("valid fraction");
    let (p, m) = waist_solutions(sg0, 1.0, &UnitSystem::default()).expect("waist exists");
    (
        GaussianSpec::new(p, 1.0).expect("positive waist"),
        GaussianSpec::new(m, 1.0).expect("positive waist"),
    )
}

fn truncated_singular() -> PacketSpec {
    let base = SingularSpec::new(1.0 / 3.0, 1.0, 1.0).expect("valid singular spec");
    PacketSpec::TruncatedSingular(TruncatedSingularSpec::new(base, 22.5).expect("positive cutoff"))
}

fn four_packets() -> Vec<PacketEntry> {
    let (plus, minus) = matched_waist_gaussians();
    vec![
        PacketEntry {
            label: "singular".into(),
            spec: truncated_singular(),
        },
        PacketEntry {
            label: "gaussian_plus".into(),
            spec: PacketSpec::Gaussian(plus),
        },
        PacketEntry {
            label: "gaussian_minus".into(),
            spec: PacketSpec::Gaussian(minus),
        },
        PacketEntry {
            label: "rectangle".into(),
            spec: PacketSpec::Rectangular(
                RectangularSpec::new(matched_rectangle_width(), 1.0).expect("positive width"),
            ),
        },
    ]
}

fn evolve_preset(
    name: &str,
    description: &str,
    label: &str,
    spec: PacketSpec,
    half_range: f64,
) -> Scenario {
    Scenario {
        name: name.into(),
        description: description.into(),
        mode: Mode::Evolve,
        clip_fraction: 0.1,
        packets: vec![PacketEntry {
            label: label.into(),
            spec,
        }],
        grid: GridConfig {
            length: 50.0,
            count: 1024,
        },
        time: TimeConfig {
            start: 0.0,
            end: 2.0,
            dt: 1e-3,
            snapshot_stride: 10,
        },
        trajectories: Some(TrajectoryConfig {
            count: 51,
            half_range,
            store_every: 10,
            rho_floor: 1e-8,
        }),
        output: OutputConfig {
            dir: None,
            csv: true,
            bups: true,
            svg: true,
        },
    }
}

pub const PRESET_NAMES: [&str; 6] = ["fig2a", "fig2b", "fig2c", "fig4", "fig5", "fig6"];

pub fn preset(name: &str) -> Option<Scenario> {
    let (plus, minus) = matched_waist_gaussians();
    let rect = PacketSpec::Rectangular(RectangularSpec::new(matched_rectangle_width(), 1.0).ok()?);
    let s = match name {
        "fig2a" => evolve_preset(
            name,
            "truncated singular packet (nu = 1/3, x_b = 22.5): density and 51 trajectories over [0, 2 tau]",
            "singular",
            truncated_singular(),
            15.0,
        ),
        "fig2b" => evolve_preset(
            name,
            "Gaussian with the narrow waist sigma0_minus: implosion at tau with laminar trajectories",
            "gaussian_minus",
            PacketSpec::Gaussian(minus),
            15.0,
        ),
        "fig2c" => evolve_preset(
            name,
            "chirped rectangle, evolved numerically, trajectories seeded inside its support",
            "rectangle",
            rect,
            0.475 * matched_rectangle_width(),
        ),
        "fig4" => evolve_preset(
            name,
            "Gaussian with the wide waist sigma0_plus: nearly stationary flux",
            "gaussian_plus",
            PacketSpec::Gaussian(plus),
            15.0,
        ),
        "fig5" => Scenario {
            name: name.into(),
            description: "position and momentum densities of the four packets at t = 0".into(),
            mode: Mode::Spectra,
            clip_fraction: 1.0,
            packets: four_packets(),
            grid: GridConfig { length: 50.0, count: 1024 },
            time: TimeConfig { start: 0.0, end: 0.0, dt: 1e-3, snapshot_stride: 1 },
            trajectories: None,
            output: OutputConfig { dir: None, csv: true, bups: false, svg: true },
        },
        "fig6" => Scenario {
            name: name.into(),
            description: "FWHM over [0, 2 tau] for the four packets".into(),
            mode: Mode::Fwhm,
            clip_fraction: 1.0,
            packets: four_packets(),
            grid: GridConfig { length: 50.0, count: 1024 },
            time: TimeConfig { start: 0.0, end: 2.0, dt: 1e-3, snapshot_stride: 1 },
            trajectories: None,
            output: OutputConfig { dir: None, csv: true, bups: false, svg: true },
        },
        _ => return None,
    };
    Some(s)
}

/// (name, one-line description) for every preset.
pub fn list_presets() -> Vec<(&'static str, String)> {
    PRESET_NAMES
        .iter()
        .map(|&n| (n, preset(n).map(|s| s.description).unwrap_or_default()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_round_trip_and_validate() {
        for (name, _) in list_presets() {
            let s = preset(name).unwrap();
            s.validate().unwrap();
            let back = Scenario::load(&s.to_ini(), &[]).unwrap();
            assert_eq!(back, s, "{name}");
        }
    }

    #[test]
    fn snapshot_times_include_end() {
        let t = TimeConfig {
            start: 0.0,
            end: 2.0,
            dt: 1e-3,
            snapshot_stride: 10,
        };
        let s = t.snapshot_times();
        assert_eq!(s.len(), 201);
        assert_eq!(*s.last().unwrap(), 2.0);
        let t = TimeConfig {
            start: 0.0,
            end: 0.105,
            dt: 1e-3,
            snapshot_stride: 10,
        };
        assert_eq!(t.snapshot_times().len(), 12);
    }
}
