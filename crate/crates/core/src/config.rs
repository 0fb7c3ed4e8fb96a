//! Sweep configuration files.
//!
//! The format is line based: `[section]` headers, `key = value` pairs, lists
//! as comma-separated values and `#` comments.
//!
//! ```text
//! [grid]
//! n = 49
//! half_width = 1.0
//!
//! [boundary]
//! kind = hedgehog        # or constant
//! director = 0, 0, 1     # for kind = constant
//!
//! [reduced]              # or [physical] with alpha, b, c, L, Tstar, T
//! Ltilde = 1.0
//! t = 25, 100, 400
//!
//! [potential]
//! mode = full            # or gl, with kappa = ...
//!
//! [minimizer]
//! max_iters = 50000
//! tol = 1e-5             # default 1e-6 * sqrt(t)
//! step_init = 1e-4
//! step_rule = bb         # or backtracking
//! record_every = 100
//!
//! [init]
//! kind = radial          # or constant
//! core_radius = 3        # in grid spacings
//! amplitude = 0.1
//! seeds = 0, 1, 2        # seed 0 is the unperturbed initial field
//!
//! [classify]
//! melt = 0.05
//! escape = 0.95
//!
//! [output]
//! dir = out
//! warm_start = true
//! dump_all = false
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::diagnostics::Thresholds;
use crate::energy::PotentialMode;
use crate::error::{Error, Result};
use crate::field::Grid;
use crate::minimize::{MinimizeOptions, StepRule};
use crate::tensor::{norm3, reduce, MaterialParams, ReducedParams, UNIT_TOL};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryKind {
    Hedgehog,
    Constant([f64; 3]),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitKind {
    /// Uniaxial radial profile with a linear core.
    Radial,
    /// Interior set to the vacuum tensor of the constant boundary director.
    Constant,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ParamEntry {
    Reduced {
        l_tilde: f64,
        ts: Vec<f64>,
    },
    Physical {
        alpha: f64,
        b: f64,
        c: f64,
        l: f64,
        t_star: f64,
        temperatures: Vec<f64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MinimizerSpec {
    pub max_iters: usize,
    /// `None` selects `1e-6 sqrt(t)` per temperature.
    pub tol: Option<f64>,
    pub step_init: f64,
    pub step_rule: StepRule,
    pub record_every: usize,
}

impl MinimizerSpec {
    pub fn options(&self, t: f64) -> MinimizeOptions {
        let mut o = MinimizeOptions::for_temperature(t);
        o.max_iters = self.max_iters;
        if let Some(tol) = self.tol {
            o.tol = tol;
        }
        o.step_init = self.step_init;
        o.step_rule = self.step_rule;
        o.record_every = self.record_every;
        o
    }
}

impl Default for MinimizerSpec {
    fn default() -> Self {
        let d = MinimizeOptions::for_temperature(1.0);
        MinimizerSpec {
            max_iters: d.max_iters,
            tol: None,
            step_init: d.step_init,
            step_rule: d.step_rule,
            record_every: d.record_every,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InitSpec {
    pub kind: InitKind,
    /// Core radius of the radial profile, in grid spacings.
    pub core_radius: f64,
    pub amplitude: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub grid: Grid,
    pub boundary: BoundaryKind,
    pub params: ParamEntry,
    pub mode: PotentialMode,
    pub minimizer: MinimizerSpec,
    pub init: InitSpec,
    pub seeds: Vec<u64>,
    pub thresholds: Thresholds,
    pub out_dir: PathBuf,
    pub warm_start: bool,
    pub dump_all: bool,
}

impl SweepConfig {
    /// Reduced parameters for every temperature, in sweep order.
    pub fn points(&self) -> Result<Vec<ReducedParams>> {
        match &self.params {
            ParamEntry::Reduced { l_tilde, ts } => ts
                .iter()
                .map(|&t| ReducedParams::from_reduced(t, *l_tilde))
                .collect(),
            ParamEntry::Physical {
                alpha,
                b,
                c,
                l,
                t_star,
                temperatures,
            } => temperatures
                .iter()
                .map(|&t| {
                    reduce(&MaterialParams {
                        alpha: *alpha,
                        b: *b,
                        c: *c,
                        l: *l,
                        t,
                        t_star: *t_star,
                    })
                })
                .collect(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        text.parse()
    }
}

fn cfg_err(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

/// A value with the line it came from.
#[derive(Clone, Debug)]
struct Entry {
    line: usize,
    value: String,
    used: bool,
}

struct Sections {
    map: BTreeMap<(String, String), Entry>,
    seen: BTreeMap<String, usize>,
}

impl Sections {
    fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut seen = BTreeMap::new();
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| cfg_err(line, "unterminated section header"))?
                    .trim();
                if name.is_empty() {
                    return Err(cfg_err(line, "empty section name"));
                }
                if seen.insert(name.to_string(), line).is_some() {
                    return Err(cfg_err(line, format!("duplicate section [{name}]")));
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| cfg_err(line, format!("expected `key = value`, got `{content}`")))?;
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() || value.is_empty() {
                return Err(cfg_err(line, "empty key or value"));
            }
            let sec = section
                .clone()
                .ok_or_else(|| cfg_err(line, "key outside of any section"))?;
            let entry = Entry {
                line,
                value: value.to_string(),
                used: false,
            };
            if map.insert((sec, key.to_string()), entry).is_some() {
                return Err(cfg_err(line, format!("duplicate key `{key}`")));
            }
        }
        Ok(Sections { map, seen })
    }

    fn has_section(&self, s: &str) -> bool {
        self.seen.contains_key(s)
    }

    fn take(&mut self, section: &str, key: &str) -> Option<(usize, String)> {
        self.map
            .get_mut(&(section.to_string(), key.to_string()))
            .map(|e| {
                e.used = true;
                (e.line, e.value.clone())
            })
    }

    fn get<T: FromStr>(&mut self, section: &str, key: &str) -> Result<Option<T>> {
        match self.take(section, key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|_| cfg_err(line, format!("cannot parse `{v}` for {section}.{key}"))),
        }
    }

    fn require<T: FromStr>(&mut self, section: &str, key: &str) -> Result<T> {
        let line = self.seen.get(section).copied().unwrap_or(0);
        self.get(section, key)?
            .ok_or_else(|| cfg_err(line, format!("missing required key {section}.{key}")))
    }

    fn list<T: FromStr>(&mut self, section: &str, key: &str) -> Result<Option<(usize, Vec<T>)>> {
        match self.take(section, key) {
            None => Ok(None),
            Some((line, v)) => v
                .split(',')
                .map(|s| {
                    let s = s.trim();
                    s.parse()
                        .map_err(|_| cfg_err(line, format!("cannot parse list item `{s}` for {section}.{key}")))
                })
                .collect::<Result<Vec<T>>>()
                .map(|l| Some((line, l))),
        }
    }

    fn finish(self) -> Result<()> {
        for ((sec, key), e) in &self.map {
            if !e.used {
                return Err(cfg_err(e.line, format!("unknown key {sec}.{key}")));
            }
        }
        Ok(())
    }
}

fn parse_bool(line: usize, s: &str) -> Result<bool> {
    match s {
        "true" | "yes" | "on" => Ok(true),
        "false" | "no" | "off" => Ok(false),
        _ => Err(cfg_err(line, format!("expected a boolean, got `{s}`"))),
    }
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

impl FromStr for SweepConfig {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut s = Sections::parse(text)?;
        for name in s.seen.keys() {
            if !matches!(
                name.as_str(),
                "grid" | "boundary" | "reduced" | "physical" | "potential" | "minimizer" | "init"
                    | "classify" | "output"
            ) {
                return Err(cfg_err(s.seen[name], format!("unknown section [{name}]")));
            }
        }

        let n: usize = s.require("grid", "n")?;
        let half_width: f64 = s.get("grid", "half_width")?.unwrap_or(1.0);
        let grid_line = s.seen.get("grid").copied().unwrap_or(0);
        let grid = Grid::new(n, half_width).map_err(|e| cfg_err(grid_line, e.to_string()))?;

        let boundary = match s.take("boundary", "kind") {
            None => BoundaryKind::Hedgehog,
            Some((_, k)) if k == "hedgehog" => BoundaryKind::Hedgehog,
            Some((line, k)) if k == "constant" => {
                let (_, d) = s
                    .list::<f64>("boundary", "director")?
                    .unwrap_or((line, vec![0.0, 0.0, 1.0]));
                if d.len() != 3 || (norm3([d[0], d[1], d[2]]) - 1.0).abs() > UNIT_TOL {
                    return Err(cfg_err(line, "boundary.director must be a unit 3-vector"));
                }
                BoundaryKind::Constant([d[0], d[1], d[2]])
            }
            Some((line, k)) => return Err(cfg_err(line, format!("unknown boundary kind `{k}`"))),
        };

        let params = match (s.has_section("reduced"), s.has_section("physical")) {
            (true, true) => {
                return Err(cfg_err(
                    s.seen["physical"],
                    "give either [reduced] or [physical], not both",
                ))
            }
            (false, false) => return Err(cfg_err(0, "missing [reduced] or [physical] section")),
            (true, false) => {
                let l_tilde: f64 = s.require("reduced", "Ltilde")?;
                let (line, ts) = s
                    .list::<f64>("reduced", "t")?
                    .ok_or_else(|| cfg_err(s.seen["reduced"], "missing required key reduced.t"))?;
                if !(l_tilde > 0.0) {
                    return Err(cfg_err(s.seen["reduced"], "Ltilde must be positive"));
                }
                if ts.iter().any(|&t| !(t > 0.0)) || !strictly_increasing(&ts) {
                    return Err(cfg_err(line, "t list must be positive and strictly increasing"));
                }
                ParamEntry::Reduced { l_tilde, ts }
            }
            (false, true) => {
                let (line, temperatures) = s
                    .list::<f64>("physical", "T")?
                    .ok_or_else(|| cfg_err(s.seen["physical"], "missing required key physical.T"))?;
                let p = ParamEntry::Physical {
                    alpha: s.require("physical", "alpha")?,
                    b: s.require("physical", "b")?,
                    c: s.require("physical", "c")?,
                    l: s.require("physical", "L")?,
                    t_star: s.require("physical", "Tstar")?,
                    temperatures,
                };
                let probe = SweepConfig {
                    grid,
                    boundary,
                    params: p.clone(),
                    mode: PotentialMode::Full,
                    minimizer: MinimizerSpec::default(),
                    init: InitSpec {
                        kind: InitKind::Radial,
                        core_radius: 1.0,
                        amplitude: 0.0,
                    },
                    seeds: vec![0],
                    thresholds: Thresholds::default(),
                    out_dir: PathBuf::new(),
                    warm_start: true,
                    dump_all: false,
                };
                let ts: Vec<f64> = probe
                    .points()
                    .map_err(|e| cfg_err(line, e.to_string()))?
                    .iter()
                    .map(|r| r.t)
                    .collect();
                if !strictly_increasing(&ts) {
                    return Err(cfg_err(
                        line,
                        "temperatures must give strictly increasing reduced t (decreasing T)",
                    ));
                }
                p
            }
        };

        let mode = match s.take("potential", "mode") {
            None => PotentialMode::Full,
            Some((_, m)) if m == "full" => PotentialMode::Full,
            Some((line, m)) if m == "gl" => {
                let kappa: f64 = s.get("potential", "kappa")?.unwrap_or(1.0);
                if !(kappa > 0.0) {
                    return Err(cfg_err(line, "kappa must be positive"));
                }
                PotentialMode::GinzburgLandau { kappa }
            }
            Some((line, m)) => return Err(cfg_err(line, format!("unknown potential mode `{m}`"))),
        };

        let d = MinimizerSpec::default();
        let step_rule = match s.take("minimizer", "step_rule") {
            None => d.step_rule,
            Some((_, r)) if r == "bb" || r == "barzilai_borwein" => StepRule::BarzilaiBorwein,
            Some((_, r)) if r == "backtracking" => StepRule::Backtracking,
            Some((line, r)) => return Err(cfg_err(line, format!("unknown step rule `{r}`"))),
        };
        let minimizer = MinimizerSpec {
            max_iters: s.get("minimizer", "max_iters")?.unwrap_or(d.max_iters),
            tol: s.get("minimizer", "tol")?,
            step_init: s.get("minimizer", "step_init")?.unwrap_or(d.step_init),
            step_rule,
            record_every: s.get("minimizer", "record_every")?.unwrap_or(d.record_every),
        };
        let min_line = s.seen.get("minimizer").copied().unwrap_or(0);
        minimizer
            .options(1.0)
            .validate()
            .map_err(|e| cfg_err(min_line, e.to_string()))?;

        let init_kind = match s.take("init", "kind") {
            None => match boundary {
                BoundaryKind::Hedgehog => InitKind::Radial,
                BoundaryKind::Constant(_) => InitKind::Constant,
            },
            Some((_, k)) if k == "radial" => InitKind::Radial,
            Some((line, k)) if k == "constant" => {
                if boundary == BoundaryKind::Hedgehog {
                    return Err(cfg_err(line, "init kind constant needs a constant boundary"));
                }
                InitKind::Constant
            }
            Some((line, k)) => return Err(cfg_err(line, format!("unknown init kind `{k}`"))),
        };
        let init_line = s.seen.get("init").copied().unwrap_or(0);
        let core_radius: f64 = s.get("init", "core_radius")?.unwrap_or(3.0);
        let amplitude: f64 = s.get("init", "amplitude")?.unwrap_or(0.1);
        if !(core_radius > 0.0 && core_radius * grid.spacing() <= grid.half_width()) {
            return Err(cfg_err(init_line, "core_radius must lie in (0, (n-1)/2] spacings"));
        }
        if !(0.0..=1.0).contains(&amplitude) {
            return Err(cfg_err(init_line, "amplitude must lie in [0, 1]"));
        }
        let seeds = match s.list::<u64>("init", "seeds")? {
            None => vec![0],
            Some((line, mut v)) => {
                let len = v.len();
                v.sort_unstable();
                v.dedup();
                if v.len() != len {
                    return Err(cfg_err(line, "duplicate seeds"));
                }
                v
            }
        };

        let dt = Thresholds::default();
        let thresholds = Thresholds {
            melt: s.get("classify", "melt")?.unwrap_or(dt.melt),
            escape: s.get("classify", "escape")?.unwrap_or(dt.escape),
        };
        for v in [thresholds.melt, thresholds.escape] {
            if !(v > 0.0 && v < 1.0) {
                let line = s.seen.get("classify").copied().unwrap_or(0);
                return Err(cfg_err(line, "thresholds must lie in (0, 1)"));
            }
        }

        let out_dir = s
            .get::<String>("output", "dir")?
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("out"));
        let warm_start = match s.take("output", "warm_start") {
            None => true,
            Some((line, v)) => parse_bool(line, &v)?,
        };
        let dump_all = match s.take("output", "dump_all") {
            None => false,
            Some((line, v)) => parse_bool(line, &v)?,
        };

        s.finish()?;
        Ok(SweepConfig {
            grid,
            boundary,
            params,
            mode,
            minimizer,
            init: InitSpec {
                kind: init_kind,
                core_radius,
                amplitude,
            },
            seeds,
            thresholds,
            out_dir,
            warm_start,
            dump_all,
        })
    }
}
