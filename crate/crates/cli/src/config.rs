//! Run configuration: defaults per experiment kind, overlaid in order by an
//! optional preset, an optional config file, and command-line flags (later
//! layers win). The file grammar is a flat TOML subset — `[section]` headers
//! with scalar or array values — documented in the repository README.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use schelling::lattice::{Closure, PNorm};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Experiment families, one per subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Simulate,
    Solve,
    Couple,
    FinalConfigs,
    StableShape,
    Occupation,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Kind::Simulate => "simulate",
            Kind::Solve => "solve",
            Kind::Couple => "couple",
            Kind::FinalConfigs => "final-configs",
            Kind::StableShape => "stable-shape",
            Kind::Occupation => "occupation",
        };
        f.write_str(name)
    }
}

/// A configuration rejection; the message names the offending field (or the
/// offending line of a config file) and maps to exit code 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad(field: &str, msg: impl fmt::Display) -> ConfigError {
    ConfigError(format!("field `{field}`: {msg}"))
}

/// Fully resolved, validated run configuration. Echoed verbatim into every
/// run summary; its canonical form (output path and scheduling flag blanked)
/// is what the artifact hash covers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub kind: Kind,
    // model
    pub n: usize,
    pub m: u8,
    pub w: Vec<u32>,
    /// `"inf"` or a finite exponent ≥ 1, e.g. `"2"`.
    pub p: String,
    /// `"closed"` (2w+1 window) or `"open"` (2w−1).
    pub closure: String,
    // geometry / grid
    /// Torus width in rescaled units; 1-D lattices have `r·w` nodes.
    pub r: f64,
    /// Explicit lattice side for n ≥ 2.
    pub side: Option<usize>,
    /// Solver cells per unit length (`h = 1/cells`); `couple` defaults to `w`.
    pub cells: Option<usize>,
    // numerics
    pub t: f64,
    /// Euler step; omitted means `h/4`.
    pub dt: Option<f64>,
    /// Lattice time horizon for event-driven runs.
    pub horizon: f64,
    pub eps: Vec<f64>,
    /// Lipschitz sup/slope budget K of the test-function class.
    pub budget: f64,
    /// Dyadic level k: test functions take values in `2^{-k}·Z`.
    pub level: u32,
    /// Random test functions per family (on top of the stress battery).
    pub samples: usize,
    /// Greedy refinement sweeps per band width.
    pub local_steps: usize,
    /// Solver initial data: `constant`, `sawtooth`, or `gaussian`.
    pub data: String,
    /// Level of `constant` data.
    pub amp: f64,
    /// Erosion start: half-side of the initial box; omitted means
    /// `2^{2n}·w^{n+1}`.
    pub radius: Option<u32>,
    /// Erosion victim order: `lex` or `random`.
    pub rule: String,
    /// Also run the exhaustive minimal-diameter search (stable-shape).
    pub min_diameter: bool,
    /// Diameter cap for that search.
    pub search_cap: u32,
    /// Key coupled initial opinions by site so nested resolutions share
    /// noise.
    pub shared_init: bool,
    // run
    pub seed: u64,
    /// Number of replicates; seeds `seed, seed+1, …` are used.
    pub seeds: usize,
    pub out: String,
    pub sequential: bool,
}

impl RunConfig {
    /// Baseline configuration per experiment kind; every default here is
    /// documented in `--help`.
    pub fn defaults(kind: Kind) -> Self {
        let mut cfg = RunConfig {
            kind,
            n: 1,
            m: 2,
            w: vec![3],
            p: "inf".into(),
            closure: "closed".into(),
            r: 15.0,
            side: None,
            cells: None,
            t: 1.0,
            dt: None,
            horizon: 1000.0,
            eps: vec![0.1, 0.05, 0.025, 0.0125],
            budget: 2.0,
            level: 6,
            samples: 40,
            local_steps: 8,
            data: "sawtooth".into(),
            amp: 0.1,
            radius: None,
            rule: "lex".into(),
            min_diameter: false,
            search_cap: 8,
            shared_init: true,
            seed: 0,
            seeds: 1,
            out: format!("runs/{kind}"),
            sequential: false,
        };
        match kind {
            Kind::Simulate => {}
            Kind::Solve => {
                cfg.r = 4.0;
                cfg.cells = Some(256);
                cfg.t = 1.5;
            }
            Kind::Couple => {
                cfg.r = 14.0;
                cfg.w = vec![50, 100];
                cfg.seeds = 5;
                cfg.t = 1.0;
            }
            Kind::FinalConfigs => {
                cfg.w = vec![1, 2, 3];
                cfg.seeds = 20;
            }
            Kind::StableShape => {
                cfg.n = 2;
                cfg.w = vec![1];
            }
            Kind::Occupation => {
                cfg.r = 4.0;
                cfg.cells = Some(4096);
                cfg.seeds = 5;
            }
        }
        cfg
    }

    /// Named parameter bundles. `solve` presets pick the initial data; the
    /// `demo-*` presets reproduce the headline experiment scales.
    pub fn preset(kind: Kind, name: &str) -> Result<Overlay, ConfigError> {
        let mut ov = Overlay::default();
        match (kind, name) {
            (Kind::Simulate, "demo-1d") => {
                // three opinions, w = 100 on a 14-window torus
                ov.n = Some(1);
                ov.m = Some(3);
                ov.w = Some(vec![100]);
                ov.r = Some(14.0);
            }
            (Kind::Simulate, "demo-2d") => {
                // desk scale: ~800 nodes instead of the full 4000-node torus,
                // which also caps w at 8 (the side must cover three windows)
                ov.n = Some(2);
                ov.m = Some(2);
                ov.side = Some(28);
                ov.w = Some(vec![4, 8]);
                ov.horizon = Some(60.0);
            }
            (Kind::FinalConfigs, "demo-final-1d") => {
                ov.w = Some(vec![1, 2, 3]);
                ov.r = Some(15.0);
                ov.seeds = Some(50);
            }
            (Kind::Solve, "constant") | (Kind::Solve, "sawtooth") | (Kind::Solve, "gaussian") => {
                ov.data = Some(name.into());
            }
            _ => {
                return Err(bad(
                    "preset",
                    format!(
                        "unknown preset `{name}` for `{kind}` (simulate: demo-1d, demo-2d; \
                         final-configs: demo-final-1d; solve: constant, sawtooth, gaussian)"
                    ),
                ));
            }
        }
        Ok(ov)
    }

    /// Applies an overlay; set fields win.
    pub fn apply(&mut self, ov: &Overlay) {
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = &ov.$f { self.$f = v.clone(); } )* };
        }
        take!(n, m, w, p, closure, r, t, horizon, eps, budget, level, samples, local_steps,
              data, amp, rule, min_diameter, search_cap, shared_init, seed, seeds, out,
              sequential);
        // optional-valued fields overlay as plain options
        if ov.side.is_some() {
            self.side = ov.side;
        }
        if ov.cells.is_some() {
            self.cells = ov.cells;
        }
        if ov.dt.is_some() {
            self.dt = ov.dt;
        }
        if ov.radius.is_some() {
            self.radius = ov.radius;
        }
    }

    pub fn p_norm(&self) -> Result<PNorm, ConfigError> {
        if self.p == "inf" {
            return Ok(PNorm::Inf);
        }
        match self.p.parse::<f64>() {
            Ok(v) if v >= 1.0 && v.is_finite() => Ok(PNorm::Finite(v)),
            _ => Err(bad("p", format!("`{}` is neither `inf` nor a finite exponent ≥ 1", self.p))),
        }
    }

    pub fn closure_rule(&self) -> Result<Closure, ConfigError> {
        match self.closure.as_str() {
            "closed" => Ok(Closure::Closed),
            "open" => Ok(Closure::Open),
            other => Err(bad("closure", format!("`{other}` is neither `closed` nor `open`"))),
        }
    }

    /// Field-by-field validation; everything checked here exits with code 2
    /// before any artifact is touched.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n == 0 || self.n > 4 {
            return Err(bad("n", format!("dimension {} outside 1..=4", self.n)));
        }
        if self.m < 2 {
            return Err(bad("m", "need at least two opinions"));
        }
        if self.w.is_empty() {
            return Err(bad("w", "need at least one window size"));
        }
        if let Some(w) = self.w.iter().find(|&&w| w == 0) {
            return Err(bad("w", format!("window size {w} must be ≥ 1")));
        }
        self.p_norm()?;
        self.closure_rule()?;
        if !(self.r > 0.0) {
            return Err(bad("r", format!("torus width {} must be positive", self.r)));
        }
        if self.t < 0.0 {
            return Err(bad("t", "horizon must be nonnegative"));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) {
                return Err(bad("dt", "step must be positive"));
            }
        }
        if self.horizon <= 0.0 {
            return Err(bad("horizon", "event horizon must be positive"));
        }
        if self.eps.is_empty() || self.eps.iter().any(|&e| !(e > 0.0)) {
            return Err(bad("eps", "band half-widths must be positive"));
        }
        if !(self.budget > 0.0) {
            return Err(bad("budget", "Lipschitz budget K must be positive"));
        }
        if self.seeds == 0 {
            return Err(bad("seeds", "need at least one replicate"));
        }
        if let Some(cells) = self.cells {
            if cells == 0 {
                return Err(bad("cells", "grid resolution must be positive"));
            }
        }
        match self.rule.as_str() {
            "lex" | "random" => {}
            other => return Err(bad("rule", format!("`{other}` is neither `lex` nor `random`"))),
        }
        match self.data.as_str() {
            "constant" | "sawtooth" | "gaussian" => {}
            other => {
                return Err(bad(
                    "data",
                    format!("`{other}` is not one of constant, sawtooth, gaussian"),
                ))
            }
        }
        // kind-specific constraints
        match self.kind {
            Kind::Simulate | Kind::FinalConfigs => {
                if self.n == 1 {
                    let r = self.r;
                    if (r - r.round()).abs() > 1e-9 || r.round() < 3.0 {
                        return Err(bad("r", format!("1-D lattices need an integer r ≥ 3, got {r}")));
                    }
                } else if self.side.is_none() && self.kind == Kind::Simulate {
                    return Err(bad("side", "n ≥ 2 lattices need an explicit side"));
                }
                if self.kind == Kind::FinalConfigs && self.n != 1 {
                    return Err(bad("n", "final-configs reads 1-D run structure"));
                }
            }
            Kind::Solve => {
                if self.n > 2 {
                    return Err(bad("n", "solver grids are 1-D or 2-D at desk scale"));
                }
                if self.data == "sawtooth" && self.n != 1 {
                    return Err(bad("data", "sawtooth data is one-dimensional"));
                }
            }
            Kind::Couple => {
                if self.n != 1 {
                    return Err(bad("n", "coupling runs are pinned to one dimension"));
                }
                if self.m != 2 {
                    return Err(bad("m", "coupling runs compare two-opinion fields"));
                }
            }
            Kind::StableShape => {
                if self.n > 4 {
                    return Err(bad("n", "erosion supports 1 ≤ n ≤ 4"));
                }
            }
            Kind::Occupation => {
                if self.n != 1 {
                    return Err(bad("n", "occupation scans run on 1-D grids"));
                }
                let cells = self.cells.unwrap_or(0);
                if cells % (1usize << self.level) != 0 {
                    return Err(bad(
                        "cells",
                        format!("{cells} cells per unit must be divisible by 2^level = {}", 1u64 << self.level),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Hash of the canonical configuration (output path and scheduling flag
    /// blanked, so reruns into different directories stamp identical hashes).
    pub fn hash(&self) -> String {
        let mut canon = self.clone();
        canon.out = String::new();
        canon.sequential = false;
        let json = serde_json::to_string(&canon).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(json.as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Output directory, resolved against `SCHELLING_OUT` when that is set
    /// and the configured path is relative.
    pub fn out_dir(&self) -> PathBuf {
        let out = PathBuf::from(&self.out);
        if out.is_absolute() {
            return out;
        }
        match std::env::var_os("SCHELLING_OUT") {
            Some(root) => PathBuf::from(root).join(out),
            None => out,
        }
    }
}

/// One layer of partial configuration (preset, file, or flags).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overlay {
    pub n: Option<usize>,
    pub m: Option<u8>,
    pub w: Option<Vec<u32>>,
    pub p: Option<String>,
    pub closure: Option<String>,
    pub r: Option<f64>,
    pub side: Option<usize>,
    pub cells: Option<usize>,
    pub t: Option<f64>,
    pub dt: Option<f64>,
    pub horizon: Option<f64>,
    pub eps: Option<Vec<f64>>,
    pub budget: Option<f64>,
    pub level: Option<u32>,
    pub samples: Option<usize>,
    pub local_steps: Option<usize>,
    pub data: Option<String>,
    pub amp: Option<f64>,
    pub radius: Option<u32>,
    pub rule: Option<String>,
    pub min_diameter: Option<bool>,
    pub search_cap: Option<u32>,
    pub shared_init: Option<bool>,
    pub seed: Option<u64>,
    pub seeds: Option<usize>,
    pub out: Option<String>,
    pub sequential: Option<bool>,
}

/// `(section, key)` registry of the file grammar; anything else is rejected.
const FILE_KEYS: &[(&str, &str)] = &[
    ("model", "n"),
    ("model", "m"),
    ("model", "w"),
    ("model", "p"),
    ("model", "closure"),
    ("grid", "r"),
    ("grid", "side"),
    ("grid", "cells"),
    ("numerics", "t"),
    ("numerics", "dt"),
    ("numerics", "horizon"),
    ("numerics", "eps"),
    ("numerics", "budget"),
    ("numerics", "level"),
    ("numerics", "samples"),
    ("numerics", "local_steps"),
    ("numerics", "data"),
    ("numerics", "amp"),
    ("numerics", "radius"),
    ("numerics", "rule"),
    ("numerics", "min_diameter"),
    ("numerics", "search_cap"),
    ("numerics", "shared_init"),
    ("run", "seed"),
    ("run", "seeds"),
    ("run", "out"),
    ("run", "sequential"),
];

/// Parses a config file into an overlay. Syntax errors carry the parser's
/// line/column; unknown sections or keys are named in full.
pub fn parse_file(path: &Path) -> Result<Overlay, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
    parse_str(&text).map_err(|e| ConfigError(format!("{}: {}", path.display(), e.0)))
}

pub fn parse_str(text: &str) -> Result<Overlay, ConfigError> {
    let table: toml::Table =
        text.parse().map_err(|e: toml::de::Error| ConfigError(format!("{e}")))?;
    let mut flat: BTreeMap<(String, String), toml::Value> = BTreeMap::new();
    for (section, value) in table {
        let sub = match value {
            toml::Value::Table(t) => t,
            _ => {
                return Err(ConfigError(format!(
                    "top-level key `{section}` outside a [section]"
                )))
            }
        };
        for (key, v) in sub {
            if !FILE_KEYS.iter().any(|&(s, k)| s == section && k == key) {
                return Err(ConfigError(format!("unknown key `{section}.{key}`")));
            }
            flat.insert((section.clone(), key), v);
        }
    }

    let mut ov = Overlay::default();
    for ((section, key), value) in flat {
        let field = format!("{section}.{key}");
        match key.as_str() {
            "n" => ov.n = Some(as_usize(&field, &value)?),
            "m" => ov.m = Some(as_usize(&field, &value)? as u8),
            "w" => ov.w = Some(as_u32_list(&field, &value)?),
            "p" => ov.p = Some(as_string(&field, &value)?),
            "closure" => ov.closure = Some(as_string(&field, &value)?),
            "r" => ov.r = Some(as_f64(&field, &value)?),
            "side" => ov.side = Some(as_usize(&field, &value)?),
            "cells" => ov.cells = Some(as_usize(&field, &value)?),
            "t" => ov.t = Some(as_f64(&field, &value)?),
            "dt" => ov.dt = Some(as_f64(&field, &value)?),
            "horizon" => ov.horizon = Some(as_f64(&field, &value)?),
            "eps" => ov.eps = Some(as_f64_list(&field, &value)?),
            "budget" => ov.budget = Some(as_f64(&field, &value)?),
            "level" => ov.level = Some(as_usize(&field, &value)? as u32),
            "samples" => ov.samples = Some(as_usize(&field, &value)?),
            "local_steps" => ov.local_steps = Some(as_usize(&field, &value)?),
            "data" => ov.data = Some(as_string(&field, &value)?),
            "amp" => ov.amp = Some(as_f64(&field, &value)?),
            "radius" => ov.radius = Some(as_usize(&field, &value)? as u32),
            "rule" => ov.rule = Some(as_string(&field, &value)?),
            "min_diameter" => ov.min_diameter = Some(as_bool(&field, &value)?),
            "search_cap" => ov.search_cap = Some(as_usize(&field, &value)? as u32),
            "shared_init" => ov.shared_init = Some(as_bool(&field, &value)?),
            "seed" => ov.seed = Some(as_usize(&field, &value)? as u64),
            "seeds" => ov.seeds = Some(as_usize(&field, &value)?),
            "out" => ov.out = Some(as_string(&field, &value)?),
            "sequential" => ov.sequential = Some(as_bool(&field, &value)?),
            _ => unreachable!("key registry covers the match"),
        }
    }
    Ok(ov)
}

fn as_usize(field: &str, v: &toml::Value) -> Result<usize, ConfigError> {
    match v.as_integer() {
        Some(i) if i >= 0 => Ok(i as usize),
        _ => Err(bad(field, format!("expected a nonnegative integer, got {v}"))),
    }
}

fn as_f64(field: &str, v: &toml::Value) -> Result<f64, ConfigError> {
    match v {
        toml::Value::Float(f) => Ok(*f),
        toml::Value::Integer(i) => Ok(*i as f64),
        _ => Err(bad(field, format!("expected a number, got {v}"))),
    }
}

fn as_bool(field: &str, v: &toml::Value) -> Result<bool, ConfigError> {
    v.as_bool().ok_or_else(|| bad(field, format!("expected true/false, got {v}")))
}

fn as_string(field: &str, v: &toml::Value) -> Result<String, ConfigError> {
    v.as_str()
        .map(str::to_owned)
        .ok_or_else(|| bad(field, format!("expected a string, got {v}")))
}

fn as_u32_list(field: &str, v: &toml::Value) -> Result<Vec<u32>, ConfigError> {
    match v {
        toml::Value::Integer(_) => Ok(vec![as_usize(field, v)? as u32]),
        toml::Value::Array(items) => {
            items.iter().map(|item| Ok(as_usize(field, item)? as u32)).collect()
        }
        _ => Err(bad(field, format!("expected an integer or integer list, got {v}"))),
    }
}

fn as_f64_list(field: &str, v: &toml::Value) -> Result<Vec<f64>, ConfigError> {
    match v {
        toml::Value::Array(items) => items.iter().map(|item| as_f64(field, item)).collect(),
        _ => Ok(vec![as_f64(field, v)?]),
    }
}
