//! `key = value` run configuration shared by config files and flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use qtunnel_core::model::{wave_numbers, EnvMode, PhysicalParams, RectBarrier};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Number,
    Count,
    List,
    Text,
}

pub struct KeySpec {
    pub name: &'static str,
    pub kind: Kind,
    pub help: &'static str,
}

pub const KEYS: &[KeySpec] = &[
    KeySpec { name: "scenario", kind: Kind::Text, help: "scenario to run (files only; the CLI takes it positionally)" },
    KeySpec { name: "out", kind: Kind::Text, help: "output CSV path" },
    KeySpec { name: "hbar", kind: Kind::Number, help: "reduced Planck constant" },
    KeySpec { name: "mass", kind: Kind::Number, help: "tunneling particle mass M" },
    KeySpec { name: "energy", kind: Kind::Number, help: "energy E" },
    KeySpec { name: "v0", kind: Kind::Number, help: "rectangular barrier height" },
    KeySpec { name: "width", kind: Kind::Number, help: "rectangular barrier width a" },
    KeySpec { name: "potential", kind: Kind::List, help: "smooth potential as ascending polynomial coefficients" },
    KeySpec { name: "bracket", kind: Kind::List, help: "interval lo,hi enclosing both turning points" },
    KeySpec { name: "window", kind: Kind::Number, help: "Airy patch half-width (automatic when unset)" },
    KeySpec { name: "decaying-term", kind: Kind::Text, help: "keep the small imaginary term under the barrier (true/false)" },
    KeySpec { name: "mode-mass", kind: Kind::List, help: "environment mode masses" },
    KeySpec { name: "mode-omega0", kind: Kind::List, help: "environment mode frequencies" },
    KeySpec { name: "mode-coupling", kind: Kind::List, help: "environment mode couplings c" },
    KeySpec { name: "rho", kind: Kind::Number, help: "tanh background rate (default hbar*k/(a*M))" },
    KeySpec { name: "points", kind: Kind::Count, help: "grid points" },
    KeySpec { name: "x-min", kind: Kind::Number, help: "lower end of the x grid" },
    KeySpec { name: "x-max", kind: Kind::Number, help: "upper end of the x grid" },
    KeySpec { name: "t-min", kind: Kind::Number, help: "first output time" },
    KeySpec { name: "t-max", kind: Kind::Number, help: "last output time" },
    KeySpec { name: "sweep-key", kind: Kind::Text, help: "parameter varied by the sweep scenario" },
    KeySpec { name: "sweep-values", kind: Kind::List, help: "values taken by the sweep parameter" },
];

pub fn key_spec(name: &str) -> Option<&'static KeySpec> {
    KEYS.iter().find(|k| k.name == name)
}

pub const SWEEP_KEYS: &[&str] = &["energy", "v0", "width", "hbar", "mass"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Scenario {
    Fig1a,
    Fig1b,
    Fig2,
    Fig3,
    Rect,
    Wkb,
    ModeEvolve,
    Backreaction,
    Sweep,
}

impl Scenario {
    pub const ALL: [Scenario; 9] = [
        Scenario::Fig1a,
        Scenario::Fig1b,
        Scenario::Fig2,
        Scenario::Fig3,
        Scenario::Rect,
        Scenario::Wkb,
        Scenario::ModeEvolve,
        Scenario::Backreaction,
        Scenario::Sweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Fig1a => "fig1a",
            Scenario::Fig1b => "fig1b",
            Scenario::Fig2 => "fig2",
            Scenario::Fig3 => "fig3",
            Scenario::Rect => "rect",
            Scenario::Wkb => "wkb",
            Scenario::ModeEvolve => "mode-evolve",
            Scenario::Backreaction => "backreaction",
            Scenario::Sweep => "sweep",
        }
    }

    pub fn about(self) -> &'static str {
        match self {
            Scenario::Fig1a => "rectangular barrier total potential across the barrier",
            Scenario::Fig1b => "rectangular barrier total potential, global view",
            Scenario::Fig2 => "WKB total potential of the parabolic barrier 1-8x(x-1)",
            Scenario::Fig3 => "effective potential and Q factors for one environment mode",
            Scenario::Rect => "rectangular barrier scalars and amplitudes",
            Scenario::Wkb => "WKB total potential of a polynomial barrier",
            Scenario::ModeEvolve => "Gaussian mode states along the tanh background",
            Scenario::Backreaction => "effective potential and modified tunneling probability",
            Scenario::Sweep => "transmission and rolling time over a parameter sweep",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|sc| sc.name() == s)
    }

    fn uses_rect(self) -> bool {
        !matches!(self, Scenario::Fig2 | Scenario::Wkb)
    }

    fn uses_modes(self) -> bool {
        matches!(self, Scenario::Fig3 | Scenario::ModeEvolve | Scenario::Backreaction)
    }

    fn default(self, key: &str) -> Option<&'static str> {
        let smooth = !self.uses_rect();
        Some(match key {
            "hbar" | "mass" => "1",
            "energy" if smooth => "1",
            "energy" => "2",
            "v0" => "4",
            "width" => "1",
            "potential" => "1,8,-8",
            "bracket" => "-0.5,1.5",
            "decaying-term" => "true",
            "mode-mass" | "mode-omega0" => "1",
            "mode-coupling" => "0.15",
            "sweep-key" => "width",
            "sweep-values" => "1,2,3,4,5",
            "points" => match self {
                Scenario::Fig1a => "401",
                Scenario::Fig1b => "1001",
                Scenario::ModeEvolve => "401",
                Scenario::Rect | Scenario::Sweep => return None,
                _ => "2000",
            },
            _ => return None,
        })
    }

    fn relevant(self, key: &str) -> bool {
        match key {
            "scenario" | "out" | "hbar" | "mass" | "energy" => true,
            "v0" | "width" => self.uses_rect(),
            "potential" | "bracket" | "window" | "decaying-term" => !self.uses_rect(),
            "mode-mass" | "mode-omega0" | "mode-coupling" => self.uses_modes(),
            "rho" | "t-min" | "t-max" => self == Scenario::ModeEvolve,
            "points" => !matches!(self, Scenario::Rect | Scenario::Sweep),
            "x-min" | "x-max" => matches!(self, Scenario::Fig1a | Scenario::Fig1b | Scenario::Fig2 | Scenario::Wkb),
            "sweep-key" | "sweep-values" => self == Scenario::Sweep,
            _ => false,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Origin {
    File { line: usize, column: usize },
    Flag,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::File { line, column } => write!(f, "line {line}, column {column}"),
            Origin::Flag => f.write_str("command line"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Entry {
    pub value: String,
    pub origin: Origin,
}

/// Raw key/value settings before typing.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    pub entries: BTreeMap<String, Entry>,
}

/// Problems found while checking a configuration, each tied to its source.
#[derive(Debug, Clone, Default)]
pub struct Diagnostics(pub Vec<String>);

impl Diagnostics {
    fn push(&mut self, origin: Option<&Origin>, msg: impl Into<String>) {
        match origin {
            Some(o) => self.0.push(format!("{o}: {}", msg.into())),
            None => self.0.push(msg.into()),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Settings {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<(Self, Diagnostics), CliError> {
        let mut settings = Settings::default();
        let mut diags = Diagnostics::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            let Some(eq) = content.find('=') else {
                let column = content.trim_end().chars().count() + 1;
                return Err(CliError::Syntax { line, column, msg: "expected `=` after key".into() });
            };
            let key_part = &content[..eq];
            let key = key_part.trim();
            let key_col = key_part.chars().take_while(|c| c.is_whitespace()).count() + 1;
            if key.is_empty() {
                return Err(CliError::Syntax { line, column: eq + 1, msg: "missing key before `=`".into() });
            }
            if let Some((off, c)) = key.char_indices().find(|(_, c)| !(c.is_ascii_lowercase() || c.is_ascii_digit() || *c == '-')) {
                return Err(CliError::Syntax {
                    line,
                    column: key_col + key[..off].chars().count(),
                    msg: format!("invalid character `{c}` in key"),
                });
            }
            let value_part = &content[eq + 1..];
            let value = value_part.trim();
            let value_col = eq + 2 + value_part.chars().take_while(|c| c.is_whitespace()).count();
            if value.is_empty() {
                return Err(CliError::Syntax { line, column: eq + 2, msg: format!("missing value for `{key}`") });
            }
            let origin = Origin::File { line, column: value_col };
            if key_spec(key).is_none() {
                diags.push(Some(&Origin::File { line, column: key_col }), format!("unknown key `{key}`"));
                continue;
            }
            if let Some(prev) = settings.entries.get(key) {
                diags.push(Some(&Origin::File { line, column: key_col }), format!("duplicate key `{key}` (first set at {})", prev.origin));
                continue;
            }
            settings.entries.insert(key.to_string(), Entry { value: value.to_string(), origin });
        }
        Ok((settings, diags))
    }

    pub fn set_flag(&mut self, key: &str, value: &str) {
        self.entries.insert(key.to_string(), Entry { value: value.to_string(), origin: Origin::Flag });
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub hbar: f64,
    pub mass: f64,
    pub energy: f64,
    pub v0: f64,
    pub width: f64,
    pub potential: Vec<f64>,
    pub bracket: (f64, f64),
    pub window: Option<f64>,
    pub decaying_term: bool,
    pub modes: Vec<EnvMode<f64>>,
    pub rho: Option<f64>,
    pub points: Option<usize>,
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub sweep_key: String,
    pub sweep_values: Vec<f64>,
    pub out: Option<PathBuf>,
    /// Sorted `key=value` pairs of every setting in effect, joined by `;`.
    pub canonical: String,
}

fn parse_number(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn parse_list(s: &str) -> Option<Vec<f64>> {
    s.split(',').map(|p| parse_number(p.trim())).collect()
}

fn canonical_value(kind: Kind, raw: &str) -> String {
    match kind {
        Kind::Number => parse_number(raw).map(|v| format!("{v}")).unwrap_or_else(|| raw.to_string()),
        Kind::List => parse_list(raw)
            .map(|vs| vs.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(","))
            .unwrap_or_else(|| raw.to_string()),
        Kind::Count | Kind::Text => raw.to_string(),
    }
}

impl RunConfig {
    /// Types and checks `settings` for `scenario`; every violated invariant
    /// is reported, not just the first.
    pub fn resolve(scenario: Scenario, settings: &Settings) -> Result<RunConfig, Diagnostics> {
        let mut d = Diagnostics::default();
        let get = |key: &str| -> Option<(String, Option<Origin>)> {
            match settings.entries.get(key) {
                Some(e) => Some((e.value.clone(), Some(e.origin.clone()))),
                None => scenario.default(key).map(|v| (v.to_string(), None)),
            }
        };

        if let Some(e) = settings.entries.get("scenario") {
            if e.value != scenario.name() {
                d.push(Some(&e.origin), format!("scenario `{}` conflicts with requested `{scenario}`", e.value));
            }
        }
        for (key, e) in &settings.entries {
            if !scenario.relevant(key) {
                d.push(Some(&e.origin), format!("key `{key}` has no effect for scenario `{scenario}`"));
            }
        }

        let number = |d: &mut Diagnostics, key: &str| -> Option<f64> {
            let (raw, origin) = get(key)?;
            match parse_number(&raw) {
                Some(v) => Some(v),
                None => {
                    d.push(origin.as_ref(), format!("{key}: expected a finite number, got `{raw}`"));
                    None
                }
            }
        };
        let hbar = number(&mut d, "hbar");
        let mass = number(&mut d, "mass");
        let energy = number(&mut d, "energy");
        let v0 = number(&mut d, "v0");
        let width = number(&mut d, "width");
        let window = number(&mut d, "window");
        let rho = number(&mut d, "rho");
        let x_min = number(&mut d, "x-min");
        let x_max = number(&mut d, "x-max");
        let t_min = number(&mut d, "t-min");
        let t_max = number(&mut d, "t-max");

        let list = |d: &mut Diagnostics, key: &str| -> Vec<f64> {
            let Some((raw, origin)) = get(key) else { return Vec::new() };
            parse_list(&raw).unwrap_or_else(|| {
                d.push(origin.as_ref(), format!("{key}: expected comma-separated finite numbers, got `{raw}`"));
                Vec::new()
            })
        };
        let potential = list(&mut d, "potential");
        let bracket_v = list(&mut d, "bracket");
        let mode_mass = list(&mut d, "mode-mass");
        let mode_omega0 = list(&mut d, "mode-omega0");
        let mode_coupling = list(&mut d, "mode-coupling");
        let sweep_values = list(&mut d, "sweep-values");

        let origin_of = |key: &str| settings.entries.get(key).map(|e| e.origin.clone());

        let points = match get("points") {
            Some((raw, origin)) => match raw.parse::<usize>() {
                Ok(n) if n >= 5 => Some(n),
                _ => {
                    d.push(origin.as_ref(), format!("points: expected an integer >= 5, got `{raw}`"));
                    None
                }
            },
            None => None,
        };
        let decaying_term = match get("decaying-term") {
            Some((raw, origin)) => match raw.as_str() {
                "true" => true,
                "false" => false,
                _ => {
                    d.push(origin.as_ref(), format!("decaying-term: expected true or false, got `{raw}`"));
                    true
                }
            },
            None => true,
        };
        let sweep_key = get("sweep-key").map(|v| v.0).unwrap_or_default();
        if scenario == Scenario::Sweep && !SWEEP_KEYS.contains(&sweep_key.as_str()) {
            d.push(
                origin_of("sweep-key").as_ref(),
                format!("sweep-key: `{sweep_key}` is not sweepable (choose one of {})", SWEEP_KEYS.join(", ")),
            );
        }
        if scenario == Scenario::Sweep && sweep_values.is_empty() {
            d.push(origin_of("sweep-values").as_ref(), "sweep-values: at least one value is required");
        }

        // physical invariants, checked through the library constructors
        if let (Some(h), Some(m), Some(e)) = (hbar, mass, energy) {
            match PhysicalParams::new(h, m, e) {
                Ok(params) => {
                    if scenario.uses_rect() {
                        if let (Some(v), Some(a)) = (v0, width) {
                            match RectBarrier::new(v, a) {
                                Ok(b) => {
                                    if let Err(err) = wave_numbers(&params, &b) {
                                        d.push(origin_of("energy").as_ref(), format!("{}: {err}", err.name()));
                                    }
                                }
                                Err(err) => d.push(
                                    origin_of("v0").or(origin_of("width")).as_ref(),
                                    format!("{}: {err}", err.name()),
                                ),
                            }
                        }
                    }
                }
                Err(err) => d.push(
                    origin_of("energy").or(origin_of("mass")).or(origin_of("hbar")).as_ref(),
                    format!("{}: {err}", err.name()),
                ),
            }
        }
        if !scenario.uses_rect() {
            if potential.is_empty() {
                d.push(origin_of("potential").as_ref(), "potential: at least one coefficient is required");
            }
            if bracket_v.len() != 2 || bracket_v[0] >= bracket_v[1] {
                d.push(origin_of("bracket").as_ref(), "bracket: expected two values lo,hi with lo < hi");
            }
            if let Some(w) = window {
                if w <= 0.0 {
                    d.push(origin_of("window").as_ref(), "window: must be positive");
                }
            }
        }
        if let (Some(lo), Some(hi)) = (x_min, x_max) {
            if lo >= hi {
                d.push(origin_of("x-min").as_ref(), "x-min must be below x-max");
            }
        }
        if let (Some(lo), Some(hi)) = (t_min, t_max) {
            if lo >= hi {
                d.push(origin_of("t-min").as_ref(), "t-min must be below t-max");
            }
        }
        if let Some(r) = rho {
            if r <= 0.0 {
                d.push(origin_of("rho").as_ref(), "rho: must be positive");
            }
        }

        let mut modes = Vec::new();
        if scenario.uses_modes() {
            let n = mode_coupling.len().max(mode_mass.len()).max(mode_omega0.len());
            let pick = |v: &[f64], i: usize| if v.len() == 1 { Some(v[0]) } else { v.get(i).copied() };
            for (key, v) in [("mode-mass", &mode_mass), ("mode-omega0", &mode_omega0), ("mode-coupling", &mode_coupling)] {
                if v.len() != 1 && v.len() != n {
                    d.push(origin_of(key).as_ref(), format!("{key}: {} values for {n} modes", v.len()));
                }
            }
            for i in 0..n {
                if let (Some(m), Some(w), Some(c)) = (pick(&mode_mass, i), pick(&mode_omega0, i), pick(&mode_coupling, i)) {
                    match EnvMode::new(m, w, c) {
                        Ok(mode) => {
                            // late-time frequency on the tanh background, x̄ → 2a
                            if mode.omega_sq_at(2.0 * width.unwrap_or(1.0)) <= 0.0 {
                                d.push(
                                    origin_of("mode-coupling").as_ref(),
                                    format!("Tachyonic: mode {} has omega^2 <= 0 once the particle crosses the barrier", i + 1),
                                );
                            }
                            modes.push(mode);
                        }
                        Err(err) => d.push(
                            origin_of("mode-omega0").or(origin_of("mode-mass")).as_ref(),
                            format!("mode {}: {}: {err}", i + 1, err.name()),
                        ),
                    }
                }
            }
        }

        if !d.is_empty() {
            return Err(d);
        }

        let mut canon: Vec<String> = Vec::new();
        for spec in KEYS {
            if matches!(spec.name, "scenario" | "out") || !scenario.relevant(spec.name) {
                continue;
            }
            if let Some((raw, _)) = get(spec.name) {
                canon.push(format!("{}={}", spec.name, canonical_value(spec.kind, &raw)));
            }
        }
        canon.sort();

        Ok(RunConfig {
            scenario,
            hbar: hbar.unwrap(),
            mass: mass.unwrap(),
            energy: energy.unwrap(),
            v0: v0.unwrap(),
            width: width.unwrap(),
            potential,
            bracket: if bracket_v.len() == 2 { (bracket_v[0], bracket_v[1]) } else { (0.0, 0.0) },
            window,
            decaying_term,
            modes,
            rho,
            points,
            x_min,
            x_max,
            t_min,
            t_max,
            sweep_key,
            sweep_values,
            out: settings.entries.get("out").map(|e| PathBuf::from(&e.value)),
            canonical: canon.join(";"),
        })
    }

    pub fn params(&self) -> PhysicalParams<f64> {
        PhysicalParams::new(self.hbar, self.mass, self.energy).expect("validated at load")
    }

    pub fn barrier(&self) -> RectBarrier<f64> {
        RectBarrier::new(self.v0, self.width).expect("validated at load")
    }
}
