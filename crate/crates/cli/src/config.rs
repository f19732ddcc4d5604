//! Scenario configuration: a flat, human-editable key-value format with one
//! section per concern, plus the initial-data expression language.
//!
//! The same struct serializes into the JSON report, and `to_text` /
//! `parse_text` round-trip exactly so a report always carries a re-runnable
//! configuration.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub seed: u64,
    pub initial: InitialData,
    pub grid: GridSection,
    pub solver: SolverSection,
    pub analysis: AnalysisSection,
    pub rescaled: RescaledSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSection {
    pub n_points: usize,
    pub half_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSection {
    pub t_end: f64,
    pub threshold: f64,
    pub dt_safety: f64,
    pub rate_fit_window: usize,
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisSection {
    pub zeros: bool,
    pub quotient: bool,
    pub selfsimilar: bool,
    pub modes: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescaledSection {
    pub y_n_points: usize,
    pub y_half_width: f64,
    pub s_end: f64,
    pub delta_bar: f64,
    pub r_bar: f64,
    pub eta_bar: f64,
    pub zeta_bar: f64,
    pub eps_bar: f64,
    pub eps1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSection {
    pub dir: String,
}

/// Initial data families. `perturb` adds seeded noise of the given amplitude
/// to both components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialData {
    OdeConstant {
        a0: f64,
        b0: f64,
        perturb: f64,
    },
    Remark33 {
        perturb: f64,
    },
    Theorem11 {
        amplitude: f64,
        level: f64,
        bound_coef: f64,
        perturb: f64,
    },
    Theorem12 {
        m: f64,
        n: f64,
        l: f64,
        width: f64,
        perturb: f64,
    },
    ModeRates {
        mode: usize,
        amplitude: f64,
    },
    Custom {
        a0: String,
        b0: String,
        perturb: f64,
    },
}

impl InitialData {
    pub fn kind(&self) -> &'static str {
        match self {
            InitialData::OdeConstant { .. } => "ode_constant",
            InitialData::Remark33 { .. } => "remark33",
            InitialData::Theorem11 { .. } => "theorem11",
            InitialData::Theorem12 { .. } => "theorem12",
            InitialData::ModeRates { .. } => "mode_rates",
            InitialData::Custom { .. } => "custom",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

type ConfigResult<T> = Result<T, ConfigError>;

fn err<T>(msg: impl Into<String>) -> ConfigResult<T> {
    Err(ConfigError(msg.into()))
}

/// Built-in scenario defaults. Every named scenario starts from these and
/// file keys or CLI flags override them.
pub fn default_config(name: &str) -> ConfigResult<ScenarioConfig> {
    let base = |initial: InitialData,
                n_points: usize,
                half_width: f64,
                t_end: f64,
                analysis: AnalysisSection| ScenarioConfig {
        name: name.to_string(),
        seed: 0,
        initial,
        grid: GridSection {
            n_points,
            half_width,
        },
        solver: SolverSection {
            t_end,
            threshold: 1e8,
            dt_safety: 0.3,
            rate_fit_window: 40,
            workers: 1,
        },
        analysis,
        rescaled: RescaledSection {
            y_n_points: 2001,
            y_half_width: 20.0,
            s_end: 2.0,
            delta_bar: 0.05,
            r_bar: 5.0,
            eta_bar: 2.0,
            zeta_bar: 0.5,
            eps_bar: 0.01,
            eps1: 5.0,
        },
        output: OutputSection {
            dir: format!("out/{name}"),
        },
    };
    let off = AnalysisSection {
        zeros: false,
        quotient: false,
        selfsimilar: false,
        modes: false,
    };
    Ok(match name {
        "ode_constant" => base(
            InitialData::OdeConstant {
                a0: 2.0,
                b0: 0.0,
                perturb: 0.0,
            },
            1001,
            10.0,
            10.0,
            off,
        ),
        "remark33" => base(
            InitialData::Remark33 { perturb: 0.0 },
            2001,
            8.0,
            4.0,
            AnalysisSection {
                zeros: true,
                quotient: false,
                selfsimilar: true,
                modes: false,
            },
        ),
        "theorem11" => base(
            InitialData::Theorem11 {
                amplitude: 1.0,
                level: 1.0,
                bound_coef: 2.0,
                perturb: 0.0,
            },
            1001,
            10.0,
            20.0,
            AnalysisSection {
                zeros: true,
                quotient: true,
                selfsimilar: false,
                modes: false,
            },
        ),
        "theorem12" => base(
            InitialData::Theorem12 {
                m: 2.0,
                n: 1.0,
                l: 3.0,
                width: 1.0,
                perturb: 0.0,
            },
            1001,
            10.0,
            20.0,
            AnalysisSection {
                zeros: true,
                quotient: false,
                selfsimilar: false,
                modes: false,
            },
        ),
        "mode_rates" => base(
            InitialData::ModeRates {
                mode: 1,
                amplitude: 1e-6,
            },
            1001,
            10.0,
            1.0,
            AnalysisSection {
                zeros: false,
                quotient: false,
                selfsimilar: false,
                modes: true,
            },
        ),
        "custom" => base(
            InitialData::Custom {
                a0: "constant(1)".to_string(),
                b0: "constant(0)".to_string(),
                perturb: 0.0,
            },
            1001,
            10.0,
            5.0,
            AnalysisSection {
                zeros: true,
                quotient: false,
                selfsimilar: false,
                modes: false,
            },
        ),
        other => return err(format!("unknown scenario name '{other}'")),
    })
}

pub fn scenario_names() -> &'static [&'static str] {
    &[
        "ode_constant",
        "remark33",
        "theorem11",
        "theorem12",
        "mode_rates",
        "custom",
    ]
}

/// Parses the flat sectioned format. Unknown sections or keys are errors so
/// typos cannot silently change an experiment.
pub fn parse_text(text: &str) -> ConfigResult<ScenarioConfig> {
    let mut entries: BTreeMap<(String, String), String> = BTreeMap::new();
    let mut section = String::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = name.trim().to_string();
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return err(format!("line {}: expected 'key = value'", lineno + 1));
        };
        if section.is_empty() {
            return err(format!("line {}: key outside any section", lineno + 1));
        }
        entries.insert(
            (section.clone(), key.trim().to_string()),
            value.trim().to_string(),
        );
    }

    let name = entries
        .get(&("scenario".to_string(), "name".to_string()))
        .cloned()
        .ok_or_else(|| ConfigError("missing [scenario] name".into()))?;
    let mut cfg = default_config(&name)?;

    // the initial-data kind may be overridden before its parameters
    if let Some(kind) = entries.get(&("initial".to_string(), "kind".to_string())) {
        if kind != cfg.initial.kind() {
            cfg.initial = default_initial(kind)?;
        }
    }

    for ((section, key), value) in &entries {
        apply_key(&mut cfg, section, key, value)?;
    }
    validate(&cfg)?;
    Ok(cfg)
}

fn default_initial(kind: &str) -> ConfigResult<InitialData> {
    Ok(match kind {
        "ode_constant" => default_config("ode_constant")?.initial,
        "remark33" => default_config("remark33")?.initial,
        "theorem11" => default_config("theorem11")?.initial,
        "theorem12" => default_config("theorem12")?.initial,
        "mode_rates" => default_config("mode_rates")?.initial,
        "custom" => default_config("custom")?.initial,
        other => return err(format!("unknown initial-data kind '{other}'")),
    })
}

fn parse_f64(key: &str, value: &str) -> ConfigResult<f64> {
    value
        .parse::<f64>()
        .map_err(|_| ConfigError(format!("{key}: expected a number, got '{value}'")))
}

fn parse_usize(key: &str, value: &str) -> ConfigResult<usize> {
    value
        .parse::<usize>()
        .map_err(|_| ConfigError(format!("{key}: expected an integer, got '{value}'")))
}

fn parse_bool(key: &str, value: &str) -> ConfigResult<bool> {
    match value {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        other => err(format!("{key}: expected a boolean, got '{other}'")),
    }
}

fn apply_key(cfg: &mut ScenarioConfig, section: &str, key: &str, value: &str) -> ConfigResult<()> {
    match (section, key) {
        ("scenario", "name") => cfg.name = value.to_string(),
        ("scenario", "seed") => {
            cfg.seed = value
                .parse::<u64>()
                .map_err(|_| ConfigError(format!("seed: expected an integer, got '{value}'")))?
        }
        ("initial", "kind") => {} // handled before the loop
        ("initial", k) => apply_initial_key(&mut cfg.initial, k, value)?,
        ("grid", "n_points") => cfg.grid.n_points = parse_usize(key, value)?,
        ("grid", "half_width") => cfg.grid.half_width = parse_f64(key, value)?,
        ("solver", "t_end") => cfg.solver.t_end = parse_f64(key, value)?,
        ("solver", "threshold") => cfg.solver.threshold = parse_f64(key, value)?,
        ("solver", "dt_safety") => cfg.solver.dt_safety = parse_f64(key, value)?,
        ("solver", "rate_fit_window") => cfg.solver.rate_fit_window = parse_usize(key, value)?,
        ("solver", "workers") => cfg.solver.workers = parse_usize(key, value)?,
        ("analysis", "zeros") => cfg.analysis.zeros = parse_bool(key, value)?,
        ("analysis", "quotient") => cfg.analysis.quotient = parse_bool(key, value)?,
        ("analysis", "selfsimilar") => cfg.analysis.selfsimilar = parse_bool(key, value)?,
        ("analysis", "modes") => cfg.analysis.modes = parse_bool(key, value)?,
        ("rescaled", "y_n_points") => cfg.rescaled.y_n_points = parse_usize(key, value)?,
        ("rescaled", "y_half_width") => cfg.rescaled.y_half_width = parse_f64(key, value)?,
        ("rescaled", "s_end") => cfg.rescaled.s_end = parse_f64(key, value)?,
        ("rescaled", "delta_bar") => cfg.rescaled.delta_bar = parse_f64(key, value)?,
        ("rescaled", "r_bar") => cfg.rescaled.r_bar = parse_f64(key, value)?,
        ("rescaled", "eta_bar") => cfg.rescaled.eta_bar = parse_f64(key, value)?,
        ("rescaled", "zeta_bar") => cfg.rescaled.zeta_bar = parse_f64(key, value)?,
        ("rescaled", "eps_bar") => cfg.rescaled.eps_bar = parse_f64(key, value)?,
        ("rescaled", "eps1") => cfg.rescaled.eps1 = parse_f64(key, value)?,
        ("output", "dir") => cfg.output.dir = value.to_string(),
        (s, k) => return err(format!("unknown key [{s}] {k}")),
    }
    Ok(())
}

fn apply_initial_key(initial: &mut InitialData, key: &str, value: &str) -> ConfigResult<()> {
    match initial {
        InitialData::OdeConstant { a0, b0, perturb } => match key {
            "a0" => *a0 = parse_f64(key, value)?,
            "b0" => *b0 = parse_f64(key, value)?,
            "perturb" => *perturb = parse_f64(key, value)?,
            _ => return err(format!("unknown key [initial] {key} for ode_constant")),
        },
        InitialData::Remark33 { perturb } => match key {
            "perturb" => *perturb = parse_f64(key, value)?,
            _ => return err(format!("unknown key [initial] {key} for remark33")),
        },
        InitialData::Theorem11 {
            amplitude,
            level,
            bound_coef,
            perturb,
        } => match key {
            "amplitude" => *amplitude = parse_f64(key, value)?,
            "level" => *level = parse_f64(key, value)?,
            "bound_coef" => *bound_coef = parse_f64(key, value)?,
            "perturb" => *perturb = parse_f64(key, value)?,
            _ => return err(format!("unknown key [initial] {key} for theorem11")),
        },
        InitialData::Theorem12 {
            m,
            n,
            l,
            width,
            perturb,
        } => match key {
            "m" => *m = parse_f64(key, value)?,
            "n" => *n = parse_f64(key, value)?,
            "l" => *l = parse_f64(key, value)?,
            "width" => *width = parse_f64(key, value)?,
            "perturb" => *perturb = parse_f64(key, value)?,
            _ => return err(format!("unknown key [initial] {key} for theorem12")),
        },
        InitialData::ModeRates { mode, amplitude } => match key {
            "mode" => *mode = parse_usize(key, value)?,
            "amplitude" => *amplitude = parse_f64(key, value)?,
            _ => return err(format!("unknown key [initial] {key} for mode_rates")),
        },
        InitialData::Custom { a0, b0, perturb } => match key {
            "a0" => *a0 = value.to_string(),
            "b0" => *b0 = value.to_string(),
            "perturb" => *perturb = parse_f64(key, value)?,
            _ => return err(format!("unknown key [initial] {key} for custom")),
        },
    }
    Ok(())
}

/// Front-line validation: every numeric parameter is checked against the
/// module preconditions before any compute starts.
pub fn validate(cfg: &ScenarioConfig) -> ConfigResult<()> {
    if cfg.grid.n_points < 3 || cfg.grid.n_points % 2 == 0 {
        return err(format!(
            "grid n_points must be odd and >= 3, got {}",
            cfg.grid.n_points
        ));
    }
    if !(cfg.grid.half_width > 0.0) {
        return err("grid half_width must be positive");
    }
    if !(cfg.solver.t_end > 0.0) {
        return err("solver t_end must be positive");
    }
    if cfg.solver.threshold < 1e3 {
        return err("solver threshold must be >= 1e3");
    }
    if !(cfg.solver.dt_safety > 0.0 && cfg.solver.dt_safety < 1.0) {
        return err("solver dt_safety must lie in (0, 1)");
    }
    if cfg.solver.rate_fit_window < 8 {
        return err("solver rate_fit_window must be >= 8");
    }
    if cfg.solver.workers == 0 {
        return err("solver workers must be >= 1");
    }
    if cfg.rescaled.y_n_points < 17 || cfg.rescaled.y_n_points % 2 == 0 {
        return err("rescaled y_n_points must be odd and >= 17");
    }
    if cfg.rescaled.y_half_width < 10.0 {
        return err("rescaled y_half_width must be >= 10");
    }
    if !(cfg.rescaled.s_end > 0.0) {
        return err("rescaled s_end must be positive");
    }
    match &cfg.initial {
        InitialData::OdeConstant { .. } | InitialData::Remark33 { .. } => {}
        InitialData::Theorem11 {
            amplitude,
            level,
            bound_coef,
            ..
        } => {
            if !(*level > 0.0) {
                return err("theorem11 level must be positive");
            }
            if !(*amplitude < *bound_coef * *level) {
                return err(format!(
                    "theorem11 requires amplitude < bound_coef * level ({amplitude} vs {})",
                    bound_coef * level
                ));
            }
        }
        InitialData::Theorem12 { m, n, l, width, .. } => {
            if !(*m > *n && *n > 0.0) {
                return err(format!("theorem12 requires M > N > 0, got M = {m}, N = {n}"));
            }
            if !(*l > 0.0 && *width > 0.0) {
                return err("theorem12 requires L > 0 and width > 0");
            }
        }
        InitialData::ModeRates { mode, amplitude } => {
            if *mode > 2 {
                return err(format!("mode_rates mode must be 0, 1 or 2, got {mode}"));
            }
            if !(*amplitude > 0.0) {
                return err("mode_rates amplitude must be positive");
            }
        }
        InitialData::Custom { a0, b0, .. } => {
            parse_expression(a0).map_err(|e| ConfigError(format!("custom a0: {e}")))?;
            parse_expression(b0).map_err(|e| ConfigError(format!("custom b0: {e}")))?;
        }
    }
    if cfg.output.dir.is_empty() {
        return err("output dir must not be empty");
    }
    Ok(())
}

/// Canonical text form; `parse_text(to_text(cfg)) == cfg`.
pub fn to_text(cfg: &ScenarioConfig) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "[scenario]");
    let _ = writeln!(s, "name = {}", cfg.name);
    let _ = writeln!(s, "seed = {}", cfg.seed);
    let _ = writeln!(s, "\n[initial]");
    let _ = writeln!(s, "kind = {}", cfg.initial.kind());
    match &cfg.initial {
        InitialData::OdeConstant { a0, b0, perturb } => {
            let _ = writeln!(s, "a0 = {a0}");
            let _ = writeln!(s, "b0 = {b0}");
            let _ = writeln!(s, "perturb = {perturb}");
        }
        InitialData::Remark33 { perturb } => {
            let _ = writeln!(s, "perturb = {perturb}");
        }
        InitialData::Theorem11 {
            amplitude,
            level,
            bound_coef,
            perturb,
        } => {
            let _ = writeln!(s, "amplitude = {amplitude}");
            let _ = writeln!(s, "level = {level}");
            let _ = writeln!(s, "bound_coef = {bound_coef}");
            let _ = writeln!(s, "perturb = {perturb}");
        }
        InitialData::Theorem12 {
            m,
            n,
            l,
            width,
            perturb,
        } => {
            let _ = writeln!(s, "m = {m}");
            let _ = writeln!(s, "n = {n}");
            let _ = writeln!(s, "l = {l}");
            let _ = writeln!(s, "width = {width}");
            let _ = writeln!(s, "perturb = {perturb}");
        }
        InitialData::ModeRates { mode, amplitude } => {
            let _ = writeln!(s, "mode = {mode}");
            let _ = writeln!(s, "amplitude = {amplitude}");
        }
        InitialData::Custom { a0, b0, perturb } => {
            let _ = writeln!(s, "a0 = {a0}");
            let _ = writeln!(s, "b0 = {b0}");
            let _ = writeln!(s, "perturb = {perturb}");
        }
    }
    let _ = writeln!(s, "\n[grid]");
    let _ = writeln!(s, "n_points = {}", cfg.grid.n_points);
    let _ = writeln!(s, "half_width = {}", cfg.grid.half_width);
    let _ = writeln!(s, "\n[solver]");
    let _ = writeln!(s, "t_end = {}", cfg.solver.t_end);
    let _ = writeln!(s, "threshold = {}", cfg.solver.threshold);
    let _ = writeln!(s, "dt_safety = {}", cfg.solver.dt_safety);
    let _ = writeln!(s, "rate_fit_window = {}", cfg.solver.rate_fit_window);
    let _ = writeln!(s, "workers = {}", cfg.solver.workers);
    let _ = writeln!(s, "\n[analysis]");
    let _ = writeln!(s, "zeros = {}", cfg.analysis.zeros);
    let _ = writeln!(s, "quotient = {}", cfg.analysis.quotient);
    let _ = writeln!(s, "selfsimilar = {}", cfg.analysis.selfsimilar);
    let _ = writeln!(s, "modes = {}", cfg.analysis.modes);
    let _ = writeln!(s, "\n[rescaled]");
    let _ = writeln!(s, "y_n_points = {}", cfg.rescaled.y_n_points);
    let _ = writeln!(s, "y_half_width = {}", cfg.rescaled.y_half_width);
    let _ = writeln!(s, "s_end = {}", cfg.rescaled.s_end);
    let _ = writeln!(s, "delta_bar = {}", cfg.rescaled.delta_bar);
    let _ = writeln!(s, "r_bar = {}", cfg.rescaled.r_bar);
    let _ = writeln!(s, "eta_bar = {}", cfg.rescaled.eta_bar);
    let _ = writeln!(s, "zeta_bar = {}", cfg.rescaled.zeta_bar);
    let _ = writeln!(s, "eps_bar = {}", cfg.rescaled.eps_bar);
    let _ = writeln!(s, "eps1 = {}", cfg.rescaled.eps1);
    let _ = writeln!(s, "\n[output]");
    let _ = writeln!(s, "dir = {}", cfg.output.dir);
    s
}

/// A sum of products of `constant(c)`, `polynomial(c0, c1, ...)` and
/// `gaussian(amp, center, width)` factors; bare numbers are constants.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    terms: Vec<Vec<Factor>>,
}

#[derive(Debug, Clone, PartialEq)]
enum Factor {
    Constant(f64),
    Polynomial(Vec<f64>),
    Gaussian { amp: f64, center: f64, width: f64 },
}

impl Expression {
    pub fn eval(&self, x: f64) -> f64 {
        let mut sum = 0.0;
        for term in &self.terms {
            let mut prod = 1.0;
            for factor in term {
                prod *= match factor {
                    Factor::Constant(c) => *c,
                    Factor::Polynomial(coeffs) => {
                        let mut acc = 0.0;
                        for &c in coeffs.iter().rev() {
                            acc = acc * x + c;
                        }
                        acc
                    }
                    Factor::Gaussian { amp, center, width } => {
                        let u = (x - center) / width;
                        amp * (-u * u).exp()
                    }
                };
            }
            sum += prod;
        }
        sum
    }
}

/// Splits at top level (outside parentheses) on any of the given separators,
/// returning the pieces and the separator preceding each piece after the
/// first.
fn split_top_level(text: &str, seps: &[char]) -> Vec<(char, String)> {
    let mut depth = 0usize;
    let mut pieces = Vec::new();
    let mut current = String::new();
    let mut lead = '+';
    let mut prev_significant = ' ';
    for ch in text.chars() {
        // a '-' right after an exponent marker belongs to a number literal
        let exponent_minus = ch == '-' && matches!(prev_significant, 'e' | 'E');
        match ch {
            '(' => {
                depth += 1;
                current.push(ch);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                current.push(ch);
            }
            c if depth == 0
                && seps.contains(&c)
                && !exponent_minus
                && !current.trim().is_empty() =>
            {
                pieces.push((lead, current.clone()));
                current.clear();
                lead = c;
            }
            c if depth == 0
                && seps.contains(&c)
                && current.trim().is_empty()
                && c == '-' =>
            {
                // unary minus at the start of a term
                current.push(c);
            }
            _ => current.push(ch),
        }
        if !ch.is_whitespace() {
            prev_significant = ch;
        }
    }
    if !current.trim().is_empty() {
        pieces.push((lead, current));
    }
    pieces
}

pub fn parse_expression(text: &str) -> Result<Expression, String> {
    if text.trim().is_empty() {
        return Err("empty expression".into());
    }
    let mut terms = Vec::new();
    for (sign, term_text) in split_top_level(text, &['+', '-']) {
        let mut factors = Vec::new();
        let mut term_text = term_text.trim().to_string();
        if sign == '-' {
            factors.push(Factor::Constant(-1.0));
        }
        // unary minus kept by the splitter, e.g. "-gaussian(...)"
        if let Some(rest) = term_text.strip_prefix('-') {
            if rest.trim().parse::<f64>().is_err() {
                factors.push(Factor::Constant(-1.0));
                term_text = rest.trim().to_string();
            }
        }
        let parts = split_top_level(&term_text, &['*']);
        if parts.is_empty() {
            return Err(format!("empty term in '{text}'"));
        }
        for (_, factor_text) in parts {
            factors.push(parse_factor(factor_text.trim())?);
        }
        terms.push(factors);
    }
    if terms.is_empty() {
        return Err(format!("no terms in '{text}'"));
    }
    Ok(Expression { terms })
}

fn parse_factor(text: &str) -> Result<Factor, String> {
    let text = text.trim();
    if let Ok(v) = text.parse::<f64>() {
        return Ok(Factor::Constant(v));
    }
    let open = text
        .find('(')
        .ok_or_else(|| format!("expected a number or name(args), got '{text}'"))?;
    if !text.ends_with(')') {
        return Err(format!("unbalanced parentheses in '{text}'"));
    }
    let name = text[..open].trim();
    let args: Vec<f64> = {
        let inner = &text[open + 1..text.len() - 1];
        let mut out = Vec::new();
        for piece in inner.split(',') {
            let piece = piece.trim();
            if piece.is_empty() {
                continue;
            }
            out.push(
                piece
                    .parse::<f64>()
                    .map_err(|_| format!("bad numeric argument '{piece}' in '{text}'"))?,
            );
        }
        out
    };
    match name {
        "constant" => {
            if args.len() != 1 {
                return Err(format!("constant takes one argument, got {}", args.len()));
            }
            Ok(Factor::Constant(args[0]))
        }
        "polynomial" => {
            if args.is_empty() {
                return Err("polynomial needs at least one coefficient".into());
            }
            Ok(Factor::Polynomial(args))
        }
        "gaussian" => {
            if args.len() != 3 {
                return Err(format!(
                    "gaussian takes (amp, center, width), got {} arguments",
                    args.len()
                ));
            }
            if args[2] == 0.0 {
                return Err("gaussian width must be nonzero".into());
            }
            Ok(Factor::Gaussian {
                amp: args[0],
                center: args[1],
                width: args[2],
            })
        }
        other => Err(format!("unknown primitive '{other}'")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_text() {
        for name in scenario_names() {
            let cfg = default_config(name).unwrap();
            let text = to_text(&cfg);
            let back = parse_text(&text).unwrap();
            assert_eq!(cfg, back, "round trip failed for {name}");
        }
    }

    #[test]
    fn overrides_and_comments() {
        let text = "\
# comment
[scenario]
name = remark33
seed = 7

[grid]
n_points = 801   # inline comment
half_width = 6

[solver]
workers = 4
";
        let cfg = parse_text(text).unwrap();
        assert_eq!(cfg.name, "remark33");
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.grid.n_points, 801);
        assert_eq!(cfg.grid.half_width, 6.0);
        assert_eq!(cfg.solver.workers, 4);
        // untouched defaults stay
        assert_eq!(cfg.solver.threshold, 1e8);
    }

    #[test]
    fn kind_switch_resets_parameters() {
        let text = "\
[scenario]
name = remark33

[initial]
kind = ode_constant
a0 = 3
";
        let cfg = parse_text(text).unwrap();
        assert_eq!(
            cfg.initial,
            InitialData::OdeConstant {
                a0: 3.0,
                b0: 0.0,
                perturb: 0.0
            }
        );
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(parse_text("[scenario]\nname = remark33\n[grid]\nwut = 3\n").is_err());
        assert!(parse_text("[scenario]\nname = nope\n").is_err());
        assert!(parse_text("[scenario]\nname = remark33\n[grid]\nn_points = owl\n").is_err());
        assert!(parse_text("name = remark33\n").is_err());
    }

    #[test]
    fn validation_catches_module_preconditions() {
        let mut cfg = default_config("remark33").unwrap();
        cfg.grid.n_points = 1000;
        assert!(validate(&cfg).is_err());
        let mut cfg = default_config("remark33").unwrap();
        cfg.solver.threshold = 10.0;
        assert!(validate(&cfg).is_err());
        let mut cfg = default_config("theorem12").unwrap();
        cfg.initial = InitialData::Theorem12 {
            m: 1.0,
            n: 2.0,
            l: 3.0,
            width: 1.0,
            perturb: 0.0,
        };
        assert!(validate(&cfg).is_err());
        let mut cfg = default_config("mode_rates").unwrap();
        cfg.initial = InitialData::ModeRates {
            mode: 5,
            amplitude: 1e-6,
        };
        assert!(validate(&cfg).is_err());
    }

    #[test]
    fn expressions_evaluate() {
        let e = parse_expression("gaussian(3, 0, 1)").unwrap();
        assert!((e.eval(0.0) - 3.0).abs() < 1e-15);
        assert!((e.eval(1.0) - 3.0 * (-1.0f64).exp()).abs() < 1e-15);

        // the odd-imaginary family written in primitives
        let e = parse_expression("polynomial(3, 0, -4) * gaussian(1, 0, 1)").unwrap();
        let f = |x: f64| (3.0 - 4.0 * x * x) * (-x * x).exp();
        for x in [-2.0, -0.3, 0.0, 0.7, 1.9] {
            assert!((e.eval(x) - f(x)).abs() < 1e-14);
        }

        let e = parse_expression("constant(2) + polynomial(0, 1) * gaussian(1, 0, 2) - 0.5")
            .unwrap();
        let f = |x: f64| 2.0 + x * (-(x / 2.0) * (x / 2.0)).exp() - 0.5;
        for x in [-1.0, 0.0, 2.5] {
            assert!((e.eval(x) - f(x)).abs() < 1e-14, "at {x}");
        }

        // unary minus and exponent literals at top level
        let e = parse_expression("-gaussian(2, 0, 1) + 1e-5").unwrap();
        assert!((e.eval(0.0) - (-2.0 + 1e-5)).abs() < 1e-15);

        assert!(parse_expression("").is_err());
        assert!(parse_expression("fourier(1)").is_err());
        assert!(parse_expression("gaussian(1, 0)").is_err());
        assert!(parse_expression("gaussian(1, 0, 0)").is_err());
    }

    #[test]
    fn config_survives_json_round_trip() {
        let cfg = default_config("theorem11").unwrap();
        let json = serde_json::to_string(&cfg).unwrap();
        let back: ScenarioConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(cfg, back);
    }
}
