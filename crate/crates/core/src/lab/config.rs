//! Experiment configuration: a single JSON document, validated in full so
//! that every problem is reported at once.

use crate::bound_core::BoundKind;
use crate::dist::Distribution;
use crate::models::example41::EPSILON_MAX;
use crate::models::lstat::Weight;
use crate::models::multisample::MultiKernel;
use crate::models::ustat::Kernel;
use crate::models::{ModelDescriptor, VariantMode};
use serde_json::{Map, Value};
use std::fmt;
use std::path::PathBuf;

/// Minimum replicate count of a verification run.
pub const MIN_VERIFY_REPLICATES: usize = 1000;
pub const DEFAULT_REPLICATES: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConfigErrors(pub Vec<Violation>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.0 {
            writeln!(f, "  {}: {}", v.path, v.message)?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Command {
    Bound,
    Verify,
    Example41,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Bound => "bound",
            Self::Verify => "verify",
            Self::Example41 => "example41",
            Self::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(Self::Csv),
            "json" => Some(Self::Json),
            _ => None,
        }
    }
}

/// Construction of δ for the general bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DeltaMethod {
    #[default]
    Minimal,
    Truncation,
    PMoment,
}

impl DeltaMethod {
    pub const CATALOG: [&'static str; 3] = ["minimal", "truncation", "p_moment"];

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "minimal" => Some(Self::Minimal),
            "truncation" => Some(Self::Truncation),
            "p_moment" => Some(Self::PMoment),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    pub replicates: usize,
    pub seed: u64,
    /// `0` lets the runtime choose.
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputConfig {
    /// `None` writes to standard output.
    pub path: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    N,
    Z,
    Epsilon,
    Replicates,
}

impl SweepAxis {
    pub const CATALOG: [&'static str; 4] = ["n", "z", "epsilon", "replicates"];

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "n" => Some(Self::N),
            "z" => Some(Self::Z),
            "epsilon" => Some(Self::Epsilon),
            "replicates" => Some(Self::Replicates),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        Self::CATALOG[self as usize]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    /// Run `verify` rather than `bound` at each point.
    pub verify: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: Option<ModelDescriptor>,
    pub bounds: Vec<BoundKind>,
    pub z_grid: Vec<f64>,
    pub p: f64,
    pub delta: DeltaMethod,
    pub variant: VariantMode,
    pub mc: McConfig,
    pub output: OutputConfig,
    pub epsilons: Vec<f64>,
    pub sweep: Option<SweepConfig>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub replicates: Option<usize>,
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
}

const TOP_KEYS: [&str; 10] = ["model", "bounds", "z_grid", "p", "delta", "variant", "mc", "output", "example41", "sweep"];

/// Parse without overrides, validating for `command`.
pub fn parse_config(text: &str, command: Command) -> Result<ExperimentConfig, ConfigErrors> {
    parse_config_with(text, command, &Overrides::default())
}

pub fn parse_config_with(text: &str, command: Command, ov: &Overrides) -> Result<ExperimentConfig, ConfigErrors> {
    let root: Value = serde_json::from_str(text).map_err(|e| {
        ConfigErrors(vec![Violation { path: "$".into(), message: format!("malformed JSON: {e}") }])
    })?;
    let mut p = Parser::default();
    let Some(obj) = root.as_object() else {
        p.err("$", "expected a JSON object");
        return Err(ConfigErrors(p.errs));
    };
    p.unknown_keys(obj, "", &TOP_KEYS);

    let model = match obj.get("model") {
        Some(v) => p.model(v),
        None => {
            if command != Command::Example41 {
                p.err("model", "required");
            }
            None
        }
    };
    let bounds = p.bounds(obj.get("bounds"), model.as_ref(), command);
    let z_grid = match obj.get("z_grid") {
        Some(v) => p.real_list(v, "z_grid", |_| None).unwrap_or_default(),
        None => vec![0.0],
    };
    if z_grid.is_empty() && bounds.iter().any(|b| b.is_pointwise()) {
        p.err("z_grid", "must be nonempty when a pointwise bound is selected");
    }
    let pm = obj.get("p").map_or(Some(3.0), |v| p.real(v, "p")).unwrap_or(3.0);
    if !(pm > 2.0 && pm <= 3.0) {
        p.err("p", format!("moment order must lie in (2, 3], got {pm}"));
    }
    let delta = p.named(obj.get("delta"), "delta", &DeltaMethod::CATALOG, DeltaMethod::from_name).unwrap_or_default();
    let variant = p
        .named(obj.get("variant"), "variant", &["zero_out", "resample"], |s| match s {
            "zero_out" => Some(VariantMode::ZeroOut),
            "resample" => Some(VariantMode::Resample),
            _ => None,
        })
        .unwrap_or(VariantMode::ZeroOut);
    let mc = p.mc(obj.get("mc"), ov, command);
    let output = p.output(obj.get("output"), ov);
    let epsilons = p.example41(obj.get("example41"), command);
    let sweep = p.sweep(obj.get("sweep"), model.as_ref(), command);

    if p.errs.is_empty() {
        Ok(ExperimentConfig {
            model,
            bounds,
            z_grid,
            p: pm,
            delta,
            variant,
            mc: mc.expect("validated"),
            output,
            epsilons,
            sweep,
        })
    } else {
        Err(ConfigErrors(p.errs))
    }
}

/// Parse and validate a standalone model descriptor, the `model` block of a
/// configuration.
pub fn parse_model(text: &str) -> Result<ModelDescriptor, ConfigErrors> {
    let v: Value = serde_json::from_str(text).map_err(|e| {
        ConfigErrors(vec![Violation { path: "$".into(), message: format!("malformed JSON: {e}") }])
    })?;
    let mut p = Parser::default();
    match p.model(&v) {
        Some(d) if p.errs.is_empty() => Ok(d),
        _ => Err(ConfigErrors(p.errs)),
    }
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

#[derive(Default)]
struct Parser {
    errs: Vec<Violation>,
}

impl Parser {
    fn err(&mut self, path: &str, message: impl Into<String>) {
        self.errs.push(Violation { path: path.to_string(), message: message.into() });
    }

    fn unknown_keys(&mut self, obj: &Map<String, Value>, prefix: &str, allowed: &[&str]) {
        for k in obj.keys() {
            if !allowed.contains(&k.as_str()) {
                self.err(&join(prefix, k), format!("unknown field; expected one of: {}", allowed.join(", ")));
            }
        }
    }

    fn real(&mut self, v: &Value, path: &str) -> Option<f64> {
        match v.as_f64() {
            Some(x) if x.is_finite() => Some(x),
            _ => {
                self.err(path, format!("expected a finite number, got {v}"));
                None
            }
        }
    }

    fn count(&mut self, v: &Value, path: &str) -> Option<usize> {
        match v.as_u64().and_then(|x| usize::try_from(x).ok()) {
            Some(x) => Some(x),
            None => {
                self.err(path, format!("expected a nonnegative integer, got {v}"));
                None
            }
        }
    }

    fn string<'v>(&mut self, v: &'v Value, path: &str) -> Option<&'v str> {
        let s = v.as_str();
        if s.is_none() {
            self.err(path, format!("expected a string, got {v}"));
        }
        s
    }

    fn named<T>(&mut self, v: Option<&Value>, path: &str, catalog: &[&str], f: impl Fn(&str) -> Option<T>) -> Option<T> {
        let s = self.string(v?, path)?;
        let out = f(s);
        if out.is_none() {
            self.err(path, format!("unknown value \"{s}\"; available: {}", catalog.join(", ")));
        }
        out
    }

    /// Array of finite numbers, each checked by `check`.
    fn real_list(&mut self, v: &Value, path: &str, check: impl Fn(f64) -> Option<String>) -> Option<Vec<f64>> {
        let Some(arr) = v.as_array() else {
            self.err(path, "expected an array of numbers");
            return None;
        };
        let mut ok = true;
        let mut out = Vec::with_capacity(arr.len());
        for (i, x) in arr.iter().enumerate() {
            let ip = format!("{path}[{i}]");
            match self.real(x, &ip) {
                Some(x) => {
                    if let Some(msg) = check(x) {
                        self.err(&ip, msg);
                        ok = false;
                    }
                    out.push(x);
                }
                None => ok = false,
            }
        }
        ok.then_some(out)
    }

    fn model(&mut self, v: &Value) -> Option<ModelDescriptor> {
        let Some(obj) = v.as_object() else {
            self.err("model", "expected an object");
            return None;
        };
        let kind = self.named(obj.get("kind").or(Some(&Value::Null)), "model.kind", &ModelDescriptor::KINDS, |s| {
            ModelDescriptor::KINDS.contains(&s).then(|| s.to_string())
        })?;
        let allowed: &[&str] = match kind.as_str() {
            "linear" => &["kind", "distribution", "n"],
            "ustat" => &["kind", "kernel", "distribution", "n", "m"],
            "multisample" => &["kind", "kernel", "distribution", "sizes", "m"],
            "lstat" => &["kind", "weight", "distribution", "n"],
            _ => &["kind", "epsilon", "n"],
        };
        self.unknown_keys(obj, "model", allowed);
        let before = self.errs.len();
        let dist = |p: &mut Self| {
            p.named(obj.get("distribution").or(Some(&Value::Null)), "model.distribution", &Distribution::CATALOG, Distribution::from_name)
        };
        let n = |p: &mut Self| match obj.get("n") {
            Some(v) => p.count(v, "model.n"),
            None => {
                p.err("model.n", "required");
                None
            }
        };
        let name = |p: &mut Self, key: &str, catalog: &[&str]| {
            let path = format!("model.{key}");
            p.named(obj.get(key).or(Some(&Value::Null)), &path, catalog, |s| catalog.contains(&s).then(|| s.to_string()))
        };
        let d = match kind.as_str() {
            "linear" => {
                let (distribution, n) = (dist(self), n(self));
                Some(ModelDescriptor::Linear { distribution: distribution?, n: n? })
            }
            "ustat" => {
                let (kernel, distribution, n) = (name(self, "kernel", &Kernel::CATALOG), dist(self), n(self));
                let kernel = kernel?;
                if let (Some(m), Some(k)) = (obj.get("m"), Kernel::from_name(&kernel)) {
                    if let Some(m) = self.count(m, "model.m") {
                        if m != k.arity() {
                            self.err("model.m", format!("kernel \"{kernel}\" has arity {}, got {m}", k.arity()));
                        }
                    }
                }
                Some(ModelDescriptor::Ustat { kernel, distribution: distribution?, n: n? })
            }
            "multisample" => {
                let (kernel, distribution) = (name(self, "kernel", &MultiKernel::CATALOG), dist(self));
                let sizes = match obj.get("sizes").and_then(Value::as_array) {
                    Some(arr) => {
                        let s: Vec<Option<usize>> =
                            arr.iter().enumerate().map(|(i, x)| self.count(x, &format!("model.sizes[{i}]"))).collect();
                        s.into_iter().collect::<Option<Vec<_>>>()
                    }
                    None => {
                        self.err("model.sizes", "required array of group sizes");
                        None
                    }
                };
                if obj.contains_key("m") {
                    self.err("model.m", "arities are fixed by the kernel");
                }
                Some(ModelDescriptor::Multisample { kernel: kernel?, distribution: distribution?, sizes: sizes? })
            }
            "lstat" => {
                let (weight, distribution, n) = (name(self, "weight", &Weight::CATALOG), dist(self), n(self));
                Some(ModelDescriptor::Lstat { weight: weight?, distribution: distribution?, n: n? })
            }
            _ => {
                let epsilon = match obj.get("epsilon") {
                    Some(v) => self.real(v, "model.epsilon"),
                    None => {
                        self.err("model.epsilon", "required");
                        None
                    }
                };
                let n = obj.get("n").and_then(|v| self.real(v, "model.n"));
                Some(ModelDescriptor::Example41 { epsilon: epsilon?, n })
            }
        }?;
        if self.errs.len() > before {
            return None;
        }
        // Parameter constraints are enforced by the constructors.
        if let Err(e) = d.build() {
            self.err("model", e.to_string());
            return None;
        }
        Some(d)
    }

    fn bounds(&mut self, v: Option<&Value>, model: Option<&ModelDescriptor>, command: Command) -> Vec<BoundKind> {
        let needed = matches!(command, Command::Bound | Command::Verify | Command::Sweep);
        let Some(v) = v else {
            if needed {
                self.err("bounds", "required list of bound tags");
            }
            return Vec::new();
        };
        let Some(arr) = v.as_array() else {
            self.err("bounds", "expected an array of bound tags");
            return Vec::new();
        };
        if arr.is_empty() && needed {
            self.err("bounds", "must list at least one bound");
        }
        let mut out = Vec::new();
        for (i, x) in arr.iter().enumerate() {
            let path = format!("bounds[{i}]");
            let Some(s) = self.string(x, &path) else { continue };
            let Some(kind) = BoundKind::from_tag(s) else {
                self.err(&path, format!("unknown bound \"{s}\"; available: {}", BoundKind::catalog().join(", ")));
                continue;
            };
            if let Some(m) = model {
                if let Some(need) = required_kind(kind) {
                    if m.kind() != need {
                        self.err(&path, format!("{s} applies to {need} models, not {}", m.kind()));
                        continue;
                    }
                }
            }
            if out.contains(&kind) {
                self.err(&path, format!("{s} listed twice"));
                continue;
            }
            out.push(kind);
        }
        out
    }

    fn mc(&mut self, v: Option<&Value>, ov: &Overrides, command: Command) -> Option<McConfig> {
        let empty = Map::new();
        let obj = match v {
            Some(Value::Object(o)) => o,
            Some(_) => {
                self.err("mc", "expected an object");
                &empty
            }
            None => &empty,
        };
        self.unknown_keys(obj, "mc", &["replicates", "seed", "threads"]);
        let replicates = match (ov.replicates, obj.get("replicates")) {
            (Some(r), _) => Some(r),
            (None, Some(v)) => self.count(v, "mc.replicates"),
            (None, None) => Some(DEFAULT_REPLICATES),
        };
        if let Some(r) = replicates {
            let verifying = command == Command::Verify;
            if r == 0 {
                self.err("mc.replicates", "must be positive");
            } else if verifying && r < MIN_VERIFY_REPLICATES {
                self.err("mc.replicates", format!("verification needs at least {MIN_VERIFY_REPLICATES} replicates, got {r}"));
            }
        }
        let seed = match (ov.seed, obj.get("seed")) {
            (Some(s), _) => Some(s),
            (None, Some(v)) => match v.as_u64() {
                Some(s) => Some(s),
                None => {
                    self.err("mc.seed", format!("expected an unsigned 64-bit integer, got {v}"));
                    None
                }
            },
            (None, None) => {
                self.err("mc.seed", "required: runs are seeded explicitly");
                None
            }
        };
        let threads = match (ov.threads, obj.get("threads")) {
            (Some(t), _) => Some(t),
            (None, Some(v)) => self.count(v, "mc.threads"),
            (None, None) => Some(0),
        };
        Some(McConfig { replicates: replicates?, seed: seed?, threads: threads? })
    }

    fn output(&mut self, v: Option<&Value>, ov: &Overrides) -> OutputConfig {
        let mut out = OutputConfig::default();
        if let Some(v) = v {
            match v.as_object() {
                Some(obj) => {
                    self.unknown_keys(obj, "output", &["path", "format"]);
                    if let Some(p) = obj.get("path") {
                        out.path = self.string(p, "output.path").map(PathBuf::from);
                    }
                    if let Some(f) = self.named(obj.get("format"), "output.format", &["csv", "json"], Format::from_name) {
                        out.format = f;
                    }
                }
                None => self.err("output", "expected an object"),
            }
        }
        if let Some(p) = &ov.output {
            out.path = Some(p.clone());
        }
        if let Some(f) = ov.format {
            out.format = f;
        }
        out
    }

    fn example41(&mut self, v: Option<&Value>, command: Command) -> Vec<f64> {
        let Some(v) = v else {
            if command == Command::Example41 {
                self.err("example41.epsilons", "required");
            }
            return Vec::new();
        };
        let Some(obj) = v.as_object() else {
            self.err("example41", "expected an object");
            return Vec::new();
        };
        self.unknown_keys(obj, "example41", &["epsilons"]);
        let Some(list) = obj.get("epsilons") else {
            self.err("example41.epsilons", "required");
            return Vec::new();
        };
        let empty = list.as_array().is_some_and(Vec::is_empty);
        let eps = self.real_list(list, "example41.epsilons", epsilon_check).unwrap_or_default();
        if empty && command == Command::Example41 {
            self.err("example41.epsilons", "must be nonempty");
        }
        eps
    }

    fn sweep(&mut self, v: Option<&Value>, model: Option<&ModelDescriptor>, command: Command) -> Option<SweepConfig> {
        let Some(v) = v else {
            if command == Command::Sweep {
                self.err("sweep", "required for the sweep command");
            }
            return None;
        };
        let Some(obj) = v.as_object() else {
            self.err("sweep", "expected an object");
            return None;
        };
        self.unknown_keys(obj, "sweep", &["axis", "values", "command"]);
        let axis = self.named(obj.get("axis").or(Some(&Value::Null)), "sweep.axis", &SweepAxis::CATALOG, SweepAxis::from_name);
        let verify = self
            .named(obj.get("command"), "sweep.command", &["bound", "verify"], |s| match s {
                "bound" => Some(false),
                "verify" => Some(true),
                _ => None,
            })
            .unwrap_or(false);
        let values = match obj.get("values") {
            Some(v) => {
                let check = |x: f64| -> Option<String> {
                    match axis? {
                        SweepAxis::N | SweepAxis::Replicates if !(x >= 1.0 && x.fract() == 0.0) => {
                            Some(format!("expected a positive integer, got {x}"))
                        }
                        SweepAxis::Epsilon => epsilon_check(x),
                        _ => None,
                    }
                };
                self.real_list(v, "sweep.values", check)
            }
            None => {
                self.err("sweep.values", "required");
                None
            }
        };
        if values.as_ref().is_some_and(Vec::is_empty) {
            self.err("sweep.values", "must be nonempty");
        }
        if axis == Some(SweepAxis::Epsilon) && model.is_some_and(|m| m.kind() != "example41") {
            self.err("sweep.axis", "the epsilon axis applies to example41 models only");
        }
        if verify && axis == Some(SweepAxis::Replicates) {
            if let Some(vals) = &values {
                for (i, &r) in vals.iter().enumerate() {
                    if r < MIN_VERIFY_REPLICATES as f64 {
                        self.err(&format!("sweep.values[{i}]"), format!("verification needs at least {MIN_VERIFY_REPLICATES} replicates"));
                    }
                }
            }
        }
        Some(SweepConfig { axis: axis?, values: values?, verify })
    }
}

fn epsilon_check(x: f64) -> Option<String> {
    (!(x > 0.0 && x < EPSILON_MAX)).then(|| format!("epsilon must lie in (0, 1/64), got {x}"))
}

/// Model kind a bound is tied to; `None` for the general bounds.
pub fn required_kind(kind: BoundKind) -> Option<&'static str> {
    use BoundKind::*;
    match kind {
        UStatUniform | UStatNormal | UStatNonUniform | UStatNonUniformKernelMoment | UStatNonUniformRecombined => {
            Some("ustat")
        }
        MultiUniform | MultiNonUniform => Some("multisample"),
        LStatUniform | LStatNonUniform => Some("lstat"),
        CounterexampleFloor | ComponentCap | ShorackRhs | BgBracket => Some("example41"),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "model": {"kind": "ustat", "kernel": "variance", "distribution": "std_normal", "n": 50},
        "bounds": ["eq2.5"],
        "mc": {"seed": 42}
    }"#;

    fn paths(e: &ConfigErrors) -> Vec<&str> {
        e.0.iter().map(|v| v.path.as_str()).collect()
    }

    #[test]
    fn minimal_config_parses() {
        let c = parse_config(MINIMAL, Command::Bound).unwrap();
        assert_eq!(c.bounds, vec![BoundKind::UniformNormal]);
        assert_eq!(c.mc, McConfig { replicates: DEFAULT_REPLICATES, seed: 42, threads: 0 });
        assert_eq!(c.z_grid, vec![0.0]);
        assert_eq!(c.output.format, Format::Csv);
    }

    #[test]
    fn unknown_kernel_names_field_and_catalog() {
        let text = MINIMAL.replace("variance", "kendall");
        let e = parse_config(&text, Command::Bound).unwrap_err();
        assert_eq!(paths(&e), ["model.kernel"]);
        assert!(e.0[0].message.contains("variance, sum, product"));
    }

    #[test]
    fn missing_seed_is_rejected() {
        let text = MINIMAL.replace(r#""seed": 42"#, r#""threads": 2"#);
        let e = parse_config(&text, Command::Bound).unwrap_err();
        assert_eq!(paths(&e), ["mc.seed"]);
        let ov = Overrides { seed: Some(7), ..Default::default() };
        assert_eq!(parse_config_with(&text, Command::Bound, &ov).unwrap().mc.seed, 7);
    }

    #[test]
    fn all_violations_are_collected() {
        let text = r#"{
            "model": {"kind": "ustat", "kernel": "variance", "distribution": "cauchy", "n": "fifty"},
            "bounds": ["eq2.5", "eq9.9", "eq3.7"],
            "p": 4,
            "mc": {"seed": -1, "replicates": 10},
            "colour": 1
        }"#;
        let e = parse_config(text, Command::Verify).unwrap_err();
        let mut got = paths(&e);
        got.sort();
        assert_eq!(
            got,
            ["bounds[1]", "colour", "mc.replicates", "mc.seed", "model.distribution", "model.n", "p"]
        );
    }

    #[test]
    fn tags_must_match_model_kind() {
        let text = MINIMAL.replace(r#"["eq2.5"]"#, r#"["eq3.1", "eq3.10"]"#);
        let e = parse_config(&text, Command::Bound).unwrap_err();
        assert_eq!(paths(&e), ["bounds[1]"]);
    }

    #[test]
    fn constructor_errors_surface_under_model() {
        let text = MINIMAL.replace(r#""n": 50"#, r#""n": 2"#);
        let e = parse_config(&text, Command::Bound).unwrap_err();
        assert_eq!(paths(&e), ["model"]);
    }

    #[test]
    fn example41_epsilons_are_range_checked() {
        let text = r#"{"example41": {"epsilons": [0.001, 0.03125]}, "mc": {"seed": 1}}"#;
        let e = parse_config(text, Command::Example41).unwrap_err();
        assert_eq!(paths(&e), ["example41.epsilons[1]"]);
        let ok = r#"{"example41": {"epsilons": [0.001, 0.0001]}, "mc": {"seed": 1}}"#;
        assert_eq!(parse_config(ok, Command::Example41).unwrap().epsilons.len(), 2);
    }

    #[test]
    fn sweep_block_is_validated() {
        let text = MINIMAL.replace(r#""mc""#, r#""sweep": {"axis": "epsilon", "values": [50.5]}, "mc""#);
        let e = parse_config(&text, Command::Sweep).unwrap_err();
        assert_eq!(paths(&e), ["sweep.values[0]", "sweep.axis"]);
        let text = MINIMAL.replace(r#""mc""#, r#""sweep": {"axis": "n", "values": [50, 100]}, "mc""#);
        let c = parse_config(&text, Command::Sweep).unwrap();
        assert_eq!(c.sweep.unwrap().values, vec![50.0, 100.0]);
    }

    #[test]
    fn malformed_json_is_a_single_violation() {
        let e = parse_config("{", Command::Bound).unwrap_err();
        assert_eq!(paths(&e), ["$"]);
    }
}
