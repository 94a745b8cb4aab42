//! Config-driven experiment runs and the artifact bundle they write.
//!
//! A config is a JSON object:
//!
//! ```json
//! {
//!   "backend": { "kind": "z", "multipliers": [3, 3, 3] },
//!   "depth": 3,
//!   "r": 2,
//!   "variant": "multi_symbol",
//!   "windows": [],
//!   "checks": [],
//!   "output_dir": "out",
//!   "seed": 0,
//!   "tower_mode": "greedy"
//! }
//! ```
//!
//! Only `backend` and `depth` are required. Empty `windows` means W = m for
//! every partition row; empty `checks` runs every lemma check.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::group::{BackendSpec, QuotientChain};
use crate::measures::{an_matrix, limit_vectors, partition_masses, relabeled_masses, symbol_masses};
use crate::scalar::{decimal_string, fraction_string, parse_fraction, Fraction};
use crate::toeplitz::{density_sequence, regularity_report, FamilyVariant, ToeplitzFamily};
use crate::tower::{DomainTower, TowerMode, TowerOptions};
use crate::verify::{default_grid, run_suite, z_mass_trend, CheckSpec, DEFAULT_ORBIT_LIMIT};
use crate::Rational;

fn default_r() -> u32 {
    2
}

fn default_variant() -> FamilyVariant {
    FamilyVariant::MultiSymbol
}

fn default_orbit_limit() -> u64 {
    DEFAULT_ORBIT_LIMIT
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub backend: BackendSpec,
    pub depth: usize,
    #[serde(default = "default_r")]
    pub r: u32,
    #[serde(default = "default_variant")]
    pub variant: FamilyVariant,
    /// Window levels W for the partition tables.
    #[serde(default)]
    pub windows: Vec<usize>,
    /// Lemma checks to run; empty runs all of them.
    #[serde(default)]
    pub checks: Vec<String>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Reserved. Every choice in a run is by enumeration order.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tower_mode: TowerMode,
    /// Greedy search radius cap; backend default when absent.
    #[serde(default)]
    pub max_radius: Option<u32>,
    /// Orbit scans over more points than this are skipped.
    #[serde(default = "default_orbit_limit")]
    pub orbit_limit: u64,
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::InvalidConfig {
        field: field.into(),
        reason: reason.into(),
    }
}

impl ExperimentConfig {
    pub fn new(backend: BackendSpec, depth: usize) -> ExperimentConfig {
        ExperimentConfig {
            backend,
            depth,
            r: default_r(),
            variant: default_variant(),
            windows: Vec::new(),
            checks: Vec::new(),
            output_dir: None,
            seed: 0,
            tower_mode: TowerMode::default(),
            max_radius: None,
            orbit_limit: DEFAULT_ORBIT_LIMIT,
        }
    }

    /// Parses and validates.
    pub fn from_json(text: &str) -> Result<ExperimentConfig> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| invalid("<config>", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// The backend cut to `depth` levels, as used by every build.
    pub fn effective_backend(&self) -> BackendSpec {
        self.backend.truncated(self.depth)
    }

    /// Checks every field and names the first offending one.
    pub fn validate(&self) -> Result<()> {
        if self.depth < 2 {
            return Err(invalid("depth", format!("depth must be at least 2, got {}", self.depth)));
        }
        let levels = self.backend.depth();
        if levels < self.depth {
            return Err(invalid(
                "depth",
                format!("backend schedule has {levels} levels, fewer than depth {}", self.depth),
            ));
        }
        QuotientChain::new(self.backend.clone())?;
        if self.r == 0 {
            return Err(invalid("r", "alphabet size must be at least 1"));
        }
        for (k, &w) in self.windows.iter().enumerate() {
            if w == 0 || w > self.depth {
                return Err(invalid(format!("windows[{k}]"), format!("window {w} must lie in 1..={}", self.depth)));
            }
        }
        for (k, name) in self.checks.iter().enumerate() {
            if !CheckSpec::NAMES.contains(&name.as_str()) {
                return Err(invalid(
                    format!("checks[{k}]"),
                    format!("unknown check '{name}', expected one of {}", CheckSpec::NAMES.join(", ")),
                ));
            }
        }
        if !self.checks.is_empty() && self.variant == FamilyVariant::RegularBinary {
            return Err(invalid("checks", "lemma checks apply to the multi-symbol family"));
        }
        if self.orbit_limit == 0 {
            return Err(invalid("orbit_limit", "must be positive"));
        }
        Ok(())
    }

    pub fn tower_options(&self) -> TowerOptions {
        TowerOptions {
            mode: self.tower_mode,
            max_radius: self.max_radius,
        }
    }

    pub fn build_tower(&self) -> Result<DomainTower> {
        self.validate()?;
        let chain = QuotientChain::new(self.effective_backend())?;
        DomainTower::build(&chain, self.depth, &self.tower_options())
    }

    pub fn build_family(&self) -> Result<ToeplitzFamily> {
        let tower = Arc::new(self.build_tower()?);
        ToeplitzFamily::build(tower, self.variant, self.r)
    }

    /// Window levels for partition rows at orbit level m: the configured
    /// windows in (n, m], or W = m when none are configured.
    fn windows_for(&self, n: usize, m: usize) -> Vec<usize> {
        if self.windows.is_empty() {
            return vec![m];
        }
        let mut w: Vec<usize> = self.windows.iter().copied().filter(|&w| w > n && w <= m).collect();
        w.sort_unstable();
        w.dedup();
        w
    }
}

/// Files written by [`run`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bundle {
    pub dir: PathBuf,
    pub files: Vec<String>,
    pub checks_passed: bool,
}

pub const TOWER_FILE: &str = "tower.json";
pub const JSETS_FILE: &str = "jsets.json";
pub const DENSITY_FILE: &str = "density.csv";
pub const MEASURES_FILE: &str = "measures.csv";
pub const SIMPLEX_FILE: &str = "simplex.json";
pub const VERIFY_FILE: &str = "verify.json";
pub const ZMASS_FILE: &str = "zmass.csv";

fn frac(x: &Rational) -> String {
    fraction_string(x)
}

fn density_csv(family: &ToeplitzFamily) -> Result<String> {
    let rows = density_sequence::<Rational>(family)?;
    let mut out = String::from("level,size,d,defect,closed_form,closed_form_holds,recursion_holds,d_decimal,defect_decimal\n");
    for row in rows {
        let rec = row.recursion_holds.map_or(String::new(), |b| b.to_string());
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            row.level,
            row.size,
            frac(&row.d),
            frac(&row.defect),
            frac(&row.closed_form),
            row.closed_form_holds,
            rec,
            decimal_string(&row.d),
            decimal_string(&row.defect),
        );
    }
    Ok(out)
}

fn measures_csv(cfg: &ExperimentConfig, family: &ToeplitzFamily) -> Result<String> {
    let mut out = String::from("kind,m,n,w,symbol,count,mass,formula_mass,mass_decimal\n");
    let sizes = family.tower().sizes();
    for m in 1..=family.depth() {
        let s = symbol_masses::<Rational>(family, m)?;
        for (k, sym) in s.symbols.iter().enumerate() {
            let _ = writeln!(
                out,
                "symbol,{m},,,{sym},{},{},{},{}",
                s.counts[k],
                frac(&s.counted[k]),
                frac(&s.formula[k]),
                decimal_string(&s.counted[k]),
            );
        }
    }
    if family.variant() == FamilyVariant::MultiSymbol {
        for (m, &size) in sizes.iter().enumerate().skip(1) {
            if size > cfg.orbit_limit {
                continue;
            }
            for n in 0..m {
                for w in cfg.windows_for(n, m) {
                    let p = partition_masses::<Rational>(family, m, n, w)?;
                    for (k, sym) in family.alphabet().iter().enumerate() {
                        let _ = writeln!(
                            out,
                            "partition,{m},{n},{w},{sym},{},{},,{}",
                            p.counts[k],
                            frac(&p.masses[k]),
                            decimal_string(&p.masses[k]),
                        );
                    }
                }
            }
        }
    }
    Ok(out)
}

fn simplex_json(family: &ToeplitzFamily) -> Result<Value> {
    let regularity = regularity_report::<Fraction>(family)?;
    let multi = family.variant() == FamilyVariant::MultiSymbol;
    let (simplex, matrices, relabeled) = if multi {
        let depth = family.depth();
        let matrices = (0..depth)
            .map(|n| an_matrix::<Fraction>(family, n))
            .collect::<Result<Vec<_>>>()?;
        let relabeled = family
            .alphabet()
            .iter()
            .map(|&s| relabeled_masses::<Fraction>(family, depth, s))
            .collect::<Result<Vec<_>>>()?;
        (
            serde_json::to_value(limit_vectors::<Fraction>(family)?)?,
            serde_json::to_value(matrices)?,
            serde_json::to_value(relabeled)?,
        )
    } else {
        (Value::Null, json!([]), json!([]))
    };
    Ok(json!({
        "regularity": regularity,
        "simplex": simplex,
        "matrices": matrices,
        "relabeled_masses_at_depth": relabeled,
    }))
}

fn zmass_csv(family: &ToeplitzFamily) -> Result<String> {
    let mut out = String::from("i,k,m,mass,bound,holds,mass_decimal,bound_decimal\n");
    for i in 1..=family.cycle().r() as usize {
        let rep = z_mass_trend(family, i)?;
        let rows = rep.payload.get("rows").and_then(Value::as_array).cloned().unwrap_or_default();
        for row in rows {
            let text = |key: &str| row[key].as_str().unwrap_or_default().to_string();
            let dec = |key: &str| parse_fraction(&text(key)).map_or(String::new(), |x| decimal_string(&x));
            let _ = writeln!(
                out,
                "{i},{},{},{},{},{},{},{}",
                row["k"],
                row["m"],
                text("mass"),
                text("bound"),
                row["holds"],
                dec("mass"),
                dec("bound"),
            );
        }
    }
    Ok(out)
}

fn verify_json(cfg: &ExperimentConfig, family: &ToeplitzFamily) -> Result<(Value, bool)> {
    if family.variant() != FamilyVariant::MultiSymbol {
        return Ok((
            json!({"passed": true, "total": 0, "failed": 0, "reports": [], "note": "lemma checks apply to the multi-symbol family"}),
            true,
        ));
    }
    let grid = default_grid(family, &cfg.checks, cfg.orbit_limit)?;
    let suite = run_suite(family, &grid)?;
    let passed = suite.passed;
    Ok((serde_json::to_value(suite)?, passed))
}

fn write(dir: &Path, name: &str, text: &str, files: &mut Vec<String>) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    files.push(name.to_string());
    Ok(())
}

fn pretty(v: &impl Serialize) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

/// Builds everything and writes the bundle to `out`, or to the configured
/// output directory. Identical configs produce identical bytes.
pub fn run(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<Bundle> {
    cfg.validate()?;
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| cfg.output_dir.clone())
        .ok_or_else(|| invalid("output_dir", "no output directory given"))?;
    fs::create_dir_all(&dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let family = cfg.build_family()?;
    let mut files = Vec::new();
    let mut tower = family.tower().to_json()?;
    tower.push('\n');
    write(&dir, TOWER_FILE, &tower, &mut files)?;
    write(&dir, JSETS_FILE, &pretty(&family.jset_dump()?)?, &mut files)?;
    write(&dir, DENSITY_FILE, &density_csv(&family)?, &mut files)?;
    write(&dir, MEASURES_FILE, &measures_csv(cfg, &family)?, &mut files)?;
    write(&dir, SIMPLEX_FILE, &pretty(&simplex_json(&family)?)?, &mut files)?;
    if family.variant() == FamilyVariant::MultiSymbol {
        write(&dir, ZMASS_FILE, &zmass_csv(&family)?, &mut files)?;
    }
    let (verify, checks_passed) = verify_json(cfg, &family)?;
    write(&dir, VERIFY_FILE, &pretty(&verify)?, &mut files)?;
    Ok(Bundle {
        dir,
        files,
        checks_passed,
    })
}

/// Reads a bundle CSV into header-keyed rows.
fn read_csv(dir: &Path, name: &str) -> Result<Vec<Vec<(String, String)>>> {
    let path = dir.join(name);
    let text = fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::Parse(format!("{name} is empty")))?
        .split(',')
        .map(str::to_string)
        .collect();
    Ok(lines
        .filter(|l| !l.is_empty())
        .map(|l| header.iter().cloned().zip(l.split(',').map(str::to_string)).collect())
        .collect())
}

fn field<'r>(row: &'r [(String, String)], key: &str) -> &'r str {
    row.iter().find(|(k, _)| k == key).map_or("", |(_, v)| v.as_str())
}

fn value_cells(text: &str) -> Result<String> {
    let x = parse_fraction(text).ok_or_else(|| Error::Parse(format!("not a fraction: '{text}'")))?;
    Ok(format!("{}\t{}", fraction_string(&x), decimal_string(&x)))
}

/// Parses `prefix:i=K`.
fn series_index(series: &str, prefix: &str) -> Result<Option<String>> {
    match series.strip_prefix(prefix) {
        None => Err(Error::InvalidParameters(format!("unknown series '{series}'"))),
        Some("") => Ok(None),
        Some(rest) => rest
            .strip_prefix(":i=")
            .filter(|k| k.parse::<u32>().is_ok())
            .map(|k| Some(k.to_string()))
            .ok_or_else(|| Error::InvalidParameters(format!("unknown series '{series}'"))),
    }
}

pub const SERIES: [&str; 4] = ["density", "defect", "masses[:i=J]", "zmass:i=K"];

/// Tab-separated plot data from a bundle directory. Value columns carry the
/// exact fraction and a 12-digit decimal.
///
/// Series: `density` (dₙ), `defect` (1 − dₙ against its closed form),
/// `masses` or `masses:i=J` (μₘ([J])), `zmass:i=K` (μₘ(Z_{K,k}) with bounds).
pub fn plot_data(dir: &Path, series: &str) -> Result<String> {
    let mut out = String::new();
    match series {
        "density" => {
            out.push_str("# level\td\td_decimal\n");
            for row in read_csv(dir, DENSITY_FILE)? {
                let _ = writeln!(out, "{}\t{}", field(&row, "level"), value_cells(field(&row, "d"))?);
            }
        }
        "defect" => {
            out.push_str("# level\tdefect\tdefect_decimal\tclosed_form\tclosed_form_decimal\n");
            for row in read_csv(dir, DENSITY_FILE)? {
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}",
                    field(&row, "level"),
                    value_cells(field(&row, "defect"))?,
                    value_cells(field(&row, "closed_form"))?
                );
            }
        }
        s if s.starts_with("masses") => {
            let symbol = series_index(s, "masses")?;
            out.push_str("# level\tsymbol\tmass\tmass_decimal\n");
            for row in read_csv(dir, MEASURES_FILE)? {
                let sym = field(&row, "symbol");
                if field(&row, "kind") != "symbol" || symbol.as_deref().is_some_and(|j| j != sym) {
                    continue;
                }
                let _ = writeln!(out, "{}\t{sym}\t{}", field(&row, "m"), value_cells(field(&row, "mass"))?);
            }
        }
        s if s.starts_with("zmass") => {
            let i = series_index(s, "zmass")?
                .ok_or_else(|| Error::InvalidParameters("zmass needs a residue class, as in zmass:i=1".into()))?;
            if !dir.join(ZMASS_FILE).exists() {
                return Err(Error::InvalidParameters("this bundle has no Z-mass data".into()));
            }
            out.push_str("# k\tm\tmass\tmass_decimal\tbound\tbound_decimal\n");
            for row in read_csv(dir, ZMASS_FILE)? {
                if field(&row, "i") != i {
                    continue;
                }
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}",
                    field(&row, "k"),
                    field(&row, "m"),
                    value_cells(field(&row, "mass"))?,
                    value_cells(field(&row, "bound"))?
                );
            }
        }
        _ => {
            return Err(Error::InvalidParameters(format!(
                "unknown series '{series}', expected one of {}",
                SERIES.join(", ")
            )))
        }
    }
    Ok(out)
}
