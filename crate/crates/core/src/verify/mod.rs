//! Finite checks of the combinatorial lemmas behind the construction.
//!
//! Each check returns a [`LemmaReport`] with an exact payload. Statements about
//! the subshift are checked on orbit points x_u(g) = ηₘ(ug), u ∈ Dₘ, with the
//! sets C_{n,i} truncated to windows D_W (see [`crate::measures::PartitionWindow`]).

mod checks;
pub mod fixtures;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::toeplitz::{FamilyVariant, ToeplitzFamily};

pub use checks::{
    check_constancy, check_good_gamma, check_good_patches, check_jset_recursion, check_rel_partition,
    check_uy_equality, check_z_chain, good_gamma_set, z_mass_trend,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaReport {
    pub lemma: String,
    /// Checked on ηₘ-orbit approximants rather than on the subshift itself.
    pub surrogate: bool,
    pub params: BTreeMap<String, i64>,
    pub verdict: Verdict,
    pub payload: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl LemmaReport {
    pub(crate) fn new(lemma: &str, params: &[(&str, i64)]) -> LemmaReport {
        LemmaReport {
            lemma: lemma.to_string(),
            surrogate: false,
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            verdict: Verdict::Pass,
            payload: BTreeMap::new(),
            counterexample: None,
            note: None,
        }
    }

    pub(crate) fn surrogate(mut self) -> Self {
        self.surrogate = true;
        self
    }

    pub(crate) fn put(&mut self, key: &str, value: impl Into<Value>) {
        self.payload.insert(key.to_string(), value.into());
    }

    pub(crate) fn note(&mut self, text: impl Into<String>) {
        let text = text.into();
        self.note = Some(match self.note.take() {
            Some(old) => format!("{old}; {text}"),
            None => text,
        });
    }

    /// Records a failure; keeps at most a handful of witnesses.
    pub(crate) fn fail(&mut self, witness: impl Into<String>) {
        self.verdict = Verdict::Fail;
        let list = self.counterexample.get_or_insert_with(Vec::new);
        if list.len() < 8 {
            list.push(witness.into());
        }
    }

    pub(crate) fn fail_with<T: std::fmt::Display>(&mut self, what: &str, items: &[T]) {
        for g in items {
            self.fail(format!("{what} {g}"));
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// A named check with its parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum CheckSpec {
    GoodGamma { n: usize, m: usize },
    GoodPatches { n: usize, m: usize },
    JsetRecursion { i: usize },
    Constancy { i: usize, gamma: GroupElement },
    RelPartition { n: usize, m: usize, w: usize },
    UyEquality { i: usize, k: usize, m: usize, w: usize },
    ZChain { i: usize, k: usize, m: usize, w: usize },
    ZMassTrend { i: usize },
}

impl CheckSpec {
    pub fn name(&self) -> &'static str {
        match self {
            CheckSpec::GoodGamma { .. } => "good_gamma",
            CheckSpec::GoodPatches { .. } => "good_patches",
            CheckSpec::JsetRecursion { .. } => "jset_recursion",
            CheckSpec::Constancy { .. } => "constancy",
            CheckSpec::RelPartition { .. } => "rel_partition",
            CheckSpec::UyEquality { .. } => "uy_equality",
            CheckSpec::ZChain { .. } => "z_chain",
            CheckSpec::ZMassTrend { .. } => "z_mass_trend",
        }
    }

    pub const NAMES: [&'static str; 8] = [
        "good_gamma",
        "good_patches",
        "jset_recursion",
        "constancy",
        "rel_partition",
        "uy_equality",
        "z_chain",
        "z_mass_trend",
    ];
}

pub fn run_check(family: &ToeplitzFamily, spec: &CheckSpec) -> Result<LemmaReport> {
    if family.variant() != FamilyVariant::MultiSymbol {
        return Err(Error::InvalidParameters("lemma checks apply to the multi-symbol family".into()));
    }
    match spec {
        CheckSpec::GoodGamma { n, m } => check_good_gamma(family, *n, *m),
        CheckSpec::GoodPatches { n, m } => check_good_patches(family, *n, *m),
        CheckSpec::JsetRecursion { i } => check_jset_recursion(family, *i),
        CheckSpec::Constancy { i, gamma } => check_constancy(family, *i, gamma),
        CheckSpec::RelPartition { n, m, w } => check_rel_partition(family, *n, *m, *w),
        CheckSpec::UyEquality { i, k, m, w } => check_uy_equality(family, *i, *k, *m, *w),
        CheckSpec::ZChain { i, k, m, w } => check_z_chain(family, *i, *k, *m, *w),
        CheckSpec::ZMassTrend { i } => z_mass_trend(family, *i),
    }
}

/// Orbit scans above this many orbit points are left out of the default grid.
pub const DEFAULT_ORBIT_LIMIT: u64 = 20_000;

/// Every in-range parameter choice for the named checks (all checks when
/// `names` is empty), skipping orbit levels larger than `orbit_limit`.
pub fn default_grid(family: &ToeplitzFamily, names: &[String], orbit_limit: u64) -> Result<Vec<CheckSpec>> {
    for name in names {
        if !CheckSpec::NAMES.contains(&name.as_str()) {
            return Err(Error::InvalidParameters(format!("unknown check '{name}'")));
        }
    }
    let wanted = |s: &str| names.is_empty() || names.iter().any(|n| n == s);
    let depth = family.depth();
    let r = family.cycle().r() as usize;
    let sizes = family.tower().sizes();
    let small = |m: usize| sizes[m] <= orbit_limit;
    let mut grid = Vec::new();

    if wanted("good_gamma") {
        for n in 0..depth {
            for m in n + 2..=depth {
                grid.push(CheckSpec::GoodGamma { n, m });
            }
        }
    }
    if wanted("good_patches") {
        for n in 0..depth {
            for m in (n + 1..=depth).filter(|m| (m - n) % r == 0) {
                grid.push(CheckSpec::GoodPatches { n, m });
            }
        }
    }
    if wanted("jset_recursion") {
        for i in 0..depth {
            grid.push(CheckSpec::JsetRecursion { i });
        }
    }
    if wanted("constancy") {
        let chain = family.chain();
        for i in 0..depth {
            let gammas = family
                .tower()
                .elements(depth)?
                .iter()
                .filter(|g| chain.class_unchecked(g, i) == chain.class_identity(i))
                .take(6);
            for g in gammas {
                grid.push(CheckSpec::Constancy { i, gamma: g.clone() });
            }
        }
    }
    if wanted("rel_partition") {
        for n in 0..depth {
            for m in (n + 2..=depth).filter(|&m| small(m)) {
                for w in n + 1..=m {
                    grid.push(CheckSpec::RelPartition { n, m, w });
                }
            }
        }
    }
    if wanted("uy_equality") && r >= 2 {
        for i in 1..=r {
            for k in 1.. {
                let a = i + k * r;
                if a > depth {
                    break;
                }
                for m in (a..=depth).filter(|&m| small(m)) {
                    grid.push(CheckSpec::UyEquality { i, k, m, w: a });
                }
            }
        }
    }
    if wanted("z_chain") {
        for i in 1..=r {
            for k in 0.. {
                let b = i + (k + 1) * r;
                if b > depth {
                    break;
                }
                for m in (b..=depth).filter(|&m| small(m)) {
                    grid.push(CheckSpec::ZChain { i, k, m, w: b });
                }
            }
        }
    }
    if wanted("z_mass_trend") {
        for i in 1..=r {
            grid.push(CheckSpec::ZMassTrend { i });
        }
    }
    Ok(grid)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub passed: bool,
    pub total: usize,
    pub failed: usize,
    pub reports: Vec<LemmaReport>,
}

pub fn run_suite(family: &ToeplitzFamily, specs: &[CheckSpec]) -> Result<SuiteReport> {
    let reports = specs.iter().map(|s| run_check(family, s)).collect::<Result<Vec<_>>>()?;
    let failed = reports.iter().filter(|r| !r.passed()).count();
    Ok(SuiteReport {
        passed: failed == 0,
        total: reports.len(),
        failed,
        reports,
    })
}
