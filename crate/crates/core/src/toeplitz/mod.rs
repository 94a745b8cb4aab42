//! Toeplitz arrays built on a domain tower.
//!
//! Two families are provided. The multi-symbol array takes the value α_{m+1}
//! on J(m)Γ_{m+1}, where J(0) = {1} and J(m) collects the points of D_m not
//! yet periodized by an earlier level. The regular binary array is 0 on the
//! union of S_{2m}Γ_{2m+1} and 1 elsewhere.
//!
//! A family is resolved once over D_N: every d ∈ D_N gets a [`Cell`] holding
//! η(d) and the least k with d ∈ Per(η, Γ_{k+1}). Evaluation elsewhere goes
//! through the class of the point in Q_N.

mod density;
mod periodic;

use std::sync::Arc;

use rayon::prelude::*;
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{ClassId, GroupElement, QuotientChain};
use crate::tower::{DomainTower, TowerOptions};

pub use density::{density_sequence, regularity_report, DensityRow, RegularityReport, RegularityRow, Regime, TailBracket};
pub use periodic::{essential_check, EssentialReport, PerSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyVariant {
    MultiSymbol,
    RegularBinary,
}

/// αᵢ ∈ {1..r} with αᵢ ≡ i (mod r).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymbolCycle {
    r: u32,
}

impl SymbolCycle {
    pub fn new(r: u32) -> Result<SymbolCycle> {
        if r == 0 {
            return Err(Error::InvalidParameters("alphabet size must be at least 1".into()));
        }
        Ok(SymbolCycle { r })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn alpha(&self, i: usize) -> u32 {
        ((i as u64 + self.r as u64 - 1) % self.r as u64) as u32 + 1
    }
}

/// η(d) and the least k with d ∈ Per(η, Γ_{k+1}).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub symbol: u32,
    pub level: u32,
}

#[derive(Clone, Debug)]
enum Structure {
    Multi { jsets: Vec<Vec<usize>> },
    Binary { ssets: Vec<Vec<usize>>, points: Vec<usize> },
}

#[derive(Clone, Debug)]
pub struct ToeplitzFamily {
    tower: Arc<DomainTower>,
    variant: FamilyVariant,
    cycle: SymbolCycle,
    cells: Vec<Cell>,
    structure: Structure,
}

impl ToeplitzFamily {
    /// Resolves the family over the full depth of `tower`.
    pub fn build(tower: Arc<DomainTower>, variant: FamilyVariant, r: u32) -> Result<ToeplitzFamily> {
        let cycle = SymbolCycle::new(if variant == FamilyVariant::RegularBinary { 2 } else { r })?;
        match variant {
            FamilyVariant::MultiSymbol => build_multi(tower, cycle),
            FamilyVariant::RegularBinary => build_binary(tower, cycle),
        }
    }

    pub fn multi_symbol(tower: Arc<DomainTower>, r: u32) -> Result<ToeplitzFamily> {
        Self::build(tower, FamilyVariant::MultiSymbol, r)
    }

    pub fn regular_binary(tower: Arc<DomainTower>) -> Result<ToeplitzFamily> {
        Self::build(tower, FamilyVariant::RegularBinary, 2)
    }

    pub fn tower(&self) -> &DomainTower {
        &self.tower
    }

    pub fn tower_arc(&self) -> &Arc<DomainTower> {
        &self.tower
    }

    pub fn chain(&self) -> &QuotientChain {
        self.tower.chain()
    }

    pub fn variant(&self) -> FamilyVariant {
        self.variant
    }

    pub fn cycle(&self) -> SymbolCycle {
        self.cycle
    }

    pub fn depth(&self) -> usize {
        self.tower.depth()
    }

    /// Symbol set Σ: {1..r} for the multi-symbol array, {0, 1} for the binary one.
    pub fn alphabet(&self) -> Vec<u32> {
        match self.variant {
            FamilyVariant::MultiSymbol => (1..=self.cycle.r()).collect(),
            FamilyVariant::RegularBinary => vec![0, 1],
        }
    }

    pub(crate) fn symbol_index(&self, s: u32) -> usize {
        match self.variant {
            FamilyVariant::MultiSymbol => (s - 1) as usize,
            FamilyVariant::RegularBinary => s as usize,
        }
    }

    /// Cells indexed by position in D_N.
    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// Cell of the element of D_i at position `pos`.
    pub(crate) fn cell_of_level_position(&self, i: usize, pos: usize) -> Result<Cell> {
        let n = self.depth();
        if i == n {
            return Ok(self.cells[pos]);
        }
        let g = &self.tower.elements(i)?[pos];
        let top = self.chain().class_unchecked(g, n);
        Ok(self.cells[self.tower.position_of_class(n, top)?])
    }

    /// (η(g), level) with g ∈ J(level)Γ_{level+1} (multi-symbol), or the least
    /// level with g ∈ Per(η, Γ_{level+1}) (binary).
    pub fn eval(&self, g: &GroupElement) -> Result<Cell> {
        let n = self.depth();
        let pos = self.tower.position_of(g, n)?;
        let cell = self.cells[pos];
        if (cell.level as usize) < n || &self.tower.elements(n)?[pos] == g {
            Ok(cell)
        } else {
            Err(Error::DepthExceeded {
                element: g.to_string(),
                built_depth: n,
                required_at_least: n + 1,
            })
        }
    }

    /// η on a finite set, in the given order.
    pub fn window(&self, f: &[GroupElement]) -> Result<Vec<(GroupElement, u32)>> {
        f.iter().map(|g| Ok((g.clone(), self.eval(g)?.symbol))).collect()
    }

    /// J(m) as elements of D_m (multi-symbol only).
    pub fn jset(&self, m: usize) -> Result<Vec<GroupElement>> {
        match &self.structure {
            Structure::Multi { jsets } => {
                let list = jsets.get(m).ok_or(Error::LevelOutOfRange {
                    level: m,
                    depth: self.depth(),
                })?;
                let top = self.tower.elements(self.depth())?;
                Ok(list.iter().map(|&p| top[p].clone()).collect())
            }
            Structure::Binary { .. } => Err(Error::InvalidParameters("J-sets belong to the multi-symbol family".into())),
        }
    }

    /// |J(m)|; for the binary family the count of non-periodic points of D_m.
    pub fn jset_size(&self, m: usize) -> Result<u64> {
        match &self.structure {
            Structure::Multi { jsets } => jsets.get(m).map(|j| j.len() as u64).ok_or(Error::LevelOutOfRange {
                level: m,
                depth: self.depth(),
            }),
            Structure::Binary { .. } => {
                let size = self.tower.size(m)?;
                Ok(size - self.per_set(m)?.total())
            }
        }
    }

    /// Sₙ (binary only).
    pub fn sset(&self, n: usize) -> Result<Vec<GroupElement>> {
        match &self.structure {
            Structure::Binary { ssets, .. } => {
                let list = ssets.get(n).ok_or(Error::LevelOutOfRange {
                    level: n,
                    depth: self.depth(),
                })?;
                let top = self.tower.elements(self.depth())?;
                Ok(list.iter().map(|&p| top[p].clone()).collect())
            }
            Structure::Multi { .. } => Err(Error::InvalidParameters("S-sets belong to the binary family".into())),
        }
    }

    /// The chosen point vₙ ∈ Sₙ (binary only, v₀ = 1).
    pub fn chosen_point(&self, n: usize) -> Result<GroupElement> {
        match &self.structure {
            Structure::Binary { points, .. } => {
                let p = *points.get(n).ok_or(Error::LevelOutOfRange {
                    level: n,
                    depth: self.depth(),
                })?;
                Ok(self.tower.elements(self.depth())?[p].clone())
            }
            Structure::Multi { .. } => Err(Error::InvalidParameters("chosen points belong to the binary family".into())),
        }
    }

    /// Copy with the cell at D_N position `pos` changed to another symbol.
    pub fn with_flipped_cell(&self, pos: usize) -> Result<ToeplitzFamily> {
        let mut out = self.clone();
        let cell = out
            .cells
            .get_mut(pos)
            .ok_or_else(|| Error::InvalidParameters(format!("no cell at position {pos}")))?;
        cell.symbol = match self.variant {
            FamilyVariant::MultiSymbol => cell.symbol % self.cycle.r() + 1,
            FamilyVariant::RegularBinary => 1 - cell.symbol,
        };
        Ok(out)
    }

    pub fn jset_dump(&self) -> Result<JsetDump> {
        let mut levels = Vec::new();
        match &self.structure {
            Structure::Multi { jsets } => {
                for m in 0..jsets.len() {
                    levels.push(JsetLevel {
                        level: m,
                        symbol: Some(self.cycle.alpha(m + 1)),
                        elements: self.jset(m)?,
                        chosen: None,
                    });
                }
            }
            Structure::Binary { ssets, .. } => {
                for n in 0..ssets.len() {
                    levels.push(JsetLevel {
                        level: n,
                        symbol: None,
                        elements: self.sset(n)?,
                        chosen: Some(self.chosen_point(n)?),
                    });
                }
            }
        }
        Ok(JsetDump {
            variant: self.variant,
            r: self.cycle.r(),
            levels,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsetLevel {
    pub level: usize,
    /// α_{level+1} for J-sets.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symbol: Option<u32>,
    pub elements: Vec<GroupElement>,
    /// v_level for S-sets.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chosen: Option<GroupElement>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsetDump {
    pub variant: FamilyVariant,
    pub r: u32,
    pub levels: Vec<JsetLevel>,
}

/// Positions in D_N of the elements of D_i, by class lookup.
fn level_positions(tower: &DomainTower, i: usize) -> Result<Vec<usize>> {
    let n = tower.depth();
    let chain = tower.chain();
    tower
        .elements(i)?
        .iter()
        .map(|g| tower.position_of_class(n, chain.class_unchecked(g, n)))
        .collect()
}

fn build_multi(tower: Arc<DomainTower>, cycle: SymbolCycle) -> Result<ToeplitzFamily> {
    let n = tower.depth();
    let chain = tower.chain();
    let top_classes = tower.classes(n)?;
    let size = top_classes.len();
    let mut level_of: Vec<Option<u32>> = vec![None; size];
    let mut jsets = Vec::with_capacity(n + 1);
    for l in 0..=n {
        let j: Vec<usize> = level_positions(&tower, l)?
            .into_iter()
            .filter(|&p| level_of[p].is_none())
            .collect();
        if l == n {
            for &p in &j {
                level_of[p] = Some(n as u32);
            }
            jsets.push(j);
            break;
        }
        let marks: FxHashSet<ClassId> = j
            .iter()
            .map(|&p| chain.project_unchecked(top_classes[p], n, l + 1))
            .collect();
        let hits: Vec<bool> = top_classes
            .par_iter()
            .zip(level_of.par_iter())
            .map(|(c, lv)| lv.is_none() && marks.contains(&chain.project_unchecked(*c, n, l + 1)))
            .collect();
        for (p, hit) in hits.into_iter().enumerate() {
            if hit {
                level_of[p] = Some(l as u32);
            }
        }
        jsets.push(j);
    }
    let cells = level_of
        .into_iter()
        .map(|lv| {
            let level = lv.unwrap_or(n as u32);
            Cell {
                symbol: cycle.alpha(level as usize + 1),
                level,
            }
        })
        .collect();
    Ok(ToeplitzFamily {
        tower,
        variant: FamilyVariant::MultiSymbol,
        cycle,
        cells,
        structure: Structure::Multi { jsets },
    })
}

fn build_binary(tower: Arc<DomainTower>, cycle: SymbolCycle) -> Result<ToeplitzFamily> {
    let n = tower.depth();
    let chain = tower.chain();
    let top = tower.elements(n)?;
    let top_classes = tower.classes(n)?;
    let id_pos = tower.position_of(&chain.identity(), n)?;
    let mut ssets: Vec<Vec<usize>> = vec![vec![id_pos]];
    let mut points = vec![id_pos];
    for k in 1..=n {
        let v_prev = &top[points[k - 1]];
        let target = chain.class_unchecked(v_prev, k - 1);
        let mut s = Vec::new();
        for p in level_positions(&tower, k)? {
            let d = &top[p];
            if chain.class_unchecked(d, k - 1) == target && !tower.contains(d, k - 1)? {
                s.push(p);
            }
        }
        let first = *s.first().ok_or_else(|| {
            Error::InvalidParameters(format!("S_{k} is empty; the tower index ratio must exceed 1"))
        })?;
        points.push(first);
        ssets.push(s);
    }

    // Zero region below the top: classes q_{2m+1}(S_{2m}) with 2m+1 ≤ N.
    let mut zero_marks: Vec<(usize, FxHashSet<ClassId>)> = Vec::new();
    let mut m2 = 0;
    while m2 < n {
        let set = ssets[m2]
            .iter()
            .map(|&p| chain.project_unchecked(top_classes[p], n, m2 + 1))
            .collect();
        zero_marks.push((m2 + 1, set));
        m2 += 2;
    }
    let top_zero: FxHashSet<usize> = if n.is_multiple_of(2) {
        ssets[n].iter().copied().collect()
    } else {
        FxHashSet::default()
    };

    // Non-periodic classes at level k ≥ 1: {q_k(v_k)} for odd k, q_k(S_k) for even k.
    let nonperiodic: Vec<FxHashSet<ClassId>> = (0..=n)
        .map(|k| {
            if k == 0 {
                FxHashSet::default()
            } else if k % 2 == 1 {
                std::iter::once(chain.project_unchecked(top_classes[points[k]], n, k)).collect()
            } else {
                ssets[k]
                    .iter()
                    .map(|&p| chain.project_unchecked(top_classes[p], n, k))
                    .collect()
            }
        })
        .collect();

    let cells: Vec<Cell> = (0..top.len())
        .into_par_iter()
        .map(|p| {
            let c = top_classes[p];
            let zero = top_zero.contains(&p)
                || zero_marks
                    .iter()
                    .any(|(lvl, set)| set.contains(&chain.project_unchecked(c, n, *lvl)));
            let level = (1..=n)
                .find(|&k| !nonperiodic[k].contains(&chain.project_unchecked(c, n, k)))
                .map_or(n, |k| k - 1);
            Cell {
                symbol: u32::from(!zero),
                level: level as u32,
            }
        })
        .collect();
    Ok(ToeplitzFamily {
        tower,
        variant: FamilyVariant::RegularBinary,
        cycle,
        cells,
        structure: Structure::Binary { ssets, points },
    })
}

/// Outcome of resolving one element with towers of growing depth.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Resolution {
    /// Resolved at `depth`; no shallower tower resolves it.
    Resolved { depth: usize, symbol: u32, level: u32 },
    /// Not resolved by any tower up to the schedule length.
    Unresolved { required_at_least: usize },
}

/// Smallest tower depth at which `g` resolves, trying depths `from..=max_depth`.
///
/// Greedy and canonical towers of smaller depth are prefixes of deeper ones,
/// so the first success is the exact minimal depth.
pub fn minimal_resolving_depth(
    chain: &QuotientChain,
    opts: &TowerOptions,
    variant: FamilyVariant,
    r: u32,
    g: &GroupElement,
    from: usize,
    max_depth: usize,
) -> Result<Resolution> {
    let max_depth = max_depth.min(chain.depth());
    for depth in from.max(1)..=max_depth {
        let tower = Arc::new(DomainTower::build(chain, depth, opts)?);
        let family = ToeplitzFamily::build(tower, variant, r)?;
        match family.eval(g) {
            Ok(cell) => {
                return Ok(Resolution::Resolved {
                    depth,
                    symbol: cell.symbol,
                    level: cell.level,
                })
            }
            Err(Error::DepthExceeded { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(Resolution::Unresolved {
        required_at_least: max_depth + 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::BackendSpec;
    use crate::tower::TowerOptions;

    fn z3_family(depth: usize, r: u32) -> ToeplitzFamily {
        let chain = QuotientChain::new(BackendSpec::z_constant(3, depth)).unwrap();
        let tower = DomainTower::build(&chain, depth, &TowerOptions::canonical()).unwrap();
        ToeplitzFamily::multi_symbol(Arc::new(tower), r).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<GroupElement> {
        v.iter().map(|&x| GroupElement::Int(x)).collect()
    }

    #[test]
    fn cycle_values() {
        let c = SymbolCycle::new(3).unwrap();
        assert_eq!((1..=7).map(|i| c.alpha(i)).collect::<Vec<_>>(), vec![1, 2, 3, 1, 2, 3, 1]);
        assert_eq!(c.alpha(0), 3);
        assert!(SymbolCycle::new(0).is_err());
    }

    #[test]
    fn jsets_for_z3() {
        let f = z3_family(3, 2);
        assert_eq!(f.jset(0).unwrap(), ints(&[0]));
        assert_eq!(f.jset(1).unwrap(), ints(&[1, 2]));
        assert_eq!(f.jset(2).unwrap(), ints(&[4, 5, 7, 8]));
        assert_eq!(f.jset(3).unwrap(), ints(&[13, 14, 16, 17, 22, 23, 25, 26]));
    }

    #[test]
    fn eval_examples() {
        let f = z3_family(3, 2);
        let cell = |x: i64| f.eval(&GroupElement::Int(x)).unwrap();
        assert_eq!(cell(0), Cell { symbol: 1, level: 0 });
        assert_eq!(cell(1), Cell { symbol: 2, level: 1 });
        assert_eq!(cell(4), Cell { symbol: 1, level: 2 });
        assert_eq!(cell(13), Cell { symbol: 2, level: 3 });
        assert_eq!(cell(3), Cell { symbol: 1, level: 0 });
        assert!(matches!(
            f.eval(&GroupElement::Int(-1)),
            Err(Error::DepthExceeded { required_at_least: 4, .. })
        ));
    }

    #[test]
    fn window_examples() {
        let f = z3_family(3, 2);
        let w = f.window(&ints(&[0, 1, 2])).unwrap();
        assert_eq!(w.iter().map(|x| x.1).collect::<Vec<_>>(), vec![1, 2, 2]);
        assert!(f.window(&[]).unwrap().is_empty());
        let d2 = f.window(&ints(&(0..9).collect::<Vec<_>>())).unwrap();
        assert_eq!(d2.iter().map(|x| x.1).collect::<Vec<_>>(), vec![1, 2, 2, 1, 1, 1, 1, 1, 1]);
    }

    #[test]
    fn depth_one_family() {
        let f = z3_family(1, 2);
        assert_eq!(f.jset(0).unwrap(), ints(&[0]));
        assert_eq!(f.jset(1).unwrap(), ints(&[1, 2]));
    }

    #[test]
    fn binary_sets_on_z() {
        let chain = QuotientChain::new(BackendSpec::Z {
            multipliers: vec![3, 3, 4],
        })
        .unwrap();
        let tower = DomainTower::build(&chain, 3, &TowerOptions::canonical()).unwrap();
        let f = ToeplitzFamily::regular_binary(Arc::new(tower)).unwrap();
        assert_eq!(f.sset(1).unwrap(), ints(&[1, 2]));
        assert_eq!(f.chosen_point(1).unwrap(), GroupElement::Int(1));
        // v₁Γ₁ ∩ D₂ = {1, 4, 7}, minus D₁.
        assert_eq!(f.sset(2).unwrap(), ints(&[4, 7]));
        // v₂Γ₂ ∩ D₃ = {4, 13, 22, 31}, minus D₂.
        assert_eq!(f.sset(3).unwrap(), ints(&[13, 22, 31]));
        // η = 0 on Γ₁ and on {4, 7} + 36ℤ.
        assert_eq!(f.eval(&GroupElement::Int(6)).unwrap().symbol, 0);
        assert_eq!(f.eval(&GroupElement::Int(4)).unwrap().symbol, 0);
        assert_eq!(f.eval(&GroupElement::Int(40)).unwrap(), Cell { symbol: 0, level: 2 });
        assert_eq!(f.eval(&GroupElement::Int(31)).unwrap().symbol, 1);
        assert_eq!(f.eval(&GroupElement::Int(13)).unwrap().symbol, 1);
        assert_eq!(f.eval(&GroupElement::Int(2)).unwrap().symbol, 1);
    }
}
