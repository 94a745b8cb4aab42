//! Per-sets as subsets of Qₙ and the essential-period test.

use std::collections::BTreeMap;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;

use super::ToeplitzFamily;
use crate::error::{Error, Result};
use crate::group::{ClassId, QuotientChain};
use crate::tower::enumerate_classes;

/// P_{n,α} ⊆ Qₙ for every symbol α, each sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PerSet {
    pub level: usize,
    pub symbols: Vec<u32>,
    pub classes: Vec<Vec<ClassId>>,
}

impl PerSet {
    pub fn for_symbol(&self, s: u32) -> &[ClassId] {
        self.symbols
            .iter()
            .position(|&x| x == s)
            .map_or(&[], |i| self.classes[i].as_slice())
    }

    /// |Per(η, Γₙ) ∩ Dₙ|.
    pub fn total(&self) -> u64 {
        self.classes.iter().map(|c| c.len() as u64).sum()
    }

    pub fn sizes(&self) -> Vec<u64> {
        self.classes.iter().map(|c| c.len() as u64).collect()
    }

    fn from_groups(level: usize, symbols: Vec<u32>, groups: BTreeMap<u32, Vec<ClassId>>) -> PerSet {
        let classes = symbols
            .iter()
            .map(|s| {
                let mut v = groups.get(s).cloned().unwrap_or_default();
                v.sort();
                v
            })
            .collect();
        PerSet { level, symbols, classes }
    }
}

impl ToeplitzFamily {
    /// Per(η, Γₙ) from the construction: classes of d ∈ Dₙ resolved below level n.
    pub fn per_set(&self, n: usize) -> Result<PerSet> {
        let size = self.tower().size(n)? as usize;
        let classes = self.tower().classes(n)?;
        let mut groups: BTreeMap<u32, Vec<ClassId>> = BTreeMap::new();
        for (pos, c) in classes.iter().enumerate().take(size) {
            let cell = self.cell_of_level_position(n, pos)?;
            if (cell.level as usize) < n {
                groups.entry(cell.symbol).or_default().push(*c);
            }
        }
        Ok(PerSet::from_groups(n, self.alphabet(), groups))
    }

    /// Per(η, Γₙ) from its definition: classes c whose coset cΓₙ carries a
    /// single symbol, inspected through the window D_W.
    ///
    /// Exact for n+1 ≤ W ≤ N: every non-periodic coset at level n already
    /// shows two symbols inside D_{n+1}.
    pub fn per_set_by_definition(&self, n: usize, w: usize) -> Result<PerSet> {
        let depth = self.depth();
        if w < n + 1 || w > depth {
            return Err(Error::InvalidParameters(format!(
                "window level {w} must satisfy {} <= W <= {depth}",
                n + 1
            )));
        }
        let chain = self.chain();
        let elements = self.tower().elements(w)?;
        let mut seen: FxHashMap<ClassId, Option<u32>> = FxHashMap::default();
        for (pos, g) in elements.iter().enumerate() {
            let s = self.cell_of_level_position(w, pos)?.symbol;
            let c = chain.class_unchecked(g, n);
            seen.entry(c)
                .and_modify(|v| {
                    if *v != Some(s) {
                        *v = None;
                    }
                })
                .or_insert(Some(s));
        }
        let mut groups: BTreeMap<u32, Vec<ClassId>> = BTreeMap::new();
        for (c, v) in seen {
            if let Some(s) = v {
                groups.entry(s).or_default().push(c);
            }
        }
        Ok(PerSet::from_groups(n, self.alphabet(), groups))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EssentialReport {
    pub level: usize,
    pub essential: bool,
    /// E = {c : c⁻¹P_α ⊆ P_α for every α}, sorted.
    pub stabilizer: Vec<ClassId>,
    pub witness: Option<ClassId>,
}

/// Decides whether the only classes preserving every P_{n,α} is the identity.
pub fn essential_check(chain: &QuotientChain, per: &PerSet) -> Result<EssentialReport> {
    let n = per.level;
    chain.order(n)?;
    let id = chain.class_identity(n);
    let sets: Vec<FxHashSet<ClassId>> = per.classes.iter().map(|c| c.iter().copied().collect()).collect();
    let anchor = per.classes.iter().filter(|c| !c.is_empty()).min_by_key(|c| c.len());
    let candidates: Vec<ClassId> = match anchor {
        Some(p) => {
            let x0 = p[0];
            p.iter().map(|&y| chain.class_mul(n, x0, chain.class_inv(n, y))).collect()
        }
        None => enumerate_classes(chain, n),
    };
    let mut stabilizer: Vec<ClassId> = candidates
        .into_iter()
        .filter(|&c| {
            let ci = chain.class_inv(n, c);
            per.classes
                .iter()
                .zip(&sets)
                .all(|(list, set)| list.iter().all(|&x| set.contains(&chain.class_mul(n, ci, x))))
        })
        .collect();
    stabilizer.sort();
    stabilizer.dedup();
    let witness = stabilizer.iter().copied().find(|&c| c != id);
    Ok(EssentialReport {
        level: n,
        essential: witness.is_none(),
        stabilizer,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::group::BackendSpec;
    use crate::tower::{DomainTower, TowerOptions};

    fn z3_family(depth: usize, r: u32) -> ToeplitzFamily {
        let chain = QuotientChain::new(BackendSpec::z_constant(3, depth)).unwrap();
        let tower = DomainTower::build(&chain, depth, &TowerOptions::canonical()).unwrap();
        ToeplitzFamily::multi_symbol(Arc::new(tower), r).unwrap()
    }

    fn ids(v: &[u64]) -> Vec<ClassId> {
        v.iter().map(|&x| ClassId(x)).collect()
    }

    #[test]
    fn per_sets_for_z3() {
        let f = z3_family(3, 2);
        let p1 = f.per_set(1).unwrap();
        assert_eq!(p1.for_symbol(1), ids(&[0]).as_slice());
        assert!(p1.for_symbol(2).is_empty());
        let p2 = f.per_set(2).unwrap();
        assert_eq!(p2.for_symbol(1), ids(&[0, 3, 6]).as_slice());
        assert_eq!(p2.for_symbol(2), ids(&[1, 2]).as_slice());
        let p3 = f.per_set(3).unwrap();
        assert_eq!(p3.sizes(), vec![13, 6]);
    }

    #[test]
    fn definition_route_agrees() {
        let f = z3_family(3, 2);
        for n in 0..3 {
            for w in (n + 1)..=3 {
                assert_eq!(f.per_set_by_definition(n, w).unwrap(), f.per_set(n).unwrap());
            }
        }
        assert!(f.per_set_by_definition(2, 2).is_err());
    }

    #[test]
    fn essential_examples() {
        let f = z3_family(3, 2);
        let chain = f.chain();
        let e1 = essential_check(chain, &f.per_set(1).unwrap()).unwrap();
        assert!(e1.essential);
        assert_eq!(e1.stabilizer, ids(&[0]));
        let e2 = essential_check(chain, &f.per_set(2).unwrap()).unwrap();
        assert!(e2.essential);

        let constant = z3_family(3, 1);
        let p = constant.per_set_by_definition(1, 2).unwrap();
        assert_eq!(p.total(), 3);
        let e = essential_check(chain, &p).unwrap();
        assert!(!e.essential);
        assert_eq!(e.stabilizer, ids(&[0, 1, 2]));
        assert_eq!(e.witness, Some(ClassId(1)));
    }
}
