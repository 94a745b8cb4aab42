//! Nested fundamental domains D₀ = {1} ⊆ D₁ ⊆ … ⊆ D_N.
//!
//! Dᵢ is a transversal of Γᵢ, and Dᵢ₊₁ is the disjoint union of the
//! translates v·Dᵢ for v in Tᵢ₊₁ = Dᵢ₊₁ ∩ Γᵢ. Elements are stored so that
//! Dᵢ is a prefix of Dᵢ₊₁ and Dᵢ₊₁ lists the blocks v·Dᵢ in the order of Tᵢ₊₁.

use std::collections::BTreeSet;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{BackendSpec, ClassId, GroupElement, QuotientChain};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TowerMode {
    /// ℤ: Dₙ = {0, …, Mₙ−1}; ℤᵈ: boxes. Falls back to greedy on F₂.
    Canonical,
    /// First-found transversals in enumeration order.
    #[default]
    Greedy,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerOptions {
    pub mode: TowerMode,
    /// Enumeration radius cap for greedy search. `None` uses the backend
    /// default: unbounded on ℤ and ℤᵈ, [`DEFAULT_F2_RADIUS`] on F₂.
    pub max_radius: Option<u32>,
}

pub const DEFAULT_F2_RADIUS: u32 = 16;

impl Default for TowerOptions {
    fn default() -> Self {
        TowerOptions {
            mode: TowerMode::Greedy,
            max_radius: None,
        }
    }
}

impl TowerOptions {
    pub fn canonical() -> Self {
        TowerOptions {
            mode: TowerMode::Canonical,
            max_radius: None,
        }
    }
}

#[derive(Clone, Debug)]
struct Level {
    elements: Vec<GroupElement>,
    classes: Vec<ClassId>,
    index: FxHashMap<ClassId, u32>,
    transversal: Vec<GroupElement>,
}

#[derive(Clone, Debug)]
pub struct DomainTower {
    chain: QuotientChain,
    mode: TowerMode,
    levels: Vec<Level>,
}

impl DomainTower {
    /// Builds D₁..D_depth over `chain`.
    pub fn build(chain: &QuotientChain, depth: usize, opts: &TowerOptions) -> Result<DomainTower> {
        if depth > chain.depth() {
            return Err(Error::LevelOutOfRange {
                level: depth,
                depth: chain.depth(),
            });
        }
        let canonical = opts.mode == TowerMode::Canonical && !matches!(chain.spec(), BackendSpec::F2Sanov { .. });
        let lists = if canonical {
            canonical_lists(chain, depth)
        } else {
            greedy_lists(chain, depth, opts)?
        };
        let mode = if canonical { TowerMode::Canonical } else { TowerMode::Greedy };
        Ok(DomainTower::from_lists(chain.clone(), mode, lists))
    }

    /// Assembles a tower from explicit D₁..D_N lists without validating it.
    /// Duplicate classes keep their first position in the index.
    pub fn from_lists(chain: QuotientChain, mode: TowerMode, lists: Vec<Vec<GroupElement>>) -> DomainTower {
        let mut levels = Vec::with_capacity(lists.len() + 1);
        levels.push(Level {
            elements: vec![chain.identity()],
            classes: vec![ClassId(0)],
            index: std::iter::once((ClassId(0), 0)).collect(),
            transversal: vec![chain.identity()],
        });
        for (k, elements) in lists.into_iter().enumerate() {
            let i = k + 1;
            let classes: Vec<ClassId> = elements.iter().map(|g| chain.class_unchecked(g, i)).collect();
            let mut index = FxHashMap::default();
            index.reserve(classes.len());
            for (p, c) in classes.iter().enumerate() {
                index.entry(*c).or_insert(p as u32);
            }
            let e_prev = chain.class_identity(i - 1);
            let transversal = elements
                .iter()
                .filter(|g| chain.class_unchecked(g, i - 1) == e_prev)
                .cloned()
                .collect();
            levels.push(Level {
                elements,
                classes,
                index,
                transversal,
            });
        }
        DomainTower { chain, mode, levels }
    }

    pub fn chain(&self) -> &QuotientChain {
        &self.chain
    }

    pub fn mode(&self) -> TowerMode {
        self.mode
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    fn level(&self, i: usize) -> Result<&Level> {
        self.levels.get(i).ok_or(Error::LevelOutOfRange {
            level: i,
            depth: self.depth(),
        })
    }

    /// |Dᵢ|, with |D₀| = 1.
    pub fn size(&self, i: usize) -> Result<u64> {
        Ok(self.level(i)?.elements.len() as u64)
    }

    pub fn sizes(&self) -> Vec<u64> {
        self.levels.iter().map(|l| l.elements.len() as u64).collect()
    }

    /// |Dᵢ₊₁| / |Dᵢ| as an integer (exact on valid towers).
    pub fn ratio(&self, i: usize) -> Result<u64> {
        Ok(self.size(i + 1)? / self.size(i)?)
    }

    pub fn elements(&self, i: usize) -> Result<&[GroupElement]> {
        Ok(&self.level(i)?.elements)
    }

    /// Classes qᵢ(d) of the elements of Dᵢ, in list order.
    pub fn classes(&self, i: usize) -> Result<&[ClassId]> {
        Ok(&self.level(i)?.classes)
    }

    /// Tᵢ = Dᵢ ∩ Γᵢ₋₁ in list order (T₁ = D₁, T₀ = {1}).
    pub fn transversal(&self, i: usize) -> Result<&[GroupElement]> {
        Ok(&self.level(i)?.transversal)
    }

    /// Position in Dᵢ of the element with class `c`.
    pub fn position_of_class(&self, i: usize, c: ClassId) -> Result<usize> {
        self.level(i)?
            .index
            .get(&c)
            .map(|&p| p as usize)
            .ok_or_else(|| Error::InvalidParameters(format!("class {} has no representative in D_{i}", c.0)))
    }

    pub fn position_of(&self, g: &GroupElement, i: usize) -> Result<usize> {
        let c = self.chain.quotient_class(g, i)?;
        self.position_of_class(i, c)
    }

    /// The unique d ∈ Dᵢ with gΓᵢ = dΓᵢ.
    pub fn representative(&self, g: &GroupElement, i: usize) -> Result<GroupElement> {
        let p = self.position_of(g, i)?;
        Ok(self.levels[i].elements[p].clone())
    }

    /// g = γ·d with γ ∈ Γᵢ and d ∈ Dᵢ.
    pub fn coset_decompose(&self, g: &GroupElement, i: usize) -> Result<(GroupElement, GroupElement)> {
        let d = self.representative(g, i)?;
        let gamma = self.chain.multiply(g, &self.chain.invert(&d)?)?;
        Ok((gamma, d))
    }

    pub fn contains(&self, g: &GroupElement, i: usize) -> Result<bool> {
        let c = self.chain.quotient_class(g, i)?;
        Ok(match self.level(i)?.index.get(&c) {
            Some(&p) => &self.levels[i].elements[p as usize] == g,
            None => false,
        })
    }

    /// |∂_F Dₙ| / |Dₙ| with ∂_F Dₙ = {v ∈ Dₙ : vF ⊄ Dₙ}.
    pub fn boundary_ratio<S: Scalar>(&self, f: &[GroupElement], n: usize) -> Result<S> {
        let level = self.level(n)?;
        let mut boundary = 0u64;
        for v in &level.elements {
            for x in f {
                if !self.contains(&self.chain.multiply(v, x)?, n)? {
                    boundary += 1;
                    break;
                }
            }
        }
        Ok(S::from_ratio(boundary, level.elements.len() as u64))
    }

    /// Same tower with one element of Dᵢ replaced, for building broken fixtures.
    pub fn with_replaced(&self, i: usize, pos: usize, g: GroupElement) -> Result<DomainTower> {
        let mut lists: Vec<Vec<GroupElement>> = self.levels[1..].iter().map(|l| l.elements.clone()).collect();
        let slot = lists
            .get_mut(i.wrapping_sub(1))
            .and_then(|l| l.get_mut(pos))
            .ok_or_else(|| Error::InvalidParameters(format!("no position {pos} in D_{i}")))?;
        *slot = g;
        Ok(DomainTower::from_lists(self.chain.clone(), self.mode, lists))
    }

    /// Checks nesting, the transversal property, the size of Tᵢ₊₁ and the tiling.
    pub fn validate(&self) -> TowerReport {
        let mut items = Vec::new();
        let id = self.chain.identity();
        let d1_has_id = self.levels.get(1).is_some_and(|l| l.elements.contains(&id));
        items.push(ValidationItem::new(
            Invariant::Nesting,
            1,
            d1_has_id || self.depth() == 0,
            if d1_has_id { String::new() } else { "identity missing from D_1".into() },
        ));
        for i in 1..=self.depth() {
            let lvl = &self.levels[i];
            let prev = &self.levels[i - 1];

            if i >= 2 {
                let set: FxHashSet<&GroupElement> = lvl.elements.iter().collect();
                let outside: Vec<&GroupElement> = prev.elements.iter().filter(|g| !set.contains(g)).collect();
                let mut it = ValidationItem::new(
                    Invariant::Nesting,
                    i,
                    outside.is_empty(),
                    format!("{} elements of D_{} missing from D_{i}", outside.len(), i - 1),
                );
                it.offending = outside.into_iter().take(16).cloned().collect();
                items.push(it);
            }

            let order = self.chain.orders()[i];
            let mut seen: FxHashSet<ClassId> = FxHashSet::default();
            let mut duplicates = Vec::new();
            for (g, c) in lvl.elements.iter().zip(&lvl.classes) {
                if !seen.insert(*c) {
                    duplicates.push(g.clone());
                }
            }
            let bijective = duplicates.is_empty() && lvl.elements.len() as u64 == order;
            let mut it = ValidationItem::new(
                Invariant::Transversal,
                i,
                bijective,
                format!(
                    "|D_{i}| = {}, |Q_{i}| = {order}, {} distinct classes",
                    lvl.elements.len(),
                    seen.len()
                ),
            );
            if !bijective {
                it.missing_classes = missing_classes(&self.chain, i, &seen);
                it.offending = duplicates.into_iter().take(16).collect();
            }
            items.push(it);

            let ratio_ok = order.is_multiple_of(self.chain.orders()[i - 1]);
            let expected = order / self.chain.orders()[i - 1];
            let t = &lvl.transversal;
            let t_ok = ratio_ok && t.first() == Some(&id) && t.len() as u64 == expected;
            items.push(ValidationItem::new(
                Invariant::TransversalSize,
                i,
                t_ok,
                format!("|T_{i}| = {}, expected {expected}, identity first: {}", t.len(), t.first() == Some(&id)),
            ));

            let mut produced: FxHashSet<GroupElement> = FxHashSet::default();
            produced.reserve(lvl.elements.len());
            let mut repeats = Vec::new();
            for v in t {
                for d in &prev.elements {
                    let x = self.chain.multiply(v, d).expect("tower elements share a backend");
                    if !produced.insert(x.clone()) {
                        repeats.push(x);
                    }
                }
            }
            let target: FxHashSet<&GroupElement> = lvl.elements.iter().collect();
            let uncovered: Vec<GroupElement> =
                lvl.elements.iter().filter(|g| !produced.contains(*g)).cloned().collect();
            let stray: Vec<GroupElement> = produced.iter().filter(|g| !target.contains(g)).cloned().collect();
            let tiles = repeats.is_empty() && uncovered.is_empty() && stray.is_empty();
            let mut it = ValidationItem::new(
                Invariant::Tiling,
                i,
                tiles,
                format!(
                    "{} repeated, {} uncovered, {} outside D_{i}",
                    repeats.len(),
                    uncovered.len(),
                    stray.len()
                ),
            );
            let mut off: Vec<GroupElement> = repeats;
            off.extend(uncovered);
            let mut stray = stray;
            stray.sort();
            off.extend(stray);
            it.offending = off.into_iter().take(16).collect();
            items.push(it);
        }
        TowerReport {
            depth: self.depth(),
            passed: items.iter().all(|x| x.passed),
            items,
        }
    }

    pub fn to_dump(&self) -> TowerDump {
        TowerDump {
            backend: self.chain.spec().clone(),
            mode: self.mode,
            levels: self.levels[1..].iter().map(|l| l.elements.clone()).collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_dump())?)
    }

    pub fn from_dump(dump: TowerDump) -> Result<DomainTower> {
        let chain = QuotientChain::new(dump.backend)?;
        if dump.levels.len() > chain.depth() {
            return Err(Error::LevelOutOfRange {
                level: dump.levels.len(),
                depth: chain.depth(),
            });
        }
        for (k, level) in dump.levels.iter().enumerate() {
            for g in level {
                chain.quotient_class(g, k + 1)?;
            }
        }
        Ok(DomainTower::from_lists(chain, dump.mode, dump.levels))
    }

    pub fn from_json(s: &str) -> Result<DomainTower> {
        DomainTower::from_dump(serde_json::from_str(s)?)
    }
}

fn missing_classes(chain: &QuotientChain, i: usize, seen: &FxHashSet<ClassId>) -> Vec<ClassId> {
    let all = enumerate_classes(chain, i);
    let mut missing: Vec<ClassId> = all.into_iter().filter(|c| !seen.contains(c)).collect();
    missing.sort();
    missing.truncate(64);
    missing
}

/// All of Qᵢ, by breadth-first closure of the generator classes.
pub fn enumerate_classes(chain: &QuotientChain, i: usize) -> Vec<ClassId> {
    let gens: Vec<ClassId> = match chain.spec() {
        BackendSpec::Z { .. } => vec![chain.class_unchecked(&GroupElement::Int(1), i)],
        BackendSpec::Zd { axes } => (0..axes.len())
            .map(|k| {
                let mut v = vec![0; axes.len()];
                v[k] = 1;
                chain.class_unchecked(&GroupElement::Vector(v), i)
            })
            .collect(),
        BackendSpec::F2Sanov { .. } => ["a", "b"]
            .iter()
            .map(|s| chain.class_unchecked(&s.parse().expect("generator word"), i))
            .collect(),
    };
    let start = chain.class_identity(i);
    let mut seen: FxHashSet<ClassId> = std::iter::once(start).collect();
    let mut order = vec![start];
    let mut head = 0;
    while head < order.len() {
        let c = order[head];
        head += 1;
        for &g in &gens {
            let n = chain.class_mul(i, c, g);
            if seen.insert(n) {
                order.push(n);
            }
        }
    }
    order
}

fn canonical_lists(chain: &QuotientChain, depth: usize) -> Vec<Vec<GroupElement>> {
    match chain.spec() {
        BackendSpec::Z { .. } => (1..=depth)
            .map(|n| {
                let m = chain.z_modulus(n).expect("z chain") as i64;
                (0..m).map(GroupElement::Int).collect()
            })
            .collect(),
        BackendSpec::Zd { axes } => {
            let dim = axes.len();
            let mut lists: Vec<Vec<GroupElement>> = Vec::new();
            let mut prev: Vec<GroupElement> = vec![GroupElement::Vector(vec![0; dim])];
            for n in 1..=depth {
                let small = chain.zd_moduli(n - 1).expect("zd chain");
                let ratios: Vec<u64> = axes.iter().map(|a| a[n - 1]).collect();
                let count: u64 = ratios.iter().product();
                let mut next = Vec::with_capacity(prev.len() * count as usize);
                for idx in 0..count {
                    let mut t = idx;
                    let shift: Vec<i64> = (0..dim)
                        .map(|k| {
                            let a = t % ratios[k];
                            t /= ratios[k];
                            (a * small[k]) as i64
                        })
                        .collect();
                    for d in &prev {
                        let GroupElement::Vector(v) = d else { unreachable!() };
                        next.push(GroupElement::Vector(v.iter().zip(&shift).map(|(x, s)| x + s).collect()));
                    }
                }
                lists.push(next.clone());
                prev = next;
            }
            lists
        }
        BackendSpec::F2Sanov { .. } => unreachable!("no canonical F2 tower"),
    }
}

fn greedy_lists(chain: &QuotientChain, depth: usize, opts: &TowerOptions) -> Result<Vec<Vec<GroupElement>>> {
    let cap = opts.max_radius.unwrap_or(match chain.spec() {
        BackendSpec::F2Sanov { .. } => DEFAULT_F2_RADIUS,
        _ => u32::MAX,
    });
    let mut lists = Vec::new();
    let mut prev = vec![chain.identity()];
    for i in 1..=depth {
        let need = chain.orders()[i] / chain.orders()[i - 1];
        let e_prev = chain.class_identity(i - 1);
        let mut found: BTreeSet<ClassId> = BTreeSet::new();
        let mut t = Vec::with_capacity(need as usize);
        let mut stream = chain.stream();
        while (t.len() as u64) < need {
            let (g, radius) = stream.next_with_radius();
            if radius > cap {
                return Err(Error::TransversalIncomplete {
                    level: i,
                    missing: need - t.len() as u64,
                    radius: cap,
                });
            }
            let c = chain.class_unchecked(&g, i);
            if chain.project_unchecked(c, i, i - 1) != e_prev {
                continue;
            }
            if found.insert(c) {
                t.push(g);
            }
        }
        let mut next = Vec::with_capacity(prev.len() * t.len());
        for v in &t {
            for d in &prev {
                next.push(chain.multiply(v, d)?);
            }
        }
        lists.push(next.clone());
        prev = next;
    }
    Ok(lists)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Invariant {
    /// 1 ∈ D₁ and Dᵢ ⊆ Dᵢ₊₁.
    Nesting,
    /// qᵢ restricted to Dᵢ is a bijection onto Qᵢ.
    Transversal,
    /// 1 ∈ Tᵢ₊₁ and |Tᵢ₊₁| = |Qᵢ₊₁|/|Qᵢ|.
    TransversalSize,
    /// Dᵢ₊₁ is the disjoint union of v·Dᵢ, v ∈ Tᵢ₊₁.
    Tiling,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationItem {
    pub invariant: Invariant,
    pub level: usize,
    pub passed: bool,
    pub detail: String,
    pub missing_classes: Vec<ClassId>,
    pub offending: Vec<GroupElement>,
}

impl ValidationItem {
    fn new(invariant: Invariant, level: usize, passed: bool, detail: String) -> Self {
        ValidationItem {
            invariant,
            level,
            passed,
            detail,
            missing_classes: Vec::new(),
            offending: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TowerReport {
    pub depth: usize,
    pub passed: bool,
    pub items: Vec<ValidationItem>,
}

impl TowerReport {
    pub fn failures(&self) -> impl Iterator<Item = &ValidationItem> {
        self.items.iter().filter(|i| !i.passed)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerDump {
    pub backend: BackendSpec,
    pub mode: TowerMode,
    /// D₁..D_N, element canonical forms in order.
    pub levels: Vec<Vec<GroupElement>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use num_traits::Zero;

    fn ints(v: &[i64]) -> Vec<GroupElement> {
        v.iter().map(|&x| GroupElement::Int(x)).collect()
    }

    fn z3_canonical(depth: usize) -> DomainTower {
        let chain = QuotientChain::new(BackendSpec::z_constant(3, depth)).unwrap();
        DomainTower::build(&chain, depth, &TowerOptions::canonical()).unwrap()
    }

    #[test]
    fn canonical_z_depth_two() {
        let t = z3_canonical(2);
        assert_eq!(t.elements(1).unwrap(), ints(&[0, 1, 2]).as_slice());
        assert_eq!(t.transversal(2).unwrap(), ints(&[0, 3, 6]).as_slice());
        assert_eq!(t.elements(2).unwrap(), ints(&(0..9).collect::<Vec<_>>()).as_slice());
        assert!(t.validate().passed);
    }

    #[test]
    fn greedy_z_is_centered() {
        let chain = QuotientChain::new(BackendSpec::z_constant(3, 2)).unwrap();
        let t = DomainTower::build(&chain, 2, &TowerOptions::default()).unwrap();
        assert_eq!(t.elements(1).unwrap(), ints(&[0, 1, -1]).as_slice());
        assert_eq!(t.transversal(2).unwrap(), ints(&[0, 3, -3]).as_slice());
        assert!(t.validate().passed);
    }

    #[test]
    fn f2_depth_one() {
        let chain = QuotientChain::new(BackendSpec::f2_consecutive(1)).unwrap();
        let t = DomainTower::build(&chain, 1, &TowerOptions::default()).unwrap();
        assert_eq!(t.size(1).unwrap(), 24);
        let distinct: FxHashSet<_> = t.classes(1).unwrap().iter().collect();
        assert_eq!(distinct.len(), 24);
        assert!(t.validate().passed);
    }

    #[test]
    fn radius_cap_reports_missing_classes() {
        let chain = QuotientChain::new(BackendSpec::f2_consecutive(1)).unwrap();
        let opts = TowerOptions {
            mode: TowerMode::Greedy,
            max_radius: Some(1),
        };
        match DomainTower::build(&chain, 1, &opts) {
            Err(Error::TransversalIncomplete { level: 1, missing, radius: 1 }) => assert_eq!(missing, 19),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn validation_catches_missing_class_and_duplicates() {
        let chain = QuotientChain::new(BackendSpec::z_constant(3, 2)).unwrap();
        let short = DomainTower::from_lists(
            chain.clone(),
            TowerMode::Canonical,
            vec![ints(&[0, 1, 2]), ints(&[0, 1, 2, 3, 4, 5, 6, 7])],
        );
        let r = short.validate();
        assert!(!r.passed);
        let item = r
            .failures()
            .find(|i| i.invariant == Invariant::Transversal)
            .expect("transversal failure");
        assert_eq!(item.missing_classes, vec![ClassId(8)]);

        let dup = DomainTower::from_lists(
            chain,
            TowerMode::Canonical,
            vec![ints(&[0, 1, 2]), ints(&[0, 1, 2, 3, 4, 5, 3, 4, 5])],
        );
        let r = dup.validate();
        assert!(r.failures().any(|i| i.invariant == Invariant::Tiling));
    }

    #[test]
    fn representative_and_decomposition() {
        let t = z3_canonical(3);
        let g = GroupElement::Int(10);
        assert_eq!(t.representative(&g, 1).unwrap(), GroupElement::Int(1));
        assert_eq!(
            t.coset_decompose(&g, 1).unwrap(),
            (GroupElement::Int(9), GroupElement::Int(1))
        );
        let id = GroupElement::Int(0);
        assert_eq!(t.coset_decompose(&id, 2).unwrap(), (id.clone(), id.clone()));
        assert_eq!(
            t.coset_decompose(&GroupElement::Int(-18), 2).unwrap(),
            (GroupElement::Int(-18), id)
        );
        assert!(t.representative(&g, 4).is_err());
    }

    #[test]
    fn boundary_ratios() {
        let t = z3_canonical(2);
        let r: Rational = t.boundary_ratio(&ints(&[0, 1]), 2).unwrap();
        assert_eq!(r, Rational::new(1.into(), 9.into()));
        let z: Rational = t.boundary_ratio(&ints(&[0]), 2).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let chain = QuotientChain::new(BackendSpec::f2_consecutive(2)).unwrap();
        let t = DomainTower::build(&chain, 2, &TowerOptions::default()).unwrap();
        let a = t.to_json().unwrap();
        let b = DomainTower::from_json(&a).unwrap().to_json().unwrap();
        assert_eq!(a, b);
    }
}
