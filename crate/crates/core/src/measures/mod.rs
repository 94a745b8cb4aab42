//! Periodic empirical measures μₘ = |Dₘ|⁻¹ Σ_{u ∈ Dₘ} δ_{σ^{u⁻¹}ηₘ}.
//!
//! ηₘ(g) = η(d) for the d ∈ Dₘ with gΓₘ = dΓₘ, so ηₘ and each orbit point
//! x_u(g) = ηₘ(ug) only depend on classes in Qₘ. Orbit points are therefore
//! indexed by qₘ(u), and every mass below is an exact count over Qₘ.

mod haar;
mod partition;
mod simplex;

use rayon::prelude::*;
use rustc_hash::FxHashSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{ClassId, GroupElement};
use crate::scalar::Scalar;
use crate::toeplitz::{FamilyVariant, ToeplitzFamily};

pub use haar::{haar_pushforward_check, HaarReport};
pub use partition::{
    partition_masses, verify_an_recursion, window_forces_coordinate, AnResidual, CoordinateReport,
    PartitionMasses, PartitionWindow,
};
pub use simplex::{an_matrix, limit_vectors, relabeled_masses, LevelMatrix, SimplexData, SimplexLevel};

/// The Γₘ-periodization ηₘ of a family, evaluated through Qₘ.
#[derive(Clone, Debug)]
pub struct EmpiricalMeasure<'a> {
    family: &'a ToeplitzFamily,
    level: usize,
    symbols: Vec<u32>,
}

impl<'a> EmpiricalMeasure<'a> {
    pub fn new(family: &'a ToeplitzFamily, m: usize) -> Result<EmpiricalMeasure<'a>> {
        let size = family.tower().size(m)? as usize;
        let symbols = (0..size)
            .map(|p| family.cell_of_level_position(m, p).map(|c| c.symbol))
            .collect::<Result<_>>()?;
        Ok(EmpiricalMeasure {
            family,
            level: m,
            symbols,
        })
    }

    /// Same periodization with every point of Dₘ that is not yet periodic at
    /// level m (the set J(m) for the multi-symbol family) set to `symbol`.
    pub fn relabeled(family: &'a ToeplitzFamily, m: usize, symbol: u32) -> Result<EmpiricalMeasure<'a>> {
        let mut out = Self::new(family, m)?;
        for (p, s) in out.symbols.iter_mut().enumerate() {
            if family.cell_of_level_position(m, p)?.level as usize >= m {
                *s = symbol;
            }
        }
        Ok(out)
    }

    pub fn family(&self) -> &'a ToeplitzFamily {
        self.family
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn size(&self) -> u64 {
        self.symbols.len() as u64
    }

    /// Orbit indices: qₘ(u) for u ∈ Dₘ, in tower order.
    pub fn orbit(&self) -> &[ClassId] {
        self.family.tower().classes(self.level).unwrap_or(&[])
    }

    pub fn class(&self, g: &GroupElement) -> Result<ClassId> {
        self.family.chain().quotient_class(g, self.level)
    }

    pub fn symbol_of_class(&self, c: ClassId) -> Result<u32> {
        Ok(self.symbols[self.family.tower().position_of_class(self.level, c)?])
    }

    /// ηₘ(g).
    pub fn eval(&self, g: &GroupElement) -> Result<u32> {
        self.symbol_of_class(self.class(g)?)
    }

    /// x_u(g) = ηₘ(ug), from cu = qₘ(u) and cg = qₘ(g).
    pub fn point(&self, cu: ClassId, cg: ClassId) -> Result<u32> {
        self.symbol_of_class(self.family.chain().class_mul(self.level, cu, cg))
    }

    /// Class of u·g at level m.
    pub fn shift(&self, cu: ClassId, cg: ClassId) -> ClassId {
        self.family.chain().class_mul(self.level, cu, cg)
    }

    /// Number of orbit points satisfying `pred`.
    pub fn count<F>(&self, pred: F) -> Result<u64>
    where
        F: Fn(ClassId) -> Result<bool> + Sync,
    {
        self.orbit()
            .par_iter()
            .map(|&c| pred(c).map(u64::from))
            .try_reduce(|| 0, |a, b| Ok(a + b))
    }

    pub fn cylinder_count(&self, pattern: &CylinderPattern) -> Result<u64> {
        let keys: Vec<(ClassId, u32)> = pattern
            .entries()
            .iter()
            .map(|(g, s)| Ok((self.class(g)?, *s)))
            .collect::<Result<_>>()?;
        self.count(|cu| {
            for &(cg, s) in &keys {
                if self.point(cu, cg)? != s {
                    return Ok(false);
                }
            }
            Ok(true)
        })
    }

    /// μₘ of the cylinder: #{u ∈ Dₘ : ηₘ(uf) = P(f) for all f ∈ F} / |Dₘ|.
    pub fn cylinder_mass<S: Scalar>(&self, pattern: &CylinderPattern) -> Result<S> {
        Ok(S::from_ratio(self.cylinder_count(pattern)?, self.size()))
    }
}

/// A finite pattern F → Σ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CylinderPattern {
    entries: Vec<(GroupElement, u32)>,
}

impl CylinderPattern {
    pub fn new(entries: Vec<(GroupElement, u32)>) -> Result<CylinderPattern> {
        let mut seen = FxHashSet::default();
        for (g, _) in &entries {
            if !seen.insert(g) {
                return Err(Error::InvalidParameters(format!("element {g} appears twice in the pattern")));
            }
        }
        Ok(CylinderPattern { entries })
    }

    /// [i] = {x : x(1) = i}.
    pub fn symbol(identity: GroupElement, i: u32) -> CylinderPattern {
        CylinderPattern {
            entries: vec![(identity, i)],
        }
    }

    pub fn entries(&self) -> &[(GroupElement, u32)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// μₘ([i]) by counting orbit points and by the per-set formula.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymbolMasses<S> {
    pub level: usize,
    pub symbols: Vec<u32>,
    pub counted: Vec<S>,
    pub formula: Vec<S>,
    pub counts: Vec<u64>,
    pub agree: bool,
    pub sums_to_one: bool,
}

/// μₘ([i]) for every symbol.
///
/// The formula route uses μₘ([i]) = (aₘ,ᵢ + [i = α_{m+1}]·|J(m)|)/|Dₘ|; for the
/// binary family the non-periodic points of Dₘ are counted by their symbol.
pub fn symbol_masses<S: Scalar>(family: &ToeplitzFamily, m: usize) -> Result<SymbolMasses<S>> {
    let measure = EmpiricalMeasure::new(family, m)?;
    let size = measure.size();
    let id = family.chain().identity();
    let symbols = family.alphabet();
    let counts: Vec<u64> = symbols
        .iter()
        .map(|&s| measure.cylinder_count(&CylinderPattern::symbol(id.clone(), s)))
        .collect::<Result<_>>()?;

    let per = family.per_set(m)?;
    let mut formula_counts = per.sizes();
    match family.variant() {
        FamilyVariant::MultiSymbol => {
            let a = family.cycle().alpha(m + 1);
            formula_counts[family.symbol_index(a)] += family.jset_size(m)?;
        }
        FamilyVariant::RegularBinary => {
            for p in 0..size as usize {
                let cell = family.cell_of_level_position(m, p)?;
                if cell.level as usize >= m {
                    formula_counts[family.symbol_index(cell.symbol)] += 1;
                }
            }
        }
    }
    let total: u64 = counts.iter().sum();
    Ok(SymbolMasses {
        level: m,
        counted: counts.iter().map(|&c| S::from_ratio(c, size)).collect(),
        formula: formula_counts.iter().map(|&c| S::from_ratio(c, size)).collect(),
        agree: counts == formula_counts,
        sums_to_one: total == size,
        counts,
        symbols,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use num_traits::One;

    use super::*;
    use crate::group::{BackendSpec, QuotientChain};
    use crate::tower::{DomainTower, TowerOptions};
    use crate::Rational;

    pub(crate) fn z3_family(depth: usize, r: u32) -> ToeplitzFamily {
        let chain = QuotientChain::new(BackendSpec::z_constant(3, depth)).unwrap();
        let tower = DomainTower::build(&chain, depth, &TowerOptions::canonical()).unwrap();
        ToeplitzFamily::multi_symbol(Arc::new(tower), r).unwrap()
    }

    fn q(p: u64, d: u64) -> Rational {
        Rational::from_ratio(p, d)
    }

    #[test]
    fn cylinder_examples() {
        let f = z3_family(3, 2);
        let mu1 = EmpiricalMeasure::new(&f, 1).unwrap();
        let p = CylinderPattern::symbol(GroupElement::Int(0), 2);
        assert_eq!(mu1.cylinder_mass::<Rational>(&p).unwrap(), q(2, 3));
        let empty = CylinderPattern::new(vec![]).unwrap();
        assert_eq!(mu1.cylinder_mass::<Rational>(&empty).unwrap(), Rational::one());
        let mu2 = EmpiricalMeasure::new(&f, 2).unwrap();
        let p = CylinderPattern::symbol(GroupElement::Int(0), 1);
        assert_eq!(mu2.cylinder_mass::<Rational>(&p).unwrap(), q(7, 9));
        assert!(CylinderPattern::new(vec![(GroupElement::Int(1), 1), (GroupElement::Int(1), 2)]).is_err());
    }

    #[test]
    fn periodization_is_periodic_and_agrees_on_domain() {
        let f = z3_family(3, 2);
        let mu = EmpiricalMeasure::new(&f, 2).unwrap();
        for g in -20..20 {
            assert_eq!(
                mu.eval(&GroupElement::Int(g)).unwrap(),
                mu.eval(&GroupElement::Int(g + 9)).unwrap()
            );
        }
        for g in 0..9 {
            let g = GroupElement::Int(g);
            assert_eq!(mu.eval(&g).unwrap(), f.eval(&g).unwrap().symbol);
        }
    }

    #[test]
    fn symbol_mass_examples() {
        let f = z3_family(3, 2);
        let m1 = symbol_masses::<Rational>(&f, 1).unwrap();
        assert_eq!(m1.counted, vec![q(1, 3), q(2, 3)]);
        assert!(m1.agree && m1.sums_to_one);
        let m2 = symbol_masses::<Rational>(&f, 2).unwrap();
        assert_eq!(m2.counted, vec![q(7, 9), q(2, 9)]);
        assert!(m2.agree);
        let one = z3_family(2, 1);
        assert_eq!(symbol_masses::<Rational>(&one, 2).unwrap().counted, vec![Rational::one()]);
    }
}
