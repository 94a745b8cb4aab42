//! Broken towers and arrays on which the checks must fail.
//!
//! All fixtures start from ℤ with mⱼ ≡ 3, depth 4, r = 2, canonical tower.

use std::sync::Arc;

use super::CheckSpec;
use crate::error::Result;
use crate::group::{BackendSpec, GroupElement, QuotientChain};
use crate::toeplitz::ToeplitzFamily;
use crate::tower::{DomainTower, TowerOptions};

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub what: &'static str,
    pub family: ToeplitzFamily,
    pub check: CheckSpec,
}

pub fn base_family() -> Result<ToeplitzFamily> {
    let chain = QuotientChain::new(BackendSpec::z_constant(3, 4))?;
    let tower = DomainTower::build(&chain, 4, &TowerOptions::canonical())?;
    ToeplitzFamily::multi_symbol(Arc::new(tower), 2)
}

fn replaced(base: &ToeplitzFamily, level: usize, old: i64, new: i64) -> Result<ToeplitzFamily> {
    let tower = base.tower();
    let pos = tower.position_of(&GroupElement::Int(old), level)?;
    let broken = tower.with_replaced(level, pos, GroupElement::Int(new))?;
    ToeplitzFamily::multi_symbol(Arc::new(broken), base.cycle().r())
}

/// One fixture per check; each check must fail on its fixture.
pub fn mutation_fixtures() -> Result<Vec<Fixture>> {
    let base = base_family()?;
    let flipped = |p: usize| base.with_flipped_cell(p);
    let int = GroupElement::Int;
    Ok(vec![
        Fixture {
            name: "good_gamma",
            what: "26 replaced by 53 in D_3",
            family: replaced(&base, 3, 26, 53)?,
            check: CheckSpec::GoodGamma { n: 1, m: 3 },
        },
        Fixture {
            name: "good_patches",
            what: "cell 0 flipped",
            family: flipped(0)?,
            check: CheckSpec::GoodPatches { n: 1, m: 3 },
        },
        Fixture {
            name: "jset_recursion",
            what: "26 replaced by 53 in D_3",
            family: replaced(&base, 3, 26, 53)?,
            check: CheckSpec::JsetRecursion { i: 2 },
        },
        Fixture {
            name: "constancy",
            what: "cell 1 flipped",
            family: flipped(1)?,
            check: CheckSpec::Constancy { i: 1, gamma: int(0) },
        },
        Fixture {
            name: "rel_partition",
            what: "first cell of J(1) flipped",
            family: flipped(1)?,
            check: CheckSpec::RelPartition { n: 1, m: 3, w: 2 },
        },
        Fixture {
            name: "uy_equality",
            what: "first cell of J(2) flipped",
            family: flipped(4)?,
            check: CheckSpec::UyEquality { i: 1, k: 1, m: 4, w: 3 },
        },
        Fixture {
            name: "z_chain",
            what: "3 replaced by 12 in D_2 (D_2 no longer tiles D_3)",
            family: replaced(&base, 2, 3, 12)?,
            check: CheckSpec::ZChain { i: 1, k: 0, m: 4, w: 3 },
        },
        Fixture {
            name: "z_mass_trend",
            what: "cell 0 flipped",
            family: flipped(0)?,
            check: CheckSpec::ZMassTrend { i: 1 },
        },
    ])
}
