//! Limit vectors t⃗ᵢ and the transition matrices Aₙ.

use num_traits::{One, Zero};
use serde::Serialize;

use super::{CylinderPattern, EmpiricalMeasure};
use crate::error::{Error, Result};
use crate::scalar::{determinant, Scalar};
use crate::toeplitz::{density_sequence, FamilyVariant, ToeplitzFamily};
use crate::Rational;

/// t⃗ᵢ⁽ⁿ⁾ = (t₁, …, 1 − dₙ + tᵢ, …, t_r) with tⱼ = d_{n,j}.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimplexLevel<S> {
    pub level: usize,
    pub t: Vec<S>,
    pub defect: S,
    /// Row i is t⃗_{i+1}.
    pub vectors: Vec<Vec<S>>,
    pub determinant: S,
    /// det = (1 − dₙ)^{r−1}.
    pub determinant_holds: bool,
    /// t⃗ᵢ − t⃗ⱼ = (1 − dₙ)(eᵢ − eⱼ) for all i, j.
    pub differences_hold: bool,
    /// Entries non-negative, each vector summing to 1.
    pub stochastic: bool,
    pub independent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimplexData<S> {
    pub r: u32,
    pub levels: Vec<SimplexLevel<S>>,
    /// Each tⱼ⁽ⁿ⁾ is non-decreasing in n.
    pub monotone: bool,
}

fn simplex_level(level: usize, t: &[Rational], defect: &Rational) -> SimplexLevel<Rational> {
    let r = t.len();
    let vectors: Vec<Vec<Rational>> = (0..r)
        .map(|i| {
            let mut v = t.to_vec();
            v[i] += defect;
            v
        })
        .collect();
    let det = determinant(&vectors);
    let mut expected = Rational::one();
    for _ in 1..r {
        expected *= defect;
    }
    let differences_hold = (0..r).all(|i| {
        (0..r).all(|j| {
            (0..r).all(|k| {
                let want = if i == j {
                    Rational::zero()
                } else if k == i {
                    defect.clone()
                } else if k == j {
                    -defect.clone()
                } else {
                    Rational::zero()
                };
                &vectors[i][k] - &vectors[j][k] == want
            })
        })
    });
    let stochastic = vectors
        .iter()
        .all(|v| v.iter().all(|x| *x >= Rational::zero()) && v.iter().sum::<Rational>() == Rational::one());
    SimplexLevel {
        level,
        t: t.to_vec(),
        defect: defect.clone(),
        independent: !det.is_zero(),
        determinant_holds: det == expected,
        determinant: det,
        differences_hold,
        stochastic,
        vectors,
    }
}

fn convert<S: Scalar>(l: SimplexLevel<Rational>) -> SimplexLevel<S> {
    let conv = |v: &[Rational]| v.iter().map(S::from_rational).collect::<Vec<S>>();
    SimplexLevel {
        level: l.level,
        t: conv(&l.t),
        defect: S::from_rational(&l.defect),
        vectors: l.vectors.iter().map(|v| conv(v)).collect(),
        determinant: S::from_rational(&l.determinant),
        determinant_holds: l.determinant_holds,
        differences_hold: l.differences_hold,
        stochastic: l.stochastic,
        independent: l.independent,
    }
}

/// Monotone lower bounds tⱼ⁽ⁿ⁾ and the assembled t⃗ᵢ⁽ⁿ⁾ for n = 1..=N.
pub fn limit_vectors<S: Scalar>(family: &ToeplitzFamily) -> Result<SimplexData<S>> {
    if family.variant() != FamilyVariant::MultiSymbol {
        return Err(Error::InvalidParameters("limit vectors belong to the multi-symbol family".into()));
    }
    let rows = density_sequence::<Rational>(family)?;
    let monotone = rows
        .windows(2)
        .all(|w| w[0].per_symbol.iter().zip(&w[1].per_symbol).all(|(a, b)| a <= b));
    let levels = rows
        .iter()
        .map(|row| convert(simplex_level(row.level, &row.per_symbol, &row.defect)))
        .collect();
    Ok(SimplexData {
        r: family.cycle().r(),
        levels,
        monotone,
    })
}

/// μₘ([j]) for every j after setting the non-periodic points of Dₘ to `symbol`,
/// counted over the orbit. For the multi-symbol family this is t⃗_symbol⁽ᵐ⁾.
pub fn relabeled_masses<S: Scalar>(family: &ToeplitzFamily, m: usize, symbol: u32) -> Result<Vec<S>> {
    if !family.alphabet().contains(&symbol) {
        return Err(Error::InvalidParameters(format!("symbol {symbol} is not in the alphabet")));
    }
    let measure = EmpiricalMeasure::relabeled(family, m, symbol)?;
    let id = family.chain().identity();
    family
        .alphabet()
        .iter()
        .map(|&s| measure.cylinder_mass(&CylinderPattern::symbol(id.clone(), s)))
        .collect()
}

/// The r×r matrix with Aₙμ⁽ⁿ⁺¹⁾ = μ⁽ⁿ⁾.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelMatrix<S> {
    pub level: usize,
    pub ratio: u64,
    /// α_{n+1}, the symbol whose row is dense.
    pub alpha: u32,
    pub entries: Vec<Vec<S>>,
    pub determinant: S,
    /// (ratio − 1)^{r−1} · ratio.
    pub expected_determinant: S,
    pub determinant_holds: bool,
    pub column_sums_equal: bool,
    pub invertible: bool,
}

pub fn an_matrix<S: Scalar>(family: &ToeplitzFamily, n: usize) -> Result<LevelMatrix<S>> {
    if n + 1 > family.depth() {
        return Err(Error::LevelOutOfRange {
            level: n + 1,
            depth: family.depth(),
        });
    }
    let ratio = family.tower().ratio(n)?;
    let r = family.cycle().r() as usize;
    let alpha = family.cycle().alpha(n + 1);
    let a = (alpha - 1) as usize;
    let rq = Rational::from_count(ratio);
    let entries: Vec<Vec<Rational>> = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| match (i == a, i == j) {
                    (true, true) => rq.clone(),
                    (true, false) => Rational::one(),
                    (false, true) => &rq - Rational::one(),
                    (false, false) => Rational::zero(),
                })
                .collect()
        })
        .collect();
    let det = determinant(&entries);
    let mut expected = rq.clone();
    for _ in 1..r {
        expected *= &rq - Rational::one();
    }
    let column_sums_equal = (0..r).all(|j| entries.iter().map(|row| &row[j]).sum::<Rational>() == rq);
    Ok(LevelMatrix {
        level: n,
        ratio,
        alpha,
        entries: entries
            .iter()
            .map(|row| row.iter().map(S::from_rational).collect())
            .collect(),
        determinant: S::from_rational(&det),
        expected_determinant: S::from_rational(&expected),
        determinant_holds: det == expected,
        column_sums_equal,
        invertible: !det.is_zero(),
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::super::tests::z3_family;
    use super::*;
    use crate::group::{BackendSpec, QuotientChain};
    use crate::tower::{DomainTower, TowerOptions};

    fn q(p: u64, d: u64) -> Rational {
        Rational::from_ratio(p, d)
    }

    fn int_rows(m: &LevelMatrix<Rational>) -> Vec<Vec<i64>> {
        m.entries
            .iter()
            .map(|r| r.iter().map(|x| x.to_integer().try_into().unwrap()).collect())
            .collect()
    }

    #[test]
    fn matrices_for_z3() {
        let f = z3_family(3, 2);
        let a1 = an_matrix::<Rational>(&f, 1).unwrap();
        assert_eq!(int_rows(&a1), vec![vec![2, 0], vec![1, 3]]);
        let a2 = an_matrix::<Rational>(&f, 2).unwrap();
        assert_eq!(int_rows(&a2), vec![vec![3, 1], vec![0, 2]]);
        for a in [&a1, &a2] {
            assert!(a.determinant_holds && a.column_sums_equal && a.invertible);
            assert_eq!(a.determinant, q(6, 1));
        }
        let one = an_matrix::<Rational>(&z3_family(2, 1), 1).unwrap();
        assert_eq!(int_rows(&one), vec![vec![3]]);
        assert!(an_matrix::<Rational>(&f, 3).is_err());
    }

    #[test]
    fn simplex_for_z3() {
        let f = z3_family(2, 2);
        let s = limit_vectors::<Rational>(&f).unwrap();
        let l2 = &s.levels[1];
        assert_eq!(l2.vectors[0], vec![q(7, 9), q(2, 9)]);
        assert_eq!(l2.vectors[1], vec![q(3, 9), q(6, 9)]);
        assert!(s.monotone);
        assert!(s.levels.iter().all(|l| l.differences_hold && l.determinant_holds && l.stochastic));
    }

    #[test]
    fn relabeling_realizes_every_vector() {
        let chain = QuotientChain::new(BackendSpec::Z {
            multipliers: vec![4, 16, 64],
        })
        .unwrap();
        let tower = DomainTower::build(&chain, 3, &TowerOptions::canonical()).unwrap();
        let f = ToeplitzFamily::multi_symbol(Arc::new(tower), 3).unwrap();
        let s = limit_vectors::<Rational>(&f).unwrap();
        let top = s.levels.last().unwrap();
        for i in 1..=3 {
            assert_eq!(relabeled_masses::<Rational>(&f, 3, i).unwrap(), top.vectors[i as usize - 1]);
        }
    }
}
