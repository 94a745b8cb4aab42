//! Densities of the periodic part and the regularity criterion d = 1.

use num_traits::{One, Zero};
use serde::Serialize;

use super::{FamilyVariant, ToeplitzFamily};
use crate::error::Result;
use crate::scalar::Scalar;
use crate::Rational;

/// dₙ = |Dₙ ∩ Per(η, Γₙ)| / |Dₙ| and its split by symbol.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityRow<S> {
    pub level: usize,
    pub size: u64,
    /// aₙ,ⱼ = |Dₙ ∩ Per(η, Γₙ, j)| per symbol of the alphabet.
    pub per_counts: Vec<u64>,
    pub d: S,
    pub per_symbol: Vec<S>,
    /// 1 − dₙ.
    pub defect: S,
    /// 1 − dₙ from sizes alone: the product formula for the multi-symbol
    /// family, 1/|Dₙ| (n odd) or 1/|Dₙ₋₁| − 1/|Dₙ| (n even) for the binary one.
    pub closed_form: S,
    pub closed_form_holds: bool,
    /// dₙ = dₙ₋₁ + (|Dₙ₋₁|/|Dₙ|)(1 − dₙ₋₁), multi-symbol only.
    pub recursion_holds: Option<bool>,
    /// |Sₙ| and whether it equals |Dₙ|/|Dₙ₋₁| − 1, binary only.
    pub sset_size: Option<u64>,
    pub sset_size_holds: Option<bool>,
}

fn ratio(p: u64, q: u64) -> Rational {
    Rational::from_ratio(p, q)
}

/// x_j = |D_j| / |D_{j+1}| for j = 0..N−1, with |D₀| = 1.
pub(crate) fn size_ratios(sizes: &[u64]) -> Vec<Rational> {
    sizes.windows(2).map(|w| ratio(w[0], w[1])).collect()
}

/// Exact densities for n = 1..=N, converted to `S` at the end.
pub fn density_sequence<S: Scalar>(family: &ToeplitzFamily) -> Result<Vec<DensityRow<S>>> {
    let sizes = family.tower().sizes();
    let x = size_ratios(&sizes);
    let binary = family.variant() == FamilyVariant::RegularBinary;
    let mut rows = Vec::with_capacity(family.depth());
    let mut prev_d = Rational::zero();
    let mut product = Rational::one();
    for n in 1..=family.depth() {
        let size = sizes[n];
        let per = family.per_set(n)?;
        let per_counts = per.sizes();
        let total: u64 = per_counts.iter().sum();
        let d = ratio(total, size);
        let defect = Rational::one() - &d;
        product *= Rational::one() - &x[n - 1];
        let (closed, recursion, sset_size, sset_holds) = if binary {
            let closed = if n % 2 == 1 {
                ratio(1, size)
            } else {
                ratio(1, sizes[n - 1]) - ratio(1, size)
            };
            let s = family.sset(n)?.len() as u64;
            (closed, None, Some(s), Some(s + 1 == size / sizes[n - 1]))
        } else {
            let rec = &prev_d + &x[n - 1] * (Rational::one() - &prev_d);
            (product.clone(), Some(rec == d), None, None)
        };
        rows.push(DensityRow {
            level: n,
            size,
            per_symbol: per_counts.iter().map(|&a| S::from_ratio(a, size)).collect(),
            per_counts,
            d: S::from_rational(&d),
            defect: S::from_rational(&defect),
            closed_form: S::from_rational(&closed),
            closed_form_holds: closed == defect,
            recursion_holds: recursion,
            sset_size,
            sset_size_holds: sset_holds,
        });
        prev_d = d;
    }
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// d = 1: uniquely ergodic.
    Regular,
    /// d < 1/2 < 1 − d: the multi-symbol family carries r distinct ergodic measures.
    MultiMeasure,
    /// d < 1 certified, but not d < 1/2.
    Irregular,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegularityRow<S> {
    /// j, for the factor 1 − x_j.
    pub index: usize,
    /// x_j = |D_j| / |D_{j+1}|.
    pub x: S,
    pub defect: S,
}

/// 1 − d ∈ [lower, upper].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailBracket<S> {
    pub lower: S,
    pub upper: S,
    /// Bound on Σ_{j ≥ N} x_j.
    pub tail_sum: S,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegularityReport<S> {
    pub variant: FamilyVariant,
    pub depth: usize,
    pub rows: Vec<RegularityRow<S>>,
    /// Every density row matches its closed form exactly.
    pub identities_hold: bool,
    /// max_j x_{j+1} / x_j over the built schedule.
    pub decay: Option<S>,
    pub bracket: Option<TailBracket<S>>,
    pub regime: Regime,
    pub regular: bool,
    pub multi_measure: bool,
    /// Levels i at which |D_{i−1}|/|D_i| < 1/i fails (binary family).
    pub schedule_warnings: Vec<usize>,
}

/// Classifies the limit density from the finite schedule.
///
/// The multi-symbol family has 1 − d = ∏_j (1 − x_j). If the ratios x_j decay
/// at least geometrically with factor q < 1 along the built schedule, the
/// unseen tail is extrapolated with the same factor, Σ_{j≥N} x_j ≤ x_{N−1}q/(1−q),
/// and 1 − d ∈ [(1 − d_N)(1 − S), 1 − d_N]. Non-decaying ratios make the product
/// diverge to 0 and the family regular. The binary family has 1 − dₙ ≤ 1/|Dₙ₋₁|
/// and is always regular.
pub fn regularity_report<S: Scalar>(family: &ToeplitzFamily) -> Result<RegularityReport<S>> {
    let rows = density_sequence::<Rational>(family)?;
    let sizes = family.tower().sizes();
    let x = size_ratios(&sizes);
    let n = family.depth();
    let identities_hold = rows.iter().all(|r| {
        r.closed_form_holds && r.recursion_holds.unwrap_or(true) && r.sset_size_holds.unwrap_or(true)
    });
    let defect_n = rows.last().map_or_else(Rational::one, |r| r.defect.clone());

    let mut decay: Option<Rational> = None;
    let mut growth_floor: Option<Rational> = None;
    for j in 0..x.len().saturating_sub(1) {
        let q = &x[j + 1] / &x[j];
        if decay.as_ref().is_none_or(|d| q > *d) {
            decay = Some(q.clone());
        }
        if growth_floor.as_ref().is_none_or(|d| q < *d) {
            growth_floor = Some(q);
        }
    }

    let half = ratio(1, 2);
    let mut bracket = None;
    let regime = if family.variant() == FamilyVariant::RegularBinary {
        Regime::Regular
    } else {
        match (&decay, &growth_floor) {
            (Some(_), Some(floor)) if *floor >= Rational::one() => Regime::Regular,
            (Some(q), _) if *q < Rational::one() => {
                let tail = &x[n - 1] * q / (Rational::one() - q);
                let lower = &defect_n * (Rational::one() - &tail);
                let regime = if lower > half {
                    Regime::MultiMeasure
                } else if lower > Rational::zero() {
                    Regime::Irregular
                } else {
                    Regime::Undetermined
                };
                bracket = Some(TailBracket {
                    lower: S::from_rational(&lower),
                    upper: S::from_rational(&defect_n),
                    tail_sum: S::from_rational(&tail),
                });
                regime
            }
            _ => Regime::Undetermined,
        }
    };

    let schedule_warnings = if family.variant() == FamilyVariant::RegularBinary {
        (2..=n).filter(|&i| ratio(sizes[i - 1], sizes[i]) >= ratio(1, i as u64)).collect()
    } else {
        Vec::new()
    };

    Ok(RegularityReport {
        variant: family.variant(),
        depth: n,
        rows: rows
            .iter()
            .enumerate()
            .map(|(j, r)| RegularityRow {
                index: j,
                x: S::from_rational(&x[j]),
                defect: S::from_rational(&r.defect),
            })
            .collect(),
        identities_hold,
        decay: decay.as_ref().map(S::from_rational),
        bracket,
        regime,
        regular: regime == Regime::Regular,
        multi_measure: regime == Regime::MultiMeasure,
        schedule_warnings,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::group::{BackendSpec, QuotientChain};
    use crate::tower::{DomainTower, TowerOptions};

    fn family(multipliers: Vec<u64>, variant: FamilyVariant, r: u32) -> ToeplitzFamily {
        let depth = multipliers.len();
        let chain = QuotientChain::new(BackendSpec::Z { multipliers }).unwrap();
        let tower = DomainTower::build(&chain, depth, &TowerOptions::canonical()).unwrap();
        ToeplitzFamily::build(Arc::new(tower), variant, r).unwrap()
    }

    #[test]
    fn z3_densities() {
        let f = family(vec![3, 3, 3], FamilyVariant::MultiSymbol, 2);
        let rows = density_sequence::<Rational>(&f).unwrap();
        let d: Vec<_> = rows.iter().map(|r| r.d.clone()).collect();
        assert_eq!(d, vec![ratio(1, 3), ratio(5, 9), ratio(19, 27)]);
        assert_eq!(rows[2].per_counts, vec![13, 6]);
        assert!(rows.iter().all(|r| r.closed_form_holds && r.recursion_holds == Some(true)));
        let rep = regularity_report::<Rational>(&f).unwrap();
        assert_eq!(rep.regime, Regime::Regular);
        assert_eq!(rep.rows[2].defect, ratio(8, 27));
    }

    #[test]
    fn four_power_schedule_is_multi_measure() {
        let f = family(vec![4, 16, 64, 256], FamilyVariant::MultiSymbol, 2);
        let rep = regularity_report::<Rational>(&f).unwrap();
        let want = ratio(3, 4) * ratio(15, 16) * ratio(63, 64) * ratio(255, 256);
        assert_eq!(rep.rows[3].defect, want);
        assert_eq!(rep.decay, Some(ratio(1, 4)));
        let b = rep.bracket.clone().unwrap();
        assert_eq!(b.tail_sum, ratio(1, 768));
        assert_eq!(b.lower, &want * ratio(767, 768));
        assert_eq!(rep.regime, Regime::MultiMeasure);
        assert!(rep.identities_hold);

        let approx = regularity_report::<f64>(&f).unwrap();
        assert!((approx.rows[3].defect - 0.688_5).abs() < 1e-3);
    }

    #[test]
    fn depth_one_is_undetermined() {
        let f = family(vec![3], FamilyVariant::MultiSymbol, 2);
        let rep = regularity_report::<Rational>(&f).unwrap();
        assert_eq!(rep.regime, Regime::Undetermined);
        assert_eq!(rep.rows[0].defect, ratio(2, 3));
    }

    #[test]
    fn binary_identities() {
        let f = family(vec![3, 3, 4, 5], FamilyVariant::RegularBinary, 2);
        let rows = density_sequence::<Rational>(&f).unwrap();
        assert!(rows.iter().all(|r| r.closed_form_holds && r.sset_size_holds == Some(true)));
        assert_eq!(rows[1].defect, ratio(1, 3) - ratio(1, 9));
        assert!(rows.windows(2).all(|w| w[0].d < w[1].d));
        let rep = regularity_report::<Rational>(&f).unwrap();
        assert!(rep.regular);
        assert!(rep.schedule_warnings.is_empty());
        let slow = family(vec![3, 3, 3], FamilyVariant::RegularBinary, 2);
        assert_eq!(regularity_report::<Rational>(&slow).unwrap().schedule_warnings, vec![3]);
    }
}
