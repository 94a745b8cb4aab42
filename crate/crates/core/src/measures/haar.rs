//! Pushforward of μₘ to the odometer coordinate at level n.

use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;

use super::EmpiricalMeasure;
use crate::error::{Error, Result};
use crate::group::{ClassId, GroupElement};
use crate::scalar::Scalar;
use crate::toeplitz::{FamilyVariant, ToeplitzFamily};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HaarReport<S> {
    pub m: usize,
    pub n: usize,
    pub classes: u64,
    /// 1/|Qₙ|.
    pub expected_mass: S,
    /// Orbit points per class read off qₙ(u); all equal iff uniform.
    pub min_count: u64,
    pub max_count: u64,
    pub coordinate_uniform: bool,
    /// The class recovered from the periodic structure of x_u alone.
    pub recovered: Option<RecoveredCoordinate>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RecoveredCoordinate {
    /// Orbit points whose Per-sets are c·Per(η) for exactly one c, with c⁻¹ = qₙ(u).
    pub matched: u64,
    pub mismatched: u64,
    pub uniform: bool,
    pub witness: Option<GroupElement>,
}

/// Per(x_u, Γₙ, α) for every α, as sets of Qₙ classes, from a scan over Dₘ.
fn per_sets(measure: &EmpiricalMeasure<'_>, cu: ClassId, n: usize, alphabet: &[u32]) -> Result<Vec<FxHashSet<ClassId>>> {
    let chain = measure.family().chain();
    let m = measure.level();
    let mut state: FxHashMap<ClassId, Option<u32>> = FxHashMap::default();
    for &cg in measure.orbit() {
        let s = measure.point(cu, cg)?;
        state
            .entry(chain.project_unchecked(cg, m, n))
            .and_modify(|v| {
                if *v != Some(s) {
                    *v = None;
                }
            })
            .or_insert(Some(s));
    }
    let mut out = vec![FxHashSet::default(); alphabet.len()];
    for (c, v) in state {
        if let Some(s) = v {
            if let Some(i) = alphabet.iter().position(|&a| a == s) {
                out[i].insert(c);
            }
        }
    }
    Ok(out)
}

/// Checks μₘ(qₙ = c) = 1/|Qₙ| for every c ∈ Qₙ.
///
/// The coordinate is read twice: directly as qₙ(u), and (for the multi-symbol
/// family with r ≥ 2 and m > n ≥ 1) as the unique c with Per(x_u, Γₙ) = c·Per(η, Γₙ),
/// which exists because Γₙ is an essential period.
pub fn haar_pushforward_check<S: Scalar>(family: &ToeplitzFamily, m: usize, n: usize) -> Result<HaarReport<S>> {
    if n > m || m > family.depth() {
        return Err(Error::InvalidParameters(format!(
            "haar check needs n <= m <= {}, got m={m}, n={n}",
            family.depth()
        )));
    }
    let chain = family.chain();
    let measure = EmpiricalMeasure::new(family, m)?;
    let q_n = chain.order(n)?;
    let size = measure.size();

    let mut counts: FxHashMap<ClassId, u64> = FxHashMap::default();
    for &cu in measure.orbit() {
        *counts.entry(chain.project_unchecked(cu, m, n)).or_default() += 1;
    }
    let min_count = counts.values().copied().min().unwrap_or(0);
    let max_count = counts.values().copied().max().unwrap_or(0);
    let coordinate_uniform = counts.len() as u64 == q_n && min_count == max_count && min_count * q_n == size;

    let recovered = if family.variant() == FamilyVariant::MultiSymbol && family.cycle().r() >= 2 && m > n && n >= 1 {
        let alphabet = family.alphabet();
        let reference = per_sets(&measure, chain.class_identity(m), n, &alphabet)?;
        let (anchor_idx, y0) = reference
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.is_empty())
            .min_by_key(|(_, s)| s.len())
            .and_then(|(i, s)| s.iter().min().map(|y| (i, *y)))
            .ok_or_else(|| Error::InvalidParameters(format!("Per(η, Γ_{n}) is empty")))?;
        let y0_inv = chain.class_inv(n, y0);
        let outcomes: Vec<Option<ClassId>> = measure
            .orbit()
            .par_iter()
            .map(|&cu| {
                let sets = per_sets(&measure, cu, n, &alphabet)?;
                let mut found = Vec::new();
                for &z in &sets[anchor_idx] {
                    let c = chain.class_mul(n, z, y0_inv);
                    let fits = reference.iter().zip(&sets).all(|(p, q)| {
                        p.len() == q.len() && p.iter().all(|&x| q.contains(&chain.class_mul(n, c, x)))
                    });
                    if fits {
                        found.push(c);
                    }
                }
                let want = chain.project_unchecked(cu, m, n);
                Ok(match found.as_slice() {
                    [c] if chain.class_inv(n, *c) == want => Some(want),
                    _ => None,
                })
            })
            .collect::<Result<_>>()?;
        let mut by_class: FxHashMap<ClassId, u64> = FxHashMap::default();
        for c in outcomes.iter().flatten() {
            *by_class.entry(*c).or_default() += 1;
        }
        let matched = outcomes.iter().filter(|o| o.is_some()).count() as u64;
        let witness = outcomes
            .iter()
            .position(|o| o.is_none())
            .map(|p| family.tower().elements(m).map(|d| d[p].clone()))
            .transpose()?;
        let each = size / q_n;
        Some(RecoveredCoordinate {
            matched,
            mismatched: size - matched,
            uniform: by_class.len() as u64 == q_n && by_class.values().all(|&v| v == each),
            witness,
        })
    } else {
        None
    };

    let passed = coordinate_uniform && recovered.as_ref().is_none_or(|r| r.uniform && r.mismatched == 0);
    Ok(HaarReport {
        m,
        n,
        classes: q_n,
        expected_mass: S::from_ratio(1, q_n),
        min_count,
        max_count,
        coordinate_uniform,
        recovered,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::super::tests::z3_family;
    use super::*;
    use crate::Rational;

    #[test]
    fn z3_uniform() {
        let f = z3_family(3, 2);
        let rep = haar_pushforward_check::<Rational>(&f, 3, 1).unwrap();
        assert!(rep.passed);
        assert_eq!((rep.min_count, rep.max_count), (9, 9));
        assert_eq!(rep.recovered.as_ref().unwrap().matched, 27);
        let top = haar_pushforward_check::<Rational>(&f, 3, 3).unwrap();
        assert!(top.passed && top.recovered.is_none());
        assert_eq!(top.expected_mass, Rational::from_ratio(1, 27));
    }

    #[test]
    fn broken_family_fails_recovery() {
        // Level-2 cells flipped: Per(η₃, 9ℤ) becomes 3-periodic mod 9.
        let mut f = z3_family(3, 2);
        for p in [4, 5, 7, 8] {
            f = f.with_flipped_cell(p).unwrap();
        }
        let rep = haar_pushforward_check::<Rational>(&f, 3, 2).unwrap();
        assert!(!rep.passed);
        assert!(rep.recovered.unwrap().witness.is_some());
    }
}
