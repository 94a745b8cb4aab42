//! The sets C_{n,i} on the ηₘ-orbit, their masses μ⁽ⁿ⁾ and the recursion Aₙμ⁽ⁿ⁺¹⁾ = μ⁽ⁿ⁾.

use rayon::prelude::*;
use serde::Serialize;

use super::EmpiricalMeasure;
use crate::error::{Error, Result};
use crate::group::{ClassId, GroupElement};
use crate::scalar::Scalar;
use crate::toeplitz::ToeplitzFamily;

/// C⁽ᵂ⁾_{n,i} on orbit points of ηₘ.
///
/// x_u ∈ Cₙ when qₙ(u) is trivial and x_u(g) = η(g) for every
/// g ∈ Per(η, Γₙ) ∩ D_W; then x_u ∈ C_{n,i} when x_u ≡ i on J(n).
#[derive(Clone, Debug)]
pub struct PartitionWindow<'m, 'a> {
    measure: &'m EmpiricalMeasure<'a>,
    n: usize,
    w: usize,
    coordinate: bool,
    periodic: Vec<(ClassId, u32)>,
    jset: Vec<ClassId>,
}

impl<'m, 'a> PartitionWindow<'m, 'a> {
    /// Requires n ≤ W ≤ m.
    pub fn new(measure: &'m EmpiricalMeasure<'a>, n: usize, w: usize) -> Result<PartitionWindow<'m, 'a>> {
        let m = measure.level();
        if n > w || w > m {
            return Err(Error::InvalidParameters(format!(
                "window needs n <= W <= m, got n={n}, W={w}, m={m}"
            )));
        }
        let family = measure.family();
        let chain = family.chain();
        let elements = family.tower().elements(w)?;
        let mut periodic = Vec::new();
        for (pos, g) in elements.iter().enumerate() {
            let cell = family.cell_of_level_position(w, pos)?;
            if (cell.level as usize) < n {
                periodic.push((chain.class_unchecked(g, m), cell.symbol));
            }
        }
        let jset = family.jset(n)?.iter().map(|g| chain.class_unchecked(g, m)).collect();
        Ok(PartitionWindow {
            measure,
            n,
            w,
            coordinate: true,
            periodic,
            jset,
        })
    }

    /// Drops the condition qₙ(u) = 1 and keeps only the window constraints.
    pub fn without_coordinate(mut self) -> Self {
        self.coordinate = false;
        self
    }

    pub fn level(&self) -> usize {
        self.n
    }

    pub fn window(&self) -> usize {
        self.w
    }

    pub fn in_c(&self, cu: ClassId) -> Result<bool> {
        let chain = self.measure.family().chain();
        let m = self.measure.level();
        if self.coordinate && chain.project_unchecked(cu, m, self.n) != chain.class_identity(self.n) {
            return Ok(false);
        }
        for &(cg, s) in &self.periodic {
            if self.measure.point(cu, cg)? != s {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Some(i) iff x_u ∈ C_{n,i}.
    pub fn part(&self, cu: ClassId) -> Result<Option<u32>> {
        if !self.in_c(cu)? {
            return Ok(None);
        }
        let mut symbol = None;
        for &cg in &self.jset {
            let s = self.measure.point(cu, cg)?;
            match symbol {
                None => symbol = Some(s),
                Some(t) if t != s => return Ok(None),
                _ => {}
            }
        }
        Ok(symbol)
    }

    pub fn in_part(&self, cu: ClassId, i: u32) -> Result<bool> {
        Ok(self.part(cu)? == Some(i))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartitionMasses<S> {
    pub m: usize,
    pub n: usize,
    pub w: usize,
    /// #{u ∈ Dₘ : x_u ∈ C⁽ᵂ⁾_{n,i}} per symbol.
    pub counts: Vec<u64>,
    pub masses: Vec<S>,
    /// #{u ∈ Dₘ : x_u ∈ C⁽ᵂ⁾ₙ}.
    pub in_c: u64,
}

fn check_levels(family: &ToeplitzFamily, m: usize, n: usize, w: usize) -> Result<()> {
    if m > family.depth() {
        return Err(Error::LevelOutOfRange {
            level: m,
            depth: family.depth(),
        });
    }
    if m <= n || w < n + 1 || w > m {
        return Err(Error::InvalidParameters(format!(
            "partition masses need n < m and n+1 <= W <= m, got m={m}, n={n}, W={w}"
        )));
    }
    Ok(())
}

fn part_counts(measure: &EmpiricalMeasure<'_>, n: usize, w: usize) -> Result<(Vec<u64>, u64)> {
    let family = measure.family();
    let window = PartitionWindow::new(measure, n, w)?;
    let alphabet = family.alphabet();
    let parts: Vec<(bool, Option<u32>)> = measure
        .orbit()
        .par_iter()
        .map(|&cu| Ok((window.in_c(cu)?, window.part(cu)?)))
        .collect::<Result<_>>()?;
    let mut counts = vec![0u64; alphabet.len()];
    let mut in_c = 0;
    for (c, p) in parts {
        in_c += u64::from(c);
        if let Some(s) = p {
            counts[family.symbol_index(s)] += 1;
        }
    }
    Ok((counts, in_c))
}

/// μ⁽ⁿ⁾ = (μₘ(C⁽ᵂ⁾_{n,1}), …, μₘ(C⁽ᵂ⁾_{n,r})).
pub fn partition_masses<S: Scalar>(family: &ToeplitzFamily, m: usize, n: usize, w: usize) -> Result<PartitionMasses<S>> {
    check_levels(family, m, n, w)?;
    let measure = EmpiricalMeasure::new(family, m)?;
    let (counts, in_c) = part_counts(&measure, n, w)?;
    let size = measure.size();
    Ok(PartitionMasses {
        m,
        n,
        w,
        masses: counts.iter().map(|&c| S::from_ratio(c, size)).collect(),
        counts,
        in_c,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnResidual<S> {
    pub m: usize,
    pub n: usize,
    pub w: usize,
    /// Aₙ·μ⁽ⁿ⁺¹⁾.
    pub lhs: Vec<S>,
    /// μ⁽ⁿ⁾.
    pub rhs: Vec<S>,
    pub residual: Vec<S>,
    /// |Dₘ|·(Aₙμ⁽ⁿ⁺¹⁾ − μ⁽ⁿ⁾), an integer vector.
    pub residual_counts: Vec<i64>,
    pub zero: bool,
}

/// Aₙ·μ⁽ⁿ⁺¹⁾ − μ⁽ⁿ⁾ under μₘ with windows at level W; needs m > n+1 and n+2 ≤ W ≤ m.
pub fn verify_an_recursion<S: Scalar>(family: &ToeplitzFamily, m: usize, n: usize, w: usize) -> Result<AnResidual<S>> {
    if m <= n + 1 {
        return Err(Error::InvalidParameters(format!("the recursion needs m > n+1, got m={m}, n={n}")));
    }
    check_levels(family, m, n + 1, w)?;
    let measure = EmpiricalMeasure::new(family, m)?;
    let (upper, _) = part_counts(&measure, n + 1, w)?;
    let (lower, _) = part_counts(&measure, n, w)?;
    let ratio = family.tower().ratio(n)? as i64;
    let alpha = family.symbol_index(family.cycle().alpha(n + 1));
    let total: i64 = upper.iter().map(|&c| c as i64).sum();
    let lhs: Vec<i64> = (0..upper.len())
        .map(|i| {
            let c = upper[i] as i64;
            if i == alpha {
                ratio * c + (total - c)
            } else {
                (ratio - 1) * c
            }
        })
        .collect();
    let residual_counts: Vec<i64> = lhs.iter().zip(&lower).map(|(a, &b)| a - b as i64).collect();
    let size = measure.size();
    let signed = |v: i64| {
        let x = S::from_ratio(v.unsigned_abs(), size);
        if v < 0 {
            S::zero() - x
        } else {
            x
        }
    };
    Ok(AnResidual {
        m,
        n,
        w,
        lhs: lhs.iter().map(|&v| signed(v)).collect(),
        rhs: lower.iter().map(|&c| S::from_ratio(c, size)).collect(),
        residual: residual_counts.iter().map(|&v| signed(v)).collect(),
        zero: residual_counts.iter().all(|&v| v == 0),
        residual_counts,
    })
}

/// Whether the window constraints alone force qₙ(u) = 1 on the ηₘ-orbit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoordinateReport {
    pub m: usize,
    pub n: usize,
    pub w: usize,
    pub in_window: u64,
    pub violations: u64,
    pub witness: Option<GroupElement>,
}

pub fn window_forces_coordinate(family: &ToeplitzFamily, m: usize, n: usize, w: usize) -> Result<CoordinateReport> {
    if m > family.depth() {
        return Err(Error::LevelOutOfRange {
            level: m,
            depth: family.depth(),
        });
    }
    let measure = EmpiricalMeasure::new(family, m)?;
    let window = PartitionWindow::new(&measure, n, w)?.without_coordinate();
    let chain = family.chain();
    let e = chain.class_identity(n);
    let flags: Vec<(bool, bool)> = measure
        .orbit()
        .par_iter()
        .map(|&cu| {
            let inside = window.in_c(cu)?;
            Ok((inside, inside && chain.project_unchecked(cu, m, n) != e))
        })
        .collect::<Result<_>>()?;
    let witness = flags
        .iter()
        .position(|f| f.1)
        .map(|p| family.tower().elements(m).map(|d| d[p].clone()))
        .transpose()?;
    Ok(CoordinateReport {
        m,
        n,
        w,
        in_window: flags.iter().filter(|f| f.0).count() as u64,
        violations: flags.iter().filter(|f| f.1).count() as u64,
        witness,
    })
}
