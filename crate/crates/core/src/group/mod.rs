//! Concrete residually finite groups and their quotient chains.
//!
//! Three backends are available: ℤ, ℤᵈ and the free group F₂ acting through
//! the Sanov matrices on SL(2, ℤ/3ⁿ). A [`QuotientChain`] owns the backend
//! parameters and provides exact arithmetic both on elements and on the
//! finite quotients Qₙ = G/Γₙ, whose elements are encoded as [`ClassId`]s.
//! Level 0 is the trivial quotient (Γ₀ = G).

mod enumerate;
pub mod sanov;
pub mod word;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
pub use enumerate::ElementStream;
use sanov::{word_matrix, Mat2};
pub use word::{Letter, Word};

/// Canonical form of a group element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    Int(i64),
    Vector(Vec<i64>),
    Word(Word),
}

impl GroupElement {
    fn kind(&self) -> String {
        match self {
            GroupElement::Int(_) => "z".into(),
            GroupElement::Vector(v) => format!("zd(d={})", v.len()),
            GroupElement::Word(_) => "f2".into(),
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Int(x) => write!(f, "{x}"),
            GroupElement::Vector(v) => {
                f.write_str("(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
            GroupElement::Word(w) => write!(f, "{w}"),
        }
    }
}

impl FromStr for GroupElement {
    type Err = Error;

    /// Inverse of `Display`: `(x,y,…)` is a vector, an integer literal is an
    /// integer, anything else is parsed as a word.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some(inner) = t.strip_prefix('(') {
            let inner = inner
                .strip_suffix(')')
                .ok_or_else(|| Error::Parse(format!("unterminated vector {t:?}")))?;
            let v = inner
                .split(',')
                .map(|x| x.trim().parse::<i64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse(format!("bad vector {t:?}: {e}")))?;
            return Ok(GroupElement::Vector(v));
        }
        if let Ok(x) = t.parse::<i64>() {
            return Ok(GroupElement::Int(x));
        }
        Ok(GroupElement::Word(Word::parse(t)?))
    }
}

impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Element of a finite quotient Qₙ.
///
/// ℤ: the residue. ℤᵈ: mixed radix over axes, axis 0 least significant.
/// F₂: the matrix (a b; c d) mod M as `a + M(b + M(c + M·d))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassId(pub u64);

/// Backend choice and its subgroup schedule, as read from config files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BackendSpec {
    /// Γₙ = (m₁⋯mₙ)ℤ.
    Z { multipliers: Vec<u64> },
    /// One multiplier schedule per axis, all of equal length.
    Zd { axes: Vec<Vec<u64>> },
    /// Γⱼ = kernel of F₂ → SL(2, ℤ/3^{levels[j]}).
    F2Sanov { levels: Vec<u32> },
}

impl BackendSpec {
    pub fn depth(&self) -> usize {
        match self {
            BackendSpec::Z { multipliers } => multipliers.len(),
            BackendSpec::Zd { axes } => axes.first().map_or(0, Vec::len),
            BackendSpec::F2Sanov { levels } => levels.len(),
        }
    }

    /// Same backend cut down to its first `depth` levels.
    pub fn truncated(&self, depth: usize) -> BackendSpec {
        match self {
            BackendSpec::Z { multipliers } => BackendSpec::Z {
                multipliers: multipliers[..depth.min(multipliers.len())].to_vec(),
            },
            BackendSpec::Zd { axes } => BackendSpec::Zd {
                axes: axes.iter().map(|a| a[..depth.min(a.len())].to_vec()).collect(),
            },
            BackendSpec::F2Sanov { levels } => BackendSpec::F2Sanov {
                levels: levels[..depth.min(levels.len())].to_vec(),
            },
        }
    }

    pub fn z_constant(m: u64, depth: usize) -> BackendSpec {
        BackendSpec::Z {
            multipliers: vec![m; depth],
        }
    }

    pub fn f2_consecutive(depth: usize) -> BackendSpec {
        BackendSpec::F2Sanov {
            levels: (1..=depth as u32).collect(),
        }
    }
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::InvalidConfig {
        field: field.into(),
        reason: reason.into(),
    }
}

const MAX_MODULUS: u64 = 1 << 62;
const MAX_F2_EXPONENT: u32 = 10;

#[derive(Clone, Debug)]
enum Chain {
    Z { moduli: Vec<u64> },
    Zd { moduli: Vec<Vec<u64>> },
    F2 { exps: Vec<u32>, moduli: Vec<u64> },
}

/// Strictly decreasing chain G = Γ₀ ⊋ Γ₁ ⊋ … ⊋ Γ_N of finite-index normal subgroups.
#[derive(Clone, Debug)]
pub struct QuotientChain {
    spec: BackendSpec,
    chain: Chain,
    orders: Vec<u64>,
}

impl QuotientChain {
    /// Validates the schedule and builds the chain. Every index ratio must be at least 3.
    pub fn new(spec: BackendSpec) -> Result<QuotientChain> {
        let (chain, orders) = match &spec {
            BackendSpec::Z { multipliers } => {
                let mut moduli = Vec::new();
                let mut m = 1u64;
                for (j, &x) in multipliers.iter().enumerate() {
                    if x < 3 {
                        return Err(invalid(
                            format!("backend.multipliers[{j}]"),
                            format!("multiplier {x} at level {} is below 3", j + 1),
                        ));
                    }
                    m = m
                        .checked_mul(x)
                        .filter(|&v| v <= MAX_MODULUS)
                        .ok_or_else(|| invalid(format!("backend.multipliers[{j}]"), "index overflows 2^62"))?;
                    moduli.push(m);
                }
                let mut orders = vec![1];
                orders.extend(&moduli);
                (Chain::Z { moduli }, orders)
            }
            BackendSpec::Zd { axes } => {
                if axes.is_empty() {
                    return Err(invalid("backend.axes", "at least one axis is required"));
                }
                let depth = axes[0].len();
                if let Some(k) = axes.iter().position(|a| a.len() != depth) {
                    return Err(invalid(format!("backend.axes[{k}]"), "all axis schedules must have equal length"));
                }
                let mut moduli: Vec<Vec<u64>> = Vec::new();
                let mut cur = vec![1u64; axes.len()];
                let mut orders = vec![1u64];
                for level in 0..depth {
                    let mut ratio = 1u64;
                    for (k, axis) in axes.iter().enumerate() {
                        let x = axis[level];
                        if x == 0 {
                            return Err(invalid(format!("backend.axes[{k}][{level}]"), "multiplier must be positive"));
                        }
                        ratio = ratio.saturating_mul(x);
                        cur[k] = cur[k]
                            .checked_mul(x)
                            .filter(|&v| v <= MAX_MODULUS)
                            .ok_or_else(|| invalid(format!("backend.axes[{k}][{level}]"), "modulus overflows 2^62"))?;
                    }
                    if ratio < 3 {
                        return Err(invalid(
                            format!("backend.axes[*][{level}]"),
                            format!("index ratio {ratio} at level {} is below 3", level + 1),
                        ));
                    }
                    let order = cur
                        .iter()
                        .try_fold(1u64, |acc, &m| acc.checked_mul(m).filter(|&v| v <= MAX_MODULUS))
                        .ok_or_else(|| invalid(format!("backend.axes[*][{level}]"), "index overflows 2^62"))?;
                    orders.push(order);
                    moduli.push(cur.clone());
                }
                (Chain::Zd { moduli }, orders)
            }
            BackendSpec::F2Sanov { levels } => {
                let mut prev = 0u32;
                let mut moduli = Vec::new();
                let mut orders = vec![1u64];
                for (j, &n) in levels.iter().enumerate() {
                    if n <= prev {
                        return Err(invalid(
                            format!("backend.levels[{j}]"),
                            format!("level schedule must be strictly increasing and positive, got {n} after {prev}"),
                        ));
                    }
                    if n > MAX_F2_EXPONENT {
                        return Err(invalid(
                            format!("backend.levels[{j}]"),
                            format!("exponent {n} exceeds the supported maximum {MAX_F2_EXPONENT}"),
                        ));
                    }
                    prev = n;
                    moduli.push(3u64.pow(n));
                    orders.push(sanov::sl2_order_pow3(n));
                }
                (
                    Chain::F2 {
                        exps: levels.clone(),
                        moduli,
                    },
                    orders,
                )
            }
        };
        Ok(QuotientChain { spec, chain, orders })
    }

    pub fn spec(&self) -> &BackendSpec {
        &self.spec
    }

    pub fn depth(&self) -> usize {
        self.orders.len() - 1
    }

    /// |Qₙ| = [G:Γₙ]; `order(0) = 1`.
    pub fn order(&self, n: usize) -> Result<u64> {
        self.check_level(n)?;
        Ok(self.orders[n])
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    fn check_level(&self, n: usize) -> Result<()> {
        if n > self.depth() {
            return Err(Error::LevelOutOfRange {
                level: n,
                depth: self.depth(),
            });
        }
        Ok(())
    }

    fn check_element(&self, g: &GroupElement) -> Result<()> {
        let ok = match (&self.chain, g) {
            (Chain::Z { .. }, GroupElement::Int(_)) => true,
            (Chain::Zd { .. }, GroupElement::Vector(v)) => v.len() == self.dimension(),
            (Chain::F2 { .. }, GroupElement::Word(_)) => true,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::BackendMismatch {
                left: self.identity().kind(),
                right: g.kind(),
            })
        }
    }

    fn dimension(&self) -> usize {
        match &self.spec {
            BackendSpec::Zd { axes } => axes.len(),
            _ => 1,
        }
    }

    pub fn identity(&self) -> GroupElement {
        match &self.chain {
            Chain::Z { .. } => GroupElement::Int(0),
            Chain::Zd { .. } => GroupElement::Vector(vec![0; self.dimension()]),
            Chain::F2 { .. } => GroupElement::Word(Word::identity()),
        }
    }

    pub fn multiply(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check_element(a)?;
        self.check_element(b)?;
        Ok(match (a, b) {
            (GroupElement::Int(x), GroupElement::Int(y)) => GroupElement::Int(x + y),
            (GroupElement::Vector(x), GroupElement::Vector(y)) => {
                GroupElement::Vector(x.iter().zip(y).map(|(p, q)| p + q).collect())
            }
            (GroupElement::Word(x), GroupElement::Word(y)) => GroupElement::Word(x.mul(y)),
            _ => unreachable!("checked above"),
        })
    }

    pub fn invert(&self, a: &GroupElement) -> Result<GroupElement> {
        self.check_element(a)?;
        Ok(match a {
            GroupElement::Int(x) => GroupElement::Int(-x),
            GroupElement::Vector(v) => GroupElement::Vector(v.iter().map(|x| -x).collect()),
            GroupElement::Word(w) => GroupElement::Word(w.inverse()),
        })
    }

    /// Backend-aware parsing (plain integers, comma lists or words).
    pub fn parse_element(&self, s: &str) -> Result<GroupElement> {
        let t = s.trim();
        let g = match &self.chain {
            Chain::Z { .. } => GroupElement::Int(
                t.parse()
                    .map_err(|e| Error::Parse(format!("bad integer {t:?}: {e}")))?,
            ),
            Chain::Zd { .. } => {
                let inner = t.trim_start_matches('(').trim_end_matches(')');
                GroupElement::from_str(&format!("({inner})"))?
            }
            Chain::F2 { .. } => GroupElement::Word(Word::parse(t)?),
        };
        self.check_element(&g)?;
        Ok(g)
    }

    /// qₙ(g), the coset gΓₙ as an element of Qₙ.
    pub fn quotient_class(&self, g: &GroupElement, n: usize) -> Result<ClassId> {
        self.check_level(n)?;
        self.check_element(g)?;
        Ok(self.class_unchecked(g, n))
    }

    pub(crate) fn class_unchecked(&self, g: &GroupElement, n: usize) -> ClassId {
        if n == 0 {
            return ClassId(0);
        }
        match (&self.chain, g) {
            (Chain::Z { moduli }, GroupElement::Int(x)) => ClassId(x.rem_euclid(moduli[n - 1] as i64) as u64),
            (Chain::Zd { moduli }, GroupElement::Vector(v)) => {
                let ms = &moduli[n - 1];
                let mut code = 0u64;
                for k in (0..ms.len()).rev() {
                    code = code * ms[k] + v[k].rem_euclid(ms[k] as i64) as u64;
                }
                ClassId(code)
            }
            (Chain::F2 { moduli, .. }, GroupElement::Word(w)) => {
                let m = moduli[n - 1];
                ClassId(word_matrix(w.letters(), m).encode(m))
            }
            _ => unreachable!("element checked against backend"),
        }
    }

    /// Classes of `g` at every level 0..=n, computed in one pass.
    pub(crate) fn classes_up_to(&self, g: &GroupElement, n: usize) -> Vec<ClassId> {
        if let (Chain::F2 { moduli, .. }, GroupElement::Word(w)) = (&self.chain, g) {
            if n == 0 {
                return vec![ClassId(0)];
            }
            let top_m = moduli[n - 1];
            let top = word_matrix(w.letters(), top_m);
            let mut out = vec![ClassId(0)];
            for &m in &moduli[..n] {
                out.push(ClassId(top.reduce(m).encode(m)));
            }
            return out;
        }
        (0..=n).map(|l| self.class_unchecked(g, l)).collect()
    }

    pub fn in_subgroup(&self, g: &GroupElement, n: usize) -> Result<bool> {
        Ok(self.quotient_class(g, n)? == self.class_identity(n))
    }

    pub fn class_identity(&self, n: usize) -> ClassId {
        if n == 0 {
            return ClassId(0);
        }
        match &self.chain {
            Chain::Z { .. } | Chain::Zd { .. } => ClassId(0),
            Chain::F2 { moduli, .. } => ClassId(Mat2::IDENTITY.encode(moduli[n - 1])),
        }
    }

    pub fn class_mul(&self, n: usize, a: ClassId, b: ClassId) -> ClassId {
        if n == 0 {
            return ClassId(0);
        }
        match &self.chain {
            Chain::Z { moduli } => {
                let m = moduli[n - 1] as u128;
                ClassId(((a.0 as u128 + b.0 as u128) % m) as u64)
            }
            Chain::Zd { moduli } => {
                let ms = &moduli[n - 1];
                let (x, y) = (decode_radix(a.0, ms), decode_radix(b.0, ms));
                let sum: Vec<u64> = x.iter().zip(&y).zip(ms).map(|((p, q), m)| (p + q) % m).collect();
                ClassId(encode_radix(&sum, ms))
            }
            Chain::F2 { moduli, .. } => {
                let m = moduli[n - 1];
                ClassId(Mat2::decode(a.0, m).mul(&Mat2::decode(b.0, m), m).encode(m))
            }
        }
    }

    pub fn class_inv(&self, n: usize, a: ClassId) -> ClassId {
        if n == 0 {
            return ClassId(0);
        }
        match &self.chain {
            Chain::Z { moduli } => {
                let m = moduli[n - 1];
                ClassId((m - a.0 % m) % m)
            }
            Chain::Zd { moduli } => {
                let ms = &moduli[n - 1];
                let neg: Vec<u64> = decode_radix(a.0, ms).iter().zip(ms).map(|(x, m)| (m - x % m) % m).collect();
                ClassId(encode_radix(&neg, ms))
            }
            Chain::F2 { moduli, .. } => {
                let m = moduli[n - 1];
                ClassId(Mat2::decode(a.0, m).inv_sl2(m).encode(m))
            }
        }
    }

    /// πₙ: reduces a class at level `from` to level `to ≤ from`.
    pub fn project(&self, c: ClassId, from: usize, to: usize) -> Result<ClassId> {
        self.check_level(from)?;
        if to > from {
            return Err(Error::InvalidParameters(format!(
                "cannot project from level {from} up to level {to}"
            )));
        }
        Ok(self.project_unchecked(c, from, to))
    }

    pub(crate) fn project_unchecked(&self, c: ClassId, from: usize, to: usize) -> ClassId {
        if to == 0 {
            return ClassId(0);
        }
        if to == from {
            return c;
        }
        match &self.chain {
            Chain::Z { moduli } => ClassId(c.0 % moduli[to - 1]),
            Chain::Zd { moduli } => {
                let x = decode_radix(c.0, &moduli[from - 1]);
                let ms = &moduli[to - 1];
                let r: Vec<u64> = x.iter().zip(ms).map(|(v, m)| v % m).collect();
                ClassId(encode_radix(&r, ms))
            }
            Chain::F2 { moduli, .. } => {
                let big = moduli[from - 1];
                let small = moduli[to - 1];
                ClassId(Mat2::decode(c.0, big).reduce(small).encode(small))
            }
        }
    }

    /// The matrix behind an F₂ class, `None` on other backends.
    pub fn class_matrix(&self, c: ClassId, n: usize) -> Option<[[u64; 2]; 2]> {
        match &self.chain {
            Chain::F2 { moduli, .. } if n >= 1 && n <= moduli.len() => {
                let [a, b, cc, d] = Mat2::decode(c.0, moduli[n - 1]).e;
                Some([[a, b], [cc, d]])
            }
            _ => None,
        }
    }

    /// Exponent k with Qₙ = SL(2, ℤ/3ᵏ), F₂ only.
    pub fn f2_exponent(&self, n: usize) -> Option<u32> {
        match &self.chain {
            Chain::F2 { exps, .. } if n >= 1 && n <= exps.len() => Some(exps[n - 1]),
            _ => None,
        }
    }

    /// The ℤ modulus Mₙ, ℤ only.
    pub fn z_modulus(&self, n: usize) -> Option<u64> {
        match &self.chain {
            Chain::Z { moduli } if n <= moduli.len() => Some(if n == 0 { 1 } else { moduli[n - 1] }),
            _ => None,
        }
    }

    /// Per-axis moduli at level n, ℤᵈ only.
    pub fn zd_moduli(&self, n: usize) -> Option<Vec<u64>> {
        match &self.chain {
            Chain::Zd { moduli } if n <= moduli.len() => Some(if n == 0 {
                vec![1; self.dimension()]
            } else {
                moduli[n - 1].clone()
            }),
            _ => None,
        }
    }

    /// Infinite enumeration of G in the fixed order, identity first.
    pub fn stream(&self) -> ElementStream {
        ElementStream::new(&self.spec)
    }

    /// All elements of radius ≤ r in enumeration order.
    ///
    /// Radius is |x| on ℤ, the sup norm on ℤᵈ and word length on F₂.
    pub fn enumerate_ball(&self, r: u32) -> Vec<GroupElement> {
        let mut s = self.stream();
        let mut out = Vec::new();
        loop {
            let (g, radius) = s.next_with_radius();
            if radius > r {
                break;
            }
            out.push(g);
        }
        out
    }

    /// Reports every pair of distinct elements of the r-ball not separated by q₁..q_N.
    pub fn separation_check(&self, r: u32, depth: usize) -> Result<SeparationReport> {
        self.check_level(depth)?;
        let ball = self.enumerate_ball(r);
        let classes: Vec<Vec<ClassId>> = ball.iter().map(|g| self.classes_up_to(g, depth)).collect();
        let mut unseparated = Vec::new();
        let mut pairs = 0u64;
        for i in 0..ball.len() {
            for j in (i + 1)..ball.len() {
                pairs += 1;
                let separated = (1..=depth).any(|n| classes[i][n] != classes[j][n]);
                if !separated {
                    unseparated.push((ball[i].clone(), ball[j].clone()));
                }
            }
        }
        Ok(SeparationReport {
            radius: r,
            depth,
            ball_size: ball.len(),
            pairs_checked: pairs,
            passed: unseparated.is_empty(),
            unseparated,
        })
    }
}

fn decode_radix(mut code: u64, ms: &[u64]) -> Vec<u64> {
    ms.iter()
        .map(|&m| {
            let x = code % m;
            code /= m;
            x
        })
        .collect()
}

fn encode_radix(x: &[u64], ms: &[u64]) -> u64 {
    let mut code = 0u64;
    for k in (0..ms.len()).rev() {
        code = code * ms[k] + x[k];
    }
    code
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeparationReport {
    pub radius: u32,
    pub depth: usize,
    pub ball_size: usize,
    pub pairs_checked: u64,
    pub passed: bool,
    pub unseparated: Vec<(GroupElement, GroupElement)>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z3(depth: usize) -> QuotientChain {
        QuotientChain::new(BackendSpec::z_constant(3, depth)).unwrap()
    }

    fn f2(depth: usize) -> QuotientChain {
        QuotientChain::new(BackendSpec::f2_consecutive(depth)).unwrap()
    }

    fn word(s: &str) -> GroupElement {
        GroupElement::Word(Word::parse(s).unwrap())
    }

    #[test]
    fn identities() {
        assert_eq!(z3(2).identity(), GroupElement::Int(0));
        assert_eq!(f2(1).identity(), GroupElement::Word(Word::identity()));
        let zd = QuotientChain::new(BackendSpec::Zd {
            axes: vec![vec![3], vec![3]],
        })
        .unwrap();
        assert_eq!(zd.identity(), GroupElement::Vector(vec![0, 0]));
    }

    #[test]
    fn multiply_examples() {
        let z = z3(2);
        assert_eq!(
            z.multiply(&GroupElement::Int(5), &GroupElement::Int(7)).unwrap(),
            GroupElement::Int(12)
        );
        let f = f2(1);
        assert_eq!(f.multiply(&word("ab"), &word("b⁻¹a")).unwrap(), word("aa"));
        assert_eq!(f.multiply(&word("a"), &word("a⁻¹")).unwrap(), f.identity());
        assert!(matches!(
            z.multiply(&GroupElement::Int(1), &word("a")),
            Err(Error::BackendMismatch { .. })
        ));
    }

    #[test]
    fn quotient_class_examples() {
        let z = z3(3);
        assert_eq!(z.quotient_class(&GroupElement::Int(10), 1).unwrap(), ClassId(1));
        assert!(z.in_subgroup(&GroupElement::Int(9), 2).unwrap());
        assert!(!z.in_subgroup(&GroupElement::Int(9), 3).unwrap());
        assert!(matches!(
            z.quotient_class(&GroupElement::Int(1), 4),
            Err(Error::LevelOutOfRange { level: 4, depth: 3 })
        ));
        let f = f2(2);
        let comm = word("aba⁻¹b⁻¹");
        let c = f.quotient_class(&comm, 1).unwrap();
        assert_eq!(f.class_matrix(c, 1), Some([[0, 1], [2, 0]]));
        assert!(!f.in_subgroup(&comm, 1).unwrap());
        assert_eq!(f.quotient_class(&f.identity(), 2).unwrap(), f.class_identity(2));
    }

    #[test]
    fn ball_examples() {
        let z = z3(1);
        let ints: Vec<_> = [0, 1, -1, 2, -2].into_iter().map(GroupElement::Int).collect();
        assert_eq!(z.enumerate_ball(2), ints);
        let f = f2(1);
        let expected: Vec<_> = ["e", "a", "A", "b", "B"].into_iter().map(word).collect();
        assert_eq!(f.enumerate_ball(1), expected);
        assert_eq!(f.enumerate_ball(3).len(), 1 + 4 + 12 + 36);
        let zd = QuotientChain::new(BackendSpec::Zd {
            axes: vec![vec![3], vec![3]],
        })
        .unwrap();
        let b = zd.enumerate_ball(1);
        assert_eq!(b.len(), 9);
        assert_eq!(b[0], GroupElement::Vector(vec![0, 0]));
    }

    #[test]
    fn separation_examples() {
        assert!(z3(2).separation_check(4, 2).unwrap().passed);
        assert!(f2(2).separation_check(2, 2).unwrap().passed);
        // a² ≡ a⁻¹ mod 3.
        let f = f2(1).separation_check(2, 1).unwrap();
        assert!(f.unseparated.contains(&(word("A"), word("aa"))) || f.unseparated.contains(&(word("aa"), word("A"))));
        let r0 = z3(1).separation_check(0, 1).unwrap();
        assert!(r0.passed && r0.pairs_checked == 0);
        let fail = z3(1).separation_check(2, 1).unwrap();
        assert!(!fail.passed);
        assert!(fail.unseparated.contains(&(GroupElement::Int(1), GroupElement::Int(-2))));
    }

    #[test]
    fn rejects_bad_schedules() {
        let e = QuotientChain::new(BackendSpec::Z {
            multipliers: vec![3, 2, 3],
        })
        .unwrap_err();
        assert!(matches!(e, Error::InvalidConfig { ref field, .. } if field == "backend.multipliers[1]"));
        assert!(QuotientChain::new(BackendSpec::F2Sanov { levels: vec![1, 1] }).is_err());
        assert!(QuotientChain::new(BackendSpec::Zd {
            axes: vec![vec![2], vec![1]]
        })
        .is_err());
    }

    #[test]
    fn element_text_round_trips() {
        for g in [
            GroupElement::Int(-7),
            GroupElement::Vector(vec![1, -2, 0]),
            word("aBAb"),
            word("e"),
        ] {
            assert_eq!(g.to_string().parse::<GroupElement>().unwrap(), g);
            let json = serde_json::to_string(&g).unwrap();
            assert_eq!(serde_json::from_str::<GroupElement>(&json).unwrap(), g);
        }
    }

    #[test]
    fn level_zero_is_trivial() {
        let f = f2(1);
        assert_eq!(f.order(0).unwrap(), 1);
        assert_eq!(f.quotient_class(&word("ab"), 0).unwrap(), ClassId(0));
        assert_eq!(f.class_identity(0), ClassId(0));
    }
}
