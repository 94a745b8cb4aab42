use super::word::{first_reduced, next_reduced_same_length, Letter, Word};
use super::{BackendSpec, GroupElement};

/// Deterministic exhaustion of G, identity first.
///
/// ℤ: 0, 1, −1, 2, −2, …
/// ℤᵈ: sup-norm shells; inside a shell, lexicographic on coordinate ranks
/// where rank(x) = 2|x| − [x > 0] (so 0, 1, −1, 2, −2 per coordinate).
/// F₂: length-lex on reduced words with a < a⁻¹ < b < b⁻¹.
#[derive(Clone, Debug)]
pub struct ElementStream {
    state: State,
}

#[derive(Clone, Debug)]
enum State {
    Z { next: i64 },
    Zd { dim: usize, radius: u32, shell: Vec<Vec<i64>>, pos: usize },
    F2 { current: Option<Vec<Letter>> },
}

fn rank(x: i64) -> u64 {
    2 * x.unsigned_abs() - u64::from(x > 0)
}

fn shell(dim: usize, r: u32) -> Vec<Vec<i64>> {
    let r = r as i64;
    let side = (2 * r + 1) as usize;
    let mut out = Vec::new();
    let total = side.pow(dim as u32);
    for idx in 0..total {
        let mut v = Vec::with_capacity(dim);
        let mut t = idx;
        for _ in 0..dim {
            v.push((t % side) as i64 - r);
            t /= side;
        }
        if v.iter().any(|x| x.abs() == r) {
            out.push(v);
        }
    }
    out.sort_by_key(|v| v.iter().map(|&x| rank(x)).collect::<Vec<_>>());
    out
}

impl ElementStream {
    pub fn new(spec: &BackendSpec) -> ElementStream {
        let state = match spec {
            BackendSpec::Z { .. } => State::Z { next: 0 },
            BackendSpec::Zd { axes } => State::Zd {
                dim: axes.len(),
                radius: 0,
                shell: shell(axes.len(), 0),
                pos: 0,
            },
            BackendSpec::F2Sanov { .. } => State::F2 { current: None },
        };
        ElementStream { state }
    }

    /// The next element together with its radius.
    pub fn next_with_radius(&mut self) -> (GroupElement, u32) {
        match &mut self.state {
            State::Z { next } => {
                let x = *next;
                *next = if x <= 0 { -x + 1 } else { -x };
                (GroupElement::Int(x), x.unsigned_abs() as u32)
            }
            State::Zd { dim, radius, shell: sh, pos } => {
                if *pos == sh.len() {
                    *radius += 1;
                    *sh = shell(*dim, *radius);
                    *pos = 0;
                }
                let v = sh[*pos].clone();
                *pos += 1;
                (GroupElement::Vector(v), *radius)
            }
            State::F2 { current } => {
                let next = match current.take() {
                    None => Vec::new(),
                    Some(mut w) => {
                        if next_reduced_same_length(&mut w) {
                            w
                        } else {
                            first_reduced(w.len() + 1)
                        }
                    }
                };
                let len = next.len() as u32;
                *current = Some(next.clone());
                (GroupElement::Word(Word::from_reduced(next)), len)
            }
        }
    }
}

impl Iterator for ElementStream {
    type Item = GroupElement;

    fn next(&mut self) -> Option<GroupElement> {
        Some(self.next_with_radius().0)
    }
}
