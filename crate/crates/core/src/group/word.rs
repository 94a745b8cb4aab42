//! Freely reduced words over {a, a⁻¹, b, b⁻¹}.

use std::fmt;

use crate::error::{Error, Result};

/// Generator letter. The derived order `a < a⁻¹ < b < b⁻¹` is the enumeration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    A,
    AInv,
    B,
    BInv,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::A, Letter::AInv, Letter::B, Letter::BInv];

    pub fn inverse(self) -> Letter {
        match self {
            Letter::A => Letter::AInv,
            Letter::AInv => Letter::A,
            Letter::B => Letter::BInv,
            Letter::BInv => Letter::B,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Letter {
        Letter::ALL[i]
    }

    /// ASCII form: lower case generator, upper case inverse.
    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::AInv => 'A',
            Letter::B => 'b',
            Letter::BInv => 'B',
        }
    }
}

/// A freely reduced word. The empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Word {
        Word(Vec::new())
    }

    /// Reduces an arbitrary letter sequence.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Word {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// Wraps letters already known to be reduced.
    pub(crate) fn from_reduced(letters: Vec<Letter>) -> Word {
        debug_assert!(letters.windows(2).all(|w| w[1] != w[0].inverse()));
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut left = self.0.len();
        let mut right = 0;
        while left > 0 && right < other.0.len() && self.0[left - 1] == other.0[right].inverse() {
            left -= 1;
            right += 1;
        }
        let mut out = Vec::with_capacity(left + other.0.len() - right);
        out.extend_from_slice(&self.0[..left]);
        out.extend_from_slice(&other.0[right..]);
        Word(out)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Parses `aAbB` ASCII, `a⁻¹`/`a^-1` inverse notation, and `e`/`1`/`ε` for the identity.
    pub fn parse(s: &str) -> Result<Word> {
        let s = s.trim();
        if s.is_empty() || s == "e" || s == "1" || s == "ε" {
            return Ok(Word::identity());
        }
        let chars: Vec<char> = s.chars().collect();
        let mut letters = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let base = match chars[i] {
                'a' => Letter::A,
                'A' => Letter::AInv,
                'b' => Letter::B,
                'B' => Letter::BInv,
                c if c.is_whitespace() || c == '*' || c == '.' => {
                    i += 1;
                    continue;
                }
                c => return Err(Error::Parse(format!("unexpected character {c:?} in word {s:?}"))),
            };
            i += 1;
            let rest: String = chars[i..].iter().take(3).collect();
            if rest.starts_with("⁻¹") {
                letters.push(base.inverse());
                i += 2;
            } else if rest.starts_with("^-1") {
                letters.push(base.inverse());
                i += 3;
            } else {
                letters.push(base);
            }
        }
        Ok(Word::from_letters(letters))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for l in &self.0 {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

/// Advances `w` to the next reduced word of the same length in length-lex order.
/// Returns false when `w` was the last word of its length.
pub(crate) fn next_reduced_same_length(w: &mut [Letter]) -> bool {
    let n = w.len();
    if n == 0 {
        return false;
    }
    let mut i = n - 1;
    loop {
        let mut x = w[i].index() + 1;
        while x < 4 && i > 0 && Letter::from_index(x) == w[i - 1].inverse() {
            x += 1;
        }
        if x < 4 {
            w[i] = Letter::from_index(x);
            for j in (i + 1)..n {
                let mut y = 0;
                if Letter::from_index(y) == w[j - 1].inverse() {
                    y += 1;
                }
                w[j] = Letter::from_index(y);
            }
            return true;
        }
        if i == 0 {
            return false;
        }
        i -= 1;
    }
}

/// First reduced word of length `n` in length-lex order (`aaa…`).
pub(crate) fn first_reduced(n: usize) -> Vec<Letter> {
    vec![Letter::A; n]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn free_reduction_examples() {
        assert_eq!(w("ab").mul(&w("b⁻¹a")), w("aa"));
        assert_eq!(w("a").mul(&w("a⁻¹")), Word::identity());
        assert_eq!(w("abAB").inverse(), w("baBA"));
        assert_eq!(w("aAbB"), Word::identity());
        assert_eq!(w("a^-1b"), w("Ab"));
    }

    #[test]
    fn display_parse_round_trip() {
        for s in ["e", "a", "aBAb", "bbbA"] {
            assert_eq!(w(s).to_string(), s);
        }
    }

    #[test]
    fn length_lex_counts() {
        for (len, count) in [(1usize, 4usize), (2, 12), (3, 36)] {
            let mut cur = first_reduced(len);
            let mut seen = vec![cur.clone()];
            while next_reduced_same_length(&mut cur) {
                seen.push(cur.clone());
            }
            assert_eq!(seen.len(), count);
            let mut sorted = seen.clone();
            sorted.sort();
            assert_eq!(sorted, seen, "length-lex order");
            assert!(seen.iter().all(|x| x.windows(2).all(|p| p[1] != p[0].inverse())));
        }
    }
}
