//! 2x2 matrices over ℤ/Mℤ and the Sanov images of the free generators.

use super::word::Letter;

/// Row-major `[[a, b], [c, d]]` with entries reduced mod `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub e: [u64; 4],
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 { e: [1, 0, 0, 1] };

    pub fn mul(&self, o: &Mat2, m: u64) -> Mat2 {
        let [a, b, c, d] = self.e;
        let [p, q, r, s] = o.e;
        Mat2 {
            e: [
                (a * p + b * r) % m,
                (a * q + b * s) % m,
                (c * p + d * r) % m,
                (c * q + d * s) % m,
            ],
        }
    }

    /// Inverse of a determinant-one matrix: `[[d, -b], [-c, a]]`.
    pub fn inv_sl2(&self, m: u64) -> Mat2 {
        let [a, b, c, d] = self.e;
        Mat2 {
            e: [d, (m - b) % m, (m - c) % m, a],
        }
    }

    pub fn reduce(&self, m: u64) -> Mat2 {
        Mat2 {
            e: self.e.map(|x| x % m),
        }
    }

    pub fn encode(&self, m: u64) -> u64 {
        let [a, b, c, d] = self.e;
        a + m * (b + m * (c + m * d))
    }

    pub fn decode(code: u64, m: u64) -> Mat2 {
        let a = code % m;
        let r = code / m;
        let b = r % m;
        let r = r / m;
        let c = r % m;
        let d = r / m;
        Mat2 { e: [a, b, c, d] }
    }

    pub fn det(&self, m: u64) -> u64 {
        let [a, b, c, d] = self.e;
        (a * d % m + m - b * c % m) % m
    }
}

/// a ↦ (1 2; 0 1), b ↦ (1 0; 2 1), inverses accordingly.
pub fn generator(l: Letter, m: u64) -> Mat2 {
    let two = 2 % m;
    let neg_two = (m - two) % m;
    let one = 1 % m;
    match l {
        Letter::A => Mat2 { e: [one, two, 0, one] },
        Letter::AInv => Mat2 { e: [one, neg_two, 0, one] },
        Letter::B => Mat2 { e: [one, 0, two, one] },
        Letter::BInv => Mat2 { e: [one, 0, neg_two, one] },
    }
}

pub fn word_matrix(letters: &[Letter], m: u64) -> Mat2 {
    let mut acc = Mat2::IDENTITY.reduce(m);
    for &l in letters {
        acc = acc.mul(&generator(l, m), m);
    }
    acc
}

/// |SL(2, ℤ/3ⁿ)| = 24·27ⁿ⁻¹.
pub fn sl2_order_pow3(n: u32) -> u64 {
    if n == 0 {
        return 1;
    }
    24 * 27u64.pow(n - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commutator_mod_three() {
        let w = [Letter::A, Letter::B, Letter::AInv, Letter::BInv];
        assert_eq!(word_matrix(&w, 3).e, [0, 1, 2, 0]);
    }

    #[test]
    fn generators_invert() {
        for m in [3u64, 9, 27] {
            for l in Letter::ALL {
                let p = generator(l, m).mul(&generator(l.inverse(), m), m);
                assert_eq!(p, Mat2::IDENTITY);
            }
        }
    }

    #[test]
    fn sl2_mod_three_has_24_elements() {
        let mut count = 0;
        for code in 0..81u64 {
            if Mat2::decode(code, 3).det(3) == 1 {
                count += 1;
            }
        }
        assert_eq!(count, sl2_order_pow3(1));
        let mut count9 = 0;
        for code in 0..9u64.pow(4) {
            if Mat2::decode(code, 9).det(9) == 1 {
                count9 += 1;
            }
        }
        assert_eq!(count9, sl2_order_pow3(2));
    }
}
