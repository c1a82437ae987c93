use crate::error::{Error, Result};

/// The finite field with `q` elements for `q` in `{2, 3, 4, 5}`.
///
/// Prime fields use residues `0..p`. `GF(4)` encodes `b1 x + b0` as the two low bits,
/// with `x^2 = x + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisField {
    q: u8,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

impl GaloisField {
    pub fn new(q: u32) -> Result<Self> {
        let q = match q {
            2..=5 => q as u8,
            _ => return Err(Error::InvalidParameter(format!("supported field orders are 2, 3, 4, 5, got {q}"))),
        };
        let size = q as usize;
        let mut add = vec![0u8; size * size];
        let mut mul = vec![0u8; size * size];
        for a in 0..q {
            for b in 0..q {
                let ix = a as usize * size + b as usize;
                if q == 4 {
                    add[ix] = a ^ b;
                    mul[ix] = gf4_mul(a, b);
                } else {
                    add[ix] = (a + b) % q;
                    mul[ix] = (a * b) % q;
                }
            }
        }
        let neg = (0..q).map(|a| (0..q).find(|&b| add[a as usize * size + b as usize] == 0).unwrap_or(0)).collect();
        let inv = (0..q).map(|a| (1..q).find(|&b| mul[a as usize * size + b as usize] == 1).unwrap_or(0)).collect();
        Ok(GaloisField { q, add, mul, neg, inv })
    }

    pub fn order(&self) -> u8 {
        self.q
    }

    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q as usize + b as usize]
    }

    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg[b as usize])
    }

    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q as usize + b as usize]
    }

    /// Multiplicative inverse; 0 maps to 0.
    pub fn inv(&self, a: u8) -> u8 {
        self.inv[a as usize]
    }
}

fn gf4_mul(a: u8, b: u8) -> u8 {
    let mut p = 0u8;
    for bit in 0..2 {
        if b & (1 << bit) != 0 {
            p ^= a << bit;
        }
    }
    if p & 0b100 != 0 {
        p ^= 0b111;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms() {
        for q in 2..=5 {
            let f = GaloisField::new(q).unwrap();
            for a in 0..q as u8 {
                assert_eq!(f.add(a, 0), a);
                assert_eq!(f.mul(a, 1), a);
                assert_eq!(f.sub(a, a), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1);
                }
                for b in 0..q as u8 {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in 0..q as u8 {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                        assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_other_orders() {
        assert!(GaloisField::new(6).is_err());
        assert!(GaloisField::new(1).is_err());
        assert!(GaloisField::new(7).is_err());
    }
}
