//! Packed coefficient vectors over the three search rings.
//!
//! A coefficient vector holds up to 128 ring elements, one per bit position
//! (position `i` maps to bit `i`, LSB-first). All arithmetic is carried out
//! with a handful of bitwise word operations instead of element loops:
//!
//! * `Z2` -- one word, value = bit.
//! * `Z3` -- two words (`hi`, `lo`), values 0=00, 1=01, 2=10; `hi & lo = 0`.
//! * `Zt` -- two words (`sign`, `mag`), sign-magnitude over {-1, 0, 1};
//!   `sign` is a subset of `mag`.

use std::fmt;

use thiserror::Error;

/// Coefficient ring selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ring {
    /// Binary coefficients {0, 1}, arithmetic mod 2.
    Z2,
    /// Ternary coefficients {0, 1, 2}, arithmetic mod 3.
    Z3,
    /// Integer ternary coefficients {-1, 0, 1}, exact arithmetic.
    Zt,
}

impl Ring {
    pub fn parse(s: &str) -> Option<Ring> {
        match s {
            "z2" | "Z2" => Some(Ring::Z2),
            "z3" | "Z3" => Some(Ring::Z3),
            "zt" | "ZT" | "Zt" => Some(Ring::Zt),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Ring::Z2 => "z2",
            Ring::Z3 => "z3",
            Ring::Zt => "zt",
        }
    }

    /// Canonical elements of the ring.
    pub fn contains(self, value: i64) -> bool {
        match self {
            Ring::Z2 => value == 0 || value == 1,
            Ring::Z3 => (0..=2).contains(&value),
            Ring::Zt => (-1..=1).contains(&value),
        }
    }

    /// The modulus for the modular rings, `None` for exact ternary.
    pub fn modulus(self) -> Option<u8> {
        match self {
            Ring::Z2 => Some(2),
            Ring::Z3 => Some(3),
            Ring::Zt => None,
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Hard limit on coefficient positions per vector: one slice of a matrix
/// operand must fit in a 128-bit word.
pub const MAX_LEN: usize = 128;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodeError {
    #[error("value {value} at position {index} is not a canonical {ring} element")]
    ValueOutOfRing { value: i64, index: usize, ring: Ring },
    #[error("vector length {0} exceeds the {MAX_LEN}-entry limit")]
    LengthExceeded(usize),
    #[error("coefficient vectors must have at least one position")]
    Empty,
}

/// Componentwise arithmetic left {-1, 0, 1}; the attempted transformation is
/// invalid over `Zt`.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("componentwise result leaves {{-1, 0, 1}}")]
pub struct OutOfRing;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Payload {
    Z2(u128),
    Z3 { hi: u128, lo: u128 },
    Zt { sign: u128, mag: u128 },
}

/// A packed vector of ring coefficients, immutable after construction.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoeffVec {
    len: u8,
    payload: Payload,
}

#[inline]
fn mask(len: usize) -> u128 {
    if len == MAX_LEN {
        u128::MAX
    } else {
        (1u128 << len) - 1
    }
}

impl CoeffVec {
    /// Packs a list of canonical ring elements, position `i` -> bit `i`.
    pub fn encode(values: &[i64], ring: Ring) -> Result<CoeffVec, EncodeError> {
        if values.is_empty() {
            return Err(EncodeError::Empty);
        }
        if values.len() > MAX_LEN {
            return Err(EncodeError::LengthExceeded(values.len()));
        }
        for (index, &value) in values.iter().enumerate() {
            if !ring.contains(value) {
                return Err(EncodeError::ValueOutOfRing { value, index, ring });
            }
        }
        let mut v = CoeffVec::zero(values.len(), ring);
        for (i, &value) in values.iter().enumerate() {
            v.set(i, value as i8);
        }
        Ok(v)
    }

    /// The all-zero vector of the given length.
    pub fn zero(len: usize, ring: Ring) -> CoeffVec {
        assert!((1..=MAX_LEN).contains(&len), "length {len} out of 1..=128");
        let payload = match ring {
            Ring::Z2 => Payload::Z2(0),
            Ring::Z3 => Payload::Z3 { hi: 0, lo: 0 },
            Ring::Zt => Payload::Zt { sign: 0, mag: 0 },
        };
        CoeffVec { len: len as u8, payload }
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        false // length is always >= 1
    }

    pub fn ring(&self) -> Ring {
        match self.payload {
            Payload::Z2(_) => Ring::Z2,
            Payload::Z3 { .. } => Ring::Z3,
            Payload::Zt { .. } => Ring::Zt,
        }
    }

    /// Smallest storage word width (16/32/64/128 bits) that fits the vector.
    pub fn width(&self) -> u32 {
        match self.len {
            0..=16 => 16,
            17..=32 => 32,
            33..=64 => 64,
            _ => 128,
        }
    }

    /// Coefficient at position `i`, as a canonical ring element.
    pub fn get(&self, i: usize) -> i8 {
        debug_assert!(i < self.len());
        let bit = 1u128 << i;
        match self.payload {
            Payload::Z2(b) => (b >> i & 1) as i8,
            Payload::Z3 { hi, lo } => {
                if hi & bit != 0 {
                    2
                } else {
                    (lo >> i & 1) as i8
                }
            }
            Payload::Zt { sign, mag } => {
                if mag & bit == 0 {
                    0
                } else if sign & bit != 0 {
                    -1
                } else {
                    1
                }
            }
        }
    }

    fn set(&mut self, i: usize, value: i8) {
        let bit = 1u128 << i;
        match &mut self.payload {
            Payload::Z2(b) => {
                if value != 0 {
                    *b |= bit;
                } else {
                    *b &= !bit;
                }
            }
            Payload::Z3 { hi, lo } => {
                *hi &= !bit;
                *lo &= !bit;
                match value {
                    1 => *lo |= bit,
                    2 => *hi |= bit,
                    _ => {}
                }
            }
            Payload::Zt { sign, mag } => {
                *sign &= !bit;
                *mag &= !bit;
                if value != 0 {
                    *mag |= bit;
                    if value < 0 {
                        *sign |= bit;
                    }
                }
            }
        }
    }

    /// Unpacks into canonical ring elements.
    pub fn decode(&self) -> Vec<i8> {
        (0..self.len()).map(|i| self.get(i)).collect()
    }

    /// Componentwise sum in the ring. Over `Zt` the exact integer sum is
    /// rejected if any component leaves {-1, 0, 1}.
    pub fn add(&self, other: &CoeffVec) -> Result<CoeffVec, OutOfRing> {
        debug_assert_eq!(self.len, other.len);
        let payload = match (self.payload, other.payload) {
            (Payload::Z2(a), Payload::Z2(b)) => Payload::Z2(a ^ b),
            (Payload::Z3 { hi: ah, lo: al }, Payload::Z3 { hi: bh, lo: bl }) => {
                // Mux on b's value per position: b=0 keeps a, b=1 increments
                // (0->1->2->0), b=2 decrements; all three branch-free.
                let az = !(ah | al) & mask(self.len());
                let bz = !(bh | bl);
                let hi = (ah & bz) | (al & bl) | (az & bh);
                let lo = (al & bz) | (az & bl) | (ah & bh);
                Payload::Z3 { hi, lo }
            }
            (Payload::Zt { sign: a_sign, mag: am }, Payload::Zt { sign: b_sign, mag: bm }) => {
                // Both nonzero with equal signs would give +-2.
                if am & bm & !(a_sign ^ b_sign) != 0 {
                    return Err(OutOfRing);
                }
                let mag = am ^ bm;
                let sign = (a_sign | b_sign) & mag;
                Payload::Zt { sign, mag }
            }
            _ => panic!("ring mismatch in vector arithmetic"),
        };
        Ok(CoeffVec { len: self.len, payload })
    }

    /// Componentwise difference; `a - b = a + (-b)` in every supported ring.
    pub fn sub(&self, other: &CoeffVec) -> Result<CoeffVec, OutOfRing> {
        self.add(&other.neg())
    }

    /// Componentwise negation: identity over `Z2`, 1<->2 over `Z3`, sign
    /// flip over `Zt`.
    pub fn neg(&self) -> CoeffVec {
        let payload = match self.payload {
            Payload::Z2(b) => Payload::Z2(b),
            Payload::Z3 { hi, lo } => Payload::Z3 { hi: lo, lo: hi },
            Payload::Zt { sign, mag } => Payload::Zt { sign: sign ^ mag, mag },
        };
        CoeffVec { len: self.len, payload }
    }

    /// Number of nonzero coefficient positions.
    pub fn nonzero_count(&self) -> u32 {
        match self.payload {
            Payload::Z2(b) => b.count_ones(),
            Payload::Z3 { hi, lo } => (hi | lo).count_ones(),
            Payload::Zt { mag, .. } => mag.count_ones(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.nonzero_count() == 0
    }

    /// Lowest nonzero position, if any.
    pub fn first_nonzero(&self) -> Option<usize> {
        let occupied = match self.payload {
            Payload::Z2(b) => b,
            Payload::Z3 { hi, lo } => hi | lo,
            Payload::Zt { mag, .. } => mag,
        };
        if occupied == 0 {
            None
        } else {
            Some(occupied.trailing_zeros() as usize)
        }
    }

    /// Multiplies every coefficient by a canonical ring element. Every
    /// supported ring has units {1, -1} only (2 = -1 mod 3), so this is
    /// always one of {zero, identity, negation}.
    pub fn scale(&self, c: i8) -> CoeffVec {
        match (self.ring(), c) {
            (_, 0) => CoeffVec::zero(self.len(), self.ring()),
            (_, 1) => *self,
            (Ring::Z3, 2) | (Ring::Zt, -1) => self.neg(),
            (ring, c) => panic!("scalar {c} is not a canonical {ring} element"),
        }
    }

    /// Checks the representation invariants: no bits at positions >= len,
    /// the `Zt` sign word a subset of the magnitude word, and the `Z3`
    /// high/low words disjoint.
    pub fn invariants_ok(&self) -> bool {
        let m = mask(self.len());
        match self.payload {
            Payload::Z2(b) => b & !m == 0,
            Payload::Z3 { hi, lo } => hi & !m == 0 && lo & !m == 0 && hi & lo == 0,
            Payload::Zt { sign, mag } => mag & !m == 0 && sign & !mag == 0,
        }
    }

    /// Splits into `(canonical, negated)` where `canonical` has its first
    /// nonzero coefficient equal to +1. Over `Z2` and `Z3` the vector is its
    /// own canonical form. A zero vector is canonical.
    pub fn sign_canonical(&self) -> (CoeffVec, bool) {
        if self.ring() != Ring::Zt {
            return (*self, false);
        }
        match self.first_nonzero() {
            Some(i) if self.get(i) < 0 => (self.neg(), true),
            _ => (*self, false),
        }
    }
}

impl fmt::Debug for CoeffVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CoeffVec<{}>{:?}", self.ring(), self.decode())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vec2(bits: &[i64]) -> CoeffVec {
        CoeffVec::encode(bits, Ring::Z2).unwrap()
    }

    #[test]
    fn encode_positions_are_lsb_first() {
        let v = vec2(&[0, 1, 1, 0]);
        // payload bits 0110: position 1 and 2 set
        assert_eq!(v.decode(), vec![0, 1, 1, 0]);
        assert_eq!(v.get(0), 0);
        assert_eq!(v.get(1), 1);
    }

    #[test]
    fn encode_zt_sign_magnitude() {
        let v = CoeffVec::encode(&[-1, 0, 1], Ring::Zt).unwrap();
        assert_eq!(v.decode(), vec![-1, 0, 1]);
        assert_eq!(v.nonzero_count(), 2);
    }

    #[test]
    fn encode_z3_two_bit() {
        let v = CoeffVec::encode(&[2, 0, 1], Ring::Z3).unwrap();
        assert_eq!(v.decode(), vec![2, 0, 1]);
        assert_eq!(v.nonzero_count(), 2);
        // position 0 is the lowest bit: high word 010 / low word 001
        // decodes as value 1 at position 0, value 2 at position 1.
        let w = CoeffVec::encode(&[1, 2, 0], Ring::Z3).unwrap();
        assert_eq!(w.decode(), vec![1, 2, 0]);
        assert_eq!(w.get(0), 1);
        assert_eq!(w.get(1), 2);
    }

    #[test]
    fn encode_rejects_non_canonical() {
        assert!(matches!(
            CoeffVec::encode(&[0, 2], Ring::Z2),
            Err(EncodeError::ValueOutOfRing { value: 2, index: 1, .. })
        ));
        assert!(matches!(
            CoeffVec::encode(&[-1], Ring::Z3),
            Err(EncodeError::ValueOutOfRing { .. })
        ));
        assert!(matches!(
            CoeffVec::encode(&[2], Ring::Zt),
            Err(EncodeError::ValueOutOfRing { .. })
        ));
    }

    #[test]
    fn encode_rejects_bad_lengths() {
        assert_eq!(CoeffVec::encode(&[], Ring::Z2), Err(EncodeError::Empty));
        let long = vec![0i64; 129];
        assert_eq!(
            CoeffVec::encode(&long, Ring::Z2),
            Err(EncodeError::LengthExceeded(129))
        );
        let full = vec![1i64; 128];
        assert_eq!(CoeffVec::encode(&full, Ring::Z2).unwrap().nonzero_count(), 128);
    }

    #[test]
    fn width_is_smallest_fitting() {
        for (len, want) in [(1, 16), (16, 16), (17, 32), (32, 32), (33, 64), (64, 64), (65, 128), (128, 128)] {
            assert_eq!(CoeffVec::zero(len, Ring::Z2).width(), want, "len {len}");
        }
    }

    #[test]
    fn z2_add_is_xor() {
        let a = vec2(&[1, 0, 1, 0]);
        let b = vec2(&[0, 1, 1, 0]);
        assert_eq!(a.add(&b).unwrap().decode(), vec![1, 1, 0, 0]);
        assert_eq!(a.sub(&b).unwrap(), a.add(&b).unwrap());
    }

    #[test]
    fn z3_wraps_mod_3() {
        let two = CoeffVec::encode(&[2], Ring::Z3).unwrap();
        assert_eq!(two.add(&two).unwrap().decode(), vec![1]);
        let zero = CoeffVec::zero(1, Ring::Z3);
        let one = CoeffVec::encode(&[1], Ring::Z3).unwrap();
        assert_eq!(zero.sub(&one).unwrap().decode(), vec![2]);
    }

    #[test]
    fn zt_overflow_is_rejected() {
        let one = CoeffVec::encode(&[1], Ring::Zt).unwrap();
        assert_eq!(one.add(&one), Err(OutOfRing));
        let minus = one.neg();
        assert_eq!(minus.sub(&one), Err(OutOfRing));
        assert_eq!(one.add(&minus).unwrap().decode(), vec![0]);
    }

    #[test]
    fn neg_per_ring() {
        let zt = CoeffVec::encode(&[-1, 0, 1], Ring::Zt).unwrap();
        assert_eq!(zt.neg().decode(), vec![1, 0, -1]);
        let z2 = vec2(&[1, 0, 1]);
        assert_eq!(z2.neg(), z2);
        let z3 = CoeffVec::encode(&[1, 2, 0], Ring::Z3).unwrap();
        assert_eq!(z3.neg().decode(), vec![2, 1, 0]);
    }

    #[test]
    fn sign_canonical_flips_leading_minus() {
        let v = CoeffVec::encode(&[0, -1, 1], Ring::Zt).unwrap();
        let (c, negated) = v.sign_canonical();
        assert!(negated);
        assert_eq!(c.decode(), vec![0, 1, -1]);
        assert_eq!(c.sign_canonical().0, c);
    }

    #[test]
    fn scale_covers_all_units() {
        let v = CoeffVec::encode(&[1, 0, 2], Ring::Z3).unwrap();
        assert_eq!(v.scale(2), v.neg());
        assert_eq!(v.scale(0), CoeffVec::zero(3, Ring::Z3));
        assert_eq!(v.scale(1), v);
    }
}
