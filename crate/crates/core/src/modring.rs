//! Arithmetic in `Z / 2^bits Z`.
//!
//! [`WordRing`] is generic over an unsigned machine word and covers
//! `bits <= T::BITS` with masked wrapping arithmetic; [`LimbRing`] covers
//! `bits <= 64 L` with a fixed array of limbs and truncated schoolbook
//! multiplication; [`BigRing`] covers any width with big naturals. Callers pick the narrowest ring that holds the
//! requested precision (see [`with_ring`]).

use num_bigint::BigUint;
use num_traits::{One, PrimInt, WrappingAdd, WrappingMul, WrappingSub, Zero};

use crate::BigNat;

pub trait Pow2Ring {
    type Elem: Clone;

    fn bits(&self) -> u32;
    fn zero(&self) -> Self::Elem;
    fn from_u64(&self, x: u64) -> Self::Elem;
    fn from_big(&self, x: &BigUint) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// `None` for the zero residue.
    fn trailing_zeros(&self, a: &Self::Elem) -> Option<u32>;
    fn to_big(&self, a: &Self::Elem) -> BigUint;

    fn from_i64(&self, x: i64) -> Self::Elem {
        let mag = self.from_u64(x.unsigned_abs());
        if x < 0 {
            self.sub(&self.zero(), &mag)
        } else {
            mag
        }
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        self.trailing_zeros(a).is_none()
    }

    /// Square-and-multiply.
    fn pow(&self, base: &Self::Elem, mut exp: u128) -> Self::Elem {
        let mut acc = self.from_u64(1);
        let mut b = base.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            exp >>= 1;
            if exp > 0 {
                b = self.mul(&b, &b);
            }
        }
        acc
    }
}

/// Machine-word ring, `1 <= bits <= T::BITS`.
#[derive(Debug, Clone, Copy)]
pub struct WordRing<T> {
    bits: u32,
    mask: T,
}

impl<T: PrimInt> WordRing<T> {
    pub fn new(bits: u32) -> Self {
        let width = T::zero().count_zeros();
        assert!(bits >= 1 && bits <= width, "word ring width {bits} outside 1..={width}");
        let mask = if bits == width {
            T::max_value()
        } else {
            (T::one() << bits as usize) - T::one()
        };
        WordRing { bits, mask }
    }
}

impl<T> Pow2Ring for WordRing<T>
where
    T: PrimInt + WrappingAdd + WrappingSub + WrappingMul,
{
    type Elem = T;

    fn bits(&self) -> u32 {
        self.bits
    }

    fn zero(&self) -> T {
        T::zero()
    }

    fn from_u64(&self, x: u64) -> T {
        // T may be narrower than u64; keep only the bits that matter.
        let low = x & self.mask.to_u64().unwrap_or(u64::MAX);
        T::from(low).expect("masked value fits") & self.mask
    }

    fn from_big(&self, x: &BigUint) -> T {
        let mut digits = x.iter_u64_digits();
        let lo = digits.next().unwrap_or(0) as u128;
        let hi = digits.next().unwrap_or(0) as u128;
        let low128 = lo | (hi << 64);
        let cap = self.mask.to_u128().expect("mask fits u128");
        T::from(low128 & cap).expect("masked value fits")
    }

    fn add(&self, a: &T, b: &T) -> T {
        a.wrapping_add(b) & self.mask
    }

    fn sub(&self, a: &T, b: &T) -> T {
        a.wrapping_sub(b) & self.mask
    }

    fn mul(&self, a: &T, b: &T) -> T {
        a.wrapping_mul(b) & self.mask
    }

    fn trailing_zeros(&self, a: &T) -> Option<u32> {
        if a.is_zero() {
            None
        } else {
            Some(a.trailing_zeros())
        }
    }

    fn to_big(&self, a: &T) -> BigUint {
        BigUint::from(a.to_u128().expect("word fits u128"))
    }
}

/// Fixed-width ring on `L` little-endian 64-bit limbs, `1 <= bits <= 64 L`.
#[derive(Debug, Clone, Copy)]
pub struct LimbRing<const L: usize> {
    bits: u32,
    mask: [u64; L],
}

impl<const L: usize> LimbRing<L> {
    pub fn new(bits: u32) -> Self {
        assert!(bits >= 1 && bits as usize <= 64 * L, "limb ring width {bits} outside 1..={}", 64 * L);
        let mut mask = [0u64; L];
        for (i, limb) in mask.iter_mut().enumerate() {
            let lo = 64 * i as u32;
            *limb = match bits.saturating_sub(lo) {
                0 => 0,
                r if r >= 64 => u64::MAX,
                r => (1u64 << r) - 1,
            };
        }
        LimbRing { bits, mask }
    }

    fn masked(&self, mut a: [u64; L]) -> [u64; L] {
        for (x, m) in a.iter_mut().zip(&self.mask) {
            *x &= m;
        }
        a
    }
}

impl<const L: usize> Pow2Ring for LimbRing<L> {
    type Elem = [u64; L];

    fn bits(&self) -> u32 {
        self.bits
    }

    fn zero(&self) -> [u64; L] {
        [0; L]
    }

    fn from_u64(&self, x: u64) -> [u64; L] {
        let mut a = [0; L];
        a[0] = x;
        self.masked(a)
    }

    fn from_big(&self, x: &BigUint) -> [u64; L] {
        let mut a = [0; L];
        for (limb, d) in a.iter_mut().zip(x.iter_u64_digits()) {
            *limb = d;
        }
        self.masked(a)
    }

    fn add(&self, a: &[u64; L], b: &[u64; L]) -> [u64; L] {
        let mut r = [0; L];
        let mut carry = false;
        for i in 0..L {
            let (s, c1) = a[i].overflowing_add(b[i]);
            let (s, c2) = s.overflowing_add(carry as u64);
            r[i] = s;
            carry = c1 || c2;
        }
        self.masked(r)
    }

    fn sub(&self, a: &[u64; L], b: &[u64; L]) -> [u64; L] {
        let mut r = [0; L];
        let mut borrow = false;
        for i in 0..L {
            let (d, b1) = a[i].overflowing_sub(b[i]);
            let (d, b2) = d.overflowing_sub(borrow as u64);
            r[i] = d;
            borrow = b1 || b2;
        }
        self.masked(r)
    }

    fn mul(&self, a: &[u64; L], b: &[u64; L]) -> [u64; L] {
        let mut r = [0u64; L];
        for i in 0..L {
            if a[i] == 0 {
                continue;
            }
            let mut carry = 0u128;
            for j in 0..L - i {
                let t = a[i] as u128 * b[j] as u128 + r[i + j] as u128 + carry;
                r[i + j] = t as u64;
                carry = t >> 64;
            }
        }
        self.masked(r)
    }

    fn trailing_zeros(&self, a: &[u64; L]) -> Option<u32> {
        a.iter().position(|&x| x != 0).map(|i| 64 * i as u32 + a[i].trailing_zeros())
    }

    fn to_big(&self, a: &[u64; L]) -> BigUint {
        a.iter().rev().fold(BigUint::zero(), |acc, &limb| (acc << 64u32) + limb)
    }
}

/// Big-natural ring for arbitrary widths.
#[derive(Debug, Clone)]
pub struct BigRing {
    bits: u32,
    mask: BigNat,
    modulus: BigNat,
}

impl BigRing {
    pub fn new(bits: u32) -> Self {
        assert!(bits >= 1);
        let modulus = BigNat::one() << bits;
        let mask = &modulus - 1u32;
        BigRing { bits, mask, modulus }
    }
}

impl Pow2Ring for BigRing {
    type Elem = BigNat;

    fn bits(&self) -> u32 {
        self.bits
    }

    fn zero(&self) -> BigNat {
        BigNat::zero()
    }

    fn from_u64(&self, x: u64) -> BigNat {
        BigNat::from(x) & &self.mask
    }

    fn from_big(&self, x: &BigUint) -> BigNat {
        x & &self.mask
    }

    fn add(&self, a: &BigNat, b: &BigNat) -> BigNat {
        (a + b) & &self.mask
    }

    fn sub(&self, a: &BigNat, b: &BigNat) -> BigNat {
        (a + &self.modulus - b) & &self.mask
    }

    fn mul(&self, a: &BigNat, b: &BigNat) -> BigNat {
        (a * b) & &self.mask
    }

    fn trailing_zeros(&self, a: &BigNat) -> Option<u32> {
        a.trailing_zeros().map(|t| t as u32)
    }

    fn to_big(&self, a: &BigNat) -> BigUint {
        a.clone()
    }
}

/// Visitor over whichever ring [`with_ring`] selects for a given width.
pub trait RingTask {
    type Output;
    fn run<R: Pow2Ring>(self, ring: &R) -> Self::Output;
}

/// Run `task` in the narrowest ring holding `bits` bits.
pub fn with_ring<F: RingTask>(bits: u32, task: F) -> F::Output {
    match bits {
        0 => panic!("zero-width ring"),
        1..=64 => task.run(&WordRing::<u64>::new(bits)),
        65..=128 => task.run(&WordRing::<u128>::new(bits)),
        129..=256 => task.run(&LimbRing::<4>::new(bits)),
        257..=512 => task.run(&LimbRing::<8>::new(bits)),
        513..=1024 => task.run(&LimbRing::<16>::new(bits)),
        _ => task.run(&BigRing::new(bits)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_ring<R: Pow2Ring>(ring: &R) {
        let bits = ring.bits();
        let modulus = BigUint::one() << bits;
        let a = BigUint::from(0xdead_beef_1234_5678u64) * 977u32 + 13u32;
        let b = BigUint::from(0x0fed_cba9_8765_4321u64) * 31u32;
        let ra = ring.from_big(&a);
        let rb = ring.from_big(&b);
        assert_eq!(ring.to_big(&ring.add(&ra, &rb)), (&a + &b) % &modulus);
        assert_eq!(ring.to_big(&ring.mul(&ra, &rb)), (&a * &b) % &modulus);
        assert_eq!(ring.to_big(&ring.sub(&ra, &rb)), (&a + &modulus * 2u32 - &b) % &modulus);
        assert_eq!(ring.to_big(&ring.pow(&ring.from_u64(3), 1000)), BigUint::from(3u32).modpow(&BigUint::from(1000u32), &modulus));
        assert_eq!(ring.to_big(&ring.from_i64(-1)), &modulus - 1u32);
    }

    #[test]
    fn rings_agree_with_bigint() {
        for bits in [1, 5, 8, 31, 63, 64] {
            check_ring(&WordRing::<u64>::new(bits));
        }
        for bits in [8, 16, 32] {
            check_ring(&WordRing::<u32>::new(bits));
        }
        for bits in [65, 100, 128] {
            check_ring(&WordRing::<u128>::new(bits));
        }
        for bits in [1, 63, 64, 65, 129, 200, 256] {
            check_ring(&LimbRing::<4>::new(bits));
        }
        for bits in [300, 512] {
            check_ring(&LimbRing::<8>::new(bits));
        }
        check_ring(&LimbRing::<16>::new(1000));
        for bits in [3, 64, 129, 300] {
            check_ring(&BigRing::new(bits));
        }
    }

    #[test]
    fn trailing_zero_extraction() {
        let r = WordRing::<u64>::new(8);
        assert_eq!(r.trailing_zeros(&r.from_u64(256)), None);
        assert_eq!(r.trailing_zeros(&r.from_u64(48)), Some(4));
        let r = BigRing::new(200);
        assert_eq!(r.trailing_zeros(&r.from_big(&(BigUint::one() << 150u32))), Some(150));
        let r = LimbRing::<4>::new(200);
        assert_eq!(r.trailing_zeros(&r.from_big(&(BigUint::one() << 150u32))), Some(150));
        assert_eq!(r.trailing_zeros(&r.from_big(&(BigUint::one() << 200u32))), None);
    }
}
