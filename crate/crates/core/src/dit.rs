//! Arithmetic in the ring Z_d.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduce a signed integer into `0..d`.
#[inline]
pub fn reduce(value: i64, d: u32) -> u32 {
    value.rem_euclid(d as i64) as u32
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2u32;
    while k * k <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

/// Multiplicative inverse of `a` modulo `d`, if it exists.
pub fn mod_inverse(a: i64, d: u32) -> Option<u32> {
    let (mut old_r, mut r) = (reduce(a, d) as i64, d as i64);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    (old_r == 1).then(|| reduce(old_s, d))
}

pub(crate) fn check_dimension(d: u32) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension { d, reason: "dimension must be at least 2" });
    }
    Ok(())
}

pub(crate) fn check_prime(d: u32) -> Result<()> {
    check_dimension(d)?;
    if !is_prime(d) {
        return Err(Error::InvalidDimension { d, reason: "dimension must be prime" });
    }
    Ok(())
}

pub(crate) fn check_odd_prime(d: u32) -> Result<()> {
    check_prime(d)?;
    if d == 2 {
        return Err(Error::Unsupported("d = 2 has no inverse of 2; use the qubit constructions".into()));
    }
    Ok(())
}

/// An element of Z_d.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dit {
    value: u32,
    modulus: u32,
}

impl Dit {
    pub fn new(value: i64, modulus: u32) -> Self {
        assert!(modulus >= 2, "modulus must be at least 2");
        Dit { value: reduce(value, modulus), modulus }
    }

    pub fn zero(modulus: u32) -> Self {
        Dit::new(0, modulus)
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    /// Inverse, defined for nonzero elements coprime to the modulus.
    pub fn inverse(self) -> Option<Dit> {
        mod_inverse(self.value as i64, self.modulus).map(|v| Dit::new(v as i64, self.modulus))
    }

    pub fn pow(self, mut exp: u64) -> Dit {
        let m = self.modulus as u64;
        let mut base = self.value as u64;
        let mut acc = 1u64 % m;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % m;
            }
            base = base * base % m;
            exp >>= 1;
        }
        Dit { value: acc as u32, modulus: self.modulus }
    }

    fn same_modulus(self, other: Dit) {
        assert_eq!(self.modulus, other.modulus, "mixed moduli in Z_d arithmetic");
    }
}

impl fmt::Debug for Dit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

impl fmt::Display for Dit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for Dit {
    type Output = Dit;
    fn add(self, rhs: Dit) -> Dit {
        self.same_modulus(rhs);
        Dit::new(self.value as i64 + rhs.value as i64, self.modulus)
    }
}

impl Sub for Dit {
    type Output = Dit;
    fn sub(self, rhs: Dit) -> Dit {
        self.same_modulus(rhs);
        Dit::new(self.value as i64 - rhs.value as i64, self.modulus)
    }
}

impl Mul for Dit {
    type Output = Dit;
    fn mul(self, rhs: Dit) -> Dit {
        self.same_modulus(rhs);
        Dit::new(self.value as i64 * rhs.value as i64, self.modulus)
    }
}

impl Neg for Dit {
    type Output = Dit;
    fn neg(self) -> Dit {
        Dit::new(-(self.value as i64), self.modulus)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn primes() {
        let primes: Vec<u32> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn half_in_z3_is_two() {
        assert_eq!(mod_inverse(2, 3), Some(2));
        assert_eq!(mod_inverse(2, 5), Some(3));
        assert_eq!(mod_inverse(3, 6), None);
    }

    #[test]
    fn negative_values_reduce() {
        assert_eq!(Dit::new(-1, 5).value(), 4);
        assert_eq!((-Dit::new(2, 7)).value(), 5);
    }

    proptest! {
        #[test]
        fn field_inverse(d in prop::sample::select(vec![3u32, 5, 7, 11, 13]), a in 1i64..1000) {
            prop_assume!(a % d as i64 != 0);
            let x = Dit::new(a, d);
            let inv = x.inverse().unwrap();
            prop_assert_eq!((x * inv).value(), 1);
        }

        #[test]
        fn ring_laws(d in 2u32..30, a in -100i64..100, b in -100i64..100, c in -100i64..100) {
            let (a, b, c) = (Dit::new(a, d), Dit::new(b, d), Dit::new(c, d));
            prop_assert_eq!(a * (b + c), a * b + a * c);
            prop_assert_eq!(a - b + b, a);
            prop_assert_eq!(a.pow(3), a * a * a);
        }
    }
}
