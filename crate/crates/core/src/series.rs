//! Truncated power series in one variable over the integers.
//!
//! A [`TruncSeries`] tracks the coefficients of `x^0 ..= x^precision` and
//! nothing beyond. Binary operations truncate to the smaller of the two
//! precisions, so a result never claims more accuracy than its inputs.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("series is not invertible over the integers: constant term {0} is not a unit")]
    NotUnit(BigInt),
    #[error("coefficient x^{index} requested but the series is only tracked to x^{precision}")]
    OutOfRange { index: usize, precision: usize },
}

/// A power series `a_0 + a_1 x + ... + a_P x^P + O(x^{P+1})`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruncSeries {
    // always `precision + 1` entries
    coeffs: Vec<BigInt>,
}

impl TruncSeries {
    /// Builds a series from its low-order coefficients. Missing coefficients
    /// up to `precision` are zero; coefficients above `precision` are dropped.
    pub fn new<I, T>(coeffs: I, precision: usize) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        let mut coeffs: Vec<BigInt> = coeffs
            .into_iter()
            .take(precision + 1)
            .map(Into::into)
            .collect();
        coeffs.resize(precision + 1, BigInt::zero());
        TruncSeries { coeffs }
    }

    pub fn zero(precision: usize) -> Self {
        TruncSeries {
            coeffs: vec![BigInt::zero(); precision + 1],
        }
    }

    pub fn one(precision: usize) -> Self {
        Self::constant(1, precision)
    }

    pub fn constant(c: impl Into<BigInt>, precision: usize) -> Self {
        Self::new([c.into()], precision)
    }

    /// `1 + r x`, the total Chern class of the line bundle of degree `r`.
    pub fn linear(r: impl Into<BigInt>, precision: usize) -> Self {
        Self::new([BigInt::one(), r.into()], precision)
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// The coefficient of `x^index`. Asking past the tracked precision is an
    /// error rather than an implicit zero.
    pub fn coeff(&self, index: usize) -> Result<&BigInt, SeriesError> {
        self.coeffs.get(index).ok_or(SeriesError::OutOfRange {
            index,
            precision: self.precision(),
        })
    }

    pub fn truncate(&self, precision: usize) -> Self {
        Self::new(self.coeffs.iter().cloned(), precision)
    }

    /// Substitutes `x -> x^2`, keeping the given precision.
    pub fn substitute_square(&self, precision: usize) -> Self {
        let mut out = Self::zero(precision);
        for (i, c) in self.coeffs.iter().enumerate() {
            if 2 * i > precision {
                break;
            }
            out.coeffs[2 * i] = c.clone();
        }
        out
    }

    /// Multiplicative inverse; the constant term must be `+1` or `-1`.
    pub fn inv(&self) -> Result<Self, SeriesError> {
        let c0 = &self.coeffs[0];
        if !(c0.abs().is_one()) {
            return Err(SeriesError::NotUnit(c0.clone()));
        }
        let p = self.precision();
        let mut out: Vec<BigInt> = Vec::with_capacity(p + 1);
        // c0 is its own inverse
        out.push(c0.clone());
        for i in 1..=p {
            let mut acc = BigInt::zero();
            for j in 1..=i {
                acc += &self.coeffs[j] * &out[i - j];
            }
            out.push(-(acc * c0));
        }
        Ok(TruncSeries { coeffs: out })
    }

    /// `self^exp` by square-and-multiply; negative exponents go through
    /// [`TruncSeries::inv`].
    pub fn int_pow(&self, exp: i64) -> Result<Self, SeriesError> {
        let base = if exp < 0 { self.inv()? } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut result = Self::one(self.precision());
        let mut square = base;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &square;
            }
            e >>= 1;
            if e > 0 {
                square = &square * &square;
            }
        }
        Ok(result)
    }

    pub fn reduce_mod2(&self) -> Mod2Series {
        Mod2Series {
            bits: self.coeffs.iter().map(|c| c.is_odd()).collect(),
        }
    }
}

impl<'a> Add<&'a TruncSeries> for &'a TruncSeries {
    type Output = TruncSeries;

    fn add(self, rhs: &'a TruncSeries) -> TruncSeries {
        TruncSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<'a> Sub<&'a TruncSeries> for &'a TruncSeries {
    type Output = TruncSeries;

    fn sub(self, rhs: &'a TruncSeries) -> TruncSeries {
        TruncSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &TruncSeries {
    type Output = TruncSeries;

    fn neg(self) -> TruncSeries {
        TruncSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl<'a> Mul<&'a TruncSeries> for &'a TruncSeries {
    type Output = TruncSeries;

    fn mul(self, rhs: &'a TruncSeries) -> TruncSeries {
        let p = self.precision().min(rhs.precision());
        let mut coeffs = vec![BigInt::zero(); p + 1];
        for (i, a) in self.coeffs.iter().take(p + 1).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().take(p + 1 - i).enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        TruncSeries { coeffs }
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            } else if c.is_negative() {
                f.write_str("-")?;
            }
            first = false;
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                _ if a.is_one() => {}
                _ => write!(f, "{a}")?,
            }
            match i {
                0 => {}
                1 => f.write_str("x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(x^{})", self.precision() + 1)
    }
}

/// A truncated series over `Z/2`, as produced by [`TruncSeries::reduce_mod2`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mod2Series {
    bits: Vec<bool>,
}

impl Mod2Series {
    pub fn new(bits: Vec<bool>) -> Self {
        assert!(!bits.is_empty(), "a mod-2 series tracks at least x^0");
        Mod2Series { bits }
    }

    pub fn precision(&self) -> usize {
        self.bits.len() - 1
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn coeff(&self, index: usize) -> Result<bool, SeriesError> {
        self.bits.get(index).copied().ok_or(SeriesError::OutOfRange {
            index,
            precision: self.precision(),
        })
    }
}

impl<'a> Add<&'a Mod2Series> for &'a Mod2Series {
    type Output = Mod2Series;

    fn add(self, rhs: &'a Mod2Series) -> Mod2Series {
        Mod2Series {
            bits: self.bits.iter().zip(&rhs.bits).map(|(a, b)| a ^ b).collect(),
        }
    }
}

impl<'a> Mul<&'a Mod2Series> for &'a Mod2Series {
    type Output = Mod2Series;

    fn mul(self, rhs: &'a Mod2Series) -> Mod2Series {
        let p = self.precision().min(rhs.precision());
        let mut bits = vec![false; p + 1];
        for i in 0..=p {
            if !self.bits[i] {
                continue;
            }
            for j in 0..=(p - i) {
                bits[i + j] ^= rhs.bits[j];
            }
        }
        Mod2Series { bits }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(coeffs: &[i64], p: usize) -> TruncSeries {
        TruncSeries::new(coeffs.iter().copied(), p)
    }

    #[test]
    fn add_examples() {
        assert_eq!(&s(&[1, 1], 3) + &s(&[1, -1], 2), s(&[2], 2));
        let a = s(&[4, 0, -3], 5);
        assert_eq!(&a + &TruncSeries::zero(5), a);
        assert_eq!(&s(&[1, 2, 3], 2) + &s(&[1, -2], 2), s(&[2, 0, 3], 2));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(&s(&[1, 1], 4) * &s(&[1, -1], 4), s(&[1, 0, -1], 4));
        let a = s(&[3, 1, 4, 1], 3);
        assert_eq!(&a * &TruncSeries::one(3), a);
        assert_eq!(&s(&[1, 2], 2) * &s(&[1, 3], 2), s(&[1, 5, 6], 2));
    }

    #[test]
    fn mixed_precision_truncates_to_minimum() {
        let a = s(&[1, 1, 1, 1, 1], 4);
        let b = s(&[1, 1], 1);
        assert_eq!((&a * &b).precision(), 1);
        assert_eq!((&a + &b).precision(), 1);
    }

    #[test]
    fn inv_examples() {
        assert_eq!(s(&[1, 1], 3).inv().unwrap(), s(&[1, -1, 1, -1], 3));
        assert_eq!(TruncSeries::one(6).inv().unwrap(), TruncSeries::one(6));
        let a = s(&[1, 2], 2);
        let b = a.inv().unwrap();
        assert_eq!(&a * &b, TruncSeries::one(2));
        assert_eq!(b, s(&[1, -2, 4], 2));
    }

    #[test]
    fn inv_negative_unit() {
        let a = s(&[-1, 3, 2], 4);
        assert_eq!(&a * &a.inv().unwrap(), TruncSeries::one(4));
    }

    #[test]
    fn inv_rejects_non_unit() {
        assert_eq!(s(&[2, 1], 3).inv(), Err(SeriesError::NotUnit(BigInt::from(2))));
        assert!(s(&[0, 1], 3).inv().is_err());
        assert!(s(&[2], 3).int_pow(-1).is_err());
    }

    #[test]
    fn int_pow_examples() {
        assert_eq!(
            s(&[1, 1], 4).int_pow(5).unwrap(),
            s(&[1, 5, 10, 10, 5], 4)
        );
        assert_eq!(s(&[7, 1], 3).int_pow(0).unwrap(), TruncSeries::one(3));
        // binomial oracle: (1 - y)^5 with y = x^2
        assert_eq!(
            s(&[1, 0, -1], 4).int_pow(5).unwrap(),
            s(&[1, 0, -5, 0, 10], 4)
        );
    }

    #[test]
    fn coeff_examples() {
        let a = s(&[1, 5], 1);
        assert_eq!(a.coeff(1).unwrap(), &BigInt::from(5));
        assert_eq!(a.coeff(0).unwrap(), &BigInt::from(1));
        let b = s(&[1, 1], 4).int_pow(5).unwrap();
        assert_eq!(
            b.coeff(5),
            Err(SeriesError::OutOfRange {
                index: 5,
                precision: 4
            })
        );
    }

    #[test]
    fn reduce_mod2_examples() {
        assert_eq!(
            s(&[1, 5, 10], 2).reduce_mod2(),
            Mod2Series::new(vec![true, true, false])
        );
        assert_eq!(
            s(&[0, 2], 1).reduce_mod2(),
            Mod2Series::new(vec![false, false])
        );
        // (1+x)^6 = 1 + 6x + 15x^2 + ...
        assert_eq!(
            s(&[1, 1], 2).int_pow(6).unwrap().reduce_mod2(),
            Mod2Series::new(vec![true, false, true])
        );
    }

    #[test]
    fn substitute_square() {
        assert_eq!(
            s(&[1, -5, 10], 2).substitute_square(4),
            s(&[1, 0, -5, 0, 10], 4)
        );
        assert_eq!(s(&[1, 2, 3], 2).substitute_square(3), s(&[1, 0, 2], 3));
    }

    #[test]
    fn display() {
        assert_eq!(s(&[1, -5, 0, 1], 3).to_string(), "1 - 5x + x^3 + O(x^4)");
        assert_eq!(TruncSeries::zero(1).to_string(), "0 + O(x^2)");
    }

    const PREC: usize = 6;

    fn series() -> impl Strategy<Value = TruncSeries> {
        prop::collection::vec(-20i64..=20, PREC + 1).prop_map(|v| s(&v, PREC))
    }

    fn unit_series() -> impl Strategy<Value = TruncSeries> {
        (prop::bool::ANY, prop::collection::vec(-20i64..=20, PREC)).prop_map(|(neg, tail)| {
            let mut v = vec![if neg { -1 } else { 1 }];
            v.extend(tail);
            s(&v, PREC)
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in series(), b in series(), c in series()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&(&a - &b) + &b, a.clone());
            prop_assert_eq!(&a + &(-&a), TruncSeries::zero(PREC));
        }

        #[test]
        fn inverse_is_two_sided(a in unit_series()) {
            let b = a.inv().unwrap();
            prop_assert_eq!(&a * &b, TruncSeries::one(PREC));
            prop_assert_eq!(&b * &a, TruncSeries::one(PREC));
        }

        #[test]
        fn power_law(a in unit_series(), e in -6i64..=6, f in -6i64..=6) {
            let lhs = a.int_pow(e + f).unwrap();
            let rhs = &a.int_pow(e).unwrap() * &a.int_pow(f).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn mod2_is_ring_homomorphism(a in series(), b in series()) {
            prop_assert_eq!((&a + &b).reduce_mod2(), &a.reduce_mod2() + &b.reduce_mod2());
            prop_assert_eq!((&a * &b).reduce_mod2(), &a.reduce_mod2() * &b.reduce_mod2());
        }
    }
}
