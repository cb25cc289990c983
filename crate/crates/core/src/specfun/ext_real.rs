//! Binary floating point with an explicit, arbitrary mantissa width.
//!
//! A value is `mantissa * 2^exponent` with `|mantissa| < 2^precision`. Every
//! operation computes the exact result first and then rounds it once to the
//! target precision (round half to even), so results are bit-identical across
//! runs and platforms. Representations are canonical (odd mantissa, or zero
//! with exponent 0), which makes structural equality value equality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Smallest accepted mantissa width in bits.
pub const MIN_PRECISION_BITS: u32 = 64;

/// Mantissa width in bits, always at least [`MIN_PRECISION_BITS`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Precision(u32);

impl Precision {
    pub fn new(bits: u32) -> Result<Self> {
        if bits < MIN_PRECISION_BITS {
            return Err(Error::config(
                "precision",
                format!("{bits} bits requested, minimum is {MIN_PRECISION_BITS}"),
            ));
        }
        Ok(Precision(bits))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn doubled(self) -> Self {
        Precision(self.0.saturating_mul(2))
    }
}

impl Default for Precision {
    /// 320 bits, the starting width for coefficient synthesis.
    fn default() -> Self {
        Precision(320)
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} bits", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtReal {
    mantissa: BigInt,
    exponent: i64,
    precision: Precision,
}

/// Rounds `sign * magnitude * 2^exponent` to `bits` significant bits.
fn round_parts(sign: Sign, magnitude: BigUint, exponent: i64, bits: u64) -> (BigInt, i64) {
    if magnitude.is_zero() {
        return (BigInt::zero(), 0);
    }
    let mut magnitude = magnitude;
    let mut exponent = exponent;
    let len = magnitude.bits();
    if len > bits {
        let shift = len - bits;
        let quotient = &magnitude >> shift;
        let remainder = &magnitude - (&quotient << shift);
        let half = BigUint::one() << (shift - 1);
        magnitude = match remainder.cmp(&half) {
            Ordering::Greater => quotient + 1u32,
            Ordering::Less => quotient,
            Ordering::Equal if quotient.bit(0) => quotient + 1u32,
            Ordering::Equal => quotient,
        };
        exponent += shift as i64;
    }
    let zeros = magnitude.trailing_zeros().unwrap_or(0);
    if zeros > 0 {
        magnitude >>= zeros;
        exponent += zeros as i64;
    }
    (BigInt::from_biguint(sign, magnitude), exponent)
}

impl ExtReal {
    pub fn zero(precision: Precision) -> Self {
        ExtReal {
            mantissa: BigInt::zero(),
            exponent: 0,
            precision,
        }
    }

    pub fn one(precision: Precision) -> Self {
        Self::from_i64(1, precision)
    }

    fn from_parts(sign: Sign, magnitude: BigUint, exponent: i64, precision: Precision) -> Self {
        let (mantissa, exponent) =
            round_parts(sign, magnitude, exponent, u64::from(precision.bits()));
        ExtReal {
            mantissa,
            exponent,
            precision,
        }
    }

    pub fn from_i64(value: i64, precision: Precision) -> Self {
        Self::from_bigint(&BigInt::from(value), precision)
    }

    pub fn from_bigint(value: &BigInt, precision: Precision) -> Self {
        let (sign, magnitude) = value.clone().into_parts();
        Self::from_parts(sign, magnitude, 0, precision)
    }

    /// Exact conversion of a finite double (53 significant bits always fit).
    pub fn from_f64(value: f64, precision: Precision) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::domain(
                "ExtReal::from_f64",
                format!("non-finite input {value}"),
            ));
        }
        if value == 0.0 {
            return Ok(Self::zero(precision));
        }
        let bits = value.to_bits();
        let sign = if bits >> 63 == 1 {
            Sign::Minus
        } else {
            Sign::Plus
        };
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let fraction = bits & ((1u64 << 52) - 1);
        let (magnitude, exponent) = if biased == 0 {
            (fraction, -1074)
        } else {
            (fraction | (1u64 << 52), biased - 1075)
        };
        Ok(Self::from_parts(
            sign,
            BigUint::from(magnitude),
            exponent,
            precision,
        ))
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.mantissa.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    /// Same value rounded to another width.
    pub fn with_precision(&self, precision: Precision) -> Self {
        let (sign, magnitude) = self.mantissa.clone().into_parts();
        Self::from_parts(sign, magnitude, self.exponent, precision)
    }

    /// Position of the bit just above the leading one: `|self| < 2^top`.
    fn top(&self) -> i64 {
        self.exponent + self.mantissa.bits() as i64
    }

    pub fn abs(&self) -> Self {
        ExtReal {
            mantissa: self.mantissa.abs(),
            ..self.clone()
        }
    }

    fn sum(&self, other: &Self, negate_other: bool) -> Self {
        let precision = self.precision.max(other.precision);
        let other_mantissa = if negate_other {
            -other.mantissa.clone()
        } else {
            other.mantissa.clone()
        };
        if other.is_zero() {
            return self.with_precision(precision);
        }
        if self.is_zero() {
            let (sign, magnitude) = other_mantissa.into_parts();
            return Self::from_parts(sign, magnitude, other.exponent, precision);
        }
        // An operand more than precision+2 binades below the other is under half an ulp.
        let guard = i64::from(precision.bits()) + 2;
        if self.top() - other.top() > guard {
            return self.with_precision(precision);
        }
        if other.top() - self.top() > guard {
            let (sign, magnitude) = other_mantissa.into_parts();
            return Self::from_parts(sign, magnitude, other.exponent, precision);
        }
        let exponent = self.exponent.min(other.exponent);
        let lhs = &self.mantissa << (self.exponent - exponent) as usize;
        let rhs = other_mantissa << (other.exponent - exponent) as usize;
        let (sign, magnitude) = (lhs + rhs).into_parts();
        Self::from_parts(sign, magnitude, exponent, precision)
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        self.sum(other, false)
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        self.sum(other, true)
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        let precision = self.precision.max(other.precision);
        let (sign, magnitude) = (&self.mantissa * &other.mantissa).into_parts();
        Self::from_parts(sign, magnitude, self.exponent + other.exponent, precision)
    }

    pub fn mul_i64(&self, factor: i64) -> Self {
        let (sign, magnitude) = (&self.mantissa * BigInt::from(factor)).into_parts();
        Self::from_parts(sign, magnitude, self.exponent, self.precision)
    }

    /// Division by a positive integer, correctly rounded.
    pub fn div_biguint(&self, divisor: &BigUint) -> Result<Self> {
        if divisor.is_zero() {
            return Err(Error::domain("ExtReal::div", "division by zero"));
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        let (sign, magnitude) = self.mantissa.clone().into_parts();
        let wanted = u64::from(self.precision.bits()) + 2 + divisor.bits();
        let shift = wanted.saturating_sub(magnitude.bits());
        let numerator = magnitude << shift;
        let quotient = &numerator / divisor;
        let inexact = !(&numerator - &quotient * divisor).is_zero();
        // Sticky bit below the quotient keeps ties from being misread as exact halves.
        let magnitude = (quotient << 1u32) + u32::from(inexact);
        Ok(Self::from_parts(
            sign,
            magnitude,
            self.exponent - shift as i64 - 1,
            self.precision,
        ))
    }

    pub fn div_u64(&self, divisor: u64) -> Result<Self> {
        self.div_biguint(&BigUint::from(divisor))
    }

    /// Nearest double (ties to even). Overflow gives ±inf; results in the
    /// subnormal range may be rounded twice.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let (sign, magnitude) = self.mantissa.clone().into_parts();
        let (mantissa, exponent) = round_parts(sign, magnitude, self.exponent, 53);
        let mut value = mantissa.to_f64().unwrap_or(f64::NAN);
        let mut exponent = exponent;
        while exponent > 0 {
            let step = exponent.min(1000);
            value *= 2f64.powi(step as i32);
            exponent -= step;
            if value.is_infinite() {
                return value;
            }
        }
        while exponent < 0 {
            let step = (-exponent).min(1000);
            value *= 2f64.powi(-(step as i32));
            exponent += step;
            if value == 0.0 {
                return value;
            }
        }
        value
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.sub_ref(other).signum().cmp(&0))
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

impl Neg for ExtReal {
    type Output = ExtReal;
    fn neg(self) -> ExtReal {
        ExtReal {
            mantissa: -self.mantissa,
            ..self
        }
    }
}

impl Neg for &ExtReal {
    type Output = ExtReal;
    fn neg(self) -> ExtReal {
        -self.clone()
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $inner:ident) => {
        impl $trait<&ExtReal> for &ExtReal {
            type Output = ExtReal;
            fn $method(self, rhs: &ExtReal) -> ExtReal {
                self.$inner(rhs)
            }
        }
        impl $trait<ExtReal> for ExtReal {
            type Output = ExtReal;
            fn $method(self, rhs: ExtReal) -> ExtReal {
                self.$inner(&rhs)
            }
        }
        impl $trait<&ExtReal> for ExtReal {
            type Output = ExtReal;
            fn $method(self, rhs: &ExtReal) -> ExtReal {
                self.$inner(rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);

/// Complex pair of [`ExtReal`]s. Used to run the Meixner–Pollaczek
/// recurrence at complex argument as an independent check of the rotated
/// real recurrence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtComplex {
    pub re: ExtReal,
    pub im: ExtReal,
}

impl ExtComplex {
    pub fn new(re: ExtReal, im: ExtReal) -> Self {
        ExtComplex { re, im }
    }

    pub fn zero(precision: Precision) -> Self {
        ExtComplex::new(ExtReal::zero(precision), ExtReal::zero(precision))
    }

    pub fn add(&self, other: &Self) -> Self {
        ExtComplex::new(&self.re + &other.re, &self.im + &other.im)
    }

    pub fn sub(&self, other: &Self) -> Self {
        ExtComplex::new(&self.re - &other.re, &self.im - &other.im)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let re = (&self.re * &other.re) - (&self.im * &other.im);
        let im = (&self.re * &other.im) + (&self.im * &other.re);
        ExtComplex::new(re, im)
    }

    pub fn mul_i64(&self, factor: i64) -> Self {
        ExtComplex::new(self.re.mul_i64(factor), self.im.mul_i64(factor))
    }

    pub fn div_u64(&self, divisor: u64) -> Result<Self> {
        Ok(ExtComplex::new(
            self.re.div_u64(divisor)?,
            self.im.div_u64(divisor)?,
        ))
    }
}
