//! Radix-2 signed-digit expansions and joint expansions.
//!
//! Digits are stored least-significant first. Everything user-facing
//! (`Display`, JSON, the `from_msb` constructors) uses the conventional
//! most-significant-first order.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A single signed digit in `{-2, -1, 0, 1, 2}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Digit(i8);

impl Digit {
    pub const ZERO: Digit = Digit(0);
    pub const ONE: Digit = Digit(1);
    pub const MINUS_ONE: Digit = Digit(-1);

    pub fn new(value: i8) -> Result<Self> {
        if (-2..=2).contains(&value) {
            Ok(Digit(value))
        } else {
            Err(Error::DigitOutOfRange(value.into()))
        }
    }

    #[inline]
    pub const fn get(self) -> i8 {
        self.0
    }

    #[inline]
    pub const fn abs(self) -> u8 {
        self.0.unsigned_abs()
    }

    #[inline]
    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }

    // Callers guarantee the range.
    #[inline]
    pub(crate) const fn new_unchecked(value: i8) -> Self {
        debug_assert!(value >= -2 && value <= 2);
        Digit(value)
    }
}

impl TryFrom<i8> for Digit {
    type Error = Error;

    fn try_from(value: i8) -> Result<Self> {
        Digit::new(value)
    }
}

impl TryFrom<i64> for Digit {
    type Error = Error;

    fn try_from(value: i64) -> Result<Self> {
        i8::try_from(value)
            .map_err(|_| Error::DigitOutOfRange(value))
            .and_then(Digit::new)
    }
}

impl From<Digit> for i8 {
    fn from(d: Digit) -> i8 {
        d.0
    }
}

/// A fixed-length signed binary expansion.
///
/// Leading zeros are significant: `0 1 0 1` and `1 0 1` have the same value
/// but compare unequal.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Expansion {
    digits: Vec<Digit>,
}

impl Expansion {
    pub fn new(digits_lsb_first: Vec<Digit>) -> Self {
        Expansion {
            digits: digits_lsb_first,
        }
    }

    pub fn zeros(len: usize) -> Self {
        Expansion {
            digits: vec![Digit::ZERO; len],
        }
    }

    pub fn from_lsb(digits: &[i8]) -> Result<Self> {
        digits
            .iter()
            .map(|&d| Digit::new(d))
            .collect::<Result<Vec<_>>>()
            .map(Expansion::new)
    }

    pub fn from_msb(digits: &[i8]) -> Result<Self> {
        let mut e = Self::from_lsb(digits)?;
        e.digits.reverse();
        Ok(e)
    }

    pub(crate) fn from_lsb_unchecked(digits: Vec<i8>) -> Self {
        Expansion {
            digits: digits.into_iter().map(Digit::new_unchecked).collect(),
        }
    }

    /// Standard binary expansion of `n` with exactly `len` digits.
    pub fn binary(n: &BigInt, len: usize) -> Result<Self> {
        let out_of_range = || Error::OutOfRange {
            value: n.clone(),
            length: len,
        };
        let mag = match n.sign() {
            Sign::Minus => return Err(out_of_range()),
            _ => n.magnitude(),
        };
        if mag.bits() > len as u64 {
            return Err(out_of_range());
        }
        Ok(Self::binary_of(mag, len))
    }

    pub(crate) fn binary_of(mag: &BigUint, len: usize) -> Self {
        Expansion {
            digits: (0..len as u64)
                .map(|i| if mag.bit(i) { Digit::ONE } else { Digit::ZERO })
                .collect(),
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.digits.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Digits, least significant first.
    #[inline]
    pub fn digits(&self) -> &[Digit] {
        &self.digits
    }

    /// Digit at position `j`; positions past the end read as zero.
    #[inline]
    pub fn digit(&self, j: usize) -> Digit {
        self.digits.get(j).copied().unwrap_or(Digit::ZERO)
    }

    pub(crate) fn digits_mut(&mut self) -> &mut Vec<Digit> {
        &mut self.digits
    }

    pub fn to_msb_vec(&self) -> Vec<i8> {
        self.digits.iter().rev().map(|d| d.get()).collect()
    }

    pub fn value(&self) -> BigInt {
        self.digits.iter().rev().fold(BigInt::zero(), |acc, d| {
            (acc << 1usize) + BigInt::from(d.get())
        })
    }

    pub fn weight(&self) -> usize {
        self.digits.iter().filter(|d| !d.is_zero()).count()
    }

    /// Sum of digit magnitudes, i.e. the weight₁ of this expansion viewed as
    /// a one-row joint expansion.
    pub fn weight1(&self) -> usize {
        self.digits.iter().map(|d| d.abs() as usize).sum()
    }

    pub fn is_binary(&self) -> bool {
        self.digits.iter().all(|d| d.get() == 0 || d.get() == 1)
    }

    /// Flips every binary digit. Satisfies
    /// `value(e) + value(complement) == 2^len - 1`.
    pub fn ones_complement(&self) -> Result<Self> {
        self.digits
            .iter()
            .enumerate()
            .map(|(position, d)| match d.get() {
                0 => Ok(Digit::ONE),
                1 => Ok(Digit::ZERO),
                digit => Err(Error::NotBinary { position, digit }),
            })
            .collect::<Result<Vec<_>>>()
            .map(Expansion::new)
    }

    pub fn negated(&self) -> Self {
        Expansion {
            digits: self.digits.iter().map(|d| Digit(-d.0)).collect(),
        }
    }

    /// Zero-extends at the most significant end. Never truncates.
    pub fn padded(&self, len: usize) -> Self {
        let mut digits = self.digits.clone();
        if digits.len() < len {
            digits.resize(len, Digit::ZERO);
        }
        Expansion { digits }
    }

    /// Drops leading (most significant) zeros.
    pub fn trimmed(&self) -> Self {
        let top = self
            .digits
            .iter()
            .rposition(|d| !d.is_zero())
            .map_or(0, |p| p + 1);
        Expansion {
            digits: self.digits[..top].to_vec(),
        }
    }
}

impl fmt::Display for Expansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in self.digits.iter().rev() {
            write!(f, "{}", d.get())?;
        }
        Ok(())
    }
}

impl Serialize for Expansion {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_msb_vec().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Expansion {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let msb = Vec::<i64>::deserialize(deserializer)?;
        let digits = msb
            .iter()
            .rev()
            .map(|&d| Digit::try_from(d))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        Ok(Expansion::new(digits))
    }
}

/// `D` expansions of identical length written on top of each other.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct JointExpansion {
    rows: Vec<Expansion>,
}

impl JointExpansion {
    pub fn new(rows: Vec<Expansion>) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::Dimension {
                expected: 1,
                actual: 0,
            });
        };
        if rows.iter().any(|r| r.len() != first.len()) {
            return Err(Error::RaggedRows);
        }
        Ok(JointExpansion { rows })
    }

    /// Builds from columns given most significant first, each of length `D`.
    pub fn from_msb_columns(columns: &[&[i8]]) -> Result<Self> {
        let dim = columns.first().map_or(1, |c| c.len());
        if columns.iter().any(|c| c.len() != dim) {
            return Err(Error::RaggedRows);
        }
        let rows = (0..dim)
            .map(|k| {
                let msb: Vec<i8> = columns.iter().map(|c| c[k]).collect();
                Expansion::from_msb(&msb)
            })
            .collect::<Result<Vec<_>>>()?;
        JointExpansion::new(rows)
    }

    pub fn zeros(dimension: usize, len: usize) -> Self {
        assert!(dimension >= 1);
        JointExpansion {
            rows: vec![Expansion::zeros(len); dimension],
        }
    }

    #[inline]
    pub fn dimension(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.rows[0].len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn rows(&self) -> &[Expansion] {
        &self.rows
    }

    pub fn row(&self, k: usize) -> &Expansion {
        &self.rows[k]
    }

    pub fn into_rows(self) -> Vec<Expansion> {
        self.rows
    }

    /// Column `j` as a vector of `D` digits.
    pub fn column(&self, j: usize) -> Vec<Digit> {
        self.rows.iter().map(|r| r.digit(j)).collect()
    }

    pub fn is_zero_column(&self, j: usize) -> bool {
        self.rows.iter().all(|r| r.digit(j).is_zero())
    }

    pub fn column_max_abs(&self, j: usize) -> u8 {
        self.rows
            .iter()
            .map(|r| r.digit(j).abs())
            .max()
            .unwrap_or(0)
    }

    /// Whether the most significant column is non-zero. False when empty.
    pub fn top_is_nonzero(&self) -> bool {
        !self.is_empty() && !self.is_zero_column(self.len() - 1)
    }

    pub fn value(&self) -> Vec<BigInt> {
        self.rows.iter().map(Expansion::value).collect()
    }

    /// Number of non-zero columns.
    pub fn joint_weight(&self) -> usize {
        (0..self.len()).filter(|&j| !self.is_zero_column(j)).count()
    }

    /// Sum over columns of the largest digit magnitude in the column.
    pub fn weight1(&self) -> usize {
        (0..self.len())
            .map(|j| self.column_max_abs(j) as usize)
            .sum()
    }

    /// Number of all-zero columns.
    pub fn zeros_count(&self) -> usize {
        self.len() - self.joint_weight()
    }

    pub fn is_signed_binary(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.digits().iter().all(|d| d.abs() <= 1))
    }

    pub fn padded(&self, len: usize) -> Self {
        JointExpansion {
            rows: self.rows.iter().map(|r| r.padded(len)).collect(),
        }
    }

    pub fn trimmed(&self) -> Self {
        let top = (0..self.len())
            .rev()
            .find(|&j| !self.is_zero_column(j))
            .map_or(0, |j| j + 1);
        JointExpansion {
            rows: self
                .rows
                .iter()
                .map(|r| Expansion::new(r.digits()[..top].to_vec()))
                .collect(),
        }
    }
}

impl fmt::Display for JointExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, row) in self.rows.iter().enumerate() {
            if k > 0 {
                f.write_str(" / ")?;
            }
            write!(f, "{row}")?;
        }
        Ok(())
    }
}

impl Serialize for JointExpansion {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for JointExpansion {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Expansion>::deserialize(deserializer)?;
        JointExpansion::new(rows).map_err(D::Error::custom)
    }
}

/// Stacks expansions into a joint expansion, zero-padding shorter rows at
/// the most significant end.
pub fn stack(rows: &[Expansion]) -> Result<JointExpansion> {
    let len = rows.iter().map(Expansion::len).max().unwrap_or(0);
    JointExpansion::new(rows.iter().map(|r| r.padded(len)).collect())
}

/// `2^len - 1`.
pub(crate) fn all_ones(len: usize) -> BigInt {
    (BigInt::one() << len) - 1
}
