//! Fixed-point conversion between reals and binary variables.
//!
//! A real value `u` is represented with `n` bits and radix position `j0` as
//!
//! ```text
//! u = sum_{j=1..n} 2^(j0 - j) * q_j
//! ```
//!
//! Bits are stored most-significant first, so block element `j - 1` carries
//! the weight `2^(j0 - j)`. The representation is unsigned.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Largest supported precision. Codes are packed into `u64` and every
/// partial sum of weights must stay exact in an `f64` mantissa.
pub const MAX_PRECISION: u32 = 52;

/// Precision and radix position of the real/binary map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FixedPointFormat {
    precision: u32,
    radix_position: i32,
}

/// How reals that fall between two lattice points are encoded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EncodeMode {
    /// Largest representable value not above `x`.
    #[default]
    Truncate,
    /// Nearest representable value, ties upward, saturating at the maximum.
    Round,
}

impl FixedPointFormat {
    pub fn new(precision: u32, radix_position: i32) -> Result<Self> {
        if precision == 0 || precision > MAX_PRECISION {
            return Err(Error::Config(format!(
                "precision must be in 1..={MAX_PRECISION}, got {precision}"
            )));
        }
        if !(-1000..=1000).contains(&radix_position) {
            return Err(Error::Config(format!(
                "radix position {radix_position} is out of range"
            )));
        }
        Ok(Self {
            precision,
            radix_position,
        })
    }

    /// Bits per real variable.
    pub fn precision(&self) -> usize {
        self.precision as usize
    }

    pub fn radix_position(&self) -> i32 {
        self.radix_position
    }

    /// Weight of bit `j` (0-based, most significant first): `2^(j0 - j - 1)`.
    pub fn weight(&self, j: usize) -> f64 {
        pow2(self.radix_position - 1 - j as i32)
    }

    /// All `n` bit weights in storage order.
    pub fn weights(&self) -> Vec<f64> {
        (0..self.precision()).map(|j| self.weight(j)).collect()
    }

    /// Value of the least significant bit, `2^(j0 - n)`.
    pub fn resolution(&self) -> f64 {
        pow2(self.radix_position - self.precision as i32)
    }

    /// Largest representable value, `2^j0 * (1 - 2^-n)`.
    pub fn max_value(&self) -> f64 {
        pow2(self.radix_position) * (1.0 - pow2(-(self.precision as i32)))
    }

    /// Real value of an integer code whose bit `n - 1 - j` is block bit `j`.
    pub fn code_value(&self, code: u64) -> f64 {
        code as f64 * self.resolution()
    }

    pub fn decode_scalar(&self, bits: &[u8]) -> Result<f64> {
        check_len(bits.len(), self.precision())?;
        let mut value = 0.0;
        for (j, &bit) in bits.iter().enumerate() {
            match bit {
                0 => {}
                1 => value += self.weight(j),
                other => return Err(Error::InvalidBit(other)),
            }
        }
        Ok(value)
    }

    pub fn encode_scalar(&self, x: f64) -> Result<BitVector> {
        self.encode_scalar_with(x, EncodeMode::Truncate)
    }

    pub fn encode_scalar_with(&self, x: f64, mode: EncodeMode) -> Result<BitVector> {
        let max = self.max_value();
        if !(0.0..=max).contains(&x) {
            return Err(Error::Range { value: x, max });
        }
        let top = (1u64 << self.precision) - 1;
        // Division by a power of two is exact, so floor() sees the true ratio.
        let scaled = x / self.resolution();
        let code = match mode {
            EncodeMode::Truncate => scaled.floor() as u64,
            EncodeMode::Round => (scaled + 0.5).floor() as u64,
        }
        .min(top);
        Ok(self.code_bits(code))
    }

    /// Block bits of an integer code, most significant first.
    pub fn code_bits(&self, code: u64) -> BitVector {
        let n = self.precision();
        BitVector((0..n).map(|j| ((code >> (n - 1 - j)) & 1) as u8).collect())
    }

    /// Integer code of one block of bits.
    pub fn bits_code(&self, bits: &[u8]) -> u64 {
        bits.iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b))
    }

    /// Decode `count` consecutive blocks.
    pub fn decode_vector(&self, q: &BitVector, count: usize) -> Result<Vec<f64>> {
        let n = self.precision();
        check_len(q.len(), count * n)?;
        q.as_slice()
            .chunks(n)
            .map(|block| self.decode_scalar(block))
            .collect()
    }

    /// Decode a vector of fractional bit values (e.g. averaged states).
    /// Equal to [`Self::decode_vector`] when every entry is 0 or 1.
    pub fn decode_fractional(&self, bits: &[f64], count: usize) -> Result<Vec<f64>> {
        let n = self.precision();
        check_len(bits.len(), count * n)?;
        let weights = self.weights();
        Ok(bits
            .chunks(n)
            .map(|block| block.iter().zip(&weights).map(|(b, w)| b * w).sum())
            .collect())
    }

    /// Encode each coordinate of `values` and concatenate the blocks.
    pub fn encode_vector(&self, values: &[f64], mode: EncodeMode) -> Result<BitVector> {
        let mut bits = Vec::with_capacity(values.len() * self.precision());
        for &x in values {
            bits.extend_from_slice(self.encode_scalar_with(x, mode)?.as_slice());
        }
        Ok(BitVector(bits))
    }

    /// Replace every column of `a` with `n` weighted copies so that
    /// `a * u == expanded * q` whenever `q` encodes `u` exactly.
    pub fn expand_matrix(&self, a: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.precision();
        let weights = self.weights();
        DMatrix::from_fn(a.nrows(), a.ncols() * n, |i, col| {
            a[(i, col / n)] * weights[col % n]
        })
    }
}

impl fmt::Display for FixedPointFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={},j0={}", self.precision, self.radix_position)
    }
}

fn pow2(exp: i32) -> f64 {
    2f64.powi(exp)
}

fn check_len(found: usize, expected: usize) -> Result<()> {
    if found != expected {
        return Err(Error::Length { expected, found });
    }
    Ok(())
}

/// Ordered sequence of binary variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitVector(Vec<u8>);

impl BitVector {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(&bad) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidBit(bad));
        }
        Ok(Self(bits))
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<u8> {
        self.0
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }
}

impl From<BitVector> for Vec<u8> {
    fn from(v: BitVector) -> Self {
        v.0
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::Parse(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(BitVector)
    }
}
