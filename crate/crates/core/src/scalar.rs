//! Coefficient fields shared by the exact and floating-point code paths.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A field element usable for polynomial substitution, determinants and
/// resultants. Implemented for `f64`, `Complex64` and `BigRational`.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn from_i64(v: i64) -> Self;

    fn from_big(v: &BigInt) -> Self;

    /// Used for pivot selection only.
    fn magnitude(&self) -> f64;

    fn to_complex(&self) -> Complex64;

    fn pow_u32(&self, e: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..e {
            out = out * self.clone();
        }
        out
    }
}

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_big(v: &BigInt) -> Self {
        v.to_f64().unwrap_or(f64::NAN)
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(*self, 0.0)
    }
    fn pow_u32(&self, e: u32) -> Self {
        self.powi(e as i32)
    }
}

impl Scalar for Complex64 {
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn from_big(v: &BigInt) -> Self {
        Complex64::new(v.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn to_complex(&self) -> Complex64 {
        *self
    }
    fn pow_u32(&self, e: u32) -> Self {
        self.powu(e)
    }
}

impl Scalar for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_big(v: &BigInt) -> Self {
        BigRational::from_integer(v.clone())
    }
    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }
}

/// `[re, im]` pairs on the wire.
pub mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }

    pub mod vec {
        use num_complex::Complex64;
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
            v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
            let raw = Vec::<[f64; 2]>::deserialize(d)?;
            Ok(raw.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
        }
    }
}
