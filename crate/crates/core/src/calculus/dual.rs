//! Hyper-dual numbers for exact first and second derivatives.
//!
//! A [`Dual2`] carries `value + d1·ε₁ + d2·ε₂ + d12·ε₁ε₂` with `ε₁² = ε₂² = 0`.
//! Seeding both infinitesimals on the same variable yields the second
//! derivative in `d12`; seeding them on two different variables yields the
//! mixed partial. The type is generic over its component scalar, so
//! `Dual2<Dual2<f64>>` reaches mixed third and fourth order when needed.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Number-like types that equation-of-state code is written against.
pub trait Scalar:
    Copy
    + fmt::Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn from_f64(x: f64) -> Self;

    /// The plain real part.
    fn re(&self) -> f64;

    fn ln(self) -> Self;
    fn ln_1p(self) -> Self;
    fn exp(self) -> Self;
    fn sqrt(self) -> Self;
    fn recip(self) -> Self;

    fn powi(self, n: i32) -> Self {
        let mut acc = Self::from_f64(1.0);
        let base = if n < 0 { self.recip() } else { self };
        for _ in 0..n.unsigned_abs() {
            acc = acc * base;
        }
        acc
    }
}

impl Scalar for f64 {
    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn re(&self) -> f64 {
        *self
    }
    #[inline]
    fn ln(self) -> Self {
        f64::ln(self)
    }
    #[inline]
    fn ln_1p(self) -> Self {
        f64::ln_1p(self)
    }
    #[inline]
    fn exp(self) -> Self {
        f64::exp(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn recip(self) -> Self {
        f64::recip(self)
    }
    #[inline]
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
}

/// Hyper-dual number over the scalar `T`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Dual2<T = f64> {
    pub value: T,
    /// Coefficient of ε₁.
    pub d1: T,
    /// Coefficient of ε₂.
    pub d2: T,
    /// Coefficient of ε₁ε₂.
    pub d12: T,
}

impl<T: Scalar> Dual2<T> {
    pub fn new(value: T, d1: T, d2: T, d12: T) -> Self {
        Self { value, d1, d2, d12 }
    }

    /// A constant: all derivative parts zero.
    pub fn constant(value: T) -> Self {
        let zero = T::from_f64(0.0);
        Self::new(value, zero, zero, zero)
    }

    /// A variable seeded in both infinitesimals, so `d1` is f′ and `d12` is f″.
    pub fn variable(value: T) -> Self {
        let zero = T::from_f64(0.0);
        let one = T::from_f64(1.0);
        Self::new(value, one, one, zero)
    }

    /// A variable seeded only in ε₁.
    pub fn seed1(value: T) -> Self {
        let zero = T::from_f64(0.0);
        Self::new(value, T::from_f64(1.0), zero, zero)
    }

    /// A variable seeded only in ε₂.
    pub fn seed2(value: T) -> Self {
        let zero = T::from_f64(0.0);
        Self::new(value, zero, T::from_f64(1.0), zero)
    }

    /// Applies a scalar function given its value and first two derivatives at `self.value`.
    #[inline]
    fn chain(self, f: T, df: T, d2f: T) -> Self {
        Self {
            value: f,
            d1: df * self.d1,
            d2: df * self.d2,
            d12: df * self.d12 + d2f * self.d1 * self.d2,
        }
    }
}

impl<T: Scalar> Add for Dual2<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(
            self.value + o.value,
            self.d1 + o.d1,
            self.d2 + o.d2,
            self.d12 + o.d12,
        )
    }
}

impl<T: Scalar> Sub for Dual2<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(
            self.value - o.value,
            self.d1 - o.d1,
            self.d2 - o.d2,
            self.d12 - o.d12,
        )
    }
}

impl<T: Scalar> Mul for Dual2<T> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.value * o.value,
            self.value * o.d1 + self.d1 * o.value,
            self.value * o.d2 + self.d2 * o.value,
            self.value * o.d12 + self.d1 * o.d2 + self.d2 * o.d1 + self.d12 * o.value,
        )
    }
}

impl<T: Scalar> Div for Dual2<T> {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl<T: Scalar> Neg for Dual2<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.value, -self.d1, -self.d2, -self.d12)
    }
}

impl<T: Scalar> Add<f64> for Dual2<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: f64) -> Self {
        Self {
            value: self.value + o,
            ..self
        }
    }
}

impl<T: Scalar> Sub<f64> for Dual2<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: f64) -> Self {
        Self {
            value: self.value - o,
            ..self
        }
    }
}

impl<T: Scalar> Mul<f64> for Dual2<T> {
    type Output = Self;
    #[inline]
    fn mul(self, o: f64) -> Self {
        Self::new(self.value * o, self.d1 * o, self.d2 * o, self.d12 * o)
    }
}

impl<T: Scalar> Div<f64> for Dual2<T> {
    type Output = Self;
    #[inline]
    fn div(self, o: f64) -> Self {
        Self::new(self.value / o, self.d1 / o, self.d2 / o, self.d12 / o)
    }
}

impl<T: Scalar> AddAssign for Dual2<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Scalar> SubAssign for Dual2<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Scalar> MulAssign for Dual2<T> {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

// Ordering looks at the real part only.
impl<T: Scalar> PartialOrd for Dual2<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.re().partial_cmp(&other.re())
    }
}

impl<T: Scalar> Scalar for Dual2<T> {
    fn from_f64(x: f64) -> Self {
        Self::constant(T::from_f64(x))
    }

    fn re(&self) -> f64 {
        self.value.re()
    }

    fn ln(self) -> Self {
        let inv = self.value.recip();
        self.chain(self.value.ln(), inv, -(inv * inv))
    }

    fn ln_1p(self) -> Self {
        let inv = (self.value + 1.0).recip();
        self.chain(self.value.ln_1p(), inv, -(inv * inv))
    }

    fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        let ds = s.recip() * 0.5;
        self.chain(s, ds, -(ds / self.value) * 0.5)
    }

    fn recip(self) -> Self {
        let inv = self.value.recip();
        let inv2 = inv * inv;
        self.chain(inv, -inv2, inv2 * inv * 2.0)
    }
}
