//! Minimal algebraic traits shared by the exact containers.
//!
//! Elements carry a context (`Ctx`) so that zero and one can be built for
//! rings whose shape is only known at runtime, such as `Q(ζ_q)`.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub trait Ring: Clone + PartialEq + Debug {
    type Ctx: Clone + PartialEq + Debug;

    fn ctx(&self) -> Self::Ctx;
    fn zero(ctx: &Self::Ctx) -> Self;
    fn one(ctx: &Self::Ctx) -> Self;
    fn from_int(ctx: &Self::Ctx, n: i64) -> Self;
    fn is_zero(&self) -> bool;

    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;

    fn is_one(&self) -> bool {
        *self == Self::one(&self.ctx())
    }

    fn mul_int(&self, n: i64) -> Self {
        self.mul(&Self::from_int(&self.ctx(), n))
    }

    fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.ctx());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

pub trait Field: Ring {
    fn inv(&self) -> Option<Self>;
    fn from_rational(ctx: &Self::Ctx, r: &BigRational) -> Self;
}

/// Division that is only defined when the quotient exists in the ring.
pub trait ExactDiv: Ring {
    fn exact_div(&self, divisor: &Self) -> Option<Self>;
}

impl Ring for BigRational {
    type Ctx = ();

    fn ctx(&self) {}
    fn zero(_: &()) -> Self {
        <BigRational as Zero>::zero()
    }
    fn one(_: &()) -> Self {
        <BigRational as One>::one()
    }
    fn from_int(_: &(), n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
}

impl Field for BigRational {
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn from_rational(_: &(), r: &BigRational) -> Self {
        r.clone()
    }
}

impl ExactDiv for BigRational {
    fn exact_div(&self, divisor: &Self) -> Option<Self> {
        divisor.inv().map(|d| self * d)
    }
}
