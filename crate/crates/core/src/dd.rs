//! Double-double reals.
//!
//! A thin wrapper over [`twofloat::TwoFloat`] that replaces its division.
//! The upstream quotient forms `1 - b * (1/b)` without a fused multiply-add,
//! which caps the result at about double precision (`(1/3) * 3 - 1` comes out
//! near `5e-17`). Here the quotient is built by two correction steps of long
//! division, each using the exact double-double product.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_traits::{Num, One, Zero};
use twofloat::TwoFloat;

#[derive(Clone, Copy, Default, PartialEq, PartialOrd)]
pub struct Dd(TwoFloat);

impl Dd {
    pub fn hi(self) -> f64 {
        self.0.hi()
    }

    pub fn lo(self) -> f64 {
        self.0.lo()
    }
}

impl From<f64> for Dd {
    fn from(v: f64) -> Self {
        Dd(TwoFloat::from(v))
    }
}

impl From<Dd> for f64 {
    fn from(v: Dd) -> f64 {
        f64::from(v.0)
    }
}

impl fmt::Debug for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dd({:e} + {:e})", self.hi(), self.lo())
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.hi(), f)
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, r: Dd) -> Dd {
        Dd(self.0 + r.0)
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, r: Dd) -> Dd {
        Dd(self.0 - r.0)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, r: Dd) -> Dd {
        Dd(self.0 * r.0)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd(-self.0)
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, r: Dd) -> Dd {
        let b = r.0;
        let q1 = self.0.hi() / b.hi();
        let rem = self.0 - b * q1;
        let q2 = rem.hi() / b.hi();
        let rem = rem - b * q2;
        let q3 = rem.hi() / b.hi();
        Dd(TwoFloat::from(q1) + q2 + q3)
    }
}

impl Rem for Dd {
    type Output = Dd;
    fn rem(self, r: Dd) -> Dd {
        let q = (self / r).0.trunc();
        Dd(self.0 - q * r.0)
    }
}

impl Zero for Dd {
    fn zero() -> Self {
        Dd(TwoFloat::from(0.0))
    }
    fn is_zero(&self) -> bool {
        self.hi() == 0.0
    }
}

impl One for Dd {
    fn one() -> Self {
        Dd(TwoFloat::from(1.0))
    }
}

impl Num for Dd {
    type FromStrRadixErr = <TwoFloat as Num>::FromStrRadixErr;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        TwoFloat::from_str_radix(s, radix).map(Dd)
    }
}

impl Dd {
    pub fn total_cmp(&self, other: &Self) -> Ordering {
        self.hi().total_cmp(&other.hi()).then(self.lo().total_cmp(&other.lo()))
    }
}
