//! Reduced rationals over `i128` with integer fast paths.
//!
//! Nearly every quantity the engines produce is a whole number of scaled
//! units, so operations on two integers skip gcd work entirely.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

/// Invariant: `den > 0` and `gcd(num, den) = 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rat {
    num: i128,
    den: i128,
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    if a <= u64::MAX as u128 && b <= u64::MAX as u128 {
        return gcd_u64(a as u64, b as u64) as u128;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    gcd_u128(a.unsigned_abs(), b.unsigned_abs()) as i128
}

/// Exact division by a small positive divisor, avoiding 128-bit division
/// when both sides fit in 64 bits.
fn div_exact(a: i128, g: i128) -> i128 {
    if g == 1 {
        a
    } else if let (Ok(a64), Ok(g64)) = (i64::try_from(a), i64::try_from(g)) {
        (a64 / g64) as i128
    } else {
        a / g
    }
}

impl Rat {
    /// `num / den` in lowest terms. Panics on a zero denominator.
    pub fn new(num: i128, den: i128) -> Rat {
        assert!(den != 0, "zero denominator");
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        if den == 1 {
            return Rat { num, den };
        }
        let g = gcd(num, den);
        Rat { num: div_exact(num, g), den: div_exact(den, g) }
    }

    pub const fn from_integer(v: i128) -> Rat {
        Rat { num: v, den: 1 }
    }

    pub fn numer(&self) -> &i128 {
        &self.num
    }

    pub fn denom(&self) -> &i128 {
        &self.den
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    /// Truncates toward zero.
    pub fn to_integer(&self) -> i128 {
        self.num / self.den
    }

    pub fn floor(&self) -> Rat {
        Rat::from_integer(self.num.div_euclid(self.den))
    }

    pub fn abs(&self) -> Rat {
        Rat { num: self.num.abs(), den: self.den }
    }

    pub fn is_negative(&self) -> bool {
        self.num < 0
    }

    pub fn is_positive(&self) -> bool {
        self.num > 0
    }

    pub fn recip(&self) -> Rat {
        Rat::new(self.den, self.num)
    }

    pub fn to_f64(&self) -> Option<f64> {
        Some(self.num as f64 / self.den as f64)
    }
}

impl Default for Rat {
    fn default() -> Rat {
        Rat::from_integer(0)
    }
}

impl Zero for Rat {
    fn zero() -> Rat {
        Rat::from_integer(0)
    }

    fn is_zero(&self) -> bool {
        self.num == 0
    }
}

impl One for Rat {
    fn one() -> Rat {
        Rat::from_integer(1)
    }

    fn is_one(&self) -> bool {
        self.num == 1 && self.den == 1
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Rat) -> Ordering {
        if self.den == other.den {
            self.num.cmp(&other.num)
        } else {
            (self.num * other.den).cmp(&(other.num * self.den))
        }
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Rat) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat { num: -self.num, den: self.den }
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        -*self
    }
}

fn add(a: Rat, b: Rat) -> Rat {
    if a.den == b.den {
        return Rat::new(a.num + b.num, a.den);
    }
    if a.den == 1 {
        return Rat { num: a.num * b.den + b.num, den: b.den };
    }
    if b.den == 1 {
        return Rat { num: b.num * a.den + a.num, den: a.den };
    }
    let g = gcd(a.den, b.den);
    let (ad, bd) = (div_exact(a.den, g), div_exact(b.den, g));
    Rat::new(a.num * bd + b.num * ad, a.den * bd)
}

fn mul(a: Rat, b: Rat) -> Rat {
    if a.den == 1 && b.den == 1 {
        return Rat { num: a.num * b.num, den: 1 };
    }
    let g1 = gcd(a.num, b.den);
    let g2 = gcd(b.num, a.den);
    let (g1, g2) = (g1.max(1), g2.max(1));
    Rat { num: div_exact(a.num, g1) * div_exact(b.num, g2), den: div_exact(a.den, g2) * div_exact(b.den, g1) }
}

fn div(a: Rat, b: Rat) -> Rat {
    assert!(b.num != 0, "division by zero");
    let (bn, bd) = if b.num < 0 { (-b.den, -b.num) } else { (b.den, b.num) };
    mul(a, Rat { num: bn, den: bd })
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident, $atr:ident, $am:ident) => {
        impl $tr for Rat {
            type Output = Rat;
            fn $m(self, rhs: Rat) -> Rat {
                $f(self, rhs)
            }
        }
        impl $tr<&Rat> for Rat {
            type Output = Rat;
            fn $m(self, rhs: &Rat) -> Rat {
                $f(self, *rhs)
            }
        }
        impl $tr<Rat> for &Rat {
            type Output = Rat;
            fn $m(self, rhs: Rat) -> Rat {
                $f(*self, rhs)
            }
        }
        impl $tr<&Rat> for &Rat {
            type Output = Rat;
            fn $m(self, rhs: &Rat) -> Rat {
                $f(*self, *rhs)
            }
        }
        impl $atr for Rat {
            fn $am(&mut self, rhs: Rat) {
                *self = $f(*self, rhs);
            }
        }
        impl $atr<&Rat> for Rat {
            fn $am(&mut self, rhs: &Rat) {
                *self = $f(*self, *rhs);
            }
        }
    };
}

fn sub(a: Rat, b: Rat) -> Rat {
    add(a, -b)
}

binop!(Add, add, add, AddAssign, add_assign);
binop!(Sub, sub, sub, SubAssign, sub_assign);
binop!(Mul, mul, mul, MulAssign, mul_assign);
binop!(Div, div, div, DivAssign, div_assign);

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
