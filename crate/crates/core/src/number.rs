//! Dual-mode scalars.
//!
//! A [`Real`] is either an exact rational or a binary float carried at a fixed
//! working precision. Exact values stay exact under field operations; any
//! operation that touches an approximate value (or needs a transcendental
//! function) produces an approximate value.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use dashu::base::{Abs, SquareRoot};
use dashu::float::{round::mode::HalfAway, FBig};
use dashu::integer::{IBig, UBig};
use dashu::rational::RBig;
use serde::{Deserialize, Serialize};

/// Binary float used for approximate values.
pub type Float = FBig<HalfAway, 2>;

const LOG2_10: f64 = std::f64::consts::LOG2_10;
const GUARD_BITS: usize = 64;

/// Working precision in significant decimal digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Precision {
    digits: u32,
}

impl Default for Precision {
    fn default() -> Self {
        Precision { digits: 50 }
    }
}

impl Precision {
    pub const MIN_DIGITS: u32 = 8;
    pub const MAX_DIGITS: u32 = 10_000;

    /// Returns `None` outside `MIN_DIGITS..=MAX_DIGITS`.
    pub fn new(digits: u32) -> Option<Self> {
        (Self::MIN_DIGITS..=Self::MAX_DIGITS)
            .contains(&digits)
            .then_some(Precision { digits })
    }

    pub fn digits(self) -> u32 {
        self.digits
    }

    /// Mantissa bits used for approximate arithmetic, including guard bits.
    pub fn bits(self) -> usize {
        (self.digits as f64 * LOG2_10).ceil() as usize + GUARD_BITS
    }

    /// `10^(-k)` as an exact rational.
    pub fn ten_to_minus(k: u32) -> Real {
        Real::Exact(RBig::from_parts(
            IBig::ONE,
            UBig::from(10u8).pow(k as usize),
        ))
    }

    /// The tolerance `10^(-digits)` below which two approximate values are
    /// treated as equal.
    pub fn epsilon(self) -> Real {
        Self::ten_to_minus(self.digits)
    }
}

/// Exact rational or approximate real number.
#[derive(Clone, Debug)]
pub enum Real {
    Exact(RBig),
    Approx(Float),
}

impl Default for Real {
    fn default() -> Self {
        Real::zero()
    }
}

fn float_from_rational(r: &RBig, bits: usize) -> Float {
    // Precision 0 marks an unlimited float such as `Float::ZERO`.
    let bits = if bits == 0 { Precision::default().bits() } else { bits };
    let num = Float::from(r.numerator().clone())
        .with_precision(bits)
        .value();
    let den = Float::from(IBig::from(r.denominator().clone()))
        .with_precision(bits)
        .value();
    num / den
}

fn float_with_bits(f: &Float, bits: usize) -> Float {
    if f.precision() >= bits {
        f.clone()
    } else {
        f.clone().with_precision(bits).value()
    }
}

impl Real {
    pub fn zero() -> Real {
        Real::Exact(RBig::ZERO)
    }

    pub fn one() -> Real {
        Real::Exact(RBig::ONE)
    }

    pub fn from_int(n: i64) -> Real {
        Real::Exact(RBig::from(n))
    }

    pub fn from_ibig(n: IBig) -> Real {
        Real::Exact(RBig::from(n))
    }

    /// `num / den`; panics when `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Real {
        assert!(den != 0, "zero denominator");
        Real::Exact(RBig::from_parts_signed(IBig::from(num), IBig::from(den)))
    }

    pub fn from_rational(r: RBig) -> Real {
        Real::Exact(r)
    }

    pub fn from_float(f: Float) -> Real {
        Real::Approx(f)
    }

    /// Parses a decimal literal such as `-1.25` or `3/4` exactly.
    pub fn parse_exact(text: &str) -> Option<Real> {
        let text = text.trim();
        if let Some((n, d)) = text.split_once('/') {
            let n: IBig = n.trim().parse().ok()?;
            let d: IBig = d.trim().parse().ok()?;
            if d == IBig::ZERO {
                return None;
            }
            return Some(Real::Exact(RBig::from_parts_signed(n, d)));
        }
        let (mantissa, exp10) = match text.split_once(['e', 'E']) {
            Some((m, e)) => (m, e.parse::<i32>().ok()?),
            None => (text, 0),
        };
        let (sign, digits) = match mantissa.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return None;
        }
        let all: String = format!("{int_part}{frac_part}");
        let n: IBig = if all.is_empty() { IBig::ZERO } else { all.parse().ok()? };
        let scale = exp10 - frac_part.len() as i32;
        let ten = UBig::from(10u8);
        let r = if scale >= 0 {
            RBig::from(n * IBig::from(ten.pow(scale as usize)))
        } else {
            RBig::from_parts(n, ten.pow((-scale) as usize))
        };
        Some(Real::Exact(if sign < 0 { -r } else { r }))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Real::Exact(_))
    }

    pub fn as_rational(&self) -> Option<&RBig> {
        match self {
            Real::Exact(r) => Some(r),
            Real::Approx(_) => None,
        }
    }

    /// Integer value when the number is an exact integer.
    pub fn as_integer(&self) -> Option<IBig> {
        match self {
            Real::Exact(r) if r.denominator() == &UBig::ONE => Some(r.numerator().clone()),
            _ => None,
        }
    }

    /// Converts to a float with at least `bits` mantissa bits.
    pub fn to_float(&self, bits: usize) -> Float {
        match self {
            Real::Exact(r) => float_from_rational(r, bits),
            Real::Approx(f) => float_with_bits(f, bits),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Exact(r) => r.to_f64().value(),
            Real::Approx(f) => f.to_f64().value(),
        }
    }

    /// Forces approximate representation at the given precision.
    pub fn approximate(&self, p: Precision) -> Real {
        Real::Approx(self.to_float(p.bits()))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Real::Exact(r) => r.is_zero(),
            Real::Approx(f) => f.repr().is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Real::Exact(r) => r.is_one(),
            Real::Approx(f) => f.repr().is_one(),
        }
    }

    pub fn signum(&self) -> i32 {
        match self.cmp_zero() {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    fn cmp_zero(&self) -> Ordering {
        match self {
            Real::Exact(r) => r.partial_cmp(&RBig::ZERO).unwrap_or(Ordering::Equal),
            Real::Approx(f) => f.partial_cmp(&Float::ZERO).unwrap_or(Ordering::Equal),
        }
    }

    pub fn abs(&self) -> Real {
        match self {
            Real::Exact(r) => Real::Exact(r.clone().abs()),
            Real::Approx(f) => Real::Approx(f.clone().abs()),
        }
    }

    pub fn recip(&self) -> Real {
        Real::one() / self
    }

    /// Integer power; exact inputs stay exact.
    pub fn powi(&self, n: i64) -> Real {
        let base = if n < 0 { self.recip() } else { self.clone() };
        let e = n.unsigned_abs() as usize;
        match base {
            Real::Exact(r) => Real::Exact(r.pow(e)),
            Real::Approx(f) => Real::Approx(f.powi(IBig::from(e))),
        }
    }

    /// Square root. Exact when the input is the square of a rational.
    pub fn sqrt(&self, p: Precision) -> Real {
        if let Real::Exact(r) = self {
            if let Some(s) = rational_sqrt(r) {
                return Real::Exact(s);
            }
        }
        Real::Approx(self.to_float(p.bits()).sqrt())
    }

    /// Natural logarithm; panics on non-positive input.
    pub fn ln(&self, p: Precision) -> Real {
        assert!(self.signum() > 0, "logarithm of a non-positive number");
        if self.is_exact() && self.is_one() {
            return Real::zero();
        }
        Real::Approx(self.to_float(p.bits()).ln())
    }

    pub fn exp(&self, p: Precision) -> Real {
        if self.is_exact() && self.is_zero() {
            return Real::one();
        }
        Real::Approx(self.to_float(p.bits()).exp())
    }

    pub fn sin(&self, p: Precision) -> Real {
        if self.is_exact() && self.is_zero() {
            return Real::zero();
        }
        Real::Approx(self.to_float(p.bits()).sin())
    }

    pub fn cos(&self, p: Precision) -> Real {
        if self.is_exact() && self.is_zero() {
            return Real::one();
        }
        Real::Approx(self.to_float(p.bits()).cos())
    }

    /// `self^e` for positive `self`. Exact when `self` is exact and `e` is an
    /// exact integer.
    pub fn pow(&self, e: &Real, p: Precision) -> Real {
        if let (Real::Exact(_), Some(n)) = (self, e.as_integer()) {
            if let Ok(n) = i64::try_from(n) {
                return self.powi(n);
            }
        }
        if e.is_zero() {
            return Real::one();
        }
        (e * &self.ln(p)).exp(p)
    }

    /// Decimal rendering with `digits` significant digits for approximate
    /// values; exact integers print without a fractional part and exact
    /// non-integers print as decimals too.
    pub fn to_decimal_string(&self, digits: u32) -> String {
        if let Some(n) = self.as_integer() {
            return n.to_string();
        }
        let bits = (digits as f64 * LOG2_10).ceil() as usize + GUARD_BITS;
        let f = self.to_float(bits);
        if f.repr().is_zero() {
            return "0".to_string();
        }
        let dec = f.to_decimal().value();
        let dec = dec.with_precision(digits as usize).value();
        format_decimal(&dec)
    }

    /// Largest integer not above the value.
    pub fn floor(&self) -> IBig {
        match self {
            Real::Exact(r) => r.floor(),
            Real::Approx(f) => f.floor().to_int().value(),
        }
    }

    /// Whether `|self - other| <= tol`.
    pub fn approx_eq(&self, other: &Real, tol: &Real) -> bool {
        (self - other).abs() <= *tol
    }
}

/// Plain positional notation, no exponent marker, trailing zeros trimmed.
fn format_decimal(d: &FBig<HalfAway, 10>) -> String {
    let (sig, exp) = d.repr().clone().into_parts();
    let negative = sig < IBig::ZERO;
    let digits = sig.abs().to_string();
    let exp = exp as i64;
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if exp >= 0 {
        out.push_str(&digits);
        out.extend(std::iter::repeat('0').take(exp as usize));
        return out;
    }
    let point = digits.len() as i64 + exp;
    let (int_part, frac_part) = if point > 0 {
        (
            digits[..point as usize].to_string(),
            digits[point as usize..].to_string(),
        )
    } else {
        (
            "0".to_string(),
            format!("{}{}", "0".repeat((-point) as usize), digits),
        )
    };
    let frac_part = frac_part.trim_end_matches('0');
    out.push_str(&int_part);
    if !frac_part.is_empty() {
        out.push('.');
        out.push_str(frac_part);
    }
    out
}

fn rational_sqrt(r: &RBig) -> Option<RBig> {
    if r < &RBig::ZERO {
        return None;
    }
    let n = r.numerator().clone().abs();
    let n = UBig::try_from(n).ok()?;
    let d = r.denominator().clone();
    let sn = n.sqrt();
    let sd = d.sqrt();
    (&sn * &sn == n && &sd * &sd == d).then(|| RBig::from_parts(IBig::from(sn), sd))
}

fn combine(a: &Real, b: &Real, exact: impl Fn(&RBig, &RBig) -> RBig, approx: impl Fn(Float, Float) -> Float) -> Real {
    match (a, b) {
        (Real::Exact(x), Real::Exact(y)) => Real::Exact(exact(x, y)),
        (Real::Approx(x), Real::Approx(y)) => Real::Approx(approx(x.clone(), y.clone())),
        (Real::Exact(x), Real::Approx(y)) => {
            Real::Approx(approx(float_from_rational(x, y.precision()), y.clone()))
        }
        (Real::Approx(x), Real::Exact(y)) => {
            Real::Approx(approx(x.clone(), float_from_rational(y, x.precision())))
        }
    }
}

macro_rules! real_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                combine(self, rhs, |x, y| x $op y, |x, y| x $op y)
            }
        }
        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
        impl $trait<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
    };
}

real_binop!(Add, add, +);
real_binop!(Sub, sub, -);
real_binop!(Mul, mul, *);
real_binop!(Div, div, /);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        match self {
            Real::Exact(r) => Real::Exact(-r),
            Real::Approx(f) => Real::Approx(-f),
        }
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        -self.clone()
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Real) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Real) -> Option<Ordering> {
        match (self, other) {
            (Real::Exact(x), Real::Exact(y)) => x.partial_cmp(y),
            _ => Some((self - other).cmp_zero()),
        }
    }
}

impl From<i64> for Real {
    fn from(n: i64) -> Real {
        Real::from_int(n)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Exact(r) => write!(f, "{r}"),
            Real::Approx(_) => f.write_str(&self.to_decimal_string(20)),
        }
    }
}

/// Complex number over [`Real`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl Complex {
    pub fn new(re: Real, im: Real) -> Complex {
        Complex { re, im }
    }

    pub fn zero() -> Complex {
        Complex::new(Real::zero(), Real::zero())
    }

    pub fn one() -> Complex {
        Complex::new(Real::one(), Real::zero())
    }

    pub fn i() -> Complex {
        Complex::new(Real::zero(), Real::one())
    }

    pub fn from_real(re: Real) -> Complex {
        Complex::new(re, Real::zero())
    }

    /// `i^k` for `k` taken mod 4.
    pub fn i_pow(k: i64) -> Complex {
        match k.rem_euclid(4) {
            0 => Complex::one(),
            1 => Complex::i(),
            2 => -Complex::one(),
            _ => -Complex::i(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_exact(&self) -> bool {
        self.re.is_exact() && self.im.is_exact()
    }

    pub fn conj(&self) -> Complex {
        Complex::new(self.re.clone(), -&self.im)
    }

    pub fn norm_sqr(&self) -> Real {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Modulus; exact when the squared modulus is a rational square.
    pub fn abs(&self, p: Precision) -> Real {
        if self.im.is_zero() {
            return self.re.abs();
        }
        if self.re.is_zero() {
            return self.im.abs();
        }
        self.norm_sqr().sqrt(p)
    }

    pub fn scale(&self, r: &Real) -> Complex {
        Complex::new(&self.re * r, &self.im * r)
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl From<Real> for Complex {
    fn from(r: Real) -> Complex {
        Complex::from_real(r)
    }
}

impl Add<&Complex> for &Complex {
    type Output = Complex;
    fn add(self, rhs: &Complex) -> Complex {
        Complex::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub<&Complex> for &Complex {
    type Output = Complex;
    fn sub(self, rhs: &Complex) -> Complex {
        Complex::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul<&Complex> for &Complex {
    type Output = Complex;
    fn mul(self, rhs: &Complex) -> Complex {
        if self.im.is_zero() && rhs.im.is_zero() {
            return Complex::from_real(&self.re * &rhs.re);
        }
        Complex::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Div<&Complex> for &Complex {
    type Output = Complex;
    fn div(self, rhs: &Complex) -> Complex {
        if rhs.im.is_zero() {
            return Complex::new(&self.re / &rhs.re, &self.im / &rhs.re);
        }
        let den = rhs.norm_sqr();
        let num = self * &rhs.conj();
        Complex::new(&num.re / &den, &num.im / &den)
    }
}

macro_rules! complex_owned {
    ($trait:ident, $method:ident) => {
        impl $trait<Complex> for Complex {
            type Output = Complex;
            fn $method(self, rhs: Complex) -> Complex {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Complex> for Complex {
            type Output = Complex;
            fn $method(self, rhs: &Complex) -> Complex {
                (&self).$method(rhs)
            }
        }
        impl $trait<Complex> for &Complex {
            type Output = Complex;
            fn $method(self, rhs: Complex) -> Complex {
                self.$method(&rhs)
            }
        }
    };
}

complex_owned!(Add, add);
complex_owned!(Sub, sub);
complex_owned!(Mul, mul);
complex_owned!(Div, div);

impl Neg for Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex::new(-self.re, -self.im)
    }
}

impl Neg for &Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        -self.clone()
    }
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.signum() < 0 {
            write!(f, "{}-{}i", self.re, self.im.abs())
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}
