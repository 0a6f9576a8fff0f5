//! Field arithmetic: exact rationals, and complex numbers over binary
//! floating point with a fixed working precision.

mod roots;

pub use roots::univariate_roots;

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use dashu::base::{Abs, BitTest, SquareRoot, UnsignedAbs};
use dashu::float::round::mode::HalfAway;
use dashu::float::FBig;
use dashu::integer::{IBig, UBig};
use dashu::rational::RBig;

use crate::error::{Error, Result};

/// Binary floating point value; the precision travels with the value.
pub type Real = FBig<HalfAway, 2>;

pub const DEFAULT_PRECISION: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TolerancePolicy {
    pub precision_bits: usize,
    pub zero_threshold: f64,
}

impl TolerancePolicy {
    pub fn new(precision_bits: usize) -> Result<Self> {
        let t = (-(precision_bits as f64) / 2.0).exp2();
        Self::with_threshold(precision_bits, t)
    }

    pub fn with_threshold(precision_bits: usize, zero_threshold: f64) -> Result<Self> {
        if precision_bits < 64 {
            return Err(Error::PreconditionFailed(format!(
                "precision must be at least 64 bits, got {precision_bits}"
            )));
        }
        if !(zero_threshold > 0.0 && zero_threshold < (-32f64).exp2()) {
            return Err(Error::PreconditionFailed(format!(
                "zero threshold {zero_threshold:e} outside (0, 2^-32)"
            )));
        }
        Ok(TolerancePolicy {
            precision_bits,
            zero_threshold,
        })
    }

    /// `value` counts as zero relative to `scale`.
    pub fn negligible(&self, value: f64, scale: f64) -> bool {
        value <= self.zero_threshold * scale
    }
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        TolerancePolicy::new(DEFAULT_PRECISION).unwrap()
    }
}

pub(crate) fn real_zero(prec: usize) -> Real {
    Real::ZERO.with_precision(prec).value()
}

/// Correctly rounded binary value of a rational.
pub(crate) fn real_from_rational(r: &RBig, prec: usize) -> Real {
    if r == &RBig::ZERO {
        return real_zero(prec);
    }
    let neg = r < &RBig::ZERO;
    let n = r.numerator().clone().unsigned_abs();
    let d = r.denominator().clone();
    let k = (prec + 3 + d.bit_len()) as isize - n.bit_len() as isize;
    let (num, den) = if k >= 0 {
        (n << k as usize, d)
    } else {
        (n, d << (-k) as usize)
    };
    let mut q = &num / &den;
    if &q * &den != num {
        // sticky bit below the rounding position
        q |= UBig::ONE;
    }
    let q = if neg { -IBig::from(q) } else { IBig::from(q) };
    Real::from_parts(q, -k).with_precision(prec).value()
}

pub(crate) fn real_from_f64(x: f64, prec: usize) -> Real {
    Real::try_from(x)
        .expect("finite f64")
        .with_precision(prec)
        .value()
}

/// Exact value of a binary float as a rational.
pub(crate) fn real_to_rational(x: &Real) -> RBig {
    let sig = x.repr().significand().clone();
    let exp = x.repr().exponent();
    if exp >= 0 {
        RBig::from(sig << exp as usize)
    } else {
        RBig::from_parts(sig, UBig::ONE << (-exp) as usize)
    }
}

pub(crate) fn real_to_f64(x: &Real) -> f64 {
    x.to_f64().value()
}

/// Round to `prec` bits and make sure the significand really fits; some
/// arithmetic results carry one extra bit, which would make equal values
/// compare and print differently.
fn round_to(x: &Real, prec: usize) -> Real {
    let x = if x.precision() == prec {
        x.clone()
    } else {
        x.clone().with_precision(prec).value()
    };
    let sig = x.repr().significand();
    let bits = sig.clone().unsigned_abs().bit_len();
    if bits <= prec {
        return x;
    }
    let shift = bits - prec;
    let neg = sig < &IBig::ZERO;
    let mag = sig.clone().unsigned_abs();
    let mut q = &mag >> shift;
    let rem = &mag - (&q << shift);
    if rem >= (UBig::ONE << (shift - 1)) {
        q += UBig::ONE;
    }
    let q = if neg { -IBig::from(q) } else { IBig::from(q) };
    Real::from_parts(q, x.repr().exponent() + shift as isize)
        .with_precision(prec)
        .value()
}

fn decimal_digits(prec: usize) -> usize {
    (prec as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1
}

/// Scientific notation with enough digits to round-trip at `prec` bits,
/// computed exactly.
fn fmt_real(x: &Real, prec: usize) -> String {
    let r = real_to_rational(x);
    if r == RBig::ZERO {
        return "0e0".to_string();
    }
    let digits = decimal_digits(prec);
    let neg = r < RBig::ZERO;
    let a = if neg { -r } else { r };
    let bits = x.repr().significand().clone().unsigned_abs().bit_len() as isize + x.repr().exponent();
    let mut e10 = ((bits - 1) as f64 * std::f64::consts::LOG10_2).floor() as isize;
    let ten = UBig::from(10u8);
    let lo = ten.pow(digits - 1);
    let hi = ten.pow(digits);
    let n = loop {
        let shift = digits as isize - 1 - e10;
        let scaled = if shift >= 0 {
            &a * RBig::from(ten.pow(shift as usize))
        } else {
            &a / RBig::from(ten.pow((-shift) as usize))
        };
        let n = (scaled + RBig::from_parts(IBig::ONE, UBig::from(2u8))).floor().unsigned_abs();
        if n >= hi {
            e10 += 1;
        } else if n < lo {
            e10 -= 1;
        } else {
            break n;
        }
    };
    let s = n.to_string();
    let mantissa = s.trim_end_matches('0');
    let (head, tail) = mantissa.split_at(1);
    let sign = if neg { "-" } else { "" };
    if tail.is_empty() {
        format!("{sign}{head}e{e10}")
    } else {
        format!("{sign}{head}.{tail}e{e10}")
    }
}

/// Exact value of a decimal literal `[-]d[.ddd][e[-]k]`.
fn parse_decimal(s: &str) -> Option<RBig> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (mant, exp) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], body[i + 1..].parse::<isize>().ok()?),
        None => (body, 0),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let m = UBig::from_str(&digits).ok()?;
    let e = exp - frac.len() as isize;
    let ten = UBig::from(10u8);
    let v = if e >= 0 {
        RBig::from(m * ten.pow(e as usize))
    } else {
        RBig::from_parts(IBig::from(m), ten.pow((-e) as usize))
    };
    Some(if neg { -v } else { v })
}

fn parse_real(s: &str, prec: usize) -> Option<Real> {
    parse_decimal(s).map(|r| real_from_rational(&r, prec))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Complex {
    re: Real,
    im: Real,
    prec: usize,
}

impl Complex {
    pub fn new(re: Real, im: Real, prec: usize) -> Self {
        Complex {
            re: round_to(&re, prec),
            im: round_to(&im, prec),
            prec,
        }
    }

    pub fn zero(prec: usize) -> Self {
        Complex {
            re: real_zero(prec),
            im: real_zero(prec),
            prec,
        }
    }

    pub fn from_rational(r: &RBig, prec: usize) -> Self {
        Complex {
            re: real_from_rational(r, prec),
            im: real_zero(prec),
            prec,
        }
    }

    pub fn from_f64(re: f64, im: f64, prec: usize) -> Self {
        Complex {
            re: real_from_f64(re, prec),
            im: real_from_f64(im, prec),
            prec,
        }
    }

    pub fn re(&self) -> &Real {
        &self.re
    }

    pub fn im(&self) -> &Real {
        &self.im
    }

    pub fn precision(&self) -> usize {
        self.prec
    }

    fn at(&self, prec: usize) -> Complex {
        if prec == self.prec {
            self.clone()
        } else {
            Complex::new(self.re.clone(), self.im.clone(), prec)
        }
    }

    fn align(a: &Complex, b: &Complex) -> (Complex, Complex, usize) {
        let p = a.prec.min(b.prec);
        (a.at(p), b.at(p), p)
    }

    pub fn add(&self, o: &Complex) -> Complex {
        if self.prec == o.prec {
            return Complex::new(&self.re + &o.re, &self.im + &o.im, self.prec);
        }
        let (a, b, p) = Complex::align(self, o);
        Complex::new(a.re + b.re, a.im + b.im, p)
    }

    pub fn sub(&self, o: &Complex) -> Complex {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Complex {
        Complex {
            re: -self.re.clone(),
            im: -self.im.clone(),
            prec: self.prec,
        }
    }

    pub fn conj(&self) -> Complex {
        Complex {
            re: self.re.clone(),
            im: -self.im.clone(),
            prec: self.prec,
        }
    }

    pub fn mul(&self, o: &Complex) -> Complex {
        if self.prec != o.prec {
            let (a, b, _) = Complex::align(self, o);
            return a.mul(&b);
        }
        let re = &self.re * &o.re - &self.im * &o.im;
        let im = &self.re * &o.im + &self.im * &o.re;
        Complex::new(re, im, self.prec)
    }

    pub fn scale_real(&self, r: &Real) -> Complex {
        let r = round_to(r, self.prec);
        Complex::new(&self.re * &r, &self.im * &r, self.prec)
    }

    pub fn norm_sqr(&self) -> Real {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn abs(&self) -> Real {
        self.norm_sqr().sqrt()
    }

    pub fn recip(&self) -> Complex {
        let n = self.norm_sqr();
        assert!(n != real_zero(self.prec), "complex division by zero");
        Complex::new(&self.re / &n, -(&self.im / &n), self.prec)
    }

    pub fn div(&self, o: &Complex) -> Complex {
        let (a, b, _) = Complex::align(self, o);
        a.mul(&b.recip())
    }

    /// Max of |re| and |im| as f64; a cheap norm for threshold tests.
    pub fn magnitude(&self) -> f64 {
        real_to_f64(&self.re)
            .abs()
            .max(real_to_f64(&self.im).abs())
    }

    pub fn is_exact_zero(&self) -> bool {
        self.re.repr().is_zero() && self.im.repr().is_zero()
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Complex {
        if self.is_exact_zero() {
            return self.clone();
        }
        let two = real_from_f64(2.0, self.prec);
        let r = self.abs();
        if self.re >= real_zero(self.prec) {
            let t = ((&r + &self.re) / &two).sqrt();
            let im = &self.im / (&two * &t);
            Complex::new(t, im, self.prec)
        } else {
            let t = ((&r - &self.re) / &two).sqrt();
            let re = self.im.clone().abs() / (&two * &t);
            let im = if self.im < real_zero(self.prec) { -t } else { t };
            Complex::new(re, im, self.prec)
        }
    }
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let re = fmt_real(&self.re, self.prec);
        let im = fmt_real(&self.im, self.prec);
        if im.starts_with('-') {
            write!(f, "{re}{im}i")
        } else {
            write!(f, "{re}+{im}i")
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Rational(RBig),
    Complex(Complex),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rational(RBig::ZERO)
    }

    pub fn one() -> Self {
        Scalar::Rational(RBig::ONE)
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Rational(RBig::from(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Scalar::Rational(RBig::from_parts(IBig::from(n), UBig::ONE) / RBig::from(d))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Rational(_))
    }

    pub fn as_rational(&self) -> Option<&RBig> {
        match self {
            Scalar::Rational(r) => Some(r),
            Scalar::Complex(_) => None,
        }
    }

    pub fn precision(&self) -> Option<usize> {
        match self {
            Scalar::Rational(_) => None,
            Scalar::Complex(c) => Some(c.prec),
        }
    }

    pub fn to_complex(&self, prec: usize) -> Complex {
        match self {
            Scalar::Rational(r) => Complex::from_rational(r, prec),
            Scalar::Complex(c) => c.at(prec.min(c.prec)),
        }
    }

    /// Exact zero (no tolerance).
    pub fn is_exact_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r == &RBig::ZERO,
            Scalar::Complex(c) => c.is_exact_zero(),
        }
    }

    pub fn is_zero(&self, policy: &TolerancePolicy) -> bool {
        is_zero(self, policy)
    }

    /// Approximate absolute value: |x| for rationals, max(|re|,|im|) for complex.
    pub fn magnitude(&self) -> f64 {
        match self {
            Scalar::Rational(r) => r.to_f64().value().abs(),
            Scalar::Complex(c) => c.magnitude(),
        }
    }

    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Rational(_) => self.clone(),
            Scalar::Complex(c) => Scalar::Complex(c.conj()),
        }
    }

    pub fn recip(&self) -> Scalar {
        match self {
            Scalar::Rational(r) => {
                assert!(r != &RBig::ZERO, "rational division by zero");
                Scalar::Rational(RBig::ONE / r)
            }
            Scalar::Complex(c) => Scalar::Complex(c.recip()),
        }
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut acc = Scalar::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Square root: exact when the rational is a perfect square, otherwise
    /// the principal complex root at `prec` bits.
    pub fn sqrt(&self, prec: usize) -> Scalar {
        if let Scalar::Rational(r) = self {
            if r >= &RBig::ZERO {
                let n = r.numerator().unsigned_abs();
                let d = r.denominator().clone();
                let sn = n.sqrt();
                let sd = d.sqrt();
                if &sn * &sn == n && &sd * &sd == d {
                    return Scalar::Rational(RBig::from_parts(IBig::from(sn), sd));
                }
            }
        }
        Scalar::Complex(self.to_complex(prec).sqrt())
    }

    fn binop(
        a: &Scalar,
        b: &Scalar,
        rat: impl Fn(&RBig, &RBig) -> RBig,
        cpx: impl Fn(&Complex, &Complex) -> Complex,
    ) -> Scalar {
        match (a, b) {
            (Scalar::Rational(x), Scalar::Rational(y)) => Scalar::Rational(rat(x, y)),
            (Scalar::Complex(x), Scalar::Complex(y)) => Scalar::Complex(cpx(x, y)),
            (Scalar::Complex(x), Scalar::Rational(y)) => {
                Scalar::Complex(cpx(x, &Complex::from_rational(y, x.prec)))
            }
            (Scalar::Rational(x), Scalar::Complex(y)) => {
                Scalar::Complex(cpx(&Complex::from_rational(x, y.prec), y))
            }
        }
    }

    /// Text form: `num/den` (or `num` when the denominator is 1) for
    /// rationals, `re±imi` for complex values.
    pub fn parse(s: &str, prec: usize) -> Result<Scalar> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(Error::parse(1, 1, "empty scalar"));
        }
        let complex_like = t.contains(['.', 'e', 'E', 'i']);
        if !complex_like {
            return parse_rational(&t).map(Scalar::Rational);
        }
        if prec < 64 {
            return Err(Error::parse(1, 1, "precision below 64 bits"));
        }
        let Some(body) = t.strip_suffix('i') else {
            let re = parse_real(&t, prec).ok_or_else(|| Error::parse(1, 1, "bad real"))?;
            return Ok(Scalar::Complex(Complex::new(re, real_zero(prec), prec)));
        };
        // split at the sign that starts the imaginary part
        let bytes = body.as_bytes();
        let mut split = None;
        for i in (1..bytes.len()).rev() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
                split = Some(i);
                break;
            }
        }
        let (re_s, im_s) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let im_s = match im_s {
            "" | "+" => "1",
            "-" => "-1",
            x => x.strip_prefix('+').unwrap_or(x),
        };
        let re = parse_real(re_s, prec).ok_or_else(|| Error::parse(1, 1, "bad real part"))?;
        let im = parse_real(im_s, prec).ok_or_else(|| Error::parse(1, 1, "bad imaginary part"))?;
        Ok(Scalar::Complex(Complex::new(re, im, prec)))
    }
}

fn parse_rational(t: &str) -> Result<RBig> {
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (t, None),
    };
    let valid_int = |s: &str| {
        let s = s.strip_prefix(['-', '+']).unwrap_or(s);
        !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid_int(n) || !d.is_none_or(|d| valid_int(d) && !d.starts_with(['-', '+'])) {
        return Err(Error::parse(1, 1, format!("bad rational `{t}`")));
    }
    let num = IBig::from_str(n.strip_prefix('+').unwrap_or(n))
        .map_err(|e| Error::parse(1, 1, e.to_string()))?;
    let den = match d {
        Some(d) => UBig::from_str(d).map_err(|e| Error::parse(1, 1, e.to_string()))?,
        None => UBig::ONE,
    };
    if den == UBig::ZERO {
        return Err(Error::parse(1, 1, "zero denominator"));
    }
    Ok(RBig::from_parts(num, den))
}

/// Exact test for rationals; `|x| <= zero_threshold` for complex values.
pub fn is_zero(x: &Scalar, policy: &TolerancePolicy) -> bool {
    match x {
        Scalar::Rational(r) => r == &RBig::ZERO,
        Scalar::Complex(c) => c.is_exact_zero() || c.abs() <= real_from_f64(policy.zero_threshold, c.prec),
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => {
                if r.denominator() == &UBig::ONE {
                    write!(f, "{}", r.numerator())
                } else {
                    write!(f, "{}/{}", r.numerator(), r.denominator())
                }
            }
            Scalar::Complex(c) => write!(f, "{c}"),
        }
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<RBig> for Scalar {
    fn from(r: RBig) -> Self {
        Scalar::Rational(r)
    }
}

impl From<Complex> for Scalar {
    fn from(c: Complex) -> Self {
        Scalar::Complex(c)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(-r.clone()),
            Scalar::Complex(c) => Scalar::Complex(c.neg()),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! scalar_binop {
    ($tr:ident, $m:ident, $rat:expr, $cpx:expr) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                Scalar::binop(self, o, $rat, $cpx)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                Scalar::binop(&self, &o, $rat, $cpx)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                Scalar::binop(&self, o, $rat, $cpx)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                Scalar::binop(self, &o, $rat, $cpx)
            }
        }
    };
}

scalar_binop!(Add, add, |x, y| x + y, |x, y| x.add(y));
scalar_binop!(Sub, sub, |x, y| x - y, |x, y| x.sub(y));
scalar_binop!(Mul, mul, |x, y| x * y, |x, y| x.mul(y));
scalar_binop!(
    Div,
    div,
    |x, y| {
        assert!(y != &RBig::ZERO, "rational division by zero");
        x / y
    },
    |x, y| x.div(y)
);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        *self = &*self + o;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, o: &Scalar) {
        *self = &*self - o;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, o: &Scalar) {
        *self = &*self * o;
    }
}
