//! Exact dyadic rationals and the string codecs shared by every name.
//!
//! A dyadic string has the shape `s x / 1 0^k` with `s` a sign and `x` a
//! binary numerator (leading zeros allowed); it denotes `±x / 2^k`. Strings
//! are tupled by doubling every symbol of each part and closing each part
//! with `01`, so a tuple's length only depends on the lengths of its parts.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Result, SondaError};

/// `num / 2^exp`. Not kept in lowest terms; equality and ordering are by value.
#[derive(Clone, Debug)]
pub struct Dyadic {
    num: BigInt,
    exp: u64,
}

impl Dyadic {
    pub fn new(num: impl Into<BigInt>, exp: u64) -> Self {
        Dyadic {
            num: num.into(),
            exp,
        }
    }

    pub fn zero() -> Self {
        Dyadic::new(0, 0)
    }

    pub fn one() -> Self {
        Dyadic::new(1, 0)
    }

    pub fn from_int(v: i64) -> Self {
        Dyadic::new(v, 0)
    }

    /// `2^e` for any integer `e`.
    pub fn pow2(e: i64) -> Self {
        if e >= 0 {
            Dyadic::new(BigInt::one() << (e as u64), 0)
        } else {
            Dyadic::new(1, e.unsigned_abs())
        }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    /// `k` in the denominator `2^k`.
    pub fn exponent(&self) -> u64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    pub fn abs(&self) -> Self {
        Dyadic::new(self.num.abs(), self.exp)
    }

    /// Same value with numerator over `2^exp`; `exp` must not be below the
    /// current exponent.
    pub fn numerator_at(&self, exp: u64) -> BigInt {
        debug_assert!(exp >= self.exp);
        &self.num << (exp - self.exp)
    }

    /// Lowest-terms form (odd numerator or exponent 0).
    pub fn normalized(&self) -> Self {
        if self.num.is_zero() {
            return Dyadic::zero();
        }
        let tz = self.num.trailing_zeros().unwrap_or(0).min(self.exp);
        Dyadic::new(&self.num >> tz, self.exp - tz)
    }

    /// Multiplies by `2^e`.
    pub fn mul_pow2(&self, e: i64) -> Self {
        if e >= 0 {
            let e = e as u64;
            if e <= self.exp {
                Dyadic::new(self.num.clone(), self.exp - e)
            } else {
                Dyadic::new(&self.num << (e - self.exp), 0)
            }
        } else {
            Dyadic::new(self.num.clone(), self.exp + e.unsigned_abs())
        }
    }

    /// Nearest value of the form `m / 2^k`, ties toward negative infinity.
    pub fn round_to(&self, k: u64) -> Self {
        if self.exp <= k {
            return Dyadic::new(self.numerator_at(k), k);
        }
        let shift = self.exp - k;
        let unit = BigInt::one() << shift;
        let half = BigInt::one() << (shift - 1);
        // ceil((num - half) / unit)
        let shifted = &self.num - half;
        let m = -((-shifted).div_floor(&unit));
        Dyadic::new(m, k)
    }

    /// Largest `m / 2^k` not above the value.
    pub fn floor_to(&self, k: u64) -> Self {
        if self.exp <= k {
            return Dyadic::new(self.numerator_at(k), k);
        }
        let unit = BigInt::one() << (self.exp - k);
        Dyadic::new(self.num.div_floor(&unit), k)
    }

    /// Smallest integer `e` with `|self| < 2^e` (0 for zero).
    pub fn magnitude_bits(&self) -> i64 {
        if self.num.is_zero() {
            return 0;
        }
        let bits = self.num.abs().bits() as i64;
        bits - self.exp as i64
    }

    pub fn clamp_to(&self, lo: &Dyadic, hi: &Dyadic) -> Dyadic {
        if self < lo {
            lo.clone()
        } else if self > hi {
            hi.clone()
        } else {
            self.clone()
        }
    }

    pub fn min(self, other: Dyadic) -> Dyadic {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Dyadic) -> Dyadic {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn to_f64(&self) -> f64 {
        let n = self.normalized();
        let bits = n.num.bits();
        // keep 64 significant bits so huge numerators do not overflow to inf
        let drop = bits.saturating_sub(64);
        let head = (&n.num >> drop).to_f64().unwrap_or(f64::NAN);
        head * 2f64.powi(drop as i32 - n.exp as i32)
    }

    /// Exact value of a finite double.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Dyadic::zero());
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let e = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, e) = if e == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), e - 1075)
        };
        Some(Dyadic::new(BigInt::from(mant) * sign, 0).mul_pow2(e))
    }

    /// Smallest integer `e` with `2^e >= self`; `None` unless positive.
    pub fn ceil_log2(&self) -> Option<i64> {
        if self.num.sign() != Sign::Plus {
            return None;
        }
        let mut e = self.magnitude_bits();
        // 2^(e-1) <= x < 2^e; x is a power of two iff it equals 2^(e-1)
        if *self == Dyadic::pow2(e - 1) {
            e -= 1;
        }
        Some(e)
    }

    /// Canonical string: minimal numerator bits over the stored exponent.
    pub fn encode(&self) -> String {
        let bits = self.num.magnitude().to_str_radix(2);
        let sign = if self.num.is_negative() {
            Sign::Minus
        } else {
            Sign::Plus
        };
        encode_dyadic(sign, &bits, self.exp)
    }

    /// Lossy decimal rendering for humans.
    pub fn to_decimal(&self, digits: usize) -> String {
        let n = self.normalized();
        let neg = n.num.is_negative();
        let mag = n.num.magnitude();
        let den = BigUint::one() << n.exp;
        let (int, mut rem) = mag.div_rem(&den);
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        out.push_str(&int.to_str_radix(10));
        if digits > 0 && n.exp > 0 {
            out.push('.');
            for _ in 0..digits {
                rem *= 10u32;
                let (d, r) = rem.div_rem(&den);
                out.push_str(&d.to_str_radix(10));
                rem = r;
            }
        }
        out
    }
}

impl PartialEq for Dyadic {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Dyadic {}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exp.max(other.exp);
        self.numerator_at(e).cmp(&other.numerator_at(e))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

impl<'a> Add<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let e = self.exp.max(rhs.exp);
        Dyadic::new(self.numerator_at(e) + rhs.numerator_at(e), e)
    }
}

impl<'a> Sub<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        let e = self.exp.max(rhs.exp);
        Dyadic::new(self.numerator_at(e) - rhs.numerator_at(e), e)
    }
}

impl<'a> Mul<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.num * &rhs.num, self.exp + rhs.exp)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic::new(-&self.num, self.exp)
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: Dyadic) -> Dyadic {
                (&self).$m(&rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        -&self
    }
}

/// The six exact operations behind the CLI and the real-number operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DyadicOp {
    Add,
    Sub,
    Mul,
    Neg,
    Compare,
    RoundTo(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DyadicResult {
    Value(Dyadic),
    Ordering(Ordering),
}

/// Dispatches one exact operation; unary ops ignore `b`.
pub fn dyadic_arith(op: DyadicOp, a: &Dyadic, b: Option<&Dyadic>) -> DyadicResult {
    let zero = Dyadic::zero();
    let b = b.unwrap_or(&zero);
    match op {
        DyadicOp::Add => DyadicResult::Value(a + b),
        DyadicOp::Sub => DyadicResult::Value(a - b),
        DyadicOp::Mul => DyadicResult::Value(a * b),
        DyadicOp::Neg => DyadicResult::Value(-a),
        DyadicOp::Compare => DyadicResult::Ordering(a.cmp(b)),
        DyadicOp::RoundTo(k) => DyadicResult::Value(a.round_to(k)),
    }
}

/// `s ++ bits ++ "/1" ++ 0^exponent`. Leading zeros in `bits` are kept.
pub fn encode_dyadic(sign: Sign, bits: &str, exponent: u64) -> String {
    let mut out = String::with_capacity(bits.len() + exponent as usize + 3);
    out.push(if sign == Sign::Minus { '-' } else { '+' });
    out.push_str(bits);
    out.push_str("/1");
    out.push_str(&"0".repeat(exponent as usize));
    out
}

/// Reads a dyadic string exactly. An empty numerator reads as zero.
pub fn decode_dyadic(u: &str) -> Result<Dyadic> {
    let bad = || SondaError::MalformedDyadic(u.to_string());
    let bytes = u.as_bytes();
    let negative = match bytes.first() {
        Some(b'+') => false,
        Some(b'-') => true,
        _ => return Err(bad()),
    };
    let slash = u.find('/').ok_or_else(bad)?;
    let numer = &u[1..slash];
    let denom = &u[slash + 1..];
    if !numer.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(bad());
    }
    let dbytes = denom.as_bytes();
    if dbytes.first() != Some(&b'1') || !dbytes[1..].iter().all(|&b| b == b'0') {
        return Err(bad());
    }
    let mag = if numer.is_empty() {
        BigUint::zero()
    } else {
        BigUint::parse_bytes(numer.as_bytes(), 2).ok_or_else(bad)?
    };
    let sign = if negative { Sign::Minus } else { Sign::Plus };
    Ok(Dyadic::new(
        BigInt::from_biguint(sign, mag),
        (denom.len() - 1) as u64,
    ))
}

/// Self-delimiting tupling: every symbol doubled, each part closed by `01`.
/// The empty list tuples to the empty string.
pub fn tuple_strings<S: AsRef<str>>(parts: &[S]) -> String {
    let total: usize = parts.iter().map(|p| 2 * p.as_ref().len() + 2).sum();
    let mut out = String::with_capacity(total);
    for p in parts {
        for c in p.as_ref().chars() {
            out.push(c);
            out.push(c);
        }
        out.push_str("01");
    }
    out
}

pub fn untuple_strings(s: &str) -> Result<Vec<String>> {
    if !s.is_ascii() {
        return untuple_chars(s);
    }
    let bad = || SondaError::MalformedTuple(s.to_string());
    let b = s.as_bytes();
    if b.len() % 2 == 1 {
        return Err(bad());
    }
    let mut parts = Vec::new();
    let mut cur = Vec::new();
    let mut open = false;
    for pair in b.chunks_exact(2) {
        if pair[0] == pair[1] {
            cur.push(pair[0]);
            open = true;
        } else if pair == b"01" {
            parts.push(String::from_utf8(std::mem::take(&mut cur)).expect("ascii"));
            open = false;
        } else {
            return Err(bad());
        }
    }
    if open {
        return Err(bad());
    }
    Ok(parts)
}

fn untuple_chars(s: &str) -> Result<Vec<String>> {
    let bad = || SondaError::MalformedTuple(s.to_string());
    let mut parts = Vec::new();
    let mut cur = String::new();
    let mut chars = s.chars();
    let mut open = false;
    while let Some(a) = chars.next() {
        let b = chars.next().ok_or_else(bad)?;
        if a == b {
            cur.push(a);
            open = true;
        } else if a == '0' && b == '1' {
            parts.push(std::mem::take(&mut cur));
            open = false;
        } else {
            return Err(bad());
        }
    }
    if open {
        return Err(bad());
    }
    Ok(parts)
}

/// Untuples and insists on exactly `n` parts.
pub fn untuple_exact(s: &str, n: usize) -> Result<Vec<String>> {
    let parts = untuple_strings(s)?;
    if parts.len() != n {
        return Err(SondaError::MalformedTuple(s.to_string()));
    }
    Ok(parts)
}

/// `0^n`.
pub fn unary(n: usize) -> String {
    "0".repeat(n)
}
