//! Real numbers as regular names.
//!
//! A name `phi` of `x` answers `0^i` with a dyadic string `u` such that
//! `|[u] - x| < 2^-i`. Any other query of length `i` is answered as `0^i`.
//!
//! Every name built here carries two numbers: `bound`, with `|x| < 2^bound`
//! and every answer below `2^bound` in magnitude, and `slack`, with every
//! answer at precision `i` having at most `i + slack` fractional bits. The
//! answer is then at most `3 + bound + 2(i + slack)` symbols long and is
//! `#`-padded to exactly that length.

use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::encoding::{decode_dyadic, unary, Dyadic};
use crate::error::{Result, SondaError};
use crate::names::{pad_to, pair, split_paired_answer, strip_padding, Name, SizeFn};

#[derive(Clone, Debug)]
pub struct RealName {
    name: Name,
    bound: u32,
    slack: u64,
}

type Approx = dyn Fn(u64) -> Result<Dyadic> + Send + Sync;

impl RealName {
    /// Wraps an approximation routine. `f(i)` must be within `2^-i` of the
    /// real, below `2^bound` in magnitude, with at most `i + slack`
    /// fractional bits once normalized.
    pub fn from_approx(
        bound: u32,
        slack: u64,
        f: impl Fn(u64) -> Result<Dyadic> + Send + Sync + 'static,
    ) -> Self {
        let f: Arc<Approx> = Arc::new(f);
        let size = SizeFn::new(move |i| schedule(bound, slack, i as u64));
        let name = Name::with_size(
            move |u| {
                let i = u.len() as u64;
                let v = f(i)?.normalized();
                if v.exponent() > i + slack || v.magnitude_bits() > bound as i64 {
                    return Err(SondaError::MalformedName(format!(
                        "answer {v} at precision {i} is outside the schedule (bound {bound}, slack {slack})"
                    )));
                }
                pad_to(v.encode(), schedule(bound, slack, i))
            },
            size,
        );
        RealName { name, bound, slack }
    }

    /// Canonical form of an arbitrary name of a real: the answer at `0^i`
    /// is the given name's answer at `0^(i+1)` rounded to `i+2` bits.
    pub fn from_name(name: Name) -> Result<Self> {
        let bound = u32::try_from(magnitude_exponent_of(&name)?)
            .map_err(|_| SondaError::MalformedName("precision-0 answer too long".into()))?;
        Ok(RealName::from_approx(bound, 2, move |i| {
            Ok(read_dyadic(&name.query(&unary(i as usize + 1))?)?.round_to(i + 2))
        }))
    }

    pub fn name(&self) -> &Name {
        &self.name
    }

    /// `|x| < 2^bound`, and every answer respects it too.
    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn slack(&self) -> u64 {
        self.slack
    }

    pub fn approx(&self, n: u64) -> Result<Dyadic> {
        to_dyadic(self, n)
    }
}

fn schedule(bound: u32, slack: u64, i: u64) -> usize {
    (3 + bound as u64 + 2 * (i + slack)) as usize
}

/// Decodes a (possibly padded) dyadic answer.
pub fn read_dyadic(answer: &str) -> Result<Dyadic> {
    decode_dyadic(strip_padding(answer)).map_err(|_| {
        SondaError::MalformedName(format!("answer {answer:?} is not a dyadic string"))
    })
}

pub fn real_from_dyadic(d: &Dyadic) -> RealName {
    let d = d.clone();
    let bound = d.magnitude_bits().max(0) as u32 + 1;
    RealName::from_approx(bound, 2, move |i| Ok(d.round_to(i + 2)))
}

pub fn to_dyadic(x: &RealName, n: u64) -> Result<Dyadic> {
    read_dyadic(&x.name.query(&unary(n as usize))?)
}

fn magnitude_exponent_of(name: &Name) -> Result<u64> {
    Ok(name.query("")?.len() as u64 + 1)
}

/// `M` with `|x| < 2^M`, read off the length of the precision-0 answer: a
/// dyadic string of length `l` denotes less than `2^l` in magnitude, and the
/// real is within 1 of it.
pub fn magnitude_exponent(x: &RealName) -> Result<u64> {
    magnitude_exponent_of(&x.name)
}

fn component(oracle: &Name, tag: char, prec: u64) -> Result<(usize, Dyadic)> {
    let mut q = String::with_capacity(prec as usize + 1);
    q.push(tag);
    q.push_str(&unary(prec as usize));
    let a = oracle.query(&q)?;
    let raw = split_paired_answer(&a)?;
    Ok((raw.len(), read_dyadic(raw)?))
}

/// Sum step on the paired oracle `<x, y>`: exact sum of the answers at `m+1`.
pub fn add_step(oracle: &Name, m: u64) -> Result<Dyadic> {
    let (_, a) = component(oracle, '0', m + 1)?;
    let (_, b) = component(oracle, '1', m + 1)?;
    Ok(&a + &b)
}

/// Product step on `<x, y>`. With `k` the longer precision-0 answer,
/// `|x|, |y| < 2^(k-1)`, so answers at `m+k+1` give a product within
/// `2^-(m+1)` before the final rounding to `m+2` bits.
pub fn mul_step(oracle: &Name, m: u64) -> Result<Dyadic> {
    let (lu, _) = component(oracle, '0', 0)?;
    let (lv, _) = component(oracle, '1', 0)?;
    let k = lu.max(lv) as u64;
    let (_, a) = component(oracle, '0', m + k + 1)?;
    let (_, b) = component(oracle, '1', m + k + 1)?;
    Ok((&a * &b).round_to(m + 2))
}

pub fn neg_step(oracle: &Name, m: u64) -> Result<Dyadic> {
    Ok(-read_dyadic(&oracle.query(&unary(m as usize))?)?)
}

pub fn real_add(x: &RealName, y: &RealName) -> RealName {
    let oracle = pair(&x.name, &y.name);
    RealName::from_approx(
        x.bound.max(y.bound) + 1,
        x.slack.max(y.slack) + 1,
        move |m| add_step(&oracle, m),
    )
}

pub fn real_neg(x: &RealName) -> RealName {
    let inner = x.name.clone();
    RealName::from_approx(x.bound, x.slack, move |m| neg_step(&inner, m))
}

pub fn real_sub(x: &RealName, y: &RealName) -> RealName {
    real_add(x, &real_neg(y))
}

pub fn real_mul(x: &RealName, y: &RealName) -> RealName {
    let oracle = pair(&x.name, &y.name);
    RealName::from_approx(x.bound + y.bound + 1, 2, move |m| mul_step(&oracle, m))
}

fn bit_len(v: u64) -> u64 {
    (u64::BITS - v.leading_zeros()) as u64
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, j| acc * j)
}

/// Smallest `N` with `3/(N+1)! < 2^-(n+2)`.
pub fn exp_terms(n: u64) -> u64 {
    let target = BigUint::from(3u32) << (n + 2);
    let mut fact = BigUint::one();
    let mut big_n = 0u64;
    loop {
        fact *= big_n + 1;
        if fact > target {
            return big_n;
        }
        big_n += 1;
    }
}

/// `exp(t)` for `t` in `[0,1]`, within `2^-(n+2) + 2^-(n+7)`.
pub fn exp_series(t: &Dyadic, n: u64) -> Dyadic {
    let big_n = exp_terms(n);
    let w = n + 8 + 2 * bit_len(big_n + 1);
    let tf = t.floor_to(w).numerator_at(w);
    let mut term = BigInt::one() << w;
    let mut sum = term.clone();
    for j in 1..=big_n {
        term = (term * &tf) >> w;
        term /= j;
        sum += &term;
    }
    Dyadic::new(sum, w)
}

pub fn real_exp01(x: &RealName) -> RealName {
    let inner = x.name.clone();
    RealName::from_approx(2, 2, move |n| {
        let t = read_dyadic(&inner.query(&unary(n as usize + 3))?)?
            .clamp_to(&Dyadic::zero(), &Dyadic::one());
        Ok(exp_series(&t, n).round_to(n + 2))
    })
}

/// Smallest `N >= 2` whose first omitted sine term, doubled, is below
/// `2^-(n+4)` for arguments in `[-4, 4]`.
pub fn sin_terms(n: u64) -> u64 {
    let mut big_n = 2u64;
    loop {
        let k = 2 * big_n + 3;
        let lhs = BigUint::one() << (2 * k + 1 + n + 4);
        if lhs < factorial(k) {
            return big_n;
        }
        big_n += 1;
    }
}

/// `sin(r)` for `|r| <= 4`, within `2^-(n+4) + 2^-(n+8)`.
pub fn sin_series(r: &Dyadic, n: u64) -> Dyadic {
    let big_n = sin_terms(n);
    let w = n + 16 + 2 * bit_len(big_n + 1);
    let rf = r.floor_to(w).numerator_at(w);
    let r2 = (&rf * &rf) >> w;
    let mut term = rf;
    let mut sum = term.clone();
    for j in 1..=big_n {
        term = -((term * &r2) >> w);
        term /= (2 * j) * (2 * j + 1);
        sum += &term;
    }
    Dyadic::new(sum, w)
}

fn arctan_inv(m: u32, w: u64) -> BigInt {
    let m2 = BigInt::from(m * m);
    let mut power = (BigInt::one() << w) / m;
    let mut sum = power.clone();
    let mut j = 1u64;
    loop {
        power /= &m2;
        if power.is_zero() {
            return sum;
        }
        let term = &power / (2 * j + 1);
        if j % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        j += 1;
    }
}

static PI_CACHE: OnceLock<Mutex<Option<(u64, Dyadic)>>> = OnceLock::new();

/// Machin: `pi/4 = 4 atan(1/5) - atan(1/239)`. Error below `2^-k`.
pub fn pi_approx(k: u64) -> Dyadic {
    let cache = PI_CACHE.get_or_init(|| Mutex::new(None));
    let mut slot = cache.lock().expect("pi cache poisoned");
    let have = slot.as_ref().map_or(0, |(p, _)| *p);
    if have < k + 1 {
        let p = (k + 1).max(2 * have);
        let w = p + 2 * bit_len(p) + 16;
        let v = (arctan_inv(5, w) * 16) - (arctan_inv(239, w) * 4);
        *slot = Some((p, Dyadic::new(v, w)));
    }
    let (_, v) = slot.as_ref().expect("filled above");
    v.round_to(k + 1)
}

/// Range reduction step: `a - k*tau` with `k = round(a / tau)`.
fn reduce_mod(a: &Dyadic, tau: &Dyadic) -> Dyadic {
    let e = a.exponent().max(tau.exponent());
    let (na, nt) = (a.numerator_at(e), tau.numerator_at(e));
    let k = num_integer::Integer::div_floor(&(2 * na + &nt), &(2 * nt));
    a - &(tau * &Dyadic::new(k, 0))
}

/// `sin(a)` within `2^-n` for an exact argument.
pub fn sin_dyadic(a: &Dyadic, n: u64) -> Dyadic {
    let m = a.magnitude_bits().max(0) as u64;
    let tau = pi_approx(n + m + 9).mul_pow2(1);
    sin_series(&reduce_mod(a, &tau), n)
}

pub fn real_sin(x: &RealName) -> RealName {
    let inner = x.name.clone();
    RealName::from_approx(2, 2, move |n| {
        let m = magnitude_exponent_of(&inner)?;
        let a = read_dyadic(&inner.query(&unary(n as usize + 4))?)?;
        let tau = pi_approx(n + m + 9).mul_pow2(1);
        let r = reduce_mod(&a, &tau);
        Ok(sin_series(&r, n).round_to(n + 2))
    })
}
