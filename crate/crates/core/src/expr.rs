//! A small closed-form expression language for building names.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary ('*' unary)*
//! unary := ('-' | '+') unary | atom
//! atom  := literal | 't' | 'x' | 'y' | '(' expr ')' | ('sin' | 'exp01') '(' expr ')'
//! ```
//!
//! Literals are decimal integers (`3`), exact decimal fractions (`0.375`),
//! `a/b` with `b` a decimal power of two (`3/8`), or the dyadic-string form
//! `bits/10..0` read in binary (`1/100` is a quarter, `-11/10` is -3/2).
//! `x` and `t` name the first coordinate and `y` the second.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::cfun::{make_cfun, make_lip_name, CFunName, Domain, LipName};
use crate::encoding::{decode_dyadic, Dyadic};
use crate::error::{Result, SondaError};
use crate::names::SizeFn;
use crate::real::{exp_series, real_add, real_exp01, real_from_dyadic, real_mul, real_neg, real_sin, real_sub, sin_dyadic, RealName};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Const(Dyadic),
    T,
    Y,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Sin(Box<Expr>),
    Exp01(Box<Expr>),
}

use Expr::*;

struct Parser<'a> {
    src: &'a [u8],
    at: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.src.get(self.at).is_some_and(|c| c.is_ascii_whitespace()) {
            self.at += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.at).copied()
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(SondaError::parse(self.at, msg))
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.at += 1;
                    lhs = Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(b'-') => {
                    self.at += 1;
                    lhs = Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(b'*') {
            self.at += 1;
            lhs = Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'-') => {
                self.at += 1;
                Ok(Neg(Box::new(self.unary()?)))
            }
            Some(b'+') => {
                self.at += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn word(&mut self) -> &'a str {
        let start = self.at;
        while self.src.get(self.at).is_some_and(|c| c.is_ascii_alphanumeric()) {
            self.at += 1;
        }
        std::str::from_utf8(&self.src[start..self.at]).expect("ascii")
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.at += 1;
                let e = self.expr()?;
                self.close()?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => self.literal(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.at;
                match self.word() {
                    "t" | "x" => Ok(T),
                    "y" => Ok(Y),
                    f @ ("sin" | "exp01") => {
                        if self.peek() != Some(b'(') {
                            return self.err(format!("expected '(' after {f}"));
                        }
                        self.at += 1;
                        let e = Box::new(self.expr()?);
                        self.close()?;
                        Ok(if f == "sin" { Sin(e) } else { Exp01(e) })
                    }
                    w => {
                        self.at = start;
                        self.err(format!("unknown name {w:?}"))
                    }
                }
            }
            Some(c) => self.err(format!("unexpected {:?}", c as char)),
            None => self.err("unexpected end of expression"),
        }
    }

    fn close(&mut self) -> Result<()> {
        if self.peek() != Some(b')') {
            return self.err("expected ')'");
        }
        self.at += 1;
        Ok(())
    }

    fn digits(&mut self) -> &'a str {
        let start = self.at;
        while self.src.get(self.at).is_some_and(|c| c.is_ascii_digit()) {
            self.at += 1;
        }
        std::str::from_utf8(&self.src[start..self.at]).expect("ascii")
    }

    fn literal(&mut self) -> Result<Expr> {
        let start = self.at;
        let int = self.digits();
        let value = match self.src.get(self.at) {
            Some(b'.') => {
                self.at += 1;
                let frac = self.digits();
                decimal_fraction(int, frac)
            }
            Some(b'/') => {
                self.at += 1;
                let den = self.digits();
                ratio(int, den)
            }
            _ => Some(Dyadic::new(int.parse::<BigInt>().expect("digits"), 0)),
        };
        match value {
            Some(v) => Ok(Const(v)),
            None => {
                self.at = start;
                self.err("literal is not a dyadic rational")
            }
        }
    }
}

fn decimal_fraction(int: &str, frac: &str) -> Option<Dyadic> {
    let num: BigInt = format!("{int}{frac}").parse().ok()?;
    let den = BigInt::from(10u32).pow(frac.len() as u32);
    exact_quotient(num, den)
}

fn ratio(num: &str, den: &str) -> Option<Dyadic> {
    let binary = den.len() > 1
        && den.starts_with('1')
        && den[1..].bytes().all(|b| b == b'0')
        && num.bytes().all(|b| b == b'0' || b == b'1');
    if binary {
        return decode_dyadic(&format!("+{num}/{den}")).ok();
    }
    exact_quotient(num.parse().ok()?, den.parse().ok()?)
}

fn exact_quotient(num: BigInt, den: BigInt) -> Option<Dyadic> {
    if den.is_zero() {
        return None;
    }
    let tz = den.trailing_zeros().unwrap_or(0);
    let odd = &den >> tz;
    if !(&num % &odd).is_zero() {
        return None;
    }
    Some(Dyadic::new(num / odd, tz))
}

pub fn parse_expr(src: &str) -> Result<Expr> {
    let mut p = Parser {
        src: src.as_bytes(),
        at: 0,
    };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// Closed interval with dyadic ends.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Iv(Dyadic, Dyadic);

impl Iv {
    fn point(v: Dyadic) -> Iv {
        Iv(v.clone(), v)
    }

    fn new(lo: i64, hi: i64) -> Iv {
        Iv(Dyadic::from_int(lo), Dyadic::from_int(hi))
    }

    fn add(&self, o: &Iv) -> Iv {
        Iv(&self.0 + &o.0, &self.1 + &o.1)
    }

    fn neg(&self) -> Iv {
        Iv(-&self.1, -&self.0)
    }

    fn mul(&self, o: &Iv) -> Iv {
        let c = [&self.0 * &o.0, &self.0 * &o.1, &self.1 * &o.0, &self.1 * &o.1];
        let lo = c.iter().min().expect("four").clone();
        let hi = c.iter().max().expect("four").clone();
        Iv(lo, hi)
    }

    fn abs_max(&self) -> Dyadic {
        self.0.abs().max(self.1.abs())
    }
}

/// Static bounds of an expression over a domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExprBounds {
    /// `|e| < 2^magnitude` everywhere on the domain.
    pub magnitude: u32,
    /// Upper bounds on the partial derivatives, in absolute value.
    pub lip_t: Dyadic,
    pub lip_y: Dyadic,
}

impl Expr {
    pub fn uses_t(&self) -> bool {
        self.any(&|e| *e == T)
    }

    pub fn uses_y(&self) -> bool {
        self.any(&|e| *e == Y)
    }

    pub fn is_transcendental(&self) -> bool {
        self.any(&|e| matches!(e, Sin(_) | Exp01(_)))
    }

    fn any(&self, f: &dyn Fn(&Expr) -> bool) -> bool {
        if f(self) {
            return true;
        }
        match self {
            Const(_) | T | Y => false,
            Add(a, b) | Sub(a, b) | Mul(a, b) => a.any(f) || b.any(f),
            Neg(a) | Sin(a) | Exp01(a) => a.any(f),
        }
    }

    fn coord(pts: &[Dyadic], i: usize) -> Dyadic {
        pts.get(i).cloned().unwrap_or_else(Dyadic::zero)
    }

    /// Exact value, or `None` when a transcendental function occurs.
    pub fn eval_exact(&self, pts: &[Dyadic]) -> Option<Dyadic> {
        Some(match self {
            Const(c) => c.clone(),
            T => Self::coord(pts, 0),
            Y => Self::coord(pts, 1),
            Add(a, b) => &a.eval_exact(pts)? + &b.eval_exact(pts)?,
            Sub(a, b) => &a.eval_exact(pts)? - &b.eval_exact(pts)?,
            Mul(a, b) => &a.eval_exact(pts)? * &b.eval_exact(pts)?,
            Neg(a) => -a.eval_exact(pts)?,
            Sin(_) | Exp01(_) => return None,
        })
    }

    /// A value within `2^-k`.
    pub fn eval_approx(&self, pts: &[Dyadic], k: u64) -> Dyadic {
        match self {
            Const(c) => c.clone(),
            T => Self::coord(pts, 0),
            Y => Self::coord(pts, 1),
            Add(a, b) => &a.eval_approx(pts, k + 1) + &b.eval_approx(pts, k + 1),
            Sub(a, b) => &a.eval_approx(pts, k + 1) - &b.eval_approx(pts, k + 1),
            Neg(a) => -a.eval_approx(pts, k),
            Mul(a, b) => {
                let ba = a.local_magnitude(pts);
                let bb = b.local_magnitude(pts);
                &a.eval_approx(pts, k + bb + 2) * &b.eval_approx(pts, k + ba + 2)
            }
            Sin(a) => sin_dyadic(&a.eval_approx(pts, k + 2), k + 1),
            Exp01(a) => {
                let t = a.eval_approx(pts, k + 3).clamp_to(&Dyadic::zero(), &Dyadic::one());
                exp_series(&t, k)
            }
        }
    }

    // `|e(pts)| < 2^b`, from a precision-0 evaluation
    fn local_magnitude(&self, pts: &[Dyadic]) -> u64 {
        match self.eval_exact(pts) {
            Some(v) => v.magnitude_bits().max(0) as u64,
            None => (&self.eval_approx(pts, 0).abs() + &Dyadic::one()).magnitude_bits().max(0) as u64,
        }
    }

    // value and derivative intervals for coordinate `var`
    fn interval(&self, ranges: &[Iv], var: usize) -> (Iv, Iv) {
        let zero = Iv::point(Dyadic::zero());
        let coord = |i: usize| {
            let r = ranges.get(i).cloned().unwrap_or_else(|| zero.clone());
            let d = if i == var { Iv::point(Dyadic::one()) } else { zero.clone() };
            (r, d)
        };
        match self {
            Const(c) => (Iv::point(c.clone()), zero),
            T => coord(0),
            Y => coord(1),
            Add(a, b) | Sub(a, b) => {
                let (va, da) = a.interval(ranges, var);
                let (vb, db) = b.interval(ranges, var);
                if matches!(self, Add(..)) {
                    (va.add(&vb), da.add(&db))
                } else {
                    (va.add(&vb.neg()), da.add(&db.neg()))
                }
            }
            Mul(a, b) => {
                let (va, da) = a.interval(ranges, var);
                let (vb, db) = b.interval(ranges, var);
                (va.mul(&vb), da.mul(&vb).add(&va.mul(&db)))
            }
            Neg(a) => {
                let (v, d) = a.interval(ranges, var);
                (v.neg(), d.neg())
            }
            Sin(a) => {
                let (_, d) = a.interval(ranges, var);
                (Iv::new(-1, 1), d.mul(&Iv::new(-1, 1)))
            }
            Exp01(a) => {
                let (_, d) = a.interval(ranges, var);
                (Iv::new(1, 3), d.mul(&Iv::new(0, 3)))
            }
        }
    }

    /// Bounds over the domain, or over no variables at all when `None`.
    pub fn bounds(&self, domain: Option<Domain>) -> Result<ExprBounds> {
        let ranges = match domain {
            None => vec![],
            Some(Domain::Unit) => vec![Iv::new(0, 1)],
            Some(Domain::Rect) => vec![Iv::new(0, 1), Iv::new(-1, 1)],
        };
        if (self.uses_t() && ranges.is_empty()) || (self.uses_y() && ranges.len() < 2) {
            return Err(SondaError::OutOfDomain(
                "expression uses a variable the domain does not have".into(),
            ));
        }
        let (v, dt) = self.interval(&ranges, 0);
        let (_, dy) = self.interval(&ranges, 1);
        Ok(ExprBounds {
            magnitude: v.abs_max().magnitude_bits().max(0) as u32,
            lip_t: dt.abs_max(),
            lip_y: dy.abs_max(),
        })
    }

    /// A function name on `domain`, with modulus `n + ceil(log2(L_t + L_y))`.
    pub fn to_cfun(&self, domain: Domain) -> Result<CFunName> {
        let b = self.bounds(Some(domain))?;
        let lip = &b.lip_t + &b.lip_y;
        let shift = lip.ceil_log2().map_or(0, |c| c.max(0) as usize);
        let mu = SizeFn::new(move |n| n + shift);
        let e = self.clone();
        Ok(make_cfun(domain, mu, b.magnitude + 1, move |k, pts| Ok(e.eval_approx(pts, k))))
    }

    /// Smallest integer Lipschitz constant in `y` the bounds certify, at least 1.
    pub fn lipschitz_y(&self) -> Result<u32> {
        let b = self.bounds(Some(Domain::Rect))?;
        let c = ceil_dyadic(&b.lip_y);
        Ok(u32::try_from(c).unwrap_or(u32::MAX).max(1))
    }

    pub fn to_lip(&self, lipschitz: Option<u32>) -> Result<LipName> {
        let l = match lipschitz {
            Some(l) => l,
            None => self.lipschitz_y()?,
        };
        make_lip_name(&self.to_cfun(Domain::Rect)?, l)
    }

    /// The real named by a closed expression, assembled from the real
    /// arithmetic operators.
    pub fn real_name(&self) -> Result<RealName> {
        self.bounds(None)?;
        Ok(self.build_real())
    }

    fn build_real(&self) -> RealName {
        match self {
            Const(c) => real_from_dyadic(c),
            T | Y => unreachable!("checked closed"),
            Add(a, b) => real_add(&a.build_real(), &b.build_real()),
            Sub(a, b) => real_sub(&a.build_real(), &b.build_real()),
            Mul(a, b) => real_mul(&a.build_real(), &b.build_real()),
            Neg(a) => real_neg(&a.build_real()),
            Sin(a) => real_sin(&a.build_real()),
            Exp01(a) => real_exp01(&a.build_real()),
        }
    }
}

fn ceil_dyadic(d: &Dyadic) -> i64 {
    let e = d.exponent();
    let one = BigInt::one() << e;
    let q = num_integer::Integer::div_ceil(d.numerator(), &one);
    i64::try_from(q).unwrap_or(i64::MAX)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_level(f, 0)
    }
}

impl Expr {
    // 0: sum operand on the left, 1: right of '-', 2: product factor
    fn fmt_level(&self, f: &mut fmt::Formatter<'_>, level: u8) -> fmt::Result {
        match self {
            Const(c) => {
                if c.is_negative() {
                    write!(f, "(-{})", literal(&c.abs()))
                } else {
                    write!(f, "{}", literal(c))
                }
            }
            T => write!(f, "t"),
            Y => write!(f, "y"),
            Add(a, b) | Sub(a, b) => {
                let op = if matches!(self, Add(..)) { '+' } else { '-' };
                if level > 0 {
                    write!(f, "(")?;
                }
                a.fmt_level(f, 0)?;
                write!(f, " {op} ")?;
                b.fmt_level(f, 1)?;
                if level > 0 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Mul(a, b) => {
                if level > 1 {
                    write!(f, "(")?;
                }
                a.fmt_level(f, 1)?;
                write!(f, " * ")?;
                b.fmt_level(f, 2)?;
                if level > 1 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Neg(a) => {
                write!(f, "-")?;
                a.fmt_level(f, 2)
            }
            Sin(a) => write!(f, "sin({a})"),
            Exp01(a) => write!(f, "exp01({a})"),
        }
    }
}

fn literal(c: &Dyadic) -> String {
    let c = c.normalized();
    if c.exponent() == 0 {
        c.numerator().to_string()
    } else {
        format!("{}/{}", c.numerator(), BigInt::one() << c.exponent())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(n: i64, e: u64) -> Dyadic {
        Dyadic::new(n, e)
    }

    fn val(src: &str) -> Dyadic {
        parse_expr(src).unwrap().eval_exact(&[]).unwrap()
    }

    #[test]
    fn literals() {
        assert_eq!(val("1/2 + 1/4"), d(3, 2));
        assert_eq!(val("1/100"), d(1, 2));
        assert_eq!(val("+11/10"), d(3, 1));
        assert_eq!(val("-11/10"), d(-3, 1));
        assert_eq!(val("0.375"), d(3, 3));
        assert_eq!(val("3/8"), d(3, 3));
        assert_eq!(val("11/1"), d(11, 0));
        assert_eq!(val("12"), d(12, 0));
        assert!(matches!(parse_expr("1/3"), Err(SondaError::Parse { pos: 0, .. })));
        assert!(matches!(parse_expr("0.1"), Err(SondaError::Parse { .. })));
        assert!(matches!(parse_expr("2 *"), Err(SondaError::Parse { pos: 3, .. })));
        assert!(matches!(parse_expr("cos(t)"), Err(SondaError::Parse { pos: 0, .. })));
        assert!(matches!(parse_expr("(t"), Err(SondaError::Parse { .. })));
    }

    #[test]
    fn precedence_and_display() {
        assert_eq!(val("1 - 2 - 3"), d(-4, 0));
        assert_eq!(val("2 * 3 + 4 * -1"), d(2, 0));
        assert_eq!(val("-(1 + 1) * 3"), d(-6, 0));
        for src in ["(y+1)*1/100", "t - (y - t) * t", "-t * sin(2*y) + exp01(t)", "1 - -1/2"] {
            let e = parse_expr(src).unwrap();
            assert_eq!(parse_expr(&e.to_string()).unwrap(), e, "{src} -> {e}");
        }
    }

    #[test]
    fn bounds_and_modulus() {
        let e = parse_expr("(y+1)*1/100").unwrap();
        let b = e.bounds(Some(Domain::Rect)).unwrap();
        assert_eq!(b.lip_y, d(1, 2));
        assert!(b.lip_t.is_zero());
        assert_eq!(b.magnitude, 0);
        assert_eq!(e.lipschitz_y().unwrap(), 1);
        let e = parse_expr("t*t").unwrap();
        let b = e.bounds(Some(Domain::Unit)).unwrap();
        assert_eq!(b.lip_t, d(2, 0));
        assert_eq!(b.magnitude, 1);
        assert!(matches!(parse_expr("y").unwrap().bounds(Some(Domain::Unit)), Err(SondaError::OutOfDomain(_))));
        let f = e.to_cfun(Domain::Unit).unwrap();
        assert_eq!(f.modulus(3).unwrap(), 4);
        let v = f.approx(10, &[d(3, 2)]).unwrap();
        assert!((&v - &d(9, 4)).abs() < Dyadic::pow2(-10));
    }

    #[test]
    fn approx_meets_precision() {
        let e = parse_expr("exp01(t) * sin(3*y) - t*t*y + 5").unwrap();
        for (t, y) in [(d(0, 0), d(1, 0)), (d(3, 3), d(-5, 4)), (d(1, 0), d(-1, 0))] {
            let pts = [t.clone(), y.clone()];
            let fine = e.eval_approx(&pts, 80);
            for k in [0u64, 5, 20, 40] {
                let v = e.eval_approx(&pts, k);
                assert!((&v - &fine).abs() < &Dyadic::pow2(-(k as i64)) + &Dyadic::pow2(-80));
            }
            let f = (t.to_f64().exp()) * (3.0 * y.to_f64()).sin() - t.to_f64().powi(2) * y.to_f64() + 5.0;
            assert!((fine.to_f64() - f).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_reals() {
        let r = parse_expr("1/2 + 1/4").unwrap().real_name().unwrap();
        let v = r.approx(10).unwrap();
        assert!((&v - &d(3, 2)).abs() < Dyadic::pow2(-10));
        let r = parse_expr("sin(1) * exp01(1/2)").unwrap().real_name().unwrap();
        let v = r.approx(30).unwrap().to_f64();
        assert!((v - 1f64.sin() * 0.5f64.exp()).abs() < 1e-9);
        assert!(matches!(parse_expr("t").unwrap().real_name(), Err(SondaError::OutOfDomain(_))));
    }
}
