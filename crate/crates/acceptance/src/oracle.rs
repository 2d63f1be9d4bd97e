//! Reference computations written without the library's own numerics.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn pow2(e: i64) -> Q {
    if e >= 0 {
        Q::from_integer(BigInt::one() << e as usize)
    } else {
        Q::new(BigInt::one(), BigInt::one() << (-e) as usize)
    }
}

/// Reads `s bits/1 0^k` character by character.
pub fn decode(s: &str) -> Option<Q> {
    let mut chars = s.chars();
    let neg = match chars.next()? {
        '+' => false,
        '-' => true,
        _ => return None,
    };
    let rest: String = chars.collect();
    let (bits, den) = rest.split_once('/')?;
    let mut num = BigInt::zero();
    for c in bits.chars() {
        num = num * 2
            + match c {
                '0' => 0,
                '1' => 1,
                _ => return None,
            };
    }
    let mut dc = den.chars();
    if dc.next()? != '1' || !dc.clone().all(|c| c == '0') {
        return None;
    }
    let k = dc.count();
    let v = Q::new(num, BigInt::one() << k);
    Some(if neg { -v } else { v })
}

pub fn dyadic_to_q(d: &sonda::Dyadic) -> Q {
    Q::new(d.numerator().clone(), BigInt::one() << d.exponent() as usize)
}

/// `sum_{j<=K} x^j / j!` and a bound on the tail, for `|x| <= 4`.
pub fn exp_series(x: &Q, tail_exp: u32) -> (Q, Q) {
    let target = pow2(-(tail_exp as i64));
    let mut sum = Q::zero();
    let mut term = Q::one();
    let mut j = 0u64;
    loop {
        sum += &term;
        j += 1;
        term = &term * x / Q::from_integer(BigInt::from(j));
        // |x| <= 4 and j >= 8: the tail after this term is below 2 |term|
        if j >= 8 && term.abs() * Q::from_integer(2.into()) < target {
            return (sum, term.abs() * Q::from_integer(2.into()));
        }
    }
}

/// Taylor sine with the alternating-series tail bound.
pub fn sin_series(x: &Q, tail_exp: u32) -> (Q, Q) {
    let target = pow2(-(tail_exp as i64));
    let x2 = x * x;
    let mut sum = Q::zero();
    let mut term = x.clone();
    let mut j = 1u64;
    loop {
        sum += &term;
        term = -(&term * &x2) / Q::from_integer(BigInt::from((2 * j) * (2 * j + 1)));
        j += 1;
        // past the peak the omitted tail is below its first term
        let decreasing = Q::from_integer(BigInt::from((2 * j) * (2 * j + 1))) > x2;
        if decreasing && term.abs() < target {
            return (sum, term.abs());
        }
    }
}

/// Whether `|a - b| + slack < 2^-n`.
pub fn close(a: &Q, b: &Q, slack: &Q, n: i64) -> bool {
    (a - b).abs() + slack < pow2(-n)
}

/// Distance from a point to the convex hull of a finite set, compared with
/// thresholds, on an integer grid of pitch `2^-scale`.
pub struct HullOracle {
    pts: Vec<(i128, i128)>,
    pub scale: u32,
}

/// Squared distance as `num / den` in grid units.
#[derive(Clone, Copy, Debug)]
pub struct Frac {
    pub num: i128,
    pub den: i128,
}

impl HullOracle {
    pub fn new(pts: Vec<(i128, i128)>, scale: u32) -> Self {
        HullOracle { pts, scale }
    }

    fn cross(o: (i128, i128), a: (i128, i128), b: (i128, i128)) -> i128 {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    }

    fn in_triangle(p: (i128, i128), a: (i128, i128), b: (i128, i128), c: (i128, i128)) -> bool {
        let s = Self::cross(a, b, c).signum();
        if s == 0 {
            return false;
        }
        [(a, b), (b, c), (c, a)]
            .iter()
            .all(|&(u, v)| Self::cross(u, v, p).signum() * s >= 0)
    }

    fn seg(p: (i128, i128), a: (i128, i128), b: (i128, i128)) -> Frac {
        let (abx, aby) = (b.0 - a.0, b.1 - a.1);
        let (apx, apy) = (p.0 - a.0, p.1 - a.1);
        let len2 = abx * abx + aby * aby;
        let dot = apx * abx + apy * aby;
        if len2 == 0 || dot <= 0 {
            return Frac { num: apx * apx + apy * apy, den: 1 };
        }
        if dot >= len2 {
            let (bx, by) = (p.0 - b.0, p.1 - b.1);
            return Frac { num: bx * bx + by * by, den: 1 };
        }
        let c = abx * apy - aby * apx;
        Frac { num: c * c, den: len2 }
    }

    /// Squared distance by Caratheodory: every hull point lies in a
    /// triangle, on a segment, or at a point of the set.
    pub fn dist2(&self, p: (i128, i128)) -> Frac {
        let n = self.pts.len();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    if Self::in_triangle(p, self.pts[i], self.pts[j], self.pts[k]) {
                        return Frac { num: 0, den: 1 };
                    }
                }
            }
        }
        let mut best = Frac {
            num: self.pts.iter().map(|&a| Self::seg(p, a, a).num).min().expect("nonempty"),
            den: 1,
        };
        for i in 0..n {
            for j in i + 1..n {
                let f = Self::seg(p, self.pts[i], self.pts[j]);
                if f.num * best.den < best.num * f.den {
                    best = f;
                }
            }
        }
        best
    }

    /// Compares the distance with `2^-e` times `k`.
    pub fn cmp(&self, d: Frac, k: i128, e: u32) -> std::cmp::Ordering {
        // num / (den 4^scale)  vs  k^2 / 4^e
        let lhs = d.num << (2 * e);
        let rhs = (k * k * d.den) << (2 * self.scale);
        lhs.cmp(&rhs)
    }
}

/// Deterministic pseudo-random bit of a string, used as a predicate table.
pub fn hash_bit(seed: u64, s: &str) -> bool {
    let mut h = seed ^ 0x9E37_79B9_7F4A_7C15;
    for b in s.bytes().chain(std::iter::once(0xff)) {
        h ^= b as u64;
        h = h.wrapping_mul(0x100_0000_01B3);
        h ^= h >> 29;
    }
    h = h.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    (h >> 31) & 1 == 1
}

/// Tuple encoding written out: each symbol doubled, each part closed by `01`.
pub fn tuple(parts: &[&str]) -> String {
    let mut s = String::new();
    for p in parts {
        for c in p.chars() {
            s.push(c);
            s.push(c);
        }
        s.push_str("01");
    }
    s
}

/// Boolean formulas with their own evaluator.
#[derive(Clone, Debug)]
pub enum F {
    Const(bool),
    Var(u32),
    Not(Box<F>),
    And(Box<F>, Box<F>),
    Or(Box<F>, Box<F>),
    P(Vec<F>),
}

impl F {
    pub fn eval(&self, a: &dyn Fn(u32) -> bool, p: &dyn Fn(&str) -> bool) -> bool {
        match self {
            F::Const(b) => *b,
            F::Var(i) => a(*i),
            F::Not(x) => !x.eval(a, p),
            F::And(x, y) => x.eval(a, p) & y.eval(a, p),
            F::Or(x, y) => x.eval(a, p) | y.eval(a, p),
            F::P(args) => {
                let bits: String = args.iter().map(|x| if x.eval(a, p) { '1' } else { '0' }).collect();
                p(&bits)
            }
        }
    }

    /// Fully parenthesized text; `unicode` picks the alternative symbols.
    pub fn text(&self, unicode: bool) -> String {
        let (and, or, not) = if unicode { ("∧", "∨", "¬") } else { ("&", "|", "!") };
        match self {
            F::Const(b) => (*b as u8).to_string(),
            F::Var(i) => format!("a{i}"),
            F::Not(x) => format!("{not}{}", x.text(unicode)),
            F::And(x, y) => format!("({} {and} {})", x.text(unicode), y.text(unicode)),
            F::Or(x, y) => format!("({} {or} {})", x.text(unicode), y.text(unicode)),
            F::P(args) => {
                let inner: Vec<String> = args.iter().map(|x| x.text(unicode)).collect();
                format!("p({})", inner.join(", "))
            }
        }
    }

    pub fn vars(&self, out: &mut Vec<u32>) {
        match self {
            F::Const(_) => {}
            F::Var(i) => {
                if !out.contains(i) {
                    out.push(*i)
                }
            }
            F::Not(x) => x.vars(out),
            F::And(x, y) | F::Or(x, y) => {
                x.vars(out);
                y.vars(out);
            }
            F::P(args) => args.iter().for_each(|x| x.vars(out)),
        }
    }
}

/// Truth value of `Q1 a_i1 ... Qk a_ik. f` by full truth tables: the
/// assignment table of every variable is enumerated and quantifiers are
/// folded from the inside out. Unbound variables are read existentially.
pub fn qbf_truth(prefix: &[(bool, u32)], f: &F, p: &dyn Fn(&str) -> bool) -> bool {
    let mut vars = Vec::new();
    f.vars(&mut vars);
    let mut order: Vec<(bool, u32)> = vars
        .iter()
        .filter(|v| !prefix.iter().any(|(_, b)| b == *v))
        .map(|&v| (false, v))
        .collect();
    order.extend_from_slice(prefix);
    // later bindings of the same variable shadow earlier ones
    let k = order.len();
    let mut table: Vec<bool> = (0..1usize << k)
        .map(|mask| {
            let val = |v: u32| {
                let idx = order.iter().rposition(|(_, b)| *b == v);
                idx.is_some_and(|i| mask >> (k - 1 - i) & 1 == 1)
            };
            f.eval(&val, p)
        })
        .collect();
    for i in (0..k).rev() {
        let forall = order[i].0;
        table = table
            .chunks(2)
            .map(|c| if forall { c[0] & c[1] } else { c[0] | c[1] })
            .collect();
    }
    table[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn decode_examples() {
        assert_eq!(decode("+1/10"), Some(q(1, 2)));
        assert_eq!(decode("-101/1"), Some(q(-5, 1)));
        assert_eq!(decode("+/1"), Some(q(0, 1)));
        assert_eq!(decode("1/1"), None);
        assert_eq!(decode("+1/01"), None);
    }

    #[test]
    fn series_against_f64() {
        let (e, err) = exp_series(&q(1, 2), 100);
        assert!(err < pow2(-100));
        assert!((e.to_f64().unwrap() - 0.5f64.exp()).abs() < 1e-15);
        let (s, _) = sin_series(&q(3, 1), 100);
        let approx = s * Q::from_integer(BigInt::from(1_000_000_000_000i64));
        assert_eq!(approx.to_integer(), BigInt::from(141_120_008_059i64));
    }

    #[test]
    fn truth_tables() {
        let x = F::Var(1);
        let y = F::Var(2);
        let xor = |s: &str| s == "01" || s == "10";
        let f = F::P(vec![x.clone(), y.clone()]);
        assert!(qbf_truth(&[(true, 1), (false, 2)], &f, &xor));
        assert!(!qbf_truth(&[(false, 2), (true, 1)], &f, &xor));
        let c = F::And(Box::new(x.clone()), Box::new(F::Not(Box::new(x))));
        assert!(!qbf_truth(&[], &c, &xor));
    }

    #[test]
    fn hull_oracle_triangle() {
        let o = HullOracle::new(vec![(0, 0), (4, 0), (0, 4)], 2);
        assert_eq!(o.dist2((1, 1)).num, 0);
        let d = o.dist2((4, 4));
        // distance sqrt(8) grid units, i.e. sqrt(2)/2
        assert_eq!(o.cmp(d, 1, 0), std::cmp::Ordering::Less);
        assert_eq!(o.cmp(d, 3, 2), std::cmp::Ordering::Less);
        assert_eq!(o.cmp(d, 1, 1), std::cmp::Ordering::Greater);
    }
}
