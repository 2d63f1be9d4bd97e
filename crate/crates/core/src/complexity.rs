//! Brute-force deciders for the second-order complete problems and the
//! wiring combinators for reductions between name-level problems.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::encoding::{tuple_strings, untuple_exact};
use crate::error::{Result, SondaError};
use crate::names::{pair, Name, PredName};
use crate::sopoly::Meter;

/// Limits on the exhaustive searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Longest witness searched by `exist2`.
    pub exist_len: usize,
    /// Most distinct variables in a formula.
    pub vars: usize,
    /// Longest input accepted by `power2`.
    pub power_len: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            exist_len: 20,
            vars: 20,
            power_len: 24,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Const(bool),
    Var(u32),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Pred(Vec<Formula>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quant {
    Forall,
    Exists,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QbFormula {
    pub prefix: Vec<(Quant, u32)>,
    pub matrix: Formula,
}

impl Formula {
    pub fn vars(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<u32>) {
        match self {
            Formula::Const(_) => {}
            Formula::Var(i) => {
                out.insert(*i);
            }
            Formula::Not(a) => a.collect_vars(out),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::Pred(args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Truth value under `assign`, querying `p` on the concatenated argument
    /// bits at every predicate application.
    pub fn eval(&self, p: &PredName, assign: &HashMap<u32, bool>) -> Result<bool> {
        Ok(match self {
            Formula::Const(b) => *b,
            Formula::Var(i) => assign.get(i).copied().unwrap_or(false),
            Formula::Not(a) => !a.eval(p, assign)?,
            Formula::And(a, b) => a.eval(p, assign)? && b.eval(p, assign)?,
            Formula::Or(a, b) => a.eval(p, assign)? || b.eval(p, assign)?,
            Formula::Pred(args) => {
                let mut bits = String::with_capacity(args.len());
                for a in args {
                    bits.push(if a.eval(p, assign)? { '1' } else { '0' });
                }
                p.test(&bits)?
            }
        })
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, level: u8) -> fmt::Result {
        // level: 0 inside |, 1 inside &, 2 under !
        match self {
            Formula::Const(b) => write!(f, "{}", *b as u8),
            Formula::Var(i) => write!(f, "a{i}"),
            Formula::Not(a) => {
                write!(f, "!")?;
                a.fmt_prec(f, 2)
            }
            Formula::And(a, b) => {
                if level > 1 {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, 1)?;
                write!(f, " & ")?;
                b.fmt_prec(f, 2)?;
                if level > 1 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Formula::Or(a, b) => {
                if level > 0 {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, 0)?;
                write!(f, " | ")?;
                b.fmt_prec(f, 1)?;
                if level > 0 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Formula::Pred(args) => {
                write!(f, "p(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    a.fmt_prec(f, 0)?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl fmt::Display for QbFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (q, v) in &self.prefix {
            let c = match q {
                Quant::Forall => 'A',
                Quant::Exists => 'E',
            };
            write!(f, "{c} a{v}. ")?;
        }
        write!(f, "{}", self.matrix)
    }
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    at: usize,
    len: usize,
    _src: &'a str,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            chars: src.char_indices().collect(),
            at: 0,
            len: src.len(),
            _src: src,
        }
    }

    fn pos(&self) -> usize {
        self.chars.get(self.at).map_or(self.len, |c| c.0)
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.at).is_some_and(|c| c.1.is_whitespace()) {
            self.at += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.at).map(|c| c.1)
    }

    fn eat(&mut self, want: &[char]) -> bool {
        match self.peek() {
            Some(c) if want.contains(&c) => {
                self.at += 1;
                true
            }
            _ => false,
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(SondaError::parse(self.pos(), msg))
    }

    fn var(&mut self) -> Result<u32> {
        if !self.eat(&['a']) {
            return self.err("expected a variable");
        }
        let start = self.at;
        while self.chars.get(self.at).is_some_and(|c| c.1.is_ascii_digit()) {
            self.at += 1;
        }
        let digits: String = self.chars[start..self.at].iter().map(|c| c.1).collect();
        match digits.parse::<u32>() {
            Ok(i) if i >= 1 => Ok(i),
            _ => {
                self.at = start;
                self.err("variable index must be a positive integer")
            }
        }
    }

    fn prefix(&mut self) -> Result<Vec<(Quant, u32)>> {
        let mut out = Vec::new();
        loop {
            let q = match self.peek() {
                Some('A') | Some('∀') => Quant::Forall,
                Some('E') | Some('∃') => Quant::Exists,
                _ => return Ok(out),
            };
            self.at += 1;
            let v = self.var()?;
            self.eat(&['.']);
            out.push((q, v));
        }
    }

    fn or(&mut self) -> Result<Formula> {
        let mut lhs = self.and()?;
        while self.eat(&['|', '∨']) {
            lhs = Formula::Or(Box::new(lhs), Box::new(self.and()?));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut lhs = self.unary()?;
        while self.eat(&['&', '∧']) {
            lhs = Formula::And(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.eat(&['!', '¬']) {
            return Ok(Formula::Not(Box::new(self.unary()?)));
        }
        match self.peek() {
            Some('(') => {
                self.at += 1;
                let f = self.or()?;
                if !self.eat(&[')']) {
                    return self.err("expected ')'");
                }
                Ok(f)
            }
            Some('0') | Some('1') => {
                let b = self.peek() == Some('1');
                self.at += 1;
                Ok(Formula::Const(b))
            }
            Some('a') => Ok(Formula::Var(self.var()?)),
            Some('p') => {
                self.at += 1;
                if !self.eat(&['(']) {
                    return self.err("expected '(' after p");
                }
                let mut args = vec![self.or()?];
                while self.eat(&[',']) {
                    args.push(self.or()?);
                }
                if !self.eat(&[')']) {
                    return self.err("expected ')' or ','");
                }
                Ok(Formula::Pred(args))
            }
            Some(c) => self.err(format!("unexpected {c:?}")),
            None => self.err("unexpected end of formula"),
        }
    }

    fn finish(&mut self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(c) => self.err(format!("trailing {c:?}")),
        }
    }
}

pub fn parse_formula(src: &str) -> Result<Formula> {
    let mut p = Parser::new(src);
    let f = p.or()?;
    p.finish()?;
    Ok(f)
}

pub fn parse_qbf(src: &str) -> Result<QbFormula> {
    let mut p = Parser::new(src);
    let prefix = p.prefix()?;
    let matrix = p.or()?;
    p.finish()?;
    Ok(QbFormula { prefix, matrix })
}

fn check_vars(count: usize, caps: &Caps) -> Result<()> {
    if count > caps.vars {
        return Err(SondaError::CapExceeded {
            what: "formula variables",
            value: count,
            cap: caps.vars,
        });
    }
    Ok(())
}

/// 1 iff some assignment satisfies the formula with `p` substituted.
pub fn sat2(p: &PredName, formula: &str, caps: &Caps) -> Result<bool> {
    let f = parse_formula(formula)?;
    let q = QbFormula {
        prefix: f.vars().into_iter().map(|v| (Quant::Exists, v)).collect(),
        matrix: f,
    };
    qbf_eval(p, &q, caps)
}

/// Truth value of a quantified formula; variables free in the matrix are
/// closed existentially outside the written prefix.
pub fn qbf2(p: &PredName, formula: &str, caps: &Caps) -> Result<bool> {
    qbf_eval(p, &parse_qbf(formula)?, caps)
}

pub fn qbf_eval(p: &PredName, q: &QbFormula, caps: &Caps) -> Result<bool> {
    let bound: BTreeSet<u32> = q.prefix.iter().map(|b| b.1).collect();
    let free: Vec<u32> = q.matrix.vars().difference(&bound).copied().collect();
    check_vars(bound.len() + free.len(), caps)?;
    let mut prefix: Vec<(Quant, u32)> = free.into_iter().map(|v| (Quant::Exists, v)).collect();
    prefix.extend_from_slice(&q.prefix);
    let mut assign = HashMap::new();
    quantify(p, &prefix, &q.matrix, &mut assign)
}

fn quantify(p: &PredName, prefix: &[(Quant, u32)], matrix: &Formula, assign: &mut HashMap<u32, bool>) -> Result<bool> {
    let Some((&(q, v), rest)) = prefix.split_first() else {
        return matrix.eval(p, assign);
    };
    let saved = assign.get(&v).copied();
    let mut result = q == Quant::Forall;
    for b in [false, true] {
        assign.insert(v, b);
        let r = quantify(p, rest, matrix, assign)?;
        if r != result {
            result = r;
            break;
        }
    }
    match saved {
        Some(s) => assign.insert(v, s),
        None => assign.remove(&v),
    };
    Ok(result)
}

fn bits_of(mut x: u64, len: usize) -> String {
    let mut s = vec![b'0'; len];
    for i in (0..len).rev() {
        s[i] = b'0' + (x & 1) as u8;
        x >>= 1;
    }
    String::from_utf8(s).expect("ascii")
}

/// 1 iff `p(tuple(u, v)) = 1` for some binary `v` of length `n`.
pub fn exist2(p: &PredName, u: &str, n: usize, caps: &Caps) -> Result<bool> {
    if n > caps.exist_len {
        return Err(SondaError::CapExceeded {
            what: "witness length",
            value: n,
            cap: caps.exist_len,
        });
    }
    for x in 0..1u64 << n {
        if p.test(&tuple_strings(&[u, &bits_of(x, n)]))? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// 1 iff `f` iterated `2^|u|` times maps `u` to `0^|u|`.
pub fn power2(f: &Name, u: &str, caps: &Caps) -> Result<bool> {
    let k = u.len();
    if k > caps.power_len {
        return Err(SondaError::CapExceeded {
            what: "power input length",
            value: k,
            cap: caps.power_len,
        });
    }
    for len in 0..=k {
        let got = f.size_of(len)?;
        if got != len {
            return Err(SondaError::NotLengthPreserving(format!(
                "|f|({len}) = {got}"
            )));
        }
    }
    let mut x = u.to_string();
    for _ in 0..1u64 << k {
        x = f.query(&x)?;
        if x.len() != k {
            return Err(SondaError::NotLengthPreserving(format!(
                "answer of length {} on input of length {k}",
                x.len()
            )));
        }
    }
    Ok(x.bytes().all(|b| b == b'0'))
}

/// `EXIST²(p)` as a predicate on `(u, 0^n)`; other queries answer 0.
pub fn exist2_name(p: &PredName, caps: Caps) -> PredName {
    let p = p.clone();
    pred_with(move |q| match untuple_exact(q, 2) {
        Ok(parts) if parts[1].bytes().all(|b| b == b'0') => exist2(&p, &parts[0], parts[1].len(), &caps),
        _ => Ok(false),
    })
}

/// `SAT²(p)`; queries that do not parse answer 0.
pub fn sat2_name(p: &PredName, caps: Caps) -> PredName {
    let p = p.clone();
    pred_with(move |q| match parse_formula(q) {
        Ok(_) => sat2(&p, q, &caps),
        Err(_) => Ok(false),
    })
}

pub fn qbf2_name(p: &PredName, caps: Caps) -> PredName {
    let p = p.clone();
    pred_with(move |q| match parse_qbf(q) {
        Ok(f) => qbf_eval(&p, &f, &caps),
        Err(_) => Ok(false),
    })
}

pub fn power2_name(f: &Name, caps: Caps) -> PredName {
    let f = f.clone();
    pred_with(move |u| power2(&f, u, &caps))
}

fn pred_with(f: impl Fn(&str) -> Result<bool> + Send + Sync + 'static) -> PredName {
    PredName::new(Name::with_size(
        move |u| Ok(if f(u)? { "1" } else { "0" }.to_string()),
        crate::names::SizeFn::constant(1),
    ))
}

fn ones(w: &str) -> usize {
    w.bytes().filter(|&b| b == b'1').count()
}

/// Named predicates for the command line. `eq` compares the two parts of a
/// 2-tuple, or the two halves of any other even-length string.
pub fn builtin_predicate(name: &str) -> Option<PredName> {
    let f: fn(&str) -> bool = match name {
        "false" => |_| false,
        "true" => |_| true,
        "id" => |w| w.ends_with('1'),
        "and" => |w| !w.contains('0'),
        "or" => |w| w.contains('1'),
        "xor" | "odd" => |w| ones(w) % 2 == 1,
        "parity" | "even" => |w| ones(w).is_multiple_of(2),
        "majority" => |w| 2 * ones(w) > w.len(),
        "eq" => |w| match untuple_exact(w, 2) {
            Ok(p) => p[0] == p[1],
            Err(_) => w.len() % 2 == 0 && w[..w.len() / 2] == w[w.len() / 2..],
        },
        _ => return None,
    };
    Some(PredName::from_fn(f))
}

pub const BUILTIN_PREDICATES: &[&str] = &["false", "true", "id", "and", "or", "xor", "parity", "majority", "eq"];

/// Lines of `bitstring bit`; a lone bit is the value at the empty string.
/// Strings not listed answer 0.
pub fn table_predicate(text: &str) -> Result<PredName> {
    let mut table = HashMap::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let start = offset;
        offset += line.len();
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        let (key, bit) = match fields.as_slice() {
            [bit] => ("", *bit),
            [key, bit] => (*key, *bit),
            _ => return Err(SondaError::parse(start, "expected `bitstring bit`")),
        };
        if !key.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(SondaError::parse(start, "key is not a bit string"));
        }
        let v = match bit {
            "0" => false,
            "1" => true,
            _ => return Err(SondaError::parse(start, "value must be 0 or 1")),
        };
        table.insert(key.to_string(), v);
    }
    Ok(PredName::from_fn(move |w| table.get(w).copied().unwrap_or(false)))
}

/// Length-preserving maps for `power2`.
pub fn builtin_function(name: &str) -> Option<Name> {
    let f: fn(&str) -> String = match name {
        "id" => |u| u.to_string(),
        "zero" => |u| "0".repeat(u.len()),
        "inc" => increment,
        "dec" => |u| {
            let mut b = u.as_bytes().to_vec();
            for c in b.iter_mut().rev() {
                if *c == b'1' {
                    *c = b'0';
                    break;
                }
                *c = b'1';
            }
            String::from_utf8(b).expect("ascii")
        },
        _ => return None,
    };
    Some(Name::with_size(move |u| Ok(f(u)), crate::names::SizeFn::identity()))
}

/// Binary increment modulo `2^|u|`, most significant bit first.
pub fn increment(u: &str) -> String {
    let mut b = u.as_bytes().to_vec();
    for c in b.iter_mut().rev() {
        if *c == b'0' {
            *c = b'1';
            break;
        }
        *c = b'0';
    }
    String::from_utf8(b).expect("ascii")
}

/// A name-to-name map, the shape of every problem and converter here.
pub type Problem = Arc<dyn Fn(&Name) -> Result<Name> + Send + Sync>;

pub fn problem(f: impl Fn(&Name) -> Result<Name> + Send + Sync + 'static) -> Problem {
    Arc::new(f)
}

/// Many-one: `A(phi)(x) = theta(t(phi)(x))` with `theta = B(s(phi))`.
pub fn reduce_m2(s: Problem, t: Problem, b: Problem) -> Problem {
    problem(move |phi| {
        let theta = b(&s(phi)?)?;
        let t_phi = t(phi)?;
        Ok(Name::new(move |x| theta.query(&t_phi.query(x)?)))
    })
}

/// Many-one with post-processing: `A(phi)(x) = r(phi)(x, theta(t(phi)(x)))`,
/// the two arguments of `r(phi)` passed as a 2-tuple.
pub fn reduce_mf2(r: Problem, s: Problem, t: Problem, b: Problem) -> Problem {
    problem(move |phi| {
        let theta = b(&s(phi)?)?;
        let t_phi = t(phi)?;
        let r_phi = r(phi)?;
        Ok(Name::new(move |x| {
            let y = theta.query(&t_phi.query(x)?)?;
            r_phi.query(&tuple_strings(&[x, &y]))
        }))
    })
}

/// Weihrauch: `A(phi) = r(<phi, B(s(phi))>)`.
pub fn reduce_w2(r: Problem, s: Problem, b: Problem) -> Problem {
    problem(move |phi| {
        let psi = b(&s(phi)?)?;
        r(&pair(phi, &psi))
    })
}

/// Routes every query to the input name through `meter`.
pub fn metered(a: Problem, meter: Meter) -> Problem {
    problem(move |phi| a(&meter.wrap(phi)))
}

pub fn identity_problem() -> Problem {
    problem(|phi| Ok(phi.clone()))
}

/// Applies a translation to a name.
pub fn translate(f: &Problem, name: &Name) -> Result<Name> {
    f(name)
}

/// `g` after `f`.
pub fn compose(f: Problem, g: Problem) -> Problem {
    problem(move |phi| g(&f(phi)?))
}

/// Problems over predicate names, for use with the combinators.
pub fn exist2_problem(caps: Caps) -> Problem {
    problem(move |phi| Ok(exist2_name(&PredName::new(phi.clone()), caps).name().clone()))
}

pub fn qbf2_problem(caps: Caps) -> Problem {
    problem(move |phi| Ok(qbf2_name(&PredName::new(phi.clone()), caps).name().clone()))
}

pub fn sat2_problem(caps: Caps) -> Problem {
    problem(move |phi| Ok(sat2_name(&PredName::new(phi.clone()), caps).name().clone()))
}

/// The formula `E a1 ... E an. p(<bits of tuple(u, a1..an)>)`.
pub fn exist_as_qbf(u: &str, n: usize) -> QbFormula {
    let mut args = Vec::new();
    for c in u.chars() {
        let b = Formula::Const(c == '1');
        args.push(b.clone());
        args.push(b);
    }
    let sep = [Formula::Const(false), Formula::Const(true)];
    args.extend_from_slice(&sep);
    for i in 1..=n as u32 {
        args.push(Formula::Var(i));
        args.push(Formula::Var(i));
    }
    args.extend_from_slice(&sep);
    QbFormula {
        prefix: (1..=n as u32).map(|i| (Quant::Exists, i)).collect(),
        matrix: Formula::Pred(args),
    }
}

/// `EXIST²` reduced to `QBF²`: `s` is the identity, `t` writes the formula.
pub fn exist2_via_qbf2(caps: Caps) -> Problem {
    let t = problem(|_| {
        Ok(Name::from_fn(|x| match untuple_exact(x, 2) {
            Ok(parts) if parts[1].bytes().all(|b| b == b'0') => exist_as_qbf(&parts[0], parts[1].len()).to_string(),
            _ => "0".into(),
        }))
    });
    reduce_m2(identity_problem(), t, qbf2_problem(caps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::unary;

    fn caps() -> Caps {
        Caps::default()
    }

    fn pred(name: &str) -> PredName {
        builtin_predicate(name).unwrap()
    }

    #[test]
    fn exist_examples() {
        assert!(exist2(&pred("eq"), "0110", 4, &caps()).unwrap());
        assert!(!exist2(&pred("false"), "01", 3, &caps()).unwrap());
        let odd_v = PredName::from_fn(|w| {
            let p = untuple_exact(w, 2).unwrap();
            ones(&p[1]) % 2 == 1
        });
        assert!(exist2(&odd_v, "", 3, &caps()).unwrap());
        let count = (0..8u64)
            .filter(|&x| odd_v.test(&tuple_strings(&["", &bits_of(x, 3)])).unwrap())
            .count();
        assert_eq!(count, 4);
        assert!(matches!(
            exist2(&odd_v, "", 21, &caps()),
            Err(SondaError::CapExceeded { .. })
        ));
    }

    #[test]
    fn sat_examples() {
        for name in BUILTIN_PREDICATES {
            assert!(!sat2(&pred(name), "a1 ∧ ¬a1", &caps()).unwrap());
        }
        assert!(sat2(&pred("id"), "p(a1)", &caps()).unwrap());
        assert!(!sat2(&pred("and"), "p(a1,a2) & !a1", &caps()).unwrap());
        assert!(sat2(&pred("and"), "p(a1,a2) & a1", &caps()).unwrap());
        let many: Vec<String> = (1..=21).map(|i| format!("a{i}")).collect();
        assert!(matches!(
            sat2(&pred("true"), &many.join(" | "), &caps()),
            Err(SondaError::CapExceeded { .. })
        ));
    }

    #[test]
    fn qbf_examples() {
        assert!(qbf2(&pred("xor"), "∀a1.∃a2. p(a1,a2)", &caps()).unwrap());
        assert!(!qbf2(&pred("xor"), "E a2. A a1. p(a1,a2)", &caps()).unwrap());
        assert!(!qbf2(&pred("true"), "∃a1.∀a2. a1 ∧ a2", &caps()).unwrap());
        // free variables close existentially
        for src in ["a1 & !a2", "p(a1) & a2", "a1 & !a1"] {
            assert_eq!(
                qbf2(&pred("id"), src, &caps()).unwrap(),
                sat2(&pred("id"), src, &caps()).unwrap()
            );
        }
        assert!(qbf2(&pred("id"), "A a1. a1 | a2", &caps()).is_ok());
        assert!(!qbf2(&pred("id"), "A a1. a1 & a2", &caps()).unwrap());
    }

    #[test]
    fn parse_errors_and_round_trip() {
        assert!(matches!(parse_formula("a1 &"), Err(SondaError::Parse { pos: 4, .. })));
        assert!(matches!(parse_formula("a0"), Err(SondaError::Parse { pos: 1, .. })));
        assert!(matches!(parse_formula("p()"), Err(SondaError::Parse { pos: 2, .. })));
        assert!(matches!(parse_formula("(a1"), Err(SondaError::Parse { .. })));
        assert!(matches!(parse_qbf("A a1 a1 )"), Err(SondaError::Parse { pos: 8, .. })));
        for src in [
            "a1 | a2 & !a3",
            "(a1 | a2) & a3",
            "!(a1 & a2) | p(a1, 0, !a3 | a2)",
            "a1 & (a2 & a3)",
            "a1 | (a2 | a3)",
        ] {
            let f = parse_formula(src).unwrap();
            assert_eq!(parse_formula(&f.to_string()).unwrap(), f, "{src}");
        }
        let q = parse_qbf("∀a1. ∃a2. p(a1,a2) ∨ ¬a1").unwrap();
        assert_eq!(parse_qbf(&q.to_string()).unwrap(), q);
    }

    #[test]
    fn power_examples() {
        let id = builtin_function("id").unwrap();
        let inc = builtin_function("inc").unwrap();
        assert!(power2(&id, "000", &caps()).unwrap());
        assert!(!power2(&id, "01", &caps()).unwrap());
        for k in 0..=8usize {
            for x in 0..1u64 << k {
                let u = bits_of(x, k);
                assert_eq!(power2(&inc, &u, &caps()).unwrap(), x == 0);
            }
        }
        let dec = builtin_function("dec").unwrap();
        assert_eq!(dec.query("100").unwrap(), "011");
        assert_eq!(increment("011"), "100");
        assert_eq!(increment("111"), "000");
        let grow = Name::from_fn(|u| format!("{u}0"));
        assert!(matches!(power2(&grow, "01", &caps()), Err(SondaError::NotLengthPreserving(_))));
        assert!(matches!(power2(&id, &unary(25), &caps()), Err(SondaError::CapExceeded { .. })));
    }

    #[test]
    fn table_predicates() {
        let p = table_predicate("# xor on two bits\n01 1\n10 1\n0\n").unwrap();
        assert!(p.test("01").unwrap());
        assert!(!p.test("11").unwrap());
        assert!(!p.test("").unwrap());
        assert!(matches!(table_predicate("01 2\n"), Err(SondaError::Parse { .. })));
        assert!(matches!(table_predicate("0x 1\n"), Err(SondaError::Parse { .. })));
    }

    #[test]
    fn reductions_wire_as_specified() {
        let id = identity_problem();
        let tid = problem(|_| Ok(crate::names::identity_name()));
        let b = exist2_problem(caps());
        let a = reduce_m2(id.clone(), tid.clone(), b.clone());
        let phi = pred("eq").name().clone();
        let direct = b(&phi).unwrap();
        let wired = a(&phi).unwrap();
        for u in ["", "0", "1011"] {
            for n in 0..5 {
                let q = tuple_strings(&[u, &unary(n)]);
                assert_eq!(direct.query(&q).unwrap(), wired.query(&q).unwrap());
            }
        }
        // r ignores theta
        let r = problem(|_| Ok(Name::from_fn(|x| untuple_exact(x, 2).unwrap()[0].clone())));
        let boom = problem(|_| Ok(Name::new(|_| Err(SondaError::EmptySet))));
        let a = reduce_mf2(r.clone(), id.clone(), tid.clone(), problem(|phi| Ok(phi.clone())));
        assert_eq!(a(&phi).unwrap().query("0110").unwrap(), "0110");
        let a = reduce_mf2(r, id.clone(), tid, boom);
        assert!(a(&phi).unwrap().query("0").is_err());
        // Weihrauch: r reads the second component of the pair
        let r = problem(|pp| Ok(crate::names::project(crate::names::Side::Right, pp)));
        let a = reduce_w2(r, id.clone(), b.clone());
        let q = tuple_strings(&["10", &unary(2)]);
        assert_eq!(
            crate::names::strip_padding(&a(&phi).unwrap().query(&q).unwrap()),
            direct.query(&q).unwrap()
        );
    }

    #[test]
    fn exist_reduces_to_qbf() {
        let via = exist2_via_qbf2(caps());
        for name in BUILTIN_PREDICATES {
            let p = pred(name);
            let direct = exist2_name(&p, caps());
            let wired = via(p.name()).unwrap();
            for u in ["", "1", "01", "110"] {
                for n in 0..4 {
                    let q = tuple_strings(&[u, &unary(n)]);
                    assert_eq!(direct.name().query(&q).unwrap(), wired.query(&q).unwrap(), "{name} {u} {n}");
                }
            }
        }
    }

    #[test]
    fn metered_problem_counts_queries() {
        let meter = Meter::new(None);
        let a = metered(exist2_problem(caps()), meter.clone());
        let name = a(pred("false").name()).unwrap();
        assert_eq!(name.query(&tuple_strings(&["", &unary(2)])).unwrap(), "0");
        assert_eq!(meter.snapshot().trace().len(), 4);
    }
}
