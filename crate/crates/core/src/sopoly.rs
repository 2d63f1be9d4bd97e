//! Second-order polynomials and the cost meter that enforces them.
//!
//! Terms are built from positive integer constants, the number variable `n`,
//! `+`, `*` and applications of the function variable `L`. Evaluated with
//! `L` bound to the size of an oracle they give the step budget of a
//! computation on that oracle.
//!
//! Cost model: each oracle interaction costs `|query| + |answer| + 1`, each
//! output symbol costs 1, and operations declare extra unit charges for their
//! own arithmetic.

use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{Result, SondaError};
use crate::names::{Name, SizeFn};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SecondOrderPolynomial {
    Const(u64),
    N,
    Sum(Box<SecondOrderPolynomial>, Box<SecondOrderPolynomial>),
    Prod(Box<SecondOrderPolynomial>, Box<SecondOrderPolynomial>),
    ApplyL(Box<SecondOrderPolynomial>),
}

use SecondOrderPolynomial as P;

impl SecondOrderPolynomial {
    pub fn constant(c: u64) -> Self {
        assert!(c >= 1, "second-order polynomial constants are positive");
        P::Const(c)
    }

    pub fn sum(a: P, b: P) -> P {
        P::Sum(Box::new(a), Box::new(b))
    }

    pub fn prod(a: P, b: P) -> P {
        P::Prod(Box::new(a), Box::new(b))
    }

    pub fn apply_l(a: P) -> P {
        P::ApplyL(Box::new(a))
    }

    /// Structural evaluation; arithmetic saturates at `u64::MAX`.
    pub fn eval(&self, l: &SizeFn, n: u64) -> u64 {
        self.try_eval(&mut |x| Ok(l.eval(clamp_usize(x)) as u64), n)
            .expect("infallible size function")
    }

    /// Evaluation with a fallible `L` (e.g. sizes probed from a live oracle).
    pub fn try_eval(&self, l: &mut dyn FnMut(u64) -> Result<u64>, n: u64) -> Result<u64> {
        Ok(match self {
            P::Const(c) => *c,
            P::N => n,
            P::Sum(a, b) => a.try_eval(l, n)?.saturating_add(b.try_eval(l, n)?),
            P::Prod(a, b) => a.try_eval(l, n)?.saturating_mul(b.try_eval(l, n)?),
            P::ApplyL(a) => {
                let x = a.try_eval(l, n)?;
                l(x)?
            }
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut p = Parser {
            src: text.as_bytes(),
            pos: 0,
        };
        let out = p.sum()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(SondaError::parse(p.pos, "unexpected trailing input"));
        }
        Ok(out)
    }
}

fn clamp_usize(x: u64) -> usize {
    usize::try_from(x).unwrap_or(usize::MAX)
}

impl fmt::Display for SecondOrderPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            P::Const(c) => write!(f, "{c}"),
            P::N => f.write_str("n"),
            P::Sum(a, b) => {
                write!(f, "{a}+")?;
                if matches!(**b, P::Sum(..)) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
            P::Prod(a, b) => {
                let wrap_a = matches!(**a, P::Sum(..));
                let wrap_b = matches!(**b, P::Sum(..) | P::Prod(..));
                if wrap_a {
                    write!(f, "({a})")?;
                } else {
                    write!(f, "{a}")?;
                }
                f.write_str("*")?;
                if wrap_b {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
            P::ApplyL(a) => write!(f, "L({a})"),
        }
    }
}

pub fn sopoly_parse(text: &str) -> Result<SecondOrderPolynomial> {
    SecondOrderPolynomial::parse(text)
}

pub fn sopoly_print(p: &SecondOrderPolynomial) -> String {
    p.to_string()
}

pub fn eval_sopoly(p: &SecondOrderPolynomial, l: &SizeFn, n: u64) -> u64 {
    p.eval(l, n)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(SondaError::parse(self.pos, format!("expected '{}'", c as char)))
        }
    }

    fn sum(&mut self) -> Result<P> {
        let mut acc = self.product()?;
        while self.peek() == Some(b'+') {
            self.pos += 1;
            acc = P::sum(acc, self.product()?);
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<P> {
        let mut acc = self.atom()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = P::prod(acc, self.atom()?);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<P> {
        match self.peek() {
            Some(b'n') => {
                self.pos += 1;
                Ok(P::N)
            }
            Some(b'L') => {
                self.pos += 1;
                self.expect(b'(')?;
                let inner = self.sum()?;
                self.expect(b')')?;
                Ok(P::apply_l(inner))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.sum()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
                let v: u64 = text
                    .parse()
                    .map_err(|_| SondaError::parse(start, "constant out of range"))?;
                if v == 0 {
                    return Err(SondaError::parse(start, "constants must be positive integers"));
                }
                Ok(P::Const(v))
            }
            _ => Err(SondaError::parse(self.pos, "expected an integer, n, L(...) or '('")),
        }
    }
}

/// Running cost of one computation.
#[derive(Clone, Debug, Default)]
pub struct CostMeter {
    cost: u64,
    limit: Option<u64>,
    trace: Vec<(usize, usize)>,
    output: u64,
    units: u64,
}

impl CostMeter {
    pub fn new(limit: Option<u64>) -> Self {
        CostMeter {
            limit,
            ..CostMeter::default()
        }
    }

    pub fn cost(&self) -> u64 {
        self.cost
    }

    pub fn limit(&self) -> Option<u64> {
        self.limit
    }

    /// `(query length, answer length)` per oracle interaction.
    pub fn trace(&self) -> &[(usize, usize)] {
        &self.trace
    }

    pub fn output_charges(&self) -> u64 {
        self.output
    }

    pub fn unit_charges(&self) -> u64 {
        self.units
    }

    fn check(&self) -> Result<()> {
        match self.limit {
            Some(bound) if self.cost > bound => Err(SondaError::BoundExceeded {
                cost: self.cost,
                bound,
            }),
            _ => Ok(()),
        }
    }

    pub fn charge_query(&mut self, query: usize, answer: usize) -> Result<()> {
        self.cost = self.cost.saturating_add((query + answer + 1) as u64);
        self.trace.push((query, answer));
        self.check()
    }

    pub fn charge_output(&mut self, symbols: usize) -> Result<()> {
        self.output += symbols as u64;
        self.cost = self.cost.saturating_add(symbols as u64);
        self.check()
    }

    pub fn charge_units(&mut self, units: u64) -> Result<()> {
        self.units += units;
        self.cost = self.cost.saturating_add(units);
        self.check()
    }
}

/// Shared handle to a [`CostMeter`]; metered names charge through it.
#[derive(Clone, Debug, Default)]
pub struct Meter(Arc<Mutex<CostMeter>>);

impl Meter {
    pub fn new(limit: Option<u64>) -> Self {
        Meter(Arc::new(Mutex::new(CostMeter::new(limit))))
    }

    pub fn snapshot(&self) -> CostMeter {
        self.0.lock().expect("meter poisoned").clone()
    }

    pub fn charge_units(&self, units: u64) -> Result<()> {
        self.0.lock().expect("meter poisoned").charge_units(units)
    }

    pub fn charge_output(&self, symbols: usize) -> Result<()> {
        self.0.lock().expect("meter poisoned").charge_output(symbols)
    }

    fn charge_query(&self, q: usize, a: usize) -> Result<()> {
        self.0.lock().expect("meter poisoned").charge_query(q, a)
    }

    /// Wraps `name` so each of its queries is charged here.
    pub fn wrap(&self, name: &Name) -> Name {
        let (inner, meter) = (name.clone(), self.clone());
        let query = move |u: &str| -> Result<String> {
            let a = inner.query(u)?;
            meter.charge_query(u.len(), a.len())?;
            Ok(a)
        };
        match name.declared_size() {
            Some(s) => Name::with_size(query, s.clone()),
            None => Name::new(query),
        }
    }
}

#[derive(Clone, Debug)]
pub struct MeteredOutcome {
    pub output: String,
    pub cost: u64,
    pub bound: Option<u64>,
    pub trace: Vec<(usize, usize)>,
}

/// Runs one name-to-name step on input `u` with oracle `phi` under the
/// meter. The bound is evaluated up front from `|phi|` and `|u|` and checked
/// online, so a violating run stops at the first charge over budget.
pub fn metered_run<F>(
    step: F,
    phi: &Name,
    u: &str,
    bound: Option<&SecondOrderPolynomial>,
) -> Result<MeteredOutcome>
where
    F: FnOnce(&Name, &Meter, &str) -> Result<String>,
{
    let limit = match bound {
        Some(p) => Some(p.try_eval(&mut |x| Ok(phi.size_of(clamp_usize(x))? as u64), u.len() as u64)?),
        None => None,
    };
    let meter = Meter::new(limit);
    let oracle = meter.wrap(phi);
    let output = step(&oracle, &meter, u)?;
    meter.charge_output(output.len())?;
    let snap = meter.snapshot();
    Ok(MeteredOutcome {
        output,
        cost: snap.cost(),
        bound: limit,
        trace: snap.trace().to_vec(),
    })
}
