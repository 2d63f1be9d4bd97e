//! Operators runnable under the cost meter, each with a declared bound.
//!
//! A metered operator reads one oracle (a real name, or a pair of names)
//! and answers `0^n` with a dyadic string. The bound is a second-order
//! polynomial in `n` and the oracle's size function `L`, where the size of a
//! pair is the size of the paired name.

use crate::cfun::{approx_query, CFunName};
use crate::encoding::{unary, Dyadic};
use crate::error::{Result, SondaError};
use crate::names::{pair, split_paired_answer, Name};
use crate::real::{add_step, exp_series, mul_step, neg_step, read_dyadic, sin_dyadic, RealName};
use crate::sopoly::{metered_run, Meter, MeteredOutcome, SecondOrderPolynomial};

/// Shape of the oracle an operator expects.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Oracle {
    /// One real name.
    Real,
    /// `<x, y>` for two real names.
    RealPair,
    /// `<f, x>` for a function name on `[0,1]` and a real name.
    FunReal,
}

type Step = fn(&Name, u64) -> Result<Dyadic>;

#[derive(Clone, Copy, Debug)]
pub struct MeteredOp {
    pub name: &'static str,
    pub oracle: Oracle,
    pub bound: &'static str,
    step: Step,
}

impl MeteredOp {
    pub fn bound_poly(&self) -> SecondOrderPolynomial {
        SecondOrderPolynomial::parse(self.bound).expect("catalog bounds parse")
    }

    /// Answers `0^n` against `oracle`, aborting with `BoundExceeded` as soon
    /// as the cost passes the declared bound.
    pub fn run(&self, oracle: &Name, n: u64) -> Result<MeteredOutcome> {
        let bound = self.bound_poly();
        let step = self.step;
        metered_run(
            |o: &Name, _: &Meter, u: &str| Ok(step(o, u.len() as u64)?.encode()),
            oracle,
            &unary(n as usize),
            Some(&bound),
        )
    }
}

// query lengths: m+2 twice; the sum is at most one symbol longer than an answer
const ADD: &str = "3*L(n+2)+2*n+7";
// two probes at length 1, then two queries at length at most n+L(1)+2
const MUL: &str = "2*L(n+L(1)+2)+6*L(1)+4*n+17";
const NEG: &str = "2*L(n)+n+1";
const EXP01: &str = "L(n+3)+3*n+13";
const SIN: &str = "L(n+4)+3*n+13";
// modulus at n+2, the point at mu+1, then the function at (0^(n+2), point)
const APPLY: &str = "4*n+2*L(n+4)+3*L(L(n+4)+3)+2*L(2*n+2*L(L(n+4)+3)+10)+24";

pub const CATALOG: &[MeteredOp] = &[
    MeteredOp {
        name: "real_add",
        oracle: Oracle::RealPair,
        bound: ADD,
        step: add_step,
    },
    MeteredOp {
        name: "real_mul",
        oracle: Oracle::RealPair,
        bound: MUL,
        step: mul_step,
    },
    MeteredOp {
        name: "real_neg",
        oracle: Oracle::Real,
        bound: NEG,
        step: neg_step,
    },
    MeteredOp {
        name: "exp01",
        oracle: Oracle::Real,
        bound: EXP01,
        step: exp01_step,
    },
    MeteredOp {
        name: "sin",
        oracle: Oracle::Real,
        bound: SIN,
        step: sin_step,
    },
    MeteredOp {
        name: "apply",
        oracle: Oracle::FunReal,
        bound: APPLY,
        step: apply_step,
    },
];

pub fn find_op(name: &str) -> Option<&'static MeteredOp> {
    CATALOG.iter().find(|op| op.name == name)
}

fn exp01_step(o: &Name, n: u64) -> Result<Dyadic> {
    let t = read_dyadic(&o.query(&unary(n as usize + 3))?)?.clamp_to(&Dyadic::zero(), &Dyadic::one());
    Ok(exp_series(&t, n).round_to(n + 2))
}

fn sin_step(o: &Name, n: u64) -> Result<Dyadic> {
    let a = read_dyadic(&o.query(&unary(n as usize + 4))?)?;
    Ok(sin_dyadic(&a, n + 4).round_to(n + 2))
}

fn nested(a: &str) -> Result<&str> {
    split_paired_answer(split_paired_answer(a)?)
}

fn apply_step(o: &Name, n: u64) -> Result<Dyadic> {
    let a = o.query(&format!("00{}", unary(n as usize + 2)))?;
    let mu = nested(&a)?;
    if !mu.bytes().all(|b| b == b'0') {
        return Err(SondaError::MalformedName(format!("modulus answer {mu:?} is not unary")));
    }
    let x = o.query(&format!("1{}", unary(mu.len() + 1)))?;
    let point = read_dyadic(split_paired_answer(&x)?)?.clamp_to(&Dyadic::zero(), &Dyadic::one());
    let f = o.query(&format!("01{}", approx_query(n + 2, &[point])))?;
    Ok(read_dyadic(nested(&f)?)?.round_to(n + 2))
}

/// The oracle for a pair of reals.
pub fn real_pair(x: &RealName, y: &RealName) -> Name {
    pair(x.name(), y.name())
}

/// The oracle for `apply`.
pub fn fun_real_pair(f: &CFunName, x: &RealName) -> Name {
    pair(f.name(), x.name())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfun::{make_cfun_exact, Domain};
    use crate::names::SizeFn;
    use crate::real::real_from_dyadic;

    fn padded(v: Dyadic, bound: u32) -> RealName {
        RealName::from_approx(bound, 2, move |i| Ok(v.round_to(i + 2)))
    }

    #[test]
    fn bounds_parse() {
        for op in CATALOG {
            op.bound_poly();
            assert!(find_op(op.name).is_some());
        }
    }

    #[test]
    fn ops_agree_with_values_and_bounds() {
        let x = Dyadic::new(5, 3);
        let y = Dyadic::new(-3, 2);
        for bound in [2u32, 8, 40] {
            let (rx, ry) = (padded(x.clone(), bound), padded(y.clone(), bound));
            let pr = real_pair(&rx, &ry);
            for n in [0u64, 4, 16] {
                let tol = Dyadic::pow2(-(n as i64));
                let v = |op: &str, o: &Name| read_dyadic(&find_op(op).unwrap().run(o, n).unwrap().output).unwrap();
                assert!((&v("real_add", &pr) - &(&x + &y)).abs() < tol);
                assert!((&v("real_mul", &pr) - &(&x * &y)).abs() < tol);
                assert!((&v("real_neg", rx.name()) + &x).abs() < tol);
                let e = v("exp01", rx.name()).to_f64();
                assert!((e - x.to_f64().exp()).abs() < tol.to_f64());
                let s = v("sin", ry.name()).to_f64();
                assert!((s - y.to_f64().sin()).abs() < tol.to_f64());
            }
        }
    }

    #[test]
    fn metered_apply() {
        let f = make_cfun_exact(Domain::Unit, SizeFn::new(|n| n + 1), 1, |p| &p[0] * &p[0]);
        let x = real_from_dyadic(&Dyadic::new(3, 2));
        let o = fun_real_pair(&f, &x);
        let op = find_op("apply").unwrap();
        for n in [0u64, 5, 12] {
            let out = op.run(&o, n).unwrap();
            let v = read_dyadic(&out.output).unwrap();
            assert!((&v - &Dyadic::new(9, 4)).abs() < Dyadic::pow2(-(n as i64)));
            assert!(out.cost <= out.bound.unwrap());
        }
    }
}
