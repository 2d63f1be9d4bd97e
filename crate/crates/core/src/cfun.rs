//! Continuous functions as names.
//!
//! A function name is the pair `<mu, phi>`: `mu` answers `0^n` with
//! `0^mu(n)`, a modulus of continuity, and `phi` answers the tuple
//! `(0^n, u)` (or `(0^n, u, v)` on the rectangle) with a dyadic within `2^-n`
//! of the function at the point. Points outside the domain are clamped.
//!
//! Lipschitz right-hand sides on `[0,1] x [-1,1]` pair a function name with
//! the constant name `0^L`.

use std::sync::Arc;

use crate::encoding::{decode_dyadic, tuple_strings, unary, untuple_exact, Dyadic};
use crate::error::{Result, SondaError};
use crate::names::{
    const_name, pad_to, pair, project, split_paired_answer, unary_fn_name, Name, Side, SizeFn,
};
use crate::real::{read_dyadic, to_dyadic, RealName};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    /// `[0,1]`
    Unit,
    /// `[0,1] x [-1,1]`, measured in the max-metric.
    Rect,
}

impl Domain {
    pub fn dim(self) -> usize {
        match self {
            Domain::Unit => 1,
            Domain::Rect => 2,
        }
    }

    pub fn clamp(self, pts: &[Dyadic]) -> Vec<Dyadic> {
        let (zero, one, m_one) = (Dyadic::zero(), Dyadic::one(), Dyadic::from_int(-1));
        pts.iter()
            .enumerate()
            .map(|(i, p)| {
                if i == 0 {
                    p.clamp_to(&zero, &one)
                } else {
                    p.clamp_to(&m_one, &one)
                }
            })
            .collect()
    }

    pub fn origin(self) -> Vec<Dyadic> {
        vec![Dyadic::zero(); self.dim()]
    }

    // tuple (0^n, u[, v]) of length l leaves room for n <= (l - 2 dim - 2) / 2
    fn max_prec(self, query_len: usize) -> usize {
        query_len.saturating_sub(2 * self.dim() + 2) / 2
    }
}

/// Builds the approximation query `(0^n, u, ...)`.
pub fn approx_query(n: u64, pts: &[Dyadic]) -> String {
    let mut parts = Vec::with_capacity(pts.len() + 1);
    parts.push(unary(n as usize));
    parts.extend(pts.iter().map(Dyadic::encode));
    tuple_strings(&parts)
}

fn parse_approx_query(domain: Domain, q: &str) -> Option<(u64, Vec<Dyadic>)> {
    let parts = untuple_exact(q, domain.dim() + 1).ok()?;
    if !parts[0].bytes().all(|b| b == b'0') {
        return None;
    }
    let pts = parts[1..]
        .iter()
        .map(|s| decode_dyadic(s).ok())
        .collect::<Option<Vec<_>>>()?;
    Some((parts[0].len() as u64, pts))
}

type ApproxFn = dyn Fn(u64, &[Dyadic]) -> Result<Dyadic> + Send + Sync;

/// The routine behind a name built by [`CFunName::from_parts`], used to
/// answer [`CFunName::approx`] without the string round trip.
#[derive(Clone)]
struct Direct {
    approx: Arc<ApproxFn>,
    len: SizeFn,
}

#[derive(Clone)]
pub struct CFunName {
    name: Name,
    domain: Domain,
    direct: Option<Direct>,
}

impl std::fmt::Debug for CFunName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CFunName")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .finish()
    }
}

impl CFunName {
    /// Assembles a name from a modulus, an answer-length schedule in the
    /// query length, and an approximation routine that sees clamped points.
    /// Unparseable queries are answered with zero.
    pub fn from_parts(
        domain: Domain,
        mu: SizeFn,
        answer_len: SizeFn,
        approx: impl Fn(u64, &[Dyadic]) -> Result<Dyadic> + Send + Sync + 'static,
    ) -> Self {
        let approx: Arc<ApproxFn> = Arc::new(approx);
        let direct = Direct {
            approx: approx.clone(),
            len: answer_len.clone(),
        };
        let len = answer_len.clone();
        let phi = Name::with_size(
            move |q| {
                let v = match parse_approx_query(domain, q) {
                    Some((n, pts)) => approx(n, &domain.clamp(&pts))?.normalized(),
                    None => Dyadic::zero(),
                };
                pad_to(v.encode(), len.eval(q.len())).map_err(|_| {
                    SondaError::MalformedName(format!("answer {v} overflows its schedule"))
                })
            },
            answer_len,
        );
        let modulus = unary_fn_name(move |n| mu.eval(n));
        CFunName {
            name: pair(&modulus, &phi),
            domain,
            direct: Some(direct),
        }
    }

    /// Wraps an existing `<mu, phi>` name.
    pub fn from_name(name: Name, domain: Domain) -> Self {
        CFunName {
            name,
            domain,
            direct: None,
        }
    }

    pub fn name(&self) -> &Name {
        &self.name
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn modulus(&self, n: usize) -> Result<usize> {
        let a = self.name.query(&format!("0{}", unary(n)))?;
        let m = split_paired_answer(&a)?;
        if !m.bytes().all(|b| b == b'0') {
            return Err(SondaError::MalformedName(format!(
                "modulus answer {m:?} is not unary"
            )));
        }
        Ok(m.len())
    }

    pub fn approx(&self, n: u64, pts: &[Dyadic]) -> Result<Dyadic> {
        if pts.len() != self.domain.dim() {
            return Err(SondaError::OutOfDomain(format!(
                "expected {} coordinates, got {}",
                self.domain.dim(),
                pts.len()
            )));
        }
        match &self.direct {
            Some(d) => {
                // the value the name's answer decodes to, including its overflow fault
                let codes: Vec<String> = pts.iter().map(Dyadic::encode).collect();
                let query_len = 2 * n as usize + 2 + codes.iter().map(|c| 2 * c.len() + 2).sum::<usize>();
                let pts: Vec<Dyadic> = pts.iter().map(Dyadic::normalized).collect();
                let v = (d.approx)(n, &self.domain.clamp(&pts))?.normalized();
                if v.encode().len() > d.len.eval(query_len) {
                    return Err(SondaError::MalformedName(format!("answer {v} overflows its schedule")));
                }
                Ok(v)
            }
            None => self.approx_via_name(n, pts),
        }
    }

    /// [`CFunName::approx`] through the name's string answer.
    pub fn approx_via_name(&self, n: u64, pts: &[Dyadic]) -> Result<Dyadic> {
        let a = self.name.query(&format!("1{}", approx_query(n, pts)))?;
        read_dyadic(split_paired_answer(&a)?)
    }

    /// `ceil(log2(|phi(eps, origin)| + 1 + 2^mu(0)))`: `2^mu(0)` steps of
    /// max-length `2^-mu(0)` reach any point of the domain from the origin,
    /// each changing the value by at most 1.
    pub fn magnitude_exponent(&self) -> Result<u64> {
        let v = self.approx(0, &self.domain.origin())?.abs();
        let mu0 = self.modulus(0)?;
        let total = &(&v + &Dyadic::one()) + &Dyadic::pow2(mu0 as i64);
        Ok(total.ceil_log2().expect("positive") as u64)
    }
}

/// A name from an evaluator: `eval(k, p)` must be within `2^-k` of `f(p)`
/// for points in the domain, and `|f| <= 2^bound - 1` there. Answers at
/// precision `n` are `eval(n+1)` rounded to `n+2` bits.
pub fn make_cfun(
    domain: Domain,
    mu: SizeFn,
    bound: u32,
    eval: impl Fn(u64, &[Dyadic]) -> Result<Dyadic> + Send + Sync + 'static,
) -> CFunName {
    let len = SizeFn::new(move |l| 3 + bound as usize + 2 * (domain.max_prec(l) + 2));
    CFunName::from_parts(domain, mu, len, move |n, pts| {
        Ok(eval(n + 1, pts)?.round_to(n + 2))
    })
}

/// Exact evaluators need no precision argument.
pub fn make_cfun_exact(
    domain: Domain,
    mu: SizeFn,
    bound: u32,
    f: impl Fn(&[Dyadic]) -> Dyadic + Send + Sync + 'static,
) -> CFunName {
    make_cfun(domain, mu, bound, move |_, p| Ok(f(p)))
}

/// The three pieces of one `apply` answer.
#[derive(Clone, Debug)]
pub struct ApplyTrace {
    /// `mu(n+2)`
    pub mu: usize,
    /// `x` read at precision `mu(n+2)+1`, clamped to `[0,1]`.
    pub point: Dyadic,
    /// The function name's answer at `(0^(n+2), point)`.
    pub raw: Dyadic,
    /// `raw` rounded to `n+2` bits.
    pub value: Dyadic,
}

/// Runs one `apply` answer. The errors are `|f(x) - f(point)| <= 2^-(n+2)`
/// by the modulus, `|f(point) - raw| < 2^-(n+2)`, and rounding
/// `<= 2^-(n+3)`.
pub fn apply_trace(f: &CFunName, x: &RealName, n: u64) -> Result<ApplyTrace> {
    let mu = f.modulus(n as usize + 2)?;
    let point = to_dyadic(x, mu as u64 + 1)?.clamp_to(&Dyadic::zero(), &Dyadic::one());
    let raw = f.approx(n + 2, std::slice::from_ref(&point))?;
    let value = raw.round_to(n + 2);
    Ok(ApplyTrace {
        mu,
        point,
        raw,
        value,
    })
}

pub fn apply(f: &CFunName, x: &RealName) -> Result<RealName> {
    if f.domain != Domain::Unit {
        return Err(SondaError::OutOfDomain(
            "apply needs a function on [0,1]".into(),
        ));
    }
    let bound = f.magnitude_exponent()? as u32 + 1;
    let (f, x) = (f.clone(), x.clone());
    Ok(RealName::from_approx(bound, 2, move |n| {
        Ok(apply_trace(&f, &x, n)?.value)
    }))
}

#[derive(Clone, Debug)]
pub struct LipName {
    f: CFunName,
    lipschitz: u32,
    name: Name,
}

impl LipName {
    pub fn f(&self) -> &CFunName {
        &self.f
    }

    pub fn lipschitz(&self) -> u32 {
        self.lipschitz
    }

    /// `<phi, 0^L>`.
    pub fn name(&self) -> &Name {
        &self.name
    }

    /// Reads `<phi, 0^L>` back.
    pub fn from_name(name: Name) -> Result<Self> {
        let l = project(Side::Right, &name).query("")?;
        if !l.bytes().all(|b| b == b'0') {
            return Err(SondaError::MalformedName(format!(
                "Lipschitz component {l:?} is not unary"
            )));
        }
        let f = CFunName::from_name(project(Side::Left, &name), Domain::Rect);
        Ok(LipName {
            f,
            lipschitz: l.len() as u32,
            name,
        })
    }
}

pub fn make_lip_name(f: &CFunName, lipschitz: u32) -> Result<LipName> {
    if f.domain != Domain::Rect {
        return Err(SondaError::OutOfDomain(
            "a Lipschitz right-hand side lives on [0,1] x [-1,1]".into(),
        ));
    }
    let name = pair(f.name(), &const_name(&unary(lipschitz as usize)));
    Ok(LipName {
        f: f.clone(),
        lipschitz,
        name,
    })
}

/// Value of the function at a point, with an error radius.
pub type Reference<'a> = dyn Fn(&[Dyadic]) -> (Dyadic, Dyadic) + 'a;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// The answer is not provably within `2^-n` of the reference.
    Approx {
        n: u64,
        point: Vec<Dyadic>,
        answer: Dyadic,
    },
    /// Two points `2^-mu(n)` apart whose values differ by more than `2^-n`.
    Modulus {
        n: u64,
        a: Vec<Dyadic>,
        b: Vec<Dyadic>,
    },
    /// The modulus shrank from `n` to `n+1`.
    ModulusDecreasing { n: u64 },
}

#[derive(Clone, Debug, Default)]
pub struct WellformedReport {
    pub checks: usize,
    pub violations: Vec<Violation>,
}

impl WellformedReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the approximation and modulus properties at every sample point
/// and precision. Modulus pairs shift the first coordinate by `2^-mu(n)`.
pub fn check_cfun_wellformed(
    f: &CFunName,
    reference: &Reference<'_>,
    samples: &[Vec<Dyadic>],
    precisions: &[u64],
) -> Result<WellformedReport> {
    let mut report = WellformedReport::default();
    for &n in precisions {
        let tol = Dyadic::pow2(-(n as i64));
        let mu = f.modulus(n as usize)?;
        report.checks += 1;
        if f.modulus(n as usize + 1)? < mu {
            report.violations.push(Violation::ModulusDecreasing { n });
        }
        for p in samples {
            let p = f.domain.clamp(p);
            let answer = f.approx(n, &p)?;
            let (v, r) = reference(&p);
            report.checks += 1;
            if &(&answer - &v).abs() + &r >= tol {
                report.violations.push(Violation::Approx {
                    n,
                    point: p.clone(),
                    answer,
                });
            }
            let mut q = p.clone();
            q[0] = &q[0] + &Dyadic::pow2(-(mu as i64));
            if q[0] > Dyadic::one() {
                q[0] = &p[0] - &Dyadic::pow2(-(mu as i64));
            }
            let q = f.domain.clamp(&q);
            let (w, s) = reference(&q);
            report.checks += 1;
            if &(&(&v - &w).abs() + &r) + &s > tol {
                report.violations.push(Violation::Modulus { n, a: p, b: q });
            }
        }
    }
    Ok(report)
}

/// Points where two names of the same function differ by more than
/// `2^-n+2`, i.e. the two answers cannot both be honest.
pub fn compare_cfun_names(
    f: &CFunName,
    g: &CFunName,
    n: u64,
    samples: &[Vec<Dyadic>],
) -> Result<Vec<Vec<Dyadic>>> {
    let tol = Dyadic::pow2(2 - n as i64);
    let mut bad = Vec::new();
    for p in samples {
        if (&f.approx(n, p)? - &g.approx(n, p)?).abs() > tol {
            bad.push(p.clone());
        }
    }
    Ok(bad)
}
