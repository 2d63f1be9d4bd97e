//! Initial value problems `h(0) = 0, h'(t) = g(t, h(t))` by forward Euler.
//!
//! For a Lipschitz right-hand side with constant `L` and magnitude exponent
//! `M`, the answer at precision `n` runs `2^p` steps of length `2^-p` with
//! `q = n + 8L` and `p = max(mu(n+8L), n+8L+M)`, querying `g` at precision
//! `q`. Between grid points the last slope is extended linearly.

use crate::cfun::{CFunName, Domain, LipName, Reference};
use crate::encoding::Dyadic;
use crate::error::{Result, SondaError};
use crate::names::SizeFn;

/// Largest supported step exponent; `2^p` steps are run one by one.
pub const MAX_STEP_EXP: u64 = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EulerSchedule {
    pub n: u64,
    pub lipschitz: u32,
    pub m: u64,
    /// `mu(n + 8L)` of the right-hand side.
    pub mu: u64,
    pub p: u64,
    pub q: u64,
}

impl EulerSchedule {
    pub fn new(g: &LipName, n: u64, m: u64) -> Result<Self> {
        let q = n + 8 * g.lipschitz() as u64;
        let mu = g.f().modulus(q as usize)? as u64;
        Ok(EulerSchedule {
            n,
            lipschitz: g.lipschitz(),
            m,
            mu,
            p: mu.max(q + m),
            q,
        })
    }

    /// Steps needed to reach `t = 1`.
    pub fn steps(&self) -> u64 {
        1u64 << self.p
    }
}

/// `ceil(log2(|phi(eps, +0/1, +0/1)| + 1 + 2^mu(0)))`.
pub fn compute_m(g: &LipName) -> Result<u64> {
    g.f().magnitude_exponent()
}

#[derive(Clone, Debug)]
pub struct EulerRun {
    pub value: Dyadic,
    /// Full grid steps taken.
    pub steps: u64,
    /// Largest `numerator bits + exponent` of the carried iterate.
    pub peak_state_bits: u64,
}

/// Streaming iterate: grid index `T` and `h(T / 2^p)`.
struct Stream<'a> {
    g: &'a CFunName,
    p: u64,
    q: u64,
    escape: Option<u64>,
    t: u64,
    value: Dyadic,
    peak: u64,
}

impl<'a> Stream<'a> {
    fn new(g: &'a CFunName, p: u64, q: u64, escape: Option<u64>) -> Result<Self> {
        if p > MAX_STEP_EXP {
            return Err(SondaError::CapExceeded {
                what: "Euler step exponent",
                value: p as usize,
                cap: MAX_STEP_EXP as usize,
            });
        }
        Ok(Stream {
            g,
            p,
            q,
            escape,
            t: 0,
            value: Dyadic::zero(),
            peak: 0,
        })
    }

    fn time(&self) -> Dyadic {
        Dyadic::new(self.t, self.p)
    }

    /// `g` at the current grid point, at precision `q`. Answers with more
    /// than `q+2` fractional bits are rounded to `q+2`.
    fn slope(&self) -> Result<Dyadic> {
        let a = self.g.approx(self.q, &[self.time(), self.value.clone()])?;
        Ok(if a.exponent() > self.q + 2 {
            a.round_to(self.q + 2)
        } else {
            a
        })
    }

    fn check_escape(&self, v: &Dyadic) -> Result<()> {
        if let Some(n) = self.escape {
            let lim = &Dyadic::one() + &Dyadic::pow2(-(n as i64));
            if v.abs() > lim {
                return Err(SondaError::TrajectoryEscape {
                    step: self.t,
                    value: v.to_decimal(12),
                    prec: n as u32,
                });
            }
        }
        Ok(())
    }

    fn advance(&mut self) -> Result<()> {
        let a = self.slope()?;
        let mut v = &self.value + &a.mul_pow2(-(self.p as i64));
        let cap = self.p + self.q + 2;
        if v.exponent() > cap {
            v = v.round_to(cap);
        }
        let v = v.normalized();
        self.t += 1;
        self.check_escape(&v)?;
        let bits = v.numerator().bits() + v.exponent();
        self.peak = self.peak.max(bits);
        self.value = v;
        Ok(())
    }

    /// Moves to the grid point just below `u` and extends linearly.
    fn value_at(&mut self, u: &Dyadic) -> Result<Dyadic> {
        let scaled = u.mul_pow2(self.p as i64).floor_to(0);
        let target: u64 = scaled
            .numerator()
            .try_into()
            .expect("clamped point gives an index in [0, 2^p]");
        debug_assert!(target >= self.t, "points must be visited in order");
        while self.t < target {
            self.advance()?;
        }
        let dt = u - &self.time();
        if dt.is_zero() {
            return Ok(self.value.clone());
        }
        let v = &self.value + &(&dt * &self.slope()?);
        self.check_escape(&v)?;
        Ok(v)
    }
}

fn clamp01(u: &Dyadic) -> Dyadic {
    u.clamp_to(&Dyadic::zero(), &Dyadic::one())
}

/// `h~_{p,q}(u)` without an escape check.
pub fn euler_approx(g: &LipName, p: u64, q: u64, u: &Dyadic) -> Result<Dyadic> {
    Ok(euler_run(g.f(), p, q, u, None)?.value)
}

pub fn euler_run(
    g: &CFunName,
    p: u64,
    q: u64,
    u: &Dyadic,
    escape: Option<u64>,
) -> Result<EulerRun> {
    let mut s = Stream::new(g, p, q, escape)?;
    let value = s.value_at(&clamp01(u))?;
    Ok(EulerRun {
        value,
        steps: s.t,
        peak_state_bits: s.peak,
    })
}

/// Values at several points from one pass over the grid.
#[derive(Clone, Debug)]
pub struct EulerBatch {
    pub values: Vec<Dyadic>,
    /// Grid steps taken to reach the largest point.
    pub steps: u64,
    pub peak_state_bits: u64,
}

/// One pass over the grid answering every point of `us`.
pub fn euler_batch(
    g: &CFunName,
    p: u64,
    q: u64,
    us: &[Dyadic],
    escape: Option<u64>,
) -> Result<EulerBatch> {
    let pts: Vec<Dyadic> = us.iter().map(clamp01).collect();
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| pts[a].cmp(&pts[b]));
    let mut s = Stream::new(g, p, q, escape)?;
    let mut out = vec![Dyadic::zero(); pts.len()];
    for i in order {
        out[i] = s.value_at(&pts[i])?;
    }
    Ok(EulerBatch {
        values: out,
        steps: s.t,
        peak_state_bits: s.peak,
    })
}

/// The solution operator applied to one right-hand side.
#[derive(Clone, Debug)]
pub struct LipIvp {
    g: LipName,
    m: u64,
    cfun: CFunName,
}

impl LipIvp {
    pub fn g(&self) -> &LipName {
        &self.g
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    /// `<nu, psi>` with `nu(n) = n + M`.
    pub fn cfun(&self) -> &CFunName {
        &self.cfun
    }

    pub fn schedule(&self, n: u64) -> Result<EulerSchedule> {
        EulerSchedule::new(&self.g, n, self.m)
    }

    pub fn solve(&self, n: u64, u: &Dyadic) -> Result<EulerRun> {
        let s = self.schedule(n)?;
        euler_run(self.g.f(), s.p, s.q, u, Some(n))
    }

    pub fn solve_batch(&self, n: u64, us: &[Dyadic]) -> Result<EulerBatch> {
        let s = self.schedule(n)?;
        euler_batch(self.g.f(), s.p, s.q, us, Some(n))
    }
}

pub fn lip_ivp(g: &LipName) -> Result<LipIvp> {
    let m = compute_m(g)?;
    let mu = SizeFn::new(move |n| n + m as usize);
    let (gs, gq) = (g.clone(), g.clone());
    // answers have at most max(e_u, p) + q + 2 fractional bits and |h| <= 2
    let len = SizeFn::new(move |l| {
        let n = l.saturating_sub(4) / 2;
        match EulerSchedule::new(&gs, n as u64, m) {
            Ok(s) => 5 + 2 * (l.max(s.p as usize) + s.q as usize + 2),
            Err(_) => 5 + 2 * l,
        }
    });
    let cfun = CFunName::from_parts(Domain::Unit, mu, len, move |n, pts| {
        let s = EulerSchedule::new(&gq, n, m)?;
        Ok(euler_run(gq.f(), s.p, s.q, &pts[0], Some(n))?.value)
    });
    Ok(LipIvp {
        g: g.clone(),
        m,
        cfun,
    })
}

#[derive(Clone, Debug)]
pub struct CertificatePoint {
    pub t: Dyadic,
    pub approx: Dyadic,
    /// Upper bound on `|h~(t) - h(t)|`.
    pub error: Dyadic,
    /// Lower bound on `2^-n e^(4L(t-1))`.
    pub bound: Dyadic,
}

#[derive(Clone, Debug)]
pub struct CertificateReport {
    pub schedule: EulerSchedule,
    pub points: Vec<CertificatePoint>,
}

impl CertificateReport {
    pub fn ok(&self) -> bool {
        self.points.iter().all(|c| c.error <= c.bound)
    }

    pub fn max_error(&self) -> Dyadic {
        self.points
            .iter()
            .map(|c| c.error.clone())
            .max()
            .unwrap_or_else(Dyadic::zero)
    }
}

/// `2^-n e^x` from below, for `x <= 0`.
fn envelope_lower(n: u64, x: f64) -> Dyadic {
    let e = (x.exp() * (1.0 - 1e-12)).max(0.0);
    Dyadic::from_f64(e)
        .expect("finite")
        .mul_pow2(-(n as i64))
}

/// Checks `|h~(t) - h(t)| <= 2^-n e^(4L(t-1))` at every sample `t`.
pub fn check_euler_certificate(
    g: &LipName,
    h: &Reference<'_>,
    n: u64,
    samples: &[Dyadic],
) -> Result<CertificateReport> {
    let m = compute_m(g)?;
    let schedule = EulerSchedule::new(g, n, m)?;
    let values = euler_batch(g.f(), schedule.p, schedule.q, samples, Some(n))?.values;
    let l = g.lipschitz() as f64;
    let points = samples
        .iter()
        .zip(values)
        .map(|(t, approx)| {
            let t = clamp01(t);
            let (exact, radius) = h(std::slice::from_ref(&t));
            let error = &(&approx - &exact).abs() + &radius;
            let bound = envelope_lower(n, 4.0 * l * (t.to_f64() - 1.0));
            CertificatePoint {
                t,
                approx,
                error,
                bound,
            }
        })
        .collect();
    Ok(CertificateReport { schedule, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfun::{make_cfun_exact, make_lip_name};

    fn d(n: i64, e: u64) -> Dyadic {
        Dyadic::new(n, e)
    }

    #[test]
    fn solution_name_direct_and_string_paths_agree() {
        let f = make_cfun_exact(Domain::Rect, SizeFn::new(|n| n + 1), 1, |p| &p[0] * &Dyadic::from_int(2));
        let ivp = lip_ivp(&make_lip_name(&f, 1).unwrap()).unwrap();
        for n in 0..4u64 {
            for u in [d(0, 0), d(1, 2), d(5, 3), d(1, 0)] {
                let a = ivp.cfun().approx(n, std::slice::from_ref(&u)).unwrap();
                assert_eq!(a, ivp.cfun().approx_via_name(n, &[u]).unwrap());
            }
        }
    }

    fn zero_rhs() -> LipName {
        let f = make_cfun_exact(Domain::Rect, SizeFn::constant(0), 1, |_| Dyadic::zero());
        make_lip_name(&f, 0).unwrap()
    }

    fn two_t() -> LipName {
        let f = make_cfun_exact(Domain::Rect, SizeFn::new(|n| n + 1), 2, |p| p[0].mul_pow2(1));
        make_lip_name(&f, 0).unwrap()
    }

    fn grid(k: u64) -> Vec<Dyadic> {
        (0..=(1i64 << k)).map(|i| d(i, k)).collect()
    }

    #[test]
    fn m_formula() {
        assert_eq!(compute_m(&zero_rhs()).unwrap(), 1);
        let half = make_cfun_exact(Domain::Rect, SizeFn::constant(0), 1, |p| {
            (&p[1] + &Dyadic::one()).mul_pow2(-2)
        });
        assert_eq!(compute_m(&make_lip_name(&half, 1).unwrap()).unwrap(), 2);
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let ivp = lip_ivp(&zero_rhs()).unwrap();
        for n in 0..6 {
            for u in grid(3) {
                assert!(ivp.cfun().approx(n, &[u]).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn two_t_matches_square() {
        let g = two_t();
        let ivp = lip_ivp(&g).unwrap();
        for n in 0..8 {
            let s = ivp.schedule(n).unwrap();
            assert_eq!(s.q, n);
            assert_eq!(s.p, (n + 1).max(n + 2));
            for u in grid(4) {
                let v = ivp.cfun().approx(n, std::slice::from_ref(&u)).unwrap();
                assert!((&v - &(&u * &u)).abs() < Dyadic::pow2(-(n as i64)));
            }
        }
    }

    #[test]
    fn exact_summation_oracle() {
        // h~(T/2^p) = sum_{j<T} 2^-p 2 j 2^-p = T(T-1) / 4^p when answers are exact
        let g = two_t();
        for p in 1..8u64 {
            for t in 0..=(1i64 << p) {
                let v = euler_approx(&g, p, 20, &d(t, p)).unwrap();
                assert_eq!(v, d(t * (t - 1), 2 * p));
            }
        }
    }

    #[test]
    fn batch_matches_single_runs() {
        let g = two_t();
        let us = vec![d(3, 2), d(1, 3), d(1, 0), d(5, 5), d(-1, 0), d(5, 1)];
        let batch = euler_batch(g.f(), 6, 4, &us, None).unwrap().values;
        for (u, b) in us.iter().zip(&batch) {
            assert_eq!(&euler_approx(&g, 6, 4, u).unwrap(), b);
        }
    }

    #[test]
    fn steps_and_state_are_bounded() {
        let g = two_t();
        let run = euler_run(g.f(), 10, 6, &Dyadic::one(), Some(6)).unwrap();
        assert_eq!(run.steps, 1 << 10);
        // |h| <= 1 with at most p+q+2 fractional bits
        assert!(run.peak_state_bits <= 2 * (10 + 6 + 2) + 1);
    }

    #[test]
    fn escape_is_detected() {
        let f = make_cfun_exact(Domain::Rect, SizeFn::constant(2), 3, |_| Dyadic::from_int(3));
        let g = make_lip_name(&f, 0).unwrap();
        let ivp = lip_ivp(&g).unwrap();
        assert!(matches!(
            ivp.solve(2, &Dyadic::one()),
            Err(SondaError::TrajectoryEscape { .. })
        ));
    }

    #[test]
    fn certificate_for_two_t() {
        let g = two_t();
        let samples = grid(5);
        let r = check_euler_certificate(&g, &|p: &[Dyadic]| (&p[0] * &p[0], Dyadic::zero()), 6, &samples)
            .unwrap();
        assert!(r.ok());
        assert_eq!(r.points.len(), samples.len());
    }
}
