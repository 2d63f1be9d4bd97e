//! The acceptance suite: eleven criteria, each checked against a reference
//! computed independently of the library, with a wall-clock limit.

pub mod oracle;

use std::cmp::Ordering;
use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use oracle::{close, decode, dyadic_to_q, exp_series, pow2, q, qbf_truth, sin_series, tuple, HullOracle, F, Q};
use sonda::catalog::{fun_real_pair, real_pair, Oracle, CATALOG};
use sonda::cfun::{apply, Domain};
use sonda::complexity::{exist2, power2, qbf2, sat2, Caps};
use sonda::encoding::unary;
use sonda::ivp::{check_euler_certificate, lip_ivp};
use sonda::names::{pad, pair, Name};
use sonda::real::{real_add, real_exp01, real_from_dyadic, real_mul, real_neg, real_sin};
use sonda::sets::{convex_hull, set_from_exact, set_query, ExactSet, HullOptions};
use sonda::{decode_dyadic, parse_expr, Dyadic, PredName, RealName, SecondOrderPolynomial, SizeFn};

type Check = Result<String, String>;
/// An exact value as a function of the point.
type Exact = fn(&Q) -> Q;
/// A reference value with its error radius.
type Reference = fn(&Q) -> (Q, Q);

trait Ctx<T> {
    fn ctx(self, what: &str) -> Result<T, String>;
}

impl<T, E: fmt::Display> Ctx<T> for Result<T, E> {
    fn ctx(self, what: &str) -> Result<T, String> {
        self.map_err(|e| format!("{what}: {e}"))
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:>2} {:<34} {:>7.2}s (limit {}s)  {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.elapsed.as_secs_f64(),
            self.limit.as_secs(),
            self.detail
        )
    }
}

pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    pub limit_secs: u64,
    run: fn() -> Check,
}

pub const CRITERIA: &[Criterion] = &[
    Criterion { id: 1, title: "second-order polynomial oracle", limit_secs: 1, run: c1 },
    Criterion { id: 2, title: "dyadic codec", limit_secs: 1, run: c2 },
    Criterion { id: 3, title: "real arithmetic validity", limit_secs: 30, run: c3 },
    Criterion { id: 4, title: "exp01 and sin accuracy", limit_secs: 30, run: c4 },
    Criterion { id: 5, title: "apply error budget", limit_secs: 10, run: c5 },
    Criterion { id: 6, title: "ivp endpoint contract", limit_secs: 60, run: c6 },
    Criterion { id: 7, title: "euler pointwise certificate", limit_secs: 30, run: c7 },
    Criterion { id: 8, title: "hull gap soundness", limit_secs: 300, run: c8 },
    Criterion { id: 9, title: "complete-problem oracle equivalence", limit_secs: 60, run: c9 },
    Criterion { id: 10, title: "structural laws", limit_secs: 10, run: c10 },
    Criterion { id: 11, title: "meter bounds", limit_secs: 60, run: c11 },
];

impl Criterion {
    pub fn run(&self) -> Outcome {
        let start = Instant::now();
        let result = (self.run)();
        let elapsed = start.elapsed();
        let limit = Duration::from_secs(self.limit_secs);
        let (mut pass, mut detail) = match result {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        if elapsed > limit {
            pass = false;
            detail = format!("over time; {detail}");
        }
        Outcome {
            id: self.id,
            title: self.title,
            pass,
            detail,
            elapsed,
            limit,
        }
    }
}

/// Runs the selected criteria (all when `ids` is empty), calling `report`
/// as each one finishes.
pub fn run_criteria(ids: &[u8], mut report: impl FnMut(&Outcome)) -> Vec<Outcome> {
    CRITERIA
        .iter()
        .filter(|c| ids.is_empty() || ids.contains(&c.id))
        .map(|c| {
            let o = c.run();
            report(&o);
            o
        })
        .collect()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_dyadic(r: &mut ChaCha8Rng, int_bits: u32, max_exp: u64) -> Dyadic {
    let e = r.gen_range(0..=max_exp);
    let span = 1i128 << (int_bits as u64 + e);
    Dyadic::new(BigInt::from(r.gen_range(-span + 1..span)), e)
}

fn answer_q(a: &str) -> Result<Q, String> {
    decode(a.trim_end_matches('#')).ok_or_else(|| format!("answer {a:?} is not a dyadic string"))
}

fn c1() -> Check {
    let p = SecondOrderPolynomial::parse("L(L(n*n))+L(L(n)*L(n))+L(n)+4").ctx("parse")?;
    let sq = SizeFn::square();
    for x in 0..=10u64 {
        let want = 2 * x.pow(8) + x * x + 4;
        let got = p.eval(&sq, x);
        ensure(got == want, || format!("x = {x}: {got} != {want}"))?;
    }
    Ok("x = 0..10 exact".into())
}

fn c2() -> Check {
    let mut r = rng(2);
    for i in 0..10_000 {
        let d = random_dyadic(&mut r, 60, 64);
        let s = d.encode();
        let back = decode_dyadic(&s).ctx("decode")?;
        ensure(back == d, || format!("round trip {i}: {s}"))?;
        ensure(decode(&s) == Some(dyadic_to_q(&d)), || format!("{s} does not denote {d}"))?;
        // redundant spellings: leading zeros and a longer denominator
        let (z, k) = (r.gen_range(0..4usize), r.gen_range(0..4usize));
        let (sign, rest) = s.split_at(1);
        let (bits, den) = rest.split_once('/').expect("dyadic string");
        let redundant = format!("{sign}{}{bits}{}/{den}{}", "0".repeat(z), "0".repeat(k), "0".repeat(k));
        let v = decode_dyadic(&redundant).ctx("decode redundant")?;
        ensure(v == d, || format!("{redundant} decodes to {v}"))?;
    }
    let half = Dyadic::new(1, 1);
    for s in ["+1/10", "+10000/100000"] {
        ensure(decode_dyadic(s).ctx(s)? == half, || format!("{s} is not 1/2"))?;
    }
    Ok("10000 round trips; both spellings of 1/2".into())
}

fn c3() -> Check {
    let mut r = rng(3);
    let mut checks = 0;
    for _ in 0..1000 {
        let s = random_dyadic(&mut r, 10, 24);
        let t = random_dyadic(&mut r, 10, 24);
        let (qs, qt) = (dyadic_to_q(&s), dyadic_to_q(&t));
        let (xs, xt) = (real_from_dyadic(&s), real_from_dyadic(&t));
        let sum = real_add(&xs, &xt);
        let prod = real_mul(&xs, &xt);
        for m in 0..=30usize {
            let a = answer_q(&sum.name().query(&unary(m)).ctx("add")?)?;
            ensure(close(&a, &(&qs + &qt), &Q::zero(), m as i64), || format!("add {s} {t} at {m}"))?;
            let b = answer_q(&prod.name().query(&unary(m)).ctx("mul")?)?;
            ensure(close(&b, &(&qs * &qt), &Q::zero(), m as i64), || format!("mul {s} {t} at {m}"))?;
            checks += 2;
        }
    }
    Ok(format!("{checks} answers within 2^-m"))
}

fn c4() -> Check {
    let mut r = rng(4);
    let mut worst = f64::NEG_INFINITY;
    for i in 0..50 {
        let x = if i == 0 { Dyadic::zero() } else if i == 1 { Dyadic::one() } else { Dyadic::new(r.gen_range(0..=1i64 << 30), 30) };
        let v = answer_q(&real_exp01(&real_from_dyadic(&x)).name().query(&unary(30)).ctx("exp01")?)?;
        let (reference, tail) = exp_series(&dyadic_to_q(&x), 340);
        ensure(close(&v, &reference, &tail, 30), || format!("exp01({x})"))?;
        worst = worst.max(err_bits(&v, &reference));
    }
    for i in 0..50 {
        let x = if i == 0 { Dyadic::zero() } else { random_dyadic(&mut r, 6, 24) };
        let v = answer_q(&real_sin(&real_from_dyadic(&x)).name().query(&unary(30)).ctx("sin")?)?;
        let (reference, tail) = sin_series(&dyadic_to_q(&x), 340);
        ensure(close(&v, &reference, &tail, 30), || format!("sin({x})"))?;
        worst = worst.max(err_bits(&v, &reference));
    }
    Ok(format!("100 points at 2^-30; worst error 2^{worst:.1}"))
}

fn err_bits(a: &Q, b: &Q) -> f64 {
    use num_traits::ToPrimitive;
    let d = (a - b).abs().to_f64().unwrap_or(0.0);
    if d == 0.0 {
        f64::NEG_INFINITY
    } else {
        d.log2()
    }
}

fn c5() -> Check {
    let mut r = rng(5);
    let fs: [(&str, Exact); 3] = [
        ("t", |x| x.clone()),
        ("t*t", |x| x * x),
        ("3/4*t + 1/8", |x| x * q(3, 4) + q(1, 8)),
    ];
    let mut xs: Vec<(RealName, Q)> = Vec::new();
    for _ in 0..50 {
        let d = Dyadic::new(r.gen_range(0..=1i64 << 40), 40);
        xs.push((real_from_dyadic(&d), dyadic_to_q(&d)));
    }
    for _ in 0..50 {
        let b: i64 = r.gen_range(1..1000);
        let a: i64 = r.gen_range(0..=b);
        let name = RealName::from_approx(1, 2, move |i| {
            Ok(Dyadic::new(BigInt::from(a) * (BigInt::one() << (i + 2)) / b, i + 2))
        });
        xs.push((name, q(a, b)));
    }
    for (src, exact) in fs {
        let f = parse_expr(src).ctx(src)?.to_cfun(Domain::Unit).ctx(src)?;
        for (x, qx) in &xs {
            let y = apply(&f, x).ctx("apply")?;
            let v = answer_q(&y.name().query(&unary(20)).ctx("apply")?)?;
            ensure(close(&v, &exact(qx), &Q::zero(), 20), || format!("{src} at {qx}"))?;
        }
    }
    Ok("3 functions x 100 reals within 2^-20".into())
}

fn ivp_cases() -> Vec<(&'static str, Reference)> {
    vec![
        ("0", |_| (Q::zero(), Q::zero())),
        ("2*t", |t| (t * t, Q::zero())),
        ("(y+1)*1/100", |t| {
            let (e, tail) = exp_series(&(t * q(1, 4)), 80);
            (e - Q::one(), tail)
        }),
    ]
}

fn c6() -> Check {
    let grid: Vec<Dyadic> = (0..100i64).map(|i| Dyadic::new((i * 1024 + 49) / 99, 10)).collect();
    let mut total_steps = 0u64;
    for (src, h) in ivp_cases() {
        let g = parse_expr(src).ctx(src)?.to_lip(None).ctx(src)?;
        let ivp = lip_ivp(&g).ctx("lip_ivp")?;
        let refs: Vec<(Q, Q)> = grid.iter().map(|u| h(&dyadic_to_q(u))).collect();
        // magnitude exponent from the name: smallest M with 2^M >= |g(0,0)| + 1 + 2^mu(0)
        let v0 = dyadic_to_q(&g.f().approx(0, &[Dyadic::zero(), Dyadic::zero()]).ctx("g")?).abs();
        let mu0 = g.f().modulus(0).ctx("modulus")? as i64;
        let target = v0 + Q::one() + pow2(mu0);
        let m = (0..).find(|&k| pow2(k) >= target).expect("finite");
        ensure(ivp.m() == m as u64, || format!("{src}: M = {} but the formula gives {m}", ivp.m()))?;
        let l = g.lipschitz() as u64;
        for n in 0..=10u64 {
            let qn = n + 8 * l;
            let p = (g.f().modulus(qn as usize).ctx("modulus")? as u64).max(qn + m as u64);
            let sched = ivp.schedule(n).ctx("schedule")?;
            ensure(sched.p == p && sched.q == qn, || format!("{src} n={n}: schedule {sched:?}, expected p={p} q={qn}"))?;
            let batch = ivp.solve_batch(n, &grid).ctx(src)?;
            ensure(batch.steps == 1u64 << p, || format!("{src} n={n}: {} steps, scheduled 2^{p}", batch.steps))?;
            total_steps += batch.steps;
            for ((u, v), (hv, tail)) in grid.iter().zip(&batch.values).zip(&refs) {
                ensure(close(&dyadic_to_q(v), hv, tail, n as i64), || format!("{src} n={n} u={u}: {v}"))?;
            }
            // the name answers with the same values
            if n <= 4 {
                for u in grid.iter().step_by(11) {
                    let a = ivp.cfun().approx_via_name(n, std::slice::from_ref(u)).ctx("name")?;
                    let i = grid.iter().position(|w| w == u).expect("grid point");
                    ensure(a == batch.values[i], || format!("{src} n={n} u={u}: name answers {a}"))?;
                }
            }
        }
    }
    Ok(format!("3 equations, n <= 10, 100 points; {total_steps} Euler steps"))
}

fn c7() -> Check {
    let n = 8u64;
    let samples: Vec<Dyadic> = (0..=64).map(|j| Dyadic::new(j, 6)).collect();
    let mut worst = String::new();
    for (src, h) in ivp_cases() {
        let g = parse_expr(src).ctx(src)?.to_lip(None).ctx(src)?;
        let reference = |p: &[Dyadic]| {
            let (v, tail) = h(&dyadic_to_q(&p[0]));
            let scale = BigInt::one() << 100usize;
            let num = (v * Q::from_integer(scale.clone())).floor().to_integer();
            let d = Dyadic::new(num, 100);
            (d, Dyadic::new(tail.ceil().to_integer() + 1, 0).min(Dyadic::new(1, 90)))
        };
        let report = check_euler_certificate(&g, &reference, n, &samples).ctx(src)?;
        let l = g.lipschitz() as i64;
        let mut max_ratio = 0.0f64;
        for c in &report.points {
            let t = dyadic_to_q(&c.t);
            let (hv, tail) = h(&t);
            let err = (dyadic_to_q(&c.approx) - hv).abs() + tail;
            // e^(4L(t-1)) from below
            let (e, etail) = exp_series(&(Q::from_integer(BigInt::from(4 * l)) * (t - Q::one())), 80);
            let envelope = (e - etail) * pow2(-(n as i64));
            ensure(err <= envelope, || format!("{src} t={}: error exceeds the envelope", c.t))?;
            use num_traits::ToPrimitive;
            max_ratio = max_ratio.max((err / envelope).to_f64().unwrap_or(0.0));
        }
        ensure(report.ok(), || format!("{src}: library certificate failed"))?;
        worst.push_str(&format!("{src}: {max_ratio:.3}; "));
    }
    Ok(format!("n = 8, 65 points; worst error/envelope {}", worst.trim_end_matches("; ")))
}

fn c8() -> Check {
    const SCALE: u32 = 10;
    let mut r = rng(8);
    let mut queries = 0u64;
    let (mut ones_near, mut zeros_far) = (0u64, 0u64);
    for set_no in 0..20 {
        let k = r.gen_range(1..=10);
        let pts: Vec<(Dyadic, Dyadic)> = (0..k)
            .map(|_| {
                let e = r.gen_range(0..=8u64);
                let side = 1i64 << e;
                (Dyadic::new(r.gen_range(0..=side), e), Dyadic::new(r.gen_range(0..=side), e))
            })
            .collect();
        let oracle = HullOracle::new(
            pts.iter()
                .map(|(x, y)| {
                    let g = |d: &Dyadic| i128::try_from(d.numerator_at(SCALE as u64)).expect("small");
                    (g(x), g(y))
                })
                .collect(),
            SCALE,
        );
        let set = set_from_exact(&ExactSet::Points(pts)).ctx("set")?;
        let hull = convex_hull(&set, HullOptions { max_prec: 6, parallel: true });
        for n in 0..=6u32 {
            let e = n as u64 + 2;
            let margin = 12i64;
            for i in -margin..=(1i64 << e) + margin {
                for j in -margin..=(1i64 << e) + margin {
                    let (u, v) = (Dyadic::new(i, e), Dyadic::new(j, e));
                    let shift = SCALE - e as u32;
                    let d = oracle.dist2(((i as i128) << shift, (j as i128) << shift));
                    let near = oracle.cmp(d, 1, n) == Ordering::Less;
                    let far = oracle.cmp(d, 2, n) == Ordering::Greater;
                    if !near && !far {
                        continue;
                    }
                    let a = set_query(&hull, &u, &v, n as u64).ctx("hull")?;
                    queries += 1;
                    ensure(!near || a, || format!("set {set_no} n={n} ({u}, {v}): answered 0 within 2^-n"))?;
                    ensure(!far || !a, || format!("set {set_no} n={n} ({u}, {v}): answered 1 beyond 2^(1-n)"))?;
                    ones_near += near as u64;
                    zeros_far += far as u64;
                }
            }
        }
    }
    Ok(format!("20 sets, n <= 6: {queries} decided queries ({ones_near} near, {zeros_far} far)"))
}

fn random_formula(r: &mut ChaCha8Rng, depth: u32, vars: u32) -> F {
    let leaf = depth == 0 || r.gen_bool(0.3);
    if leaf {
        return match r.gen_range(0..10) {
            0 => F::Const(r.gen_bool(0.5)),
            _ => F::Var(r.gen_range(1..=vars)),
        };
    }
    match r.gen_range(0..4) {
        0 => F::Not(Box::new(random_formula(r, depth - 1, vars))),
        1 => F::And(Box::new(random_formula(r, depth - 1, vars)), Box::new(random_formula(r, depth - 1, vars))),
        2 => F::Or(Box::new(random_formula(r, depth - 1, vars)), Box::new(random_formula(r, depth - 1, vars))),
        _ => {
            let k = r.gen_range(1..=3);
            F::P((0..k).map(|_| random_formula(r, depth - 1, vars)).collect())
        }
    }
}

fn hashed_pred(seed: u64) -> PredName {
    PredName::from_fn(move |w| oracle::hash_bit(seed, w))
}

fn c9() -> Check {
    let caps = Caps::default();
    let mut r = rng(9);
    let seeds: Vec<u64> = (0..8).map(|_| r.gen()).collect();
    let preds: Vec<PredName> = seeds.iter().map(|&s| hashed_pred(s)).collect();
    let (mut yes, mut total) = (0, 0);
    for _ in 0..500 {
        let w = r.gen_range(0..8);
        let (seed, p) = (seeds[w], &preds[w]);
        let pf = move |s: &str| oracle::hash_bit(seed, s);
        let unicode = r.gen_bool(0.5);

        let f = random_formula(&mut r, 3, 4);
        let text = f.text(unicode);
        let want = qbf_truth(&[], &f, &pf);
        let got = sat2(p, &text, &caps).ctx(&text)?;
        ensure(got == want, || format!("sat2 {text}: {got} vs {want}"))?;

        let nq = r.gen_range(0..=3);
        let mut vars: Vec<u32> = (1..=4).collect();
        let mut prefix = Vec::new();
        for _ in 0..nq {
            let v = vars.remove(r.gen_range(0..vars.len()));
            prefix.push((r.gen_bool(0.5), v));
        }
        let g = random_formula(&mut r, 3, 4);
        let ptext: String = prefix
            .iter()
            .map(|&(all, v)| match (all, unicode) {
                (true, true) => format!("∀a{v}."),
                (false, true) => format!("∃a{v}."),
                (true, false) => format!("A a{v}. "),
                (false, false) => format!("E a{v}. "),
            })
            .collect();
        let text = format!("{ptext}{}", g.text(unicode));
        let want = qbf_truth(&prefix, &g, &pf);
        let got = qbf2(p, &text, &caps).ctx(&text)?;
        ensure(got == want, || format!("qbf2 {text}: {got} vs {want}"))?;

        let ulen = r.gen_range(0..=4);
        let u: String = (0..ulen).map(|_| if r.gen_bool(0.5) { '1' } else { '0' }).collect();
        let n = r.gen_range(0..=4usize);
        let want = (0..1u32 << n).any(|x| {
            let v: String = (0..n).rev().map(|b| if x >> b & 1 == 1 { '1' } else { '0' }).collect();
            pf(&tuple(&[&u, &v]))
        });
        let got = exist2(p, &u, n, &caps).ctx("exist2")?;
        ensure(got == want, || format!("exist2 u={u} n={n}: {got} vs {want}"))?;
        yes += want as u32;
        total += 3;
    }
    // affine maps u -> a u + c mod 2^|u|, composed with themselves |u| times in closed form
    let maps: [(u64, u64); 5] = [(1, 1), (1, 3), (3, 0), (2, 0), (5, 1)];
    let mut runs = 0;
    for (a, c) in maps {
        let f = Name::with_size(
            move |u| {
                let k = u.len();
                let mask = if k == 0 { 0 } else { u64::MAX >> (64 - k) };
                let x = if k == 0 { 0 } else { u64::from_str_radix(u, 2).expect("bits") };
                let y = a.wrapping_mul(x).wrapping_add(c) & mask;
                Ok(format!("{y:0k$b}").chars().rev().take(k).collect::<Vec<_>>().into_iter().rev().collect())
            },
            SizeFn::identity(),
        );
        for k in 0..=16usize {
            let mask = if k == 0 { 0 } else { u64::MAX >> (64 - k) };
            let (mut pa, mut pc) = (a & mask, c & mask);
            for _ in 0..k {
                pc = (pa.wrapping_mul(pc).wrapping_add(pc)) & mask;
                pa = pa.wrapping_mul(pa) & mask;
            }
            let us: Vec<u64> = if k <= 10 {
                (0..1u64 << k).collect()
            } else {
                let mut v = vec![0];
                v.extend((0..4).map(|_| r.gen_range(0..=mask)));
                v
            };
            for x in us {
                let u = if k == 0 { String::new() } else { format!("{x:0k$b}") };
                let want = pa.wrapping_mul(x).wrapping_add(pc) & mask == 0;
                let got = power2(&f, &u, &caps).ctx("power2")?;
                ensure(got == want, || format!("power2 a={a} c={c} u={u}: {got} vs {want}"))?;
                runs += 1;
            }
        }
    }
    Ok(format!("{total} sat/qbf/exist instances ({yes} exist-true); {runs} power runs, |u| <= 16"))
}

/// Answer lengths of `name` over `samples` grouped by query length; the name
/// is regular on them when every answer to a shorter query is no longer
/// than every answer to a longer one.
fn regular_on(name: &Name, samples: &[String]) -> Result<bool, String> {
    let mut by_len: std::collections::BTreeMap<usize, (usize, usize)> = Default::default();
    for s in samples {
        let a = name.query(s).ctx("query")?.len();
        let e = by_len.entry(s.len()).or_insert((a, a));
        e.0 = e.0.min(a);
        e.1 = e.1.max(a);
    }
    let mut prev_max = 0;
    for (_, (lo, hi)) in by_len {
        if lo < prev_max {
            return Ok(false);
        }
        prev_max = prev_max.max(hi);
    }
    Ok(true)
}

fn random_bits(r: &mut ChaCha8Rng, len: usize) -> String {
    (0..len).map(|_| if r.gen_bool(0.5) { '1' } else { '0' }).collect()
}

fn c10() -> Check {
    let mut r = rng(10);
    let table = |r: &mut ChaCha8Rng| {
        let mut acc = r.gen_range(0..3usize);
        (0..=40).map(|_| {
            acc += r.gen_range(0..3);
            acc
        })
        .collect::<Vec<usize>>()
    };
    let filler = |t: Vec<usize>, seed: u64| {
        Name::from_fn(move |u| (0..t[u.len()]).map(|i| if oracle::hash_bit(seed, &format!("{u}/{i}")) { '1' } else { '0' }).collect())
    };
    let mut checked = 0;
    for trial in 0..20u64 {
        let (s1, s2) = (table(&mut r), table(&mut r));
        let phi = filler(s1.clone(), trial);
        let psi = filler(s2.clone(), trial + 100);
        let pp = pair(&phi, &psi);
        let big: Vec<usize> = s1.iter().zip(&s2).map(|(a, b)| a + b).collect();
        let wide = filler(big.clone(), trial + 200);
        let padded = pad(&phi, &wide);
        for n in 0..=32usize {
            for _ in 0..4 {
                let w = random_bits(&mut r, n + 1);
                let got = pp.query(&w).ctx("pair")?.len();
                ensure(got == s1[n] + s2[n] + 1, || format!("|<phi,psi>|({}) = {got}, want {}", n + 1, s1[n] + s2[n] + 1))?;
                let u = random_bits(&mut r, n);
                let a = padded.query(&u).ctx("pad")?;
                ensure(a.len() == big[n], || format!("pad length {} at {n}, want {}", a.len(), big[n]))?;
                ensure(a.trim_end_matches('#') == phi.query(&u).ctx("phi")?, || "strip after pad".into())?;
                checked += 1;
            }
        }
        let mut samples: Vec<String> = (0..=32).map(unary).collect();
        samples.extend((0..=32).flat_map(|n| (0..3).map(move |_| n)).map(|n| random_bits(&mut r, n)));
        ensure(regular_on(&pp, &samples)?, || "pair is not regular".into())?;
        ensure(regular_on(&padded, &samples)?, || "pad is not regular".into())?;
    }

    // every constructor
    let x = real_from_dyadic(&Dyadic::new(-5, 3));
    let y = real_from_dyadic(&Dyadic::new(3, 1));
    let set = set_from_exact(&ExactSet::Points(vec![(Dyadic::new(1, 2), Dyadic::new(3, 2))])).ctx("set")?;
    let f = parse_expr("t*t - 1/2").ctx("expr")?;
    let g = parse_expr("(y+1)*1/100").ctx("expr")?.to_lip(None).ctx("lip")?;
    let ivp = lip_ivp(&g).ctx("ivp")?;
    let names: Vec<(&str, Name, usize)> = vec![
        ("real_from_dyadic", x.name().clone(), 32),
        ("real_add", real_add(&x, &y).name().clone(), 32),
        ("real_mul", real_mul(&x, &y).name().clone(), 32),
        ("real_neg", real_neg(&x).name().clone(), 32),
        ("real_exp01", real_exp01(&y).name().clone(), 32),
        ("real_sin", real_sin(&y).name().clone(), 32),
        ("expr real", parse_expr("sin(1)*3").ctx("expr")?.real_name().ctx("real")?.name().clone(), 32),
        ("cfun unit", f.to_cfun(Domain::Unit).ctx("cfun")?.name().clone(), 32),
        ("cfun rect", parse_expr("t*y").ctx("expr")?.to_cfun(Domain::Rect).ctx("cfun")?.name().clone(), 32),
        ("lip", g.name().clone(), 32),
        ("apply", apply(&f.to_cfun(Domain::Unit).ctx("cfun")?, &real_from_dyadic(&Dyadic::new(1, 1))).ctx("apply")?.name().clone(), 32),
        ("lip_ivp", ivp.cfun().name().clone(), 14),
        ("set", set.name().clone(), 32),
        ("hull", convex_hull(&set, HullOptions::default()).name().clone(), 32),
    ];
    for (what, name, upto) in &names {
        let mut samples: Vec<String> = (0..=*upto).map(unary).collect();
        for n in 0..=*upto {
            for _ in 0..3 {
                samples.push(random_bits(&mut r, n));
            }
        }
        // well-formed queries for the approximation side of function names
        if what.starts_with("cfun") || *what == "lip_ivp" {
            let dims = if *what == "cfun rect" { 2 } else { 1 };
            for n in 0..=(*upto as u64 / 4) {
                let pts: Vec<Dyadic> = (0..dims).map(|_| Dyadic::new(r.gen_range(0..64), 6)).collect();
                let q = format!("1{}", sonda::cfun::approx_query(n, &pts));
                if q.len() <= *upto {
                    samples.push(q);
                }
            }
        }
        ensure(regular_on(name, &samples).ctx(what)?, || format!("{what} is not regular"))?;
        checked += samples.len();
    }
    Ok(format!("{checked} sampled queries, n <= 32; {} constructors regular", names.len()))
}

fn c11() -> Check {
    let mut r = rng(11);
    let mut reals: Vec<RealName> = Vec::new();
    for bound in [1u32, 8, 64, 256, 1024] {
        for slack in [2u64, 8] {
            let v = random_dyadic(&mut r, bound.min(4) - 1, 20).clamp_to(&Dyadic::from_int(-(1i64 << (bound.min(4) - 1))), &Dyadic::from_int(1i64 << (bound.min(4) - 1)));
            let v = if bound == 1 { Dyadic::new(r.gen_range(-3..=3), 2) } else { v };
            reals.push(RealName::from_approx(bound, slack, move |i| Ok(v.round_to(i + slack))));
        }
    }
    let funs: Vec<_> = ["t*t", "3/4*t + 1/8", "sin(3*t)"]
        .iter()
        .map(|s| parse_expr(s).and_then(|e| e.to_cfun(Domain::Unit)))
        .collect::<Result<_, _>>()
        .ctx("fun")?;
    let ns: Vec<u64> = (0..=20).chain([24, 32]).collect();
    let mut runs = 0;
    let mut min_ratio = f64::INFINITY;
    for op in CATALOG {
        let oracles: Vec<Name> = match op.oracle {
            Oracle::Real => reals.iter().map(|x| x.name().clone()).collect(),
            Oracle::RealPair => reals
                .iter()
                .zip(reals.iter().rev())
                .map(|(x, y)| real_pair(x, y))
                .chain(reals.iter().map(|x| real_pair(x, x)))
                .collect(),
            Oracle::FunReal => funs.iter().flat_map(|f| reals.iter().map(move |x| fun_real_pair(f, x))).collect(),
        };
        for &n in &ns {
            let sizes: Vec<usize> = oracles.iter().map(|o| o.size_of(n as usize)).collect::<Result<_, _>>().ctx("size")?;
            let (lo, hi) = (*sizes.iter().min().expect("corpus"), *sizes.iter().max().expect("corpus"));
            min_ratio = min_ratio.min(hi as f64 / lo as f64);
            for o in &oracles {
                let out = op.run(o, n).ctx(op.name)?;
                ensure(out.bound.is_some_and(|b| out.cost <= b), || format!("{} at n={n}: cost {} over {:?}", op.name, out.cost, out.bound))?;
                runs += 1;
            }
        }
    }
    ensure(min_ratio >= 4.0, || format!("name sizes vary only {min_ratio:.2}x"))?;
    Ok(format!("{} operators, {runs} metered runs; sizes vary >= {min_ratio:.1}x", CATALOG.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_dyadics_respect_range() {
        let mut r = rng(0);
        for _ in 0..1000 {
            let d = random_dyadic(&mut r, 10, 24);
            assert!(d.abs() < Dyadic::from_int(1024));
        }
    }

    #[test]
    fn regularity_probe() {
        let bad = Name::from_fn(|u| if u.len() == 3 { "x".into() } else { "xx".into() });
        let samples: Vec<String> = (0..6).map(unary).collect();
        assert!(!regular_on(&bad, &samples).unwrap());
        let good = Name::from_fn(|u| "y".repeat(u.len() / 2));
        assert!(regular_on(&good, &samples).unwrap());
    }
}
