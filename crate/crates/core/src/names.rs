//! Regular string functions used as oracles ("names").
//!
//! A [`Name`] is a total, fallible `&str -> String` map. Regularity
//! (longer queries never give shorter answers) cannot be checked exhaustively,
//! so names record the answer lengths they have produced and fault on any
//! contradiction they observe.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::encoding::unary;
use crate::error::{Result, SondaError};

/// Padding symbol appended to answers to reach a length schedule.
pub const PAD: char = '#';

/// A non-decreasing `N -> N` map (the size of a regular function).
#[derive(Clone)]
pub struct SizeFn(Arc<dyn Fn(usize) -> usize + Send + Sync>);

impl SizeFn {
    pub fn new(f: impl Fn(usize) -> usize + Send + Sync + 'static) -> Self {
        SizeFn(Arc::new(f))
    }

    pub fn eval(&self, n: usize) -> usize {
        (self.0)(n)
    }

    pub fn identity() -> Self {
        SizeFn::new(|n| n)
    }

    pub fn square() -> Self {
        SizeFn::new(|n| n.saturating_mul(n))
    }

    pub fn constant(k: usize) -> Self {
        SizeFn::new(move |_| k)
    }

    /// Table lookup, extended by its last entry. The table is made
    /// monotone by running maximum so the result is always a valid size.
    pub fn from_table(values: Vec<usize>) -> Self {
        let mut acc = 0;
        let table: Vec<usize> = values
            .into_iter()
            .map(|v| {
                acc = acc.max(v);
                acc
            })
            .collect();
        SizeFn::new(move |n| match table.get(n) {
            Some(&v) => v,
            None => table.last().copied().unwrap_or(0),
        })
    }

    /// `m <= n => eval(m) <= eval(n)` on `0..=upto`.
    pub fn is_monotone_upto(&self, upto: usize) -> bool {
        (0..upto).all(|n| self.eval(n) <= self.eval(n + 1))
    }
}

impl fmt::Debug for SizeFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head: Vec<usize> = (0..4).map(|n| self.eval(n)).collect();
        write!(f, "SizeFn({head:?}..)")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegularityMode {
    /// Only `size_of` probes are recorded.
    Trusted,
    /// Every answer length is recorded and checked against earlier ones.
    Sampled,
}

type QueryFn = dyn Fn(&str) -> Result<String> + Send + Sync;

struct Inner {
    query: Box<QueryFn>,
    size: Option<SizeFn>,
    mode: RegularityMode,
    // input length -> observed answer length
    probes: Mutex<BTreeMap<usize, usize>>,
}

/// A regular string function used as an oracle. Cheap to clone.
#[derive(Clone)]
pub struct Name {
    inner: Arc<Inner>,
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Name")
            .field("size", &self.inner.size)
            .field("mode", &self.inner.mode)
            .finish()
    }
}

impl Name {
    pub fn new(f: impl Fn(&str) -> Result<String> + Send + Sync + 'static) -> Self {
        Name::build(Box::new(f), None, RegularityMode::Trusted)
    }

    /// A name whose answer lengths are promised to follow `size`.
    pub fn with_size(
        f: impl Fn(&str) -> Result<String> + Send + Sync + 'static,
        size: SizeFn,
    ) -> Self {
        Name::build(Box::new(f), Some(size), RegularityMode::Trusted)
    }

    /// Infallible convenience constructor.
    pub fn from_fn(f: impl Fn(&str) -> String + Send + Sync + 'static) -> Self {
        Name::new(move |u| Ok(f(u)))
    }

    fn build(query: Box<QueryFn>, size: Option<SizeFn>, mode: RegularityMode) -> Self {
        Name {
            inner: Arc::new(Inner {
                query,
                size,
                mode,
                probes: Mutex::new(BTreeMap::new()),
            }),
        }
    }

    /// Same function, checked on every query.
    pub fn sampled(&self) -> Name {
        let me = self.clone();
        Name::build(
            Box::new(move |u| me.query(u)),
            self.inner.size.clone(),
            RegularityMode::Sampled,
        )
    }

    pub fn mode(&self) -> RegularityMode {
        self.inner.mode
    }

    pub fn declared_size(&self) -> Option<&SizeFn> {
        self.inner.size.as_ref()
    }

    pub fn query(&self, u: &str) -> Result<String> {
        let answer = (self.inner.query)(u)?;
        if let Some(size) = &self.inner.size {
            let expect = size.eval(u.len());
            if answer.len() != expect {
                return Err(SondaError::MalformedName(format!(
                    "answer of length {} where declared size is {expect} at {}",
                    answer.len(),
                    u.len()
                )));
            }
        }
        if self.inner.mode == RegularityMode::Sampled {
            self.record(u.len(), answer.len())?;
        }
        Ok(answer)
    }

    fn record(&self, len: usize, answer: usize) -> Result<()> {
        let mut probes = self.inner.probes.lock().expect("probe table poisoned");
        if let Some((&l, &a)) = probes.range(..=len).next_back() {
            if a > answer {
                return Err(SondaError::RegularityFault {
                    short_len: l,
                    short_answer: a,
                    long_len: len,
                    long_answer: answer,
                });
            }
        }
        if let Some((&l, &a)) = probes.range(len..).next() {
            if a < answer {
                return Err(SondaError::RegularityFault {
                    short_len: len,
                    short_answer: answer,
                    long_len: l,
                    long_answer: a,
                });
            }
        }
        probes.insert(len, answer);
        Ok(())
    }

    /// `|phi|(n) = |phi(0^n)|`, memoized.
    pub fn size_of(&self, n: usize) -> Result<usize> {
        if let Some(size) = &self.inner.size {
            return Ok(size.eval(n));
        }
        if let Some(&a) = self
            .inner
            .probes
            .lock()
            .expect("probe table poisoned")
            .get(&n)
        {
            return Ok(a);
        }
        let answer = (self.inner.query)(&unary(n))?.len();
        self.record(n, answer)?;
        Ok(answer)
    }

    /// A size function backed by this name; errors read as 0.
    pub fn size_fn(&self) -> SizeFn {
        match &self.inner.size {
            Some(s) => s.clone(),
            None => {
                let me = self.clone();
                SizeFn::new(move |n| me.size_of(n).unwrap_or(0))
            }
        }
    }
}

/// `{0,1}`-valued regular function.
#[derive(Clone, Debug)]
pub struct PredName(Name);

impl PredName {
    pub fn new(name: Name) -> Self {
        PredName(name)
    }

    pub fn from_fn(f: impl Fn(&str) -> bool + Send + Sync + 'static) -> Self {
        PredName(Name::with_size(
            move |u| Ok(if f(u) { "1" } else { "0" }.to_string()),
            SizeFn::constant(1),
        ))
    }

    pub fn name(&self) -> &Name {
        &self.0
    }

    pub fn test(&self, u: &str) -> Result<bool> {
        let a = self.0.query(u)?;
        match a.as_str() {
            "1" => Ok(true),
            "0" => Ok(false),
            _ => Err(SondaError::MalformedName(format!(
                "predicate answered {a:?}"
            ))),
        }
    }
}

pub fn size_of(name: &Name, n: usize) -> Result<usize> {
    name.size_of(n)
}

fn size_at(name: &Name, u: &str) -> Result<usize> {
    match name.declared_size() {
        Some(s) => Ok(s.eval(u.len())),
        None => name.size_of(u.len()),
    }
}

/// `<phi, psi>(0u) = phi(u) 1 0^{|psi(u)|}`, `<phi, psi>(1u) = psi(u) 1 0^{|phi(u)|}`.
/// The empty query is answered like `0` followed by the empty string.
pub fn pair(phi: &Name, psi: &Name) -> Name {
    let (left, right) = (phi.clone(), psi.clone());
    let size = match (phi.declared_size(), psi.declared_size()) {
        (Some(a), Some(b)) => {
            let (a, b) = (a.clone(), b.clone());
            Some(SizeFn::new(move |n| {
                let m = n.saturating_sub(1);
                a.eval(m) + 1 + b.eval(m)
            }))
        }
        _ => None,
    };
    let query = move |w: &str| -> Result<String> {
        let (right_side, rest) = match w.as_bytes().first() {
            Some(b'1') => (true, &w[1..]),
            Some(_) => (false, &w[w.chars().next().map_or(0, char::len_utf8)..]),
            None => (false, w),
        };
        let (main, other) = if right_side {
            (&right, &left)
        } else {
            (&left, &right)
        };
        let mut out = main.query(rest)?;
        let pad = size_at(other, rest)?;
        out.reserve(pad + 1);
        out.push('1');
        out.push_str(&"0".repeat(pad));
        Ok(out)
    };
    match size {
        Some(s) => Name::with_size(query, s),
        None => Name::new(query),
    }
}

/// `<<phi, psi>, theta>`.
pub fn pair3(phi: &Name, psi: &Name, theta: &Name) -> Name {
    pair(&pair(phi, psi), theta)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Strips the `1 0^k` trailer: the separator is the last `1` of the answer.
pub fn split_paired_answer(answer: &str) -> Result<&str> {
    let cut = answer
        .rfind('1')
        .ok_or_else(|| SondaError::MalformedName(format!("no pair separator in {answer:?}")))?;
    if !answer[cut + 1..].bytes().all(|b| b == b'0') {
        return Err(SondaError::MalformedName(format!(
            "bad pair trailer in {answer:?}"
        )));
    }
    Ok(&answer[..cut])
}

/// Recovers one component of a paired name.
pub fn project(side: Side, paired: &Name) -> Name {
    let paired = paired.clone();
    let tag = match side {
        Side::Left => '0',
        Side::Right => '1',
    };
    Name::new(move |u| {
        let mut w = String::with_capacity(u.len() + 1);
        w.push(tag);
        w.push_str(u);
        let a = paired.query(&w)?;
        Ok(split_paired_answer(&a)?.to_string())
    })
}

/// Pads `phi_prime(u)` with `#` up to `|psi|(|u|)`.
pub fn pad(phi_prime: &Name, psi: &Name) -> Name {
    let (inner, dom) = (phi_prime.clone(), psi.clone());
    let query = move |u: &str| -> Result<String> {
        let mut a = inner.query(u)?;
        let target = size_at(&dom, u)?;
        if a.len() > target {
            return Err(SondaError::DominationFault {
                answer: a.len(),
                bound: target,
            });
        }
        let fill = target - a.len();
        a.push_str(&PAD.to_string().repeat(fill));
        Ok(a)
    };
    match psi.declared_size() {
        Some(s) => Name::with_size(query, s.clone()),
        None => Name::new(query),
    }
}

/// Pads a raw answer string to `target` symbols.
pub fn pad_to(mut s: String, target: usize) -> Result<String> {
    if s.len() > target {
        return Err(SondaError::DominationFault {
            answer: s.len(),
            bound: target,
        });
    }
    let fill = target - s.len();
    s.push_str(&PAD.to_string().repeat(fill));
    Ok(s)
}

pub fn strip_padding(s: &str) -> &str {
    s.trim_end_matches(PAD)
}

/// The name with value `u` everywhere.
pub fn const_name(u: &str) -> Name {
    let value = u.to_string();
    Name::with_size(move |_| Ok(value.clone()), SizeFn::constant(u.len()))
}

/// `u -> u`.
pub fn identity_name() -> Name {
    Name::with_size(|u| Ok(u.to_string()), SizeFn::identity())
}

/// `u -> 0^{mu(|u|)}`, the name of a modulus function.
pub fn unary_fn_name(mu: impl Fn(usize) -> usize + Send + Sync + Clone + 'static) -> Name {
    let m = mu.clone();
    Name::with_size(move |u| Ok(unary(m(u.len()))), SizeFn::new(mu))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Regularity {
    Ok,
    Counterexample { short: String, long: String },
}

/// Searches `samples` for `|u| <= |v|` with `|phi(u)| > |phi(v)|`.
pub fn check_regularity(phi: &Name, samples: &[String]) -> Result<Regularity> {
    let mut seen: Vec<(usize, usize, &String)> = Vec::with_capacity(samples.len());
    for s in samples {
        seen.push((s.len(), phi.query(s)?.len(), s));
    }
    seen.sort_by_key(|&(l, a, _)| (l, std::cmp::Reverse(a)));
    // longest answer over all inputs no longer than the current one
    let mut best: Option<(usize, &String)> = None;
    for group in seen.chunk_by(|x, y| x.0 == y.0) {
        let (_, gmax, gs) = group[0];
        if best.is_none_or(|(ba, _)| gmax > ba) {
            best = Some((gmax, gs));
        }
        let (ba, bs) = best.expect("set above");
        if let Some(&(_, _, s)) = group.iter().find(|&&(_, a, _)| a < ba) {
            return Ok(Regularity::Counterexample {
                short: bs.clone(),
                long: s.clone(),
            });
        }
    }
    Ok(Regularity::Ok)
}

/// All binary strings of length at most `max_len`, shortest first.
pub fn binary_strings_upto(max_len: usize) -> Vec<String> {
    let mut out = Vec::new();
    for len in 0..=max_len {
        for bits in 0..(1u64 << len) {
            out.push(
                (0..len)
                    .map(|i| if bits >> (len - 1 - i) & 1 == 1 { '1' } else { '0' })
                    .collect(),
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shrinking() -> Name {
        Name::from_fn(|u| unary(4usize.saturating_sub(u.len())))
    }

    #[test]
    fn size_examples() {
        let c = const_name("abc");
        for n in 0..5 {
            assert_eq!(c.size_of(n).unwrap(), 3);
        }
        assert_eq!(identity_name().size_of(5).unwrap(), 5);
        assert_eq!(const_name("").size_of(7).unwrap(), 0);
        assert_eq!(const_name("0000").query("xyz").unwrap(), "0000");
    }

    #[test]
    fn pair_examples() {
        let p = pair(&const_name("ab"), &const_name("c"));
        assert_eq!(p.query("0").unwrap(), "ab10");
        assert_eq!(p.query("1").unwrap(), "c100");
        assert_eq!(p.query("").unwrap(), "ab10");
        assert_eq!(project(Side::Left, &p).query("").unwrap(), "ab");
        assert_eq!(project(Side::Right, &p).query("zz").unwrap(), "c");
    }

    #[test]
    fn projection_handles_trailing_zero_components() {
        // components that themselves end in 1 0^k
        let phi = const_name("+1/100");
        let psi = Name::from_fn(|u| format!("{u}10"));
        let p = pair(&phi, &psi);
        for u in ["", "0", "1011", "0000"] {
            assert_eq!(project(Side::Left, &p).query(u).unwrap(), phi.query(u).unwrap());
            assert_eq!(project(Side::Right, &p).query(u).unwrap(), psi.query(u).unwrap());
        }
    }

    #[test]
    fn pair_size_law_by_enumeration() {
        let phi = Name::from_fn(|u| unary(2 * u.len() + 1));
        let psi = Name::from_fn(|u| unary(u.len() / 2));
        let p = pair(&phi, &psi);
        for n in 0..=8 {
            assert_eq!(
                p.size_of(n + 1).unwrap(),
                phi.size_of(n).unwrap() + psi.size_of(n).unwrap() + 1
            );
        }
        let samples = binary_strings_upto(6);
        assert_eq!(check_regularity(&p, &samples).unwrap(), Regularity::Ok);
    }

    #[test]
    fn nested_pairs_associate_left() {
        let (a, b, c) = (const_name("a"), const_name("bb"), const_name("ccc"));
        let t = pair3(&a, &b, &c);
        let ab = project(Side::Left, &t);
        assert_eq!(project(Side::Left, &ab).query("u").unwrap(), "a");
        assert_eq!(project(Side::Right, &ab).query("u").unwrap(), "bb");
        assert_eq!(project(Side::Right, &t).query("u").unwrap(), "ccc");
    }

    #[test]
    fn pad_examples() {
        let p = pad(&const_name("x"), &const_name("000"));
        assert_eq!(p.query("anything").unwrap(), "x##");
        assert_eq!(strip_padding(&p.query("").unwrap()), "x");
        let id = identity_name();
        assert_eq!(pad(&id, &id).query("0101").unwrap(), "0101");
        let too_long = pad(&const_name("xxxx"), &const_name("00"));
        assert!(matches!(
            too_long.query("u"),
            Err(SondaError::DominationFault { answer: 4, bound: 2 })
        ));
    }

    #[test]
    fn pad_regularises_irregular_names() {
        let irregular = Name::from_fn(|u| "1".repeat(u.bytes().filter(|&b| b == b'1').count()));
        let dom = identity_name();
        let p = pad(&irregular, &dom);
        let samples = binary_strings_upto(5);
        assert_eq!(check_regularity(&p, &samples).unwrap(), Regularity::Ok);
        for s in &samples {
            let a = p.query(s).unwrap();
            assert_eq!(a.len(), s.len());
            assert_eq!(strip_padding(&a), irregular.query(s).unwrap());
        }
    }

    #[test]
    fn regularity_counterexample() {
        let samples = vec![String::new(), "0000".to_string()];
        assert_eq!(
            check_regularity(&shrinking(), &samples).unwrap(),
            Regularity::Counterexample {
                short: String::new(),
                long: "0000".to_string()
            }
        );
        assert_eq!(
            check_regularity(&const_name("q"), &binary_strings_upto(3)).unwrap(),
            Regularity::Ok
        );
    }

    #[test]
    fn sampled_mode_faults() {
        let s = shrinking().sampled();
        s.query("").unwrap();
        assert!(matches!(
            s.query("0000"),
            Err(SondaError::RegularityFault { .. })
        ));
        let t = shrinking();
        t.size_of(0).unwrap();
        assert!(matches!(t.size_of(3), Err(SondaError::RegularityFault { .. })));
    }

    #[test]
    fn declared_size_is_enforced() {
        let liar = Name::with_size(|_| Ok("ab".into()), SizeFn::constant(3));
        assert!(matches!(liar.query(""), Err(SondaError::MalformedName(_))));
    }

    #[test]
    fn predicates() {
        let p = PredName::from_fn(|u| u.ends_with('1'));
        assert!(p.test("01").unwrap());
        assert!(!p.test("").unwrap());
        let bad = PredName::new(const_name("10"));
        assert!(matches!(bad.test("x"), Err(SondaError::MalformedName(_))));
    }

    #[test]
    fn size_fn_table() {
        let s = SizeFn::from_table(vec![1, 3, 2, 5]);
        assert_eq!((0..6).map(|n| s.eval(n)).collect::<Vec<_>>(), vec![1, 3, 3, 5, 5, 5]);
        assert!(s.is_monotone_upto(10));
    }
}
