//! Closed subsets of the unit square as gap predicates.
//!
//! A set name answers `(u, v, 0^n)` with 1 when the point `([u], [v])` is
//! closer than `2^-n` to the set and with 0 when it is farther than
//! `2 * 2^-n`; in between either answer is allowed. Names built here answer 1
//! exactly when the distance is at most `1.5 * 2^-n`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::encoding::{decode_dyadic, tuple_strings, unary, untuple_exact, Dyadic};
use crate::error::{Result, SondaError};
use crate::names::PredName;

pub type Point = (Dyadic, Dyadic);

/// Finite data for a set: a point cloud, or a filled convex polygon given by
/// its vertices (any order; the hull of the list is taken).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactSet {
    Points(Vec<Point>),
    Polygon(Vec<Point>),
}

impl ExactSet {
    pub fn points(&self) -> &[Point] {
        match self {
            ExactSet::Points(p) | ExactSet::Polygon(p) => p,
        }
    }

    /// Every coordinate must lie in `[0,1]`.
    pub fn validate(&self) -> Result<()> {
        let pts = self.points();
        if pts.is_empty() {
            return Err(SondaError::EmptySet);
        }
        let (zero, one) = (Dyadic::zero(), Dyadic::one());
        for (x, y) in pts {
            if *x < zero || *x > one || *y < zero || *y > one {
                return Err(SondaError::OutOfDomain(format!(
                    "point ({x}, {y}) is outside the unit square"
                )));
            }
        }
        Ok(())
    }
}

/// Squared distance `num / (den * 4^scale)`, kept exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dist2 {
    num: BigInt,
    den: BigInt,
    scale: u64,
}

impl Dist2 {
    pub fn zero() -> Self {
        Dist2 {
            num: BigInt::zero(),
            den: BigInt::from(1),
            scale: 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Compares the distance (not its square) with `t >= 0`.
    pub fn cmp_dist(&self, t: &Dyadic) -> Ordering {
        let tn = t.numerator();
        let te = t.exponent();
        // num / (den 4^scale)  vs  tn^2 / 4^te
        let lhs = &self.num << (2 * te);
        let rhs = (tn * tn * &self.den) << (2 * self.scale);
        lhs.cmp(&rhs)
    }

    pub fn to_f64(&self) -> f64 {
        let d = Dyadic::new(self.num.clone(), 2 * self.scale).to_f64();
        d / Dyadic::new(self.den.clone(), 0).to_f64()
    }

    fn less(&self, other: &Dist2) -> bool {
        debug_assert_eq!(self.scale, other.scale);
        &self.num * &other.den < &other.num * &self.den
    }
}

type IPt = (BigInt, BigInt);

fn cross(o: &IPt, a: &IPt, b: &IPt) -> BigInt {
    (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
}

fn cross_i(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i128 {
    (a.0 - o.0) as i128 * (b.1 - o.1) as i128 - (a.1 - o.1) as i128 * (b.0 - o.0) as i128
}

/// Andrew's monotone chain; counter-clockwise, collinear points dropped.
fn monotone_chain<T: Ord + Clone>(mut pts: Vec<T>, turn: impl Fn(&T, &T, &T) -> Ordering) -> Vec<T> {
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<T> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &T>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for p in iter {
            while hull.len() >= start + 2
                && turn(&hull[hull.len() - 2], &hull[hull.len() - 1], p) != Ordering::Greater
            {
                hull.pop();
            }
            hull.push(p.clone());
        }
        hull.pop();
    }
    if hull.len() == 2 && hull[0] == hull[1] {
        hull.pop();
    }
    hull
}

fn seg_dist2(p: &IPt, a: &IPt, b: &IPt) -> (BigInt, BigInt) {
    let ab = (&b.0 - &a.0, &b.1 - &a.1);
    let ap = (&p.0 - &a.0, &p.1 - &a.1);
    let dot = &ap.0 * &ab.0 + &ap.1 * &ab.1;
    let len2 = &ab.0 * &ab.0 + &ab.1 * &ab.1;
    if !dot.is_positive() || len2.is_zero() {
        return (&ap.0 * &ap.0 + &ap.1 * &ap.1, BigInt::from(1));
    }
    if dot >= len2 {
        let bp = (&p.0 - &b.0, &p.1 - &b.1);
        return (&bp.0 * &bp.0 + &bp.1 * &bp.1, BigInt::from(1));
    }
    let c = &ab.0 * &ap.1 - &ab.1 * &ap.0;
    (&c * &c, len2)
}

/// Exact distance from `p` to a counter-clockwise convex polygon (or a
/// segment, or a point), all at the same scale.
fn polygon_dist2(p: &IPt, hull: &[IPt], scale: u64) -> Dist2 {
    if hull.len() >= 3 && (0..hull.len()).all(|i| !cross(&hull[i], &hull[(i + 1) % hull.len()], p).is_negative()) {
        return Dist2::zero();
    }
    let edges = if hull.len() >= 3 { hull.len() } else { 1 };
    let mut best: Option<Dist2> = None;
    for i in 0..edges {
        let a = &hull[i];
        let b = &hull[(i + 1) % hull.len()];
        let (num, den) = seg_dist2(p, a, b);
        let d = Dist2 { num, den, scale };
        if best.as_ref().is_none_or(|c| d.less(c)) {
            best = Some(d);
        }
    }
    best.expect("hull is not empty")
}

fn scale_point(p: &Point, e: u64) -> IPt {
    (p.0.numerator_at(e), p.1.numerator_at(e))
}

fn common_exp<'a>(pts: impl Iterator<Item = &'a Point>) -> u64 {
    pts.map(|(x, y)| x.exponent().max(y.exponent())).max().unwrap_or(0)
}

/// Exact distance from `p` to the convex hull of the data.
pub fn exact_hull_distance(set: &ExactSet, p: &Point) -> Dist2 {
    let e = common_exp(set.points().iter().chain(std::iter::once(p)));
    let pts: Vec<IPt> = set.points().iter().map(|q| scale_point(q, e)).collect();
    let hull = monotone_chain(pts, |o, a, b| cross(o, a, b).sign().cmp_zero());
    polygon_dist2(&scale_point(p, e), &hull, e)
}

/// Vertices of the hull, counter-clockwise from the lowest-leftmost point.
pub fn exact_hull_vertices(set: &ExactSet) -> Vec<Point> {
    let e = common_exp(set.points().iter());
    let pts: Vec<IPt> = set.points().iter().map(|q| scale_point(q, e)).collect();
    monotone_chain(pts, |o, a, b| cross(o, a, b).sign().cmp_zero())
        .into_iter()
        .map(|(x, y)| (Dyadic::new(x, e), Dyadic::new(y, e)))
        .collect()
}

/// Exact distance from `p` to the set itself.
pub fn exact_set_distance(set: &ExactSet, p: &Point) -> Dist2 {
    match set {
        ExactSet::Polygon(_) => exact_hull_distance(set, p),
        ExactSet::Points(pts) => {
            let e = common_exp(pts.iter().chain(std::iter::once(p)));
            let ip = scale_point(p, e);
            pts.iter()
                .map(|q| {
                    let iq = scale_point(q, e);
                    let (dx, dy) = (&ip.0 - &iq.0, &ip.1 - &iq.1);
                    Dist2 {
                        num: &dx * &dx + &dy * &dy,
                        den: BigInt::from(1),
                        scale: e,
                    }
                })
                .reduce(|a, b| if b.less(&a) { b } else { a })
                .expect("validated nonempty")
        }
    }
}

trait CmpZero {
    fn cmp_zero(self) -> Ordering;
}

impl CmpZero for num_bigint::Sign {
    fn cmp_zero(self) -> Ordering {
        match self {
            num_bigint::Sign::Minus => Ordering::Less,
            num_bigint::Sign::NoSign => Ordering::Equal,
            num_bigint::Sign::Plus => Ordering::Greater,
        }
    }
}

/// `1.5 * 2^-n`, the in-band cut used by every name built here.
pub fn band_threshold(n: u64) -> Dyadic {
    Dyadic::new(3, n + 1)
}

/// `(u, v, 0^n)`.
pub fn set_query_string(u: &Dyadic, v: &Dyadic, n: u64) -> String {
    tuple_strings(&[u.encode(), v.encode(), unary(n as usize)])
}

fn parse_set_query(q: &str) -> Option<(Point, u64)> {
    let parts = untuple_exact(q, 3).ok()?;
    if !parts[2].bytes().all(|b| b == b'0') {
        return None;
    }
    let u = decode_dyadic(&parts[0]).ok()?;
    let v = decode_dyadic(&parts[1]).ok()?;
    Some(((u, v), parts[2].len() as u64))
}

/// Gap-predicate name of exact data. Malformed queries are answered 0.
pub fn set_from_exact(set: &ExactSet) -> Result<PredName> {
    set.validate()?;
    let set = match set {
        ExactSet::Polygon(_) => ExactSet::Polygon(exact_hull_vertices(set)),
        s => s.clone(),
    };
    Ok(PredName::from_fn(move |q| match parse_set_query(q) {
        Some((p, n)) => exact_set_distance(&set, &p).cmp_dist(&band_threshold(n)) != Ordering::Greater,
        None => false,
    }))
}

pub fn set_query(s: &PredName, u: &Dyadic, v: &Dyadic, n: u64) -> Result<bool> {
    s.test(&set_query_string(u, v, n))
}

/// Hull of the grid points accepted at one precision.
#[derive(Debug)]
struct GridHull {
    exp: u64,
    exact: Vec<IPt>,
    approx: Vec<(f64, f64)>,
}

impl GridHull {
    fn build(s: &PredName, n: u64, parallel: bool) -> Result<GridHull> {
        let exp = n + 3;
        let side = 1i64 << exp;
        let column = |i: i64| -> Result<Vec<(i64, i64)>> {
            // only the lowest and highest member of a column can be a vertex
            let x = Dyadic::new(i, exp);
            let member = |j: i64| set_query(s, &x, &Dyadic::new(j, exp), exp);
            let mut out = Vec::new();
            let mut lo = None;
            for j in 0..=side {
                if member(j)? {
                    lo = Some(j);
                    break;
                }
            }
            if let Some(lo) = lo {
                out.push((i, lo));
                for j in (lo + 1..=side).rev() {
                    if member(j)? {
                        out.push((i, j));
                        break;
                    }
                }
            }
            Ok(out)
        };
        let cols: Vec<Vec<(i64, i64)>> = if parallel {
            (0..=side).into_par_iter().map(column).collect::<Result<_>>()?
        } else {
            (0..=side).map(column).collect::<Result<_>>()?
        };
        let members: Vec<(i64, i64)> = cols.into_iter().flatten().collect();
        let hull = monotone_chain(members, |&o, &a, &b| cross_i(o, a, b).cmp(&0));
        let scale = (side as f64).recip();
        Ok(GridHull {
            exp,
            exact: hull.iter().map(|&(x, y)| (BigInt::from(x), BigInt::from(y))).collect(),
            approx: hull.iter().map(|&(x, y)| (x as f64 * scale, y as f64 * scale)).collect(),
        })
    }

    fn within(&self, p: &Point, t: &Dyadic) -> bool {
        if self.exact.is_empty() {
            return false;
        }
        let (px, py) = (p.0.to_f64(), p.1.to_f64());
        if px.abs() <= 4.0 && py.abs() <= 4.0 {
            let d2 = approx_polygon_dist2((px, py), &self.approx);
            let t2 = t.to_f64().powi(2);
            if d2 < t2 * (1.0 - 1e-9) {
                return true;
            }
            if d2 > t2 * (1.0 + 1e-9) {
                return false;
            }
        }
        let e = self.exp.max(p.0.exponent()).max(p.1.exponent());
        let shift = e - self.exp;
        let hull: Vec<IPt> = self.exact.iter().map(|(x, y)| (x << shift, y << shift)).collect();
        polygon_dist2(&scale_point(p, e), &hull, e).cmp_dist(t) != Ordering::Greater
    }
}

fn approx_polygon_dist2(p: (f64, f64), hull: &[(f64, f64)]) -> f64 {
    let cr = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let h = hull.len();
    if h >= 3 && (0..h).all(|i| cr(hull[i], hull[(i + 1) % h], p) >= 0.0) {
        return 0.0;
    }
    let edges = if h >= 3 { h } else { 1 };
    let mut best = f64::INFINITY;
    for i in 0..edges {
        let a = hull[i];
        let b = hull[(i + 1) % h];
        let (abx, aby) = (b.0 - a.0, b.1 - a.1);
        let (apx, apy) = (p.0 - a.0, p.1 - a.1);
        let len2 = abx * abx + aby * aby;
        let t = if len2 == 0.0 { 0.0 } else { ((apx * abx + apy * aby) / len2).clamp(0.0, 1.0) };
        let (dx, dy) = (apx - t * abx, apy - t * aby);
        best = best.min(dx * dx + dy * dy);
    }
    best
}

/// Options for [`convex_hull`].
#[derive(Clone, Copy, Debug)]
pub struct HullOptions {
    /// Queries above this precision fail with `CapExceeded`.
    pub max_prec: u64,
    /// Scan grid columns on the rayon pool.
    pub parallel: bool,
}

impl Default for HullOptions {
    fn default() -> Self {
        HullOptions {
            max_prec: 6,
            parallel: false,
        }
    }
}

/// Gap-predicate name of the convex hull of the set named by `s`.
///
/// At precision `n` every point of the grid of pitch `2^-(n+3)` over the unit
/// square is tested against `s` at precision `n+3`; the query answers 1 iff
/// the point is within `1.5 * 2^-n` of the hull of the accepted grid points.
/// Accepted points are within `2^-(n+2)` of the set, and every point of the
/// set has an accepted grid point within `2^-(n+3)`, which keeps both gap
/// conditions. Grid hulls are cached per precision.
pub fn convex_hull(s: &PredName, opts: HullOptions) -> PredName {
    let s = s.clone();
    let cache: Arc<Mutex<HashMap<u64, Arc<GridHull>>>> = Arc::default();
    let query = move |q: &str| -> Result<String> {
        let Some((p, n)) = parse_set_query(q) else {
            return Ok("0".into());
        };
        if n > opts.max_prec {
            return Err(SondaError::CapExceeded {
                what: "hull precision",
                value: n as usize,
                cap: opts.max_prec as usize,
            });
        }
        let cached = cache.lock().expect("hull cache poisoned").get(&n).cloned();
        let hull = match cached {
            Some(h) => h,
            None => {
                let h = Arc::new(GridHull::build(&s, n, opts.parallel)?);
                cache.lock().expect("hull cache poisoned").insert(n, h.clone());
                h
            }
        };
        Ok(if hull.within(&p, &band_threshold(n)) { "1" } else { "0" }.into())
    };
    PredName::new(crate::names::Name::with_size(query, crate::names::SizeFn::constant(1)))
}

/// Reads a point file: one point per line as two dyadic strings, `#`
/// comments, and an optional `polygon` line marking a filled polygon.
pub fn parse_exact_set(text: &str) -> Result<ExactSet> {
    let mut pts = Vec::new();
    let mut polygon = false;
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let body = line.split('#').next().unwrap_or("").trim();
        let start = offset;
        offset += line.len();
        if body.is_empty() {
            continue;
        }
        if body == "polygon" {
            polygon = true;
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(SondaError::parse(start, "expected two dyadic strings"));
        }
        let x = decode_dyadic(fields[0]).map_err(|e| SondaError::parse(start, e.to_string()))?;
        let y = decode_dyadic(fields[1]).map_err(|e| SondaError::parse(start, e.to_string()))?;
        pts.push((x, y));
    }
    let set = if polygon {
        ExactSet::Polygon(pts)
    } else {
        ExactSet::Points(pts)
    };
    set.validate()?;
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn d(n: i64, e: u64) -> Dyadic {
        Dyadic::new(n, e)
    }

    fn pt(a: i64, b: i64, e: u64) -> Point {
        (d(a, e), d(b, e))
    }

    fn q(s: &PredName, u: &str, v: &str, n: u64) -> bool {
        let u = decode_dyadic(u).unwrap();
        let v = decode_dyadic(v).unwrap();
        set_query(s, &u, &v, n).unwrap()
    }

    #[test]
    fn exact_set_examples() {
        let s = set_from_exact(&ExactSet::Points(vec![pt(0, 0, 0)])).unwrap();
        assert!(q(&s, "+0/1", "+0/1", 5));
        assert!(!q(&s, "+1/1", "+1/1", 3));
        // 1.4 * 2^-4 is inside the band and under the 1.5 cut
        let band = set_from_exact(&ExactSet::Points(vec![pt(0, 0, 0)])).unwrap();
        assert!(set_query(&band, &Dyadic::from_f64(1.4 / 16.0).unwrap(), &Dyadic::zero(), 4).unwrap());
        assert!(set_query(&band, &d(-1, 0), &Dyadic::zero(), 0).unwrap());
        assert!(!set_query(&band, &d(-3, 0), &Dyadic::zero(), 0).unwrap());
        assert!(matches!(
            set_from_exact(&ExactSet::Points(vec![])),
            Err(SondaError::EmptySet)
        ));
    }

    #[test]
    fn malformed_answer_is_rejected() {
        let s = PredName::new(crate::names::Name::from_fn(|_| "10".into()));
        assert!(matches!(
            set_query(&s, &Dyadic::zero(), &Dyadic::zero(), 1),
            Err(SondaError::MalformedName(_))
        ));
    }

    #[test]
    fn gap_conditions_on_a_grid() {
        let set = ExactSet::Points(vec![pt(1, 3, 2), pt(5, 5, 3), pt(7, 1, 3)]);
        let s = set_from_exact(&set).unwrap();
        for n in 0..5u64 {
            let k = n + 2;
            for i in -2..=(1i64 << k) + 2 {
                for j in -2..=(1i64 << k) + 2 {
                    let p = pt(i, j, k);
                    let dist = exact_set_distance(&set, &p);
                    let ans = set_query(&s, &p.0, &p.1, n).unwrap();
                    if dist.cmp_dist(&Dyadic::pow2(-(n as i64))) == Ordering::Less {
                        assert!(ans);
                    }
                    if dist.cmp_dist(&Dyadic::pow2(1 - n as i64)) == Ordering::Greater {
                        assert!(!ans);
                        assert!(!set_query(&s, &p.0, &p.1, n + 1).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn hull_examples() {
        let diag = set_from_exact(&ExactSet::Points(vec![pt(0, 0, 0), pt(1, 1, 0)])).unwrap();
        let h = convex_hull(&diag, HullOptions::default());
        assert!(q(&h, "+1/10", "+1/10", 3));
        assert!(!q(&h, "+11/100", "+1/100", 3));
        let corners = set_from_exact(&ExactSet::Points(vec![
            pt(0, 0, 0),
            pt(1, 0, 0),
            pt(0, 1, 0),
            pt(1, 1, 0),
        ]))
        .unwrap();
        let h = convex_hull(&corners, HullOptions::default());
        assert!(q(&h, "+1/10", "+1/10", 2));
        assert!(matches!(
            set_query(&h, &Dyadic::zero(), &Dyadic::zero(), 7),
            Err(SondaError::CapExceeded { .. })
        ));
    }

    #[test]
    fn hull_distance_basics() {
        let tri = ExactSet::Points(vec![pt(0, 0, 0), pt(1, 0, 0), pt(0, 1, 0)]);
        assert!(exact_hull_distance(&tri, &pt(1, 1, 2)).is_zero());
        let seg = ExactSet::Points(vec![pt(0, 0, 0), pt(1, 0, 1), pt(1, 0, 0)]);
        assert_eq!(exact_hull_vertices(&seg).len(), 2);
        // above the middle of the segment: distance 1/4
        let dist = exact_hull_distance(&seg, &pt(1, 1, 2));
        assert_eq!(dist.cmp_dist(&d(1, 2)), Ordering::Equal);
        // beyond the end: distance to (1,0) is 5/4 along x
        let dist = exact_hull_distance(&seg, &pt(9, 0, 2));
        assert_eq!(dist.cmp_dist(&d(5, 2)), Ordering::Equal);
        let single = ExactSet::Points(vec![pt(1, 1, 1)]);
        assert_eq!(exact_hull_distance(&single, &pt(1, 1, 0)).cmp_dist(&d(1, 1)), Ordering::Greater);
    }

    fn brute_vertices(pts: &[IPt]) -> Vec<IPt> {
        // a point is a vertex iff some half-plane through it has every other
        // point strictly on one side or in the open ray beyond it; test with
        // all-pairs: p is not a vertex iff it lies in a triangle or segment of others
        let mut out = Vec::new();
        'p: for (i, p) in pts.iter().enumerate() {
            let others: Vec<&IPt> = pts.iter().enumerate().filter(|&(j, q)| j != i && q != p).map(|(_, q)| q).collect();
            if pts.iter().take(i).any(|q| q == p) {
                continue;
            }
            for a in 0..others.len() {
                for b in 0..others.len() {
                    let (qa, qb) = (others[a], others[b]);
                    if cross(qa, qb, p).is_zero() {
                        let dot = (&p.0 - &qa.0) * (&qb.0 - &qa.0) + (&p.1 - &qa.1) * (&qb.1 - &qa.1);
                        let len2 = (&qb.0 - &qa.0) * (&qb.0 - &qa.0) + (&qb.1 - &qa.1) * (&qb.1 - &qa.1);
                        if len2.is_positive() && !dot.is_negative() && dot <= len2 {
                            continue 'p;
                        }
                    }
                    for &qc in &others {
                        let s1 = cross(qa, qb, p).sign();
                        let s2 = cross(qb, qc, p).sign();
                        let s3 = cross(qc, qa, p).sign();
                        let area = cross(qa, qb, qc);
                        if !area.is_zero() && s1 == s2 && s2 == s3 && s1 == area.sign() {
                            continue 'p;
                        }
                    }
                }
            }
            out.push(p.clone());
        }
        out.sort();
        out
    }

    #[test]
    fn hull_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let pts: Vec<IPt> = (0..10)
                .map(|_| (BigInt::from(rng.gen_range(0..9)), BigInt::from(rng.gen_range(0..9))))
                .collect();
            let mut fast = monotone_chain(pts.clone(), |o, a, b| cross(o, a, b).sign().cmp_zero());
            fast.sort();
            assert_eq!(fast, brute_vertices(&pts));
        }
    }

    #[test]
    fn file_format() {
        let text = "# corners\n+0/1 +0/1\n+1/1 +1/10  # half\n\n";
        let set = parse_exact_set(text).unwrap();
        assert_eq!(set, ExactSet::Points(vec![pt(0, 0, 0), pt(2, 1, 1)]));
        assert!(matches!(parse_exact_set("polygon\n+0/1 +0/1\n+1/1 +0/1\n+0/1 +1/1\n").unwrap(), ExactSet::Polygon(_)));
        assert!(matches!(parse_exact_set("+0/1\n"), Err(SondaError::Parse { .. })));
        assert!(matches!(parse_exact_set("+11/1 +0/1\n"), Err(SondaError::OutOfDomain(_))));
        assert!(matches!(parse_exact_set("# nothing\n"), Err(SondaError::EmptySet)));
    }

    #[test]
    fn polygon_is_filled() {
        let tri = ExactSet::Polygon(vec![pt(0, 0, 0), pt(1, 0, 0), pt(0, 1, 0)]);
        let s = set_from_exact(&tri).unwrap();
        assert!(set_query(&s, &d(1, 2), &d(1, 2), 6).unwrap());
        assert!(!set_query(&s, &d(7, 3), &d(7, 3), 3).unwrap());
    }
}
