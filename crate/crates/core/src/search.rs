//! Enumeration of multidegrees and search for distinct multidegrees with
//! equal Sullivan data.
//!
//! The search is exhaustive only inside the box described by the
//! [`SearchSpec`]; an empty result says nothing about larger degrees.

use std::collections::BTreeMap;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::invariants::{sullivan_data, Multidegree, SullivanData};

/// Default cap on the number of multidegrees a single search may visit.
pub const DEFAULT_LIMIT: u64 = 2_000_000;

pub const COMPLETENESS_NOTE: &str = "exhaustive only within the enumerated box; \
     no collisions outside the caps are ruled out";

/// Trial division bound used to factor a total-degree target.
const TRIAL_BOUND: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("invalid search: {0}")]
    InvalidSpec(String),
    #[error("enumeration limit {limit} exceeded ({reached} multidegrees)")]
    GuardExceeded {
        limit: u64,
        reached: BigInt,
        partial: SearchStats,
    },
    #[error("total degree {0} has a factor above the trial division range")]
    Unfactored(BigInt),
    #[error("divisor {0} of the target does not fit in a 64-bit degree; set --max-degree")]
    DegreeOverflow(BigInt),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchSpec {
    pub n: u32,
    pub max_degree: Option<u64>,
    pub max_k: usize,
    pub total_degree_target: Option<BigInt>,
    pub shard_count: usize,
    pub limit: u64,
}

impl SearchSpec {
    pub fn new(n: u32, max_degree: u64, max_k: usize) -> Self {
        SearchSpec {
            n,
            max_degree: Some(max_degree),
            max_k,
            total_degree_target: None,
            shard_count: 1,
            limit: DEFAULT_LIMIT,
        }
    }

    pub fn for_total_degree(n: u32, target: BigInt, max_k: usize) -> Self {
        SearchSpec {
            n,
            max_degree: None,
            max_k,
            total_degree_target: Some(target),
            shard_count: 1,
            limit: DEFAULT_LIMIT,
        }
    }

    pub fn with_shards(mut self, shards: usize) -> Self {
        self.shard_count = shards;
        self
    }

    pub fn with_limit(mut self, limit: u64) -> Self {
        self.limit = limit;
        self
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        let bad = |msg: &str| Err(SearchError::InvalidSpec(msg.to_string()));
        if self.n < 3 {
            return bad("collision search needs n >= 3");
        }
        if self.max_k < 1 {
            return bad("max_k must be at least 1");
        }
        if self.shard_count < 1 {
            return bad("shard count must be at least 1");
        }
        match (&self.max_degree, &self.total_degree_target) {
            (Some(0), _) => bad("max_degree must be at least 1"),
            (_, Some(t)) if t < &BigInt::one() => bad("total degree target must be at least 1"),
            (None, None) => bad("either max_degree or a total degree target is required"),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub enumerated: u64,
    pub total_degree_buckets: u64,
    /// Pairs sharing a total degree and a digest, compared exactly.
    pub candidate_pairs: u64,
    /// Candidates whose digests agreed but whose data did not.
    pub digest_false_positives: u64,
    pub pairs: u64,
}

#[derive(Debug, Clone)]
pub struct Collision {
    pub a: Multidegree,
    pub b: Multidegree,
    pub data: SullivanData,
}

#[derive(Debug, Clone)]
pub struct CollisionReport {
    pub spec: SearchSpec,
    /// Everything that was enumerated, in enumeration order.
    pub enumerated: Vec<Multidegree>,
    pub pairs: Vec<Collision>,
    pub stats: SearchStats,
    pub elapsed: Duration,
}

fn guard(limit: u64, reached: u64) -> SearchError {
    SearchError::GuardExceeded {
        limit,
        reached: BigInt::from(reached),
        partial: SearchStats {
            enumerated: reached,
            ..SearchStats::default()
        },
    }
}

/// Number of multisets of size at most `k` drawn from `m` values.
fn box_size(m: u64, k: usize) -> BigInt {
    // C(m + k, k)
    let mut c = BigInt::one();
    for i in 1..=k as u64 {
        c = c * BigInt::from(m + i) / BigInt::from(i);
    }
    c
}

/// All canonical multidegrees in the box, sorted by total degree and then
/// by descending degrees in reverse lexicographic order.
pub fn enumerate(spec: &SearchSpec) -> Result<Vec<Multidegree>, SearchError> {
    spec.validate()?;
    let mut out = match &spec.total_degree_target {
        Some(target) => enumerate_factorizations(spec, target)?,
        None => enumerate_box(spec)?,
    };
    out.sort();
    Ok(out)
}

fn enumerate_box(spec: &SearchSpec) -> Result<Vec<Multidegree>, SearchError> {
    let max_degree = spec.max_degree.expect("validated");
    let size = box_size(max_degree.saturating_sub(1), spec.max_k);
    if size > BigInt::from(spec.limit) {
        return Err(SearchError::GuardExceeded {
            limit: spec.limit,
            reached: size,
            partial: SearchStats::default(),
        });
    }
    let mut out = vec![Multidegree::projective_space()];
    let mut current: Vec<u64> = Vec::new();
    fn rec(current: &mut Vec<u64>, max_part: u64, k_left: usize, out: &mut Vec<Multidegree>) {
        if k_left == 0 {
            return;
        }
        for p in 2..=max_part {
            current.push(p);
            out.push(Multidegree::new(current.iter().copied()).expect("degrees >= 2"));
            rec(current, p, k_left - 1, out);
            current.pop();
        }
    }
    rec(&mut current, max_degree, spec.max_k, &mut out);
    Ok(out)
}

/// Prime factorization by trial division; fails if a cofactor above
/// `TRIAL_BOUND^2` remains.
fn factor(target: &BigInt) -> Result<Vec<(BigInt, u32)>, SearchError> {
    let mut rest = target.clone();
    let mut out = Vec::new();
    let mut p = 2u64;
    while p < TRIAL_BOUND {
        let bp = BigInt::from(p);
        if &bp * &bp > rest {
            break;
        }
        let mut e = 0;
        while rest.is_multiple_of(&bp) {
            rest /= &bp;
            e += 1;
        }
        if e > 0 {
            out.push((bp, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > BigInt::one() {
        let bound = BigInt::from(TRIAL_BOUND);
        if rest >= &bound * &bound {
            return Err(SearchError::Unfactored(target.clone()));
        }
        out.push((rest, 1));
    }
    Ok(out)
}

fn enumerate_factorizations(spec: &SearchSpec, target: &BigInt) -> Result<Vec<Multidegree>, SearchError> {
    let primes = factor(target)?;
    let divisor_count: BigInt = primes.iter().map(|(_, e)| BigInt::from(e + 1)).product();
    if divisor_count > BigInt::from(spec.limit) {
        return Err(SearchError::GuardExceeded {
            limit: spec.limit,
            reached: divisor_count,
            partial: SearchStats::default(),
        });
    }
    let mut divisors = vec![BigInt::one()];
    for (p, e) in &primes {
        let mut next = Vec::with_capacity(divisors.len() * (*e as usize + 1));
        for d in &divisors {
            let mut x = d.clone();
            for _ in 0..=*e {
                next.push(x.clone());
                x *= p;
            }
        }
        divisors = next;
    }
    let cap = spec.max_degree.unwrap_or(u64::MAX);
    let mut parts: Vec<u64> = Vec::new();
    for d in &divisors {
        match d.to_u64() {
            Some(v) if (2..=cap).contains(&v) => parts.push(v),
            Some(_) => {}
            None if spec.max_degree.is_none() => return Err(SearchError::DegreeOverflow(d.clone())),
            None => {}
        }
    }
    parts.sort_unstable_by(|a, b| b.cmp(a));

    struct Walk<'a> {
        parts: &'a [u64],
        limit: u64,
        out: Vec<Multidegree>,
    }
    impl Walk<'_> {
        /// Extends `current` by parts at index `from` or later (parts are
        /// descending) whose product is `rest`.
        fn rec(&mut self, current: &mut Vec<u64>, rest: &BigInt, from: usize, k_left: usize) -> Result<(), SearchError> {
            if rest.is_one() {
                if self.out.len() as u64 >= self.limit {
                    return Err(guard(self.limit, self.out.len() as u64 + 1));
                }
                let md = if current.is_empty() {
                    Multidegree::projective_space()
                } else {
                    Multidegree::new(current.iter().copied()).expect("degrees >= 2")
                };
                self.out.push(md);
                return Ok(());
            }
            if k_left == 0 {
                return Ok(());
            }
            for i in from..self.parts.len() {
                let p = BigInt::from(self.parts[i]);
                // the largest remaining part must be at least rest^(1/k_left)
                if p.pow(k_left as u32) < *rest {
                    break;
                }
                let (q, r) = rest.div_rem(&p);
                if r.is_zero() {
                    current.push(self.parts[i]);
                    self.rec(current, &q, i, k_left - 1)?;
                    current.pop();
                }
            }
            Ok(())
        }
    }
    let mut walk = Walk {
        parts: &parts,
        limit: spec.limit,
        out: Vec::new(),
    };
    walk.rec(&mut Vec::new(), target, 0, spec.max_k)?;
    Ok(walk.out)
}

pub type Digest = fn(&SullivanData) -> u64;

/// Hash of the Pontryagin numbers and Euler characteristic.
pub fn default_digest(sd: &SullivanData) -> u64 {
    let mut h = DefaultHasher::new();
    sd.pontryagin.hash(&mut h);
    sd.euler.hash(&mut h);
    h.finish()
}

pub fn find_collisions(spec: &SearchSpec) -> Result<CollisionReport, SearchError> {
    find_collisions_with(spec, default_digest)
}

/// Like [`find_collisions`] with a caller-supplied digest. The digest only
/// groups candidates; every reported pair is compared exactly.
pub fn find_collisions_with(spec: &SearchSpec, digest: Digest) -> Result<CollisionReport, SearchError> {
    let start = Instant::now();
    let all = enumerate(spec)?;
    let enumerated = all.len() as u64;

    // total degree is necessary for equality and cheap, so bucket on it first
    let mut buckets: BTreeMap<BigInt, Vec<Multidegree>> = BTreeMap::new();
    for md in all {
        buckets.entry(md.total_degree().clone()).or_default().push(md);
    }
    let buckets: Vec<Vec<Multidegree>> = buckets.into_values().collect();
    let shards = spec.shard_count;
    let n = spec.n;

    let results: Vec<(Vec<Collision>, SearchStats)> = (0..shards)
        .into_par_iter()
        .map(|s| {
            let mut pairs = Vec::new();
            let mut stats = SearchStats::default();
            for bucket in buckets.iter().skip(s).step_by(shards) {
                search_bucket(n, bucket, digest, &mut pairs, &mut stats);
            }
            (pairs, stats)
        })
        .collect();

    let mut pairs = Vec::new();
    let mut stats = SearchStats {
        enumerated,
        total_degree_buckets: buckets.len() as u64,
        ..SearchStats::default()
    };
    for (p, s) in results {
        pairs.extend(p);
        stats.candidate_pairs += s.candidate_pairs;
        stats.digest_false_positives += s.digest_false_positives;
    }
    pairs.sort_by(|x, y| (&x.a, &x.b).cmp(&(&y.a, &y.b)));
    stats.pairs = pairs.len() as u64;
    Ok(CollisionReport {
        spec: spec.clone(),
        enumerated: buckets.into_iter().flatten().collect(),
        pairs,
        stats,
        elapsed: start.elapsed(),
    })
}

fn search_bucket(
    n: u32,
    bucket: &[Multidegree],
    digest: Digest,
    pairs: &mut Vec<Collision>,
    stats: &mut SearchStats,
) {
    if bucket.len() < 2 {
        return;
    }
    let mut groups: BTreeMap<u64, Vec<(&Multidegree, SullivanData)>> = BTreeMap::new();
    for md in bucket {
        let sd = sullivan_data(n, md);
        groups.entry(digest(&sd)).or_default().push((md, sd));
    }
    for group in groups.values() {
        for (i, (a, sa)) in group.iter().enumerate() {
            for (b, sb) in &group[i + 1..] {
                stats.candidate_pairs += 1;
                if sa != sb || a == b {
                    stats.digest_false_positives += 1;
                    continue;
                }
                let (a, b) = if a < b { (a, b) } else { (b, a) };
                pairs.push(Collision {
                    a: (*a).clone(),
                    b: (*b).clone(),
                    data: sa.clone(),
                });
            }
        }
    }
}

/// Whether two multidegrees have the same Sullivan data, with both data for
/// inspection.
pub fn verify_pair(n: u32, a: &Multidegree, b: &Multidegree) -> (bool, SullivanData, SullivanData) {
    let sa = sullivan_data(n, a);
    let sb = sullivan_data(n, b);
    (sa == sb, sa, sb)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn md(d: &[u64]) -> Multidegree {
        if d.is_empty() {
            Multidegree::projective_space()
        } else {
            Multidegree::new(d.iter().copied()).unwrap()
        }
    }

    fn listing(v: &[Multidegree]) -> Vec<Vec<u64>> {
        v.iter().map(|m| m.canonical_degrees().to_vec()).collect()
    }

    #[test]
    fn box_enumeration() {
        let got = enumerate(&SearchSpec::new(4, 3, 2)).unwrap();
        assert_eq!(
            listing(&got),
            vec![vec![], vec![2], vec![3], vec![2, 2], vec![3, 2], vec![3, 3]]
        );
    }

    #[test]
    fn factorization_enumeration() {
        let got = enumerate(&SearchSpec::for_total_degree(4, 6.into(), 3)).unwrap();
        assert_eq!(listing(&got), vec![vec![6], vec![3, 2]]);
        let got = enumerate(&SearchSpec::for_total_degree(4, 8.into(), 3)).unwrap();
        assert_eq!(listing(&got), vec![vec![8], vec![4, 2], vec![2, 2, 2]]);
        let got = enumerate(&SearchSpec::for_total_degree(4, 8.into(), 2)).unwrap();
        assert_eq!(listing(&got), vec![vec![8], vec![4, 2]]);
        let got = enumerate(&SearchSpec::for_total_degree(4, 1.into(), 3)).unwrap();
        assert_eq!(listing(&got), vec![Vec::<u64>::new()]);
        let mut spec = SearchSpec::for_total_degree(4, 12.into(), 3);
        spec.max_degree = Some(4);
        let got = enumerate(&spec).unwrap();
        assert_eq!(listing(&got), vec![vec![4, 3], vec![3, 2, 2]]);
    }

    #[test]
    fn large_prime_target() {
        let p = BigInt::from(1_000_003u64);
        let got = enumerate(&SearchSpec::for_total_degree(4, &p * 2, 2)).unwrap();
        assert_eq!(listing(&got), vec![vec![2_000_006], vec![1_000_003, 2]]);
        let huge = BigInt::from(1_048_583u64) * 1_048_589u64 * 1009;
        assert!(matches!(
            enumerate(&SearchSpec::for_total_degree(4, huge, 2)),
            Err(SearchError::Unfactored(_))
        ));
        let big = BigInt::from(2).pow(70);
        assert!(matches!(
            enumerate(&SearchSpec::for_total_degree(4, big.clone(), 2)),
            Err(SearchError::DegreeOverflow(_))
        ));
        let mut spec = SearchSpec::for_total_degree(4, big, 70);
        spec.max_degree = Some(2);
        assert_eq!(enumerate(&spec).unwrap().len(), 1);
    }

    #[test]
    fn guard_trips() {
        let spec = SearchSpec::new(4, 50, 6).with_limit(1000);
        assert!(matches!(enumerate(&spec), Err(SearchError::GuardExceeded { .. })));
        let spec = SearchSpec::for_total_degree(4, BigInt::from(2).pow(40), 40).with_limit(100);
        match enumerate(&spec) {
            Err(SearchError::GuardExceeded { partial, .. }) => assert_eq!(partial.enumerated, 101),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invalid_specs() {
        assert!(SearchSpec::new(2, 3, 2).validate().is_err());
        assert!(SearchSpec::new(4, 0, 2).validate().is_err());
        assert!(SearchSpec::new(4, 3, 0).validate().is_err());
        assert!(SearchSpec::new(4, 3, 2).with_shards(0).validate().is_err());
        assert!(SearchSpec::for_total_degree(4, 0.into(), 2).validate().is_err());
    }

    #[test]
    fn verify_pair_examples() {
        assert!(verify_pair(4, &md(&[3, 2]), &md(&[2, 3])).0);
        let (same, a, b) = verify_pair(4, &md(&[]), &md(&[2]));
        assert!(!same);
        assert_ne!(a.total_degree, b.total_degree);
    }
}
