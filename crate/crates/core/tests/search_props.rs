use std::collections::BTreeSet;

use num_bigint::BigInt;
use sullivan::invariants::{sullivan_data, Multidegree};
use sullivan::search::{
    enumerate, find_collisions, find_collisions_with, verify_pair, CollisionReport, SearchSpec,
};

/// Every sequence of length `max_k` over `1..=max_degree`, with 1s standing
/// in for shorter multidegrees, reduced to canonical form.
fn naive(max_degree: u64, max_k: usize) -> BTreeSet<Vec<u64>> {
    let mut seqs: Vec<Vec<u64>> = vec![vec![]];
    for _ in 0..max_k {
        seqs = seqs
            .into_iter()
            .flat_map(|s| {
                (1..=max_degree).map(move |d| {
                    let mut t = s.clone();
                    t.push(d);
                    t
                })
            })
            .collect();
    }
    seqs.into_iter()
        .map(|mut s| {
            s.retain(|&d| d != 1);
            s.sort_unstable_by(|a, b| b.cmp(a));
            s
        })
        .collect()
}

fn md(d: &[u64]) -> Multidegree {
    Multidegree::new(d.iter().copied()).unwrap()
}

fn total(d: &[u64]) -> BigInt {
    d.iter().map(|&x| BigInt::from(x)).product()
}

#[test]
fn box_enumeration_matches_naive_generator() {
    for max_degree in 1..=6 {
        for max_k in 1..=3 {
            let got = enumerate(&SearchSpec::new(4, max_degree, max_k)).unwrap();
            let listed: Vec<Vec<u64>> = got.iter().map(|m| m.canonical_degrees().to_vec()).collect();
            let set: BTreeSet<Vec<u64>> = listed.iter().cloned().collect();
            assert_eq!(set.len(), listed.len(), "duplicates for {max_degree}, {max_k}");
            assert_eq!(set, naive(max_degree, max_k), "{max_degree}, {max_k}");
            // ordered by total degree, ties broken by reversed lexicographic order
            for w in listed.windows(2) {
                let (a, b) = (&w[0], &w[1]);
                assert!(total(a) < total(b) || (total(a) == total(b) && a > b), "{a:?} before {b:?}");
            }
        }
    }
}

#[test]
fn factorization_enumeration_matches_filtered_box() {
    for (bound, max_k) in [(96, 1), (96, 2), (48, 3), (24, 4)] {
        // a factor of a target never exceeds the target
        let candidates = naive(bound, max_k);
        for target in 1u64..=bound {
            let got = enumerate(&SearchSpec::for_total_degree(4, target.into(), max_k)).unwrap();
            let got: Vec<Vec<u64>> = got.iter().map(|m| m.canonical_degrees().to_vec()).collect();
            let expected: BTreeSet<Vec<u64>> = candidates
                .iter()
                .filter(|d| total(d) == BigInt::from(target))
                .cloned()
                .collect();
            assert_eq!(got.iter().cloned().collect::<BTreeSet<_>>(), expected);
            assert_eq!(got.len(), expected.len());
        }
    }
}

fn brute_force_pairs(n: u32, max_degree: u64, max_k: usize) -> Vec<(Vec<u64>, Vec<u64>)> {
    let all: Vec<Vec<u64>> = naive(max_degree, max_k).into_iter().collect();
    let data: Vec<_> = all
        .iter()
        .map(|d| {
            let m = if d.is_empty() { Multidegree::projective_space() } else { md(d) };
            sullivan_data(n, &m)
        })
        .collect();
    let mut pairs = Vec::new();
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            if data[i] == data[j] {
                pairs.push((all[i].clone(), all[j].clone()));
            }
        }
    }
    pairs
}

#[test]
fn small_dimension_four_box_has_no_collisions() {
    let report = find_collisions(&SearchSpec::new(4, 6, 3)).unwrap();
    assert!(brute_force_pairs(4, 6, 3).is_empty());
    assert!(report.pairs.is_empty());
    assert_eq!(report.stats.enumerated, 56);
}

fn comparable(r: &CollisionReport) -> (Vec<(String, String)>, sullivan::search::SearchStats) {
    let pairs = r.pairs.iter().map(|c| (c.a.to_string(), c.b.to_string())).collect();
    (pairs, r.stats.clone())
}

#[test]
fn shard_count_does_not_change_the_report() {
    for spec in [
        SearchSpec::new(4, 6, 3),
        SearchSpec::new(3, 4, 2),
        SearchSpec::new(3, 12, 3),
        SearchSpec::new(5, 8, 3),
        SearchSpec::for_total_degree(3, BigInt::from(720), 6),
    ] {
        let one = comparable(&find_collisions(&spec.clone().with_shards(1)).unwrap());
        for shards in [2, 8] {
            let other = comparable(&find_collisions(&spec.clone().with_shards(shards)).unwrap());
            assert_eq!(one, other, "{spec:?} with {shards} shards");
        }
    }
}

#[test]
fn constant_digest_still_reports_only_true_collisions() {
    let spec = SearchSpec::new(3, 12, 3).with_shards(4);
    let weak = find_collisions_with(&spec, |_| 0).unwrap();
    let strong = find_collisions(&spec).unwrap();
    assert_eq!(comparable(&weak).0, comparable(&strong).0);
    assert!(weak.stats.digest_false_positives > 0);
    for c in &weak.pairs {
        let (same, sa, sb) = verify_pair(spec.n, &c.a, &c.b);
        assert!(same);
        assert_eq!(sa, sb);
        assert_eq!(sa, c.data);
        assert_ne!(c.a, c.b);
    }
}

#[test]
fn reported_pairs_match_brute_force() {
    for (n, max_degree, max_k) in [(3, 12, 3), (4, 10, 3), (5, 8, 3), (6, 8, 3)] {
        let report = find_collisions(&SearchSpec::new(n, max_degree, max_k).with_shards(3)).unwrap();
        let got: Vec<(Vec<u64>, Vec<u64>)> = report
            .pairs
            .iter()
            .map(|c| (c.a.canonical_degrees().to_vec(), c.b.canonical_degrees().to_vec()))
            .collect();
        let got: BTreeSet<_> = got.into_iter().map(|(a, b)| if a < b { (a, b) } else { (b, a) }).collect();
        let expected: BTreeSet<_> = brute_force_pairs(n, max_degree, max_k)
            .into_iter()
            .map(|(a, b)| if a < b { (a, b) } else { (b, a) })
            .collect();
        assert_eq!(got, expected, "n={n}");
    }
}

#[test]
fn example_pair_is_a_collision() {
    let a = md(&[&[3; 150][..], &[7; 89], &[9; 65], &[15], &[25; 130]].concat());
    let b = md(&[&[5; 261][..], &[21; 89], &[27; 64]].concat());
    let (same, sa, sb) = verify_pair(4, &a, &b);
    assert!(same);
    assert_eq!(sa, sb);
    assert!(!verify_pair(4, &Multidegree::projective_space(), &md(&[2])).0);
}
