//! Differential validation of the pair-property checks.
//!
//! The naive verdicts below restate each property as a direct quantifier
//! loop, independent of the library's indexed implementation. The full
//! space of 512 relations over a 3-element universe anchors the naive code
//! itself against known counts (transitive relations, equivalences, labeled
//! DAGs, ...), and a seeded random sweep with null sides and out-of-universe
//! endpoints compares the two implementations on all 17 properties. Every
//! reported witness is re-demonstrated against the raw pair set.

use emdm::model::PairProperty;
use emdm::pairs::{PairSet, PairViolation, PairWitness, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{HashMap, HashSet};

type Rel = HashSet<(Side, Side)>;

fn has(r: &Rel, x: u64, y: u64) -> bool {
    r.contains(&(Some(x), Some(y)))
}

fn relaxed(r: &Rel, x: u64, y: u64) -> bool {
    has(r, x, y)
        || r.contains(&(Some(x), None))
        || r.contains(&(None, Some(y)))
        || r.contains(&(None, None))
}

/// Fully present pairs.
fn r0(r: &Rel) -> Vec<(u64, u64)> {
    let mut v: Vec<(u64, u64)> = r
        .iter()
        .filter_map(|p| match p {
            (Some(x), Some(y)) => Some((*x, *y)),
            _ => None,
        })
        .collect();
    v.sort_unstable();
    v
}

/// Universe members plus every present pair endpoint.
fn carriers(u: &[u64], r: &Rel) -> Vec<u64> {
    let mut c: Vec<u64> = u.to_vec();
    for (x, y) in r0(r) {
        c.push(x);
        c.push(y);
    }
    c.sort_unstable();
    c.dedup();
    c
}

fn naive_right_euclidean(r: &Rel) -> bool {
    let pairs = r0(r);
    pairs.iter().all(|&(x1, y)| {
        pairs
            .iter()
            .filter(|&&(x2, _)| x2 == x1)
            .all(|&(_, z)| has(r, y, z))
    })
}

fn naive_left_euclidean(r: &Rel) -> bool {
    let pairs = r0(r);
    pairs.iter().all(|&(y, x1)| {
        pairs
            .iter()
            .filter(|&&(_, x2)| x2 == x1)
            .all(|&(z, _)| has(r, y, z))
    })
}

fn naive_acyclic(u: &[u64], r: &Rel) -> bool {
    let nodes = carriers(u, r);
    let pos: HashMap<u64, usize> = nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let n = nodes.len();
    let mut reach = vec![vec![false; n]; n];
    for (x, y) in r0(r) {
        reach[pos[&x]][pos[&y]] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                reach[i][j] = reach[i][j] || (reach[i][k] && reach[k][j]);
            }
        }
    }
    (0..n).all(|i| !reach[i][i])
}

fn naive_null_euclidean(r: &Rel) -> bool {
    let pairs = r0(r);
    // First conjunct: {(x,y),(y,z)} present => a relaxed form of (y,z)
    // exists. The premise contains the conclusion, so this never fails;
    // it is restated anyway to mirror the definition.
    let first = pairs.iter().all(|&(_, y1)| {
        pairs
            .iter()
            .filter(|&&(y2, _)| y2 == y1)
            .all(|&(y2, z)| relaxed(r, y2, z))
    });
    // Second conjunct: {(x,y),(z,y)} present => a relaxed form of (x,z).
    let second = pairs.iter().all(|&(x, y1)| {
        pairs
            .iter()
            .filter(|&&(_, y2)| y2 == y1)
            .all(|&(z, _)| relaxed(r, x, z))
    });
    first && second
}

fn naive(u: &[u64], r: &Rel, p: PairProperty) -> bool {
    use PairProperty as P;
    let pairs = r0(r);
    match p {
        P::Connectivity => u.iter().all(|&x| {
            u.iter()
                .all(|&y| x == y || has(r, x, y) || has(r, y, x))
        }),
        P::Reflexivity => u.iter().all(|&x| has(r, x, x)),
        P::Irreflexivity => pairs.iter().all(|&(x, y)| x != y),
        P::Symmetry => pairs.iter().all(|&(x, y)| has(r, y, x)),
        P::Asymmetry => pairs.iter().all(|&(x, y)| !has(r, y, x)),
        P::Transitivity => pairs.iter().all(|&(x, y)| {
            pairs
                .iter()
                .filter(|&&(y2, _)| y2 == y)
                .all(|&(_, z)| has(r, x, z))
        }),
        P::Intransitivity => pairs.iter().all(|&(x, y)| {
            pairs
                .iter()
                .filter(|&&(y2, _)| y2 == y)
                .all(|&(_, z)| !has(r, x, z))
        }),
        P::Euclidean => naive_right_euclidean(r) && naive_left_euclidean(r),
        P::InEuclidean => {
            let right = pairs.iter().all(|&(x1, y)| {
                pairs
                    .iter()
                    .filter(|&&(x2, _)| x2 == x1)
                    .all(|&(_, z)| !has(r, y, z))
            });
            let left = pairs.iter().all(|&(y, x1)| {
                pairs
                    .iter()
                    .filter(|&&(_, x2)| x2 == x1)
                    .all(|&(z, _)| !has(r, y, z))
            });
            right && left
        }
        P::Equivalence => {
            naive(u, r, P::Reflexivity)
                && naive(u, r, P::Symmetry)
                && naive(u, r, P::Transitivity)
        }
        P::Acyclicity => naive_acyclic(u, r),
        P::NullIdentity => r
            .iter()
            .all(|p| !matches!(p, (Some(x), Some(y)) if x != y)),
        P::NullReflexivity => u.iter().all(|&x| relaxed(r, x, x)),
        P::NullSymmetry => pairs.iter().all(|&(x, y)| relaxed(r, y, x)),
        P::NullTransitivity => pairs.iter().all(|&(x, y)| {
            pairs
                .iter()
                .filter(|&&(y2, _)| y2 == y)
                .all(|&(_, z)| relaxed(r, x, z))
        }),
        P::NullEuclidean => naive_null_euclidean(r),
        // Verbatim three-way disjunction; the library simplifies it to
        // null-reflexive and null-Euclidean.
        P::NullEquivalence => {
            let nr = naive(u, r, P::NullReflexivity);
            let ne = naive_null_euclidean(r);
            let refl = naive(u, r, P::Reflexivity);
            let eucl = naive(u, r, P::Euclidean);
            (nr && ne) || (refl && ne) || (nr && eucl)
        }
    }
}

/// Check that a reported witness really falsifies the property on the raw
/// relation.
fn witness_falsifies(u: &[u64], r: &Rel, v: &PairViolation) -> bool {
    use PairProperty as P;
    use PairWitness as W;
    match (v.property, &v.witness) {
        (P::Connectivity, W::Pair(x, y)) => {
            u.contains(x) && u.contains(y) && x != y && !has(r, *x, *y) && !has(r, *y, *x)
        }
        (P::Reflexivity | P::Equivalence, W::Elem(x)) => u.contains(x) && !has(r, *x, *x),
        (P::Irreflexivity, W::Elem(x)) => has(r, *x, *x),
        (P::Symmetry | P::Equivalence, W::Pair(x, y)) => has(r, *x, *y) && !has(r, *y, *x),
        (P::Asymmetry, W::Pair(x, y)) => has(r, *x, *y) && has(r, *y, *x),
        (P::Transitivity | P::Equivalence, W::Triple(x, y, z)) => {
            has(r, *x, *y) && has(r, *y, *z) && !has(r, *x, *z)
        }
        (P::Intransitivity, W::Triple(x, y, z)) => {
            has(r, *x, *y) && has(r, *y, *z) && has(r, *x, *z)
        }
        (P::Euclidean, W::Triple(s, a, b)) => {
            (has(r, *s, *a) && has(r, *s, *b) || has(r, *a, *s) && has(r, *b, *s))
                && !has(r, *a, *b)
        }
        (P::InEuclidean, W::Triple(s, a, b)) => {
            (has(r, *s, *a) && has(r, *s, *b) || has(r, *a, *s) && has(r, *b, *s))
                && has(r, *a, *b)
        }
        (P::Acyclicity, W::Cycle(c)) => {
            !c.is_empty()
                && c.windows(2).all(|w| has(r, w[0], w[1]))
                && has(r, *c.last().unwrap(), c[0])
        }
        (P::NullIdentity, W::Pair(x, y)) => has(r, *x, *y) && x != y,
        (P::NullReflexivity | P::NullEquivalence, W::Elem(x)) => {
            u.contains(x) && !relaxed(r, *x, *x)
        }
        (P::NullSymmetry, W::Pair(x, y)) => has(r, *x, *y) && !relaxed(r, *y, *x),
        (P::NullTransitivity, W::Triple(x, y, z)) => {
            has(r, *x, *y) && has(r, *y, *z) && !relaxed(r, *x, *z)
        }
        (P::NullEuclidean | P::NullEquivalence, W::Triple(x, y, z)) => {
            has(r, *x, *y) && has(r, *z, *y) && !relaxed(r, *x, *z)
        }
        _ => false,
    }
}

fn compare_all(u: &[u64], r: &Rel, label: &str) {
    let ps = PairSet::new(u.iter().copied(), r.iter().copied());
    for p in PairProperty::ALL {
        let violations = ps.check(p);
        let fast = violations.is_empty();
        let slow = naive(u, r, p);
        assert_eq!(
            fast, slow,
            "{}: {} disagrees on {:?}",
            label,
            p.name(),
            r
        );
        for v in &violations {
            assert!(
                witness_falsifies(u, r, v),
                "{}: witness {:?} does not falsify {} on {:?}",
                label,
                v.witness,
                p.name(),
                r
            );
        }
    }
}

#[test]
fn exhaustive_three_element_sweep_matches_known_counts() {
    let u = [0u64, 1, 2];
    let slots: Vec<(u64, u64)> = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .collect();
    let mut counts: HashMap<PairProperty, u32> = HashMap::new();
    for mask in 0u32..512 {
        let r: Rel = slots
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &(x, y))| (Some(x), Some(y)))
            .collect();
        compare_all(&u, &r, "sweep");
        let ps = PairSet::new(u, r.iter().copied());
        for p in PairProperty::ALL {
            if ps.satisfies(p) {
                *counts.entry(p).or_default() += 1;
            }
        }
        // The classical characterization: an equivalence is exactly a
        // reflexive Euclidean relation.
        assert_eq!(
            ps.satisfies(PairProperty::Equivalence),
            ps.satisfies(PairProperty::Reflexivity) && ps.satisfies(PairProperty::Euclidean),
        );
        // Each null-tolerant property is weaker than its plain form, and
        // the implication chain acyclic => asymmetric => irreflexive holds.
        for (strong, weak) in [
            (PairProperty::Reflexivity, PairProperty::NullReflexivity),
            (PairProperty::Symmetry, PairProperty::NullSymmetry),
            (PairProperty::Transitivity, PairProperty::NullTransitivity),
            (PairProperty::Euclidean, PairProperty::NullEuclidean),
            (PairProperty::Equivalence, PairProperty::NullEquivalence),
            (PairProperty::Acyclicity, PairProperty::Asymmetry),
            (PairProperty::Asymmetry, PairProperty::Irreflexivity),
        ] {
            if ps.satisfies(strong) {
                assert!(
                    ps.satisfies(weak),
                    "{} should imply {} on {:?}",
                    strong.name(),
                    weak.name(),
                    r
                );
            }
        }
    }
    // Counts over all 512 relations on 3 labeled elements, from the
    // standard enumerations of these relation classes.
    let expected = [
        (PairProperty::Reflexivity, 64),
        (PairProperty::Irreflexivity, 64),
        (PairProperty::Symmetry, 64),
        (PairProperty::Asymmetry, 27),
        (PairProperty::Transitivity, 171),
        (PairProperty::Equivalence, 5),
        (PairProperty::Connectivity, 216),
        (PairProperty::Acyclicity, 25),
    ];
    for (p, want) in expected {
        assert_eq!(
            counts[&p],
            want,
            "{} count off in the 512-relation sweep",
            p.name()
        );
    }
}

#[test]
fn seeded_random_sweep_with_nulls_and_strays() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xE0D0);
    for case in 0..1000 {
        let n: u64 = rng.gen_range(4..=8);
        let u: Vec<u64> = (0..n).collect();
        let pair_count = rng.gen_range(0..=(n * n / 2) as usize);
        let mut r: Rel = HashSet::new();
        for _ in 0..pair_count {
            let side = |rng: &mut ChaCha8Rng| -> Side {
                if rng.gen_bool(0.15) {
                    None
                } else if rng.gen_bool(0.1) {
                    // Occasionally outside the universe, as dangling
                    // references produce.
                    Some(n + rng.gen_range(0..2))
                } else {
                    Some(rng.gen_range(0..n))
                }
            };
            r.insert((side(&mut rng), side(&mut rng)));
        }
        compare_all(&u, &r, &format!("random case {case}"));
    }
}
