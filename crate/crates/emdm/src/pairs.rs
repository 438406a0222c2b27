//! Null-aware pair populations and the relational properties checked over
//! them.
//!
//! A [`PairSet`] is a universe of elements plus a set of ordered pairs whose
//! sides may be missing. Properties without a `Null` prefix are judged over
//! the fully present pairs only; the null-tolerant variants accept a pair
//! whose expected sides are replaced by nulls. Connectivity is weak (it only
//! relates distinct elements), Euclidean means left *and* right Euclidean,
//! and the negative properties (intransitivity, in-Euclideanness) forbid
//! every instance of the corresponding conclusion, degenerate triples
//! included.

use crate::model::PairProperty;
use std::collections::{HashMap, HashSet};

/// One side of a pair: an element id, or a missing value.
pub type Side = Option<u64>;

/// A falsifying binding for a pair property.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum PairWitness {
    /// A universe element (missing reflexive pair, forbidden loop).
    Elem(u64),
    /// An ordered pair of elements.
    Pair(u64, u64),
    /// A triple `(x, y, z)`; which pairs it names depends on the property.
    Triple(u64, u64, u64),
    /// A directed cycle; the last element links back to the first.
    Cycle(Vec<u64>),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PairViolation {
    pub property: PairProperty,
    pub witness: PairWitness,
}

impl PairViolation {
    /// Render the violation with a caller-supplied element formatter.
    pub fn describe(&self, f: impl Fn(u64) -> String) -> String {
        use PairProperty as P;
        use PairWitness as W;
        let p = |x: u64, y: u64| format!("({}, {})", f(x), f(y));
        match (self.property, &self.witness) {
            (P::Connectivity, W::Pair(x, y)) => format!(
                "{} and {} are unrelated in either direction",
                f(*x),
                f(*y)
            ),
            (P::Reflexivity | P::Equivalence, W::Elem(x)) => {
                format!("the pair {} is missing", p(*x, *x))
            }
            (P::Irreflexivity, W::Elem(x)) => format!("the pair {} is present", p(*x, *x)),
            (P::Symmetry | P::Equivalence, W::Pair(x, y)) => format!(
                "{} is present but its mirror {} is missing",
                p(*x, *y),
                p(*y, *x)
            ),
            (P::Asymmetry, W::Pair(x, y)) => {
                if x == y {
                    format!("the pair {} is present", p(*x, *y))
                } else {
                    format!("both {} and {} are present", p(*x, *y), p(*y, *x))
                }
            }
            (P::Transitivity | P::Equivalence, W::Triple(x, y, z)) => format!(
                "{} and {} are present but {} is missing",
                p(*x, *y),
                p(*y, *z),
                p(*x, *z)
            ),
            (P::Intransitivity, W::Triple(x, y, z)) => format!(
                "{}, {} and the forbidden {} are all present",
                p(*x, *y),
                p(*y, *z),
                p(*x, *z)
            ),
            (P::Euclidean, W::Triple(x, y, z)) => format!(
                "{} and {} share {} as source or target but {} is missing",
                f(*y),
                f(*z),
                f(*x),
                p(*y, *z)
            ),
            (P::InEuclidean, W::Triple(x, y, z)) => format!(
                "{} and {} share {} as source or target and the forbidden {} is present",
                f(*y),
                f(*z),
                f(*x),
                p(*y, *z)
            ),
            (P::Acyclicity, W::Cycle(c)) => {
                let mut path: Vec<String> = c.iter().map(|x| f(*x)).collect();
                path.push(f(c[0]));
                format!("cycle {}", path.join(" -> "))
            }
            (P::NullIdentity, W::Pair(x, y)) => format!(
                "{} relates two distinct present elements",
                p(*x, *y)
            ),
            (P::NullReflexivity | P::NullEquivalence, W::Elem(x)) => format!(
                "no present or null-relaxed form of {} exists",
                p(*x, *x)
            ),
            (P::NullSymmetry, W::Pair(x, y)) => format!(
                "{} is present but no null-relaxed form of {} exists",
                p(*x, *y),
                p(*y, *x)
            ),
            (P::NullTransitivity, W::Triple(x, y, z)) => format!(
                "{} and {} are present but no null-relaxed form of {} exists",
                p(*x, *y),
                p(*y, *z),
                p(*x, *z)
            ),
            (P::NullEuclidean | P::NullEquivalence, W::Triple(x, y, z)) => format!(
                "{} and {} are present but no null-relaxed form of {} exists",
                p(*x, *y),
                p(*z, *y),
                p(*x, *z)
            ),
            (prop, w) => format!("{} fails at {:?}", prop.name(), w),
        }
    }
}

/// A universe with a null-aware ordered-pair population.
#[derive(Clone, Debug)]
pub struct PairSet {
    universe: Vec<u64>,
    pairs: Vec<(Side, Side)>,
    index: HashSet<(Side, Side)>,
    /// Successors per element, over fully present pairs.
    fwd: HashMap<u64, Vec<u64>>,
    /// Predecessors per element, over fully present pairs.
    bwd: HashMap<u64, Vec<u64>>,
}

impl PairSet {
    /// Build from a universe and pairs; both are deduplicated, the universe
    /// is sorted, and pair order is preserved.
    pub fn new(
        universe: impl IntoIterator<Item = u64>,
        pairs: impl IntoIterator<Item = (Side, Side)>,
    ) -> PairSet {
        let mut u: Vec<u64> = universe.into_iter().collect();
        u.sort_unstable();
        u.dedup();
        let mut ps = PairSet {
            universe: u,
            pairs: Vec::new(),
            index: HashSet::new(),
            fwd: HashMap::new(),
            bwd: HashMap::new(),
        };
        for pair in pairs {
            if ps.index.insert(pair) {
                ps.pairs.push(pair);
                if let (Some(x), Some(y)) = pair {
                    ps.fwd.entry(x).or_default().push(y);
                    ps.bwd.entry(y).or_default().push(x);
                }
            }
        }
        ps
    }

    pub fn universe(&self) -> &[u64] {
        &self.universe
    }

    pub fn pairs(&self) -> &[(Side, Side)] {
        &self.pairs
    }

    fn has(&self, x: u64, y: u64) -> bool {
        self.index.contains(&(Some(x), Some(y)))
    }

    /// The pair itself, or any form with expected sides replaced by nulls.
    fn has_relaxed(&self, x: u64, y: u64) -> bool {
        self.has(x, y)
            || self.index.contains(&(Some(x), None))
            || self.index.contains(&(None, Some(y)))
            || self.index.contains(&(None, None))
    }

    fn present(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.pairs.iter().filter_map(|p| match p {
            (Some(x), Some(y)) => Some((*x, *y)),
            _ => None,
        })
    }

    fn successors(&self, x: u64) -> &[u64] {
        self.fwd.get(&x).map(Vec::as_slice).unwrap_or(&[])
    }

    fn predecessors(&self, x: u64) -> &[u64] {
        self.bwd.get(&x).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Every falsifying binding of the property, in deterministic order.
    pub fn check(&self, property: PairProperty) -> Vec<PairViolation> {
        use PairProperty as P;
        let mut out = Vec::new();
        let mut push = |w: PairWitness| {
            out.push(PairViolation {
                property,
                witness: w,
            })
        };
        match property {
            P::Connectivity => {
                for (i, &x) in self.universe.iter().enumerate() {
                    for &y in &self.universe[i + 1..] {
                        if !self.has(x, y) && !self.has(y, x) {
                            push(PairWitness::Pair(x, y));
                        }
                    }
                }
            }
            P::Reflexivity => {
                for &x in &self.universe {
                    if !self.has(x, x) {
                        push(PairWitness::Elem(x));
                    }
                }
            }
            P::Irreflexivity => {
                for (x, y) in self.present() {
                    if x == y {
                        push(PairWitness::Elem(x));
                    }
                }
            }
            P::Symmetry => {
                for (x, y) in self.present() {
                    if !self.has(y, x) {
                        push(PairWitness::Pair(x, y));
                    }
                }
            }
            P::Asymmetry => {
                for (x, y) in self.present() {
                    if x <= y && self.has(y, x) {
                        push(PairWitness::Pair(x, y));
                    }
                }
            }
            P::Transitivity => {
                for (x, y) in self.present() {
                    for &z in self.successors(y) {
                        if !self.has(x, z) {
                            push(PairWitness::Triple(x, y, z));
                        }
                    }
                }
            }
            P::Intransitivity => {
                for (x, y) in self.present() {
                    for &z in self.successors(y) {
                        if self.has(x, z) {
                            push(PairWitness::Triple(x, y, z));
                        }
                    }
                }
            }
            P::Euclidean => {
                let mut seen = HashSet::new();
                for (present, shared, a, b) in self.euclidean_conclusions() {
                    if !present && seen.insert((shared, a, b)) {
                        push(PairWitness::Triple(shared, a, b));
                    }
                }
            }
            P::InEuclidean => {
                let mut seen = HashSet::new();
                for (present, shared, a, b) in self.euclidean_conclusions() {
                    if present && seen.insert((shared, a, b)) {
                        push(PairWitness::Triple(shared, a, b));
                    }
                }
            }
            P::Equivalence => {
                for p in [P::Reflexivity, P::Symmetry, P::Transitivity] {
                    for mut v in self.check(p) {
                        v.property = P::Equivalence;
                        out.push(v);
                    }
                }
            }
            P::Acyclicity => {
                for cycle in self.representative_cycles() {
                    push(PairWitness::Cycle(cycle));
                }
            }
            P::NullIdentity => {
                for (x, y) in self.present() {
                    if x != y {
                        push(PairWitness::Pair(x, y));
                    }
                }
            }
            P::NullReflexivity => {
                for &x in &self.universe {
                    if !self.has_relaxed(x, x) {
                        push(PairWitness::Elem(x));
                    }
                }
            }
            P::NullSymmetry => {
                for (x, y) in self.present() {
                    if !self.has_relaxed(y, x) {
                        push(PairWitness::Pair(x, y));
                    }
                }
            }
            P::NullTransitivity => {
                for (x, y) in self.present() {
                    for &z in self.successors(y) {
                        if !self.has_relaxed(x, z) {
                            push(PairWitness::Triple(x, y, z));
                        }
                    }
                }
            }
            P::NullEuclidean => {
                for (x, y) in self.present() {
                    for &z in self.predecessors(y) {
                        if !self.has_relaxed(x, z) {
                            push(PairWitness::Triple(x, y, z));
                        }
                    }
                }
            }
            P::NullEquivalence => {
                for p in [P::NullReflexivity, P::NullEuclidean] {
                    for mut v in self.check(p) {
                        v.property = P::NullEquivalence;
                        out.push(v);
                    }
                }
            }
        }
        out
    }

    pub fn satisfies(&self, property: PairProperty) -> bool {
        self.check(property).is_empty()
    }

    /// Enumerate Euclidean conclusion slots: for every element shared as a
    /// source (right form) or as a target (left form) by pairs reaching `a`
    /// and `b`, yield whether the conclusion `(a, b)` is present.
    fn euclidean_conclusions(&self) -> Vec<(bool, u64, u64, u64)> {
        let mut nodes: Vec<u64> = self.fwd.keys().chain(self.bwd.keys()).copied().collect();
        nodes.sort_unstable();
        nodes.dedup();
        let mut slots = Vec::new();
        for shared in nodes {
            for side in [self.successors(shared), self.predecessors(shared)] {
                for &a in side {
                    for &b in side {
                        slots.push((self.has(a, b), shared, a, b));
                    }
                }
            }
        }
        slots
    }

    /// One representative cycle per strongly connected component that
    /// contains a cycle, in ascending order of the smallest member.
    fn representative_cycles(&self) -> Vec<Vec<u64>> {
        let mut nodes: Vec<u64> = self
            .fwd
            .keys()
            .chain(self.bwd.keys())
            .copied()
            .chain(self.universe.iter().copied())
            .collect();
        nodes.sort_unstable();
        nodes.dedup();
        let comp = tarjan_components(&nodes, |x| self.successors(x));
        let mut by_comp: HashMap<u32, Vec<u64>> = HashMap::new();
        for (&n, &c) in nodes.iter().zip(&comp) {
            by_comp.entry(c).or_default().push(n);
        }
        let mut cycles = Vec::new();
        let mut comps: Vec<_> = by_comp.into_values().collect();
        for members in comps.iter_mut() {
            members.sort_unstable();
        }
        comps.sort();
        for members in comps {
            let start = members[0];
            if members.len() == 1 {
                if self.has(start, start) {
                    cycles.push(vec![start]);
                }
                continue;
            }
            // Walk inside the component from its smallest member back to
            // itself; every member of a multi-node component lies on a
            // cycle, so a breadth-first search must return.
            let inside: HashSet<u64> = members.iter().copied().collect();
            let mut prev: HashMap<u64, u64> = HashMap::new();
            let mut queue = std::collections::VecDeque::from([start]);
            let mut found = None;
            'bfs: while let Some(n) = queue.pop_front() {
                for &m in self.successors(n) {
                    if m == start {
                        found = Some(n);
                        break 'bfs;
                    }
                    if inside.contains(&m) && !prev.contains_key(&m) {
                        prev.insert(m, n);
                        queue.push_back(m);
                    }
                }
            }
            let mut path = vec![];
            let mut cur = found.expect("multi-node components close a cycle");
            while cur != start {
                path.push(cur);
                cur = prev[&cur];
            }
            path.push(start);
            path.reverse();
            cycles.push(path);
        }
        cycles
    }
}

/// Iterative Tarjan strongly-connected components; returns a component id
/// per node, aligned with `nodes`.
fn tarjan_components<'a, F>(nodes: &[u64], succ: F) -> Vec<u32>
where
    F: Fn(u64) -> &'a [u64],
{
    let index_of: HashMap<u64, usize> = nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let n = nodes.len();
    let mut idx = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut comp = vec![u32::MAX; n];
    let mut counter = 0usize;
    let mut comp_count = 0u32;

    for root in 0..n {
        if idx[root] != usize::MAX {
            continue;
        }
        // Explicit DFS frames: (node, next successor position).
        let mut frames: Vec<(usize, usize)> = vec![(root, 0)];
        while let Some(&mut (v, ref mut pos)) = frames.last_mut() {
            if *pos == 0 {
                idx[v] = counter;
                low[v] = counter;
                counter += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            let succs = succ(nodes[v]);
            let mut advanced = false;
            while *pos < succs.len() {
                let w = succs[*pos];
                *pos += 1;
                let Some(&wi) = index_of.get(&w) else { continue };
                if idx[wi] == usize::MAX {
                    frames.push((wi, 0));
                    advanced = true;
                    break;
                } else if on_stack[wi] {
                    low[v] = low[v].min(idx[wi]);
                }
            }
            if advanced {
                continue;
            }
            if low[v] == idx[v] {
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w] = false;
                    comp[w] = comp_count;
                    if w == v {
                        break;
                    }
                }
                comp_count += 1;
            }
            frames.pop();
            if let Some(&mut (parent, _)) = frames.last_mut() {
                low[parent] = low[parent].min(low[v]);
            }
        }
    }
    comp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PairProperty as P;

    fn ps(universe: &[u64], pairs: &[(Side, Side)]) -> PairSet {
        PairSet::new(universe.iter().copied(), pairs.iter().copied())
    }

    fn full(pairs: &[(u64, u64)]) -> Vec<(Side, Side)> {
        pairs.iter().map(|&(x, y)| (Some(x), Some(y))).collect()
    }

    #[test]
    fn weak_connectivity_ignores_loops() {
        let r = ps(&[1, 2, 3], &full(&[(1, 2), (3, 2)]));
        // 1-3 unrelated.
        let v = r.check(P::Connectivity);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].witness, PairWitness::Pair(1, 3));
        let total = ps(&[1, 2], &full(&[(1, 2)]));
        assert!(total.satisfies(P::Connectivity));
    }

    #[test]
    fn euclidean_is_left_and_right() {
        // Right gap: (1,2),(1,3) without (2,3).
        let right = ps(&[1, 2, 3], &full(&[(1, 2), (1, 3)]));
        assert!(!right.satisfies(P::Euclidean));
        // Left gap: (2,1),(3,1) without (2,3).
        let left = ps(&[1, 2, 3], &full(&[(2, 1), (3, 1)]));
        assert!(!left.satisfies(P::Euclidean));
        // A full equivalence class is Euclidean both ways.
        let clique = ps(
            &[1, 2],
            &full(&[(1, 1), (1, 2), (2, 1), (2, 2)]),
        );
        assert!(clique.satisfies(P::Euclidean));
    }

    #[test]
    fn degenerate_triples_count_for_the_negative_properties() {
        // One loop (1,1) instantiates x=y=z for both negatives.
        let r = ps(&[1], &full(&[(1, 1)]));
        assert!(!r.satisfies(P::Intransitivity));
        assert!(!r.satisfies(P::InEuclidean));
        let empty = ps(&[1, 2], &[]);
        assert!(empty.satisfies(P::Intransitivity));
        assert!(empty.satisfies(P::InEuclidean));
    }

    #[test]
    fn null_relaxation_accepts_nulled_sides() {
        let r = PairSet::new(
            [1, 2],
            [
                (Some(1), Some(2)),
                (Some(2), None), // relaxes (2,1): left side present
            ],
        );
        assert!(r.satisfies(P::NullSymmetry));
        assert!(!r.satisfies(P::Symmetry));
        // (2, None) relaxes (2,2), but nothing relaxes (1,1): the pair
        // (1,2) is not a null-relaxed form of it.
        let v = r.check(P::NullReflexivity);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].witness, PairWitness::Elem(1));
    }

    #[test]
    fn null_euclidean_constrains_the_left_form_only() {
        // (1,2) and (3,2) share target 2: need relaxed (1,3).
        let gap = ps(&[1, 2, 3], &full(&[(1, 2), (3, 2)]));
        assert!(!gap.satisfies(P::NullEuclidean));
        let relaxed = PairSet::new(
            [1, 2, 3],
            [(Some(1), Some(2)), (Some(3), Some(2)), (None, None)],
        );
        assert!(relaxed.satisfies(P::NullEuclidean));
        // A missing right-form conclusion (2,3) does not fire; only the
        // degenerate left instances remain, satisfied by (1, None).
        let right_only = PairSet::new(
            [1, 2, 3],
            [(Some(1), Some(2)), (Some(1), Some(3)), (Some(1), None)],
        );
        assert!(right_only.satisfies(P::NullEuclidean));
        assert!(!right_only.satisfies(P::Euclidean));
    }

    #[test]
    fn acyclicity_reports_one_cycle_per_component() {
        let r = ps(
            &[1, 2, 3, 4, 5],
            &full(&[(1, 2), (2, 3), (3, 1), (4, 4), (5, 1)]),
        );
        let v = r.check(P::Acyclicity);
        assert_eq!(v.len(), 2);
        let mut cycles: Vec<Vec<u64>> = v
            .into_iter()
            .map(|v| match v.witness {
                PairWitness::Cycle(c) => c,
                w => panic!("unexpected witness {w:?}"),
            })
            .collect();
        cycles.sort();
        assert_eq!(cycles[0], vec![1, 2, 3]);
        assert_eq!(cycles[1], vec![4]);
        let dag = ps(&[1, 2, 3], &full(&[(1, 2), (2, 3), (1, 3)]));
        assert!(dag.satisfies(P::Acyclicity));
    }

    #[test]
    fn equivalence_combines_three_checks() {
        let r = ps(&[1, 2], &full(&[(1, 1), (2, 2), (1, 2), (2, 1)]));
        assert!(r.satisfies(P::Equivalence));
        let broken = ps(&[1, 2], &full(&[(1, 1), (1, 2), (2, 1)]));
        let v = broken.check(P::Equivalence);
        assert!(v.iter().all(|v| v.property == P::Equivalence));
        assert!(!v.is_empty());
    }
}
