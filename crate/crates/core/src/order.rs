//! Partial preorders used as betterness relations.
//!
//! A [`PartialPreorder`] stores a dense verdict matrix over its carrier. It is
//! only ever constructed in a closed, consistent state: the weak part
//! (better-or-equal) is reflexive and transitive, and every pair carries
//! exactly one [`Verdict`].

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Debug;

use num_traits::Zero;

use crate::constraints::ConstraintSet;
use crate::model::{Gamble, Lottery};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    Better,
    Equal,
    Worse,
    Incomparable,
}

impl Verdict {
    pub fn flip(self) -> Verdict {
        match self {
            Verdict::Better => Verdict::Worse,
            Verdict::Worse => Verdict::Better,
            v => v,
        }
    }

    /// Better or Equal.
    pub fn at_least_as_good(self) -> bool {
        matches!(self, Verdict::Better | Verdict::Equal)
    }

    pub fn name(self) -> &'static str {
        match self {
            Verdict::Better => "better",
            Verdict::Equal => "equal",
            Verdict::Worse => "worse",
            Verdict::Incomparable => "incomparable",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OrderError<T: Debug> {
    #[error("betterness cycle through {cycle:?}")]
    Cycle { cycle: Vec<T> },
    #[error("{0:?} is not in the carrier")]
    UnknownElement(T),
    #[error("carrier of {size} elements exceeds the enumeration guard of {guard}")]
    CarrierTooLarge { size: usize, guard: usize },
}

/// Unclosed input: strict and equal claims over a carrier. Everything not
/// derivable from the claims is incomparable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawPreorder<T> {
    pub carrier: Vec<T>,
    pub strict: Vec<(T, T)>,
    pub equal: Vec<(T, T)>,
}

impl<T> Default for RawPreorder<T> {
    fn default() -> Self {
        RawPreorder { carrier: Vec::new(), strict: Vec::new(), equal: Vec::new() }
    }
}

impl<T: Ord + Clone + Debug> RawPreorder<T> {
    pub fn new(carrier: Vec<T>) -> Self {
        RawPreorder { carrier, strict: Vec::new(), equal: Vec::new() }
    }

    pub fn better(mut self, x: T, y: T) -> Self {
        self.strict.push((x, y));
        self
    }

    pub fn equal(mut self, x: T, y: T) -> Self {
        self.equal.push((x, y));
        self
    }

    pub fn close(&self) -> Result<PartialPreorder<T>, OrderError<T>> {
        close_and_check(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialPreorder<T> {
    carrier: Vec<T>,
    index: BTreeMap<T, usize>,
    cells: Vec<Verdict>,
}

/// Smallest consistent preorder containing the claims, or the cycle that
/// makes them inconsistent. Claims may mention elements missing from the
/// carrier; those are appended.
pub fn close_and_check<T: Ord + Clone + Debug>(raw: &RawPreorder<T>) -> Result<PartialPreorder<T>, OrderError<T>> {
    let mut carrier: Vec<T> = Vec::new();
    let mut index: BTreeMap<T, usize> = BTreeMap::new();
    let mut intern = |x: &T, carrier: &mut Vec<T>| -> usize {
        if let Some(&i) = index.get(x) {
            return i;
        }
        index.insert(x.clone(), carrier.len());
        carrier.push(x.clone());
        carrier.len() - 1
    };
    for x in &raw.carrier {
        intern(x, &mut carrier);
    }
    let strict: Vec<(usize, usize)> =
        raw.strict.iter().map(|(x, y)| (intern(x, &mut carrier), intern(y, &mut carrier))).collect();
    let equal: Vec<(usize, usize)> =
        raw.equal.iter().map(|(x, y)| (intern(x, &mut carrier), intern(y, &mut carrier))).collect();
    let n = carrier.len();

    // Direct weak edges: x >= y.
    let mut edges = vec![false; n * n];
    for &(x, y) in &strict {
        edges[x * n + y] = true;
    }
    for &(x, y) in &equal {
        edges[x * n + y] = true;
        edges[y * n + x] = true;
    }
    let mut reach = edges.clone();
    for i in 0..n {
        reach[i * n + i] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if !reach[i * n + k] {
                continue;
            }
            for j in 0..n {
                if reach[k * n + j] {
                    reach[i * n + j] = true;
                }
            }
        }
    }

    // A strict claim x > y is contradicted when y >= x is derivable.
    for &(x, y) in &strict {
        if reach[y * n + x] {
            let mut cycle = vec![carrier[x].clone()];
            cycle.extend(shortest_path(&edges, n, y, x).into_iter().map(|i| carrier[i].clone()));
            cycle.pop();
            return Err(OrderError::Cycle { cycle });
        }
    }

    let mut strictly = vec![false; n * n];
    for &(u, v) in &strict {
        for i in 0..n {
            if !reach[i * n + u] {
                continue;
            }
            for j in 0..n {
                if reach[v * n + j] {
                    strictly[i * n + j] = true;
                }
            }
        }
    }
    let mut cells = vec![Verdict::Incomparable; n * n];
    for i in 0..n {
        for j in 0..n {
            cells[i * n + j] = if strictly[i * n + j] {
                Verdict::Better
            } else if strictly[j * n + i] {
                Verdict::Worse
            } else if reach[i * n + j] && reach[j * n + i] {
                Verdict::Equal
            } else {
                Verdict::Incomparable
            };
        }
    }
    Ok(PartialPreorder { carrier, index, cells })
}

/// Node path `from -> ... -> to` along direct weak edges, inclusive.
fn shortest_path(edges: &[bool], n: usize, from: usize, to: usize) -> Vec<usize> {
    let mut prev = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    seen[from] = true;
    queue.push_back(from);
    while let Some(u) = queue.pop_front() {
        if u == to {
            break;
        }
        for v in 0..n {
            if edges[u * n + v] && !seen[v] {
                seen[v] = true;
                prev[v] = u;
                queue.push_back(v);
            }
        }
    }
    let mut path = vec![to];
    let mut cur = to;
    while cur != from {
        cur = prev[cur];
        path.push(cur);
    }
    path.reverse();
    path
}

impl<T: Ord + Clone + Debug> PartialPreorder<T> {
    /// Every element incomparable with every other.
    pub fn antichain(carrier: impl IntoIterator<Item = T>) -> Self {
        RawPreorder::new(carrier.into_iter().collect())
            .close()
            .expect("no claims, no cycle")
    }

    /// Total preorder induced by a numeric key: higher key is better.
    pub fn from_key<K: Ord>(carrier: impl IntoIterator<Item = T>, key: impl Fn(&T) -> K) -> Self {
        let mut out = RawPreorder::new(carrier.into_iter().collect()).close().expect("no claims");
        let n = out.len();
        let keys: Vec<K> = out.carrier.iter().map(&key).collect();
        for i in 0..n {
            for j in 0..n {
                out.cells[i * n + j] = match keys[i].cmp(&keys[j]) {
                    core::cmp::Ordering::Greater => Verdict::Better,
                    core::cmp::Ordering::Less => Verdict::Worse,
                    core::cmp::Ordering::Equal => Verdict::Equal,
                };
            }
        }
        out
    }

    pub(crate) fn from_cells(carrier: Vec<T>, cells: Vec<Verdict>) -> Self {
        let index = carrier.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
        PartialPreorder { carrier, index, cells }
    }

    pub fn carrier(&self) -> &[T] {
        &self.carrier
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn contains(&self, x: &T) -> bool {
        self.index.contains_key(x)
    }

    pub fn position(&self, x: &T) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn verdict_at(&self, i: usize, j: usize) -> Verdict {
        self.cells[i * self.carrier.len() + j]
    }

    pub fn relate(&self, x: &T, y: &T) -> Result<Verdict, OrderError<T>> {
        let i = self.position(x).ok_or_else(|| OrderError::UnknownElement(x.clone()))?;
        let j = self.position(y).ok_or_else(|| OrderError::UnknownElement(y.clone()))?;
        Ok(self.verdict_at(i, j))
    }

    pub fn is_complete(&self) -> bool {
        !self.cells.contains(&Verdict::Incomparable)
    }

    /// Elements at least as good as `x`.
    pub fn upset(&self, x: &T) -> Result<Vec<&T>, OrderError<T>> {
        let j = self.position(x).ok_or_else(|| OrderError::UnknownElement(x.clone()))?;
        Ok((0..self.len())
            .filter(|&i| self.verdict_at(i, j).at_least_as_good())
            .map(|i| &self.carrier[i])
            .collect())
    }

    /// Strict pairs `(better, worse)` in matrix order.
    pub fn strict_pairs(&self) -> Vec<(T, T)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.verdict_at(i, j) == Verdict::Better {
                    out.push((self.carrier[i].clone(), self.carrier[j].clone()));
                }
            }
        }
        out
    }

    /// Unordered equal pairs of distinct elements, `i < j` in carrier order.
    pub fn equal_pairs(&self) -> Vec<(T, T)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.verdict_at(i, j) == Verdict::Equal {
                    out.push((self.carrier[i].clone(), self.carrier[j].clone()));
                }
            }
        }
        out
    }

    pub fn to_raw(&self) -> RawPreorder<T> {
        RawPreorder { carrier: self.carrier.clone(), strict: self.strict_pairs(), equal: self.equal_pairs() }
    }

    /// Sub-order on the listed elements, in the listed order.
    pub fn restrict(&self, keep: &[T]) -> Result<Self, OrderError<T>> {
        let mut carrier: Vec<T> = Vec::new();
        for x in keep {
            if !self.contains(x) {
                return Err(OrderError::UnknownElement(x.clone()));
            }
            if !carrier.contains(x) {
                carrier.push(x.clone());
            }
        }
        let idx: Vec<usize> = carrier.iter().map(|x| self.index[x]).collect();
        let m = carrier.len();
        let mut cells = vec![Verdict::Incomparable; m * m];
        for a in 0..m {
            for b in 0..m {
                cells[a * m + b] = self.verdict_at(idx[a], idx[b]);
            }
        }
        Ok(Self::from_cells(carrier, cells))
    }

    /// Adds elements, incomparable with everything already present.
    pub fn with_elements(&self, extra: impl IntoIterator<Item = T>) -> Self {
        let mut raw = self.to_raw();
        for x in extra {
            if !raw.carrier.contains(&x) {
                raw.carrier.push(x);
            }
        }
        raw.close().expect("adding isolated elements keeps a closed order consistent")
    }

    /// True when `self` contains every strict and equal pair of `base`.
    pub fn extends(&self, base: &Self) -> bool {
        base.carrier.iter().enumerate().all(|(i, x)| {
            base.carrier.iter().enumerate().all(|(j, y)| {
                let want = base.verdict_at(i, j);
                want == Verdict::Incomparable || self.relate(x, y).ok() == Some(want)
            })
        })
    }
}

/// Probability mass on elements at least as good as `x`.
pub fn upset_probability<'a, T: Ord + Clone + Debug + 'a>(
    masses: impl IntoIterator<Item = (&'a T, &'a Rational)>,
    order: &PartialPreorder<T>,
    x: &T,
) -> Result<Rational, OrderError<T>> {
    let j = order.position(x).ok_or_else(|| OrderError::UnknownElement(x.clone()))?;
    let mut total = Rational::zero();
    for (y, p) in masses {
        let i = order.position(y).ok_or_else(|| OrderError::UnknownElement(y.clone()))?;
        if order.verdict_at(i, j).at_least_as_good() {
            total += p;
        }
    }
    Ok(total)
}

/// Merges states with identical outcomes.
pub fn collapse_gamble(gamble: &Gamble) -> Lottery {
    gamble.collapse()
}

/// Default enumeration guard on carrier size.
pub const DEFAULT_GUARD: usize = 8;
/// Largest guard any caller may request.
pub const HARD_CEILING: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompletionOptions {
    pub guard: usize,
    /// Forbid new Equal verdicts between distinct elements.
    pub linear_only: bool,
}

impl Default for CompletionOptions {
    fn default() -> Self {
        CompletionOptions { guard: DEFAULT_GUARD, linear_only: false }
    }
}

impl CompletionOptions {
    pub fn effective_guard(&self) -> usize {
        self.guard.min(HARD_CEILING)
    }
}

/// Depth-first enumerator of consistent verdict matrices extending a base.
///
/// Cells `(i, j)` with `i < j` are filled in row-major order; each takes its
/// verdicts in the order Better, Equal, Worse (then Incomparable when partial
/// extensions are requested), so the stream is lexicographic in that order.
/// A triple is checked when its last cell is set, which for row-major order
/// is the cell `(i, j)` with the third element `k < i`.
pub struct Extensions<T> {
    carrier: Vec<T>,
    n: usize,
    cells: Vec<(usize, usize)>,
    allowed: Vec<Vec<Verdict>>,
    choice: Vec<usize>,
    matrix: Vec<Verdict>,
    depth: usize,
    done: bool,
}

impl<T: Ord + Clone + Debug> Extensions<T> {
    fn new(base: &PartialPreorder<T>, allow_incomparable: bool, linear_only: bool) -> Self {
        let n = base.len();
        let mut cells = Vec::new();
        let mut allowed = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                cells.push((i, j));
                let fixed = base.verdict_at(i, j);
                allowed.push(match fixed {
                    Verdict::Incomparable => {
                        let mut opts = vec![Verdict::Better];
                        if !linear_only {
                            opts.push(Verdict::Equal);
                        }
                        opts.push(Verdict::Worse);
                        if allow_incomparable {
                            opts.push(Verdict::Incomparable);
                        }
                        opts
                    }
                    v => vec![v],
                });
            }
        }
        let mut matrix = vec![Verdict::Incomparable; n * n];
        for i in 0..n {
            matrix[i * n + i] = Verdict::Equal;
        }
        let k = cells.len();
        Extensions {
            carrier: base.carrier().to_vec(),
            n,
            cells,
            allowed,
            choice: vec![0; k],
            matrix,
            depth: 0,
            done: false,
        }
    }

    fn ge(&self, a: usize, b: usize) -> bool {
        self.matrix[a * self.n + b].at_least_as_good()
    }

    fn triple_ok(&self, x: usize, y: usize, z: usize) -> bool {
        let perms = [(x, y, z), (x, z, y), (y, x, z), (y, z, x), (z, x, y), (z, y, x)];
        perms.iter().all(|&(a, b, c)| !(self.ge(a, b) && self.ge(b, c)) || self.ge(a, c))
    }

    fn place(&mut self, d: usize, v: Verdict) -> bool {
        let (i, j) = self.cells[d];
        let n = self.n;
        self.matrix[i * n + j] = v;
        self.matrix[j * n + i] = v.flip();
        (0..i).all(|k| self.triple_ok(k, i, j))
    }
}

impl<T: Ord + Clone + Debug> Iterator for Extensions<T> {
    type Item = PartialPreorder<T>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        loop {
            if self.depth == self.cells.len() {
                let out = PartialPreorder::from_cells(self.carrier.clone(), self.matrix.clone());
                if self.cells.is_empty() {
                    self.done = true;
                } else {
                    self.depth -= 1;
                    self.choice[self.depth] += 1;
                }
                return Some(out);
            }
            let d = self.depth;
            let mut placed = false;
            while self.choice[d] < self.allowed[d].len() {
                let v = self.allowed[d][self.choice[d]];
                if self.place(d, v) {
                    placed = true;
                    break;
                }
                self.choice[d] += 1;
            }
            if placed {
                self.depth += 1;
                continue;
            }
            self.choice[d] = 0;
            if d == 0 {
                self.done = true;
                return None;
            }
            self.depth -= 1;
            self.choice[self.depth] += 1;
        }
    }
}

/// Every consistent preorder (incomparability allowed) extending `base`, in
/// the same deterministic order as [`enumerate_completions`].
pub fn enumerate_extensions<T: Ord + Clone + Debug>(
    base: &PartialPreorder<T>,
    guard: usize,
) -> Result<Extensions<T>, OrderError<T>> {
    let guard = guard.min(HARD_CEILING);
    if base.len() > guard {
        return Err(OrderError::CarrierTooLarge { size: base.len(), guard });
    }
    Ok(Extensions::new(base, true, false))
}

/// Admissible completions: total preorders extending `base` that every
/// constraint admits.
pub struct Completions<'c, T> {
    inner: Extensions<T>,
    constraints: &'c ConstraintSet<T>,
}

impl<T: Ord + Clone + Debug> Iterator for Completions<'_, T> {
    type Item = PartialPreorder<T>;

    fn next(&mut self) -> Option<Self::Item> {
        let constraints = self.constraints;
        self.inner.by_ref().find(|c| constraints.admits(c))
    }
}

pub fn enumerate_completions<'c, T: Ord + Clone + Debug>(
    base: &PartialPreorder<T>,
    constraints: &'c ConstraintSet<T>,
    options: CompletionOptions,
) -> Result<Completions<'c, T>, OrderError<T>> {
    let guard = options.effective_guard();
    if base.len() > guard {
        return Err(OrderError::CarrierTooLarge { size: base.len(), guard });
    }
    Ok(Completions { inner: Extensions::new(base, false, options.linear_only), constraints })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{one, ratio, zero};
    use alloc::collections::BTreeSet;

    #[test]
    fn closure_adds_transitive_pairs() {
        let r = RawPreorder::new(vec!["a+", "a", "a-"]).better("a+", "a").better("a", "a-").close().unwrap();
        assert_eq!(r.relate(&"a+", &"a-").unwrap(), Verdict::Better);
        assert_eq!(r.relate(&"a-", &"a+").unwrap(), Verdict::Worse);
        assert_eq!(r.relate(&"a", &"a").unwrap(), Verdict::Equal);
    }

    #[test]
    fn closure_mixes_strict_and_equal() {
        let r = RawPreorder::new(vec!["x", "y", "z", "w"])
            .better("x", "y")
            .equal("y", "z")
            .equal("w", "x")
            .close()
            .unwrap();
        assert_eq!(r.relate(&"x", &"z").unwrap(), Verdict::Better);
        assert_eq!(r.relate(&"w", &"z").unwrap(), Verdict::Better);
        assert_eq!(r.relate(&"z", &"y").unwrap(), Verdict::Equal);
    }

    #[test]
    fn empty_relation_is_identity() {
        let r: PartialPreorder<u8> = RawPreorder::default().close().unwrap();
        assert!(r.is_empty());
        let single = RawPreorder::new(vec![1u8]).close().unwrap();
        assert_eq!(single.relate(&1, &1).unwrap(), Verdict::Equal);
    }

    #[test]
    fn detects_cycle_with_witness() {
        let err = RawPreorder::new(vec![1, 2, 3, 4])
            .better(1, 2)
            .better(2, 3)
            .better(3, 4)
            .better(4, 1)
            .close()
            .unwrap_err();
        match err {
            OrderError::Cycle { cycle } => {
                assert_eq!(cycle.len(), 4);
                let set: BTreeSet<_> = cycle.iter().copied().collect();
                assert_eq!(set.len(), 4);
            }
            other => panic!("unexpected {other:?}"),
        }
        let clash = RawPreorder::new(vec![1, 2]).better(1, 2).equal(1, 2).close();
        assert!(matches!(clash, Err(OrderError::Cycle { .. })));
    }

    #[test]
    fn relate_unknown_element() {
        let r = PartialPreorder::antichain([1, 2]);
        assert_eq!(r.relate(&1, &3), Err(OrderError::UnknownElement(3)));
        assert_eq!(r.relate(&1, &2).unwrap(), Verdict::Incomparable);
    }

    #[test]
    fn upset_probabilities() {
        let r = PartialPreorder::antichain(["a", "b"]);
        let masses = [("a", ratio(1, 2)), ("b", ratio(1, 2))];
        let it = || masses.iter().map(|(x, p)| (x, p));
        assert_eq!(upset_probability(it(), &r, &"a").unwrap(), ratio(1, 2));
        let chain = RawPreorder::new(vec!["top", "a", "b"]).better("a", "top").close().unwrap();
        assert_eq!(upset_probability(it(), &chain, &"top").unwrap(), ratio(1, 2));
        let lower = RawPreorder::new(vec!["a", "b", "c"]).better("c", "a").close().unwrap();
        assert_eq!(upset_probability(it(), &lower, &"c").unwrap(), zero());
        let point = [("a", one())];
        assert_eq!(upset_probability(point.iter().map(|(x, p)| (x, p)), &r, &"a").unwrap(), one());
    }

    #[test]
    fn completion_counts_small() {
        let none = ConstraintSet::new();
        let chain = RawPreorder::new(vec!['x', 'y']).better('x', 'y').close().unwrap();
        assert_eq!(enumerate_completions(&chain, &none, CompletionOptions::default()).unwrap().count(), 1);
        let anti = PartialPreorder::antichain(['x', 'y']);
        let all: Vec<_> = enumerate_completions(&anti, &none, CompletionOptions::default()).unwrap().collect();
        assert_eq!(all.len(), 3);
        assert_eq!(all[0].relate(&'x', &'y').unwrap(), Verdict::Better);
        assert_eq!(all[1].relate(&'x', &'y').unwrap(), Verdict::Equal);
        assert_eq!(all[2].relate(&'x', &'y').unwrap(), Verdict::Worse);
        let linear = CompletionOptions { linear_only: true, ..Default::default() };
        assert_eq!(enumerate_completions(&anti, &none, linear).unwrap().count(), 2);
    }

    #[test]
    fn fubini_numbers() {
        // Number of weak orders on n labelled elements.
        let none = ConstraintSet::new();
        let expected = [1usize, 1, 3, 13, 75, 541, 4683];
        for (n, &want) in expected.iter().enumerate() {
            let anti = PartialPreorder::antichain(0..n);
            assert_eq!(enumerate_completions(&anti, &none, CompletionOptions::default()).unwrap().count(), want);
        }
    }

    #[test]
    fn preorder_counts() {
        // Number of preorders on n labelled elements.
        let expected = [1usize, 1, 4, 29, 355];
        for (n, &want) in expected.iter().enumerate() {
            let anti = PartialPreorder::antichain(0..n);
            assert_eq!(enumerate_extensions(&anti, 8).unwrap().count(), want);
        }
    }

    #[test]
    fn guard_is_enforced() {
        let none = ConstraintSet::new();
        let big = PartialPreorder::antichain(0..9);
        assert!(matches!(
            enumerate_completions(&big, &none, CompletionOptions::default()),
            Err(OrderError::CarrierTooLarge { size: 9, guard: 8 })
        ));
        let huge = PartialPreorder::antichain(0..11);
        let opts = CompletionOptions { guard: 50, linear_only: false };
        assert!(matches!(
            enumerate_completions(&huge, &none, opts),
            Err(OrderError::CarrierTooLarge { guard: 10, .. })
        ));
    }

    #[test]
    fn restriction_and_extension() {
        let r = RawPreorder::new(vec![1, 2, 3]).better(1, 2).better(2, 3).close().unwrap();
        let sub = r.restrict(&[3, 1]).unwrap();
        assert_eq!(sub.relate(&1, &3).unwrap(), Verdict::Better);
        assert!(r.extends(&PartialPreorder::antichain([1, 2, 3])));
        assert!(!PartialPreorder::antichain([1, 2, 3]).extends(&r));
        let wider = r.with_elements([4]);
        assert_eq!(wider.relate(&4, &1).unwrap(), Verdict::Incomparable);
    }
}
