//! Finite T0 spaces as partial orders.
//!
//! Convention: `p ⪯ q` means `U_p ⊆ U_q`, where `U_p` is the minimal open
//! neighborhood of `p`. Open sets are the down-closed subsets, `U_p` is the
//! down-set of `p` and the closure of `{p}` is its up-set.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Default cap on the number of open sets to enumerate.
pub const DEFAULT_OPENS_CAP: usize = 4096;

#[derive(Debug)]
struct SpaceData {
    names: Vec<String>,
    index: HashMap<String, usize>,
    leq: Vec<Vec<bool>>,
    covers: Vec<(usize, usize)>,
}

/// A finite T0 space, cheap to clone.
#[derive(Clone)]
pub struct FiniteSpace(Arc<SpaceData>);

/// Builds a space from named points and pairs `(p, q)` meaning `p ⪯ q`.
///
/// The relation is closed reflexively and transitively. Fails with
/// [`Error::NotAntisymmetric`] if two distinct points end up equivalent.
pub fn build_space<S: AsRef<str>>(points: &[S], leq_pairs: &[(S, S)]) -> Result<FiniteSpace> {
    let n = points.len();
    let mut index = HashMap::new();
    let mut names = Vec::with_capacity(n);
    for (i, p) in points.iter().enumerate() {
        let name = p.as_ref().to_string();
        if index.insert(name.clone(), i).is_some() {
            return Err(Error::DuplicatePoint(name));
        }
        names.push(name);
    }
    let lookup = |s: &S| {
        index
            .get(s.as_ref())
            .copied()
            .ok_or_else(|| Error::UnknownPoint(s.as_ref().to_string()))
    };
    let mut edges = vec![Vec::new(); n];
    let mut leq = vec![vec![false; n]; n];
    for (p, q) in leq_pairs {
        let (p, q) = (lookup(p)?, lookup(q)?);
        leq[p][q] = true;
        if p != q {
            edges[p].push(q);
        }
    }
    for (i, row) in leq.iter_mut().enumerate() {
        row[i] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if leq[i][k] {
                for j in 0..n {
                    if leq[k][j] {
                        leq[i][j] = true;
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if leq[i][j] && leq[j][i] {
                let mut cycle = path(&edges, i, j);
                cycle.extend(path(&edges, j, i).into_iter().skip(1));
                return Err(Error::NotAntisymmetric {
                    cycle: cycle.into_iter().map(|k| names[k].clone()).collect(),
                });
            }
        }
    }
    let mut covers = Vec::new();
    for q in 0..n {
        for p in 0..n {
            if q != p && leq[q][p] && !(0..n).any(|r| r != q && r != p && leq[q][r] && leq[r][p]) {
                covers.push((q, p));
            }
        }
    }
    Ok(FiniteSpace(Arc::new(SpaceData { names, index, leq, covers })))
}

/// Shortest path from `a` to `b` along declared pairs.
fn path(edges: &[Vec<usize>], a: usize, b: usize) -> Vec<usize> {
    let mut prev = vec![usize::MAX; edges.len()];
    let mut queue = VecDeque::from([a]);
    prev[a] = a;
    while let Some(x) = queue.pop_front() {
        if x == b {
            break;
        }
        for &y in &edges[x] {
            if prev[y] == usize::MAX {
                prev[y] = x;
                queue.push_back(y);
            }
        }
    }
    let mut out = vec![b];
    let mut cur = b;
    while cur != a {
        cur = prev[cur];
        out.push(cur);
    }
    out.reverse();
    out
}

impl FiniteSpace {
    pub fn len(&self) -> usize {
        self.0.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0.names
    }

    pub fn name(&self, p: usize) -> &str {
        &self.0.names[p]
    }

    pub fn point(&self, name: &str) -> Result<usize> {
        self.0.index.get(name).copied().ok_or_else(|| Error::UnknownPoint(name.to_string()))
    }

    pub fn points(&self) -> std::ops::Range<usize> {
        0..self.len()
    }

    /// `p ⪯ q`, i.e. `U_p ⊆ U_q`.
    pub fn leq(&self, p: usize, q: usize) -> bool {
        self.0.leq[p][q]
    }

    pub fn lt(&self, p: usize, q: usize) -> bool {
        p != q && self.0.leq[p][q]
    }

    /// Covering pairs `(q, p)` with `q ≺ p` and nothing strictly between.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.0.covers
    }

    /// All pairs `(q, p)` with `q ⪯ p`, including `q = p`.
    pub fn comparable_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n).flat_map(|q| (0..n).filter(move |&p| self.leq(q, p)).map(move |p| (q, p))).collect()
    }

    /// Declared order as `(p, q)` pairs with `p ≺ q`, covering relations only.
    pub fn hasse_pairs(&self) -> Vec<(String, String)> {
        self.0.covers.iter().map(|&(q, p)| (self.name(q).into(), self.name(p).into())).collect()
    }

    /// `U_p = {q : q ⪯ p}`.
    pub fn minimal_open(&self, p: usize) -> OpenSet {
        OpenSet::from_members(self.len(), (0..self.len()).filter(|&q| self.leq(q, p)).collect())
    }

    pub fn minimal_open_named(&self, name: &str) -> Result<OpenSet> {
        Ok(self.minimal_open(self.point(name)?))
    }

    /// Closure of `{p}`: `{q : p ⪯ q}`.
    pub fn closure(&self, p: usize) -> Vec<usize> {
        (0..self.len()).filter(|&q| self.leq(p, q)).collect()
    }

    pub fn is_closed_point(&self, p: usize) -> bool {
        self.closure(p) == [p]
    }

    pub fn whole(&self) -> OpenSet {
        OpenSet::from_members(self.len(), (0..self.len()).collect())
    }

    pub fn empty_open(&self) -> OpenSet {
        OpenSet::from_members(self.len(), Vec::new())
    }

    pub fn is_open(&self, members: &[usize]) -> bool {
        let mut mask = vec![false; self.len()];
        for &p in members {
            mask[p] = true;
        }
        members.iter().all(|&p| (0..self.len()).all(|q| !self.leq(q, p) || mask[q]))
    }

    /// Validates and wraps a set of point indices.
    pub fn open_set(&self, members: impl IntoIterator<Item = usize>) -> Result<OpenSet> {
        let mut m: Vec<usize> = members.into_iter().collect();
        m.sort_unstable();
        m.dedup();
        if let Some(&p) = m.iter().find(|&&p| p >= self.len()) {
            return Err(Error::UnknownPoint(format!("#{p}")));
        }
        if !self.is_open(&m) {
            let names: Vec<&str> = m.iter().map(|&p| self.name(p)).collect();
            return Err(Error::NotOpen(format!("{{{}}}", names.join(","))));
        }
        Ok(OpenSet::from_members(self.len(), m))
    }

    pub fn open_set_named<S: AsRef<str>>(&self, names: &[S]) -> Result<OpenSet> {
        let idx = names.iter().map(|s| self.point(s.as_ref())).collect::<Result<Vec<_>>>()?;
        self.open_set(idx)
    }

    /// Number of open sets; saturates at `u128::MAX`.
    pub fn count_opens(&self) -> u128 {
        let all: Vec<bool> = vec![true; self.len()];
        let mut memo = HashMap::new();
        self.count_down_sets(all, &mut memo)
    }

    fn count_down_sets(&self, remaining: Vec<bool>, memo: &mut HashMap<Vec<bool>, u128>) -> u128 {
        let Some(x) = remaining.iter().position(|&b| b) else { return 1 };
        if let Some(&c) = memo.get(&remaining) {
            return c;
        }
        // down-sets avoiding x lose everything above x; those containing x
        // contain everything below it
        let without: Vec<bool> =
            (0..self.len()).map(|q| remaining[q] && !self.leq(x, q)).collect();
        let with: Vec<bool> = (0..self.len()).map(|q| remaining[q] && !self.leq(q, x)).collect();
        let c = self
            .count_down_sets(without, memo)
            .saturating_add(self.count_down_sets(with, memo));
        memo.insert(remaining, c);
        c
    }

    /// All open sets ordered by size, then lexicographically by member
    /// indices. Fails if there are more than `cap`.
    pub fn enumerate_opens(&self, cap: usize) -> Result<Vec<OpenSet>> {
        let count = self.count_opens();
        if count > cap as u128 {
            return Err(Error::TooManyOpens { count: usize::try_from(count).unwrap_or(usize::MAX), cap });
        }
        // decide points in a linear extension so each choice only depends
        // on earlier ones
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&p| (self.minimal_open(p).len(), p));
        let mut out = Vec::with_capacity(count as usize);
        let mut mask = vec![false; self.len()];
        self.extend_opens(&order, 0, &mut mask, &mut out);
        out.sort_by(|a: &OpenSet, b: &OpenSet| (a.len(), &a.members).cmp(&(b.len(), &b.members)));
        Ok(out)
    }

    fn extend_opens(&self, order: &[usize], i: usize, mask: &mut Vec<bool>, out: &mut Vec<OpenSet>) {
        if i == order.len() {
            let members = (0..self.len()).filter(|&p| mask[p]).collect();
            out.push(OpenSet::from_members(self.len(), members));
            return;
        }
        let p = order[i];
        self.extend_opens(order, i + 1, mask, out);
        if (0..self.len()).all(|q| !self.lt(q, p) || mask[q]) {
            mask[p] = true;
            self.extend_opens(order, i + 1, mask, out);
            mask[p] = false;
        }
    }

    /// Strict chains `p_0 ≺ ... ≺ p_k` in lexicographic order of indices.
    pub fn chains(&self, k: usize) -> Vec<Chain> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(k + 1);
        for p in self.points() {
            cur.push(p);
            self.extend_chains(k, &mut cur, &mut out);
            cur.pop();
        }
        out
    }

    fn extend_chains(&self, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Chain>) {
        if cur.len() == k + 1 {
            out.push(Chain { points: cur.clone() });
            return;
        }
        let last = *cur.last().expect("nonempty chain");
        for p in self.points() {
            if self.lt(last, p) {
                cur.push(p);
                self.extend_chains(k, cur, out);
                cur.pop();
            }
        }
    }

    /// Length of the longest strict chain minus one; zero for a discrete space.
    pub fn height(&self) -> usize {
        let n = self.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&p| self.minimal_open(p).len());
        let mut best = vec![0usize; n];
        for &p in &order {
            best[p] = (0..n).filter(|&q| self.lt(q, p)).map(|q| best[q] + 1).max().unwrap_or(0);
        }
        best.into_iter().max().unwrap_or(0)
    }

    pub fn same_space(&self, other: &FiniteSpace) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.names == other.0.names && self.0.leq == other.0.leq)
    }

    pub fn describe(&self, set: &OpenSet) -> String {
        let names: Vec<&str> = set.members().iter().map(|&p| self.name(p)).collect();
        format!("{{{}}}", names.join(","))
    }
}

impl PartialEq for FiniteSpace {
    fn eq(&self, other: &Self) -> bool {
        self.same_space(other)
    }
}

impl Eq for FiniteSpace {}

impl fmt::Debug for FiniteSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteSpace")
            .field("points", &self.0.names)
            .field("covers", &self.hasse_pairs())
            .finish()
    }
}

/// A set of points, stored as sorted indices. Constructed through
/// [`FiniteSpace::open_set`] and friends, which check openness.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpenSet {
    universe: usize,
    members: Vec<usize>,
}

impl OpenSet {
    fn from_members(universe: usize, members: Vec<usize>) -> OpenSet {
        OpenSet { universe, members }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, p: usize) -> bool {
        self.members.binary_search(&p).is_ok()
    }

    pub fn is_subset(&self, other: &OpenSet) -> bool {
        self.members.iter().all(|&p| other.contains(p))
    }

    /// Unions of opens are open.
    pub fn union(&self, other: &OpenSet) -> OpenSet {
        let mut m: Vec<usize> = self.members.iter().chain(&other.members).copied().collect();
        m.sort_unstable();
        m.dedup();
        OpenSet::from_members(self.universe, m)
    }

    /// Intersections of opens are open.
    pub fn intersection(&self, other: &OpenSet) -> OpenSet {
        let m = self.members.iter().copied().filter(|&p| other.contains(p)).collect();
        OpenSet::from_members(self.universe, m)
    }

    /// Position of `p` among the members.
    pub fn position(&self, p: usize) -> Option<usize> {
        self.members.binary_search(&p).ok()
    }
}

/// A strict chain `p_0 ≺ p_1 ≺ ... ≺ p_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chain {
    pub points: Vec<usize>,
}

impl Chain {
    pub fn degree(&self) -> usize {
        self.points.len() - 1
    }

    pub fn first(&self) -> usize {
        self.points[0]
    }

    /// The chain with entry `j` removed.
    pub fn face(&self, j: usize) -> Chain {
        let mut points = self.points.clone();
        points.remove(j);
        Chain { points }
    }
}
