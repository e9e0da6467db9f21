//! Index-coding view of an uncoded placement under fixed distinct demands.
//!
//! Each subfile a user still needs is a message; receiver side information
//! is the cache contents. The digraph has a node per (requester, caching
//! set) pair and an edge `i -> j` whenever the requester of `j` caches the
//! subfile of `i`. Any node set inducing no directed cycle lower-bounds the
//! broadcast length by its total size; `permutation_acyclic_set` builds the
//! structured acyclic sets behind the converse, and `max_acyclic_bound` is
//! a brute-force oracle for small graphs.

use std::collections::BTreeMap;

use crate::combinatorics::{Permutation, UserSet};
use crate::schemes::DemandVector;
use crate::{Error, Result, Scalar};

/// Node-count cap for the exhaustive acyclic-set search.
pub const MAX_SEARCH_NODES: usize = 24;

/// Largest K for which graphs are built (K*2^(K-1) nodes).
const MAX_GRAPH_USERS: usize = 20;

/// Subfile lengths of an uncoded placement, in file units, keyed by
/// (file, caching set). Lengths of each file sum to 1; absent keys are 0.
#[derive(Clone, Debug, PartialEq)]
pub struct UncodedSplit<S> {
    n_files: usize,
    k_users: usize,
    lengths: BTreeMap<(usize, u32), S>,
}

impl<S: Scalar> UncodedSplit<S> {
    /// The B(K,t)-way split: every t-subset part has length 1/B(K,t).
    pub fn man(n_files: usize, k_users: usize, t: usize) -> Self {
        assert!(t <= k_users, "split parameter out of range");
        let parts = crate::combinatorics::binom(k_users, t);
        let len = S::from_ratio(1, parts as i64);
        let mut lengths = BTreeMap::new();
        for j in 1..=n_files {
            for w in UserSet::full(k_users).subsets_of_size(t) {
                lengths.insert((j, w.mask()), len.clone());
            }
        }
        UncodedSplit {
            n_files,
            k_users,
            lengths,
        }
    }

    /// The full 2^K-way split with every part of length 1/2^K.
    pub fn uniform(n_files: usize, k_users: usize) -> Self {
        let len = S::from_ratio(1, 1i64 << k_users);
        let mut lengths = BTreeMap::new();
        for j in 1..=n_files {
            for w in UserSet::full(k_users).subsets() {
                lengths.insert((j, w.mask()), len.clone());
            }
        }
        UncodedSplit {
            n_files,
            k_users,
            lengths,
        }
    }

    /// Arbitrary lengths; validates ranges, nonnegativity, and that each
    /// file's parts sum to one file unit.
    pub fn from_lengths(
        n_files: usize,
        k_users: usize,
        entries: impl IntoIterator<Item = ((usize, UserSet), S)>,
    ) -> Result<Self> {
        let mut lengths = BTreeMap::new();
        for ((file, w), len) in entries {
            if file == 0 || file > n_files {
                return Err(Error::InvalidInstance(format!(
                    "split names file {file} outside [1:{n_files}]"
                )));
            }
            if !w.is_subset_of(UserSet::full(k_users)) {
                return Err(Error::InvalidInstance(format!(
                    "split subset {w} not within [1:{k_users}]"
                )));
            }
            if len < S::zero() {
                return Err(Error::InvalidInstance(format!(
                    "negative subfile length {len}"
                )));
            }
            lengths.insert((file, w.mask()), len);
        }
        for j in 1..=n_files {
            let total = lengths
                .range((j, 0)..=(j, u32::MAX))
                .fold(S::zero(), |acc, (_, l)| acc + l.clone());
            if total != S::one() {
                return Err(Error::InvalidInstance(format!(
                    "file {j} splits into total length {total}, expected 1"
                )));
            }
        }
        Ok(UncodedSplit {
            n_files,
            k_users,
            lengths,
        })
    }

    pub fn n_files(&self) -> usize {
        self.n_files
    }

    pub fn k_users(&self) -> usize {
        self.k_users
    }

    pub fn length(&self, file: usize, w: UserSet) -> S {
        self.lengths
            .get(&(file, w.mask()))
            .cloned()
            .unwrap_or_else(S::zero)
    }
}

/// One message of the index coding problem: subfile `F_{file,subset}`,
/// wanted by `requester` (who does not cache it).
#[derive(Clone, Debug)]
pub struct IcNode<S> {
    pub file: usize,
    pub subset: UserSet,
    pub requester: usize,
    pub length: S,
}

/// Side-information digraph. Nodes are ordered requester-major, masks
/// ascending, so requester r's nodes occupy one contiguous block.
pub struct IndexCodingGraph<S> {
    k_users: usize,
    nodes: Vec<IcNode<S>>,
    out: Vec<Vec<usize>>,
    index: BTreeMap<(usize, u32), usize>,
}

/// Builds the graph for an uncoded split and pairwise-distinct demands.
/// Zero-length parts keep their nodes, so the node count is always
/// K*2^(K-1).
pub fn build_graph<S: Scalar>(
    split: &UncodedSplit<S>,
    d: &DemandVector,
) -> Result<IndexCodingGraph<S>> {
    let k = split.k_users();
    if d.k() != k {
        return Err(Error::InvalidDemand(format!(
            "demand vector has {} entries, expected {k}",
            d.k()
        )));
    }
    d.require_distinct()?;
    if let Some(&j) = d.entries().iter().find(|&&j| j == 0 || j > split.n_files()) {
        return Err(Error::InvalidDemand(format!(
            "demand {j} outside [1:{}]",
            split.n_files()
        )));
    }
    if k > MAX_GRAPH_USERS {
        return Err(Error::InvalidInstance(format!(
            "refusing to build a K*2^(K-1)-node graph for K = {k} > {MAX_GRAPH_USERS}"
        )));
    }

    let block = 1usize << (k - 1);
    let mut nodes = Vec::with_capacity(k * block);
    let mut index = BTreeMap::new();
    for r in 1..=k {
        let ground = UserSet::full(k).without(r);
        let file = d.demand_of(r);
        for w in ground.subsets() {
            index.insert((r, w.mask()), nodes.len());
            nodes.push(IcNode {
                file,
                subset: w,
                requester: r,
                length: split.length(file, w),
            });
        }
    }
    debug_assert_eq!(nodes.len(), k * block);

    let out = nodes
        .iter()
        .map(|node| {
            node.subset
                .users()
                .flat_map(|r| (r - 1) * block..r * block)
                .collect()
        })
        .collect();

    Ok(IndexCodingGraph {
        k_users: k,
        nodes,
        out,
        index,
    })
}

impl<S: Scalar> IndexCodingGraph<S> {
    pub fn k_users(&self) -> usize {
        self.k_users
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[IcNode<S>] {
        &self.nodes
    }

    pub fn out_edges(&self, i: usize) -> &[usize] {
        &self.out[i]
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn node_index(&self, requester: usize, subset: UserSet) -> Result<usize> {
        self.index
            .get(&(requester, subset.mask()))
            .copied()
            .ok_or(Error::UnknownNode {
                requester,
                mask: subset.mask(),
            })
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.nodes[i].subset.contains(self.nodes[j].requester)
    }

    /// Does the subgraph induced by `set` contain no directed cycle?
    /// Iterative three-color DFS; duplicate indices are harmless.
    pub fn is_acyclic(&self, set: &[usize]) -> bool {
        let mut member = vec![false; self.nodes.len()];
        for &i in set {
            member[i] = true;
        }
        // 0 = unvisited, 1 = on stack, 2 = finished
        let mut color = vec![0u8; self.nodes.len()];
        for &start in set {
            if color[start] != 0 {
                continue;
            }
            let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
            color[start] = 1;
            while let Some(frame) = stack.last_mut() {
                let node = frame.0;
                let mut descend = None;
                while frame.1 < self.out[node].len() {
                    let next = self.out[node][frame.1];
                    frame.1 += 1;
                    if !member[next] {
                        continue;
                    }
                    match color[next] {
                        1 => return false,
                        0 => {
                            descend = Some(next);
                            break;
                        }
                        _ => {}
                    }
                }
                match descend {
                    Some(next) => {
                        color[next] = 1;
                        stack.push((next, 0));
                    }
                    None => {
                        color[node] = 2;
                        stack.pop();
                    }
                }
            }
        }
        true
    }

    /// Total length of an acyclic node set: a valid lower bound on the
    /// broadcast length. Panics if the set is cyclic (caller contract).
    pub fn bound_value(&self, set: &[usize]) -> S {
        assert!(self.is_acyclic(set), "bound_value needs an acyclic set");
        let mut member = vec![false; self.nodes.len()];
        let mut total = S::zero();
        for &i in set {
            if !member[i] {
                member[i] = true;
                total = total + self.nodes[i].length.clone();
            }
        }
        total
    }

    /// Exhaustive best acyclic-set bound. Guarded to small graphs; prunes
    /// by "supersets of cyclic sets are cyclic" and by remaining mass.
    /// Zero-length nodes are skipped outright: they add no value and can
    /// only close cycles.
    pub fn max_acyclic_bound(&self) -> Result<S> {
        if self.node_count() > MAX_SEARCH_NODES {
            return Err(Error::SearchGuard {
                nodes: self.node_count(),
                max: MAX_SEARCH_NODES,
            });
        }
        let mut candidates: Vec<usize> = (0..self.node_count())
            .filter(|&i| self.nodes[i].length > S::zero())
            .collect();
        // heavier nodes first so the mass prune bites early
        candidates.sort_by(|&a, &b| {
            self.nodes[b]
                .length
                .partial_cmp(&self.nodes[a].length)
                .unwrap()
                .then(a.cmp(&b))
        });
        let mut tail_mass = vec![S::zero(); candidates.len() + 1];
        for pos in (0..candidates.len()).rev() {
            tail_mass[pos] = tail_mass[pos + 1].clone() + self.nodes[candidates[pos]].length.clone();
        }

        let mut best = S::zero();
        let mut chosen: Vec<usize> = Vec::new();
        self.search(&candidates, &tail_mass, 0, S::zero(), &mut chosen, &mut best);
        Ok(best)
    }

    fn search(
        &self,
        candidates: &[usize],
        tail_mass: &[S],
        pos: usize,
        acc: S,
        chosen: &mut Vec<usize>,
        best: &mut S,
    ) {
        if acc > *best {
            *best = acc.clone();
        }
        if pos == candidates.len() || acc.clone() + tail_mass[pos].clone() <= *best {
            return;
        }
        let node = candidates[pos];
        chosen.push(node);
        if self.is_acyclic(chosen) {
            let with = acc.clone() + self.nodes[node].length.clone();
            self.search(candidates, tail_mass, pos + 1, with, chosen, best);
        }
        chosen.pop();
        self.search(candidates, tail_mass, pos + 1, acc, chosen, best);
    }

    /// Plain-text dump: header, one `node` line per node (empty caching
    /// sets flagged), then one `edge` line per arc.
    pub fn export_text(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        writeln!(s, "nodes {}", self.node_count()).unwrap();
        for (i, node) in self.nodes.iter().enumerate() {
            write!(
                s,
                "node {i} file={} mask={} set={} requester={} length={}",
                node.file,
                node.subset.mask(),
                node.subset,
                node.requester,
                node.length
            )
            .unwrap();
            if node.subset.is_empty() {
                s.push_str(" empty");
            }
            s.push('\n');
        }
        writeln!(s, "edges {}", self.edge_count()).unwrap();
        for (i, edges) in self.out.iter().enumerate() {
            for &j in edges {
                writeln!(s, "edge {i} {j}").unwrap();
            }
        }
        s
    }
}

/// One level of a permutation's acyclic set: the nodes requested by `user`
/// whose caching sets avoid the permutation prefix up to this level.
#[derive(Clone, Debug)]
pub struct PermutationLevel {
    pub user: usize,
    pub masks: Vec<UserSet>,
}

/// The structured acyclic set of a permutation u: level i holds subfiles
/// of user u_i's demand cached only within `[1:K]` minus `{u_1..u_i}`. Every
/// edge leaves toward a strictly later level, so the set is acyclic.
#[derive(Clone, Debug)]
pub struct PermutationSet {
    levels: Vec<PermutationLevel>,
}

pub fn permutation_acyclic_set(u: &Permutation) -> PermutationSet {
    let k = u.k();
    let mut remaining = UserSet::full(k);
    let levels = (1..=k)
        .map(|i| {
            let user = u.at(i);
            remaining = remaining.without(user);
            PermutationLevel {
                user,
                masks: remaining.subsets().collect(),
            }
        })
        .collect();
    PermutationSet { levels }
}

impl PermutationSet {
    pub fn levels(&self) -> &[PermutationLevel] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.iter().map(|l| l.masks.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The subfiles in the set under demands d, level by level.
    pub fn subfiles(&self, d: &DemandVector) -> Vec<(usize, UserSet)> {
        self.levels
            .iter()
            .flat_map(|l| l.masks.iter().map(|&w| (d.demand_of(l.user), w)))
            .collect()
    }

    pub fn node_indices<S: Scalar>(&self, g: &IndexCodingGraph<S>) -> Result<Vec<usize>> {
        self.levels
            .iter()
            .flat_map(|l| l.masks.iter().map(|&w| g.node_index(l.user, w)))
            .collect()
    }

    pub fn bound_value<S: Scalar>(&self, g: &IndexCodingGraph<S>) -> Result<S> {
        Ok(g.bound_value(&self.node_indices(g)?))
    }

    /// True iff every edge inside the set goes to a strictly later level.
    pub fn respects_levels<S: Scalar>(&self, g: &IndexCodingGraph<S>) -> Result<bool> {
        let mut level_of: BTreeMap<usize, usize> = BTreeMap::new();
        for (li, level) in self.levels.iter().enumerate() {
            for &w in &level.masks {
                level_of.insert(g.node_index(level.user, w)?, li);
            }
        }
        for (&a, &la) in &level_of {
            for &b in g.out_edges(a) {
                if let Some(&lb) = level_of.get(&b) {
                    if lb <= la {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }
}
