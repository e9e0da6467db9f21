//! Achievable loads and the cut-set outer bound.
//!
//! The coded caching scheme with uncoded placement has one operating point
//! per integer split parameter `t`: per-user memory `tN/K` and delivery load
//! `(K-t)/(t+1)`. Time-sharing between adjacent points makes the achievable
//! load a piecewise linear curve; [`man_load`] evaluates it exactly. When
//! `N < K`, broadcasting the uncached remainder of every file (load `N - M`)
//! can beat the multicast gain for small memories, so the corner loads are
//! capped at `N(K-t)/K` before taking the lower convex envelope. That branch
//! only matters to simulation paths; the converse machinery requires
//! `N >= K`.

use num_traits::Zero;

use crate::combinatorics::UserSet;
use crate::curve::TradeoffCurve;
use crate::scalar::max_of;
use crate::{Error, Exact, Result, Scalar};

/// Dimensions of a caching problem plus the simulation granularity.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemInstance {
    pub n_files: usize,
    pub k_users: usize,
    /// Per-user cache size in file units.
    pub memory: Exact,
    /// Bit granularity used when files are materialized for simulation.
    pub subfile_bits: usize,
}

impl ProblemInstance {
    pub fn new(n_files: usize, k_users: usize, memory: Exact, subfile_bits: usize) -> Result<Self> {
        if n_files == 0 || k_users == 0 {
            return Err(Error::InvalidInstance(
                "need at least one file and one user".into(),
            ));
        }
        if k_users > UserSet::MAX_USERS {
            return Err(Error::InvalidInstance(format!(
                "K = {k_users} exceeds the bitmask width {}",
                UserSet::MAX_USERS
            )));
        }
        if memory < Exact::zero() || memory > Exact::from_int(n_files as i64) {
            return Err(Error::InvalidInstance(format!(
                "memory {memory} outside [0, N]"
            )));
        }
        if subfile_bits == 0 {
            return Err(Error::InvalidInstance("subfile_bits must be positive".into()));
        }
        Ok(ProblemInstance {
            n_files,
            k_users,
            memory,
            subfile_bits,
        })
    }
}

/// The files requested by users `1..=K`; entry `i-1` is user `i`'s file.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DemandVector(Vec<usize>);

impl DemandVector {
    pub fn new(entries: Vec<usize>, n_files: usize) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidDemand("empty demand vector".into()));
        }
        for &d in &entries {
            if d == 0 || d > n_files {
                return Err(Error::InvalidDemand(format!(
                    "demand {d} outside [1:{n_files}]"
                )));
            }
        }
        Ok(DemandVector(entries))
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    /// File demanded by `user` (1-based).
    pub fn demand_of(&self, user: usize) -> usize {
        self.0[user - 1]
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn is_distinct(&self) -> bool {
        let mut seen = vec![false; self.0.len() + self.0.iter().max().unwrap_or(&0)];
        for &d in &self.0 {
            if seen[d] {
                return false;
            }
            seen[d] = true;
        }
        true
    }

    pub fn require_distinct(&self) -> Result<()> {
        if self.is_distinct() {
            Ok(())
        } else {
            Err(Error::InvalidDemand(format!(
                "demands {:?} are not pairwise distinct",
                self.0
            )))
        }
    }

    /// All `P(N, K)` demand vectors with pairwise distinct entries, in
    /// lexicographic order.
    pub fn all_distinct(n_files: usize, k_users: usize) -> Vec<DemandVector> {
        use itertools::Itertools;
        (1..=n_files)
            .permutations(k_users)
            .map(DemandVector)
            .collect()
    }

    /// All `N^K` demand vectors, lexicographic.
    pub fn all_vectors(n_files: usize, k_users: usize) -> Vec<DemandVector> {
        use itertools::Itertools;
        (0..k_users)
            .map(|_| 1..=n_files)
            .multi_cartesian_product()
            .map(DemandVector)
            .collect()
    }
}

impl std::fmt::Debug for DemandVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "d=(")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ")")
    }
}

/// Corner points `(tN/K, load_t)` of the achievable tradeoff, `t = 0..=K`.
///
/// For `N >= K` the corner load is `(K-t)/(t+1)`; for `N < K` it is capped
/// at `N(K-t)/K`, the cost of just broadcasting what nobody cached.
pub fn man_corner_points<S: Scalar>(n_files: usize, k_users: usize) -> Vec<(S, S)> {
    assert!(n_files >= 1 && k_users >= 1);
    let (n, k) = (n_files as i64, k_users as i64);
    (0..=k)
        .map(|t| {
            let m = S::from_ratio(t * n, k);
            let multicast = S::from_ratio(k - t, t + 1);
            let load = if n < k {
                let flooded = S::from_ratio(n * (k - t), k);
                if flooded < multicast {
                    flooded
                } else {
                    multicast
                }
            } else {
                multicast
            };
            (m, load)
        })
        .collect()
}

/// Achievable load of the uncoded-placement scheme at memory `m`, with
/// time-sharing between integer split points. Exact for exact scalars.
pub fn man_load<S: Scalar>(n_files: usize, k_users: usize, m: &S) -> S {
    TradeoffCurve::man(n_files, k_users).value_at(m)
}

/// Cut-set outer bound: max over `s` of `s - sM / floor(N/s)`, never below 0.
pub fn cut_set_bound<S: Scalar>(n_files: usize, k_users: usize, m: &S) -> S {
    assert!(n_files >= 1 && k_users >= 1);
    let mut best = S::zero();
    for s in 1..=n_files.min(k_users) {
        let term = S::from_int(s as i64)
            - S::from_int(s as i64) * m.clone() / S::from_int((n_files / s) as i64);
        best = max_of(best, term);
    }
    best
}

/// One evaluation point of [`large_cache_check`].
#[derive(Clone, Debug)]
pub struct LargeCachePoint<S> {
    pub memory: S,
    pub achievable: S,
    pub cut_set: S,
    pub expected: S,
}

impl<S: Scalar> LargeCachePoint<S> {
    pub fn pass(&self) -> bool {
        self.achievable == self.cut_set && self.achievable == self.expected
    }
}

/// Checks that the achievable curve meets the cut-set bound at the start and
/// end of the large-cache segment: load `1/K` at `M = N(K-1)/K` and load `0`
/// at `M = N`. Both curves are linear on that segment, so agreement at the
/// endpoints gives agreement throughout.
pub fn large_cache_check<S: Scalar>(n_files: usize, k_users: usize) -> Vec<LargeCachePoint<S>> {
    let (n, k) = (n_files as i64, k_users as i64);
    let points = [
        (S::from_ratio(n * (k - 1), k), S::from_ratio(1, k)),
        (S::from_int(n), S::zero()),
    ];
    points
        .into_iter()
        .map(|(m, expected)| LargeCachePoint {
            achievable: man_load(n_files, k_users, &m),
            cut_set: cut_set_bound(n_files, k_users, &m),
            memory: m,
            expected,
        })
        .collect()
}
