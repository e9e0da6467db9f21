//! Bitmask user sets, subset and permutation enumeration, and the binomial
//! identities the bounds are built from.
//!
//! Users are numbered `1..=K` and stored in bit positions `0..K-1` of a
//! `u32` mask, which keeps membership tests O(1) when scanning graph edges.
//! Every enumeration here has a fixed deterministic order (ascending bitmask,
//! lexicographic permutations) so fixtures and exported files are
//! reproducible.

use std::fmt;

use itertools::Itertools;

use crate::{Error, Result};

/// Largest `k` accepted by [`permutations_of`]; k! past this is explosive.
pub const MAX_PERMUTATION_K: usize = 10;

/// Binomial coefficient `B(n, k)`, with `B(n, k) = 0` when `k > n`.
pub fn binom(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u64 = 1;
    for i in 0..k {
        // r holds B(n, i) here, so the division is exact.
        r = r
            .checked_mul((n - i) as u64)
            .expect("binomial coefficient overflow")
            / (i as u64 + 1);
    }
    r
}

/// `n! = P(n, n)`.
pub fn factorial(n: usize) -> u64 {
    falling_factorial(n, n)
}

/// Number of ordered k-arrangements of n items, `P(n, k) = n (n-1) ... (n-k+1)`.
pub fn falling_factorial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let mut r: u64 = 1;
    for i in 0..k {
        r = r
            .checked_mul((n - i) as u64)
            .expect("falling factorial overflow");
    }
    r
}

/// The literal sum `B(K-1, i) + B(K-2, i) + ... + B(i, i)`.
///
/// Counts, per level of a permutation acyclic set, how many subsets of size
/// `i` survive. By the hockey-stick identity it equals `B(K, i+1)`; both
/// routes are kept and tested against each other. The sum is empty (zero)
/// when `i = K`.
pub fn hockey_stick(k_users: usize, i: usize) -> u64 {
    assert!(k_users >= 1, "K must be positive");
    assert!(i <= k_users, "i must lie in [0:K]");
    (i..k_users).map(|m| binom(m, i)).sum()
}

/// A set of users out of `1..=K`, encoded as a bitmask (user `u` at bit
/// `u - 1`).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct UserSet(u32);

impl UserSet {
    /// Upper limit on user indices so masks stay inside a `u32`.
    pub const MAX_USERS: usize = 32;

    pub fn empty() -> Self {
        UserSet(0)
    }

    /// The full set `{1, ..., k}`.
    pub fn full(k: usize) -> Self {
        assert!(k <= Self::MAX_USERS);
        if k == 0 {
            UserSet(0)
        } else {
            UserSet(u32::MAX >> (32 - k))
        }
    }

    pub fn singleton(user: usize) -> Self {
        UserSet::empty().with(user)
    }

    pub fn from_users(users: &[usize]) -> Self {
        users.iter().fold(UserSet::empty(), |s, &u| s.with(u))
    }

    pub fn from_mask(mask: u32) -> Self {
        UserSet(mask)
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn contains(self, user: usize) -> bool {
        debug_assert!(user >= 1);
        user <= Self::MAX_USERS && self.0 & (1 << (user - 1)) != 0
    }

    pub fn with(self, user: usize) -> Self {
        assert!((1..=Self::MAX_USERS).contains(&user), "user out of range");
        UserSet(self.0 | 1 << (user - 1))
    }

    pub fn without(self, user: usize) -> Self {
        assert!((1..=Self::MAX_USERS).contains(&user), "user out of range");
        UserSet(self.0 & !(1 << (user - 1)))
    }

    pub fn card(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(self, other: UserSet) -> bool {
        self.0 & other.0 == self.0
    }

    /// Users in ascending order.
    pub fn users(self) -> impl Iterator<Item = usize> {
        (1..=Self::MAX_USERS).filter(move |&u| self.contains(u))
    }

    /// `{1, ..., k} \ self`.
    pub fn complement_in(self, k: usize) -> Self {
        UserSet(Self::full(k).0 & !self.0)
    }

    /// All subsets of `self` in ascending bitmask order (starts at the empty
    /// set, ends at `self`).
    pub fn subsets(self) -> Subsets {
        Subsets {
            ground: self.0,
            next: Some(0),
        }
    }

    /// Subsets of `self` of a fixed cardinality, ascending bitmask order.
    pub fn subsets_of_size(self, size: usize) -> impl Iterator<Item = UserSet> {
        self.subsets().filter(move |s| s.card() == size)
    }
}

impl fmt::Display for UserSet {
    // `{1,3}` notation.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, u) in self.users().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{u}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for UserSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Iterator over the subsets of a ground mask in ascending numeric order.
pub struct Subsets {
    ground: u32,
    next: Option<u32>,
}

impl Iterator for Subsets {
    type Item = UserSet;

    fn next(&mut self) -> Option<UserSet> {
        let cur = self.next?;
        self.next = if cur == self.ground {
            None
        } else {
            // Standard submask step: the next submask of `ground` above `cur`.
            Some((cur | !self.ground).wrapping_add(1) & self.ground)
        };
        Some(UserSet(cur))
    }
}

/// All subsets of `ground`, optionally filtered by cardinality.
pub fn subsets_of(ground: UserSet, size: Option<usize>) -> Vec<UserSet> {
    match size {
        None => ground.subsets().collect(),
        Some(t) => ground.subsets_of_size(t).collect(),
    }
}

/// An ordering `(u_1, ..., u_K)` of the users `1..=K`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        let k = entries.len();
        let mut seen = vec![false; k + 1];
        for &u in &entries {
            if u == 0 || u > k || seen[u] {
                return Err(Error::InvalidDemand(format!(
                    "{entries:?} is not a permutation of 1..={k}"
                )));
            }
            seen[u] = true;
        }
        Ok(Permutation(entries))
    }

    pub fn identity(k: usize) -> Self {
        Permutation((1..=k).collect())
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    /// `u_i` with `i` in `1..=k`.
    pub fn at(&self, i: usize) -> usize {
        self.0[i - 1]
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.iter().join(","))
    }
}

/// All `k!` permutations of `1..=k` in lexicographic order.
pub fn permutations_of(k: usize) -> Result<Vec<Permutation>> {
    if k > MAX_PERMUTATION_K {
        return Err(Error::PermutationGuard {
            k,
            max: MAX_PERMUTATION_K,
        });
    }
    Ok((1..=k).permutations(k).map(Permutation).collect())
}
