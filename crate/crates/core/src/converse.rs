//! Lower bounds on the delivery load of uncoded placement, N >= K.
//!
//! Every (demand, permutation) pair yields one acyclic-set inequality on
//! the broadcast length. Averaging all of them collapses, by symmetry, to
//! a single inequality on the subfile-size profile x:
//!
//! ```text
//!     load >= sum_i c_i x_i,   c_i = (K-i)/((i+1)N),
//! ```
//!
//! subject to sum_i x_i >= N (total file mass) and sum_i i*x_i <= K*M
//! (total cache mass). Substituting the two constraints to eliminate the
//! pair x_{q-1}, x_q leaves an affine function of M plus provably
//! nonnegative residual terms, so each q gives a valid straight-line
//! bound; the maximum over q is piecewise linear and touches the
//! achievable curve at every corner. An exact LP oracle over the same
//! constraints certifies that dropping the residuals loses nothing.
//! `verify_uncoded_optimality` packages the whole argument as one report.

use crate::combinatorics::{binom, factorial, falling_factorial, hockey_stick, permutations_of};
use crate::index_coding::{build_graph, permutation_acyclic_set, UncodedSplit};
use crate::scalar::max_of;
use crate::schemes::{man_load, DemandVector};
use crate::{Error, Exact, Result, Scalar};

/// Cap on P(N,K) * K!, the number of (demand, permutation) pairs any
/// exhaustive enumeration is allowed to walk.
pub const MAX_AGGREGATE_PAIRS: u128 = 1_000_000;

fn require_converse_regime(n_files: usize, k_users: usize) -> Result<()> {
    assert!(n_files >= 1 && k_users >= 1);
    if n_files < k_users {
        return Err(Error::UnsupportedRegime {
            n: n_files,
            k: k_users,
        });
    }
    Ok(())
}

fn pair_count(n_files: usize, k_users: usize) -> u128 {
    falling_factorial(n_files, k_users) as u128 * factorial(k_users) as u128
}

/// Profile coefficients of the averaged inequality: c_i multiplies x_i,
/// the total length of subfiles cached by exactly-i-sized subsets.
///
/// Counting how often each subfile class appears across all permutation
/// sets gives c_i = hockey_stick(K,i) / (binom(K,i) * N), which simplifies
/// to (K-i)/((i+1)N).
pub fn aggregate_coefficients<S: Scalar>(n_files: usize, k_users: usize) -> Result<Vec<S>> {
    require_converse_regime(n_files, k_users)?;
    Ok((0..=k_users)
        .map(|i| {
            S::from_ratio(
                hockey_stick(k_users, i) as i64,
                (binom(k_users, i) * n_files as u64) as i64,
            )
        })
        .collect())
}

/// The same coefficients by brute force: enumerate every (d, u) pair,
/// count how often each (file, subset) appears across the permutation
/// sets, check the counts are symmetric within each subset-size class,
/// and divide by the number of pairs.
pub fn brute_force_aggregate<S: Scalar>(n_files: usize, k_users: usize) -> Result<Vec<S>> {
    require_converse_regime(n_files, k_users)?;
    let pairs = pair_count(n_files, k_users);
    if pairs > MAX_AGGREGATE_PAIRS {
        return Err(Error::EnumerationGuard {
            count: pairs,
            max: MAX_AGGREGATE_PAIRS,
        });
    }

    let mut counts: std::collections::BTreeMap<(usize, u32), u64> = std::collections::BTreeMap::new();
    let us = permutations_of(k_users)?;
    for d in DemandVector::all_distinct(n_files, k_users) {
        for u in &us {
            for (file, w) in permutation_acyclic_set(u).subfiles(&d) {
                *counts.entry((file, w.mask())).or_insert(0) += 1;
            }
        }
    }

    let full = crate::combinatorics::UserSet::full(k_users);
    let mut coefficients = Vec::with_capacity(k_users + 1);
    for w_size in 0..=k_users {
        let mut class_count: Option<u64> = None;
        for j in 1..=n_files {
            for w in full.subsets_of_size(w_size) {
                let c = counts.get(&(j, w.mask())).copied().unwrap_or(0);
                match class_count {
                    None => class_count = Some(c),
                    Some(prev) => assert_eq!(
                        prev, c,
                        "asymmetric count for F({j},{w}); aggregation symmetry broken"
                    ),
                }
            }
        }
        coefficients.push(S::from_ratio(
            class_count.unwrap_or(0) as i64,
            pairs as i64,
        ));
    }
    Ok(coefficients)
}

/// One straight-line bound `load >= intercept + slope * M`, obtained by
/// eliminating x_{q-1} and x_q from the averaged inequality. The dropped
/// residual terms `residuals[i] * x_i` are all nonnegative, which is what
/// makes the affine part valid on its own.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineBound<S> {
    pub q: usize,
    pub intercept: S,
    pub slope: S,
    pub residuals: Vec<S>,
}

impl<S: Scalar> AffineBound<S> {
    pub fn affine_value(&self, m: &S) -> S {
        self.intercept.clone() + self.slope.clone() * m.clone()
    }

    /// The dropped part, for a concrete profile.
    pub fn residual_term(&self, profile: &SubfileProfile<S>) -> S {
        self.residuals
            .iter()
            .zip(profile.x())
            .fold(S::zero(), |acc, (z, x)| acc + z.clone() * x.clone())
    }
}

/// Eliminates x_{q-1} and x_q from the averaged inequality using the file
/// and cache mass constraints, 1 <= q <= K. Works from the aggregate
/// coefficients; the closed form [`residual_coefficient`] is the
/// independent cross-check, not an input.
pub fn eliminate<S: Scalar>(n_files: usize, k_users: usize, q: usize) -> Result<AffineBound<S>> {
    assert!(q >= 1 && q <= k_users, "q outside [1:K]");
    let c = aggregate_coefficients::<S>(n_files, k_users)?;
    let cq1 = c[q - 1].clone();
    let cq = c[q].clone();
    let qi = q as i64;

    // sum_i c_i x_i  =  (q c_{q-1} - (q-1) c_q) sum_i x_i
    //                 + (c_q - c_{q-1}) sum_i i x_i
    //                 + sum_i z_i x_i
    // and the two mass constraints turn the first two terms into the
    // affine part below.
    let intercept =
        S::from_int(n_files as i64) * (S::from_int(qi) * cq1.clone() - S::from_int(qi - 1) * cq.clone());
    let slope = S::from_int(k_users as i64) * (cq.clone() - cq1.clone());
    let residuals: Vec<S> = c
        .iter()
        .enumerate()
        .map(|(i, ci)| {
            ci.clone() - S::from_int(qi - i as i64) * cq1.clone()
                - S::from_int(i as i64 - qi + 1) * cq.clone()
        })
        .collect();

    for (i, z) in residuals.iter().enumerate() {
        assert!(*z >= S::zero(), "negative residual z_{i} = {z} at q = {q}");
    }
    assert!(residuals[q - 1].is_zero() && residuals[q].is_zero());

    Ok(AffineBound {
        q,
        intercept,
        slope,
        residuals,
    })
}

/// Closed form of the residual coefficient on x_i after eliminating
/// x_{q-1} and x_q:
///
/// ```text
///     z(N,K,i,q) = (K+1)(i-q+1)(i-q) / (q N (q+1) (i+1))
/// ```
///
/// Zero at i = q-1 and i = q, nonnegative elsewhere.
pub fn residual_coefficient<S: Scalar>(
    n_files: usize,
    k_users: usize,
    i: usize,
    q: usize,
) -> S {
    assert!(q >= 1 && q <= k_users && i <= k_users);
    let (nn, kk, ii, qq) = (n_files as i64, k_users as i64, i as i64, q as i64);
    S::from_ratio(
        (kk + 1) * (ii - qq + 1) * (ii - qq),
        qq * nn * (qq + 1) * (ii + 1),
    )
}

/// The straight-line bound maximizing the value at `m`; smallest q wins
/// ties, for determinism.
pub fn best_affine_bound<S: Scalar>(n_files: usize, k_users: usize, m: &S) -> Result<AffineBound<S>> {
    require_converse_regime(n_files, k_users)?;
    let mut best: Option<AffineBound<S>> = None;
    for q in 1..=k_users {
        let bound = eliminate(n_files, k_users, q)?;
        let better = match &best {
            None => true,
            Some(b) => bound.affine_value(m) > b.affine_value(m),
        };
        if better {
            best = Some(bound);
        }
    }
    Ok(best.expect("K >= 1 gives at least one bound"))
}

/// Piecewise-linear lower bound on the load at memory `m`: the best affine
/// bound, floored at zero. Requires N >= K and 0 <= m <= N.
pub fn lower_bound<S: Scalar>(n_files: usize, k_users: usize, m: &S) -> Result<S> {
    assert!(
        *m >= S::zero() && *m <= S::from_int(n_files as i64),
        "memory {m} outside [0, N]"
    );
    let value = best_affine_bound(n_files, k_users, m)?.affine_value(m);
    Ok(max_of(value, S::zero()))
}

/// Subfile-size profile: `x[i]` is the total length (file units, summed over
/// files) of parts cached by exactly i users.
#[derive(Clone, Debug, PartialEq)]
pub struct SubfileProfile<S> {
    x: Vec<S>,
}

impl<S: Scalar> SubfileProfile<S> {
    pub fn new(x: Vec<S>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::InvalidInstance("profile needs K+1 entries".into()));
        }
        if let Some(bad) = x.iter().find(|v| **v < S::zero()) {
            return Err(Error::InvalidInstance(format!(
                "negative profile entry {bad}"
            )));
        }
        Ok(SubfileProfile { x })
    }

    /// The uncoded t-split profile: all N file units at level t.
    pub fn man(n_files: usize, k_users: usize, t: usize) -> Self {
        assert!(t <= k_users);
        let mut x = vec![S::zero(); k_users + 1];
        x[t] = S::from_int(n_files as i64);
        SubfileProfile { x }
    }

    pub fn x(&self) -> &[S] {
        &self.x
    }

    pub fn k_users(&self) -> usize {
        self.x.len() - 1
    }

    /// Total subfile mass, in file units.
    pub fn total(&self) -> S {
        self.x.iter().fold(S::zero(), |acc, v| acc + v.clone())
    }

    /// Total cache mass sum_i i*x_i, in file units (K users together).
    pub fn cache_mass(&self) -> S {
        self.x
            .iter()
            .enumerate()
            .fold(S::zero(), |acc, (i, v)| acc + S::from_int(i as i64) * v.clone())
    }

    pub fn is_feasible(&self, n_files: usize, m: &S) -> bool {
        self.total() >= S::from_int(n_files as i64)
            && self.cache_mass() <= S::from_int(self.k_users() as i64) * m.clone()
    }

    /// The averaged-inequality objective sum_i c_i x_i.
    pub fn objective(&self, coefficients: &[S]) -> S {
        assert_eq!(coefficients.len(), self.x.len());
        coefficients
            .iter()
            .zip(&self.x)
            .fold(S::zero(), |acc, (c, x)| acc + c.clone() * x.clone())
    }
}

#[derive(Clone, Debug)]
pub struct LpSolution<S> {
    pub value: S,
    pub profile: SubfileProfile<S>,
}

/// Exact minimum of sum_i c_i x_i over the profile polytope
/// { sum x_i >= N, sum i*x_i <= KM, x >= 0 }.
///
/// With two nontrivial constraints every vertex has at most two nonzero
/// coordinates, so enumerate: sum-tight singletons x_t = N, cache-tight
/// singletons x_t = KM/t, and tight pairs. x_0 = N is always feasible, so
/// the program is never infeasible.
pub fn lp_solve<S: Scalar>(n_files: usize, k_users: usize, m: &S) -> Result<LpSolution<S>> {
    let c = aggregate_coefficients::<S>(n_files, k_users)?;
    assert!(
        *m >= S::zero() && *m <= S::from_int(n_files as i64),
        "memory {m} outside [0, N]"
    );
    let n_s = S::from_int(n_files as i64);
    let km = S::from_int(k_users as i64) * m.clone();
    let k = k_users;

    let mut best: Option<(S, Vec<S>)> = None;
    let mut consider = |value: S, x: Vec<S>| {
        let better = match &best {
            None => true,
            Some((v, _)) => value < *v,
        };
        if better {
            best = Some((value, x));
        }
    };

    for t in 0..=k {
        if S::from_int(t as i64) * n_s.clone() <= km {
            let mut x = vec![S::zero(); k + 1];
            x[t] = n_s.clone();
            consider(c[t].clone() * n_s.clone(), x);
        }
    }
    for t in 1..=k {
        let xt = km.clone() / S::from_int(t as i64);
        if xt >= n_s {
            let mut x = vec![S::zero(); k + 1];
            x[t] = xt.clone();
            consider(c[t].clone() * xt, x);
        }
    }
    for i in 0..k {
        for j in (i + 1)..=k {
            let lo = S::from_int(i as i64) * n_s.clone();
            let hi = S::from_int(j as i64) * n_s.clone();
            if lo <= km && km <= hi {
                let denom = S::from_int((j - i) as i64);
                let xi = (hi.clone() - km.clone()) / denom.clone();
                let xj = (km.clone() - lo.clone()) / denom;
                let value = c[i].clone() * xi.clone() + c[j].clone() * xj.clone();
                let mut x = vec![S::zero(); k + 1];
                x[i] = xi;
                x[j] = xj;
                consider(value, x);
            }
        }
    }

    let (value, x) = best.expect("x_0 = N is always feasible");
    Ok(LpSolution {
        value,
        profile: SubfileProfile::new(x).expect("vertex coordinates are nonnegative"),
    })
}

pub fn lp_oracle<S: Scalar>(n_files: usize, k_users: usize, m: &S) -> Result<S> {
    Ok(lp_solve(n_files, k_users, m)?.value)
}

/// All corner memories tN/K plus the midpoints between them: two piecewise
/// linear curves agreeing here agree everywhere.
pub fn verification_grid<S: Scalar>(n_files: usize, k_users: usize) -> Vec<S> {
    (0..=2 * k_users)
        .map(|j| S::from_ratio((j * n_files) as i64, (2 * k_users) as i64))
        .collect()
}

/// The three curve values at one memory point.
#[derive(Clone, Debug)]
pub struct GridCheck<S> {
    pub memory: S,
    pub achievable: S,
    pub lower: S,
    pub lp: S,
}

impl<S: Scalar> GridCheck<S> {
    pub fn pass(&self) -> bool {
        self.achievable == self.lower && self.lower == self.lp
    }
}

/// Evaluates achievable load, affine lower bound, and LP oracle at every
/// grid point.
pub fn grid_checks<S: Scalar>(
    n_files: usize,
    k_users: usize,
    grid: &[S],
) -> Result<Vec<GridCheck<S>>> {
    require_converse_regime(n_files, k_users)?;
    grid.iter()
        .map(|m| {
            Ok(GridCheck {
                memory: m.clone(),
                achievable: man_load(n_files, k_users, m),
                lower: lower_bound(n_files, k_users, m)?,
                lp: lp_oracle(n_files, k_users, m)?,
            })
        })
        .collect()
}

/// Result of sweeping every (d, u) pair: are all permutation sets acyclic
/// in the built graph, and do their edges respect the level order?
#[derive(Clone, Debug)]
pub enum StructureCheck {
    Checked {
        pairs: u64,
        acyclic_ok: bool,
        levels_ok: bool,
    },
    /// Too many pairs to sweep; nothing was claimed.
    SkippedGuard { pairs: u128 },
}

impl StructureCheck {
    pub fn ok(&self) -> bool {
        match self {
            StructureCheck::Checked {
                acyclic_ok,
                levels_ok,
                ..
            } => *acyclic_ok && *levels_ok,
            StructureCheck::SkippedGuard { .. } => true,
        }
    }
}

/// Sweeps all P(N,K)*K! (demand, permutation) pairs on the uniform split.
pub fn check_permutation_sets(n_files: usize, k_users: usize) -> Result<StructureCheck> {
    require_converse_regime(n_files, k_users)?;
    let pairs = pair_count(n_files, k_users);
    if pairs > MAX_AGGREGATE_PAIRS {
        return Ok(StructureCheck::SkippedGuard { pairs });
    }
    let us = permutations_of(k_users)?;
    let split = UncodedSplit::<Exact>::uniform(n_files, k_users);
    let mut checked = 0u64;
    let mut acyclic_ok = true;
    let mut levels_ok = true;
    for d in DemandVector::all_distinct(n_files, k_users) {
        let g = build_graph(&split, &d)?;
        for u in &us {
            let set = permutation_acyclic_set(u);
            let idxs = set.node_indices(&g)?;
            acyclic_ok &= g.is_acyclic(&idxs);
            levels_ok &= set.respects_levels(&g)?;
            checked += 1;
        }
    }
    Ok(StructureCheck::Checked {
        pairs: checked,
        acyclic_ok,
        levels_ok,
    })
}

/// Closed-form aggregate coefficients next to the brute-force count
/// (absent when the enumeration guard trips).
#[derive(Clone, Debug)]
pub struct AggregateCheck<S> {
    pub closed_form: Vec<S>,
    pub brute_force: Option<Vec<S>>,
}

impl<S: Scalar> AggregateCheck<S> {
    pub fn matches(&self) -> Option<bool> {
        self.brute_force.as_ref().map(|b| *b == self.closed_form)
    }

    pub fn ok(&self) -> bool {
        self.matches() != Some(false)
    }
}

pub fn check_aggregate<S: Scalar>(n_files: usize, k_users: usize) -> Result<AggregateCheck<S>> {
    let closed_form = aggregate_coefficients::<S>(n_files, k_users)?;
    let brute_force = match brute_force_aggregate::<S>(n_files, k_users) {
        Ok(v) => Some(v),
        Err(Error::EnumerationGuard { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(AggregateCheck {
        closed_form,
        brute_force,
    })
}

/// Per-q comparison of the elimination chain against the closed-form
/// residuals. `eliminate` itself asserts nonnegativity and the two zeros.
#[derive(Clone, Debug)]
pub struct ResidualCheck {
    pub q: usize,
    pub matches_closed_form: bool,
}

pub fn check_residuals(n_files: usize, k_users: usize) -> Result<Vec<ResidualCheck>> {
    require_converse_regime(n_files, k_users)?;
    (1..=k_users)
        .map(|q| {
            let bound = eliminate::<Exact>(n_files, k_users, q)?;
            let matches_closed_form = (0..=k_users).all(|i| {
                bound.residuals[i] == residual_coefficient::<Exact>(n_files, k_users, i, q)
            });
            Ok(ResidualCheck {
                q,
                matches_closed_form,
            })
        })
        .collect()
}

/// Everything the optimality argument rests on, evaluated for one (N, K).
#[derive(Debug)]
pub struct OptimalityReport<S> {
    pub n_files: usize,
    pub k_users: usize,
    pub grid: Vec<GridCheck<S>>,
    pub structure: StructureCheck,
    pub aggregate: AggregateCheck<S>,
    pub residuals: Vec<ResidualCheck>,
}

impl<S: Scalar> OptimalityReport<S> {
    pub fn passed(&self) -> bool {
        self.grid.iter().all(GridCheck::pass)
            && self.structure.ok()
            && self.aggregate.ok()
            && self.residuals.iter().all(|r| r.matches_closed_form)
    }
}

/// Runs the full verification for one (N, K) with N >= K: the triple curve
/// equality on the midpoint grid, the acyclicity sweep, the aggregate
/// identity, and the residual cross-check.
pub fn verify_uncoded_optimality<S: Scalar>(
    n_files: usize,
    k_users: usize,
) -> Result<OptimalityReport<S>> {
    require_converse_regime(n_files, k_users)?;
    let grid = verification_grid::<S>(n_files, k_users);
    Ok(OptimalityReport {
        n_files,
        k_users,
        grid: grid_checks(n_files, k_users, &grid)?,
        structure: check_permutation_sets(n_files, k_users)?,
        aggregate: check_aggregate(n_files, k_users)?,
        residuals: check_residuals(n_files, k_users)?,
    })
}
