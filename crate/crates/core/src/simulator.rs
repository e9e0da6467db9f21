//! Bit-exact placement, delivery, and decoding.
//!
//! Files are deterministic pseudorandom bit strings, padded so every split
//! is integral. Caches hold `CachedString`s: XOR combinations of subfiles
//! with their term lists, so uncoded placement is the one-term special case.
//! Decoding runs a peeling solver over the user's cache strings plus every
//! broadcast message; the schemes here always resolve without guessing.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;

use crate::bits::BitString;
use crate::combinatorics::{binom, UserSet};
use crate::converse::SubfileProfile;
use crate::index_coding::UncodedSplit;
use crate::schemes::{DemandVector, ProblemInstance};
use crate::{Error, Exact, Result, Scalar};

/// A subfile `F_{j,W}`: the part of file `j` cached by exactly the users
/// in `W`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubfileId {
    pub file: usize,
    pub subset: UserSet,
}

impl SubfileId {
    pub fn new(file: usize, subset: UserSet) -> Self {
        SubfileId { file, subset }
    }
}

impl fmt::Display for SubfileId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F({},{})", self.file, self.subset)
    }
}

impl fmt::Debug for SubfileId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlacementKind {
    /// B(K,t)-way split; caches store verbatim subfiles.
    Uncoded { t: usize },
    /// K-way split; each user caches one XOR across files.
    CodedSmallCache,
}

/// One stored cache entry: the XOR of `terms`, with its bits.
#[derive(Clone, Debug)]
pub struct CachedString {
    pub terms: Vec<SubfileId>,
    pub bits: BitString,
}

/// Outcome of the placement phase: file contents, the subfile split, and
/// per-user cache contents.
pub struct Placement {
    inst: ProblemInstance,
    kind: PlacementKind,
    file_bits: usize,
    files: Vec<BitString>,
    lengths: BTreeMap<SubfileId, Exact>,
    contents: BTreeMap<SubfileId, BitString>,
    caches: Vec<Vec<CachedString>>,
}

impl Placement {
    pub fn instance(&self) -> &ProblemInstance {
        &self.inst
    }

    pub fn kind(&self) -> PlacementKind {
        self.kind
    }

    pub fn file_bits(&self) -> usize {
        self.file_bits
    }

    pub fn file(&self, j: usize) -> &BitString {
        &self.files[j - 1]
    }

    /// Length of `F_{j,W}` in file units; 0 for parts outside the split.
    pub fn subfile_length(&self, id: SubfileId) -> Exact {
        self.lengths.get(&id).cloned().unwrap_or_else(Exact::zero)
    }

    pub fn subfile_content(&self, id: SubfileId) -> Option<&BitString> {
        self.contents.get(&id)
    }

    pub fn cache_of(&self, user: usize) -> &[CachedString] {
        &self.caches[user - 1]
    }

    /// Cache occupancy of `user` in file units.
    pub fn memory_used(&self, user: usize) -> Exact {
        let bits: usize = self.cache_of(user).iter().map(|s| s.bits.len()).sum();
        Exact::from_ratio(bits as i64, self.file_bits as i64)
    }

    pub fn is_uncoded(&self) -> bool {
        self.caches
            .iter()
            .all(|c| c.iter().all(|s| s.terms.len() == 1))
    }

    /// Subfile-size profile: entry `w` sums the lengths of all parts cached
    /// by `w`-sized subsets. Only meaningful for uncoded splits.
    pub fn profile(&self) -> SubfileProfile<Exact> {
        let k = self.inst.k_users;
        let mut x = vec![Exact::zero(); k + 1];
        for (id, len) in &self.lengths {
            x[id.subset.card()] += len.clone();
        }
        SubfileProfile::new(x).expect("placement lengths are nonnegative")
    }

    /// The split's length table, for building index-coding graphs.
    pub fn split(&self) -> Result<UncodedSplit<Exact>> {
        UncodedSplit::from_lengths(
            self.inst.n_files,
            self.inst.k_users,
            self.lengths
                .iter()
                .map(|(id, len)| ((id.file, id.subset), len.clone())),
        )
    }
}

/// What a broadcast message is, independent of its bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MessageLabel {
    /// XOR of `F_{d_s, S\{s}}` over `s` in the subset; the uncoded scheme's
    /// multicast for the `(t+1)`-subset `S`.
    Subset(UserSet),
    /// A single subfile in the clear.
    Subfile(SubfileId),
}

impl MessageLabel {
    /// Subfiles XORed into the message, given the demands.
    pub fn terms(&self, d: &DemandVector) -> Vec<SubfileId> {
        match self {
            MessageLabel::Subset(s) => s
                .users()
                .map(|u| SubfileId::new(d.demand_of(u), s.without(u)))
                .collect(),
            MessageLabel::Subfile(id) => vec![*id],
        }
    }
}

impl fmt::Display for MessageLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MessageLabel::Subset(s) => write!(f, "xor{s}"),
            MessageLabel::Subfile(id) => write!(f, "{id}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Message {
    pub label: MessageLabel,
    pub payload: BitString,
    /// In file units.
    pub length: Exact,
}

#[derive(Clone, Debug, Default)]
pub struct DeliverySchedule {
    messages: Vec<Message>,
}

impl DeliverySchedule {
    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    pub fn transmissions(&self) -> usize {
        self.messages.len()
    }

    /// Total broadcast length in file units.
    pub fn load(&self) -> Exact {
        self.messages
            .iter()
            .fold(Exact::zero(), |acc, m| acc + m.length.clone())
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    num_integer::lcm(a, b)
}

fn make_files(n_files: usize, file_bits: usize) -> Vec<BitString> {
    (1..=n_files)
        .map(|j| BitString::pseudorandom(j as u64, file_bits))
        .collect()
}

/// Uncoded placement with split parameter `t`: every file is cut into
/// B(K,t) equal subfiles indexed by the t-subsets, and user k stores every
/// `F_{j,W}` with `k` in `W`. Requires `M = tN/K`.
///
/// Files are padded to `lcm(B(K,t), K) * subfile_bits` bits so both this
/// split and the K-way coded split stay integral.
pub fn man_placement(inst: &ProblemInstance, t: usize) -> Result<Placement> {
    let k = inst.k_users;
    let n = inst.n_files;
    if t > k {
        return Err(Error::SplitOutOfRange { t, k });
    }
    let expected = Exact::from_ratio((t * n) as i64, k as i64);
    if inst.memory != expected {
        return Err(Error::MemoryMismatch {
            memory: inst.memory.to_string(),
            expected: expected.to_string(),
        });
    }

    let parts = binom(k, t);
    let file_bits = (lcm(parts, k as u64) * inst.subfile_bits as u64) as usize;
    let files = make_files(n, file_bits);

    let full = UserSet::full(k);
    let part_len = Exact::from_ratio(1, parts as i64);
    let mut lengths = BTreeMap::new();
    let mut contents = BTreeMap::new();
    for (j, file) in files.iter().enumerate() {
        let pieces = file.split_equal(parts as usize);
        for (w, bits) in full.subsets_of_size(t).zip(pieces) {
            let id = SubfileId::new(j + 1, w);
            lengths.insert(id, part_len.clone());
            contents.insert(id, bits);
        }
    }

    let caches = (1..=k)
        .map(|user| {
            let mut stored = Vec::new();
            for j in 1..=n {
                for w in full.subsets_of_size(t).filter(|w| w.contains(user)) {
                    let id = SubfileId::new(j, w);
                    stored.push(CachedString {
                        terms: vec![id],
                        bits: contents[&id].clone(),
                    });
                }
            }
            stored
        })
        .collect();

    Ok(Placement {
        inst: inst.clone(),
        kind: PlacementKind::Uncoded { t },
        file_bits,
        files,
        lengths,
        contents,
        caches,
    })
}

/// The uncoded scheme's delivery: one XOR message per `(t+1)`-subset `S`,
/// combining `F_{d_s, S\{s}}` over `s` in `S`. Load is `(K-t)/(t+1)`.
pub fn man_delivery(p: &Placement, d: &DemandVector) -> Result<DeliverySchedule> {
    let t = match p.kind {
        PlacementKind::Uncoded { t } => t,
        PlacementKind::CodedSmallCache => {
            return Err(Error::InvalidInstance(
                "delivery expects an uncoded placement".into(),
            ))
        }
    };
    let k = p.inst.k_users;
    if d.k() != k {
        return Err(Error::InvalidDemand(format!(
            "demand vector has {} entries, expected {k}",
            d.k()
        )));
    }
    check_demand_range(d, p.inst.n_files)?;

    let part_len = Exact::from_ratio(1, binom(k, t) as i64);
    let mut messages = Vec::new();
    for s in UserSet::full(k).subsets_of_size(t + 1) {
        let label = MessageLabel::Subset(s);
        let mut payload = BitString::zeros(0);
        for id in label.terms(d) {
            payload.xor_in_place(p.subfile_content(id).expect("split part exists"));
        }
        messages.push(Message {
            label,
            payload,
            length: part_len.clone(),
        });
    }
    Ok(DeliverySchedule { messages })
}

fn check_demand_range(d: &DemandVector, n_files: usize) -> Result<()> {
    match d.entries().iter().find(|&&j| j == 0 || j > n_files) {
        Some(j) => Err(Error::InvalidDemand(format!(
            "demand {j} outside [1:{n_files}]"
        ))),
        None => Ok(()),
    }
}

/// Coded placement for the small-cache point `M = 1/K` with `K >= N`.
///
/// Files split into K parts `F_{j,{s}}`; user i caches the single XOR
/// `F_{1,{i}} ^ ... ^ F_{N,{i}}`. Delivery sends the plain parts every
/// user still needs, deduplicated: `F_{d_i,{s}}` for `s != i` plus the
/// `F_{j,{i}}`, `j != d_i`, that let user i strip its cache XOR. When each
/// demanded file has a unique demander this costs exactly `N(1-M)`.
///
/// For `N = 1` the cache XOR degenerates to the verbatim part `F_{1,{i}}`,
/// so plain transmission would waste bits; the schedule instead XORs
/// consecutive parts (`F_{1,{a}} ^ F_{1,{a+1}}`), which still costs
/// `N(1-M) = (K-1)/K`.
pub fn coded_small_cache_scheme(
    inst: &ProblemInstance,
    d: &DemandVector,
) -> Result<(Placement, DeliverySchedule)> {
    let k = inst.k_users;
    let n = inst.n_files;
    let target = Exact::from_ratio(1, k as i64);
    if k < n || inst.memory != target {
        return Err(Error::CodedSchemePrecondition {
            n,
            k,
            m: inst.memory.to_string(),
        });
    }
    if d.k() != k {
        return Err(Error::InvalidDemand(format!(
            "demand vector has {} entries, expected {k}",
            d.k()
        )));
    }
    check_demand_range(d, n)?;

    let file_bits = k * inst.subfile_bits;
    let files = make_files(n, file_bits);
    let part_len = Exact::from_ratio(1, k as i64);
    let mut lengths = BTreeMap::new();
    let mut contents = BTreeMap::new();
    for (j, file) in files.iter().enumerate() {
        for (s, bits) in file.split_equal(k).into_iter().enumerate() {
            let id = SubfileId::new(j + 1, UserSet::singleton(s + 1));
            lengths.insert(id, part_len.clone());
            contents.insert(id, bits);
        }
    }

    let caches: Vec<Vec<CachedString>> = (1..=k)
        .map(|user| {
            let terms: Vec<SubfileId> = (1..=n)
                .map(|j| SubfileId::new(j, UserSet::singleton(user)))
                .collect();
            let mut bits = BitString::zeros(0);
            for id in &terms {
                bits.xor_in_place(&contents[id]);
            }
            vec![CachedString { terms, bits }]
        })
        .collect();

    let messages = if n == 1 {
        (1..k)
            .map(|a| {
                let label = MessageLabel::Subset(UserSet::from_users(&[a, a + 1]));
                let mut payload = BitString::zeros(0);
                for id in label.terms(d) {
                    payload.xor_in_place(&contents[&id]);
                }
                Message {
                    label,
                    payload,
                    length: part_len.clone(),
                }
            })
            .collect()
    } else {
        let mut needed = BTreeSet::new();
        for i in 1..=k {
            for s in 1..=k {
                if s != i {
                    needed.insert(SubfileId::new(d.demand_of(i), UserSet::singleton(s)));
                }
            }
            for j in 1..=n {
                if j != d.demand_of(i) {
                    needed.insert(SubfileId::new(j, UserSet::singleton(i)));
                }
            }
        }
        needed
            .into_iter()
            .map(|id| Message {
                label: MessageLabel::Subfile(id),
                payload: contents[&id].clone(),
                length: part_len.clone(),
            })
            .collect()
    };

    let placement = Placement {
        inst: inst.clone(),
        kind: PlacementKind::CodedSmallCache,
        file_bits,
        files,
        lengths,
        contents,
        caches,
    };
    Ok((placement, DeliverySchedule { messages }))
}

/// One user's decoding verdict.
#[derive(Clone, Debug)]
pub struct UserDecode {
    pub user: usize,
    pub ok: bool,
    /// Parts of the demanded file the peeling solver never recovered.
    pub missing: Vec<SubfileId>,
}

#[derive(Clone, Debug)]
pub struct DecodeReport {
    pub users: Vec<UserDecode>,
}

impl DecodeReport {
    pub fn all_ok(&self) -> bool {
        self.users.iter().all(|u| u.ok)
    }

    pub fn failures(&self) -> impl Iterator<Item = &UserDecode> {
        self.users.iter().filter(|u| !u.ok)
    }
}

/// Runs every user's decoder: peel the cache strings and broadcast messages
/// until a fixpoint, then reassemble the demanded file and compare bits.
pub fn decode_all(p: &Placement, d: &DemandVector, schedule: &DeliverySchedule) -> DecodeReport {
    let k = p.inst.k_users;
    assert_eq!(d.k(), k, "demand vector length mismatch");
    let users = (1..=k)
        .map(|user| {
            let known = peel(p, d, schedule, user);
            reassemble(p, d, user, &known)
        })
        .collect();
    DecodeReport { users }
}

fn peel(
    p: &Placement,
    d: &DemandVector,
    schedule: &DeliverySchedule,
    user: usize,
) -> BTreeMap<SubfileId, BitString> {
    let mut known: BTreeMap<SubfileId, BitString> = BTreeMap::new();
    let mut eqs: Vec<(BTreeSet<SubfileId>, BitString)> = Vec::new();
    for s in p.cache_of(user) {
        eqs.push((s.terms.iter().copied().collect(), s.bits.clone()));
    }
    for m in schedule.messages() {
        eqs.push((m.label.terms(d).into_iter().collect(), m.payload.clone()));
    }

    loop {
        let mut progress = false;
        for (terms, payload) in eqs.iter_mut() {
            let resolved: Vec<SubfileId> = terms
                .iter()
                .filter(|id| known.contains_key(id))
                .copied()
                .collect();
            for id in resolved {
                payload.xor_in_place(&known[&id]);
                terms.remove(&id);
            }
            if terms.len() == 1 {
                let id = *terms.iter().next().unwrap();
                known.insert(id, payload.clone());
                terms.clear();
                progress = true;
            }
        }
        eqs.retain(|(terms, _)| !terms.is_empty());
        if !progress {
            return known;
        }
    }
}

fn reassemble(
    p: &Placement,
    d: &DemandVector,
    user: usize,
    known: &BTreeMap<SubfileId, BitString>,
) -> UserDecode {
    let k = p.inst.k_users;
    let want = d.demand_of(user);
    let parts: Vec<UserSet> = match p.kind {
        PlacementKind::Uncoded { t } => UserSet::full(k).subsets_of_size(t).collect(),
        PlacementKind::CodedSmallCache => (1..=k).map(UserSet::singleton).collect(),
    };
    let mut missing = Vec::new();
    let mut recovered = BitString::zeros(0);
    for w in parts {
        let id = SubfileId::new(want, w);
        match known.get(&id) {
            Some(bits) => recovered.push_all(bits),
            None => missing.push(id),
        }
    }
    let ok = missing.is_empty() && &recovered == p.file(want);
    UserDecode { user, ok, missing }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact;

    fn inst(n: usize, k: usize, m: Exact) -> ProblemInstance {
        ProblemInstance::new(n, k, m, 4).unwrap()
    }

    fn demands(v: &[usize], n: usize) -> DemandVector {
        DemandVector::new(v.to_vec(), n).unwrap()
    }

    #[test]
    fn man_three_users_t1_round_trip() {
        let p = man_placement(&inst(3, 3, exact(1, 1)), 1).unwrap();
        let d = demands(&[1, 2, 3], 3);
        let s = man_delivery(&p, &d).unwrap();
        assert_eq!(s.transmissions(), 3);
        assert_eq!(s.load(), exact(1, 1));
        for user in 1..=3 {
            assert_eq!(p.memory_used(user), exact(1, 1));
        }
        assert!(p.is_uncoded());
        assert!(decode_all(&p, &d, &s).all_ok());
    }

    #[test]
    fn man_empty_cache_and_full_cache_extremes() {
        let p0 = man_placement(&inst(3, 3, exact(0, 1)), 0).unwrap();
        let d = demands(&[2, 3, 1], 3);
        assert!(p0.cache_of(1).is_empty());
        let s0 = man_delivery(&p0, &d).unwrap();
        assert_eq!(s0.load(), exact(3, 1));
        assert!(decode_all(&p0, &d, &s0).all_ok());

        let p3 = man_placement(&inst(3, 3, exact(3, 1)), 3).unwrap();
        let s3 = man_delivery(&p3, &d).unwrap();
        assert_eq!(s3.transmissions(), 0);
        assert_eq!(s3.load(), exact(0, 1));
        assert!(decode_all(&p3, &d, &s3).all_ok());
    }

    #[test]
    fn man_four_users_t2_load() {
        let p = man_placement(&inst(4, 4, exact(2, 1)), 2).unwrap();
        let d = demands(&[4, 3, 2, 1], 4);
        let s = man_delivery(&p, &d).unwrap();
        assert_eq!(s.transmissions(), 4);
        assert_eq!(s.load(), exact(2, 3));
        assert!(decode_all(&p, &d, &s).all_ok());
    }

    #[test]
    fn man_rejects_bad_t_or_memory() {
        assert!(matches!(
            man_placement(&inst(3, 3, exact(1, 1)), 4),
            Err(Error::SplitOutOfRange { t: 4, k: 3 })
        ));
        assert!(matches!(
            man_placement(&inst(3, 3, exact(1, 1)), 2),
            Err(Error::MemoryMismatch { .. })
        ));
    }

    #[test]
    fn deleted_message_breaks_decoding() {
        let p = man_placement(&inst(3, 3, exact(1, 1)), 1).unwrap();
        let d = demands(&[1, 2, 3], 3);
        let mut s = man_delivery(&p, &d).unwrap();
        s.messages.remove(0);
        let report = decode_all(&p, &d, &s);
        assert!(!report.all_ok());
        let failed: Vec<_> = report.failures().collect();
        assert!(!failed.is_empty());
        assert!(failed.iter().all(|u| !u.missing.is_empty()));
    }

    #[test]
    fn coded_small_cache_matches_promised_load() {
        for (n, k, d) in [(2usize, 2usize, vec![1, 2]), (3, 3, vec![1, 2, 3])] {
            let (p, s) =
                coded_small_cache_scheme(&inst(n, k, exact(1, k as i64)), &demands(&d, n)).unwrap();
            assert_eq!(s.load(), exact((n * (k - 1)) as i64, k as i64));
            assert!(!p.is_uncoded());
            assert_eq!(p.memory_used(1), exact(1, k as i64));
            assert!(decode_all(&p, &demands(&d, n), &s).all_ok());
        }
    }

    #[test]
    fn coded_single_file_uses_xor_chain() {
        let d = demands(&[1, 1], 1);
        let (p, s) = coded_small_cache_scheme(&inst(1, 2, exact(1, 2)), &d).unwrap();
        assert_eq!(s.transmissions(), 1);
        assert_eq!(s.load(), exact(1, 2));
        assert!(decode_all(&p, &d, &s).all_ok());

        let d = demands(&[1, 1, 1], 1);
        let (p, s) = coded_small_cache_scheme(&inst(1, 3, exact(1, 3)), &d).unwrap();
        assert_eq!(s.load(), exact(2, 3));
        assert!(decode_all(&p, &d, &s).all_ok());
    }

    #[test]
    fn coded_duplicate_demands_still_decode() {
        let d = demands(&[1, 1, 2], 2);
        let (p, s) = coded_small_cache_scheme(&inst(2, 3, exact(1, 3)), &d).unwrap();
        assert!(decode_all(&p, &d, &s).all_ok());
        // the dedup union here costs more than N(1-M); just pin it
        assert_eq!(s.load(), exact(5, 3));
    }

    #[test]
    fn coded_rejects_wrong_regime() {
        assert!(matches!(
            coded_small_cache_scheme(&inst(3, 2, exact(1, 2)), &demands(&[1, 2], 3)),
            Err(Error::CodedSchemePrecondition { .. })
        ));
        assert!(matches!(
            coded_small_cache_scheme(&inst(2, 2, exact(1, 4)), &demands(&[1, 2], 2)),
            Err(Error::CodedSchemePrecondition { .. })
        ));
    }

    #[test]
    fn placement_profile_and_split_expose_lengths() {
        let p = man_placement(&inst(3, 3, exact(1, 1)), 1).unwrap();
        assert_eq!(p.profile(), SubfileProfile::man(3, 3, 1));
        let split = p.split().unwrap();
        assert_eq!(
            split.length(2, UserSet::singleton(3)),
            exact(1, 3)
        );
        assert_eq!(split.length(2, UserSet::empty()), exact(0, 1));
    }

    #[test]
    fn exhaustive_small_round_trips() {
        for k in 2..=3usize {
            let n = k;
            for t in 0..=k {
                let m = exact((t * n) as i64, k as i64);
                let p = man_placement(&inst(n, k, m), t).unwrap();
                for d in DemandVector::all_distinct(n, k) {
                    let s = man_delivery(&p, &d).unwrap();
                    assert_eq!(s.load(), exact((k - t) as i64, (t + 1) as i64));
                    assert!(decode_all(&p, &d, &s).all_ok(), "t={t} {d:?}");
                }
            }
        }
    }
}
