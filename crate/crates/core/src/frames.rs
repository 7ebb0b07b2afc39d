//! Order-dual frames and the lattice of strongly hereditary sets.
//!
//! A frame is a complete SO-commutative monoid: a meet-semilattice whose
//! monoid unit `1` is the bottom element and whose top is `oo`, with a
//! monotone commutative product distributing over meets. Forcing preserves
//! truth upwards, so these are order-duals of quantales.
//!
//! The family `P*` of strongly hereditary subsets (nonempty, upward closed,
//! closed under meets of members) forms a complete residuated lattice under
//! inclusion; it is rebuilt here as a [`Quantale`] so the whole algebra law
//! suite applies to it. A conucleus `d` on the frame induces the quantic
//! nucleus `g_d(A) = {p : exists q in A with d(q) <= p}` on `P*`, which
//! interprets the possibility modality.

use std::collections::HashMap;

use serde::Deserialize;
use thiserror::Error;

use crate::algebra::{AlgebraError, Quantale};
use crate::nuclei::{self, UnaryMap};
use crate::report::{LawCheck, LawReport};

#[derive(Debug, Error)]
pub enum FrameError {
    #[error("carrier must be nonempty")]
    EmptyCarrier,
    #[error("frames larger than 64 worlds are not supported (got {0})")]
    TooManyWorlds(usize),
    #[error("names/leq/prod dimensions disagree with carrier size {n}")]
    BadDimensions { n: usize },
    #[error("order is not a partial order at (`{0}`, `{1}`)")]
    NotAPartialOrder(String, String),
    #[error("worlds `{0}` and `{1}` have no meet")]
    MeetMissing(String, String),
    #[error("frame has no bottom element")]
    NoBottom,
    #[error("frame has no top element")]
    NoTop,
    #[error("product is not commutative at (`{0}`, `{1}`)")]
    NotCommutative(String, String),
    #[error("product is not associative at (`{0}`, `{1}`, `{2}`)")]
    NotAssociative(String, String, String),
    #[error("monoid unit is not the bottom element: 1 * `{0}` = `{1}`")]
    UnitNotBottom(String, String),
    #[error("product is not monotone at (`{0}`, `{1}`, `{2}`)")]
    NotMonotone(String, String, String),
    #[error("product does not distribute over meets at (`{0}`, `{1}`, `{2}`)")]
    MeetDistributivity(String, String, String),
    #[error("top is not absorbing: `{0}` * oo = `{1}`")]
    TopNotAbsorbing(String, String),
    #[error("conucleus table invalid: {0}")]
    BadConucleus(String),
    #[error("subset must be nonempty")]
    EmptySubset,
    #[error("world index {index} out of range (frame size {n})")]
    WorldOutOfRange { index: usize, n: usize },
    #[error("enumeration bound exceeded: frame size {n} > bound {bound}")]
    BoundExceeded { n: usize, bound: usize },
    #[error("set {{{0}}} escaped the strongly hereditary family (internal error)")]
    NotClosedUnderOps(String),
    #[error("malformed frame file: {0}")]
    Format(String),
    #[error("unknown frame name `{0}` (expected 2-chain, dual-godel-N, or dual-lukasiewicz-N)")]
    UnknownFrameName(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Default cap on frame size for `P*` and conucleus enumeration.
pub const DEFAULT_ENUM_BOUND: usize = 6;

/// A subset of frame worlds, stored as a bit mask (frames are capped at 64
/// worlds).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WorldSet {
    bits: u64,
}

impl WorldSet {
    pub const EMPTY: WorldSet = WorldSet { bits: 0 };

    pub fn from_bits(bits: u64) -> WorldSet {
        WorldSet { bits }
    }

    pub fn full(n: usize) -> WorldSet {
        WorldSet { bits: if n == 64 { u64::MAX } else { (1u64 << n) - 1 } }
    }

    pub fn singleton(w: usize) -> WorldSet {
        WorldSet { bits: 1u64 << w }
    }

    pub fn from_indices(ws: &[usize]) -> WorldSet {
        ws.iter().fold(WorldSet::EMPTY, |s, &w| s.with(w))
    }

    #[inline]
    pub fn contains(self, w: usize) -> bool {
        self.bits & (1u64 << w) != 0
    }

    #[inline]
    pub fn with(self, w: usize) -> WorldSet {
        WorldSet { bits: self.bits | (1u64 << w) }
    }

    #[inline]
    pub fn union(self, other: WorldSet) -> WorldSet {
        WorldSet { bits: self.bits | other.bits }
    }

    #[inline]
    pub fn intersect(self, other: WorldSet) -> WorldSet {
        WorldSet { bits: self.bits & other.bits }
    }

    #[inline]
    pub fn is_subset(self, other: WorldSet) -> bool {
        self.bits & !other.bits == 0
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    pub fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.bits;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let w = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w)
            }
        })
    }

    pub fn indices(self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn bits(self) -> u64 {
        self.bits
    }
}

/// A finite complete SO-commutative monoid: the Kripke base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SOMonoid {
    n: usize,
    names: Vec<String>,
    leq: Vec<bool>,
    meet: Vec<usize>,
    prod: Vec<usize>,
    implication: Vec<usize>,
    bottom: usize,
    top: usize,
}

impl SOMonoid {
    pub fn new(
        names: Vec<String>,
        leq_rows: Vec<Vec<bool>>,
        prod_rows: Vec<Vec<usize>>,
    ) -> Result<SOMonoid, FrameError> {
        let n = names.len();
        if n == 0 {
            return Err(FrameError::EmptyCarrier);
        }
        if n > 64 {
            return Err(FrameError::TooManyWorlds(n));
        }
        if leq_rows.len() != n
            || prod_rows.len() != n
            || leq_rows.iter().any(|r| r.len() != n)
            || prod_rows.iter().any(|r| r.len() != n)
        {
            return Err(FrameError::BadDimensions { n });
        }
        let leq: Vec<bool> = leq_rows.into_iter().flatten().collect();
        let mut prod = Vec::with_capacity(n * n);
        for row in &prod_rows {
            for &v in row {
                if v >= n {
                    return Err(FrameError::WorldOutOfRange { index: v, n });
                }
                prod.push(v);
            }
        }
        let le = |x: usize, y: usize| leq[x * n + y];
        let name = |x: usize| names[x].clone();

        for x in 0..n {
            if !le(x, x) {
                return Err(FrameError::NotAPartialOrder(name(x), name(x)));
            }
            for y in 0..n {
                if x != y && le(x, y) && le(y, x) {
                    return Err(FrameError::NotAPartialOrder(name(x), name(y)));
                }
                for z in 0..n {
                    if le(x, y) && le(y, z) && !le(x, z) {
                        return Err(FrameError::NotAPartialOrder(name(x), name(z)));
                    }
                }
            }
        }

        let mut meet = vec![0usize; n * n];
        for x in 0..n {
            for y in 0..n {
                let lower: Vec<usize> = (0..n).filter(|&z| le(z, x) && le(z, y)).collect();
                match lower.iter().copied().find(|&m| lower.iter().all(|&z| le(z, m))) {
                    Some(m) => meet[x * n + y] = m,
                    None => return Err(FrameError::MeetMissing(name(x), name(y))),
                }
            }
        }
        let bottom = (0..n).find(|&b| (0..n).all(|x| le(b, x))).ok_or(FrameError::NoBottom)?;
        let top = (0..n).find(|&t| (0..n).all(|x| le(x, t))).ok_or(FrameError::NoTop)?;

        let p = |x: usize, y: usize| prod[x * n + y];
        for x in 0..n {
            for y in 0..n {
                if p(x, y) != p(y, x) {
                    return Err(FrameError::NotCommutative(name(x), name(y)));
                }
                for z in 0..n {
                    if p(p(x, y), z) != p(x, p(y, z)) {
                        return Err(FrameError::NotAssociative(name(x), name(y), name(z)));
                    }
                }
            }
        }
        for x in 0..n {
            if p(bottom, x) != x {
                return Err(FrameError::UnitNotBottom(name(x), name(p(bottom, x))));
            }
        }
        for x in 0..n {
            for y in 0..n {
                if le(x, y) {
                    for z in 0..n {
                        if !le(p(x, z), p(y, z)) {
                            return Err(FrameError::NotMonotone(name(x), name(y), name(z)));
                        }
                    }
                }
            }
        }
        // Complete distribution over meets: binary case plus the empty
        // family (which forces the top to be absorbing).
        for x in 0..n {
            if p(x, top) != top {
                return Err(FrameError::TopNotAbsorbing(name(x), name(p(x, top))));
            }
            for a in 0..n {
                for b in 0..n {
                    if p(x, meet[a * n + b]) != meet[p(x, a) * n + p(x, b)] {
                        return Err(FrameError::MeetDistributivity(name(x), name(a), name(b)));
                    }
                }
            }
        }

        // implication(a, c) = meet of { b : c <= a*b }; the adjoint of the
        // product under the dual order. The set always contains the top.
        let mut implication = vec![0usize; n * n];
        for a in 0..n {
            for c in 0..n {
                let mut acc = top;
                for b in 0..n {
                    if le(c, p(a, b)) {
                        acc = meet[acc * n + b];
                    }
                }
                implication[a * n + c] = acc;
            }
        }

        Ok(SOMonoid { n, names, leq, meet, prod, implication, bottom, top })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn name(&self, w: usize) -> &str {
        &self.names[w]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// The monoid unit, which is also the minimum of the order.
    pub fn unit(&self) -> usize {
        self.bottom
    }

    /// The maximum element `oo`.
    pub fn infinity(&self) -> usize {
        self.top
    }

    #[inline]
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.leq[x * self.n + y]
    }

    #[inline]
    pub fn meet(&self, x: usize, y: usize) -> usize {
        self.meet[x * self.n + y]
    }

    #[inline]
    pub fn prod(&self, x: usize, y: usize) -> usize {
        self.prod[x * self.n + y]
    }

    /// `a -> c = meet of { b : c <= a*b }`, satisfying
    /// `a -> c <= b  iff  c <= a*b`.
    #[inline]
    pub fn implication(&self, a: usize, c: usize) -> usize {
        self.implication[a * self.n + c]
    }

    /// `~a := a -> oo`.
    pub fn negation(&self, a: usize) -> usize {
        self.implication(a, self.top)
    }

    /// Meet of a nonempty set of worlds.
    pub fn meet_of(&self, set: WorldSet) -> Option<usize> {
        let mut it = set.iter();
        let first = it.next()?;
        Some(it.fold(first, |a, w| self.meet(a, w)))
    }

    /// Upward closure of a set of worlds.
    pub fn up_closure(&self, set: WorldSet) -> WorldSet {
        let mut out = WorldSet::EMPTY;
        for w in 0..self.n {
            if set.iter().any(|a| self.leq(a, w)) {
                out = out.with(w);
            }
        }
        out
    }

    pub fn check_world(&self, w: usize) -> Result<usize, FrameError> {
        if w < self.n {
            Ok(w)
        } else {
            Err(FrameError::WorldOutOfRange { index: w, n: self.n })
        }
    }
}

/// Reverses a quantale's order: its top `1` becomes the frame's bottom unit
/// and its bottom `0` becomes `oo`. Carrier and product are untouched.
pub fn dualize(q: &Quantale) -> SOMonoid {
    let n = q.n();
    let names = q.names().to_vec();
    let leq = (0..n).map(|x| (0..n).map(|y| q.leq(y, x)).collect()).collect();
    let prod = (0..n).map(|x| (0..n).map(|y| q.prod(x, y)).collect()).collect();
    SOMonoid::new(names, leq, prod).expect("dual of a quantale is a complete SO-monoid")
}

/// Chain frame `1 < p1 < ... < oo` with truncated addition on indices
/// (the order-dual of a Łukasiewicz chain). At `n = 2` this coincides with
/// the dual of the Boolean algebra.
pub fn chain_frame_lukasiewicz(n: usize) -> Result<SOMonoid, FrameError> {
    chain_frame(n, |i, j, n| (i + j).min(n - 1))
}

/// Chain frame with product `max` on indices (the order-dual of a Gödel
/// chain).
pub fn chain_frame_godel(n: usize) -> Result<SOMonoid, FrameError> {
    chain_frame(n, |i, j, _| i.max(j))
}

fn chain_frame(
    n: usize,
    prod: impl Fn(usize, usize, usize) -> usize,
) -> Result<SOMonoid, FrameError> {
    if n == 0 {
        return Err(FrameError::EmptyCarrier);
    }
    let names = (0..n)
        .map(|i| {
            if i == 0 {
                "1".to_string()
            } else if i == n - 1 {
                "oo".to_string()
            } else {
                format!("p{i}")
            }
        })
        .collect();
    let leq = (0..n).map(|i| (0..n).map(|j| i <= j).collect()).collect();
    let prods = (0..n).map(|i| (0..n).map(|j| prod(i, j, n)).collect()).collect();
    SOMonoid::new(names, leq, prods)
}

/// Resolves the builtin frame names used in model files: `2-chain`,
/// `dual-godel-N`, `dual-lukasiewicz-N`.
pub fn frame_by_name(name: &str) -> Result<SOMonoid, FrameError> {
    if name == "2-chain" {
        return chain_frame_godel(2);
    }
    if let Some(rest) = name.strip_prefix("dual-godel-") {
        if let Ok(n) = rest.parse::<usize>() {
            if n >= 2 {
                return chain_frame_godel(n);
            }
        }
    }
    if let Some(rest) = name.strip_prefix("dual-lukasiewicz-") {
        if let Ok(n) = rest.parse::<usize>() {
            if n >= 2 {
                return chain_frame_lukasiewicz(n);
            }
        }
    }
    Err(FrameError::UnknownFrameName(name.to_string()))
}

/// The frames every suite runs against: duals of the quantale catalog.
pub fn frame_catalog(max: usize) -> Vec<(String, SOMonoid)> {
    let mut out = vec![("2-chain".to_string(), chain_frame_godel(2).unwrap())];
    for n in 3..=max {
        out.push((format!("dual-godel-{n}"), chain_frame_godel(n).unwrap()));
        out.push((format!("dual-lukasiewicz-{n}"), chain_frame_lukasiewicz(n).unwrap()));
    }
    out
}

// ---------------------------------------------------------------------------
// Strongly hereditary sets
// ---------------------------------------------------------------------------

/// Nonempty, and every world above a meet of members is a member. At finite
/// size this is equivalent to: upward closed and closed under binary meets
/// of members.
pub fn is_strongly_hereditary(frame: &SOMonoid, set: WorldSet) -> bool {
    !set.is_empty() && is_cap_closed(frame, set)
}

/// Hereditary (upward closed) and closed under finite meets; the empty set
/// vacuously qualifies.
pub fn is_cap_closed(frame: &SOMonoid, set: WorldSet) -> bool {
    let up = set
        .iter()
        .all(|a| (0..frame.n()).all(|b| !frame.leq(a, b) || set.contains(b)));
    let meets = set.iter().all(|a| set.iter().all(|b| set.contains(frame.meet(a, b))));
    up && meets
}

/// Least strongly hereditary superset: iterate upward closure and member
/// meets to a fixpoint. Errors on the empty set.
pub fn strongly_hereditary_closure(
    frame: &SOMonoid,
    set: WorldSet,
) -> Result<WorldSet, FrameError> {
    if set.is_empty() {
        return Err(FrameError::EmptySubset);
    }
    let mut cur = set;
    loop {
        let mut next = frame.up_closure(cur);
        for a in cur.iter() {
            for b in cur.iter() {
                next = next.with(frame.meet(a, b));
            }
        }
        if next == cur {
            return Ok(cur);
        }
        cur = next;
    }
}

/// `A*B = {c : exists a in A, b in B with a*b <= c}`.
pub fn prod_set(frame: &SOMonoid, a: WorldSet, b: WorldSet) -> WorldSet {
    let mut gens = WorldSet::EMPTY;
    for x in a.iter() {
        for y in b.iter() {
            gens = gens.with(frame.prod(x, y));
        }
    }
    frame.up_closure(gens)
}

/// `A join B = {c : exists a, b in A union B with a meet b <= c}`.
pub fn join_set(frame: &SOMonoid, a: WorldSet, b: WorldSet) -> WorldSet {
    let u = a.union(b);
    let mut gens = WorldSet::EMPTY;
    for x in u.iter() {
        for y in u.iter() {
            gens = gens.with(frame.meet(x, y));
        }
    }
    frame.up_closure(gens)
}

/// `A -> B = {c : c*A is contained in B}`; since B is upward closed this is
/// `{c : c*a in B for every a in A}`.
pub fn arrow_set(frame: &SOMonoid, a: WorldSet, b: WorldSet) -> WorldSet {
    let mut out = WorldSet::EMPTY;
    for c in 0..frame.n() {
        if a.iter().all(|x| b.contains(frame.prod(c, x))) {
            out = out.with(c);
        }
    }
    out
}

/// Left residual `A <- B := B -> A`.
pub fn left_arrow_set(frame: &SOMonoid, a: WorldSet, b: WorldSet) -> WorldSet {
    arrow_set(frame, b, a)
}

/// `~A = A -> {oo}`.
pub fn neg_set(frame: &SOMonoid, a: WorldSet) -> WorldSet {
    arrow_set(frame, a, WorldSet::singleton(frame.infinity()))
}

/// Big join of a family: every world above some meet of a nonempty family
/// drawn from the union. The empty family yields `{oo}`. Equals the
/// strongly hereditary closure of the union.
pub fn big_join_sets(frame: &SOMonoid, sets: impl IntoIterator<Item = WorldSet>) -> WorldSet {
    let union = sets.into_iter().fold(WorldSet::EMPTY, WorldSet::union);
    if union.is_empty() {
        return WorldSet::singleton(frame.infinity());
    }
    strongly_hereditary_closure(frame, union).expect("union is nonempty")
}

/// `g_d(A) = {p : exists q in A with d(q) <= p}`.
pub fn gamma_set(frame: &SOMonoid, delta: &Conucleus, a: WorldSet) -> WorldSet {
    let mut out = WorldSet::EMPTY;
    for p in 0..frame.n() {
        if a.iter().any(|q| frame.leq(delta.apply(q), p)) {
            out = out.with(p);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Conuclei
// ---------------------------------------------------------------------------

/// An interior-style map on a frame: deflationary, monotone, idempotent,
/// sub-multiplicative (`d(p*q) <= d(p)*d(q)`), and preserving meets of
/// nonempty families (binary suffices at finite size).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conucleus {
    table: Vec<usize>,
}

impl Conucleus {
    pub fn new(frame: &SOMonoid, table: Vec<usize>) -> Result<Conucleus, FrameError> {
        let n = frame.n();
        if table.len() != n {
            return Err(FrameError::BadConucleus(format!(
                "table has length {}, expected {n}",
                table.len()
            )));
        }
        if let Some(&v) = table.iter().find(|&&v| v >= n) {
            return Err(FrameError::WorldOutOfRange { index: v, n });
        }
        let d = |p: usize| table[p];
        for p in 0..n {
            if !frame.leq(d(p), p) {
                return Err(FrameError::BadConucleus(format!(
                    "not deflationary at `{}`",
                    frame.name(p)
                )));
            }
            if d(d(p)) != d(p) {
                return Err(FrameError::BadConucleus(format!(
                    "not idempotent under composition at `{}`",
                    frame.name(p)
                )));
            }
        }
        for p in 0..n {
            for q in 0..n {
                if frame.leq(p, q) && !frame.leq(d(p), d(q)) {
                    return Err(FrameError::BadConucleus(format!(
                        "not monotone at (`{}`, `{}`)",
                        frame.name(p),
                        frame.name(q)
                    )));
                }
                if !frame.leq(d(frame.prod(p, q)), frame.prod(d(p), d(q))) {
                    return Err(FrameError::BadConucleus(format!(
                        "product condition fails at (`{}`, `{}`)",
                        frame.name(p),
                        frame.name(q)
                    )));
                }
                if d(frame.meet(p, q)) != frame.meet(d(p), d(q)) {
                    return Err(FrameError::BadConucleus(format!(
                        "does not preserve the meet of (`{}`, `{}`)",
                        frame.name(p),
                        frame.name(q)
                    )));
                }
            }
        }
        Ok(Conucleus { table })
    }

    pub fn identity(frame: &SOMonoid) -> Conucleus {
        Conucleus { table: (0..frame.n()).collect() }
    }

    #[inline]
    pub fn apply(&self, p: usize) -> usize {
        self.table[p]
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }
}

/// Conucleus predicate record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConucleusFlags {
    /// `d(p*p) = d(p)` for every `p`.
    pub idempotent: bool,
    /// `d(oo) = oo`.
    pub respects_top: bool,
    /// `d(p -> q) = 1 iff p -> d(q) = 1`.
    pub respects_implications: bool,
    pub standard: bool,
}

pub fn conucleus_predicates(frame: &SOMonoid, delta: &Conucleus) -> ConucleusFlags {
    let n = frame.n();
    let idempotent = (0..n).all(|p| delta.apply(frame.prod(p, p)) == delta.apply(p));
    let respects_top = delta.apply(frame.infinity()) == frame.infinity();
    let unit = frame.unit();
    let respects_implications = (0..n).all(|p| {
        (0..n).all(|q| {
            (delta.apply(frame.implication(p, q)) == unit)
                == (frame.implication(p, delta.apply(q)) == unit)
        })
    });
    ConucleusFlags {
        idempotent,
        respects_top,
        respects_implications,
        standard: idempotent && respects_top && respects_implications,
    }
}

/// All conuclei on the frame, ordered by table. Candidates are pruned by
/// deflation and monotonicity during assignment.
pub fn enumerate_conuclei(frame: &SOMonoid, bound: usize) -> Result<Vec<Conucleus>, FrameError> {
    let n = frame.n();
    if n > bound {
        return Err(FrameError::BoundExceeded { n, bound });
    }
    let mut out = Vec::new();
    let mut table = vec![0usize; n];
    fn assign(frame: &SOMonoid, table: &mut Vec<usize>, next: usize, out: &mut Vec<Conucleus>) {
        let n = frame.n();
        if next == n {
            if let Ok(c) = Conucleus::new(frame, table.clone()) {
                out.push(c);
            }
            return;
        }
        for v in 0..n {
            if !frame.leq(v, next) {
                continue; // deflationary
            }
            let monotone = (0..next).all(|earlier| {
                (!frame.leq(earlier, next) || frame.leq(table[earlier], v))
                    && (!frame.leq(next, earlier) || frame.leq(v, table[earlier]))
            });
            if !monotone {
                continue;
            }
            table[next] = v;
            assign(frame, table, next + 1, out);
        }
        table[next] = 0;
    }
    assign(frame, &mut table, 0, &mut out);
    out.sort_by(|a, b| a.table.cmp(&b.table));
    Ok(out)
}

/// The standard conuclei on the frame.
pub fn enumerate_standard_conuclei(
    frame: &SOMonoid,
    bound: usize,
) -> Result<Vec<Conucleus>, FrameError> {
    Ok(enumerate_conuclei(frame, bound)?
        .into_iter()
        .filter(|d| conucleus_predicates(frame, d).standard)
        .collect())
}

// ---------------------------------------------------------------------------
// The lattice P*
// ---------------------------------------------------------------------------

/// All strongly hereditary subsets of a frame, with the residuated-lattice
/// structure rebuilt as a [`Quantale`] (order is inclusion, `0 = {oo}`,
/// `1` is the full carrier).
#[derive(Debug, Clone)]
pub struct PStarLattice {
    frame: SOMonoid,
    elements: Vec<WorldSet>,
    index: HashMap<u64, usize>,
    quantale: Quantale,
    zero: usize,
    one: usize,
}

impl PStarLattice {
    /// Enumerates the strongly hereditary sets (walking up-sets generated by
    /// antichains and filtering by meet closure) and builds the quantale.
    pub fn enumerate(frame: &SOMonoid, bound: usize) -> Result<PStarLattice, FrameError> {
        let n = frame.n();
        if n > bound {
            return Err(FrameError::BoundExceeded { n, bound });
        }
        // Every up-set is the upward closure of its antichain of minimal
        // elements; walk antichains rather than all 2^n subsets.
        let mut elements: Vec<WorldSet> = Vec::new();
        let mut stack: Vec<(usize, WorldSet)> = vec![(0, WorldSet::EMPTY)];
        while let Some((start, antichain)) = stack.pop() {
            if !antichain.is_empty() {
                let up = frame.up_closure(antichain);
                if is_strongly_hereditary(frame, up) && !elements.contains(&up) {
                    elements.push(up);
                }
            }
            for w in start..n {
                if antichain.iter().all(|a| !frame.leq(a, w) && !frame.leq(w, a)) {
                    stack.push((w + 1, antichain.with(w)));
                }
            }
        }
        elements.sort_by_key(|s| (s.len(), s.bits()));
        let index: HashMap<u64, usize> =
            elements.iter().enumerate().map(|(i, s)| (s.bits(), i)).collect();

        let describe = |s: WorldSet| {
            s.iter().map(|w| frame.name(w).to_string()).collect::<Vec<_>>().join(",")
        };
        let lookup = |s: WorldSet| -> Result<usize, FrameError> {
            index.get(&s.bits()).copied().ok_or_else(|| FrameError::NotClosedUnderOps(describe(s)))
        };

        let names: Vec<String> = elements
            .iter()
            .map(|s| format!("{{{}}}", describe(*s)))
            .collect();
        let leq = elements
            .iter()
            .map(|&a| elements.iter().map(|&b| a.is_subset(b)).collect())
            .collect();
        let mut prod_rows = Vec::with_capacity(elements.len());
        for &a in &elements {
            let mut row = Vec::with_capacity(elements.len());
            for &b in &elements {
                row.push(lookup(prod_set(frame, a, b))?);
            }
            prod_rows.push(row);
        }
        let quantale = Quantale::new(names, leq, prod_rows)?;

        let zero = lookup(WorldSet::singleton(frame.infinity()))?;
        let one = lookup(WorldSet::full(n))?;
        debug_assert_eq!(zero, quantale.bottom());
        debug_assert_eq!(one, quantale.top());

        Ok(PStarLattice { frame: frame.clone(), elements, index, quantale, zero, one })
    }

    pub fn frame(&self) -> &SOMonoid {
        &self.frame
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, i: usize) -> WorldSet {
        self.elements[i]
    }

    pub fn elements(&self) -> &[WorldSet] {
        &self.elements
    }

    pub fn index_of(&self, set: WorldSet) -> Option<usize> {
        self.index.get(&set.bits()).copied()
    }

    /// `P*` as a quantale; index space matches `elements()`.
    pub fn quantale(&self) -> &Quantale {
        &self.quantale
    }

    /// The bottom `{oo}`.
    pub fn zero(&self) -> usize {
        self.zero
    }

    /// The top: the full carrier.
    pub fn one(&self) -> usize {
        self.one
    }

    /// The nucleus on `P*` induced by a conucleus on the frame.
    pub fn gamma_delta(&self, delta: &Conucleus) -> Result<UnaryMap, FrameError> {
        let mut table = Vec::with_capacity(self.elements.len());
        for &a in &self.elements {
            let image = gamma_set(&self.frame, delta, a);
            let idx = self.index_of(image).ok_or_else(|| {
                FrameError::NotClosedUnderOps(
                    image
                        .iter()
                        .map(|w| self.frame.name(w).to_string())
                        .collect::<Vec<_>>()
                        .join(","),
                )
            })?;
            table.push(idx);
        }
        Ok(UnaryMap::new(&self.quantale, table).expect("table is total and in range"))
    }
}

/// Checks the six dual-order laws relating product, implication and
/// negation over all tuples.
pub fn verify_so_laws(frame: &SOMonoid) -> LawReport {
    let mut report = LawReport::new();
    let n = frame.n();
    let names =
        |xs: &[usize]| xs.iter().map(|&x| frame.name(x).to_string()).collect::<Vec<_>>().join(", ");

    let mut law = |name: &str, check: &dyn Fn(usize, usize, usize) -> bool| {
        let mut witness = None;
        'outer: for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if !check(a, b, c) {
                        witness = Some(names(&[a, b, c]));
                        break 'outer;
                    }
                }
            }
        }
        report.record(name, witness);
    };

    law("a <= b iff b->a = 1", &|a, b, _| {
        frame.leq(a, b) == (frame.implication(b, a) == frame.unit())
    });
    law("b <= a*(a->b)", &|a, b, _| frame.leq(b, frame.prod(a, frame.implication(a, b))));
    law("implication antitone on the left", &|a, b, c| {
        !frame.leq(a, b) || frame.leq(frame.implication(b, c), frame.implication(a, c))
    });
    law("implication monotone on the right", &|a, b, c| {
        !frame.leq(a, b) || frame.leq(frame.implication(c, a), frame.implication(c, b))
    });
    law("(a*b)->c = a->(b->c)", &|a, b, c| {
        frame.implication(frame.prod(a, b), c) == frame.implication(a, frame.implication(b, c))
    });
    law("a * ~a = oo", &|a, _, _| frame.prod(a, frame.negation(a)) == frame.infinity());

    report
}

/// Checks the three conditional standardness transfers from a conucleus to
/// its induced nucleus on `P*`, plus unconditional join preservation.
/// Transfers whose hypothesis fails are reported as hypothesis-unmet.
pub fn verify_gamma_standardness(
    frame: &SOMonoid,
    delta: &Conucleus,
    bound: usize,
) -> Result<LawReport, FrameError> {
    let mut report = LawReport::new();
    let pstar = PStarLattice::enumerate(frame, bound)?;
    let q = pstar.quantale();
    let gamma = pstar.gamma_delta(delta)?;
    let dflags = conucleus_predicates(frame, delta);
    let gflags = nuclei::nucleus_predicates(q, &gamma);

    if !nuclei::is_quantic_nucleus(q, &gamma) {
        report.push(LawCheck::fail("gamma_delta is a quantic nucleus on P*", "definition check"));
        return Ok(report);
    }
    report.push(LawCheck::pass("gamma_delta is a quantic nucleus on P*"));

    let transfers: [(&str, bool, bool); 3] = [
        (
            "delta idempotent implies gamma idempotent-wrt-products",
            dflags.idempotent,
            gflags.idempotent_wrt_products,
        ),
        (
            "delta respects top implies gamma respects bottom",
            dflags.respects_top,
            gflags.respects_bottom,
        ),
        (
            "delta respects implications implies gamma respects implications",
            dflags.respects_implications,
            gflags.respects_implications,
        ),
    ];
    for (law, hyp, conclusion) in transfers {
        if !hyp {
            report.push(LawCheck::unmet(law, "hypothesis unmet for this conucleus"));
        } else if conclusion {
            report.push(LawCheck::pass(law));
        } else {
            report.push(LawCheck::fail(law, "conclusion fails on P*"));
        }
    }

    // gamma(join of family) = join of gammas, over all nonempty families of
    // P* elements when P* is small, otherwise all pairs.
    let m = pstar.len();
    let mut witness = None;
    if m <= 12 {
        for mask in 1u32..(1u32 << m) {
            let fam: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
            let lhs = gamma.apply(q.big_join(fam.iter().copied()));
            let rhs = q.big_join(fam.iter().map(|&i| gamma.apply(i)));
            if lhs != rhs {
                witness = Some(format!("family of {} elements", fam.len()));
                break;
            }
        }
    } else {
        'outer: for a in 0..m {
            for b in 0..m {
                let lhs = gamma.apply(q.join(a, b));
                let rhs = q.join(gamma.apply(a), gamma.apply(b));
                if lhs != rhs {
                    witness = Some(format!("({}, {})", q.name(a), q.name(b)));
                    break 'outer;
                }
            }
        }
    }
    report.record("gamma preserves joins", witness);

    Ok(report)
}

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
struct RawFrameFile {
    names: Vec<String>,
    leq: Vec<Vec<bool>>,
    prod: Vec<Vec<usize>>,
    #[serde(default)]
    conucleus: Option<Vec<usize>>,
}

/// A loaded frame file: the frame plus an optional conucleus table.
#[derive(Debug)]
pub struct FrameFile {
    pub frame: SOMonoid,
    pub conucleus: Option<Vec<usize>>,
}

/// Frame files mirror the algebra format; by convention index 0 is the
/// bottom element `1`.
pub fn load_frame(text: &str) -> Result<FrameFile, FrameError> {
    let raw: RawFrameFile =
        serde_json::from_str(text).map_err(|e| FrameError::Format(e.to_string()))?;
    let frame = SOMonoid::new(raw.names, raw.leq, raw.prod)?;
    Ok(FrameFile { frame, conucleus: raw.conucleus })
}

pub fn frame_to_json(frame: &SOMonoid) -> serde_json::Value {
    let n = frame.n();
    serde_json::json!({
        "names": frame.names(),
        "leq": (0..n).map(|x| (0..n).map(|y| frame.leq(x, y)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "prod": (0..n).map(|x| (0..n).map(|y| frame.prod(x, y)).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}
