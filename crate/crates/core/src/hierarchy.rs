//! The cumulative set-theoretic hierarchy over a frame and its companion
//! Heyting-valued model.
//!
//! Level 0 is empty. Level `a+1` adds every extensional function from level
//! `a` into the `gamma`-regular elements of `P*` (Kripke side) and into the
//! regular elements of `H = P*/F_gamma` (Heyting side). Membership forcing
//! for a new element `f` in `g` joins, over `h` in the domain of `g`, the
//! product of `g(h)` with the two inclusion sets relating `f` and `h`;
//! old pairs inherit their sets, and `f in g` for old `f` and new `g` is
//! just `g(f)`.
//!
//! The two sides are built independently and then paired: the bijection
//! sends a Kripke element to the Heyting element whose graph is the
//! class of its graph. [`Hierarchy::verify_translation`] checks that the
//! class of every Kripke forcing set equals the Heyting value over an
//! exhaustive universal-quantifier-free sentence sweep, and
//! [`Hierarchy::verify_diamond_corollary`] checks the induced validity
//! biconditional between a sentence and its possibility.
//!
//! Everything requires a *standard* conucleus (idempotent, respecting the
//! top element and implications); construction refuses otherwise, naming
//! the failing flag.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forcing::{ForcingError, KripkeModel};
use crate::frames::{
    conucleus_predicates, Conucleus, FrameError, PStarLattice, SOMonoid, WorldSet,
};
use crate::logic::{BinOp, Formula, Leaf, PoolNode, SentenceBasis, SentencePool, Term};
use crate::nuclei::{self, NucleiError, QuotientAlgebra, UnaryMap};
use crate::report::{LawCheck, LawReport};

#[derive(Debug, Error)]
pub enum HierarchyError {
    #[error("conucleus is not standard: fails `{flag}`")]
    NotStandard { flag: &'static str },
    #[error("level build needs {candidates} candidate functions, over the budget of {budget}")]
    BudgetExceeded { candidates: u128, budget: u64 },
    #[error("level {level} has not been built (top level is {top})")]
    LevelNotBuilt { level: usize, top: usize },
    #[error("quotient identity failed: {0}")]
    QuotientIdentity(String),
    #[error("level bijection failed: {0}")]
    BijectionFailure(String),
    #[error("snapshot does not match this structure: {0}")]
    SnapshotMismatch(String),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Nuclei(#[from] NucleiError),
    #[error(transparent)]
    Forcing(#[from] ForcingError),
}

/// A hierarchy element on the Kripke side: a function from the previous
/// level into the regular elements of `P*`, tagged with the level that
/// created it. `graph[i]` is the value on the i-th element of that level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KElement {
    pub level: usize,
    pub graph: Vec<usize>,
}

/// A Heyting-side element: values are classes of `H`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HElement {
    pub level: usize,
    pub graph: Vec<usize>,
}

const UNSET: usize = usize::MAX;

/// Per-level build statistics.
#[derive(Debug, Clone, Serialize)]
pub struct LevelStats {
    pub level: usize,
    pub kripke_size: usize,
    pub heyting_size: usize,
    pub new_elements: usize,
    pub candidates: u128,
}

/// A sentence sweep outcome (translation or diamond corollary).
#[derive(Debug, Clone, Default, Serialize)]
pub struct SweepReport {
    pub sentences_checked: usize,
    pub violations: usize,
    pub examples: Vec<String>,
}

impl SweepReport {
    const KEPT: usize = 5;

    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    fn record(&mut self, ok: bool, sentence: impl FnOnce() -> String) {
        self.sentences_checked += 1;
        if !ok {
            self.violations += 1;
            if self.examples.len() < Self::KEPT {
                self.examples.push(sentence());
            }
        }
    }
}

/// The Heyting algebra `H = P*/F_gamma` together with the structures it is
/// built from and the verification of its induced-operation identities.
pub struct HeytingBuild {
    pub pstar: PStarLattice,
    pub gamma: UnaryMap,
    pub algebra: QuotientAlgebra,
    pub report: LawReport,
}

/// Builds `H = P*/F_gamma` for a standard conucleus and exhaustively
/// verifies the induced-operation identities (`|A| meet |B| = |A*B|`,
/// `|~A| = not |A|`, `|gamma(A)| = |A|`, `|join| = join of classes`) plus
/// idempotency of the induced product.
pub fn build_heyting_algebra(
    frame: &SOMonoid,
    delta: &Conucleus,
    bound: usize,
) -> Result<HeytingBuild, HierarchyError> {
    let flags = conucleus_predicates(frame, delta);
    if !flags.idempotent {
        return Err(HierarchyError::NotStandard { flag: "idempotent" });
    }
    if !flags.respects_top {
        return Err(HierarchyError::NotStandard { flag: "respects_top" });
    }
    if !flags.respects_implications {
        return Err(HierarchyError::NotStandard { flag: "respects_implications" });
    }

    let pstar = PStarLattice::enumerate(frame, bound)?;
    let gamma = pstar.gamma_delta(delta)?;
    let q = pstar.quantale();
    let filter = nuclei::dense_filter(q, &gamma)?;
    let algebra = nuclei::quotient(q, &filter)?;
    let h = &algebra.quotient;
    let c = |i: usize| algebra.class(i);

    let mut report = LawReport::new();
    let m = pstar.len();
    let mut check = |law: &str, witness: Option<String>| {
        match witness {
            None => report.push(LawCheck::pass(law)),
            Some(w) => report.push(LawCheck::fail(law, w)),
        }
    };

    let pair_scan = |f: &dyn Fn(usize, usize) -> bool| -> Option<String> {
        for i in 0..m {
            for j in 0..m {
                if !f(i, j) {
                    return Some(format!("({}, {})", q.name(i), q.name(j)));
                }
            }
        }
        None
    };
    check("class meet agrees", pair_scan(&|i, j| h.meet(c(i), c(j)) == c(q.meet(i, j))));
    check(
        "class meet equals class of product",
        pair_scan(&|i, j| h.meet(c(i), c(j)) == c(q.prod(i, j))),
    );
    check("class join agrees", pair_scan(&|i, j| h.join(c(i), c(j)) == c(q.join(i, j))));
    check(
        "class residual agrees",
        pair_scan(&|i, j| h.residual(c(i), c(j)) == c(q.residual(i, j))),
    );
    check(
        "class negation agrees",
        (0..m).find(|&i| h.neg(c(i)) != c(q.neg(i))).map(|i| q.name(i).to_string()),
    );
    check(
        "class of gamma(A) is class of A",
        (0..m).find(|&i| c(gamma.apply(i)) != c(i)).map(|i| q.name(i).to_string()),
    );

    let mut join_witness = None;
    if m <= 16 {
        for mask in 0u32..(1u32 << m) {
            let fam: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
            let lhs = c(q.big_join(fam.iter().copied()));
            let rhs = h.big_join(fam.iter().map(|&i| c(i)));
            if lhs != rhs {
                join_witness = Some(format!("family of {} elements", fam.len()));
                break;
            }
        }
    }
    check("class of join equals join of classes", join_witness);
    check(
        "induced product is idempotent",
        if h.is_idempotent() { None } else { Some("product differs from meet".into()) },
    );

    if !report.all_passed() {
        let failed: Vec<&str> = report.failures().map(|f| f.law.as_str()).collect();
        return Err(HierarchyError::QuotientIdentity(failed.join("; ")));
    }

    Ok(HeytingBuild { pstar, gamma, algebra, report })
}

/// Both hierarchies, their membership tables, and the level bijection.
pub struct Hierarchy {
    frame: SOMonoid,
    delta: Conucleus,
    pstar: PStarLattice,
    gamma: UnaryMap,
    heyting: QuotientAlgebra,
    regular_pstar: Vec<usize>,
    regular_h: Vec<usize>,

    elements: Vec<KElement>,
    levels: Vec<Vec<usize>>,
    mem: Vec<Vec<usize>>,

    helements: Vec<HElement>,
    hlevels: Vec<Vec<usize>>,
    hmem: Vec<Vec<usize>>,

    /// Kripke id -> Heyting id of the paired element.
    prime: Vec<usize>,
}

impl Hierarchy {
    pub fn new(frame: SOMonoid, delta: Conucleus, bound: usize) -> Result<Self, HierarchyError> {
        let build = build_heyting_algebra(&frame, &delta, bound)?;
        let HeytingBuild { pstar, gamma, algebra: heyting, .. } = build;
        let q = pstar.quantale();
        let h = &heyting.quotient;

        // gamma-regular elements of P*: ~~gamma(A) = A.
        let regular_pstar: Vec<usize> =
            (0..pstar.len()).filter(|&i| q.neg(q.neg(gamma.apply(i))) == i).collect();
        // regular classes of H: not not c = c.
        let regular_h: Vec<usize> = (0..h.n()).filter(|&c| h.neg(h.neg(c)) == c).collect();

        // The class map restricted to the regular elements must biject onto
        // the regular classes; the level pairing depends on it.
        let mut image: Vec<usize> = regular_pstar.iter().map(|&i| heyting.class(i)).collect();
        image.sort_unstable();
        image.dedup();
        if image != regular_h || image.len() != regular_pstar.len() {
            return Err(HierarchyError::BijectionFailure(format!(
                "classes of regular P* elements {image:?} differ from regular classes {regular_h:?}"
            )));
        }

        Ok(Hierarchy {
            frame,
            delta,
            pstar,
            gamma,
            heyting,
            regular_pstar,
            regular_h,
            elements: Vec::new(),
            levels: vec![Vec::new()],
            mem: Vec::new(),
            helements: Vec::new(),
            hlevels: vec![Vec::new()],
            hmem: Vec::new(),
            prime: Vec::new(),
        })
    }

    pub fn pstar(&self) -> &PStarLattice {
        &self.pstar
    }

    pub fn gamma(&self) -> &UnaryMap {
        &self.gamma
    }

    pub fn heyting(&self) -> &QuotientAlgebra {
        &self.heyting
    }

    pub fn regular_pstar(&self) -> &[usize] {
        &self.regular_pstar
    }

    pub fn regular_h(&self) -> &[usize] {
        &self.regular_h
    }

    pub fn top_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, a: usize) -> Result<&[usize], HierarchyError> {
        self.levels
            .get(a)
            .map(|v| v.as_slice())
            .ok_or(HierarchyError::LevelNotBuilt { level: a, top: self.top_level() })
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.len()).collect()
    }

    pub fn heyting_level_sizes(&self) -> Vec<usize> {
        self.hlevels.iter().map(|l| l.len()).collect()
    }

    pub fn element(&self, id: usize) -> &KElement {
        &self.elements[id]
    }

    pub fn helement(&self, id: usize) -> &HElement {
        &self.helements[id]
    }

    /// Kripke id -> paired Heyting id.
    pub fn prime(&self, id: usize) -> usize {
        self.prime[id]
    }

    /// Membership forcing set (as a `P*` index) for built elements.
    pub fn membership(&self, f: usize, g: usize) -> usize {
        debug_assert_ne!(self.mem[f][g], UNSET);
        self.mem[f][g]
    }

    /// Heyting membership value (as an `H` class) for built elements.
    pub fn h_membership(&self, f: usize, g: usize) -> usize {
        debug_assert_ne!(self.hmem[f][g], UNSET);
        self.hmem[f][g]
    }

    /// First level `a` with `R_(a+1) = R_a`, if stabilization has been
    /// observed.
    pub fn stabilized(&self) -> Option<usize> {
        (1..self.levels.len())
            .find(|&a| self.levels[a].len() == self.levels[a - 1].len())
            .map(|a| a - 1)
    }

    pub fn build_to(
        &mut self,
        level: usize,
        budget: u64,
    ) -> Result<Vec<LevelStats>, HierarchyError> {
        let mut stats = Vec::new();
        while self.top_level() < level {
            stats.push(self.build_next_level(budget)?);
        }
        Ok(stats)
    }

    /// Builds the next level on both sides and extends the bijection.
    pub fn build_next_level(&mut self, budget: u64) -> Result<LevelStats, HierarchyError> {
        let a = self.top_level();
        let domain: Vec<usize> = self.levels[a].clone();
        let m = domain.len();
        let q = self.pstar.quantale();

        let candidates =
            (self.regular_pstar.len() as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
        if candidates > budget as u128 {
            return Err(HierarchyError::BudgetExceeded { candidates, budget });
        }

        // Kripke side: equality forcing sets over the previous level, then
        // the extensional candidates.
        let eq = self.equality_sets(a)?;
        let mut new_k: Vec<usize> = Vec::new();
        for graph in GraphCounter::new(&self.regular_pstar, m) {
            let extensional =
                (0..m).all(|i| (0..m).all(|j| q.leq(q.prod(graph[i], eq[i][j]), graph[j])));
            if !extensional {
                continue;
            }
            if self.find_kelement(m, &graph).is_some() {
                continue; // already present (stabilized domain)
            }
            let id = self.elements.len();
            self.elements.push(KElement { level: a + 1, graph });
            new_k.push(id);
        }
        let mut next = self.levels[a].clone();
        next.extend(new_k.iter().copied());
        self.levels.push(next);

        self.extend_membership(a, &new_k);

        // Heyting side, mirrored.
        let (v_fwd, v_bwd) = self.h_extensionality_values(a)?;
        let mut accepted_h: Vec<Vec<usize>> = Vec::new();
        {
            let hq = &self.heyting.quotient;
            for graph in GraphCounter::new(&self.regular_h, m) {
                let extensional = (0..m).all(|i| {
                    (0..m).all(|j| {
                        let lower = hq.meet(graph[i], hq.meet(v_fwd[i][j], v_bwd[i][j]));
                        hq.leq(lower, graph[j])
                    })
                });
                if extensional && self.find_helement(m, &graph).is_none() {
                    accepted_h.push(graph);
                }
            }
        }
        let mut new_h: Vec<usize> = Vec::new();
        for graph in accepted_h {
            let id = self.helements.len();
            self.helements.push(HElement { level: a + 1, graph });
            new_h.push(id);
        }
        let mut hnext = self.hlevels[a].clone();
        hnext.extend(new_h.iter().copied());
        self.hlevels.push(hnext);

        self.extend_h_membership(a, &new_h);

        // Pair the new elements: g' takes f' to the class of g(f).
        if new_k.len() != new_h.len() {
            return Err(HierarchyError::BijectionFailure(format!(
                "level {} created {} Kripke elements but {} Heyting elements",
                a + 1,
                new_k.len(),
                new_h.len()
            )));
        }
        self.prime.resize(self.elements.len(), UNSET);
        for &kid in &new_k {
            let image: Vec<usize> =
                self.elements[kid].graph.iter().map(|&v| self.heyting.class(v)).collect();
            let hid = new_h
                .iter()
                .copied()
                .find(|&h| self.helements[h].graph == image)
                .ok_or_else(|| {
                    HierarchyError::BijectionFailure(format!(
                        "no Heyting element matches the class graph of element {kid}"
                    ))
                })?;
            if self.prime.contains(&hid) {
                return Err(HierarchyError::BijectionFailure(format!(
                    "two Kripke elements map to Heyting element {hid}"
                )));
            }
            self.prime[kid] = hid;
            self.check_inverse(kid, hid)?;
        }

        Ok(LevelStats {
            level: a + 1,
            kripke_size: self.levels[a + 1].len(),
            heyting_size: self.hlevels[a + 1].len(),
            new_elements: new_k.len(),
            candidates,
        })
    }

    /// The inverse construction: every representative of `h(f')` maps under
    /// `~~gamma` to the paired element's value, independently of the choice.
    fn check_inverse(&self, kid: usize, hid: usize) -> Result<(), HierarchyError> {
        let q = self.pstar.quantale();
        let helem = &self.helements[hid];
        let kelem = &self.elements[kid];
        for (pos, &class) in helem.graph.iter().enumerate() {
            let mut seen = None;
            for s in 0..self.pstar.len() {
                if self.heyting.class(s) != class {
                    continue;
                }
                let back = q.neg(q.neg(self.gamma.apply(s)));
                match seen {
                    None => seen = Some(back),
                    Some(prev) if prev == back => {}
                    Some(prev) => {
                        return Err(HierarchyError::BijectionFailure(format!(
                            "representatives of class {class} disagree: {prev} vs {back}"
                        )))
                    }
                }
            }
            if seen != Some(kelem.graph[pos]) {
                return Err(HierarchyError::BijectionFailure(format!(
                    "inverse of Heyting element {hid} disagrees with element {kid} at {pos}"
                )));
            }
        }
        Ok(())
    }

    fn find_kelement(&self, domain_len: usize, graph: &[usize]) -> Option<usize> {
        self.elements.iter().position(|e| {
            e.graph.len() == domain_len
                && self.levels[e.level - 1].len() == domain_len
                && e.graph == graph
        })
    }

    fn find_helement(&self, domain_len: usize, graph: &[usize]) -> Option<usize> {
        self.helements.iter().position(|e| {
            e.graph.len() == domain_len
                && self.hlevels[e.level - 1].len() == domain_len
                && e.graph == graph
        })
    }

    /// Forcing sets of the desugared equality abbreviation for every pair of
    /// the level's elements, evaluated in the level model.
    fn equality_sets(&self, a: usize) -> Result<Vec<Vec<usize>>, HierarchyError> {
        let domain = &self.levels[a];
        let m = domain.len();
        if m == 0 {
            return Ok(Vec::new());
        }
        let model = self.level_model(a)?;
        let mut eq = vec![vec![0usize; m]; m];
        for (i, &gi) in domain.iter().enumerate() {
            for (j, &gj) in domain.iter().enumerate() {
                let formula =
                    Formula::Eq(Term::Const(element_name(gi)), Term::Const(element_name(gj)));
                eq[i][j] = model.forcing_set(&formula)?;
            }
        }
        Ok(eq)
    }

    /// The two Heyting extensionality values for every pair of the level's
    /// elements: `[[not exists x not (x in g -> x in h)]]` and the value of
    /// the reversed inclusion.
    #[allow(clippy::type_complexity)]
    fn h_extensionality_values(
        &self,
        a: usize,
    ) -> Result<(Vec<Vec<usize>>, Vec<Vec<usize>>), HierarchyError> {
        let hdomain = &self.hlevels[a];
        let m = hdomain.len();
        let mut fwd = vec![vec![0usize; m]; m];
        let mut bwd = vec![vec![0usize; m]; m];
        for i in 0..m {
            for j in 0..m {
                fwd[i][j] = self.h_inclusion_value(hdomain, hdomain[i], hdomain[j], false);
                bwd[i][j] = self.h_inclusion_value(hdomain, hdomain[i], hdomain[j], true);
            }
        }
        Ok((fwd, bwd))
    }

    /// `[[ not exists x not (x in g -> x in h) ]]` over the level's domain
    /// (the implication is reversed when `reversed`).
    fn h_inclusion_value(&self, hdomain: &[usize], g: usize, h: usize, reversed: bool) -> usize {
        let hq = &self.heyting.quotient;
        let neg = |v: usize| hq.residual(v, hq.bottom());
        let mut joined = hq.bottom();
        for &x in hdomain {
            let (ante, cons) = if reversed {
                (self.hmem[x][h], self.hmem[x][g])
            } else {
                (self.hmem[x][g], self.hmem[x][h])
            };
            joined = hq.join(joined, neg(hq.residual(ante, cons)));
        }
        neg(joined)
    }

    /// Fills the membership table for the pairs created by level `a+1`.
    fn extend_membership(&mut self, a: usize, new_ids: &[usize]) {
        let total = self.elements.len();
        for row in &mut self.mem {
            row.resize(total, UNSET);
        }
        self.mem.resize(total, vec![UNSET; total]);

        let q = self.pstar.quantale();
        let old: Vec<usize> = self.levels[a].clone();

        // Old f, new g: membership is g's value at f.
        for &g in new_ids {
            for (pos, &f) in old.iter().enumerate() {
                self.mem[f][g] = self.elements[g].graph[pos];
            }
        }
        // New f, any g: join over the domain of g of
        // g(h) * (inclusion(f, h) * inclusion(h, f)).
        let all: Vec<usize> = self.levels[a + 1].clone();
        for &f in new_ids {
            for &g in &all {
                let gdom: Vec<usize> = self.levels[self.elements[g].level - 1].clone();
                let mut acc = self.pstar.zero();
                for (hpos, &h) in gdom.iter().enumerate() {
                    let gh = self.elements[g].graph[hpos];
                    let mut fwd = self.pstar.one();
                    let mut bwd = self.pstar.one();
                    for (xpos, &x) in old.iter().enumerate() {
                        // the set forcing ~~<>(x in h)
                        let s = q.neg(q.neg(self.gamma.apply(self.mem[x][h])));
                        let fx = self.elements[f].graph[xpos];
                        fwd = q.meet(fwd, q.residual(fx, s));
                        bwd = q.meet(bwd, q.residual(s, fx));
                    }
                    acc = q.join(acc, q.prod(gh, q.prod(fwd, bwd)));
                }
                self.mem[f][g] = acc;
            }
        }
    }

    /// Heyting membership for the new pairs: for new `f`,
    /// `[[f in g]] = join over h of (g(h) meet meet_x (f(x) <-> [[not not (x in h)]]))`.
    fn extend_h_membership(&mut self, a: usize, new_ids: &[usize]) {
        let total = self.helements.len();
        for row in &mut self.hmem {
            row.resize(total, UNSET);
        }
        self.hmem.resize(total, vec![UNSET; total]);

        let hq = self.heyting.quotient.clone();
        let old: Vec<usize> = self.hlevels[a].clone();

        for &g in new_ids {
            for (pos, &f) in old.iter().enumerate() {
                self.hmem[f][g] = self.helements[g].graph[pos];
            }
        }
        let all: Vec<usize> = self.hlevels[a + 1].clone();
        for &f in new_ids {
            for &g in &all {
                let gdom: Vec<usize> = self.hlevels[self.helements[g].level - 1].clone();
                let mut acc = hq.bottom();
                for (hpos, &h) in gdom.iter().enumerate() {
                    let gh = self.helements[g].graph[hpos];
                    let mut inner = hq.top();
                    for (xpos, &x) in old.iter().enumerate() {
                        let nn = hq.neg(hq.neg(self.hmem[x][h]));
                        let fx = self.helements[f].graph[xpos];
                        inner = hq.meet(inner, hq.equiv(fx, nn));
                    }
                    acc = hq.join(acc, hq.meet(gh, inner));
                }
                self.hmem[f][g] = acc;
            }
        }
    }

    /// The level-`a` Kripke model: constants are the level's elements,
    /// atomic membership sets come from the built table.
    pub fn level_model(&self, a: usize) -> Result<KripkeModel, HierarchyError> {
        let ids = self.level(a)?.to_vec();
        let domain: Vec<String> = ids.iter().map(|&id| element_name(id)).collect();
        let mut atomic: BTreeMap<String, WorldSet> = BTreeMap::new();
        for &f in &ids {
            for &g in &ids {
                atomic.insert(
                    format!("{} in {}", element_name(f), element_name(g)),
                    self.pstar.element(self.mem[f][g]),
                );
            }
        }
        Ok(KripkeModel::from_parts(
            self.frame.clone(),
            self.delta.clone(),
            domain,
            atomic,
            self.pstar.clone(),
        )?)
    }

    /// Evaluates every universal-quantifier-free sentence with parameters
    /// from level `a` up to `depth` on both sides and hands the two values
    /// (Kripke `P*` index, Heyting class) to `visit`.
    fn sweep(
        &self,
        a: usize,
        depth: usize,
        mut visit: impl FnMut(&SentencePool, PoolNode, usize, usize),
    ) -> Result<(), HierarchyError> {
        let ids = self.level(a)?.to_vec();
        let basis =
            SentenceBasis::membership(ids.iter().map(|&id| element_name(id)).collect(), false);
        let projected = crate::logic::projected_nodes(&basis, depth);
        if projected > crate::forcing::SWEEP_LIMIT {
            return Err(HierarchyError::Forcing(ForcingError::SweepTooLarge {
                projected,
                limit: crate::forcing::SWEEP_LIMIT,
            }));
        }
        let store = depth.saturating_sub(1);
        let pool = SentencePool::build(&basis, store);
        let q = self.pstar.quantale();
        let hq = &self.heyting.quotient;
        let k = ids.len();
        let inst = k.max(1);
        let slot = |i: usize| i.min(k.saturating_sub(1));

        let mut kvals: Vec<Vec<usize>> = Vec::with_capacity(pool.len());
        let mut hvals: Vec<Vec<usize>> = Vec::with_capacity(pool.len());

        let eval = |node: PoolNode,
                    kvals: &[Vec<usize>],
                    hvals: &[Vec<usize>]|
         -> (Vec<usize>, Vec<usize>) {
            match node {
                PoolNode::Leaf(leaf) => {
                    let mut kv = Vec::with_capacity(inst);
                    let mut hv = Vec::with_capacity(inst);
                    for i in 0..inst {
                        let (f, g) = match leaf {
                            Leaf::Bot => {
                                kv.push(self.pstar.zero());
                                hv.push(hq.bottom());
                                continue;
                            }
                            Leaf::Letter(_) => unreachable!("membership basis has no letters"),
                            Leaf::MemCC(x, y) => (ids[x as usize], ids[y as usize]),
                            Leaf::MemXC(c) => (ids[slot(i)], ids[c as usize]),
                            Leaf::MemCX(c) => (ids[c as usize], ids[slot(i)]),
                            Leaf::MemXX => (ids[slot(i)], ids[slot(i)]),
                        };
                        kv.push(self.mem[f][g]);
                        hv.push(self.hmem[self.prime[f]][self.prime[g]]);
                    }
                    (kv, hv)
                }
                PoolNode::Bin(op, l, r) => {
                    let (kl, kr) = (&kvals[l as usize], &kvals[r as usize]);
                    let (hl, hr) = (&hvals[l as usize], &hvals[r as usize]);
                    let mut kv = Vec::with_capacity(inst);
                    let mut hv = Vec::with_capacity(inst);
                    for i in 0..inst {
                        let (kx, hx) = match op {
                            BinOp::StrongAnd => (q.prod(kl[i], kr[i]), hq.prod(hl[i], hr[i])),
                            BinOp::WeakAnd => (q.meet(kl[i], kr[i]), hq.meet(hl[i], hr[i])),
                            BinOp::Or => (q.join(kl[i], kr[i]), hq.join(hl[i], hr[i])),
                            BinOp::Imp => (q.residual(kl[i], kr[i]), hq.residual(hl[i], hr[i])),
                        };
                        kv.push(kx);
                        hv.push(hx);
                    }
                    (kv, hv)
                }
                // The nucleus induced on H is the identity (the class of
                // gamma(A) is the class of A), so the modality is
                // transparent on the Heyting side.
                PoolNode::Diamond(l) => {
                    let kv = kvals[l as usize].iter().map(|&v| self.gamma.apply(v)).collect();
                    let hv = hvals[l as usize].clone();
                    (kv, hv)
                }
                PoolNode::Exists(l) => {
                    let mut kx = self.pstar.zero();
                    let mut hx = hq.bottom();
                    for i in 0..k {
                        kx = q.join(kx, kvals[l as usize][i]);
                        hx = hq.join(hx, hvals[l as usize][i]);
                    }
                    (vec![kx; inst], vec![hx; inst])
                }
                PoolNode::Forall(_) => unreachable!("universal-free basis"),
            }
        };

        for idx in 0..pool.len() {
            let node = pool.nodes()[idx];
            let (kv, hv) = eval(node, &kvals, &hvals);
            if !pool.meta(idx).open {
                visit(&pool, node, kv[0], hv[0]);
            }
            kvals.push(kv);
            hvals.push(hv);
        }
        if depth > 0 {
            pool.for_each_final(|node, meta| {
                let (kv, hv) = eval(node, &kvals, &hvals);
                if !meta.open {
                    visit(&pool, node, kv[0], hv[0]);
                }
            });
        }
        Ok(())
    }

    /// For every universal-quantifier-free sentence with parameters from
    /// level `a`, checks that the class of the Kripke forcing set equals
    /// the Heyting value of the primed sentence.
    pub fn verify_translation(&self, a: usize, depth: usize) -> Result<SweepReport, HierarchyError> {
        let mut report = SweepReport::default();
        self.sweep(a, depth, |pool, node, kval, hval| {
            report.record(self.heyting.class(kval) == hval, || {
                pool.node_to_formula(node).to_string()
            });
        })?;
        Ok(report)
    }

    /// Checks the validity biconditional: the Heyting value is the top
    /// class exactly when the possibility of the sentence is forced at
    /// every world.
    pub fn verify_diamond_corollary(
        &self,
        a: usize,
        depth: usize,
    ) -> Result<SweepReport, HierarchyError> {
        let hq_top = self.heyting.quotient.top();
        let mut report = SweepReport::default();
        self.sweep(a, depth, |pool, node, kval, hval| {
            let heyting_valid = hval == hq_top;
            let diamond_valid = self.gamma.apply(kval) == self.pstar.one();
            report.record(heyting_valid == diamond_valid, || {
                pool.node_to_formula(node).to_string()
            });
        })?;
        Ok(report)
    }

    /// Re-enumerates the candidate functions for level `a` and checks that
    /// a graph is extensional on the Kripke side exactly when its class
    /// image is extensional on the Heyting side.
    pub fn verify_extensionality_transfer(&self, a: usize) -> Result<LawReport, HierarchyError> {
        if a == 0 || a > self.top_level() {
            return Err(HierarchyError::LevelNotBuilt { level: a, top: self.top_level() });
        }
        let prev = a - 1;
        let m = self.levels[prev].len();
        let q = self.pstar.quantale();
        let hq = &self.heyting.quotient;
        let eq = self.equality_sets(prev)?;
        let (v_fwd, v_bwd) = self.h_extensionality_values(prev)?;

        let mut report = LawReport::new();
        let mut witness = None;
        let mut checked = 0usize;
        for graph in GraphCounter::new(&self.regular_pstar, m) {
            let k_ext =
                (0..m).all(|i| (0..m).all(|j| q.leq(q.prod(graph[i], eq[i][j]), graph[j])));
            let image: Vec<usize> = graph.iter().map(|&v| self.heyting.class(v)).collect();
            let h_ext = (0..m).all(|i| {
                (0..m).all(|j| {
                    let lower = hq.meet(image[i], hq.meet(v_fwd[i][j], v_bwd[i][j]));
                    hq.leq(lower, image[j])
                })
            });
            checked += 1;
            if k_ext != h_ext {
                witness = Some(format!("graph {graph:?}: kripke {k_ext}, heyting {h_ext}"));
                break;
            }
        }
        report.record(
            &format!("extensionality transfers for all {checked} level-{a} candidates"),
            witness,
        );
        Ok(report)
    }

    pub fn snapshot(&self) -> HierarchySnapshot {
        HierarchySnapshot {
            elements: self.elements.clone(),
            levels: self.levels.clone(),
            mem: self.mem.clone(),
            helements: self.helements.clone(),
            hlevels: self.hlevels.clone(),
            hmem: self.hmem.clone(),
            prime: self.prime.clone(),
        }
    }

    /// Restores previously built levels into a freshly constructed
    /// hierarchy over the same frame and conucleus.
    pub fn restore(&mut self, snap: HierarchySnapshot) -> Result<(), HierarchyError> {
        if self.top_level() != 0 {
            return Err(HierarchyError::SnapshotMismatch("hierarchy already has levels".into()));
        }
        let n_el = snap.elements.len();
        if snap.mem.len() != n_el
            || snap.prime.len() != n_el
            || snap.levels.is_empty()
            || snap.hlevels.len() != snap.levels.len()
        {
            return Err(HierarchyError::SnapshotMismatch("inconsistent table sizes".into()));
        }
        for e in &snap.elements {
            for &v in &e.graph {
                if !self.regular_pstar.contains(&v) {
                    return Err(HierarchyError::SnapshotMismatch(format!(
                        "graph value {v} is not a regular element of this P*"
                    )));
                }
            }
        }
        self.elements = snap.elements;
        self.levels = snap.levels;
        self.mem = snap.mem;
        self.helements = snap.helements;
        self.hlevels = snap.hlevels;
        self.hmem = snap.hmem;
        self.prime = snap.prime;
        Ok(())
    }
}

/// Stable name for a hierarchy element used as a formula constant.
pub fn element_name(id: usize) -> String {
    format!("e{id}")
}

/// Serialized level data, cached on disk keyed by the structure hash.
#[derive(Debug, Serialize, Deserialize)]
pub struct HierarchySnapshot {
    pub elements: Vec<KElement>,
    pub levels: Vec<Vec<usize>>,
    pub mem: Vec<Vec<usize>>,
    pub helements: Vec<HElement>,
    pub hlevels: Vec<Vec<usize>>,
    pub hmem: Vec<Vec<usize>>,
    pub prime: Vec<usize>,
}

/// FNV-1a over the frame tables and conucleus table; keys the level cache.
pub fn structure_hash(frame: &SOMonoid, delta: &Conucleus) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    let mut eat = |v: u64| {
        for byte in v.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    };
    eat(frame.n() as u64);
    for x in 0..frame.n() {
        for y in 0..frame.n() {
            eat(frame.leq(x, y) as u64);
            eat(frame.prod(x, y) as u64);
        }
    }
    for &v in delta.table() {
        eat(v as u64);
    }
    h
}

/// Counts through all graphs `positions -> values` in base `values.len()`,
/// lowest position fastest.
struct GraphCounter<'a> {
    values: &'a [usize],
    positions: usize,
    state: Vec<usize>,
    done: bool,
}

impl<'a> GraphCounter<'a> {
    fn new(values: &'a [usize], positions: usize) -> Self {
        GraphCounter {
            values,
            positions,
            state: vec![0; positions],
            done: values.is_empty() && positions > 0,
        }
    }
}

impl Iterator for GraphCounter<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out: Vec<usize> = self.state.iter().map(|&i| self.values[i]).collect();
        if self.positions == 0 {
            self.done = true;
            return Some(out);
        }
        let mut pos = 0;
        loop {
            if pos == self.positions {
                self.done = true;
                break;
            }
            self.state[pos] += 1;
            if self.state[pos] < self.values.len() {
                break;
            }
            self.state[pos] = 0;
            pos += 1;
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{chain_frame_godel, chain_frame_lukasiewicz};

    fn baseline(frame: SOMonoid) -> Hierarchy {
        let delta = Conucleus::identity(&frame);
        Hierarchy::new(frame, delta, 6).unwrap()
    }

    #[test]
    fn non_standard_conucleus_is_refused() {
        let frame = chain_frame_lukasiewicz(3).unwrap();
        let delta = Conucleus::identity(&frame);
        match Hierarchy::new(frame, delta, 6) {
            Err(HierarchyError::NotStandard { flag }) => assert_eq!(flag, "idempotent"),
            other => panic!("expected standardness refusal, got ok={}", other.is_ok()),
        }
    }

    #[test]
    fn heyting_algebra_on_idempotent_frame_is_pstar_itself() {
        let frame = chain_frame_godel(3).unwrap();
        let delta = Conucleus::identity(&frame);
        let build = build_heyting_algebra(&frame, &delta, 6).unwrap();
        // gamma = id, so the dense filter is {1} and the quotient is P*.
        assert_eq!(build.algebra.quotient.n(), build.pstar.len());
        assert!(build.algebra.quotient.is_idempotent());
        assert!(build.report.all_passed());
    }

    #[test]
    fn regular_elements_of_baselines() {
        // On both baselines the regular elements are exactly 0 and 1 of P*.
        for frame in [chain_frame_godel(2).unwrap(), chain_frame_godel(3).unwrap()] {
            let h = baseline(frame);
            assert_eq!(h.regular_pstar(), &[h.pstar().zero(), h.pstar().one()]);
            assert_eq!(h.regular_h().len(), 2);
        }
    }

    #[test]
    fn level_sizes_zero_one_three() {
        for frame in [chain_frame_godel(2).unwrap(), chain_frame_godel(3).unwrap()] {
            let mut h = baseline(frame);
            h.build_to(2, 1_000_000).unwrap();
            assert_eq!(h.level_sizes(), vec![0, 1, 3]);
            assert_eq!(h.heyting_level_sizes(), vec![0, 1, 3]);
        }
    }

    #[test]
    fn level_one_is_the_empty_function() {
        let mut h = baseline(chain_frame_godel(3).unwrap());
        h.build_to(1, 10).unwrap();
        assert_eq!(h.level_sizes(), vec![0, 1]);
        assert!(h.element(0).graph.is_empty());
        // Nothing is a member of the empty set except trivially at oo.
        assert_eq!(h.membership(0, 0), h.pstar().zero());
        assert_eq!(h.h_membership(0, 0), h.heyting().quotient.bottom());
    }

    #[test]
    fn membership_cases_on_two_chain() {
        let mut h = baseline(chain_frame_godel(2).unwrap());
        h.build_to(2, 1_000_000).unwrap();
        let ids = h.level(2).unwrap().to_vec();
        assert_eq!(ids.len(), 3);
        let e = ids[0];
        let zero = h.pstar().zero();
        let one = h.pstar().one();
        let f0 = ids[1..].iter().copied().find(|&f| h.element(f).graph == [zero]).unwrap();
        let f1 = ids[1..].iter().copied().find(|&f| h.element(f).graph == [one]).unwrap();
        // Old-in-new: the value of the graph.
        assert_eq!(h.membership(e, f0), zero);
        assert_eq!(h.membership(e, f1), one);
        // New-in-old (empty domain): the empty join.
        assert_eq!(h.membership(f0, e), zero);
        assert_eq!(h.membership(f1, e), zero);
        // New-in-new.
        assert_eq!(h.membership(f0, f1), one, "empty set belongs to the singleton");
        assert_eq!(h.membership(f1, f1), zero);
        assert_eq!(h.membership(f0, f0), zero);
        assert_eq!(h.membership(f1, f0), zero);
    }

    #[test]
    fn membership_sets_are_strongly_hereditary() {
        for frame in [chain_frame_godel(2).unwrap(), chain_frame_godel(3).unwrap()] {
            let mut h = baseline(frame);
            h.build_to(2, 1_000_000).unwrap();
            for &f in h.level(2).unwrap() {
                for &g in h.level(2).unwrap() {
                    let set = h.pstar().element(h.membership(f, g));
                    assert!(crate::frames::is_strongly_hereditary(h.pstar().frame(), set));
                }
            }
        }
    }

    #[test]
    fn bijection_pairs_by_class_graph() {
        let mut h = baseline(chain_frame_godel(3).unwrap());
        h.build_to(2, 1_000_000).unwrap();
        for &kid in h.level(2).unwrap() {
            let hid = h.prime(kid);
            let image: Vec<usize> =
                h.element(kid).graph.iter().map(|&v| h.heyting().class(v)).collect();
            assert_eq!(h.helement(hid).graph, image);
        }
    }

    #[test]
    fn translation_holds_at_level_two_depth_one() {
        for frame in [chain_frame_godel(2).unwrap(), chain_frame_godel(3).unwrap()] {
            let mut h = baseline(frame);
            h.build_to(2, 1_000_000).unwrap();
            let report = h.verify_translation(2, 1).unwrap();
            assert!(report.passed(), "{:?}", report.examples);
            assert!(report.sentences_checked > 100);
        }
    }

    #[test]
    fn diamond_corollary_holds_at_level_two_depth_one() {
        for frame in [chain_frame_godel(2).unwrap(), chain_frame_godel(3).unwrap()] {
            let mut h = baseline(frame);
            h.build_to(2, 1_000_000).unwrap();
            let report = h.verify_diamond_corollary(2, 1).unwrap();
            assert!(report.passed(), "{:?}", report.examples);
        }
    }

    #[test]
    fn extensionality_transfer_at_built_levels() {
        let mut h = baseline(chain_frame_godel(3).unwrap());
        h.build_to(2, 1_000_000).unwrap();
        for level in 1..=2 {
            let report = h.verify_extensionality_transfer(level).unwrap();
            assert!(report.all_passed(), "level {level}: {report:?}");
        }
    }

    #[test]
    fn budget_refusal_reports_candidates() {
        let mut h = baseline(chain_frame_godel(3).unwrap());
        h.build_to(1, 10).unwrap();
        match h.build_next_level(1) {
            Err(HierarchyError::BudgetExceeded { candidates, budget }) => {
                assert_eq!(candidates, 2);
                assert_eq!(budget, 1);
            }
            other => panic!("expected budget refusal, got ok={}", other.is_ok()),
        }
    }

    #[test]
    fn level_model_membership_atoms_match_tables() {
        let mut h = baseline(chain_frame_godel(3).unwrap());
        h.build_to(2, 1_000_000).unwrap();
        let model = h.level_model(2).unwrap();
        for &f in h.level(2).unwrap() {
            for &g in h.level(2).unwrap() {
                let formula = Formula::mem_cc(element_name(f), element_name(g));
                assert_eq!(model.forcing_set(&formula).unwrap(), h.membership(f, g));
            }
        }
    }

    #[test]
    fn snapshot_round_trip() {
        let frame = chain_frame_godel(3).unwrap();
        let mut h = baseline(frame.clone());
        h.build_to(2, 1_000_000).unwrap();
        let snap = h.snapshot();
        let json = serde_json::to_string(&snap).unwrap();
        let back: HierarchySnapshot = serde_json::from_str(&json).unwrap();
        let mut fresh = baseline(frame);
        fresh.restore(back).unwrap();
        assert_eq!(fresh.level_sizes(), vec![0, 1, 3]);
        assert_eq!(fresh.membership(1, 2), h.membership(1, 2));
        // Restored hierarchies keep building.
        fresh.build_next_level(1_000_000).unwrap();
        assert_eq!(fresh.top_level(), 3);
    }

    #[test]
    fn structure_hash_distinguishes_frames() {
        let g2 = chain_frame_godel(2).unwrap();
        let g3 = chain_frame_godel(3).unwrap();
        let l3 = chain_frame_lukasiewicz(3).unwrap();
        let a = structure_hash(&g2, &Conucleus::identity(&g2));
        let b = structure_hash(&g3, &Conucleus::identity(&g3));
        let c = structure_hash(&l3, &Conucleus::identity(&l3));
        assert_ne!(a, b);
        assert_ne!(b, c);
        // Different conuclei on the same frame hash differently.
        let collapse = Conucleus::new(&g3, vec![0, 0, 2]).unwrap();
        assert_ne!(b, structure_hash(&g3, &collapse));
    }

    #[test]
    fn levels_grow_monotonically() {
        let mut h = baseline(chain_frame_godel(2).unwrap());
        h.build_to(3, 1_000_000).unwrap();
        let sizes = h.level_sizes();
        assert!(sizes.windows(2).all(|w| w[0] <= w[1]), "{sizes:?}");
        if let Some(a) = h.stabilized() {
            assert_eq!(sizes[a], sizes[a + 1]);
        }
    }
}
