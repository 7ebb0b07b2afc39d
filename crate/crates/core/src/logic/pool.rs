//! Bounded, exhaustive sentence enumeration with structural sharing.
//!
//! Sentences up to a connective depth are generated level by level as a
//! node pool: each node is a connective applied to earlier node indices, so
//! consumers can evaluate the whole space bottom-up with one value slot per
//! node instead of re-walking millions of trees. The deepest level is never
//! stored; it is streamed combination by combination.
//!
//! Nodes with a free occurrence of the quantifier variable are `open`; they
//! are not sentences themselves but feed the quantifier nodes. Quantifiers
//! only wrap quantifier-free nodes, which keeps every generated sentence
//! well-scoped with the single variable.

use super::{Formula, Term};

/// The atomic inventory a sentence space is built from.
#[derive(Debug, Clone, Default)]
pub struct SentenceBasis {
    pub letters: Vec<String>,
    /// Domain constants, used for membership atoms and quantifier
    /// instantiation.
    pub constants: Vec<String>,
    /// Include membership atoms over the constants and the variable.
    pub membership: bool,
    /// Include the universal quantifier (off for universal-free sweeps).
    pub include_forall: bool,
    /// Name of the single quantified variable.
    pub var: String,
}

impl SentenceBasis {
    pub fn propositional(letters: Vec<String>, constants: Vec<String>) -> SentenceBasis {
        SentenceBasis {
            letters,
            constants,
            membership: false,
            include_forall: true,
            var: "x".to_string(),
        }
    }

    pub fn membership(constants: Vec<String>, include_forall: bool) -> SentenceBasis {
        SentenceBasis {
            letters: Vec::new(),
            constants,
            membership: true,
            include_forall,
            var: "x".to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Leaf {
    Bot,
    Letter(u32),
    /// `constants[a] in constants[b]`
    MemCC(u32, u32),
    /// `var in constants[c]`
    MemXC(u32),
    /// `constants[c] in var`
    MemCX(u32),
    /// `var in var`
    MemXX,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    StrongAnd,
    WeakAnd,
    Or,
    Imp,
}

pub const BIN_OPS: [BinOp; 4] = [BinOp::StrongAnd, BinOp::WeakAnd, BinOp::Or, BinOp::Imp];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoolNode {
    Leaf(Leaf),
    Bin(BinOp, u32, u32),
    Diamond(u32),
    Exists(u32),
    Forall(u32),
}

#[derive(Debug, Clone, Copy)]
pub struct NodeMeta {
    /// The quantifier variable occurs free.
    pub open: bool,
    /// Some quantifier occurs inside (such nodes cannot be re-quantified).
    pub has_quantifier: bool,
}

#[derive(Debug)]
pub struct SentencePool {
    basis: SentenceBasis,
    nodes: Vec<PoolNode>,
    meta: Vec<NodeMeta>,
    /// `level_end[d]` = number of nodes of depth <= d.
    level_end: Vec<usize>,
}

impl SentencePool {
    /// Builds and stores all nodes of depth <= `store_depth`.
    pub fn build(basis: &SentenceBasis, store_depth: usize) -> SentencePool {
        let mut pool = SentencePool {
            basis: basis.clone(),
            nodes: Vec::new(),
            meta: Vec::new(),
            level_end: Vec::new(),
        };
        pool.push(PoolNode::Leaf(Leaf::Bot));
        for i in 0..basis.letters.len() {
            pool.push(PoolNode::Leaf(Leaf::Letter(i as u32)));
        }
        if basis.membership {
            let k = basis.constants.len() as u32;
            for a in 0..k {
                for b in 0..k {
                    pool.push(PoolNode::Leaf(Leaf::MemCC(a, b)));
                }
            }
            for c in 0..k {
                pool.push(PoolNode::Leaf(Leaf::MemXC(c)));
            }
            for c in 0..k {
                pool.push(PoolNode::Leaf(Leaf::MemCX(c)));
            }
            pool.push(PoolNode::Leaf(Leaf::MemXX));
        }
        pool.level_end.push(pool.nodes.len());

        for d in 1..=store_depth {
            let prev_end = pool.level_end[d - 1];
            let prev_prev = if d >= 2 { pool.level_end[d - 2] } else { 0 };
            for op in BIN_OPS {
                for l in 0..prev_end {
                    for r in 0..prev_end {
                        if l < prev_prev && r < prev_prev {
                            continue; // both shallow: generated at an earlier level
                        }
                        pool.push(PoolNode::Bin(op, l as u32, r as u32));
                    }
                }
            }
            for l in prev_prev..prev_end {
                pool.push(PoolNode::Diamond(l as u32));
            }
            for l in prev_prev..prev_end {
                if !pool.meta[l].has_quantifier {
                    pool.push(PoolNode::Exists(l as u32));
                }
            }
            if basis.include_forall {
                for l in prev_prev..prev_end {
                    if !pool.meta[l].has_quantifier {
                        pool.push(PoolNode::Forall(l as u32));
                    }
                }
            }
            pool.level_end.push(pool.nodes.len());
        }
        pool
    }

    fn push(&mut self, node: PoolNode) {
        let meta = match node {
            PoolNode::Leaf(leaf) => NodeMeta {
                open: matches!(leaf, Leaf::MemXC(_) | Leaf::MemCX(_) | Leaf::MemXX),
                has_quantifier: false,
            },
            PoolNode::Bin(_, l, r) => NodeMeta {
                open: self.meta[l as usize].open || self.meta[r as usize].open,
                has_quantifier: self.meta[l as usize].has_quantifier
                    || self.meta[r as usize].has_quantifier,
            },
            PoolNode::Diamond(l) => self.meta[l as usize],
            PoolNode::Exists(_) | PoolNode::Forall(_) => {
                NodeMeta { open: false, has_quantifier: true }
            }
        };
        self.nodes.push(node);
        self.meta.push(meta);
    }

    pub fn basis(&self) -> &SentenceBasis {
        &self.basis
    }

    pub fn nodes(&self) -> &[PoolNode] {
        &self.nodes
    }

    pub fn meta(&self, idx: usize) -> NodeMeta {
        self.meta[idx]
    }

    pub fn stored_depth(&self) -> usize {
        self.level_end.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Streams the nodes of depth `stored_depth() + 1` without storing
    /// them; children point into the stored pool.
    pub fn for_each_final(&self, mut f: impl FnMut(PoolNode, NodeMeta)) {
        let d = self.stored_depth() + 1;
        let prev_end = self.level_end[d - 1];
        let prev_prev = if d >= 2 { self.level_end[d - 2] } else { 0 };
        for op in BIN_OPS {
            for l in 0..prev_end {
                for r in 0..prev_end {
                    if l < prev_prev && r < prev_prev {
                        continue;
                    }
                    let meta = NodeMeta {
                        open: self.meta[l].open || self.meta[r].open,
                        has_quantifier: self.meta[l].has_quantifier || self.meta[r].has_quantifier,
                    };
                    f(PoolNode::Bin(op, l as u32, r as u32), meta);
                }
            }
        }
        for l in prev_prev..prev_end {
            f(PoolNode::Diamond(l as u32), self.meta[l]);
        }
        for l in prev_prev..prev_end {
            if !self.meta[l].has_quantifier {
                f(PoolNode::Exists(l as u32), NodeMeta { open: false, has_quantifier: true });
            }
        }
        if self.basis.include_forall {
            for l in prev_prev..prev_end {
                if !self.meta[l].has_quantifier {
                    f(PoolNode::Forall(l as u32), NodeMeta { open: false, has_quantifier: true });
                }
            }
        }
    }

    pub fn node_to_formula(&self, node: PoolNode) -> Formula {
        let var = || Term::Var(self.basis.var.clone());
        let konst = |i: u32| Term::Const(self.basis.constants[i as usize].clone());
        match node {
            PoolNode::Leaf(Leaf::Bot) => Formula::Bot,
            PoolNode::Leaf(Leaf::Letter(i)) => {
                Formula::Letter(self.basis.letters[i as usize].clone())
            }
            PoolNode::Leaf(Leaf::MemCC(a, b)) => Formula::Mem(konst(a), konst(b)),
            PoolNode::Leaf(Leaf::MemXC(c)) => Formula::Mem(var(), konst(c)),
            PoolNode::Leaf(Leaf::MemCX(c)) => Formula::Mem(konst(c), var()),
            PoolNode::Leaf(Leaf::MemXX) => Formula::Mem(var(), var()),
            PoolNode::Bin(op, l, r) => {
                let a = self.to_formula(l as usize);
                let b = self.to_formula(r as usize);
                match op {
                    BinOp::StrongAnd => Formula::sand(a, b),
                    BinOp::WeakAnd => Formula::wand(a, b),
                    BinOp::Or => Formula::or(a, b),
                    BinOp::Imp => Formula::imp(a, b),
                }
            }
            PoolNode::Diamond(l) => Formula::diamond(self.to_formula(l as usize)),
            PoolNode::Exists(l) => {
                Formula::exists(self.basis.var.clone(), self.to_formula(l as usize))
            }
            PoolNode::Forall(l) => {
                Formula::forall(self.basis.var.clone(), self.to_formula(l as usize))
            }
        }
    }

    pub fn to_formula(&self, idx: usize) -> Formula {
        self.node_to_formula(self.nodes[idx])
    }
}

/// Upper bound on the number of nodes of depth <= `depth` over a basis
/// (treats every node as quantifiable, so it slightly overcounts).
/// Saturates instead of overflowing.
pub fn projected_nodes(basis: &SentenceBasis, depth: usize) -> u128 {
    let k = basis.constants.len() as u128;
    let mut leaves = 1 + basis.letters.len() as u128;
    if basis.membership {
        leaves += k * k + 2 * k + 1;
    }
    let unaries: u128 = if basis.include_forall { 3 } else { 2 };
    let mut prev_prev: u128 = 0;
    let mut prev = leaves;
    for _ in 0..depth {
        let new = 4u128
            .saturating_mul(prev.saturating_mul(prev).saturating_sub(prev_prev * prev_prev))
            .saturating_add(unaries.saturating_mul(prev - prev_prev));
        prev_prev = prev;
        prev = prev.saturating_add(new);
    }
    prev
}

/// Calls `f` on every sentence (closed formula) of depth <= `max_depth`,
/// in a deterministic duplicate-free order. Memory stays bounded by the
/// next-to-last level.
pub fn for_each_sentence(basis: &SentenceBasis, max_depth: usize, mut f: impl FnMut(Formula)) {
    let store = max_depth.saturating_sub(1);
    let pool = SentencePool::build(basis, store);
    for idx in 0..pool.len() {
        if !pool.meta(idx).open {
            f(pool.to_formula(idx));
        }
    }
    if max_depth > 0 {
        pool.for_each_final(|node, meta| {
            if !meta.open {
                f(pool.node_to_formula(node));
            }
        });
    }
}

/// Materializes the sentence stream; intended for small depths.
pub fn enumerate_sentences(basis: &SentenceBasis, max_depth: usize) -> Vec<Formula> {
    let mut out = Vec::new();
    for_each_sentence(basis, max_depth, |f| out.push(f));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn letter_basis() -> SentenceBasis {
        SentenceBasis::propositional(vec!["a".into()], vec!["d".into()])
    }

    #[test]
    fn depth_zero_counts() {
        let sentences = enumerate_sentences(&letter_basis(), 0);
        assert_eq!(sentences.len(), 2); // bot, a
    }

    #[test]
    fn depth_one_counts() {
        // 2 leaves; new: 4 ops * 4 pairs + diamond*2 + exists*2 + forall*2.
        let sentences = enumerate_sentences(&letter_basis(), 1);
        assert_eq!(sentences.len(), 2 + 16 + 6);
    }

    #[test]
    fn stream_is_duplicate_free_and_depth_bounded() {
        for depth in 0..=2 {
            let sentences = enumerate_sentences(&letter_basis(), depth);
            let mut seen = HashSet::new();
            for s in &sentences {
                assert!(s.depth() <= depth, "{s} too deep");
                assert!(s.is_sentence(), "{s} has free variables");
                assert!(super::super::is_desugared(s), "{s} has sugar");
                assert!(seen.insert(s.clone()), "duplicate {s}");
            }
        }
    }

    #[test]
    fn membership_basis_generates_open_and_closed_atoms() {
        let basis = SentenceBasis::membership(vec!["g".into(), "h".into()], false);
        let zero = enumerate_sentences(&basis, 0);
        // Closed atoms only: bot + 4 constant-constant memberships.
        assert_eq!(zero.len(), 5);
        let one = enumerate_sentences(&basis, 1);
        // Quantified atoms appear at depth 1 and there is no forall.
        assert!(one.iter().any(|f| matches!(f, Formula::Exists(..))));
        assert!(!one.iter().any(|f| matches!(f, Formula::Forall(..))));
        assert!(one.iter().any(|f| f.to_string() == "exists x . x in g"));
    }

    #[test]
    fn quantifiers_never_nest_over_quantifiers() {
        let basis = SentenceBasis::membership(vec!["g".into()], true);
        for s in enumerate_sentences(&basis, 2) {
            fn no_shadow(f: &Formula, inside: bool) -> bool {
                match f {
                    Formula::Exists(_, a) | Formula::Forall(_, a) => !inside && no_shadow(a, true),
                    Formula::Neg(a) | Formula::Diamond(a) => no_shadow(a, inside),
                    Formula::StrongAnd(a, b)
                    | Formula::WeakAnd(a, b)
                    | Formula::Or(a, b)
                    | Formula::Imp(a, b)
                    | Formula::RevImp(a, b)
                    | Formula::Equiv(a, b) => no_shadow(a, inside) && no_shadow(b, inside),
                    _ => true,
                }
            }
            assert!(no_shadow(&s, false), "{s}");
        }
    }

    #[test]
    fn final_level_matches_stored_level() {
        // Building to depth d and streaming must agree with building to
        // depth d directly.
        let basis = letter_basis();
        let direct: Vec<Formula> = {
            let pool = SentencePool::build(&basis, 2);
            (0..pool.len())
                .filter(|&i| !pool.meta(i).open)
                .map(|i| pool.to_formula(i))
                .collect()
        };
        let streamed = enumerate_sentences(&basis, 2);
        assert_eq!(direct.len(), streamed.len());
        let a: HashSet<_> = direct.into_iter().collect();
        let b: HashSet<_> = streamed.into_iter().collect();
        assert_eq!(a, b);
    }

    #[test]
    fn deterministic_order() {
        let a = enumerate_sentences(&letter_basis(), 2);
        let b = enumerate_sentences(&letter_basis(), 2);
        assert_eq!(a, b);
    }
}
