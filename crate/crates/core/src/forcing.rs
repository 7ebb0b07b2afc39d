//! Modal residuated Kripke models and their two forcing evaluators.
//!
//! A model is a frame with a conucleus, a finite constant domain, and a
//! strongly hereditary forcing set for every atomic sentence. Sentences are
//! evaluated two ways:
//!
//! * the *definitional* evaluator transcribes the forcing clauses world by
//!   world (existential searches over worlds and witnesses);
//! * the *algebraic* evaluator folds the sentence over the `P*` lattice
//!   (`&` becomes the product, `->` the residual, `<>` the induced nucleus,
//!   quantifiers joins and intersections).
//!
//! The congruence theorem says the two always agree; [`KripkeModel::cross_check`]
//! verifies that over an exhaustive bounded sentence sweep, which is the
//! single most valuable bug signal in the whole workbench. The algebraic
//! path is the production evaluator; the definitional one is the oracle.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::frames::{
    self, Conucleus, FrameError, PStarLattice, SOMonoid, WorldSet, DEFAULT_ENUM_BOUND,
};
use crate::logic::{
    self, desugar, BinOp, Formula, Leaf, ParseError, PoolNode, SentenceBasis, SentencePool, Term,
};
use crate::nuclei::UnaryMap;

#[derive(Debug, Error)]
pub enum ForcingError {
    #[error("atomic sentence `{0}` has no declared forcing set")]
    UnknownAtom(String),
    #[error("constant `{0}` is not in the model domain")]
    UnknownConstant(String),
    #[error("formula has a free variable `{0}`")]
    FreeVariable(String),
    #[error("atomic forcing set for `{atom}` is not strongly hereditary")]
    AtomSetNotHereditary { atom: String },
    #[error("`{0}` is not a valid atomic sentence key")]
    InvalidAtomKey(String),
    #[error("duplicate domain constant `{0}`")]
    DuplicateDomainConstant(String),
    #[error("world `{0}` does not name a frame element")]
    UnknownWorld(String),
    #[error(
        "sweep budget exceeded: about {projected} sentences at this depth (limit {limit}); \
         lower the depth or shrink the atom basis"
    )]
    SweepTooLarge { projected: u128, limit: u128 },
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("malformed model file: {0}")]
    Format(String),
    #[error("cannot read `{path}`: {message}")]
    Io { path: String, message: String },
}

/// Cap on the projected sentence count of an exhaustive sweep; richer atom
/// bases explode combinatorially with depth, so oversized requests are
/// refused up front with the projection.
pub const SWEEP_LIMIT: u128 = 200_000_000;

/// A Kripke model over a frame with a conucleus. Immutable after
/// validation; evaluation is pure.
#[derive(Debug, Clone)]
pub struct KripkeModel {
    frame: SOMonoid,
    delta: Conucleus,
    domain: Vec<String>,
    /// canonical atom text -> index into the `P*` lattice
    atomic: BTreeMap<String, usize>,
    pstar: PStarLattice,
    /// table of the induced nucleus on `P*`
    gamma: UnaryMap,
}

impl KripkeModel {
    pub fn new(
        frame: SOMonoid,
        delta: Conucleus,
        domain: Vec<String>,
        atomic: BTreeMap<String, Vec<usize>>,
        bound: usize,
    ) -> Result<KripkeModel, ForcingError> {
        let pstar = PStarLattice::enumerate(&frame, bound)?;
        let mut sets = BTreeMap::new();
        for (key, worlds) in atomic {
            let mut set = WorldSet::EMPTY;
            for &w in &worlds {
                frame.check_world(w)?;
                set = set.with(w);
            }
            sets.insert(key, set);
        }
        Self::from_parts(frame, delta, domain, sets, pstar)
    }

    /// Builds a model around an already-enumerated `P*` (the hierarchy
    /// constructs one model per level over the same lattice).
    pub fn from_parts(
        frame: SOMonoid,
        delta: Conucleus,
        domain: Vec<String>,
        atomic: BTreeMap<String, WorldSet>,
        pstar: PStarLattice,
    ) -> Result<KripkeModel, ForcingError> {
        let gamma = pstar.gamma_delta(&delta)?;
        for (i, c) in domain.iter().enumerate() {
            if domain[..i].contains(c) {
                return Err(ForcingError::DuplicateDomainConstant(c.clone()));
            }
        }
        let mut atoms = BTreeMap::new();
        for (key, set) in atomic {
            validate_atom_key(&key, &domain)?;
            let idx = pstar
                .index_of(set)
                .ok_or(ForcingError::AtomSetNotHereditary { atom: key.clone() })?;
            atoms.insert(key, idx);
        }
        Ok(KripkeModel { frame, delta, domain, atomic: atoms, pstar, gamma })
    }

    pub fn frame(&self) -> &SOMonoid {
        &self.frame
    }

    pub fn delta(&self) -> &Conucleus {
        &self.delta
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn pstar(&self) -> &PStarLattice {
        &self.pstar
    }

    pub fn gamma(&self) -> &UnaryMap {
        &self.gamma
    }

    pub fn atom_index(&self, key: &str) -> Result<usize, ForcingError> {
        self.atomic.get(key).copied().ok_or_else(|| ForcingError::UnknownAtom(key.to_string()))
    }

    pub fn atom_keys(&self) -> impl Iterator<Item = &str> {
        self.atomic.keys().map(|s| s.as_str())
    }

    pub fn world_by_name(&self, name: &str) -> Result<usize, ForcingError> {
        (0..self.frame.n())
            .find(|&w| self.frame.name(w) == name)
            .ok_or_else(|| ForcingError::UnknownWorld(name.to_string()))
    }

    // -- algebraic evaluator --------------------------------------------

    /// The forcing set of a sentence as a `P*` index, computed bottom-up
    /// over the lattice operations.
    pub fn forcing_set(&self, formula: &Formula) -> Result<usize, ForcingError> {
        let f = desugar(formula);
        if let Some(v) = f.free_vars().into_iter().next() {
            return Err(ForcingError::FreeVariable(v));
        }
        self.alg_index(&f)
    }

    /// The forcing set as a set of worlds.
    pub fn forcing_worlds(&self, formula: &Formula) -> Result<WorldSet, ForcingError> {
        Ok(self.pstar.element(self.forcing_set(formula)?))
    }

    /// True in the model: forced at every world.
    pub fn is_true(&self, formula: &Formula) -> Result<bool, ForcingError> {
        Ok(self.forcing_set(formula)? == self.pstar.one())
    }

    fn alg_index(&self, f: &Formula) -> Result<usize, ForcingError> {
        let q = self.pstar.quantale();
        Ok(match f {
            Formula::Bot => self.pstar.zero(),
            Formula::Letter(s) => self.atom_index(s)?,
            Formula::Mem(t, u) => self.atom_index(&mem_key(t, u)?)?,
            Formula::StrongAnd(a, b) => q.prod(self.alg_index(a)?, self.alg_index(b)?),
            Formula::WeakAnd(a, b) => q.meet(self.alg_index(a)?, self.alg_index(b)?),
            Formula::Or(a, b) => q.join(self.alg_index(a)?, self.alg_index(b)?),
            Formula::Imp(a, b) => q.residual(self.alg_index(a)?, self.alg_index(b)?),
            Formula::RevImp(a, b) => q.residual(self.alg_index(b)?, self.alg_index(a)?),
            Formula::Diamond(a) => self.gamma.apply(self.alg_index(a)?),
            Formula::Exists(v, body) => {
                let mut acc = self.pstar.zero();
                for d in &self.domain {
                    acc = q.join(acc, self.alg_index(&logic::substitute(body, v, d))?);
                }
                acc
            }
            Formula::Forall(v, body) => {
                let mut acc = self.pstar.one();
                for d in &self.domain {
                    acc = q.meet(acc, self.alg_index(&logic::substitute(body, v, d))?);
                }
                acc
            }
            Formula::Top | Formula::Neg(_) | Formula::Equiv(..) | Formula::Eq(..) => {
                unreachable!("desugared before evaluation")
            }
        })
    }

    // -- definitional evaluator --------------------------------------------

    /// The set of worlds forcing a sentence, computed clause by clause.
    pub fn forcing_mask_definitional(&self, formula: &Formula) -> Result<WorldSet, ForcingError> {
        let f = desugar(formula);
        if let Some(v) = f.free_vars().into_iter().next() {
            return Err(ForcingError::FreeVariable(v));
        }
        self.def_mask(&f)
    }

    /// Forcing at a single world, via the definitional clauses.
    pub fn forces(&self, world: usize, formula: &Formula) -> Result<bool, ForcingError> {
        self.frame.check_world(world)?;
        Ok(self.forcing_mask_definitional(formula)?.contains(world))
    }

    fn def_mask(&self, f: &Formula) -> Result<WorldSet, ForcingError> {
        Ok(match f {
            Formula::Bot => WorldSet::singleton(self.frame.infinity()),
            Formula::Letter(s) => self.pstar.element(self.atom_index(s)?),
            Formula::Mem(t, u) => self.pstar.element(self.atom_index(&mem_key(t, u)?)?),
            Formula::StrongAnd(a, b) => {
                def_strong_and(&self.frame, self.def_mask(a)?, self.def_mask(b)?)
            }
            Formula::WeakAnd(a, b) => self.def_mask(a)?.intersect(self.def_mask(b)?),
            Formula::Or(a, b) => def_or(&self.frame, self.def_mask(a)?, self.def_mask(b)?),
            Formula::Imp(a, b) => def_imp(&self.frame, self.def_mask(a)?, self.def_mask(b)?),
            Formula::RevImp(a, b) => def_imp(&self.frame, self.def_mask(b)?, self.def_mask(a)?),
            Formula::Diamond(a) => def_diamond(&self.frame, &self.delta, self.def_mask(a)?),
            Formula::Exists(v, body) => {
                let mut masks = Vec::with_capacity(self.domain.len());
                for d in &self.domain {
                    masks.push(self.def_mask(&logic::substitute(body, v, d))?);
                }
                def_exists(&self.frame, &masks)
            }
            Formula::Forall(v, body) => {
                let mut acc = WorldSet::full(self.frame.n());
                for d in &self.domain {
                    acc = acc.intersect(self.def_mask(&logic::substitute(body, v, d))?);
                }
                acc
            }
            Formula::Top | Formula::Neg(_) | Formula::Equiv(..) | Formula::Eq(..) => {
                unreachable!("desugared before evaluation")
            }
        })
    }

    // -- cross-check --------------------------------------------------------

    /// The sentence basis this model supports: its letters, plus membership
    /// atoms when a forcing set is declared for every ordered pair of
    /// constants.
    pub fn sentence_basis(&self, include_forall: bool) -> SentenceBasis {
        let mut letters = Vec::new();
        for key in self.atomic.keys() {
            if let Ok(Formula::Letter(s)) = logic::parse(key) {
                letters.push(s);
            }
        }
        let membership = !self.domain.is_empty()
            && self.domain.iter().all(|a| {
                self.domain.iter().all(|b| self.atomic.contains_key(&format!("{a} in {b}")))
            });
        let mut var = "x".to_string();
        while self.domain.contains(&var) || letters.contains(&var) {
            var.push('_');
        }
        SentenceBasis { letters, constants: self.domain.clone(), membership, include_forall, var }
    }

    /// Runs both evaluators over every sentence of depth <= `depth` and
    /// reports disagreements. The congruence theorem guarantees equality, so
    /// any mismatch indicates a bug.
    pub fn cross_check(&self, depth: usize) -> Result<CrossCheckReport, ForcingError> {
        let basis = self.sentence_basis(true);
        self.cross_check_with(&basis, depth)
    }

    pub fn cross_check_with(
        &self,
        basis: &SentenceBasis,
        depth: usize,
    ) -> Result<CrossCheckReport, ForcingError> {
        let projected = logic::projected_nodes(basis, depth);
        if projected > SWEEP_LIMIT {
            return Err(ForcingError::SweepTooLarge { projected, limit: SWEEP_LIMIT });
        }
        let store = depth.saturating_sub(1);
        let pool = SentencePool::build(basis, store);
        let inst = basis.constants.len().max(1);

        let mut defs: Vec<Vec<WorldSet>> = Vec::with_capacity(pool.len());
        let mut algs: Vec<Vec<usize>> = Vec::with_capacity(pool.len());
        let mut report = CrossCheckReport::default();

        for idx in 0..pool.len() {
            let node = pool.nodes()[idx];
            let (d, a) = self.eval_node(basis, node, inst, &defs, &algs)?;
            if !pool.meta(idx).open {
                self.compare(&pool, node, &d, &a, &mut report);
            }
            defs.push(d);
            algs.push(a);
        }
        if depth > 0 {
            pool.for_each_final(|node, meta| {
                let (d, a) = self
                    .eval_node(basis, node, inst, &defs, &algs)
                    .expect("leaves were resolved in the stored pass");
                if !meta.open {
                    self.compare(&pool, node, &d, &a, &mut report);
                }
            });
        }
        Ok(report)
    }

    fn compare(
        &self,
        pool: &SentencePool,
        node: PoolNode,
        defs: &[WorldSet],
        algs: &[usize],
        report: &mut CrossCheckReport,
    ) {
        report.sentences_checked += 1;
        let def = defs[0];
        let alg = self.pstar.element(algs[0]);
        if def != alg {
            report.mismatch_count += 1;
            if report.mismatches.len() < CrossCheckReport::KEPT {
                report.mismatches.push(Mismatch {
                    sentence: pool.node_to_formula(node).to_string(),
                    definitional: self.world_names(def),
                    algebraic: self.world_names(alg),
                });
            }
        }
    }

    fn world_names(&self, set: WorldSet) -> Vec<String> {
        set.iter().map(|w| self.frame.name(w).to_string()).collect()
    }

    /// One evaluation step for a pool node: value per instance, on both
    /// evaluators. Only leaves can fail (undeclared atoms).
    fn eval_node(
        &self,
        basis: &SentenceBasis,
        node: PoolNode,
        inst: usize,
        defs: &[Vec<WorldSet>],
        algs: &[Vec<usize>],
    ) -> Result<(Vec<WorldSet>, Vec<usize>), ForcingError> {
        let q = self.pstar.quantale();
        let k = basis.constants.len();
        let slot = |i: usize| i.min(k.saturating_sub(1));
        Ok(match node {
            PoolNode::Leaf(leaf) => {
                let mut d = Vec::with_capacity(inst);
                let mut a = Vec::with_capacity(inst);
                for i in 0..inst {
                    let idx = match leaf {
                        Leaf::Bot => self.pstar.zero(),
                        Leaf::Letter(l) => self.atom_index(&basis.letters[l as usize])?,
                        Leaf::MemCC(x, y) => self.atom_index(&format!(
                            "{} in {}",
                            basis.constants[x as usize], basis.constants[y as usize]
                        ))?,
                        Leaf::MemXC(c) => self.atom_index(&format!(
                            "{} in {}",
                            basis.constants[slot(i)], basis.constants[c as usize]
                        ))?,
                        Leaf::MemCX(c) => self.atom_index(&format!(
                            "{} in {}",
                            basis.constants[c as usize],
                            basis.constants[slot(i)]
                        ))?,
                        Leaf::MemXX => {
                            let dname = &basis.constants[slot(i)];
                            self.atom_index(&format!("{dname} in {dname}"))?
                        }
                    };
                    d.push(self.pstar.element(idx));
                    a.push(idx);
                }
                (d, a)
            }
            PoolNode::Bin(op, l, r) => {
                let (dl, dr) = (&defs[l as usize], &defs[r as usize]);
                let (al, ar) = (&algs[l as usize], &algs[r as usize]);
                let mut d = Vec::with_capacity(inst);
                let mut a = Vec::with_capacity(inst);
                for i in 0..inst {
                    let (dv, av) = match op {
                        BinOp::StrongAnd => {
                            (def_strong_and(&self.frame, dl[i], dr[i]), q.prod(al[i], ar[i]))
                        }
                        BinOp::WeakAnd => (dl[i].intersect(dr[i]), q.meet(al[i], ar[i])),
                        BinOp::Or => (def_or(&self.frame, dl[i], dr[i]), q.join(al[i], ar[i])),
                        BinOp::Imp => {
                            (def_imp(&self.frame, dl[i], dr[i]), q.residual(al[i], ar[i]))
                        }
                    };
                    d.push(dv);
                    a.push(av);
                }
                (d, a)
            }
            PoolNode::Diamond(l) => {
                let (dl, al) = (&defs[l as usize], &algs[l as usize]);
                let mut d = Vec::with_capacity(inst);
                let mut a = Vec::with_capacity(inst);
                for i in 0..inst {
                    d.push(def_diamond(&self.frame, &self.delta, dl[i]));
                    a.push(self.gamma.apply(al[i]));
                }
                (d, a)
            }
            PoolNode::Exists(l) => {
                let dv = def_exists(&self.frame, &defs[l as usize][..k.min(inst)]);
                let av = algs[l as usize][..k]
                    .iter()
                    .fold(self.pstar.zero(), |acc, &v| q.join(acc, v));
                (vec![dv; inst], vec![av; inst])
            }
            PoolNode::Forall(l) => {
                let mut dv = WorldSet::full(self.frame.n());
                let mut av = self.pstar.one();
                for i in 0..k {
                    dv = dv.intersect(defs[l as usize][i]);
                    av = q.meet(av, algs[l as usize][i]);
                }
                (vec![dv; inst], vec![av; inst])
            }
        })
    }
}

fn mem_key(t: &Term, u: &Term) -> Result<String, ForcingError> {
    match (t, u) {
        (Term::Const(a), Term::Const(b)) => Ok(format!("{a} in {b}")),
        (Term::Var(v), _) | (_, Term::Var(v)) => Err(ForcingError::FreeVariable(v.clone())),
    }
}

fn validate_atom_key(key: &str, domain: &[String]) -> Result<(), ForcingError> {
    let parsed = logic::parse(key).map_err(|_| ForcingError::InvalidAtomKey(key.to_string()))?;
    match parsed {
        Formula::Letter(_) => Ok(()),
        Formula::Mem(Term::Const(a), Term::Const(b)) => {
            for c in [a, b] {
                if !domain.contains(&c) {
                    return Err(ForcingError::UnknownConstant(c));
                }
            }
            Ok(())
        }
        _ => Err(ForcingError::InvalidAtomKey(key.to_string())),
    }
}

// -- forcing clauses, world by world ----------------------------------------

/// `p` forces `a & b` iff there are `q` forcing `a` and `r` forcing `b`
/// with `q*r <= p`.
pub fn def_strong_and(frame: &SOMonoid, ma: WorldSet, mb: WorldSet) -> WorldSet {
    let mut out = WorldSet::EMPTY;
    'world: for p in 0..frame.n() {
        for q in ma.iter() {
            for r in mb.iter() {
                if frame.leq(frame.prod(q, r), p) {
                    out = out.with(p);
                    continue 'world;
                }
            }
        }
    }
    out
}

/// `p` forces `a \/ b` iff there are `q, r`, each forcing `a` or `b`, with
/// `q meet r <= p`.
pub fn def_or(frame: &SOMonoid, ma: WorldSet, mb: WorldSet) -> WorldSet {
    let u = ma.union(mb);
    let mut out = WorldSet::EMPTY;
    'world: for p in 0..frame.n() {
        for q in u.iter() {
            for r in u.iter() {
                if frame.leq(frame.meet(q, r), p) {
                    out = out.with(p);
                    continue 'world;
                }
            }
        }
    }
    out
}

/// `p` forces `a -> b` iff for all `q` forcing `a` and all `r` with
/// `p*q <= r`, `r` forces `b`.
pub fn def_imp(frame: &SOMonoid, ma: WorldSet, mb: WorldSet) -> WorldSet {
    let mut out = WorldSet::EMPTY;
    'world: for p in 0..frame.n() {
        for q in ma.iter() {
            for r in 0..frame.n() {
                if frame.leq(frame.prod(p, q), r) && !mb.contains(r) {
                    continue 'world;
                }
            }
        }
        out = out.with(p);
    }
    out
}

/// `p` forces `<>a` iff some `q` forces `a` with `d(q) <= p`.
pub fn def_diamond(frame: &SOMonoid, delta: &Conucleus, ma: WorldSet) -> WorldSet {
    let mut out = WorldSet::EMPTY;
    for p in 0..frame.n() {
        if ma.iter().any(|q| frame.leq(delta.apply(q), p)) {
            out = out.with(p);
        }
    }
    out
}

/// `p` forces `exists x.a` iff some family of instance witnesses
/// `(d_i, q_i)` has `meet q_i <= p`. Every subset meet is bounded below by
/// the meet of the full witness set, so the full set decides; with no
/// witnesses only `oo` forces (the empty family).
pub fn def_exists(frame: &SOMonoid, instance_masks: &[WorldSet]) -> WorldSet {
    let witnesses = instance_masks.iter().fold(WorldSet::EMPTY, |s, &m| s.union(m));
    match frame.meet_of(witnesses) {
        None => WorldSet::singleton(frame.infinity()),
        Some(least) => {
            let mut out = WorldSet::EMPTY;
            for p in 0..frame.n() {
                if frame.leq(least, p) {
                    out = out.with(p);
                }
            }
            out
        }
    }
}

/// Result of a definitional/algebraic sweep.
#[derive(Debug, Default, Clone)]
pub struct CrossCheckReport {
    pub sentences_checked: usize,
    pub mismatch_count: usize,
    /// First few mismatches, for diagnostics and replay.
    pub mismatches: Vec<Mismatch>,
}

impl CrossCheckReport {
    const KEPT: usize = 5;

    pub fn passed(&self) -> bool {
        self.mismatch_count == 0
    }
}

#[derive(Debug, Clone)]
pub struct Mismatch {
    pub sentence: String,
    pub definitional: Vec<String>,
    pub algebraic: Vec<String>,
}

// -- model files --------------------------------------------------------------

#[derive(Debug, Deserialize)]
struct RawModel {
    frame: serde_json::Value,
    #[serde(default)]
    delta: Option<Vec<usize>>,
    #[serde(default)]
    domain: Vec<String>,
    #[serde(default)]
    atomic: BTreeMap<String, Vec<usize>>,
    #[serde(default)]
    bound: Option<usize>,
}

/// Loads a model file. The `frame` field is either an inline frame object,
/// a builtin frame name, or a path relative to `base`. The conucleus
/// defaults to the frame file's table, then to the identity.
pub fn load_model_str(text: &str, base: Option<&Path>) -> Result<KripkeModel, ForcingError> {
    let raw: RawModel =
        serde_json::from_str(text).map_err(|e| ForcingError::Format(e.to_string()))?;
    let (frame, file_conucleus) = resolve_frame(&raw.frame, base)?;
    let delta = match raw.delta.or(file_conucleus) {
        Some(table) => Conucleus::new(&frame, table)?,
        None => Conucleus::identity(&frame),
    };
    let bound = raw.bound.unwrap_or(DEFAULT_ENUM_BOUND);
    KripkeModel::new(frame, delta, raw.domain, raw.atomic, bound)
}

pub fn load_model_path(path: &Path) -> Result<KripkeModel, ForcingError> {
    let text = std::fs::read_to_string(path).map_err(|e| ForcingError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    load_model_str(&text, path.parent())
}

fn resolve_frame(
    value: &serde_json::Value,
    base: Option<&Path>,
) -> Result<(SOMonoid, Option<Vec<usize>>), ForcingError> {
    match value {
        serde_json::Value::String(s) => {
            if let Ok(frame) = frames::frame_by_name(s) {
                return Ok((frame, None));
            }
            let path = match base {
                Some(dir) => dir.join(s),
                None => Path::new(s).to_path_buf(),
            };
            let text = std::fs::read_to_string(&path).map_err(|e| ForcingError::Io {
                path: path.display().to_string(),
                message: format!("{e} (and `{s}` is not a builtin frame name)"),
            })?;
            let file = frames::load_frame(&text)?;
            Ok((file.frame, file.conucleus))
        }
        obj @ serde_json::Value::Object(_) => {
            let file = frames::load_frame(&obj.to_string())?;
            Ok((file.frame, file.conucleus))
        }
        other => Err(ForcingError::Format(format!(
            "`frame` must be a name, path, or inline object, got {other}"
        ))),
    }
}
