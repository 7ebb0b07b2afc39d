//! Closure operators, quantic nuclei, filters, and quotient algebras.
//!
//! A quantic nucleus is an expansive, idempotent, monotone self-map with
//! `g(x)*g(y) <= g(x*y)`. Its dense filter `{x : g(x) = 1}` induces a
//! congruence whose quotient collapses to a Heyting algebra whenever the
//! nucleus is idempotent with respect to products and respects implications.

use thiserror::Error;

use crate::algebra::{AlgebraError, Quantale};
use crate::report::{LawCheck, LawReport, SweepConfig};

#[derive(Debug, Error)]
pub enum NucleiError {
    #[error("map table has length {len}, expected {n}")]
    BadTableLength { len: usize, n: usize },
    #[error("map table entry {value} out of range (carrier size {n})")]
    TableOutOfRange { value: usize, n: usize },
    #[error("filter must be nonempty")]
    EmptyFilter,
    #[error("filter is not upward closed at `{0}` <= `{1}`")]
    FilterNotUpwardClosed(String, String),
    #[error("filter is not closed under products at (`{0}`, `{1}`)")]
    FilterNotProductClosed(String, String),
    #[error("map is not a quantic nucleus: {0}")]
    NotANucleus(String),
    #[error("enumeration bound exceeded: carrier size {n} > bound {bound} ({candidates} candidate maps)")]
    BoundExceeded { n: usize, bound: usize, candidates: u128 },
    #[error("quotient operation `{op}` is ill-defined on classes of `{x}` and `{y}`")]
    IllDefinedQuotient { op: &'static str, x: String, y: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// A total self-map on a quantale carrier, stored as a lookup table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnaryMap {
    table: Vec<usize>,
}

impl UnaryMap {
    pub fn new(q: &Quantale, table: Vec<usize>) -> Result<UnaryMap, NucleiError> {
        if table.len() != q.n() {
            return Err(NucleiError::BadTableLength { len: table.len(), n: q.n() });
        }
        if let Some(&v) = table.iter().find(|&&v| v >= q.n()) {
            return Err(NucleiError::TableOutOfRange { value: v, n: q.n() });
        }
        Ok(UnaryMap { table })
    }

    pub fn identity(n: usize) -> UnaryMap {
        UnaryMap { table: (0..n).collect() }
    }

    pub fn constant(n: usize, value: usize) -> UnaryMap {
        UnaryMap { table: vec![value; n] }
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.table[x]
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }
}

/// Expansivity, idempotency under composition, and monotonicity.
pub fn is_closure_operator(q: &Quantale, m: &UnaryMap) -> bool {
    let n = q.n();
    (0..n).all(|x| q.leq(x, m.apply(x)))
        && (0..n).all(|x| m.apply(m.apply(x)) == m.apply(x))
        && (0..n).all(|x| (0..n).all(|y| !q.leq(x, y) || q.leq(m.apply(x), m.apply(y))))
}

/// A closure operator with `g(x)*g(y) <= g(x*y)` for all pairs.
pub fn is_quantic_nucleus(q: &Quantale, m: &UnaryMap) -> bool {
    is_closure_operator(q, m)
        && (0..q.n()).all(|x| {
            (0..q.n()).all(|y| q.leq(q.prod(m.apply(x), m.apply(y)), m.apply(q.prod(x, y))))
        })
}

/// The identity `g(x) -> g(y) = x -> g(y)`, which holds for exactly the
/// quantic nuclei.
pub fn check_nucleus_characterization(q: &Quantale, m: &UnaryMap) -> bool {
    (0..q.n()).all(|x| {
        (0..q.n()).all(|y| {
            q.residual(m.apply(x), m.apply(y)) == q.residual(x, m.apply(y))
        })
    })
}

/// The double-negation map `x -> ~~x`.
pub fn double_negation(q: &Quantale) -> UnaryMap {
    UnaryMap { table: (0..q.n()).map(|x| q.neg(q.neg(x))).collect() }
}

/// The quantale of fixed points of a nucleus, with product `g(x*y)`, meets
/// inherited, and joins recomputed as `g(join)`. Returns the fixed-point
/// quantale together with the embedding (fixed-point index -> base index).
pub fn fixed_point_quantale(
    q: &Quantale,
    gamma: &UnaryMap,
) -> Result<(Quantale, Vec<usize>), NucleiError> {
    if !is_quantic_nucleus(q, gamma) {
        return Err(NucleiError::NotANucleus("fixed-point construction".into()));
    }
    let fixed: Vec<usize> = (0..q.n()).filter(|&x| gamma.apply(x) == x).collect();
    let names = fixed.iter().map(|&x| q.name(x).to_string()).collect();
    let leq = fixed.iter().map(|&x| fixed.iter().map(|&y| q.leq(x, y)).collect()).collect();
    let pos = |v: usize| fixed.iter().position(|&x| x == v).expect("closed under gamma");
    let prod = fixed
        .iter()
        .map(|&x| fixed.iter().map(|&y| pos(gamma.apply(q.prod(x, y)))).collect())
        .collect();
    let sub = Quantale::new(names, leq, prod)?;
    Ok((sub, fixed))
}

/// The nucleus predicate record: idempotent with respect to products,
/// respects implications, respects the bottom element, and their
/// conjunction (a standard nucleus).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NucleusFlags {
    pub idempotent_wrt_products: bool,
    pub respects_implications: bool,
    pub respects_bottom: bool,
    pub standard: bool,
}

pub fn nucleus_predicates(q: &Quantale, gamma: &UnaryMap) -> NucleusFlags {
    let idem = (0..q.n()).all(|x| gamma.apply(q.prod(x, x)) == gamma.apply(x));
    let impls = (0..q.n()).all(|x| {
        (0..q.n()).all(|y| {
            (gamma.apply(q.residual(x, y)) == q.top())
                == (q.residual(gamma.apply(x), gamma.apply(y)) == q.top())
        })
    });
    let bottom = gamma.apply(q.bottom()) == q.bottom();
    NucleusFlags {
        idempotent_wrt_products: idem,
        respects_implications: impls,
        respects_bottom: bottom,
        standard: idem && impls && bottom,
    }
}

/// All quantic nuclei on `q`, canonically ordered by their tables.
///
/// Brute-forces the `n^n` candidate maps with early pruning by expansivity
/// and monotonicity against already-assigned entries.
pub fn enumerate_quantic_nuclei(
    q: &Quantale,
    bound: usize,
) -> Result<Vec<UnaryMap>, NucleiError> {
    let n = q.n();
    if n > bound {
        return Err(NucleiError::BoundExceeded {
            n,
            bound,
            candidates: (n as u128).pow(n.min(32) as u32),
        });
    }
    let mut out = Vec::new();
    let mut table = vec![0usize; n];
    fn assign(
        q: &Quantale,
        table: &mut Vec<usize>,
        next: usize,
        out: &mut Vec<UnaryMap>,
    ) {
        let n = q.n();
        if next == n {
            let m = UnaryMap { table: table.clone() };
            if is_quantic_nucleus(q, &m) {
                out.push(m);
            }
            return;
        }
        for v in 0..n {
            if !q.leq(next, v) {
                continue; // expansivity
            }
            let monotone = (0..next).all(|earlier| {
                (!q.leq(earlier, next) || q.leq(table[earlier], v))
                    && (!q.leq(next, earlier) || q.leq(v, table[earlier]))
            });
            if !monotone {
                continue;
            }
            table[next] = v;
            assign(q, table, next + 1, out);
        }
        table[next] = 0;
    }
    assign(q, &mut table, 0, &mut out);
    out.sort_by(|a, b| a.table.cmp(&b.table));
    Ok(out)
}

/// A filter: a nonempty, upward-closed, product-closed subset. Improper
/// filters (containing bottom) are permitted; they quotient to a point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filter {
    members: Vec<bool>,
}

impl Filter {
    pub fn new(q: &Quantale, members: Vec<bool>) -> Result<Filter, NucleiError> {
        if members.len() != q.n() {
            return Err(NucleiError::BadTableLength { len: members.len(), n: q.n() });
        }
        if !members.iter().any(|&m| m) {
            return Err(NucleiError::EmptyFilter);
        }
        for x in 0..q.n() {
            if !members[x] {
                continue;
            }
            for y in 0..q.n() {
                if q.leq(x, y) && !members[y] {
                    return Err(NucleiError::FilterNotUpwardClosed(
                        q.name(x).into(),
                        q.name(y).into(),
                    ));
                }
                if members[y] && !members[q.prod(x, y)] {
                    return Err(NucleiError::FilterNotProductClosed(
                        q.name(x).into(),
                        q.name(y).into(),
                    ));
                }
            }
        }
        Ok(Filter { members })
    }

    pub fn from_indices(q: &Quantale, indices: &[usize]) -> Result<Filter, NucleiError> {
        let mut members = vec![false; q.n()];
        for &i in indices {
            if i >= q.n() {
                return Err(NucleiError::TableOutOfRange { value: i, n: q.n() });
            }
            members[i] = true;
        }
        Filter::new(q, members)
    }

    #[inline]
    pub fn contains(&self, x: usize) -> bool {
        self.members[x]
    }

    pub fn is_proper(&self, q: &Quantale) -> bool {
        !self.members[q.bottom()]
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..self.members.len()).filter(|&i| self.members[i]).collect()
    }
}

/// The dense filter `F = {x : g(x) = 1}` of a nucleus.
pub fn dense_filter(q: &Quantale, gamma: &UnaryMap) -> Result<Filter, NucleiError> {
    Filter::new(q, (0..q.n()).map(|x| gamma.apply(x) == q.top()).collect())
}

/// The quotient of a quantale by the congruence of a filter. Classes are
/// represented by their minimum-index element.
#[derive(Debug, Clone)]
pub struct QuotientAlgebra {
    pub base: Quantale,
    pub filter: Filter,
    /// base index -> class id
    pub class_of: Vec<usize>,
    /// class id -> minimum base index in the class
    pub representatives: Vec<usize>,
    pub quotient: Quantale,
}

impl QuotientAlgebra {
    #[inline]
    pub fn class(&self, x: usize) -> usize {
        self.class_of[x]
    }
}

/// Builds `Q/F`: classes via `x ~ y iff x->y and y->x in F`, order
/// `|x| <= |y| iff x->y in F`, operations induced from representatives.
/// Well-definedness is verified on all representative pairs; a violation is
/// a bug trap, not a user error.
pub fn quotient(q: &Quantale, filter: &Filter) -> Result<QuotientAlgebra, NucleiError> {
    let n = q.n();
    let related =
        |x: usize, y: usize| filter.contains(q.residual(x, y)) && filter.contains(q.residual(y, x));

    let mut class_of = vec![usize::MAX; n];
    let mut representatives = Vec::new();
    for x in 0..n {
        if class_of[x] != usize::MAX {
            continue;
        }
        let id = representatives.len();
        representatives.push(x);
        for (y, slot) in class_of.iter_mut().enumerate().skip(x) {
            if *slot == usize::MAX && related(x, y) {
                *slot = id;
            }
        }
    }

    // Induced operations must not depend on the representative.
    for op in ["prod", "join", "meet", "residual"] {
        for x in 0..n {
            for y in 0..n {
                let (rx, ry) = (representatives[class_of[x]], representatives[class_of[y]]);
                let (a, b) = match op {
                    "prod" => (q.prod(x, y), q.prod(rx, ry)),
                    "join" => (q.join(x, y), q.join(rx, ry)),
                    "meet" => (q.meet(x, y), q.meet(rx, ry)),
                    _ => (q.residual(x, y), q.residual(rx, ry)),
                };
                if class_of[a] != class_of[b] {
                    return Err(NucleiError::IllDefinedQuotient {
                        op: match op {
                            "prod" => "prod",
                            "join" => "join",
                            "meet" => "meet",
                            _ => "residual",
                        },
                        x: q.name(x).into(),
                        y: q.name(y).into(),
                    });
                }
            }
        }
    }

    let names = representatives.iter().map(|&r| format!("|{}|", q.name(r))).collect();
    let leq = representatives
        .iter()
        .map(|&x| representatives.iter().map(|&y| filter.contains(q.residual(x, y))).collect())
        .collect();
    let prod = representatives
        .iter()
        .map(|&x| representatives.iter().map(|&y| class_of[q.prod(x, y)]).collect())
        .collect();
    let quotient = Quantale::new(names, leq, prod)?;
    Ok(QuotientAlgebra {
        base: q.clone(),
        filter: filter.clone(),
        class_of,
        representatives,
        quotient,
    })
}

/// Checks the quotient theorems for the dense filter of a nucleus. Each
/// theorem is gated on its own hypothesis and reported as hypothesis-unmet
/// when that hypothesis fails.
pub fn verify_quotient_theorems(
    q: &Quantale,
    gamma: &UnaryMap,
    cfg: &SweepConfig,
) -> Result<LawReport, NucleiError> {
    let mut report = LawReport::new();
    if !is_quantic_nucleus(q, gamma) {
        return Err(NucleiError::NotANucleus("quotient theorem suite".into()));
    }
    let flags = nucleus_predicates(q, gamma);
    let filter = dense_filter(q, gamma)?;
    let quot = quotient(q, &filter)?;
    let h = &quot.quotient;
    let n = q.n();

    // |x| = |y| iff g(x) = g(y), needs respects-implications.
    if flags.respects_implications {
        let mut witness = None;
        'a: for x in 0..n {
            for y in 0..n {
                if (quot.class(x) == quot.class(y)) != (gamma.apply(x) == gamma.apply(y)) {
                    witness = Some(format!("({}, {})", q.name(x), q.name(y)));
                    break 'a;
                }
            }
        }
        report.record("class equality iff gamma equality", witness);

        let mut witness = None;
        for x in 0..n {
            if quot.class(gamma.apply(x)) != quot.class(x) {
                witness = Some(q.name(x).to_string());
                break;
            }
        }
        report.record("class of gamma(x) equals class of x", witness);

        // |join(family)| = join of classes.
        let mut witness = None;
        for fam in cfg.families(n) {
            let lhs = quot.class(q.big_join(fam.iter().copied()));
            let rhs = h.big_join(fam.iter().map(|&x| quot.class(x)));
            if lhs != rhs {
                witness = Some(format!(
                    "[{}]",
                    fam.iter().map(|&x| q.name(x)).collect::<Vec<_>>().join(", ")
                ));
                break;
            }
        }
        report.record("class of join equals join of classes", witness);

        // g(meet of (x_i -> y)) = 1 iff meet of g(x_i -> y) = 1.
        let mut witness = None;
        'b: for y in 0..n {
            for fam in cfg.families(n) {
                let lhs = gamma.apply(q.big_meet(fam.iter().map(|&x| q.residual(x, y))))
                    == q.top();
                let rhs = q.big_meet(fam.iter().map(|&x| gamma.apply(q.residual(x, y))))
                    == q.top();
                if lhs != rhs {
                    witness = Some(format!("y = {}, family size {}", q.name(y), fam.len()));
                    break 'b;
                }
            }
        }
        report.record("gamma of meet of residuals is top iff meet of gammas is", witness);
    } else {
        for law in [
            "class equality iff gamma equality",
            "class of gamma(x) equals class of x",
            "class of join equals join of classes",
            "gamma of meet of residuals is top iff meet of gammas is",
        ] {
            report.push(LawCheck::unmet(law, "nucleus does not respect implications"));
        }
    }

    if flags.idempotent_wrt_products && flags.respects_implications {
        if h.is_idempotent() {
            report.push(LawCheck::pass("quotient by dense filter is a Heyting algebra"));
        } else {
            report.push(LawCheck::fail(
                "quotient by dense filter is a Heyting algebra",
                "induced product is not idempotent",
            ));
        }
    } else {
        report.push(LawCheck::unmet(
            "quotient by dense filter is a Heyting algebra",
            "nucleus is not idempotent-wrt-products and implication-respecting",
        ));
    }

    // ~~g is idempotent whenever g respects the bottom element.
    if flags.respects_bottom {
        let nng = |x: usize| q.neg(q.neg(gamma.apply(x)));
        let mut witness = None;
        for x in 0..n {
            if nng(x) != nng(nng(x)) {
                witness = Some(q.name(x).to_string());
                break;
            }
        }
        report.record("double-negation of gamma is idempotent", witness);
    } else {
        report.push(LawCheck::unmet(
            "double-negation of gamma is idempotent",
            "nucleus does not respect the bottom element",
        ));
    }

    Ok(report)
}
