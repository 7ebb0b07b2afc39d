//! Finite commutative integral quantales (complete residuated lattices).
//!
//! A quantale here is a finite bounded lattice carrying a commutative monoid
//! product whose unit is the top element and which distributes over joins.
//! At finite size completeness is automatic, so arbitrary joins and meets are
//! folds over subsets.
//!
//! Elements are dense integer indices; labels are metadata only. Every
//! derived operation (meet, join, residual, negation, equivalence) is
//! precomputed at construction time because the forcing and hierarchy layers
//! perform millions of lookups.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::report::{LawCheck, LawReport, SweepConfig};

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("carrier must be nonempty")]
    EmptyCarrier,
    #[error("names/leq/prod dimensions disagree with carrier size {n}")]
    BadDimensions { n: usize },
    #[error("duplicate element name `{0}`")]
    DuplicateName(String),
    #[error("order is not reflexive at `{0}`")]
    NotReflexive(String),
    #[error("order is not antisymmetric between `{0}` and `{1}`")]
    NotAntisymmetric(String, String),
    #[error("order is not transitive along `{0}` <= `{1}` <= `{2}`")]
    NotTransitive(String, String, String),
    #[error("not a lattice: `{0}` and `{1}` have no {2}")]
    NotALattice(String, String, &'static str),
    #[error("product is not commutative at (`{0}`, `{1}`)")]
    NotCommutative(String, String),
    #[error("product is not associative at (`{0}`, `{1}`, `{2}`)")]
    NotAssociative(String, String, String),
    #[error("monoid unit is not the top element: 1 * `{0}` = `{1}`")]
    UnitNotTop(String, String),
    #[error("product is not monotone: `{0}` <= `{1}` but `{0}`*`{2}` > `{1}`*`{2}`")]
    NotMonotone(String, String, String),
    #[error("product does not distribute over joins at (`{0}`, `{1}`, `{2}`)")]
    DistributivityFailure(String, String, String),
    #[error("bottom is not absorbing: `{0}` * 0 = `{1}`")]
    BottomNotAbsorbing(String, String),
    #[error("element index {index} out of range (carrier size {n})")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("malformed algebra file: {0}")]
    Format(String),
    #[error("chain size must be at least 2 (got {0})")]
    ChainTooSmall(usize),
}

/// A finite commutative integral quantale with all operation tables
/// precomputed. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quantale {
    n: usize,
    names: Vec<String>,
    leq: Vec<bool>,
    prod: Vec<usize>,
    meet: Vec<usize>,
    join: Vec<usize>,
    residual: Vec<usize>,
    neg: Vec<usize>,
    equiv: Vec<usize>,
    top: usize,
    bottom: usize,
}

impl Quantale {
    /// Build and eagerly validate a quantale from its order matrix and
    /// product table. Rejects rather than repairs: downstream theorems fail
    /// silently on near-quantales.
    pub fn new(
        names: Vec<String>,
        leq_rows: Vec<Vec<bool>>,
        prod_rows: Vec<Vec<usize>>,
    ) -> Result<Quantale, AlgebraError> {
        let n = names.len();
        if n == 0 {
            return Err(AlgebraError::EmptyCarrier);
        }
        if leq_rows.len() != n
            || prod_rows.len() != n
            || leq_rows.iter().any(|r| r.len() != n)
            || prod_rows.iter().any(|r| r.len() != n)
        {
            return Err(AlgebraError::BadDimensions { n });
        }
        for (i, a) in names.iter().enumerate() {
            if names[..i].contains(a) {
                return Err(AlgebraError::DuplicateName(a.clone()));
            }
        }
        let leq: Vec<bool> = leq_rows.into_iter().flatten().collect();
        let mut prod = Vec::with_capacity(n * n);
        for row in &prod_rows {
            for &v in row {
                if v >= n {
                    return Err(AlgebraError::IndexOutOfRange { index: v, n });
                }
                prod.push(v);
            }
        }

        let le = |x: usize, y: usize| leq[x * n + y];
        let name = |x: usize| names[x].clone();

        for x in 0..n {
            if !le(x, x) {
                return Err(AlgebraError::NotReflexive(name(x)));
            }
        }
        for x in 0..n {
            for y in 0..n {
                if x != y && le(x, y) && le(y, x) {
                    return Err(AlgebraError::NotAntisymmetric(name(x), name(y)));
                }
                for z in 0..n {
                    if le(x, y) && le(y, z) && !le(x, z) {
                        return Err(AlgebraError::NotTransitive(name(x), name(y), name(z)));
                    }
                }
            }
        }

        // Meets and joins must exist for every pair; at finite size this
        // makes the lattice complete.
        let mut meet = vec![0usize; n * n];
        let mut join = vec![0usize; n * n];
        for x in 0..n {
            for y in 0..n {
                let lower: Vec<usize> = (0..n).filter(|&z| le(z, x) && le(z, y)).collect();
                let glb = lower
                    .iter()
                    .copied()
                    .find(|&m| lower.iter().all(|&z| le(z, m)));
                let upper: Vec<usize> = (0..n).filter(|&z| le(x, z) && le(y, z)).collect();
                let lub = upper
                    .iter()
                    .copied()
                    .find(|&j| upper.iter().all(|&z| le(j, z)));
                match (glb, lub) {
                    (Some(m), Some(j)) => {
                        meet[x * n + y] = m;
                        join[x * n + y] = j;
                    }
                    (None, _) => return Err(AlgebraError::NotALattice(name(x), name(y), "meet")),
                    (_, None) => return Err(AlgebraError::NotALattice(name(x), name(y), "join")),
                }
            }
        }
        let top = (0..n)
            .find(|&t| (0..n).all(|x| le(x, t)))
            .ok_or(AlgebraError::NotALattice(name(0), name(0), "top"))?;
        let bottom = (0..n)
            .find(|&b| (0..n).all(|x| le(b, x)))
            .ok_or(AlgebraError::NotALattice(name(0), name(0), "bottom"))?;

        let p = |x: usize, y: usize| prod[x * n + y];
        for x in 0..n {
            for y in 0..n {
                if p(x, y) != p(y, x) {
                    return Err(AlgebraError::NotCommutative(name(x), name(y)));
                }
                for z in 0..n {
                    if p(p(x, y), z) != p(x, p(y, z)) {
                        return Err(AlgebraError::NotAssociative(name(x), name(y), name(z)));
                    }
                }
            }
        }
        for x in 0..n {
            if p(top, x) != x {
                return Err(AlgebraError::UnitNotTop(name(x), name(p(top, x))));
            }
        }
        for x in 0..n {
            for y in 0..n {
                if le(x, y) {
                    for z in 0..n {
                        if !le(p(x, z), p(y, z)) {
                            return Err(AlgebraError::NotMonotone(name(x), name(y), name(z)));
                        }
                    }
                }
            }
        }
        // Binary distributivity plus bottom absorption; at finite size this
        // yields distribution over all joins.
        for x in 0..n {
            if p(x, bottom) != bottom {
                return Err(AlgebraError::BottomNotAbsorbing(name(x), name(p(x, bottom))));
            }
            for a in 0..n {
                for b in 0..n {
                    if p(x, join[a * n + b]) != join[p(x, a) * n + p(x, b)] {
                        return Err(AlgebraError::DistributivityFailure(name(x), name(a), name(b)));
                    }
                }
            }
        }

        // residual(x, y) = join of { z : x*z <= y }; the set always contains
        // the bottom element.
        let mut residual = vec![0usize; n * n];
        for x in 0..n {
            for y in 0..n {
                let mut acc = bottom;
                for z in 0..n {
                    if le(p(x, z), y) {
                        acc = join[acc * n + z];
                    }
                }
                residual[x * n + y] = acc;
            }
        }
        let neg: Vec<usize> = (0..n).map(|x| residual[x * n + bottom]).collect();
        let mut equiv = vec![0usize; n * n];
        for x in 0..n {
            for y in 0..n {
                equiv[x * n + y] = prod[residual[x * n + y] * n + residual[y * n + x]];
            }
        }

        Ok(Quantale { n, names, leq, prod, meet, join, residual, neg, equiv, top, bottom })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    #[inline]
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.leq[x * self.n + y]
    }

    #[inline]
    pub fn prod(&self, x: usize, y: usize) -> usize {
        self.prod[x * self.n + y]
    }

    #[inline]
    pub fn meet(&self, x: usize, y: usize) -> usize {
        self.meet[x * self.n + y]
    }

    #[inline]
    pub fn join(&self, x: usize, y: usize) -> usize {
        self.join[x * self.n + y]
    }

    /// The residual `x -> y`, right adjoint of the product.
    #[inline]
    pub fn residual(&self, x: usize, y: usize) -> usize {
        self.residual[x * self.n + y]
    }

    /// Negation `~x = x -> 0`.
    #[inline]
    pub fn neg(&self, x: usize) -> usize {
        self.neg[x]
    }

    /// Equivalence `x == y := (x -> y) * (y -> x)`.
    #[inline]
    pub fn equiv(&self, x: usize, y: usize) -> usize {
        self.equiv[x * self.n + y]
    }

    /// `x^k` with `x^0 = 1`.
    pub fn power(&self, x: usize, k: u32) -> usize {
        let mut acc = self.top;
        for _ in 0..k {
            acc = self.prod(x, acc);
        }
        acc
    }

    /// Join of a family of elements; the empty family yields bottom.
    pub fn big_join(&self, xs: impl IntoIterator<Item = usize>) -> usize {
        xs.into_iter().fold(self.bottom, |a, x| self.join(a, x))
    }

    /// Meet of a family of elements; the empty family yields top.
    pub fn big_meet(&self, xs: impl IntoIterator<Item = usize>) -> usize {
        xs.into_iter().fold(self.top, |a, x| self.meet(a, x))
    }

    /// True iff `x*x = x` everywhere; the structure is then a Heyting
    /// algebra and the product coincides with the meet.
    pub fn is_idempotent(&self) -> bool {
        (0..self.n).all(|x| self.prod(x, x) == x)
    }

    pub fn check_index(&self, x: usize) -> Result<usize, AlgebraError> {
        if x < self.n {
            Ok(x)
        } else {
            Err(AlgebraError::IndexOutOfRange { index: x, n: self.n })
        }
    }
}

/// Gödel chain `0 < 1/(n-1) < ... < 1` with the product `min`.
pub fn godel_chain(n: usize) -> Result<Quantale, AlgebraError> {
    chain(n, |i, j, _| i.min(j))
}

/// Łukasiewicz chain with the product `max(0, x + y - 1)` on `k/(n-1)`.
pub fn lukasiewicz_chain(n: usize) -> Result<Quantale, AlgebraError> {
    chain(n, |i, j, n| (i + j).saturating_sub(n - 1))
}

/// The two-element Boolean algebra (the unique two-element quantale).
pub fn boolean_2() -> Quantale {
    godel_chain(2).expect("two-element chain is valid")
}

fn chain(n: usize, prod: impl Fn(usize, usize, usize) -> usize) -> Result<Quantale, AlgebraError> {
    if n < 2 {
        return Err(AlgebraError::ChainTooSmall(n));
    }
    let names = chain_names(n);
    let leq = (0..n).map(|i| (0..n).map(|j| i <= j).collect()).collect();
    let prods = (0..n).map(|i| (0..n).map(|j| prod(i, j, n)).collect()).collect();
    Quantale::new(names, leq, prods)
}

fn chain_names(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| {
            if i == 0 {
                "0".to_string()
            } else if i == n - 1 {
                "1".to_string()
            } else {
                format!("{}/{}", i, n - 1)
            }
        })
        .collect()
}

/// The quantales every suite runs against: Boolean 2 plus Gödel and
/// Łukasiewicz chains of sizes 2..=max.
pub fn catalog(max: usize) -> Vec<(String, Quantale)> {
    let mut out = vec![("boolean-2".to_string(), boolean_2())];
    for n in 2..=max {
        out.push((format!("godel-{n}"), godel_chain(n).unwrap()));
        out.push((format!("lukasiewicz-{n}"), lukasiewicz_chain(n).unwrap()));
    }
    out
}

// ---------------------------------------------------------------------------
// Law verification
// ---------------------------------------------------------------------------

/// Exhaustively checks the residuated-lattice law suite: the ten pairwise
/// laws, the four indexed-family laws, and the eight negation laws. Never
/// aborts on a violation; each law reports its first counterexample.
pub fn verify_quantale_laws(q: &Quantale, cfg: &SweepConfig) -> LawReport {
    let mut report = LawReport::new();
    let n = q.n();
    let names = |xs: &[usize]| {
        xs.iter().map(|&x| q.name(x).to_string()).collect::<Vec<_>>().join(", ")
    };

    let mut pair_law = |law: &str, check: &dyn Fn(usize, usize) -> bool| {
        let mut witness = None;
        'outer: for x in 0..n {
            for y in 0..n {
                if !check(x, y) {
                    witness = Some(names(&[x, y]));
                    break 'outer;
                }
            }
        }
        report.record(law, witness);
    };

    pair_law("order iff residual is top", &|x, y| q.leq(x, y) == (q.residual(x, y) == q.top()));
    pair_law("x*(x->y) <= y", &|x, y| q.leq(q.prod(x, q.residual(x, y)), y));
    pair_law("1->y = y", &|_, y| q.residual(q.top(), y) == y);
    pair_law("x*0 = 0", &|x, _| q.prod(x, q.bottom()) == q.bottom());
    pair_law("0->y = 1", &|_, y| q.residual(q.bottom(), y) == q.top());
    pair_law("x*y <= x meet y", &|x, y| q.leq(q.prod(x, y), q.meet(x, y)));

    let mut triple_law = |law: &str, check: &dyn Fn(usize, usize, usize) -> bool| {
        let mut witness = None;
        'outer: for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if !check(x, y, z) {
                        witness = Some(names(&[x, y, z]));
                        break 'outer;
                    }
                }
            }
        }
        report.record(law, witness);
    };

    triple_law("product monotone", &|x, y, z| {
        !q.leq(x, y) || q.leq(q.prod(x, z), q.prod(y, z))
    });
    triple_law("residual antitone on the left", &|x, y, z| {
        !q.leq(x, y) || q.leq(q.residual(y, z), q.residual(x, z))
    });
    triple_law("residual monotone on the right", &|x, y, z| {
        !q.leq(x, y) || q.leq(q.residual(z, x), q.residual(z, y))
    });
    triple_law("(x*y)->z = x->(y->z)", &|x, y, z| {
        q.residual(q.prod(x, y), z) == q.residual(x, q.residual(y, z))
    });

    // Indexed-family laws, quantified over subsets of the carrier.
    let families = cfg.families(n);
    let mut family_law = |law: &str, check: &dyn Fn(usize, &[usize]) -> bool| {
        let mut witness = None;
        'outer: for x in 0..n {
            for fam in &families {
                if !check(x, fam) {
                    witness = Some(format!("x = {}, family = [{}]", q.name(x), names(fam)));
                    break 'outer;
                }
            }
        }
        report.record(law, witness);
    };

    family_law("x * meet(family) <= meet of products", &|x, fam| {
        let lhs = q.prod(x, q.big_meet(fam.iter().copied()));
        let rhs = q.big_meet(fam.iter().map(|&y| q.prod(x, y)));
        q.leq(lhs, rhs)
    });
    family_law("x -> meet(family) = meet of residuals", &|x, fam| {
        q.residual(x, q.big_meet(fam.iter().copied()))
            == q.big_meet(fam.iter().map(|&y| q.residual(x, y)))
    });
    family_law("join(family) -> y = meet of residuals", &|y, fam| {
        q.residual(q.big_join(fam.iter().copied()), y)
            == q.big_meet(fam.iter().map(|&x| q.residual(x, y)))
    });
    family_law("~join(family) = meet of negations", &|_, fam| {
        q.neg(q.big_join(fam.iter().copied())) == q.big_meet(fam.iter().map(|&x| q.neg(x)))
    });

    let mut pair_law2 = |law: &str, check: &dyn Fn(usize, usize) -> bool| {
        let mut witness = None;
        'outer: for x in 0..n {
            for y in 0..n {
                if !check(x, y) {
                    witness = Some(names(&[x, y]));
                    break 'outer;
                }
            }
        }
        report.record(law, witness);
    };

    pair_law2("x * ~x = 0", &|x, _| q.prod(x, q.neg(x)) == q.bottom());
    pair_law2("x <= ~~x", &|x, _| q.leq(x, q.neg(q.neg(x))));
    pair_law2("~(x join y) = ~x meet ~y", &|x, y| {
        q.neg(q.join(x, y)) == q.meet(q.neg(x), q.neg(y))
    });
    pair_law2("negation antitone", &|x, y| {
        !q.leq(x, y)
            || (q.leq(q.neg(y), q.neg(x)) && q.leq(q.neg(q.neg(x)), q.neg(q.neg(y))))
    });
    pair_law2("~0 = 1 and ~1 = 0", &|_, _| {
        q.neg(q.bottom()) == q.top() && q.neg(q.top()) == q.bottom()
    });
    pair_law2("x = y iff equiv(x,y) = 1", &|x, y| (x == y) == (q.equiv(x, y) == q.top()));
    pair_law2("~~x * ~~y <= ~~(x*y)", &|x, y| {
        q.leq(q.prod(q.neg(q.neg(x)), q.neg(q.neg(y))), q.neg(q.neg(q.prod(x, y))))
    });
    pair_law2("~~~x = ~x", &|x, _| q.neg(q.neg(q.neg(x))) == q.neg(x));

    report
}

/// Verifies the adjunction `x*z <= y <=> z <= x->y` over all triples.
pub fn check_adjunction(q: &Quantale) -> Option<LawCheck> {
    for x in 0..q.n() {
        for y in 0..q.n() {
            for z in 0..q.n() {
                if q.leq(q.prod(x, z), y) != q.leq(z, q.residual(x, y)) {
                    return Some(LawCheck::fail(
                        "residual adjunction",
                        format!("({}, {}, {})", q.name(x), q.name(y), q.name(z)),
                    ));
                }
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
struct RawAlgebraFile {
    #[serde(default)]
    chain: Option<ChainSpec>,
    #[serde(default)]
    names: Option<Vec<String>>,
    #[serde(default)]
    leq: Option<Vec<Vec<bool>>>,
    #[serde(default)]
    prod: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    nucleus: Option<Vec<usize>>,
    #[serde(default)]
    filter: Option<Vec<usize>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ChainSpec {
    pub kind: String,
    pub size: usize,
}

/// A loaded algebra file: the quantale plus optional nucleus/filter tables.
#[derive(Debug)]
pub struct AlgebraFile {
    pub quantale: Quantale,
    pub nucleus: Option<Vec<usize>>,
    pub filter: Option<Vec<usize>>,
}

/// Parses the JSON-shaped algebra format: either explicit
/// `{"names", "leq", "prod"}` tables or the shorthand
/// `{"chain": {"kind": "godel"|"lukasiewicz", "size": n}}`.
pub fn load_algebra(text: &str) -> Result<AlgebraFile, AlgebraError> {
    let raw: RawAlgebraFile =
        serde_json::from_str(text).map_err(|e| AlgebraError::Format(e.to_string()))?;
    let quantale = match (raw.chain, raw.names, raw.leq, raw.prod) {
        (Some(spec), None, None, None) => match spec.kind.as_str() {
            "godel" => godel_chain(spec.size)?,
            "lukasiewicz" => lukasiewicz_chain(spec.size)?,
            other => {
                return Err(AlgebraError::Format(format!(
                    "unknown chain kind `{other}` (expected godel or lukasiewicz)"
                )))
            }
        },
        (None, Some(names), Some(leq), Some(prod)) => Quantale::new(names, leq, prod)?,
        _ => {
            return Err(AlgebraError::Format(
                "expected either a `chain` shorthand or all of `names`, `leq`, `prod`".into(),
            ))
        }
    };
    Ok(AlgebraFile { quantale, nucleus: raw.nucleus, filter: raw.filter })
}

/// Serializes a quantale back into the explicit-table file format.
pub fn quantale_to_json(q: &Quantale) -> serde_json::Value {
    let n = q.n();
    serde_json::json!({
        "names": q.names(),
        "leq": (0..n).map(|x| (0..n).map(|y| q.leq(x, y)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "prod": (0..n).map(|x| (0..n).map(|y| q.prod(x, y)).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent residual oracle: scan all z with x*z <= y and fold joins.
    fn residual_oracle(q: &Quantale, x: usize, y: usize) -> usize {
        q.big_join((0..q.n()).filter(|&z| q.leq(q.prod(x, z), y)))
    }

    #[test]
    fn godel_2_is_boolean() {
        let q = godel_chain(2).unwrap();
        assert_eq!(q.n(), 2);
        assert!(q.is_idempotent());
        // Boolean involution: ~~x = x for both elements.
        for x in 0..2 {
            assert_eq!(q.neg(q.neg(x)), x);
        }
    }

    #[test]
    fn lukasiewicz_3_residuals() {
        let q = lukasiewicz_chain(3).unwrap();
        // Frozen from the brute-force oracle: 1/2 -> 0 = 1/2.
        assert_eq!(residual_oracle(&q, 1, 0), 1);
        assert_eq!(q.residual(1, 0), 1);
        assert_eq!(q.neg(1), 1);
        assert!(!q.is_idempotent());
        assert_eq!(q.prod(1, 1), 0);
    }

    #[test]
    fn residual_matches_oracle_on_catalog() {
        for (name, q) in catalog(5) {
            for x in 0..q.n() {
                for y in 0..q.n() {
                    assert_eq!(q.residual(x, y), residual_oracle(&q, x, y), "{name} ({x},{y})");
                }
            }
        }
    }

    #[test]
    fn adjunction_holds_on_catalog() {
        for (name, q) in catalog(5) {
            assert!(check_adjunction(&q).is_none(), "{name}");
        }
    }

    #[test]
    fn law_suite_passes_on_catalog() {
        let cfg = SweepConfig::default();
        for (name, q) in catalog(5) {
            let report = verify_quantale_laws(&q, &cfg);
            for check in report.failures() {
                panic!("{name}: law `{}` failed at {:?}", check.law, check.counterexample);
            }
        }
    }

    #[test]
    fn double_negation_closure_on_lukasiewicz() {
        // x <= ~~x holds with equality everywhere on the 3-chain.
        let q = lukasiewicz_chain(3).unwrap();
        for x in 0..q.n() {
            assert_eq!(q.neg(q.neg(x)), x);
        }
    }

    #[test]
    fn idempotent_collapses_to_meet() {
        for (name, q) in catalog(5) {
            if q.is_idempotent() {
                for x in 0..q.n() {
                    for y in 0..q.n() {
                        assert_eq!(q.prod(x, y), q.meet(x, y), "{name}");
                    }
                }
            }
        }
    }

    #[test]
    fn power_examples() {
        let q = lukasiewicz_chain(3).unwrap();
        assert_eq!(q.power(1, 0), q.top());
        assert_eq!(q.power(1, 1), 1);
        assert_eq!(q.power(1, 2), 0);
    }

    #[test]
    fn equiv_detects_equality() {
        let q = godel_chain(4).unwrap();
        for x in 0..q.n() {
            for y in 0..q.n() {
                assert_eq!(q.equiv(x, y) == q.top(), x == y);
            }
        }
    }

    #[test]
    fn chain_shorthand_loads() {
        let f = load_algebra(r#"{"chain": {"kind": "godel", "size": 3}}"#).unwrap();
        assert_eq!(f.quantale, godel_chain(3).unwrap());
        let f = load_algebra(r#"{"chain": {"kind": "lukasiewicz", "size": 3}}"#).unwrap();
        assert!(!f.quantale.is_idempotent());
    }

    #[test]
    fn explicit_tables_round_trip() {
        let q = lukasiewicz_chain(4).unwrap();
        let text = quantale_to_json(&q).to_string();
        let loaded = load_algebra(&text).unwrap().quantale;
        assert_eq!(loaded, q);
    }

    #[test]
    fn loader_rejects_unit_violation() {
        // prod(top, x) != x: use min on a 2-chain but swap the unit row.
        let text = r#"{
            "names": ["0", "1"],
            "leq": [[true, true], [false, true]],
            "prod": [[0, 0], [0, 0]]
        }"#;
        match load_algebra(text) {
            Err(AlgebraError::UnitNotTop(..)) => {}
            other => panic!("expected unit violation, got {other:?}"),
        }
    }

    #[test]
    fn loader_rejects_non_lattice_order() {
        // Two incomparable elements with no upper bound.
        let text = r#"{
            "names": ["a", "b"],
            "leq": [[true, false], [false, true]],
            "prod": [[0, 0], [0, 1]]
        }"#;
        match load_algebra(text) {
            Err(AlgebraError::NotALattice(..)) => {}
            other => panic!("expected lattice violation, got {other:?}"),
        }
    }

    #[test]
    fn loader_rejects_non_associative_product() {
        // 3-chain with a broken table: x*y = max except 1*1 = 2.
        let text = r#"{
            "names": ["0", "h", "1"],
            "leq": [[true, true, true], [false, true, true], [false, false, true]],
            "prod": [[0, 0, 0], [0, 2, 1], [0, 1, 2]]
        }"#;
        let err = load_algebra(text).unwrap_err();
        assert!(
            matches!(
                err,
                AlgebraError::NotAssociative(..)
                    | AlgebraError::NotMonotone(..)
                    | AlgebraError::DistributivityFailure(..)
            ),
            "{err:?}"
        );
    }

    #[test]
    fn loader_rejects_non_monotone_product() {
        let text = r#"{
            "names": ["0", "1"],
            "leq": [[true, true], [false, true]],
            "prod": [[1, 0], [0, 1]]
        }"#;
        assert!(matches!(load_algebra(text), Err(AlgebraError::NotMonotone(..))));
    }

    #[test]
    fn loader_rejects_pure_associativity_failure() {
        // 4-chain, commutative, unit = top, monotone, but
        // (2*2)*1 = 1*1 = 0 while 2*(2*1) = 2*1 = 1.
        let text = r#"{
            "names": ["0", "x", "y", "1"],
            "leq": [[true,true,true,true],[false,true,true,true],
                    [false,false,true,true],[false,false,false,true]],
            "prod": [[0,0,0,0],[0,0,1,1],[0,1,1,2],[0,1,2,3]]
        }"#;
        assert!(matches!(load_algebra(text), Err(AlgebraError::NotAssociative(..))));
    }

    #[test]
    fn loader_rejects_pure_distributivity_failure() {
        // Diamond 0 < a,b < 1 where all products of non-units collapse to
        // bottom: commutative, associative, monotone, unit = top, but
        // a*(a join b) = a while (a*a) join (a*b) = 0.
        let text = r#"{
            "names": ["0", "a", "b", "1"],
            "leq": [[true,true,true,true],[false,true,false,true],
                    [false,false,true,true],[false,false,false,true]],
            "prod": [[0,0,0,0],[0,0,0,1],[0,0,0,2],[0,1,2,3]]
        }"#;
        assert!(matches!(load_algebra(text), Err(AlgebraError::DistributivityFailure(..))));
    }

    #[test]
    fn family_laws_sampled_beyond_exhaustive_bound() {
        let q = godel_chain(8).unwrap();
        let cfg = SweepConfig { exhaustive_max: 6, samples: 200, seed: 7 };
        let report = verify_quantale_laws(&q, &cfg);
        assert!(report.all_passed());
    }
}
