//! Modal residuated first-order formulas over the membership signature.
//!
//! The language has two conjunctions (strong `&` interpreted by the monoid
//! product, weak `/\` by the meet), the residuated implication `->` and its
//! reverse `<-`, disjunction, the possibility modality `<>`, quantifiers,
//! membership atoms `t in u`, and propositional letters. Negation `~p`,
//! `top`, equivalence `<->`, and extensional equality `t = u` are sugar and
//! are eliminated by [`desugar`].

mod parse;
mod pool;

pub use parse::{parse, parse_with_domain, ParseError};
pub use pool::{
    enumerate_sentences, for_each_sentence, projected_nodes, BinOp, Leaf, PoolNode, SentenceBasis,
    SentencePool,
};

use std::collections::BTreeSet;
use std::fmt;

/// A term: a quantified variable or a domain constant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn name(&self) -> &str {
        match self {
            Term::Var(s) | Term::Const(s) => s,
        }
    }
}

/// Formula AST. `Top`, `Neg`, `Equiv`, and `Eq` are sugar nodes removed by
/// [`desugar`]; everything else is core.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Bot,
    Top,
    Letter(String),
    Mem(Term, Term),
    Eq(Term, Term),
    Neg(Box<Formula>),
    StrongAnd(Box<Formula>, Box<Formula>),
    WeakAnd(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    /// `RevImp(a, b)` renders as `a <- b` and means `b -> a`.
    RevImp(Box<Formula>, Box<Formula>),
    Equiv(Box<Formula>, Box<Formula>),
    Diamond(Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
}

impl Formula {
    #[allow(clippy::should_implement_trait)]
    pub fn neg(f: Formula) -> Formula {
        Formula::Neg(Box::new(f))
    }

    pub fn sand(a: Formula, b: Formula) -> Formula {
        Formula::StrongAnd(Box::new(a), Box::new(b))
    }

    pub fn wand(a: Formula, b: Formula) -> Formula {
        Formula::WeakAnd(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn rev_imp(a: Formula, b: Formula) -> Formula {
        Formula::RevImp(Box::new(a), Box::new(b))
    }

    pub fn equiv(a: Formula, b: Formula) -> Formula {
        Formula::Equiv(Box::new(a), Box::new(b))
    }

    pub fn diamond(f: Formula) -> Formula {
        Formula::Diamond(Box::new(f))
    }

    pub fn exists(v: impl Into<String>, f: Formula) -> Formula {
        Formula::Exists(v.into(), Box::new(f))
    }

    pub fn forall(v: impl Into<String>, f: Formula) -> Formula {
        Formula::Forall(v.into(), Box::new(f))
    }

    pub fn letter(s: impl Into<String>) -> Formula {
        Formula::Letter(s.into())
    }

    pub fn mem(t: Term, u: Term) -> Formula {
        Formula::Mem(t, u)
    }

    pub fn mem_cc(t: impl Into<String>, u: impl Into<String>) -> Formula {
        Formula::Mem(Term::Const(t.into()), Term::Const(u.into()))
    }

    /// Connective depth: atoms are 0, every connective or quantifier adds 1.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Bot | Formula::Top | Formula::Letter(_) | Formula::Mem(..) | Formula::Eq(..) => 0,
            Formula::Neg(a) | Formula::Diamond(a) => 1 + a.depth(),
            Formula::Exists(_, a) | Formula::Forall(_, a) => 1 + a.depth(),
            Formula::StrongAnd(a, b)
            | Formula::WeakAnd(a, b)
            | Formula::Or(a, b)
            | Formula::Imp(a, b)
            | Formula::RevImp(a, b)
            | Formula::Equiv(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    pub fn is_universal_free(&self) -> bool {
        match self {
            Formula::Forall(..) => false,
            Formula::Bot | Formula::Top | Formula::Letter(_) | Formula::Mem(..) | Formula::Eq(..) => {
                true
            }
            Formula::Neg(a) | Formula::Diamond(a) | Formula::Exists(_, a) => a.is_universal_free(),
            Formula::StrongAnd(a, b)
            | Formula::WeakAnd(a, b)
            | Formula::Or(a, b)
            | Formula::Imp(a, b)
            | Formula::RevImp(a, b)
            | Formula::Equiv(a, b) => a.is_universal_free() && b.is_universal_free(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        fn walk(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            let term = |t: &Term, bound: &Vec<String>, out: &mut BTreeSet<String>| {
                if let Term::Var(v) = t {
                    if !bound.contains(v) {
                        out.insert(v.clone());
                    }
                }
            };
            match f {
                Formula::Bot | Formula::Top | Formula::Letter(_) => {}
                Formula::Mem(t, u) | Formula::Eq(t, u) => {
                    term(t, bound, out);
                    term(u, bound, out);
                }
                Formula::Neg(a) | Formula::Diamond(a) => walk(a, bound, out),
                Formula::Exists(v, a) | Formula::Forall(v, a) => {
                    bound.push(v.clone());
                    walk(a, bound, out);
                    bound.pop();
                }
                Formula::StrongAnd(a, b)
                | Formula::WeakAnd(a, b)
                | Formula::Or(a, b)
                | Formula::Imp(a, b)
                | Formula::RevImp(a, b)
                | Formula::Equiv(a, b) => {
                    walk(a, bound, out);
                    walk(b, bound, out);
                }
            }
        }
        let mut out = BTreeSet::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Constants appearing anywhere in the formula.
    pub fn constants(&self) -> BTreeSet<String> {
        fn walk(f: &Formula, out: &mut BTreeSet<String>) {
            let term = |t: &Term, out: &mut BTreeSet<String>| {
                if let Term::Const(c) = t {
                    out.insert(c.clone());
                }
            };
            match f {
                Formula::Bot | Formula::Top | Formula::Letter(_) => {}
                Formula::Mem(t, u) | Formula::Eq(t, u) => {
                    term(t, out);
                    term(u, out);
                }
                Formula::Neg(a) | Formula::Diamond(a) => walk(a, out),
                Formula::Exists(_, a) | Formula::Forall(_, a) => walk(a, out),
                Formula::StrongAnd(a, b)
                | Formula::WeakAnd(a, b)
                | Formula::Or(a, b)
                | Formula::Imp(a, b)
                | Formula::RevImp(a, b)
                | Formula::Equiv(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        let mut out = BTreeSet::new();
        walk(self, &mut out);
        out
    }
}

/// Replaces free occurrences of `var` by the constant `constant`; bound
/// occurrences are untouched.
pub fn substitute(f: &Formula, var: &str, constant: &str) -> Formula {
    let term = |t: &Term| match t {
        Term::Var(v) if v == var => Term::Const(constant.to_string()),
        other => other.clone(),
    };
    match f {
        Formula::Bot => Formula::Bot,
        Formula::Top => Formula::Top,
        Formula::Letter(s) => Formula::Letter(s.clone()),
        Formula::Mem(t, u) => Formula::Mem(term(t), term(u)),
        Formula::Eq(t, u) => Formula::Eq(term(t), term(u)),
        Formula::Neg(a) => Formula::neg(substitute(a, var, constant)),
        Formula::Diamond(a) => Formula::diamond(substitute(a, var, constant)),
        Formula::Exists(v, a) => {
            if v == var {
                f.clone()
            } else {
                Formula::exists(v.clone(), substitute(a, var, constant))
            }
        }
        Formula::Forall(v, a) => {
            if v == var {
                f.clone()
            } else {
                Formula::forall(v.clone(), substitute(a, var, constant))
            }
        }
        Formula::StrongAnd(a, b) => {
            Formula::sand(substitute(a, var, constant), substitute(b, var, constant))
        }
        Formula::WeakAnd(a, b) => {
            Formula::wand(substitute(a, var, constant), substitute(b, var, constant))
        }
        Formula::Or(a, b) => Formula::or(substitute(a, var, constant), substitute(b, var, constant)),
        Formula::Imp(a, b) => {
            Formula::imp(substitute(a, var, constant), substitute(b, var, constant))
        }
        Formula::RevImp(a, b) => {
            Formula::rev_imp(substitute(a, var, constant), substitute(b, var, constant))
        }
        Formula::Equiv(a, b) => {
            Formula::equiv(substitute(a, var, constant), substitute(b, var, constant))
        }
    }
}

/// Eliminates the sugar nodes:
///
/// * `~p := p -> bot`
/// * `top := ~bot`
/// * `p <-> q := (p -> q) & (q -> p)`
/// * `t = u := <>~exists x.~(x in t -> x in u) & <>~exists x.~(x in t <- x in u)`
///
/// The second conjunct of the equality expansion asserts the reverse
/// inclusion (`x in u` implies `x in t`), matching the extensionality
/// clause of the companion valued model. Idempotent.
pub fn desugar(f: &Formula) -> Formula {
    match f {
        Formula::Bot => Formula::Bot,
        Formula::Top => Formula::imp(Formula::Bot, Formula::Bot),
        Formula::Letter(s) => Formula::Letter(s.clone()),
        Formula::Mem(t, u) => Formula::Mem(t.clone(), u.clone()),
        Formula::Eq(t, u) => {
            let var = fresh_var(&[t, u]);
            let x = || Term::Var(var.clone());
            let forward = Formula::diamond(Formula::neg(Formula::exists(
                var.clone(),
                Formula::neg(Formula::imp(Formula::Mem(x(), t.clone()), Formula::Mem(x(), u.clone()))),
            )));
            let backward = Formula::diamond(Formula::neg(Formula::exists(
                var.clone(),
                Formula::neg(Formula::rev_imp(
                    Formula::Mem(x(), t.clone()),
                    Formula::Mem(x(), u.clone()),
                )),
            )));
            desugar(&Formula::sand(forward, backward))
        }
        Formula::Neg(a) => Formula::imp(desugar(a), Formula::Bot),
        Formula::Equiv(a, b) => {
            let (da, db) = (desugar(a), desugar(b));
            Formula::sand(Formula::imp(da.clone(), db.clone()), Formula::imp(db, da))
        }
        Formula::StrongAnd(a, b) => Formula::sand(desugar(a), desugar(b)),
        Formula::WeakAnd(a, b) => Formula::wand(desugar(a), desugar(b)),
        Formula::Or(a, b) => Formula::or(desugar(a), desugar(b)),
        Formula::Imp(a, b) => Formula::imp(desugar(a), desugar(b)),
        Formula::RevImp(a, b) => Formula::rev_imp(desugar(a), desugar(b)),
        Formula::Diamond(a) => Formula::diamond(desugar(a)),
        Formula::Exists(v, a) => Formula::exists(v.clone(), desugar(a)),
        Formula::Forall(v, a) => Formula::forall(v.clone(), desugar(a)),
    }
}

fn fresh_var(avoid: &[&Term]) -> String {
    let taken: Vec<&str> = avoid.iter().map(|t| t.name()).collect();
    if !taken.contains(&"x") {
        return "x".to_string();
    }
    (0..).map(|i| format!("x{i}")).find(|c| !taken.contains(&c.as_str())).unwrap()
}

/// True when the tree contains none of `Top`, `Neg`, `Equiv`, `Eq`.
pub fn is_desugared(f: &Formula) -> bool {
    match f {
        Formula::Top | Formula::Neg(_) | Formula::Equiv(..) | Formula::Eq(..) => false,
        Formula::Bot | Formula::Letter(_) | Formula::Mem(..) => true,
        Formula::Diamond(a) | Formula::Exists(_, a) | Formula::Forall(_, a) => is_desugared(a),
        Formula::StrongAnd(a, b)
        | Formula::WeakAnd(a, b)
        | Formula::Or(a, b)
        | Formula::Imp(a, b)
        | Formula::RevImp(a, b) => is_desugared(a) && is_desugared(b),
    }
}

// Rendering with minimal parentheses; `parse(render(f)) == f`.

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Bot | Formula::Top | Formula::Letter(_) | Formula::Mem(..) | Formula::Eq(..) => 100,
        Formula::Neg(_) | Formula::Diamond(_) => 90,
        Formula::StrongAnd(..) => 80,
        Formula::WeakAnd(..) => 70,
        Formula::Or(..) => 60,
        Formula::Imp(..) | Formula::RevImp(..) => 50,
        Formula::Equiv(..) => 40,
        Formula::Exists(..) | Formula::Forall(..) => 30,
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(out: &mut fmt::Formatter<'_>, f: &Formula, min: u8) -> fmt::Result {
            if prec(f) < min {
                write!(out, "(")?;
                go(out, f)?;
                write!(out, ")")
            } else {
                go(out, f)
            }
        }
        fn binary(
            out: &mut fmt::Formatter<'_>,
            a: &Formula,
            op: &str,
            b: &Formula,
            p: u8,
            right_assoc: bool,
        ) -> fmt::Result {
            let (lmin, rmin) = if right_assoc { (p + 1, p) } else { (p, p + 1) };
            child(out, a, lmin)?;
            write!(out, " {op} ")?;
            child(out, b, rmin)
        }
        fn go(out: &mut fmt::Formatter<'_>, f: &Formula) -> fmt::Result {
            match f {
                Formula::Bot => write!(out, "bot"),
                Formula::Top => write!(out, "top"),
                Formula::Letter(s) => write!(out, "{s}"),
                Formula::Mem(t, u) => write!(out, "{} in {}", t.name(), u.name()),
                Formula::Eq(t, u) => write!(out, "{} = {}", t.name(), u.name()),
                Formula::Neg(a) => {
                    write!(out, "~")?;
                    child(out, a, 90)
                }
                Formula::Diamond(a) => {
                    write!(out, "<>")?;
                    child(out, a, 90)
                }
                Formula::StrongAnd(a, b) => binary(out, a, "&", b, 80, false),
                Formula::WeakAnd(a, b) => binary(out, a, "/\\", b, 70, false),
                Formula::Or(a, b) => binary(out, a, "\\/", b, 60, false),
                Formula::Imp(a, b) => binary(out, a, "->", b, 50, true),
                Formula::RevImp(a, b) => binary(out, a, "<-", b, 50, true),
                Formula::Equiv(a, b) => binary(out, a, "<->", b, 40, true),
                Formula::Exists(v, a) => {
                    write!(out, "exists {v} . ")?;
                    child(out, a, 0)
                }
                Formula::Forall(v, a) => {
                    write!(out, "forall {v} . ")?;
                    child(out, a, 0)
                }
            }
        }
        go(out, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_examples() {
        assert_eq!(parse("bot").unwrap(), Formula::Bot);
        let f = parse("<> ~ exists x . ~(x in g -> x in h)").unwrap();
        let expected = Formula::diamond(Formula::neg(Formula::exists(
            "x",
            Formula::neg(Formula::imp(
                Formula::Mem(Term::Var("x".into()), Term::Const("g".into())),
                Formula::Mem(Term::Var("x".into()), Term::Const("h".into())),
            )),
        )));
        assert_eq!(f, expected);
    }

    #[test]
    fn precedence_strong_and_binds_tighter_than_or() {
        let f = parse("p & q \\/ r").unwrap();
        assert_eq!(
            f,
            Formula::or(
                Formula::sand(Formula::letter("p"), Formula::letter("q")),
                Formula::letter("r")
            )
        );
    }

    #[test]
    fn precedence_ladder() {
        // a & b /\ c \/ d -> e parses as ((a&b) /\ c) \/ d -> e with ->
        // weakest among these.
        let f = parse("a & b /\\ c \\/ d -> e").unwrap();
        let conj = Formula::wand(
            Formula::sand(Formula::letter("a"), Formula::letter("b")),
            Formula::letter("c"),
        );
        let disj = Formula::or(conj, Formula::letter("d"));
        assert_eq!(f, Formula::imp(disj, Formula::letter("e")));
    }

    #[test]
    fn implications_are_right_associative() {
        let f = parse("a -> b -> c").unwrap();
        assert_eq!(
            f,
            Formula::imp(Formula::letter("a"), Formula::imp(Formula::letter("b"), Formula::letter("c")))
        );
    }

    #[test]
    fn quantifier_body_extends_right() {
        let f = parse("exists x . x in g & p").unwrap();
        assert_eq!(
            f,
            Formula::exists(
                "x",
                Formula::sand(
                    Formula::Mem(Term::Var("x".into()), Term::Const("g".into())),
                    Formula::letter("p")
                )
            )
        );
    }

    #[test]
    fn shadowing_is_rejected() {
        assert!(parse("exists x . exists x . x in g").is_err());
    }

    #[test]
    fn bound_variable_as_letter_is_rejected() {
        assert!(parse("exists x . x").is_err());
    }

    #[test]
    fn parse_with_domain_rejects_unknown_constants() {
        assert!(parse_with_domain("exists x . x in g", &["g".to_string()]).is_ok());
        let err = parse_with_domain("exists x . x in z", &["g".to_string()]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains('z'), "{msg}");
    }

    #[test]
    fn desugar_negation_and_top() {
        assert_eq!(
            desugar(&Formula::neg(Formula::letter("p"))),
            Formula::imp(Formula::letter("p"), Formula::Bot)
        );
        assert_eq!(desugar(&Formula::Top), Formula::imp(Formula::Bot, Formula::Bot));
    }

    #[test]
    fn desugar_equality_expands_both_inclusions() {
        let g = Term::Const("g".into());
        let h = Term::Const("h".into());
        let d = desugar(&Formula::Eq(g, h));
        assert!(is_desugared(&d));
        assert_eq!(d.depth(), 6);
        // The two conjuncts differ exactly in the implication direction.
        match &d {
            Formula::StrongAnd(fwd, bwd) => {
                let fwd = fwd.to_string();
                let bwd = bwd.to_string();
                assert!(fwd.contains("x in g -> x in h"), "{fwd}");
                assert!(bwd.contains("x in g <- x in h"), "{bwd}");
            }
            other => panic!("expected strong conjunction, got {other}"),
        }
    }

    #[test]
    fn desugar_is_idempotent() {
        let samples = [
            "~p <-> q",
            "g = h",
            "top & ~bot",
            "exists x . ~(x in g) \\/ p",
            "<>~<>~p -> p",
        ];
        for s in samples {
            let once = desugar(&parse(s).unwrap());
            assert!(is_desugared(&once), "{s}");
            assert_eq!(desugar(&once), once, "{s}");
        }
    }

    #[test]
    fn substitute_respects_binding() {
        let f = parse("exists x . x in g").unwrap();
        assert_eq!(substitute(&f, "x", "d"), f);
        let open = Formula::Mem(Term::Var("x".into()), Term::Const("g".into()));
        assert_eq!(substitute(&open, "x", "d"), Formula::mem_cc("d", "g"));
    }

    #[test]
    fn universal_free_detection() {
        assert!(!parse("forall x . bot").unwrap().is_universal_free());
        assert!(parse("exists x . x in g").unwrap().is_universal_free());
    }

    #[test]
    fn depth_examples() {
        assert_eq!(Formula::Bot.depth(), 0);
        assert_eq!(parse("~p").unwrap().depth(), 1);
        assert_eq!(parse("p & (q -> r)").unwrap().depth(), 2);
    }

    #[test]
    fn render_round_trips_handwritten() {
        for s in [
            "bot",
            "p & q \\/ r",
            "a -> b -> c",
            "a <- b",
            "<>~p",
            "exists x . x in g -> p",
            "p /\\ (q & r)",
            "g = h",
            "top <-> ~bot",
        ] {
            let f = parse(s).unwrap();
            let again = parse(&f.to_string()).unwrap();
            assert_eq!(f, again, "render of `{s}` was `{f}`");
        }
    }

    fn arb_formula(depth: u32) -> BoxedStrategy<Formula> {
        // Closed formulas only; quantified variables are named per level so
        // shadowing never occurs.
        fn open(depth: u32, scope: Vec<String>) -> BoxedStrategy<Formula> {
            let consts = prop_oneof![Just("g".to_string()), Just("h".to_string())];
            let var_or_const = {
                let scope = scope.clone();
                consts.prop_flat_map(move |c| {
                    let mut opts: Vec<Term> = vec![Term::Const(c)];
                    for v in &scope {
                        opts.push(Term::Var(v.clone()));
                    }
                    proptest::sample::select(opts)
                })
            };
            let atom = prop_oneof![
                Just(Formula::Bot),
                Just(Formula::Top),
                Just(Formula::letter("p")),
                Just(Formula::letter("q")),
                (var_or_const.clone(), var_or_const.clone())
                    .prop_map(|(t, u)| Formula::Mem(t, u)),
                (var_or_const.clone(), var_or_const).prop_map(|(t, u)| Formula::Eq(t, u)),
            ];
            if depth == 0 {
                return atom.boxed();
            }
            let sub = open(depth - 1, scope.clone());
            let fresh = format!("v{depth}");
            let mut inner_scope = scope.clone();
            inner_scope.push(fresh.clone());
            let body = open(depth - 1, inner_scope);
            prop_oneof![
                atom,
                sub.clone().prop_map(Formula::neg),
                sub.clone().prop_map(Formula::diamond),
                (sub.clone(), sub.clone()).prop_map(|(a, b)| Formula::sand(a, b)),
                (sub.clone(), sub.clone()).prop_map(|(a, b)| Formula::wand(a, b)),
                (sub.clone(), sub.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                (sub.clone(), sub.clone()).prop_map(|(a, b)| Formula::imp(a, b)),
                (sub.clone(), sub.clone()).prop_map(|(a, b)| Formula::rev_imp(a, b)),
                (sub.clone(), sub).prop_map(|(a, b)| Formula::equiv(a, b)),
                body.clone().prop_map({
                    let v = fresh.clone();
                    move |a| Formula::exists(v.clone(), a)
                }),
                body.prop_map(move |a| Formula::forall(fresh.clone(), a)),
            ]
            .boxed()
        }
        open(depth, Vec::new())
    }

    proptest! {
        #[test]
        fn parse_render_round_trip(f in arb_formula(3)) {
            let rendered = f.to_string();
            let parsed = parse(&rendered).unwrap();
            prop_assert_eq!(parsed, f);
        }

        #[test]
        fn desugar_removes_all_sugar(f in arb_formula(3)) {
            let d = desugar(&f);
            prop_assert!(is_desugared(&d));
            prop_assert_eq!(desugar(&d), d.clone());
            // Desugaring preserves closedness.
            prop_assert!(d.is_sentence());
        }
    }
}
