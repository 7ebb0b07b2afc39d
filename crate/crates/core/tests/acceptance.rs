//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line. All checks are exact (zero tolerance); the reference values come
//! from independent oracles coded inside this file where the criterion
//! calls for one.

use std::collections::BTreeMap;
use std::time::Instant;

use residuated::algebra::{catalog, verify_quantale_laws};
use residuated::forcing::KripkeModel;
use residuated::frames::{
    self, arrow_set, big_join_sets, chain_frame_godel, chain_frame_lukasiewicz,
    enumerate_standard_conuclei, frame_catalog, Conucleus, PStarLattice, SOMonoid, WorldSet,
};
use residuated::hierarchy::{element_name, Hierarchy};
use residuated::logic::Formula;
use residuated::nuclei::{
    check_nucleus_characterization, enumerate_quantic_nuclei, fixed_point_quantale,
    nucleus_predicates, verify_quotient_theorems,
};
use residuated::report::{CheckStatus, SweepConfig};

fn finish(criterion: &str, started: Instant, pass: bool) {
    let status = if pass { "PASS" } else { "FAIL" };
    println!("[{status}] {criterion} ({:.2}s)", started.elapsed().as_secs_f64());
    assert!(pass, "{criterion}");
}

/// Criterion 1: the full residuated-lattice law suite passes exhaustively
/// on Boolean 2 and the Gödel and Łukasiewicz chains up to size 5.
#[test]
fn criterion_01_quantale_law_suite() {
    let started = Instant::now();
    let cfg = SweepConfig::default();
    let mut pass = true;
    for (name, q) in catalog(5) {
        let report = verify_quantale_laws(&q, &cfg);
        for failure in report.failures() {
            eprintln!("{name}: law `{}` fails at {:?}", failure.law, failure.counterexample);
            pass = false;
        }
    }
    finish("criterion 1: quantale law suite", started, pass);
}

/// Criterion 2: every enumerated nucleus passes the residual
/// characterization and its fixed-point quantale passes the law suite.
#[test]
fn criterion_02_nucleus_suite() {
    let started = Instant::now();
    let cfg = SweepConfig::default();
    let mut pass = true;
    let mut total = 0usize;
    for (name, q) in catalog(5) {
        for gamma in enumerate_quantic_nuclei(&q, 6).unwrap() {
            total += 1;
            if !check_nucleus_characterization(&q, &gamma) {
                eprintln!("{name}: characterization fails for {:?}", gamma.table());
                pass = false;
            }
            let (fixed, _) = fixed_point_quantale(&q, &gamma).unwrap();
            let report = verify_quantale_laws(&fixed, &cfg);
            if !report.all_passed() {
                eprintln!("{name}: fixed-point laws fail for {:?}", gamma.table());
                pass = false;
            }
        }
    }
    assert!(total > 20, "expected a meaningful number of nuclei, got {total}");
    finish("criterion 2: nucleus suite", started, pass);
}

/// Criterion 3: the quotient theorems hold for every enumerated nucleus
/// (each gated on its own hypothesis; no check may fail).
#[test]
fn criterion_03_quotient_suite() {
    let started = Instant::now();
    let cfg = SweepConfig::default();
    let mut pass = true;
    let mut heyting_checked = 0usize;
    for (name, q) in catalog(5) {
        for gamma in enumerate_quantic_nuclei(&q, 6).unwrap() {
            let report = verify_quotient_theorems(&q, &gamma, &cfg).unwrap();
            for failure in report.failures() {
                eprintln!("{name} {:?}: `{}` fails", gamma.table(), failure.law);
                pass = false;
            }
            if nucleus_predicates(&q, &gamma).standard {
                heyting_checked += 1;
                let heyting_law = report
                    .checks
                    .iter()
                    .find(|c| c.law.contains("Heyting"))
                    .expect("suite includes the Heyting collapse");
                if heyting_law.status != CheckStatus::Pass {
                    eprintln!("{name} {:?}: Heyting collapse not verified", gamma.table());
                    pass = false;
                }
            }
        }
    }
    assert!(heyting_checked > 0, "no standard nucleus was exercised");
    finish("criterion 3: quotient suite", started, pass);
}

/// Criterion 4: `P*` of every catalog frame of size <= 4 passes the law
/// suite, with the expected sizes on the two baselines.
#[test]
fn criterion_04_pstar_suite() {
    let started = Instant::now();
    let cfg = SweepConfig::default();
    let mut pass = true;
    for (name, frame) in frame_catalog(4) {
        let pstar = PStarLattice::enumerate(&frame, 6).unwrap();
        let report = verify_quantale_laws(pstar.quantale(), &cfg);
        if !report.all_passed() {
            eprintln!("{name}: P* law suite fails");
            pass = false;
        }
    }
    let two = PStarLattice::enumerate(&chain_frame_godel(2).unwrap(), 6).unwrap();
    if two.len() != 2 {
        eprintln!("2-chain P* has {} elements, expected 2", two.len());
        pass = false;
    }
    let three = PStarLattice::enumerate(&chain_frame_godel(3).unwrap(), 6).unwrap();
    if three.len() != 3 {
        eprintln!("dual-godel-3 P* has {} elements, expected 3", three.len());
        pass = false;
    }
    finish("criterion 4: P* suite", started, pass);
}

fn letter_model(frame: SOMonoid, delta: Conucleus, letter_worlds: Vec<usize>) -> KripkeModel {
    let mut atomic = BTreeMap::new();
    atomic.insert("a".to_string(), letter_worlds);
    KripkeModel::new(frame, delta, vec!["d".to_string()], atomic, 6).unwrap()
}

/// Criterion 5: the definitional and algebraic evaluators agree on every
/// sentence up to depth 3 (propositional atoms plus the one-variable
/// membership-free fragment) on four catalog models.
#[test]
fn criterion_05_forcing_congruence() {
    let started = Instant::now();
    let g2 = chain_frame_godel(2).unwrap();
    let g3 = chain_frame_godel(3).unwrap();
    let l3 = chain_frame_lukasiewicz(3).unwrap();
    let models = [
        ("2-chain, identity", letter_model(g2.clone(), Conucleus::identity(&g2), vec![1])),
        ("dual-godel-3, identity", letter_model(g3.clone(), Conucleus::identity(&g3), vec![1, 2])),
        ("dual-lukasiewicz-3, identity", letter_model(l3.clone(), Conucleus::identity(&l3), vec![1, 2])),
        (
            "dual-godel-3, collapsing conucleus",
            letter_model(g3.clone(), Conucleus::new(&g3, vec![0, 0, 2]).unwrap(), vec![2]),
        ),
    ];
    let mut pass = true;
    for (name, model) in models {
        let report = model.cross_check(3).unwrap();
        println!(
            "  {name}: {} sentences, {} mismatches",
            report.sentences_checked, report.mismatch_count
        );
        if !report.passed() {
            for m in &report.mismatches {
                eprintln!("  {name}: `{}` def={:?} alg={:?}", m.sentence, m.definitional, m.algebraic);
            }
            pass = false;
        }
    }
    finish("criterion 5: forcing congruence at depth 3", started, pass);
}

/// Criterion 6: for every standard conucleus on frames of size <= 3, the
/// induced nucleus on `P*` passes all three standardness predicates and
/// preserves joins.
#[test]
fn criterion_06_gamma_standardness() {
    let started = Instant::now();
    let mut pass = true;
    let mut found = 0usize;
    for (name, frame) in frame_catalog(3) {
        for delta in enumerate_standard_conuclei(&frame, 6).unwrap() {
            found += 1;
            let report = frames::verify_gamma_standardness(&frame, &delta, 6).unwrap();
            for check in &report.checks {
                if check.status != CheckStatus::Pass {
                    eprintln!("{name} {:?}: `{}` is {:?}", delta.table(), check.law, check.status);
                    pass = false;
                }
            }
        }
    }
    assert!(found > 0, "no standard conucleus found on any size-3 frame");
    finish("criterion 6: induced-nucleus standardness", started, pass);
}

/// Independent pointwise recomputation of a membership forcing set from
/// the definitional clauses: the inner sets come from the definitional
/// evaluator on the previous level's model, and the lattice operations are
/// recomputed directly on world sets (no precomputed `P*` tables).
fn membership_oracle(h: &Hierarchy, level: usize, f: usize, g: usize) -> WorldSet {
    let frame = h.pstar().frame();
    let prev = level - 1;
    let prev_ids = h.level(prev).unwrap().to_vec();
    let fe = h.element(f);
    let ge = h.element(g);
    let prev_set: Vec<usize> = prev_ids.clone();

    let old = |id: usize| prev_set.contains(&id);
    if old(f) && old(g) {
        return membership_oracle(h, prev, f, g);
    }
    if old(f) {
        // f old, g new: the value of g's graph at f.
        let pos = prev_ids.iter().position(|&x| x == f).unwrap();
        return h.pstar().element(ge.graph[pos]);
    }
    // f new: join over the domain of g.
    let model = h.level_model(prev).unwrap();
    let gdom = h.level(ge.level - 1).unwrap().to_vec();
    let mut parts: Vec<WorldSet> = Vec::new();
    for (hpos, &hid) in gdom.iter().enumerate() {
        let gh = h.pstar().element(ge.graph[hpos]);
        let mut fwd = WorldSet::full(frame.n());
        let mut bwd = WorldSet::full(frame.n());
        for (xpos, &x) in prev_ids.iter().enumerate() {
            // worlds forcing ~~<>(x in hid), by the definitional clauses
            let formula = Formula::neg(Formula::neg(Formula::diamond(Formula::mem_cc(
                element_name(x),
                element_name(hid),
            ))));
            let s = model.forcing_mask_definitional(&formula).unwrap();
            let fx = h.pstar().element(fe.graph[xpos]);
            fwd = fwd.intersect(arrow_set(frame, fx, s));
            bwd = bwd.intersect(arrow_set(frame, s, fx));
        }
        let inner = prod_oracle(frame, fwd, bwd);
        parts.push(prod_oracle(frame, gh, inner));
    }
    big_join_sets(frame, parts)
}

fn prod_oracle(frame: &SOMonoid, a: WorldSet, b: WorldSet) -> WorldSet {
    frames::prod_set(frame, a, b)
}

/// Criterion 7: level sizes are [0, 1, 3] through level 2 on both baseline
/// frames, and every membership forcing set matches the independent
/// pointwise recomputation.
#[test]
fn criterion_07_hierarchy_baseline() {
    let started = Instant::now();
    let mut pass = true;
    for (name, frame) in
        [("2-chain", chain_frame_godel(2).unwrap()), ("dual-godel-3", chain_frame_godel(3).unwrap())]
    {
        let delta = Conucleus::identity(&frame);
        let mut h = Hierarchy::new(frame, delta, 6).unwrap();
        h.build_to(2, 1_000_000).unwrap();
        if h.level_sizes() != vec![0, 1, 3] {
            eprintln!("{name}: level sizes {:?}, expected [0, 1, 3]", h.level_sizes());
            pass = false;
        }
        for &f in h.level(2).unwrap() {
            for &g in h.level(2).unwrap() {
                let built = h.pstar().element(h.membership(f, g));
                let oracle = membership_oracle(&h, 2, f, g);
                if built != oracle {
                    eprintln!(
                        "{name}: membership({f}, {g}) = {:?} but oracle says {:?}",
                        built.indices(),
                        oracle.indices()
                    );
                    pass = false;
                }
            }
        }
    }
    finish("criterion 7: hierarchy baseline sizes and membership oracle", started, pass);
}

/// Criterion 8: the translation identity (class of the forcing set equals
/// the Heyting value) holds for every universal-quantifier-free sentence at
/// level 2, depth 2, on both baselines.
#[test]
fn criterion_08_translation_theorem() {
    let started = Instant::now();
    let mut pass = true;
    for (name, frame) in
        [("2-chain", chain_frame_godel(2).unwrap()), ("dual-godel-3", chain_frame_godel(3).unwrap())]
    {
        let delta = Conucleus::identity(&frame);
        let mut h = Hierarchy::new(frame, delta, 6).unwrap();
        h.build_to(2, 1_000_000).unwrap();
        let report = h.verify_translation(2, 2).unwrap();
        println!(
            "  {name}: {} sentences, {} violations",
            report.sentences_checked, report.violations
        );
        if !report.passed() {
            eprintln!("{name}: examples {:?}", report.examples);
            pass = false;
        }
    }
    finish("criterion 8: translation theorem at level 2, depth 2", started, pass);
}

/// Criterion 9: the diamond-validity biconditional holds over the same
/// sweep.
#[test]
fn criterion_09_diamond_corollary() {
    let started = Instant::now();
    let mut pass = true;
    for (name, frame) in
        [("2-chain", chain_frame_godel(2).unwrap()), ("dual-godel-3", chain_frame_godel(3).unwrap())]
    {
        let delta = Conucleus::identity(&frame);
        let mut h = Hierarchy::new(frame, delta, 6).unwrap();
        h.build_to(2, 1_000_000).unwrap();
        let report = h.verify_diamond_corollary(2, 2).unwrap();
        println!(
            "  {name}: {} sentences, {} violations",
            report.sentences_checked, report.violations
        );
        if !report.passed() {
            eprintln!("{name}: examples {:?}", report.examples);
            pass = false;
        }
    }
    finish("criterion 9: diamond corollary at level 2, depth 2", started, pass);
}

/// Hereditarily finite sets with extensional equality: the classical
/// membership oracle for the degeneration check.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Hf(Vec<Hf>);

impl Hf {
    fn normalize(mut members: Vec<Hf>) -> Hf {
        members.sort();
        members.dedup();
        Hf(members)
    }

    fn contains(&self, other: &Hf) -> bool {
        self.0.iter().any(|m| m == other)
    }
}

/// Criterion 10: on the 2-chain frame with the identity conucleus, level-2
/// membership is two-valued and agrees with a classical hereditarily
/// finite set oracle.
#[test]
fn criterion_10_classical_degeneration() {
    let started = Instant::now();
    let frame = chain_frame_godel(2).unwrap();
    let delta = Conucleus::identity(&frame);
    let mut h = Hierarchy::new(frame, delta, 6).unwrap();
    h.build_to(2, 1_000_000).unwrap();

    // H must be the two-element Boolean algebra.
    let hq = &h.heyting().quotient;
    let mut pass = hq.n() == 2 && hq.is_idempotent();

    // Classical denotation of each element: the set of denotations of the
    // domain elements mapped to the top value.
    let ids = h.level(2).unwrap().to_vec();
    let mut denote: BTreeMap<usize, Hf> = BTreeMap::new();
    for &id in &ids {
        let e = h.element(id);
        let dom = h.level(e.level - 1).unwrap().to_vec();
        let members: Vec<Hf> = dom
            .iter()
            .enumerate()
            .filter(|&(pos, _)| e.graph[pos] == h.pstar().one())
            .map(|(_, &x)| denote[&x].clone())
            .collect();
        denote.insert(id, Hf::normalize(members));
    }

    for &f in &ids {
        for &g in &ids {
            let classical = denote[&g].contains(&denote[&f]);
            let kripke = h.membership(f, g);
            let two_valued = kripke == h.pstar().one() || kripke == h.pstar().zero();
            if !two_valued {
                eprintln!("membership({f}, {g}) is not two-valued");
                pass = false;
            }
            let kripke_true = kripke == h.pstar().one();
            let heyting_true = h.h_membership(h.prime(f), h.prime(g)) == hq.top();
            if kripke_true != classical || heyting_true != classical {
                eprintln!(
                    "membership({f}, {g}): kripke {kripke_true}, heyting {heyting_true}, classical {classical}"
                );
                pass = false;
            }
        }
    }
    finish("criterion 10: classical degeneration on the 2-chain", started, pass);
}
