//! Shared result types for law verifiers and sweep reports.

use serde::Serialize;

/// Outcome of a single checked law.
///
/// `HypothesisUnmet` marks checks whose hypothesis does not hold for the
/// given input (for example a quotient theorem that assumes the nucleus
/// respects implications); the conclusion is then not asserted at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    HypothesisUnmet,
}

/// One verified law with an optional first counterexample.
#[derive(Debug, Clone, Serialize)]
pub struct LawCheck {
    pub law: String,
    pub status: CheckStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

impl LawCheck {
    pub fn pass(law: impl Into<String>) -> Self {
        LawCheck { law: law.into(), status: CheckStatus::Pass, counterexample: None }
    }

    pub fn fail(law: impl Into<String>, witness: impl Into<String>) -> Self {
        LawCheck { law: law.into(), status: CheckStatus::Fail, counterexample: Some(witness.into()) }
    }

    pub fn unmet(law: impl Into<String>, note: impl Into<String>) -> Self {
        LawCheck {
            law: law.into(),
            status: CheckStatus::HypothesisUnmet,
            counterexample: Some(note.into()),
        }
    }
}

/// A batch of law checks, in a stable order.
#[derive(Debug, Clone, Default, Serialize)]
pub struct LawReport {
    pub checks: Vec<LawCheck>,
}

impl LawReport {
    pub fn new() -> Self {
        LawReport::default()
    }

    pub fn push(&mut self, check: LawCheck) {
        self.checks.push(check);
    }

    /// Record a law from the first counterexample found, if any.
    pub fn record(&mut self, law: &str, witness: Option<String>) {
        match witness {
            None => self.push(LawCheck::pass(law)),
            Some(w) => self.push(LawCheck::fail(law, w)),
        }
    }

    pub fn merge(&mut self, other: LawReport) {
        self.checks.extend(other.checks);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LawCheck> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }
}

/// Default seed for sampled sweeps; every randomized check takes an explicit
/// seed so reports are reproducible.
pub const DEFAULT_SEED: u64 = 0x5eed;

/// Controls how indexed-family laws quantify over subsets of the carrier:
/// exhaustively up to `exhaustive_max`, otherwise all subsets of size <= 2
/// plus `samples` seeded random subsets.
#[derive(Debug, Clone, Copy)]
pub struct SweepConfig {
    pub exhaustive_max: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { exhaustive_max: 6, samples: 1000, seed: DEFAULT_SEED }
    }
}

impl SweepConfig {
    /// Families of carrier indices to test indexed laws against, including
    /// the empty family. Deterministic for a fixed config.
    pub fn families(&self, n: usize) -> Vec<Vec<usize>> {
        use rand::prelude::*;
        let mut out = Vec::new();
        if n <= self.exhaustive_max {
            for mask in 0u32..(1u32 << n) {
                out.push((0..n).filter(|i| mask & (1 << i) != 0).collect());
            }
        } else {
            out.push(Vec::new());
            for x in 0..n {
                out.push(vec![x]);
                for y in x + 1..n {
                    out.push(vec![x, y]);
                }
            }
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(self.seed);
            for _ in 0..self.samples {
                let size = rng.gen_range(1..=n);
                let mut family: Vec<usize> = (0..n).collect();
                family.shuffle(&mut rng);
                family.truncate(size);
                family.sort_unstable();
                out.push(family);
            }
        }
        out
    }
}
