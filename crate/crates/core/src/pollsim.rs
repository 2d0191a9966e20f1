//! Couples polled on two order-sensitive questions.
//!
//! Questions `0` and `1` play the roles of the settings `(a, a')` for Alice
//! and `(b, b')` for Bob. Per couple, the first interview of ensemble I asks
//! Alice question 0 and Bob question 0; the exit interview asks Alice
//! question 0 again and Bob question 1. Ensemble II asks question 1 of both,
//! then Alice question 1 again and Bob question 0. The answers fill an
//! [`Octuple`] in the same layout as the hidden-variable protocol.
//!
//! A repeated question gets the same answer. A second, different question is
//! answered from the table and then flipped with the order-effect
//! probability, but only when the exit interview follows immediately.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hvsim::slot_rng;
use crate::ineq::Octuple;

/// Largest `states * 2^4` the oracle will enumerate.
pub const ORACLE_LIMIT: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoupleRule {
    /// Both partners share the opinion state.
    Identical,
    /// Bob answers opposite to the table.
    Anti,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PollModel {
    /// Relative weight of each opinion state.
    pub weights: Vec<f64>,
    /// `answers[state][question]`, each ±1.
    pub answers: Vec<[i8; 2]>,
    /// `order_effect[state][first_question][first_answer]` is the probability
    /// that the answer to the other question flips; index 0 of the last axis
    /// is a `+1` first answer.
    pub order_effect: Vec<[[f64; 2]; 2]>,
    pub couple_rule: CoupleRule,
    /// Whether the exit interview follows the first question immediately.
    pub exit_immediate: bool,
}

fn answer_index(x: i8) -> usize {
    usize::from(x < 0)
}

impl PollModel {
    pub fn n_opinion_states(&self) -> usize {
        self.weights.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.weights.len();
        if n == 0 {
            return Err(Error::InvalidModel("poll model needs at least one state".into()));
        }
        if self.answers.len() != n || self.order_effect.len() != n {
            return Err(Error::InvalidModel(format!(
                "{} weights, {} answer rows, {} order-effect rows",
                n,
                self.answers.len(),
                self.order_effect.len()
            )));
        }
        if self.weights.iter().any(|w| !w.is_finite() || *w < 0.0) || self.weights.iter().sum::<f64>() <= 0.0 {
            return Err(Error::InvalidModel(
                "weights must be nonnegative with a positive sum".into(),
            ));
        }
        if self.answers.iter().flatten().any(|&x| x != 1 && x != -1) {
            return Err(Error::InvalidModel("answers must be ±1".into()));
        }
        if self
            .order_effect
            .iter()
            .flatten()
            .flatten()
            .any(|p| !(0.0..=1.0).contains(p))
        {
            return Err(Error::InvalidModel("flip probabilities must lie in [0, 1]".into()));
        }
        Ok(())
    }

    fn probabilities(&self) -> Vec<f64> {
        let total: f64 = self.weights.iter().sum();
        self.weights.iter().map(|w| w / total).collect()
    }

    fn table(&self, state: usize, q: usize, bob: bool) -> i8 {
        let x = self.answers[state][q];
        if bob && self.couple_rule == CoupleRule::Anti {
            -x
        } else {
            x
        }
    }

    /// Probability that the answer to the other question flips.
    fn flip(&self, state: usize, first_q: usize, first_answer: i8) -> f64 {
        if self.exit_immediate {
            self.order_effect[state][first_q][answer_index(first_answer)]
        } else {
            0.0
        }
    }

    /// Order-insensitive copy of this model.
    pub fn without_order_effect(&self) -> Self {
        Self {
            order_effect: vec![[[0.0; 2]; 2]; self.weights.len()],
            ..self.clone()
        }
    }

    /// Random model with `states` opinion states, for sweeps and tests.
    pub fn random(seed: u64, states: usize, couple_rule: CoupleRule) -> Result<Self> {
        if states == 0 {
            return Err(Error::InvalidModel("poll model needs at least one state".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pm = || if rng.random::<bool>() { 1 } else { -1 };
        let answers: Vec<[i8; 2]> = (0..states).map(|_| [pm(), pm()]).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
        let weights = (0..states).map(|_| 0.1 + rng.random::<f64>()).collect();
        let order_effect = (0..states)
            .map(|_| [[rng.random(), rng.random()], [rng.random(), rng.random()]])
            .collect();
        let m = Self {
            weights,
            answers,
            order_effect,
            couple_rule,
            exit_immediate: true,
        };
        m.validate()?;
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PollRun {
    pub n: usize,
    pub records: Vec<Octuple>,
    pub seed: u64,
}

const SLOT_STATE: u64 = 0;
const SLOT_BOB_EXIT_I: u64 = 1;
const SLOT_BOB_EXIT_II: u64 = 2;

fn draw_state(cdf: &[f64], u: f64) -> usize {
    cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1)
}

/// Bob's exit answer to `second` after answering `first` with `first_answer`.
fn exit_answer(m: &PollModel, state: usize, first: usize, first_answer: i8, u: f64) -> i8 {
    let base = m.table(state, 1 - first, true);
    if u < m.flip(state, first, first_answer) {
        -base
    } else {
        base
    }
}

fn poll_couple(m: &PollModel, cdf: &[f64], seed: u64, index: u64) -> Octuple {
    let state = draw_state(cdf, slot_rng(seed, index, SLOT_STATE).random());
    let a1 = m.table(state, 0, false);
    let b1 = m.table(state, 0, true);
    let a2p = m.table(state, 1, false);
    let b2p = m.table(state, 1, true);
    let b3p = exit_answer(m, state, 0, b1, slot_rng(seed, index, SLOT_BOB_EXIT_I).random());
    let b4 = exit_answer(m, state, 1, b2p, slot_rng(seed, index, SLOT_BOB_EXIT_II).random());
    Octuple {
        a1,
        b1,
        a2p,
        b2p,
        a3: a1,
        b3p,
        a4p: a2p,
        b4,
    }
}

pub fn run_poll(m: &PollModel, n: usize, seed: u64) -> Result<PollRun> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    m.validate()?;
    let mut acc = 0.0;
    let cdf: Vec<f64> = m
        .probabilities()
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect();
    let records = (0..n as u64)
        .into_par_iter()
        .map(|i| poll_couple(m, &cdf, seed, i))
        .collect();
    Ok(PollRun { n, records, seed })
}

/// Exact expectations of a poll model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PollOracle {
    /// `<A1B1>`, `<A'2B'2>`, `<A3B'3>`, `<A'4B4>`.
    pub correlations: [f64; 4],
    pub comm_a: f64,
    pub comm_b: f64,
    pub residual_a: f64,
    pub residual_b: f64,
    /// `<T1>` and `<T2>` of the decomposition.
    pub term_b: f64,
    pub term_a: f64,
    pub lhs_bell: f64,
    pub bound_sym: f64,
}

pub fn poll_oracle(m: &PollModel) -> Result<PollOracle> {
    m.validate()?;
    let states = m.n_opinion_states();
    if states.saturating_mul(16) > ORACLE_LIMIT {
        return Err(Error::StateSpaceTooLarge(states));
    }
    let mut e = [0.0; 4];
    let (mut comm_a, mut comm_b, mut res_a, mut res_b, mut t1, mut t2) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for (state, p_state) in m.probabilities().into_iter().enumerate() {
        let a1 = m.table(state, 0, false);
        let b1 = m.table(state, 0, true);
        let a2p = m.table(state, 1, false);
        let b2p = m.table(state, 1, true);
        let f3 = m.flip(state, 0, b1);
        let f4 = m.flip(state, 1, b2p);
        let base3 = m.table(state, 1, true);
        let base4 = m.table(state, 0, true);
        for (flip3, p3) in [(false, 1.0 - f3), (true, f3)] {
            for (flip4, p4) in [(false, 1.0 - f4), (true, f4)] {
                let w = p_state * p3 * p4;
                if w == 0.0 {
                    continue;
                }
                let o = Octuple {
                    a1,
                    b1,
                    a2p,
                    b2p,
                    a3: a1,
                    b3p: if flip3 { -base3 } else { base3 },
                    a4p: a2p,
                    b4: if flip4 { -base4 } else { base4 },
                };
                let v = |x: i8| f64::from(x);
                e[0] += w * v(o.a1 * o.b1);
                e[1] += w * v(o.a2p * o.b2p);
                e[2] += w * v(o.a3 * o.b3p);
                e[3] += w * v(o.a4p * o.b4);
                comm_a += w * v(o.a1 * o.a4p - o.a2p * o.a3);
                comm_b += w * v(o.b1 * o.b3p - o.b2p * o.b4);
                res_a += w * v(o.a1 * o.a3 - o.a2p * o.a4p);
                res_b += w * v(o.b1 * o.b4 - o.b2p * o.b3p);
                t1 += w * o.t1() as f64;
                t2 += w * o.t2() as f64;
            }
        }
    }
    Ok(PollOracle {
        correlations: e,
        comm_a,
        comm_b,
        residual_a: res_a,
        residual_b: res_b,
        term_b: t1,
        term_a: t2,
        lhs_bell: (e[0] - e[1]).abs() + (e[2] + e[3]).abs(),
        bound_sym: 2.0 + t1.abs().min(t2.abs()),
    })
}
