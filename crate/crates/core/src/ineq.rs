//! Exact inequality algebra over finite ±1 data and quantum probabilities.
//!
//! The time-indexed CHSH data of one matched pair is an [`Octuple`]:
//! ensemble I yields `A1 B1` at `(a, b)` followed by `A3 B'3` at `(a, b')`;
//! ensemble II yields `A'2 B'2` at `(a', b')` followed by `A'4 B4` at
//! `(a', b)`. For any sign `s` and weight `alpha`,
//!
//! ```text
//! A1 B1 - A'2 B'2 = bellish(s, alpha) - s (alpha T1 + (1 - alpha) T2)
//! T1 = A1 A3 (B1 B'3 - B'2 B4) + B'2 B4 (A1 A3 - A'2 A'4)
//! T2 = A1 A'4 (B1 B4 - B'2 B'3) + B'2 B'3 (A1 A'4 - A'2 A3)
//! ```
//!
//! and bounding each bell-ish bracket by `1 + s A B` gives, for every
//! dataset and every `alpha` in `[0, 1]`,
//!
//! ```text
//! |<A1 B1> - <A'2 B'2>| + |<A3 B'3> + <A'4 B4>| <= 2 + alpha |<T1>| + (1 - alpha) |<T2>|
//! ```
//!
//! When the repeated measurements agree (`A1 = A3`, `A'2 = A'4`, `B1 = B4`,
//! `B'2 = B'3`) the residual brackets vanish, `T1` reduces to
//! `B1 B'3 - B'2 B4` and `T2` to `A1 A'4 - A'2 A3`.

use serde::{Deserialize, Serialize};

use crate::bellops::{bell_operator, joint_probability, make_state, BellSettings, StateSpec};
use crate::error::{Error, Result};
use crate::qmat::expectation;

/// One matched pair of the four-epoch protocol; every field is ±1.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Octuple {
    pub a1: i8,
    pub b1: i8,
    pub a2p: i8,
    pub b2p: i8,
    pub a3: i8,
    pub b3p: i8,
    pub a4p: i8,
    pub b4: i8,
}

impl Octuple {
    /// Fields in the order `A1 B1 A'2 B'2 A3 B'3 A'4 B4`.
    pub fn from_array(v: [i8; 8]) -> Self {
        Self {
            a1: v[0],
            b1: v[1],
            a2p: v[2],
            b2p: v[3],
            a3: v[4],
            b3p: v[5],
            a4p: v[6],
            b4: v[7],
        }
    }

    pub fn to_array(self) -> [i8; 8] {
        [
            self.a1, self.b1, self.a2p, self.b2p, self.a3, self.b3p, self.a4p, self.b4,
        ]
    }

    pub fn is_valid(&self) -> bool {
        self.to_array().iter().all(|&x| x == 1 || x == -1)
    }

    /// `A1 A3 (B1 B'3 - B'2 B4) + B'2 B4 (A1 A3 - A'2 A'4)`
    pub fn t1(&self) -> i64 {
        let [a1, b1, a2p, b2p, a3, b3p, a4p, b4] = self.to_array().map(i64::from);
        a1 * a3 * (b1 * b3p - b2p * b4) + b2p * b4 * (a1 * a3 - a2p * a4p)
    }

    /// `A1 A'4 (B1 B4 - B'2 B'3) + B'2 B'3 (A1 A'4 - A'2 A3)`
    pub fn t2(&self) -> i64 {
        let [a1, b1, a2p, b2p, a3, b3p, a4p, b4] = self.to_array().map(i64::from);
        a1 * a4p * (b1 * b4 - b2p * b3p) + b2p * b3p * (a1 * a4p - a2p * a3)
    }

    /// Per-pair value of the four bell-ish brackets.
    pub fn bellish(&self, sign: i8, alpha: f64) -> f64 {
        let [a1, b1, a2p, b2p, a3, b3p, a4p, b4] = self.to_array().map(f64::from);
        let s = f64::from(sign);
        let beta = 1.0 - alpha;
        alpha * a1 * b1 * (1.0 + s * a3 * b3p) + beta * a1 * b1 * (1.0 + s * a4p * b4)
            - alpha * a2p * b2p * (1.0 + s * a4p * b4)
            - beta * a2p * b2p * (1.0 + s * a3 * b3p)
    }
}

/// Integer sums over a run; every average is one of these divided by `n`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChshSums {
    pub n: i64,
    pub ab: i64,
    pub apbp: i64,
    pub abp: i64,
    pub apb: i64,
    pub comm_a: i64,
    pub comm_b: i64,
    pub residual_a: i64,
    pub residual_b: i64,
    pub t1: i64,
    pub t2: i64,
}

impl ChshSums {
    pub fn from_records(records: &[Octuple]) -> Result<Self> {
        let mut s = ChshSums::default();
        for o in records {
            if !o.is_valid() {
                return Err(Error::InvalidArgument(format!("outcome outside ±1: {o:?}")));
            }
            let [a1, b1, a2p, b2p, a3, b3p, a4p, b4] = o.to_array().map(i64::from);
            s.n += 1;
            s.ab += a1 * b1;
            s.apbp += a2p * b2p;
            s.abp += a3 * b3p;
            s.apb += a4p * b4;
            s.comm_a += a1 * a4p - a2p * a3;
            s.comm_b += b1 * b3p - b2p * b4;
            s.residual_a += a1 * a3 - a2p * a4p;
            s.residual_b += b1 * b4 - b2p * b3p;
            s.t1 += o.t1();
            s.t2 += o.t2();
        }
        Ok(s)
    }

    /// `n * lhs_bell`.
    pub fn lhs_scaled(&self) -> i64 {
        (self.ab - self.apbp).abs() + (self.abp + self.apb).abs()
    }

    /// `n * bound_sym`, exact.
    pub fn bound_sym_scaled(&self) -> i64 {
        2 * self.n + self.t1.abs().min(self.t2.abs())
    }

    /// Sign `s` opposite to `<A3 B'3> + <A'4 B4>` (`-1` on a tie).
    pub fn chosen_sign(&self) -> i8 {
        if self.abp + self.apb >= 0 {
            -1
        } else {
            1
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub n: usize,
    pub alpha: f64,
    /// `<A1B1>`, `<A'2B'2>`, `<A3B'3>`, `<A'4B4>`.
    pub correlations: [f64; 4],
    /// `|<A1B1> - <A'2B'2>| + |<A3B'3> + <A'4B4>|`
    pub lhs_bell: f64,
    /// Sign used in the bell-ish brackets.
    pub sign: i8,
    pub bellish_sum: f64,
    /// `<A1 A'4 - A'2 A3>`
    pub comm_a: f64,
    /// `<B1 B'3 - B'2 B4>`
    pub comm_b: f64,
    /// `<A1 A3 - A'2 A'4>`
    pub residual_a: f64,
    /// `<B1 B4 - B'2 B'3>`
    pub residual_b: f64,
    /// `<T1>`, the B-side term with its residual folded in.
    pub term_b: f64,
    /// `<T2>`, the A-side term with its residual folded in.
    pub term_a: f64,
    /// `<A1B1> - <A'2B'2>`
    pub difference: f64,
    /// `bellish_sum - sign (alpha <T1> + (1 - alpha) <T2>)`
    pub reconstructed: f64,
    pub reconstruction_error: f64,
    /// `2 + min(|<T1>|, |<T2>|)`
    pub bound_sym: f64,
    /// `2 + |<T1>|`
    pub bound_asym: f64,
    /// `2 + alpha |<T1>| + (1 - alpha) |<T2>|`
    pub bound_alpha: f64,
    /// `2 + min(|comm_b|, |comm_a|)`, residuals dropped.
    pub bound_sym_bare: f64,
    /// `2 + |comm_b|`, residuals dropped.
    pub bound_asym_bare: f64,
    /// `lhs_bell <= bound_sym`, decided in integer arithmetic.
    pub holds_sym: bool,
    /// `lhs_bell <= bound_asym`, decided in integer arithmetic.
    pub holds_asym: bool,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::AlphaOutOfRange(alpha))
    }
}

fn require_nonempty(records: &[Octuple]) -> Result<()> {
    if records.is_empty() {
        Err(Error::InvalidArgument("no records".into()))
    } else {
        Ok(())
    }
}

pub fn decompose_chsh(records: &[Octuple], alpha: f64) -> Result<DecompositionReport> {
    check_alpha(alpha)?;
    require_nonempty(records)?;
    let s = ChshSums::from_records(records)?;
    let nf = s.n as f64;
    let avg = |x: i64| x as f64 / nf;
    let sign = s.chosen_sign();
    let bellish_sum = records.iter().map(|o| o.bellish(sign, alpha)).sum::<f64>() / nf;
    let (term_b, term_a) = (avg(s.t1), avg(s.t2));
    let difference = avg(s.ab - s.apbp);
    let reconstructed = bellish_sum - f64::from(sign) * (alpha * term_b + (1.0 - alpha) * term_a);
    let (comm_a, comm_b) = (avg(s.comm_a), avg(s.comm_b));
    Ok(DecompositionReport {
        n: records.len(),
        alpha,
        correlations: [avg(s.ab), avg(s.apbp), avg(s.abp), avg(s.apb)],
        lhs_bell: avg(s.lhs_scaled()),
        sign,
        bellish_sum,
        comm_a,
        comm_b,
        residual_a: avg(s.residual_a),
        residual_b: avg(s.residual_b),
        term_b,
        term_a,
        difference,
        reconstructed,
        reconstruction_error: (reconstructed - difference).abs(),
        bound_sym: avg(s.bound_sym_scaled()),
        bound_asym: 2.0 + term_b.abs(),
        bound_alpha: 2.0 + alpha * term_b.abs() + (1.0 - alpha) * term_a.abs(),
        bound_sym_bare: 2.0 + comm_b.abs().min(comm_a.abs()),
        bound_asym_bare: 2.0 + comm_b.abs(),
        holds_sym: s.lhs_scaled() <= s.bound_sym_scaled(),
        holds_asym: s.lhs_scaled() <= 2 * s.n + s.t1.abs(),
    })
}

/// The endpoint of `[0, 1]` minimizing the alpha-weighted bound.
pub fn default_alpha(records: &[Octuple]) -> Result<f64> {
    let s = ChshSums::from_records(records)?;
    Ok(if s.t1.abs() <= s.t2.abs() { 1.0 } else { 0.0 })
}

/// `(alpha, 2 + alpha |<T1>| + (1 - alpha) |<T2>|)` on `points` evenly spaced alphas.
pub fn alpha_grid(records: &[Octuple], points: usize) -> Result<Vec<(f64, f64)>> {
    require_nonempty(records)?;
    if points < 2 {
        return Err(Error::InvalidArgument("alpha grid needs at least 2 points".into()));
    }
    let s = ChshSums::from_records(records)?;
    let nf = s.n as f64;
    let (t1, t2) = (s.t1.abs() as f64 / nf, s.t2.abs() as f64 / nf);
    Ok((0..points)
        .map(|i| {
            let alpha = i as f64 / (points - 1) as f64;
            (alpha, 2.0 + alpha * t1 + (1.0 - alpha) * t2)
        })
        .collect())
}

const SIMPLEX_TOL: f64 = 1e-12;

/// Joint outcome probabilities for one setting pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityQuad {
    pub p_pp: f64,
    pub p_pm: f64,
    pub p_mp: f64,
    pub p_mm: f64,
}

impl ProbabilityQuad {
    pub fn new(p_pp: f64, p_pm: f64, p_mp: f64, p_mm: f64) -> Result<Self> {
        let q = Self { p_pp, p_pm, p_mp, p_mm };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        let p = [self.p_pp, self.p_pm, self.p_mp, self.p_mm];
        if p.iter().any(|x| !x.is_finite() || *x < -SIMPLEX_TOL) {
            return Err(Error::InvalidProbabilities(format!("negative entry in {p:?}")));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::InvalidProbabilities(format!("sum {total} != 1")));
        }
        Ok(())
    }
}

/// `<AB>` with the single-side marginals `<A>` and `<B>`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMarginals {
    pub correlation: f64,
    pub mean_a: f64,
    pub mean_b: f64,
}

impl CorrelationMarginals {
    pub fn unbiased(correlation: f64) -> Self {
        Self {
            correlation,
            mean_a: 0.0,
            mean_b: 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ProbCorr {
    Quad(ProbabilityQuad),
    Corr(CorrelationMarginals),
}

pub fn quad_from_correlation(c: CorrelationMarginals) -> Result<ProbabilityQuad> {
    let CorrelationMarginals {
        correlation: e,
        mean_a: ma,
        mean_b: mb,
    } = c;
    if [e, ma, mb]
        .iter()
        .any(|x| !x.is_finite() || x.abs() > 1.0 + SIMPLEX_TOL)
    {
        return Err(Error::InvalidProbabilities(format!("moments out of range: {c:?}")));
    }
    ProbabilityQuad::new(
        (1.0 + ma + mb + e) / 4.0,
        (1.0 + ma - mb - e) / 4.0,
        (1.0 - ma + mb - e) / 4.0,
        (1.0 - ma - mb + e) / 4.0,
    )
}

pub fn correlation_from_quad(q: ProbabilityQuad) -> Result<CorrelationMarginals> {
    q.validate()?;
    Ok(CorrelationMarginals {
        correlation: q.p_pp - q.p_pm - q.p_mp + q.p_mm,
        mean_a: q.p_pp + q.p_pm - q.p_mp - q.p_mm,
        mean_b: q.p_pp - q.p_pm + q.p_mp - q.p_mm,
    })
}

pub fn prob_corr_convert(x: ProbCorr) -> Result<ProbCorr> {
    match x {
        ProbCorr::Quad(q) => correlation_from_quad(q).map(ProbCorr::Corr),
        ProbCorr::Corr(c) => quad_from_correlation(c).map(ProbCorr::Quad),
    }
}

/// Probabilities of Wigner's eight instruction sets. Index bits, most
/// significant first, mark a `-` at `(a, b', b'')` positions: index 0 is
/// `(+++)`, index 5 is `(-+-)`, index 7 is `(---)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstructionDistribution {
    probs: [f64; 8],
}

impl InstructionDistribution {
    pub fn new(probs: [f64; 8]) -> Result<Self> {
        if probs.iter().any(|p| !p.is_finite() || *p < -SIMPLEX_TOL) {
            return Err(Error::InvalidProbabilities(format!("negative entry in {probs:?}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::InvalidProbabilities(format!("sum {total} != 1")));
        }
        Ok(Self { probs })
    }

    pub fn uniform() -> Self {
        Self { probs: [0.125; 8] }
    }

    pub fn probs(&self) -> &[f64; 8] {
        &self.probs
    }

    /// Probability of the set with the given signs (each ±1).
    pub fn get(&self, signs: [i8; 3]) -> f64 {
        let idx = signs.iter().fold(0usize, |acc, &s| (acc << 1) | usize::from(s < 0));
        self.probs[idx]
    }
}

/// Wigner's three singlet probabilities, each `p_++` for one setting pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerTriple {
    pub p_ab_prime: f64,
    pub p_aprime_bdprime: f64,
    pub p_a_bdprime: f64,
    /// `<A'B'>`, used to lift `S_W` to the four-term Bell form.
    pub e_aprime_bprime: f64,
}

impl WignerTriple {
    /// Singlet spin-1/2 values `p_++ = sin^2(delta / 2) / 2` for Alice at
    /// `(a, a')` and Bob at `(b', b'')` (degrees).
    pub fn singlet(a: f64, a_prime: f64, b_prime: f64, b_dprime: f64) -> Self {
        let p = |x: f64, y: f64| 0.5 * ((y - x).to_radians() / 2.0).sin().powi(2);
        Self {
            p_ab_prime: p(a, b_prime),
            p_aprime_bdprime: p(a_prime, b_dprime),
            p_a_bdprime: p(a, b_dprime),
            e_aprime_bprime: -(b_prime - a_prime).to_radians().cos(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantumWigner {
    /// The triple doubled, i.e. `sin^2(delta / 2)` for the singlet.
    pub normalized: [f64; 3],
    pub violated: bool,
    /// `E(a,b') + E(a',b'') - E(a,b'')` with `E = 4 p_++ - 1`.
    pub s_w: f64,
    /// `S_W + <A'B'>`.
    pub s_bell: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WignerCheck {
    /// `[p_++(a,b'), p_++(a',b''), p_++(a,b'')]` from the instruction sets.
    pub lhs_terms: [f64; 3],
    /// `p_++(a,b') + p_++(a',b'') - p_++(a,b'')`, which equals `(+-+) + (-+-)`.
    pub slack: f64,
    pub holds: bool,
    pub quantum: Option<QuantumWigner>,
}

pub fn wigner_check(d: &InstructionDistribution, quantum: Option<WignerTriple>) -> WignerCheck {
    let p = |s: [i8; 3]| d.get(s);
    let ab_prime = p([1, -1, 1]) + p([1, -1, -1]);
    let aprime_bdprime = p([1, 1, -1]) + p([-1, 1, -1]);
    let a_bdprime = p([1, -1, -1]) + p([1, 1, -1]);
    let slack = ab_prime + aprime_bdprime - a_bdprime;
    let quantum = quantum.map(|q| {
        let e = |p: f64| 4.0 * p - 1.0;
        let s_w = e(q.p_ab_prime) + e(q.p_aprime_bdprime) - e(q.p_a_bdprime);
        QuantumWigner {
            normalized: [2.0 * q.p_ab_prime, 2.0 * q.p_aprime_bdprime, 2.0 * q.p_a_bdprime],
            violated: q.p_ab_prime + q.p_aprime_bdprime < q.p_a_bdprime,
            s_w,
            s_bell: s_w + q.e_aprime_bprime,
        }
    });
    WignerCheck {
        lhs_terms: [ab_prime, aprime_bdprime, a_bdprime],
        slack,
        holds: slack >= -SIMPLEX_TOL,
        quantum,
    }
}

/// `delta_AB - delta_BA' - delta_A'B' - delta_B'A` for four ±1 values.
pub fn gwzz_delta(a: i8, a_prime: i8, b: i8, b_prime: i8) -> i32 {
    let d = |x: i8, y: i8| i32::from(x == y);
    d(a, b) - d(b, a_prime) - d(a_prime, b_prime) - d(b_prime, a)
}

/// Time-labelled outcomes of the four GHZ runs `E1 = A B' C'`,
/// `E2 = A' B C'`, `E3 = A' B' C`, `E4 = A B C` (unprimed is x, primed y),
/// together with the alternate-order values `B'2` and `B3` that enter
/// `Delta_B = B2 B'3 - B'2 B3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MerminTrial {
    pub a1: i8,
    pub a2p: i8,
    pub a3p: i8,
    pub a4: i8,
    pub b1p: i8,
    pub b2: i8,
    pub b3p: i8,
    pub b4: i8,
    pub c1p: i8,
    pub c2p: i8,
    pub c3: i8,
    pub c4: i8,
    pub b2p: i8,
    pub b3: i8,
}

impl MerminTrial {
    /// Every outcome equal to `v`, as for a static model.
    pub fn constant(v: i8) -> Self {
        Self {
            a1: v,
            a2p: v,
            a3p: v,
            a4: v,
            b1p: v,
            b2: v,
            b3p: v,
            b4: v,
            c1p: v,
            c2p: v,
            c3: v,
            c4: v,
            b2p: v,
            b3: v,
        }
    }

    fn values(&self) -> [i8; 14] {
        [
            self.a1, self.a2p, self.a3p, self.a4, self.b1p, self.b2, self.b3p, self.b4, self.c1p, self.c2p, self.c3,
            self.c4, self.b2p, self.b3,
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MerminProductCheck {
    /// `E1 E2 E3 E4` from the twelve measured outcomes.
    pub product: i32,
    pub delta_b: i32,
    /// `B'1 Delta_B B4`
    pub delta_b_term: i32,
    /// `1 + B'1 Delta_B B4`
    pub lhs_identity: i32,
    /// Immediate repeats agree: `A1A4`, `A'2A'3`, `C'1C'2`, `C3C4`, `B'1B'2`, `B3B4` all +1.
    pub reduction_valid: bool,
    /// `product == lhs_identity`; guaranteed when `reduction_valid`.
    pub consistent: bool,
}

pub fn mermin_product_check(t: &MerminTrial) -> Result<MerminProductCheck> {
    if t.values().iter().any(|&x| x != 1 && x != -1) {
        return Err(Error::InvalidArgument(format!("outcome outside ±1: {t:?}")));
    }
    let v = |x: i8| i32::from(x);
    let product = t.values()[..12].iter().map(|&x| v(x)).product::<i32>();
    let delta_b = v(t.b2) * v(t.b3p) - v(t.b2p) * v(t.b3);
    let delta_b_term = v(t.b1p) * delta_b * v(t.b4);
    let lhs_identity = 1 + delta_b_term;
    let reduction_valid = [
        (t.a1, t.a4),
        (t.a2p, t.a3p),
        (t.c1p, t.c2p),
        (t.c3, t.c4),
        (t.b1p, t.b2p),
        (t.b3, t.b4),
    ]
    .iter()
    .all(|(x, y)| x == y);
    Ok(MerminProductCheck {
        product,
        delta_b,
        delta_b_term,
        lhs_identity,
        reduction_valid,
        consistent: product == lhs_identity,
    })
}

/// Product of four expectation values, e.g. the GHZ quadruple.
pub fn mermin_quadruple_product(e: [f64; 4]) -> f64 {
    e.iter().product()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardyReport {
    /// `[p_++(a',b'), p_++(a,b), p_+-(a',b), p_-+(a,b')]`
    pub p_quad: [f64; 4],
    /// `p_++(a',b')`
    pub wigner_form_lhs: f64,
    /// `p_++(a,b) + p_+-(a',b) + p_-+(a,b')`
    pub wigner_form_rhs: f64,
    pub violated: bool,
    /// `sqrt <S^2>`
    pub bell_value: f64,
    pub s_squared: f64,
    /// `<AB + A'B + AB' - A'B'>`
    pub s_expectation: f64,
    /// `<A'B'> - <AB> + <A'B> + <AB'>`
    pub boschi_form: f64,
}

pub fn hardy_boschi_check(spec: &StateSpec<f64>, bs: &BellSettings<f64>) -> Result<HardyReport> {
    if !matches!(spec, StateSpec::Hardy { .. }) {
        return Err(Error::InvalidState("Hardy check needs a Hardy state".into()));
    }
    bs.validate()?;
    let psi = make_state(spec)?;
    let p = |x, sx, y, sy| joint_probability(&psi, x, sx, y, sy);
    let p_quad = [
        p(bs.a_prime, 1, bs.b_prime, 1)?,
        p(bs.a, 1, bs.b, 1)?,
        p(bs.a_prime, 1, bs.b, -1)?,
        p(bs.a, -1, bs.b_prime, 1)?,
    ];
    let corr = |x, y| -> Result<f64> { Ok(p(x, 1, y, 1)? - p(x, 1, y, -1)? - p(x, -1, y, 1)? + p(x, -1, y, -1)?) };
    let s_op = bell_operator(bs);
    let s_squared = expectation(&psi, &(&s_op * &s_op))?.re;
    let rhs = p_quad[1] + p_quad[2] + p_quad[3];
    Ok(HardyReport {
        p_quad,
        wigner_form_lhs: p_quad[0],
        wigner_form_rhs: rhs,
        violated: p_quad[0] > rhs,
        bell_value: s_squared.max(0.0).sqrt(),
        s_squared,
        s_expectation: expectation(&psi, &s_op)?.re,
        boschi_form: corr(bs.a_prime, bs.b_prime)? - corr(bs.a, bs.b)?
            + corr(bs.a_prime, bs.b)?
            + corr(bs.a, bs.b_prime)?,
    })
}
