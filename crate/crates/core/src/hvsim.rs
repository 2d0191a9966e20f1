//! Local hidden-variable Monte Carlo.
//!
//! Each pair carries a unit vector `lambda_a` and its partner
//! `lambda_b = -lambda_a`. A measurement at setting `s` compares `lambda`
//! with the Bloch direction `n(s)` of [`MeasurementSetting::bloch_direction`].
//!
//! Randomness is counter based: the generator for pair `i` is ChaCha8 keyed by
//! the run seed, on stream `i`, positioned at a fixed offset per use slot.
//! Results therefore do not depend on thread count or work splitting, and the
//! two ensembles of a matched pair see the same initial `lambda` by
//! construction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bellops::{BellSettings, MeasurementSetting, ParticleKind};
use crate::error::{Error, Result};
use crate::ineq::Octuple;

pub type Vec3 = [f64; 3];

const UNIT_TOL: f64 = 1e-9;
/// Outcomes are deterministic when `|n . lambda| >= 1 - CERTAIN_TOL`.
const CERTAIN_TOL: f64 = 1e-12;
const SLOT_WORDS: u32 = 20;

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

fn scale(a: Vec3, k: f64) -> Vec3 {
    [a[0] * k, a[1] * k, a[2] * k]
}

fn neg(a: Vec3) -> Vec3 {
    scale(a, -1.0)
}

fn normalize(a: Vec3) -> Vec3 {
    scale(a, 1.0 / norm(a))
}

/// `sign(x)` with `sign(0) = +1`.
fn sign(x: f64) -> i8 {
    if x >= 0.0 {
        1
    } else {
        -1
    }
}

/// Generator for one `(seed, pair, slot)` triple.
pub fn slot_rng(seed: u64, index: u64, slot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng.set_word_pos(u128::from(slot) << SLOT_WORDS);
    rng
}

const SLOT_SOURCE: u64 = 0;

fn epoch_slot(epoch: u64, side: u64) -> u64 {
    1 + 2 * (epoch - 1) + side
}

/// Uniform point on the unit sphere from two uniform draws.
pub fn sphere_point<R: Rng>(rng: &mut R) -> Vec3 {
    let z: f64 = 2.0 * rng.random::<f64>() - 1.0;
    let phi = std::f64::consts::TAU * rng.random::<f64>();
    let r = (1.0 - z * z).max(0.0).sqrt();
    [r * phi.cos(), r * phi.sin(), z]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HiddenPair {
    pub lambda_a: Vec3,
    pub lambda_b: Vec3,
    pub pair_index: u64,
}

pub fn sample_pair(seed: u64, index: u64) -> HiddenPair {
    let lambda_a = sphere_point(&mut slot_rng(seed, index, SLOT_SOURCE));
    HiddenPair {
        lambda_a,
        lambda_b: neg(lambda_a),
        pair_index: index,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelFamily {
    /// `sign(n . lambda)`, lambda untouched.
    ClassicalSign,
    /// `P(+) = (1 + n . lambda)/2`, then `lambda -> outcome * n`.
    Collapse,
    /// `sign(n . lambda)`, then lambda is dragged part of the way toward
    /// `outcome * n` with a rate that depends on the rotation sense.
    HystereticCollapse,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: ModelFamily,
    /// Fraction of the arc toward the outcome axis covered per measurement, in `[0, 1]`.
    pub drag: f64,
    /// Relative drag change by rotation sense, in `[-1, 1]`.
    pub asymmetry: f64,
    pub kind: ParticleKind,
}

impl ModelSpec {
    pub fn classical(kind: ParticleKind) -> Self {
        Self {
            family: ModelFamily::ClassicalSign,
            drag: 0.0,
            asymmetry: 0.0,
            kind,
        }
    }

    pub fn collapse(kind: ParticleKind) -> Self {
        Self {
            family: ModelFamily::Collapse,
            drag: 1.0,
            asymmetry: 0.0,
            kind,
        }
    }

    pub fn hysteretic(kind: ParticleKind, drag: f64, asymmetry: f64) -> Result<Self> {
        let m = Self {
            family: ModelFamily::HystereticCollapse,
            drag,
            asymmetry,
            kind,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.drag) {
            return Err(Error::InvalidModel(format!("drag {} outside [0, 1]", self.drag)));
        }
        if !(-1.0..=1.0).contains(&self.asymmetry) {
            return Err(Error::InvalidModel(format!(
                "asymmetry {} outside [-1, 1]",
                self.asymmetry
            )));
        }
        Ok(())
    }
}

/// Spherical interpolation from `from` toward `to` by fraction `t` of the arc.
fn slerp(from: Vec3, to: Vec3, t: f64) -> Vec3 {
    let c = dot(from, to).clamp(-1.0, 1.0);
    let w = c.acos();
    let s = w.sin();
    let (f0, f1) = if s > 1e-12 {
        (((1.0 - t) * w).sin() / s, (t * w).sin() / s)
    } else {
        (1.0 - t, t)
    };
    normalize([
        f0 * from[0] + f1 * to[0],
        f0 * from[1] + f1 * to[1],
        f0 * from[2] + f1 * to[2],
    ])
}

/// One measurement of `lam` at setting `s`; `noise` is a uniform draw in `[0, 1)`.
pub fn measure(model: &ModelSpec, lam: Vec3, s: MeasurementSetting<f64>, noise: f64) -> Result<(i8, Vec3)> {
    check_unit(lam)?;
    Ok(measure_along(model, lam, s.bloch_direction(), noise))
}

fn check_unit(lam: Vec3) -> Result<()> {
    let len = norm(lam);
    if len == 0.0 || !len.is_finite() {
        return Err(Error::ZeroNorm);
    }
    if (len - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnit(len));
    }
    Ok(())
}

/// [`measure`] with the analyzer direction precomputed and `lam` already unit.
fn measure_along(model: &ModelSpec, lam: Vec3, n: Vec3, noise: f64) -> (i8, Vec3) {
    let c = dot(n, lam);
    match model.family {
        ModelFamily::ClassicalSign => (sign(c), lam),
        ModelFamily::Collapse => {
            let outcome = if c >= 1.0 - CERTAIN_TOL {
                1
            } else if c <= -1.0 + CERTAIN_TOL {
                -1
            } else if noise < 0.5 * (1.0 + c) {
                1
            } else {
                -1
            };
            (outcome, scale(n, f64::from(outcome)))
        }
        ModelFamily::HystereticCollapse => {
            let outcome = sign(c);
            let target = scale(n, f64::from(outcome));
            // y component of lam x target: the rotation sense about the analyzer's normal
            let sense = sign(lam[2] * target[0] - lam[0] * target[2]);
            let t = (model.drag * (1.0 + model.asymmetry * f64::from(sense))).clamp(0.0, 1.0);
            (outcome, slerp(lam, target, t))
        }
    }
}

/// Which hidden variables feed the epoch-3 and epoch-4 measurements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchingScheme {
    /// Fresh pairs drawn until Alice's outcome equals her earlier one.
    ResultMatch,
    /// The initial lambda is measured again.
    InputMatch,
    /// The lambda emerging from the earlier measurement is measured.
    OutputChain,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolOptions {
    /// Overwrite `A3` with `A1` and `A'4` with `A'2` where they differ.
    pub enforce_repeat_consistency: bool,
    /// Fresh draws allowed per result-matched epoch.
    pub max_match_draws: u32,
}

impl Default for ProtocolOptions {
    fn default() -> Self {
        Self {
            enforce_repeat_consistency: false,
            max_match_draws: 64,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunDiagnostics {
    /// Fraction of pairs with `A1 = A3`, measured before any enforcement.
    pub rate_a1_a3: f64,
    pub rate_a2_a4: f64,
    pub rate_b1_b4: f64,
    pub rate_b2_b3: f64,
    /// Outcomes overwritten by repeat-consistency enforcement.
    pub forced_repeats: u64,
    /// Result-matched epochs that ran out of draws without a match.
    pub unmatched: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChshRun {
    pub n: usize,
    pub records: Vec<Octuple>,
    pub settings: BellSettings<f64>,
    pub scheme: MatchingScheme,
    pub model: ModelSpec,
    pub seed: u64,
    pub diagnostics: RunDiagnostics,
}

/// Sample mean and standard error of the mean (n - 1 variance).
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

impl ChshRun {
    fn stat(&self, f: impl Fn(&Octuple) -> i8) -> (f64, f64) {
        let xs: Vec<f64> = self.records.iter().map(|o| f64::from(f(o))).collect();
        mean_stderr(&xs)
    }

    /// `(mean, stderr)` of `A1B1`, `A'2B'2`, `A3B'3`, `A'4B4`.
    pub fn correlation_estimates(&self) -> [(f64, f64); 4] {
        [
            self.stat(|o| o.a1 * o.b1),
            self.stat(|o| o.a2p * o.b2p),
            self.stat(|o| o.a3 * o.b3p),
            self.stat(|o| o.a4p * o.b4),
        ]
    }

    /// `(mean, stderr)` of `B1 B'3 - B'2 B4`.
    pub fn comm_b_estimate(&self) -> (f64, f64) {
        self.stat(|o| o.b1 * o.b3p - o.b2p * o.b4)
    }

    /// `(mean, stderr)` of `A1 A'4 - A'2 A3`.
    pub fn comm_a_estimate(&self) -> (f64, f64) {
        self.stat(|o| o.a1 * o.a4p - o.a2p * o.a3)
    }
}

/// One analyzer's view of a pair. The slot generator is built on first use
/// because deterministic families never draw from it.
struct Side<'a> {
    model: &'a ModelSpec,
    seed: u64,
    index: u64,
    slot: u64,
    rng: Option<ChaCha8Rng>,
}

impl<'a> Side<'a> {
    fn new(model: &'a ModelSpec, seed: u64, index: u64, slot: u64) -> Self {
        Self {
            model,
            seed,
            index,
            slot,
            rng: None,
        }
    }

    fn rng(&mut self) -> &mut ChaCha8Rng {
        let (seed, index, slot) = (self.seed, self.index, self.slot);
        self.rng.get_or_insert_with(|| slot_rng(seed, index, slot))
    }

    fn measure(&mut self, lam: Vec3, n: Vec3) -> Result<(i8, Vec3)> {
        check_unit(lam)?;
        let u: f64 = match self.model.family {
            ModelFamily::Collapse => self.rng().random(),
            ModelFamily::ClassicalSign | ModelFamily::HystereticCollapse => 0.0,
        };
        Ok(measure_along(self.model, lam, n, u))
    }
}

struct PairOutcome {
    record: Octuple,
    forced: u64,
    unmatched: u64,
    repeats: [bool; 4],
}

/// Bloch directions of `a, a', b, b'`, computed once per run.
#[derive(Clone, Copy)]
struct Dirs {
    a: Vec3,
    a_prime: Vec3,
    b: Vec3,
    b_prime: Vec3,
}

impl Dirs {
    fn of(bs: &BellSettings<f64>) -> Self {
        Self {
            a: bs.a.bloch_direction(),
            a_prime: bs.a_prime.bloch_direction(),
            b: bs.b.bloch_direction(),
            b_prime: bs.b_prime.bloch_direction(),
        }
    }
}

fn simulate_pair(
    model: &ModelSpec,
    bs: &Dirs,
    scheme: MatchingScheme,
    seed: u64,
    index: u64,
    opts: &ProtocolOptions,
) -> Result<PairOutcome> {
    let pair = sample_pair(seed, index);
    let side = |epoch, s| Side::new(model, seed, index, epoch_slot(epoch, s));
    let (mut a_1, mut b_1) = (side(1, 0), side(1, 1));
    let (mut a_2, mut b_2) = (side(2, 0), side(2, 1));
    let (mut a_3, mut b_3) = (side(3, 0), side(3, 1));
    let (mut a_4, mut b_4) = (side(4, 0), side(4, 1));

    let (a1, la1) = a_1.measure(pair.lambda_a, bs.a)?;
    let (b1, lb1) = b_1.measure(pair.lambda_b, bs.b)?;
    let (a2p, la2) = a_2.measure(pair.lambda_a, bs.a_prime)?;
    let (b2p, lb2) = b_2.measure(pair.lambda_b, bs.b_prime)?;

    let mut unmatched = 0;
    let (a3, b3p, a4p, b4) = match scheme {
        MatchingScheme::OutputChain => (
            a_3.measure(la1, bs.a)?.0,
            b_3.measure(lb1, bs.b_prime)?.0,
            a_4.measure(la2, bs.a_prime)?.0,
            b_4.measure(lb2, bs.b)?.0,
        ),
        MatchingScheme::InputMatch => (
            a_3.measure(pair.lambda_a, bs.a)?.0,
            b_3.measure(pair.lambda_b, bs.b_prime)?.0,
            a_4.measure(pair.lambda_a, bs.a_prime)?.0,
            b_4.measure(pair.lambda_b, bs.b)?.0,
        ),
        MatchingScheme::ResultMatch => {
            let mut matched = |alice: &mut Side, bob: &mut Side, sa: Vec3, sb: Vec3, want: i8| -> Result<(i8, i8)> {
                let mut last = (0, 0);
                for _ in 0..opts.max_match_draws.max(1) {
                    let fresh = sphere_point(alice.rng());
                    let (oa, _) = alice.measure(fresh, sa)?;
                    let (ob, _) = bob.measure(neg(fresh), sb)?;
                    last = (oa, ob);
                    if oa == want {
                        return Ok(last);
                    }
                }
                unmatched += 1;
                Ok(last)
            };
            let (a3, b3p) = matched(&mut a_3, &mut b_3, bs.a, bs.b_prime, a1)?;
            let (a4p, b4) = matched(&mut a_4, &mut b_4, bs.a_prime, bs.b, a2p)?;
            (a3, b3p, a4p, b4)
        }
    };

    let repeats = [a1 == a3, a2p == a4p, b1 == b4, b2p == b3p];
    let mut record = Octuple {
        a1,
        b1,
        a2p,
        b2p,
        a3,
        b3p,
        a4p,
        b4,
    };
    let mut forced = 0;
    if opts.enforce_repeat_consistency {
        if record.a3 != a1 {
            record.a3 = a1;
            forced += 1;
        }
        if record.a4p != a2p {
            record.a4p = a2p;
            forced += 1;
        }
    }
    Ok(PairOutcome {
        record,
        forced,
        unmatched,
        repeats,
    })
}

fn check_kind(model: &ModelSpec, kind: ParticleKind) -> Result<()> {
    if model.kind == kind {
        Ok(())
    } else {
        Err(Error::InvalidSettings(format!(
            "model kind {:?} does not match settings kind {:?}",
            model.kind, kind
        )))
    }
}

pub fn run_chsh_protocol(
    model: &ModelSpec,
    bs: &BellSettings<f64>,
    n: usize,
    scheme: MatchingScheme,
    seed: u64,
) -> Result<ChshRun> {
    run_chsh_protocol_with(model, bs, n, scheme, seed, &ProtocolOptions::default())
}

pub fn run_chsh_protocol_with(
    model: &ModelSpec,
    bs: &BellSettings<f64>,
    n: usize,
    scheme: MatchingScheme,
    seed: u64,
    opts: &ProtocolOptions,
) -> Result<ChshRun> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    model.validate()?;
    bs.validate()?;
    check_kind(model, bs.kind())?;
    let dirs = Dirs::of(bs);
    let outcomes = (0..n as u64)
        .into_par_iter()
        .map(|i| simulate_pair(model, &dirs, scheme, seed, i, opts))
        .collect::<Result<Vec<_>>>()?;
    let mut counts = [0u64; 4];
    let mut diagnostics = RunDiagnostics::default();
    for o in &outcomes {
        for (c, r) in counts.iter_mut().zip(o.repeats) {
            *c += u64::from(r);
        }
        diagnostics.forced_repeats += o.forced;
        diagnostics.unmatched += o.unmatched;
    }
    let rate = |c: u64| c as f64 / n as f64;
    diagnostics.rate_a1_a3 = rate(counts[0]);
    diagnostics.rate_a2_a4 = rate(counts[1]);
    diagnostics.rate_b1_b4 = rate(counts[2]);
    diagnostics.rate_b2_b3 = rate(counts[3]);
    Ok(ChshRun {
        n,
        records: outcomes.into_iter().map(|o| o.record).collect(),
        settings: *bs,
        scheme,
        model: *model,
        seed,
        diagnostics,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TandemRecord {
    pub n: usize,
    /// `<o(first) o(second after first)>`
    pub corr_fs: f64,
    /// `<o(second) o(first after second)>`
    pub corr_sf: f64,
    pub diff: f64,
    pub stderr_fs: f64,
    pub stderr_sf: f64,
    /// Standard error of the per-particle difference.
    pub stderr_diff: f64,
    /// Largest per-particle `|fs - sf|`.
    pub max_abs_pair_diff: i32,
}

/// Two analyzers in series on one particle, in both orders.
pub fn tandem_cross(
    model: &ModelSpec,
    first: MeasurementSetting<f64>,
    second: MeasurementSetting<f64>,
    n: usize,
    seed: u64,
) -> Result<TandemRecord> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    model.validate()?;
    check_kind(model, first.kind)?;
    check_kind(model, second.kind)?;
    let (n1, n2) = (first.bloch_direction(), second.bloch_direction());
    let pairs = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let lam = sample_pair(seed, i).lambda_a;
            let mut fs = Side::new(model, seed, i, epoch_slot(1, 0));
            let (o1, l1) = fs.measure(lam, n1)?;
            let (o2, _) = fs.measure(l1, n2)?;
            let mut sf = Side::new(model, seed, i, epoch_slot(2, 0));
            let (p2, l2) = sf.measure(lam, n2)?;
            let (p1, _) = sf.measure(l2, n1)?;
            Ok((o1 * o2, p2 * p1))
        })
        .collect::<Result<Vec<(i8, i8)>>>()?;
    let fs: Vec<f64> = pairs.iter().map(|p| f64::from(p.0)).collect();
    let sf: Vec<f64> = pairs.iter().map(|p| f64::from(p.1)).collect();
    let d: Vec<f64> = pairs.iter().map(|p| f64::from(p.0 - p.1)).collect();
    let (corr_fs, stderr_fs) = mean_stderr(&fs);
    let (corr_sf, stderr_sf) = mean_stderr(&sf);
    let (diff, stderr_diff) = mean_stderr(&d);
    Ok(TandemRecord {
        n,
        corr_fs,
        corr_sf,
        diff,
        stderr_fs,
        stderr_sf,
        stderr_diff,
        max_abs_pair_diff: pairs.iter().map(|p| i32::from(p.0 - p.1).abs()).max().unwrap_or(0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spin(d: f64) -> MeasurementSetting<f64> {
        MeasurementSetting::degrees(d, ParticleKind::SpinHalf)
    }

    #[test]
    fn sample_pair_is_deterministic_and_antiparallel() {
        let p = sample_pair(7, 123);
        assert_eq!(p, sample_pair(7, 123));
        assert_ne!(p.lambda_a, sample_pair(7, 124).lambda_a);
        assert_eq!(dot(p.lambda_a, p.lambda_b), -dot(p.lambda_a, p.lambda_a));
        assert!((norm(p.lambda_a) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn aligned_measurements() {
        let s = spin(30.0);
        let n = s.bloch_direction();
        let classical = ModelSpec::classical(ParticleKind::SpinHalf);
        assert_eq!(measure(&classical, n, s, 0.99).unwrap(), (1, n));
        let collapse = ModelSpec::collapse(ParticleKind::SpinHalf);
        for u in [0.0, 0.5, 0.999_999] {
            let (o, l) = measure(&collapse, n, s, u).unwrap();
            assert_eq!(o, 1);
            assert!(dot(l, n) > 1.0 - 1e-15);
        }
    }

    #[test]
    fn measure_rejects_bad_lambda() {
        let m = ModelSpec::classical(ParticleKind::Photon);
        let s = MeasurementSetting::degrees(0.0, ParticleKind::Photon);
        assert_eq!(measure(&m, [0.0; 3], s, 0.1), Err(Error::ZeroNorm));
        assert!(matches!(measure(&m, [2.0, 0.0, 0.0], s, 0.1), Err(Error::NotUnit(_))));
    }

    #[test]
    fn tie_breaks_to_plus() {
        let m = ModelSpec::classical(ParticleKind::SpinHalf);
        assert_eq!(measure(&m, [0.0, 1.0, 0.0], spin(0.0), 0.5).unwrap().0, 1);
    }

    #[test]
    fn hysteretic_zero_drag_is_static() {
        let m = ModelSpec::hysteretic(ParticleKind::SpinHalf, 0.0, 0.7).unwrap();
        let lam = normalize([0.3, -0.4, 0.5]);
        let (o, l) = measure(&m, lam, spin(40.0), 0.2).unwrap();
        assert_eq!(o, sign(dot(spin(40.0).bloch_direction(), lam)));
        assert!(l.iter().zip(lam).all(|(a, b)| (a - b).abs() < 1e-15));
        assert!(ModelSpec::hysteretic(ParticleKind::SpinHalf, 1.2, 0.0).is_err());
        assert!(ModelSpec::hysteretic(ParticleKind::SpinHalf, 0.5, -1.5).is_err());
    }

    #[test]
    fn slerp_endpoints() {
        let a = [1.0, 0.0, 0.0];
        let b = [0.0, 0.0, 1.0];
        let mid = slerp(a, b, 0.5);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((mid[0] - h).abs() < 1e-15 && (mid[2] - h).abs() < 1e-15);
        assert_eq!(slerp(a, a, 0.3), a);
    }

    #[test]
    fn result_match_aligns_alice() {
        let bs = BellSettings::from_degrees(ParticleKind::SpinHalf, [0.0, 90.0, 45.0, 135.0]);
        let m = ModelSpec::collapse(ParticleKind::SpinHalf);
        let run = run_chsh_protocol(&m, &bs, 2000, MatchingScheme::ResultMatch, 5).unwrap();
        assert_eq!(run.diagnostics.unmatched, 0);
        assert!(run.records.iter().all(|o| o.a1 == o.a3 && o.a2p == o.a4p));
    }

    #[test]
    fn enforcement_counts_overwrites() {
        let bs = BellSettings::from_degrees(ParticleKind::SpinHalf, [0.0, 90.0, 45.0, 135.0]);
        let m = ModelSpec::collapse(ParticleKind::SpinHalf);
        let opts = ProtocolOptions {
            enforce_repeat_consistency: true,
            ..ProtocolOptions::default()
        };
        let run = run_chsh_protocol_with(&m, &bs, 2000, MatchingScheme::InputMatch, 9, &opts).unwrap();
        assert!(run.diagnostics.forced_repeats > 0);
        assert!(run.records.iter().all(|o| o.a1 == o.a3 && o.a2p == o.a4p));
        assert!(run.diagnostics.rate_a1_a3 < 1.0);
    }

    #[test]
    fn kind_mismatch_and_empty_runs_rejected() {
        let bs = BellSettings::from_degrees(ParticleKind::Photon, [0.0; 4]);
        let m = ModelSpec::classical(ParticleKind::SpinHalf);
        assert!(run_chsh_protocol(&m, &bs, 10, MatchingScheme::OutputChain, 1).is_err());
        let m = ModelSpec::classical(ParticleKind::Photon);
        assert!(run_chsh_protocol(&m, &bs, 0, MatchingScheme::OutputChain, 1).is_err());
    }

    #[test]
    fn stderr_of_constant_is_zero() {
        assert_eq!(mean_stderr(&[2.0, 2.0, 2.0]), (2.0, 0.0));
    }
}
