//! Measurement observables and the Bell-type operators built from them.
//!
//! Conventions:
//!
//! * `|H>` is basis index 0 of each party (`sigma_z = +1`), `|V>` is index 1.
//!   The `+` of a GHZ ket is the same `sigma_z = +1` vector.
//! * An analyzer at angle `theta` measures `cos(k theta) sigma_z + sin(k theta) sigma_x`
//!   with `k = 1` for spin-1/2 and `k = 2` for photon polarization, so the
//!   commutator of two settings is `2i sigma_y sin(k (a' - a))`.
//! * The CHSH operator is `AB + A'B + AB' - A'B'` and its square is
//!   `4 - [A,A'][B,B']`. The Wigner operator `AB' + A'B'' - AB'' + A'B'`
//!   squares to `4 + [A,A'][B',B'']`.
//! * With `sigma_x`, `sigma_y` and the Pauli phases above, the state
//!   `(|+++> - |--->)/sqrt 2` gives `E(x,y,y) = E(y,x,y) = E(y,y,x) = +1`
//!   and `E(x,x,x) = -1` with no extra sign.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::{commutator, embed, expectation, kron, kron_all, top_eigenpair_psd, ComplexMatrix, StateVector};
use crate::scalar::Real;

/// Unit Bloch direction.
pub type Direction<T> = [T; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParticleKind {
    SpinHalf,
    Photon,
}

impl ParticleKind {
    /// Multiplier between analyzer angle and Bloch-sphere angle.
    pub fn angle_factor(self) -> u32 {
        match self {
            ParticleKind::SpinHalf => 1,
            ParticleKind::Photon => 2,
        }
    }
}

/// One analyzer orientation (radians) for a given particle kind.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSetting<T> {
    pub angle: T,
    pub kind: ParticleKind,
}

impl<T: Real> MeasurementSetting<T> {
    pub fn new(angle: T, kind: ParticleKind) -> Self {
        Self { angle, kind }
    }

    pub fn degrees(deg: f64, kind: ParticleKind) -> Self {
        Self::new(T::from_degrees(deg), kind)
    }

    /// Bloch angle `k * angle`.
    pub fn bloch_angle(&self) -> T {
        T::lit(f64::from(self.kind.angle_factor())) * self.angle
    }

    /// Direction `(sin k theta, 0, cos k theta)` in the z-x plane.
    pub fn bloch_direction(&self) -> Direction<T> {
        let t = self.bloch_angle();
        [t.sin(), T::zero(), t.cos()]
    }
}

pub fn axis_x<T: Real>() -> Direction<T> {
    [T::one(), T::zero(), T::zero()]
}

pub fn axis_y<T: Real>() -> Direction<T> {
    [T::zero(), T::one(), T::zero()]
}

pub fn axis_z<T: Real>() -> Direction<T> {
    [T::zero(), T::zero(), T::one()]
}

/// Direction in the x-y plane at azimuth `phi`.
pub fn equatorial<T: Real>(phi: T) -> Direction<T> {
    [phi.cos(), phi.sin(), T::zero()]
}

/// `n . sigma`.
pub fn bloch_observable<T: Real>(n: Direction<T>) -> ComplexMatrix<T> {
    let x = ComplexMatrix::pauli_x().scale_real(n[0]);
    let y = ComplexMatrix::pauli_y().scale_real(n[1]);
    let z = ComplexMatrix::pauli_z().scale_real(n[2]);
    &(&x + &y) + &z
}

/// `cos(k theta) sigma_z + sin(k theta) sigma_x`.
pub fn observable<T: Real>(s: MeasurementSetting<T>) -> ComplexMatrix<T> {
    bloch_observable(s.bloch_direction())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GhzPhase {
    /// `(|+...+> - |-...->)/sqrt 2`
    MinusOne,
    /// `(|+...+> + i|-...->)/sqrt 2`
    PlusI,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateSpec<T> {
    /// `(|HV> - |VH>)/sqrt 2`
    Singlet,
    /// `|H>|V>`
    ProductHv,
    /// `|C_s1>|C_-s1>` with `|C_s> = (|H> + s i|V>)/sqrt 2`.
    CircularPair {
        s1: Sign,
    },
    Ghz {
        n: usize,
        phase: GhzPhase,
    },
    /// `alpha |HH> - beta |VV>`, normalized on construction.
    Hardy {
        alpha: T,
        beta: T,
    },
}

impl<T: Real> StateSpec<T> {
    pub fn parties(&self) -> usize {
        match self {
            StateSpec::Ghz { n, .. } => *n,
            _ => 2,
        }
    }
}

pub fn make_state<T: Real>(spec: &StateSpec<T>) -> Result<StateVector<T>> {
    let zero = Complex::new(T::zero(), T::zero());
    let re = |x: f64| Complex::new(T::lit(x), T::zero());
    match *spec {
        StateSpec::Singlet => StateVector::new(vec![zero, re(1.0), re(-1.0), zero]),
        StateSpec::ProductHv => StateVector::basis(4, 1),
        StateSpec::CircularPair { s1 } => {
            let s = T::lit(f64::from(s1.value()));
            let first = StateVector::new(vec![re(1.0), Complex::new(T::zero(), s)])?;
            let second = StateVector::new(vec![re(1.0), Complex::new(T::zero(), -s)])?;
            first.kron(&second)
        }
        StateSpec::Ghz { n, phase } => {
            if !(3..=4).contains(&n) {
                return Err(Error::InvalidState(format!("GHZ needs 3 or 4 parties, got {n}")));
            }
            let dim = 1 << n;
            let mut amps = vec![zero; dim];
            amps[0] = re(1.0);
            amps[dim - 1] = match phase {
                GhzPhase::MinusOne => re(-1.0),
                GhzPhase::PlusI => Complex::new(T::zero(), T::one()),
            };
            StateVector::new(amps)
        }
        StateSpec::Hardy { alpha, beta } => {
            if !(alpha > T::zero() && beta > T::zero() && alpha.is_finite() && beta.is_finite()) {
                return Err(Error::InvalidState(format!(
                    "Hardy coefficients must be positive and finite (alpha {alpha}, beta {beta})"
                )));
            }
            StateVector::new(vec![
                Complex::new(alpha, T::zero()),
                zero,
                zero,
                Complex::new(-beta, T::zero()),
            ])
        }
    }
}

/// Analyzer orientations for a two-party experiment; `b_dprime` is Bob's
/// third setting in Wigner's triple.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellSettings<T> {
    pub a: MeasurementSetting<T>,
    pub a_prime: MeasurementSetting<T>,
    pub b: MeasurementSetting<T>,
    pub b_prime: MeasurementSetting<T>,
    pub b_dprime: Option<MeasurementSetting<T>>,
}

impl<T: Real> BellSettings<T> {
    pub fn new(
        a: MeasurementSetting<T>,
        a_prime: MeasurementSetting<T>,
        b: MeasurementSetting<T>,
        b_prime: MeasurementSetting<T>,
    ) -> Result<Self> {
        let s = Self {
            a,
            a_prime,
            b,
            b_prime,
            b_dprime: None,
        };
        s.validate()?;
        Ok(s)
    }

    /// Settings `[a, a', b, b']` in degrees.
    pub fn from_degrees(kind: ParticleKind, deg: [f64; 4]) -> Self {
        let m = |d| MeasurementSetting::degrees(d, kind);
        Self {
            a: m(deg[0]),
            a_prime: m(deg[1]),
            b: m(deg[2]),
            b_prime: m(deg[3]),
            b_dprime: None,
        }
    }

    /// Wigner triple: Alice at `(a, a')`, Bob at `(b', b'')`; `b` is set to `b'`.
    pub fn wigner_from_degrees(kind: ParticleKind, alice: [f64; 2], bob: [f64; 2]) -> Self {
        let m = |d| MeasurementSetting::degrees(d, kind);
        Self {
            a: m(alice[0]),
            a_prime: m(alice[1]),
            b: m(bob[0]),
            b_prime: m(bob[0]),
            b_dprime: Some(m(bob[1])),
        }
    }

    pub fn with_b_dprime(mut self, s: MeasurementSetting<T>) -> Result<Self> {
        self.b_dprime = Some(s);
        self.validate()?;
        Ok(self)
    }

    pub fn kind(&self) -> ParticleKind {
        self.a.kind
    }

    pub fn validate(&self) -> Result<()> {
        let kind = self.a.kind;
        let all = [
            Some(self.a),
            Some(self.a_prime),
            Some(self.b),
            Some(self.b_prime),
            self.b_dprime,
        ];
        for s in all.iter().flatten() {
            if s.kind != kind {
                return Err(Error::InvalidSettings(
                    "all settings must share one particle kind".into(),
                ));
            }
            if !s.angle.is_finite() {
                return Err(Error::InvalidSettings("angles must be finite".into()));
            }
        }
        Ok(())
    }
}

fn alice<T: Real>(s: MeasurementSetting<T>) -> ComplexMatrix<T> {
    embed(&observable(s), 0, 2).expect("2-party embed")
}

fn bob<T: Real>(s: MeasurementSetting<T>) -> ComplexMatrix<T> {
    embed(&observable(s), 1, 2).expect("2-party embed")
}

fn comm<T: Real>(x: &ComplexMatrix<T>, y: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    commutator(x, y).expect("equal dims")
}

/// `AB + A'B + AB' - A'B'`.
pub fn bell_operator<T: Real>(bs: &BellSettings<T>) -> ComplexMatrix<T> {
    let (a, ap, b, bp) = (alice(bs.a), alice(bs.a_prime), bob(bs.b), bob(bs.b_prime));
    let sum = &(&(&a * &b) + &(&ap * &b)) + &(&a * &bp);
    &sum - &(&ap * &bp)
}

/// `[A,A'][B,B']`.
pub fn chsh_commutator_product<T: Real>(bs: &BellSettings<T>) -> ComplexMatrix<T> {
    let ca = comm(&alice(bs.a), &alice(bs.a_prime));
    let cb = comm(&bob(bs.b), &bob(bs.b_prime));
    &ca * &cb
}

fn require_dprime<T: Real>(bs: &BellSettings<T>) -> Result<MeasurementSetting<T>> {
    bs.b_dprime
        .ok_or_else(|| Error::InvalidSettings("Wigner operator needs b''".into()))
}

/// Wigner's combination `AB' + A'B'' - AB''` as an operator.
pub fn wigner_operator<T: Real>(bs: &BellSettings<T>) -> Result<ComplexMatrix<T>> {
    let bpp = bob(require_dprime(bs)?);
    let (a, ap, bp) = (alice(bs.a), alice(bs.a_prime), bob(bs.b_prime));
    Ok(&(&(&a * &bp) + &(&ap * &bpp)) - &(&a * &bpp))
}

/// The shifted Wigner operator, with `A'B'` standing in for `-I`:
/// `AB' + A'B'' - AB'' + A'B'`.
pub fn wigner_shifted_operator<T: Real>(bs: &BellSettings<T>) -> Result<ComplexMatrix<T>> {
    let sw = wigner_operator(bs)?;
    Ok(&sw + &(&alice(bs.a_prime) * &bob(bs.b_prime)))
}

/// `[A,A'][B',B'']`.
pub fn wigner_commutator_product<T: Real>(bs: &BellSettings<T>) -> Result<ComplexMatrix<T>> {
    let bpp = bob(require_dprime(bs)?);
    let ca = comm(&alice(bs.a), &alice(bs.a_prime));
    let cb = comm(&bob(bs.b_prime), &bpp);
    Ok(&ca * &cb)
}

/// Per-party pair of measurement directions `(A_j, A'_j)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalPair<T> {
    pub unprimed: Direction<T>,
    pub primed: Direction<T>,
}

impl<T: Real> LocalPair<T> {
    pub fn new(unprimed: Direction<T>, primed: Direction<T>) -> Self {
        Self { unprimed, primed }
    }

    /// `A = sigma_x`, `A' = sigma_y`.
    pub fn xy() -> Self {
        Self::new(axis_x(), axis_y())
    }
}

fn check_mermin_parties<T>(pairs: &[LocalPair<T>]) -> Result<()> {
    if (3..=4).contains(&pairs.len()) {
        Ok(())
    } else {
        Err(Error::InvalidSettings(format!(
            "Mermin operator needs 3 or 4 parties, got {}",
            pairs.len()
        )))
    }
}

/// `(1/2i)[prod (A_j + i A'_j) - prod (A_j - i A'_j)]`.
pub fn mermin_operator<T: Real>(pairs: &[LocalPair<T>]) -> Result<ComplexMatrix<T>> {
    check_mermin_parties(pairs)?;
    let i = Complex::new(T::zero(), T::one());
    let plus: Vec<_> = pairs
        .iter()
        .map(|p| &bloch_observable(p.unprimed) + &bloch_observable(p.primed).scale(i))
        .collect();
    let minus: Vec<_> = pairs
        .iter()
        .map(|p| &bloch_observable(p.unprimed) - &bloch_observable(p.primed).scale(i))
        .collect();
    let diff = &kron_all(&plus)? - &kron_all(&minus)?;
    // 1/(2i) = -i/2
    Ok(diff.scale(Complex::new(T::zero(), -T::lit(0.5))))
}

/// `sum_{i<j} [A_i,A_i'][A_j,A_j']` over embedded commutators.
pub fn mermin_pairwise_commutators<T: Real>(pairs: &[LocalPair<T>]) -> Result<ComplexMatrix<T>> {
    check_mermin_parties(pairs)?;
    let n = pairs.len();
    let comms = pairs
        .iter()
        .enumerate()
        .map(|(j, p)| {
            let a = embed(&bloch_observable(p.unprimed), j, n)?;
            let ap = embed(&bloch_observable(p.primed), j, n)?;
            commutator(&a, &ap)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = ComplexMatrix::zeros(1 << n)?;
    for i in 0..n {
        for j in i + 1..n {
            total = &total + &(&comms[i] * &comms[j]);
        }
    }
    Ok(total)
}

/// Which operator-squared identity to check.
#[derive(Clone, Debug, PartialEq)]
pub enum IdentityCase<T> {
    /// `S^2 = 4 - [A,A'][B,B']`
    Chsh(BellSettings<T>),
    /// `(S_W - I)^2 = 4 + [A,A'][B',B'']`
    Wigner(BellSettings<T>),
    /// `F_3^2 = 4 - sum of pairwise commutator products`
    Mermin3([LocalPair<T>; 3]),
}

/// Max-norm of `S^2 - (4I -/+ commutator products)` for the chosen identity.
pub fn squared_identity_residual<T: Real>(case: &IdentityCase<T>) -> Result<T> {
    let (op, rhs) = match case {
        IdentityCase::Chsh(bs) => {
            bs.validate()?;
            let four = ComplexMatrix::identity(4)?.scale_real(T::lit(4.0));
            (bell_operator(bs), &four - &chsh_commutator_product(bs))
        }
        IdentityCase::Wigner(bs) => {
            bs.validate()?;
            let four = ComplexMatrix::identity(4)?.scale_real(T::lit(4.0));
            (wigner_shifted_operator(bs)?, &four + &wigner_commutator_product(bs)?)
        }
        IdentityCase::Mermin3(pairs) => {
            let four = ComplexMatrix::identity(8)?.scale_real(T::lit(4.0));
            (mermin_operator(pairs)?, &four - &mermin_pairwise_commutators(pairs)?)
        }
    };
    Ok((&op * &op).max_abs_diff(&rhs))
}

/// Expectation values of the CHSH operator and the products derived from it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellEvaluation<T> {
    pub s: T,
    pub s_squared: T,
    pub comm_product: T,
}

pub fn evaluate_bell_state<T: Real>(psi: &StateVector<T>, bs: &BellSettings<T>) -> Result<BellEvaluation<T>> {
    bs.validate()?;
    if psi.dim() != 4 {
        return Err(Error::DimensionMismatch {
            left: psi.dim(),
            right: 4,
        });
    }
    let s_op = bell_operator(bs);
    let s_sq = &s_op * &s_op;
    Ok(BellEvaluation {
        s: expectation(psi, &s_op)?.re,
        s_squared: expectation(psi, &s_sq)?.re,
        comm_product: expectation(psi, &chsh_commutator_product(bs))?.re,
    })
}

pub fn evaluate_bell<T: Real>(spec: &StateSpec<T>, bs: &BellSettings<T>) -> Result<BellEvaluation<T>> {
    evaluate_bell_state(&make_state(spec)?, bs)
}

/// `max |<psi|S|psi>|` over all two-party states together with a maximizing
/// state (an eigenvector of `S` for its largest-modulus eigenvalue).
pub fn max_abs_bell_value<T: Real>(bs: &BellSettings<T>) -> Result<(T, StateVector<T>)> {
    bs.validate()?;
    let s = bell_operator(bs);
    let s_sq = &s * &s;
    let (top, v) = top_eigenpair_psd(&s_sq)?;
    let r = top.max(T::zero()).sqrt();
    // v lies in span of the S eigenvectors with eigenvalues +r and -r.
    let sv = s.apply(v.amplitudes())?;
    let candidates = [T::one(), -T::one()].map(|sign| {
        sv.iter()
            .zip(v.amplitudes())
            .map(|(a, b)| *a + *b * (r * sign))
            .collect::<Vec<_>>()
    });
    let mut best = (T::zero(), v.clone());
    for amps in candidates {
        if let Ok(w) = StateVector::new(amps) {
            let val = expectation(&w, &s)?.re.abs();
            if val > best.0 {
                best = (val, w);
            }
        }
    }
    Ok(best)
}

/// `<psi| prod_k n_k . sigma |psi>`.
pub fn correlation<T: Real>(psi: &StateVector<T>, dirs: &[Direction<T>]) -> Result<T> {
    if 1usize << dirs.len() != psi.dim() {
        return Err(Error::InvalidSettings(format!(
            "{} directions for a {}-dimensional state",
            dirs.len(),
            psi.dim()
        )));
    }
    let ops: Vec<_> = dirs.iter().map(|&d| bloch_observable(d)).collect();
    Ok(expectation(psi, &kron_all(&ops)?)?.re)
}

/// Projective probability `<psi| P_sa(A) (x) P_sb(B) |psi>` with
/// `P_s(X) = (I + s X)/2`.
pub fn joint_probability<T: Real>(
    psi: &StateVector<T>,
    a: MeasurementSetting<T>,
    sign_a: i8,
    b: MeasurementSetting<T>,
    sign_b: i8,
) -> Result<T> {
    let half = T::lit(0.5);
    let id = ComplexMatrix::identity2();
    let proj = |s: MeasurementSetting<T>, sign: i8| {
        (&id + &observable(s).scale_real(T::lit(f64::from(sign)))).scale_real(half)
    };
    Ok(expectation(psi, &kron(&proj(a, sign_a), &proj(b, sign_b))?)?.re)
}

/// Values of the n-party inequality `|E(a) - E(a')| <= 2 +/- E(a''') +/- E(a'')`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NParticleChsh<T> {
    /// `[E(a), E(a'), E(a''), E(a''')]`
    pub correlations: [T; 4],
    pub lhs: T,
    /// `2 + s1 E(a''') + s2 E(a'')` for `(s1, s2)` in `(+,+), (+,-), (-,+), (-,-)`.
    pub rhs_options: [T; 4],
    /// Matched-sign bound `2 - |E(a''') + E(a'')|`.
    pub matched_bound: T,
}

impl<T: Real> NParticleChsh<T> {
    pub fn holds(&self) -> bool {
        self.lhs <= self.matched_bound + T::lit(1e-12)
    }
}

/// Evaluates `E_n` at four setting tuples `[a, a', a'', a''']`.
pub fn nparticle_chsh<T: Real>(spec: &StateSpec<T>, tuples: [&[Direction<T>]; 4]) -> Result<NParticleChsh<T>> {
    let psi = make_state(spec)?;
    nparticle_chsh_state(&psi, tuples)
}

pub fn nparticle_chsh_state<T: Real>(psi: &StateVector<T>, tuples: [&[Direction<T>]; 4]) -> Result<NParticleChsh<T>> {
    let mut e = [T::zero(); 4];
    for (slot, dirs) in e.iter_mut().zip(tuples) {
        *slot = correlation(psi, dirs)?;
    }
    let two = T::lit(2.0);
    let (e2, e3) = (e[2], e[3]);
    Ok(NParticleChsh {
        correlations: e,
        lhs: (e[0] - e[1]).abs(),
        rhs_options: [two + e3 + e2, two + e3 - e2, two - e3 + e2, two - e3 - e2],
        matched_bound: two - (e3 + e2).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::MATRIX_TOL;
    use std::f64::consts::SQRT_2;

    type M = ComplexMatrix<f64>;

    fn deg(d: f64, kind: ParticleKind) -> MeasurementSetting<f64> {
        MeasurementSetting::degrees(d, kind)
    }

    #[test]
    fn zero_angle_photon_observable_is_sigma_z() {
        assert_eq!(observable(deg(0.0, ParticleKind::Photon)), M::pauli_z());
    }

    #[test]
    fn observable_commutators_follow_kind() {
        let two_i_y = M::pauli_y().scale(Complex::new(0.0, 2.0));
        let photon = commutator(
            &observable(deg(0.0, ParticleKind::Photon)),
            &observable(deg(45.0, ParticleKind::Photon)),
        )
        .unwrap();
        assert!(photon.approx_eq(&two_i_y, MATRIX_TOL));
        let spin = commutator(
            &observable(deg(0.0, ParticleKind::SpinHalf)),
            &observable(deg(45.0, ParticleKind::SpinHalf)),
        )
        .unwrap();
        assert!(spin.approx_eq(&two_i_y.scale_real(45f64.to_radians().sin()), MATRIX_TOL));
    }

    #[test]
    fn observables_are_normalized_traceless_and_hermitian() {
        for kind in [ParticleKind::SpinHalf, ParticleKind::Photon] {
            for d in [-170.0, -18.0, 0.0, 22.5, 34.0, 60.0, 123.4] {
                let o = observable(deg(d, kind));
                assert!((&o * &o).approx_eq(&M::identity2(), MATRIX_TOL));
                assert!(o.trace().norm() < MATRIX_TOL);
                assert!(o.is_hermitian(MATRIX_TOL));
            }
        }
    }

    #[test]
    fn product_hv_is_basis_one() {
        let s = make_state::<f64>(&StateSpec::ProductHv).unwrap();
        assert_eq!(s, StateVector::basis(4, 1).unwrap());
    }

    #[test]
    fn circular_pair_has_opposite_helicities() {
        let s = make_state::<f64>(&StateSpec::CircularPair { s1: Sign::Plus }).unwrap();
        let y1 = embed(&M::pauli_y(), 0, 2).unwrap();
        let y2 = embed(&M::pauli_y(), 1, 2).unwrap();
        assert!((expectation(&s, &y1).unwrap().re - 1.0).abs() < 1e-15);
        assert!((expectation(&s, &y2).unwrap().re + 1.0).abs() < 1e-15);
    }

    #[test]
    fn ghz_minus_one_amplitudes() {
        let s = make_state::<f64>(&StateSpec::Ghz {
            n: 3,
            phase: GhzPhase::MinusOne,
        })
        .unwrap();
        let a = s.amplitudes();
        assert!((a[0].re - 1.0 / SQRT_2).abs() < 1e-15);
        assert!((a[7].re + 1.0 / SQRT_2).abs() < 1e-15);
        assert!(a[1..7].iter().all(|z| z.norm() == 0.0));
        assert!(make_state::<f64>(&StateSpec::Ghz {
            n: 5,
            phase: GhzPhase::PlusI
        })
        .is_err());
    }

    #[test]
    fn hardy_is_normalized_and_validated() {
        let s = make_state::<f64>(&StateSpec::Hardy { alpha: 0.46, beta: 1.0 }).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-12);
        let inv = 1.0 / (0.46f64 * 0.46 + 1.0).sqrt();
        assert!((s.amplitudes()[0].re - 0.46 * inv).abs() < 1e-15);
        assert!((s.amplitudes()[3].re + inv).abs() < 1e-15);
        assert!(make_state(&StateSpec::Hardy { alpha: 0.0, beta: 1.0 }).is_err());
        assert!(make_state(&StateSpec::Hardy { alpha: 1.0, beta: -2.0 }).is_err());
    }

    #[test]
    fn mixed_kinds_rejected() {
        let err = BellSettings::new(
            deg(0.0, ParticleKind::Photon),
            deg(0.0, ParticleKind::SpinHalf),
            deg(0.0, ParticleKind::Photon),
            deg(0.0, ParticleKind::Photon),
        );
        assert!(err.is_err());
    }

    #[test]
    fn equal_angles_give_twice_ab() {
        let bs = BellSettings::<f64>::from_degrees(ParticleKind::Photon, [10.0; 4]);
        let s = bell_operator(&bs);
        let ab = &alice(bs.a) * &bob(bs.b);
        assert!(s.approx_eq(&ab.scale_real(2.0), MATRIX_TOL));
        let (max, _) = max_abs_bell_value(&bs).unwrap();
        assert!((max - 2.0).abs() < 1e-12);
    }

    #[test]
    fn canonical_settings_reach_cirelson() {
        let bs = BellSettings::<f64>::from_degrees(ParticleKind::Photon, [0.0, 45.0, 22.5, 67.5]);
        let (max, psi) = max_abs_bell_value(&bs).unwrap();
        assert!((max - 2.0 * SQRT_2).abs() < 1e-12);
        let direct = expectation(&psi, &bell_operator(&bs)).unwrap().re.abs();
        assert!((direct - 2.0 * SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn singlet_s_squared_is_eight() {
        let bs = BellSettings::<f64>::from_degrees(ParticleKind::Photon, [0.0, 45.0, 0.0, -45.0]);
        let ev = evaluate_bell(&StateSpec::Singlet, &bs).unwrap();
        assert!((ev.s_squared - 8.0).abs() < 1e-12);
    }

    #[test]
    fn product_and_circular_states() {
        let bs = BellSettings::<f64>::from_degrees(ParticleKind::Photon, [0.0, 45.0, 0.0, -45.0]);
        let hv = evaluate_bell(&StateSpec::ProductHv, &bs).unwrap();
        assert!((hv.s_squared - 4.0).abs() < 1e-12);
        let circ = evaluate_bell(&StateSpec::CircularPair { s1: Sign::Minus }, &bs).unwrap();
        assert!((circ.s_squared - 8.0).abs() < 1e-12);
        assert!(circ.s.abs() < 1e-12);
    }

    #[test]
    fn hardy_s_squared_matches_closed_form() {
        let bs = BellSettings::<f64>::from_degrees(ParticleKind::Photon, [34.0, -18.0, 34.0, -18.0]);
        let ev = evaluate_bell(&StateSpec::Hardy { alpha: 0.46, beta: 1.0 }, &bs).unwrap();
        // 4 + 4 sin^2(104 deg) * 2 alpha beta / (alpha^2 + beta^2)
        let closed = 4.0 + 4.0 * 104f64.to_radians().sin().powi(2) * 0.92 / (0.46f64.powi(2) + 1.0);
        assert!((ev.s_squared - closed).abs() < 1e-12);
        assert!((ev.s_squared - 6.86).abs() < 0.01);
    }

    #[test]
    fn wigner_operator_values() {
        let bs = BellSettings::<f64>::wigner_from_degrees(ParticleKind::SpinHalf, [0.0, 60.0], [60.0, 120.0]);
        let psi = make_state(&StateSpec::Singlet).unwrap();
        let shifted = wigner_shifted_operator(&bs).unwrap();
        let sq = expectation(&psi, &(&shifted * &shifted)).unwrap().re;
        assert!((sq - 7.0).abs() < 1e-12);
        let sw = expectation(&psi, &wigner_operator(&bs).unwrap()).unwrap().re;
        assert!((sw + 1.5).abs() < 1e-12);
        assert!((expectation(&psi, &shifted).unwrap().re + 2.5).abs() < 1e-12);
        assert!(squared_identity_residual(&IdentityCase::Wigner(bs)).unwrap() < 1e-12);
        assert!(wigner_operator(&BellSettings::<f64>::from_degrees(ParticleKind::SpinHalf, [0.0; 4])).is_err());
    }

    #[test]
    fn wigner_equal_angles_have_no_commutator() {
        let bs = BellSettings::<f64>::wigner_from_degrees(ParticleKind::SpinHalf, [30.0, 30.0], [30.0, 30.0]);
        let psi = make_state(&StateSpec::Singlet).unwrap();
        let shifted = wigner_shifted_operator(&bs).unwrap();
        let sq = expectation(&psi, &(&shifted * &shifted)).unwrap().re;
        assert!((sq - 4.0).abs() < 1e-12);
        assert!(wigner_commutator_product(&bs).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn ghz_plus_i_mermin_value_is_four() {
        let psi = make_state::<f64>(&StateSpec::Ghz {
            n: 3,
            phase: GhzPhase::PlusI,
        })
        .unwrap();
        let f = mermin_operator(&[LocalPair::xy(); 3]).unwrap();
        assert!(f.is_hermitian(MATRIX_TOL));
        let v = expectation(&psi, &f).unwrap();
        assert!((v.re - 4.0).abs() < 1e-12 && v.im.abs() < 1e-12);
        assert!(squared_identity_residual(&IdentityCase::Mermin3([LocalPair::<f64>::xy(); 3])).unwrap() < 1e-12);
    }

    #[test]
    fn mermin_with_equal_primed_settings_matches_scalar_expansion() {
        // A'_j = A_j: F = (1/2i)[(1+i)^n - (1-i)^n] prod A_j.
        for n in 3..=4usize {
            let dir = [0.3f64.sin() * 0.8f64.cos(), 0.3f64.sin() * 0.8f64.sin(), 0.3f64.cos()];
            let pairs = vec![LocalPair::new(dir, dir); n];
            let f = mermin_operator(&pairs).unwrap();
            let one_plus_i = Complex::new(1.0, 1.0).powu(n as u32);
            let one_minus_i = Complex::new(1.0, -1.0).powu(n as u32);
            let factor = (one_plus_i - one_minus_i) / Complex::new(0.0, 2.0);
            let prod = kron_all(&vec![bloch_observable(dir); n]).unwrap();
            assert!(f.approx_eq(&prod.scale(factor), 1e-12), "n = {n}");
        }
        assert!(mermin_operator(&[LocalPair::<f64>::xy(); 2]).is_err());
        assert!(mermin_operator(&[LocalPair::<f64>::xy(); 5]).is_err());
    }

    #[test]
    fn ghz_minus_one_quadruple() {
        let (x, y) = (axis_x::<f64>(), axis_y::<f64>());
        let spec = StateSpec::Ghz {
            n: 3,
            phase: GhzPhase::MinusOne,
        };
        let r = nparticle_chsh(&spec, [&[x, y, y], &[y, x, y], &[y, y, x], &[x, x, x]]).unwrap();
        let expected = [1.0, 1.0, 1.0, -1.0];
        for (got, want) in r.correlations.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn identical_tuples_give_zero_lhs() {
        let t = [axis_x::<f64>(), axis_z(), axis_y()];
        let r = nparticle_chsh(
            &StateSpec::Ghz {
                n: 3,
                phase: GhzPhase::PlusI,
            },
            [&t, &t, &t, &t],
        )
        .unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(nparticle_chsh(&StateSpec::Singlet, [&t, &t, &t, &t]).is_err());
    }

    #[test]
    fn joint_probabilities_sum_to_one() {
        let psi = make_state(&StateSpec::Hardy { alpha: 0.46, beta: 1.0 }).unwrap();
        let (a, b) = (deg(34.0, ParticleKind::Photon), deg(-18.0, ParticleKind::Photon));
        let total: f64 = [(1, 1), (1, -1), (-1, 1), (-1, -1)]
            .iter()
            .map(|&(sa, sb)| joint_probability(&psi, a, sa, b, sb).unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
