use chronobell::bellops::{
    bell_operator, max_abs_bell_value, mermin_operator, nparticle_chsh_state, squared_identity_residual, BellSettings,
    IdentityCase, LocalPair, MeasurementSetting, ParticleKind,
};
use chronobell::bohm::{guidance_velocity, oumandel_residual, precess_spin, GaussianPacket, Particle, TwoParticleWave};
use chronobell::hvsim::{
    measure, run_chsh_protocol, run_chsh_protocol_with, sample_pair, MatchingScheme, ModelSpec, ProtocolOptions,
};
use chronobell::ineq::{
    correlation_from_quad, decompose_chsh, gwzz_delta, quad_from_correlation, wigner_check, CorrelationMarginals,
    InstructionDistribution, Octuple, ProbabilityQuad,
};
use chronobell::pollsim::{poll_oracle, run_poll, CoupleRule, PollModel};
use chronobell::qmat::{expectation, StateVector};
use num_complex::Complex;
use proptest::prelude::*;

const CIRELSON: f64 = 2.0 * std::f64::consts::SQRT_2;

fn kind() -> impl Strategy<Value = ParticleKind> {
    prop_oneof![Just(ParticleKind::SpinHalf), Just(ParticleKind::Photon)]
}

fn settings() -> impl Strategy<Value = BellSettings<f64>> {
    (kind(), prop::array::uniform5(-180.0..180.0f64)).prop_map(|(k, d)| {
        BellSettings::from_degrees(k, [d[0], d[1], d[2], d[3]])
            .with_b_dprime(MeasurementSetting::degrees(d[4], k))
            .unwrap()
    })
}

fn direction() -> impl Strategy<Value = [f64; 3]> {
    (-1.0..1.0f64, 0.0..std::f64::consts::TAU).prop_map(|(z, phi)| {
        let r = (1.0 - z * z).sqrt();
        [r * phi.cos(), r * phi.sin(), z]
    })
}

fn pair() -> impl Strategy<Value = LocalPair<f64>> {
    (direction(), direction()).prop_map(|(a, b)| LocalPair::new(a, b))
}

fn state(dim: usize) -> impl Strategy<Value = StateVector<f64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), dim).prop_filter_map("nonzero", |v| {
        StateVector::new(v.into_iter().map(|(r, i)| Complex::new(r, i)).collect()).ok()
    })
}

fn pm() -> impl Strategy<Value = i8> {
    prop_oneof![Just(1i8), Just(-1i8)]
}

fn octuple() -> impl Strategy<Value = Octuple> {
    prop::array::uniform8(pm()).prop_map(Octuple::from_array)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn squared_identities_hold(bs in settings(), pairs in prop::array::uniform3(pair())) {
        prop_assert!(squared_identity_residual(&IdentityCase::Chsh(bs)).unwrap() < 1e-12);
        prop_assert!(squared_identity_residual(&IdentityCase::Wigner(bs)).unwrap() < 1e-12);
        prop_assert!(squared_identity_residual(&IdentityCase::Mermin3(pairs)).unwrap() < 1e-12);
    }

    #[test]
    fn bell_value_never_exceeds_cirelson(bs in settings(), psi in state(4)) {
        let s = bell_operator(&bs);
        let sq = expectation(&psi, &(&s * &s)).unwrap().re;
        prop_assert!(sq <= 8.0 + 1e-12);
        prop_assert!(expectation(&psi, &s).unwrap().re.abs() <= CIRELSON + 1e-12);
        let (max, _) = max_abs_bell_value(&bs).unwrap();
        prop_assert!(max <= CIRELSON + 1e-9);
        prop_assert!(max >= 2.0 - 1e-9);
    }

    #[test]
    fn product_states_obey_matched_nparty_bound(
        p in state(2),
        q in state(2),
        x in direction(),
        xp in direction(),
        y in direction(),
        yp in direction(),
    ) {
        let psi = p.kron(&q).unwrap();
        let r = nparticle_chsh_state(&psi, [&[x, y], &[x, yp], &[xp, yp], &[xp, y]]).unwrap();
        prop_assert!(r.holds(), "{:?}", r);
    }

    #[test]
    fn mermin_value_bounded_by_four(pairs in prop::array::uniform3(pair()), psi in state(8)) {
        let f = mermin_operator(&pairs).unwrap();
        prop_assert!(f.is_hermitian(1e-12));
        prop_assert!(expectation(&psi, &f).unwrap().re.abs() <= 4.0 + 1e-12);
    }

    #[test]
    fn reconstruction_identity(records in prop::collection::vec(octuple(), 1..200), step in 0usize..11) {
        let alpha = step as f64 / 10.0;
        let r = decompose_chsh(&records, alpha).unwrap();
        prop_assert!(r.reconstruction_error < 1e-12);
        prop_assert!(r.holds_sym);
        prop_assert!(r.holds_asym);
        prop_assert!(r.lhs_bell <= r.bound_alpha + 1e-12);
    }

    #[test]
    fn static_records_collapse_to_bell(raw in prop::collection::vec(prop::array::uniform4(pm()), 1..200)) {
        let records: Vec<_> = raw
            .iter()
            .map(|[a, ap, b, bp]| Octuple::from_array([*a, *b, *ap, *bp, *a, *bp, *ap, *b]))
            .collect();
        let r = decompose_chsh(&records, 0.5).unwrap();
        prop_assert_eq!((r.comm_a, r.comm_b, r.residual_a, r.residual_b), (0.0, 0.0, 0.0, 0.0));
        prop_assert!(r.lhs_bell <= 2.0);
    }

    #[test]
    fn wigner_inequality_holds_on_simplex(w in prop::array::uniform8(0.0..1.0f64)) {
        let total: f64 = w.iter().sum();
        prop_assume!(total > 1e-6);
        let d = InstructionDistribution::new(w.map(|x| x / total)).unwrap();
        let c = wigner_check(&d, None);
        prop_assert!(c.holds);
        let p = d.probs();
        prop_assert!((c.slack - (p[2] + p[5])).abs() < 1e-15);
    }

    #[test]
    fn quad_round_trip(w in prop::array::uniform4(0.0..1.0f64)) {
        let total: f64 = w.iter().sum();
        prop_assume!(total > 1e-6);
        let q = ProbabilityQuad::new(w[0] / total, w[1] / total, w[2] / total, w[3] / total).unwrap();
        let back = quad_from_correlation(correlation_from_quad(q).unwrap()).unwrap();
        for (x, y) in [(q.p_pp, back.p_pp), (q.p_pm, back.p_pm), (q.p_mp, back.p_mp), (q.p_mm, back.p_mm)] {
            prop_assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn correlation_round_trip(e in -1.0..1.0f64) {
        let q = quad_from_correlation(CorrelationMarginals::unbiased(e)).unwrap();
        prop_assert!((correlation_from_quad(q).unwrap().correlation - e).abs() < 1e-14);
    }

    #[test]
    fn collapse_and_hysteresis_repeat(
        seed in any::<u64>(),
        deg in -90.0..90.0f64,
        drag in 0.0..=1.0f64,
        asym in -1.0..=1.0f64,
        u in prop::array::uniform2(0.0..1.0f64),
        k in kind(),
    ) {
        let s = MeasurementSetting::degrees(deg, k);
        let lam = sample_pair(seed, 0).lambda_a;
        for m in [ModelSpec::collapse(k), ModelSpec::hysteretic(k, drag, asym).unwrap()] {
            let (o1, l1) = measure(&m, lam, s, u[0]).unwrap();
            let (o2, _) = measure(&m, l1, s, u[1]).unwrap();
            prop_assert_eq!(o1, o2);
        }
    }

    #[test]
    fn long_chains_stay_unit(seed in any::<u64>(), drag in 0.0..=1.0f64, asym in -1.0..=1.0f64) {
        let m = ModelSpec::hysteretic(ParticleKind::Photon, drag, asym).unwrap();
        let mut lam = sample_pair(seed, 1).lambda_a;
        for i in 0..2000 {
            let s = MeasurementSetting::degrees(13.7 * i as f64, ParticleKind::Photon);
            lam = measure(&m, lam, s, 0.5).unwrap().1;
        }
        let n = (lam[0] * lam[0] + lam[1] * lam[1] + lam[2] * lam[2]).sqrt();
        prop_assert!((n - 1.0).abs() < 1e-9);
    }

    #[test]
    fn classical_runs_obey_bell_exactly(seed in any::<u64>(), d in prop::array::uniform4(-90.0..90.0f64)) {
        let bs = BellSettings::from_degrees(ParticleKind::Photon, d);
        let run = run_chsh_protocol(&ModelSpec::classical(ParticleKind::Photon), &bs, 300, MatchingScheme::OutputChain, seed).unwrap();
        prop_assert!(run.records.iter().all(|o| o.a3 == o.a1 && o.b4 == o.b1 && o.b3p == o.b2p && o.a4p == o.a2p));
        let r = decompose_chsh(&run.records, 0.5).unwrap();
        prop_assert!(r.lhs_bell <= 2.0);
        prop_assert_eq!((r.comm_a, r.comm_b), (0.0, 0.0));
    }

    #[test]
    fn gwzz_values(a in pm(), ap in pm(), b in pm(), bp in pm()) {
        prop_assert!(matches!(gwzz_delta(a, ap, b, bp), 0 | -2));
    }

    #[test]
    fn precession_conserves(l in direction(), b in direction(), mag in 0.1..5.0f64) {
        let field = [b[0] * mag, b[1] * mag, b[2] * mag];
        let tr = precess_spin(l, field, 0.01 / mag, 2000).unwrap();
        let along0 = l[0] * b[0] + l[1] * b[1] + l[2] * b[2];
        for v in &tr.lambdas {
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            prop_assert!((n - 1.0).abs() < 1e-9);
            prop_assert!((v[0] * b[0] + v[1] * b[1] + v[2] * b[2] - along0).abs() < 1e-9);
        }
    }

    #[test]
    fn product_wave_velocity_ignores_partner(
        c in prop::array::uniform2(-2.0..2.0f64),
        w in prop::array::uniform2(0.3..2.0f64),
        k in prop::array::uniform2(-3.0..3.0f64),
        x1 in -3.0..3.0f64,
    ) {
        let p1 = GaussianPacket::new(c[0], w[0], k[0]).unwrap();
        let p2 = GaussianPacket::new(c[1], w[1], k[1]).unwrap();
        let wave = TwoParticleWave::product(p1, p2).unwrap();
        for j in 0..20 {
            let x2 = -4.0 + 0.4 * j as f64;
            let v = guidance_velocity(&wave, x1, x2, Particle::One).unwrap();
            prop_assert!((v - p1.velocity(x1)).abs() < 1e-12);
        }
    }

    #[test]
    fn beam_splitter_surface(tx in 0.0..=1.0f64, ty in 0.0..=1.0f64) {
        prop_assert!(oumandel_residual(tx, ty, 1.0 - tx, 1.0 - ty).unwrap() < 1e-12);
    }

    #[test]
    fn poll_bound_and_zero_order(seed in any::<u64>(), states in 1usize..5, anti in any::<bool>()) {
        let rule = if anti { CoupleRule::Anti } else { CoupleRule::Identical };
        let m = PollModel::random(seed, states, rule).unwrap();
        let run = run_poll(&m, 400, seed).unwrap();
        prop_assert!(decompose_chsh(&run.records, 0.5).unwrap().holds_sym);
        let still = run_poll(&m.without_order_effect(), 400, seed).unwrap();
        let r = decompose_chsh(&still.records, 0.5).unwrap();
        prop_assert_eq!((r.comm_a, r.comm_b), (0.0, 0.0));
        prop_assert!(r.lhs_bell <= 2.0);
        prop_assert_eq!(poll_oracle(&m.without_order_effect()).unwrap().bound_sym, 2.0);
    }
}

#[test]
fn runs_are_independent_of_thread_count() {
    let bs = BellSettings::from_degrees(ParticleKind::Photon, [0.0, 45.0, 22.5, 67.5]);
    let model = ModelSpec::hysteretic(ParticleKind::Photon, 0.5, 0.5).unwrap();
    let opts = ProtocolOptions::default();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_chsh_protocol_with(&model, &bs, 5000, MatchingScheme::OutputChain, 77, &opts).unwrap())
    };
    assert_eq!(run(1), run(4));
    let poll = PollModel::random(3, 4, CoupleRule::Identical).unwrap();
    let p = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_poll(&poll, 5000, 11).unwrap())
    };
    assert_eq!(p(1), p(3));
}

#[test]
fn identical_inputs_give_identical_runs() {
    let bs = BellSettings::from_degrees(ParticleKind::SpinHalf, [0.0, 90.0, 45.0, 135.0]);
    for scheme in [
        MatchingScheme::ResultMatch,
        MatchingScheme::InputMatch,
        MatchingScheme::OutputChain,
    ] {
        let m = ModelSpec::collapse(ParticleKind::SpinHalf);
        let a = run_chsh_protocol(&m, &bs, 1000, scheme, 42).unwrap();
        let b = run_chsh_protocol(&m, &bs, 1000, scheme, 42).unwrap();
        assert_eq!(a, b);
        let c = run_chsh_protocol(&m, &bs, 1000, scheme, 43).unwrap();
        assert_ne!(a.records, c.records);
    }
}

#[test]
fn collapse_output_chain_repeats_alice() {
    let bs = BellSettings::from_degrees(ParticleKind::Photon, [0.0, 45.0, 22.5, 67.5]);
    let run = run_chsh_protocol(
        &ModelSpec::collapse(ParticleKind::Photon),
        &bs,
        20_000,
        MatchingScheme::OutputChain,
        1,
    )
    .unwrap();
    assert!(run.records.iter().all(|o| o.a3 == o.a1 && o.a4p == o.a2p));
    assert_eq!(run.diagnostics.rate_a1_a3, 1.0);
    assert!(run.diagnostics.rate_b1_b4 < 1.0);
}
