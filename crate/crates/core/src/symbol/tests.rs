use super::*;
use crate::eos::TransportValues;
use crate::kinematics::{normalize_velocity, FluidPointState, METRIC};
use crate::sampling::{
    boosted_velocity, passing_coefficients, reference_coefficients, spatial_direction,
    unit_covector,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

// Frozen output of an independent numpy evaluation of the closed forms.
const REF_DELTA_D: f64 = 7.552900000000001;
const REF_BETA_PLUS: f64 = 0.9197089985288841;
const REF_BETA_MINUS: f64 = 0.0036243348044491253;

fn with(t: TransportValues, cs2: f64) -> CoefficientSample {
    CoefficientSample::from_parts(1.0, cs2, cs2, t)
}

fn rest() -> FourVector {
    FourVector([1.0, 0.0, 0.0, 0.0])
}

const DT: FourCovector = FourCovector([1.0, 0.0, 0.0, 0.0]);
const DX: FourCovector = FourCovector([0.0, 1.0, 0.0, 0.0]);

#[test]
fn reference_betas_match_frozen_values() {
    let b = betas(&reference_coefficients()).unwrap();
    assert!((b.delta_d - REF_DELTA_D).abs() < 1e-12);
    let [b1, b2, bm, bp] = b.real_values().unwrap();
    assert_eq!(b1, 0.0);
    assert_eq!(b2, 0.5);
    assert!((bp - REF_BETA_PLUS).abs() < 1e-12);
    assert!((bm - REF_BETA_MINUS).abs() < 1e-12);
}

#[test]
fn hand_substituted_discriminant() {
    let t = TransportValues {
        eta: 1.0,
        chi1: 4.0,
        chi2: 0.0,
        chi3: 0.0,
        chi4: 2.0,
        lambda: 1.0,
    };
    let c = with(t, 1.0 / 3.0);
    let b = betas(&c).unwrap();
    assert!((b.delta_d - 32.0).abs() < 1e-12);
    // both acoustic roots are negative here, so the set is not causal
    let [_, _, bm, bp] = b.real_values().unwrap();
    assert!(bp < 0.0 && bm < bp);
    let r = causality_report(&c);
    assert!(r.discriminant_positive && !r.beta_in_unit_interval && !r.verdict);
}

#[test]
fn equal_viscosity_and_relaxation_gives_unit_shear_speed() {
    let mut t = REFERENCE_TRANSPORT_COPY;
    t.eta = t.lambda;
    assert_eq!(betas(&with(t, 1.0 / 3.0)).unwrap().beta2, 1.0);
}

const REFERENCE_TRANSPORT_COPY: TransportValues = crate::sampling::REFERENCE_TRANSPORT;

#[test]
fn zero_lambda_chi1_is_rejected() {
    let mut t = REFERENCE_TRANSPORT_COPY;
    t.chi1 = 0.0;
    assert!(matches!(betas(&with(t, 0.3)), Err(SymbolError::Coefficient(_))));
}

#[test]
fn complex_acoustic_pair_is_flagged() {
    let t = TransportValues {
        eta: 0.5,
        chi1: 1.0,
        chi2: 0.0,
        chi3: 0.0,
        chi4: 1.0,
        lambda: 1.0,
    };
    let c = with(t, 0.9);
    let b = betas(&c).unwrap();
    assert!(b.delta_d < 0.0);
    assert!(matches!(b.acoustic, AcousticPair::ComplexConjugate { .. }));
    assert!(b.real_values().is_none());
    assert!(!causality_report(&c).verdict);
}

#[test]
fn reference_set_passes_every_condition() {
    let r = causality_report(&reference_coefficients());
    assert!(r.verdict, "{:?}", r.failed);
    assert!(r.failed.is_empty());
}

#[test]
fn chi4_equal_to_eta_fails_bulk_condition() {
    let mut t = REFERENCE_TRANSPORT_COPY;
    t.chi4 = t.eta;
    let r = causality_report(&with(t, 1.0 / 3.0));
    assert!(!r.chi4_gt_four_thirds_eta);
    assert!(!r.verdict);
    assert!(r.failed.contains(&"chi4_gt_four_thirds_eta"));
}

#[test]
fn eta_above_lambda_fails_and_flags_beta2() {
    let mut t = REFERENCE_TRANSPORT_COPY;
    t.eta = 1.5;
    t.chi4 = 3.0;
    let c = with(t, 1.0 / 3.0);
    let r = causality_report(&c);
    assert!(!r.lambda_ge_eta && !r.beta_in_unit_interval && !r.verdict);
    assert!(betas(&c).unwrap().beta2 > 1.0);
}

// Second, independent assembly: build each 𝒜^α from its index formula
// and contract with Ξ afterwards.
fn oracle_matrix(c: &CoefficientSample, u: &[f64; 4], xi: &[f64; 4]) -> [[f64; 30]; 30] {
    let ul: [f64; 4] = std::array::from_fn(|m| METRIC[m] * u[m]);
    let pi_up = |m: usize, n: usize| {
        (if m == n { METRIC[m] } else { 0.0 }) + u[m] * u[n]
    };
    let pi_mix = |m: usize, n: usize| (if m == n { 1.0 } else { 0.0 }) + u[m] * ul[n];
    let d = |m: usize, n: usize| if m == n { 1.0 } else { 0.0 };
    let mut out = [[0.0; 30]; 30];
    for al in 0..4 {
        let mut a = [[0.0; 30]; 30];
        a[0][0] = c.chi1 * u[al];
        for n in 0..4 {
            a[0][1 + n] = c.lambda * c.cs2 * d(al, n);
            a[0][5 + n] = c.lambda * d(al, n);
            for l in 0..4 {
                a[0][9 + 4 * l + n] = c.chi2 * u[al] * d(l, n);
            }
        }
        for m in 0..4 {
            a[1 + m][0] = c.chi3 * pi_up(m, al);
            a[1 + m][1 + m] = c.lambda * c.cs2 * u[al];
            a[1 + m][5 + m] = c.lambda * u[al];
            for l in 0..4 {
                for n in 0..4 {
                    a[1 + m][9 + 4 * l + n] = (c.chi4 + 2.0 * c.eta / 3.0) * pi_up(m, al) * d(n, l)
                        - c.eta * (pi_up(al, l) * d(m, n) + pi_up(m, l) * d(al, n));
                }
            }
            a[5 + m][0] = -pi_up(m, al);
            a[5 + m][1 + m] = u[al];
        }
        for l in 0..4 {
            for n in 0..4 {
                a[9 + 4 * l + n][5 + n] = -pi_mix(al, l);
                a[9 + 4 * l + n][9 + 4 * l + n] = u[al];
            }
        }
        a[25][25] = u[al];
        for n in 0..4 {
            a[26 + n][26 + n] = u[al];
        }
        for i in 0..30 {
            for j in 0..30 {
                out[i][j] += a[i][j] * xi[al];
            }
        }
    }
    out
}

#[test]
fn assembly_matches_independent_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let c = passing_coefficients(&mut rng, 0.0);
        let u = boosted_velocity(&mut rng, 1.5);
        let xi = unit_covector(&mut rng);
        let m = contracted_first_order(&c, &u, &xi).unwrap().matrix;
        let o = oracle_matrix(&c, &u.0, &xi.0);
        for i in 0..30 {
            for j in 0..30 {
                let scale = o[i][j].abs().max(1.0);
                assert!((m[(i, j)] - o[i][j]).abs() <= 1e-14 * scale * 8.0, "({i},{j})");
            }
        }
        for al in 0..4 {
            let mut e = [0.0; 4];
            e[al] = 1.0;
            let m = assemble_first_order(&c, &u, al).unwrap().matrix;
            let o = oracle_matrix(&c, &u.0, &e);
            for i in 0..30 {
                for j in 0..30 {
                    assert!((m[(i, j)] - o[i][j]).abs() <= 1e-13 * o[i][j].abs().max(1.0));
                }
            }
        }
    }
}

#[test]
fn rest_frame_time_block_is_diagonal_where_expected() {
    let c = reference_coefficients();
    let m = assemble_first_order(&c, &rest(), 0).unwrap().matrix;
    for mu in 0..4 {
        assert_eq!(m[(1 + mu, 0)], 0.0);
        assert_eq!(m[(5 + mu, layout::v(mu))], 1.0);
    }
    for k in 9..30 {
        assert_eq!(m[(k, k)], 1.0);
    }
    assert_eq!(m[(0, 0)], c.chi1);
}

#[test]
fn zero_blocks_stay_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let c = passing_coefficients(&mut rng, 0.0);
        let u = boosted_velocity(&mut rng, 2.0);
        let m = contracted_first_order(&c, &u, &unit_covector(&mut rng)).unwrap().matrix;
        for i in 0..30 {
            for j in 25..30 {
                if i != j {
                    assert_eq!(m[(i, j)], 0.0);
                }
            }
            if i >= 5 {
                for j in 1..5 {
                    if i >= 9 || j != i - 4 {
                        assert_eq!(m[(i, j)], 0.0);
                    }
                }
            }
        }
        for i in 5..9 {
            for j in 5..30 {
                assert_eq!(m[(i, j)], 0.0);
            }
        }
    }
}

#[test]
fn assembly_rejects_bad_inputs() {
    let c = reference_coefficients();
    let bad = FourVector([1.0, 0.5, 0.0, 0.0]);
    assert!(matches!(
        assemble_first_order(&c, &bad, 0),
        Err(SymbolError::Kinematics(_))
    ));
    assert!(assemble_first_order(&c, &rest(), 4).is_err());
}

#[test]
fn state_vector_layout_follows_blocks() {
    let c = reference_coefficients();
    let s = FluidPointState::from_spatial(
        1.0,
        [0.2, -0.1, 0.3],
        [0.1, 0.2, -0.3, 0.05],
        [[0.1, 0.0, 0.2], [0.3, -0.1, 0.0], [0.0, 0.2, 0.1], [-0.2, 0.0, 0.4]],
    );
    let x = StateVector30::from_state(&s, &c).unwrap().0;
    let g = crate::kinematics::derived_gradients(&s, &c).unwrap();
    assert_eq!(x[layout::EPS], 1.0);
    assert_eq!(x[layout::SCALAR_V], g.scalar_v);
    for nu in 0..4 {
        assert_eq!(x[layout::u(nu)], s.u[nu]);
        assert_eq!(x[layout::acceleration(nu)], g.acceleration[nu]);
        assert_eq!(x[layout::s(2, nu)], g.s[2][nu]);
    }
}

#[test]
fn determinant_rest_frame_time_direction() {
    let c = reference_coefficients();
    let d = det_factorization_check(&c, &rest(), &DT).unwrap();
    let expected = c.lambda.powi(4) * c.chi1;
    assert!((d.brute - expected).abs() < 1e-12 && (d.closed - expected).abs() < 1e-12);
}

#[test]
fn determinant_with_u_orthogonal_direction_is_singular() {
    let c = reference_coefficients();
    assert!(matches!(
        det_factorization_check(&c, &rest(), &DX),
        Err(SymbolError::SingularSample { .. })
    ));
}

#[test]
fn determinant_factorization_random_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..200 {
        let c = passing_coefficients(&mut rng, 0.0);
        let u = boosted_velocity(&mut rng, 1.0);
        let xi = unit_covector(&mut rng);
        let d = det_factorization_check(&c, &u, &xi).unwrap();
        assert!(d.rel_error <= 1e-6, "{d:?}");
        let d = second_order_factorization_check(&c, &u, &xi).unwrap();
        assert!(d.rel_error <= 1e-6, "{d:?}");
    }
}

#[test]
fn second_order_symbol_structure() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let c = passing_coefficients(&mut rng, 0.0);
    let u = boosted_velocity(&mut rng, 1.0);
    let s = assemble_second_order(&c, &u, &unit_covector(&mut rng)).unwrap();
    assert_eq!(s.matrix[(0, 0)], 0.0);
    // 𝔞 = 0 kills the top row
    let s = assemble_second_order(&c, &rest(), &DX).unwrap();
    assert_eq!(s.matrix.determinant(), 0.0);
    let mut bad = c;
    bad.pressure = -2.0 * bad.eps;
    assert!(assemble_second_order(&bad, &u, &DT).is_err());
}

#[test]
fn second_order_rest_frame_time_direction() {
    let c = reference_coefficients();
    let d = second_order_factorization_check(&c, &rest(), &DT).unwrap();
    let expected = c.lambda.powi(3) * c.chi1 / (c.eps + c.pressure);
    assert!((d.closed - expected).abs() < 1e-14);
    assert!(d.rel_error < 1e-14);
}

#[test]
fn rank_one_identity_cases() {
    let b = FourVector([0.0, 0.3, -0.2, 0.5]);
    let xi = FourCovector([0.7, 0.3, -0.2, 0.5]);
    let d = rank_one_det_identity_check(1.7, 0.0, 0.0, &b, &xi).unwrap();
    assert!((d.brute - 1.7f64.powi(4)).abs() < 1e-12 && d.rel_error < 1e-12);
    let d = rank_one_det_identity_check(0.0, 0.4, 1.1, &b, &xi).unwrap();
    assert_eq!(d.closed, 0.0);
    assert!(d.brute.abs() < 1e-15);
    let off = FourCovector([0.7, 1.0, 0.0, 0.0]);
    assert!(matches!(
        rank_one_det_identity_check(1.0, 1.0, 1.0, &b, &off),
        Err(SymbolError::Precondition(_))
    ));
}

#[test]
fn rank_one_identity_random_projections() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..200 {
        let u = boosted_velocity(&mut rng, 1.0);
        let xi = unit_covector(&mut rng);
        let p = crate::kinematics::projector_upper(&u.0);
        let b = FourVector(std::array::from_fn(|m| (0..4).map(|k| p[m][k] * xi.0[k]).sum()));
        let (a, bc, cc) = (
            rand::Rng::random_range(&mut rng, -2.0..2.0),
            rand::Rng::random_range(&mut rng, -2.0..2.0),
            rand::Rng::random_range(&mut rng, -2.0..2.0),
        );
        let d = rank_one_det_identity_check(a, bc, cc, &b, &xi).unwrap();
        assert!(d.rel_error <= 1e-10, "{d:?}");
    }
}

#[test]
fn rest_frame_speeds_are_root_beta() {
    for beta in [0.0, 0.25, 0.5, 1.0] {
        let (lo, hi) = characteristic_speeds(beta, &rest(), &DT, &DX).unwrap();
        assert!((hi - f64::sqrt(beta)).abs() < 1e-12);
        assert!((lo + f64::sqrt(beta)).abs() < 1e-12);
    }
}

#[test]
fn zero_beta_gives_the_transport_root() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let u = boosted_velocity(&mut rng, 1.0);
    let zeta = spatial_direction(&mut rng);
    let (lo, hi) = characteristic_speeds(0.0, &u, &DT, &zeta).unwrap();
    let expected = -u.contract(&zeta) / u.contract(&DT);
    assert!((lo - expected).abs() < 1e-12 && (hi - expected).abs() < 1e-12);
}

#[test]
fn speed_preconditions() {
    assert!(matches!(
        characteristic_speeds(1.2, &rest(), &DT, &DX),
        Err(SymbolError::InvalidBeta(_))
    ));
    assert!(characteristic_speeds(0.5, &rest(), &DX, &DX).is_err());
    assert!(characteristic_speeds(0.5, &rest(), &DT, &DT).is_err());
}

fn velocity_strategy() -> impl Strategy<Value = FourVector> {
    prop::array::uniform3(-2.0f64..2.0).prop_map(normalize_velocity)
}

fn timelike_strategy() -> impl Strategy<Value = FourCovector> {
    (0.5f64..2.0, prop::array::uniform3(-0.6f64..0.6))
        .prop_map(|(t, s)| FourCovector([t, s[0] * t, s[1] * t, s[2] * t]))
}

fn spacelike_strategy() -> impl Strategy<Value = FourCovector> {
    (-0.5f64..0.5, prop::array::uniform3(-1.0f64..1.0))
        .prop_filter("spacelike", |(t, s)| {
            s.iter().map(|x| x * x).sum::<f64>() > t * t + 0.05
        })
        .prop_map(|(t, s)| FourCovector([t, s[0], s[1], s[2]]))
}

proptest! {
    #[test]
    fn roots_solve_the_quadratic(
        beta in 0.0f64..=1.0,
        u in velocity_strategy(),
        xi in timelike_strategy(),
        zeta in spacelike_strategy(),
    ) {
        let (lo, hi) = characteristic_speeds(beta, &u, &xi, &zeta).unwrap();
        prop_assert!(lo <= hi);
        for l in [lo, hi] {
            let big = FourCovector(std::array::from_fn(|m| zeta.0[m] + l * xi.0[m]));
            let inv = PairInvariants::new(&u, &big, &big);
            let scale = inv.u_xi.powi(2) + beta * inv.pi_xi_xi.abs() + 1.0;
            let r = speed_residual(beta, &u, &xi, &zeta, l);
            prop_assert!(r.abs() <= 1e-10 * scale, "residual {r} at Λ = {l}");
        }
    }

    #[test]
    fn unit_beta_roots_are_null(
        u in velocity_strategy(),
        xi in timelike_strategy(),
        zeta in spacelike_strategy(),
    ) {
        let (lo, hi) = characteristic_speeds(1.0, &u, &xi, &zeta).unwrap();
        for l in [lo, hi] {
            let big = FourCovector(std::array::from_fn(|m| zeta.0[m] + l * xi.0[m]));
            let scale = big.euclidean_norm().powi(2);
            prop_assert!(big.dot(&big).abs() <= 1e-10 * scale.max(1.0));
        }
    }

    #[test]
    fn passing_sets_have_ordered_unit_interval_betas(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = passing_coefficients(&mut rng, 0.0);
        let b = betas(&c).unwrap();
        let [b1, b2, bm, bp] = b.real_values().unwrap();
        prop_assert_eq!(b1, 0.0);
        prop_assert!(bm < bp);
        for x in [b1, b2, bm, bp] {
            prop_assert!((0.0..=1.0).contains(&x));
        }
        // det(𝒜^αξ_α) ≠ 0 for timelike ξ
        let u = boosted_velocity(&mut rng, 1.0);
        let xi = FourCovector([1.0, 0.3, -0.2, 0.1]);
        let d = det_factorization_check(&c, &u, &xi).unwrap();
        prop_assert!(d.brute.abs() > 0.0);
    }

    #[test]
    fn verdict_is_the_conjunction(seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = TransportValues {
            eta: rng.random_range(0.01..2.0),
            chi1: rng.random_range(0.01..3.0),
            chi2: rng.random_range(-1.0..2.0),
            chi3: rng.random_range(-1.0..2.0),
            chi4: rng.random_range(0.0..3.0),
            lambda: rng.random_range(0.01..2.0),
        };
        let r = causality_report(&with(t, rng.random_range(0.01..1.0)));
        let all = r.positivity && r.discriminant_positive && r.lambda_ge_eta
            && r.chi4_gt_four_thirds_eta && r.plus_branch_bound && r.composite_bounds
            && r.beta_in_unit_interval;
        prop_assert_eq!(all, r.verdict);
        prop_assert_eq!(r.failed.is_empty(), r.verdict);
    }
}

#[test]
fn rest_frame_spectrum_matches_speeds() {
    let c = reference_coefficients();
    let rep = eigenstructure(&c, &rest(), &DX, &SpectrumOptions::default()).unwrap();
    assert!(rep.max_imag <= 1e-8 * rep.spectral_radius);
    assert_eq!(rep.pattern, EXPECTED_PATTERN.to_vec());
    assert!(rep.matches_expected && !rep.degenerate);
    assert!(rep.residual.unwrap() <= 1e-8);
    let predicted = predicted_eigenvalues(&c, &rest(), &DX).unwrap();
    let b = betas(&c).unwrap().real_values().unwrap();
    let mut roots = vec![0.0];
    for x in &b[1..] {
        roots.push(x.sqrt());
        roots.push(-x.sqrt());
    }
    roots.sort_by(f64::total_cmp);
    for (p, r) in predicted.iter().zip(&roots) {
        assert!((p - r).abs() < 1e-12);
    }
    for (cl, r) in rep.clusters.iter().zip(&roots) {
        assert!((cl.value - r).abs() < 1e-8, "{cl:?} vs {r}");
    }
    assert_eq!(rep.clusters.iter().find(|c| c.value.abs() < 1e-8).unwrap().geometric, 20);
}

#[test]
fn boosted_spectra_keep_the_pattern() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let opts = SpectrumOptions::default();
    for _ in 0..10 {
        let c = passing_coefficients(&mut rng, 1e-3);
        let u = boosted_velocity(&mut rng, 1.0);
        let zeta = spatial_direction(&mut rng);
        let rep = eigenstructure(&c, &u, &zeta, &opts).unwrap();
        assert!(rep.max_imag <= 1e-8 * rep.spectral_radius);
        assert_eq!(rep.geometric_total, 30);
        assert_eq!(rep.pattern, EXPECTED_PATTERN.to_vec(), "{:?}", rep.clusters);
        assert!(rep.residual.unwrap() <= 1e-8);
        let predicted = predicted_eigenvalues(&c, &u, &zeta).unwrap();
        for (cl, p) in rep.clusters.iter().zip(&predicted) {
            assert!((cl.value - p).abs() < 1e-8);
        }
    }
}

#[test]
fn spectrum_requires_a_causal_sample() {
    let mut t = REFERENCE_TRANSPORT_COPY;
    t.chi4 = t.eta;
    let err = eigenstructure(&with(t, 1.0 / 3.0), &rest(), &DX, &SpectrumOptions::default());
    assert!(matches!(err, Err(SymbolError::Acausal(f)) if f.contains(&"chi4_gt_four_thirds_eta")));
}

#[test]
fn near_collision_is_reported_as_degenerate() {
    let opts = SpectrumOptions {
        degeneracy_tol: 1.0,
        ..SpectrumOptions::default()
    };
    let rep = eigenstructure(&reference_coefficients(), &rest(), &DX, &opts).unwrap();
    assert!(rep.degenerate);
}

#[test]
fn principal_matrix_records_its_inputs() {
    let c = reference_coefficients();
    let s = FluidPointState::equilibrium(1.0);
    let m = assemble_first_order(&c, &s.velocity(), 0).unwrap();
    assert_eq!(m.coeffs, c);
    assert_eq!(m.direction, DT);
    assert_eq!(m.u, rest());
}
