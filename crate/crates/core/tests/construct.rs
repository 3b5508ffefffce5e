use lowrand::construct::{folk_equilibrium, mp_epsnash, stagewise_equilibrium, zerosum_epsnash, FolkOptions};
use lowrand::engine::{effective_entropy, exact_payoff, strategy_entropy};
use lowrand::game::{extended_mp, matching_pennies, mp_punishment};
use lowrand::solver::enumerate_bimatrix_nash;
use lowrand::verify::{certify, Verdict};
use lowrand::{Error, MixedStrategy, PayoffProfile, Rational, Scalar, StageGame};

fn r(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn target(a: i64, b: i64) -> PayoffProfile<Rational> {
    PayoffProfile(vec![r(a, 1), r(b, 1)])
}

#[test]
fn folk_plan_shape() {
    let g = mp_punishment::<Rational>();
    let (_, plan) = folk_equilibrium(&g, 9, &target(3, 3), FolkOptions::default()).unwrap();
    assert_eq!(plan.denominator, 1);
    assert_eq!(plan.tail_min, 1);
    assert_eq!(plan.tail_length, 1);
    assert_eq!(plan.schedule, vec![vec![0, 0]; 8]);
    assert_eq!(plan.minmax, vec![r(-3, 1), r(-3, 1)]);
    for eq in &plan.tail_equilibria {
        assert!(eq.iter().all(|s| s.probs()[1] == r(1, 2) && s.probs()[2] == r(1, 2)));
    }
}

#[test]
fn folk_n5_is_exact_equilibrium() {
    let g = mp_punishment::<Rational>();
    let n = 5;
    let (profile, _) = folk_equilibrium(&g, n, &target(3, 3), FolkOptions::default()).unwrap();
    let rep = certify(&g, n, &profile, None).unwrap();
    assert_eq!(rep.verdict, Verdict::ExactNe);
    assert_eq!(rep.payoff, vec![r(12, 5), r(12, 5)]);
    assert_eq!(rep.effective_entropy, vec![1.0, 1.0]);
    assert!(rep.entropy.iter().all(|&h| h >= 1.0));
}

#[test]
fn folk_fractional_target_uses_longer_cycle() {
    let g = mp_punishment::<Rational>();
    let t = PayoffProfile(vec![r(9, 2), r(0, 1)]);
    let (profile, plan) = folk_equilibrium(&g, 12, &t, FolkOptions::default()).unwrap();
    assert_eq!(plan.denominator, 2);
    assert_eq!((12 - plan.tail_length) % 2, 0);
    assert_eq!(certify(&g, 12, &profile, None).unwrap().verdict, Verdict::ExactNe);
}

#[test]
fn folk_errors() {
    let g = mp_punishment::<Rational>();
    let opts = FolkOptions::default;
    assert!(matches!(folk_equilibrium(&g, 5, &target(5, 5), opts()), Err(Error::Infeasible(_))));
    assert!(matches!(
        folk_equilibrium(&g, 5, &target(-4, -4), opts()),
        Err(Error::NotIndividuallyRational { .. })
    ));
    assert!(matches!(folk_equilibrium(&g, 1, &target(3, 3), opts()), Err(Error::HorizonTooShort { .. })));
    // matching pennies has no equilibrium above minmax to threaten with
    let mp = matching_pennies::<Rational>();
    let bad_eq = vec![
        vec![MixedStrategy::pure(0, 2, 0), MixedStrategy::pure(1, 2, 0)],
        vec![MixedStrategy::uniform(0, 2), MixedStrategy::uniform(1, 2)],
    ];
    let res = folk_equilibrium(&mp, 4, &target(0, 0), FolkOptions { equilibria: Some(bad_eq), punishments: None });
    assert!(matches!(res, Err(Error::NotEquilibrium { .. })));
}

#[test]
fn stagewise_rejects_non_equilibrium() {
    let g = matching_pennies::<Rational>();
    let pure = [MixedStrategy::pure(0, 2, 0), MixedStrategy::pure(1, 2, 0)];
    assert!(matches!(stagewise_equilibrium(&g, 2, &pure), Err(Error::NotEquilibrium { player: 1, .. })));
}

#[test]
fn stagewise_nash_of_extended_mp() {
    let g = extended_mp::<Rational>();
    let eqs = enumerate_bimatrix_nash(&g).unwrap().equilibria;
    assert_eq!(eqs.len(), 3);
    for e in &eqs {
        let profile = stagewise_equilibrium(&g, 2, &e.profile).unwrap();
        let rep = certify(&g, 2, &profile, None).unwrap();
        assert_eq!(rep.verdict, Verdict::ExactNe);
        assert_eq!(rep.entropy, vec![2.0, 2.0]);
    }
}

#[test]
fn mp_epsnash_head_and_tail() {
    let g = matching_pennies::<Rational>();
    for (n, eps) in [(4usize, r(1, 4)), (6, r(1, 2)), (8, r(1, 4))] {
        let profile = mp_epsnash(n, &eps).unwrap();
        let head = ((r(n as i64, 1) * (r(1, 1) - eps.clone())).floor()).to_integer();
        let h = strategy_entropy(&g, n, &profile[0]).unwrap();
        assert_eq!(h, head.to_string().parse::<f64>().unwrap());
        let rep = certify(&g, n, &profile, Some(&(eps.clone() + r(2, n as i64)))).unwrap();
        assert!(matches!(rep.verdict, Verdict::EpsNe { .. } | Verdict::ExactNe));
    }
    assert!(mp_epsnash::<Rational>(4, &r(3, 2)).is_err());
}

#[test]
fn zerosum_epsnash_tail_alternates_extremes() {
    let g = StageGame::zero_sum("skew", &["a", "b"], &["x", "y"], vec![vec![r(3, 1), r(-1, 1)], vec![r(-2, 1), r(2, 1)]])
        .unwrap();
    let profile = zerosum_epsnash(&g, 4, &r(1, 2)).unwrap();
    let tail2 = profile[0].distribution_at(&[vec![0, 0], vec![0, 0]]).unwrap();
    let tail3 = profile[1].distribution_at(&[vec![0, 0], vec![0, 0], vec![0, 0]]).unwrap();
    assert_eq!(tail2.as_pure(), Some(0));
    assert_eq!(tail3.as_pure(), Some(0));
    let head = profile[0].distribution_at(&[]).unwrap();
    assert_eq!(head.probs(), &[r(1, 2), r(1, 2)]);
    let pay = exact_payoff(&g, 4, &profile).unwrap();
    assert_eq!(pay.0[0], r(2, 4));
    assert!(zerosum_epsnash(&mp_punishment::<Rational>(), 4, &r(1, 2)).is_err());
}

#[test]
fn float_folk_matches_exact() {
    let g = mp_punishment::<f64>();
    let (profile, _) = folk_equilibrium(&g, 5, &PayoffProfile(vec![3.0, 3.0]), FolkOptions::default()).unwrap();
    let rep = certify(&g, 5, &profile, None).unwrap();
    assert_eq!(rep.verdict, Verdict::ExactNe);
    assert!((rep.payoff[0] - 2.4).abs() < 1e-12);
    assert_eq!(effective_entropy(&g, 5, &profile, 0).unwrap(), 1.0);
}
