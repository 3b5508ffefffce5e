use lowrand::construct::{folk_equilibrium, stagewise_equilibrium, FolkOptions};
use lowrand::engine::{exact_payoff, BehavioralStrategy, SeededStrategy};
use lowrand::exploit::opponents::{constant_by_seed, pattern_program};
use lowrand::game::{extended_mp, matching_pennies, mp_punishment};
use lowrand::solver::enumerate_bimatrix_nash;
use lowrand::verify::{
    best_response_value, certify, entropy_bound_check, min_low_entropy_stages, mp_potential_trace, onpath_stage_check,
    Verdict,
};
use lowrand::{MixedStrategy, PayoffProfile, Rational, Scalar};

fn r(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn pure_mp(row: usize, col: usize) -> Vec<BehavioralStrategy<Rational>> {
    vec![
        BehavioralStrategy::stationary(0, MixedStrategy::pure(0, 2, row)),
        BehavioralStrategy::stationary(1, MixedStrategy::pure(1, 2, col)),
    ]
}

#[test]
fn pure_matching_is_exploited_by_column() {
    let g = matching_pennies::<Rational>();
    let rep = certify(&g, 3, &pure_mp(0, 0), None).unwrap();
    assert_eq!(rep.exploitability, vec![r(0, 1), r(2, 1)]);
    assert_eq!(rep.verdict, Verdict::NotNe { player: 1, gain: r(2, 1) });
    let witness = rep.witness().unwrap().clone();
    let deviated = vec![pure_mp(0, 0)[0].clone(), witness];
    assert_eq!(exact_payoff(&g, 3, &deviated).unwrap().0[1], r(1, 1));
}

#[test]
fn eps_verdict() {
    let g = matching_pennies::<Rational>();
    let profile = vec![
        BehavioralStrategy::stationary(0, MixedStrategy::new(0, vec![r(3, 4), r(1, 4)]).unwrap()),
        BehavioralStrategy::stationary(1, MixedStrategy::uniform(1, 2)),
    ];
    let rep = certify(&g, 2, &profile, Some(&r(1, 2))).unwrap();
    assert_eq!(rep.exploitability, vec![r(0, 1), r(1, 2)]);
    assert_eq!(rep.verdict, Verdict::EpsNe { eps: r(1, 2) });
    let tight = certify(&g, 2, &profile, Some(&r(1, 4))).unwrap();
    assert!(matches!(tight.verdict, Verdict::NotNe { player: 1, .. }));
}

#[test]
fn best_response_witness_attains_value() {
    let g = matching_pennies::<Rational>();
    let prog = pattern_program(&g, 1, 4, 2, true, false).unwrap();
    let opp = BehavioralStrategy::seeded(prog);
    let profile = vec![BehavioralStrategy::stationary(0, MixedStrategy::uniform(0, 2)), opp.clone()];
    let br = best_response_value(&g, 4, &profile, 0).unwrap();
    // 2 seed bits revealed over the first two stages
    assert_eq!(br.value, r(1, 2));
    assert_eq!(exact_payoff(&g, 4, &[br.strategy, opp]).unwrap().0[0], r(1, 2));
}

#[test]
fn onpath_check_flags_pure_play() {
    let g = matching_pennies::<Rational>();
    let rep = onpath_stage_check(&g, 2, &pure_mp(0, 0)).unwrap();
    assert!(rep.hypothesis_met);
    assert_eq!(rep.checked, 2);
    assert_eq!(rep.violations.len(), 2);
    assert!(rep.violations.iter().all(|v| v.player == 1 && v.action == "T" && v.gain == r(2, 1)));
    assert!(rep.near_zero.is_empty());
}

#[test]
fn onpath_check_of_folk_profile() {
    let g = mp_punishment::<Rational>();
    let (profile, _) = folk_equilibrium(&g, 5, &PayoffProfile(vec![r(3, 1), r(3, 1)]), FolkOptions::default()).unwrap();
    let rep = onpath_stage_check(&g, 5, &profile).unwrap();
    // (C, C) is not a stage equilibrium and the game has equilibria above minmax
    assert!(!rep.hypothesis_met);
    assert_eq!(rep.violations.len(), 8);
}

#[test]
fn linear_bound_on_extended_mp() {
    let g = extended_mp::<Rational>();
    let eq = enumerate_bimatrix_nash(&g).unwrap().equilibria.remove(0);
    let profile = stagewise_equilibrium(&g, 3, &eq.profile).unwrap();
    let rep = entropy_bound_check(&g, 3, &profile).unwrap();
    assert!(rep.mp_floors.is_empty());
    for p in &rep.players {
        assert_eq!(p.beta, 1.0);
        assert_eq!(p.bound, 3.0);
        assert!(p.satisfied);
    }
}

#[test]
fn mp_floor_reported() {
    let g = matching_pennies::<Rational>();
    let col = BehavioralStrategy::seeded(constant_by_seed(&g, 1, 3).unwrap());
    let profile = vec![BehavioralStrategy::stationary(0, MixedStrategy::uniform(0, 2)), col];
    let rep = entropy_bound_check(&g, 3, &profile).unwrap();
    let floor = rep.mp_floors.iter().find(|f| f.exploited == 1).unwrap();
    assert!((floor.floor - 2.0 / 3.0).abs() < 1e-12);
    assert!((floor.best_response - 2.0 / 3.0).abs() < 1e-12);
    assert!(floor.satisfied);
    assert!(!rep.players[1].satisfied);
}

#[test]
fn potential_increments() {
    let g = matching_pennies::<Rational>();
    let uniform = BehavioralStrategy::stationary(1, MixedStrategy::uniform(1, 2));
    for step in mp_potential_trace(&g, 3, &uniform).unwrap() {
        assert_eq!(step.payoff, 0.0);
        assert!((step.increment - 1.0).abs() < 1e-12);
    }
    let biased = BehavioralStrategy::stationary(1, MixedStrategy::new(1, vec![r(1, 4), r(3, 4)]).unwrap());
    for step in mp_potential_trace(&g, 3, &biased).unwrap() {
        assert!((step.payoff - 0.5).abs() < 1e-12);
        assert!(step.increment >= step.lower_bound - 1e-12);
        assert!(step.lower_bound > 1.0);
    }
    let prog = pattern_program(&g, 1, 5, 4, false, false).unwrap();
    let steps = mp_potential_trace(&g, 5, &BehavioralStrategy::seeded(prog)).unwrap();
    assert!(steps.iter().all(|s| s.increment >= 1.0 - 1e-9));
    assert!(mp_potential_trace(&g, 3, &pure_mp(0, 0)[0]).is_err());
}

#[test]
fn low_entropy_stage_count() {
    let g = matching_pennies::<Rational>();
    let prog: SeededStrategy<Rational> = pattern_program(&g, 1, 6, 2, false, false).unwrap();
    // two bits revealed at stages 0 and 1, pure afterwards
    assert_eq!(min_low_entropy_stages(&g, 6, &BehavioralStrategy::seeded(prog), 0.5).unwrap(), 4);
}

#[test]
fn float_certificate_agrees() {
    let g = matching_pennies::<f64>();
    let profile = vec![
        BehavioralStrategy::stationary(0, MixedStrategy::uniform(0, 2)),
        BehavioralStrategy::stationary(1, MixedStrategy::uniform(1, 2)),
    ];
    let rep = certify(&g, 4, &profile, None).unwrap();
    assert_eq!(rep.verdict, Verdict::ExactNe);
    assert!(!rep.exact);
    assert_eq!(rep.entropy, vec![4.0, 4.0]);
}
