//! The n-stage repeated game: strategies, exact evaluation, sampling and entropy.

mod eval;
pub mod seeded;
mod strategy;

pub use eval::{
    effective_entropy, exact_payoff, exact_payoff_with_limit, monte_carlo_payoff, playout_rng, sample, sample_path, strategy_entropy, to_table,
    MonteCarloPayoff, RepeatedPayoff, NODE_GUARD,
};
pub(crate) use eval::{advance_all, distributions, joint_outcomes, subgame_entropy, Guard};
pub use seeded::{SeedPrior, SeedState, SeededStrategy, MAX_SEED_BITS};
pub use strategy::{check_profile, BehavioralStrategy, History, StrategyForm, StrategyState, TableStrategy, TriggerPlan};

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;
    use std::sync::Arc;

    use super::*;
    use crate::game::{matching_pennies, mp_punishment, MixedStrategy};
    use crate::scalar::{Rational, Scalar};

    type S = BehavioralStrategy<Rational>;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn uniform(owner: usize) -> S {
        S::stationary(owner, MixedStrategy::uniform(owner, 2))
    }

    fn constant(owner: usize, a: usize) -> S {
        S::stationary(owner, MixedStrategy::pure(owner, 2, a))
    }

    #[test]
    fn uniform_play_has_value_zero() {
        let g = matching_pennies::<Rational>();
        assert_eq!(exact_payoff(&g, 3, &[uniform(0), uniform(1)]).unwrap().0, vec![r(0, 1), r(0, 1)]);
    }

    #[test]
    fn pure_play() {
        let g = matching_pennies::<Rational>();
        assert_eq!(exact_payoff(&g, 2, &[constant(0, 0), constant(1, 1)]).unwrap().0, vec![r(-1, 1), r(1, 1)]);
    }

    fn cooperate_then_mix() -> Vec<S> {
        let g = mp_punishment::<Rational>();
        let coin = MixedStrategy::new(0, vec![r(0, 1), r(1, 2), r(1, 2), r(0, 1)]).unwrap();
        let punish = MixedStrategy::pure(0, 4, 3);
        let plan = Arc::new(TriggerPlan {
            action_counts: g.action_counts(),
            schedule: vec![vec![0, 0]; 4],
            tail: vec![vec![coin.clone(), coin.with_owner(1)]],
            punishments: vec![vec![punish.clone(), punish.clone()], vec![punish.clone(), punish]],
        });
        vec![S::trigger(0, plan.clone()), S::trigger(1, plan)]
    }

    #[test]
    fn cooperate_then_mix_payoff_and_entropy() {
        let g = mp_punishment::<Rational>();
        let p = cooperate_then_mix();
        assert_eq!(exact_payoff(&g, 5, &p).unwrap().0, vec![r(12, 5), r(12, 5)]);
        for i in 0..2 {
            assert_eq!(effective_entropy(&g, 5, &p, i).unwrap(), 1.0);
            assert_eq!(strategy_entropy(&g, 5, &p[i]).unwrap(), 1.0);
        }
    }

    #[test]
    fn entropy_of_uniform_and_pure() {
        let g = matching_pennies::<Rational>();
        assert_eq!(strategy_entropy(&g, 4, &uniform(0)).unwrap(), 4.0);
        assert_eq!(strategy_entropy(&g, 4, &constant(1, 0)).unwrap(), 0.0);
        assert_eq!(effective_entropy(&g, 4, &[uniform(0), uniform(1)], 1).unwrap(), 4.0);
    }

    #[test]
    fn seeded_constant_has_one_bit() {
        let g = matching_pennies::<Rational>();
        let s = S::seeded(SeededStrategy::from_fn(&g, 1, 3, 1, 0, |_, _, seed| seed as usize).unwrap());
        assert_eq!(strategy_entropy(&g, 3, &s).unwrap(), 1.0);
    }

    #[test]
    fn off_path_mixing_only_counts_in_worst_case() {
        // column mixes only after the row played T, which the row never does
        let g = matching_pennies::<Rational>();
        let mut entries = BTreeMap::new();
        entries.insert(vec![], MixedStrategy::pure(1, 2, 0));
        entries.insert(vec![vec![1, 0]], MixedStrategy::uniform(1, 2));
        let col = S::table(1, entries, Some(MixedStrategy::pure(1, 2, 0)));
        let p = vec![constant(0, 0), col.clone()];
        assert_eq!(effective_entropy(&g, 2, &p, 1).unwrap(), 0.0);
        assert_eq!(strategy_entropy(&g, 2, &col).unwrap(), 1.0);
    }

    #[test]
    fn table_conversion_preserves_payoff() {
        let g = matching_pennies::<Rational>();
        let s = S::seeded(
            SeededStrategy::from_fn(&g, 1, 3, 2, 1, |t, ctx, seed| ((seed as usize >> (t % 2)) ^ ctx.len()) & 1).unwrap(),
        );
        let table = to_table(&g, 3, &s).unwrap();
        for row in [uniform(0), constant(0, 1)] {
            assert_eq!(exact_payoff(&g, 3, &[row.clone(), s.clone()]).unwrap(), exact_payoff(&g, 3, &[row, table.clone()]).unwrap());
        }
    }

    #[test]
    fn monte_carlo_is_reproducible_and_exact_on_pure_play() {
        let g = matching_pennies::<Rational>();
        let a = monte_carlo_payoff(&g, 5, &[uniform(0), uniform(1)], 200, 7).unwrap();
        let b = monte_carlo_payoff(&g, 5, &[uniform(0), uniform(1)], 200, 7).unwrap();
        assert_eq!(a, b);
        let c = monte_carlo_payoff(&g, 4, &[constant(0, 0), constant(1, 1)], 10, 1).unwrap();
        assert_eq!(c.mean, vec![-1.0, 1.0]);
        assert_eq!(c.std_error, vec![0.0, 0.0]);
    }

    #[test]
    fn guard_trips() {
        let g = matching_pennies::<Rational>();
        let mut entries = BTreeMap::new();
        entries.insert(vec![], MixedStrategy::uniform(0, 2));
        let t = S::table(0, entries, Some(MixedStrategy::uniform(0, 2)));
        let err = exact_payoff_with_limit(&g, 30, &[t, uniform(1)], 1000).unwrap_err();
        assert!(matches!(err, crate::error::Error::Resource(_)));
    }
}
