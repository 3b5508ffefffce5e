//! Exact Bayesian seed learner against seeded opponents.

use std::collections::HashMap;
use std::sync::Arc;

use crate::engine::{
    advance_all, distributions, exact_payoff, joint_outcomes, BehavioralStrategy, Guard, SeedState, SeededStrategy,
    StrategyForm, StrategyState,
};
use crate::entropy::statistical_distance;
use crate::error::{Error, Result};
use crate::exploit::stage_best_response;
use crate::game::{MixedStrategy, Profile, StageGame};
use crate::scalar::Scalar;
use crate::solver::min_entropy_minmax;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LearnerMode {
    /// Exploit at every stage whose prediction passes the test.
    Continual,
    /// Exploit only at the first such stage, then fall back to minmax.
    SingleShot,
}

/// Posterior over the seeds of a known program, from a uniform (or supplied) prior.
#[derive(Clone, Debug, PartialEq)]
pub struct SeedPosterior<T> {
    program: Arc<SeededStrategy<T>>,
    state: SeedState,
    observations: Vec<Profile>,
}

impl<T: Scalar> SeedPosterior<T> {
    pub fn new(program: Arc<SeededStrategy<T>>) -> Self {
        let state = program.initial_state();
        SeedPosterior { program, state, observations: Vec::new() }
    }

    /// Conditions on one observed joint action.
    pub fn observe(&mut self, profile: &[usize]) -> Result<()> {
        let stage = self.observations.len();
        let own = profile[self.program.owner()];
        if !self.state.seeds.iter().any(|&s| self.program.action(stage, self.state.context, s) == own) {
            return Err(Error::Internal(format!("no seed explains action {own} at stage {stage}")));
        }
        self.state = self.program.advance(&self.state, stage, profile);
        self.observations.push(profile.to_vec());
        Ok(())
    }

    pub fn consistent_seeds(&self) -> &[u32] {
        &self.state.seeds
    }

    pub fn contains(&self, seed: u32) -> bool {
        self.state.seeds.contains(&seed)
    }

    pub fn observations(&self) -> &[Profile] {
        &self.observations
    }

    /// Normalised posterior weights.
    pub fn weights(&self) -> Vec<(u32, T)> {
        let total = self.state.seeds.iter().fold(T::zero(), |acc, &s| acc + self.program.weight(s));
        self.state.seeds.iter().map(|&s| (s, self.program.weight(s) / total.clone())).collect()
    }

    /// Predicted distribution of the program's next action.
    pub fn predict(&self) -> MixedStrategy<T> {
        self.program.distribution(&self.state, self.observations.len())
    }
}

/// A learner's claim about the opponent's next action.
#[derive(Clone, Debug, PartialEq)]
pub struct Hypothesis<T> {
    pub distribution: Vec<T>,
    /// Statistical distance from `distribution` to the nearest point mass.
    pub sd_bound: T,
    pub stage: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LearnerState {
    pub posterior: SeedState,
    /// Stage at which the first hypothesis was emitted.
    pub emitted: Option<usize>,
}

/// Plays a minmax strategy until the posterior prediction is within `threshold`
/// of a point mass, then best-responds to the prediction.
#[derive(Clone, Debug, PartialEq)]
pub struct SeedLearner<T> {
    pub game: StageGame<T>,
    pub owner: usize,
    pub opponent: Arc<SeededStrategy<T>>,
    pub threshold: T,
    pub mode: LearnerMode,
    pub minmax: MixedStrategy<T>,
}

impl<T: Scalar> SeedLearner<T> {
    pub fn new(game: &StageGame<T>, owner: usize, opponent: SeededStrategy<T>, threshold: T, mode: LearnerMode) -> Result<Self> {
        if game.num_players() != 2 || !game.is_zero_sum() {
            return Err(Error::domain("the seed learner plays two-player zero-sum games"));
        }
        if opponent.owner() == owner {
            return Err(Error::invalid("the learner cannot model itself"));
        }
        if opponent.action_counts() != game.action_counts() {
            return Err(Error::invalid("opponent program built for another game"));
        }
        if threshold.is_negative() || threshold > T::one() {
            return Err(Error::invalid(format!("threshold {threshold} outside [0, 1]")));
        }
        let (_, minmax) = min_entropy_minmax(game, owner)?;
        Ok(SeedLearner { game: game.clone(), owner, opponent: Arc::new(opponent), threshold, mode, minmax })
    }

    fn learner_state<'a>(&self, state: &'a StrategyState) -> Result<&'a LearnerState> {
        match state {
            StrategyState::Learner(l) => Ok(l),
            _ => Err(Error::Internal("seed learner evaluated on a foreign state".into())),
        }
    }

    pub(crate) fn initial_state(&self) -> StrategyState {
        StrategyState::Learner(LearnerState { posterior: self.opponent.initial_state(), emitted: None })
    }

    /// The hypothesis the learner would emit at this state, if the test passes.
    pub fn hypothesis(&self, state: &LearnerState, stage: usize) -> Option<Hypothesis<T>> {
        let predicted = self.opponent.distribution(&state.posterior, stage);
        let mode = predicted.mode();
        let point = MixedStrategy::pure(predicted.owner(), predicted.len(), mode);
        let sd = statistical_distance(predicted.probs(), point.probs()).expect("same length");
        (sd <= self.threshold).then(|| Hypothesis { distribution: predicted.probs().to_vec(), sd_bound: sd, stage })
    }

    fn exploits(&self, state: &LearnerState, stage: usize) -> bool {
        match self.mode {
            LearnerMode::SingleShot if state.emitted.is_some() => false,
            _ => self.hypothesis(state, stage).is_some(),
        }
    }

    pub(crate) fn distribution(&self, state: &StrategyState, stage: usize) -> Result<MixedStrategy<T>> {
        let l = self.learner_state(state)?;
        if self.exploits(l, stage) {
            let predicted = self.opponent.distribution(&l.posterior, stage);
            let a = stage_best_response(&self.game, self.owner, &predicted)?;
            return Ok(MixedStrategy::pure(self.owner, self.game.num_actions(self.owner), a));
        }
        Ok(self.minmax.clone())
    }

    pub(crate) fn advance(&self, state: &StrategyState, stage: usize, profile: &[usize]) -> StrategyState {
        let Ok(l) = self.learner_state(state) else {
            return state.clone();
        };
        let emitted = l.emitted.or_else(|| self.hypothesis(l, stage).map(|_| stage));
        StrategyState::Learner(LearnerState { posterior: self.opponent.advance(&l.posterior, stage, profile), emitted })
    }
}

/// Outcome of the learner against one fixed seed.
#[derive(Clone, Debug, PartialEq)]
pub struct SeedRun<T> {
    pub seed: u32,
    /// The learner's exact expected average payoff.
    pub payoff: T,
    /// Latest first-emission stage over all positive-probability play paths;
    /// `None` if some path never emits.
    pub emission_stage: Option<usize>,
}

/// Runs `learner` against `opponent` with each seed fixed in turn.
pub fn seed_learner_runs<T: Scalar>(
    game: &StageGame<T>,
    n: usize,
    learner: &BehavioralStrategy<T>,
    opponent: &SeededStrategy<T>,
) -> Result<Vec<SeedRun<T>>> {
    if !matches!(learner.form(), StrategyForm::SeedLearner(_)) {
        return Err(Error::invalid("expected a seed-learner strategy"));
    }
    let owner = learner.owner();
    (0..opponent.seed_count())
        .map(|seed| {
            let opp = BehavioralStrategy::seeded(opponent.with_seed(seed)?);
            let profile = if owner == 0 { vec![learner.clone(), opp] } else { vec![opp, learner.clone()] };
            let payoff = exact_payoff(game, n, &profile)?.0.swap_remove(owner);
            let emission_stage = latest_emission(n, &profile, owner)?;
            Ok(SeedRun { seed, payoff, emission_stage })
        })
        .collect()
}

fn latest_emission<T: Scalar>(n: usize, profile: &[BehavioralStrategy<T>], owner: usize) -> Result<Option<usize>> {
    // `Some(None)` encodes "never emits", the worst outcome
    fn rec<T: Scalar>(
        n: usize,
        profile: &[BehavioralStrategy<T>],
        owner: usize,
        t: usize,
        states: Vec<StrategyState>,
        memo: &mut HashMap<(usize, Vec<StrategyState>), Option<usize>>,
        guard: &mut Guard,
    ) -> Result<Option<usize>> {
        if let StrategyState::Learner(LearnerState { emitted: Some(s), .. }) = &states[owner] {
            return Ok(Some(*s));
        }
        if t == n {
            return Ok(None);
        }
        let key = (t, states);
        if let Some(v) = memo.get(&key) {
            return Ok(*v);
        }
        guard.tick()?;
        let dists = distributions(profile, &key.1, t)?;
        let mut worst = Some(0);
        for (joint, _) in joint_outcomes(&dists, true) {
            let next = advance_all(profile, &key.1, t, &joint);
            match rec(n, profile, owner, t + 1, next, memo, guard)? {
                None => worst = None,
                Some(s) => worst = worst.map(|w: usize| w.max(s)),
            }
        }
        memo.insert(key, worst);
        Ok(worst)
    }
    let states = profile.iter().map(|s| s.initial_state()).collect();
    rec(n, profile, owner, 0, states, &mut HashMap::new(), &mut Guard::new())
}
