//! Exploiting opponents whose randomness is limited.

pub mod learner;
pub mod myopic;
pub mod opponents;
pub mod predictor;

use std::sync::Arc;

pub use crate::entropy::statistical_distance;
pub use learner::{seed_learner_runs, Hypothesis, LearnerMode, LearnerState, SeedLearner, SeedPosterior, SeedRun};
pub use myopic::MyopicBestResponse;
pub use predictor::{Predictor, PredictorConfig, PredictorState};

use crate::engine::{advance_all, distributions, playout_rng, sample, BehavioralStrategy, SeededStrategy, StrategyForm, StrategyState};
use crate::error::{Error, Result};
use crate::game::{MixedStrategy, StageGame};
use crate::scalar::Scalar;

/// Pure best response of `player` to the other player's mixture, lowest index on ties.
pub fn stage_best_response<T: Scalar>(game: &StageGame<T>, player: usize, other: &MixedStrategy<T>) -> Result<usize> {
    let m = game.own_matrix(player)?;
    let mut best: Option<(usize, T)> = None;
    for (a, row) in m.iter().enumerate() {
        let v = row.iter().zip(other.probs()).fold(T::zero(), |acc, (u, q)| acc + u.clone() * q.clone());
        match &best {
            Some((_, b)) if !(v > *b && !v.approx_eq(b)) => {}
            _ => best = Some((a, v)),
        }
    }
    Ok(best.expect("nonempty action set").0)
}

/// Best-responds myopically, stage by stage, to `opponent`.
pub fn best_response_exploiter<T: Scalar>(game: &StageGame<T>, opponent: &BehavioralStrategy<T>) -> Result<BehavioralStrategy<T>> {
    if game.num_players() != 2 {
        return Err(Error::Unsupported("the myopic exploiter faces a single opponent".into()));
    }
    opponent.validate(game)?;
    let owner = 1 - opponent.owner();
    let m = MyopicBestResponse { game: game.clone(), owner, opponent: opponent.clone() };
    Ok(BehavioralStrategy::from_form(owner, StrategyForm::Myopic(Arc::new(m))))
}

pub fn predictor_strategy<T: Scalar>(game: &StageGame<T>, owner: usize, config: PredictorConfig) -> Result<BehavioralStrategy<T>> {
    let p = Predictor::new(game, owner, config)?;
    Ok(BehavioralStrategy::from_form(owner, StrategyForm::Predictor(Arc::new(p))))
}

/// The seed learner for `owner` against a known program with unknown seed.
pub fn seed_learner_strategy<T: Scalar>(
    game: &StageGame<T>,
    n: usize,
    owner: usize,
    opponent: &SeededStrategy<T>,
    threshold: T,
    mode: LearnerMode,
) -> Result<BehavioralStrategy<T>> {
    if opponent.horizon() < n {
        return Err(Error::invalid(format!("opponent program covers {} stages, need {n}", opponent.horizon())));
    }
    let belief = opponent.clone().with_prior(crate::engine::SeedPrior::Uniform)?;
    let l = SeedLearner::new(game, owner, belief, threshold, mode)?;
    Ok(BehavioralStrategy::from_form(owner, StrategyForm::SeedLearner(Arc::new(l))))
}

/// Describes why the advantage guarantee does not apply, if the game has a
/// weakly dominant pure action.
pub fn weak_dominance_warning<T: Scalar>(game: &StageGame<T>) -> Option<String> {
    let dom = game.weakly_dominant_actions();
    let found: Vec<String> = dom
        .iter()
        .enumerate()
        .flat_map(|(i, acts)| acts.iter().map(move |&a| (i, a)))
        .map(|(i, a)| format!("player {i} action {}", game.labels(i)[a]))
        .collect();
    (!found.is_empty()).then(|| format!("weakly dominant pure strategies ({}); no advantage is guaranteed", found.join(", ")))
}

/// One stage of a sampled play, seen from `observer`.
#[derive(Clone, Debug, PartialEq)]
pub struct TranscriptRow {
    pub stage: usize,
    pub own_action: String,
    pub opponent_action: String,
    /// Posterior size or predictor confidence before the stage, when the observer has one.
    pub diagnostic: Option<f64>,
    pub running_average: f64,
}

/// Samples one play of a two-player profile on stream `rng_seed`.
pub fn transcript<T: Scalar>(
    game: &StageGame<T>,
    n: usize,
    profile: &[BehavioralStrategy<T>],
    observer: usize,
    rng_seed: u64,
) -> Result<Vec<TranscriptRow>> {
    crate::engine::check_profile(game, profile)?;
    if game.num_players() != 2 {
        return Err(Error::Unsupported("transcripts are two-player".into()));
    }
    let mut rng = playout_rng(rng_seed, 0);
    let mut states: Vec<StrategyState> = profile.iter().map(|s| s.initial_state()).collect();
    let mut total = 0.0;
    let mut rows = Vec::with_capacity(n);
    for t in 0..n {
        let diagnostic = profile[observer].diagnostic(&states[observer], t);
        let dists = distributions(profile, &states, t)?;
        let joint: Vec<usize> = dists.iter().map(|d| sample(d, rand::Rng::gen::<f64>(&mut rng))).collect();
        total += game.payoff(&joint, observer).to_f64_lossy();
        rows.push(TranscriptRow {
            stage: t,
            own_action: game.labels(observer)[joint[observer]].clone(),
            opponent_action: game.labels(1 - observer)[joint[1 - observer]].clone(),
            diagnostic,
            running_average: total / (t + 1) as f64,
        });
        states = advance_all(profile, &states, t, &joint);
    }
    Ok(rows)
}
