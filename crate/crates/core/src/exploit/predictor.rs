//! Context-counting next-action predictor.

use crate::engine::StrategyState;
use crate::error::{Error, Result};
use crate::exploit::stage_best_response;
use crate::game::{MixedStrategy, StageGame};
use crate::scalar::Scalar;
use crate::solver::min_entropy_minmax;

#[derive(Clone, Debug, PartialEq)]
pub struct PredictorConfig {
    /// Number of past opponent actions forming the context.
    pub context_length: usize,
    /// Empirical frequency needed before acting on a prediction.
    pub threshold: f64,
    /// Observations of a context needed before acting on it.
    pub min_support: u32,
}

impl Default for PredictorConfig {
    fn default() -> Self {
        PredictorConfig { context_length: 1, threshold: 0.75, min_support: 3 }
    }
}

/// Per-context action counts of the observed opponent and the current context.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredictorState {
    pub counts: Vec<u32>,
    pub context: usize,
}

/// Plays a stage best response to a confident prediction and the fallback
/// (min-entropy minmax) strategy otherwise.
#[derive(Clone, Debug, PartialEq)]
pub struct Predictor<T> {
    pub game: StageGame<T>,
    pub owner: usize,
    pub config: PredictorConfig,
    pub fallback: MixedStrategy<T>,
}

impl<T: Scalar> Predictor<T> {
    pub fn new(game: &StageGame<T>, owner: usize, config: PredictorConfig) -> Result<Self> {
        if game.num_players() != 2 || !game.is_zero_sum() {
            return Err(Error::domain("the predictor plays two-player zero-sum games"));
        }
        if !(config.threshold > 0.5 && config.threshold <= 1.0) {
            return Err(Error::invalid(format!("threshold {} outside (1/2, 1]", config.threshold)));
        }
        if config.context_length > 4 {
            return Err(Error::invalid("context length is capped at 4"));
        }
        let (_, fallback) = min_entropy_minmax(game, owner)?;
        Ok(Predictor { game: game.clone(), owner, config, fallback })
    }

    fn opponent(&self) -> usize {
        1 - self.owner
    }

    fn arity(&self) -> usize {
        self.game.num_actions(self.opponent())
    }

    fn context_count(&self) -> usize {
        (self.arity() + 1).pow(self.config.context_length as u32)
    }

    pub(crate) fn initial_state(&self) -> StrategyState {
        StrategyState::Predictor(PredictorState { counts: vec![0; self.context_count() * self.arity()], context: 0 })
    }

    fn counts<'a>(&self, mem: &'a PredictorState) -> &'a [u32] {
        let m = self.arity();
        &mem.counts[mem.context * m..(mem.context + 1) * m]
    }

    /// Empirical frequency of the most common action in the current context.
    pub fn confidence(&self, mem: &PredictorState, _stage: usize) -> f64 {
        let c = self.counts(mem);
        let total: u32 = c.iter().sum();
        if total == 0 {
            return 0.0;
        }
        *c.iter().max().expect("nonempty") as f64 / total as f64
    }

    /// The confident prediction, if any (lowest action index on ties).
    pub fn prediction(&self, mem: &PredictorState) -> Option<usize> {
        let c = self.counts(mem);
        let total: u32 = c.iter().sum();
        if total < self.config.min_support.max(1) {
            return None;
        }
        let best = (0..c.len()).fold(0, |b, a| if c[a] > c[b] { a } else { b });
        (c[best] as f64 / total as f64 >= self.config.threshold).then_some(best)
    }

    /// Laplace-smoothed next-action distribution `(c + 1) / (N + |A|)`.
    pub fn smoothed(&self, mem: &PredictorState) -> Vec<f64> {
        let c = self.counts(mem);
        let total: u32 = c.iter().sum();
        c.iter().map(|&x| (x + 1) as f64 / (total as usize + c.len()) as f64).collect()
    }

    pub(crate) fn distribution(&self, state: &StrategyState, _stage: usize) -> Result<MixedStrategy<T>> {
        let StrategyState::Predictor(mem) = state else {
            return Err(Error::Internal("predictor evaluated on a foreign state".into()));
        };
        match self.prediction(mem) {
            Some(a) => {
                let predicted = MixedStrategy::pure(self.opponent(), self.arity(), a);
                let br = stage_best_response(&self.game, self.owner, &predicted)?;
                Ok(MixedStrategy::pure(self.owner, self.game.num_actions(self.owner), br))
            }
            None => Ok(self.fallback.clone()),
        }
    }

    pub(crate) fn advance(&self, state: &StrategyState, _stage: usize, profile: &[usize]) -> StrategyState {
        let StrategyState::Predictor(mem) = state else {
            return state.clone();
        };
        let m = self.arity();
        let seen = profile[self.opponent()];
        let mut counts = mem.counts.clone();
        counts[mem.context * m + seen] += 1;
        let context = if self.config.context_length == 0 {
            0
        } else {
            (mem.context * (m + 1) + seen + 1) % self.context_count()
        };
        StrategyState::Predictor(PredictorState { counts, context })
    }
}
