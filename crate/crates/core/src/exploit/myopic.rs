use crate::engine::{BehavioralStrategy, StrategyState};
use crate::error::Result;
use crate::exploit::stage_best_response;
use crate::game::{MixedStrategy, StageGame};
use crate::scalar::Scalar;

/// Plays, at every history, a pure stage best response to the opponent's
/// distribution there.
#[derive(Clone, Debug, PartialEq)]
pub struct MyopicBestResponse<T> {
    pub game: StageGame<T>,
    pub owner: usize,
    pub opponent: BehavioralStrategy<T>,
}

impl<T: Scalar> MyopicBestResponse<T> {
    pub(crate) fn initial_state(&self) -> StrategyState {
        StrategyState::Myopic(Box::new(self.opponent.initial_state()))
    }

    fn inner<'a>(&self, state: &'a StrategyState) -> &'a StrategyState {
        match state {
            StrategyState::Myopic(s) => s,
            other => other,
        }
    }

    pub(crate) fn distribution(&self, state: &StrategyState, stage: usize) -> Result<MixedStrategy<T>> {
        let opp = self.opponent.distribution(self.inner(state), stage)?;
        let a = stage_best_response(&self.game, self.owner, &opp)?;
        Ok(MixedStrategy::pure(self.owner, self.game.num_actions(self.owner), a))
    }

    pub(crate) fn advance(&self, state: &StrategyState, stage: usize, profile: &[usize]) -> StrategyState {
        StrategyState::Myopic(Box::new(self.opponent.advance(self.inner(state), stage, profile)))
    }
}
