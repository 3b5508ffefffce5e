use std::collections::BTreeMap;
use std::sync::Arc;

use crate::engine::seeded::{SeedState, SeededStrategy};
use crate::error::{Error, Result};
use crate::exploit::learner::{LearnerState, SeedLearner};
use crate::exploit::myopic::MyopicBestResponse;
use crate::exploit::predictor::{Predictor, PredictorState};
use crate::game::{MixedStrategy, Profile, StageGame};
use crate::scalar::Scalar;

/// A play path of the n-stage game.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct History {
    horizon: usize,
    stages: Vec<Profile>,
}

impl History {
    pub fn new(horizon: usize) -> Self {
        History { horizon, stages: Vec::new() }
    }

    pub fn from_stages<T: Scalar>(game: &StageGame<T>, horizon: usize, stages: Vec<Profile>) -> Result<Self> {
        let mut h = History::new(horizon);
        for p in stages {
            h.push(game, p)?;
        }
        Ok(h)
    }

    pub fn push<T: Scalar>(&mut self, game: &StageGame<T>, profile: Profile) -> Result<()> {
        if self.stages.len() >= self.horizon {
            return Err(Error::invalid("history is already terminal"));
        }
        if !game.is_valid_profile(&profile) {
            return Err(Error::invalid(format!("invalid profile {profile:?}")));
        }
        self.stages.push(profile);
        Ok(())
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn stages(&self) -> &[Profile] {
        &self.stages
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    pub fn is_terminal(&self) -> bool {
        self.stages.len() == self.horizon
    }
}

/// Explicit history-to-distribution table.
#[derive(Clone, Debug, PartialEq)]
pub struct TableStrategy<T> {
    pub entries: BTreeMap<Vec<Profile>, MixedStrategy<T>>,
    /// Used at histories missing from `entries`.
    pub default: Option<MixedStrategy<T>>,
}

/// Grim-trigger plan shared by every player of a folk-theorem profile.
#[derive(Clone, Debug, PartialEq)]
pub struct TriggerPlan<T> {
    pub action_counts: Vec<usize>,
    /// Pure profiles of the first phase, one per stage.
    pub schedule: Vec<Profile>,
    /// Stage equilibria cycled after the schedule.
    pub tail: Vec<Vec<MixedStrategy<T>>>,
    /// `punishments[j][i]`: what player `i` plays forever once `j` has deviated.
    pub punishments: Vec<Vec<MixedStrategy<T>>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StrategyForm<T> {
    Table(TableStrategy<T>),
    /// History-independent stage strategies; the last entry repeats.
    Schedule(Vec<MixedStrategy<T>>),
    Trigger(Arc<TriggerPlan<T>>),
    Seeded(Arc<SeededStrategy<T>>),
    Myopic(Arc<MyopicBestResponse<T>>),
    SeedLearner(Arc<SeedLearner<T>>),
    Predictor(Arc<Predictor<T>>),
}

/// Hashable summary of everything a strategy remembers about the past.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StrategyState {
    Stateless,
    History(Vec<Profile>),
    /// `Some(j)` once player `j` deviated from the schedule.
    Trigger(Option<usize>),
    Seeds(SeedState),
    Myopic(Box<StrategyState>),
    Learner(LearnerState),
    Predictor(PredictorState),
}

/// A repeated-game strategy of one player.
#[derive(Clone, Debug, PartialEq)]
pub struct BehavioralStrategy<T> {
    owner: usize,
    form: StrategyForm<T>,
}

impl<T: Scalar> BehavioralStrategy<T> {
    pub fn from_form(owner: usize, form: StrategyForm<T>) -> Self {
        BehavioralStrategy { owner, form }
    }

    pub fn table(owner: usize, entries: BTreeMap<Vec<Profile>, MixedStrategy<T>>, default: Option<MixedStrategy<T>>) -> Self {
        Self::from_form(owner, StrategyForm::Table(TableStrategy { entries, default }))
    }

    pub fn schedule(owner: usize, stages: Vec<MixedStrategy<T>>) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::invalid("empty schedule"));
        }
        Ok(Self::from_form(owner, StrategyForm::Schedule(stages.into_iter().map(|s| s.with_owner(owner)).collect())))
    }

    pub fn stationary(owner: usize, stage: MixedStrategy<T>) -> Self {
        Self::from_form(owner, StrategyForm::Schedule(vec![stage.with_owner(owner)]))
    }

    /// Plays the listed pure actions stage by stage.
    pub fn pure_sequence(owner: usize, num_actions: usize, actions: &[usize]) -> Result<Self> {
        Self::schedule(owner, actions.iter().map(|&a| MixedStrategy::pure(owner, num_actions, a)).collect())
    }

    pub fn trigger(owner: usize, plan: Arc<TriggerPlan<T>>) -> Self {
        Self::from_form(owner, StrategyForm::Trigger(plan))
    }

    pub fn seeded(program: SeededStrategy<T>) -> Self {
        Self::from_form(program.owner(), StrategyForm::Seeded(Arc::new(program)))
    }

    pub fn owner(&self) -> usize {
        self.owner
    }

    pub fn form(&self) -> &StrategyForm<T> {
        &self.form
    }

    /// Kind name used in files and reports.
    pub fn kind(&self) -> &'static str {
        match &self.form {
            StrategyForm::Table(_) => "table",
            StrategyForm::Schedule(_) => "schedule",
            StrategyForm::Trigger(_) => "trigger",
            StrategyForm::Seeded(_) => "seeded",
            StrategyForm::Myopic(_) => "myopic-best-response",
            StrategyForm::SeedLearner(_) => "seed-learner",
            StrategyForm::Predictor(_) => "predictor",
        }
    }

    pub fn initial_state(&self) -> StrategyState {
        match &self.form {
            StrategyForm::Table(_) => StrategyState::History(Vec::new()),
            StrategyForm::Schedule(_) => StrategyState::Stateless,
            StrategyForm::Trigger(_) => StrategyState::Trigger(None),
            StrategyForm::Seeded(s) => StrategyState::Seeds(s.initial_state()),
            StrategyForm::Myopic(m) => m.initial_state(),
            StrategyForm::SeedLearner(l) => l.initial_state(),
            StrategyForm::Predictor(p) => p.initial_state(),
        }
    }

    /// The stage distribution at `state`, which must have been produced by this strategy.
    pub fn distribution(&self, state: &StrategyState, stage: usize) -> Result<MixedStrategy<T>> {
        match (&self.form, state) {
            (StrategyForm::Table(t), StrategyState::History(h)) => t
                .entries
                .get(h)
                .or(t.default.as_ref())
                .cloned()
                .map(|s| s.with_owner(self.owner))
                .ok_or_else(|| Error::invalid(format!("strategy table has no entry for history {h:?}"))),
            (StrategyForm::Schedule(s), _) => Ok(s[stage.min(s.len() - 1)].clone()),
            (StrategyForm::Trigger(plan), StrategyState::Trigger(dev)) => plan_distribution(plan, self.owner, *dev, stage),
            (StrategyForm::Seeded(s), StrategyState::Seeds(st)) => Ok(s.distribution(st, stage)),
            (StrategyForm::Myopic(m), _) => m.distribution(state, stage),
            (StrategyForm::SeedLearner(l), _) => l.distribution(state, stage),
            (StrategyForm::Predictor(p), _) => p.distribution(state, stage),
            _ => Err(Error::Internal(format!("state {state:?} does not belong to a {} strategy", self.kind()))),
        }
    }

    pub fn advance(&self, state: &StrategyState, stage: usize, profile: &[usize]) -> StrategyState {
        match (&self.form, state) {
            (StrategyForm::Table(_), StrategyState::History(h)) => {
                let mut h = h.clone();
                h.push(profile.to_vec());
                StrategyState::History(h)
            }
            (StrategyForm::Trigger(plan), StrategyState::Trigger(None)) if stage < plan.schedule.len() => {
                let planned = &plan.schedule[stage];
                // the owner never punishes itself
                let deviator = (0..profile.len()).find(|&j| j != self.owner && profile[j] != planned[j]);
                StrategyState::Trigger(deviator)
            }
            (StrategyForm::Seeded(s), StrategyState::Seeds(st)) => StrategyState::Seeds(s.advance(st, stage, profile)),
            (StrategyForm::Myopic(m), _) => m.advance(state, stage, profile),
            (StrategyForm::SeedLearner(l), _) => l.advance(state, stage, profile),
            (StrategyForm::Predictor(p), _) => p.advance(state, stage, profile),
            _ => state.clone(),
        }
    }

    /// Replays `history` and returns the distribution at its end.
    pub fn distribution_at(&self, history: &[Profile]) -> Result<MixedStrategy<T>> {
        let state = self.state_after(history);
        self.distribution(&state, history.len())
    }

    pub fn state_after(&self, history: &[Profile]) -> StrategyState {
        let mut state = self.initial_state();
        for (t, p) in history.iter().enumerate() {
            state = self.advance(&state, t, p);
        }
        state
    }

    /// Engine diagnostic for transcripts: posterior size or predictor confidence.
    pub fn diagnostic(&self, state: &StrategyState, stage: usize) -> Option<f64> {
        match (&self.form, state) {
            (StrategyForm::SeedLearner(_), StrategyState::Learner(l)) => Some(l.posterior.seeds.len() as f64),
            (StrategyForm::Seeded(_), StrategyState::Seeds(s)) => Some(s.seeds.len() as f64),
            (StrategyForm::Predictor(p), StrategyState::Predictor(m)) => Some(p.confidence(m, stage)),
            _ => None,
        }
    }

    /// Checks dimensions against the game.
    pub fn validate(&self, game: &StageGame<T>) -> Result<()> {
        if self.owner >= game.num_players() {
            return Err(Error::invalid(format!("strategy owner {} is not a player", self.owner)));
        }
        let n = game.num_actions(self.owner);
        let check = |s: &MixedStrategy<T>| {
            if s.len() == n {
                Ok(())
            } else {
                Err(Error::invalid(format!("stage strategy has {} weights, player has {n} actions", s.len())))
            }
        };
        match &self.form {
            StrategyForm::Table(t) => t.entries.values().chain(t.default.iter()).try_for_each(check),
            StrategyForm::Schedule(s) => s.iter().try_for_each(check),
            StrategyForm::Trigger(p) => {
                if p.action_counts != game.action_counts() {
                    return Err(Error::invalid("trigger plan built for another game"));
                }
                p.tail.iter().chain(&p.punishments).flat_map(|q| q.get(self.owner)).try_for_each(check)
            }
            StrategyForm::Seeded(s) => {
                if s.action_counts() != game.action_counts() {
                    return Err(Error::invalid("seeded program built for another game"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

fn plan_distribution<T: Scalar>(
    plan: &TriggerPlan<T>,
    owner: usize,
    deviator: Option<usize>,
    stage: usize,
) -> Result<MixedStrategy<T>> {
    if let Some(j) = deviator {
        return Ok(plan.punishments[j][owner].clone().with_owner(owner));
    }
    if stage < plan.schedule.len() {
        return Ok(MixedStrategy::pure(owner, plan.action_counts[owner], plan.schedule[stage][owner]));
    }
    if plan.tail.is_empty() {
        return Err(Error::invalid("trigger plan has no tail equilibria for the remaining stages"));
    }
    let t = (stage - plan.schedule.len()) % plan.tail.len();
    Ok(plan.tail[t][owner].clone().with_owner(owner))
}

/// Checks that `profile` has one strategy per player, in order.
pub fn check_profile<T: Scalar>(game: &StageGame<T>, profile: &[BehavioralStrategy<T>]) -> Result<()> {
    if profile.len() != game.num_players() {
        return Err(Error::invalid(format!("expected {} strategies, got {}", game.num_players(), profile.len())));
    }
    for (i, s) in profile.iter().enumerate() {
        if s.owner() != i {
            return Err(Error::invalid(format!("strategy {i} belongs to player {}", s.owner())));
        }
        s.validate(game)?;
    }
    Ok(())
}
