//! One human-versus-engine play. The engine's action for a stage is drawn
//! when the previous stage closes, so it can never depend on the human's
//! move of the same stage.

use std::collections::VecDeque;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use lowrand::engine::{playout_rng, sample, BehavioralStrategy, StrategyState};
use lowrand::entropy::empirical_entropy;
use lowrand::exploit::{best_response_exploiter, predictor_strategy, PredictorConfig};
use lowrand::formats::strategy_from_value;
use lowrand::game::example_game;
use lowrand::{Rational, Scalar, StageGame};

pub const MAX_HORIZON: usize = 500;
/// Moves used by the sliding-window entropy estimate of the human.
pub const ENTROPY_WINDOW: usize = 16;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum PlayError {
    #[error("unknown game {0:?}")]
    UnknownGame(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown session")]
    UnknownSession,
    #[error("session complete")]
    SessionComplete,
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("journal: {0}")]
    Journal(String),
}

fn default_context() -> usize {
    PredictorConfig::default().context_length
}

fn default_threshold() -> f64 {
    PredictorConfig::default().threshold
}

fn default_support() -> u32 {
    PredictorConfig::default().min_support
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EngineConfig {
    Predictor {
        #[serde(default = "default_context")]
        context_length: usize,
        #[serde(default = "default_threshold")]
        threshold: f64,
        #[serde(default = "default_support")]
        min_support: u32,
    },
    /// Accepted by the parser only so it can be refused with a pointer to the predictor.
    SeedLearner {
        #[serde(default)]
        threshold: Option<String>,
    },
    /// Best response to a fixed belief about the human, given as a strategy document.
    Myopic { belief: serde_json::Value },
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig::Predictor {
            context_length: default_context(),
            threshold: default_threshold(),
            min_support: default_support(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CreateRequest {
    pub game: String,
    pub n: usize,
    #[serde(default)]
    pub engine: EngineConfig,
    #[serde(default)]
    pub human_player: usize,
    /// Fixes the engine's random stream, for replays.
    #[serde(default)]
    pub seed: Option<u64>,
}

/// A move given by label (`"H"`) or by action index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HumanAction {
    Index(usize),
    Label(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct StageRecord {
    pub human: usize,
    pub engine: usize,
    pub payoffs: Vec<Rational>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StageView {
    pub stage: usize,
    pub human: String,
    pub engine: String,
    pub payoffs: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Diagnostics {
    /// Predictor confidence for the coming stage.
    pub engine_confidence: Option<f64>,
    /// Plug-in entropy (bits) of the human's last moves.
    pub human_entropy: f64,
    pub window: usize,
    pub human_counts: Vec<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FinalReport {
    pub human_entropy: f64,
    pub human_entropy_overall: f64,
    pub average_payoffs: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SessionView {
    pub id: String,
    pub game: String,
    pub n: usize,
    pub human_player: usize,
    pub engine: EngineConfig,
    pub transcript: Vec<StageView>,
    pub scores: Vec<String>,
    pub diagnostics: Diagnostics,
    pub remaining: usize,
    pub complete: bool,
    pub report: Option<FinalReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StageResult {
    pub stage: usize,
    pub human: String,
    pub engine: String,
    pub payoffs: Vec<String>,
    pub scores: Vec<String>,
    pub diagnostics: Diagnostics,
    pub remaining: usize,
    pub complete: bool,
}

pub struct Session {
    id: String,
    request: CreateRequest,
    seed: u64,
    game: StageGame<Rational>,
    engine_player: usize,
    strategy: BehavioralStrategy<Rational>,
    state: StrategyState,
    rng: ChaCha8Rng,
    committed: Option<usize>,
    transcript: Vec<StageRecord>,
    scores: Vec<Rational>,
    window: VecDeque<usize>,
}

fn fmt(xs: &[Rational]) -> Vec<String> {
    xs.iter().map(Scalar::format_scalar).collect()
}

impl Session {
    pub fn new(id: String, request: CreateRequest, seed: u64) -> Result<Self, PlayError> {
        let game = example_game::<Rational>(&request.game).map_err(|_| PlayError::UnknownGame(request.game.clone()))?;
        if game.num_players() != 2 || (0..2).any(|i| !(2..=4).contains(&game.num_actions(i))) {
            return Err(PlayError::InvalidConfig("play needs a two-player game with two to four actions each".into()));
        }
        if request.n == 0 || request.n > MAX_HORIZON {
            return Err(PlayError::InvalidConfig(format!("n must be between 1 and {MAX_HORIZON}")));
        }
        if request.human_player > 1 {
            return Err(PlayError::InvalidConfig("human_player must be 0 or 1".into()));
        }
        let human = request.human_player;
        let engine_player = 1 - human;
        let invalid = |e: lowrand::Error| PlayError::InvalidConfig(e.to_string());
        let strategy = match &request.engine {
            EngineConfig::Predictor { context_length, threshold, min_support } => {
                let cfg = PredictorConfig { context_length: *context_length, threshold: *threshold, min_support: *min_support };
                predictor_strategy(&game, engine_player, cfg).map_err(invalid)?
            }
            EngineConfig::SeedLearner { .. } => {
                return Err(PlayError::InvalidConfig(
                    "the seed learner needs a seeded opponent program and human play is not seeded; use the predictor engine".into(),
                ))
            }
            EngineConfig::Myopic { belief } => {
                let belief = strategy_from_value(&game, belief).map_err(invalid)?;
                if belief.owner() != human {
                    return Err(PlayError::InvalidConfig("the belief must be a strategy of the human player".into()));
                }
                best_response_exploiter(&game, &belief).map_err(invalid)?
            }
        };
        let state = strategy.initial_state();
        let mut session = Session {
            id,
            seed,
            engine_player,
            state,
            strategy,
            rng: playout_rng(seed, 0),
            committed: None,
            transcript: Vec::new(),
            scores: vec![Rational::from_ratio(0, 1); 2],
            window: VecDeque::with_capacity(ENTROPY_WINDOW),
            game,
            request,
        };
        session.commit()?;
        Ok(session)
    }

    fn commit(&mut self) -> Result<(), PlayError> {
        let t = self.transcript.len();
        self.committed = if t < self.request.n {
            let dist = self.strategy.distribution(&self.state, t).map_err(|e| PlayError::InvalidConfig(e.to_string()))?;
            Some(sample(&dist, self.rng.gen::<f64>()))
        } else {
            None
        };
        Ok(())
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn request(&self) -> &CreateRequest {
        &self.request
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn human_player(&self) -> usize {
        1 - self.engine_player
    }

    pub fn stage(&self) -> usize {
        self.transcript.len()
    }

    pub fn is_complete(&self) -> bool {
        self.transcript.len() >= self.request.n
    }

    pub fn transcript(&self) -> &[StageRecord] {
        &self.transcript
    }

    pub fn scores(&self) -> &[Rational] {
        &self.scores
    }

    /// Resolves a move to an action index of the human player.
    pub fn parse_action(&self, action: &HumanAction) -> Result<usize, PlayError> {
        let human = self.human_player();
        match action {
            HumanAction::Index(a) if *a < self.game.num_actions(human) => Ok(*a),
            HumanAction::Index(a) => Err(PlayError::InvalidAction(format!("no action {a}"))),
            HumanAction::Label(l) => self
                .game
                .action_index(human, l)
                .ok_or_else(|| PlayError::InvalidAction(format!("{l:?} is not one of {:?}", self.game.labels(human)))),
        }
    }

    /// The engine action already drawn for the open stage.
    pub fn committed_action(&self) -> Result<usize, PlayError> {
        self.committed.ok_or(PlayError::SessionComplete)
    }

    /// Closes the open stage with the human's action.
    pub fn play(&mut self, human_action: usize) -> Result<StageResult, PlayError> {
        let engine_action = self.committed_action()?;
        let human = self.human_player();
        let mut profile = vec![0; 2];
        profile[human] = human_action;
        profile[self.engine_player] = engine_action;
        let t = self.transcript.len();
        let payoffs = self.game.payoff_vector(&profile).to_vec();
        for (s, p) in self.scores.iter_mut().zip(&payoffs) {
            *s = s.clone() + p.clone();
        }
        if self.window.len() == ENTROPY_WINDOW {
            self.window.pop_front();
        }
        self.window.push_back(human_action);
        self.state = self.strategy.advance(&self.state, t, &profile);
        self.transcript.push(StageRecord { human: human_action, engine: engine_action, payoffs: payoffs.clone() });
        self.commit()?;
        Ok(StageResult {
            stage: t,
            human: self.game.labels(human)[human_action].clone(),
            engine: self.game.labels(self.engine_player)[engine_action].clone(),
            payoffs: fmt(&payoffs),
            scores: fmt(&self.scores),
            diagnostics: self.diagnostics(),
            remaining: self.request.n - self.transcript.len(),
            complete: self.is_complete(),
        })
    }

    fn human_counts(&self, moves: impl Iterator<Item = usize>) -> Vec<u64> {
        let mut counts = vec![0u64; self.game.num_actions(self.human_player())];
        for a in moves {
            counts[a] += 1;
        }
        counts
    }

    pub fn diagnostics(&self) -> Diagnostics {
        let counts = self.human_counts(self.window.iter().copied());
        Diagnostics {
            engine_confidence: if self.is_complete() { None } else { self.strategy.diagnostic(&self.state, self.stage()) },
            human_entropy: empirical_entropy(&counts),
            window: self.window.len(),
            human_counts: counts,
        }
    }

    pub fn view(&self) -> SessionView {
        let human = self.human_player();
        let transcript = self
            .transcript
            .iter()
            .enumerate()
            .map(|(t, r)| StageView {
                stage: t,
                human: self.game.labels(human)[r.human].clone(),
                engine: self.game.labels(self.engine_player)[r.engine].clone(),
                payoffs: fmt(&r.payoffs),
            })
            .collect();
        let diagnostics = self.diagnostics();
        let report = self.is_complete().then(|| FinalReport {
            human_entropy: diagnostics.human_entropy,
            human_entropy_overall: empirical_entropy(&self.human_counts(self.transcript.iter().map(|r| r.human))),
            average_payoffs: self.scores.iter().map(|s| s.to_f64_lossy() / self.request.n as f64).collect(),
        });
        SessionView {
            id: self.id.clone(),
            game: self.request.game.clone(),
            n: self.request.n,
            human_player: human,
            engine: self.request.engine.clone(),
            transcript,
            scores: fmt(&self.scores),
            diagnostics,
            remaining: self.request.n - self.transcript.len(),
            complete: self.is_complete(),
            report,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn request(n: usize) -> CreateRequest {
        CreateRequest { game: "matching-pennies".into(), n, engine: EngineConfig::default(), human_player: 0, seed: None }
    }

    #[test]
    fn scores_are_stage_payoff_sums() {
        let mut s = Session::new("x".into(), request(6), 1).unwrap();
        for a in [0, 1, 1, 0, 0, 0] {
            s.play(a).unwrap();
        }
        let mut sum = [Rational::from_ratio(0, 1), Rational::from_ratio(0, 1)];
        for r in s.transcript() {
            for i in 0..2 {
                sum[i] = sum[i].clone() + r.payoffs[i].clone();
            }
        }
        assert_eq!(s.scores(), &sum);
        assert_eq!(s.play(0).unwrap_err(), PlayError::SessionComplete);
    }

    #[test]
    fn window_keeps_last_sixteen() {
        let mut s = Session::new("x".into(), request(40), 2).unwrap();
        for _ in 0..20 {
            s.play(0).unwrap();
        }
        for _ in 0..8 {
            s.play(1).unwrap();
        }
        let d = s.diagnostics();
        assert_eq!(d.window, ENTROPY_WINDOW);
        assert_eq!(d.human_counts, vec![8, 8]);
        assert_eq!(d.human_entropy, 1.0);
    }

    #[test]
    fn labels_and_indices() {
        let s = Session::new("x".into(), request(3), 0).unwrap();
        assert_eq!(s.parse_action(&HumanAction::Label("T".into())), Ok(1));
        assert_eq!(s.parse_action(&HumanAction::Index(0)), Ok(0));
        assert!(matches!(s.parse_action(&HumanAction::Label("X".into())), Err(PlayError::InvalidAction(_))));
        assert!(matches!(s.parse_action(&HumanAction::Index(2)), Err(PlayError::InvalidAction(_))));
    }

    #[test]
    fn config_rules() {
        let mut r = request(3);
        r.engine = EngineConfig::SeedLearner { threshold: None };
        let e = Session::new("x".into(), r, 0).err().unwrap();
        assert!(e.to_string().contains("predictor"));
        assert!(matches!(Session::new("x".into(), request(501), 0), Err(PlayError::InvalidConfig(_))));
        let mut r = request(3);
        r.game = "chess".into();
        assert_eq!(Session::new("x".into(), r, 0).err(), Some(PlayError::UnknownGame("chess".into())));
    }
}
