use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::strategy::{check_profile, BehavioralStrategy, StrategyState};
use crate::entropy::shannon_entropy;
use crate::error::{Error, Result};
use crate::game::{MixedStrategy, Profile, StageGame};
use crate::scalar::Scalar;

/// Cap on distinct nodes visited by one exact recursion.
pub const NODE_GUARD: usize = 10_000_000;

/// Expected average payoff per player over the n stages.
#[derive(Clone, Debug, PartialEq)]
pub struct RepeatedPayoff<T>(pub Vec<T>);

impl<T: Scalar> RepeatedPayoff<T> {
    pub fn values(&self) -> &[T] {
        &self.0
    }

    pub fn get(&self, player: usize) -> &T {
        &self.0[player]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonteCarloPayoff {
    pub mean: Vec<f64>,
    pub std_error: Vec<f64>,
    pub plays: usize,
}

pub(crate) struct Guard {
    nodes: usize,
    limit: usize,
}

impl Guard {
    pub(crate) fn new() -> Self {
        Guard { nodes: 0, limit: NODE_GUARD }
    }

    pub(crate) fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.limit {
            return Err(Error::Resource(format!(
                "history tree exceeds {} nodes; use monte_carlo_payoff for this horizon",
                self.limit
            )));
        }
        Ok(())
    }
}

/// Joint profiles with their probability under independent mixing.
/// With `prune`, zero-probability profiles are dropped.
pub(crate) fn joint_outcomes<T: Scalar>(dists: &[MixedStrategy<T>], prune: bool) -> Vec<(Profile, T)> {
    let mut out: Vec<(Profile, T)> = vec![(Vec::with_capacity(dists.len()), T::one())];
    for d in dists {
        let mut next = Vec::with_capacity(out.len() * d.len());
        for (p, w) in &out {
            for (a, q) in d.probs().iter().enumerate() {
                if prune && q.is_negligible() {
                    continue;
                }
                let mut p2 = p.clone();
                p2.push(a);
                next.push((p2, w.clone() * q.clone()));
            }
        }
        out = next;
    }
    out
}

pub(crate) fn distributions<T: Scalar>(
    profile: &[BehavioralStrategy<T>],
    states: &[StrategyState],
    stage: usize,
) -> Result<Vec<MixedStrategy<T>>> {
    profile.iter().zip(states).map(|(s, st)| s.distribution(st, stage)).collect()
}

pub(crate) fn advance_all<T: Scalar>(
    profile: &[BehavioralStrategy<T>],
    states: &[StrategyState],
    stage: usize,
    joint: &[usize],
) -> Vec<StrategyState> {
    profile.iter().zip(states).map(|(s, st)| s.advance(st, stage, joint)).collect()
}

fn check_horizon(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("horizon must be positive"));
    }
    Ok(())
}

/// Exact expected average payoff of a profile over the full history tree.
pub fn exact_payoff<T: Scalar>(game: &StageGame<T>, n: usize, profile: &[BehavioralStrategy<T>]) -> Result<RepeatedPayoff<T>> {
    exact_payoff_with_limit(game, n, profile, NODE_GUARD)
}

/// [`exact_payoff`] with a custom node guard.
pub fn exact_payoff_with_limit<T: Scalar>(
    game: &StageGame<T>,
    n: usize,
    profile: &[BehavioralStrategy<T>],
    limit: usize,
) -> Result<RepeatedPayoff<T>> {
    check_horizon(n)?;
    check_profile(game, profile)?;
    let mut memo = HashMap::new();
    let mut guard = Guard { nodes: 0, limit };
    let states: Vec<StrategyState> = profile.iter().map(|s| s.initial_state()).collect();
    let total = payoff_rec(game, n, profile, 0, states, &mut memo, &mut guard)?;
    let nn = T::from_count(n);
    Ok(RepeatedPayoff(total.into_iter().map(|x| x / nn.clone()).collect()))
}

type PayoffMemo<T> = HashMap<(usize, Vec<StrategyState>), Vec<T>>;

fn payoff_rec<T: Scalar>(
    game: &StageGame<T>,
    n: usize,
    profile: &[BehavioralStrategy<T>],
    t: usize,
    states: Vec<StrategyState>,
    memo: &mut PayoffMemo<T>,
    guard: &mut Guard,
) -> Result<Vec<T>> {
    let k = game.num_players();
    if t == n {
        return Ok(vec![T::zero(); k]);
    }
    let key = (t, states);
    if let Some(v) = memo.get(&key) {
        return Ok(v.clone());
    }
    guard.tick()?;
    let states = &key.1;
    let dists = distributions(profile, states, t)?;
    let mut acc = vec![T::zero(); k];
    for (joint, w) in joint_outcomes(&dists, true) {
        let next = advance_all(profile, states, t, &joint);
        let cont = payoff_rec(game, n, profile, t + 1, next, memo, guard)?;
        for ((a, u), c) in acc.iter_mut().zip(game.payoff_vector(&joint)).zip(cont) {
            *a = a.clone() + w.clone() * (u.clone() + c);
        }
    }
    memo.insert(key.clone(), acc.clone());
    Ok(acc)
}

/// Samples one action; `u` is uniform in `[0, 1)`.
pub fn sample<T: Scalar>(dist: &MixedStrategy<T>, u: f64) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (a, p) in dist.probs().iter().enumerate() {
        let p = p.to_f64_lossy();
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = a;
        if u < acc {
            return a;
        }
    }
    last
}

/// Plays the profile once on the given random stream and returns the play path.
pub fn sample_path<T: Scalar>(
    game: &StageGame<T>,
    n: usize,
    profile: &[BehavioralStrategy<T>],
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Profile>> {
    let mut states: Vec<StrategyState> = profile.iter().map(|s| s.initial_state()).collect();
    let mut path = Vec::with_capacity(n);
    for t in 0..n {
        let dists = distributions(profile, &states, t)?;
        let joint: Profile = dists.iter().map(|d| sample(d, rng.gen::<f64>())).collect();
        debug_assert!(game.is_valid_profile(&joint));
        states = advance_all(profile, &states, t, &joint);
        path.push(joint);
    }
    Ok(path)
}

/// Random stream for playout `index` under `rng_seed`.
pub fn playout_rng(rng_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    rng.set_stream(index);
    rng
}

/// Mean average payoff over independent playouts, with standard errors.
pub fn monte_carlo_payoff<T: Scalar>(
    game: &StageGame<T>,
    n: usize,
    profile: &[BehavioralStrategy<T>],
    plays: usize,
    rng_seed: u64,
) -> Result<MonteCarloPayoff> {
    check_horizon(n)?;
    check_profile(game, profile)?;
    if plays == 0 {
        return Err(Error::invalid("at least one playout required"));
    }
    let k = game.num_players();
    let mut sum = vec![0.0; k];
    let mut sum_sq = vec![0.0; k];
    for i in 0..plays {
        let mut rng = playout_rng(rng_seed, i as u64);
        let path = sample_path(game, n, profile, &mut rng)?;
        for p in 0..k {
            let avg = path.iter().map(|a| game.payoff(a, p).to_f64_lossy()).sum::<f64>() / n as f64;
            sum[p] += avg;
            sum_sq[p] += avg * avg;
        }
    }
    let m = plays as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / m).collect();
    let std_error = (0..k)
        .map(|p| {
            if plays < 2 {
                return 0.0;
            }
            let var = ((sum_sq[p] - m * mean[p] * mean[p]) / (m - 1.0)).max(0.0);
            (var / m).sqrt()
        })
        .collect();
    Ok(MonteCarloPayoff { mean, std_error, plays })
}

/// Worst-case entropy: the maximum over terminal histories of the summed stage
/// entropies, every child history counted whether or not it can occur.
pub fn strategy_entropy<T: Scalar>(game: &StageGame<T>, n: usize, strategy: &BehavioralStrategy<T>) -> Result<f64> {
    check_horizon(n)?;
    strategy.validate(game)?;
    subgame_entropy(game, n, strategy, 0, strategy.initial_state(), &mut HashMap::new(), &mut Guard::new())
}

pub(crate) fn subgame_entropy<T: Scalar>(
    game: &StageGame<T>,
    n: usize,
    strategy: &BehavioralStrategy<T>,
    t: usize,
    state: StrategyState,
    memo: &mut HashMap<(usize, StrategyState), f64>,
    guard: &mut Guard,
) -> Result<f64> {
    if t == n {
        return Ok(0.0);
    }
    let key = (t, state);
    if let Some(v) = memo.get(&key) {
        return Ok(*v);
    }
    guard.tick()?;
    let here = shannon_entropy(&strategy.distribution(&key.1, t)?);
    let mut children: Vec<StrategyState> = game.profiles().map(|p| strategy.advance(&key.1, t, &p)).collect();
    children.sort();
    children.dedup();
    let mut best = 0.0f64;
    for c in children {
        best = best.max(subgame_entropy(game, n, strategy, t + 1, c, memo, guard)?);
    }
    memo.insert(key, here + best);
    Ok(here + best)
}

/// Entropy along histories that occur with positive probability under `profile`.
pub fn effective_entropy<T: Scalar>(
    game: &StageGame<T>,
    n: usize,
    profile: &[BehavioralStrategy<T>],
    player: usize,
) -> Result<f64> {
    check_horizon(n)?;
    check_profile(game, profile)?;
    let states = profile.iter().map(|s| s.initial_state()).collect();
    effective_rec(n, profile, player, 0, states, &mut HashMap::new(), &mut Guard::new())
}

fn effective_rec<T: Scalar>(
    n: usize,
    profile: &[BehavioralStrategy<T>],
    player: usize,
    t: usize,
    states: Vec<StrategyState>,
    memo: &mut HashMap<(usize, Vec<StrategyState>), f64>,
    guard: &mut Guard,
) -> Result<f64> {
    if t == n {
        return Ok(0.0);
    }
    let key = (t, states);
    if let Some(v) = memo.get(&key) {
        return Ok(*v);
    }
    guard.tick()?;
    let dists = distributions(profile, &key.1, t)?;
    let here = shannon_entropy(&dists[player]);
    let mut best = 0.0f64;
    for (joint, _) in joint_outcomes(&dists, true) {
        let next = advance_all(profile, &key.1, t, &joint);
        best = best.max(effective_rec(n, profile, player, t + 1, next, memo, guard)?);
    }
    memo.insert(key, here + best);
    Ok(here + best)
}

/// The explicit table of `strategy` over every non-terminal history.
pub fn to_table<T: Scalar>(game: &StageGame<T>, n: usize, strategy: &BehavioralStrategy<T>) -> Result<BehavioralStrategy<T>> {
    check_horizon(n)?;
    let mut entries = BTreeMap::new();
    let mut guard = Guard::new();
    let mut frontier: Vec<(Vec<Profile>, StrategyState)> = vec![(Vec::new(), strategy.initial_state())];
    for t in 0..n {
        let mut next = Vec::new();
        for (h, st) in frontier {
            guard.tick()?;
            entries.insert(h.clone(), strategy.distribution(&st, t)?);
            if t + 1 < n {
                for p in game.profiles() {
                    let mut h2 = h.clone();
                    h2.push(p.clone());
                    next.push((h2, strategy.advance(&st, t, &p)));
                }
            }
        }
        frontier = next;
    }
    Ok(BehavioralStrategy::table(strategy.owner(), entries, None))
}
