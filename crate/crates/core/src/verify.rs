//! Certification of equilibrium claims by exact best response.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::engine::{
    advance_all, check_profile, distributions, effective_entropy, exact_payoff, joint_outcomes, strategy_entropy,
    subgame_entropy, BehavioralStrategy, Guard, StrategyState,
};
use crate::entropy::shannon_entropy;
use crate::error::{Error, Result};
use crate::game::{best_pure_deviation, matching_pennies, MixedStrategy, Profile, StageGame};
use crate::scalar::Scalar;
use crate::solver::{enumerate_bimatrix_nash, min_entropy_nash, minmax_profile};

/// Float-mode tolerance for calling an exploitability zero.
pub const FLOAT_NE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct BestResponse<T> {
    /// Optimal expected average payoff against the others' strategies.
    pub value: T,
    /// A pure optimal deviation, tabulated over the histories it reaches.
    pub strategy: BehavioralStrategy<T>,
}

struct Responder<'a, T> {
    game: &'a StageGame<T>,
    n: usize,
    profile: &'a [BehavioralStrategy<T>],
    player: usize,
    memo: HashMap<(usize, Vec<StrategyState>), T>,
    guard: Guard,
}

impl<T: Scalar> Responder<'_, T> {
    /// Drops the deviator's own state so the memo key depends on the others only.
    fn key_states(&self, states: &[StrategyState]) -> Vec<StrategyState> {
        let mut s = states.to_vec();
        s[self.player] = StrategyState::Stateless;
        s
    }

    /// Expected total payoff from stage `t` of each own action, followed by optimal play.
    fn action_values(&mut self, t: usize, states: &[StrategyState]) -> Result<Vec<T>> {
        let mut dists = distributions(self.profile, states, t)?;
        let m = self.game.num_actions(self.player);
        let mut out = Vec::with_capacity(m);
        for a in 0..m {
            dists[self.player] = MixedStrategy::pure(self.player, m, a);
            let mut acc = T::zero();
            for (joint, w) in joint_outcomes(&dists, true) {
                let next = advance_all(self.profile, states, t, &joint);
                let cont = self.value(t + 1, &next)?;
                acc = acc + w * (self.game.payoff(&joint, self.player).clone() + cont);
            }
            out.push(acc);
        }
        Ok(out)
    }

    fn value(&mut self, t: usize, states: &[StrategyState]) -> Result<T> {
        if t == self.n {
            return Ok(T::zero());
        }
        let key = (t, self.key_states(states));
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        self.guard.tick()?;
        let q = self.action_values(t, states)?;
        let best = q[argmax(&q)].clone();
        self.memo.insert(key, best.clone());
        Ok(best)
    }
}

/// First index of the maximum, with ties under the backend's tolerance going to the lower index.
fn argmax<T: Scalar>(xs: &[T]) -> usize {
    let mut best = 0;
    for i in 1..xs.len() {
        if xs[i] > xs[best] && !xs[i].approx_eq(&xs[best]) {
            best = i;
        }
    }
    best
}

/// Exact best response of `player` to the other strategies of `profile` by backward induction.
pub fn best_response_value<T: Scalar>(
    game: &StageGame<T>,
    n: usize,
    profile: &[BehavioralStrategy<T>],
    player: usize,
) -> Result<BestResponse<T>> {
    if n == 0 {
        return Err(Error::invalid("horizon must be positive"));
    }
    check_profile(game, profile)?;
    let mut r = Responder { game, n, profile, player, memo: HashMap::new(), guard: Guard::new() };
    let init: Vec<StrategyState> = profile.iter().map(|s| s.initial_state()).collect();
    let total = r.value(0, &init)?;

    // tabulate the argmax deviation over the histories it reaches
    let m = game.num_actions(player);
    let mut entries = BTreeMap::new();
    let mut frontier: Vec<(Vec<Profile>, Vec<StrategyState>)> = vec![(Vec::new(), init)];
    let mut table_guard = Guard::new();
    for t in 0..n {
        let mut next = Vec::new();
        for (h, states) in frontier {
            table_guard.tick()?;
            let q = r.action_values(t, &states)?;
            let a = argmax(&q);
            entries.insert(h.clone(), MixedStrategy::pure(player, m, a));
            if t + 1 == n {
                continue;
            }
            let mut dists = distributions(profile, &states, t)?;
            dists[player] = MixedStrategy::pure(player, m, a);
            for (joint, _) in joint_outcomes(&dists, true) {
                let mut h2 = h.clone();
                h2.push(joint.clone());
                next.push((h2, advance_all(profile, &states, t, &joint)));
            }
        }
        frontier = next;
    }
    let strategy = BehavioralStrategy::table(player, entries, Some(MixedStrategy::pure(player, m, 0)));
    Ok(BestResponse { value: total / T::from_count(n), strategy })
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict<T> {
    ExactNe,
    /// Every exploitability is within the requested `eps`.
    EpsNe { eps: T },
    /// `player` gains `gain` with the report's witness deviation.
    NotNe { player: usize, gain: T },
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquilibriumReport<T> {
    pub payoff: Vec<T>,
    pub exploitability: Vec<T>,
    pub entropy: Vec<f64>,
    pub effective_entropy: Vec<f64>,
    pub verdict: Verdict<T>,
    /// Optimal deviations, one per player.
    pub best_responses: Vec<BehavioralStrategy<T>>,
    /// True when produced by exact arithmetic.
    pub exact: bool,
}

impl<T: Scalar> EquilibriumReport<T> {
    pub fn max_exploitability(&self) -> T {
        self.exploitability.iter().fold(T::zero(), |a, x| if *x > a { x.clone() } else { a })
    }

    /// The deviation behind a not-NE verdict.
    pub fn witness(&self) -> Option<&BehavioralStrategy<T>> {
        match &self.verdict {
            Verdict::NotNe { player, .. } => Some(&self.best_responses[*player]),
            _ => None,
        }
    }
}

fn is_zero<T: Scalar>(x: &T) -> bool {
    if T::EXACT {
        x.is_zero()
    } else {
        x.to_f64_lossy().abs() <= FLOAT_NE_TOL
    }
}

/// Exploitability, entropies and an equilibrium verdict for `profile`.
/// `eps` is the tolerance for an approximate verdict.
pub fn certify<T: Scalar>(
    game: &StageGame<T>,
    n: usize,
    profile: &[BehavioralStrategy<T>],
    eps: Option<&T>,
) -> Result<EquilibriumReport<T>> {
    let payoff = exact_payoff(game, n, profile)?.0;
    let k = game.num_players();
    let mut exploitability = Vec::with_capacity(k);
    let mut best_responses = Vec::with_capacity(k);
    for i in 0..k {
        let br = best_response_value(game, n, profile, i)?;
        let gain = br.value - payoff[i].clone();
        exploitability.push(if gain.is_negative() && is_zero(&gain) { T::zero() } else { gain });
        best_responses.push(br.strategy);
    }
    let entropy = profile.iter().map(|s| strategy_entropy(game, n, s)).collect::<Result<Vec<_>>>()?;
    let effective = (0..k).map(|i| effective_entropy(game, n, profile, i)).collect::<Result<Vec<_>>>()?;
    let worst = argmax(&exploitability);
    let max = exploitability[worst].clone();
    let verdict = if is_zero(&max) {
        Verdict::ExactNe
    } else {
        match eps {
            Some(e) if max <= *e || max.approx_eq(e) => Verdict::EpsNe { eps: e.clone() },
            _ => Verdict::NotNe { player: worst, gain: max },
        }
    };
    Ok(EquilibriumReport {
        payoff,
        exploitability,
        entropy,
        effective_entropy: effective,
        verdict,
        best_responses,
        exact: T::EXACT,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct StageViolation<T> {
    pub history: Vec<Profile>,
    pub player: usize,
    pub action: String,
    pub gain: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OnPathReport<T> {
    /// Whether every stage equilibrium pays the minmax profile; when false the
    /// check still runs but carries no guarantee.
    pub hypothesis_met: bool,
    /// Distinct on-path situations examined.
    pub checked: usize,
    pub violations: Vec<StageViolation<T>>,
    /// Float mode only: on-path histories of probability below 1e-9.
    pub near_zero: Vec<Vec<Profile>>,
}

fn all_equilibria_pay_minmax<T: Scalar>(game: &StageGame<T>) -> bool {
    if game.num_players() != 2 {
        return false;
    }
    let (Ok(mm), Ok(eqs)) = (minmax_profile(game), enumerate_bimatrix_nash(game)) else {
        return false;
    };
    eqs.equilibria.iter().all(|e| e.payoff.0.iter().zip(&mm.0).all(|(a, b)| a.approx_eq(b)))
}

/// Stage best-response check of the profile at every positive-probability history.
pub fn onpath_stage_check<T: Scalar>(
    game: &StageGame<T>,
    n: usize,
    profile: &[BehavioralStrategy<T>],
) -> Result<OnPathReport<T>> {
    check_profile(game, profile)?;
    let hypothesis_met = all_equilibria_pay_minmax(game);
    let mut seen: HashSet<(usize, Vec<StrategyState>)> = HashSet::new();
    let mut violations = Vec::new();
    let mut near_zero = Vec::new();
    let mut guard = Guard::new();
    let init: Vec<StrategyState> = profile.iter().map(|s| s.initial_state()).collect();
    let mut frontier: Vec<(Vec<Profile>, Vec<StrategyState>, T)> = vec![(Vec::new(), init, T::one())];
    for t in 0..n {
        let mut next = Vec::new();
        for (h, states, w) in frontier {
            if !seen.insert((t, states.clone())) {
                continue;
            }
            guard.tick()?;
            if !T::EXACT && w.to_f64_lossy() < 1e-9 {
                near_zero.push(h.clone());
            }
            let dists = distributions(profile, &states, t)?;
            for i in 0..game.num_players() {
                let (a, gain) = best_pure_deviation(game, &dists, i)?;
                if gain.lp_positive() {
                    violations.push(StageViolation { history: h.clone(), player: i, action: game.labels(i)[a].clone(), gain });
                }
            }
            for (joint, q) in joint_outcomes(&dists, true) {
                let mut h2 = h.clone();
                h2.push(joint.clone());
                next.push((h2, advance_all(profile, &states, t, &joint), w.clone() * q));
            }
        }
        frontier = next;
    }
    Ok(OnPathReport { hypothesis_met, checked: seen.len(), violations, near_zero })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlayerEntropyBound {
    pub player: usize,
    pub entropy: f64,
    /// Minimal entropy of the player's stage equilibrium strategies.
    pub beta: f64,
    /// `n * beta`.
    pub bound: f64,
    pub satisfied: bool,
}

/// Matching-pennies exploitation floor of one player's strategy.
#[derive(Clone, Debug, PartialEq)]
pub struct MpFloor {
    /// The player whose strategy is exploited.
    pub exploited: usize,
    /// `1 - H / n`.
    pub floor: f64,
    /// The opponent's best-response average payoff.
    pub best_response: f64,
    pub satisfied: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyBoundReport {
    pub players: Vec<PlayerEntropyBound>,
    pub mp_floors: Vec<MpFloor>,
}

/// True when the payoff tensor is that of matching pennies.
pub fn is_matching_pennies<T: Scalar>(game: &StageGame<T>) -> bool {
    let mp = matching_pennies::<T>();
    game.num_players() == 2
        && game.action_counts() == mp.action_counts()
        && mp.profiles().all(|p| game.payoff_vector(&p) == mp.payoff_vector(&p))
}

/// Measured entropies against `n * beta_i`, and for matching pennies the
/// exploitation floor `1 - H(sigma)/n` against the exact best response.
pub fn entropy_bound_check<T: Scalar>(
    game: &StageGame<T>,
    n: usize,
    profile: &[BehavioralStrategy<T>],
) -> Result<EntropyBoundReport> {
    check_profile(game, profile)?;
    let mut players = Vec::new();
    let mut entropies = Vec::new();
    for (i, s) in profile.iter().enumerate() {
        let h = strategy_entropy(game, n, s)?;
        entropies.push(h);
        if game.num_players() == 2 {
            let beta = min_entropy_nash(game, i)?;
            let bound = n as f64 * beta;
            players.push(PlayerEntropyBound { player: i, entropy: h, beta, bound, satisfied: h >= bound - 1e-9 });
        }
    }
    let mut mp_floors = Vec::new();
    if is_matching_pennies(game) {
        for j in 0..2 {
            let floor = 1.0 - entropies[j] / n as f64;
            let br = best_response_value(game, n, profile, 1 - j)?.value.to_f64_lossy();
            mp_floors.push(MpFloor { exploited: j, floor, best_response: br, satisfied: br >= floor - 1e-9 });
        }
    }
    Ok(EntropyBoundReport { players, mp_floors })
}

/// Smallest number, over terminal histories, of stages where the strategy's
/// entropy is at most `threshold`.
pub fn min_low_entropy_stages<T: Scalar>(
    game: &StageGame<T>,
    n: usize,
    strategy: &BehavioralStrategy<T>,
    threshold: f64,
) -> Result<usize> {
    fn rec<T: Scalar>(
        game: &StageGame<T>,
        n: usize,
        s: &BehavioralStrategy<T>,
        threshold: f64,
        t: usize,
        state: StrategyState,
        memo: &mut HashMap<(usize, StrategyState), usize>,
        guard: &mut Guard,
    ) -> Result<usize> {
        if t == n {
            return Ok(0);
        }
        let key = (t, state);
        if let Some(v) = memo.get(&key) {
            return Ok(*v);
        }
        guard.tick()?;
        let here = (shannon_entropy(&s.distribution(&key.1, t)?) <= threshold + 1e-12) as usize;
        let mut children: Vec<StrategyState> = game.profiles().map(|p| s.advance(&key.1, t, &p)).collect();
        children.sort();
        children.dedup();
        let mut best = usize::MAX;
        for c in children {
            best = best.min(rec(game, n, s, threshold, t + 1, c, memo, guard)?);
        }
        memo.insert(key, here + best);
        Ok(here + best)
    }
    strategy.validate(game)?;
    rec(game, n, strategy, threshold, 0, strategy.initial_state(), &mut HashMap::new(), &mut Guard::new())
}

/// Expected per-stage change of the potential (accumulated payoff minus the
/// column strategy's remaining worst-case entropy) when the row player plays
/// the column's most likely action.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialStep {
    pub stage: usize,
    /// Expected stage payoff of the row player.
    pub payoff: f64,
    /// Expected drop of the remaining entropy over the stage.
    pub entropy_drop: f64,
    /// `payoff + entropy_drop`.
    pub increment: f64,
    /// `E[2p - 1] + E[H(sigma(h))]` with `p` the column's top probability.
    pub lower_bound: f64,
}

pub fn mp_potential_trace<T: Scalar>(
    game: &StageGame<T>,
    n: usize,
    column: &BehavioralStrategy<T>,
) -> Result<Vec<PotentialStep>> {
    if !is_matching_pennies(game) {
        return Err(Error::domain("the potential trace is defined for matching pennies"));
    }
    if column.owner() != 1 {
        return Err(Error::invalid("the traced strategy must be the column player's"));
    }
    column.validate(game)?;
    let mut memo = HashMap::new();
    let mut guard = Guard::new();
    let mut layer: BTreeMap<StrategyState, f64> = BTreeMap::new();
    layer.insert(column.initial_state(), 1.0);
    let mut steps = Vec::with_capacity(n);
    for t in 0..n {
        let mut next: BTreeMap<StrategyState, f64> = BTreeMap::new();
        let (mut payoff, mut before, mut lower) = (0.0, 0.0, 0.0);
        for (state, w) in &layer {
            let dist = column.distribution(state, t)?;
            let row = dist.mode();
            let p = dist.prob(row).to_f64_lossy();
            let h = shannon_entropy(&dist);
            before += w * subgame_entropy(game, n, column, t, state.clone(), &mut memo, &mut guard)?;
            lower += w * (2.0 * p - 1.0 + h);
            for (c, q) in dist.probs().iter().enumerate() {
                let q = q.to_f64_lossy();
                if q <= 0.0 {
                    continue;
                }
                let joint = [row, c];
                payoff += w * q * game.payoff(&joint, 0).to_f64_lossy();
                *next.entry(column.advance(state, t, &joint)).or_insert(0.0) += w * q;
            }
        }
        let mut after = 0.0;
        for (state, w) in &next {
            after += w * subgame_entropy(game, n, column, t + 1, state.clone(), &mut memo, &mut guard)?;
        }
        let drop = before - after;
        steps.push(PotentialStep { stage: t, payoff, entropy_drop: drop, increment: payoff + drop, lower_bound: lower });
        layer = next;
    }
    Ok(steps)
}
