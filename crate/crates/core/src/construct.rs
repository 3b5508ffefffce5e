//! Equilibrium profiles of the n-stage game.

use std::sync::Arc;

use num_traits::ToPrimitive;

use crate::engine::{BehavioralStrategy, TriggerPlan};
use crate::error::{Error, Result};
use crate::game::{best_pure_deviation, expected_payoff, MixedStrategy, PayoffProfile, Profile, StageGame};
use crate::scalar::{convert, Rational, Scalar};
use crate::solver::{check_feasible_ir_with, enumerate_bimatrix_nash, min_entropy_minmax, minmax_solution, FeasibilityVerdict};

/// Rejects `profile` unless no player gains by a pure deviation.
pub fn check_stage_equilibrium<T: Scalar>(game: &StageGame<T>, profile: &[MixedStrategy<T>]) -> Result<()> {
    for i in 0..game.num_players() {
        let (a, gain) = best_pure_deviation(game, profile, i)?;
        if gain.lp_positive() {
            return Err(Error::NotEquilibrium {
                player: i,
                action: game.labels(i)[a].clone(),
                gain: gain.format_scalar(),
            });
        }
    }
    Ok(())
}

/// Plays the stage equilibrium `stage_profile` at every history.
pub fn stagewise_equilibrium<T: Scalar>(
    game: &StageGame<T>,
    n: usize,
    stage_profile: &[MixedStrategy<T>],
) -> Result<Vec<BehavioralStrategy<T>>> {
    if n == 0 {
        return Err(Error::invalid("horizon must be positive"));
    }
    check_stage_equilibrium(game, stage_profile)?;
    Ok(stage_profile
        .iter()
        .enumerate()
        .map(|(i, s)| BehavioralStrategy::stationary(i, s.clone()))
        .collect())
}

/// The two phases of a folk-theorem profile.
#[derive(Clone, Debug, PartialEq)]
pub struct FolkPlan<T> {
    /// Pure profiles played in the first phase, `repetitions * denominator` stages.
    pub schedule: Vec<Profile>,
    pub repetitions: usize,
    pub denominator: usize,
    /// Length of the equilibrium tail.
    pub tail_length: usize,
    /// Smallest tail length meeting the averaged deviation inequality.
    pub tail_min: usize,
    /// One stage equilibrium per player, cycled over the tail.
    pub tail_equilibria: Vec<Vec<MixedStrategy<T>>>,
    /// `punishments[j]`: the profile held against a deviating player `j`.
    pub punishments: Vec<Vec<MixedStrategy<T>>>,
    pub minmax: Vec<T>,
    pub payoff_target: PayoffProfile<T>,
}

/// Inputs to [`folk_equilibrium`] that default to solver output for two players.
#[derive(Clone, Debug)]
pub struct FolkOptions<T> {
    /// Per player, a stage equilibrium paying that player strictly above its minmax.
    pub equilibria: Option<Vec<Vec<MixedStrategy<T>>>>,
    /// Per player, the profile punishing that player.
    pub punishments: Option<Vec<Vec<MixedStrategy<T>>>>,
}

impl<T> Default for FolkOptions<T> {
    fn default() -> Self {
        FolkOptions { equilibria: None, punishments: None }
    }
}

fn ceil_div(num: &Rational, den: &Rational) -> Result<usize> {
    let q = num.clone() / den.clone();
    q.ceil().to_integer().to_usize().ok_or_else(|| Error::Internal("tail length overflow".into()))
}

/// Low-entropy equilibrium paying `target` in the first phase: scheduled pure play,
/// stage equilibria in a short tail, and permanent punishment of any first-phase deviator.
pub fn folk_equilibrium<T: Scalar>(
    game: &StageGame<T>,
    n: usize,
    target: &PayoffProfile<T>,
    options: FolkOptions<T>,
) -> Result<(Vec<BehavioralStrategy<T>>, FolkPlan<T>)> {
    let k = game.num_players();
    let exact = game.convert::<Rational>();

    let punishments = match options.punishments {
        Some(p) => p,
        None => {
            if k != 2 {
                return Err(Error::Unsupported("punishments must be supplied for more than two players".into()));
            }
            (0..2)
                .map(|j| {
                    let s = minmax_solution(game, j)?;
                    let mut prof = vec![s.strategy.clone(), s.strategy];
                    prof[1 - j] = s.opponent_punisher;
                    Ok(prof)
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    if punishments.len() != k || punishments.iter().any(|p| p.len() != k) {
        return Err(Error::invalid("one punishment profile per player required"));
    }
    // the level each punishment actually holds its target to
    let minmax: Vec<Rational> = (0..k)
        .map(|j| {
            let prof: Vec<MixedStrategy<Rational>> = punishments[j].iter().map(|s| s.convert()).collect();
            let (_, gain) = best_pure_deviation(&exact, &prof, j)?;
            Ok(expected_payoff(&exact, &prof)?.0[j].clone() + gain)
        })
        .collect::<Result<_>>()?;

    let decomposition = match check_feasible_ir_with(game, target, &minmax)? {
        FeasibilityVerdict::Feasible(d) => d,
        FeasibilityVerdict::Infeasible => {
            return Err(Error::Infeasible(format!("target {:?} is not a feasible payoff profile", fmt_profile(target))))
        }
        FeasibilityVerdict::NotIndividuallyRational { player, minmax } => {
            return Err(Error::NotIndividuallyRational { player, minmax: minmax.format_scalar() })
        }
    };

    let equilibria = match options.equilibria {
        Some(e) => {
            if e.len() != k {
                return Err(Error::invalid("one stage equilibrium per player required"));
            }
            for eq in &e {
                check_stage_equilibrium(game, eq)?;
            }
            e
        }
        None => {
            if k != 2 {
                return Err(Error::Unsupported("stage equilibria must be supplied for more than two players".into()));
            }
            let all = enumerate_bimatrix_nash(game)?.equilibria;
            if all.is_empty() {
                return Err(Error::Internal("no stage equilibrium found".into()));
            }
            (0..2)
                .map(|i| {
                    // the first listed equilibrium with the largest gap for player i
                    let mut best = &all[0];
                    for e in &all[1..] {
                        if e.payoff.0[i] > best.payoff.0[i] && !e.payoff.0[i].approx_eq(&best.payoff.0[i]) {
                            best = e;
                        }
                    }
                    best.profile.clone()
                })
                .collect()
        }
    };
    let eq_payoffs: Vec<Vec<Rational>> = equilibria
        .iter()
        .map(|e| Ok(expected_payoff(&exact, &e.iter().map(|s| s.convert()).collect::<Vec<_>>())?.0))
        .collect::<Result<_>>()?;

    // schedule in lexicographic profile order, each profile repeated contiguously
    let counts = decomposition.counts();
    let kk = decomposition.denominator as usize;
    let scheduled: Vec<&Profile> = counts.iter().map(|(p, _)| p).collect();

    // averaged inequality: m * gap_i / k >= max deviation gain_i
    let mut tail_min = 0usize;
    for i in 0..k {
        let gap = eq_payoffs.iter().fold(Rational::from_ratio(0, 1), |acc, u| acc + u[i].clone() - minmax[i].clone());
        let mut worst = Rational::from_ratio(0, 1);
        for a in &scheduled {
            let gain = max_deviation_gain(&exact, a, i);
            if gain > worst {
                worst = gain;
            }
        }
        if worst > Rational::from_ratio(0, 1) {
            if gap <= Rational::from_ratio(0, 1) {
                return Err(Error::NoGapEquilibrium { player: i });
            }
            tail_min = tail_min.max(ceil_div(&(worst * Rational::from_ratio(k as i64, 1)), &gap)?);
        }
    }

    let mut m = tail_min;
    loop {
        while m <= n && !(n - m).is_multiple_of(kk) {
            m += 1;
        }
        if m > n || n - m < kk {
            return Err(Error::HorizonTooShort { n, needed: m.max(tail_min) + kk });
        }
        if suffix_check(&exact, n, m, &counts, (n - m) / kk, &eq_payoffs, &minmax) {
            break;
        }
        m += 1;
    }
    let repetitions = (n - m) / kk;
    let mut schedule = Vec::with_capacity(n - m);
    for (p, c) in &counts {
        for _ in 0..(*c as usize * repetitions) {
            schedule.push(p.clone());
        }
    }
    let trigger = Arc::new(TriggerPlan {
        action_counts: game.action_counts(),
        schedule: schedule.clone(),
        tail: equilibria.clone(),
        punishments: punishments.clone(),
    });
    let profile = (0..k).map(|i| BehavioralStrategy::trigger(i, trigger.clone())).collect();
    let plan = FolkPlan {
        schedule,
        repetitions,
        denominator: kk,
        tail_length: m,
        tail_min,
        tail_equilibria: equilibria,
        punishments,
        minmax: minmax.iter().map(convert).collect(),
        payoff_target: target.clone(),
    };
    Ok((profile, plan))
}

fn fmt_profile<T: Scalar>(p: &PayoffProfile<T>) -> Vec<String> {
    p.values().iter().map(Scalar::format_scalar).collect()
}

fn max_deviation_gain(game: &StageGame<Rational>, a: &[usize], i: usize) -> Rational {
    let base = game.payoff(a, i).clone();
    let mut best = Rational::from_ratio(0, 1);
    let mut dev = a.to_vec();
    for b in 0..game.num_actions(i) {
        dev[i] = b;
        let g = game.payoff(&dev, i).clone() - base.clone();
        if g > best {
            best = g;
        }
    }
    best
}

/// Exact check that no single first-phase deviation pays: the one-shot gain at
/// stage `t` must not exceed what the remaining stages lose under punishment.
fn suffix_check(
    game: &StageGame<Rational>,
    n: usize,
    m: usize,
    counts: &[(Profile, u64)],
    repetitions: usize,
    eq_payoffs: &[Vec<Rational>],
    minmax: &[Rational],
) -> bool {
    let mut schedule: Vec<&Profile> = Vec::new();
    for (p, c) in counts {
        for _ in 0..(*c as usize * repetitions) {
            schedule.push(p);
        }
    }
    let k = game.num_players();
    for i in 0..k {
        // continuation surplus over the minmax level from stage t + 1 onward
        let mut surplus = (0..m).fold(Rational::from_ratio(0, 1), |acc, s| {
            acc + eq_payoffs[s % eq_payoffs.len()][i].clone() - minmax[i].clone()
        });
        for t in (0..n - m).rev() {
            let a = schedule[t];
            if max_deviation_gain(game, a, i) > surplus {
                return false;
            }
            surplus = surplus + game.payoff(a, i).clone() - minmax[i].clone();
        }
    }
    true
}

/// Minmax play of minimal entropy for the first `floor(n(1 - eps))` stages, then
/// alternation between the best and the worst pure profile for the row player.
pub fn zerosum_epsnash<T: Scalar>(game: &StageGame<T>, n: usize, eps: &T) -> Result<Vec<BehavioralStrategy<T>>> {
    if !game.is_zero_sum() || game.num_players() != 2 {
        return Err(Error::domain("zerosum_epsnash needs a two-player zero-sum game"));
    }
    if !eps.is_positive() || *eps > T::one() {
        return Err(Error::invalid(format!("eps {eps} outside (0, 1]")));
    }
    let head = floor_scaled(n, &(T::one() - eps.clone()))?;
    let (_, row_mm) = min_entropy_minmax(game, 0)?;
    let (_, col_mm) = min_entropy_minmax(game, 1)?;
    // lexicographically first maximiser and minimiser of the row payoff
    let mut best = game.profile_at(0);
    let mut worst = best.clone();
    for p in game.profiles() {
        if game.payoff(&p, 0) > game.payoff(&best, 0) {
            best = p.clone();
        }
        if game.payoff(&p, 0) < game.payoff(&worst, 0) {
            worst = p;
        }
    }
    let mut rows = Vec::with_capacity(n);
    let mut cols = Vec::with_capacity(n);
    for t in 0..n {
        if t < head {
            rows.push(row_mm.clone());
            cols.push(col_mm.clone());
        } else {
            let p = if (t - head) % 2 == 0 { &best } else { &worst };
            rows.push(MixedStrategy::pure(0, game.num_actions(0), p[0]));
            cols.push(MixedStrategy::pure(1, game.num_actions(1), p[1]));
        }
    }
    Ok(vec![BehavioralStrategy::schedule(0, rows)?, BehavioralStrategy::schedule(1, cols)?])
}

fn floor_scaled<T: Scalar>(n: usize, x: &T) -> Result<usize> {
    let v = T::from_count(n) * x.clone();
    if T::EXACT {
        let r: Rational = convert(&v);
        return r.floor().to_integer().to_usize().ok_or_else(|| Error::invalid("bad horizon fraction"));
    }
    // absorb rounding just below an integer
    Ok((v.to_f64_lossy() + 1e-9).floor().max(0.0) as usize)
}

/// Uniform matching pennies for `floor((1 - eps) n)` stages; then the row
/// player always plays H and the column player alternates T, H.
pub fn mp_epsnash<T: Scalar>(n: usize, eps: &T) -> Result<Vec<BehavioralStrategy<T>>> {
    if eps.is_negative() || *eps > T::one() {
        return Err(Error::invalid(format!("eps {eps} outside [0, 1]")));
    }
    if n == 0 {
        return Err(Error::invalid("horizon must be positive"));
    }
    let head = floor_scaled(n, &(T::one() - eps.clone()))?;
    let mut rows = Vec::with_capacity(n);
    let mut cols = Vec::with_capacity(n);
    for t in 0..n {
        if t < head {
            rows.push(MixedStrategy::uniform(0, 2));
            cols.push(MixedStrategy::uniform(1, 2));
        } else {
            rows.push(MixedStrategy::pure(0, 2, 0));
            cols.push(MixedStrategy::pure(1, 2, if (t - head) % 2 == 0 { 1 } else { 0 }));
        }
    }
    Ok(vec![BehavioralStrategy::schedule(0, rows)?, BehavioralStrategy::schedule(1, cols)?])
}
