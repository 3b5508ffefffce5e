//! Finite strategic games, mixed strategies and payoff profiles.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::scalar::{convert, Scalar};

/// Largest action set accepted for a single player.
pub const MAX_ACTIONS: usize = 16;

/// A joint action profile: one action index per player.
pub type Profile = Vec<usize>;

/// A finite normal-form game with a dense payoff tensor.
///
/// Payoffs are stored profile-major with the player index innermost, so the
/// tensor holds exactly `prod |A_i| * k` entries. Player 0 is the row player.
#[derive(Clone, Debug, PartialEq)]
pub struct StageGame<T> {
    name: String,
    actions: Vec<Vec<String>>,
    strides: Vec<usize>,
    payoffs: Vec<T>,
    zero_sum: bool,
}

impl<T: Scalar> StageGame<T> {
    pub fn new(name: impl Into<String>, actions: Vec<Vec<String>>, payoffs: Vec<T>) -> Result<Self> {
        let k = actions.len();
        if k < 2 {
            return Err(Error::invalid(format!("a game needs at least two players, got {k}")));
        }
        for (i, labels) in actions.iter().enumerate() {
            if labels.is_empty() {
                return Err(Error::invalid(format!("player {i} has no actions")));
            }
            if labels.len() > MAX_ACTIONS {
                return Err(Error::invalid(format!(
                    "player {i} has {} actions, the cap is {MAX_ACTIONS}",
                    labels.len()
                )));
            }
            let distinct: HashSet<&String> = labels.iter().collect();
            if distinct.len() != labels.len() {
                return Err(Error::invalid(format!("player {i} has duplicate action labels")));
            }
        }
        let mut strides = vec![1; k];
        for i in (0..k - 1).rev() {
            strides[i] = strides[i + 1] * actions[i + 1].len();
        }
        let num_profiles = strides[0] * actions[0].len();
        if payoffs.len() != num_profiles * k {
            return Err(Error::invalid(format!(
                "payoff tensor has {} entries, expected {}",
                payoffs.len(),
                num_profiles * k
            )));
        }
        let zero_sum = k == 2
            && payoffs
                .chunks(2)
                .all(|u| (u[0].clone() + u[1].clone()).is_zero());
        Ok(StageGame { name: name.into(), actions, strides, payoffs, zero_sum })
    }

    /// Two-player game from a matrix of `(row payoff, column payoff)` cells.
    pub fn bimatrix(
        name: impl Into<String>,
        rows: &[&str],
        cols: &[&str],
        cells: Vec<Vec<(T, T)>>,
    ) -> Result<Self> {
        if cells.len() != rows.len() || cells.iter().any(|r| r.len() != cols.len()) {
            return Err(Error::invalid("bimatrix shape does not match action labels"));
        }
        let payoffs = cells.into_iter().flatten().flat_map(|(a, b)| [a, b]).collect();
        Self::new(name, vec![labels(rows), labels(cols)], payoffs)
    }

    /// Two-player zero-sum game from the row player's payoff matrix.
    pub fn zero_sum(name: impl Into<String>, rows: &[&str], cols: &[&str], matrix: Vec<Vec<T>>) -> Result<Self> {
        let cells = matrix
            .into_iter()
            .map(|r| r.into_iter().map(|x| (x.clone(), -x)).collect())
            .collect();
        Self::bimatrix(name, rows, cols, cells)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_players(&self) -> usize {
        self.actions.len()
    }

    pub fn num_actions(&self, player: usize) -> usize {
        self.actions[player].len()
    }

    pub fn action_counts(&self) -> Vec<usize> {
        self.actions.iter().map(Vec::len).collect()
    }

    pub fn labels(&self, player: usize) -> &[String] {
        &self.actions[player]
    }

    pub fn action_index(&self, player: usize, label: &str) -> Option<usize> {
        self.actions.get(player)?.iter().position(|l| l == label)
    }

    pub fn num_profiles(&self) -> usize {
        self.strides[0] * self.actions[0].len()
    }

    pub fn is_zero_sum(&self) -> bool {
        self.zero_sum
    }

    pub fn profile_index(&self, profile: &[usize]) -> usize {
        profile.iter().zip(&self.strides).map(|(a, s)| a * s).sum()
    }

    pub fn profile_at(&self, index: usize) -> Profile {
        self.strides
            .iter()
            .zip(&self.actions)
            .map(|(s, a)| (index / s) % a.len())
            .collect()
    }

    pub fn is_valid_profile(&self, profile: &[usize]) -> bool {
        profile.len() == self.num_players()
            && profile.iter().zip(&self.actions).all(|(a, labels)| *a < labels.len())
    }

    /// All pure profiles in lexicographic order of action indices.
    pub fn profiles(&self) -> impl Iterator<Item = Profile> + '_ {
        (0..self.num_profiles()).map(move |i| self.profile_at(i))
    }

    pub fn payoff(&self, profile: &[usize], player: usize) -> &T {
        &self.payoffs[self.profile_index(profile) * self.num_players() + player]
    }

    pub fn payoff_vector(&self, profile: &[usize]) -> &[T] {
        let k = self.num_players();
        let i = self.profile_index(profile) * k;
        &self.payoffs[i..i + k]
    }

    /// Player `player`'s payoffs as a matrix `[own action][opponent action]` (two players only).
    pub fn own_matrix(&self, player: usize) -> Result<Vec<Vec<T>>> {
        if self.num_players() != 2 {
            return Err(Error::Unsupported("own_matrix needs a two-player game".into()));
        }
        let other = 1 - player;
        Ok((0..self.num_actions(player))
            .map(|a| {
                (0..self.num_actions(other))
                    .map(|b| {
                        let mut p = vec![0; 2];
                        p[player] = a;
                        p[other] = b;
                        self.payoff(&p, player).clone()
                    })
                    .collect()
            })
            .collect())
    }

    pub fn min_payoff(&self, player: usize) -> T {
        self.player_payoffs(player).fold(None, |m: Option<T>, x| match m {
            Some(m) if m <= *x => Some(m),
            _ => Some(x.clone()),
        })
        .expect("nonempty game")
    }

    pub fn max_payoff(&self, player: usize) -> T {
        self.player_payoffs(player).fold(None, |m: Option<T>, x| match m {
            Some(m) if m >= *x => Some(m),
            _ => Some(x.clone()),
        })
        .expect("nonempty game")
    }

    fn player_payoffs(&self, player: usize) -> impl Iterator<Item = &T> {
        self.payoffs.iter().skip(player).step_by(self.num_players())
    }

    pub fn convert<U: Scalar>(&self) -> StageGame<U> {
        StageGame {
            name: self.name.clone(),
            actions: self.actions.clone(),
            strides: self.strides.clone(),
            payoffs: self.payoffs.iter().map(convert).collect(),
            zero_sum: self.zero_sum,
        }
    }

    /// Weakly dominant pure actions per player: actions at least as good as every other
    /// action against every opponent profile.
    pub fn weakly_dominant_actions(&self) -> Vec<Vec<usize>> {
        (0..self.num_players())
            .map(|i| {
                (0..self.num_actions(i))
                    .filter(|&a| {
                        (0..self.num_actions(i)).filter(|&b| b != a).all(|b| {
                            self.profiles()
                                .filter(|p| p[i] == a)
                                .all(|p| {
                                    let mut q = p.clone();
                                    q[i] = b;
                                    self.payoff(&p, i) >= self.payoff(&q, i)
                                })
                        })
                    })
                    .collect()
            })
            .collect()
    }
}

fn labels(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

/// A probability distribution over one player's actions.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedStrategy<T> {
    owner: usize,
    probs: Vec<T>,
}

impl<T: Scalar> MixedStrategy<T> {
    /// Rational weights must sum to exactly one; float weights within 1e-9.
    pub fn new(owner: usize, probs: Vec<T>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::invalid("empty mixed strategy"));
        }
        if probs.iter().any(|p| p.is_negative() && !p.is_negligible()) {
            return Err(Error::invalid("negative probability"));
        }
        let total: T = crate::scalar::sum(&probs);
        let ok = if T::EXACT {
            total.is_one()
        } else {
            (total.to_f64_lossy() - 1.0).abs() <= 1e-9
        };
        if !ok {
            return Err(Error::invalid(format!("weights sum to {total}, not 1")));
        }
        Ok(MixedStrategy { owner, probs })
    }

    /// Skips validation; callers guarantee a distribution.
    pub(crate) fn raw(owner: usize, probs: Vec<T>) -> Self {
        MixedStrategy { owner, probs }
    }

    pub fn pure(owner: usize, num_actions: usize, action: usize) -> Self {
        let probs = (0..num_actions).map(|a| if a == action { T::one() } else { T::zero() }).collect();
        MixedStrategy { owner, probs }
    }

    pub fn uniform(owner: usize, num_actions: usize) -> Self {
        let p = T::from_ratio(1, num_actions as i64);
        MixedStrategy { owner, probs: vec![p; num_actions] }
    }

    pub fn owner(&self) -> usize {
        self.owner
    }

    pub fn with_owner(mut self, owner: usize) -> Self {
        self.owner = owner;
        self
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn prob(&self, action: usize) -> &T {
        &self.probs[action]
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Actions carrying non-negligible weight.
    pub fn support(&self) -> Vec<usize> {
        (0..self.probs.len()).filter(|&a| !self.probs[a].is_negligible()).collect()
    }

    pub fn as_pure(&self) -> Option<usize> {
        match self.support().as_slice() {
            [a] => Some(*a),
            _ => None,
        }
    }

    /// Most likely action, lowest index on ties.
    pub fn mode(&self) -> usize {
        let mut best = 0;
        for a in 1..self.probs.len() {
            if self.probs[a] > self.probs[best] && !self.probs[a].approx_eq(&self.probs[best]) {
                best = a;
            }
        }
        best
    }

    pub fn entropy(&self) -> f64 {
        crate::entropy::shannon_entropy(self)
    }

    pub fn convert<U: Scalar>(&self) -> MixedStrategy<U> {
        MixedStrategy { owner: self.owner, probs: self.probs.iter().map(convert).collect() }
    }
}

/// Per-player expected payoffs.
#[derive(Clone, Debug, PartialEq)]
pub struct PayoffProfile<T>(pub Vec<T>);

impl<T: Scalar> PayoffProfile<T> {
    pub fn values(&self) -> &[T] {
        &self.0
    }

    pub fn get(&self, player: usize) -> &T {
        &self.0[player]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn check_profile<T: Scalar>(game: &StageGame<T>, profile: &[MixedStrategy<T>]) -> Result<()> {
    if profile.len() != game.num_players() {
        return Err(Error::invalid(format!(
            "expected {} strategies, got {}",
            game.num_players(),
            profile.len()
        )));
    }
    for (i, s) in profile.iter().enumerate() {
        if s.len() != game.num_actions(i) {
            return Err(Error::invalid(format!(
                "strategy for player {i} has {} weights, player has {} actions",
                s.len(),
                game.num_actions(i)
            )));
        }
    }
    Ok(())
}

/// Expected payoff of every player under independent mixing.
pub fn expected_payoff<T: Scalar>(game: &StageGame<T>, profile: &[MixedStrategy<T>]) -> Result<PayoffProfile<T>> {
    check_profile(game, profile)?;
    let k = game.num_players();
    let mut out = vec![T::zero(); k];
    for p in game.profiles() {
        let mut w = T::one();
        for (i, a) in p.iter().enumerate() {
            let q = profile[i].prob(*a);
            if q.is_zero() {
                w = T::zero();
                break;
            }
            w = w * q.clone();
        }
        if w.is_zero() {
            continue;
        }
        for (o, u) in out.iter_mut().zip(game.payoff_vector(&p)) {
            *o = o.clone() + w.clone() * u.clone();
        }
    }
    Ok(PayoffProfile(out))
}

/// Expected payoff of `player` when it plays the pure action `action` against the others' mixtures.
pub fn pure_deviation_payoff<T: Scalar>(
    game: &StageGame<T>,
    profile: &[MixedStrategy<T>],
    player: usize,
    action: usize,
) -> Result<T> {
    let mut dev = profile.to_vec();
    dev[player] = MixedStrategy::pure(player, game.num_actions(player), action);
    Ok(expected_payoff(game, &dev)?.0.swap_remove(player))
}

/// The best pure deviation of `player` and its gain over the profile's payoff
/// (lowest action index among the maximisers).
pub fn best_pure_deviation<T: Scalar>(
    game: &StageGame<T>,
    profile: &[MixedStrategy<T>],
    player: usize,
) -> Result<(usize, T)> {
    let base = expected_payoff(game, profile)?.0.swap_remove(player);
    let mut best: Option<(usize, T)> = None;
    for a in 0..game.num_actions(player) {
        let v = pure_deviation_payoff(game, profile, player, a)?;
        match &best {
            Some((_, b)) if !(v > *b && !v.approx_eq(b)) => {}
            _ => best = Some((a, v)),
        }
    }
    let (a, v) = best.expect("nonempty action set");
    Ok((a, v - base))
}

/// Registry of the bundled example games.
pub fn example_games<T: Scalar>() -> Vec<StageGame<T>> {
    vec![matching_pennies(), extended_mp(), mp_punishment()]
}

/// Looks up a bundled game by name.
pub fn example_game<T: Scalar>(name: &str) -> Result<StageGame<T>> {
    example_games()
        .into_iter()
        .find(|g| g.name() == name)
        .ok_or_else(|| Error::invalid(format!("unknown game {name:?}")))
}

fn int<T: Scalar>(v: i64) -> T {
    T::from_ratio(v, 1)
}

fn cells<T: Scalar>(rows: &[[(i64, i64); 4]]) -> Vec<Vec<(T, T)>> {
    rows.iter().map(|r| r.iter().map(|&(a, b)| (int(a), int(b))).collect()).collect()
}

pub fn matching_pennies<T: Scalar>() -> StageGame<T> {
    let m = vec![vec![int(1), int(-1)], vec![int(-1), int(1)]];
    StageGame::zero_sum("matching-pennies", &["H", "T"], &["H", "T"], m).expect("static game")
}

/// Matching pennies extended by a safe row action `U`, a row gamble `D`,
/// a column action `L` and a column safe action `R`.
pub fn extended_mp<T: Scalar>() -> StageGame<T> {
    let rows = [
        [(0, -1), (0, -1), (0, -1), (0, 0)],
        [(0, -1), (1, -1), (-1, 1), (-1, 0)],
        [(0, -1), (-1, 1), (1, -1), (-1, 0)],
        [(0, 0), (-1, 1), (-1, 1), (1, 0)],
    ];
    StageGame::bimatrix("extended-mp", &["U", "H", "T", "D"], &["L", "H", "T", "R"], cells(&rows))
        .expect("static game")
}

/// Matching pennies with a cooperative action `C` and a punishing action `P`.
pub fn mp_punishment<T: Scalar>() -> StageGame<T> {
    let rows = [
        [(3, 3), (-3, 6), (-3, 6), (-3, -3)],
        [(6, -3), (1, -1), (-1, 1), (-3, -3)],
        [(6, -3), (-1, 1), (1, -1), (-3, -3)],
        [(-3, -3), (-3, -3), (-3, -3), (-4, -4)],
    ];
    StageGame::bimatrix("mp-punishment", &["C", "H", "T", "P"], &["C", "H", "T", "P"], cells(&rows))
        .expect("static game")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn matching_pennies_uniform_is_zero() {
        let g = matching_pennies::<Rational>();
        let prof = [MixedStrategy::uniform(0, 2), MixedStrategy::uniform(1, 2)];
        assert_eq!(expected_payoff(&g, &prof).unwrap().0, vec![r(0, 1), r(0, 1)]);
        assert!(g.is_zero_sum());
    }

    #[test]
    fn pure_profile_reads_tensor() {
        let g = mp_punishment::<Rational>();
        for p in g.profiles() {
            let prof: Vec<_> = p.iter().enumerate().map(|(i, &a)| MixedStrategy::pure(i, 4, a)).collect();
            assert_eq!(expected_payoff(&g, &prof).unwrap().0, g.payoff_vector(&p).to_vec());
        }
    }

    #[test]
    fn figure_two_inner_mixture() {
        let g = mp_punishment::<Rational>();
        let half = MixedStrategy::new(0, vec![r(0, 1), r(1, 2), r(1, 2), r(0, 1)]).unwrap();
        let prof = [half.clone(), half.with_owner(1)];
        assert_eq!(expected_payoff(&g, &prof).unwrap().0, vec![r(0, 1), r(0, 1)]);
    }

    #[test]
    fn example_rows_match_figures() {
        let g = extended_mp::<Rational>();
        let u: Vec<_> = (0..4).map(|c| g.payoff_vector(&[0, c]).to_vec()).collect();
        assert_eq!(u, vec![vec![r(0, 1), r(-1, 1)], vec![r(0, 1), r(-1, 1)], vec![r(0, 1), r(-1, 1)], vec![r(0, 1), r(0, 1)]]);
        let g = mp_punishment::<Rational>();
        let c: Vec<_> = (0..4).map(|c| g.payoff_vector(&[0, c]).to_vec()).collect();
        assert_eq!(c, vec![vec![r(3, 1), r(3, 1)], vec![r(-3, 1), r(6, 1)], vec![r(-3, 1), r(6, 1)], vec![r(-3, 1), r(-3, 1)]]);
        assert!(!g.is_zero_sum());
        assert_eq!(example_games::<Rational>().len(), 3);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let g = matching_pennies::<f64>();
        let prof = [MixedStrategy::uniform(0, 3), MixedStrategy::uniform(1, 2)];
        assert!(matches!(expected_payoff(&g, &prof), Err(Error::InvalidInput(_))));
        assert!(expected_payoff(&g, &prof[..1]).is_err());
    }

    #[test]
    fn construction_guards() {
        let dup = StageGame::<f64>::new("d", vec![vec!["a".into(), "a".into()], vec!["b".into()]], vec![0.0; 4]);
        assert!(dup.is_err());
        let short = StageGame::<f64>::new("s", vec![vec!["a".into()], vec!["b".into()]], vec![0.0; 3]);
        assert!(short.is_err());
        assert!(MixedStrategy::<Rational>::new(0, vec![r(1, 3), r(1, 3)]).is_err());
        assert!(MixedStrategy::<f64>::new(0, vec![0.5, 0.5 + 1e-12]).is_ok());
    }

    #[test]
    fn weak_dominance_detection() {
        let g = StageGame::<Rational>::zero_sum("dom", &["a", "b"], &["x", "y"], vec![vec![r(2, 1), r(2, 1)], vec![r(0, 1), r(1, 1)]]).unwrap();
        assert_eq!(g.weakly_dominant_actions()[0], vec![0]);
        assert!(matching_pennies::<Rational>().weakly_dominant_actions().iter().all(Vec::is_empty));
    }
}
