use crate::error::{Error, Result};
use crate::game::{expected_payoff, MixedStrategy, PayoffProfile, StageGame};
use crate::lp::solve_square;
use crate::scalar::Scalar;

/// Largest per-player action count accepted by support enumeration.
pub const MAX_ENUM_ACTIONS: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct NashEquilibrium<T> {
    pub profile: Vec<MixedStrategy<T>>,
    pub payoff: PayoffProfile<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NashEnumeration<T> {
    pub equilibria: Vec<NashEquilibrium<T>>,
    /// Set when some equilibrium has more pure best responses than its support size,
    /// or an indifference system was singular: the game may have equilibrium
    /// components, and only their vertices with equal-size supports are listed.
    pub degenerate: bool,
}

fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(size);
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < size - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    rec(0, n, size, &mut cur, &mut out);
    out
}

/// Mixture of the *other* side that makes every action in `own` indifferent:
/// `sum_{j in other} pay[i][j] y_j = u` for `i in own`, `sum y = 1`.
fn indifference<T: Scalar>(pay: &[Vec<T>], own: &[usize], other: &[usize]) -> Option<(Vec<T>, T)> {
    let s = other.len();
    let mut m = Vec::with_capacity(s + 1);
    let mut rhs = Vec::with_capacity(s + 1);
    for &i in own {
        let mut row: Vec<T> = other.iter().map(|&j| pay[i][j].clone()).collect();
        row.push(-T::one());
        m.push(row);
        rhs.push(T::zero());
    }
    let mut last = vec![T::one(); s];
    last.push(T::zero());
    m.push(last);
    rhs.push(T::one());
    let mut sol = solve_square(m, rhs)?;
    let u = sol.pop().expect("value unknown");
    Some((sol, u))
}

fn spread<T: Scalar>(weights: &[T], support: &[usize], n: usize) -> Vec<T> {
    let mut out = vec![T::zero(); n];
    for (w, &i) in weights.iter().zip(support) {
        out[i] = w.clone();
    }
    out
}

fn best_response_count<T: Scalar>(pay: &[Vec<T>], other_mix: &[T], value: &T) -> (usize, bool) {
    let mut count = 0;
    let mut ok = true;
    for row in pay {
        let e = row.iter().zip(other_mix).fold(T::zero(), |acc, (p, q)| acc + p.clone() * q.clone());
        if e.approx_eq(value) {
            count += 1;
        } else if e > *value {
            ok = false;
        }
    }
    (count, ok)
}

/// All Nash equilibria of a two-player game found by equal-size support enumeration.
pub fn enumerate_bimatrix_nash<T: Scalar>(game: &StageGame<T>) -> Result<NashEnumeration<T>> {
    if game.num_players() != 2 {
        return Err(Error::Unsupported("support enumeration needs a two-player game".into()));
    }
    let (m, n) = (game.num_actions(0), game.num_actions(1));
    if m > MAX_ENUM_ACTIONS || n > MAX_ENUM_ACTIONS {
        return Err(Error::Resource(format!(
            "support enumeration is capped at {MAX_ENUM_ACTIONS} actions per player"
        )));
    }
    let row_pay = game.own_matrix(0)?;
    let col_pay = game.own_matrix(1)?;
    let mut equilibria: Vec<NashEquilibrium<T>> = Vec::new();
    let mut degenerate = false;
    for size in 1..=m.min(n) {
        for s1 in subsets(m, size) {
            for s2 in subsets(n, size) {
                let Some((y, u)) = indifference(&row_pay, &s1, &s2) else {
                    degenerate = true;
                    continue;
                };
                let Some((x, w)) = indifference(&col_pay, &s2, &s1) else {
                    degenerate = true;
                    continue;
                };
                if x.iter().chain(&y).any(|p| !p.lp_positive()) {
                    continue;
                }
                let x = spread(&x, &s1, m);
                let y = spread(&y, &s2, n);
                let (row_br, row_ok) = best_response_count(&row_pay, &y, &u);
                let (col_br, col_ok) = best_response_count(&col_pay, &x, &w);
                if !row_ok || !col_ok {
                    continue;
                }
                if row_br > size || col_br > size {
                    degenerate = true;
                }
                let profile = vec![MixedStrategy::new(0, x)?, MixedStrategy::new(1, y)?];
                if equilibria.iter().any(|e| e.profile == profile) {
                    continue;
                }
                let payoff = expected_payoff(game, &profile)?;
                equilibria.push(NashEquilibrium { profile, payoff });
            }
        }
    }
    Ok(NashEnumeration { equilibria, degenerate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{best_pure_deviation, extended_mp, matching_pennies, mp_punishment};
    use crate::scalar::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn mix(owner: usize, probs: &[(i64, i64)]) -> MixedStrategy<Rational> {
        MixedStrategy::new(owner, probs.iter().map(|&(n, d)| r(n, d)).collect()).unwrap()
    }

    #[test]
    fn extended_mp_has_the_three_equilibria() {
        let e = enumerate_bimatrix_nash(&extended_mp::<Rational>()).unwrap();
        let h = (1, 2);
        let z = (0, 1);
        let expected = [
            vec![mix(0, &[z, h, h, z]), mix(1, &[z, h, h, z])],
            vec![mix(0, &[h, z, z, h]), mix(1, &[z, h, z, h])],
            vec![mix(0, &[h, z, z, h]), mix(1, &[z, z, h, h])],
        ];
        assert_eq!(e.equilibria.len(), 3);
        for want in &expected {
            let found = e.equilibria.iter().find(|q| &q.profile == want).expect("listed equilibrium");
            assert_eq!(found.payoff.0, vec![r(0, 1), r(0, 1)]);
        }
        assert!(e.degenerate);
    }

    #[test]
    fn punishment_game_unique_equilibrium() {
        let e = enumerate_bimatrix_nash(&mp_punishment::<Rational>()).unwrap();
        assert_eq!(e.equilibria.len(), 1);
        let h = (1, 2);
        let z = (0, 1);
        assert_eq!(e.equilibria[0].profile, vec![mix(0, &[z, h, h, z]), mix(1, &[z, h, h, z])]);
    }

    #[test]
    fn strictly_dominant_profile() {
        // prisoner's dilemma
        let g = StageGame::bimatrix(
            "pd",
            &["c", "d"],
            &["c", "d"],
            vec![vec![(r(3, 1), r(3, 1)), (r(0, 1), r(5, 1))], vec![(r(5, 1), r(0, 1)), (r(1, 1), r(1, 1))]],
        )
        .unwrap();
        let e = enumerate_bimatrix_nash(&g).unwrap();
        assert_eq!(e.equilibria.len(), 1);
        assert_eq!(e.equilibria[0].profile[0].as_pure(), Some(1));
        assert_eq!(e.equilibria[0].profile[1].as_pure(), Some(1));
        assert!(!e.degenerate);
    }

    #[test]
    fn every_listed_profile_is_a_stage_equilibrium() {
        for g in [matching_pennies::<Rational>(), extended_mp(), mp_punishment()] {
            for eq in enumerate_bimatrix_nash(&g).unwrap().equilibria {
                for p in 0..2 {
                    let (_, gain) = best_pure_deviation(&g, &eq.profile, p).unwrap();
                    assert!(gain <= r(0, 1));
                }
            }
        }
    }
}
