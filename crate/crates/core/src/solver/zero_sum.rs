use crate::error::{Error, Result};
use crate::game::{MixedStrategy, PayoffProfile, StageGame};
use crate::lp::{LinearProgram, LpOutcome};
use crate::scalar::Scalar;

/// A player's minmax level together with a strategy guaranteeing it and, for two
/// players, the opponent strategy that holds the player down to it.
#[derive(Clone, Debug, PartialEq)]
pub struct MinmaxSolution<T> {
    pub player: usize,
    pub value: T,
    pub strategy: MixedStrategy<T>,
    pub opponent_punisher: MixedStrategy<T>,
}

/// Value and optimal strategies of a two-player zero-sum game.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroSumSolution<T> {
    /// The row player's value.
    pub value: T,
    pub row: MinmaxSolution<T>,
    pub col: MinmaxSolution<T>,
}

/// Optimal mixed strategies of the matrix game where the row chooser maximises `m`.
pub(crate) struct MatrixSolution<T> {
    pub value: T,
    pub maximiser: Vec<T>,
    pub minimiser: Vec<T>,
}

/// Solves `max_x min_j (x^T m)_j` through the column player's LP on a shifted positive matrix;
/// the row strategy is read off the dual prices.
pub(crate) fn solve_matrix<T: Scalar>(m: &[Vec<T>]) -> Result<MatrixSolution<T>> {
    let rows = m.len();
    let cols = m[0].len();
    let min = m.iter().flatten().fold(m[0][0].clone(), |a, x| if *x < a { x.clone() } else { a });
    let shift = T::one() - min;
    // max sum(y) st (m + shift) y + s = 1
    let a: Vec<Vec<T>> = (0..rows)
        .map(|i| {
            let mut r: Vec<T> = m[i].iter().map(|x| x.clone() + shift.clone()).collect();
            r.extend((0..rows).map(|k| if k == i { T::one() } else { T::zero() }));
            r
        })
        .collect();
    let mut c = vec![T::one(); cols];
    c.extend(vec![T::zero(); rows]);
    let lp = LinearProgram { a, b: vec![T::one(); rows], c };
    let sol = match lp.solve() {
        LpOutcome::Optimal(s) => s,
        other => return Err(Error::Internal(format!("matrix game LP not optimal: {other:?}"))),
    };
    let w = sol.objective.clone();
    let minimiser: Vec<T> = sol.x[..cols].iter().map(|y| y.clone() / w.clone()).collect();
    let maximiser: Vec<T> = sol.duals.iter().map(|x| x.clone() / w.clone()).collect();
    let value = T::one() / w - shift;

    // duality check: the maximiser guarantees `value`, the minimiser caps at `value`
    let guaranteed = (0..cols)
        .map(|j| (0..rows).fold(T::zero(), |acc, i| acc + maximiser[i].clone() * m[i][j].clone()))
        .fold(None, |acc: Option<T>, x| match acc {
            Some(a) if a <= x => Some(a),
            _ => Some(x),
        })
        .expect("nonempty");
    let capped = (0..rows)
        .map(|i| (0..cols).fold(T::zero(), |acc, j| acc + minimiser[j].clone() * m[i][j].clone()))
        .fold(None, |acc: Option<T>, x| match acc {
            Some(a) if a >= x => Some(a),
            _ => Some(x),
        })
        .expect("nonempty");
    if !guaranteed.approx_eq(&value) || !capped.approx_eq(&value) || maximiser.iter().any(Scalar::lp_negative) {
        return Err(Error::Internal(format!(
            "duality gap: guarantee {guaranteed}, cap {capped}, value {value}"
        )));
    }
    Ok(MatrixSolution { value, maximiser, minimiser })
}

fn require_two<T: Scalar>(game: &StageGame<T>) -> Result<()> {
    if game.num_players() != 2 {
        return Err(Error::Unsupported(format!(
            "minmax computation is implemented for two players only (game has {}); supply punishment strategies explicitly",
            game.num_players()
        )));
    }
    Ok(())
}

/// Value and minmax strategies of a two-player zero-sum game.
pub fn solve_zero_sum<T: Scalar>(game: &StageGame<T>) -> Result<ZeroSumSolution<T>> {
    require_two(game)?;
    if !game.is_zero_sum() {
        return Err(Error::domain(format!("game {:?} is not zero-sum", game.name())));
    }
    let s = solve_matrix(&game.own_matrix(0)?)?;
    let p = MixedStrategy::new(0, s.maximiser)?;
    let q = MixedStrategy::new(1, s.minimiser)?;
    Ok(ZeroSumSolution {
        value: s.value.clone(),
        row: MinmaxSolution { player: 0, value: s.value.clone(), strategy: p.clone(), opponent_punisher: q.clone() },
        col: MinmaxSolution { player: 1, value: -s.value, strategy: q, opponent_punisher: p },
    })
}

/// Minmax level of one player in a two-player (possibly general-sum) game.
pub fn minmax_solution<T: Scalar>(game: &StageGame<T>, player: usize) -> Result<MinmaxSolution<T>> {
    require_two(game)?;
    let s = solve_matrix(&game.own_matrix(player)?)?;
    Ok(MinmaxSolution {
        player,
        value: s.value,
        strategy: MixedStrategy::new(player, s.maximiser)?,
        opponent_punisher: MixedStrategy::new(1 - player, s.minimiser)?,
    })
}

/// The minmax payoff of every player.
pub fn minmax_profile<T: Scalar>(game: &StageGame<T>) -> Result<PayoffProfile<T>> {
    require_two(game)?;
    Ok(PayoffProfile(vec![minmax_solution(game, 0)?.value, minmax_solution(game, 1)?.value]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{extended_mp, matching_pennies, mp_punishment};
    use crate::scalar::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn matching_pennies_value() {
        let s = solve_zero_sum(&matching_pennies::<Rational>()).unwrap();
        assert_eq!(s.value, r(0, 1));
        assert_eq!(s.row.strategy.probs(), &[r(1, 2), r(1, 2)]);
        assert_eq!(s.col.strategy.probs(), &[r(1, 2), r(1, 2)]);
    }

    #[test]
    fn closed_form_two_by_two() {
        // oracle: (ad - bc) / (a + d - b - c) for a game without saddle point
        let (a, b, c, d) = (3, -1, -2, 2);
        let oracle = r(a * d - b * c, a + d - b - c);
        assert_eq!(oracle, r(1, 2));
        let g = StageGame::zero_sum("t", &["a", "b"], &["x", "y"], vec![vec![r(a, 1), r(b, 1)], vec![r(c, 1), r(d, 1)]]).unwrap();
        assert_eq!(solve_zero_sum(&g).unwrap().value, oracle);
        // independent grid search on the row mixture
        let grid_best = (0..=1000)
            .map(|k| {
                let p = k as f64 / 1000.0;
                (p * 3.0 - (1.0 - p) * 2.0).min(-p + 2.0 * (1.0 - p))
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((grid_best - 0.5).abs() < 1e-2);
    }

    #[test]
    fn dominant_constant_row() {
        let g = StageGame::zero_sum("d", &["a", "b"], &["x", "y", "z"], vec![vec![r(5, 1); 3], vec![r(1, 1), r(9, 1), r(0, 1)]]).unwrap();
        assert_eq!(solve_zero_sum(&g).unwrap().value, r(5, 1));
    }

    #[test]
    fn figure_minmax_profiles() {
        assert_eq!(minmax_profile(&extended_mp::<Rational>()).unwrap().0, vec![r(0, 1), r(0, 1)]);
        assert_eq!(minmax_profile(&mp_punishment::<Rational>()).unwrap().0, vec![r(-3, 1), r(-3, 1)]);
        assert_eq!(minmax_profile(&matching_pennies::<Rational>()).unwrap().0, vec![r(0, 1), r(0, 1)]);
    }

    #[test]
    fn non_zero_sum_rejected() {
        assert!(matches!(solve_zero_sum(&mp_punishment::<Rational>()), Err(Error::Domain(_))));
    }

    #[test]
    fn float_backend_agrees() {
        let s = solve_zero_sum(&matching_pennies::<f64>()).unwrap();
        assert!(s.value.abs() < 1e-12);
        assert!((s.row.strategy.prob(0) - 0.5).abs() < 1e-12);
    }

    proptest::proptest! {
        #[test]
        fn strategies_guarantee_value(cells in proptest::collection::vec(-5i64..=5, 9)) {
            let m: Vec<Vec<Rational>> = cells.chunks(3).map(|c| c.iter().map(|&x| r(x, 1)).collect()).collect();
            let g = StageGame::zero_sum("p", &["a", "b", "c"], &["x", "y", "z"], m.clone()).unwrap();
            let s = solve_zero_sum(&g).unwrap();
            for j in 0..3 {
                let e = (0..3).fold(r(0, 1), |acc, i| acc + s.row.strategy.prob(i).clone() * m[i][j].clone());
                proptest::prop_assert!(e >= s.value);
            }
            for i in 0..3 {
                let e = (0..3).fold(r(0, 1), |acc, j| acc + s.col.strategy.prob(j).clone() * m[i][j].clone());
                proptest::prop_assert!(e <= s.value);
            }
        }
    }
}
