//! Entropy-bounded guarantees `U(gamma)` and their concavification.
//!
//! `U(gamma)` is the best payoff a player can guarantee against every pure reply
//! with a stage strategy of entropy at most `gamma`. The feasible set is not
//! convex, so the search is a dense simplex grid refined by pairwise mass moves.

use crate::entropy::entropy_of;
use crate::error::{Error, Result};
use crate::game::StageGame;
use crate::scalar::Scalar;
use crate::solver::min_entropy::optimal_face_vertices;
use crate::solver::zero_sum::solve_zero_sum;

/// Largest own action set accepted by the grid search.
pub const MAX_GUARANTEE_ACTIONS: usize = 4;

/// Refinement stops at this step size.
const REFINE_STEP: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq)]
pub struct GuaranteeCurve {
    pub player: usize,
    pub gammas: Vec<f64>,
    pub values: Vec<f64>,
    pub cav_values: Vec<f64>,
}

/// Candidate strategies sorted by entropy with their guaranteed payoff.
pub struct GuaranteeSearch {
    matrix: Vec<Vec<f64>>,
    /// `(entropy, guarantee, point)` sorted by entropy.
    points: Vec<(f64, f64, Vec<f64>)>,
    /// Index of the best guarantee among `points[..=i]`.
    prefix_best: Vec<usize>,
    /// The player's maximal entropy `log2 |A|`.
    pub max_entropy: f64,
}

fn guarantee(m: &[Vec<f64>], x: &[f64]) -> f64 {
    (0..m[0].len())
        .map(|j| x.iter().zip(m).map(|(p, row)| p * row[j]).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
}

fn grid_points(dim: usize, denom: usize) -> Vec<Vec<f64>> {
    fn rec(dim: usize, left: usize, denom: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if cur.len() == dim - 1 {
            cur.push(left);
            out.push(cur.iter().map(|&k| k as f64 / denom as f64).collect());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(dim, left - k, denom, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, denom, denom, &mut Vec::with_capacity(dim), &mut out);
    out
}

impl GuaranteeSearch {
    pub fn new<T: Scalar>(game: &StageGame<T>, player: usize) -> Result<Self> {
        if game.num_players() != 2 || !game.is_zero_sum() {
            return Err(Error::domain("entropy-bounded guarantees need a two-player zero-sum game"));
        }
        let n = game.num_actions(player);
        if n > MAX_GUARANTEE_ACTIONS {
            return Err(Error::Resource(format!(
                "guarantee search is capped at {MAX_GUARANTEE_ACTIONS} actions, player has {n}"
            )));
        }
        let exact = game.own_matrix(player)?;
        let matrix: Vec<Vec<f64>> = exact.iter().map(|r| r.iter().map(Scalar::to_f64_lossy).collect()).collect();
        // 1e-3 resolution up to three actions, 1e-2 for four (then refined)
        let denom = if n <= 3 { 1000 } else { 100 };
        let mut candidates = grid_points(n, denom);
        // optimal-face vertices pin the top of the curve to the exact value
        let sol = solve_zero_sum(game)?;
        let value = if player == 0 { sol.value } else { -sol.value };
        for v in optimal_face_vertices(&exact, &value)? {
            candidates.push(v.iter().map(Scalar::to_f64_lossy).collect());
        }
        let mut points: Vec<(f64, f64, Vec<f64>)> = candidates
            .into_iter()
            .map(|x| (entropy_of(x.iter().copied()), guarantee(&matrix, &x), x))
            .collect();
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut prefix_best: Vec<usize> = Vec::with_capacity(points.len());
        for i in 0..points.len() {
            let best = match prefix_best.last() {
                Some(&b) if points[b].1 >= points[i].1 => b,
                _ => i,
            };
            prefix_best.push(best);
        }
        Ok(GuaranteeSearch { matrix, points, prefix_best, max_entropy: (n as f64).log2() })
    }

    /// `U(gamma)` and a strategy attaining it.
    pub fn at(&self, gamma: f64) -> (f64, Vec<f64>) {
        let cut = self.points.partition_point(|p| p.0 <= gamma + 1e-12);
        if cut == 0 {
            // only reachable for gamma < 0
            return (f64::NEG_INFINITY, Vec::new());
        }
        let start = &self.points[self.prefix_best[cut - 1]];
        self.refine(gamma, start.2.clone())
    }

    fn refine(&self, gamma: f64, mut x: Vec<f64>) -> (f64, Vec<f64>) {
        let n = x.len();
        let mut best = guarantee(&self.matrix, &x);
        let mut step = 1e-3;
        while step >= REFINE_STEP {
            let mut improved = false;
            for i in 0..n {
                for j in 0..n {
                    if i == j || x[j] < step {
                        continue;
                    }
                    let mut y = x.clone();
                    y[i] += step;
                    y[j] -= step;
                    if entropy_of(y.iter().copied()) > gamma + 1e-12 {
                        continue;
                    }
                    let g = guarantee(&self.matrix, &y);
                    if g > best + 1e-15 {
                        best = g;
                        x = y;
                        improved = true;
                    }
                }
            }
            if !improved {
                step /= 2.0;
            }
        }
        (best, x)
    }
}

/// Least concave majorant of the points `(xs[k], ys[k])`, evaluated at every `xs[k]`.
/// `xs` must be strictly increasing.
pub fn upper_concave_envelope(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let hull = upper_hull(xs, ys);
    let mut out = Vec::with_capacity(xs.len());
    let mut seg = 0;
    for &x in xs {
        while seg + 1 < hull.len() - 1 && xs[hull[seg + 1]] < x {
            seg += 1;
        }
        if hull.len() == 1 {
            out.push(ys[hull[0]]);
            continue;
        }
        let (a, b) = (hull[seg], hull[seg + 1]);
        let t = (x - xs[a]) / (xs[b] - xs[a]);
        out.push(ys[a] + t * (ys[b] - ys[a]));
    }
    out
}

/// Indices of the upper convex hull vertices, left to right.
pub fn upper_hull(xs: &[f64], ys: &[f64]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::new();
    for k in 0..xs.len() {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b when it lies on or below the chord a-k
            let cross = (xs[b] - xs[a]) * (ys[k] - ys[a]) - (ys[b] - ys[a]) * (xs[k] - xs[a]);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(k);
    }
    hull
}

/// `U(gamma)` on a uniform grid over `[0, log2 |A|]` and its concavification.
pub fn guarantee_curve<T: Scalar>(game: &StageGame<T>, player: usize, grid_size: usize) -> Result<GuaranteeCurve> {
    if grid_size < 2 {
        return Err(Error::invalid(format!("grid needs at least 2 points, got {grid_size}")));
    }
    let search = GuaranteeSearch::new(game, player)?;
    let top = search.max_entropy;
    let gammas: Vec<f64> = (0..grid_size).map(|k| top * k as f64 / (grid_size - 1) as f64).collect();
    let mut values: Vec<f64> = gammas.iter().map(|&g| search.at(g).0).collect();
    // any witness for a smaller gamma stays feasible for larger ones
    for k in 1..values.len() {
        if values[k] < values[k - 1] {
            values[k] = values[k - 1];
        }
    }
    let cav_values = upper_concave_envelope(&gammas, &values);
    Ok(GuaranteeCurve { player, gammas, values, cav_values })
}

/// Lower estimate of how much the row player gains over the value against any
/// column strategy of entropy at most `gamma`: `-U_col(gamma) - v`.
///
/// The search minimum is reported; whether the underlying infimum is attained is
/// not decided here.
pub fn stage_exploit_floor<T: Scalar>(game: &StageGame<T>, gamma: f64) -> Result<f64> {
    let v = solve_zero_sum(game)?.value.to_f64_lossy();
    let search = GuaranteeSearch::new(game, 1)?;
    let (u_col, _) = search.at(gamma);
    Ok((-u_col - v).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::{binary_entropy, binary_entropy_inverse};
    use crate::game::matching_pennies;
    use crate::scalar::Rational;

    #[test]
    fn matching_pennies_endpoints() {
        let g = matching_pennies::<Rational>();
        let s = GuaranteeSearch::new(&g, 0).unwrap();
        assert_eq!(s.at(0.0).0, -1.0);
        assert_eq!(s.at(1.0).0, 0.0);
    }

    #[test]
    fn matching_pennies_matches_closed_form() {
        let c = guarantee_curve(&matching_pennies::<Rational>(), 0, 64).unwrap();
        for (k, &gamma) in c.gammas.iter().enumerate() {
            let oracle = 2.0 * binary_entropy_inverse(gamma).unwrap() - 1.0;
            assert!((c.values[k] - oracle).abs() < 1e-5, "gamma {gamma}: {} vs {oracle}", c.values[k]);
            assert!((c.cav_values[k] - (gamma - 1.0)).abs() < 1e-9);
            assert!(c.cav_values[k] >= c.values[k] - 1e-12);
        }
    }

    #[test]
    fn exploit_floor_examples() {
        let g = matching_pennies::<Rational>();
        assert_eq!(stage_exploit_floor(&g, 1.0).unwrap(), 0.0);
        assert_eq!(stage_exploit_floor(&g, 0.0).unwrap(), 1.0);
        let eps: f64 = 0.3;
        let oracle = 1.0 - 2.0 * binary_entropy_inverse(1.0 - eps).unwrap();
        assert!((stage_exploit_floor(&g, 1.0 - eps).unwrap() - oracle).abs() < 1e-5);
    }

    #[test]
    fn grid_size_guard() {
        assert!(guarantee_curve(&matching_pennies::<f64>(), 0, 1).is_err());
    }

    #[test]
    fn mp_convexity_inequality() {
        for k in 500..=1000 {
            let p = k as f64 / 1000.0;
            assert!(2.0 * p - 1.0 >= 1.0 - binary_entropy(p) - 1e-12);
        }
    }

    #[test]
    fn envelope_is_least_majorant() {
        let xs: Vec<f64> = (0..9).map(|k| k as f64).collect();
        let ys = vec![0.0, 2.0, 1.0, 1.5, 3.0, 0.0, 2.5, 2.0, 1.0];
        let cav = upper_concave_envelope(&xs, &ys);
        let hull = upper_hull(&xs, &ys);
        for k in 0..xs.len() {
            assert!(cav[k] >= ys[k] - 1e-12);
        }
        for k in 1..xs.len() - 1 {
            assert!(cav[k] >= 0.5 * (cav[k - 1] + cav[k + 1]) - 1e-12);
        }
        // removing any interior hull vertex breaks domination at that vertex
        for drop in 1..hull.len() - 1 {
            let keep: Vec<usize> = hull.iter().copied().filter(|&h| h != hull[drop]).collect();
            let (a, b) = (keep[drop - 1], keep[drop]);
            let x = xs[hull[drop]];
            let chord = ys[a] + (x - xs[a]) / (xs[b] - xs[a]) * (ys[b] - ys[a]);
            assert!(chord < ys[hull[drop]]);
        }
    }

    #[test]
    fn rps_curve_tops_out_at_value() {
        let r = |n: i64| Rational::from_ratio(n, 1);
        let g = StageGame::zero_sum(
            "rps",
            &["R", "P", "S"],
            &["R", "P", "S"],
            vec![vec![r(0), r(-1), r(1)], vec![r(1), r(0), r(-1)], vec![r(-1), r(1), r(0)]],
        )
        .unwrap();
        let c = guarantee_curve(&g, 0, 8).unwrap();
        assert_eq!(*c.values.last().unwrap(), 0.0);
        assert_eq!(c.values[0], -1.0);
        assert!(c.values.windows(2).all(|w| w[0] <= w[1]));
    }
}
