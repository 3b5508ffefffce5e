use crate::entropy::shannon_entropy;
use crate::error::{Error, Result};
use crate::game::{MixedStrategy, StageGame};
use crate::lp::solve_square;
use crate::scalar::Scalar;
use crate::solver::nash::enumerate_bimatrix_nash;
use crate::solver::zero_sum::solve_zero_sum;

/// Cap on the number of candidate bases examined during vertex enumeration.
pub const MAX_VERTEX_BASES: u64 = 2_000_000;

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Vertices of `{x >= 0, sum x = 1, (x^T m)_j >= value for all j}`.
///
/// Each vertex is the solution of `sum x = 1` together with `rows - 1` tight
/// inequalities; every such basis is tried.
pub fn optimal_face_vertices<T: Scalar>(m: &[Vec<T>], value: &T) -> Result<Vec<Vec<T>>> {
    let rows = m.len();
    let cols = m[0].len();
    let total = rows + cols;
    if binomial(total as u64, rows as u64 - 1) > MAX_VERTEX_BASES {
        return Err(Error::Resource(format!("vertex enumeration over a {rows}x{cols} matrix is too large")));
    }
    // constraint c < rows: x_c >= 0; otherwise column c - rows
    let coeffs = |c: usize| -> (Vec<T>, T) {
        if c < rows {
            ((0..rows).map(|i| if i == c { T::one() } else { T::zero() }).collect(), T::zero())
        } else {
            ((0..rows).map(|i| m[i][c - rows].clone()).collect(), value.clone())
        }
    };
    let feasible = |x: &[T]| {
        x.iter().all(|v| !v.lp_negative())
            && (0..cols).all(|j| {
                let e = (0..rows).fold(T::zero(), |acc, i| acc + x[i].clone() * m[i][j].clone());
                !(e.clone() - value.clone()).lp_negative()
            })
    };
    let mut vertices: Vec<Vec<T>> = Vec::new();
    let mut chosen = Vec::with_capacity(rows);
    fn rec<T: Scalar>(
        start: usize,
        need: usize,
        total: usize,
        chosen: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if chosen.len() == need {
            visit(chosen);
            return;
        }
        for c in start..total {
            chosen.push(c);
            rec::<T>(c + 1, need, total, chosen, visit);
            chosen.pop();
        }
    }
    let mut visit = |set: &[usize]| {
        let mut a = vec![vec![T::one(); rows]];
        let mut b = vec![T::one()];
        for &c in set {
            let (row, rhs) = coeffs(c);
            a.push(row);
            b.push(rhs);
        }
        if let Some(x) = solve_square(a, b) {
            if feasible(&x) && !vertices.iter().any(|v| v.iter().zip(&x).all(|(p, q)| p.approx_eq(q))) {
                vertices.push(x);
            }
        }
    };
    rec::<T>(0, rows - 1, total, &mut chosen, &mut visit);
    Ok(vertices)
}

/// The minimal entropy of a minmax strategy of `player` in a zero-sum game, with a witness.
///
/// Entropy is concave, so its minimum over the polytope of optimal strategies is
/// attained at a vertex; all vertices are enumerated and the first minimiser kept.
pub fn min_entropy_minmax<T: Scalar>(game: &StageGame<T>, player: usize) -> Result<(f64, MixedStrategy<T>)> {
    let sol = solve_zero_sum(game)?;
    let value = if player == 0 { sol.value.clone() } else { -sol.value.clone() };
    let m = game.own_matrix(player)?;
    let mut best: Option<(f64, MixedStrategy<T>)> = None;
    for v in optimal_face_vertices(&m, &value)? {
        let s = MixedStrategy::new(player, v)?;
        let h = shannon_entropy(&s);
        if best.as_ref().is_none_or(|(b, _)| h < *b - 1e-12) {
            best = Some((h, s));
        }
    }
    best.ok_or_else(|| Error::Internal("optimal face has no vertex".into()))
}

/// Minimal entropy of `player`'s strategy over the enumerated stage equilibria.
///
/// For games where every equilibrium pays the minmax profile this is the per-stage
/// entropy floor of that player. Only vertex equilibria are listed, which suffices
/// because entropy is concave along equilibrium components.
pub fn min_entropy_nash<T: Scalar>(game: &StageGame<T>, player: usize) -> Result<f64> {
    if game.is_zero_sum() {
        return Ok(min_entropy_minmax(game, player)?.0);
    }
    enumerate_bimatrix_nash(game)?
        .equilibria
        .iter()
        .map(|e| shannon_entropy(&e.profile[player]))
        .fold(None, |acc: Option<f64>, h| Some(acc.map_or(h, |a| a.min(h))))
        .ok_or_else(|| Error::Internal("no equilibrium found".into()))
}
