use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::game::{PayoffProfile, Profile, StageGame};
use crate::lp::{LinearProgram, LpOutcome};
use crate::scalar::{convert, Rational, Scalar};
use crate::solver::zero_sum::minmax_profile;

/// A payoff profile written as a rational mixture of pure profiles.
#[derive(Clone, Debug, PartialEq)]
pub struct FeasibleDecomposition {
    /// Profiles with positive weight, in lexicographic order.
    pub weights: Vec<(Profile, Rational)>,
    /// Least common denominator of the weights.
    pub denominator: u64,
}

impl FeasibleDecomposition {
    /// Integer multiplicities `alpha_a * K`, summing to `K`.
    pub fn counts(&self) -> Vec<(Profile, u64)> {
        let k = Rational::from_integer(self.denominator.into());
        self.weights
            .iter()
            .map(|(p, w)| {
                let c = (w.clone() * k.clone()).to_integer().to_u64().expect("count fits u64");
                (p.clone(), c)
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FeasibilityVerdict {
    Feasible(FeasibleDecomposition),
    /// No mixture of pure profiles pays the target.
    Infeasible,
    /// The target falls below `player`'s minmax level `minmax`.
    NotIndividuallyRational { player: usize, minmax: Rational },
}

impl FeasibilityVerdict {
    pub fn decomposition(&self) -> Option<&FeasibleDecomposition> {
        match self {
            FeasibilityVerdict::Feasible(d) => Some(d),
            _ => None,
        }
    }
}

/// Feasibility and individual rationality of `target` in a two-player game.
pub fn check_feasible_ir<T: Scalar>(game: &StageGame<T>, target: &PayoffProfile<T>) -> Result<FeasibilityVerdict> {
    let minmax = minmax_profile(&game.convert::<Rational>())?;
    check_feasible_ir_with(game, target, &minmax.0)
}

/// As [`check_feasible_ir`] with the minmax levels supplied by the caller (any number of players).
pub fn check_feasible_ir_with<T: Scalar>(
    game: &StageGame<T>,
    target: &PayoffProfile<T>,
    minmax: &[Rational],
) -> Result<FeasibilityVerdict> {
    let k = game.num_players();
    if target.len() != k || minmax.len() != k {
        return Err(Error::invalid(format!("expected {k} payoff entries")));
    }
    let p: Vec<Rational> = target.values().iter().map(convert).collect();
    for i in 0..k {
        if p[i] < minmax[i] {
            return Ok(FeasibilityVerdict::NotIndividuallyRational { player: i, minmax: minmax[i].clone() });
        }
    }
    let g = game.convert::<Rational>();
    let profiles: Vec<Profile> = g.profiles().collect();
    // sum alpha = 1 and sum alpha_a u_i(a) = p_i
    let mut a = vec![vec![Rational::from_ratio(1, 1); profiles.len()]];
    let mut b = vec![Rational::from_ratio(1, 1)];
    for i in 0..k {
        a.push(profiles.iter().map(|q| g.payoff(q, i).clone()).collect());
        b.push(p[i].clone());
    }
    let lp = LinearProgram { a, b, c: vec![Rational::zero(); profiles.len()] };
    let sol = match lp.solve() {
        LpOutcome::Optimal(s) => s,
        LpOutcome::Infeasible => return Ok(FeasibilityVerdict::Infeasible),
        LpOutcome::Unbounded => return Err(Error::Internal("feasibility LP unbounded".into())),
    };
    let weights: Vec<(Profile, Rational)> =
        profiles.into_iter().zip(sol.x).filter(|(_, w)| !w.is_zero()).collect();
    let denominator = weights
        .iter()
        .fold(num_bigint::BigInt::from(1), |acc, (_, w)| acc.lcm(w.denom()))
        .to_u64()
        .ok_or_else(|| Error::Resource("decomposition denominator exceeds u64".into()))?;
    Ok(FeasibilityVerdict::Feasible(FeasibleDecomposition { weights, denominator }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{matching_pennies, mp_punishment};

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn target(xs: &[(i64, i64)]) -> PayoffProfile<Rational> {
        PayoffProfile(xs.iter().map(|&(n, d)| r(n, d)).collect())
    }

    fn recombine(g: &StageGame<Rational>, d: &FeasibleDecomposition) -> Vec<Rational> {
        (0..2)
            .map(|i| d.weights.iter().fold(r(0, 1), |acc, (p, w)| acc + w.clone() * g.payoff(p, i).clone()))
            .collect()
    }

    #[test]
    fn cooperative_target() {
        let g = mp_punishment::<Rational>();
        let v = check_feasible_ir(&g, &target(&[(3, 1), (3, 1)])).unwrap();
        let d = v.decomposition().unwrap();
        assert_eq!(d.weights, vec![(vec![0, 0], r(1, 1))]);
        assert_eq!(d.denominator, 1);
        assert_eq!(d.counts(), vec![(vec![0, 0], 1)]);
    }

    #[test]
    fn matching_pennies_zero() {
        let g = matching_pennies::<Rational>();
        let v = check_feasible_ir(&g, &target(&[(0, 1), (0, 1)])).unwrap();
        let d = v.decomposition().unwrap();
        assert_eq!(recombine(&g, d), vec![r(0, 1), r(0, 1)]);
        let total: u64 = d.counts().iter().map(|(_, c)| c).sum();
        assert_eq!(total, d.denominator);
    }

    #[test]
    fn below_minmax_rejected() {
        let g = mp_punishment::<Rational>();
        assert_eq!(
            check_feasible_ir(&g, &target(&[(-4, 1), (-4, 1)])).unwrap(),
            FeasibilityVerdict::NotIndividuallyRational { player: 0, minmax: r(-3, 1) }
        );
    }

    #[test]
    fn outside_hull_is_infeasible() {
        let g = mp_punishment::<Rational>();
        assert_eq!(check_feasible_ir(&g, &target(&[(5, 1), (5, 1)])).unwrap(), FeasibilityVerdict::Infeasible);
    }

    #[test]
    fn fractional_target_has_least_denominator() {
        let g = mp_punishment::<Rational>();
        // (3,3) and (6,-3) mixed 2:1
        let v = check_feasible_ir(&g, &target(&[(4, 1), (1, 1)])).unwrap();
        let d = v.decomposition().unwrap();
        assert_eq!(recombine(&g, d), vec![r(4, 1), r(1, 1)]);
        let lcm = d.weights.iter().fold(num_bigint::BigInt::from(1), |acc, (_, w)| acc.lcm(w.denom()));
        assert_eq!(num_bigint::BigInt::from(d.denominator), lcm);
    }
}
