//! Seeded programs: deterministic decision tables driven by a short random seed.

use crate::error::{Error, Result};
use crate::game::{MixedStrategy, StageGame};
use crate::scalar::Scalar;

/// Largest supported seed length in bits.
pub const MAX_SEED_BITS: u32 = 16;

/// Cap on decision-table entries.
pub const MAX_TABLE_ENTRIES: usize = 1 << 25;

#[derive(Clone, Debug, PartialEq)]
pub enum SeedPrior<T> {
    Uniform,
    /// Point mass on one seed.
    Fixed(u32),
    /// Arbitrary weights, one per seed, summing to one.
    Weights(Vec<T>),
}

/// A program `(stage, context, seed) -> action` stored as a dense table.
///
/// The context is the last `recall` joint actions of the other players; stages
/// before the start of play pad it with a blank symbol. The owner's own past
/// actions are a function of the seed and this context, so they are not stored.
#[derive(Clone, Debug, PartialEq)]
pub struct SeededStrategy<T> {
    owner: usize,
    horizon: usize,
    seed_bits: u32,
    recall: usize,
    num_actions: usize,
    action_counts: Vec<usize>,
    table: Vec<u8>,
    prior: SeedPrior<T>,
}

/// Seed-conditioned state: the seeds consistent with the owner's past actions
/// and the encoded context.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SeedState {
    pub seeds: Vec<u32>,
    pub context: usize,
}

impl<T: Scalar> SeededStrategy<T> {
    /// Fills the table from `program(stage, context, seed)`, where `context`
    /// lists the others' joint action indices, oldest first.
    pub fn from_fn(
        game: &StageGame<T>,
        owner: usize,
        horizon: usize,
        seed_bits: u32,
        recall: usize,
        mut program: impl FnMut(usize, &[usize], u32) -> usize,
    ) -> Result<Self> {
        let mut s = Self::empty(game, owner, horizon, seed_bits, recall)?;
        let base = s.context_base();
        let mut decoded = Vec::with_capacity(recall);
        for stage in 0..horizon {
            for ctx in 0..s.context_count() {
                decoded.clear();
                let mut c = ctx;
                for _ in 0..recall {
                    if c % base != 0 {
                        decoded.push(c % base - 1);
                    }
                    c /= base;
                }
                decoded.reverse();
                for seed in 0..s.seed_count() {
                    let a = program(stage, &decoded, seed);
                    if a >= s.num_actions {
                        return Err(Error::invalid(format!("program chose action {a} for player {owner}")));
                    }
                    let i = s.index(stage, ctx, seed);
                    s.table[i] = a as u8;
                }
            }
        }
        Ok(s)
    }

    /// Wraps a raw table laid out as `((stage * contexts) + context) * 2^s + seed`.
    pub fn from_table(
        game: &StageGame<T>,
        owner: usize,
        horizon: usize,
        seed_bits: u32,
        recall: usize,
        table: Vec<u8>,
    ) -> Result<Self> {
        let mut s = Self::empty(game, owner, horizon, seed_bits, recall)?;
        if table.len() != s.table.len() {
            return Err(Error::invalid(format!(
                "decision table has {} entries, expected {}",
                table.len(),
                s.table.len()
            )));
        }
        if let Some(a) = table.iter().find(|&&a| a as usize >= s.num_actions) {
            return Err(Error::invalid(format!("decision table names action {a}")));
        }
        s.table = table;
        Ok(s)
    }

    fn empty(game: &StageGame<T>, owner: usize, horizon: usize, seed_bits: u32, recall: usize) -> Result<Self> {
        if owner >= game.num_players() {
            return Err(Error::invalid(format!("no player {owner}")));
        }
        if seed_bits > MAX_SEED_BITS {
            return Err(Error::Resource(format!("seed length {seed_bits} exceeds {MAX_SEED_BITS} bits")));
        }
        let action_counts = game.action_counts();
        let others: usize = (0..game.num_players()).filter(|&i| i != owner).map(|i| action_counts[i]).product();
        let contexts = (others + 1).checked_pow(recall as u32).unwrap_or(usize::MAX);
        let entries = horizon
            .checked_mul(contexts)
            .and_then(|x| x.checked_mul(1usize << seed_bits))
            .filter(|&x| x <= MAX_TABLE_ENTRIES)
            .ok_or_else(|| Error::Resource("decision table too large".into()))?;
        Ok(SeededStrategy {
            owner,
            horizon,
            seed_bits,
            recall,
            num_actions: action_counts[owner],
            action_counts,
            table: vec![0; entries],
            prior: SeedPrior::Uniform,
        })
    }

    pub fn with_prior(mut self, prior: SeedPrior<T>) -> Result<Self> {
        match &prior {
            SeedPrior::Uniform => {}
            SeedPrior::Fixed(seed) => {
                if *seed >= self.seed_count() {
                    return Err(Error::invalid(format!("seed {seed} outside {} bits", self.seed_bits)));
                }
            }
            SeedPrior::Weights(w) => {
                if w.len() != self.seed_count() as usize {
                    return Err(Error::invalid("one prior weight per seed required"));
                }
                MixedStrategy::new(self.owner, w.clone())?;
            }
        }
        self.prior = prior;
        Ok(self)
    }

    /// The same program with its seed fixed.
    pub fn with_seed(&self, seed: u32) -> Result<Self> {
        self.clone().with_prior(SeedPrior::Fixed(seed))
    }

    pub fn owner(&self) -> usize {
        self.owner
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn seed_bits(&self) -> u32 {
        self.seed_bits
    }

    pub fn recall(&self) -> usize {
        self.recall
    }

    pub fn prior(&self) -> &SeedPrior<T> {
        &self.prior
    }

    pub fn table(&self) -> &[u8] {
        &self.table
    }

    pub fn action_counts(&self) -> &[usize] {
        &self.action_counts
    }

    pub fn seed_count(&self) -> u32 {
        1 << self.seed_bits
    }

    fn context_base(&self) -> usize {
        (0..self.action_counts.len())
            .filter(|&i| i != self.owner)
            .map(|i| self.action_counts[i])
            .product::<usize>()
            + 1
    }

    pub fn context_count(&self) -> usize {
        self.context_base().pow(self.recall as u32)
    }

    fn index(&self, stage: usize, context: usize, seed: u32) -> usize {
        ((stage * self.context_count() + context) << self.seed_bits) | seed as usize
    }

    /// The program's action; stages past the horizon replay the last stage.
    pub fn action(&self, stage: usize, context: usize, seed: u32) -> usize {
        let stage = stage.min(self.horizon.saturating_sub(1));
        self.table[self.index(stage, context, seed)] as usize
    }

    /// Joint index of the other players' actions in `profile`.
    pub fn others_index(&self, profile: &[usize]) -> usize {
        let mut idx = 0;
        for (i, &a) in profile.iter().enumerate() {
            if i != self.owner {
                idx = idx * self.action_counts[i] + a;
            }
        }
        idx
    }

    /// Context after observing `profile`.
    pub fn next_context(&self, context: usize, profile: &[usize]) -> usize {
        if self.recall == 0 {
            return 0;
        }
        let base = self.context_base();
        let window = self.context_count();
        (context * base + self.others_index(profile) + 1) % window
    }

    pub fn weight(&self, seed: u32) -> T {
        match &self.prior {
            SeedPrior::Uniform => T::one(),
            SeedPrior::Fixed(s) => {
                if *s == seed {
                    T::one()
                } else {
                    T::zero()
                }
            }
            SeedPrior::Weights(w) => w[seed as usize].clone(),
        }
    }

    pub fn initial_state(&self) -> SeedState {
        let seeds = match &self.prior {
            SeedPrior::Fixed(s) => vec![*s],
            SeedPrior::Uniform => (0..self.seed_count()).collect(),
            SeedPrior::Weights(w) => (0..self.seed_count()).filter(|&s| !w[s as usize].is_zero()).collect(),
        };
        SeedState { seeds, context: 0 }
    }

    /// Action distribution at `state`: the prior conditioned on the surviving seeds.
    pub fn distribution(&self, state: &SeedState, stage: usize) -> MixedStrategy<T> {
        let mut mass = vec![T::zero(); self.num_actions];
        let mut total = T::zero();
        for &seed in &state.seeds {
            let w = self.weight(seed);
            let a = self.action(stage, state.context, seed);
            mass[a] = mass[a].clone() + w.clone();
            total = total + w;
        }
        for m in mass.iter_mut() {
            *m = m.clone() / total.clone();
        }
        MixedStrategy::raw(self.owner, mass)
    }

    /// Conditions on the owner's realised action. An action no surviving seed
    /// plays leaves the seed set unchanged.
    pub fn advance(&self, state: &SeedState, stage: usize, profile: &[usize]) -> SeedState {
        let own = profile[self.owner];
        let seeds: Vec<u32> =
            state.seeds.iter().copied().filter(|&s| self.action(stage, state.context, s) == own).collect();
        SeedState {
            seeds: if seeds.is_empty() { state.seeds.clone() } else { seeds },
            context: self.next_context(state.context, profile),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::matching_pennies;
    use crate::scalar::Rational;

    fn half() -> Rational {
        Rational::from_ratio(1, 2)
    }

    #[test]
    fn constant_by_seed_conditions_on_own_action() {
        let g = matching_pennies::<Rational>();
        let s = SeededStrategy::from_fn(&g, 1, 3, 1, 0, |_, _, seed| seed as usize).unwrap();
        let st = s.initial_state();
        assert_eq!(s.distribution(&st, 0).probs(), &[half(), half()]);
        let after = s.advance(&st, 0, &[0, 1]);
        assert_eq!(after.seeds, vec![1]);
        assert_eq!(s.distribution(&after, 1).as_pure(), Some(1));
    }

    #[test]
    fn context_tracks_opponent() {
        let g = matching_pennies::<Rational>();
        // copy the opponent's previous action, H at the start
        let s = SeededStrategy::from_fn(&g, 1, 4, 0, 1, |_, ctx, _| ctx.last().copied().unwrap_or(0)).unwrap();
        let mut st = s.initial_state();
        assert_eq!(s.distribution(&st, 0).as_pure(), Some(0));
        st = s.advance(&st, 0, &[1, 0]);
        assert_eq!(s.distribution(&st, 1).as_pure(), Some(1));
        st = s.advance(&st, 1, &[0, 1]);
        assert_eq!(s.distribution(&st, 2).as_pure(), Some(0));
    }

    #[test]
    fn fixed_prior_is_deterministic() {
        let g = matching_pennies::<Rational>();
        let s = SeededStrategy::from_fn(&g, 0, 2, 2, 0, |t, _, seed| ((seed >> t) & 1) as usize).unwrap();
        let f = s.with_seed(2).unwrap();
        let st = f.initial_state();
        assert_eq!(f.distribution(&st, 0).as_pure(), Some(0));
        assert_eq!(f.distribution(&st, 1).as_pure(), Some(1));
    }

    #[test]
    fn guards() {
        let g = matching_pennies::<Rational>();
        assert!(matches!(SeededStrategy::from_fn(&g, 0, 2, 17, 0, |_, _, _| 0), Err(Error::Resource(_))));
        assert!(SeededStrategy::from_fn(&g, 0, 2, 1, 0, |_, _, _| 2).is_err());
        assert!(SeededStrategy::from_table(&g, 0, 2, 1, 0, vec![0; 3]).is_err());
    }
}
