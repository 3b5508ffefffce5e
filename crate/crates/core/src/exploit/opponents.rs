//! Families of seeded programs for two-action games.

use rand::Rng;

use crate::engine::SeededStrategy;
use crate::error::{Error, Result};
use crate::game::StageGame;
use crate::scalar::Scalar;

fn require_two_actions<T: Scalar>(game: &StageGame<T>, owner: usize) -> Result<()> {
    if game.num_players() != 2 || game.num_actions(owner) != 2 {
        return Err(Error::domain("binary programs need a two-player game with two actions for the owner"));
    }
    Ok(())
}

/// One seed bit chooses a constant action.
pub fn constant_by_seed<T: Scalar>(game: &StageGame<T>, owner: usize, n: usize) -> Result<SeededStrategy<T>> {
    require_two_actions(game, owner)?;
    SeededStrategy::from_fn(game, owner, n, 1, 0, |_, _, seed| seed as usize)
}

/// Stage `t` plays bit `t mod bits` of the seed.
pub fn seed_bit_cycle<T: Scalar>(game: &StageGame<T>, owner: usize, n: usize, bits: u32) -> Result<SeededStrategy<T>> {
    require_two_actions(game, owner)?;
    if bits == 0 {
        return Err(Error::invalid("seed_bit_cycle needs at least one bit"));
    }
    SeededStrategy::from_fn(game, owner, n, bits, 0, |t, _, seed| ((seed >> (t as u32 % bits)) & 1) as usize)
}

/// Stage `t` plays bit `t mod bits` of the seed (0 when `bits` is 0), flipped on
/// odd stages when `alternating` and flipped always when `invert`.
pub fn pattern_program<T: Scalar>(
    game: &StageGame<T>,
    owner: usize,
    n: usize,
    bits: u32,
    alternating: bool,
    invert: bool,
) -> Result<SeededStrategy<T>> {
    require_two_actions(game, owner)?;
    SeededStrategy::from_fn(game, owner, n, bits, 0, |t, _, seed| {
        let base = if bits == 0 { 0 } else { (seed >> (t as u32 % bits)) & 1 };
        (base ^ (alternating as u32 & t as u32) ^ invert as u32) as usize
    })
}

/// The sixteen constant and alternating programs: every combination of
/// alternation, inversion and seed length 0, 1, 2 or 4.
pub fn pattern_programs<T: Scalar>(game: &StageGame<T>, owner: usize, n: usize) -> Result<Vec<SeededStrategy<T>>> {
    let mut out = Vec::with_capacity(16);
    for alternating in [false, true] {
        for invert in [false, true] {
            for bits in [0, 1, 2, 4] {
                out.push(pattern_program(game, owner, n, bits, alternating, invert)?);
            }
        }
    }
    Ok(out)
}

/// Number of members of [`reactive_program`]'s family.
pub const REACTIVE_FAMILY_SIZE: u32 = 1 << 12;

/// A two-seed-bit program reacting to the opponent's last action.
///
/// Stage 0 plays action 0. Stage `t >= 1` reads bit `(t-1)*4 + 2*prev + b` of
/// `index`, where `prev` is the opponent's previous action and `b` is seed bit
/// `(t-1) mod 2`. Horizons up to 4 use distinct bits.
pub fn reactive_program<T: Scalar>(game: &StageGame<T>, owner: usize, n: usize, index: u32) -> Result<SeededStrategy<T>> {
    require_two_actions(game, owner)?;
    if game.num_actions(1 - owner) != 2 {
        return Err(Error::domain("reactive programs need a two-action opponent"));
    }
    if index >= REACTIVE_FAMILY_SIZE {
        return Err(Error::invalid(format!("family index {index} out of range")));
    }
    SeededStrategy::from_fn(game, owner, n, 2, 1, |t, ctx, seed| {
        if t == 0 {
            return 0;
        }
        let prev = ctx.last().copied().unwrap_or(0);
        let b = (seed >> ((t - 1) % 2)) & 1;
        let bit = (((t - 1) * 4 + 2 * prev + b as usize) % 12) as u32;
        ((index >> bit) & 1) as usize
    })
}

/// A uniformly random decision table.
pub fn random_program<T: Scalar, R: Rng>(
    game: &StageGame<T>,
    owner: usize,
    n: usize,
    seed_bits: u32,
    recall: usize,
    rng: &mut R,
) -> Result<SeededStrategy<T>> {
    let m = game.num_actions(owner);
    SeededStrategy::from_fn(game, owner, n, seed_bits, recall, |_, _, _| rng.gen_range(0..m))
}
