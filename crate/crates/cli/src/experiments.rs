//! The experiment catalog. Every experiment is deterministic given its spec.

use anyhow::{bail, Context, Result};
use rand::seq::index::sample;

use lowrand::construct::{folk_equilibrium, mp_epsnash, zerosum_epsnash, FolkOptions};
use lowrand::engine::{playout_rng, strategy_entropy, BehavioralStrategy, SeededStrategy};
use lowrand::entropy::binary_entropy_inverse;
use lowrand::exploit::opponents::{pattern_programs, random_program, reactive_program, seed_bit_cycle, REACTIVE_FAMILY_SIZE};
use lowrand::exploit::{seed_learner_runs, seed_learner_strategy, LearnerMode};
use lowrand::game::{example_games, matching_pennies};
use lowrand::solver::{enumerate_bimatrix_nash, guarantee_curve, min_entropy_nash, minmax_profile, solve_zero_sum};
use lowrand::verify::{best_response_value, certify, mp_potential_trace};
use lowrand::{MixedStrategy, PayoffProfile, Rational, Scalar, StageGame};

use crate::load_game;
use crate::output::{fmt_float, fmt_scalar, Table};

/// Names and one-line descriptions of the catalog.
pub const EXPERIMENTS: &[(&str, &str)] = &[
    ("stage-solutions", "minmax levels, minimal equilibrium entropy and equilibrium counts of the example games"),
    ("mp-tradeoff", "entropy and exploitability of the eps-Nash matching pennies profiles"),
    ("mp-one-bit", "every one-bit seeded matching pennies opponent at n = 3 against the exact best response"),
    ("zerosum-eps", "exploitability of the zero-sum eps-Nash construction against its bound"),
    ("folk-entropy", "certified folk equilibria and their effective entropy across horizons"),
    ("exploit-floor", "best response against low-entropy seeded opponents versus 1 - H/n"),
    ("seed-learner", "per-seed payoff of the seed learner against the cycling benchmark"),
    ("cavU", "entropy-constrained guarantee curve of matching pennies and its concavification"),
    ("potential", "per-stage potential increments against random seeded opponents"),
];

/// Inputs to one experiment; `None` fields take the experiment's defaults.
#[derive(Clone, Debug, Default)]
pub struct ExperimentSpec {
    pub name: String,
    pub game: Option<String>,
    pub horizons: Option<Vec<usize>>,
    pub eps: Option<Vec<Rational>>,
    pub seed: u64,
    pub target: Option<Vec<Rational>>,
    /// Grid size, sample count or seed length, depending on the experiment.
    pub size: Option<usize>,
}

impl ExperimentSpec {
    pub fn named(name: &str) -> Self {
        ExperimentSpec { name: name.into(), ..Default::default() }
    }

    fn horizons(&self, default: &[usize]) -> Vec<usize> {
        self.horizons.clone().unwrap_or_else(|| default.to_vec())
    }

    fn eps(&self, default: &[(i64, i64)]) -> Vec<Rational> {
        self.eps.clone().unwrap_or_else(|| default.iter().map(|&(p, q)| Rational::from_ratio(p, q)).collect())
    }

    fn game(&self, default: &str) -> Result<StageGame<Rational>> {
        load_game(self.game.as_deref().unwrap_or(default))
    }
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<Table> {
    match spec.name.as_str() {
        "stage-solutions" => stage_solutions(spec),
        "mp-tradeoff" => mp_tradeoff(spec),
        "mp-one-bit" => mp_one_bit(spec),
        "zerosum-eps" => zerosum_eps(spec),
        "folk-entropy" => folk_entropy(spec),
        "exploit-floor" => exploit_floor(spec),
        "seed-learner" => seed_learner(spec),
        "cavU" => cav_u(spec),
        "potential" => potential(spec),
        other => {
            let names: Vec<&str> = EXPERIMENTS.iter().map(|(n, _)| *n).collect();
            bail!("unknown experiment {other:?}; available: {}", names.join(", "))
        }
    }
}

fn r(p: i64, q: i64) -> Rational {
    Rational::from_ratio(p, q)
}

fn rn(n: usize) -> Rational {
    Rational::from_count(n)
}

fn max_of(xs: &[Rational]) -> Rational {
    xs.iter().fold(r(0, 1), |a, x| if *x > a { x.clone() } else { a })
}

fn max_f(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(0.0, f64::max)
}

fn b(x: bool) -> String {
    x.to_string()
}

fn uniform_row(game: &StageGame<Rational>) -> BehavioralStrategy<Rational> {
    BehavioralStrategy::stationary(0, MixedStrategy::uniform(0, game.num_actions(0)))
}

fn stage_solutions(spec: &ExperimentSpec) -> Result<Table> {
    let games = match &spec.game {
        Some(g) => vec![load_game(g)?],
        None => example_games::<Rational>(),
    };
    let mut t = Table::new("stage-solutions", &["game", "player", "minmax", "zero_sum_value", "beta", "nash_equilibria", "degenerate"]);
    for g in &games {
        let mm = minmax_profile(g)?;
        let value = if g.is_zero_sum() { solve_zero_sum(g)?.value.format_scalar() } else { String::new() };
        let nash = enumerate_bimatrix_nash(g)?;
        for i in 0..g.num_players() {
            t.push(vec![
                g.name().into(),
                i.to_string(),
                mm.0[i].format_scalar(),
                value.clone(),
                fmt_float(min_entropy_nash(g, i)?),
                nash.equilibria.len().to_string(),
                b(nash.degenerate),
            ]);
        }
    }
    Ok(t)
}

fn mp_tradeoff(spec: &ExperimentSpec) -> Result<Table> {
    let g = matching_pennies::<Rational>();
    let mut t = Table::new(
        "mp-tradeoff",
        &["n", "eps", "entropy", "entropy_bound", "exploitability", "exploitability_bound", "holds"],
    );
    for n in spec.horizons(&[4, 6, 8]) {
        for eps in spec.eps(&[(0, 1), (1, 4), (1, 2)]) {
            let profile = mp_epsnash(n, &eps)?;
            let rep = certify(&g, n, &profile, None)?;
            let entropy = max_f(&rep.entropy);
            let entropy_bound = ((r(1, 1) - eps.clone()) * rn(n)).to_f64_lossy();
            let exploit = max_of(&rep.exploitability);
            let bound = eps.clone() + r(2, n as i64);
            let holds = entropy <= entropy_bound + 1e-9 && exploit <= bound;
            t.push(vec![
                n.to_string(),
                eps.format_scalar(),
                fmt_float(entropy),
                fmt_float(entropy_bound),
                exploit.format_scalar(),
                bound.format_scalar(),
                b(holds),
            ]);
        }
    }
    Ok(t)
}

/// The 64 one-bit, memoryless programs of length 3: bit `2t + seed` of the index.
pub fn one_bit_programs(game: &StageGame<Rational>) -> Result<Vec<SeededStrategy<Rational>>> {
    (0u32..64)
        .map(|idx| Ok(SeededStrategy::from_fn(game, 1, 3, 1, 0, |t, _, seed| ((idx >> (2 * t as u32 + seed)) & 1) as usize)?))
        .collect()
}

fn mp_one_bit(_spec: &ExperimentSpec) -> Result<Table> {
    let g = matching_pennies::<Rational>();
    let n = 3;
    let mut t = Table::new("mp-one-bit", &["program", "entropy", "best_response", "floor", "holds"]);
    for (idx, prog) in one_bit_programs(&g)?.into_iter().enumerate() {
        let col = BehavioralStrategy::seeded(prog);
        let h = strategy_entropy(&g, n, &col)?;
        let br = best_response_value(&g, n, &[uniform_row(&g), col], 0)?.value;
        // entropy is 0 or 1 here, so the floor is exact
        let floor = r(1, 1) - r(h.round() as i64, n as i64);
        t.push(vec![idx.to_string(), fmt_float(h), br.format_scalar(), floor.format_scalar(), b(br == floor)]);
    }
    Ok(t)
}

/// The skewed 2x2 zero-sum game `[[3, -1], [-2, 2]]`.
pub fn skew_game() -> StageGame<Rational> {
    StageGame::zero_sum("skew", &["a", "b"], &["x", "y"], vec![vec![r(3, 1), r(-1, 1)], vec![r(-2, 1), r(2, 1)]])
        .expect("static game")
}

fn zerosum_eps(spec: &ExperimentSpec) -> Result<Table> {
    let games = match &spec.game {
        Some(g) => vec![load_game(g)?],
        None => vec![matching_pennies::<Rational>(), skew_game()],
    };
    let mut t = Table::new("zerosum-eps", &["game", "n", "eps", "exploitability", "bound", "holds"]);
    for g in &games {
        let (hi, lo) = (g.max_payoff(0), g.min_payoff(0));
        let c = (hi - lo) / r(2, 1);
        for n in spec.horizons(&[4, 6]) {
            for eps in spec.eps(&[(1, 4), (1, 2)]) {
                let profile = zerosum_epsnash(g, n, &eps)?;
                let rep = certify(g, n, &profile, None)?;
                let exploit = max_of(&rep.exploitability);
                let tail = (rn(n) * eps.clone()).ceil().to_integer();
                let bound = c.clone() * (Rational::from_integer(tail) + r(1, 1)) / rn(n);
                t.push(vec![
                    g.name().into(),
                    n.to_string(),
                    eps.format_scalar(),
                    exploit.format_scalar(),
                    bound.format_scalar(),
                    b(exploit <= bound),
                ]);
            }
        }
    }
    Ok(t)
}

fn folk_entropy(spec: &ExperimentSpec) -> Result<Table> {
    let g = spec.game("mp-punishment")?;
    let target = PayoffProfile(spec.target.clone().unwrap_or_else(|| vec![r(3, 1); g.num_players()]));
    let mut t = Table::new(
        "folk-entropy",
        &["n", "payoff", "exploitability", "effective_entropy", "entropy", "tail_length", "denominator", "holds"],
    );
    let mut effective = Vec::new();
    for n in spec.horizons(&[5, 9, 13]) {
        let (profile, plan) = folk_equilibrium(&g, n, &target, FolkOptions::default())?;
        let rep = certify(&g, n, &profile, None)?;
        let exploit = max_of(&rep.exploitability);
        let eff = max_f(&rep.effective_entropy);
        effective.push(eff);
        let payoff: Vec<String> = rep.payoff.iter().map(|x| x.format_scalar()).collect();
        t.push(vec![
            n.to_string(),
            payoff.join(" "),
            exploit.format_scalar(),
            fmt_float(eff),
            fmt_float(max_f(&rep.entropy)),
            plan.tail_length.to_string(),
            plan.denominator.to_string(),
            b(exploit == r(0, 1)),
        ]);
    }
    let constant = effective.windows(2).all(|w| w[0] == w[1]);
    t.check("effective entropy constant in n", constant);
    Ok(t)
}

fn exploit_floor(spec: &ExperimentSpec) -> Result<Table> {
    let g = matching_pennies::<Rational>();
    let n = spec.horizons(&[4])[0];
    let mut t = Table::new("exploit-floor", &["family", "program", "seed_bits", "entropy", "best_response", "floor", "holds"]);
    let mut programs: Vec<(String, usize, SeededStrategy<Rational>)> = Vec::new();
    for (k, p) in pattern_programs(&g, 1, n)?.into_iter().enumerate() {
        programs.push(("pattern".into(), k, p));
    }
    // all reactive programs unless a sample size is given
    let indices: Vec<u32> = match spec.size {
        Some(k) => {
            let mut rng = playout_rng(spec.seed, 0);
            let mut v: Vec<u32> = sample(&mut rng, REACTIVE_FAMILY_SIZE as usize, k).into_iter().map(|i| i as u32).collect();
            v.sort_unstable();
            v
        }
        None => (0..REACTIVE_FAMILY_SIZE).collect(),
    };
    for i in indices {
        programs.push(("reactive".into(), i as usize, reactive_program(&g, 1, n, i)?));
    }
    for (family, idx, prog) in programs {
        let bits = prog.seed_bits();
        let col = BehavioralStrategy::seeded(prog);
        let h = strategy_entropy(&g, n, &col)?;
        let br = best_response_value(&g, n, &[uniform_row(&g), col], 0)?.value.to_f64_lossy();
        let floor = 1.0 - h / n as f64;
        t.push(vec![
            family,
            idx.to_string(),
            bits.to_string(),
            fmt_float(h),
            fmt_float(br),
            fmt_float(floor),
            b(br >= floor - 1e-9),
        ]);
    }
    Ok(t)
}

fn seed_learner(spec: &ExperimentSpec) -> Result<Table> {
    let g = matching_pennies::<Rational>();
    let n = spec.horizons(&[10])[0];
    let bits = spec.size.unwrap_or(4) as u32;
    let opp = seed_bit_cycle(&g, 1, n, bits)?;
    let learner = seed_learner_strategy(&g, n, 0, &opp, r(0, 1), LearnerMode::Continual)?;
    let runs = seed_learner_runs(&g, n, &learner, &opp)?;
    let value = solve_zero_sum(&g)?.value;
    let mut t = Table::new("seed-learner", &["seed", "payoff", "payoff_float", "value", "emission_stage", "holds"]);
    let mut total = r(0, 1);
    for run in &runs {
        total += run.payoff.clone();
        t.push(vec![
            run.seed.to_string(),
            run.payoff.format_scalar(),
            fmt_float(run.payoff.to_f64_lossy()),
            value.format_scalar(),
            run.emission_stage.map_or_else(|| "none".into(), |s| s.to_string()),
            b(run.payoff >= value),
        ]);
    }
    let mean = total / rn(runs.len());
    t.check(format!("mean payoff {} above the value", fmt_scalar(&mean)), mean > value);
    Ok(t)
}

fn cav_u(spec: &ExperimentSpec) -> Result<Table> {
    let g = spec.game("matching-pennies")?;
    let grid = spec.size.unwrap_or(64);
    let curve = guarantee_curve(&g, 0, grid)?;
    let closed_form = g == matching_pennies::<Rational>();
    let mut cols = vec!["gamma", "U", "cavU"];
    if closed_form {
        cols.extend(["U_closed_form", "cavU_closed_form", "holds"]);
    }
    let mut t = Table::new("cavU", &cols);
    for k in 0..curve.gammas.len() {
        let (gamma, u, cav) = (curve.gammas[k], curve.values[k], curve.cav_values[k]);
        let mut row = vec![fmt_float(gamma), fmt_float(u), fmt_float(cav)];
        if closed_form {
            let u_cf = 2.0 * binary_entropy_inverse(gamma.min(1.0))? - 1.0;
            let cav_cf = gamma - 1.0;
            let holds = (u - u_cf).abs() <= 1e-3 && (cav - cav_cf).abs() <= 1e-3;
            row.extend([fmt_float(u_cf), fmt_float(cav_cf), b(holds)]);
        }
        t.push(row);
    }
    Ok(t)
}

fn potential(spec: &ExperimentSpec) -> Result<Table> {
    let g = matching_pennies::<Rational>();
    let n = spec.horizons(&[5])[0];
    let count = spec.size.unwrap_or(100);
    let mut t = Table::new(
        "potential",
        &["program", "seed_bits", "stage", "payoff", "entropy_drop", "increment", "lower_bound", "holds"],
    );
    for k in 0..count {
        let mut rng = playout_rng(spec.seed, k as u64);
        let bits = (k % 5) as u32;
        let prog = random_program(&g, 1, n, bits, 1, &mut rng)?;
        let steps = mp_potential_trace(&g, n, &BehavioralStrategy::seeded(prog))
            .with_context(|| format!("potential trace of program {k}"))?;
        for s in steps {
            t.push(vec![
                k.to_string(),
                bits.to_string(),
                s.stage.to_string(),
                fmt_float(s.payoff),
                fmt_float(s.entropy_drop),
                fmt_float(s.increment),
                fmt_float(s.lower_bound),
                b(s.increment >= 1.0 - 1e-9),
            ]);
        }
    }
    Ok(t)
}
