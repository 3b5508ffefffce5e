//! Subcommand bodies. Each returns its standard output and whether a checked
//! bound was violated.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::json;

use lowrand::construct::{folk_equilibrium, mp_epsnash, stagewise_equilibrium, zerosum_epsnash, FolkOptions};
use lowrand::engine::{effective_entropy, exact_payoff, strategy_entropy, BehavioralStrategy, StrategyForm};
use lowrand::exploit::{
    best_response_exploiter, predictor_strategy, seed_learner_strategy, transcript, weak_dominance_warning, LearnerMode,
    PredictorConfig,
};
use lowrand::formats::{profile_from_json, profile_to_json, report_to_json, strategy_from_json};
use lowrand::solver::{enumerate_bimatrix_nash, guarantee_curve, min_entropy_nash, minmax_profile, solve_zero_sum};
use lowrand::verify::{certify, Verdict};
use lowrand::{PayoffProfile, Rational, Scalar, StageGame};

use crate::experiments::{run_experiment, ExperimentSpec, EXPERIMENTS};
use crate::output::{fmt_float, fmt_scalar, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Lines,
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    pub violation: bool,
}

fn render(t: &Table, format: Format) -> String {
    match format {
        Format::Csv => t.to_csv(),
        Format::Lines => t.to_lines(),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Minmax levels, equilibria and entropy figures of a stage game.
pub fn solve<T: Scalar>(game: &StageGame<T>) -> Result<Outcome> {
    let mut out = String::new();
    out.push_str(&format!("game {}\n", game.name()));
    let mm = minmax_profile(game)?;
    for i in 0..game.num_players() {
        out.push_str(&format!(
            "player {i}: minmax {} min_equilibrium_entropy {}\n",
            fmt_scalar(&mm.0[i]),
            fmt_float(min_entropy_nash(game, i)?)
        ));
    }
    if game.is_zero_sum() {
        let z = solve_zero_sum(game)?;
        let fmt = |p: &[T]| p.iter().map(fmt_scalar).collect::<Vec<_>>().join(" ");
        out.push_str(&format!("value {}\n", fmt_scalar(&z.value)));
        out.push_str(&format!("row strategy {}\n", fmt(z.row.strategy.probs())));
        out.push_str(&format!("column strategy {}\n", fmt(z.col.strategy.probs())));
    }
    let nash = enumerate_bimatrix_nash(game)?;
    out.push_str(&format!("equilibria {}{}\n", nash.equilibria.len(), if nash.degenerate { " (degenerate game)" } else { "" }));
    for e in &nash.equilibria {
        let strat: Vec<String> =
            e.profile.iter().map(|s| s.probs().iter().map(fmt_scalar).collect::<Vec<_>>().join(" ")).collect();
        let pay: Vec<String> = e.payoff.0.iter().map(fmt_scalar).collect();
        out.push_str(&format!("  [{}] payoff ({})\n", strat.join(" | "), pay.join(", ")));
    }
    if let Some(w) = weak_dominance_warning(game) {
        out.push_str(&format!("warning: {w}\n"));
    }
    Ok(Outcome { stdout: out, violation: false })
}

/// Worst-case entropy of a strategy file, or the row player's guarantee curve.
pub fn entropy(game: &StageGame<Rational>, n: Option<usize>, strategy: Option<&Path>, grid: usize, format: Format) -> Result<Outcome> {
    match (strategy, n) {
        (Some(path), Some(n)) => {
            let s = strategy_from_json(game, &read(path)?)?;
            let h = strategy_entropy(game, n, &s)?;
            Ok(Outcome { stdout: format!("entropy {}\n", fmt_float(h)), violation: false })
        }
        (Some(_), None) => bail!("--n is required with --strategy"),
        (None, _) => {
            let c = guarantee_curve(game, 0, grid)?;
            let mut t = Table::new("guarantee", &["gamma", "U", "cavU"]);
            for k in 0..c.gammas.len() {
                t.push(vec![fmt_float(c.gammas[k]), fmt_float(c.values[k]), fmt_float(c.cav_values[k])]);
            }
            Ok(Outcome { stdout: render(&t, format), violation: false })
        }
    }
}

#[derive(Clone, Debug)]
pub enum Construction {
    Folk { target: Vec<Rational> },
    Stagewise { equilibrium: usize },
    MpEps { eps: Rational },
    ZerosumEps { eps: Rational },
}

/// Builds a profile, writes `profile.json` (and `plan.json` for folk plans)
/// under `out`, and prints a summary.
pub fn construct(game: &StageGame<Rational>, n: usize, what: &Construction, out: &Path) -> Result<Outcome> {
    std::fs::create_dir_all(out)?;
    let (profile, plan) = match what {
        Construction::Folk { target } => {
            let (p, plan) = folk_equilibrium(game, n, &PayoffProfile(target.clone()), FolkOptions::default())?;
            let mixed = |rows: &[Vec<lowrand::MixedStrategy<Rational>>]| {
                rows.iter()
                    .map(|r| r.iter().map(|s| s.probs().iter().map(Scalar::format_scalar).collect::<Vec<_>>()).collect::<Vec<_>>())
                    .collect::<Vec<_>>()
            };
            let summary = json!({
                "schedule": plan.schedule,
                "schedule_length": plan.schedule.len(),
                "denominator": plan.denominator,
                "repetitions": plan.repetitions,
                "tail_length": plan.tail_length,
                "tail_min": plan.tail_min,
                "tail_equilibria": mixed(&plan.tail_equilibria),
                "punishments": mixed(&plan.punishments),
                "minmax": plan.minmax.iter().map(Scalar::format_scalar).collect::<Vec<_>>(),
                "target": plan.payoff_target.0.iter().map(Scalar::format_scalar).collect::<Vec<_>>(),
            });
            (p, Some(summary))
        }
        Construction::Stagewise { equilibrium } => {
            let eqs = enumerate_bimatrix_nash(game)?.equilibria;
            let e = eqs.get(*equilibrium).with_context(|| format!("the game has {} stage equilibria", eqs.len()))?;
            (stagewise_equilibrium(game, n, &e.profile)?, None)
        }
        Construction::MpEps { eps } => (mp_epsnash(n, eps)?, None),
        Construction::ZerosumEps { eps } => (zerosum_epsnash(game, n, eps)?, None),
    };
    std::fs::write(out.join("profile.json"), profile_to_json(&profile) + "\n")?;
    let payoff = exact_payoff(game, n, &profile)?;
    let mut text = format!("wrote {}\n", out.join("profile.json").display());
    if let Some(plan) = plan {
        let mut plan = plan;
        let entropies: Vec<String> = (0..profile.len())
            .map(|i| effective_entropy(game, n, &profile, i).map(fmt_float))
            .collect::<lowrand::Result<_>>()?;
        plan["predicted_payoff"] = json!(payoff.0.iter().map(Scalar::format_scalar).collect::<Vec<_>>());
        plan["effective_entropy"] = json!(entropies);
        std::fs::write(out.join("plan.json"), serde_json::to_string_pretty(&plan)? + "\n")?;
        text.push_str(&format!("wrote {}\n", out.join("plan.json").display()));
    }
    let pay: Vec<String> = payoff.0.iter().map(Scalar::format_scalar).collect();
    text.push_str(&format!("payoff {}\n", pay.join(" ")));
    Ok(Outcome { stdout: text, violation: false })
}

/// Certifies a profile file. With `eps`, a verdict worse than eps-Nash is a violation.
pub fn certify_file<T: Scalar>(game: &StageGame<T>, n: usize, profile: &Path, eps: Option<&T>) -> Result<Outcome> {
    let profile = profile_from_json(game, &read(profile)?)?;
    let rep = certify(game, n, &profile, eps)?;
    let violation = eps.is_some() && matches!(rep.verdict, Verdict::NotNe { .. });
    Ok(Outcome { stdout: report_to_json(&rep) + "\n", violation })
}

#[derive(Clone, Debug)]
pub enum Engine {
    Predictor(PredictorConfig),
    SeedLearner { threshold: Rational, single_shot: bool },
    Myopic,
}

/// Plays an exploitation engine against an opponent strategy file and prints the transcript.
pub fn exploit(
    game: &StageGame<Rational>,
    n: usize,
    opponent: &Path,
    engine: &Engine,
    seed: u64,
    format: Format,
) -> Result<Outcome> {
    let opp = strategy_from_json(game, &read(opponent)?)?;
    if game.num_players() != 2 {
        bail!("exploitation is two-player");
    }
    let owner = 1 - opp.owner();
    let me = match engine {
        Engine::Predictor(cfg) => predictor_strategy(game, owner, cfg.clone())?,
        Engine::Myopic => best_response_exploiter(game, &opp)?,
        Engine::SeedLearner { threshold, single_shot } => {
            let StrategyForm::Seeded(prog) = opp.form() else {
                bail!("the seed learner needs a seeded opponent program; use the predictor engine otherwise");
            };
            let mode = if *single_shot { LearnerMode::SingleShot } else { LearnerMode::Continual };
            seed_learner_strategy(game, n, owner, prog, threshold.clone(), mode)?
        }
    };
    let profile: Vec<BehavioralStrategy<Rational>> = if owner == 0 { vec![me, opp] } else { vec![opp, me] };
    let rows = transcript(game, n, &profile, owner, seed)?;
    let mut t = Table::new("transcript", &["stage", "own_action", "opponent_action", "diagnostic", "running_average"]);
    for r in rows {
        t.push(vec![
            r.stage.to_string(),
            r.own_action,
            r.opponent_action,
            r.diagnostic.map(fmt_float).unwrap_or_default(),
            fmt_float(r.running_average),
        ]);
    }
    let mut stdout = render(&t, format);
    if let Some(w) = weak_dominance_warning(game) {
        eprintln!("warning: {w}");
    }
    if format == Format::Lines {
        let pay = exact_payoff(game, n, &profile)?;
        stdout.push_str(&format!("expected_average={}\n", fmt_scalar(&pay.0[owner])));
    }
    Ok(Outcome { stdout, violation: false })
}

/// Runs one experiment (or `all`), saving CSV and summary files under `out`.
pub fn experiment(spec: &ExperimentSpec, out: &Path, format: Format) -> Result<Outcome> {
    let names: Vec<String> = if spec.name == "all" {
        EXPERIMENTS.iter().map(|(n, _)| n.to_string()).collect()
    } else {
        vec![spec.name.clone()]
    };
    let mut result = Outcome::default();
    let mut index = BTreeMap::new();
    for name in names {
        let mut s = spec.clone();
        s.name = name.clone();
        let table = run_experiment(&s)?;
        table.save(out)?;
        if format == Format::Lines {
            for (label, pass) in &table.checks {
                result.stdout.push_str(&format!("# {name}: {label}: {}\n", if *pass { "pass" } else { "FAIL" }));
            }
        }
        result.stdout.push_str(&render(&table, format));
        result.violation |= !table.passed();
        index.insert(name, table.passed());
    }
    if spec.name == "all" {
        std::fs::write(out.join("summary.json"), serde_json::to_string_pretty(&index)? + "\n")?;
    }
    Ok(result)
}

/// `name: description` lines of the catalog.
pub fn list_experiments() -> String {
    EXPERIMENTS.iter().map(|(n, d)| format!("{n}: {d}\n")).collect()
}
