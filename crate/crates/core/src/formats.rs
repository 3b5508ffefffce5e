//! JSON encodings of games, strategies and certification reports.
//!
//! Scalars are written as strings (`"1/2"` for rationals, shortest round-trip
//! decimals for floats); either strings or JSON numbers are accepted on input.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::engine::{BehavioralStrategy, SeedPrior, SeededStrategy, StrategyForm, TableStrategy, TriggerPlan};
use crate::error::{Error, Result};
use crate::exploit::{LearnerMode, MyopicBestResponse, Predictor, PredictorConfig, SeedLearner};
use crate::game::{MixedStrategy, Profile, StageGame};
use crate::scalar::Scalar;
use crate::verify::{EquilibriumReport, Verdict};

fn scalar_to_json<T: Scalar>(x: &T) -> Value {
    Value::String(x.format_scalar())
}

fn scalar_from_json<T: Scalar>(v: &Value) -> Result<T> {
    match v {
        Value::String(s) => T::parse_scalar(s),
        Value::Number(n) => T::parse_scalar(&n.to_string()),
        other => Err(Error::parse(format!("expected a number, got {other}"))),
    }
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| Error::parse(format!("missing field {key:?}")))
}

fn as_object(v: &Value) -> Result<&Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::parse("expected an object"))
}

fn as_array(v: &Value) -> Result<&Vec<Value>> {
    v.as_array().ok_or_else(|| Error::parse(format!("expected an array, got {v}")))
}

fn as_usize(v: &Value) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| Error::parse(format!("expected a non-negative integer, got {v}")))
}

fn usize_list(v: &Value) -> Result<Vec<usize>> {
    as_array(v)?.iter().map(as_usize).collect()
}

fn parse_text(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::parse(e.to_string()))
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize")
}

/// Game as `{"name", "players", "actions", "payoffs"}` with payoffs nested one array level
/// per player and a payoff vector at the leaves.
pub fn game_to_value<T: Scalar>(game: &StageGame<T>) -> Value {
    fn nest<T: Scalar>(game: &StageGame<T>, prefix: &mut Profile) -> Value {
        if prefix.len() == game.num_players() {
            return Value::Array(game.payoff_vector(prefix).iter().map(scalar_to_json).collect());
        }
        let m = game.num_actions(prefix.len());
        let mut out = Vec::with_capacity(m);
        for a in 0..m {
            prefix.push(a);
            out.push(nest(game, prefix));
            prefix.pop();
        }
        Value::Array(out)
    }
    let actions: Vec<Value> = (0..game.num_players()).map(|i| json!(game.labels(i))).collect();
    json!({
        "name": game.name(),
        "players": game.num_players(),
        "actions": actions,
        "payoffs": nest(game, &mut Vec::new()),
    })
}

pub fn game_from_value<T: Scalar>(v: &Value) -> Result<StageGame<T>> {
    let obj = as_object(v)?;
    let name = obj.get("name").and_then(Value::as_str).unwrap_or("game").to_string();
    let actions: Vec<Vec<String>> = as_array(field(obj, "actions")?)?
        .iter()
        .map(|labels| {
            as_array(labels)?
                .iter()
                .map(|l| l.as_str().map(str::to_string).ok_or_else(|| Error::parse("action labels are strings")))
                .collect()
        })
        .collect::<Result<_>>()?;
    let k = actions.len();
    if let Some(p) = obj.get("players") {
        if as_usize(p)? != k {
            return Err(Error::parse(format!("players is {p} but {k} action lists are given")));
        }
    }
    let mut flat = Vec::new();
    fn walk<T: Scalar>(v: &Value, depth: usize, actions: &[Vec<String>], flat: &mut Vec<T>) -> Result<()> {
        let items = as_array(v)?;
        if depth == actions.len() {
            if items.len() != actions.len() {
                return Err(Error::parse(format!("payoff cell has {} entries, expected {}", items.len(), actions.len())));
            }
            for x in items {
                flat.push(scalar_from_json(x)?);
            }
            return Ok(());
        }
        if items.len() != actions[depth].len() {
            return Err(Error::parse(format!("payoff level {depth} has {} entries", items.len())));
        }
        for item in items {
            walk(item, depth + 1, actions, flat)?;
        }
        Ok(())
    }
    if k < 2 {
        return Err(Error::invalid(format!("a game needs at least two players, got {k}")));
    }
    walk(field(obj, "payoffs")?, 0, &actions, &mut flat)?;
    StageGame::new(name, actions, flat)
}

pub fn game_to_json<T: Scalar>(game: &StageGame<T>) -> String {
    pretty(&game_to_value(game))
}

pub fn game_from_json<T: Scalar>(text: &str) -> Result<StageGame<T>> {
    game_from_value(&parse_text(text)?)
}

fn mixed_to_json<T: Scalar>(m: &MixedStrategy<T>) -> Value {
    Value::Array(m.probs().iter().map(scalar_to_json).collect())
}

fn mixed_from_json<T: Scalar>(owner: usize, v: &Value) -> Result<MixedStrategy<T>> {
    let probs = as_array(v)?.iter().map(scalar_from_json).collect::<Result<Vec<T>>>()?;
    MixedStrategy::new(owner, probs)
}

fn seeded_to_json<T: Scalar>(s: &SeededStrategy<T>) -> Value {
    let prior = match s.prior() {
        SeedPrior::Uniform => json!("uniform"),
        SeedPrior::Fixed(seed) => json!({ "fixed": seed }),
        SeedPrior::Weights(w) => json!({ "weights": w.iter().map(scalar_to_json).collect::<Vec<_>>() }),
    };
    json!({
        "owner": s.owner(),
        "kind": "seeded",
        "horizon": s.horizon(),
        "seed_bits": s.seed_bits(),
        "recall": s.recall(),
        "prior": prior,
        "table": s.table(),
    })
}

fn seeded_from_json<T: Scalar>(game: &StageGame<T>, obj: &Map<String, Value>) -> Result<SeededStrategy<T>> {
    let owner = as_usize(field(obj, "owner")?)?;
    let table: Vec<u8> = usize_list(field(obj, "table")?)?
        .into_iter()
        .map(|a| u8::try_from(a).map_err(|_| Error::parse("table entries are small action indices")))
        .collect::<Result<_>>()?;
    let s = SeededStrategy::from_table(
        game,
        owner,
        as_usize(field(obj, "horizon")?)?,
        as_usize(field(obj, "seed_bits")?)? as u32,
        as_usize(field(obj, "recall")?)?,
        table,
    )?;
    let prior = match obj.get("prior") {
        None => SeedPrior::Uniform,
        Some(Value::String(s)) if s == "uniform" => SeedPrior::Uniform,
        Some(Value::Object(p)) if p.contains_key("fixed") => SeedPrior::Fixed(as_usize(&p["fixed"])? as u32),
        Some(Value::Object(p)) if p.contains_key("weights") => {
            SeedPrior::Weights(as_array(&p["weights"])?.iter().map(scalar_from_json).collect::<Result<_>>()?)
        }
        Some(other) => return Err(Error::parse(format!("unknown seed prior {other}"))),
    };
    s.with_prior(prior)
}

fn profiles_to_json(ps: &[Profile]) -> Value {
    json!(ps)
}

fn profiles_from_json(v: &Value) -> Result<Vec<Profile>> {
    as_array(v)?.iter().map(usize_list).collect()
}

fn mixed_rows_to_json<T: Scalar>(rows: &[Vec<MixedStrategy<T>>]) -> Value {
    Value::Array(rows.iter().map(|r| Value::Array(r.iter().map(mixed_to_json).collect())).collect())
}

fn mixed_rows_from_json<T: Scalar>(v: &Value) -> Result<Vec<Vec<MixedStrategy<T>>>> {
    as_array(v)?
        .iter()
        .map(|r| as_array(r)?.iter().enumerate().map(|(i, m)| mixed_from_json(i, m)).collect())
        .collect()
}

pub fn strategy_to_value<T: Scalar>(s: &BehavioralStrategy<T>) -> Value {
    let owner = s.owner();
    match s.form() {
        StrategyForm::Table(TableStrategy { entries, default }) => {
            let entries: Vec<Value> = entries
                .iter()
                .map(|(h, m)| json!({ "history": profiles_to_json(h), "probs": mixed_to_json(m) }))
                .collect();
            json!({
                "owner": owner,
                "kind": "table",
                "entries": entries,
                "default": default.as_ref().map(mixed_to_json),
            })
        }
        StrategyForm::Schedule(stages) => json!({
            "owner": owner,
            "kind": "schedule",
            "stages": stages.iter().map(mixed_to_json).collect::<Vec<_>>(),
        }),
        StrategyForm::Trigger(plan) => json!({
            "owner": owner,
            "kind": "trigger",
            "action_counts": plan.action_counts,
            "schedule": profiles_to_json(&plan.schedule),
            "tail": mixed_rows_to_json(&plan.tail),
            "punishments": mixed_rows_to_json(&plan.punishments),
        }),
        StrategyForm::Seeded(p) => seeded_to_json(p),
        StrategyForm::Myopic(m) => json!({
            "owner": owner,
            "kind": "myopic-best-response",
            "opponent": strategy_to_value(&m.opponent),
        }),
        StrategyForm::SeedLearner(l) => json!({
            "owner": owner,
            "kind": "seed-learner",
            "threshold": scalar_to_json(&l.threshold),
            "mode": match l.mode { LearnerMode::Continual => "continual", LearnerMode::SingleShot => "single-shot" },
            "opponent": seeded_to_json(&l.opponent),
        }),
        StrategyForm::Predictor(p) => json!({
            "owner": owner,
            "kind": "predictor",
            "context_length": p.config.context_length,
            "threshold": p.config.threshold,
            "min_support": p.config.min_support,
        }),
    }
}

/// Decodes a strategy; `game` supplies the action sets.
pub fn strategy_from_value<T: Scalar>(game: &StageGame<T>, v: &Value) -> Result<BehavioralStrategy<T>> {
    let obj = as_object(v)?;
    let owner = as_usize(field(obj, "owner")?)?;
    if owner >= game.num_players() {
        return Err(Error::invalid(format!("no player {owner}")));
    }
    let kind = field(obj, "kind")?.as_str().ok_or_else(|| Error::parse("kind is a string"))?;
    let s = match kind {
        "table" => {
            let mut entries = BTreeMap::new();
            for e in as_array(field(obj, "entries")?)? {
                let e = as_object(e)?;
                entries.insert(profiles_from_json(field(e, "history")?)?, mixed_from_json(owner, field(e, "probs")?)?);
            }
            let default = match obj.get("default") {
                None | Some(Value::Null) => None,
                Some(d) => Some(mixed_from_json(owner, d)?),
            };
            BehavioralStrategy::table(owner, entries, default)
        }
        "schedule" => BehavioralStrategy::schedule(
            owner,
            as_array(field(obj, "stages")?)?.iter().map(|m| mixed_from_json(owner, m)).collect::<Result<_>>()?,
        )?,
        "trigger" => {
            let plan = TriggerPlan {
                action_counts: usize_list(field(obj, "action_counts")?)?,
                schedule: profiles_from_json(field(obj, "schedule")?)?,
                tail: mixed_rows_from_json(field(obj, "tail")?)?,
                punishments: mixed_rows_from_json(field(obj, "punishments")?)?,
            };
            BehavioralStrategy::trigger(owner, Arc::new(plan))
        }
        "seeded" => BehavioralStrategy::seeded(seeded_from_json(game, obj)?),
        "myopic-best-response" => {
            let opponent = strategy_from_value(game, field(obj, "opponent")?)?;
            opponent.validate(game)?;
            let m = MyopicBestResponse { game: game.clone(), owner, opponent };
            BehavioralStrategy::from_form(owner, StrategyForm::Myopic(Arc::new(m)))
        }
        "seed-learner" => {
            let opponent = seeded_from_json(game, as_object(field(obj, "opponent")?)?)?;
            let mode = match field(obj, "mode")?.as_str() {
                Some("continual") => LearnerMode::Continual,
                Some("single-shot") => LearnerMode::SingleShot,
                _ => return Err(Error::parse("mode is \"continual\" or \"single-shot\"")),
            };
            let threshold = scalar_from_json(field(obj, "threshold")?)?;
            let l = SeedLearner::new(game, owner, opponent, threshold, mode)?;
            BehavioralStrategy::from_form(owner, StrategyForm::SeedLearner(Arc::new(l)))
        }
        "predictor" => {
            let d = PredictorConfig::default();
            let config = PredictorConfig {
                context_length: obj.get("context_length").map(as_usize).transpose()?.unwrap_or(d.context_length),
                threshold: obj.get("threshold").and_then(Value::as_f64).unwrap_or(d.threshold),
                min_support: obj.get("min_support").map(as_usize).transpose()?.map_or(d.min_support, |x| x as u32),
            };
            let p = Predictor::new(game, owner, config)?;
            BehavioralStrategy::from_form(owner, StrategyForm::Predictor(Arc::new(p)))
        }
        other => return Err(Error::parse(format!("unknown strategy kind {other:?}"))),
    };
    s.validate(game)?;
    Ok(s)
}

pub fn strategy_to_json<T: Scalar>(s: &BehavioralStrategy<T>) -> String {
    pretty(&strategy_to_value(s))
}

pub fn strategy_from_json<T: Scalar>(game: &StageGame<T>, text: &str) -> Result<BehavioralStrategy<T>> {
    strategy_from_value(game, &parse_text(text)?)
}

/// A profile is either an array of strategies or `{"strategies": [...]}`.
pub fn profile_from_json<T: Scalar>(game: &StageGame<T>, text: &str) -> Result<Vec<BehavioralStrategy<T>>> {
    let v = parse_text(text)?;
    let items = match &v {
        Value::Object(o) => as_array(field(o, "strategies")?)?,
        other => as_array(other)?,
    };
    let mut profile: Vec<BehavioralStrategy<T>> =
        items.iter().map(|s| strategy_from_value(game, s)).collect::<Result<_>>()?;
    profile.sort_by_key(|s| s.owner());
    crate::engine::check_profile(game, &profile)?;
    Ok(profile)
}

pub fn profile_to_json<T: Scalar>(profile: &[BehavioralStrategy<T>]) -> String {
    pretty(&json!({ "strategies": profile.iter().map(strategy_to_value).collect::<Vec<_>>() }))
}

/// Human-readable verdict, e.g. `exact-NE`, `eps-NE(1/2)` or `not-NE`.
pub fn verdict_label<T: Scalar>(v: &Verdict<T>) -> String {
    match v {
        Verdict::ExactNe => "exact-NE".into(),
        Verdict::EpsNe { eps } => format!("eps-NE({})", eps.format_scalar()),
        Verdict::NotNe { .. } => "not-NE".into(),
    }
}

pub fn report_to_value<T: Scalar>(r: &EquilibriumReport<T>) -> Value {
    let mut v = json!({
        "mode": if r.exact { "exact" } else { "float" },
        "payoff": r.payoff.iter().map(scalar_to_json).collect::<Vec<_>>(),
        "exploitability": r.exploitability.iter().map(scalar_to_json).collect::<Vec<_>>(),
        "entropy": r.entropy,
        "effective_entropy": r.effective_entropy,
        "verdict": verdict_label(&r.verdict),
        "witness": r.witness().map(strategy_to_value),
    });
    if let Verdict::NotNe { player, gain } = &r.verdict {
        v["deviator"] = json!(player);
        v["gain"] = scalar_to_json(gain);
    }
    v
}

pub fn report_to_json<T: Scalar>(r: &EquilibriumReport<T>) -> String {
    pretty(&report_to_value(r))
}
