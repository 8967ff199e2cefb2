use std::path::Path;

use dunkl_core::balance::{self, BalanceOptions};
use dunkl_core::catalog::Family;
use dunkl_core::dunkl::{self, Decision, DunklOptions};
use dunkl_core::{
    hirzebruch, io, stability, weightfinder, Arrangement, BigRational, Error, IntersectionPoset,
    Real, ScalarMode,
};
use serde_json::{json, Value};

use crate::report::{self, Failure, Inputs, Timer};
use crate::{Cli, Command, WeightedInput};

struct Loaded {
    arr: Arrangement,
    poset: IntersectionPoset,
    inputs: Inputs,
    weights_text: Option<String>,
}

fn load(cli: &Cli, path: &Path, weights: Option<&Path>, timer: &mut Timer) -> Result<Loaded, Failure> {
    let mut inputs = Inputs::default();
    let text = inputs.read(path)?;
    let arr = io::parse_arrangement(&text)?;
    let arr = match cli.mode.as_deref().map(ScalarMode::parse).transpose()? {
        Some(ScalarMode::Exact) => arr.to_exact()?,
        Some(ScalarMode::Float) => arr.to_float()?,
        None => arr,
    };
    let weights_text = weights.map(|p| inputs.read(p)).transpose()?;
    timer.stage("parse");
    let poset = arr.enumerate_flats();
    timer.stage("poset");
    Ok(Loaded {
        arr,
        poset,
        inputs,
        weights_text,
    })
}

fn finish(
    cli: &Cli,
    command: &str,
    mode: ScalarMode,
    inputs: Inputs,
    payload: Value,
    timer: Timer,
) -> Result<Value, Failure> {
    let timing = cli.timing.then(|| timer.into_json());
    let report = report::run_report(command, mode.as_str(), inputs.digest(), payload, timing);
    report::emit(&report, cli.out.as_deref())?;
    Ok(report)
}

pub fn run(cli: &Cli) -> Result<u8, Failure> {
    let mut timer = Timer::start();
    match &cli.command {
        Command::Catalog { family, param, seed } => {
            let arr = Family::parse(family, param, *seed)?.build()?;
            // the arrangement file itself, so it can be fed back to every command
            report::emit(&io::arrangement_to_json(&arr), cli.out.as_deref())?;
            Ok(0)
        }
        Command::Analyze { arrangement } => {
            let l = load(cli, arrangement, None, &mut timer)?;
            let mut payload = l.poset.to_json();
            payload["labels"] = json!((0..l.arr.len()).map(|i| l.arr.label(i)).collect::<Vec<_>>());
            finish(cli, "analyze", l.arr.mode(), l.inputs, payload, timer)?;
            Ok(0)
        }
        Command::Stability { input } => weighted(cli, "stability", input, timer),
        Command::Qform { input } => weighted(cli, "qform", input, timer),
        Command::Balance { input, .. } => weighted(cli, "balance", input, timer),
        Command::Dunkl { input, .. } => weighted(cli, "dunkl", input, timer),
        Command::FindWeights { arrangement, .. } => {
            let l = load(cli, arrangement, None, &mut timer)?;
            match l.arr.mode() {
                ScalarMode::Exact => find_weights::<BigRational>(cli, l, timer),
                ScalarMode::Float => find_weights::<f64>(cli, l, timer),
            }
        }
        Command::Langer { arrangement } => {
            let l = load(cli, arrangement, None, &mut timer)?;
            let stat = hirzebruch::langer_statistic(&l.poset)?;
            timer.stage("compute");
            finish(cli, "langer", l.arr.mode(), l.inputs, stat.to_json(), timer)?;
            Ok(0)
        }
    }
}

fn weighted(cli: &Cli, name: &str, input: &WeightedInput, mut timer: Timer) -> Result<u8, Failure> {
    let l = load(cli, &input.arrangement, Some(&input.weights), &mut timer)?;
    match l.arr.mode() {
        ScalarMode::Exact => weighted_typed::<BigRational>(cli, name, l, timer),
        ScalarMode::Float => weighted_typed::<f64>(cli, name, l, timer),
    }
}

fn weighted_typed<R: Real>(cli: &Cli, name: &str, l: Loaded, mut timer: Timer) -> Result<u8, Failure> {
    let text = l.weights_text.as_deref().expect("weighted commands read weights");
    let weights = io::parse_weights::<R>(text, l.arr.len())?;
    let a = weights.as_slice();
    let mode = R::MODE;
    let (payload, code) = match &cli.command {
        Command::Stability { .. } => {
            let rep = stability::stability_report(&l.poset, a)?;
            let cone = stability::stability_cone(&l.poset)?;
            let mut payload = rep.to_json();
            payload["cone"] = cone.to_json(&l.poset);
            (payload, 0)
        }
        Command::Qform { .. } => (hirzebruch::q_evaluate(&l.poset, a)?.to_json(&l.poset), 0),
        Command::Balance {
            tol,
            max_iter,
            no_precheck,
            ..
        } => {
            let floats: Vec<f64> = a.iter().map(Real::to_f64).collect();
            let opts = BalanceOptions {
                tol: *tol,
                max_iter: *max_iter,
                precheck: !no_precheck,
                initial_gauge: None,
            };
            let res = balance::balance(&l.arr, &l.poset, &floats, &opts)?;
            let mut payload = res.to_json();
            payload["metric_identity_residual"] = if res.is_converged() {
                json!(balance::metric_balance_residual(&l.arr, &floats, &res.metric))
            } else {
                Value::Null
            };
            (payload, 0)
        }
        Command::Dunkl {
            tol,
            max_iter,
            tol_f,
            ..
        } => {
            let opts = DunklOptions {
                tol_balance: *tol,
                max_iter: *max_iter,
                tol_f: *tol_f,
                ..DunklOptions::default()
            };
            match dunkl::dunkl_decision_with_poset(&l.arr, &l.poset, a, &opts) {
                Ok(v) => {
                    let code = match v.decision {
                        Decision::Dunkl => 0,
                        Decision::NotDunkl => report::EXIT_NOT_DUNKL,
                        Decision::NotApplicable => report::EXIT_NOT_APPLICABLE,
                        Decision::Inconsistent => report::EXIT_INCONSISTENT,
                    };
                    (v.to_json(&l.poset), code)
                }
                Err(Error::NotEssentialOrReducible) => (
                    json!({
                        "decision": Decision::NotApplicable.as_str(),
                        "certificates": ["arrangement is not essential and irreducible"],
                        "essential": l.poset.essential,
                        "irreducible": l.poset.irreducible,
                    }),
                    report::EXIT_NOT_APPLICABLE,
                ),
                Err(e) => {
                    return Err(Failure {
                        code: report::EXIT_NOT_APPLICABLE,
                        message: e.to_string(),
                    })
                }
            }
        }
        _ => unreachable!("not a weighted command"),
    };
    timer.stage("compute");
    finish(cli, name, mode, l.inputs, payload, timer)?;
    Ok(code)
}

fn find_weights<R: Real>(cli: &Cli, l: Loaded, mut timer: Timer) -> Result<u8, Failure> {
    let Command::FindWeights { samples, seed, .. } = &cli.command else {
        unreachable!("find-weights only");
    };
    let mut inputs = l.inputs;
    inputs.absorb(format!("samples={samples};seed={seed}").as_bytes());
    let res = weightfinder::find_dunkl_weights::<R>(&l.poset)?;
    let mut payload = res.to_json(&l.poset);
    let drawn = if res.feasible && *samples > 0 {
        weightfinder::sample_feasible(&l.poset, &res, *samples, *seed)?
    } else {
        Vec::new()
    };
    payload["samples"] = json!(drawn
        .iter()
        .map(|w| json!({ "weights": w.iter().map(Real::to_json).collect::<Vec<_>>() }))
        .collect::<Vec<_>>());
    timer.stage("compute");
    finish(cli, "find-weights", R::MODE, inputs, payload, timer)?;
    Ok(0)
}
