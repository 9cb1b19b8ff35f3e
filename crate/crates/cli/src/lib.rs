//! Library side of the CLI: sweep machinery and command implementations,
//! shared with the acceptance tests.

pub mod sweep;

use entropylab::correspondence::st_map;
use entropylab::deformations::{
    beta_flow, big_gamma, delta_flow, gamma_trace, hat_delta_flow, retract_zero, sigma_retract,
    FlowTrace,
};
use entropylab::descr::{parse_map_description, zeta_json, MapDescription};
use entropylab::entropy::{entropy_lap, entropy_poly, EntropyEstimate};
use entropylab::error::CoreError;
use entropylab::maps::StuntedParams;
use entropylab::rat::{fmt_q, parse_q, q_to_f64, qi, Q};
use serde_json::json;

/// 17-significant-digit float rendering (part of the output contract).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.17e}")
}

fn estimate_json(est: &EntropyEstimate) -> serde_json::Value {
    json!({
        "value": est.value,
        "lower": est.lower,
        "upper": est.upper,
        "method": match est.method {
            entropylab::entropy::EntropyMethod::LapGrowth => "lap-growth",
            entropylab::entropy::EntropyMethod::Markov => "markov",
            entropylab::entropy::EntropyMethod::StPipeline => "st-pipeline",
        },
        "depth": est.depth,
    })
}

/// `cmd_entropy`: JSON record on stdout; exit 0, or 1 on no-convergence
/// (bracket still printed), 2 on parse errors, 3 on precondition failures.
pub fn cmd_entropy(description: &str, depth: usize, tol: f64) -> (String, i32) {
    let parsed = match parse_map_description(description) {
        Ok(p) => p,
        Err(e) => return (format!("error: {e}"), 2),
    };
    let result = match &parsed {
        MapDescription::Stunted(p) => entropy_lap(&p.to_map(), depth.max(2), tol),
        MapDescription::Polynomial(f) => entropy_poly(f, depth.max(2), tol),
    };
    match result {
        Ok(est) => (estimate_json(&est).to_string(), 0),
        Err(CoreError::NoConvergence {
            value,
            lower,
            upper,
        }) => (
            json!({
                "value": value,
                "lower": lower,
                "upper": upper,
                "method": if parsed.is_stunted() { "lap-growth" } else { "st-pipeline" },
                "depth": depth,
                "error": "no-convergence",
            })
            .to_string(),
            1,
        ),
        Err(e) => (format!("error: {e}"), 3),
    }
}

/// `cmd_st`: JSON zeta with error bounds.
pub fn cmd_st(description: &str, depth: usize) -> (String, i32) {
    let parsed = match parse_map_description(description) {
        Ok(p) => p,
        Err(e) => return (format!("error: {e}"), 2),
    };
    let f = match parsed {
        MapDescription::Polynomial(f) => f,
        MapDescription::Stunted(_) => {
            return ("error: st expects a polynomial description".into(), 3)
        }
    };
    match st_map(&f, depth.max(2)) {
        Ok(res) => {
            let errs: Vec<f64> = res.errors.iter().map(q_to_f64).collect();
            (
                json!({
                    "zeta": zeta_json(&res.params),
                    "err": errs,
                    "depth": depth,
                })
                .to_string(),
                0,
            )
        }
        Err(e) => (format!("error: {e}"), 3),
    }
}

/// `cmd_deform`: CSV trace of the requested flow.
pub fn cmd_deform(
    description: &str,
    flow: &str,
    t: &str,
    h0: Option<f64>,
    budget: usize,
) -> (String, i32) {
    let parsed = match parse_map_description(description) {
        Ok(p) => p,
        Err(e) => return (format!("error: {e}"), 2),
    };
    let params = match parsed {
        MapDescription::Stunted(p) => p,
        MapDescription::Polynomial(_) => {
            return ("error: deform expects a stunted description".into(), 3)
        }
    };
    let time = match parse_q(t) {
        Ok(q) => q,
        Err(e) => return (format!("error: bad time: {e}"), 2),
    };
    let single_row = |p: &StuntedParams, time: &Q| -> FlowTrace {
        FlowTrace {
            d: p.geometry.d,
            path: vec![(time.clone(), p.zeta.clone())],
            events: vec![],
        }
    };
    let trace = match flow {
        "gamma" => gamma_trace(&params, &time),
        "delta" => delta_flow(&params, &time),
        "hatdelta" => hat_delta_flow(&params, &time),
        "beta" => match beta_flow(&params, &time, budget) {
            Ok(tr) => tr,
            Err(e) => return (format!("error: {e}"), 3),
        },
        "Gamma" => {
            let Some(h0) = h0 else {
                return ("error: Gamma needs --h0".into(), 3);
            };
            match big_gamma(&params, &time, h0, 1e-6) {
                Ok(p) => single_row(&p, &time),
                Err(e) => return (format!("error: {e}"), 3),
            }
        }
        "retract0" => match retract_zero(&params, &time, 1e-9, budget) {
            Ok(p) => {
                // two-phase trace: events at t = 1/2 (phase switch) and end
                let mut tr = single_row(&p, &time);
                if time > qi(0) {
                    let half = entropylab::rat::qr(1, 2);
                    let mid = retract_zero(&params, &half.clone().min(time.clone()), 1e-9, budget)
                        .unwrap_or_else(|_| p.clone());
                    tr.path.insert(0, (qi(0), params.zeta.clone()));
                    if time > half {
                        tr.path
                            .insert(1, (half, mid.zeta.clone()));
                    }
                }
                tr
            }
            Err(e) => return (format!("error: {e}"), 3),
        },
        "sigma" => match sigma_retract(&params, &time) {
            Ok(p) => single_row(&p, &time),
            Err(e) => return (format!("error: {e}"), 3),
        },
        other => return (format!("error: unknown flow {other:?}"), 2),
    };
    (trace.to_csv(), 0)
}

/// `cmd_verify`: run a named property suite with a fixed seed.
pub fn cmd_verify(suite: &str, seed: u64) -> (String, i32) {
    use entropylab::verify::*;
    let reports: Vec<SuiteReport> = match suite {
        "rome" => vec![run_rome_suite(seed, 100, 5)],
        "monotone" => vec![run_monotone_suite(seed, 200)],
        "semiconj" => vec![run_semiconj_suite(seed, 20, 1e-3)],
        "flows" => vec![run_flows_suite(seed, 20)],
        "cycles" => vec![run_cycles_suite(seed, 50)],
        "all" => vec![
            run_rome_suite(seed, 100, 5),
            run_monotone_suite(seed, 200),
            run_semiconj_suite(seed, 20, 1e-3),
            run_flows_suite(seed, 20),
            run_cycles_suite(seed, 50),
        ],
        other => return (format!("error: unknown suite {other:?}"), 2),
    };
    let mut out = String::new();
    let mut all_ok = true;
    for r in &reports {
        out.push_str(&format!(
            "{}: {}/{} {}\n",
            r.name,
            r.passed,
            r.total,
            if r.ok() { "pass" } else { "FAIL" }
        ));
        for f in &r.failures {
            out.push_str(&format!("  failure: {f}\n"));
        }
        all_ok &= r.ok();
    }
    (out, if all_ok { 0 } else { 1 })
}

pub fn fmt_zeta(zeta: &[Q]) -> String {
    zeta.iter().map(fmt_q).collect::<Vec<_>>().join(",")
}
