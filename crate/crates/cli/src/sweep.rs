//! Parameter sweeps: one entropy row per family parameter, deterministic
//! and parallelizable with buffered, sorted output.

use entropylab::entropy::{entropy_poly, EntropyEstimate};
use entropylab::error::CoreError;
use entropylab::maps::family_member;
use rayon::prelude::*;

/// Sweep specification (the CLI's public contract).
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub family: String,
    pub param: String,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
    pub depth: usize,
    pub tol: f64,
    pub jobs: usize,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.lo < self.hi) {
            return Err("sweep range must satisfy lo < hi".into());
        }
        if self.steps < 2 {
            return Err("steps must be >= 2".into());
        }
        if !(self.tol > 0.0) {
            return Err("tol must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub param: f64,
    pub estimate: Option<EntropyEstimate>,
    pub error: String,
}

/// Run the sweep; rows come back in ascending parameter order regardless of
/// scheduling.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, String> {
    spec.validate()?;
    let n = spec.steps;
    let params: Vec<(usize, f64)> = (0..n)
        .map(|k| {
            (
                k,
                spec.lo + (spec.hi - spec.lo) * (k as f64) / ((n - 1) as f64),
            )
        })
        .collect();
    let compute = |&(_, p): &(usize, f64)| -> SweepRow {
        let fam = family_member(&spec.family, &[(spec.param.clone(), p)].into());
        match fam {
            Err(e) => SweepRow {
                param: p,
                estimate: None,
                error: format!("{e}"),
            },
            Ok(f) => match entropy_poly(&f, spec.depth, spec.tol) {
                Ok(est) => SweepRow {
                    param: p,
                    estimate: Some(est),
                    error: String::new(),
                },
                Err(CoreError::NoConvergence {
                    value,
                    lower,
                    upper,
                }) => SweepRow {
                    param: p,
                    estimate: Some(EntropyEstimate {
                        value,
                        lower,
                        upper,
                        method: entropylab::entropy::EntropyMethod::StPipeline,
                        depth: spec.depth,
                    }),
                    error: "no-convergence".into(),
                },
                Err(e) => SweepRow {
                    param: p,
                    estimate: None,
                    error: format!("{e}"),
                },
            },
        }
    };
    let mut rows: Vec<(usize, SweepRow)> = if spec.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(spec.jobs)
            .build()
            .map_err(|e| e.to_string())?;
        pool.install(|| {
            params
                .par_iter()
                .map(|kp| (kp.0, compute(kp)))
                .collect::<Vec<_>>()
        })
    } else {
        params.iter().map(|kp| (kp.0, compute(kp))).collect()
    };
    rows.sort_by_key(|(k, _)| *k);
    Ok(rows.into_iter().map(|(_, r)| r).collect())
}

/// CSV rendering: param, entropy, lower, upper, depth_used, error.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("param,entropy,lower,upper,depth_used,error\n");
    for r in rows {
        match &r.estimate {
            Some(e) => out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                crate::fmt_f64(r.param),
                crate::fmt_f64(e.value),
                crate::fmt_f64(e.lower),
                crate::fmt_f64(e.upper),
                e.depth,
                r.error
            )),
            None => out.push_str(&format!(
                "{},,,,,{}\n",
                crate::fmt_f64(r.param),
                r.error
            )),
        }
    }
    out
}
