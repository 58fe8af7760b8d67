//! Monte Carlo over the state engine.
//!
//! Trial `i` of a plan with master seed `s` uses run id `i` on every random
//! lane, so an estimate does not depend on how trials are split across
//! threads.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::{Detector, EfficiencyParams};
use crate::codes::{logical_projection, make_redundant, CodeLayout, LogicalQubitSpec};
use crate::error::{Error, Result};
use crate::protocols::{active_memory_cycle, cnot_logical, x90_logical, z_theta_logical, Run, TerminalStatus};
use crate::qstate::{fidelity, gate, Engine, Unitary};
use crate::rng::{Lane, Stream};

/// A successful trial must reproduce the ideal logical state this closely.
pub const FIDELITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Protocol {
    Memory,
    ZTheta(f64),
    X90,
    Cnot,
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Protocol::Memory => write!(f, "memory"),
            Protocol::ZTheta(t) => write!(f, "ztheta:{t}"),
            Protocol::X90 => write!(f, "x90"),
            Protocol::Cnot => write!(f, "cnot"),
        }
    }
}

impl FromStr for Protocol {
    type Err = Error;

    /// `memory`, `x90`, `cnot` or `ztheta:<radians>`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "memory" => Ok(Protocol::Memory),
            "x90" => Ok(Protocol::X90),
            "cnot" => Ok(Protocol::Cnot),
            _ => match s.strip_prefix("ztheta:").map(str::parse::<f64>) {
                Some(Ok(t)) if t.is_finite() => Ok(Protocol::ZTheta(t)),
                _ => Err(Error::Domain(format!("unknown protocol `{s}`"))),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialPlan {
    pub protocol: Protocol,
    pub layout: CodeLayout,
    pub trials: usize,
    pub seed: u64,
}

impl TrialPlan {
    pub fn new(protocol: Protocol, layout: CodeLayout, trials: usize, seed: u64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::Domain("trial count must be >= 1".into()));
        }
        Ok(TrialPlan {
            protocol,
            layout,
            trials,
            seed,
        })
    }
}

/// How each trial ended. The four classes partition the trials.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Taxonomy {
    /// Success with no loss recovery and no idle iteration.
    pub clean: usize,
    /// Success after at least one heralded partial failure.
    pub recovered: usize,
    /// Success after CNOT iterations that made no progress, without any
    /// partial failure.
    pub no_progress: usize,
    pub failure: usize,
}

impl Taxonomy {
    pub fn total(&self) -> usize {
        self.clean + self.recovered + self.no_progress + self.failure
    }

    fn merge(self, o: Taxonomy) -> Taxonomy {
        Taxonomy {
            clean: self.clean + o.clean,
            recovered: self.recovered + o.recovered,
            no_progress: self.no_progress + o.no_progress,
            failure: self.failure + o.failure,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub trials: usize,
    pub successes: usize,
    pub p_hat: f64,
    /// Binomial standard error `sqrt(p(1-p)/N)`.
    pub std_err: f64,
    pub taxonomy: Taxonomy,
    pub mean_fusions: f64,
}

#[derive(Default)]
struct Tally {
    taxonomy: Taxonomy,
    fusions: usize,
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally {
            taxonomy: self.taxonomy.merge(o.taxonomy),
            fusions: self.fusions + o.fusions,
        }
    }
}

/// Uniformly random input state on the Bloch sphere.
fn random_input(aux: &mut Stream) -> LogicalQubitSpec {
    let theta = (1.0 - 2.0 * aux.uniform()).acos();
    let phi = std::f64::consts::TAU * aux.uniform();
    LogicalQubitSpec::bloch(theta, phi)
}

fn apply(u: &Unitary, v: [C64; 2]) -> [C64; 2] {
    [u[0][0] * v[0] + u[0][1] * v[1], u[1][0] * v[0] + u[1][1] * v[1]]
}

/// Runs one trial; returns the terminal status and the run.
pub fn run_trial(plan: &TrialPlan, eff: &EfficiencyParams, index: u64) -> Result<(TerminalStatus, Run)> {
    let layout = plan.layout;
    let mut run = Run::new(Engine::new(plan.seed, index), Detector::random(*eff, plan.seed, index));
    let mut aux = Stream::new(plan.seed, index, Lane::Aux);
    let a = random_input(&mut aux);
    let mut q = make_redundant(&mut run.engine, &a, layout)?;
    let (status, got, want) = match plan.protocol {
        Protocol::Cnot => {
            let b = random_input(&mut aux);
            let mut t = make_redundant(&mut run.engine, &b, layout)?;
            let status = cnot_logical(&mut run, &mut q, &mut t, layout)?;
            let (x, y) = (a.amplitudes(), b.amplitudes());
            let want = vec![x[0] * y[0], x[0] * y[1], x[1] * y[1], x[1] * y[0]];
            let got = if status.is_success() { logical_projection(&run.engine, &[&q, &t])? } else { Vec::new() };
            (status, got, want)
        }
        single => {
            let (status, u) = match single {
                Protocol::Memory => (active_memory_cycle(&mut run, &mut q, layout)?, gate::identity()),
                Protocol::ZTheta(t) => (z_theta_logical(&mut run, &mut q, layout, t)?, gate::z_theta(t)),
                _ => (x90_logical(&mut run, &mut q, layout)?, gate::x_theta(std::f64::consts::FRAC_PI_2)),
            };
            let got = if status.is_success() { logical_projection(&run.engine, &[&q])? } else { Vec::new() };
            (status, got, apply(&u, a.amplitudes()).to_vec())
        }
    };
    if status.is_success() {
        let f = fidelity(&want, &got);
        if f < 1.0 - FIDELITY_TOL {
            return Err(Error::Fidelity(f));
        }
    }
    Ok((status, run))
}

/// Estimates the success probability of `plan` at efficiencies `eff`.
/// Trials run in parallel.
pub fn run_monte_carlo(plan: &TrialPlan, eff: &EfficiencyParams) -> Result<Estimate> {
    if plan.trials == 0 {
        return Err(Error::Domain("trial count must be >= 1".into()));
    }
    let tally = (0..plan.trials as u64)
        .into_par_iter()
        .map(|i| {
            let (status, run) = run_trial(plan, eff, i)?;
            let mut t = Tally {
                fusions: run.record.fusion_attempts,
                ..Tally::default()
            };
            match status {
                TerminalStatus::LogicalFailure => t.taxonomy.failure = 1,
                TerminalStatus::RecoveredThenSuccess => t.taxonomy.recovered = 1,
                TerminalStatus::Success if run.record.no_progress > 0 => t.taxonomy.no_progress = 1,
                TerminalStatus::Success => t.taxonomy.clean = 1,
            }
            Ok(t)
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
    let n = plan.trials as f64;
    let successes = plan.trials - tally.taxonomy.failure;
    let p_hat = successes as f64 / n;
    Ok(Estimate {
        trials: plan.trials,
        successes,
        p_hat,
        std_err: (p_hat * (1.0 - p_hat) / n).sqrt(),
        taxonomy: tally.taxonomy,
        mean_fusions: tally.fusions as f64 / n,
    })
}
