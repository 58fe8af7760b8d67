//! Bisection on a uniform efficiency for the point above which success can
//! be pushed towards one by growing the code.

use std::fmt;

use super::cnot::CnotModel;
use super::memory::MemoryModel;
use crate::error::{Error, Result};
use crate::lossmodel::EfficiencyParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolKind {
    Memory,
    Cnot,
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProtocolKind::Memory => "memory",
            ProtocolKind::Cnot => "cnot",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdConfig {
    pub protocol: ProtocolKind,
    /// Block sizes to walk; success must not drop along them.
    pub schedule: Vec<usize>,
    /// The last point of the schedule must beat `1 - tolerance`.
    pub tolerance: f64,
    /// Maximum width of the final bracket.
    pub width: f64,
    /// Components held fixed instead of following the swept value.
    pub eta_s: Option<f64>,
    pub eta_m: Option<f64>,
    pub eta_d: Option<f64>,
    pub lo: f64,
    pub hi: f64,
}

impl ThresholdConfig {
    pub fn new(protocol: ProtocolKind) -> Self {
        ThresholdConfig {
            protocol,
            schedule: (2..=10).map(|k| 1usize << k).collect(),
            tolerance: 1e-3,
            width: 0.005,
            eta_s: None,
            eta_m: None,
            eta_d: None,
            lo: 0.5,
            hi: 1.0,
        }
    }

    pub fn efficiencies(&self, eta: f64) -> Result<EfficiencyParams> {
        EfficiencyParams::new(self.eta_s.unwrap_or(eta), self.eta_m.unwrap_or(eta), self.eta_d.unwrap_or(eta))
    }
}

/// Success along the schedule at one swept efficiency.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdRow {
    pub eta: f64,
    /// `(n, ln q*, success, ln(1 - success))`; success is clamped for CNOT.
    pub points: Vec<(usize, f64, f64, f64)>,
    pub passes: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdReport {
    pub protocol: ProtocolKind,
    pub rows: Vec<ThresholdRow>,
    /// Midpoint of the final bracket; `None` when even the top of the range fails.
    pub eta_star: Option<f64>,
    pub bracket: (f64, f64),
}

impl fmt::Display for ThresholdReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "protocol={}", self.protocol)?;
        for r in &self.rows {
            write!(f, "eta={:.6} pass={}", r.eta, if r.passes { "yes" } else { "no" })?;
            for (n, ln_q, p, _) in &r.points {
                // adding zero folds -0 into 0
                write!(f, " n={n}:q={:.4e}:p={:.6e}", ln_q.exp(), p + 0.0)?;
            }
            writeln!(f)?;
        }
        match self.eta_star {
            Some(e) => writeln!(f, "eta_star={e:.6}")?,
            None => writeln!(f, "eta_star=none")?,
        }
        write!(f, "bracket={:.6},{:.6}", self.bracket.0, self.bracket.1)
    }
}

/// Success and `ln(1 - success)` at `n` with the memory-optimal `q`.
fn evaluate(protocol: ProtocolKind, n: usize, eff: &EfficiencyParams) -> Result<(f64, f64, f64)> {
    let mem = MemoryModel::new(n, eff.eta1(), eff.eta2())?;
    let (ln_q, l1m_pe, _) = mem.continuous_optimum();
    match protocol {
        ProtocolKind::Memory => Ok((ln_q, -l1m_pe.exp_m1(), l1m_pe)),
        ProtocolKind::Cnot => {
            let cnot = CnotModel::new(n, eff.eta1(), eff.eta2())?;
            let (_, clamped) = cnot.ln_p_total(ln_q, l1m_pe);
            Ok((ln_q, clamped.exp(), super::logmath::ln1mexp(clamped)))
        }
    }
}

fn row(cfg: &ThresholdConfig, eta: f64) -> Result<ThresholdRow> {
    let eff = cfg.efficiencies(eta)?;
    let mut points = Vec::with_capacity(cfg.schedule.len());
    for &n in &cfg.schedule {
        let (ln_q, p, l1m) = evaluate(cfg.protocol, n, &eff)?;
        points.push((n, ln_q, p, l1m));
    }
    // Nondecreasing success means nonincreasing ln(1 - success); a relative
    // slack absorbs rounding once the values reach the clamp.
    let monotone = points
        .windows(2)
        .all(|w| w[1].3 <= w[0].3 || w[1].3 - w[0].3 <= 1e-9 * w[0].3.abs());
    let last = points.last().is_some_and(|p| p.3 < (cfg.tolerance).ln());
    Ok(ThresholdRow {
        eta,
        points,
        passes: monotone && last,
    })
}

pub fn find_threshold(cfg: &ThresholdConfig) -> Result<ThresholdReport> {
    if cfg.schedule.is_empty() || cfg.schedule.iter().any(|&n| n < 2) {
        return Err(Error::Domain("schedule needs block sizes of at least 2".into()));
    }
    if !(0.0..=1.0).contains(&cfg.lo) || !(cfg.lo..=1.0).contains(&cfg.hi) || !(cfg.width > 0.0) {
        return Err(Error::Domain(format!("bad range [{}, {}] or width {}", cfg.lo, cfg.hi, cfg.width)));
    }
    let mut rows = Vec::new();
    let top = row(cfg, cfg.hi)?;
    let top_passes = top.passes;
    rows.push(top);
    if !top_passes {
        return Ok(ThresholdReport {
            protocol: cfg.protocol,
            rows,
            eta_star: None,
            bracket: (cfg.hi, cfg.hi),
        });
    }
    let bottom = row(cfg, cfg.lo)?;
    let bottom_passes = bottom.passes;
    rows.push(bottom);
    if bottom_passes {
        return Ok(ThresholdReport {
            protocol: cfg.protocol,
            rows,
            eta_star: Some(cfg.lo),
            bracket: (cfg.lo, cfg.lo),
        });
    }
    let (mut lo, mut hi) = (cfg.lo, cfg.hi);
    while hi - lo > cfg.width {
        let mid = (lo + hi) / 2.0;
        let r = row(cfg, mid)?;
        if r.passes {
            hi = mid;
        } else {
            lo = mid;
        }
        rows.push(r);
    }
    rows.sort_by(|a, b| a.eta.total_cmp(&b.eta));
    Ok(ThresholdReport {
        protocol: cfg.protocol,
        rows,
        eta_star: Some((lo + hi) / 2.0),
        bracket: (lo, hi),
    })
}
