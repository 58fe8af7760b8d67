//! `min:max[:step]` ranges for command-line sweeps.

use std::str::FromStr;

/// Default step of an efficiency range given as `min:max`.
pub const DEFAULT_ETA_STEP: f64 = 0.01;

fn split(s: &str) -> Result<Vec<&str>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.is_empty() || parts.len() > 3 || parts.iter().any(|p| p.trim().is_empty()) {
        return Err(format!("`{s}` is not of the form min:max[:step]"));
    }
    Ok(parts)
}

/// Inclusive integer range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntRange {
    pub min: usize,
    pub max: usize,
    pub step: usize,
}

impl IntRange {
    pub fn single(v: usize) -> Self {
        IntRange { min: v, max: v, step: 1 }
    }

    pub fn values(&self) -> Vec<usize> {
        (self.min..=self.max).step_by(self.step).collect()
    }
}

impl FromStr for IntRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts = split(s)?;
        let num = |p: &str| p.trim().parse::<usize>().map_err(|e| format!("`{p}`: {e}"));
        let min = num(parts[0])?;
        let max = parts.get(1).map(|p| num(p)).transpose()?.unwrap_or(min);
        let step = parts.get(2).map(|p| num(p)).transpose()?.unwrap_or(1);
        if max < min || step == 0 {
            return Err(format!("empty range `{s}`"));
        }
        Ok(IntRange { min, max, step })
    }
}

/// Inclusive real range; grid points are rounded to 12 decimals so that
/// `0.8:1.0:0.01` prints as written.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealRange {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl RealRange {
    pub fn single(v: f64) -> Self {
        RealRange {
            min: v,
            max: v,
            step: DEFAULT_ETA_STEP,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        let count = ((self.max - self.min) / self.step + 1e-9).floor() as usize;
        (0..=count)
            .map(|k| ((self.min + k as f64 * self.step) * 1e12).round() / 1e12)
            .collect()
    }
}

impl FromStr for RealRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts = split(s)?;
        let num = |p: &str| match p.trim().parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(format!("`{p}` is not a finite number")),
        };
        let min = num(parts[0])?;
        let max = parts.get(1).map(|p| num(p)).transpose()?.unwrap_or(min);
        let step = parts.get(2).map(|p| num(p)).transpose()?.unwrap_or(DEFAULT_ETA_STEP);
        if max < min || step <= 0.0 {
            return Err(format!("empty range `{s}`"));
        }
        Ok(RealRange { min, max, step })
    }
}
