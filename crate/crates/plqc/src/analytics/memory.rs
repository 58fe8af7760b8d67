//! Re-encoding success probabilities for the active memory cycle.

use super::logmath::{ln, ln1mexp, ln_neg_log1m, lse, pow_ln};
use super::{check_eta, check_n, check_q};
use crate::error::{Error, Result};

/// The `q`-independent parts of the memory model at fixed `(n, eta1, eta2)`,
/// all held as natural logs. Every probability is then a function of `ln q`.
#[derive(Debug, Clone)]
pub struct MemoryModel {
    pub n: usize,
    pub eta1: f64,
    pub eta2: f64,
    ln_pqs: f64,
    /// Parts of `P_ff - (1-eta1)^n` that do not depend on `q`.
    ln_fixed: f64,
    ln_s2: f64,
    ln_c: f64,
    /// `ln (1-eta2)^n`, the chance a fresh block is entirely lost.
    ln_a: f64,
}

/// Everything the memory model says at one `(n, q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemoryPoint {
    pub p_qs: f64,
    pub p_ff: f64,
    pub p_qf: f64,
    pub recovery_r: f64,
    pub p_e: f64,
    pub ln_one_minus_p_e: f64,
}

impl MemoryModel {
    pub fn new(n: usize, eta1: f64, eta2: f64) -> Result<Self> {
        check_n(n)?;
        check_eta(eta1, eta2)?;
        let lx = ln(eta1 * eta2 / 2.0);
        let le1 = ln(eta1);
        let ll = ln(1.0 - eta1);
        let l_loss = ln((-eta1 * eta2).ln_1p().exp());
        let nf = n as f64;
        let ln_pqs = lse((1..n).map(|i| pow_ln(lx, i as f64) + pow_ln(le1, (n - i) as f64)));
        // first fusion lost and everything after it missing, minus the
        // complete-loss term c that appears with the opposite sign
        let first = pow_ln(ll, nf - 1.0) + le1 + ln(1.0 - eta2);
        let t1_rest = lse((2..n).map(|j| pow_ln(lx, (j - 1) as f64) + l_loss + pow_ln(ll, (n - j) as f64)));
        let t3 = pow_ln(lx, nf - 1.0) + ll;
        // inner[r] = sum_{k<r} eta1^k (1-eta1)^{r-k}
        let mut inner = vec![f64::NEG_INFINITY; n];
        for r in 1..n {
            inner[r] = lse([ll + inner[r - 1], pow_ln(le1, (r - 1) as f64) + ll]);
        }
        let ln_s2 = lse((0..n - 1).map(|j| pow_ln(lx, (j + 1) as f64) + inner[n - 1 - j]));
        Ok(MemoryModel {
            n,
            eta1,
            eta2,
            ln_pqs,
            ln_fixed: lse([first, t1_rest, t3]),
            ln_s2,
            ln_c: pow_ln(ll, nf),
            ln_a: pow_ln(ln(1.0 - eta2), nf),
        })
    }

    pub fn ln_p_qs(&self) -> f64 {
        self.ln_pqs
    }

    /// `ln R`: some fresh block of the resource is lost entirely.
    pub fn ln_recovery_r(&self, ln_q: f64) -> f64 {
        let ln_v = ln_q + ln_neg_log1m(self.ln_a);
        ln1mexp(-ln_v.exp())
    }

    /// `ln (P_ff - (1-eta1)^n)`, a sum of positive terms.
    fn ln_pff_minus_c(&self, ln_q: f64) -> f64 {
        lse([self.ln_fixed, self.ln_recovery_r(ln_q) + self.ln_s2])
    }

    pub fn ln_p_ff(&self, ln_q: f64) -> f64 {
        lse([self.ln_pff_minus_c(ln_q), self.ln_c])
    }

    /// `ln (1 - P_E)`, accurate even when `1 - P_E` is far below machine
    /// epsilon: `1 - P_E = [(P_ff - c) + P_Qs (1 - d^q) + P_Qs Qf^q] / (eps - c)`
    /// with `d = 1 - c` and `Qf = 1 - eps`.
    pub fn ln_one_minus_p_e(&self, ln_q: f64) -> f64 {
        if self.ln_pqs == f64::NEG_INFINITY {
            return 0.0;
        }
        let pffc = self.ln_pff_minus_c(ln_q);
        let ln_eps = lse([self.ln_pqs, pffc, self.ln_c]);
        let ln_u1 = ln_q + ln_neg_log1m(self.ln_c);
        let ln_u2 = ln_q + ln_neg_log1m(ln_eps);
        let num = lse([pffc, self.ln_pqs + ln1mexp(-ln_u1.exp()), self.ln_pqs - ln_u2.exp()]);
        let den = lse([self.ln_pqs, pffc]);
        (num - den).min(0.0)
    }

    pub fn p_e(&self, ln_q: f64) -> f64 {
        -self.ln_one_minus_p_e(ln_q).exp_m1()
    }

    pub fn point(&self, q: f64) -> MemoryPoint {
        let ln_q = q.ln();
        let p_qs = self.ln_pqs.exp();
        let p_ff = self.ln_p_ff(ln_q).exp();
        let l1m = self.ln_one_minus_p_e(ln_q);
        MemoryPoint {
            p_qs,
            p_ff,
            p_qf: (1.0 - p_qs - p_ff).max(0.0),
            recovery_r: self.ln_recovery_r(ln_q).exp(),
            p_e: -l1m.exp_m1(),
            ln_one_minus_p_e: l1m,
        }
    }

    /// Search window for `ln q`: the optimum sits near `-ln P_Qs`.
    fn ln_q_window(&self) -> f64 {
        (-self.ln_pqs).max(0.0) + 40.0
    }

    /// Continuous maximiser of `P_E` over `ln q >= 0`, by a grid scan then
    /// golden-section refinement on `ln(1 - P_E)`. Returns `(ln q, ln(1-P_E),
    /// at_boundary)`.
    pub fn continuous_optimum(&self) -> (f64, f64, bool) {
        let hi = self.ln_q_window();
        let steps = ((hi / 0.05).ceil() as usize).max(20);
        let h = hi / steps as f64;
        let f = |l: f64| self.ln_one_minus_p_e(l);
        let mut best = (0usize, f(0.0));
        for k in 1..=steps {
            let v = f(k as f64 * h);
            if v < best.1 {
                best = (k, v);
            }
        }
        if best.1 == f64::NEG_INFINITY || best.0 == steps {
            return (best.0 as f64 * h, best.1, true);
        }
        let (mut a, mut b) = ((best.0.max(1) - 1) as f64 * h, (best.0 + 1) as f64 * h);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let (mut c, mut d) = (b - g * (b - a), a + g * (b - a));
        let (mut fc, mut fd) = (f(c), f(d));
        for _ in 0..100 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = f(d);
            }
            if b - a < 1e-10 {
                break;
            }
        }
        let l = (a + b) / 2.0;
        let v = f(l);
        if v <= best.1 {
            (l, v, false)
        } else {
            (best.0 as f64 * h, best.1, false)
        }
    }
}

pub fn p_qs(n: usize, eta1: f64, eta2: f64) -> Result<f64> {
    Ok(MemoryModel::new(n, eta1, eta2)?.ln_pqs.exp())
}

pub fn recovery_r(n: usize, q: f64, eta2: f64) -> Result<f64> {
    check_q(q)?;
    Ok(MemoryModel::new(n, 1.0, eta2)?.ln_recovery_r(q.ln()).exp())
}

pub fn p_ff(n: usize, q: f64, eta1: f64, eta2: f64) -> Result<f64> {
    check_q(q)?;
    Ok(MemoryModel::new(n, eta1, eta2)?.point(q).p_ff)
}

pub fn p_qf(n: usize, q: f64, eta1: f64, eta2: f64) -> Result<f64> {
    check_q(q)?;
    Ok(MemoryModel::new(n, eta1, eta2)?.point(q).p_qf)
}

pub fn p_e(n: usize, q: f64, eta1: f64, eta2: f64) -> Result<f64> {
    check_q(q)?;
    Ok(MemoryModel::new(n, eta1, eta2)?.point(q).p_e)
}

pub fn one_minus_p_e(n: usize, q: f64, eta1: f64, eta2: f64) -> Result<f64> {
    check_q(q)?;
    Ok(MemoryModel::new(n, eta1, eta2)?.ln_one_minus_p_e(q.ln()).exp())
}

/// Result of the optimal-`q` search.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalQ {
    /// Best integer `q` in `[1, q_max]`, smallest on ties.
    pub q: u128,
    pub p_e: f64,
    /// Continuous stationary point of `P_E` in `q`.
    pub q_continuous: f64,
    pub ln_q_continuous: f64,
    /// Set when the maximum sits on the edge of the search range.
    pub warning: Option<String>,
}

/// Large enough to hold the optimum for block sizes up to about 100 photons
/// near the memory threshold.
pub const DEFAULT_Q_MAX: u128 = 1_000_000_000_000_000_000_000_000_000_000;

/// Every integer up to this is tried; beyond it only the integers around
/// the continuous optimum and `q_max` itself.
const EXHAUSTIVE_Q: u128 = 1 << 12;

pub fn optimal_q(n: usize, eta1: f64, eta2: f64) -> Result<OptimalQ> {
    optimal_q_with(n, eta1, eta2, DEFAULT_Q_MAX)
}

pub fn optimal_q_with(n: usize, eta1: f64, eta2: f64, q_max: u128) -> Result<OptimalQ> {
    if q_max == 0 {
        return Err(Error::Domain("q_max must be at least 1".into()));
    }
    let model = MemoryModel::new(n, eta1, eta2)?;
    let (ln_qc, _, edge) = model.continuous_optimum();
    let mut candidates: Vec<u128> = (1..=q_max.min(EXHAUSTIVE_Q)).collect();
    if q_max > EXHAUSTIVE_Q {
        // past the scan window the objective is smooth and unimodal in ln q,
        // and f64 cannot tell neighbouring integers apart anyway
        let qc = ln_qc.exp();
        let near = [qc.floor(), qc.ceil()]
            .into_iter()
            .filter(|&v| v.is_finite() && v > EXHAUSTIVE_Q as f64)
            .map(|v| (v as u128).min(q_max));
        candidates.extend(near);
        candidates.push(q_max);
        candidates.sort_unstable();
        candidates.dedup();
    }
    let mut best = (1u128, f64::INFINITY);
    for q in candidates {
        let v = model.ln_one_minus_p_e((q as f64).ln());
        if v < best.1 {
            best = (q, v);
        }
    }
    let warning = if best.0 == q_max || edge {
        Some(format!("P_E still increasing at the search boundary (q_max = {q_max}); no interior maximum"))
    } else {
        None
    };
    Ok(OptimalQ {
        q: best.0,
        p_e: -best.1.exp_m1(),
        q_continuous: ln_qc.exp(),
        ln_q_continuous: ln_qc,
        warning,
    })
}
