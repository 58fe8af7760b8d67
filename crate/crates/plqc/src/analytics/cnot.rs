//! No-progress and progress probabilities for the logical CNOT.
//!
//! `K + M` can exceed one (for example at perfect efficiency, where
//! `K = 1 - 2^-n` and `M` tends to `2^-(n-1)`), so `K/(1-M)` can exceed one.
//! Both the raw power and a copy clamped to `[0, 1]` are reported.

use super::logmath::{ln, ln1mexp, lse, pow_ln};
use super::memory::MemoryModel;
use super::{check_eta, check_n, check_q};
use crate::error::Result;

/// The five no-progress classes, their total and the progress probability.
#[derive(Debug, Clone, PartialEq)]
pub struct MTerms {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    pub m4: f64,
    pub m5: f64,
    pub m: f64,
    pub k: f64,
    /// `1 - M` computed from the complementary event classes, so it stays
    /// accurate when `M` is within machine epsilon of one.
    pub one_minus_m: f64,
    pub ln_k: f64,
    pub ln_one_minus_m: f64,
    pub p_total: f64,
    pub p_total_clamped: f64,
    /// Odd `n` puts half-integer exponents into `M4`, `M5` and `K`.
    pub odd_n: bool,
}

/// `q`-independent pieces of the CNOT model in log form.
#[derive(Debug, Clone)]
pub struct CnotModel {
    pub n: usize,
    ln_m: [f64; 5],
    ln_k: f64,
    /// Complement of `M1..M4` with `M5` already subtracted.
    ln_rest: f64,
}

impl CnotModel {
    pub fn new(n: usize, eta1: f64, eta2: f64) -> Result<Self> {
        check_n(n)?;
        check_eta(eta1, eta2)?;
        let x = eta1 * eta2 / 2.0;
        let lx = ln(x);
        let le1 = ln(eta1);
        let ll = ln(1.0 - eta1);
        let ll2 = ln(1.0 - eta2);
        let l_loss = ln((-eta1 * eta2).ln_1p().exp());
        let half = n as f64 / 2.0;
        let xi = |i: usize| pow_ln(lx, i as f64);
        let e1p = |k: usize| pow_ln(le1, k as f64);
        let lp = |k: f64| pow_ln(ll, k);
        // ln(1 - l^k)
        let hit = |k: f64| ln1mexp(lp(k));

        let m1 = xi(n - 1) + le1;
        let m2 = lse((0..n - 1).map(|i| xi(i) + l_loss + hit((n - i - 1) as f64)));
        let m3 = lse((1..n.saturating_sub(1)).flat_map(|i| {
            (0..n - i - 1).map(move |j| xi(i) + e1p(j) + ll + hit((n - i - j - 1) as f64))
        }));
        // inner4[r] = sum_{j<r} eta1^j (1-eta1)^{r-j}
        let inner4 = |r: usize| lse((0..r).map(|j| e1p(j) + lp((r - j) as f64)));
        let ln_a = pow_ln(ll2, n as f64);
        let ln_b = pow_ln(ll2, half + 1.0);
        let q_resource = ln1mexp(ln_a) + ln1mexp(ln_b);
        let m4 = lse((1..n).map(|i| xi(i) + inner4(n - i))) + q_resource;
        let tail5 = ll + lx + hit(half + 1.0);
        let m5 = lse((1..n).map(|i| xi(i) + e1p(n - i) + tail5));
        let bracket_k = lse([lx, l_loss + hit((n - 1) as f64) + ln1mexp(pow_ln(ll2, half))]);
        let ln_k = lse((0..n).map(|i| xi(i) + e1p(n - i))) + bracket_k;

        // 1 - (M1+..+M4) - M5, term by term over the same event tree.
        let one_minus_q = lse([ln_a, ln_b + ln1mexp(ln_a)]);
        let keep5 = ln1mexp(tail5);
        let rest = lse([
            xi(n - 1) + ll,
            lse((0..n - 1).map(|i| xi(i) + l_loss + lp((n - i - 1) as f64))),
            lse((1..n).map(|i| xi(i) + e1p(n - i) + keep5)),
            one_minus_q + lse((1..n).map(|i| xi(i) + inner4(n - i))),
        ]);
        Ok(CnotModel {
            n,
            ln_m: [m1, m2, m3, m4, m5],
            ln_k,
            ln_rest: rest,
        })
    }

    pub fn ln_k(&self) -> f64 {
        self.ln_k
    }

    /// `ln(1 - M)` given `ln(1 - P_E)`.
    pub fn ln_one_minus_m(&self, ln_one_minus_pe: f64) -> f64 {
        let s = lse(self.ln_m[..4].iter().copied());
        lse([ln_one_minus_pe + s, self.ln_rest])
    }

    /// `ln(K / (1 - M))`.
    pub fn ln_ratio(&self, ln_one_minus_pe: f64) -> f64 {
        self.ln_k - self.ln_one_minus_m(ln_one_minus_pe)
    }

    /// `ln P_TOTAL` at `ln q`, and the clamped counterpart (never above 0).
    pub fn ln_p_total(&self, ln_q: f64, ln_one_minus_pe: f64) -> (f64, f64) {
        let r = self.ln_ratio(ln_one_minus_pe);
        let raw = if r == 0.0 { 0.0 } else { r.signum() * (ln_q + r.abs().ln()).exp() };
        (raw, raw.min(0.0))
    }

    pub fn terms(&self, q: f64, ln_one_minus_pe: f64) -> MTerms {
        let [m1, m2, m3, m4, m5] = self.ln_m.map(f64::exp);
        let p_e = -ln_one_minus_pe.exp_m1();
        let l1m = self.ln_one_minus_m(ln_one_minus_pe);
        let (raw, clamped) = self.ln_p_total(q.ln(), ln_one_minus_pe);
        MTerms {
            m1,
            m2,
            m3,
            m4,
            m5,
            m: p_e * (m1 + m2 + m3 + m4) + m5,
            k: self.ln_k.exp(),
            one_minus_m: l1m.exp(),
            ln_k: self.ln_k,
            ln_one_minus_m: l1m,
            p_total: raw.exp(),
            p_total_clamped: clamped.exp(),
            odd_n: self.n % 2 == 1,
        }
    }
}

pub fn m_terms(n: usize, q: f64, eta1: f64, eta2: f64) -> Result<MTerms> {
    check_q(q)?;
    let mem = MemoryModel::new(n, eta1, eta2)?;
    let model = CnotModel::new(n, eta1, eta2)?;
    Ok(model.terms(q, mem.ln_one_minus_p_e(q.ln())))
}

pub fn progress_k(n: usize, eta1: f64, eta2: f64) -> Result<f64> {
    Ok(CnotModel::new(n, eta1, eta2)?.ln_k.exp())
}

/// `(K/(1-M))^q` raw and clamped to `[0, 1]`.
pub fn p_total(n: usize, q: f64, eta1: f64, eta2: f64) -> Result<(f64, f64)> {
    let t = m_terms(n, q, eta1, eta2)?;
    Ok((t.p_total, t.p_total_clamped))
}
