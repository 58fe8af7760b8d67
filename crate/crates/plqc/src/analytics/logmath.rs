//! Log-space arithmetic for probabilities far below `f64::MIN_POSITIVE`.

/// `ln(sum exp(x_i))`; empty or all `-inf` gives `-inf`.
pub fn lse<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    // streaming form: rescale the running sum whenever the maximum moves
    let (mut max, mut sum) = (f64::NEG_INFINITY, 0.0);
    for t in terms {
        if t == f64::NEG_INFINITY {
            continue;
        }
        if t == f64::INFINITY {
            return t;
        }
        if t <= max {
            sum += (t - max).exp();
        } else {
            sum = sum * (max - t).exp() + 1.0;
            max = t;
        }
    }
    if max == f64::NEG_INFINITY {
        max
    } else {
        max + sum.ln()
    }
}

/// `ln(1 - e^x)` for `x <= 0`.
pub fn ln1mexp(x: f64) -> f64 {
    if x > -std::f64::consts::LN_2 {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}

/// `ln(-ln(1 - e^la))`, i.e. the log of `-log1p(-a)` given `ln a`.
pub fn ln_neg_log1m(la: f64) -> f64 {
    if la == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else if la < -20.0 {
        // -ln(1-a) = a (1 + a/2 + ...)
        la + (la.exp() / 2.0).ln_1p()
    } else if la >= 0.0 {
        f64::INFINITY
    } else {
        (-(-la.exp()).ln_1p()).ln()
    }
}

/// `ln x` with `ln 0 = -inf`.
pub fn ln(x: f64) -> f64 {
    if x <= 0.0 {
        f64::NEG_INFINITY
    } else {
        x.ln()
    }
}

/// `k * ln_x` with the convention `0 * -inf = 0`.
pub fn pow_ln(ln_x: f64, k: f64) -> f64 {
    if k == 0.0 {
        0.0
    } else {
        k * ln_x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lse_matches_direct_and_handles_underflow() {
        let v = lse([0.1f64.ln(), 0.2f64.ln(), f64::NEG_INFINITY]);
        assert!((v.exp() - 0.3).abs() < 1e-15);
        let tiny = lse([-800.0, -800.0]);
        assert!((tiny - (-800.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(lse(std::iter::empty()), f64::NEG_INFINITY);
    }

    #[test]
    fn complements() {
        assert!((ln1mexp(0.25f64.ln()) - 0.75f64.ln()).abs() < 1e-15);
        assert!((ln1mexp(-1e-20) - (1e-20f64).ln()).abs() < 1e-12);
        assert_eq!(ln1mexp(0.0), f64::NEG_INFINITY);
        let a: f64 = 0.3;
        assert!((ln_neg_log1m(a.ln()).exp() - (-(1.0 - a).ln())).abs() < 1e-15);
        assert!((ln_neg_log1m(-700.0) - (-700.0)).abs() < 1e-12);
    }
}
