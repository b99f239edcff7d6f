//! Beta distribution pieces needed for candidate interpolation.
//!
//! The distribution is parameterized by its mode `m` and a sharpness `beta`;
//! the matching standard shape is `alpha = (m*beta - 2m + 1) / (1 - m)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lowest and highest admissible mode; `alpha` diverges at `m = 1`.
pub const MODE_EPSILON: f64 = 1e-3;

const CF_TOLERANCE: f64 = 1e-15;
const CF_MAX_ITER: usize = 10_000;
const TINY: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaParams {
    m: f64,
    beta: f64,
}

impl BetaParams {
    /// `m` is clamped into `[MODE_EPSILON, 1 - MODE_EPSILON]`.
    pub fn new(m: f64, beta: f64) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::domain(format!("beta mode must be finite, got {m}")));
        }
        if !(beta.is_finite() && beta >= 1.0) {
            return Err(Error::domain(format!(
                "beta sharpness must be >= 1, got {beta}"
            )));
        }
        Ok(Self {
            m: m.clamp(MODE_EPSILON, 1.0 - MODE_EPSILON),
            beta,
        })
    }

    pub fn mode(&self) -> f64 {
        self.m
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn alpha(&self) -> f64 {
        (self.m * self.beta - 2.0 * self.m + 1.0) / (1.0 - self.m)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        regularized_incomplete_beta(self.alpha(), self.beta, x)
    }

    /// Probability mass of `[lo, hi]`.
    pub fn interval(&self, lo: f64, hi: f64) -> f64 {
        let (a, b) = (self.alpha(), self.beta);
        let mean = a / (a + b);
        if lo >= mean {
            // Upper tail: difference of survival functions keeps relative accuracy.
            let s_lo = regularized_incomplete_beta(b, a, 1.0 - lo);
            let s_hi = regularized_incomplete_beta(b, a, 1.0 - hi);
            (s_lo - s_hi).max(0.0)
        } else {
            (regularized_incomplete_beta(a, b, hi) - regularized_incomplete_beta(a, b, lo)).max(0.0)
        }
    }
}

/// Probability that the `i`-th of `m_words` equal slices of `[0, 1]` receives.
pub fn beta_interval_prob(params: &BetaParams, m_words: usize, i: usize) -> Result<f64> {
    if m_words == 0 {
        return Err(Error::domain("cannot split [0, 1] into zero intervals"));
    }
    if i == 0 || i > m_words {
        return Err(Error::domain(format!("interval {i} outside 1..={m_words}")));
    }
    let width = m_words as f64;
    let lo = (i - 1) as f64 / width;
    let hi = if i == m_words { 1.0 } else { i as f64 / width };
    Ok(params.interval(lo, hi))
}

/// All `m_words` interval probabilities at once.
pub fn beta_interval_probs(params: &BetaParams, m_words: usize) -> Vec<f64> {
    (1..=m_words)
        .map(|i| beta_interval_prob(params, m_words, i).expect("index in range"))
        .collect()
}

/// Natural log of the gamma function (Lanczos, g = 7, n = 9).
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    for (k, c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + k as f64);
    }
    let t = x + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized incomplete beta `I_x(a, b)` by continued fraction (modified Lentz).
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    // The fraction converges quickly only below the distribution's mean.
    if x < (a + 1.0) / (a + b + 2.0) {
        front * continued_fraction(a, b, x) / a
    } else {
        1.0 - front * continued_fraction(b, a, 1.0 - x) / b
    }
}

fn continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;

        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;

        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < CF_TOLERANCE {
            break;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_follows_mode_parameterization() {
        let p = BetaParams::new(0.3, 5.0).unwrap();
        assert!((p.alpha() - 1.9 / 0.7).abs() < 1e-12);
        // Symmetric at the midpoint.
        let p = BetaParams::new(0.5, 6.0).unwrap();
        assert!((p.alpha() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn mode_is_clamped() {
        let p = BetaParams::new(1.0, 5.0).unwrap();
        assert_eq!(p.mode(), 1.0 - MODE_EPSILON);
        assert!(p.alpha().is_finite());
        let p = BetaParams::new(-0.5, 5.0).unwrap();
        assert_eq!(p.mode(), MODE_EPSILON);
        assert!(BetaParams::new(f64::NAN, 5.0).is_err());
        assert!(BetaParams::new(0.5, 0.5).is_err());
    }

    #[test]
    fn ln_gamma_matches_factorials() {
        let mut fact = 1.0f64;
        for n in 1..20 {
            assert!((ln_gamma(n as f64) - fact.ln()).abs() < 1e-10, "{n}");
            fact *= n as f64;
        }
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-12);
    }

    #[test]
    fn incomplete_beta_closed_forms() {
        // I_x(1, 1) = x; I_x(a, 1) = x^a; I_x(1, b) = 1 - (1-x)^b.
        for &x in &[0.01, 0.2, 0.5, 0.77, 0.999] {
            assert!((regularized_incomplete_beta(1.0, 1.0, x) - x).abs() < 1e-14);
            assert!((regularized_incomplete_beta(3.5, 1.0, x) - x.powf(3.5)).abs() < 1e-13);
            let expect = 1.0 - (1.0 - x).powf(5.0);
            assert!((regularized_incomplete_beta(1.0, 5.0, x) - expect).abs() < 1e-13);
        }
        assert_eq!(regularized_incomplete_beta(2.0, 3.0, 0.0), 0.0);
        assert_eq!(regularized_incomplete_beta(2.0, 3.0, 1.0), 1.0);
    }

    #[test]
    fn interval_probabilities_are_symmetric_at_midpoint() {
        let p = BetaParams::new(0.5, 6.0).unwrap();
        for m_words in [1usize, 2, 7, 50, 651] {
            let probs = beta_interval_probs(&p, m_words);
            for i in 0..m_words {
                let j = m_words - 1 - i;
                assert!((probs[i] - probs[j]).abs() < 1e-14, "M={m_words} i={i}");
            }
        }
    }

    #[test]
    fn interval_arguments_are_checked() {
        let p = BetaParams::new(0.3, 5.0).unwrap();
        assert!(beta_interval_prob(&p, 0, 1).is_err());
        assert!(beta_interval_prob(&p, 10, 0).is_err());
        assert!(beta_interval_prob(&p, 10, 11).is_err());
        assert!((beta_interval_prob(&p, 1, 1).unwrap() - 1.0).abs() < 1e-15);
    }
}
