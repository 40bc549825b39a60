//! Validation protocols for comparing metrics: good/bad quality partitioning,
//! Welch's t-test, Levene's test and mean deviation from opinion scores.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::ConfusionCounts;

/// Significance level used when none is given.
pub const DEFAULT_ALPHA: f64 = 1e-5;

// ---------------------------------------------------------------------------
// Special functions
// ---------------------------------------------------------------------------

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
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

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
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
    for m in 1..=1000 {
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
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta `I_x(a, b)`, evaluated by Lentz's continued
/// fraction on whichever side of the mean converges faster.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b
    }
}

/// Two-tailed p-value `P(|T| >= |t|)` for Student's t with `dof` degrees of freedom.
pub fn student_t_two_tailed(t: f64, dof: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    regularized_incomplete_beta(dof / 2.0, 0.5, dof / (dof + t * t)).clamp(0.0, 1.0)
}

/// Upper tail `P(F >= f)` of the F distribution.
pub fn f_upper_tail(f: f64, d1: f64, d2: f64) -> f64 {
    if f <= 0.0 {
        return 1.0;
    }
    if f.is_infinite() {
        return 0.0;
    }
    regularized_incomplete_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f)).clamp(0.0, 1.0)
}

// ---------------------------------------------------------------------------
// Quality partitioning
// ---------------------------------------------------------------------------

/// Which false-positive rate the partition rules use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum FprDefinition {
    /// `fp / (tp + fp)`, the share of the prediction that is wrong.
    #[default]
    FalseDiscovery,
    /// `fp / (fp + tn)`.
    Conventional,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityThresholds {
    pub good_tpr_min: f64,
    pub good_fpr_max: f64,
    pub good_fnr_max: f64,
    pub bad_tpr_max: f64,
    pub bad_fpr_min: f64,
    pub bad_fnr_min: f64,
    pub fpr: FprDefinition,
}

impl Default for QualityThresholds {
    fn default() -> Self {
        QualityThresholds {
            good_tpr_min: 0.80,
            good_fpr_max: 0.20,
            good_fnr_max: 0.20,
            bad_tpr_max: 0.40,
            bad_fpr_min: 0.50,
            bad_fnr_min: 0.50,
            fpr: FprDefinition::FalseDiscovery,
        }
    }
}

impl QualityThresholds {
    pub fn validate(&self) -> Result<()> {
        let rates = [
            self.good_tpr_min,
            self.good_fpr_max,
            self.good_fnr_max,
            self.bad_tpr_max,
            self.bad_fpr_min,
            self.bad_fnr_min,
        ];
        if rates.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return Err(Error::InvalidArgument("thresholds must lie in [0, 1]".into()));
        }
        if self.good_tpr_min <= self.bad_tpr_max || self.good_fpr_max >= self.bad_fpr_min {
            return Err(Error::InvalidArgument(
                "good and bad threshold bands overlap".into(),
            ));
        }
        Ok(())
    }

    /// Applies `key=value` overrides, e.g. `good_tpr_min=0.9,bad_fpr_min=0.4`.
    pub fn with_overrides(mut self, spec: &str) -> Result<Self> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("threshold override {item:?} is not key=value")))?;
            if key == "fpr" {
                self.fpr = match value {
                    "fdr" | "false_discovery" => FprDefinition::FalseDiscovery,
                    "conventional" => FprDefinition::Conventional,
                    other => return Err(Error::InvalidArgument(format!("unknown fpr definition {other:?}"))),
                };
                continue;
            }
            let v: f64 = value
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("threshold {key}: {value:?} is not a number")))?;
            let slot = match key {
                "good_tpr_min" => &mut self.good_tpr_min,
                "good_fpr_max" => &mut self.good_fpr_max,
                "good_fnr_max" => &mut self.good_fnr_max,
                "bad_tpr_max" => &mut self.bad_tpr_max,
                "bad_fpr_min" => &mut self.bad_fpr_min,
                "bad_fnr_min" => &mut self.bad_fnr_min,
                other => return Err(Error::InvalidArgument(format!("unknown threshold {other:?}"))),
            };
            *slot = v;
        }
        self.validate()?;
        Ok(self)
    }
}

/// Rates used by the partition rules, or `None` when a denominator is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityRates {
    pub tpr: f64,
    pub fpr: f64,
    pub fnr: f64,
}

pub fn quality_rates(c: &ConfusionCounts, fpr: FprDefinition) -> Option<QualityRates> {
    let positives = c.tp + c.fn_;
    let fpr_den = match fpr {
        FprDefinition::FalseDiscovery => c.tp + c.fp,
        FprDefinition::Conventional => c.fp + c.tn,
    };
    if positives == 0 || fpr_den == 0 {
        return None;
    }
    Some(QualityRates {
        tpr: c.tp as f64 / positives as f64,
        fpr: c.fp as f64 / fpr_den as f64,
        fnr: c.fn_ as f64 / positives as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quality {
    Good,
    Bad,
    Unclassified,
}

pub fn classify(c: &ConfusionCounts, t: &QualityThresholds) -> Quality {
    let Some(r) = quality_rates(c, t.fpr) else {
        return Quality::Unclassified;
    };
    if r.tpr > t.good_tpr_min && r.fpr < t.good_fpr_max && r.fnr < t.good_fnr_max {
        Quality::Good
    } else if r.tpr < t.bad_tpr_max && r.fpr > t.bad_fpr_min && r.fnr > t.bad_fnr_min {
        Quality::Bad
    } else {
        Quality::Unclassified
    }
}

/// Indices into the evaluated list, one bucket each.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Partition {
    pub good: Vec<usize>,
    pub bad: Vec<usize>,
    pub unclassified: Vec<usize>,
}

pub fn partition_by_quality(evals: &[ConfusionCounts], t: &QualityThresholds) -> Partition {
    let mut p = Partition::default();
    for (i, c) in evals.iter().enumerate() {
        match classify(c, t) {
            Quality::Good => p.good.push(i),
            Quality::Bad => p.bad.push(i),
            Quality::Unclassified => p.unclassified.push(i),
        }
    }
    p
}

// ---------------------------------------------------------------------------
// Hypothesis tests
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestResult {
    pub statistic: f64,
    /// Welch–Satterthwaite degrees of freedom for the t-test; denominator
    /// degrees of freedom (numerator is 1) for Levene's test.
    pub dof: f64,
    pub p_value: f64,
    pub alpha: f64,
}

impl TestResult {
    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn rejects(&self) -> bool {
        self.p_value < self.alpha
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

fn check_group(name: &str, xs: &[f64]) -> Result<()> {
    if xs.len() < 2 {
        return Err(Error::DegenerateGroup {
            group: name.into(),
            reason: format!("needs at least 2 samples, got {}", xs.len()),
        });
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::DegenerateGroup {
            group: name.into(),
            reason: "contains non-finite values".into(),
        });
    }
    Ok(())
}

/// Welch's unequal-variance t-test, two-tailed.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<TestResult> {
    check_group("a", a)?;
    check_group("b", b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (va, vb) = (sample_variance(a), sample_variance(b));
    for (name, v) in [("a", va), ("b", vb)] {
        if v == 0.0 {
            return Err(Error::DegenerateGroup {
                group: name.into(),
                reason: "zero variance".into(),
            });
        }
    }
    let (sa, sb) = (va / na, vb / nb);
    let se2 = sa + sb;
    let t = (mean(a) - mean(b)) / se2.sqrt();
    let dof = se2 * se2 / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    Ok(TestResult {
        statistic: t,
        dof,
        p_value: student_t_two_tailed(t, dof),
        alpha: DEFAULT_ALPHA,
    })
}

/// Levene's test for equal variances of two groups, with deviations taken
/// from the group means.
pub fn levene_test(a: &[f64], b: &[f64]) -> Result<TestResult> {
    check_group("a", a)?;
    check_group("b", b)?;
    let deviations = |xs: &[f64]| -> Vec<f64> {
        let m = mean(xs);
        xs.iter().map(|x| (x - m).abs()).collect()
    };
    let (za, zb) = (deviations(a), deviations(b));
    let (ma, mb) = (mean(&za), mean(&zb));
    let n = (a.len() + b.len()) as f64;
    let grand = (za.iter().sum::<f64>() + zb.iter().sum::<f64>()) / n;
    let between = a.len() as f64 * (ma - grand).powi(2) + b.len() as f64 * (mb - grand).powi(2);
    let within = za.iter().map(|z| (z - ma).powi(2)).sum::<f64>()
        + zb.iter().map(|z| (z - mb).powi(2)).sum::<f64>();
    if within == 0.0 {
        return Err(Error::DegenerateGroup {
            group: "a,b".into(),
            reason: "zero within-group spread of absolute deviations".into(),
        });
    }
    let dof = n - 2.0;
    let w = dof * between / within;
    Ok(TestResult {
        statistic: w,
        dof,
        p_value: f_upper_tail(w, 1.0, dof),
        alpha: DEFAULT_ALPHA,
    })
}

/// Mean absolute difference between metric values and mean opinion scores.
pub fn mos_deviation(metric_values: &[f64], mos_values: &[f64]) -> Result<f64> {
    if metric_values.len() != mos_values.len() {
        return Err(Error::LengthMismatch {
            left: metric_values.len(),
            right: mos_values.len(),
        });
    }
    if metric_values.is_empty() {
        return Err(Error::InvalidArgument("no values to compare".into()));
    }
    if let Some(bad) = mos_values.iter().find(|m| !(0.0..=1.0).contains(*m)) {
        return Err(Error::InvalidArgument(format!("MOS value {bad} outside [0, 1]")));
    }
    let total: f64 = metric_values
        .iter()
        .zip(mos_values)
        .map(|(m, s)| (m - s).abs())
        .sum();
    Ok(total / metric_values.len() as f64)
}
