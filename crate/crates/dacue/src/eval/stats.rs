use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Outcome of a two-sided Welch t test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelchReport {
    pub t: f64,
    /// Welch–Satterthwaite degrees of freedom.
    pub df: f64,
    pub p_value: f64,
    /// `p_value < 0.05`
    pub significant: bool,
}

pub const ALPHA: f64 = 0.05;

fn mean_var(sample: &[f64]) -> (f64, f64) {
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    let var = sample.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Two-sided Welch t test of equal means.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<WelchReport> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::Invalid(format!(
            "t test needs at least 2 observations per sample, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(Error::Invalid("t test samples must be finite".into()));
    }
    let (mean_a, var_a) = mean_var(a);
    let (mean_b, var_b) = mean_var(b);
    let (se_a, se_b) = (var_a / a.len() as f64, var_b / b.len() as f64);
    let se2 = se_a + se_b;
    if se2 <= 0.0 {
        return Err(Error::Invalid(format!(
            "t test undefined: both samples are constant ({mean_a} and {mean_b})"
        )));
    }
    let t = (mean_a - mean_b) / se2.sqrt();
    let df = se2 * se2 / (se_a * se_a / (a.len() as f64 - 1.0) + se_b * se_b / (b.len() as f64 - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::Invalid(e.to_string()))?;
    let p_value = (2.0 * dist.sf(t.abs())).clamp(0.0, 1.0);
    Ok(WelchReport {
        t,
        df,
        p_value,
        significant: p_value < ALPHA,
    })
}
