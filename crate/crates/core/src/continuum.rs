//! Closed-form limit distributions for the large-M regime and the finite-M
//! forms they are approached by.
//!
//! Rescaling the ECP parameter as `g = q^(1/M)` turns the D-CTC binomial
//! into a Poisson law with rate `ln(1/q)`. The two P-CTC regularisations
//! (incomplete teleportation with `N = M`, and probabilistic swaps with
//! `beta = r/M`) both converge to squared-Poisson-like laws normalised by a
//! modified Bessel function `I_0`.

use crate::error::{Error, Result};

/// Largest `m` for which binomial coefficients are computed in exact
/// integer arithmetic; beyond this a log-factorial path takes over. The
/// crossover is covered by a test comparing both routes.
pub const BINOMIAL_EXACT_MAX: usize = 60;

/// Tail threshold for truncating the infinite limit pmfs: the support ends
/// at the first index whose doubled term drops below this.
pub const PMF_TAIL_EPS: f64 = 1e-14;

/// `ln(n!)` by direct log summation; exact enough (relative error of order
/// `n * eps`) for every tolerance used here.
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// Binomial coefficient as f64: exact below [`BINOMIAL_EXACT_MAX`],
/// exponentiated log-factorials above.
pub fn binomial(m: usize, k: usize) -> f64 {
    if k > m {
        return 0.0;
    }
    if m <= BINOMIAL_EXACT_MAX {
        binomial_u128(m, k) as f64
    } else {
        (ln_factorial(m) - ln_factorial(k) - ln_factorial(m - k)).exp()
    }
}

/// Exact binomial coefficient. The running product stays within `u128`
/// for `m <= 120` (the intermediate `C(m, k) * (m - k)` is the binding
/// constraint); callers above that must take the log route.
pub fn binomial_u128(m: usize, k: usize) -> u128 {
    if k > m {
        return 0;
    }
    let k = k.min(m - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (m - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Modified Bessel function of the first kind, integer order, by power
/// series: `I_n(x) = sum_m (x/2)^(2m+n) / (m! (m+n)!)`, summed until the
/// next term falls below `1e-16` of the partial sum.
pub fn bessel_i(order: usize, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::invalid("bessel_i requires finite x >= 0"));
    }
    let half = x / 2.0;
    // First term: (x/2)^n / n!.
    let mut term = 1.0;
    for i in 1..=order {
        term *= half / i as f64;
    }
    let mut sum = term;
    let mut m = 0usize;
    loop {
        m += 1;
        term *= half * half / (m as f64 * (m + order) as f64);
        sum += term;
        if term < 1e-16 * sum || term == 0.0 {
            break;
        }
        if m > 10_000 {
            return Err(Error::invalid(format!(
                "bessel_i series failed to converge at x = {x}"
            )));
        }
    }
    Ok(sum)
}

/// A regularised continuum family together with its parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitFamily {
    /// D-CTC with `g = q^(1/M)`; `q` is the all-vacuum seed probability.
    Dctc { q: f64 },
    /// P-CTC incomplete teleportation with `N = M` clock levels.
    PctcH { h: f64 },
    /// P-CTC probabilistic swaps with `beta = r/M`.
    PctcBeta { r: f64 },
}

impl LimitFamily {
    pub fn dctc(q: f64) -> Result<Self> {
        if !(0.0 < q && q <= 1.0) {
            return Err(Error::invalid(
                "q must lie in (0, 1]; q = 0 keeps the loop count divergent",
            ));
        }
        Ok(LimitFamily::Dctc { q })
    }

    pub fn pctc_h(h: f64) -> Result<Self> {
        if !(0.0 < h && h <= 1.0) {
            return Err(Error::invalid("h must lie in (0, 1]; h = 0 diverges"));
        }
        Ok(LimitFamily::PctcH { h })
    }

    pub fn pctc_beta(r: f64) -> Result<Self> {
        if !(r >= 0.0) {
            return Err(Error::invalid("r must be nonnegative"));
        }
        Ok(LimitFamily::PctcBeta { r })
    }

    /// Poisson rate `lambda = ln(1/q)` of the D-CTC limit.
    pub fn lambda(&self) -> Option<f64> {
        match self {
            LimitFamily::Dctc { q } => Some((1.0 / q).ln()),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LimitFamily::Dctc { .. } => "dctc",
            LimitFamily::PctcH { .. } => "pctc-h",
            LimitFamily::PctcBeta { .. } => "pctc-beta",
        }
    }

    pub fn parameter(&self) -> (&'static str, f64) {
        match self {
            LimitFamily::Dctc { q } => ("q", *q),
            LimitFamily::PctcH { h } => ("h", *h),
            LimitFamily::PctcBeta { r } => ("r", *r),
        }
    }

    pub fn limit_pmf(&self, k: usize) -> Result<f64> {
        match *self {
            LimitFamily::Dctc { q } => dctc_limit_pmf(k, q),
            LimitFamily::PctcH { h } => pctc_h_limit_pmf(k, h),
            LimitFamily::PctcBeta { r } => pctc_beta_limit_pmf(k, r),
        }
    }

    pub fn limit_expectation(&self) -> Result<f64> {
        match *self {
            LimitFamily::Dctc { q } => Ok((1.0 / q).ln()),
            LimitFamily::PctcH { h } => pctc_h_limit_expectation(h),
            LimitFamily::PctcBeta { r } => pctc_beta_limit_expectation(r),
        }
    }

    pub fn finite_pmf(&self, m: usize, k: usize) -> Result<f64> {
        match *self {
            LimitFamily::Dctc { q } => crate::deutsch::rescaled_probability(m, q, k),
            LimitFamily::PctcH { h } => crate::pctc::incomplete_probability(m, m, h, k),
            LimitFamily::PctcBeta { r } => {
                crate::pctc::beta_weight_probability(m, r / m as f64, k)
            }
        }
    }

    /// Truncation point of the limit pmf: the smallest index past the bulk
    /// whose doubled term falls under [`PMF_TAIL_EPS`]. Terms only decay
    /// factorially once `k` clears the distribution bulk, so the threshold
    /// is not consulted before that.
    pub fn support_len(&self) -> Result<usize> {
        let bulk = match *self {
            LimitFamily::Dctc { q } => (1.0 / q).ln(),
            LimitFamily::PctcH { h } => (1.0 - h) / h,
            LimitFamily::PctcBeta { r } => r,
        };
        let mut k = 0usize;
        loop {
            let p = self.limit_pmf(k)?;
            if k as f64 > bulk && 2.0 * p < PMF_TAIL_EPS {
                return Ok(k + 1);
            }
            k += 1;
            if k > 10_000 {
                return Err(Error::invalid("limit pmf support unexpectedly long"));
            }
        }
    }
}

/// Poisson limit `Pr_D(k; q) = q (ln 1/q)^k / k!`.
pub fn dctc_limit_pmf(k: usize, q: f64) -> Result<f64> {
    if !(0.0 < q && q <= 1.0) {
        return Err(Error::invalid(
            "q must lie in (0, 1]; q = 0 keeps the loop count divergent",
        ));
    }
    let lambda = (1.0 / q).ln();
    Ok(q * lambda.powi(k as i32) * (-ln_factorial(k)).exp())
}

/// Bessel-normalised limit of the incomplete-teleportation variant:
/// `Pr(k) = x^(2k) / ((k!)^2 I_0(2x))` with `x = (1 - h)/h`.
pub fn pctc_h_limit_pmf(k: usize, h: f64) -> Result<f64> {
    if !(0.0 < h && h <= 1.0) {
        return Err(Error::invalid("h must lie in (0, 1]; h = 0 diverges"));
    }
    let x = (1.0 - h) / h;
    Ok(x.powi(2 * k as i32) * (-2.0 * ln_factorial(k)).exp() / bessel_i(0, 2.0 * x)?)
}

/// Expectation `x I_1(2x) / I_0(2x)` of the h-regularised limit.
pub fn pctc_h_limit_expectation(h: f64) -> Result<f64> {
    if !(0.0 < h && h <= 1.0) {
        return Err(Error::invalid("h must lie in (0, 1]; h = 0 diverges"));
    }
    let x = (1.0 - h) / h;
    Ok(x * bessel_i(1, 2.0 * x)? / bessel_i(0, 2.0 * x)?)
}

/// Bessel-normalised limit of the probabilistic-swap variant:
/// `Pr(k) = r^(2k) / ((k!)^2 I_0(2r))`.
pub fn pctc_beta_limit_pmf(k: usize, r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::invalid("r must be nonnegative"));
    }
    Ok(r.powi(2 * k as i32) * (-2.0 * ln_factorial(k)).exp() / bessel_i(0, 2.0 * r)?)
}

/// Expectation `r I_1(2r) / I_0(2r)`.
pub fn pctc_beta_limit_expectation(r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::invalid("r must be nonnegative"));
    }
    Ok(r * bessel_i(1, 2.0 * r)? / bessel_i(0, 2.0 * r)?)
}

/// One row of a convergence report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub m: usize,
    pub sup_distance: f64,
}

/// Sup-norm distance between the finite-M pmf and its limit, maximised over
/// the union of both supports.
pub fn sup_distance(family: &LimitFamily, m: usize) -> Result<f64> {
    let support = family.support_len()?.max(m + 1);
    let mut worst = 0.0_f64;
    for k in 0..support {
        let finite = if k <= m { family.finite_pmf(m, k)? } else { 0.0 };
        let limit = family.limit_pmf(k)?;
        worst = worst.max((finite - limit).abs());
    }
    Ok(worst)
}

/// Evaluate the sup-norm distance for each listed `M`.
pub fn convergence_report(family: &LimitFamily, m_list: &[usize]) -> Result<Vec<ConvergenceRow>> {
    m_list
        .iter()
        .map(|&m| {
            if m == 0 {
                return Err(Error::invalid("mode counts must be positive"));
            }
            Ok(ConvergenceRow {
                m,
                sup_distance: sup_distance(family, m)?,
            })
        })
        .collect()
}
