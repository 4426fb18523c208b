//! Discrete power-law fitting.
//!
//! `p(x) = x^-alpha / zeta(alpha, x_min)` for `x >= x_min`, with the Hurwitz
//! zeta function as normalizer. `alpha` is the exact discrete maximum
//! likelihood estimate; `x_min` minimizes the Kolmogorov-Smirnov distance
//! between the empirical and fitted tail distributions.

use rayon::prelude::*;

use crate::{Error, Result};

/// Absolute error bound guaranteed by [`hurwitz_zeta`] for the parameter
/// ranges used here (`alpha` in `(1, 50]`).
pub const ZETA_TOLERANCE: f64 = 1e-10;

const MACHEP: f64 = f64::EPSILON / 2.0;

/// `(2k)! / B_2k` for k = 1..=12.
#[allow(clippy::excessive_precision)]
const EULER_MACLAURIN: [f64; 12] = [
    12.0,
    -720.0,
    30240.0,
    -1209600.0,
    47900160.0,
    -1.8924375803183791606e9,
    7.47242496e10,
    -2.950130727918164224e12,
    1.1646782814350067249e14,
    -4.5979787224074726105e15,
    1.8152105401943546773e17,
    -7.1661652561756670113e18,
];

/// Hurwitz zeta `sum_{n>=0} (n + q)^-s` for `s > 1`, `q > 0`.
///
/// The head of the series is summed directly until the summation point `w`
/// satisfies `w > 9` and `w > s`; past that point the Euler-Maclaurin
/// correction terms shrink monotonically, so the remainder after the last
/// term used is bounded by that term's magnitude. The integral
/// `w^(1-s)/(s-1)` covers the bulk of the tail in closed form.
pub fn hurwitz_zeta(s: f64, q: f64) -> Result<f64> {
    if s.is_nan() || s <= 1.0 {
        return Err(Error::Domain(format!("zeta needs alpha > 1, got {s}")));
    }
    if q.is_nan() || q <= 0.0 {
        return Err(Error::Domain(format!("zeta needs q > 0, got {q}")));
    }
    let mut sum = q.powf(-s);
    let mut a = q;
    let mut b = 0.0;
    let mut i = 0;
    while i < 9 || a <= 9.0 || a <= s {
        i += 1;
        a += 1.0;
        b = a.powf(-s);
        sum += b;
        if (b / sum).abs() < MACHEP {
            return Ok(sum);
        }
    }
    let w = a;
    sum += b * w / (s - 1.0);
    sum -= 0.5 * b;
    let mut fact = 1.0;
    let mut k = 0.0;
    for &denom in &EULER_MACLAURIN {
        fact *= s + k;
        b /= w;
        let term = fact * b / denom;
        sum += term;
        if (term / sum).abs() < MACHEP {
            break;
        }
        k += 1.0;
        fact *= s + k;
        b /= w;
        k += 1.0;
    }
    Ok(sum)
}

/// A discrete power law with cached normalizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscretePowerLaw {
    pub alpha: f64,
    pub x_min: u64,
    norm: f64,
}

impl DiscretePowerLaw {
    pub fn new(alpha: f64, x_min: u64) -> Result<Self> {
        if x_min == 0 {
            return Err(Error::Domain("x_min must be positive".into()));
        }
        let norm = hurwitz_zeta(alpha, x_min as f64)?;
        Ok(DiscretePowerLaw { alpha, x_min, norm })
    }

    fn check(&self, x: u64) -> Result<()> {
        if x < self.x_min {
            Err(Error::Domain(format!("x = {x} below x_min = {}", self.x_min)))
        } else {
            Ok(())
        }
    }

    pub fn pmf(&self, x: u64) -> Result<f64> {
        self.check(x)?;
        Ok((x as f64).powf(-self.alpha) / self.norm)
    }

    /// `P(X >= x)`.
    pub fn ccdf(&self, x: u64) -> Result<f64> {
        self.check(x)?;
        if x == self.x_min {
            return Ok(1.0);
        }
        Ok(hurwitz_zeta(self.alpha, x as f64)? / self.norm)
    }

    /// `P(X <= x)`; zero below `x_min`.
    pub fn cdf(&self, x: u64) -> Result<f64> {
        if x < self.x_min {
            return Ok(0.0);
        }
        Ok(1.0 - self.ccdf(x + 1)?)
    }
}

pub fn pmf(x: u64, alpha: f64, x_min: u64) -> Result<f64> {
    DiscretePowerLaw::new(alpha, x_min)?.pmf(x)
}

pub fn ccdf(x: u64, alpha: f64, x_min: u64) -> Result<f64> {
    DiscretePowerLaw::new(alpha, x_min)?.ccdf(x)
}

/// Exact discrete log-likelihood of `tail` (all values `>= x_min`).
pub fn log_likelihood(tail: &[u64], alpha: f64, x_min: u64) -> Result<f64> {
    let log_sum: f64 = tail.iter().map(|&x| (x as f64).ln()).sum();
    Ok(-alpha * log_sum - tail.len() as f64 * hurwitz_zeta(alpha, x_min as f64)?.ln())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub alpha: f64,
    pub x_min: u64,
    /// KS distance on the tail.
    pub ks: f64,
    pub n_tail: usize,
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;
const ALPHA_FLOOR: f64 = 1.0 + 1e-9;
const ALPHA_CEILING: f64 = 1e3;
const BRACKET_WIDTH: f64 = 1e-6;

/// Maximum-likelihood `alpha` for a tail sample.
///
/// The log-likelihood is concave in `alpha`, so a bracket found by stepping
/// outward from the usual continuous approximation
/// `1 + n / sum ln(x / (x_min - 0.5))` contains the unique maximum, which is
/// then located by golden-section search to a bracket width below `1e-6`.
pub fn fit_alpha(tail: &[u64], x_min: u64) -> Result<f64> {
    if x_min == 0 {
        return Err(Error::Domain("x_min must be positive".into()));
    }
    if tail.len() < 2 {
        return Err(Error::Degenerate(format!(
            "need at least 2 tail values, got {}",
            tail.len()
        )));
    }
    if let Some(&x) = tail.iter().find(|&&x| x < x_min) {
        return Err(Error::Domain(format!("tail value {x} below x_min = {x_min}")));
    }
    if tail.iter().all(|&x| x == tail[0]) {
        return Err(Error::Degenerate(
            "all tail values are equal; likelihood increases without bound".into(),
        ));
    }

    let n = tail.len() as f64;
    let log_sum: f64 = tail.iter().map(|&x| (x as f64).ln()).sum();
    let q = x_min as f64;
    let ll = |a: f64| -> Result<f64> { Ok(-a * log_sum - n * hurwitz_zeta(a, q)?.ln()) };

    let shifted: f64 = tail.iter().map(|&x| (x as f64 / (q - 0.5)).ln()).sum();
    let start = (1.0 + n / shifted).clamp(ALPHA_FLOOR + 1e-3, 50.0);

    // Grow the bracket on whichever side the likelihood increases.
    let f_start = ll(start)?;
    let mut lo = start;
    let mut hi;
    let mut step = 0.25;
    loop {
        let cand = (start + step).min(ALPHA_CEILING);
        if ll(cand)? < f_start || cand >= ALPHA_CEILING {
            hi = cand;
            break;
        }
        lo = start + step / 2.0;
        step *= 2.0;
    }
    if hi >= ALPHA_CEILING {
        return Err(Error::Degenerate("likelihood maximum not bracketed".into()));
    }
    if lo == start {
        // Maximum lies below `start + 0.25`; walk down towards 1.
        let mut step = 0.25;
        loop {
            let cand = (start - step).max(ALPHA_FLOOR);
            if cand <= ALPHA_FLOOR || ll(cand)? < f_start {
                lo = cand;
                break;
            }
            hi = start - step / 2.0;
            step *= 2.0;
        }
    }

    let mut a = lo;
    let mut b = hi;
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let mut fc = ll(c)?;
    let mut fd = ll(d)?;
    while b - a > BRACKET_WIDTH {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = ll(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = ll(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// KS distance `sup_x |F_emp(x) - F(x)|` over all integers `x >= x_min`,
/// for a sorted tail sample.
pub fn ks_distance(sorted_tail: &[u64], law: &DiscretePowerLaw) -> Result<f64> {
    let n = sorted_tail.len() as f64;
    let mut d: f64 = 0.0;
    let mut below = 0usize;
    let mut prev = law.x_min.checked_sub(1);
    let mut i = 0;
    while i < sorted_tail.len() {
        let v = sorted_tail[i];
        let mut j = i;
        while j < sorted_tail.len() && sorted_tail[j] == v {
            j += 1;
        }
        // Empirical CDF is flat on (prev, v); the model CDF is largest at v-1.
        if v > law.x_min && prev.is_none_or(|p| v - 1 > p) {
            d = d.max((below as f64 / n - law.cdf(v - 1)?).abs());
        }
        d = d.max((j as f64 / n - law.cdf(v)?).abs());
        below = j;
        prev = Some(v);
        i = j;
    }
    Ok(d)
}

/// Full fit: every distinct value except the largest is tried as `x_min`;
/// candidates whose tail has fewer than two points or a single repeated value
/// are skipped. The smallest KS distance wins, ties going to the smaller
/// `x_min`.
pub fn fit_power_law(data: &[u64]) -> Result<PowerLawFit> {
    if data.contains(&0) {
        return Err(Error::Domain("power-law data must be positive".into()));
    }
    let mut sorted = data.to_vec();
    sorted.sort_unstable();
    let mut candidates: Vec<(u64, usize)> = Vec::new();
    for (idx, &x) in sorted.iter().enumerate() {
        if candidates.last().is_none_or(|&(v, _)| v != x) {
            candidates.push((x, idx));
        }
    }
    if candidates.len() < 2 {
        return Err(Error::Degenerate("need at least two distinct values".into()));
    }
    candidates.pop();

    let fits: Vec<Option<PowerLawFit>> = candidates
        .par_iter()
        .map(|&(x_min, start)| -> Result<Option<PowerLawFit>> {
            let tail = &sorted[start..];
            if tail.len() < 2 || tail[0] == tail[tail.len() - 1] {
                return Ok(None);
            }
            let alpha = fit_alpha(tail, x_min)?;
            let law = DiscretePowerLaw::new(alpha, x_min)?;
            Ok(Some(PowerLawFit {
                alpha,
                x_min,
                ks: ks_distance(tail, &law)?,
                n_tail: tail.len(),
            }))
        })
        .collect::<Result<_>>()?;

    fits.into_iter()
        .flatten()
        .fold(None, |best: Option<PowerLawFit>, f| match best {
            Some(b) if b.ks <= f.ks => Some(b),
            _ => Some(f),
        })
        .ok_or_else(|| Error::Degenerate("no x_min candidate has a usable tail".into()))
}
