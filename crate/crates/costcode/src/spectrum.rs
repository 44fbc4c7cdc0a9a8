//! Finite-n information-spectrum curves and threshold estimators.
//!
//! The first-order curve is the finite-n surrogate
//! `F_n(R) = Pr{ (1/(n alpha_c)) log_K (1/P(X^n)) >= R }`, the second-order
//! curve given `a` is
//! `F_{a,n}(L) = Pr{ (-log_K P(X^n) - n alpha_c a) / (sqrt(n) alpha_c) >= L }`.
//! Both reduce to upper-tail queries on `-log2 P(X^n)`, which this module
//! evaluates three ways: exact enumeration, an exact binomial representation
//! for binary i.i.d. sources (the self-information is affine in the count of
//! ones, so the tail is a binomial tail — a zero-variance oracle), and Monte
//! Carlo.
//!
//! The limiting curves are not computable; estimators work on a schedule of
//! block lengths and report the largest-n curve, with closed-form predictions
//! attached where the model family admits them (i.i.d. and finite mixtures of
//! i.i.d. components).

use num_bigint::BigUint;
use num_traits::Zero;
use rand::SeedableRng;

use crate::error::{Error, Result};
use crate::numeric::big_ratio_to_f64;
use crate::sources::{Pmf, ProbTable, SourceModel};

/// Guard band for tail-membership comparisons in the log2 domain.
const TAIL_GUARD: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Gaussian CDF and quantile
// ---------------------------------------------------------------------------

/// Standard normal CDF, via a rational erfc approximation good to ~1e-15.
pub fn gaussian_cdf(t: f64) -> f64 {
    0.5 * erfc(-t / std::f64::consts::SQRT_2)
}

/// Standard normal density.
fn gaussian_pdf(t: f64) -> f64 {
    (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal quantile: rational initial guess refined by one Halley
/// step against [`gaussian_cdf`].
pub fn gaussian_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!(
            "gaussian_quantile needs p in (0, 1), got {p}"
        )));
    }
    let x = acklam_quantile(p);
    // One Halley refinement takes the ~1e-9 seed to machine accuracy.
    let err = gaussian_cdf(x) - p;
    let u = err / gaussian_pdf(x);
    Ok(x - u / (1.0 + x * u / 2.0))
}

/// Rational approximation with |relative error| < 1.2e-9.
fn acklam_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

/// Complementary error function (Cody's rational approximations).
fn erfc(x: f64) -> f64 {
    let ax = x.abs();
    let result = if ax <= 0.46875 {
        return 1.0 - erf_small(x);
    } else if ax <= 4.0 {
        erfc_mid(ax)
    } else {
        erfc_large(ax)
    };
    if x < 0.0 {
        2.0 - result
    } else {
        result
    }
}

/// erf on |x| <= 0.46875.
fn erf_small(x: f64) -> f64 {
    const A: [f64; 5] = [
        3.16112374387056560e+00,
        1.13864154151050156e+02,
        3.77485237685302021e+02,
        3.20937758913846947e+03,
        1.85777706184603153e-01,
    ];
    const B: [f64; 4] = [
        2.36012909523441209e+01,
        2.44024637934444173e+02,
        1.28261652607737228e+03,
        2.84423683343917062e+03,
    ];
    let z = x * x;
    let mut num = A[4] * z;
    let mut den = z;
    for i in 0..3 {
        num = (num + A[i]) * z;
        den = (den + B[i]) * z;
    }
    x * (num + A[3]) / (den + B[3])
}

/// erfc on 0.46875 < x <= 4.
fn erfc_mid(y: f64) -> f64 {
    const C: [f64; 9] = [
        5.64188496988670089e-01,
        8.88314979438837594e+00,
        6.61191906371416295e+01,
        2.98635138197400131e+02,
        8.81952221241769090e+02,
        1.71204761263407058e+03,
        2.05107837782607147e+03,
        1.23033935479799725e+03,
        2.15311535474403846e-08,
    ];
    const D: [f64; 8] = [
        1.57449261107098347e+01,
        1.17693950891312499e+02,
        5.37181101862009858e+02,
        1.62138957456669019e+03,
        3.29079923573345963e+03,
        4.36261909014324716e+03,
        3.43936767414372164e+03,
        1.23033935480374942e+03,
    ];
    let mut num = C[8] * y;
    let mut den = y;
    for i in 0..7 {
        num = (num + C[i]) * y;
        den = (den + D[i]) * y;
    }
    let ratio = (num + C[7]) / (den + D[7]);
    scaled_exp(y) * ratio
}

/// erfc on x > 4.
fn erfc_large(y: f64) -> f64 {
    const P: [f64; 6] = [
        3.05326634961232344e-01,
        3.60344899949804439e-01,
        1.25781726111229246e-01,
        1.60837851487422766e-02,
        6.58749161529837803e-04,
        1.63153871373020978e-02,
    ];
    const Q: [f64; 5] = [
        2.56852019228982242e+00,
        1.87295284992346047e+00,
        5.27905102951428412e-01,
        6.05183413124413191e-02,
        2.33520497626869185e-03,
    ];
    const INV_SQRT_PI: f64 = 5.64189583547756287e-01;
    let z = 1.0 / (y * y);
    let mut num = P[5] * z;
    let mut den = z;
    for i in 0..4 {
        num = (num + P[i]) * z;
        den = (den + Q[i]) * z;
    }
    let r = z * (num + P[4]) / (den + Q[4]);
    scaled_exp(y) * (INV_SQRT_PI - r) / y
}

/// `exp(-y^2)` split to avoid cancellation, as in the reference evaluation.
fn scaled_exp(y: f64) -> f64 {
    let ysq = (y * 16.0).trunc() / 16.0;
    let del = (y - ysq) * (y + ysq);
    (-ysq * ysq).exp() * (-del).exp()
}

// ---------------------------------------------------------------------------
// Spectrum curves
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurveKind {
    FirstOrder,
    SecondOrder { a: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurveMethod {
    /// Exhaustive enumeration; exact event masses.
    Exact,
    /// Exact binomial tail; binary i.i.d. sources only.
    ExactBinomial,
    /// Seeded sampling.
    Mc { trials: u64, seed: u64 },
}

impl CurveMethod {
    pub fn label(&self) -> &'static str {
        match self {
            CurveMethod::Exact => "exact",
            CurveMethod::ExactBinomial => "binomial",
            CurveMethod::Mc { .. } => "mc",
        }
    }
}

/// A finite-n spectrum curve: non-increasing values in [0, 1] over a sorted
/// grid.
#[derive(Debug, Clone)]
pub struct SpectrumCurve {
    pub n: usize,
    pub kind: CurveKind,
    pub code_alphabet: usize,
    pub alpha_c: f64,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub method: CurveMethod,
}

/// Upper-tail evaluator for `-log2 P(X^n)`.
enum TailEval {
    /// Sorted statistics with exact suffix masses over a common denominator.
    Sorted {
        stats: Vec<f64>,
        suffix_num: Vec<BigUint>,
        denom: BigUint,
    },
    /// Binomial ones-count representation for binary i.i.d. sources.
    Binomial {
        s0: f64,
        s1: f64,
        n: usize,
        /// suffix_num[k] = exact mass of { ones-count >= k }.
        suffix_num: Vec<BigUint>,
        denom: BigUint,
    },
    /// Sorted sampled statistics.
    Sampled { stats: Vec<f64> },
}

impl TailEval {
    /// `Pr{ -log2 P >= threshold }`, equality included (with a guard band).
    fn tail(&self, threshold: f64) -> f64 {
        let guard = TAIL_GUARD * threshold.abs().max(1.0);
        match self {
            TailEval::Sorted {
                stats,
                suffix_num,
                denom,
            } => {
                let idx = stats.partition_point(|&s| s < threshold - guard);
                big_ratio_to_f64(&suffix_num[idx], denom)
            }
            TailEval::Binomial {
                s0,
                s1,
                n,
                suffix_num,
                denom,
            } => {
                // -log2 P = n*s0 + k*(s1 - s0)
                let slope = s1 - s0;
                let rel = threshold - *n as f64 * s0;
                let k_min = if slope.abs() <= TAIL_GUARD {
                    if rel <= guard {
                        0
                    } else {
                        n + 1
                    }
                } else if slope > 0.0 {
                    let k = (rel - guard) / slope;
                    k.ceil().max(0.0) as usize
                } else {
                    // Decreasing in k: { k <= k_max }; use the complement.
                    let k = (rel + guard) / slope; // slope < 0 flips the sense
                    let k_max = k.floor();
                    if k_max < 0.0 {
                        n + 1
                    } else {
                        let k_max = k_max as usize;
                        return 1.0
                            - big_ratio_to_f64(&suffix_num[(k_max + 1).min(*n + 1)], denom);
                    }
                };
                big_ratio_to_f64(&suffix_num[k_min.min(*n + 1)], denom)
            }
            TailEval::Sampled { stats } => {
                let idx = stats.partition_point(|&s| s < threshold - guard);
                (stats.len() - idx) as f64 / stats.len() as f64
            }
        }
    }
}

fn build_tail_eval(
    source: &SourceModel,
    n: usize,
    method: CurveMethod,
    budget: u64,
) -> Result<TailEval> {
    match method {
        CurveMethod::Exact => {
            let table = ProbTable::build(source, n, budget)?;
            let mut pairs: Vec<(f64, usize)> = table
                .log2
                .iter()
                .enumerate()
                .filter(|(_, l2)| l2.is_finite())
                .map(|(rank, &l2)| (-l2, rank))
                .collect();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            let stats: Vec<f64> = pairs.iter().map(|(s, _)| *s).collect();
            let mut suffix_num = vec![BigUint::zero(); stats.len() + 1];
            for i in (0..stats.len()).rev() {
                suffix_num[i] = &suffix_num[i + 1] + &table.numerators[pairs[i].1];
            }
            Ok(TailEval::Sorted {
                stats,
                suffix_num,
                denom: table.denom,
            })
        }
        CurveMethod::ExactBinomial => {
            let pmf = source.iid_pmf().ok_or_else(|| {
                Error::InvalidInput("binomial method requires an i.i.d. source".into())
            })?;
            if pmf.alphabet() != 2 {
                return Err(Error::InvalidInput(
                    "binomial method requires a binary alphabet".into(),
                ));
            }
            let (suffix_num, denom) = binomial_suffix_masses(pmf, n)?;
            Ok(TailEval::Binomial {
                s0: -pmf.log2_mass(0),
                s1: -pmf.log2_mass(1),
                n,
                suffix_num,
                denom,
            })
        }
        CurveMethod::Mc { trials, seed } => {
            if trials == 0 {
                return Err(Error::InvalidInput("trials must be >= 1".into()));
            }
            let mut stats = Vec::with_capacity(trials as usize);
            const CHUNK: u64 = 4096;
            let chunks = trials.div_ceil(CHUNK);
            for chunk in 0..chunks {
                let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed.wrapping_add(chunk));
                let count = CHUNK.min(trials - chunk * CHUNK);
                for _ in 0..count {
                    let x = source.sample_with(n, &mut rng);
                    stats.push(-source.log2_probability(&x)?);
                }
            }
            stats.sort_by(f64::total_cmp);
            Ok(TailEval::Sampled { stats })
        }
    }
}

/// Exact masses `suffix[k] = Pr{ ones >= k }` as numerators over `denom`,
/// for a binary pmf at block length n.
fn binomial_suffix_masses(pmf: &Pmf, n: usize) -> Result<(Vec<BigUint>, BigUint)> {
    use num_integer::Integer;
    let p0 = pmf.mass(0);
    let p1 = pmf.mass(1);
    let d: BigUint = p0.denom().magnitude().lcm(p1.denom().magnitude());
    let a0 = p0.numer().magnitude() * (&d / p0.denom().magnitude());
    let a1 = p1.numer().magnitude() * (&d / p1.denom().magnitude());
    let denom = d.pow(n as u32);
    // term_k = C(n, k) a1^k a0^(n-k), built iteratively.
    let mut terms: Vec<BigUint> = Vec::with_capacity(n + 1);
    if a0.is_zero() || a1.is_zero() {
        // Degenerate: all mass at k = n (or k = 0).
        for k in 0..=n {
            let here = if a1.is_zero() { k == 0 } else { k == n };
            terms.push(if here { denom.clone() } else { BigUint::zero() });
        }
    } else {
        let mut t = a0.pow(n as u32);
        terms.push(t.clone());
        for k in 0..n {
            t = t * (n - k) * &a1 / ((k + 1) * &a0);
            terms.push(t.clone());
        }
    }
    let mut suffix = vec![BigUint::zero(); n + 2];
    for k in (0..=n).rev() {
        suffix[k] = &suffix[k + 1] + &terms[k];
    }
    Ok((suffix, denom))
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty grid".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput(
            "grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Finite-n first-order curve `F_n(R)` over a sorted grid of rates.
pub fn spectrum_first_order(
    source: &SourceModel,
    code_alphabet: usize,
    alpha_c: f64,
    n: usize,
    grid: &[f64],
    method: CurveMethod,
    budget: u64,
) -> Result<SpectrumCurve> {
    check_grid(grid)?;
    let eval = build_tail_eval(source, n, method, budget)?;
    let log2_k = (code_alphabet as f64).log2();
    let values = grid
        .iter()
        .map(|&r| eval.tail(r * n as f64 * alpha_c * log2_k))
        .collect();
    let curve = SpectrumCurve {
        n,
        kind: CurveKind::FirstOrder,
        code_alphabet,
        alpha_c,
        grid: grid.to_vec(),
        values,
        method,
    };
    debug_assert!(curve_is_monotone(&curve));
    Ok(curve)
}

/// Finite-n second-order curve `F_{a,n}(L)` over a sorted grid of L values.
pub fn spectrum_second_order(
    source: &SourceModel,
    code_alphabet: usize,
    alpha_c: f64,
    a: f64,
    n: usize,
    grid: &[f64],
    method: CurveMethod,
    budget: u64,
) -> Result<SpectrumCurve> {
    check_grid(grid)?;
    let eval = build_tail_eval(source, n, method, budget)?;
    let log2_k = (code_alphabet as f64).log2();
    let nf = n as f64;
    let values = grid
        .iter()
        .map(|&l| eval.tail((l * nf.sqrt() * alpha_c + nf * alpha_c * a) * log2_k))
        .collect();
    let curve = SpectrumCurve {
        n,
        kind: CurveKind::SecondOrder { a },
        code_alphabet,
        alpha_c,
        grid: grid.to_vec(),
        values,
        method,
    };
    debug_assert!(curve_is_monotone(&curve));
    Ok(curve)
}

fn curve_is_monotone(curve: &SpectrumCurve) -> bool {
    curve.values.windows(2).all(|w| w[1] <= w[0] + 1e-12)
        && curve
            .values
            .iter()
            .all(|v| (-1e-12..=1.0 + 1e-12).contains(v))
}

// ---------------------------------------------------------------------------
// Threshold estimators
// ---------------------------------------------------------------------------

/// A bracketed threshold estimate from the largest-n curve of a schedule.
#[derive(Debug, Clone)]
pub struct ThresholdEstimate {
    pub epsilon: f64,
    /// Midpoint of the bracket (the half-grid-step convention for infima).
    pub value: f64,
    /// `curve(bracket.0) > epsilon >= curve(bracket.1)`.
    pub bracket: (f64, f64),
    pub n_used: usize,
    /// Closed-form prediction where the model admits one.
    pub analytic: Option<f64>,
}

/// First-order threshold estimate: the grid bracket where `F_n` at the
/// largest scheduled n crosses epsilon.
pub fn threshold_first_order(
    source: &SourceModel,
    code_alphabet: usize,
    alpha_c: f64,
    epsilon: f64,
    n_schedule: &[usize],
    grid: &[f64],
    method: CurveMethod,
    budget: u64,
) -> Result<ThresholdEstimate> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::InvalidInput(format!(
            "epsilon must be in [0, 1), got {epsilon}"
        )));
    }
    let n = *n_schedule
        .iter()
        .max()
        .ok_or_else(|| Error::InvalidInput("empty block-length schedule".into()))?;
    let curve = spectrum_first_order(source, code_alphabet, alpha_c, n, grid, method, budget)?;
    let (lo, hi) = crossing_bracket(&curve, epsilon)?;
    let analytic = analytic_first_order(source, code_alphabet, epsilon).map(|h| h / alpha_c);
    Ok(ThresholdEstimate {
        epsilon,
        value: 0.5 * (lo + hi),
        bracket: (lo, hi),
        n_used: n,
        analytic,
    })
}

fn crossing_bracket(curve: &SpectrumCurve, epsilon: f64) -> Result<(f64, f64)> {
    let above = curve
        .values
        .iter()
        .rposition(|&v| v > epsilon)
        .ok_or(Error::BracketNotFound {
            epsilon,
            lo: curve.grid[0],
            hi: *curve.grid.last().unwrap(),
        })?;
    if above + 1 >= curve.grid.len() {
        return Err(Error::BracketNotFound {
            epsilon,
            lo: curve.grid[0],
            hi: *curve.grid.last().unwrap(),
        });
    }
    Ok((curve.grid[above], curve.grid[above + 1]))
}

/// Per-letter entropy (base K) of the limiting first-order threshold, when
/// the source is i.i.d. or a finite mixture of i.i.d. components: the
/// smallest component entropy whose strictly-above mass is at most epsilon.
fn analytic_first_order(source: &SourceModel, code_alphabet: usize, epsilon: f64) -> Option<f64> {
    let parts = iid_mixture_parts(source, code_alphabet)?;
    let mut sorted = parts;
    sorted.sort_by(|a, b| a.1.total_cmp(&b.1));
    // Merge equal entropies.
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (w, h) in sorted {
        match merged.last_mut() {
            Some((mw, mh)) if (*mh - h).abs() < 1e-12 => *mw += w,
            _ => merged.push((w, h)),
        }
    }
    for j in 0..merged.len() {
        let mass_above: f64 = merged[j + 1..].iter().map(|(w, _)| w).sum();
        if mass_above <= epsilon + 1e-12 {
            return Some(merged[j].1);
        }
    }
    None
}

/// Flattens a source into `(weight, base-K entropy)` pairs when it is built
/// from i.i.d. pieces.
fn iid_mixture_parts(source: &SourceModel, base: usize) -> Option<Vec<(f64, f64)>> {
    fn go(source: &SourceModel, weight: f64, out: &mut Vec<(f64, f64)>, base: usize) -> bool {
        match source {
            SourceModel::Iid(pmf) => {
                out.push((weight, pmf.self_info_stats(base).entropy));
                true
            }
            SourceModel::Mixture {
                weight_values,
                components,
                ..
            } => weight_values
                .iter()
                .zip(components)
                .all(|(w, c)| go(c, weight * w, out, base)),
            SourceModel::Markov { .. } => false,
        }
    }
    let mut parts = Vec::new();
    if go(source, 1.0, &mut parts, base) {
        Some(parts)
    } else {
        None
    }
}

/// Closed-form second-order threshold for an i.i.d. source at
/// `a = H(X)/alpha_c`:
///
/// ```text
///   L(eps) = sqrt(sigma^2(X)) * Phi^{-1}(1 - eps) / alpha_c
/// ```
///
/// Errors with [`Error::DegenerateSource`] when the self-information variance
/// vanishes (the Gaussian scale collapses).
pub fn threshold_second_order_iid(
    pmf: &Pmf,
    code_alphabet: usize,
    alpha_c: f64,
    epsilon: f64,
) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidInput(format!(
            "epsilon must be in (0, 1), got {epsilon}"
        )));
    }
    let stats = pmf.self_info_stats(code_alphabet);
    if stats.sigma2 <= 0.0 {
        return Err(Error::DegenerateSource);
    }
    Ok(stats.sigma2.sqrt() * gaussian_quantile(1.0 - epsilon)? / alpha_c)
}

/// Estimate of the spectral upper entropy rate: the `(1 - delta)`-quantile of
/// the normalized self-information at the largest scheduled block length.
#[derive(Debug, Clone)]
pub struct SupEntropyEstimate {
    pub value: f64,
    pub n_used: usize,
    pub delta: f64,
    pub analytic: Option<f64>,
}

pub fn sup_entropy_rate_estimate(
    source: &SourceModel,
    code_alphabet: usize,
    n_schedule: &[usize],
    delta: f64,
    method: CurveMethod,
    budget: u64,
) -> Result<SupEntropyEstimate> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidInput(format!(
            "delta must be in (0, 1), got {delta}"
        )));
    }
    let n = *n_schedule
        .iter()
        .max()
        .ok_or_else(|| Error::InvalidInput("empty block-length schedule".into()))?;
    let eval = build_tail_eval(source, n, method, budget)?;
    let log2_k = (code_alphabet as f64).log2();
    let value = match &eval {
        TailEval::Sorted {
            stats,
            suffix_num,
            denom,
        } => {
            // Smallest stat with at most delta mass strictly above it.
            let mut pick = *stats.last().expect("nonempty support");
            for (i, &s) in stats.iter().enumerate() {
                if big_ratio_to_f64(&suffix_num[i + 1], denom) <= delta {
                    pick = s;
                    break;
                }
            }
            pick
        }
        TailEval::Binomial {
            s0,
            s1,
            n,
            suffix_num,
            denom,
        } => {
            let mut pick = *n as f64 * s0.max(*s1);
            for k in 0..=*n {
                if big_ratio_to_f64(&suffix_num[k + 1], denom) <= delta {
                    pick = *n as f64 * s0 + k as f64 * (s1 - s0);
                    break;
                }
            }
            pick
        }
        TailEval::Sampled { stats } => {
            let idx = (((1.0 - delta) * stats.len() as f64).ceil() as usize)
                .clamp(1, stats.len())
                - 1;
            stats[idx]
        }
    };
    let analytic = iid_mixture_parts(source, code_alphabet).map(|parts| {
        parts
            .iter()
            .filter(|(w, _)| *w > 0.0)
            .map(|(_, h)| *h)
            .fold(0.0f64, f64::max)
    });
    Ok(SupEntropyEstimate {
        value: value / (n as f64 * log2_k),
        n_used: n,
        delta,
        analytic,
    })
}
