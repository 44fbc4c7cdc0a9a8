//! Overflow probability of codeword cost, and the pair of bounds that
//! sandwich it: an achievability bound satisfied by the constructed encoder
//! and a converse bound satisfied by every prefix-free code.
//!
//! For a threshold sequence `eta_n` and any positive `z_n`,
//!
//! ```text
//!   achievability:  eps_n < Pr{ z_n P(X^n) <= K^(-alpha_c eta_n) } + z_n K^(alpha_c c_max + 1)
//!   converse:       eps_n >= Pr{ P(X^n) <= z_n K^(-alpha_c eta_n) } - z_n
//! ```
//!
//! Event masses are added as exact numerators over a common denominator;
//! membership is decided in the log domain with a guard band, and strings
//! inside the band are counted as ties and classified in whichever direction
//! keeps the reported bound conservative.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;
use rand::SeedableRng;

use crate::coder::{Codebook, IntervalEncoder};
use crate::cost_model::{CostCapacity, CostFunction};
use crate::error::{Error, Result};
use crate::numeric::{big_ratio_to_f64, rational_from_f64};
use crate::sources::{ProbTable, SourceModel};

/// Guard band (in log2 units) for event-membership decisions.
const LOG_GUARD: f64 = 1e-9;

/// Threshold sequence `eta_n`.
#[derive(Debug, Clone)]
pub enum ThresholdSchedule {
    /// `eta_n = n R`.
    FirstOrder { rate: f64 },
    /// `eta_n = n a + sqrt(n) L`.
    SecondOrder { a: f64, l: f64 },
    /// Explicit `(n, eta_n)` table.
    Explicit(Vec<(usize, f64)>),
}

impl ThresholdSchedule {
    pub fn eta(&self, n: usize) -> Result<f64> {
        let eta = match self {
            ThresholdSchedule::FirstOrder { rate } => n as f64 * rate,
            ThresholdSchedule::SecondOrder { a, l } => n as f64 * a + (n as f64).sqrt() * l,
            ThresholdSchedule::Explicit(table) => table
                .iter()
                .find(|(m, _)| *m == n)
                .map(|(_, eta)| *eta)
                .ok_or_else(|| {
                    Error::InvalidInput(format!("no explicit threshold for n = {n}"))
                })?,
        };
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "threshold eta_n must be positive and finite, got {eta} at n = {n}"
            )));
        }
        Ok(eta)
    }
}

/// Rule for the free sequence `z_n` in the two lemmas.
#[derive(Debug, Clone)]
pub enum ZRule {
    /// `z_n = K^(-sqrt(n) gamma)` — the achievability-proof instantiation.
    DirectPart { gamma: f64 },
    /// `z_n = K^(-n gamma)` — the converse-proof instantiation.
    Converse { gamma: f64 },
    Fixed(f64),
}

impl ZRule {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            ZRule::DirectPart { gamma } | ZRule::Converse { gamma } => *gamma > 0.0,
            ZRule::Fixed(z) => *z > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(
                "z rule requires a strictly positive parameter".into(),
            ))
        }
    }

    pub fn z(&self, code_alphabet: usize, n: usize) -> f64 {
        let k = code_alphabet as f64;
        match self {
            ZRule::DirectPart { gamma } => k.powf(-(n as f64).sqrt() * gamma),
            ZRule::Converse { gamma } => k.powf(-(n as f64) * gamma),
            ZRule::Fixed(z) => *z,
        }
    }
}

/// An exactly computed tail probability with tie accounting.
#[derive(Debug, Clone)]
pub struct ExactTail {
    pub probability: f64,
    pub exact: BigRational,
    /// Strings whose statistic fell on (or within the guard band of) the
    /// threshold.
    pub ties: usize,
}

/// Exact `Pr{ c(w(X^n)) > eta }` over a materialized codebook.
///
/// Costs are exact rationals and `eta` compares as the exact rational value
/// of its `f64`, so the strict inequality is honored exactly; ties (cost
/// equal to `eta`) are excluded by strictness and reported.
pub fn overflow_exact(book: &Codebook, eta: f64) -> ExactTail {
    let eta_rat = rational_from_f64(eta);
    let mut mass = BigUint::zero();
    let mut ties = 0usize;
    for (rank, cw) in book.iter_words() {
        if cw.cost_exact > eta_rat {
            mass += &book.probs.numerators[rank];
        } else if cw.cost_exact == eta_rat {
            ties += 1;
        }
    }
    finish_tail(mass, &book.probs.denom, ties)
}

/// Exact `Pr{ len(w(X^n)) > eta }` — the unit-cost reduction, computed from
/// symbol counts alone.
pub fn length_overflow_exact(book: &Codebook, eta: f64) -> ExactTail {
    let mut mass = BigUint::zero();
    let mut ties = 0usize;
    for (rank, cw) in book.iter_words() {
        let len = cw.symbols.len() as f64;
        if len > eta {
            mass += &book.probs.numerators[rank];
        } else if len == eta {
            ties += 1;
        }
    }
    finish_tail(mass, &book.probs.denom, ties)
}

fn finish_tail(mass: BigUint, denom: &BigUint, ties: usize) -> ExactTail {
    ExactTail {
        probability: big_ratio_to_f64(&mass, denom),
        exact: BigRational::new(mass.into(), denom.clone().into()),
        ties,
    }
}

/// Monte Carlo overflow estimate.
#[derive(Debug, Clone)]
pub struct McTail {
    pub estimate: f64,
    pub ci95: f64,
    pub hits: u64,
    pub trials: u64,
    pub ties: u64,
}

/// Estimates `Pr{ c(w(X^n)) > eta }` by sampling and encoding.
///
/// Trials are processed in fixed-size chunks with per-chunk generators seeded
/// `seed + chunk`, so results do not depend on scheduling and parallel
/// drivers can reproduce them.
pub fn overflow_mc(enc: &IntervalEncoder, eta: f64, trials: u64, seed: u64) -> Result<McTail> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be >= 1".into()));
    }
    let eta_rat = rational_from_f64(eta);
    let n = enc.n();
    let mut hits = 0u64;
    let mut ties = 0u64;
    const CHUNK: u64 = 4096;
    let chunks = trials.div_ceil(CHUNK);
    for chunk in 0..chunks {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed.wrapping_add(chunk));
        let count = CHUNK.min(trials - chunk * CHUNK);
        for _ in 0..count {
            let x = enc.source().sample_with(n, &mut rng);
            let cw = enc.encode(&x)?;
            if cw.cost_exact > eta_rat {
                hits += 1;
            } else if cw.cost_exact == eta_rat {
                ties += 1;
            }
        }
    }
    let estimate = hits as f64 / trials as f64;
    let ci95 = 1.96 * (estimate * (1.0 - estimate) / trials as f64).sqrt();
    Ok(McTail {
        estimate,
        ci95,
        hits,
        trials,
        ties,
    })
}

/// Direction for guard-band ties in the lemma probability terms.
#[derive(Clone, Copy)]
enum TieRule {
    Include,
    Exclude,
}

/// Exact mass of `{ x : log2 P(x) <= threshold }` with guarded ties.
fn mass_log2_below(probs: &ProbTable, threshold: f64, ties: TieRule) -> (BigUint, usize) {
    let guard = LOG_GUARD * threshold.abs().max(1.0);
    let mut mass = BigUint::zero();
    let mut tie_count = 0usize;
    for (rank, &l2) in probs.log2.iter().enumerate() {
        let inside = if l2.is_infinite() {
            true // zero probability: trivially below, contributes nothing
        } else if (l2 - threshold).abs() <= guard {
            tie_count += 1;
            matches!(ties, TieRule::Include)
        } else {
            l2 < threshold
        };
        if inside {
            mass += &probs.numerators[rank];
        }
    }
    (mass, tie_count)
}

/// One evaluated achievability bound.
#[derive(Debug, Clone)]
pub struct Lemma1Value {
    /// `Pr{ z P(X^n) <= K^(-alpha eta) } + z K^(alpha c_max + 1)`, as stated.
    pub value: f64,
    /// Same with the tighter constant `2 z K^(alpha c_max)` the proof yields
    /// before relaxing `log_K 2 <= 1`; reported for diagnostics.
    pub value_tight: f64,
    pub probability_term: ExactTail,
    pub penalty: f64,
}

/// Evaluates the achievability bound exactly from an enumerated distribution.
pub fn lemma1_rhs(
    probs: &ProbTable,
    code_alphabet: usize,
    alpha_c: f64,
    c_max: f64,
    eta: f64,
    z: f64,
) -> Result<Lemma1Value> {
    if !(z > 0.0) {
        return Err(Error::InvalidInput("z must be positive".into()));
    }
    let log2_k = (code_alphabet as f64).log2();
    // z P(x) <= K^(-alpha eta)  <=>  log2 P(x) <= -alpha eta log2 K - log2 z
    let threshold = -alpha_c * eta * log2_k - z.log2();
    // Ties inflate the probability term: conservative for an upper bound.
    let (mass, ties) = mass_log2_below(probs, threshold, TieRule::Include);
    let probability_term = finish_tail(mass, &probs.denom, ties);
    let penalty = z * (code_alphabet as f64).powf(alpha_c * c_max + 1.0);
    let penalty_tight = 2.0 * z * (code_alphabet as f64).powf(alpha_c * c_max);
    Ok(Lemma1Value {
        value: probability_term.probability + penalty,
        value_tight: probability_term.probability + penalty_tight,
        probability_term,
        penalty,
    })
}

/// One evaluated converse bound.
#[derive(Debug, Clone)]
pub struct Lemma2Value {
    /// `Pr{ P(X^n) <= z K^(-alpha eta) } - z`; may be negative and is
    /// reported unclamped.
    pub value: f64,
    pub value_exact: BigRational,
    pub probability_term: ExactTail,
}

/// Evaluates the converse bound exactly from an enumerated distribution.
pub fn lemma2_rhs(
    probs: &ProbTable,
    code_alphabet: usize,
    alpha_c: f64,
    eta: f64,
    z: f64,
) -> Result<Lemma2Value> {
    if !(z > 0.0) {
        return Err(Error::InvalidInput("z must be positive".into()));
    }
    let log2_k = (code_alphabet as f64).log2();
    // P(x) <= z K^(-alpha eta)  <=>  log2 P(x) <= log2 z - alpha eta log2 K
    let threshold = z.log2() - alpha_c * eta * log2_k;
    // Ties shrink the probability term: conservative for a lower bound.
    let (mass, ties) = mass_log2_below(probs, threshold, TieRule::Exclude);
    let probability_term = finish_tail(mass, &probs.denom, ties);
    let value_exact = probability_term.exact.clone() - rational_from_f64(z);
    Ok(Lemma2Value {
        value: probability_term.probability - z,
        value_exact,
        probability_term,
    })
}

/// Monte Carlo probability term of the achievability bound, for block
/// lengths beyond enumeration.
pub fn lemma1_probability_mc(
    source: &SourceModel,
    n: usize,
    code_alphabet: usize,
    alpha_c: f64,
    eta: f64,
    z: f64,
    trials: u64,
    seed: u64,
) -> Result<McTail> {
    if !(z > 0.0) {
        return Err(Error::InvalidInput("z must be positive".into()));
    }
    let log2_k = (code_alphabet as f64).log2();
    let threshold = -alpha_c * eta * log2_k - z.log2();
    sample_log2_below(source, n, threshold, trials, seed)
}

/// Monte Carlo probability term of the converse bound.
pub fn lemma2_probability_mc(
    source: &SourceModel,
    n: usize,
    code_alphabet: usize,
    alpha_c: f64,
    eta: f64,
    z: f64,
    trials: u64,
    seed: u64,
) -> Result<McTail> {
    if !(z > 0.0) {
        return Err(Error::InvalidInput("z must be positive".into()));
    }
    let log2_k = (code_alphabet as f64).log2();
    let threshold = z.log2() - alpha_c * eta * log2_k;
    sample_log2_below(source, n, threshold, trials, seed)
}

fn sample_log2_below(
    source: &SourceModel,
    n: usize,
    threshold: f64,
    trials: u64,
    seed: u64,
) -> Result<McTail> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be >= 1".into()));
    }
    let mut hits = 0u64;
    const CHUNK: u64 = 4096;
    let chunks = trials.div_ceil(CHUNK);
    for chunk in 0..chunks {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed.wrapping_add(chunk));
        let count = CHUNK.min(trials - chunk * CHUNK);
        for _ in 0..count {
            let x = source.sample_with(n, &mut rng);
            if source.log2_probability(&x)? <= threshold {
                hits += 1;
            }
        }
    }
    let estimate = hits as f64 / trials as f64;
    let ci95 = 1.96 * (estimate * (1.0 - estimate) / trials as f64).sqrt();
    Ok(McTail {
        estimate,
        ci95,
        hits,
        trials,
        ties: 0,
    })
}

/// One row of a bound-verification sweep.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub n: usize,
    pub eta: f64,
    pub z: f64,
    pub measured: f64,
    /// Zero for exact measurements.
    pub ci95: f64,
    pub lemma1_rhs: f64,
    pub lemma1_rhs_tight: f64,
    pub lemma2_rhs: f64,
    /// Strict `measured < lemma1_rhs`, decided in exact arithmetic.
    pub pass_lemma1: bool,
    /// `measured >= lemma2_rhs`, decided in exact arithmetic.
    pub pass_lemma2: bool,
    /// Guard-band ties encountered across the event classifications.
    pub ties: usize,
}

impl BoundReport {
    pub fn pass(&self) -> bool {
        self.pass_lemma1 && self.pass_lemma2
    }
}

/// Builds the encoder for each block length, measures its overflow exactly,
/// and evaluates both bounds at the scheduled `(eta_n, z_n)`.
pub fn verify_bounds(
    source: &SourceModel,
    cost_fn: &CostFunction,
    capacity: &CostCapacity,
    schedule: &ThresholdSchedule,
    n_list: &[usize],
    z_rule: &ZRule,
    budget: u64,
) -> Result<Vec<BoundReport>> {
    z_rule.validate()?;
    let mut reports = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let enc = IntervalEncoder::build_with_budget(source, n, cost_fn, capacity, budget)?;
        let book = enc.codebook().ok_or_else(|| {
            Error::InvalidInput("bound verification needs a materialized codebook".into())
        })?;
        let eta = schedule.eta(n)?;
        let z = z_rule.z(cost_fn.alphabet(), n);
        reports.push(bound_report_for(
            book,
            cost_fn.alphabet(),
            capacity.alpha_c,
            cost_fn.c_max(),
            n,
            eta,
            z,
        )?);
    }
    Ok(reports)
}

/// Evaluates one `(eta, z)` point against a codebook (the encoder's own or an
/// adversarial one).
pub fn bound_report_for(
    book: &Codebook,
    code_alphabet: usize,
    alpha_c: f64,
    c_max: f64,
    n: usize,
    eta: f64,
    z: f64,
) -> Result<BoundReport> {
    let measured = overflow_exact(book, eta);
    let l1 = lemma1_rhs(&book.probs, code_alphabet, alpha_c, c_max, eta, z)?;
    let l2 = lemma2_rhs(&book.probs, code_alphabet, alpha_c, eta, z)?;
    let l1_exact = l1.probability_term.exact.clone() + rational_from_f64(l1.penalty);
    let pass_lemma1 = measured.exact < l1_exact;
    let pass_lemma2 = measured.exact >= l2.value_exact;
    Ok(BoundReport {
        n,
        eta,
        z,
        measured: measured.probability,
        ci95: 0.0,
        lemma1_rhs: l1.value,
        lemma1_rhs_tight: l1.value_tight,
        lemma2_rhs: l2.value,
        pass_lemma1,
        pass_lemma2,
        ties: measured.ties + l1.probability_term.ties + l2.probability_term.ties,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost_model::DEFAULT_UNIFORMITY_TOL;
    use crate::sources::{Pmf, DEFAULT_ENUMERATION_BUDGET};
    use num_traits::One;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn bern(p: &str) -> SourceModel {
        SourceModel::iid(Pmf::bernoulli(p).unwrap())
    }

    fn build(
        src: &SourceModel,
        n: usize,
        costs: &[i64],
    ) -> (IntervalEncoder, CostFunction, CostCapacity) {
        let cf =
            CostFunction::memoryless(2, costs.iter().map(|&c| rat(c, 1)).collect()).unwrap();
        let cap = cf.cost_capacity(DEFAULT_UNIFORMITY_TOL).unwrap();
        let enc = IntervalEncoder::build(src, n, &cf, &cap).unwrap();
        (enc, cf, cap)
    }

    #[test]
    fn overflow_empty_and_full_events() {
        let src = bern("0.25");
        let (enc, ..) = build(&src, 4, &[1, 2]);
        let book = enc.codebook().unwrap();
        let max_cost = book.iter_words().map(|(_, w)| w.cost).fold(0.0, f64::max);
        let min_cost = book
            .iter_words()
            .map(|(_, w)| w.cost)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(overflow_exact(book, max_cost).probability, 0.0);
        assert_eq!(overflow_exact(book, min_cost - 0.5).probability, 1.0);
    }

    #[test]
    fn overflow_manual_enumeration_agrees() {
        let src = bern("0.5");
        let (enc, ..) = build(&src, 2, &[1, 1]);
        let book = enc.codebook().unwrap();
        let eta = 2.0;
        let expect: BigRational = book
            .iter_words()
            .filter(|(_, w)| w.cost > eta)
            .map(|(rank, _)| book.probs.rational(rank))
            .sum();
        assert_eq!(overflow_exact(book, eta).exact, expect);
    }

    #[test]
    fn overflow_is_non_increasing_in_eta() {
        let src = bern("0.3");
        let (enc, ..) = build(&src, 6, &[1, 2]);
        let book = enc.codebook().unwrap();
        let mut last = f64::INFINITY;
        let mut eta = 0.5;
        while eta < 20.0 {
            let p = overflow_exact(book, eta).probability;
            assert!(p <= last + 1e-15);
            last = p;
            eta += 0.25;
        }
    }

    #[test]
    fn mc_matches_exact_within_sampling_error() {
        let src = bern("0.25");
        let (enc, _, cap) = build(&src, 8, &[1, 2]);
        let h = 0.811278;
        let eta = 8.0 * h / cap.alpha_c;
        let exact = overflow_exact(enc.codebook().unwrap(), eta).probability;
        let mc = overflow_mc(&enc, eta, 100_000, 17).unwrap();
        assert!(
            (mc.estimate - exact).abs() <= 3.0 * mc.ci95 / 1.96,
            "mc {} vs exact {exact}",
            mc.estimate
        );
        let again = overflow_mc(&enc, eta, 100_000, 17).unwrap();
        assert_eq!(mc.estimate, again.estimate);
        assert_eq!(overflow_mc(&enc, 1e9, 1000, 3).unwrap().estimate, 0.0);
    }

    #[test]
    fn lemma2_hand_value() {
        // Bern(0.5), n = 4, unit costs, eta = 2, z = 0.1:
        // every string has P = 1/16 > 0.1 * 2^-2, so the bound is -0.1.
        let src = bern("0.5");
        let probs = ProbTable::build(&src, 4, DEFAULT_ENUMERATION_BUDGET).unwrap();
        let v = lemma2_rhs(&probs, 2, 1.0, 2.0, 0.1).unwrap();
        assert!((v.value + 0.1).abs() < 1e-15);
        assert!(v.probability_term.exact.is_zero());
    }

    #[test]
    fn lemma1_vacuous_for_huge_z() {
        let src = bern("0.25");
        let probs = ProbTable::build(&src, 4, DEFAULT_ENUMERATION_BUDGET).unwrap();
        let v = lemma1_rhs(&probs, 2, 1.0, 1.0, 4.0, 1e6).unwrap();
        assert!(v.probability_term.exact.is_one());
        assert!(v.value > 1.0);
    }

    #[test]
    fn lemma1_pure_penalty_when_probability_term_vanishes() {
        // Unit costs, z = 1, eta far above every self-information:
        // the bound is z * K^(c_max + 1) = 4.
        let src = bern("0.25");
        let probs = ProbTable::build(&src, 4, DEFAULT_ENUMERATION_BUDGET).unwrap();
        let v = lemma1_rhs(&probs, 2, 1.0, 1.0, 100.0, 1.0).unwrap();
        assert!(v.probability_term.exact.is_zero());
        assert_eq!(v.value, 4.0);
        assert_eq!(v.value_tight, 2.0);
    }

    #[test]
    fn verify_bounds_direct_sweep_passes() {
        let src = bern("0.25");
        let cf = CostFunction::memoryless(2, vec![rat(1, 1), rat(2, 1)]).unwrap();
        let cap = cf.cost_capacity(DEFAULT_UNIFORMITY_TOL).unwrap();
        let h = 0.8112781244591328;
        let schedule = ThresholdSchedule::FirstOrder {
            rate: h / cap.alpha_c,
        };
        let reports = verify_bounds(
            &src,
            &cf,
            &cap,
            &schedule,
            &[4, 8, 12],
            &ZRule::DirectPart { gamma: 0.1 },
            DEFAULT_ENUMERATION_BUDGET,
        )
        .unwrap();
        assert_eq!(reports.len(), 3);
        for r in &reports {
            assert!(r.pass_lemma1, "lemma 1 failed at n = {}: {r:?}", r.n);
            assert!(r.pass_lemma2, "lemma 2 failed at n = {}: {r:?}", r.n);
            assert!(r.lemma1_rhs_tight <= r.lemma1_rhs);
        }
    }

    #[test]
    fn rate_far_from_entropy_saturates() {
        let src = bern("0.25");
        let cf = CostFunction::memoryless(2, vec![rat(1, 1), rat(2, 1)]).unwrap();
        let cap = cf.cost_capacity(DEFAULT_UNIFORMITY_TOL).unwrap();
        let h = 0.8112781244591328;
        let n = 10;
        // Far above the entropy rate: overflow tiny.
        let hi = ThresholdSchedule::FirstOrder {
            rate: (h + 0.6) / cap.alpha_c,
        };
        let hi_reports = verify_bounds(
            &src,
            &cf,
            &cap,
            &hi,
            &[n],
            &ZRule::DirectPart { gamma: 0.1 },
            DEFAULT_ENUMERATION_BUDGET,
        )
        .unwrap();
        assert!(hi_reports[0].measured < 0.05);
        // Far below: the converse bound pushes toward 1 - z.
        let lo = ThresholdSchedule::FirstOrder {
            rate: (h - 0.6).max(0.05) / cap.alpha_c,
        };
        let lo_reports = verify_bounds(
            &src,
            &cf,
            &cap,
            &lo,
            &[n],
            &ZRule::Converse { gamma: 0.05 },
            DEFAULT_ENUMERATION_BUDGET,
        )
        .unwrap();
        let z = ZRule::Converse { gamma: 0.05 }.z(2, n);
        assert!(lo_reports[0].lemma2_rhs > 0.9 - z);
        assert!(lo_reports[0].measured >= lo_reports[0].lemma2_rhs);
    }

    #[test]
    fn schedule_validation() {
        assert!(ThresholdSchedule::FirstOrder { rate: 0.5 }.eta(4).is_ok());
        assert!(ThresholdSchedule::FirstOrder { rate: -0.5 }.eta(4).is_err());
        assert!(ThresholdSchedule::SecondOrder { a: 0.1, l: -10.0 }
            .eta(4)
            .is_err());
        assert!(ThresholdSchedule::Explicit(vec![(4, 2.0)]).eta(8).is_err());
        assert!(ZRule::Fixed(0.0).validate().is_err());
        assert!(ZRule::Fixed(0.5).validate().is_ok());
    }

    #[test]
    fn unit_cost_overflow_equals_length_overflow() {
        let src = bern("0.25");
        for n in 1..=8 {
            let (enc, ..) = build(&src, n, &[1, 1]);
            let book = enc.codebook().unwrap();
            for eta in [0.5, 1.0, 2.5, n as f64, n as f64 + 1.5] {
                let by_cost = overflow_exact(book, eta);
                let by_len = length_overflow_exact(book, eta);
                assert_eq!(by_cost.exact, by_len.exact, "n={n} eta={eta}");
            }
        }
    }

    #[test]
    fn mc_lemma_terms_track_exact_values() {
        let src = bern("0.25");
        let probs = ProbTable::build(&src, 10, DEFAULT_ENUMERATION_BUDGET).unwrap();
        let (eta, z) = (9.0, 0.25);
        let exact = lemma1_rhs(&probs, 2, 1.0, 1.0, eta, z).unwrap();
        let mc = lemma1_probability_mc(&src, 10, 2, 1.0, eta, z, 100_000, 11).unwrap();
        assert!((mc.estimate - exact.probability_term.probability).abs() < 0.01);
        let exact2 = lemma2_rhs(&probs, 2, 1.0, eta, z).unwrap();
        let mc2 = lemma2_probability_mc(&src, 10, 2, 1.0, eta, z, 100_000, 11).unwrap();
        assert!((mc2.estimate - exact2.probability_term.probability).abs() < 0.01);
    }
}
