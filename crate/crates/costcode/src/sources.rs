//! Source models: i.i.d., first-order Markov, and finite mixtures of either,
//! with exact probability evaluation, exhaustive enumeration, and seeded
//! sampling.
//!
//! Mixtures mix *block* distributions: a component is drawn once per sequence
//! and the whole block is sampled from it, so the length-n law is the convex
//! combination of the component laws. That is the construction whose
//! information spectrum develops one plateau per component.
//!
//! All randomness comes from caller-supplied seeds; the module holds no
//! global generator state.

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::numeric::{big_ratio_to_f64, parse_decimal, rational_to_f64};

/// Largest number of strings an exhaustive enumeration will materialize by
/// default.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1 << 22;

/// Tolerance for probability normalization checks.
const NORMALIZATION_TOL: f64 = 1e-12;

/// A probability mass function over a finite alphabet, kept in exact form.
#[derive(Debug, Clone)]
pub struct Pmf {
    exact: Vec<BigRational>,
    values: Vec<f64>,
    /// log2 of each mass; `-inf` for zero masses.
    log2s: Vec<f64>,
    /// Cumulative masses for sampling, length `alphabet + 1`.
    cum_values: Vec<f64>,
}

impl Pmf {
    pub fn new(masses: Vec<BigRational>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::InvalidInput("pmf over an empty alphabet".into()));
        }
        let mut sum = BigRational::zero();
        for (i, p) in masses.iter().enumerate() {
            if p.is_negative() || p > &BigRational::one() {
                return Err(Error::InvalidInput(format!(
                    "pmf entry {i} is outside [0, 1]"
                )));
            }
            sum += p;
        }
        let drift = rational_to_f64(&(sum - BigRational::one())).abs();
        if drift > NORMALIZATION_TOL {
            return Err(Error::InvalidInput(format!(
                "pmf does not sum to 1 (off by {drift:e})"
            )));
        }
        let values: Vec<f64> = masses.iter().map(rational_to_f64).collect();
        let log2s = values
            .iter()
            .map(|&p| if p > 0.0 { p.log2() } else { f64::NEG_INFINITY })
            .collect();
        let mut cum_values = Vec::with_capacity(masses.len() + 1);
        let mut acc = BigRational::zero();
        cum_values.push(0.0);
        for p in &masses {
            acc += p;
            cum_values.push(rational_to_f64(&acc));
        }
        Ok(Self {
            exact: masses,
            values,
            log2s,
            cum_values,
        })
    }

    pub fn from_decimals(entries: &[&str]) -> Result<Self> {
        Self::new(entries.iter().map(|s| parse_decimal(s)).collect::<Result<_>>()?)
    }

    /// Binary pmf with P(1) given as a decimal literal.
    pub fn bernoulli(p_one: &str) -> Result<Self> {
        let p = parse_decimal(p_one)?;
        Self::new(vec![BigRational::one() - p.clone(), p])
    }

    pub fn uniform(alphabet: usize) -> Result<Self> {
        let p = BigRational::new(1.into(), (alphabet as i64).into());
        Self::new(vec![p; alphabet])
    }

    pub fn alphabet(&self) -> usize {
        self.exact.len()
    }

    pub fn mass(&self, symbol: u8) -> &BigRational {
        &self.exact[symbol as usize]
    }

    pub fn mass_f64(&self, symbol: u8) -> f64 {
        self.values[symbol as usize]
    }

    pub fn log2_mass(&self, symbol: u8) -> f64 {
        self.log2s[symbol as usize]
    }

    /// Draws one symbol.
    fn draw(&self, rng: &mut ChaCha12Rng) -> u8 {
        let u: f64 = rng.gen();
        // Linear scan: alphabets here are small.
        for s in 0..self.values.len() {
            if u < self.cum_values[s + 1] {
                return s as u8;
            }
        }
        (self.values.len() - 1) as u8
    }

    /// Entropy and self-information variance in log base `base_k`.
    ///
    /// Zero-mass symbols do not contribute. `sigma2` is zero exactly when the
    /// pmf is uniform over its support.
    pub fn self_info_stats(&self, base_k: usize) -> SelfInfoStats {
        let ln_k = (base_k as f64).ln();
        let mut h = 0.0;
        for &p in &self.values {
            if p > 0.0 {
                h += p * (-p.ln() / ln_k);
            }
        }
        let mut sigma2 = 0.0;
        for &p in &self.values {
            if p > 0.0 {
                let info = -p.ln() / ln_k;
                sigma2 += p * (info - h) * (info - h);
            }
        }
        SelfInfoStats { entropy: h, sigma2 }
    }
}

/// Entropy and self-information variance of a single letter, in base-K units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfInfoStats {
    pub entropy: f64,
    pub sigma2: f64,
}

/// A general-source model from the closed family {i.i.d., Markov, mixture}.
#[derive(Debug, Clone)]
pub enum SourceModel {
    Iid(Pmf),
    Markov {
        initial: Pmf,
        /// Row `s` is the next-symbol distribution given current symbol `s`.
        transitions: Vec<Pmf>,
    },
    Mixture {
        weights: Vec<BigRational>,
        weight_values: Vec<f64>,
        components: Vec<SourceModel>,
    },
}

impl SourceModel {
    pub fn iid(pmf: Pmf) -> Self {
        SourceModel::Iid(pmf)
    }

    pub fn markov(initial: Pmf, transitions: Vec<Pmf>) -> Result<Self> {
        let k = initial.alphabet();
        if transitions.len() != k {
            return Err(Error::InvalidInput(format!(
                "transition matrix has {} rows for alphabet {k}",
                transitions.len()
            )));
        }
        if transitions.iter().any(|row| row.alphabet() != k) {
            return Err(Error::InvalidInput(
                "transition rows must match the alphabet".into(),
            ));
        }
        Ok(SourceModel::Markov {
            initial,
            transitions,
        })
    }

    pub fn mixture(parts: Vec<(BigRational, SourceModel)>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidInput("mixture with no components".into()));
        }
        let k = parts[0].1.alphabet();
        if parts.iter().any(|(_, m)| m.alphabet() != k) {
            return Err(Error::InvalidInput(
                "mixture components must share one alphabet".into(),
            ));
        }
        let mut sum = BigRational::zero();
        for (w, _) in &parts {
            if w.is_negative() || w > &BigRational::one() {
                return Err(Error::InvalidInput("mixture weight outside [0, 1]".into()));
            }
            sum += w;
        }
        if rational_to_f64(&(sum - BigRational::one())).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidInput("mixture weights must sum to 1".into()));
        }
        let (weights, components): (Vec<_>, Vec<_>) = parts.into_iter().unzip();
        let weight_values = weights.iter().map(rational_to_f64).collect();
        Ok(SourceModel::Mixture {
            weights,
            weight_values,
            components,
        })
    }

    pub fn alphabet(&self) -> usize {
        match self {
            SourceModel::Iid(pmf) => pmf.alphabet(),
            SourceModel::Markov { initial, .. } => initial.alphabet(),
            SourceModel::Mixture { components, .. } => components[0].alphabet(),
        }
    }

    pub fn is_iid(&self) -> bool {
        matches!(self, SourceModel::Iid(_))
    }

    pub fn iid_pmf(&self) -> Option<&Pmf> {
        match self {
            SourceModel::Iid(pmf) => Some(pmf),
            _ => None,
        }
    }

    fn check_string(&self, x: &[u8]) -> Result<()> {
        if x.is_empty() {
            return Err(Error::InvalidInput("empty source string".into()));
        }
        let k = self.alphabet();
        if x.iter().any(|&s| s as usize >= k) {
            return Err(Error::InvalidInput(format!(
                "source symbol outside alphabet 0..{k}"
            )));
        }
        Ok(())
    }

    /// Exact probability of a length-n string.
    pub fn probability(&self, x: &[u8]) -> Result<BigRational> {
        self.check_string(x)?;
        Ok(self.probability_unchecked(x))
    }

    fn probability_unchecked(&self, x: &[u8]) -> BigRational {
        match self {
            SourceModel::Iid(pmf) => {
                let mut p = BigRational::one();
                for &s in x {
                    p *= pmf.mass(s);
                }
                p
            }
            SourceModel::Markov {
                initial,
                transitions,
            } => {
                let mut p = initial.mass(x[0]).clone();
                for w in x.windows(2) {
                    p *= transitions[w[0] as usize].mass(w[1]);
                }
                p
            }
            SourceModel::Mixture {
                weights,
                components,
                ..
            } => {
                let mut p = BigRational::zero();
                for (w, c) in weights.iter().zip(components) {
                    p += w * c.probability_unchecked(x);
                }
                p
            }
        }
    }

    /// `log2 P(x)` computed stably; `-inf` for zero-probability strings.
    pub fn log2_probability(&self, x: &[u8]) -> Result<f64> {
        self.check_string(x)?;
        Ok(self.log2_probability_unchecked(x))
    }

    fn log2_probability_unchecked(&self, x: &[u8]) -> f64 {
        match self {
            SourceModel::Iid(pmf) => x.iter().map(|&s| pmf.log2_mass(s)).sum(),
            SourceModel::Markov {
                initial,
                transitions,
            } => {
                let mut acc = initial.log2_mass(x[0]);
                for w in x.windows(2) {
                    acc += transitions[w[0] as usize].log2_mass(w[1]);
                }
                acc
            }
            SourceModel::Mixture {
                weight_values,
                components,
                ..
            } => {
                let terms: Vec<f64> = weight_values
                    .iter()
                    .zip(components)
                    .map(|(w, c)| {
                        if *w > 0.0 {
                            w.log2() + c.log2_probability_unchecked(x)
                        } else {
                            f64::NEG_INFINITY
                        }
                    })
                    .collect();
                let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                if m == f64::NEG_INFINITY {
                    return f64::NEG_INFINITY;
                }
                let s: f64 = terms.iter().map(|t| (t - m).exp2()).sum();
                m + s.log2()
            }
        }
    }

    /// Exhaustively enumerates every length-n string with its exact
    /// probability, in lexicographic order.
    pub fn enumerate(&self, n: usize, budget: u64) -> Result<Enumeration<'_>> {
        if n == 0 {
            return Err(Error::InvalidInput("enumeration needs n >= 1".into()));
        }
        let total = (self.alphabet() as f64).powi(n as i32);
        if !(total <= budget as f64) {
            return Err(Error::EnumerationTooLarge {
                requested: total,
                budget,
            });
        }
        Ok(Enumeration {
            model: self,
            state: Some(vec![0u8; n]),
        })
    }

    /// Draws a length-n string; deterministic in `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<u8>> {
        if n == 0 {
            return Err(Error::InvalidInput("sample needs n >= 1".into()));
        }
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        Ok(self.sample_with(n, &mut rng))
    }

    /// Draws a length-n string advancing the supplied generator.
    pub fn sample_with(&self, n: usize, rng: &mut ChaCha12Rng) -> Vec<u8> {
        match self {
            SourceModel::Iid(pmf) => (0..n).map(|_| pmf.draw(rng)).collect(),
            SourceModel::Markov {
                initial,
                transitions,
            } => {
                let mut out = Vec::with_capacity(n);
                let mut cur = initial.draw(rng);
                out.push(cur);
                for _ in 1..n {
                    cur = transitions[cur as usize].draw(rng);
                    out.push(cur);
                }
                out
            }
            SourceModel::Mixture {
                weight_values,
                components,
                ..
            } => {
                // One component per sequence: the mixture of block laws.
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                let mut chosen = components.len() - 1;
                for (i, w) in weight_values.iter().enumerate() {
                    acc += w;
                    if u < acc {
                        chosen = i;
                        break;
                    }
                }
                components[chosen].sample_with(n, rng)
            }
        }
    }
}

/// Iterator over `(string, exact probability)` in lexicographic order.
pub struct Enumeration<'a> {
    model: &'a SourceModel,
    state: Option<Vec<u8>>,
}

impl Iterator for Enumeration<'_> {
    type Item = (Vec<u8>, BigRational);

    fn next(&mut self) -> Option<Self::Item> {
        let current = self.state.clone()?;
        let p = self.model.probability_unchecked(&current);
        // Odometer increment.
        let k = self.model.alphabet() as u8;
        let mut next = current.clone();
        let mut pos = next.len();
        loop {
            if pos == 0 {
                self.state = None;
                break;
            }
            pos -= 1;
            if next[pos] + 1 < k {
                next[pos] += 1;
                for slot in next[pos + 1..].iter_mut() {
                    *slot = 0;
                }
                self.state = Some(next);
                break;
            }
        }
        Some((current, p))
    }
}

/// Lexicographic rank -> digits over the given alphabet.
pub fn rank_to_string(mut rank: u64, n: usize, alphabet: usize) -> Vec<u8> {
    let mut out = vec![0u8; n];
    for slot in out.iter_mut().rev() {
        *slot = (rank % alphabet as u64) as u8;
        rank /= alphabet as u64;
    }
    out
}

/// Digits -> lexicographic rank.
pub fn string_to_rank(x: &[u8], alphabet: usize) -> u64 {
    x.iter().fold(0u64, |acc, &d| acc * alphabet as u64 + d as u64)
}

/// The full length-n distribution on one common denominator, with `f64` logs.
///
/// This is the workhorse for exact overflow and spectrum sums: numerator
/// arithmetic stays in `BigUint`, so event masses add exactly.
pub struct ProbTable {
    pub n: usize,
    pub alphabet: usize,
    pub numerators: Vec<BigUint>,
    pub denom: BigUint,
    /// log2 of each probability; `-inf` where the numerator is zero.
    pub log2: Vec<f64>,
}

impl ProbTable {
    pub fn build(model: &SourceModel, n: usize, budget: u64) -> Result<Self> {
        let probs: Vec<BigRational> = model.enumerate(n, budget)?.map(|(_, p)| p).collect();
        let mut denom = BigUint::one();
        for p in &probs {
            denom = denom.lcm(p.denom().magnitude());
        }
        let numerators: Vec<BigUint> = probs
            .iter()
            .map(|p| p.numer().magnitude() * (&denom / p.denom().magnitude()))
            .collect();
        let log2 = numerators
            .iter()
            .map(|num| {
                if num.is_zero() {
                    f64::NEG_INFINITY
                } else {
                    crate::numeric::log2_rational(&BigRational::new(
                        num.clone().into(),
                        denom.clone().into(),
                    ))
                }
            })
            .collect();
        Ok(Self {
            n,
            alphabet: model.alphabet(),
            numerators,
            denom,
            log2,
        })
    }

    pub fn len(&self) -> usize {
        self.numerators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numerators.is_empty()
    }

    pub fn probability_f64(&self, rank: usize) -> f64 {
        big_ratio_to_f64(&self.numerators[rank], &self.denom)
    }

    pub fn rational(&self, rank: usize) -> BigRational {
        BigRational::new(
            self.numerators[rank].clone().into(),
            self.denom.clone().into(),
        )
    }
}

/// Exact lexicographic cumulative probabilities for an i.i.d. model.
///
/// For a string `x`, `cumulative` returns integers `(s, q)` with
/// `F(x) = s / D^n` and `P(x) = q / D^n`, where `F` is the total mass of
/// strings lexicographically below `x` and `D` the pmf's common denominator.
/// The divide-and-conquer combination keeps the bignum work near
/// `O(n log n)` per string, which is what makes Monte Carlo encoding at
/// block lengths in the thousands practical.
pub struct IidCumulative {
    pmf_num: Vec<BigUint>,
    cdf_num: Vec<BigUint>,
    denom: BigUint,
    /// `log2(denom)` when the denominator is a power of two.
    denom_log2: Option<u64>,
    /// Precomputed `denom^m` for every split size the recursion uses.
    pow_cache: Vec<(usize, BigUint)>,
    n: usize,
}

impl IidCumulative {
    pub fn new(pmf: &Pmf, n: usize) -> Self {
        let mut denom = BigUint::one();
        for p in &pmf.exact {
            denom = denom.lcm(p.denom().magnitude());
        }
        let pmf_num: Vec<BigUint> = pmf
            .exact
            .iter()
            .map(|p| p.numer().magnitude() * (&denom / p.denom().magnitude()))
            .collect();
        let mut cdf_num = Vec::with_capacity(pmf_num.len() + 1);
        let mut acc = BigUint::zero();
        cdf_num.push(acc.clone());
        for q in &pmf_num {
            acc += q;
            cdf_num.push(acc.clone());
        }
        let denom_log2 = if denom.count_ones() == 1 {
            Some(denom.bits() - 1)
        } else {
            None
        };
        let mut sizes = std::collections::BTreeSet::new();
        collect_split_sizes(n, &mut sizes);
        let pow_cache = sizes
            .into_iter()
            .map(|m| (m, denom.pow(m as u32)))
            .collect();
        Self {
            pmf_num,
            cdf_num,
            denom,
            denom_log2,
            pow_cache,
            n,
        }
    }

    pub fn denom(&self) -> &BigUint {
        &self.denom
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn denom_pow(&self, m: usize) -> BigUint {
        if let Some(b) = self.denom_log2 {
            return BigUint::one() << (b * m as u64);
        }
        if let Some((_, p)) = self.pow_cache.iter().find(|(s, _)| *s == m) {
            return p.clone();
        }
        self.denom.pow(m as u32)
    }

    fn scale_by_denom_pow(&self, v: &BigUint, m: usize) -> BigUint {
        if m == 0 {
            return v.clone();
        }
        if let Some(b) = self.denom_log2 {
            return v << (b * m as u64);
        }
        v * self.denom_pow(m)
    }

    /// `(F(x)*D^n, P(x)*D^n)` for the full-length string `x`.
    pub fn cumulative(&self, x: &[u8]) -> (BigUint, BigUint) {
        assert_eq!(x.len(), self.n);
        self.cumulative_rec(x)
    }

    fn cumulative_rec(&self, x: &[u8]) -> (BigUint, BigUint) {
        if x.len() == 1 {
            let s = x[0] as usize;
            return (self.cdf_num[s].clone(), self.pmf_num[s].clone());
        }
        let mid = x.len() / 2;
        let (s_left, q_left) = self.cumulative_rec(&x[..mid]);
        let (s_right, q_right) = self.cumulative_rec(&x[mid..]);
        let right_len = x.len() - mid;
        let s = self.scale_by_denom_pow(&s_left, right_len) + &q_left * s_right;
        let q = q_left * q_right;
        (s, q)
    }
}

fn collect_split_sizes(len: usize, out: &mut std::collections::BTreeSet<usize>) {
    if len <= 1 {
        return;
    }
    let mid = len / 2;
    out.insert(len - mid);
    collect_split_sizes(mid, out);
    collect_split_sizes(len - mid, out);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bern(p: &str) -> SourceModel {
        SourceModel::iid(Pmf::bernoulli(p).unwrap())
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn iid_probability_is_a_product() {
        let src = bern("0.25");
        let p = src.probability(&[1, 1, 0]).unwrap();
        assert_eq!(p, rat(3, 64)); // 0.25 * 0.25 * 0.75
        assert!((rational_to_f64(&p) - 0.046875).abs() < 1e-15);
    }

    #[test]
    fn mixture_probability_is_a_convex_combination() {
        let mix = SourceModel::mixture(vec![
            (rat(3, 10), bern("0.1")),
            (rat(7, 10), bern("0.4")),
        ])
        .unwrap();
        let p = mix.probability(&[1]).unwrap();
        assert_eq!(p, rat(31, 100)); // 0.3*0.1 + 0.7*0.4
    }

    #[test]
    fn markov_deterministic_alternation() {
        let initial = Pmf::from_decimals(&["1", "0"]).unwrap();
        let transitions = vec![
            Pmf::from_decimals(&["0", "1"]).unwrap(),
            Pmf::from_decimals(&["1", "0"]).unwrap(),
        ];
        let src = SourceModel::markov(initial, transitions).unwrap();
        assert_eq!(src.probability(&[0, 1, 0]).unwrap(), rat(1, 1));
        assert_eq!(src.probability(&[0, 0, 1]).unwrap(), rat(0, 1));
    }

    #[test]
    fn enumeration_covers_everything_once() {
        let src = bern("0.5");
        let all: Vec<_> = src.enumerate(2, DEFAULT_ENUMERATION_BUDGET).unwrap().collect();
        assert_eq!(all.len(), 4);
        assert!(all.iter().all(|(_, p)| *p == rat(1, 4)));
        assert_eq!(all[0].0, vec![0, 0]);
        assert_eq!(all[3].0, vec![1, 1]);
    }

    #[test]
    fn enumeration_probabilities_sum_to_one() {
        let mix = SourceModel::mixture(vec![
            (rat(1, 2), bern("0")),
            (rat(1, 2), bern("1")),
        ])
        .unwrap();
        let total: BigRational = mix
            .enumerate(3, DEFAULT_ENUMERATION_BUDGET)
            .unwrap()
            .map(|(_, p)| p)
            .sum();
        assert_eq!(total, BigRational::one());
        // Degenerate components put all mass on the two constant strings.
        let probs: Vec<_> = mix
            .enumerate(3, DEFAULT_ENUMERATION_BUDGET)
            .unwrap()
            .collect();
        assert_eq!(probs[0].1, rat(1, 2));
        assert_eq!(probs[7].1, rat(1, 2));
        assert!(probs[1..7].iter().all(|(_, p)| p.is_zero()));
    }

    #[test]
    fn enumeration_budget_is_enforced() {
        let src = bern("0.5");
        match src.enumerate(40, 1 << 20) {
            Err(Error::EnumerationTooLarge { .. }) => {}
            other => panic!("expected budget error, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn sampling_is_deterministic_in_the_seed() {
        let src = bern("0.25");
        let a = src.sample(64, 7).unwrap();
        let b = src.sample(64, 7).unwrap();
        assert_eq!(a, b);
        let c = src.sample(64, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn degenerate_source_samples_constant() {
        let src = bern("1.0");
        assert_eq!(src.sample(4, 123).unwrap(), vec![1, 1, 1, 1]);
    }

    #[test]
    fn sample_mean_concentrates() {
        let src = bern("0.25");
        let n = 100_000;
        let x = src.sample(n, 42).unwrap();
        let mean = x.iter().map(|&s| s as f64).sum::<f64>() / n as f64;
        assert!((mean - 0.25).abs() < 0.01, "mean = {mean}");
    }

    #[test]
    fn self_info_stats_uniform_binary() {
        let stats = Pmf::bernoulli("0.5").unwrap().self_info_stats(2);
        assert!((stats.entropy - 1.0).abs() < 1e-15);
        assert!(stats.sigma2.abs() < 1e-24);
    }

    #[test]
    fn self_info_stats_bern_quarter() {
        let stats = Pmf::bernoulli("0.25").unwrap().self_info_stats(2);
        // Closed forms for a binary pmf.
        let h = -(0.25f64 * 0.25f64.log2() + 0.75 * 0.75f64.log2());
        let sigma2 = 0.25 * 0.75 * (3.0f64.log2() * 3.0f64.log2());
        assert!((stats.entropy - h).abs() < 1e-12);
        assert!((stats.sigma2 - sigma2).abs() < 1e-12);
        assert!((stats.entropy - 0.811278).abs() < 1e-6);
    }

    #[test]
    fn self_info_stats_base_change() {
        let p = Pmf::bernoulli("0.25").unwrap();
        let base2 = p.self_info_stats(2);
        let base4 = p.self_info_stats(4);
        assert!((base4.entropy - base2.entropy / 2.0).abs() < 1e-12);
        assert!((base4.sigma2 - base2.sigma2 / 4.0).abs() < 1e-12);
    }

    #[test]
    fn normalized_self_information_approaches_entropy() {
        let src = bern("0.25");
        let stats = src.iid_pmf().unwrap().self_info_stats(2);
        let n = 10_000usize;
        let draws = 100;
        let mut acc = 0.0;
        for seed in 0..draws {
            let x = src.sample(n, seed).unwrap();
            acc += -src.log2_probability(&x).unwrap() / n as f64;
        }
        let mean = acc / draws as f64;
        let band = 4.0 * (stats.sigma2 / n as f64).sqrt();
        assert!(
            (mean - stats.entropy).abs() < band,
            "mean {mean} vs H {} +- {band}",
            stats.entropy
        );
    }

    #[test]
    fn mixture_self_information_concentrates_per_component() {
        let mix = SourceModel::mixture(vec![
            (rat(3, 10), bern("0.1")),
            (rat(7, 10), bern("0.4")),
        ])
        .unwrap();
        let h_low = Pmf::bernoulli("0.1").unwrap().self_info_stats(2).entropy;
        let h_high = Pmf::bernoulli("0.4").unwrap().self_info_stats(2).entropy;
        let n = 4096;
        let trials = 2000;
        let mut near_low = 0;
        let mut near_high = 0;
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..trials {
            let x = mix.sample_with(n, &mut rng);
            let rate = -mix.log2_probability(&x).unwrap() / n as f64;
            if (rate - h_low).abs() < 0.1 {
                near_low += 1;
            } else if (rate - h_high).abs() < 0.1 {
                near_high += 1;
            }
        }
        assert_eq!(near_low + near_high, trials);
        let frac_high = near_high as f64 / trials as f64;
        assert!((frac_high - 0.7).abs() < 0.05, "frac_high = {frac_high}");
    }

    #[test]
    fn prob_table_matches_enumeration() {
        let src = bern("0.25");
        let table = ProbTable::build(&src, 4, DEFAULT_ENUMERATION_BUDGET).unwrap();
        for (rank, (x, p)) in src
            .enumerate(4, DEFAULT_ENUMERATION_BUDGET)
            .unwrap()
            .enumerate()
        {
            assert_eq!(table.rational(rank), p);
            assert_eq!(rank_to_string(rank as u64, 4, 2), x);
        }
    }

    #[test]
    fn iid_cumulative_agrees_with_direct_sums() {
        let pmf = Pmf::bernoulli("0.25").unwrap();
        let src = SourceModel::iid(pmf.clone());
        let n = 6;
        let cum = IidCumulative::new(&pmf, n);
        let denom_n = cum.denom_pow(n);
        let mut running = BigRational::zero();
        for (x, p) in src.enumerate(n, DEFAULT_ENUMERATION_BUDGET).unwrap() {
            let (s, q) = cum.cumulative(&x);
            assert_eq!(
                BigRational::new(s.into(), denom_n.clone().into()),
                running,
                "cumulative mismatch at {x:?}"
            );
            assert_eq!(BigRational::new(q.into(), denom_n.clone().into()), p);
            running += p;
        }
        assert_eq!(running, BigRational::one());
    }

    #[test]
    fn chi_square_goodness_of_fit_small_n() {
        // Empirical sampling distribution vs exact enumeration, n <= 4.
        let src = SourceModel::mixture(vec![
            (rat(1, 4), bern("0.2")),
            (rat(3, 4), bern("0.6")),
        ])
        .unwrap();
        let n = 3usize;
        let trials = 100_000u64;
        let cells: Vec<f64> = src
            .enumerate(n, DEFAULT_ENUMERATION_BUDGET)
            .unwrap()
            .map(|(_, p)| rational_to_f64(&p))
            .collect();
        let mut counts = vec![0u64; cells.len()];
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        for _ in 0..trials {
            let x = src.sample_with(n, &mut rng);
            counts[string_to_rank(&x, 2) as usize] += 1;
        }
        let mut stat = 0.0;
        let mut df = 0usize;
        for (c, p) in counts.iter().zip(&cells) {
            if *p > 0.0 {
                let expect = p * trials as f64;
                stat += (*c as f64 - expect) * (*c as f64 - expect) / expect;
                df += 1;
            } else {
                assert_eq!(*c, 0, "sampled an impossible string");
            }
        }
        let df = (df - 1) as f64;
        // Wilson-Hilferty critical value at significance 1e-3.
        let z = 3.090232306167814; // Phi^{-1}(0.999)
        let crit = df * (1.0 - 2.0 / (9.0 * df) + z * (2.0 / (9.0 * df)).sqrt()).powi(3);
        assert!(stat < crit, "chi-square {stat} >= critical {crit}");
    }
}
