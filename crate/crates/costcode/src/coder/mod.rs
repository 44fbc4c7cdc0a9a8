//! Cost-aware prefix-free block coding.
//!
//! The encoder is an interval code on a cost-weighted channel. Solving the
//! capacity equation turns `q(u|ctx) = K^(-alpha_c * c(u|ctx))` into a
//! probability distribution over code symbols for every context; a source
//! string `x` owns the interval `[F(x), F(x) + P(x))` of the lexicographic
//! cumulative, and the encoder emits channel symbols — at each step the child
//! interval containing the source midpoint, ties to the lower child — until
//! the channel interval first lands inside the source interval. Nesting makes
//! the code prefix-free, and stopping at first containment yields the
//! per-codeword guarantee
//!
//! ```text
//!   c(w(x)) <= -(1/alpha_c) log_K P(x) + log_K(2)/alpha_c + c_max
//! ```
//!
//! because the parent of the final interval still straddles the source
//! interval and so is wider than P(x)/2.
//!
//! Small block lengths materialize the whole codebook; i.i.d. sources also
//! support a streaming mode that encodes single strings at block lengths far
//! beyond enumeration, which is what Monte Carlo overflow sweeps use.

mod window;

use std::collections::HashMap;
use std::io::Write;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::cost_model::{CostCapacity, CostFunction};
use crate::error::{Error, Result};
use crate::numeric::rational_to_f64;
use crate::sources::{
    rank_to_string, string_to_rank, IidCumulative, ProbTable, SourceModel,
    DEFAULT_ENUMERATION_BUDGET,
};

use window::{BitStream, IntervalWalk, WinPartition, FRAC_BITS, ONE};

/// Slack allowed when certifying the cost bound; covers the capacity solver
/// tolerance and `f64` evaluation of logs.
const CERTIFY_EPS: f64 = 1e-9;

/// The cost-bound constant `log_K(2)/alpha_c + c_max`.
pub fn cost_bound_slack(code_alphabet: usize, alpha_c: f64, c_max: f64) -> f64 {
    std::f64::consts::LN_2 / (code_alphabet as f64).ln() / alpha_c + c_max
}

/// One codeword: its channel symbols and total cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Codeword {
    pub symbols: Vec<u8>,
    pub cost: f64,
    pub cost_exact: BigRational,
}

/// Channel-side tables shared by every walk of one encoder.
struct ChannelTables {
    partitions: Vec<WinPartition>,
    /// Scaled integer cost per (context, symbol), over `cost_scale`.
    cost_scaled: Vec<u128>,
    cost_scale: u128,
    /// Bits of interval shrink a single step is guaranteed to produce.
    min_shrink_bits: f64,
}

impl ChannelTables {
    fn build(cost_fn: &CostFunction, alpha_c: f64) -> Result<Self> {
        let k = cost_fn.alphabet();
        let mut scale = BigUint::one();
        for ctx in 0..cost_fn.num_contexts() {
            for entry in cost_fn.row(ctx) {
                scale = num_integer::lcm(scale, entry.exact.denom().magnitude().clone());
            }
        }
        let cost_scale = scale
            .to_u128()
            .ok_or_else(|| Error::InvalidInput("cost denominators too large".into()))?;
        let mut partitions = Vec::with_capacity(cost_fn.num_contexts());
        let mut cost_scaled = Vec::with_capacity(cost_fn.num_contexts() * k);
        let mut max_weight: u128 = 0;
        for ctx in 0..cost_fn.num_contexts() {
            let row = cost_fn.row(ctx);
            let wins: Vec<u128> = row
                .iter()
                .map(|e| window::weight_win(k, alpha_c, e.value))
                .collect();
            max_weight = max_weight.max(*wins.iter().max().unwrap());
            partitions.push(WinPartition::from_wins(wins)?);
            for entry in row {
                let scaled = (entry.exact.clone() * BigRational::from_integer(cost_scale.into()))
                    .to_integer()
                    .magnitude()
                    .to_u128()
                    .ok_or_else(|| Error::InvalidInput("cost values too large".into()))?;
                cost_scaled.push(scaled);
            }
        }
        let min_shrink_bits = -((max_weight as f64) / 2f64.powi(96)).log2();
        Ok(Self {
            partitions,
            cost_scaled,
            cost_scale,
            min_shrink_bits,
        })
    }

    fn cost_rational(&self, acc: u128) -> BigRational {
        BigRational::new(
            BigUint::from(acc).into(),
            BigUint::from(self.cost_scale).into(),
        )
    }
}

/// A materialized code: one optional codeword per lexicographic rank.
///
/// Zero-probability strings carry no codeword. The struct is also the vehicle
/// for deliberately suboptimal codes in the converse-bound test harness, so
/// its invariant checks live here rather than on the encoder.
pub struct Codebook {
    pub n: usize,
    pub source_alphabet: usize,
    pub probs: ProbTable,
    words: Vec<Option<Codeword>>,
    by_word: HashMap<Vec<u8>, usize>,
}

impl Codebook {
    fn from_words(probs: ProbTable, words: Vec<Option<Codeword>>) -> Self {
        let mut by_word = HashMap::with_capacity(words.len());
        for (rank, w) in words.iter().enumerate() {
            if let Some(cw) = w {
                by_word.insert(cw.symbols.clone(), rank);
            }
        }
        Codebook {
            n: probs.n,
            source_alphabet: probs.alphabet,
            probs,
            words,
            by_word,
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word(&self, rank: usize) -> Option<&Codeword> {
        self.words.get(rank).and_then(|w| w.as_ref())
    }

    pub fn rank_of_word(&self, symbols: &[u8]) -> Option<usize> {
        self.by_word.get(symbols).copied()
    }

    /// Iterates `(rank, codeword)` over strings that have one.
    pub fn iter_words(&self) -> impl Iterator<Item = (usize, &Codeword)> {
        self.words
            .iter()
            .enumerate()
            .filter_map(|(rank, w)| w.as_ref().map(|cw| (rank, cw)))
    }

    /// Exhaustive pairwise prefix check (via sort, so adjacent pairs
    /// suffice). Pure symbol comparison; no floating point involved.
    pub fn verify_prefix_free(&self) -> Result<()> {
        let mut words: Vec<&[u8]> = self
            .words
            .iter()
            .filter_map(|w| w.as_ref().map(|cw| cw.symbols.as_slice()))
            .collect();
        words.sort_unstable();
        for pair in words.windows(2) {
            if pair[1].starts_with(pair[0]) {
                return Err(Error::ConstructionBug(format!(
                    "codeword {:?} is a prefix of {:?}",
                    pair[0], pair[1]
                )));
            }
        }
        Ok(())
    }

    /// The generalized Kraft sum `sum_x K^(-alpha_c c(w(x)))`.
    pub fn kraft_sum(&self, code_alphabet: usize, alpha_c: f64) -> f64 {
        let log2_k = (code_alphabet as f64).log2();
        self.iter_words()
            .map(|(_, cw)| (-alpha_c * cw.cost * log2_k).exp2())
            .sum()
    }

    /// Pointwise cost-bound audit over every encodable string.
    pub fn cost_bound_report(
        &self,
        code_alphabet: usize,
        alpha_c: f64,
        c_max: f64,
    ) -> CostBoundReport {
        let log2_k = (code_alphabet as f64).log2();
        let bound = cost_bound_slack(code_alphabet, alpha_c, c_max);
        let mut max_slack = f64::NEG_INFINITY;
        let mut worst_rank = 0;
        let mut violations = 0;
        let mut checked = 0;
        for (rank, cw) in self.iter_words() {
            let log_k_p = self.probs.log2[rank] / log2_k;
            let slack = cw.cost + log_k_p / alpha_c;
            if slack > max_slack {
                max_slack = slack;
                worst_rank = rank;
            }
            if slack > bound + CERTIFY_EPS {
                violations += 1;
            }
            checked += 1;
        }
        CostBoundReport {
            max_slack,
            bound,
            worst_string: rank_to_string(worst_rank as u64, self.n, self.source_alphabet),
            violations,
            checked,
        }
    }

    /// Writes `"<x digits> <codeword digits> <cost to 12 decimals>"` lines.
    pub fn export(&self, out: &mut dyn Write) -> std::io::Result<()> {
        for (rank, cw) in self.iter_words() {
            let x = rank_to_string(rank as u64, self.n, self.source_alphabet);
            writeln!(out, "{} {} {:.12}", digits(&x), digits(&cw.symbols), cw.cost)?;
        }
        Ok(())
    }

    /// A random prefix-free codebook over the model's length-n strings:
    /// grows a random K-ary tree until it has enough leaves, optionally pads
    /// every leaf, shuffles, and assigns. Deliberately ignores probabilities,
    /// which is the point — the converse bound must hold for it anyway.
    pub fn random_prefix(
        model: &SourceModel,
        n: usize,
        cost_fn: &CostFunction,
        seed: u64,
        pad: usize,
        budget: u64,
    ) -> Result<Codebook> {
        let probs = ProbTable::build(model, n, budget)?;
        let m = probs.len();
        let k = cost_fn.alphabet();
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut leaves: Vec<Vec<u8>> = vec![Vec::new()];
        while leaves.len() < m || leaves.iter().any(|l| l.is_empty()) {
            let idx = rng.gen_range(0..leaves.len());
            let node = leaves.swap_remove(idx);
            for u in 0..k {
                let mut child = node.clone();
                child.push(u as u8);
                leaves.push(child);
            }
        }
        leaves.shuffle(&mut rng);
        let mut words = Vec::with_capacity(m);
        for rank in 0..m {
            let mut symbols = leaves[rank].clone();
            for _ in 0..pad {
                symbols.push(rng.gen_range(0..k) as u8);
            }
            let cost_exact = cost_fn.string_cost_exact(&symbols)?;
            words.push(Some(Codeword {
                cost: rational_to_f64(&cost_exact),
                cost_exact,
                symbols,
            }));
        }
        Ok(Codebook::from_words(probs, words))
    }

    /// Clone with one codeword extended by the given suffix; prefix-freeness
    /// is preserved (a leaf only got deeper) but the cost bound need not be.
    pub fn with_padded_word(
        &self,
        rank: usize,
        suffix: &[u8],
        cost_fn: &CostFunction,
    ) -> Result<Codebook> {
        let mut words: Vec<Option<Codeword>> = self.words.clone();
        let slot = words
            .get_mut(rank)
            .and_then(|w| w.as_mut())
            .ok_or_else(|| Error::InvalidInput(format!("rank {rank} has no codeword")))?;
        slot.symbols.extend_from_slice(suffix);
        slot.cost_exact = cost_fn.string_cost_exact(&slot.symbols)?;
        slot.cost = rational_to_f64(&slot.cost_exact);
        let probs = ProbTable {
            n: self.probs.n,
            alphabet: self.probs.alphabet,
            numerators: self.probs.numerators.clone(),
            denom: self.probs.denom.clone(),
            log2: self.probs.log2.clone(),
        };
        Ok(Codebook::from_words(probs, words))
    }
}

/// Result of the Eq.-style cost-bound audit.
#[derive(Debug, Clone)]
pub struct CostBoundReport {
    pub max_slack: f64,
    pub bound: f64,
    pub worst_string: Vec<u8>,
    pub violations: usize,
    pub checked: usize,
}

fn digits(x: &[u8]) -> String {
    x.iter().map(|&d| char::from(b'0' + d)).collect()
}

enum Mode {
    Materialized(Codebook),
    Streaming(IidCumulative),
}

/// A prefix-free cost-aware block encoder for one source and block length.
pub struct IntervalEncoder {
    n: usize,
    source: SourceModel,
    cost_fn: CostFunction,
    alpha_c: f64,
    tables: ChannelTables,
    mode: Mode,
}

impl IntervalEncoder {
    /// Builds an encoder, materializing the codebook when the string count
    /// fits the default enumeration budget and falling back to streaming for
    /// i.i.d. sources otherwise.
    pub fn build(
        source: &SourceModel,
        n: usize,
        cost_fn: &CostFunction,
        capacity: &CostCapacity,
    ) -> Result<Self> {
        Self::build_with_budget(source, n, cost_fn, capacity, DEFAULT_ENUMERATION_BUDGET)
    }

    pub fn build_with_budget(
        source: &SourceModel,
        n: usize,
        cost_fn: &CostFunction,
        capacity: &CostCapacity,
        budget: u64,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("block length must be >= 1".into()));
        }
        let count = (source.alphabet() as f64).powi(n as i32);
        if count <= budget as f64 {
            Self::build_materialized(source, n, cost_fn, capacity, budget)
        } else if source.is_iid() {
            Self::build_streaming(source, n, cost_fn, capacity)
        } else {
            Err(Error::EnumerationTooLarge {
                requested: count,
                budget,
            })
        }
    }

    fn build_materialized(
        source: &SourceModel,
        n: usize,
        cost_fn: &CostFunction,
        capacity: &CostCapacity,
        budget: u64,
    ) -> Result<Self> {
        let tables = ChannelTables::build(cost_fn, capacity.alpha_c)?;
        let probs = ProbTable::build(source, n, budget)?;
        let denom = probs.denom.clone();
        let mut acc = BigUint::zero();
        let mut words = Vec::with_capacity(probs.len());
        for rank in 0..probs.len() {
            let num = &probs.numerators[rank];
            if num.is_zero() {
                words.push(None);
                continue;
            }
            let (symbols, cost_acc) = walk_encode(&tables, cost_fn, &acc, num, &denom)?;
            let cost_exact = tables.cost_rational(cost_acc);
            words.push(Some(Codeword {
                cost: rational_to_f64(&cost_exact),
                cost_exact,
                symbols,
            }));
            acc += num;
        }
        Ok(Self {
            n,
            source: source.clone(),
            cost_fn: cost_fn.clone(),
            alpha_c: capacity.alpha_c,
            tables,
            mode: Mode::Materialized(Codebook::from_words(probs, words)),
        })
    }

    /// Streaming mode: per-string encoding for i.i.d. sources at block
    /// lengths beyond enumeration.
    pub fn build_streaming(
        source: &SourceModel,
        n: usize,
        cost_fn: &CostFunction,
        capacity: &CostCapacity,
    ) -> Result<Self> {
        let pmf = source.iid_pmf().ok_or_else(|| {
            Error::InvalidInput("streaming mode requires an i.i.d. source".into())
        })?;
        let tables = ChannelTables::build(cost_fn, capacity.alpha_c)?;
        Ok(Self {
            n,
            source: source.clone(),
            cost_fn: cost_fn.clone(),
            alpha_c: capacity.alpha_c,
            tables,
            mode: Mode::Streaming(IidCumulative::new(pmf, n)),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha_c(&self) -> f64 {
        self.alpha_c
    }

    pub fn source(&self) -> &SourceModel {
        &self.source
    }

    pub fn cost_fn(&self) -> &CostFunction {
        &self.cost_fn
    }

    pub fn codebook(&self) -> Option<&Codebook> {
        match &self.mode {
            Mode::Materialized(book) => Some(book),
            Mode::Streaming(_) => None,
        }
    }

    pub fn is_streaming(&self) -> bool {
        matches!(self.mode, Mode::Streaming(_))
    }

    fn validate_input(&self, x: &[u8]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::InvalidInput(format!(
                "input length {} does not match block length {}",
                x.len(),
                self.n
            )));
        }
        let k = self.source.alphabet();
        if x.iter().any(|&s| s as usize >= k) {
            return Err(Error::InvalidInput(format!(
                "source symbol outside alphabet 0..{k}"
            )));
        }
        Ok(())
    }

    /// Encodes one block. Deterministic; zero-probability strings are
    /// rejected as unencodable.
    pub fn encode(&self, x: &[u8]) -> Result<Codeword> {
        self.validate_input(x)?;
        match &self.mode {
            Mode::Materialized(book) => {
                let rank = string_to_rank(x, self.source.alphabet()) as usize;
                book.word(rank).cloned().ok_or(Error::UnencodableInput)
            }
            Mode::Streaming(cum) => {
                let (f_num, p_num) = cum.cumulative(x);
                if p_num.is_zero() {
                    return Err(Error::UnencodableInput);
                }
                let denom = cum.denom_pow(self.n);
                let (symbols, cost_acc) =
                    walk_encode(&self.tables, &self.cost_fn, &f_num, &p_num, &denom)?;
                let cost_exact = self.tables.cost_rational(cost_acc);
                Ok(Codeword {
                    cost: rational_to_f64(&cost_exact),
                    cost_exact,
                    symbols,
                })
            }
        }
    }

    /// Decodes a codeword back to its source block.
    pub fn decode(&self, symbols: &[u8]) -> Result<Vec<u8>> {
        if symbols.is_empty() {
            return Err(Error::DecodeFailure);
        }
        if symbols.iter().any(|&u| u as usize >= self.cost_fn.alphabet()) {
            return Err(Error::DecodeFailure);
        }
        match &self.mode {
            Mode::Materialized(book) => book
                .rank_of_word(symbols)
                .map(|rank| rank_to_string(rank as u64, self.n, self.source.alphabet()))
                .ok_or(Error::DecodeFailure),
            Mode::Streaming(cum) => self.decode_streaming(symbols, cum),
        }
    }

    /// Replays the channel walk to recover the codeword's interval, locates
    /// the unique source block containing it by exact comparison, and
    /// verifies by re-encoding.
    fn decode_streaming(&self, symbols: &[u8], cum: &IidCumulative) -> Result<Vec<u8>> {
        let k = self.cost_fn.alphabet();
        let mut l: u128 = 0;
        let mut w: u128 = ONE;
        let mut origin = BigUint::zero();
        let mut scale_bits: u64 = FRAC_BITS as u64;
        for (i, &u) in symbols.iter().enumerate() {
            let start = i.saturating_sub(self.cost_fn.depth());
            let ctx_idx = self.cost_fn.context_index(&symbols[start..i]);
            let part = &self.tables.partitions[ctx_idx];
            let lo = l + window::mul_frac(w, part.cum[u as usize]);
            let hi = if u as usize == k - 1 {
                l + w
            } else {
                l + window::mul_frac(w, part.cum[u as usize + 1])
            };
            l = lo;
            w = hi - lo;
            if w < (1u128 << 48) && i + 1 < symbols.len() {
                let shift = FRAC_BITS - 1 - (127 - w.leading_zeros());
                origin = (origin + BigUint::from(l)) << shift;
                scale_bits += shift as u64;
                w <<= shift;
                l = 0;
            }
        }
        // J = [j_lo / 2^scale_bits, (j_lo + w) / 2^scale_bits)
        let j_lo = origin + BigUint::from(l);
        let j_hi = &j_lo + BigUint::from(w);

        // Exact descent through the source tree: at each level exactly one
        // child interval can contain J.
        let pmf = self.source.iid_pmf().expect("streaming mode is i.i.d.");
        let alphabet = pmf.alphabet();
        let mut x = Vec::with_capacity(self.n);
        let mut f_num = BigUint::zero(); // F(prefix) * D^i
        let mut p_num = BigUint::one(); // P(prefix) * D^i
        // (o + l) * D^i, maintained incrementally.
        let mut j_lo_scaled = j_lo.clone();
        let mut j_hi_scaled = j_hi.clone();
        let denom_1 = cum.denom_pow(1);
        let mut cdf_scaled: Vec<BigUint> = Vec::with_capacity(alphabet + 1);
        for s in 0..=alphabet {
            let mut acc = BigUint::zero();
            for t in 0..s {
                acc += pmf.mass(t as u8).numer().magnitude()
                    * (&denom_1 / pmf.mass(t as u8).denom().magnitude());
            }
            cdf_scaled.push(acc);
        }
        let pmf_scaled: Vec<BigUint> = (0..alphabet)
            .map(|s| {
                pmf.mass(s as u8).numer().magnitude()
                    * (&denom_1 / pmf.mass(s as u8).denom().magnitude())
            })
            .collect();
        for _level in 0..self.n {
            j_lo_scaled *= &denom_1;
            j_hi_scaled *= &denom_1;
            let base = &f_num * &denom_1;
            let mut found = None;
            for s in 0..alphabet {
                let child_lo = (&base + &p_num * &cdf_scaled[s]) << scale_bits;
                let child_hi = (&base + &p_num * &cdf_scaled[s + 1]) << scale_bits;
                if child_lo <= j_lo_scaled && j_hi_scaled <= child_hi {
                    found = Some(s);
                    break;
                }
            }
            let s = found.ok_or(Error::DecodeFailure)?;
            f_num = base + &p_num * &cdf_scaled[s];
            p_num *= &pmf_scaled[s];
            x.push(s as u8);
        }
        if p_num.is_zero() {
            return Err(Error::DecodeFailure);
        }
        // A stray-but-plausible symbol string can survive the descent; the
        // round-trip check rejects it.
        if self.encode(&x)?.symbols != symbols {
            return Err(Error::DecodeFailure);
        }
        Ok(x)
    }

    /// Generalized Kraft sum of the materialized codebook.
    pub fn kraft_sum(&self) -> Result<f64> {
        let book = self.codebook().ok_or_else(|| {
            Error::InvalidInput("kraft_sum requires a materialized codebook".into())
        })?;
        Ok(book.kraft_sum(self.cost_fn.alphabet(), self.alpha_c))
    }

    /// Audits the per-codeword cost bound over the whole codebook and errors
    /// if any string violates it — a self-check that must never fire for
    /// encoders built by this module.
    pub fn certify_cost_bound(&self) -> Result<CostBoundReport> {
        let book = self.codebook().ok_or_else(|| {
            Error::InvalidInput("certification requires a materialized codebook".into())
        })?;
        let report =
            book.cost_bound_report(self.cost_fn.alphabet(), self.alpha_c, self.cost_fn.c_max());
        if report.violations > 0 {
            return Err(Error::ConstructionBug(format!(
                "cost bound violated for {} of {} strings (max slack {} > bound {})",
                report.violations, report.checked, report.max_slack, report.bound
            )));
        }
        Ok(report)
    }
}

/// Runs one interval walk. `f_num / denom` is the cumulative below the
/// string, `p_num / denom` its probability.
fn walk_encode(
    tables: &ChannelTables,
    cost_fn: &CostFunction,
    f_num: &BigUint,
    p_num: &BigUint,
    denom: &BigUint,
) -> Result<(Vec<u8>, u128)> {
    debug_assert!(!p_num.is_zero());
    // Upper bound on -log2 P, used to size the bit budget and step guard.
    let log2_p_bound = (denom.bits() - p_num.bits() + 1) as f64;
    let bits = denom.bits() - p_num.bits() + 1 + 384;
    let hi_num = f_num + p_num;
    let mid_num = f_num * 2u8 + p_num;
    let denom2 = denom * 2u8;
    let lo = BitStream::from_ratio(f_num, denom, bits)?;
    let mid = BitStream::from_ratio(&mid_num, &denom2, bits)?;
    let hi = BitStream::from_ratio(&hi_num, denom, bits)?;
    let mut walk = IntervalWalk::new(lo, mid, hi)?;

    let k = cost_fn.alphabet();
    // Every step shrinks the interval by at least min_shrink_bits, and the
    // walk stops once the interval is narrower than P/2, so the bit budget
    // bounds its depth.
    let max_steps = ((log2_p_bound + 256.0) / tables.min_shrink_bits).ceil() as usize + 16;

    let mut symbols: Vec<u8> = Vec::new();
    let mut cost_acc: u128 = 0;
    loop {
        let start = symbols.len().saturating_sub(cost_fn.depth());
        let ctx_idx = cost_fn.context_index(&symbols[start..]);
        let child = walk.step(&tables.partitions[ctx_idx])?;
        cost_acc = cost_acc
            .checked_add(tables.cost_scaled[ctx_idx * k + child as usize])
            .ok_or_else(|| Error::ConstructionBug("cost accumulator overflow".into()))?;
        symbols.push(child);
        if walk.done() {
            break;
        }
        if symbols.len() > max_steps {
            return Err(Error::ConstructionBug(
                "interval walk exceeded its step budget".into(),
            ));
        }
    }
    Ok((symbols, cost_acc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost_model::DEFAULT_UNIFORMITY_TOL;
    use crate::sources::Pmf;
    use num_rational::BigRational;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn unit_costs() -> (CostFunction, CostCapacity) {
        let cf = CostFunction::unit(2).unwrap();
        let cap = cf.cost_capacity(DEFAULT_UNIFORMITY_TOL).unwrap();
        (cf, cap)
    }

    fn costs_12() -> (CostFunction, CostCapacity) {
        let cf = CostFunction::memoryless(2, vec![rat(1, 1), rat(2, 1)]).unwrap();
        let cap = cf.cost_capacity(DEFAULT_UNIFORMITY_TOL).unwrap();
        (cf, cap)
    }

    fn bern(p: &str) -> SourceModel {
        SourceModel::iid(Pmf::bernoulli(p).unwrap())
    }

    #[test]
    fn fair_coin_single_symbol_codewords() {
        let (cf, cap) = unit_costs();
        let enc = IntervalEncoder::build(&bern("0.5"), 1, &cf, &cap).unwrap();
        assert_eq!(enc.encode(&[0]).unwrap().symbols, vec![0]);
        assert_eq!(enc.encode(&[1]).unwrap().symbols, vec![1]);
        let bound = cost_bound_slack(2, cap.alpha_c, 1.0);
        for x in [[0u8], [1u8]] {
            assert!(enc.encode(&x).unwrap().cost <= 1.0 + bound);
        }
        assert!((enc.kraft_sum().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_source_gets_cheapest_symbol() {
        let (cf, cap) = costs_12();
        let enc = IntervalEncoder::build(&bern("1.0"), 3, &cf, &cap).unwrap();
        let cw = enc.encode(&[1, 1, 1]).unwrap();
        assert_eq!(cw.symbols, vec![0]);
        assert_eq!(cw.cost, 1.0);
        assert_eq!(enc.decode(&[0]).unwrap(), vec![1, 1, 1]);
    }

    #[test]
    fn zero_probability_strings_are_unencodable() {
        let (cf, cap) = unit_costs();
        let enc = IntervalEncoder::build(&bern("1.0"), 3, &cf, &cap).unwrap();
        assert!(matches!(enc.encode(&[0, 1, 1]), Err(Error::UnencodableInput)));
    }

    #[test]
    fn exhaustive_soundness_small_blocks() {
        // Prefix-freeness, Kraft, round-trip, and the cost bound, for both
        // cost tables, across block lengths.
        let src = bern("0.25");
        for (cf, cap) in [unit_costs(), costs_12()] {
            for n in 1..=8 {
                let enc = IntervalEncoder::build(&src, n, &cf, &cap).unwrap();
                let book = enc.codebook().unwrap();
                book.verify_prefix_free().unwrap();
                assert!(enc.kraft_sum().unwrap() <= 1.0 + 1e-9);
                let report = enc.certify_cost_bound().unwrap();
                assert_eq!(report.violations, 0);
                for (rank, cw) in book.iter_words() {
                    let x = rank_to_string(rank as u64, n, 2);
                    assert_eq!(enc.decode(&cw.symbols).unwrap(), x, "n={n}");
                }
            }
        }
    }

    #[test]
    fn unit_costs_reduce_cost_to_length() {
        let (cf, cap) = unit_costs();
        let enc = IntervalEncoder::build(&bern("0.25"), 6, &cf, &cap).unwrap();
        for (_, cw) in enc.codebook().unwrap().iter_words() {
            assert_eq!(cw.cost, cw.symbols.len() as f64);
            assert_eq!(cw.cost_exact, rat(cw.symbols.len() as i64, 1));
        }
    }

    #[test]
    fn max_slack_within_bound_unit_costs_n8() {
        let (cf, cap) = unit_costs();
        let enc = IntervalEncoder::build(&bern("0.25"), 8, &cf, &cap).unwrap();
        let report = enc.certify_cost_bound().unwrap();
        // Bound is log_2(2)/1 + 1 = 2.
        assert!((report.bound - 2.0).abs() < 1e-12);
        assert!(report.max_slack <= report.bound + 1e-9);
    }

    #[test]
    fn encode_is_deterministic() {
        let (cf, cap) = costs_12();
        let enc = IntervalEncoder::build(&bern("0.25"), 5, &cf, &cap).unwrap();
        let a = enc.encode(&[0, 1, 0, 0, 1]).unwrap();
        let b = enc.encode(&[0, 1, 0, 0, 1]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn decode_rejects_unknown_words() {
        let (cf, cap) = costs_12();
        let enc = IntervalEncoder::build(&bern("0.25"), 4, &cf, &cap).unwrap();
        let mut long = enc.encode(&[0, 0, 0, 0]).unwrap().symbols;
        long.push(0);
        assert!(matches!(enc.decode(&long), Err(Error::DecodeFailure)));
        assert!(matches!(enc.decode(&[]), Err(Error::DecodeFailure)));
    }

    #[test]
    fn streaming_matches_materialized() {
        let src = bern("0.25");
        let (cf, cap) = costs_12();
        let n = 6;
        let enc = IntervalEncoder::build(&src, n, &cf, &cap).unwrap();
        let streaming = IntervalEncoder::build_streaming(&src, n, &cf, &cap).unwrap();
        for (rank, cw) in enc.codebook().unwrap().iter_words() {
            let x = rank_to_string(rank as u64, n, 2);
            let got = streaming.encode(&x).unwrap();
            assert_eq!(got.symbols, cw.symbols, "x = {x:?}");
            assert_eq!(got.cost_exact, cw.cost_exact);
            assert_eq!(streaming.decode(&got.symbols).unwrap(), x);
        }
    }

    #[test]
    fn streaming_round_trip_large_block() {
        let src = bern("0.25");
        let (cf, cap) = costs_12();
        let n = 512;
        let enc = IntervalEncoder::build_streaming(&src, n, &cf, &cap).unwrap();
        let x = src.sample(n, 99).unwrap();
        let cw = enc.encode(&x).unwrap();
        // Cost within the pointwise bound.
        let log_k_p = src.log2_probability(&x).unwrap();
        let bound = -log_k_p / cap.alpha_c + cost_bound_slack(2, cap.alpha_c, cf.c_max());
        assert!(cw.cost <= bound + 1e-9, "{} > {}", cw.cost, bound);
        assert_eq!(enc.decode(&cw.symbols).unwrap(), x);
        // Tampered codewords are rejected.
        let mut bad = cw.symbols.clone();
        bad.push(1);
        assert!(enc.decode(&bad).is_err());
    }

    #[test]
    fn markov_and_mixture_sources_materialize() {
        let initial = Pmf::from_decimals(&["0.5", "0.5"]).unwrap();
        let transitions = vec![
            Pmf::from_decimals(&["0.9", "0.1"]).unwrap(),
            Pmf::from_decimals(&["0.2", "0.8"]).unwrap(),
        ];
        let markov = SourceModel::markov(initial, transitions).unwrap();
        let (cf, cap) = costs_12();
        let enc = IntervalEncoder::build(&markov, 5, &cf, &cap).unwrap();
        enc.codebook().unwrap().verify_prefix_free().unwrap();
        assert_eq!(enc.certify_cost_bound().unwrap().violations, 0);

        let mix = SourceModel::mixture(vec![
            (rat(1, 2), bern("0")),
            (rat(1, 2), bern("1")),
        ])
        .unwrap();
        let enc = IntervalEncoder::build(&mix, 3, &cf, &cap).unwrap();
        // Only the two constant strings are encodable.
        assert_eq!(enc.codebook().unwrap().iter_words().count(), 2);
        let w0 = enc.encode(&[0, 0, 0]).unwrap();
        let w1 = enc.encode(&[1, 1, 1]).unwrap();
        assert_ne!(w0.symbols, w1.symbols);
        assert!(matches!(enc.encode(&[0, 1, 0]), Err(Error::UnencodableInput)));
    }

    #[test]
    fn contextual_costs_build_and_certify() {
        let mut table = std::collections::BTreeMap::new();
        table.insert(vec![], vec![rat(1, 1), rat(2, 1)]);
        table.insert(vec![0], vec![rat(1, 1), rat(2, 1)]);
        table.insert(vec![1], vec![rat(2, 1), rat(1, 1)]);
        let cf = CostFunction::new(2, 1, &table).unwrap();
        let cap = cf.cost_capacity(DEFAULT_UNIFORMITY_TOL).unwrap();
        let enc = IntervalEncoder::build(&bern("0.3"), 6, &cf, &cap).unwrap();
        enc.codebook().unwrap().verify_prefix_free().unwrap();
        assert!(enc.kraft_sum().unwrap() <= 1.0 + 1e-9);
        assert_eq!(enc.certify_cost_bound().unwrap().violations, 0);
        for (rank, cw) in enc.codebook().unwrap().iter_words() {
            assert_eq!(
                enc.decode(&cw.symbols).unwrap(),
                rank_to_string(rank as u64, 6, 2)
            );
        }
    }

    #[test]
    fn random_prefix_codebooks_are_sound() {
        let src = bern("0.25");
        let (cf, _cap) = costs_12();
        for seed in 0..5 {
            let book = Codebook::random_prefix(&src, 4, &cf, seed, (seed % 3) as usize, 1 << 20)
                .unwrap();
            book.verify_prefix_free().unwrap();
            // Kraft holds for any prefix-free code under the true capacity.
            let alpha = cf.context_capacity(&[]).unwrap();
            assert!(book.kraft_sum(2, alpha) <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn padded_word_breaks_the_cost_bound_but_stays_prefix_free() {
        let src = bern("0.25");
        let (cf, cap) = costs_12();
        let enc = IntervalEncoder::build(&src, 4, &cf, &cap).unwrap();
        let book = enc.codebook().unwrap();
        let rank = book.iter_words().next().unwrap().0;
        let padded = book.with_padded_word(rank, &[1; 8], &cf).unwrap();
        padded.verify_prefix_free().unwrap();
        let report = padded.cost_bound_report(2, cap.alpha_c, cf.c_max());
        assert!(report.violations > 0);
    }

    #[test]
    fn codebook_export_format() {
        let (cf, cap) = unit_costs();
        let enc = IntervalEncoder::build(&bern("0.5"), 2, &cf, &cap).unwrap();
        let mut buf = Vec::new();
        enc.codebook().unwrap().export(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let first = text.lines().next().unwrap();
        let parts: Vec<&str> = first.split(' ').collect();
        assert_eq!(parts.len(), 3);
        assert_eq!(parts[0], "00");
        assert!(parts[2].contains('.'));
        assert_eq!(parts[2].split('.').nth(1).unwrap().len(), 12);
    }
}

