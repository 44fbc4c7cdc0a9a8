//! Conditional cost functions on the code alphabet and the cost-capacity
//! equation.
//!
//! A cost function assigns every code symbol `u` a positive cost `c(u|ctx)`
//! conditioned on the most recent `min(i-1, depth)` emitted symbols. The cost
//! of a string is the sum of its conditional symbol costs. The capacity
//! `alpha_c` of a context is the unique positive root of
//!
//! ```text
//!   sum_u K^(-alpha * c(u|ctx)) = 1
//! ```
//!
//! and the analysis in the rest of the crate assumes the root is the same for
//! every context; [`CostFunction::cost_capacity`] certifies that instead of
//! averaging violations away.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::numeric::rational_to_f64;

/// Solver tolerance on the capacity root.
pub const CAPACITY_TOLERANCE: f64 = 1e-12;

/// Default tolerance for the root-uniformity check across contexts.
pub const DEFAULT_UNIFORMITY_TOL: f64 = 1e-9;

/// One table entry: the exact cost and its `f64` image.
#[derive(Debug, Clone)]
pub struct CostEntry {
    pub exact: BigRational,
    pub value: f64,
}

/// A conditional cost table over a K-ary code alphabet with context depth `d`.
///
/// The table is total: it holds an entry for every `(context, symbol)` pair
/// with context length 0..=d, so truncated contexts at the start of a string
/// always resolve.
#[derive(Debug, Clone)]
pub struct CostFunction {
    alphabet: usize,
    depth: usize,
    /// Entries for context index `i` occupy `entries[i*K .. (i+1)*K]`.
    entries: Vec<CostEntry>,
    /// Start of each context-length block in context-index space.
    level_offsets: Vec<usize>,
    c_max: f64,
    c_max_exact: BigRational,
}

/// The solved capacity together with its per-context roots.
#[derive(Debug, Clone)]
pub struct CostCapacity {
    pub alpha_c: f64,
    pub per_context_roots: BTreeMap<Vec<u8>, f64>,
    pub tolerance: f64,
}

impl CostFunction {
    /// Builds a cost function from exact per-context cost rows.
    ///
    /// `table` must hold, for every context string of every length 0..=depth,
    /// a row of exactly `alphabet` strictly positive costs.
    pub fn new(
        alphabet: usize,
        depth: usize,
        table: &BTreeMap<Vec<u8>, Vec<BigRational>>,
    ) -> Result<Self> {
        if alphabet < 2 {
            return Err(Error::InvalidInput(format!(
                "code alphabet size must be at least 2, got {alphabet}"
            )));
        }
        if alphabet > 256 {
            return Err(Error::InvalidInput(format!(
                "code alphabet size {alphabet} exceeds the supported maximum 256"
            )));
        }
        let mut level_offsets = Vec::with_capacity(depth + 2);
        let mut total = 0usize;
        for level in 0..=depth {
            level_offsets.push(total);
            let count = alphabet
                .checked_pow(level as u32)
                .filter(|c| total.checked_add(*c).is_some() && *c <= 1 << 20)
                .ok_or_else(|| {
                    Error::InvalidInput(format!("context table too large at depth {depth}"))
                })?;
            total += count;
        }
        level_offsets.push(total);

        let mut entries: Vec<Option<CostEntry>> = vec![None; total * alphabet];
        for (ctx, row) in table {
            if ctx.len() > depth {
                return Err(Error::InvalidInput(format!(
                    "context of length {} exceeds depth {depth}",
                    ctx.len()
                )));
            }
            if ctx.iter().any(|&d| d as usize >= alphabet) {
                return Err(Error::InvalidInput(format!(
                    "context {ctx:?} contains a symbol outside 0..{alphabet}"
                )));
            }
            if row.len() != alphabet {
                return Err(Error::InvalidInput(format!(
                    "cost row for context {ctx:?} has {} entries, expected {alphabet}",
                    row.len()
                )));
            }
            let idx = context_index_raw(&level_offsets, alphabet, ctx);
            for (u, cost) in row.iter().enumerate() {
                if *cost <= BigRational::zero() {
                    return Err(Error::InvalidInput(format!(
                        "cost c({u}|{ctx:?}) must be strictly positive"
                    )));
                }
                let value = rational_to_f64(cost);
                if !value.is_finite() || value <= 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "cost c({u}|{ctx:?}) is not a positive finite number"
                    )));
                }
                entries[idx * alphabet + u] = Some(CostEntry {
                    exact: cost.clone(),
                    value,
                });
            }
        }
        let entries: Vec<CostEntry> = entries
            .into_iter()
            .enumerate()
            .map(|(i, e)| {
                e.ok_or_else(|| {
                    Error::InvalidInput(format!(
                        "cost table is missing an entry (flat index {i}); every context of \
                         length 0..={depth} needs a full row"
                    ))
                })
            })
            .collect::<Result<_>>()?;

        let c_max_exact = entries
            .iter()
            .map(|e| e.exact.clone())
            .max()
            .expect("table is non-empty");
        let c_max = entries.iter().map(|e| e.value).fold(0.0f64, f64::max);
        Ok(Self {
            alphabet,
            depth,
            entries,
            level_offsets,
            c_max,
            c_max_exact,
        })
    }

    /// Memoryless unit costs: every symbol costs 1.
    pub fn unit(alphabet: usize) -> Result<Self> {
        let mut table = BTreeMap::new();
        table.insert(
            Vec::new(),
            vec![BigRational::from_integer(1.into()); alphabet],
        );
        Self::new(alphabet, 0, &table)
    }

    /// Memoryless costs from one row.
    pub fn memoryless(alphabet: usize, costs: Vec<BigRational>) -> Result<Self> {
        let mut table = BTreeMap::new();
        table.insert(Vec::new(), costs);
        Self::new(alphabet, 0, &table)
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn c_max(&self) -> f64 {
        self.c_max
    }

    pub fn c_max_exact(&self) -> &BigRational {
        &self.c_max_exact
    }

    /// Number of distinct contexts (all lengths 0..=depth).
    pub fn num_contexts(&self) -> usize {
        *self.level_offsets.last().unwrap()
    }

    /// Canonical index of a context of length <= depth.
    pub fn context_index(&self, ctx: &[u8]) -> usize {
        debug_assert!(ctx.len() <= self.depth);
        context_index_raw(&self.level_offsets, self.alphabet, ctx)
    }

    /// Digits of the context with the given canonical index.
    pub fn context_digits(&self, index: usize) -> Vec<u8> {
        let level = self
            .level_offsets
            .windows(2)
            .position(|w| index >= w[0] && index < w[1])
            .expect("context index in range");
        let mut rem = index - self.level_offsets[level];
        let mut digits = vec![0u8; level];
        for slot in digits.iter_mut().rev() {
            *slot = (rem % self.alphabet) as u8;
            rem /= self.alphabet;
        }
        digits
    }

    /// Cost row for a context index.
    pub fn row(&self, context_index: usize) -> &[CostEntry] {
        &self.entries[context_index * self.alphabet..(context_index + 1) * self.alphabet]
    }

    /// Conditional cost of `symbol` given the tail of `prefix` (truncated to
    /// the context depth).
    pub fn conditional_cost(&self, prefix: &[u8], symbol: u8) -> Result<&CostEntry> {
        if symbol as usize >= self.alphabet {
            return Err(Error::InvalidInput(format!(
                "code symbol {symbol} outside alphabet 0..{}",
                self.alphabet
            )));
        }
        let start = prefix.len().saturating_sub(self.depth);
        let ctx = &prefix[start..];
        if ctx.iter().any(|&d| d as usize >= self.alphabet) {
            return Err(Error::InvalidInput(
                "context contains a symbol outside the code alphabet".into(),
            ));
        }
        let idx = self.context_index(ctx);
        Ok(&self.entries[idx * self.alphabet + symbol as usize])
    }

    /// Total cost of a non-empty code string: the sum of conditional costs.
    pub fn string_cost(&self, u: &[u8]) -> Result<f64> {
        Ok(rational_to_f64(&self.string_cost_exact(u)?))
    }

    /// Exact-rational total cost of a non-empty code string.
    pub fn string_cost_exact(&self, u: &[u8]) -> Result<BigRational> {
        if u.is_empty() {
            return Err(Error::InvalidInput("cannot cost an empty string".into()));
        }
        let mut total = BigRational::zero();
        for i in 0..u.len() {
            total += &self.conditional_cost(&u[..i], u[i])?.exact;
        }
        Ok(total)
    }

    /// Root of the capacity equation for a single context.
    pub fn context_capacity(&self, ctx: &[u8]) -> Result<f64> {
        if ctx.len() > self.depth {
            return Err(Error::InvalidInput(format!(
                "context of length {} exceeds depth {}",
                ctx.len(),
                self.depth
            )));
        }
        let idx = self.context_index(ctx);
        Ok(self.solve_root(idx))
    }

    /// Solves the capacity equation for every context and certifies that the
    /// roots agree within `uniformity_tol`.
    ///
    /// Returns [`Error::CapacityNotUniform`] listing all contexts and roots
    /// when they do not.
    pub fn cost_capacity(&self, uniformity_tol: f64) -> Result<CostCapacity> {
        if !(uniformity_tol > 0.0) {
            return Err(Error::InvalidInput(
                "uniformity tolerance must be positive".into(),
            ));
        }
        let mut roots = BTreeMap::new();
        for idx in 0..self.num_contexts() {
            roots.insert(self.context_digits(idx), self.solve_root(idx));
        }
        // alpha_c is taken from the full-depth contexts; with depth 0 that is
        // the single root context.
        let deepest: Vec<f64> = roots
            .iter()
            .filter(|(ctx, _)| ctx.len() == self.depth)
            .map(|(_, &r)| r)
            .collect();
        let alpha_c = deepest.iter().sum::<f64>() / deepest.len() as f64;
        let spread_ok = roots.values().all(|r| (r - alpha_c).abs() <= uniformity_tol);
        if !spread_ok {
            return Err(Error::CapacityNotUniform {
                tolerance: uniformity_tol,
                contexts: roots.into_iter().collect(),
            });
        }
        Ok(CostCapacity {
            alpha_c,
            per_context_roots: roots,
            tolerance: CAPACITY_TOLERANCE,
        })
    }

    /// Residual of the capacity equation at `alpha` for one context.
    pub fn capacity_residual(&self, context_index: usize, alpha: f64) -> f64 {
        self.weight_sum(context_index, alpha) - 1.0
    }

    fn weight_sum(&self, context_index: usize, alpha: f64) -> f64 {
        let k = self.alphabet as f64;
        self.row(context_index)
            .iter()
            .map(|e| k.powf(-alpha * e.value))
            .sum()
    }

    /// Bisection on a strictly decreasing map; a positive root always exists
    /// because the sum is K at alpha = 0 and tends to 0.
    fn solve_root(&self, context_index: usize) -> f64 {
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        while self.weight_sum(context_index, hi) > 1.0 {
            lo = hi;
            hi *= 2.0;
            assert!(hi.is_finite(), "capacity bracket diverged");
        }
        // Resolve well below CAPACITY_TOLERANCE so the residual bound holds.
        while hi - lo > CAPACITY_TOLERANCE / 16.0 {
            let mid = 0.5 * (lo + hi);
            if self.weight_sum(context_index, mid) > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

fn context_index_raw(level_offsets: &[usize], alphabet: usize, ctx: &[u8]) -> usize {
    let mut rank = 0usize;
    for &d in ctx {
        rank = rank * alphabet + d as usize;
    }
    level_offsets[ctx.len()] + rank
}

/// Digits of a context as a displayable string ("" for the root context).
pub fn context_string(ctx: &[u8]) -> String {
    ctx.iter().map(|&d| char::from(b'0' + d)).collect()
}
