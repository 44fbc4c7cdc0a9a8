//! Fixed-point interval arithmetic for the coder walk.
//!
//! Interval endpoints live on a sliding 96-bit window that renormalizes as the
//! interval narrows; source-side quantities (cumulative probability, midpoint)
//! stream in as exact binary expansions with a sticky flag, so every
//! comparison the walk makes — child selection and containment — is decided
//! exactly, including genuine ties.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Fractional bits of the window; `1.0` is `1 << FRAC_BITS`.
pub(crate) const FRAC_BITS: u32 = 96;
pub(crate) const ONE: u128 = 1u128 << FRAC_BITS;

/// Renormalize once the interval width drops below this.
const RENORM_MIN: u128 = 1u128 << 48;

/// Smallest admissible channel weight in window units. Steps multiply the
/// width by at least this over `ONE`, which bounds the renormalization shift.
pub(crate) const MIN_WEIGHT: u128 = 1u128 << 56;

/// `floor(a * b / 2^96)` computed exactly for `a, b < 2^112`.
pub(crate) fn mul_frac(a: u128, b: u128) -> u128 {
    let a_lo = a & 0xFFFF_FFFF_FFFF_FFFF;
    let a_hi = a >> 64;
    let b_lo = b & 0xFFFF_FFFF_FFFF_FFFF;
    let b_hi = b >> 64;
    let ll = a_lo * b_lo;
    let mid = a_lo * b_hi + a_hi * b_lo;
    let hh = a_hi * b_hi;
    // product = hh*2^128 + mid*2^64 + ll; take bits 96 and up.
    let low = (ll & (ONE - 1)) + ((mid & 0xFFFF_FFFF) << 64);
    let carry = low >> FRAC_BITS;
    (ll >> FRAC_BITS) + (mid >> 32) + (hh << 32) + carry
}

/// Truncated binary expansion of a value in `[0, 1]` with exact tail
/// accounting: `sticky` records nonzero bits beyond the expansion, and the
/// position of the last materialized 1-bit makes tie tests exact.
pub(crate) struct BitStream {
    words: Vec<u64>,
    len_bits: u64,
    last_one: Option<u64>,
    sticky: bool,
    pos: u64,
    int_part: bool,
}

impl BitStream {
    /// Expansion of `numer / denom` (must be in `[0, 1]`) to `bits` bits.
    pub(crate) fn from_ratio(numer: &BigUint, denom: &BigUint, bits: u64) -> Result<Self> {
        if numer > denom {
            return Err(Error::ConstructionBug(
                "bit stream value above one".into(),
            ));
        }
        if numer == denom {
            return Ok(Self {
                words: vec![0; bits.div_ceil(64) as usize],
                len_bits: bits,
                last_one: None,
                sticky: false,
                pos: 0,
                int_part: true,
            });
        }
        let scaled = numer << bits;
        let val = &scaled / denom;
        let sticky = !(scaled - &val * denom).is_zero();
        let last_one = if val.is_zero() {
            None
        } else {
            Some(bits - 1 - val.trailing_zeros().unwrap_or(0))
        };
        let word_count = bits.div_ceil(64) as usize;
        let pad = word_count as u64 * 64 - bits;
        let aligned = val << pad;
        let bytes = aligned.to_bytes_be();
        let mut words = vec![0u64; word_count];
        // Right-align the big-endian bytes into the word array.
        let offset = word_count * 8 - bytes.len();
        let mut buf = vec![0u8; word_count * 8];
        buf[offset..].copy_from_slice(&bytes);
        for (i, chunk) in buf.chunks_exact(8).enumerate() {
            words[i] = u64::from_be_bytes(chunk.try_into().unwrap());
        }
        Ok(Self {
            words,
            len_bits: bits,
            last_one,
            sticky,
            pos: 0,
            int_part: false,
        })
    }

    fn read_bits(&self, start: u64, count: u32) -> Option<u128> {
        if start + count as u64 > self.len_bits {
            return None;
        }
        let mut out = 0u128;
        let mut pos = start;
        let mut remaining = count;
        while remaining > 0 {
            let wi = (pos / 64) as usize;
            let off = (pos % 64) as u32;
            let take = remaining.min(64 - off);
            let chunk = (self.words[wi] >> (64 - off - take)) & mask64(take);
            out = (out << take) | chunk as u128;
            pos += take as u64;
            remaining -= take;
        }
        Some(out)
    }

    /// Consumes the next `count` bits.
    fn next_bits(&mut self, count: u32) -> Result<u128> {
        let bits = self.read_bits(self.pos, count).ok_or_else(|| {
            Error::ConstructionBug("interval walk exhausted its bit budget".into())
        })?;
        self.pos += count as u64;
        Ok(bits)
    }

    /// True when the exact value has a 1-bit at or beyond the consumed
    /// position.
    fn tail_nonzero(&self) -> bool {
        self.sticky || self.last_one.is_some_and(|i| i >= self.pos)
    }
}

fn mask64(bits: u32) -> u64 {
    if bits == 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// A streamed value: its current window image plus the residual expansion.
pub(crate) struct StreamedValue {
    win: u128,
    stream: BitStream,
}

impl StreamedValue {
    pub(crate) fn new(mut stream: BitStream) -> Result<Self> {
        let head = stream.next_bits(FRAC_BITS)?;
        let win = ((stream.int_part as u128) << FRAC_BITS) | head;
        Ok(Self { win, stream })
    }

    /// Exact `value > g` for an on-grid point `g`.
    fn gt(&self, g: u128) -> bool {
        self.win > g || (self.win == g && self.stream.tail_nonzero())
    }

    /// Exact `value <= g`.
    fn le(&self, g: u128) -> bool {
        !self.gt(g)
    }

    /// Exact `value >= g`.
    fn ge(&self, g: u128) -> bool {
        self.win >= g
    }

    fn renorm(&mut self, origin: u128, shift: u32) -> Result<()> {
        debug_assert!(self.win >= origin);
        let fresh = self.stream.next_bits(shift)?;
        self.win = ((self.win - origin) << shift) + fresh;
        Ok(())
    }
}

/// Cumulative child boundaries of one context in window units:
/// `cum[0] = 0 <= cum[1] <= ... <= cum[K] = ONE`. The last child absorbs the
/// truncation gap so children tile the parent exactly.
#[derive(Debug, Clone)]
pub(crate) struct WinPartition {
    pub(crate) cum: Vec<u128>,
}

impl WinPartition {
    /// Builds a partition from window-unit weights, folding any excess back
    /// into the largest entry so the total never exceeds one.
    pub(crate) fn from_wins(mut wins: Vec<u128>) -> Result<Self> {
        let total: u128 = wins.iter().sum();
        if total > ONE {
            let excess = total - ONE;
            let argmax = wins
                .iter()
                .enumerate()
                .max_by_key(|(_, w)| **w)
                .map(|(i, _)| i)
                .unwrap();
            wins[argmax] -= excess;
        }
        if wins.iter().any(|&w| w < MIN_WEIGHT) {
            return Err(Error::InvalidInput(
                "a channel symbol weight underflows the window precision; \
                 the cost table is too extreme for this coder"
                    .into(),
            ));
        }
        let mut cum = Vec::with_capacity(wins.len() + 1);
        let mut acc = 0u128;
        cum.push(0);
        for w in &wins {
            acc += w;
            cum.push(acc);
        }
        *cum.last_mut().unwrap() = ONE;
        Ok(Self { cum })
    }
}

/// Window-unit weight for a channel symbol: `K^(-alpha * cost)`, snapped to
/// an exact power of two when the exponent is an integer up to solver
/// tolerance. The snap makes dyadic channels (unit costs on a binary
/// alphabet, say) tile exactly, so complete-tree codebooks come out complete.
pub(crate) fn weight_win(code_alphabet: usize, alpha: f64, cost: f64) -> u128 {
    let bits = alpha * cost * (code_alphabet as f64).log2();
    let rounded = bits.round();
    if (bits - rounded).abs() < 1e-9 && rounded >= 1.0 && rounded < FRAC_BITS as f64 {
        return ONE >> rounded as u32;
    }
    let q = (code_alphabet as f64).powf(-alpha * cost);
    (q * 2f64.powi(FRAC_BITS as i32)) as u128
}

/// State of one encode walk: the channel interval `[l, l+w)` and the streamed
/// source quantities, all in a common renormalizing frame.
pub(crate) struct IntervalWalk {
    l: u128,
    w: u128,
    mid: StreamedValue,
    lo: StreamedValue,
    hi: StreamedValue,
    left_ok: bool,
    right_ok: bool,
}

impl IntervalWalk {
    /// `lo`, `mid`, `hi` are the source interval's left end, midpoint, and
    /// right end as bit streams.
    pub(crate) fn new(lo: BitStream, mid: BitStream, hi: BitStream) -> Result<Self> {
        Ok(Self {
            l: 0,
            w: ONE,
            mid: StreamedValue::new(mid)?,
            lo: StreamedValue::new(lo)?,
            hi: StreamedValue::new(hi)?,
            left_ok: false,
            right_ok: false,
        })
    }

    pub(crate) fn done(&self) -> bool {
        self.left_ok && self.right_ok
    }

    /// Emits one channel symbol: descends into the child interval containing
    /// the source midpoint (ties go to the lower child), then updates
    /// containment flags and renormalizes.
    pub(crate) fn step(&mut self, partition: &WinPartition) -> Result<u8> {
        let k = partition.cum.len() - 1;
        // Largest child whose left boundary lies strictly below the midpoint.
        let mut child = 0usize;
        for u in (1..k).rev() {
            let boundary = self.l + mul_frac(self.w, partition.cum[u]);
            if self.mid.gt(boundary) {
                child = u;
                break;
            }
        }
        let lo = self.l + mul_frac(self.w, partition.cum[child]);
        let hi = if child == k - 1 {
            self.l + self.w
        } else {
            self.l + mul_frac(self.w, partition.cum[child + 1])
        };
        debug_assert!(hi > lo, "empty child interval");
        self.l = lo;
        self.w = hi - lo;

        if !self.left_ok && self.lo.le(self.l) {
            self.left_ok = true;
        }
        if !self.right_ok && self.hi.ge(self.l + self.w) {
            self.right_ok = true;
        }

        if self.w < RENORM_MIN && !self.done() {
            let log2_w = 127 - self.w.leading_zeros();
            let shift = FRAC_BITS - 1 - log2_w;
            self.mid.renorm(self.l, shift)?;
            if !self.left_ok {
                self.lo.renorm(self.l, shift)?;
            }
            if !self.right_ok {
                self.hi.renorm(self.l, shift)?;
            }
            self.w <<= shift;
            self.l = 0;
        }
        Ok(child as u8)
    }
}
