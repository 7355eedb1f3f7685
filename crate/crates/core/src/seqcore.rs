//! Symbolic substrate: finite words, lazily queried infinite sequences,
//! the binary embedding into the unit interval and the alternation coding.
//!
//! Positions of infinite sequences are 1-based throughout, matching the
//! usual convention `x = x_1 x_2 x_3 ...` for points of `{0,1}^N`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Longest word the textual parser will expand.
pub const MAX_PARSED_LEN: usize = 1 << 24;

const MAX_PARSE_DEPTH: usize = 32;

/// A finite word over `{0,1}`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BinaryWord {
    bits: Vec<u8>,
}

impl BinaryWord {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::domain(format!("symbol {b} is not a bit")));
        }
        Ok(BinaryWord { bits })
    }

    pub fn empty() -> Self {
        BinaryWord { bits: Vec::new() }
    }

    /// `0^n` or `1^n`.
    pub fn constant(bit: u8, n: usize) -> Self {
        BinaryWord {
            bits: vec![bit & 1; n],
        }
    }

    /// Parses words such as `001101`, `0^3 1^2 0` or `(01)^4 1`.
    pub fn parse(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.chars().collect();
        let mut pos = 0;
        let bits = parse_seq(&chars, &mut pos, 0)?;
        skip_ws(&chars, &mut pos);
        if pos != chars.len() {
            return Err(Error::Parse(format!("unexpected '{}' at offset {pos}", chars[pos])));
        }
        Ok(BinaryWord { bits })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn into_bits(self) -> Vec<u8> {
        self.bits
    }

    pub fn push(&mut self, bit: u8) {
        self.bits.push(bit & 1);
    }

    pub fn concat(&self, other: &BinaryWord) -> BinaryWord {
        let mut bits = Vec::with_capacity(self.len() + other.len());
        bits.extend_from_slice(&self.bits);
        bits.extend_from_slice(&other.bits);
        BinaryWord { bits }
    }

    /// Appends a single symbol, returning a new word.
    pub fn extended(&self, bit: u8) -> BinaryWord {
        let mut w = self.clone();
        w.push(bit);
        w
    }

    /// The word with every symbol exchanged (`0 <-> 1`).
    pub fn flipped(&self) -> BinaryWord {
        BinaryWord {
            bits: self.bits.iter().map(|b| b ^ 1).collect(),
        }
    }

    /// All `2^n` words of length `n` in lexicographic order.
    pub fn all_of_length(n: usize) -> impl Iterator<Item = BinaryWord> {
        assert!(n < 64, "enumeration of words longer than 63 symbols");
        (0u64..(1u64 << n)).map(move |v| {
            let bits = (0..n).map(|i| ((v >> (n - 1 - i)) & 1) as u8).collect();
            BinaryWord { bits }
        })
    }
}

impl fmt::Display for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            f.write_str(if *b == 0 { "0" } else { "1" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryWord(\"{self}\")")
    }
}

impl FromStr for BinaryWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BinaryWord::parse(s)
    }
}

impl FromIterator<u8> for BinaryWord {
    fn from_iter<I: IntoIterator<Item = u8>>(iter: I) -> Self {
        BinaryWord {
            bits: iter.into_iter().map(|b| b & 1).collect(),
        }
    }
}

fn parse_seq(chars: &[char], pos: &mut usize, depth: usize) -> Result<Vec<u8>> {
    if depth > MAX_PARSE_DEPTH {
        return Err(Error::Parse("groups nested too deeply".into()));
    }
    let mut out = Vec::new();
    loop {
        skip_ws(chars, pos);
        if *pos >= chars.len() {
            break;
        }
        let atom = match chars[*pos] {
            '0' => {
                *pos += 1;
                vec![0]
            }
            '1' => {
                *pos += 1;
                vec![1]
            }
            '(' => {
                *pos += 1;
                let inner = parse_seq(chars, pos, depth + 1)?;
                if chars.get(*pos) != Some(&')') {
                    return Err(Error::Parse("unbalanced '('".into()));
                }
                *pos += 1;
                inner
            }
            ')' if depth > 0 => break,
            c => return Err(Error::Parse(format!("unexpected '{c}' at offset {pos}"))),
        };
        skip_ws(chars, pos);
        let reps = if chars.get(*pos) == Some(&'^') {
            *pos += 1;
            skip_ws(chars, pos);
            let start = *pos;
            while *pos < chars.len() && chars[*pos].is_ascii_digit() {
                *pos += 1;
            }
            if start == *pos {
                return Err(Error::Parse("missing exponent after '^'".into()));
            }
            let digits: String = chars[start..*pos].iter().collect();
            digits
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("exponent {digits} too large")))?
        } else {
            1
        };
        let added = atom
            .len()
            .checked_mul(reps)
            .filter(|&n| n + out.len() <= MAX_PARSED_LEN)
            .ok_or_else(|| Error::Parse(format!("word longer than {MAX_PARSED_LEN} symbols")))?;
        out.reserve(added);
        for _ in 0..reps {
            out.extend_from_slice(&atom);
        }
    }
    Ok(out)
}

fn skip_ws(chars: &[char], pos: &mut usize) {
    while *pos < chars.len() && chars[*pos].is_whitespace() {
        *pos += 1;
    }
}

/// A deterministic infinite binary sequence, queried by position.
pub trait SymbolSource: Send + Sync {
    /// Symbol at position `k >= 1`.
    fn bit(&self, k: u64) -> u8;

    /// Whether the source promises infinitely many 0s and 1s.
    fn declared_nondyadic(&self) -> bool {
        false
    }

    /// Positions `start+1 ..= start+len`.
    fn window(&self, start: u64, len: usize) -> Vec<u8> {
        (1..=len as u64).map(|i| self.bit(start + i)).collect()
    }

    fn prefix(&self, len: usize) -> BinaryWord {
        BinaryWord {
            bits: self.window(0, len),
        }
    }
}

impl<S: SymbolSource + ?Sized> SymbolSource for &S {
    fn bit(&self, k: u64) -> u8 {
        (**self).bit(k)
    }
    fn declared_nondyadic(&self) -> bool {
        (**self).declared_nondyadic()
    }
    fn window(&self, start: u64, len: usize) -> Vec<u8> {
        (**self).window(start, len)
    }
}

impl<S: SymbolSource + ?Sized> SymbolSource for Box<S> {
    fn bit(&self, k: u64) -> u8 {
        (**self).bit(k)
    }
    fn declared_nondyadic(&self) -> bool {
        (**self).declared_nondyadic()
    }
    fn window(&self, start: u64, len: usize) -> Vec<u8> {
        (**self).window(start, len)
    }
}

impl<S: SymbolSource + ?Sized> SymbolSource for Arc<S> {
    fn bit(&self, k: u64) -> u8 {
        (**self).bit(k)
    }
    fn declared_nondyadic(&self) -> bool {
        (**self).declared_nondyadic()
    }
    fn window(&self, start: u64, len: usize) -> Vec<u8> {
        (**self).window(start, len)
    }
}

/// An eventually periodic sequence `u v v v ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventuallyPeriodic {
    head: BinaryWord,
    period: BinaryWord,
}

impl EventuallyPeriodic {
    pub fn new(head: BinaryWord, period: BinaryWord) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::domain("empty period"));
        }
        Ok(EventuallyPeriodic { head, period })
    }

    /// `v^∞`.
    pub fn periodic(period: BinaryWord) -> Result<Self> {
        EventuallyPeriodic::new(BinaryWord::empty(), period)
    }

    /// `b^∞`.
    pub fn constant(bit: u8) -> Self {
        EventuallyPeriodic {
            head: BinaryWord::empty(),
            period: BinaryWord::constant(bit, 1),
        }
    }

    /// `(01)^∞`, whose binary value is exactly 1/3.
    pub fn one_third() -> Self {
        EventuallyPeriodic {
            head: BinaryWord::empty(),
            period: BinaryWord { bits: vec![0, 1] },
        }
    }

    /// `(10)^∞`, whose binary value is exactly 2/3.
    pub fn two_thirds() -> Self {
        EventuallyPeriodic {
            head: BinaryWord::empty(),
            period: BinaryWord { bits: vec![1, 0] },
        }
    }

    pub fn flipped(&self) -> Self {
        EventuallyPeriodic {
            head: self.head.flipped(),
            period: self.period.flipped(),
        }
    }
}

impl SymbolSource for EventuallyPeriodic {
    fn bit(&self, k: u64) -> u8 {
        debug_assert!(k >= 1);
        let i = (k - 1) as usize;
        if i < self.head.len() {
            self.head.bits[i]
        } else {
            let j = (i - self.head.len()) % self.period.len();
            self.period.bits[j]
        }
    }

    fn declared_nondyadic(&self) -> bool {
        let p = self.period.bits();
        p.iter().any(|&b| b != p[0])
    }
}

/// Wraps a closure as a source.
pub struct FnSource<F> {
    f: F,
    nondyadic: bool,
}

impl<F: Fn(u64) -> u8 + Send + Sync> FnSource<F> {
    pub fn new(f: F, declared_nondyadic: bool) -> Self {
        FnSource {
            f,
            nondyadic: declared_nondyadic,
        }
    }
}

impl<F: Fn(u64) -> u8 + Send + Sync> SymbolSource for FnSource<F> {
    fn bit(&self, k: u64) -> u8 {
        (self.f)(k) & 1
    }
    fn declared_nondyadic(&self) -> bool {
        self.nondyadic
    }
}

/// The bitwise complement of another source.
pub struct Flipped<S>(pub S);

impl<S: SymbolSource> SymbolSource for Flipped<S> {
    fn bit(&self, k: u64) -> u8 {
        self.0.bit(k) ^ 1
    }
    fn declared_nondyadic(&self) -> bool {
        self.0.declared_nondyadic()
    }
    fn window(&self, start: u64, len: usize) -> Vec<u8> {
        self.0.window(start, len).into_iter().map(|b| b ^ 1).collect()
    }
}

/// Alternation coding `a^{n_1} b^{n_2} a^{n_3} ... -> (n_1, n_2, n_3, ...)`
/// with cumulative counters `N_m = sum n_i` and `f_m = sum n_i^2`.
///
/// Counters are exact in `u128`; construction fails with
/// [`Error::Overflow`] before any of them could wrap, which happens only
/// once `N_m` exceeds `2^64`.
#[derive(Clone, PartialEq, Eq)]
pub struct AlternationCode {
    blocks: Vec<u64>,
    // index m holds N_m and f_m; index 0 is the empty prefix
    cum_n: Vec<u128>,
    cum_f: Vec<u128>,
}

impl fmt::Debug for AlternationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("AlternationCode").field(&self.blocks).finish()
    }
}

impl AlternationCode {
    pub fn from_blocks(blocks: Vec<u64>) -> Result<Self> {
        let mut stream = CounterStream::default();
        let mut cum_n = Vec::with_capacity(blocks.len() + 1);
        let mut cum_f = Vec::with_capacity(blocks.len() + 1);
        cum_n.push(0);
        cum_f.push(0);
        for &b in &blocks {
            stream.push(b)?;
            cum_n.push(stream.n);
            cum_f.push(stream.f);
        }
        Ok(AlternationCode {
            blocks,
            cum_n,
            cum_f,
        })
    }

    /// `n_i = base^i` for `i = 1..=count`.
    pub fn geometric(base: u64, count: usize) -> Result<Self> {
        if base < 1 {
            return Err(Error::domain("geometric base must be positive"));
        }
        let mut blocks = Vec::with_capacity(count);
        let mut v: u64 = 1;
        for _ in 0..count {
            v = v
                .checked_mul(base)
                .ok_or(Error::Overflow("geometric block length"))?;
            blocks.push(v);
        }
        AlternationCode::from_blocks(blocks)
    }

    /// Parses `2,2,1,1`, `(2, 2, 1, 1)` or whitespace separated lists.
    pub fn parse(s: &str) -> Result<Self> {
        let trimmed = s.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
        let mut blocks = Vec::new();
        for tok in trimmed.split(|c: char| c == ',' || c.is_whitespace()) {
            if tok.is_empty() {
                continue;
            }
            let v: u64 = tok
                .parse()
                .map_err(|_| Error::Parse(format!("invalid block length '{tok}'")))?;
            blocks.push(v);
        }
        if blocks.is_empty() {
            return Err(Error::Parse("empty alternation code".into()));
        }
        AlternationCode::from_blocks(blocks)
    }

    pub fn blocks(&self) -> &[u64] {
        &self.blocks
    }

    /// Number of blocks.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Block `n_i`, `i` 1-based.
    pub fn block(&self, i: usize) -> u64 {
        self.blocks[i - 1]
    }

    /// `N_m` (with `N_0 = 0`).
    pub fn n_at(&self, m: usize) -> u128 {
        self.cum_n[m]
    }

    /// `f_m` (with `f_0 = 0`).
    pub fn f_at(&self, m: usize) -> u128 {
        self.cum_f[m]
    }

    /// Total length `N_len`.
    pub fn total_length(&self) -> u128 {
        *self.cum_n.last().unwrap()
    }

    /// The `m` with `N_m <= n < N_{m+1}`; `None` when `n >= N_len`.
    pub fn locate(&self, n: u128) -> Option<usize> {
        if n >= self.total_length() {
            return None;
        }
        // partition_point gives the first index with N > n
        Some(self.cum_n.partition_point(|&v| v <= n) - 1)
    }

    /// The first `m` blocks.
    pub fn truncated(&self, m: usize) -> AlternationCode {
        let m = m.min(self.len());
        AlternationCode {
            blocks: self.blocks[..m].to_vec(),
            cum_n: self.cum_n[..=m].to_vec(),
            cum_f: self.cum_f[..=m].to_vec(),
        }
    }

    /// Exact counters `(N_m, f_m, F_m)`.
    pub fn prefix_counters(&self, m: usize) -> Result<PrefixCounters> {
        self.check_index(m)?;
        let n = BigUint::from(self.cum_n[m]);
        let f = BigUint::from(self.cum_f[m]);
        let ratio = BigRational::new(BigInt::from(f.clone()), BigInt::from(&n * &n));
        Ok(PrefixCounters { n, f, ratio })
    }

    /// Counters restricted to blocks of length at least `lambda`.
    pub fn filtered_counters(&self, m: usize, lambda: u64) -> Result<FilteredCounters> {
        self.check_index(m)?;
        if lambda == 0 {
            return Err(Error::domain("filter threshold must be at least 1"));
        }
        let (mut sum, mut sq) = (0u128, 0u128);
        for &b in self.blocks[..m].iter().filter(|&&b| b >= lambda) {
            sum += b as u128;
            sq += (b as u128) * (b as u128);
        }
        Ok(FilteredCounters::from_sums(self.cum_n[m], sum, sq))
    }

    fn check_index(&self, m: usize) -> Result<()> {
        if m == 0 || m > self.len() {
            return Err(Error::OutOfRange {
                what: "block index",
                requested: m as u128,
                available: self.len() as u128,
            });
        }
        Ok(())
    }
}

impl fmt::Display for AlternationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.blocks.iter().map(|b| b.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Exact `(N_m, f_m, F_m = f_m / N_m^2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PrefixCounters {
    pub n: BigUint,
    pub f: BigUint,
    pub ratio: BigRational,
}

/// `F^Λ_m`, the large-block density `ℓ_m` and `ϱ_m = ℓ_m / sqrt(F^Λ_m)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FilteredCounters {
    pub f_lambda: BigRational,
    pub ell: BigRational,
    /// `None` exactly when no block passes the filter.
    pub rho: Option<f64>,
}

impl FilteredCounters {
    pub(crate) fn from_sums(n: u128, large_sum: u128, large_sq: u128) -> Self {
        let nn = BigInt::from(n);
        let f_lambda = BigRational::new(BigInt::from(large_sq), &nn * &nn);
        let ell = BigRational::new(BigInt::from(large_sum), nn);
        FilteredCounters {
            f_lambda,
            ell,
            rho: rho_from_sums(large_sum, large_sq),
        }
    }
}

/// `ϱ = ℓ / sqrt(F^Λ)`, which reduces to `S / sqrt(Q)` for the sum `S` and
/// square sum `Q` of the large blocks; independent of `N`.
pub(crate) fn rho_from_sums(large_sum: u128, large_sq: u128) -> Option<f64> {
    if large_sq == 0 {
        None
    } else {
        Some(large_sum as f64 / (large_sq as f64).sqrt())
    }
}

/// Correctly rounded `num / den` for non-negative integers.
pub fn ratio_f64(num: u128, den: u128) -> f64 {
    const EXACT: u128 = 1 << 53;
    if num < EXACT && den < EXACT {
        num as f64 / den as f64
    } else {
        rational_f64(&BigRational::new(BigInt::from(num), BigInt::from(den)))
    }
}

pub fn rational_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Single-writer streaming counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CounterStream {
    pub m: usize,
    pub n: u128,
    pub f: u128,
}

impl CounterStream {
    pub fn push(&mut self, block: u64) -> Result<()> {
        if block == 0 {
            return Err(Error::domain("alternation blocks must be positive"));
        }
        let b = block as u128;
        let n = self.n.checked_add(b).ok_or(Error::Overflow("N_m"))?;
        if n > u64::MAX as u128 {
            return Err(Error::Overflow("N_m exceeds 2^64"));
        }
        self.n = n;
        self.f += b * b;
        self.m += 1;
        Ok(())
    }

    /// `F_m` as an exact rational.
    pub fn ratio(&self) -> BigRational {
        let n = BigInt::from(self.n);
        BigRational::new(BigInt::from(self.f), &n * &n)
    }
}

/// Run-length decomposition into alternating blocks.
pub fn alternation_encode(w: &BinaryWord) -> Result<AlternationCode> {
    let bits = w.bits();
    if bits.is_empty() {
        return Err(Error::domain("cannot encode the empty word"));
    }
    let mut blocks = Vec::new();
    let mut run = 1u64;
    for pair in bits.windows(2) {
        if pair[0] == pair[1] {
            run += 1;
        } else {
            blocks.push(run);
            run = 1;
        }
    }
    blocks.push(run);
    AlternationCode::from_blocks(blocks)
}

/// Inverse of [`alternation_encode`] given the leading symbol.
pub fn alternation_decode(code: &AlternationCode, first_symbol: u8) -> Result<BinaryWord> {
    if code.is_empty() {
        return Err(Error::domain("cannot decode an empty code"));
    }
    let total = code.total_length();
    if total > MAX_PARSED_LEN as u128 * 64 {
        return Err(Error::domain("code too long to materialize"));
    }
    let mut bits = Vec::with_capacity(total as usize);
    let mut sym = first_symbol & 1;
    for &b in code.blocks() {
        bits.extend(std::iter::repeat(sym).take(b as usize));
        sym ^= 1;
    }
    Ok(BinaryWord { bits })
}

/// Alternation code of the first `len` symbols of a source, dropping the
/// last block since the source may continue it past the horizon.
pub fn complete_blocks_of_prefix<S: SymbolSource + ?Sized>(src: &S, len: usize) -> Result<AlternationCode> {
    let w = src.prefix(len);
    let code = alternation_encode(&w)?;
    Ok(code.truncated(code.len().saturating_sub(1)))
}

/// `[k/2^n, (k+1)/2^n]`, the image of a cylinder `[w]` under the binary
/// embedding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DyadicInterval {
    numerator: BigUint,
    exponent: usize,
}

impl DyadicInterval {
    pub fn exponent(&self) -> usize {
        self.exponent
    }

    pub fn lo(&self) -> BigRational {
        self.scaled(self.numerator.clone())
    }

    pub fn hi(&self) -> BigRational {
        self.scaled(&self.numerator + BigUint::one())
    }

    pub fn width(&self) -> BigRational {
        self.scaled(BigUint::one())
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        *x >= self.lo() && *x <= self.hi()
    }

    pub fn contains_interval(&self, other: &DyadicInterval) -> bool {
        self.lo() <= other.lo() && other.hi() <= self.hi()
    }

    /// Bounds rounded outward to `f64`.
    pub fn to_f64_bounds(&self) -> (f64, f64) {
        let lo = rational_f64(&self.lo());
        let hi = rational_f64(&self.hi());
        let lo = if lo > 0.0 { lo.next_down() } else { 0.0 };
        let hi = if hi < 1.0 { hi.next_up() } else { 1.0 };
        (lo, hi)
    }

    fn scaled(&self, num: BigUint) -> BigRational {
        let den = BigUint::one() << self.exponent;
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

/// Interval of binary values of all extensions of `w`.
pub fn pi2_interval(w: &BinaryWord) -> DyadicInterval {
    let mut numerator = BigUint::zero();
    for &b in w.bits() {
        numerator <<= 1u32;
        if b == 1 {
            numerator += 1u32;
        }
    }
    DyadicInterval {
        numerator,
        exponent: w.len(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DyadicVerdict {
    /// The final constant run covers at least half of the horizon.
    ConstantTailSoFar,
    Mixed,
}

/// Finite-horizon test for eventually constant sequences: positions
/// `1..=lookahead` are inspected and the verdict is
/// [`DyadicVerdict::ConstantTailSoFar`] when the trailing run reaching the
/// horizon has length at least `ceil(lookahead / 2)`.
pub fn is_dyadic_prefix<S: SymbolSource + ?Sized>(src: &S, lookahead: usize) -> Result<DyadicVerdict> {
    if lookahead == 0 {
        return Err(Error::domain("lookahead must be at least 1"));
    }
    let bits = src.window(0, lookahead);
    let last = bits[lookahead - 1];
    let run = bits.iter().rev().take_while(|&&b| b == last).count();
    if run >= lookahead.div_ceil(2) {
        Ok(DyadicVerdict::ConstantTailSoFar)
    } else {
        Ok(DyadicVerdict::Mixed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> BinaryWord {
        BinaryWord::parse(s).unwrap()
    }

    fn blocks(c: &AlternationCode) -> Vec<u64> {
        c.blocks().to_vec()
    }

    #[test]
    fn parse_notations() {
        assert_eq!(w("0^3 1^2 0").to_string(), "000110");
        assert_eq!(w("(01)^3").to_string(), "010101");
        assert_eq!(w("1 (0^2 1)^2").to_string(), "1001001");
        assert!(w("").is_empty());
        assert!(BinaryWord::parse("012").is_err());
        assert!(BinaryWord::parse("(01").is_err());
        assert!(BinaryWord::parse("0^").is_err());
        assert!(BinaryWord::parse("0)").is_err());
        assert!(BinaryWord::parse("0^99999999999").is_err());
    }

    #[test]
    fn encode_examples() {
        assert_eq!(blocks(&alternation_encode(&w("001101")).unwrap()), vec![2, 2, 1, 1]);
        assert_eq!(blocks(&alternation_encode(&w("000")).unwrap()), vec![3]);
        assert_eq!(blocks(&alternation_encode(&w("0^3 1^2 0")).unwrap()), vec![3, 2, 1]);
        assert!(matches!(alternation_encode(&BinaryWord::empty()), Err(Error::Domain(_))));
    }

    #[test]
    fn decode_examples() {
        let c = AlternationCode::parse("2,2,1,1").unwrap();
        assert_eq!(alternation_decode(&c, 0).unwrap().to_string(), "001101");
        let c = AlternationCode::parse("1,1,1").unwrap();
        assert_eq!(alternation_decode(&c, 1).unwrap().to_string(), "101");
        let c = AlternationCode::parse("3").unwrap();
        assert_eq!(alternation_decode(&c, 0).unwrap().to_string(), "000");
    }

    #[test]
    fn prefix_counter_examples() {
        let c = AlternationCode::parse("2,2,1,1").unwrap();
        let p = c.prefix_counters(4).unwrap();
        assert_eq!(p.n, BigUint::from(6u32));
        assert_eq!(p.f, BigUint::from(10u32));
        assert_eq!(p.ratio, BigRational::new(10.into(), 36.into()));

        let g = AlternationCode::geometric(2, 3).unwrap();
        let p = g.prefix_counters(3).unwrap();
        assert_eq!(p.n, BigUint::from(14u32));
        assert_eq!(p.f, BigUint::from(84u32));
        assert_eq!(p.ratio, BigRational::new(3.into(), 7.into()));

        let ones = AlternationCode::from_blocks(vec![1; 50]).unwrap();
        for k in [1usize, 7, 50] {
            let p = ones.prefix_counters(k).unwrap();
            assert_eq!(p.ratio, BigRational::new(1.into(), (k as i64).into()));
        }
        assert!(matches!(c.prefix_counters(5), Err(Error::OutOfRange { .. })));
        assert!(c.prefix_counters(0).is_err());
    }

    #[test]
    fn filtered_counter_examples() {
        let c = AlternationCode::parse("2,2,1,1").unwrap();
        let fc = c.filtered_counters(4, 2).unwrap();
        assert_eq!(fc.f_lambda, BigRational::new(8.into(), 36.into()));
        assert_eq!(fc.ell, BigRational::new(4.into(), 6.into()));
        let expected = (4.0 / 6.0) / (8.0f64 / 36.0).sqrt();
        assert!((fc.rho.unwrap() - expected).abs() < 1e-15);

        let fc = c.filtered_counters(4, 5).unwrap();
        assert!(fc.f_lambda.is_zero());
        assert!(fc.ell.is_zero());
        assert_eq!(fc.rho, None);

        let fc = c.filtered_counters(3, 1).unwrap();
        assert_eq!(fc.f_lambda, c.prefix_counters(3).unwrap().ratio);
    }

    #[test]
    fn locate_blocks() {
        let c = AlternationCode::parse("2,2,1,1").unwrap();
        assert_eq!(c.locate(0), Some(0));
        assert_eq!(c.locate(1), Some(0));
        assert_eq!(c.locate(2), Some(1));
        assert_eq!(c.locate(4), Some(2));
        assert_eq!(c.locate(5), Some(3));
        assert_eq!(c.locate(6), None);
    }

    #[test]
    fn pi2_examples() {
        let i = pi2_interval(&w("101"));
        assert_eq!(i.lo(), BigRational::new(5.into(), 8.into()));
        assert_eq!(i.hi(), BigRational::new(6.into(), 8.into()));
        let i = pi2_interval(&BinaryWord::empty());
        assert_eq!(i.lo(), BigRational::zero());
        assert_eq!(i.hi(), BigRational::one());
        let i = pi2_interval(&BinaryWord::constant(0, 10));
        assert_eq!(i.lo(), BigRational::zero());
        assert_eq!(i.hi(), BigRational::new(1.into(), 1024.into()));
    }

    #[test]
    fn dyadic_prefix_examples() {
        let zero = EventuallyPeriodic::constant(0);
        assert_eq!(is_dyadic_prefix(&zero, 64).unwrap(), DyadicVerdict::ConstantTailSoFar);
        let alt = EventuallyPeriodic::one_third();
        assert_eq!(is_dyadic_prefix(&alt, 64).unwrap(), DyadicVerdict::Mixed);
        let spike = EventuallyPeriodic::new(w("0^63 1"), w("0")).unwrap();
        assert_eq!(is_dyadic_prefix(&spike, 64).unwrap(), DyadicVerdict::Mixed);
        // a dyadic rational other than 0 looks constant once the tail dominates
        let one_half = EventuallyPeriodic::new(w("1"), w("0")).unwrap();
        assert_eq!(is_dyadic_prefix(&one_half, 64).unwrap(), DyadicVerdict::ConstantTailSoFar);
        assert!(is_dyadic_prefix(&alt, 0).is_err());
    }

    #[test]
    fn periodic_sources() {
        let s = EventuallyPeriodic::one_third();
        assert_eq!(s.prefix(6).to_string(), "010101");
        assert!(s.declared_nondyadic());
        assert!(!EventuallyPeriodic::constant(1).declared_nondyadic());
        let f = Flipped(EventuallyPeriodic::one_third());
        assert_eq!(f.prefix(4).to_string(), "1010");
        assert_eq!(EventuallyPeriodic::one_third().flipped(), EventuallyPeriodic::two_thirds());
    }

    #[test]
    fn complete_blocks_drop_the_open_tail() {
        let s = EventuallyPeriodic::periodic(w("0011")).unwrap();
        let c = complete_blocks_of_prefix(&s, 9).unwrap();
        assert_eq!(blocks(&c), vec![2, 2, 2, 2]);
    }

    fn arb_word(max_len: usize) -> impl Strategy<Value = BinaryWord> {
        prop::collection::vec(0u8..2, 1..max_len).prop_map(|bits| BinaryWord::new(bits).unwrap())
    }

    fn arb_code() -> impl Strategy<Value = AlternationCode> {
        prop::collection::vec(1u64..200, 1..300).prop_map(|b| AlternationCode::from_blocks(b).unwrap())
    }

    proptest! {
        #[test]
        fn round_trip(word in arb_word(10_000)) {
            let code = alternation_encode(&word).unwrap();
            prop_assert_eq!(code.total_length(), word.len() as u128);
            prop_assert_eq!(alternation_decode(&code, word.bits()[0]).unwrap(), word);
        }

        #[test]
        fn streaming_matches_recomputation(code in arb_code()) {
            let mut s = CounterStream::default();
            for (i, &b) in code.blocks().iter().enumerate() {
                s.push(b).unwrap();
                let direct_n: u128 = code.blocks()[..=i].iter().map(|&v| v as u128).sum();
                let direct_f: u128 = code.blocks()[..=i].iter().map(|&v| (v as u128) * (v as u128)).sum();
                prop_assert_eq!(s.n, direct_n);
                prop_assert_eq!(s.f, direct_f);
                prop_assert_eq!(s.ratio(), code.prefix_counters(i + 1).unwrap().ratio);
                prop_assert!(s.n <= s.f && s.f <= s.n * s.n);
            }
        }

        #[test]
        fn filter_bound(code in arb_code(), lambda in 1u64..60) {
            for m in 1..=code.len() {
                let full = code.prefix_counters(m).unwrap().ratio;
                let filt = code.filtered_counters(m, lambda).unwrap().f_lambda;
                prop_assert!(filt <= full);
                let bound = BigRational::new(
                    BigInt::from(lambda as u128 * lambda as u128),
                    BigInt::from(code.n_at(m)),
                );
                prop_assert!(&full - &filt <= bound);
            }
        }

        #[test]
        fn pi2_nesting(word in arb_word(200), b in 0u8..2) {
            let outer = pi2_interval(&word);
            let inner = pi2_interval(&word.extended(b));
            prop_assert!(outer.contains_interval(&inner));
            prop_assert_eq!(inner.width() * BigRational::from_integer(2.into()), outer.width());
        }
    }
}
