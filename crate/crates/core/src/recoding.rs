//! Recoding schemes and brute-force minimal-weight oracles.
//!
//! The constructive recoders (`naf`, `sjsf`, `wllc_recode`) walk the binary
//! digits right to left with a small carry. The oracles are independent:
//! they run a shortest-path search over residual pairs and know nothing of
//! any syntactic normal form.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::expansions::{all_ones, stack, Digit, Expansion, JointExpansion};

/// Strategy used to turn an exponent vector into a joint expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RecodingScheme {
    /// Stacked standard binary expansions.
    Binary,
    /// Non-adjacent form of a single exponent.
    Naf,
    /// Non-adjacent forms of each exponent, stacked.
    StackedNaf,
    /// Simple joint sparse form of a pair.
    Sjsf,
    /// Complement-then-NAF recoding applied per component.
    Wllc,
}

impl RecodingScheme {
    pub const ALL: [RecodingScheme; 5] = [
        RecodingScheme::Binary,
        RecodingScheme::Naf,
        RecodingScheme::StackedNaf,
        RecodingScheme::Sjsf,
        RecodingScheme::Wllc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RecodingScheme::Binary => "binary",
            RecodingScheme::Naf => "naf",
            RecodingScheme::StackedNaf => "stacked-naf",
            RecodingScheme::Sjsf => "sjsf",
            RecodingScheme::Wllc => "wllc",
        }
    }

    /// Whether the scheme can recode a vector of `dimension` exponents.
    pub fn supports_dimension(self, dimension: usize) -> bool {
        match self {
            RecodingScheme::Naf => dimension == 1,
            RecodingScheme::Sjsf => dimension == 2,
            _ => dimension >= 1,
        }
    }
}

impl fmt::Display for RecodingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RecodingScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RecodingScheme::ALL
            .into_iter()
            .find(|scheme| scheme.name() == s)
            .ok_or_else(|| Error::Unknown {
                kind: "scheme",
                name: s.to_owned(),
            })
    }
}

/// Recodes `exponents` with `scheme`.
pub fn recode(scheme: RecodingScheme, exponents: &[BigInt]) -> Result<JointExpansion> {
    if !scheme.supports_dimension(exponents.len()) {
        return Err(Error::Precondition(format!(
            "scheme {scheme} does not accept {} exponent(s)",
            exponents.len()
        )));
    }
    match scheme {
        RecodingScheme::Binary => binary_joint(exponents),
        RecodingScheme::Naf => stack(&[naf(&exponents[0])]),
        RecodingScheme::StackedNaf => stack(&exponents.iter().map(naf).collect::<Vec<_>>()),
        RecodingScheme::Sjsf => sjsf(&exponents[0], &exponents[1]),
        RecodingScheme::Wllc => wllc_joint(exponents),
    }
}

fn non_negative(n: &BigInt) -> Result<&BigUint> {
    match n.sign() {
        Sign::Minus => Err(Error::Negative(n.clone())),
        _ => Ok(n.magnitude()),
    }
}

/// Stacked binary expansions, all of the bit length of the largest exponent.
pub fn binary_joint(exponents: &[BigInt]) -> Result<JointExpansion> {
    let mags = exponents
        .iter()
        .map(non_negative)
        .collect::<Result<Vec<_>>>()?;
    let len = mags.iter().map(|m| m.bits()).max().unwrap_or(0) as usize;
    JointExpansion::new(mags.iter().map(|m| Expansion::binary_of(m, len)).collect())
}

/// NAF digits of a magnitude, least significant first, no leading zeros.
fn naf_digits(mag: &BigUint) -> Vec<i8> {
    let bits = mag.bits();
    let mut out = Vec::with_capacity(bits as usize + 1);
    let mut carry = 0u8;
    let mut i = 0u64;
    while i < bits || carry != 0 {
        let low = mag.bit(i) as u8 + carry;
        let (digit, next) = match low {
            0 => (0, 0),
            2 => (0, 1),
            // residual ≡ 1 or 3 (mod 4)
            _ if mag.bit(i + 1) => (-1, 1),
            _ => (1, 0),
        };
        out.push(digit);
        carry = next;
        i += 1;
    }
    out
}

/// The non-adjacent form of `n`, trimmed (no leading zeros).
///
/// For negative `n` this is the digitwise negation of `naf(-n)`; the NAF is
/// unique, so this coincides with the right-to-left residue rule applied to
/// `n` itself.
pub fn naf(n: &BigInt) -> Expansion {
    let digits = naf_digits(n.magnitude());
    let e = Expansion::from_lsb_unchecked(digits);
    if n.is_negative() {
        e.negated()
    } else {
        e
    }
}

pub fn is_naf(e: &Expansion) -> bool {
    let d = e.digits();
    d.iter().all(|x| x.abs() <= 1) && d.windows(2).all(|w| w[0].is_zero() || w[1].is_zero())
}

/// The simple joint sparse form of a pair of non-negative integers.
///
/// Built right to left: odd/odd columns pick signs that leave both
/// residuals even; mixed-parity columns pick the sign of the odd component
/// so that the next column has equal parities.
pub fn sjsf(m: &BigInt, n: &BigInt) -> Result<JointExpansion> {
    let rows = [non_negative(m)?, non_negative(n)?];
    let top = rows[0].bits().max(rows[1].bits());
    let mut carry = [0i8; 2];
    let mut out: [Vec<i8>; 2] = [Vec::new(), Vec::new()];
    let mut j = 0u64;
    while j < top || carry != [0, 0] {
        let low = [0, 1].map(|k| rows[k].bit(j) as i8 + carry[k]);
        let mod4 = [0, 1].map(|k| (low[k] + 2 * rows[k].bit(j + 1) as i8) & 3);
        let sign_for = |r4: i8| if r4 == 1 { 1 } else { -1 };
        let column = match (low[0] & 1, low[1] & 1) {
            (0, 0) => [0, 0],
            (1, 1) => [sign_for(mod4[0]), sign_for(mod4[1])],
            (1, _) => [mixed_digit(mod4[0], mod4[1] >> 1), 0],
            _ => [0, mixed_digit(mod4[1], mod4[0] >> 1)],
        };
        for k in 0..2 {
            out[k].push(column[k]);
            carry[k] = (low[k] - column[k]) / 2;
        }
        j += 1;
    }
    let [a, b] = out;
    JointExpansion::new(vec![
        Expansion::from_lsb_unchecked(a),
        Expansion::from_lsb_unchecked(b),
    ])
}

// Digit for an odd residual (given mod 4) whose halved successor must have
// parity `target`.
fn mixed_digit(odd_mod4: i8, target: i8) -> i8 {
    // d = 1 leaves (r-1)/2, whose parity is (odd_mod4 - 1) / 2
    if (odd_mod4 - 1) / 2 == target {
        1
    } else {
        -1
    }
}

/// Checks the two SJSF syntax conditions at every position, with positions
/// beyond the top treated as zero columns.
pub fn is_sjsf(j: &JointExpansion) -> Result<bool> {
    if j.dimension() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            actual: j.dimension(),
        });
    }
    if !j.is_signed_binary() {
        return Ok(false);
    }
    let (top, bottom) = (j.row(0), j.row(1));
    let abs = |pos: usize| (top.digit(pos).abs(), bottom.digit(pos).abs());
    Ok((0..j.len()).all(|pos| {
        let (a, b) = abs(pos);
        let (na, nb) = abs(pos + 1);
        let cond1 = a == b || na == nb;
        let cond2 = !(a == 1 && b == 1) || (na == 0 && nb == 0);
        cond1 && cond2
    }))
}

/// Complement-then-NAF recoding of one exponent at global length `len`.
///
/// Returns exactly `len + 1` digits. When the binary weight exceeds `len/2`
/// the NAF of `n - (2^len - 1)` is used and corrected by `+1` at the top and
/// `-1` at position zero; otherwise the zero-padded NAF of `n`.
pub fn wllc_recode(n: &BigInt, len: usize) -> Result<Expansion> {
    if len == 0 {
        return Err(Error::Precondition(
            "recoding length must be at least 1".into(),
        ));
    }
    let mag = match n.sign() {
        Sign::Minus => None,
        _ if n.magnitude().bits() > len as u64 => None,
        _ => Some(n.magnitude()),
    }
    .ok_or_else(|| Error::OutOfRange {
        value: n.clone(),
        length: len,
    })?;

    if 2 * mag.count_ones() > len as u64 {
        let shifted = n - all_ones(len);
        let mut d = naf(&shifted).padded(len + 1);
        debug_assert_eq!(d.len(), len + 1);
        let digits = d.digits_mut();
        digits[len] = Digit::new_unchecked(digits[len].get() + 1);
        digits[0] = Digit::new_unchecked(digits[0].get() - 1);
        Ok(d)
    } else {
        Ok(naf(n).padded(len + 1))
    }
}

/// Complement-then-NAF recoding of an exponent vector, stacked.
///
/// The common length is the bit length of the largest exponent; the result
/// has one more column than that.
pub fn wllc_joint(exponents: &[BigInt]) -> Result<JointExpansion> {
    if exponents.is_empty() {
        return Err(Error::Dimension {
            expected: 1,
            actual: 0,
        });
    }
    let mags = exponents
        .iter()
        .map(non_negative)
        .collect::<Result<Vec<_>>>()?;
    let len = mags.iter().map(|m| m.bits()).max().unwrap_or(0) as usize;
    if len == 0 {
        return Err(Error::AllZero);
    }
    let rows = exponents
        .iter()
        .map(|n| wllc_recode(n, len))
        .collect::<Result<Vec<_>>>()?;
    JointExpansion::new(rows)
}

/// Rewrites a joint expansion over `{-2..2}` into one over `{-1, 0, 1}` with
/// the same value and no larger weight₁.
///
/// Repeatedly takes the most significant column containing a ±2, writes it
/// as `2q + r` with `q ∈ {-1,0,1}^D`, `r ∈ {0,1}^D`, keeps `r` in place and
/// adds `q` to the column above.
pub fn reduce_digit2(j: &JointExpansion) -> JointExpansion {
    let mut rows: Vec<Vec<i8>> = j
        .rows()
        .iter()
        .map(|r| r.digits().iter().map(|d| d.get()).collect())
        .collect();
    let mut len = j.len();
    while let Some(pos) = (0..len)
        .rev()
        .find(|&p| rows.iter().any(|r| r[p].abs() == 2))
    {
        if pos + 1 == len {
            rows.iter_mut().for_each(|r| r.push(0));
            len += 1;
        }
        for row in rows.iter_mut() {
            let d = row[pos];
            let (q, r) = if d % 2 == 0 {
                (d / 2, 0)
            } else {
                ((d - 1) / 2, 1)
            };
            row[pos] = r;
            row[pos + 1] += q;
        }
    }
    JointExpansion::new(
        rows.into_iter()
            .map(Expansion::from_lsb_unchecked)
            .collect(),
    )
    .expect("rows keep equal length")
}

/// A minimal cost together with an expansion attaining it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub minimal_cost: usize,
    pub witness: JointExpansion,
}

pub const ORACLE_BOUND: i64 = 1 << 16;

/// Minimal weight₁ over all expansions of `(m, n)` with digits in `{-2..2}`.
pub fn min_weight1_oracle(m: i64, n: i64) -> Result<OracleResult> {
    shortest_expansion(m, n, 2)
}

/// Minimal joint weight over all expansions of `(m, n)` with digits in
/// `{-1, 0, 1}`.
pub fn min_joint_weight_oracle(m: i64, n: i64) -> Result<OracleResult> {
    shortest_expansion(m, n, 1)
}

// Dijkstra over residual pairs. From (a, b), a column (x, y) with
// x ≡ a, y ≡ b (mod 2) costs max(|x|, |y|) and leads to ((a-x)/2, (b-y)/2).
// Residuals never leave [-2, max(|m|,|n|)] in absolute value, so the search
// is finite.
fn shortest_expansion(m: i64, n: i64, max_digit: i8) -> Result<OracleResult> {
    for v in [m, n] {
        if v.abs() > ORACLE_BOUND {
            return Err(Error::OracleBound(v));
        }
    }
    let digits: Vec<i8> = (-max_digit..=max_digit).collect();
    let mut columns: Vec<(usize, i8, i8)> = digits
        .iter()
        .flat_map(|&x| {
            digits
                .iter()
                .map(move |&y| (x.abs().max(y.abs()) as usize, x, y))
        })
        .collect();
    columns.sort();

    type State = (i64, i64);
    let start: State = (m, n);
    let mut dist: HashMap<State, usize> = HashMap::from([(start, 0)]);
    let mut prev: HashMap<State, (State, i8, i8)> = HashMap::new();
    let mut heap = BinaryHeap::from([Reverse((0usize, start))]);

    while let Some(Reverse((cost, state))) = heap.pop() {
        if state == (0, 0) {
            break;
        }
        if dist.get(&state).is_some_and(|&d| d < cost) {
            continue;
        }
        let (a, b) = state;
        for &(step, x, y) in &columns {
            if (a - x as i64) % 2 != 0 || (b - y as i64) % 2 != 0 {
                continue;
            }
            let next = ((a - x as i64) / 2, (b - y as i64) / 2);
            let total = cost + step;
            if dist.get(&next).is_none_or(|&d| total < d) {
                dist.insert(next, total);
                prev.insert(next, (state, x, y));
                heap.push(Reverse((total, next)));
            }
        }
    }

    let minimal_cost = dist[&(0, 0)];
    // Walk back from the terminal; columns come out most significant first.
    let mut msb_columns = Vec::new();
    let mut cursor = (0, 0);
    while cursor != start {
        let (before, x, y) = prev[&cursor];
        msb_columns.push([x, y]);
        cursor = before;
    }
    let lsb = |k: usize| -> Vec<i8> { msb_columns.iter().rev().map(|c| c[k]).collect() };
    let witness = JointExpansion::new(vec![
        Expansion::from_lsb_unchecked(lsb(0)),
        Expansion::from_lsb_unchecked(lsb(1)),
    ])?;
    Ok(OracleResult {
        minimal_cost,
        witness,
    })
}

/// `weight(NAF(value(b))) - weight(NAF(value(complement(b))))` for a binary
/// word `b`. Never exceeds 2 in absolute value.
pub fn naf_complement_weight_gap(b: &Expansion) -> Result<i64> {
    let complement = b.ones_complement()?;
    let w = |e: &Expansion| naf(&e.value()).weight() as i64;
    Ok(w(b) - w(&complement))
}

/// Convenience: `naf(n)` for small integers.
pub fn naf_i64(n: i64) -> Expansion {
    naf(&BigInt::from(n))
}

pub(crate) fn is_zero_vector(exponents: &[BigInt]) -> bool {
    exponents.iter().all(Zero::is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn msb(d: &[i8]) -> Expansion {
        Expansion::from_msb(d).unwrap()
    }

    fn cols(c: &[&[i8]]) -> JointExpansion {
        JointExpansion::from_msb_columns(c).unwrap()
    }

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    /// Every {-1,0,1} word of exactly `len` digits with value `n`.
    fn signed_expansions(n: i64, len: usize) -> Vec<Expansion> {
        let mut out = Vec::new();
        let total = 3usize.pow(len as u32);
        for code in 0..total {
            let mut c = code;
            let digits: Vec<i8> = (0..len)
                .map(|_| {
                    let d = (c % 3) as i8 - 1;
                    c /= 3;
                    d
                })
                .collect();
            let e = Expansion::from_lsb(&digits).unwrap();
            if e.value() == big(n) {
                out.push(e);
            }
        }
        out
    }

    #[test]
    fn naf_examples() {
        assert_eq!(naf_i64(7), msb(&[1, 0, 0, -1]));
        assert_eq!(naf_i64(0), Expansion::default());
        assert_eq!(naf_i64(-2), msb(&[-1, 0]));
        assert_eq!(naf_i64(-7), msb(&[-1, 0, 0, 1]));
    }

    #[test]
    fn naf_seven_is_the_unique_minimum() {
        let all = signed_expansions(7, 5);
        let min = all.iter().map(Expansion::weight).min().unwrap();
        assert_eq!(min, 2);
        let nafs: Vec<_> = all
            .iter()
            .filter(|e| is_naf(e))
            .map(Expansion::trimmed)
            .collect();
        assert!(nafs.iter().all(|e| *e == msb(&[1, 0, 0, -1])));
    }

    #[test]
    fn naf_unique_and_minimal_exhaustive() {
        // Any expansion of |n| <= 2^8 fits in 10 digits with room for a NAF.
        let len = 10;
        let mut by_value: HashMap<i64, Vec<Expansion>> = HashMap::new();
        for code in 0..3usize.pow(len as u32) {
            let mut c = code;
            let digits: Vec<i8> = (0..len)
                .map(|_| {
                    let d = (c % 3) as i8 - 1;
                    c /= 3;
                    d
                })
                .collect();
            let e = Expansion::from_lsb_unchecked(digits);
            let v = i64::try_from(e.value()).unwrap();
            if v.abs() <= 256 {
                by_value.entry(v).or_default().push(e);
            }
        }
        for n in -256..=256i64 {
            let expansions = &by_value[&n];
            let ours = naf_i64(n);
            assert!(is_naf(&ours));
            assert_eq!(ours.value(), big(n));
            let nafs: Vec<_> = expansions.iter().filter(|e| is_naf(e)).collect();
            assert_eq!(nafs.len(), 1, "n = {n}");
            assert_eq!(nafs[0].trimmed(), ours);
            let min = expansions.iter().map(Expansion::weight).min().unwrap();
            assert_eq!(ours.weight(), min, "n = {n}");
        }
    }

    #[test]
    fn naf_shape() {
        for n in -(1i64 << 12)..=(1 << 12) {
            let e = naf_i64(n);
            assert!(is_naf(&e));
            assert_eq!(e.value(), big(n));
            if n != 0 {
                let top = e.digits().last().unwrap().get();
                assert_eq!(top, n.signum() as i8);
            }
            if n >= 0 {
                let ell = 64 - n.leading_zeros() as usize;
                assert!(e.len() <= ell + 1);
            }
        }
    }

    #[test]
    fn is_naf_examples() {
        assert!(is_naf(&msb(&[1, 0, -1])));
        assert!(!is_naf(&msb(&[1, 1])));
        assert!(!is_naf(&msb(&[1, 0, 0, -1, -1])));
        assert!(!is_naf(&msb(&[2, 0])));
    }

    #[test]
    fn sjsf_examples() {
        assert_eq!(sjsf(&big(0), &big(0)).unwrap().len(), 0);
        assert_eq!(sjsf(&big(3), &big(2)).unwrap(), cols(&[&[1, 1], &[1, 0]]));
        assert_eq!(sjsf(&big(1), &big(0)).unwrap(), cols(&[&[1, 0]]));
        assert!(sjsf(&big(-1), &big(0)).is_err());
    }

    #[test]
    fn is_sjsf_examples() {
        assert!(is_sjsf(&cols(&[&[1, 1], &[1, 0]])).unwrap());
        assert!(!is_sjsf(&cols(&[&[1, 1], &[1, 1]])).unwrap());
        assert!(!is_sjsf(&cols(&[&[0, 1], &[0, 1]])).unwrap());
        assert!(is_sjsf(&stack(&[msb(&[1])]).unwrap()).is_err());
    }

    #[test]
    fn sjsf_is_minimal_for_small_pairs() {
        for m in 0..64i64 {
            for n in 0..64i64 {
                let s = sjsf(&big(m), &big(n)).unwrap();
                assert!(is_sjsf(&s).unwrap(), "({m},{n}) -> {s}");
                assert_eq!(s.value(), vec![big(m), big(n)]);
                let oracle = min_joint_weight_oracle(m, n).unwrap();
                assert_eq!(s.joint_weight(), oracle.minimal_cost, "({m},{n})");
            }
        }
    }

    #[test]
    fn wllc_examples() {
        assert_eq!(wllc_recode(&big(13), 4).unwrap(), msb(&[1, 0, 0, -1, -1]));
        assert_eq!(wllc_recode(&big(7), 3).unwrap(), msb(&[1, 0, 0, -1]));
        assert_eq!(wllc_recode(&big(5), 4).unwrap(), msb(&[0, 0, 1, 0, 1]));
        assert!(wllc_recode(&big(16), 4).is_err());
        assert!(wllc_recode(&big(-1), 4).is_err());
        assert!(wllc_recode(&big(0), 0).is_err());
    }

    #[test]
    fn wllc_joint_examples() {
        let j = wllc_joint(&[big(13), big(5)]).unwrap();
        assert_eq!(j.row(0), &msb(&[1, 0, 0, -1, -1]));
        assert_eq!(j.row(1), &msb(&[0, 0, 1, 0, 1]));
        assert_eq!(j.weight1(), 4);

        // weight 1 > 1/2: complement branch, NAF(0) corrected to 1 -1.
        let j = wllc_joint(&[big(1), big(1)]).unwrap();
        assert_eq!(j.row(0), &msb(&[1, -1]));
        assert_eq!(j.row(1), &msb(&[1, -1]));
        assert_eq!(j.value(), vec![big(1), big(1)]);

        assert_eq!(wllc_joint(&[big(0), big(0)]), Err(Error::AllZero));
        assert!(matches!(
            wllc_joint(&[big(3), big(-1)]),
            Err(Error::Negative(_))
        ));
    }

    #[test]
    fn wllc_shape_exhaustive() {
        for len in 1..=10usize {
            for n in 0..(1i64 << len) {
                let e = wllc_recode(&big(n), len).unwrap();
                assert_eq!(e.len(), len + 1);
                assert_eq!(e.value(), big(n));
                let d = e.digits();
                assert!((0..=1).contains(&d[len].get()));
                assert!((-2..=1).contains(&d[0].get()));
                assert!(d[1..len].iter().all(|x| x.abs() <= 1));
                let w = Expansion::binary(&big(n), len).unwrap().weight();
                if 2 * w <= len {
                    assert_eq!(e, naf_i64(n).padded(len + 1));
                }
            }
        }
    }

    #[test]
    fn reduce_digit2_examples() {
        let r = reduce_digit2(&cols(&[&[2, 0]]));
        assert_eq!(r, cols(&[&[1, 0], &[0, 0]]));
        assert_eq!(r.weight1(), 1);

        let plain = cols(&[&[1, -1], &[0, 1]]);
        assert_eq!(reduce_digit2(&plain), plain);

        let j = cols(&[&[0, 0], &[-2, 1]]);
        let r = reduce_digit2(&j);
        assert_eq!(r.value(), j.value());
        assert!(r.weight1() <= j.weight1());
        assert!(r.is_signed_binary());
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(min_weight1_oracle(0, 0).unwrap().minimal_cost, 0);
        assert_eq!(min_weight1_oracle(1, 1).unwrap().minimal_cost, 1);
        assert_eq!(min_weight1_oracle(3, 2).unwrap().minimal_cost, 2);
        assert_eq!(min_joint_weight_oracle(0, 0).unwrap().minimal_cost, 0);
        assert_eq!(min_joint_weight_oracle(3, 2).unwrap().minimal_cost, 2);
        assert_eq!(
            min_joint_weight_oracle(7, 7).unwrap().minimal_cost,
            sjsf(&big(7), &big(7)).unwrap().joint_weight()
        );
        assert_eq!(
            min_weight1_oracle(ORACLE_BOUND + 1, 0),
            Err(Error::OracleBound(ORACLE_BOUND + 1))
        );
    }

    #[test]
    fn oracle_witnesses_are_consistent() {
        for m in -20..=20i64 {
            for n in -20..=20i64 {
                for res in [min_weight1_oracle(m, n), min_joint_weight_oracle(m, n)] {
                    let res = res.unwrap();
                    assert_eq!(res.witness.value(), vec![big(m), big(n)]);
                    assert_eq!(res.witness.weight1(), res.minimal_cost);
                }
                let w = min_joint_weight_oracle(m, n).unwrap().witness;
                assert!(w.is_signed_binary());
            }
        }
    }

    #[test]
    fn complement_gap_examples() {
        assert_eq!(naf_complement_weight_gap(&msb(&[1, 1, 1])).unwrap(), 2);
        assert_eq!(naf_complement_weight_gap(&msb(&[0, 0, 0])).unwrap(), -2);
        assert_eq!(naf_complement_weight_gap(&msb(&[1, 0, 1])).unwrap(), 1);
        assert!(naf_complement_weight_gap(&msb(&[1, -1])).is_err());
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in RecodingScheme::ALL {
            assert_eq!(s.name().parse::<RecodingScheme>().unwrap(), s);
        }
        assert!("jsf".parse::<RecodingScheme>().is_err());
    }

    #[test]
    fn recode_dispatch() {
        let v = [big(13), big(5)];
        for s in RecodingScheme::ALL {
            match recode(s, &v) {
                Ok(j) => assert_eq!(j.value(), v.to_vec()),
                Err(_) => assert_eq!(s, RecodingScheme::Naf),
            }
        }
        assert!(recode(RecodingScheme::Sjsf, &[big(1)]).is_err());
        assert_eq!(recode(RecodingScheme::Binary, &v).unwrap().len(), 4);
    }
}
