//! Interleaved (Straus) multi-exponentiation over an abstract abelian group,
//! with exact operation counting.
//!
//! Cost model: evaluating a joint expansion of length `L` costs `L - 1`
//! squarings and `weight₁ - [top column ≠ 0]` multiplications. Table
//! construction is counted separately in `precomp_multiplications`, and
//! inversions are never counted as multiplications.

use std::fmt;
use std::ops::AddAssign;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::expansions::JointExpansion;
use crate::recoding::{recode, RecodingScheme};

/// An abelian group written multiplicatively.
pub trait Group {
    type Element: Clone + PartialEq + fmt::Debug;

    fn identity(&self) -> Self::Element;

    fn multiply(&self, a: &Self::Element, b: &Self::Element) -> Self::Element;

    fn square(&self, a: &Self::Element) -> Self::Element {
        self.multiply(a, a)
    }

    fn invert(&self, a: &Self::Element) -> Self::Element;

    fn contains(&self, _a: &Self::Element) -> bool {
        true
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct CostCounter {
    pub squarings: u64,
    pub multiplications: u64,
    pub inversions: u64,
    pub precomp_multiplications: u64,
}

impl CostCounter {
    /// Squarings plus multiplications of the main loop.
    pub fn total(&self) -> u64 {
        self.squarings + self.multiplications
    }

    pub fn reset(&mut self) {
        *self = CostCounter::default();
    }
}

impl AddAssign for CostCounter {
    fn add_assign(&mut self, rhs: Self) {
        self.squarings += rhs.squarings;
        self.multiplications += rhs.multiplications;
        self.inversions += rhs.inversions;
        self.precomp_multiplications += rhs.precomp_multiplications;
    }
}

/// Group wrapper that counts every operation routed through it.
struct Instrumented<'g, G: Group> {
    group: &'g G,
    cost: CostCounter,
}

impl<'g, G: Group> Instrumented<'g, G> {
    fn new(group: &'g G) -> Self {
        Instrumented {
            group,
            cost: CostCounter::default(),
        }
    }

    fn square(&mut self, a: &G::Element) -> G::Element {
        self.cost.squarings += 1;
        self.group.square(a)
    }

    fn multiply(&mut self, a: &G::Element, b: &G::Element) -> G::Element {
        self.cost.multiplications += 1;
        self.group.multiply(a, b)
    }

    fn precomp_multiply(&mut self, a: &G::Element, b: &G::Element) -> G::Element {
        self.cost.precomp_multiplications += 1;
        self.group.multiply(a, b)
    }

    fn invert(&mut self, a: &G::Element) -> G::Element {
        self.cost.inversions += 1;
        self.group.invert(a)
    }
}

/// Largest dimension for which a full `3^D` table is built.
pub const MAX_TABLE_DIMENSION: usize = 8;

/// Products `a_1^{d_1} ⋯ a_D^{d_D}` for every digit column in `{-1,0,1}^D`.
#[derive(Clone, Debug)]
pub struct PrecompTable<E> {
    dimension: usize,
    entries: Vec<E>,
    cost: CostCounter,
}

fn table_index<I: IntoIterator<Item = i8>>(column: I) -> usize {
    column
        .into_iter()
        .fold((0usize, 1usize), |(idx, scale), d| {
            (idx + (d + 1) as usize * scale, scale * 3)
        })
        .0
}

fn table_column(mut idx: usize, dimension: usize) -> Vec<i8> {
    (0..dimension)
        .map(|_| {
            let d = (idx % 3) as i8 - 1;
            idx /= 3;
            d
        })
        .collect()
}

impl<E> PrecompTable<E> {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Cost of building the table.
    pub fn cost(&self) -> CostCounter {
        self.cost
    }

    /// Entry for a column in `{-1,0,1}^D`.
    pub fn get(&self, column: &[i8]) -> Option<&E> {
        if column.len() != self.dimension || column.iter().any(|d| d.abs() > 1) {
            return None;
        }
        self.entries.get(table_index(column.iter().copied()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<i8>, &E)> {
        self.entries
            .iter()
            .enumerate()
            .map(|(i, e)| (table_column(i, self.dimension), e))
    }
}

/// Builds the `3^D`-entry table. Each entry with two or more non-zero digits
/// costs one multiplication; each base is inverted once.
pub fn precompute<G: Group>(bases: &[G::Element], group: &G) -> Result<PrecompTable<G::Element>> {
    let dimension = bases.len();
    if dimension == 0 || dimension > MAX_TABLE_DIMENSION {
        return Err(Error::Precondition(format!(
            "table dimension must be between 1 and {MAX_TABLE_DIMENSION}, got {dimension}"
        )));
    }
    if let Some(k) = bases.iter().position(|b| !group.contains(b)) {
        return Err(Error::Precondition(format!(
            "base {} is not a group element",
            k + 1
        )));
    }
    let mut ops = Instrumented::new(group);
    let inverses: Vec<_> = bases.iter().map(|b| ops.invert(b)).collect();

    let size = 3usize.pow(dimension as u32);
    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by_key(|&i| {
        table_column(i, dimension)
            .iter()
            .filter(|&&d| d != 0)
            .count()
    });

    let mut slots: Vec<Option<G::Element>> = vec![None; size];
    for idx in order {
        let column = table_column(idx, dimension);
        let nonzero: Vec<usize> = (0..dimension).filter(|&k| column[k] != 0).collect();
        let entry = match nonzero.as_slice() {
            [] => group.identity(),
            [k] if column[*k] > 0 => bases[*k].clone(),
            [k] => inverses[*k].clone(),
            [.., last] => {
                let mut rest = column.clone();
                rest[*last] = 0;
                let mut unit = vec![0; dimension];
                unit[*last] = column[*last];
                let lhs = slots[table_index(rest)]
                    .as_ref()
                    .expect("fewer non-zeros first");
                let rhs = slots[table_index(unit)]
                    .as_ref()
                    .expect("fewer non-zeros first");
                ops.precomp_multiply(lhs, rhs)
            }
        };
        slots[idx] = Some(entry);
    }
    Ok(PrecompTable {
        dimension,
        entries: slots.into_iter().map(|e| e.expect("all filled")).collect(),
        cost: ops.cost,
    })
}

// Splits column j into at most two table lookups: digits of magnitude 2 are
// served as two unit steps. The number of lookups equals the column's
// largest digit magnitude.
fn column_lookups(j: &JointExpansion, pos: usize) -> [Option<usize>; 2] {
    let (mut first, mut second) = (0usize, 0usize);
    let (mut any_first, mut any_second) = (false, false);
    let mut scale = 1usize;
    for row in j.rows() {
        let d = row.digit(pos).get();
        let unit = d.signum();
        let rest = d - unit;
        first += (unit + 1) as usize * scale;
        second += (rest + 1) as usize * scale;
        any_first |= unit != 0;
        any_second |= rest != 0;
        scale *= 3;
    }
    [any_first.then_some(first), any_second.then_some(second)]
}

/// Left-to-right interleaved evaluation of `∏ a_k^{value(row k)}`.
///
/// Squares once per column below the top, including while the accumulator
/// is still the identity, and multiplies once per unit lookup except for
/// the first lookup of the top column.
pub fn evaluate<G: Group>(
    j: &JointExpansion,
    table: &PrecompTable<G::Element>,
    group: &G,
) -> Result<(G::Element, CostCounter)> {
    if table.dimension() != j.dimension() {
        return Err(Error::Dimension {
            expected: table.dimension(),
            actual: j.dimension(),
        });
    }
    if table.entries.iter().any(|e| !group.contains(e)) {
        return Err(Error::Precondition(
            "precomputed table does not belong to this group".into(),
        ));
    }
    let mut ops = Instrumented::new(group);
    if j.is_empty() {
        return Ok((group.identity(), ops.cost));
    }
    let top = j.len() - 1;
    let mut acc = match column_lookups(j, top) {
        [None, _] => group.identity(),
        [Some(a), None] => table.entries[a].clone(),
        [Some(a), Some(b)] => ops.multiply(&table.entries[a], &table.entries[b]),
    };
    for pos in (0..top).rev() {
        acc = ops.square(&acc);
        for idx in column_lookups(j, pos).into_iter().flatten() {
            acc = ops.multiply(&acc, &table.entries[idx]);
        }
    }
    Ok((acc, ops.cost))
}

/// Plain left-to-right binary exponentiation.
pub fn square_and_multiply<G: Group>(
    a: &G::Element,
    n: &BigInt,
    group: &G,
) -> Result<(G::Element, CostCounter)> {
    if n.is_negative() {
        return Err(Error::Negative(n.clone()));
    }
    let mut ops = Instrumented::new(group);
    let bits = n.bits();
    if bits == 0 {
        return Ok((group.identity(), ops.cost));
    }
    let mag = n.magnitude();
    let mut acc = a.clone();
    for i in (0..bits - 1).rev() {
        acc = ops.square(&acc);
        if mag.bit(i) {
            acc = ops.multiply(&acc, a);
        }
    }
    Ok((acc, ops.cost))
}

/// Result of a full recode–precompute–evaluate run.
#[derive(Clone, Debug)]
pub struct MultiExp<E> {
    pub element: E,
    pub cost: CostCounter,
    pub expansion: JointExpansion,
}

/// Computes `∏ a_k^{n_k}` using `scheme` to recode the exponents.
pub fn multiexp<G: Group>(
    bases: &[G::Element],
    exponents: &[BigInt],
    scheme: RecodingScheme,
    group: &G,
) -> Result<MultiExp<G::Element>> {
    if bases.len() != exponents.len() {
        return Err(Error::Dimension {
            expected: bases.len(),
            actual: exponents.len(),
        });
    }
    if let Some(n) = exponents.iter().find(|n| n.is_negative()) {
        return Err(Error::Negative(n.clone()));
    }
    let expansion = recode(scheme, exponents)?;
    let table = precompute(bases, group)?;
    let (element, mut cost) = evaluate(&expansion, &table, group)?;
    cost += table.cost();
    Ok(MultiExp {
        element,
        cost,
        expansion,
    })
}

/// Operation counts the evaluator produces for `j`, without running it.
pub fn predicted_cost(j: &JointExpansion) -> (u64, u64) {
    let squarings = j.len().saturating_sub(1) as u64;
    let multiplications = j.weight1() as u64 - j.top_is_nonzero() as u64;
    (squarings, multiplications)
}

/// The unit group of integers modulo an odd prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModGroup {
    modulus: BigUint,
    exponent_for_inverse: BigUint,
}

impl ModGroup {
    pub fn new(modulus: BigUint) -> Result<Self> {
        if modulus <= BigUint::from(2u8) || !is_probable_prime(&modulus) {
            return Err(Error::Precondition(format!(
                "modulus {modulus} is not an odd prime"
            )));
        }
        let exponent_for_inverse = &modulus - 2u8;
        Ok(ModGroup {
            modulus,
            exponent_for_inverse,
        })
    }

    /// The group modulo the Mersenne prime `2^61 - 1`.
    pub fn mersenne61() -> Self {
        ModGroup::new(BigUint::from((1u64 << 61) - 1)).expect("2^61 - 1 is prime")
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn element(&self, value: BigUint) -> Result<BigUint> {
        if self.contains(&value) {
            Ok(value)
        } else {
            Err(Error::Precondition(format!(
                "{value} is not a unit modulo {}",
                self.modulus
            )))
        }
    }
}

impl Group for ModGroup {
    type Element = BigUint;

    fn identity(&self) -> BigUint {
        BigUint::one()
    }

    fn multiply(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % &self.modulus
    }

    fn invert(&self, a: &BigUint) -> BigUint {
        a.modpow(&self.exponent_for_inverse, &self.modulus)
    }

    fn contains(&self, a: &BigUint) -> bool {
        !a.is_zero() && *a < self.modulus
    }
}

/// `Z^rank` under addition; `a^n` is `n·a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AdditiveGroup {
    pub rank: usize,
}

impl Group for AdditiveGroup {
    type Element = Vec<BigInt>;

    fn identity(&self) -> Vec<BigInt> {
        vec![BigInt::zero(); self.rank]
    }

    fn multiply(&self, a: &Vec<BigInt>, b: &Vec<BigInt>) -> Vec<BigInt> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    fn invert(&self, a: &Vec<BigInt>) -> Vec<BigInt> {
        a.iter().map(|x| -x).collect()
    }

    fn contains(&self, a: &Vec<BigInt>) -> bool {
        a.len() == self.rank
    }
}

/// The one-element group. Evaluating in it yields exact operation counts
/// at negligible arithmetic cost.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TrivialGroup;

impl Group for TrivialGroup {
    type Element = ();

    fn identity(&self) {}

    fn multiply(&self, _a: &(), _b: &()) {}

    fn invert(&self, _a: &()) {}
}

const WITNESSES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Miller–Rabin with the first twelve prime bases. Exact below 3.3·10^24,
/// probabilistic beyond.
pub fn is_probable_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u8);
    if *n < two {
        return false;
    }
    for p in WITNESSES {
        let p = BigUint::from(p);
        if *n == p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let n_minus_one = n - 1u8;
    let shift = n_minus_one.trailing_zeros().unwrap_or(0);
    let odd = &n_minus_one >> shift;
    'witness: for a in WITNESSES {
        let mut x = BigUint::from(a).modpow(&odd, n);
        if x.is_one() || x == n_minus_one {
            continue;
        }
        for _ in 1..shift {
            x = x.modpow(&two, n);
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Reference `∏ a_k^{n_k} mod p` via independent modular exponentiations.
pub fn reference_mod_product(
    bases: &[BigUint],
    exponents: &[BigInt],
    modulus: &BigUint,
) -> BigUint {
    bases
        .iter()
        .zip(exponents)
        .fold(BigUint::one(), |acc, (a, n)| {
            let (_, mag) = n.to_u32_digits();
            (acc * a.modpow(&BigUint::new(mag), modulus)) % modulus
        })
}
