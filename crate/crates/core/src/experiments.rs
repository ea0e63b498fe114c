//! Seeded statistics, verification suites and falsification experiments.
//!
//! Randomness: every sample `i` draws from its own ChaCha8 stream, keyed by
//! the run seed and selected with `set_stream(i)`. Per-sample observations
//! are integers and are summed exactly before the final division, so the
//! output does not depend on the worker count or scheduling.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expansions::{Expansion, JointExpansion};
use crate::multiexp::{
    evaluate, multiexp, precompute, predicted_cost, reference_mod_product, AdditiveGroup, ModGroup,
    PrecompTable, TrivialGroup,
};
use crate::recoding::{
    is_sjsf, is_zero_vector, min_joint_weight_oracle, min_weight1_oracle, naf,
    naf_complement_weight_gap, recode, sjsf, wllc_recode, RecodingScheme,
};
use crate::transducer::{
    double_naf_transducer, expected_double_naf_matrix, ratio, state_distribution,
    stationary_distribution, transition_matrix, word_bits, Node,
};

/// Exhaustive runs enumerate at most this many exponent vectors.
pub const EXHAUSTIVE_LIMIT_BITS: usize = 24;

/// Expected total cost per digit of the complement-then-NAF algorithm.
pub const CORRECT_SLOPE: f64 = 14.0 / 9.0;
/// Slope originally claimed for the complement-then-NAF algorithm.
pub const WLLC_CLAIMED_SLOPE: f64 = 1.304;
/// Slope claimed by the later "correction".
pub const SUN_CLAIMED_SLOPE: f64 = 1.471;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            _ => Err(Error::Unknown {
                kind: "format",
                name: s.to_owned(),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub seed: u64,
    pub samples: u64,
    pub lengths: Vec<usize>,
    pub schemes: Vec<RecodingScheme>,
    pub dimension: usize,
    pub exhaustive: bool,
    pub format: OutputFormat,
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            samples: 10_000,
            lengths: vec![256],
            schemes: vec![RecodingScheme::Wllc],
            dimension: 2,
            exhaustive: false,
            format: OutputFormat::Json,
            workers: 1,
        }
    }
}

/// Integer measurements of one recoded exponent vector.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Observation {
    /// Joint weight (non-zero columns).
    pub weight: u64,
    pub weight1: u64,
    /// Zero columns after padding to `length + 1` columns.
    pub zeros: u64,
    /// Evaluator multiplications, precomputation excluded.
    pub multiplications: u64,
    pub squarings: u64,
}

impl Observation {
    pub fn total_cost(&self) -> u64 {
        self.multiplications + self.squarings
    }
}

/// Exact sums over observations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Aggregate {
    pub samples: u64,
    pub weight: u128,
    pub weight1: u128,
    pub zeros: u128,
    pub multiplications: u128,
    pub squarings: u128,
    pub total_squared: u128,
    pub resampled: u64,
}

impl Aggregate {
    fn single(o: Observation, resampled: u64) -> Self {
        let total = o.total_cost() as u128;
        Aggregate {
            samples: 1,
            weight: o.weight.into(),
            weight1: o.weight1.into(),
            zeros: o.zeros.into(),
            multiplications: o.multiplications.into(),
            squarings: o.squarings.into(),
            total_squared: total * total,
            resampled,
        }
    }

    fn merge(self, other: Self) -> Self {
        Aggregate {
            samples: self.samples + other.samples,
            weight: self.weight + other.weight,
            weight1: self.weight1 + other.weight1,
            zeros: self.zeros + other.zeros,
            multiplications: self.multiplications + other.multiplications,
            squarings: self.squarings + other.squarings,
            total_squared: self.total_squared + other.total_squared,
            resampled: self.resampled + other.resampled,
        }
    }
}

/// One output row of a statistics run.
///
/// `std_error` is the standard error of the mean total cost
/// (`mean_multiplications + mean_squarings`).
#[derive(Clone, Debug, PartialEq)]
pub struct StatRecord {
    pub experiment: String,
    pub length: usize,
    pub dimension: usize,
    pub scheme: RecodingScheme,
    pub samples: u64,
    pub mean_weight: f64,
    pub mean_weight1: f64,
    pub mean_zeros: f64,
    pub mean_multiplications: f64,
    pub mean_squarings: f64,
    pub std_error: f64,
    pub seed: u64,
    /// All-zero vectors redrawn for the complement recoding; not serialized.
    pub resampled: u64,
}

impl StatRecord {
    pub const FIELDS: [&'static str; 12] = [
        "experiment",
        "length",
        "dimension",
        "scheme",
        "samples",
        "mean_weight",
        "mean_weight1",
        "mean_zeros",
        "mean_multiplications",
        "mean_squarings",
        "std_error",
        "seed",
    ];

    fn from_aggregate(
        experiment: &str,
        config: &RunConfig,
        length: usize,
        scheme: RecodingScheme,
        agg: &Aggregate,
    ) -> Self {
        let n = agg.samples as f64;
        let mean = |sum: u128| sum as f64 / n;
        let total = agg.multiplications + agg.squarings;
        let std_error = if agg.samples > 1 {
            let mean_total = total as f64 / n;
            let variance = (agg.total_squared as f64 - n * mean_total * mean_total) / (n - 1.0);
            (variance.max(0.0) / n).sqrt()
        } else {
            0.0
        };
        StatRecord {
            experiment: experiment.to_owned(),
            length,
            dimension: config.dimension,
            scheme,
            samples: agg.samples,
            mean_weight: mean(agg.weight),
            mean_weight1: mean(agg.weight1),
            mean_zeros: mean(agg.zeros),
            mean_multiplications: mean(agg.multiplications),
            mean_squarings: mean(agg.squarings),
            std_error,
            seed: config.seed,
            resampled: agg.resampled,
        }
    }

    pub fn mean_total_cost(&self) -> f64 {
        self.mean_multiplications + self.mean_squarings
    }

    pub fn csv_header() -> String {
        Self::FIELDS.join(",")
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{}",
            self.experiment,
            self.length,
            self.dimension,
            self.scheme,
            self.samples,
            self.mean_weight,
            self.mean_weight1,
            self.mean_zeros,
            self.mean_multiplications,
            self.mean_squarings,
            self.std_error,
            self.seed
        )
    }

    /// One JSON object on a single line, decimals with six fractional digits.
    pub fn to_json(&self) -> String {
        format!(
            concat!(
                "{{\"experiment\":\"{}\",\"length\":{},\"dimension\":{},\"scheme\":\"{}\",",
                "\"samples\":{},\"mean_weight\":{:.6},\"mean_weight1\":{:.6},\"mean_zeros\":{:.6},",
                "\"mean_multiplications\":{:.6},\"mean_squarings\":{:.6},\"std_error\":{:.6},\"seed\":{}}}"
            ),
            self.experiment.escape_default(),
            self.length,
            self.dimension,
            self.scheme,
            self.samples,
            self.mean_weight,
            self.mean_weight1,
            self.mean_zeros,
            self.mean_multiplications,
            self.mean_squarings,
            self.std_error,
            self.seed
        )
    }
}

/// Renders records, with a header row for CSV.
pub fn format_records(records: &[StatRecord], format: OutputFormat) -> String {
    let mut out = String::new();
    if format == OutputFormat::Csv {
        out.push_str(&StatRecord::csv_header());
        out.push('\n');
    }
    for r in records {
        out.push_str(&match format {
            OutputFormat::Json => r.to_json(),
            OutputFormat::Csv => r.to_csv(),
        });
        out.push('\n');
    }
    out
}

/// The ChaCha8 stream of sample `index` under `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A uniform integer in `[0, 2^length)`.
pub fn random_exponent(rng: &mut impl RngCore, length: usize) -> BigInt {
    let words = length.div_ceil(32);
    let mut digits: Vec<u32> = (0..words).map(|_| rng.next_u32()).collect();
    let spare = words * 32 - length;
    if let Some(top) = digits.last_mut() {
        *top &= u32::MAX >> spare;
    }
    BigInt::from(BigUint::new(digits))
}

/// Exponent vector of sample `index`. When `nonzero` is set, all-zero
/// vectors are redrawn from the same stream; the number of redraws is
/// returned alongside.
pub fn sample_exponents(
    seed: u64,
    index: u64,
    length: usize,
    dimension: usize,
    nonzero: bool,
) -> (Vec<BigInt>, u64) {
    let mut rng = sample_rng(seed, index);
    let mut redraws = 0;
    loop {
        let v: Vec<BigInt> = (0..dimension)
            .map(|_| random_exponent(&mut rng, length))
            .collect();
        if !nonzero || !is_zero_vector(&v) || length == 0 {
            return (v, redraws);
        }
        redraws += 1;
    }
}

/// Table over the one-element group; evaluation against it only counts.
pub fn counting_table(dimension: usize) -> Result<PrecompTable<()>> {
    precompute(&vec![(); dimension], &TrivialGroup)
}

/// Recodes `exponents` (each below `2^length`) and measures the result.
pub fn observe(
    scheme: RecodingScheme,
    exponents: &[BigInt],
    length: usize,
    table: &PrecompTable<()>,
) -> Result<Observation> {
    let j = recode(scheme, exponents)?;
    observe_expansion(&j, length, table)
}

pub fn observe_expansion(
    j: &JointExpansion,
    length: usize,
    table: &PrecompTable<()>,
) -> Result<Observation> {
    if j.len() > length + 1 {
        return Err(Error::Precondition(format!(
            "expansion of length {} exceeds {} columns",
            j.len(),
            length + 1
        )));
    }
    let (_, cost) = evaluate(j, table, &TrivialGroup)?;
    let weight = j.joint_weight() as u64;
    Ok(Observation {
        weight,
        weight1: j.weight1() as u64,
        zeros: (length + 1) as u64 - weight,
        multiplications: cost.multiplications,
        squarings: cost.squarings,
    })
}

fn with_workers<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Precondition(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(job))
}

/// Runs every `(length, scheme)` combination of `config`.
pub fn stats(config: &RunConfig) -> Result<Vec<StatRecord>> {
    if config.samples == 0 && !config.exhaustive {
        return Err(Error::Precondition(
            "at least one sample is required".into(),
        ));
    }
    if config.dimension == 0 {
        return Err(Error::Precondition("dimension must be at least 1".into()));
    }
    let table = counting_table(config.dimension)?;
    let mut records = Vec::new();
    for &length in &config.lengths {
        for &scheme in &config.schemes {
            if !scheme.supports_dimension(config.dimension) {
                return Err(Error::Precondition(format!(
                    "scheme {scheme} does not support dimension {}",
                    config.dimension
                )));
            }
            let (experiment, agg) = if config.exhaustive {
                (
                    "stats-exhaustive",
                    exhaustive_aggregate(config, length, scheme, &table)?,
                )
            } else {
                ("stats", sampled_aggregate(config, length, scheme, &table)?)
            };
            records.push(StatRecord::from_aggregate(
                experiment, config, length, scheme, &agg,
            ));
        }
    }
    Ok(records)
}

fn sampled_aggregate(
    config: &RunConfig,
    length: usize,
    scheme: RecodingScheme,
    table: &PrecompTable<()>,
) -> Result<Aggregate> {
    let nonzero = scheme == RecodingScheme::Wllc;
    with_workers(config.workers, || {
        (0..config.samples)
            .into_par_iter()
            .map(|i| {
                let (exponents, redraws) =
                    sample_exponents(config.seed, i, length, config.dimension, nonzero);
                observe(scheme, &exponents, length, table).map(|o| Aggregate::single(o, redraws))
            })
            .try_reduce(Aggregate::default, |a, b| Ok(a.merge(b)))
    })?
}

fn exhaustive_aggregate(
    config: &RunConfig,
    length: usize,
    scheme: RecodingScheme,
    table: &PrecompTable<()>,
) -> Result<Aggregate> {
    let bits = config.dimension * length;
    if bits > EXHAUSTIVE_LIMIT_BITS {
        return Err(Error::Precondition(format!(
            "exhaustive mode needs dimension·length ≤ {EXHAUSTIVE_LIMIT_BITS}, got {bits}"
        )));
    }
    // The complement recoding is undefined on the all-zero vector.
    let first = u64::from(scheme == RecodingScheme::Wllc);
    let mask = (1u64 << length) - 1;
    with_workers(config.workers, || {
        (first..1u64 << bits)
            .into_par_iter()
            .map(|code| {
                let exponents: Vec<BigInt> = (0..config.dimension)
                    .map(|k| BigInt::from((code >> (k * length)) & mask))
                    .collect();
                observe(scheme, &exponents, length, table).map(|o| Aggregate::single(o, 0))
            })
            .try_reduce(Aggregate::default, |a, b| Ok(a.merge(b)))
    })?
}

/// Per-sample comparison of two schemes on identical exponent vectors.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PairedComparison {
    pub samples: u64,
    /// Samples where the first scheme cost strictly less than the second.
    pub first_cheaper: u64,
    /// Samples where the costs are equal.
    pub ties: u64,
    /// Exponents of the first sample, by index, where the first scheme was
    /// cheaper.
    pub witness: Option<Vec<BigInt>>,
}

/// Compares total evaluator cost of `first` and `second` on the sample
/// streams a statistics run with the same seed would draw.
pub fn compare_costs(
    config: &RunConfig,
    length: usize,
    first: RecodingScheme,
    second: RecodingScheme,
) -> Result<PairedComparison> {
    let table = counting_table(config.dimension)?;
    let nonzero = first == RecodingScheme::Wllc || second == RecodingScheme::Wllc;
    // (samples, first cheaper, ties, earliest witness by sample index)
    type Tally = (u64, u64, u64, Option<(u64, Vec<BigInt>)>);
    let per_sample = |i: u64| -> Result<Tally> {
        let (v, _) = sample_exponents(config.seed, i, length, config.dimension, nonzero);
        let a = observe(first, &v, length, &table)?.total_cost();
        let b = observe(second, &v, length, &table)?.total_cost();
        let cheaper = a < b;
        Ok((
            1,
            cheaper.into(),
            (a == b).into(),
            cheaper.then_some((i, v)),
        ))
    };
    let (samples, first_cheaper, ties, witness) = with_workers(config.workers, || {
        (0..config.samples)
            .into_par_iter()
            .map(per_sample)
            .try_reduce(
                || (0, 0, 0, None),
                |x, y| {
                    let witness = match (x.3, y.3) {
                        (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
                        (a, b) => a.or(b),
                    };
                    Ok((x.0 + y.0, x.1 + y.1, x.2 + y.2, witness))
                },
            )
    })??;
    Ok(PairedComparison {
        samples,
        first_cheaper,
        ties,
        witness: witness.map(|(_, v)| v),
    })
}

/// Name of a verification suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Check {
    Thm1,
    Thm2,
    Sjsf,
    CostModel,
    Transducer,
    WllcVsNaf,
}

impl Check {
    pub const ALL: [Check; 6] = [
        Check::Thm1,
        Check::Thm2,
        Check::Sjsf,
        Check::CostModel,
        Check::Transducer,
        Check::WllcVsNaf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Thm1 => "thm1",
            Check::Thm2 => "thm2",
            Check::Sjsf => "sjsf",
            Check::CostModel => "cost-model",
            Check::Transducer => "transducer",
            Check::WllcVsNaf => "wllc-vs-naf",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Unknown {
                kind: "check",
                name: s.to_owned(),
            })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyBounds {
    /// Longest binary word for exhaustive word checks.
    pub max_len: usize,
    /// Largest exponent for pair checks; `None` picks 63 for `thm1` and 255
    /// for `sjsf`.
    pub max_n: Option<i64>,
    /// Random instances per scheme for the cost model.
    pub samples: u64,
    /// Random 64-bit pairs for the SJSF value round trip.
    pub pairs: u64,
    pub seed: u64,
}

impl Default for VerifyBounds {
    fn default() -> Self {
        VerifyBounds {
            max_len: 14,
            max_n: None,
            samples: 1000,
            pairs: 10_000,
            seed: 0,
        }
    }
}

const MAX_COUNTEREXAMPLES: usize = 20;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub check: String,
    pub cases: u64,
    pub notes: Vec<String>,
    pub counterexamples: Vec<String>,
    /// Failures beyond the listed counterexamples.
    pub suppressed: u64,
}

impl VerifyReport {
    fn new(check: Check) -> Self {
        VerifyReport {
            check: check.name().to_owned(),
            ..Default::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }

    fn expect(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            if self.counterexamples.len() < MAX_COUNTEREXAMPLES {
                self.counterexamples.push(describe());
            } else {
                self.suppressed += 1;
            }
        }
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        writeln!(f, "{status} {} ({} cases)", self.check, self.cases)?;
        for note in &self.notes {
            writeln!(f, "  {note}")?;
        }
        for c in &self.counterexamples {
            writeln!(f, "  counterexample: {c}")?;
        }
        if self.suppressed > 0 {
            writeln!(f, "  ... and {} more", self.suppressed)?;
        }
        Ok(())
    }
}

pub fn verify(check: Check, bounds: &VerifyBounds) -> Result<VerifyReport> {
    match check {
        Check::Thm1 => verify_thm1(bounds.max_n.unwrap_or(63)),
        Check::Thm2 => verify_thm2(bounds.max_len),
        Check::Sjsf => verify_sjsf(bounds.max_n.unwrap_or(255), bounds.pairs, bounds.seed),
        Check::CostModel => verify_cost_model(bounds.samples, bounds.seed),
        Check::Transducer => verify_transducer(bounds.max_len),
        Check::WllcVsNaf => verify_wllc_vs_naf(bounds.max_len),
    }
}

fn check_max_len(max_len: usize) -> Result<()> {
    if max_len > 24 {
        return Err(Error::Precondition(format!(
            "max length {max_len} exceeds 24"
        )));
    }
    Ok(())
}

fn verify_thm1(max_n: i64) -> Result<VerifyReport> {
    let mut report = VerifyReport::new(Check::Thm1);
    for m in 0..=max_n {
        for n in 0..=max_n {
            let oracle = min_weight1_oracle(m, n)?;
            let s = sjsf(&m.into(), &n.into())?;
            report.expect(
                oracle.minimal_cost == s.joint_weight() && s.weight1() == s.joint_weight(),
                || {
                    format!(
                        "({m},{n}): oracle {} vs SJSF weight {}",
                        oracle.minimal_cost,
                        s.joint_weight()
                    )
                },
            );
        }
    }
    report.notes.push(format!(
        "min weight1 over {{-2..2}}^2 equals SJSF joint weight for 0 <= m,n <= {max_n}"
    ));
    Ok(report)
}

/// Largest `|gap|` over all binary words of length `1..=max_len`, with the
/// shortest word attaining it.
pub fn max_complement_gap(max_len: usize) -> Result<(i64, Expansion, u64)> {
    let mut best = (0i64, Expansion::default());
    let mut words = 0u64;
    for len in 1..=max_len {
        for n in 0u64..(1 << len) {
            let b = Expansion::binary(&n.into(), len)?;
            let gap = naf_complement_weight_gap(&b)?;
            words += 1;
            if gap.abs() > best.0 {
                best = (gap.abs(), b);
            }
        }
    }
    Ok((best.0, best.1, words))
}

fn verify_thm2(max_len: usize) -> Result<VerifyReport> {
    check_max_len(max_len)?;
    let mut report = VerifyReport::new(Check::Thm2);
    let (max_gap, witness, words) = max_complement_gap(max_len)?;
    report.cases = words;
    report.expect(max_gap <= 2, || format!("gap {max_gap} at {witness}"));
    report.cases -= 1;
    let witness_111 = naf_complement_weight_gap(&Expansion::from_msb(&[1, 1, 1])?)?;
    report.notes.push(format!(
        "{words} words of length 1..={max_len}: max |gap| = {max_gap}, first attained at {witness}; gap(111) = {witness_111}"
    ));
    Ok(report)
}

fn verify_sjsf(max_n: i64, random_pairs: u64, seed: u64) -> Result<VerifyReport> {
    let mut report = VerifyReport::new(Check::Sjsf);
    for m in 0..=max_n {
        for n in 0..=max_n {
            let s = sjsf(&m.into(), &n.into())?;
            let oracle = min_joint_weight_oracle(m, n)?.minimal_cost;
            let syntax = is_sjsf(&s)?;
            let value_ok = s.value() == [BigInt::from(m), BigInt::from(n)];
            report.expect(syntax && value_ok && s.joint_weight() == oracle, || {
                format!("({m},{n}) -> {s}: syntax {syntax}, value {value_ok}, weight {} vs oracle {oracle}", s.joint_weight())
            });
        }
    }
    for i in 0..random_pairs {
        let (v, _) = sample_exponents(seed, i, 64, 2, false);
        let s = sjsf(&v[0], &v[1])?;
        report.expect(s.value() == v && is_sjsf(&s)?, || {
            format!("({}, {}) -> {s}", v[0], v[1])
        });
    }
    report.notes.push(format!(
        "exhaustive 0 <= m,n <= {max_n} against the joint-weight oracle; {random_pairs} random 64-bit pairs round-tripped"
    ));
    Ok(report)
}

fn verify_cost_model(samples: u64, seed: u64) -> Result<VerifyReport> {
    let mut report = VerifyReport::new(Check::CostModel);
    let group = ModGroup::mersenne61();
    let additive = AdditiveGroup { rank: 1 };
    let schemes = [
        (RecodingScheme::Binary, 2),
        (RecodingScheme::Naf, 1),
        (RecodingScheme::StackedNaf, 2),
        (RecodingScheme::Sjsf, 2),
        (RecodingScheme::Wllc, 2),
        (RecodingScheme::Wllc, 3),
    ];
    for (scheme_index, &(scheme, dimension)) in schemes.iter().enumerate() {
        let stream_base = (scheme_index as u64) << 40;
        for i in 0..samples {
            let mut rng = sample_rng(seed, stream_base + i);
            let exponents: Vec<BigInt> = loop {
                let v: Vec<BigInt> = (0..dimension)
                    .map(|_| random_exponent(&mut rng, 64))
                    .collect();
                if !is_zero_vector(&v) {
                    break v;
                }
            };
            let bases: Vec<BigUint> = (0..dimension)
                .map(|_| BigUint::from(1 + rng.next_u64() % ((1u64 << 61) - 2)))
                .collect();
            let run = multiexp(&bases, &exponents, scheme, &group)?;
            let (squarings, multiplications) = predicted_cost(&run.expansion);
            let reference = reference_mod_product(&bases, &exponents, group.modulus());

            let xs: Vec<Vec<BigInt>> = (0..dimension)
                .map(|_| vec![BigInt::from(rng.next_u64() as i64)])
                .collect();
            let sum: BigInt = xs.iter().zip(&exponents).map(|(x, n)| &x[0] * n).sum();
            let additive_run = multiexp(&xs, &exponents, scheme, &additive)?;

            report.expect(
                run.cost.squarings == squarings
                    && run.cost.multiplications == multiplications
                    && run.element == reference
                    && additive_run.element == [sum.clone()],
                || {
                    format!(
                        "{scheme} n={exponents:?}: counted ({}, {}) predicted ({squarings}, {multiplications}), element {} vs {reference}, additive {:?} vs {sum}",
                        run.cost.squarings, run.cost.multiplications, run.element, additive_run.element
                    )
                },
            );
        }
    }
    report.notes.push(format!(
        "{samples} random 64-bit instances per scheme in Z_p^* (p = 2^61 - 1) and Z"
    ));
    Ok(report)
}

fn verify_transducer(max_len: usize) -> Result<VerifyReport> {
    check_max_len(max_len)?;
    let mut report = VerifyReport::new(Check::Transducer);
    let t = double_naf_transducer();
    let p = transition_matrix(&t);
    report.expect(p == expected_double_naf_matrix(), || {
        format!("transition matrix differs:\n{p}")
    });

    let pi = stationary_distribution(&p)?;
    let expected_pi = [(0, 1), (0, 1), (0, 1), (1, 3), (1, 3), (1, 3)].map(|(a, b)| ratio(a, b));
    report.expect(pi.probabilities == expected_pi, || {
        format!("stationary {:?}", pi.probabilities)
    });

    for k in 1..=20usize {
        let d = state_distribution(&p, k);
        let tail = BigRational::new(1.into(), BigInt::from(1) << k);
        report.expect(
            d.probabilities[1] == tail && d.probabilities[2] == tail,
            || format!("e1 P^{k} = {:?}", d.probabilities),
        );
    }

    let sccs = t.strongly_connected_components();
    let sizes: Vec<usize> = sccs.iter().map(Vec::len).collect();
    report.expect(sizes == [1, 2, 3, 1] && sccs[3] == [Node::Terminal], || {
        format!("strongly connected components {sccs:?}")
    });

    for s in 3..6 {
        for bit in [0, 1] {
            let tr = t.transition(s, bit);
            let w = |k: usize| tr.output.iter().filter(|l| l[k] != 0).count();
            report.expect(w(0) == w(1), || {
                format!("unbalanced output leaving state {}", s + 1)
            });
        }
    }

    for len in 1..=max_len {
        let all = (1u64 << len) - 1;
        for n in 0..=all {
            let out = t.run(&word_bits(n, len));
            let ok = out.row(0).trimmed() == naf(&n.into())
                && out.row(1).trimmed() == naf(&(all ^ n).into());
            report.expect(ok, || format!("word {n} of length {len} -> {out}"));
        }
    }
    report.notes.push(
        "matrix equals P; stationary = (0,0,0,1/3,1/3,1/3); e1 P^k tail = 2^-k for k <= 20".into(),
    );
    report.notes.push(format!(
        "product outputs equal (NAF, NAF of complement) for all words of length <= {max_len}"
    ));
    Ok(report)
}

fn verify_wllc_vs_naf(max_len: usize) -> Result<VerifyReport> {
    check_max_len(max_len)?;
    let mut report = VerifyReport::new(Check::WllcVsNaf);
    for len in 1..=max_len {
        for n in 0u64..(1 << len) {
            let n = BigInt::from(n);
            let w = wllc_recode(&n, len)?.weight1();
            let direct = naf(&n).weight();
            report.expect(w >= direct, || {
                format!("n={n} len={len}: weight1 {w} < NAF weight {direct}")
            });
        }
    }
    report.notes.push(format!(
        "complement recoding never beats the NAF for lengths 1..={max_len}"
    ));
    Ok(report)
}

/// Claim targeted by a falsification experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Claim {
    WllcSlope,
    SunSlope,
    BitProb,
}

impl Claim {
    pub const ALL: [Claim; 3] = [Claim::WllcSlope, Claim::SunSlope, Claim::BitProb];

    pub fn name(self) -> &'static str {
        match self {
            Claim::WllcSlope => "wllc-slope",
            Claim::SunSlope => "sun-slope",
            Claim::BitProb => "bit-prob",
        }
    }
}

impl FromStr for Claim {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Claim::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Unknown {
                kind: "claim",
                name: s.to_owned(),
            })
    }
}

/// Paired-length slope estimate `(mean(2ℓ) - mean(ℓ)) / ℓ` of the mean
/// total cost; the constant term cancels.
#[derive(Clone, Debug, PartialEq)]
pub struct SlopeEstimate {
    pub scheme: RecodingScheme,
    pub length: usize,
    pub short: StatRecord,
    pub long: StatRecord,
    pub slope: f64,
}

impl SlopeEstimate {
    pub fn multiplication_slope(&self) -> f64 {
        (self.long.mean_multiplications - self.short.mean_multiplications) / self.length as f64
    }
}

pub fn estimate_slope(
    config: &RunConfig,
    scheme: RecodingScheme,
    length: usize,
) -> Result<SlopeEstimate> {
    let run = RunConfig {
        lengths: vec![length, 2 * length],
        schemes: vec![scheme],
        exhaustive: false,
        ..config.clone()
    };
    let mut records = stats(&run)?.into_iter();
    let (short, long) = (
        records.next().expect("two lengths"),
        records.next().expect("two lengths"),
    );
    let slope = (long.mean_total_cost() - short.mean_total_cost()) / length as f64;
    Ok(SlopeEstimate {
        scheme,
        length,
        short,
        long,
        slope,
    })
}

/// Exact bit statistics of the "complement if heavy" word `e` over all
/// `n < 2^length`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitProbabilities {
    pub length: usize,
    /// `P(e_i = 0)` for `i = 0..length`.
    pub zero: Vec<BigRational>,
    /// `P(e_i = 0 ∧ e_j = 0)` for `i < j`.
    pub joint_zero: Vec<(usize, usize, BigRational)>,
}

impl BitProbabilities {
    pub fn zero_probability(&self, i: usize) -> &BigRational {
        &self.zero[i]
    }

    pub fn joint_zero_probability(&self, i: usize, j: usize) -> Option<&BigRational> {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.joint_zero
            .iter()
            .find(|(x, y, _)| *x == a && *y == b)
            .map(|(_, _, p)| p)
    }

    /// Pairs whose joint zero probability differs from the product of the
    /// marginals.
    pub fn dependent_pairs(&self) -> Vec<(usize, usize)> {
        self.joint_zero
            .iter()
            .filter(|(i, j, p)| *p != &self.zero[*i] * &self.zero[*j])
            .map(|(i, j, _)| (*i, *j))
            .collect()
    }
}

pub const MAX_BIT_PROB_LENGTH: usize = 16;

pub fn bit_probabilities(length: usize) -> Result<BitProbabilities> {
    if length == 0 || length > MAX_BIT_PROB_LENGTH {
        return Err(Error::Precondition(format!(
            "bit probabilities need 1 <= length <= {MAX_BIT_PROB_LENGTH}"
        )));
    }
    let total = 1u64 << length;
    let all = total - 1;
    let mut zero = vec![0u64; length];
    let mut joint = vec![vec![0u64; length]; length];
    for n in 0..total {
        let e = if 2 * n.count_ones() as usize > length {
            all ^ n
        } else {
            n
        };
        for i in 0..length {
            if e >> i & 1 == 0 {
                zero[i] += 1;
                for (j, count) in joint[i].iter_mut().enumerate().skip(i + 1) {
                    if e >> j & 1 == 0 {
                        *count += 1;
                    }
                }
            }
        }
    }
    let frac = |count: u64| BigRational::new(count.into(), total.into());
    Ok(BitProbabilities {
        length,
        zero: zero.into_iter().map(frac).collect(),
        joint_zero: (0..length)
            .flat_map(|i| (i + 1..length).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, frac(joint[i][j])))
            .collect(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FalsifyReport {
    pub claim: Claim,
    pub falsified: bool,
    pub lines: Vec<String>,
}

impl fmt::Display for FalsifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.falsified {
            "FALSIFIED"
        } else {
            "NOT FALSIFIED"
        };
        writeln!(f, "{} {verdict}", self.claim.name())?;
        for l in &self.lines {
            writeln!(f, "  {l}")?;
        }
        Ok(())
    }
}

/// A slope claim is falsified when the measurement lies within
/// `SLOPE_AGREEMENT` of 14/9 and at least `SLOPE_SEPARATION` from the claim.
pub const SLOPE_AGREEMENT: f64 = 0.011;
pub const SLOPE_SEPARATION: f64 = 0.07;

#[derive(Clone, Debug)]
pub struct FalsifyOptions {
    pub config: RunConfig,
    /// Base length ℓ for slope claims (ℓ and 2ℓ are sampled), word length
    /// for `bit-prob`.
    pub length: usize,
}

pub fn falsify(claim: Claim, options: &FalsifyOptions) -> Result<FalsifyReport> {
    match claim {
        Claim::WllcSlope | Claim::SunSlope => {
            let claimed = if claim == Claim::WllcSlope {
                WLLC_CLAIMED_SLOPE
            } else {
                SUN_CLAIMED_SLOPE
            };
            let config = RunConfig {
                dimension: 2,
                ..options.config.clone()
            };
            let est = estimate_slope(&config, RecodingScheme::Wllc, options.length)?;
            let to_claim = (est.slope - claimed).abs();
            let to_correct = (est.slope - CORRECT_SLOPE).abs();
            let lines = vec![
                format!(
                    "mean total cost {:.6} at length {}, {:.6} at length {} ({} samples each, seed {})",
                    est.short.mean_total_cost(),
                    est.length,
                    est.long.mean_total_cost(),
                    2 * est.length,
                    est.short.samples,
                    config.seed
                ),
                format!("slope {:.6}", est.slope),
                format!("distance to claimed {claimed}: {to_claim:.6}"),
                format!("distance to 14/9 = {CORRECT_SLOPE:.6}: {to_correct:.6}"),
                format!(
                    "distance to 1.304: {:.6}, to 1.471: {:.6}",
                    (est.slope - WLLC_CLAIMED_SLOPE).abs(),
                    (est.slope - SUN_CLAIMED_SLOPE).abs()
                ),
            ];
            Ok(FalsifyReport {
                claim,
                falsified: to_correct <= SLOPE_AGREEMENT && to_claim >= SLOPE_SEPARATION,
                lines,
            })
        }
        Claim::BitProb => {
            let probs = bit_probabilities(options.length)?;
            let three_quarters = ratio(3, 4);
            let mut lines = Vec::new();
            for (i, p) in probs.zero.iter().enumerate() {
                lines.push(format!(
                    "P(e{i}=0) = {p} ({:.6}), claimed 3/4",
                    p.to_f64().unwrap_or(f64::NAN)
                ));
            }
            for (i, j, p) in &probs.joint_zero {
                let product = &probs.zero[*i] * &probs.zero[*j];
                lines.push(format!(
                    "P(e{i}=0 & e{j}=0) = {p}, product of marginals {product}"
                ));
            }
            let dependent = probs.dependent_pairs();
            lines.push(format!("{} dependent bit pairs", dependent.len()));
            let wrong_marginal = probs.zero.iter().any(|p| *p != three_quarters);
            Ok(FalsifyReport {
                claim,
                falsified: wrong_marginal || !dependent.is_empty(),
                lines,
            })
        }
    }
}

/// Total evaluator cost of `scheme` on `exponents`, precomputation excluded.
pub fn total_cost(
    scheme: RecodingScheme,
    exponents: &[BigInt],
    table: &PrecompTable<()>,
) -> Result<u64> {
    let j = recode(scheme, exponents)?;
    let (_, cost) = evaluate(&j, table, &TrivialGroup)?;
    Ok(cost.total())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn config(scheme: RecodingScheme, dimension: usize, length: usize, samples: u64) -> RunConfig {
        RunConfig {
            seed: 7,
            samples,
            lengths: vec![length],
            schemes: vec![scheme],
            dimension,
            ..Default::default()
        }
    }

    #[test]
    fn random_exponents_stay_in_range() {
        let mut rng = sample_rng(1, 2);
        for length in [1usize, 5, 31, 32, 33, 64, 100] {
            for _ in 0..200 {
                let n = random_exponent(&mut rng, length);
                assert!(n.bits() <= length as u64);
                assert!(n >= BigInt::zero());
            }
        }
        assert_eq!(random_exponent(&mut rng, 0), BigInt::zero());
    }

    #[test]
    fn per_sample_streams_are_stable() {
        let (a, _) = sample_exponents(42, 17, 128, 2, false);
        let (b, _) = sample_exponents(42, 17, 128, 2, false);
        let (c, _) = sample_exponents(42, 18, 128, 2, false);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn zero_vectors_are_redrawn_for_wllc() {
        // length 1, dimension 1: half of all draws are zero
        let redraws: u64 = (0..200).map(|i| sample_exponents(3, i, 1, 1, true).1).sum();
        assert!(redraws > 0);
        for i in 0..200 {
            assert_eq!(sample_exponents(3, i, 1, 1, true).0, vec![BigInt::from(1)]);
        }
    }

    #[test]
    fn observation_identities() {
        let table = counting_table(2).unwrap();
        let o = observe(RecodingScheme::Wllc, &[13.into(), 5.into()], 4, &table).unwrap();
        assert_eq!(o.weight, 4);
        assert_eq!(o.weight1, 4);
        assert_eq!(o.zeros, 1);
        assert_eq!(o.squarings, 4);
        assert_eq!(o.multiplications, 3);
        assert!(observe(RecodingScheme::Wllc, &[13.into(), 5.into()], 2, &table).is_err());
    }

    #[test]
    fn record_identity_weight_plus_zeros() {
        for scheme in [
            RecodingScheme::Binary,
            RecodingScheme::StackedNaf,
            RecodingScheme::Sjsf,
            RecodingScheme::Wllc,
        ] {
            let r = &stats(&config(scheme, 2, 40, 300)).unwrap()[0];
            assert_eq!(r.samples, 300);
            assert!(
                (r.mean_weight + r.mean_zeros - 41.0).abs() < 1e-9,
                "{scheme}"
            );
            assert!(r.mean_weight1 >= r.mean_weight);
        }
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let mut c = config(RecodingScheme::Wllc, 2, 64, 500);
        let one = format_records(&stats(&c).unwrap(), OutputFormat::Json);
        c.workers = 3;
        let three = format_records(&stats(&c).unwrap(), OutputFormat::Json);
        assert_eq!(one, three);
    }

    #[test]
    fn exhaustive_mode() {
        let mut c = config(RecodingScheme::Sjsf, 2, 4, 1);
        c.exhaustive = true;
        let r = &stats(&c).unwrap()[0];
        assert_eq!(r.samples, 256);
        assert_eq!(r.experiment, "stats-exhaustive");

        c.schemes = vec![RecodingScheme::Wllc];
        assert_eq!(stats(&c).unwrap()[0].samples, 255);

        c.lengths = vec![13];
        assert!(stats(&c).is_err());
    }

    #[test]
    fn exhaustive_naf_weight_is_exact() {
        let mut c = config(RecodingScheme::Naf, 1, 10, 1);
        c.exhaustive = true;
        let r = &stats(&c).unwrap()[0];
        let total: usize = (0..1024i64).map(|n| naf(&n.into()).weight()).sum();
        assert!((r.mean_weight - total as f64 / 1024.0).abs() < 1e-12);
    }

    #[test]
    fn unsupported_dimension_is_rejected() {
        assert!(stats(&config(RecodingScheme::Sjsf, 3, 8, 10)).is_err());
        assert!(stats(&config(RecodingScheme::Naf, 2, 8, 10)).is_err());
        assert!(stats(&config(RecodingScheme::Wllc, 2, 8, 0)).is_err());
    }

    #[test]
    fn output_formats() {
        let r = &stats(&config(RecodingScheme::Sjsf, 2, 16, 10)).unwrap()[0];
        let json = r.to_json();
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        let keys: Vec<&str> = parsed
            .as_object()
            .unwrap()
            .keys()
            .map(String::as_str)
            .collect();
        let mut expected = StatRecord::FIELDS.to_vec();
        expected.sort_unstable();
        let mut keys_sorted = keys.clone();
        keys_sorted.sort_unstable();
        assert_eq!(keys_sorted, expected);
        assert_eq!(parsed["scheme"], "sjsf");
        assert!(json.contains(&format!("\"mean_weight\":{:.6}", r.mean_weight)));

        let csv = format_records(std::slice::from_ref(r), OutputFormat::Csv);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), StatRecord::FIELDS.join(","));
        assert_eq!(lines.next().unwrap().split(',').count(), 12);
        assert_eq!("csv".parse::<OutputFormat>().unwrap(), OutputFormat::Csv);
        assert!("xml".parse::<OutputFormat>().is_err());
    }

    #[test]
    fn bit_probability_examples() {
        let p4 = bit_probabilities(4).unwrap();
        assert_eq!(p4.zero[0], ratio(11, 16));
        let p2 = bit_probabilities(2).unwrap();
        assert_eq!(p2.joint_zero_probability(1, 0), Some(&ratio(1, 2)));
        assert_ne!(ratio(1, 2), ratio(9, 16));
        assert!(!p2.dependent_pairs().is_empty());
        assert!(bit_probabilities(0).is_err());
        assert!(bit_probabilities(17).is_err());
    }

    #[test]
    fn bit_probabilities_match_direct_enumeration() {
        for length in 1..=8usize {
            let p = bit_probabilities(length).unwrap();
            for i in 0..length {
                let zeros = (0..1u64 << length)
                    .filter(|&n| {
                        let b = Expansion::binary(&n.into(), length).unwrap();
                        let e = if 2 * b.weight() > length {
                            b.ones_complement().unwrap()
                        } else {
                            b
                        };
                        e.digit(i).is_zero()
                    })
                    .count();
                assert_eq!(
                    p.zero[i],
                    BigRational::new(zeros.into(), (1u64 << length).into())
                );
            }
        }
    }

    #[test]
    fn small_verify_suites_pass() {
        let bounds = VerifyBounds {
            max_len: 8,
            max_n: Some(15),
            samples: 20,
            pairs: 100,
            seed: 1,
        };
        for check in Check::ALL {
            let report = verify(check, &bounds).unwrap();
            assert!(report.passed(), "{report}");
            assert!(report.cases > 0);
        }
        assert!("thm3".parse::<Check>().is_err());
    }

    #[test]
    fn thm2_report_mentions_the_maximum() {
        let (gap, witness, words) = max_complement_gap(14).unwrap();
        assert_eq!(gap, 2);
        assert_eq!(words, 32_766);
        assert_eq!(witness.to_string(), "00");
    }

    #[test]
    fn falsify_bit_prob() {
        let opts = FalsifyOptions {
            config: RunConfig::default(),
            length: 4,
        };
        let r = falsify(Claim::BitProb, &opts).unwrap();
        assert!(r.falsified);
        assert!(r.lines[0].contains("11/16"));
    }

    #[test]
    fn wllc_never_beats_sjsf_per_pair() {
        let c = config(RecodingScheme::Wllc, 2, 48, 400);
        let cmp = compare_costs(&c, 48, RecodingScheme::Wllc, RecodingScheme::Sjsf).unwrap();
        assert_eq!(cmp.samples, 400);
        assert_eq!(cmp.first_cheaper, 0);
        assert!(cmp.witness.is_none());
        let rev = compare_costs(&c, 48, RecodingScheme::Sjsf, RecodingScheme::Wllc).unwrap();
        assert!(rev.first_cheaper > 0);
        assert_eq!(rev.first_cheaper + rev.ties, 400);
    }

    #[test]
    fn total_cost_agrees_with_observation() {
        let table = counting_table(2).unwrap();
        let v = [BigInt::from(1000), BigInt::from(77)];
        let o = observe(RecodingScheme::Sjsf, &v, 10, &table).unwrap();
        assert_eq!(
            total_cost(RecodingScheme::Sjsf, &v, &table).unwrap(),
            o.total_cost()
        );
    }
}
