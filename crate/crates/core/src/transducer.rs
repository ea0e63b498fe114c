//! Right-to-left transducers over binary input and exact Markov-chain
//! analysis of their state sequences under uniform random input bits.
//!
//! States are labelled by carries; a leading `.` marks the one-digit
//! look-ahead (one more digit read than written). All probabilities are
//! exact rationals.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::error::{Error, Result};
use crate::expansions::{Expansion, JointExpansion};

/// One output column: a digit per output row.
pub type Letter = Vec<i8>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateLabel {
    pub carries: Vec<u8>,
    pub lookahead: bool,
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lookahead {
            f.write_str(".")?;
        }
        match self.carries.as_slice() {
            [c] => write!(f, "{c}"),
            cs => {
                let parts: Vec<String> = cs.iter().map(u8::to_string).collect();
                write!(f, "({})", parts.join("|"))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub target: usize,
    pub output: Vec<Letter>,
}

/// A deterministic transducer reading binary digits least significant first.
/// State 0 is initial; `flush` is the output written at end of input.
#[derive(Clone, Debug)]
pub struct Transducer {
    dimension: usize,
    labels: Vec<StateLabel>,
    transitions: Vec<[Transition; 2]>,
    flush: Vec<Vec<Letter>>,
}

/// A node of the transition graph, including the end-of-input sink.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    State(usize),
    Terminal,
}

impl Transducer {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn num_states(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, state: usize) -> &StateLabel {
        &self.labels[state]
    }

    pub fn state_named(&self, name: &str) -> Option<usize> {
        self.labels.iter().position(|l| l.to_string() == name)
    }

    pub fn transition(&self, state: usize, bit: u8) -> &Transition {
        &self.transitions[state][bit as usize]
    }

    pub fn flush(&self, state: usize) -> &[Letter] {
        &self.flush[state]
    }

    /// Runs on `bits` (least significant first) followed by the flush.
    pub fn run(&self, bits: &[u8]) -> JointExpansion {
        let mut state = 0;
        let mut letters: Vec<Letter> = Vec::new();
        for &b in bits {
            let t = self.transition(state, b);
            letters.extend(t.output.iter().cloned());
            state = t.target;
        }
        letters.extend(self.flush(state).iter().cloned());
        let rows = (0..self.dimension)
            .map(|k| Expansion::from_lsb_unchecked(letters.iter().map(|l| l[k]).collect()))
            .collect();
        JointExpansion::new(rows).expect("letters have full dimension")
    }

    /// Runs two transducers in lockstep, the second on `map_input(bit)`.
    /// Only reachable pairs are kept, numbered in breadth-first order with
    /// input 0 explored before input 1.
    pub fn product(&self, other: &Transducer, map_input: impl Fn(u8) -> u8) -> Result<Transducer> {
        let mut index: HashMap<(usize, usize), usize> = HashMap::from([((0, 0), 0)]);
        let mut pairs = vec![(0usize, 0usize)];
        let mut queue = VecDeque::from([(0usize, 0usize)]);
        let mut transitions: Vec<[Transition; 2]> = Vec::new();

        while let Some((a, b)) = queue.pop_front() {
            let mut out = Vec::with_capacity(2);
            for bit in [0u8, 1] {
                let ta = self.transition(a, bit);
                let tb = other.transition(b, map_input(bit));
                if ta.output.len() != tb.output.len() {
                    return Err(Error::Precondition(format!(
                        "transducers write {} and {} letters on the same input",
                        ta.output.len(),
                        tb.output.len()
                    )));
                }
                let pair = (ta.target, tb.target);
                let target = *index.entry(pair).or_insert_with(|| {
                    pairs.push(pair);
                    queue.push_back(pair);
                    pairs.len() - 1
                });
                out.push(Transition {
                    target,
                    output: zip_letters(&ta.output, &tb.output, self.dimension, other.dimension),
                });
            }
            let [t0, t1]: [Transition; 2] = out.try_into().expect("two inputs");
            transitions.push([t0, t1]);
        }

        let labels = pairs
            .iter()
            .map(|&(a, b)| {
                let (la, lb) = (self.label(a), other.label(b));
                StateLabel {
                    carries: la.carries.iter().chain(&lb.carries).copied().collect(),
                    lookahead: la.lookahead,
                }
            })
            .collect();
        let flush = pairs
            .iter()
            .map(|&(a, b)| {
                zip_letters(
                    self.flush(a),
                    other.flush(b),
                    self.dimension,
                    other.dimension,
                )
            })
            .collect();
        Ok(Transducer {
            dimension: self.dimension + other.dimension,
            labels,
            transitions,
            flush,
        })
    }

    /// Merges states with identical behaviour (Moore-style partition
    /// refinement). Surviving states keep their relative order.
    pub fn minimized(&self) -> Transducer {
        let n = self.num_states();
        let mut class: Vec<usize> =
            renumber(&(0..n).map(|s| self.flush(s).to_vec()).collect::<Vec<_>>());
        loop {
            let signature: Vec<_> = (0..n)
                .map(|s| {
                    let t = &self.transitions[s];
                    (
                        class[s],
                        t[0].output.clone(),
                        class[t[0].target],
                        t[1].output.clone(),
                        class[t[1].target],
                    )
                })
                .collect();
            let refined = renumber(&signature);
            let done = refined.iter().max() == class.iter().max();
            class = refined;
            if done {
                break;
            }
        }
        // class ids are assigned in order of first occurrence
        let count = class.iter().max().map_or(0, |m| m + 1);
        let representative: Vec<usize> = (0..count)
            .map(|c| class.iter().position(|&x| x == c).expect("non-empty class"))
            .collect();
        Transducer {
            dimension: self.dimension,
            labels: representative
                .iter()
                .map(|&s| self.labels[s].clone())
                .collect(),
            transitions: representative
                .iter()
                .map(|&s| {
                    self.transitions[s].clone().map(|t| Transition {
                        target: class[t.target],
                        output: t.output,
                    })
                })
                .collect(),
            flush: representative
                .iter()
                .map(|&s| self.flush[s].clone())
                .collect(),
        }
    }

    pub fn all_states_reachable(&self) -> bool {
        let mut seen = vec![false; self.num_states()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(s) = stack.pop() {
            for t in &self.transitions[s] {
                if !seen[t.target] {
                    seen[t.target] = true;
                    stack.push(t.target);
                }
            }
        }
        seen.into_iter().all(|x| x)
    }

    /// Strongly connected components of the transition graph extended by the
    /// terminal sink, listed from the initial state towards the sink.
    pub fn strongly_connected_components(&self) -> Vec<Vec<Node>> {
        let mut graph = DiGraph::<Node, ()>::new();
        let nodes: Vec<_> = (0..self.num_states())
            .map(|s| graph.add_node(Node::State(s)))
            .collect();
        let terminal = graph.add_node(Node::Terminal);
        for (s, ts) in self.transitions.iter().enumerate() {
            for t in ts {
                graph.update_edge(nodes[s], nodes[t.target], ());
            }
            graph.update_edge(nodes[s], terminal, ());
        }
        let mut components: Vec<Vec<Node>> = tarjan_scc(&graph)
            .into_iter()
            .map(|c| {
                let mut members: Vec<Node> = c.into_iter().map(|i| graph[i]).collect();
                members.sort();
                members
            })
            .collect();
        // tarjan_scc yields reverse topological order
        components.reverse();
        components
    }
}

fn renumber<T: Ord + Clone>(keys: &[T]) -> Vec<usize> {
    let mut ids: BTreeMap<T, usize> = BTreeMap::new();
    let mut order = Vec::with_capacity(keys.len());
    for k in keys {
        let next = ids.len();
        order.push(*ids.entry(k.clone()).or_insert(next));
    }
    order
}

// Concatenates letters position by position; the shorter word is padded with
// zero letters at its most significant end.
fn zip_letters(a: &[Letter], b: &[Letter], da: usize, db: usize) -> Vec<Letter> {
    let len = a.len().max(b.len());
    (0..len)
        .map(|i| {
            let left = a.get(i).cloned().unwrap_or_else(|| vec![0; da]);
            let right = b.get(i).cloned().unwrap_or_else(|| vec![0; db]);
            left.into_iter().chain(right).collect()
        })
        .collect()
}

fn label(carry: u8, lookahead: bool) -> StateLabel {
    StateLabel {
        carries: vec![carry],
        lookahead,
    }
}

/// Binary to non-adjacent form, right to left.
///
/// State `.c` holds a pending value `c ∈ {0,1,2}` at the last position read.
/// An even pending value writes 0 and carries half of itself; a pending 1
/// writes `1` or `-1` depending on the next bit.
pub fn naf_transducer() -> Transducer {
    const P0: usize = 1;
    const P1: usize = 2;
    const P2: usize = 3;
    let t = |target: usize, output: &[i8]| Transition {
        target,
        output: output.iter().map(|&d| vec![d]).collect(),
    };
    Transducer {
        dimension: 1,
        labels: vec![
            label(0, false),
            label(0, true),
            label(1, true),
            label(2, true),
        ],
        transitions: vec![
            [t(P0, &[]), t(P1, &[])],
            [t(P0, &[0]), t(P1, &[0])],
            [t(P0, &[1]), t(P2, &[-1])],
            [t(P1, &[0]), t(P2, &[0])],
        ],
        flush: vec![vec![], vec![vec![0]], vec![vec![1]], vec![vec![0], vec![1]]],
    }
}

/// NAF of a binary word and NAF of its ones' complement, computed together.
pub fn double_naf_transducer() -> Transducer {
    let naf = naf_transducer();
    naf.product(&naf, |b| 1 - b)
        .expect("NAF transducer writes in lockstep with itself")
        .minimized()
}

/// Square matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    size: usize,
    entries: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn zeros(size: usize) -> Self {
        RationalMatrix {
            size,
            entries: vec![BigRational::zero(); size * size],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size);
        for i in 0..size {
            m.set(i, i, BigRational::one());
        }
        m
    }

    /// Builds from rows of `(numerator, denominator)` pairs.
    pub fn from_fractions(rows: &[&[(i64, i64)]]) -> Result<Self> {
        let size = rows.len();
        if rows.iter().any(|r| r.len() != size) {
            return Err(Error::Precondition("matrix is not square".into()));
        }
        let entries = rows
            .iter()
            .flat_map(|r| r.iter().map(|&(n, d)| ratio(n, d)))
            .collect();
        Ok(RationalMatrix { size, entries })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.size + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigRational) {
        self.entries[i * self.size + j] = value;
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.entries[i * self.size..(i + 1) * self.size]
    }

    pub fn is_row_stochastic(&self) -> bool {
        (0..self.size).all(|i| {
            let row = self.row(i);
            row.iter().all(|x| !x.is_negative())
                && row
                    .iter()
                    .fold(BigRational::zero(), |acc, x| acc + x)
                    .is_one()
        })
    }

    /// Row vector times matrix.
    pub fn left_multiply(&self, v: &[BigRational]) -> Vec<BigRational> {
        (0..self.size)
            .map(|j| {
                (0..self.size)
                    .filter(|&i| !v[i].is_zero())
                    .fold(BigRational::zero(), |acc, i| acc + &v[i] * self.get(i, j))
            })
            .collect()
    }

    fn support_graph(&self) -> DiGraph<usize, ()> {
        let mut g = DiGraph::new();
        let nodes: Vec<_> = (0..self.size).map(|i| g.add_node(i)).collect();
        for i in 0..self.size {
            for j in 0..self.size {
                if !self.get(i, j).is_zero() {
                    g.add_edge(nodes[i], nodes[j], ());
                }
            }
        }
        g
    }

    /// Communicating classes that no probability leaves.
    pub fn recurrent_classes(&self) -> Vec<Vec<usize>> {
        let g = self.support_graph();
        let mut classes: Vec<Vec<usize>> = tarjan_scc(&g)
            .into_iter()
            .map(|c| {
                let mut v: Vec<usize> = c.into_iter().map(|n| g[n]).collect();
                v.sort_unstable();
                v
            })
            .filter(|class| {
                class.iter().all(|&i| {
                    (0..self.size).all(|j| self.get(i, j).is_zero() || class.contains(&j))
                })
            })
            .collect();
        classes.sort();
        classes
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.size {
            let cells: Vec<String> = self.row(i).iter().map(|x| format!("{x:>4}")).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

pub fn ratio(numerator: i64, denominator: i64) -> BigRational {
    BigRational::new(BigInt::from(numerator), BigInt::from(denominator))
}

/// A probability row vector over states; `step` is `None` for a stationary
/// distribution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateDistribution {
    pub step: Option<usize>,
    pub probabilities: Vec<BigRational>,
}

impl StateDistribution {
    pub fn is_probability_vector(&self) -> bool {
        self.probabilities.iter().all(|p| !p.is_negative())
            && self
                .probabilities
                .iter()
                .fold(BigRational::zero(), |acc, p| acc + p)
                .is_one()
    }
}

/// Entry `(i, j)` is the fraction of the two input digits leading from `i`
/// to `j`.
pub fn transition_matrix(t: &Transducer) -> RationalMatrix {
    let mut m = RationalMatrix::zeros(t.num_states());
    let half = ratio(1, 2);
    for s in 0..t.num_states() {
        for bit in [0, 1] {
            let target = t.transition(s, bit).target;
            let updated = m.get(s, target) + &half;
            m.set(s, target, updated);
        }
    }
    m
}

/// `e_1 P^k`: the distribution after `k` uniform random input digits.
pub fn state_distribution(p: &RationalMatrix, k: usize) -> StateDistribution {
    let mut v = vec![BigRational::zero(); p.size()];
    if !v.is_empty() {
        v[0] = BigRational::one();
    }
    for _ in 0..k {
        v = p.left_multiply(&v);
    }
    StateDistribution {
        step: Some(k),
        probabilities: v,
    }
}

/// The unique `π` with `πP = π`, `Σπ = 1`, supported on the single recurrent
/// class. Fails if there is more than one recurrent class.
pub fn stationary_distribution(p: &RationalMatrix) -> Result<StateDistribution> {
    let classes = p.recurrent_classes();
    let [class] = classes.as_slice() else {
        return Err(Error::Precondition(format!(
            "expected exactly one recurrent class, found {}",
            classes.len()
        )));
    };
    let n = class.len();
    // Unknowns π_c for c in class. Equations: Σ_i π_i (P_ij - δ_ij) = 0 for
    // all but the last j, plus Σ π_i = 1.
    let mut system: Vec<Vec<BigRational>> = (0..n)
        .map(|row| {
            let mut eq: Vec<BigRational> = if row + 1 < n {
                let j = class[row];
                class
                    .iter()
                    .map(|&i| {
                        let delta = if i == j {
                            BigRational::one()
                        } else {
                            BigRational::zero()
                        };
                        p.get(i, j) - delta
                    })
                    .collect()
            } else {
                vec![BigRational::one(); n]
            };
            eq.push(if row + 1 < n {
                BigRational::zero()
            } else {
                BigRational::one()
            });
            eq
        })
        .collect();
    let solution = solve(&mut system)?;
    let mut probabilities = vec![BigRational::zero(); p.size()];
    for (&state, value) in class.iter().zip(solution) {
        probabilities[state] = value;
    }
    Ok(StateDistribution {
        step: None,
        probabilities,
    })
}

// Gauss-Jordan on an augmented n × (n+1) system.
fn solve(system: &mut [Vec<BigRational>]) -> Result<Vec<BigRational>> {
    let n = system.len();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !system[r][col].is_zero())
            .ok_or_else(|| Error::Precondition("singular stationary system".into()))?;
        system.swap(col, pivot);
        let inv = system[col][col].recip();
        for x in system[col].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != col && !system[r][col].is_zero() {
                let factor = system[r][col].clone();
                let pivot_row = system[col].clone();
                for (x, p) in system[r].iter_mut().zip(pivot_row) {
                    *x = &*x - &factor * p;
                }
            }
        }
    }
    Ok(system.iter().map(|row| row[n].clone()).collect())
}

/// Probability that output digit `k` (0-based, least significant first) of
/// output row `row` is zero, for an infinite stream of uniform random input
/// digits.
///
/// Propagates probability mass over (state, digits written) until digit `k`
/// has been written on every path.
pub fn zero_output_probability(t: &Transducer, row: usize, k: usize) -> Result<BigRational> {
    if row >= t.dimension() {
        return Err(Error::Dimension {
            expected: t.dimension(),
            actual: row + 1,
        });
    }
    let half = ratio(1, 2);
    let mut zero = BigRational::zero();
    let mut mass: BTreeMap<(usize, usize), BigRational> =
        BTreeMap::from([((0, 0), BigRational::one())]);
    let step_limit = 2 * k + 2 * t.num_states() + 4;
    for _ in 0..step_limit {
        if mass.is_empty() {
            return Ok(zero);
        }
        let mut next: BTreeMap<(usize, usize), BigRational> = BTreeMap::new();
        for ((state, written), p) in mass {
            let share = &p * &half;
            for bit in [0, 1] {
                let tr = t.transition(state, bit);
                if written + tr.output.len() > k {
                    if tr.output[k - written][row] == 0 {
                        zero += &share;
                    }
                } else {
                    *next
                        .entry((tr.target, written + tr.output.len()))
                        .or_insert_with(BigRational::zero) += &share;
                }
            }
        }
        mass = next;
    }
    Err(Error::Precondition(format!(
        "digit {k} is not written within {step_limit} input digits"
    )))
}

/// `max_{k ≤ max_k} |p_k - 2/3| · 2^k` for the zero-output probabilities of
/// `row`; bounds the geometric convergence of `p_k` to 2/3.
pub fn zero_probability_error_constant(
    t: &Transducer,
    row: usize,
    max_k: usize,
) -> Result<BigRational> {
    let two_thirds = ratio(2, 3);
    let mut worst = BigRational::zero();
    for k in 0..=max_k {
        let p = zero_output_probability(t, row, k)?;
        let scaled = (p - &two_thirds).abs() * BigRational::from_integer(BigInt::from(1) << k);
        if scaled > worst {
            worst = scaled;
        }
    }
    Ok(worst)
}

/// The published transition matrix of the NAF/complement-NAF transducer,
/// states numbered `(0|0), .(0|1), .(1|0), .(0|2), .(2|0), .(1|1)`.
pub fn expected_double_naf_matrix() -> RationalMatrix {
    const O: (i64, i64) = (0, 1);
    const H: (i64, i64) = (1, 2);
    RationalMatrix::from_fractions(&[
        &[O, H, H, O, O, O],
        &[O, O, H, H, O, O],
        &[O, H, O, O, H, O],
        &[O, O, O, H, O, H],
        &[O, O, O, O, H, H],
        &[O, O, O, H, H, O],
    ])
    .expect("square")
}

pub const DOUBLE_NAF_STATE_NAMES: [&str; 6] =
    ["(0|0)", ".(0|1)", ".(1|0)", ".(0|2)", ".(2|0)", ".(1|1)"];

/// Least-significant-first bits of `n` in a word of `len` digits.
pub fn word_bits(n: u64, len: usize) -> Vec<u8> {
    (0..len).map(|i| ((n >> i) & 1) as u8).collect()
}
