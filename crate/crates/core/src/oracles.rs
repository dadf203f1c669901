//! Independent brute-force verifiers and seeded presentation samplers for
//! the test suites.
//!
//! The verifiers deliberately avoid the Smith normal form machinery: coset
//! counting walks `Z^n / rowlattice` by breadth-first closure under
//! generator increments, with visited vectors reduced to canonical
//! representatives modulo a locally computed row-echelon basis of the
//! lattice. Naive and slow on purpose.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::abelian::Presentation;
use crate::matz::IntMatrix;
use crate::words::{
    exponent_vector, free_reduce, Alphabet, GeneratorId, Letter, PowerRelator, Sign, Word,
};

/// Result of a capped brute-force computation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum BruteOrder {
    Known(BigUint),
    /// The computation exceeded its cap; the true value is larger (or the
    /// quotient is infinite).
    Unknown,
}

impl BruteOrder {
    pub fn known(&self) -> Option<&BigUint> {
        match self {
            BruteOrder::Known(n) => Some(n),
            BruteOrder::Unknown => None,
        }
    }
}

/// Integer row-echelon basis of a row lattice, pivots positive, computed by
/// plain gcd elimination. Used only for canonical coset representatives.
struct EchelonBasis {
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

fn leading(row: &[BigInt]) -> Option<usize> {
    row.iter().position(|x| !x.is_zero())
}

fn echelon_basis(m: &IntMatrix) -> EchelonBasis {
    let cols = m.cols();
    let mut working: Vec<Vec<BigInt>> = (0..m.rows())
        .map(|i| m.row(i).to_vec())
        .filter(|r| leading(r).is_some())
        .collect();
    let mut rows = Vec::new();
    let mut pivots = Vec::new();
    for col in 0..cols {
        loop {
            let mut at_col: Vec<usize> = (0..working.len())
                .filter(|&i| leading(&working[i]) == Some(col))
                .collect();
            match at_col.len() {
                0 => break,
                1 => {
                    let mut row = working.remove(at_col[0]);
                    if row[col].is_negative() {
                        for x in &mut row {
                            *x = -core::mem::take(x);
                        }
                    }
                    rows.push(row);
                    pivots.push(col);
                    break;
                }
                _ => {
                    at_col.sort_by(|&a, &b| working[a][col].abs().cmp(&working[b][col].abs()));
                    let pivot = at_col[0];
                    for &i in &at_col[1..] {
                        let q = &working[i][col] / &working[pivot][col];
                        for j in col..cols {
                            let sub = &working[pivot][j] * &q;
                            working[i][j] -= sub;
                        }
                    }
                    working.retain(|r| leading(r).is_some());
                }
            }
        }
    }
    EchelonBasis { rows, pivots }
}

impl EchelonBasis {
    /// Canonical representative of `v` modulo the lattice: each pivot
    /// coordinate lands in `[0, pivot)`. Lattice members reduce to zero.
    fn reduce(&self, mut v: Vec<BigInt>) -> Vec<BigInt> {
        for (row, &col) in self.rows.iter().zip(&self.pivots) {
            let q = v[col].div_floor(&row[col]);
            if !q.is_zero() {
                for j in col..v.len() {
                    let sub = &row[j] * &q;
                    v[j] -= sub;
                }
            }
        }
        v
    }
}

/// Order of `Z^n / rowlattice(M)` by breadth-first coset enumeration,
/// exact when at most `cap` cosets exist.
pub fn brute_abelian_order(m: &IntMatrix, cap: usize) -> BruteOrder {
    let basis = echelon_basis(m);
    let d = m.cols();
    let start = basis.reduce(vec![BigInt::ZERO; d]);
    let mut seen: BTreeSet<Vec<BigInt>> = BTreeSet::new();
    seen.insert(start.clone());
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for j in 0..d {
            for step in [1i64, -1] {
                let mut y = x.clone();
                y[j] += step;
                let y = basis.reduce(y);
                if seen.insert(y.clone()) {
                    if seen.len() > cap {
                        return BruteOrder::Unknown;
                    }
                    queue.push_back(y);
                }
            }
        }
    }
    BruteOrder::Known(BigUint::from(seen.len()))
}

/// Least `k <= cap` with `k * v` in the row lattice of `M`.
pub fn brute_word_order(m: &IntMatrix, v: &[BigInt], cap: u64) -> BruteOrder {
    assert_eq!(v.len(), m.cols());
    let basis = echelon_basis(m);
    let mut acc = vec![BigInt::ZERO; v.len()];
    for k in 1..=cap {
        for (a, b) in acc.iter_mut().zip(v) {
            *a += b;
        }
        if basis.reduce(acc.clone()).iter().all(|x| x.is_zero()) {
            return BruteOrder::Known(BigUint::from(k));
        }
    }
    BruteOrder::Unknown
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SampleError {
    BadSpec(String),
}

impl fmt::Display for SampleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SampleError::BadSpec(why) => write!(f, "bad sample spec: {why}"),
        }
    }
}

impl core::error::Error for SampleError {}

/// Shape parameters for random presentations.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RandomSpec {
    pub generators: usize,
    pub relators: usize,
    /// Inclusive range for relator powers.
    pub min_power: u64,
    pub max_power: u64,
    pub max_root_length: usize,
    /// Force a lower-triangular exponent matrix with nonzero diagonal:
    /// relator `i` only uses generators `0..=i` and mentions generator `i`
    /// with nonzero exponent sum.
    pub triangular: bool,
}

/// Presentation families the sampler can produce.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SampleSpec {
    Random(RandomSpec),
    /// `< a, t | r_1^p, .., r_depth^p >` with `r_1 = [a, t^offset]`,
    /// `r_2 = [r_1, a]` and `r_i = [r_{i-1}, r_{i-2}]` beyond.
    CommutatorFamily { offset: usize, depth: usize, power: u64 },
}

/// Deterministic for a fixed seed.
pub fn sample_presentation(spec: &SampleSpec, seed: u64) -> Result<Presentation, SampleError> {
    match spec {
        SampleSpec::Random(r) => sample_random(r, seed),
        SampleSpec::CommutatorFamily { offset, depth, power } => {
            commutator_family(*offset, *depth, *power)
        }
    }
}

fn random_root(
    rng: &mut ChaCha8Rng,
    allowed: &[usize],
    max_len: usize,
    need_nonzero: Option<usize>,
) -> Word {
    for _ in 0..64 {
        let len = rng.gen_range(1..=max_len);
        let word = free_reduce((0..len).map(|_| {
            Letter::new(
                GeneratorId(allowed[rng.gen_range(0..allowed.len())]),
                if rng.gen_bool(0.5) { Sign::Pos } else { Sign::Neg },
            )
        }));
        if word.is_empty() {
            continue;
        }
        if let Some(g) = need_nonzero {
            if exponent_vector(&word, g + 1)[g].is_zero() {
                continue;
            }
        }
        return word;
    }
    Word::generator(GeneratorId(need_nonzero.unwrap_or(allowed[0])))
}

fn sample_random(spec: &RandomSpec, seed: u64) -> Result<Presentation, SampleError> {
    if spec.generators == 0 {
        return Err(SampleError::BadSpec("need at least one generator".into()));
    }
    if spec.min_power == 0 || spec.min_power > spec.max_power {
        return Err(SampleError::BadSpec("power range is empty or starts at zero".into()));
    }
    if spec.max_root_length == 0 {
        return Err(SampleError::BadSpec("roots must be allowed at least one letter".into()));
    }
    if spec.triangular && spec.relators < spec.generators {
        return Err(SampleError::BadSpec(
            "triangular sampling needs at least as many relators as generators".into(),
        ));
    }
    let d = spec.generators;
    let names: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    let alphabet = Alphabet::new(names).expect("generated names are distinct");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Some seeds avoid one generator entirely, guaranteeing an infinite
    // abelianisation; the rest are unconstrained.
    let missing: Option<usize> = if !spec.triangular && d >= 2 && rng.gen_bool(0.4) {
        Some(rng.gen_range(0..d))
    } else {
        None
    };

    let mut relators = Vec::with_capacity(spec.relators);
    for i in 0..spec.relators {
        let allowed: Vec<usize> = if spec.triangular {
            (0..=i.min(d - 1)).collect()
        } else {
            (0..d).filter(|&g| Some(g) != missing).collect()
        };
        let need_nonzero = (spec.triangular && i < d).then_some(i);
        let root = random_root(&mut rng, &allowed, spec.max_root_length, need_nonzero);
        let power = rng.gen_range(spec.min_power..=spec.max_power);
        relators.push(PowerRelator::from_parts(&root, power).expect("roots are nonempty"));
    }
    Ok(Presentation::from_relators(alphabet, relators).expect("letters are in range"))
}

fn commutator_family(offset: usize, depth: usize, power: u64) -> Result<Presentation, SampleError> {
    if offset == 0 {
        return Err(SampleError::BadSpec("commutator offset must be positive".into()));
    }
    if depth == 0 {
        return Err(SampleError::BadSpec("need at least one relator".into()));
    }
    if power == 0 {
        return Err(SampleError::BadSpec("power must be positive".into()));
    }
    if offset > 1 << 16 {
        return Err(SampleError::BadSpec("commutator offset too large".into()));
    }
    let alphabet = Alphabet::new(["a", "t"]).expect("distinct names");
    let a = Word::generator(GeneratorId(0));
    let t = Word::generator(GeneratorId(1));
    let mut roots = vec![Word::commutator(&a, &t.pow(offset as i64))];
    if depth > 1 {
        roots.push(Word::commutator(&roots[0], &a));
    }
    while roots.len() < depth {
        let n = roots.len();
        let next = Word::commutator(&roots[n - 1], &roots[n - 2]);
        roots.push(next);
    }
    let relators = roots
        .iter()
        .map(|r| PowerRelator::from_parts(r, power).expect("commutators are nonempty"))
        .collect();
    Ok(Presentation::from_relators(alphabet, relators).expect("letters are in range"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::abelianisation;
    use crate::matz::{order_in_quotient, smith_normal_form, Order};
    use num_traits::ToPrimitive;
    use rand::RngCore;

    fn mat(rows: &[&[i64]]) -> IntMatrix {
        let cols = rows.first().map_or(0, |r| r.len());
        IntMatrix::from_rows(
            rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect(),
            cols,
        )
    }

    #[test]
    fn brute_order_examples() {
        let b = brute_abelian_order(&mat(&[&[2, 0], &[0, 3]]), 100);
        assert_eq!(b.known().and_then(|n| n.to_u64()), Some(6));

        // BFS enumerates the residues (0,0), (1,0), (0,1), (1,1).
        let b = brute_abelian_order(&mat(&[&[2, 2], &[0, 2]]), 100);
        assert_eq!(b.known().and_then(|n| n.to_u64()), Some(4));

        let b = brute_abelian_order(&mat(&[&[1]]), 100);
        assert_eq!(b.known().and_then(|n| n.to_u64()), Some(1));

        assert_eq!(brute_abelian_order(&mat(&[&[0, 2]]), 100), BruteOrder::Unknown);
    }

    #[test]
    fn brute_word_order_examples() {
        let m = mat(&[&[2, 0], &[0, 3]]);
        let v = |xs: &[i64]| xs.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        assert_eq!(
            brute_word_order(&m, &v(&[1, 1]), 100).known().and_then(|n| n.to_u64()),
            Some(6)
        );
        assert_eq!(
            brute_word_order(&m, &v(&[0, 0]), 100).known().and_then(|n| n.to_u64()),
            Some(1)
        );
        assert_eq!(brute_word_order(&mat(&[&[3, 3]]), &v(&[1, 0]), 100), BruteOrder::Unknown);
    }

    #[test]
    fn brute_agrees_with_snf_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let r = rng.gen_range(1..=4usize);
            let c = rng.gen_range(1..=4usize);
            let m = IntMatrix::from_fn(r, c, |_, _| BigInt::from(rng.gen_range(-4i64..=4)));
            let snf = smith_normal_form(&m);
            let brute = brute_abelian_order(&m, 10_000);
            if snf.rank == c {
                let order: BigUint = snf.invariant_factors.iter().product();
                if order <= BigUint::from(10_000u32) {
                    assert_eq!(brute.known(), Some(&order), "matrix {m}");
                } else {
                    assert_eq!(brute, BruteOrder::Unknown);
                }
            } else {
                assert_eq!(brute, BruteOrder::Unknown);
            }

            let v: Vec<BigInt> = (0..c).map(|_| BigInt::from(rng.gen_range(-3i64..=3))).collect();
            let fast = order_in_quotient(&m, &v).unwrap();
            match brute_word_order(&m, &v, 10_000) {
                BruteOrder::Known(k) => assert_eq!(fast, Order::Finite(k)),
                BruteOrder::Unknown => match fast {
                    Order::Finite(k) => assert!(k > BigUint::from(10_000u32)),
                    Order::Infinite => {}
                },
            }
        }
    }

    #[test]
    fn sampler_is_deterministic() {
        let spec = SampleSpec::Random(RandomSpec {
            generators: 4,
            relators: 5,
            min_power: 2,
            max_power: 5,
            max_root_length: 6,
            triangular: false,
        });
        let a = sample_presentation(&spec, 7).unwrap();
        let b = sample_presentation(&spec, 7).unwrap();
        assert_eq!(a, b);
        let c = sample_presentation(&spec, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn sampler_triangular_shape() {
        for seed in 0..20 {
            let spec = SampleSpec::Random(RandomSpec {
                generators: 3,
                relators: 3,
                min_power: 2,
                max_power: 5,
                max_root_length: 5,
                triangular: true,
            });
            let p = sample_presentation(&spec, seed).unwrap();
            let m = p.exponent_matrix();
            assert!(m.is_lower_triangular());
            for i in 0..3 {
                assert!(!m[(i, i)].is_zero());
            }
            assert!(abelianisation(&p).is_finite());
        }
    }

    #[test]
    fn sampler_commutator_family() {
        let p = sample_presentation(
            &SampleSpec::CommutatorFamily { offset: 3, depth: 2, power: 5 },
            0,
        )
        .unwrap();
        let a = p.alphabet();
        let r1 = crate::words::parse_word("[a, t^3]", a).unwrap();
        let r2 = crate::words::parse_word("[[a, t^3], a]", a).unwrap();
        assert_eq!(p.relator_count(), 2);
        assert_eq!(p.relators()[0].root(), &r1);
        assert_eq!(p.relators()[0].power(), 5);
        assert_eq!(p.relators()[1].root(), &r2);
        assert_eq!(p.relators()[1].power(), 5);
    }

    #[test]
    fn sampler_rejects_bad_specs() {
        let bad = SampleSpec::Random(RandomSpec {
            generators: 0,
            relators: 1,
            min_power: 2,
            max_power: 5,
            max_root_length: 5,
            triangular: false,
        });
        assert!(sample_presentation(&bad, 0).is_err());
        let bad = SampleSpec::Random(RandomSpec {
            generators: 2,
            relators: 2,
            min_power: 3,
            max_power: 2,
            max_root_length: 5,
            triangular: false,
        });
        assert!(sample_presentation(&bad, 0).is_err());
        assert!(sample_presentation(
            &SampleSpec::CommutatorFamily { offset: 0, depth: 1, power: 2 },
            0
        )
        .is_err());
    }

    #[test]
    fn deficiency_minus_one_sampling_mixes_finiteness() {
        let spec = |d: usize| {
            SampleSpec::Random(RandomSpec {
                generators: d,
                relators: d + 1,
                min_power: 1,
                max_power: 4,
                max_root_length: 6,
                triangular: false,
            })
        };
        let mut finite = 0;
        let mut infinite = 0;
        for seed in 0..60 {
            let p = sample_presentation(&spec(3), seed).unwrap();
            if abelianisation(&p).is_finite() {
                finite += 1;
            } else {
                infinite += 1;
            }
        }
        assert!(finite > 5, "finite cases: {finite}");
        assert!(infinite > 5, "infinite cases: {infinite}");
    }

    #[test]
    fn rng_smoke() {
        // Seeded ChaCha streams are stable across runs.
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let first = rng.next_u64();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(rng.next_u64(), first);
    }
}
