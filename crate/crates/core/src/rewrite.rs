//! Constructive presentation transformations.
//!
//! * [`triangularize`] replays the column Hermite reduction of the exponent
//!   matrix as a chain of elementary generator substitutions, producing an
//!   isomorphic presentation whose exponent matrix is lower-triangular.
//! * [`normalize_to_t`] converts a presentation of a group surjecting onto
//!   `Z` into one with generators `y_1..y_d, t` in which every relator has
//!   `t`-exponent-sum zero, adding one relator that ties `t` to a word of
//!   weight one.
//! * [`delta`] measures the maximum absolute prefix weight of a word; it
//!   bounds the conjugation heights needed by [`conjugate_rewrite`], which
//!   rewrites a zero-`t`-sum word over the conjugates `t^j a_i t^-j`.
//!
//! Every transformation returns a [`RewriteTrace`] whose steps replay the
//! rewriting on the input presentation and whose dictionaries translate
//! words between the two generator sets.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::abelian::{Presentation, ZMap, ZMapError};
use crate::matz::{column_hermite, ColumnOp};
use crate::words::{
    exponent_vector, substitute, Alphabet, GeneratorId, Letter, PowerRelator, Sign, Word,
};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RewriteError {
    InvalidZMap(ZMapError),
    /// A weight is too large to materialize as a word.
    WeightOverflow,
    /// The word has nonzero `t`-exponent-sum.
    NonzeroTSum,
    /// The map is not of the shape `t -> 1`, all other generators `-> 0`.
    NotTIndicator,
    /// A trace step does not apply to the presentation it was replayed on.
    MalformedTrace,
}

impl fmt::Display for RewriteError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RewriteError::InvalidZMap(e) => write!(f, "invalid map to Z: {e}"),
            RewriteError::WeightOverflow => write!(f, "weight too large to materialize"),
            RewriteError::NonzeroTSum => write!(f, "word has nonzero t-exponent-sum"),
            RewriteError::NotTIndicator => {
                write!(f, "map must send one generator to 1 and the rest to 0")
            }
            RewriteError::MalformedTrace => write!(f, "trace does not apply to this presentation"),
        }
    }
}

impl core::error::Error for RewriteError {}

/// One elementary presentation move.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RewriteStep {
    /// Replace generator `i` by `images[i]` in every relator root, keeping
    /// powers; the resulting presentation lives on `alphabet`.
    SubstituteGenerators { alphabet: Alphabet, images: Vec<Word> },
    /// Append one relator.
    AppendRelator(PowerRelator),
}

/// A replayable witness of a presentation transformation.
///
/// `forward` expresses each input generator as a word over the output
/// generators; `backward` expresses each output generator over the input
/// generators. Substituting `forward` then `backward` returns every input
/// generator to itself up to free reduction.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RewriteTrace {
    pub steps: Vec<RewriteStep>,
    pub forward: Vec<Word>,
    pub backward: Vec<Word>,
}

fn substitute_presentation(
    p: &Presentation,
    alphabet: Alphabet,
    images: &[Word],
) -> Result<Presentation, RewriteError> {
    let relators = p
        .relators()
        .iter()
        .map(|r| {
            let root = substitute(r.root(), images).map_err(|_| RewriteError::MalformedTrace)?;
            PowerRelator::from_parts(&root, r.power()).map_err(|_| RewriteError::MalformedTrace)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Presentation::from_relators(alphabet, relators).map_err(|_| RewriteError::MalformedTrace)
}

impl RewriteTrace {
    /// Applies the recorded steps to a presentation.
    pub fn replay(&self, p: &Presentation) -> Result<Presentation, RewriteError> {
        let mut current = p.clone();
        for step in &self.steps {
            current = match step {
                RewriteStep::SubstituteGenerators { alphabet, images } => {
                    substitute_presentation(&current, alphabet.clone(), images)?
                }
                RewriteStep::AppendRelator(r) => current
                    .with_relator_appended(r.clone())
                    .map_err(|_| RewriteError::MalformedTrace)?,
            };
        }
        Ok(current)
    }
}

fn identity_images(d: usize) -> Vec<Word> {
    (0..d).map(|i| Word::generator(GeneratorId(i))).collect()
}

fn small(value: &BigInt) -> Result<i64, RewriteError> {
    value.to_i64().ok_or(RewriteError::WeightOverflow)
}

/// The Nielsen substitution realizing one elementary column operation, and
/// its inverse. `AddMultiple { src: j, dst: k, factor: c }` on columns
/// corresponds to `x_j -> x_j x_k^c`.
fn substitution_for(op: &ColumnOp, d: usize) -> Result<(Vec<Word>, Vec<Word>), RewriteError> {
    let mut images = identity_images(d);
    let mut inverses = identity_images(d);
    match op {
        ColumnOp::Swap(a, b) => {
            images.swap(*a, *b);
            inverses.swap(*a, *b);
        }
        ColumnOp::Negate(a) => {
            images[*a] = Word::generator(GeneratorId(*a)).inverse();
            inverses[*a] = images[*a].clone();
        }
        ColumnOp::AddMultiple { src, dst, factor } => {
            let c = small(factor)?;
            let base = Word::generator(GeneratorId(*src));
            let shift = Word::generator(GeneratorId(*dst));
            images[*src] = base.concat(&shift.pow(c));
            inverses[*src] = base.concat(&shift.pow(-c));
        }
    }
    Ok((images, inverses))
}

/// Rewrites the presentation over a new free basis so that its exponent
/// matrix is lower-triangular, preserving every relator power.
///
/// Each elementary column operation of the Hermite reduction is replayed as
/// a basis substitution on relator roots, so the output presents an
/// isomorphic group and the trace witnesses the equivalence. Presentations
/// whose exponent matrix is already lower-triangular are returned unchanged
/// with an empty trace.
pub fn triangularize(p: &Presentation) -> Result<(Presentation, RewriteTrace), RewriteError> {
    let d = p.generator_count();
    let hermite = column_hermite(&p.exponent_matrix());
    let alphabet = p.alphabet().clone();
    let mut forward = identity_images(d);
    let mut backward = identity_images(d);
    let mut current = p.clone();
    let mut steps = Vec::new();
    for op in &hermite.ops {
        let (images, inverses) = substitution_for(op, d)?;
        current = substitute_presentation(&current, alphabet.clone(), &images)?;
        forward = forward
            .iter()
            .map(|w| substitute(w, &images).expect("total image map"))
            .collect();
        backward = inverses
            .iter()
            .map(|w| substitute(w, &backward).expect("total image map"))
            .collect();
        steps.push(RewriteStep::SubstituteGenerators { alphabet: alphabet.clone(), images });
    }
    debug_assert_eq!(current.exponent_matrix(), hermite.h);
    Ok((current, RewriteTrace { steps, forward, backward }))
}

/// A word of weight exactly one under the map: the extended-gcd combination
/// of the generators with nonzero weight, in ascending generator order.
fn unit_weight_word(phi: &ZMap) -> Result<Word, RewriteError> {
    let mut g = BigInt::ZERO;
    let mut coeffs: Vec<(usize, BigInt)> = Vec::new();
    for (i, v) in phi.values().iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        if g.magnitude().is_one() {
            // Earlier generators already combine to a unit.
            break;
        }
        if g.is_zero() {
            g = v.clone();
            coeffs.push((i, BigInt::one()));
        } else {
            let eg = g.extended_gcd(v);
            for (_, c) in &mut coeffs {
                *c *= &eg.x;
            }
            coeffs.push((i, eg.y));
            g = eg.gcd;
        }
    }
    if g == BigInt::from(-1) {
        for (_, c) in &mut coeffs {
            *c = -core::mem::take(c);
        }
    }
    let mut w = Word::empty();
    for (i, c) in coeffs {
        let e = small(&c)?;
        w = w.concat(&Word::generator(GeneratorId(i)).pow(e));
    }
    debug_assert!(phi.apply(&w).is_one());
    Ok(w)
}

/// Rewrites `P` into `Q = < y_1..y_d, t | r_1..r_{s+1} >` where the induced
/// map sends `t` to 1 and every `y_i` to 0, so every relator of `Q` has
/// `t`-exponent-sum zero.
///
/// Each generator is replaced via `x_i -> y_i t^{phi(x_i)}`; the extra
/// relator identifies `t` with the chosen weight-one word. An `m`-th power
/// relator of `P` stays an `m`-th power relator of `Q`, and the invariant
/// factors of the abelianisation are untouched.
pub fn normalize_to_t(
    p: &Presentation,
    phi: &ZMap,
) -> Result<(Presentation, RewriteTrace), RewriteError> {
    ZMap::new(p, phi.values().to_vec()).map_err(RewriteError::InvalidZMap)?;
    let d = p.generator_count();
    let t_word = unit_weight_word(phi)?;

    let mut names: Vec<String> = (1..=d).map(|i| format!("y{i}")).collect();
    names.push("t".into());
    let alphabet = Alphabet::new(names).expect("generated names are distinct");
    let t = GeneratorId(d);

    let mut forward = Vec::with_capacity(d);
    for i in 0..d {
        let e = small(&phi.values()[i])?;
        forward.push(Word::generator(GeneratorId(i)).concat(&Word::generator(t).pow(e)));
    }

    let mut q = substitute_presentation(p, alphabet, &forward)?;
    let extra_word =
        substitute(&t_word, &forward).expect("total image map").concat(&Word::generator(t).pow(-1));
    let extra = PowerRelator::new(&extra_word).expect("t-relator has nonzero y-exponent sums");
    q = q.with_relator_appended(extra.clone()).map_err(|_| RewriteError::MalformedTrace)?;

    let mut backward = Vec::with_capacity(d + 1);
    for i in 0..d {
        let e = small(&phi.values()[i])?;
        backward.push(Word::generator(GeneratorId(i)).concat(&t_word.pow(-e)));
    }
    backward.push(t_word);

    debug_assert!(q
        .relators()
        .iter()
        .all(|r| exponent_vector(r.root(), d + 1)[d].is_zero()));

    let steps = vec![
        RewriteStep::SubstituteGenerators { alphabet: q.alphabet().clone(), images: forward.clone() },
        RewriteStep::AppendRelator(extra),
    ];
    Ok((q, RewriteTrace { steps, forward, backward }))
}

/// Maximum absolute prefix sum of letter weights along a raw letter
/// sequence.
pub fn delta_letters<'a, I: IntoIterator<Item = &'a Letter>>(letters: I, phi: &ZMap) -> BigUint {
    let mut acc = BigInt::ZERO;
    let mut max = BigUint::ZERO;
    for l in letters {
        acc += phi.value_of(l.gen) * l.sign.signum();
        if acc.magnitude() > &max {
            max = acc.magnitude().clone();
        }
    }
    max
}

/// Maximum absolute prefix sum of the weights `phi(gen) * sign` over all
/// prefixes of `w`.
///
/// Prefix maxima at letter and syllable granularity coincide, since the sum
/// moves monotonically inside a syllable.
pub fn delta(w: &Word, phi: &ZMap) -> BigUint {
    delta_letters(w.letters(), phi)
}

/// A letter of a conjugate rewriting: generator `gen` conjugated to height
/// `height`, i.e. `t^height gen^sign t^-height`.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub struct ConjugateLetter {
    pub gen: GeneratorId,
    pub height: i64,
    pub sign: Sign,
}

/// A word rewritten over the conjugates `t^j a_i t^-j` of the non-`t`
/// generators.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConjugateWord {
    t: GeneratorId,
    letters: Vec<ConjugateLetter>,
}

impl ConjugateWord {
    pub fn t(&self) -> GeneratorId {
        self.t
    }

    pub fn letters(&self) -> &[ConjugateLetter] {
        &self.letters
    }

    pub fn max_height(&self) -> u64 {
        self.letters.iter().map(|l| l.height.unsigned_abs()).max().unwrap_or(0)
    }

    /// Expands every conjugate letter back to `t^j g t^-j` and reduces,
    /// recovering the source word.
    pub fn expand(&self) -> Word {
        let t = Word::generator(self.t);
        let mut out = Word::empty();
        for l in &self.letters {
            let mid = Word::letter(Letter::new(l.gen, l.sign));
            out = out.concat(&t.pow(l.height)).concat(&mid).concat(&t.pow(-l.height));
        }
        out
    }
}

/// Index of the unique generator of weight 1 when all other weights are 0.
fn t_indicator(phi: &ZMap) -> Option<GeneratorId> {
    let mut t = None;
    for (i, v) in phi.values().iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        if !v.is_one() || t.is_some() {
            return None;
        }
        t = Some(GeneratorId(i));
    }
    t
}

/// Rewrites a word with `t`-exponent-sum zero over the conjugates
/// `a_{i,j} = t^j a_i t^-j`: scanning left to right with the running
/// `t`-height `c`, each non-`t` letter emits `(gen, c, sign)`.
///
/// Every height satisfies `|c| <= delta(word, phi)` and the final height is
/// zero.
pub fn conjugate_rewrite(word: &Word, phi: &ZMap) -> Result<ConjugateWord, RewriteError> {
    let t = t_indicator(phi).ok_or(RewriteError::NotTIndicator)?;
    let mut height: i64 = 0;
    let mut letters = Vec::new();
    for l in word.letters() {
        if l.gen == t {
            height += l.sign.signum();
        } else {
            letters.push(ConjugateLetter { gen: l.gen, height, sign: l.sign });
        }
    }
    if height != 0 {
        return Err(RewriteError::NonzeroTSum);
    }
    Ok(ConjugateWord { t, letters })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::{abelianisation, surjection_to_z, tests::pres};
    use crate::words::parse_word;

    fn zmap(p: &Presentation, values: &[i64]) -> ZMap {
        ZMap::new(p, values.iter().map(|&v| BigInt::from(v)).collect()).unwrap()
    }

    #[test]
    fn triangularize_single_column_move() {
        let p = pres(&["x", "y"], &["x y", "y"]);
        let (q, trace) = triangularize(&p).unwrap();
        assert_eq!(q, pres(&["x", "y"], &["x", "y"]));
        assert!(q.exponent_matrix().is_lower_triangular());
        // New basis: b1 = x y, b2 = y.
        let a = p.alphabet();
        assert_eq!(trace.backward[0], parse_word("x y", a).unwrap());
        assert_eq!(trace.backward[1], parse_word("y", a).unwrap());
        assert_eq!(trace.replay(&p).unwrap(), q);
        assert_eq!(
            abelianisation(&p).invariant_factors(),
            abelianisation(&q).invariant_factors()
        );
    }

    #[test]
    fn triangularize_fixpoint() {
        let p = pres(&["x", "y"], &["x^3", "x y^2"]);
        assert!(p.exponent_matrix().is_lower_triangular());
        let (q, trace) = triangularize(&p).unwrap();
        assert_eq!(q, p);
        assert!(trace.steps.is_empty());
    }

    #[test]
    fn triangularize_preserves_powers() {
        let p = pres(&["x", "y"], &["(x y^2)^3", "y^2"]);
        let (q, trace) = triangularize(&p).unwrap();
        assert!(q.exponent_matrix().is_lower_triangular());
        let powers: Vec<u64> = q.relators().iter().map(|r| r.power()).collect();
        assert_eq!(powers, vec![3, 2]);
        assert_eq!(trace.replay(&p).unwrap(), q);
        assert_eq!(
            abelianisation(&p).invariant_factors(),
            abelianisation(&q).invariant_factors()
        );
        // Dictionaries are mutually inverse free-group maps.
        for i in 0..2 {
            let there = substitute(&trace.forward[i], &trace.backward).unwrap();
            assert_eq!(there, Word::generator(GeneratorId(i)));
            let back = substitute(&trace.backward[i], &trace.forward).unwrap();
            assert_eq!(back, Word::generator(GeneratorId(i)));
        }
    }

    #[test]
    fn normalize_square_example() {
        let p = pres(&["x", "y"], &["(x y)^2"]);
        let phi = zmap(&p, &[1, -1]);
        let (q, trace) = normalize_to_t(&p, &phi).unwrap();
        assert_eq!(q, pres(&["y1", "y2", "t"], &["(y1 t y2 t^-1)^2", "y1"]));
        assert_eq!(q.relators()[0].power(), 2);
        // sigma_t = 0 on every relator.
        for r in q.relators() {
            assert!(exponent_vector(r.root(), 3)[2].is_zero());
        }
        // Old-side round trip through the dictionaries.
        for i in 0..2 {
            let back = substitute(&trace.forward[i], &trace.backward).unwrap();
            assert_eq!(back, Word::generator(GeneratorId(i)));
        }
        assert_eq!(trace.replay(&p).unwrap(), q);
    }

    #[test]
    fn normalize_when_t_is_a_generator() {
        let p = pres(&["a", "t0"], &["a^2"]);
        let phi = zmap(&p, &[0, 1]);
        let (q, _) = normalize_to_t(&p, &phi).unwrap();
        assert_eq!(q, pres(&["y1", "y2", "t"], &["y1^2", "y2"]));
        assert_eq!(q.relators()[0].power(), 2);
    }

    #[test]
    fn normalize_rejects_foreign_map() {
        let p = pres(&["x", "y"], &["(x y)^2"]);
        let q = pres(&["x", "y"], &["x^2"]);
        let phi = zmap(&q, &[0, 1]);
        assert!(matches!(
            normalize_to_t(&p, &phi),
            Err(RewriteError::InvalidZMap(_))
        ));
    }

    #[test]
    fn delta_examples() {
        let p = pres(&["a", "t"], &[]);
        let phi = zmap(&p, &[0, 1]);
        let a = p.alphabet();

        let w = parse_word("[a, t^3]", a).unwrap();
        assert_eq!(delta(&w, &phi), BigUint::from(3u32));

        assert_eq!(delta(&Word::empty(), &phi), BigUint::ZERO);

        let w = parse_word("t^5", a).unwrap();
        assert_eq!(delta(&w, &phi), BigUint::from(5u32));
    }

    #[test]
    fn conjugate_examples() {
        let p = pres(&["a", "t"], &[]);
        let phi = zmap(&p, &[0, 1]);
        let a = p.alphabet();

        let r = parse_word("t a t^-1 a^-1", a).unwrap();
        let cw = conjugate_rewrite(&r, &phi).unwrap();
        let ls = cw.letters();
        assert_eq!(ls.len(), 2);
        assert_eq!((ls[0].gen, ls[0].height, ls[0].sign), (GeneratorId(0), 1, Sign::Pos));
        assert_eq!((ls[1].gen, ls[1].height, ls[1].sign), (GeneratorId(0), 0, Sign::Neg));
        assert_eq!(cw.expand(), r);

        let r = parse_word("a", a).unwrap();
        let cw = conjugate_rewrite(&r, &phi).unwrap();
        assert_eq!((cw.letters()[0].height, cw.letters().len()), (0, 1));

        let r = parse_word("[a, t^2]", a).unwrap();
        let cw = conjugate_rewrite(&r, &phi).unwrap();
        assert_eq!(cw.letters().len(), 2);
        assert_eq!((cw.letters()[0].gen, cw.letters()[0].height), (GeneratorId(0), 0));
        assert_eq!((cw.letters()[1].gen, cw.letters()[1].height), (GeneratorId(0), 2));
        assert_eq!(cw.expand(), r);
        assert_eq!(BigUint::from(cw.max_height()), delta(&r, &phi));

        let r = parse_word("t a", a).unwrap();
        assert!(matches!(conjugate_rewrite(&r, &phi), Err(RewriteError::NonzeroTSum)));

        let q = pres(&["a", "t"], &[]);
        let bad = zmap(&q, &[1, 1]);
        assert!(matches!(conjugate_rewrite(&Word::empty(), &bad), Err(RewriteError::NotTIndicator)));
    }

    #[test]
    fn conjugate_roundtrip_on_random_words() {
        use num_traits::Signed;
        use rand::{Rng, SeedableRng};
        let p = pres(&["a", "b", "t"], &[]);
        let phi = zmap(&p, &[0, 0, 1]);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let len = rng.gen_range(0..24);
            let mut w = crate::words::free_reduce((0..len).map(|_| {
                crate::words::Letter::new(
                    GeneratorId(rng.gen_range(0..3)),
                    if rng.gen_bool(0.5) { Sign::Pos } else { Sign::Neg },
                )
            }));
            // Cancel the t-exponent sum so the word is rewritable.
            let t_sum = exponent_vector(&w, 3)[2].clone();
            let shift = -t_sum.to_i64().unwrap();
            w = w.concat(&Word::generator(GeneratorId(2)).pow(shift));
            assert!(exponent_vector(&w, 3)[2].abs().is_zero());

            let cw = conjugate_rewrite(&w, &phi).unwrap();
            assert_eq!(cw.expand(), w);
            assert_eq!(BigUint::from(cw.max_height()), delta(&w, &phi));
        }
    }

    #[test]
    fn normalize_random_properties() {
        // A light version of the acceptance pipeline: the property suite in
        // tests/acceptance.rs runs 200 seeds.
        let p = pres(&["x", "y", "z"], &["(x y^-1)^2", "[x, z]^3"]);
        let phi = surjection_to_z(&p).unwrap();
        let (q, trace) = normalize_to_t(&p, &phi).unwrap();
        let d = p.generator_count();
        for r in q.relators() {
            assert!(exponent_vector(r.root(), d + 1)[d].is_zero());
        }
        let p_powers: Vec<u64> = p.relators().iter().map(|r| r.power()).collect();
        let q_powers: Vec<u64> = q.relators()[..p.relator_count()].iter().map(|r| r.power()).collect();
        assert_eq!(p_powers, q_powers);
        assert_eq!(
            abelianisation(&p).invariant_factors(),
            abelianisation(&q).invariant_factors()
        );
        assert_eq!(abelianisation(&p).free_rank(), abelianisation(&q).free_rank());
        assert_eq!(trace.replay(&p).unwrap(), q);
    }
}
