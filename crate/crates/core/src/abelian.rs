//! Abelianisation analysis of finite presentations.
//!
//! The abelianisation of `< x_1..x_d | u_1^{m_1}.. >` is `Z^d` modulo the
//! row lattice of the exponent-sum matrix of the full relators; everything
//! here reduces to Smith normal form computations on that matrix.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::matz::{order_in_quotient, smith_normal_form, IntMatrix, Order};
use crate::words::{exponent_vector, Alphabet, PowerRelator, Word};

/// A finite presentation: generators plus relators in root/power form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Presentation {
    alphabet: Alphabet,
    relators: Vec<PowerRelator>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum PresentationError {
    /// Relator at this index reduces to the empty word.
    EmptyRelator { index: usize },
    /// Relator at this index uses a generator outside the alphabet.
    GeneratorOutOfRange { index: usize },
}

impl fmt::Display for PresentationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PresentationError::EmptyRelator { index } => {
                write!(f, "relator {} reduces to the empty word", index + 1)
            }
            PresentationError::GeneratorOutOfRange { index } => {
                write!(f, "relator {} references a generator outside the alphabet", index + 1)
            }
        }
    }
}

impl core::error::Error for PresentationError {}

impl Presentation {
    /// Builds a presentation from relator words, extracting each relator's
    /// minimal root and power.
    pub fn new(alphabet: Alphabet, relator_words: &[Word]) -> Result<Presentation, PresentationError> {
        let relators = relator_words
            .iter()
            .enumerate()
            .map(|(index, w)| {
                PowerRelator::new(w).map_err(|_| PresentationError::EmptyRelator { index })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Presentation::from_relators(alphabet, relators)
    }

    pub fn from_relators(
        alphabet: Alphabet,
        relators: Vec<PowerRelator>,
    ) -> Result<Presentation, PresentationError> {
        for (index, r) in relators.iter().enumerate() {
            if let Some(g) = r.root().max_generator() {
                if g.0 >= alphabet.len() {
                    return Err(PresentationError::GeneratorOutOfRange { index });
                }
            }
        }
        Ok(Presentation { alphabet, relators })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn relators(&self) -> &[PowerRelator] {
        &self.relators
    }

    pub fn generator_count(&self) -> usize {
        self.alphabet.len()
    }

    pub fn relator_count(&self) -> usize {
        self.relators.len()
    }

    /// Generators minus relators; derived, never stored.
    pub fn deficiency(&self) -> i64 {
        self.generator_count() as i64 - self.relator_count() as i64
    }

    /// The exponent-sum matrix of the full relators: entry `(i, j)` is
    /// `m_i` times the exponent sum of generator `j` in the i-th root.
    pub fn exponent_matrix(&self) -> IntMatrix {
        let d = self.generator_count();
        IntMatrix::from_rows(
            self.relators
                .iter()
                .map(|r| {
                    exponent_vector(r.root(), d)
                        .into_iter()
                        .map(|s| s * BigInt::from(r.power()))
                        .collect()
                })
                .collect(),
            d,
        )
    }

    /// The presentation with relator `index` deleted.
    pub fn with_relator_removed(&self, index: usize) -> Presentation {
        let mut relators = self.relators.clone();
        relators.remove(index);
        Presentation { alphabet: self.alphabet.clone(), relators }
    }

    /// The presentation with one relator appended.
    pub fn with_relator_appended(
        &self,
        relator: PowerRelator,
    ) -> Result<Presentation, PresentationError> {
        let mut relators = self.relators.clone();
        relators.push(relator);
        Presentation::from_relators(self.alphabet.clone(), relators)
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "< ")?;
        for (i, name) in self.alphabet.names().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{name}")?;
        }
        write!(f, " |")?;
        for (i, r) in self.relators.iter().enumerate() {
            write!(f, "{}", if i > 0 { "," } else { "" })?;
            let root = r.root().display(&self.alphabet);
            if r.power() == 1 {
                write!(f, " {root}")?;
            } else if r.root().len() == 1 && r.root().letters()[0].sign == crate::words::Sign::Pos {
                write!(f, " {root}^{}", r.power())?;
            } else {
                write!(f, " ({root})^{}", r.power())?;
            }
        }
        write!(f, " >")
    }
}

/// Structure of a finitely generated abelian group: invariant factors
/// greater than one, free rank, and the resulting order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AbelianStructure {
    invariant_factors: Vec<BigUint>,
    free_rank: usize,
    order: Order,
}

impl AbelianStructure {
    fn from_matrix(m: &IntMatrix) -> AbelianStructure {
        let snf = smith_normal_form(m);
        let invariant_factors: Vec<BigUint> = snf
            .invariant_factors
            .into_iter()
            .filter(|d| !d.is_one())
            .collect();
        let free_rank = m.cols() - snf.rank;
        let order = if free_rank > 0 {
            Order::Infinite
        } else {
            Order::Finite(invariant_factors.iter().product())
        };
        AbelianStructure { invariant_factors, free_rank, order }
    }

    /// Invariant factors `d_1 | d_2 | ...`, each greater than one.
    pub fn invariant_factors(&self) -> &[BigUint] {
        &self.invariant_factors
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn order(&self) -> &Order {
        &self.order
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty() && self.free_rank == 0
    }
}

impl fmt::Display for AbelianStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "trivial");
        }
        let mut first = true;
        for d in &self.invariant_factors {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "Z/{d}")?;
        }
        match self.free_rank {
            0 => {}
            1 => {
                if !first {
                    write!(f, " + ")?;
                }
                write!(f, "Z")?;
            }
            r => {
                if !first {
                    write!(f, " + ")?;
                }
                write!(f, "Z^{r}")?;
            }
        }
        Ok(())
    }
}

/// Structure of `ab(G)` for the presented group `G`.
pub fn abelianisation(p: &Presentation) -> AbelianStructure {
    AbelianStructure::from_matrix(&p.exponent_matrix())
}

/// Order of the image of `w` in the abelianisation of the presented group.
pub fn word_order(p: &Presentation, w: &Word) -> Order {
    let v = exponent_vector(w, p.generator_count());
    order_in_quotient(&p.exponent_matrix(), &v).expect("vector length matches generator count")
}

/// A surjection onto the integers, given by a weight per generator.
///
/// Valid maps annihilate every relator and have weights of gcd one.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ZMap {
    values: Vec<BigInt>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ZMapError {
    WrongLength { expected: usize, got: usize },
    /// `sum_j values[j] * sigma_j(relator)` is nonzero for this relator.
    NotAnnihilating { relator: usize },
    /// The gcd of the weights is not one.
    NotSurjective,
}

impl fmt::Display for ZMapError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZMapError::WrongLength { expected, got } => {
                write!(f, "expected {expected} weights, got {got}")
            }
            ZMapError::NotAnnihilating { relator } => {
                write!(f, "weights do not annihilate relator {}", relator + 1)
            }
            ZMapError::NotSurjective => write!(f, "weights have gcd != 1"),
        }
    }
}

impl core::error::Error for ZMapError {}

impl ZMap {
    /// Validates the weights against the presentation's relators.
    pub fn new(p: &Presentation, values: Vec<BigInt>) -> Result<ZMap, ZMapError> {
        if values.len() != p.generator_count() {
            return Err(ZMapError::WrongLength {
                expected: p.generator_count(),
                got: values.len(),
            });
        }
        for (i, r) in p.relators().iter().enumerate() {
            let sigma = exponent_vector(r.root(), values.len());
            let dot: BigInt = sigma.iter().zip(&values).map(|(a, b)| a * b).sum();
            if !dot.is_zero() {
                return Err(ZMapError::NotAnnihilating { relator: i });
            }
        }
        let gcd = values.iter().fold(BigInt::ZERO, |acc, v| acc.gcd(v));
        if !gcd.is_one() {
            return Err(ZMapError::NotSurjective);
        }
        Ok(ZMap { values })
    }

    pub fn values(&self) -> &[BigInt] {
        &self.values
    }

    pub fn value_of(&self, g: crate::words::GeneratorId) -> &BigInt {
        &self.values[g.0]
    }

    /// Image of a word: the weighted exponent sum.
    pub fn apply(&self, w: &Word) -> BigInt {
        w.letters()
            .iter()
            .map(|l| &self.values[l.gen.0] * l.sign.signum())
            .sum()
    }
}

/// A surjection of the presented group onto `Z`, or `None` exactly when the
/// abelianisation is finite.
///
/// The map is canonical: the kernel column of the Smith transform `V` with
/// the smallest index, sign-normalized so its first nonzero weight is
/// positive.
pub fn surjection_to_z(p: &Presentation) -> Option<ZMap> {
    let m = p.exponent_matrix();
    let snf = smith_normal_form(&m);
    if snf.rank == m.cols() {
        return None;
    }
    let mut values = snf.v.column(snf.rank);
    if values.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        for v in &mut values {
            *v = -core::mem::take(v);
        }
    }
    let map = ZMap::new(p, values).expect("kernel column of a unimodular transform is a valid map");
    Some(map)
}

/// Abelianisation of one relator-deleted presentation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RemovalRecord {
    /// 0-based index of the deleted relator.
    pub index: usize,
    pub abelianisation: AbelianStructure,
}

impl RemovalRecord {
    /// Whether the deleted presentation has finite abelianisation, i.e. the
    /// index belongs to the deletion set `J`.
    pub fn in_j(&self) -> bool {
        self.abelianisation.is_finite()
    }
}

/// Abelianisation of every `P_i` (presentation with relator `i` deleted).
pub fn removal_spectrum(p: &Presentation) -> Vec<RemovalRecord> {
    (0..p.relator_count())
        .map(|index| RemovalRecord {
            index,
            abelianisation: abelianisation(&p.with_relator_removed(index)),
        })
        .collect()
}

/// Indices (0-based) whose deletion leaves a finite abelianisation.
pub fn j_set(p: &Presentation) -> Vec<usize> {
    removal_spectrum(p).iter().filter(|r| r.in_j()).map(|r| r.index).collect()
}

/// Evidence for non-triviality of the abelianisation.
///
/// The direct verdict always comes from the computed structure. The two
/// sufficient conditions are checked only on deficiency minus one
/// presentations (`s = d + 1`), the shape they are stated for:
///
/// * some deletion `P_i` has infinite abelianisation while `m_i > 1`;
/// * some deletion `P_i` has finite abelianisation and `gcd(m_i, m_j) != 1`
///   for a second relator `j != i`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NontrivialityEvidence {
    pub abelianisation: AbelianStructure,
    /// Witness `i` for the infinite-deletion condition.
    pub infinite_deletion: Option<usize>,
    /// Witness `(i, j)` for the shared-power-factor condition.
    pub shared_power_factor: Option<(usize, usize)>,
}

impl NontrivialityEvidence {
    pub fn nontrivial(&self) -> bool {
        !self.abelianisation.is_trivial()
    }
}

pub fn nontriviality_evidence(p: &Presentation) -> NontrivialityEvidence {
    let ab = abelianisation(p);
    let mut infinite_deletion = None;
    let mut shared_power_factor = None;
    if p.deficiency() == -1 {
        let spectrum = removal_spectrum(p);
        infinite_deletion = spectrum
            .iter()
            .find(|r| !r.in_j() && p.relators()[r.index].power() > 1)
            .map(|r| r.index);
        'outer: for r in &spectrum {
            if !r.in_j() {
                continue;
            }
            let mi = p.relators()[r.index].power();
            for (j, other) in p.relators().iter().enumerate() {
                if j != r.index && mi.gcd(&other.power()) != 1 {
                    shared_power_factor = Some((r.index, j));
                    break 'outer;
                }
            }
        }
    }
    NontrivialityEvidence { abelianisation: ab, infinite_deletion, shared_power_factor }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::words::parse_word;
    use alloc::vec;
    use num_traits::ToPrimitive;

    pub(crate) fn pres(names: &[&str], relators: &[&str]) -> Presentation {
        let alphabet = Alphabet::new(names.iter().copied()).unwrap();
        let words: Vec<Word> =
            relators.iter().map(|r| parse_word(r, &alphabet).unwrap()).collect();
        Presentation::new(alphabet, &words).unwrap()
    }

    fn order_u64(ab: &AbelianStructure) -> Option<u64> {
        ab.order().finite().map(|n| n.to_u64().unwrap())
    }

    #[test]
    fn abelianisation_examples() {
        let p = pres(&["x", "y"], &["x^2", "y^3"]);
        let ab = abelianisation(&p);
        assert_eq!(ab.invariant_factors(), &[BigUint::from(6u32)]);
        assert_eq!(ab.free_rank(), 0);
        assert_eq!(order_u64(&ab), Some(6));

        let p = pres(&["a", "t"], &["a^2"]);
        let ab = abelianisation(&p);
        assert_eq!(ab.invariant_factors(), &[BigUint::from(2u32)]);
        assert_eq!(ab.free_rank(), 1);
        assert_eq!(ab.order(), &Order::Infinite);
    }

    #[test]
    fn trivial_structure() {
        let p = pres(&["x"], &["x"]);
        let ab = abelianisation(&p);
        assert!(ab.is_trivial());
        assert_eq!(order_u64(&ab), Some(1));
    }

    #[test]
    fn presentation_rejects_empty_relator() {
        let alphabet = Alphabet::new(["x"]).unwrap();
        let w = parse_word("x x^-1", &alphabet).unwrap();
        assert!(matches!(
            Presentation::new(alphabet, &[w]),
            Err(PresentationError::EmptyRelator { index: 0 })
        ));
    }

    #[test]
    fn word_order_examples() {
        let p = pres(&["x", "y"], &["x^2", "y^3"]);
        let a = p.alphabet().clone();
        let w = parse_word("x y", &a).unwrap();
        assert_eq!(word_order(&p, &w), Order::Finite(6u32.into()));
        assert_eq!(word_order(&p, &Word::empty()), Order::Finite(1u32.into()));

        let p = pres(&["x", "y", "z"], &["x^3", "y^3", "z^3"]);
        let a = p.alphabet().clone();
        let w = parse_word("x", &a).unwrap();
        assert_eq!(word_order(&p, &w), Order::Finite(3u32.into()));
        // Brute force k = 1..3: only k = 3 lands in the lattice.
        for k in 1..3 {
            assert!(word_order(&p, &w.pow(k)).finite() != Some(&BigUint::one()));
        }
    }

    #[test]
    fn surjection_examples() {
        let p = pres(&["a", "t"], &["a^2"]);
        let phi = surjection_to_z(&p).unwrap();
        assert_eq!(phi.values(), &[BigInt::ZERO, BigInt::one()]);

        let p = pres(&["x", "y"], &["x^2", "y^3"]);
        assert!(surjection_to_z(&p).is_none());

        let p = pres(&["x", "y"], &["(x y)^3"]);
        let phi = surjection_to_z(&p).unwrap();
        assert_eq!(phi.values(), &[BigInt::one(), BigInt::from(-1)]);
    }

    #[test]
    fn zmap_validation() {
        let p = pres(&["x", "y"], &["(x y)^3"]);
        assert!(ZMap::new(&p, vec![BigInt::one(), BigInt::from(-1)]).is_ok());
        assert!(matches!(
            ZMap::new(&p, vec![BigInt::one(), BigInt::one()]),
            Err(ZMapError::NotAnnihilating { relator: 0 })
        ));
        assert!(matches!(
            ZMap::new(&p, vec![BigInt::from(2), BigInt::from(-2)]),
            Err(ZMapError::NotSurjective)
        ));
        assert!(matches!(
            ZMap::new(&p, vec![BigInt::one()]),
            Err(ZMapError::WrongLength { .. })
        ));
    }

    /// First Example-1 style family: `< x_1..x_{2n} | (x1 x2)^{m1}, x2^{m2},
    /// .., (x_{2n-1} x_{2n})^{m_{2n-1}}, x_{2n}^{m_{2n}}, u^alpha >` with
    /// `u = x2 x4 .. x_{2n}`.
    pub(crate) fn chained_pairs(n: usize, odd_powers: &[u64], even_power: u64, alpha: u64) -> Presentation {
        let names: Vec<alloc::string::String> =
            (1..=2 * n).map(|i| alloc::format!("x{i}")).collect();
        let alphabet = Alphabet::new(names).unwrap();
        let gen = |i: usize| Word::generator(crate::words::GeneratorId(i));
        let mut relators = Vec::new();
        for i in 0..n {
            let pair = gen(2 * i).concat(&gen(2 * i + 1));
            relators.push(PowerRelator::from_parts(&pair, odd_powers[i]).unwrap());
            relators.push(PowerRelator::from_parts(&gen(2 * i + 1), even_power).unwrap());
        }
        let mut u = Word::empty();
        for i in 0..n {
            u = u.concat(&gen(2 * i + 1));
        }
        relators.push(PowerRelator::from_parts(&u, alpha).unwrap());
        Presentation::from_relators(alphabet, relators).unwrap()
    }

    #[test]
    fn chained_pairs_n2_structure() {
        let p = chained_pairs(2, &[2, 2], 2, 2);
        let ab = abelianisation(&p);
        assert!(ab.is_finite());
        assert_eq!(order_u64(&ab), Some(16));
        // Deleting the first relator frees a generator.
        let removed = abelianisation(&p.with_relator_removed(0));
        assert!(removed.free_rank() >= 1);
    }

    #[test]
    fn removal_spectrum_examples() {
        // 1-based J = {2,4,5} for the n = 2 family.
        let p = chained_pairs(2, &[2, 2], 2, 2);
        assert_eq!(j_set(&p), vec![1, 3, 4]);

        let p = pres(&["x", "y"], &["x^2", "y^3"]);
        assert!(j_set(&p).is_empty());

        // 1-based J = {2,4,6,8,10,11} for n = 5.
        let p = chained_pairs(5, &[2, 2, 2, 2, 2], 2, 2);
        assert_eq!(j_set(&p), vec![1, 3, 5, 7, 9, 10]);
    }

    #[test]
    fn evidence_examples() {
        let p = chained_pairs(2, &[2, 2], 2, 2);
        let ev = nontriviality_evidence(&p);
        assert_eq!(ev.infinite_deletion, Some(0));
        assert!(ev.nontrivial());

        let p = pres(&["x"], &["x"]);
        let ev = nontriviality_evidence(&p);
        assert!(!ev.nontrivial());
        assert_eq!(ev.infinite_deletion, None);
        assert_eq!(ev.shared_power_factor, None);

        let p = pres(&["x", "y", "z"], &["x^6", "y^6", "z^6", "(x y z)^4"]);
        let ev = nontriviality_evidence(&p);
        assert!(ev.shared_power_factor.is_some());
        assert!(ev.nontrivial());
    }

    #[test]
    fn evidence_never_contradicts_the_direct_verdict() {
        use crate::oracles::{sample_presentation, RandomSpec, SampleSpec};
        for seed in 0..80 {
            let d = 2 + (seed % 3) as usize;
            let spec = SampleSpec::Random(RandomSpec {
                generators: d,
                relators: d + 1,
                min_power: 1,
                max_power: 4,
                max_root_length: 5,
                triangular: false,
            });
            let p = sample_presentation(&spec, seed).unwrap();
            let ev = nontriviality_evidence(&p);
            if ev.infinite_deletion.is_some() || ev.shared_power_factor.is_some() {
                assert!(ev.nontrivial(), "seed {seed}: evidence fired on a trivial quotient");
            }
            if let Some(i) = ev.infinite_deletion {
                assert!(!abelianisation(&p.with_relator_removed(i)).is_finite());
                assert!(p.relators()[i].power() > 1);
            }
            if let Some((i, j)) = ev.shared_power_factor {
                assert!(abelianisation(&p.with_relator_removed(i)).is_finite());
                assert!(p.relators()[i].power().gcd(&p.relators()[j].power()) > 1);
            }
        }
    }

    #[test]
    fn display_formats() {
        let p = pres(&["x", "y"], &["x^2", "(x y)^3", "x y^-1"]);
        assert_eq!(alloc::format!("{p}"), "< x, y | x^2, (x y)^3, x y^-1 >");
        let ab = abelianisation(&pres(&["x", "y"], &["x^2", "y^3"]));
        assert_eq!(alloc::format!("{ab}"), "Z/6");
        let ab = abelianisation(&pres(&["a", "t"], &["a^2"]));
        assert_eq!(alloc::format!("{ab}"), "Z/2 + Z");
    }
}
