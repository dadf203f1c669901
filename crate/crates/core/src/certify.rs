//! The certificate engine: checks each sufficient condition for largeness
//! on a presentation and emits machine-readable certificates or principled
//! rejections.
//!
//! Every inequality is evaluated in exact rational arithmetic; boundary
//! cases (left-hand side exactly equal to the threshold) reject reliably.
//! A certificate never asserts more than its rule: rejection of every rule
//! is not a claim of non-largeness.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;

use crate::abelian::{
    abelianisation, removal_spectrum, surjection_to_z, word_order, AbelianStructure,
    Presentation, ZMap, ZMapError,
};
use crate::matz::in_row_lattice;
use crate::rewrite::delta;
use crate::words::exponent_vector;

/// Identifier of a certificate rule, as serialized in reports.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum Rule {
    DeficiencyGe2,
    CorInfAbel,
    ThmFinAbelP1,
    ThmFinAbelP2,
}

impl Rule {
    pub const ALL: [Rule; 4] =
        [Rule::DeficiencyGe2, Rule::CorInfAbel, Rule::ThmFinAbelP1, Rule::ThmFinAbelP2];

    pub fn name(self) -> &'static str {
        match self {
            Rule::DeficiencyGe2 => "DEFICIENCY_GE_2",
            Rule::CorInfAbel => "COR_INF_ABEL",
            Rule::ThmFinAbelP1 => "THM_FIN_ABEL_P1",
            Rule::ThmFinAbelP2 => "THM_FIN_ABEL_P2",
        }
    }
}

impl core::str::FromStr for Rule {
    type Err = ();

    fn from_str(s: &str) -> Result<Rule, ()> {
        Rule::ALL.iter().copied().find(|r| r.name().eq_ignore_ascii_case(s)).ok_or(())
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// Rule-specific witness data, sufficient to replay the check offline.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Witnesses {
    /// Raw deficiency `d - s`.
    Deficiency { deficiency: i64 },
    /// Finite-abelianisation rule via the deletion set: `j_set` lists the
    /// 0-based relator indices whose deletion leaves a finite
    /// abelianisation, `l` its cardinality.
    DeletionSet { j_set: Vec<usize>, l: usize },
    /// Finite-abelianisation rule via a commutator image: relator `j`
    /// (0-based) whose full power lies in the commutator subgroup of the
    /// deleted group, with the witness coefficients and the order `k` of
    /// its root there.
    CommutatorImage { j: usize, order: BigUint, lattice_witness: Vec<BigInt> },
    /// Infinite-abelianisation rule: prime `p`, the 0-based indices of
    /// relators whose power `p` does not divide, the surjection used, and
    /// the height bound `K = max delta(relator)`.
    PrimePowers { prime: u64, exempt: Vec<usize>, phi: ZMap, delta_bound: BigUint },
}

/// A largeness certificate: the applied rule, the exact inequality value,
/// and everything needed to re-check it from scratch.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Certificate {
    pub rule: Rule,
    pub inequality_lhs: BigRational,
    /// Always 1; the inequality is strict, so raw deficiency at least 2
    /// appears as `lhs = d - s > 1`.
    pub threshold: BigRational,
    pub witnesses: Witnesses,
    pub abelian_summary: AbelianStructure,
}

fn certificate(
    rule: Rule,
    lhs: BigRational,
    witnesses: Witnesses,
    ab: AbelianStructure,
) -> Certificate {
    let threshold = BigRational::one();
    debug_assert!(lhs > threshold);
    Certificate { rule, inequality_lhs: lhs, threshold, witnesses, abelian_summary: ab }
}

/// Why a rule did not produce a certificate.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Rejection {
    WrongDeficiency { deficiency: i64 },
    TooFewGenerators { generators: usize },
    InfiniteAbelianisation,
    TrivialAbelianisation,
    FiniteAbelianisation,
    InequalityNotSatisfied { lhs: BigRational },
    NoCommutatorImage,
    NoQualifyingPrime { best_prime: u64, best_exempt: usize },
}

impl Rejection {
    pub fn code(&self) -> &'static str {
        match self {
            Rejection::WrongDeficiency { .. } => "WRONG_DEFICIENCY",
            Rejection::TooFewGenerators { .. } => "TOO_FEW_GENERATORS",
            Rejection::InfiniteAbelianisation => "INFINITE_ABELIANISATION",
            Rejection::TrivialAbelianisation => "TRIVIAL_ABELIANISATION",
            Rejection::FiniteAbelianisation => "FINITE_ABELIANISATION",
            Rejection::InequalityNotSatisfied { .. } => "INEQUALITY_NOT_SATISFIED",
            Rejection::NoCommutatorImage => "NO_COMMUTATOR_IMAGE",
            Rejection::NoQualifyingPrime { .. } => "NO_QUALIFYING_PRIME",
        }
    }

    /// The exact rational value of the failing clause, when one exists.
    pub fn value(&self) -> Option<BigRational> {
        match self {
            Rejection::WrongDeficiency { deficiency } => {
                Some(BigRational::from_integer(BigInt::from(*deficiency)))
            }
            Rejection::InequalityNotSatisfied { lhs } => Some(lhs.clone()),
            _ => None,
        }
    }
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::WrongDeficiency { deficiency } => {
                write!(f, "deficiency is {deficiency}, rule requires -1")
            }
            Rejection::TooFewGenerators { generators } => {
                write!(f, "only {generators} generator(s)")
            }
            Rejection::InfiniteAbelianisation => write!(f, "abelianisation is infinite"),
            Rejection::TrivialAbelianisation => write!(f, "abelianisation is trivial"),
            Rejection::FiniteAbelianisation => write!(f, "abelianisation is finite"),
            Rejection::InequalityNotSatisfied { lhs } => {
                write!(f, "inequality fails: {lhs} <= 1")
            }
            Rejection::NoCommutatorImage => {
                write!(f, "no deleted relator's power lies in the commutator subgroup")
            }
            Rejection::NoQualifyingPrime { best_prime, best_exempt } => {
                write!(
                    f,
                    "no prime divides enough powers (best: {best_prime} with {best_exempt} exempt)"
                )
            }
        }
    }
}

/// A rule either certifies or rejects.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Outcome {
    Certified(Certificate),
    Rejected(Rejection),
}

impl Outcome {
    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Outcome::Certified(c) => Some(c),
            Outcome::Rejected(_) => None,
        }
    }
}

/// Precondition violations of the individual checks.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CertifyError {
    WrongDeficiency { deficiency: i64 },
    TooFewGenerators { generators: usize },
    InfiniteAbelianisation,
    InvalidZMap(ZMapError),
}

impl fmt::Display for CertifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertifyError::WrongDeficiency { deficiency } => {
                write!(f, "presentation has deficiency {deficiency}, expected -1")
            }
            CertifyError::TooFewGenerators { generators } => {
                write!(f, "presentation has {generators} generator(s), need at least 2")
            }
            CertifyError::InfiniteAbelianisation => write!(f, "abelianisation is infinite"),
            CertifyError::InvalidZMap(e) => write!(f, "invalid map to Z: {e}"),
        }
    }
}

impl core::error::Error for CertifyError {}

fn rational(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn reciprocal_u64(m: u64) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(m))
}

fn reciprocal_uint(m: &BigUint) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(m.clone()))
}

fn deficiency_guard(p: &Presentation) -> Result<(), CertifyError> {
    if p.deficiency() != -1 {
        return Err(CertifyError::WrongDeficiency { deficiency: p.deficiency() });
    }
    if p.generator_count() < 2 {
        return Err(CertifyError::TooFewGenerators { generators: p.generator_count() });
    }
    Ok(())
}

/// Deficiency minus one, finite non-trivial abelianisation, deletion-count
/// route: certifies when `d - l - sum_{i not in J} 1/m_i > 1` for `J` the
/// set of relators whose deletion leaves a finite abelianisation.
pub fn check_fin_abel_part1(p: &Presentation) -> Result<Outcome, CertifyError> {
    deficiency_guard(p)?;
    let ab = abelianisation(p);
    if !ab.is_finite() {
        return Ok(Outcome::Rejected(Rejection::InfiniteAbelianisation));
    }
    if ab.is_trivial() {
        return Ok(Outcome::Rejected(Rejection::TrivialAbelianisation));
    }
    let spectrum = removal_spectrum(p);
    let j_set: Vec<usize> = spectrum.iter().filter(|r| r.in_j()).map(|r| r.index).collect();
    let l = j_set.len();
    let mut lhs = rational(p.generator_count() as i64) - rational(l as i64);
    for (i, r) in p.relators().iter().enumerate() {
        if !j_set.contains(&i) {
            lhs -= reciprocal_u64(r.power());
        }
    }
    if lhs > BigRational::one() {
        Ok(Outcome::Certified(certificate(
            Rule::ThmFinAbelP1,
            lhs,
            Witnesses::DeletionSet { j_set, l },
            ab,
        )))
    } else {
        Ok(Outcome::Rejected(Rejection::InequalityNotSatisfied { lhs }))
    }
}

/// Deficiency minus one, finite non-trivial abelianisation, commutator-image
/// route: looks for a relator `j` in `J` whose full power maps into the
/// commutator subgroup of the deleted group and certifies when
/// `d - sum_{i != j} 1/m_i - 1/k > 1`, `k` the order of the root of relator
/// `j` in the deleted abelianisation. The smallest qualifying `j` is
/// reported.
pub fn check_fin_abel_part2(p: &Presentation) -> Result<Outcome, CertifyError> {
    deficiency_guard(p)?;
    let ab = abelianisation(p);
    if !ab.is_finite() {
        return Ok(Outcome::Rejected(Rejection::InfiniteAbelianisation));
    }
    if ab.is_trivial() {
        return Ok(Outcome::Rejected(Rejection::TrivialAbelianisation));
    }
    let d = p.generator_count();
    let spectrum = removal_spectrum(p);
    let mut best_miss: Option<BigRational> = None;
    let mut found_image = false;
    for record in spectrum.iter().filter(|r| r.in_j()) {
        let j = record.index;
        let relator = &p.relators()[j];
        let deleted = p.with_relator_removed(j);
        let full_vector: Vec<BigInt> = exponent_vector(relator.root(), d)
            .into_iter()
            .map(|s| s * BigInt::from(relator.power()))
            .collect();
        let witness = in_row_lattice(&deleted.exponent_matrix(), &full_vector)
            .expect("vector length matches generator count");
        let Some(lattice_witness) = witness else {
            continue;
        };
        found_image = true;
        let k = match word_order(&deleted, relator.root()) {
            crate::matz::Order::Finite(k) => k,
            crate::matz::Order::Infinite => unreachable!("deleted abelianisation is finite"),
        };
        let mut lhs = rational(d as i64) - reciprocal_uint(&k);
        for (i, r) in p.relators().iter().enumerate() {
            if i != j {
                lhs -= reciprocal_u64(r.power());
            }
        }
        if lhs > BigRational::one() {
            return Ok(Outcome::Certified(certificate(
                Rule::ThmFinAbelP2,
                lhs,
                Witnesses::CommutatorImage { j, order: k, lattice_witness },
                ab,
            )));
        }
        if best_miss.as_ref().is_none_or(|b| &lhs > b) {
            best_miss = Some(lhs);
        }
    }
    if !found_image {
        Ok(Outcome::Rejected(Rejection::NoCommutatorImage))
    } else {
        Ok(Outcome::Rejected(Rejection::InequalityNotSatisfied {
            lhs: best_miss.expect("at least one qualifying deletion"),
        }))
    }
}

/// Infinite abelianisation route: certifies when some prime fails to divide
/// the powers of at most `n - 2` relators. The smallest qualifying prime is
/// reported along with the exempt relators and the height bound `K` for the
/// surjection used (canonical unless `phi` overrides it).
pub fn check_inf_abel(p: &Presentation, phi: Option<&ZMap>) -> Result<Outcome, CertifyError> {
    if let Some(phi) = phi {
        ZMap::new(p, phi.values().to_vec()).map_err(CertifyError::InvalidZMap)?;
    }
    let n = p.generator_count();
    if n <= 1 {
        return Ok(Outcome::Rejected(Rejection::TooFewGenerators { generators: n }));
    }
    let ab = abelianisation(p);
    if ab.is_finite() {
        return Ok(Outcome::Rejected(Rejection::FiniteAbelianisation));
    }

    let powers: Vec<u64> = p.relators().iter().map(|r| r.power()).collect();
    let mut candidates: BTreeSet<u64> = BTreeSet::new();
    candidates.insert(2);
    for &m in &powers {
        candidates.extend(prime_factors(m));
    }

    let mut best: Option<(usize, u64)> = None;
    for &prime in &candidates {
        let exempt: Vec<usize> =
            (0..powers.len()).filter(|&i| powers[i] % prime != 0).collect();
        if exempt.len() + 2 <= n {
            let map = match phi {
                Some(map) => map.clone(),
                None => surjection_to_z(p).expect("abelianisation is infinite"),
            };
            let delta_bound = p
                .relators()
                .iter()
                .map(|r| delta(&r.expanded(), &map))
                .max()
                .unwrap_or(BigUint::ZERO);
            let lhs = rational((n - exempt.len()) as i64);
            return Ok(Outcome::Certified(certificate(
                Rule::CorInfAbel,
                lhs,
                Witnesses::PrimePowers { prime, exempt, phi: map, delta_bound },
                ab,
            )));
        }
        if best.is_none_or(|(count, _)| exempt.len() < count) {
            best = Some((exempt.len(), prime));
        }
    }
    let (best_exempt, best_prime) = best.expect("candidate set contains 2");
    Ok(Outcome::Rejected(Rejection::NoQualifyingPrime { best_prime, best_exempt }))
}

/// Raw deficiency rule: a presentation of deficiency greater than one
/// defines a large group.
pub fn check_deficiency_ge_2(p: &Presentation) -> Outcome {
    let deficiency = p.deficiency();
    let lhs = rational(deficiency);
    if lhs > BigRational::one() {
        Outcome::Certified(certificate(
            Rule::DeficiencyGe2,
            lhs,
            Witnesses::Deficiency { deficiency },
            abelianisation(p),
        ))
    } else {
        Outcome::Rejected(Rejection::InequalityNotSatisfied { lhs })
    }
}

/// Lower bound for the deficiency of the commutator subgroup, computed from
/// the orders `k_i` of the relator roots in the (finite) abelianisation:
/// `bound = 1 + |ab| * (rdef - 1)` with `rdef = d - sum 1/k_i`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DeficiencyBound {
    /// `|G : H|`, the order of the abelianisation.
    pub index: BigUint,
    pub rdef: BigRational,
    pub bound: BigRational,
    pub orders_used: Vec<BigUint>,
}

pub fn deficiency_bound(p: &Presentation) -> Result<DeficiencyBound, CertifyError> {
    let ab = abelianisation(p);
    let Some(index) = ab.order().finite().cloned() else {
        return Err(CertifyError::InfiniteAbelianisation);
    };
    let orders_used: Vec<BigUint> = p
        .relators()
        .iter()
        .map(|r| match word_order(p, r.root()) {
            crate::matz::Order::Finite(k) => k,
            crate::matz::Order::Infinite => unreachable!("abelianisation is finite"),
        })
        .collect();
    let mut rdef = rational(p.generator_count() as i64);
    for k in &orders_used {
        rdef -= reciprocal_uint(k);
    }
    let bound = BigRational::one()
        + BigRational::from_integer(BigInt::from(index.clone())) * (rdef.clone() - BigRational::one());
    Ok(DeficiencyBound { index, rdef, bound, orders_used })
}

/// Result of trying a sequence of rules.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CertificateReport {
    pub certificate: Option<Certificate>,
    /// Rejections from the rules tried before (or instead of) certifying,
    /// in attempt order.
    pub rejections: Vec<(Rule, Rejection)>,
    pub abelianisation: AbelianStructure,
}

pub const DEFAULT_RULE_ORDER: [Rule; 4] =
    [Rule::DeficiencyGe2, Rule::CorInfAbel, Rule::ThmFinAbelP1, Rule::ThmFinAbelP2];

fn error_to_rejection(e: CertifyError) -> Rejection {
    match e {
        CertifyError::WrongDeficiency { deficiency } => Rejection::WrongDeficiency { deficiency },
        CertifyError::TooFewGenerators { generators } => {
            Rejection::TooFewGenerators { generators }
        }
        CertifyError::InfiniteAbelianisation => Rejection::InfiniteAbelianisation,
        CertifyError::InvalidZMap(_) => unreachable!("validated before rule dispatch"),
    }
}

/// Tries the rules in the given order and returns the first certificate, or
/// every rejection reason. Never claims non-largeness.
pub fn certify_with_rules(
    p: &Presentation,
    rules: &[Rule],
    phi: Option<&ZMap>,
) -> Result<CertificateReport, CertifyError> {
    if let Some(phi) = phi {
        ZMap::new(p, phi.values().to_vec()).map_err(CertifyError::InvalidZMap)?;
    }
    let mut rejections = Vec::new();
    let mut certificate = None;
    for &rule in rules {
        let outcome = match rule {
            Rule::DeficiencyGe2 => Ok(check_deficiency_ge_2(p)),
            Rule::CorInfAbel => check_inf_abel(p, phi),
            Rule::ThmFinAbelP1 => check_fin_abel_part1(p),
            Rule::ThmFinAbelP2 => check_fin_abel_part2(p),
        };
        match outcome {
            Ok(Outcome::Certified(c)) => {
                certificate = Some(c);
                break;
            }
            Ok(Outcome::Rejected(r)) => rejections.push((rule, r)),
            Err(e) => rejections.push((rule, error_to_rejection(e))),
        }
    }
    Ok(CertificateReport { certificate, rejections, abelianisation: abelianisation(p) })
}

/// [`certify_with_rules`] with the default order: cheapest and strongest
/// rules first, the deficiency minus one rules last.
pub fn certify(p: &Presentation) -> CertificateReport {
    certify_with_rules(p, &DEFAULT_RULE_ORDER, None).expect("no override to validate")
}

/// Re-checks a certificate's witnesses from scratch against the analysis
/// modules. Returns a description of the first mismatch, if any.
pub fn verify_certificate(p: &Presentation, cert: &Certificate) -> Result<(), String> {
    use alloc::format;

    if !cert.threshold.is_one() {
        return Err(format!("unexpected threshold {}", cert.threshold));
    }
    if cert.inequality_lhs <= cert.threshold {
        return Err(format!("lhs {} does not exceed threshold", cert.inequality_lhs));
    }
    let ab = abelianisation(p);
    if ab != cert.abelian_summary {
        return Err("abelianisation summary mismatch".into());
    }
    match (&cert.rule, &cert.witnesses) {
        (Rule::DeficiencyGe2, Witnesses::Deficiency { deficiency }) => {
            if *deficiency != p.deficiency() {
                return Err("deficiency mismatch".into());
            }
            if cert.inequality_lhs != rational(*deficiency) {
                return Err("lhs does not equal the deficiency".into());
            }
        }
        (Rule::ThmFinAbelP1, Witnesses::DeletionSet { j_set, l }) => {
            if p.deficiency() != -1 || !ab.is_finite() || ab.is_trivial() {
                return Err("hypotheses do not hold".into());
            }
            let expected = crate::abelian::j_set(p);
            if j_set != &expected || *l != expected.len() {
                return Err("deletion set mismatch".into());
            }
            let mut lhs = rational(p.generator_count() as i64) - rational(*l as i64);
            for (i, r) in p.relators().iter().enumerate() {
                if !j_set.contains(&i) {
                    lhs -= reciprocal_u64(r.power());
                }
            }
            if lhs != cert.inequality_lhs {
                return Err("lhs mismatch".into());
            }
        }
        (Rule::ThmFinAbelP2, Witnesses::CommutatorImage { j, order, lattice_witness }) => {
            if p.deficiency() != -1 || !ab.is_finite() || ab.is_trivial() {
                return Err("hypotheses do not hold".into());
            }
            let relator = &p.relators()[*j];
            let deleted = p.with_relator_removed(*j);
            if !abelianisation(&deleted).is_finite() {
                return Err("witness index is outside the deletion set".into());
            }
            let full_vector: Vec<BigInt> = exponent_vector(relator.root(), p.generator_count())
                .into_iter()
                .map(|s| s * BigInt::from(relator.power()))
                .collect();
            let m = deleted.exponent_matrix();
            let product: Vec<BigInt> = (0..m.cols())
                .map(|c| {
                    lattice_witness
                        .iter()
                        .enumerate()
                        .map(|(r, w)| w * &m[(r, c)])
                        .sum()
                })
                .collect();
            if product != full_vector {
                return Err("lattice witness does not reproduce the relator vector".into());
            }
            if word_order(&deleted, relator.root()) != crate::matz::Order::Finite(order.clone()) {
                return Err("order witness mismatch".into());
            }
            let mut lhs = rational(p.generator_count() as i64) - reciprocal_uint(order);
            for (i, r) in p.relators().iter().enumerate() {
                if i != *j {
                    lhs -= reciprocal_u64(r.power());
                }
            }
            if lhs != cert.inequality_lhs {
                return Err("lhs mismatch".into());
            }
        }
        (Rule::CorInfAbel, Witnesses::PrimePowers { prime, exempt, phi, delta_bound }) => {
            if !is_prime_u64(*prime) {
                return Err(format!("{prime} is not prime"));
            }
            if ab.is_finite() {
                return Err("abelianisation is finite".into());
            }
            if ZMap::new(p, phi.values().to_vec()).is_err() {
                return Err("stored surjection is invalid".into());
            }
            let expected: Vec<usize> = (0..p.relator_count())
                .filter(|&i| p.relators()[i].power() % prime != 0)
                .collect();
            if exempt != &expected {
                return Err("exempt set mismatch".into());
            }
            if exempt.len() + 2 > p.generator_count() {
                return Err("too many exempt relators".into());
            }
            let k = p
                .relators()
                .iter()
                .map(|r| delta(&r.expanded(), phi))
                .max()
                .unwrap_or(BigUint::ZERO);
            if &k != delta_bound {
                return Err("height bound mismatch".into());
            }
            let lhs = rational((p.generator_count() - exempt.len()) as i64);
            if lhs != cert.inequality_lhs {
                return Err("lhs mismatch".into());
            }
        }
        _ => return Err("witness shape does not match the rule".into()),
    }
    Ok(())
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin; the fixed base set decides 64-bit inputs.
pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent-cycle Pollard rho with deterministic parameters; `n` must be
/// composite and odd.
fn pollard_rho(n: u64) -> u64 {
    for c in 1..64 {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = num_integer::gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
    }
    unreachable!("composite 64-bit inputs split within the parameter range")
}

/// Distinct prime divisors: trial division below one million, then
/// Miller-Rabin plus Pollard rho for what remains.
pub(crate) fn prime_factors(mut n: u64) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    if n <= 1 {
        return out;
    }
    let mut p = 2u64;
    while p <= 1_000_000 && p * p <= n {
        if n % p == 0 {
            out.insert(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p = if p == 2 { 3 } else { p + 2 };
    }
    if n == 1 {
        return out;
    }
    let mut stack = alloc::vec![n];
    while let Some(m) = stack.pop() {
        if is_prime_u64(m) {
            out.insert(m);
        } else {
            let f = pollard_rho(m);
            stack.push(f);
            stack.push(m / f);
        }
    }
    out
}
