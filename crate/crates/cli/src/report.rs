//! Report structures shared between the JSON and text output formats.
//!
//! JSON reports are schema-stable: every certificate report carries the
//! rule name, the exact inequality as a `num/den` string, and the full
//! witness record needed to replay the check offline. Relator and
//! generator indices are 1-based in reports. Rationals are serialized as
//! decimal strings, never floats.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use largo::abelian::{AbelianStructure, NontrivialityEvidence, Presentation, RemovalRecord, ZMap};
use largo::certify::{Certificate, CertificateReport, DeficiencyBound, Rejection, Rule, Witnesses};
use largo::rewrite::{ConjugateWord, RewriteTrace};
use largo::words::Word;

#[derive(Serialize)]
pub struct Report<P: Serialize> {
    pub input: String,
    pub presentation_summary: PresentationSummary,
    #[serde(flatten)]
    pub payload: P,
    pub timings: Timings,
}

#[derive(Serialize)]
pub struct Timings {
    pub parse_ms: u64,
    pub compute_ms: u64,
}

#[derive(Serialize)]
pub struct PresentationSummary {
    pub generators: Vec<String>,
    pub relators: Vec<RelatorSummary>,
    pub deficiency: i64,
}

#[derive(Serialize)]
pub struct RelatorSummary {
    pub root: String,
    pub power: u64,
}

pub fn summarize(p: &Presentation) -> PresentationSummary {
    PresentationSummary {
        generators: p.alphabet().names().map(str::to_string).collect(),
        relators: p
            .relators()
            .iter()
            .map(|r| RelatorSummary {
                root: r.root().display(p.alphabet()).to_string(),
                power: r.power(),
            })
            .collect(),
        deficiency: p.deficiency(),
    }
}

#[derive(Serialize)]
pub struct AbelianReport {
    /// Invariant factors greater than one, as decimal strings.
    pub invariant_factors: Vec<String>,
    pub free_rank: usize,
    /// Decimal order, or `"infinite"`.
    pub order: String,
    /// Human-readable structure, e.g. `Z/2 + Z/6 + Z`.
    pub structure: String,
}

pub fn abelian_report(ab: &AbelianStructure) -> AbelianReport {
    AbelianReport {
        invariant_factors: ab.invariant_factors().iter().map(|d| d.to_string()).collect(),
        free_rank: ab.free_rank(),
        order: ab.order().to_string(),
        structure: ab.to_string(),
    }
}

fn zmap_report(phi: &ZMap, p: &Presentation) -> BTreeMap<String, String> {
    p.alphabet()
        .ids()
        .map(|g| (p.alphabet().name(g).to_string(), phi.value_of(g).to_string()))
        .collect()
}

fn one_based(indices: &[usize]) -> Vec<usize> {
    indices.iter().map(|i| i + 1).collect()
}

#[derive(Serialize)]
pub struct WitnessReport {
    pub inequality_lhs: String,
    pub threshold: String,
    pub abelian_summary: AbelianReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deficiency: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j_set: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lattice_witness: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prime: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exempt: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<BTreeMap<String, String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_bound: Option<String>,
}

pub fn witness_report(cert: &Certificate, p: &Presentation) -> WitnessReport {
    let mut report = WitnessReport {
        inequality_lhs: cert.inequality_lhs.to_string(),
        threshold: cert.threshold.to_string(),
        abelian_summary: abelian_report(&cert.abelian_summary),
        deficiency: None,
        j_set: None,
        l: None,
        j: None,
        order: None,
        lattice_witness: None,
        prime: None,
        exempt: None,
        phi: None,
        delta_bound: None,
    };
    match &cert.witnesses {
        Witnesses::Deficiency { deficiency } => report.deficiency = Some(*deficiency),
        Witnesses::DeletionSet { j_set, l } => {
            report.j_set = Some(one_based(j_set));
            report.l = Some(*l);
        }
        Witnesses::CommutatorImage { j, order, lattice_witness } => {
            report.j = Some(j + 1);
            report.order = Some(order.to_string());
            report.lattice_witness =
                Some(lattice_witness.iter().map(|c| c.to_string()).collect());
        }
        Witnesses::PrimePowers { prime, exempt, phi, delta_bound } => {
            report.prime = Some(*prime);
            report.exempt = Some(one_based(exempt));
            report.phi = Some(zmap_report(phi, p));
            report.delta_bound = Some(delta_bound.to_string());
        }
    }
    report
}

#[derive(Serialize)]
pub struct RejectionReport {
    pub rule: String,
    pub reason: String,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
}

pub fn rejection_report(rule: Rule, rejection: &Rejection) -> RejectionReport {
    RejectionReport {
        rule: rule.name().to_string(),
        reason: rejection.code().to_string(),
        detail: rejection.to_string(),
        value: rejection.value().map(|v| v.to_string()),
    }
}

#[derive(Serialize)]
pub struct CertifyPayload {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<WitnessReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rejections: Option<Vec<RejectionReport>>,
    pub abelianisation: AbelianReport,
}

pub fn certify_payload(report: &CertificateReport, p: &Presentation) -> CertifyPayload {
    CertifyPayload {
        rule: report.certificate.as_ref().map(|c| c.rule.name().to_string()),
        witnesses: report.certificate.as_ref().map(|c| witness_report(c, p)),
        rejections: if report.certificate.is_some() {
            None
        } else {
            Some(report.rejections.iter().map(|(r, why)| rejection_report(*r, why)).collect())
        },
        abelianisation: abelian_report(&report.abelianisation),
    }
}

pub fn certify_text(report: &CertificateReport, p: &Presentation, input: &str) -> String {
    let mut out = String::new();
    match &report.certificate {
        Some(cert) => {
            let _ = writeln!(
                out,
                "{input}: certificate {} ({} > {})",
                cert.rule.name(),
                cert.inequality_lhs,
                cert.threshold
            );
            let _ = writeln!(out, "  abelianisation: {}", cert.abelian_summary);
            match &cert.witnesses {
                Witnesses::Deficiency { deficiency } => {
                    let _ = writeln!(out, "  deficiency: {deficiency}");
                }
                Witnesses::DeletionSet { j_set, l } => {
                    let _ = writeln!(out, "  J = {:?}, l = {l}", one_based(j_set));
                }
                Witnesses::CommutatorImage { j, order, .. } => {
                    let _ = writeln!(out, "  j = {}, order k = {order}", j + 1);
                }
                Witnesses::PrimePowers { prime, exempt, delta_bound, .. } => {
                    let _ = writeln!(
                        out,
                        "  prime = {prime}, exempt = {:?}, height bound K = {delta_bound}",
                        one_based(exempt)
                    );
                }
            }
        }
        None => {
            let _ = writeln!(out, "{input}: no certificate");
            for (rule, why) in &report.rejections {
                let _ = writeln!(out, "  {}: {}", rule.name(), why);
            }
        }
    }
    let _ = writeln!(out, "  presentation: {p}");
    out
}

#[derive(Serialize)]
pub struct AbelPayload {
    pub abelianisation: AbelianReport,
    pub nontrivial: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surjection: Option<BTreeMap<String, String>>,
}

pub fn abel_payload(
    ab: &AbelianStructure,
    surjection: Option<&ZMap>,
    p: &Presentation,
) -> AbelPayload {
    AbelPayload {
        abelianisation: abelian_report(ab),
        nontrivial: !ab.is_trivial(),
        surjection: surjection.map(|phi| zmap_report(phi, p)),
    }
}

pub fn abel_text(payload: &AbelPayload, input: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{input}: {} (order {})",
        payload.abelianisation.structure, payload.abelianisation.order
    );
    if let Some(phi) = &payload.surjection {
        let parts: Vec<String> = phi.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(out, "  surjection onto Z: {}", parts.join(", "));
    }
    out
}

#[derive(Serialize)]
pub struct SpectrumRecord {
    pub index: usize,
    pub abelianisation: AbelianReport,
    pub in_j: bool,
}

#[derive(Serialize)]
pub struct EvidenceReport {
    pub nontrivial: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub infinite_deletion: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shared_power_factor: Option<(usize, usize)>,
}

#[derive(Serialize)]
pub struct SpectrumPayload {
    pub records: Vec<SpectrumRecord>,
    pub j_set: Vec<usize>,
    pub l: usize,
    pub evidence: EvidenceReport,
}

pub fn spectrum_payload(
    records: &[RemovalRecord],
    evidence: &NontrivialityEvidence,
) -> SpectrumPayload {
    let j_set: Vec<usize> =
        records.iter().filter(|r| r.in_j()).map(|r| r.index + 1).collect();
    SpectrumPayload {
        records: records
            .iter()
            .map(|r| SpectrumRecord {
                index: r.index + 1,
                abelianisation: abelian_report(&r.abelianisation),
                in_j: r.in_j(),
            })
            .collect(),
        l: j_set.len(),
        j_set,
        evidence: EvidenceReport {
            nontrivial: evidence.nontrivial(),
            infinite_deletion: evidence.infinite_deletion.map(|i| i + 1),
            shared_power_factor: evidence.shared_power_factor.map(|(i, j)| (i + 1, j + 1)),
        },
    }
}

pub fn spectrum_text(payload: &SpectrumPayload, input: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{input}: J = {:?}, l = {}", payload.j_set, payload.l);
    for r in &payload.records {
        let _ = writeln!(
            out,
            "  delete {}: {} (order {}){}",
            r.index,
            r.abelianisation.structure,
            r.abelianisation.order,
            if r.in_j { "  [in J]" } else { "" }
        );
    }
    let _ = writeln!(
        out,
        "  abelianisation nontrivial: {}{}{}",
        payload.evidence.nontrivial,
        payload
            .evidence
            .infinite_deletion
            .map(|i| format!("; infinite deletion witness: relator {i}"))
            .unwrap_or_default(),
        payload
            .evidence
            .shared_power_factor
            .map(|(i, j)| format!("; shared power factor: relators {i}, {j}"))
            .unwrap_or_default()
    );
    out
}

#[derive(Serialize)]
pub struct BoundPayload {
    pub index: String,
    pub rdef: String,
    pub bound: String,
    pub orders_used: Vec<String>,
}

pub fn bound_payload(b: &DeficiencyBound) -> BoundPayload {
    BoundPayload {
        index: b.index.to_string(),
        rdef: b.rdef.to_string(),
        bound: b.bound.to_string(),
        orders_used: b.orders_used.iter().map(|k| k.to_string()).collect(),
    }
}

pub fn bound_text(payload: &BoundPayload, input: &str) -> String {
    format!(
        "{input}: commutator subgroup deficiency >= {} (index {}, rdef {}, orders {:?})\n",
        payload.bound, payload.index, payload.rdef, payload.orders_used
    )
}

#[derive(Serialize)]
pub struct DeltaPayload {
    pub word: String,
    pub phi: BTreeMap<String, String>,
    pub delta: String,
}

pub fn delta_payload(word: &Word, phi: &ZMap, value: &largo::BigUint, p: &Presentation) -> DeltaPayload {
    DeltaPayload {
        word: word.display(p.alphabet()).to_string(),
        phi: zmap_report(phi, p),
        delta: value.to_string(),
    }
}

pub fn delta_text(payload: &DeltaPayload, input: &str) -> String {
    format!("{input}: delta({}) = {}\n", payload.word, payload.delta)
}

#[derive(Serialize)]
pub struct DictionaryReport {
    pub forward: BTreeMap<String, String>,
    pub backward: BTreeMap<String, String>,
}

pub fn dictionary_report(
    trace: &RewriteTrace,
    source: &Presentation,
    target: &Presentation,
) -> DictionaryReport {
    let forward = source
        .alphabet()
        .ids()
        .map(|g| {
            (
                source.alphabet().name(g).to_string(),
                trace.forward[g.0].display(target.alphabet()).to_string(),
            )
        })
        .collect();
    let backward = target
        .alphabet()
        .ids()
        .map(|g| {
            (
                target.alphabet().name(g).to_string(),
                trace.backward[g.0].display(source.alphabet()).to_string(),
            )
        })
        .collect();
    DictionaryReport { forward, backward }
}

#[derive(Serialize)]
pub struct RewritePayload {
    pub mode: String,
    pub presentation: String,
    pub dictionaries: DictionaryReport,
    pub steps: usize,
}

pub fn rewrite_text(payload: &RewritePayload, input: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{input}: {}", payload.presentation);
    for (k, v) in &payload.dictionaries.forward {
        let _ = writeln!(out, "  {k} -> {v}");
    }
    for (k, v) in &payload.dictionaries.backward {
        let _ = writeln!(out, "  {k} <- {v}");
    }
    out
}

#[derive(Serialize)]
pub struct ConjugateLetterReport {
    pub gen: String,
    pub height: i64,
    pub sign: i64,
}

#[derive(Serialize)]
pub struct ConjugateRelatorReport {
    pub index: usize,
    pub power: u64,
    pub letters: Vec<ConjugateLetterReport>,
    pub text: String,
    pub max_height: u64,
}

#[derive(Serialize)]
pub struct ConjugatePayload {
    pub mode: String,
    pub relators: Vec<ConjugateRelatorReport>,
}

pub fn conjugate_relator_report(
    index: usize,
    power: u64,
    cw: &ConjugateWord,
    p: &Presentation,
) -> ConjugateRelatorReport {
    let letters: Vec<ConjugateLetterReport> = cw
        .letters()
        .iter()
        .map(|l| ConjugateLetterReport {
            gen: p.alphabet().name(l.gen).to_string(),
            height: l.height,
            sign: l.sign.signum(),
        })
        .collect();
    let text = letters
        .iter()
        .map(|l| {
            let suffix = if l.sign < 0 { "^-1" } else { "" };
            format!("{}@{}{}", l.gen, l.height, suffix)
        })
        .collect::<Vec<_>>()
        .join(" ");
    ConjugateRelatorReport { index: index + 1, power, letters, text, max_height: cw.max_height() }
}

pub fn conjugate_text(payload: &ConjugatePayload, input: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{input}: relators over conjugated generators");
    for r in &payload.relators {
        let _ = writeln!(
            out,
            "  {}: ({})^{} (max height {})",
            r.index,
            if r.text.is_empty() { "1" } else { &r.text },
            r.power,
            r.max_height
        );
    }
    out
}

#[derive(Serialize)]
pub struct ErrorReport {
    pub input: String,
    pub error: String,
}
