//! Subcommand dispatch.
//!
//! Exit codes: 0 = all inputs processed, 2 = `certify --require` found no
//! certificate for some input, 1 = an input failed to parse or an option
//! was invalid. Multiple input files are processed concurrently; report
//! order matches input order.

use std::io::Write;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use largo::abelian::{
    abelianisation, nontriviality_evidence, removal_spectrum, surjection_to_z, ZMap,
};
use largo::certify::{certify_with_rules, deficiency_bound, Rule, DEFAULT_RULE_ORDER};
use largo::rewrite::{conjugate_rewrite, delta, normalize_to_t, triangularize};
use largo::words::parse_word;

use crate::format::PresentationDocument;
use crate::report::{self, Report, Timings};

#[derive(Parser, Debug)]
#[command(
    name = "largo",
    version,
    about = "Certify largeness of finitely presented groups with proper-power relators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
pub struct CommonArgs {
    /// Presentation files.
    #[arg(required = true)]
    pub files: Vec<String>,
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
pub enum RewriteMode {
    /// Change the free basis until the exponent matrix is lower-triangular.
    Triangular,
    /// Add a generator `t` mapping to 1 and rewrite every relator to
    /// `t`-exponent-sum zero.
    TZero,
    /// Rewrite relators over the conjugates `t^j a t^-j` (requires `--phi`
    /// naming the `t` generator).
    Conjugate,
}

#[derive(Args, Debug)]
pub struct RewriteArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum)]
    pub mode: RewriteMode,
    /// Weight map, e.g. `t=1,a=0`; unmentioned generators get 0.
    #[arg(long)]
    pub phi: Option<String>,
}

#[derive(Args, Debug)]
pub struct DeltaArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Word expression over the presentation's generators.
    #[arg(long)]
    pub word: String,
    /// Weight map; defaults to the canonical surjection onto Z.
    #[arg(long)]
    pub phi: Option<String>,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Exit with code 2 when no certificate is found.
    #[arg(long)]
    pub require: bool,
    /// Weight map override for the infinite-abelianisation rule.
    #[arg(long)]
    pub phi: Option<String>,
    /// Comma-separated rule order, e.g.
    /// `COR_INF_ABEL,THM_FIN_ABEL_P1,THM_FIN_ABEL_P2,DEFICIENCY_GE_2`.
    #[arg(long, value_delimiter = ',')]
    pub rules: Option<Vec<String>>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Abelianisation structure and the canonical surjection onto Z.
    Abel(CommonArgs),
    /// Abelianisation of every relator-deleted presentation, the set J,
    /// and non-triviality evidence.
    Spectrum(CommonArgs),
    /// Rewrite the presentation.
    Rewrite(RewriteArgs),
    /// Maximum absolute prefix weight of a word.
    Delta(DeltaArgs),
    /// Lower bound for the deficiency of the commutator subgroup.
    Bound(CommonArgs),
    /// Search for a largeness certificate.
    Certify(CertifyArgs),
}

struct FileOutcome {
    text: String,
    code: i32,
}

fn render<P: Serialize>(
    format: Format,
    report: &Report<P>,
    text: impl FnOnce() -> String,
) -> String {
    match format {
        Format::Text => text(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
    }
}

fn error_outcome(format: Format, input: &str, error: String) -> FileOutcome {
    let text = match format {
        Format::Text => format!("{input}: error: {error}\n"),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report::ErrorReport {
                input: input.to_string(),
                error,
            })
            .expect("error report serializes");
            s.push('\n');
            s
        }
    };
    FileOutcome { text, code: 1 }
}

/// Resolves `--phi`: explicit flag if given, otherwise the canonical
/// surjection; errors when the abelianisation is finite and no flag helps.
fn resolve_phi(
    doc: &PresentationDocument,
) -> Result<ZMap, String> {
    match &doc.zmap {
        Some(phi) => Ok(phi.clone()),
        None => surjection_to_z(&doc.presentation)
            .ok_or_else(|| "abelianisation is finite; pass --phi".to_string()),
    }
}

fn timings(parse: Instant, compute: Instant, end: Instant) -> Timings {
    Timings {
        parse_ms: compute.duration_since(parse).as_millis() as u64,
        compute_ms: end.duration_since(compute).as_millis() as u64,
    }
}

fn run_abel(path: &str, format: Format) -> FileOutcome {
    let parse_start = Instant::now();
    let doc = match PresentationDocument::load(path, None) {
        Ok(doc) => doc,
        Err(e) => return error_outcome(format, path, e),
    };
    let compute_start = Instant::now();
    let p = &doc.presentation;
    let ab = abelianisation(p);
    let surjection = surjection_to_z(p);
    let payload = report::abel_payload(&ab, surjection.as_ref(), p);
    let report = Report {
        input: path.to_string(),
        presentation_summary: report::summarize(p),
        payload,
        timings: timings(parse_start, compute_start, Instant::now()),
    };
    let text = render(format, &report, || report::abel_text(&report.payload, path));
    FileOutcome { text, code: 0 }
}

fn run_spectrum(path: &str, format: Format) -> FileOutcome {
    let parse_start = Instant::now();
    let doc = match PresentationDocument::load(path, None) {
        Ok(doc) => doc,
        Err(e) => return error_outcome(format, path, e),
    };
    let compute_start = Instant::now();
    let p = &doc.presentation;
    let records = removal_spectrum(p);
    let evidence = nontriviality_evidence(p);
    let payload = report::spectrum_payload(&records, &evidence);
    let report = Report {
        input: path.to_string(),
        presentation_summary: report::summarize(p),
        payload,
        timings: timings(parse_start, compute_start, Instant::now()),
    };
    let text = render(format, &report, || report::spectrum_text(&report.payload, path));
    FileOutcome { text, code: 0 }
}

fn run_bound(path: &str, format: Format) -> FileOutcome {
    let parse_start = Instant::now();
    let doc = match PresentationDocument::load(path, None) {
        Ok(doc) => doc,
        Err(e) => return error_outcome(format, path, e),
    };
    let compute_start = Instant::now();
    let p = &doc.presentation;
    let bound = match deficiency_bound(p) {
        Ok(b) => b,
        Err(e) => return error_outcome(format, path, e.to_string()),
    };
    let payload = report::bound_payload(&bound);
    let report = Report {
        input: path.to_string(),
        presentation_summary: report::summarize(p),
        payload,
        timings: timings(parse_start, compute_start, Instant::now()),
    };
    let text = render(format, &report, || report::bound_text(&report.payload, path));
    FileOutcome { text, code: 0 }
}

fn run_delta(path: &str, args: &DeltaArgs, format: Format) -> FileOutcome {
    let parse_start = Instant::now();
    let doc = match PresentationDocument::load(path, args.phi.as_deref()) {
        Ok(doc) => doc,
        Err(e) => return error_outcome(format, path, e),
    };
    let p = &doc.presentation;
    let word = match parse_word(&args.word, p.alphabet()) {
        Ok(w) => w,
        Err(e) => return error_outcome(format, path, format!("--word: {e}")),
    };
    let compute_start = Instant::now();
    let phi = match resolve_phi(&doc) {
        Ok(phi) => phi,
        Err(e) => return error_outcome(format, path, e),
    };
    let value = delta(&word, &phi);
    let payload = report::delta_payload(&word, &phi, &value, p);
    let report = Report {
        input: path.to_string(),
        presentation_summary: report::summarize(p),
        payload,
        timings: timings(parse_start, compute_start, Instant::now()),
    };
    let text = render(format, &report, || report::delta_text(&report.payload, path));
    FileOutcome { text, code: 0 }
}

fn run_rewrite(path: &str, args: &RewriteArgs, format: Format) -> FileOutcome {
    let parse_start = Instant::now();
    let doc = match PresentationDocument::load(path, args.phi.as_deref()) {
        Ok(doc) => doc,
        Err(e) => return error_outcome(format, path, e),
    };
    let compute_start = Instant::now();
    let p = &doc.presentation;
    match args.mode {
        RewriteMode::Triangular => {
            let (q, trace) = match triangularize(p) {
                Ok(result) => result,
                Err(e) => return error_outcome(format, path, e.to_string()),
            };
            let payload = report::RewritePayload {
                mode: "triangular".to_string(),
                presentation: q.to_string(),
                dictionaries: report::dictionary_report(&trace, p, &q),
                steps: trace.steps.len(),
            };
            let report = Report {
                input: path.to_string(),
                presentation_summary: report::summarize(p),
                payload,
                timings: timings(parse_start, compute_start, Instant::now()),
            };
            let text = render(format, &report, || report::rewrite_text(&report.payload, path));
            FileOutcome { text, code: 0 }
        }
        RewriteMode::TZero => {
            let phi = match resolve_phi(&doc) {
                Ok(phi) => phi,
                Err(e) => return error_outcome(format, path, e),
            };
            let (q, trace) = match normalize_to_t(p, &phi) {
                Ok(result) => result,
                Err(e) => return error_outcome(format, path, e.to_string()),
            };
            let payload = report::RewritePayload {
                mode: "t-zero".to_string(),
                presentation: q.to_string(),
                dictionaries: report::dictionary_report(&trace, p, &q),
                steps: trace.steps.len(),
            };
            let report = Report {
                input: path.to_string(),
                presentation_summary: report::summarize(p),
                payload,
                timings: timings(parse_start, compute_start, Instant::now()),
            };
            let text = render(format, &report, || report::rewrite_text(&report.payload, path));
            FileOutcome { text, code: 0 }
        }
        RewriteMode::Conjugate => {
            let Some(phi) = doc.zmap.as_ref() else {
                return error_outcome(
                    format,
                    path,
                    "conjugate mode needs --phi naming the stable generator, e.g. t=1".to_string(),
                );
            };
            let mut relators = Vec::new();
            for (i, r) in p.relators().iter().enumerate() {
                match conjugate_rewrite(r.root(), phi) {
                    Ok(cw) => {
                        relators.push(report::conjugate_relator_report(i, r.power(), &cw, p))
                    }
                    Err(e) => {
                        return error_outcome(format, path, format!("relator {}: {e}", i + 1))
                    }
                }
            }
            let payload =
                report::ConjugatePayload { mode: "conjugate".to_string(), relators };
            let report = Report {
                input: path.to_string(),
                presentation_summary: report::summarize(p),
                payload,
                timings: timings(parse_start, compute_start, Instant::now()),
            };
            let text = render(format, &report, || report::conjugate_text(&report.payload, path));
            FileOutcome { text, code: 0 }
        }
    }
}

fn run_certify(path: &str, args: &CertifyArgs, format: Format) -> FileOutcome {
    let parse_start = Instant::now();
    let doc = match PresentationDocument::load(path, args.phi.as_deref()) {
        Ok(doc) => doc,
        Err(e) => return error_outcome(format, path, e),
    };
    let p = &doc.presentation;
    let rules: Vec<Rule> = match &args.rules {
        None => DEFAULT_RULE_ORDER.to_vec(),
        Some(names) => {
            let mut rules = Vec::new();
            for name in names {
                match name.parse() {
                    Ok(rule) => rules.push(rule),
                    Err(()) => {
                        return error_outcome(format, path, format!("unknown rule `{name}`"))
                    }
                }
            }
            rules
        }
    };
    let compute_start = Instant::now();
    let result = match certify_with_rules(p, &rules, doc.zmap.as_ref()) {
        Ok(result) => result,
        Err(e) => return error_outcome(format, path, e.to_string()),
    };
    let code = if result.certificate.is_none() && args.require { 2 } else { 0 };
    let payload = report::certify_payload(&result, p);
    let report = Report {
        input: path.to_string(),
        presentation_summary: report::summarize(p),
        payload,
        timings: timings(parse_start, compute_start, Instant::now()),
    };
    let text = render(format, &report, || report::certify_text(&result, p, path));
    FileOutcome { text, code }
}

fn process_all<F>(files: &[String], process: F) -> Vec<FileOutcome>
where
    F: Fn(&str) -> FileOutcome + Sync,
{
    std::thread::scope(|scope| {
        let handles: Vec<_> = files
            .iter()
            .map(|path| scope.spawn(|| process(path)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    })
}

/// Runs a parsed command line, writing reports to `out`; returns the exit
/// code.
pub fn run(cli: Cli, out: &mut dyn Write) -> i32 {
    let outcomes = match &cli.command {
        Command::Abel(common) => process_all(&common.files, |p| run_abel(p, common.format)),
        Command::Spectrum(common) => {
            process_all(&common.files, |p| run_spectrum(p, common.format))
        }
        Command::Bound(common) => process_all(&common.files, |p| run_bound(p, common.format)),
        Command::Delta(args) => {
            process_all(&args.common.files, |p| run_delta(p, args, args.common.format))
        }
        Command::Rewrite(args) => {
            process_all(&args.common.files, |p| run_rewrite(p, args, args.common.format))
        }
        Command::Certify(args) => {
            process_all(&args.common.files, |p| run_certify(p, args, args.common.format))
        }
    };
    let mut code = 0;
    for outcome in &outcomes {
        let _ = out.write_all(outcome.text.as_bytes());
        code = match (code, outcome.code) {
            (1, _) | (_, 1) => 1,
            (2, _) | (_, 2) => 2,
            _ => code.max(outcome.code),
        };
    }
    code
}
