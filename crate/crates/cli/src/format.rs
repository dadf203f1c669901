//! The presentation file format.
//!
//! ```text
//! presentation := '<' gens '|' relators '>'
//! gens         := name (',' name)*
//! relators     := word (',' word)*        # may be empty
//! ```
//!
//! Words follow the grammar of `largo::words`; `#` begins a line comment.
//! Printing a presentation and parsing it back yields the same generators
//! and the same reduced relators.

use std::fmt;
use std::str::FromStr;

use largo::abelian::{Presentation, PresentationError, ZMap, ZMapError};
use largo::words::{parse_word, Alphabet, AlphabetError, Word, WordError};
use largo::BigInt;

/// A parse error with 1-based line/column context.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FormatError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for FormatError {}

/// Source text with comments stripped and a byte-offset to line/column map.
struct Cleaned {
    text: String,
    positions: Vec<(usize, usize)>,
}

impl Cleaned {
    fn new(source: &str) -> Cleaned {
        let mut text = String::with_capacity(source.len());
        let mut positions = Vec::with_capacity(source.len());
        for (line_no, line) in source.lines().enumerate() {
            let visible = match line.find('#') {
                Some(i) => &line[..i],
                None => line,
            };
            for (col, c) in visible.char_indices() {
                text.push(c);
                positions.push((line_no + 1, col + 1));
            }
            text.push('\n');
            positions.push((line_no + 1, visible.len() + 1));
        }
        Cleaned { text, positions }
    }

    fn error(&self, offset: usize, message: String) -> FormatError {
        let (line, column) = self
            .positions
            .get(offset.min(self.positions.len().saturating_sub(1)))
            .copied()
            .unwrap_or((1, 1));
        FormatError { line, column, message }
    }
}

fn word_error_message(e: &WordError) -> String {
    match e {
        WordError::Parse { message, .. } => message.clone(),
        WordError::UnknownGenerator { name, .. } => format!("unknown generator `{name}`"),
        other => other.to_string(),
    }
}

fn word_error_offset(e: &WordError) -> usize {
    match e {
        WordError::Parse { pos, .. } | WordError::UnknownGenerator { pos, .. } => *pos,
        _ => 0,
    }
}

/// Splits on commas that are not nested inside `(..)` or `[..]`, returning
/// `(offset, chunk)` pairs.
fn split_top_level(text: &str, base: usize) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in text.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                out.push((base + start, &text[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push((base + start, &text[start..]));
    out
}

/// Parses a presentation document.
pub fn parse_presentation(source: &str) -> Result<Presentation, FormatError> {
    let cleaned = Cleaned::new(source);
    let text = cleaned.text.as_str();

    let open = text
        .find(|c: char| !c.is_whitespace())
        .filter(|&i| text[i..].starts_with('<'))
        .ok_or_else(|| cleaned.error(0, "expected `<` to open the presentation".into()))?;
    let close = text
        .rfind('>')
        .ok_or_else(|| cleaned.error(text.len(), "expected `>` to close the presentation".into()))?;
    if let Some(extra) = text[close + 1..].find(|c: char| !c.is_whitespace()) {
        return Err(cleaned.error(close + 1 + extra, "unexpected text after `>`".into()));
    }
    let inner = &text[open + 1..close];
    let bar = inner
        .find('|')
        .ok_or_else(|| cleaned.error(open + 1, "expected `|` between generators and relators".into()))?;

    // Generators.
    let mut names = Vec::new();
    for (offset, chunk) in split_top_level(&inner[..bar], open + 1) {
        let name = chunk.trim();
        if name.is_empty() {
            return Err(cleaned.error(offset, "empty generator name".into()));
        }
        names.push((offset + chunk.len() - chunk.trim_start().len(), name.to_string()));
    }
    let alphabet = Alphabet::new(names.iter().map(|(_, n)| n.clone())).map_err(|e| {
        let message = match &e {
            AlphabetError::InvalidName(n) => format!("invalid generator name `{n}`"),
            AlphabetError::DuplicateName(n) => format!("duplicate generator name `{n}`"),
        };
        let offender = match &e {
            AlphabetError::InvalidName(n) | AlphabetError::DuplicateName(n) => n,
        };
        let offset = names
            .iter()
            .rev()
            .find(|(_, name)| name == offender)
            .map(|(o, _)| *o)
            .unwrap_or(open + 1);
        cleaned.error(offset, message)
    })?;

    // Relators; the section may be empty.
    let relator_base = open + 1 + bar + 1;
    let relator_text = &inner[bar + 1..];
    let mut words: Vec<Word> = Vec::new();
    let mut offsets: Vec<usize> = Vec::new();
    if !relator_text.trim().is_empty() {
        for (offset, chunk) in split_top_level(relator_text, relator_base) {
            if chunk.trim().is_empty() {
                return Err(cleaned.error(offset, "empty relator".into()));
            }
            let word = parse_word(chunk, &alphabet)
                .map_err(|e| cleaned.error(offset + word_error_offset(&e), word_error_message(&e)))?;
            offsets.push(offset);
            words.push(word);
        }
    }

    Presentation::new(alphabet, &words).map_err(|e| match e {
        PresentationError::EmptyRelator { index } => cleaned.error(
            offsets[index],
            format!("relator {} reduces to the empty word", index + 1),
        ),
        PresentationError::GeneratorOutOfRange { index } => cleaned.error(
            offsets.get(index).copied().unwrap_or(open),
            format!("relator {} references an unknown generator", index + 1),
        ),
    })
}

/// Prints a presentation in the file grammar; `parse_presentation` of the
/// result reproduces the input exactly.
pub fn print_presentation(p: &Presentation) -> String {
    p.to_string()
}

/// Parses a weight assignment such as `t=1,a=0` and validates it as a map
/// onto the integers. Generators not mentioned get weight zero.
pub fn parse_zmap(text: &str, p: &Presentation) -> Result<ZMap, String> {
    let mut values = vec![BigInt::ZERO; p.generator_count()];
    let mut assigned = vec![false; p.generator_count()];
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| format!("expected `name=value`, found `{part}`"))?;
        let name = name.trim();
        let gen = p
            .alphabet()
            .id_of(name)
            .ok_or_else(|| format!("unknown generator `{name}`"))?;
        if assigned[gen.0] {
            return Err(format!("generator `{name}` assigned twice"));
        }
        assigned[gen.0] = true;
        values[gen.0] = BigInt::from_str(value.trim())
            .map_err(|_| format!("invalid integer `{}`", value.trim()))?;
    }
    ZMap::new(p, values).map_err(|e| match e {
        ZMapError::NotAnnihilating { relator } => {
            format!("weights do not annihilate relator {}", relator + 1)
        }
        other => other.to_string(),
    })
}

/// A parsed input file together with its optional weight-map annotation.
pub struct PresentationDocument {
    pub path: String,
    pub presentation: Presentation,
    pub zmap: Option<ZMap>,
}

impl PresentationDocument {
    pub fn load(path: &str, phi: Option<&str>) -> Result<PresentationDocument, String> {
        let source = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
        let presentation =
            parse_presentation(&source).map_err(|e| format!("{path}: {e}"))?;
        let zmap = match phi {
            Some(text) => {
                Some(parse_zmap(text, &presentation).map_err(|e| format!("{path}: --phi: {e}"))?)
            }
            None => None,
        };
        Ok(PresentationDocument { path: path.to_string(), presentation, zmap })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use largo::words::GeneratorId;

    #[test]
    fn parse_examples() {
        let p = parse_presentation("< x, y | x^2, y^3 >").unwrap();
        assert_eq!(p.generator_count(), 2);
        assert_eq!(p.relators()[0].power(), 2);
        assert_eq!(p.relators()[1].power(), 3);

        let p = parse_presentation("< a, t | [a,t]^2 >").unwrap();
        let a = p.alphabet();
        assert_eq!(p.relators()[0].root(), &parse_word("a t a^-1 t^-1", a).unwrap());
        assert_eq!(p.relators()[0].power(), 2);

        // An unsyntactic square still folds into root/power form.
        let p = parse_presentation("< x | x x >").unwrap();
        assert_eq!(p.relators()[0].root(), &Word::generator(GeneratorId(0)));
        assert_eq!(p.relators()[0].power(), 2);
    }

    #[test]
    fn parse_comments_and_layout() {
        let src = "# chained pairs, n = 1\n< x1, x2 |\n  (x1 x2)^2,   # pair\n  x2^2 >\n";
        let p = parse_presentation(src).unwrap();
        assert_eq!(p.relator_count(), 2);

        let p = parse_presentation("< x | >").unwrap();
        assert_eq!(p.relator_count(), 0);
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = parse_presentation("< x, x | x^2 >").unwrap_err();
        assert!(err.message.contains("duplicate"));

        let err = parse_presentation("< x | x x^-1 >").unwrap_err();
        assert!(err.message.contains("empty word"));

        let err = parse_presentation("< x |\n z >").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("unknown generator `z`"));

        assert!(parse_presentation("x | y").is_err());
        assert!(parse_presentation("< x y >").is_err());
    }

    #[test]
    fn printer_parser_roundtrip() {
        for src in [
            "< x, y | x^2, y^3 >",
            "< a, t | [a,t]^2, (a t)^3, a t^-2 >",
            "< x1, x2, x3 | (x1 x2)^2, x2^2, (x2 x3)^5 >",
            "< x | >",
        ] {
            let p = parse_presentation(src).unwrap();
            let printed = print_presentation(&p);
            let q = parse_presentation(&printed).unwrap();
            assert_eq!(p, q, "printed form: {printed}");
        }
    }

    #[test]
    fn zmap_parsing() {
        let p = parse_presentation("< a, t | [a,t]^2 >").unwrap();
        let phi = parse_zmap("t=1,a=0", &p).unwrap();
        assert_eq!(phi.values(), &[BigInt::ZERO, BigInt::from(1)]);

        // Omitted generators default to zero.
        let phi = parse_zmap("t=1", &p).unwrap();
        assert_eq!(phi.values(), &[BigInt::ZERO, BigInt::from(1)]);

        assert!(parse_zmap("t=1,q=0", &p).is_err());
        assert!(parse_zmap("t=x", &p).is_err());
        assert!(parse_zmap("t=1,t=2", &p).is_err());
        // gcd must be one.
        assert!(parse_zmap("t=2", &p).is_err());
        // must annihilate the relators.
        let p = parse_presentation("< a, t | a t >").unwrap();
        assert!(parse_zmap("t=1,a=0", &p).is_err());
    }
}
