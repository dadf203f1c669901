//! Free-group words over a named generator alphabet.
//!
//! Words are stored freely reduced at all times; raw letter sequences exist
//! only transiently (inside [`free_reduce`] and the parser). The word grammar
//! accepted by [`parse_word`] is, whitespace-insensitive:
//!
//! ```text
//! word   := factor+
//! factor := atom ('^' int)?
//! atom   := name | '(' word ')' | '[' word ',' word ']'
//! int    := '-'? digits
//! ```
//!
//! `[u,v]` denotes the commutator `u v u^-1 v^-1`, and `^k` with `k < 0`
//! denotes the inverse raised to `|k|`. Names follow
//! `[A-Za-z_][A-Za-z0-9_]*` and are matched maximal-munch, so adjacent
//! generators must be separated by whitespace or punctuation.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;

/// Index of a generator inside its [`Alphabet`].
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct GeneratorId(pub usize);

/// Orientation of a letter: the generator itself or its inverse.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }

    pub fn signum(self) -> i64 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }
}

/// A single occurrence of a generator or its inverse.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Letter {
    pub gen: GeneratorId,
    pub sign: Sign,
}

impl Letter {
    pub fn new(gen: GeneratorId, sign: Sign) -> Letter {
        Letter { gen, sign }
    }

    pub fn inverse(self) -> Letter {
        Letter { gen: self.gen, sign: self.sign.flip() }
    }

    fn cancels(self, other: Letter) -> bool {
        self.gen == other.gen && self.sign != other.sign
    }
}

/// Errors from alphabet construction.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum AlphabetError {
    InvalidName(String),
    DuplicateName(String),
}

impl fmt::Display for AlphabetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphabetError::InvalidName(n) => write!(f, "invalid generator name `{n}`"),
            AlphabetError::DuplicateName(n) => write!(f, "duplicate generator name `{n}`"),
        }
    }
}

impl core::error::Error for AlphabetError {}

/// Ordered list of distinct generator names.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Alphabet {
    names: Vec<String>,
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Alphabet, AlphabetError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, name) in names.iter().enumerate() {
            if !valid_name(name) {
                return Err(AlphabetError::InvalidName(name.clone()));
            }
            if names[..i].contains(name) {
                return Err(AlphabetError::DuplicateName(name.clone()));
            }
        }
        Ok(Alphabet { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, g: GeneratorId) -> &str {
        &self.names[g.0]
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }

    pub fn id_of(&self, name: &str) -> Option<GeneratorId> {
        self.names.iter().position(|n| n == name).map(GeneratorId)
    }

    pub fn ids(&self) -> impl Iterator<Item = GeneratorId> {
        (0..self.names.len()).map(GeneratorId)
    }
}

/// A freely reduced word in the free group on some alphabet.
///
/// The reduced-form invariant (no adjacent `g g^-1` pair) is maintained by
/// every constructor and operation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Word {
        Word { letters: Vec::new() }
    }

    pub fn generator(g: GeneratorId) -> Word {
        Word { letters: alloc::vec![Letter::new(g, Sign::Pos)] }
    }

    pub fn letter(l: Letter) -> Word {
        Word { letters: alloc::vec![l] }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(|l| l.inverse()).collect() }
    }

    /// Concatenation followed by free reduction at the seam.
    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.letters.clone();
        for &l in &other.letters {
            if out.last().is_some_and(|last| last.cancels(l)) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word { letters: out }
    }

    /// `self` raised to the integer power `k`; `k < 0` raises the inverse.
    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::empty();
        for _ in 0..k.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// The commutator `u v u^-1 v^-1`.
    pub fn commutator(u: &Word, v: &Word) -> Word {
        u.concat(v).concat(&u.inverse()).concat(&v.inverse())
    }

    /// Largest generator index occurring in the word, if any.
    pub fn max_generator(&self) -> Option<GeneratorId> {
        self.letters.iter().map(|l| l.gen).max()
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> WordDisplay<'a> {
        WordDisplay { word: self, alphabet }
    }
}

/// Prints a word in the grammar accepted by [`parse_word`], one syllable per
/// maximal run of a letter; the empty word prints as `1`.
pub struct WordDisplay<'a> {
    word: &'a Word,
    alphabet: &'a Alphabet,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        let mut i = 0;
        let ls = self.word.letters();
        while i < ls.len() {
            let mut j = i + 1;
            while j < ls.len() && ls[j] == ls[i] {
                j += 1;
            }
            let run = (j - i) as i64 * ls[i].sign.signum();
            if !first {
                write!(f, " ")?;
            }
            first = false;
            let name = self.alphabet.name(ls[i].gen);
            if run == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{run}")?;
            }
            i = j;
        }
        Ok(())
    }
}

/// Free reduction of an arbitrary letter sequence.
///
/// Idempotent, length-nonincreasing, and the unique reduced form of the
/// sequence as a free group element.
pub fn free_reduce<I: IntoIterator<Item = Letter>>(raw: I) -> Word {
    let mut out: Vec<Letter> = Vec::new();
    for l in raw {
        if out.last().is_some_and(|last| last.cancels(l)) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    Word { letters: out }
}

/// Errors from word-level operations.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum WordError {
    /// Syntax error at a byte offset of the input.
    Parse { pos: usize, message: String },
    /// A name in the input is not a generator of the alphabet.
    UnknownGenerator { pos: usize, name: String },
    /// The operation requires a nonempty word.
    EmptyWord,
    /// A generator of the word has no image under the substitution.
    MissingImage { gen: GeneratorId },
}

impl fmt::Display for WordError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordError::Parse { pos, message } => write!(f, "parse error at offset {pos}: {message}"),
            WordError::UnknownGenerator { pos, name } => {
                write!(f, "unknown generator `{name}` at offset {pos}")
            }
            WordError::EmptyWord => write!(f, "empty word"),
            WordError::MissingImage { gen } => {
                write!(f, "no image for generator #{}", gen.0)
            }
        }
    }
}

impl core::error::Error for WordError {}

struct WordParser<'a> {
    text: &'a str,
    pos: usize,
    alphabet: &'a Alphabet,
}

// Exponent bound for a single `^k`: anything larger would materialize an
// absurd number of letters.
const MAX_EXPONENT: i64 = 1 << 24;

impl<'a> WordParser<'a> {
    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        let trimmed = rest.trim_start();
        self.pos += rest.len() - trimmed.len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn bump(&mut self, c: char) {
        self.pos += c.len_utf8();
    }

    fn expect(&mut self, c: char) -> Result<(), WordError> {
        match self.peek() {
            Some(got) if got == c => {
                self.bump(c);
                Ok(())
            }
            got => Err(self.err(match got {
                Some(g) => alloc::format!("expected `{c}`, found `{g}`"),
                None => alloc::format!("expected `{c}`, found end of input"),
            })),
        }
    }

    fn err(&self, message: String) -> WordError {
        WordError::Parse { pos: self.pos, message }
    }

    fn at_atom(&mut self) -> bool {
        matches!(self.peek(), Some(c) if c == '(' || c == '[' || c.is_ascii_alphabetic() || c == '_')
    }

    fn word(&mut self) -> Result<Word, WordError> {
        if !self.at_atom() {
            return Err(self.err("expected a word".to_string()));
        }
        let mut acc = Word::empty();
        while self.at_atom() {
            let factor = self.factor()?;
            acc = acc.concat(&factor);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Word, WordError> {
        let atom = self.atom()?;
        if self.peek() == Some('^') {
            self.bump('^');
            let k = self.int()?;
            Ok(atom.pow(k))
        } else {
            Ok(atom)
        }
    }

    fn atom(&mut self) -> Result<Word, WordError> {
        match self.peek() {
            Some('(') => {
                self.bump('(');
                let w = self.word()?;
                self.expect(')')?;
                Ok(w)
            }
            Some('[') => {
                self.bump('[');
                let u = self.word()?;
                self.expect(',')?;
                let v = self.word()?;
                self.expect(']')?;
                Ok(Word::commutator(&u, &v))
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => self.name(),
            _ => Err(self.err("expected a generator, `(` or `[`".to_string())),
        }
    }

    fn name(&mut self) -> Result<Word, WordError> {
        let start = self.pos;
        let rest = &self.text[start..];
        let len = rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(rest.len());
        let name = &rest[..len];
        self.pos += len;
        match self.alphabet.id_of(name) {
            Some(g) => Ok(Word::generator(g)),
            None => Err(WordError::UnknownGenerator { pos: start, name: name.to_string() }),
        }
    }

    fn int(&mut self) -> Result<i64, WordError> {
        self.skip_ws();
        let start = self.pos;
        let mut negative = false;
        if self.peek() == Some('-') {
            self.bump('-');
            negative = true;
        }
        let rest = &self.text[self.pos..];
        let len = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
        if len == 0 {
            return Err(self.err("expected an integer exponent".to_string()));
        }
        self.pos += len;
        let digits = &rest[..len];
        let value: i64 = digits.parse().map_err(|_| WordError::Parse {
            pos: start,
            message: alloc::format!("exponent `{digits}` out of range"),
        })?;
        if value > MAX_EXPONENT {
            return Err(WordError::Parse {
                pos: start,
                message: alloc::format!("exponent `{digits}` out of range"),
            });
        }
        Ok(if negative { -value } else { value })
    }
}

/// Parses a word expression over the given alphabet and returns its free
/// reduction.
pub fn parse_word(text: &str, alphabet: &Alphabet) -> Result<Word, WordError> {
    let mut parser = WordParser { text, pos: 0, alphabet };
    let word = parser.word()?;
    parser.skip_ws();
    if parser.pos != text.len() {
        return Err(parser.err("unexpected trailing input".to_string()));
    }
    Ok(word)
}

/// A word presented as a power of its minimal root: `root^power` with the
/// root not itself a proper power.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PowerRelator {
    root: Word,
    power: u64,
}

impl PowerRelator {
    /// Root/power decomposition of a nonempty word, via [`minimal_root`].
    pub fn new(word: &Word) -> Result<PowerRelator, WordError> {
        minimal_root(word)
    }

    /// Builds `root^power`, folding any residual power of `root` itself into
    /// the exponent so the stored root is minimal.
    pub fn from_parts(root: &Word, power: u64) -> Result<PowerRelator, WordError> {
        if power == 0 {
            return Err(WordError::EmptyWord);
        }
        let inner = minimal_root(root)?;
        Ok(PowerRelator { root: inner.root, power: inner.power * power })
    }

    pub fn root(&self) -> &Word {
        &self.root
    }

    pub fn power(&self) -> u64 {
        self.power
    }

    /// The underlying relator word `root^power`.
    pub fn expanded(&self) -> Word {
        // No cancellation can occur between copies of a minimal root, but
        // concat re-checks anyway.
        let mut out = Word::empty();
        for _ in 0..self.power {
            out = out.concat(&self.root);
        }
        out
    }
}

/// Root/power decomposition: returns `(u, k)` with `w = u^k` as reduced
/// words and `k` maximal, so `u` is not itself a proper power.
///
/// A reduced word is `c v c^-1` with `v` cyclically reduced; any root of the
/// word is `c s c^-1` for a syntactic period `s` of `v`, so the search peels
/// the conjugating prefix and scans period lengths dividing `|v|`.
pub fn minimal_root(w: &Word) -> Result<PowerRelator, WordError> {
    let letters = w.letters();
    let n = letters.len();
    if n == 0 {
        return Err(WordError::EmptyWord);
    }
    let mut c = 0;
    while 2 * c + 1 < n && letters[c].cancels(letters[n - 1 - c]) {
        c += 1;
    }
    let core = &letters[c..n - c];
    let vlen = core.len();
    for p in 1..=vlen {
        if vlen % p != 0 {
            continue;
        }
        if (p..vlen).all(|i| core[i] == core[i - p]) {
            let k = (vlen / p) as u64;
            if k == 1 {
                return Ok(PowerRelator { root: w.clone(), power: 1 });
            }
            let mut root: Vec<Letter> = Vec::with_capacity(2 * c + p);
            root.extend_from_slice(&letters[..c]);
            root.extend_from_slice(&core[..p]);
            root.extend(letters[..c].iter().rev().map(|l| l.inverse()));
            return Ok(PowerRelator { root: Word { letters: root }, power: k });
        }
    }
    unreachable!("period vlen always matches")
}

/// Signed count of each generator's occurrences: component `j` is the
/// exponent sum of generator `j` in `w`. Additive under concatenation.
pub fn exponent_vector(w: &Word, generators: usize) -> Vec<BigInt> {
    let mut out = alloc::vec![BigInt::ZERO; generators];
    for l in w.letters() {
        out[l.gen.0] += l.sign.signum();
    }
    out
}

/// Source of generator images for [`substitute`].
pub trait ImageMap {
    fn image_of(&self, g: GeneratorId) -> Option<&Word>;
}

impl ImageMap for BTreeMap<GeneratorId, Word> {
    fn image_of(&self, g: GeneratorId) -> Option<&Word> {
        self.get(&g)
    }
}

impl ImageMap for [Word] {
    fn image_of(&self, g: GeneratorId) -> Option<&Word> {
        self.get(g.0)
    }
}

impl ImageMap for Vec<Word> {
    fn image_of(&self, g: GeneratorId) -> Option<&Word> {
        self.get(g.0)
    }
}

/// The image of `w` under the substitution, before free reduction.
pub fn substitute_raw<M: ImageMap + ?Sized>(
    w: &Word,
    images: &M,
) -> Result<Vec<Letter>, WordError> {
    let mut out = Vec::new();
    for l in w.letters() {
        let image = images.image_of(l.gen).ok_or(WordError::MissingImage { gen: l.gen })?;
        match l.sign {
            Sign::Pos => out.extend_from_slice(image.letters()),
            Sign::Neg => out.extend(image.letters().iter().rev().map(|x| x.inverse())),
        }
    }
    Ok(out)
}

/// Homomorphic image of `w` under a generator substitution, freely reduced.
pub fn substitute<M: ImageMap + ?Sized>(w: &Word, images: &M) -> Result<Word, WordError> {
    Ok(free_reduce(substitute_raw(w, images)?))
}
