//! Alphabets, words, circular words and antimorphic involutions.
//!
//! Symbols are interned tokens rather than raw characters, so the four-letter
//! RNA alphabet and generated abstract alphabets (whose symbols are tokens
//! like `Sq1`) share one representation. A [`Word`] carries its [`Alphabet`]
//! (a cheap, reference-counted handle), which keeps every operation closed
//! over a declared symbol set.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Errors raised by alphabet, word and involution construction.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum WordError {
    #[error("alphabet must be nonempty")]
    EmptyAlphabet,
    #[error("duplicate symbol {0:?} in alphabet")]
    DuplicateSymbol(String),
    #[error("symbol {0:?} is not in the alphabet")]
    UnknownSymbol(String),
    #[error("involution must map every symbol; {0:?} is unmapped")]
    PartialInvolution(String),
    #[error("mapping is not an involution: theta(theta({0:?})) != {0:?}")]
    NotInvolutive(String),
    #[error("words are over different alphabets")]
    AlphabetMismatch,
    #[error("pattern must be nonempty")]
    EmptyPattern,
    #[error("unroll count must be at least 1")]
    ZeroUnroll,
    #[error("circular word period must be nonempty")]
    EmptyPeriod,
}

#[derive(Debug)]
struct AlphabetInner {
    tokens: Vec<String>,
    index: HashMap<String, Sym>,
}

/// A finite, ordered set of distinct symbols. Declaration order is the symbol
/// order used wherever words are compared lexicographically.
#[derive(Clone, Debug)]
pub struct Alphabet {
    inner: Arc<AlphabetInner>,
}

/// A symbol, as an index into its alphabet's token list.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sym(pub u32);

impl Alphabet {
    /// Builds an alphabet from distinct tokens, in order.
    pub fn new<I, S>(tokens: I) -> Result<Alphabet, WordError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        if tokens.is_empty() {
            return Err(WordError::EmptyAlphabet);
        }
        let mut index = HashMap::new();
        for (i, t) in tokens.iter().enumerate() {
            if index.insert(t.clone(), Sym(i as u32)).is_some() {
                return Err(WordError::DuplicateSymbol(t.clone()));
            }
        }
        Ok(Alphabet {
            inner: Arc::new(AlphabetInner { tokens, index }),
        })
    }

    /// The RNA alphabet A, U, C, G.
    pub fn rna() -> Alphabet {
        Alphabet::new(["A", "U", "C", "G"]).unwrap()
    }

    /// The DNA alphabet A, T, C, G.
    pub fn dna() -> Alphabet {
        Alphabet::new(["A", "T", "C", "G"]).unwrap()
    }

    pub fn len(&self) -> usize {
        self.inner.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty alphabets
    }

    pub fn symbols(&self) -> impl Iterator<Item = Sym> + '_ {
        (0..self.len() as u32).map(Sym)
    }

    pub fn token(&self, s: Sym) -> &str {
        &self.inner.tokens[s.0 as usize]
    }

    pub fn tokens(&self) -> &[String] {
        &self.inner.tokens
    }

    pub fn sym(&self, token: &str) -> Result<Sym, WordError> {
        self.inner
            .index
            .get(token)
            .copied()
            .ok_or_else(|| WordError::UnknownSymbol(token.to_string()))
    }

    pub fn contains(&self, token: &str) -> bool {
        self.inner.index.contains_key(token)
    }

    /// True when every token is a single character, so words round-trip as
    /// plain concatenated text.
    pub fn single_char(&self) -> bool {
        self.inner.tokens.iter().all(|t| t.chars().count() == 1)
    }

    /// The empty word over this alphabet.
    pub fn empty_word(&self) -> Word {
        Word {
            alphabet: self.clone(),
            syms: Vec::new(),
        }
    }

    /// Builds a word from a symbol sequence.
    pub fn word(&self, syms: impl IntoIterator<Item = Sym>) -> Word {
        let syms: Vec<Sym> = syms.into_iter().collect();
        debug_assert!(syms.iter().all(|s| (s.0 as usize) < self.len()));
        Word {
            alphabet: self.clone(),
            syms,
        }
    }

    /// Parses word text. Single-char alphabets read one symbol per character;
    /// otherwise tokens are separated by `.`. The token `<eps>` and the empty
    /// string both denote the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Word, WordError> {
        let text = text.trim();
        if text.is_empty() || text == "<eps>" {
            return Ok(self.empty_word());
        }
        let mut syms = Vec::new();
        if self.single_char() && !text.contains('.') {
            for ch in text.chars() {
                syms.push(self.sym(&ch.to_string())?);
            }
        } else {
            for tok in text.split('.') {
                syms.push(self.sym(tok)?);
            }
        }
        Ok(self.word(syms))
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.tokens == other.inner.tokens
    }
}
impl Eq for Alphabet {}

/// A finite sequence of symbols over one alphabet.
#[derive(Clone, Debug)]
pub struct Word {
    alphabet: Alphabet,
    syms: Vec<Sym>,
}

impl Word {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn syms(&self) -> &[Sym] {
        &self.syms
    }

    pub fn len(&self) -> usize {
        self.syms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syms.is_empty()
    }

    pub fn slice(&self, start: usize, end: usize) -> Word {
        self.alphabet.word(self.syms[start..end].iter().copied())
    }

    pub fn concat(&self, other: &Word) -> Word {
        debug_assert_eq!(self.alphabet, other.alphabet);
        let mut syms = self.syms.clone();
        syms.extend_from_slice(&other.syms);
        self.alphabet.word(syms)
    }

    pub fn push(&mut self, s: Sym) {
        self.syms.push(s);
    }

    /// Renders the word, using `<eps>` for the empty word.
    pub fn to_text(&self) -> String {
        if self.is_empty() {
            return "<eps>".to_string();
        }
        self.to_string()
    }

    /// The token sequence, for comparisons across alphabets.
    pub fn token_seq(&self) -> Vec<String> {
        self.syms
            .iter()
            .map(|&s| self.alphabet.token(s).to_string())
            .collect()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.alphabet.single_char() {
            for &s in &self.syms {
                f.write_str(self.alphabet.token(s))?;
            }
        } else {
            for (i, &s) in self.syms.iter().enumerate() {
                if i > 0 {
                    f.write_str(".")?;
                }
                f.write_str(self.alphabet.token(s))?;
            }
        }
        Ok(())
    }
}

impl PartialEq for Word {
    fn eq(&self, other: &Self) -> bool {
        self.syms == other.syms && self.alphabet == other.alphabet
    }
}
impl Eq for Word {}

impl std::hash::Hash for Word {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.syms.hash(state);
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.syms
            .cmp(&other.syms)
            .then_with(|| self.alphabet.tokens().cmp(other.alphabet.tokens()))
    }
}

/// A circular word, i.e. the infinite repetition `period^ω` of a nonempty
/// period.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircularWord {
    period: Word,
}

impl CircularWord {
    pub fn new(period: Word) -> Result<CircularWord, WordError> {
        if period.is_empty() {
            return Err(WordError::EmptyPeriod);
        }
        Ok(CircularWord { period })
    }

    pub fn period(&self) -> &Word {
        &self.period
    }

    /// The period repeated `k` times; `k` must be at least 1.
    pub fn unroll(&self, k: usize) -> Result<Word, WordError> {
        if k == 0 {
            return Err(WordError::ZeroUnroll);
        }
        let mut syms = Vec::with_capacity(k * self.period.len());
        for _ in 0..k {
            syms.extend_from_slice(self.period.syms());
        }
        Ok(self.period.alphabet().word(syms))
    }
}

/// An antimorphic involution: a symbol pairing with `theta(theta(a)) = a`,
/// extended to words by reversing and mapping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Involution {
    alphabet: Alphabet,
    map: Vec<Sym>,
}

impl Involution {
    /// Builds an involution from token pairs. Every symbol must be covered;
    /// a pair `(a, a)` declares a fixed point.
    pub fn from_pairs<'a>(
        alphabet: &Alphabet,
        pairs: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<Involution, WordError> {
        let mut map: Vec<Option<Sym>> = vec![None; alphabet.len()];
        for (a, b) in pairs {
            let sa = alphabet.sym(a)?;
            let sb = alphabet.sym(b)?;
            map[sa.0 as usize] = Some(sb);
            map[sb.0 as usize] = Some(sa);
        }
        let mut full = Vec::with_capacity(alphabet.len());
        for (i, m) in map.iter().enumerate() {
            match m {
                Some(s) => full.push(*s),
                None => {
                    return Err(WordError::PartialInvolution(
                        alphabet.tokens()[i].clone(),
                    ))
                }
            }
        }
        for (i, &s) in full.iter().enumerate() {
            if full[s.0 as usize].0 as usize != i {
                return Err(WordError::NotInvolutive(alphabet.tokens()[i].clone()));
            }
        }
        Ok(Involution {
            alphabet: alphabet.clone(),
            map: full,
        })
    }

    /// The Watson-Crick involution A↔U, C↔G on the RNA alphabet.
    pub fn watson_crick_rna() -> Involution {
        Involution::from_pairs(&Alphabet::rna(), [("A", "U"), ("C", "G")]).unwrap()
    }

    /// The Watson-Crick involution A↔T, C↔G on the DNA alphabet.
    pub fn watson_crick_dna() -> Involution {
        Involution::from_pairs(&Alphabet::dna(), [("A", "T"), ("C", "G")]).unwrap()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn apply_sym(&self, s: Sym) -> Sym {
        self.map[s.0 as usize]
    }

    /// Maps token pairs in alphabet order, each pair listed once.
    pub fn pairs(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for (i, &s) in self.map.iter().enumerate() {
            if i as u32 <= s.0 {
                out.push((
                    self.alphabet.tokens()[i].clone(),
                    self.alphabet.tokens()[s.0 as usize].clone(),
                ));
            }
        }
        out
    }
}

/// Applies an antimorphic involution to a word: reverses it and maps each
/// symbol, so `|result| = |w|`.
pub fn apply_involution(theta: &Involution, w: &Word) -> Result<Word, WordError> {
    if theta.alphabet != *w.alphabet() {
        return Err(WordError::AlphabetMismatch);
    }
    let syms: Vec<Sym> = w.syms().iter().rev().map(|&s| theta.apply_sym(s)).collect();
    Ok(w.alphabet().word(syms))
}

/// All start offsets (0-based, ascending) at which `pattern` occurs as a
/// factor of `text`; overlapping occurrences are included.
pub fn occurrences(pattern: &Word, text: &Word) -> Result<Vec<usize>, WordError> {
    if pattern.is_empty() {
        return Err(WordError::EmptyPattern);
    }
    if pattern.alphabet() != text.alphabet() {
        return Err(WordError::AlphabetMismatch);
    }
    Ok(occurrences_in(pattern.syms(), text.syms()))
}

/// Occurrence scan on raw symbol slices (used internally on unrolled buffers).
pub(crate) fn occurrences_in(pattern: &[Sym], text: &[Sym]) -> Vec<usize> {
    let mut out = Vec::new();
    if pattern.is_empty() || pattern.len() > text.len() {
        return out;
    }
    for start in 0..=(text.len() - pattern.len()) {
        if &text[start..start + pattern.len()] == pattern {
            out.push(start);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rna_word(s: &str) -> Word {
        Alphabet::rna().parse_word(s).unwrap()
    }

    #[test]
    fn watson_crick_reverses_and_maps() {
        let theta = Involution::watson_crick_rna();
        assert_eq!(
            apply_involution(&theta, &rna_word("AUA")).unwrap(),
            rna_word("UAU")
        );
        assert_eq!(
            apply_involution(&theta, &rna_word("")).unwrap(),
            rna_word("")
        );
    }

    #[test]
    fn dna_gatc_is_a_fixed_point() {
        // Check by hand: reverse of GATC is CTAG, complement is GATC.
        let theta = Involution::watson_crick_dna();
        let w = Alphabet::dna().parse_word("GATC").unwrap();
        assert_eq!(apply_involution(&theta, &w).unwrap(), w);
    }

    #[test]
    fn involution_rejects_partial_and_non_involutive_maps() {
        let a = Alphabet::new(["a", "b", "c"]).unwrap();
        assert_eq!(
            Involution::from_pairs(&a, [("a", "b")]).unwrap_err(),
            WordError::PartialInvolution("c".to_string())
        );
        // b is remapped by the second pair, breaking the pairing of a.
        assert_eq!(
            Involution::from_pairs(&a, [("a", "b"), ("b", "c")]).unwrap_err(),
            WordError::NotInvolutive("a".to_string())
        );
    }

    #[test]
    fn occurrence_scan_includes_overlaps() {
        assert_eq!(
            occurrences(&rna_word("AA"), &rna_word("AAA")).unwrap(),
            vec![0, 1]
        );
        assert_eq!(
            occurrences(&rna_word("AUA"), &rna_word("AAUAACC")).unwrap(),
            vec![1]
        );
        assert_eq!(
            occurrences(&rna_word("CCC"), &rna_word("AAUAA")).unwrap(),
            Vec::<usize>::new()
        );
        assert_eq!(
            occurrences(&rna_word(""), &rna_word("AAA")).unwrap_err(),
            WordError::EmptyPattern
        );
    }

    #[test]
    fn unroll_repeats_the_period() {
        let cw = CircularWord::new(rna_word("AU")).unwrap();
        assert_eq!(cw.unroll(3).unwrap(), rna_word("AUAUAU"));
        let cw = CircularWord::new(rna_word("G")).unwrap();
        assert_eq!(cw.unroll(1).unwrap(), rna_word("G"));
        let cw = CircularWord::new(rna_word("AAC")).unwrap();
        assert_eq!(cw.unroll(2).unwrap(), rna_word("AACAAC"));
        assert_eq!(cw.unroll(0).unwrap_err(), WordError::ZeroUnroll);
    }

    #[test]
    fn alphabet_rejects_duplicates_and_empties() {
        assert_eq!(
            Alphabet::new(Vec::<String>::new()).unwrap_err(),
            WordError::EmptyAlphabet
        );
        assert_eq!(
            Alphabet::new(["A", "A"]).unwrap_err(),
            WordError::DuplicateSymbol("A".to_string())
        );
    }

    #[test]
    fn multi_token_words_render_dotted() {
        let a = Alphabet::new(["Sq1", "Eq1"]).unwrap();
        let w = a.parse_word("Sq1.Eq1.Sq1").unwrap();
        assert_eq!(w.to_string(), "Sq1.Eq1.Sq1");
        assert_eq!(w.len(), 3);
        assert_eq!(a.parse_word("<eps>").unwrap().to_text(), "<eps>");
    }
}
