//! Alphabets and finite words.
//!
//! Symbols are 0-based indices internally; all textual I/O renders them
//! 1-based. Words over alphabets of size at most 9 serialize as digit
//! strings ("1211"); larger alphabets use comma-separated integers. Both
//! forms are accepted on input.

use std::fmt;

use crate::error::{Error, Result};

/// A symbol is a 0-based index into the alphabet.
pub type Symbol = u8;

/// A finite alphabet {0, .., A-1}. Binary (A = 2) is the smallest supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Alphabet {
    size: usize,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::InvalidArgument(format!(
                "alphabet size must be >= 2, got {size}"
            )));
        }
        if size > Symbol::MAX as usize + 1 {
            return Err(Error::InvalidArgument(format!(
                "alphabet size must be <= {}, got {size}",
                Symbol::MAX as usize + 1
            )));
        }
        Ok(Self { size })
    }

    pub fn binary() -> Self {
        Self { size: 2 }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn contains(&self, s: Symbol) -> bool {
        (s as usize) < self.size
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> {
        (0..self.size).map(|i| i as Symbol)
    }
}

/// A finite symbol sequence over an alphabet. The empty word is valid.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    symbols: Vec<Symbol>,
    alphabet: Alphabet,
}

impl Word {
    pub fn new(symbols: Vec<Symbol>, alphabet: Alphabet) -> Result<Self> {
        if let Some(&s) = symbols.iter().find(|&&s| !alphabet.contains(s)) {
            return Err(Error::InvalidArgument(format!(
                "symbol index {s} out of range for alphabet of size {}",
                alphabet.size()
            )));
        }
        Ok(Self { symbols, alphabet })
    }

    pub fn empty(alphabet: Alphabet) -> Self {
        Self {
            symbols: Vec::new(),
            alphabet,
        }
    }

    /// Parses the textual form: digit strings for A <= 9, comma-separated
    /// integers otherwise. Both the 1-based rendering ("1211") and raw
    /// 0-based strings ("0100") are accepted; the presence of a 0 token
    /// marks the input as 0-based, otherwise tokens are read 1-based.
    /// The empty string is the empty word.
    pub fn parse(text: &str, alphabet: Alphabet) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Self::empty(alphabet));
        }
        let tokens: Vec<String> = if text.contains(',') {
            text.split(',').map(|t| t.trim().to_string()).collect()
        } else {
            text.chars().map(|c| c.to_string()).collect()
        };
        let values: Vec<usize> = tokens
            .iter()
            .map(|tok| {
                tok.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("invalid symbol token {tok:?}")))
            })
            .collect::<Result<_>>()?;
        let zero_based = values.iter().any(|&v| v == 0);
        let symbols: Vec<Symbol> = values
            .into_iter()
            .map(|v| {
                let idx = if zero_based { v } else { v - 1 };
                if idx >= alphabet.size() {
                    return Err(Error::Parse(format!(
                        "symbol {v} out of range for alphabet of size {}",
                        alphabet.size()
                    )));
                }
                Ok(idx as Symbol)
            })
            .collect::<Result<_>>()?;
        Ok(Self { symbols, alphabet })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn push(&mut self, s: Symbol) {
        debug_assert!(self.alphabet.contains(s));
        self.symbols.push(s);
    }

    /// The symbol at a position of the cyclic extension of the word:
    /// indices past the end wrap to the front.
    pub fn cyclic(&self, i: usize) -> Symbol {
        self.symbols[i % self.symbols.len()]
    }
}

impl Word {
    /// Renders the word with an explicit digit convention. `Display`
    /// always renders 1-based; pass `zero_based = true` to echo raw
    /// binary-style input such as "0100".
    pub fn render(&self, zero_based: bool) -> String {
        let offset = if zero_based { 0 } else { 1 };
        let toks: Vec<String> = self
            .symbols
            .iter()
            .map(|&s| (s as usize + offset).to_string())
            .collect();
        if self.alphabet.size() <= 9 && !zero_based || self.alphabet.size() <= 10 && zero_based {
            toks.concat()
        } else {
            toks.join(",")
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(false))
    }
}

/// True when a serialized word uses the 0-based digit convention
/// (some token is the literal 0).
pub fn text_is_zero_based(text: &str) -> bool {
    let text = text.trim();
    if text.contains(',') {
        text.split(',').any(|t| t.trim() == "0")
    } else {
        text.chars().any(|c| c == '0')
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabet_rejects_unary() {
        assert!(Alphabet::new(1).is_err());
        assert!(Alphabet::new(0).is_err());
        assert!(Alphabet::new(2).is_ok());
    }

    #[test]
    fn word_rejects_out_of_range_symbols() {
        let a = Alphabet::binary();
        assert!(Word::new(vec![0, 1, 2], a).is_err());
        assert!(Word::new(vec![0, 1, 1], a).is_ok());
    }

    #[test]
    fn digit_round_trip() {
        let a = Alphabet::binary();
        let w = Word::parse("1211", a).unwrap();
        assert_eq!(w.symbols(), &[0, 1, 0, 0]);
        assert_eq!(w.to_string(), "1211");
    }

    #[test]
    fn zero_based_input_accepted() {
        let a = Alphabet::binary();
        let w = Word::parse("0100", a).unwrap();
        assert_eq!(w.symbols(), &[0, 1, 0, 0]);
    }

    #[test]
    fn comma_form_accepted_for_small_alphabets() {
        let a = Alphabet::binary();
        let w = Word::parse("1,2,1,1", a).unwrap();
        assert_eq!(w.symbols(), &[0, 1, 0, 0]);
    }

    #[test]
    fn large_alphabet_uses_commas() {
        let a = Alphabet::new(12).unwrap();
        let w = Word::new(vec![0, 9, 11], a).unwrap();
        assert_eq!(w.to_string(), "1,10,12");
        assert_eq!(Word::parse("1,10,12", a).unwrap(), w);
    }

    #[test]
    fn empty_word_is_valid() {
        let a = Alphabet::binary();
        let w = Word::parse("", a).unwrap();
        assert!(w.is_empty());
        assert_eq!(w.to_string(), "");
    }
}
