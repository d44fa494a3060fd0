//! Ordinary and cyclic occurrence counting.
//!
//! `count_ordinary` counts overlapping occurrences of every length-l pattern
//! inside a word. `count_cyclic` counts occurrences in the word extended by
//! wrapping its own (l-1)-prefix, so the counts of all patterns of a fixed
//! length always sum to the word length. The cyclic extension is virtual:
//! counting uses index arithmetic and a rolling pattern index, never a
//! materialized copy.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::word::{Alphabet, Symbol, Word};

/// Dense tables are used while A^l stays small; sparse maps above.
const DENSE_LIMIT: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMode {
    Ordinary,
    Cyclic,
}

#[derive(Debug, Clone)]
enum Storage {
    Dense(Vec<u64>),
    Sparse(HashMap<Vec<Symbol>, u64>),
}

/// Occurrence counts for all patterns of one fixed length.
///
/// Patterns absent from the word count as zero. In cyclic mode over a word
/// of length n the counts total n; in ordinary mode they total n - l + 1.
#[derive(Debug, Clone)]
pub struct CountTable {
    pattern_len: usize,
    alphabet: Alphabet,
    mode: CountMode,
    total: u64,
    storage: Storage,
}

impl CountTable {
    fn with_capacity(pattern_len: usize, alphabet: Alphabet, mode: CountMode, windows: usize) -> Self {
        let a = alphabet.size();
        // Dense only when the cell count is moderate both in absolute
        // terms and relative to the number of windows; short words over
        // long patterns stay sparse.
        let budget = DENSE_LIMIT.min(windows.saturating_mul(8).max(4096));
        let storage = match a.checked_pow(pattern_len as u32) {
            Some(cells) if cells <= budget => Storage::Dense(vec![0; cells]),
            _ => Storage::Sparse(HashMap::new()),
        };
        Self {
            pattern_len,
            alphabet,
            mode,
            total: 0,
            storage,
        }
    }

    pub fn pattern_len(&self) -> usize {
        self.pattern_len
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn mode(&self) -> CountMode {
        self.mode
    }

    /// Sum of all counts.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// The count of one pattern, zero if never seen.
    pub fn get(&self, pattern: &[Symbol]) -> u64 {
        assert_eq!(pattern.len(), self.pattern_len, "pattern length mismatch");
        match &self.storage {
            Storage::Dense(v) => v[self.index_of(pattern)],
            Storage::Sparse(m) => m.get(pattern).copied().unwrap_or(0),
        }
    }

    /// Iterates over patterns with positive count.
    pub fn iter_positive(&self) -> Box<dyn Iterator<Item = (Vec<Symbol>, u64)> + '_> {
        match &self.storage {
            Storage::Dense(v) => {
                let len = self.pattern_len;
                let a = self.alphabet.size();
                Box::new(v.iter().enumerate().filter(|(_, &c)| c > 0).map(
                    move |(idx, &c)| {
                        let mut pattern = vec![0 as Symbol; len];
                        let mut rem = idx;
                        for slot in pattern.iter_mut().rev() {
                            *slot = (rem % a) as Symbol;
                            rem /= a;
                        }
                        (pattern, c)
                    },
                ))
            }
            Storage::Sparse(m) => Box::new(m.iter().map(|(p, &c)| (p.clone(), c))),
        }
    }

    fn index_of(&self, pattern: &[Symbol]) -> usize {
        let a = self.alphabet.size();
        pattern.iter().fold(0usize, |acc, &s| acc * a + s as usize)
    }

    fn bump(&mut self, index: usize, pattern: impl FnOnce() -> Vec<Symbol>) {
        self.total += 1;
        match &mut self.storage {
            Storage::Dense(v) => v[index] += 1,
            Storage::Sparse(m) => *m.entry(pattern()).or_insert(0) += 1,
        }
    }
}

/// Counts overlapping occurrences of every length-l pattern in the word.
pub fn count_ordinary(word: &Word, len: usize) -> Result<CountTable> {
    if len < 1 || len > word.len() {
        return Err(Error::InvalidArgument(format!(
            "pattern length {len} must satisfy 1 <= l <= {}",
            word.len()
        )));
    }
    let windows = word.len() - len + 1;
    let mut table = CountTable::with_capacity(len, word.alphabet(), CountMode::Ordinary, windows);
    scan(word, len, windows, false, &mut table);
    Ok(table)
}

/// Counts occurrences of every length-l pattern in the cyclically extended
/// word (the word followed by its own first l-1 symbols). Requires l < n.
pub fn count_cyclic(word: &Word, len: usize) -> Result<CountTable> {
    if len < 1 || len >= word.len() {
        return Err(Error::InvalidArgument(format!(
            "pattern length {len} must satisfy 1 <= l < {}",
            word.len()
        )));
    }
    let mut table = CountTable::with_capacity(len, word.alphabet(), CountMode::Cyclic, word.len());
    scan(word, len, word.len(), true, &mut table);
    Ok(table)
}

/// Like `count_cyclic`, but admits patterns as long as the word itself.
/// Used for successor tables T_n(b | a^l) where l + 1 may reach n.
pub fn count_cyclic_extended(word: &Word, len: usize) -> Result<CountTable> {
    if len < 1 || len > word.len() {
        return Err(Error::InvalidArgument(format!(
            "pattern length {len} must satisfy 1 <= l <= {}",
            word.len()
        )));
    }
    let mut table = CountTable::with_capacity(len, word.alphabet(), CountMode::Cyclic, word.len());
    scan(word, len, word.len(), true, &mut table);
    Ok(table)
}

fn scan(word: &Word, len: usize, windows: usize, cyclic: bool, table: &mut CountTable) {
    let a = word.alphabet().size();
    let dense = matches!(table.storage, Storage::Dense(_));
    let syms = word.symbols();
    let at = |i: usize| -> Symbol {
        if cyclic {
            syms[i % syms.len()]
        } else {
            syms[i]
        }
    };
    if dense {
        // Rolling index: drop the leading digit, shift, append.
        let lead = a.pow((len - 1) as u32);
        let mut idx = 0usize;
        for i in 0..len {
            idx = idx * a + at(i) as usize;
        }
        for start in 0..windows {
            table.bump(idx, Vec::new);
            if start + 1 < windows {
                idx = (idx - at(start) as usize * lead) * a + at(start + len) as usize;
            }
        }
    } else {
        for start in 0..windows {
            let pattern: Vec<Symbol> = (start..start + len).map(at).collect();
            table.bump(0, || pattern);
        }
    }
}

/// The number of occurrences of `b` immediately following `prefix` in the
/// cyclic extension: T_n(b | prefix) = T_n(prefix b).
pub fn conditional_count(word: &Word, prefix: &[Symbol], b: Symbol) -> Result<u64> {
    if prefix.len() >= word.len() {
        return Err(Error::InvalidArgument(format!(
            "prefix length {} must be < word length {}",
            prefix.len(),
            word.len()
        )));
    }
    let table = count_cyclic_extended(word, prefix.len() + 1)?;
    let mut pattern = prefix.to_vec();
    pattern.push(b);
    Ok(table.get(&pattern))
}
