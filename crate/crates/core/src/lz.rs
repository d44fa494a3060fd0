//! Incremental (LZ78) parsing and the induced betting probability.
//!
//! The parser splits a word into the shortest substrings never seen
//! before; the completed phrases form a prefix-closed trie. Every node
//! carries `v_count`, the number of candidate next phrases in its
//! subtree: one-symbol extensions of phrases (including the root) that
//! are not phrases themselves. The conditional probability of the next
//! symbol is the ratio of candidate counts, which sums to one exactly
//! in integer arithmetic, and induces the uniform distribution over the
//! candidate set. At the root, `v_count = A + T(A-1)` for T completed
//! phrases.
//!
//! Counts are maintained incrementally: a phrase completion touches only
//! the ancestors of the new leaf, so betting is O(1) per symbol apart
//! from that O(depth) bump.

use crate::word::{Alphabet, Symbol, Word};

const ROOT: u32 = 0;

#[derive(Debug, Clone)]
struct Node {
    children: Vec<Option<u32>>,
    parent: u32,
    v_count: u64,
}

/// The prefix-closed dictionary of completed phrases, rooted at the
/// empty word.
#[derive(Debug, Clone)]
pub struct PhraseTrie {
    alphabet: Alphabet,
    nodes: Vec<Node>,
    phrase_count: u64,
}

impl PhraseTrie {
    pub fn new(alphabet: Alphabet) -> Self {
        let root = Node {
            children: vec![None; alphabet.size()],
            parent: ROOT,
            v_count: alphabet.size() as u64,
        };
        Self {
            alphabet,
            nodes: vec![root],
            phrase_count: 0,
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    /// Number of completed phrases T.
    pub fn phrase_count(&self) -> u64 {
        self.phrase_count
    }

    /// |V|: the total number of candidate next phrases, A + T(A-1).
    pub fn candidate_set_size(&self) -> u64 {
        self.nodes[ROOT as usize].v_count
    }

    fn child(&self, node: u32, a: Symbol) -> Option<u32> {
        self.nodes[node as usize].children[a as usize]
    }

    fn v_count(&self, node: u32) -> u64 {
        self.nodes[node as usize].v_count
    }

    /// Inserts `parent . a` as a new phrase leaf and propagates candidate
    /// counts up the ancestor chain.
    fn insert(&mut self, parent: u32, a: Symbol) -> u32 {
        debug_assert!(self.child(parent, a).is_none());
        let id = self.nodes.len() as u32;
        self.nodes.push(Node {
            children: vec![None; self.alphabet.size()],
            parent,
            v_count: self.alphabet.size() as u64,
        });
        self.nodes[parent as usize].children[a as usize] = Some(id);
        let bump = (self.alphabet.size() - 1) as u64;
        let mut cursor = parent;
        loop {
            self.nodes[cursor as usize].v_count += bump;
            if cursor == ROOT {
                break;
            }
            cursor = self.nodes[cursor as usize].parent;
        }
        self.phrase_count += 1;
        id
    }
}

/// Streaming parse state: the trie plus the cursor of the current
/// partial phrase.
#[derive(Debug, Clone)]
pub struct ParseState {
    trie: PhraseTrie,
    cursor: u32,
    consumed: usize,
    last_boundary: usize,
    phrase_ends: Vec<usize>,
}

impl ParseState {
    pub fn new(alphabet: Alphabet) -> Self {
        Self {
            trie: PhraseTrie::new(alphabet),
            cursor: ROOT,
            consumed: 0,
            last_boundary: 0,
            phrase_ends: Vec::new(),
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.trie.alphabet()
    }

    pub fn trie(&self) -> &PhraseTrie {
        &self.trie
    }

    /// Symbols consumed so far (n).
    pub fn consumed(&self) -> usize {
        self.consumed
    }

    /// Index where the last completed phrase ended (n_T).
    pub fn last_boundary(&self) -> usize {
        self.last_boundary
    }

    /// 1-past-the-end positions of the completed phrases.
    pub fn phrase_ends(&self) -> &[usize] {
        &self.phrase_ends
    }

    pub fn complexity(&self) -> u64 {
        self.trie.phrase_count()
    }

    /// Consumes one symbol: either advances into an existing phrase or
    /// completes a new one and resets the cursor to the root.
    pub fn feed(&mut self, a: Symbol) {
        debug_assert!(self.alphabet().contains(a));
        self.consumed += 1;
        match self.trie.child(self.cursor, a) {
            Some(node) => {
                self.cursor = node;
            }
            None => {
                self.trie.insert(self.cursor, a);
                self.cursor = ROOT;
                self.last_boundary = self.consumed;
                self.phrase_ends.push(self.consumed);
            }
        }
    }

    /// The betting probability of the next symbol as an exact ratio of
    /// candidate counts. The numerators over all symbols sum to the
    /// denominator.
    pub fn q_ratio(&self, a: Symbol) -> (u64, u64) {
        let denom = self.trie.v_count(self.cursor);
        let num = match self.trie.child(self.cursor, a) {
            Some(node) => self.trie.v_count(node),
            None => 1,
        };
        (num, denom)
    }

    pub fn q(&self, a: Symbol) -> f64 {
        let (num, denom) = self.q_ratio(a);
        num as f64 / denom as f64
    }
}

/// A completed parse: phrases in order, the trailing residue, and the
/// complexity c (number of completed phrases).
#[derive(Debug, Clone)]
pub struct ParseOutcome {
    pub phrases: Vec<Word>,
    pub residue: Word,
    pub complexity: u64,
}

impl ParseOutcome {
    /// Slash-delimited decomposition, e.g. "/1/0/00/01/11/010/11".
    /// The digit convention should match the input's (see `Word::render`).
    pub fn decomposition(&self, zero_based: bool) -> String {
        let mut out = String::new();
        for p in &self.phrases {
            out.push('/');
            out.push_str(&p.render(zero_based));
        }
        if !self.residue.is_empty() {
            out.push('/');
            out.push_str(&self.residue.render(zero_based));
        }
        out
    }
}

/// Parses a whole word by incremental parsing.
pub fn parse(word: &Word) -> ParseOutcome {
    let mut state = ParseState::new(word.alphabet());
    for &s in word.symbols() {
        state.feed(s);
    }
    let mut phrases = Vec::with_capacity(state.phrase_ends.len());
    let mut start = 0;
    for &end in &state.phrase_ends {
        phrases.push(Word::new(word.symbols()[start..end].to_vec(), word.alphabet()).unwrap());
        start = end;
    }
    let residue = Word::new(word.symbols()[start..].to_vec(), word.alphabet()).unwrap();
    ParseOutcome {
        phrases,
        residue,
        complexity: state.complexity(),
    }
}

/// -ln Q_LZ(word), accumulated by replaying the parse.
///
/// At phrase boundaries this equals sum_{j=0}^{T-1} ln(A + j(A-1)).
pub fn log_q_lz(word: &Word) -> f64 {
    let mut state = ParseState::new(word.alphabet());
    let mut neg_log = 0.0;
    for &s in word.symbols() {
        let (num, denom) = state.q_ratio(s);
        neg_log += (denom as f64).ln() - (num as f64).ln();
        state.feed(s);
    }
    neg_log
}

/// Rational replay used by exactness tests: -log Q as a product kept in
/// (numerator, denominator) big integers.
pub fn q_lz_exact(word: &Word) -> (num::BigUint, num::BigUint) {
    use num::BigUint;
    let mut state = ParseState::new(word.alphabet());
    let mut num_acc = BigUint::from(1u32);
    let mut den_acc = BigUint::from(1u32);
    for &s in word.symbols() {
        let (num, denom) = state.q_ratio(s);
        num_acc *= BigUint::from(num);
        den_acc *= BigUint::from(denom);
        state.feed(s);
    }
    (num_acc, den_acc)
}

/// c(word): the number of completed phrases.
pub fn complexity(word: &Word) -> u64 {
    let mut state = ParseState::new(word.alphabet());
    for &s in word.symbols() {
        state.feed(s);
    }
    state.complexity()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bin(text: &str) -> Word {
        Word::parse(text, Alphabet::binary()).unwrap()
    }

    #[test]
    fn parses_the_known_decomposition() {
        let w = bin("1000011101011");
        let out = parse(&w);
        assert_eq!(out.decomposition(true), "/1/0/00/01/11/010/11");
        assert_eq!(out.complexity, 6);
        assert_eq!(out.residue.render(true), "11");
    }

    #[test]
    fn empty_word() {
        let out = parse(&Word::empty(Alphabet::binary()));
        assert_eq!(out.complexity, 0);
        assert!(out.phrases.is_empty());
        assert!(out.residue.is_empty());
        assert_eq!(out.decomposition(false), "");
    }

    #[test]
    fn constant_word() {
        let w = bin("0000");
        let out = parse(&w);
        assert_eq!(out.complexity, 2);
        assert_eq!(
            out.phrases.iter().map(|p| p.len()).collect::<Vec<_>>(),
            vec![1, 2]
        );
        assert_eq!(out.residue.len(), 1);
    }

    #[test]
    fn fresh_state_is_uniform() {
        let state = ParseState::new(Alphabet::binary());
        assert_eq!(state.q_ratio(0), (1, 2));
        assert_eq!(state.q_ratio(1), (1, 2));
    }

    #[test]
    fn root_count_follows_the_phrase_law() {
        let mut state = ParseState::new(Alphabet::binary());
        state.feed(0); // new phrase "0"
        assert_eq!(state.trie().candidate_set_size(), 3);
        state.feed(1); // new phrase "1"
        assert_eq!(state.trie().candidate_set_size(), 4);
        // after /1/0 with A=2: Q(either) = 2/4
        assert_eq!(state.q_ratio(0), (2, 4));
        assert_eq!(state.q_ratio(1), (2, 4));
    }

    #[test]
    fn advancing_does_not_change_counts() {
        let mut state = ParseState::new(Alphabet::binary());
        state.feed(0);
        state.feed(1);
        let before = state.trie().candidate_set_size();
        state.feed(0); // advances into phrase "0"
        assert_eq!(state.trie().candidate_set_size(), before);
    }

    #[test]
    fn q_sums_to_one_exactly() {
        let w = bin("1000011101011");
        let mut state = ParseState::new(Alphabet::binary());
        for &s in w.symbols() {
            let denom = state.q_ratio(0).1;
            let total: u64 = (0..2).map(|a| state.q_ratio(a).0).sum();
            assert_eq!(total, denom);
            state.feed(s);
        }
    }

    #[test]
    fn log_q_matches_closed_form_at_boundaries() {
        // first two phrases of "10...": -ln Q = ln 2 + ln 3
        let w = bin("10");
        let expect = (2.0f64).ln() + (3.0f64).ln();
        assert!((log_q_lz(&w) - expect).abs() < 1e-12);
        assert_eq!(log_q_lz(&Word::empty(Alphabet::binary())), 0.0);
    }

    #[test]
    fn mid_phrase_codelength_bound() {
        // -ln Q(w_1^n) <= -ln Q(w_1^{n_T}) + ln |V| whenever n > n_T
        let w = bin("100001110101100");
        let mut state = ParseState::new(Alphabet::binary());
        let mut neg_log = 0.0;
        let mut at_boundary = 0.0;
        for &s in w.symbols() {
            let (num, denom) = state.q_ratio(s);
            neg_log += (denom as f64).ln() - (num as f64).ln();
            state.feed(s);
            let v = state.trie().candidate_set_size() as f64;
            if state.last_boundary() == state.consumed() {
                at_boundary = neg_log;
            } else {
                assert!(neg_log <= at_boundary + v.ln() + 1e-12);
            }
        }
    }

    #[test]
    fn uniform_over_candidate_set() {
        // walking from the root along any candidate phrase multiplies to 1/|V|
        let w = bin("10");
        let mut state = ParseState::new(Alphabet::binary());
        for &s in w.symbols() {
            state.feed(s);
        }
        let v = state.trie().candidate_set_size();
        // candidates after /1/0: 10, 11, 00, 01
        for cand in [[0u8, 0], [0, 1], [1, 0], [1, 1]] {
            let mut probe = state.clone();
            let mut prod_num = 1u64;
            let mut prod_den = 1u64;
            for &s in &cand {
                let (num, den) = probe.q_ratio(s);
                prod_num *= num;
                prod_den *= den;
                probe.feed(s);
            }
            assert_eq!(prod_den / prod_num, v);
            assert_eq!(prod_den % prod_num, 0);
        }
    }
}
