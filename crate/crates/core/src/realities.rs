//! Reality move sources: deterministic replays, periodic words, and
//! seeded Markov samplers.
//!
//! All stochastic sources are driven by a ChaCha stream cipher RNG, so a
//! (seed, kernel) pair reproduces the same word on every platform.

use rand::distributions::{Distribution as _, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::markov::{joint_stationary, stationary_default, Distribution, MarkovKernel};
use crate::word::{Alphabet, Symbol, Word};

/// A source of Reality's moves. `history` is the word played so far;
/// stateful sources may ignore it.
pub trait Reality {
    fn next(&mut self, history: &[Symbol]) -> Result<Symbol>;
}

/// Replays a fixed word; errors once the word is exhausted.
pub struct ReplayReality {
    word: Word,
    pos: usize,
}

impl ReplayReality {
    pub fn new(word: Word) -> Self {
        Self { word, pos: 0 }
    }
}

impl Reality for ReplayReality {
    fn next(&mut self, _history: &[Symbol]) -> Result<Symbol> {
        let s = self
            .word
            .symbols()
            .get(self.pos)
            .copied()
            .ok_or(Error::EndOfSequence(self.pos))?;
        self.pos += 1;
        Ok(s)
    }
}

/// Repeats a fixed pattern forever.
pub struct PeriodicReality {
    pattern: Word,
    pos: usize,
}

impl PeriodicReality {
    pub fn new(pattern: Word) -> Result<Self> {
        if pattern.is_empty() {
            return Err(Error::InvalidArgument(
                "periodic pattern must be nonempty".into(),
            ));
        }
        Ok(Self { pattern, pos: 0 })
    }
}

impl Reality for PeriodicReality {
    fn next(&mut self, _history: &[Symbol]) -> Result<Symbol> {
        let s = self.pattern.cyclic(self.pos);
        self.pos += 1;
        Ok(s)
    }
}

/// Samples a stationary kth-order Markov chain: the first k symbols come
/// from the stationary joint law over Omega^k, later symbols from the
/// kernel row of the last k symbols of the history.
pub struct MarkovReality {
    kernel: MarkovKernel,
    rng: ChaCha8Rng,
    seed: u64,
    initial_block: Vec<Symbol>,
    emitted: usize,
}

impl MarkovReality {
    pub fn new(kernel: MarkovKernel, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pi = stationary_default(&kernel)?;
        let joint = joint_stationary(&kernel, &pi, kernel.order())?;
        let idx = WeightedIndex::new(joint.probs())
            .map_err(|e| Error::InvalidArgument(format!("bad stationary weights: {e}")))?
            .sample(&mut rng);
        let initial_block =
            crate::markov::context_of_index(idx, kernel.order(), kernel.alphabet());
        Ok(Self {
            kernel,
            rng,
            seed,
            initial_block,
            emitted: 0,
        })
    }

    /// An iid sampler: every symbol drawn independently from `p`.
    pub fn iid(p: Distribution, alphabet: Alphabet, seed: u64) -> Result<Self> {
        Self::new(MarkovKernel::iid(p, alphabet)?, seed)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The same source restarted with a fresh seed.
    pub fn reseeded(&self, seed: u64) -> Result<Self> {
        Self::new(self.kernel.clone(), seed)
    }
}

impl Reality for MarkovReality {
    fn next(&mut self, history: &[Symbol]) -> Result<Symbol> {
        let k = self.kernel.order();
        let s = if self.emitted < k {
            self.initial_block[self.emitted]
        } else {
            let ctx = &history[history.len() - k..];
            let row = self.kernel.row(ctx);
            let idx = WeightedIndex::new(row.probs())
                .map_err(|e| Error::InvalidArgument(format!("bad kernel row: {e}")))?
                .sample(&mut self.rng);
            idx as Symbol
        };
        self.emitted += 1;
        Ok(s)
    }
}

/// A kernel with one row tilted away from the original: the target row
/// becomes (1 - eps) * row + eps * delta at the row's least likely
/// symbol. Used to play unfaithful realities against a forecaster.
pub fn biased_flip(kernel: &MarkovKernel, context: &[Symbol], eps: f64) -> Result<MarkovKernel> {
    if !(eps > 0.0) || !(eps < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "bias must lie in (0, 1), got {eps}"
        )));
    }
    if context.len() != kernel.order() {
        return Err(Error::InvalidArgument(format!(
            "context length {} does not match kernel order {}",
            context.len(),
            kernel.order()
        )));
    }
    let target = kernel.context_index(context);
    let mut rows: Vec<Distribution> = kernel.rows().to_vec();
    let old = rows[target].probs();
    let argmin = old
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).expect("probabilities are ordered"))
        .map(|(i, _)| i)
        .expect("rows are nonempty");
    let tilted: Vec<f64> = old
        .iter()
        .enumerate()
        .map(|(i, &p)| (1.0 - eps) * p + if i == argmin { eps } else { 0.0 })
        .collect();
    rows[target] = Distribution::new(tilted)?;
    MarkovKernel::new(kernel.order(), kernel.alphabet(), rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replay_then_end() {
        let w = Word::parse("01", Alphabet::binary()).unwrap();
        let mut r = ReplayReality::new(w);
        assert_eq!(r.next(&[]).unwrap(), 0);
        assert_eq!(r.next(&[0]).unwrap(), 1);
        assert!(matches!(r.next(&[0, 1]), Err(Error::EndOfSequence(2))));
    }

    #[test]
    fn periodic_wraps() {
        let w = Word::parse("011", Alphabet::binary()).unwrap();
        let mut r = PeriodicReality::new(w).unwrap();
        let got: Vec<Symbol> = (0..7).map(|i| r.next(&vec![0; i]).unwrap()).collect();
        assert_eq!(got, vec![0, 1, 1, 0, 1, 1, 0]);
    }

    #[test]
    fn markov_sampler_is_reproducible() {
        let rows = vec![
            Distribution::new(vec![0.7, 0.3]).unwrap(),
            Distribution::new(vec![0.2, 0.8]).unwrap(),
        ];
        let kernel = MarkovKernel::new(1, Alphabet::binary(), rows).unwrap();
        let sample = |seed: u64| -> Vec<Symbol> {
            let mut r = MarkovReality::new(kernel.clone(), seed).unwrap();
            let mut hist: Vec<Symbol> = Vec::new();
            for _ in 0..50 {
                let s = r.next(&hist).unwrap();
                hist.push(s);
            }
            hist
        };
        assert_eq!(sample(7), sample(7));
        assert_ne!(sample(7), sample(8));
    }

    #[test]
    fn iid_sampler_hits_both_symbols() {
        let p = Distribution::new(vec![0.5, 0.5]).unwrap();
        let mut r = MarkovReality::iid(p, Alphabet::binary(), 1).unwrap();
        let mut hist: Vec<Symbol> = Vec::new();
        for _ in 0..100 {
            let s = r.next(&hist).unwrap();
            hist.push(s);
        }
        assert!(hist.contains(&0) && hist.contains(&1));
    }

    #[test]
    fn iid_frequencies_track_bias() {
        let p = Distribution::new(vec![0.9, 0.1]).unwrap();
        let mut r = MarkovReality::iid(p, Alphabet::binary(), 3).unwrap();
        let mut hist: Vec<Symbol> = Vec::new();
        for _ in 0..2000 {
            let s = r.next(&hist).unwrap();
            hist.push(s);
        }
        let zeros = hist.iter().filter(|&&s| s == 0).count();
        assert!(zeros > 1600, "got {zeros} zeros out of 2000");
    }

    #[test]
    fn biased_flip_moves_mass_to_least_likely() {
        let rows = vec![
            Distribution::new(vec![0.7, 0.3]).unwrap(),
            Distribution::new(vec![0.2, 0.8]).unwrap(),
        ];
        let kernel = MarkovKernel::new(1, Alphabet::binary(), rows).unwrap();
        let flipped = biased_flip(&kernel, &[0], 0.5).unwrap();
        // row 0: (1-eps)*(0.7,0.3) + eps*delta_1 = (0.35, 0.65)
        assert!((flipped.prob(0, &[0]) - 0.35).abs() < 1e-15);
        assert!((flipped.prob(1, &[0]) - 0.65).abs() < 1e-15);
        // untouched row
        assert_eq!(flipped.prob(1, &[1]), 0.8);
        assert!(biased_flip(&kernel, &[0], 0.0).is_err());
        assert!(biased_flip(&kernel, &[0, 1], 0.5).is_err());
    }
}
