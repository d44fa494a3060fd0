//! Diagnostics mirroring the convergence machinery: cyclic
//! self-likelihood, the divergence decomposition, the parsing-complexity
//! slack bound, the add-one code's randomness deficiency, and the
//! chi-square-style deviation statistic.
//!
//! All values are in nats except `ld_deficiency`, which reports in
//! base-A digits as that is the codelength's native unit.

use statrs::function::gamma::ln_gamma;

use crate::count::{count_cyclic, count_ordinary, CountTable};
use crate::error::{Error, Result};
use crate::game::Forecaster;
use crate::lz;
use crate::markov::{kl_divergence, Distribution};
use crate::sum::KahanSum;
use crate::word::{Symbol, Word};

/// Successor counts: occurrences of each length-(l+1) window in the word
/// extended by its own l-prefix.
fn successor_counts(word: &Word, len: usize) -> Result<CountTable> {
    crate::count::count_cyclic_extended(word, len + 1)
}

/// ln R-hat: the log-likelihood of the word under its own order-l
/// empirical kernel, with the first l contexts wrapped cyclically.
/// Finite for every word, since each factor corresponds to a positive
/// cyclic count.
pub fn r_hat(word: &Word, len: usize) -> Result<f64> {
    let n = word.len();
    if len < 1 || len >= n {
        return Err(Error::InvalidArgument(format!(
            "context length {len} must satisfy 1 <= l < {n}"
        )));
    }
    let ctx_counts = count_cyclic(word, len)?;
    let ext_counts = successor_counts(word, len)?;
    let mut window = vec![0 as Symbol; len + 1];
    let mut total = KahanSum::new();
    for idx in 0..n {
        for (t, slot) in window.iter_mut().enumerate() {
            *slot = word.cyclic(idx + n - len + t);
        }
        total.add(
            (ext_counts.get(&window) as f64).ln() - (ctx_counts.get(&window[..len]) as f64).ln(),
        );
    }
    Ok(total.value())
}

/// The two halves of the identity
/// -ln P~(w) + ln R-hat = boundary_term + weighted_kl.
#[derive(Debug, Clone, Copy)]
pub struct DivergenceDecomposition {
    /// -ln P~(w_1^l) + sum_{i<=l} ln M(w_i | cyclic k-context).
    pub boundary_term: f64,
    /// sum_ctx T_n(ctx) D(empirical row || kernel row), always >= 0.
    pub weighted_kl: f64,
    /// -ln P~(w_1^n) + ln R-hat, evaluated independently of the parts.
    pub total: f64,
}

/// Evaluates both sides of the decomposition identity independently.
/// Requires a Markov forecaster of order k <= l and l < n.
pub fn divergence_decomposition(
    word: &Word,
    forecaster: &Forecaster,
    len: usize,
) -> Result<DivergenceDecomposition> {
    let kernel = forecaster.kernel().ok_or_else(|| {
        Error::InvalidArgument("divergence decomposition needs a markov forecaster".into())
    })?;
    let k = kernel.order();
    let n = word.len();
    if len < k {
        return Err(Error::InvalidArgument(format!(
            "context length {len} must be >= kernel order {k}"
        )));
    }
    if len >= n {
        return Err(Error::InvalidArgument(format!(
            "context length {len} must be < word length {n}"
        )));
    }

    let total = -forecaster.log_likelihood(word) + r_hat(word, len)?;

    let mut boundary = 0.0;
    let mut k_ctx = vec![0 as Symbol; k];
    for i in 0..len {
        let s = word.symbols()[i];
        boundary -= forecaster.announce(&word.symbols()[..i]).prob(s).ln();
        for (t, slot) in k_ctx.iter_mut().enumerate() {
            *slot = word.cyclic(i + n - k + t);
        }
        boundary += kernel.prob(s, &k_ctx).ln();
    }

    let ctx_counts = count_cyclic(word, len)?;
    let ext_counts = successor_counts(word, len)?;
    let a = word.alphabet().size();
    let mut weighted_kl = KahanSum::new();
    for (ctx, t) in ctx_counts.iter_positive() {
        let mut pattern = ctx.clone();
        pattern.push(0);
        let row: Vec<f64> = (0..a)
            .map(|b| {
                *pattern.last_mut().unwrap() = b as Symbol;
                ext_counts.get(&pattern) as f64 / t as f64
            })
            .collect();
        let empirical = Distribution::nonnegative(row)?;
        let model = kernel.row(&ctx[len - k..]);
        weighted_kl.add(t as f64 * kl_divergence(&empirical, model)?);
    }

    Ok(DivergenceDecomposition {
        boundary_term: boundary,
        weighted_kl: weighted_kl.value(),
        total,
    })
}

/// The computable upper bound on the parsing-complexity slack:
/// (c/n) ln(n/c) + (1 + c/n) ln(c/n + 1) + (c/n) l ln A.
pub fn ziv_delta_bound(word: &Word, len: usize) -> Result<f64> {
    let n = word.len();
    if len < 1 || len >= n {
        return Err(Error::InvalidArgument(format!(
            "context length {len} must satisfy 1 <= l < {n}"
        )));
    }
    let c = lz::complexity(word) as f64;
    let n = n as f64;
    let a = word.alphabet().size() as f64;
    let ratio = c / n;
    Ok(ratio * (n / c).ln() + (1.0 + ratio) * (ratio + 1.0).ln() + ratio * len as f64 * a.ln())
}

/// The exact slack (c/n) H(U, V), where (U, V) is the empirical law of
/// (substring length, preceding cyclic l-context) over the parse with
/// the residue merged into the last substring. Always at most
/// `ziv_delta_bound` and enough for the inequality
/// (c/n) ln c <= -(1/n) ln R-hat + slack.
pub fn ziv_delta_exact(word: &Word, len: usize) -> Result<f64> {
    let n = word.len();
    if len < 1 || len >= n {
        return Err(Error::InvalidArgument(format!(
            "context length {len} must satisfy 1 <= l < {n}"
        )));
    }
    let outcome = lz::parse(word);
    let c = outcome.complexity as usize;
    // substring start positions; residue merges into the last substring
    let mut starts = Vec::with_capacity(c);
    let mut pos = 0;
    for p in &outcome.phrases {
        starts.push(pos);
        pos += p.len();
    }
    let mut histogram: std::collections::HashMap<(usize, Vec<Symbol>), u64> =
        std::collections::HashMap::new();
    for (j, &start) in starts.iter().enumerate() {
        let end = if j + 1 < starts.len() { starts[j + 1] } else { n };
        let ctx: Vec<Symbol> = (0..len).map(|t| word.cyclic(start + n - len + t)).collect();
        *histogram.entry((end - start, ctx)).or_insert(0) += 1;
    }
    let c = c as f64;
    let mut entropy = 0.0;
    for &count in histogram.values() {
        let pi = count as f64 / c;
        entropy -= pi * pi.ln();
    }
    Ok(c / n as f64 * entropy)
}

/// Randomness deficiency of the add-one (type-class) code against the
/// iid reference measure, in base-A digits:
/// log_A [ (A-1)! prod_a S_n(a)! / (prod_i p(w_i) (n+A-1)!) ],
/// factorials evaluated by log-gamma.
pub fn ld_deficiency(word: &Word, p: &Distribution) -> Result<f64> {
    let a = word.alphabet().size();
    if p.len() != a {
        return Err(Error::InvalidArgument(
            "reference distribution width mismatch".into(),
        ));
    }
    if !p.is_strictly_positive() {
        return Err(Error::InvalidArgument(
            "reference distribution must be strictly positive".into(),
        ));
    }
    let n = word.len();
    let mut nats = ln_gamma(a as f64) - ln_gamma((n + a) as f64);
    if n > 0 {
        let counts = count_ordinary(word, 1)?;
        for s in word.alphabet().symbols() {
            nats += ln_gamma(counts.get(&[s]) as f64 + 1.0);
            nats -= counts.get(&[s]) as f64 * p.prob(s).ln();
        }
    }
    Ok(nats / (a as f64).ln())
}

/// The scaled quadratic deviation (n / ln n) sum_a (P-hat(a) - p(a))^2 / p(a).
pub fn fisher_statistic(word: &Word, p: &Distribution) -> Result<f64> {
    let n = word.len();
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "deviation statistic needs n >= 2, got {n}"
        )));
    }
    if p.len() != word.alphabet().size() {
        return Err(Error::InvalidArgument(
            "reference distribution width mismatch".into(),
        ));
    }
    let counts = count_ordinary(word, 1)?;
    let n = n as f64;
    let mut sum = 0.0;
    for s in word.alphabet().symbols() {
        let hat = counts.get(&[s]) as f64 / n;
        let diff = hat - p.prob(s);
        sum += diff * diff / p.prob(s);
    }
    Ok(n / n.ln() * sum)
}

/// -ln Q_LZ(word) / n; zero for the empty word.
pub fn compression_rate(word: &Word) -> f64 {
    if word.is_empty() {
        return 0.0;
    }
    lz::log_q_lz(word) / word.len() as f64
}
