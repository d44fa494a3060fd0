//! Markov kernels of finite order and their stationary structure.
//!
//! A kth-order kernel is a strictly positive table of conditional
//! distributions over the alphabet, one row per context of length k.
//! Empirical kernels built from cyclic counts relax strict positivity.
//! The stationary distribution is computed by power iteration on the
//! first-order embedding over the super-alphabet of contexts; for k > 1
//! the iteration matrix is the kth power of the embedding, which is
//! strictly positive and so converges geometrically.
//!
//! All logarithms are natural; base conversions happen at reporting
//! boundaries only.

use crate::count::count_cyclic;
use crate::error::{Error, Result};
use crate::word::{Alphabet, Symbol, Word};

const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// A probability distribution over the alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    /// A strictly positive distribution. Sums within 1e-9 of one are
    /// renormalized; larger discrepancies are rejected.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::InvalidArgument(
                "distribution needs at least two entries".into(),
            ));
        }
        if probs.iter().any(|&p| !(p > 0.0) || p > 1.0) {
            return Err(Error::InvalidArgument(format!(
                "distribution entries must lie in (0, 1]: {probs:?}"
            )));
        }
        Self::renormalized(probs)
    }

    /// A nonnegative distribution (empirical rows may contain zeros).
    pub fn nonnegative(probs: Vec<f64>) -> Result<Self> {
        if probs.iter().any(|&p| !(p >= 0.0) || p > 1.0) {
            return Err(Error::InvalidArgument(format!(
                "distribution entries must lie in [0, 1]: {probs:?}"
            )));
        }
        Self::renormalized(probs)
    }

    fn renormalized(mut probs: Vec<f64>) -> Result<Self> {
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "distribution sums to {sum}, expected 1"
            )));
        }
        for p in &mut probs {
            *p /= sum;
        }
        Ok(Self { probs })
    }

    pub fn uniform(alphabet: Alphabet) -> Self {
        let a = alphabet.size();
        Self {
            probs: vec![1.0 / a as f64; a],
        }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn prob(&self, s: Symbol) -> f64 {
        self.probs[s as usize]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.probs.iter().all(|&p| p > 0.0)
    }
}

/// Kullback-Leibler divergence D(q || p) in nats, with 0 ln 0 := 0.
///
/// `q` may contain zeros (empirical rows); `p` must be positive wherever
/// `q` is.
pub fn kl_divergence(q: &Distribution, p: &Distribution) -> Result<f64> {
    if q.len() != p.len() {
        return Err(Error::InvalidArgument("dimension mismatch".into()));
    }
    let mut d = 0.0;
    for (&qa, &pa) in q.probs.iter().zip(p.probs.iter()) {
        if qa > 0.0 {
            if pa <= 0.0 {
                return Err(Error::InvalidArgument(
                    "q puts mass where p is zero".into(),
                ));
            }
            d += qa * (qa / pa).ln();
        }
    }
    Ok(d.max(0.0))
}

/// A kth-order Markov kernel: one distribution row per context in Omega^k.
///
/// Rows are stored in lexicographic context order (big-endian index).
/// Strictly positive unless flagged `empirical`.
#[derive(Debug, Clone)]
pub struct MarkovKernel {
    order: usize,
    alphabet: Alphabet,
    rows: Vec<Distribution>,
    empirical: bool,
}

impl MarkovKernel {
    pub fn new(order: usize, alphabet: Alphabet, rows: Vec<Distribution>) -> Result<Self> {
        Self::build(order, alphabet, rows, false)
    }

    pub fn new_empirical(
        order: usize,
        alphabet: Alphabet,
        rows: Vec<Distribution>,
    ) -> Result<Self> {
        Self::build(order, alphabet, rows, true)
    }

    fn build(
        order: usize,
        alphabet: Alphabet,
        rows: Vec<Distribution>,
        empirical: bool,
    ) -> Result<Self> {
        if order < 1 {
            return Err(Error::InvalidArgument("kernel order must be >= 1".into()));
        }
        let contexts = alphabet
            .size()
            .checked_pow(order as u32)
            .ok_or_else(|| Error::InvalidArgument("context space overflows".into()))?;
        if rows.len() != contexts {
            return Err(Error::InvalidArgument(format!(
                "expected {contexts} rows, got {}",
                rows.len()
            )));
        }
        for row in &rows {
            if row.len() != alphabet.size() {
                return Err(Error::InvalidArgument("row width mismatch".into()));
            }
            if !empirical && !row.is_strictly_positive() {
                return Err(Error::InvalidArgument(
                    "kernel rows must be strictly positive".into(),
                ));
            }
        }
        Ok(Self {
            order,
            alphabet,
            rows,
            empirical,
        })
    }

    /// An iid kernel of order 1 whose every row equals `p`.
    pub fn iid(p: Distribution, alphabet: Alphabet) -> Result<Self> {
        let rows = vec![p; alphabet.size()];
        Self::new(1, alphabet, rows)
    }

    pub fn uniform(order: usize, alphabet: Alphabet) -> Self {
        let rows = vec![Distribution::uniform(alphabet); alphabet.size().pow(order as u32)];
        Self {
            order,
            alphabet,
            rows,
            empirical: false,
        }
    }

    /// Loads the structured text config: the tokens `k A` followed by
    /// A^k rows of A probabilities in lexicographic context order.
    /// Lines starting with `#` are comments.
    pub fn from_config(text: &str) -> Result<Self> {
        let mut tokens = text
            .lines()
            .filter(|l| !l.trim_start().starts_with('#'))
            .flat_map(|l| l.split_whitespace());
        let mut next = |what: &str| -> Result<&str> {
            tokens
                .next()
                .ok_or_else(|| Error::Parse(format!("kernel config: missing {what}")))
        };
        let order: usize = next("order")?
            .parse()
            .map_err(|_| Error::Parse("kernel config: bad order".into()))?;
        let a: usize = next("alphabet size")?
            .parse()
            .map_err(|_| Error::Parse("kernel config: bad alphabet size".into()))?;
        let alphabet = Alphabet::new(a)?;
        let contexts = a
            .checked_pow(order as u32)
            .ok_or_else(|| Error::Parse("kernel config: context space overflows".into()))?;
        let mut rows = Vec::with_capacity(contexts);
        for _ in 0..contexts {
            let mut row = Vec::with_capacity(a);
            for _ in 0..a {
                let p: f64 = next("probability")?
                    .parse()
                    .map_err(|_| Error::Parse("kernel config: bad probability".into()))?;
                row.push(p);
            }
            rows.push(Distribution::new(row)?);
        }
        if tokens.next().is_some() {
            return Err(Error::Parse("kernel config: trailing tokens".into()));
        }
        Self::new(order, alphabet, rows)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn is_empirical(&self) -> bool {
        self.empirical
    }

    pub fn context_index(&self, context: &[Symbol]) -> usize {
        debug_assert_eq!(context.len(), self.order);
        let a = self.alphabet.size();
        context.iter().fold(0usize, |acc, &s| acc * a + s as usize)
    }

    pub fn row(&self, context: &[Symbol]) -> &Distribution {
        &self.rows[self.context_index(context)]
    }

    pub fn rows(&self) -> &[Distribution] {
        &self.rows
    }

    /// M(b | context).
    pub fn prob(&self, b: Symbol, context: &[Symbol]) -> f64 {
        self.row(context).prob(b)
    }

    pub fn context_count(&self) -> usize {
        self.rows.len()
    }
}

/// Expands a context index back into its symbol sequence.
pub fn context_of_index(index: usize, order: usize, alphabet: Alphabet) -> Vec<Symbol> {
    let a = alphabet.size();
    let mut ctx = vec![0 as Symbol; order];
    let mut rem = index;
    for slot in ctx.iter_mut().rev() {
        *slot = (rem % a) as Symbol;
        rem /= a;
    }
    ctx
}

/// The first-order embedding over the super-alphabet Omega^k: a square
/// column-stochastic matrix with entries
/// `M~(a | b) = M(a_k | b)` when a_1^{k-1} = b_2^k, else 0.
/// Stored as `matrix[to][from]`.
fn embedding_matrix(kernel: &MarkovKernel) -> Vec<Vec<f64>> {
    let k = kernel.order;
    let a = kernel.alphabet.size();
    let m = kernel.context_count();
    let mut matrix = vec![vec![0.0; m]; m];
    for from in 0..m {
        let ctx = context_of_index(from, k, kernel.alphabet);
        for sym in 0..a {
            let mut shifted = ctx[1..].to_vec();
            shifted.push(sym as Symbol);
            let to = kernel.context_index(&shifted);
            matrix[to][from] = kernel.rows[from].prob(sym as Symbol);
        }
    }
    matrix
}

/// The embedding as a first-order kernel over an alphabet of size A^k.
/// For k = 1 this is the kernel itself.
pub fn embed_first_order(kernel: &MarkovKernel) -> Result<MarkovKernel> {
    let matrix = embedding_matrix(kernel);
    let m = matrix.len();
    let super_alphabet = Alphabet::new(m)?;
    let mut rows = Vec::with_capacity(m);
    for from in 0..m {
        let row: Vec<f64> = (0..m).map(|to| matrix[to][from]).collect();
        rows.push(Distribution::nonnegative(row)?);
    }
    MarkovKernel::new_empirical(1, super_alphabet, rows)
}

fn mat_mul(lhs: &[Vec<f64>], rhs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = lhs.len();
    let mut out = vec![vec![0.0; m]; m];
    for (i, row_out) in out.iter_mut().enumerate() {
        for (j, cell) in row_out.iter_mut().enumerate() {
            *cell = (0..m).map(|c| lhs[i][c] * rhs[c][j]).sum();
        }
    }
    out
}

fn mat_vec(matrix: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    matrix
        .iter()
        .map(|row| row.iter().zip(v).map(|(&m, &x)| m * x).sum())
        .collect()
}

/// The stationary distribution over contexts Omega^k.
#[derive(Debug, Clone)]
pub struct StationaryDistribution {
    order: usize,
    alphabet: Alphabet,
    probs: Vec<f64>,
    residual: f64,
}

impl StationaryDistribution {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn prob(&self, context: &[Symbol]) -> f64 {
        debug_assert_eq!(context.len(), self.order);
        let a = self.alphabet.size();
        let idx = context.iter().fold(0usize, |acc, &s| acc * a + s as usize);
        self.probs[idx]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Final infinity-norm residual of the fixed-point equation.
    pub fn residual(&self) -> f64 {
        self.residual
    }
}

pub const STATIONARY_TOL: f64 = 1e-12;
pub const STATIONARY_MAX_ITER: usize = 1_000_000;

/// Solves pi = M~ pi by power iteration started from the uniform vector.
///
/// The iteration matrix is the kth power of the embedding when k > 1,
/// which is strictly positive for a strictly positive kernel; residuals
/// are always measured against the one-step equation.
pub fn stationary(
    kernel: &MarkovKernel,
    tol: f64,
    max_iter: usize,
) -> Result<StationaryDistribution> {
    if kernel.is_empirical() {
        return Err(Error::InvalidArgument(
            "stationary distribution requires a strictly positive kernel".into(),
        ));
    }
    let one_step = embedding_matrix(kernel);
    let mut iter_matrix = one_step.clone();
    for _ in 1..kernel.order {
        iter_matrix = mat_mul(&one_step, &iter_matrix);
    }
    let m = one_step.len();
    let mut v = vec![1.0 / m as f64; m];
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        let next = mat_vec(&iter_matrix, &v);
        let sum: f64 = next.iter().sum();
        let next: Vec<f64> = next.iter().map(|x| x / sum).collect();
        let fixed = mat_vec(&one_step, &next);
        residual = fixed
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        v = next;
        if residual < tol {
            return Ok(StationaryDistribution {
                order: kernel.order,
                alphabet: kernel.alphabet,
                probs: v,
                residual,
            });
        }
    }
    Err(Error::NumericalFailure {
        what: "power iteration did not converge".into(),
        residual,
    })
}

/// Convenience wrapper using the default tolerance and iteration budget.
pub fn stationary_default(kernel: &MarkovKernel) -> Result<StationaryDistribution> {
    stationary(kernel, STATIONARY_TOL, STATIONARY_MAX_ITER)
}

/// The stationary joint law over Omega^l:
/// P(a^l) = pi(a^k) * prod_{i=k+1}^l M(a_i | a_{i-k}^{i-1}).
#[derive(Debug, Clone)]
pub struct JointDistribution {
    len: usize,
    alphabet: Alphabet,
    probs: Vec<f64>,
}

impl JointDistribution {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn prob(&self, word: &[Symbol]) -> f64 {
        debug_assert_eq!(word.len(), self.len);
        let a = self.alphabet.size();
        let idx = word.iter().fold(0usize, |acc, &s| acc * a + s as usize);
        self.probs[idx]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

pub fn joint_stationary(
    kernel: &MarkovKernel,
    pi: &StationaryDistribution,
    len: usize,
) -> Result<JointDistribution> {
    let k = kernel.order();
    if len < k {
        return Err(Error::InvalidArgument(format!(
            "joint length {len} must be >= kernel order {k}"
        )));
    }
    let a = kernel.alphabet().size();
    let cells = a
        .checked_pow(len as u32)
        .ok_or_else(|| Error::InvalidArgument("joint space overflows".into()))?;
    let mut probs = Vec::with_capacity(cells);
    let mut word = vec![0 as Symbol; len];
    for idx in 0..cells {
        let mut rem = idx;
        for slot in word.iter_mut().rev() {
            *slot = (rem % a) as Symbol;
            rem /= a;
        }
        let mut p = pi.prob(&word[..k]);
        for i in k..len {
            p *= kernel.prob(word[i], &word[i - k..i]);
        }
        probs.push(p);
    }
    Ok(JointDistribution {
        len,
        alphabet: kernel.alphabet(),
        probs,
    })
}

/// Entropy rate in nats:
/// H(M) = -sum_ctx pi(ctx) sum_b M(b|ctx) ln M(b|ctx).
pub fn entropy_rate(kernel: &MarkovKernel, pi: &StationaryDistribution) -> f64 {
    let mut h = 0.0;
    for (idx, row) in kernel.rows().iter().enumerate() {
        let weight = pi.probs()[idx];
        for &p in row.probs() {
            if p > 0.0 {
                h -= weight * p * p.ln();
            }
        }
    }
    h.max(0.0)
}

/// The order-l empirical kernel of a word, built from cyclic counts.
/// Contexts that never occur get the uniform row; they carry zero weight
/// in every weighted sum.
pub fn empirical_kernel(word: &Word, len: usize) -> Result<MarkovKernel> {
    let alphabet = word.alphabet();
    let a = alphabet.size();
    let ctx_counts = count_cyclic(word, len)?;
    let ext_counts = crate::count::count_cyclic_extended(word, len + 1)?;
    let contexts = a.pow(len as u32);
    let mut rows = Vec::with_capacity(contexts);
    let mut ctx = vec![0 as Symbol; len];
    for idx in 0..contexts {
        let mut rem = idx;
        for slot in ctx.iter_mut().rev() {
            *slot = (rem % a) as Symbol;
            rem /= a;
        }
        let denom = ctx_counts.get(&ctx);
        if denom == 0 {
            rows.push(Distribution::uniform(alphabet));
            continue;
        }
        let mut row = Vec::with_capacity(a);
        let mut pattern = ctx.clone();
        pattern.push(0);
        for b in 0..a {
            *pattern.last_mut().unwrap() = b as Symbol;
            row.push(ext_counts.get(&pattern) as f64 / denom as f64);
        }
        rows.push(Distribution::nonnegative(row)?);
    }
    MarkovKernel::new_empirical(len, alphabet, rows)
}
