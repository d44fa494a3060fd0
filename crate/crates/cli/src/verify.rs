//! Verification suites: exhaustive and randomized checks of the
//! identities and inequalities the library is built on. Each suite
//! returns a machine-readable report with a counterexample word on
//! failure.

use num::{BigInt, BigRational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use gtp_core::analysis::{divergence_decomposition, r_hat, ziv_delta_bound};
use gtp_core::count::{count_cyclic, count_cyclic_extended};
use gtp_core::game::{run, Forecaster};
use gtp_core::lz;
use gtp_core::markov::{Distribution, MarkovKernel};
use gtp_core::realities::{MarkovReality, Reality, ReplayReality};
use gtp_core::strategies::{by_name, ld_capital_exact};
use gtp_core::{Alphabet, Symbol, Word};

use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: u64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

impl SuiteReport {
    fn pass(suite: &str, cases: u64) -> Self {
        Self {
            suite: suite.into(),
            cases,
            passed: true,
            counterexample: None,
        }
    }

    fn fail(suite: &str, cases: u64, witness: String) -> Self {
        Self {
            suite: suite.into(),
            cases,
            passed: false,
            counterexample: Some(witness),
        }
    }
}

/// Knobs shared by the suites; `None` picks each suite's default scale.
#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    pub max_len: Option<usize>,
    pub instances: Option<usize>,
    pub seed: Option<u64>,
}

pub const SUITE_NAMES: &[&str] = &[
    "lemma-2.2",
    "ziv",
    "lemma-2.5",
    "eq3",
    "martingale",
    "ld-closed-form",
];

pub fn run_suite(name: &str, options: VerifyOptions) -> Result<SuiteReport, CliError> {
    match name {
        "lemma-2.2" => Ok(cyclic_identities_suite(options.max_len.unwrap_or(12))),
        "ziv" => parsing_inequality_suite(options.max_len.unwrap_or(14)),
        "lemma-2.5" => decomposition_suite(
            options.instances.unwrap_or(500),
            options.seed.unwrap_or(2),
        ),
        "eq3" => likelihood_ratio_suite(
            options.instances.unwrap_or(100),
            options.seed.unwrap_or(3),
        ),
        "martingale" => martingale_suite(options.max_len.unwrap_or(10)),
        "ld-closed-form" => Ok(ld_closed_form_suite(options.max_len.unwrap_or(12))),
        other => Err(format!(
            "unknown suite {other:?} (expected one of {})",
            SUITE_NAMES.join(", ")
        )
        .into()),
    }
}

fn for_each_word(a: usize, len: usize, mut f: impl FnMut(&Word) -> bool) -> Option<Word> {
    let alphabet = Alphabet::new(a).unwrap();
    let mut symbols = vec![0 as Symbol; len];
    loop {
        let word = Word::new(symbols.clone(), alphabet).unwrap();
        if !f(&word) {
            return Some(word);
        }
        let mut i = len;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if (symbols[i] as usize) < a - 1 {
                symbols[i] += 1;
                break;
            }
            symbols[i] = 0;
        }
    }
}

/// The successor-count identities, integer-exact, exhaustively over
/// A in {2,3} and all words up to `max_len`.
fn cyclic_identities_suite(max_len: usize) -> SuiteReport {
    let mut cases = 0u64;
    for a in [2usize, 3] {
        for n in 2..=max_len {
            let witness = for_each_word(a, n, |word| {
                cases += 1;
                cyclic_identities_hold(word)
            });
            if let Some(word) = witness {
                return SuiteReport::fail("lemma-2.2", cases, word.render(true));
            }
        }
    }
    SuiteReport::pass("lemma-2.2", cases)
}

fn cyclic_identities_hold(word: &Word) -> bool {
    let n = word.len();
    let a = word.alphabet();
    for len in 1..n {
        let ctx = count_cyclic(word, len).unwrap();
        let ext = count_cyclic_extended(word, len + 1).unwrap();
        if ctx.total() != n as u64 || ext.total() != n as u64 {
            return false;
        }
        // row sums: sum_b T(ctx . b) = T(ctx)
        for (pattern, t) in ctx.iter_positive() {
            let mut extended = pattern.clone();
            extended.push(0);
            let row_sum: u64 = a
                .symbols()
                .map(|b| {
                    *extended.last_mut().unwrap() = b;
                    ext.get(&extended)
                })
                .sum();
            if row_sum != t {
                return false;
            }
        }
        // column sums: sum_first T(first . tail) = T(tail), tail of length len
        for (pattern, t) in ctx.iter_positive() {
            let mut extended = vec![0 as Symbol];
            extended.extend_from_slice(&pattern);
            let col_sum: u64 = a
                .symbols()
                .map(|first| {
                    extended[0] = first;
                    ext.get(&extended)
                })
                .sum();
            if col_sum != t {
                return false;
            }
        }
    }
    true
}

/// The parsing-complexity inequality
/// (c/n) ln c <= -(1/n) ln R-hat + delta, exhaustively for A = 2,
/// contexts of length 1 and 2, all words up to `max_len`.
fn parsing_inequality_suite(max_len: usize) -> Result<SuiteReport, CliError> {
    let mut cases = 0u64;
    for len in [1usize, 2] {
        for n in (len + 1)..=max_len {
            let mut error: Option<CliError> = None;
            let witness = for_each_word(2, n, |word| {
                cases += 1;
                match parsing_inequality_holds(word, len) {
                    Ok(ok) => ok,
                    Err(e) => {
                        error = Some(e);
                        false
                    }
                }
            });
            if let Some(e) = error {
                return Err(e);
            }
            if let Some(word) = witness {
                return Ok(SuiteReport::fail("ziv", cases, word.render(true)));
            }
        }
    }
    Ok(SuiteReport::pass("ziv", cases))
}

pub fn parsing_inequality_holds(word: &Word, len: usize) -> Result<bool, CliError> {
    let n = word.len() as f64;
    let c = lz::complexity(word) as f64;
    let lhs = c / n * c.ln();
    let rhs = -r_hat(word, len)? / n + ziv_delta_bound(word, len)?;
    Ok(lhs <= rhs + 1e-9)
}

fn random_distribution(rng: &mut ChaCha8Rng, a: usize) -> Distribution {
    let raw: Vec<f64> = (0..a).map(|_| rng.gen_range(0.05..1.0)).collect();
    let sum: f64 = raw.iter().sum();
    Distribution::new(raw.into_iter().map(|x| x / sum).collect()).unwrap()
}

pub fn random_kernel(rng: &mut ChaCha8Rng, order: usize, a: usize) -> MarkovKernel {
    let alphabet = Alphabet::new(a).unwrap();
    let rows = (0..a.pow(order as u32))
        .map(|_| random_distribution(rng, a))
        .collect();
    MarkovKernel::new(order, alphabet, rows).unwrap()
}

fn sample_word(kernel: &MarkovKernel, n: usize, seed: u64) -> Result<Word, CliError> {
    let mut reality = MarkovReality::new(kernel.clone(), seed)?;
    let mut word = Word::empty(kernel.alphabet());
    for _ in 0..n {
        let s = reality.next(word.symbols())?;
        word.push(s);
    }
    Ok(word)
}

/// The divergence-decomposition identity on random (kernel, word, l)
/// instances, two sides evaluated independently.
fn decomposition_suite(instances: usize, seed: u64) -> Result<SuiteReport, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..instances {
        let k = rng.gen_range(1..=2);
        let a = rng.gen_range(2..=3);
        let len = rng.gen_range(k..=3);
        let n = rng.gen_range((len + 1).max(4)..=10_000);
        let kernel = random_kernel(&mut rng, k, a);
        let word = sample_word(&kernel, n, rng.gen())?;
        let forecaster = Forecaster::markov_stationary_start(kernel)?;
        let d = divergence_decomposition(&word, &forecaster, len)?;
        let gap = (d.total - d.boundary_term - d.weighted_kl).abs();
        if gap >= 1e-9 || d.weighted_kl < 0.0 {
            return Ok(SuiteReport::fail(
                "lemma-2.5",
                case as u64 + 1,
                format!("k={k} l={len} n={n}: gap {gap:e}"),
            ));
        }
    }
    Ok(SuiteReport::pass("lemma-2.5", instances as u64))
}

/// The capital identity ln K = ln Q - ln P~ over seeded runs with mixed
/// forecasters and strategies.
fn likelihood_ratio_suite(instances: usize, seed: u64) -> Result<SuiteReport, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 10_000;
    for case in 0..instances {
        let a = rng.gen_range(2..=3);
        let alphabet = Alphabet::new(a)?;
        let markov_forecaster = rng.gen_bool(0.5);
        let forecaster = if markov_forecaster {
            Forecaster::markov_stationary_start(random_kernel(&mut rng, 1, a))?
        } else {
            Forecaster::constant(random_distribution(&mut rng, a))
        };
        // the add-one strategy only plays constant-forecast games
        let names: &[&str] = if markov_forecaster {
            &["lz", "lz-restart"]
        } else {
            &["lz", "ld", "lz-restart"]
        };
        let name = names[rng.gen_range(0..names.len())];
        let mut skeptic = by_name(name, alphabet, None)?;
        let source = random_kernel(&mut rng, 1, a);
        let word = sample_word(&source, n, rng.gen())?;
        let mut reality = ReplayReality::new(word);
        let traj = run(&forecaster, skeptic.as_mut(), &mut reality, n)?;
        let gap = (traj.final_log_capital() - (traj.log_q - traj.log_p)).abs();
        if gap >= 1e-9 {
            return Ok(SuiteReport::fail(
                "eq3",
                case as u64 + 1,
                format!("{name}, markov={markov_forecaster}: gap {gap:e}"),
            ));
        }
    }
    Ok(SuiteReport::pass("eq3", instances as u64))
}

/// sum over Omega^n of P~(w) K(w) = 1 for the betting strategies,
/// exhaustively for A = 2 up to horizon `max_len`.
fn martingale_suite(max_len: usize) -> Result<SuiteReport, CliError> {
    let alphabet = Alphabet::binary();
    let forecasts = [
        Distribution::uniform(alphabet),
        Distribution::new(vec![0.3, 0.7])?,
    ];
    let mut cases = 0u64;
    for name in ["lz", "ld"] {
        for p in &forecasts {
            let forecaster = Forecaster::constant(p.clone());
            for n in 1..=max_len {
                let mut total = 0.0;
                let mut error: Option<CliError> = None;
                for_each_word(2, n, |word| {
                    cases += 1;
                    let mut skeptic = match by_name(name, alphabet, None) {
                        Ok(s) => s,
                        Err(e) => {
                            error = Some(e.into());
                            return false;
                        }
                    };
                    let mut reality = ReplayReality::new(word.clone());
                    match run(&forecaster, skeptic.as_mut(), &mut reality, n) {
                        Ok(traj) => {
                            let log_p: f64 =
                                word.symbols().iter().map(|&s| p.prob(s).ln()).sum();
                            total += (traj.final_log_capital() + log_p).exp();
                            true
                        }
                        Err(e) => {
                            error = Some(e.into());
                            false
                        }
                    }
                });
                if let Some(e) = error {
                    return Err(e);
                }
                if (total - 1.0).abs() >= 1e-9 {
                    return Ok(SuiteReport::fail(
                        "martingale",
                        cases,
                        format!("{name}, n={n}: total {total}"),
                    ));
                }
            }
        }
    }
    Ok(SuiteReport::pass("martingale", cases))
}

/// The add-one strategy's capital against the multinomial closed form,
/// exact in rationals, exhaustively for A = 2 up to `max_len`.
fn ld_closed_form_suite(max_len: usize) -> SuiteReport {
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let quarter = BigRational::new(BigInt::from(1), BigInt::from(4));
    let three_quarters = BigRational::new(BigInt::from(3), BigInt::from(4));
    let forecasts = [
        vec![half.clone(), half],
        vec![quarter, three_quarters],
    ];
    let one = BigRational::from_integer(1.into());
    let factorial = |n: u64| (1..=n).fold(one.clone(), |acc, i| acc * BigRational::from_integer(i.into()));
    let mut cases = 0u64;
    for p in &forecasts {
        for n in 1..=max_len {
            let witness = for_each_word(2, n, |word| {
                cases += 1;
                let strategy_capital = ld_capital_exact(word, p);
                let mut counts = [0u64; 2];
                let mut p_word = one.clone();
                for &s in word.symbols() {
                    counts[s as usize] += 1;
                    p_word *= p[s as usize].clone();
                }
                let closed = factorial(counts[0]) * factorial(counts[1])
                    / (p_word * factorial((n + 1) as u64));
                strategy_capital == closed
            });
            if let Some(word) = witness {
                return SuiteReport::fail("ld-closed-form", cases, word.render(true));
            }
        }
    }
    SuiteReport::pass("ld-closed-form", cases)
}
