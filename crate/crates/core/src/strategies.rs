//! Betting strategies for predictive games.
//!
//! Strategies are expressed canonically as producers of a conditional
//! probability Q over the next symbol; the bet vector alpha is recovered
//! at the game boundary as alpha(a) = Q(a)/p(a), so the capital factor
//! for outcome w is exactly Q(w)/p(w). The converse direction turns any
//! prudent bet back into a distribution.
//!
//! Included strategies:
//! - `LzStrategy`: bets by the incremental-parsing candidate ratio.
//! - `LdStrategy`: the add-one (type-class) strategy for constant
//!   forecasts; its capital follows a multinomial closed form.
//! - `RestartStrategy`: banks the net session gain whenever the session
//!   capital crosses a threshold and restarts the inner strategy from a
//!   fresh state, keeping the banked part out of play.

use num::BigRational;

use crate::error::{Error, Result};
use crate::lz::ParseState;
use crate::markov::Distribution;
use crate::word::{Alphabet, Symbol, Word};

/// A bet as fractions of current capital, per symbol. May be negative.
#[derive(Debug, Clone)]
pub struct Bet {
    alpha: Vec<f64>,
}

impl Bet {
    pub fn new(alpha: Vec<f64>) -> Self {
        Self { alpha }
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// The capital factor 1 + sum_a alpha(a) (delta_w(a) - p(a)).
    pub fn factor(&self, outcome: Symbol, forecast: &Distribution) -> f64 {
        let stake: f64 = self
            .alpha
            .iter()
            .zip(forecast.probs())
            .map(|(&a, &p)| a * p)
            .sum();
        1.0 + self.alpha[outcome as usize] - stake
    }

    /// Prudence: the factor stays positive for every possible outcome.
    pub fn is_prudent(&self, forecast: &Distribution) -> bool {
        (0..self.alpha.len() as u8).all(|w| self.factor(w, forecast) > 0.0)
    }
}

/// The canonical bet for a conditional probability: alpha(a) = Q(a)/p(a).
pub fn q_to_alpha(q: &Distribution, p: &Distribution) -> Bet {
    let alpha = q
        .probs()
        .iter()
        .zip(p.probs())
        .map(|(&qa, &pa)| qa / pa)
        .collect();
    Bet { alpha }
}

/// The conditional probability induced by a prudent bet:
/// Q(w) = {1 + sum_a alpha(a)(delta_w(a) - p(a))} p(w).
pub fn alpha_to_q(bet: &Bet, p: &Distribution) -> Result<Distribution> {
    let mut probs = Vec::with_capacity(p.len());
    for w in 0..p.len() {
        let factor = bet.factor(w as Symbol, p);
        if factor <= 0.0 {
            return Err(Error::PrudenceViolation {
                step: 0,
                factor,
            });
        }
        probs.push(factor * p.prob(w as Symbol));
    }
    Distribution::new(probs)
}

/// A stateful betting policy announcing Q(. | history).
pub trait Strategy {
    /// The conditional probability for the next move given the forecast.
    fn announce(&mut self, forecast: &Distribution) -> Result<Distribution>;

    /// Reality's move, extending the history.
    fn observe(&mut self, outcome: Symbol);

    /// Capital moved to external storage by a restart wrapper; zero for
    /// plain strategies.
    fn banked(&self) -> f64 {
        0.0
    }
}

/// Never bets: Q = p, capital constant.
pub struct NoBetStrategy;

impl Strategy for NoBetStrategy {
    fn announce(&mut self, forecast: &Distribution) -> Result<Distribution> {
        Ok(forecast.clone())
    }

    fn observe(&mut self, _outcome: Symbol) {}
}

/// The incremental-parsing betting strategy. Ignores the forecast when
/// producing Q; the bet then depends on the forecast through
/// `q_to_alpha`.
pub struct LzStrategy {
    state: ParseState,
}

impl LzStrategy {
    pub fn new(alphabet: Alphabet) -> Self {
        Self {
            state: ParseState::new(alphabet),
        }
    }

    pub fn parse_state(&self) -> &ParseState {
        &self.state
    }
}

impl Strategy for LzStrategy {
    fn announce(&mut self, _forecast: &Distribution) -> Result<Distribution> {
        let a = self.state.alphabet().size();
        let probs: Vec<f64> = (0..a).map(|s| self.state.q(s as Symbol)).collect();
        Distribution::new(probs)
    }

    fn observe(&mut self, outcome: Symbol) {
        self.state.feed(outcome);
    }
}

/// The add-one counting strategy for the simple predictive game:
/// Q(a) = (S_{n-1}(a) + 1) / (n - 1 + A), equivalently
/// alpha_n(a) = (S_{n-1}(a) + 1) / (p(a)(n + A - 1)).
/// Only supports a constant forecast.
pub struct LdStrategy {
    counts: Vec<u64>,
    seen: usize,
    forecast: Option<Vec<f64>>,
}

impl LdStrategy {
    pub fn new(alphabet: Alphabet) -> Self {
        Self {
            counts: vec![0; alphabet.size()],
            seen: 0,
            forecast: None,
        }
    }
}

impl Strategy for LdStrategy {
    fn announce(&mut self, forecast: &Distribution) -> Result<Distribution> {
        match &self.forecast {
            None => self.forecast = Some(forecast.probs().to_vec()),
            Some(first) => {
                if first != forecast.probs() {
                    return Err(Error::UnsupportedProtocol(
                        "ld strategy requires a constant forecast".into(),
                    ));
                }
            }
        }
        let a = self.counts.len();
        let denom = (self.seen + a) as f64;
        let probs = self
            .counts
            .iter()
            .map(|&c| (c + 1) as f64 / denom)
            .collect();
        Distribution::new(probs)
    }

    fn observe(&mut self, outcome: Symbol) {
        self.counts[outcome as usize] += 1;
        self.seen += 1;
    }
}

/// Wraps a strategy so that whenever the session capital reaches the
/// threshold, the net gain (session - 1) is banked, the session restarts
/// at 1, and the inner strategy is rebuilt from scratch. The banked part
/// is never staked, so the combined announcement is the capital-weighted
/// mixture of the forecast and the inner Q; the game capital then equals
/// banked + session at every step.
pub struct RestartStrategy {
    make: Box<dyn Fn() -> Box<dyn Strategy>>,
    inner: Box<dyn Strategy>,
    threshold: f64,
    session: f64,
    banked: f64,
    pending: Option<(Distribution, Distribution)>,
}

impl RestartStrategy {
    pub fn new(make: Box<dyn Fn() -> Box<dyn Strategy>>, threshold: f64) -> Result<Self> {
        if !(threshold > 1.0) {
            return Err(Error::InvalidArgument(format!(
                "restart threshold must be > 1, got {threshold}"
            )));
        }
        let inner = make();
        Ok(Self {
            make,
            inner,
            threshold,
            session: 1.0,
            banked: 0.0,
            pending: None,
        })
    }

    /// Capital of the current session (the formal protocol capital of the
    /// inner game).
    pub fn session(&self) -> f64 {
        self.session
    }
}

impl Strategy for RestartStrategy {
    fn announce(&mut self, forecast: &Distribution) -> Result<Distribution> {
        let inner_q = self.inner.announce(forecast)?;
        let total = self.banked + self.session;
        let probs = inner_q
            .probs()
            .iter()
            .zip(forecast.probs())
            .map(|(&q, &p)| (self.banked * p + self.session * q) / total)
            .collect();
        let q = Distribution::new(probs)?;
        self.pending = Some((inner_q, forecast.clone()));
        Ok(q)
    }

    fn observe(&mut self, outcome: Symbol) {
        let (inner_q, forecast) = self
            .pending
            .take()
            .expect("observe called without a pending announcement");
        self.session *= inner_q.prob(outcome) / forecast.prob(outcome);
        if self.session >= self.threshold {
            self.banked += self.session - 1.0;
            self.session = 1.0;
            self.inner = (self.make)();
        } else {
            self.inner.observe(outcome);
        }
    }

    fn banked(&self) -> f64 {
        self.banked
    }
}

/// Default restart threshold, the smallest one the restart argument needs.
pub const DEFAULT_RESTART_THRESHOLD: f64 = 2.0;

/// Strategy factory by CLI name: "lz", "ld", "lz-restart" or "none".
pub fn by_name(
    name: &str,
    alphabet: Alphabet,
    threshold: Option<f64>,
) -> Result<Box<dyn Strategy>> {
    match name {
        "lz" => Ok(Box::new(LzStrategy::new(alphabet))),
        "ld" => Ok(Box::new(LdStrategy::new(alphabet))),
        "lz-restart" => {
            let make: Box<dyn Fn() -> Box<dyn Strategy>> =
                Box::new(move || Box::new(LzStrategy::new(alphabet)));
            Ok(Box::new(RestartStrategy::new(
                make,
                threshold.unwrap_or(DEFAULT_RESTART_THRESHOLD),
            )?))
        }
        "none" => Ok(Box::new(NoBetStrategy)),
        other => Err(Error::InvalidArgument(format!(
            "unknown strategy {other:?} (expected lz, ld, lz-restart or none)"
        ))),
    }
}

/// Exact capital of the add-one strategy under a constant rational
/// forecast: prod_i (S_{i-1}(w_i) + 1) / (p(w_i) (i + A - 1)).
pub fn ld_capital_exact(word: &Word, forecast: &[BigRational]) -> BigRational {
    let a = word.alphabet().size();
    assert_eq!(forecast.len(), a);
    let mut counts = vec![0u64; a];
    let mut capital = BigRational::from_integer(1.into());
    for (i, &w) in word.symbols().iter().enumerate() {
        let step = i + 1;
        let numer = BigRational::from_integer((counts[w as usize] + 1).into());
        let denom = &forecast[w as usize] * BigRational::from_integer(((step + a - 1) as u64).into());
        capital *= numer / denom;
        counts[w as usize] += 1;
    }
    capital
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigInt;

    fn dist(p: &[f64]) -> Distribution {
        Distribution::new(p.to_vec()).unwrap()
    }

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn q_to_alpha_factor_is_likelihood_ratio() {
        let p = dist(&[0.5, 0.5]);
        let q = dist(&[0.25, 0.75]);
        let bet = q_to_alpha(&q, &p);
        assert!((bet.factor(1, &p) - 1.5).abs() < 1e-15);
        assert!((bet.factor(0, &p) - 0.5).abs() < 1e-15);
        assert!(bet.is_prudent(&p));
    }

    #[test]
    fn no_bet_round_trip() {
        let p = dist(&[0.3, 0.7]);
        let bet = q_to_alpha(&p, &p);
        for w in 0..2u8 {
            assert!((bet.factor(w, &p) - 1.0).abs() < 1e-15);
        }
        let q = alpha_to_q(&bet, &p).unwrap();
        for w in 0..2u8 {
            assert!((q.prob(w) - p.prob(w)).abs() < 1e-15);
        }
    }

    #[test]
    fn alpha_to_q_hand_example() {
        // A=2, p=(0.5,0.5), alpha=(0,1) -> Q=(0.25, 0.75)
        let p = dist(&[0.5, 0.5]);
        let q = alpha_to_q(&Bet::new(vec![0.0, 1.0]), &p).unwrap();
        assert!((q.prob(0) - 0.25).abs() < 1e-15);
        assert!((q.prob(1) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn alpha_to_q_rejects_imprudent_bets() {
        let p = dist(&[0.5, 0.5]);
        // outcome 0 would wipe out more than all capital
        let bet = Bet::new(vec![-3.0, 0.0]);
        assert!(alpha_to_q(&bet, &p).is_err());
    }

    #[test]
    fn round_trip_identity() {
        let p = dist(&[0.2, 0.5, 0.3]);
        let q = dist(&[0.6, 0.1, 0.3]);
        let back = alpha_to_q(&q_to_alpha(&q, &p), &p).unwrap();
        for w in 0..3u8 {
            assert!((back.prob(w) - q.prob(w)).abs() < 1e-12);
        }
    }

    #[test]
    fn lz_first_move_uniform() {
        let mut s = LzStrategy::new(Alphabet::binary());
        let q = s.announce(&dist(&[0.9, 0.1])).unwrap();
        assert_eq!(q.prob(0), 0.5);
        assert_eq!(q.prob(1), 0.5);
    }

    #[test]
    fn lz_after_two_phrases() {
        let mut s = LzStrategy::new(Alphabet::binary());
        let p = dist(&[0.5, 0.5]);
        for w in [0, 1] {
            s.announce(&p).unwrap();
            s.observe(w);
        }
        let q = s.announce(&p).unwrap();
        assert_eq!(q.prob(0), 0.5);
        assert_eq!(q.prob(1), 0.5);
    }

    #[test]
    fn ld_first_step_capital_is_one() {
        let p = dist(&[0.5, 0.5]);
        let mut s = LdStrategy::new(Alphabet::binary());
        let q = s.announce(&p).unwrap();
        // Q = (1/2, 1/2); factor = Q(w)/p(w) = 1 either way
        for w in 0..2u8 {
            assert!((q.prob(w) / p.prob(w) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn ld_capital_after_two_ones() {
        // w = "11", p = (1/2, 1/2): K_2 = 1 * (1+1)/(0.5*3) = 4/3
        let w = Word::new(vec![0, 0], Alphabet::binary()).unwrap();
        let k = ld_capital_exact(&w, &[ratio(1, 2), ratio(1, 2)]);
        assert_eq!(k, ratio(4, 3));
    }

    #[test]
    fn ld_rejects_changing_forecast() {
        let mut s = LdStrategy::new(Alphabet::binary());
        s.announce(&dist(&[0.5, 0.5])).unwrap();
        s.observe(0);
        assert!(s.announce(&dist(&[0.4, 0.6])).is_err());
    }

    #[test]
    fn ld_float_capital_matches_exact() {
        let p = dist(&[0.25, 0.75]);
        let pr = [ratio(1, 4), ratio(3, 4)];
        let w = Word::parse("0110100111", Alphabet::binary()).unwrap();
        let mut s = LdStrategy::new(Alphabet::binary());
        let mut log_k = 0.0;
        for &sym in w.symbols() {
            let q = s.announce(&p).unwrap();
            log_k += (q.prob(sym) / p.prob(sym)).ln();
            s.observe(sym);
        }
        let exact = ld_capital_exact(&w, &pr);
        let exact_f = exact.numer().to_string().parse::<f64>().unwrap()
            / exact.denom().to_string().parse::<f64>().unwrap();
        assert!((log_k - exact_f.ln()).abs() < 1e-9);
    }

    #[test]
    fn restart_requires_threshold_above_one() {
        let make: Box<dyn Fn() -> Box<dyn Strategy>> =
            Box::new(|| Box::new(NoBetStrategy));
        assert!(RestartStrategy::new(make, 1.0).is_err());
    }

    #[test]
    fn restart_without_trigger_equals_inner() {
        // inner never reaches the threshold: the wrapper's Q is the inner Q
        let p = dist(&[0.5, 0.5]);
        let make: Box<dyn Fn() -> Box<dyn Strategy>> =
            Box::new(|| Box::new(LzStrategy::new(Alphabet::binary())));
        let mut wrapped = RestartStrategy::new(make, 1e9).unwrap();
        let mut plain = LzStrategy::new(Alphabet::binary());
        for &w in Word::parse("0110100", Alphabet::binary()).unwrap().symbols() {
            let qw = wrapped.announce(&p).unwrap();
            let qp = plain.announce(&p).unwrap();
            for s in 0..2u8 {
                assert!((qw.prob(s) - qp.prob(s)).abs() < 1e-12);
            }
            wrapped.observe(w);
            plain.observe(w);
        }
        assert_eq!(wrapped.banked(), 0.0);
    }

    #[test]
    fn restart_banks_net_gain() {
        // A strategy that always doubles on symbol 0.
        struct AllIn;
        impl Strategy for AllIn {
            fn announce(&mut self, _f: &Distribution) -> Result<Distribution> {
                Ok(dist(&[0.99, 0.01]))
            }
            fn observe(&mut self, _o: Symbol) {}
        }
        let p = dist(&[0.5, 0.5]);
        let make: Box<dyn Fn() -> Box<dyn Strategy>> = Box::new(|| Box::new(AllIn));
        let mut wrapped = RestartStrategy::new(make, 1.9).unwrap();
        wrapped.announce(&p).unwrap();
        wrapped.observe(0); // session 1.98 >= 1.9: bank 0.98, reset
        assert!((wrapped.banked() - 0.98).abs() < 1e-12);
        assert!((wrapped.session() - 1.0).abs() < 1e-12);
        // banked part never decreases even when the inner strategy crashes
        wrapped.announce(&p).unwrap();
        wrapped.observe(1);
        assert!((wrapped.banked() - 0.98).abs() < 1e-12);
        assert!(wrapped.session() < 0.1);
    }
}
