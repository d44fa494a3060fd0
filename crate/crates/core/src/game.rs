//! Predictive-game protocols and the work-extraction rendering.
//!
//! A game couples a Forecaster (constant or time-homogeneous Markov), a
//! Skeptic strategy, and a Reality move source. The capital recursion
//! K_n = K_{n-1} {1 + sum_a alpha_n(a)(delta_w(a) - p_n(a))} is tracked
//! in log domain throughout, since capital spans hundreds of orders of
//! magnitude on long runs. For Q-canonical skeptics the per-step factor
//! equals Q(w)/p(w), so ln K_n = ln Q(w_1^n) - ln P~(w_1^n); the runner
//! accumulates both sides independently.
//!
//! The Szilard rendering converts each bet into chamber weights and
//! replays the work recursion; the resulting ledger is a positive-affine
//! image of the capital process.

use crate::error::{Error, Result};
use crate::markov::{
    joint_stationary, stationary_default, Distribution, MarkovKernel, StationaryDistribution,
};
use crate::realities::Reality;
use crate::strategies::{q_to_alpha, Bet, Strategy};
use crate::sum::KahanSum;
use crate::word::{Alphabet, Symbol, Word};

/// Forecaster policies: a constant distribution, or announcements from a
/// kth-order Markov kernel with configurable initial announcements
/// p_1..p_k (the protocol only constrains steps beyond k).
pub enum Forecaster {
    Constant(Distribution),
    Markov {
        kernel: MarkovKernel,
        initial: Vec<Distribution>,
    },
}

impl Forecaster {
    pub fn constant(p: Distribution) -> Self {
        Forecaster::Constant(p)
    }

    /// Markov forecaster with explicit initial announcements.
    pub fn markov(kernel: MarkovKernel, initial: Vec<Distribution>) -> Result<Self> {
        if initial.len() != kernel.order() {
            return Err(Error::InvalidArgument(format!(
                "need {} initial announcements, got {}",
                kernel.order(),
                initial.len()
            )));
        }
        for p in &initial {
            if p.len() != kernel.alphabet().size() || !p.is_strictly_positive() {
                return Err(Error::InvalidArgument(
                    "initial announcements must be strictly positive over the alphabet".into(),
                ));
            }
        }
        Ok(Forecaster::Markov { kernel, initial })
    }

    /// Markov forecaster whose first k announcements are the single-symbol
    /// marginal of the stationary distribution (the same for every
    /// position, by stationarity).
    pub fn markov_stationary_start(kernel: MarkovKernel) -> Result<Self> {
        let pi = stationary_default(&kernel)?;
        let marginal = stationary_symbol_marginal(&kernel, &pi)?;
        let initial = vec![marginal; kernel.order()];
        Self::markov(kernel, initial)
    }

    pub fn alphabet(&self) -> Alphabet {
        match self {
            Forecaster::Constant(p) => {
                // distributions do not carry the alphabet; reconstruct by size
                Alphabet::new(p.len()).expect("distribution length is a valid alphabet size")
            }
            Forecaster::Markov { kernel, .. } => kernel.alphabet(),
        }
    }

    /// The kernel behind a Markov forecaster.
    pub fn kernel(&self) -> Option<&MarkovKernel> {
        match self {
            Forecaster::Constant(_) => None,
            Forecaster::Markov { kernel, .. } => Some(kernel),
        }
    }

    /// ln P~(w_1^n): the log-likelihood of the word under the
    /// forecaster's announcements.
    pub fn log_likelihood(&self, word: &Word) -> f64 {
        let mut total = KahanSum::new();
        for (i, &s) in word.symbols().iter().enumerate() {
            total.add(self.announce(&word.symbols()[..i]).prob(s).ln());
        }
        total.value()
    }

    /// p_n for the step following the given history.
    pub fn announce(&self, history: &[Symbol]) -> Distribution {
        match self {
            Forecaster::Constant(p) => p.clone(),
            Forecaster::Markov { kernel, initial } => {
                let k = kernel.order();
                let n = history.len();
                if n < k {
                    initial[n].clone()
                } else {
                    kernel.row(&history[n - k..]).clone()
                }
            }
        }
    }
}

fn stationary_symbol_marginal(
    kernel: &MarkovKernel,
    pi: &StationaryDistribution,
) -> Result<Distribution> {
    let joint = joint_stationary(kernel, pi, kernel.order())?;
    let a = kernel.alphabet().size();
    let k = kernel.order();
    let mut marginal = vec![0.0; a];
    let lead = a.pow((k - 1) as u32);
    for (idx, &p) in joint.probs().iter().enumerate() {
        marginal[idx / lead] += p;
    }
    Distribution::new(marginal)
}

/// Skeptic's capital state.
#[derive(Debug, Clone)]
pub struct GameState {
    step: usize,
    log_capital: KahanSum,
    history: Word,
    banked: f64,
}

impl GameState {
    pub fn new(alphabet: Alphabet) -> Self {
        Self {
            step: 0,
            log_capital: KahanSum::new(),
            history: Word::empty(alphabet),
            banked: 0.0,
        }
    }

    pub fn step_index(&self) -> usize {
        self.step
    }

    pub fn log_capital(&self) -> f64 {
        self.log_capital.value()
    }

    pub fn history(&self) -> &Word {
        &self.history
    }

    pub fn banked(&self) -> f64 {
        self.banked
    }
}

/// One round of the capital recursion. The factor must stay positive;
/// a nonpositive factor signals a buggy (imprudent) strategy and aborts.
pub fn step(
    state: &GameState,
    forecast: &Distribution,
    bet: &Bet,
    outcome: Symbol,
) -> Result<GameState> {
    let factor = bet.factor(outcome, forecast);
    if !(factor > 0.0) {
        return Err(Error::PrudenceViolation {
            step: state.step + 1,
            factor,
        });
    }
    let mut next = state.clone();
    next.step += 1;
    next.log_capital.add(factor.ln());
    next.history.push(outcome);
    Ok(next)
}

/// Per-step record of a finished game.
#[derive(Debug, Clone)]
pub struct StepRecord {
    pub forecast: Vec<f64>,
    pub q: Vec<f64>,
    pub outcome: Symbol,
    pub log_capital: f64,
    pub banked: f64,
}

/// A completed game run.
#[derive(Debug)]
pub struct Trajectory {
    pub alphabet: Alphabet,
    pub steps: Vec<StepRecord>,
    /// ln Q(w_1^n), accumulated from the skeptic's announcements.
    pub log_q: f64,
    /// ln P~(w_1^n), accumulated from the forecasts.
    pub log_p: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn final_log_capital(&self) -> f64 {
        self.steps.last().map_or(0.0, |s| s.log_capital)
    }

    pub fn final_banked(&self) -> f64 {
        self.steps.last().map_or(0.0, |s| s.banked)
    }

    pub fn outcomes(&self) -> Word {
        let symbols = self.steps.iter().map(|s| s.outcome).collect();
        Word::new(symbols, self.alphabet).expect("outcomes come from the same alphabet")
    }
}

/// Plays the protocol for n rounds: Forecaster announces p_n, Skeptic
/// announces Q_n (bet alpha_n = Q_n/p_n), Reality announces w_n.
pub fn run(
    forecaster: &Forecaster,
    skeptic: &mut dyn Strategy,
    reality: &mut dyn Reality,
    rounds: usize,
) -> Result<Trajectory> {
    let alphabet = forecaster.alphabet();
    let mut state = GameState::new(alphabet);
    let mut steps = Vec::with_capacity(rounds);
    let mut log_q = KahanSum::new();
    let mut log_p = KahanSum::new();
    for _ in 0..rounds {
        let forecast = forecaster.announce(state.history.symbols());
        let q = skeptic.announce(&forecast)?;
        let outcome = reality.next(state.history.symbols())?;
        let bet = q_to_alpha(&q, &forecast);
        state = step(&state, &forecast, &bet, outcome)?;
        skeptic.observe(outcome);
        log_q.add(q.prob(outcome).ln());
        log_p.add(forecast.prob(outcome).ln());
        state.banked = skeptic.banked();
        steps.push(StepRecord {
            forecast: forecast.probs().to_vec(),
            q: q.probs().to_vec(),
            outcome,
            log_capital: state.log_capital(),
            banked: state.banked,
        });
    }
    Ok(Trajectory {
        alphabet,
        steps,
        log_q: log_q.value(),
        log_p: log_p.value(),
    })
}

/// Chamber geometry of the work-extraction engine. Forecast probabilities
/// are the chamber length fractions.
#[derive(Debug, Clone)]
pub struct SzilardConfig {
    lengths: Vec<f64>,
    gravity: f64,
    unit_capital_to_energy: f64,
}

impl SzilardConfig {
    pub fn new(lengths: Vec<f64>, gravity: f64, unit_capital_to_energy: f64) -> Result<Self> {
        if lengths.len() < 2 || lengths.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::InvalidArgument(
                "need at least two strictly positive chamber lengths".into(),
            ));
        }
        if !(gravity > 0.0) || !(unit_capital_to_energy > 0.0) {
            return Err(Error::InvalidArgument(
                "gravity and energy scale must be positive".into(),
            ));
        }
        Ok(Self {
            lengths,
            gravity,
            unit_capital_to_energy,
        })
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn gravity(&self) -> f64 {
        self.gravity
    }

    pub fn energy_scale(&self) -> f64 {
        self.unit_capital_to_energy
    }

    /// p(a) = l_a / sum(l).
    pub fn forecast(&self) -> Distribution {
        let total: f64 = self.lengths.iter().sum();
        Distribution::new(self.lengths.iter().map(|&l| l / total).collect())
            .expect("positive lengths give a valid distribution")
    }
}

/// The extracted-work ledger: W_n in log domain plus the declared
/// capital-to-energy scale. W_n = scale * K_n throughout.
#[derive(Debug, Clone)]
pub struct WorkLedger {
    log_work_per_scale: Vec<f64>,
    scale: f64,
}

impl WorkLedger {
    pub fn len(&self) -> usize {
        self.log_work_per_scale.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_work_per_scale.is_empty()
    }

    /// ln(W_n / scale) after round n (1-based; round 0 is the start).
    pub fn log_work_ratio(&self, round: usize) -> f64 {
        if round == 0 {
            0.0
        } else {
            self.log_work_per_scale[round - 1]
        }
    }

    /// W_n in joules; may overflow to infinity on long winning runs.
    pub fn work_joules(&self, round: usize) -> f64 {
        self.scale * self.log_work_ratio(round).exp()
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

/// Replays a trajectory as the work-extraction game: each bet becomes
/// chamber weights m_n(a) = 2 W_{n-1} alpha_n(a) / (g sum(l)) and the
/// work recursion W_n = W_{n-1} + sum_a (m_n(a) g / 2) sum(l)
/// (delta_w(a) - p(a)) is accumulated per unit of starting work.
///
/// Requires the trajectory's forecast to be the constant chamber-fraction
/// distribution of the config.
pub fn szilard_work(trajectory: &Trajectory, config: &SzilardConfig) -> Result<WorkLedger> {
    let p = config.forecast();
    if p.len() != trajectory.alphabet.size() {
        return Err(Error::InvalidArgument(
            "chamber count does not match the game alphabet".into(),
        ));
    }
    let mut log_work = KahanSum::new();
    let mut ledger = Vec::with_capacity(trajectory.len());
    for (i, record) in trajectory.steps.iter().enumerate() {
        for (&fp, &cp) in record.forecast.iter().zip(p.probs()) {
            if (fp - cp).abs() > 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "step {}: forecast differs from the chamber fractions",
                    i + 1
                )));
            }
        }
        let q = Distribution::new(record.q.clone())?;
        let alpha = q_to_alpha(&q, &p);
        // Weights per unit current work: w(a) = 2 alpha(a) / (g sum(l)).
        // The work increment divided by W_{n-1} is then exactly the
        // capital factor minus one.
        let growth = work_growth_factor(&alpha, &p, record.outcome, config);
        if !(growth > 0.0) {
            return Err(Error::PrudenceViolation {
                step: i + 1,
                factor: growth,
            });
        }
        log_work.add(growth.ln());
        ledger.push(log_work.value());
    }
    Ok(WorkLedger {
        log_work_per_scale: ledger,
        scale: config.energy_scale(),
    })
}

/// W_n / W_{n-1} computed from the physical work expressions. Binary
/// engines use the two-chamber form with r = l_1/(l_0 + l_1); larger
/// engines use the pulley form with half-length displacements.
fn work_growth_factor(
    alpha: &Bet,
    p: &Distribution,
    outcome: Symbol,
    config: &SzilardConfig,
) -> f64 {
    let g = config.gravity();
    let total_len: f64 = config.lengths().iter().sum();
    if p.len() == 2 {
        // m(a) per unit work = alpha(a) / (g (l_0 + l_1))
        let m0 = alpha.alpha()[0] / (g * total_len);
        let m1 = alpha.alpha()[1] / (g * total_len);
        let r = config.lengths()[1] / total_len;
        1.0 + (m1 - m0) * g * total_len * (outcome as f64 - r)
    } else {
        // m(a) per unit work = 2 alpha(a) / (g sum(l))
        let mut delta = 0.0;
        for (a, &al) in alpha.alpha().iter().enumerate() {
            let m = 2.0 * al / (g * total_len);
            let indicator = if a == outcome as usize { 1.0 } else { 0.0 };
            delta += m * g / 2.0 * total_len * (indicator - p.prob(a as Symbol));
        }
        1.0 + delta
    }
}
