//! The R̃ → 0 spectrum: which families live in which channel, the exact
//! energies, normalised eigenfunctions at finite R̃, the singular index and
//! the equivalence classes of α.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finite_tube::interior_kummer_shape;
use crate::radial::{Channel, ClosedForm, FluxConfig, RadialProfile, SpecialFactor, Spin, Tail, Term};
use crate::specfun;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    /// r^{m+α} e^{−r²/2} L_n^{(m+α)}(r²), E = σ+½+(m+α)+n
    LagA,
    /// r^{−(m+α)} e^{−r²/2} L_n^{(−m−α)}(r²), E = σ+½+n
    LagB,
    SingDownLog,
    SingDown,
    SingUpLog,
    SingUp,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::LagA,
        Family::LagB,
        Family::SingDownLog,
        Family::SingDown,
        Family::SingUpLog,
        Family::SingUp,
    ];

    pub fn is_singular(self) -> bool {
        !matches!(self, Family::LagA | Family::LagB)
    }

    pub fn is_log(self) -> bool {
        matches!(self, Family::SingDownLog | Family::SingUpLog)
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::LagA => "LagA",
            Family::LagB => "LagB",
            Family::SingDownLog => "SingDownLog",
            Family::SingDown => "SingDown",
            Family::SingUpLog => "SingUpLog",
            Family::SingUp => "SingUp",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.name() == s)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quantization {
    /// E = σ + ½ + (m+α) + n
    Shifted,
    /// E = σ + ½ + n
    Unshifted,
    /// E = 0
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Admissible {
    pub family: Family,
    pub rule: Quantization,
}

/// Families carried by a channel.
///
/// The literal range annotations of the Laguerre families are not closed
/// under the superpartner map, so the complete rule used here is: every
/// channel carries exactly the families needed for (a) all direct-approach
/// states, (b) a partner for every E > 0 state, and (c) the singular
/// supersinglets at |m+α| ≥ 1.
pub fn admissible_families(alpha: f64, ch: Channel) -> Vec<Admissible> {
    use Family::*;
    let nu = ch.nu(alpha);
    let lag_a = Admissible {
        family: LagA,
        rule: Quantization::Shifted,
    };
    let lag_b = Admissible {
        family: LagB,
        rule: Quantization::Unshifted,
    };
    let zero = |family| Admissible {
        family,
        rule: Quantization::Zero,
    };
    match ch.sigma {
        Spin::Down if ch.m >= 1 => {
            if nu > 0.0 {
                vec![lag_a]
            } else if nu < 0.0 {
                vec![lag_b]
            } else {
                vec![]
            }
        }
        Spin::Down => {
            if nu < 1.0 {
                vec![lag_b]
            } else if nu == 1.0 {
                vec![zero(SingDownLog)]
            } else {
                vec![lag_a, zero(SingDown)]
            }
        }
        Spin::Up if ch.m <= -1 => {
            if nu > 0.0 {
                vec![lag_a]
            } else if nu < 0.0 {
                vec![lag_b]
            } else {
                vec![]
            }
        }
        Spin::Up => {
            if nu > -1.0 {
                vec![lag_a]
            } else if nu == -1.0 {
                vec![zero(SingUpLog)]
            } else {
                vec![lag_b, zero(SingUp)]
            }
        }
    }
}

/// Energy at κ = 0 as `integer + (α if with_alpha)`; kept symbolic so that
/// pairing and block-shift comparisons are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BareEnergy {
    pub integer: i64,
    pub with_alpha: bool,
}

impl BareEnergy {
    pub fn value(&self, alpha: f64) -> f64 {
        self.integer as f64 + if self.with_alpha { alpha } else { 0.0 }
    }

    pub fn is_zero(&self) -> bool {
        self.integer == 0 && !self.with_alpha
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenState {
    pub family: Family,
    pub channel: Channel,
    pub n: u32,
    /// E^κ = E + κσ
    pub energy: f64,
    pub alpha: f64,
    pub kappa: f64,
}

fn quantization_of(family: Family) -> Quantization {
    match family {
        Family::LagA => Quantization::Shifted,
        Family::LagB => Quantization::Unshifted,
        _ => Quantization::Zero,
    }
}

impl EigenState {
    /// Builds a state after checking that the family lives in the channel.
    pub fn new(family: Family, channel: Channel, n: u32, alpha: f64, kappa: f64) -> Result<Self> {
        if !admissible_families(alpha, channel).iter().any(|a| a.family == family) {
            return Err(Error::Inadmissible(format!(
                "{family} in channel (sigma={}, m={}) at alpha={alpha}",
                channel.sigma.value(),
                channel.m
            )));
        }
        if family.is_singular() && n != 0 {
            return Err(Error::Inadmissible(format!("{family} has no radial excitations")));
        }
        let mut s = EigenState {
            family,
            channel,
            n,
            energy: 0.0,
            alpha,
            kappa,
        };
        s.energy = s.bare().value(alpha) + kappa * channel.sigma.value();
        Ok(s)
    }

    pub fn bare(&self) -> BareEnergy {
        let off = self.channel.sigma.offset();
        match quantization_of(self.family) {
            Quantization::Shifted => BareEnergy {
                integer: off + self.channel.m + self.n as i64,
                with_alpha: true,
            },
            Quantization::Unshifted => BareEnergy {
                integer: off + self.n as i64,
                with_alpha: false,
            },
            Quantization::Zero => BareEnergy {
                integer: 0,
                with_alpha: false,
            },
        }
    }

    pub fn bare_energy(&self) -> f64 {
        self.bare().value(self.alpha)
    }

    pub fn nu(&self) -> f64 {
        self.channel.nu(self.alpha)
    }

    fn sort_key(&self) -> (Spin, i64, f64, Family, u32) {
        (self.channel.sigma, self.channel.m, self.energy, self.family, self.n)
    }
}

/// Superpartner (σ=−½, m) ↔ (σ=+½, m−1) at the same bare energy; `None` for
/// the E = 0 supersinglets.
pub fn pair_partner(state: &EigenState) -> Option<EigenState> {
    if state.bare().is_zero() {
        return None;
    }
    let (channel, n) = match (state.channel.sigma, state.family) {
        (Spin::Down, Family::LagA) => (Channel::up(state.channel.m - 1), state.n),
        (Spin::Down, Family::LagB) => (Channel::up(state.channel.m - 1), state.n.checked_sub(1)?),
        (Spin::Up, Family::LagA) => (Channel::down(state.channel.m + 1), state.n),
        (Spin::Up, Family::LagB) => (Channel::down(state.channel.m + 1), state.n + 1),
        _ => return None,
    };
    EigenState::new(state.family, channel, n, state.alpha, state.kappa).ok()
}

/// A superpartner column (σ=−½, m) & (σ=+½, m−1), labelled by m+σ = m−½.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairChannel {
    pub down_m: i64,
}

impl PairChannel {
    pub fn column(&self) -> f64 {
        self.down_m as f64 - 0.5
    }
    pub fn down(&self) -> Channel {
        Channel::down(self.down_m)
    }
    pub fn up(&self) -> Channel {
        Channel::up(self.down_m - 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    pub states: Vec<EigenState>,
    pub alpha: f64,
    pub kappa: f64,
    pub e_max: f64,
    pub m_range: (i64, i64),
    pub vacancies: Vec<PairChannel>,
    pub block_shift: f64,
}

impl SpectrumTable {
    pub fn singular_count(&self, sigma: Spin) -> usize {
        self.states
            .iter()
            .filter(|s| s.family.is_singular() && s.channel.sigma == sigma)
            .count()
    }
}

fn has_laguerre(alpha: f64, ch: Channel) -> bool {
    admissible_families(alpha, ch)
        .iter()
        .any(|a| !a.family.is_singular())
}

/// frac(α), the vertical offset of the right block of the spectrum.
pub fn block_shift(alpha: f64) -> f64 {
    alpha - alpha.floor()
}

/// All states with m in range and bare energy E ≤ e_max.
///
/// The cutoff is applied to the κ = 0 energy, so that switching on κ shifts
/// every level without changing which states are listed.
pub fn enumerate_spectrum(alpha: f64, kappa: f64, e_max: f64, m_min: i64, m_max: i64) -> Result<SpectrumTable> {
    if !(e_max > 0.0) {
        return Err(Error::InvalidConfig(format!("e_max must be > 0, got {e_max}")));
    }
    if m_min > m_max {
        return Err(Error::InvalidConfig(format!("empty m range {m_min}..{m_max}")));
    }
    if !alpha.is_finite() || !kappa.is_finite() {
        return Err(Error::InvalidConfig("alpha and kappa must be finite".into()));
    }
    let mut states = Vec::new();
    for sigma in [Spin::Down, Spin::Up] {
        for m in m_min..=m_max {
            let ch = Channel::new(sigma, m);
            for adm in admissible_families(alpha, ch) {
                let mut n = 0u32;
                loop {
                    let s = EigenState::new(adm.family, ch, n, alpha, kappa)?;
                    if s.bare_energy() > e_max {
                        break;
                    }
                    states.push(s);
                    if adm.rule == Quantization::Zero {
                        break;
                    }
                    n += 1;
                }
            }
        }
    }
    states.sort_by(|a, b| {
        let (ka, kb) = (a.sort_key(), b.sort_key());
        ka.0.cmp(&kb.0)
            .then(ka.1.cmp(&kb.1))
            .then(ka.2.total_cmp(&kb.2))
            .then(ka.3.cmp(&kb.3))
            .then(ka.4.cmp(&kb.4))
    });
    let vacancies = (m_min..=m_max)
        .map(|m| PairChannel { down_m: m })
        .filter(|p| !has_laguerre(alpha, p.down()) && !has_laguerre(alpha, p.up()))
        .collect();
    Ok(SpectrumTable {
        states,
        alpha,
        kappa,
        e_max,
        m_range: (m_min, m_max),
        vacancies,
        block_shift: block_shift(alpha),
    })
}

fn log_norm(r_tube: f64) -> Result<f64> {
    if r_tube >= 1.0 {
        return Err(Error::InvalidConfig(format!(
            "logarithmic normalisation needs R < 1, got {r_tube}"
        )));
    }
    Ok(1.0 / (-std::f64::consts::PI * (r_tube * r_tube).ln()).sqrt())
}

/// 1/(|ν|−1) + (±α)^{±m−1} e^{±α} γ(∓m+1, ±α), upper signs for σ = −½.
fn singular_norm_bracket(alpha: f64, ch: Channel) -> Result<f64> {
    let nu = ch.nu(alpha);
    let (s, a, p) = match ch.sigma {
        Spin::Down => (1.0 - ch.m as f64, alpha, ch.m as f64 - 1.0),
        Spin::Up => (ch.m as f64 + 1.0, -alpha, -(ch.m as f64) - 1.0),
    };
    let lower = specfun::gamma_lower(s, a)?.value;
    Ok(1.0 / (nu.abs() - 1.0) + (p * a.ln() + a).exp() * lower)
}

pub(crate) fn singular_norm(alpha: f64, ch: Channel, r_tube: f64) -> Result<f64> {
    let nu = ch.nu(alpha).abs();
    let bracket = singular_norm_bracket(alpha, ch)?;
    Ok(r_tube.powf(nu - 1.0) / (std::f64::consts::PI * bracket).sqrt())
}

fn laguerre_norm(n: u32, order: f64) -> f64 {
    let ln = 0.5 * (specfun::ln_gamma(n as f64 + 1.0) - specfun::ln_gamma(n as f64 + order + 1.0));
    ln.exp() / std::f64::consts::PI.sqrt()
}

/// Normalised radial profile of `state` regularised at tube radius `r_tube`.
///
/// The interior is always fixed by continuity. For the Laguerre and
/// σ = −½ singular families this coincides with the printed interiors; for
/// the σ = +½ singular families the printed interior prefactor misses a
/// factor e^{R̃²/2} and would leave a jump at R̃.
pub fn state_profile(alpha: f64, state: &EigenState, r_tube: f64) -> Result<RadialProfile> {
    if !admissible_families(alpha, state.channel)
        .iter()
        .any(|a| a.family == state.family)
    {
        return Err(Error::Inadmissible(format!("{} at alpha={alpha}", state.family)));
    }
    profile_unchecked(alpha, state, r_tube)
}

/// Builds a profile for any family/channel combination, admissible or not.
/// Inadmissible candidates are what the boundary-term check must reject.
pub fn candidate_profile(alpha: f64, family: Family, ch: Channel, n: u32, r_tube: f64) -> Result<RadialProfile> {
    let state = EigenState {
        family,
        channel: ch,
        n,
        energy: 0.0,
        alpha,
        kappa: 0.0,
    };
    profile_unchecked(alpha, &state, r_tube)
}

fn profile_unchecked(alpha: f64, state: &EigenState, r_tube: f64) -> Result<RadialProfile> {
    let cfg = FluxConfig::landau(alpha, r_tube)?;
    let ch = state.channel;
    let nu = ch.nu(alpha);
    let beta = 1.0 + alpha / (r_tube * r_tube);
    let e = state.bare().value(alpha);
    let gauss_interior = |sign: f64, p: f64| {
        ClosedForm::single(Term::new(1.0, p, sign * 0.5 * beta, r_tube, SpecialFactor::One))
    };
    let (interior, exterior) = match state.family {
        Family::LagA => (
            interior_kummer_shape(&cfg, ch, e)?,
            ClosedForm::single(Term::new(
                laguerre_norm(state.n, nu),
                nu,
                -0.5,
                1.0,
                SpecialFactor::Laguerre {
                    n: state.n,
                    a: nu,
                    scale: 1.0,
                },
            )),
        ),
        Family::LagB => (
            interior_kummer_shape(&cfg, ch, e)?,
            ClosedForm::single(Term::new(
                laguerre_norm(state.n, -nu),
                -nu,
                -0.5,
                1.0,
                SpecialFactor::Laguerre {
                    n: state.n,
                    a: -nu,
                    scale: 1.0,
                },
            )),
        ),
        Family::SingDownLog | Family::SingDown => {
            let c = if state.family.is_log() {
                log_norm(r_tube)?
            } else {
                singular_norm(alpha, ch, r_tube)?
            };
            (
                gauss_interior(-1.0, -(ch.m as f64)),
                ClosedForm::single(Term::new(c, -nu, -0.5, 1.0, SpecialFactor::One)),
            )
        }
        Family::SingUpLog | Family::SingUp => {
            let c = if state.family.is_log() {
                log_norm(r_tube)?
            } else {
                singular_norm(alpha, ch, r_tube)?
            };
            (
                gauss_interior(1.0, ch.m as f64),
                ClosedForm::single(Term::new(
                    c,
                    nu,
                    0.5,
                    1.0,
                    SpecialFactor::GammaUpperRatio { s: -nu, scale: 1.0 },
                )),
            )
        }
    };
    RadialProfile::continuous(interior, exterior, ch, cfg, Tail::Gaussian).map_err(|err| match err {
        Error::Pole { .. } => Error::PoleAtE { energy: e },
        other => other,
    })
}

/// Number of singular σ=−½ states minus singular σ=+½ states, by counting
/// channels: #{m ≤ 0 : m+α ≥ 1} − #{m ≥ 0 : m+α ≤ −1}.
pub fn index_singular(alpha: f64) -> i64 {
    let reach = alpha.abs().ceil() as i64 + 2;
    let down = (-reach..=0).filter(|&m| m as f64 + alpha >= 1.0).count() as i64;
    let up = (0..=reach).filter(|&m| m as f64 + alpha <= -1.0).count() as i64;
    down - up
}

/// [α]θ(α) − [−α]θ(−α) with [x] the floor of x.
pub fn index_singular_closed_form(alpha: f64) -> i64 {
    if alpha > 0.0 {
        alpha.floor() as i64
    } else if alpha < 0.0 {
        -((-alpha).floor() as i64)
    } else {
        0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EquivClass {
    /// open interval (lo, hi)
    Interval(i64, i64),
    IsolatedInteger(i64),
}

/// Sectors of α that cannot be reached from each other perturbatively:
/// (−1, 1), (n, n+1) and (−n−1, −n) for n ≥ 1, and each integer k ≠ 0.
pub fn classify_alpha(alpha: f64) -> EquivClass {
    if alpha.abs() < 1.0 {
        EquivClass::Interval(-1, 1)
    } else if alpha == alpha.round() {
        EquivClass::IsolatedInteger(alpha as i64)
    } else {
        let lo = alpha.floor() as i64;
        EquivClass::Interval(lo, lo + 1)
    }
}

#[derive(Serialize, Deserialize)]
struct StateRow {
    family: String,
    sigma: f64,
    m: i64,
    n: u32,
    #[serde(rename = "E")]
    energy: f64,
}

#[derive(Serialize, Deserialize)]
struct VacancyRow {
    m_plus_sigma: f64,
    sigma_down_m: i64,
    sigma_up_m: i64,
}

#[derive(Serialize, Deserialize)]
struct TableDoc {
    alpha: f64,
    kappa: f64,
    e_max: f64,
    m_range: (i64, i64),
    states: Vec<StateRow>,
    vacancies: Vec<VacancyRow>,
    block_shift: f64,
}

fn row_to_state(family: &str, sigma: f64, m: i64, n: u32, energy: f64, alpha: f64, kappa: f64) -> Result<EigenState> {
    let family = Family::parse(family).ok_or_else(|| Error::InvalidConfig(format!("unknown family {family}")))?;
    let sigma = Spin::from_value(sigma).ok_or_else(|| Error::InvalidConfig(format!("bad sigma {sigma}")))?;
    let s = EigenState::new(family, Channel::new(sigma, m), n, alpha, kappa)?;
    if s.energy != energy {
        return Err(Error::InvalidConfig(format!(
            "energy {energy} of {family} (m={m}, n={n}) disagrees with quantisation {}",
            s.energy
        )));
    }
    Ok(s)
}

impl SpectrumTable {
    pub fn to_json(&self) -> String {
        let doc = TableDoc {
            alpha: self.alpha,
            kappa: self.kappa,
            e_max: self.e_max,
            m_range: self.m_range,
            states: self
                .states
                .iter()
                .map(|s| StateRow {
                    family: s.family.name().to_string(),
                    sigma: s.channel.sigma.value(),
                    m: s.channel.m,
                    n: s.n,
                    energy: s.energy,
                })
                .collect(),
            vacancies: self
                .vacancies
                .iter()
                .map(|v| VacancyRow {
                    m_plus_sigma: v.column(),
                    sigma_down_m: v.down_m,
                    sigma_up_m: v.down_m - 1,
                })
                .collect(),
            block_shift: self.block_shift,
        };
        serde_json::to_string_pretty(&doc).expect("spectrum table serialises")
    }

    pub fn from_json(text: &str) -> Result<SpectrumTable> {
        let doc: TableDoc = serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let states = doc
            .states
            .iter()
            .map(|r| row_to_state(&r.family, r.sigma, r.m, r.n, r.energy, doc.alpha, doc.kappa))
            .collect::<Result<Vec<_>>>()?;
        Ok(SpectrumTable {
            states,
            alpha: doc.alpha,
            kappa: doc.kappa,
            e_max: doc.e_max,
            m_range: doc.m_range,
            vacancies: doc
                .vacancies
                .iter()
                .map(|v| PairChannel { down_m: v.sigma_down_m })
                .collect(),
            block_shift: doc.block_shift,
        })
    }

    /// Plot rows `m_plus_sigma,sigma,m,n,E,family`; each vacant column gets a
    /// row with family `vacancy` and empty state fields.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["m_plus_sigma", "sigma", "m", "n", "E", "family"])
            .expect("in-memory csv");
        for s in &self.states {
            w.write_record([
                s.channel.column().to_string(),
                s.channel.sigma.value().to_string(),
                s.channel.m.to_string(),
                s.n.to_string(),
                s.energy.to_string(),
                s.family.name().to_string(),
            ])
            .expect("in-memory csv");
        }
        for v in &self.vacancies {
            w.write_record([v.column().to_string(), String::new(), String::new(), String::new(), String::new(), "vacancy".into()])
                .expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8 csv")
    }

    /// Reads back the rows written by [`SpectrumTable::to_csv`]; α and κ are
    /// not part of the CSV and must be supplied.
    pub fn states_from_csv(text: &str, alpha: f64, kappa: f64) -> Result<(Vec<EigenState>, Vec<PairChannel>)> {
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        let bad = |e: &dyn fmt::Display| Error::InvalidConfig(format!("csv: {e}"));
        let mut states = Vec::new();
        let mut vacancies = Vec::new();
        for rec in rd.records() {
            let rec = rec.map_err(|e| bad(&e))?;
            let field = |i: usize| rec.get(i).unwrap_or("");
            if field(5) == "vacancy" {
                let col: f64 = field(0).parse().map_err(|e| bad(&e))?;
                vacancies.push(PairChannel {
                    down_m: (col + 0.5).round() as i64,
                });
                continue;
            }
            let sigma: f64 = field(1).parse().map_err(|e| bad(&e))?;
            let m: i64 = field(2).parse().map_err(|e| bad(&e))?;
            let n: u32 = field(3).parse().map_err(|e| bad(&e))?;
            let e: f64 = field(4).parse().map_err(|e| bad(&e))?;
            states.push(row_to_state(field(5), sigma, m, n, e, alpha, kappa)?);
        }
        Ok((states, vacancies))
    }
}
