//! The four transmission schemes compared on every channel draw.
//!
//! * `ProposedMaNoma`: both antennas moved by SCA, then NOMA allocation.
//! * `ConventionalNoma`: antennas fixed at the local origins, NOMA allocation.
//! * `ConventionalOma`: fixed antennas, equal time shares.
//! * `OmaMa`: antennas moved by SCA, equal time shares.
//!
//! OMA convention: each user is served alone for half of the time at the
//! same per-antenna power `P₀`, so its rate is `½·log₂(1 + ρ·|h|²)` and the
//! same threshold `γ₀` decides outage (`SNR ≥ γ₀` decodes).

use serde::{Deserialize, Serialize};

use crate::alloc::{classify_and_allocate, AllocCase, GainPair, LinkBudget, UserIndex};
use crate::channel::{channel_gain, coupling_matrix, Position2D};
use crate::sca::{optimize_position, PositionObjective, ScaConfig};
use crate::scenario::ScenarioDraw;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scheme {
    ProposedMaNoma,
    ConventionalNoma,
    ConventionalOma,
    OmaMa,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::ProposedMaNoma,
        Scheme::ConventionalNoma,
        Scheme::ConventionalOma,
        Scheme::OmaMa,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::ProposedMaNoma => "proposed_ma_noma",
            Scheme::ConventionalNoma => "conventional_noma",
            Scheme::ConventionalOma => "conventional_oma",
            Scheme::OmaMa => "oma_ma",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeResult {
    pub scheme: Scheme,
    pub rate_user1: f64,
    pub rate_user2: f64,
    pub sum_rate: f64,
    pub outage_user1: bool,
    pub outage_user2: bool,
    /// Strong-user power share; `None` for the OMA schemes.
    pub alpha_s: Option<f64>,
    pub positions: [Position2D; 2],
    /// `|h₁|²`, `|h₂|²` at `positions`.
    pub gains: [f64; 2],
    pub case_label: Option<AllocCase>,
}

/// `|h_i(r)|²` for user `i ∈ {0, 1}` of a draw.
pub fn user_gain(draw: &ScenarioDraw, user: usize, r: Position2D) -> f64 {
    channel_gain(r, &draw.array, &draw.users[user]).norm_sqr()
}

/// Positions maximising each user's own `|h|²`, starting from the origin.
pub fn optimized_positions(draw: &ScenarioDraw, cfg: &ScaConfig) -> [Position2D; 2] {
    let mut out = [Position2D::ORIGIN; 2];
    for (i, slot) in out.iter_mut().enumerate() {
        let model = &draw.users[i];
        let m = coupling_matrix(&draw.array, model);
        let obj = PositionObjective::new(&m, model);
        let (r, _) = optimize_position(
            Position2D::ORIGIN,
            &obj,
            &draw.regions[i],
            cfg,
            draw.sca_seeds[i],
        )
        .expect("origin lies in every region and the config was validated with the spec");
        *slot = r;
    }
    out
}

fn noma_result(scheme: Scheme, draw: &ScenarioDraw, positions: [Position2D; 2]) -> SchemeResult {
    let gains = [
        user_gain(draw, 0, positions[0]),
        user_gain(draw, 1, positions[1]),
    ];
    let pair = GainPair::from_users(gains[0], gains[1]);
    let out = classify_and_allocate(&pair, &draw.link);
    let (rate, outage) = match pair.strong_user() {
        UserIndex::User1 => (
            [out.rate_strong, out.rate_weak],
            [out.outage_strong, out.outage_weak],
        ),
        UserIndex::User2 => (
            [out.rate_weak, out.rate_strong],
            [out.outage_weak, out.outage_strong],
        ),
    };
    SchemeResult {
        scheme,
        rate_user1: rate[0],
        rate_user2: rate[1],
        sum_rate: rate[0] + rate[1],
        outage_user1: outage[0],
        outage_user2: outage[1],
        alpha_s: Some(out.alpha_s),
        positions,
        gains,
        case_label: Some(out.case_label),
    }
}

/// Rate and outage flag of one user served alone for half the time.
pub fn oma_user(gain: f64, link: &LinkBudget) -> (f64, bool) {
    let snr = link.snr_ratio() * gain;
    if snr >= link.sinr_threshold() {
        (0.5 * (1.0 + snr).log2(), false)
    } else {
        (0.0, true)
    }
}

fn oma_result(scheme: Scheme, draw: &ScenarioDraw, positions: [Position2D; 2]) -> SchemeResult {
    let gains = [
        user_gain(draw, 0, positions[0]),
        user_gain(draw, 1, positions[1]),
    ];
    let (r1, o1) = oma_user(gains[0], &draw.link);
    let (r2, o2) = oma_user(gains[1], &draw.link);
    SchemeResult {
        scheme,
        rate_user1: r1,
        rate_user2: r2,
        sum_rate: r1 + r2,
        outage_user1: o1,
        outage_user2: o2,
        alpha_s: None,
        positions,
        gains,
        case_label: None,
    }
}

pub fn eval_proposed(draw: &ScenarioDraw, cfg: &ScaConfig) -> SchemeResult {
    noma_result(Scheme::ProposedMaNoma, draw, optimized_positions(draw, cfg))
}

pub fn eval_conventional_noma(draw: &ScenarioDraw) -> SchemeResult {
    noma_result(Scheme::ConventionalNoma, draw, [Position2D::ORIGIN; 2])
}

pub fn eval_oma(draw: &ScenarioDraw) -> SchemeResult {
    oma_result(Scheme::ConventionalOma, draw, [Position2D::ORIGIN; 2])
}

pub fn eval_oma_ma(draw: &ScenarioDraw, cfg: &ScaConfig) -> SchemeResult {
    oma_result(Scheme::OmaMa, draw, optimized_positions(draw, cfg))
}

/// All four schemes, sharing one position optimisation between the two MA
/// schemes. Ordered as [`Scheme::ALL`].
pub fn eval_all(draw: &ScenarioDraw, cfg: &ScaConfig) -> [SchemeResult; 4] {
    let moved = optimized_positions(draw, cfg);
    [
        noma_result(Scheme::ProposedMaNoma, draw, moved),
        eval_conventional_noma(draw),
        eval_oma(draw),
        oma_result(Scheme::OmaMa, draw, moved),
    ]
}
