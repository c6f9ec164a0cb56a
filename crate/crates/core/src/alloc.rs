//! Closed-form two-user NOMA power allocation.
//!
//! The strong user (SU) gets the smaller power share `α_s` and decodes after
//! SIC; the weak user (WU) treats the SU signal as interference:
//!
//! ```text
//! γ_s = ρ·α_s·g_s
//! γ_w = ρ·(1-α_s)·g_w / (ρ·α_s·g_w + 1)
//! ```
//!
//! The product `(1+γ_s)(1+γ_w)` is nondecreasing in `α_s`, so the optimum
//! sits on the tightest upper bound whenever the decoding constraints admit
//! any feasible share. The constraints reduce to three bounds:
//! `l₁ = γ₀/(ρ·g_s)` from the SU threshold and `μ₁`, `μ₂` from the WU
//! threshold evaluated at the strong and weak gains. Their ordering selects
//! one of five cases.

use serde::{Deserialize, Serialize};

/// Physical user index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UserIndex {
    User1,
    User2,
}

impl UserIndex {
    pub fn other(self) -> Self {
        match self {
            UserIndex::User1 => UserIndex::User2,
            UserIndex::User2 => UserIndex::User1,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            UserIndex::User1 => 1,
            UserIndex::User2 => 2,
        }
    }
}

/// Per-antenna transmit power, noise power and decoding threshold (linear).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    per_antenna_power: f64,
    noise_power: f64,
    sinr_threshold: f64,
}

impl LinkBudget {
    /// Returns `None` unless every quantity is positive and finite.
    pub fn new(per_antenna_power: f64, noise_power: f64, sinr_threshold: f64) -> Option<Self> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        (ok(per_antenna_power) && ok(noise_power) && ok(sinr_threshold)).then_some(Self {
            per_antenna_power,
            noise_power,
            sinr_threshold,
        })
    }

    /// Budget with unit noise power, so `snr_ratio() == rho`.
    pub fn from_snr(rho: f64, sinr_threshold: f64) -> Option<Self> {
        Self::new(rho, 1.0, sinr_threshold)
    }

    pub fn per_antenna_power(&self) -> f64 {
        self.per_antenna_power
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }

    /// `ρ = P₀/σ²`.
    pub fn snr_ratio(&self) -> f64 {
        self.per_antenna_power / self.noise_power
    }

    /// `γ₀`, linear.
    pub fn sinr_threshold(&self) -> f64 {
        self.sinr_threshold
    }

    pub fn with_per_antenna_power(self, per_antenna_power: f64) -> Option<Self> {
        Self::new(per_antenna_power, self.noise_power, self.sinr_threshold)
    }
}

/// Channel gains `|h|²` ordered into strong and weak roles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainPair {
    strong_gain: f64,
    weak_gain: f64,
    strong_user: UserIndex,
}

impl GainPair {
    /// Orders the two physical gains; ties go to user 1.
    pub fn from_users(gain_user1: f64, gain_user2: f64) -> Self {
        if gain_user1 >= gain_user2 {
            Self {
                strong_gain: gain_user1,
                weak_gain: gain_user2,
                strong_user: UserIndex::User1,
            }
        } else {
            Self {
                strong_gain: gain_user2,
                weak_gain: gain_user1,
                strong_user: UserIndex::User2,
            }
        }
    }

    /// Gains already in role order. Returns `None` if `strong < weak` or
    /// either gain is negative or non-finite.
    pub fn new(strong_gain: f64, weak_gain: f64) -> Option<Self> {
        (weak_gain.is_finite()
            && strong_gain.is_finite()
            && weak_gain >= 0.0
            && strong_gain >= weak_gain)
            .then_some(Self {
                strong_gain,
                weak_gain,
                strong_user: UserIndex::User1,
            })
    }

    pub fn strong_gain(&self) -> f64 {
        self.strong_gain
    }

    pub fn weak_gain(&self) -> f64 {
        self.weak_gain
    }

    pub fn strong_user(&self) -> UserIndex {
        self.strong_user
    }

    pub fn weak_user(&self) -> UserIndex {
        self.strong_user.other()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AllocBounds {
    /// `l₁`, from the strong user's own decoding threshold.
    pub lower: f64,
    /// `μ₁`, weak-signal SIC threshold at the strong gain.
    pub upper_strong: f64,
    /// `μ₂`, weak user's threshold at the weak gain.
    pub upper_weak: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AllocCase {
    I,
    II,
    III,
    IV,
    V,
}

impl AllocCase {
    pub fn label(self) -> &'static str {
        match self {
            AllocCase::I => "I",
            AllocCase::II => "II",
            AllocCase::III => "III",
            AllocCase::IV => "IV",
            AllocCase::V => "V",
        }
    }
}

impl std::fmt::Display for AllocCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AllocationOutcome {
    pub case_label: AllocCase,
    pub alpha_s: f64,
    pub sinr_strong: f64,
    pub sinr_weak: f64,
    pub rate_strong: f64,
    pub rate_weak: f64,
    pub outage_strong: bool,
    pub outage_weak: bool,
}

impl AllocationOutcome {
    pub fn sum_rate(&self) -> f64 {
        self.rate_strong + self.rate_weak
    }
}

/// SINRs and rates for a fixed share.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrRates {
    pub sinr_strong: f64,
    pub sinr_weak: f64,
    pub rate_strong: f64,
    pub rate_weak: f64,
}

/// `(γ - γ₀)/(γ·(1+γ₀))` with `γ = ρ·g`; `-∞` for a zero gain.
fn weak_threshold_bound(rho_gain: f64, gamma0: f64) -> f64 {
    if rho_gain == 0.0 {
        return f64::NEG_INFINITY;
    }
    (rho_gain - gamma0) / (rho_gain * (1.0 + gamma0))
}

pub fn alloc_bounds(g: &GainPair, lb: &LinkBudget) -> AllocBounds {
    let rho = lb.snr_ratio();
    let gamma0 = lb.sinr_threshold();
    let rho_s = rho * g.strong_gain;
    let rho_w = rho * g.weak_gain;
    if rho_s == 0.0 {
        return AllocBounds {
            lower: f64::INFINITY,
            upper_strong: f64::NEG_INFINITY,
            upper_weak: f64::NEG_INFINITY,
        };
    }
    AllocBounds {
        lower: gamma0 / rho_s,
        upper_strong: weak_threshold_bound(rho_s, gamma0),
        upper_weak: weak_threshold_bound(rho_w, gamma0),
    }
}

/// Case label from the bound ordering alone.
pub fn classify(bounds: &AllocBounds) -> AllocCase {
    let AllocBounds {
        lower: l1,
        upper_strong: mu1,
        upper_weak: mu2,
    } = *bounds;
    if !l1.is_finite() {
        AllocCase::V
    } else if l1 <= mu2 && mu2 <= mu1 {
        AllocCase::I
    } else if 0.0 <= mu2 && mu2 < l1 && l1 <= 1.0 {
        AllocCase::II
    } else if mu2 < 0.0 && 0.0 < l1 && l1 <= 1.0 {
        AllocCase::III
    } else if (0.0..1.0).contains(&mu2) && 1.0 < l1 {
        AllocCase::IV
    } else {
        AllocCase::V
    }
}

pub fn sinr_and_rates(alpha_s: f64, g: &GainPair, lb: &LinkBudget) -> SinrRates {
    let rho = lb.snr_ratio();
    let sinr_strong = rho * alpha_s * g.strong_gain;
    let sinr_weak = rho * (1.0 - alpha_s) * g.weak_gain / (rho * alpha_s * g.weak_gain + 1.0);
    SinrRates {
        sinr_strong,
        sinr_weak,
        rate_strong: (1.0 + sinr_strong).log2(),
        rate_weak: (1.0 + sinr_weak).log2(),
    }
}

/// `m(α_s) = (1+γ_s)(1+γ_w)`.
pub fn alloc_metric(alpha_s: f64, g: &GainPair, lb: &LinkBudget) -> f64 {
    let s = sinr_and_rates(alpha_s, g, lb);
    (1.0 + s.sinr_strong) * (1.0 + s.sinr_weak)
}

/// `m'(α_s) = ρ(1+ρ·g_w)|g_s - g_w| / (ρ·α_s·g_w + 1)²`, never negative.
pub fn alloc_metric_derivative(alpha_s: f64, g: &GainPair, lb: &LinkBudget) -> f64 {
    let rho = lb.snr_ratio();
    let w = g.weak_gain;
    let denom = rho * alpha_s * w + 1.0;
    rho * (1.0 + rho * w) * (g.strong_gain - w).abs() / (denom * denom)
}

fn outcome(
    case_label: AllocCase,
    alpha_s: f64,
    g: &GainPair,
    lb: &LinkBudget,
    outage_strong: bool,
    outage_weak: bool,
) -> AllocationOutcome {
    let s = sinr_and_rates(alpha_s, g, lb);
    AllocationOutcome {
        case_label,
        alpha_s,
        sinr_strong: s.sinr_strong,
        sinr_weak: s.sinr_weak,
        rate_strong: if outage_strong { 0.0 } else { s.rate_strong },
        rate_weak: if outage_weak { 0.0 } else { s.rate_weak },
        outage_strong,
        outage_weak,
    }
}

/// Picks the case and the share `α_s` for it.
///
/// When only one user can be served (Case II) the choice follows the
/// reference-rate comparison `R₁ = log₂(1 + (ρ·g_s - γ₀)/(1+γ₀))` against
/// `R₂ = log₂(1 + ρ·g_w)`. The dropped user's share goes to zero and the
/// served user's achieved rate is evaluated at the resulting `α_s` (so a
/// lone strong user achieves `log₂(1+ρ·g_s)`, not `R₁`).
pub fn classify_and_allocate(g: &GainPair, lb: &LinkBudget) -> AllocationOutcome {
    let bounds = alloc_bounds(g, lb);
    let case = classify(&bounds);
    match case {
        AllocCase::I => outcome(case, bounds.upper_weak, g, lb, false, false),
        AllocCase::II => {
            let rho = lb.snr_ratio();
            let gamma0 = lb.sinr_threshold();
            let r1 = (1.0 + (rho * g.strong_gain - gamma0) / (1.0 + gamma0)).log2();
            let r2 = (1.0 + rho * g.weak_gain).log2();
            if r1 > r2 {
                outcome(case, 1.0, g, lb, false, true)
            } else {
                outcome(case, 0.0, g, lb, true, false)
            }
        }
        AllocCase::III => outcome(case, 1.0, g, lb, false, true),
        AllocCase::IV => outcome(case, 0.0, g, lb, true, false),
        AllocCase::V => outcome(case, 0.0, g, lb, true, true),
    }
}
