//! Information and entropy bookkeeping for twin-billiard runs.
//!
//! All bit counts are base-2 logarithms. The quantum of phase area is a free
//! positive parameter rather than Planck's constant.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scaling::ScalingFit;

/// Largest position uncertainty on the 4096-pixel table.
pub const DEFAULT_DP_MAX: f64 = 4096.0;

/// Phase-space uncertainties of one object.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfoBudget {
    pub dp_max: f64,
    pub dq_max: f64,
    pub dp: f64,
    pub dq: f64,
    /// Area of the elementary phase cell (`ε_p·ε_q`).
    pub h_quantum: f64,
}

impl InfoBudget {
    pub fn new(dp_max: f64, dq_max: f64, dp: f64, dq: f64, h_quantum: f64) -> Result<Self> {
        let b = Self {
            dp_max,
            dq_max,
            dp,
            dq,
            h_quantum,
        };
        b.validate()?;
        Ok(b)
    }

    /// Position-only budget: the velocity factor is pinned to `dq = dq_max = 1`
    /// so it contributes no bits.
    pub fn position_only(dp: f64, h_quantum: f64) -> Result<Self> {
        Self::new(DEFAULT_DP_MAX, 1.0, dp, 1.0, h_quantum)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.dp > 0.0
            && self.dp <= self.dp_max
            && self.dq > 0.0
            && self.dq <= self.dq_max
            && self.h_quantum > 0.0
            && [self.dp_max, self.dq_max, self.dp, self.dq, self.h_quantum]
                .iter()
                .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("invalid information budget {self:?}")))
        }
    }

    /// Total phase information `log2(Δp_max·Δq_max / h)`.
    pub fn info_total(&self) -> f64 {
        (self.dp_max * self.dq_max / self.h_quantum).log2()
    }
}

/// Deterministic phase information `log2(Δp_max·Δq_max / (Δp·Δq))`.
pub fn info_det(budget: &InfoBudget) -> f64 {
    (budget.dp_max / budget.dp).log2() + (budget.dq_max / budget.dq).log2()
}

/// Residual (indeterminate) information `log2(Δp·Δq / h)`.
pub fn info_ind(budget: &InfoBudget) -> f64 {
    (budget.dp * budget.dq / budget.h_quantum).log2()
}

/// Entropy of `n_balls` objects holding `info_det` bits each, for equiprobable
/// microstates: `S = -N_b·k_B·ln2·I`.
pub fn entropy_from_info(info_det: f64, n_balls: usize, k_boltzmann: f64) -> Result<f64> {
    if !(info_det >= 0.0) {
        return Err(Error::Domain(format!("information must be non-negative, got {info_det}")));
    }
    Ok(-(n_balls as f64) * k_boltzmann * LN_2 * info_det)
}

/// Billiard information `Σ log2(Δp_max / Δp_i)` over per-ball separations.
pub fn billiard_information(separations: &[f64], dp_max: f64) -> Result<f64> {
    separations.iter().try_fold(0.0, |acc, &dp| {
        if !(dp > 0.0 && dp <= dp_max) {
            return Err(Error::Domain(format!("separation {dp} outside (0, {dp_max}]")));
        }
        Ok(acc + (dp_max / dp).log2())
    })
}

/// Information of a freshly seeded billiard, `N_b·P_i` with `P_i = log2(Δp_max/ε)`.
pub fn initial_billiard_information(n_balls: usize, dp_max: f64, epsilon: f64) -> f64 {
    n_balls as f64 * (dp_max / epsilon).log2()
}

/// Precision split of the initial conditions: `P_i = P_a + P_c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionBudget {
    pub initial: u32,
    pub calculation: u32,
}

impl PrecisionBudget {
    pub fn new(initial: u32, calculation: u32) -> Result<Self> {
        if calculation == 0 || initial <= calculation {
            return Err(Error::Domain(format!(
                "need P_i > P_c > 0, got P_i = {initial}, P_c = {calculation}"
            )));
        }
        // P_a + P_c = P_i must fit in a 64-bit word
        if initial >= 64 {
            return Err(Error::Domain(format!("P_a + P_c = {initial} does not fit in 64 bits")));
        }
        Ok(Self {
            initial,
            calculation,
        })
    }

    /// `P_a = P_i - P_c = -log2 ε`.
    pub fn additional(&self) -> u32 {
        self.initial - self.calculation
    }
}

/// Valid computed information after `n` shocks per ball:
/// `N_b·N·(P_a·(1 - N/N_c) + P_c)` for `0 < N < N_c`.
pub fn linear_loss_model(
    n: f64,
    n_c: f64,
    p_additional: f64,
    p_calculation: f64,
    n_balls: usize,
) -> Result<f64> {
    if !(n > 0.0 && n < n_c) {
        return Err(Error::Domain(format!("N = {n} outside (0, N_c = {n_c})")));
    }
    Ok(n_balls as f64 * n * (p_additional * (1.0 - n / n_c) + p_calculation))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DemonVerdict {
    /// Trajectory information falls short of the initial-condition information.
    Paradox,
    NoParadox,
    Borderline,
}

impl DemonVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            DemonVerdict::Paradox => "paradox",
            DemonVerdict::NoParadox => "no_paradox",
            DemonVerdict::Borderline => "borderline",
        }
    }
}

/// Critical step as an exact fraction `numer / denom`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShockCount {
    pub numer: u64,
    pub denom: u64,
}

impl ShockCount {
    pub fn whole(n: u64) -> Self {
        Self { numer: n, denom: 1 }
    }

    /// Nearest fraction with denominator 2^20.
    pub fn from_f64(x: f64) -> Self {
        const DENOM: u64 = 1 << 20;
        Self {
            numer: (x.max(0.0) * DENOM as f64).round() as u64,
            denom: DENOM,
        }
    }
}

impl From<u64> for ShockCount {
    fn from(n: u64) -> Self {
        Self::whole(n)
    }
}

/// Compare `P_c·N_c` trajectory bits with `2·P_i` initial bits per ball, exactly.
pub fn demon_condition(p_initial: u32, p_calculation: u32, n_c: impl Into<ShockCount>) -> DemonVerdict {
    let n_c = n_c.into();
    let trajectory = p_calculation as u128 * n_c.numer as u128;
    let initial = 2 * p_initial as u128 * n_c.denom as u128;
    match trajectory.cmp(&initial) {
        std::cmp::Ordering::Less => DemonVerdict::Paradox,
        std::cmp::Ordering::Equal => DemonVerdict::Borderline,
        std::cmp::Ordering::Greater => DemonVerdict::NoParadox,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DemonFrontier {
    /// Critical step below which the paradox holds, `2·P_i / P_c`.
    pub nc_threshold: f64,
    /// `log2 N_b` where the fitted line meets the threshold.
    pub log2_nb: f64,
    /// Smallest integer ball count for which the fitted `N_c` is below the threshold.
    pub n_balls: u64,
}

/// Smallest `N_b` for which the fitted scaling law predicts the paradox.
pub fn demon_frontier(p_initial: u32, p_calculation: u32, fit: &ScalingFit) -> Result<DemonFrontier> {
    let precision = PrecisionBudget::new(p_initial, p_calculation)?;
    let threshold = 2.0 * p_initial as f64 / p_calculation as f64;
    let level = fit.a + fit.b * precision.additional() as f64;
    if fit.c >= 0.0 {
        return Err(Error::NoCrossing(format!(
            "fitted N_c = {level:.3} + {:.3}·log2(N_b) never drops below {threshold:.3}",
            fit.c
        )));
    }
    let x = (level - threshold) / -fit.c;
    if x >= 64.0 {
        return Err(Error::NoCrossing(format!(
            "threshold reached only at log2(N_b) = {x:.2} > 64"
        )));
    }
    // smallest integer strictly beyond the crossing
    let n_balls = if x < 1.0 { 2 } else { x.exp2().floor() as u64 + 1 };
    Ok(DemonFrontier {
        nc_threshold: threshold,
        log2_nb: x,
        n_balls,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn det_info_examples() {
        let none = InfoBudget::new(4096.0, 2.0, 4096.0, 2.0, 1e-3).unwrap();
        assert_eq!(info_det(&none), 0.0);
        let twelve = InfoBudget::new(4096.0, 1.0, 1.0, 1.0, 1e-3).unwrap();
        assert_eq!(info_det(&twelve), 12.0);
    }

    #[test]
    fn ind_info_examples() {
        let b = InfoBudget::new(4096.0, 1.0, 0.5, 1.0, 0.5).unwrap();
        assert_eq!(info_ind(&b), 0.0);
        let b = InfoBudget::new(4096.0, 1.0, 4.0, 1.0, 0.5).unwrap();
        assert_eq!(info_ind(&b), 3.0);
    }

    #[test]
    fn det_reaches_total_at_the_bound() {
        let h = 2f64.powi(-20);
        let b = InfoBudget::new(4096.0, 1.0, h, 1.0, h).unwrap();
        assert_relative_eq!(info_det(&b), b.info_total(), epsilon = 1e-12);
        assert_eq!(info_ind(&b), 0.0);
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy_from_info(0.0, 10, 1.0).unwrap(), 0.0);
        assert_relative_eq!(entropy_from_info(1.0, 1, 1.0).unwrap(), -LN_2);
        let s1 = entropy_from_info(3.5, 7, 1.0).unwrap();
        let s2 = entropy_from_info(3.5, 14, 1.0).unwrap();
        assert_relative_eq!(s2, 2.0 * s1);
        assert!(entropy_from_info(-1.0, 1, 1.0).is_err());
    }

    #[test]
    fn billiard_information_examples() {
        let eps = (-35f64).exp2();
        let all_eps = vec![eps; 128];
        assert_eq!(billiard_information(&all_eps, 4096.0).unwrap(), 6016.0);
        assert_eq!(initial_billiard_information(128, 4096.0, eps), 6016.0);
        assert_eq!(billiard_information(&[4096.0; 5], 4096.0).unwrap(), 0.0);
        assert_eq!(billiard_information(&[1.0], 4096.0).unwrap(), 12.0);
        assert!(billiard_information(&[0.0], 4096.0).is_err());
        assert!(billiard_information(&[5000.0], 4096.0).is_err());
    }

    #[test]
    fn linear_loss_examples() {
        // independent evaluation: 1000 * 4 * (30 * (1 - 4/8) + 10) = 4000 * 25
        assert_eq!(linear_loss_model(4.0, 8.0, 30.0, 10.0, 1000).unwrap(), 100_000.0);
        let near = linear_loss_model(8.0 - 1e-9, 8.0, 30.0, 10.0, 1000).unwrap();
        assert_relative_eq!(near, 1000.0 * 8.0 * 10.0, max_relative = 1e-9);
        assert_eq!(linear_loss_model(3.0, 8.0, 0.0, 10.0, 50).unwrap(), 50.0 * 3.0 * 10.0);
        assert!(linear_loss_model(0.0, 8.0, 30.0, 10.0, 1).is_err());
        assert!(linear_loss_model(8.0, 8.0, 30.0, 10.0, 1).is_err());
    }

    #[test]
    fn precision_budget_limits() {
        let p = PrecisionBudget::new(40, 10).unwrap();
        assert_eq!(p.additional(), 30);
        assert!(PrecisionBudget::new(10, 10).is_err());
        assert!(PrecisionBudget::new(64, 10).is_err());
    }

    #[test]
    fn demon_ladder() {
        assert_eq!(demon_condition(40, 10, 8), DemonVerdict::Borderline);
        assert_eq!(demon_condition(40, 10, 10), DemonVerdict::NoParadox);
        assert_eq!(demon_condition(40, 10, 6), DemonVerdict::Paradox);
        assert_eq!(
            demon_condition(40, 10, ShockCount { numer: 16, denom: 2 }),
            DemonVerdict::Borderline
        );
    }

    fn reference_fit() -> ScalingFit {
        ScalingFit::exact(
            2.8,
            0.21,
            -0.35,
            crate::scaling::DomainBox {
                k_min: 0.0,
                k_max: 50.0,
                log2_nb_min: 10.0,
                log2_nb_max: 20.0,
            },
        )
    }

    #[test]
    fn frontier_solves_the_threshold() {
        let f = demon_frontier(40, 10, &reference_fit()).unwrap();
        assert_eq!(f.nc_threshold, 8.0);
        // independent: the fitted line equals 8 where 9.1 - 0.35 x = 8
        assert_relative_eq!(f.log2_nb, 1.1 / 0.35, max_relative = 1e-12);
        assert_eq!(f.n_balls, 9);
        let fit = reference_fit();
        let n = |nb: u64| fit.a + fit.b * 30.0 + fit.c * (nb as f64).log2();
        assert!(n(f.n_balls) < 8.0 && n(f.n_balls - 1) >= 8.0);
    }

    #[test]
    fn frontier_flat_fit_has_no_solution() {
        let mut fit = reference_fit();
        fit.c = 0.0;
        assert!(matches!(demon_frontier(40, 10, &fit), Err(Error::NoCrossing(_))));
    }

    #[test]
    fn frontier_threshold_falls_with_pc() {
        let a = demon_frontier(40, 10, &reference_fit()).unwrap();
        let b = demon_frontier(40, 20, &reference_fit()).unwrap();
        assert!(b.nc_threshold < a.nc_threshold);
    }
}
