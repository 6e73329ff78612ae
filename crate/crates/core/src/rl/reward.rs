use crate::error::{Error, Result};

/// `α(2r − r*) − (1 − α)τ`: rewards matching or beating the full-context
/// score `r*` while penalizing the kept token ratio `τ`.
pub fn compute_reward(r: f64, r_star: f64, tau: f64, alpha: f64) -> Result<f64> {
    for (name, v) in [("r", r), ("r*", r_star), ("tau", tau), ("alpha", alpha)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidReward(format!(
                "{name} = {v} is outside [0, 1]"
            )));
        }
    }
    Ok(alpha * (2.0 * r - r_star) - (1.0 - alpha) * tau)
}
