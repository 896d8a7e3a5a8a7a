use super::{Mode, MIN_CHANGE};

/// Combination % change for one simulated patient with monotherapy changes
/// `p1_chg`, `p2_chg`.
///
/// In [`Mode::Proposed`], a patient responding to both drugs (both changes
/// strictly below `cutoff`) gets the Bliss combination of the two reduction
/// fractions, corrected by `rho`. Everyone else, and everyone in
/// [`Mode::Palmer`], gets the better of the two changes.
pub fn combine_pair(p1_chg: f64, p2_chg: f64, cutoff: f64, rho: f64, mode: Mode) -> f64 {
    let best = p1_chg.min(p2_chg);
    let out = match mode {
        Mode::Proposed if p1_chg < cutoff && p2_chg < cutoff => {
            let p1 = (p1_chg / 100.0).abs();
            let p2 = (p2_chg / 100.0).abs();
            let var = (p1 * (1.0 - p1) * p2 * (1.0 - p2)).max(0.0);
            // complement form keeps a complete response at exactly -100
            -100.0 * (1.0 - (1.0 - p1) * (1.0 - p2) - rho * var.sqrt())
        }
        _ => best,
    };
    out.max(MIN_CHANGE)
}
