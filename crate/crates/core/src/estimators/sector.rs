use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectorVerdict {
    Inside,
    Outside,
    Undecided,
}

/// `[a, b]`-sector check from an estimate of `||H(g) - (a + b)/2||_inf`.
///
/// The Nyquist plot lies in the disk centred at `(a + b)/2` with radius
/// `(b - a)/2` iff the shifted norm is below that radius; estimates within
/// `margin` of the radius are left undecided. Build the shifted system with
/// [`FirFilter::shifted`](crate::signals::FirFilter::shifted).
pub fn sector_test(shifted_norm: f64, a: f64, b: f64, margin: f64) -> Result<SectorVerdict> {
    if !(a < 0.0 && 0.0 < b) {
        return Err(Error::invalid(
            "sector",
            format!("need a < 0 < b, got [{a}, {b}]"),
        ));
    }
    if !(margin >= 0.0) {
        return Err(Error::invalid("margin", "must be non-negative"));
    }
    let radius = (b - a) / 2.0;
    Ok(if shifted_norm < radius - margin {
        SectorVerdict::Inside
    } else if shifted_norm > radius + margin {
        SectorVerdict::Outside
    } else {
        SectorVerdict::Undecided
    })
}
