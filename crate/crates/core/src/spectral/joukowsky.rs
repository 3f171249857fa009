use crate::error::{Error, Result};
use crate::linalg::C64;

const DOMAIN_SLACK: f64 = 1e-12;

/// φ(z) = (z + 1/z) / 2.
pub fn joukowsky(z: C64) -> Result<C64> {
    if z.norm() == 0.0 {
        return Err(Error::Domain("joukowsky transform is undefined at 0".into()));
    }
    Ok((z + z.inv()) * 0.5)
}

/// The unit-circle preimages `x ± i sqrt(1 - x^2)`, upper branch first.
///
/// Inputs within 1e-12 outside `[-1, 1]` are clamped; at `x = ±1` both
/// entries coincide.
pub fn joukowsky_inverse(x: f64) -> Result<(C64, C64)> {
    if !x.is_finite() || x.abs() > 1.0 + DOMAIN_SLACK {
        return Err(Error::Domain(format!("joukowsky inverse needs |x| <= 1, got {x}")));
    }
    let x = x.clamp(-1.0, 1.0);
    let y = (1.0 - x * x).sqrt();
    Ok((C64::new(x, y), C64::new(x, -y)))
}
