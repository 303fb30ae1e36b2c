use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Complete elliptic integral of the first kind K(k) (modulus convention),
/// via the arithmetic–geometric mean.
pub fn elliptic_k(k: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::Domain(format!("elliptic_k requires 0 <= k < 1, got {k}")));
    }
    let (mut a, mut g) = (1.0f64, (1.0 - k * k).sqrt());
    for _ in 0..64 {
        if (a - g).abs() <= 1e-16 * a {
            break;
        }
        let an = 0.5 * (a + g);
        g = (a * g).sqrt();
        a = an;
    }
    Ok(PI / (2.0 * a))
}
