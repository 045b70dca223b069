//! Most likely trajectories of single area-weighted paths and the tangent
//! family they generate.

use super::ArcticError;

/// Geodesic of a `q`-weighted free path from `(0,0)` to `(lambda, z)` in
/// rescaled coordinates, solving
/// `q^x (q^z - 1)/(q^(l+z) - 1) + q^(z-y) (q^l - 1)/(q^(l+z) - 1) = 1`
/// for `y(x)` on `x in [0, lambda]`. At `q = 1` this is the straight segment.
pub fn geodesic(
    lambda: f64,
    z: f64,
    q: f64,
    npoints: usize,
) -> Result<Vec<(f64, f64)>, ArcticError> {
    if !(lambda > 0.0) || !(z > 0.0) || !(q > 0.0) || !q.is_finite() {
        return Err(ArcticError::InvalidParameter(
            "geodesic needs lambda, z, q > 0".into(),
        ));
    }
    let n = npoints.max(2);
    let xs = (0..n).map(|k| lambda * k as f64 / (n - 1) as f64);
    if q == 1.0 {
        return Ok(xs.map(|x| (x, z * x / lambda)).collect());
    }
    let a = (q.powf(z) - 1.0) / (q.powf(lambda + z) - 1.0);
    let b = (q.powf(lambda) - 1.0) / (q.powf(lambda + z) - 1.0);
    let lq = q.ln();
    Ok(xs
        .map(|x| {
            // q^(z - y) = (1 - A q^x) / B.
            let y = z - ((1.0 - a * q.powf(x)) / b).ln() / lq;
            (x, y)
        })
        .collect())
}

/// The tangent geodesic of the family enveloping the `q`-arctic curve:
/// `(1 - x0) q^(kappa + x) + t x0 q^(-y) = t` solved for `y(x)`.
pub fn tangent_geodesic(
    x0: f64,
    t: f64,
    kappa: f64,
    q: f64,
    x_range: (f64, f64),
    npoints: usize,
) -> Result<Vec<(f64, f64)>, ArcticError> {
    if !(q > 0.0) || !q.is_finite() || q == 1.0 {
        return Err(ArcticError::InvalidParameter(
            "tangent geodesics need q > 0, q != 1".into(),
        ));
    }
    let n = npoints.max(2);
    let lq = q.ln();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let x = x_range.0 + (x_range.1 - x_range.0) * k as f64 / (n - 1) as f64;
        let rhs = (t - (1.0 - x0) * q.powf(kappa + x)) / (t * x0);
        if rhs <= 0.0 {
            continue; // past the reach of this tangent
        }
        let y = -rhs.ln() / lq;
        out.push((x, y));
    }
    Ok(out)
}
