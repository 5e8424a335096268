//! Angles θ± between oriented planes and the ψ maps at a point.

use fibrate::grassmann::{intersects, perp_frame, plane, psi, psi_inverse, theta_pm, Side};
use fibrate::numkern::Vector;

fn v(x: &[f64]) -> Vector {
    Vector::from_row_slice(x)
}

fn main() -> fibrate::Result<()> {
    let p = plane(&v(&[1., 0., 0., 0.]), &v(&[0., 1., 0., 0.]))?;
    for (label, q) in [
        (
            "shares e1",
            plane(&v(&[1., 0., 0., 0.]), &v(&[0., 0.6, 0.8, 0.]))?,
        ),
        (
            "generic",
            plane(&v(&[0.5, 0.1, 0.7, 0.2]), &v(&[0., 0.3, -0.2, 0.9]))?,
        ),
    ] {
        let (tm, tp) = theta_pm(&p, &q);
        println!(
            "{label:10} θ₋ = {tm:.6}  θ₊ = {tp:.6}  intersects: {}",
            intersects(&p, &q, 1e-9)
        );
    }

    // Planes through x correspond to unit vectors of x⊥ on either side.
    let x = v(&[0.5, 0.5, 0.5, 0.5]);
    let frame = perp_frame(&x);
    for side in [Side::Minus, Side::Plus] {
        let a = psi(&x, &frame[0], side)?;
        let u = psi_inverse(&x, &a, side)?;
        println!(
            "{side:?}: ψ(f1) = {a}, |ψ⁻¹ψ(f1) − f1| = {:.2e}",
            (u - &frame[0]).norm()
        );
    }
    Ok(())
}
