//! Bivectors of two planes: inner product, Hodge star, self-dual split.

use fibrate::exterior::{inner, omega, omega_inverse, pi_split, star, wedge22};
use fibrate::grassmann::{orthogonal_complement, plane};
use fibrate::numkern::Vector;

fn main() -> fibrate::Result<()> {
    let p = plane(
        &Vector::from_vec(vec![1., 2., 0., 1.]),
        &Vector::from_vec(vec![0., 1., -1., 3.]),
    )?;
    let q = plane(
        &Vector::from_vec(vec![0., 0., 1., 0.]),
        &Vector::from_vec(vec![1., 0., 0., 1.]),
    )?;
    let (wp, wq) = (omega(&p), omega(&q));
    println!("ω_P = {wp}");
    println!("<ω_P, ω_Q> = {:.6}", inner(&wp, &wq));
    println!(
        "ω_P ∧ ω_Q = {:.6}  (zero iff the planes meet)",
        wedge22(&wp, &wq)
    );

    let perp = omega(&orthogonal_complement(&p));
    println!("|*ω_P − ω(P⊥)| = {:.2e}", (star(&wp) - perp).max_abs());

    let (minus, plus) = pi_split(&wp);
    println!(
        "‖π₋ω_P‖ = {:.6}, ‖π₊ω_P‖ = {:.6}",
        minus.norm(),
        plus.norm()
    );

    let back = omega_inverse(&wp)?;
    println!(
        "round trip distance {:.2e}",
        fibrate::grassmann::plane_distance(&p, &back)
    );
    Ok(())
}
