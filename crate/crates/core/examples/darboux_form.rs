//! Darboux normal form of a bivector and congruence normal form of a skew
//! matrix.

use fibrate::exterior::{darboux_decompose, skew_normal_form, Bivector};
use fibrate::numkern::max_abs;

fn main() -> fibrate::Result<()> {
    for c in [
        [1., 2., 3., 4., 5., 6.],
        [1., 0., 0., 0., 0., 1.],
        [0., 1., 0., 0., 0., 0.],
    ] {
        let a = Bivector::new(c);
        let d = darboux_decompose(&a);
        println!(
            "α = {a}: a = {:.4}, b = {:.4}, error {:.1e}",
            d.a,
            d.b,
            (d.reconstruct() - a).max_abs()
        );
        let m = a.to_skew_matrix();
        let (q, form) = skew_normal_form(&m)?;
        println!(
            "  congruent to {form:?}, residual {:.1e}",
            max_abs(&(q.transpose() * &m * &q - form.matrix()))
        );
    }
    Ok(())
}
