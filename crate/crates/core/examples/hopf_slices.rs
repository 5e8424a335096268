//! Fibers of a Hopf fibration of S³ have a constant self-dual or
//! anti-self-dual part, depending on the sign.

use fibrate::gcfib::{fiber, fibration_sign, hopf_slice_check, rotate90, Fibration};
use fibrate::numkern::{random_unit_vector, rng, Sign};
use fibrate::ocs::random_ocs;

fn main() -> fibrate::Result<()> {
    for want in [Sign::Positive, Sign::Negative] {
        let j = random_ocs(2, want, 7);
        let s = hopf_slice_check(&j, 200, 1)?;
        println!(
            "sign {:+}: constant {:?} part {} (spread {:.1e})",
            want.value(),
            s.side,
            s.point,
            s.spread
        );

        let f = Fibration::hopf(j);
        let x = random_unit_vector(&mut rng(3), 4);
        let plane = fiber(&f, &x)?;
        let y = rotate90(&f, &x)?;
        println!(
            "  fiber through x contains x to {:.1e}, quarter turn to {:.1e}; fibration sign {:+}",
            plane.containment_residual(&x),
            plane.containment_residual(&y),
            fibration_sign(&f, 0)?.value()
        );
    }
    Ok(())
}
