//! Orthonormal bases adapted to two structures with a common first vector.

use fibrate::numkern::{random_unit_vector, rng, Sign};
use fibrate::ocs::{paired_bases, random_ocs};

fn main() -> fibrate::Result<()> {
    let j = random_ocs(3, Sign::Positive, 1);
    let p = random_unit_vector(&mut rng(2), 6);
    for want in [Sign::Positive, Sign::Negative] {
        let k = random_ocs(3, want, 3);
        let pb = paired_bases(&j, &k, &p)?;
        println!(
            "K of sign {:+}: corner {:+}",
            want.value(),
            pb.corner.value()
        );
        for (c, s) in &pb.angles {
            println!("  rotation block c = {c:+.6}, s = {s:+.6}");
        }
        println!(
            "  pattern residual {:.2e}, circle residual {:.2e}",
            pb.pattern_residual(),
            pb.circle_residual()
        );
    }
    Ok(())
}
