//! Random orthogonal complex structures, their signs and agreement kernels.

use fibrate::numkern::Sign;
use fibrate::ocs::{agreement_space, random_ocs, sign, Mode};

fn main() -> fibrate::Result<()> {
    for n in 1..=5 {
        let j = random_ocs(n, Sign::Positive, 10 + n as u64);
        let same = random_ocs(n, Sign::Positive, 20 + n as u64);
        let opposite = random_ocs(n, Sign::Negative, 30 + n as u64);
        assert_eq!(sign(&opposite)?, Sign::Negative);
        let d_same = agreement_space(&j, &same, Mode::Sum)?.dimension;
        let d_opp = agreement_space(&j, &opposite, Mode::Sum)?;
        let d_diff = agreement_space(&j, &opposite, Mode::Difference)?.dimension;
        println!(
            "n={n}: dim ker(J+K) same {d_same}, opposite {} (gap {:.1e}); dim ker(J−K) opposite {d_diff}",
            d_opp.dimension, d_opp.spectral_gap
        );
    }
    Ok(())
}
