//! Two opposite-sign Hopf fibrations of S⁷ by 3-spheres with no common
//! oriented fiber, and a same-sign pair sharing two fibers.

use fibrate::numkern::{integer_matmul, to_integer};
use fibrate::quat::{
    counterexample_pair, counterexample_q, nonuniqueness_report, s3_counterexample,
};

fn main() {
    let q = counterexample_q();
    let (plus, _) = counterexample_pair();
    for (name, l) in ["I", "J", "K"].iter().zip(plus.factors()) {
        let l = to_integer(l.matrix()).expect("integral structure");
        let (a, b) = (integer_matmul(&q, &l), integer_matmul(&l, &q));
        println!("Q{name} + {name}Q =");
        for (x, y) in a.iter().zip(&b) {
            let row: Vec<String> = x
                .iter()
                .zip(y)
                .map(|(u, v)| format!("{:3}", u + v))
                .collect();
            println!("  [{}]", row.join(""));
        }
    }
    println!("{}", s3_counterexample());
    println!("{}", nonuniqueness_report());
}
