//! A non-Hopf great-circle fibration built from a contraction of S².

use fibrate::gcfib::{
    extract_linear_structure, fiber, fibration_sign, is_distance_decreasing, verify_fibration,
    Chirality, Fibration, SphereMap,
};
use fibrate::numkern::{random_unit_vector, rng, Vector};
use nalgebra::{Matrix3, Vector3};

fn main() -> fibrate::Result<()> {
    let rot = nalgebra::Rotation3::from_axis_angle(&Vector3::x_axis(), 0.8);
    let map = SphereMap::contraction(Vector3::new(0., 0., 1.), 0.7, Matrix3::from(rot))?;
    let (ok, ratio) = is_distance_decreasing(&map, 5000, 0);
    println!("distance decreasing: {ok} (worst ratio {ratio:.4})");

    let p = Vector::from_vec(vec![0.5, -0.5, 0.5, 0.5]);
    let f = Fibration::graph(&p, map, Chirality::Positive)?;
    let mut r = rng(4);
    for _ in 0..3 {
        let x = random_unit_vector(&mut r, 4);
        let plane = fiber(&f, &x)?;
        let Fibration::Graph(g) = &f else {
            unreachable!()
        };
        println!(
            "x = {:.3?}: containment {:.1e}, graph defect {:.1e}",
            x.as_slice(),
            plane.containment_residual(&x),
            g.graph_defect(&plane)
        );
    }
    println!("sign {:+}", fibration_sign(&f, 0)?.value());
    println!("linear: {}", extract_linear_structure(&f, 64, 0).is_ok());
    print!("{}", verify_fibration(&f, 150, 0));
    println!();
    Ok(())
}
