//! The OSPA distance between finite point sets: localization and
//! cardinality errors under different cutoffs and orders.

use tbdpf::{ospa, OspaParams, Point, PointSet};

fn set(points: &[(f64, f64)]) -> PointSet {
    PointSet::new(points.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap()
}

fn main() {
    let truth = set(&[(2.0, 3.0), (10.0, 10.0), (15.0, 4.0)]);
    let cases = [
        ("exact", set(&[(15.0, 4.0), (2.0, 3.0), (10.0, 10.0)])),
        ("small offsets", set(&[(2.5, 3.0), (10.0, 9.0), (15.0, 4.2)])),
        ("one missed", set(&[(2.0, 3.0), (10.0, 10.0)])),
        ("one false alarm", set(&[(2.0, 3.0), (10.0, 10.0), (15.0, 4.0), (18.0, 18.0)])),
        ("nothing declared", PointSet::empty()),
    ];
    for (c, p) in [(5.0, 1.0), (5.0, 2.0), (1.0, 1.0)] {
        let params = OspaParams::new(c, p).unwrap();
        println!("cutoff {c} m, order {p}");
        for (name, est) in &cases {
            println!("  {name:>18}: {:.4} m", ospa(est, &truth, &params));
        }
    }
}
