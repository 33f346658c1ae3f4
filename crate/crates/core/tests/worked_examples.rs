use lorpto::curvature::hinge_comparison_check;
use lorpto::minkowski::MinkowskiSpace;
use lorpto::model::{law_of_cosines, polar_geodesic_oracle, Hinge, ModelSpace, PolarPoint, VertexPosition};
use lorpto::{Event, LorentzianSpace};

#[test]
fn flat_quadruple_slack() {
    let m = MinkowskiSpace::new(1).unwrap();
    let q = [[0.0, 0.0], [1.0, 0.0], [2.0, 0.5], [3.0, 0.5]].map(|c| Event::minkowski(c.to_vec()));
    let s = m.separations(&q);
    let want = [1.0, 3.75f64.sqrt(), 8.75f64.sqrt(), 0.75f64.sqrt(), 3.75f64.sqrt(), 1.0];
    for (g, w) in s.to_array().iter().zip(want) {
        assert!((g - w).abs() < 1e-15);
    }
    let closed = 3.75 - 1.0 - 6.5625f64.sqrt();
    assert!((s.slack() - closed).abs() < 1e-14);
    assert!((s.slack() - 0.188_262).abs() < 1e-6);
}

#[test]
fn hinge_worked_instance() {
    let (a, b, w) = (0.5f64, 2.0f64, 0.5f64);
    let flat = law_of_cosines(a, b, w, VertexPosition::PastVertex, 0.0).unwrap();
    assert!((flat - (a * a + b * b - 2.0 * a * b * w.cosh()).sqrt()).abs() < 1e-15);
    assert!((flat - 1.412_355).abs() < 1e-6);

    let ds = law_of_cosines(a, b, w, VertexPosition::PastVertex, -1.0).unwrap();
    let oracle = polar_geodesic_oracle(-1.0, PolarPoint::new(a, -0.5 * w), PolarPoint::new(b, 0.5 * w)).unwrap();
    assert!((ds - oracle).abs() < 1e-9);
    assert!((ds - 1.378_906).abs() < 1e-6);

    let margin = hinge_comparison_check(&ModelSpace::new(-1.0).unwrap(), &Hinge::new(a, b, w), 0.0).unwrap();
    assert!((margin - (ds - flat)).abs() < 1e-9);
    assert!((margin + 0.033_450).abs() < 1e-6);
}
