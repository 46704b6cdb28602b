use fracdg::geometry::Point2;
use fracdg::network::{
    average_cap_scalar, average_cap_vector, coupling_coefficients, jump_cap_scalar, jump_cap_vector, Fracture,
    FractureNetwork,
};
use proptest::collection::vec;
use proptest::prelude::*;

fn unit(angle: f64) -> Point2 {
    Point2::new(angle.cos(), angle.sin())
}

fn star(n: usize) -> impl Strategy<Value = (Vec<Point2>, Vec<Point2>, Vec<f64>)> {
    (vec((-10.0..10.0, -10.0..10.0), n), vec(0.0..std::f64::consts::TAU, n), vec(-10.0..10.0, n)).prop_map(
        |(a, angles, b)| (a.into_iter().map(|(x, y)| Point2::new(x, y)).collect(), angles.into_iter().map(unit).collect(), b),
    )
}

fn arbitrary_star() -> impl Strategy<Value = (Vec<Point2>, Vec<Point2>, Vec<f64>)> {
    (2usize..=6).prop_flat_map(star)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn product_identity((a, tau, b) in arbitrary_star()) {
        let lhs: f64 = a.iter().zip(&tau).zip(&b).map(|((a, t), b)| a.dot(*t) * b).sum();
        let jump_a = jump_cap_vector(&a, &tau).unwrap();
        let avg_b = average_cap_scalar(&b).unwrap();
        let avg_a = average_cap_vector(&a, &tau).unwrap();
        let jump_b = jump_cap_scalar(&b).unwrap();
        let rhs = jump_a * avg_b + avg_a.iter().zip(&jump_b).map(|(x, y)| x * y).sum::<f64>();
        let scale = a.iter().zip(&b).map(|(a, b)| a.norm() * b.abs()).sum::<f64>().max(1.0);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale, "lhs {lhs} rhs {rhs}");
    }

    #[test]
    fn scalar_jump_is_linear_and_antisymmetric(
        (u, v) in (2usize..=6).prop_flat_map(|n| (vec(-10.0..10.0f64, n), vec(-10.0..10.0f64, n))),
        s in -5.0..5.0f64,
    ) {
        let combo: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + s * b).collect();
        let (ju, jv, jc) = (jump_cap_scalar(&u).unwrap(), jump_cap_scalar(&v).unwrap(), jump_cap_scalar(&combo).unwrap());
        for i in 0..jc.len() {
            prop_assert!((jc[i] - ju[i] - s * jv[i]).abs() < 1e-12 * (1.0 + jc[i].abs()));
        }
        let mut swapped = u.clone();
        let last = swapped.len() - 1;
        swapped.swap(0, last);
        let js = jump_cap_scalar(&swapped).unwrap();
        // the pair (0, last) is always the (N−1)-th entry
        prop_assert_eq!(js[last - 1], -ju[last - 1]);
    }

    #[test]
    fn constants_have_no_jump(value in -100.0..100.0f64, n in 2usize..=6) {
        let b = vec![value; n];
        prop_assert!(jump_cap_scalar(&b).unwrap().iter().all(|&j| j == 0.0));
        prop_assert!((average_cap_scalar(&b).unwrap() - value).abs() <= 1e-14 * value.abs());
    }

    #[test]
    fn coupling_coefficients_follow_closed_form(
        l in 1e-6..1e2f64, nu_n in 1e-6..1e6f64, xi in 0.5001..1.0f64,
    ) {
        let f = Fracture::new(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), l, 1.0, nu_n);
        let c = coupling_coefficients(&f, xi).unwrap();
        let eta = l / nu_n;
        prop_assert!((c.beta * 2.0 * eta - 1.0).abs() < 1e-14);
        prop_assert!((c.alpha * eta * (2.0 * xi - 1.0) / 2.0 - 1.0).abs() < 1e-13);
        prop_assert!(c.alpha > 0.0 && c.beta > 0.0);
    }
}

#[test]
fn spec_examples_of_operators() {
    assert_eq!(jump_cap_scalar(&[3.0, 1.0, 0.0]).unwrap(), vec![2.0, 3.0, 1.0]);
    assert_eq!(average_cap_scalar(&[3.0, 1.0, 0.0]).unwrap(), 4.0 / 3.0);
    let x = Point2::new(1.0, 0.0);
    let fluxes = [Point2::new(1.0, 0.0), Point2::new(2.0, 0.0), Point2::new(4.0, 0.0)];
    let avg = average_cap_vector(&fluxes, &[x, x, x]).unwrap();
    for (got, want) in avg.iter().zip([-1.0 / 3.0, -1.0, -2.0 / 3.0]) {
        assert!((got - want).abs() < 1e-15);
    }
}

#[test]
fn four_way_crossing_is_one_intersection() {
    let c = Point2::new(0.5, 0.5);
    let ends = [Point2::new(0.0, 0.5), Point2::new(0.5, 0.0), Point2::new(1.0, 0.5), Point2::new(0.5, 1.0)];
    let network = FractureNetwork::new(ends.iter().map(|&e| Fracture::new(e, c, 0.1, 1.0, 1.0)).collect());
    let points = network.intersections(1e-10).unwrap();
    assert_eq!(points.len(), 1);
    assert_eq!(points[0].len(), 4);
    assert_eq!(points[0].pairs().len(), 6);
    // every τ points from the far end towards the crossing
    for (&(k, t), e) in points[0].incident.iter().zip(ends) {
        assert!(t.dist((c - e).normalized()) < 1e-15, "fracture {k}");
    }
}
