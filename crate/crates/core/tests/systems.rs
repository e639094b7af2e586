use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use symgeom::bicomplex::Bicomplex;
use symgeom::expr::{is_zero, is_zero_all, parse, Chart, Expr, Sampling};
use symgeom::flow::{conservation_drift, integrate};
use symgeom::multifield::{exterior_d, schouten, Form, Multivector};
use symgeom::random;
use symgeom::symcheck::{poisson_bracket, PhaseSystem, SystemError};

fn jacobiator(w: &Multivector, f: &Expr, g: &Expr, h: &Expr) -> Expr {
    let pb = |a: &Expr, b: &Expr| poisson_bracket(a, b, w);
    pb(f, &pb(g, h)) + pb(g, &pb(h, f)) + pb(h, &pb(f, g))
}

fn constant_symplectic() -> Multivector {
    let c = |n: i64, d: i64| Expr::ratio(n, d);
    Multivector::from_terms(
        6,
        2,
        [
            (vec![0, 3], c(1, 1)),
            (vec![1, 4], c(2, 1)),
            (vec![2, 5], c(-1, 1)),
            (vec![0, 1], c(1, 2)),
            (vec![3, 5], c(3, 1)),
            (vec![1, 2], c(-2, 3)),
        ],
    )
}

#[test]
fn six_dimensional_constant_bivector_is_poisson() {
    let chart = Chart::with_time(&["q1", "q2", "q3", "p1", "p2", "p3"], true).unwrap();
    let w = constant_symplectic();
    let h = parse("p1^2/2 + p2^2/2 + p3^2/2 + cos(q1 - q2) + q3^2", &chart).unwrap();
    let sys = PhaseSystem::new(
        chart,
        w.clone(),
        h.clone(),
        Multivector::zero(6, 1),
        &Sampling::new(6),
    )
    .unwrap();
    assert!(schouten(&w, &w).is_empty());

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let (f, g, k) = (
            random::expr(&mut rng, 6, 2),
            random::expr(&mut rng, 6, 2),
            random::expr(&mut rng, 6, 2),
        );
        assert!(is_zero(&jacobiator(&w, &f, &g, &k), sys.samples(), 1e-8).passed);
    }

    let bc = Bicomplex::new(&sys);
    for degree in 0..3 {
        let u: Form = random::field(&mut rng, 6, degree, 0.3, 2);
        let back = sys.phi().apply_inverse(&sys.phi().apply(&u));
        assert!(is_zero_all(&(back - u.clone()).coefficients(), sys.samples(), 1e-9).passed);
        let d = bc.d_bracket(&u) - exterior_d(&u);
        assert!(is_zero_all(&d.coefficients(), sys.samples(), 1e-9).passed);
    }

    let traj = integrate(&sys, &[0.1, -0.2, 0.3, 0.5, 0.0, -0.4], 2.0, 1e-3).unwrap();
    assert!(conservation_drift(&traj, &h).unwrap().value < 1e-10);
}

#[test]
fn bivector_violating_jacobi_is_rejected() {
    let chart = Chart::with_time(&["z1", "z2", "z3", "z4"], true).unwrap();
    let w = Multivector::from_terms(
        4,
        2,
        [
            (vec![0, 2], Expr::one()),
            (vec![1, 3], Expr::one()),
            (vec![0, 1], parse("z1*z3", &chart).unwrap()),
        ],
    );
    let z = |i| Expr::coord(i);
    let samples = Sampling::new(4).points();
    assert!(!is_zero(&jacobiator(&w, &z(0), &z(1), &z(2)), &samples, 1e-9).passed);
    let err = PhaseSystem::new(
        chart,
        w,
        Expr::zero(),
        Multivector::zero(4, 1),
        &Sampling::new(4),
    )
    .unwrap_err();
    assert!(matches!(
        err,
        SystemError::NotPoisson {
            witness: Some(_),
            ..
        }
    ));
}
