use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::expr::{is_zero_all, Sampling};
use crate::random;

const DIM: usize = 4;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn mv(r: &mut ChaCha8Rng, degree: usize) -> Multivector {
    random::field(r, DIM, degree, 0.5, 2)
}

fn form(r: &mut ChaCha8Rng, degree: usize) -> Form {
    random::field(r, DIM, degree, 0.5, 2)
}

fn vanishes<K: Kind>(f: &Field<K>) -> bool {
    let samples = Sampling::new(DIM).with_count(12).points();
    let t = is_zero_all(&f.coefficients(), &samples, 1e-7);
    t.passed
}

fn sign(odd: usize) -> Expr {
    Expr::int(if odd % 2 == 1 { -1 } else { 1 })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn schouten_graded_antisymmetry(seed: u64, p in 0usize..3, q in 0usize..3) {
        prop_assume!(p + q > 0);
        let mut r = rng(seed);
        let (a, b) = (mv(&mut r, p), mv(&mut r, q));
        // [A,B] = -(-1)^{(p-1)(q-1)} [B,A]
        let s = sign((p + 1) * (q + 1) + 1);
        prop_assert!(vanishes(&(schouten(&a, &b) - schouten(&b, &a).scale(&s))));
    }

    #[test]
    fn schouten_graded_jacobi(seed: u64, p in 1usize..3, q in 1usize..3, s in 1usize..3) {
        let mut r = rng(seed);
        let (a, b, c) = (mv(&mut r, p), mv(&mut r, q), mv(&mut r, s));
        let t1 = schouten(&a, &schouten(&b, &c)).scale(&sign((p - 1) * (s - 1)));
        let t2 = schouten(&b, &schouten(&c, &a)).scale(&sign((q - 1) * (p - 1)));
        let t3 = schouten(&c, &schouten(&a, &b)).scale(&sign((s - 1) * (q - 1)));
        prop_assert!(vanishes(&(t1 + t2 + t3)));
    }

    #[test]
    fn schouten_leibniz(seed: u64, p in 1usize..3, q in 0usize..2, s in 0usize..2) {
        let mut r = rng(seed);
        let (a, b, c) = (mv(&mut r, p), mv(&mut r, q), mv(&mut r, s));
        let lhs = schouten(&a, &b.wedge(&c));
        let rhs = schouten(&a, &b).wedge(&c) + b.wedge(&schouten(&a, &c)).scale(&sign((p - 1) * q));
        prop_assert!(vanishes(&(lhs - rhs)));
    }

    #[test]
    fn vector_bracket_is_lie_derivative(seed: u64, q in 0usize..4) {
        let mut r = rng(seed);
        let (x, a) = (mv(&mut r, 1), mv(&mut r, q));
        prop_assert!(vanishes(&(schouten(&x, &a) - lie_derivative(&x, &a))));
    }

    #[test]
    fn wedge_associative_and_graded_commutative(seed: u64, p in 0usize..3, q in 0usize..3, s in 0usize..2) {
        let mut r = rng(seed);
        let (a, b, c) = (form(&mut r, p), form(&mut r, q), form(&mut r, s));
        prop_assert!(vanishes(&(a.wedge(&b).wedge(&c) - a.wedge(&b.wedge(&c)))));
        prop_assert!(vanishes(&(a.wedge(&b) - b.wedge(&a).scale(&sign(p * q)))));
    }

    #[test]
    fn d_squared_and_leibniz(seed: u64, p in 0usize..3, q in 0usize..2) {
        let mut r = rng(seed);
        let (u, v) = (form(&mut r, p), form(&mut r, q));
        prop_assert!(vanishes(&exterior_d(&exterior_d(&u))));
        let lhs = exterior_d(&u.wedge(&v));
        let rhs = exterior_d(&u).wedge(&v) + u.wedge(&exterior_d(&v)).scale(&sign(p));
        prop_assert!(vanishes(&(lhs - rhs)));
    }

    #[test]
    fn phi_is_an_algebra_morphism(seed: u64, p in 0usize..3, q in 0usize..3) {
        let mut r = rng(seed);
        let w = mv(&mut r, 2);
        let (u, v) = (form(&mut r, p), form(&mut r, q));
        let lhs = phi_w(&w, &u.wedge(&v));
        let rhs = phi_w(&w, &u).wedge(&phi_w(&w, &v));
        prop_assert!(vanishes(&(lhs - rhs)));
    }

    #[test]
    fn lie_interior_commutator(seed: u64, p in 1usize..4) {
        let mut r = rng(seed);
        let (x, y, u) = (mv(&mut r, 1), mv(&mut r, 1), form(&mut r, p));
        let lhs = lie_derivative_form(&x, &interior_product(&y, &u)) - interior_product(&y, &lie_derivative_form(&x, &u));
        let rhs = interior_product(&lie_bracket(&x, &y), &u);
        prop_assert!(vanishes(&(lhs - rhs)));
    }
}
