use super::*;
use crate::apolarity::proportional;
use crate::poly::power;
use crate::random::{int_line, nonzero_int, small_rational};

fn s(n: i64) -> Scalar {
    Scalar::from_int(n)
}

fn pol() -> TolerancePolicy {
    TolerancePolicy::default()
}

fn lin(c: &[i64]) -> HomogeneousForm {
    HomogeneousForm::linear_ints(c)
}

fn dlin(c: &[i64]) -> DualForm {
    DualForm::linear_ints(c)
}

fn random_instance(rng: &mut Rng, k: usize) -> (Vec<DualForm>, HomogeneousForm, HomogeneousForm) {
    loop {
        let factors: Vec<DualForm> = (0..k).map(|_| int_line(rng, 2, 6)).collect();
        let x0 = int_line(rng, 2, 5).to_primal();
        let x1 = int_line(rng, 2, 5).to_primal();
        if !proportional(&x0, &x1, &pol()) {
            return (factors, x0, x1);
        }
    }
}

#[test]
fn cubic_example() {
    let p = build_r(&[dlin(&[1, 0])], &lin(&[1, 0]), &lin(&[0, 1]), &pol()).unwrap();
    let expected = ParamForm::new(vec![
        Poly::monomial(2, [2, 1, 0], s(6)),
        Poly::monomial(2, [0, 3, 0], s(2)),
    ]);
    assert_eq!(p.r, expected);
    let pr = param_contract_rows(&p.p(), &p.r);
    assert_eq!(pr.row(0), &Poly::monomial(2, [1, 1, 0], s(12)));
    assert!(pr.row(1).is_exact_zero());
    assert_eq!(p.a[0], ParamScalar::t0());
    let full = p.r_quotient(&[0], &pol()).unwrap();
    assert_eq!(full, ParamForm::from_form(p.q().scale(&s(12))));
}

fn param_contract_rows(p: &DualForm, f: &ParamForm) -> ParamForm {
    f.try_map_rows(|r| contract(p, r)).unwrap()
}

/// ρθ·r(ρ², θ²) against p(ρx₀−θx₁)(ρx₀+θx₁)^d − p(ρx₀+θx₁)(ρx₀−θx₁)^d,
/// computed with ordinary forms at a single point.
fn pointwise_identity(pen: &RankTwoPencil, rho: &Scalar, theta: &Scalar) -> bool {
    let p = pen.p();
    let plus = pen.x0.scale(rho).add(&pen.x1.scale(theta));
    let minus = pen.x0.scale(rho).sub(&pen.x1.scale(theta));
    let rhs = power(&plus, pen.d)
        .scale(&evaluate_dual(&p, &minus))
        .sub(&power(&minus, pen.d).scale(&evaluate_dual(&p, &plus)));
    let lhs = pen.r.evaluate(&(rho * rho), &(theta * theta)).scale(&(rho * theta));
    lhs == rhs
}

#[test]
fn defining_identity_on_seeded_quintic_instances() {
    let mut rng = rng_from_seed(31);
    for _ in 0..25 {
        let (factors, x0, x1) = random_instance(&mut rng, 3);
        let pen = build_r(&factors, &x0, &x1, &pol()).unwrap();
        assert_eq!(pen.d, 5);
        assert_eq!(pen.r.t_degree(), 3);
        // 2d−1 = 9 distinct points pin down the degree-8 identity in (ρ, θ)
        for k in 0..12 {
            let rho = small_rational(&mut rng, 9);
            let theta = s(k + 1);
            assert!(pointwise_identity(&pen, &rho, &theta));
        }
        let lhs = square_parameters(&pen.r).mul_scalar(&t0t1());
        assert_eq!(lhs, defining_difference(&factors, &x0, &x1));
    }
}

#[test]
fn samples_lie_in_w() {
    let mut rng = rng_from_seed(32);
    for _ in 0..10 {
        let (factors, x0, x1) = random_instance(&mut rng, 3);
        let pen = build_r(&factors, &x0, &x1, &pol()).unwrap();
        let q = pen.q();
        for _ in 0..5 {
            let f = pen.r.evaluate(&small_rational(&mut rng, 9), &small_rational(&mut rng, 9));
            let pf = contract(&pen.p(), &f).unwrap();
            assert!(pf.is_exact_zero() || proportional(&pf, &q, &pol()));
        }
    }
}

#[test]
fn quotients_exist_for_every_subset() {
    let mut rng = rng_from_seed(33);
    for _ in 0..25 {
        let (factors, x0, x1) = random_instance(&mut rng, 3);
        let pen = build_r(&factors, &x0, &x1, &pol()).unwrap();
        for mask in 0u32..8 {
            let subset: Vec<usize> = (0..3).filter(|i| mask & (1 << i) != 0).collect();
            let rq = pen.r_quotient(&subset, &pol()).unwrap();
            assert_eq!(rq.t_degree(), 3 - subset.len());
            if subset.is_empty() {
                assert_eq!(rq, pen.r);
            }
        }
        let full = pen.r_quotient(&[0, 1, 2], &pol()).unwrap();
        assert_eq!(full, ParamForm::from_form(pen.q().scale(&s(240))));
    }
}

#[test]
fn roots_vanish_and_r_degenerates_to_a_power_there() {
    let mut rng = rng_from_seed(34);
    for _ in 0..25 {
        let (factors, x0, x1) = random_instance(&mut rng, 3);
        let pen = build_r(&factors, &x0, &x1, &pol()).unwrap();
        for i in 0..3 {
            let [l, m] = &pen.roots[i];
            assert!(pen.a[i].eval(l, m).is_exact_zero());
            assert!(evaluate_dual(&factors[i], &pen.v[i]).is_exact_zero());
            let at = pen.r.evaluate(l, m);
            assert!(at.is_exact_zero() || proportional(&at, &power(&pen.v[i], 5), &pol()));
            for j in 0..3 {
                if evaluate_dual(&factors[j], &pen.v[i]).is_exact_zero() {
                    assert!(pen.a[j].eval(l, m).is_exact_zero());
                }
            }
        }
    }
}

#[test]
fn vanishing_at_a_root_needs_another_factor() {
    // l¹ = x⁰ + 2x¹: v₁ = 2x₀ − x₁, v′₁ = 2x₀ + x₁, and l² = x⁰ − 2x¹ kills v′₁
    let factors = vec![dlin(&[1, 2]), dlin(&[1, -2]), dlin(&[3, 1])];
    let pen = build_r(&factors, &lin(&[1, 0]), &lin(&[0, 1]), &pol()).unwrap();
    let [l, m] = &pen.roots[0];
    assert!(pen.r.evaluate(l, m).is_exact_zero());
    assert!(pen.a[1].eval(l, m).is_exact_zero());
    // a repeated factor gives l²(v₁) = 0
    let factors = vec![dlin(&[1, 3]), dlin(&[2, 6]), dlin(&[1, 1])];
    let pen = build_r(&factors, &lin(&[1, 1]), &lin(&[1, -1]), &pol()).unwrap();
    let [l, m] = &pen.roots[0];
    assert!(pen.a[1].eval(l, m).is_exact_zero());
}

#[test]
fn generic_parameters_give_rank_two() {
    let mut rng = rng_from_seed(35);
    for _ in 0..10 {
        let (factors, x0, x1) = random_instance(&mut rng, 3);
        let pen = build_r(&factors, &x0, &x1, &pol()).unwrap();
        let mut seen = 0;
        while seen < 20 {
            let l = s(nonzero_int(&mut rng, 30));
            let m = s(nonzero_int(&mut rng, 30));
            if pen.is_exceptional(&l, &m, &pol()) {
                continue;
            }
            seen += 1;
            let f = pen.sample_rank_two(&l, &m, &pol()).unwrap();
            assert_eq!(binary_rank(&f, &pol()).unwrap(), 2);
            assert!(!contract(&pen.p(), &f).unwrap().is_exact_zero());
        }
    }
}

#[test]
fn proper_quotients_are_injective() {
    let mut rng = rng_from_seed(36);
    let (factors, x0, x1) = random_instance(&mut rng, 3);
    let pen = build_r(&factors, &x0, &x1, &pol()).unwrap();
    for subset in [vec![], vec![0], vec![1, 2], vec![0, 2]] {
        let rq = pen.r_quotient(&subset, &pol()).unwrap();
        let samples: Vec<HomogeneousForm> = (1..=50)
            .map(|k| rq.evaluate(&s(k), &s(2 * k * k + 1)))
            .collect();
        for i in 0..samples.len() {
            for j in 0..i {
                assert!(!proportional(&samples[i], &samples[j], &pol()), "{subset:?} {i} {j}");
            }
        }
    }
}

#[test]
fn error_cases() {
    let x = lin(&[1, 2]);
    assert!(matches!(
        build_r(&[dlin(&[1, 0])], &x, &x.scale(&s(3)), &pol()),
        Err(Error::SquareQ)
    ));
    let pen = build_r(&[dlin(&[1, 1])], &lin(&[1, 0]), &lin(&[0, 1]), &pol()).unwrap();
    assert!(matches!(
        pen.sample_rank_two(&s(1), &s(0), &pol()),
        Err(Error::ExceptionalParameter)
    ));
    assert!(matches!(
        pen.sample_rank_two(&s(0), &s(5), &pol()),
        Err(Error::ExceptionalParameter)
    ));
}

#[test]
fn rank_three_elements() {
    let t = lin(&[1, 0]).mul(&lin(&[0, 1])).mul(&lin(&[1, 1]));
    let mut rng = rng_from_seed(37);
    for k in 0..10 {
        let p = int_line(&mut rng, 2, 5).mul(&int_line(&mut rng, 2, 5));
        let f = rank3_element(&p, &t, k, 64, &pol()).unwrap();
        assert_eq!(binary_rank(&f, &pol()).unwrap(), 3);
        let pf = contract(&p, &f).unwrap();
        assert!(!pf.is_exact_zero());
        assert!(proportional(&pf, &t, &pol()));
    }
    let cube = power(&lin(&[1, 0]), 3);
    assert!(matches!(
        rank3_element(&dlin(&[1, 1]).pow(2), &cube, 0, 8, &pol()),
        Err(Error::CubeInput)
    ));
}
