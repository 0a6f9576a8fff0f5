use super::*;
use crate::random::{int_form, int_line};

fn pol() -> TolerancePolicy {
    TolerancePolicy::default()
}

fn mono(e: [usize; 3]) -> HomogeneousForm {
    Poly::monomial(3, e, Scalar::one())
}

fn check_decomposition(f: &HomogeneousForm, seed: u64) -> Decomposition {
    let opts = DecomposeOptions {
        seed,
        ..Default::default()
    };
    let d = decompose_ternary_quintic(f, &opts).unwrap_or_else(|e| panic!("{e}"));
    assert!(d.decomposition.len() <= 10);
    let r = verify(f, &d.decomposition).unwrap();
    assert!(r <= pol().zero_threshold, "residual {r:e}");
    d
}

#[test]
fn normalizing_change_sends_the_form_to_t0() {
    for (c0, c1) in [(3, 5), (7, -2), (0, 4), (-1, 0)] {
        let a = ParamScalar::linear(Scalar::from_int(c0), Scalar::from_int(c1));
        let m = normalizing_change(&a);
        assert_eq!(a.substitute(&m), ParamScalar::t0());
    }
}

#[test]
fn planted_change_is_recovered() {
    let mut rng = rng_from_seed(61);
    for _ in 0..10 {
        let r = ParamForm::new(vec![int_form(&mut rng, 3, 3, 6), int_form(&mut rng, 3, 3, 6)]);
        let m = [
            [Scalar::from_int(nonzero_int(&mut rng, 7)), Scalar::from_int(int(&mut rng, 7))],
            [Scalar::from_int(int(&mut rng, 7)), Scalar::from_int(nonzero_int(&mut rng, 7))],
        ];
        let Ok(target) = r.substitute(&m, &pol()) else {
            continue;
        };
        assert_eq!(solve_change(&r, &target, &pol()).unwrap(), m);
    }
}

#[test]
fn four_line_route_on_random_quintics() {
    let mut rng = rng_from_seed(62);
    let mut seen = 0;
    for seed in 0..12 {
        let f = int_form(&mut rng, 3, 5, 10);
        let cfg = refine_configuration(&f, seed, 64, &pol()).unwrap();
        if cfg.kind != 4 {
            continue;
        }
        seen += 1;
        let st = run_kind4(&f, &cfg.lines, &mut rng, 64, &pol()).unwrap();
        assert!(st.split.ranks[0] <= 3 && st.split.ranks[1] <= 3);
        let sum = st.split.f1.add(&st.split.f2).add(&st.sample.f3).add(&st.sample.f4);
        assert!(sum.approx_eq(&f, &pol()));
        // f4 pieces have rank 2 for generic parameters
        for k in 1..=20 {
            let (l, m) = (Scalar::from_int(k), Scalar::from_int(2 * k + 1));
            let at = st.f4.f4.evaluate(&l, &m);
            let (b, _) = restrict_to_line(&at, &cfg.lines[3], &pol()).unwrap();
            assert_eq!(binary_rank(&b, &pol()).unwrap(), 2);
        }
    }
    assert!(seen >= 6);
}

#[test]
fn decompose_random_quintics() {
    let mut rng = rng_from_seed(63);
    for seed in 0..6 {
        let f = int_form(&mut rng, 3, 5, 10);
        check_decomposition(&f, seed);
    }
}

#[test]
fn decompose_special_forms() {
    let d = check_decomposition(&mono([5, 0, 0]), 0);
    assert_eq!(d.decomposition.len(), 1);
    assert_eq!(d.decomposition.residual, 0.0);
    let fermat = mono([5, 0, 0]).add(&mono([0, 5, 0])).add(&mono([0, 0, 5]));
    check_decomposition(&fermat, 0);
    check_decomposition(&mono([1, 2, 2]), 0);
    let power = HomogeneousForm::linear_ints(&[2, -1, 3]).pow(5);
    let d = check_decomposition(&power, 5);
    assert_eq!(d.decomposition.len(), 1);
}

#[test]
fn split_of_a_sum_of_two_powers() {
    let l1 = DualForm::linear_ints(&[1, 0, 0]);
    let l2 = DualForm::linear_ints(&[0, 1, 0]);
    let u = HomogeneousForm::linear_ints(&[0, 1, 2]);
    let w = HomogeneousForm::linear_ints(&[3, 0, -1]);
    let f12 = u.pow(5).add(&w.pow(5));
    let mut rng = rng_from_seed(64);
    let s = split_f12(&f12, &l1, &l2, &mut rng, 8, &pol()).unwrap();
    // the base split is u⁵ + w⁵ up to the shared direction v₁₂⁵
    assert!(s.ranks[0] <= 3 && s.ranks[1] <= 3);
    assert!(s.nu.is_exact_zero());
    assert_eq!(s.f1.add(&s.f2), f12);
    assert!(contract(&l1, &s.f1).unwrap().is_exact_zero());
    assert!(contract(&l2, &s.f2).unwrap().is_exact_zero());
    let e = split_f12(&u.pow(5), &l1, &l2, &mut rng, 8, &pol());
    assert!(matches!(e, Err(Error::CertificationViolated(_))));
}

#[test]
fn three_line_route() {
    let mut rng = rng_from_seed(65);
    let mut done = 0;
    let mut seed = 0;
    while done < 4 {
        seed += 1;
        let ls: Vec<DualForm> = (0..3).map(|_| int_line(&mut rng, 3, 4)).collect();
        // f in the kernel of l¹l²l³
        let (sigma, _) = sigma_columns(&[&ls[0], &ls[1], &ls[2]]).unwrap();
        let v: Vec<Scalar> = (0..18).map(|_| Scalar::from_int(int(&mut rng, 5))).collect();
        let f: HomogeneousForm = Poly::new(3, 5, sigma.mul_vec(&v)).unwrap();
        let Ok(cert) = crate::lineconfig::certify(&f, &ls, &pol()) else {
            continue;
        };
        if !cert.iter().all(|c| c.holds) {
            continue;
        }
        let k3 = run_kind3(&f, &ls, seed, &mut rng, 64, &pol()).unwrap();
        assert!(k3.ranks[0] <= 4 && k3.ranks[1] <= 3 && k3.ranks[2] <= 3);
        let mut sum: HomogeneousForm = Poly::zero(3, 5);
        for i in 0..3 {
            sum = sum.add(&embed_from_line(&k3.pieces[i], &k3.bases[i]));
        }
        assert!(sum.approx_eq(&f, &pol()));
        done += 1;
    }
}

#[test]
fn verify_measures_perturbations() {
    let f = HomogeneousForm::linear_ints(&[1, 1, 0]).pow(5);
    let mut dec = WaringDecomposition {
        terms: vec![(Scalar::one(), HomogeneousForm::linear_ints(&[1, 1, 0]))],
        degree: 5,
        residual: 0.0,
    };
    assert_eq!(verify(&f, &dec).unwrap(), 0.0);
    dec.terms[0].0 = Scalar::ratio(1001, 1000);
    let r = verify(&f, &dec).unwrap();
    assert!((r - 1e-3).abs() < 1e-12);
    dec.degree = 4;
    assert!(verify(&f, &dec).is_err());
}

#[test]
fn same_seed_same_output() {
    let mut rng = rng_from_seed(66);
    let f = int_form(&mut rng, 3, 5, 10);
    let a = check_decomposition(&f, 9);
    let b = check_decomposition(&f, 9);
    assert_eq!(a.decomposition.to_string(), b.decomposition.to_string());
    assert_eq!(a.report, b.report);
}

#[test]
fn bad_inputs() {
    let opts = DecomposeOptions::default();
    assert!(matches!(decompose_ternary_quintic(&Poly::zero(3, 5), &opts), Err(Error::ZeroForm)));
    let q = HomogeneousForm::linear_ints(&[1, 2]).pow(5);
    assert!(matches!(decompose_ternary_quintic(&q, &opts), Err(Error::VarsMismatch(_))));
}
