use super::*;
use crate::random::int_form;

fn pol() -> TolerancePolicy {
    TolerancePolicy::default()
}

fn dlin(c: &[i64]) -> DualForm {
    DualForm::linear_ints(c)
}

fn kills(f: &HomogeneousForm, lines: &[DualForm]) -> bool {
    let refs: Vec<&DualForm> = lines.iter().collect();
    vanishes(f, &refs, &pol())
}

/// A random quintic in the kernel of p ⌟ ·.
fn quintic_killed_by(p: &DualForm, rng: &mut Rng) -> HomogeneousForm {
    let cols: Vec<Vec<Scalar>> = monomials(3, 5)
        .iter()
        .map(|e| {
            let m: HomogeneousForm = Poly::monomial(3, *e, Scalar::one());
            contract(p, &m).unwrap().coeffs().to_vec()
        })
        .collect();
    let ker = linalg::kernel(&Matrix::from_cols(cols), &pol());
    let v = crate::random::int_combination(rng, &ker, 6);
    Poly::new(3, 5, v).unwrap()
}

#[test]
fn split_conic_recovers_line_pairs() {
    let mut rng = rng_from_seed(41);
    for _ in 0..20 {
        let a = int_line(&mut rng, 3, 6);
        let b = int_line(&mut rng, 3, 6);
        if proportional(&a, &b, &pol()) {
            continue;
        }
        let q = a.mul(&b).scale(&Scalar::from_int(3));
        let [l, m] = split_conic(&q, &mut rng, &pol()).unwrap();
        let hit_a = proportional(&l, &a, &pol()) || proportional(&m, &a, &pol());
        let hit_b = proportional(&l, &b, &pol()) || proportional(&m, &b, &pol());
        assert!(hit_a && hit_b);
    }
    // smooth conic and double line
    let smooth = dlin(&[1, 0, 0]).pow(2).add(&dlin(&[0, 1, 0]).pow(2)).add(&dlin(&[0, 0, 1]).pow(2));
    assert!(split_conic(&smooth, &mut rng, &pol()).is_none());
    assert!(split_conic(&dlin(&[1, 2, 3]).pow(2), &mut rng, &pol()).is_none());
}

#[test]
fn split_conic_over_irrational_points() {
    // x⁰² − 2x¹² splits only over ℚ(√2)
    let q = dlin(&[1, 0, 0]).pow(2).sub(&dlin(&[0, 1, 0]).pow(2).scale(&Scalar::from_int(2)));
    let mut rng = rng_from_seed(42);
    let [l, m] = split_conic(&q, &mut rng, &pol()).unwrap();
    assert!(proportional(&l.mul(&m), &q, &pol()));
    assert!(!l.is_exact());
}

#[test]
fn apolar_split_quartic_on_random_quintics() {
    let mut rng = rng_from_seed(43);
    for k in 0..10 {
        let f = int_form(&mut rng, 3, 5, 10);
        let (out, attempts) = find_apolar_split_quartic(&f, k, 64, &pol()).unwrap();
        assert!(attempts >= 1);
        match out {
            SplitOutcome::Four(l) => {
                assert!(pairwise_distinct(&l, &pol()));
                assert!(kills(&f, &l));
            }
            SplitOutcome::Two(l) => assert!(kills(&f, &l)),
        }
    }
}

#[test]
fn early_exit_when_two_lines_suffice() {
    // f ∈ Sym⟨x⁰⟩^⊥ + Sym⟨x¹⟩^⊥, so x⁰x¹ ⌟ f = 0
    let mut rng = rng_from_seed(44);
    let g1 = int_form(&mut rng, 2, 5, 5);
    let g2 = int_form(&mut rng, 2, 5, 5);
    // g1 in x₁, x₂; g2 in x₀, x₂
    let f = g1
        .substitute_linear(&[HomogeneousForm::linear_ints(&[0, 1, 0]), HomogeneousForm::linear_ints(&[0, 0, 1])])
        .add(&g2.substitute_linear(&[
            HomogeneousForm::linear_ints(&[1, 0, 0]),
            HomogeneousForm::linear_ints(&[0, 0, 1]),
        ]));
    let cfg = refine_configuration(&f, 0, 64, &pol()).unwrap();
    assert_eq!(cfg.kind, 2);
    assert!(cfg.recheck(&f, &pol()).unwrap());
}

#[test]
fn tangent_lines_annihilate() {
    let mut rng = rng_from_seed(45);
    let x = dlin(&[1, 0, 0]);
    let mut done = 0;
    while done < 5 {
        // x² ⌟ f = 0 but x ⌟ f ≠ 0
        let f = quintic_killed_by(&x.pow(2), &mut rng);
        let ker = apolar_part(&f, 3, &pol());
        let p = random_member(&mut rng, &ker);
        match recap_tangent_lines(&f, &x, &p, &pol()) {
            Ok(t) => {
                assert_eq!(t.len(), 3);
                assert!(kills(&f, &t));
                done += 1;
            }
            Err(Error::NonTransverse) => {}
            Err(e) => panic!("{e}"),
        }
    }
}

#[test]
fn tangent_lines_check_preconditions() {
    let mut rng = rng_from_seed(46);
    let f = int_form(&mut rng, 3, 5, 5);
    let r = recap_tangent_lines(&f, &dlin(&[1, 0, 0]), &dlin(&[0, 1, 0]).pow(3), &pol());
    assert!(matches!(r, Err(Error::PreconditionFailed(_))));
}

#[test]
fn double_refine_general_branch() {
    let mut rng = rng_from_seed(47);
    for _ in 0..8 {
        let x1 = int_line(&mut rng, 3, 4);
        let x2 = int_line(&mut rng, 3, 4);
        if proportional(&x1, &x2, &pol()) {
            continue;
        }
        let f = quintic_killed_by(&x1.mul(&x2).mul(&x2), &mut rng);
        let lines = double_refine(&f, &x1, &x2, &mut rng, 32, &pol()).unwrap();
        assert!(kills(&f, &lines));
        assert!(pairwise_distinct(&lines, &pol()));
        if lines.len() == 4 {
            for (a, b) in [(1, 2), (1, 3), (2, 3)] {
                let c = class_of(&f, &[&lines[0], &lines[a], &lines[b]], &pol());
                assert_eq!(c, PowerClass::General);
            }
        }
    }
}

#[test]
fn double_refine_cube_branch() {
    let mut rng = rng_from_seed(48);
    let x1 = dlin(&[1, 0, 0]);
    let x2 = dlin(&[0, 0, 1]);
    // x⁰(x²)² ⌟ (x₀³x₂² + x₁⁵) = 6x₀² ≠ 0
    let f = HomogeneousForm::from_terms(3, 5, &[([3, 0, 2], Scalar::one()), ([0, 5, 0], Scalar::one())]);
    assert!(double_refine(&f, &x1, &x2, &mut rng, 8, &pol()).is_err());
    // G = x⁰x² ⌟ (x₀⁴x₂ + x₁⁵) = 4x₀³ is a cube
    let f = HomogeneousForm::from_terms(3, 5, &[([4, 0, 1], Scalar::one()), ([0, 5, 0], Scalar::one())]);
    let lines = double_refine(&f, &x1, &x2, &mut rng, 8, &pol()).unwrap();
    assert_eq!(lines.len(), 3);
    assert!(kills(&f, &lines));
    assert!(pairwise_distinct(&lines, &pol()));
}

#[test]
fn double_refine_square_variant() {
    let mut rng = rng_from_seed(49);
    for _ in 0..6 {
        let x2 = int_line(&mut rng, 3, 4);
        let f = quintic_killed_by(&x2.pow(2), &mut rng);
        let lines = double_refine_square(&f, &x2, &mut rng, 32, &pol()).unwrap();
        assert!(kills(&f, &lines));
        assert!(pairwise_distinct(&lines, &pol()));
    }
}

#[test]
fn refine_on_random_quintics() {
    let mut rng = rng_from_seed(50);
    for k in 0..10 {
        let f = int_form(&mut rng, 3, 5, 10);
        let cfg = refine_configuration(&f, k, 64, &pol()).unwrap();
        assert!(cfg.holds());
        assert!(cfg.recheck(&f, &pol()).unwrap());
        assert!(cfg.retries <= 16, "retries {}", cfg.retries);
    }
}

#[test]
fn refine_on_every_monomial() {
    for (i, e) in monomials(3, 5).into_iter().enumerate() {
        let f: HomogeneousForm = Poly::monomial(3, e, Scalar::one());
        let cfg = refine_configuration(&f, i as u64, 64, &pol()).unwrap_or_else(|err| panic!("{e:?}: {err}"));
        assert!(cfg.recheck(&f, &pol()).unwrap(), "{e:?}");
    }
}

#[test]
fn refine_on_special_forms() {
    let fermat = HomogeneousForm::from_terms(
        3,
        5,
        &[([5, 0, 0], Scalar::one()), ([0, 5, 0], Scalar::one()), ([0, 0, 5], Scalar::one())],
    );
    let cfg = refine_configuration(&fermat, 1, 64, &pol()).unwrap();
    assert_eq!(cfg.kind, 2);
    let power = HomogeneousForm::linear_ints(&[1, 2, -3]).pow(5);
    let cfg = refine_configuration(&power, 2, 64, &pol()).unwrap();
    assert!(cfg.recheck(&power, &pol()).unwrap());
    let err = refine_configuration(&Poly::zero(3, 5), 0, 8, &pol());
    assert!(matches!(err, Err(Error::ZeroForm)));
    let quartic = HomogeneousForm::linear_ints(&[1, 1, 1]).pow(4);
    assert!(matches!(refine_configuration(&quartic, 0, 8, &pol()), Err(Error::DegreeMismatch(_))));
}

#[test]
fn certificate_flags_bad_lines() {
    let mut rng = rng_from_seed(51);
    let f = int_form(&mut rng, 3, 5, 10);
    let lines = vec![dlin(&[1, 0, 0]), dlin(&[0, 1, 0]), dlin(&[0, 0, 1]), dlin(&[1, 1, 1])];
    let cert = certify(&f, &lines, &pol()).unwrap();
    assert!(!cert[0].holds);
    let dup = vec![dlin(&[1, 0, 0]), dlin(&[2, 0, 0])];
    let cert = certify(&HomogeneousForm::linear_ints(&[0, 1, 1]).pow(5), &dup, &pol()).unwrap();
    assert!(cert[0].holds);
    assert!(!cert.last().unwrap().holds);
}

#[test]
fn display_lists_lines_and_checks() {
    let mut rng = rng_from_seed(52);
    let f = int_form(&mut rng, 3, 5, 10);
    let cfg = refine_configuration(&f, 3, 64, &pol()).unwrap();
    let text = cfg.to_string();
    assert!(text.starts_with(&format!("kind = {}", cfg.kind)));
    assert_eq!(text.lines().filter(|l| l.starts_with("check = ")).count(), cfg.certificate.len());
}

#[test]
fn bad_set_contractions_land_in_q() {
    let mut rng = rng_from_seed(53);
    for _ in 0..20 {
        let x0 = int_line(&mut rng, 2, 5).to_primal();
        let x1 = int_line(&mut rng, 2, 5).to_primal();
        if proportional(&x0, &x1, &pol()) {
            continue;
        }
        let q = x0.mul(&x1);
        let ls: Vec<DualForm> = (0..3).map(|_| int_line(&mut rng, 2, 5)).collect();
        let bad = compute_lr_bad_set(&q, [&ls[0], &ls[1], &ls[2]], &pol()).unwrap();
        assert_eq!(bad.forms.len(), 6);
        assert!(proportional(&bad.x0.mul(&bad.x1), &q, &pol()));
        // ∂ by x^h of v_h, v^h_0, v^h_1 lies in ⟨q⟩
        for (h, idx) in [(0usize, [0usize, 2, 3]), (1, [1, 4, 5])] {
            for i in idx {
                let c = contract(&ls[h], &bad.forms[i]).unwrap();
                assert!(divisible_by(&c, &q));
            }
        }
    }
    let sq = HomogeneousForm::linear_ints(&[1, 2]).pow(2);
    let l = dlin2(0);
    let bad = compute_lr_bad_set(&sq, [&l, &l, &l], &pol()).unwrap();
    assert_eq!(bad.forms.len(), 1);
}

fn dlin2(j: usize) -> DualForm {
    let mut c = [0i64; 2];
    c[j] = 1;
    DualForm::linear_ints(&c)
}

/// c = κ·q for some scalar κ (both binary quadratics).
fn divisible_by(c: &HomogeneousForm, q: &HomogeneousForm) -> bool {
    c.is_exact_zero() || proportional(c, q, &pol())
}
