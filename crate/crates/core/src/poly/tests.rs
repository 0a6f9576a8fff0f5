use super::*;
use crate::linalg::{rank, Matrix};
use crate::random::{int_form, int_line, int_scalars, rng_from_seed};

fn s(n: i64) -> Scalar {
    Scalar::from_int(n)
}

fn mono(nvars: usize, e: Exps, c: i64) -> HomogeneousForm {
    Poly::monomial(nvars, e, s(c))
}

fn dmono(nvars: usize, e: Exps) -> DualForm {
    Poly::monomial(nvars, e, s(1))
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

#[test]
fn monomial_indexing_is_descending_lex() {
    let m = monomials(3, 2);
    assert_eq!(m, vec![[2, 0, 0], [1, 1, 0], [1, 0, 1], [0, 2, 0], [0, 1, 1], [0, 0, 2]]);
    for d in 0..7 {
        for (i, e) in monomials(3, d).iter().enumerate() {
            assert_eq!(monomial_index(3, d, e), i);
        }
        for (i, e) in monomials(2, d).iter().enumerate() {
            assert_eq!(monomial_index(2, d, e), i);
        }
    }
}

#[test]
fn contraction_examples() {
    // x⁰ ⌟ x₀²x₁ = 2x₀x₁
    let r = contract(&dmono(2, [1, 0, 0]), &mono(2, [2, 1, 0], 1)).unwrap();
    assert_eq!(r, mono(2, [1, 1, 0], 2));
    // x⁰x¹ ⌟ x₀²x₁² = 4x₀x₁
    let r = contract(&dmono(2, [1, 1, 0]), &mono(2, [2, 2, 0], 1)).unwrap();
    assert_eq!(r, mono(2, [1, 1, 0], 4));
    assert!(matches!(
        contract(&dmono(2, [3, 0, 0]), &mono(2, [1, 1, 0], 1)),
        Err(Error::DegreeMismatch(_))
    ));
}

#[test]
fn contraction_of_product_is_iterated() {
    let mut rng = rng_from_seed(11);
    for _ in 0..20 {
        let f = int_form(&mut rng, 3, 5, 9);
        let p: DualForm = int_form(&mut rng, 3, 2, 5).to_dual();
        let q: DualForm = int_form(&mut rng, 3, 1, 5).to_dual();
        let lhs = contract(&p.mul(&q), &f).unwrap();
        let rhs = contract(&p, &contract(&q, &f).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn evaluate_dual_examples() {
    let p = dmono(2, [1, 1, 0]);
    let v = HomogeneousForm::linear_ints(&[2, 3]);
    assert_eq!(evaluate_dual(&p, &v), s(6));
    let p = dmono(2, [5, 0, 0]);
    assert_eq!(evaluate_dual(&p, &HomogeneousForm::linear_ints(&[0, 1])), s(0));
}

#[test]
fn evaluate_dual_matches_contraction_with_power() {
    let mut rng = rng_from_seed(12);
    for d in 1..6 {
        let p: DualForm = int_form(&mut rng, 3, d, 7).to_dual();
        let v = HomogeneousForm::linear(&int_scalars(&mut rng, 3, 7));
        let full = contract(&p, &power(&v, d)).unwrap();
        assert_eq!(full.coeffs()[0], &evaluate_dual(&p, &v) * &s(factorial(d)));
    }
}

#[test]
fn power_examples() {
    let x0 = HomogeneousForm::linear_ints(&[1, 0, 0]);
    assert_eq!(power(&x0, 5), mono(3, [5, 0, 0], 1));
    let v = HomogeneousForm::linear_ints(&[1, 1]);
    let sq = power(&v, 2);
    assert_eq!(sq.coeffs(), &[s(1), s(2), s(1)]);
}

#[test]
fn powers_of_distinct_binary_lines_are_independent() {
    let p = TolerancePolicy::default();
    for d in 1..7 {
        let cols: Vec<Vec<Scalar>> = (0..=d as i64)
            .map(|k| power(&HomogeneousForm::linear_ints(&[1, k]), d).coeffs().to_vec())
            .collect();
        assert_eq!(rank(&Matrix::from_cols(cols), &p), d + 1);
    }
}

#[test]
fn contraction_operators_commute() {
    let mut rng = rng_from_seed(13);
    let f = int_form(&mut rng, 3, 5, 9);
    for i in 0..3 {
        for j in 0..3 {
            let mut ei = [0; 3];
            ei[i] = 1;
            let mut ej = [0; 3];
            ej[j] = 1;
            let a = contract(&dmono(3, ei), &contract(&dmono(3, ej), &f).unwrap()).unwrap();
            let b = contract(&dmono(3, ej), &contract(&dmono(3, ei), &f).unwrap()).unwrap();
            assert_eq!(a, b);
        }
    }
}

#[test]
fn param_contract_is_t_linear() {
    let mut rng = rng_from_seed(14);
    let f = int_form(&mut rng, 3, 5, 9);
    let p: DualForm = int_form(&mut rng, 3, 2, 5).to_dual();
    let tf = ParamForm::from_product(&ParamScalar::t0(), &f);
    let lhs = param_contract(&p, &tf).unwrap();
    let rhs = ParamForm::from_product(&ParamScalar::t0(), &contract(&p, &f).unwrap());
    assert_eq!(lhs, rhs);
}

#[test]
fn param_evaluate_examples() {
    let f = ParamForm::new(vec![mono(2, [5, 0, 0], 1), mono(2, [0, 5, 0], 1)]);
    assert_eq!(f.evaluate(&s(1), &s(0)), mono(2, [5, 0, 0], 1));
    assert!(f.evaluate(&s(0), &s(0)).is_exact_zero());
}

#[test]
fn evaluation_commutes_with_contraction() {
    let mut rng = rng_from_seed(15);
    let rows: Vec<HomogeneousForm> = (0..4).map(|_| int_form(&mut rng, 3, 5, 9)).collect();
    let f = ParamForm::new(rows);
    let p: DualForm = int_form(&mut rng, 3, 3, 5).to_dual();
    let (l, m) = (s(3), s(-2));
    let a = contract(&p, &f.evaluate(&l, &m)).unwrap();
    let b = param_contract(&p, &f).unwrap().evaluate(&l, &m);
    assert_eq!(a, b);
}

#[test]
fn substitution_identity_inverse_and_products() {
    let pol = TolerancePolicy::default();
    let mut rng = rng_from_seed(16);
    let f = ParamForm::new((0..3).map(|_| int_form(&mut rng, 3, 2, 9)).collect());
    let g = ParamForm::new((0..2).map(|_| int_form(&mut rng, 3, 1, 9)).collect());
    let id = [[s(1), s(0)], [s(0), s(1)]];
    assert_eq!(f.substitute(&id, &pol).unwrap(), f);
    let m = [[s(2), s(1)], [s(1), s(1)]];
    let minv = [[s(1), s(-1)], [s(-1), s(2)]];
    // substituting M then M⁻¹ is substituting M⁻¹·M in the t-variables
    let back = f.substitute(&m, &pol).unwrap().substitute(&minv, &pol).unwrap();
    assert_eq!(back, f);
    let lhs = f.mul(&g).substitute(&m, &pol).unwrap();
    let rhs = f.substitute(&m, &pol).unwrap().mul(&g.substitute(&m, &pol).unwrap());
    assert_eq!(lhs, rhs);
    let sing = [[s(1), s(2)], [s(2), s(4)]];
    assert!(matches!(f.substitute(&sing, &pol), Err(Error::SingularChange)));
}

#[test]
fn exact_divide_examples() {
    let pol = TolerancePolicy::default();
    let mut rng = rng_from_seed(17);
    let g = ParamForm::new((0..3).map(|_| int_form(&mut rng, 3, 2, 9)).collect());
    let t0t1 = ParamScalar::new(vec![s(0), s(1), s(0)]);
    assert_eq!(g.mul_scalar(&t0t1).exact_divide(&t0t1, &pol).unwrap(), g);
    let a = ParamScalar::linear(s(3), s(-5));
    assert_eq!(g.mul_scalar(&a).exact_divide(&a, &pol).unwrap(), g);
    let t0x0 = ParamForm::from_product(&ParamScalar::t0(), &mono(3, [1, 0, 0], 1));
    assert!(matches!(t0x0.exact_divide(&ParamScalar::t1(), &pol), Err(Error::NotDivisible { .. })));
}

#[test]
fn restrict_examples_and_round_trip() {
    let pol = TolerancePolicy::default();
    let x2 = dmono(3, [0, 0, 1]);
    let (b, basis) = restrict_to_line(&mono(3, [5, 0, 0], 1), &x2, &pol).unwrap();
    assert_eq!(b, mono(2, [5, 0, 0], 1));
    assert_eq!(basis[0], HomogeneousForm::linear_ints(&[1, 0, 0]));
    assert_eq!(basis[1], HomogeneousForm::linear_ints(&[0, 1, 0]));
    assert!(matches!(
        restrict_to_line(&mono(3, [0, 0, 5], 1), &x2, &pol),
        Err(Error::NotInKernel)
    ));
    let mut rng = rng_from_seed(18);
    for _ in 0..50 {
        let l = int_line(&mut rng, 3, 6);
        let basis = line_basis(&l).unwrap();
        let bf = int_form(&mut rng, 2, 5, 9);
        let f = embed_from_line(&bf, &basis);
        assert!(contract(&l, &f).unwrap().is_exact_zero());
        let (back, _) = restrict_to_line(&f, &l, &pol).unwrap();
        assert_eq!(back, bf);
        // contraction commutes with restriction
        let p: DualForm = int_form(&mut rng, 3, 2, 5).to_dual();
        let lhs = contract(&p, &f).unwrap();
        let rhs = embed_from_line(&contract(&restrict_dual(&p, &basis), &bf).unwrap(), &basis);
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn text_round_trip() {
    let mut rng = rng_from_seed(19);
    for _ in 0..20 {
        let f = int_form(&mut rng, 3, 5, 10);
        assert_eq!(parse_form(&f.to_string(), 256).unwrap(), f);
    }
    let g = parse_form("vars=3 deg=5\n1 2 2 = 1\n", 256).unwrap();
    assert_eq!(g, mono(3, [1, 2, 2], 1));
    let e = parse_form("vars=3 deg=5\n1 2 1 = 1\n", 256).unwrap_err();
    assert!(matches!(e, Error::Parse { line: 2, .. }));
    assert!(parse_form("vars=4 deg=5\n", 256).is_err());
    assert!(parse_form("vars=2 deg=2\n1 1 = 1\n1 1 = 2\n", 256).is_err());
    let forms = parse_forms("vars=2 deg=1\n1 0 = 1\n\nvars=3 deg=1\n0 0 1 = -1/2\n", 256).unwrap();
    assert_eq!(forms.len(), 2);
}
