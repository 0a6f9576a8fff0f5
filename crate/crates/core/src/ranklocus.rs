//! The rank-two locus of binary forms f with p ⌟ f ∈ ⟨q⟩, q = x₀x₁, and its
//! parameterization r by a pencil of t-parameters.

use crate::apolarity::{apolar_part, binary_rank, binary_roots, coprime, is_cube, is_squarefree};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::poly::{
    contract, evaluate_dual, monomials, param_evaluate_dual, DualForm, HomogeneousForm,
    ParamForm, ParamScalar, Poly,
};
use crate::random::{int, rng_from_seed, Rng};
use crate::scalar::{Scalar, TolerancePolicy};

#[derive(Clone, Debug)]
pub struct RankTwoPencil {
    pub d: usize,
    pub factors: Vec<DualForm>,
    pub x0: HomogeneousForm,
    pub x1: HomogeneousForm,
    /// t-degree d−2, forms of degree d.
    pub r: ParamForm,
    /// aⁱ = lⁱ(x₀)²t⁰ − lⁱ(x₁)²t¹.
    pub a: Vec<ParamScalar>,
    /// [λᵢ, μᵢ] = [lⁱ(x₁)², lⁱ(x₀)²], the root of aⁱ.
    pub roots: Vec<[Scalar; 2]>,
    /// vᵢ = lⁱ(x₁)x₀ − lⁱ(x₀)x₁ spans ⟨lⁱ⟩^⊥.
    pub v: Vec<HomogeneousForm>,
}

fn det2(a: &[Scalar; 2], b: &[Scalar; 2]) -> Scalar {
    &(&a[0] * &b[1]) - &(&a[1] * &b[0])
}

/// [a] = [b] in ℙ¹ (exactly on rationals, relative to the magnitudes otherwise).
pub fn same_point(a: &[Scalar; 2], b: &[Scalar; 2], policy: &TolerancePolicy) -> bool {
    let d = det2(a, b);
    if d.is_exact() {
        return d.is_exact_zero();
    }
    let na = a[0].magnitude().max(a[1].magnitude());
    let nb = b[0].magnitude().max(b[1].magnitude());
    policy.negligible(d.magnitude(), na * nb)
}

/// Linear form `c₀x₀ + c₁x₁` with parameter coefficients.
fn param_linear(x0: &HomogeneousForm, x1: &HomogeneousForm, sign: i64) -> ParamForm {
    ParamForm::new(vec![x0.clone(), x1.scale(&Scalar::from_int(sign))])
}

/// p(t⁰x₀−t¹x₁)(t⁰x₀+t¹x₁)^m − p(t⁰x₀+t¹x₁)(t⁰x₀−t¹x₁)^m.
fn difference_term(
    factors: &[DualForm],
    x0: &HomogeneousForm,
    x1: &HomogeneousForm,
    m: usize,
) -> ParamForm {
    let plus = param_linear(x0, x1, 1);
    let minus = param_linear(x0, x1, -1);
    let mut p_plus = ParamScalar::one();
    let mut p_minus = ParamScalar::one();
    for l in factors {
        p_plus = p_plus.mul(&param_evaluate_dual(l, &plus));
        p_minus = p_minus.mul(&param_evaluate_dual(l, &minus));
    }
    plus.pow(m).mul_scalar(&p_minus).sub(&minus.pow(m).mul_scalar(&p_plus))
}

/// The right-hand side of the defining identity of r, of t-degree 2d−2.
pub fn defining_difference(
    factors: &[DualForm],
    x0: &HomogeneousForm,
    x1: &HomogeneousForm,
) -> ParamForm {
    difference_term(factors, x0, x1, factors.len() + 2)
}

/// `F((t⁰)², (t¹)²)`: row j moves to row 2j.
pub fn square_parameters(f: &ParamForm) -> ParamForm {
    let zero = Poly::zero(f.nvars(), f.s_degree());
    let mut rows = vec![zero; 2 * f.t_degree() + 1];
    for (j, r) in f.rows().iter().enumerate() {
        rows[2 * j] = r.clone();
    }
    ParamForm::new(rows)
}

fn t0t1() -> ParamScalar {
    ParamScalar::new(vec![Scalar::zero(), Scalar::one(), Scalar::zero()])
}

pub fn build_r(
    factors: &[DualForm],
    x0: &HomogeneousForm,
    x1: &HomogeneousForm,
    policy: &TolerancePolicy,
) -> Result<RankTwoPencil> {
    if factors.is_empty() {
        return Err(Error::PreconditionFailed("need d ≥ 3 (at least one factor)".into()));
    }
    if factors.iter().any(|l| l.nvars() != 2 || l.degree() != 1) || x0.nvars() != 2 || x1.nvars() != 2 {
        return Err(Error::VarsMismatch("binary linear forms expected".into()));
    }
    let d = factors.len() + 2;
    let c0 = x0.linear_coeffs();
    let c1 = x1.linear_coeffs();
    if same_point(&[c0[0].clone(), c0[1].clone()], &[c1[0].clone(), c1[1].clone()], policy) {
        return Err(Error::SquareQ);
    }
    let g = defining_difference(factors, x0, x1);
    let h = g.exact_divide(&t0t1(), policy).map_err(|e| match e {
        Error::NotDivisible { remainder } => {
            Error::InternalIdentityFailure(format!("t⁰t¹ does not divide g (remainder {remainder:e})"))
        }
        other => other,
    })?;
    let scale = h.norm() * h.grid_size() as f64;
    let mut rows = Vec::with_capacity(d - 1);
    for (j, row) in h.rows().iter().enumerate() {
        if j % 2 == 1 {
            if !(row.is_exact_zero() || (!row.is_exact() && row.is_negligible(scale, policy))) {
                return Err(Error::InternalIdentityFailure(format!("odd t-power {j} survives in g/t⁰t¹")));
            }
        } else {
            rows.push(row.clone());
        }
    }
    let r = ParamForm::new(rows);
    let mut a = Vec::new();
    let mut roots = Vec::new();
    let mut v = Vec::new();
    for l in factors {
        let l0 = evaluate_dual(l, x0);
        let l1 = evaluate_dual(l, x1);
        let (s0, s1) = (&l0 * &l0, &l1 * &l1);
        a.push(ParamScalar::linear(s0.clone(), -&s1));
        roots.push([s1, s0]);
        v.push(x0.scale(&l1).sub(&x1.scale(&l0)));
    }
    Ok(RankTwoPencil {
        d,
        factors: factors.to_vec(),
        x0: x0.clone(),
        x1: x1.clone(),
        r,
        a,
        roots,
        v,
    })
}

impl RankTwoPencil {
    /// p = l¹···l^{d−2}.
    pub fn p(&self) -> DualForm {
        self.factors.iter().fold(Poly::one(2), |acc, l| acc.mul(l))
    }

    /// q = x₀x₁.
    pub fn q(&self) -> HomogeneousForm {
        self.x0.mul(&self.x1)
    }

    /// The finite set X of parameters where r fails to be of rank two.
    pub fn exceptional_set(&self) -> Vec<[Scalar; 2]> {
        let mut x: Vec<[Scalar; 2]> = vec![
            [Scalar::one(), Scalar::zero()],
            [Scalar::zero(), Scalar::one()],
        ];
        for r in &self.roots {
            if !x.iter().any(|y| det2(y, r).is_exact_zero()) {
                x.push(r.clone());
            }
        }
        x
    }

    pub fn is_exceptional(&self, lambda: &Scalar, mu: &Scalar, policy: &TolerancePolicy) -> bool {
        let pt = [lambda.clone(), mu.clone()];
        self.exceptional_set().iter().any(|x| same_point(x, &pt, policy))
    }

    /// r′_I with (∏_{i∈I} aⁱ)·r′_I = (∏_{i∈I} lⁱ) ⌟ r.
    pub fn r_quotient(&self, subset: &[usize], policy: &TolerancePolicy) -> Result<ParamForm> {
        let mut lp: DualForm = Poly::one(2);
        let mut ap = ParamScalar::one();
        for &i in subset {
            if i >= self.factors.len() {
                return Err(Error::PreconditionFailed(format!("factor index {i} out of range")));
            }
            lp = lp.mul(&self.factors[i]);
            ap = ap.mul(&self.a[i]);
        }
        let contracted = self.r.try_map_rows(|row| contract(&lp, row))?;
        contracted.exact_divide(&ap, policy)
    }

    /// r at (λ, μ), refusing the exceptional parameters.
    pub fn sample_rank_two(&self, lambda: &Scalar, mu: &Scalar, policy: &TolerancePolicy) -> Result<HomogeneousForm> {
        if self.is_exceptional(lambda, mu, policy) {
            return Err(Error::ExceptionalParameter);
        }
        Ok(self.r.evaluate(lambda, mu))
    }
}

/// Write a binary quadratic as x₀·x₁. For a square the two factors are
/// proportional.
pub fn factor_quadratic(
    q: &HomogeneousForm,
    policy: &TolerancePolicy,
) -> Result<(HomogeneousForm, HomogeneousForm)> {
    if q.nvars() != 2 || q.degree() != 2 {
        return Err(Error::VarsMismatch("binary quadratic expected".into()));
    }
    if q.is_exact_zero() || (!q.is_exact() && q.norm() <= policy.zero_threshold) {
        return Err(Error::ZeroForm);
    }
    let roots = binary_roots(&q.to_dual(), policy)?;
    // a root ρ gives the factor ρ₁y₀ − ρ₀y₁
    let factor = |r: &HomogeneousForm| {
        let c = r.linear_coeffs();
        HomogeneousForm::linear(&[c[1].clone(), -&c[0]])
    };
    let (a, b) = (factor(&roots[0]), factor(&roots[1]));
    let ab = a.mul(&b);
    let mut k = 0;
    for i in 1..3 {
        if ab.coeffs()[i].magnitude() > ab.coeffs()[k].magnitude() {
            k = i;
        }
    }
    let c = &q.coeffs()[k] / &ab.coeffs()[k];
    Ok((a.scale(&c), b))
}

/// Cubic dual forms h with h ⌟ t = 0.
fn cubic_kernel(t: &HomogeneousForm, policy: &TolerancePolicy) -> Vec<DualForm> {
    apolar_part(t, 3, policy)
}

/// The line W_{p,t} ∩ Ker ∂_h: forms f of degree 5 with h ⌟ f = 0 and
/// p ⌟ f ∈ ⟨t⟩. Returns None unless the intersection is one-dimensional.
fn intersect_with_kernel(
    p: &DualForm,
    t: &HomogeneousForm,
    h: &DualForm,
    policy: &TolerancePolicy,
) -> Option<HomogeneousForm> {
    let d = p.degree() + t.degree();
    let mons = monomials(2, d);
    let mut cols: Vec<Vec<Scalar>> = Vec::with_capacity(mons.len() + 1);
    for e in &mons {
        let m: HomogeneousForm = Poly::monomial(2, *e, Scalar::one());
        let mut col = contract(h, &m).ok()?.coeffs().to_vec();
        col.extend(contract(p, &m).ok()?.coeffs().iter().cloned());
        cols.push(col);
    }
    let mut last = vec![Scalar::zero(); d + 1 - h.degree()];
    last.extend(t.coeffs().iter().map(|c| -c));
    cols.push(last);
    let k = linalg::kernel(&Matrix::from_cols(cols), policy);
    if k.len() != 1 {
        return None;
    }
    let v = &k[0];
    Poly::new(2, d, v[..mons.len()].to_vec()).ok()
}

/// A binary quintic of rank exactly 3 in W_{p,t} \ L_{p,3}.
pub fn rank3_element(
    p: &DualForm,
    t: &HomogeneousForm,
    seed: u64,
    max_retries: usize,
    policy: &TolerancePolicy,
) -> Result<HomogeneousForm> {
    if p.nvars() != 2 || t.nvars() != 2 || p.degree() != 2 || t.degree() != 3 {
        return Err(Error::VarsMismatch("binary quadric and binary cubic expected".into()));
    }
    if t.is_exact_zero() || is_cube(t, policy) {
        return Err(Error::CubeInput);
    }
    let kernel = cubic_kernel(t, policy);
    let q = apolar_part(t, 2, policy);
    if kernel.len() != 3 || q.len() != 1 {
        return Err(Error::CubeInput);
    }
    let q = &q[0];
    let mut rng: Rng = rng_from_seed(seed);
    for _ in 0..max_retries {
        let h = random_combination(&mut rng, &kernel);
        if h.is_exact_zero() || !is_squarefree(&h, policy) || !coprime(&h, p, policy) || !coprime(&h, q, policy) {
            continue;
        }
        let Some(f) = intersect_with_kernel(p, t, &h, policy) else {
            continue;
        };
        let pf = contract(p, &f)?;
        if pf.is_negligible(f.norm() * p.norm(), policy) {
            continue;
        }
        if binary_rank(&f, policy)? == 3 {
            return Ok(f);
        }
    }
    Err(Error::SearchExhausted(max_retries))
}

fn random_combination(rng: &mut Rng, basis: &[DualForm]) -> DualForm {
    let mut acc = Poly::zero(basis[0].nvars(), basis[0].degree());
    for b in basis {
        acc = acc.add(&b.scale(&Scalar::from_int(int(rng, 7))));
    }
    acc
}

#[cfg(test)]
mod tests;
