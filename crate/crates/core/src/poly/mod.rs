//! Dense homogeneous polynomials in 2 or 3 variables and the contraction
//! pairing between forms (`S_d`) and dual forms (`S^d`).
//!
//! Monomials are ordered lexicographically descending on `(e0, e1)`.

mod param;
mod text;

pub use param::{param_contract, param_evaluate_dual, ParamForm, ParamScalar};
pub use text::{parse_form, parse_forms};

use std::fmt;
use std::marker::PhantomData;

use crate::error::{Error, Result};
use crate::scalar::{Scalar, TolerancePolicy};

pub type Exps = [usize; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Primal;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Dual;

/// A homogeneous polynomial; `K` records whether it lives in `S_•` or `S^•`.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<K> {
    nvars: usize,
    degree: usize,
    coeffs: Vec<Scalar>,
    kind: PhantomData<K>,
}

/// Element of `S_d`.
pub type HomogeneousForm = Poly<Primal>;
/// Element of `S^d`, acting on forms by contraction.
pub type DualForm = Poly<Dual>;

pub fn num_monomials(nvars: usize, d: usize) -> usize {
    match nvars {
        2 => d + 1,
        3 => (d + 1) * (d + 2) / 2,
        _ => panic!("only 2 or 3 variables are supported"),
    }
}

pub fn monomial_index(nvars: usize, d: usize, e: &Exps) -> usize {
    match nvars {
        2 => d - e[0],
        3 => {
            let n = d - e[0];
            n * (n + 1) / 2 + (n - e[1])
        }
        _ => panic!("only 2 or 3 variables are supported"),
    }
}

pub fn monomials(nvars: usize, d: usize) -> Vec<Exps> {
    let mut out = Vec::with_capacity(num_monomials(nvars, d));
    match nvars {
        2 => {
            for e0 in (0..=d).rev() {
                out.push([e0, d - e0, 0]);
            }
        }
        3 => {
            for e0 in (0..=d).rev() {
                for e1 in (0..=(d - e0)).rev() {
                    out.push([e0, e1, d - e0 - e1]);
                }
            }
        }
        _ => panic!("only 2 or 3 variables are supported"),
    }
    out
}

fn falling(n: usize, k: usize) -> i64 {
    ((n - k + 1)..=n).map(|x| x as i64).product()
}

/// True when every value is negligible next to `scale`; exact values must be 0.
pub fn all_negligible<'a>(
    values: impl IntoIterator<Item = &'a Scalar>,
    scale: f64,
    policy: &TolerancePolicy,
) -> bool {
    let mut max = 0.0f64;
    for v in values {
        if v.is_exact() {
            if !v.is_exact_zero() {
                return false;
            }
        } else {
            max = max.max(v.magnitude());
        }
    }
    policy.negligible(max, scale)
}

impl<K> Poly<K> {
    pub fn new(nvars: usize, degree: usize, coeffs: Vec<Scalar>) -> Result<Self> {
        if nvars != 2 && nvars != 3 {
            return Err(Error::VarsMismatch(format!("unsupported variable count {nvars}")));
        }
        if coeffs.len() != num_monomials(nvars, degree) {
            return Err(Error::DegreeMismatch(format!(
                "{} coefficients for degree {degree} in {nvars} variables",
                coeffs.len()
            )));
        }
        Ok(Poly {
            nvars,
            degree,
            coeffs,
            kind: PhantomData,
        })
    }

    pub fn zero(nvars: usize, degree: usize) -> Self {
        Poly::new(nvars, degree, vec![Scalar::zero(); num_monomials(nvars, degree)]).unwrap()
    }

    pub fn one(nvars: usize) -> Self {
        Poly::new(nvars, 0, vec![Scalar::one()]).unwrap()
    }

    pub fn monomial(nvars: usize, e: Exps, c: Scalar) -> Self {
        let d = e.iter().sum();
        let mut p = Poly::zero(nvars, d);
        p.coeffs[monomial_index(nvars, d, &e)] = c;
        p
    }

    /// Degree-1 form with the given coefficient vector.
    pub fn linear(coeffs: &[Scalar]) -> Self {
        Poly::new(coeffs.len(), 1, coeffs.to_vec()).unwrap()
    }

    pub fn linear_ints(coeffs: &[i64]) -> Self {
        let c: Vec<Scalar> = coeffs.iter().map(|&x| Scalar::from_int(x)).collect();
        Poly::linear(&c)
    }

    pub fn from_terms(nvars: usize, d: usize, terms: &[(Exps, Scalar)]) -> Self {
        let mut p = Poly::zero(nvars, d);
        for (e, c) in terms {
            let i = monomial_index(nvars, d, e);
            p.coeffs[i] = &p.coeffs[i] + c;
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, e: &Exps) -> &Scalar {
        &self.coeffs[monomial_index(self.nvars, self.degree, e)]
    }

    pub fn set_coeff(&mut self, e: &Exps, c: Scalar) {
        let i = monomial_index(self.nvars, self.degree, e);
        self.coeffs[i] = c;
    }

    pub fn terms(&self) -> impl Iterator<Item = (Exps, &Scalar)> + '_ {
        monomials(self.nvars, self.degree).into_iter().zip(self.coeffs.iter())
    }

    /// Coefficient vector of a degree-1 form.
    pub fn linear_coeffs(&self) -> Vec<Scalar> {
        assert_eq!(self.degree, 1, "not a linear form");
        self.coeffs.clone()
    }

    pub fn is_exact(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_exact)
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_exact_zero)
    }

    /// Max coefficient magnitude.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    /// Zero exactly, or negligible relative to `scale`.
    pub fn is_negligible(&self, scale: f64, policy: &TolerancePolicy) -> bool {
        all_negligible(&self.coeffs, scale, policy)
    }

    /// Equality: exact on rational data, relative to the larger norm otherwise.
    pub fn approx_eq(&self, other: &Self, policy: &TolerancePolicy) -> bool {
        if self.nvars != other.nvars || self.degree != other.degree {
            return false;
        }
        let diff = self.sub(other);
        diff.is_negligible(self.norm().max(other.norm()), policy)
    }

    fn check_same(&self, o: &Self) {
        assert!(
            self.nvars == o.nvars && self.degree == o.degree,
            "shape mismatch: ({}, {}) vs ({}, {})",
            self.nvars,
            self.degree,
            o.nvars,
            o.degree
        );
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check_same(o);
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect();
        Poly::new(self.nvars, self.degree, coeffs).unwrap()
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.check_same(o);
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect();
        Poly::new(self.nvars, self.degree, coeffs).unwrap()
    }

    pub fn neg(&self) -> Self {
        self.scale(&Scalar::from_int(-1))
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a * c).collect();
        Poly::new(self.nvars, self.degree, coeffs).unwrap()
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.nvars, o.nvars, "variable count mismatch");
        let d = self.degree + o.degree;
        let mut out = vec![Scalar::zero(); num_monomials(self.nvars, d)];
        let mo = monomials(self.nvars, o.degree);
        for (ea, a) in self.terms() {
            if a.is_exact_zero() {
                continue;
            }
            for (eb, b) in mo.iter().zip(&o.coeffs) {
                if b.is_exact_zero() {
                    continue;
                }
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
                let i = monomial_index(self.nvars, d, &e);
                out[i] += &(a * b);
            }
        }
        Poly::new(self.nvars, d, out).unwrap()
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Poly::one(self.nvars);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Evaluate at a coordinate vector.
    pub fn eval(&self, point: &[Scalar]) -> Scalar {
        assert_eq!(point.len(), self.nvars);
        let mut acc = Scalar::zero();
        for (e, c) in self.terms() {
            if c.is_exact_zero() {
                continue;
            }
            let mut t = c.clone();
            for (i, x) in point.iter().enumerate() {
                if e[i] > 0 {
                    t = &t * &x.pow(e[i] as u32);
                }
            }
            acc += &t;
        }
        acc
    }

    /// Replace variable `i` by the linear form `subs[i]`.
    pub fn substitute_linear(&self, subs: &[Poly<K>]) -> Poly<K> {
        assert_eq!(subs.len(), self.nvars);
        let m = subs[0].nvars;
        let powers: Vec<Vec<Poly<K>>> = subs
            .iter()
            .map(|l| {
                assert_eq!(l.degree, 1);
                let mut v = vec![Poly::one(m)];
                for k in 1..=self.degree {
                    let next = v[k - 1].mul(l);
                    v.push(next);
                }
                v
            })
            .collect();
        let mut out = Poly::zero(m, self.degree);
        for (e, c) in self.terms() {
            if c.is_exact_zero() {
                continue;
            }
            let mut t = Poly::one(m).scale(c);
            for i in 0..self.nvars {
                if e[i] > 0 {
                    t = t.mul(&powers[i][e[i]]);
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// Partial derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> Poly<K> {
        assert!(self.degree > 0);
        let mut out = Poly::zero(self.nvars, self.degree - 1);
        for (e, c) in self.terms() {
            if e[i] == 0 || c.is_exact_zero() {
                continue;
            }
            let mut e2 = e;
            e2[i] -= 1;
            out.set_coeff(&e2, c * &Scalar::from_int(e[i] as i64));
        }
        out
    }

    fn retag<L>(self) -> Poly<L> {
        Poly {
            nvars: self.nvars,
            degree: self.degree,
            coeffs: self.coeffs,
            kind: PhantomData,
        }
    }
}

impl HomogeneousForm {
    /// The same coefficients read as a dual form.
    pub fn to_dual(&self) -> DualForm {
        self.clone().retag()
    }
}

impl DualForm {
    pub fn to_primal(&self) -> HomogeneousForm {
        self.clone().retag()
    }
}

/// Iterated constant-coefficient differentiation `p ⌟ f`.
pub fn contract(p: &DualForm, f: &HomogeneousForm) -> Result<HomogeneousForm> {
    if p.nvars != f.nvars {
        return Err(Error::VarsMismatch(format!("{} vs {}", p.nvars, f.nvars)));
    }
    if p.degree > f.degree {
        return Err(Error::DegreeMismatch(format!(
            "contracting degree {} into degree {}",
            p.degree, f.degree
        )));
    }
    let n = f.nvars;
    let d = f.degree - p.degree;
    let mut out = vec![Scalar::zero(); num_monomials(n, d)];
    let mf = monomials(n, f.degree);
    for (a, pa) in p.terms() {
        if pa.is_exact_zero() {
            continue;
        }
        for (b, fb) in mf.iter().zip(&f.coeffs) {
            if fb.is_exact_zero() || (0..3).any(|i| b[i] < a[i]) {
                continue;
            }
            let w: i64 = (0..3).map(|i| falling(b[i], a[i])).product();
            let e = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
            let i = monomial_index(n, d, &e);
            out[i] += &(&(pa * fb) * &Scalar::from_int(w));
        }
    }
    Poly::new(n, d, out)
}

/// `p(v) = p ⌟ v^d / d!`, i.e. `p` evaluated at the coordinates of `v`.
pub fn evaluate_dual(p: &DualForm, v: &HomogeneousForm) -> Scalar {
    assert_eq!(v.degree, 1, "evaluation point must be linear");
    p.eval(&v.coeffs)
}

/// `l(x)` for a dual linear form and a linear form.
pub fn pair(l: &DualForm, x: &HomogeneousForm) -> Scalar {
    evaluate_dual(l, x)
}

pub fn power(v: &HomogeneousForm, d: usize) -> HomogeneousForm {
    v.pow(d)
}

/// Canonical basis `(u, w)` of `⟨l⟩^⊥ ⊂ S_1` for a dual linear form in 3 variables.
pub fn line_basis(l: &DualForm) -> Result<[HomogeneousForm; 2]> {
    if l.nvars != 3 || l.degree != 1 {
        return Err(Error::PreconditionFailed("line must be a ternary dual linear form".into()));
    }
    if l.is_exact_zero() {
        return Err(Error::DegenerateInput("zero line".into()));
    }
    let c = &l.coeffs;
    let mut k = 0;
    for i in 1..3 {
        if c[i].magnitude() > c[k].magnitude() || (c[k].is_exact_zero() && !c[i].is_exact_zero()) {
            k = i;
        }
    }
    let others: Vec<usize> = (0..3).filter(|&i| i != k).collect();
    let basis: Vec<HomogeneousForm> = others
        .iter()
        .map(|&i| {
            let mut v = vec![Scalar::zero(); 3];
            v[i] = Scalar::one();
            v[k] = -(&c[i] / &c[k]);
            HomogeneousForm::linear(&v)
        })
        .collect();
    Ok([basis[0].clone(), basis[1].clone()])
}

fn pivot_of(basis: &[HomogeneousForm; 2]) -> (usize, usize, usize) {
    // basis vectors are e_i - a e_k and e_j - b e_k with i < j
    let i = (0..3)
        .find(|&m| basis[0].coeffs[m] == Scalar::one() && basis[1].coeffs[m].is_exact_zero())
        .unwrap();
    let j = (0..3)
        .find(|&m| basis[1].coeffs[m] == Scalar::one() && basis[0].coeffs[m].is_exact_zero())
        .unwrap();
    (i, j, 3 - i - j)
}

/// Scale used when testing `p ⌟ f` for vanishing.
pub fn contraction_scale(p: &DualForm, f: &HomogeneousForm) -> f64 {
    let w = falling(f.degree, p.degree.min(f.degree)) as f64;
    p.norm() * f.norm() * w * num_monomials(p.nvars, p.degree) as f64
}

/// Express `f ∈ Sym⟨l⟩^⊥` as a binary form in the canonical basis of `⟨l⟩^⊥`.
pub fn restrict_to_line(
    f: &HomogeneousForm,
    l: &DualForm,
    policy: &TolerancePolicy,
) -> Result<(HomogeneousForm, [HomogeneousForm; 2])> {
    if f.nvars != 3 {
        return Err(Error::VarsMismatch("restriction needs a ternary form".into()));
    }
    let basis = line_basis(l)?;
    if f.degree > 0 {
        let c = contract(l, f)?;
        if !c.is_negligible(contraction_scale(l, f), policy) {
            return Err(Error::NotInKernel);
        }
    }
    let (i, j, _) = pivot_of(&basis);
    let mut out = Poly::zero(2, f.degree);
    for (e, c) in f.terms() {
        if e[3 - i - j] == 0 {
            out.set_coeff(&[e[i], e[j], 0], c.clone());
        }
    }
    Ok((out, basis))
}

/// Inverse of [`restrict_to_line`].
pub fn embed_from_line(f: &HomogeneousForm, basis: &[HomogeneousForm; 2]) -> HomogeneousForm {
    assert_eq!(f.nvars, 2);
    f.substitute_linear(&[basis[0].clone(), basis[1].clone()])
}

/// The dual form induced on `Sym⟨u,w⟩` by a ternary dual form.
pub fn restrict_dual(p: &DualForm, basis: &[HomogeneousForm; 2]) -> DualForm {
    assert_eq!(p.nvars, 3);
    let subs: Vec<DualForm> = (0..3)
        .map(|m| DualForm::linear(&[basis[0].coeffs[m].clone(), basis[1].coeffs[m].clone()]))
        .collect();
    p.substitute_linear(&subs)
}

impl<K> fmt::Display for Poly<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vars={} deg={}", self.nvars, self.degree)?;
        for (e, c) in self.terms() {
            if c.is_exact_zero() {
                continue;
            }
            if self.nvars == 2 {
                writeln!(f, "{} {} = {}", e[0], e[1], c)?;
            } else {
                writeln!(f, "{} {} {} = {}", e[0], e[1], e[2], c)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;
