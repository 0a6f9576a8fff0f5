//! The bigraded ring `K[t⁰,t¹]_δ ⊗ S_d`. Index `j` of a t-coefficient vector
//! stands for `(t⁰)^(δ−j) (t¹)^j`.

use super::{all_negligible, contract, DualForm, HomogeneousForm, Poly};
use crate::error::{Error, Result};
use crate::scalar::{Scalar, TolerancePolicy};

/// Binary form in `(t⁰, t¹)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamScalar {
    coeffs: Vec<Scalar>,
}

impl ParamScalar {
    pub fn new(coeffs: Vec<Scalar>) -> Self {
        assert!(!coeffs.is_empty());
        ParamScalar { coeffs }
    }

    pub fn constant(c: Scalar) -> Self {
        ParamScalar { coeffs: vec![c] }
    }

    pub fn one() -> Self {
        ParamScalar::constant(Scalar::one())
    }

    /// `c0·t⁰ + c1·t¹`.
    pub fn linear(c0: Scalar, c1: Scalar) -> Self {
        ParamScalar { coeffs: vec![c0, c1] }
    }

    pub fn t0() -> Self {
        ParamScalar::linear(Scalar::one(), Scalar::zero())
    }

    pub fn t1() -> Self {
        ParamScalar::linear(Scalar::zero(), Scalar::one())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn is_exact(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_exact)
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_exact_zero)
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.degree(), o.degree(), "inhomogeneous sum");
        ParamScalar::new(self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!(self.degree(), o.degree(), "inhomogeneous difference");
        ParamScalar::new(self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        ParamScalar::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = vec![Scalar::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if !b.is_exact_zero() {
                    out[i + j] += &(a * b);
                }
            }
        }
        ParamScalar::new(out)
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = ParamScalar::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, lambda: &Scalar, mu: &Scalar) -> Scalar {
        let d = self.degree();
        let mut acc = Scalar::zero();
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_exact_zero() {
                continue;
            }
            acc += &(&(c * &lambda.pow((d - j) as u32)) * &mu.pow(j as u32));
        }
        acc
    }

    /// `(t⁰,t¹) ↦ (m00 t⁰ + m01 t¹, m10 t⁰ + m11 t¹)`.
    pub fn substitute(&self, m: &[[Scalar; 2]; 2]) -> Self {
        let a = ParamScalar::linear(m[0][0].clone(), m[0][1].clone());
        let b = ParamScalar::linear(m[1][0].clone(), m[1][1].clone());
        let d = self.degree();
        let mut out = ParamScalar::new(vec![Scalar::zero(); d + 1]);
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_exact_zero() {
                continue;
            }
            let term = a.pow(d - j).mul(&b.pow(j)).scale(c);
            out = out.add(&term);
        }
        out
    }

    /// A root `[λ, μ]` of a nonzero linear form.
    pub fn linear_root(&self) -> (Scalar, Scalar) {
        assert_eq!(self.degree(), 1);
        (self.coeffs[1].clone(), -&self.coeffs[0])
    }
}

/// Element of `K[t⁰,t¹]_δ ⊗ S_d`, one form per t-monomial.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamForm {
    rows: Vec<HomogeneousForm>,
}

impl ParamForm {
    pub fn new(rows: Vec<HomogeneousForm>) -> Self {
        assert!(!rows.is_empty());
        let (n, d) = (rows[0].nvars(), rows[0].degree());
        assert!(rows.iter().all(|r| r.nvars() == n && r.degree() == d), "ragged grid");
        ParamForm { rows }
    }

    pub fn zero(t_degree: usize, nvars: usize, s_degree: usize) -> Self {
        ParamForm::new(vec![Poly::zero(nvars, s_degree); t_degree + 1])
    }

    /// `f` as a t-constant.
    pub fn from_form(f: HomogeneousForm) -> Self {
        ParamForm { rows: vec![f] }
    }

    /// `a · f`.
    pub fn from_product(a: &ParamScalar, f: &HomogeneousForm) -> Self {
        ParamForm::new(a.coeffs.iter().map(|c| f.scale(c)).collect())
    }

    pub fn t_degree(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn s_degree(&self) -> usize {
        self.rows[0].degree()
    }

    pub fn nvars(&self) -> usize {
        self.rows[0].nvars()
    }

    pub fn rows(&self) -> &[HomogeneousForm] {
        &self.rows
    }

    pub fn row(&self, j: usize) -> &HomogeneousForm {
        &self.rows[j]
    }

    pub fn is_exact(&self) -> bool {
        self.rows.iter().all(Poly::is_exact)
    }

    pub fn is_exact_zero(&self) -> bool {
        self.rows.iter().all(Poly::is_exact_zero)
    }

    pub fn norm(&self) -> f64 {
        self.rows.iter().map(Poly::norm).fold(0.0, f64::max)
    }

    pub fn grid_size(&self) -> usize {
        self.rows.len() * self.rows[0].coeffs().len()
    }

    pub fn is_negligible(&self, scale: f64, policy: &TolerancePolicy) -> bool {
        all_negligible(self.rows.iter().flat_map(|r| r.coeffs()), scale, policy)
    }

    /// Exact equality on rational grids; otherwise the difference must be
    /// below `grid_size · zero_threshold` relative to the larger norm.
    pub fn approx_eq(&self, o: &ParamForm, policy: &TolerancePolicy) -> bool {
        if self.rows.len() != o.rows.len()
            || self.nvars() != o.nvars()
            || self.s_degree() != o.s_degree()
        {
            return false;
        }
        let d = self.sub(o);
        d.is_negligible(self.norm().max(o.norm()) * self.grid_size() as f64, policy)
    }

    /// Apply `f` to each row.
    pub fn map_rows(&self, f: impl Fn(&HomogeneousForm) -> HomogeneousForm) -> ParamForm {
        ParamForm::new(self.rows.iter().map(f).collect())
    }

    pub fn try_map_rows(
        &self,
        f: impl Fn(&HomogeneousForm) -> Result<HomogeneousForm>,
    ) -> Result<ParamForm> {
        Ok(ParamForm::new(self.rows.iter().map(f).collect::<Result<_>>()?))
    }

    pub fn add(&self, o: &ParamForm) -> ParamForm {
        assert_eq!(self.rows.len(), o.rows.len(), "inhomogeneous sum");
        ParamForm::new(self.rows.iter().zip(&o.rows).map(|(a, b)| a.add(b)).collect())
    }

    pub fn sub(&self, o: &ParamForm) -> ParamForm {
        assert_eq!(self.rows.len(), o.rows.len(), "inhomogeneous difference");
        ParamForm::new(self.rows.iter().zip(&o.rows).map(|(a, b)| a.sub(b)).collect())
    }

    pub fn scale(&self, c: &Scalar) -> ParamForm {
        self.map_rows(|r| r.scale(c))
    }

    pub fn mul_scalar(&self, a: &ParamScalar) -> ParamForm {
        let (n, d) = (self.nvars(), self.s_degree());
        let mut rows = vec![Poly::zero(n, d); self.rows.len() + a.coeffs.len() - 1];
        for (i, c) in a.coeffs.iter().enumerate() {
            if c.is_exact_zero() {
                continue;
            }
            for (j, r) in self.rows.iter().enumerate() {
                rows[i + j] = rows[i + j].add(&r.scale(c));
            }
        }
        ParamForm::new(rows)
    }

    /// Product: convolution in t, full expansion in x.
    pub fn mul(&self, o: &ParamForm) -> ParamForm {
        let n = self.nvars();
        let d = self.s_degree() + o.s_degree();
        let mut rows = vec![Poly::zero(n, d); self.rows.len() + o.rows.len() - 1];
        for (i, a) in self.rows.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in o.rows.iter().enumerate() {
                if !b.is_exact_zero() {
                    rows[i + j] = rows[i + j].add(&a.mul(b));
                }
            }
        }
        ParamForm::new(rows)
    }

    pub fn pow(&self, k: usize) -> ParamForm {
        let mut acc = ParamForm::from_form(Poly::one(self.nvars()));
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Substitute `t⁰ = λ`, `t¹ = μ`.
    pub fn evaluate(&self, lambda: &Scalar, mu: &Scalar) -> HomogeneousForm {
        let d = self.t_degree();
        let mut out = Poly::zero(self.nvars(), self.s_degree());
        for (j, r) in self.rows.iter().enumerate() {
            let w = &lambda.pow((d - j) as u32) * &mu.pow(j as u32);
            if !w.is_exact_zero() {
                out = out.add(&r.scale(&w));
            }
        }
        out
    }

    /// `(t⁰,t¹) ↦ M(t⁰,t¹)` on every row.
    pub fn substitute(&self, m: &[[Scalar; 2]; 2], policy: &TolerancePolicy) -> Result<ParamForm> {
        check_invertible(m, policy)?;
        let a = ParamScalar::linear(m[0][0].clone(), m[0][1].clone());
        let b = ParamScalar::linear(m[1][0].clone(), m[1][1].clone());
        let d = self.t_degree();
        let mut out = ParamForm::zero(d, self.nvars(), self.s_degree());
        for (j, r) in self.rows.iter().enumerate() {
            if r.is_exact_zero() {
                continue;
            }
            let w = a.pow(d - j).mul(&b.pow(j));
            out = out.add(&ParamForm::from_product(&w, r));
        }
        Ok(out)
    }

    /// Exact quotient `self / a`, checked by multiplying back.
    pub fn exact_divide(&self, a: &ParamScalar, policy: &TolerancePolicy) -> Result<ParamForm> {
        if a.is_exact_zero() {
            return Err(Error::NotDivisible { remainder: self.norm() });
        }
        let k = a.degree();
        let dt = self.t_degree();
        if k > dt {
            return Err(Error::NotDivisible { remainder: self.norm() });
        }
        // strip factors of t⁰ and t¹, which only shift rows
        let lo = a.coeffs.iter().position(|c| !c.is_exact_zero()).unwrap();
        let hi = a.coeffs.iter().rposition(|c| !c.is_exact_zero()).unwrap();
        let core: Vec<Scalar> = a.coeffs[lo..=hi].to_vec();
        let kc = core.len() - 1;
        let qd = dt - k;
        // rows of self that the core division sees: j - lo, for j in lo..=dt-(k-hi)
        let src: Vec<HomogeneousForm> = (lo..=(dt - (k - hi))).map(|j| self.rows[j].clone()).collect();
        let forward = core[0].magnitude() >= core[kc].magnitude();
        let (core_o, src_o): (Vec<Scalar>, Vec<HomogeneousForm>) = if forward {
            (core.clone(), src.clone())
        } else {
            (core.iter().rev().cloned().collect(), src.iter().rev().cloned().collect())
        };
        let inv = core_o[0].recip();
        let mut q: Vec<HomogeneousForm> = Vec::with_capacity(qd + 1);
        for m in 0..=qd {
            let mut acc = src_o[m].clone();
            for i in 1..=kc.min(m) {
                if !core_o[i].is_exact_zero() {
                    acc = acc.sub(&q[m - i].scale(&core_o[i]));
                }
            }
            q.push(acc.scale(&inv));
        }
        if !forward {
            q.reverse();
        }
        let quot = ParamForm::new(q);
        let back = quot.mul_scalar(a);
        let rem = self.sub(&back);
        let scale = self.norm().max(back.norm()) * self.grid_size() as f64;
        if !rem.is_negligible(scale, policy) {
            return Err(Error::NotDivisible { remainder: rem.norm() });
        }
        Ok(quot)
    }
}

fn check_invertible(m: &[[Scalar; 2]; 2], policy: &TolerancePolicy) -> Result<()> {
    let det = &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]);
    let scale = m.iter().flatten().map(Scalar::magnitude).fold(0.0, f64::max).powi(2);
    if det.is_exact_zero() || (!det.is_exact() && policy.negligible(det.magnitude(), scale)) {
        return Err(Error::SingularChange);
    }
    Ok(())
}

/// `p ⌟ F`, gridwise.
pub fn param_contract(p: &DualForm, f: &ParamForm) -> Result<ParamForm> {
    f.try_map_rows(|r| contract(p, r))
}

/// `p(v)` for a parameterized linear form `v`.
pub fn param_evaluate_dual(p: &DualForm, v: &ParamForm) -> ParamScalar {
    assert_eq!(v.s_degree(), 1);
    let n = v.nvars();
    let coord: Vec<ParamScalar> = (0..n)
        .map(|i| ParamScalar::new(v.rows.iter().map(|r| r.coeffs()[i].clone()).collect()))
        .collect();
    let td = v.t_degree() * p.degree();
    let mut acc = ParamScalar::new(vec![Scalar::zero(); td + 1]);
    for (e, c) in p.terms() {
        if c.is_exact_zero() {
            continue;
        }
        let mut t = ParamScalar::constant(c.clone());
        for i in 0..n {
            t = t.mul(&coord[i].pow(e[i]));
        }
        acc = acc.add(&t);
    }
    acc
}
