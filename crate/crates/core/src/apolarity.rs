//! Catalecticants, apolar ideals of binary forms, binary Waring rank and
//! decomposition, and the square/cube tests on contractions.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::poly::{
    contract, monomials, num_monomials, DualForm, HomogeneousForm, Poly,
};
use crate::random::{int, rng_from_seed};
use crate::scalar::{univariate_roots, Scalar, TolerancePolicy};

/// Matrix of `f_{δ,d−δ}: S^δ → S_{d−δ}`; column `μ` holds `x^μ ⌟ f`.
#[derive(Clone, Debug)]
pub struct Catalecticant {
    pub nvars: usize,
    pub source_degree: usize,
    pub target_degree: usize,
    pub matrix: Matrix,
}

pub fn catalecticant(f: &HomogeneousForm, delta: usize) -> Result<Catalecticant> {
    let d = f.degree();
    if delta > d {
        return Err(Error::DegreeMismatch(format!("δ = {delta} exceeds degree {d}")));
    }
    let n = f.nvars();
    let cols: Vec<Vec<Scalar>> = monomials(n, delta)
        .into_iter()
        .map(|e| {
            let x: DualForm = Poly::monomial(n, e, Scalar::one());
            contract(&x, f).map(|c| c.coeffs().to_vec())
        })
        .collect::<Result<_>>()?;
    Ok(Catalecticant {
        nvars: n,
        source_degree: delta,
        target_degree: d - delta,
        matrix: Matrix::from_cols(cols),
    })
}

impl Catalecticant {
    pub fn rank(&self, policy: &TolerancePolicy) -> usize {
        linalg::rank(&self.matrix, policy)
    }
}

/// Basis of `Ker f_{δ,d−δ}` as dual forms of degree δ.
pub fn exact_kernel(c: &Catalecticant, policy: &TolerancePolicy) -> Vec<DualForm> {
    linalg::kernel(&c.matrix, policy)
        .into_iter()
        .map(|v| Poly::new(c.nvars, c.source_degree, v).unwrap())
        .collect()
}

/// `Ker f_{δ,·}`, or all of `S^δ` when δ exceeds the degree of `f`.
pub fn apolar_part(f: &HomogeneousForm, delta: usize, policy: &TolerancePolicy) -> Vec<DualForm> {
    if delta > f.degree() {
        return monomials(f.nvars(), delta)
            .into_iter()
            .map(|e| Poly::monomial(f.nvars(), e, Scalar::one()))
            .collect();
    }
    exact_kernel(&catalecticant(f, delta).unwrap(), policy)
}

#[derive(Clone, Debug)]
pub struct BinaryApolarIdeal {
    pub s: usize,
    pub h: DualForm,
    pub h2: DualForm,
}

fn require_binary(f: &HomogeneousForm) -> Result<()> {
    if f.nvars() != 2 {
        return Err(Error::VarsMismatch("binary form expected".into()));
    }
    Ok(())
}

fn require_nonzero(f: &HomogeneousForm, policy: &TolerancePolicy) -> Result<()> {
    if f.is_exact_zero() || (!f.is_exact() && f.norm() <= policy.zero_threshold) {
        return Err(Error::ZeroForm);
    }
    Ok(())
}

fn coeff_rank(forms: &[DualForm], policy: &TolerancePolicy) -> usize {
    if forms.is_empty() {
        return 0;
    }
    let cols: Vec<Vec<Scalar>> = forms.iter().map(|p| p.coeffs().to_vec()).collect();
    linalg::rank(&Matrix::from_cols(cols), policy)
}

pub fn binary_apolar_generators(
    f: &HomogeneousForm,
    policy: &TolerancePolicy,
) -> Result<BinaryApolarIdeal> {
    require_binary(f)?;
    require_nonzero(f, policy)?;
    let d = f.degree();
    let mut s = 1;
    let kernel = loop {
        let k = apolar_part(f, s, policy);
        if !k.is_empty() {
            break k;
        }
        s += 1;
    };
    let h = kernel[0].clone();
    let e = d + 2 - s;
    let h2 = if e == s {
        kernel
            .get(1)
            .cloned()
            .ok_or_else(|| Error::InternalIdentityFailure("kernel at s = d+2-s is not 2-dimensional".into()))?
    } else {
        let mult: Vec<DualForm> = monomials(2, e - s)
            .into_iter()
            .map(|m| h.mul(&Poly::monomial(2, m, Scalar::one())))
            .collect();
        let base = coeff_rank(&mult, policy);
        let mut found = None;
        for k in apolar_part(f, e, policy) {
            let mut ext = mult.clone();
            ext.push(k.clone());
            if coeff_rank(&ext, policy) > base {
                found = Some(k);
                break;
            }
        }
        found.ok_or_else(|| Error::InternalIdentityFailure("no second apolar generator".into()))?
    };
    Ok(BinaryApolarIdeal { s, h, h2 })
}

/// Coprimality of two nonzero binary dual forms: their Sylvester matrix
/// has full rank.
pub fn coprime(a: &DualForm, b: &DualForm, policy: &TolerancePolicy) -> bool {
    assert!(a.nvars() == 2 && b.nvars() == 2);
    let (m, n) = (a.degree(), b.degree());
    if m == 0 || n == 0 {
        return true;
    }
    let shifts = |k: usize| -> Vec<DualForm> {
        monomials(2, k)
            .into_iter()
            .map(|e| Poly::monomial(2, e, Scalar::one()))
            .collect()
    };
    let mut rows: Vec<Vec<Scalar>> = Vec::with_capacity(m + n);
    for y in shifts(n - 1) {
        rows.push(a.mul(&y).coeffs().to_vec());
    }
    for y in shifts(m - 1) {
        rows.push(b.mul(&y).coeffs().to_vec());
    }
    linalg::rank(&Matrix::from_rows(rows), policy) == m + n
}

/// Squarefree test for a binary dual form: its two partial derivatives
/// are coprime.
pub fn is_squarefree(p: &DualForm, policy: &TolerancePolicy) -> bool {
    assert_eq!(p.nvars(), 2);
    if p.degree() <= 1 {
        return !p.is_exact_zero();
    }
    coprime(&p.derivative(0), &p.derivative(1), policy)
}

pub fn binary_rank(f: &HomogeneousForm, policy: &TolerancePolicy) -> Result<usize> {
    let ideal = binary_apolar_generators(f, policy)?;
    let d = f.degree();
    if ideal.s == d + 2 - ideal.s || is_squarefree(&ideal.h, policy) {
        Ok(ideal.s)
    } else {
        Ok(d + 2 - ideal.s)
    }
}

/// Linear forms `v` (as primal binary forms) with `g(v) = 0`.
pub fn binary_roots(g: &DualForm, policy: &TolerancePolicy) -> Result<Vec<HomogeneousForm>> {
    assert_eq!(g.nvars(), 2);
    let s = g.degree();
    let c: Vec<Scalar> = g
        .coeffs()
        .iter()
        .map(|x| {
            if !x.is_exact() && policy.negligible(x.magnitude(), g.norm()) {
                Scalar::zero()
            } else {
                x.clone()
            }
        })
        .collect();
    // g(a, b) = Σ c_j a^(s−j) b^j; dehomogenize on the larger end
    let first_side = c[0].magnitude() >= c[s].magnitude();
    let poly: Vec<Scalar> = if first_side {
        (0..=s).map(|k| c[s - k].clone()).collect()
    } else {
        c.clone()
    };
    let roots = univariate_roots(&poly, policy)?;
    let mut out = Vec::new();
    let mut count = 0;
    for (r, m) in roots {
        count += m;
        let v = if first_side {
            HomogeneousForm::linear(&[r, Scalar::one()])
        } else {
            HomogeneousForm::linear(&[Scalar::one(), r])
        };
        for _ in 0..m {
            out.push(v.clone());
        }
    }
    let at_infinity = if first_side {
        HomogeneousForm::linear_ints(&[1, 0])
    } else {
        HomogeneousForm::linear_ints(&[0, 1])
    };
    for _ in count..s {
        out.push(at_infinity.clone());
    }
    Ok(out)
}

/// Nonzero / d-th power / general classification of a form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PowerClass {
    Zero,
    Power,
    General,
}

/// Classify `f`: zero relative to `scale`, a pure power (rank of the first
/// catalecticant ≤ 1), or neither.
pub fn power_class(f: &HomogeneousForm, scale: f64, policy: &TolerancePolicy) -> PowerClass {
    if f.is_negligible(scale, policy) {
        return PowerClass::Zero;
    }
    if f.degree() <= 1 {
        return PowerClass::Power;
    }
    let c = catalecticant(f, 1).unwrap();
    if c.rank(policy) <= 1 {
        PowerClass::Power
    } else {
        PowerClass::General
    }
}

pub fn is_square(q: &HomogeneousForm, policy: &TolerancePolicy) -> bool {
    assert_eq!(q.degree(), 2);
    power_class(q, q.norm(), policy) == PowerClass::Power
}

pub fn is_cube(t: &HomogeneousForm, policy: &TolerancePolicy) -> bool {
    assert_eq!(t.degree(), 3);
    power_class(t, t.norm(), policy) == PowerClass::Power
}

/// A line `l ∈ V` with `l ⌟ f = 0`, computed as the kernel of
/// `(a, b) ↦ (a·m1 + b·m2) ⌟ f`.
pub fn find_kernel_line_in_pencil(
    f: &HomogeneousForm,
    v: [&DualForm; 2],
    policy: &TolerancePolicy,
) -> Option<DualForm> {
    let c0 = contract(v[0], f).ok()?;
    let c1 = contract(v[1], f).ok()?;
    let m = Matrix::from_cols(vec![c0.coeffs().to_vec(), c1.coeffs().to_vec()]);
    let k = linalg::kernel(&m, policy);
    let w = k.first()?;
    Some(v[0].scale(&w[0]).add(&v[1].scale(&w[1])))
}

/// `Σ cᵢ·Lᵢ^d` with a recorded verification residual.
#[derive(Clone, Debug, PartialEq)]
pub struct WaringDecomposition {
    pub terms: Vec<(Scalar, HomogeneousForm)>,
    pub degree: usize,
    pub residual: f64,
}

impl WaringDecomposition {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn expand(&self, nvars: usize) -> HomogeneousForm {
        let mut acc = Poly::zero(nvars, self.degree);
        for (c, l) in &self.terms {
            acc = acc.add(&l.pow(self.degree).scale(c));
        }
        acc
    }

    /// Merge terms whose linear forms are proportional and drop zero terms.
    pub fn merge_proportional(&mut self, policy: &TolerancePolicy) {
        let mut out: Vec<(Scalar, HomogeneousForm)> = Vec::new();
        for (c, l) in self.terms.drain(..) {
            if c.is_exact_zero() || l.is_exact_zero() {
                continue;
            }
            match out.iter_mut().find(|(_, m)| proportional(m, &l, policy)) {
                Some((c0, m)) => {
                    let k = pivot(m);
                    let kappa = &l.coeffs()[k] / &m.coeffs()[k];
                    *c0 = &*c0 + &(&c * &kappa.pow(self.degree as u32));
                }
                None => out.push((c, l)),
            }
        }
        out.retain(|(c, _)| !c.is_exact_zero());
        self.terms = out;
    }
}

fn pivot(l: &HomogeneousForm) -> usize {
    let c = l.coeffs();
    let mut k = 0;
    for i in 1..c.len() {
        if c[i].magnitude() > c[k].magnitude() {
            k = i;
        }
    }
    k
}

/// Two linear forms (or dual linear forms) span the same line.
pub fn proportional<K>(a: &Poly<K>, b: &Poly<K>, policy: &TolerancePolicy) -> bool {
    let (x, y) = (a.coeffs(), b.coeffs());
    let n = x.len();
    let mut minors = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            minors.push(&(&x[i] * &y[j]) - &(&x[j] * &y[i]));
        }
    }
    crate::poly::all_negligible(&minors, a.norm() * b.norm(), policy)
}

/// Max-norm of `f − Σ cᵢLᵢ^d` relative to the max-norm of `f`.
pub fn residual(f: &HomogeneousForm, terms: &[(Scalar, HomogeneousForm)]) -> f64 {
    let mut acc = f.clone();
    for (c, l) in terms {
        acc = acc.sub(&l.pow(f.degree()).scale(c));
    }
    if acc.is_exact_zero() {
        return 0.0;
    }
    let nf = f.norm();
    if nf == 0.0 {
        return f64::INFINITY;
    }
    acc.norm() / nf
}

fn solve_coefficients(
    f: &HomogeneousForm,
    lines: &[HomogeneousForm],
    policy: &TolerancePolicy,
) -> Option<Vec<Scalar>> {
    let d = f.degree();
    let cols: Vec<Vec<Scalar>> = lines.iter().map(|v| v.pow(d).coeffs().to_vec()).collect();
    let a = Matrix::from_cols(cols);
    if a.is_exact() && f.is_exact() {
        linalg::solve(&a, f.coeffs(), policy).map(|s| s.particular)
    } else {
        linalg::least_squares(&a, f.coeffs(), policy)
    }
}

const PENCIL_SAMPLES: usize = 64;

/// Sylvester's algorithm: a decomposition of length `binary_rank(f)`.
pub fn binary_decompose(f: &HomogeneousForm, policy: &TolerancePolicy) -> Result<WaringDecomposition> {
    let ideal = binary_apolar_generators(f, policy)?;
    let d = f.degree();
    let s = ideal.s;
    let e = d + 2 - s;
    let generator = if is_squarefree(&ideal.h, policy) {
        ideal.h.clone()
    } else {
        let deg = if e == s { s } else { e };
        let mut rng = rng_from_seed(0x5157_0001 ^ d as u64);
        let mut found = None;
        for _ in 0..PENCIL_SAMPLES {
            let m: DualForm = Poly::new(
                2,
                deg - s,
                (0..num_monomials(2, deg - s)).map(|_| Scalar::from_int(int(&mut rng, 9))).collect(),
            )
            .unwrap();
            let c = Scalar::from_int(int(&mut rng, 9));
            if c.is_exact_zero() {
                continue;
            }
            let g = ideal.h.mul(&m).add(&ideal.h2.scale(&c));
            if is_squarefree(&g, policy) {
                found = Some(g);
                break;
            }
        }
        found.ok_or(Error::SamplingExhausted(PENCIL_SAMPLES))?
    };
    let lines = binary_roots(&generator, policy)?;
    let coeffs = solve_coefficients(f, &lines, policy)
        .ok_or_else(|| Error::InternalIdentityFailure("coefficient system inconsistent".into()))?;
    let terms: Vec<(Scalar, HomogeneousForm)> = coeffs.into_iter().zip(lines).collect();
    let res = residual(f, &terms);
    Ok(WaringDecomposition {
        terms,
        degree: d,
        residual: res,
    })
}

impl fmt::Display for WaringDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, l) in &self.terms {
            write!(f, "{c} :")?;
            for a in l.coeffs() {
                write!(f, " {a}")?;
            }
            writeln!(f)?;
        }
        writeln!(f, "residual = {:e}", self.residual)
    }
}

/// Read the term-per-line format; `degree` is the power every term is raised to.
pub fn parse_decomposition(text: &str, degree: usize, prec: usize) -> Result<WaringDecomposition> {
    let mut terms = Vec::new();
    let mut residual = None;
    let mut nvars = None;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        if let Some(rest) = t.strip_prefix("residual") {
            let v = rest.trim_start().strip_prefix('=').map(str::trim).ok_or_else(|| {
                Error::parse(lineno, 1, "expected `residual = <real>`")
            })?;
            let r: f64 = v
                .parse()
                .map_err(|_| Error::parse(lineno, 1, format!("bad residual `{v}`")))?;
            if !(r >= 0.0) {
                return Err(Error::parse(lineno, 1, "residual must be nonnegative"));
            }
            residual = Some(r);
            continue;
        }
        if residual.is_some() {
            return Err(Error::parse(lineno, 1, "term after residual line"));
        }
        let (c, l) = t
            .split_once(':')
            .ok_or_else(|| Error::parse(lineno, 1, "expected `c : a0 a1 [a2]`"))?;
        let c = Scalar::parse(c, prec).map_err(|e| relocate(e, lineno))?;
        let a: Vec<Scalar> = l
            .split_whitespace()
            .map(|x| Scalar::parse(x, prec).map_err(|e| relocate(e, lineno)))
            .collect::<Result<_>>()?;
        if a.len() != 2 && a.len() != 3 {
            return Err(Error::parse(lineno, 1, "a linear form needs 2 or 3 coefficients"));
        }
        if *nvars.get_or_insert(a.len()) != a.len() {
            return Err(Error::parse(lineno, 1, "inconsistent variable count"));
        }
        terms.push((c, HomogeneousForm::linear(&a)));
    }
    Ok(WaringDecomposition {
        terms,
        degree,
        residual: residual.ok_or_else(|| Error::parse(text.lines().count().max(1), 1, "missing residual line"))?,
    })
}

fn relocate(e: Error, line: usize) -> Error {
    match e {
        Error::Parse { column, message, .. } => Error::Parse {
            line,
            column,
            message,
        },
        other => other,
    }
}
