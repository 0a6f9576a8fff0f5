//! Ternary quintics as sums of at most ten fifth powers. The configuration
//! kind decides the route: two lines split f into two binary pieces, three
//! lines into three, and four lines go through the rank-two pencils.

use std::fmt;

use crate::apolarity::{binary_decompose, binary_rank, proportional, residual, WaringDecomposition};
use crate::error::{Error, Result};
use crate::lineconfig::{intersection_point, refine_configuration, LineConfiguration};
use crate::linalg::{self, Matrix};
use crate::poly::{
    contract, embed_from_line, line_basis, monomials, param_contract, restrict_dual,
    restrict_to_line, DualForm, HomogeneousForm, ParamForm, ParamScalar, Poly,
};
use crate::random::{int, nonzero_int, rng_from_seed, Rng};
use crate::ranklocus::{build_r, factor_quadratic, rank3_element, RankTwoPencil};
use crate::scalar::{Scalar, TolerancePolicy};

const OUTER_ROUNDS: u64 = 4;
const MAX_TERMS: usize = 10;

#[derive(Clone, Copy, Debug)]
pub struct DecomposeOptions {
    pub seed: u64,
    pub max_retries: usize,
    pub policy: TolerancePolicy,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions {
            seed: 0,
            max_retries: 64,
            policy: TolerancePolicy::default(),
        }
    }
}

/// Line-oriented `key = value` report of one run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunReport {
    pub entries: Vec<(String, String)>,
}

impl RunReport {
    pub fn push(&mut self, key: &str, value: impl fmt::Display) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub decomposition: WaringDecomposition,
    pub configuration: LineConfiguration,
    pub report: RunReport,
}

fn ident(name: &str) -> Error {
    Error::IdentityFailure(name.to_string())
}

fn check(ok: bool, name: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(ident(name))
    }
}

fn param_scalar_close(a: &ParamScalar, b: &ParamScalar, policy: &TolerancePolicy) -> bool {
    a.degree() == b.degree()
        && crate::poly::all_negligible(
            &a.sub(b).coeffs().to_vec(),
            a.norm().max(b.norm()) * (a.degree() + 1) as f64,
            policy,
        )
}

/// The change of t-parameters sending the linear form `a` to t⁰.
fn normalizing_change(a: &ParamScalar) -> [[Scalar; 2]; 2] {
    let (c0, c1) = (&a.coeffs()[0], &a.coeffs()[1]);
    if c0.magnitude() >= c1.magnitude() {
        [[c0.recip(), -&(c1 / c0)], [Scalar::zero(), Scalar::one()]]
    } else {
        [[Scalar::zero(), Scalar::one()], [c1.recip(), -&(c0 / c1)]]
    }
}

fn s240() -> Scalar {
    Scalar::from_int(240)
}

fn embed_param(f: &ParamForm, basis: &[HomogeneousForm; 2]) -> ParamForm {
    f.map_rows(|r| embed_from_line(r, basis))
}

/// The rank-two pencil of the quadric `q = l^i l^j l^k ⌟ f` inside Sym⟨m⟩^⊥.
fn pencil_on_line(
    f: &HomogeneousForm,
    factors: [&DualForm; 3],
    m: &DualForm,
    policy: &TolerancePolicy,
) -> Result<(RankTwoPencil, [HomogeneousForm; 2], HomogeneousForm)> {
    let p = factors[0].mul(factors[1]).mul(factors[2]);
    let q = contract(&p, f)?;
    let (qb, basis) = restrict_to_line(&q, m, policy)?;
    let (x0, x1) = factor_quadratic(&qb, policy)?;
    if proportional(&x0, &x1, policy) {
        return Err(Error::CertificationViolated("contracted quadric is a square".into()));
    }
    let bin: Vec<DualForm> = factors.iter().map(|l| restrict_dual(l, &basis)).collect();
    let pen = build_r(&bin, &x0, &x1, policy)?;
    Ok((pen, basis, q))
}

#[derive(Clone, Debug)]
pub struct F4Side {
    pub pencil: RankTwoPencil,
    pub basis: [HomogeneousForm; 2],
    /// The pencil with a³⁴ moved to t⁰, embedded in three variables.
    pub f4: ParamForm,
    pub a14: ParamScalar,
    pub a24: ParamScalar,
    pub change: [[Scalar; 2]; 2],
}

fn kind4(lines: &[DualForm]) -> Result<[&DualForm; 4]> {
    match lines {
        [a, b, c, d] => Ok([a, b, c, d]),
        _ => Err(Error::PreconditionFailed("four lines expected".into())),
    }
}

pub fn build_f4(f: &HomogeneousForm, lines: &[DualForm], policy: &TolerancePolicy) -> Result<F4Side> {
    let [l1, l2, l3, l4] = kind4(lines)?;
    let (pencil, basis, q) = pencil_on_line(f, [l1, l2, l3], l4, policy)?;
    let change = normalizing_change(&pencil.a[2]);
    let r4 = pencil.r.substitute(&change, policy)?;
    let a14 = pencil.a[0].substitute(&change);
    let a24 = pencil.a[1].substitute(&change);
    check(param_scalar_close(&pencil.a[2].substitute(&change), &ParamScalar::t0(), policy), "a34 = t0")?;
    let f4 = embed_param(&r4, &basis);
    let lhs = param_contract(&l1.mul(l2).mul(l3), &f4)?;
    let rhs = ParamForm::from_product(&a14.mul(&a24).mul(&ParamScalar::t0()).scale(&s240()), &q);
    check(lhs.approx_eq(&rhs, policy), "(f4)")?;
    Ok(F4Side {
        pencil,
        basis,
        f4,
        a14,
        a24,
        change,
    })
}

#[derive(Clone, Debug)]
pub struct F3Side {
    pub pencil: RankTwoPencil,
    pub basis: [HomogeneousForm; 2],
    pub f3: ParamForm,
    pub a13: ParamScalar,
    pub a23: ParamScalar,
    /// The matching change of t-parameters.
    pub change: [[Scalar; 2]; 2],
}

/// 240·t⁰·(l¹l² ⌟ f) − (l¹l² ⌟ f4)/(a¹⁴a²⁴).
pub fn matching_target(
    f: &HomogeneousForm,
    lines: &[DualForm],
    f4: &F4Side,
    policy: &TolerancePolicy,
) -> Result<ParamForm> {
    let [l1, l2, _, _] = kind4(lines)?;
    let l12 = l1.mul(l2);
    let f4p = param_contract(&l12, &f4.f4)?.exact_divide(&f4.a14.mul(&f4.a24), policy)?;
    Ok(ParamForm::from_product(&ParamScalar::t0().scale(&s240()), &contract(&l12, f)?).sub(&f4p))
}

/// The 2×2 change M with `r ∘ M = target` for t-linear families.
pub fn solve_change(r: &ParamForm, target: &ParamForm, policy: &TolerancePolicy) -> Result<[[Scalar; 2]; 2]> {
    if r.t_degree() != 1 || target.t_degree() != 1 {
        return Err(Error::PreconditionFailed("t-linear families expected".into()));
    }
    let a = Matrix::from_cols(vec![r.row(0).coeffs().to_vec(), r.row(1).coeffs().to_vec()]);
    let mut m = [[Scalar::zero(), Scalar::zero()], [Scalar::zero(), Scalar::zero()]];
    for col in 0..2 {
        let sol = linalg::solve(&a, target.row(col).coeffs(), policy).ok_or_else(|| ident("matching system"))?;
        if !sol.kernel.is_empty() {
            return Err(Error::SingularChange);
        }
        m[0][col] = sol.particular[0].clone();
        m[1][col] = sol.particular[1].clone();
    }
    Ok(m)
}

pub fn build_f3_matched(
    f: &HomogeneousForm,
    lines: &[DualForm],
    f4: &F4Side,
    policy: &TolerancePolicy,
) -> Result<F3Side> {
    let [l1, l2, l3, l4] = kind4(lines)?;
    let (pencil, basis, _) = pencil_on_line(f, [l1, l2, l4], l3, policy)?;
    let rq = embed_param(&pencil.r_quotient(&[0, 1], policy)?, &basis);
    let target = matching_target(f, lines, f4, policy)?;
    check(param_contract(l3, &target)?.is_negligible(target.norm() * 8.0, policy), "l3 ⌟ f'3 = 0")?;
    let l124 = l1.mul(l2).mul(l4);
    let fp3 = ParamForm::from_product(&ParamScalar::t0().scale(&s240()), &contract(&l124, f)?);
    check(param_contract(l4, &target)?.approx_eq(&fp3, policy), "(fp3)")?;
    let change = solve_change(&rq, &target, policy)?;
    let r3 = pencil.r.substitute(&change, policy)?;
    let a13 = pencil.a[0].substitute(&change);
    let a23 = pencil.a[1].substitute(&change);
    check(param_scalar_close(&pencil.a[2].substitute(&change), &ParamScalar::t0(), policy), "a43 = t0")?;
    let f3 = embed_param(&r3, &basis);
    let matched = param_contract(&l1.mul(l2), &f3)?.exact_divide(&a13.mul(&a23), policy)?;
    check(matched.approx_eq(&target, policy), "matched quotient")?;
    Ok(F3Side {
        pencil,
        basis,
        f3,
        a13,
        a23,
        change,
    })
}

#[derive(Clone, Debug)]
pub struct Assembled {
    pub g: ParamForm,
    pub f34: ParamForm,
    pub f12: ParamForm,
    /// a¹³a²³a¹⁴a²⁴.
    pub a_all: ParamScalar,
}

pub fn assemble(
    f: &HomogeneousForm,
    lines: &[DualForm],
    f3: &F3Side,
    f4: &F4Side,
    policy: &TolerancePolicy,
) -> Result<Assembled> {
    let [l1, l2, _, _] = kind4(lines)?;
    let a1424 = f4.a14.mul(&f4.a24);
    let a1323 = f3.a13.mul(&f3.a23);
    let a_all = a1323.mul(&a1424);
    let g = f3.f3.mul_scalar(&a1424).add(&f4.f4.mul_scalar(&a1323));
    let top = g.row(g.t_degree());
    check(top.is_negligible(g.norm() * g.grid_size() as f64, policy), "(Erase)")?;
    let f34 = g.exact_divide(&ParamScalar::t0(), policy).map_err(|_| ident("(Erase)"))?;
    let full = ParamForm::from_product(&a_all.scale(&s240()), f);
    let f12 = full.sub(&f34);
    let l12 = l1.mul(l2);
    let g12 = ParamForm::from_product(&a_all.mul(&ParamScalar::t0()).scale(&s240()), &contract(&l12, f)?);
    check(param_contract(&l12, &g)?.approx_eq(&g12, policy), "(g12)")?;
    let c = param_contract(&l12, &f12)?;
    check(c.is_negligible(full.norm() * full.grid_size() as f64 * 40.0, policy), "(f12)")?;
    let lhs = ParamForm::from_product(&a_all.mul(&ParamScalar::t0()).scale(&s240()), f);
    let rhs = f12
        .mul_scalar(&ParamScalar::t0())
        .add(&f3.f3.mul_scalar(&a1424))
        .add(&f4.f4.mul_scalar(&a1323));
    check(lhs.approx_eq(&rhs, policy), "(F1234)")?;
    Ok(Assembled { g, f34, f12, a_all })
}

/// Pieces at a sampled parameter, scaled so that they add up to f.
#[derive(Clone, Debug)]
pub struct Sample {
    pub lambda: Scalar,
    pub mu: Scalar,
    pub f12: HomogeneousForm,
    pub f3: HomogeneousForm,
    pub f4: HomogeneousForm,
    pub draws: usize,
}

fn nonzero_at(a: &ParamScalar, l: &Scalar, m: &Scalar, policy: &TolerancePolicy) -> bool {
    let v = a.eval(l, m);
    let scale = a.norm() * l.magnitude().max(m.magnitude()).powi(a.degree() as i32);
    !(v.is_exact_zero() || (!v.is_exact() && policy.negligible(v.magnitude(), scale)))
}

fn restricted_rank(g: &HomogeneousForm, l: &DualForm, policy: &TolerancePolicy) -> Result<usize> {
    if g.is_exact_zero() || g.norm() == 0.0 {
        return Ok(0);
    }
    let (b, _) = restrict_to_line(g, l, policy)?;
    binary_rank(&b, policy)
}

pub fn choose_sample(
    f: &HomogeneousForm,
    lines: &[DualForm],
    f3: &F3Side,
    f4: &F4Side,
    asm: &Assembled,
    rng: &mut Rng,
    max_retries: usize,
    policy: &TolerancePolicy,
) -> Result<Sample> {
    let [_, _, l3, l4] = kind4(lines)?;
    for draw in 1..=max_retries {
        let lambda = Scalar::from_int(nonzero_int(rng, 20));
        let mu = Scalar::from_int(int(rng, 20));
        let all = [&f3.a13, &f3.a23, &f4.a14, &f4.a24];
        if !all.iter().all(|a| nonzero_at(a, &lambda, &mu, policy)) {
            continue;
        }
        let c = &asm.a_all.eval(&lambda, &mu) * &s240();
        let cl = &c * &lambda;
        let f12 = asm.f12.evaluate(&lambda, &mu).scale(&c.recip());
        let w3 = &f4.a14.mul(&f4.a24).eval(&lambda, &mu) / &cl;
        let w4 = &f3.a13.mul(&f3.a23).eval(&lambda, &mu) / &cl;
        let p3 = f3.f3.evaluate(&lambda, &mu).scale(&w3);
        let p4 = f4.f4.evaluate(&lambda, &mu).scale(&w4);
        if restricted_rank(&p3, l3, policy)? != 2 || restricted_rank(&p4, l4, policy)? != 2 {
            continue;
        }
        check(f12.add(&p3).add(&p4).approx_eq(f, policy), "(F1234) at the sample")?;
        return Ok(Sample {
            lambda,
            mu,
            f12,
            f3: p3,
            f4: p4,
            draws: draw,
        });
    }
    Err(Error::RetriesExhausted {
        stage: "sample",
        attempts: max_retries,
    })
}

/// f = g₁ + g₂ with lⁱ ⌟ gᵢ = 0, free directions set to zero.
pub fn split_two(
    f: &HomogeneousForm,
    l1: &DualForm,
    l2: &DualForm,
    policy: &TolerancePolicy,
) -> Result<(HomogeneousForm, HomogeneousForm)> {
    let d = f.degree();
    let mons = monomials(2, d);
    let bases = [line_basis(l1)?, line_basis(l2)?];
    let mut cols = Vec::new();
    for b in &bases {
        for e in &mons {
            let m: HomogeneousForm = Poly::monomial(2, *e, Scalar::one());
            cols.push(embed_from_line(&m, b).coeffs().to_vec());
        }
    }
    let sol = linalg::solve(&Matrix::from_cols(cols), f.coeffs(), policy)
        .ok_or_else(|| Error::CertificationViolated("form is not a sum of the two line pieces".into()))?;
    let n = mons.len();
    let g1: HomogeneousForm = Poly::new(2, d, sol.particular[..n].to_vec())?;
    let g2: HomogeneousForm = Poly::new(2, d, sol.particular[n..].to_vec())?;
    Ok((embed_from_line(&g1, &bases[0]), embed_from_line(&g2, &bases[1])))
}

#[derive(Clone, Debug)]
pub struct F12Split {
    pub f1: HomogeneousForm,
    pub f2: HomogeneousForm,
    pub nu: Scalar,
    pub ranks: [usize; 2],
    pub draws: usize,
}

fn power_of_two(k: i32) -> Scalar {
    let p = Scalar::from_int(2).pow(k.unsigned_abs());
    if k < 0 {
        p.recip()
    } else {
        p
    }
}

pub fn split_f12(
    f12: &HomogeneousForm,
    l1: &DualForm,
    l2: &DualForm,
    rng: &mut Rng,
    max_retries: usize,
    policy: &TolerancePolicy,
) -> Result<F12Split> {
    let scale = f12.norm();
    let zero_by = |p: &DualForm| contract(p, f12).map(|c| c.is_negligible(scale * 5.0 * 3.0, policy));
    if !zero_by(&l1.mul(l2))? {
        return Err(Error::CertificationViolated("l1 l2 ⌟ f12 ≠ 0".into()));
    }
    if zero_by(l1)? || zero_by(l2)? {
        return Err(Error::CertificationViolated("a line annihilates f12".into()));
    }
    let (g1, g2) = split_two(f12, l1, l2, policy)?;
    let v5 = intersection_point(l1, l2).pow(5);
    let k = (scale / v5.norm()).log2().round() as i32;
    let unit = power_of_two(k);
    let mut best: Option<F12Split> = None;
    for draw in 0..max_retries {
        let nu = if draw == 0 {
            Scalar::zero()
        } else {
            &Scalar::from_int(nonzero_int(rng, 16)) * &unit
        };
        let f1 = g1.add(&v5.scale(&nu));
        let f2 = g2.sub(&v5.scale(&nu));
        let ranks = [restricted_rank(&f1, l1, policy)?, restricted_rank(&f2, l2, policy)?];
        let cand = F12Split {
            f1,
            f2,
            nu,
            ranks,
            draws: draw + 1,
        };
        if ranks[0] <= 3 && ranks[1] <= 3 {
            return Ok(cand);
        }
        if ranks[0] + ranks[1] <= 6 && best.is_none() {
            best = Some(cand);
        }
    }
    best.ok_or(Error::RetriesExhausted {
        stage: "split f12",
        attempts: max_retries,
    })
}

/// Binary decomposition of a piece living on the line `l`, embedded back.
fn piece_terms(
    g: &HomogeneousForm,
    l: &DualForm,
    policy: &TolerancePolicy,
) -> Result<Vec<(Scalar, HomogeneousForm)>> {
    if g.is_exact_zero() || g.norm() == 0.0 {
        return Ok(Vec::new());
    }
    let (b, basis) = restrict_to_line(g, l, policy)?;
    let dec = binary_decompose(&b, policy)?;
    Ok(dec
        .terms
        .into_iter()
        .map(|(c, lin)| {
            let k = lin.linear_coeffs();
            (c, basis[0].scale(&k[0]).add(&basis[1].scale(&k[1])))
        })
        .collect())
}

/// Everything the four-line route produced.
#[derive(Clone, Debug)]
pub struct DecompState {
    pub f4: F4Side,
    pub f3: F3Side,
    pub assembled: Assembled,
    pub sample: Sample,
    pub split: F12Split,
}

pub fn run_kind4(
    f: &HomogeneousForm,
    lines: &[DualForm],
    rng: &mut Rng,
    max_retries: usize,
    policy: &TolerancePolicy,
) -> Result<DecompState> {
    let f4 = build_f4(f, lines, policy)?;
    let f3 = build_f3_matched(f, lines, &f4, policy)?;
    let assembled = assemble(f, lines, &f3, &f4, policy)?;
    let mut last = Error::RetriesExhausted {
        stage: "sample",
        attempts: 0,
    };
    for _ in 0..4 {
        let sample = choose_sample(f, lines, &f3, &f4, &assembled, rng, max_retries, policy)?;
        match split_f12(&sample.f12, &lines[0], &lines[1], rng, max_retries, policy) {
            Ok(split) => {
                return Ok(DecompState {
                    f4,
                    f3,
                    assembled,
                    sample,
                    split,
                })
            }
            Err(e) => last = e,
        }
    }
    Err(last)
}

fn sigma_columns(lines: &[&DualForm]) -> Result<(Matrix, Vec<[HomogeneousForm; 2]>)> {
    let mons = monomials(2, 5);
    let mut cols = Vec::new();
    let mut bases = Vec::new();
    for l in lines {
        let b = line_basis(l)?;
        for e in &mons {
            let m: HomogeneousForm = Poly::monomial(2, *e, Scalar::one());
            cols.push(embed_from_line(&m, &b).coeffs().to_vec());
        }
        bases.push(b);
    }
    Ok((Matrix::from_cols(cols), bases))
}

fn binary_piece(v: &[Scalar], i: usize) -> HomogeneousForm {
    Poly::new(2, 5, v[6 * i..6 * i + 6].to_vec()).unwrap()
}

fn binary_rank0(g: &HomogeneousForm, policy: &TolerancePolicy) -> Result<usize> {
    if g.is_exact_zero() || g.norm() == 0.0 {
        return Ok(0);
    }
    binary_rank(g, policy)
}

fn combine(base: &[Scalar], dirs: &[Vec<Scalar>], w: &[Scalar]) -> Vec<Scalar> {
    let mut v = base.to_vec();
    for (c, d) in w.iter().zip(dirs) {
        for (x, y) in v.iter_mut().zip(d) {
            *x += &(c * y);
        }
    }
    v
}

#[derive(Clone, Debug)]
pub struct Kind3Pieces {
    /// Binary quintics in the canonical bases of the three lines.
    pub pieces: [HomogeneousForm; 3],
    pub bases: Vec<[HomogeneousForm; 2]>,
    pub ranks: [usize; 3],
    pub guided: bool,
    pub draws: usize,
}

/// f = g₁ + g₂ + g₃ with lⁱ ⌟ gᵢ = 0 and ranks at most 4, 3, 3.
pub fn run_kind3(
    f: &HomogeneousForm,
    lines: &[DualForm],
    seed: u64,
    rng: &mut Rng,
    max_retries: usize,
    policy: &TolerancePolicy,
) -> Result<Kind3Pieces> {
    let [l1, l2, l3] = match lines {
        [a, b, c] => [a, b, c],
        _ => return Err(Error::PreconditionFailed("three lines expected".into())),
    };
    let (sigma, bases) = sigma_columns(&[l1, l2, l3])?;
    let sol = linalg::solve(&sigma, f.coeffs(), policy)
        .ok_or_else(|| Error::CertificationViolated("l1 l2 l3 ⌟ f ≠ 0".into()))?;
    let ranks_of = |v: &[Scalar]| -> Result<[usize; 3]> {
        Ok([
            binary_rank0(&binary_piece(v, 0), policy)?,
            binary_rank0(&binary_piece(v, 1), policy)?,
            binary_rank0(&binary_piece(v, 2), policy)?,
        ])
    };
    let done = |v: Vec<Scalar>, ranks: [usize; 3], guided: bool, draws: usize| Kind3Pieces {
        pieces: [binary_piece(&v, 0), binary_piece(&v, 1), binary_piece(&v, 2)],
        bases: bases.clone(),
        ranks,
        guided,
        draws,
    };
    let mut draws = 0;

    // Guided: pin the third piece to a rank-3 element of W_{p,t}, t = l¹l² ⌟ f.
    let l12 = l1.mul(l2);
    let t = contract(&l12, f)?;
    if let Ok((tb, b3)) = restrict_to_line(&t, l3, policy) {
        let p = restrict_dual(&l12, &b3);
        if let Ok(target) = rank3_element(&p, &tb, seed, max_retries, policy) {
            // unknowns (τ, c₁…c_k, s): third piece of τ·v₀ + Σcκ equals s·target
            let mut cols: Vec<Vec<Scalar>> = vec![sol.particular[12..18].to_vec()];
            for k in &sol.kernel {
                cols.push(k[12..18].to_vec());
            }
            cols.push(target.coeffs().iter().map(|x| -x).collect());
            let fiber = linalg::kernel(&Matrix::from_cols(cols), policy);
            for _ in 0..max_retries / 2 {
                if fiber.is_empty() {
                    break;
                }
                draws += 1;
                let w = crate::random::int_combination(rng, &fiber, 9);
                if w[0].is_zero(policy) {
                    continue;
                }
                let inv = w[0].recip();
                let coef: Vec<Scalar> = w[1..=sol.kernel.len()].iter().map(|c| c * &inv).collect();
                let v = combine(&sol.particular, &sol.kernel, &coef);
                let r = ranks_of(&v)?;
                if r[0] <= 4 && r[1] <= 3 && r[2] <= 3 {
                    return Ok(done(v, r, true, draws));
                }
            }
        }
    }

    // Plain sampling in W.
    for draw in 0..max_retries {
        draws += 1;
        let coef: Vec<Scalar> = if draw == 0 || sol.kernel.is_empty() {
            vec![Scalar::zero(); sol.kernel.len()]
        } else {
            (0..sol.kernel.len()).map(|_| Scalar::from_int(int(rng, 9))).collect()
        };
        let v = combine(&sol.particular, &sol.kernel, &coef);
        let r = ranks_of(&v)?;
        let mut sorted = r;
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        if sorted[0] <= 4 && sorted[1] <= 3 && sorted[2] <= 3 {
            return Ok(done(v, r, false, draws));
        }
    }
    Err(Error::RetriesExhausted {
        stage: "three-line split",
        attempts: draws,
    })
}

/// Relative residual of a decomposition against f.
pub fn verify(f: &HomogeneousForm, dec: &WaringDecomposition) -> Result<f64> {
    if dec.degree != f.degree() {
        return Err(Error::DegreeMismatch(format!(
            "decomposition has degree {}, form has degree {}",
            dec.degree,
            f.degree()
        )));
    }
    if dec.terms.iter().any(|(_, l)| l.nvars() != f.nvars() || l.degree() != 1) {
        return Err(Error::VarsMismatch("term shape does not match the form".into()));
    }
    Ok(residual(f, &dec.terms))
}

fn embed_terms(dec: WaringDecomposition, basis: &[HomogeneousForm; 2]) -> Vec<(Scalar, HomogeneousForm)> {
    dec.terms
        .into_iter()
        .map(|(c, lin)| {
            let k = lin.linear_coeffs();
            (c, basis[0].scale(&k[0]).add(&basis[1].scale(&k[1])))
        })
        .collect()
}

fn fmt_ranks(r: &[usize]) -> String {
    r.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

fn attempt(f: &HomogeneousForm, seed: u64, opts: &DecomposeOptions) -> Result<Decomposition> {
    let policy = &opts.policy;
    let cfg = refine_configuration(f, seed, opts.max_retries, policy).map_err(|e| e.at_stage("configuration", seed))?;
    let mut rng = rng_from_seed(seed ^ 0x5DEE_CE66_D1CE_4E5B);
    let mut report = RunReport::default();
    report.push("seed", seed);
    report.push("precision", policy.precision_bits);
    report.push("kind", cfg.kind);
    report.push("configuration_retries", cfg.retries);
    let mut terms = Vec::new();
    match cfg.kind {
        2 => {
            let (g1, g2) = split_two(f, &cfg.lines[0], &cfg.lines[1], policy).map_err(|e| e.at_stage("two-line split", seed))?;
            let mut ranks = Vec::new();
            for (g, l) in [(&g1, &cfg.lines[0]), (&g2, &cfg.lines[1])] {
                let t = piece_terms(g, l, policy).map_err(|e| e.at_stage("binary pieces", seed))?;
                ranks.push(t.len());
                terms.extend(t);
            }
            report.push("piece_ranks", fmt_ranks(&ranks));
        }
        3 => {
            let k3 = run_kind3(f, &cfg.lines, seed, &mut rng, opts.max_retries, policy)
                .map_err(|e| e.at_stage("three-line split", seed))?;
            report.push("guided", k3.guided);
            report.push("split_draws", k3.draws);
            report.push("piece_ranks", fmt_ranks(&k3.ranks));
            for i in 0..3 {
                if k3.ranks[i] == 0 {
                    continue;
                }
                let dec = binary_decompose(&k3.pieces[i], policy).map_err(|e| e.at_stage("binary pieces", seed))?;
                terms.extend(embed_terms(dec, &k3.bases[i]));
            }
        }
        4 => {
            let st = run_kind4(f, &cfg.lines, &mut rng, opts.max_retries, policy)
                .map_err(|e| e.at_stage("four-line route", seed))?;
            report.push("sample", format!("{} {}", st.sample.lambda, st.sample.mu));
            report.push("sample_draws", st.sample.draws);
            report.push("nu", &st.split.nu);
            report.push("nu_draws", st.split.draws);
            let pieces = [
                (&st.split.f1, &cfg.lines[0]),
                (&st.split.f2, &cfg.lines[1]),
                (&st.sample.f3, &cfg.lines[2]),
                (&st.sample.f4, &cfg.lines[3]),
            ];
            let mut ranks = Vec::new();
            for (g, l) in pieces {
                let t = piece_terms(g, l, policy).map_err(|e| e.at_stage("binary pieces", seed))?;
                ranks.push(t.len());
                terms.extend(t);
            }
            report.push("piece_ranks", fmt_ranks(&ranks));
        }
        k => return Err(Error::PreconditionFailed(format!("unexpected configuration kind {k}"))),
    }
    let mut dec = WaringDecomposition {
        terms,
        degree: 5,
        residual: 0.0,
    };
    dec.merge_proportional(policy);
    dec.residual = verify(f, &dec)?;
    report.push("terms", dec.len());
    report.push("residual", format!("{:e}", dec.residual));
    if dec.len() > MAX_TERMS {
        return Err(Error::CertificationViolated(format!("{} terms", dec.len())).at_stage("verify", seed));
    }
    if dec.residual > policy.zero_threshold {
        return Err(Error::CertificationViolated(format!("residual {:e}", dec.residual)).at_stage("verify", seed));
    }
    report.push("status", "ok");
    Ok(Decomposition {
        decomposition: dec,
        configuration: cfg,
        report,
    })
}

fn round_seed(seed: u64, round: u64) -> u64 {
    seed.wrapping_add(round.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// At most ten fifth powers summing to f, verified by re-expansion.
pub fn decompose_ternary_quintic(f: &HomogeneousForm, opts: &DecomposeOptions) -> Result<Decomposition> {
    if f.nvars() != 3 {
        return Err(Error::VarsMismatch("ternary quintic expected".into()));
    }
    if f.degree() != 5 {
        return Err(Error::DegreeMismatch(format!("quintic expected, got degree {}", f.degree())));
    }
    if f.is_exact_zero() || f.norm() == 0.0 {
        return Err(Error::ZeroForm);
    }
    let mut last = None;
    for round in 0..OUTER_ROUNDS {
        match attempt(f, round_seed(opts.seed, round), opts) {
            Ok(mut d) => {
                d.report.entries.insert(0, ("rounds".into(), (round + 1).to_string()));
                return Ok(d);
            }
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap())
}

#[cfg(test)]
mod tests;
