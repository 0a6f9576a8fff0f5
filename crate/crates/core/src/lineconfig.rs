//! Configurations of two, three or four lines whose product annihilates a
//! ternary quintic, with the nonvanishing conditions the decomposition
//! relies on, and the search that produces them.

use std::fmt;

use crate::apolarity::{
    apolar_part, binary_roots, find_kernel_line_in_pencil, is_squarefree, power_class,
    proportional, PowerClass,
};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::poly::{
    contract, contraction_scale, line_basis, monomials, restrict_dual, restrict_to_line, DualForm,
    HomogeneousForm, ParamScalar, Poly,
};
use crate::random::{int, int_line, nonzero_int, rng_from_seed, Rng};
use crate::ranklocus::factor_quadratic;
use crate::scalar::{Scalar, TolerancePolicy};

/// Random re-draws tried before a deterministic repair.
const RANDOM_MOVES: usize = 3;
const MAX_REPAIR_DEPTH: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct CertEntry {
    pub condition: String,
    pub holds: bool,
}

#[derive(Clone, Debug)]
pub struct LineConfiguration {
    /// Number of lines, 2, 3 or 4.
    pub kind: usize,
    pub lines: Vec<DualForm>,
    pub certificate: Vec<CertEntry>,
    /// Random draws and repair steps spent by the search.
    pub retries: usize,
}

impl LineConfiguration {
    pub fn holds(&self) -> bool {
        self.certificate.iter().all(|c| c.holds)
    }

    /// Recompute every condition from scratch against `f`.
    pub fn recheck(&self, f: &HomogeneousForm, policy: &TolerancePolicy) -> Result<bool> {
        Ok(certify(f, &self.lines, policy)?.iter().all(|c| c.holds))
    }
}

impl fmt::Display for LineConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "kind = {}", self.kind)?;
        for (i, l) in self.lines.iter().enumerate() {
            write!(f, "l{} =", i + 1)?;
            for c in l.coeffs() {
                write!(f, " {c}")?;
            }
            writeln!(f)?;
        }
        for c in &self.certificate {
            writeln!(f, "check = {} : {}", c.condition, if c.holds { "ok" } else { "FAILED" })?;
        }
        writeln!(f, "retries = {}", self.retries)
    }
}

fn product(lines: &[&DualForm]) -> DualForm {
    lines.iter().fold(Poly::one(3), |acc, l| acc.mul(l))
}

fn class_of(f: &HomogeneousForm, lines: &[&DualForm], policy: &TolerancePolicy) -> PowerClass {
    let p = product(lines);
    let c = contract(&p, f).expect("ternary shapes");
    power_class(&c, contraction_scale(&p, f), policy)
}

fn contracted(f: &HomogeneousForm, lines: &[&DualForm]) -> HomogeneousForm {
    contract(&product(lines), f).expect("ternary shapes")
}

fn vanishes(f: &HomogeneousForm, lines: &[&DualForm], policy: &TolerancePolicy) -> bool {
    class_of(f, lines, policy) == PowerClass::Zero
}

fn pairwise_distinct(lines: &[DualForm], policy: &TolerancePolicy) -> bool {
    for i in 0..lines.len() {
        if lines[i].is_exact_zero() || lines[i].norm() == 0.0 {
            return false;
        }
        for j in 0..i {
            if proportional(&lines[i], &lines[j], policy) {
                return false;
            }
        }
    }
    true
}

fn label(idx: &[usize]) -> String {
    idx.iter().map(|i| format!("l{}", i + 1)).collect::<Vec<_>>().join(" ")
}

/// Evaluate the conditions of the configuration type given by `lines.len()`.
pub fn certify(
    f: &HomogeneousForm,
    lines: &[DualForm],
    policy: &TolerancePolicy,
) -> Result<Vec<CertEntry>> {
    if f.nvars() != 3 {
        return Err(Error::VarsMismatch("ternary form expected".into()));
    }
    if lines.iter().any(|l| l.nvars() != 3 || l.degree() != 1) {
        return Err(Error::VarsMismatch("ternary dual lines expected".into()));
    }
    let class = |idx: &[usize]| {
        let ls: Vec<&DualForm> = idx.iter().map(|&i| &lines[i]).collect();
        class_of(f, &ls, policy)
    };
    let mut out = Vec::new();
    let all: Vec<usize> = (0..lines.len()).collect();
    out.push(CertEntry {
        condition: format!("{} ⌟ f = 0", label(&all)),
        holds: class(&all) == PowerClass::Zero,
    });
    let general = |idx: &[usize], what: &str| CertEntry {
        condition: format!("{} ⌟ f is not a {what}", label(idx)),
        holds: class(idx) == PowerClass::General,
    };
    let nonzero = |idx: &[usize]| CertEntry {
        condition: format!("{} ⌟ f ≠ 0", label(idx)),
        holds: class(idx) != PowerClass::Zero,
    };
    match lines.len() {
        2 => {}
        3 => {
            out.push(general(&[0, 2], "cube"));
            out.push(general(&[0, 1], "cube"));
            out.push(nonzero(&[1, 2]));
        }
        4 => {
            out.push(general(&[0, 1, 2], "square"));
            out.push(general(&[0, 1, 3], "square"));
            out.push(nonzero(&[0, 2, 3]));
            out.push(nonzero(&[1, 2, 3]));
        }
        n => {
            return Err(Error::PreconditionFailed(format!("configurations have 2 to 4 lines, got {n}")));
        }
    }
    out.push(CertEntry {
        condition: "lines pairwise distinct".into(),
        holds: pairwise_distinct(lines, policy),
    });
    Ok(out)
}

fn normalize(l: &DualForm) -> DualForm {
    if l.is_exact() {
        return l.clone();
    }
    let c = l.coeffs();
    let mut k = 0;
    for i in 1..c.len() {
        if c[i].magnitude() > c[k].magnitude() {
            k = i;
        }
    }
    l.scale(&c[k].recip())
}

fn cross(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    vec![
        &(&a[1] * &b[2]) - &(&a[2] * &b[1]),
        &(&a[2] * &b[0]) - &(&a[0] * &b[2]),
        &(&a[0] * &b[1]) - &(&a[1] * &b[0]),
    ]
}

/// The point of ℙ(S₁) where two lines meet.
pub fn intersection_point(a: &DualForm, b: &DualForm) -> HomogeneousForm {
    HomogeneousForm::linear(&cross(&a.linear_coeffs(), &b.linear_coeffs()))
}

/// Symmetric matrix of a ternary dual quadric.
fn conic_matrix(q: &DualForm) -> Matrix {
    let mut m = Matrix::zeros(3, 3);
    let half = Scalar::ratio(1, 2);
    for i in 0..3 {
        for j in 0..3 {
            let mut e = [0usize; 3];
            e[i] += 1;
            e[j] += 1;
            let c = q.coeff(&e).clone();
            m.set(i, j, if i == j { c } else { &c * &half });
        }
    }
    m
}

/// Two distinct lines whose product is proportional to `q`, if `q` splits so.
pub fn split_conic(q: &DualForm, rng: &mut Rng, policy: &TolerancePolicy) -> Option<[DualForm; 2]> {
    assert!(q.nvars() == 3 && q.degree() == 2);
    if q.is_exact_zero() {
        return None;
    }
    let a = conic_matrix(q);
    if linalg::rank(&a, policy) != 2 {
        return None;
    }
    let p = linalg::kernel(&a, policy).into_iter().next()?;
    let pn = p.iter().map(Scalar::magnitude).fold(0.0, f64::max);
    for _ in 0..8 {
        let b: Vec<Scalar> = (0..3).map(|_| Scalar::from_int(int(rng, 9))).collect();
        let c: Vec<Scalar> = (0..3).map(|_| Scalar::from_int(int(rng, 9))).collect();
        // the line through b and c must miss the singular point
        let bc = cross(&b, &c);
        let det = bc.iter().zip(&p).fold(Scalar::zero(), |acc, (x, y)| &acc + &(x * y));
        let bcn = bc.iter().map(Scalar::magnitude).fold(0.0, f64::max);
        if det.is_exact_zero() || (!det.is_exact() && policy.negligible(det.magnitude(), bcn * pn)) {
            continue;
        }
        let qb = q.eval(&b);
        let qc = q.eval(&c);
        let sum: Vec<Scalar> = b.iter().zip(&c).map(|(x, y)| x + y).collect();
        let mixed = &(&q.eval(&sum) - &qb) - &qc;
        let g: DualForm = Poly::new(2, 2, vec![qb, mixed, qc]).ok()?;
        if g.is_exact_zero() || (!g.is_exact() && g.norm() <= policy.zero_threshold * q.norm() * 300.0) {
            continue;
        }
        let roots = binary_roots(&g, policy).ok()?;
        let lines: Vec<DualForm> = roots
            .iter()
            .map(|r| {
                let rc = r.linear_coeffs();
                let pt: Vec<Scalar> = b.iter().zip(&c).map(|(x, y)| &(x * &rc[0]) + &(y * &rc[1])).collect();
                normalize(&DualForm::linear(&cross(&p, &pt)))
            })
            .collect();
        if lines.len() != 2 || !pairwise_distinct(&lines, policy) {
            return None;
        }
        if !proportional(&lines[0].mul(&lines[1]), q, policy) {
            return None;
        }
        return Some([lines[0].clone(), lines[1].clone()]);
    }
    None
}

/// det(t⁰A + t¹B) for the pencil spanned by two conics, as a binary cubic.
fn pencil_discriminant(a: &DualForm, b: &DualForm) -> DualForm {
    let (ma, mb) = (conic_matrix(a), conic_matrix(b));
    let e = |i: usize, j: usize| ParamScalar::linear(ma.get(i, j).clone(), mb.get(i, j).clone());
    let minor = |i: usize, j: usize, k: usize, l: usize| e(i, k).mul(&e(j, l)).sub(&e(i, l).mul(&e(j, k)));
    let det = e(0, 0)
        .mul(&minor(1, 2, 1, 2))
        .sub(&e(0, 1).mul(&minor(1, 2, 0, 2)))
        .add(&e(0, 2).mul(&minor(1, 2, 0, 1)));
    Poly::new(2, 3, det.coeffs().to_vec()).unwrap()
}

/// The singular members of the pencil ⟨a, b⟩.
fn singular_members(a: &DualForm, b: &DualForm, policy: &TolerancePolicy) -> Vec<DualForm> {
    let disc = pencil_discriminant(a, b);
    let scale = a.norm().max(b.norm()).powi(3) * 6.0;
    if disc.is_negligible(scale, policy) {
        return vec![a.clone(), b.clone(), a.add(b)];
    }
    let Ok(roots) = binary_roots(&disc, policy) else {
        return Vec::new();
    };
    let mut out: Vec<DualForm> = Vec::new();
    for r in roots {
        let c = r.linear_coeffs();
        let m = a.scale(&c[0]).add(&b.scale(&c[1]));
        if !out.iter().any(|x| proportional(x, &m, policy)) {
            out.push(m);
        }
    }
    out
}

fn random_member(rng: &mut Rng, basis: &[DualForm]) -> DualForm {
    loop {
        let mut acc = Poly::zero(basis[0].nvars(), basis[0].degree());
        for b in basis {
            acc = acc.add(&b.scale(&Scalar::from_int(int(rng, 9))));
        }
        if !acc.is_exact_zero() {
            return acc;
        }
    }
}

/// A reducible quadric with distinct factors in Ker f_{2,3}.
fn kind_two_probe(f: &HomogeneousForm, rng: &mut Rng, policy: &TolerancePolicy) -> Option<[DualForm; 2]> {
    let ker = apolar_part(f, 2, policy);
    for q in &ker {
        if let Some(ls) = split_conic(q, rng, policy) {
            return Some(ls);
        }
    }
    for i in 0..ker.len() {
        for j in 0..i {
            for q in singular_members(&ker[i], &ker[j], policy) {
                if let Some(ls) = split_conic(&q, rng, policy) {
                    return Some(ls);
                }
            }
        }
    }
    None
}

#[derive(Clone, Debug)]
pub enum SplitOutcome {
    /// Four distinct lines, product annihilating f.
    Four([DualForm; 4]),
    /// Two distinct lines already annihilating f.
    Two([DualForm; 2]),
}

/// Four distinct lines l¹…l⁴ with l¹l²l³l⁴ ⌟ f = 0: l¹, l² are drawn at random
/// and l³l⁴ is a singular conic in the kernel of q ↦ l¹l²q ⌟ f.
pub fn find_apolar_split_quartic(
    f: &HomogeneousForm,
    seed: u64,
    max_retries: usize,
    policy: &TolerancePolicy,
) -> Result<(SplitOutcome, usize)> {
    check_quintic(f)?;
    let mut rng = rng_from_seed(seed);
    let mut attempts = 0;
    let out = split_quartic(f, &mut rng, &mut attempts, max_retries, policy)?;
    Ok((out, attempts))
}

fn split_quartic(
    f: &HomogeneousForm,
    rng: &mut Rng,
    attempts: &mut usize,
    max_retries: usize,
    policy: &TolerancePolicy,
) -> Result<SplitOutcome> {
    let quadrics = monomials(3, 2);
    while *attempts < max_retries {
        *attempts += 1;
        let l1 = int_line(rng, 3, 5);
        let l2 = int_line(rng, 3, 5);
        if proportional(&l1, &l2, policy) {
            continue;
        }
        if vanishes(f, &[&l1, &l2], policy) {
            return Ok(SplitOutcome::Two([l1, l2]));
        }
        let p12 = l1.mul(&l2);
        let cols: Vec<Vec<Scalar>> = quadrics
            .iter()
            .map(|e| {
                let m: DualForm = Poly::monomial(3, *e, Scalar::one());
                contract(&p12.mul(&m), f).unwrap().coeffs().to_vec()
            })
            .collect();
        let n: Vec<DualForm> = linalg::kernel(&Matrix::from_cols(cols), policy)
            .into_iter()
            .map(|v| Poly::new(3, 2, v).unwrap())
            .collect();
        if n.len() < 2 {
            continue;
        }
        let a = random_member(rng, &n);
        let b = random_member(rng, &n);
        if proportional(&a, &b, policy) {
            continue;
        }
        for q in singular_members(&a, &b, policy) {
            let Some([l3, l4]) = split_conic(&q, rng, policy) else {
                continue;
            };
            let lines = [l1.clone(), l2.clone(), l3, l4];
            if pairwise_distinct(&lines, policy) && vanishes(f, &[&lines[0], &lines[1], &lines[2], &lines[3]], policy) {
                return Ok(SplitOutcome::Four(lines));
            }
        }
    }
    Err(Error::RetriesExhausted {
        stage: "apolar split quartic",
        attempts: *attempts,
    })
}

/// A linear form w with f ∝ w^deg f, read off iterated contractions.
fn power_root(f: &HomogeneousForm) -> HomogeneousForm {
    let mut g = f.clone();
    while g.degree() > 1 {
        let mut best: Option<HomogeneousForm> = None;
        for k in 0..g.nvars() {
            let mut e = [0usize; 3];
            e[k] = 1;
            let x: DualForm = Poly::monomial(g.nvars(), e, Scalar::one());
            let c = contract(&x, &g).unwrap();
            if best.as_ref().is_none_or(|b| c.norm() > b.norm()) {
                best = Some(c);
            }
        }
        g = best.unwrap();
    }
    g
}

/// Basis of the lines through the point `v`.
fn lines_through(v: &HomogeneousForm) -> Result<[DualForm; 2]> {
    let [a, b] = line_basis(&v.to_dual())?;
    Ok([a.to_dual(), b.to_dual()])
}

fn ternary_line(c: Vec<Scalar>) -> DualForm {
    DualForm::linear(&c)
}

/// Duals U, W of the basis (u, w) of ⟨x⟩^⊥ that vanish on `x2`.
fn dual_lift_basis(basis: &[HomogeneousForm; 2], x2: &HomogeneousForm, policy: &TolerancePolicy) -> Result<[DualForm; 2]> {
    let m = Matrix::from_rows(vec![
        basis[0].linear_coeffs(),
        basis[1].linear_coeffs(),
        x2.linear_coeffs(),
    ]);
    let mut out = Vec::new();
    for k in 0..2 {
        let mut rhs = vec![Scalar::zero(); 3];
        rhs[k] = Scalar::one();
        let s = linalg::solve(&m, &rhs, policy).ok_or(Error::SingularChange)?;
        out.push(ternary_line(s.particular));
    }
    Ok([out[0].clone(), out[1].clone()])
}

/// The tangent lines of the curve p = 0 at its points on the line x = 0.
/// Needs x² ⌟ f = 0 and p ⌟ f = 0; then the product of the tangents kills f.
pub fn recap_tangent_lines(
    f: &HomogeneousForm,
    x: &DualForm,
    p: &DualForm,
    policy: &TolerancePolicy,
) -> Result<Vec<DualForm>> {
    let xx = x.mul(x);
    if !contract(&xx, f)?.is_negligible(contraction_scale(&xx, f), policy) {
        return Err(Error::PreconditionFailed("x² ⌟ f ≠ 0".into()));
    }
    if !contract(p, f)?.is_negligible(contraction_scale(p, f), policy) {
        return Err(Error::PreconditionFailed("p ⌟ f ≠ 0".into()));
    }
    let basis = line_basis(x)?;
    let pb = restrict_dual(p, &basis);
    if pb.is_negligible(p.norm(), policy) || !is_squarefree(&pb, policy) {
        return Err(Error::NonTransverse);
    }
    let mut tangents = Vec::new();
    for r in binary_roots(&pb, policy)? {
        let rc = r.linear_coeffs();
        let v = basis[0].scale(&rc[0]).add(&basis[1].scale(&rc[1]));
        let grad: Vec<Scalar> = (0..3).map(|m| p.derivative(m).eval(v.coeffs())).collect();
        let l = ternary_line(grad);
        if l.is_negligible(p.norm() * v.norm().powi(p.degree() as i32 - 1) * 3.0, policy) {
            return Err(Error::NonTransverse);
        }
        tangents.push(normalize(&l));
    }
    let refs: Vec<&DualForm> = tangents.iter().collect();
    if !vanishes(f, &refs, policy) {
        return Err(Error::InternalIdentityFailure("tangent lines do not annihilate f".into()));
    }
    Ok(tangents)
}

/// Given x¹(x²)² ⌟ f = 0, produce lines with product annihilating f: three
/// lines x¹, x², l when G = x¹x² ⌟ f is a cube, otherwise x¹ together with
/// three tangent lines l², l³, l⁴ for which x¹lⁱlʲ ⌟ f is not a square.
pub fn double_refine(
    f: &HomogeneousForm,
    x1: &DualForm,
    x2: &DualForm,
    rng: &mut Rng,
    max_tries: usize,
    policy: &TolerancePolicy,
) -> Result<Vec<DualForm>> {
    let fp = contract(x1, f)?;
    let g = contract(x2, &fp)?;
    let x12 = x1.mul(x2);
    if g.is_negligible(contraction_scale(&x12, f), policy) {
        return Ok(vec![x1.clone(), x2.clone()]);
    }
    let (gb, basis) = restrict_to_line(&g, x2, policy).map_err(|e| match e {
        Error::NotInKernel => Error::PreconditionFailed("x¹(x²)² ⌟ f ≠ 0".into()),
        e => e,
    })?;
    let c = x2.linear_coeffs();
    let mut k = 0;
    for i in 1..3 {
        if c[i].magnitude() > c[k].magnitude() {
            k = i;
        }
    }
    // x₂ with x² ⌟ x₂ = 1
    let mut e = vec![Scalar::zero(); 3];
    e[k] = c[k].recip();
    let x_2 = HomogeneousForm::linear(&e);
    let [u, w] = dual_lift_basis(&basis, &x_2, policy)?;
    let lift = |l: &DualForm| -> DualForm { l.substitute_linear(&[u.clone(), w.clone()]) };
    let x1b = restrict_dual(x1, &basis);

    if power_class(&gb, gb.norm(), policy) != PowerClass::General {
        let ker = apolar_part(&gb, 1, policy);
        let lb = ker.first().ok_or(Error::DegenerateG)?;
        let base = lift(lb);
        for _ in 0..max_tries {
            let l = normalize(&base.add(&x2.scale(&Scalar::from_int(int(rng, 5)))));
            let lines = vec![x1.clone(), x2.clone(), l];
            if pairwise_distinct(&lines, policy) {
                return Ok(lines);
            }
        }
        return Err(Error::SearchExhausted(max_tries));
    }

    let big_f = fp.sub(&x_2.mul(&g));
    let (fb, _) = restrict_to_line(&big_f, x2, policy)?;
    let vker = apolar_part(&gb, 3, policy);
    if vker.is_empty() {
        return Err(Error::DegenerateG);
    }
    let quad = monomials(2, 2);
    let kcols: Vec<Vec<Scalar>> = quad
        .iter()
        .map(|e| {
            let m: DualForm = Poly::monomial(2, *e, Scalar::one());
            contract(&m, &gb).unwrap().coeffs().to_vec()
        })
        .collect();
    let kmat = Matrix::from_cols(kcols);
    let mut last = Error::SearchExhausted(max_tries);
    for _ in 0..max_tries {
        let h0 = random_member(rng, &vker);
        if !is_squarefree(&h0, policy) {
            continue;
        }
        let factors: Vec<DualForm> = binary_roots(&h0, policy)?
            .iter()
            .map(|r| {
                let rc = r.linear_coeffs();
                normalize_binary(&DualForm::linear(&[rc[1].clone(), -&rc[0]]))
            })
            .collect();
        if !x1b.is_negligible(x1.norm(), policy) && factors.iter().any(|l| proportional(l, &x1b, policy)) {
            continue;
        }
        let pair_ok = (0..3).all(|i| {
            let pr = factors[(i + 1) % 3].mul(&factors[(i + 2) % 3]);
            let c = contract(&pr, &gb).unwrap();
            power_class(&c, contraction_scale(&pr, &gb), policy) != PowerClass::Zero
        });
        if !pair_ok {
            continue;
        }
        let hb = factors[0].mul(&factors[1]).mul(&factors[2]);
        let rhs: Vec<Scalar> = contract(&hb, &fb)?.coeffs().iter().map(|x| -x).collect();
        let Some(sol) = linalg::solve(&kmat, &rhs, policy) else {
            continue;
        };
        let kb: DualForm = Poly::new(2, 2, sol.particular).unwrap();
        let h = lift(&factors[0]).mul(&lift(&factors[1])).mul(&lift(&factors[2]));
        let p = h.add(&x2.mul(&lift(&kb)));
        match recap_tangent_lines(&fp, x2, &p, policy) {
            Ok(t) => {
                let mut lines = vec![x1.clone()];
                lines.extend(t);
                return Ok(lines);
            }
            Err(e) => last = e,
        }
    }
    Err(last)
}

fn normalize_binary(l: &DualForm) -> DualForm {
    normalize(l)
}

/// Variant for (x²)² ⌟ f = 0: x¹ is chosen freely in a pencil. Returns the
/// output of [`double_refine`], or two lines l, x² with l x² ⌟ f = 0 when
/// every x¹ gives a cube.
pub fn double_refine_square(
    f: &HomogeneousForm,
    x2: &DualForm,
    rng: &mut Rng,
    max_tries: usize,
    policy: &TolerancePolicy,
) -> Result<Vec<DualForm>> {
    let xx = x2.mul(x2);
    if !contract(&xx, f)?.is_negligible(contraction_scale(&xx, f), policy) {
        return Err(Error::PreconditionFailed("(x²)² ⌟ f ≠ 0".into()));
    }
    let fpp = contract(x2, f)?;
    let (m1, m2) = loop {
        let m1 = int_line(rng, 3, 5);
        let m2 = int_line(rng, 3, 5);
        let det = cross(&m1.linear_coeffs(), &m2.linear_coeffs())
            .iter()
            .zip(x2.linear_coeffs())
            .fold(Scalar::zero(), |acc, (a, b)| &acc + &(a * &b));
        if !det.is_zero(policy) {
            break (m1, m2);
        }
    };
    let candidates = [
        m1.clone(),
        m2.clone(),
        m1.add(&m2),
        m1.sub(&m2),
        m1.add(&m2.scale(&Scalar::from_int(2))),
    ];
    for x1 in &candidates {
        let cls = class_of(&fpp, &[x1], policy);
        match cls {
            PowerClass::Zero => return Ok(vec![x1.clone(), x2.clone()]),
            PowerClass::General => return double_refine(f, x1, x2, rng, max_tries, policy),
            PowerClass::Power => {}
        }
    }
    let l = find_kernel_line_in_pencil(&fpp, [&m1, &m2], policy).ok_or(Error::DegenerateG)?;
    Ok(vec![normalize(&l), x2.clone()])
}

fn check_quintic(f: &HomogeneousForm) -> Result<()> {
    if f.nvars() != 3 {
        return Err(Error::VarsMismatch("ternary quintic expected".into()));
    }
    if f.degree() != 5 {
        return Err(Error::DegreeMismatch(format!("quintic expected, got degree {}", f.degree())));
    }
    if f.is_exact_zero() || f.norm() == 0.0 {
        return Err(Error::ZeroForm);
    }
    Ok(())
}

struct Search<'a> {
    f: &'a HomogeneousForm,
    rng: Rng,
    attempts: usize,
    max: usize,
    policy: &'a TolerancePolicy,
}

enum Verdict {
    /// Ordered as the certificate expects.
    Done(Vec<DualForm>),
    Fewer(Vec<DualForm>),
    Repair,
}

fn without(lines: &[DualForm], i: usize) -> Vec<DualForm> {
    lines.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, l)| l.clone()).collect()
}

impl Search<'_> {
    fn classes(&self, lines: &[DualForm]) -> Vec<PowerClass> {
        (0..lines.len())
            .map(|i| {
                let others = without(lines, i);
                let refs: Vec<&DualForm> = others.iter().collect();
                class_of(self.f, &refs, self.policy)
            })
            .collect()
    }

    /// Four lines: q_i is the contraction by the three lines other than lⁱ.
    fn judge4(&self, lines: &[DualForm]) -> Verdict {
        let q = self.classes(lines);
        if let Some(i) = q.iter().position(|c| *c == PowerClass::Zero) {
            return Verdict::Fewer(without(lines, i));
        }
        let general: Vec<usize> = (0..4).filter(|&i| q[i] == PowerClass::General).collect();
        if general.len() >= 2 {
            let (g0, g1) = (general[0], general[1]);
            let mut order: Vec<usize> = (0..4).filter(|&i| i != g0 && i != g1).collect();
            order.extend([g0, g1]);
            return Verdict::Done(order.iter().map(|&i| lines[i].clone()).collect());
        }
        Verdict::Repair
    }

    /// Three lines: q_i is the contraction by the two lines other than lⁱ.
    fn judge3(&self, lines: &[DualForm]) -> Verdict {
        let q = self.classes(lines);
        if let Some(i) = q.iter().position(|c| *c == PowerClass::Zero) {
            return Verdict::Fewer(without(lines, i));
        }
        let cubes: Vec<usize> = (0..3).filter(|&i| q[i] == PowerClass::Power).collect();
        if cubes.len() <= 1 {
            let a = cubes.first().copied().unwrap_or(0);
            let mut order = vec![a];
            order.extend((0..3).filter(|&i| i != a));
            return Verdict::Done(order.iter().map(|&i| lines[i].clone()).collect());
        }
        Verdict::Repair
    }

    fn settle(&mut self, lines: Vec<DualForm>, depth: usize) -> Option<Vec<DualForm>> {
        if depth > MAX_REPAIR_DEPTH || self.attempts >= self.max {
            return None;
        }
        let lines: Vec<DualForm> = lines.iter().map(normalize).collect();
        if !pairwise_distinct(&lines, self.policy) {
            return None;
        }
        let refs: Vec<&DualForm> = lines.iter().collect();
        if !vanishes(self.f, &refs, self.policy) {
            return None;
        }
        let verdict = match lines.len() {
            2 => return Some(lines),
            3 => self.judge3(&lines),
            4 => self.judge4(&lines),
            _ => return None,
        };
        match verdict {
            Verdict::Done(order) => Some(order),
            Verdict::Fewer(l) => self.settle(l, depth + 1),
            Verdict::Repair if lines.len() == 4 => self.repair4(lines, depth),
            Verdict::Repair => self.repair3(lines, depth),
        }
    }

    fn random_line_in(&mut self, pencil: &[DualForm; 2]) -> DualForm {
        let a = Scalar::from_int(nonzero_int(&mut self.rng, 7));
        let b = Scalar::from_int(nonzero_int(&mut self.rng, 7));
        pencil[0].scale(&a).add(&pencil[1].scale(&b))
    }

    /// At least three of the q_i are squares. Move the line of one square
    /// q_i = v² through v (which keeps the product apolar); if that never
    /// helps, a line through v kills l^k l^m ⌟ f.
    fn repair4(&mut self, lines: Vec<DualForm>, depth: usize) -> Option<Vec<DualForm>> {
        let q = self.classes(&lines);
        let squares: Vec<usize> = (0..4).filter(|&i| q[i] == PowerClass::Power).collect();
        let (i, j) = (squares[0], squares[1]);
        let km: Vec<usize> = (0..4).filter(|&x| x != i && x != j).collect();
        let (k, m) = (km[0], km[1]);
        let qi = contracted(self.f, &without(&lines, i).iter().collect::<Vec<_>>());
        let pencil = lines_through(&power_root(&qi)).ok()?;
        for _ in 0..RANDOM_MOVES {
            self.attempts += 1;
            let mut moved = lines.clone();
            moved[i] = normalize(&self.random_line_in(&pencil));
            if !pairwise_distinct(&moved, self.policy) {
                continue;
            }
            if !matches!(self.judge4(&moved), Verdict::Repair) {
                return self.settle(moved, depth + 1);
            }
        }
        self.attempts += 1;
        let c = contracted(self.f, &[&lines[k], &lines[m]]);
        let l = find_kernel_line_in_pencil(&c, [&pencil[0], &pencil[1]], self.policy)?;
        let next = if !proportional(&l, &lines[k], self.policy) && !proportional(&l, &lines[m], self.policy) {
            vec![l, lines[k].clone(), lines[m].clone()]
        } else {
            // l ∝ one of them: (l)²·(other) ⌟ f = 0
            let (x1, x2) = if proportional(&l, &lines[k], self.policy) {
                (&lines[m], &lines[k])
            } else {
                (&lines[k], &lines[m])
            };
            double_refine(self.f, x1, x2, &mut self.rng, 16, self.policy).ok()?
        };
        self.settle(next, depth + 1)
    }

    /// At least two of the pair contractions are cubes; the same moves as
    /// in [`Search::repair4`] one degree up.
    fn repair3(&mut self, lines: Vec<DualForm>, depth: usize) -> Option<Vec<DualForm>> {
        let q = self.classes(&lines);
        let cubes: Vec<usize> = (0..3).filter(|&i| q[i] == PowerClass::Power).collect();
        let (i, j) = (cubes[0], cubes[1]);
        let k = 3 - i - j;
        let qi = contracted(self.f, &without(&lines, i).iter().collect::<Vec<_>>());
        let pencil = lines_through(&power_root(&qi)).ok()?;
        for _ in 0..RANDOM_MOVES {
            self.attempts += 1;
            let mut moved = lines.clone();
            moved[i] = normalize(&self.random_line_in(&pencil));
            if !pairwise_distinct(&moved, self.policy) {
                continue;
            }
            if !matches!(self.judge3(&moved), Verdict::Repair) {
                return self.settle(moved, depth + 1);
            }
        }
        self.attempts += 1;
        let c = contracted(self.f, &[&lines[k]]);
        let l = find_kernel_line_in_pencil(&c, [&pencil[0], &pencil[1]], self.policy)?;
        let next = if !proportional(&l, &lines[k], self.policy) {
            vec![l, lines[k].clone()]
        } else {
            double_refine_square(self.f, &lines[k], &mut self.rng, 16, self.policy).ok()?
        };
        self.settle(next, depth + 1)
    }
}

/// A certified configuration of kind 2, 3 or 4 for the ternary quintic f.
pub fn refine_configuration(
    f: &HomogeneousForm,
    seed: u64,
    max_retries: usize,
    policy: &TolerancePolicy,
) -> Result<LineConfiguration> {
    check_quintic(f)?;
    let mut search = Search {
        f,
        rng: rng_from_seed(seed),
        attempts: 0,
        max: max_retries,
        policy,
    };
    let finish = |lines: Vec<DualForm>, retries: usize| -> Result<LineConfiguration> {
        let certificate = certify(f, &lines, policy)?;
        let cfg = LineConfiguration {
            kind: lines.len(),
            lines,
            certificate,
            retries,
        };
        if !cfg.holds() {
            let failed: Vec<&str> = cfg
                .certificate
                .iter()
                .filter(|c| !c.holds)
                .map(|c| c.condition.as_str())
                .collect();
            return Err(Error::CertificationViolated(failed.join("; ")));
        }
        Ok(cfg)
    };
    if let Some([a, b]) = kind_two_probe(f, &mut search.rng, policy) {
        if let Some(lines) = search.settle(vec![a, b], 0) {
            return finish(lines, search.attempts);
        }
    }
    while search.attempts < max_retries {
        let outcome = split_quartic(f, &mut search.rng, &mut search.attempts, max_retries, policy)?;
        let lines = match outcome {
            SplitOutcome::Four(l) => l.to_vec(),
            SplitOutcome::Two(l) => l.to_vec(),
        };
        if let Some(lines) = search.settle(lines, 0) {
            return finish(lines, search.attempts);
        }
    }
    Err(Error::RetriesExhausted {
        stage: "refine configuration",
        attempts: search.attempts,
    })
}

/// The finite family of binary cubics controlling where the rank-two
/// parameterization can break for q = x₀x₁ and lines x¹, x², x³.
#[derive(Clone, Debug)]
pub struct LrBadSet {
    pub x0: HomogeneousForm,
    pub x1: HomogeneousForm,
    pub forms: Vec<HomogeneousForm>,
}

pub fn compute_lr_bad_set(
    q: &HomogeneousForm,
    lines: [&DualForm; 3],
    policy: &TolerancePolicy,
) -> Result<LrBadSet> {
    if lines.iter().any(|l| l.nvars() != 2 || l.degree() != 1) {
        return Err(Error::VarsMismatch("binary dual lines expected".into()));
    }
    let (x0, x1) = factor_quadratic(q, policy)?;
    if proportional(&x0, &x1, policy) {
        return Ok(LrBadSet {
            forms: vec![x0.pow(3)],
            x0,
            x1,
        });
    }
    let ev = |l: &DualForm, v: &HomogeneousForm| l.eval(v.coeffs());
    let [l1, l2, l3] = lines;
    let u0 = x0.scale(&ev(l3, &x1)).add(&x1.scale(&ev(l3, &x0)));
    let u1 = x0.scale(&ev(l3, &x1)).sub(&x1.scale(&ev(l3, &x0)));
    let v = |l: &DualForm| u0.pow(3).scale(&ev(l, &u1)).sub(&u1.pow(3).scale(&ev(l, &u0)));
    let xs = [&x0, &x1];
    let vk = |l: &DualForm, k: usize| {
        let (a, b) = (xs[k], xs[1 - k]);
        a.pow(3)
            .scale(&ev(l, b))
            .sub(&a.pow(2).mul(b).scale(&(&ev(l, a) * &Scalar::from_int(3))))
    };
    let forms = vec![v(l1), v(l2), vk(l1, 0), vk(l1, 1), vk(l2, 0), vk(l2, 1)];
    Ok(LrBadSet { x0, x1, forms })
}

#[cfg(test)]
mod tests;
