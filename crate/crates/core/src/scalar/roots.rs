//! Roots of univariate polynomials. Coefficients are in ascending order
//! (`coeffs[i]` multiplies `t^i`).

use dashu::base::UnsignedAbs;
use dashu::integer::IBig;
use dashu::rational::RBig;

use super::{real_to_f64, real_to_rational, Complex, Scalar, TolerancePolicy};
use crate::error::{Error, Result};

pub fn univariate_roots(coeffs: &[Scalar], policy: &TolerancePolicy) -> Result<Vec<(Scalar, usize)>> {
    if coeffs.is_empty() {
        return Err(Error::DegenerateInput("empty coefficient list".into()));
    }
    if coeffs.iter().all(|c| c.is_zero(policy)) {
        return Err(Error::DegenerateInput("all coefficients negligible".into()));
    }
    let mut c: Vec<Scalar> = coeffs.to_vec();
    while c.last().is_some_and(|x| x.is_exact_zero()) {
        c.pop();
    }
    let mut out: Vec<(Scalar, usize)> = Vec::new();
    let zeros = c.iter().take_while(|x| x.is_exact_zero()).count();
    if zeros > 0 {
        out.push((Scalar::zero(), zeros));
        c.drain(..zeros);
    }
    if c.iter().all(Scalar::is_exact) {
        let exact: Vec<RBig> = c.iter().map(|x| x.as_rational().unwrap().clone()).collect();
        rational_roots(exact, policy, &mut out);
    } else {
        numeric_roots(&c, policy, &mut out);
    }
    Ok(merge_equal(out))
}

fn merge_equal(roots: Vec<(Scalar, usize)>) -> Vec<(Scalar, usize)> {
    let mut out: Vec<(Scalar, usize)> = Vec::new();
    for (r, m) in roots {
        if let Some(e) = out.iter_mut().find(|(s, _)| s.is_exact() && s == &r) {
            e.1 += m;
        } else {
            out.push((r, m));
        }
    }
    out
}

fn eval_rational(c: &[RBig], x: &RBig) -> RBig {
    let mut acc = RBig::ZERO;
    for a in c.iter().rev() {
        acc = acc * x + a;
    }
    acc
}

/// Divide by (t - r) assuming r is an exact root.
fn deflate_rational(c: &[RBig], r: &RBig) -> Vec<RBig> {
    let n = c.len() - 1;
    let mut q = vec![RBig::ZERO; n];
    let mut carry = RBig::ZERO;
    for i in (0..n).rev() {
        carry = &c[i + 1] + carry * r;
        q[i] = carry.clone();
    }
    q
}

/// Smallest-denominator continued-fraction convergent within `tol` of `x`.
fn snap(x: &RBig, tol: &RBig, max_den: &IBig) -> Option<RBig> {
    let mut rem = x.clone();
    let (mut p0, mut q0) = (IBig::ONE, IBig::ZERO);
    let (mut p1, mut q1) = (rem.floor(), IBig::ONE);
    rem = rem.clone() - RBig::from(p1.clone());
    loop {
        let cand = RBig::from_parts(p1.clone(), q1.clone().unsigned_abs());
        let diff = &cand - x;
        let diff = if diff < RBig::ZERO { -diff } else { diff };
        if &diff <= tol {
            return Some(cand);
        }
        if rem == RBig::ZERO || &q1 > max_den {
            return None;
        }
        let inv = RBig::ONE / rem;
        let a = inv.floor();
        rem = inv - RBig::from(a.clone());
        let p2 = &a * &p1 + p0;
        let q2 = &a * &q1 + q0;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
}

fn rational_roots(mut c: Vec<RBig>, policy: &TolerancePolicy, out: &mut Vec<(Scalar, usize)>) {
    let prec = policy.precision_bits;
    loop {
        let n = c.len() - 1;
        if n == 0 {
            return;
        }
        if n == 1 {
            out.push((Scalar::Rational(-&c[0] / &c[1]), 1));
            return;
        }
        let sc: Vec<Scalar> = c.iter().cloned().map(Scalar::Rational).collect();
        if n == 2 {
            let disc = &c[1] * &c[1] - RBig::from(4) * &c[0] * &c[2];
            let sq = Scalar::Rational(disc.clone()).sqrt(prec);
            if sq.is_exact() || disc == RBig::ZERO {
                quadratic(&sc, policy, out);
                return;
            }
        }
        let mut numeric = Vec::new();
        numeric_roots(&sc, policy, &mut numeric);
        let tol = RBig::from_parts(IBig::ONE, dashu::integer::UBig::ONE << (prec / 2));
        let max_den = IBig::ONE << (prec / 4);
        let mut found = None;
        for (z, _) in &numeric {
            let Scalar::Complex(zc) = z else {
                found = Some(z.as_rational().unwrap().clone());
                break;
            };
            if real_to_f64(zc.im()).abs() > 1e-20 * (1.0 + real_to_f64(zc.re()).abs()) {
                continue;
            }
            let x = real_to_rational(zc.re());
            if let Some(r) = snap(&x, &tol, &max_den) {
                if eval_rational(&c, &r) == RBig::ZERO {
                    found = Some(r);
                    break;
                }
            }
        }
        match found {
            Some(r) => {
                c = deflate_rational(&c, &r);
                out.push((Scalar::Rational(r), 1));
            }
            None => {
                out.extend(numeric);
                return;
            }
        }
    }
}

fn quadratic(c: &[Scalar], policy: &TolerancePolicy, out: &mut Vec<(Scalar, usize)>) {
    let prec = policy.precision_bits;
    let (a0, a1, a2) = (&c[0], &c[1], &c[2]);
    let disc = a1 * a1 - &(&Scalar::from_int(4) * &(a0 * a2));
    let scale = (a1.magnitude().powi(2)).max((a0 * a2).magnitude());
    if disc.is_exact_zero() || (!disc.is_exact() && policy.negligible(disc.magnitude(), scale)) {
        out.push((-(a1 / &(a2 * &Scalar::from_int(2))), 2));
        return;
    }
    let sq = disc.sqrt(prec);
    // pick the sign avoiding cancellation
    let plus = a1 + &sq;
    let minus = a1 - &sq;
    let big = if plus.magnitude() >= minus.magnitude() { plus } else { minus };
    let qv = &big * &Scalar::ratio(-1, 2);
    out.push((&qv / a2, 1));
    out.push((a0 / &qv, 1));
}

fn horner(c: &[Complex], z: &Complex) -> (Complex, Complex) {
    let n = c.len() - 1;
    let mut p = c[n].clone();
    let mut dp = Complex::zero(z.precision());
    for i in (0..n).rev() {
        dp = dp.mul(z).add(&p);
        p = p.mul(z).add(&c[i]);
    }
    (p, dp)
}

fn numeric_roots(c: &[Scalar], policy: &TolerancePolicy, out: &mut Vec<(Scalar, usize)>) {
    let n = c.len() - 1;
    match n {
        0 => return,
        1 => {
            out.push((-(&c[0] / &c[1]), 1));
            return;
        }
        2 => {
            quadratic(c, policy, out);
            return;
        }
        _ => {}
    }
    let prec = policy.precision_bits;
    let lead = c[n].to_complex(prec);
    let a: Vec<Complex> = c.iter().map(|x| x.to_complex(prec).div(&lead)).collect();
    let af: Vec<f64> = a.iter().map(|x| x.magnitude()).collect();
    let radius = (1..=n)
        .map(|k| af[n - k].powf(1.0 / k as f64))
        .fold(0.0f64, f64::max)
        * 2.0;
    let radius = if radius > 0.0 { radius } else { 1.0 };
    let cre = -real_to_f64(a[n - 1].re()) / n as f64;
    let cim = -real_to_f64(a[n - 1].im()) / n as f64;
    let mut z: Vec<Complex> = (0..n)
        .map(|k| {
            let th = std::f64::consts::TAU * k as f64 / n as f64 + 0.4;
            Complex::from_f64(cre + radius * th.cos(), cim + radius * th.sin(), prec)
        })
        .collect();
    let abs_a: Vec<f64> = af.clone();
    let floor = (-(prec as f64) + 8.0).exp2();
    let mut done = vec![false; n];
    let one = Complex::from_f64(1.0, 0.0, prec);
    for _ in 0..(4 * prec + 100) {
        for k in 0..n {
            if done[k] {
                continue;
            }
            let (p, dp) = horner(&a, &z[k]);
            let zm = z[k].magnitude().max(1e-300);
            let bound: f64 = abs_a
                .iter()
                .enumerate()
                .map(|(i, x)| x * zm.powi(i as i32))
                .sum::<f64>()
                * floor;
            if p.magnitude() <= bound {
                done[k] = true;
                continue;
            }
            if dp.is_exact_zero() {
                z[k] = z[k].add(&Complex::from_f64(radius * 1e-3, radius * 1e-3, prec));
                continue;
            }
            let w = p.div(&dp);
            let mut s = Complex::zero(prec);
            for j in 0..n {
                if j != k {
                    let d = z[k].sub(&z[j]);
                    if !d.is_exact_zero() {
                        s = s.add(&d.recip());
                    }
                }
            }
            let den = one.sub(&w.mul(&s));
            let corr = if den.is_exact_zero() { w.clone() } else { w.div(&den) };
            z[k] = z[k].sub(&corr);
            if corr.magnitude() <= floor * zm {
                done[k] = true;
            }
        }
        if done.iter().all(|d| *d) {
            break;
        }
    }
    // clustering: clusters merge when closer than thr^(1/m)
    let mut clusters: Vec<(Complex, usize)> = z.into_iter().map(|x| (x, 1)).collect();
    loop {
        let mut merged = false;
        'outer: for i in 0..clusters.len() {
            for j in (i + 1)..clusters.len() {
                let m = clusters[i].1 + clusters[j].1;
                let scale = clusters[i].0.magnitude().max(1.0);
                let dist = clusters[i].0.sub(&clusters[j].0).magnitude();
                if dist <= policy.zero_threshold.powf(1.0 / m as f64) * scale {
                    let (zj, mj) = clusters.remove(j);
                    let (zi, mi) = clusters[i].clone();
                    let wi = Complex::from_f64(mi as f64, 0.0, prec);
                    let wj = Complex::from_f64(mj as f64, 0.0, prec);
                    let tot = Complex::from_f64(m as f64, 0.0, prec);
                    clusters[i] = (zi.mul(&wi).add(&zj.mul(&wj)).div(&tot), m);
                    merged = true;
                    break 'outer;
                }
            }
        }
        if !merged {
            break;
        }
    }
    for (mut r, m) in clusters {
        if m == 1 {
            for _ in 0..2 {
                let (p, dp) = horner(&a, &r);
                if dp.is_exact_zero() || p.is_exact_zero() {
                    break;
                }
                r = r.sub(&p.div(&dp));
            }
        }
        out.push((Scalar::Complex(r), m));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Scalar> {
        v.iter().map(|&x| Scalar::from_int(x)).collect()
    }

    #[test]
    fn symmetric_pair() {
        let p = TolerancePolicy::default();
        let r = univariate_roots(&ints(&[-1, 0, 1]), &p).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.contains(&(Scalar::from_int(1), 1)));
        assert!(r.contains(&(Scalar::from_int(-1), 1)));
    }

    #[test]
    fn perfect_square() {
        let p = TolerancePolicy::default();
        let r = univariate_roots(&ints(&[4, -4, 1]), &p).unwrap();
        assert_eq!(r, vec![(Scalar::from_int(2), 2)]);
    }

    #[test]
    fn rational_roots_snap_exactly() {
        let p = TolerancePolicy::default();
        // (2t - 1)(t + 3)(t^2 + 1)
        let r = univariate_roots(&ints(&[-3, 5, -1, 5, 2]), &p).unwrap();
        assert!(r.contains(&(Scalar::ratio(1, 2), 1)));
        assert!(r.contains(&(Scalar::from_int(-3), 1)));
        assert_eq!(r.iter().map(|x| x.1).sum::<usize>(), 4);
    }

    #[test]
    fn triple_root_clusters() {
        let p = TolerancePolicy::default();
        // (t - 1)^3 (t + 2) with a complex coefficient vector
        let c: Vec<Scalar> = ints(&[-2, 5, -3, -1, 1])
            .into_iter()
            .map(|x| Scalar::Complex(x.to_complex(256)))
            .collect();
        let r = univariate_roots(&c, &p).unwrap();
        let mults: Vec<usize> = r.iter().map(|x| x.1).collect();
        assert_eq!(mults.iter().sum::<usize>(), 4);
        assert!(mults.contains(&3));
    }

    #[test]
    fn zero_polynomial_rejected() {
        let p = TolerancePolicy::default();
        assert!(univariate_roots(&ints(&[0, 0]), &p).is_err());
    }
}
