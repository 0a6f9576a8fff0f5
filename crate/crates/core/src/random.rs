//! Seeded sampling of scalars, forms and lines. All randomness in the crate
//! flows through a [`Rng`] created from a `u64` seed.

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::poly::{num_monomials, DualForm, HomogeneousForm, Poly};
use crate::scalar::Scalar;

pub type Rng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Integer in `[-bound, bound]`.
pub fn int(rng: &mut Rng, bound: i64) -> i64 {
    rng.gen_range(-bound..=bound)
}

/// Nonzero integer in `[-bound, bound]`.
pub fn nonzero_int(rng: &mut Rng, bound: i64) -> i64 {
    loop {
        let v = int(rng, bound);
        if v != 0 {
            return v;
        }
    }
}

pub fn small_rational(rng: &mut Rng, bound: i64) -> Scalar {
    let n = int(rng, bound);
    let d = rng.gen_range(1..=bound.max(1));
    Scalar::ratio(n, d)
}

pub fn int_scalars(rng: &mut Rng, n: usize, bound: i64) -> Vec<Scalar> {
    (0..n).map(|_| Scalar::from_int(int(rng, bound))).collect()
}

/// Form with integer coefficients in `[-bound, bound]`, never zero.
pub fn int_form(rng: &mut Rng, nvars: usize, d: usize, bound: i64) -> HomogeneousForm {
    loop {
        let c = int_scalars(rng, num_monomials(nvars, d), bound);
        let f = Poly::new(nvars, d, c).unwrap();
        if !f.is_exact_zero() {
            return f;
        }
    }
}

/// Nonzero linear dual form with integer coefficients.
pub fn int_line(rng: &mut Rng, nvars: usize, bound: i64) -> DualForm {
    loop {
        let c = int_scalars(rng, nvars, bound);
        if c.iter().any(|x| !x.is_exact_zero()) {
            return Poly::linear(&c);
        }
    }
}

/// Random combination `Σ cᵢ·basisᵢ` with integer weights (not all zero).
pub fn int_combination(rng: &mut Rng, basis: &[Vec<Scalar>], bound: i64) -> Vec<Scalar> {
    assert!(!basis.is_empty());
    let n = basis[0].len();
    loop {
        let w = int_scalars(rng, basis.len(), bound);
        if w.iter().all(Scalar::is_exact_zero) {
            continue;
        }
        let mut v = vec![Scalar::zero(); n];
        for (wi, b) in w.iter().zip(basis) {
            if wi.is_exact_zero() {
                continue;
            }
            for (x, y) in v.iter_mut().zip(b) {
                *x += &(wi * y);
            }
        }
        return v;
    }
}
