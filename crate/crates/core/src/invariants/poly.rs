//! Ad-invariant polynomials on End(V) and their polarizations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};

use super::charpoly::{cmat_entries, elementary_all, Ring};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum PolyKind {
    /// e_k of the eigenvalues.
    Elementary,
    /// tr(x^k).
    TracePower,
    /// Σ a · Π e_{λᵢ} over partitions λ of the degree, with integer coefficients.
    CharPolyBasis(Vec<(i64, Vec<usize>)>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantPolynomial {
    pub degree: usize,
    pub kind: PolyKind,
}

fn mat_mul<T: Ring>(a: &[T], b: &[T], n: usize) -> Vec<T> {
    let mut out = vec![T::zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = &a[i * n + k];
            for j in 0..n {
                out[i * n + j] = out[i * n + j].add(&aik.mul(&b[k * n + j]));
            }
        }
    }
    out
}

impl InvariantPolynomial {
    pub fn elementary(k: usize) -> Self {
        InvariantPolynomial { degree: k, kind: PolyKind::Elementary }
    }

    pub fn trace_power(k: usize) -> Self {
        InvariantPolynomial { degree: k, kind: PolyKind::TracePower }
    }

    pub fn char_poly_basis(degree: usize, terms: Vec<(i64, Vec<usize>)>) -> Result<Self> {
        for (_, parts) in &terms {
            if parts.iter().sum::<usize>() != degree || parts.contains(&0) {
                return Err(Error::Invalid(format!("{parts:?} is not a partition of {degree}")));
            }
        }
        Ok(InvariantPolynomial { degree, kind: PolyKind::CharPolyBasis(terms) })
    }

    /// f on a row-major n×n matrix over any commutative ring.
    pub fn eval_ring<T: Ring>(&self, a: &[T], n: usize) -> T {
        match &self.kind {
            PolyKind::Elementary => {
                if self.degree > n {
                    T::zero()
                } else {
                    elementary_all(a, n)[self.degree].clone()
                }
            }
            PolyKind::TracePower => {
                if self.degree == 0 {
                    return T::ratio(n as i64, 1);
                }
                let mut power = a.to_vec();
                for _ in 1..self.degree {
                    power = mat_mul(&power, a, n);
                }
                (0..n).fold(T::zero(), |acc, i| acc.add(&power[i * n + i]))
            }
            PolyKind::CharPolyBasis(terms) => {
                let e = elementary_all(a, n);
                let mut out = T::zero();
                for (coef, parts) in terms {
                    let mut mono = T::ratio(*coef, 1);
                    for &p in parts {
                        mono = mono.mul(&if p <= n { e[p].clone() } else { T::zero() });
                    }
                    out = out.add(&mono);
                }
                out
            }
        }
    }

    pub fn eval(&self, x: &CMat) -> C64 {
        self.eval_ring(&cmat_entries(x), x.nrows())
    }

    /// P(x₁, …, x_k) = (1/k!) Σ_{S≠∅} (−1)^{k−|S|} f(Σ_{i∈S} xᵢ).
    pub fn polarize_ring<T: Ring>(&self, args: &[Vec<T>], n: usize) -> Result<T> {
        let k = self.degree;
        if args.len() != k {
            return Err(Error::DimensionMismatch(format!("{} arguments for degree {k}", args.len())));
        }
        if k == 0 {
            return Ok(self.eval_ring(&[], n));
        }
        let mut total = T::zero();
        for mask in 1u32..(1 << k) {
            let mut sum = vec![T::zero(); n * n];
            for (i, arg) in args.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    for (s, a) in sum.iter_mut().zip(arg) {
                        *s = s.add(a);
                    }
                }
            }
            let value = self.eval_ring(&sum, n);
            if (k - mask.count_ones() as usize).is_multiple_of(2) {
                total = total.add(&value);
            } else {
                total = total.sub(&value);
            }
        }
        let factorial: i64 = (1..=k as i64).product();
        Ok(total.mul(&T::ratio(1, factorial)))
    }

    pub fn polarize(&self, args: &[CMat]) -> Result<C64> {
        let n = args.first().map_or(0, |m| m.nrows());
        let entries: Vec<Vec<C64>> = args.iter().map(cmat_entries).collect();
        self.polarize_ring(&entries, n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::expm;
    use crate::linalg::{c, from_real};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_mat<R: Rng>(rng: &mut R, n: usize) -> CMat {
        CMat::from_fn(n, n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    fn family() -> Vec<InvariantPolynomial> {
        vec![
            InvariantPolynomial::elementary(1),
            InvariantPolynomial::elementary(2),
            InvariantPolynomial::elementary(3),
            InvariantPolynomial::trace_power(2),
            InvariantPolynomial::trace_power(3),
            InvariantPolynomial::char_poly_basis(2, vec![(1, vec![1, 1]), (-2, vec![2])]).unwrap(),
        ]
    }

    #[test]
    fn ad_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for f in family() {
            for _ in 0..100 {
                let x = random_mat(&mut rng, 3);
                let g = expm(&(random_mat(&mut rng, 3) * c(0.5)));
                let conj = &g * &x * crate::linalg::inverse(&g).unwrap();
                let scale = 1.0 + f.eval(&x).norm();
                assert!((f.eval(&conj) - f.eval(&x)).norm() / scale <= 1e-9);
            }
        }
    }

    #[test]
    fn newton_identity_between_bases() {
        // tr(x²) = e₁² − 2e₂.
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let x = random_mat(&mut rng, 4);
        let custom = &family()[5];
        assert!((custom.eval(&x) - InvariantPolynomial::trace_power(2).eval(&x)).norm() < 1e-12);
    }

    #[test]
    fn polarization_examples() {
        let e2 = InvariantPolynomial::elementary(2);
        let p = e2.polarize(&[from_real(&[&[1.0, 0.0], &[0.0, 0.0]]), from_real(&[&[0.0, 0.0], &[0.0, 1.0]])]).unwrap();
        assert!((p - c(0.5)).norm() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for f in family() {
            let x = random_mat(&mut rng, 3);
            let same = vec![x.clone(); f.degree];
            assert!((f.polarize(&same).unwrap() - f.eval(&x)).norm() < 1e-12);
            // Symmetry under swapping the first two arguments.
            let args: Vec<CMat> = (0..f.degree).map(|_| random_mat(&mut rng, 3)).collect();
            let mut swapped = args.clone();
            if f.degree > 1 {
                swapped.swap(0, 1);
            }
            assert!((f.polarize(&args).unwrap() - f.polarize(&swapped).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn polarization_ignores_strictly_upper_shifts_of_upper_triangular_arguments() {
        // On upper-triangular arguments f only sees the diagonal, so strictly-upper
        // shifts leave P unchanged.
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let upper = |rng: &mut ChaCha8Rng, strict: bool| {
            CMat::from_fn(3, 3, |i, j| {
                if j > i || (j == i && !strict) {
                    C64::new(rng.random_range(-1.0..1.0), 0.0)
                } else {
                    c(0.0)
                }
            })
        };
        for f in family() {
            let xs: Vec<CMat> = (0..f.degree).map(|_| upper(&mut rng, false)).collect();
            let shifted: Vec<CMat> = xs.iter().map(|x| x + upper(&mut rng, true)).collect();
            assert!((f.polarize(&xs).unwrap() - f.polarize(&shifted).unwrap()).norm() < 1e-12);
        }
    }
}
