//! Homogeneous polynomials in `x_1..x_n` with rational coefficients,
//! including the exact division needed by the intersection-number
//! recursion.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{ExactError, Result};
use crate::rat::{factorial, Rat};

/// Sparse homogeneous polynomial: every stored monomial has total degree
/// exactly `degree`. Exponent keys are ordered lexicographically.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HomogPoly {
    nvars: usize,
    degree: u32,
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl HomogPoly {
    pub fn zero(nvars: usize, degree: u32) -> Self {
        HomogPoly {
            nvars,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        let mut p = Self::zero(nvars, 0);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn monomial(nvars: usize, exps: Vec<u32>, c: Rat) -> Self {
        assert_eq!(exps.len(), nvars);
        let degree = exps.iter().sum();
        let mut p = Self::zero(nvars, degree);
        p.add_term(exps, c);
        p
    }

    /// `(sum_{i in vars} x_i)^k` as a polynomial in `nvars` variables.
    pub fn sum_pow(nvars: usize, vars: &[usize], k: u32) -> Self {
        let mut p = Self::constant(nvars, Rat::one());
        let lin = {
            let mut q = Self::zero(nvars, 1);
            for &v in vars {
                let mut e = vec![0; nvars];
                e[v] = 1;
                q.add_term(e, Rat::one());
            }
            q
        };
        for _ in 0..k {
            p = p.mul(&lin);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rat)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u32]) -> Rat {
        self.terms.get(exps).cloned().unwrap_or_else(Rat::zero)
    }

    fn add_term(&mut self, exps: Vec<u32>, c: Rat) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(exps.iter().sum::<u32>(), self.degree);
        let e = self.terms.entry(exps).or_insert_with(Rat::zero);
        *e += &c;
        // cheap cleanup of cancellations
        let dead = e.is_zero();
        if dead {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        assert_eq!(self.degree, other.degree, "inhomogeneous sum");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        HomogPoly {
            nvars: self.nvars,
            degree: self.degree,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars, self.degree);
        }
        HomogPoly {
            nvars: self.nvars,
            degree: self.degree,
            terms: self.terms.iter().map(|(e, t)| (e.clone(), t * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let degree = self.degree + other.degree;
        let mut out = Self::zero(self.nvars, degree);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    /// Exact quotient `self / den`; fails with `NonExactDivision` when a
    /// nonzero remainder survives.
    pub fn exact_div(&self, den: &Self) -> Result<Self> {
        assert_eq!(self.nvars, den.nvars);
        if den.is_zero() {
            return Err(ExactError::NonExactDivision(format!(
                "division by zero polynomial"
            )));
        }
        if self.is_zero() {
            let deg = self.degree.saturating_sub(den.degree);
            return Ok(Self::zero(self.nvars, deg));
        }
        if self.degree < den.degree {
            return Err(ExactError::NonExactDivision(format!(
                "degree {} < divisor degree {}",
                self.degree, den.degree
            )));
        }
        let qdeg = self.degree - den.degree;
        let (lead_e, lead_c) = den.terms.iter().next_back().expect("nonzero divisor");
        let mut quot = Self::zero(self.nvars, qdeg);
        let mut rem = self.clone();
        while let Some((re, rc)) = rem.terms.iter().next_back() {
            let mut qe = Vec::with_capacity(self.nvars);
            for (a, b) in re.iter().zip(lead_e) {
                if a < b {
                    return Err(ExactError::NonExactDivision(format!(
                        "leading monomial {re:?} not divisible by {lead_e:?}"
                    )));
                }
                qe.push(a - b);
            }
            let qc = rc / lead_c;
            quot.add_term(qe.clone(), qc.clone());
            let mono = Self::monomial(self.nvars, qe, qc);
            rem = rem.sub(&mono.mul(den));
        }
        Ok(quot)
    }

    /// Set variables with index `>= from` to zero.
    pub fn set_tail_zero(&self, from: usize) -> Self {
        let mut out = Self::zero(self.nvars, self.degree);
        for (e, c) in &self.terms {
            if e[from..].iter().all(|&x| x == 0) {
                out.add_term(e.clone(), c.clone());
            }
        }
        out
    }

    /// Reinterpret in `new_n >= nvars` variables (extra exponents zero).
    pub fn embed(&self, new_n: usize) -> Self {
        assert!(new_n >= self.nvars);
        let mut out = Self::zero(new_n, self.degree);
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            ne.resize(new_n, 0);
            out.add_term(ne, c.clone());
        }
        out
    }

    /// Apply a permutation to the variables: `x_i -> x_{perm[i]}`.
    pub fn permute_vars(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.nvars);
        let mut out = Self::zero(self.nvars, self.degree);
        for (e, c) in &self.terms {
            let mut ne = vec![0u32; self.nvars];
            for (i, &x) in e.iter().enumerate() {
                ne[perm[i]] = x;
            }
            out.add_term(ne, c.clone());
        }
        out
    }

    pub fn eval(&self, xs: &[Rat]) -> Rat {
        assert_eq!(xs.len(), self.nvars);
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &p) in xs.iter().zip(e) {
                if p > 0 {
                    t = t * xi.pow(p as i32);
                }
            }
            acc += &t;
        }
        acc
    }
}

/// Multinomial coefficient `n! / (m_1! ... m_k!)`.
pub fn multinomial(parts: &[u64]) -> Rat {
    let n: u64 = parts.iter().sum();
    let mut denom = Rat::one();
    for &p in parts {
        denom = denom * Rat::from_big(factorial(p));
    }
    Rat::from_big(factorial(n)) / denom
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2(terms: &[(u32, u32, i64)]) -> HomogPoly {
        let mut out = HomogPoly::zero(2, terms[0].0 + terms[0].1);
        for &(a, b, c) in terms {
            out = out.add(&HomogPoly::monomial(2, vec![a, b], Rat::from(c)));
        }
        out
    }

    #[test]
    fn exact_division_from_q1_two_point() {
        // (x1^4 + 3x1^3 x2 + 4x1^2 x2^2 + 3x1 x2^3 + x2^4) / (x1 + x2)^2
        let num = p2(&[(4, 0, 1), (3, 1, 3), (2, 2, 4), (1, 3, 3), (0, 4, 1)]);
        let den = HomogPoly::sum_pow(2, &[0, 1], 2);
        let q = num.exact_div(&den).unwrap();
        assert_eq!(q, p2(&[(2, 0, 1), (1, 1, 1), (0, 2, 1)]));
    }

    #[test]
    fn division_by_one_is_identity() {
        let p = p2(&[(2, 1, 5), (0, 3, -7)]);
        let one = HomogPoly::constant(2, Rat::one());
        assert_eq!(p.exact_div(&one).unwrap(), p);
    }

    #[test]
    fn non_exact_division_detected() {
        let num = p2(&[(1, 0, 1), (0, 1, 1)]);
        let den = HomogPoly::monomial(2, vec![1, 0], Rat::one());
        assert!(matches!(
            num.exact_div(&den),
            Err(ExactError::NonExactDivision(_))
        ));
    }

    #[test]
    fn sum_pow_and_eval() {
        let s3 = HomogPoly::sum_pow(2, &[0, 1], 3);
        assert_eq!(s3.coeff(&[2, 1]), Rat::from(3));
        let v = s3.eval(&[Rat::from(1), Rat::from(2)]);
        assert_eq!(v, Rat::from(27));
    }

    #[test]
    fn multinomial_values() {
        assert_eq!(multinomial(&[2, 1]), Rat::from(3));
        assert_eq!(multinomial(&[2, 2]), Rat::from(6));
        assert_eq!(multinomial(&[]), Rat::one());
    }
}
