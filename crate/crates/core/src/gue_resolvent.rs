//! Resolvent-backed one- and two-point GUE map counts.
//!
//! On the initial data `v = 0`, `w = x` every resolvent coefficient is a
//! homogeneous polynomial in `(x, eps)` (the `lambda^{-2m}` coefficient of
//! the scalar unknown has total degree `m`), so the solve runs in a
//! dedicated ring that stores only the top epsilon-slices of each
//! homogeneous coefficient. That keeps one order of the solve at O(depth)
//! big-integer multiplications and makes depths in the thousands
//! practical, which the Okounkov ladder needs.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{ExactError, Result};
use crate::rat::{gen_binom, Rat};
use crate::toda::{solve_resolvent, Resolvent, TodaRing};

/// Homogeneous polynomial in `(x, eps)`: `sum_j c[j] x^(deg-j) eps^j`,
/// with epsilon-slices stored up to `emax`. Degree `-1` marks the zero
/// element (its degree is indeterminate).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HomogCoeff {
    deg: i64,
    emax: u32,
    c: Vec<BigInt>,
}

impl HomogCoeff {
    pub fn zero(emax: u32) -> Self {
        HomogCoeff {
            deg: -1,
            emax,
            c: Vec::new(),
        }
    }

    pub fn constant(v: BigInt, emax: u32) -> Self {
        if v.is_zero() {
            return Self::zero(emax);
        }
        HomogCoeff {
            deg: 0,
            emax,
            c: vec![v],
        }
    }

    /// The monomial `x`.
    pub fn x(emax: u32) -> Self {
        HomogCoeff {
            deg: 1,
            emax,
            c: vec![BigInt::one()],
        }
    }

    pub fn degree(&self) -> i64 {
        self.deg
    }

    /// Coefficient of `x^(deg-j) eps^j`.
    pub fn slice(&self, j: u32) -> BigInt {
        self.c.get(j as usize).cloned().unwrap_or_else(BigInt::zero)
    }

    fn slots(&self) -> usize {
        if self.deg < 0 {
            return 0;
        }
        (self.emax as usize + 1).min(self.deg as usize + 1)
    }

    fn normalized(mut self) -> Self {
        while matches!(self.c.last(), Some(v) if v.is_zero()) {
            self.c.pop();
        }
        if self.c.is_empty() {
            self.deg = -1;
        }
        self
    }
}

impl TodaRing for HomogCoeff {
    fn zero_like(&self) -> Self {
        Self::zero(self.emax)
    }

    fn one_like(&self) -> Self {
        Self::constant(BigInt::one(), self.emax)
    }

    fn add(&self, o: &Self) -> Self {
        if self.deg < 0 {
            return o.clone();
        }
        if o.deg < 0 {
            return self.clone();
        }
        assert_eq!(self.deg, o.deg, "inhomogeneous sum in the initial-data ring");
        let n = self.c.len().max(o.c.len());
        let mut c = Vec::with_capacity(n);
        for j in 0..n {
            c.push(self.slice(j as u32) + o.slice(j as u32));
        }
        HomogCoeff {
            deg: self.deg,
            emax: self.emax,
            c,
        }
        .normalized()
    }

    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    fn neg(&self) -> Self {
        HomogCoeff {
            deg: self.deg,
            emax: self.emax,
            c: self.c.iter().map(|v| -v).collect(),
        }
    }

    fn mul(&self, o: &Self) -> Self {
        if self.deg < 0 || o.deg < 0 {
            return self.zero_like();
        }
        let deg = self.deg + o.deg;
        let out_slots = (self.emax as usize + 1).min(deg as usize + 1);
        let mut c = vec![BigInt::zero(); out_slots];
        for (ja, va) in self.c.iter().enumerate() {
            if va.is_zero() {
                continue;
            }
            for (jb, vb) in o.c.iter().enumerate() {
                let j = ja + jb;
                if j >= out_slots {
                    break;
                }
                c[j] += va * vb;
            }
        }
        HomogCoeff {
            deg,
            emax: self.emax,
            c,
        }
        .normalized()
    }

    /// `x -> x + k eps` through the binomial reindexing of the slices.
    fn shift(&self, k: i64) -> Self {
        if self.deg < 0 {
            return self.clone();
        }
        let slots = self.slots();
        let mut c = vec![BigInt::zero(); slots];
        for (jp, v) in self.c.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            // x^(deg-jp) -> sum_m C(deg-jp, m) k^m x^(deg-jp-m) eps^m
            let xpow = self.deg - jp as i64;
            let mut km = BigInt::one();
            for m in 0..(slots - jp) {
                if m > 0 {
                    km *= BigInt::from(k);
                }
                let b = crate::rat::binomial(xpow as u64, m as u64);
                c[jp + m] += v * &b * &km;
            }
        }
        HomogCoeff {
            deg: self.deg,
            emax: self.emax,
            c,
        }
        .normalized()
    }

    fn is_zero(&self) -> bool {
        self.deg < 0
    }
}

/// Resolvent on the GUE initial data, solved to a fixed depth with
/// epsilon-slices kept to `emax` (genus `g` needs slice `2g`).
pub struct GueResolvent {
    res: Resolvent<HomogCoeff>,
    emax: u32,
}

/// Largest genus extractable with a given slice cap.
fn genus_cap_from_emax(emax: u32) -> u32 {
    emax / 2
}

pub fn solve_gue_resolvent(depth: usize, emax: u32) -> Result<GueResolvent> {
    let v0 = HomogCoeff::zero(emax);
    let w0 = HomogCoeff::x(emax);
    let res = solve_resolvent(&v0, &w0, depth)?;
    Ok(GueResolvent { res, emax })
}

impl GueResolvent {
    pub fn depth(&self) -> usize {
        self.res.depth()
    }

    /// One-point map counts `Map_g(i)` for even `i`, extracted from the
    /// `lambda^{-i-1}` coefficient of `Lambda(R_21)` matched against
    /// `eps (Lambda - 1) dF/ds_i` at `s = 0`:
    /// the `eps^{2h}` slice equals
    /// `sum_{g<=h} Map_g(i) C(1 - 2g + i/2, 2h+1-2g)` and the system is
    /// triangular with nonzero diagonal for every admissible genus.
    pub fn onepoint_map(&self, g: u32, i: u32) -> Result<BigInt> {
        if i % 2 == 1 {
            return Ok(BigInt::zero());
        }
        if i == 0 || (4 * g) > i {
            return Ok(BigInt::zero());
        }
        if (i as usize) + 1 > self.res.depth() {
            return Err(ExactError::BoundExceeded(format!(
                "one-point index {i} beyond resolvent depth {}",
                self.res.depth()
            )));
        }
        if g > genus_cap_from_emax(self.emax) {
            return Err(ExactError::BoundExceeded(format!(
                "genus {g} beyond epsilon-slice cap {}",
                self.emax
            )));
        }
        let gp = &self.res.gamma_plus[(i + 1) as usize];
        let mut maps: Vec<Rat> = Vec::new();
        for h in 0..=g {
            let mut rhs = Rat::from_big(gp.slice(2 * h));
            for (gg, m) in maps.iter().enumerate() {
                let p = 1 - 2 * gg as i64 + (i as i64) / 2;
                rhs = rhs - m * &gen_binom(p, (2 * h + 1) as u64 - 2 * gg as u64);
            }
            let p = 1 - 2 * h as i64 + (i as i64) / 2;
            let diag = gen_binom(p, 1);
            assert!(!diag.is_zero(), "degenerate extraction diagonal");
            maps.push(rhs / diag);
        }
        let v = maps.pop().expect("nonempty");
        match v.to_integer() {
            Some(n) if !n.is_negative() => Ok(n),
            _ => Err(ExactError::InconsistentSystem(format!(
                "one-point extraction gave non-integer or negative value {v} at g={g}, i={i}"
            ))),
        }
    }

    /// Two-point map counts `Map_g(i, j)` from the cross-multiplied
    /// two-trace identity: `eps^2 d^2F/ds_i ds_j` at `s = 0` is recovered
    /// as `sum_k (k+1) T_{i-1-k, j+1+k}` with
    /// `T_{a,b} = [tr(R(lambda) R(mu)) - 1]` at `lambda^-a mu^-b`, and its
    /// `eps^{2g}` slice is `Map_g(i, j)` directly.
    pub fn twopoint_map(&self, g: u32, i: u32, j: u32) -> Result<BigInt> {
        if i == 0 || j == 0 || (i + j) % 2 == 1 {
            return Ok(BigInt::zero());
        }
        if 4 * g > (i + j).saturating_sub(2) {
            return Ok(BigInt::zero());
        }
        if (i + j) as usize > self.res.depth() {
            return Err(ExactError::BoundExceeded(format!(
                "two-point indices ({i},{j}) need depth {} > {}",
                i + j,
                self.res.depth()
            )));
        }
        if g > genus_cap_from_emax(self.emax) {
            return Err(ExactError::BoundExceeded(format!(
                "genus {g} beyond epsilon-slice cap {}",
                self.emax
            )));
        }
        let mut acc = HomogCoeff::zero(self.emax);
        for k in 0..i {
            let a = (i - 1 - k) as usize;
            let b = (j + 1 + k) as usize;
            let t = self.trace_coeff(a, b);
            if t.is_zero() {
                continue;
            }
            let mut scaled = t;
            let f = BigInt::from(k + 1);
            scaled.c.iter_mut().for_each(|v| *v *= &f);
            acc = acc.add(&scaled);
        }
        let v = acc.slice(2 * g);
        if v.is_negative() {
            return Err(ExactError::InconsistentSystem(format!(
                "two-point extraction gave negative value at g={g}, i={i}, j={j}"
            )));
        }
        Ok(v)
    }

    /// `tr(R(lambda) R(mu))` at `lambda^-a mu^-b`, minus 1 at (0,0).
    fn trace_coeff(&self, a: usize, b: usize) -> HomogCoeff {
        let ra = self.res.matrix_coeff(a);
        let rb = self.res.matrix_coeff(b);
        let mut t = HomogCoeff::zero(self.emax);
        for r in 0..2 {
            for c in 0..2 {
                t = t.add(&ra[r][c].mul(&rb[c][r]));
            }
        }
        if a == 0 && b == 0 {
            t = t.sub(&HomogCoeff::constant(BigInt::one(), self.emax));
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wick::{catalan_onepoint, IndexMultiset, WickOracle};

    #[test]
    fn homog_ring_shift_is_binomial() {
        // (x + eps)^2 at emax 2: slices [1, 2, 1]
        let x = HomogCoeff::x(2);
        let x2 = x.mul(&x);
        let s = s_shift(&x2, 1);
        assert_eq!(s.slice(0), BigInt::from(1));
        assert_eq!(s.slice(1), BigInt::from(2));
        assert_eq!(s.slice(2), BigInt::from(1));
        // and back
        let back = s_shift(&s, -1);
        assert_eq!(back, x2);
    }

    fn s_shift(h: &HomogCoeff, k: i64) -> HomogCoeff {
        TodaRing::shift(h, k)
    }

    #[test]
    fn onepoint_matches_catalan_and_oracle() {
        let r = solve_gue_resolvent(20, 6).unwrap();
        for j in 1..=7u32 {
            assert_eq!(
                r.onepoint_map(0, 2 * j).unwrap(),
                catalan_onepoint(j),
                "genus 0 one-point at i = {}",
                2 * j
            );
        }
        let mut o = WickOracle::new(14);
        for i in (2..=14u32).step_by(2) {
            for g in 0..=(i / 4) {
                let want = o.map_count(g, &IndexMultiset::new(vec![i])).unwrap();
                assert_eq!(
                    r.onepoint_map(g, i).unwrap(),
                    want,
                    "one-point mismatch at g={g}, i={i}"
                );
            }
        }
    }

    #[test]
    fn twopoint_matches_oracle() {
        let r = solve_gue_resolvent(14, 4).unwrap();
        let mut o = WickOracle::new(12);
        for i in 1..=6u32 {
            for j in i..=6u32 {
                if i + j > 12 || (i + j) % 2 == 1 {
                    continue;
                }
                for g in 0..=((i + j).saturating_sub(2) / 4) {
                    let want = o.map_count(g, &IndexMultiset::new(vec![i, j])).unwrap();
                    assert_eq!(
                        r.twopoint_map(g, i, j).unwrap(),
                        want,
                        "two-point mismatch at g={g}, (i,j)=({i},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn bounds_are_enforced() {
        let r = solve_gue_resolvent(8, 2).unwrap();
        assert!(matches!(
            r.onepoint_map(0, 10),
            Err(ExactError::BoundExceeded(_))
        ));
        assert!(matches!(
            r.onepoint_map(2, 8),
            Err(ExactError::BoundExceeded(_))
        ));
        assert_eq!(r.onepoint_map(1, 2).unwrap(), BigInt::zero());
        assert_eq!(r.onepoint_map(0, 3).unwrap(), BigInt::zero());
    }
}
