//! The number-level combinatorial identities at the heart of the proof:
//! the per-genus identity specialized to map counts, and the five-block
//! identity obtained from it after simplification.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::error::{ExactError, Result};
use crate::gue_resolvent::GueResolvent;
use crate::rat::{bernoulli_upto, gen_binom, Rat};
use crate::wick::{IndexMultiset, WickOracle};

/// Supplier of map counts `Map_g(i_1, ..., i_n)`.
pub trait MapSource {
    fn map(&mut self, g: u32, i: &[u32]) -> Result<BigInt>;
}

impl MapSource for WickOracle {
    fn map(&mut self, g: u32, i: &[u32]) -> Result<BigInt> {
        if i.is_empty() {
            // Map_g(empty) := 0; the explicit delta-terms carry the n = 0
            // content of the identities
            return Ok(BigInt::from(0));
        }
        self.map_count(g, &IndexMultiset::new(i.to_vec()))
    }
}

impl MapSource for GueResolvent {
    fn map(&mut self, g: u32, i: &[u32]) -> Result<BigInt> {
        match i.len() {
            0 => Ok(BigInt::from(0)),
            1 => self.onepoint_map(g, i[0]),
            2 => self.twopoint_map(g, i[0], i[1]),
            _ => Err(ExactError::BoundExceeded(format!(
                "resolvent backend covers one- and two-point counts, got n = {}",
                i.len()
            ))),
        }
    }
}

fn c_bern(g: u32, bern: &[Rat]) -> Rat {
    // (2^{2g+3} - 2) B_{2g+2}
    let m = 2 * g + 2;
    let two_pow = Rat::from_big(BigInt::from(2).pow(m + 1) - BigInt::from(2));
    two_pow * &bern[m as usize]
}

fn msum(j: &[u32]) -> i64 {
    j.iter().map(|&v| v as i64).sum()
}

fn submaps(j: &[u32], mask: u32) -> (Vec<u32>, Vec<u32>) {
    let a: Vec<u32> = (0..j.len())
        .filter(|p| mask & (1 << p) != 0)
        .map(|p| j[p])
        .collect();
    let b: Vec<u32> = (0..j.len())
        .filter(|p| mask & (1 << p) == 0)
        .map(|p| j[p])
        .collect();
    (a, b)
}

fn doubled(j: &[u32]) -> Vec<u32> {
    j.iter().map(|&v| 2 * v).collect()
}

/// Residual of the number-level per-genus identity (the dilation identity
/// substituted into the genus slices of the normalized-free-energy
/// relation): zero for all `h >= 0` and `j_a >= 1`, including `n = 0`.
pub fn pre_identity_residual(src: &mut dyn MapSource, h: u32, j: &[u32]) -> Result<Rat> {
    let n = j.len() as i64;
    let jj = msum(j);
    let bern = bernoulli_upto(2 * h as u64 + 2);

    let mut lhs = Rat::zero();
    for g in 0..=h {
        let gp = h - g;
        let map = Rat::from_big(src.map(gp, &doubled(j))?);
        let mut inner = Rat::from(2 * jj) * map;
        if gp == 0 && n == 0 {
            inner += &Rat::one();
        }
        if inner.is_zero() {
            continue;
        }
        let p = 2 - 2 * gp as i64 - n + jj;
        lhs += &(c_bern(g, &bern) * inner * gen_binom(p, 2 * g as u64 + 2));
    }

    let mut rhs = Rat::zero();
    let full: u32 = if j.is_empty() { 0 } else { (1 << j.len()) - 1 };
    for mask in 0..=full {
        let (a, b) = submaps(j, mask);
        let (ja, jb) = (msum(&a), msum(&b));
        let (na, nb) = (a.len() as i64, b.len() as i64);
        for g1 in 0..=h {
            for g2 in 0..=(h - g1) {
                for g1p in 0..=(h - g1 - g2) {
                    let g2p = h - g1 - g2 - g1p;

                    let mut afac = Rat::from(2 * ja) * Rat::from_big(src.map(g1p, &doubled(&a))?);
                    if g1p == 0 && a.is_empty() {
                        afac += &Rat::one();
                    }
                    if afac.is_zero() {
                        continue;
                    }
                    let pa = 2 - 2 * g1p as i64 - na + ja;
                    let afull = c_bern(g1, &bern)
                        * Rat::new(1, 2 * g1 as i64 + 2)
                        * gen_binom(pa, 2 * g1 as u64 + 1)
                        * afac;
                    if afull.is_zero() {
                        continue;
                    }

                    let mut bfac = Rat::zero();
                    if b.is_empty() && g2 == 0 && g2p == 0 {
                        bfac += &Rat::one();
                    }
                    let mapb = Rat::from_big(src.map(g2p, &doubled(&b))?);
                    if !mapb.is_zero() {
                        let pb = 2 - 2 * g2p as i64 - nb + jb;
                        bfac += &(Rat::from(2 * (2 * g2 as i64 + 3))
                            * gen_binom(pb, 2 * g2 as u64 + 3)
                            * mapb);
                    }
                    if bfac.is_zero() {
                        continue;
                    }
                    rhs += &(afull * bfac);
                }
            }
        }
    }
    Ok(lhs - rhs)
}

/// Left- and right-hand sides of the simplified five-block identity
/// (`n >= 1`), with `B_2 = 1/6` and `B_4 = -1/30` entering through the
/// fixed blocks `(2^3-2)B_2 = 1` and `(2^5-2)B_4 = -1`.
pub fn eq56_sides(src: &mut dyn MapSource, h: u32, j: &[u32]) -> Result<(Rat, Rat)> {
    assert!(!j.is_empty(), "the simplified identity requires n >= 1");
    let n = j.len() as i64;
    let jj = msum(j);
    let bern = bernoulli_upto(2 * h as u64 + 4);
    let b2_block = c_bern(0, &bern);
    let b4_block = c_bern(1, &bern);

    let two_j = doubled(j);
    let map_at = |src: &mut dyn MapSource, g: i64, v: &[u32]| -> Result<Rat> {
        if g < 0 {
            return Ok(Rat::zero());
        }
        Ok(Rat::from_big(src.map(g as u32, v)?))
    };

    // left side
    let mut lhs = {
        let f1 = Rat::from(2 * h as i64 + n - 1);
        let f2 = Rat::from(jj + 2 - 2 * h as i64 - n);
        let f3 = Rat::from(jj - 2 * h as i64 - n);
        b2_block.clone() * f1 * f2 * f3 * map_at(src, h as i64, &two_j)?
    };
    {
        let m = map_at(src, h as i64 - 1, &two_j)?;
        if !m.is_zero() {
            let mut prod = Rat::from(jj) * m;
            for t in 1..=4i64 {
                prod = prod * Rat::from(jj + 5 - t - 2 * h as i64 - n);
            }
            lhs += &(b4_block.clone() * prod * Rat::new(1, 12));
        }
    }
    for g in 2..=h {
        let m = map_at(src, h as i64 - g as i64, &two_j)?;
        if m.is_zero() {
            continue;
        }
        let p = 2 - 2 * (h - g) as i64 - n + jj;
        lhs += &(c_bern(g, &bern) * Rat::from(2 * jj) * m * gen_binom(p, 2 * g as u64 + 2));
    }

    // right side
    let mut rhs = Rat::zero();
    let full: u32 = (1 << j.len()) - 1;
    // B_2 split block
    for mask in 1..full {
        let (a, b) = submaps(j, mask);
        let (ja, jb) = (msum(&a), msum(&b));
        let (na, nb) = (a.len() as i64, b.len() as i64);
        for g1p in 0..=h {
            let g2p = h - g1p;
            let ma = map_at(src, g1p as i64, &doubled(&a))?;
            if ma.is_zero() {
                continue;
            }
            let mb = map_at(src, g2p as i64, &doubled(&b))?;
            if mb.is_zero() {
                continue;
            }
            let fa = Rat::from(2 - 2 * g1p as i64 - na + ja) * Rat::from(ja) * ma;
            let fb = Rat::from(jb + 2 - 2 * g2p as i64 - nb)
                * Rat::from(jb + 1 - 2 * g2p as i64 - nb)
                * Rat::from(jb - 2 * g2p as i64 - nb)
                * mb;
            rhs += &(b2_block.clone() * fa * fb);
        }
    }
    // higher-Bernoulli split block, g1 + g2 > 0
    for mask in 1..full {
        let (a, b) = submaps(j, mask);
        let (ja, jb) = (msum(&a), msum(&b));
        let (na, nb) = (a.len() as i64, b.len() as i64);
        for g1 in 0..=h {
            for g2 in 0..=(h - g1) {
                if g1 + g2 == 0 {
                    continue;
                }
                for g1p in 0..=(h - g1 - g2) {
                    let g2p = h - g1 - g2 - g1p;
                    let ma = map_at(src, g1p as i64, &doubled(&a))?;
                    if ma.is_zero() {
                        continue;
                    }
                    let mb = map_at(src, g2p as i64, &doubled(&b))?;
                    if mb.is_zero() {
                        continue;
                    }
                    let pa = 2 - 2 * g1p as i64 - na + ja;
                    let pb = 2 - 2 * g2p as i64 - nb + jb;
                    rhs += &(c_bern(g1, &bern)
                        * Rat::new(1, g1 as i64 + 1)
                        * gen_binom(pa, 2 * g1 as u64 + 1)
                        * Rat::from(ja)
                        * ma
                        * Rat::from(2 * (2 * g2 as i64 + 3))
                        * gen_binom(pb, 2 * g2 as u64 + 3)
                        * mb);
                }
            }
        }
    }
    // 10 C(2-2(h-1)-n+|j|, 5) Map_{h-1}
    {
        let m = map_at(src, h as i64 - 1, &two_j)?;
        if !m.is_zero() {
            let p = 2 - 2 * (h as i64 - 1) - n + jj;
            rhs += &(b2_block.clone() * Rat::from(10) * gen_binom(p, 5) * m);
        }
    }
    // g2 = 2..h tail
    for g2 in 2..=h {
        let m = map_at(src, h as i64 - g2 as i64, &two_j)?;
        if m.is_zero() {
            continue;
        }
        let p = 2 - 2 * (h - g2) as i64 - n + jj;
        rhs += &(b2_block.clone()
            * Rat::from(2 * (2 * g2 as i64 + 3))
            * gen_binom(p, 2 * g2 as u64 + 3)
            * m);
    }
    // g1 = 1..h tail
    for g1 in 1..=h {
        let m = map_at(src, h as i64 - g1 as i64, &two_j)?;
        if m.is_zero() {
            continue;
        }
        let p = 2 - 2 * (h - g1) as i64 - n + jj;
        rhs += &(c_bern(g1, &bern)
            * Rat::new(1, 2 * g1 as i64 + 2)
            * gen_binom(p, 2 * g1 as u64 + 1)
            * m
            * Rat::from(2 * jj));
    }

    Ok((lhs, rhs))
}

/// `LHS - RHS` of the five-block identity; zero.
pub fn eq56_residual(src: &mut dyn MapSource, h: u32, j: &[u32]) -> Result<Rat> {
    let (l, r) = eq56_sides(src, h, j)?;
    Ok(l - r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pre_identity_hand_anchors() {
        let mut o = WickOracle::new(12);
        // h = 0, n = 0: both sides equal 1
        assert_eq!(pre_identity_residual(&mut o, 0, &[]).unwrap(), Rat::zero());
        // h <= 3, n = 0: generalized binomials vanish or cancel
        for h in 1..=3 {
            assert_eq!(
                pre_identity_residual(&mut o, h, &[]).unwrap(),
                Rat::zero(),
                "pre-identity failed at h = {h}, n = 0"
            );
        }
        // h = 0, n = 2, j = (2,1): both sides 24
        assert_eq!(
            pre_identity_residual(&mut o, 0, &[2, 1]).unwrap(),
            Rat::zero()
        );
    }

    #[test]
    fn eq56_hand_anchors() {
        let mut o = WickOracle::new(12);
        // h = 0, n = 1, j = (2): all blocks vanish
        let (l, r) = eq56_sides(&mut o, 0, &[2]).unwrap();
        assert!(l.is_zero() && r.is_zero());
        // h = 0, n = 2, j = (2,1): both sides 24
        let (l, r) = eq56_sides(&mut o, 0, &[2, 1]).unwrap();
        assert_eq!(l, Rat::from(24));
        assert_eq!(r, Rat::from(24));
        // h = 1, n = 1, j = (2): both sides -2 (exercises the B_4 block)
        let (l, r) = eq56_sides(&mut o, 1, &[2]).unwrap();
        assert_eq!(l, Rat::from(-2));
        assert_eq!(r, Rat::from(-2));
    }

    #[test]
    fn residuals_vanish_on_a_grid() {
        let mut o = WickOracle::new(12);
        for h in 0..=1u32 {
            for j1 in 1..=3u32 {
                assert_eq!(
                    eq56_residual(&mut o, h, &[j1]).unwrap(),
                    Rat::zero(),
                    "eq56 failed at h={h}, j=({j1})"
                );
                assert_eq!(
                    pre_identity_residual(&mut o, h, &[j1]).unwrap(),
                    Rat::zero(),
                    "pre-identity failed at h={h}, j=({j1})"
                );
                for j2 in 1..=2u32 {
                    if 2 * (j1 + j2) > 10 {
                        continue;
                    }
                    assert_eq!(
                        eq56_residual(&mut o, h, &[j1, j2]).unwrap(),
                        Rat::zero(),
                        "eq56 failed at h={h}, j=({j1},{j2})"
                    );
                    assert_eq!(
                        pre_identity_residual(&mut o, h, &[j1, j2]).unwrap(),
                        Rat::zero(),
                        "pre-identity failed at h={h}, j=({j1},{j2})"
                    );
                }
            }
        }
    }

    #[test]
    fn resolvent_backend_agrees_with_oracle() {
        let mut o = WickOracle::new(12);
        let mut r = crate::gue_resolvent::solve_gue_resolvent(14, 6).unwrap();
        for h in 0..=1u32 {
            for j in [&[2u32][..], &[3], &[2, 1]] {
                let a = eq56_residual(&mut o, h, j).unwrap();
                let b = eq56_residual(&mut r, h, j).unwrap();
                assert_eq!(a, b);
                assert!(a.is_zero());
            }
        }
    }
}
