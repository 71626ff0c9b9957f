//! Ground-truth oracle for GUE correlators: Wick-rule enumeration over
//! perfect matchings of half-edges, connected parts by cumulant inversion,
//! map counts as coefficients of the genus expansion, the classical closed
//! forms for one- and two-point genus-0 counts, and the assembly and PDE
//! checks of the GUE free energy.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{ExactError, Result};
use crate::rat::{bernoulli_upto, binomial, factorial, Rat};
use crate::report::ResidualReport;
use crate::sseries::{collect_residuals, multisets_within, SBudget, SSeries};
use crate::xlog::{EpsSeries, XKey, XLogPoly};

/// Sorted multiset of positive cell sizes `(i_1, ..., i_n)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct IndexMultiset(Vec<u32>);

impl IndexMultiset {
    pub fn new(mut entries: Vec<u32>) -> Self {
        assert!(entries.iter().all(|&v| v >= 1), "cell sizes must be >= 1");
        entries.sort_unstable();
        IndexMultiset(entries)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    /// `|i| = sum of entries`.
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Insert one more cell, keeping order.
    pub fn with(&self, v: u32) -> Self {
        let mut e = self.0.clone();
        e.push(v);
        Self::new(e)
    }

    /// Sub-multiset selected by a bitmask over positions.
    fn subset(&self, mask: u32) -> Self {
        let mut e = Vec::new();
        for (p, &v) in self.0.iter().enumerate() {
            if mask & (1 << p) != 0 {
                e.push(v);
            }
        }
        IndexMultiset(e)
    }
}

/// Polynomial in the matrix size `N`: sparse map N-exponent -> coefficient.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct CorrPolyN {
    coeffs: BTreeMap<i64, BigInt>,
}

impl CorrPolyN {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, e: i64) -> BigInt {
        self.coeffs.get(&e).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &BigInt)> {
        self.coeffs.iter()
    }

    fn insert(&mut self, e: i64, c: BigInt) {
        if !c.is_zero() {
            self.coeffs.insert(e, c);
        }
    }

    fn add_assign(&mut self, other: &Self) {
        for (e, c) in &other.coeffs {
            let v = self.coeffs.entry(*e).or_insert_with(BigInt::zero);
            *v += c;
            if v.is_zero() {
                self.coeffs.remove(e);
            }
        }
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &other.coeffs {
                let v = out.coeffs.entry(ea + eb).or_insert_with(BigInt::zero);
                *v += ca * cb;
            }
        }
        out.coeffs.retain(|_, c| !c.is_zero());
        out
    }

    fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        CorrPolyN {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, c * k)).collect(),
        }
    }

    /// Value at `N = 1` (counts matchings for full correlators).
    pub fn eval_one(&self) -> BigInt {
        self.coeffs.values().sum()
    }

    pub fn to_string_in_n(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (e, c) in self.coeffs.iter().rev() {
            parts.push(match e {
                0 => format!("{c}"),
                1 => format!("{c}*N"),
                _ => format!("{c}*N^{e}"),
            });
        }
        parts.join(" + ")
    }
}

/// Enumerate all perfect matchings of the half-edges of `n` cyclic
/// vertices with the given valences, summing `N^{cycles(gamma o mu)}`.
fn wick_enumerate(valences: &[u32]) -> CorrPolyN {
    let m: usize = valences.iter().map(|&v| v as usize).sum();
    if m == 0 {
        let mut out = CorrPolyN::zero();
        out.insert(0, BigInt::one());
        return out;
    }
    if m % 2 == 1 {
        return CorrPolyN::zero();
    }
    // gamma: successor along each cell boundary
    let mut gamma = vec![0usize; m];
    let mut base = 0usize;
    for &v in valences {
        let v = v as usize;
        for k in 0..v {
            gamma[base + k] = base + (k + 1) % v;
        }
        base += v;
    }

    let mut mate = vec![usize::MAX; m];
    let mut counts = vec![0u64; m / 2 + valences.len() + 1];

    fn recurse(gamma: &[usize], mate: &mut [usize], counts: &mut [u64]) {
        let m = mate.len();
        let h = match mate.iter().position(|&x| x == usize::MAX) {
            Some(h) => h,
            None => {
                // complete matching: count cycles of gamma o mu
                let mut seen = 0u32;
                let mut cycles = 0usize;
                for start in 0..m {
                    if seen & (1 << start) != 0 {
                        continue;
                    }
                    cycles += 1;
                    let mut cur = start;
                    loop {
                        seen |= 1 << cur;
                        cur = gamma[mate[cur]];
                        if cur == start {
                            break;
                        }
                    }
                }
                counts[cycles] += 1;
                return;
            }
        };
        for p in (h + 1)..m {
            if mate[p] != usize::MAX {
                continue;
            }
            mate[h] = p;
            mate[p] = h;
            recurse(gamma, mate, counts);
            mate[h] = usize::MAX;
            mate[p] = usize::MAX;
        }
    }

    recurse(&gamma, &mut mate, &mut counts);

    let mut out = CorrPolyN::zero();
    for (c, &cnt) in counts.iter().enumerate() {
        if cnt > 0 {
            out.insert(c as i64, BigInt::from(cnt));
        }
    }
    out
}

/// Catalan number `C_j`, the genus-0 one-point count `Map_0(2j)`.
pub fn catalan_onepoint(j: u32) -> BigInt {
    assert!(j >= 1);
    let b = binomial(2 * j as u64, j as u64);
    let (q, r) = num_integer::Integer::div_rem(&b, &BigInt::from(j + 1));
    debug_assert!(r.is_zero());
    q
}

/// Parity of the two-point closed form.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TwoPointParity {
    Even,
    Odd,
}

/// Genus-0 two-point counts: `Map_0(2j1, 2j2)` (even) and
/// `Map_0(2j1-1, 2j2-1)` (odd).
pub fn genus0_twopoint(j1: u32, j2: u32, parity: TwoPointParity) -> BigInt {
    assert!(j1 >= 1 && j2 >= 1);
    let (j1, j2) = (j1 as u64, j2 as u64);
    let (num, den) = match parity {
        TwoPointParity::Even => (
            binomial(2 * j1, j1) * binomial(2 * j2, j2) * BigInt::from(j1 * j2),
            BigInt::from(j1 + j2),
        ),
        TwoPointParity::Odd => (
            binomial(2 * j1 - 1, j1) * binomial(2 * j2 - 1, j2) * BigInt::from(j1 * j2),
            BigInt::from(j1 + j2 - 1),
        ),
    };
    let (q, r) = num_integer::Integer::div_rem(&num, &den);
    debug_assert!(r.is_zero());
    q
}

/// Wick-rule oracle with memoized full and connected correlators.
pub struct WickOracle {
    bound: u32,
    full: BTreeMap<Vec<u32>, CorrPolyN>,
    conn: BTreeMap<Vec<u32>, CorrPolyN>,
}

impl WickOracle {
    /// `bound` caps `|i|`; the enumeration walks `(|i|-1)!!` matchings.
    pub fn new(bound: u32) -> Self {
        assert!(bound <= 20, "wick bound is hard-capped at 20");
        WickOracle {
            bound,
            full: BTreeMap::new(),
            conn: BTreeMap::new(),
        }
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    fn check_bound(&self, i: &IndexMultiset) -> Result<()> {
        if i.total() > self.bound {
            return Err(ExactError::BoundExceeded(format!(
                "|i| = {} exceeds wick bound {}",
                i.total(),
                self.bound
            )));
        }
        Ok(())
    }

    /// Full (disconnected) correlator as a polynomial in `N`.
    pub fn full_correlator(&mut self, i: &IndexMultiset) -> Result<CorrPolyN> {
        self.check_bound(i)?;
        if i.total() % 2 == 1 {
            return Ok(CorrPolyN::zero());
        }
        if let Some(c) = self.full.get(i.entries()) {
            return Ok(c.clone());
        }
        let c = wick_enumerate(i.entries());
        self.full.insert(i.entries().to_vec(), c.clone());
        Ok(c)
    }

    /// Connected correlator: cumulant of the full correlators.
    ///
    /// Computed by the subset form of set-partition Moebius inversion:
    /// `conn(S) = full(S) - sum_{T a proper subset of S containing the
    /// first position} conn(T) * full(S \ T)`.
    pub fn connected_correlator(&mut self, i: &IndexMultiset) -> Result<CorrPolyN> {
        self.check_bound(i)?;
        if i.n() == 0 {
            return Ok(CorrPolyN::zero());
        }
        if let Some(c) = self.conn.get(i.entries()) {
            return Ok(c.clone());
        }
        let n = i.n();
        let mut acc = self.full_correlator(i)?;
        if n > 1 {
            let all = (1u32 << n) - 1;
            // masks containing position 0, proper subsets
            let mut mask = 1u32;
            while mask < all {
                if mask & 1 != 0 {
                    let t = i.subset(mask);
                    let rest = i.subset(all & !mask);
                    let ct = self.connected_correlator(&t)?;
                    let mrest = self.full_correlator(&rest)?;
                    let prod = ct.mul(&mrest);
                    acc.add_assign(&prod.scale(&BigInt::from(-1)));
                }
                mask += 2; // keep position 0 selected
            }
        }
        self.conn.insert(i.entries().to_vec(), acc.clone());
        Ok(acc)
    }

    /// Preload a connected correlator computed elsewhere (used by
    /// parallel drivers that farm multisets out to worker oracles).
    pub fn prime_connected(&mut self, i: &IndexMultiset, c: CorrPolyN) {
        self.conn.insert(i.entries().to_vec(), c);
    }

    /// Literal set-partition Moebius sum; exponential cost, used as an
    /// independent cross-check for small `n`.
    pub fn connected_by_partition_sum(&mut self, i: &IndexMultiset) -> Result<CorrPolyN> {
        let n = i.n();
        assert!(n <= 5, "partition sum is for small cross-checks only");
        let mut acc = CorrPolyN::zero();
        for part in set_partitions(n) {
            let blocks = part.len();
            let mut prod = CorrPolyN::zero();
            prod.insert(0, BigInt::one());
            for block in &part {
                let mut mask = 0u32;
                for &p in block {
                    mask |= 1 << p;
                }
                prod = prod.mul(&self.full_correlator(&i.subset(mask))?);
            }
            let sign = if (blocks - 1) % 2 == 0 {
                BigInt::one()
            } else {
                -BigInt::one()
            };
            acc.add_assign(&prod.scale(&(sign * factorial(blocks as u64 - 1))));
        }
        Ok(acc)
    }

    /// Largest admissible genus for a multiset, from the exponent
    /// constraint `2 - 2g - n + |i|/2 >= 1`.
    pub fn genus_cap(i: &IndexMultiset) -> Option<u32> {
        let num = i.total() as i64 - 2 * i.n() as i64 + 2;
        if num < 0 {
            None
        } else {
            Some((num / 4) as u32)
        }
    }

    /// `Map_g(i)`: coefficient of `N^(2 - 2g + |i|/2 - n)` in the
    /// connected correlator; zero when `|i|` is odd or the genus is
    /// inadmissible.
    pub fn map_count(&mut self, g: u32, i: &IndexMultiset) -> Result<BigInt> {
        if i.n() == 0 || i.total() % 2 == 1 {
            return Ok(BigInt::zero());
        }
        match Self::genus_cap(i) {
            Some(cap) if g <= cap => {}
            _ => return Ok(BigInt::zero()),
        }
        let conn = self.connected_correlator(i)?;
        let e = 2 - 2 * g as i64 + i.total() as i64 / 2 - i.n() as i64;
        Ok(conn.coeff(e))
    }

    /// `Map_g(2, i) - |i| Map_g(i) - delta_{g,0} delta_{n,0}`; zero by the
    /// dilation identity.
    pub fn check_dilation(&mut self, g: u32, i: &IndexMultiset) -> Result<BigInt> {
        let lhs = self.map_count(g, &i.with(2))?;
        let rhs = self.map_count(g, i)? * BigInt::from(i.total());
        let delta = if g == 0 && i.n() == 0 {
            BigInt::one()
        } else {
            BigInt::zero()
        };
        Ok(lhs - rhs - delta)
    }
}

/// All set partitions of `{0..n-1}`.
fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for sub in set_partitions(n - 1) {
        // element n-1 joins each existing block or starts a new one
        for b in 0..sub.len() {
            let mut p = sub.clone();
            p[b].push(n - 1);
            out.push(p);
        }
        let mut p = sub;
        p.push(vec![n - 1]);
        out.push(p);
    }
    out
}

/// The GUE free energy as a coupling series: exact map-count coefficients
/// plus the s-free part
/// `x^2/(2 eps^2)(log x - 3/2) - (log x)/12 + zeta'(-1)
///  + sum_{g>=2} eps^{2g-2} B_{2g} / (4g(g-1) x^{2g-2})`,
/// whose Bernoulli tail is truncated at `sfree_eps_trunc`.
pub fn assemble_gue_free_energy(
    oracle: &mut WickOracle,
    budget: SBudget,
    sfree_eps_trunc: i32,
) -> Result<SSeries> {
    let mut f = SSeries::zero(budget);
    f.set_coeff(Vec::new(), gue_sfree_part(sfree_eps_trunc));

    for m in multisets_within(&budget) {
        if m.is_empty() {
            continue;
        }
        let i = IndexMultiset::new(m.clone());
        let n = i.n() as i64;
        let total = i.total() as i64;
        if total % 2 == 1 {
            continue;
        }
        let gmax = match WickOracle::genus_cap(&i) {
            Some(c) => c,
            None => continue,
        };
        // multinomial bookkeeping: coefficient of the monomial is
        // Map / prod(mult_d!)
        let mut denom = Rat::one();
        let mut run = 1u64;
        for w in m.windows(2) {
            if w[0] == w[1] {
                run += 1;
            } else {
                denom = denom * Rat::from_big(factorial(run));
                run = 1;
            }
        }
        denom = denom * Rat::from_big(factorial(run));

        let mut coeff = EpsSeries::zero_exact();
        for g in 0..=gmax {
            let map = oracle.map_count(g, &i)?;
            if map.is_zero() {
                continue;
            }
            let xexp = 2 - 2 * g as i64 - n + total / 2;
            let c = Rat::from_big(map) / denom.clone();
            coeff = coeff.add(&EpsSeries::exact(
                2 * g as i32 - 2,
                vec![XLogPoly::x_pow(xexp, c)],
            ));
        }
        f.set_coeff(m, coeff);
    }
    Ok(f)
}

/// The s-free part of the GUE free energy, complete to `eps_trunc`.
pub fn gue_sfree_part(eps_trunc: i32) -> EpsSeries {
    let mut sfree = EpsSeries::monomial(
        -2,
        XLogPoly::from_terms(vec![
            (XKey::new(2, 1, 0), Rat::new(1, 2)),
            (XKey::new(2, 0, 0), Rat::new(-3, 4)),
        ]),
        eps_trunc,
    );
    sfree = sfree.add(&EpsSeries::monomial(
        0,
        XLogPoly::from_terms(vec![
            (XKey::new(0, 1, 0), Rat::new(-1, 12)),
            (XKey::new(0, 0, 1), Rat::one()),
        ]),
        eps_trunc,
    ));
    let gmax = ((eps_trunc + 2) / 2).max(1) as u64;
    let bern = bernoulli_upto(2 * gmax);
    for g in 2..=gmax {
        if 2 * g as i32 - 2 > eps_trunc {
            break;
        }
        let c = bern[2 * g as usize].clone() / Rat::from(4 * g as i64 * (g as i64 - 1));
        sfree = sfree.add(&EpsSeries::monomial(
            2 * g as i32 - 2,
            XLogPoly::x_pow(2 - 2 * g as i64, c),
            eps_trunc,
        ));
    }
    sfree
}

/// Residuals of the string and scaling PDEs on the normalized partition
/// function `Z = exp(F - F|_{s=0})`.
///
/// Both PDEs are linear in `Z` with coefficients free of `x`-derivatives,
/// so the s-free exponential factor divides out exactly; verifying on the
/// normalized exponential is equivalent to verifying on the full one. The
/// `i = 1` summand's undefined `d/ds_0` is taken to be zero.
pub fn verify_gue_pdes(f: &SSeries, required_eps: i32) -> (ResidualReport, ResidualReport) {
    let mut fnorm = f.clone();
    fnorm.set_coeff(Vec::new(), EpsSeries::zero_exact());
    let z = fnorm.exp(required_eps);
    let idx = f.budget().idx;

    let x1 = XLogPoly::x_pow(1, Rat::one());
    let x2 = XLogPoly::x_pow(2, Rat::one());

    // string: sum_{i>=2} i s_i dZ/ds_{i-1} - dZ/ds_1 + (x s_1/eps^2) Z
    let mut string = z.ds(1).neg();
    for i in 2..=idx {
        string = string.add(&z.ds(i - 1).mul_s(i).scale(&Rat::from(i as i64)));
    }
    string = string.add(&z.mul_xlog(&x1).mul_s(1).mul_eps(-2));

    // scaling: sum_{i>=1} i s_i dZ/ds_i - dZ/ds_2 + (x^2/eps^2) Z
    let mut scaling = z.ds(2).neg();
    for i in 1..=idx {
        scaling = scaling.add(&z.ds(i).mul_s(i).scale(&Rat::from(i as i64)));
    }
    scaling = scaling.add(&z.mul_xlog(&x2).mul_eps(-2));

    let mut rs = ResidualReport::new("stringG");
    collect_residuals(&string, required_eps, &mut rs);
    let mut rc = ResidualReport::new("scalingG");
    collect_residuals(&scaling, required_eps, &mut rc);
    (rs, rc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(v: &[u32]) -> IndexMultiset {
        IndexMultiset::new(v.to_vec())
    }

    #[test]
    fn full_correlator_small_cases() {
        let mut o = WickOracle::new(16);
        let c2 = o.full_correlator(&ms(&[2])).unwrap();
        assert_eq!(c2.coeff(2), BigInt::from(1));
        assert_eq!(c2.eval_one(), BigInt::from(1));

        let c4 = o.full_correlator(&ms(&[4])).unwrap();
        assert_eq!(c4.coeff(3), BigInt::from(2));
        assert_eq!(c4.coeff(1), BigInt::from(1));
        assert_eq!(c4.eval_one(), BigInt::from(3));

        assert!(o.full_correlator(&ms(&[3])).unwrap().is_zero());
    }

    #[test]
    fn matching_count_at_n_equals_one() {
        let mut o = WickOracle::new(16);
        // (2j-1)!! matchings in every even case
        for i in [ms(&[6]), ms(&[2, 4]), ms(&[1, 3]), ms(&[2, 2, 2])] {
            let tot = i.total() as u64;
            let mut dfact = BigInt::one();
            let mut k = 1u64;
            while k < tot {
                dfact *= BigInt::from(k);
                k += 2;
            }
            assert_eq!(o.full_correlator(&i).unwrap().eval_one(), dfact);
        }
    }

    #[test]
    fn connected_small_cases() {
        let mut o = WickOracle::new(16);
        let c = o.connected_correlator(&ms(&[2, 2])).unwrap();
        assert_eq!(c.coeff(2), BigInt::from(2));
        assert_eq!(c.coeff(4), BigInt::from(0));

        let c11 = o.connected_correlator(&ms(&[1, 1])).unwrap();
        assert_eq!(c11.coeff(1), BigInt::from(1));

        // n = 1: connected = full
        assert_eq!(
            o.connected_correlator(&ms(&[2])).unwrap(),
            o.full_correlator(&ms(&[2])).unwrap()
        );
    }

    #[test]
    fn connected_matches_partition_sum() {
        let mut o = WickOracle::new(14);
        for i in [
            ms(&[2, 2]),
            ms(&[1, 1, 2]),
            ms(&[2, 2, 2]),
            ms(&[1, 1, 1, 1]),
            ms(&[4, 2, 1, 1]),
        ] {
            let fast = o.connected_correlator(&i).unwrap();
            let slow = o.connected_by_partition_sum(&i).unwrap();
            assert_eq!(fast, slow, "mismatch at {i:?}");
        }
    }

    #[test]
    fn map_counts() {
        let mut o = WickOracle::new(16);
        assert_eq!(o.map_count(0, &ms(&[4])).unwrap(), BigInt::from(2));
        assert_eq!(o.map_count(1, &ms(&[4])).unwrap(), BigInt::from(1));
        assert_eq!(o.map_count(0, &ms(&[4, 2])).unwrap(), BigInt::from(8));
        assert_eq!(o.map_count(0, &ms(&[2])).unwrap(), BigInt::from(1));
        // odd total or inadmissible genus vanish
        assert_eq!(o.map_count(0, &ms(&[3])).unwrap(), BigInt::from(0));
        assert_eq!(o.map_count(1, &ms(&[2, 2])).unwrap(), BigInt::from(0));
    }

    #[test]
    fn closed_forms_match_oracle() {
        let mut o = WickOracle::new(14);
        assert_eq!(catalan_onepoint(1), BigInt::from(1));
        assert_eq!(catalan_onepoint(3), BigInt::from(5));
        assert_eq!(catalan_onepoint(7), BigInt::from(429));
        assert_eq!(
            o.map_count(0, &ms(&[14])).unwrap(),
            catalan_onepoint(7)
        );

        assert_eq!(
            genus0_twopoint(1, 1, TwoPointParity::Even),
            BigInt::from(2)
        );
        assert_eq!(genus0_twopoint(1, 1, TwoPointParity::Odd), BigInt::from(1));
        assert_eq!(genus0_twopoint(2, 1, TwoPointParity::Odd), BigInt::from(3));
        assert_eq!(
            o.map_count(0, &ms(&[3, 1])).unwrap(),
            genus0_twopoint(2, 1, TwoPointParity::Odd)
        );
        assert_eq!(
            o.map_count(0, &ms(&[4, 2])).unwrap(),
            genus0_twopoint(2, 1, TwoPointParity::Even)
        );
    }

    #[test]
    fn dilation_residuals_vanish() {
        let mut o = WickOracle::new(16);
        assert_eq!(o.check_dilation(0, &ms(&[])).unwrap(), BigInt::zero());
        assert_eq!(o.check_dilation(0, &ms(&[4])).unwrap(), BigInt::zero());
        assert_eq!(o.check_dilation(1, &ms(&[4])).unwrap(), BigInt::zero());
        assert_eq!(o.check_dilation(0, &ms(&[3, 1])).unwrap(), BigInt::zero());
    }

    #[test]
    fn free_energy_coefficients() {
        let mut o = WickOracle::new(12);
        let f = assemble_gue_free_energy(&mut o, SBudget::new(2, 4, 8), 4).unwrap();
        // s_2 coefficient: x^2 / eps^2, exact
        let c2 = f.coeff(&[2]);
        assert!(c2.is_exact());
        assert_eq!(c2.coeff(-2), XLogPoly::x_pow(2, Rat::one()));
        // s_1^2 coefficient: (x/2) eps^{2g-2} = x/(2 eps^2) at genus 0
        // (Map_0(1,1) = 1, bookkeeping 1/2!)
        let c11 = f.coeff(&[1, 1]);
        assert_eq!(c11.coeff(-2), XLogPoly::x_pow(1, Rat::new(1, 2)));
        // s-free eps^0 part: -(log x)/12 + zeta'(-1)
        let c0 = f.coeff(&[]);
        assert_eq!(c0.coeff(0).coeff(XKey::new(0, 1, 0)), Rat::new(-1, 12));
        assert_eq!(c0.coeff(0).coeff(XKey::new(0, 0, 1)), Rat::one());
        // Bernoulli tail: eps^2 coefficient B_4/(8 x^2) = -1/(240 x^2)
        assert_eq!(c0.coeff(2).coeff(XKey::new(-2, 0, 0)), Rat::new(-1, 240));
    }

    #[test]
    fn gue_pdes_hold_at_small_budget() {
        let mut o = WickOracle::new(12);
        let f = assemble_gue_free_energy(&mut o, SBudget::new(3, 5, 11), 10).unwrap();
        let (s, c) = verify_gue_pdes(&f, 8);
        assert!(s.ok(), "string failures: {:?}", s.failures);
        assert!(c.ok(), "scaling failures: {:?}", c.failures);
        assert!(s.checked > 0 && c.checked > 0);
    }
}
