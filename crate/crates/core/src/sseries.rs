//! Truncated formal series in the couplings `s_1, s_2, ...` whose
//! coefficients are epsilon-series over x-Laurent terms. Houses the GUE
//! free energy and everything derived from it.
//!
//! Completeness is tracked per coefficient: map-count coefficients are
//! finite epsilon-polynomials and stay `EXACT` through arithmetic, while
//! anything touching the s-free part of the free energy (whose Bernoulli
//! tail is infinite) carries a finite truncation order. The s-monomial
//! contract (`SBudget`) bounds which monomials a series vouches for.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::rat::{factorial, Rat};
use crate::report::{Failure, ResidualReport};
use crate::xlog::{lambda_shift, EpsSeries, XLogPoly, EXACT};

/// Monomial in the couplings: sorted multiset of indices (empty = s-free).
pub type SMono = Vec<u32>;

/// Merge two sorted multisets.
pub fn mono_union(a: &[u32], b: &[u32]) -> SMono {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Remove one copy of `v`; `None` if absent.
pub fn mono_remove(m: &[u32], v: u32) -> Option<SMono> {
    let pos = m.iter().position(|&x| x == v)?;
    let mut out = m.to_vec();
    out.remove(pos);
    Some(out)
}

pub fn mono_weight(m: &[u32]) -> u32 {
    m.iter().sum()
}

pub fn mono_to_string(m: &[u32]) -> String {
    use core::fmt::Write;
    let mut s = String::new();
    if m.is_empty() {
        s.push('1');
        return s;
    }
    let mut it = m.iter().peekable();
    while let Some(&v) = it.next() {
        let mut mult = 1;
        while it.peek() == Some(&&v) {
            it.next();
            mult += 1;
        }
        if !s.is_empty() {
            s.push('*');
        }
        if mult == 1 {
            let _ = write!(s, "s{v}");
        } else {
            let _ = write!(s, "s{v}^{mult}");
        }
    }
    s
}

/// Completeness contract of an `SSeries`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SBudget {
    /// Max number of coupling factors.
    pub deg: u32,
    /// Max single index.
    pub idx: u32,
    /// Max total index weight `|i|`.
    pub weight: u32,
}

impl SBudget {
    pub fn new(deg: u32, idx: u32, weight: u32) -> Self {
        SBudget { deg, idx, weight }
    }

    pub fn admits(&self, m: &[u32]) -> bool {
        m.is_empty()
            || (m.len() as u32 <= self.deg
                && m.iter().all(|&v| v >= 1 && v <= self.idx)
                && mono_weight(m) <= self.weight)
    }

    pub fn intersect(&self, other: &SBudget) -> SBudget {
        SBudget {
            deg: self.deg.min(other.deg),
            idx: self.idx.min(other.idx),
            weight: self.weight.min(other.weight),
        }
    }
}

/// All coupling monomials within a budget (sorted entries), the empty one
/// included.
pub fn multisets_within(budget: &SBudget) -> Vec<SMono> {
    fn extend(cur: &mut Vec<u32>, min: u32, budget: &SBudget, weight: u32, out: &mut Vec<SMono>) {
        if cur.len() as u32 >= budget.deg {
            return;
        }
        for v in min..=budget.idx {
            if weight + v > budget.weight {
                break;
            }
            cur.push(v);
            out.push(cur.clone());
            extend(cur, v, budget, weight + v, out);
            cur.pop();
        }
    }
    let mut out = alloc::vec![Vec::new()];
    let mut cur = Vec::new();
    extend(&mut cur, 1, budget, 0, &mut out);
    out.sort();
    out
}

/// Truncated series in the couplings with `EpsSeries` coefficients.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SSeries {
    budget: SBudget,
    /// Truncation order of coefficients not stored (absent in-budget
    /// monomials are zero to this order; `EXACT` means exactly zero).
    default_trunc: i32,
    terms: BTreeMap<SMono, EpsSeries>,
}

impl SSeries {
    pub fn zero(budget: SBudget) -> Self {
        SSeries {
            budget,
            default_trunc: EXACT,
            terms: BTreeMap::new(),
        }
    }

    /// Constant (s-free) series.
    pub fn from_eps(e: EpsSeries, budget: SBudget) -> Self {
        let mut s = Self::zero(budget);
        s.set_coeff(Vec::new(), e);
        s
    }

    pub fn budget(&self) -> SBudget {
        self.budget
    }

    pub fn default_trunc(&self) -> i32 {
        self.default_trunc
    }

    pub fn set_coeff(&mut self, m: SMono, e: EpsSeries) {
        debug_assert!(self.budget.admits(&m));
        if e.is_zero() && e.trunc() >= self.default_trunc {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, e);
        }
    }

    pub fn coeff(&self, m: &[u32]) -> EpsSeries {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| EpsSeries::zero(self.default_trunc))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SMono, &EpsSeries)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|e| e.is_zero())
    }

    /// Smallest epsilon order over nonzero coefficients.
    pub fn first_eps(&self) -> i32 {
        self.terms
            .values()
            .filter(|e| !e.is_zero())
            .map(|e| e.first())
            .min()
            .unwrap_or(EXACT)
    }

    /// Smallest truncation order over coefficients (incl. the default).
    pub fn min_trunc(&self) -> i32 {
        self.terms
            .values()
            .map(|e| e.trunc())
            .min()
            .unwrap_or(EXACT)
            .min(self.default_trunc)
    }

    /// Restrict the contract (never widens); drops out-of-budget terms.
    pub fn with_budget(&self, b: SBudget) -> Self {
        let budget = self.budget.intersect(&b);
        SSeries {
            budget,
            default_trunc: self.default_trunc,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| budget.admits(m))
                .map(|(m, e)| (m.clone(), e.clone()))
                .collect(),
        }
    }

    pub fn truncated(&self, t: i32) -> Self {
        let mut out = Self::zero(self.budget);
        out.default_trunc = self.default_trunc.min(t);
        for (m, e) in &self.terms {
            out.set_coeff(m.clone(), e.truncated_to_at_most(t));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let budget = self.budget.intersect(&other.budget);
        let mut out = Self::zero(budget);
        out.default_trunc = self.default_trunc.min(other.default_trunc);
        let keys: BTreeMap<&SMono, ()> = self
            .terms
            .keys()
            .chain(other.terms.keys())
            .map(|k| (k, ()))
            .collect();
        for (m, _) in keys {
            if !budget.admits(m) {
                continue;
            }
            out.set_coeff(m.clone(), self.coeff(m).add(&other.coeff(m)));
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        SSeries {
            budget: self.budget,
            default_trunc: self.default_trunc,
            terms: self.terms.iter().map(|(m, e)| (m.clone(), e.neg())).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        SSeries {
            budget: self.budget,
            default_trunc: self.default_trunc,
            terms: self
                .terms
                .iter()
                .map(|(m, e)| (m.clone(), e.scale(c)))
                .collect(),
        }
    }

    /// Multiply every coefficient by an exact x-Laurent factor.
    pub fn mul_xlog(&self, p: &XLogPoly) -> Self {
        let mut out = Self::zero(self.budget);
        out.default_trunc = self.default_trunc;
        for (m, e) in &self.terms {
            out.set_coeff(m.clone(), e.mul_xlog(p));
        }
        out
    }

    /// Multiply by `eps^k`.
    pub fn mul_eps(&self, k: i32) -> Self {
        let mut out = Self::zero(self.budget);
        out.default_trunc = if self.default_trunc >= EXACT {
            EXACT
        } else {
            self.default_trunc + k
        };
        for (m, e) in &self.terms {
            out.set_coeff(m.clone(), e.shift_eps(k));
        }
        out
    }

    /// Multiply by the coupling `s_i` (requires `i` within the index
    /// budget so the completeness contract stays expressible).
    pub fn mul_s(&self, i: u32) -> Self {
        assert!(i >= 1 && i <= self.budget.idx, "coupling index beyond budget");
        let budget = SBudget {
            deg: self.budget.deg + 1,
            idx: self.budget.idx,
            weight: self.budget.weight + i,
        };
        let mut out = Self::zero(budget);
        out.default_trunc = self.default_trunc;
        for (m, e) in &self.terms {
            out.set_coeff(mono_union(m, &[i]), e.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let budget = self.budget.intersect(&other.budget);
        let mut out = Self::zero(budget);

        // With finite defaults, absent (zero-to-order) coefficients bound
        // every product coefficient; fold that into one conservative cap.
        let cap = if self.default_trunc >= EXACT && other.default_trunc >= EXACT {
            EXACT
        } else {
            let fa = self.first_eps();
            let fb = other.first_eps();
            (self.default_trunc.saturating_add(fb))
                .min(other.default_trunc.saturating_add(fa))
                .min(
                    self.default_trunc
                        .saturating_add(other.default_trunc)
                        .saturating_add(1),
                )
                .min(EXACT)
        };
        out.default_trunc = cap;

        let mut acc: BTreeMap<SMono, EpsSeries> = BTreeMap::new();
        for (ma, ea) in &self.terms {
            for (mb, eb) in &other.terms {
                let m = mono_union(ma, mb);
                if !budget.admits(&m) {
                    continue;
                }
                let prod = ea.mul(eb);
                match acc.get_mut(&m) {
                    Some(e) => *e = e.add(&prod),
                    None => {
                        acc.insert(m, prod);
                    }
                }
            }
        }
        for (m, e) in acc {
            out.set_coeff(m, e.truncated_to_at_most(cap));
        }
        out
    }

    /// `d/ds_i`.
    pub fn ds(&self, i: u32) -> Self {
        let budget = SBudget {
            deg: self.budget.deg.saturating_sub(1),
            idx: self.budget.idx,
            weight: self.budget.weight.saturating_sub(i),
        };
        let mut out = Self::zero(budget);
        out.default_trunc = self.default_trunc;
        for (m, e) in &self.terms {
            let mult = m.iter().filter(|&&v| v == i).count();
            if mult == 0 {
                continue;
            }
            let reduced = mono_remove(m, i).expect("present");
            let prev = out.coeff(&reduced);
            out.set_coeff(reduced, prev.add(&e.scale(&Rat::from(mult as i64))));
        }
        out
    }

    /// Coefficientwise `d/dx` (exact).
    pub fn dx(&self) -> Self {
        let mut out = Self::zero(self.budget);
        out.default_trunc = self.default_trunc;
        for (m, e) in &self.terms {
            out.set_coeff(m.clone(), e.dx());
        }
        out
    }

    pub fn dx_n(&self, n: u32) -> Self {
        let mut out = self.clone();
        for _ in 0..n {
            out = out.dx();
        }
        out
    }

    /// Coefficientwise shift `Lambda^k = e^{k eps d_x}`.
    pub fn lambda(&self, k: i64) -> Self {
        let mut out = Self::zero(self.budget);
        out.default_trunc = self.default_trunc;
        for (m, e) in &self.terms {
            out.set_coeff(m.clone(), lambda_shift(e, k));
        }
        out
    }

    /// `exp`. The s-free part must have positive leading epsilon order;
    /// when it is nonzero the result is truncated at `sfree_trunc`.
    pub fn exp(&self, sfree_trunc: i32) -> Self {
        let sfree = self.coeff(&[]);
        let mut pos = self.clone();
        pos.terms.remove(&Vec::new());

        // nilpotent part: sum_{k<=deg} pos^k / k!
        let mut out = Self::from_eps(EpsSeries::from_xlog(XLogPoly::one()), self.budget);
        let mut pw = out.clone();
        for k in 1..=self.budget.deg.max(1) {
            pw = pw.mul(&pos);
            if pw.is_zero() {
                break;
            }
            out = out.add(&pw.scale(&Rat::new(1, factorial(k as u64))));
        }

        if sfree.is_zero() && sfree.is_exact() {
            return out;
        }
        let e0 = sfree.exp(sfree_trunc);
        let mut final_out = Self::zero(out.budget);
        final_out.default_trunc = out.default_trunc;
        for (m, e) in &out.terms {
            final_out.set_coeff(m.clone(), e.mul(&e0));
        }
        final_out
    }

    /// The genus slice `[eps^k]` as an epsilon-free series (coefficients
    /// concentrated at eps^0, exact). Panics if any coefficient is not
    /// known to order `k`.
    pub fn eps_slice(&self, k: i32) -> Self {
        let mut out = Self::zero(self.budget);
        if self.default_trunc < k {
            panic!("slice at eps^{k} beyond default truncation");
        }
        for (m, e) in &self.terms {
            assert!(e.trunc() >= k, "slice at eps^{k} beyond coefficient order");
            let c = e.coeff(k);
            if !c.is_zero() {
                out.set_coeff(m.clone(), EpsSeries::from_xlog(c));
            }
        }
        out
    }

    /// Keep only monomials with all indices even (the even-coupling
    /// restriction `s_odd = 0`).
    pub fn restrict_even(&self) -> Self {
        SSeries {
            budget: self.budget,
            default_trunc: self.default_trunc,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.iter().all(|&v| v % 2 == 0))
                .map(|(m, e)| (m.clone(), e.clone()))
                .collect(),
        }
    }

    /// Nonzero stored coefficients, keyed for reporting.
    pub fn nonzero_entries(&self) -> Vec<(String, String)> {
        use core::fmt::Write;
        let mut out = Vec::new();
        for (m, e) in &self.terms {
            if !self.budget.admits(m) {
                continue;
            }
            for (k, c) in e.iter() {
                let mut key = String::new();
                let _ = write!(key, "{}*eps^{}", mono_to_string(m), k);
                let mut val = String::new();
                let _ = write!(val, "{c:?}");
                out.push((key, val));
            }
        }
        out
    }
}

/// Check that `r` vanishes on every in-budget monomial through epsilon
/// order `required_eps` (or completely, where exact). Coefficients known
/// to less than the required order are failures in their own right.
pub fn collect_residuals(r: &SSeries, required_eps: i32, report: &mut ResidualReport) {
    use core::fmt::Write;
    let budget = r.budget();
    for m in multisets_within(&budget) {
        let c = r.coeff(&m);
        report.checked += 1;
        if c.trunc() < required_eps {
            report.failures.push(Failure {
                key: mono_to_string(&m),
                residual: {
                    let mut s = String::new();
                    let _ = write!(
                        s,
                        "known only to eps^{} < required {}",
                        c.trunc(),
                        required_eps
                    );
                    s
                },
            });
            continue;
        }
        for (k, p) in c.iter() {
            let mut key = String::new();
            let _ = write!(key, "{}*eps^{}", mono_to_string(&m), k);
            let mut val = String::new();
            let _ = write!(val, "{p:?}");
            report.failures.push(Failure { key, residual: val });
        }
    }
    let mut note = String::new();
    let _ = write!(
        note,
        "budget deg<={} idx<={} |i|<={}, eps required {}, min known {}",
        budget.deg,
        budget.idx,
        budget.weight,
        required_eps,
        r.min_trunc()
    );
    report.notes.push(note);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xlog::XKey;
    use alloc::vec;

    fn b() -> SBudget {
        SBudget::new(3, 6, 12)
    }

    fn xs(p: i64) -> XLogPoly {
        XLogPoly::x_pow(p, Rat::one())
    }

    #[test]
    fn product_and_derivative() {
        let mut a = SSeries::zero(b());
        a.set_coeff(vec![1], EpsSeries::from_xlog(xs(1)));
        a.set_coeff(vec![2], EpsSeries::from_xlog(xs(2)));
        let p = a.mul(&a);
        assert_eq!(p.coeff(&[1, 1]).coeff(0), xs(2));
        assert_eq!(p.coeff(&[1, 2]).coeff(0), xs(3).scale(&Rat::from(2)));
        assert!(p.coeff(&[1, 1]).is_exact());
        let d = p.ds(1);
        assert_eq!(d.coeff(&[1]).coeff(0), xs(2).scale(&Rat::from(2)));
        assert_eq!(d.coeff(&[2]).coeff(0), xs(3).scale(&Rat::from(2)));
    }

    #[test]
    fn exp_keeps_exactness_without_sfree_part() {
        // exp(s_2 * x^2 / eps^2) within degree budget 3
        let mut f = SSeries::zero(b());
        f.set_coeff(vec![2], EpsSeries::exact(-2, vec![xs(2)]));
        let z = f.exp(0);
        assert_eq!(z.coeff(&[]).coeff(0), XLogPoly::one());
        assert!(z.coeff(&[2]).is_exact());
        assert_eq!(z.coeff(&[2]).coeff(-2), xs(2));
        assert_eq!(z.coeff(&[2, 2]).coeff(-4), xs(4).scale(&Rat::new(1, 2)));
        assert_eq!(
            z.coeff(&[2, 2, 2]).coeff(-6),
            xs(6).scale(&Rat::new(1, 6))
        );
    }

    #[test]
    fn exp_with_truncated_sfree_part() {
        let mut f = SSeries::zero(b());
        f.set_coeff(Vec::new(), EpsSeries::monomial(2, xs(-1), 6));
        f.set_coeff(vec![2], EpsSeries::exact(-2, vec![xs(2)]));
        let z = f.exp(6);
        // s-free coefficient: exp(eps^2/x) to eps^6
        assert_eq!(z.coeff(&[]).coeff(4), xs(-2).scale(&Rat::new(1, 2)));
        // mixed term picks up the finite truncation honestly
        let c = z.coeff(&[2]);
        assert!(!c.is_exact());
        assert_eq!(c.coeff(0), xs(1));
    }

    #[test]
    fn lambda_shift_acts_on_x() {
        let mut f = SSeries::zero(b());
        f.set_coeff(vec![1], EpsSeries::from_xlog(xs(2)));
        let g = f.lambda(1);
        let c = g.coeff(&[1]);
        assert!(c.is_exact());
        assert_eq!(c.coeff(0), xs(2));
        assert_eq!(c.coeff(1), XLogPoly::x_pow(1, Rat::from(2)));
        assert_eq!(c.coeff(2), XLogPoly::one());
    }

    #[test]
    fn even_restriction() {
        let mut f = SSeries::zero(b());
        f.set_coeff(vec![1], EpsSeries::from_xlog(xs(1)));
        f.set_coeff(vec![2], EpsSeries::from_xlog(xs(1)));
        f.set_coeff(vec![2, 4], EpsSeries::from_xlog(xs(1)));
        f.set_coeff(vec![2, 3], EpsSeries::from_xlog(xs(1)));
        let e = f.restrict_even();
        assert!(e.coeff(&[1]).is_zero());
        assert!(e.coeff(&[2, 3]).is_zero());
        assert!(!e.coeff(&[2]).is_zero());
        assert!(!e.coeff(&[2, 4]).is_zero());
    }

    #[test]
    fn slices_are_exact_and_multiply() {
        let mut f = SSeries::zero(b());
        f.set_coeff(
            vec![2],
            EpsSeries::exact(0, vec![xs(1), XLogPoly::zero(), xs(0)]),
        );
        let s0 = f.eps_slice(0);
        let s2 = f.eps_slice(2);
        assert_eq!(s0.coeff(&[2]).coeff(0), xs(1));
        assert_eq!(s2.coeff(&[2]).coeff(0), XLogPoly::one());
        let p = s0.mul(&s2);
        assert_eq!(
            p.coeff(&[2, 2]).coeff(0).coeff(XKey::new(1, 0, 0)),
            Rat::from(1)
        );
    }

    #[test]
    fn residual_collector_flags_insufficient_order() {
        let mut f = SSeries::zero(SBudget::new(1, 2, 2));
        f.set_coeff(vec![2], EpsSeries::zero(3));
        let mut rep = ResidualReport::new("t");
        collect_residuals(&f, 6, &mut rep);
        assert_eq!(rep.failures.len(), 1);
        assert!(rep.failures[0].residual.contains("known only to"));
    }
}
