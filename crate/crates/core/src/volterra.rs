//! Even-coupling restriction: the even GUE free energy, Volterra lattice
//! checks, and the operator identities that feed the per-genus identity
//! of the proof.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::rat::{bernoulli_upto, factorial, Rat};
use crate::report::ResidualReport;
use crate::sseries::{collect_residuals, SSeries};
use crate::toda::{gue_vw, lax_operator, TodaRing};
use crate::xlog::{EpsSeries, XLogPoly};

/// `F^eG`: the free energy with all odd couplings set to zero.
pub fn even_free_energy(f: &SSeries) -> SSeries {
    f.restrict_even()
}

/// `v^G` vanishes identically at `s_odd = 0` (tested, not assumed).
pub fn verify_v_vanishes(f: &SSeries, w_trunc: i32) -> ResidualReport {
    let (v, _) = gue_vw(f, w_trunc);
    let mut rep = ResidualReport::new("vvanishi");
    collect_residuals(&v.restrict_even(), 0, &mut rep);
    rep
}

/// `w^eG` from the even free energy via the defining second difference.
pub fn even_w(f_even: &SSeries, w_trunc: i32) -> SSeries {
    gue_vw(f_even, w_trunc).1
}

/// Volterra lattice equation:
/// `eps dw/ds_2 = w (Lambda(w) - Lambda^{-1}(w))`.
pub fn verify_volterra(f_even: &SSeries, w_trunc: i32, required_eps: i32) -> ResidualReport {
    let w = even_w(f_even, w_trunc);
    let resid = w
        .ds(2)
        .mul_eps(1)
        .sub(&w.mul(&w.lambda(1).sub(&w.lambda(-1))));
    let mut rep = ResidualReport::new("Volterraeq");
    collect_residuals(&resid, required_eps, &mut rep);
    rep
}

/// Volterra hierarchy flow `j`: `eps dw/ds_{2j}` against the
/// `Lambda^{-1}` component of `[(L_e^{2j})_+, L_e]` with
/// `L_e = Lambda + w Lambda^{-1}`; every other shift degree of the
/// commutator must vanish.
pub fn verify_volterra_hierarchy(
    f_even: &SSeries,
    j: u32,
    w_trunc: i32,
    required_eps: i32,
) -> ResidualReport {
    assert!((1..=2).contains(&j), "volterra flows implemented for j <= 2");
    let w = even_w(f_even, w_trunc);
    let zero = TodaRing::zero_like(&w);
    let le = lax_operator(&zero, &w);
    let comm = le.pow(2 * j).plus_part().commutator(&le);

    let mut rep = ResidualReport::new("Vlattice");
    for d in comm.support() {
        if d == -1 {
            continue;
        }
        let c = comm.coeff(d).cloned().unwrap_or_else(|| zero.clone());
        let mut local = ResidualReport::new("");
        collect_residuals(&c, required_eps, &mut local);
        for mut fail in local.failures {
            fail.key = format!("Lambda^{d}:{}", fail.key);
            rep.failures.push(fail);
        }
        rep.checked += local.checked;
    }
    let rhs = comm.coeff(-1).cloned().unwrap_or_else(|| zero.clone());
    let resid = w.ds(2 * j).mul_eps(1).sub(&rhs);
    let mut local = ResidualReport::new("");
    collect_residuals(&resid, required_eps, &mut local);
    rep.checked += local.checked;
    rep.failures.extend(local.failures);
    rep.notes.push(format!(
        "flow 2j = {} against the Lambda^-1 commutator component",
        2 * j
    ));
    rep
}

/// `eps (Lambda-1)/(Lambda+1)` applied coefficientwise through the
/// Bernoulli expansion.
pub fn tanh_half_sseries(f: &SSeries, order: i32) -> SSeries {
    let mut out = SSeries::zero(f.budget());
    for (m, e) in f.terms() {
        out.set_coeff(m.clone(), crate::xlog::tanh_half_operator(e, order));
    }
    out
}

/// `(Lambda - 1)(1 - Lambda^{-1}) f`.
fn second_difference(f: &SSeries) -> SSeries {
    f.lambda(1).add(&f.lambda(-1)).sub(f).sub(f)
}

/// The five even-coupling identities.
///
/// * `weGanother`: `eps (Lambda-1)/(Lambda+1) dF^eG/ds_2 = w^eG`.
/// * `tauid1`: the same left side equals
///   `exp((Lambda-1)(1-Lambda^{-1}) F^eG)` (recomputed independently).
/// * `idFeg1`: the mixed-derivative product identity.
/// * `idFeg1norm`: its normalized form, the `1/x` emerging from the
///   s-free part.
/// * `identgenush`: the per-genus identity for `h <= h_max`, on the
///   epsilon slices of the normalized free energy.
pub fn verify_feg_identities(
    f_even: &SSeries,
    w_trunc: i32,
    required_eps: i32,
    h_max: u32,
) -> Vec<ResidualReport> {
    let mut out = Vec::new();
    let w = even_w(f_even, w_trunc);
    let tanh_order = w_trunc;

    // weGanother
    let lhs = tanh_half_sseries(&f_even.ds(2), tanh_order);
    let resid = lhs.sub(&w);
    let mut rep = ResidualReport::new("weGanother");
    collect_residuals(&resid, required_eps, &mut rep);
    out.push(rep);

    // tauid1: right side rebuilt from the second difference directly
    let mut p = second_difference(f_even);
    let sfree = p.coeff(&[]);
    let corrected = sfree.sub(&EpsSeries::from_xlog(XLogPoly::log_x(Rat::one())));
    p.set_coeff(Vec::new(), corrected);
    let rhs = p.exp(w_trunc).mul_xlog(&XLogPoly::x_pow(1, Rat::one()));
    let resid = lhs.sub(&rhs);
    let mut rep = ResidualReport::new("tauid1");
    collect_residuals(&resid, required_eps, &mut rep);
    out.push(rep);

    // idFeg1
    let lhs1 = tanh_half_sseries(&f_even.ds(2).dx(), tanh_order);
    let bracket = second_difference(&f_even.dx());
    let resid = lhs1.sub(&lhs.mul(&bracket));
    let mut rep = ResidualReport::new("idFeg1");
    collect_residuals(&resid, required_eps, &mut rep);
    out.push(rep);

    // idFeg1norm on the normalized free energy
    let mut fnorm = f_even.clone();
    fnorm.set_coeff(Vec::new(), EpsSeries::zero_exact());
    let lhs_n = tanh_half_sseries(&fnorm.ds(2).dx(), tanh_order);
    let t2 = tanh_half_sseries(&fnorm.ds(2), tanh_order);
    let bracket_n = second_difference(&fnorm.dx()).add(&SSeries::from_eps(
        EpsSeries::from_xlog(XLogPoly::x_pow(-1, Rat::one())),
        fnorm.budget(),
    ));
    let resid = lhs_n.sub(&t2.mul(&bracket_n));
    let mut rep = ResidualReport::new("idFeg1norm");
    collect_residuals(&resid, required_eps, &mut rep);
    out.push(rep);

    // identgenush per genus h
    let bern = bernoulli_upto(2 * h_max as u64 + 2);
    let coeff_c = |g: u32| -> Rat {
        let m = 2 * g as u64 + 2;
        let two_pow = Rat::from_big(
            num_bigint::BigInt::from(2).pow(m as u32 + 1) - num_bigint::BigInt::from(2),
        );
        two_pow * &bern[m as usize] * Rat::new(1, factorial(m))
    };
    for h in 0..=h_max {
        let mut rep = ResidualReport::new("identgenush");
        // genus slices of F^norm: [eps^{2g-2}]
        let slice = |g: u32| fnorm.eps_slice(2 * g as i32 - 2);
        let mut lhs = SSeries::zero(fnorm.budget());
        for g in 0..=h {
            let gp = h - g;
            let term = slice(gp).ds(2).dx_n(2 * g + 2).scale(&coeff_c(g));
            lhs = lhs.add(&term);
        }
        let mut rhs = SSeries::zero(fnorm.budget());
        for g1 in 0..=h {
            for g2 in 0..=(h - g1) {
                for g1p in 0..=(h - g1 - g2) {
                    let g2p = h - g1 - g2 - g1p;
                    let a = slice(g1p).ds(2).dx_n(2 * g1 + 1).scale(&coeff_c(g1));
                    let c2 = Rat::from(2) * Rat::new(1, factorial(2 * g2 as u64 + 2));
                    let mut b = slice(g2p).dx_n(2 * g2 + 3).scale(&c2);
                    if g2 == 0 && g2p == 0 {
                        b = b.add(&SSeries::from_eps(
                            EpsSeries::from_xlog(XLogPoly::x_pow(-1, Rat::one())),
                            fnorm.budget(),
                        ));
                    }
                    rhs = rhs.add(&a.mul(&b));
                }
            }
        }
        let resid = lhs.sub(&rhs);
        let mut local = ResidualReport::new("");
        collect_residuals(&resid, 0, &mut local);
        rep.checked = local.checked;
        for mut fail in local.failures {
            fail.key = format!("h={h}:{}", fail.key);
            rep.failures.push(fail);
        }
        rep.notes.push(format!("genus slice identity at h = {h}"));
        out.push(rep);
    }
    out
}

/// Chain-rule consistency of `w^eG = exp((Lambda-1)(1-Lambda^{-1})F)`:
/// `d_x w = w * (Lambda-1)(1-Lambda^{-1}) d_x F`.
pub fn verify_w_chain_rule(f_even: &SSeries, w_trunc: i32, required_eps: i32) -> ResidualReport {
    let w = even_w(f_even, w_trunc);
    let resid = w.dx().sub(&w.mul(&second_difference(&f_even.dx())));
    let mut rep = ResidualReport::new("w-chain-rule");
    collect_residuals(&resid, required_eps, &mut rep);
    rep.notes.push(String::from(
        "d_x applied to the tau-quotient identity reproduces the product identity",
    ));
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sseries::SBudget;
    use crate::wick::{assemble_gue_free_energy, WickOracle};

    fn feven(weight: u32) -> SSeries {
        let mut o = WickOracle::new(weight.min(14));
        let f =
            assemble_gue_free_energy(&mut o, SBudget::new(2, 8, weight.min(14)), 16).unwrap();
        even_free_energy(&f)
    }

    #[test]
    fn even_restriction_drops_odd_terms() {
        let f = feven(10);
        assert!(f.coeff(&[1]).is_zero());
        assert!(f.coeff(&[3]).is_zero());
        assert!(!f.coeff(&[2]).is_zero());
        // s_2 coefficient is x^2/eps^2
        assert_eq!(f.coeff(&[2]).coeff(-2), XLogPoly::x_pow(2, Rat::one()));
    }

    #[test]
    fn v_vanishes_on_even_couplings() {
        let mut o = WickOracle::new(12);
        let f = assemble_gue_free_energy(&mut o, SBudget::new(3, 6, 12), 12).unwrap();
        let rep = verify_v_vanishes(&f, 10);
        assert!(rep.ok(), "{:?}", rep.failures);
    }

    #[test]
    fn volterra_equation_holds() {
        let f = feven(12);
        let rep = verify_volterra(&f, 12, 6);
        assert!(rep.ok(), "{:?}", rep.failures);
        assert!(rep.checked > 0);
    }

    #[test]
    fn volterra_hierarchy_j1_matches_direct_equation() {
        let f = feven(12);
        let rep = verify_volterra_hierarchy(&f, 1, 12, 6);
        assert!(rep.ok(), "{:?}", rep.failures);
    }

    #[test]
    fn volterra_hierarchy_j2() {
        let f = feven(12);
        let rep = verify_volterra_hierarchy(&f, 2, 12, 4);
        assert!(rep.ok(), "{:?}", rep.failures);
    }

    #[test]
    fn feg_identities_hold() {
        let f = feven(12);
        for rep in verify_feg_identities(&f, 12, 4, 2) {
            assert!(rep.ok(), "{}: {:?}", rep.name, rep.failures);
        }
    }

    #[test]
    fn chain_rule_consistency() {
        let f = feven(10);
        let rep = verify_w_chain_rule(&f, 12, 6);
        assert!(rep.ok(), "{:?}", rep.failures);
    }
}
