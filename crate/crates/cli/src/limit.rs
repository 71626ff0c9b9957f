//! Numerical probes of the scaling limit: rescaled map counts against the
//! Witten n-point functions, convergence ladders, and the scaled
//! five-block identity demo.

use anyhow::{anyhow, bail, Result};
use astro_float::BigFloat;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use guekdv_core::identities::{eq56_sides, MapSource};
use guekdv_core::rat::Rat;
use guekdv_core::witten::WittenTable;

use crate::backend::MapBackend;
use crate::hp::HpCtx;

/// Index parity rule along the ladder; the limit statement is along even
/// total size, the odd rule exists for the two-point parity-agreement
/// check.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Parity {
    Even,
    Odd,
}

/// `round(q)` for rationals, half away from zero.
fn round_rat(q: &Rat) -> BigInt {
    let half = Rat::new(1, 2);
    let shifted = q + &half;
    // floor of shifted
    let n = shifted.numer().clone();
    let d = shifted.denom().clone();
    num_integer::Integer::div_floor(&n, &d)
}

/// `i_a = 2 round(kappa x_a / 2)` (even) or `2 round((kappa x_a + 1)/2) - 1`
/// (odd).
pub fn ladder_indices(x: &[Rat], kappa: u64, parity: Parity) -> Result<Vec<u32>> {
    let mut out = Vec::with_capacity(x.len());
    for xa in x {
        let kxa = xa * &Rat::from(kappa as i64);
        let i = match parity {
            Parity::Even => BigInt::from(2) * round_rat(&(&kxa / &Rat::from(2))),
            Parity::Odd => {
                BigInt::from(2) * round_rat(&(&(&kxa + &Rat::one()) / &Rat::from(2)))
                    - BigInt::from(1)
            }
        };
        if i.is_negative() || i.magnitude().bits() > 31 {
            bail!("rounded index out of range at kappa = {kappa}");
        }
        let v: u32 = i.to_string().parse().map_err(|_| anyhow!("index parse"))?;
        if v == 0 {
            bail!("rounded index is zero at kappa = {kappa}; pick a larger kappa");
        }
        out.push(v);
    }
    Ok(out)
}

/// `ln Map_g(i)` through the closed forms for genus-0 one- and two-point
/// counts (log-Gamma, no enumeration), or through an exact backend count.
fn ln_map(
    cx: &mut HpCtx,
    backend: &mut MapBackend,
    g: u32,
    indices: &[u32],
) -> Result<BigFloat> {
    let n = indices.len();
    if g == 0 && n == 1 && indices[0] % 2 == 0 {
        // Catalan: C(2j, j)/(j + 1)
        let j = (indices[0] / 2) as u64;
        let b = cx.ln_binomial(2 * j, j);
        let d = {
            let f = cx.from_i64(j as i64 + 1);
            cx.ln(&f)
        };
        return Ok(cx.sub(&b, &d));
    }
    if g == 0 && n == 2 {
        let (i1, i2) = (indices[0], indices[1]);
        if i1 % 2 == 0 && i2 % 2 == 0 {
            let (j1, j2) = ((i1 / 2) as u64, (i2 / 2) as u64);
            let b1 = cx.ln_binomial(2 * j1, j1);
            let b2 = cx.ln_binomial(2 * j2, j2);
            let num = {
                let f = cx.from_i64((j1 * j2) as i64);
                cx.ln(&f)
            };
            let den = {
                let f = cx.from_i64((j1 + j2) as i64);
                cx.ln(&f)
            };
            let s = cx.add(&b1, &b2);
            let s = cx.add(&s, &num);
            return Ok(cx.sub(&s, &den));
        }
        if i1 % 2 == 1 && i2 % 2 == 1 {
            let (j1, j2) = ((i1 as u64 + 1) / 2, (i2 as u64 + 1) / 2);
            let b1 = cx.ln_binomial(2 * j1 - 1, j1);
            let b2 = cx.ln_binomial(2 * j2 - 1, j2);
            let num = {
                let f = cx.from_i64((j1 * j2) as i64);
                cx.ln(&f)
            };
            let den = {
                let f = cx.from_i64((j1 + j2 - 1) as i64);
                cx.ln(&f)
            };
            let s = cx.add(&b1, &b2);
            let s = cx.add(&s, &num);
            return Ok(cx.sub(&s, &den));
        }
    }
    let v = backend.map(g, indices)?;
    if v.is_zero() || v.is_negative() {
        bail!("map count not positive at g={g}, i={indices:?}");
    }
    let f = cx.from_bigint(&v);
    Ok(cx.ln(&f))
}

/// The rescaled map count
/// `2^{2g-3+3n/2} pi^{n/2} / sqrt(x_1..x_n) * Map_g(i) / (2^{|i|} kappa^{3g-3+3n/2})`
/// at the rounded ladder indices.
pub fn okounkov_scaled_value(
    cx: &mut HpCtx,
    backend: &mut MapBackend,
    g: u32,
    x: &[Rat],
    kappa: u64,
    parity: Parity,
) -> Result<(Vec<u32>, BigFloat)> {
    let n = x.len() as i64;
    let indices = ladder_indices(x, kappa, parity)?;
    let total: u64 = indices.iter().map(|&v| v as u64).sum();

    let ln2 = {
        let two = cx.from_i64(2);
        cx.ln(&two)
    };
    let lnpi = {
        let pi = cx.pi();
        cx.ln(&pi)
    };
    let lnkappa = {
        let k = cx.from_i64(kappa as i64);
        cx.ln(&k)
    };

    // ln prefactor
    let e2 = cx.from_rat(&Rat::new(4 * g as i64 - 6 + 3 * n, 2));
    let mut acc = cx.mul(&e2, &ln2);
    let epi = cx.from_rat(&Rat::new(n, 2));
    let t = cx.mul(&epi, &lnpi);
    acc = cx.add(&acc, &t);
    for xa in x {
        let lx = {
            let f = cx.from_rat(xa);
            cx.ln(&f)
        };
        let half = cx.from_rat(&Rat::new(-1, 2));
        let t = cx.mul(&half, &lx);
        acc = cx.add(&acc, &t);
    }
    // + ln Map
    let lm = ln_map(cx, backend, g, &indices)?;
    acc = cx.add(&acc, &lm);
    // - |i| ln 2
    let e = cx.from_i64(-(total as i64));
    let t = cx.mul(&e, &ln2);
    acc = cx.add(&acc, &t);
    // - (3g - 3 + 3n/2) ln kappa
    let ek = cx.from_rat(&Rat::new(-(6 * g as i64 - 6 + 3 * n), 2));
    let t = cx.mul(&ek, &lnkappa);
    acc = cx.add(&acc, &t);

    Ok((indices, cx.exp(&acc)))
}

/// Exact limit value `Q_g(x)`, including the unstable closed forms.
pub fn q_limit(table: &mut WittenTable, g: u32, x: &[Rat]) -> Result<Rat> {
    let n = x.len() as u32;
    if 2 * g as i64 - 2 + n as i64 <= 0 {
        return match (g, n) {
            (0, 1) => Ok(x[0].pow(-2)),
            (0, 2) => Ok((&x[0] + &x[1]).recip()),
            _ => Ok(Rat::zero()),
        };
    }
    let q = table.q_polynomial(g, n)?;
    Ok(q.eval(x))
}

#[derive(Clone, Debug)]
pub struct LadderRow {
    pub kappa: u64,
    pub indices: Vec<u32>,
    pub scaled: f64,
    pub limit: f64,
    pub rel_error: f64,
}

/// Errors tabulated along the ladder; acceptance logic lives in the test
/// suite, not here.
pub fn convergence_report(
    cx: &mut HpCtx,
    backend: &mut MapBackend,
    table: &mut WittenTable,
    g: u32,
    x: &[Rat],
    ladder: &[u64],
    parity: Parity,
) -> Result<Vec<LadderRow>> {
    let limit = q_limit(table, g, x)?;
    let limit_f = {
        let f = cx.from_rat(&limit);
        cx.to_f64(&f)
    };
    let mut rows = Vec::new();
    for &kappa in ladder {
        let (indices, val) = okounkov_scaled_value(cx, backend, g, x, kappa, parity)?;
        let v = cx.to_f64(&val);
        let rel = ((v - limit_f) / limit_f).abs();
        rows.push(LadderRow {
            kappa,
            indices,
            scaled: v,
            limit: limit_f,
            rel_error: rel,
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug)]
pub struct DemoRow {
    pub kappa: u64,
    pub j: Vec<u32>,
    pub lhs_scaled: f64,
    pub rhs_scaled: f64,
    pub lhs_target: f64,
    pub rhs_target: f64,
}

/// Scale both sides of the five-block identity by
/// `2^{2h-1+3n/2} pi^{n/2} / (sqrt(x_1..x_n) 2^{2|j|} kappa^{3h-1+3n/2})`
/// and tabulate convergence toward the corresponding sides of the Witten
/// recursion (the B_4 block contributes `-|x|^5 Q_{h-1}/24` to the left
/// target and `+|x|^5 Q_{h-1}/24` to the right one).
pub fn identity_demo(
    cx: &mut HpCtx,
    backend: &mut MapBackend,
    table: &mut WittenTable,
    h: u32,
    x: &[Rat],
    ladder: &[u64],
) -> Result<Vec<DemoRow>> {
    let n = x.len() as i64;
    if n == 0 {
        bail!("the demo needs n >= 1");
    }
    // targets
    let xsum: Rat = x.iter().fold(Rat::zero(), |a, b| a + b.clone());
    let qh = q_limit(table, h, x)?;
    let qhm = if h >= 1 {
        q_limit(table, h - 1, x)?
    } else {
        Rat::zero()
    };
    let correction = xsum.pow(5) * &qhm * Rat::new(1, 24);
    let lhs_target_exact = Rat::from(2 * h as i64 + n - 1) * xsum.pow(2) * &qh - correction.clone();
    let mut split_sum = Rat::zero();
    let nn = x.len();
    for mask in 1u32..((1 << nn) - 1).max(1) {
        if nn == 1 {
            break;
        }
        let a: Vec<Rat> = (0..nn).filter(|i| mask & (1 << i) != 0).map(|i| x[i].clone()).collect();
        let b: Vec<Rat> = (0..nn).filter(|i| mask & (1 << i) == 0).map(|i| x[i].clone()).collect();
        let asum: Rat = a.iter().fold(Rat::zero(), |s, v| s + v.clone());
        let bsum: Rat = b.iter().fold(Rat::zero(), |s, v| s + v.clone());
        for g1 in 0..=h {
            let g2 = h - g1;
            let qa = q_limit(table, g1, &a)?;
            if qa.is_zero() {
                continue;
            }
            let qb = q_limit(table, g2, &b)?;
            split_sum += &(asum.pow(2) * bsum.pow(3) * qa * qb);
        }
    }
    let rhs_target_exact = split_sum + correction;
    let lhs_target = {
        let f = cx.from_rat(&lhs_target_exact);
        cx.to_f64(&f)
    };
    let rhs_target = {
        let f = cx.from_rat(&rhs_target_exact);
        cx.to_f64(&f)
    };

    let mut rows = Vec::new();
    for &kappa in ladder {
        // j_a = round(kappa x_a / 2), so 2 j_a ~ kappa x_a
        let doubled = ladder_indices(x, kappa, Parity::Even)?;
        let j: Vec<u32> = doubled.iter().map(|&v| v / 2).collect();
        let (lhs, rhs) = eq56_sides(backend, h, &j)?;
        let jj: u64 = j.iter().map(|&v| v as u64).sum();

        // ln of the positive scale factor
        let ln2 = {
            let two = cx.from_i64(2);
            cx.ln(&two)
        };
        let lnpi = {
            let pi = cx.pi();
            cx.ln(&pi)
        };
        let lnk = {
            let k = cx.from_i64(kappa as i64);
            cx.ln(&k)
        };
        // exponent of 2: (2h - 1 + 3n/2) - 2|j|
        let e2 = cx.from_rat(&Rat::new(4 * h as i64 - 2 + 3 * n - 4 * jj as i64, 2));
        let mut lnscale = cx.mul(&e2, &ln2);
        let epi = cx.from_rat(&Rat::new(n, 2));
        let t = cx.mul(&epi, &lnpi);
        lnscale = cx.add(&lnscale, &t);
        for xa in x {
            let lx = {
                let f = cx.from_rat(xa);
                cx.ln(&f)
            };
            let mh = cx.from_rat(&Rat::new(-1, 2));
            let t = cx.mul(&mh, &lx);
            lnscale = cx.add(&lnscale, &t);
        }
        let ek = cx.from_rat(&Rat::new(-(6 * h as i64 - 2 + 3 * n), 2));
        let t = cx.mul(&ek, &lnk);
        lnscale = cx.add(&lnscale, &t);
        let scale = cx.exp(&lnscale);

        let lf = {
            let f = cx.from_rat(&lhs);
            cx.mul(&f, &scale)
        };
        let rf = {
            let f = cx.from_rat(&rhs);
            cx.mul(&f, &scale)
        };
        rows.push(DemoRow {
            kappa,
            j,
            lhs_scaled: cx.to_f64(&lf),
            rhs_scaled: cx.to_f64(&rf),
            lhs_target,
            rhs_target,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use guekdv_core::witten::WittenBudget;

    #[test]
    fn rounding_rules() {
        let x = [Rat::one()];
        assert_eq!(ladder_indices(&x, 100, Parity::Even).unwrap(), vec![100]);
        assert_eq!(ladder_indices(&x, 101, Parity::Even).unwrap(), vec![102]);
        assert_eq!(ladder_indices(&x, 100, Parity::Odd).unwrap(), vec![101]);
        let x2 = [Rat::new(1, 2)];
        assert_eq!(ladder_indices(&x2, 100, Parity::Even).unwrap(), vec![50]);
    }

    #[test]
    fn genus0_onepoint_converges() {
        let mut cx = HpCtx::new();
        let mut b = MapBackend::new(12);
        let mut t = WittenTable::new(WittenBudget::default());
        let rows = convergence_report(
            &mut cx,
            &mut b,
            &mut t,
            0,
            &[Rat::one()],
            &[100, 1000, 10000],
            Parity::Even,
        )
        .unwrap();
        assert!(rows[0].rel_error > rows[1].rel_error);
        assert!(rows[1].rel_error > rows[2].rel_error);
        assert!(rows[2].rel_error < 1e-2, "error {}", rows[2].rel_error);
        assert!((rows[2].limit - 1.0).abs() < 1e-12);
    }
}
