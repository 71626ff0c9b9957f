//! Extended-precision floats for the scaling-limit probes.
//!
//! 192-bit mantissas give about 57 significant decimal digits, well above
//! the 30 the convergence tables need so rounding never masks behavior at
//! the ladder sizes used. Log-Gamma is a Stirling series over the exact
//! Bernoulli numbers with an argument lift, since the backing crate does
//! not provide it.

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use guekdv_core::rat::{bernoulli_upto, Rat};
use num_bigint::BigInt;

pub const PRECISION_BITS: usize = 192;
const RM: RoundingMode = RoundingMode::ToEven;

/// Shared context: precision plus the constants cache of the backend.
pub struct HpCtx {
    cc: Consts,
}

impl Default for HpCtx {
    fn default() -> Self {
        Self::new()
    }
}

impl HpCtx {
    pub fn new() -> Self {
        HpCtx {
            cc: Consts::new().expect("constants cache"),
        }
    }

    pub fn from_i64(&mut self, v: i64) -> BigFloat {
        BigFloat::from_i64(v, PRECISION_BITS)
    }

    pub fn from_bigint(&mut self, v: &BigInt) -> BigFloat {
        let s = v.to_string();
        let (sign, digits) = match s.strip_prefix('-') {
            Some(rest) => (Sign::Neg, rest),
            None => (Sign::Pos, s.as_str()),
        };
        let f = BigFloat::parse(
            digits,
            astro_float::Radix::Dec,
            PRECISION_BITS,
            RM,
            &mut self.cc,
        );
        match sign {
            Sign::Neg => f.neg(),
            Sign::Pos => f,
        }
    }

    pub fn from_rat(&mut self, v: &Rat) -> BigFloat {
        let n = self.from_bigint(v.numer());
        let d = self.from_bigint(v.denom());
        n.div(&d, PRECISION_BITS, RM)
    }

    pub fn pi(&mut self) -> BigFloat {
        self.cc.pi(PRECISION_BITS, RM)
    }

    pub fn ln(&mut self, v: &BigFloat) -> BigFloat {
        v.ln(PRECISION_BITS, RM, &mut self.cc)
    }

    pub fn exp(&mut self, v: &BigFloat) -> BigFloat {
        v.exp(PRECISION_BITS, RM, &mut self.cc)
    }

    pub fn sqrt(&mut self, v: &BigFloat) -> BigFloat {
        v.sqrt(PRECISION_BITS, RM)
    }

    pub fn add(&mut self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, PRECISION_BITS, RM)
    }

    pub fn sub(&mut self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, PRECISION_BITS, RM)
    }

    pub fn mul(&mut self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, PRECISION_BITS, RM)
    }

    pub fn div(&mut self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, PRECISION_BITS, RM)
    }

    /// `ln Gamma(z)` for positive integer or half-integer-free arguments
    /// given as `u64` (factorial use only): argument lift to `z >= 48`
    /// followed by the Stirling series with exact Bernoulli coefficients.
    pub fn ln_gamma_u64(&mut self, z: u64) -> BigFloat {
        assert!(z >= 1, "ln_gamma needs a positive argument");
        const LIFT: u64 = 48;
        let mut corr = self.from_i64(0);
        let mut zz = z;
        while zz < LIFT {
            let lz = {
                let f = self.from_i64(zz as i64);
                self.ln(&f)
            };
            corr = self.add(&corr, &lz);
            zz += 1;
        }
        // Stirling at zz: (z - 1/2) ln z - z + ln(2 pi)/2
        //                 + sum B_{2k} / (2k (2k-1) z^{2k-1})
        let zf = self.from_i64(zz as i64);
        let lnz = self.ln(&zf);
        let half = self.from_rat(&Rat::new(1, 2));
        let zmh = self.sub(&zf, &half);
        let mut acc = self.mul(&zmh, &lnz);
        acc = self.sub(&acc, &zf);
        let two_pi = {
            let pi = self.pi();
            let two = self.from_i64(2);
            self.mul(&two, &pi)
        };
        let l2pi = self.ln(&two_pi);
        let l2pi_half = self.mul(&l2pi, &half);
        acc = self.add(&acc, &l2pi_half);

        let bern = bernoulli_upto(40);
        let zinv = {
            let one = self.from_i64(1);
            self.div(&one, &zf)
        };
        let zinv2 = self.mul(&zinv, &zinv);
        let mut zpow = zinv.clone();
        for k in 1..=20u64 {
            let c = &bern[2 * k as usize] / &Rat::from((2 * k * (2 * k - 1)) as i64);
            let cf = self.from_rat(&c);
            let term = self.mul(&cf, &zpow);
            acc = self.add(&acc, &term);
            zpow = self.mul(&zpow, &zinv2);
        }
        self.sub(&acc, &corr)
    }

    /// `ln n!`.
    pub fn ln_factorial(&mut self, n: u64) -> BigFloat {
        self.ln_gamma_u64(n + 1)
    }

    /// `ln C(n, k)` via log-Gamma.
    pub fn ln_binomial(&mut self, n: u64, k: u64) -> BigFloat {
        assert!(k <= n);
        let a = self.ln_factorial(n);
        let b = self.ln_factorial(k);
        let c = self.ln_factorial(n - k);
        let bc = self.add(&b, &c);
        self.sub(&a, &bc)
    }

    pub fn to_f64(&mut self, v: &BigFloat) -> f64 {
        // extract via decimal string round-trip; formatting only
        let s = format!("{v}");
        s.parse::<f64>().unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use guekdv_core::rat::factorial;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn ln_gamma_matches_exact_factorials() {
        let mut cx = HpCtx::new();
        for n in [1u64, 2, 5, 10, 20, 60, 200] {
            let exact = factorial(n);
            let via_gamma = cx.ln_gamma_u64(n + 1);
            let direct = {
                let f = cx.from_bigint(&exact);
                cx.ln(&f)
            };
            let diff = cx.sub(&via_gamma, &direct);
            let d = cx.to_f64(&diff);
            assert!(
                d.abs() < 1e-45,
                "ln Gamma({}) off by {d:e}",
                n + 1
            );
        }
    }

    #[test]
    fn pi_and_exp_ln_roundtrip() {
        let mut cx = HpCtx::new();
        let pi = cx.pi();
        assert!(close(cx.to_f64(&pi), core::f64::consts::PI, 1e-15));
        let x = cx.from_rat(&Rat::new(355, 113));
        let ln = cx.ln(&x);
        let back = cx.exp(&ln);
        let diff = cx.sub(&back, &x);
        assert!(cx.to_f64(&diff).abs() < 1e-50);
    }

    #[test]
    fn big_rational_conversion() {
        let mut cx = HpCtx::new();
        let r = Rat::new(BigInt::from(10).pow(40) + BigInt::from(7), BigInt::from(3));
        let f = cx.from_rat(&r);
        let lf = cx.ln(&f);
        // ln(10^40/3) = 40 ln 10 - ln 3
        let expect = 40.0 * core::f64::consts::LN_10 - 3f64.ln();
        assert!(close(cx.to_f64(&lf), expect, 1e-14));
    }
}
