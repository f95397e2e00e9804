use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::{One, Pow};
use serde::Serialize;

use super::{Grammar, SinkTable};

/// The grammar-derived constants, in table order `m, hinc, stepinc, d0, d1,
/// d2, d3, n, s, g, d4, d5, c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrammarConstants {
    pub m: u64,
    /// Largest rhs height minus one, clamped at 0.
    pub hinc: u64,
    pub stepinc: u64,
    pub d0: u64,
    #[serde(serialize_with = "as_decimal")]
    pub d1: BigUint,
    #[serde(serialize_with = "as_decimal")]
    pub d2: BigUint,
    #[serde(serialize_with = "as_decimal")]
    pub d3: BigUint,
    #[serde(serialize_with = "as_decimal")]
    pub n: BigUint,
    #[serde(serialize_with = "as_decimal")]
    pub s: BigUint,
    #[serde(serialize_with = "as_decimal")]
    pub g: BigUint,
    #[serde(serialize_with = "as_decimal")]
    pub d4: BigUint,
    #[serde(serialize_with = "as_decimal")]
    pub d5: BigUint,
    #[serde(serialize_with = "as_decimal")]
    pub c: BigUint,
}

fn as_decimal<S: serde::Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_str_radix(10))
}

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

fn pow(base: &BigUint, exp: &BigUint) -> BigUint {
    let e: u32 = u32::try_from(exp).expect("exponent fits in u32");
    Pow::pow(base, e)
}

impl GrammarConstants {
    pub fn compute(g: &Grammar, sinks: &SinkTable) -> Self {
        let m = g.max_arity() as u64;
        let hinc = g
            .rules()
            .iter()
            .map(|r| r.rhs.height() as u64)
            .max()
            .unwrap_or(0)
            .saturating_sub(1);
        let stepinc = g.rules().iter().map(|r| r.rhs.propsize() as u64).max().unwrap_or(0);
        let d0 = 1 + sinks.max_len() as u64;
        let rules = big(g.rules().len() as u64);
        let nts = big(g.signature().len() as u64);
        let mut nonvar = HashSet::new();
        for r in g.rules() {
            r.rhs.nonvar_subterms(&mut nonvar);
        }
        let nonvarsubrhs = big(nonvar.len() as u64);

        let d0b = big(d0);
        let wide = std::cmp::max(d0b.clone(), pow(&rules, &d0b));
        let d1 = big(2) * &nts * pow(&wide, &big(m + 2));
        let d2 = &d0b + (BigUint::one() + &d0b * big(hinc)) * (&d0b - 1u32);
        let d3 = &wide * &wide;
        let span = &d2 + &d0b - 1u32;
        let d4 = &d1 * pow(&(BigUint::one() + nonvarsubrhs), &span);
        let d5 = &span * (BigUint::one() + (&d0b - 1u32) * big(hinc));
        let n = pow(&big(m), &d0b);
        let g_ = &span * big(stepinc);
        let s = pow(&big(m), &(&d0b + 1u32)) + big(m + 2) * &d0b * big(stepinc) + &g_;
        let c = std::cmp::max(d3.clone(), big(2) * &d4 * &d5);
        GrammarConstants {
            m,
            hinc,
            stepinc,
            d0,
            d1,
            d2,
            d3,
            n,
            s,
            g: g_,
            d4,
            d5,
            c,
        }
    }

    /// `(name, decimal value)` in table order.
    pub fn rows(&self) -> Vec<(&'static str, String)> {
        vec![
            ("m", self.m.to_string()),
            ("hinc", self.hinc.to_string()),
            ("stepinc", self.stepinc.to_string()),
            ("d0", self.d0.to_string()),
            ("d1", self.d1.to_string()),
            ("d2", self.d2.to_string()),
            ("d3", self.d3.to_string()),
            ("n", self.n.to_string()),
            ("s", self.s.to_string()),
            ("g", self.g.to_string()),
            ("d4", self.d4.to_string()),
            ("d5", self.d5.to_string()),
            ("c", self.c.to_string()),
        ]
    }

    pub fn d0_len(&self) -> usize {
        self.d0 as usize
    }
}
