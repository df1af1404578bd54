#![allow(dead_code)]

use std::sync::Arc;

use crsing::algebra::{GaussRat, Monomial, Poly, VarContext};
use crsing::parser::parse_expression;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn parse(src: &str, ctx: &Arc<VarContext>) -> Poly {
    parse_expression(src, ctx).unwrap_or_else(|e| panic!("{src}: {e}"))
}

pub fn small_gauss(rng: &mut ChaCha8Rng) -> GaussRat {
    let den = rng.random_range(1..=4);
    GaussRat::new(
        GaussRat::from_rat(rng.random_range(-5..=5), den).re,
        GaussRat::from_rat(rng.random_range(-5..=5), den).re,
    )
}

/// Random polynomial with up to `terms` terms and slot exponents `≤ max_exp`.
pub fn random_poly(
    rng: &mut ChaCha8Rng,
    ctx: &Arc<VarContext>,
    terms: usize,
    max_exp: u32,
) -> Poly {
    let slots = ctx.slots();
    let mut p = Poly::zero(ctx);
    for _ in 0..rng.random_range(0..=terms) {
        let mut e: Vec<u32> = (0..slots).map(|_| rng.random_range(0..=max_exp)).collect();
        for v in 0..ctx.len() {
            if ctx.is_real(v) {
                e[v + ctx.len()] = 0;
            }
        }
        p = &p + &Poly::term(ctx, e, small_gauss(rng));
    }
    p
}

pub fn random_holomorphic(
    rng: &mut ChaCha8Rng,
    ctx: &Arc<VarContext>,
    terms: usize,
    max_exp: u32,
) -> Poly {
    let p = random_poly(rng, ctx, terms, max_exp);
    let mut out = Poly::zero(ctx);
    for (m, c) in p.terms() {
        let mut e = m.0.clone();
        for x in &mut e[ctx.len()..] {
            *x = 0;
        }
        out.add_term(Monomial(e), c.clone());
    }
    out
}

pub fn random_point(rng: &mut ChaCha8Rng, ctx: &Arc<VarContext>) -> Vec<GaussRat> {
    (0..ctx.len())
        .map(|v| {
            let g = small_gauss(rng);
            if ctx.is_real(v) {
                GaussRat::real(g.re)
            } else {
                g
            }
        })
        .collect()
}

pub fn c64(p: &[GaussRat]) -> Vec<Complex64> {
    p.iter().map(GaussRat::to_c64).collect()
}
