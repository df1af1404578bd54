use std::sync::Arc;

use num_traits::Zero;

use super::{QuadClass, QuadraticError};
use crate::algebra::{GaussRat, Monomial, Poly, VarContext};
use crate::geometry::GenericSubmanifold;
use crate::images::{local_diffeo, HoloMap};

/// A holomorphic `F` taking a codimension-2 generic `N ⊂ C^{n+1}` onto a
/// graph `w = Q(z, z̄) + O(|z|³)` with prescribed quadratic type.
#[derive(Clone, Debug)]
pub struct Realization {
    pub map: HoloMap,
    pub class: QuadClass,
    /// Coordinates `z_1, …, z_n` of the image graph.
    pub z_ctx: Arc<VarContext>,
    /// The model `Q` in `z_ctx`.
    pub model: Poly,
    /// `ρ_j(ζ, ζ̄, x)` with `Im ω_j = ρ_j` on `N`, the holomorphic slot of
    /// `ω_j` standing for `x_j = Re ω_j`.
    pub rho: [Poly; 2],
    pub generic_rank: usize,
    /// `F|_N` is a local diffeomorphism at `0`.
    pub local_diffeo: bool,
}

fn model_poly(ctx: &Arc<VarContext>, class: &QuadClass) -> Result<Poly, QuadraticError> {
    let z1 = Poly::var(ctx, 0, false);
    let zb1 = Poly::var(ctx, 0, true);
    let z2 = Poly::var(ctx, 1, false);
    Ok(match class {
        QuadClass::Type1 => &(&zb1 * &z2) + &zb1.pow(2),
        QuadClass::Type2 => &zb1 * &z2,
        QuadClass::Type3 { .. } => {
            let a = class.exact_a().ok_or(QuadraticError::BadParameter)?;
            &(&z1 * &zb1) + &zb1.pow(2).scale(&GaussRat::real(a))
        }
        QuadClass::Type4 => zb1.pow(2),
        QuadClass::Type5 => Poly::zero(ctx),
        QuadClass::NotCRImageCandidate => {
            return Err(QuadraticError::NotInShape(
                "no realization exists for a non-image quadratic part".into(),
            ))
        }
    })
}

/// Reads `ρ_j` from `r_j = ±(Im ω_j − ρ_j(ζ, ζ̄, Re ω))` and checks the
/// shape exactly.
fn graph_function(r: &Poly, omega: [usize; 2], j: usize) -> Result<Poly, QuadraticError> {
    let ctx = r.ctx();
    let n = ctx.len();
    let mut e = vec![0; 2 * n];
    e[omega[j]] = 1;
    let c = r.coeff(&Monomial(e));
    let minus_half_i = GaussRat::from_rat(-1, 2) * GaussRat::i();
    let r = if c == minus_half_i {
        r.clone()
    } else if c == -minus_half_i.clone() {
        -r
    } else {
        return Err(QuadraticError::NotInShape(format!(
            "equation {} is not of the form Im ω = ρ",
            j + 1
        )));
    };
    let mut fold: Vec<Poly> = (0..2 * n).map(|s| var_of_slot(ctx, s)).collect();
    for &w in &omega {
        fold[w + n] = Poly::var(ctx, w, false);
    }
    let rho = -r.substitute(ctx, &fold, None);
    let mut unfold: Vec<Poly> = (0..2 * n).map(|s| var_of_slot(ctx, s)).collect();
    for &w in &omega {
        unfold[w] =
            (&Poly::var(ctx, w, false) + &Poly::var(ctx, w, true)).scale(&GaussRat::from_rat(1, 2));
    }
    let im_w = Poly::var(ctx, omega[j], false).imag_part();
    if &im_w - &rho.substitute(ctx, &unfold, None) != r {
        return Err(QuadraticError::NotInShape(format!(
            "equation {} depends on Im ω beyond Im ω_{}",
            j + 1,
            j + 1
        )));
    }
    if rho.order().is_some_and(|d| d < 2) {
        return Err(QuadraticError::NotInShape(format!(
            "ρ_{} has terms of order below 2",
            j + 1
        )));
    }
    Ok(rho)
}

fn var_of_slot(ctx: &Arc<VarContext>, s: usize) -> Poly {
    let n = ctx.len();
    if s < n {
        Poly::var(ctx, s, false)
    } else {
        Poly::var(ctx, s - n, true)
    }
}

/// Builds `F` for `N = {Im ω_1 = ρ_1, Im ω_2 = ρ_2}` in coordinates
/// `(ζ_1, …, ζ_{n−1}, ω_1, ω_2)`:
/// `z_1 = ω_1 + iω_2`, `z_j = ζ_{j−1}` and `w = Q(ω_1 + iω_2, ζ, ω_1 − iω_2)`.
/// For type 5 the last component is `(ω_1 − iω_2)³` instead.
pub fn realize(
    n_mf: &GenericSubmanifold,
    class: &QuadClass,
) -> Result<Realization, QuadraticError> {
    let ctx = n_mf.ctx();
    let dim = ctx.len();
    if dim < 3 {
        return Err(QuadraticError::NotInShape(format!(
            "need at least 3 variables, got {dim}"
        )));
    }
    if (0..dim).any(|v| ctx.is_real(v)) {
        return Err(QuadraticError::NotInShape(
            "real variables are not allowed here".into(),
        ));
    }
    if n_mf.real_eqs().len() != 2 {
        return Err(QuadraticError::NotInShape(format!(
            "need 2 real equations, got {}",
            n_mf.real_eqs().len()
        )));
    }
    if n_mf.base_point().iter().any(|x| !x.is_zero()) {
        return Err(QuadraticError::NotInShape(
            "base point must be the origin".into(),
        ));
    }
    let n = dim - 1;
    let omega = [n - 1, n];
    let rho = [
        graph_function(&n_mf.real_eqs()[0], omega, 0)?,
        graph_function(&n_mf.real_eqs()[1], omega, 1)?,
    ];

    let names: Vec<String> = (1..=n).map(|j| format!("z{j}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let z_ctx = VarContext::complex(&refs);
    let model = model_poly(&z_ctx, class)?;

    let w1 = Poly::var(ctx, omega[0], false);
    let w2i = Poly::var(ctx, omega[1], false).scale(&GaussRat::i());
    let first = &w1 + &w2i;
    let barred = &w1 - &w2i;
    let last = if *class == QuadClass::Type5 {
        barred.pow(3)
    } else {
        let mut images: Vec<Poly> = vec![Poly::zero(ctx); 2 * n];
        images[0] = first.clone();
        for j in 1..n {
            images[j] = Poly::var(ctx, j - 1, false);
        }
        images[n] = barred;
        model.substitute(ctx, &images, None)
    };
    let mut comps = vec![first];
    comps.extend((0..n - 1).map(|j| Poly::var(ctx, j, false)));
    comps.push(last);
    let map = HoloMap::new(ctx, comps)?;
    let generic_rank = map.jacobian().generic_rank();
    let local = local_diffeo(n_mf, &map, n_mf.base_point())?;
    Ok(Realization {
        map,
        class: class.clone(),
        z_ctx,
        model,
        rho,
        generic_rank,
        local_diffeo: local,
    })
}

/// Defining function `ρ̃` of the image `w = ρ̃(z, z̄)`, up to total degree
/// `order`.
///
/// On `N` write `X = x_1 + i x_2`; then `z_1 = X + iρ_1 − ρ_2`, so `X` is the
/// fixed point of `X = z_1 − iρ_1(x) + ρ_2(x)`, found by `order` iterations
/// of truncated substitution. The last component of `F` is then evaluated
/// at `ω_j = x_j + iρ_j`.
pub fn image_graph(r: &Realization, order: u32) -> Poly {
    let src = r.map.ctx();
    let zc = &r.z_ctx;
    let n = zc.len();
    let half = GaussRat::from_rat(1, 2);
    let neg_half_i = GaussRat::new(num_traits::zero(), crate::algebra::rat(-1, 2));
    let z1 = Poly::var(zc, 0, false);

    let rho_at = |x: &Poly, rho: &Poly| -> Poly {
        let xb = x.conj_involution();
        let x1 = (x + &xb).scale(&half);
        let x2 = (x - &xb).scale(&neg_half_i);
        let mut images = vec![Poly::zero(zc); 2 * src.len()];
        for l in 0..n - 1 {
            images[l] = Poly::var(zc, l + 1, false);
            images[src.len() + l] = Poly::var(zc, l + 1, true);
        }
        images[n - 1] = x1;
        images[n] = x2;
        rho.substitute(zc, &images, Some(order))
    };

    let mut x = z1.clone();
    for _ in 0..order {
        let r1 = rho_at(&x, &r.rho[0]);
        let r2 = rho_at(&x, &r.rho[1]);
        x = (&(&z1 - &r1.scale(&GaussRat::i())) + &r2).truncate(order);
    }
    let r1 = rho_at(&x, &r.rho[0]);
    let r2 = rho_at(&x, &r.rho[1]);
    let xb = x.conj_involution();
    let x1 = (&x + &xb).scale(&half);
    let x2 = (&x - &xb).scale(&neg_half_i);
    let omega1 = &x1 + &r1.scale(&GaussRat::i());
    let omega2 = &x2 + &r2.scale(&GaussRat::i());
    let mut images = vec![Poly::zero(zc); src.len()];
    for l in 0..n - 1 {
        images[l] = Poly::var(zc, l + 1, false);
    }
    images[n - 1] = omega1;
    images[n] = omega2;
    let w = r.map.components().last().expect("nonempty map");
    let mut all = images.clone();
    all.extend(images.iter().map(|p| p.conj_involution()));
    w.substitute(zc, &all, Some(order))
}
