use num_traits::Zero;

use super::{check_dims, HoloMap, ImagesError};
use crate::algebra::{CMatrix, GaussRat, Poly, VarContext};
use crate::geometry::{real_transverse, GenericSubmanifold};

/// A generic `N ⊂ C^n` of codimension `k` and `F : C^n → C^m` on the sharp
/// side of `4n − k ≥ 2(m + 1)`, with a CR singularity at the origin that no
/// small perturbation removes.
#[derive(Clone, Debug)]
pub struct SharpExample {
    pub manifold: GenericSubmanifold,
    pub map: HoloMap,
    /// `m − n + 1`, the codimension of the rank-drop locus of `DF`.
    pub nu: usize,
    /// `(row subset, minor)` pairs cutting out that locus near `0`.
    pub generators: Vec<(Vec<usize>, Poly)>,
    /// `{generators = 0}` meets `N` transversally at `0`.
    pub transverse: bool,
}

/// Greedily picks, in lexicographic row order, up to `nu` maximal minors of
/// `DF` vanishing at `p` whose complex differentials at `p` are independent.
pub fn select_generators(
    f: &HoloMap,
    p: &[GaussRat],
    nu: usize,
) -> Result<Vec<(Vec<usize>, Poly)>, ImagesError> {
    let n = f.n();
    let mut chosen = Vec::new();
    let mut grads: Vec<Vec<GaussRat>> = Vec::new();
    for (rows, _, minor) in f.jacobian().minors_indexed(n)? {
        if chosen.len() == nu {
            break;
        }
        if !minor.eval(p).is_zero() {
            continue;
        }
        let g: Vec<GaussRat> = (0..n).map(|l| minor.wirtinger(l, false).eval(p)).collect();
        let mut trial = grads.clone();
        trial.push(g);
        if CMatrix::from_rows(trial.clone()).rank() == trial.len() {
            grads = trial;
            chosen.push((rows, minor));
        }
    }
    Ok(chosen)
}

/// Builds the sharpness example for `(n, k, m)` with `2 ≤ k ≤ n ≤ m` and
/// `4n − k ≥ 2(m + 1)`.
///
/// For even `k` with `ℓ = n − k/2`: `N = {z_j = z̄_{n+1−j}, j ≤ k/2}` and
/// `F = (z_1, …, z_{n−1}, z_n², z_n z_{n−1}, …, z_n z_{n−ℓ+1})`, truncated to
/// `m` components. Odd `k` uses the construction for `k + 1` and drops the
/// imaginary part of the last equation; when that equation reads
/// `z_j = z̄_j` its real part vanishes identically and only `Im z_j = 0` is
/// kept.
pub fn build_sharp_example(n: usize, k: usize, m: usize) -> Result<SharpExample, ImagesError> {
    check_dims(n, k, m)?;
    if k < 2 {
        return Err(ImagesError::InvalidDimensions { n, k, m });
    }
    if 4 * n - k < 2 * (m + 1) {
        return Err(ImagesError::InequalityNotSatisfied { n, k, m });
    }
    let names: Vec<String> = (1..=n).map(|j| format!("z{j}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let ctx = VarContext::complex(&refs);
    let z = |j: usize| Poly::var(&ctx, j - 1, false);
    let zb = |j: usize| Poly::var(&ctx, j - 1, true);

    let pairs = k.div_ceil(2);
    let mut eqs = Vec::new();
    for j in 1..=pairs {
        let e = &z(j) - &zb(n + 1 - j);
        eqs.extend(
            [e.real_part(), e.imag_part()]
                .into_iter()
                .filter(|r| !r.is_zero()),
        );
    }
    if eqs.len() > k {
        eqs.pop();
    }
    let origin = vec![GaussRat::zero(); n];
    let manifold = GenericSubmanifold::new(&ctx, eqs, origin.clone())?;

    let ell = n - pairs;
    let mut comps: Vec<Poly> = (1..n).map(z).collect();
    comps.push(z(n).pow(2));
    comps.extend((1..ell).map(|s| &z(n) * &z(n - s)));
    comps.truncate(m);
    let map = HoloMap::new(&ctx, comps)?;

    let nu = m - n + 1;
    let generators = select_generators(&map, &origin, nu)?;
    let transverse = generators.len() == nu && {
        let zs: Vec<Poly> = generators.iter().map(|(_, g)| g.clone()).collect();
        real_transverse(&zs, &manifold, &origin)?
    };
    Ok(SharpExample {
        manifold,
        map,
        nu,
        generators,
        transverse,
    })
}

/// `G = F ⊕ (ε z_{n−ℓ+1}, …, ε z_n)` and the minor certifying rank `n`.
#[derive(Clone, Debug)]
pub struct ExtendedMap {
    pub map: HoloMap,
    /// Rows of `DG` whose minor is `ε^ℓ`.
    pub rows: Vec<usize>,
    pub minor: Poly,
}

/// Appends `ℓ` scaled coordinates to an `F` whose first `n − ℓ` components
/// are `z_1, …, z_{n−ℓ}`, making `DG` everywhere of rank `n`.
pub fn extend_and_perturb(
    f: &HoloMap,
    ell: usize,
    eps: &GaussRat,
) -> Result<ExtendedMap, ImagesError> {
    let (n, m) = (f.n(), f.m());
    if ell > n || n - ell > m {
        return Err(ImagesError::InvalidDimensions { n, k: ell, m });
    }
    if eps.is_zero() {
        return Err(ImagesError::Degenerate("ε must be nonzero".into()));
    }
    let ctx = f.ctx();
    for j in 0..n - ell {
        if f.components()[j] != Poly::var(ctx, j, false) {
            return Err(ImagesError::NotNormalized(format!(
                "component {} is not {}",
                j + 1,
                ctx.name(j)
            )));
        }
    }
    let mut comps = f.components().to_vec();
    comps.extend((n - ell..n).map(|j| Poly::var(ctx, j, false).scale(eps)));
    let map = HoloMap::new(ctx, comps)?;
    let rows: Vec<usize> = (0..n - ell).chain(m..m + ell).collect();
    let cols: Vec<usize> = (0..n).collect();
    let minor = map.jacobian().submatrix(&rows, &cols).det();
    Ok(ExtendedMap { map, rows, minor })
}
