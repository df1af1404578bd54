use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::construct::select_generators;
use super::{perturbability, HoloMap, ImagesError};
use crate::algebra::{
    certify_no_common_zero, interval_eval, subsets, CMatrix, Certification, GaussRat, IntervalBox,
    Poly, PolyMatrix,
};
use crate::geometry::{real_transverse, GenericSubmanifold};

/// Number of random candidates tried per grid level before refining.
const PER_LEVEL: usize = 64;
const LEVELS: u32 = 8;

/// Random element of the grid `{δ j / 2^L : |j| ≤ 2^L}`.
fn grid_rat(rng: &mut ChaCha8Rng, delta: &BigRational, level: u32) -> BigRational {
    let steps = 1i64 << level;
    let j = rng.random_range(-steps..=steps);
    delta * BigRational::new(BigInt::from(j), BigInt::from(steps))
}

fn grid_complex(rng: &mut ChaCha8Rng, delta: &BigRational, level: u32) -> GaussRat {
    let re = grid_rat(rng, delta, level);
    GaussRat::new(re, grid_rat(rng, delta, level))
}

fn level_of(attempt: usize) -> u32 {
    ((attempt.saturating_sub(1) / PER_LEVEL) as u32) % LEVELS
}

/// Proves `rank DG = n` on `N ∩ box`: the maximal minors of `DG` have no
/// common zero there.
pub fn certify_rank_n(
    n: &GenericSubmanifold,
    g: &HoloMap,
    b: &IntervalBox,
    depth: usize,
) -> Result<Certification, ImagesError> {
    let minors = g.jacobian().minors(g.n())?;
    if minors.iter().all(Poly::is_zero) {
        return Ok(Certification::Undecided(b.clone()));
    }
    if minors
        .iter()
        .any(|m| m.as_constant().is_some_and(|c| !c.is_zero()))
    {
        return Ok(Certification::Certified {
            leaves: 1,
            depth: 0,
        });
    }
    Ok(certify_no_common_zero(
        &minors,
        &n.constraint_polys(),
        b,
        depth,
    )?)
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub b: IntervalBox,
    pub budget: usize,
    pub seed: u64,
    /// Bound on the real and imaginary parts of each entry of `A`.
    pub delta: BigRational,
    pub depth: usize,
}

/// `G = F + A z` with an interval certificate that `rank DG = n` on
/// `N ∩ box`. Replaying re-runs the certification from scratch.
#[derive(Clone, Debug)]
pub struct LinearCertificate {
    pub a: CMatrix,
    pub g: HoloMap,
    pub b: IntervalBox,
    pub depth: usize,
    pub certification: Certification,
}

impl LinearCertificate {
    pub fn replay(&self, n: &GenericSubmanifold) -> Result<bool, ImagesError> {
        Ok(certify_rank_n(n, &self.g, &self.b, self.depth)?.is_certified())
    }
}

#[derive(Clone, Debug)]
pub struct PerturbationResult {
    pub certificate: Option<LinearCertificate>,
    pub attempts: usize,
    pub seed: u64,
}

fn add_linear(f: &HoloMap, a: &CMatrix, p: Option<&[GaussRat]>) -> Result<HoloMap, ImagesError> {
    let ctx = f.ctx();
    let comps = f
        .components()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            (0..f.n()).fold(c.clone(), |acc, l| {
                let mut v = Poly::var(ctx, l, false);
                if let Some(p) = p {
                    v = &v - &Poly::constant(ctx, p[l].clone());
                }
                &acc + &v.scale(a.get(i, l))
            })
        })
        .collect();
    HoloMap::new(ctx, comps)
}

/// Seeded search for a small linear `A` such that `G = F + A z` has no CR
/// singularity on `N ∩ box`. `A = 0` is tried first, then random matrices
/// on rational grids that refine every 64 attempts.
pub fn search_linear_perturbation(
    n: &GenericSubmanifold,
    f: &HoloMap,
    opts: &SearchOptions,
) -> Result<PerturbationResult, ImagesError> {
    let (dim, k, m) = (f.n(), n.k(), f.m());
    if !perturbability(dim, k, m)? {
        return Err(ImagesError::InequalityNotSatisfied { n: dim, k, m });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for attempt in 0..opts.budget {
        let a = if attempt == 0 {
            CMatrix::zeros(m, dim)
        } else {
            let level = level_of(attempt);
            CMatrix::from_fn(m, dim, |_, _| grid_complex(&mut rng, &opts.delta, level))
        };
        let g = add_linear(f, &a, None)?;
        let certification = certify_rank_n(n, &g, &opts.b, opts.depth)?;
        if certification.is_certified() {
            let cert = LinearCertificate {
                a,
                g,
                b: opts.b.clone(),
                depth: opts.depth,
                certification,
            };
            return Ok(PerturbationResult {
                certificate: Some(cert),
                attempts: attempt + 1,
                seed: opts.seed,
            });
        }
    }
    Ok(PerturbationResult {
        certificate: None,
        attempts: opts.budget,
        seed: opts.seed,
    })
}

/// `ψ(z) = φ(A z + z_0) + c` with `ψ(p) = 0`.
#[derive(Clone, Debug)]
pub struct AnchoredWitness {
    pub psi: Vec<Poly>,
    pub a: CMatrix,
    pub z0: Vec<GaussRat>,
    pub c: Vec<GaussRat>,
    /// Upper bound for `sup |ψ − φ|` over the working box.
    pub sup_bound: f64,
}

#[derive(Clone, Debug)]
pub struct AnchoredResult {
    pub witness: Option<AnchoredWitness>,
    pub attempts: usize,
}

fn compose_affine(phi: &[Poly], a: &CMatrix, z0: &[GaussRat]) -> Vec<Poly> {
    let ctx = phi[0].ctx();
    let images: Vec<Poly> = (0..ctx.len())
        .map(|l| {
            (0..ctx.len()).fold(Poly::constant(ctx, z0[l].clone()), |acc, j| {
                &acc + &Poly::var(ctx, j, false).scale(a.get(l, j))
            })
        })
        .collect();
    phi.iter()
        .map(|f| f.substitute_vars(ctx, &images, None))
        .collect()
}

fn sup_bound(diff: &[Poly], b: &IntervalBox) -> Result<f64, ImagesError> {
    let mut worst = 0.0f64;
    for d in diff {
        let e = interval_eval(d, b)?;
        worst = worst.max(e.re.mag().hypot(e.im.mag()));
    }
    Ok(worst)
}

/// Moves the zero set of a holomorphic `φ : C^n → C^ν` through `p` by a
/// small affine change `ψ(z) = φ(A z + z_0) + c`, keeping `dψ(p)` of rank
/// `ν` and the zero set transverse to `N` at `p`.
pub fn anchored_zero_perturbation(
    phi: &[Poly],
    n: &GenericSubmanifold,
    p: &[GaussRat],
    delta: &BigRational,
    b: &IntervalBox,
    seed: u64,
    budget: usize,
) -> Result<AnchoredResult, ImagesError> {
    let nu = phi.len();
    let dim = n.n();
    if nu == 0 || 2 * nu > 2 * dim - n.k() {
        return Err(ImagesError::Degenerate(format!(
            "ν = {nu} exceeds half of dim N = {}",
            2 * dim - n.k()
        )));
    }
    if phi.iter().any(Poly::has_conj) {
        return Err(ImagesError::NotHolomorphic(
            phi.iter().position(Poly::has_conj).unwrap_or(0),
        ));
    }
    let ctx = n.ctx();
    if PolyMatrix::jacobian(ctx, phi).generic_rank() < nu {
        return Err(ImagesError::Degenerate(
            "Dφ has generic rank below ν".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0..budget {
        let (a, z0) = if attempt == 0 {
            (CMatrix::identity(dim), vec![GaussRat::zero(); dim])
        } else {
            let level = level_of(attempt);
            let e = CMatrix::from_fn(dim, dim, |_, _| grid_complex(&mut rng, delta, level));
            let z0 = (0..dim)
                .map(|_| grid_complex(&mut rng, delta, level))
                .collect();
            (CMatrix::identity(dim).add(&e), z0)
        };
        let shifted = compose_affine(phi, &a, &z0);
        let c: Vec<GaussRat> = shifted.iter().map(|s| -s.eval(p)).collect();
        let psi: Vec<Poly> = shifted
            .iter()
            .zip(&c)
            .map(|(s, c)| s + &Poly::constant(ctx, c.clone()))
            .collect();
        if PolyMatrix::jacobian(ctx, &psi).eval(p).rank() < nu {
            continue;
        }
        if !real_transverse(&psi, n, p)? {
            continue;
        }
        let diff: Vec<Poly> = psi.iter().zip(phi).map(|(s, f)| s - f).collect();
        let bound = sup_bound(&diff, b)?;
        let limit = num_traits::ToPrimitive::to_f64(delta).unwrap_or(0.0);
        if diff.iter().all(Poly::is_zero) || bound < limit {
            let witness = AnchoredWitness {
                psi,
                a,
                z0,
                c,
                sup_bound: bound,
            };
            return Ok(AnchoredResult {
                witness: Some(witness),
                attempts: attempt + 1,
            });
        }
    }
    Ok(AnchoredResult {
        witness: None,
        attempts: budget,
    })
}

/// Checks run on a candidate 2-jet perturbation `F̃` at `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoJetDiagnostics {
    pub all_minors_vanish: bool,
    /// Number of minors with independent differentials found, out of `ν`.
    pub generators_found: usize,
    pub transverse: bool,
}

impl TwoJetDiagnostics {
    pub fn passes(&self, nu: usize) -> bool {
        self.all_minors_vanish && self.generators_found == nu && self.transverse
    }
}

#[derive(Clone, Debug)]
pub struct TwoJetResult {
    pub nu: usize,
    pub map: Option<HoloMap>,
    pub generators: Vec<(Vec<usize>, Poly)>,
    /// Diagnostics of `F` itself.
    pub initial: TwoJetDiagnostics,
    pub attempts: usize,
}

fn diagnose(
    n: &GenericSubmanifold,
    f: &HoloMap,
    p: &[GaussRat],
    nu: usize,
) -> Result<(TwoJetDiagnostics, Vec<(Vec<usize>, Poly)>), ImagesError> {
    let all_minors_vanish = f
        .jacobian()
        .minors(f.n())?
        .iter()
        .all(|m| m.eval(p).is_zero());
    let generators = select_generators(f, p, nu)?;
    let transverse = all_minors_vanish && generators.len() == nu && {
        let zs: Vec<Poly> = generators.iter().map(|(_, g)| g.clone()).collect();
        real_transverse(&zs, n, p)?
    };
    Ok((
        TwoJetDiagnostics {
            all_minors_vanish,
            generators_found: generators.len(),
            transverse,
        },
        generators,
    ))
}

/// Orthogonal projector onto `ker M`.
fn kernel_projector(m: &CMatrix) -> CMatrix {
    let ker = m.null_space();
    let dim = m.cols();
    if ker.is_empty() {
        return CMatrix::zeros(dim, dim);
    }
    let k = CMatrix::from_columns(dim, &ker);
    let kh = k.adjoint();
    let gram = (&kh * &k).inverse().expect("kernel basis is independent");
    &(&k * &gram) * &kh
}

/// Searches small perturbations of the 2-jet of `F` at a CR singularity `p`
/// that keep `p` singular and make the rank-drop locus of `DF̃` a smooth
/// complex submanifold of codimension `m − n + 1` cut out by maximal minors
/// and transverse to `N` at `p`. The linear part is projected so that it
/// annihilates `ker DF(p)`. `F` itself is tried first; `δ = 0` tries only `F`.
pub fn perturb_2jet(
    n: &GenericSubmanifold,
    f: &HoloMap,
    p: &[GaussRat],
    delta: &BigRational,
    seed: u64,
    budget: usize,
) -> Result<TwoJetResult, ImagesError> {
    let (dim, k, m) = (f.n(), n.k(), f.m());
    super::check_dims(dim, k, m)?;
    if k < 2 {
        return Err(ImagesError::InvalidDimensions { n: dim, k, m });
    }
    if 4 * dim - k < 2 * (m + 1) {
        return Err(ImagesError::InequalityHolds { n: dim, k, m });
    }
    let nu = m - dim + 1;
    let ctx = f.ctx();
    let (initial, generators) = diagnose(n, f, p, nu)?;
    if initial.passes(nu) {
        return Ok(TwoJetResult {
            nu,
            map: Some(f.clone()),
            generators,
            initial,
            attempts: 1,
        });
    }
    if delta.is_zero() {
        return Ok(TwoJetResult {
            nu,
            map: None,
            generators: vec![],
            initial,
            attempts: 1,
        });
    }
    let keep = CMatrix::identity(dim).sub(&kernel_projector(&f.jacobian().eval(p)));
    let shifted: Vec<Poly> = (0..dim)
        .map(|l| &Poly::var(ctx, l, false) - &Poly::constant(ctx, p[l].clone()))
        .collect();
    let quadratics: Vec<Poly> = subsets(dim + 1, 2)
        .into_iter()
        .map(|s| {
            let second = if s[1] == dim { s[0] } else { s[1] };
            &shifted[s[0]] * &shifted[second]
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..budget.max(1) {
        let level = level_of(attempt);
        let lin = CMatrix::from_fn(m, dim, |_, _| grid_complex(&mut rng, delta, level));
        let lin = &lin * &keep;
        let g = add_linear(f, &lin, Some(p))?;
        let comps: Vec<Poly> = g
            .components()
            .iter()
            .map(|c| {
                let c0 = grid_complex(&mut rng, delta, level);
                quadratics
                    .iter()
                    .fold(c + &Poly::constant(ctx, c0), |acc, q| {
                        &acc + &q.scale(&grid_complex(&mut rng, delta, level))
                    })
            })
            .collect();
        let g = HoloMap::new(ctx, comps)?;
        let (diag, generators) = diagnose(n, &g, p, nu)?;
        if diag.passes(nu) {
            return Ok(TwoJetResult {
                nu,
                map: Some(g),
                generators,
                initial,
                attempts: attempt + 1,
            });
        }
    }
    Ok(TwoJetResult {
        nu,
        map: None,
        generators: vec![],
        initial,
        attempts: budget.max(1),
    })
}
