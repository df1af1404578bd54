use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;

use super::{corresponds_parabolic, extract_quadratic, QuadraticError};
use crate::algebra::{
    divide_exact, series_divide, AlgebraError, CMatrix, GaussRat, Monomial, Poly, SeriesQuotient,
    VarContext,
};
use crate::geometry::real_gradient;

pub const DEFAULT_ORDER: u32 = 12;

fn check_two_vars(rho: &Poly) -> Result<(), QuadraticError> {
    let ctx = rho.ctx();
    if ctx.len() != 2 {
        return Err(QuadraticError::WrongVariableCount {
            expected: 2,
            got: ctx.len(),
        });
    }
    if ctx.is_real(0) || ctx.is_real(1) {
        return Err(QuadraticError::NotNormalized(
            "variables must be complex".into(),
        ));
    }
    Ok(())
}

/// Coefficients `(ρ_{z̄2}, −ρ_{z̄1})` of the field
/// `L = ρ_{z̄2} ∂/∂z̄1 − ρ_{z̄1} ∂/∂z̄2` spanning `T^{0,1}` at CR points.
pub fn cr_vector_field(rho: &Poly) -> Result<(Poly, Poly), QuadraticError> {
    check_two_vars(rho)?;
    Ok((rho.wirtinger(1, true), -rho.wirtinger(0, true)))
}

/// Point `[α : β]` of `CP¹` reached by `[ρ_{z̄2} : ρ_{z̄1}]` along a ray.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Direction {
    pub v: [GaussRat; 2],
    pub limit: [GaussRat; 2],
}

impl Direction {
    fn same_limit(&self, o: &Direction) -> bool {
        &self.limit[0] * &o.limit[1] == &self.limit[1] * &o.limit[0]
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "v=({}, {}) -> [{} : {}]",
            self.v[0], self.v[1], self.limit[0], self.limit[1]
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RemovabilityTag {
    /// `ρ_{z̄2} = q ρ_{z̄1}` exactly, or `ρ_{z̄1} = q ρ_{z̄2}` when `swapped`.
    Removable {
        quotient: Poly,
        swapped: bool,
    },
    /// The formal quotient exists through total degree `order`.
    RemovableToOrder {
        order: u32,
        quotient: Poly,
        swapped: bool,
    },
    /// No formal power series quotient exists in either direction.
    /// `witnesses` hold ray evidence against `ρ_{z̄2}/ρ_{z̄1}` and
    /// `ρ_{z̄1}/ρ_{z̄2}` being real-analytic, in that order.
    NotRemovable {
        obstructions: [u32; 2],
        directions: Vec<Direction>,
        witnesses: [Option<RayWitness>; 2],
    },
    Unknown,
}

impl RemovabilityTag {
    pub fn label(&self) -> &'static str {
        match self {
            RemovabilityTag::Removable { .. } => "Removable",
            RemovabilityTag::RemovableToOrder { .. } => "RemovableToOrder",
            RemovabilityTag::NotRemovable { .. } => "NotRemovable",
            RemovabilityTag::Unknown => "Unknown",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RemovabilityVerdict {
    pub tag: RemovabilityTag,
    pub notes: Vec<String>,
}

impl RemovabilityVerdict {
    /// Re-checks a `Removable` quotient by exact multiplication.
    pub fn verify(&self, rho: &Poly) -> bool {
        match &self.tag {
            RemovabilityTag::Removable { quotient, swapped } => {
                let (a, b) = (rho.wirtinger(1, true), rho.wirtinger(0, true));
                if *swapped {
                    b == quotient * &a
                } else {
                    a == quotient * &b
                }
            }
            _ => false,
        }
    }
}

/// Rays `t ↦ t v` probed for the limit of `[ρ_{z̄2} : ρ_{z̄1}]`.
fn probe_rays() -> Vec<[GaussRat; 2]> {
    let g = |a: i64, b: i64| GaussRat::from_ints(a, b);
    vec![
        [g(1, 0), g(0, 0)],
        [g(0, 0), g(1, 0)],
        [g(0, 1), g(0, 0)],
        [g(0, 0), g(0, 1)],
        [g(1, 0), g(1, 0)],
        [g(1, 0), g(-1, 0)],
        [g(1, 0), g(0, 1)],
        [g(0, 1), g(1, 0)],
        [g(2, 0), g(1, 0)],
        [g(1, 0), g(2, 0)],
        [g(1, 1), g(1, 0)],
        [g(1, 0), g(1, -1)],
        [g(0, 1), g(2, 1)],
    ]
}

/// Lowest-order coefficient of `p(t v)` in the real parameter `t`.
fn ray_leading(p: &Poly, tctx: &Arc<VarContext>, v: &[GaussRat; 2]) -> Option<(u32, GaussRat)> {
    let t = Poly::var(tctx, 0, false);
    let images = [t.scale(&v[0]), t.scale(&v[1])];
    let on_ray = p.substitute_vars(tctx, &images, None);
    let d = on_ray.order()?;
    Some((
        d,
        on_ray
            .homogeneous_part(d)
            .terms()
            .next()
            .map(|(_, c)| c.clone())
            .expect("nonzero part"),
    ))
}

fn ray_limits(a: &Poly, b: &Poly) -> Vec<Direction> {
    let tctx = VarContext::with_flags(&[("t", true)]);
    let mut out = Vec::new();
    for v in probe_rays() {
        let limit = match (ray_leading(a, &tctx, &v), ray_leading(b, &tctx, &v)) {
            (None, None) => continue,
            (Some((_, c)), None) => [c, GaussRat::zero()],
            (None, Some((_, c))) => [GaussRat::zero(), c],
            (Some((p, ca)), Some((q, cb))) => {
                if p < q {
                    [ca, GaussRat::zero()]
                } else if p > q {
                    [GaussRat::zero(), cb]
                } else {
                    [ca, cb]
                }
            }
        };
        out.push(Direction { v, limit });
    }
    out
}

/// Ray evidence that `num/den` is not real-analytic at `0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RayWitness {
    /// `num(tv)/den(tv)` is unbounded as `t → 0`.
    Pole { v: [GaussRat; 2] },
    /// The `t^degree` coefficients `c(v + jh)` of `num/den` along the rays
    /// `j = 0..=degree+1` have nonzero `(degree+1)`-th difference `value`.
    /// An analytic quotient would make `c` a real polynomial of that degree.
    Difference {
        v: [GaussRat; 2],
        h: [GaussRat; 2],
        degree: u32,
        value: GaussRat,
    },
}

impl RayWitness {
    /// Recomputes the witness from scratch.
    pub fn check(&self, num: &Poly, den: &Poly) -> bool {
        let tctx = VarContext::with_flags(&[("t", true)]);
        match self {
            RayWitness::Pole { v } => {
                matches!(ray_quotient(num, den, &tctx, v), Some((d, _)) if d < 0)
            }
            RayWitness::Difference {
                v,
                h,
                degree,
                value,
            } => {
                finite_difference(num, den, &tctx, v, h, *degree).as_ref() == Some(value)
                    && !value.is_zero()
            }
        }
    }
}

impl fmt::Display for RayWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RayWitness::Pole { v } => write!(f, "unbounded along v=({}, {})", v[0], v[1]),
            RayWitness::Difference {
                v,
                h,
                degree,
                value,
            } => write!(
                f,
                "v=({}, {}), h=({}, {}): order-{} difference of the t^{} coefficient is {}",
                v[0],
                v[1],
                h[0],
                h[1],
                degree + 1,
                degree,
                value
            ),
        }
    }
}

/// `(ord_t num(tv) − ord_t den(tv), ratio of leading coefficients)`.
fn ray_quotient(
    num: &Poly,
    den: &Poly,
    tctx: &Arc<VarContext>,
    v: &[GaussRat; 2],
) -> Option<(i64, GaussRat)> {
    let (q, cb) = ray_leading(den, tctx, v)?;
    match ray_leading(num, tctx, v) {
        None => Some((i64::MAX, GaussRat::zero())),
        Some((p, ca)) => Some((i64::from(p) - i64::from(q), &ca / &cb)),
    }
}

fn binomial(n: u32, k: u32) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * i64::from(n - i) / i64::from(i + 1))
}

/// `Σ_j (−1)^j C(e+1, j) c_e(v + jh)`, or `None` when some ray is
/// unusable (vanishing denominator, or lower order than `e`).
fn finite_difference(
    num: &Poly,
    den: &Poly,
    tctx: &Arc<VarContext>,
    v: &[GaussRat; 2],
    h: &[GaussRat; 2],
    e: u32,
) -> Option<GaussRat> {
    let mut total = GaussRat::zero();
    for j in 0..=e + 1 {
        let jj = GaussRat::from_ints(i64::from(j), 0);
        let p = [&v[0] + &(&jj * &h[0]), &v[1] + &(&jj * &h[1])];
        let (d, c) = ray_quotient(num, den, tctx, &p)?;
        if d < i64::from(e) {
            return None;
        }
        if d == i64::from(e) {
            let w = GaussRat::from_ints(if j % 2 == 0 { 1 } else { -1 } * binomial(e + 1, j), 0);
            total += &(&w * &c);
        }
    }
    Some(total)
}

/// Searches probe rays for evidence that `num/den` is not real-analytic.
pub fn nonanalytic_witness(num: &Poly, den: &Poly, max_degree: u32) -> Option<RayWitness> {
    let tctx = VarContext::with_flags(&[("t", true)]);
    let probes = probe_rays();
    for v in &probes {
        if matches!(ray_quotient(num, den, &tctx, v), Some((d, _)) if d < 0) {
            return Some(RayWitness::Pole { v: v.clone() });
        }
    }
    for e in 0..=max_degree {
        for v in &probes {
            for h in &probes {
                if let Some(value) = finite_difference(num, den, &tctx, v, h, e) {
                    if !value.is_zero() {
                        return Some(RayWitness::Difference {
                            v: v.clone(),
                            h: h.clone(),
                            degree: e,
                            value,
                        });
                    }
                }
            }
        }
    }
    None
}

fn distinct_pair(dirs: &[Direction]) -> Option<(Direction, Direction)> {
    for (i, d) in dirs.iter().enumerate() {
        if let Some(o) = dirs[i + 1..].iter().find(|o| !d.same_limit(o)) {
            return Some((d.clone(), o.clone()));
        }
    }
    None
}

fn exact(num: &Poly, den: &Poly) -> Result<Option<Poly>, QuadraticError> {
    if den.is_zero() {
        return Ok(None);
    }
    match divide_exact(num, den) {
        Ok(q) => Ok(Some(q)),
        Err(AlgebraError::NoExactQuotient) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn series(num: &Poly, den: &Poly, order: u32) -> Result<Option<SeriesQuotient>, QuadraticError> {
    if den.is_zero() {
        return Ok(None);
    }
    Ok(Some(series_divide(num, den, order)?))
}

/// Decides whether the CR singularity at `0` of `w = ρ(z, z̄)` in `C³` is
/// removable, which holds exactly when `ρ_{z̄2}/ρ_{z̄1}` or its inverse
/// extends real-analytically.
///
/// Polynomial quotients prove removability. A formal power series quotient
/// through `order` gives `RemovableToOrder`. When the graded division is
/// obstructed both ways no real-analytic quotient exists, so the verdict is
/// `NotRemovable`; rays where `[ρ_{z̄2} : ρ_{z̄1}]` has different limits are
/// reported as extra witnesses.
pub fn removability_test(rho: &Poly, order: u32) -> Result<RemovabilityVerdict, QuadraticError> {
    check_two_vars(rho)?;
    let a = rho.wirtinger(1, true);
    let b = rho.wirtinger(0, true);
    let origin = [GaussRat::zero(), GaussRat::zero()];
    let mut notes = Vec::new();
    if a.is_zero() && b.is_zero() {
        notes.push("ρ is holomorphic; the graph is a complex manifold".into());
        return Ok(RemovabilityVerdict {
            tag: RemovabilityTag::Removable {
                quotient: a,
                swapped: false,
            },
            notes,
        });
    }
    if !a.eval(&origin).is_zero() || !b.eval(&origin).is_zero() {
        notes.push("0 is a CR point; nothing to remove".into());
    }
    if let Some(q) = exact(&a, &b)? {
        return Ok(RemovabilityVerdict {
            tag: RemovabilityTag::Removable {
                quotient: q,
                swapped: false,
            },
            notes,
        });
    }
    if let Some(q) = exact(&b, &a)? {
        return Ok(RemovabilityVerdict {
            tag: RemovabilityTag::Removable {
                quotient: q,
                swapped: true,
            },
            notes,
        });
    }
    let forward = series(&a, &b, order)?;
    let backward = series(&b, &a, order)?;
    for (s, swapped) in [(&forward, false), (&backward, true)] {
        if let Some(SeriesQuotient::Series { quotient, order }) = s {
            notes.push(
                "no polynomial quotient; formal quotient computed to the stated order".into(),
            );
            let tag = RemovabilityTag::RemovableToOrder {
                order: *order,
                quotient: quotient.clone(),
                swapped,
            };
            return Ok(RemovabilityVerdict { tag, notes });
        }
    }
    let dirs = ray_limits(&a, &b);
    if let (Some(SeriesQuotient::Obstructed(d1)), Some(SeriesQuotient::Obstructed(d2))) =
        (&forward, &backward)
    {
        notes.push(format!(
            "ρ_z̄2/ρ_z̄1 obstructed at degree {d1}; ρ_z̄1/ρ_z̄2 obstructed at degree {d2}"
        ));
        let directions = match distinct_pair(&dirs) {
            Some((d, o)) => {
                notes.push(format!("limit depends on direction: {d}; {o}"));
                vec![d, o]
            }
            None => {
                notes.push("all probed rays share one limit line".into());
                vec![]
            }
        };
        let witnesses = [
            nonanalytic_witness(&a, &b, order),
            nonanalytic_witness(&b, &a, order),
        ];
        for (w, name) in witnesses.iter().zip(["ρ_z̄2/ρ_z̄1", "ρ_z̄1/ρ_z̄2"]) {
            if let Some(w) = w {
                notes.push(format!("{name} is not real-analytic: {w}"));
            }
        }
        let tag = RemovabilityTag::NotRemovable {
            obstructions: [*d1, *d2],
            directions,
            witnesses,
        };
        return Ok(RemovabilityVerdict { tag, notes });
    }
    if let Some((d, o)) = distinct_pair(&dirs) {
        notes.push(format!("limit depends on direction: {d}; {o}"));
        let tag = RemovabilityTag::NotRemovable {
            obstructions: [0, 0],
            directions: vec![d, o],
            witnesses: [None, None],
        };
        return Ok(RemovabilityVerdict { tag, notes });
    }
    Ok(RemovabilityVerdict {
        tag: RemovabilityTag::Unknown,
        notes,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SmallSingVerdict {
    NotRemovable,
    Inapplicable(String),
    Unknown(String),
}

impl SmallSingVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            SmallSingVerdict::NotRemovable => "NotRemovable",
            SmallSingVerdict::Inapplicable(_) => "Inapplicable",
            SmallSingVerdict::Unknown(_) => "Unknown",
        }
    }
}

fn real_row(g: &[GaussRat]) -> Vec<GaussRat> {
    g.iter().map(|x| GaussRat::real(x.re.clone())).collect()
}

/// Certifies `dim_R {ρ_z̄1 = ρ_z̄2 = 0} < 2` near `0`.
///
/// With `r` the rank of the linear parts of the four real equations
/// `Re/Im ρ_z̄j`, `r ≥ 3` suffices. When `r = 2` the set lies on a graph over
/// the kernel plane `K` of those linear parts; each dependent equation, minus
/// the matching combination of independent ones, has no linear part, and if
/// its quadratic part is definite on `K` the singular set is `{0}`.
/// `Err` carries whether `K` itself lies in the singular set.
fn small_singular_set(rho: &Poly) -> Result<(), (bool, String)> {
    let origin = vec![GaussRat::zero(); 2];
    let mut eqs = Vec::new();
    for v in 0..2 {
        let d = rho.wirtinger(v, true);
        eqs.push(d.real_part());
        eqs.push(d.imag_part());
    }
    let rows: Vec<Vec<GaussRat>> = eqs
        .iter()
        .map(|e| real_row(&real_gradient(e, &origin)))
        .collect();
    let lin = CMatrix::from_rows(rows.clone());
    let r = lin.rank();
    if r >= 3 {
        return Ok(());
    }
    if r < 2 {
        return Err((
            false,
            format!("linear parts of the singular-set equations have rank {r}"),
        ));
    }
    let (_, pivots) = lin.transpose().rref();
    let indep: Vec<usize> = pivots.clone();
    let basis = CMatrix::from_rows(indep.iter().map(|&i| rows[i].clone()).collect());
    let kernel = lin.null_space();
    let uctx = VarContext::with_flags(&[("u1", true), ("u2", true)]);
    let u = [Poly::var(&uctx, 0, false), Poly::var(&uctx, 1, false)];
    let images: Vec<Poly> = (0..2)
        .map(|l| {
            (0..2).fold(Poly::zero(&uctx), |acc, k| {
                let c = GaussRat::new(kernel[k][2 * l].re.clone(), kernel[k][2 * l + 1].re.clone());
                &acc + &u[k].scale(&c)
            })
        })
        .collect();
    let on_k = |p: &Poly| p.substitute_vars(&uctx, &images, None);
    if eqs.iter().all(|e| on_k(e).is_zero()) {
        return Err((true, "the singular set contains a real 2-plane".into()));
    }
    for (i, e) in eqs.iter().enumerate() {
        if indep.contains(&i) {
            continue;
        }
        let coeffs = solve_combination(&basis, &rows[i]);
        let reduced = indep
            .iter()
            .zip(&coeffs)
            .fold(e.clone(), |acc, (&j, c)| &acc - &eqs[j].scale(c));
        let q = on_k(&reduced).homogeneous_part(2);
        if definite(&q) {
            return Ok(());
        }
    }
    Err((
        false,
        "no definite quadratic part on the kernel plane".into(),
    ))
}

/// Coefficients `c` with `Σ c_j basis_j = target`, assuming a solution.
fn solve_combination(basis: &CMatrix, target: &[GaussRat]) -> Vec<GaussRat> {
    let k = basis.rows();
    let aug = basis
        .transpose()
        .hstack(&CMatrix::from_columns(target.len(), &[target.to_vec()]));
    let (red, pivots) = aug.rref();
    let mut c = vec![GaussRat::zero(); k];
    for (row, &p) in pivots.iter().enumerate() {
        if p < k {
            c[p] = red.get(row, k).clone();
        }
    }
    c
}

/// `α u1² + β u1u2 + γ u2²` with `β² < 4αγ`.
fn definite(q: &Poly) -> bool {
    let coef = |e: [u32; 2]| q.coeff(&Monomial(vec![e[0], e[1], 0, 0])).re;
    if !q.terms().all(|(_, c)| c.im.is_zero()) {
        return false;
    }
    let (al, be, ga) = (coef([2, 0]), coef([1, 1]), coef([0, 2]));
    &be * &be < BigRational::from_integer(4.into()) * &al * &ga
}

/// Sufficient test for non-removability: `∂̄Q ≢ 0`, `Q` not parabolic, and
/// the singular set has real dimension below 2.
pub fn not_bishop_small_sing(rho: &Poly) -> Result<SmallSingVerdict, QuadraticError> {
    check_two_vars(rho)?;
    let (m, _) = extract_quadratic(rho, 2)?;
    if m.a.is_zero() && m.b.is_zero() {
        return Ok(SmallSingVerdict::Inapplicable("∂̄Q ≡ 0".into()));
    }
    if corresponds_parabolic(&m.a, &m.b) {
        return Ok(SmallSingVerdict::Inapplicable(
            "Q corresponds to a parabolic Bishop surface".into(),
        ));
    }
    match small_singular_set(rho) {
        Ok(()) => Ok(SmallSingVerdict::NotRemovable),
        Err((true, why)) => Ok(SmallSingVerdict::Inapplicable(format!(
            "singular set too large: {why}"
        ))),
        Err((false, why)) => Ok(SmallSingVerdict::Unknown(why)),
    }
}

/// `w = z̄1 z2 + z̄2^{k+3}`, whose quotient `ρ_z̄2/ρ_z̄1` is `C^k` but not
/// `C^{k+1}` at `0`.
#[derive(Clone, Debug)]
pub struct CkExample {
    pub rho: Poly,
    pub k: u32,
}

pub fn ck_example(k: u32) -> CkExample {
    let ctx = VarContext::complex(&["z1", "z2"]);
    let rho = &(&Poly::var(&ctx, 0, true) * &Poly::var(&ctx, 1, false))
        + &Poly::var(&ctx, 1, true).pow(k + 3);
    CkExample { rho, k }
}
