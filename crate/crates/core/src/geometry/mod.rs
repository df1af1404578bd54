//! Generic submanifolds, complex tangent spaces, tangent cones and
//! transversality, all evaluated exactly at rational points.

use std::sync::Arc;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::{initial_form, AlgebraError, CMatrix, GaussRat, Poly, VarContext};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("point is not on the submanifold (equation {0} does not vanish)")]
    OffManifold(usize),
    #[error("point is not on the submanifold (real variable `{0}` has nonzero imaginary part)")]
    OffRealLocus(String),
    #[error("defining differentials are dependent at the point (rank {rank} < {expected})")]
    NonManifold { rank: usize, expected: usize },
    #[error("submanifold is not generic at the point (complex gradient rank {rank} < {expected})")]
    NotGeneric { rank: usize, expected: usize },
    #[error("equation {0} is not real-valued")]
    NotReal(usize),
    #[error("tangent cone of the zero polynomial is undefined")]
    UndefinedCone,
    #[error("function does not vanish at the point")]
    NotOnZeroSet,
    #[error("zero set is not a submanifold at the point (Jacobian rank {rank} < {expected})")]
    NotASubmanifold { rank: usize, expected: usize },
    #[error("point has {got} coordinates, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

pub type Point = Vec<GaussRat>;

/// Complex-linear subspace of `C^n` given by an independent basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexSubspace {
    pub ambient: usize,
    pub basis: Vec<Vec<GaussRat>>,
}

impl ComplexSubspace {
    /// Span of the given vectors, reduced to an independent basis.
    pub fn span(ambient: usize, vectors: &[Vec<GaussRat>]) -> Self {
        if vectors.is_empty() {
            return ComplexSubspace {
                ambient,
                basis: vec![],
            };
        }
        let m = CMatrix::from_rows(vectors.to_vec());
        let (r, piv) = m.rref();
        ComplexSubspace {
            ambient,
            basis: (0..piv.len()).map(|i| r.row(i)).collect(),
        }
    }

    pub fn whole(n: usize) -> Self {
        ComplexSubspace {
            ambient: n,
            basis: standard_basis(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, v: &[GaussRat]) -> bool {
        let mut rows = self.basis.clone();
        let before = if rows.is_empty() {
            0
        } else {
            CMatrix::from_rows(rows.clone()).rank()
        };
        rows.push(v.to_vec());
        CMatrix::from_rows(rows).rank() == before
    }

    /// Image under a linear map.
    pub fn map(&self, t: &CMatrix) -> ComplexSubspace {
        let imgs: Vec<Vec<GaussRat>> = self.basis.iter().map(|b| t.mul_vec(b)).collect();
        ComplexSubspace::span(t.rows(), &imgs)
    }

    /// `z = Σ t_i b_i` as polynomials in fresh complex parameters `t1..td`.
    pub fn parametrization(&self) -> (Arc<VarContext>, Vec<Poly>) {
        let names: Vec<String> = (1..=self.dim()).map(|i| format!("t{i}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let tc = VarContext::complex(&refs);
        let comps = (0..self.ambient)
            .map(|l| {
                self.basis
                    .iter()
                    .enumerate()
                    .fold(Poly::zero(&tc), |acc, (i, b)| {
                        &acc + &Poly::var(&tc, i, false).scale(&b[l])
                    })
            })
            .collect();
        (tc, comps)
    }

    pub fn same_as(&self, other: &ComplexSubspace) -> bool {
        self.dim() == other.dim() && other.basis.iter().all(|v| self.contains(v))
    }
}

fn standard_basis(n: usize) -> Vec<Vec<GaussRat>> {
    (0..n).map(|i| unit(n, i)).collect()
}

fn check_point(ctx: &VarContext, p: &[GaussRat]) -> Result<(), GeometryError> {
    if p.len() != ctx.len() {
        return Err(GeometryError::Dimension {
            expected: ctx.len(),
            got: p.len(),
        });
    }
    for (v, x) in p.iter().enumerate() {
        if ctx.is_real(v) && !x.is_real() {
            return Err(GeometryError::OffRealLocus(ctx.name(v).to_string()));
        }
    }
    Ok(())
}

/// Row of `(∂f/∂x_1, ∂f/∂y_1, …)` at `p`, complex-valued.
///
/// `∂/∂x = ∂_z + ∂_z̄` and `∂/∂y = i(∂_z − ∂_z̄)`; a real variable has no
/// barred slot, so the holomorphic extension is used in its `y` direction.
pub fn real_gradient(f: &Poly, p: &[GaussRat]) -> Vec<GaussRat> {
    let n = f.ctx().len();
    let mut row = Vec::with_capacity(2 * n);
    for l in 0..n {
        let dz = f.wirtinger(l, false).eval(p);
        let dzb = f.wirtinger(l, true).eval(p);
        row.push(&dz + &dzb);
        row.push(&GaussRat::i() * &(&dz - &dzb));
    }
    row
}

fn re_row(row: &[GaussRat]) -> Vec<GaussRat> {
    row.iter().map(|x| GaussRat::real(x.re.clone())).collect()
}

fn im_row(row: &[GaussRat]) -> Vec<GaussRat> {
    row.iter().map(|x| GaussRat::real(x.im.clone())).collect()
}

fn unit(len: usize, at: usize) -> Vec<GaussRat> {
    let mut v = vec![GaussRat::zero(); len];
    v[at] = GaussRat::one();
    v
}

/// Rows of the real Jacobian of real-valued equations, plus `dy_l` for each
/// real variable.
fn real_jacobian(ctx: &VarContext, eqs: &[Poly], p: &[GaussRat]) -> CMatrix {
    let n = ctx.len();
    let mut rows: Vec<Vec<GaussRat>> = eqs.iter().map(|r| re_row(&real_gradient(r, p))).collect();
    for v in 0..n {
        if ctx.is_real(v) {
            rows.push(unit(2 * n, 2 * v + 1));
        }
    }
    if rows.is_empty() {
        CMatrix::zeros(0, 2 * n)
    } else {
        CMatrix::from_rows(rows)
    }
}

/// Rows `(∂r/∂z_1, …, ∂r/∂z_n)(p)`, plus `e_l` for each real variable.
fn complex_gradients(ctx: &VarContext, eqs: &[Poly], p: &[GaussRat]) -> CMatrix {
    let n = ctx.len();
    let mut rows: Vec<Vec<GaussRat>> = eqs
        .iter()
        .map(|r| {
            (0..n)
                .map(|l| {
                    if ctx.is_real(l) {
                        GaussRat::zero()
                    } else {
                        r.wirtinger(l, false).eval(p)
                    }
                })
                .collect()
        })
        .collect();
    for v in 0..n {
        if ctx.is_real(v) {
            rows.push(unit(n, v));
        }
    }
    if rows.is_empty() {
        CMatrix::zeros(0, n)
    } else {
        CMatrix::from_rows(rows)
    }
}

fn real_to_complex(v: &[GaussRat]) -> Vec<GaussRat> {
    v.chunks(2)
        .map(|c| GaussRat::new(c[0].re.clone(), c[1].re.clone()))
        .collect()
}

fn complex_to_real(v: &[GaussRat]) -> Vec<GaussRat> {
    v.iter()
        .flat_map(|z| [GaussRat::real(z.re.clone()), GaussRat::real(z.im.clone())])
        .collect()
}

fn real_rank(vectors: &[Vec<GaussRat>]) -> usize {
    if vectors.is_empty() {
        0
    } else {
        CMatrix::from_rows(vectors.to_vec()).rank()
    }
}

/// Real submanifold `{r_1 = … = r_k = 0}` of `C^n`, generic at its base
/// point. Real variables of the context add the implied equations `Im x = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericSubmanifold {
    ctx: Arc<VarContext>,
    real_eqs: Vec<Poly>,
    base_point: Point,
}

impl GenericSubmanifold {
    pub fn new(
        ctx: &Arc<VarContext>,
        real_eqs: Vec<Poly>,
        base_point: Point,
    ) -> Result<Self, GeometryError> {
        for (j, r) in real_eqs.iter().enumerate() {
            if !r.is_real_valued() {
                return Err(GeometryError::NotReal(j));
            }
        }
        let n = GenericSubmanifold {
            ctx: ctx.clone(),
            real_eqs,
            base_point,
        };
        n.check_on(&n.base_point)?;
        n.check_generic(&n.base_point)?;
        Ok(n)
    }

    /// The whole space `C^n` (no equations).
    pub fn whole(ctx: &Arc<VarContext>) -> Self {
        GenericSubmanifold {
            ctx: ctx.clone(),
            real_eqs: vec![],
            base_point: vec![GaussRat::zero(); ctx.len()],
        }
    }

    pub fn ctx(&self) -> &Arc<VarContext> {
        &self.ctx
    }

    pub fn n(&self) -> usize {
        self.ctx.len()
    }

    /// Real codimension.
    pub fn k(&self) -> usize {
        self.real_eqs.len() + (0..self.n()).filter(|&v| self.ctx.is_real(v)).count()
    }

    pub fn real_eqs(&self) -> &[Poly] {
        &self.real_eqs
    }

    pub fn base_point(&self) -> &[GaussRat] {
        &self.base_point
    }

    /// Same submanifold with another base point, revalidated.
    pub fn at(&self, p: Point) -> Result<Self, GeometryError> {
        GenericSubmanifold::new(&self.ctx, self.real_eqs.clone(), p)
    }

    /// Equations to impose in a certification box; the `Im x = 0` of real
    /// variables is built into the box shape instead.
    pub fn constraint_polys(&self) -> Vec<Poly> {
        self.real_eqs.clone()
    }

    pub fn contains(&self, p: &[GaussRat]) -> bool {
        self.check_on(p).is_ok()
    }

    fn check_on(&self, p: &[GaussRat]) -> Result<(), GeometryError> {
        check_point(&self.ctx, p)?;
        for (j, r) in self.real_eqs.iter().enumerate() {
            if !r.eval(p).is_zero() {
                return Err(GeometryError::OffManifold(j));
            }
        }
        Ok(())
    }

    fn check_generic(&self, p: &[GaussRat]) -> Result<(), GeometryError> {
        let k = self.k();
        let rank = real_jacobian(&self.ctx, &self.real_eqs, p).rank();
        if rank < k {
            return Err(GeometryError::NonManifold { rank, expected: k });
        }
        let crank = complex_gradients(&self.ctx, &self.real_eqs, p).rank();
        if crank < k {
            return Err(GeometryError::NotGeneric {
                rank: crank,
                expected: k,
            });
        }
        Ok(())
    }

    /// Real tangent space `T_pN ⊂ R^{2n}` as complex vectors `x + iy`
    /// spanning it over the reals.
    pub fn tangent_space(&self, p: &[GaussRat]) -> Result<Vec<Vec<GaussRat>>, GeometryError> {
        self.check_on(p)?;
        let j = real_jacobian(&self.ctx, &self.real_eqs, p);
        let k = self.k();
        if j.rank() < k {
            return Err(GeometryError::NonManifold {
                rank: j.rank(),
                expected: k,
            });
        }
        let ns = if j.rows() == 0 {
            standard_basis(2 * self.n())
        } else {
            j.null_space()
        };
        Ok(ns.iter().map(|v| real_to_complex(v)).collect())
    }

    /// Jacobian matrix of the defining functions in real coordinates.
    pub fn real_jacobian(&self, p: &[GaussRat]) -> CMatrix {
        real_jacobian(&self.ctx, &self.real_eqs, p)
    }
}

/// `H_pN = { v : Σ_l ∂r_j/∂z_l(p) v_l = 0 }`, of dimension `n − k`.
pub fn complex_tangent(
    n: &GenericSubmanifold,
    p: &[GaussRat],
) -> Result<ComplexSubspace, GeometryError> {
    n.check_on(p)?;
    n.check_generic(p)?;
    let g = complex_gradients(&n.ctx, &n.real_eqs, p);
    let basis = if g.rows() == 0 {
        standard_basis(n.n())
    } else {
        g.null_space()
    };
    Ok(ComplexSubspace {
        ambient: n.n(),
        basis,
    })
}

/// `dim_C T^{0,1}_p M` for the real submanifold `M = {r_j = 0}`, which need
/// not be generic: `n − rank_C [∂r_j/∂z_l(p)]`.
pub fn cr_dimension_at(
    ctx: &Arc<VarContext>,
    m_eqs: &[Poly],
    p: &[GaussRat],
) -> Result<usize, GeometryError> {
    check_point(ctx, p)?;
    for (j, r) in m_eqs.iter().enumerate() {
        if !r.is_real_valued() {
            return Err(GeometryError::NotReal(j));
        }
        if !r.eval(p).is_zero() {
            return Err(GeometryError::OffManifold(j));
        }
    }
    let reals = (0..ctx.len()).filter(|&v| ctx.is_real(v)).count();
    let expected = m_eqs.len() + reals;
    let rank = real_jacobian(ctx, m_eqs, p).rank();
    if rank < expected {
        return Err(GeometryError::NonManifold { rank, expected });
    }
    Ok(ctx.len() - complex_gradients(ctx, m_eqs, p).rank())
}

/// Whether `V` lies in the tangent cone of `{φ = 0}` at `p`: the initial
/// form of `φ` at `p` vanishes identically on `p + V`.
pub fn tangent_cone_contains(
    phi: &Poly,
    p: &[GaussRat],
    v: &ComplexSubspace,
) -> Result<bool, GeometryError> {
    if phi.is_zero() {
        return Err(GeometryError::UndefinedCone);
    }
    check_point(phi.ctx(), p)?;
    if !phi.eval(p).is_zero() {
        return Err(GeometryError::NotOnZeroSet);
    }
    let init = initial_form(phi, p)?;
    if v.dim() == 0 {
        return Ok(true);
    }
    let (tc, comps) = v.parametrization();
    Ok(init.substitute_vars(&tc, &comps, None).is_zero())
}

/// Real tangent space of `Z = {φ_1 = … = φ_ν = 0}` at `p`, requiring the
/// real Jacobian of `(Re φ, Im φ)` to have rank `2ν`.
pub fn zero_set_tangent(
    z_eqs: &[Poly],
    p: &[GaussRat],
) -> Result<Vec<Vec<GaussRat>>, GeometryError> {
    let Some(first) = z_eqs.first() else {
        return Err(GeometryError::UndefinedCone);
    };
    let ctx = first.ctx();
    check_point(ctx, p)?;
    let mut rows = Vec::new();
    for phi in z_eqs {
        if !phi.eval(p).is_zero() {
            return Err(GeometryError::NotOnZeroSet);
        }
        let g = real_gradient(phi, p);
        rows.push(re_row(&g));
        rows.push(im_row(&g));
    }
    let j = CMatrix::from_rows(rows);
    let rank = j.rank();
    if rank < 2 * z_eqs.len() {
        return Err(GeometryError::NotASubmanifold {
            rank,
            expected: 2 * z_eqs.len(),
        });
    }
    Ok(j.null_space().iter().map(|v| real_to_complex(v)).collect())
}

/// `span_R{T_pZ, T_pN} = T_p C^n`.
pub fn real_transverse(
    z_eqs: &[Poly],
    n: &GenericSubmanifold,
    p: &[GaussRat],
) -> Result<bool, GeometryError> {
    let tz = zero_set_tangent(z_eqs, p)?;
    let tn = n.tangent_space(p)?;
    let all: Vec<Vec<GaussRat>> = tz.iter().chain(&tn).map(|v| complex_to_real(v)).collect();
    Ok(real_rank(&all) == 2 * n.n())
}

/// Real rank of a list of complex vectors viewed in `R^{2n}`.
pub fn real_span_rank(vectors: &[Vec<GaussRat>]) -> usize {
    let rows: Vec<Vec<GaussRat>> = vectors.iter().map(|v| complex_to_real(v)).collect();
    real_rank(&rows)
}

/// Applies a rational point transformation `r ↦ r∘T^{-1}` to equations.
pub fn transport_equations(eqs: &[Poly], t_inv: &CMatrix) -> Vec<Poly> {
    eqs.iter()
        .map(|r| {
            let ctx = r.ctx();
            let images: Vec<Poly> = (0..ctx.len())
                .map(|l| {
                    (0..ctx.len()).fold(Poly::zero(ctx), |acc, m| {
                        &acc + &Poly::var(ctx, m, false).scale(t_inv.get(l, m))
                    })
                })
                .collect();
            r.substitute_vars(ctx, &images, None)
        })
        .collect()
}
