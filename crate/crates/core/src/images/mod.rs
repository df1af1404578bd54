//! CR images `M = F(N)`: singular locus, equidimensional stability, and
//! perturbation searches and constructions in the non-equidimensional case.

mod construct;
mod perturb;

use std::sync::Arc;

use num_traits::Zero;
use thiserror::Error;

use crate::algebra::{initial_form, AlgebraError, GaussRat, Poly, PolyMatrix, VarContext};
use crate::geometry::{
    complex_tangent, tangent_cone_contains, ComplexSubspace, GenericSubmanifold, GeometryError,
};

pub use construct::{
    build_sharp_example, extend_and_perturb, select_generators, ExtendedMap, SharpExample,
};
pub use perturb::{
    anchored_zero_perturbation, certify_rank_n, perturb_2jet, search_linear_perturbation,
    AnchoredResult, LinearCertificate, PerturbationResult, SearchOptions, TwoJetDiagnostics,
    TwoJetResult,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ImagesError {
    #[error("component {0} is not holomorphic")]
    NotHolomorphic(usize),
    #[error("map has generic rank {rank} < {n}; CR dimensions of source and image would disagree")]
    RankDeficientMap { rank: usize, n: usize },
    #[error("map must be equidimensional (n = {n}, m = {m})")]
    WrongShape { n: usize, m: usize },
    #[error("invalid dimensions (n, k, m) = ({n}, {k}, {m}); need 1 <= k <= n <= m")]
    InvalidDimensions { n: usize, k: usize, m: usize },
    #[error("4n - k < 2(m + 1) fails for (n, k, m) = ({n}, {k}, {m})")]
    InequalityNotSatisfied { n: usize, k: usize, m: usize },
    #[error("4n - k >= 2(m + 1) fails for (n, k, m) = ({n}, {k}, {m}); perturbation is possible")]
    InequalityHolds { n: usize, k: usize, m: usize },
    #[error("map is not in normalized form: {0}")]
    NotNormalized(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Holomorphic polynomial map `C^n → C^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HoloMap {
    ctx: Arc<VarContext>,
    components: Vec<Poly>,
}

impl HoloMap {
    pub fn new(ctx: &Arc<VarContext>, components: Vec<Poly>) -> Result<Self, ImagesError> {
        for (i, c) in components.iter().enumerate() {
            if c.has_conj() {
                return Err(ImagesError::NotHolomorphic(i));
            }
        }
        Ok(HoloMap {
            ctx: ctx.clone(),
            components,
        })
    }

    pub fn ctx(&self) -> &Arc<VarContext> {
        &self.ctx
    }

    pub fn n(&self) -> usize {
        self.ctx.len()
    }

    pub fn m(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn jacobian(&self) -> PolyMatrix {
        PolyMatrix::jacobian(&self.ctx, &self.components)
    }

    pub fn eval(&self, p: &[GaussRat]) -> Vec<GaussRat> {
        self.components.iter().map(|c| c.eval(p)).collect()
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.components.iter().map(|c| c.to_string()).collect()
    }
}

/// The `n × n` minors of `DF` and the verdict at the base point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularLocus {
    pub minors: Vec<Poly>,
    /// Every minor vanishes at the base point: `F(p)` is a CR singularity.
    pub singular_at_base: bool,
    /// Real rank of `DF(p)` on `T_pN` equals `dim N`: `F|_N` is a local
    /// diffeomorphism at `p`. Global injectivity is not decided.
    pub local_diffeo: bool,
}

/// Generators of the locus where `DF` drops rank, with the verdict at `N`'s
/// base point.
pub fn image_singular_locus(
    n: &GenericSubmanifold,
    f: &HoloMap,
) -> Result<SingularLocus, ImagesError> {
    let df = f.jacobian();
    let rank = df.generic_rank();
    if rank < f.n() {
        return Err(ImagesError::RankDeficientMap { rank, n: f.n() });
    }
    let minors = df.minors(f.n())?;
    let p = n.base_point();
    let singular_at_base = minors.iter().all(|m| m.eval(p).is_zero());
    Ok(SingularLocus {
        minors,
        singular_at_base,
        local_diffeo: local_diffeo(n, f, p)?,
    })
}

/// Real rank of `DF(p)` restricted to `T_pN` equals `dim_R N`.
pub fn local_diffeo(
    n: &GenericSubmanifold,
    f: &HoloMap,
    p: &[GaussRat],
) -> Result<bool, ImagesError> {
    let tn = n.tangent_space(p)?;
    let dfp = f.jacobian().eval(p);
    let images: Vec<Vec<GaussRat>> = tn.iter().map(|v| dfp.mul_vec(v)).collect();
    Ok(crate::geometry::real_span_rank(&images) == 2 * n.n() - n.k())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StabilityTag {
    StableSingularity,
    ConditionFails,
    NotSingularAtPoint,
}

impl StabilityTag {
    pub fn as_str(self) -> &'static str {
        match self {
            StabilityTag::StableSingularity => "StableSingularity",
            StabilityTag::ConditionFails => "ConditionFails",
            StabilityTag::NotSingularAtPoint => "NotSingularAtPoint",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityVerdict {
    pub tag: StabilityTag,
    pub det: Poly,
    /// Initial form of `det DF` at `p`, when `det DF(p) = 0`.
    pub initial_form: Option<Poly>,
    pub h: ComplexSubspace,
    /// `H_pN ⊂ C_p Z_{det DF}`, when `det DF(p) = 0`.
    pub cone_contains_h: Option<bool>,
}

/// Whether the CR singularity of `F(N)` at `F(p)` survives every small
/// holomorphic perturbation of `F`, via the tangent-cone criterion.
pub fn equidim_stability(
    n: &GenericSubmanifold,
    f: &HoloMap,
    p: &[GaussRat],
) -> Result<StabilityVerdict, ImagesError> {
    if f.m() != f.n() {
        return Err(ImagesError::WrongShape { n: f.n(), m: f.m() });
    }
    let det = f.jacobian().det();
    let h = complex_tangent(n, p)?;
    if !det.eval(p).is_zero() {
        return Ok(StabilityVerdict {
            tag: StabilityTag::NotSingularAtPoint,
            det,
            initial_form: None,
            h,
            cone_contains_h: None,
        });
    }
    if det.is_zero() {
        return Err(ImagesError::RankDeficientMap {
            rank: f.jacobian().generic_rank(),
            n: f.n(),
        });
    }
    let init = initial_form(&det, p)?;
    let contains = tangent_cone_contains(&det, p, &h)?;
    let tag = if contains {
        StabilityTag::ConditionFails
    } else {
        StabilityTag::StableSingularity
    };
    Ok(StabilityVerdict {
        tag,
        det,
        initial_form: Some(init),
        h,
        cone_contains_h: Some(contains),
    })
}

fn check_dims(n: usize, k: usize, m: usize) -> Result<(), ImagesError> {
    if k < 1 || k > n || n > m {
        return Err(ImagesError::InvalidDimensions { n, k, m });
    }
    Ok(())
}

/// `4n − k < 2(m + 1)`: singularities of `F(N)` can be perturbed away.
pub fn perturbability(n: usize, k: usize, m: usize) -> Result<bool, ImagesError> {
    check_dims(n, k, m)?;
    Ok(4 * n - k < 2 * (m + 1))
}
