//! Quadratic invariants of codimension-2 graphs `w = ρ(z, z̄)` in `C^{n+1}`
//! and removability of their CR singularities.

mod realize;
mod removable;

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::algebra::{AlgebraError, CMatrix, GaussRat, Monomial, Poly, VarContext};
use crate::geometry::GeometryError;
use crate::images::ImagesError;

pub use realize::{image_graph, realize, Realization};
pub use removable::{
    ck_example, cr_vector_field, nonanalytic_witness, not_bishop_small_sing, removability_test,
    CkExample, Direction, RayWitness, RemovabilityTag, RemovabilityVerdict, SmallSingVerdict,
    DEFAULT_ORDER,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuadraticError {
    #[error("not in normalized form: {0}")]
    NotNormalized(String),
    #[error("expected {expected} complex variables, got {got}")]
    WrongVariableCount { expected: usize, got: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("manifold is not in the required graph shape: {0}")]
    NotInShape(String),
    #[error("type 3 parameter must be a nonnegative rational")]
    BadParameter,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Images(#[from] ImagesError),
}

/// `Q = z*Az + conj(zᵗBz) + zᵗCz` with `B`, `C` symmetric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticModel {
    pub n: usize,
    pub a: CMatrix,
    pub b: CMatrix,
    pub c: CMatrix,
}

impl QuadraticModel {
    pub fn new(a: CMatrix, b: CMatrix, c: CMatrix) -> Result<Self, QuadraticError> {
        let n = a.rows();
        for m in [&a, &b, &c] {
            if m.rows() != n || m.cols() != n {
                return Err(QuadraticError::Shape(format!("expected {n}×{n} matrices")));
            }
        }
        if !b.is_symmetric() || !c.is_symmetric() {
            return Err(QuadraticError::Shape("B and C must be symmetric".into()));
        }
        Ok(QuadraticModel { n, a, b, c })
    }

    /// The quadratic polynomial in `ctx` (which must have `n` variables).
    pub fn to_poly(&self, ctx: &Arc<VarContext>) -> Poly {
        let n = self.n;
        let mut out = Poly::zero(ctx);
        for j in 0..n {
            for k in 0..n {
                let zb = Poly::var(ctx, j, true);
                out = &out + &(&zb * &Poly::var(ctx, k, false)).scale(self.a.get(j, k));
                out = &out + &(&zb * &Poly::var(ctx, k, true)).scale(&self.b.get(j, k).conj());
                out = &out
                    + &(&Poly::var(ctx, j, false) * &Poly::var(ctx, k, false))
                        .scale(self.c.get(j, k));
            }
        }
        out
    }

    /// `z ↦ Tz`: `A ↦ T*AT`, `B ↦ TᵗBT`, `C ↦ TᵗCT`.
    pub fn transport(&self, t: &CMatrix) -> QuadraticModel {
        let tt = t.transpose();
        QuadraticModel {
            n: self.n,
            a: &(&t.adjoint() * &self.a) * t,
            b: &(&tt * &self.b) * t,
            c: &(&tt * &self.c) * t,
        }
    }

    /// `w ↦ cw`: `A ↦ cA`, `B ↦ c̄B`, `C ↦ cC`.
    pub fn scale_w(&self, c: &GaussRat) -> QuadraticModel {
        QuadraticModel {
            n: self.n,
            a: self.a.scale(c),
            b: self.b.scale(&c.conj()),
            c: self.c.scale(c),
        }
    }
}

fn monomial(n: usize, pairs: &[(usize, u32)]) -> Monomial {
    let mut e = vec![0; 2 * n];
    for &(s, k) in pairs {
        e[s] += k;
    }
    Monomial(e)
}

/// Reads `A`, `B`, `C` off the bidegree (1,1), (0,2) and (2,0) parts of `ρ`
/// and returns the remainder `E = ρ − Q` alongside.
pub fn extract_quadratic(rho: &Poly, n: usize) -> Result<(QuadraticModel, Poly), QuadraticError> {
    let ctx = rho.ctx();
    if ctx.len() != n {
        return Err(QuadraticError::WrongVariableCount {
            expected: n,
            got: ctx.len(),
        });
    }
    if (0..n).any(|v| ctx.is_real(v)) {
        return Err(QuadraticError::NotNormalized(
            "variables must be complex".into(),
        ));
    }
    if !rho.constant_term().is_zero() {
        return Err(QuadraticError::NotNormalized(
            "nonzero constant term".into(),
        ));
    }
    if !rho.homogeneous_part(1).is_zero() {
        return Err(QuadraticError::NotNormalized(format!(
            "nonzero linear part {}",
            rho.homogeneous_part(1)
        )));
    }
    let half = GaussRat::from_rat(1, 2);
    let a = CMatrix::from_fn(n, n, |j, k| rho.coeff(&monomial(n, &[(n + j, 1), (k, 1)])));
    let b = CMatrix::from_fn(n, n, |j, k| {
        let c = rho.coeff(&monomial(n, &[(n + j, 1), (n + k, 1)])).conj();
        if j == k {
            c
        } else {
            &c * &half
        }
    });
    let c = CMatrix::from_fn(n, n, |j, k| {
        let c = rho.coeff(&monomial(n, &[(j, 1), (k, 1)]));
        if j == k {
            c
        } else {
            &c * &half
        }
    });
    let model = QuadraticModel { n, a, b, c };
    let rest = rho - &model.to_poly(ctx);
    Ok((model, rest))
}

fn check_square(a: &CMatrix, b: &CMatrix) -> Result<usize, QuadraticError> {
    let n = a.rows();
    if a.cols() != n || b.rows() != n || b.cols() != n {
        return Err(QuadraticError::Shape(format!(
            "A is {}×{}, B is {}×{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(n)
}

fn stacked_rank(a: &CMatrix, b: &CMatrix) -> usize {
    a.adjoint().vstack(b).rank()
}

/// Necessary condition for a CR image: `rank [A*; B] ≤ 1`.
pub fn cr_image_obstruction(a: &CMatrix, b: &CMatrix) -> Result<bool, QuadraticError> {
    check_square(a, b)?;
    Ok(stacked_rank(a, b) <= 1)
}

/// Normal form of the quadratic part of a codimension-2 CR image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuadClass {
    Type1,
    Type2,
    /// `|z_1|² + a z̄_1²`, stored as the exact rational `a²`.
    Type3 {
        a_squared: BigRational,
    },
    Type4,
    Type5,
    NotCRImageCandidate,
}

impl QuadClass {
    pub fn label(&self) -> &'static str {
        match self {
            QuadClass::Type1 => "Type1",
            QuadClass::Type2 => "Type2",
            QuadClass::Type3 { .. } => "Type3",
            QuadClass::Type4 => "Type4",
            QuadClass::Type5 => "Type5",
            QuadClass::NotCRImageCandidate => "NotCRImageCandidate",
        }
    }

    /// `a` of a type 3 form, when `a²` is the square of a rational.
    pub fn exact_a(&self) -> Option<BigRational> {
        match self {
            QuadClass::Type3 { a_squared } => rational_sqrt(a_squared),
            _ => None,
        }
    }

    pub fn a_f64(&self) -> Option<f64> {
        match self {
            QuadClass::Type3 { a_squared } => a_squared.to_f64().map(f64::sqrt),
            _ => None,
        }
    }

    pub fn type3(a: BigRational) -> Self {
        QuadClass::Type3 { a_squared: &a * &a }
    }
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let (n, d) = (q.numer().sqrt(), q.denom().sqrt());
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| BigRational::new(n, d))
}

impl fmt::Display for QuadClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuadClass::Type3 { .. } => match self.exact_a() {
                Some(a) => write!(f, "Type3(a={a})"),
                None => write!(f, "Type3(a={:.12})", self.a_f64().unwrap_or(f64::NAN)),
            },
            other => f.write_str(other.label()),
        }
    }
}

/// Which of the five normal forms the quadratic part `(A, B)` takes.
///
/// With `rank [A*; B] = 1` write `A = u a*` and `B = β ū ūᵗ`. `A = 0` gives
/// type 4. If `a` is not parallel to `u` (`rank [A | A*] = 2`) a linear
/// change of coordinates reaches `z̄_1 z_2 + β̄ z̄_1²`: type 1 when `B ≠ 0`,
/// type 2 otherwise. Otherwise `A = λ u u*` and the form is type 3 with
/// `a = |β/λ| = ‖B‖/‖A‖`.
pub fn classify(a: &CMatrix, b: &CMatrix) -> Result<QuadClass, QuadraticError> {
    check_square(a, b)?;
    let r = stacked_rank(a, b);
    if r >= 2 {
        return Ok(QuadClass::NotCRImageCandidate);
    }
    if r == 0 {
        return Ok(QuadClass::Type5);
    }
    if a.is_zero() {
        return Ok(QuadClass::Type4);
    }
    if a.hstack(&a.adjoint()).rank() == 2 {
        return Ok(if b.is_zero() {
            QuadClass::Type2
        } else {
            QuadClass::Type1
        });
    }
    Ok(QuadClass::Type3 {
        a_squared: b.frobenius_sqr() / a.frobenius_sqr(),
    })
}

/// Whether `(A, B)` is the quadratic part of a parabolic Bishop surface up to
/// linear changes of `z` and scaling of `w`: some `c ≠ 0` and `w ∈ C^n` with
/// `cA = w w*` and `cB = ½ w̄ w̄ᵗ`.
///
/// Normalizing at a nonzero diagonal entry `A_jj`, the candidate is
/// `v = A e_j / A_jj`; then `A / A_jj = v v*` and `2B / A_jj = μ v̄ v̄ᵗ` with
/// `|μ| = 1` must hold exactly.
pub fn corresponds_parabolic(a: &CMatrix, b: &CMatrix) -> bool {
    let n = a.rows();
    if a.cols() != n || b.rows() != n || b.cols() != n {
        return false;
    }
    let Some(j) = (0..n).find(|&j| !a.get(j, j).is_zero()) else {
        return false;
    };
    let ajj_inv = a.get(j, j).inv().expect("nonzero pivot");
    let v: Vec<GaussRat> = (0..n).map(|k| a.get(k, j) * &ajj_inv).collect();
    let vv = CMatrix::from_fn(n, n, |k, l| &v[k] * &v[l].conj());
    if a.scale(&ajj_inv) != vv {
        return false;
    }
    let two = GaussRat::from(2);
    let mu = &(b.get(j, j) * &two) * &ajj_inv;
    if mu.norm_sqr() != num_traits::One::one() {
        return false;
    }
    let target = CMatrix::from_fn(n, n, |k, l| &mu * &(&v[k].conj() * &v[l].conj()));
    b.scale(&(&two * &ajj_inv)) == target
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use crate::parser::parse_expression;

    fn ctx2() -> Arc<VarContext> {
        VarContext::complex(&["z1", "z2"])
    }

    fn model(src: &str) -> QuadraticModel {
        let ctx = ctx2();
        extract_quadratic(&parse_expression(src, &ctx).unwrap(), 2)
            .unwrap()
            .0
    }

    fn e(n: usize, j: usize, k: usize, v: GaussRat) -> CMatrix {
        let mut m = CMatrix::zeros(n, n);
        m.set(j, k, v);
        m
    }

    #[test]
    fn five_models() {
        let cases = [
            ("conj(z1)*z2 + conj(z1)^2", "Type1"),
            ("conj(z1)*z2", "Type2"),
            ("z1*conj(z1) + 1/2*conj(z1)^2", "Type3(a=1/2)"),
            ("conj(z1)^2", "Type4"),
            ("0", "Type5"),
        ];
        for (src, want) in cases {
            let m = model(src);
            assert_eq!(classify(&m.a, &m.b).unwrap().to_string(), want, "{src}");
        }
    }

    #[test]
    fn form_one_matrices() {
        let m = model("conj(z1)*z2 + conj(z1)^2");
        assert_eq!(m.a, e(2, 0, 1, <GaussRat as num_traits::One>::one()));
        assert_eq!(m.b, e(2, 0, 0, <GaussRat as num_traits::One>::one()));
        assert!(m.c.is_zero());
        assert!(cr_image_obstruction(&m.a, &m.b).unwrap());
    }

    #[test]
    fn identity_hermitian_part_is_not_an_image() {
        let a = CMatrix::identity(2);
        assert!(!cr_image_obstruction(&a, &CMatrix::zeros(2, 2)).unwrap());
        assert_eq!(
            classify(&a, &CMatrix::zeros(2, 2)).unwrap(),
            QuadClass::NotCRImageCandidate
        );
    }

    #[test]
    fn parabolic_model() {
        let m = model("1/2*(z1 + conj(z1))^2");
        assert_eq!(m.a, e(2, 0, 0, <GaussRat as num_traits::One>::one()));
        assert_eq!(m.b, e(2, 0, 0, GaussRat::from_rat(1, 2)));
        assert_eq!(m.c, e(2, 0, 0, GaussRat::from_rat(1, 2)));
        assert!(corresponds_parabolic(&m.a, &m.b));
        assert_eq!(classify(&m.a, &m.b).unwrap(), QuadClass::type3(rat(1, 2)));
        assert!(!corresponds_parabolic(
            &CMatrix::zeros(2, 2),
            &CMatrix::zeros(2, 2)
        ));
    }

    #[test]
    fn linear_part_rejected() {
        let ctx = ctx2();
        let rho = parse_expression("z1 + conj(z2)^2", &ctx).unwrap();
        assert!(matches!(
            extract_quadratic(&rho, 2),
            Err(QuadraticError::NotNormalized(_))
        ));
    }

    #[test]
    fn irrational_a_prints_decimal() {
        let q = QuadClass::Type3 {
            a_squared: rat(2, 1),
        };
        assert_eq!(q.to_string(), "Type3(a=1.414213562373)");
    }
}
