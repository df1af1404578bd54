//! Analytic discs attached to `N = {Im w = r(z, z̄, Re w)} ⊂ C × C^k`,
//! computed in double precision from the Bishop equation, and zero counts of
//! holomorphic functions along them.
//!
//! Everything here is a numerical witness, never a certificate.

mod persistence;

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::Zero;
use rustfft::FftPlanner;
use thiserror::Error;

use crate::algebra::{CompiledPoly, GaussRat, Poly, VarContext};
use crate::geometry::{GenericSubmanifold, GeometryError};

pub use persistence::{
    persistence_experiment, Branch, PersistenceOutcome, PersistenceReport, ScanRow, TRange,
};

pub const DEFAULT_GRID: usize = 512;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 500;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiscError {
    #[error("invalid disc problem: {0}")]
    InvalidProblem(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("Picard iteration did not converge in {} steps (last step {:e})", .residuals.len(), .residuals.last().copied().unwrap_or(f64::NAN))]
    Diverged { residuals: Vec<f64> },
    #[error("need at least 4 distinct t in (0, 1/2], got {got}")]
    InsufficientSamples { got: usize },
    #[error("function vanishes on the disc boundary at node {node} (t = {t})")]
    BoundaryZero { node: usize, t: f64 },
    #[error("argument increments do not resolve to an integer (total/2π = {0})")]
    Unresolved(f64),
    #[error("hypothesis fails: {0}")]
    HypothesisFails(String),
    #[error("experiment inconclusive: {0}")]
    Inconclusive(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// `N = {Im w_j = r_j(z, z̄, Re w)}` in coordinates `(z, w_1, …, w_k)` together
/// with a holomorphic `φ` vanishing at the origin.
#[derive(Clone, Debug)]
pub struct DiscProblem {
    ctx: Arc<VarContext>,
    r: Vec<Poly>,
    phi: Poly,
    pub grid_size: usize,
    pub tol: f64,
    pub max_iter: usize,
}

impl DiscProblem {
    pub fn new(ctx: &Arc<VarContext>, r: Vec<Poly>, phi: Poly) -> Result<Self, DiscError> {
        let k = r.len();
        if k == 0 || ctx.len() != k + 1 {
            return Err(DiscError::InvalidProblem(format!(
                "{} variables for {k} graph functions; expected one z and {k} w's",
                ctx.len()
            )));
        }
        if (0..ctx.len()).any(|v| ctx.is_real(v)) {
            return Err(DiscError::InvalidProblem(
                "all variables must be complex".into(),
            ));
        }
        let mut to_re: Vec<Poly> = (0..2 * ctx.len())
            .map(|s| {
                if s < ctx.len() {
                    Poly::var(ctx, s, false)
                } else {
                    Poly::var(ctx, s - ctx.len(), true)
                }
            })
            .collect();
        for w in 1..=k {
            let re = Poly::var(ctx, w, false).real_part();
            to_re[w] = re.clone();
            to_re[w + ctx.len()] = re;
        }
        for (j, rj) in r.iter().enumerate() {
            if rj.ctx() != ctx {
                return Err(DiscError::InvalidProblem(format!(
                    "r{} lives in another context",
                    j + 1
                )));
            }
            if !rj.is_real_valued() {
                return Err(DiscError::InvalidProblem(format!(
                    "r{} is not real-valued",
                    j + 1
                )));
            }
            if rj.order().is_some_and(|d| d < 2) {
                return Err(DiscError::InvalidProblem(format!(
                    "r{} has a constant or linear part",
                    j + 1
                )));
            }
            if rj.substitute(ctx, &to_re, None) != *rj {
                return Err(DiscError::InvalidProblem(format!(
                    "r{} depends on Im w",
                    j + 1
                )));
            }
        }
        if phi.ctx() != ctx || phi.has_conj() {
            return Err(DiscError::InvalidProblem(
                "φ must be a holomorphic polynomial in the problem variables".into(),
            ));
        }
        Ok(DiscProblem {
            ctx: ctx.clone(),
            r,
            phi,
            grid_size: DEFAULT_GRID,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        })
    }

    pub fn with_grid(mut self, n: usize) -> Self {
        self.grid_size = n;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, it: usize) -> Self {
        self.max_iter = it;
        self
    }

    pub fn ctx(&self) -> &Arc<VarContext> {
        &self.ctx
    }

    pub fn r(&self) -> &[Poly] {
        &self.r
    }

    pub fn phi(&self) -> &Poly {
        &self.phi
    }

    pub fn k(&self) -> usize {
        self.r.len()
    }

    /// `N` as a generic submanifold through the origin.
    pub fn manifold(&self) -> Result<GenericSubmanifold, DiscError> {
        let eqs = self
            .r
            .iter()
            .enumerate()
            .map(|(j, rj)| &Poly::var(&self.ctx, j + 1, false).imag_part() - rj)
            .collect();
        Ok(GenericSubmanifold::new(
            &self.ctx,
            eqs,
            vec![GaussRat::zero(); self.ctx.len()],
        )?)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscDiagnostics {
    pub iterations: usize,
    /// Sup-distance between the last two iterates.
    pub residual: f64,
    /// `sqrt(Σ_{n<0} |ĝ_n|²)` over all components, Nyquist mode excluded.
    pub negative_energy: f64,
    /// `sup |Im g − r(tu, tū, Re g)|` over nodes and components.
    pub attachment: f64,
    /// `max |Re g(1)|`.
    pub normalization: f64,
    pub damped: bool,
}

/// Boundary values of `Δ_t(ξ) = (tξ, g_t(ξ))` at `ξ_j = e^{2πij/N}`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscSolution {
    pub t: f64,
    /// `g[l][j]`: component `l` at node `j`.
    pub g: Vec<Vec<Complex64>>,
    /// `coeffs[l][n]`: Fourier coefficient of `g_l` at frequency `n` (FFT
    /// order, normalized by `N`).
    pub coeffs: Vec<Vec<Complex64>>,
    pub diagnostics: DiscDiagnostics,
}

impl DiscSolution {
    pub fn grid_size(&self) -> usize {
        self.g.first().map_or(0, Vec::len)
    }

    pub fn node(&self, j: usize) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI * j as f64 / self.grid_size() as f64)
    }

    /// `Δ_t` at `ξ_j`.
    pub fn point(&self, j: usize) -> Vec<Complex64> {
        let mut p = vec![self.node(j) * self.t];
        p.extend(self.g.iter().map(|c| c[j]));
        p
    }

    /// `Δ_t(e^{iθ})` by trigonometric interpolation of the samples.
    pub fn point_at(&self, theta: f64) -> Vec<Complex64> {
        let n = self.grid_size();
        let mut p = vec![Complex64::from_polar(self.t, theta)];
        for c in &self.coeffs {
            let mut acc = Complex64::zero();
            for (idx, a) in c.iter().enumerate() {
                let f = if idx <= n / 2 {
                    idx as f64
                } else {
                    idx as f64 - n as f64
                };
                acc += a * Complex64::from_polar(1.0, f * theta);
            }
            p.push(acc);
        }
        p
    }

    /// Holomorphic extension `Δ_t(ξ)` for `|ξ| ≤ 1` from the nonnegative
    /// Fourier modes, with `Δ_t'(ξ)`.
    pub fn extend(&self, xi: Complex64) -> (Vec<Complex64>, Vec<Complex64>) {
        let n = self.grid_size();
        let mut p = vec![xi * self.t];
        let mut d = vec![Complex64::new(self.t, 0.0)];
        for c in &self.coeffs {
            let (mut v, mut dv) = (Complex64::zero(), Complex64::zero());
            for a in c[..n / 2].iter().rev() {
                dv = dv * xi + v;
                v = v * xi + a;
            }
            p.push(v);
            d.push(dv);
        }
        (p, d)
    }

    /// `sup_ξ |g_t(ξ)|` over nodes, components combined in the Euclidean norm.
    pub fn sup_norm(&self) -> f64 {
        (0..self.grid_size())
            .map(|j| self.g.iter().map(|c| c[j].norm_sqr()).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }
}

/// Solutions for several `t` sharing one problem.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscFamily {
    pub solutions: Vec<DiscSolution>,
}

/// Harmonic conjugation on a uniform grid: `v̂_n ↦ −i sgn(n) v̂_n`, with the
/// Nyquist mode dropped, then shifted so the result vanishes at node 0.
struct Conjugator {
    n: usize,
    fwd: Arc<dyn rustfft::Fft<f64>>,
    inv: Arc<dyn rustfft::Fft<f64>>,
}

impl Conjugator {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Conjugator {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    fn spectrum(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut buf = v.to_vec();
        self.fwd.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        buf
    }

    fn t1(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut buf: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.fwd.process(&mut buf);
        for (idx, c) in buf.iter_mut().enumerate() {
            *c = if idx == 0 || idx == n / 2 {
                Complex64::zero()
            } else if idx < n / 2 {
                *c * Complex64::new(0.0, -1.0)
            } else {
                *c * Complex64::new(0.0, 1.0)
            };
        }
        self.inv.process(&mut buf);
        let base = buf[0].re / n as f64;
        buf.iter().map(|c| c.re / n as f64 - base).collect()
    }
}

fn check_grid(n: usize) -> Result<(), DiscError> {
    if n < 64 || !n.is_power_of_two() {
        return Err(DiscError::BadParameter(format!(
            "grid size {n} must be a power of two ≥ 64"
        )));
    }
    Ok(())
}

fn eval_r(compiled: &[CompiledPoly], z: Complex64, u: &[f64]) -> Vec<f64> {
    let mut pt = vec![z];
    pt.extend(u.iter().map(|&x| Complex64::new(x, 0.0)));
    compiled.iter().map(|c| c.eval(&pt).re).collect()
}

/// Solves `U = −T₁[r(tu, tū, U)]` by Picard iteration, switching to damping
/// `½` once the step size grows, and returns `g = U + i r(tu, tū, U)`.
pub fn solve_bishop(prob: &DiscProblem, t: f64) -> Result<DiscSolution, DiscError> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(DiscError::BadParameter(format!(
            "t = {t} must lie in (0, 1]"
        )));
    }
    let n = prob.grid_size;
    check_grid(n)?;
    let k = prob.k();
    let compiled: Vec<CompiledPoly> = prob.r.iter().map(CompiledPoly::new).collect();
    let conj = Conjugator::new(n);
    let zs: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(t, 2.0 * PI * j as f64 / n as f64))
        .collect();

    let eval_all = |u: &[Vec<f64>]| -> Vec<Vec<f64>> {
        let mut v = vec![vec![0.0; n]; k];
        for (j, &z) in zs.iter().enumerate() {
            let uj: Vec<f64> = u.iter().map(|c| c[j]).collect();
            for (l, x) in eval_r(&compiled, z, &uj).into_iter().enumerate() {
                v[l][j] = x;
            }
        }
        v
    };

    let mut u = vec![vec![0.0; n]; k];
    let mut history = Vec::new();
    let mut lambda = 1.0;
    let mut converged = false;
    for _ in 0..prob.max_iter {
        let v = eval_all(&u);
        let mut step: f64 = 0.0;
        for l in 0..k {
            let target = conj.t1(&v[l]);
            for j in 0..n {
                let next = u[l][j] + lambda * (-target[j] - u[l][j]);
                step = step.max((next - u[l][j]).abs());
                u[l][j] = next;
            }
        }
        if !step.is_finite() {
            history.push(step);
            break;
        }
        if history.last().is_some_and(|&prev| step > prev) {
            lambda = 0.5;
        }
        history.push(step);
        if step < prob.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(DiscError::Diverged { residuals: history });
    }

    let v = eval_all(&u);
    let g: Vec<Vec<Complex64>> = (0..k)
        .map(|l| (0..n).map(|j| Complex64::new(u[l][j], v[l][j])).collect())
        .collect();
    let coeffs: Vec<Vec<Complex64>> = g.iter().map(|c| conj.spectrum(c)).collect();
    let negative_energy = coeffs
        .iter()
        .map(|c| c[n / 2 + 1..].iter().map(|a| a.norm_sqr()).sum::<f64>())
        .sum::<f64>()
        .sqrt();
    let mut attachment: f64 = 0.0;
    for (j, &z) in zs.iter().enumerate() {
        let re: Vec<f64> = g.iter().map(|c| c[j].re).collect();
        for (l, x) in eval_r(&compiled, z, &re).into_iter().enumerate() {
            attachment = attachment.max((g[l][j].im - x).abs());
        }
    }
    let normalization = g.iter().map(|c| c[0].re.abs()).fold(0.0, f64::max);
    Ok(DiscSolution {
        t,
        g,
        coeffs,
        diagnostics: DiscDiagnostics {
            iterations: history.len(),
            residual: history.last().copied().unwrap_or(0.0),
            negative_energy,
            attachment,
            normalization,
            damped: lambda < 1.0,
        },
    })
}

pub fn solve_family(prob: &DiscProblem, ts: &[f64]) -> Result<DiscFamily, DiscError> {
    Ok(DiscFamily {
        solutions: ts
            .iter()
            .map(|&t| solve_bishop(prob, t))
            .collect::<Result<_, _>>()?,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SecondOrderReport {
    /// `(t, sup|g_t| / t²)`, in the family's order.
    pub ratios: Vec<(f64, f64)>,
    pub median: f64,
    /// `max |ratio − median| / median`, or the largest ratio when the median
    /// is zero.
    pub max_deviation: f64,
    pub passes: bool,
}

/// Checks that `sup|g_t|/t²` stays within 25% of its median over `t ≤ 1/2`.
pub fn verify_second_order(family: &DiscFamily) -> Result<SecondOrderReport, DiscError> {
    let mut ts: Vec<f64> = family
        .solutions
        .iter()
        .map(|s| s.t)
        .filter(|&t| t > 0.0 && t <= 0.5)
        .collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    if ts.len() < 4 {
        return Err(DiscError::InsufficientSamples { got: ts.len() });
    }
    let ratios: Vec<(f64, f64)> = family
        .solutions
        .iter()
        .filter(|s| s.t > 0.0 && s.t <= 0.5)
        .map(|s| (s.t, s.sup_norm() / (s.t * s.t)))
        .collect();
    let mut sorted: Vec<f64> = ratios.iter().map(|r| r.1).collect();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let median = if sorted.len().is_multiple_of(2) {
        0.5 * (sorted[mid - 1] + sorted[mid])
    } else {
        sorted[mid]
    };
    let (max_deviation, passes) = if median == 0.0 {
        let m = sorted.last().copied().unwrap_or(0.0);
        (m, m == 0.0)
    } else {
        let d = ratios
            .iter()
            .map(|r| (r.1 - median).abs() / median)
            .fold(0.0, f64::max);
        (d, d < 0.25)
    };
    Ok(SecondOrderReport {
        ratios,
        median,
        max_deviation,
        passes: passes && sorted.iter().all(|r| r.is_finite()),
    })
}

/// Winding number of `ξ ↦ φ(Δ_t(ξ))` around `0`, from summed principal
/// argument increments between consecutive nodes.
pub fn winding_count(phi: &Poly, disc: &DiscSolution, tol: f64) -> Result<i64, DiscError> {
    let n = disc.grid_size();
    if phi.ctx().len() != disc.g.len() + 1 {
        return Err(DiscError::InvalidProblem(
            "φ has the wrong number of variables".into(),
        ));
    }
    let c = CompiledPoly::new(phi);
    let vals: Vec<Complex64> = (0..n).map(|j| c.eval(&disc.point(j))).collect();
    if let Some(node) = vals.iter().position(|v| v.norm() <= tol) {
        return Err(DiscError::BoundaryZero { node, t: disc.t });
    }
    let total: f64 = (0..n).map(|j| (vals[(j + 1) % n] / vals[j]).arg()).sum();
    let turns = total / (2.0 * PI);
    let w = turns.round();
    if (turns - w).abs() > 1e-6 {
        return Err(DiscError::Unresolved(turns));
    }
    Ok(w as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_expression;

    fn problem(r: &str, phi: &str) -> DiscProblem {
        let ctx = VarContext::complex(&["z", "w"]);
        DiscProblem::new(
            &ctx,
            vec![parse_expression(r, &ctx).unwrap()],
            parse_expression(phi, &ctx).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn sphere_like_closed_form() {
        let p = problem("z*conj(z)", "z - w");
        for t in [0.1, 0.2, 0.3, 0.4] {
            let s = solve_bishop(&p, t).unwrap();
            let err = s.g[0]
                .iter()
                .map(|g| (g - Complex64::new(0.0, t * t)).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-10, "t = {t}: {err}");
            assert_eq!(winding_count(p.phi(), &s, p.tol).unwrap(), 1);
        }
    }

    #[test]
    fn flat_gives_zero() {
        let p = problem("0", "z");
        let s = solve_bishop(&p, 0.3).unwrap();
        assert!(s.sup_norm() == 0.0);
    }

    #[test]
    fn nonlinear_in_re_w_is_holomorphic_and_attached() {
        let p = problem(
            "z*conj(z) + 1/4*(w + conj(w))^2 + z^2*conj(z) + z*conj(z)^2",
            "z",
        );
        let s = solve_bishop(&p, 0.4).unwrap();
        assert!(s.diagnostics.negative_energy < 1e-10, "{:?}", s.diagnostics);
        assert!(s.diagnostics.attachment < 1e-10);
        assert!(s.diagnostics.normalization < 1e-12);
        let q = s.point_at(2.0 * PI * 5.0 / 512.0);
        assert!((q[1] - s.g[0][5]).norm() < 1e-9);
    }

    #[test]
    fn rejects_bad_inputs() {
        let ctx = VarContext::complex(&["z", "w"]);
        let e = |s: &str| parse_expression(s, &ctx).unwrap();
        assert!(DiscProblem::new(&ctx, vec![e("z + conj(z)")], e("z")).is_err());
        assert!(DiscProblem::new(&ctx, vec![e("w*conj(w)")], e("z")).is_err());
        assert!(DiscProblem::new(&ctx, vec![e("z*conj(z)")], e("conj(z)")).is_err());
        let p = problem("z*conj(z)", "z");
        assert!(solve_bishop(&p.clone().with_grid(100), 0.1).is_err());
        assert!(solve_bishop(&p, 0.0).is_err());
    }

    #[test]
    fn divergence_reports_history() {
        let p = problem("(z + conj(z))^2 + 4*(w + conj(w))^2", "z")
            .with_max_iter(3)
            .with_tol(1e-300);
        match solve_bishop(&p, 1.0) {
            Err(DiscError::Diverged { residuals }) => assert_eq!(residuals.len(), 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn winding_models() {
        let p = problem("z*conj(z)", "1");
        let s = solve_bishop(&p, 0.25).unwrap();
        assert_eq!(winding_count(p.phi(), &s, p.tol).unwrap(), 0);
        for l in 1..=5 {
            let phi = parse_expression(&format!("z^{l}"), p.ctx()).unwrap();
            assert_eq!(winding_count(&phi, &s, p.tol).unwrap(), l);
        }
        let zero = parse_expression("z - 1/4", p.ctx()).unwrap();
        assert!(matches!(
            winding_count(&zero, &s, p.tol),
            Err(DiscError::BoundaryZero { node: 0, .. })
        ));
    }

    #[test]
    fn second_order_report() {
        let p = problem("z*conj(z)", "z");
        let fam = solve_family(&p, &[0.05, 0.1, 0.15, 0.2]).unwrap();
        let rep = verify_second_order(&fam).unwrap();
        assert!(rep.passes);
        assert!(rep.ratios.iter().all(|r| (r.1 - 1.0).abs() < 1e-9));
        let fam = solve_family(&p, &[0.1, 0.2, 0.3]).unwrap();
        assert!(matches!(
            verify_second_order(&fam),
            Err(DiscError::InsufficientSamples { got: 3 })
        ));
    }
}
