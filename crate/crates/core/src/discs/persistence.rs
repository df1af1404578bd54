use std::fmt::Write as _;

use num_complex::Complex64;
use num_traits::Zero;

use super::{solve_bishop, winding_count, DiscError, DiscProblem, DiscSolution};
use crate::algebra::{CompiledPoly, GaussRat, Poly};
use crate::geometry::{complex_tangent, tangent_cone_contains};

const BISECTIONS: usize = 60;

/// Geometric grid of `steps` values from `t_max` down to `t_min`.
#[derive(Clone, Debug, PartialEq)]
pub struct TRange {
    pub t_max: f64,
    pub t_min: f64,
    pub steps: usize,
}

impl Default for TRange {
    fn default() -> Self {
        TRange {
            t_max: 0.5,
            t_min: 1e-4,
            steps: 32,
        }
    }
}

impl TRange {
    pub fn values(&self) -> Result<Vec<f64>, DiscError> {
        if !(self.t_min > 0.0 && self.t_min < self.t_max && self.t_max <= 1.0) || self.steps < 2 {
            return Err(DiscError::BadParameter(format!(
                "t range [{}, {}] with {} steps",
                self.t_min, self.t_max, self.steps
            )));
        }
        let q = (self.t_min / self.t_max).powf(1.0 / (self.steps - 1) as f64);
        let mut v: Vec<f64> = (0..self.steps)
            .map(|i| self.t_max * q.powi(i as i32))
            .collect();
        *v.last_mut().expect("steps ≥ 2") = self.t_min;
        Ok(v)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Branch {
    /// `ψ∘Δ_t` keeps a zero in the disc down to the smallest `t`.
    ZeroTrapped { t_min: f64, winding: i64 },
    /// The zero left through `∂D`: `ψ` vanishes (numerically) at the
    /// boundary point `Δ_t(e^{iθ}) ∈ N`.
    ZeroOnN {
        t: f64,
        theta: f64,
        point: Vec<Complex64>,
        modulus: f64,
    },
}

impl Branch {
    pub fn label(&self) -> &'static str {
        match self {
            Branch::ZeroTrapped { .. } => "zero_trapped",
            Branch::ZeroOnN { .. } => "zero_on_n",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub psi: usize,
    pub t: f64,
    pub residual: f64,
    /// `None` when `ψ` vanishes at a boundary node.
    pub winding: Option<i64>,
    pub branch: &'static str,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PersistenceOutcome {
    pub psi: Poly,
    /// Largest scanned `t` at which `ψ∘Δ_t` winds at least once.
    pub t0: f64,
    pub branch: Branch,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PersistenceReport {
    pub outcomes: Vec<PersistenceOutcome>,
    pub rows: Vec<ScanRow>,
}

impl PersistenceReport {
    /// `psi,t,residual,winding,branch`; `winding` is empty at a boundary zero.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("psi,t,residual,winding,branch\n");
        for r in &self.rows {
            let w = r.winding.map(|w| w.to_string()).unwrap_or_default();
            let _ = writeln!(s, "{},{:e},{:e},{},{}", r.psi, r.t, r.residual, w, r.branch);
        }
        s
    }
}

enum Probe {
    Winds(i64),
    BoundaryZero(usize),
}

fn probe(psi: &Poly, disc: &DiscSolution, tol: f64) -> Result<Probe, DiscError> {
    match winding_count(psi, disc, tol) {
        Ok(w) => Ok(Probe::Winds(w)),
        Err(DiscError::BoundaryZero { node, .. }) => Ok(Probe::BoundaryZero(node)),
        Err(e) => Err(e),
    }
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..100 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

fn boundary_zero(psi: &Poly, disc: &DiscSolution, near: Option<usize>) -> Branch {
    let c = CompiledPoly::new(psi);
    let n = disc.grid_size();
    let j = near.unwrap_or_else(|| {
        (0..n)
            .map(|j| (j, c.eval(&disc.point(j)).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map_or(0, |(j, _)| j)
    });
    let h = 2.0 * std::f64::consts::PI / n as f64;
    let theta0 = j as f64 * h;
    let theta = golden_min(
        |th| c.eval(&disc.point_at(th)).norm(),
        theta0 - h,
        theta0 + h,
    );
    let point = disc.point_at(theta);
    let modulus = c.eval(&point).norm();
    Branch::ZeroOnN {
        t: disc.t,
        theta,
        point,
        modulus,
    }
}

/// Runs the zero-persistence experiment for `ψ = φ + p` over each
/// perturbation `p`.
///
/// The hypothesis `H_0N ⊄ C_0{φ = 0}` is checked exactly first. For each
/// `ψ` the scan finds the first `t₀` (from the top) with winding `≥ 1`,
/// then walks down; if the winding drops to `0`, the crossing `t` is
/// bisected and the boundary point where `ψ` vanishes is reported.
pub fn persistence_experiment(
    prob: &DiscProblem,
    perturbations: &[Poly],
    range: &TRange,
) -> Result<PersistenceReport, DiscError> {
    let ctx = prob.ctx();
    let origin = vec![GaussRat::zero(); ctx.len()];
    if !prob.phi().eval(&origin).is_zero() {
        return Err(DiscError::HypothesisFails("φ(0) ≠ 0".into()));
    }
    let h = complex_tangent(&prob.manifold()?, &origin)?;
    if tangent_cone_contains(prob.phi(), &origin, &h)? {
        return Err(DiscError::HypothesisFails(
            "H_0N lies in the tangent cone of {φ = 0}".into(),
        ));
    }
    let ts = range.values()?;
    let discs: Vec<Result<DiscSolution, DiscError>> =
        ts.iter().map(|&t| solve_bishop(prob, t)).collect();

    let mut outcomes = Vec::new();
    let mut rows = Vec::new();
    for (idx, p) in perturbations.iter().enumerate() {
        if p.ctx() != ctx || p.has_conj() {
            return Err(DiscError::InvalidProblem(format!(
                "perturbation {idx} is not holomorphic in the problem variables"
            )));
        }
        let psi = prob.phi() + p;
        let mut local = Vec::new();
        let mut t0 = None;
        let mut last_winding: Option<(f64, i64)> = None;
        let mut branch = None;
        for (i, d) in discs.iter().enumerate() {
            let Ok(disc) = d else {
                local.push(ScanRow {
                    psi: idx,
                    t: ts[i],
                    residual: f64::NAN,
                    winding: None,
                    branch: "",
                });
                continue;
            };
            let pr = probe(&psi, disc, prob.tol)?;
            let winding = match pr {
                Probe::Winds(w) => Some(w),
                Probe::BoundaryZero(_) => None,
            };
            local.push(ScanRow {
                psi: idx,
                t: disc.t,
                residual: disc.diagnostics.residual,
                winding,
                branch: "",
            });
            if t0.is_none() {
                if winding.is_some_and(|w| w >= 1) {
                    t0 = Some(disc.t);
                    last_winding = Some((disc.t, winding.unwrap_or(0)));
                }
                continue;
            }
            match pr {
                Probe::Winds(w) if w >= 1 => last_winding = Some((disc.t, w)),
                Probe::BoundaryZero(node) => {
                    branch = Some(boundary_zero(&psi, disc, Some(node)));
                    break;
                }
                Probe::Winds(_) => {
                    let hi = last_winding.map_or(disc.t, |x| x.0);
                    branch = Some(bisect_crossing(prob, &psi, hi, disc.t, idx, &mut local)?);
                    break;
                }
            }
        }
        let Some(t0) = t0 else {
            return Err(DiscError::Inconclusive(format!(
                "ψ{idx}: no t with winding ≥ 1"
            )));
        };
        let branch = branch.unwrap_or(Branch::ZeroTrapped {
            t_min: last_winding.map_or(t0, |x| x.0),
            winding: last_winding.map_or(0, |x| x.1),
        });
        for r in &mut local {
            r.branch = branch.label();
        }
        rows.extend(local);
        outcomes.push(PersistenceOutcome { psi, t0, branch });
    }
    Ok(PersistenceReport { outcomes, rows })
}

/// `ψ∘Δ_t` and its derivative, through the holomorphic extension.
struct Composite {
    f: CompiledPoly,
    grads: Vec<CompiledPoly>,
}

impl Composite {
    fn new(psi: &Poly) -> Self {
        let n = psi.ctx().len();
        Composite {
            f: CompiledPoly::new(psi),
            grads: (0..n)
                .map(|v| CompiledPoly::new(&psi.wirtinger(v, false)))
                .collect(),
        }
    }

    /// Newton iteration for a zero of `ψ∘Δ_t` starting at `xi`.
    fn root(&self, disc: &DiscSolution, mut xi: Complex64) -> Option<Complex64> {
        for _ in 0..60 {
            let (p, d) = disc.extend(xi);
            let val = self.f.eval(&p);
            let der: Complex64 = self
                .grads
                .iter()
                .zip(&d)
                .map(|(g, dv)| g.eval(&p) * dv)
                .sum();
            if der.norm() == 0.0 {
                return None;
            }
            let step = val / der;
            xi -= step;
            if !xi.is_finite() || xi.norm() > 4.0 {
                return None;
            }
            if step.norm() <= 1e-15 * xi.norm().max(1.0) {
                return Some(xi);
            }
        }
        None
    }
}

/// Locates the `t` in `(lo, hi)` where the zero of `ψ∘Δ_t` reaches `∂D` by
/// bisection on `|ξ*(t)| − 1`, tracking the zero `ξ*` by Newton's method.
fn bisect_crossing(
    prob: &DiscProblem,
    psi: &Poly,
    mut hi: f64,
    mut lo: f64,
    idx: usize,
    rows: &mut Vec<ScanRow>,
) -> Result<Branch, DiscError> {
    let comp = Composite::new(psi);
    let mut best = solve_bishop(prob, hi)?;
    let start = (0..best.grid_size())
        .map(|j| (j, comp.f.eval(&best.point(j)).norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map_or(0, |(j, _)| j);
    let Some(mut xi) = comp.root(&best, best.node(start) * 0.99) else {
        return Ok(boundary_zero(psi, &best, None));
    };
    for _ in 0..BISECTIONS {
        if hi - lo <= 1e-15 * hi {
            break;
        }
        let mid = 0.5 * (hi + lo);
        let disc = solve_bishop(prob, mid)?;
        let winding = match probe(psi, &disc, prob.tol) {
            Ok(Probe::Winds(w)) => Some(w),
            _ => None,
        };
        rows.push(ScanRow {
            psi: idx,
            t: mid,
            residual: disc.diagnostics.residual,
            winding,
            branch: "",
        });
        let Some(next) = comp.root(&disc, xi) else {
            lo = mid;
            continue;
        };
        if next.norm() < 1.0 {
            hi = mid;
            xi = next;
            best = disc;
        } else {
            lo = mid;
        }
    }
    let theta = xi.arg();
    let point = best.point_at(theta);
    let modulus = comp.f.eval(&point).norm();
    Ok(Branch::ZeroOnN {
        t: best.t,
        theta,
        point,
        modulus,
    })
}
