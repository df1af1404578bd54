use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::{rat, AlgebraError, Poly, VarContext};

/// Closed real interval with outward-rounded `f64` endpoints.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };

    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "inverted interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    /// Enclosure of a rational number.
    pub fn from_rat(r: &BigRational) -> Self {
        if r.is_zero() {
            return Interval::ZERO;
        }
        let x = r.to_f64().unwrap_or(f64::NAN);
        if r.is_integer() && x.abs() < 9.0e15 {
            return Interval::point(x);
        }
        Interval {
            lo: x.next_down(),
            hi: x.next_up(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.lo == 0.0 && self.hi == 0.0
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn excludes_zero(&self) -> bool {
        self.lo > 0.0 || self.hi < 0.0
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn add(self, o: Interval) -> Interval {
        if o.is_zero() {
            return self;
        }
        if self.is_zero() {
            return o;
        }
        Interval {
            lo: (self.lo + o.lo).next_down(),
            hi: (self.hi + o.hi).next_up(),
        }
    }

    pub fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    pub fn sub(self, o: Interval) -> Interval {
        self.add(o.neg())
    }

    pub fn mul(self, o: Interval) -> Interval {
        if self.is_zero() || o.is_zero() {
            return Interval::ZERO;
        }
        let p = [
            self.lo * o.lo,
            self.lo * o.hi,
            self.hi * o.lo,
            self.hi * o.hi,
        ];
        let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval {
            lo: lo.next_down(),
            hi: hi.next_up(),
        }
    }

    /// `x^k`, tight for even powers of intervals straddling zero.
    pub fn powu(self, k: u32) -> Interval {
        if k == 0 {
            return Interval::point(1.0);
        }
        if k.is_multiple_of(2) && self.lo < 0.0 && self.hi > 0.0 {
            let m = Interval::new(0.0, self.mag());
            return Interval {
                lo: 0.0,
                hi: m.pow_nonneg(k).hi,
            };
        }
        if self.lo >= 0.0 {
            return self.pow_nonneg(k);
        }
        if self.hi > 0.0 {
            // odd power, monotone across zero
            let lo = Interval::point(-self.lo).pow_nonneg(k).hi;
            let hi = Interval::point(self.hi).pow_nonneg(k).hi;
            return Interval { lo: -lo, hi };
        }
        // entirely nonpositive
        let r = self.neg().pow_nonneg(k);
        if k.is_multiple_of(2) {
            r
        } else {
            r.neg()
        }
    }

    fn pow_nonneg(self, k: u32) -> Interval {
        let mut acc = Interval::point(1.0);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        Interval {
            lo: acc.lo.max(0.0),
            hi: acc.hi,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

/// Rectangular complex interval `re + i·im`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CInterval {
    pub re: Interval,
    pub im: Interval,
}

impl CInterval {
    pub fn excludes_zero(&self) -> bool {
        self.re.excludes_zero() || self.im.excludes_zero()
    }

    pub fn contains(&self, z: num_complex::Complex64) -> bool {
        self.re.contains(z.re) && self.im.contains(z.im)
    }
}

impl fmt::Display for CInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + i{}", self.re, self.im)
    }
}

/// Axis-aligned box with rational endpoints, one coordinate per real
/// dimension: a complex variable contributes its real then imaginary part,
/// a real variable a single coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntervalBox {
    lo: Vec<BigRational>,
    hi: Vec<BigRational>,
}

impl IntervalBox {
    pub fn new(lo: Vec<BigRational>, hi: Vec<BigRational>) -> Result<Self, AlgebraError> {
        if lo.len() != hi.len() {
            return Err(AlgebraError::Dimension {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Err(AlgebraError::UndefinedInput(
                "box with lower endpoint above upper endpoint",
            ));
        }
        Ok(IntervalBox { lo, hi })
    }

    /// `[-r, r]` in every coordinate.
    pub fn centered(dims: usize, r: BigRational) -> Self {
        IntervalBox {
            lo: vec![-r.clone(); dims],
            hi: vec![r; dims],
        }
    }

    pub fn unit(dims: usize) -> Self {
        IntervalBox::centered(dims, rat(1, 1))
    }

    pub fn dims(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[BigRational] {
        &self.lo
    }

    pub fn hi(&self) -> &[BigRational] {
        &self.hi
    }

    pub fn intervals(&self) -> Vec<Interval> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| Interval {
                lo: Interval::from_rat(a).lo,
                hi: Interval::from_rat(b).hi,
            })
            .collect()
    }

    pub fn widest(&self) -> usize {
        let mut best = 0;
        let mut w = BigRational::zero();
        for i in 0..self.dims() {
            let wi = &self.hi[i] - &self.lo[i];
            if wi > w {
                w = wi;
                best = i;
            }
        }
        best
    }

    pub fn bisect(&self, coord: usize) -> (IntervalBox, IntervalBox) {
        let mid = (&self.lo[coord] + &self.hi[coord]) / rat(2, 1);
        let mut a = self.clone();
        let mut b = self.clone();
        a.hi[coord] = mid.clone();
        b.lo[coord] = mid;
        (a, b)
    }

    pub fn midpoint(&self) -> Vec<BigRational> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| (a + b) / rat(2, 1))
            .collect()
    }
}

impl fmt::Display for IntervalBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| format!("[{a}, {b}]"))
            .collect();
        write!(f, "{}", parts.join(" x "))
    }
}

/// A polynomial rewritten in real coordinates for interval evaluation:
/// `z = x + iy`, `z̄ = x − iy`, so even powers of each coordinate are tight.
#[derive(Clone, Debug)]
struct RealForm {
    terms: Vec<(Interval, Interval, Vec<(usize, u32)>)>,
}

fn real_coordinates(ctx: &Arc<VarContext>) -> (Arc<VarContext>, Vec<Poly>) {
    let mut names = Vec::new();
    for v in 0..ctx.len() {
        if ctx.is_real(v) {
            names.push((ctx.name(v).to_string(), true));
        } else {
            names.push((format!("re#{}", ctx.name(v)), true));
            names.push((format!("im#{}", ctx.name(v)), true));
        }
    }
    let flags: Vec<(&str, bool)> = names.iter().map(|(n, r)| (n.as_str(), *r)).collect();
    let rc = VarContext::with_flags(&flags);
    let images = (0..ctx.len())
        .map(|v| {
            let o = ctx.real_offset(v);
            if ctx.is_real(v) {
                Poly::var(&rc, o, false)
            } else {
                &Poly::var(&rc, o, false)
                    + &Poly::var(&rc, o + 1, false).scale(&super::GaussRat::i())
            }
        })
        .collect();
    (rc, images)
}

impl RealForm {
    fn new(p: &Poly) -> Self {
        let (rc, images) = real_coordinates(p.ctx());
        let q = p.substitute_vars(&rc, &images, None);
        let terms = q
            .terms()
            .map(|(m, c)| {
                (
                    Interval::from_rat(&c.re),
                    Interval::from_rat(&c.im),
                    m.0[..rc.len()]
                        .iter()
                        .enumerate()
                        .filter(|(_, &k)| k > 0)
                        .map(|(s, &k)| (s, k))
                        .collect(),
                )
            })
            .collect();
        RealForm { terms }
    }

    fn eval(&self, coords: &[Interval]) -> CInterval {
        let mut re = Interval::ZERO;
        let mut im = Interval::ZERO;
        for (cr, ci, fs) in &self.terms {
            let mut m = Interval::point(1.0);
            for &(s, k) in fs {
                m = m.mul(coords[s].powu(k));
            }
            re = re.add(cr.mul(m));
            im = im.add(ci.mul(m));
        }
        CInterval { re, im }
    }
}

/// Sound enclosure of the range of `p` over the box.
pub fn interval_eval(p: &Poly, b: &IntervalBox) -> Result<CInterval, AlgebraError> {
    let d = p.ctx().real_dims();
    if b.dims() != d {
        return Err(AlgebraError::Dimension {
            expected: d,
            got: b.dims(),
        });
    }
    Ok(RealForm::new(p).eval(&b.intervals()))
}

/// Outcome of branch-and-bound exclusion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certification {
    /// Every leaf box has some enclosure excluding zero.
    Certified { leaves: usize, depth: usize },
    /// A box at the depth limit on which nothing could be excluded.
    Undecided(IntervalBox),
}

impl Certification {
    pub fn is_certified(&self) -> bool {
        matches!(self, Certification::Certified { .. })
    }
}

/// Proves that `ps` have no common zero on `{constraints = 0} ∩ box` by
/// bisecting the widest coordinate until on each leaf some polynomial of
/// either list has an enclosure excluding zero.
pub fn certify_no_common_zero(
    ps: &[Poly],
    constraints: &[Poly],
    b: &IntervalBox,
    max_depth: usize,
) -> Result<Certification, AlgebraError> {
    let first = ps
        .first()
        .ok_or(AlgebraError::UndefinedInput("empty polynomial list"))?;
    let d = first.ctx().real_dims();
    if b.dims() != d {
        return Err(AlgebraError::Dimension {
            expected: d,
            got: b.dims(),
        });
    }
    let forms: Vec<RealForm> = ps.iter().chain(constraints).map(RealForm::new).collect();
    let mut stack = vec![(b.clone(), 0usize)];
    let mut leaves = 0;
    let mut deepest = 0;
    while let Some((bx, depth)) = stack.pop() {
        let iv = bx.intervals();
        if forms.iter().any(|f| f.eval(&iv).excludes_zero()) {
            leaves += 1;
            deepest = deepest.max(depth);
            continue;
        }
        if depth >= max_depth || d == 0 {
            return Ok(Certification::Undecided(bx));
        }
        let (a, c) = bx.bisect(bx.widest());
        stack.push((c, depth + 1));
        stack.push((a, depth + 1));
    }
    Ok(Certification::Certified {
        leaves,
        depth: deepest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GaussRat;

    #[test]
    fn identity_enclosure() {
        let ctx = VarContext::complex(&["z"]);
        let z = Poly::named(&ctx, "z");
        let b = IntervalBox::new(vec![rat(1, 1), rat(0, 1)], vec![rat(2, 1), rat(0, 1)]).unwrap();
        let e = interval_eval(&z, &b).unwrap();
        assert!(e.re.lo <= 1.0 && e.re.hi >= 2.0 && e.im.contains(0.0));
    }

    #[test]
    fn parabolic_perturbed_jacobian_excludes_zero() {
        let ctx = VarContext::with_flags(&[("x", true)]);
        let x = Poly::named(&ctx, "x");
        let p = &x.scale(&GaussRat::from(2))
            + &Poly::constant(&ctx, GaussRat::new(rat(0, 1), rat(1, 10)));
        let e = interval_eval(&p, &IntervalBox::unit(1)).unwrap();
        assert!(e.im.lo >= 0.1 - 1e-15);
        assert!(certify_no_common_zero(&[p], &[], &IntervalBox::unit(1), 0)
            .unwrap()
            .is_certified());
    }

    #[test]
    fn constant_one_certifies_at_depth_zero() {
        let ctx = VarContext::complex(&["z"]);
        let r = certify_no_common_zero(&[Poly::one(&ctx)], &[], &IntervalBox::unit(2), 0).unwrap();
        assert_eq!(
            r,
            Certification::Certified {
                leaves: 1,
                depth: 0
            }
        );
    }

    #[test]
    fn even_powers_are_tight() {
        let i = Interval::new(-1.0, 2.0);
        assert_eq!(i.powu(2).lo, 0.0);
        assert!(i.powu(3).lo <= -1.0 && i.powu(3).hi >= 8.0);
    }
}
