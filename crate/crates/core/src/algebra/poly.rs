use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::{AlgebraError, GaussRat, VarContext};

/// Exponent vector over the slots `[z_1..z_n, z̄_1..z̄_n]`.
///
/// Ordered graded-lexicographically: total degree first, then the exponent
/// vectors compared left to right.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(slots: usize) -> Self {
        Monomial(vec![0; slots])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial in the variables of a [`VarContext`] and their conjugates,
/// with Gaussian-rational coefficients. Zero coefficients are never stored.
#[derive(Clone, Debug)]
pub struct Poly {
    ctx: Arc<VarContext>,
    terms: BTreeMap<Monomial, GaussRat>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.ctx, &other.ctx) || self.ctx == other.ctx) && self.terms == other.terms
    }
}

impl Eq for Poly {}

impl Poly {
    pub fn zero(ctx: &Arc<VarContext>) -> Self {
        Poly {
            ctx: ctx.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ctx: &Arc<VarContext>, c: GaussRat) -> Self {
        let mut p = Poly::zero(ctx);
        p.add_term(Monomial::one(ctx.slots()), c);
        p
    }

    pub fn one(ctx: &Arc<VarContext>) -> Self {
        Poly::constant(ctx, GaussRat::one())
    }

    pub fn from_int(ctx: &Arc<VarContext>, v: i64) -> Self {
        Poly::constant(ctx, GaussRat::from(v))
    }

    /// The variable `z_var`, or its conjugate when `barred`.
    pub fn var(ctx: &Arc<VarContext>, var: usize, barred: bool) -> Self {
        let mut e = vec![0; ctx.slots()];
        e[ctx.slot(var, barred)] = 1;
        Poly::term(ctx, e, GaussRat::one())
    }

    pub fn named(ctx: &Arc<VarContext>, name: &str) -> Self {
        Poly::var(ctx, ctx.require(name).expect("unknown variable"), false)
    }

    pub fn named_conj(ctx: &Arc<VarContext>, name: &str) -> Self {
        Poly::var(ctx, ctx.require(name).expect("unknown variable"), true)
    }

    pub fn term(ctx: &Arc<VarContext>, exps: Vec<u32>, coef: GaussRat) -> Self {
        assert_eq!(exps.len(), ctx.slots());
        let mut p = Poly::zero(ctx);
        p.add_term(Monomial(exps), coef);
        p
    }

    pub fn from_terms(
        ctx: &Arc<VarContext>,
        terms: impl IntoIterator<Item = (Monomial, GaussRat)>,
    ) -> Self {
        let mut p = Poly::zero(ctx);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Adds `c·m`, folding barred exponents of real variables into the
    /// unbarred slot and dropping cancelled terms.
    pub fn add_term(&mut self, mut m: Monomial, c: GaussRat) {
        if c.is_zero() {
            return;
        }
        let n = self.ctx.len();
        for v in 0..n {
            if self.ctx.is_real(v) && m.0[v + n] > 0 {
                m.0[v] += m.0[v + n];
                m.0[v + n] = 0;
            }
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn ctx(&self) -> &Arc<VarContext> {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &GaussRat)> {
        self.terms.iter()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &GaussRat)> {
        self.terms.iter().next_back()
    }

    pub fn coeff(&self, m: &Monomial) -> GaussRat {
        self.terms.get(m).cloned().unwrap_or_else(GaussRat::zero)
    }

    pub fn constant_term(&self) -> GaussRat {
        self.coeff(&Monomial::one(self.ctx.slots()))
    }

    pub fn as_constant(&self) -> Option<GaussRat> {
        match self.terms.len() {
            0 => Some(GaussRat::zero()),
            1 if self.total_degree() == 0 => Some(self.constant_term()),
            _ => None,
        }
    }

    /// Highest total degree (0 for the zero polynomial).
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// Lowest total degree of a term; `None` for the zero polynomial.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).min()
    }

    pub fn homogeneous_part(&self, d: u32) -> Poly {
        Poly::from_terms(
            &self.ctx,
            self.terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (m.clone(), c.clone())),
        )
    }

    /// Terms of total degree at most `d`.
    pub fn truncate(&self, d: u32) -> Poly {
        Poly::from_terms(
            &self.ctx,
            self.terms
                .iter()
                .filter(|(m, _)| m.degree() <= d)
                .map(|(m, c)| (m.clone(), c.clone())),
        )
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(|m| m.degree());
        match it.next() {
            None => true,
            Some(d) => it.all(|e| e == d),
        }
    }

    /// True when some term involves a conjugated variable.
    pub fn has_conj(&self) -> bool {
        let n = self.ctx.len();
        self.terms.keys().any(|m| m.0[n..].iter().any(|&e| e > 0))
    }

    /// Exponent of a slot is positive in some term.
    pub fn uses_slot(&self, slot: usize) -> bool {
        self.terms.keys().any(|m| m.0[slot] > 0)
    }

    pub fn uses_var(&self, var: usize) -> bool {
        let n = self.ctx.len();
        self.uses_slot(var) || self.uses_slot(var + n)
    }

    pub fn scale(&self, c: &GaussRat) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.ctx);
        }
        Poly {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(&self.ctx);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// The involution swapping every variable with its conjugate and
    /// conjugating coefficients. Real-valued polynomials are its fixed points.
    pub fn conj_involution(&self) -> Poly {
        let ctx = &self.ctx;
        let slots = ctx.slots();
        Poly::from_terms(
            ctx,
            self.terms.iter().map(|(m, c)| {
                let mut e = vec![0; slots];
                for (s, &k) in m.0.iter().enumerate() {
                    if k > 0 {
                        e[ctx.conj_slot(s)] += k;
                    }
                }
                (Monomial(e), c.conj())
            }),
        )
    }

    pub fn is_real_valued(&self) -> bool {
        self.conj_involution() == *self
    }

    /// `(p + conj p)/2`.
    pub fn real_part(&self) -> Poly {
        (self + &self.conj_involution()).scale(&GaussRat::from_rat(1, 2))
    }

    /// `(p − conj p)/(2i)`.
    pub fn imag_part(&self) -> Poly {
        (self - &self.conj_involution())
            .scale(&GaussRat::new(num_traits::zero(), super::rat(-1, 2)))
    }

    /// Formal partial derivative in one slot, the variable and its conjugate
    /// being independent symbols. A real variable has no barred slot, so its
    /// barred derivative is zero.
    pub fn wirtinger(&self, var: usize, barred: bool) -> Poly {
        let n = self.ctx.len();
        if barred && self.ctx.is_real(var) {
            return Poly::zero(&self.ctx);
        }
        let slot = if barred { var + n } else { var };
        self.diff_slot(slot)
    }

    pub fn wirtinger_named(&self, name: &str, barred: bool) -> Result<Poly, AlgebraError> {
        let v = self.ctx.require(name)?;
        Ok(self.wirtinger(v, barred))
    }

    pub fn diff_slot(&self, slot: usize) -> Poly {
        Poly::from_terms(
            &self.ctx,
            self.terms
                .iter()
                .filter(|(m, _)| m.0[slot] > 0)
                .map(|(m, c)| {
                    let k = m.0[slot];
                    let mut e = m.0.clone();
                    e[slot] -= 1;
                    (Monomial(e), c * &GaussRat::from(k as i64))
                }),
        )
    }

    /// Evaluates with `z̄_j` bound to the conjugate of `point[j]`.
    pub fn eval(&self, point: &[GaussRat]) -> GaussRat {
        assert_eq!(point.len(), self.ctx.len(), "point dimension");
        let n = self.ctx.len();
        let vals: Vec<GaussRat> = (0..2 * n)
            .map(|s| {
                if s < n {
                    point[s].clone()
                } else {
                    point[s - n].conj()
                }
            })
            .collect();
        let mut acc = GaussRat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (s, &k) in m.0.iter().enumerate() {
                if k > 0 {
                    t = &t * &vals[s].pow(k);
                }
            }
            acc += &t;
        }
        acc
    }

    pub fn eval_c64(&self, point: &[Complex64]) -> Complex64 {
        CompiledPoly::new(self).eval(point)
    }

    /// Replaces slot `s` by `images[s]` (a polynomial over `target`), dropping
    /// terms above total degree `truncate` when given.
    pub fn substitute(
        &self,
        target: &Arc<VarContext>,
        images: &[Poly],
        truncate: Option<u32>,
    ) -> Poly {
        assert_eq!(images.len(), self.ctx.slots(), "one image per slot");
        let mut cache: Vec<Vec<Poly>> = vec![vec![Poly::one(target)]; images.len()];
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(target, c.clone());
            for (s, &k) in m.0.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while cache[s].len() <= k as usize {
                    let next = mul_trunc(cache[s].last().unwrap(), &images[s], truncate);
                    cache[s].push(next);
                }
                t = mul_trunc(&t, &cache[s][k as usize], truncate);
                if t.is_zero() {
                    break;
                }
            }
            out = &out + &t;
        }
        out
    }

    /// Substitution given images of the unbarred variables only; conjugate
    /// slots receive the conjugated images.
    pub fn substitute_vars(
        &self,
        target: &Arc<VarContext>,
        images: &[Poly],
        truncate: Option<u32>,
    ) -> Poly {
        assert_eq!(images.len(), self.ctx.len());
        let mut all: Vec<Poly> = images.to_vec();
        all.extend(images.iter().map(|p| p.conj_involution()));
        self.substitute(target, &all, truncate)
    }

    /// `p(z + a)`: the expansion of `p` centred at `a`.
    pub fn translate(&self, a: &[GaussRat]) -> Poly {
        assert_eq!(a.len(), self.ctx.len());
        if a.iter().all(|x| x.is_zero()) {
            return self.clone();
        }
        let ctx = &self.ctx;
        let images: Vec<Poly> = (0..ctx.len())
            .map(|j| &Poly::var(ctx, j, false) + &Poly::constant(ctx, a[j].clone()))
            .collect();
        self.substitute_vars(ctx, &images, None)
    }

    /// Moves the polynomial into a context holding the same variable names
    /// (possibly more, in any order).
    pub fn rebase(&self, target: &Arc<VarContext>) -> Result<Poly, AlgebraError> {
        let images = self
            .ctx
            .names()
            .iter()
            .enumerate()
            .map(|(v, n)| match target.require(n) {
                Ok(i) => Ok(Poly::var(target, i, false)),
                Err(_) if !self.uses_var(v) => Ok(Poly::zero(target)),
                Err(e) => Err(e),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.substitute_vars(target, &images, None))
    }
}

fn mul_trunc(a: &Poly, b: &Poly, limit: Option<u32>) -> Poly {
    match limit {
        None => a * b,
        Some(d) => {
            let mut out = Poly::zero(&a.ctx);
            for (ma, ca) in &a.terms {
                for (mb, cb) in &b.terms {
                    if ma.degree() + mb.degree() <= d {
                        out.add_term(ma.mul(mb), ca * cb);
                    }
                }
            }
            out
        }
    }
}

fn check_ctx(a: &Poly, b: &Poly) {
    assert!(
        Arc::ptr_eq(&a.ctx, &b.ctx) || a.ctx == b.ctx,
        "polynomials from different variable contexts"
    );
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        check_ctx(self, o);
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        check_ctx(self, o);
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        check_ctx(self, o);
        let mut out = Poly::zero(&self.ctx);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-GaussRat::one())
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, o: Poly) -> Poly {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a Poly> for Poly {
            type Output = Poly;
            fn $m(self, o: &Poly) -> Poly {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Canonical text: terms in descending graded-lex order, explicit `*` and
/// `^`, `conj(z)` for conjugates.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let n = self.ctx.len();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative_like();
            let c = if neg { -c } else { c.clone() };
            match (idx, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut factors: Vec<String> = Vec::new();
            for s in 0..2 * n {
                let k = m.0[s];
                if k == 0 {
                    continue;
                }
                let base = if s < n {
                    self.ctx.name(s).to_string()
                } else {
                    format!("conj({})", self.ctx.name(s - n))
                };
                factors.push(if k == 1 { base } else { format!("{base}^{k}") });
            }
            if factors.is_empty() {
                write!(f, "{c}")?;
            } else {
                if !c.is_one() {
                    write!(f, "{c}*")?;
                }
                write!(f, "{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Floating-point evaluator for repeated numeric sampling.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    n: usize,
    real: Vec<bool>,
    terms: Vec<(Complex64, Vec<(usize, u32)>)>,
}

impl CompiledPoly {
    pub fn new(p: &Poly) -> Self {
        let n = p.ctx.len();
        let terms = p
            .terms
            .iter()
            .map(|(m, c)| {
                (
                    c.to_c64(),
                    m.0.iter()
                        .enumerate()
                        .filter(|(_, &k)| k > 0)
                        .map(|(s, &k)| (s, k))
                        .collect(),
                )
            })
            .collect();
        CompiledPoly {
            n,
            real: (0..n).map(|i| p.ctx.is_real(i)).collect(),
            terms,
        }
    }

    pub fn eval(&self, point: &[Complex64]) -> Complex64 {
        assert_eq!(point.len(), self.n, "point dimension");
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, fs) in &self.terms {
            let mut t = *c;
            for &(s, k) in fs {
                let v = if s < self.n {
                    point[s]
                } else {
                    point[s - self.n].conj()
                };
                t *= v.powu(k);
            }
            acc += t;
        }
        acc
    }

    pub fn is_real_var(&self, i: usize) -> bool {
        self.real[i]
    }
}
