use super::{AlgebraError, GaussRat, Poly};

/// Lowest-degree homogeneous part of `p` expanded at `base`, total degree
/// counting variables and conjugates together.
pub fn initial_form(p: &Poly, base: &[GaussRat]) -> Result<Poly, AlgebraError> {
    if p.is_zero() {
        return Err(AlgebraError::UndefinedInput(
            "initial form of the zero polynomial",
        ));
    }
    if base.len() != p.ctx().len() {
        return Err(AlgebraError::Dimension {
            expected: p.ctx().len(),
            got: base.len(),
        });
    }
    let t = p.translate(base);
    let d = t.order().expect("translation preserves nonzero");
    Ok(t.homogeneous_part(d))
}

/// Exact polynomial quotient `num / den`.
///
/// Leading-term division in the graded-lex order; since that order is
/// multiplicative, the first leading term that fails to divide proves no
/// polynomial quotient exists.
pub fn divide_exact(num: &Poly, den: &Poly) -> Result<Poly, AlgebraError> {
    let (lm, lc) = match den.leading_term() {
        Some((m, c)) => (m.clone(), c.clone()),
        None => {
            return Err(AlgebraError::UndefinedInput(
                "division by the zero polynomial",
            ))
        }
    };
    let inv = lc.inv().expect("nonzero leading coefficient");
    let ctx = num.ctx();
    let mut rem = num.clone();
    let mut q = Poly::zero(ctx);
    while let Some((m, c)) = rem.leading_term() {
        if !lm.divides(m) {
            return Err(AlgebraError::NoExactQuotient);
        }
        let t = Poly::from_terms(ctx, [(lm.quotient_of(m), c * &inv)]);
        rem = &rem - &(&t * den);
        q = &q + &t;
    }
    Ok(q)
}

/// Result of graded division at the origin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeriesQuotient {
    /// Quotient terms of total degree `0..=order`.
    Series { quotient: Poly, order: u32 },
    /// First total degree of the numerator at which no homogeneous quotient
    /// term exists.
    Obstructed(u32),
}

/// Term-by-term division of formal power series at the origin.
///
/// With `den = D_{d0} + D_{d0+1} + …` (homogeneous parts), the quotient
/// part of degree `e` solves `q_e·D_{d0} = num_{e+d0} − Σ_{j<e} q_j·D_{e+d0−j}`
/// exactly; a failed homogeneous division or a nonzero numerator part
/// below degree `d0` is an obstruction.
pub fn series_divide(num: &Poly, den: &Poly, order: u32) -> Result<SeriesQuotient, AlgebraError> {
    let d0 = den.order().ok_or(AlgebraError::UndefinedInput(
        "division by the zero polynomial",
    ))?;
    let ctx = num.ctx();
    if let Some(lo) = num.order() {
        if lo < d0 {
            return Ok(SeriesQuotient::Obstructed(lo));
        }
    }
    let lead = den.homogeneous_part(d0);
    let mut parts: Vec<Poly> = Vec::new();
    for e in 0..=order {
        let d = e + d0;
        let mut r = num.homogeneous_part(d);
        for (j, qj) in parts.iter().enumerate() {
            if qj.is_zero() {
                continue;
            }
            let dj = den.homogeneous_part(d - j as u32);
            if !dj.is_zero() {
                r = &r - &(qj * &dj);
            }
        }
        let qe = if r.is_zero() {
            Poly::zero(ctx)
        } else {
            match divide_exact(&r, &lead) {
                Ok(q) => q,
                Err(AlgebraError::NoExactQuotient) => return Ok(SeriesQuotient::Obstructed(d)),
                Err(e) => return Err(e),
            }
        };
        parts.push(qe);
    }
    let quotient = parts.iter().fold(Poly::zero(ctx), |acc, p| &acc + p);
    Ok(SeriesQuotient::Series { quotient, order })
}

impl SeriesQuotient {
    pub fn quotient(&self) -> Option<&Poly> {
        match self {
            SeriesQuotient::Series { quotient, .. } => Some(quotient),
            SeriesQuotient::Obstructed(_) => None,
        }
    }

    pub fn is_zero_quotient(&self) -> bool {
        self.quotient().is_some_and(|q| q.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::VarContext;
    use num_traits::Zero;

    #[test]
    fn series_obstruction_matches_nonremovable_example() {
        let ctx = VarContext::complex(&["z1", "z2"]);
        let num = Poly::named_conj(&ctx, "z2").pow(3);
        let den = Poly::named(&ctx, "z2");
        assert_eq!(
            series_divide(&num, &den, 5).unwrap(),
            SeriesQuotient::Obstructed(3)
        );
        assert_eq!(divide_exact(&num, &den), Err(AlgebraError::NoExactQuotient));
    }

    #[test]
    fn series_inverts_a_unit() {
        let ctx = VarContext::complex(&["z"]);
        let z = Poly::named(&ctx, "z");
        let one = Poly::one(&ctx);
        let den = &one - &z;
        let q = series_divide(&one, &den, 6).unwrap();
        let expect = (0..=6).fold(Poly::zero(&ctx), |acc, k| &acc + &z.pow(k));
        assert_eq!(q.quotient(), Some(&expect));
        assert_eq!(series_divide(&den, &den, 4).unwrap().quotient(), Some(&one));
    }

    #[test]
    fn zero_divisor_is_an_error() {
        let ctx = VarContext::complex(&["z"]);
        let z = Poly::named(&ctx, "z");
        assert!(matches!(
            divide_exact(&z, &Poly::zero(&ctx)),
            Err(AlgebraError::UndefinedInput(_))
        ));
        assert!(initial_form(&Poly::zero(&ctx), &[GaussRat::zero()]).is_err());
    }
}
