use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{rat, AlgebraError, CMatrix, GaussRat, Poly, VarContext};

/// Matrix of polynomials over a shared context, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Poly>,
}

impl PolyMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Poly>) -> Result<Self, AlgebraError> {
        if entries.len() != rows * cols {
            return Err(AlgebraError::Dimension {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        Ok(PolyMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Poly) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        PolyMatrix {
            rows,
            cols,
            entries,
        }
    }

    /// Holomorphic Jacobian `∂f_i/∂z_j` of the components.
    pub fn jacobian(ctx: &Arc<VarContext>, components: &[Poly]) -> Self {
        PolyMatrix::from_fn(components.len(), ctx.len(), |i, j| {
            components[i].wirtinger(j, false)
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[Poly] {
        &self.entries
    }

    pub fn eval(&self, point: &[GaussRat]) -> CMatrix {
        CMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).eval(point))
    }

    pub fn eval_c64(&self, point: &[Complex64]) -> Vec<Vec<Complex64>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.get(i, j).eval_c64(point))
                    .collect()
            })
            .collect()
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> PolyMatrix {
        PolyMatrix::from_fn(rows.len(), cols.len(), |i, j| {
            self.get(rows[i], cols[j]).clone()
        })
    }

    /// Determinant by cofactor expansion along the first row.
    pub fn det(&self) -> Poly {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let idx: Vec<usize> = (0..self.cols).collect();
        self.det_rec(0, &idx)
    }

    fn det_rec(&self, row: usize, cols: &[usize]) -> Poly {
        let ctx = self
            .entries
            .first()
            .map(|p| p.ctx().clone())
            .unwrap_or_else(VarContext::empty);
        if cols.is_empty() {
            return Poly::one(&ctx);
        }
        let mut acc = Poly::zero(&ctx);
        for (pos, &c) in cols.iter().enumerate() {
            let e = self.get(row, c);
            if e.is_zero() {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let t = e * &self.det_rec(row + 1, &rest);
            acc = if pos % 2 == 0 { &acc + &t } else { &acc - &t };
        }
        acc
    }

    /// All `s × s` minors, enumerated by row subset then column subset,
    /// both in lexicographic order.
    pub fn minors(&self, s: usize) -> Result<Vec<Poly>, AlgebraError> {
        Ok(self
            .minors_indexed(s)?
            .into_iter()
            .map(|(_, _, p)| p)
            .collect())
    }

    /// Minors with their (row subset, column subset) labels.
    pub fn minors_indexed(
        &self,
        s: usize,
    ) -> Result<Vec<(Vec<usize>, Vec<usize>, Poly)>, AlgebraError> {
        let lim = self.rows.min(self.cols);
        if s == 0 || s > lim {
            return Err(AlgebraError::Dimension {
                expected: lim,
                got: s,
            });
        }
        let mut out = Vec::new();
        for rs in subsets(self.rows, s) {
            for cs in subsets(self.cols, s) {
                let d = self.submatrix(&rs, &cs).det();
                out.push((rs.clone(), cs, d));
            }
        }
        Ok(out)
    }

    /// Rank over the field of fractions: the largest `s` with a nonzero
    /// `s × s` minor.
    ///
    /// The rank at a random exact point is a lower bound; it is promoted
    /// only while some larger minor is a nonzero polynomial.
    pub fn generic_rank(&self) -> usize {
        if self.entries.iter().all(|p| p.is_zero()) {
            return 0;
        }
        let ctx = self.entries[0].ctx().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut r = 0;
        for _ in 0..3 {
            let pt: Vec<GaussRat> = (0..ctx.len())
                .map(|v| {
                    let re = rat(rng.random_range(-97..=97), rng.random_range(1..=13));
                    if ctx.is_real(v) {
                        GaussRat::real(re)
                    } else {
                        GaussRat::new(
                            re,
                            rat(rng.random_range(-97..=97), rng.random_range(1..=13)),
                        )
                    }
                })
                .collect();
            r = r.max(self.eval(&pt).rank());
        }
        let lim = self.rows.min(self.cols);
        while r < lim {
            let any = subsets(self.rows, r + 1).iter().any(|rs| {
                subsets(self.cols, r + 1)
                    .iter()
                    .any(|cs| !self.submatrix(rs, cs).det().is_zero())
            });
            if !any {
                break;
            }
            r += 1;
        }
        r
    }
}

/// `k`-element subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_in_lex_order() {
        assert_eq!(
            subsets(4, 3),
            vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]]
        );
        assert_eq!(subsets(2, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn example_c3_to_c4_minors() {
        let ctx = VarContext::complex(&["z1", "z2", "z3"]);
        let z = |i| Poly::var(&ctx, i, false);
        let f = vec![z(0), z(1), z(2).pow(2), &z(1) * &z(2)];
        let df = PolyMatrix::jacobian(&ctx, &f);
        let m: Vec<String> = df
            .minors(3)
            .unwrap()
            .iter()
            .map(|p| p.to_string())
            .collect();
        assert_eq!(m, vec!["2*z3", "z2", "-2*z3^2", "0"]);
        assert_eq!(df.generic_rank(), 3);
    }

    #[test]
    fn identity_and_zero() {
        let ctx = VarContext::complex(&["a", "b"]);
        let id = PolyMatrix::from_fn(2, 2, |i, j| {
            if i == j {
                Poly::one(&ctx)
            } else {
                Poly::zero(&ctx)
            }
        });
        assert_eq!(id.minors(2).unwrap(), vec![Poly::one(&ctx)]);
        let zero = PolyMatrix::from_fn(2, 3, |_, _| Poly::zero(&ctx));
        assert_eq!(zero.generic_rank(), 0);
        assert!(zero.minors(3).is_err());
    }
}
