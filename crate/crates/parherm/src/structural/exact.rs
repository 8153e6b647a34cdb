//! Exact Smith-McMillan invariant orders for small rational matrices with
//! Gaussian-rational data.
//!
//! Every f64 is a dyadic rational, so converting entries and pole locations
//! to big-rational pairs is lossless. The matrix is multiplied by the monic
//! least common denominator q, invariant orders fall out as differences of
//! minimum minor valuations minus the valuation of q. Works at the point of
//! interest or at infinity (through the substitution z = 1/t).

use super::StructuralIndices;
use crate::error::{Error, Result};
use crate::numerics::Eigenvalue;
use crate::rmatrix::RationalMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

pub const EXACT_SIZE_CAP: usize = 4;

/// Exact complex rational scalar.
#[derive(Debug, Clone, PartialEq)]
struct GaussRat {
    re: BigRational,
    im: BigRational,
}

impl GaussRat {
    fn zero() -> Self {
        GaussRat {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    fn from_c64(z: Complex64) -> Result<Self> {
        let conv = |x: f64| {
            BigRational::from_float(x)
                .ok_or_else(|| Error::InvalidInput(format!("non-finite value {x} in exact oracle")))
        };
        Ok(GaussRat {
            re: conv(z.re)?,
            im: conv(z.im)?,
        })
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn add(&self, o: &Self) -> Self {
        GaussRat {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }

    fn sub(&self, o: &Self) -> Self {
        GaussRat {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }

    fn mul(&self, o: &Self) -> Self {
        GaussRat {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    fn neg(&self) -> Self {
        GaussRat {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

/// Dense polynomial, ascending coefficients, exactly trimmed.
#[derive(Debug, Clone, PartialEq)]
struct Poly(Vec<GaussRat>);

impl Poly {
    fn zero() -> Self {
        Poly(Vec::new())
    }

    fn constant(c: GaussRat) -> Self {
        let mut p = Poly(vec![c]);
        p.trim();
        p
    }

    /// t - root.
    fn linear_minus(root: &GaussRat) -> Self {
        Poly(vec![
            root.neg(),
            GaussRat {
                re: BigRational::from_integer(1.into()),
                im: BigRational::zero(),
            },
        ])
    }

    /// 1 - root t.
    fn one_minus_scaled(root: &GaussRat) -> Self {
        let mut p = Poly(vec![
            GaussRat {
                re: BigRational::from_integer(1.into()),
                im: BigRational::zero(),
            },
            root.neg(),
        ]);
        p.trim();
        p
    }

    fn monomial(k: usize) -> Self {
        let mut c = vec![GaussRat::zero(); k + 1];
        c[k] = GaussRat {
            re: BigRational::from_integer(1.into()),
            im: BigRational::zero(),
        };
        Poly(c)
    }

    fn trim(&mut self) {
        while self.0.last().is_some_and(GaussRat::is_zero) {
            self.0.pop();
        }
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        let mut c = Vec::with_capacity(n);
        for k in 0..n {
            let a = self.0.get(k).cloned().unwrap_or_else(GaussRat::zero);
            let b = o.0.get(k).cloned().unwrap_or_else(GaussRat::zero);
            c.push(a.add(&b));
        }
        let mut p = Poly(c);
        p.trim();
        p
    }

    fn sub(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        let mut c = Vec::with_capacity(n);
        for k in 0..n {
            let a = self.0.get(k).cloned().unwrap_or_else(GaussRat::zero);
            let b = o.0.get(k).cloned().unwrap_or_else(GaussRat::zero);
            c.push(a.sub(&b));
        }
        let mut p = Poly(c);
        p.trim();
        p
    }

    fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![GaussRat::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] = c[i + j].add(&a.mul(b));
            }
        }
        let mut p = Poly(c);
        p.trim();
        p
    }

    fn scale(&self, c: &GaussRat) -> Self {
        let mut p = Poly(self.0.iter().map(|a| a.mul(c)).collect());
        p.trim();
        p
    }

    fn pow(&self, e: usize) -> Self {
        let mut acc = Poly::constant(GaussRat {
            re: BigRational::from_integer(1.into()),
            im: BigRational::zero(),
        });
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    fn eval(&self, z: &GaussRat) -> GaussRat {
        let mut acc = GaussRat::zero();
        for c in self.0.iter().rev() {
            acc = acc.mul(z).add(c);
        }
        acc
    }

    /// Synthetic division by (t - root); remainder must be zero.
    fn divide_linear(&self, root: &GaussRat) -> Self {
        let mut q = vec![GaussRat::zero(); self.0.len().saturating_sub(1)];
        let mut carry = GaussRat::zero();
        for k in (0..self.0.len()).rev() {
            let c = self.0[k].add(&carry.mul(root));
            if k == 0 {
                debug_assert!(c.is_zero(), "nonzero remainder in exact division");
            } else {
                q[k - 1] = c.clone();
            }
            carry = c;
        }
        let mut p = Poly(q);
        p.trim();
        p
    }

    /// Multiplicity of root in self (None for the zero polynomial).
    fn valuation_at(&self, root: &GaussRat) -> Option<u64> {
        if self.is_zero() {
            return None;
        }
        let mut p = self.clone();
        let mut v = 0;
        while !p.is_zero() && p.eval(root).is_zero() {
            p = p.divide_linear(root);
            v += 1;
        }
        Some(v)
    }
}

/// Exact polynomial determinant by Laplace expansion along the first row.
fn det(rows: &[usize], cols: &[usize], n: &[Vec<Poly>]) -> Poly {
    if rows.len() == 1 {
        return n[rows[0]][cols[0]].clone();
    }
    let mut acc = Poly::zero();
    let sub_rows = &rows[1..];
    for (j, &c) in cols.iter().enumerate() {
        if n[rows[0]][c].is_zero() {
            continue;
        }
        let sub_cols: Vec<usize> = cols
            .iter()
            .enumerate()
            .filter(|(jj, _)| *jj != j)
            .map(|(_, &cc)| cc)
            .collect();
        let minor = det(sub_rows, &sub_cols, n);
        let term = n[rows[0]][c].mul(&minor);
        acc = if j % 2 == 0 {
            acc.add(&term)
        } else {
            acc.sub(&term)
        };
    }
    acc
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Cleared-denominator polynomial matrix N = q R together with q's valuation
/// at the point of interest (0 in the infinity chart).
fn cleared_matrix(r: &RationalMatrix, at: Eigenvalue) -> Result<(Vec<Vec<Poly>>, u64, GaussRat)> {
    let poles: Vec<(GaussRat, usize, &crate::rmatrix::PoleTerm)> = r
        .terms
        .iter()
        .map(|t| Ok((GaussRat::from_c64(t.lambda)?, t.order(), t)))
        .collect::<Result<_>>()?;

    match at {
        Eigenvalue::Finite(z0) => {
            let z0 = GaussRat::from_c64(z0)?;
            // q = prod (z - lambda_p)^{d_p}.
            let factors: Vec<Poly> = poles
                .iter()
                .map(|(lam, _, _)| Poly::linear_minus(lam))
                .collect();
            let full = |skip: Option<usize>, reduce: usize| {
                let mut q = Poly::monomial(0);
                for (p, ((_, d, _), f)) in poles.iter().zip(&factors).enumerate() {
                    let e = if Some(p) == skip { d - reduce } else { *d };
                    q = q.mul(&f.pow(e));
                }
                q
            };
            let q = full(None, 0);
            let vq = q.valuation_at(&z0).unwrap();
            let mut n = vec![vec![Poly::zero(); r.n]; r.m];
            for (i, row) in n.iter_mut().enumerate() {
                for (j, entry) in row.iter_mut().enumerate() {
                    let mut acc = Poly::zero();
                    for (k, pk) in r.poly.iter().enumerate() {
                        let c = GaussRat::from_c64(pk[(i, j)])?;
                        acc = acc.add(&Poly::monomial(k).scale(&c).mul(&q));
                    }
                    for (p, (_, d, term)) in poles.iter().enumerate() {
                        for jj in 1..=*d {
                            let c = GaussRat::from_c64(term.coeff(jj)[(i, j)])?;
                            if c.is_zero() {
                                continue;
                            }
                            acc = acc.add(&full(Some(p), jj).scale(&c));
                        }
                    }
                    *entry = acc;
                }
            }
            Ok((n, vq, z0))
        }
        Eigenvalue::Infinite => {
            // z = 1/t: q_t = t^P prod_{|lambda| != 0} (1 - lambda_p t)^{d_p}.
            let p_deg = r.poly.len().saturating_sub(1);
            let nonzero: Vec<(usize, &GaussRat, usize)> = poles
                .iter()
                .enumerate()
                .filter(|(_, (lam, _, _))| !lam.is_zero())
                .map(|(p, (lam, d, _))| (p, lam, *d))
                .collect();
            let circle_prod = |skip: Option<usize>, reduce: usize| {
                let mut q = Poly::monomial(0);
                for &(p, lam, d) in &nonzero {
                    let e = if Some(p) == skip { d - reduce } else { d };
                    q = q.mul(&Poly::one_minus_scaled(lam).pow(e));
                }
                q
            };
            let mut n = vec![vec![Poly::zero(); r.n]; r.m];
            for (i, row) in n.iter_mut().enumerate() {
                for (j, entry) in row.iter_mut().enumerate() {
                    let mut acc = Poly::zero();
                    // Polynomial coefficients c_k z^k become c_k t^{P-k} q_c.
                    for (k, pk) in r.poly.iter().enumerate() {
                        let c = GaussRat::from_c64(pk[(i, j)])?;
                        if c.is_zero() {
                            continue;
                        }
                        acc = acc.add(
                            &Poly::monomial(p_deg - k)
                                .scale(&c)
                                .mul(&circle_prod(None, 0)),
                        );
                    }
                    for (p, (lam, d, term)) in poles.iter().enumerate() {
                        for jj in 1..=*d {
                            let c = GaussRat::from_c64(term.coeff(jj)[(i, j)])?;
                            if c.is_zero() {
                                continue;
                            }
                            let tail = if lam.is_zero() {
                                circle_prod(None, 0)
                            } else {
                                circle_prod(Some(p), jj)
                            };
                            acc = acc.add(&Poly::monomial(p_deg + jj).scale(&c).mul(&tail));
                        }
                    }
                    *entry = acc;
                }
            }
            Ok((n, p_deg as u64, GaussRat::zero()))
        }
    }
}

/// Exact invariant orders of a small rational matrix at a finite point or at
/// infinity. Returns one order per normal-rank index (zeros included).
pub fn smith_mcmillan_exact(r: &RationalMatrix, at: Eigenvalue) -> Result<StructuralIndices> {
    let cap = r.m.max(r.n);
    if cap > EXACT_SIZE_CAP {
        return Err(Error::TooLarge {
            cap: EXACT_SIZE_CAP,
            got: cap,
        });
    }
    let (n, vq, point) = cleared_matrix(r, at)?;
    let mut deltas = vec![0i64];
    for k in 1..=r.m.min(r.n) {
        let mut best: Option<u64> = None;
        for rows in combinations(r.m, k) {
            for cols in combinations(r.n, k) {
                let minor = det(&rows, &cols, &n);
                if let Some(v) = minor.valuation_at(&point) {
                    best = Some(best.map_or(v, |b: u64| b.min(v)));
                    if best == Some(0) {
                        break;
                    }
                }
            }
            if best == Some(0) {
                break;
            }
        }
        match best {
            Some(v) => deltas.push(v as i64),
            None => break,
        }
    }
    let orders: Vec<i64> = deltas
        .windows(2)
        .map(|w| w[1] - w[0] - vq as i64)
        .collect();
    debug_assert!(orders.windows(2).all(|w| w[0] <= w[1]));
    Ok(StructuralIndices { point: at, orders })
}
