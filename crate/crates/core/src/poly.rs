//! Sparse multivariate polynomials with exact first and second derivatives.
//!
//! Exponent vectors are dense (`nvars ≤ 8`, degree ≤ 8 at desk scale) and
//! coefficients are `f64`. Derivatives are taken symbolically term by term,
//! so gradients and Hessians are exact up to floating-point rounding —
//! every downstream tolerance leans on that.

use crate::error::{Error, Result};
use crate::numerics::Matrix;
use alloc::vec;
use alloc::vec::Vec;

/// A single monomial `coef · Π_j x_j^{exps[j]}`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Term {
    pub exps: Vec<u32>,
    pub coef: f64,
}

/// Multivariate polynomial in canonical form: terms sorted by exponent
/// vector, no duplicate exponent vectors, no zero coefficients.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Polynomial {
    nvars: usize,
    terms: Vec<Term>,
}

impl Polynomial {
    /// Builds a polynomial from raw terms, merging duplicates and dropping
    /// exact zeros. Fails if a term's exponent vector has the wrong length.
    pub fn new(nvars: usize, terms: Vec<Term>) -> Result<Self> {
        for t in &terms {
            if t.exps.len() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    got: t.exps.len(),
                });
            }
        }
        let mut p = Polynomial { nvars, terms };
        p.canonicalize();
        Ok(p)
    }

    /// The zero polynomial.
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: Vec::new(),
        }
    }

    /// Convenience constructor from `(exponents, coefficient)` pairs.
    pub fn from_pairs(nvars: usize, pairs: &[(&[u32], f64)]) -> Result<Self> {
        let terms = pairs
            .iter()
            .map(|(e, c)| Term {
                exps: e.to_vec(),
                coef: *c,
            })
            .collect();
        Self::new(nvars, terms)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Total degree: max over terms of the exponent sum; 0 for the zero
    /// polynomial.
    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|t| t.exps.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// Sum of two polynomials over the same variables, in canonical form.
    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        if other.nvars != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: other.nvars,
            });
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::new(self.nvars, terms)
    }

    /// Scales every coefficient.
    pub fn scale(&self, s: f64) -> Polynomial {
        let mut p = self.clone();
        for t in &mut p.terms {
            t.coef *= s;
        }
        p.canonicalize();
        p
    }

    /// Sort by exponent vector, merge equal vectors, drop zero coefficients.
    /// Idempotent.
    pub fn canonicalize(&mut self) {
        self.terms.sort_by(|a, b| a.exps.cmp(&b.exps));
        let mut merged: Vec<Term> = Vec::with_capacity(self.terms.len());
        for t in self.terms.drain(..) {
            match merged.last_mut() {
                Some(last) if last.exps == t.exps => last.coef += t.coef,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coef != 0.0);
        self.terms = merged;
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Evaluates `Σ coef · Π_j x_j^{e_j}` at `x`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        let mut acc = 0.0;
        for t in &self.terms {
            let mut m = t.coef;
            for (xj, &e) in x.iter().zip(&t.exps) {
                m *= powi(*xj, e);
            }
            acc += m;
        }
        Ok(acc)
    }

    /// Value, gradient and Hessian at `x`, all from the exact symbolic
    /// derivatives of each term. The Hessian is symmetric by construction.
    pub fn jet2(&self, x: &[f64]) -> Result<(f64, Vec<f64>, Matrix)> {
        self.check_dim(x)?;
        let n = self.nvars;
        let mut value = 0.0;
        let mut grad = vec![0.0; n];
        let mut hess = Matrix::zeros(n, n);

        for t in &self.terms {
            // Monomial partial powers: pw[j][k] = x_j^k for k ≤ e_j.
            value += t.coef * prod_pow(x, &t.exps, usize::MAX, usize::MAX);
            for j in 0..n {
                let ej = t.exps[j];
                if ej == 0 {
                    continue;
                }
                let g = t.coef * ej as f64 * prod_pow_deriv(x, &t.exps, j, usize::MAX);
                grad[j] += g;
                // Diagonal second derivative.
                if ej >= 2 {
                    let h = t.coef * (ej * (ej - 1)) as f64 * prod_pow2(x, &t.exps, j, j);
                    hess[(j, j)] += h;
                }
                // Mixed partials, upper triangle.
                for k in (j + 1)..n {
                    let ek = t.exps[k];
                    if ek == 0 {
                        continue;
                    }
                    let h = t.coef * (ej as f64) * (ek as f64) * prod_pow2(x, &t.exps, j, k);
                    hess[(j, k)] += h;
                    hess[(k, j)] += h;
                }
            }
        }
        Ok((value, grad, hess))
    }

    /// Gradient only (used in inner solver loops).
    pub fn grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        let n = self.nvars;
        let mut grad = vec![0.0; n];
        for t in &self.terms {
            for j in 0..n {
                let ej = t.exps[j];
                if ej == 0 {
                    continue;
                }
                grad[j] += t.coef * ej as f64 * prod_pow_deriv(x, &t.exps, j, usize::MAX);
            }
        }
        Ok(grad)
    }
}

fn powi(x: f64, e: u32) -> f64 {
    match e {
        0 => 1.0,
        1 => x,
        2 => x * x,
        _ => {
            let mut acc = 1.0;
            for _ in 0..e {
                acc *= x;
            }
            acc
        }
    }
}

// Π_j x_j^{e_j}, with variables `skip1`/`skip2` excluded (exponent left
// untouched elsewhere). usize::MAX means "no skip".
fn prod_pow(x: &[f64], exps: &[u32], skip1: usize, skip2: usize) -> f64 {
    let mut m = 1.0;
    for (j, (xj, &e)) in x.iter().zip(exps).enumerate() {
        if j == skip1 || j == skip2 {
            continue;
        }
        m *= powi(*xj, e);
    }
    m
}

// Monomial with exponent of variable `j` lowered by one.
fn prod_pow_deriv(x: &[f64], exps: &[u32], j: usize, skip: usize) -> f64 {
    let mut m = powi(x[j], exps[j] - 1);
    m *= prod_pow(x, exps, j, skip);
    m
}

// Monomial with exponents of `j` and `k` lowered by one each (by two when
// j == k).
fn prod_pow2(x: &[f64], exps: &[u32], j: usize, k: usize) -> f64 {
    let mut m = if j == k {
        powi(x[j], exps[j] - 2)
    } else {
        powi(x[j], exps[j] - 1) * powi(x[k], exps[k] - 1)
    };
    m *= prod_pow(x, exps, j, k);
    m
}
