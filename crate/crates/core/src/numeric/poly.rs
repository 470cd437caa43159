use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::lattice::IVec;
use crate::polytope::Polytope;

pub type C64 = Complex64;

/// Dense univariate polynomial, coefficients from the constant term up.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CPoly1 {
    pub coeffs: Vec<C64>,
}

impl CPoly1 {
    pub fn new(coeffs: Vec<C64>) -> Self {
        CPoly1 { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        CPoly1 {
            coeffs: coeffs.iter().map(|&c| C64::new(c, 0.0)).collect(),
        }
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[C64]) -> Self {
        let mut c = vec![C64::new(1.0, 0.0)];
        for r in roots {
            let mut next = vec![C64::new(0.0, 0.0); c.len() + 1];
            for (i, a) in c.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * r;
            }
            c = next;
        }
        CPoly1 { coeffs: c }
    }

    /// Degree after dropping exactly-zero leading coefficients; `None` for the
    /// zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| *c != C64::new(0.0, 0.0))
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// `p(z)` and `p'(z)` by Horner's scheme.
    pub fn eval_with_derivative(&self, z: C64) -> (C64, C64) {
        let mut p = C64::new(0.0, 0.0);
        let mut dp = C64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn abs_sum(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }
}

/// Sparse multivariate polynomial.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CPoly {
    pub nvars: usize,
    #[serde(with = "crate::pairs")]
    pub terms: BTreeMap<Vec<u32>, C64>,
}

fn powu(z: C64, e: u32) -> C64 {
    if e == 0 {
        C64::new(1.0, 0.0)
    } else {
        z.powu(e)
    }
}

pub(crate) fn monomial(x: &[C64], m: &[u32]) -> C64 {
    x.iter()
        .zip(m)
        .fold(C64::new(1.0, 0.0), |acc, (&xi, &e)| acc * powu(xi, e))
}

impl CPoly {
    pub fn zero(nvars: usize) -> Self {
        CPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: C64) -> Self {
        let mut p = CPoly::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// The coordinate function `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = CPoly::zero(nvars);
        p.add_term(e, C64::new(1.0, 0.0));
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, C64)>) -> Self {
        let mut p = CPoly::zero(nvars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    /// Real coefficients given as `(exponent, value)` pairs.
    pub fn from_real(nvars: usize, terms: &[(&[u32], f64)]) -> Self {
        CPoly::from_terms(nvars, terms.iter().map(|(e, c)| (e.to_vec(), C64::new(*c, 0.0))))
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: C64) {
        assert_eq!(e.len(), self.nvars, "exponent length");
        let entry = self.terms.entry(e).or_insert(C64::new(0.0, 0.0));
        *entry += c;
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|c| c.norm() == 0.0)
    }

    pub fn coeff(&self, e: &[u32]) -> C64 {
        self.terms.get(e).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[C64]) -> C64 {
        self.terms
            .iter()
            .fold(C64::new(0.0, 0.0), |acc, (e, c)| acc + c * monomial(x, e))
    }

    /// `Σ |c_m| |x^m|`, the natural scale for relative residuals.
    pub fn eval_abs(&self, x: &[C64]) -> f64 {
        self.terms.iter().map(|(e, c)| c.norm() * monomial(x, e).norm()).sum()
    }

    /// Relative backward error of `x` as a zero.
    pub fn relative_residual(&self, x: &[C64]) -> f64 {
        let scale = self.eval_abs(x);
        if scale == 0.0 {
            return 0.0;
        }
        self.eval(x).norm() / scale
    }

    pub fn abs_sum(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn partial(&self, var: usize) -> CPoly {
        let mut p = CPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[var] > 0 {
                let mut d = e.clone();
                d[var] -= 1;
                p.add_term(d, c * e[var] as f64);
            }
        }
        p
    }

    pub fn scale(&self, s: C64) -> CPoly {
        CPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        }
    }

    pub fn add(&self, other: &CPoly) -> CPoly {
        let mut p = self.clone();
        for (e, c) in &other.terms {
            p.add_term(e.clone(), *c);
        }
        p
    }

    pub fn sub(&self, other: &CPoly) -> CPoly {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &CPoly) -> CPoly {
        let mut p = CPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                p.add_term(e, c1 * c2);
            }
        }
        p
    }

    pub fn pow(&self, k: u32) -> CPoly {
        let mut acc = CPoly::constant(self.nvars, C64::new(1.0, 0.0));
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Drops terms with `|c| ≤ rel · max|c|`.
    pub fn trimmed(&self, rel: f64) -> CPoly {
        let m = self.max_abs();
        CPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.norm() > rel * m)
                .map(|(e, c)| (e.clone(), *c))
                .collect(),
        }
    }

    /// Coefficients in `var`, each a polynomial in the remaining variables
    /// (still indexed with `nvars` slots, `var` set to zero).
    pub fn coefficients_in(&self, var: usize) -> Vec<CPoly> {
        let d = self.degree_in(var) as usize;
        let mut out = vec![CPoly::zero(self.nvars); d + 1];
        for (e, c) in &self.terms {
            let mut rest = e.clone();
            rest[var] = 0;
            out[e[var] as usize].add_term(rest, *c);
        }
        out
    }

    /// Restriction to a univariate polynomial in `var`, other variables fixed.
    pub fn specialize(&self, var: usize, x: &[C64]) -> CPoly1 {
        let d = self.degree_in(var) as usize;
        let mut c = vec![C64::new(0.0, 0.0); d + 1];
        for (e, coef) in &self.terms {
            let mut m = C64::new(1.0, 0.0);
            for (i, (&xi, &ei)) in x.iter().zip(e).enumerate() {
                if i != var {
                    m *= powu(xi, ei);
                }
            }
            c[e[var] as usize] += coef * m;
        }
        CPoly1 { coeffs: c }
    }

    pub fn support(&self) -> Vec<Vec<u32>> {
        self.terms
            .iter()
            .filter(|(_, c)| c.norm() != 0.0)
            .map(|(e, _)| e.clone())
            .collect()
    }

    pub fn newton_polytope(&self) -> Polytope {
        let pts: Vec<IVec> = self
            .support()
            .iter()
            .map(|e| e.iter().map(|&x| x.into()).collect())
            .collect();
        Polytope::from_int_points(self.nvars, &pts)
    }

    /// Composition with polynomial maps: `x_i ↦ subs[i]`.
    pub fn compose(&self, subs: &[CPoly]) -> CPoly {
        assert_eq!(subs.len(), self.nvars);
        let out_vars = subs.first().map(|s| s.nvars).unwrap_or(0);
        let mut acc = CPoly::zero(out_vars);
        for (e, c) in &self.terms {
            let mut t = CPoly::constant(out_vars, *c);
            for (s, &k) in subs.iter().zip(e) {
                if k > 0 {
                    t = t.mul(&s.pow(k));
                }
            }
            acc = acc.add(&t);
        }
        acc
    }
}

impl fmt::Display for CPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mono: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| {
                        if k == 1 {
                            format!("x{}", i + 1)
                        } else {
                            format!("x{}^{}", i + 1, k)
                        }
                    })
                    .collect();
                let coef = format!("({:.6}{:+.6}i)", c.re, c.im);
                if mono.is_empty() {
                    coef
                } else {
                    format!("{coef}*{}", mono.join("*"))
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn derivative_and_eval() {
        // f = x^2 y + 3y - 1
        let f = CPoly::from_real(2, &[(&[2, 1], 1.0), (&[0, 1], 3.0), (&[0, 0], -1.0)]);
        let x = [c(2.0), c(-1.0)];
        assert_eq!(f.eval(&x), c(-8.0));
        assert_eq!(f.partial(0).eval(&x), c(-4.0));
        assert_eq!(f.partial(1).eval(&x), c(7.0));
        assert_eq!(f.total_degree(), 3);
        let u = f.specialize(1, &x);
        assert_eq!(u.coeffs, vec![c(-1.0), c(7.0)]);
    }

    #[test]
    fn composition() {
        // (x + y)^2 with x ↦ t, y ↦ t
        let f = CPoly::var(2, 0).add(&CPoly::var(2, 1)).pow(2);
        let t = CPoly::var(1, 0);
        let g = f.compose(&[t.clone(), t]);
        assert_eq!(g.coeff(&[2]), c(4.0));
        assert_eq!(g.terms.len(), 1);
    }

    #[test]
    fn roots_to_coefficients() {
        let p = CPoly1::from_roots(&[c(1.0), c(-1.0)]);
        assert_eq!(p.coeffs, vec![c(-1.0), c(0.0), c(1.0)]);
        let (v, dv) = p.eval_with_derivative(c(3.0));
        assert_eq!((v, dv), (c(8.0), c(6.0)));
    }
}
