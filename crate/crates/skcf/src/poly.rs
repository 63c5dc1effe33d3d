//! Univariate polynomials over the scalar tower.
//!
//! The pencil machinery needs exact polynomial arithmetic (determinantal
//! divisors, invariant factors) and a root finder that keeps rational roots
//! exact. Roots are located numerically with an Aberth iteration; candidates
//! that verify exactly against the coefficients are recorded as exact roots,
//! everything else is returned as an approximate value. Square-free
//! decomposition runs first so the numeric stage only ever sees simple roots.

use num_complex::Complex64;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::scalar::{approx_eq, snap_to_gauss_rational, ExtScalar, GaussRational, Scalar};

/// Denominator bound for recognizing exact rational roots from numeric
/// approximations. Roots with larger denominators are reported approximately.
const ROOT_SNAP_DEN: u64 = 1_000_000;

/// Polynomial with ascending coefficients; the zero polynomial is the empty
/// list and the leading coefficient is otherwise nonzero.
#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly {
    coeffs: Vec<Scalar>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Scalar) -> Self {
        UniPoly::new(vec![c])
    }

    pub fn one() -> Self {
        UniPoly::constant(Scalar::one())
    }

    /// The monic linear factor `t - root`.
    pub fn from_root(root: &Scalar) -> Self {
        UniPoly::new(vec![-root, Scalar::one()])
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == Scalar::one()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_exact(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_exact)
    }

    pub fn leading(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mut acc = Scalar::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i).cloned().unwrap_or_else(Scalar::zero);
            let b = other.coeffs.get(i).cloned().unwrap_or_else(Scalar::zero);
            out.push(&a + &b);
        }
        UniPoly::new(out)
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> UniPoly {
        UniPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Scalar::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        UniPoly::new(out)
    }

    pub fn div_rem(&self, divisor: &UniPoly) -> Result<(UniPoly, UniPoly)> {
        if divisor.is_zero() {
            return Err(Error::Singular("polynomial divisor"));
        }
        let dl = divisor.leading().unwrap().clone();
        let dd = divisor.degree().unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((UniPoly::zero(), self.clone()));
        }
        let mut quot = vec![Scalar::zero(); rem.len() - dd];
        while rem.len() > dd {
            let lead = rem.last().unwrap().clone();
            let shift = rem.len() - 1 - dd;
            let q = &lead / &dl;
            for (i, c) in divisor.coeffs.iter().enumerate() {
                rem[shift + i] = &rem[shift + i] - &(&q * c);
            }
            quot[shift] = q;
            // the leading entry cancels exactly; drop it and any new zeros
            rem.pop();
            while rem.last().is_some_and(Scalar::is_zero) {
                rem.pop();
            }
        }
        Ok((UniPoly::new(quot), UniPoly::new(rem)))
    }

    /// Exact quotient; fails when the division leaves a remainder.
    pub fn div_exact(&self, divisor: &UniPoly) -> Result<UniPoly> {
        let (q, r) = self.div_rem(divisor)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::InvalidStructure(
                "polynomial division left a remainder".into(),
            ))
        }
    }

    pub fn monic(&self) -> UniPoly {
        match self.leading() {
            None => UniPoly::zero(),
            Some(l) if *l == Scalar::one() => self.clone(),
            Some(l) => {
                let inv = l.inv().expect("nonzero leading coefficient");
                UniPoly {
                    coeffs: self.coeffs.iter().map(|c| c * &inv).collect(),
                }
            }
        }
    }

    pub fn derivative(&self) -> UniPoly {
        if self.coeffs.len() <= 1 {
            return UniPoly::zero();
        }
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| &Scalar::from_int(i as i64) * c)
                .collect(),
        )
    }

    /// Monic greatest common divisor by the Euclidean algorithm.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let mut a = self.monic();
        let mut b = other.monic();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r.monic();
        }
        a
    }

    /// Multiplicity of zero as a root, read off the trailing coefficients.
    pub fn valuation_at_zero(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    /// Yun square-free decomposition `f = prod a_i^i` over a field of
    /// characteristic zero. Returns the nontrivial `(a_i, i)` pairs.
    pub fn squarefree_decomposition(&self) -> Result<Vec<(UniPoly, usize)>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let f = self.monic();
        if f.degree() == Some(0) {
            return Ok(Vec::new());
        }
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.div_exact(&a0)?;
        let c = df.div_exact(&a0)?;
        let mut d = c.sub(&b.derivative());
        let mut out = Vec::new();
        let mut i = 1;
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), i));
            }
            b = b.div_exact(&a)?;
            let cnext = d.div_exact(&a)?;
            d = cnext.sub(&b.derivative());
            i += 1;
        }
        Ok(out)
    }

    fn complex_coeffs(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(Scalar::to_complex).collect()
    }

    /// Roots with multiplicities, sorted in the `C*` order. Rational roots of
    /// exact polynomials are returned exactly; remaining roots approximately.
    /// Roots closer than `tol` are merged with summed multiplicity.
    pub fn roots(&self, tol: f64) -> Result<Vec<(ExtScalar, usize)>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut found: Vec<(ExtScalar, usize)> = Vec::new();
        if self.is_exact() {
            for (factor, mult) in self.squarefree_decomposition()? {
                let mut rest = factor.monic();
                // peel off exact rational roots guided by numeric estimates
                'peel: while rest.degree().unwrap_or(0) > 0 {
                    for z in aberth_roots(&rest.complex_coeffs()) {
                        let Some(cand) = snap_to_gauss_rational(z, 1e-6, ROOT_SNAP_DEN) else {
                            continue;
                        };
                        let cand = Scalar::Exact(cand);
                        if rest.eval(&cand).is_zero() {
                            rest = rest.div_exact(&UniPoly::from_root(&cand))?;
                            found.push((ExtScalar::Finite(cand), mult));
                            continue 'peel;
                        }
                    }
                    break;
                }
                let drest = rest.derivative();
                for z in aberth_roots(&rest.complex_coeffs()) {
                    let z = polish_simple_root(&rest, &drest, z);
                    found.push((ExtScalar::Finite(Scalar::Approx(z)), mult));
                }
            }
        } else {
            for z in aberth_roots(&self.complex_coeffs()) {
                found.push((ExtScalar::Finite(Scalar::Approx(z)), 1));
            }
        }
        let mut merged = merge_close_roots(found, tol);
        merged.sort_by(|a, b| a.0.cstar_cmp(&b.0));
        let total: usize = merged.iter().map(|(_, m)| m).sum();
        debug_assert_eq!(total, self.degree().unwrap_or(0));
        Ok(merged)
    }
}

/// Cluster values within `tol`, summing multiplicities. Exact members win the
/// representative slot; ties break toward the `C*`-smallest value.
fn merge_close_roots(roots: Vec<(ExtScalar, usize)>, tol: f64) -> Vec<(ExtScalar, usize)> {
    let mut clusters: Vec<(ExtScalar, usize)> = Vec::new();
    for (val, mult) in roots {
        match clusters
            .iter_mut()
            .find(|(rep, _)| approx_eq(rep, &val, tol))
        {
            Some((rep, m)) => {
                *m += mult;
                let prefer = match (rep.is_exact(), val.is_exact()) {
                    (false, true) => true,
                    (a, b) if a == b => val.cstar_cmp(rep).is_lt(),
                    _ => false,
                };
                if prefer {
                    *rep = val;
                }
            }
            None => clusters.push((val, mult)),
        }
    }
    clusters
}

/// Two Newton steps in exact rational arithmetic from a numeric seed near a
/// simple root, rounding back to `f64` at the end. The numeric iteration can
/// leave clustered roots with errors several orders above machine precision,
/// which downstream Moebius normalization then amplifies; polishing brings
/// the error down to rounding level.
fn polish_simple_root(p: &UniPoly, dp: &UniPoly, seed: Complex64) -> Complex64 {
    let mut z = seed;
    for _ in 0..2 {
        let (Some(re), Some(im)) = (BigRational::from_float(z.re), BigRational::from_float(z.im))
        else {
            return z;
        };
        let x = Scalar::Exact(GaussRational::new(re, im));
        let dv = dp.eval(&x);
        if dv.is_zero() {
            return z;
        }
        let step = (&p.eval(&x) * &dv.inv().expect("nonzero derivative")).to_complex();
        if !step.re.is_finite() || !step.im.is_finite() {
            return z;
        }
        z -= step;
    }
    z
}

/// All complex roots of the polynomial with the given ascending coefficients,
/// by Aberth-Ehrlich iteration with Newton polishing. Deterministic: fixed
/// starting configuration, no randomness.
pub fn aberth_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last().is_some_and(|v| v.norm() == 0.0) {
        c.pop();
    }
    if c.len() <= 1 {
        return Vec::new();
    }
    let lead = *c.last().unwrap();
    for v in &mut c {
        *v /= lead;
    }
    let mut zero_roots = 0;
    while c.first().is_some_and(|v| v.norm() == 0.0) {
        c.remove(0);
        zero_roots += 1;
    }
    let mut roots = vec![Complex64::new(0.0, 0.0); zero_roots];
    let d = c.len() - 1;
    if d == 0 {
        return roots;
    }
    if d == 1 {
        roots.push(-c[0]);
        return roots;
    }
    if d == 2 {
        roots.extend(quadratic_roots(c[1], c[0]));
        return roots;
    }

    let radius = c[0].norm().powf(1.0 / d as f64).max(1e-12);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * (k as f64 + 0.35) / d as f64;
            radius * Complex64::new(angle.cos(), angle.sin())
        })
        .collect();
    let deriv: Vec<Complex64> = c
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, v)| v * i as f64)
        .collect();

    for _ in 0..500 {
        let mut moved = 0f64;
        for i in 0..d {
            let p = horner(&c, z[i]);
            let dp = horner(&deriv, z[i]);
            let newton = if dp.norm() > 0.0 { p / dp } else { p };
            let mut repulse = Complex64::new(0.0, 0.0);
            for j in 0..d {
                if j != i {
                    let diff = z[i] - z[j];
                    if diff.norm() > 1e-300 {
                        repulse += diff.inv();
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * repulse;
            let step = if denom.norm() > 1e-300 {
                newton / denom
            } else {
                newton
            };
            z[i] -= step;
            moved = moved.max(step.norm() / (1.0 + z[i].norm()));
        }
        if moved < 1e-15 {
            break;
        }
    }
    for zi in &mut z {
        for _ in 0..3 {
            let p = horner(&c, *zi);
            let dp = horner(&deriv, *zi);
            if dp.norm() > 1e-300 {
                *zi -= p / dp;
            }
        }
    }
    roots.extend(z);
    roots
}

fn horner(coeffs: &[Complex64], x: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Roots of the monic quadratic `t^2 + b t + c`, cancellation-safe.
fn quadratic_roots(b: Complex64, c: Complex64) -> [Complex64; 2] {
    let disc = b * b - 4.0 * c;
    let mut s = disc.sqrt();
    if (b.conj() * s).re > 0.0 {
        s = -s;
    }
    let q = (-b + s) / 2.0;
    if q.norm() > 0.0 {
        [q, c / q]
    } else {
        [q, (-b - s) / 2.0]
    }
}
