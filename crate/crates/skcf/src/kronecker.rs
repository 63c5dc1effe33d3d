//! Kronecker structure of matrix pencils: zero block, minimal indices, and
//! elementary divisors, plus the reverse direction (building a pencil from a
//! structure).
//!
//! For pencils with exact entries every discrete invariant is computed over
//! exact arithmetic: minimal indices from nullities of the polynomial
//! nullspace matrices `W_d`, finite eigenvalue signatures from determinantal
//! divisors (gcds of k x k minors of `R + tS`), the infinite eigenvalue from
//! the reversed pencil `S + tR` at zero. Only irrational eigenvalue values
//! become approximate. For approximate entries the same combinatorics run on
//! singular-value ranks thresholded at `tol * sigma_max`; that path is best
//! effort and reports [`Error::Numerical`] when its bookkeeping is
//! inconsistent.

use std::cmp::Ordering;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::pencil::{transpose_pencil, Pencil};
use crate::poly::{aberth_roots, UniPoly};
use crate::scalar::{approx_eq, ExtScalar, Scalar};

/// Block sizes of one eigenvalue, sorted non-decreasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct SizeSignature {
    sizes: Vec<usize>,
}

impl SizeSignature {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidStructure("empty size signature".into()));
        }
        if sizes.contains(&0) {
            return Err(Error::InvalidStructure("zero block size".into()));
        }
        if sizes.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidStructure(
                "size signature must be non-decreasing".into(),
            ));
        }
        Ok(SizeSignature { sizes })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Number of blocks.
    pub fn blocks(&self) -> usize {
        self.sizes.len()
    }

    /// Total dimension occupied by the eigenvalue's blocks.
    pub fn total(&self) -> usize {
        self.sizes.iter().sum()
    }
}

impl Ord for SizeSignature {
    /// Graded lexicographic order: shorter signatures first, ties by the
    /// first differing entry.
    fn cmp(&self, other: &Self) -> Ordering {
        self.sizes
            .len()
            .cmp(&other.sizes.len())
            .then_with(|| self.sizes.cmp(&other.sizes))
    }
}

impl PartialOrd for SizeSignature {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'de> Deserialize<'de> for SizeSignature {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        SizeSignature::new(Vec::deserialize(deserializer)?).map_err(D::Error::custom)
    }
}

/// One eigenvalue with its size signature.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigRecord {
    pub value: ExtScalar,
    #[serde(rename = "sizes")]
    pub signature: SizeSignature,
}

/// Full Kronecker invariant data of an `m x n` pencil.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KroneckerStructure {
    pub h: usize,
    pub g: usize,
    pub eps: Vec<usize>,
    pub nu: Vec<usize>,
    pub eigs: Vec<EigRecord>,
}

impl KroneckerStructure {
    pub fn validate(&self) -> Result<()> {
        for (name, list) in [("eps", &self.eps), ("nu", &self.nu)] {
            if list.contains(&0) {
                return Err(Error::InvalidStructure(format!(
                    "{name} entries must be positive"
                )));
            }
            if list.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::InvalidStructure(format!("{name} must be sorted")));
            }
        }
        for i in 0..self.eigs.len() {
            for j in (i + 1)..self.eigs.len() {
                if self.eigs[i].value == self.eigs[j].value {
                    return Err(Error::InvalidStructure(
                        "eigenvalues must be pairwise distinct".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Pencil dimensions implied by the block bookkeeping.
    pub fn dims(&self) -> (usize, usize) {
        let t: usize = self.eigs.iter().map(|e| e.signature.total()).sum();
        let m = self.h
            + self.eps.iter().sum::<usize>()
            + self.nu.iter().map(|v| v + 1).sum::<usize>()
            + t;
        let n = self.g
            + self.eps.iter().map(|e| e + 1).sum::<usize>()
            + self.nu.iter().sum::<usize>()
            + t;
        (m, n)
    }

    /// Total count of distinct eigenvalues.
    pub fn eig_count(&self) -> usize {
        self.eigs.len()
    }
}

impl<'de> Deserialize<'de> for KroneckerStructure {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            h: usize,
            g: usize,
            eps: Vec<usize>,
            nu: Vec<usize>,
            eigs: Vec<EigRecord>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let ks = KroneckerStructure {
            h: raw.h,
            g: raw.g,
            eps: raw.eps,
            nu: raw.nu,
            eigs: raw.eigs,
        };
        ks.validate().map_err(D::Error::custom)?;
        Ok(ks)
    }
}

/// True iff the structure's block bookkeeping matches an `m x n` pencil.
pub fn check_dimensions(ks: &KroneckerStructure, m: usize, n: usize) -> bool {
    ks.dims() == (m, n)
}

/// Extract the full Kronecker structure of a pencil.
pub fn kronecker_structure(p: &Pencil, tol: f64) -> Result<KroneckerStructure> {
    let (m, n) = (p.rows(), p.cols());
    let rho = normal_rank(p, tol);
    let (g, eps) = right_indices(p, rho, tol)?;
    let (h, nu) = right_indices(&transpose_pencil(p), rho, tol)?;

    let mut eigs = if p.is_exact() {
        finite_eigs_exact(p, rho, tol)?
    } else {
        finite_eigs_approx(p, rho, tol)?
    };
    let inf_sizes = weyr_sizes(&reversed(p), &Scalar::zero(), rho, tol)?;
    if !inf_sizes.is_empty() {
        eigs.push(EigRecord {
            value: ExtScalar::Infinity,
            signature: SizeSignature::new(inf_sizes)?,
        });
    }
    eigs.sort_by(|a, b| a.value.cstar_cmp(&b.value));

    let ks = KroneckerStructure {
        h,
        g,
        eps,
        nu,
        eigs,
    };
    ks.validate()?;
    if !check_dimensions(&ks, m, n) {
        return Err(Error::Numerical(format!(
            "extracted structure implies dimensions {:?}, pencil is {}x{}",
            ks.dims(),
            m,
            n
        )));
    }
    Ok(ks)
}

/// Build the direct-sum pencil of a structure: zero block, then the L_eps
/// blocks, transposed L_nu blocks, and one chain block per eigenvalue size.
pub fn build_pencil(ks: &KroneckerStructure) -> Result<Pencil> {
    ks.validate()?;
    let (m, n) = ks.dims();
    let mut r = Mat::zeros(m, n);
    let mut s = Mat::zeros(m, n);
    let (mut row, mut col) = (ks.h, ks.g);
    for &e in &ks.eps {
        for i in 0..e {
            s.set(row + i, col + i, Scalar::one());
            r.set(row + i, col + i + 1, Scalar::one());
        }
        row += e;
        col += e + 1;
    }
    for &v in &ks.nu {
        for i in 0..v {
            s.set(row + i, col + i, Scalar::one());
            r.set(row + i + 1, col + i, Scalar::one());
        }
        row += v + 1;
        col += v;
    }
    for rec in &ks.eigs {
        for &e in rec.signature.sizes() {
            match &rec.value {
                ExtScalar::Finite(x) => {
                    for i in 0..e {
                        s.set(row + i, col + i, Scalar::one());
                        r.set(row + i, col + i, -x);
                        if i + 1 < e {
                            r.set(row + i, col + i + 1, Scalar::one());
                        }
                    }
                }
                ExtScalar::Infinity => {
                    for i in 0..e {
                        r.set(row + i, col + i, Scalar::one());
                        if i + 1 < e {
                            s.set(row + i, col + i + 1, Scalar::one());
                        }
                    }
                }
            }
            row += e;
            col += e;
        }
    }
    Pencil::new(r, s)
}

fn reversed(p: &Pencil) -> Pencil {
    Pencil {
        r: p.s.clone(),
        s: p.r.clone(),
    }
}

/// Normal rank: the rank of `R + tS` at generic `t`. Rank drops happen at
/// most at `min(m, n)` points, so sampling one more point than that finds
/// the generic value.
fn normal_rank(p: &Pencil, tol: f64) -> usize {
    let points = p.rows().min(p.cols()) + 1;
    if p.is_exact() {
        (0..points as i64)
            .map(|t| p.eval(&Scalar::from_int(t)).rank(tol))
            .max()
            .unwrap_or(0)
    } else {
        (0..points + 1)
            .map(|j| {
                let angle = 2.0 * std::f64::consts::PI * (j as f64 + 0.25) / (points + 1) as f64;
                p.eval(&Scalar::approx(angle.cos(), angle.sin())).rank(tol)
            })
            .max()
            .unwrap_or(0)
    }
}

/// The matrix whose right nullspace holds the degree-`d` polynomial vectors
/// `v(t)` with `(R + tS) v(t) = 0`: block row j carries `R v_j + S v_{j-1}`.
fn w_matrix(p: &Pencil, d: usize) -> Mat {
    let (m, n) = (p.rows(), p.cols());
    let mut w = Mat::zeros((d + 2) * m, (d + 1) * n);
    for j in 0..=d {
        w.place(j * m, j * n, &p.r);
        w.place((j + 1) * m, j * n, &p.s);
    }
    w
}

/// Zero-column count and right minimal indices, from the nullity sequence of
/// the `W_d` matrices: `s_d - s_{d-1}` counts the indices at most `d`.
fn right_indices(p: &Pencil, rho: usize, tol: f64) -> Result<(usize, Vec<usize>)> {
    let n = p.cols();
    let total = n - rho;
    if total == 0 {
        return Ok((0, Vec::new()));
    }
    let (mut g, mut eps) = (0, Vec::new());
    let (mut prev_s, mut prev_c) = (0usize, 0usize);
    for d in 0..=n {
        let s = ((d + 1) * n)
            .checked_sub(w_matrix(p, d).rank(tol))
            .ok_or_else(|| Error::Numerical("nullity exceeded column count".into()))?;
        let c = s
            .checked_sub(prev_s)
            .ok_or_else(|| Error::Numerical("nullity sequence not monotone".into()))?;
        let at_d = c
            .checked_sub(prev_c)
            .ok_or_else(|| Error::Numerical("minimal index counts not monotone".into()))?;
        if c > total {
            return Err(Error::Numerical(
                "more minimal indices than rank allows".into(),
            ));
        }
        if d == 0 {
            g = at_d;
        } else {
            eps.extend(std::iter::repeat_n(d, at_d));
        }
        if c == total {
            return Ok((g, eps));
        }
        prev_s = s;
        prev_c = c;
    }
    Err(Error::Numerical(
        "minimal index search did not terminate".into(),
    ))
}

/// Block sizes of the eigenvalue `x` via nullity increments of the local
/// block-Toeplitz matrices (Weyr characteristics). The singular part
/// contributes exactly `n - rho` to every increment, which is subtracted.
fn weyr_sizes(p: &Pencil, x: &Scalar, rho: usize, tol: f64) -> Result<Vec<usize>> {
    let (m, n) = (p.rows(), p.cols());
    let corr = n - rho;
    let ax = p.eval(x);
    let mut w = Vec::new();
    let mut prev_null = 0usize;
    let cap = m.min(n);
    for s in 1.. {
        let mut t = Mat::zeros(s * m, s * n);
        for i in 0..s {
            t.place(i * m, i * n, &ax);
            if i + 1 < s {
                t.place((i + 1) * m, i * n, &p.s);
            }
        }
        let nullity = (s * n)
            .checked_sub(t.rank(tol))
            .ok_or_else(|| Error::Numerical("nullity exceeded column count".into()))?;
        let delta = nullity
            .checked_sub(prev_null)
            .ok_or_else(|| Error::Numerical("Weyr sequence not monotone".into()))?;
        let ws = delta
            .checked_sub(corr)
            .ok_or_else(|| Error::Numerical("Weyr increment below singular floor".into()))?;
        if ws == 0 {
            break;
        }
        if w.last().is_some_and(|&last| ws > last) {
            return Err(Error::Numerical("Weyr sequence increased".into()));
        }
        if s > cap {
            return Err(Error::Numerical(
                "eigenvalue block size exceeds pencil".into(),
            ));
        }
        w.push(ws);
        prev_null = nullity;
    }
    let mut sizes = Vec::new();
    for s in 1..=w.len() {
        let count = w[s - 1] - w.get(s).copied().unwrap_or(0);
        sizes.extend(std::iter::repeat_n(s, count));
    }
    Ok(sizes)
}

/// Finite eigenvalues with signatures from the invariant factors
/// `f_k = D_k / D_{k-1}`, where `D_k` is the monic gcd of all k x k minors of
/// `R + tS`. The multiplicity of a root in `f_k` is its k-th block size.
fn finite_eigs_exact(p: &Pencil, rho: usize, tol: f64) -> Result<Vec<EigRecord>> {
    if rho == 0 {
        return Ok(Vec::new());
    }
    let entries: Vec<Vec<UniPoly>> = (0..p.rows())
        .map(|j| {
            (0..p.cols())
                .map(|k| UniPoly::new(vec![p.r.at(j, k).clone(), p.s.at(j, k).clone()]))
                .collect()
        })
        .collect();

    // divisors from rho downward; once constant, all lower ones are constant
    let mut divisors = vec![UniPoly::one(); rho + 1];
    for k in (1..=rho).rev() {
        let d = determinantal_divisor(&entries, p.rows(), p.cols(), k)?;
        let constant = d.degree() == Some(0);
        divisors[k] = d;
        if constant {
            break;
        }
    }

    let mut records: Vec<(ExtScalar, Vec<usize>)> = Vec::new();
    for k in 1..=rho {
        let f = divisors[k].div_exact(&divisors[k - 1])?;
        if f.degree().unwrap_or(0) == 0 {
            continue;
        }
        for (root, mult) in f.roots(tol)? {
            match records.iter_mut().find(|(v, _)| approx_eq(v, &root, tol)) {
                Some((_, sizes)) => sizes.push(mult),
                None => records.push((root, vec![mult])),
            }
        }
    }
    records
        .into_iter()
        .map(|(value, mut sizes)| {
            sizes.sort_unstable();
            Ok(EigRecord {
                value,
                signature: SizeSignature::new(sizes)?,
            })
        })
        .collect()
}

/// Monic gcd of all nonzero k x k minors; errors if every minor vanishes
/// (that would contradict `k <= rho`).
fn determinantal_divisor(
    entries: &[Vec<UniPoly>],
    m: usize,
    n: usize,
    k: usize,
) -> Result<UniPoly> {
    let mut acc: Option<UniPoly> = None;
    'outer: for rows in combinations(m, k) {
        for cols in combinations(n, k) {
            let sub: Vec<Vec<UniPoly>> = rows
                .iter()
                .map(|&j| cols.iter().map(|&c| entries[j][c].clone()).collect())
                .collect();
            let minor = poly_det(&sub);
            if minor.is_zero() {
                continue;
            }
            acc = Some(match acc {
                None => minor.monic(),
                Some(g) => g.gcd(&minor),
            });
            if acc.as_ref().is_some_and(|g| g.degree() == Some(0)) {
                break 'outer;
            }
        }
    }
    acc.ok_or_else(|| Error::Numerical("all minors vanished below the normal rank".into()))
}

fn poly_det(m: &[Vec<UniPoly>]) -> UniPoly {
    match m.len() {
        0 => UniPoly::one(),
        1 => m[0][0].clone(),
        _ => {
            let mut acc = UniPoly::zero();
            for (i, cell) in m[0].iter().enumerate() {
                if cell.is_zero() {
                    continue;
                }
                let sub: Vec<Vec<UniPoly>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(j, _)| j != i)
                            .map(|(_, v)| v.clone())
                            .collect()
                    })
                    .collect();
                let term = cell.mul(&poly_det(&sub));
                acc = if i % 2 == 0 {
                    acc.add(&term)
                } else {
                    acc.sub(&term)
                };
            }
            acc
        }
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
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
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// Finite eigenvalue candidates for approximate pencils: roots shared by the
/// determinant polynomials of two independent random compressions to the
/// normal rank. Every true eigenvalue drops the rank of `R + xS`, hence is a
/// root of both; spurious roots land at unrelated points.
fn finite_eigs_approx(p: &Pencil, rho: usize, tol: f64) -> Result<Vec<EigRecord>> {
    if rho == 0 {
        return Ok(Vec::new());
    }
    let cluster_tol = tol.max(1e-6);
    let match_tol = (10.0 * tol).max(1e-5);
    let first = projection_roots(p, rho, 0x5151);
    let second = projection_roots(p, rho, 0xa2a2);
    let first = cluster_complex(&first, cluster_tol);
    let second = cluster_complex(&second, cluster_tol);

    let mut candidates: Vec<Complex64> = Vec::new();
    for a in &first {
        for b in &second {
            if rel_close(*a, *b, match_tol) {
                candidates.push((a + b) / 2.0);
                break;
            }
        }
    }
    let candidates = cluster_complex(&candidates, match_tol);

    let mut records = Vec::new();
    for z in candidates {
        let sizes = weyr_sizes(p, &Scalar::Approx(z), rho, tol)?;
        if !sizes.is_empty() {
            records.push(EigRecord {
                value: ExtScalar::Finite(Scalar::Approx(z)),
                signature: SizeSignature::new(sizes)?,
            });
        }
    }
    Ok(records)
}

/// Roots of `det(U (R + tS) V)` for one seeded random compression `U, V`.
fn projection_roots(p: &Pencil, rho: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut random = |rows: usize, cols: usize| {
        nalgebra::DMatrix::<Complex64>::from_fn(rows, cols, |_, _| {
            Complex64::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0)
        })
    };
    let u = random(rho, p.rows());
    let v = random(p.cols(), rho);
    let qr = &u * p.r.to_complex_matrix() * &v;
    let qs = &u * p.s.to_complex_matrix() * &v;

    // the determinant has degree <= rho; interpolate it on roots of unity
    let nodes = rho + 1;
    let values: Vec<Complex64> = (0..nodes)
        .map(|j| {
            let angle = 2.0 * std::f64::consts::PI * j as f64 / nodes as f64;
            let t = Complex64::new(angle.cos(), angle.sin());
            (&qr + &qs * t).determinant()
        })
        .collect();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); nodes];
    for (k, c) in coeffs.iter_mut().enumerate() {
        for (j, v) in values.iter().enumerate() {
            let angle = -2.0 * std::f64::consts::PI * (j * k) as f64 / nodes as f64;
            *c += v * Complex64::new(angle.cos(), angle.sin());
        }
        *c /= nodes as f64;
    }
    // drop a numerically vanishing leading tail so near-infinite spurious
    // roots do not masquerade as finite candidates
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    while coeffs.last().is_some_and(|c| c.norm() < 1e-12 * scale) {
        coeffs.pop();
    }
    aberth_roots(&coeffs)
}

fn rel_close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * 1f64.max(a.norm()).max(b.norm())
}

fn cluster_complex(values: &[Complex64], tol: f64) -> Vec<Complex64> {
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    for &v in values {
        match clusters
            .iter_mut()
            .find(|(rep, count)| rel_close(*rep / *count as f64, v, tol))
        {
            Some((rep, count)) => {
                *rep += v;
                *count += 1;
            }
            None => clusters.push((v, 1)),
        }
    }
    clusters
        .into_iter()
        .map(|(sum, count)| sum / count as f64)
        .collect()
}
