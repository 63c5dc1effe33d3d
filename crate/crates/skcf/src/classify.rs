//! Class tables for 2 x m x n systems: exhaustive enumeration of Kronecker
//! structures per dimension cell, the labeled registry of the 26 classes
//! reachable within 2 x 3 x n, representative synthesis, and a randomized
//! orbit checker.
//!
//! Enumeration works from the dimension bookkeeping alone: every structure
//! fitting an m x n pencil is generated, eigenvalue slots are filled with the
//! canonical anchors (valid because each enumerated structure has at most
//! three eigenvalues), and the zero structure is skipped since it describes
//! the zero state rather than a class. A structure counts as native to the
//! cell where its local ranks first fit; larger cells reach it again only by
//! zero-padding.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::canonical::{canonicalize, CanonicalForm, NormalizationMode};
use crate::error::{Error, Result};
use crate::kronecker::{build_pencil, EigRecord, KroneckerStructure, SizeSignature};
use crate::mat::Mat;
use crate::pencil::state_of_pencil;
use crate::scalar::{ExtScalar, Scalar};
use crate::state::{LocalOps, State};
use crate::DEFAULT_TOL;

/// One row of a class table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassEntry {
    pub label: String,
    pub dims: (usize, usize, usize),
    pub form: CanonicalForm,
    pub ket: String,
}

/// Outcome of a randomized orbit check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitReport {
    pub trials: usize,
    pub failures: usize,
    pub seed: u64,
    pub max_eig_deviation: f64,
}

fn fin(n: i64) -> ExtScalar {
    ExtScalar::from_int(n)
}

fn structure(
    h: usize,
    g: usize,
    eps: &[usize],
    nu: &[usize],
    eigs: &[(ExtScalar, &[usize])],
) -> KroneckerStructure {
    KroneckerStructure {
        h,
        g,
        eps: eps.to_vec(),
        nu: nu.to_vec(),
        eigs: eigs
            .iter()
            .map(|(value, sizes)| EigRecord {
                value: value.clone(),
                signature: SizeSignature::new(sizes.to_vec()).expect("registry signature"),
            })
            .collect(),
    }
}

/// The 26 table entries as (label, m, n, structure of the printed pencil).
fn printed_structures() -> Vec<(&'static str, usize, usize, KroneckerStructure)> {
    let inf = ExtScalar::Infinity;
    vec![
        (
            "ABC-1",
            2,
            2,
            structure(0, 0, &[], &[], &[(fin(0), &[1]), (fin(-1), &[1])]),
        ),
        (
            "A:BC-1",
            2,
            2,
            structure(0, 0, &[], &[], &[(fin(0), &[1, 1])]),
        ),
        ("ABC-2", 2, 2, structure(0, 0, &[], &[], &[(fin(0), &[2])])),
        ("AC:B", 2, 2, structure(1, 0, &[1], &[], &[])),
        ("AB:C", 2, 2, structure(0, 1, &[], &[1], &[])),
        (
            "A:B:C",
            2,
            2,
            structure(1, 1, &[], &[], &[(inf.clone(), &[1])]),
        ),
        ("ABC-3", 2, 3, structure(0, 0, &[1], &[], &[(fin(0), &[1])])),
        ("ABC-4", 2, 3, structure(0, 0, &[2], &[], &[])),
        ("ABC-5", 2, 4, structure(0, 0, &[1, 1], &[], &[])),
        ("ABC-6", 3, 2, structure(0, 0, &[], &[1], &[(fin(0), &[1])])),
        ("ABC-7", 3, 2, structure(0, 0, &[], &[2], &[])),
        (
            "ABC-8",
            3,
            3,
            structure(
                0,
                0,
                &[],
                &[],
                &[(fin(0), &[1]), (fin(-1), &[1]), (inf, &[1])],
            ),
        ),
        (
            "ABC-9",
            3,
            3,
            structure(0, 0, &[], &[], &[(fin(0), &[1, 1]), (fin(-1), &[1])]),
        ),
        (
            "A:BC-2",
            3,
            3,
            structure(0, 0, &[], &[], &[(fin(0), &[1, 1, 1])]),
        ),
        (
            "ABC-10",
            3,
            3,
            structure(0, 0, &[], &[], &[(fin(0), &[1, 2])]),
        ),
        (
            "ABC-11",
            3,
            3,
            structure(0, 0, &[], &[], &[(fin(0), &[2]), (fin(-1), &[1])]),
        ),
        ("ABC-12", 3, 3, structure(0, 0, &[], &[], &[(fin(0), &[3])])),
        ("ABC-13", 3, 3, structure(0, 0, &[1], &[1], &[])),
        (
            "ABC-14",
            3,
            4,
            structure(0, 0, &[1], &[], &[(fin(0), &[1, 1])]),
        ),
        (
            "ABC-15",
            3,
            4,
            structure(0, 0, &[1], &[], &[(fin(0), &[1]), (fin(-1), &[1])]),
        ),
        (
            "ABC-16",
            3,
            4,
            structure(0, 0, &[1], &[], &[(fin(0), &[2])]),
        ),
        (
            "ABC-17",
            3,
            4,
            structure(0, 0, &[2], &[], &[(fin(0), &[1])]),
        ),
        ("ABC-18", 3, 4, structure(0, 0, &[3], &[], &[])),
        (
            "ABC-19",
            3,
            5,
            structure(0, 0, &[1, 1], &[], &[(fin(0), &[1])]),
        ),
        ("ABC-20", 3, 5, structure(0, 0, &[1, 2], &[], &[])),
        ("ABC-21", 3, 6, structure(0, 0, &[1, 1, 1], &[], &[])),
    ]
}

/// Build the labeled registry: canonical form and display ket for each of
/// the 26 classes.
pub fn class_registry() -> Result<Vec<ClassEntry>> {
    printed_structures()
        .into_iter()
        .map(|(label, m, n, ks)| {
            let printed = state_of_pencil(&build_pencil(&ks)?);
            let form = canonicalize(&printed, DEFAULT_TOL, NormalizationMode::Restricted)?;
            Ok(ClassEntry {
                label: label.to_string(),
                dims: (2, m, n),
                form,
                ket: printed.ket_string(),
            })
        })
        .collect()
}

/// Look up a registry entry by its label.
pub fn find_label(label: &str) -> Result<ClassEntry> {
    class_registry()?
        .into_iter()
        .find(|e| e.label == label)
        .ok_or_else(|| Error::UnknownLabel(label.to_string()))
}

/// The canonical state representing a form: rebuild the pencil from the
/// structure and convert back to a state.
pub fn representative_state(form: &CanonicalForm) -> Result<State> {
    Ok(state_of_pencil(&build_pencil(&form.structure()?)?))
}

/// Re-embed a structure into a larger pencil by growing the zero block,
/// which is exactly what zero-padding the state does.
pub fn embed_structure(ks: &KroneckerStructure, m: usize, n: usize) -> Result<KroneckerStructure> {
    let (m0, n0) = ks.dims();
    if m < m0 || n < n0 {
        return Err(Error::DimensionMismatch(format!(
            "cannot embed a {m0}x{n0} structure into {m}x{n}"
        )));
    }
    let mut out = ks.clone();
    out.h += m - m0;
    out.g += n - n0;
    Ok(out)
}

/// The registry label of a form computed from an m x n pencil, if the
/// class is one of the 26 registered ones.
pub fn registry_label(cf: &CanonicalForm, dims: (usize, usize)) -> Option<String> {
    let registry = class_registry().ok()?;
    match_registry(&registry, cf, dims).map(str::to_string)
}

fn match_registry<'a>(
    registry: &'a [ClassEntry],
    cf: &CanonicalForm,
    dims: (usize, usize),
) -> Option<&'a str> {
    let (m, n) = dims;
    if cf.h > m || cf.g > n {
        return None;
    }
    let key = (m - cf.h, n - cf.g);
    registry
        .iter()
        .find(|e| {
            let f = &e.form;
            (e.dims.1 - f.h, e.dims.2 - f.g) == key
                && f.eps == cf.eps
                && f.nu == cf.nu
                && f.eta == cf.eta
                && f.xhat == cf.xhat
        })
        .map(|e| e.label.as_str())
}

/// Stable structural label for classes outside the registry, for example
/// `h0g0|e:1,1|n:|eigs:(1)@0`.
pub fn structural_label(cf: &CanonicalForm) -> String {
    let join = |xs: &[usize]| {
        xs.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    let mut eigs = Vec::new();
    let mut pos = 0;
    for group in &cf.eta {
        for _ in 0..group.count {
            eigs.push(format!("({})@{}", join(group.sig.sizes()), cf.xhat[pos]));
            pos += 1;
        }
    }
    format!(
        "h{}g{}|e:{}|n:{}|eigs:{}",
        cf.h,
        cf.g,
        join(&cf.eps),
        join(&cf.nu),
        eigs.join(",")
    )
}

/// All partitions of exactly `total` into non-decreasing positive parts.
fn partitions_exact(total: usize) -> Vec<Vec<usize>> {
    fn rec(total: usize, min: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if total == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in min..=total {
            prefix.push(part);
            rec(total - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, 1, &mut Vec::new(), &mut out);
    out
}

/// All non-decreasing positive partitions with sum at most `total`,
/// including the empty one.
fn partitions_up_to(total: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for t in 0..=total {
        out.extend(partitions_exact(t));
    }
    out
}

/// All multisets of size signatures with the given total of sizes, each
/// multiset listed in ascending signature order.
fn sig_multisets(total: usize) -> Vec<Vec<SizeSignature>> {
    fn rec(
        total: usize,
        min: Option<&SizeSignature>,
        prefix: &mut Vec<SizeSignature>,
        out: &mut Vec<Vec<SizeSignature>>,
    ) {
        if total == 0 {
            out.push(prefix.clone());
            return;
        }
        for t in 1..=total {
            for part in partitions_exact(t) {
                let sig = SizeSignature::new(part).expect("nonempty partition");
                if let Some(lo) = min {
                    if sig < *lo {
                        continue;
                    }
                }
                prefix.push(sig.clone());
                rec(total - t, Some(&sig), prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(total, None, &mut Vec::new(), &mut out);
    out
}

/// Assign the canonical anchor values to a multiset of signatures, dealing
/// anchors in the group order the canonical form will use.
fn anchored_eigs(sigs: &[SizeSignature]) -> Result<Vec<EigRecord>> {
    let mut groups: Vec<(SizeSignature, usize)> = Vec::new();
    for sig in sigs {
        match groups.iter_mut().find(|(s, _)| s == sig) {
            Some((_, count)) => *count += 1,
            None => groups.push((sig.clone(), 1)),
        }
    }
    groups.sort_by(|(sa, ca), (sb, cb)| ca.cmp(cb).then_with(|| sa.cmp(sb)));
    let anchors = [fin(0), fin(1), ExtScalar::Infinity];
    let mut eigs = Vec::new();
    let mut next = 0;
    for (sig, count) in groups {
        for _ in 0..count {
            if next >= anchors.len() {
                return Err(Error::InvalidStructure(
                    "more than three eigenvalues cannot take anchor values".into(),
                ));
            }
            eigs.push(EigRecord {
                value: anchors[next].clone(),
                signature: sig.clone(),
            });
            next += 1;
        }
    }
    eigs.sort_by(|a, b| a.value.cstar_cmp(&b.value));
    Ok(eigs)
}

/// Enumerate every Kronecker structure whose blocks fill an m x n pencil,
/// excluding the zero structure. With `include_degenerate` false, only
/// structures with full B and C local ranks (no zero block) are kept.
/// Cells admitting four or more distinct eigenvalues hold infinite families
/// and are rejected.
pub fn enumerate_cell(
    m: usize,
    n: usize,
    include_degenerate: bool,
) -> Result<Vec<KroneckerStructure>> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidStructure(
            "pencil dimensions must be positive".into(),
        ));
    }
    let mut out = Vec::new();
    for h in 0..=m {
        for g in 0..=n {
            if !include_degenerate && (h > 0 || g > 0) {
                continue;
            }
            let rm = m - h;
            let rn = n - g;
            for eps in partitions_up_to(rm) {
                let eps_rows: usize = eps.iter().sum();
                let eps_cols = eps_rows + eps.len();
                if eps_cols > rn {
                    continue;
                }
                for nu in partitions_up_to(rm - eps_rows) {
                    let nu_cols: usize = nu.iter().sum();
                    let nu_rows = nu_cols + nu.len();
                    if nu_rows > rm - eps_rows || nu_cols > rn - eps_cols {
                        continue;
                    }
                    let t_rows = rm - eps_rows - nu_rows;
                    let t_cols = rn - eps_cols - nu_cols;
                    if t_rows != t_cols {
                        continue;
                    }
                    if t_rows == 0 {
                        if h == m && g == n {
                            continue;
                        }
                        out.push(KroneckerStructure {
                            h,
                            g,
                            eps: eps.clone(),
                            nu: nu.clone(),
                            eigs: Vec::new(),
                        });
                        continue;
                    }
                    for sigs in sig_multisets(t_rows) {
                        if sigs.len() > 3 {
                            return Err(Error::InfiniteFamilies(m, n));
                        }
                        out.push(KroneckerStructure {
                            h,
                            g,
                            eps: eps.clone(),
                            nu: nu.clone(),
                            eigs: anchored_eigs(&sigs)?,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

fn native_cell(ks: &KroneckerStructure) -> (usize, usize) {
    let (m, n) = ks.dims();
    ((m - ks.h).max(2), (n - ks.g).max(2))
}

fn entry_for(
    ks: &KroneckerStructure,
    m: usize,
    n: usize,
    registry: &[ClassEntry],
) -> Result<ClassEntry> {
    let rep = state_of_pencil(&build_pencil(ks)?);
    let form = canonicalize(&rep, DEFAULT_TOL, NormalizationMode::Restricted)?;
    let label = match_registry(registry, &form, (m, n))
        .map(str::to_string)
        .unwrap_or_else(|| structural_label(&form));
    Ok(ClassEntry {
        label,
        dims: (2, m, n),
        form,
        ket: rep.ket_string(),
    })
}

/// The classes of one dimension cell as labeled entries.
pub fn enumerate_classes(m: usize, n: usize, include_degenerate: bool) -> Result<Vec<ClassEntry>> {
    let registry = class_registry()?;
    enumerate_cell(m, n, include_degenerate)?
        .iter()
        .map(|ks| entry_for(ks, m, n, &registry))
        .collect()
}

/// The full class table for 2 x m' x n with m' up to `m`: every class is
/// listed once, at the cell its local ranks make native. For m = 3 this is
/// the complete 26-row table.
pub fn enumerate_all(m: usize) -> Result<Vec<ClassEntry>> {
    if m < 2 {
        return Err(Error::InvalidStructure(
            "class tables start at m = 2".into(),
        ));
    }
    let registry = class_registry()?;
    let mut out = Vec::new();
    for mm in 2..=m {
        for nn in 2..=(2 * mm) {
            for ks in enumerate_cell(mm, nn, true)? {
                if native_cell(&ks) != (mm, nn) {
                    continue;
                }
                out.push(entry_for(&ks, mm, nn, &registry)?);
            }
        }
    }
    Ok(out)
}

fn random_scalar(rng: &mut ChaCha8Rng) -> Scalar {
    let num = rng.gen_range(-9..=9);
    let den = loop {
        let d = rng.gen_range(-9..=9);
        if d != 0 {
            break d;
        }
    };
    Scalar::from_ratio(num, den)
}

fn random_invertible(rng: &mut ChaCha8Rng, k: usize) -> Result<Mat> {
    loop {
        let rows = (0..k)
            .map(|_| (0..k).map(|_| random_scalar(rng)).collect())
            .collect();
        let cand = Mat::from_rows(rows);
        if !cand.det_exact()?.is_zero() {
            return Ok(cand);
        }
    }
}

fn xhat_deviation(a: &[ExtScalar], b: &[ExtScalar]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut worst = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        let d = match (x, y) {
            (ExtScalar::Infinity, ExtScalar::Infinity) => 0.0,
            (ExtScalar::Finite(p), ExtScalar::Finite(q)) => {
                (p.to_complex() - q.to_complex()).norm()
            }
            _ => f64::INFINITY,
        };
        worst = worst.max(d);
    }
    worst
}

/// Apply `trials` random invertible local operations with small rational
/// entries and count how often the canonical form moves. Any nonzero failure
/// count indicates a bug, since canonical forms are SLOCC invariants.
pub fn orbit_check(s: &State, trials: usize, seed: u64, tol: f64) -> Result<OrbitReport> {
    if trials == 0 {
        return Err(Error::InvalidStructure(
            "orbit check needs at least one trial".into(),
        ));
    }
    let base = canonicalize(s, tol, NormalizationMode::Restricted)?;
    let (_, m, n) = s.dims();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    let mut max_dev = 0.0f64;
    for _ in 0..trials {
        let ops = LocalOps::new(
            random_invertible(&mut rng, 2)?,
            random_invertible(&mut rng, m)?,
            random_invertible(&mut rng, n)?,
        )?;
        let form = canonicalize(
            &s.apply_local_ops(&ops)?,
            tol,
            NormalizationMode::Restricted,
        )?;
        if !form.agrees_with(&base, tol) {
            failures += 1;
        }
        max_dev = max_dev.max(xhat_deviation(&form.xhat, &base.xhat));
    }
    Ok(OrbitReport {
        trials,
        failures,
        seed,
        max_eig_deviation: max_dev,
    })
}
