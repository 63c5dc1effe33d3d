//! The full canonical form: ordered block data plus normalized eigenvalues.
//!
//! Two states are SLOCC-equivalent exactly when their canonical forms agree,
//! so everything here is about making the form deterministic: size
//! signatures are grouped and ordered, eigenvalues are arranged by a fixed
//! total order on the extended complex plane, and the eigenvalue sequence is
//! pushed through the fractional linear transformation that minimizes it.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kronecker::{kronecker_structure, EigRecord, KroneckerStructure, SizeSignature};
use crate::moebius::Lft;
use crate::pencil::pencil_of_state;
use crate::scalar::{approx_eq, snap_to_gauss_rational, ExtScalar, Scalar};
use crate::state::State;

/// Denominator bound when snapping approximate eigenvalues before ordering.
const SNAP_DEN: u64 = 64;

/// Which triples are tried when normalizing four or more eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizationMode {
    /// Only triples positionwise of the same type as the first three.
    Restricted,
    /// Every ordered triple of distinct eigenvalues.
    AllTriples,
}

impl NormalizationMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            NormalizationMode::Restricted => "restricted",
            NormalizationMode::AllTriples => "all-triples",
        }
    }
}

impl fmt::Display for NormalizationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NormalizationMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "restricted" => Ok(NormalizationMode::Restricted),
            "all-triples" => Ok(NormalizationMode::AllTriples),
            other => Err(Error::InvalidStructure(format!(
                "unknown normalization mode `{other}`"
            ))),
        }
    }
}

/// One group of the signature sequence: a signature and how many distinct
/// eigenvalues carry it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtaGroup {
    pub sig: SizeSignature,
    pub count: usize,
}

/// Settings recorded alongside a canonical form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub mode: NormalizationMode,
    pub tol: f64,
    pub snapped: bool,
}

/// The state Kronecker canonical form: a complete SLOCC invariant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonicalForm {
    pub h: usize,
    pub g: usize,
    pub eps: Vec<usize>,
    pub nu: Vec<usize>,
    pub eta: Vec<EtaGroup>,
    pub xhat: Vec<ExtScalar>,
    pub meta: Meta,
}

impl CanonicalForm {
    /// The eigenvalue count `r`.
    pub fn r(&self) -> usize {
        self.xhat.len()
    }

    /// Rebuild the Kronecker structure whose pencil represents this form,
    /// pairing each normalized eigenvalue with its group's signature.
    pub fn structure(&self) -> Result<KroneckerStructure> {
        let mut eigs = Vec::with_capacity(self.xhat.len());
        let mut pos = 0;
        for group in &self.eta {
            for _ in 0..group.count {
                let value = self
                    .xhat
                    .get(pos)
                    .ok_or_else(|| Error::InvalidStructure("xhat shorter than eta counts".into()))?
                    .clone();
                eigs.push(EigRecord {
                    value,
                    signature: group.sig.clone(),
                });
                pos += 1;
            }
        }
        if pos != self.xhat.len() {
            return Err(Error::InvalidStructure(
                "xhat longer than eta counts".into(),
            ));
        }
        let ks = KroneckerStructure {
            h: self.h,
            g: self.g,
            eps: self.eps.clone(),
            nu: self.nu.clone(),
            eigs,
        };
        ks.validate()?;
        Ok(ks)
    }

    /// Equality as canonical forms: discrete data exactly, eigenvalues within
    /// `tol`. Metadata is not compared.
    pub fn agrees_with(&self, other: &CanonicalForm, tol: f64) -> bool {
        self.h == other.h
            && self.g == other.g
            && self.eps == other.eps
            && self.nu == other.nu
            && self.eta == other.eta
            && self.xhat.len() == other.xhat.len()
            && self
                .xhat
                .iter()
                .zip(&other.xhat)
                .all(|(a, b)| approx_eq(a, b, tol))
    }
}

/// Group eigenvalue records into the signature sequence and arrange the
/// values accordingly: groups ordered by ascending count then graded-lex
/// signature, values inside a group ascending in the `C*` order.
pub fn order_signatures(eigs: &[EigRecord]) -> (Vec<EtaGroup>, Vec<ExtScalar>) {
    let mut groups: Vec<(SizeSignature, Vec<ExtScalar>)> = Vec::new();
    for rec in eigs {
        match groups.iter_mut().find(|(sig, _)| *sig == rec.signature) {
            Some((_, vals)) => vals.push(rec.value.clone()),
            None => groups.push((rec.signature.clone(), vec![rec.value.clone()])),
        }
    }
    groups.sort_by(|(sa, va), (sb, vb)| va.len().cmp(&vb.len()).then_with(|| sa.cmp(sb)));
    let mut eta = Vec::with_capacity(groups.len());
    let mut x = Vec::new();
    for (sig, mut vals) in groups {
        vals.sort_by(|a, b| a.cstar_cmp(b));
        eta.push(EtaGroup {
            sig,
            count: vals.len(),
        });
        x.extend(vals);
    }
    (eta, x)
}

/// Sort a sequence within each group of the signature sequence, preserving
/// group boundaries.
pub fn eta_ordered(y: &[ExtScalar], eta: &[EtaGroup], tol: f64) -> Result<Vec<ExtScalar>> {
    let expected: usize = eta.iter().map(|g| g.count).sum();
    if y.len() != expected {
        return Err(Error::DimensionMismatch(format!(
            "sequence of length {} against groups totalling {expected}",
            y.len()
        )));
    }
    let mut out = Vec::with_capacity(y.len());
    let mut pos = 0;
    for group in eta {
        let mut chunk: Vec<ExtScalar> = y[pos..pos + group.count].to_vec();
        // selection sort under the tolerant comparison; the comparison is not
        // a strict total order, which the standard sorts are allowed to reject
        for i in 0..chunk.len() {
            let mut least = i;
            for j in (i + 1)..chunk.len() {
                if fuzzy_cstar_cmp(&chunk[j], &chunk[least], tol) == Ordering::Less {
                    least = j;
                }
            }
            chunk.swap(i, least);
        }
        out.extend(chunk);
        pos += group.count;
    }
    Ok(out)
}

/// True iff the two triples have positionwise equal size signatures, looked
/// up among the given eigenvalue records.
pub fn same_type(
    u: &[ExtScalar; 3],
    v: &[ExtScalar; 3],
    eigs: &[EigRecord],
    tol: f64,
) -> Result<bool> {
    let sig_of = |value: &ExtScalar| -> Result<&SizeSignature> {
        eigs.iter()
            .find(|rec| approx_eq(&rec.value, value, tol))
            .map(|rec| &rec.signature)
            .ok_or(Error::UnknownEigenvalue)
    };
    for i in 0..3 {
        if sig_of(&u[i])? != sig_of(&v[i])? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Order on `C*` that treats values within `tol` of each other as equal and
/// breaks real-part ties by imaginary part. Rounding noise in the real part
/// of a conjugate pair must not decide comparisons, otherwise two runs of the
/// same computation can pick different minima.
fn fuzzy_cstar_cmp(a: &ExtScalar, b: &ExtScalar, tol: f64) -> Ordering {
    if approx_eq(a, b, tol) {
        return Ordering::Equal;
    }
    match (a, b) {
        (ExtScalar::Infinity, _) => Ordering::Greater,
        (_, ExtScalar::Infinity) => Ordering::Less,
        (ExtScalar::Finite(p), ExtScalar::Finite(q)) => {
            let x = p.to_complex();
            let y = q.to_complex();
            let scale = 1f64.max(x.norm()).max(y.norm());
            if (x.re - y.re).abs() <= tol * scale {
                x.im.total_cmp(&y.im)
            } else {
                x.re.total_cmp(&y.re)
            }
        }
    }
}

fn seq_cmp(a: &[ExtScalar], b: &[ExtScalar], tol: f64) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match fuzzy_cstar_cmp(x, y, tol) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

fn anchors() -> [ExtScalar; 3] {
    [
        ExtScalar::from_int(0),
        ExtScalar::from_int(1),
        ExtScalar::Infinity,
    ]
}

/// Normalize an eta-ordered eigenvalue sequence: up to three eigenvalues are
/// sent to the anchor prefix of `(0, 1, inf)`; for more, the minimum over
/// candidate transformed sequences is taken. Eigenvalues must be pairwise
/// distinct at resolution `tol`.
pub fn normalize_eigenvalues(
    x: &[ExtScalar],
    eta: &[EtaGroup],
    mode: NormalizationMode,
    tol: f64,
) -> Result<Vec<ExtScalar>> {
    let r = x.len();
    for i in 0..r {
        for j in (i + 1)..r {
            if approx_eq(&x[i], &x[j], tol) {
                return Err(Error::RepeatedPoint);
            }
        }
    }
    if r <= 3 {
        return Ok(anchors()[..r].to_vec());
    }

    // signature of each position, flattened from the groups
    let mut sig_at = Vec::with_capacity(r);
    for group in eta {
        for _ in 0..group.count {
            sig_at.push(&group.sig);
        }
    }
    if sig_at.len() != r {
        return Err(Error::DimensionMismatch(
            "eigenvalue sequence does not match signature groups".into(),
        ));
    }

    let mut best: Option<Vec<ExtScalar>> = None;
    for a in 0..r {
        for b in 0..r {
            for c in 0..r {
                if a == b || a == c || b == c {
                    continue;
                }
                if mode == NormalizationMode::Restricted
                    && (sig_at[a] != sig_at[0] || sig_at[b] != sig_at[1] || sig_at[c] != sig_at[2])
                {
                    continue;
                }
                let th = Lft::from_three_points(
                    &[x[a].clone(), x[b].clone(), x[c].clone()],
                    &anchors(),
                )?;
                // the chosen points land on the anchors by construction; set
                // them directly so rounding at the pole cannot turn the third
                // image into a huge finite value
                let anchor = anchors();
                let mapped: Vec<ExtScalar> = x
                    .iter()
                    .enumerate()
                    .map(|(i, v)| {
                        if i == a {
                            anchor[0].clone()
                        } else if i == b {
                            anchor[1].clone()
                        } else if i == c {
                            anchor[2].clone()
                        } else {
                            th.apply(v)
                        }
                    })
                    .collect();
                let candidate = eta_ordered(&mapped, eta, tol)?;
                let better = match &best {
                    Some(cur) => seq_cmp(&candidate, cur, tol) == Ordering::Less,
                    None => true,
                };
                if better {
                    best = Some(candidate);
                }
            }
        }
    }
    best.ok_or_else(|| Error::InvalidStructure("no candidate triple".into()))
}

/// Snap approximate eigenvalues to nearby small Gaussian rationals, provided
/// the snapped values stay pairwise distinct. Returns whether anything moved.
fn snap_eigenvalues(eigs: &mut [EigRecord], tol: f64) -> bool {
    let mut proposal: Vec<ExtScalar> = Vec::with_capacity(eigs.len());
    let mut moved = false;
    for rec in eigs.iter() {
        match &rec.value {
            ExtScalar::Finite(Scalar::Approx(z)) => {
                match snap_to_gauss_rational(*z, tol, SNAP_DEN) {
                    Some(snapped) => {
                        moved = true;
                        proposal.push(ExtScalar::Finite(Scalar::Exact(snapped)));
                    }
                    None => proposal.push(rec.value.clone()),
                }
            }
            other => proposal.push(other.clone()),
        }
    }
    if !moved {
        return false;
    }
    for i in 0..proposal.len() {
        for j in (i + 1)..proposal.len() {
            if proposal[i].cstar_cmp(&proposal[j]) == Ordering::Equal {
                return false;
            }
        }
    }
    for (rec, value) in eigs.iter_mut().zip(proposal) {
        rec.value = value;
    }
    true
}

/// Compute the canonical form of a state.
pub fn canonicalize(s: &State, tol: f64, mode: NormalizationMode) -> Result<CanonicalForm> {
    let mut ks = kronecker_structure(&pencil_of_state(s), tol)?;
    let snapped = snap_eigenvalues(&mut ks.eigs, tol);
    if snapped {
        ks.eigs.sort_by(|a, b| a.value.cstar_cmp(&b.value));
    }
    let (eta, x) = order_signatures(&ks.eigs);
    let xhat = normalize_eigenvalues(&x, &eta, mode, tol)?;
    Ok(CanonicalForm {
        h: ks.h,
        g: ks.g,
        eps: ks.eps,
        nu: ks.nu,
        eta,
        xhat,
        meta: Meta { mode, tol, snapped },
    })
}

/// Decide SLOCC equivalence by comparing canonical forms. States may differ
/// in the party C dimension; the smaller is padded with zero columns.
pub fn equivalent(s1: &State, s2: &State, tol: f64, mode: NormalizationMode) -> Result<bool> {
    let (_, m1, n1) = s1.dims();
    let (_, m2, n2) = s2.dims();
    if m1 != m2 {
        return Err(Error::Incomparable(format!(
            "party B dimensions {m1} and {m2} differ"
        )));
    }
    let n = n1.max(n2);
    let f1 = canonicalize(&s1.pad_c(n)?, tol, mode)?;
    let f2 = canonicalize(&s2.pad_c(n)?, tol, mode)?;
    Ok(f1.agrees_with(&f2, tol))
}
