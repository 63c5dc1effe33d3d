//! Tripartite pure states in `2 x m x n` and local (SLOCC) operations.
//!
//! States are sparse amplitude tensors over the scalar tower, never
//! normalized: global factors are irrelevant to the classification. The
//! canonical sorted amplitude order makes serialization deterministic.

use std::collections::BTreeMap;

use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::scalar::Scalar;

/// A pure state of a qubit and two parties of dimensions `m` and `n`,
/// stored as its nonzero amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    m: usize,
    n: usize,
    amps: BTreeMap<(usize, usize, usize), Scalar>,
}

impl State {
    pub fn new(
        m: usize,
        n: usize,
        amps: impl IntoIterator<Item = ((usize, usize, usize), Scalar)>,
    ) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::DimensionMismatch(
                "state dimensions must be positive".into(),
            ));
        }
        let mut map = BTreeMap::new();
        for ((i, j, k), v) in amps {
            if i >= 2 || j >= m || k >= n {
                return Err(Error::DimensionMismatch(format!(
                    "amplitude index ({i},{j},{k}) out of range for 2x{m}x{n}"
                )));
            }
            if v.is_zero() {
                continue;
            }
            if map.insert((i, j, k), v).is_some() {
                return Err(Error::DimensionMismatch(format!(
                    "duplicate amplitude index ({i},{j},{k})"
                )));
            }
        }
        Ok(State { m, n, amps: map })
    }

    pub fn zero(m: usize, n: usize) -> Self {
        State::new(m, n, []).expect("positive dimensions")
    }

    /// Unit-amplitude superposition of the given basis kets.
    pub fn from_kets(m: usize, n: usize, kets: &[(usize, usize, usize)]) -> Result<Self> {
        State::new(m, n, kets.iter().map(|&idx| (idx, Scalar::one())))
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (2, self.m, self.n)
    }

    pub fn amp(&self, i: usize, j: usize, k: usize) -> Scalar {
        self.amps
            .get(&(i, j, k))
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    pub fn amps(&self) -> impl Iterator<Item = (&(usize, usize, usize), &Scalar)> {
        self.amps.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.amps.values().all(Scalar::is_exact)
    }

    /// Embed into `2 x m x n_new` by appending zero columns on party C.
    pub fn pad_c(&self, n_new: usize) -> Result<State> {
        if n_new < self.n {
            return Err(Error::DimensionMismatch(format!(
                "cannot shrink party C from {} to {n_new}",
                self.n
            )));
        }
        State::new(
            self.m,
            n_new,
            self.amps.iter().map(|(&idx, v)| (idx, v.clone())),
        )
    }

    /// Apply `A (x) B (x) C` by direct tensor contraction.
    pub fn apply_local_ops(&self, ops: &LocalOps) -> Result<State> {
        ops.check_shapes(self.m, self.n)?;
        let mut out: BTreeMap<(usize, usize, usize), Scalar> = BTreeMap::new();
        for (&(i, j, k), v) in &self.amps {
            for ti in 0..2 {
                let fa = ops.a.at(ti, i);
                if fa.is_zero() {
                    continue;
                }
                for tj in 0..self.m {
                    let fab = fa * ops.b.at(tj, j);
                    if fab.is_zero() {
                        continue;
                    }
                    for tk in 0..self.n {
                        let fc = ops.c.at(tk, k);
                        if fc.is_zero() {
                            continue;
                        }
                        let term = &(&fab * fc) * v;
                        out.entry((ti, tj, tk))
                            .and_modify(|acc| *acc = &*acc + &term)
                            .or_insert(term);
                    }
                }
            }
        }
        out.retain(|_, v| !v.is_zero());
        Ok(State {
            m: self.m,
            n: self.n,
            amps: out,
        })
    }

    /// Ranks of the three single-party matricizations.
    pub fn local_ranks(&self, tol: f64) -> (usize, usize, usize) {
        let (m, n) = (self.m, self.n);
        let mut ma = Mat::zeros(2, m * n);
        let mut mb = Mat::zeros(m, 2 * n);
        let mut mc = Mat::zeros(n, 2 * m);
        for (&(i, j, k), v) in &self.amps {
            ma.set(i, j * n + k, v.clone());
            mb.set(j, i * n + k, v.clone());
            mc.set(k, i * m + j, v.clone());
        }
        (ma.rank(tol), mb.rank(tol), mc.rank(tol))
    }

    /// Bra-ket display string, e.g. `|001> + |100> + |112>`.
    pub fn ket_string(&self) -> String {
        if self.amps.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (&(i, j, k), v) in &self.amps {
            let ket = if self.m <= 10 && self.n <= 10 {
                format!("|{i}{j}{k}>")
            } else {
                format!("|{i},{j},{k}>")
            };
            let term = render_term(v, &ket);
            if out.is_empty() {
                out = term;
            } else if let Some(rest) = term.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(&term);
            }
        }
        out
    }
}

fn render_term(coeff: &Scalar, ket: &str) -> String {
    if *coeff == Scalar::one() {
        return ket.to_string();
    }
    if *coeff == Scalar::from_int(-1) {
        return format!("-{ket}");
    }
    let text = coeff.to_string();
    let needs_parens = text[1..].contains(['+', '-']) || text.ends_with('i');
    if needs_parens {
        format!("({text}){ket}")
    } else {
        format!("{text}{ket}")
    }
}

/// An invertible local operator triple acting as `A (x) B (x) C`.
#[derive(Clone, Debug)]
pub struct LocalOps {
    pub a: Mat,
    pub b: Mat,
    pub c: Mat,
}

impl LocalOps {
    pub fn new(a: Mat, b: Mat, c: Mat) -> Result<Self> {
        let ops = LocalOps { a, b, c };
        for (name, f) in [("A", &ops.a), ("B", &ops.b), ("C", &ops.c)] {
            if f.rows() != f.cols() {
                return Err(Error::DimensionMismatch(format!(
                    "local operator {name} must be square"
                )));
            }
            let singular = if f.is_exact() {
                f.det_exact()?.is_zero()
            } else {
                f.rank(1e-14) < f.rows()
            };
            if singular {
                return Err(Error::Singular("local operator"));
            }
        }
        Ok(ops)
    }

    pub fn identity(m: usize, n: usize) -> Self {
        LocalOps {
            a: Mat::identity(2),
            b: Mat::identity(m),
            c: Mat::identity(n),
        }
    }

    fn check_shapes(&self, m: usize, n: usize) -> Result<()> {
        if self.a.rows() != 2 || self.b.rows() != m || self.c.rows() != n {
            return Err(Error::DimensionMismatch(format!(
                "local operators ({}, {}, {}) do not match state 2x{m}x{n}",
                self.a.rows(),
                self.b.rows(),
                self.c.rows()
            )));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct RawAmp {
    i: [usize; 3],
    #[serde(flatten)]
    value: Scalar,
}

#[derive(Serialize, Deserialize)]
struct RawState {
    dims: [usize; 3],
    amps: Vec<RawAmp>,
}

impl Serialize for State {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let raw = RawState {
            dims: [2, self.m, self.n],
            amps: self
                .amps
                .iter()
                .map(|(&(i, j, k), v)| RawAmp {
                    i: [i, j, k],
                    value: v.clone(),
                })
                .collect(),
        };
        raw.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for State {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawState::deserialize(deserializer)?;
        if raw.dims[0] != 2 {
            return Err(D::Error::custom("first dimension must be 2"));
        }
        State::new(
            raw.dims[1],
            raw.dims[2],
            raw.amps
                .into_iter()
                .map(|a| ((a.i[0], a.i[1], a.i[2]), a.value)),
        )
        .map_err(D::Error::custom)
    }
}
