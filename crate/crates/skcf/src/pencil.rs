//! Matrix pencils `mu R + lambda S` and the state-pencil bijection.
//!
//! The qubit slices of a `2 x m x n` state are the two `m x n` coefficient
//! matrices of its pencil: `R` holds the `|0jk>` amplitudes, `S` the `|1jk>`
//! amplitudes. Everything downstream (Kronecker structure, canonical form)
//! works on this pencil.

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::scalar::Scalar;
use crate::state::State;

/// The pencil `mu R + lambda S` of two equally shaped matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct Pencil {
    pub r: Mat,
    pub s: Mat,
}

impl Pencil {
    pub fn new(r: Mat, s: Mat) -> Result<Self> {
        if r.rows() != s.rows() || r.cols() != s.cols() {
            return Err(Error::DimensionMismatch(format!(
                "pencil parts {}x{} vs {}x{}",
                r.rows(),
                r.cols(),
                s.rows(),
                s.cols()
            )));
        }
        Ok(Pencil { r, s })
    }

    pub fn zero(m: usize, n: usize) -> Self {
        Pencil {
            r: Mat::zeros(m, n),
            s: Mat::zeros(m, n),
        }
    }

    pub fn rows(&self) -> usize {
        self.r.rows()
    }

    pub fn cols(&self) -> usize {
        self.r.cols()
    }

    pub fn is_exact(&self) -> bool {
        self.r.is_exact() && self.s.is_exact()
    }

    /// The evaluation `R + t S` treated as a matrix over scalars.
    pub fn eval(&self, t: &Scalar) -> Mat {
        self.r.add(&self.s.scaled(t)).expect("equal shapes")
    }

    /// Text rendering with `mu` for R-entries and `lambda` for S-entries,
    /// e.g. the W-class pencil prints as rows `[l  m]`, `[.  l]`.
    pub fn pretty(&self) -> String {
        let cells: Vec<Vec<String>> = (0..self.rows())
            .map(|j| {
                (0..self.cols())
                    .map(|k| render_entry(self.r.at(j, k), self.s.at(j, k)))
                    .collect()
            })
            .collect();
        let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
        cells
            .iter()
            .map(|row| {
                let body = row
                    .iter()
                    .map(|c| format!("{c:>width$}"))
                    .collect::<Vec<_>>()
                    .join("  ");
                format!("[{body}]")
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

fn render_entry(r: &Scalar, s: &Scalar) -> String {
    let mut parts = Vec::new();
    for (coeff, sym) in [(r, "m"), (s, "l")] {
        if coeff.is_zero() {
            continue;
        }
        if *coeff == Scalar::one() {
            parts.push(sym.to_string());
        } else if *coeff == Scalar::from_int(-1) {
            parts.push(format!("-{sym}"));
        } else {
            parts.push(format!("({coeff}){sym}"));
        }
    }
    match parts.len() {
        0 => ".".to_string(),
        1 => parts.pop().unwrap(),
        _ => {
            let second = parts.pop().unwrap();
            let first = parts.pop().unwrap();
            if let Some(rest) = second.strip_prefix('-') {
                format!("{first}-{rest}")
            } else {
                format!("{first}+{second}")
            }
        }
    }
}

/// The pencil whose R and S parts are the two qubit slices of the state.
pub fn pencil_of_state(s: &State) -> Pencil {
    let (_, m, n) = s.dims();
    let mut pr = Mat::zeros(m, n);
    let mut ps = Mat::zeros(m, n);
    for (&(i, j, k), v) in s.amps() {
        match i {
            0 => pr.set(j, k, v.clone()),
            _ => ps.set(j, k, v.clone()),
        }
    }
    Pencil { r: pr, s: ps }
}

/// Inverse of [`pencil_of_state`].
pub fn state_of_pencil(p: &Pencil) -> State {
    let mut amps = Vec::new();
    for j in 0..p.rows() {
        for k in 0..p.cols() {
            for (i, part) in [(0, &p.r), (1, &p.s)] {
                let v = part.at(j, k);
                if !v.is_zero() {
                    amps.push(((i, j, k), v.clone()));
                }
            }
        }
    }
    State::new(p.rows(), p.cols(), amps).expect("indices from a valid pencil")
}

/// Both parts transposed; swaps the roles of the two non-qubit parties.
pub fn transpose_pencil(p: &Pencil) -> Pencil {
    Pencil {
        r: p.r.transpose(),
        s: p.s.transpose(),
    }
}
