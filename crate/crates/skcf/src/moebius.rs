//! Fractional linear transformations on the extended complex plane.
//!
//! Local operations on the qubit party move pencil eigenvalues by a Moebius
//! map, so canonicalization needs to build the map sending one triple of
//! points to another and to push eigenvalues through it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{ExtScalar, Scalar};

/// The map `x -> (a x + b) / (c x + d)` with `ad - bc != 0`, stored with the
/// first nonzero coefficient scaled to one so equal maps compare equal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lft {
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
    pub d: Scalar,
}

impl Lft {
    pub fn new(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> Result<Self> {
        let det = &(&a * &d) - &(&b * &c);
        if det.is_zero() {
            return Err(Error::Singular("fractional linear transformation"));
        }
        let lead = [&a, &b, &c, &d]
            .into_iter()
            .find(|v| !v.is_zero())
            .expect("nonsingular map has a nonzero coefficient")
            .clone();
        let inv = lead.inv()?;
        Ok(Lft {
            a: &a * &inv,
            b: &b * &inv,
            c: &c * &inv,
            d: &d * &inv,
        })
    }

    pub fn identity() -> Self {
        Lft {
            a: Scalar::one(),
            b: Scalar::zero(),
            c: Scalar::zero(),
            d: Scalar::one(),
        }
    }

    pub fn apply(&self, x: &ExtScalar) -> ExtScalar {
        match x {
            ExtScalar::Infinity => {
                if self.c.is_zero() {
                    ExtScalar::Infinity
                } else {
                    ExtScalar::Finite(&self.a / &self.c)
                }
            }
            ExtScalar::Finite(v) => {
                let num = &(&self.a * v) + &self.b;
                let den = &(&self.c * v) + &self.d;
                if den.is_zero() {
                    ExtScalar::Infinity
                } else {
                    ExtScalar::Finite(&num / &den)
                }
            }
        }
    }

    /// The composition `self . other`, applying `other` first.
    pub fn compose(&self, other: &Lft) -> Lft {
        Lft::new(
            &(&self.a * &other.a) + &(&self.b * &other.c),
            &(&self.a * &other.b) + &(&self.b * &other.d),
            &(&self.c * &other.a) + &(&self.d * &other.c),
            &(&self.c * &other.b) + &(&self.d * &other.d),
        )
        .expect("composition of invertible maps is invertible")
    }

    pub fn inverse(&self) -> Lft {
        Lft::new(self.d.clone(), -&self.b, -&self.c, self.a.clone())
            .expect("inverse of an invertible map")
    }

    /// The unique map with `x[i] -> y[i]` for three distinct source points
    /// and three distinct targets.
    pub fn from_three_points(x: &[ExtScalar; 3], y: &[ExtScalar; 3]) -> Result<Lft> {
        let sx = to_standard_triple(x)?;
        let sy = to_standard_triple(y)?;
        Ok(sy.inverse().compose(&sx))
    }
}

/// The map sending `(x1, x2, x3)` to `(0, 1, inf)`, via the cross ratio.
fn to_standard_triple(x: &[ExtScalar; 3]) -> Result<Lft> {
    for i in 0..3 {
        for j in (i + 1)..3 {
            if x[i] == x[j] {
                return Err(Error::RepeatedPoint);
            }
        }
    }
    let fin = |v: &ExtScalar| v.as_finite().cloned();
    let (a, b, c, d) = match (fin(&x[0]), fin(&x[1]), fin(&x[2])) {
        (Some(x1), Some(x2), Some(x3)) => {
            let p = &x2 - &x3;
            let q = &x2 - &x1;
            (p.clone(), -&(&x1 * &p), q.clone(), -&(&x3 * &q))
        }
        (None, Some(x2), Some(x3)) => (Scalar::zero(), &x2 - &x3, Scalar::one(), -&x3),
        (Some(x1), None, Some(x3)) => (Scalar::one(), -&x1, Scalar::one(), -&x3),
        (Some(x1), Some(x2), None) => (Scalar::one(), -&x1, Scalar::zero(), &x2 - &x1),
        _ => unreachable!("at most one infinity among distinct points"),
    };
    Lft::new(a, b, c, d)
}

/// The eigenvalue action induced by an invertible operation
/// `[[a00, a01], [a10, a11]]` on the qubit party.
pub fn lft_of_qubit_op(a00: &Scalar, a01: &Scalar, a10: &Scalar, a11: &Scalar) -> Result<Lft> {
    Lft::new(a00.clone(), -a01, -a10, a11.clone())
}
