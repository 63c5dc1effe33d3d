//! Fixtures for the pipeline benchmarks: registry representatives and
//! deterministic orbit pairs built from integer shears.

use skcf::{find_label, representative_state, LocalOps, Mat, Scalar, State};

/// The canonical representative of a registered class.
pub fn representative(label: &str) -> State {
    let entry = find_label(label).expect("registered label");
    representative_state(&entry.form).expect("representative exists")
}

/// Unit upper shear with ones on the first superdiagonal.
fn shear(k: usize) -> Mat {
    let mut rows = vec![vec![Scalar::zero(); k]; k];
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] = Scalar::one();
        if i + 1 < k {
            row[i + 1] = Scalar::from_int(2);
        }
    }
    Mat::from_rows(rows)
}

/// A representative together with a deterministic image on its orbit.
pub fn shear_pair(label: &str) -> (State, State) {
    let s = representative(label);
    let (_, m, n) = s.dims();
    let ops = LocalOps::new(shear(2), shear(m), shear(n)).expect("shapes match");
    let moved = s.apply_local_ops(&ops).expect("dimensions agree");
    (s, moved)
}
