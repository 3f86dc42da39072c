//! Integer homology from face orbits, and f-vector relations.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::skeleton::{face_index, FVector, Skeleton};
use crate::triangulation::{Triangulation, TriangulationError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error(transparent)]
    InvalidGluing(#[from] TriangulationError),
    #[error("{dim}-face orbit {orbit} is identified with itself under a non-trivial map")]
    InvalidFace { dim: usize, orbit: usize },
    #[error("boundary dimension {0} outside 1..=4")]
    DimensionOutOfRange(usize),
    #[error("vertex count must be at least 1")]
    ZeroVertices,
}

/// A sparse matrix of arbitrary-precision integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    // per row, sorted by column, no zeros stored
    data: Vec<Vec<(usize, BigInt)>>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            data: vec![Vec::new(); rows],
        }
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = IntegerMatrix::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for (c, v) in row.iter().enumerate() {
                m.set(r, c, v.clone().into());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> BigInt {
        assert!(r < self.rows && c < self.cols);
        let row = &self.data[r];
        match row.binary_search_by_key(&c, |e| e.0) {
            Ok(i) => row[i].1.clone(),
            Err(_) => BigInt::zero(),
        }
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        assert!(r < self.rows && c < self.cols);
        let row = &mut self.data[r];
        match row.binary_search_by_key(&c, |e| e.0) {
            Ok(i) if v.is_zero() => {
                row.remove(i);
            }
            Ok(i) => row[i].1 = v,
            Err(_) if v.is_zero() => {}
            Err(i) => row.insert(i, (c, v)),
        }
    }

    fn add_to(&mut self, r: usize, c: usize, v: i64) {
        let cur = self.get(r, c);
        self.set(r, c, cur + v);
    }

    /// Nonzero entries of row `r` as `(column, value)`.
    pub fn row_entries(&self, r: usize) -> &[(usize, BigInt)] {
        &self.data[r]
    }

    pub fn nonzero_count(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    pub fn transpose(&self) -> IntegerMatrix {
        let mut t = IntegerMatrix::zeros(self.cols, self.rows);
        for (r, row) in self.data.iter().enumerate() {
            for (c, v) in row {
                t.data[*c].push((r, v.clone()));
            }
        }
        t
    }

    pub fn mul(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = IntegerMatrix::zeros(self.rows, other.cols);
        for (r, row) in self.data.iter().enumerate() {
            let mut acc: std::collections::BTreeMap<usize, BigInt> = Default::default();
            for (k, a) in row {
                for (c, b) in &other.data[*k] {
                    *acc.entry(*c).or_insert_with(BigInt::zero) += a * b;
                }
            }
            out.data[r] = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        }
        out
    }

    /// Reorders rows and columns: new row `i` is old row `rows[i]`.
    pub fn permuted(&self, rows: &[usize], cols: &[usize]) -> IntegerMatrix {
        let mut inv = vec![0; self.cols];
        for (i, &c) in cols.iter().enumerate() {
            inv[c] = i;
        }
        let mut out = IntegerMatrix::zeros(self.rows, self.cols);
        for (i, &r) in rows.iter().enumerate() {
            let mut row: Vec<_> = self.data[r].iter().map(|(c, v)| (inv[*c], v.clone())).collect();
            row.sort_by_key(|e| e.0);
            out.data[i] = row;
        }
        out
    }
}

/// Invariant factors of a matrix: `d1 | d2 | ... | d_rank`, all positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub factors: Vec<BigInt>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Factors greater than one.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.factors.iter().filter(|d| !d.is_one()).cloned().collect()
    }
}

/// Smith normal form by sparse elimination on unit pivots followed by a
/// dense reduction of what remains.
pub fn smith_normal_form(m: &IntegerMatrix) -> SmithForm {
    let mut rows: Vec<Vec<(usize, BigInt)>> = m.data.clone();
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m.cols];
    for (r, row) in rows.iter().enumerate() {
        for (c, _) in row {
            col_rows[*c].insert(r);
        }
    }
    let mut row_alive = vec![true; m.rows];
    let mut units = 0usize;

    loop {
        // cheapest unit pivot: short row first, then short column
        let mut order: Vec<usize> = (0..m.rows)
            .filter(|&r| row_alive[r] && !rows[r].is_empty())
            .collect();
        order.sort_by_key(|&r| rows[r].len());
        let mut pivot = None;
        for &r in &order {
            let best = rows[r]
                .iter()
                .filter(|(_, v)| v.abs().is_one())
                .min_by_key(|(c, _)| col_rows[*c].len());
            if let Some((c, _)) = best {
                pivot = Some((r, *c));
                break;
            }
        }
        let Some((pr, pc)) = pivot else { break };
        let prow = std::mem::take(&mut rows[pr]);
        let pval = prow.iter().find(|e| e.0 == pc).unwrap().1.clone();
        let others: Vec<usize> = col_rows[pc].iter().copied().filter(|&r| r != pr).collect();
        for r in others {
            let a = rows[r].iter().find(|e| e.0 == pc).unwrap().1.clone();
            let factor = &a * &pval;
            let merged = axpy(&rows[r], &prow, &factor);
            for (c, _) in &rows[r] {
                col_rows[*c].remove(&r);
            }
            for (c, _) in &merged {
                col_rows[*c].insert(r);
            }
            rows[r] = merged;
        }
        for (c, _) in &prow {
            col_rows[*c].remove(&pr);
        }
        row_alive[pr] = false;
        units += 1;
    }

    // dense remainder
    let live_rows: Vec<usize> = (0..m.rows).filter(|&r| row_alive[r] && !rows[r].is_empty()).collect();
    let live_cols: Vec<usize> = (0..m.cols).filter(|&c| !col_rows[c].is_empty()).collect();
    let mut col_pos = vec![usize::MAX; m.cols];
    for (i, &c) in live_cols.iter().enumerate() {
        col_pos[c] = i;
    }
    let mut dense: Vec<Vec<BigInt>> = live_rows
        .iter()
        .map(|&r| {
            let mut v = vec![BigInt::zero(); live_cols.len()];
            for (c, x) in &rows[r] {
                v[col_pos[*c]] = x.clone();
            }
            v
        })
        .collect();
    let mut diag = dense_diagonalize(&mut dense);
    let mut factors: Vec<BigInt> = vec![BigInt::one(); units];
    factors.append(&mut diag);
    normalize_diagonal(&mut factors);
    SmithForm { factors }
}

// a - factor * b, over sorted sparse rows
fn axpy(a: &[(usize, BigInt)], b: &[(usize, BigInt)], factor: &BigInt) -> Vec<(usize, BigInt)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, -(factor * &b[j].1)));
            j += 1;
        } else {
            let v = &a[i].1 - factor * &b[j].1;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

// Reduces to diagonal form; returns the nonzero diagonal (absolute values).
fn dense_diagonalize(a: &mut [Vec<BigInt>]) -> Vec<BigInt> {
    let nr = a.len();
    let nc = a.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    let mut t = 0;
    while t < nr.min(nc) {
        // smallest nonzero entry in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for (r, row) in a.iter().enumerate().skip(t) {
            for (c, v) in row.iter().enumerate().skip(t) {
                if !v.is_zero() && best.is_none_or(|(br, bc)| v.abs() < a[br][bc].abs()) {
                    best = Some((r, c));
                }
            }
        }
        let Some((br, bc)) = best else { break };
        a.swap(t, br);
        for row in a.iter_mut() {
            row.swap(t, bc);
        }
        loop {
            let p = a[t][t].clone();
            let mut again = false;
            for r in t + 1..nr {
                if a[r][t].is_zero() {
                    continue;
                }
                let q = a[r][t].div_floor(&p);
                for c in t..nc {
                    let d = &q * &a[t][c];
                    a[r][c] -= d;
                }
                if !a[r][t].is_zero() {
                    again = true;
                }
            }
            for c in t + 1..nc {
                if a[t][c].is_zero() {
                    continue;
                }
                let q = a[t][c].div_floor(&p);
                for row in a.iter_mut().skip(t) {
                    let d = &q * &row[t];
                    row[c] -= d;
                }
                if !a[t][c].is_zero() {
                    again = true;
                }
            }
            if !again {
                break;
            }
            // move the smallest remainder in row/column t to the pivot
            let mut best = (t, t);
            for r in t + 1..nr {
                if !a[r][t].is_zero() && a[r][t].abs() < a[best.0][best.1].abs() {
                    best = (r, t);
                }
            }
            for c in t + 1..nc {
                if !a[t][c].is_zero() && a[t][c].abs() < a[best.0][best.1].abs() {
                    best = (t, c);
                }
            }
            if best.0 != t {
                a.swap(t, best.0);
            }
            if best.1 != t {
                for row in a.iter_mut() {
                    row.swap(t, best.1);
                }
            }
        }
        out.push(a[t][t].abs());
        t += 1;
    }
    out
}

// Turns any diagonal into invariant factors: sort, then replace pairs
// (a, b) by (gcd, lcm) until each divides the next.
fn normalize_diagonal(d: &mut [BigInt]) {
    for x in d.iter_mut() {
        *x = x.abs();
    }
    let n = d.len();
    for i in 0..n {
        for j in i + 1..n {
            if !(&d[j] % &d[i]).is_zero() {
                let g = d[i].gcd(&d[j]);
                let l = d[i].lcm(&d[j]);
                d[i] = g;
                d[j] = l;
            }
        }
    }
}

fn sorted_vertices(emb: &crate::skeleton::FaceEmbedding, dim: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..=dim).map(|i| emb.vertices.apply(i)).collect();
    v.sort_unstable();
    v
}

// Sign of the permutation that sorts `seq`.
fn parity(seq: &[usize]) -> i64 {
    let mut inv = 0;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[j] < seq[i] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

// +1/-1 relating each orbit's internal vertex order to the ascending order
// of its least embedding (by pentachoron, then sorted vertex tuple).
fn orbit_orientations(skel: &Skeleton, dim: usize) -> Vec<i64> {
    skel.orbits(dim)
        .iter()
        .map(|o| {
            let least = o
                .embeddings
                .iter()
                .min_by_key(|e| (e.simplex, sorted_vertices(e, dim)))
                .expect("orbits are nonempty");
            let seq: Vec<usize> = (0..=dim).map(|i| least.vertices.apply(i)).collect();
            parity(&seq)
        })
        .collect()
}

fn check_faces(skel: &Skeleton) -> Result<(), InvariantError> {
    for dim in 0..4 {
        if let Some(orbit) = skel.orbits(dim).iter().position(|o| !o.valid) {
            return Err(InvariantError::InvalidFace { dim, orbit });
        }
    }
    Ok(())
}

/// The boundary map from `k`-orbits to `(k-1)`-orbits, `1 <= k <= 4`.
pub fn boundary_matrix(t: &Triangulation, k: usize) -> Result<IntegerMatrix, InvariantError> {
    let skel = Skeleton::compute(t)?;
    check_faces(&skel)?;
    boundary_from_skeleton(&skel, k)
}

fn boundary_from_skeleton(skel: &Skeleton, k: usize) -> Result<IntegerMatrix, InvariantError> {
    if !(1..=4).contains(&k) {
        return Err(InvariantError::DimensionOutOfRange(k));
    }
    let rows = skel.count(k - 1);
    let cols = skel.count(k);
    let row_orient = orbit_orientations(skel, k - 1);
    let col_reps: Vec<(usize, Vec<usize>, i64)> = if k == 4 {
        (0..cols).map(|p| (p, vec![0, 1, 2, 3, 4], 1)).collect()
    } else {
        skel.orbits(k)
            .iter()
            .map(|o| {
                let least = o
                    .embeddings
                    .iter()
                    .min_by_key(|e| (e.simplex, sorted_vertices(e, k)))
                    .expect("orbits are nonempty");
                (least.simplex, sorted_vertices(least, k), 1)
            })
            .collect()
    };
    let mut m = IntegerMatrix::zeros(rows, cols);
    for (col, (p, verts, eps)) in col_reps.iter().enumerate() {
        for i in 0..=k {
            let sub: Vec<usize> = verts.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v).collect();
            let mask = sub.iter().fold(0u8, |m, &v| m | (1 << v));
            let (row, emb) = skel.embedding_of(k - 1, *p, face_index(k - 1, mask));
            // position of each of our vertices in the orbit's own order
            let inv = emb.vertices.inverse();
            let seq: Vec<usize> = sub.iter().map(|&v| inv.apply(v)).collect();
            let sign = if i % 2 == 0 { 1 } else { -1 };
            m.add_to(row, col, sign * parity(&seq) * row_orient[row] * eps);
        }
    }
    Ok(m)
}

/// A finitely generated abelian group `Z^rank + Z/d1 + ...`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct HomologyGroup {
    pub rank: usize,
    pub torsion: Vec<BigInt>,
}

impl HomologyGroup {
    pub fn free(rank: usize) -> Self {
        HomologyGroup {
            rank,
            torsion: Vec::new(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// `H_0 .. H_4` with integer coefficients.
pub fn homology(t: &Triangulation) -> Result<Vec<HomologyGroup>, InvariantError> {
    let skel = Skeleton::compute(t)?;
    check_faces(&skel)?;
    homology_from_skeleton(&skel)
}

pub(crate) fn homology_from_skeleton(skel: &Skeleton) -> Result<Vec<HomologyGroup>, InvariantError> {
    // snf[k] for the map from dimension k to k-1, k = 1..=4
    let mut snf: Vec<Option<SmithForm>> = vec![None];
    for k in 1..=4 {
        snf.push(Some(smith_normal_form(&boundary_from_skeleton(skel, k)?)));
    }
    let rank = |k: usize| snf.get(k).and_then(Option::as_ref).map_or(0, SmithForm::rank);
    Ok((0..=4)
        .map(|k| HomologyGroup {
            rank: skel.count(k) - rank(k) - rank(k + 1),
            torsion: snf.get(k + 1).and_then(Option::as_ref).map_or(Vec::new(), SmithForm::torsion),
        })
        .collect())
}

/// Both relations `2f1 - 3f2 + 4f3 - 5f4 = 0` and `2f3 - 5f4 = 0`.
pub fn dehn_sommerville_check(fv: &FVector) -> bool {
    let [_, f1, f2, f3, f4] = fv.0.map(|x| x as i128);
    2 * f1 - 3 * f2 + 4 * f3 - 5 * f4 == 0 && 2 * f3 - 5 * f4 == 0
}

pub fn euler_check(fv: &FVector, expected: i64) -> bool {
    fv.euler_characteristic() == expected
}

/// Minimal size of a K3 triangulation with a given vertex count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundKind {
    pub f0: u64,
    pub bound: u64,
}

impl BoundKind {
    pub fn for_vertices(f0: u64) -> Result<Self, InvariantError> {
        Ok(BoundKind {
            f0,
            bound: k3_f4_lower_bound(f0)?,
        })
    }

    pub fn admits(&self, f4: u64) -> bool {
        f4 >= self.bound
    }
}

/// `max(0, 146 - 6 f0)`.
pub fn k3_f4_lower_bound(f0: u64) -> Result<u64, InvariantError> {
    if f0 == 0 {
        return Err(InvariantError::ZeroVertices);
    }
    Ok(146u64.saturating_sub(6 * f0))
}
