//! Face orbits of a generalized triangulation.
//!
//! Every `d`-face of every simplex is identified with faces of neighbouring
//! simplices through the facet gluings; the equivalence classes are the
//! orbits counted by the f-vector. Orbits are discovered by a breadth-first
//! closure that also carries a vertex ordering for every embedding, so each
//! orbit knows how its own vertices `0..=d` sit inside each simplex.
//!
//! The closure is written once for any top dimension `n <= 4`, which lets
//! vertex, edge and triangle links (dimensions 3, 2, 1) reuse it.

use std::collections::VecDeque;
use std::fmt;
use std::sync::OnceLock;

use crate::perm::Perm5;
use crate::triangulation::{Gluing, Triangulation, TriangulationError};

/// Read access to simplex gluings, for any top dimension `n <= 4`.
pub(crate) trait Gluings {
    fn top_dim(&self) -> usize;
    fn simplex_count(&self) -> usize;
    fn adj(&self, simplex: usize, facet: usize) -> Option<Gluing>;
}

impl Gluings for Triangulation {
    fn top_dim(&self) -> usize {
        4
    }
    fn simplex_count(&self) -> usize {
        self.size()
    }
    #[inline]
    fn adj(&self, simplex: usize, facet: usize) -> Option<Gluing> {
        self.gluing(simplex, facet)
    }
}

/// Local faces of an `n`-simplex, per dimension `k < n`. Faces are vertex
/// bitmasks, listed in lexicographic order of their sorted vertex tuples,
/// except facets (`k = n-1`), which are listed by omitted vertex.
pub(crate) struct FaceTable {
    faces: Vec<Vec<u8>>,
    index: Vec<[u8; 32]>,
}

impl FaceTable {
    fn build(n: usize) -> FaceTable {
        let full: u8 = (1u8 << (n + 1)) - 1;
        let mut faces = Vec::new();
        let mut index = Vec::new();
        for k in 0..=n {
            let mut list: Vec<u8> = (1..=full)
                .filter(|m| m.count_ones() as usize == k + 1)
                .collect();
            if k + 1 == n && n > 0 {
                list = (0..=n).map(|omit| full & !(1 << omit)).collect();
            } else {
                list.sort_by_key(|&m| {
                    let mut v: Vec<u32> = (0..=n as u32).filter(|i| m & (1 << i) != 0).collect();
                    v.resize(5, 0);
                    v
                });
            }
            let mut idx = [u8::MAX; 32];
            for (i, &m) in list.iter().enumerate() {
                idx[m as usize] = i as u8;
            }
            faces.push(list);
            index.push(idx);
        }
        FaceTable { faces, index }
    }

    #[inline]
    pub(crate) fn faces(&self, k: usize) -> &[u8] {
        &self.faces[k]
    }

    #[inline]
    pub(crate) fn index(&self, k: usize, mask: u8) -> usize {
        self.index[k][mask as usize] as usize
    }
}

pub(crate) fn face_table(n: usize) -> &'static FaceTable {
    static TABLES: OnceLock<Vec<FaceTable>> = OnceLock::new();
    &TABLES.get_or_init(|| (0..=4).map(FaceTable::build).collect())[n]
}

/// Vertex mask of local `dim`-face number `local` of a pentachoron.
pub fn face_mask(dim: usize, local: usize) -> u8 {
    face_table(4).faces(dim)[local]
}

/// Local index of the `dim`-face of a pentachoron with the given vertex mask.
pub fn face_index(dim: usize, mask: u8) -> usize {
    face_table(4).index(dim, mask)
}

/// Number of local `dim`-faces of a pentachoron.
pub fn faces_per_pentachoron(dim: usize) -> usize {
    face_table(4).faces(dim).len()
}

/// Ascending face vertices at positions `0..=k`, then the remaining vertices
/// of the `n`-simplex in ascending order, then the unused labels fixed.
pub(crate) fn canonical_ordering(n: usize, mask: u8) -> Perm5 {
    let mut img = [0u8; 5];
    let mut pos = 0;
    for v in 0..=n as u8 {
        if mask & (1 << v) != 0 {
            img[pos] = v;
            pos += 1;
        }
    }
    for v in 0..=n as u8 {
        if mask & (1 << v) == 0 {
            img[pos] = v;
            pos += 1;
        }
    }
    for v in (n + 1) as u8..5 {
        img[pos] = v;
        pos += 1;
    }
    Perm5::from_images(img).expect("canonical ordering is a bijection")
}

/// One appearance of a face inside a top simplex. `vertices` sends the
/// orbit's own vertex `i` (for `i <= d`) to a vertex of the simplex; the
/// remaining positions list the opposite vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FaceEmbedding {
    pub simplex: usize,
    pub vertices: Perm5,
}

/// An equivalence class of local faces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceOrbit {
    pub embeddings: Vec<FaceEmbedding>,
    /// False if the face is identified with itself under a non-trivial
    /// permutation of its vertices.
    pub valid: bool,
    /// True if some facet containing the face is unglued.
    pub boundary: bool,
}

impl FaceOrbit {
    pub fn degree(&self) -> usize {
        self.embeddings.len()
    }
}

/// Face orbits of every dimension below the top one.
#[derive(Debug, Clone)]
pub(crate) struct FaceClasses {
    top: usize,
    simplices: usize,
    orbits: Vec<Vec<FaceOrbit>>,
    // per k: index s * faces_k + j -> (orbit, embedding index)
    lookup: Vec<Vec<(u32, u32)>>,
}

impl FaceClasses {
    pub(crate) fn compute<G: Gluings + ?Sized>(g: &G) -> FaceClasses {
        let n = g.top_dim();
        let table = face_table(n);
        let count = g.simplex_count();
        let mut orbits = Vec::with_capacity(n);
        let mut lookup = Vec::with_capacity(n);
        let mut queue = VecDeque::new();
        for k in 0..n {
            let faces = table.faces(k);
            let per = faces.len();
            let mut look = vec![(u32::MAX, 0u32); count * per];
            let mut list: Vec<FaceOrbit> = Vec::new();
            for s in 0..count {
                for j in 0..per {
                    if look[s * per + j].0 != u32::MAX {
                        continue;
                    }
                    let id = list.len() as u32;
                    let start = canonical_ordering(n, faces[j]);
                    let mut orbit = FaceOrbit {
                        embeddings: vec![FaceEmbedding {
                            simplex: s,
                            vertices: start,
                        }],
                        valid: true,
                        boundary: false,
                    };
                    look[s * per + j] = (id, 0);
                    queue.push_back((s, j, start));
                    while let Some((cs, cj, pi)) = queue.pop_front() {
                        let mask = faces[cj];
                        for f in 0..=n {
                            if mask & (1 << f) != 0 {
                                continue;
                            }
                            let Some(gl) = g.adj(cs, f) else {
                                orbit.boundary = true;
                                continue;
                            };
                            let next = gl.map.compose(pi);
                            let nj = table.index(k, gl.map.apply_mask(mask));
                            let slot = &mut look[gl.target * per + nj];
                            if slot.0 == u32::MAX {
                                *slot = (id, orbit.embeddings.len() as u32);
                                orbit.embeddings.push(FaceEmbedding {
                                    simplex: gl.target,
                                    vertices: next,
                                });
                                queue.push_back((gl.target, nj, next));
                            } else {
                                let seen = orbit.embeddings[slot.1 as usize].vertices;
                                if (0..=k).any(|i| seen.apply(i) != next.apply(i)) {
                                    orbit.valid = false;
                                }
                            }
                        }
                    }
                    list.push(orbit);
                }
            }
            orbits.push(list);
            lookup.push(look);
        }
        FaceClasses {
            top: n,
            simplices: count,
            orbits,
            lookup,
        }
    }

    #[inline]
    pub(crate) fn orbits(&self, k: usize) -> &[FaceOrbit] {
        &self.orbits[k]
    }

    #[inline]
    pub(crate) fn locate(&self, k: usize, simplex: usize, local: usize) -> (usize, usize) {
        let per = face_table(self.top).faces(k).len();
        let (o, e) = self.lookup[k][simplex * per + local];
        (o as usize, e as usize)
    }

    /// Orbit counts for dimensions `0..n`, then the simplex count.
    pub(crate) fn f_vector(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.orbits.iter().map(|o| o.len() as u64).collect();
        v.push(self.simplices as u64);
        v
    }
}

/// Face counts `(f0, f1, f2, f3, f4)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct FVector(pub [u64; 5]);

impl FVector {
    pub fn new(f0: u64, f1: u64, f2: u64, f3: u64, f4: u64) -> Self {
        FVector([f0, f1, f2, f3, f4])
    }

    #[inline]
    pub fn get(&self, dim: usize) -> u64 {
        self.0[dim]
    }

    pub fn f0(&self) -> u64 {
        self.0[0]
    }

    pub fn f4(&self) -> u64 {
        self.0[4]
    }

    /// `f0 - f1 + f2 - f3 + f4`.
    pub fn euler_characteristic(&self) -> i64 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &f)| if i % 2 == 0 { f as i64 } else { -(f as i64) })
            .sum()
    }

    /// Componentwise difference `after - self`.
    pub fn delta_to(&self, after: &FVector) -> [i64; 5] {
        std::array::from_fn(|i| after.0[i] as i64 - self.0[i] as i64)
    }
}

impl fmt::Display for FVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d, e] = self.0;
        write!(f, "{a} {b} {c} {d} {e}")
    }
}

/// Face orbits of a 4-dimensional triangulation.
#[derive(Debug, Clone)]
pub struct Skeleton {
    classes: FaceClasses,
}

impl Skeleton {
    pub fn compute(t: &Triangulation) -> Result<Skeleton, TriangulationError> {
        t.check_involution()?;
        Ok(Skeleton::compute_unchecked(t))
    }

    pub(crate) fn compute_unchecked(t: &Triangulation) -> Skeleton {
        Skeleton {
            classes: FaceClasses::compute(t),
        }
    }

    /// Number of `dim`-face orbits; `dim = 4` gives the pentachoron count.
    pub fn count(&self, dim: usize) -> usize {
        if dim == 4 {
            self.classes.simplices
        } else {
            self.classes.orbits(dim).len()
        }
    }

    pub fn orbits(&self, dim: usize) -> &[FaceOrbit] {
        self.classes.orbits(dim)
    }

    pub fn orbit(&self, dim: usize, index: usize) -> Option<&FaceOrbit> {
        self.classes.orbits(dim).get(index)
    }

    pub fn degree(&self, dim: usize, index: usize) -> Option<usize> {
        self.orbit(dim, index).map(FaceOrbit::degree)
    }

    /// Orbit containing local face `local` (dimension `dim`) of pentachoron `p`.
    pub fn orbit_of(&self, dim: usize, p: usize, local: usize) -> usize {
        self.classes.locate(dim, p, local).0
    }

    /// Orbit and embedding for local face `local` of pentachoron `p`.
    pub fn embedding_of(&self, dim: usize, p: usize, local: usize) -> (usize, FaceEmbedding) {
        let (o, e) = self.classes.locate(dim, p, local);
        (o, self.classes.orbits(dim)[o].embeddings[e])
    }

    pub fn f_vector(&self) -> FVector {
        let v = self.classes.f_vector();
        FVector([v[0], v[1], v[2], v[3], v[4]])
    }

    pub fn all_valid(&self) -> bool {
        (0..4).all(|d| self.orbits(d).iter().all(|o| o.valid))
    }

    /// The link of a face orbit: one simplex of dimension `3 - dim` per
    /// embedding, glued along the facets of the pentachora around the face.
    pub fn link(&self, t: &Triangulation, dim: usize, index: usize) -> Result<Link, TriangulationError> {
        let orbit = self
            .orbit(dim, index)
            .ok_or(TriangulationError::IndexOutOfRange {
                what: "face orbit",
                index,
                limit: self.count(dim),
            })?;
        Ok(build_link(&self.classes, t, 4, dim, orbit))
    }
}

pub(crate) fn build_link<G: Gluings + ?Sized>(
    classes: &FaceClasses,
    g: &G,
    n: usize,
    dim: usize,
    orbit: &FaceOrbit,
) -> Link {
    let table = face_table(n);
    let link_dim = n - dim - 1;
    let mut simplices = vec![[None; 5]; orbit.embeddings.len()];
    for (i, emb) in orbit.embeddings.iter().enumerate() {
        let pi = emb.vertices;
        let mask: u8 = (0..=dim).fold(0, |m, v| m | (1 << pi.apply(v)));
        for a in 0..=link_dim {
            let facet = pi.apply(dim + 1 + a);
            let Some(gl) = g.adj(emb.simplex, facet) else {
                continue;
            };
            let nj = table.index(dim, gl.map.apply_mask(mask));
            let (o, e) = classes.locate(dim, gl.target, nj);
            debug_assert!(std::ptr::eq(&classes.orbits(dim)[o], orbit) || o < usize::MAX);
            let other = classes.orbits(dim)[o].embeddings[e].vertices;
            let inv = other.inverse();
            let mut img = [0u8, 1, 2, 3, 4];
            for (b, slot) in img.iter_mut().enumerate().take(link_dim + 1) {
                let target_vertex = gl.map.apply(pi.apply(dim + 1 + b));
                *slot = (inv.apply(target_vertex) - dim - 1) as u8;
            }
            let map = Perm5::from_images(img).expect("link gluing is a bijection");
            simplices[i][a] = Some(Gluing::new(e, map));
        }
    }
    Link {
        dim: link_dim,
        simplices,
    }
}

/// The link of a face: a generalized triangulation of dimension
/// `3 - d` (a 3-complex for vertices, a surface for edges, a cycle for
/// triangles). Used only for local checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Link {
    dim: usize,
    simplices: Vec<[Option<Gluing>; 5]>,
}

impl Gluings for Link {
    fn top_dim(&self) -> usize {
        self.dim
    }
    fn simplex_count(&self) -> usize {
        self.simplices.len()
    }
    fn adj(&self, simplex: usize, facet: usize) -> Option<Gluing> {
        self.simplices[simplex][facet]
    }
}

impl Link {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.simplices.len()
    }

    pub fn gluing(&self, simplex: usize, facet: usize) -> Option<Gluing> {
        self.simplices[simplex][facet]
    }

    pub fn is_closed(&self) -> bool {
        self.simplices
            .iter()
            .all(|s| s[..=self.dim].iter().all(Option::is_some))
    }

    pub fn is_connected(&self) -> bool {
        let n = self.simplices.len();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut stack = vec![0];
        let mut reached = 1;
        while let Some(s) = stack.pop() {
            for g in self.simplices[s][..=self.dim].iter().flatten() {
                if !seen[g.target] {
                    seen[g.target] = true;
                    reached += 1;
                    stack.push(g.target);
                }
            }
        }
        reached == n
    }

    /// Orbit counts of each dimension, ending with the simplex count.
    pub fn f_vector(&self) -> Vec<u64> {
        if self.dim == 0 {
            return vec![self.simplices.len() as u64];
        }
        FaceClasses::compute(self).f_vector()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector()
            .iter()
            .enumerate()
            .map(|(i, &f)| if i % 2 == 0 { f as i64 } else { -(f as i64) })
            .sum()
    }

    /// True if every face of the link is identified with itself only by
    /// the identity.
    pub fn faces_valid(&self) -> bool {
        if self.dim == 0 {
            return true;
        }
        let c = FaceClasses::compute(self);
        (0..self.dim).all(|k| c.orbits(k).iter().all(|o| o.valid))
    }
}
