//! Generalized triangulations: pentachora whose tetrahedral facets are
//! identified in pairs.
//!
//! Facet `i` of a pentachoron is the tetrahedron opposite vertex `i`. A
//! [`Gluing`] stored at facet `f` of pentachoron `p` sends the vertices of `p`
//! to the vertices of its neighbour `q`; facet `f` lands on facet `map(f)` of
//! `q`, and that slot stores the inverse gluing.

use std::collections::VecDeque;

use thiserror::Error;

use crate::perm::Perm5;

/// Errors raised while building or checking a triangulation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TriangulationError {
    #[error("facet {facet} of pentachoron {pentachoron} is already glued")]
    SlotOccupied { pentachoron: usize, facet: usize },
    #[error("facet {facet} of pentachoron {pentachoron} cannot be glued to itself")]
    SelfIdentification { pentachoron: usize, facet: usize },
    #[error("index out of range: {what} {index} (limit {limit})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },
    #[error("inconsistent gluing at facet {facet} of pentachoron {pentachoron}: {reason}")]
    InvalidGluing {
        pentachoron: usize,
        facet: usize,
        reason: &'static str,
    },
}

/// One side of a facet identification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gluing {
    pub target: usize,
    pub map: Perm5,
}

impl Gluing {
    pub fn new(target: usize, map: Perm5) -> Self {
        Gluing { target, map }
    }
}

pub(crate) type Slots = [Option<Gluing>; 5];

/// A generalized 4-dimensional triangulation.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Triangulation {
    pentachora: Vec<Slots>,
}

impl Triangulation {
    pub fn new() -> Self {
        Self::default()
    }

    /// `n` pentachora with no gluings.
    pub fn with_size(n: usize) -> Self {
        Triangulation {
            pentachora: vec![[None; 5]; n],
        }
    }

    /// Wraps raw gluing data without checking the involution property.
    /// Use [`Triangulation::check_involution`] before trusting the result.
    pub fn from_raw(pentachora: Vec<[Option<Gluing>; 5]>) -> Self {
        Triangulation { pentachora }
    }

    pub fn raw(&self) -> &[[Option<Gluing>; 5]] {
        &self.pentachora
    }

    /// Number of pentachora, `f4`.
    pub fn size(&self) -> usize {
        self.pentachora.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pentachora.is_empty()
    }

    pub fn add_pentachoron(&mut self) -> usize {
        self.pentachora.push([None; 5]);
        self.pentachora.len() - 1
    }

    /// Gluing at facet `facet` of pentachoron `p`.
    ///
    /// Panics if either index is out of range.
    #[inline]
    pub fn gluing(&self, p: usize, facet: usize) -> Option<Gluing> {
        self.pentachora[p][facet]
    }

    fn check_slot(&self, p: usize, facet: usize) -> Result<(), TriangulationError> {
        if p >= self.size() {
            return Err(TriangulationError::IndexOutOfRange {
                what: "pentachoron",
                index: p,
                limit: self.size(),
            });
        }
        if facet >= 5 {
            return Err(TriangulationError::IndexOutOfRange {
                what: "facet",
                index: facet,
                limit: 5,
            });
        }
        Ok(())
    }

    /// Glues facet `facet` of `p` to facet `map(facet)` of `q`.
    pub fn glue(
        &mut self,
        p: usize,
        facet: usize,
        q: usize,
        map: Perm5,
    ) -> Result<(), TriangulationError> {
        self.check_slot(p, facet)?;
        self.check_slot(q, 0)?;
        let back = map.apply(facet);
        if p == q && back == facet {
            return Err(TriangulationError::SelfIdentification {
                pentachoron: p,
                facet,
            });
        }
        if self.pentachora[p][facet].is_some() {
            return Err(TriangulationError::SlotOccupied {
                pentachoron: p,
                facet,
            });
        }
        if self.pentachora[q][back].is_some() {
            return Err(TriangulationError::SlotOccupied {
                pentachoron: q,
                facet: back,
            });
        }
        self.pentachora[p][facet] = Some(Gluing::new(q, map));
        self.pentachora[q][back] = Some(Gluing::new(p, map.inverse()));
        Ok(())
    }

    /// Removes the gluing at `(p, facet)` and its partner, returning it.
    pub fn unglue(&mut self, p: usize, facet: usize) -> Result<Option<Gluing>, TriangulationError> {
        self.check_slot(p, facet)?;
        let Some(g) = self.pentachora[p][facet].take() else {
            return Ok(None);
        };
        self.pentachora[g.target][g.map.apply(facet)] = None;
        Ok(Some(g))
    }

    /// Slots whose partner does not glue back with the inverse map, or
    /// that glue a facet onto itself.
    pub fn involution_violations(&self) -> Vec<(usize, usize)> {
        let mut bad = Vec::new();
        for (p, slots) in self.pentachora.iter().enumerate() {
            for (f, g) in slots.iter().enumerate() {
                let Some(g) = g else { continue };
                let back = g.map.apply(f);
                let ok = g.target < self.size()
                    && !(g.target == p && back == f)
                    && self.pentachora[g.target][back]
                        == Some(Gluing::new(p, g.map.inverse()));
                if !ok {
                    bad.push((p, f));
                }
            }
        }
        bad
    }

    pub fn check_involution(&self) -> Result<(), TriangulationError> {
        match self.involution_violations().first() {
            None => Ok(()),
            Some(&(p, f)) => {
                let g = self.pentachora[p][f].expect("violation at glued slot");
                let reason = if g.target >= self.size() {
                    "target pentachoron out of range"
                } else if g.target == p && g.map.apply(f) == f {
                    "facet glued to itself"
                } else {
                    "partner slot does not glue back by the inverse map"
                };
                Err(TriangulationError::InvalidGluing {
                    pentachoron: p,
                    facet: f,
                    reason,
                })
            }
        }
    }

    pub fn unglued_facets(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (p, slots) in self.pentachora.iter().enumerate() {
            for (f, g) in slots.iter().enumerate() {
                if g.is_none() {
                    out.push((p, f));
                }
            }
        }
        out
    }

    /// All `5·f4` facets glued.
    pub fn is_closed(&self) -> bool {
        self.pentachora.iter().all(|s| s.iter().all(Option::is_some))
    }

    /// Connected components of the face-pairing graph, each sorted.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.size();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(p) = queue.pop_front() {
                for g in self.pentachora[p].iter().flatten() {
                    if g.target < n && !seen[g.target] {
                        seen[g.target] = true;
                        comp.push(g.target);
                        queue.push_back(g.target);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// An isomorphic copy. `order[i]` is the old index of new pentachoron
    /// `i`; `relabel[old]` sends old vertex labels of pentachoron `old` to
    /// its new labels.
    pub fn relabeled(&self, order: &[usize], relabel: &[Perm5]) -> Triangulation {
        let n = self.size();
        assert_eq!(order.len(), n);
        assert_eq!(relabel.len(), n);
        let mut new_index = vec![usize::MAX; n];
        for (i, &old) in order.iter().enumerate() {
            new_index[old] = i;
        }
        let mut out = vec![[None; 5]; n];
        for (old, slots) in self.pentachora.iter().enumerate() {
            let rho = relabel[old];
            for (f, g) in slots.iter().enumerate() {
                if let Some(g) = g {
                    let map = relabel[g.target].compose(g.map).compose(rho.inverse());
                    out[new_index[old]][rho.apply(f)] = Some(Gluing::new(new_index[g.target], map));
                }
            }
        }
        Triangulation { pentachora: out }
    }

    /// Places `other` after `self`.
    pub fn disjoint_union(&self, other: &Triangulation) -> Triangulation {
        let offset = self.size();
        let mut out = self.pentachora.clone();
        out.extend(other.pentachora.iter().map(|slots| {
            slots.map(|g| g.map(|g| Gluing::new(g.target + offset, g.map)))
        }));
        Triangulation { pentachora: out }
    }

    /// Two pentachora glued along all five facets by the identity: the
    /// smallest triangulated 4-sphere.
    pub fn two_pentachoron_sphere() -> Triangulation {
        let mut t = Triangulation::with_size(2);
        for f in 0..5 {
            t.glue(0, f, 1, Perm5::IDENTITY).expect("fresh slots");
        }
        t
    }

    /// The boundary of the 5-simplex: six pentachora, one per 5-subset of
    /// `{0,..,5}`, each labelled by its vertices in ascending order.
    pub fn boundary_of_5_simplex() -> Triangulation {
        let facets: Vec<[usize; 5]> = (0..6)
            .rev()
            .map(|omit| {
                let mut f = [0; 5];
                let mut k = 0;
                for v in 0..6 {
                    if v != omit {
                        f[k] = v;
                        k += 1;
                    }
                }
                f
            })
            .collect();
        crate::io::FacetList::new(facets)
            .and_then(|fl| fl.to_triangulation())
            .expect("the boundary of the 5-simplex is a closed pseudomanifold")
    }
}
