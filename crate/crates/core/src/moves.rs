//! Bistellar moves and edge collapse.
//!
//! Every bistellar move is read off the boundary of the 5-simplex on model
//! vertices `0..=5`. For a move on a `d`-face, `F = {0..=d}` is the face and
//! `T = {d+1..=5}` its complement. The star of the face is the set of
//! pentachora `Δ∖{x}` for `x ∈ T`; it is replaced by the pentachora `Δ∖{y}`
//! for `y ∈ F`, which share the boundary of the star. Old pentachora are
//! matched to the model through maps `φ_x` from model vertices to their
//! local vertices; new pentachora label `Δ∖{y}` in ascending order.
//!
//! New pentachora are appended after the surviving ones, which keep their
//! relative order. In every new pentachoron the new face `T` occupies the
//! local vertices `d..=4`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::perm::Perm5;
use crate::skeleton::{face_index, FVector, Skeleton};
use crate::triangulation::{Gluing, Slots, Triangulation, TriangulationError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveKind {
    OneFive,
    TwoFour,
    ThreeThree,
    FourTwo,
    FiveOne,
    Collapse,
}

impl MoveKind {
    pub const ALL: [MoveKind; 6] = [
        MoveKind::FiveOne,
        MoveKind::Collapse,
        MoveKind::FourTwo,
        MoveKind::ThreeThree,
        MoveKind::TwoFour,
        MoveKind::OneFive,
    ];

    pub const BISTELLAR: [MoveKind; 5] = [
        MoveKind::FiveOne,
        MoveKind::FourTwo,
        MoveKind::ThreeThree,
        MoveKind::TwoFour,
        MoveKind::OneFive,
    ];

    /// Moves that never increase `f4` or `f0` and decrease one of them.
    pub const REDUCING: [MoveKind; 3] = [MoveKind::FiveOne, MoveKind::Collapse, MoveKind::FourTwo];

    /// Dimension of the face a move acts on.
    pub fn face_dim(self) -> usize {
        match self {
            MoveKind::OneFive => 4,
            MoveKind::TwoFour => 3,
            MoveKind::ThreeThree => 2,
            MoveKind::FourTwo | MoveKind::Collapse => 1,
            MoveKind::FiveOne => 0,
        }
    }

    /// Ordering used for listing legal moves.
    pub fn rank(self) -> u8 {
        match self {
            MoveKind::FiveOne => 0,
            MoveKind::Collapse => 1,
            MoveKind::FourTwo => 2,
            MoveKind::ThreeThree => 3,
            MoveKind::TwoFour => 4,
            MoveKind::OneFive => 5,
        }
    }

    pub fn is_bistellar(self) -> bool {
        self != MoveKind::Collapse
    }

    pub fn inverse(self) -> Option<MoveKind> {
        Some(match self {
            MoveKind::OneFive => MoveKind::FiveOne,
            MoveKind::TwoFour => MoveKind::FourTwo,
            MoveKind::ThreeThree => MoveKind::ThreeThree,
            MoveKind::FourTwo => MoveKind::TwoFour,
            MoveKind::FiveOne => MoveKind::OneFive,
            MoveKind::Collapse => return None,
        })
    }

    /// Change in the f-vector; collapse depends on the edge.
    pub fn f_delta(self) -> Option<FDelta> {
        Some(FDelta(match self {
            MoveKind::OneFive => [1, 5, 10, 10, 4],
            MoveKind::TwoFour => [0, 1, 4, 5, 2],
            MoveKind::ThreeThree => [0, 0, 0, 0, 0],
            MoveKind::FourTwo => [0, -1, -4, -5, -2],
            MoveKind::FiveOne => [-1, -5, -10, -10, -4],
            MoveKind::Collapse => return None,
        }))
    }

    pub fn name(self) -> &'static str {
        match self {
            MoveKind::OneFive => "1-5",
            MoveKind::TwoFour => "2-4",
            MoveKind::ThreeThree => "3-3",
            MoveKind::FourTwo => "4-2",
            MoveKind::FiveOne => "5-1",
            MoveKind::Collapse => "collapse",
        }
    }
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MoveKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "1-5" => MoveKind::OneFive,
            "2-4" => MoveKind::TwoFour,
            "3-3" => MoveKind::ThreeThree,
            "4-2" => MoveKind::FourTwo,
            "5-1" => MoveKind::FiveOne,
            "collapse" | "collapse-edge" => MoveKind::Collapse,
            _ => return Err(format!("unknown move kind {s:?}")),
        })
    }
}

/// Signed change to `(f0, f1, f2, f3, f4)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FDelta(pub [i64; 5]);

impl FDelta {
    pub fn between(before: &FVector, after: &FVector) -> FDelta {
        FDelta(before.delta_to(after))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollapseReason {
    SharedEndpoint,
    LinkCondition,
    InvalidGluing,
}

impl fmt::Display for CollapseReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CollapseReason::SharedEndpoint => "shared endpoint",
            CollapseReason::LinkCondition => "link condition violated",
            CollapseReason::InvalidGluing => "would create invalid gluing",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("illegal {kind} move on orbit {target}: {reason}")]
    IllegalMove {
        kind: MoveKind,
        target: usize,
        reason: &'static str,
    },
    #[error("illegal collapse of edge {edge}: {reason}")]
    IllegalCollapse { edge: usize, reason: CollapseReason },
    #[error("edge collapse has no local inverse")]
    NotInvertible,
    #[error(transparent)]
    InvalidInput(#[from] TriangulationError),
    #[error("trace line {line}: {message}")]
    Trace { line: usize, message: String },
}

/// A legal move on a specific triangulation. Targets are orbit indices in
/// that triangulation's skeleton (pentachoron indices for 1-5).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Move {
    kind: MoveKind,
    target: usize,
}

impl Move {
    /// Builds a move after checking legality.
    pub fn checked(t: &Triangulation, kind: MoveKind, target: usize) -> Result<Move, MoveError> {
        let skel = Skeleton::compute(t)?;
        Move::checked_with(t, &skel, kind, target)
    }

    pub fn checked_with(
        t: &Triangulation,
        skel: &Skeleton,
        kind: MoveKind,
        target: usize,
    ) -> Result<Move, MoveError> {
        let count = skel.count(kind.face_dim());
        if target >= count {
            return Err(TriangulationError::IndexOutOfRange {
                what: "face orbit",
                index: target,
                limit: count,
            }
            .into());
        }
        if kind == MoveKind::Collapse {
            collapse_check(t, skel, target)
                .map_err(|reason| MoveError::IllegalCollapse { edge: target, reason })?;
        } else {
            bistellar_star(t, skel, kind.face_dim(), target).map_err(|reason| MoveError::IllegalMove {
                kind,
                target,
                reason,
            })?;
        }
        Ok(Move { kind, target })
    }

    pub fn kind(&self) -> MoveKind {
        self.kind
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn step(&self) -> TraceStep {
        TraceStep {
            kind: self.kind,
            target: self.target,
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kind, self.target)
    }
}

/// Maps model vertices to local vertices of the star pentachora.
#[derive(Debug, Clone)]
struct Star {
    d: usize,
    pents: [usize; 6],
    phi: [[u8; 6]; 6],
}

const NONE: u8 = u8::MAX;

fn bistellar_star(t: &Triangulation, skel: &Skeleton, d: usize, target: usize) -> Result<Star, &'static str> {
    let mut star = Star {
        d,
        pents: [usize::MAX; 6],
        phi: [[NONE; 6]; 6],
    };
    let x0 = d + 1;
    let (s0, pi0) = if d == 4 {
        (target, Perm5::IDENTITY)
    } else {
        let orbit = skel.orbit(d, target).ok_or("no such face")?;
        if !orbit.valid {
            return Err("face is not valid");
        }
        if orbit.boundary {
            return Err("face meets the boundary");
        }
        if orbit.degree() != 5 - d {
            return Err("face has the wrong degree");
        }
        let e = orbit.embeddings[0];
        (e.simplex, e.vertices)
    };
    star.pents[x0] = s0;
    for i in 0..=d {
        star.phi[x0][i] = pi0.apply(i) as u8;
    }
    for (j, v) in (d + 2..6).enumerate() {
        star.phi[x0][v] = pi0.apply(d + 1 + j) as u8;
    }
    let mut queue = vec![x0];
    while let Some(x) = queue.pop() {
        for y in d + 1..6 {
            if y == x {
                continue;
            }
            let g = t
                .gluing(star.pents[x], star.phi[x][y] as usize)
                .ok_or("face meets the boundary")?;
            let mut cand = [NONE; 6];
            for v in 0..6 {
                if v != x && v != y {
                    cand[v] = g.map.apply(star.phi[x][v] as usize) as u8;
                }
            }
            cand[x] = g.map.apply(star.phi[x][y] as usize) as u8;
            if star.pents[y] == usize::MAX {
                star.pents[y] = g.target;
                star.phi[y] = cand;
                queue.push(y);
            } else if star.pents[y] != g.target || star.phi[y] != cand {
                return Err("star is not the standard configuration");
            }
        }
    }
    let mut used: Vec<usize> = star.pents[d + 1..].to_vec();
    used.sort_unstable();
    if used.windows(2).any(|w| w[0] == w[1]) {
        return Err("star pentachora are not distinct");
    }
    Ok(star)
}

// Local label of model vertex w in the new pentachoron Δ∖{y}.
#[inline]
fn psi(y: usize, w: usize) -> usize {
    if w < y {
        w
    } else {
        w - 1
    }
}

impl Star {
    // Sends local vertices of new pentachoron y to local vertices of old
    // pentachoron x, matching their shared facet.
    fn external_map(&self, x: usize, y: usize) -> Perm5 {
        let mut img = [0u8; 5];
        for w in 0..6 {
            if w != x && w != y {
                img[psi(y, w)] = self.phi[x][w];
            }
        }
        img[psi(y, x)] = self.phi[x][y];
        Perm5::from_images(img).expect("external map is a bijection")
    }
}

fn apply_bistellar(t: &Triangulation, star: &Star) -> Result<Triangulation, &'static str> {
    let d = star.d;
    let n = t.size();
    let mut in_star = vec![usize::MAX; n];
    for x in d + 1..6 {
        in_star[star.pents[x]] = x;
    }
    let mut new_idx = vec![usize::MAX; n];
    let mut kept = 0;
    for p in 0..n {
        if in_star[p] == usize::MAX {
            new_idx[p] = kept;
            kept += 1;
        }
    }
    let mut out: Vec<Slots> = Vec::with_capacity(kept + d + 1);
    for p in 0..n {
        if in_star[p] == usize::MAX {
            out.push(t.raw()[p].map(|g| g.map(|g| Gluing::new(new_idx[g.target], g.map))));
        }
    }
    out.resize(kept + d + 1, [None; 5]);
    // internal gluings between new pentachora
    for y in 0..=d {
        for v in 0..=d {
            if v == y {
                continue;
            }
            let mut img = [0u8; 5];
            for w in 0..6 {
                if w != y && w != v {
                    img[psi(y, w)] = psi(v, w) as u8;
                }
            }
            img[psi(y, v)] = psi(v, y) as u8;
            let map = Perm5::from_images(img).expect("internal map is a bijection");
            out[kept + y][psi(y, v)] = Some(Gluing::new(kept + v, map));
        }
    }
    // gluings across the boundary of the star
    for y in 0..=d {
        for x in d + 1..6 {
            let a = star.external_map(x, y);
            let old_facet = star.phi[x][y] as usize;
            let g = t.gluing(star.pents[x], old_facet).ok_or("face meets the boundary")?;
            let here = (kept + y, psi(y, x));
            let far_facet = g.map.apply(old_facet);
            let xq = in_star[g.target];
            if xq == usize::MAX {
                let map = g.map.compose(a);
                out[here.0][here.1] = Some(Gluing::new(new_idx[g.target], map));
                out[new_idx[g.target]][far_facet] = Some(Gluing::new(here.0, map.inverse()));
            } else {
                let yq = (0..6)
                    .find(|&w| w != xq && star.phi[xq][w] as usize == far_facet)
                    .expect("facet of a star pentachoron");
                if yq > d {
                    return Err("star is not the standard configuration");
                }
                let b = star.external_map(xq, yq);
                let there = (kept + yq, psi(yq, xq));
                if there == here {
                    return Err("replacement glues a facet to itself");
                }
                let map = b.inverse().compose(g.map).compose(a);
                out[here.0][here.1] = Some(Gluing::new(there.0, map));
            }
        }
    }
    let result = Triangulation::from_raw(out);
    debug_assert!(result.check_involution().is_ok());
    Ok(result)
}

/// Local endpoints `(a, b)` of the edge in each star pentachoron, keyed by
/// pentachoron; fails unless every star pentachoron holds the edge once.
fn collapse_star(skel: &Skeleton, edge: usize) -> Result<Vec<(usize, usize, usize)>, CollapseReason> {
    let orbit = skel.orbit(1, edge).ok_or(CollapseReason::InvalidGluing)?;
    if !orbit.valid || orbit.boundary {
        return Err(CollapseReason::InvalidGluing);
    }
    let mut star: Vec<(usize, usize, usize)> = orbit
        .embeddings
        .iter()
        .map(|e| (e.simplex, e.vertices.apply(0), e.vertices.apply(1)))
        .collect();
    star.sort_unstable();
    if star.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(CollapseReason::InvalidGluing);
    }
    Ok(star)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
    // false if already joined
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra] = rb;
        true
    }
}

/// Collapse legality: distinct endpoints, and for each `j` in `1..=3` the
/// graph on `j`-face orbits whose arcs join the two faces `G∖a`, `G∖b` of
/// each `(j+1)`-face orbit `G` through the edge must be a forest.
fn collapse_check(_t: &Triangulation, skel: &Skeleton, edge: usize) -> Result<(), CollapseReason> {
    let e0 = skel.orbit(1, edge).ok_or(CollapseReason::InvalidGluing)?.embeddings[0];
    let (p0, a0, b0) = (e0.simplex, e0.vertices.apply(0), e0.vertices.apply(1));
    if skel.orbit_of(0, p0, a0) == skel.orbit_of(0, p0, b0) {
        return Err(CollapseReason::SharedEndpoint);
    }
    let star = collapse_star(skel, edge)?;
    for j in 1..=3 {
        let mut uf = UnionFind::new(skel.count(j));
        let mut seen = std::collections::HashSet::new();
        for &(p, a, b) in &star {
            let ab = (1u8 << a) | (1 << b);
            for g_mask in 1u8..32 {
                if g_mask.count_ones() as usize != j + 2 || g_mask & ab != ab {
                    continue;
                }
                let g_orbit = if j + 1 == 4 {
                    p
                } else {
                    skel.orbit_of(j + 1, p, face_index(j + 1, g_mask))
                };
                if !seen.insert(g_orbit) {
                    continue;
                }
                let fa = skel.orbit_of(j, p, face_index(j, g_mask & !(1 << a)));
                let fb = skel.orbit_of(j, p, face_index(j, g_mask & !(1 << b)));
                if !uf.union(fa, fb) {
                    return Err(CollapseReason::LinkCondition);
                }
            }
        }
    }
    Ok(())
}

fn apply_collapse(t: &Triangulation, skel: &Skeleton, edge: usize) -> Result<Triangulation, CollapseReason> {
    let star = collapse_star(skel, edge)?;
    let n = t.size();
    let mut ends = vec![None; n];
    for &(p, a, b) in &star {
        ends[p] = Some((a, b));
    }
    let mut new_idx = vec![usize::MAX; n];
    let mut kept = 0;
    for p in 0..n {
        if ends[p].is_none() {
            new_idx[p] = kept;
            kept += 1;
        }
    }
    let mut out: Vec<Slots> = Vec::with_capacity(kept);
    for p in 0..n {
        if ends[p].is_some() {
            continue;
        }
        let mut slots = [None; 5];
        for f in 0..5 {
            let Some(g) = t.gluing(p, f) else { continue };
            if ends[g.target].is_none() {
                slots[f] = Some(Gluing::new(new_idx[g.target], g.map));
                continue;
            }
            // walk through squashed pentachora until we leave the star
            let mut map = g.map;
            let mut cur = g.target;
            let mut steps = 0;
            while let Some((a, b)) = ends[cur] {
                steps += 1;
                if steps > 2 * star.len() + 2 {
                    return Err(CollapseReason::InvalidGluing);
                }
                let entry = map.apply(f);
                if entry != a && entry != b {
                    return Err(CollapseReason::InvalidGluing);
                }
                map = Perm5::transposition(a, b).compose(map);
                let exit = map.apply(f);
                let g2 = t.gluing(cur, exit).ok_or(CollapseReason::InvalidGluing)?;
                map = g2.map.compose(map);
                cur = g2.target;
            }
            if cur == p && map.apply(f) == f {
                return Err(CollapseReason::InvalidGluing);
            }
            slots[f] = Some(Gluing::new(new_idx[cur], map));
        }
        out.push(slots);
    }
    let result = Triangulation::from_raw(out);
    debug_assert!(result.check_involution().is_ok());
    Ok(result)
}

/// Every legal move of the given kinds, ordered by kind rank then target.
pub fn legal_moves(t: &Triangulation, kinds: &[MoveKind]) -> Result<Vec<Move>, MoveError> {
    let skel = Skeleton::compute(t)?;
    Ok(legal_moves_with(t, &skel, kinds))
}

pub fn legal_moves_with(t: &Triangulation, skel: &Skeleton, kinds: &[MoveKind]) -> Vec<Move> {
    let mut kinds = kinds.to_vec();
    kinds.sort_by_key(|k| k.rank());
    kinds.dedup();
    let mut out = Vec::new();
    for kind in kinds {
        for target in 0..skel.count(kind.face_dim()) {
            if is_legal(t, skel, kind, target) {
                out.push(Move { kind, target });
            }
        }
    }
    out
}

pub fn is_legal(t: &Triangulation, skel: &Skeleton, kind: MoveKind, target: usize) -> bool {
    if target >= skel.count(kind.face_dim()) {
        return false;
    }
    if kind == MoveKind::Collapse {
        collapse_check(t, skel, target).is_ok()
    } else {
        bistellar_star(t, skel, kind.face_dim(), target).is_ok()
    }
}

/// Applies a move, re-checking legality on `t`.
pub fn apply(t: &Triangulation, m: &Move) -> Result<Triangulation, MoveError> {
    let skel = Skeleton::compute(t)?;
    apply_with(t, &skel, m.kind, m.target)
}

/// Applies a move given by kind and target, with `skel` computed from `t`.
pub fn apply_with(t: &Triangulation, skel: &Skeleton, kind: MoveKind, target: usize) -> Result<Triangulation, MoveError> {
    if target >= skel.count(kind.face_dim()) {
        return Err(MoveError::IllegalMove {
            kind,
            target,
            reason: "no such face",
        });
    }
    if kind == MoveKind::Collapse {
        collapse_check(t, skel, target).map_err(|reason| MoveError::IllegalCollapse { edge: target, reason })?;
        apply_collapse(t, skel, target).map_err(|reason| MoveError::IllegalCollapse { edge: target, reason })
    } else {
        let illegal = |reason| MoveError::IllegalMove { kind, target, reason };
        let star = bistellar_star(t, skel, kind.face_dim(), target).map_err(illegal)?;
        apply_bistellar(t, &star).map_err(illegal)
    }
}

/// Collapses an edge orbit, merging its two endpoints.
pub fn collapse_edge(t: &Triangulation, edge: usize) -> Result<Triangulation, MoveError> {
    let skel = Skeleton::compute(t)?;
    apply_with(t, &skel, MoveKind::Collapse, edge)
}

/// The move on `after` that undoes `m`, where `after = apply(before, m)`.
pub fn inverse(m: &Move, before: &Triangulation, after: &Triangulation) -> Result<Move, MoveError> {
    let inv = m.kind.inverse().ok_or(MoveError::NotInvertible)?;
    let d = m.kind.face_dim();
    let expected = before.size() + d + 1 - (5 - d);
    if after.size() != expected {
        return Err(MoveError::IllegalMove {
            kind: inv,
            target: 0,
            reason: "triangulation does not follow from the move",
        });
    }
    let first_new = after.size() - (d + 1);
    let target = if d == 0 {
        first_new
    } else {
        let skel = Skeleton::compute(after)?;
        let mask: u8 = (d..5).fold(0, |acc, v| acc | (1 << v));
        skel.orbit_of(4 - d, first_new, face_index(4 - d, mask))
    };
    Move::checked(after, inv, target)
}

/// One line of a move trace: `<kind> <orbit-index>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TraceStep {
    pub kind: MoveKind,
    pub target: usize,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kind, self.target)
    }
}

pub fn format_trace(steps: &[TraceStep]) -> String {
    steps.iter().map(|s| format!("{s}\n")).collect()
}

pub fn parse_trace(text: &str) -> Result<Vec<TraceStep>, MoveError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| MoveError::Trace { line: i + 1, message };
        let mut it = line.split_whitespace();
        let kind: MoveKind = it.next().unwrap_or("").parse().map_err(err)?;
        let target = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| err(format!("expected \"<kind> <orbit-index>\", found {line:?}")))?;
        if it.next().is_some() {
            return Err(err(format!("trailing tokens in {line:?}")));
        }
        out.push(TraceStep { kind, target });
    }
    Ok(out)
}

/// Applies each step in turn, re-checking legality.
pub fn replay(t: &Triangulation, steps: &[TraceStep]) -> Result<Triangulation, MoveError> {
    let mut cur = t.clone();
    for s in steps {
        let skel = Skeleton::compute(&cur)?;
        cur = apply_with(&cur, &skel, s.kind, s.target)?;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(t: &Triangulation) -> Vec<(MoveKind, usize)> {
        let moves = legal_moves(t, &MoveKind::ALL).unwrap();
        MoveKind::ALL
            .iter()
            .map(|&k| (k, moves.iter().filter(|m| m.kind() == k).count()))
            .collect()
    }

    #[test]
    fn boundary_of_5_simplex_moves() {
        let t = Triangulation::boundary_of_5_simplex();
        let c = counts(&t);
        assert!(c.contains(&(MoveKind::OneFive, 6)));
        assert!(c.contains(&(MoveKind::TwoFour, 15)));
        assert!(c.contains(&(MoveKind::ThreeThree, 20)));
        assert!(c.contains(&(MoveKind::FourTwo, 15)));
        assert!(c.contains(&(MoveKind::FiveOne, 6)));
        assert!(c.contains(&(MoveKind::Collapse, 15)));
    }

    #[test]
    fn two_pentachoron_sphere_moves() {
        let t = Triangulation::two_pentachoron_sphere();
        let c = counts(&t);
        assert!(c.contains(&(MoveKind::TwoFour, 5)));
        assert!(c.contains(&(MoveKind::FiveOne, 0)));
    }

    #[test]
    fn self_glued_pentachoron_blocks_2_4() {
        let mut t = Triangulation::with_size(1);
        t.glue(0, 0, 0, Perm5::from_images([1, 0, 2, 3, 4]).unwrap()).unwrap();
        let skel = Skeleton::compute(&t).unwrap();
        let tet = skel.orbit_of(3, 0, 0);
        assert_eq!(skel.degree(3, tet), Some(2));
        assert!(!is_legal(&t, &skel, MoveKind::TwoFour, tet));
    }

    #[test]
    fn deltas_on_boundary_of_5_simplex() {
        let t = Triangulation::boundary_of_5_simplex();
        let before = t.f_vector().unwrap();
        for kind in MoveKind::BISTELLAR {
            let m = legal_moves(&t, &[kind]).unwrap()[0];
            let after = apply(&t, &m).unwrap();
            assert!(after.is_valid());
            let fv = after.f_vector().unwrap();
            assert_eq!(FDelta::between(&before, &fv), kind.f_delta().unwrap(), "{kind}");
        }
        let m = legal_moves(&t, &[MoveKind::FiveOne]).unwrap()[0];
        assert_eq!(apply(&t, &m).unwrap().f_vector().unwrap(), FVector::new(5, 10, 10, 5, 2));
    }

    #[test]
    fn collapse_on_boundary_of_5_simplex() {
        let t = Triangulation::boundary_of_5_simplex();
        let after = collapse_edge(&t, 0).unwrap();
        assert_eq!(after.f_vector().unwrap(), FVector::new(5, 10, 10, 5, 2));
        assert!(after.is_valid());
    }

    fn grown_sphere() -> Triangulation {
        let mut t = Triangulation::boundary_of_5_simplex();
        for _ in 0..4 {
            let m = legal_moves(&t, &[MoveKind::OneFive]).unwrap()[0];
            t = apply(&t, &m).unwrap();
        }
        t
    }

    #[test]
    fn two_pentachoron_sphere_has_no_collapse() {
        // every edge lies in both pentachora, so each collapse would
        // squash the whole triangulation
        let t = Triangulation::two_pentachoron_sphere();
        for e in 0..10 {
            assert_eq!(
                collapse_edge(&t, e),
                Err(MoveError::IllegalCollapse {
                    edge: e,
                    reason: CollapseReason::LinkCondition
                })
            );
        }
    }

    #[test]
    fn repeated_collapses_decrease_f0() {
        let mut t = grown_sphere();
        let mut fv = t.f_vector().unwrap();
        assert_eq!(fv.f0(), 10);
        let mut steps = 0;
        while let Some(m) = legal_moves(&t, &[MoveKind::Collapse]).unwrap().first().copied() {
            t = apply(&t, &m).unwrap();
            let now = t.f_vector().unwrap();
            assert_eq!(now.f0(), fv.f0() - 1);
            assert!(now.f4() < fv.f4());
            assert!(t.is_valid());
            assert_eq!(now.euler_characteristic(), 2);
            fv = now;
            steps += 1;
        }
        assert!(steps > 0);
    }

    #[test]
    fn shared_endpoint_collapse_rejected() {
        // a one-vertex sphere: collapse whenever possible, otherwise take
        // a random sideways or growing move
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut t = grown_sphere();
        for _ in 0..500 {
            if t.f_vector().unwrap().f0() == 1 {
                break;
            }
            let moves = legal_moves(&t, &[MoveKind::Collapse]).unwrap();
            let m = if let Some(m) = moves.first() {
                *m
            } else {
                let side = legal_moves(&t, &[MoveKind::ThreeThree, MoveKind::TwoFour]).unwrap();
                side[rng.gen_range(0..side.len())]
            };
            t = apply(&t, &m).unwrap();
        }
        assert_eq!(t.f_vector().unwrap().f0(), 1);
        let err = collapse_edge(&t, 0).unwrap_err();
        assert_eq!(
            err,
            MoveError::IllegalCollapse {
                edge: 0,
                reason: CollapseReason::SharedEndpoint
            }
        );
    }

    #[test]
    fn inverse_kinds() {
        let t = Triangulation::boundary_of_5_simplex();
        for kind in MoveKind::BISTELLAR {
            let m = legal_moves(&t, &[kind]).unwrap()[0];
            let after = apply(&t, &m).unwrap();
            let inv = inverse(&m, &t, &after).unwrap();
            assert_eq!(Some(inv.kind()), kind.inverse());
            let back = apply(&after, &inv).unwrap();
            assert_eq!(back.f_vector().unwrap(), t.f_vector().unwrap());
        }
        let m = Move::checked(&t, MoveKind::Collapse, 0).unwrap();
        let after = apply(&t, &m).unwrap();
        assert_eq!(inverse(&m, &t, &after), Err(MoveError::NotInvertible));
    }

    #[test]
    fn trace_round_trip() {
        let steps = vec![
            TraceStep { kind: MoveKind::OneFive, target: 3 },
            TraceStep { kind: MoveKind::Collapse, target: 0 },
        ];
        let text = format_trace(&steps);
        assert_eq!(text, "1-5 3\ncollapse 0\n");
        assert_eq!(parse_trace(&text).unwrap(), steps);
        assert!(matches!(parse_trace("7-1 0"), Err(MoveError::Trace { line: 1, .. })));
    }
}
