//! Isomorphism signatures.
//!
//! For every choice of starting pentachoron and starting vertex labelling,
//! a breadth-first walk relabels the component: pentachora are numbered in
//! the order they are reached, and each newly reached pentachoron is labelled
//! so that the gluing that reached it is the identity. Facet slots are then
//! listed in order of (new pentachoron, new facet), skipping slots already
//! described from the other side. The signature is the lexicographically
//! least such listing.
//!
//! Text form, over the alphabet `a-z A-Z 0-9 + -` (digit values 0..63):
//! one digit `w` giving the width of index fields, `w` digits holding the
//! pentachoron count, then per slot a type digit (0 = boundary, 1 = new
//! pentachoron, 2 = gluing to an earlier one) and, for type 2, `w` digits of
//! target index and 2 digits of permutation rank. Multi-digit fields are
//! little-endian. Components are encoded separately, sorted and joined by
//! `.`. The empty triangulation encodes as `a`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::perm::Perm5;
use crate::triangulation::{Gluing, Triangulation, TriangulationError};

const ALPHABET: &[u8; 64] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789+-";

fn digit_value(c: u8) -> Option<usize> {
    match c {
        b'a'..=b'z' => Some((c - b'a') as usize),
        b'A'..=b'Z' => Some((c - b'A') as usize + 26),
        b'0'..=b'9' => Some((c - b'0') as usize + 52),
        b'+' => Some(62),
        b'-' => Some(63),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IsoSigError {
    #[error("malformed signature at byte {offset}: {reason}")]
    MalformedSignature { offset: usize, reason: String },
    #[error(transparent)]
    InvalidInput(#[from] TriangulationError),
}

/// Canonical text identifying a triangulation up to isomorphism.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IsoSig(String);

impl IsoSig {
    pub fn of(t: &Triangulation) -> Result<IsoSig, IsoSigError> {
        encode(t)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }

    pub fn decode(&self) -> Result<Triangulation, IsoSigError> {
        decode(&self.0)
    }
}

impl fmt::Display for IsoSig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for IsoSig {
    type Err = IsoSigError;
    /// Accepts only strings that decode; does not check canonicity.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        decode(s)?;
        Ok(IsoSig(s.to_string()))
    }
}

/// Token stream of one walk: 0 boundary, 1 new, 2 followed by target and
/// permutation rank.
struct Walker<'a> {
    t: &'a Triangulation,
    nodes: &'a [usize],
    image: Vec<usize>,
    order: Vec<usize>,
    labels: Vec<Perm5>,
    covered: Vec<[bool; 5]>,
    tokens: Vec<u32>,
    best: Vec<u32>,
}

impl<'a> Walker<'a> {
    fn new(t: &'a Triangulation, nodes: &'a [usize]) -> Self {
        let n = t.size();
        Walker {
            t,
            nodes,
            image: vec![usize::MAX; n],
            order: Vec::with_capacity(nodes.len()),
            labels: vec![Perm5::IDENTITY; n],
            covered: vec![[false; 5]; nodes.len()],
            tokens: Vec::new(),
            best: Vec::new(),
        }
    }

    // Runs one walk; returns true if it produced a new best.
    fn walk(&mut self, start: usize, rho: Perm5) -> bool {
        for &p in self.nodes {
            self.image[p] = usize::MAX;
        }
        self.order.clear();
        self.tokens.clear();
        for c in self.covered.iter_mut() {
            *c = [false; 5];
        }
        let have_best = !self.best.is_empty();
        let mut tied = have_best;
        self.image[start] = 0;
        self.order.push(start);
        self.labels[start] = rho;
        let mut i = 0;
        while i < self.order.len() {
            let old = self.order[i];
            let phi = self.labels[old];
            let phi_inv = phi.inverse();
            for nf in 0..5 {
                if self.covered[i][nf] {
                    continue;
                }
                let f = phi_inv.apply(nf);
                let before = self.tokens.len();
                match self.t.gluing(old, f) {
                    None => self.tokens.push(0),
                    Some(Gluing { target, map }) => {
                        if self.image[target] == usize::MAX {
                            let j = self.order.len();
                            self.image[target] = j;
                            self.order.push(target);
                            self.labels[target] = phi.compose(map.inverse());
                            self.covered[j][nf] = true;
                            self.tokens.push(1);
                        } else {
                            let j = self.image[target];
                            let m = self.labels[target].compose(map).compose(phi_inv);
                            self.covered[j][m.apply(nf)] = true;
                            self.tokens.push(2);
                            self.tokens.push(j as u32);
                            self.tokens.push(m.rank() as u32);
                        }
                    }
                }
                self.covered[i][nf] = true;
                if tied {
                    match self.tokens[before..].cmp(&self.best[before..self.tokens.len()]) {
                        Ordering::Greater => return false,
                        Ordering::Less => tied = false,
                        Ordering::Equal => {}
                    }
                }
            }
            i += 1;
        }
        if tied {
            // equal to the current best
            return false;
        }
        std::mem::swap(&mut self.best, &mut self.tokens);
        true
    }
}

fn digits(mut v: usize, w: usize, out: &mut String) {
    for _ in 0..w {
        out.push(ALPHABET[v % 64] as char);
        v /= 64;
    }
    debug_assert_eq!(v, 0);
}

fn width_for(n: usize) -> usize {
    let mut w = 1;
    let mut cap = 64usize;
    while cap <= n {
        w += 1;
        cap *= 64;
    }
    w
}

fn component_text(n: usize, tokens: &[u32]) -> String {
    let w = width_for(n);
    let mut out = String::new();
    digits(w, 1, &mut out);
    digits(n, w, &mut out);
    let mut k = 0;
    while k < tokens.len() {
        digits(tokens[k] as usize, 1, &mut out);
        if tokens[k] == 2 {
            digits(tokens[k + 1] as usize, w, &mut out);
            digits(tokens[k + 2] as usize, 2, &mut out);
            k += 3;
        } else {
            k += 1;
        }
    }
    out
}

/// Canonical signature; components are encoded separately and sorted.
pub fn encode(t: &Triangulation) -> Result<IsoSig, IsoSigError> {
    t.check_involution()?;
    if t.is_empty() {
        return Ok(IsoSig("a".to_string()));
    }
    let mut parts: Vec<String> = t
        .components()
        .iter()
        .map(|nodes| {
            let mut walker = Walker::new(t, nodes);
            for &s in nodes.iter() {
                for rho in Perm5::all() {
                    walker.walk(s, rho);
                }
            }
            component_text(nodes.len(), &walker.best)
        })
        .collect();
    parts.sort();
    Ok(IsoSig(parts.join(".")))
}

/// Canonical relabelling: the isomorphic copy of a connected triangulation
/// that the signature describes directly.
pub fn canonical_form(t: &Triangulation) -> Result<Triangulation, IsoSigError> {
    decode(encode(t)?.as_str())
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    base: usize,
}

impl Reader<'_> {
    fn err(&self, reason: impl Into<String>) -> IsoSigError {
        IsoSigError::MalformedSignature {
            offset: self.base + self.pos,
            reason: reason.into(),
        }
    }

    fn number(&mut self, w: usize) -> Result<usize, IsoSigError> {
        let mut v = 0usize;
        let mut scale = 1usize;
        for _ in 0..w {
            let c = *self.bytes.get(self.pos).ok_or_else(|| self.err("unexpected end"))?;
            let d = digit_value(c).ok_or_else(|| self.err(format!("invalid character {:?}", c as char)))?;
            v = v
                .checked_add(d.checked_mul(scale).ok_or_else(|| self.err("number too large"))?)
                .ok_or_else(|| self.err("number too large"))?;
            scale = scale.saturating_mul(64);
            self.pos += 1;
        }
        Ok(v)
    }
}

fn decode_component(text: &str, base: usize) -> Result<Triangulation, IsoSigError> {
    let mut r = Reader {
        bytes: text.as_bytes(),
        pos: 0,
        base,
    };
    let w = r.number(1)?;
    if w == 0 || w > 5 {
        r.pos = 0;
        return Err(r.err("bad index width"));
    }
    let n = r.number(w)?;
    if n == 0 {
        return Err(r.err("empty component"));
    }
    if width_for(n) != w {
        return Err(r.err("index width does not match size"));
    }
    let mut t = Triangulation::with_size(1);
    let mut covered: Vec<[bool; 5]> = vec![[false; 5]];
    let mut i = 0;
    while i < t.size() {
        for f in 0..5 {
            if covered[i][f] {
                continue;
            }
            let at = r.pos;
            match r.number(1)? {
                0 => {}
                1 => {
                    if t.size() == n {
                        r.pos = at;
                        return Err(r.err("more pentachora than declared"));
                    }
                    let j = t.add_pentachoron();
                    covered.push([false; 5]);
                    t.glue(i, f, j, Perm5::IDENTITY).expect("fresh slots");
                    covered[j][f] = true;
                }
                2 => {
                    let j = r.number(w)?;
                    let rank = r.number(2)?;
                    let map = Perm5::from_rank(rank).ok_or_else(|| r.err("bad permutation rank"))?;
                    if j >= t.size() {
                        return Err(r.err("gluing target not yet defined"));
                    }
                    let g = map.apply(f);
                    if covered[j][g] || (j == i && g == f) {
                        return Err(r.err("gluing target slot unavailable"));
                    }
                    t.glue(i, f, j, map).map_err(|e| r.err(e.to_string()))?;
                    covered[j][g] = true;
                }
                _ => {
                    r.pos = at;
                    return Err(r.err("bad slot type"));
                }
            }
            covered[i][f] = true;
        }
        i += 1;
    }
    if t.size() != n {
        return Err(r.err("fewer pentachora than declared"));
    }
    if r.pos != text.len() {
        return Err(r.err("trailing characters"));
    }
    Ok(t)
}

/// Rebuilds the triangulation described by a signature.
pub fn decode(s: &str) -> Result<Triangulation, IsoSigError> {
    if s.is_empty() {
        return Err(IsoSigError::MalformedSignature {
            offset: 0,
            reason: "empty signature".into(),
        });
    }
    if s == "a" {
        return Ok(Triangulation::new());
    }
    let mut out = Triangulation::new();
    let mut base = 0;
    for part in s.split('.') {
        if part.is_empty() {
            return Err(IsoSigError::MalformedSignature {
                offset: base,
                reason: "empty component".into(),
            });
        }
        out = out.disjoint_union(&decode_component(part, base)?);
        base += part.len() + 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};

    fn random_relabel(t: &Triangulation, rng: &mut impl Rng) -> Triangulation {
        let mut order: Vec<usize> = (0..t.size()).collect();
        order.shuffle(rng);
        let relabel: Vec<Perm5> = (0..t.size())
            .map(|_| Perm5::from_rank(rng.gen_range(0..120)).unwrap())
            .collect();
        t.relabeled(&order, &relabel)
    }

    #[test]
    fn invariant_under_relabeling() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let t = Triangulation::boundary_of_5_simplex();
        let sig = encode(&t).unwrap();
        for _ in 0..100 {
            assert_eq!(encode(&random_relabel(&t, &mut rng)).unwrap(), sig);
        }
    }

    #[test]
    fn distinguishes_spheres() {
        let a = encode(&Triangulation::boundary_of_5_simplex()).unwrap();
        let b = encode(&Triangulation::two_pentachoron_sphere()).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn decode_round_trip() {
        let t = Triangulation::boundary_of_5_simplex();
        let sig = encode(&t).unwrap();
        let back = decode(sig.as_str()).unwrap();
        assert_eq!(back.f_vector().unwrap(), t.f_vector().unwrap());
        assert_eq!(encode(&back).unwrap(), sig);
    }

    #[test]
    fn small_signatures() {
        assert_eq!(encode(&Triangulation::new()).unwrap().as_str(), "a");
        // one pentachoron: width 1, count 1, five boundary slots
        assert_eq!(encode(&Triangulation::with_size(1)).unwrap().as_str(), "bbaaaaa");
        // two pentachora glued by identities: one new, then four
        // identity gluings back to pentachoron 1
        let s = encode(&Triangulation::two_pentachoron_sphere()).unwrap();
        assert_eq!(s.as_str(), "bcbcbaacbaacbaacbaa");
    }

    #[test]
    fn disconnected_components_sorted() {
        let a = Triangulation::boundary_of_5_simplex();
        let b = Triangulation::two_pentachoron_sphere();
        let ab = encode(&a.disjoint_union(&b)).unwrap();
        let ba = encode(&b.disjoint_union(&a)).unwrap();
        assert_eq!(ab, ba);
        assert_eq!(ab.as_str().matches('.').count(), 1);
        assert_eq!(decode(ab.as_str()).unwrap().components().len(), 2);
    }

    #[test]
    fn malformed_inputs() {
        for (s, offset) in [("", 0), ("b", 1), ("bbaaaa", 6), ("bbaaaaaa", 7), ("bb!aaaa", 2), ("bcbc", 4)] {
            match decode(s) {
                Err(IsoSigError::MalformedSignature { offset: o, .. }) => assert_eq!(o, offset, "{s}"),
                other => panic!("{s}: {other:?}"),
            }
        }
    }
}
