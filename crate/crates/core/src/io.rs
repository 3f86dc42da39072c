//! Text formats: `.gtri` gluing tables and simplicial facet lists.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::perm::Perm5;
use crate::triangulation::{Gluing, Triangulation, TriangulationError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("facet {facet:?} repeats a vertex")]
    RepeatedVertex { facet: [usize; 5] },
    #[error("duplicate facet {facet:?}")]
    DuplicateFacet { facet: [usize; 5] },
    #[error("tetrahedron {tetrahedron:?} lies in {count} facets (expected 2)")]
    NonPseudomanifold { tetrahedron: [usize; 4], count: usize },
    #[error(transparent)]
    Triangulation(#[from] TriangulationError),
}

fn parse_err(line: usize, message: impl Into<String>) -> IoError {
    IoError::Parse {
        line,
        message: message.into(),
    }
}

/// Facets of a pure simplicial 4-complex, as 5-tuples of vertex labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FacetList {
    vertex_count: usize,
    facets: Vec<[usize; 5]>,
}

impl FacetList {
    /// Checks that every facet has five distinct vertices and that no facet
    /// is listed twice. Vertex labels are zero-based.
    pub fn new(facets: Vec<[usize; 5]>) -> Result<FacetList, IoError> {
        let mut seen = BTreeSet::new();
        let mut verts = BTreeSet::new();
        for f in &facets {
            let mut s = *f;
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(IoError::RepeatedVertex { facet: *f });
            }
            if !seen.insert(s) {
                return Err(IoError::DuplicateFacet { facet: *f });
            }
            verts.extend(s);
        }
        Ok(FacetList {
            vertex_count: verts.len(),
            facets,
        })
    }

    /// Parses one facet per line; `#` starts a comment. Labels are 1-based
    /// unless `zero_based` is set. Brackets and commas are ignored, so the
    /// bracketed list notation common in published data is also accepted.
    pub fn parse(text: &str, zero_based: bool) -> Result<FacetList, IoError> {
        let mut facets = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("");
            let body = body.rsplit_once('=').map_or(body, |(_, r)| r);
            let cleaned: String = body
                .chars()
                .map(|c| if "[](),;".contains(c) { ' ' } else { c })
                .collect();
            let mut nums = Vec::new();
            for tok in cleaned.split_whitespace() {
                let v: usize = tok
                    .parse()
                    .map_err(|_| parse_err(line, format!("not a vertex label: {tok:?}")))?;
                let v = if zero_based {
                    v
                } else {
                    v.checked_sub(1)
                        .ok_or_else(|| parse_err(line, "vertex label 0 in 1-based input"))?
                };
                nums.push(v);
            }
            if nums.len() % 5 != 0 {
                return Err(parse_err(
                    line,
                    format!("expected groups of 5 vertices, found {}", nums.len()),
                ));
            }
            for c in nums.chunks(5) {
                facets.push([c[0], c[1], c[2], c[3], c[4]]);
            }
        }
        if facets.is_empty() {
            return Err(parse_err(0, "no facets"));
        }
        FacetList::new(facets)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn facets(&self) -> &[[usize; 5]] {
        &self.facets
    }

    /// One pentachoron per facet with its vertices sorted into labels 0..4;
    /// facets sharing a tetrahedron are glued by the unique map that agrees
    /// on the shared vertices.
    pub fn to_triangulation(&self) -> Result<Triangulation, IoError> {
        let sorted: Vec<[usize; 5]> = self
            .facets
            .iter()
            .map(|f| {
                let mut s = *f;
                s.sort_unstable();
                s
            })
            .collect();
        let mut tets: HashMap<[usize; 4], Vec<(usize, usize)>> = HashMap::new();
        for (p, f) in sorted.iter().enumerate() {
            for omit in 0..5 {
                let mut key = [0; 4];
                let mut k = 0;
                for (i, &v) in f.iter().enumerate() {
                    if i != omit {
                        key[k] = v;
                        k += 1;
                    }
                }
                tets.entry(key).or_default().push((p, omit));
            }
        }
        let mut keys: Vec<_> = tets.keys().copied().collect();
        keys.sort_unstable();
        let mut t = Triangulation::with_size(sorted.len());
        for key in keys {
            let list = &tets[&key];
            if list.len() != 2 {
                return Err(IoError::NonPseudomanifold {
                    tetrahedron: key,
                    count: list.len(),
                });
            }
            let (p, i) = list[0];
            let (q, j) = list[1];
            let mut img = [0u8; 5];
            for a in 0..5 {
                img[a] = if a == i {
                    j as u8
                } else {
                    sorted[q].iter().position(|&v| v == sorted[p][a]).expect("shared vertex") as u8
                };
            }
            let map = Perm5::from_images(img).expect("vertex-compatible map is a bijection");
            t.glue(p, i, q, map)?;
        }
        Ok(t)
    }
}

/// Writes the `.gtri` text form.
pub fn write_gtri(t: &Triangulation) -> String {
    let mut out = String::new();
    writeln!(out, "gtri 4 {}", t.size()).unwrap();
    for p in 0..t.size() {
        let toks: Vec<String> = (0..5)
            .map(|f| match t.gluing(p, f) {
                None => "-".to_string(),
                Some(g) => format!("{}:{}", g.target, g.map),
            })
            .collect();
        writeln!(out, "{}", toks.join(" ")).unwrap();
    }
    out
}

/// Parses the `.gtri` text form and checks that gluings pair up.
pub fn parse_gtri(text: &str) -> Result<Triangulation, IoError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or_else(|| parse_err(0, "empty input"))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 3 || h[0] != "gtri" || h[1] != "4" {
        return Err(parse_err(hline, "expected header \"gtri 4 <N>\""));
    }
    let n: usize = h[2]
        .parse()
        .map_err(|_| parse_err(hline, format!("bad pentachoron count {:?}", h[2])))?;
    let mut raw = Vec::with_capacity(n);
    for p in 0..n {
        let (line, body) = lines
            .next()
            .ok_or_else(|| parse_err(0, format!("expected {n} pentachoron lines, found {p}")))?;
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.len() != 5 {
            return Err(parse_err(line, format!("expected 5 tokens, found {}", toks.len())));
        }
        let mut slots = [None; 5];
        for (f, tok) in toks.iter().enumerate() {
            if *tok == "-" {
                continue;
            }
            let (q, perm) = tok
                .split_once(':')
                .ok_or_else(|| parse_err(line, format!("bad gluing token {tok:?}")))?;
            let q: usize = q
                .parse()
                .map_err(|_| parse_err(line, format!("bad target in {tok:?}")))?;
            if q >= n {
                return Err(parse_err(line, format!("target {q} out of range")));
            }
            let digits: Vec<u8> = perm.bytes().map(|b| b.wrapping_sub(b'0')).collect();
            let map = <[u8; 5]>::try_from(digits.as_slice())
                .ok()
                .and_then(Perm5::from_images)
                .ok_or_else(|| parse_err(line, format!("bad permutation in {tok:?}")))?;
            slots[f] = Some(Gluing::new(q, map));
        }
        raw.push(slots);
    }
    if let Some((line, _)) = lines.next() {
        return Err(parse_err(line, "trailing data after pentachoron lines"));
    }
    let t = Triangulation::from_raw(raw);
    t.check_involution()?;
    Ok(t)
}

/// Input kinds accepted by the command-line tools.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Gtri,
    FacetList,
    Signature,
}

/// Guesses the format from the first non-comment line.
pub fn detect_format(text: &str) -> InputFormat {
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .unwrap_or("");
    if first.starts_with("gtri") {
        InputFormat::Gtri
    } else if first.split_whitespace().count() == 1
        && !first.contains(['[', '=', ','])
        && !first.chars().all(|c| c.is_ascii_digit())
    {
        InputFormat::Signature
    } else {
        InputFormat::FacetList
    }
}
