//! Manifold sanity checks: validity reports and orientability.

use std::collections::VecDeque;
use std::fmt;

use crate::skeleton::{FVector, Skeleton};
use crate::triangulation::{Triangulation, TriangulationError};

/// Why a face link failed its check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkFailure {
    /// The face is identified with itself under a non-identity map.
    InvalidFace,
    NotClosed,
    Disconnected,
    EulerCharacteristic(i64),
}

impl fmt::Display for LinkFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinkFailure::InvalidFace => write!(f, "face identified with itself"),
            LinkFailure::NotClosed => write!(f, "link has boundary"),
            LinkFailure::Disconnected => write!(f, "link is disconnected"),
            LinkFailure::EulerCharacteristic(x) => write!(f, "link has euler characteristic {x}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidityReport {
    pub unglued_facets: Vec<(usize, usize)>,
    pub involution_violations: Vec<(usize, usize)>,
    /// `(dimension, orbit)` of faces glued to themselves with a twist.
    pub invalid_faces: Vec<(usize, usize)>,
    pub bad_edge_links: Vec<(usize, LinkFailure)>,
    pub bad_vertex_links: Vec<(usize, LinkFailure)>,
}

impl ValidityReport {
    pub fn is_closed(&self) -> bool {
        self.unglued_facets.is_empty()
    }

    /// True if every check passed (including closedness).
    pub fn is_valid(&self) -> bool {
        self.unglued_facets.is_empty()
            && self.involution_violations.is_empty()
            && self.invalid_faces.is_empty()
            && self.bad_edge_links.is_empty()
            && self.bad_vertex_links.is_empty()
    }
}

impl fmt::Display for ValidityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, fc) in &self.unglued_facets {
            writeln!(f, "unglued facet {fc} of pentachoron {p}")?;
        }
        for (p, fc) in &self.involution_violations {
            writeln!(f, "one-sided gluing at facet {fc} of pentachoron {p}")?;
        }
        for (d, o) in &self.invalid_faces {
            writeln!(f, "invalid {d}-face orbit {o}")?;
        }
        for (o, why) in &self.bad_edge_links {
            writeln!(f, "edge {o}: {why}")?;
        }
        for (o, why) in &self.bad_vertex_links {
            writeln!(f, "vertex {o}: {why}")?;
        }
        Ok(())
    }
}

/// Runs every local check. Link checks are skipped when gluings do not
/// pair up, since orbits are undefined then.
pub fn validity_report(t: &Triangulation) -> ValidityReport {
    let mut report = ValidityReport {
        unglued_facets: t.unglued_facets(),
        involution_violations: t.involution_violations(),
        ..Default::default()
    };
    if !report.involution_violations.is_empty() {
        return report;
    }
    let skel = Skeleton::compute_unchecked(t);
    for d in 0..4 {
        for (i, o) in skel.orbits(d).iter().enumerate() {
            if !o.valid {
                report.invalid_faces.push((d, i));
            }
        }
    }
    for (i, o) in skel.orbits(1).iter().enumerate() {
        let failure = if !o.valid {
            Some(LinkFailure::InvalidFace)
        } else {
            let link = skel.link(t, 1, i).expect("orbit in range");
            link_failure(&link, 2)
        };
        if let Some(why) = failure {
            report.bad_edge_links.push((i, why));
        }
    }
    for i in 0..skel.count(0) {
        let link = skel.link(t, 0, i).expect("orbit in range");
        if let Some(why) = link_failure(&link, 0) {
            report.bad_vertex_links.push((i, why));
        }
    }
    report
}

fn link_failure(link: &crate::skeleton::Link, chi: i64) -> Option<LinkFailure> {
    if !link.is_closed() {
        Some(LinkFailure::NotClosed)
    } else if !link.is_connected() {
        Some(LinkFailure::Disconnected)
    } else {
        let x = link.euler_characteristic();
        (x != chi).then_some(LinkFailure::EulerCharacteristic(x))
    }
}

/// Two-colours the pentachora so that every gluing reverses orientation.
pub fn is_orientable(t: &Triangulation) -> Result<bool, TriangulationError> {
    t.check_involution()?;
    let n = t.size();
    let mut sign = vec![0i32; n];
    let mut queue = VecDeque::new();
    for start in 0..n {
        if sign[start] != 0 {
            continue;
        }
        sign[start] = 1;
        queue.push_back(start);
        while let Some(p) = queue.pop_front() {
            for f in 0..5 {
                let Some(g) = t.gluing(p, f) else { continue };
                let want = -sign[p] * g.map.sign();
                if sign[g.target] == 0 {
                    sign[g.target] = want;
                    queue.push_back(g.target);
                } else if sign[g.target] != want {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

impl Triangulation {
    pub fn skeleton(&self) -> Result<Skeleton, TriangulationError> {
        Skeleton::compute(self)
    }

    pub fn f_vector(&self) -> Result<FVector, TriangulationError> {
        Ok(Skeleton::compute(self)?.f_vector())
    }

    pub fn euler_characteristic(&self) -> Result<i64, TriangulationError> {
        Ok(self.f_vector()?.euler_characteristic())
    }

    pub fn validity(&self) -> ValidityReport {
        validity_report(self)
    }

    /// Closed and passing every local check.
    pub fn is_valid(&self) -> bool {
        validity_report(self).is_valid()
    }

    pub fn is_orientable(&self) -> Result<bool, TriangulationError> {
        is_orientable(self)
    }
}
