//! Dual-source breadth-first search through the Pachner graph at fixed
//! `f4`, with a persistent visited store that can be checkpointed and
//! resumed.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::invariants::{homology, InvariantError};
use crate::isosig::{encode, IsoSig, IsoSigError};
use crate::moves::{apply_with, is_legal, MoveKind, TraceStep};
use crate::skeleton::Skeleton;
use crate::triangulation::Triangulation;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(transparent)]
    Signature(#[from] IsoSigError),
    #[error("store corruption in {path}: {reason}")]
    StoreCorruption { path: PathBuf, reason: String },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    /// Raised by the `interrupt_after` hook to simulate a killed process.
    #[error("interrupted after {expanded} expansions")]
    Interrupted { expanded: u64 },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> SearchError + '_ {
    move |source| SearchError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Which source a visited signature was first reached from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    A,
    B,
}

impl Tag {
    fn index(self) -> usize {
        match self {
            Tag::A => 0,
            Tag::B => 1,
        }
    }

    fn other(self) -> Tag {
        match self {
            Tag::A => Tag::B,
            Tag::B => Tag::A,
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tag::A => "A",
            Tag::B => "B",
        })
    }
}

impl std::str::FromStr for Tag {
    type Err = String;

    fn from_str(s: &str) -> Result<Tag, String> {
        match s {
            "A" => Ok(Tag::A),
            "B" => Ok(Tag::B),
            _ => Err(format!("unknown tag {s:?}")),
        }
    }
}

/// Moves along one arc of the search graph.
pub type Arc = Vec<TraceStep>;

fn format_arc(arc: &[TraceStep]) -> String {
    arc.iter()
        .map(|s| format!("{}:{}", s.kind, s.target))
        .collect::<Vec<_>>()
        .join(";")
}

fn parse_arc(text: &str) -> Result<Arc, String> {
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(';')
        .map(|part| {
            let (k, t) = part.split_once(':').ok_or_else(|| format!("bad arc step {part:?}"))?;
            Ok(TraceStep {
                kind: k.parse()?,
                target: t.parse().map_err(|_| format!("bad orbit index {t:?}"))?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub tag: Tag,
    pub depth: u32,
    /// Empty for the two sources.
    pub parent: String,
    /// Moves taking `decode(parent)` to a triangulation with this signature.
    pub arc: Arc,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    pub expanded: u64,
    pub generated: u64,
    pub checkpoints: u64,
}

/// Signatures visited so far, the BFS frontiers and monotone counters.
///
/// On disk a store is a directory holding `segments/seg-NNNNNN.tsv` (the
/// entries added between two checkpoints, sorted, with a checksummed
/// footer) and `state.txt` (frontiers and counters, checksummed, replaced
/// atomically).
#[derive(Debug, Clone, Default)]
pub struct VisitedStore {
    entries: HashMap<String, Entry>,
    unsaved: Vec<String>,
    segments: u32,
    dir: Option<PathBuf>,
    fingerprint: String,
    frontier: [Vec<String>; 2],
    next: Vec<String>,
    side: Option<Tag>,
    pos: usize,
    depth: [u32; 2],
    counters: Counters,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Insert {
    Inserted,
    Present(Tag),
}

impl VisitedStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// A fresh store persisted under `dir`. Existing store files there are
    /// removed.
    pub fn create(dir: &Path) -> Result<Self, SearchError> {
        let seg = dir.join("segments");
        if seg.exists() {
            fs::remove_dir_all(&seg).map_err(io_err(&seg))?;
        }
        fs::create_dir_all(&seg).map_err(io_err(&seg))?;
        let state = dir.join("state.txt");
        if state.exists() {
            fs::remove_file(&state).map_err(io_err(&state))?;
        }
        Ok(VisitedStore {
            dir: Some(dir.to_path_buf()),
            ..Default::default()
        })
    }

    pub fn len(&self) -> u64 {
        self.entries.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, sig: &str) -> Option<&Entry> {
        self.entries.get(sig)
    }

    pub fn counters(&self) -> Counters {
        self.counters
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    /// Inserts if absent; an existing entry is never modified.
    pub fn insert(&mut self, sig: &str, entry: Entry) -> Insert {
        if let Some(e) = self.entries.get(sig) {
            return Insert::Present(e.tag);
        }
        self.entries.insert(sig.to_owned(), entry);
        self.unsaved.push(sig.to_owned());
        Insert::Inserted
    }

    fn frontier_len(&self) -> u64 {
        let pending = match self.side {
            Some(s) => self.frontier[s.index()].len() - self.pos,
            None => 0,
        };
        let other = match self.side {
            Some(s) => self.frontier[s.other().index()].len(),
            None => 0,
        };
        (pending + other + self.next.len()) as u64
    }

    /// Signatures on the path from a source to `sig`, source first.
    fn chain(&self, sig: &str) -> Vec<(String, Arc)> {
        let mut out = Vec::new();
        let mut at = sig.to_owned();
        loop {
            let e = &self.entries[&at];
            out.push((at.clone(), e.arc.clone()));
            if e.parent.is_empty() {
                break;
            }
            at = e.parent.clone();
        }
        out.reverse();
        out
    }

    /// Writes pending entries as a new segment and replaces `state.txt`.
    /// A no-op for in-memory stores.
    pub fn checkpoint(&mut self) -> Result<(), SearchError> {
        let Some(dir) = self.dir.clone() else {
            return Ok(());
        };
        if !self.unsaved.is_empty() {
            let mut lines: Vec<String> = self
                .unsaved
                .iter()
                .map(|sig| {
                    let e = &self.entries[sig];
                    format!("{sig}\t{}\t{}\t{}\t{}\n", e.tag, e.depth, e.parent, format_arc(&e.arc))
                })
                .collect();
            lines.sort_unstable();
            let body: String = lines.concat();
            let digest = hex::encode(Sha256::digest(body.as_bytes()));
            let name = dir.join("segments").join(format!("seg-{:06}.tsv", self.segments + 1));
            write_atomic(&name, &format!("{body}#footer {} {digest}\n", lines.len()))?;
            self.segments += 1;
            self.unsaved.clear();
        }
        self.counters.checkpoints += 1;
        let mut state = String::new();
        state.push_str(&format!("fingerprint {}\n", self.fingerprint));
        state.push_str(&format!("segments {}\n", self.segments));
        state.push_str(&format!("entries {}\n", self.entries.len()));
        state.push_str(&format!(
            "counters {} {} {}\n",
            self.counters.expanded, self.counters.generated, self.counters.checkpoints
        ));
        state.push_str(&format!(
            "side {}\n",
            self.side.map_or("-".to_string(), |s| s.to_string())
        ));
        state.push_str(&format!("pos {}\n", self.pos));
        state.push_str(&format!("depth {} {}\n", self.depth[0], self.depth[1]));
        for (name, list) in [
            ("frontierA", &self.frontier[0]),
            ("frontierB", &self.frontier[1]),
            ("next", &self.next),
        ] {
            state.push_str(&format!("{name} {}\n", list.len()));
            for s in list {
                state.push_str(s);
                state.push('\n');
            }
        }
        let digest = hex::encode(Sha256::digest(state.as_bytes()));
        write_atomic(&dir.join("state.txt"), &format!("{state}#checksum {digest}\n"))?;
        Ok(())
    }

    /// Loads the last checkpoint under `dir`, merging segment files.
    pub fn resume(dir: &Path) -> Result<Self, SearchError> {
        let state_path = dir.join("state.txt");
        let corrupt = |path: &Path, reason: String| SearchError::StoreCorruption {
            path: path.to_path_buf(),
            reason,
        };
        let text = fs::read_to_string(&state_path).map_err(io_err(&state_path))?;
        let (body, digest) = split_trailer(&text, "#checksum ").ok_or_else(|| corrupt(&state_path, "missing checksum".into()))?;
        if hex::encode(Sha256::digest(body.as_bytes())) != digest {
            return Err(corrupt(&state_path, "checksum mismatch".into()));
        }
        let mut lines = body.lines();
        let mut field = |key: &str| -> Result<String, SearchError> {
            let line = lines.next().ok_or_else(|| corrupt(&state_path, format!("missing {key}")))?;
            let value = if key.is_empty() {
                Some(line)
            } else {
                line.strip_prefix(key).and_then(|r| r.strip_prefix(' '))
            };
            value
                .map(|s| s.to_string())
                .ok_or_else(|| corrupt(&state_path, format!("expected {key}, found {line:?}")))
        };
        let bad = |what: &str| corrupt(&state_path, format!("bad {what}"));
        let fingerprint = field("fingerprint")?;
        let segments: u32 = field("segments")?.parse().map_err(|_| bad("segments"))?;
        let entries: usize = field("entries")?.parse().map_err(|_| bad("entries"))?;
        let c: Vec<u64> = field("counters")?
            .split_whitespace()
            .map(|x| x.parse())
            .collect::<Result<_, _>>()
            .map_err(|_| bad("counters"))?;
        if c.len() != 3 {
            return Err(bad("counters"));
        }
        let side = match field("side")?.as_str() {
            "-" => None,
            s => Some(s.parse::<Tag>().map_err(|_| bad("side"))?),
        };
        let pos: usize = field("pos")?.parse().map_err(|_| bad("pos"))?;
        let d: Vec<u32> = field("depth")?
            .split_whitespace()
            .map(|x| x.parse())
            .collect::<Result<_, _>>()
            .map_err(|_| bad("depth"))?;
        if d.len() != 2 {
            return Err(bad("depth"));
        }
        let mut lists: Vec<Vec<String>> = Vec::new();
        for name in ["frontierA", "frontierB", "next"] {
            let n: usize = field(name)?.parse().map_err(|_| bad(name))?;
            let mut list = Vec::with_capacity(n);
            for _ in 0..n {
                list.push(field("")?);
            }
            lists.push(list);
        }
        let merged = merge_segments(dir, segments)?;
        if merged.len() != entries {
            return Err(corrupt(
                &state_path,
                format!("state lists {entries} entries, segments hold {}", merged.len()),
            ));
        }
        let next = lists.pop().unwrap_or_default();
        let fb = lists.pop().unwrap_or_default();
        let fa = lists.pop().unwrap_or_default();
        Ok(VisitedStore {
            entries: merged,
            unsaved: Vec::new(),
            segments,
            dir: Some(dir.to_path_buf()),
            fingerprint,
            frontier: [fa, fb],
            next,
            side,
            pos,
            depth: [d[0], d[1]],
            counters: Counters {
                expanded: c[0],
                generated: c[1],
                checkpoints: c[2],
            },
        })
    }
}

fn split_trailer<'a>(text: &'a str, marker: &str) -> Option<(&'a str, &'a str)> {
    let body_end = text.trim_end_matches('\n').rfind('\n').map_or(0, |i| i + 1);
    let last = text[body_end..].trim_end();
    last.strip_prefix(marker).map(|rest| (&text[..body_end], rest))
}

fn write_atomic(path: &Path, contents: &str) -> Result<(), SearchError> {
    let tmp = path.with_extension("tmp");
    let mut f = fs::File::create(&tmp).map_err(io_err(&tmp))?;
    f.write_all(contents.as_bytes()).map_err(io_err(&tmp))?;
    f.sync_all().map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))?;
    Ok(())
}

type Row = (String, Entry);

fn read_segment(path: &Path) -> Result<Vec<Row>, SearchError> {
    let corrupt = |reason: String| SearchError::StoreCorruption {
        path: path.to_path_buf(),
        reason,
    };
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let (body, footer) = split_trailer(&text, "#footer ").ok_or_else(|| corrupt("missing footer".into()))?;
    let (count, digest) = footer.split_once(' ').ok_or_else(|| corrupt("bad footer".into()))?;
    if hex::encode(Sha256::digest(body.as_bytes())) != digest {
        return Err(corrupt("checksum mismatch".into()));
    }
    let mut rows = Vec::new();
    for (i, line) in body.lines().enumerate() {
        let cols: Vec<&str> = line.split('\t').collect();
        let bad = |what: &str| corrupt(format!("line {}: bad {what}", i + 1));
        if cols.len() != 5 {
            return Err(bad("column count"));
        }
        rows.push((
            cols[0].to_string(),
            Entry {
                tag: cols[1].parse().map_err(|_| bad("tag"))?,
                depth: cols[2].parse().map_err(|_| bad("depth"))?,
                parent: cols[3].to_string(),
                arc: parse_arc(cols[4]).map_err(|_| bad("arc"))?,
            },
        ));
    }
    if count.parse::<usize>().ok() != Some(rows.len()) {
        return Err(corrupt("footer count mismatch".into()));
    }
    if rows.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(corrupt("segment not sorted".into()));
    }
    Ok(rows)
}

/// k-way merge of the sorted segments; a signature in two segments means
/// the store was written inconsistently.
fn merge_segments(dir: &Path, segments: u32) -> Result<HashMap<String, Entry>, SearchError> {
    let mut iters = Vec::new();
    for i in 1..=segments {
        let path = dir.join("segments").join(format!("seg-{i:06}.tsv"));
        iters.push(read_segment(&path)?.into_iter());
    }
    let mut heap = BinaryHeap::new();
    let mut pending: Vec<Option<Entry>> = vec![None; iters.len()];
    for (i, it) in iters.iter_mut().enumerate() {
        if let Some((sig, e)) = it.next() {
            heap.push(Reverse((sig, i)));
            pending[i] = Some(e);
        }
    }
    let mut out = HashMap::new();
    let mut last: Option<String> = None;
    while let Some(Reverse((sig, i))) = heap.pop() {
        if last.as_deref() == Some(sig.as_str()) {
            return Err(SearchError::StoreCorruption {
                path: dir.to_path_buf(),
                reason: format!("signature {sig} appears in two segments"),
            });
        }
        let e = pending[i].take().expect("entry paired with heap item");
        if let Some((s, e2)) = iters[i].next() {
            heap.push(Reverse((s, i)));
            pending[i] = Some(e2);
        }
        out.insert(sig.clone(), e);
        last = Some(sig);
    }
    Ok(out)
}

fn signature(t: &Triangulation) -> String {
    encode(t).expect("moves keep triangulations valid").into_string()
}

fn arcs_at_level(t: &Triangulation, skel: &Skeleton, kind: MoveKind) -> Vec<(Triangulation, TraceStep)> {
    (0..skel.count(kind.face_dim()))
        .filter(|&x| is_legal(t, skel, kind, x))
        .map(|x| {
            (
                apply_with(t, skel, kind, x).expect("legal move applies"),
                TraceStep { kind, target: x },
            )
        })
        .collect()
}

/// Neighbours of `t` in the search graph, as sorted `(signature, arc)`
/// pairs with the source itself excluded.
///
/// Cap 0 gives the 3-3 moves. Cap `k > 0` adds excursions of 2-4 and 4-2
/// moves that stack at most `k` 2-4 moves (so never exceed `f4 + 2k`) and
/// come back to the original size.
pub fn neighbors_of(t: &Triangulation, cap: usize) -> Vec<(String, Arc)> {
    let own = signature(t);
    let mut found: BTreeMap<String, Arc> = BTreeMap::new();
    let skel = Skeleton::compute_unchecked(t);
    for (next, step) in arcs_at_level(t, &skel, MoveKind::ThreeThree) {
        found.entry(signature(&next)).or_insert_with(|| vec![step]);
    }
    if cap > 0 {
        let base = t.size();
        let mut seen: HashSet<String> = HashSet::new();
        let mut stack: Vec<(Triangulation, Arc)> = vec![(t.clone(), Vec::new())];
        while let Some((cur, path)) = stack.pop() {
            let skel = Skeleton::compute_unchecked(&cur);
            let height = (cur.size() - base) / 2;
            let mut kinds = vec![];
            if height < cap {
                kinds.push(MoveKind::TwoFour);
            }
            if height > 0 {
                kinds.push(MoveKind::FourTwo);
            }
            for kind in kinds {
                for (next, step) in arcs_at_level(&cur, &skel, kind) {
                    let sig = signature(&next);
                    let mut arc = path.clone();
                    arc.push(step);
                    if next.size() == base {
                        found.entry(sig).or_insert(arc);
                    } else if seen.insert(sig) {
                        stack.push((next, arc));
                    }
                }
            }
        }
    }
    found.remove(&own);
    found.into_iter().collect()
}

/// Signatures adjacent to `sig` at the given level cap, sorted.
pub fn neighbors(sig: &IsoSig, cap: usize) -> Result<Vec<IsoSig>, SearchError> {
    let t = sig.decode()?;
    Ok(neighbors_of(&t, cap)
        .into_iter()
        .map(|(s, _)| s.parse().expect("encoder output parses"))
        .collect())
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub source_a: IsoSig,
    pub source_b: IsoSig,
    pub level_cap: usize,
    /// Maximum number of distinct signatures to store.
    pub node_budget: u64,
    pub workers: usize,
    /// Signatures inserted between checkpoints and progress lines.
    pub checkpoint_interval: u64,
    pub store: Option<PathBuf>,
    pub resume: bool,
    /// Test hook: fail with [`SearchError::Interrupted`] once this many
    /// nodes have been expanded, without writing a checkpoint.
    pub interrupt_after: Option<u64>,
}

impl SearchConfig {
    pub fn new(source_a: IsoSig, source_b: IsoSig) -> Self {
        SearchConfig {
            source_a,
            source_b,
            level_cap: 0,
            node_budget: 1_000_000,
            workers: 1,
            checkpoint_interval: 10_000,
            store: None,
            resume: false,
            interrupt_after: None,
        }
    }

    fn fingerprint(&self) -> String {
        format!("{} {} {}", self.source_a, self.source_b, self.level_cap)
    }
}

/// One arc of a connecting path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathArc {
    pub from: IsoSig,
    pub moves: Arc,
    pub to: IsoSig,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectingPath {
    /// From source A to the meeting signature.
    pub a_side: Vec<PathArc>,
    /// From source B to the meeting signature.
    pub b_side: Vec<PathArc>,
}

impl ConnectingPath {
    /// Replays every arc and checks that both sides end at `meeting`.
    pub fn verify(&self, a: &IsoSig, b: &IsoSig, meeting: &IsoSig) -> Result<(), String> {
        for (side, source, arcs) in [("A", a, &self.a_side), ("B", b, &self.b_side)] {
            let mut at = source.clone();
            for arc in arcs {
                if arc.from != at {
                    return Err(format!("side {side}: arc starts at {} not {at}", arc.from));
                }
                let t = arc.from.decode().map_err(|e| e.to_string())?;
                let out = crate::moves::replay(&t, &arc.moves).map_err(|e| e.to_string())?;
                let got = IsoSig::of(&out).map_err(|e| e.to_string())?;
                if got != arc.to {
                    return Err(format!("side {side}: arc to {} replays to {got}", arc.to));
                }
                at = arc.to.clone();
            }
            if &at != meeting {
                return Err(format!("side {side} ends at {at}, not the meeting point"));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.a_side.len() + self.b_side.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Connected {
        meeting: IsoSig,
        a_length: usize,
        b_length: usize,
        path: ConnectingPath,
    },
    ExhaustedLevel {
        count: u64,
    },
    BudgetExhausted {
        visited: u64,
        expanded: u64,
    },
    /// The sources differ in homology, so no path exists at any level.
    NeverConnectable {
        reason: String,
    },
}

impl SearchOutcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            SearchOutcome::Connected { .. } => 0,
            SearchOutcome::ExhaustedLevel { .. } => 10,
            SearchOutcome::BudgetExhausted { .. } => 11,
            SearchOutcome::NeverConnectable { .. } => 12,
        }
    }
}

impl fmt::Display for SearchOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchOutcome::Connected {
                meeting,
                a_length,
                b_length,
                ..
            } => write!(f, "connected length={} a={a_length} b={b_length} meeting={meeting}", a_length + b_length),
            SearchOutcome::ExhaustedLevel { count } => write!(f, "exhausted count={count}"),
            SearchOutcome::BudgetExhausted { visited, expanded } => {
                write!(f, "budget-exhausted visited={visited} expanded={expanded}")
            }
            SearchOutcome::NeverConnectable { reason } => write!(f, "never-connectable {reason}"),
        }
    }
}

/// Snapshot passed to the progress callback.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Progress {
    pub level: usize,
    pub depth: u32,
    pub visited: u64,
    pub frontier: u64,
    pub rate: f64,
}

impl fmt::Display for Progress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "level={} depth={} visited={} frontier={} rate={:.1}",
            self.level, self.depth, self.visited, self.frontier, self.rate
        )
    }
}

/// Result of a search plus the store it left behind.
#[derive(Debug)]
pub struct SearchRun {
    pub outcome: SearchOutcome,
    pub store: VisitedStore,
}

pub fn dual_source_bfs(cfg: &SearchConfig) -> Result<SearchRun, SearchError> {
    dual_source_bfs_with_progress(cfg, &mut |_| {})
}

const CHUNK: usize = 64;

pub fn dual_source_bfs_with_progress(
    cfg: &SearchConfig,
    progress: &mut dyn FnMut(&Progress),
) -> Result<SearchRun, SearchError> {
    if cfg.workers == 0 {
        return Err(SearchError::Config("worker count must be positive".into()));
    }
    if cfg.node_budget == 0 {
        return Err(SearchError::Config("node budget must be positive".into()));
    }
    let ta = cfg.source_a.decode()?;
    let tb = cfg.source_b.decode()?;
    for (name, t) in [("A", &ta), ("B", &tb)] {
        let report = t.validity();
        if !report.is_valid() {
            return Err(SearchError::Config(format!("source {name} is not closed and valid:\n{report}")));
        }
    }
    if ta.size() != tb.size() {
        return Err(SearchError::Config(format!(
            "sources have {} and {} pentachora",
            ta.size(),
            tb.size()
        )));
    }
    let (ha, hb) = (homology(&ta)?, homology(&tb)?);
    let mut store = if cfg.resume {
        let dir = cfg
            .store
            .as_deref()
            .ok_or_else(|| SearchError::Config("resume needs a store directory".into()))?;
        let store = VisitedStore::resume(dir)?;
        if store.fingerprint != cfg.fingerprint() {
            return Err(SearchError::Config("store was written for different sources or level".into()));
        }
        store
    } else {
        match &cfg.store {
            Some(dir) => VisitedStore::create(dir)?,
            None => VisitedStore::new(),
        }
    };
    if ha != hb {
        let show = |h: &[crate::invariants::HomologyGroup]| {
            h.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(", ")
        };
        return Ok(SearchRun {
            outcome: SearchOutcome::NeverConnectable {
                reason: format!("homology ({}) vs ({})", show(&ha), show(&hb)),
            },
            store,
        });
    }
    let (sa, sb) = (cfg.source_a.as_str().to_owned(), cfg.source_b.as_str().to_owned());
    if sa == sb {
        return Ok(SearchRun {
            outcome: SearchOutcome::Connected {
                meeting: cfg.source_a.clone(),
                a_length: 0,
                b_length: 0,
                path: ConnectingPath {
                    a_side: vec![],
                    b_side: vec![],
                },
            },
            store,
        });
    }
    if !cfg.resume {
        store.fingerprint = cfg.fingerprint();
        let root = |tag| Entry {
            tag,
            depth: 0,
            parent: String::new(),
            arc: Vec::new(),
        };
        store.insert(&sa, root(Tag::A));
        store.insert(&sb, root(Tag::B));
        store.frontier = [vec![sa.clone()], vec![sb.clone()]];
        store.side = Some(Tag::A);
        store.checkpoint()?;
    }

    let started = Instant::now();
    let start_visited = store.len();
    let mut since_checkpoint = 0u64;
    loop {
        let Some(side) = store.side else {
            let count = store.len();
            return Ok(finish(store, SearchOutcome::ExhaustedLevel { count }));
        };
        let si = side.index();
        if store.pos >= store.frontier[si].len() {
            // level barrier
            store.frontier[si] = std::mem::take(&mut store.next);
            if !store.frontier[si].is_empty() {
                store.depth[si] += 1;
            }
            store.pos = 0;
            let other = side.other();
            if store.frontier[0].is_empty() && store.frontier[1].is_empty() {
                let count = store.len();
                store.side = None;
                store.checkpoint()?;
                return Ok(finish(store, SearchOutcome::ExhaustedLevel { count }));
            }
            if !store.frontier[other.index()].is_empty() {
                store.side = Some(other);
            }
            continue;
        }
        let end = (store.pos + CHUNK.max(cfg.workers * 8)).min(store.frontier[si].len());
        let batch: Vec<String> = store.frontier[si][store.pos..end].to_vec();
        let expanded = expand_batch(&batch, cfg.level_cap, cfg.workers)?;
        for (parent, nbrs) in batch.iter().zip(expanded) {
            store.counters.expanded += 1;
            if cfg.interrupt_after == Some(store.counters.expanded) {
                return Err(SearchError::Interrupted {
                    expanded: store.counters.expanded,
                });
            }
            let depth = store.entries[parent].depth + 1;
            for (sig, arc) in nbrs {
                store.counters.generated += 1;
                match store.get(&sig).map(|e| e.tag) {
                    Some(t) if t == side => {}
                    Some(_) => {
                        let outcome = connected(&store, side, parent, &sig, &arc);
                        return Ok(finish(store, outcome));
                    }
                    None => {
                        if store.len() >= cfg.node_budget {
                            let outcome = SearchOutcome::BudgetExhausted {
                                visited: store.len(),
                                expanded: store.counters.expanded,
                            };
                            store.checkpoint()?;
                            return Ok(finish(store, outcome));
                        }
                        store.insert(
                            &sig,
                            Entry {
                                tag: side,
                                depth,
                                parent: parent.clone(),
                                arc,
                            },
                        );
                        store.next.push(sig);
                        since_checkpoint += 1;
                    }
                }
            }
            store.pos += 1;
        }
        if since_checkpoint >= cfg.checkpoint_interval {
            since_checkpoint = 0;
            store.checkpoint()?;
            let secs = started.elapsed().as_secs_f64().max(1e-9);
            progress(&Progress {
                level: cfg.level_cap,
                depth: store.depth[si],
                visited: store.len(),
                frontier: store.frontier_len(),
                rate: (store.len() - start_visited) as f64 / secs,
            });
        }
    }
}

fn finish(store: VisitedStore, outcome: SearchOutcome) -> SearchRun {
    SearchRun { outcome, store }
}

fn expand_batch(batch: &[String], cap: usize, workers: usize) -> Result<Vec<Vec<(String, Arc)>>, SearchError> {
    let work = |sigs: &[String]| -> Result<Vec<Vec<(String, Arc)>>, SearchError> {
        sigs.iter()
            .map(|s| Ok(neighbors_of(&crate::isosig::decode(s)?, cap)))
            .collect()
    };
    if workers <= 1 || batch.len() <= 1 {
        return work(batch);
    }
    let per = batch.len().div_ceil(workers);
    std::thread::scope(|scope| {
        let handles: Vec<_> = batch.chunks(per).map(|c| scope.spawn(move || work(c))).collect();
        let mut out = Vec::with_capacity(batch.len());
        for h in handles {
            out.extend(h.join().expect("worker panicked")?);
        }
        Ok(out)
    })
}

fn connected(store: &VisitedStore, side: Tag, parent: &str, meeting: &str, arc: &Arc) -> SearchOutcome {
    let to_arcs = |chain: Vec<(String, Arc)>| -> Vec<PathArc> {
        chain
            .windows(2)
            .map(|w| PathArc {
                from: w[0].0.parse().expect("stored signature"),
                moves: w[1].1.clone(),
                to: w[1].0.parse().expect("stored signature"),
            })
            .collect()
    };
    let mut this_side = to_arcs(store.chain(parent));
    this_side.push(PathArc {
        from: parent.parse().expect("stored signature"),
        moves: arc.clone(),
        to: meeting.parse().expect("stored signature"),
    });
    let other_side = to_arcs(store.chain(meeting));
    let (a_side, b_side) = match side {
        Tag::A => (this_side, other_side),
        Tag::B => (other_side, this_side),
    };
    SearchOutcome::Connected {
        meeting: meeting.parse().expect("stored signature"),
        a_length: a_side.len(),
        b_length: b_side.len(),
        path: ConnectingPath { a_side, b_side },
    }
}

/// Distinct signatures per tag and per (tag, depth).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CensusStats {
    pub total: u64,
    pub per_tag: BTreeMap<Tag, u64>,
    pub depth_histogram: BTreeMap<(Tag, u32), u64>,
    pub counters: Counters,
}

impl fmt::Display for CensusStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ((tag, depth), n) in &self.depth_histogram {
            writeln!(f, "tag={tag} depth={depth} count={n}")?;
        }
        for (tag, n) in &self.per_tag {
            writeln!(f, "tag={tag} total={n}")?;
        }
        writeln!(
            f,
            "expanded={} generated={} checkpoints={}",
            self.counters.expanded, self.counters.generated, self.counters.checkpoints
        )?;
        write!(f, "distinct={}", self.total)
    }
}

pub fn census_stats(store: &VisitedStore) -> CensusStats {
    let mut stats = CensusStats {
        total: store.len(),
        counters: store.counters,
        ..Default::default()
    };
    for e in store.entries.values() {
        *stats.per_tag.entry(e.tag).or_default() += 1;
        *stats.depth_histogram.entry((e.tag, e.depth)).or_default() += 1;
    }
    stats
}
