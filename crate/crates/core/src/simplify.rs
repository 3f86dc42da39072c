//! Simplification heuristics: greedy reduction, composite collapse moves,
//! simulated annealing and bounded breadth-first search, plus a pipeline
//! that runs them in rounds.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::time::{Duration, Instant};

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::invariants::{homology_from_skeleton, HomologyGroup, InvariantError};
use crate::isosig::encode;
use crate::moves::{apply_with, is_legal, MoveError, MoveKind, TraceStep};
use crate::skeleton::{FVector, Skeleton};
use crate::triangulation::Triangulation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimplifyError {
    #[error("input is not a closed valid triangulation:\n{0}")]
    InvalidInput(String),
    #[error("invariant changed after {phase} ({what}); trace:\n{trace}")]
    InvariantViolation {
        phase: Phase,
        what: String,
        trace: String,
    },
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error(transparent)]
    Move(#[from] MoveError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    Greedy,
    Collapse,
    Anneal,
    Bfs,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Greedy => "greedy",
            Phase::Collapse => "collapse",
            Phase::Anneal => "anneal",
            Phase::Bfs => "bfs",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Reduced,
    LocalMinimum,
    BudgetExhausted,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Reduced => "reduced",
            Outcome::LocalMinimum => "local-minimum",
            Outcome::BudgetExhausted => "budget-exhausted",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PhaseStats {
    pub tried: u64,
    pub applied: u64,
    pub elapsed: Duration,
    /// Reduction of `f4` attributed to the phase.
    pub f4_gain: i64,
    /// Reduction of `f0` attributed to the phase.
    pub f0_gain: i64,
}

impl PhaseStats {
    fn absorb(&mut self, other: &PhaseStats) {
        self.tried += other.tried;
        self.applied += other.applied;
        self.elapsed += other.elapsed;
        self.f4_gain += other.f4_gain;
        self.f0_gain += other.f0_gain;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplifyReport {
    pub initial: FVector,
    pub fin: FVector,
    pub trace: Vec<TraceStep>,
    pub phases: BTreeMap<Phase, PhaseStats>,
    pub rounds: usize,
    /// Smallest `f4` visited at any point, including states later discarded.
    pub lowest_f4: u64,
    pub outcome: Outcome,
}

impl SimplifyReport {
    fn new(initial: FVector) -> Self {
        SimplifyReport {
            initial,
            fin: initial,
            trace: Vec::new(),
            phases: BTreeMap::new(),
            rounds: 0,
            lowest_f4: initial.f4(),
            outcome: Outcome::LocalMinimum,
        }
    }

    fn merge(&mut self, phase: Phase, other: SimplifyReport) {
        self.trace.extend(other.trace);
        self.fin = other.fin;
        self.lowest_f4 = self.lowest_f4.min(other.lowest_f4);
        let mut stats = PhaseStats::default();
        for s in other.phases.values() {
            stats.absorb(s);
        }
        stats.f4_gain = other.initial.f4() as i64 - other.fin.f4() as i64;
        stats.f0_gain = other.initial.f0() as i64 - other.fin.f0() as i64;
        self.phases.entry(phase).or_default().absorb(&stats);
    }

    /// Keeps the phase's work counters but not its result.
    fn discard(&mut self, phase: Phase, other: SimplifyReport) {
        self.lowest_f4 = self.lowest_f4.min(other.lowest_f4);
        let entry = self.phases.entry(phase).or_default();
        for s in other.phases.values() {
            entry.tried += s.tried;
            entry.elapsed += s.elapsed;
        }
    }

    /// Accepts a phase result unless it is larger in `(f4, f0)` order.
    fn offer(&mut self, phase: Phase, cur: &mut Triangulation, next: Triangulation, other: SimplifyReport) {
        if smaller(&self.fin, &other.fin) {
            self.discard(phase, other);
        } else {
            *cur = next;
            self.merge(phase, other);
        }
    }
}

impl fmt::Display for SimplifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "initial {}", self.initial)?;
        writeln!(f, "final {}", self.fin)?;
        writeln!(f, "rounds {}", self.rounds)?;
        writeln!(f, "moves {}", self.trace.len())?;
        writeln!(f, "lowest_f4 {}", self.lowest_f4)?;
        for (phase, s) in &self.phases {
            writeln!(
                f,
                "phase {phase} tried={} applied={} f4_gain={} f0_gain={} time={:.3}s",
                s.tried,
                s.applied,
                s.f4_gain,
                s.f0_gain,
                s.elapsed.as_secs_f64()
            )?;
        }
        writeln!(f, "outcome {}", self.outcome)?;
        write!(f, "f4={} f0={}", self.fin.f4(), self.fin.f0())
    }
}

fn require_valid(t: &Triangulation) -> Result<(), SimplifyError> {
    let report = t.validity();
    if report.is_valid() {
        Ok(())
    } else {
        Err(SimplifyError::InvalidInput(report.to_string()))
    }
}

fn first_legal(t: &Triangulation, skel: &Skeleton, kinds: &[MoveKind], tried: &mut u64) -> Option<TraceStep> {
    for &kind in kinds {
        for target in 0..skel.count(kind.face_dim()) {
            *tried += 1;
            if is_legal(t, skel, kind, target) {
                return Some(TraceStep { kind, target });
            }
        }
    }
    None
}

/// Applies the first legal reducing move (5-1, then collapse, then 4-2, by
/// orbit index) until none remains.
pub fn greedy(t: &Triangulation) -> Result<(Triangulation, SimplifyReport), SimplifyError> {
    require_valid(t)?;
    Ok(greedy_unchecked(t))
}

fn greedy_unchecked(t: &Triangulation) -> (Triangulation, SimplifyReport) {
    let start = Instant::now();
    let mut cur = t.clone();
    let mut skel = Skeleton::compute_unchecked(&cur);
    let mut report = SimplifyReport::new(skel.f_vector());
    let mut stats = PhaseStats::default();
    while let Some(s) = first_legal(&cur, &skel, &MoveKind::REDUCING, &mut stats.tried) {
        cur = apply_with(&cur, &skel, s.kind, s.target).expect("legal move applies");
        skel = Skeleton::compute_unchecked(&cur);
        report.trace.push(s);
        stats.applied += 1;
    }
    report.fin = skel.f_vector();
    report.lowest_f4 = report.fin.f4();
    report.outcome = if stats.applied > 0 {
        Outcome::Reduced
    } else {
        Outcome::LocalMinimum
    };
    stats.elapsed = start.elapsed();
    stats.f4_gain = report.initial.f4() as i64 - report.fin.f4() as i64;
    stats.f0_gain = report.initial.f0() as i64 - report.fin.f0() as i64;
    report.phases.insert(Phase::Greedy, stats);
    (cur, report)
}

fn cost(fv: &FVector, beta: f64) -> f64 {
    fv.f4() as f64 + beta * fv.f0() as f64
}

/// Greedy reduction interleaved with two-move composites: a 3-3 or 2-4 move
/// followed by a reducing move, kept when the pair lowers `f4 + β·f0`.
pub fn collapse_phase(t: &Triangulation, beta: f64) -> Result<(Triangulation, SimplifyReport), SimplifyError> {
    require_valid(t)?;
    Ok(collapse_phase_unchecked(t, beta))
}

fn collapse_phase_unchecked(t: &Triangulation, beta: f64) -> (Triangulation, SimplifyReport) {
    let start = Instant::now();
    let (mut cur, g) = greedy_unchecked(t);
    let mut report = SimplifyReport::new(g.initial);
    let mut stats = g.phases[&Phase::Greedy];
    report.trace = g.trace;
    'outer: loop {
        let skel = Skeleton::compute_unchecked(&cur);
        let here = cost(&skel.f_vector(), beta);
        for kind in [MoveKind::ThreeThree, MoveKind::TwoFour] {
            for target in 0..skel.count(kind.face_dim()) {
                stats.tried += 1;
                if !is_legal(&cur, &skel, kind, target) {
                    continue;
                }
                let mid = apply_with(&cur, &skel, kind, target).expect("legal move applies");
                let mid_skel = Skeleton::compute_unchecked(&mid);
                let Some(second) = first_legal(&mid, &mid_skel, &MoveKind::REDUCING, &mut stats.tried) else {
                    continue;
                };
                let next = apply_with(&mid, &mid_skel, second.kind, second.target).expect("legal move applies");
                let next_fv = Skeleton::compute_unchecked(&next).f_vector();
                if cost(&next_fv, beta) < here {
                    report.trace.push(TraceStep { kind, target });
                    report.trace.push(second);
                    stats.applied += 2;
                    let (reduced, g) = greedy_unchecked(&next);
                    report.trace.extend(g.trace);
                    stats.applied += g.phases[&Phase::Greedy].applied;
                    stats.tried += g.phases[&Phase::Greedy].tried;
                    cur = reduced;
                    continue 'outer;
                }
            }
        }
        break;
    }
    report.fin = Skeleton::compute_unchecked(&cur).f_vector();
    report.lowest_f4 = report.fin.f4();
    report.outcome = if report.trace.is_empty() {
        Outcome::LocalMinimum
    } else {
        Outcome::Reduced
    };
    stats.elapsed = start.elapsed();
    stats.f4_gain = report.initial.f4() as i64 - report.fin.f4() as i64;
    stats.f0_gain = report.initial.f0() as i64 - report.fin.f0() as i64;
    report.phases.insert(Phase::Collapse, stats);
    (cur, report)
}

/// Parameters of the annealing walk.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnealSchedule {
    pub initial_temperature: f64,
    /// Applied after every accepted move that raises the cost.
    pub cooling: f64,
    /// Steps without a new best before the temperature doubles, never
    /// rising above `initial_temperature`.
    pub reheat_after: u64,
    pub weights: BTreeMap<MoveKind, f64>,
    pub max_steps: u64,
    pub seed: u64,
    /// Cost is `f4 + beta * f0`.
    pub beta: f64,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        AnnealSchedule {
            initial_temperature: 2.0,
            cooling: 0.995,
            reheat_after: 500,
            weights: BTreeMap::from([
                (MoveKind::ThreeThree, 4.0),
                (MoveKind::TwoFour, 2.0),
                (MoveKind::FourTwo, 4.0),
                (MoveKind::FiveOne, 8.0),
                (MoveKind::Collapse, 8.0),
                (MoveKind::OneFive, 1.0),
            ]),
            max_steps: 100_000,
            seed: 0,
            beta: 6.0,
        }
    }
}

impl AnnealSchedule {
    pub fn validate(&self) -> Result<(), String> {
        if self.initial_temperature.is_nan() || self.initial_temperature < 0.0 {
            return Err("initial temperature must be nonnegative".into());
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return Err("cooling factor must lie in (0, 1)".into());
        }
        if self.weights.values().any(|w| w.is_nan() || *w < 0.0) || self.weights.values().all(|w| *w == 0.0) {
            return Err("move weights must be nonnegative and not all zero".into());
        }
        Ok(())
    }
}

/// Random walk over all move kinds. Moves that do not raise the cost are
/// always taken; others with probability `exp(-Δcost / T)`. Returns the
/// cheapest triangulation seen, with the trace cut at that point.
pub fn anneal(t: &Triangulation, schedule: &AnnealSchedule) -> Result<(Triangulation, SimplifyReport), SimplifyError> {
    require_valid(t)?;
    schedule
        .validate()
        .map_err(|message| SimplifyError::Config { line: 0, message })?;
    Ok(anneal_unchecked(t, schedule))
}

fn anneal_unchecked(t: &Triangulation, schedule: &AnnealSchedule) -> (Triangulation, SimplifyReport) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(schedule.seed);
    let kinds: Vec<(MoveKind, f64)> = schedule
        .weights
        .iter()
        .filter(|(_, w)| **w > 0.0)
        .map(|(k, w)| (*k, *w))
        .collect();
    let dist = WeightedIndex::new(kinds.iter().map(|(_, w)| *w)).expect("weights validated");
    let mut cur = t.clone();
    let mut skel = Skeleton::compute_unchecked(&cur);
    let mut fv = skel.f_vector();
    let mut report = SimplifyReport::new(fv);
    let mut stats = PhaseStats::default();
    let mut trace = Vec::new();
    let mut best = (cur.clone(), fv, 0usize);
    let mut temperature = schedule.initial_temperature;
    let mut stall = 0u64;
    let mut targets: Vec<usize> = Vec::new();
    for _ in 0..schedule.max_steps {
        stats.tried += 1;
        let kind = kinds[dist.sample(&mut rng)].0;
        targets.clear();
        targets.extend(0..skel.count(kind.face_dim()));
        targets.shuffle(&mut rng);
        let chosen = targets.iter().copied().find(|&x| is_legal(&cur, &skel, kind, x));
        if let Some(target) = chosen {
            let next = apply_with(&cur, &skel, kind, target).expect("legal move applies");
            let next_skel = Skeleton::compute_unchecked(&next);
            let next_fv = next_skel.f_vector();
            debug_assert_eq!(next_fv.euler_characteristic(), fv.euler_characteristic());
            let delta = cost(&next_fv, schedule.beta) - cost(&fv, schedule.beta);
            let accept = delta <= 0.0 || (temperature > 0.0 && rng.gen::<f64>() < (-delta / temperature).exp());
            if accept {
                if delta > 0.0 {
                    temperature *= schedule.cooling;
                }
                cur = next;
                skel = next_skel;
                fv = next_fv;
                trace.push(TraceStep { kind, target });
                stats.applied += 1;
                report.lowest_f4 = report.lowest_f4.min(fv.f4());
            }
        }
        if cost(&fv, schedule.beta) < cost(&best.1, schedule.beta) {
            best = (cur.clone(), fv, trace.len());
            stall = 0;
        } else {
            stall += 1;
            if stall >= schedule.reheat_after {
                temperature = (temperature * 2.0).min(schedule.initial_temperature);
                stall = 0;
            }
        }
    }
    trace.truncate(best.2);
    report.trace = trace;
    report.fin = best.1;
    report.outcome = if cost(&best.1, schedule.beta) < cost(&report.initial, schedule.beta) {
        Outcome::Reduced
    } else {
        Outcome::LocalMinimum
    };
    stats.elapsed = start.elapsed();
    stats.f4_gain = report.initial.f4() as i64 - report.fin.f4() as i64;
    stats.f0_gain = report.initial.f0() as i64 - report.fin.f0() as i64;
    report.phases.insert(Phase::Anneal, stats);
    (best.0, report)
}

fn smaller(a: &FVector, b: &FVector) -> bool {
    (a.f4(), a.f0()) < (b.f4(), b.f0())
}

/// Breadth-first search over bistellar moves, never exceeding
/// `f4(t) + height` pentachora, for a triangulation smaller than `t` in
/// `(f4, f0)` order. `nodes` caps the number of distinct signatures.
pub fn bfs_simplify(t: &Triangulation, height: u64, nodes: u64) -> Result<(Triangulation, SimplifyReport), SimplifyError> {
    require_valid(t)?;
    Ok(bfs_unchecked(t, height, nodes))
}

fn bfs_unchecked(t: &Triangulation, height: u64, nodes: u64) -> (Triangulation, SimplifyReport) {
    let start = Instant::now();
    let root_fv = Skeleton::compute_unchecked(t).f_vector();
    let mut report = SimplifyReport::new(root_fv);
    let mut stats = PhaseStats::default();
    let cap = root_fv.f4() + height;
    // node id -> (parent id, step)
    let mut parents: Vec<(usize, Option<TraceStep>)> = vec![(0, None)];
    let mut seen: HashMap<String, ()> = HashMap::new();
    seen.insert(encode(t).expect("valid input").into_string(), ());
    let mut level: Vec<(usize, Triangulation)> = vec![(0, t.clone())];
    let mut found: Option<(usize, Triangulation, FVector)> = None;
    let mut exhausted = false;
    'search: while !level.is_empty() {
        let mut next_level = Vec::new();
        for (id, cur) in &level {
            if seen.len() as u64 >= nodes {
                exhausted = true;
                break 'search;
            }
            let skel = Skeleton::compute_unchecked(cur);
            for kind in MoveKind::BISTELLAR {
                let grow = kind.f_delta().expect("bistellar").0[4];
                if (skel.count(4) as i64 + grow) as u64 > cap {
                    continue;
                }
                for target in 0..skel.count(kind.face_dim()) {
                    stats.tried += 1;
                    if !is_legal(cur, &skel, kind, target) {
                        continue;
                    }
                    let next = apply_with(cur, &skel, kind, target).expect("legal move applies");
                    let sig = encode(&next).expect("valid").into_string();
                    if seen.contains_key(&sig) {
                        continue;
                    }
                    seen.insert(sig, ());
                    let nid = parents.len();
                    parents.push((*id, Some(TraceStep { kind, target })));
                    let fv = Skeleton::compute_unchecked(&next).f_vector();
                    if smaller(&fv, &root_fv) {
                        found = Some((nid, next, fv));
                        break 'search;
                    }
                    next_level.push((nid, next));
                    if seen.len() as u64 >= nodes {
                        exhausted = true;
                        break 'search;
                    }
                }
            }
        }
        level = next_level;
    }
    let result = match found {
        Some((nid, tri, fv)) => {
            let mut steps = Vec::new();
            let mut at = nid;
            while let (parent, Some(s)) = parents[at] {
                steps.push(s);
                at = parent;
            }
            steps.reverse();
            stats.applied = steps.len() as u64;
            report.trace = steps;
            report.fin = fv;
            report.lowest_f4 = fv.f4();
            report.outcome = Outcome::Reduced;
            tri
        }
        None => {
            report.outcome = if exhausted {
                Outcome::BudgetExhausted
            } else {
                Outcome::LocalMinimum
            };
            t.clone()
        }
    };
    stats.elapsed = start.elapsed();
    stats.f4_gain = report.initial.f4() as i64 - report.fin.f4() as i64;
    stats.f0_gain = report.initial.f0() as i64 - report.fin.f0() as i64;
    report.phases.insert(Phase::Bfs, stats);
    (result, report)
}

/// Budgets and parameters for [`pipeline`].
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub schedule: AnnealSchedule,
    /// Total annealing steps over all rounds.
    pub step_budget: u64,
    pub bfs_height: u64,
    pub bfs_nodes: u64,
    pub max_rounds: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            schedule: AnnealSchedule::default(),
            step_budget: 1_000_000,
            bfs_height: 2,
            bfs_nodes: 1_000_000,
            max_rounds: 100,
        }
    }
}

impl PipelineConfig {
    /// Reads `key = value` lines over the defaults; `#` starts a comment.
    pub fn parse(text: &str) -> Result<PipelineConfig, SimplifyError> {
        let mut cfg = PipelineConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| SimplifyError::Config { line: i + 1, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, found {line:?}")))?;
            cfg.set(key.trim(), value.trim()).map_err(err)?;
        }
        cfg.schedule.validate().map_err(|message| SimplifyError::Config { line: 0, message })?;
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, String> {
            v.parse().map_err(|_| format!("bad value {v:?} for {key}"))
        }
        let s = &mut self.schedule;
        match key {
            "anneal_steps" => s.max_steps = num(key, value)?,
            "initial_temperature" => s.initial_temperature = num(key, value)?,
            "cooling" => s.cooling = num(key, value)?,
            "reheat_after" => s.reheat_after = num(key, value)?,
            "seed" => s.seed = num(key, value)?,
            "beta" => s.beta = num(key, value)?,
            "step_budget" => self.step_budget = num(key, value)?,
            "bfs_height" => self.bfs_height = num(key, value)?,
            "bfs_nodes" => self.bfs_nodes = num(key, value)?,
            "max_rounds" => self.max_rounds = num(key, value)?,
            _ => {
                let kind = key
                    .strip_prefix("weight.")
                    .ok_or_else(|| format!("unknown key {key:?}"))?
                    .parse::<MoveKind>()?;
                s.weights.insert(kind, num(key, value)?);
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let s = &self.schedule;
        let mut out = format!(
            "anneal_steps = {}\ninitial_temperature = {}\ncooling = {}\nreheat_after = {}\nseed = {}\nbeta = {}\nstep_budget = {}\nbfs_height = {}\nbfs_nodes = {}\nmax_rounds = {}\n",
            s.max_steps, s.initial_temperature, s.cooling, s.reheat_after, s.seed, s.beta,
            self.step_budget, self.bfs_height, self.bfs_nodes, self.max_rounds
        );
        for (k, w) in &s.weights {
            out.push_str(&format!("weight.{k} = {w}\n"));
        }
        out
    }
}

struct Snapshot {
    chi: i64,
    homology: Vec<HomologyGroup>,
    orientable: bool,
}

fn snapshot(t: &Triangulation) -> Result<Snapshot, SimplifyError> {
    let skel = Skeleton::compute(t).map_err(InvariantError::from)?;
    Ok(Snapshot {
        chi: skel.f_vector().euler_characteristic(),
        homology: homology_from_skeleton(&skel)?,
        orientable: t.is_orientable().map_err(InvariantError::from)?,
    })
}

fn verify(t: &Triangulation, want: &Snapshot, phase: Phase, trace: &[TraceStep]) -> Result<(), SimplifyError> {
    let violation = |what: String| SimplifyError::InvariantViolation {
        phase,
        what,
        trace: crate::moves::format_trace(trace),
    };
    let report = t.validity();
    if !report.is_valid() {
        return Err(violation(format!("validity: {report}")));
    }
    let got = snapshot(t)?;
    if got.chi != want.chi {
        return Err(violation(format!("euler characteristic {} -> {}", want.chi, got.chi)));
    }
    if got.homology != want.homology {
        return Err(violation("homology".into()));
    }
    if got.orientable != want.orientable {
        return Err(violation("orientability".into()));
    }
    Ok(())
}

/// Rounds of greedy, collapse, anneal and bfs phases until a round makes no
/// progress in `(f4, f0)`, the step budget runs out, or `max_rounds` pass.
/// A phase result larger in `(f4, f0)` is dropped and the next phase starts
/// from the previous state. Invariants are re-checked after every phase.
pub fn pipeline(t: &Triangulation, cfg: &PipelineConfig) -> Result<(Triangulation, SimplifyReport), SimplifyError> {
    require_valid(t)?;
    cfg.schedule
        .validate()
        .map_err(|message| SimplifyError::Config { line: 0, message })?;
    let want = snapshot(t)?;
    let mut cur = t.clone();
    let mut report = SimplifyReport::new(Skeleton::compute_unchecked(t).f_vector());
    let mut budget = cfg.step_budget;
    for round in 0..cfg.max_rounds {
        report.rounds = round + 1;
        let round_start = report.fin;

        let (next, r) = greedy_unchecked(&cur);
        verify(&next, &want, Phase::Greedy, &[&report.trace[..], &r.trace[..]].concat())?;
        report.offer(Phase::Greedy, &mut cur, next, r);

        let (next, r) = collapse_phase_unchecked(&cur, cfg.schedule.beta);
        verify(&next, &want, Phase::Collapse, &[&report.trace[..], &r.trace[..]].concat())?;
        report.offer(Phase::Collapse, &mut cur, next, r);

        if budget > 0 {
            let mut schedule = cfg.schedule.clone();
            schedule.max_steps = schedule.max_steps.min(budget);
            schedule.seed = cfg.schedule.seed.wrapping_add(round as u64);
            budget -= schedule.max_steps;
            let (next, r) = anneal_unchecked(&cur, &schedule);
            verify(&next, &want, Phase::Anneal, &[&report.trace[..], &r.trace[..]].concat())?;
            report.offer(Phase::Anneal, &mut cur, next, r);
        }

        let (next, r) = bfs_unchecked(&cur, cfg.bfs_height, cfg.bfs_nodes);
        verify(&next, &want, Phase::Bfs, &[&report.trace[..], &r.trace[..]].concat())?;
        report.offer(Phase::Bfs, &mut cur, next, r);

        if !smaller(&report.fin, &round_start) {
            break;
        }
        if budget == 0 && cfg.step_budget > 0 {
            report.outcome = Outcome::BudgetExhausted;
            break;
        }
    }
    if report.outcome != Outcome::BudgetExhausted {
        report.outcome = if smaller(&report.fin, &report.initial) {
            Outcome::Reduced
        } else {
            Outcome::LocalMinimum
        };
    }
    Ok((cur, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moves::replay;

    #[test]
    fn greedy_on_boundary_of_5_simplex() {
        let t = Triangulation::boundary_of_5_simplex();
        let (out, report) = greedy(&t).unwrap();
        assert_eq!(report.trace.len(), 1);
        assert_eq!(report.trace[0].kind, MoveKind::FiveOne);
        assert_eq!(out.size(), 2);
        assert_eq!(report.outcome, Outcome::Reduced);
        assert_eq!(replay(&t, &report.trace).unwrap(), out);
    }

    #[test]
    fn greedy_leaves_minimal_input_alone() {
        let t = Triangulation::two_pentachoron_sphere();
        let (out, report) = greedy(&t).unwrap();
        assert_eq!(out, t);
        assert_eq!(report.outcome, Outcome::LocalMinimum);
    }

    #[test]
    fn invalid_input_rejected() {
        let t = Triangulation::with_size(1);
        assert!(matches!(greedy(&t), Err(SimplifyError::InvalidInput(_))));
        assert!(matches!(pipeline(&t, &PipelineConfig::default()), Err(SimplifyError::InvalidInput(_))));
    }

    #[test]
    fn anneal_is_deterministic() {
        let t = Triangulation::boundary_of_5_simplex();
        let schedule = AnnealSchedule {
            max_steps: 1000,
            seed: 42,
            ..Default::default()
        };
        let (a, ra) = anneal(&t, &schedule).unwrap();
        let (b, rb) = anneal(&t, &schedule).unwrap();
        assert_eq!(ra.trace, rb.trace);
        assert_eq!(a, b);
        assert_eq!(replay(&t, &ra.trace).unwrap(), a);
    }

    #[test]
    fn bfs_finds_depth_one_reduction() {
        let t = Triangulation::boundary_of_5_simplex();
        let (out, report) = bfs_simplify(&t, 0, 1000).unwrap();
        assert_eq!(report.outcome, Outcome::Reduced);
        assert!(out.size() < t.size());
        assert_eq!(report.trace.len(), 1);
        let (same, report) = bfs_simplify(&t, 0, 1).unwrap();
        assert_eq!(same, t);
        assert_eq!(report.outcome, Outcome::BudgetExhausted);
    }

    #[test]
    fn config_round_trip() {
        let cfg = PipelineConfig::parse("# tuned\nanneal_steps = 500\nweight.1-5 = 0.5\nbeta=3\n").unwrap();
        assert_eq!(cfg.schedule.max_steps, 500);
        assert_eq!(cfg.schedule.weights[&MoveKind::OneFive], 0.5);
        assert_eq!(cfg.schedule.beta, 3.0);
        assert_eq!(PipelineConfig::parse(&cfg.to_text()).unwrap(), cfg);
        assert!(matches!(
            PipelineConfig::parse("cooling = 1.5"),
            Err(SimplifyError::Config { .. })
        ));
        assert!(matches!(
            PipelineConfig::parse("\nfoo = 1"),
            Err(SimplifyError::Config { line: 2, .. })
        ));
    }
}
