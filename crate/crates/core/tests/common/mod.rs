//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use pachner::invariants::{smith_normal_form, HomologyGroup, IntegerMatrix};
use pachner::moves::{apply, legal_moves, MoveKind};
use pachner::{Perm5, Triangulation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Tries every image of one pentachoron per component and propagates the
/// forced choices; no canonical form involved.
pub fn isomorphic(a: &Triangulation, b: &Triangulation) -> bool {
    if a.size() != b.size() {
        return false;
    }
    let ca = a.components();
    let mut cb: Vec<Option<Vec<usize>>> = b.components().into_iter().map(Some).collect();
    'comp: for comp in &ca {
        for slot in cb.iter_mut() {
            let Some(other) = slot else { continue };
            if other.len() == comp.len() && other.iter().any(|&q| component_map(a, comp[0], b, q)) {
                *slot = None;
                continue 'comp;
            }
        }
        return false;
    }
    true
}

fn component_map(a: &Triangulation, start: usize, b: &Triangulation, target: usize) -> bool {
    Perm5::all().any(|rho| {
        let mut image: HashMap<usize, (usize, Perm5)> = HashMap::new();
        let mut used = vec![false; b.size()];
        image.insert(start, (target, rho));
        used[target] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(p) = queue.pop_front() {
            let (pp, pi) = image[&p];
            for f in 0..5 {
                let ga = a.gluing(p, f);
                let gb = b.gluing(pp, pi.apply(f));
                match (ga, gb) {
                    (None, None) => {}
                    (Some(ga), Some(gb)) => {
                        // vertex map forced on the neighbour
                        let want = gb.map.compose(pi).compose(ga.map.inverse());
                        match image.get(&ga.target) {
                            Some(&(q, m)) => {
                                if q != gb.target || m != want {
                                    return false;
                                }
                            }
                            None => {
                                if used[gb.target] {
                                    return false;
                                }
                                used[gb.target] = true;
                                image.insert(ga.target, (gb.target, want));
                                queue.push_back(ga.target);
                            }
                        }
                    }
                    _ => return false,
                }
            }
        }
        true
    })
}

/// Every closed valid triangulation with `n` pentachora, up to the vertex
/// relabelings used to prune the search (so isomorphic copies remain).
pub fn enumerate_closed(n: usize) -> Vec<Triangulation> {
    let mut out = Vec::new();
    let mut t = Triangulation::with_size(n);
    let mut touched = vec![false; n];
    extend(&mut t, &mut touched, &mut out);
    out
}

fn extend(t: &mut Triangulation, touched: &mut Vec<bool>, out: &mut Vec<Triangulation>) {
    let n = t.size();
    let Some((p, f)) = (0..n).flat_map(|p| (0..5).map(move |f| (p, f))).find(|&(p, f)| t.gluing(p, f).is_none()) else {
        if t.is_valid() {
            out.push(t.clone());
        }
        return;
    };
    let was = touched[p];
    touched[p] = true;
    let first_untouched = (0..n).find(|&q| !touched[q]);
    for q in 0..n {
        if q != p && !touched[q] && Some(q) != first_untouched {
            continue;
        }
        let fresh = q != p && !touched[q];
        for g in 0..5 {
            if (q, g) <= (p, f) || t.gluing(q, g).is_some() {
                continue;
            }
            if fresh && g != f {
                continue;
            }
            for sigma in Perm5::all() {
                if sigma.apply(f) != g || (fresh && sigma != Perm5::IDENTITY) {
                    continue;
                }
                t.glue(p, f, q, sigma).unwrap();
                let tq = touched[q];
                touched[q] = true;
                if t.validity().invalid_faces.is_empty() {
                    extend(t, touched, out);
                }
                touched[q] = tq;
                t.unglue(p, f).unwrap();
            }
        }
    }
    touched[p] = was;
}

/// Classes of closed valid triangulations with two pentachora, computed
/// once per test binary.
pub fn two_pentachoron_census() -> &'static [Triangulation] {
    static CENSUS: std::sync::OnceLock<Vec<Triangulation>> = std::sync::OnceLock::new();
    CENSUS.get_or_init(|| classes(&enumerate_closed(2)))
}

/// Distinct classes under [`isomorphic`].
pub fn classes(ts: &[Triangulation]) -> Vec<Triangulation> {
    let mut reps: Vec<Triangulation> = Vec::new();
    for t in ts {
        if !reps.iter().any(|r| isomorphic(r, t)) {
            reps.push(t.clone());
        }
    }
    reps
}

pub fn random_relabeling(t: &Triangulation, rng: &mut impl Rng) -> Triangulation {
    let n = t.size();
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let relabel: Vec<Perm5> = (0..n).map(|_| Perm5::from_rank(rng.gen_range(0..120)).unwrap()).collect();
    t.relabeled(&order, &relabel)
}

/// A seeded random walk of legal moves of the given kinds.
pub fn random_walk(start: &Triangulation, kinds: &[MoveKind], steps: usize, seed: u64) -> Triangulation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = start.clone();
    for _ in 0..steps {
        let moves = legal_moves(&t, kinds).unwrap();
        if moves.is_empty() {
            break;
        }
        t = apply(&t, &moves[rng.gen_range(0..moves.len())]).unwrap();
    }
    t
}

// ---- homology of the first barycentric subdivision ----

fn subsets_chains() -> Vec<Vec<u8>> {
    // all strictly increasing chains of nonempty vertex subsets of {0..4}
    let mut out = Vec::new();
    let mut stack: Vec<Vec<u8>> = (1u8..32).map(|m| vec![m]).collect();
    while let Some(c) = stack.pop() {
        let top = *c.last().unwrap();
        for m in 1u8..32 {
            if m != top && m & top == top {
                let mut d = c.clone();
                d.push(m);
                stack.push(d);
            }
        }
        out.push(c);
    }
    out
}

fn find(uf: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while uf[r] != r {
        r = uf[r];
    }
    let mut y = x;
    while uf[y] != r {
        let next = uf[y];
        uf[y] = r;
        y = next;
    }
    r
}

/// Homology of the barycentric subdivision, whose simplices are chains of
/// faces inside a pentachoron, identified across gluings by union-find.
pub fn barycentric_homology(t: &Triangulation) -> Vec<HomologyGroup> {
    let chains = subsets_chains();
    let index: HashMap<Vec<u8>, usize> = chains.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
    let per = chains.len();
    let n = t.size();
    let mut uf: Vec<usize> = (0..n * per).collect();
    for p in 0..n {
        for f in 0..5 {
            let Some(g) = t.gluing(p, f) else { continue };
            for (ci, c) in chains.iter().enumerate() {
                let top = *c.last().unwrap();
                if top & (1 << f) != 0 {
                    continue;
                }
                let image: Vec<u8> = c.iter().map(|&m| g.map.apply_mask(m)).collect();
                let a = find(&mut uf, p * per + ci);
                let b = find(&mut uf, g.target * per + index[&image]);
                uf[a] = b;
            }
        }
    }
    // simplices by dimension
    let mut id: HashMap<usize, usize> = HashMap::new();
    let mut by_dim: Vec<Vec<usize>> = vec![Vec::new(); 5];
    for x in 0..n * per {
        let r = find(&mut uf, x);
        if !id.contains_key(&r) {
            let k = chains[r % per].len() - 1;
            id.insert(r, by_dim[k].len());
            by_dim[k].push(r);
        }
    }
    let mut ranks = vec![0usize; 6];
    let mut torsion: Vec<Vec<num_bigint::BigInt>> = vec![Vec::new(); 6];
    for k in 1..5 {
        let mut m = IntegerMatrix::zeros(by_dim[k - 1].len(), by_dim[k].len());
        for (col, &r) in by_dim[k].iter().enumerate() {
            let (p, c) = (r / per, &chains[r % per]);
            for i in 0..c.len() {
                let mut face = c.clone();
                face.remove(i);
                let row = id[&find(&mut uf, p * per + index[&face])];
                let sign: i64 = if i % 2 == 0 { 1 } else { -1 };
                let cur = m.get(row, col).clone();
                m.set(row, col, cur + sign);
            }
        }
        let snf = smith_normal_form(&m);
        ranks[k] = snf.rank();
        torsion[k - 1] = snf.torsion();
    }
    (0..5)
        .map(|k| {
            let free = by_dim[k].len() - ranks[k] - ranks[k + 1];
            HomologyGroup {
                rank: free,
                torsion: torsion[k].clone(),
            }
        })
        .collect()
}

/// Face counts by merging `(pentachoron, vertex subset)` pairs across
/// gluings, without the skeleton code.
pub fn oracle_f_vector(t: &Triangulation) -> [u64; 5] {
    let n = t.size();
    let mut uf: Vec<usize> = (0..n * 32).collect();
    for p in 0..n {
        for f in 0..5 {
            let Some(g) = t.gluing(p, f) else { continue };
            for mask in 1u8..32 {
                if mask & (1 << f) == 0 {
                    let a = find(&mut uf, p * 32 + mask as usize);
                    let b = find(&mut uf, g.target * 32 + g.map.apply_mask(mask) as usize);
                    uf[a] = b;
                }
            }
        }
    }
    let mut out = [0u64; 5];
    for x in 0..n * 32 {
        let mask = (x % 32) as u8;
        if mask != 0 && find(&mut uf, x) == x {
            out[mask.count_ones() as usize - 1] += 1;
        }
    }
    out
}

/// Distinct triangulations met on seeded random walks from the boundary of
/// the 5-simplex, kept below `max_size` pentachora.
pub fn harvest(count: usize, max_size: usize, seed: u64) -> Vec<Triangulation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Triangulation::boundary_of_5_simplex();
    let mut out: Vec<Triangulation> = Vec::new();
    let mut sigs = std::collections::HashSet::new();
    while out.len() < count {
        let moves = legal_moves(&t, &MoveKind::ALL).unwrap();
        let next = apply(&t, &moves[rng.gen_range(0..moves.len())]).unwrap();
        if next.size() > max_size {
            continue;
        }
        t = next;
        if sigs.insert(pachner::IsoSig::of(&t).unwrap()) {
            out.push(t.clone());
        }
    }
    out
}
