//! Event-driven simulation of the discrete opinion dynamics.
//!
//! Nodes of a torus (or finite window) of `Z^N` each hold an opinion in
//! `{1, …, M}` and carry independent unit-rate Poisson clocks. When node `i`
//! rings it looks at the opinions within its neighborhood `{j : ‖j - i‖_p ≤ w}`
//! (the radius-`w` ℓ^p ball, itself included) and
//!
//! - adopts the unique most common opinion if there is one,
//! - keeps its opinion when it ties for most common,
//! - otherwise picks uniformly among the tied most common opinions.
//!
//! The simulator exploits superposition: a single global clock rings at rate
//! `node count` and each ring picks a uniform node, which reproduces the law
//! of per-node unit-rate clocks. Opinion counts per neighborhood are kept
//! incrementally, so stabilization (no node would flip) is detected the
//! moment it happens.

use rand::RngExt;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::Serialize;

use crate::grid::{windowed_count_periodic, GridShape};
use crate::rng::{stream, Purpose};
use crate::{Error, Result};

/// Whether the neighborhood ball includes its boundary. `Closed` gives the
/// familiar `2w+1` nodes per axis and is the default everywhere; `Open`
/// (strict inequality, `2w-1` nodes per axis for p=∞) is available for
/// comparison and recorded in run metadata.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Closure {
    Closed,
    Open,
}

/// Exponent of the ℓ^p ball used as neighborhood shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PNorm {
    Finite(f64),
    Inf,
}

impl PNorm {
    /// Whether integer offset `o` lies in the radius-`w` ball. Exact integer
    /// arithmetic for integer exponents; f64 comparison otherwise.
    fn contains(&self, o: &[i64], w: u32, closure: Closure) -> bool {
        match *self {
            PNorm::Inf => {
                let m = o.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0);
                match closure {
                    Closure::Closed => m <= w as u64,
                    Closure::Open => m < w as u64,
                }
            }
            PNorm::Finite(p) => {
                if p >= 1.0 && p.fract() == 0.0 && p <= 60.0 {
                    let pi = p as u32;
                    let lhs: i128 = o.iter().map(|&c| (c.unsigned_abs() as i128).pow(pi)).sum();
                    let rhs = (w as i128).pow(pi);
                    match closure {
                        Closure::Closed => lhs <= rhs,
                        Closure::Open => lhs < rhs,
                    }
                } else {
                    let lhs: f64 = o.iter().map(|&c| (c.abs() as f64).powf(p)).sum();
                    let rhs = (w as f64).powf(p);
                    match closure {
                        Closure::Closed => lhs <= rhs,
                        Closure::Open => lhs < rhs,
                    }
                }
            }
        }
    }
}

/// The set of integer offsets a node looks at, always containing the origin
/// and symmetric under negation.
#[derive(Debug, Clone)]
pub struct NeighborhoodMask {
    pub dim: usize,
    pub w: u32,
    pub p: PNorm,
    pub closure: Closure,
    offsets: Vec<Vec<i64>>,
    /// For p = ∞ the mask is a full axis-aligned box of this half-width,
    /// which unlocks separable windowed-sum counting.
    box_half: Option<u32>,
}

impl NeighborhoodMask {
    pub fn build(dim: usize, w: u32, p: PNorm, closure: Closure) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dim", "dimension must be ≥ 1"));
        }
        if w == 0 {
            return Err(Error::invalid("w", "window radius must be ≥ 1"));
        }
        if let PNorm::Finite(p) = p {
            if !(p >= 1.0) {
                return Err(Error::invalid("p", format!("ℓ^p exponent {p} must be ≥ 1")));
            }
        }
        let r = w as i64;
        let mut offsets = Vec::new();
        let mut cursor = vec![-r; dim];
        'outer: loop {
            if p.contains(&cursor, w, closure) {
                offsets.push(cursor.clone());
            }
            for axis in (0..dim).rev() {
                cursor[axis] += 1;
                if cursor[axis] <= r {
                    continue 'outer;
                }
                cursor[axis] = -r;
            }
            break;
        }
        let box_half = match (p, closure) {
            (PNorm::Inf, Closure::Closed) => Some(w),
            (PNorm::Inf, Closure::Open) => Some(w - 1),
            _ => None,
        };
        Ok(NeighborhoodMask { dim, w, p, closure, offsets, box_half })
    }

    pub fn offsets(&self) -> &[Vec<i64>] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    /// Largest |coordinate| appearing in the mask.
    pub fn radius(&self) -> u32 {
        self.offsets
            .iter()
            .flat_map(|o| o.iter().map(|c| c.unsigned_abs() as u32))
            .max()
            .unwrap_or(0)
    }
}

/// Lattice geometry: a cubic torus or a finite window of `Z^N` whose
/// out-of-window sides simply do not exist (neighborhoods truncate) and whose
/// `w`-deep boundary layer is frozen at its initial opinions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Boundary {
    Torus,
    FrozenWindow,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Geometry {
    pub dim: usize,
    pub side: usize,
    pub boundary: Boundary,
}

impl Geometry {
    pub fn torus(dim: usize, side: usize) -> Self {
        Geometry { dim, side, boundary: Boundary::Torus }
    }

    pub fn window(dim: usize, side: usize) -> Self {
        Geometry { dim, side, boundary: Boundary::FrozenWindow }
    }

    pub fn node_count(&self) -> usize {
        self.side.pow(self.dim as u32)
    }

    pub fn shape(&self) -> GridShape {
        GridShape::new(self.dim, self.side)
    }
}

/// One clock ring. `old == new` means the node was already satisfied (or
/// frozen) and nothing changed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Event {
    pub time: f64,
    pub node: usize,
    pub old: u8,
    pub new: u8,
}

impl Event {
    pub fn is_flip(&self) -> bool {
        self.old != self.new
    }
}

/// Full record of a dynamics run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventLog {
    pub events: Vec<Event>,
    pub horizon: f64,
    /// First event time after which no (active) node would flip; `Some(0.0)`
    /// if the initial configuration is already stable. Stability is
    /// absorbing, so this never reverts once set.
    pub stabilized_at: Option<f64>,
}

impl EventLog {
    pub fn flip_count(&self) -> usize {
        self.events.iter().filter(|e| e.is_flip()).count()
    }
}

/// Opinion configuration with incrementally maintained per-neighborhood
/// opinion counts.
#[derive(Debug, Clone)]
pub struct OpinionGrid {
    pub geometry: Geometry,
    pub m: u8,
    mask: NeighborhoodMask,
    opinions: Vec<u8>,
    /// `counts[i*M + (op-1)]` = number of nodes of opinion `op` in the
    /// neighborhood of `i` (including `i` itself).
    counts: Vec<u32>,
    nbhd_size: Vec<u32>,
    unsatisfied: Vec<bool>,
    /// Unsatisfied nodes that are allowed to flip (excludes frozen ones).
    unsatisfied_active: usize,
    frozen: Vec<bool>,
}

impl OpinionGrid {
    /// Uniform i.i.d. initial opinions drawn from the `InitOpinions` stream
    /// of `seed`.
    pub fn init(geometry: Geometry, m: u8, mask: &NeighborhoodMask, seed: u64) -> Result<Self> {
        let n = geometry.node_count();
        let mut rng = stream(seed, Purpose::InitOpinions, 0);
        let mut opinions = vec![0u8; n];
        for slot in opinions.iter_mut() {
            *slot = 1 + rng.random_range(0..m);
        }
        Self::from_opinions(geometry, m, mask, opinions)
    }

    /// Builds the count structures for an explicit opinion assignment.
    pub fn from_opinions(
        geometry: Geometry,
        m: u8,
        mask: &NeighborhoodMask,
        opinions: Vec<u8>,
    ) -> Result<Self> {
        if m < 2 {
            return Err(Error::invalid("m", "need at least two opinions"));
        }
        if m as usize > 250 {
            return Err(Error::invalid("m", "opinion labels are stored in a byte"));
        }
        if mask.dim != geometry.dim {
            return Err(Error::GeometryMismatch(format!(
                "mask dimension {} vs geometry dimension {}",
                mask.dim, geometry.dim
            )));
        }
        let min_side = match geometry.boundary {
            // Torus width ≥ 3 windows, so opposite sides of one neighborhood
            // never alias.
            Boundary::Torus => 3 * mask.w as usize,
            Boundary::FrozenWindow => 2 * mask.w as usize + 1,
        };
        if geometry.side < min_side {
            return Err(Error::invalid(
                "side",
                format!("side {} too small for w = {} ({:?}; need ≥ {})",
                    geometry.side, mask.w, geometry.boundary, min_side),
            ));
        }
        let n = geometry.node_count();
        if opinions.len() != n {
            return Err(Error::GeometryMismatch(format!(
                "{} opinions for {} nodes",
                opinions.len(),
                n
            )));
        }
        if let Some(&bad) = opinions.iter().find(|&&o| o == 0 || o > m) {
            return Err(Error::invalid("opinions", format!("value {bad} outside 1..={m}")));
        }

        let frozen = match geometry.boundary {
            Boundary::Torus => vec![false; n],
            Boundary::FrozenWindow => {
                let shape = geometry.shape();
                let w = mask.w as i64;
                let side = geometry.side as i64;
                (0..n)
                    .map(|i| shape.coords(i).iter().any(|&c| c < w || c >= side - w))
                    .collect()
            }
        };

        let mut grid = OpinionGrid {
            geometry,
            m,
            mask: mask.clone(),
            opinions,
            counts: vec![0; n * m as usize],
            nbhd_size: vec![0; n],
            unsatisfied: vec![false; n],
            unsatisfied_active: 0,
            frozen,
        };
        grid.rebuild_counts();
        Ok(grid)
    }

    fn rebuild_counts(&mut self) {
        let n = self.geometry.node_count();
        let m = self.m as usize;
        self.counts.iter_mut().for_each(|c| *c = 0);
        match (self.mask.box_half, self.geometry.boundary) {
            (Some(half), Boundary::Torus) => self.rebuild_counts_box_torus(half),
            _ => self.rebuild_counts_direct(),
        }
        for i in 0..n {
            self.nbhd_size[i] = self.counts[i * m..(i + 1) * m].iter().sum();
        }
        self.unsatisfied_active = 0;
        for i in 0..n {
            self.unsatisfied[i] = self.compute_unsatisfied(i);
            if self.unsatisfied[i] && !self.frozen[i] {
                self.unsatisfied_active += 1;
            }
        }
    }

    /// Separable box counting: one periodic windowed sum per axis per opinion
    /// channel. Exact (integer arithmetic).
    fn rebuild_counts_box_torus(&mut self, half: u32) {
        let shape = self.geometry.shape();
        let n = shape.len();
        let m = self.m as usize;
        let mut channel = vec![0u32; n];
        let mut line_in = vec![0u32; shape.side];
        let mut line_out = vec![0u32; shape.side];
        for op in 1..=self.m {
            for i in 0..n {
                channel[i] = (self.opinions[i] == op) as u32;
            }
            for axis in 0..shape.dim {
                shape.for_each_line(axis, |base, stride| {
                    for k in 0..shape.side {
                        line_in[k] = channel[base + k * stride];
                    }
                    windowed_count_periodic(&line_in, half as usize, &mut line_out);
                    for k in 0..shape.side {
                        channel[base + k * stride] = line_out[k];
                    }
                });
            }
            for i in 0..n {
                self.counts[i * m + (op - 1) as usize] = channel[i];
            }
        }
    }

    fn rebuild_counts_direct(&mut self) {
        let shape = self.geometry.shape();
        let n = shape.len();
        let m = self.m as usize;
        let side = self.geometry.side as i64;
        let torus = self.geometry.boundary == Boundary::Torus;
        for i in 0..n {
            let coords = shape.coords(i);
            for o in self.mask.offsets() {
                let j = if torus {
                    shape.wrapped_index(&coords, o)
                } else {
                    let mut idx = 0usize;
                    let mut ok = true;
                    for axis in 0..shape.dim {
                        let c = coords[axis] + o[axis];
                        if c < 0 || c >= side {
                            ok = false;
                            break;
                        }
                        idx = idx * shape.side + c as usize;
                    }
                    if !ok {
                        continue;
                    }
                    idx
                };
                self.counts[i * m + (self.opinions[j] - 1) as usize] += 1;
            }
        }
    }

    fn compute_unsatisfied(&self, i: usize) -> bool {
        let m = self.m as usize;
        let row = &self.counts[i * m..(i + 1) * m];
        let own = row[(self.opinions[i] - 1) as usize];
        row.iter().any(|&c| c > own)
    }

    pub fn mask(&self) -> &NeighborhoodMask {
        &self.mask
    }

    pub fn opinion(&self, node: usize) -> u8 {
        self.opinions[node]
    }

    pub fn opinions(&self) -> &[u8] {
        &self.opinions
    }

    pub fn count(&self, node: usize, opinion: u8) -> u32 {
        self.counts[node * self.m as usize + (opinion - 1) as usize]
    }

    pub fn neighborhood_size(&self, node: usize) -> u32 {
        self.nbhd_size[node]
    }

    pub fn is_frozen(&self, node: usize) -> bool {
        self.frozen[node]
    }

    /// Centered opinion count `count(i, m) - |N(i)|/M`.
    pub fn bias(&self, node: usize, opinion: u8) -> f64 {
        self.count(node, opinion) as f64 - self.nbhd_size[node] as f64 / self.m as f64
    }

    /// Number of non-frozen nodes that would flip if rung now.
    pub fn unsatisfied_active(&self) -> usize {
        self.unsatisfied_active
    }

    /// Whether every node (frozen ones included) already agrees with a most
    /// common opinion of its neighborhood.
    pub fn is_stable_configuration(&self) -> bool {
        !self.unsatisfied.iter().any(|&u| u)
    }

    /// The update rule applied to node `i`'s current counts. Pure: consumes
    /// randomness only in the uniform-tie case.
    pub fn decide_update(&self, i: usize, rng: &mut ChaCha8Rng) -> u8 {
        let m = self.m as usize;
        let row = &self.counts[i * m..(i + 1) * m];
        plurality_update(row, self.opinions[i], rng)
    }

    /// Applies a flip of node `i` to `new`, updating all affected counts and
    /// satisfaction flags.
    pub fn apply_flip(&mut self, i: usize, new: u8) {
        let old = self.opinions[i];
        debug_assert_ne!(old, new);
        self.opinions[i] = new;
        let shape = self.geometry.shape();
        let coords = shape.coords(i);
        let m = self.m as usize;
        let side = self.geometry.side as i64;
        let torus = self.geometry.boundary == Boundary::Torus;
        // The mask is symmetric, so exactly the neighbors of `i` see `i`.
        for o in self.mask.offsets() {
            let j = if torus {
                shape.wrapped_index(&coords, o)
            } else {
                let mut idx = 0usize;
                let mut ok = true;
                for axis in 0..shape.dim {
                    let c = coords[axis] + o[axis];
                    if c < 0 || c >= side {
                        ok = false;
                        break;
                    }
                    idx = idx * shape.side + c as usize;
                }
                if !ok {
                    continue;
                }
                idx
            };
            self.counts[j * m + (old - 1) as usize] -= 1;
            self.counts[j * m + (new - 1) as usize] += 1;
            let was = self.unsatisfied[j];
            let now = self.compute_unsatisfied(j);
            if was != now {
                self.unsatisfied[j] = now;
                if !self.frozen[j] {
                    if now {
                        self.unsatisfied_active += 1;
                    } else {
                        self.unsatisfied_active -= 1;
                    }
                }
            }
        }
    }

    /// Replays a recorded event (used when reconstructing a trajectory).
    pub fn apply_event(&mut self, event: &Event) {
        if event.is_flip() {
            debug_assert_eq!(self.opinions[event.node], event.old);
            self.apply_flip(event.node, event.new);
        }
    }

    /// Runs the dynamics up to time `horizon`. Clock rings and node picks
    /// come from the `Clock` stream of `seed`, tie resolutions from the
    /// `TieBreak` stream, so coupling experiments can perturb one without
    /// shifting the other. Every ring is recorded, flips and non-flips alike.
    pub fn run_dynamics(&mut self, horizon: f64, seed: u64, stop_when_stable: bool) -> EventLog {
        let n = self.geometry.node_count();
        let mut clock = stream(seed, Purpose::Clock, 0);
        let mut ties = stream(seed, Purpose::TieBreak, 0);
        let mut log = EventLog { events: Vec::new(), horizon, stabilized_at: None };
        if self.unsatisfied_active == 0 {
            log.stabilized_at = Some(0.0);
            if stop_when_stable {
                return log;
            }
        }
        let rate = n as f64;
        let mut t = 0.0;
        loop {
            let step: f64 = Exp1.sample(&mut clock);
            t += step / rate;
            if t > horizon {
                break;
            }
            let i = clock.random_range(0..n);
            let old = self.opinions[i];
            let new = if self.frozen[i] { old } else { self.decide_update(i, &mut ties) };
            log.events.push(Event { time: t, node: i, old, new });
            if new != old {
                self.apply_flip(i, new);
                if self.unsatisfied_active == 0 && log.stabilized_at.is_none() {
                    log.stabilized_at = Some(t);
                    if stop_when_stable {
                        break;
                    }
                }
            }
        }
        log
    }

    /// Number of unordered neighbor pairs `{i, j}` (j ∈ N(i), j ≠ i) holding
    /// different opinions — the uniform-weight disagreement sum, computed by
    /// brute force.
    pub fn disagreement_sum(&self) -> u64 {
        let shape = self.geometry.shape();
        let side = self.geometry.side as i64;
        let torus = self.geometry.boundary == Boundary::Torus;
        let mut twice = 0u64;
        for i in 0..shape.len() {
            let coords = shape.coords(i);
            for o in self.mask.offsets() {
                if o.iter().all(|&c| c == 0) {
                    continue;
                }
                let j = if torus {
                    shape.wrapped_index(&coords, o)
                } else {
                    let mut idx = 0usize;
                    let mut ok = true;
                    for axis in 0..shape.dim {
                        let c = coords[axis] + o[axis];
                        if c < 0 || c >= side {
                            ok = false;
                            break;
                        }
                        idx = idx * shape.side + c as usize;
                    }
                    if !ok {
                        continue;
                    }
                    idx
                };
                if self.opinions[i] != self.opinions[j] {
                    twice += 1;
                }
            }
        }
        debug_assert_eq!(twice % 2, 0);
        twice / 2
    }
}

/// The plurality update rule on a raw count row: keep `current` if it attains
/// the maximum; else the unique argmax; else a uniform draw among the
/// maximizers. Exposed for direct testing.
pub fn plurality_update(counts: &[u32], current: u8, rng: &mut ChaCha8Rng) -> u8 {
    let max = *counts.iter().max().expect("non-empty counts");
    if counts[(current - 1) as usize] == max {
        return current;
    }
    let winners: Vec<u8> = counts
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c == max)
        .map(|(k, _)| (k + 1) as u8)
        .collect();
    if winners.len() == 1 {
        winners[0]
    } else {
        winners[rng.random_range(0..winners.len())]
    }
}

/// A maximal monochromatic run on a 1-D lattice; `start` is the index of its
/// first node walking rightward (runs may wrap around the torus).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Run {
    pub opinion: u8,
    pub start: usize,
    pub len: usize,
}

/// Maximal monochromatic runs of a 1-D configuration, in the order they
/// appear; on a torus the first and last runs merge when they share the
/// opinion.
pub fn extract_runs_1d(grid: &OpinionGrid) -> Vec<Run> {
    assert_eq!(grid.geometry.dim, 1, "runs are defined on 1-D lattices");
    let n = grid.geometry.node_count();
    let ops = grid.opinions();
    let mut runs: Vec<Run> = Vec::new();
    for i in 0..n {
        match runs.last_mut() {
            Some(run) if ops[i] == run.opinion && run.start + run.len == i => run.len += 1,
            _ => runs.push(Run { opinion: ops[i], start: i, len: 1 }),
        }
    }
    if grid.geometry.boundary == Boundary::Torus && runs.len() > 1 {
        let first = runs.first().unwrap();
        let last = runs.last().unwrap();
        if first.opinion == last.opinion && first.start == 0 && last.start + last.len == n {
            let merged = Run {
                opinion: last.opinion,
                start: last.start,
                len: last.len + first.len,
            };
            runs.remove(0);
            let i = runs.len() - 1;
            runs[i] = merged;
        }
    }
    runs
}

/// A connected monochromatic component under ℓ¹ (nearest-neighbor)
/// adjacency.
#[derive(Debug, Clone, Serialize)]
pub struct Cluster {
    pub opinion: u8,
    pub size: usize,
    /// Max over axes of the coordinate extent, i.e. the ℓ^∞ diameter; capped
    /// at `side - 1` when the component wraps around the torus.
    pub diameter: u32,
    pub wraps: bool,
}

/// Connected components of equal opinion (ℓ¹ adjacency, wrapping on tori).
pub fn extract_clusters(grid: &OpinionGrid) -> Vec<Cluster> {
    let shape = grid.geometry.shape();
    let n = shape.len();
    let side = grid.geometry.side as i64;
    let torus = grid.geometry.boundary == Boundary::Torus;
    let mut seen = vec![false; n];
    let mut clusters = Vec::new();
    let mut queue: Vec<(usize, Vec<i64>)> = Vec::new();
    for root in 0..n {
        if seen[root] {
            continue;
        }
        let opinion = grid.opinion(root);
        seen[root] = true;
        // BFS with unwrapped coordinate lifts; revisiting a node at a
        // different lift means the component circles the torus.
        let mut lift_min = shape.coords(root);
        let mut lift_max = lift_min.clone();
        let mut lifts: std::collections::HashMap<usize, Vec<i64>> = std::collections::HashMap::new();
        lifts.insert(root, lift_min.clone());
        queue.clear();
        queue.push((root, lift_min.clone()));
        let mut size = 0usize;
        let mut wraps = false;
        while let Some((node, lift)) = queue.pop() {
            size += 1;
            let coords = shape.coords(node);
            for axis in 0..shape.dim {
                for step in [-1i64, 1] {
                    let mut c = coords.clone();
                    c[axis] += step;
                    let neighbor = if torus {
                        shape.wrapped_index(&coords, &{
                            let mut o = vec![0; shape.dim];
                            o[axis] = step;
                            o
                        })
                    } else {
                        if c[axis] < 0 || c[axis] >= side {
                            continue;
                        }
                        shape.index(&c)
                    };
                    if grid.opinion(neighbor) != opinion {
                        continue;
                    }
                    let mut next_lift = lift.clone();
                    next_lift[axis] += step;
                    match lifts.get(&neighbor) {
                        Some(existing) => {
                            if *existing != next_lift {
                                wraps = true;
                            }
                        }
                        None => {
                            seen[neighbor] = true;
                            for a in 0..shape.dim {
                                lift_min[a] = lift_min[a].min(next_lift[a]);
                                lift_max[a] = lift_max[a].max(next_lift[a]);
                            }
                            lifts.insert(neighbor, next_lift.clone());
                            queue.push((neighbor, next_lift));
                        }
                    }
                }
            }
        }
        let mut diameter = 0u32;
        for a in 0..shape.dim {
            let extent = (lift_max[a] - lift_min[a]) as u64;
            let capped = extent.min(side as u64 - 1);
            diameter = diameter.max(capped as u32);
        }
        clusters.push(Cluster { opinion, size, diameter, wraps });
    }
    clusters
}
