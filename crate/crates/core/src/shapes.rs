//! Stable shapes: finite opinion-1 islands in an opinion-2 sea.
//!
//! A finite set `A ⊂ Z^N` is *stable* when every node of `Z^N` already
//! agrees with a most common opinion of its window `𝔑(i) = i + B_w`: members
//! of `A` must see at least as many ones as twos, outsiders at least as many
//! twos as ones. Only nodes in `A ∪ 𝔑(A)` can possibly fail — anyone whose
//! window misses `A` entirely sees a unanimous sea — so the predicate scans
//! exactly that set (and a wide-window brute force cross-checks the
//! shortcut in tests).
//!
//! Two constructions probe how small stable sets can be:
//! * **Greedy erosion** starts from the box `{‖i‖_∞ ≤ r}` and repeatedly
//!   flips one unsatisfied member to opinion 2. The count of boundary pairs
//!   `E_n = #{(i, j) : i ∈ A_n, j ∈ 𝔑(i) \ A_n}` drops by at least 2 per
//!   flip (`ΔE = 2·count_1 - 1 - |𝔑| ≤ -2` at an unsatisfied node), so the
//!   process terminates; whatever remains is stable on the `A` side, and
//!   outsiders only get happier as `A` shrinks.
//! * **Exhaustive search** enumerates candidate sets in a bounding box by
//!   increasing ℓ^∞ diameter, pruned by the dihedral symmetries of the box,
//!   and returns the smallest diameter admitting a stable set. No set of
//!   diameter `< w` is ever stable: it fits inside one window, where it is
//!   outnumbered `(2w+1)^N - w^N` to `w^N`.

use std::collections::BTreeSet;

use rand::RngExt;

use crate::error::Error;
use crate::lattice::{Closure, NeighborhoodMask, PNorm};
use crate::rng::{stream, Purpose};
use crate::Result;

/// A finite subset of `Z^N` with its stability verdict.
#[derive(Debug, Clone)]
pub struct StableShape {
    pub nodes: BTreeSet<Vec<i64>>,
    pub dim: usize,
    pub w: u32,
    pub p: PNorm,
    /// Largest ℓ^∞ distance between members (0 for sets of size ≤ 1).
    pub diameter: u32,
    /// Whether [`is_stable`] holds; for erosion output this re-checks the
    /// terminal set from scratch.
    pub certificate: bool,
}

/// Largest ℓ^∞ distance between members: the widest per-axis extent.
pub fn diameter(nodes: &BTreeSet<Vec<i64>>) -> u32 {
    let Some(first) = nodes.iter().next() else { return 0 };
    let dim = first.len();
    let mut best = 0i64;
    for k in 0..dim {
        let lo = nodes.iter().map(|v| v[k]).min().unwrap();
        let hi = nodes.iter().map(|v| v[k]).max().unwrap();
        best = best.max(hi - lo);
    }
    best as u32
}

/// Whether `nodes` is connected under nearest-neighbor (ℓ¹) adjacency.
pub fn is_connected(nodes: &BTreeSet<Vec<i64>>) -> bool {
    let Some(start) = nodes.iter().next() else { return true };
    let dim = start.len();
    let mut seen: BTreeSet<&Vec<i64>> = BTreeSet::new();
    let mut stack = vec![start];
    seen.insert(start);
    while let Some(cur) = stack.pop() {
        for k in 0..dim {
            for step in [-1i64, 1] {
                let mut nb = cur.clone();
                nb[k] += step;
                if let Some(found) = nodes.get(&nb) {
                    if seen.insert(found) {
                        stack.push(found);
                    }
                }
            }
        }
    }
    seen.len() == nodes.len()
}

/// A dense array over an axis-aligned box, for counting window occupancies.
struct DenseBox {
    origin: Vec<i64>,
    side: usize,
    dim: usize,
}

impl DenseBox {
    fn covering(nodes: &BTreeSet<Vec<i64>>, dim: usize, pad: i64) -> Self {
        let mut lo = vec![i64::MAX; dim];
        let mut hi = vec![i64::MIN; dim];
        for v in nodes {
            for k in 0..dim {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        if nodes.is_empty() {
            lo = vec![0; dim];
            hi = vec![0; dim];
        }
        let side = (0..dim)
            .map(|k| (hi[k] - lo[k] + 1 + 2 * pad) as usize)
            .max()
            .unwrap_or(1);
        let origin = lo.iter().map(|&l| l - pad).collect();
        DenseBox { origin, side, dim }
    }

    fn len(&self) -> usize {
        self.side.pow(self.dim as u32)
    }

    fn index(&self, coords: &[i64]) -> Option<usize> {
        let mut idx = 0usize;
        for k in 0..self.dim {
            let off = coords[k] - self.origin[k];
            if off < 0 || off >= self.side as i64 {
                return None;
            }
            idx = idx * self.side + off as usize;
        }
        Some(idx)
    }

    fn coords(&self, mut idx: usize) -> Vec<i64> {
        let mut c = vec![0i64; self.dim];
        for k in (0..self.dim).rev() {
            c[k] = (idx % self.side) as i64 + self.origin[k];
            idx /= self.side;
        }
        c
    }
}

/// Stability of the two-opinion configuration `1 on nodes, 2 elsewhere`.
///
/// Scans `nodes ∪ 𝔑(nodes)`; everyone else sees a window with no ones at
/// all. Keep-on-tie semantics: a node is content when its own opinion is
/// among the most common in its window.
pub fn is_stable(nodes: &BTreeSet<Vec<i64>>, mask: &NeighborhoodMask) -> bool {
    if nodes.is_empty() {
        return true;
    }
    let dim = nodes.iter().next().unwrap().len();
    assert_eq!(dim, mask.dim, "mask dimension mismatch");
    let w = mask.radius() as i64;
    let boxx = DenseBox::covering(nodes, dim, w);
    let size = mask.len() as u32;
    let mut count = vec![0u32; boxx.len()];
    let mut member = vec![false; boxx.len()];
    let mut probe = vec![0i64; dim];
    for v in nodes {
        member[boxx.index(v).unwrap()] = true;
        for o in mask.offsets() {
            for k in 0..dim {
                probe[k] = v[k] + o[k];
            }
            count[boxx.index(&probe).unwrap()] += 1;
        }
    }
    for i in 0..boxx.len() {
        let c = count[i];
        if c == 0 {
            continue;
        }
        if member[i] {
            if 2 * c < size {
                return false;
            }
        } else if 2 * c > size {
            return false;
        }
    }
    true
}

/// Independent comparator for [`is_stable`]: recount every node of the
/// bounding box padded by `pad` directly from set membership, no shortcut.
pub fn is_stable_brute(nodes: &BTreeSet<Vec<i64>>, mask: &NeighborhoodMask, pad: i64) -> bool {
    if nodes.is_empty() {
        return true;
    }
    let dim = nodes.iter().next().unwrap().len();
    let boxx = DenseBox::covering(nodes, dim, pad);
    let size = mask.len() as u32;
    let mut probe = vec![0i64; dim];
    for i in 0..boxx.len() {
        let at = boxx.coords(i);
        let mut ones = 0u32;
        for o in mask.offsets() {
            for k in 0..dim {
                probe[k] = at[k] + o[k];
            }
            if nodes.contains(&probe) {
                ones += 1;
            }
        }
        let is_one = nodes.contains(&at);
        if is_one && 2 * ones < size {
            return false;
        }
        if !is_one && 2 * ones > size {
            return false;
        }
    }
    true
}

/// Which unsatisfied node the erosion flips next.
#[derive(Debug, Clone, Copy)]
pub enum SelectionRule {
    /// Smallest in lexicographic coordinate order (deterministic default).
    Lexicographic,
    /// Uniform among the currently unsatisfied, from the seeded stream.
    Random(u64),
}

/// Outcome of a greedy erosion run.
#[derive(Debug, Clone)]
pub struct ErosionResult {
    pub shape: StableShape,
    /// Boundary-pair count `|E_n|` before any flip and after each one;
    /// strictly decreasing by construction.
    pub trace: Vec<i64>,
    pub flips: usize,
}

/// Erodes the box `{‖i‖_∞ ≤ r}` by flipping one unsatisfied member at a
/// time until the remainder is content (possibly empty).
pub fn erode_to_stable(
    dim: usize,
    w: u32,
    p: PNorm,
    r: u32,
    rule: SelectionRule,
) -> Result<ErosionResult> {
    if r < 1 {
        return Err(Error::invalid("r", "initial half-side must be positive"));
    }
    if dim == 0 || dim > 4 {
        return Err(Error::invalid("dim", "erosion supports 1 ≤ N ≤ 4"));
    }
    let mask = NeighborhoodMask::build(dim, w, p, Closure::Closed)?;
    let size = mask.len() as u32;
    let a_side = (2 * r + 1) as i64;
    let boxx = DenseBox {
        origin: vec![-(r as i64) - w as i64; dim],
        side: (2 * (r + w) + 1) as usize,
        dim,
    };
    let n = boxx.len();

    // Linear deltas are safe without bounds checks: members live in the
    // inner box, and the array pads it by the mask radius on every side.
    let deltas: Vec<i64> = mask
        .offsets()
        .iter()
        .map(|o| {
            let mut d = 0i64;
            for k in 0..dim {
                d = d * boxx.side as i64 + o[k];
            }
            d
        })
        .collect();

    let in_a = |coords: &[i64]| coords.iter().all(|&c| c.abs() <= r as i64);
    let mut member = vec![false; n];
    let mut count = vec![0u32; n];
    for i in 0..n {
        let c = boxx.coords(i);
        if in_a(&c) {
            member[i] = true;
        }
    }
    // count(j) = #(A ∩ 𝔑(j)) via the box structure of A_0: per-axis overlap
    // of [j_k - w, j_k + w] with [-r, r], multiplied across axes.
    for i in 0..n {
        let c = boxx.coords(i);
        let mut prod = 1u64;
        for &ck in &c {
            let lo = (ck - w as i64).max(-(r as i64));
            let hi = (ck + w as i64).min(r as i64);
            prod *= (hi - lo + 1).max(0) as u64;
        }
        if p == PNorm::Inf {
            count[i] = prod as u32;
        }
    }
    if p != PNorm::Inf {
        // General masks are not boxes; scatter-add instead.
        for i in 0..n {
            if member[i] {
                for &d in &deltas {
                    count[(i as i64 + d) as usize] += 1;
                }
            }
        }
    }

    let mut unsat: BTreeSet<u32> = (0..n as u32)
        .filter(|&i| member[i as usize] && 2 * count[i as usize] < size)
        .collect();
    let mut a_nodes = (a_side as u64).pow(dim as u32) as i64;
    let mut e: i64 = (0..n)
        .filter(|&i| member[i])
        .map(|i| (size - count[i]) as i64)
        .sum();
    let mut trace = vec![e];
    let mut rng = match rule {
        SelectionRule::Random(seed) => Some(stream(seed, Purpose::Erosion, 0)),
        SelectionRule::Lexicographic => None,
    };

    let mut flips = 0usize;
    while let Some(&pick) = match &mut rng {
        None => unsat.first(),
        Some(rng) => {
            let k = if unsat.is_empty() { 0 } else { rng.random_range(0..unsat.len()) };
            unsat.iter().nth(k)
        }
    } {
        let i = pick as usize;
        let c1 = count[i];
        e += 2 * c1 as i64 - 1 - size as i64;
        trace.push(e);
        member[i] = false;
        unsat.remove(&pick);
        a_nodes -= 1;
        flips += 1;
        for &d in &deltas {
            let j = (i as i64 + d) as usize;
            count[j] -= 1;
            if member[j] {
                if 2 * count[j] < size {
                    unsat.insert(j as u32);
                } else {
                    unsat.remove(&(j as u32));
                }
            }
        }
    }
    let e_check: i64 =
        (0..n).filter(|&i| member[i]).map(|i| (size - count[i]) as i64).sum();
    assert_eq!(e, e_check, "incremental pair count drifted from a recount");

    let nodes: BTreeSet<Vec<i64>> =
        (0..n).filter(|&i| member[i]).map(|i| boxx.coords(i)).collect();
    assert_eq!(nodes.len() as i64, a_nodes);
    let certificate = is_stable(&nodes, &mask);
    Ok(ErosionResult {
        flips,
        trace,
        shape: StableShape { diameter: diameter(&nodes), nodes, dim, w, p, certificate },
    })
}

/// Result of the minimal-diameter search.
#[derive(Debug, Clone)]
pub struct MinDiameterResult {
    /// Exhaustive verdict; `false` means the budget ran out and only
    /// `upper_bound` is meaningful.
    pub exact: bool,
    pub diameter: Option<u32>,
    /// Canonical witnesses at the minimal diameter (capped).
    pub witnesses: Vec<BTreeSet<Vec<i64>>>,
    /// Diameter of some known stable set (a witness, or the erosion
    /// terminal when the search was budget-limited).
    pub upper_bound: u32,
    pub sets_checked: u64,
}

const MAX_WITNESSES: usize = 16;

/// Smallest ℓ^∞ diameter of any stable shape, by exhaustive enumeration of
/// candidate sets of increasing diameter (1-D for any `w ≤ 20`; 2-D
/// feasible for `w = 1`). `budget` caps the diameter tried exhaustively;
/// beyond it the erosion terminal provides a flagged upper bound.
pub fn min_stable_diameter(w: u32, dim: usize, p: PNorm, budget: u32) -> Result<MinDiameterResult> {
    let mask = NeighborhoodMask::build(dim, w, p, Closure::Closed)?;
    let mut checked = 0u64;
    match dim {
        1 => {
            if w > 20 {
                return Err(Error::invalid("w", "1-D exhaustive search supports w ≤ 20"));
            }
            for d in 0..=budget.min(w + 1) {
                let mut witnesses = Vec::new();
                // Sets realizing diameter d contain both endpoints of
                // {0,…,d}; interior membership is free.
                let interior = d.saturating_sub(1);
                for bits in 0..(1u64 << interior) {
                    let mut nodes: BTreeSet<Vec<i64>> = BTreeSet::new();
                    nodes.insert(vec![0]);
                    nodes.insert(vec![d as i64]);
                    for b in 0..interior {
                        if bits >> b & 1 == 1 {
                            nodes.insert(vec![b as i64 + 1]);
                        }
                    }
                    checked += 1;
                    if is_stable(&nodes, &mask) && witnesses.len() < MAX_WITNESSES {
                        witnesses.push(nodes);
                    }
                }
                if !witnesses.is_empty() {
                    return Ok(MinDiameterResult {
                        exact: true,
                        diameter: Some(d),
                        upper_bound: d,
                        witnesses,
                        sets_checked: checked,
                    });
                }
            }
        }
        2 => {
            for d in 0..=budget {
                let side = d + 1;
                let cells = side * side;
                if cells > 25 {
                    break; // enumeration blows past 2^25 candidates
                }
                let mut witnesses = Vec::new();
                for mask_bits in 1u64..(1u64 << cells) {
                    if !normalized_with_diameter(mask_bits, side, d) {
                        continue;
                    }
                    if canonical_form(mask_bits, side) != mask_bits {
                        continue;
                    }
                    checked += 1;
                    let nodes = bits_to_nodes(mask_bits, side);
                    if is_stable(&nodes, &mask) && witnesses.len() < MAX_WITNESSES {
                        witnesses.push(nodes);
                    }
                }
                if !witnesses.is_empty() {
                    return Ok(MinDiameterResult {
                        exact: true,
                        diameter: Some(d),
                        upper_bound: d,
                        witnesses,
                        sets_checked: checked,
                    });
                }
            }
        }
        _ => {
            return Err(Error::invalid("dim", "exhaustive search covers N ∈ {1, 2}"));
        }
    }
    // Budget exhausted: fall back to the erosion upper bound.
    let r = (1u32 << (2 * dim)) * w.pow(dim as u32 + 1);
    let erosion = erode_to_stable(dim, w, p, r, SelectionRule::Lexicographic)?;
    Ok(MinDiameterResult {
        exact: false,
        diameter: None,
        upper_bound: erosion.shape.diameter,
        witnesses: Vec::new(),
        sets_checked: checked,
    })
}

/// Candidate masks must touch both axes' origin lines (translation
/// normalization) and realize ℓ^∞ diameter exactly `d`.
fn normalized_with_diameter(bits: u64, side: u32, d: u32) -> bool {
    let (mut min_x, mut max_x, mut min_y, mut max_y) = (u32::MAX, 0, u32::MAX, 0);
    for pos in 0..side * side {
        if bits >> pos & 1 == 1 {
            let (x, y) = (pos % side, pos / side);
            min_x = min_x.min(x);
            max_x = max_x.max(x);
            min_y = min_y.min(y);
            max_y = max_y.max(y);
        }
    }
    min_x == 0 && min_y == 0 && max_x.max(max_y) == d
}

/// Minimum over the dihedral images of the box, after re-normalizing the
/// translation; candidates are processed only in canonical position.
fn canonical_form(bits: u64, side: u32) -> u64 {
    let mut best = u64::MAX;
    for t in 0..8u32 {
        let mut img: Vec<(u32, u32)> = Vec::new();
        for pos in 0..side * side {
            if bits >> pos & 1 == 1 {
                let (x, y) = (pos % side, pos / side);
                let (x, y) = match t {
                    0 => (x, y),
                    1 => (side - 1 - x, y),
                    2 => (x, side - 1 - y),
                    3 => (side - 1 - x, side - 1 - y),
                    4 => (y, x),
                    5 => (side - 1 - y, x),
                    6 => (y, side - 1 - x),
                    _ => (side - 1 - y, side - 1 - x),
                };
                img.push((x, y));
            }
        }
        let min_x = img.iter().map(|p| p.0).min().unwrap();
        let min_y = img.iter().map(|p| p.1).min().unwrap();
        let mut v = 0u64;
        for (x, y) in img {
            v |= 1 << ((y - min_y) * side + (x - min_x));
        }
        best = best.min(v);
    }
    best
}

fn bits_to_nodes(bits: u64, side: u32) -> BTreeSet<Vec<i64>> {
    (0..side * side)
        .filter(|pos| bits >> pos & 1 == 1)
        .map(|pos| vec![(pos % side) as i64, (pos / side) as i64])
        .collect()
}

/// Renders a 1-D or 2-D node set as a text grid (`#` member, `.` sea).
pub fn ascii_art(nodes: &BTreeSet<Vec<i64>>) -> String {
    let Some(first) = nodes.iter().next() else { return String::from("(empty)") };
    let dim = first.len();
    assert!(dim <= 2, "ascii rendering covers N ∈ {{1, 2}}");
    let lo_x = nodes.iter().map(|v| v[0]).min().unwrap();
    let hi_x = nodes.iter().map(|v| v[0]).max().unwrap();
    let (lo_y, hi_y) = if dim == 2 {
        (
            nodes.iter().map(|v| v[1]).min().unwrap(),
            nodes.iter().map(|v| v[1]).max().unwrap(),
        )
    } else {
        (0, 0)
    };
    let mut out = String::new();
    for y in (lo_y..=hi_y).rev() {
        for x in lo_x..=hi_x {
            let probe = if dim == 2 { vec![x, y] } else { vec![x] };
            out.push(if nodes.contains(&probe) { '#' } else { '.' });
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mask(dim: usize, w: u32) -> NeighborhoodMask {
        NeighborhoodMask::build(dim, w, PNorm::Inf, Closure::Closed).unwrap()
    }

    fn interval(lo: i64, hi: i64) -> BTreeSet<Vec<i64>> {
        (lo..=hi).map(|x| vec![x]).collect()
    }

    #[test]
    fn three_consecutive_integers_are_stable_at_w_two() {
        let m = mask(1, 2);
        assert!(is_stable(&interval(0, 2), &m));
        assert!(!is_stable(&interval(0, 1), &m));
        assert!(is_stable(&BTreeSet::new(), &m));
    }

    #[test]
    fn interval_of_w_plus_one_is_stable_for_every_w_up_to_fifty() {
        for w in 1..=50 {
            let m = mask(1, w);
            assert!(is_stable(&interval(0, w as i64), &m), "w = {w}");
            assert!(!is_stable(&interval(0, w as i64 - 1), &m), "w = {w}");
        }
    }

    proptest! {
        // The A ∪ 𝔑(A) shortcut against a full scan of the box padded by
        // 2w, on random small sets in one and two dimensions.
        #[test]
        fn shortcut_agrees_with_wide_window_scan(
            seed in 0u64..400,
            w in 1u32..3,
            dim in 1usize..3,
        ) {
            let mut rng = stream(seed, Purpose::Erosion, 1);
            let m = mask(dim, w);
            let n_nodes = rng.random_range(1..=8usize);
            let nodes: BTreeSet<Vec<i64>> = (0..n_nodes)
                .map(|_| (0..dim).map(|_| rng.random_range(-4i64..=4)).collect())
                .collect();
            prop_assert_eq!(
                is_stable(&nodes, &m),
                is_stable_brute(&nodes, &m, 2 * w as i64)
            );
        }
    }

    #[test]
    fn erosion_trace_strictly_decreases_to_a_stable_terminal() {
        let res = erode_to_stable(2, 1, PNorm::Inf, 4, SelectionRule::Lexicographic).unwrap();
        assert!(res.trace.windows(2).all(|p| p[1] < p[0]), "pair count not strictly decreasing");
        assert!(!res.shape.nodes.is_empty());
        assert!(res.shape.certificate);
        assert!(is_connected(&res.shape.nodes));
        assert_eq!(res.trace.len(), res.flips + 1);
    }

    #[test]
    fn one_dimensional_erosion_keeps_boxes_that_span_a_window() {
        // Length 2r+1 ≥ w+1: every member already content, zero flips.
        let res = erode_to_stable(1, 3, PNorm::Inf, 3, SelectionRule::Lexicographic).unwrap();
        assert_eq!(res.flips, 0);
        assert_eq!(res.shape.nodes, interval(-3, 3));
        assert!(res.shape.certificate);
        assert!(res.shape.diameter >= 4);

        // Length 3 < w+1 = 4: the interval dissolves entirely.
        let res = erode_to_stable(1, 3, PNorm::Inf, 1, SelectionRule::Lexicographic).unwrap();
        assert!(res.shape.nodes.is_empty());
        assert!(res.shape.certificate);
        assert!(res.trace.windows(2).all(|p| p[1] < p[0]));
        assert_eq!(*res.trace.last().unwrap(), 0);
    }

    #[test]
    fn random_selection_also_terminates_stable() {
        let res = erode_to_stable(2, 1, PNorm::Inf, 3, SelectionRule::Random(11)).unwrap();
        assert!(res.shape.certificate);
        assert!(res.trace.windows(2).all(|p| p[1] < p[0]));
    }

    #[test]
    fn erosion_from_the_prescribed_box_is_nonempty_and_stable() {
        // r = 2^{2N}·w^{N+1} at N = 2, w = 1.
        let res = erode_to_stable(2, 1, PNorm::Inf, 16, SelectionRule::Lexicographic).unwrap();
        assert!(!res.shape.nodes.is_empty());
        assert!(res.shape.certificate);
        assert!(res.shape.diameter >= 1);
    }

    #[test]
    fn minimal_diameter_is_w_in_one_dimension() {
        for w in 1..=10 {
            let res = min_stable_diameter(w, 1, PNorm::Inf, w + 1).unwrap();
            assert!(res.exact);
            assert_eq!(res.diameter, Some(w), "w = {w}");
            let m = mask(1, w);
            for witness in &res.witnesses {
                assert!(is_stable(witness, &m));
                assert_eq!(diameter(witness), w);
            }
        }
    }

    #[test]
    fn two_dimensional_minimal_diameter_at_w_one_is_three() {
        // Frozen output of the exhaustive search: diameters 0–2 admit no
        // stable set (any candidate fits in a 3×3 box and is outnumbered
        // somewhere), the first witnesses appear at diameter 3.
        let res = min_stable_diameter(1, 2, PNorm::Inf, 4).unwrap();
        assert!(res.exact);
        assert_eq!(res.diameter, Some(3));
        let m = mask(2, 1);
        assert!(!res.witnesses.is_empty());
        for witness in &res.witnesses {
            assert!(is_stable(witness, &m));
            assert!(is_connected(witness), "witness not ℓ¹-connected:\n{}", ascii_art(witness));
            assert_eq!(diameter(witness), 3);
        }
    }

    #[test]
    fn budget_limited_search_falls_back_to_erosion_bound() {
        let res = min_stable_diameter(1, 2, PNorm::Inf, 1).unwrap();
        assert!(!res.exact);
        assert_eq!(res.diameter, None);
        assert!(res.upper_bound >= 1, "erosion bound missing");
        assert!(res.witnesses.is_empty());
    }

    #[test]
    fn ascii_art_draws_the_plus_shape() {
        let plus: BTreeSet<Vec<i64>> =
            [[0, 1], [1, 0], [1, 1], [1, 2], [2, 1]].iter().map(|p| p.to_vec()).collect();
        assert_eq!(ascii_art(&plus), ".#.\n###\n.#.\n");
        assert_eq!(ascii_art(&BTreeSet::new()), "(empty)");
    }
}
