//! Globality measurements.
//!
//! Exact mutual information between a partial view of a cycles instance and
//! its label, by enumerating every edge structure the cycles sampler can
//! produce, plus the random patch masking applied to 224×224 model inputs.
//!
//! A revealed node exposes the identities of its two neighbors.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::cycles::sample_cycle_topology;
use crate::error::{param_err, Error, Result};
use crate::raster::{Canvas, Color};
use crate::rng::CounterRng;
use crate::task::Label;

/// Largest `n` for exact enumeration (`2n = 12` nodes, about 21.6M structures).
pub const MAX_EXACT_N_HALF: usize = 6;

/// Side of a masking patch in pixels.
pub const PATCH_SIZE: usize = 16;
/// Patches per side at 224×224.
pub const PATCH_GRID: usize = 14;
pub const MASK_CANVAS: usize = PATCH_SIZE * PATCH_GRID;

/// Edge structure of a cycles instance as each node's sorted neighbor pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleStructure {
    pub neighbors: Vec<[u8; 2]>,
    pub label: Label,
}

impl CycleStructure {
    pub fn from_loops(node_count: usize, loops: &[Vec<usize>], label: Label) -> Self {
        let mut neighbors = alloc::vec![[0u8; 2]; node_count];
        for lp in loops {
            let m = lp.len();
            for i in 0..m {
                let prev = lp[(i + m - 1) % m] as u8;
                let next = lp[(i + 1) % m] as u8;
                neighbors[lp[i]] = [prev.min(next), prev.max(next)];
            }
        }
        Self { neighbors, label }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedStructure {
    pub structure: CycleStructure,
    /// Probability of this structure under the cycles sampler.
    pub probability: f64,
}

/// Rearranges to the next lexicographic permutation; false after the last.
fn next_permutation(v: &mut [u8]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Calls `f` once per undirected cyclic order of `nodes` (length >= 3),
/// passing the order with `nodes[0]` first.
fn for_each_cyclic_order(nodes: &[u8], mut f: impl FnMut(&[u8])) {
    let first = nodes[0];
    let mut rest: Vec<u8> = nodes[1..].to_vec();
    rest.sort_unstable();
    let mut order = Vec::with_capacity(nodes.len());
    loop {
        // Each undirected cycle appears once in each direction; keep one.
        if rest[0] < rest[rest.len() - 1] {
            order.clear();
            order.push(first);
            order.extend_from_slice(&rest);
            f(&order);
        }
        if !next_permutation(&mut rest) {
            break;
        }
    }
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

fn binomial(n: usize, k: usize) -> u64 {
    let mut r = 1u64;
    for i in 0..k as u64 {
        r = r * (n as u64 - i) / (i + 1);
    }
    r
}

/// Number of distinct structures per label: `(2n−1)!/2` single cycles and
/// `C(2n, n)/2 · ((n−1)!/2)²` pairs of cycles.
pub fn structure_counts(n_half: usize) -> [u64; 2] {
    let n = n_half;
    let one = factorial(2 * n - 1) / 2;
    let half = factorial(n - 1) / 2;
    let two = binomial(2 * n, n) / 2 * half * half;
    [two, one]
}

fn check_exact_budget(n_half: usize) -> Result<()> {
    if n_half < 3 {
        return Err(param_err!("cycles need n >= 3, got {n_half}"));
    }
    if n_half > MAX_EXACT_N_HALF {
        return Err(Error::Budget(alloc::format!(
            "exact enumeration supports n <= {MAX_EXACT_N_HALF}, got {n_half}"
        )));
    }
    Ok(())
}

/// Visits every structure with its label, without materializing the list.
pub fn for_each_cycle_structure(n_half: usize, mut f: impl FnMut(&[[u8; 2]], Label)) -> Result<()> {
    check_exact_budget(n_half)?;
    let total = 2 * n_half;
    let all: Vec<u8> = (0..total as u8).collect();
    let mut nbrs = alloc::vec![[0u8; 2]; total];

    fn fill(nbrs: &mut [[u8; 2]], order: &[u8]) {
        let m = order.len();
        for i in 0..m {
            let prev = order[(i + m - 1) % m];
            let next = order[(i + 1) % m];
            nbrs[order[i] as usize] = [prev.min(next), prev.max(next)];
        }
    }

    for_each_cyclic_order(&all, |order| {
        fill(&mut nbrs, order);
        f(&nbrs, Label::Connected);
    });

    // Unordered partitions: the group holding node 0, then its complement.
    let mut mask: u32 = 0;
    while mask < 1 << total {
        if mask & 1 == 1 && mask.count_ones() as usize == n_half {
            let group: Vec<u8> = (0..total as u8).filter(|&i| mask >> i & 1 == 1).collect();
            let other: Vec<u8> = (0..total as u8).filter(|&i| mask >> i & 1 == 0).collect();
            for_each_cyclic_order(&group, |g| {
                fill(&mut nbrs, g);
                for_each_cyclic_order(&other, |o| {
                    fill(&mut nbrs, o);
                    f(&nbrs, Label::Disconnected);
                });
            });
        }
        mask += 1;
    }
    Ok(())
}

/// Every structure the cycles sampler produces, with its probability. Each
/// label carries half the mass, spread uniformly over its structures.
pub fn enumerate_cycle_structures(n_half: usize) -> Result<Vec<WeightedStructure>> {
    check_exact_budget(n_half)?;
    let counts = structure_counts(n_half);
    let mut out = Vec::new();
    for_each_cycle_structure(n_half, |nbrs, label| {
        out.push(WeightedStructure {
            structure: CycleStructure {
                neighbors: nbrs.to_vec(),
                label,
            },
            probability: 0.5 / counts[label as usize] as f64,
        });
    })?;
    Ok(out)
}

/// Joint table of observation outcome against label.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DistributionTable {
    /// Outcome key to `[count with label 0, count with label 1]`.
    pub rows: BTreeMap<u128, [u64; 2]>,
    /// Probability mass carried by one count of each label.
    pub unit_mass: [f64; 2],
}

impl DistributionTable {
    pub fn record(&mut self, key: u128, label: Label) {
        self.rows.entry(key).or_insert([0, 0])[label as usize] += 1;
    }

    pub fn totals(&self) -> [u64; 2] {
        self.rows
            .values()
            .fold([0, 0], |acc, c| [acc[0] + c[0], acc[1] + c[1]])
    }

    /// `I(O; Y)` in bits.
    pub fn mutual_information_bits(&self) -> f64 {
        let py = {
            let t = self.totals();
            [t[0] as f64 * self.unit_mass[0], t[1] as f64 * self.unit_mass[1]]
        };
        let mut mi = 0.0;
        for counts in self.rows.values() {
            let pj = [counts[0] as f64 * self.unit_mass[0], counts[1] as f64 * self.unit_mass[1]];
            let po = pj[0] + pj[1];
            for y in 0..2 {
                if pj[y] > 0.0 {
                    mi += pj[y] * libm::log2(pj[y] / (po * py[y]));
                }
            }
        }
        mi.max(0.0)
    }
}

/// Key of what `revealed` nodes show: each one's neighbor pair, in order.
pub fn observation_key(neighbors: &[[u8; 2]], revealed: &[usize]) -> u128 {
    let n = neighbors.len() as u128;
    revealed.iter().fold(0u128, |key, &v| {
        let [a, b] = neighbors[v];
        key * (n * n) + u128::from(a) * n + u128::from(b)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MiMode {
    Exact,
    /// Plug-in estimate from `samples` draws of the cycles sampler with
    /// alternating labels.
    MonteCarlo { samples: usize, seed: u64 },
}

fn check_subset(n_half: usize, revealed: &[usize]) -> Result<()> {
    let total = 2 * n_half;
    if revealed.len() > total {
        return Err(param_err!("cannot reveal {} of {total} nodes", revealed.len()));
    }
    let mut seen = alloc::vec![false; total];
    for &v in revealed {
        if v >= total || seen[v] {
            return Err(param_err!("revealed set has invalid or repeated node {v}"));
        }
        seen[v] = true;
    }
    Ok(())
}

/// Observation/label table for a revealed node set.
pub fn distribution_table(n_half: usize, revealed: &[usize], mode: MiMode) -> Result<DistributionTable> {
    if n_half < 3 {
        return Err(param_err!("cycles need n >= 3, got {n_half}"));
    }
    check_subset(n_half, revealed)?;
    let mut table = DistributionTable::default();
    match mode {
        MiMode::Exact => {
            let counts = structure_counts(n_half);
            table.unit_mass = [0.5 / counts[0] as f64, 0.5 / counts[1] as f64];
            for_each_cycle_structure(n_half, |nbrs, label| {
                table.record(observation_key(nbrs, revealed), label);
            })?;
        }
        MiMode::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(param_err!("monte carlo needs at least one sample"));
            }
            let mut rng = CounterRng::new(seed);
            table.unit_mass = [1.0 / samples as f64; 2];
            for i in 0..samples {
                let label = if i % 2 == 0 { Label::Disconnected } else { Label::Connected };
                let loops = sample_cycle_topology(n_half, label, &mut rng)?;
                let s = CycleStructure::from_loops(2 * n_half, &loops, label);
                table.record(observation_key(&s.neighbors, revealed), label);
            }
        }
    }
    Ok(table)
}

/// `I(revealed nodes; label)` in bits for an explicit node set.
pub fn mi_for_subset(n_half: usize, revealed: &[usize], mode: MiMode) -> Result<f64> {
    Ok(distribution_table(n_half, revealed, mode)?.mutual_information_bits())
}

/// `I(k revealed nodes; label)` in bits. The sampler is invariant under node
/// relabeling, so every `k`-subset gives the same value and the canonical
/// subset `{0, …, k−1}` stands for the maximum.
pub fn conditional_mi(n_half: usize, k: usize, mode: MiMode) -> Result<f64> {
    if k > 2 * n_half {
        return Err(param_err!("cannot reveal {k} of {} nodes", 2 * n_half));
    }
    let revealed: Vec<usize> = (0..k).collect();
    mi_for_subset(n_half, &revealed, mode)
}

/// Replaces each 16×16 patch of a 224×224 canvas with mid-gray with
/// probability `p`. Draws one uniform per patch in row-major patch order and
/// returns the mask (`true` = masked) alongside the image.
pub fn patch_mask(canvas: &Canvas, p: f64, rng: &mut CounterRng) -> Result<(Canvas, Vec<bool>)> {
    if canvas.width() != MASK_CANVAS || canvas.height() != MASK_CANVAS {
        return Err(param_err!(
            "patch masking needs a {MASK_CANVAS}x{MASK_CANVAS} canvas, got {}x{}",
            canvas.width(),
            canvas.height()
        ));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(param_err!("mask probability {p} outside [0, 1]"));
    }
    let mask: Vec<bool> = (0..PATCH_GRID * PATCH_GRID).map(|_| rng.bernoulli(p)).collect();
    let mut out = canvas.clone();
    for (i, _) in mask.iter().enumerate().filter(|(_, &m)| m) {
        let (py, px) = (i / PATCH_GRID, i % PATCH_GRID);
        let (x0, y0) = ((px * PATCH_SIZE) as f64, (py * PATCH_SIZE) as f64);
        out.fill_rect(x0, y0, x0 + PATCH_SIZE as f64, y0 + PATCH_SIZE as f64, Color::MASK_GRAY);
    }
    Ok((out, mask))
}
