use std::collections::{BTreeSet, HashMap};
use std::f64::consts::TAU;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use vispad_core::cycles::{
    cycles_frame_schedule, cycles_label, make_cycles_instance, min_circular_gap, render_cycles_input,
    sample_cycle_topology, sample_node_angles, CycleGraph, CyclesParams,
};
use vispad_core::geometry::distance_to_segment;
use vispad_core::strings::{
    build_curve, compute_control_points, continuity_report, render_strings_input, sample_strings_instance,
    strings_frame_schedule, StringsParams,
};
use vispad_core::task::Label;
use vispad_core::{Color, CounterRng, Point, Style};

/// Connectivity by union-find, independent of the crate's graph helpers.
fn connected_by_union_find(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            x = p[x];
        }
        x
    }
    for &(a, b) in edges {
        let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
        parent[ra] = rb;
    }
    let r0 = root(&mut parent, 0);
    (0..n).all(|v| root(&mut parent, v) == r0)
}

fn hop_distances(n: usize, edges: &[(usize, usize)], src: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; n];
    dist[src] = Some(0);
    let mut changed = true;
    while changed {
        changed = false;
        for &(a, b) in edges {
            for (u, v) in [(a, b), (b, a)] {
                if let Some(du) = dist[u] {
                    if dist[v].is_none_or(|dv| dv > du + 1) {
                        dist[v] = Some(du + 1);
                        changed = true;
                    }
                }
            }
        }
    }
    dist
}

fn cycles(n_half: usize, label: Label, seed: u64) -> CycleGraph {
    let mut rng = CounterRng::new(seed);
    make_cycles_instance(&CyclesParams::for_canvas(n_half, 448), label, &mut rng).unwrap()
}

#[test]
fn gaps_never_below_epsilon() {
    let mut rng = CounterRng::new(42);
    for _ in 0..100_000 {
        let a = sample_node_angles(24, 0.2, &mut rng).unwrap();
        assert!(min_circular_gap(&a) >= 0.2 - 1e-12);
        assert!(a.iter().all(|&x| (0.0..TAU).contains(&x)));
    }
}

#[test]
fn gap_distribution_matches_independent_simulation() {
    // Gap between the first two angles is ε plus the smallest of count−1
    // uniforms on the free span; simulate that directly with another RNG.
    let (count, eps, draws) = (12usize, 0.2, 20_000);
    let span = TAU - count as f64 * eps;
    let mut rng = CounterRng::new(9);
    let mut ours = Vec::with_capacity(draws);
    for _ in 0..draws {
        let a = sample_node_angles(count, eps, &mut rng).unwrap();
        ours.push((a[1] - a[0]).rem_euclid(TAU));
    }
    let mut other = rand::rngs::StdRng::seed_from_u64(123);
    let theirs: Vec<f64> = (0..draws)
        .map(|_| {
            let m = (0..count - 1).map(|_| other.gen_range(0.0..span)).fold(f64::INFINITY, f64::min);
            eps + m
        })
        .collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let var = |v: &[f64], m: f64| v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
    let (m1, m2) = (mean(&ours), mean(&theirs));
    let se = ((var(&ours, m1) + var(&theirs, m2)) / draws as f64).sqrt();
    assert!((m1 - m2).abs() < 3.0 * se, "means {m1} vs {m2}, se {se}");
    let expected = eps + span / count as f64;
    assert!((m1 - expected).abs() < 3.0 * var(&ours, m1).sqrt() / (draws as f64).sqrt());
}

#[test]
fn six_cycles_are_uniform() {
    let mut rng = CounterRng::new(2024);
    let draws = 10_000;
    let mut freq: HashMap<BTreeSet<(usize, usize)>, usize> = HashMap::new();
    for _ in 0..draws {
        let loops = sample_cycle_topology(3, Label::Connected, &mut rng).unwrap();
        assert_eq!(loops.len(), 1);
        let key: BTreeSet<(usize, usize)> = vispad_core::cycles::loop_edges(&loops)
            .into_iter()
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        assert_eq!(key.len(), 6);
        *freq.entry(key).or_default() += 1;
    }
    assert_eq!(freq.len(), 60);
    let p = 1.0 / 60.0;
    let expected = draws as f64 * p;
    let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
    // 60 cells at once: 4σ per cell plus a chi-square bound (df 59, p = 0.001).
    let chi2: f64 = freq.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    assert!(chi2 < 98.3, "chi-square {chi2}");
    for &c in freq.values() {
        assert!((c as f64 - expected).abs() <= 4.0 * sigma, "count {c}");
    }
}

#[test]
fn disconnected_splits_are_uniform() {
    let mut rng = CounterRng::new(77);
    let draws = 10_000;
    let mut freq: HashMap<Vec<usize>, usize> = HashMap::new();
    for _ in 0..draws {
        let loops = sample_cycle_topology(3, Label::Disconnected, &mut rng).unwrap();
        let with_zero = loops.iter().find(|l| l.contains(&0)).unwrap();
        let mut g = with_zero.clone();
        g.sort_unstable();
        *freq.entry(g).or_default() += 1;
    }
    assert_eq!(freq.len(), 10);
    let p = 0.1;
    let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
    for &c in freq.values() {
        assert!((c as f64 - draws as f64 * p).abs() <= 3.0 * sigma);
    }
}

#[test]
fn generated_graphs_keep_degree_two_and_label() {
    for seed in 0..1000u64 {
        let label = if seed % 2 == 0 { Label::Disconnected } else { Label::Connected };
        let g = cycles(3 + (seed as usize % 5), label, seed);
        let n = g.positions.len();
        let mut deg = vec![0; n];
        for &(a, b) in &g.edges {
            assert_ne!(a, b);
            deg[a] += 1;
            deg[b] += 1;
        }
        assert!(deg.iter().all(|&d| d == 2));
        let lens: Vec<usize> = g.loops.iter().map(Vec::len).collect();
        match label {
            Label::Connected => assert_eq!(lens, [n]),
            Label::Disconnected => assert_eq!(lens, [n / 2, n / 2]),
        }
        let uf = if connected_by_union_find(n, &g.edges) { Label::Connected } else { Label::Disconnected };
        assert_eq!(uf, label);
        assert_eq!(cycles_label(&g), label);
    }
}

#[test]
fn nodes_sit_on_radius_220() {
    let g = cycles(6, Label::Connected, 5);
    for p in &g.positions {
        assert!((p.distance(Point::new(224.0, 224.0)) - 220.0).abs() <= 1e-9);
    }
    let xs: Vec<f64> = g.positions.iter().map(|p| p.x).collect();
    let argmax = (0..xs.len()).fold(0, |b, i| if xs[i] > xs[b] { i } else { b });
    assert_eq!(g.rightmost, argmax);
    assert_eq!(Style::default().canvas_size, 448);
}

#[test]
fn hop_frame_counts() {
    for seed in 0..20 {
        assert_eq!(cycles_frame_schedule(&cycles(4, Label::Connected, seed)).len(), 5);
        assert_eq!(cycles_frame_schedule(&cycles(4, Label::Disconnected, seed)).len(), 3);
    }
}

#[test]
fn hop_frames_equal_bfs_balls() {
    for seed in 0..300u64 {
        let label = if seed % 2 == 0 { Label::Disconnected } else { Label::Connected };
        let g = cycles(3 + (seed as usize % 4), label, seed);
        let dist = hop_distances(g.positions.len(), &g.edges, g.rightmost);
        let ecc = dist.iter().flatten().max().copied().unwrap();
        let sched = cycles_frame_schedule(&g);
        assert_eq!(sched.len(), ecc + 1);
        for (k, frame) in sched.frames.iter().enumerate() {
            for (v, d) in dist.iter().enumerate() {
                assert_eq!(frame.contains(v), d.is_some_and(|d| d <= k));
            }
        }
        assert_eq!(sched.frames[0].indices().collect::<Vec<_>>(), [g.rightmost]);
    }
}

#[test]
fn rerender_is_identical() {
    let g = cycles(6, Label::Connected, 31);
    let style = Style::default();
    assert_eq!(render_cycles_input(&g, &style).unwrap(), render_cycles_input(&g, &style).unwrap());
}

#[test]
fn black_ink_grows_with_node_count() {
    let style = Style::default();
    let mut means = Vec::new();
    for n_half in [3, 5, 7, 9] {
        let total: usize = (0..100u64)
            .map(|s| {
                let label = if s % 2 == 0 { Label::Disconnected } else { Label::Connected };
                render_cycles_input(&cycles(n_half, label, 1000 + s), &style).unwrap().count(Color::BLACK)
            })
            .sum();
        means.push(total as f64 / 100.0);
    }
    assert!(means.windows(2).all(|w| w[1] > w[0]), "{means:?}");
}

#[test]
fn square_control_points() {
    let sq = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 1.0)];
    let cps = compute_control_points(&sq, 0.25).unwrap();
    assert_eq!(cps[0].0, Point::new(0.25, -0.25));
    assert_eq!(cps[0].1, Point::new(0.75, -0.25));
}

#[test]
fn anchors_sit_on_radius_200() {
    let mut rng = CounterRng::new(8);
    let s = sample_strings_instance(&StringsParams::for_canvas(6, 448), Label::Connected, &mut rng).unwrap();
    for a in &s.anchors {
        assert!((a.distance(Point::new(224.0, 224.0)) - 200.0).abs() <= 1e-9);
    }
}

#[test]
fn strings_are_c1_continuous() {
    for seed in 0..2000u64 {
        let label = if seed % 2 == 0 { Label::Disconnected } else { Label::Connected };
        let mut rng = CounterRng::new(seed);
        let s = sample_strings_instance(&StringsParams::for_canvas(6, 448), label, &mut rng).unwrap();
        assert!(continuity_report(&s) <= 1e-9);
    }
}

#[test]
fn perturbed_control_point_breaks_continuity_by_three_tenths() {
    let mut rng = CounterRng::new(4);
    let mut s = sample_strings_instance(&StringsParams::for_canvas(4, 448), Label::Connected, &mut rng).unwrap();
    s.segments[2].c1 = s.segments[2].c1 + Point::new(0.1, 0.0);
    assert!((continuity_report(&s) - 0.3).abs() < 1e-9);
}

proptest! {
    #[test]
    fn continuity_holds_for_any_alpha(alpha in 0.0f64..=1.0, seed in any::<u64>()) {
        let mut rng = CounterRng::new(seed);
        let params = StringsParams { alpha, ..StringsParams::for_canvas(5, 448) };
        let s = sample_strings_instance(&params, Label::Disconnected, &mut rng).unwrap();
        let rebuilt = build_curve(s.n_half, s.anchors.clone(), s.loops.clone(), s.label, alpha).unwrap();
        prop_assert!(continuity_report(&rebuilt) <= 1e-9);
    }
}

#[test]
fn strings_ink_is_only_curve() {
    let style = Style::default();
    for seed in 0..5u64 {
        let mut rng = CounterRng::new(seed);
        let s = sample_strings_instance(&StringsParams::for_canvas(6, 448), Label::Connected, &mut rng).unwrap();
        let img = render_strings_input(&s, &style).unwrap();
        let polys: Vec<Vec<Point>> = s.segments.iter().map(|seg| s.bezier(seg).flatten(0.25)).collect();
        for y in 0..448 {
            for x in 0..448 {
                if img.get(x, y) != Some(Color::BLACK) {
                    continue;
                }
                let p = Point::new(x as f64, y as f64);
                let d = polys
                    .iter()
                    .flat_map(|poly| poly.windows(2).map(move |w| distance_to_segment(p, w[0], w[1])))
                    .fold(f64::INFINITY, f64::min);
                assert!(d <= style.curve_width / 2.0 + 1e-9);
            }
        }
        assert_eq!(img.count(Color::BLUE), 0);
        for seg in &s.segments {
            let mid = s.bezier(seg).point_at(0.5);
            if !(1.0..446.0).contains(&mid.x) || !(1.0..446.0).contains(&mid.y) {
                continue;
            }
            let (mx, my) = (mid.x as usize, mid.y as usize);
            let near = (my - 1..=my + 1)
                .flat_map(|y| (mx - 1..=mx + 1).map(move |x| (x, y)))
                .any(|(x, y)| {
                    img.get(x, y) == Some(Color::BLACK)
                        && Point::new(x as f64, y as f64).distance(mid) <= 1.0
                });
            assert!(near, "no ink within 1 px of segment midpoint");
        }
    }
}

#[test]
fn strings_frames() {
    for seed in 0..50u64 {
        let mut rng = CounterRng::new(seed);
        let c = sample_strings_instance(&StringsParams::for_canvas(4, 448), Label::Connected, &mut rng).unwrap();
        assert_eq!(strings_frame_schedule(&c).len(), 5);
        let mut rng = CounterRng::new(seed);
        let d = sample_strings_instance(&StringsParams::for_canvas(4, 448), Label::Disconnected, &mut rng).unwrap();
        let sched = strings_frame_schedule(&d);
        let own_loop = d.loops.iter().find(|l| l.contains(&d.rightmost)).unwrap();
        let want: BTreeSet<usize> = own_loop.iter().copied().collect();
        let got: BTreeSet<usize> = sched.final_frame().indices().collect();
        assert_eq!(got, want);
        assert!(sched.frames.windows(2).all(|w| w[0].is_subset_of(&w[1]) && w[0] != w[1]));
    }
}

#[test]
fn same_seed_same_strings() {
    let p = StringsParams::for_canvas(6, 448);
    let a = sample_strings_instance(&p, Label::Connected, &mut CounterRng::new(3)).unwrap();
    let b = sample_strings_instance(&p, Label::Connected, &mut CounterRng::new(3)).unwrap();
    assert_eq!(a, b);
}
