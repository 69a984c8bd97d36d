//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p recourse-core --test acceptance`.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use recourse_core::adversary::{robust_single_edge_budget, tm_size, SingleEdgeMode};
use recourse_core::allflip::{af_potential, CascadeEvent, ReferenceOrientation};
use recourse_core::bmatch::{HeightAudit, HeightTracker};
use recourse_core::bounds::{allflip_bound, bmatch_bound, floor_log, sp_total_bound};
use recourse_core::format::{parse_witness, witness_to_text};
use recourse_core::gen::{arboricity_bounded, bmatch_feasible, random_forest};
use recourse_core::oracle::{arboricity, capacitated_assignment, min_max_indegree};
use recourse_core::orient_sp::{greedy_run_sequence, sp_run_sequence};
use recourse_core::{
    Adversary, AllFlipConfig, AllFlipOrienter, BMatchConfig, BMatchState, FixingOrienter,
    IdAllocation, InitialOrientation, NodeId, OracleMode, PathTiePolicy, PickPolicy, SequenceFile,
    ShortestPathOrienter, SpConfig, StepRecord, TraceFile, TraceHeader, UnsaturatedTiePolicy,
    Witness,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Collects the first few failure messages of a criterion.
#[derive(Default)]
struct Failures {
    count: usize,
    samples: Vec<String>,
}

impl Failures {
    fn push(&mut self, msg: String) {
        self.count += 1;
        if self.samples.len() < 3 {
            self.samples.push(msg);
        }
    }

    fn finish(self, ok_detail: impl Into<String>) -> Outcome {
        if self.count == 0 {
            outcome(true, ok_detail)
        } else {
            outcome(
                false,
                format!("{} failure(s): {}", self.count, self.samples.join("; ")),
            )
        }
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo_exp: f64, hi_exp: f64) -> usize {
    10f64.powf(rng.gen_range(lo_exp..=hi_exp)).round() as usize
}

fn forest_sizes() -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f0e5);
    (0..1000).map(|_| log_uniform(&mut rng, 3.0, 5.0)).collect()
}

fn sp() -> ShortestPathOrienter {
    ShortestPathOrienter::new(SpConfig::new(2)).unwrap()
}

fn tie_policies(seed: u64) -> [(&'static str, SpConfig); 3] {
    [
        (
            "first",
            SpConfig::new(2).with_ties(
                UnsaturatedTiePolicy::TowardFirst,
                PathTiePolicy::FirstEndpoint,
            ),
        ),
        ("second", SpConfig::new(2)),
        ("random", SpConfig::random(2, seed)),
    ]
}

/// Failures of orientation runs, split by the bound they break.
#[derive(Default)]
struct SpChecks {
    degree: Failures,
    step: Failures,
    total: Failures,
}

/// Checks one c-constrained run: in-degree, per-step and total bounds.
fn check_sp_steps(label: &str, steps: &[StepRecord], c: u32, checks: &mut SpChecks) {
    if let Some(s) = steps.iter().find(|s| s.max_in_degree > c as u64) {
        checks.degree.push(format!(
            "{label}: in-degree {} at step {}",
            s.max_in_degree, s.step
        ));
    }
    if let Some((t, s)) = steps
        .iter()
        .enumerate()
        .find(|(t, s)| s.flips > floor_log(*t as u64 + 1, c as u64))
    {
        checks
            .step
            .push(format!("{label}: {} flips at step {t}", s.flips));
    }
    let total = steps.last().map_or(0, |s| s.cumulative_flips);
    let bound = sp_total_bound(steps.len() as u64, c);
    if total > bound {
        checks
            .total
            .push(format!("{label}: total {total} > {bound}"));
    }
}

struct ForestRuns {
    elapsed: Duration,
    edges: u64,
    total_flips: u64,
    busiest: u64,
    checks: SpChecks,
}

fn run_forests() -> ForestRuns {
    let mut checks = SpChecks::default();
    let start = Instant::now();
    let (mut edges, mut total_flips, mut busiest) = (0, 0, 0);
    for (i, &n) in forest_sizes().iter().enumerate() {
        let f = random_forest(n, i as u64);
        let mut alg = sp();
        let mut steps = Vec::with_capacity(n);
        for &(u, v) in &f.edges {
            match alg.process_edge(u, v) {
                Ok(s) => steps.push(s),
                Err(e) => {
                    checks.degree.push(format!("forest {i}: {e}"));
                    break;
                }
            }
        }
        if let Err(e) = alg.state().check_invariants() {
            checks.degree.push(format!("forest {i}: {e}"));
        }
        if alg.state().recompute_max_in_degree() > 2 {
            checks
                .degree
                .push(format!("forest {i}: final in-degree above 2"));
        }
        check_sp_steps(&format!("forest {i}"), &steps, 2, &mut checks);
        edges += n as u64;
        total_flips += alg.cumulative_flips();
        busiest = busiest.max(steps.iter().map(|s| s.flips).max().unwrap_or(0));
    }
    ForestRuns {
        elapsed: start.elapsed(),
        edges,
        total_flips,
        busiest,
        checks,
    }
}

/// Traces of every adversary construction against the plain c = 2 orienter.
fn adversary_traces() -> Vec<(String, Vec<StepRecord>)> {
    let mut out = Vec::new();
    let mut record = |label: String, f: &dyn Fn(&mut Adversary<'_, ShortestPathOrienter>)| {
        let mut alg = sp();
        let mut adv = Adversary::new(&mut alg);
        f(&mut adv);
        out.push((label, adv.into_recording().trace));
    };
    record("build_tm 1..12".into(), &|adv| {
        for m in 1..=12 {
            adv.build_tm(m).unwrap();
        }
    });
    for p in 1..=10 {
        record(format!("single-step {}", 1u64 << p), &|adv| {
            adv.single_step_log_flips(1 << p).unwrap();
        });
    }
    for n in [43, 403, 4003] {
        record(format!("linear {n}"), &|adv| {
            adv.linear_total_flips(n).unwrap();
        });
    }
    for k in 1..=5 {
        record(format!("single-edge {k}"), &|adv| {
            adv.single_edge_flips(k, SingleEdgeMode::Robust).unwrap();
        });
        record(format!("single-edge-faithful {k}"), &|adv| {
            adv.single_edge_flips(k, SingleEdgeMode::Faithful).unwrap();
        });
    }
    record("two-flip 18".into(), &|adv| {
        adv.two_flip_forcer(18).unwrap();
    });
    let mut alg = FixingOrienter::new(SpConfig::new(2)).unwrap();
    let mut adv = Adversary::new(&mut alg);
    adv.two_flip_forcer(18).unwrap();
    out.push(("two-flip-fixing 18".into(), adv.into_recording().trace));
    out
}

fn criterion_1(forests: &mut ForestRuns, adversary: &[(String, Vec<StepRecord>)]) -> Outcome {
    let mut fails = std::mem::take(&mut forests.checks.degree);
    for (label, trace) in adversary {
        if let Some(s) = trace.iter().find(|s| s.max_in_degree > 2) {
            fails.push(format!(
                "{label}: in-degree {} at step {}",
                s.max_in_degree, s.step
            ));
        }
    }
    if forests.elapsed >= Duration::from_secs(60) {
        fails.push(format!("forest runs took {:.1?}", forests.elapsed));
    }
    let adv_edges: usize = adversary.iter().map(|(_, t)| t.len()).sum();
    fails.finish(format!(
        "1000 forests, {} edges in {:.1?}; {} adversary recordings, {adv_edges} edges; max in-degree <= 2",
        forests.edges,
        forests.elapsed,
        adversary.len()
    ))
}

fn criterion_2(forests: &mut ForestRuns, adversary: &[(String, Vec<StepRecord>)]) -> Outcome {
    let mut fails = std::mem::take(&mut forests.checks.total);
    for (label, trace) in adversary {
        let total = trace.last().map_or(0, |s| s.cumulative_flips);
        let bound = sp_total_bound(trace.len() as u64, 2);
        if total > bound {
            fails.push(format!("{label}: total {total} > {bound}"));
        }
    }
    let sizes = forest_sizes();
    let mut generalized = 0;
    let mut checks = SpChecks::default();
    for c in [3u32, 4, 8] {
        for (i, &n) in sizes.iter().enumerate().step_by(5) {
            let f = random_forest(n, i as u64);
            match sp_run_sequence(SpConfig::new(c), &f.edges) {
                Ok(steps) => check_sp_steps(&format!("c={c} forest {i}"), &steps, c, &mut checks),
                Err(e) => fails.push(format!("c={c} forest {i}: {e}")),
            }
            generalized += 1;
        }
    }
    for part in [checks.degree, checks.step, checks.total] {
        for msg in part.samples {
            fails.push(msg);
        }
    }
    fails.finish(format!(
        "c=2 total flips {} over {} edges within bound; {generalized} generalized runs (c=3,4,8) within bound",
        forests.total_flips, forests.edges
    ))
}

fn criterion_3(forests: &mut ForestRuns) -> Outcome {
    let mut fails = std::mem::take(&mut forests.checks.step);
    for p in 1..=10u32 {
        let m = 1u64 << p;
        let mut alg = sp();
        let mut adv = Adversary::new(&mut alg);
        match adv.single_step_log_flips(m) {
            Ok(out) => {
                if out.final_flips != p as u64 || out.edges_used != 5 * m - 3 {
                    fails.push(format!(
                        "m={m}: {} flips with {} edges",
                        out.final_flips, out.edges_used
                    ));
                }
            }
            Err(e) => fails.push(format!("m={m}: {e}")),
        }
    }
    fails.finish(format!(
        "forest steps <= floor(log2 n_t) (largest step {}); single-step m=2..1024 gives log2 m flips with 5m-3 edges",
        forests.busiest
    ))
}

fn criterion_4() -> Outcome {
    let mut fails = Failures::default();
    let mut runs = 0;
    for seed in 0..20u64 {
        for (name, cfg) in tie_policies(seed) {
            let mut alg = ShortestPathOrienter::new(cfg).unwrap();
            let mut adv = Adversary::with_ids(&mut alg, IdAllocation::Scattered { seed });
            for m in 1..=12 {
                match adv.build_tm(m) {
                    Ok(t) => {
                        let dist = adv.view().nearest_unsaturated(t.root).map(|p| p.len());
                        if t.edges_used != tm_size(m) || dist.as_ref().ok() != Some(&(m as usize)) {
                            fails.push(format!(
                                "{name} seed {seed} m={m}: {} edges, distance {dist:?}",
                                t.edges_used
                            ));
                        }
                    }
                    Err(e) => fails.push(format!("{name} seed {seed} m={m}: {e}")),
                }
                runs += 1;
            }
        }
    }
    fails.finish(format!(
        "{runs} builds (m=1..12, 3 tie policies, 20 id seeds) with exact size and root distance"
    ))
}

fn criterion_5() -> Outcome {
    let mut fails = Failures::default();
    let mut seen = Vec::new();
    for n in [43u64, 403, 4003] {
        let mut alg = sp();
        let mut adv = Adversary::new(&mut alg);
        match adv.linear_total_flips(n) {
            Ok(out) => {
                let k = (n - 3) / 4;
                let total = alg.cumulative_flips();
                let bound = sp_total_bound(out.edges_used, 2);
                if out.forced_flips < k || total > bound || out.edges_used > n {
                    fails.push(format!(
                        "n={n}: forced {} (need {k}), total {total} (bound {bound}), {} edges",
                        out.forced_flips, out.edges_used
                    ));
                }
                seen.push(format!("n={n}: {}>={k}", out.forced_flips));
            }
            Err(e) => fails.push(format!("n={n}: {e}")),
        }
    }
    fails.finish(format!("forced flips {}", seen.join(", ")))
}

/// Robust round m attaches one tree of depth dist+2 ≤ 3m − 1 and a second of
/// the same depth; summing sizes directly gives the edge budget.
fn robust_budget_by_summation(k: u32) -> u64 {
    let mut total = 1u64;
    for m in 1..=k {
        total += 2 * tm_size(3 * m - 1) + 2;
    }
    total
}

fn criterion_6() -> Outcome {
    let mut fails = Failures::default();
    let mut seen = Vec::new();
    for k in 1..=5u32 {
        let closed = robust_single_edge_budget(k);
        let summed = robust_budget_by_summation(k);
        if closed != summed {
            fails.push(format!("k={k}: closed form {closed} vs summation {summed}"));
        }
        let mut alg = sp();
        let mut adv = Adversary::new(&mut alg);
        match adv.single_edge_flips(k, SingleEdgeMode::Robust) {
            Ok(out) => {
                if out.red_flips < k as u64 || out.edges_used > closed {
                    fails.push(format!(
                        "k={k}: {} flips of the watched edge with {} edges (budget {closed})",
                        out.red_flips, out.edges_used
                    ));
                }
                seen.push(format!(
                    "k={k}: {} flips, {}/{closed} edges",
                    out.red_flips, out.edges_used
                ));
            }
            Err(e) => fails.push(format!("k={k}: {e}")),
        }
    }
    fails.finish(seen.join("; "))
}

fn criterion_7() -> Outcome {
    let mut fails = Failures::default();
    let mut check =
        |label: &str, out: recourse_core::Result<recourse_core::adversary::TwoFlipOutcome>| {
            match out {
                Ok(o) if o.final_flips >= 2 && o.edges_used >= 303 => {}
                Ok(o) => fails.push(format!(
                    "{label}: {} flips with {} edges",
                    o.final_flips, o.edges_used
                )),
                Err(e) => fails.push(format!("{label}: {e}")),
            }
        };
    let mut plain = sp();
    check("plain", Adversary::new(&mut plain).two_flip_forcer(18));
    let mut fixing = FixingOrienter::new(SpConfig::new(2)).unwrap();
    check("fixing", Adversary::new(&mut fixing).two_flip_forcer(18));
    fails.finish("plain and fixing variants both take a 2-flip step after 303 edges")
}

/// Runs all-flip over `edges` and checks per-step flips and in-degree.
/// With a reference orientation, also checks the potential drop of every all-flip.
fn allflip_run(
    label: &str,
    config: AllFlipConfig,
    edges: &[(NodeId, NodeId)],
    reference: Option<&ReferenceOrientation>,
    fails: &mut Failures,
) -> u64 {
    let (delta, big) = (config.promised, config.maintained);
    let slack = (big + 1 - 2 * delta) as u64;
    let mut alg = AllFlipOrienter::new(config).unwrap();
    let mut bad_drop: Option<String> = None;
    let mut all_flips = 0u64;
    for (t, &(u, v)) in edges.iter().enumerate() {
        let mut psi_before = 0;
        let mut observer = |ev: CascadeEvent<'_>, state: &recourse_core::OrientationState| {
            let Some(r) = reference else { return };
            match ev {
                CascadeEvent::BeforeAllFlip { .. } => {
                    psi_before = af_potential(state, r, delta).map_or(u64::MAX, |p| p.psi);
                }
                CascadeEvent::AfterAllFlip { node, .. } => {
                    all_flips += 1;
                    let after = af_potential(state, r, delta).map_or(u64::MAX, |p| p.psi);
                    if after == u64::MAX || psi_before == u64::MAX || psi_before < after + slack {
                        bad_drop.get_or_insert(format!(
                            "{label}: potential {psi_before} -> {after} at node {node}, step {t}"
                        ));
                    }
                }
                CascadeEvent::Inserted { .. } => {}
            }
        };
        let rec = match alg.process_edge_observed(u, v, &mut observer) {
            Ok(r) => r,
            Err(e) => {
                fails.push(format!("{label} step {t}: {e}"));
                return 0;
            }
        };
        let bound = allflip_bound(t as u64 + 1, delta, big);
        if rec.max_in_degree > big as u64 || rec.cumulative_flips > bound {
            fails.push(format!(
                "{label} step {t}: in-degree {}, cumulative {} (bound {bound})",
                rec.max_in_degree, rec.cumulative_flips
            ));
            return 0;
        }
    }
    if let Some(msg) = bad_drop {
        fails.push(msg);
    }
    if alg.state().recompute_max_in_degree() > big {
        fails.push(format!("{label}: final in-degree above {big}"));
    }
    all_flips
}

fn criterion_8() -> Outcome {
    let mut fails = Failures::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0xa11f);
    let initials = [
        InitialOrientation::TowardFirst,
        InitialOrientation::TowardSecond,
        InitialOrientation::Random { seed: 5 },
    ];
    let mut runs = 0;
    let mut audited = 0;
    // Trees and forests: every configuration, with the potential audit on
    // the smaller ones.
    for i in 0..150u64 {
        let n = log_uniform(&mut rng, 1.0, 4.0);
        let f = random_forest(n, 1000 + i);
        let reference = ReferenceOrientation::root_away(&f.edges).unwrap();
        for (delta, big) in [(1, 2), (1, 3), (2, 4), (2, 5)] {
            let cfg = AllFlipConfig::new(delta, big)
                .unwrap()
                .with_initial(initials[i as usize % 3]);
            let r = (n <= 3000).then_some(&reference);
            audited += allflip_run(
                &format!("forest {i} ({delta},{big})"),
                cfg,
                &f.edges,
                r,
                &mut fails,
            );
            runs += 1;
        }
    }
    // Small instances certified by the exhaustive arboricity oracle.
    for i in 0..200u64 {
        let nodes = 4 + (i % 11) as u32;
        for (delta, big) in [(1, 3), (2, 4), (2, 5)] {
            let g = if delta == 1 {
                random_forest(nodes as usize - 1, 5000 + i)
            } else {
                arboricity_bounded(nodes, delta, 5000 + i).unwrap()
            };
            match arboricity(&g.edges) {
                Ok(rep) if rep.ceiling <= delta as u64 => {}
                Ok(rep) => {
                    fails.push(format!(
                        "instance {i}: arboricity {} above {delta}",
                        rep.value
                    ));
                    continue;
                }
                Err(e) => {
                    fails.push(format!("instance {i}: {e}"));
                    continue;
                }
            }
            let cfg = AllFlipConfig::new(delta, big)
                .unwrap()
                .with_initial(initials[i as usize % 3]);
            let reference = ReferenceOrientation {
                heads: g.heads.clone(),
            };
            audited += allflip_run(
                &format!("small {i} ({delta},{big})"),
                cfg,
                &g.edges,
                Some(&reference),
                &mut fails,
            );
            runs += 1;
        }
    }
    // Larger unions of two forests, promised by construction.
    for i in 0..60u64 {
        let nodes = log_uniform(&mut rng, 2.5, 3.7) as u32;
        let g = arboricity_bounded(nodes, 2, 9000 + i).unwrap();
        for big in [4, 5] {
            let cfg = AllFlipConfig::new(2, big)
                .unwrap()
                .with_initial(initials[i as usize % 3]);
            allflip_run(
                &format!("union {i} (2,{big})"),
                cfg,
                &g.edges,
                None,
                &mut fails,
            );
            runs += 1;
        }
    }
    fails.finish(format!(
        "{runs} runs within flip and in-degree bounds; potential drop held at {audited} all-flips"
    ))
}

struct MatchingRuns {
    instances: usize,
    runs: usize,
    arrivals: u64,
    audited_steps: usize,
    swaps: u64,
    base_c_misses: u64,
    bound_fails: Failures,
    height_fails: Failures,
    elapsed: Duration,
}

/// Tracked heights are compared with a full recomputation this often.
const CROSS_CHECK_EVERY: usize = 257;

fn run_matchings() -> MatchingRuns {
    let mut bound_fails = Failures::default();
    let mut height_fails = Failures::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0xb3a7);
    let start = Instant::now();
    let (mut runs, mut arrivals, mut audited_steps, mut swaps) = (0, 0, 0, 0);
    // Steps of C = 3 runs where some tail exceeds |L|/3^h. Reported, not failed.
    let mut base_c_misses = 0u64;
    let picks = [
        PickPolicy::LowestLoadThenId,
        PickPolicy::FirstListed,
        PickPolicy::Random { seed: 11 },
    ];
    for i in 0..1000u64 {
        let k = 1 + (i % 3) as u32;
        let n = log_uniform(&mut rng, 1.0, 4.0);
        let inst = bmatch_feasible(n, k, i).unwrap();
        let choices: Vec<Vec<u32>> = inst
            .arrivals
            .iter()
            .map(|a| a.iter().map(|y| y.0).collect())
            .collect();
        let slots = choices
            .iter()
            .flatten()
            .max()
            .map_or(0, |&m| m as usize + 1);
        if capacitated_assignment(&choices, slots, k).is_none() {
            bound_fails.push(format!("instance {i}: no assignment with load {k}"));
            continue;
        }
        arrivals += n as u64;
        for c in [2u32, 3] {
            runs += 1;
            let label = format!("instance {i} (K={k}, C={c})");
            let cfg = BMatchConfig::new(k, c)
                .unwrap()
                .with_pick(picks[(i / 3) as usize % 3]);
            let mut state = BMatchState::new(cfg).unwrap();
            let mut audit = HeightAudit::new();
            let mut tracker = HeightTracker::new(&state);
            for (t, a) in inst.arrivals.iter().enumerate() {
                let rec = match state.process_arrival(a) {
                    Ok(r) => r,
                    Err(e) => {
                        bound_fails.push(format!("{label} step {t}: {e}"));
                        break;
                    }
                };
                let bound = bmatch_bound(t as u64 + 1, c);
                if rec.max_in_degree > (c * k) as u64 || rec.cumulative_flips > bound {
                    bound_fails.push(format!(
                        "{label} step {t}: load {}, swaps {} (bound {bound})",
                        rec.max_in_degree, rec.cumulative_flips
                    ));
                    break;
                }
                if let Err(e) = tracker.update(&state) {
                    height_fails.push(format!("{label} step {t}: {e}"));
                    break;
                }
                audit.observe_tracked(&tracker, &state);
                if let Some(h) = tracker.tail_violation(2) {
                    height_fails.push(format!("{label} step {t}: tail count at height {h}"));
                }
                if c > 2 && tracker.tail_violation(c as u64).is_some() {
                    base_c_misses += 1;
                }
                if let Some(bad) = tracker.parity_violations(&state).first() {
                    height_fails.push(format!("{label} step {t}: parity of {bad}"));
                }
                if (t % CROSS_CHECK_EVERY == 0 || t + 1 == n)
                    && tracker.report(&state) != state.heights()
                {
                    height_fails.push(format!(
                        "{label} step {t}: tracked heights differ from a full recomputation"
                    ));
                }
            }
            swaps += state.cumulative_swaps();
            if let Err(e) = state.check_invariants() {
                bound_fails.push(format!("{label}: {e}"));
            }
            audited_steps += audit.steps();
            if let Some(v) = audit.violations().first() {
                height_fails.push(format!("{label}: {v:?}"));
            }
        }
    }
    MatchingRuns {
        instances: 1000,
        runs,
        arrivals,
        audited_steps,
        swaps,
        base_c_misses,
        bound_fails,
        height_fails,
        elapsed: start.elapsed(),
    }
}

fn criterion_9(m: &mut MatchingRuns) -> Outcome {
    std::mem::take(&mut m.bound_fails).finish(format!(
        "{} feasible instances ({} arrivals), {} runs with C=2 and C=3, {} swaps: loads <= CK, swaps <= nC/(C-1)^2",
        m.instances, m.arrivals, m.runs, m.swaps
    ))
}

fn criterion_10(m: &mut MatchingRuns) -> Outcome {
    std::mem::take(&mut m.height_fails).finish(format!(
        "{} audited steps: heights monotone, +2 swap gap, tails <= |L|/2^h, potential >= swaps; C=3 steps with a tail above |L|/3^h: {} ({:.1?} with criterion 9)",
        m.audited_steps, m.base_c_misses, m.elapsed
    ))
}

fn criterion_11() -> Outcome {
    use recourse_core::adversary::pairing_norecourse;
    let mut fails = Failures::default();
    let mut cases: Vec<(u64, u64)> = vec![(8, 3)];
    cases.extend((2..=10u32).map(|k| ((1u64 << k) - 1, k as u64)));
    for (n, want) in cases {
        let edges = pairing_norecourse(n);
        let got = greedy_run_sequence(&edges)
            .map(|s| s.iter().map(|r| r.max_in_degree).max().unwrap_or(0));
        if edges.len() as u64 != n || got.as_ref().ok() != Some(&want) {
            fails.push(format!("n={n}: greedy max {got:?}, want {want}"));
        }
        for mode in [OracleMode::Auto, OracleMode::Feasibility] {
            match min_max_indegree(&edges, mode) {
                Ok(rep) if rep.value == Ratio::from_integer(1) => {}
                Ok(rep) => fails.push(format!("n={n} {mode:?}: optimum {}", rep.value)),
                Err(e) => fails.push(format!("n={n} {mode:?}: {e}")),
            }
        }
    }
    let sizes = forest_sizes();
    for (i, &n) in sizes.iter().enumerate().step_by(20) {
        let f = random_forest(n, i as u64);
        match min_max_indegree(&f.edges, OracleMode::Feasibility) {
            Ok(rep) if rep.value == Ratio::from_integer(1) => {}
            Ok(rep) => fails.push(format!("forest {i}: optimum {}", rep.value)),
            Err(e) => fails.push(format!("forest {i}: {e}")),
        }
    }
    fails.finish(
        "greedy max 3 at n=8 and k at n=2^k-1 (k=2..10); offline optimum 1 on every forest checked",
    )
}

fn graphs_from_masks(nodes: u32, max_edges: u32) -> Vec<Vec<(NodeId, NodeId)>> {
    let pairs: Vec<(NodeId, NodeId)> = (0..nodes)
        .flat_map(|a| ((a + 1)..nodes).map(move |b| (NodeId(a), NodeId(b))))
        .collect();
    (1u32..(1 << pairs.len()))
        .filter(|m| m.count_ones() <= max_edges)
        .map(|m| {
            pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| m & (1 << i) != 0)
                .map(|(_, &p)| p)
                .collect()
        })
        .collect()
}

fn criterion_12() -> Outcome {
    let mut fails = Failures::default();
    let mut graphs = graphs_from_masks(5, 10);
    graphs.extend(graphs_from_masks(6, 10));
    let mut rng = ChaCha8Rng::seed_from_u64(0x0ac1e);
    for _ in 0..3000 {
        let nodes = rng.gen_range(2..=8u32);
        let m = rng.gen_range(1..=10usize);
        let g: Vec<(NodeId, NodeId)> = (0..m)
            .map(|_| {
                let a = rng.gen_range(0..nodes);
                let mut b = rng.gen_range(0..nodes);
                while b == a {
                    b = rng.gen_range(0..nodes);
                }
                (NodeId(a), NodeId(b))
            })
            .collect();
        graphs.push(g);
    }
    for g in &graphs {
        let ex = min_max_indegree(g, OracleMode::Exhaustive);
        let fe = min_max_indegree(g, OracleMode::Feasibility);
        match (ex, fe) {
            (Ok(a), Ok(b)) if a.value == b.value => {}
            (a, b) => fails.push(format!(
                "{g:?}: exhaustive {:?} vs feasibility {:?}",
                a.map(|r| r.value),
                b.map(|r| r.value)
            )),
        }
    }
    let path: Vec<_> = (0..6).map(|i| (NodeId(i), NodeId(i + 1))).collect();
    let star: Vec<_> = (1..6).map(|i| (NodeId(0), NodeId(i))).collect();
    let triangle = vec![
        (NodeId(0), NodeId(1)),
        (NodeId(1), NodeId(2)),
        (NodeId(2), NodeId(0)),
    ];
    let k4: Vec<_> = (0..4)
        .flat_map(|a| ((a + 1)..4).map(move |b| (NodeId(a), NodeId(b))))
        .collect();
    for (name, g, want) in [
        ("path", path, Ratio::from_integer(1)),
        ("star", star, Ratio::from_integer(1)),
        ("triangle", triangle, Ratio::new(3, 2)),
        ("K4", k4, Ratio::from_integer(2)),
    ] {
        match arboricity(&g) {
            Ok(rep) if rep.value == want => {}
            Ok(rep) => fails.push(format!("{name}: arboricity {}", rep.value)),
            Err(e) => fails.push(format!("{name}: {e}")),
        }
    }
    fails.finish(format!(
        "{} graphs with at most 10 edges agree; arboricity tree=1, triangle=3/2, K4=2",
        graphs.len()
    ))
}

fn sp_trace(edges: &[(NodeId, NodeId)], seed: u64) -> String {
    let steps = sp_run_sequence(SpConfig::random(2, seed), edges).unwrap();
    let header = TraceHeader {
        algorithm: "orient-sp".into(),
        params: BTreeMap::from([("c".to_string(), 2), ("seed".to_string(), seed)]),
        construction: None,
    };
    let verdicts = recourse_core::bounds::evaluate(&header, &steps).unwrap();
    TraceFile {
        summary: recourse_core::bounds::summarize(&steps, verdicts),
        header,
        steps,
    }
    .to_text()
}

fn bmatch_trace(arrivals: &[Vec<NodeId>], seed: u64) -> String {
    let cfg = BMatchConfig::new(2, 2)
        .unwrap()
        .with_pick(PickPolicy::Random { seed });
    let steps = recourse_core::bmatch::bm_run_sequence(cfg, arrivals).unwrap();
    let header = TraceHeader {
        algorithm: "bmatch".into(),
        params: BTreeMap::from([("K".to_string(), 2), ("C".to_string(), 2)]),
        construction: None,
    };
    let verdicts = recourse_core::bounds::evaluate(&header, &steps).unwrap();
    TraceFile {
        summary: recourse_core::bounds::summarize(&steps, verdicts),
        header,
        steps,
    }
    .to_text()
}

fn criterion_13() -> Outcome {
    let mut fails = Failures::default();
    let mut checked = 0;
    for seed in 0..20u64 {
        let f1 = random_forest(2000, seed);
        let f2 = random_forest(2000, seed);
        let seq = SequenceFile::Orientation {
            constraint: 2,
            edges: f1.edges.clone(),
        };
        let text = seq.to_text();
        if text
            != (SequenceFile::Orientation {
                constraint: 2,
                edges: f2.edges.clone(),
            })
            .to_text()
        {
            fails.push(format!("forest seed {seed} not reproducible"));
        }
        let a = sp_trace(&f1.edges, seed);
        if a != sp_trace(&f2.edges, seed) {
            fails.push(format!(
                "orient-sp trace for seed {seed} differs between runs"
            ));
        }
        let m1 = bmatch_feasible(1500, 2, seed).unwrap();
        let m2 = bmatch_feasible(1500, 2, seed).unwrap();
        let b = bmatch_trace(&m1.arrivals, seed);
        if m1 != m2 || b != bmatch_trace(&m2.arrivals, seed) {
            fails.push(format!("bmatch run for seed {seed} differs between runs"));
        }
        let bseq = SequenceFile::BMatching {
            promised: 2,
            factor: 2,
            arrivals: m1.arrivals.clone(),
        }
        .to_text();
        for (kind, t) in [("sequence", &text), ("sequence", &bseq)] {
            match SequenceFile::parse(t) {
                Ok(s) if &s.to_text() == t => {}
                _ => fails.push(format!("{kind} round trip failed for seed {seed}")),
            }
        }
        for t in [&a, &b] {
            match TraceFile::parse(t) {
                Ok(tr) if &tr.to_text() == t => {}
                _ => fails.push(format!("trace round trip failed for seed {seed}")),
            }
        }
        for w in [
            Witness::Orientation(f1.heads.clone()),
            Witness::Assignment(m1.assignment.clone()),
        ] {
            let t = witness_to_text(&w);
            if parse_witness(&t).ok().map(|p| witness_to_text(&p)) != Some(t) {
                fails.push(format!("witness round trip failed for seed {seed}"));
            }
        }
        checked += 1;
    }
    fails.finish(format!(
        "{checked} seeds: generators and traces reproducible; sequences, traces and witnesses round-trip byte for byte"
    ))
}

fn report(number: u32, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        outcome(false, format!("panicked: {msg}"))
    });
    let tag = if result.pass { "PASS" } else { "FAIL" };
    println!(
        "{tag} criterion {number:>2}: {} [{:.1?}]",
        result.detail,
        start.elapsed()
    );
    result.pass
}

fn main() {
    let mut forests = run_forests();
    let adversary = adversary_traces();
    let mut matchings = None;
    let results = [
        report(1, || criterion_1(&mut forests, &adversary)),
        report(2, || criterion_2(&mut forests, &adversary)),
        report(3, || criterion_3(&mut forests)),
        report(4, criterion_4),
        report(5, criterion_5),
        report(6, criterion_6),
        report(7, criterion_7),
        report(8, criterion_8),
        report(9, || {
            criterion_9(matchings.get_or_insert_with(run_matchings))
        }),
        report(10, || match matchings.as_mut() {
            Some(m) => criterion_10(m),
            None => outcome(false, "matching runs did not complete"),
        }),
        report(11, criterion_11),
        report(12, criterion_12),
        report(13, criterion_13),
    ];
    let failed = results.iter().filter(|p| !**p).count();
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
