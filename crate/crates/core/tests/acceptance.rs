//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Ground truth comes from independent computations: the dense Prim oracle
//! for tree weights, and direct evaluations (angles, products, distances)
//! written out here rather than borrowed from the crate.

use std::collections::BTreeSet;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use l1mst::cones::{
    for_each_base_cone, validate_coverage, validate_proximity, yao_angle_threshold, Cone, ConeFamily, FamilyKind,
    PROXIMITY_TOLERANCE,
};
use l1mst::dominance::{Backend, DominanceIndex, TransformedPoint};
use l1mst::geometry::{distance_key_identity_check, SignVector};
use l1mst::io::{random_integer_points, write_points, Instance};
use l1mst::mst::prim_dense_oracle;
use l1mst::pipeline::solve_with_family;
use l1mst::sweep::SweepOptions;

// Criterion 1
const ORACLE_INSTANCES: usize = 201;
const ORACLE_DIMS: [usize; 3] = [2, 3, 4];
const ORACLE_MAX_N: usize = 64;
const ORACLE_RANGE: i64 = 1000;
const ORACLE_BUDGET_SECS: f64 = 30.0;
/// Tree weights must match the oracle exactly.
const WEIGHT_TOLERANCE: f64 = 0.0;
// Criterion 2
const FAMILY_INSTANCES: usize = 100;
// Criterion 3
const FUZZ_SEQUENCES: usize = 1000;
// Criterion 5
const IDENTITY_TOLERANCE: f64 = 1e-9;
const DEGREE_TOLERANCE: f64 = 5e-5;
const THRESHOLD_DEG_2: f64 = 10.1821;
const THRESHOLD_DEG_3: f64 = 5.5218;
const CONES_PER_QUADRANT_2: usize = 16;
// Criterion 6
const PROXIMITY_TRIALS: usize = 10_000;
/// At d = 4 every positive-orthant cone gets this many trials and a random
/// sample of cones gets the full count.
const PROXIMITY_TRIALS_D4_ALL: usize = 1000;
const PROXIMITY_SAMPLE_D4: usize = 2048;
// Criterion 7
const COVERAGE_DIRECTIONS: usize = 100_000;
// Criterion 8
const LEMMA_TUPLES: usize = 100_000;
// Criterion 9
const SCALING_SIZES: [usize; 4] = [1 << 14, 1 << 15, 1 << 16, 1 << 17];
const SCALING_REPS: usize = 3;
const SCALING_RANGE: i64 = 1_000_000;
const MAX_DOUBLING_RATIO: f64 = 2.6;
const MAX_SECS_LARGEST: f64 = 60.0;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome {
            passed,
            detail: detail.into(),
        }
    }
}

/// Candidate-graph sizes recorded by criteria 1 and 2 for criterion 4.
#[derive(Default)]
struct Shared {
    families: Vec<ConeFamily>,
    oracle_instances: Vec<(Instance, f64)>,
    edge_checks: Vec<(usize, u128)>,
}

impl Shared {
    fn family(&mut self, d: usize) -> &ConeFamily {
        if let Some(i) = self.families.iter().position(|f| f.dim() == d && f.kind() == FamilyKind::Yao) {
            return &self.families[i];
        }
        self.families.push(ConeFamily::build(d).unwrap());
        self.families.last().unwrap()
    }
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

fn unique_instance(rng: &mut ChaCha8Rng, n: usize, d: usize, range: i64) -> Instance {
    Instance::from_rows(d, &random_integer_points(rng, n, d, range)).unwrap()
}

fn oracle_exactness(shared: &mut Shared) -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0AC1_0001);
    let mut mismatches = Vec::new();
    let mut per_dim = [0usize; 3];
    for t in 0..ORACLE_INSTANCES {
        let d = ORACLE_DIMS[t % ORACLE_DIMS.len()];
        let n = rng.gen_range(2..=ORACLE_MAX_N);
        let inst = unique_instance(&mut rng, n, d, ORACLE_RANGE);
        let family = shared.family(d);
        let bound = family.total_cones() as u128 * inst.points.len() as u128;
        let expected = prim_dense_oracle(&inst.points).total_weight;
        match solve_with_family(&inst.points, family, &SweepOptions::default()) {
            Ok(s) => {
                shared.edge_checks.push((s.candidate_edges, bound));
                if (s.mst.total_weight - expected).abs() > WEIGHT_TOLERANCE {
                    mismatches.push(format!("#{t} d={d}: {} vs {expected}", s.mst.total_weight));
                }
            }
            Err(e) => mismatches.push(format!("#{t} d={d}: {e}")),
        }
        per_dim[t % ORACLE_DIMS.len()] += 1;
        shared.oracle_instances.push((inst, expected));
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = mismatches.is_empty() && secs < ORACLE_BUDGET_SECS;
    Outcome::new(
        ok,
        format!(
            "{}/{} instances equal the oracle (d=2,3,4: {:?}) in {secs:.1} s (budget {ORACLE_BUDGET_SECS} s){}",
            ORACLE_INSTANCES - mismatches.len(),
            ORACLE_INSTANCES,
            per_dim,
            if mismatches.is_empty() { String::new() } else { format!("; first mismatch {}", mismatches[0]) }
        ),
    )
}

fn cross_family(shared: &mut Shared) -> Outcome {
    let yao = ConeFamily::build(2).unwrap();
    let octant = ConeFamily::octant_2d();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0AC1_0002);
    let mut bad = 0;
    for _ in 0..FAMILY_INSTANCES {
        let n = rng.gen_range(2..=ORACLE_MAX_N);
        let inst = unique_instance(&mut rng, n, 2, ORACLE_RANGE);
        let expected = prim_dense_oracle(&inst.points).total_weight;
        let mut totals = Vec::new();
        for family in [&yao, &octant] {
            let s = solve_with_family(&inst.points, family, &SweepOptions::default()).unwrap();
            shared
                .edge_checks
                .push((s.candidate_edges, family.total_cones() as u128 * inst.points.len() as u128));
            totals.push(s.mst.total_weight);
        }
        if (totals[0] - totals[1]).abs() > WEIGHT_TOLERANCE || (totals[0] - expected).abs() > WEIGHT_TOLERANCE {
            bad += 1;
        }
    }
    Outcome::new(
        bad == 0,
        format!(
            "yao (k={}) and octant2d (k={}) agree on {}/{FAMILY_INSTANCES} instances",
            yao.cones_per_orthant(),
            octant.cones_per_orthant(),
            FAMILY_INSTANCES - bad
        ),
    )
}

fn backend_equivalence(shared: &mut Shared) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0AC1_0003);
    let mut differing_sequences = 0;
    let mut queries = 0usize;
    for _ in 0..FUZZ_SEQUENCES {
        let d = rng.gen_range(1..=4);
        let n = rng.gen_range(0..=150);
        let span = rng.gen_range(1..=20);
        let records: Vec<TransformedPoint> = (0..n)
            .map(|i| TransformedPoint {
                tcoords: (0..d).map(|_| f64::from(rng.gen_range(-span..=span))).collect(),
                point_index: i,
                key: 0.0,
                rank: i,
            })
            .collect();
        let mut tree = DominanceIndex::build(d, &records, Backend::Tree);
        let mut reference = DominanceIndex::build(d, &records, Backend::Reference);
        let mut differs = false;
        for _ in 0..rng.gen_range(1..=60) {
            queries += 1;
            let q: Vec<f64> = (0..d).map(|_| f64::from(rng.gen_range(-span - 2..=span + 2))).collect();
            let eps = if rng.gen_bool(0.5) { 0.0 } else { 0.5 };
            let exclude = (n > 0 && rng.gen_bool(0.5)).then(|| rng.gen_range(0..n));
            let a: BTreeSet<usize> = tree.extract_dominating(&q, eps, exclude).iter().map(|p| p.point_index).collect();
            let b: BTreeSet<usize> =
                reference.extract_dominating(&q, eps, exclude).iter().map(|p| p.point_index).collect();
            differs |= a != b || tree.live_count() != reference.live_count();
        }
        differing_sequences += usize::from(differs);
    }

    let mut total_mismatch = 0;
    for d in ORACLE_DIMS {
        let family = shared.family(d).clone();
        for (inst, _) in shared.oracle_instances.iter().filter(|(i, _)| i.dim() == d) {
            let run = |backend| {
                let opts = SweepOptions { backend, ..SweepOptions::default() };
                solve_with_family(&inst.points, &family, &opts).map(|s| s.mst.total_weight)
            };
            if run(Backend::Tree).ok() != run(Backend::Reference).ok() {
                total_mismatch += 1;
            }
        }
    }
    let instances = shared.oracle_instances.len();
    Outcome::new(
        differing_sequences == 0 && total_mismatch == 0 && instances == ORACLE_INSTANCES,
        format!(
            "{}/{FUZZ_SEQUENCES} fuzzed sequences ({queries} queries) identical; {}/{instances} criterion-1 totals identical",
            FUZZ_SEQUENCES - differing_sequences,
            instances - total_mismatch
        ),
    )
}

fn edge_bound(shared: &mut Shared) -> Outcome {
    let expected = ORACLE_INSTANCES + 2 * FAMILY_INSTANCES;
    let violations = shared.edge_checks.iter().filter(|(m, bound)| *m as u128 > *bound).count();
    let worst = shared
        .edge_checks
        .iter()
        .map(|(m, bound)| *m as f64 / *bound as f64)
        .fold(0.0, f64::max);
    Outcome::new(
        violations == 0 && shared.edge_checks.len() == expected,
        format!(
            "{violations} violations over {} graphs (expected {expected}); largest m / (2^d k n) = {worst:.4}",
            shared.edge_checks.len()
        ),
    )
}

/// Angle between two vectors, stable for nearly parallel inputs.
fn angle(a: &[f64], b: &[f64]) -> f64 {
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (mut diff, mut sum) = (0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        diff += (x / na - y / nb).powi(2);
        sum += (x / na + y / nb).powi(2);
    }
    2.0 * f64::atan2(diff.sqrt(), sum.sqrt())
}

/// Largest pairwise generator angle and largest `|A E - I|` entry.
fn cone_metrics(d: usize, gens: &[f64], matrix: &[f64]) -> (f64, f64) {
    let g = |j: usize| &gens[j * d..(j + 1) * d];
    let mut worst_angle = 0.0_f64;
    for i in 0..d {
        for j in i + 1..d {
            worst_angle = worst_angle.max(angle(g(i), g(j)));
        }
    }
    let mut residual = 0.0_f64;
    for r in 0..d {
        for j in 0..d {
            let v: f64 = (0..d).map(|k| matrix[r * d + k] * gens[j * d + k]).sum();
            residual = residual.max((v - if r == j { 1.0 } else { 0.0 }).abs());
        }
    }
    (worst_angle, residual)
}

/// Like [`cone_metrics`], but locates the widest pair by dot product and
/// evaluates one angle; used for the 1.2e8 cones at d = 5.
fn cone_metrics_fast(d: usize, gens: &[f64], matrix: &[f64]) -> (f64, f64) {
    let g = |j: usize| &gens[j * d..(j + 1) * d];
    let mut best = (f64::INFINITY, 0, 1);
    for i in 0..d {
        for j in i + 1..d {
            let c: f64 = g(i).iter().zip(g(j)).map(|(x, y)| x * y).sum();
            if c < best.0 {
                best = (c, i, j);
            }
        }
    }
    let mut residual = 0.0_f64;
    for r in 0..d {
        for j in 0..d {
            let v: f64 = (0..d).map(|k| matrix[r * d + k] * gens[j * d + k]).sum();
            residual = residual.max((v - if r == j { 1.0 } else { 0.0 }).abs());
        }
    }
    (angle(g(best.1), g(best.2)), residual)
}

fn cone_construction(shared: &mut Shared) -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    let deg2 = yao_angle_threshold(2).to_degrees();
    let deg3 = yao_angle_threshold(3).to_degrees();
    let thresholds_ok = (deg2 - THRESHOLD_DEG_2).abs() < DEGREE_TOLERANCE && (deg3 - THRESHOLD_DEG_3).abs() < DEGREE_TOLERANCE;
    ok &= thresholds_ok;
    notes.push(format!("thresholds {deg2:.4} deg, {deg3:.4} deg"));
    for d in 1..=4 {
        let family = shared.family(d);
        let threshold = yao_angle_threshold(d);
        let (mut widest, mut residual, mut count) = (0.0_f64, 0.0_f64, 0usize);
        for cone in family.cones() {
            let (a, r) = cone_metrics(d, &cone.generators, &cone.matrix);
            widest = widest.max(a);
            residual = residual.max(r);
            count += 1;
        }
        ok &= count == family.total_cones() && (d == 1 || widest < threshold) && residual <= IDENTITY_TOLERANCE;
        if d == 2 {
            ok &= family.cones_per_orthant() == CONES_PER_QUADRANT_2;
        }
        notes.push(format!(
            "d={d}: k={} widest {:.6}/{:.6} deg, |AE-I| {residual:.1e}",
            family.cones_per_orthant(),
            widest.to_degrees(),
            threshold.to_degrees()
        ));
    }
    // d = 5 is streamed; other orthants are exact sign flips of this one,
    // which preserve both angles and A E.
    let threshold = yao_angle_threshold(5);
    let (mut widest, mut residual, mut count) = (0.0_f64, 0.0_f64, 0u64);
    for_each_base_cone(5, FamilyKind::Yao, |gens, matrix| {
        let (a, r) = cone_metrics_fast(5, gens, matrix);
        widest = widest.max(a);
        residual = residual.max(r);
        count += 1;
    });
    ok &= widest < threshold && residual <= IDENTITY_TOLERANCE;
    notes.push(format!(
        "d=5 (streamed): k={count} widest {:.6}/{:.6} deg, |AE-I| {residual:.1e}",
        widest.to_degrees(),
        threshold.to_degrees()
    ));
    Outcome::new(ok, notes.join("; "))
}

fn proximity(shared: &mut Shared) -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    let mut seed = 0x0AC1_0006u64;
    let mut check = |cone: &Cone, trials: usize, worst: &mut f64, failures: &mut usize| {
        seed += 1;
        let r = validate_proximity(cone, trials, seed);
        *worst = worst.min(r.worst_margin);
        if !(r.passed && r.worst_margin >= -PROXIMITY_TOLERANCE) {
            *failures += 1;
        }
    };
    let mut families: Vec<ConeFamily> = (1..=3).map(|d| shared.family(d).clone()).collect();
    families.push(ConeFamily::octant_2d());
    for family in &families {
        let (mut worst, mut failures, mut count) = (f64::INFINITY, 0, 0);
        for cone in family.cones() {
            check(&cone, PROXIMITY_TRIALS, &mut worst, &mut failures);
            count += 1;
        }
        ok &= failures == 0;
        notes.push(format!(
            "{} d={}: {count} cones x {PROXIMITY_TRIALS}, {failures} failed, worst margin {worst:.2e}",
            family.kind().name(),
            family.dim()
        ));
    }

    let family = shared.family(4).clone();
    let (mut worst, mut failures) = (f64::INFINITY, 0);
    for ordinal in 0..family.cones_per_orthant() {
        check(&family.cone(SignVector::positive(4), ordinal), PROXIMITY_TRIALS_D4_ALL, &mut worst, &mut failures);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x0AC1_0066);
    for _ in 0..PROXIMITY_SAMPLE_D4 {
        let alpha = SignVector::from_mask(4, rng.gen_range(0..16));
        let ordinal = rng.gen_range(0..family.cones_per_orthant());
        check(&family.cone(alpha, ordinal), PROXIMITY_TRIALS, &mut worst, &mut failures);
    }
    ok &= failures == 0;
    notes.push(format!(
        "yao d=4: all {} positive-orthant cones x {PROXIMITY_TRIALS_D4_ALL} and {PROXIMITY_SAMPLE_D4} sampled cones x {PROXIMITY_TRIALS}, {failures} failed, worst margin {worst:.2e}",
        family.cones_per_orthant()
    ));

    let quadrant = Cone::from_generators(SignVector::positive(2), 0, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    let r = validate_proximity(&quadrant, PROXIMITY_TRIALS, 7);
    ok &= !r.passed;
    notes.push(format!(
        "full quadrant {} (worst margin {:.3})",
        if r.passed { "wrongly passes" } else { "fails as required" },
        r.worst_margin
    ));
    Outcome::new(ok, notes.join("; "))
}

fn coverage(shared: &mut Shared) -> Outcome {
    let mut families: Vec<ConeFamily> = (1..=4).map(|d| shared.family(d).clone()).collect();
    families.push(ConeFamily::octant_2d());
    let mut ok = true;
    let mut notes = Vec::new();
    for (i, family) in families.iter().enumerate() {
        let r = validate_coverage(family, COVERAGE_DIRECTIONS, 0x0AC1_0007 + i as u64);
        ok &= r.passed() && r.trials == COVERAGE_DIRECTIONS;
        notes.push(format!("{} d={}: {} uncovered", family.kind().name(), family.dim(), r.uncovered));
    }
    Outcome::new(ok, format!("{COVERAGE_DIRECTIONS} directions per family; {}", notes.join(", ")))
}

fn lemma_property(_: &mut Shared) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0AC1_0008);
    let (mut order_violations, mut identity_violations) = (0, 0);
    for _ in 0..LEMMA_TUPLES {
        let d = rng.gen_range(1..=6);
        let alpha = SignVector::from_mask(d, rng.gen_range(0..1u32 << d));
        let s: Vec<f64> = (0..d).map(|_| f64::from(rng.gen_range(-1000..=1000))).collect();
        let offset_point = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            s.iter()
                .enumerate()
                .map(|(k, &c)| c + alpha.sign(k) * f64::from(rng.gen_range(0..=1000)))
                .collect()
        };
        let mut x = offset_point(&mut rng);
        let mut y = offset_point(&mut rng);
        let key = |p: &[f64]| -> f64 { (0..d).map(|k| alpha.sign(k) * p[k]).sum() };
        if key(&x) > key(&y) {
            std::mem::swap(&mut x, &mut y);
        }
        if l1(&y, &s) < l1(&x, &s) {
            order_violations += 1;
        }
        // x and y lie in the backward orthant of -alpha at s.
        for p in [&x, &y] {
            if distance_key_identity_check(&s, p, alpha.negate()).ok() != Some(true) || l1(&s, p) != key(p) - key(&s) {
                identity_violations += 1;
            }
        }
    }
    Outcome::new(
        order_violations == 0 && identity_violations == 0,
        format!(
            "{LEMMA_TUPLES} tuples (d=1..6): {order_violations} order violations, {identity_violations} inexact identities"
        ),
    )
}

fn scaling(_: &mut Shared) -> Outcome {
    let family = ConeFamily::build(2).unwrap();
    let mut medians = Vec::new();
    for &n in &SCALING_SIZES {
        let mut rng = ChaCha8Rng::seed_from_u64(0x0AC1_0009 ^ n as u64);
        let inst = unique_instance(&mut rng, n, 2, SCALING_RANGE);
        let mut times: Vec<f64> = (0..SCALING_REPS)
            .map(|_| {
                let start = Instant::now();
                solve_with_family(&inst.points, &family, &SweepOptions::default()).unwrap();
                start.elapsed().as_secs_f64()
            })
            .collect();
        times.sort_by(f64::total_cmp);
        medians.push(times[times.len() / 2]);
    }
    let ratios: Vec<f64> = medians.windows(2).map(|w| w[1] / w[0]).collect();
    let largest = *medians.last().unwrap();
    let ok = ratios.iter().all(|&r| r <= MAX_DOUBLING_RATIO) && largest < MAX_SECS_LARGEST;
    Outcome::new(
        ok,
        format!(
            "medians {:?} s for n=2^14..2^17; doubling ratios {:?} (limit {MAX_DOUBLING_RATIO}); 2^17 in {largest:.2} s (limit {MAX_SECS_LARGEST} s)",
            medians.iter().map(|t| (t * 1000.0).round() / 1000.0).collect::<Vec<_>>(),
            ratios.iter().map(|r| (r * 100.0).round() / 100.0).collect::<Vec<_>>()
        ),
    )
}

fn determinism(_: &mut Shared) -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0AC1_0010);
    let mut notes = Vec::new();
    let mut ok = true;
    for (d, n) in [(2usize, 20_000usize), (3, 400)] {
        let mut rows = random_integer_points(&mut rng, n, d, 500);
        // a few exact repeats exercise the duplicate path
        for i in 0..10 {
            rows.push(rows[i * 7].clone());
        }
        let path = dir.path().join(format!("points{d}.txt"));
        let mut f = std::fs::File::create(&path).unwrap();
        write_points(rows.iter().map(|r| r.as_slice()), &mut f).unwrap();
        f.flush().unwrap();
        let run = |threads: &str| {
            let out = Command::new(env!("CARGO_BIN_EXE_l1mst"))
                .args(["mst", "--input"])
                .arg(&path)
                .args(["--threads", threads])
                .output()
                .unwrap();
            assert!(out.status.success(), "mst exited with {}", out.status);
            out.stdout
        };
        let first = run("1");
        let outputs = [run("1"), run("4"), run("3")];
        let same = outputs.iter().all(|o| *o == first);
        ok &= same && !first.is_empty();
        notes.push(format!(
            "d={d} n={}: {} bytes, threads 1/1/4/3 {}",
            rows.len(),
            first.len(),
            if same { "identical" } else { "differ" }
        ));
    }
    Outcome::new(ok, notes.join("; "))
}

fn main() {
    type Check = fn(&mut Shared) -> Outcome;
    let criteria: [(&str, Check); 10] = [
        ("oracle exactness", oracle_exactness),
        ("cross-family agreement", cross_family),
        ("backend equivalence", backend_equivalence),
        ("edge bound", edge_bound),
        ("cone construction", cone_construction),
        ("proximity", proximity),
        ("coverage", coverage),
        ("distance-key lemma", lemma_property),
        ("scaling", scaling),
        ("determinism", determinism),
    ];
    let mut shared = Shared::default();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| check(&mut shared))).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Outcome::new(false, format!("panicked: {msg}"))
        });
        failed += usize::from(!outcome.passed);
        println!(
            "{} criterion {:>2} {name}: {} [{:.1} s]",
            if outcome.passed { "PASS" } else { "FAIL" },
            i + 1,
            outcome.detail,
            start.elapsed().as_secs_f64()
        );
        std::io::stdout().flush().unwrap();
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
