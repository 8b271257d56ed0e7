//! Acceptance run. Every criterion executes at its full size and prints one
//! PASS/FAIL line. Numeric arguments select criteria (`cargo test --test
//! acceptance -- 1 4`).
//!
//! Two criteria cannot pass under conditioning on containment in `K_1` and
//! are listed in `UNATTAINABLE`; they still run and print FAIL. The process
//! fails on any other FAIL.

mod common;

use std::cell::OnceCell;
use std::f64::consts::PI;
use std::fs;
use std::process::Command;
use std::time::Instant;

use circumpoly::asymptotics::{ball_max_test, exponent_fit, fit_log_law, predicted_constants, LawShape};
use circumpoly::bodies::Body;
use circumpoly::estimators::{
    check_efron, check_eq14, check_t1_bound, estimate_mq, estimate_width_gap, primal_sweep, Estimate,
    ExperimentConfig, SweepRow,
};
use circumpoly::sampling::RngStream;

/// Criteria whose target is out of reach; see the README.
const UNATTAINABLE: &[u32] = &[3, 9];

const SEED: u64 = 20_240_611;

struct Verdict {
    pass: bool,
    lines: Vec<String>,
}

impl Verdict {
    fn new() -> Self {
        Self {
            pass: true,
            lines: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.pass &= ok;
        self.lines.push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
    }

    fn note(&mut self, line: String) {
        self.lines.push(format!("     {line}"));
    }
}

fn fmt(e: &Estimate) -> String {
    format!("{:.6} ± {:.2e} ({} accepted, {} rejected)", e.mean, e.stderr, e.count, e.rejected)
}

fn triangle() -> Body {
    Body::regular_polygon(3, 1.0).unwrap()
}

fn tetrahedron() -> Body {
    Body::regular_simplex(3).unwrap()
}

fn moments() -> Verdict {
    let mut v = Verdict::new();
    let cases = [
        (2, 1, 1.0 / 3.0),
        (3, 1, 1.0 / 12.0),
        (4, 1, 13.0 / 720.0 - PI * PI / 15015.0),
        (2, 2, 1.0 / 6.0),
        (3, 2, 1.0 / 72.0),
    ];
    for (k, &(d, q, exact)) in cases.iter().enumerate() {
        let start = Instant::now();
        let e = estimate_mq(d, q, 2_000_000, &mut RngStream::new(SEED, k as u64));
        let secs = start.elapsed().as_secs_f64();
        let z = (e.mean - exact).abs() / e.stderr;
        let rel = (e.mean - exact).abs() / exact;
        v.check(
            z <= 4.0 && rel <= 0.005 && secs <= 60.0,
            format!("M_{q}, d={d}: {:.7} vs {exact:.7}, {z:.2} stderr, {:.3}% rel, {secs:.1}s", e.mean, rel * 100.0),
        );
    }
    v
}

fn eq14() -> Verdict {
    let mut v = Verdict::new();
    let start = Instant::now();
    for (name, body) in [("triangle", triangle()), ("disk", Body::unit_ball(2))] {
        let rows = check_eq14(&ExperimentConfig::new(body, vec![50, 200], 10_000, SEED)).unwrap();
        for r in rows {
            v.check(
                r.pass,
                format!(
                    "{name} n={}: gap {:.6} vs 2·μ* {:.6}, |diff| {:.2e} = {:.2} combined stderr (paired stderr {:.1e}, {} mismatched)",
                    r.n,
                    r.width_gap.mean,
                    2.0 * r.complement.mean,
                    r.difference.abs(),
                    r.difference.abs() / r.combined_stderr,
                    r.paired_stderr,
                    r.mismatched
                ),
            );
        }
    }
    let secs = start.elapsed().as_secs_f64();
    v.check(secs <= 600.0, format!("runtime {secs:.0}s"));
    v
}

fn efron() -> Verdict {
    let mut v = Verdict::new();
    for (name, body) in [("triangle", triangle()), ("tetrahedron", tetrahedron())] {
        let rows = check_efron(&ExperimentConfig::new(body, vec![50, 200], 10_000, SEED)).unwrap();
        for r in rows {
            v.check(
                r.pass,
                format!(
                    "{name} n={}: f = {:.4} ± {:.3} vs n·μ* = {:.4} ± {:.3}, {:.2} combined stderr",
                    r.n,
                    r.facets.mean,
                    r.facets.stderr,
                    r.scaled_complement.mean,
                    r.scaled_complement.stderr,
                    r.difference.abs() / r.combined_stderr
                ),
            );
            v.note(format!(
                "acceptance {}/{} at n, {}/{} at n−1; unconditioned identity residual {:.4} ± {:.4} ({})",
                r.facets.count,
                r.facets.trials(),
                r.scaled_complement.count,
                r.scaled_complement.trials(),
                r.identity_residual.mean,
                r.identity_residual.stderr,
                if r.identity_pass { "holds" } else { "violated" }
            ));
        }
    }
    v
}

fn t1_bound() -> Verdict {
    let mut v = Verdict::new();
    let r = check_t1_bound(&ExperimentConfig::new(triangle(), vec![100], 1000, SEED)).unwrap();
    v.check(
        r.pass && r.accepted == 1000,
        format!(
            "triangle n=100: {}/{} accepted trials satisfy T_1* ≤ μ* + 3·stderr (worst margin {:.1} stderr)",
            r.satisfied, r.accepted, r.worst_margin
        ),
    );
    v.note(format!(
        "E T_1* = {:.5}, E μ* = {:.5}, {} trials run",
        r.t1.mean, r.complement.mean, r.trials_run
    ));
    v
}

struct Sweeps {
    triangle: Vec<SweepRow>,
    tetrahedron: Vec<SweepRow>,
    seconds: f64,
}

fn sweeps() -> Sweeps {
    let start = Instant::now();
    let triangle = primal_sweep(&ExperimentConfig::new(
        triangle(),
        vec![1000, 3000, 10_000, 30_000, 100_000],
        10_000,
        SEED,
    ))
    .unwrap();
    let tetrahedron = primal_sweep(&ExperimentConfig::new(
        tetrahedron(),
        vec![100, 300, 1000, 3000, 10_000],
        3000,
        SEED,
    ))
    .unwrap();
    Sweeps {
        triangle,
        tetrahedron,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn series(rows: &[SweepRow], f: fn(&SweepRow) -> Estimate) -> Vec<(usize, Estimate)> {
    rows.iter().map(|r| (r.n, f(r))).collect()
}

fn width_constant(s: &Sweeps) -> Verdict {
    let mut v = Verdict::new();
    for (name, rows, d, target, band) in [
        ("triangle", &s.triangle, 2, 4.0, 0.30),
        ("tetrahedron", &s.tetrahedron, 3, 1.5, 0.40),
    ] {
        for r in rows.iter() {
            v.note(format!("{name} n={}: gap {}", r.n, fmt(&r.width_gap)));
        }
        let fit = fit_log_law(&series(rows, |r| r.width_gap), d, LawShape::Gap).unwrap();
        let ratio = fit.coefficient / target;
        v.check(
            (ratio - 1.0).abs() <= band,
            format!(
                "{name}: coefficient {:.3} ± {:.3} vs {target}, ratio {ratio:.3} (band ±{:.0}%)",
                fit.coefficient,
                fit.coefficient_stderr,
                band * 100.0
            ),
        );
    }
    v.check(s.seconds <= 3600.0, format!("runtime {:.0}s", s.seconds));
    v
}

fn face_laws(s: &Sweeps) -> Verdict {
    let mut v = Verdict::new();
    let tri = triangle();
    let poly = tri.polytope_ref().unwrap();
    let exact = predicted_constants(poly, 1.0 / 3.0).unwrap();
    let m1 = estimate_mq(2, 1, 2_000_000, &mut RngStream::new(SEED, 99));
    let simulated = predicted_constants(poly, m1.mean).unwrap();
    let fv = fit_log_law(&series(&s.triangle, |r| r.vertices), 2, LawShape::Count).unwrap();
    let ff = fit_log_law(&series(&s.triangle, |r| r.facets), 2, LawShape::Count).unwrap();
    let within = |a: f64, c: f64| (a / c - 1.0).abs() <= 0.25;
    v.check(
        within(fv.coefficient, exact.vertices),
        format!("f_0 slope {:.3} vs {:.3}", fv.coefficient, exact.vertices),
    );
    v.check(
        within(ff.coefficient, exact.facets),
        format!("f_1 slope {:.3} vs {:.3}", ff.coefficient, exact.facets),
    );
    v.check(
        within(fv.coefficient, simulated.vertices) == within(fv.coefficient, exact.vertices),
        format!(
            "f_0 constant from simulated M_1 = {:.6}: {:.4}, same verdict",
            m1.mean, simulated.vertices
        ),
    );
    v
}

fn order_brackets(s: &Sweeps) -> Verdict {
    let mut v = Verdict::new();
    let disk = primal_sweep(&ExperimentConfig::new(
        Body::unit_ball(2),
        vec![32, 64, 128, 256, 512, 1024, 2048, 4096],
        10_000,
        SEED,
    ))
    .unwrap();
    let pick = |rows: &[SweepRow], lo: usize, hi: usize, f: fn(&SweepRow) -> Estimate| {
        rows.iter()
            .filter(|r| r.n >= lo && r.n <= hi)
            .map(|r| (r.n, f(r)))
            .collect::<Vec<_>>()
    };
    let mut slope = |label: &str, pts: Vec<(usize, Estimate)>, lo: f64, hi: f64| {
        let s = exponent_fit(&pts).unwrap();
        v.check(s >= lo && s <= hi, format!("{label}: slope {s:.3} in [{lo}, {hi}]"));
    };
    slope("disk width gap, n 64..4096", pick(&disk, 64, 4096, |r| r.width_gap), -0.80, -0.55);
    slope("triangle width gap, n 10^3..10^5", pick(&s.triangle, 0, usize::MAX, |r| r.width_gap), -1.05, -0.75);
    slope("disk volume gap, n 32..1024", pick(&disk, 32, 1024, |r| r.volume_gap), -1.05, -0.45);
    slope("triangle volume gap, n 10^3..10^5", pick(&s.triangle, 0, usize::MAX, |r| r.volume_gap), -1.05, -0.45);
    v
}

fn ball_max() -> Verdict {
    let mut v = Verdict::new();
    // Equal mean width 2 for every body.
    let bodies = vec![
        ("disk".to_string(), Body::unit_ball(2)),
        ("square".to_string(), Body::cube(2, PI / 4.0).unwrap()),
        ("triangle".to_string(), Body::regular_polygon(3, 2.0 * PI / 3.0 / 3f64.sqrt()).unwrap()),
    ];
    for (name, b) in &bodies {
        assert!((b.mean_width().0 - 2.0).abs() < 1e-12, "{name}");
    }
    let r = ball_max_test(&bodies, 20, 100_000, SEED, None).unwrap();
    for e in &r.entries {
        v.note(format!("{}: E W(K^(n))/W(K) = {}", e.label, fmt(&e.ratio)));
    }
    for c in &r.comparisons {
        v.check(
            c.strictly_larger,
            format!(
                "disk − {} = {:.5}, {:.1} combined stderr",
                c.label,
                c.difference,
                c.difference / c.combined_stderr
            ),
        );
    }
    v
}

/// `W(⋂ H_i^-)` over a midpoint grid in `(θ_i, t_i) ∈ ([0,2π) × [0,1])³`
/// for the unit disk, restricted to bounded triangles inside `2B^2`.
/// Returns (accepted nodes, bounded nodes, total nodes, Σ gap over accepted,
/// least farthest-vertex norm over bounded nodes).
fn disk_triangle_grid(m: usize) -> (u64, u64, u64, f64, f64) {
    let theta: Vec<(f64, f64)> = (0..m)
        .map(|j| {
            let a = 2.0 * PI * (j as f64 + 0.5) / m as f64;
            (a.cos(), a.sin())
        })
        .collect();
    let t: Vec<f64> = (0..m).map(|j| (j as f64 + 0.5) / m as f64).collect();
    let (mut accepted, mut bounded, mut total) = (0u64, 0u64, 0u64);
    let mut gap_sum = 0.0;
    let mut least_far = f64::INFINITY;
    let meet = |(a, b): (f64, f64), c1: f64, (p, q): (f64, f64), c2: f64| {
        let det = a * q - b * p;
        ((c1 * q - b * c2) / det, (a * c2 - c1 * p) / det)
    };
    for i1 in 0..m {
        for i2 in 0..m {
            for i3 in 0..m {
                let (u1, u2, u3) = (theta[i1], theta[i2], theta[i3]);
                // Bounded iff the origin is strictly inside the triangle of normals.
                let cross = |a: (f64, f64), b: (f64, f64)| a.0 * b.1 - a.1 * b.0;
                let (c12, c23, c31) = (cross(u1, u2), cross(u2, u3), cross(u3, u1));
                let is_bounded =
                    (c12 > 0.0 && c23 > 0.0 && c31 > 0.0) || (c12 < 0.0 && c23 < 0.0 && c31 < 0.0);
                for &s1 in &t {
                    for &s2 in &t {
                        for &s3 in &t {
                            total += 1;
                            if !is_bounded {
                                continue;
                            }
                            bounded += 1;
                            let (h1, h2, h3) = (1.0 + s1, 1.0 + s2, 1.0 + s3);
                            let a = meet(u1, h1, u2, h2);
                            let b = meet(u2, h2, u3, h3);
                            let c = meet(u3, h3, u1, h1);
                            let far = [a, b, c]
                                .iter()
                                .map(|p| p.0.hypot(p.1))
                                .fold(0.0, f64::max);
                            least_far = least_far.min(far);
                            if far <= 2.0 {
                                accepted += 1;
                                let per = (a.0 - b.0).hypot(a.1 - b.1)
                                    + (b.0 - c.0).hypot(b.1 - c.1)
                                    + (c.0 - a.0).hypot(c.1 - a.1);
                                gap_sum += per / PI - 2.0;
                            }
                        }
                    }
                }
            }
        }
    }
    (accepted, bounded, total, gap_sum, least_far)
}

fn small_n_oracle() -> Verdict {
    let mut v = Verdict::new();
    let (accepted, bounded, total, gap_sum, least_far) = disk_triangle_grid(20);
    let oracle = gap_sum / accepted as f64;
    let est = estimate_width_gap(&ExperimentConfig::new(Body::unit_ball(2), vec![3], 100_000, SEED)).unwrap()[0].1;
    let ok = accepted > 0 && est.count > 0 && ((est.mean - oracle) / oracle).abs() <= 0.01;
    v.check(
        ok,
        format!(
            "disk n=3: simulated {} vs grid oracle {oracle} ({accepted} of {total} nodes accepted)",
            fmt(&est)
        ),
    );
    v.note(format!(
        "{bounded} bounded nodes; least farthest-vertex norm {least_far:.4} > 2, so no triangle about the disk fits in K_1"
    ));
    v
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_circumpoly"))
}

fn determinism() -> Verdict {
    let mut v = Verdict::new();
    let dir = std::env::temp_dir().join(format!("circumpoly-acceptance-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let gap_csv = dir.join("gap-input.csv");
    let status = bin()
        .args(["gap", "--body", "triangle", "--n", "100,300,1000,3000,10000", "--trials", "200", "--seed", "3"])
        .arg("--out")
        .arg(&gap_csv)
        .status()
        .unwrap();
    assert!(status.success());
    let gap_in = gap_csv.to_str().unwrap().to_string();
    let commands: Vec<(&str, Vec<&str>)> = vec![
        ("gap width", vec!["gap", "--body", "disk", "--n", "64,128,256", "--trials", "300", "--seed", "7"]),
        ("gap volume", vec!["gap", "--body", "simplex", "--dim", "3", "--functional", "volume", "--n", "60,120", "--trials", "60"]),
        ("faces", vec!["faces", "--body", "triangle", "--n", "100,400", "--trials", "200"]),
        ("tq", vec!["tq", "--body", "triangle", "--n", "60", "--trials", "60", "--q", "1", "--budget", "500"]),
        ("moments", vec!["moments", "--dim", "3", "--q", "1", "--samples", "100000"]),
        ("check eq14", vec!["check", "--which", "eq14", "--body", "triangle", "--n", "60", "--trials", "200"]),
        ("check efron", vec!["check", "--which", "efron", "--body", "triangle", "--n", "40", "--trials", "200"]),
        ("ballmax", vec!["ballmax", "--bodies", "disk,square", "--n", "20", "--trials", "2000"]),
        ("fit", vec!["fit", "--in", &gap_in, "--law", "width", "--body", "triangle"]),
    ];
    for (label, args) in commands {
        let mut outputs = Vec::new();
        for (k, threads) in ["1", "4", "4"].iter().enumerate() {
            let out = dir.join(format!("{}-{k}.out", label.replace(' ', "-")));
            let status = bin().args(&args).args(["--threads", threads]).arg("--out").arg(&out).status().unwrap();
            outputs.push((status.code(), fs::read(&out).unwrap_or_default()));
        }
        let same = outputs.windows(2).all(|w| w[0] == w[1]) && !outputs[0].1.is_empty();
        v.check(
            same,
            format!("{label}: identical bytes at 1, 4, 4 threads ({} bytes)", outputs[0].1.len()),
        );
    }
    let _ = fs::remove_dir_all(&dir);
    v
}

fn kernel_suite() -> Verdict {
    let mut v = Verdict::new();
    let mut run = |label: &str, f: &dyn Fn(u64) -> Result<(), String>| {
        let failures: Vec<String> = (0..100u64).filter_map(|s| f(s).err().map(|e| format!("seed {s}: {e}"))).collect();
        v.check(
            failures.is_empty(),
            format!("{label}: {}/100 instances{}", 100 - failures.len(), failures.first().map(|f| format!(", first failure {f}")).unwrap_or_default()),
        );
    };
    let dim = |s: u64| 2 + (s % 3) as usize;
    run("hull idempotence (d 2..4)", &|s| common::hull_idempotence(&common::random_polytope(s, dim(s))));
    run("duality round trip (d 2..4)", &|s| common::duality_round_trip(&common::random_polytope(s, dim(s))));
    run("Euler relation (d 3)", &|s| common::euler_relation(&common::random_polytope(s, 3)));
    run("mean width vs quadrature (d 2..3)", &|s| {
        common::mean_width_matches_quadrature(&common::random_polytope(s, 2 + (s % 2) as usize), s, 20_000)
    });
    run("volume vs rejection (d 2..3)", &|s| {
        common::volume_matches_rejection(&common::random_polytope(s, 2 + (s % 2) as usize), s, 160_000)
    });
    v
}

fn main() {
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let want = |id: u32| selected.is_empty() || selected.contains(&id);
    let shared = OnceCell::new();

    let titles = [
        "simplex-volume moments",
        "width gap equals twice the dual complement mass",
        "facet count against the Efron-type identity",
        "T_1* below the complement mass per realization",
        "width-gap law constant",
        "face-count law constants",
        "exponent brackets of the width and volume gaps",
        "balls maximize the relative mean width",
        "disk n=3 against a tensor-grid oracle",
        "byte-identical outputs across thread counts",
        "geometry kernel suite",
    ];
    let mut unexpected = Vec::new();
    for id in 1..=11u32 {
        if !want(id) {
            continue;
        }
        let start = Instant::now();
        let verdict = match id {
            1 => moments(),
            2 => eq14(),
            3 => efron(),
            4 => t1_bound(),
            5 => width_constant(shared.get_or_init(sweeps)),
            6 => face_laws(shared.get_or_init(sweeps)),
            7 => order_brackets(shared.get_or_init(sweeps)),
            8 => ball_max(),
            9 => small_n_oracle(),
            10 => determinism(),
            _ => kernel_suite(),
        };
        let status = if verdict.pass { "PASS" } else { "FAIL" };
        let known = if !verdict.pass && UNATTAINABLE.contains(&id) { " (unattainable, see README)" } else { "" };
        println!(
            "criterion {id:>2}: {status}  {}{known}  [{:.1}s]",
            titles[id as usize - 1],
            start.elapsed().as_secs_f64()
        );
        for l in &verdict.lines {
            println!("    {l}");
        }
        if !verdict.pass && !UNATTAINABLE.contains(&id) {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
