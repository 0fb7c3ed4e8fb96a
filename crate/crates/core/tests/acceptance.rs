//! End-to-end acceptance checks A1-A8. Each check prints one `PASS`/`FAIL`
//! line on stderr (bypassing the test harness capture) before asserting.
//!
//! A3-A6 share one hedgehog sweep on a 49^3 grid; A8 repeats it.

use std::io::Write;
use std::path::Path;
use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ldg_core::config::SweepConfig;
use ldg_core::diagnostics::max_beta;
use ldg_core::energy::energy;
use ldg_core::field::{hedgehog_boundary, init_radial_ansatz};
use ldg_core::output::{csv_row, write_summary_csv, CSV_HEADER};
use ldg_core::sweep::{sweep, SweepOutcome, SweepRecord};
use ldg_core::tensor::Sym3;
use ldg_core::{
    biaxiality, check_maximum_principle, eigensystem, gradient, lambda_of_t, reduced_h, Grid, PotentialMode,
    QTensor, ReducedParams,
};

const A3_CONFIG: &str = "\
[grid]
n = 49
half_width = 1.0
[boundary]
kind = hedgehog
[reduced]
Ltilde = 1.0
t = 25, 100, 400
[init]
kind = radial
core_radius = 3
amplitude = 0.1
seeds = 0, 1, 2
[output]
dump_all = true
";

const A7_CONFIG: &str = "\
[grid]
n = 49
half_width = 1.0
[boundary]
kind = constant
director = 0, 0, 1
[reduced]
Ltilde = 1.0
t = 400
[init]
kind = radial
core_radius = 3
seeds = 0
";

fn report(id: &str, ok: bool, detail: &str) {
    let line = format!("acceptance {id}: {} {detail}\n", if ok { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
}

fn a3_outcome() -> &'static SweepOutcome {
    static OUT: OnceLock<SweepOutcome> = OnceLock::new();
    OUT.get_or_init(|| {
        let cfg: SweepConfig = A3_CONFIG.parse().unwrap();
        let clock = Instant::now();
        let out = sweep(&cfg).unwrap();
        report("A3-runtime", true, &format!("sweep took {:.1} s", clock.elapsed().as_secs_f64()));
        out
    })
}

fn best_records(out: &SweepOutcome) -> Vec<&SweepRecord> {
    out.best.iter().map(|r| &r.record).collect()
}

fn csv_without_wall_time(records: &[SweepRecord]) -> String {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("summary.csv");
    write_summary_csv(records, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    text.lines()
        .map(|l| l.rsplit_once(',').unwrap().0)
        .collect::<Vec<_>>()
        .join("\n")
}

/// Compares best-per-t rows with a committed table. Numeric columns use a
/// relative tolerance so that a different libm does not trip the check.
fn matches_baseline(records: &[&SweepRecord], baseline: &Path) -> Result<(), String> {
    let text = std::fs::read_to_string(baseline).map_err(|e| format!("{}: {e}", baseline.display()))?;
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err("baseline header mismatch".into());
    }
    let rows: Vec<&str> = lines.collect();
    if rows.len() != records.len() {
        return Err(format!("{} baseline rows, {} computed", rows.len(), records.len()));
    }
    let names: Vec<&str> = CSV_HEADER.split(',').collect();
    for (want, rec) in rows.iter().zip(records) {
        let got = csv_row(rec);
        for ((name, a), b) in names.iter().zip(want.split(',')).zip(got.split(',')) {
            let ok = match *name {
                "wall_s" | "iters" | "residual" => true,
                "class" | "seed" => a == b,
                n if n.ends_with("_i") || n.ends_with("_j") || n.ends_with("_k") => a == b,
                _ => {
                    let (x, y): (f64, f64) = (a.parse().unwrap(), b.parse().unwrap());
                    (x - y).abs() <= 1e-6 * x.abs().max(1e-3)
                }
            };
            if !ok {
                return Err(format!("column {name}: baseline {a}, computed {b}"));
            }
        }
    }
    Ok(())
}

fn data_path(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

/// Roots of the characteristic cubic by bisection on sign-change brackets.
fn eigenvalues_by_bisection(m: &Sym3) -> [f64; 3] {
    let p1 = m.trace();
    let p2 = m.xx * m.yy + m.xx * m.zz + m.yy * m.zz - m.xy * m.xy - m.xz * m.xz - m.yz * m.yz;
    let p3 = m.det();
    let f = |x: f64| ((x - p1) * x + p2) * x - p3;
    // critical points of the cubic separate the roots
    let disc = (p1 * p1 - 3.0 * p2).max(0.0).sqrt();
    let (c1, c2) = ((p1 - disc) / 3.0, (p1 + disc) / 3.0);
    let bound = 1.0 + m.frobenius_sq().sqrt();
    let bisect = |mut lo: f64, mut hi: f64| {
        let flo = f(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (f(mid) > 0.0) == (flo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    [bisect(c2, bound), bisect(c1, c2), bisect(-bound, c1)]
}

fn random_tensor(rng: &mut ChaCha8Rng, max_norm: f64) -> QTensor {
    let dir = QTensor(std::array::from_fn(|_| rng.gen_range(-1.0..1.0)));
    dir * (rng.gen_range(0.0..max_norm) / dir.norm().max(1e-300))
}

fn random_unit(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 0.1 && n <= 1.0 {
            return v.map(|c| c / n);
        }
    }
}

#[test]
fn a1_algebra() {
    let clock = Instant::now();
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);

    let mut ortho = 0.0f64;
    for i in 0..5 {
        for j in 0..5 {
            let (a, b) = (QTensor::basis(i).to_matrix(), QTensor::basis(j).to_matrix());
            let ip = a.xx * b.xx + a.yy * b.yy + a.zz * b.zz + 2.0 * (a.xy * b.xy + a.xz * b.xz + a.yz * b.yz);
            ortho = ortho.max((ip - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    if ortho > 1e-15 {
        failures.push(format!("basis orthonormality {ortho:e}"));
    }

    let mut h_min = f64::INFINITY;
    for _ in 0..100_000 {
        h_min = h_min.min(reduced_h(&random_tensor(&mut rng, 3.0)));
    }
    if h_min < -1e-12 {
        failures.push(format!("h min {h_min:e}"));
    }

    let mut h_vac = 0.0f64;
    for _ in 0..1000 {
        h_vac = h_vac.max(reduced_h(&QTensor::vacuum(random_unit(&mut rng)).unwrap()).abs());
    }
    if h_vac > 1e-12 {
        failures.push(format!("h on vacuum {h_vac:e}"));
    }

    let (mut beta_lo, mut beta_hi, mut beta_uni, mut beta_oracle) = (f64::INFINITY, 0.0f64, 0.0f64, 0.0f64);
    for k in 0..10_000 {
        let q = random_tensor(&mut rng, 3.0);
        let b = biaxiality(&q);
        beta_lo = beta_lo.min(b);
        beta_hi = beta_hi.max(b);
        let ev = eigenvalues_by_bisection(&q.to_matrix());
        let es = eigensystem(&q).values;
        for vals in [ev, es] {
            let s2: f64 = vals.iter().map(|l| l * l).sum();
            let s3: f64 = vals.iter().map(|l| l * l * l).sum();
            beta_oracle = beta_oracle.max((1.0 - 6.0 * s3 * s3 / (s2 * s2 * s2) - b).abs());
        }
        let s = if k % 2 == 0 { rng.gen_range(0.01..2.0) } else { -rng.gen_range(0.01..2.0) };
        beta_uni = beta_uni.max(biaxiality(&QTensor::from_director(random_unit(&mut rng), s).unwrap()).abs());
    }
    if beta_lo < 0.0 || beta_hi > 1.0 + 1e-12 {
        failures.push(format!("beta range [{beta_lo}, {beta_hi}]"));
    }
    if beta_uni > 1e-12 {
        failures.push(format!("beta on uniaxials {beta_uni:e}"));
    }
    if beta_oracle > 1e-10 {
        failures.push(format!("beta vs eigenvalues {beta_oracle:e}"));
    }

    let secs = clock.elapsed().as_secs_f64();
    if secs >= 5.0 {
        failures.push(format!("runtime {secs:.2} s"));
    }
    let ok = failures.is_empty();
    report(
        "A1",
        ok,
        &format!(
            "orthonormality {ortho:.1e}, min h {h_min:.1e}, beta oracle {beta_oracle:.1e}, {secs:.2} s {}",
            failures.join("; ")
        ),
    );
    assert!(ok, "{failures:?}");
}

#[test]
fn a2_gradient() {
    let clock = Instant::now();
    let grid = Grid::with_any_size(7, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut field = hedgehog_boundary(grid);
    field.fill_interior(|_| random_tensor(&mut rng, 1.2));

    let cases = [
        ("full t=1", ReducedParams::from_reduced(1.0, 1.0).unwrap(), PotentialMode::Full),
        ("full t=100", ReducedParams::from_reduced(100.0, 1.0).unwrap(), PotentialMode::Full),
        (
            "gl kappa=1",
            ReducedParams::from_reduced(1.0, 1.0).unwrap(),
            PotentialMode::GinzburgLandau { kappa: 1.0 },
        ),
    ];
    let interior: Vec<usize> = (0..grid.len()).filter(|&i| !field.boundary_mask[i]).collect();
    // Relative error of the 50-slot gradient sample, measured in the 2-norm.
    // A single slot with |g| near 1e-3 sits below the roundoff floor of a
    // central difference of an O(100) energy at step 1e-6.
    let mut worst = 0.0f64;
    let mut per_mode = Vec::new();
    for (name, rp, mode) in &cases {
        let g = gradient(&field, rp, *mode);
        let (mut diff2, mut norm2) = (0.0, 0.0);
        for _ in 0..50 {
            let node = interior[rng.gen_range(0..interior.len())];
            let comp = rng.gen_range(0..5);
            let v = field.values[node].0[comp];
            let eps = 1e-6 * v.abs().max(1.0);
            let mut plus = field.clone();
            plus.values[node].0[comp] = v + eps;
            let mut minus = field.clone();
            minus.values[node].0[comp] = v - eps;
            let fd = (energy(&plus, rp, *mode).total - energy(&minus, rp, *mode).total) / (2.0 * eps);
            let an = g.values[node].0[comp];
            diff2 += (fd - an) * (fd - an);
            norm2 += an * an;
        }
        let rel = (diff2 / norm2).sqrt();
        per_mode.push(format!("{name} {rel:.2e}"));
        worst = worst.max(rel);
    }
    let secs = clock.elapsed().as_secs_f64();
    let ok = worst < 1e-6 && secs < 5.0;
    report("A2", ok, &format!("relative error over 50 slots: {}, {secs:.2} s", per_mode.join(", ")));
    assert!(ok);
}

#[test]
fn a3_biaxial_escape() {
    let out = a3_outcome();
    let best = best_records(out);
    let grid = out.best[0].field.grid;
    let mut failures = Vec::new();

    if best.len() != 3 {
        failures.push(format!("{} best rows", best.len()));
    }
    if !best.windows(2).all(|w| w[1].min_norm >= w[0].min_norm) {
        failures.push("min_norm not nondecreasing".into());
    }
    let last = best.last().unwrap();
    if last.min_norm < 0.05 {
        failures.push(format!("min_norm {} at t=400", last.min_norm));
    }
    if last.max_beta < 0.95 {
        failures.push(format!("max_beta {} at t=400", last.max_beta));
    }
    if last.class != "biaxial_escape" {
        failures.push(format!("class {} at t=400", last.class));
    }
    if grid.boundary_distance(last.beta_location) < 2 {
        failures.push(format!("max-beta node {:?} next to the boundary", last.beta_location));
    }
    if out.any_failed || out.any_unconverged {
        failures.push("failed or unconverged runs".into());
    }
    if let Err(e) = matches_baseline(&best, &data_path("a3_best.csv")) {
        failures.push(format!("baseline: {e}"));
    }

    let table: Vec<String> = best
        .iter()
        .map(|r| format!("t={} min|Q|={:.4} maxbeta={:.8} {}", r.t, r.min_norm, r.max_beta, r.class))
        .collect();
    // informational: every max beta is 1 up to node sampling
    let beta_monotone = best.windows(2).all(|w| w[1].max_beta >= w[0].max_beta);
    let ok = failures.is_empty();
    report(
        "A3",
        ok,
        &format!("{}; max beta nondecreasing: {beta_monotone} {}", table.join(", "), failures.join("; ")),
    );
    assert!(ok, "{failures:?}");
}

#[test]
fn a4_h_mass_trend() {
    let best = best_records(a3_outcome());
    let masses: Vec<f64> = best.iter().map(|r| r.h_mass).collect();
    let decreasing = masses.windows(2).all(|w| w[1] < w[0]);
    let first = lambda_of_t(25.0).unwrap() * masses[0];
    let last = lambda_of_t(400.0).unwrap() * masses[masses.len() - 1];
    let bounded = last <= 2.0 * first;
    let ok = decreasing && bounded;
    report(
        "A4",
        ok,
        &format!(
            "h_mass {masses:?} (strictly decreasing: {decreasing}), lambda*h_mass {first:.4} -> {last:.4} (ratio {:.3}, limit 2)",
            last / first
        ),
    );
    assert!(ok);
}

#[test]
fn a5_maximum_principle() {
    let out = a3_outcome();
    let mut worst = 0.0f64;
    let mut checked = 0;
    for (t, seed, field) in &out.all_fields {
        let converged = out.records.iter().any(|r| r.t == *t && r.seed == *seed && r.converged);
        if converged {
            worst = worst.max(check_maximum_principle(field).0);
            checked += 1;
        }
    }
    let ok = checked == out.records.len() && worst <= 1.0 + 1e-3;
    report("A5", ok, &format!("max node norm {worst:.6} over {checked} converged minimizers"));
    assert!(ok);
}

#[test]
fn a6_uniaxial_comparison() {
    let out = a3_outcome();
    let best = out.best.last().unwrap();
    let grid = best.field.grid;
    let rp = ReducedParams::from_reduced(400.0, 1.0).unwrap();
    let hedgehog = hedgehog_boundary(grid);
    let ansatz = [2.0, 3.0, 4.0, 6.0, 8.0]
        .iter()
        .map(|r| {
            let f = init_radial_ansatz(&hedgehog, r * grid.spacing()).unwrap();
            energy(&f, &rp, PotentialMode::Full).total
        })
        .fold(f64::INFINITY, f64::min);
    let e = best.record.energy.total;
    let gap = (ansatz - e) / ansatz;
    let ok = gap >= 0.01;
    report("A6", ok, &format!("minimizer {e:.6}, best radial ansatz {ansatz:.6}, gap {:.2}%", 100.0 * gap));
    assert!(ok);
}

#[test]
fn a7_trivial_topology_control() {
    let cfg: SweepConfig = A7_CONFIG.parse().unwrap();
    let out = sweep(&cfg).unwrap();
    let r = &out.best[0].record;
    let mut failures = Vec::new();
    if r.class != "smooth_uniaxial" {
        failures.push(format!("class {}", r.class));
    }
    if r.min_norm < 0.9 {
        failures.push(format!("min_norm {}", r.min_norm));
    }
    if r.max_beta > 0.1 {
        failures.push(format!("max_beta {}", r.max_beta));
    }
    if !r.converged {
        failures.push("unconverged".into());
    }
    if let Err(e) = matches_baseline(&[r], &data_path("a7_control.csv")) {
        failures.push(format!("baseline: {e}"));
    }
    let (beta, _) = max_beta(&out.best[0].field);
    let ok = failures.is_empty();
    report(
        "A7",
        ok,
        &format!(
            "radial start under constant boundary relaxed to {} with min|Q|={:.4}, max beta={beta:.2e} {}",
            r.class,
            r.min_norm,
            failures.join("; ")
        ),
    );
    assert!(ok, "{failures:?}");
}

#[test]
fn a8_determinism() {
    let first = csv_without_wall_time(&a3_outcome().records);
    let cfg: SweepConfig = A3_CONFIG.parse().unwrap();
    let second = csv_without_wall_time(&sweep(&cfg).unwrap().records);
    let ok = first == second;
    report("A8", ok, &format!("repeated sweep summary identical: {ok} ({} bytes)", first.len()));
    assert!(ok);
}
