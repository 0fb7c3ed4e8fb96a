use std::time::Instant;

use ldg_core::config::SweepConfig;
use ldg_core::diagnostics::interpolate;
use ldg_core::energy::energy;
use ldg_core::field::{boundary_degree, constant_boundary, field_boundary_degree, radial_director};
use ldg_core::minimize::MinimizeOptions;
use ldg_core::sweep::run_single;
use ldg_core::{
    blow_up_extract, classify, hedgehog_boundary, init_radial_ansatz, init_random, minimize, reduced_h, Grid,
    PotentialMode, QField, QTensor, ReducedParams, Thresholds,
};

fn smooth_uniaxial(grid: Grid) -> QField {
    // rho(r) = 1 - exp(-r^2) keeps rho(r) x̂ ⊗ x̂ smooth at the origin
    QField::from_fn(grid, |x| {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        if r2 == 0.0 {
            return QTensor::ZERO;
        }
        let rho = -(-r2).exp_m1();
        QTensor::from_director(radial_director(x), rho * 1.5f64.sqrt()).unwrap()
    })
}

#[test]
fn energy_converges_at_second_order() {
    let rp = ReducedParams::from_reduced(3.0, 1.0).unwrap();
    let sizes = [9, 17, 33, 65];
    let e: Vec<f64> = sizes
        .iter()
        .map(|&n| energy(&smooth_uniaxial(Grid::new(n, 1.0).unwrap()), &rp, PotentialMode::Full).total)
        .collect();
    let pts: Vec<(f64, f64)> = (0..3)
        .map(|i| {
            let h = 2.0 / (sizes[i] - 1) as f64;
            (h.ln(), (e[i] - e[i + 1]).abs().ln())
        })
        .collect();
    let (mx, my) = (
        pts.iter().map(|p| p.0).sum::<f64>() / 3.0,
        pts.iter().map(|p| p.1).sum::<f64>() / 3.0,
    );
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!(slope >= 1.8, "observed order {slope}, energies {e:?}");
}

#[test]
fn ginzburg_landau_blow_down_scaling() {
    // E on [-R, R]^3 with unit coefficient equals R times G_R on the unit cube
    let rp = ReducedParams::from_reduced(1.0, 0.8).unwrap();
    for r in [2.0, 5.0, 0.5] {
        let big = Grid::new(11, r).unwrap();
        let unit = Grid::new(11, 1.0).unwrap();
        let q_big = init_random(&hedgehog_boundary(big), 0.4 * r, 3, 0.3).unwrap();
        let mut q_unit = hedgehog_boundary(unit);
        q_unit.values.clone_from(&q_big.values);
        let e = energy(&q_big, &rp, PotentialMode::GinzburgLandau { kappa: 1.0 }).total;
        let g = energy(&q_unit, &rp, PotentialMode::GinzburgLandau { kappa: r * r }).total;
        assert!((e - r * g).abs() <= 1e-12 * e, "R = {r}: {e} vs {}", r * g);
    }
}

#[test]
fn hedgehog_boundary_topology() {
    let grid = Grid::new(13, 1.0).unwrap();
    let deg = boundary_degree(grid, |node| radial_director(grid.coord(node)));
    assert!((deg - 1.0).abs() < 1e-9, "degree {deg}");
    assert!((field_boundary_degree(&hedgehog_boundary(grid)) - 1.0).abs() < 1e-9);
    let flat = constant_boundary(grid, [0.0, 0.0, 1.0]).unwrap();
    assert!(field_boundary_degree(&flat).abs() < 1e-9);

    let f = hedgehog_boundary(grid);
    for (q, &b) in f.values.iter().zip(&f.boundary_mask) {
        if b {
            assert!(reduced_h(q).abs() < 1e-14);
        }
    }
}

#[test]
fn near_uniaxial_hedgehog_fields_melt() {
    // Every hedgehog field produced here with max beta <= 0.9 has a near zero.
    let grid = Grid::new(9, 1.0).unwrap();
    let hedgehog = hedgehog_boundary(grid);
    let mut fields: Vec<QField> = [1.0, 2.0, 3.0, 4.0]
        .iter()
        .map(|r| init_radial_ansatz(&hedgehog, r * grid.spacing()).unwrap())
        .collect();
    for t in [1.0, 25.0] {
        let rp = ReducedParams::from_reduced(t, 1.0).unwrap();
        let start = init_radial_ansatz(&hedgehog, 2.0 * grid.spacing()).unwrap();
        let (f, _) = minimize(&start, &rp, PotentialMode::Full, &MinimizeOptions::for_temperature(t)).unwrap();
        fields.push(f);
    }
    let mut seen = 0;
    for f in &fields {
        let rep = classify(f, Thresholds::default()).unwrap();
        if rep.max_beta <= 0.9 {
            seen += 1;
            assert!(rep.min_norm < 0.05, "min_norm {} with max beta {}", rep.min_norm, rep.max_beta);
        }
    }
    assert!(seen >= 4);
}

#[test]
fn seeds_share_a_basin_on_coarse_grid() {
    let grid = Grid::new(9, 1.0).unwrap();
    let rp = ReducedParams::from_reduced(25.0, 1.0).unwrap();
    let opts = MinimizeOptions::for_temperature(25.0);
    let hedgehog = hedgehog_boundary(grid);
    let energies: Vec<f64> = [1, 2]
        .iter()
        .map(|&seed| {
            let start = init_random(&hedgehog, 3.0 * grid.spacing(), seed, 0.1).unwrap();
            let (_, rep) = minimize(&start, &rp, PotentialMode::Full, &opts).unwrap();
            assert!(rep.converged);
            rep.final_energy().total
        })
        .collect();
    let rel = (energies[0] - energies[1]).abs() / energies[0];
    assert!(rel < 1e-6, "{energies:?}");
    // regression value for this grid
    assert!((energies[0] - REGRESSION_9_T25).abs() < 1e-6 * REGRESSION_9_T25, "{}", energies[0]);
}

const REGRESSION_9_T25: f64 = 28.866_417_984;

#[test]
fn blow_up_is_exact_on_trilinear_fields() {
    let grid = Grid::new(11, 1.0).unwrap();
    let coef: [[f64; 8]; 5] =
        std::array::from_fn(|c| std::array::from_fn(|k| ((c * 8 + k) as f64 * 0.37).sin()));
    let tri = |x: [f64; 3]| {
        QTensor(std::array::from_fn(|c| {
            let a = coef[c];
            a[0] + a[1] * x[0]
                + a[2] * x[1]
                + a[3] * x[2]
                + a[4] * x[0] * x[1]
                + a[5] * x[0] * x[2]
                + a[6] * x[1] * x[2]
                + a[7] * x[0] * x[1] * x[2]
        }))
    };
    let src = QField::from_fn(grid, tri);
    let center = [0.13, -0.21, 0.05];
    let t = 9.0;
    let out_grid = Grid::new(9, 1.0).unwrap();
    let out = blow_up_extract(&src, center, t, out_grid).unwrap();
    assert!(out.boundary_mask.iter().all(|b| !b));
    for idx in 0..out_grid.len() {
        let y = out_grid.coord(out_grid.node(idx));
        let x: [f64; 3] = std::array::from_fn(|d| center[d] + y[d] / t.sqrt());
        let want = tri(x);
        let got = out.values[idx];
        assert!((got - want).norm() < 1e-12, "{got:?} vs {want:?}");
        assert!((interpolate(&src, x).unwrap() - want).norm() < 1e-12);
    }
}

#[test]
fn single_hedgehog_run_is_fast() {
    let cfg: SweepConfig = "[grid]\nn = 17\n[reduced]\nLtilde = 1\nt = 1\n".parse().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let clock = Instant::now();
    let out = run_single(&cfg, dir.path()).unwrap();
    let secs = clock.elapsed().as_secs_f64();
    assert_eq!(out.records.len(), 1);
    assert!(out.records[0].converged);
    assert!(dir.path().join("summary.csv").exists());
    assert!(secs < 10.0, "took {secs} s");
}
