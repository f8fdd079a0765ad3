//! Acceptance suite: one test per shipping criterion, each printing a
//! PASS line with its measured numbers (run with `--nocapture` to see them).

use std::time::Instant;

use hexmass::analysis::{bench, error_stats, mass_exact, study, StudyOptions};
use hexmass::hex8::{Hex8, REFERENCE_CORNERS};
use hexmass::mesh::{generate, parse_inp, GridSpec, MeshSpec};
use hexmass::poly::Polynomial3;
use hexmass::quadrature::{mass_conventional, QuadratureRule};
use hexmass::rational::{rat, rat_int, Rational};
use hexmass::rules::Rule;
use hexmass::semianalytic::{mass_semianalytic, SemiAnalyticRule};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// One-point weight tensor of the reference brick (numerators over 27).
const CMD_TENSOR_27: [[i64; 8]; 8] = [
    [8, 4, 2, 4, 4, 2, 1, 2],
    [4, 8, 4, 2, 2, 4, 2, 1],
    [2, 4, 8, 4, 1, 2, 4, 2],
    [4, 2, 4, 8, 2, 1, 2, 4],
    [4, 2, 1, 2, 8, 4, 2, 4],
    [2, 4, 2, 1, 4, 8, 4, 2],
    [1, 2, 4, 2, 2, 4, 8, 4],
    [2, 1, 2, 4, 4, 2, 4, 8],
];

fn dyadic(rng: &mut StdRng, lo: i32, hi: i32, denom: f64) -> f64 {
    rng.gen_range(lo..=hi) as f64 / denom
}

/// Random parallelepiped with dyadic coordinates and positive orientation.
fn random_parallelepiped(rng: &mut StdRng) -> Hex8 {
    loop {
        let origin = [dyadic(rng, -64, 64, 32.0), dyadic(rng, -64, 64, 32.0), dyadic(rng, -64, 64, 32.0)];
        let mut edges = [[0.0f64; 3]; 3];
        for (axis, edge) in edges.iter_mut().enumerate() {
            for (m, value) in edge.iter_mut().enumerate() {
                *value = if m == axis {
                    1.0 + dyadic(rng, -32, 32, 64.0)
                } else {
                    dyadic(rng, -32, 32, 64.0)
                };
            }
        }
        let [u, v, w] = edges;
        let triple = u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0])
            + u[2] * (v[0] * w[1] - v[1] * w[0]);
        if triple > 0.05 {
            return Hex8::parallelepiped(origin, u, v, w);
        }
    }
}

/// Random valid hex: dyadic corner perturbations, validity confirmed by scan.
fn random_valid_hex(rng: &mut StdRng, spread: i32) -> Hex8 {
    loop {
        let hex = Hex8::new(std::array::from_fn(|i| {
            std::array::from_fn(|m| REFERENCE_CORNERS[i][m] + dyadic(rng, -spread, spread, 128.0))
        }));
        if hex.validity_scan(3).negative_count == 0 {
            return hex;
        }
    }
}

fn linear_density(alpha: f64, beta: f64, gamma: f64) -> Polynomial3 {
    let exact = |x: f64| Rational::from_float(x).unwrap();
    Polynomial3::from_terms([
        ((0, 0, 0), rat_int(1)),
        ((1, 0, 0), exact(alpha)),
        ((0, 1, 0), exact(beta)),
        ((0, 0, 1), exact(gamma)),
    ])
}

#[test]
fn criterion_1_weight_tensor_ground_truth() {
    let start = Instant::now();
    let cmd = SemiAnalyticRule::builtin("cmd").unwrap();
    for i in 0..8 {
        for j in 0..8 {
            assert_eq!(
                cmd.weight_exact(i, j, 0),
                &rat(CMD_TENSOR_27[i][j], 27),
                "one-point tensor entry ({i},{j})"
            );
        }
    }
    let lmd = SemiAnalyticRule::builtin("lmd").unwrap();
    // Spot values of the four-point tensors, 1-based indices (i, j, p).
    let spots: [(usize, usize, usize, i64); 5] = [
        (1, 1, 1, 128),
        (7, 7, 1, -112),
        (1, 1, 2, -40),
        (1, 1, 3, -40),
        (5, 5, 4, 40),
    ];
    for (i, j, p, numerator) in spots {
        assert_eq!(
            lmd.weight_exact(i - 1, j - 1, p - 1),
            &rat(numerator, 27),
            "four-point tensor entry ({i},{j},{p})"
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "derivation took {elapsed:?}");
    println!(
        "criterion 1 PASS — one- and four-point weight tensors reproduced exactly in {:.0} ms",
        elapsed.as_secs_f64() * 1e3
    );
}

#[test]
fn criterion_2_partition_collapse() {
    let cmd = SemiAnalyticRule::builtin("cmd").unwrap();
    let lmd = SemiAnalyticRule::builtin("lmd").unwrap();
    for i in 0..8 {
        for j in 0..8 {
            let sum: Rational = (0..4).map(|p| lmd.weight_exact(i, j, p).clone()).sum();
            assert_eq!(&sum, cmd.weight_exact(i, j, 0), "entry ({i},{j})");
        }
    }
    println!("criterion 2 PASS — four-point tensors sum to the one-point tensor, entry-exact");
}

#[test]
fn criterion_3_exactness_classes() {
    let start = Instant::now();
    let cmd = SemiAnalyticRule::builtin("cmd").unwrap();
    let lmd = SemiAnalyticRule::builtin("lmd").unwrap();
    let mut rng = StdRng::seed_from_u64(0xC303);
    let mut worst_cmd = 0.0f64;
    for _ in 0..100 {
        let hex = random_parallelepiped(&mut rng);
        let rho = Polynomial3::constant(rat(rng.gen_range(64..256), 128));
        let est = mass_semianalytic(&hex, &rho, &cmd);
        let exact = mass_exact(&hex, &rho);
        worst_cmd = worst_cmd.max(est.rel_diff_max(&exact));
    }
    assert!(worst_cmd < 1e-12, "one-point worst relative error {worst_cmd}");
    let mut worst_lmd = 0.0f64;
    for _ in 0..100 {
        let hex = random_parallelepiped(&mut rng);
        let band = |rng: &mut StdRng| dyadic(rng, -51, 51, 128.0); // ⊂ [-0.4, 0.4]
        let rho = linear_density(band(&mut rng), band(&mut rng), band(&mut rng));
        let est = mass_semianalytic(&hex, &rho, &lmd);
        let exact = mass_exact(&hex, &rho);
        worst_lmd = worst_lmd.max(est.rel_diff_max(&exact));
    }
    assert!(worst_lmd < 1e-12, "four-point worst relative error {worst_lmd}");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "exactness classes took {elapsed:?}");
    println!(
        "criterion 3 PASS — constant/linear metric-density exactness: worst rel {worst_cmd:.2e} / {worst_lmd:.2e} in {:.2} s",
        elapsed.as_secs_f64()
    );
}

#[test]
fn criterion_4_oracle_equivalence() {
    let start = Instant::now();
    let rule = QuadratureRule::builtin("tensor3").unwrap();
    let mut rng = StdRng::seed_from_u64(0xC404);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let hex = random_valid_hex(&mut rng, 32);
        let est = mass_conventional(&hex, &Polynomial3::one(), &rule);
        let exact = mass_exact(&hex, &Polynomial3::one());
        worst = worst.max(est.rel_diff_max(&exact));
    }
    assert!(worst < 1e-12, "worst relative error {worst}");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "oracle equivalence took {elapsed:?}");
    println!(
        "criterion 4 PASS — exact matrices equal 27-point Gauss on 100 hexes, worst rel {worst:.2e} in {:.2} s",
        elapsed.as_secs_f64()
    );
}

#[test]
fn criterion_5_table1_at_desk_scale() {
    let start = Instant::now();
    // Unit cube, conventional one-point rule: the element average error is
    // 35100/512 % = 68.5547 %.
    let unit = Hex8::unit_box();
    let est = mass_conventional(&unit, &Polynomial3::one(), &QuadratureRule::builtin("g1").unwrap());
    let stats = error_stats(&est, &mass_exact(&unit, &Polynomial3::one())).unwrap();
    assert!(
        (stats.average - 68.5547).abs() < 0.01,
        "unit-cube center-rule average {}",
        stats.average
    );

    let mesh = generate(&MeshSpec::Perturbed {
        grid: GridSpec {
            origin: [0.0; 3],
            edge_u: [5.0, 0.0, 0.0],
            edge_v: [0.0, 5.0, 0.0],
            edge_w: [0.0, 0.0, 5.0],
            divisions: [5, 5, 5],
        },
        amplitude: 0.3,
        seed: 42,
    })
    .unwrap();
    assert!(mesh.n_elements() >= 100);
    let rules: Vec<Rule> = ["g1", "g4", "g6", "cmd", "lmd"]
        .iter()
        .map(|t| Rule::builtin(t).unwrap())
        .collect();
    let report = study(&mesh, &Polynomial3::one(), &rules, &StudyOptions::default()).unwrap();
    let avg = |name: &str| report.rows.iter().find(|r| r.rule == name).unwrap().avg;
    let (g1, g4, g6, cmd, lmd) = (avg("g1"), avg("g4"), avg("g6"), avg("cmd"), avg("lmd"));
    assert!(lmd < cmd && cmd < g6 && g6 < g4 && g4 < g1, "ordering: lmd {lmd:.2} cmd {cmd:.2} g6 {g6:.2} g4 {g4:.2} g1 {g1:.2}");
    assert!((65.0..=75.0).contains(&g1), "g1 average {g1}");
    assert!((24.0..=31.0).contains(&g4), "g4 average {g4}");
    assert!(lmd < 3.0, "lmd average {lmd}");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "desk-scale study took {elapsed:?}");
    println!(
        "criterion 5 PASS — unit-cube g1 {:.4} %; mesh averages g1 {g1:.1} > g4 {g4:.1} > g6 {g6:.1} > cmd {cmd:.1} > lmd {lmd:.2} % in {:.2} s",
        stats.average,
        elapsed.as_secs_f64()
    );
}

#[test]
fn criterion_6_parallelepiped_study() {
    let mesh = generate(&MeshSpec::Grid(GridSpec {
        origin: [1.0, 0.0, -2.0],
        edge_u: [3.0, 0.75, 0.0],
        edge_v: [-0.5, 2.5, 0.25],
        edge_w: [0.25, 0.0, 3.5],
        divisions: [3, 3, 3],
    }))
    .unwrap();
    let rules = [Rule::builtin("cmd").unwrap(), Rule::builtin("lmd").unwrap()];
    let report = study(&mesh, &Polynomial3::one(), &rules, &StudyOptions::default()).unwrap();
    for row in &report.rows {
        assert!(row.min.abs() < 1e-10, "{} min {}", row.rule, row.min);
        assert!(row.avg.abs() < 1e-10, "{} avg {}", row.rule, row.avg);
        assert!(row.max.abs() < 1e-10, "{} max {}", row.rule, row.max);
    }
    println!("criterion 6 PASS — one- and four-point rules report 0 % error across a parallelepiped grid");
}

#[test]
fn criterion_7_qmd20_generality() {
    let rule = SemiAnalyticRule::builtin("qmd20").unwrap();
    assert_eq!(rule.n_points(), 20);
    let mut rng = StdRng::seed_from_u64(0xC707);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let hex = random_valid_hex(&mut rng, 32);
        assert!(
            !hex.metric_polynomial().is_constant(),
            "hex must not degenerate to a parallelepiped"
        );
        let est = mass_semianalytic(&hex, &Polynomial3::one(), &rule);
        let exact = mass_exact(&hex, &Polynomial3::one());
        worst = worst.max(est.rel_diff_max(&exact));
    }
    assert!(worst < 1e-11, "worst relative error {worst}");
    println!("criterion 7 PASS — 20-point rule exact for constant density on 20 general hexes, worst rel {worst:.2e}");
}

#[test]
fn criterion_8_efficiency_equivalence() {
    let mesh = generate(&MeshSpec::Grid(GridSpec {
        origin: [0.0; 3],
        edge_u: [7.0, 0.0, 0.0],
        edge_v: [0.0, 7.0, 0.0],
        edge_w: [0.0, 0.0, 7.0],
        divisions: [7, 7, 7],
    }))
    .unwrap();
    assert!(mesh.n_elements() >= 300);
    let rules = [Rule::builtin("g4").unwrap(), Rule::builtin("lmd").unwrap()];
    let records = bench(&mesh, &Polynomial3::one(), &rules, 21).unwrap();
    assert_eq!(records[0].stored_weights, 36, "conventional four-point stored count");
    assert_eq!(records[1].stored_weights, 144, "semi-analytic four-point stored count");
    let ratio = records[1].seconds_per_element / records[0].seconds_per_element;
    assert!(ratio < 2.0, "lmd/g4 per-element time ratio {ratio}");
    println!(
        "criterion 8 PASS — lmd/g4 per-element time ratio {ratio:.2} on {} elements (36 vs 144 stored weights)",
        mesh.n_elements()
    );
}

#[test]
fn criterion_9_parser_robustness() {
    let base = "\
*NODE
1, 0.0, 0.0, 0.0
2, 1.0, 0.0, 0.0
3, 1.0, 1.0, 0.0
4, 0.0, 1.0, 0.0
5, 0.0, 0.0, 1.0
6, 1.0, 0.0, 1.0
7, 1.0, 1.0, 1.0
8, 0.0, 1.0, 1.0
*ELEMENT, TYPE=C3D8
1, 1, 2, 3, 4, 5, 6, 7, 8
";
    // Comments leave the mesh unchanged.
    let commented = base
        .lines()
        .flat_map(|l| ["** comment", l])
        .collect::<Vec<_>>()
        .join("\n");
    assert_eq!(
        parse_inp(base, "m").unwrap().mesh,
        parse_inp(&commented, "m").unwrap().mesh
    );
    // Continuation lines.
    let continued = base.replace("1, 1, 2, 3, 4, 5, 6, 7, 8", "1, 1, 2,\n3, 4, 5,\n6, 7, 8");
    assert_eq!(
        parse_inp(&continued, "m").unwrap().mesh.elements()[0],
        [0, 1, 2, 3, 4, 5, 6, 7]
    );
    // Unsupported blocks are skipped with a warning count; C3D8 survives.
    let mixed = format!("{base}*ELEMENT, TYPE=C3D4\n2, 1, 2, 3, 5\n");
    let import = parse_inp(&mixed, "m").unwrap();
    assert_eq!(import.skipped_blocks, 1);
    assert_eq!(import.mesh.n_elements(), 1);
    // Case-insensitive keywords, Fortran D exponents.
    let cased = base
        .replace("*NODE", "*node")
        .replace("*ELEMENT, TYPE=C3D8", "*Element, Type=C3D8")
        .replace("2, 1.0, 0.0, 0.0", "2, 1.0D0, 0.0, 0.0");
    assert_eq!(parse_inp(&cased, "m").unwrap().mesh.nodes()[1], [1.0, 0.0, 0.0]);
    // Bad references fail with the offending line number.
    let broken = base.replace("1, 1, 2, 3, 4, 5, 6, 7, 8", "1, 1, 2, 3, 4, 5, 6, 7, 42");
    match parse_inp(&broken, "m") {
        Err(hexmass::Error::MeshParse { line, message }) => {
            assert_eq!(line, 11);
            assert!(message.contains("42"));
        }
        other => panic!("expected a parse error, got {other:?}"),
    }
    println!("criterion 9 PASS — .inp fixtures: comments, continuations, skipped blocks and bad references behave as specified");
}
