//! Exact reference mass matrices, the percent-error metric, coarse-mesh
//! accuracy studies and the per-element assembly benchmark.

use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hex8::{shape_product, Hex8};
use crate::mesh::{mesh_validity, Mesh};
use crate::poly::{integrate_cube, poly_mul, Polynomial3};
use crate::quadrature::MassMatrix;
use crate::rational::{rat_to_f64, Rational};
use crate::rules::Rule;

/// Relative threshold under which an exact entry is considered zero and
/// excluded from percent-error averages (the guard is reported, not silent).
pub const EXCLUSION_GUARD: f64 = 1e-9;

/// Exact mass matrix entries ∫ N_i N_j ρ J dΩ as rationals.
///
/// The metric polynomial is expanded exactly from the (dyadic) node
/// coordinates, so this is exact for the element as stored.
pub fn mass_exact_rational(hex: &Hex8, rho: &Polynomial3) -> [[Rational; 8]; 8] {
    let jrho = poly_mul(&hex.metric_polynomial().to_polynomial(), rho);
    let mut entries: [[Rational; 8]; 8] =
        std::array::from_fn(|_| std::array::from_fn(|_| crate::rational::rat_int(0)));
    for i in 0..8 {
        for j in i..8 {
            let value = integrate_cube(&poly_mul(shape_product(i, j), &jrho));
            entries[i][j] = value.clone();
            entries[j][i] = value;
        }
    }
    entries
}

/// Exact mass matrix, converted to floats once after exact assembly.
pub fn mass_exact(hex: &Hex8, rho: &Polynomial3) -> MassMatrix {
    let exact = mass_exact_rational(hex, rho);
    MassMatrix::from_symmetric_fn(|i, j| rat_to_f64(&exact[i][j]))
}

/// Per-entry percent errors of an estimated matrix against the exact one.
#[derive(Debug, Clone)]
pub struct ErrorStats {
    /// |100·(est−exact)/exact| per entry; `None` where the exact entry fell
    /// under the near-zero guard.
    pub per_entry: [[Option<f64>; 8]; 8],
    /// Average over the included entries.
    pub average: f64,
    /// Count of excluded entries (out of 64).
    pub excluded: usize,
}

/// Percent-error statistics: entries with |exact| < 1e-9·max|exact| are
/// excluded from the average and counted. Errs when everything is excluded.
pub fn error_stats(est: &MassMatrix, exact: &MassMatrix) -> Result<ErrorStats> {
    let scale = exact.max_abs();
    if scale == 0.0 {
        return Err(Error::UndefinedAverage);
    }
    let mut per_entry = [[None; 8]; 8];
    let mut sum = 0.0;
    let mut included = 0usize;
    let mut excluded = 0usize;
    for i in 0..8 {
        for j in 0..8 {
            let e = exact.get(i, j);
            if e.abs() < EXCLUSION_GUARD * scale {
                excluded += 1;
                continue;
            }
            let pct = (100.0 * (est.get(i, j) - e) / e).abs();
            per_entry[i][j] = Some(pct);
            sum += pct;
            included += 1;
        }
    }
    if included == 0 {
        return Err(Error::UndefinedAverage);
    }
    Ok(ErrorStats {
        per_entry,
        average: sum / included as f64,
        excluded,
    })
}

/// Study configuration.
#[derive(Debug, Clone)]
pub struct StudyOptions {
    /// Lattice resolution of the per-element validity scan.
    pub scan_grid: usize,
    /// Drop negative-metric elements instead of keeping them with a warning.
    pub strict_validity: bool,
}

impl Default for StudyOptions {
    fn default() -> Self {
        Self {
            scan_grid: crate::hex8::DEFAULT_SCAN_GRID,
            strict_validity: false,
        }
    }
}

/// Per-rule error summary across a mesh.
#[derive(Debug, Clone)]
pub struct RuleErrors {
    pub rule: String,
    pub n_points: usize,
    /// Element-average percent errors, indexed like `ErrorReport::elements`.
    pub per_element: Vec<f64>,
    pub min: f64,
    pub avg: f64,
    pub max: f64,
    /// Total excluded entries across the mesh.
    pub excluded: usize,
}

/// Mesh-level accuracy report: min/avg/max of the per-element average
/// absolute percent errors, one row per rule.
#[derive(Debug, Clone)]
pub struct ErrorReport {
    pub label: String,
    /// Original indices of the elements included in the study (ascending).
    pub elements: Vec<usize>,
    /// Elements whose validity scan found negative metric samples.
    pub negative_elements: Vec<usize>,
    pub rows: Vec<RuleErrors>,
}

impl ErrorReport {
    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    /// CSV form: `label,rule,n_elements,avg_pct,min_pct,max_pct,excluded`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,rule,n_elements,avg_pct,min_pct,max_pct,excluded\n");
        for row in &self.rows {
            out.push_str(&format!(
                "\"{}\",{},{},{},{},{},{}\n",
                self.label,
                row.rule,
                self.n_elements(),
                row.avg,
                row.min,
                row.max,
                row.excluded
            ));
        }
        out
    }

    /// Markdown table with explicitly labeled average/max/min columns.
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("## Accuracy study — {}\n\n", self.label));
        out.push_str(&format!("{} elements", self.n_elements()));
        if self.negative_elements.is_empty() {
            out.push_str("; no negative-metric elements.\n\n");
        } else {
            out.push_str(&format!(
                "; negative-metric elements: {:?}.\n\n",
                self.negative_elements
            ));
        }
        out.push_str("| rule | points | avg % | max % | min % | excluded |\n");
        out.push_str("|------|-------:|------:|------:|------:|---------:|\n");
        for row in &self.rows {
            out.push_str(&format!(
                "| {} | {} | {:.4} | {:.4} | {:.4} | {} |\n",
                row.rule, row.n_points, row.avg, row.max, row.min, row.excluded
            ));
        }
        out
    }
}

/// Runs the per-element accuracy comparison of `rules` against the exact
/// matrices. Negative-metric elements are kept (with a warning) unless
/// `strict_validity` drops them; reductions run in ascending element order.
pub fn study(mesh: &Mesh, rho: &Polynomial3, rules: &[Rule], options: &StudyOptions) -> Result<ErrorReport> {
    if mesh.n_elements() == 0 {
        return Err(Error::EmptyMesh);
    }
    let validity = mesh_validity(mesh, options.scan_grid);
    if !validity.negative_elements.is_empty() {
        eprintln!(
            "warning: {} element(s) with negative metric samples: {:?}{}",
            validity.negative_elements.len(),
            validity.negative_elements,
            if options.strict_validity { " (dropped)" } else { " (kept)" }
        );
    }
    let elements: Vec<usize> = (0..mesh.n_elements())
        .filter(|e| !options.strict_validity || !validity.negative_elements.contains(e))
        .collect();
    if elements.is_empty() {
        return Err(Error::EmptyMesh);
    }

    // (avg, excluded) per rule for every element, in ascending element order.
    let per_element: Vec<Vec<(f64, usize)>> = elements
        .par_iter()
        .map(|&e| {
            let hex = mesh.element_hex(e).expect("index in range");
            let exact = mass_exact(&hex, rho);
            rules
                .iter()
                .map(|rule| {
                    let stats = error_stats(&rule.assemble(&hex, rho), &exact)?;
                    Ok((stats.average, stats.excluded))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let rows = rules
        .iter()
        .enumerate()
        .map(|(r, rule)| {
            let averages: Vec<f64> = per_element.iter().map(|row| row[r].0).collect();
            let excluded = per_element.iter().map(|row| row[r].1).sum();
            let min = averages.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = averages.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let avg = averages.iter().sum::<f64>() / averages.len() as f64;
            RuleErrors {
                rule: rule.name().to_string(),
                n_points: rule.n_points(),
                per_element: averages,
                min,
                avg,
                max,
                excluded,
            }
        })
        .collect();

    Ok(ErrorReport {
        label: mesh.label.clone(),
        elements,
        negative_elements: validity.negative_elements,
        rows,
    })
}

/// One benchmark measurement.
#[derive(Debug, Clone)]
pub struct BenchRecord {
    pub rule: String,
    pub n_points: usize,
    pub stored_weights: usize,
    /// Median wall time per element over the repeats.
    pub seconds_per_element: f64,
    pub repeats: usize,
}

/// Times whole-mesh assembly per rule, single-threaded for stability;
/// reports the median per-element time and the stored-weight counts.
/// `repeat` must be at least 1.
pub fn bench(mesh: &Mesh, rho: &Polynomial3, rules: &[Rule], repeat: usize) -> Result<Vec<BenchRecord>> {
    assert!(repeat >= 1, "bench needs at least one repeat");
    if mesh.n_elements() == 0 {
        return Err(Error::EmptyMesh);
    }
    let hexes: Vec<Hex8> = (0..mesh.n_elements())
        .map(|e| mesh.element_hex(e).expect("index in range"))
        .collect();
    let mut records = Vec::with_capacity(rules.len());
    for rule in rules {
        // Warm-up pass keeps one-time costs out of the samples.
        let mut sink = 0.0;
        for hex in &hexes {
            sink += rule.assemble(hex, rho).get(0, 0);
        }
        let mut totals = Vec::with_capacity(repeat);
        for _ in 0..repeat {
            let start = Instant::now();
            for hex in &hexes {
                sink += rule.assemble(hex, rho).get(0, 0);
            }
            totals.push(start.elapsed().as_secs_f64());
        }
        std::hint::black_box(sink);
        totals.sort_by(f64::total_cmp);
        let median = totals[totals.len() / 2];
        records.push(BenchRecord {
            rule: rule.name().to_string(),
            n_points: rule.n_points(),
            stored_weights: rule.stored_weight_count(),
            seconds_per_element: median / mesh.n_elements() as f64,
            repeats: repeat,
        });
    }
    Ok(records)
}

/// Markdown table over benchmark records.
pub fn bench_markdown(records: &[BenchRecord]) -> String {
    let mut out = String::from("| rule | points | stored weights | ns/element | repeats |\n");
    out.push_str("|------|-------:|---------------:|-----------:|--------:|\n");
    for r in records {
        out.push_str(&format!(
            "| {} | {} | {} | {:.1} | {} |\n",
            r.rule,
            r.n_points,
            r.stored_weights,
            r.seconds_per_element * 1e9,
            r.repeats
        ));
    }
    out
}
