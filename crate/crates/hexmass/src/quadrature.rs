//! Conventional cubature rules on the reference cube and standard mass-matrix
//! assembly M_ij ≈ Σ_p w_p (N_i N_j ρ₀ J)|_p.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::hex8::{shape_values, Hex8};
use crate::poly::{monomial_integral, NaturalPoint, Polynomial3};
use crate::rational::rat_to_f64;

/// Weight-sum and point-bound validation tolerance.
const RULE_TOL: f64 = 1e-12;

/// An 8×8 element mass matrix; symmetric by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct MassMatrix {
    entries: [[f64; 8]; 8],
}

impl MassMatrix {
    /// Builds the upper triangle from `f` and mirrors it, so M_ij = M_ji
    /// holds exactly.
    pub fn from_symmetric_fn(mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut entries = [[0.0; 8]; 8];
        for i in 0..8 {
            for j in i..8 {
                let v = f(i, j);
                entries[i][j] = v;
                entries[j][i] = v;
            }
        }
        Self { entries }
    }

    pub fn zero() -> Self {
        Self { entries: [[0.0; 8]; 8] }
    }

    pub fn entries(&self) -> &[[f64; 8]; 8] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i][j]
    }

    /// Σᵢⱼ entries — the element's total mass.
    pub fn total(&self) -> f64 {
        self.entries.iter().flatten().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// max|A-B| / max|B|; the matrix-norm relative difference used by the
    /// exactness checks.
    pub fn rel_diff_max(&self, reference: &MassMatrix) -> f64 {
        let scale = reference.max_abs();
        if scale == 0.0 {
            return if self.max_abs() == 0.0 { 0.0 } else { f64::INFINITY };
        }
        let mut worst = 0.0f64;
        for i in 0..8 {
            for j in 0..8 {
                worst = worst.max((self.entries[i][j] - reference.entries[i][j]).abs());
            }
        }
        worst / scale
    }
}

impl std::ops::Index<(usize, usize)> for MassMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.entries[i][j]
    }
}

impl std::fmt::Display for MassMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for row in &self.entries {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:>24.16e}")).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// A conventional cubature rule: sampling points with scalar weights.
///
/// Invariants checked at construction: Σ weights = 8 (the reference-cube
/// volume) and all points inside [-1,1]³. Shape-function values at the points
/// are precomputed, mirroring the stored-weight model of standard codes.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    name: String,
    points: Vec<NaturalPoint>,
    weights: Vec<f64>,
    nominal_degree: u32,
    shape_table: Vec<[f64; 8]>,
}

#[derive(Deserialize)]
struct RuleJson {
    name: String,
    points: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn new(
        name: impl Into<String>,
        points: Vec<NaturalPoint>,
        weights: Vec<f64>,
        nominal_degree: u32,
    ) -> Result<Self> {
        let name = name.into();
        if points.len() != weights.len() || points.is_empty() {
            return Err(Error::InvalidRule {
                name,
                reason: format!(
                    "needs matching non-empty point/weight lists (got {} points, {} weights)",
                    points.len(),
                    weights.len()
                ),
            });
        }
        let wsum: f64 = weights.iter().sum();
        if (wsum - 8.0).abs() > RULE_TOL {
            return Err(Error::InvalidRule {
                name,
                reason: format!("weights sum to {wsum}, expected the cube volume 8"),
            });
        }
        if let Some(p) = points.iter().find(|p| !p.in_reference_cube(RULE_TOL)) {
            return Err(Error::InvalidRule {
                name,
                reason: format!("point {p} lies outside [-1,1]³"),
            });
        }
        let shape_table = points.iter().map(shape_values).collect();
        Ok(Self {
            name,
            points,
            weights,
            nominal_degree,
            shape_table,
        })
    }

    /// The built-in conventional rules.
    ///
    /// * `g1` — center point, weight 8, degree 1.
    /// * `g4` — 4-point degree-2 simplex-type rule: (±r,0,s) / (0,±r,-s)
    ///   with r = √(2/3), s = 1/√3, weight 2 each.
    /// * `g6` — 6 face-center axis points, weight 4/3, degree 3.
    /// * `tensor2/3/4` — N³ Gauss–Legendre tensor products.
    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "g1" => Self::new("g1", vec![NaturalPoint::origin()], vec![8.0], 1),
            "g4" => {
                let r = (2.0f64 / 3.0).sqrt();
                let s = 1.0 / 3.0f64.sqrt();
                Self::new(
                    "g4",
                    vec![
                        NaturalPoint::new(r, 0.0, s),
                        NaturalPoint::new(0.0, r, -s),
                        NaturalPoint::new(-r, 0.0, s),
                        NaturalPoint::new(0.0, -r, -s),
                    ],
                    vec![2.0; 4],
                    2,
                )
            }
            "g6" => {
                let mut points = Vec::new();
                for axis in 0..3 {
                    for sign in [1.0, -1.0] {
                        let mut c = [0.0; 3];
                        c[axis] = sign;
                        points.push(NaturalPoint::from(c));
                    }
                }
                Self::new("g6", points, vec![4.0 / 3.0; 6], 3)
            }
            "tensor2" => Self::tensor(2),
            "tensor3" => Self::tensor(3),
            "tensor4" => Self::tensor(4),
            other => Err(Error::UnknownRule {
                name: other.to_string(),
                valid: Self::builtin_names().join(", "),
            }),
        }
    }

    pub fn builtin_names() -> [&'static str; 6] {
        ["g1", "g4", "g6", "tensor2", "tensor3", "tensor4"]
    }

    fn tensor(n: usize) -> Result<Self> {
        let (nodes, weights_1d) = gauss_legendre_1d(n);
        let mut points = Vec::with_capacity(n * n * n);
        let mut weights = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    points.push(NaturalPoint::new(nodes[i], nodes[j], nodes[k]));
                    weights.push(weights_1d[i] * weights_1d[j] * weights_1d[k]);
                }
            }
        }
        Self::new(format!("tensor{n}"), points, weights, 2 * n as u32 - 1)
    }

    /// Loads a user-supplied rule from `{"name":…, "points":[[ξ,η,ζ],…],
    /// "weights":[…]}`; the nominal degree is certified by moment matching.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RuleJson = serde_json::from_str(text).map_err(|e| Error::InvalidRule {
            name: "<json>".into(),
            reason: e.to_string(),
        })?;
        let points: Vec<NaturalPoint> = raw.points.into_iter().map(NaturalPoint::from).collect();
        let mut rule = Self::new(raw.name, points, raw.weights, 0)?;
        rule.nominal_degree = rule.certify_degree(9);
        Ok(rule)
    }

    /// Largest d ≤ cap with every monomial of total degree ≤ d integrated
    /// exactly (to a 1e-9 absolute-over-8 tolerance).
    pub fn certify_degree(&self, cap: u32) -> u32 {
        let mut certified = 0;
        for d in 0..=cap {
            if !self.integrates_degree_exactly(d, 1e-9) {
                break;
            }
            certified = d;
        }
        certified
    }

    fn integrates_degree_exactly(&self, d: u32, tol: f64) -> bool {
        for a in 0..=d {
            for b in 0..=(d - a) {
                let c = d - a - b;
                let exact = rat_to_f64(&monomial_integral(a, b, c));
                let got: f64 = self
                    .points
                    .iter()
                    .zip(&self.weights)
                    .map(|(p, w)| {
                        w * p.xi.powi(a as i32) * p.eta.powi(b as i32) * p.zeta.powi(c as i32)
                    })
                    .sum();
                if (got - exact).abs() > tol * 8.0 {
                    return false;
                }
            }
        }
        true
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn points(&self) -> &[NaturalPoint] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    pub fn nominal_degree(&self) -> u32 {
        self.nominal_degree
    }

    pub fn shape_table(&self) -> &[[f64; 8]] {
        &self.shape_table
    }

    /// Stored-weight count of the conventional scheme: n_p weights plus the
    /// 8·n_p tabulated shape values.
    pub fn stored_weight_count(&self) -> usize {
        self.n_points() + 8 * self.n_points()
    }
}

/// Σ_p w_p · p(x_p) — the quadrature estimate of ∫ p dΩ.
pub fn apply_rule(rule: &QuadratureRule, p: &Polynomial3) -> f64 {
    rule.points
        .iter()
        .zip(&rule.weights)
        .map(|(x, w)| w * p.eval(x))
        .sum()
}

/// Conventional mass-matrix assembly (symmetric by construction).
///
/// Warns (without failing) if the density is non-positive at a rule point.
pub fn mass_conventional(hex: &Hex8, rho: &Polynomial3, rule: &QuadratureRule) -> MassMatrix {
    let rho_terms = rho.float_terms();
    let eval_rho = |p: &NaturalPoint| -> f64 {
        rho_terms
            .iter()
            .map(|&((a, b, c), coeff)| {
                coeff * p.xi.powi(a as i32) * p.eta.powi(b as i32) * p.zeta.powi(c as i32)
            })
            .sum()
    };
    let mut upper = [[0.0f64; 8]; 8];
    let mut warned = false;
    for (p_idx, point) in rule.points.iter().enumerate() {
        let shape = &rule.shape_table[p_idx];
        let rho_p = eval_rho(point);
        if rho_p <= 0.0 && !warned {
            eprintln!(
                "warning: density is non-positive ({rho_p}) at rule point {point} of '{}'",
                rule.name
            );
            warned = true;
        }
        let factor = rule.weights[p_idx] * rho_p * hex.metric_at(point);
        for i in 0..8 {
            let si = shape[i] * factor;
            for j in i..8 {
                upper[i][j] += si * shape[j];
            }
        }
    }
    MassMatrix::from_symmetric_fn(|i, j| upper[i][j])
}

/// 1-D Gauss–Legendre nodes and weights on [-1,1] from the closed forms.
fn gauss_legendre_1d(n: usize) -> (Vec<f64>, Vec<f64>) {
    match n {
        1 => (vec![0.0], vec![2.0]),
        2 => {
            let a = 1.0 / 3.0f64.sqrt();
            (vec![-a, a], vec![1.0, 1.0])
        }
        3 => {
            let a = (3.0f64 / 5.0).sqrt();
            (vec![-a, 0.0, a], vec![5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])
        }
        4 => {
            let inner = ((3.0 - 2.0 * (6.0f64 / 5.0).sqrt()) / 7.0).sqrt();
            let outer = ((3.0 + 2.0 * (6.0f64 / 5.0).sqrt()) / 7.0).sqrt();
            let w_inner = (18.0 + 30.0f64.sqrt()) / 36.0;
            let w_outer = (18.0 - 30.0f64.sqrt()) / 36.0;
            (
                vec![-outer, -inner, inner, outer],
                vec![w_outer, w_inner, w_inner, w_outer],
            )
        }
        _ => unimplemented!("tensor rules are provided for n = 2, 3, 4"),
    }
}
