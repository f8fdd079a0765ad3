//! Semi-analytical mass-matrix rules.
//!
//! The integrand of M_ij = ∫ N_i N_j (ρ₀J) dΩ splits into a mesh-independent
//! polynomial part N_i N_j and the mesh-dependent metric-density product ρ₀J.
//! Approximating ρ₀J by a cardinal interpolant Σ_p N̂_p (ρ₀J)|_p and
//! integrating analytically gives
//!
//! ```text
//! M_ij ≈ Σ_p M̂_ijp ρ₀p J_p,   M̂_ijp = ∫ N_i N_j N̂_p dΩ
//! ```
//!
//! with the weight tensor M̂ precomputed once, in exact rational arithmetic.
//! The built-in rules: `cmd` (one point, constant metric-density — exact on
//! parallelepipeds with constant density), `lmd` (four points, reproduces any
//! ρ₀J linear in natural coordinates) and `qmd20` (twenty points spanning the
//! full 20-monomial metric expansion — exact for constant density on any hex).

use std::sync::OnceLock;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hex8::{shape_product, Hex8, METRIC_MONOMIALS};
use crate::poly::{integrate_cube, poly_mul, NaturalPoint, Polynomial3};
use crate::quadrature::MassMatrix;
use crate::rational::{rat, rat_int, rat_to_f64, rat_to_string, Rational};

/// A sampling point with exact rational coordinates, as used at derivation
/// time. Runtime code works with the `f64` copies kept by the rule.
pub type RationalPoint = [Rational; 3];

/// A semi-analytical integration rule: sampling points, cardinal ansatz
/// polynomials and the precomputed symmetric weight tensor M̂_ijp.
#[derive(Debug, Clone)]
pub struct SemiAnalyticRule {
    name: String,
    points_exact: Vec<RationalPoint>,
    points: Vec<NaturalPoint>,
    ansatz: Vec<Polynomial3>,
    weights_exact: Vec<[[Rational; 8]; 8]>,
    weights: Vec<[[f64; 8]; 8]>,
}

impl SemiAnalyticRule {
    /// Derives the rule for a point set and an ansatz basis of equal length:
    /// solves the cardinal conditions N̂_p(x_k) = δ_pk exactly, then
    /// precomputes M̂_ijp = ∫ N_i N_j N̂_p dΩ.
    ///
    /// Fails with an unisolvence error when the generalized Vandermonde
    /// system of the basis over the points is singular.
    pub fn derive(name: impl Into<String>, points: &[RationalPoint], basis: &[Polynomial3]) -> Result<Self> {
        let name = name.into();
        let n = points.len();
        if basis.len() != n || n == 0 {
            return Err(Error::BasisPointMismatch {
                points: n,
                basis: basis.len(),
            });
        }
        // vandermonde[k][q] = basis_q(x_k)
        let vandermonde: Vec<Vec<Rational>> = points
            .iter()
            .map(|x| basis.iter().map(|b| b.eval_rational(x)).collect())
            .collect();
        let inverse = invert_rational(&vandermonde).ok_or_else(|| Error::Unisolvent {
            points: format_points(points),
        })?;

        // Cardinal ansatz: N̂_p = Σ_q (V⁻¹)_{qp} basis_q, so N̂_p(x_k) = δ_pk.
        let ansatz: Vec<Polynomial3> = (0..n)
            .map(|p| {
                let mut poly = Polynomial3::zero();
                for (q, b) in basis.iter().enumerate() {
                    poly = &poly + &b.scaled(&inverse[q][p]);
                }
                poly
            })
            .collect();
        debug_assert!(ansatz.iter().enumerate().all(|(p, np)| {
            points.iter().enumerate().all(|(k, x)| {
                let v = np.eval_rational(x);
                if p == k { v.is_one() } else { v.is_zero() }
            })
        }));

        let weights_exact: Vec<[[Rational; 8]; 8]> = ansatz
            .iter()
            .map(|np| {
                let mut tensor: [[Rational; 8]; 8] = std::array::from_fn(|_| std::array::from_fn(|_| Rational::zero()));
                for i in 0..8 {
                    for j in i..8 {
                        let value = integrate_cube(&poly_mul(shape_product(i, j), np));
                        tensor[i][j] = value.clone();
                        tensor[j][i] = value;
                    }
                }
                tensor
            })
            .collect();
        let weights = weights_exact
            .iter()
            .map(|t| std::array::from_fn(|i| std::array::from_fn(|j| rat_to_f64(&t[i][j]))))
            .collect();
        let points_float = points
            .iter()
            .map(|x| NaturalPoint::new(rat_to_f64(&x[0]), rat_to_f64(&x[1]), rat_to_f64(&x[2])))
            .collect();
        Ok(Self {
            name,
            points_exact: points.to_vec(),
            points: points_float,
            ansatz,
            weights_exact,
            weights,
        })
    }

    /// Derives from floating sampling points, converting each coordinate to
    /// its exact dyadic rational.
    pub fn derive_from_floats(
        name: impl Into<String>,
        points: &[NaturalPoint],
        basis: &[Polynomial3],
    ) -> Result<Self> {
        let exact: Vec<RationalPoint> = points
            .iter()
            .map(|p| p.as_array().map(crate::rational::rat_from_f64))
            .collect();
        Self::derive(name, &exact, basis)
    }

    /// The built-in semi-analytical rules: `cmd`, `lmd`, `qmd20`.
    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "cmd" => Self::derive("cmd", &[origin_point()], &[Polynomial3::one()]),
            "lmd" => {
                let tenth = rat(1, 10);
                let points = [
                    origin_point(),
                    [tenth.clone(), rat_int(0), rat_int(0)],
                    [rat_int(0), tenth.clone(), rat_int(0)],
                    [rat_int(0), rat_int(0), tenth],
                ];
                let basis = [
                    Polynomial3::one(),
                    Polynomial3::xi(),
                    Polynomial3::eta(),
                    Polynomial3::zeta(),
                ];
                Self::derive("lmd", &points, &basis)
            }
            "qmd20" => Self::build_qmd20(),
            other => Err(Error::UnknownRule {
                name: other.to_string(),
                valid: Self::builtin_names().join(", "),
            }),
        }
    }

    pub fn builtin_names() -> [&'static str; 3] {
        ["cmd", "lmd", "qmd20"]
    }

    /// Twenty points, one per monomial of the metric expansion. The corners
    /// plus edge midpoints of the reference cube (the 20-node serendipity
    /// lattice) are unisolvent for exactly this monomial set; a seeded
    /// random-rational fallback covers pathological custom bases.
    fn build_qmd20() -> Result<Self> {
        let basis: Vec<Polynomial3> = METRIC_MONOMIALS
            .iter()
            .map(|&e| Polynomial3::monomial(e, rat_int(1)))
            .collect();
        let lattice: Vec<RationalPoint> = qmd20_lattice()
            .iter()
            .map(|&[x, y, z]| [rat_int(x), rat_int(y), rat_int(z)])
            .collect();
        match Self::derive("qmd20", &lattice, &basis) {
            Ok(rule) => Ok(rule),
            Err(Error::Unisolvent { .. }) => {
                let mut rng = ChaCha8Rng::seed_from_u64(0x20_2015);
                for _ in 0..16 {
                    let points: Vec<RationalPoint> = (0..20)
                        .map(|_| std::array::from_fn(|_| rat(rng.gen_range(-8..=8), 8)))
                        .collect();
                    if let Ok(rule) = Self::derive("qmd20", &points, &basis) {
                        return Ok(rule);
                    }
                }
                Err(Error::Unisolvent {
                    points: "qmd20 fallback search exhausted".into(),
                })
            }
            Err(e) => Err(e),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[NaturalPoint] {
        &self.points
    }

    pub fn points_exact(&self) -> &[RationalPoint] {
        &self.points_exact
    }

    pub fn ansatz(&self) -> &[Polynomial3] {
        &self.ansatz
    }

    /// Exact tensor entry M̂_ijp (0-based indices).
    pub fn weight_exact(&self, i: usize, j: usize, p: usize) -> &Rational {
        &self.weights_exact[p][i][j]
    }

    pub fn weight(&self, i: usize, j: usize, p: usize) -> f64 {
        self.weights[p][i][j]
    }

    pub fn weight_matrices(&self) -> &[[[f64; 8]; 8]] {
        &self.weights
    }

    /// Distinct stored weights: the symmetric 8×8 tensor slice per point,
    /// (8·8+8)/2 = 36 values each.
    pub fn stored_weight_count(&self) -> usize {
        36 * self.n_points()
    }

    /// JSON export: rule name, float points, ansatz coefficients and tensor
    /// entries as "num/den" strings.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct TermOut {
            monomial: [u32; 3],
            coefficient: String,
        }
        #[derive(Serialize)]
        struct RuleOut {
            name: String,
            points: Vec<[f64; 3]>,
            ansatz: Vec<Vec<TermOut>>,
            weights: Vec<Vec<Vec<String>>>,
        }
        let out = RuleOut {
            name: self.name.clone(),
            points: self.points.iter().map(|p| p.as_array()).collect(),
            ansatz: self
                .ansatz
                .iter()
                .map(|p| {
                    p.terms()
                        .map(|(&(a, b, c), coeff)| TermOut {
                            monomial: [a, b, c],
                            coefficient: rat_to_string(coeff),
                        })
                        .collect()
                })
                .collect(),
            weights: self
                .weights_exact
                .iter()
                .map(|t| t.iter().map(|row| row.iter().map(rat_to_string).collect()).collect())
                .collect(),
        };
        serde_json::to_string_pretty(&out).expect("weight export serialization")
    }

    /// CSV export, one row per distinct tensor entry: `i,j,p,num,den`
    /// (1-based, upper triangle i ≤ j).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for p in 0..self.n_points() {
            for i in 0..8 {
                for j in i..8 {
                    let w = &self.weights_exact[p][i][j];
                    out.push_str(&format!("{},{},{},{},{}\n", i + 1, j + 1, p + 1, w.numer(), w.denom()));
                }
            }
        }
        out
    }
}

fn origin_point() -> RationalPoint {
    [rat_int(0), rat_int(0), rat_int(0)]
}

/// Corner and edge-midpoint lattice in C3D20 node order.
fn qmd20_lattice() -> &'static [[i64; 3]; 20] {
    static LATTICE: OnceLock<[[i64; 3]; 20]> = OnceLock::new();
    LATTICE.get_or_init(|| {
        let mut pts = [[0i64; 3]; 20];
        for (i, c) in crate::hex8::REFERENCE_CORNERS.iter().enumerate() {
            pts[i] = [c[0] as i64, c[1] as i64, c[2] as i64];
        }
        let edges: [[i64; 3]; 12] = [
            [0, -1, -1],
            [1, 0, -1],
            [0, 1, -1],
            [-1, 0, -1],
            [0, -1, 1],
            [1, 0, 1],
            [0, 1, 1],
            [-1, 0, 1],
            [-1, -1, 0],
            [1, -1, 0],
            [1, 1, 0],
            [-1, 1, 0],
        ];
        pts[8..].copy_from_slice(&edges);
        pts
    })
}

fn format_points(points: &[RationalPoint]) -> String {
    points
        .iter()
        .map(|p| format!("({}, {}, {})", p[0], p[1], p[2]))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Exact Gauss–Jordan inversion; `None` when singular.
fn invert_rational(matrix: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = matrix.len();
    let mut work: Vec<Vec<Rational>> = matrix
        .iter()
        .enumerate()
        .map(|(r, row)| {
            let mut extended = row.clone();
            extended.extend((0..n).map(|c| if c == r { Rational::one() } else { Rational::zero() }));
            extended
        })
        .collect();
    for col in 0..n {
        let pivot_row = (col..n).find(|&r| !work[r][col].is_zero())?;
        work.swap(col, pivot_row);
        let pivot = work[col][col].clone();
        for value in work[col].iter_mut() {
            *value /= &pivot;
        }
        for r in 0..n {
            if r == col || work[r][col].is_zero() {
                continue;
            }
            let factor = work[r][col].clone();
            for c in col..2 * n {
                let delta = &factor * &work[col][c];
                work[r][c] -= delta;
            }
        }
    }
    Some(work.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Semi-analytical mass assembly: M_ij = Σ_p M̂_ijp ρ(x_p) J(x_p).
pub fn mass_semianalytic(hex: &Hex8, rho: &Polynomial3, rule: &SemiAnalyticRule) -> MassMatrix {
    let rho_terms = rho.float_terms();
    let mut upper = [[0.0f64; 8]; 8];
    for (p_idx, point) in rule.points.iter().enumerate() {
        let rho_p: f64 = rho_terms
            .iter()
            .map(|&((a, b, c), coeff)| {
                coeff * point.xi.powi(a as i32) * point.eta.powi(b as i32) * point.zeta.powi(c as i32)
            })
            .sum();
        let factor = rho_p * hex.metric_at(point);
        let tensor = &rule.weights[p_idx];
        for i in 0..8 {
            for j in i..8 {
                upper[i][j] += tensor[i][j] * factor;
            }
        }
    }
    MassMatrix::from_symmetric_fn(|i, j| upper[i][j])
}

/// Row-sum lumping: diagonal entries are the row sums, total mass preserved.
pub fn lump(m: &MassMatrix) -> MassMatrix {
    MassMatrix::from_symmetric_fn(|i, j| {
        if i == j {
            (0..8).map(|k| m.get(i, k)).sum()
        } else {
            0.0
        }
    })
}
