//! Geometry of the standard eight-node brick: trilinear shape functions,
//! Jacobian metric, the exact metric polynomial and validity screening.
//!
//! Node ordering follows the ABAQUS C3D8 convention: nodes 1-4 are the
//! ζ = -1 square starting at (-1,-1,-1) and walking counter-clockwise,
//! nodes 5-8 the same square at ζ = +1.

use std::sync::OnceLock;

use crate::poly::{NaturalPoint, Polynomial3};
use crate::rational::{rat, rat_from_f64, rat_int, rat_to_f64, Rational};

/// Reference-corner sign pattern of each node, (σξ, ση, σζ).
pub const REFERENCE_CORNERS: [[f64; 3]; 8] = [
    [-1.0, -1.0, -1.0],
    [1.0, -1.0, -1.0],
    [1.0, 1.0, -1.0],
    [-1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0],
    [1.0, -1.0, 1.0],
    [1.0, 1.0, 1.0],
    [-1.0, 1.0, 1.0],
];

/// The 20 monomials of the metric's variable-separated expansion, in
/// canonical order: constant; linear; bilinear/quadratic; cubic; quartic.
pub const METRIC_MONOMIALS: [(u32, u32, u32); 20] = [
    (0, 0, 0),
    (1, 0, 0),
    (0, 1, 0),
    (0, 0, 1),
    (1, 1, 0),
    (1, 0, 1),
    (0, 1, 1),
    (2, 0, 0),
    (0, 2, 0),
    (0, 0, 2),
    (1, 1, 1),
    (2, 1, 0),
    (1, 2, 0),
    (2, 0, 1),
    (0, 2, 1),
    (1, 0, 2),
    (0, 1, 2),
    (2, 1, 1),
    (1, 2, 1),
    (1, 1, 2),
];

/// Default lattice resolution for validity scans (11³ = 1331 samples).
pub const DEFAULT_SCAN_GRID: usize = 11;

/// Shape-function values N₁..N₈ at a natural point; they sum to 1.
pub fn shape_values(p: &NaturalPoint) -> [f64; 8] {
    std::array::from_fn(|i| {
        let s = REFERENCE_CORNERS[i];
        (1.0 + s[0] * p.xi) * (1.0 + s[1] * p.eta) * (1.0 + s[2] * p.zeta) / 8.0
    })
}

/// Gradients ∂Nᵢ/∂(ξ,η,ζ); rows sum to the zero vector.
pub fn shape_gradients(p: &NaturalPoint) -> [[f64; 3]; 8] {
    std::array::from_fn(|i| {
        let s = REFERENCE_CORNERS[i];
        [
            s[0] * (1.0 + s[1] * p.eta) * (1.0 + s[2] * p.zeta) / 8.0,
            (1.0 + s[0] * p.xi) * s[1] * (1.0 + s[2] * p.zeta) / 8.0,
            (1.0 + s[0] * p.xi) * (1.0 + s[1] * p.eta) * s[2] / 8.0,
        ]
    })
}

/// The eight shape functions as exact polynomials, cached for derivation work.
pub fn shape_polynomials() -> &'static [Polynomial3; 8] {
    static POLYS: OnceLock<[Polynomial3; 8]> = OnceLock::new();
    POLYS.get_or_init(|| {
        std::array::from_fn(|i| {
            let s = REFERENCE_CORNERS[i];
            let factor = |exp: (u32, u32, u32), sign: f64| {
                Polynomial3::from_terms([((0, 0, 0), rat_int(1)), (exp, rat_int(sign as i64))])
            };
            let p = &(&factor((1, 0, 0), s[0]) * &factor((0, 1, 0), s[1]))
                * &factor((0, 0, 1), s[2]);
            p.scaled(&rat(1, 8))
        })
    })
}

/// Exact NᵢNⱼ products (36 distinct, mirrored), cached for weight derivation
/// and reference mass matrices.
pub fn shape_product(i: usize, j: usize) -> &'static Polynomial3 {
    static PRODUCTS: OnceLock<Vec<Polynomial3>> = OnceLock::new();
    let table = PRODUCTS.get_or_init(|| {
        let n = shape_polynomials();
        let mut v = Vec::with_capacity(36);
        for a in 0..8 {
            for b in a..8 {
                v.push(&n[a] * &n[b]);
            }
        }
        v
    });
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    &table[a * 8 - a * (a + 1) / 2 + b]
}

/// An eight-node hexahedral element given by its nodal positions.
///
/// Validity (J > 0 throughout) is *not* an invariant: degenerate and inverted
/// elements are representable and flagged by [`Hex8::validity_scan`].
#[derive(Debug, Clone, PartialEq)]
pub struct Hex8 {
    nodes: [[f64; 3]; 8],
}

/// Result of sampling the metric on a lattice over the reference cube.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidityScan {
    pub min_metric: f64,
    pub argmin: NaturalPoint,
    pub negative_count: usize,
}

impl Hex8 {
    pub fn new(nodes: [[f64; 3]; 8]) -> Self {
        Self { nodes }
    }

    pub fn nodes(&self) -> &[[f64; 3]; 8] {
        &self.nodes
    }

    /// The reference element itself: corners at ±1.
    pub fn reference() -> Self {
        Self::new(REFERENCE_CORNERS)
    }

    /// The unit box [0,1]³.
    pub fn unit_box() -> Self {
        Self::parallelepiped([0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0])
    }

    /// Parallelepiped spanned by edge vectors u, v, w from `origin`.
    pub fn parallelepiped(origin: [f64; 3], u: [f64; 3], v: [f64; 3], w: [f64; 3]) -> Self {
        let corner = |su: f64, sv: f64, sw: f64| {
            std::array::from_fn(|m| origin[m] + su * u[m] + sv * v[m] + sw * w[m])
        };
        Self::new([
            corner(0.0, 0.0, 0.0),
            corner(1.0, 0.0, 0.0),
            corner(1.0, 1.0, 0.0),
            corner(0.0, 1.0, 0.0),
            corner(0.0, 0.0, 1.0),
            corner(1.0, 0.0, 1.0),
            corner(1.0, 1.0, 1.0),
            corner(0.0, 1.0, 1.0),
        ])
    }

    /// Spatial position X(ξ,η,ζ) = Σ Nᵢ Xᵢ.
    pub fn map_point(&self, p: &NaturalPoint) -> [f64; 3] {
        let n = shape_values(p);
        let mut x = [0.0; 3];
        for i in 0..8 {
            for m in 0..3 {
                x[m] += n[i] * self.nodes[i][m];
            }
        }
        x
    }

    /// Jacobian determinant (metric) J at a natural point.
    pub fn metric_at(&self, p: &NaturalPoint) -> f64 {
        let g = shape_gradients(p);
        // J_mn = ∂X_m/∂ξ_n
        let mut jac = [[0.0; 3]; 3];
        for i in 0..8 {
            for m in 0..3 {
                for n in 0..3 {
                    jac[m][n] += self.nodes[i][m] * g[i][n];
                }
            }
        }
        det3(&jac)
    }

    /// Exact symbolic expansion of the metric as a polynomial in (ξ,η,ζ).
    ///
    /// Node coordinates are finite doubles, hence exact dyadic rationals; the
    /// expansion is computed in rational arithmetic, so monomials outside the
    /// 20-term variable-separated set cancel identically.
    pub fn metric_polynomial(&self) -> MetricPolynomial {
        let grads: [[Polynomial3; 3]; 8] = std::array::from_fn(|i| {
            let n = &shape_polynomials()[i];
            std::array::from_fn(|axis| n.derivative(axis))
        });
        // jac[m][n] = Σ_i X_mi ∂N_i/∂ξ_n as exact polynomials
        let mut jac: [[Polynomial3; 3]; 3] = Default::default();
        for (i, g) in grads.iter().enumerate() {
            for m in 0..3 {
                let coord = rat_from_f64(self.nodes[i][m]);
                if num_traits::Zero::is_zero(&coord) {
                    continue;
                }
                for n in 0..3 {
                    jac[m][n] = &jac[m][n] + &g[n].scaled(&coord);
                }
            }
        }
        let cof = |r1: usize, r2: usize, c1: usize, c2: usize| {
            &(&jac[r1][c1] * &jac[r2][c2]) - &(&jac[r1][c2] * &jac[r2][c1])
        };
        let det = &(&(&jac[0][0] * &cof(1, 2, 1, 2)) - &(&jac[0][1] * &cof(1, 2, 0, 2)))
            + &(&jac[0][2] * &cof(1, 2, 0, 1));
        MetricPolynomial::from_polynomial(det)
    }

    /// Samples the metric on a uniform `grid_n`³ lattice over [-1,1]³
    /// (endpoints included) and reports the minimum, its location and the
    /// count of negative samples. Requires `grid_n >= 2`.
    pub fn validity_scan(&self, grid_n: usize) -> ValidityScan {
        assert!(grid_n >= 2, "validity scan needs at least a 2-point lattice");
        let coord = |k: usize| -1.0 + 2.0 * k as f64 / (grid_n - 1) as f64;
        let mut min_metric = f64::INFINITY;
        let mut argmin = NaturalPoint::origin();
        let mut negative_count = 0;
        for i in 0..grid_n {
            for j in 0..grid_n {
                for k in 0..grid_n {
                    let p = NaturalPoint::new(coord(i), coord(j), coord(k));
                    let jval = self.metric_at(&p);
                    if jval < min_metric {
                        min_metric = jval;
                        argmin = p;
                    }
                    if jval < 0.0 {
                        negative_count += 1;
                    }
                }
            }
        }
        ValidityScan {
            min_metric,
            argmin,
            negative_count,
        }
    }
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// The metric's exact variable-separated expansion: coefficients J̃₀..J̃₁₉
/// against [`METRIC_MONOMIALS`].
#[derive(Debug, Clone, PartialEq)]
pub struct MetricPolynomial {
    coefficients: [Rational; 20],
}

impl MetricPolynomial {
    fn from_polynomial(p: Polynomial3) -> Self {
        let mut coefficients: [Rational; 20] = std::array::from_fn(|_| rat_int(0));
        for (exp, coeff) in p.terms() {
            let slot = METRIC_MONOMIALS
                .iter()
                .position(|m| m == exp)
                .expect("metric expansion produced a monomial outside the 20-term set");
            coefficients[slot] = coeff.clone();
        }
        Self { coefficients }
    }

    pub fn coefficients(&self) -> &[Rational; 20] {
        &self.coefficients
    }

    pub fn coefficient(&self, k: usize) -> &Rational {
        &self.coefficients[k]
    }

    /// True when only J̃₀ is nonzero (parallelepiped elements).
    pub fn is_constant(&self) -> bool {
        self.coefficients[1..].iter().all(num_traits::Zero::is_zero)
    }

    pub fn to_polynomial(&self) -> Polynomial3 {
        Polynomial3::from_terms(
            METRIC_MONOMIALS
                .iter()
                .zip(&self.coefficients)
                .map(|(e, c)| (*e, c.clone())),
        )
    }

    pub fn eval(&self, p: &NaturalPoint) -> f64 {
        METRIC_MONOMIALS
            .iter()
            .zip(&self.coefficients)
            .map(|(&(a, b, c), coeff)| {
                rat_to_f64(coeff) * p.xi.powi(a as i32) * p.eta.powi(b as i32) * p.zeta.powi(c as i32)
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::integrate_cube;
    use crate::rational::rat;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_point(rng: &mut StdRng) -> NaturalPoint {
        NaturalPoint::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        )
    }

    #[test]
    fn shape_values_at_center_and_corners() {
        let center = shape_values(&NaturalPoint::origin());
        for v in center {
            assert_eq!(v, 0.125);
        }
        let at_node1 = shape_values(&NaturalPoint::new(-1.0, -1.0, -1.0));
        assert_eq!(at_node1, [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let at_node7 = shape_values(&NaturalPoint::new(1.0, 1.0, 1.0));
        let mut expected = [0.0; 8];
        expected[6] = 1.0;
        assert_eq!(at_node7, expected);
    }

    #[test]
    fn cardinality_at_every_corner() {
        for (j, corner) in REFERENCE_CORNERS.iter().enumerate() {
            let vals = shape_values(&NaturalPoint::new(corner[0], corner[1], corner[2]));
            for (i, v) in vals.iter().enumerate() {
                assert_eq!(*v, if i == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn partition_of_unity_at_random_points() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..100 {
            let p = random_point(&mut rng);
            let sum: f64 = shape_values(&p).iter().sum();
            assert!((sum - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn gradient_hand_values() {
        let g = shape_gradients(&NaturalPoint::origin());
        assert_eq!(g[0][0], -0.125);
        let g7 = shape_gradients(&NaturalPoint::new(1.0, 1.0, 1.0));
        assert_eq!(g7[6][0], 0.5); // ∂N₇/∂ξ = (1+η)(1+ζ)/8 at η=ζ=1
    }

    #[test]
    fn gradient_rows_sum_to_zero() {
        let mut rng = StdRng::seed_from_u64(12);
        for _ in 0..50 {
            let g = shape_gradients(&random_point(&mut rng));
            for axis in 0..3 {
                let sum: f64 = g.iter().map(|row| row[axis]).sum();
                assert!(sum.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = StdRng::seed_from_u64(13);
        let h = 1e-6;
        for _ in 0..50 {
            let p = NaturalPoint::new(
                rng.gen_range(-0.9..0.9),
                rng.gen_range(-0.9..0.9),
                rng.gen_range(-0.9..0.9),
            );
            let g = shape_gradients(&p);
            for axis in 0..3 {
                let mut lo = p.as_array();
                let mut hi = p.as_array();
                lo[axis] -= h;
                hi[axis] += h;
                let vlo = shape_values(&NaturalPoint::from(lo));
                let vhi = shape_values(&NaturalPoint::from(hi));
                for i in 0..8 {
                    let fd = (vhi[i] - vlo[i]) / (2.0 * h);
                    assert!((fd - g[i][axis]).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn shape_polynomials_agree_with_closed_form() {
        let polys = shape_polynomials();
        let mut rng = StdRng::seed_from_u64(14);
        for _ in 0..20 {
            let p = random_point(&mut rng);
            let vals = shape_values(&p);
            for i in 0..8 {
                assert!((polys[i].eval(&p) - vals[i]).abs() < 1e-15);
            }
        }
        // Each N_i integrates to 1 over the reference cube.
        for poly in polys {
            assert_eq!(integrate_cube(poly), rat_int(1));
        }
    }

    #[test]
    fn metric_of_reference_and_unit_box() {
        let mut rng = StdRng::seed_from_u64(15);
        let reference = Hex8::reference();
        let unit = Hex8::unit_box();
        for _ in 0..20 {
            let p = random_point(&mut rng);
            assert!((reference.metric_at(&p) - 1.0).abs() < 1e-14);
            assert!((unit.metric_at(&p) - 0.125).abs() < 1e-15);
        }
    }

    #[test]
    fn parallelepiped_metric_is_the_scaled_triple_product() {
        let u = [1.5, 0.25, 0.0];
        let v = [-0.25, 2.0, 0.5];
        let w = [0.125, 0.25, 1.0];
        let hex = Hex8::parallelepiped([3.0, -1.0, 2.0], u, v, w);
        let triple = u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0])
            + u[2] * (v[0] * w[1] - v[1] * w[0]);
        let mut rng = StdRng::seed_from_u64(16);
        for _ in 0..20 {
            let p = random_point(&mut rng);
            assert!((hex.metric_at(&p) - triple / 8.0).abs() < 1e-14);
        }
    }

    #[test]
    fn metric_polynomial_of_parallelepiped_is_constant() {
        let hex = Hex8::parallelepiped(
            [0.5, 0.5, 0.5],
            [2.0, 0.5, 0.25],
            [0.0, 1.5, -0.5],
            [0.75, 0.0, 1.25],
        );
        let mp = hex.metric_polynomial();
        assert!(mp.is_constant());
        assert!((rat_to_f64(mp.coefficient(0)) - hex.metric_at(&NaturalPoint::origin())).abs() < 1e-14);
    }

    #[test]
    fn metric_polynomial_matches_pointwise_determinant() {
        let mut rng = StdRng::seed_from_u64(17);
        let nodes: [[f64; 3]; 8] = std::array::from_fn(|i| {
            std::array::from_fn(|m| REFERENCE_CORNERS[i][m] + rng.gen_range(-0.3..0.3))
        });
        let hex = Hex8::new(nodes);
        let mp = hex.metric_polynomial();
        for _ in 0..50 {
            let p = random_point(&mut rng);
            let direct = hex.metric_at(&p);
            assert!((mp.eval(&p) - direct).abs() < 1e-12 * (1.0 + direct.abs()));
        }
        let poly = mp.to_polynomial();
        let (dx, dy, dz) = poly.per_variable_degrees();
        assert!(dx <= 2 && dy <= 2 && dz <= 2);
        assert!(poly.total_degree() <= 4);
    }

    #[test]
    fn displaced_corner_stays_within_metric_monomials() {
        let mut nodes = REFERENCE_CORNERS;
        nodes[6][0] += 0.1;
        // from_polynomial panics if the expansion leaves the 20-monomial set
        let mp = Hex8::new(nodes).metric_polynomial();
        assert!(!mp.is_constant());
    }

    #[test]
    fn affine_maps_scale_every_coefficient_by_det() {
        // Dyadic affine map: products with dyadic node coordinates stay exact.
        let a = [
            [1.0, 0.5, 0.0],
            [0.0, 0.75, 0.25],
            [-0.5, 0.0, 2.0],
        ];
        let b = [0.25, -1.0, 3.0];
        let det_a = rat(1, 1) * (rat(3, 4) * rat(2, 1) - rat(1, 4) * rat(0, 1))
            - rat(1, 2) * (rat(0, 1) * rat(2, 1) - rat(1, 4) * rat(-1, 2));
        let mut rng = StdRng::seed_from_u64(18);
        let nodes: [[f64; 3]; 8] = std::array::from_fn(|i| {
            std::array::from_fn(|m| {
                REFERENCE_CORNERS[i][m] + (rng.gen_range(-16i32..16) as f64) / 64.0
            })
        });
        let hex = Hex8::new(nodes);
        let mapped = Hex8::new(std::array::from_fn(|i| {
            std::array::from_fn(|m| {
                b[m] + (0..3).map(|n| a[m][n] * nodes[i][n]).sum::<f64>()
            })
        }));
        let before = hex.metric_polynomial();
        let after = mapped.metric_polynomial();
        for k in 0..20 {
            assert_eq!(after.coefficient(k).clone(), before.coefficient(k) * &det_a);
        }
    }

    #[test]
    fn validity_scan_reports_inversions() {
        let unit = Hex8::unit_box();
        let scan = unit.validity_scan(5);
        assert_eq!(scan.min_metric, 0.125);
        assert_eq!(scan.negative_count, 0);

        let mut nodes = *unit.nodes();
        nodes.swap(0, 1);
        let swapped = Hex8::new(nodes).validity_scan(5);
        assert!(swapped.negative_count > 0);
    }

    #[test]
    fn scan_grid_two_samples_the_corners() {
        // On the reference element every corner has J = 1; a 2-lattice sees
        // exactly the 8 corners.
        let scan = Hex8::reference().validity_scan(2);
        assert_eq!(scan.min_metric, 1.0);
        assert_eq!(scan.negative_count, 0);
        assert_eq!(scan.argmin.as_array().map(f64::abs), [1.0, 1.0, 1.0]);
    }
}
