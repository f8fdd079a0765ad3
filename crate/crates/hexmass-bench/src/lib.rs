//! Shared fixtures for the assembly and derivation benchmarks.

use hexmass::hex8::{Hex8, REFERENCE_CORNERS};
use hexmass::mesh::{generate, GridSpec, Mesh, MeshSpec};

/// A mildly distorted (non-parallelepiped) element, fixed for benchmarking.
pub fn distorted_hex() -> Hex8 {
    // Deterministic corner offsets; keeps the metric well inside positive.
    const OFFSETS: [[f64; 3]; 8] = [
        [0.12, -0.08, 0.05],
        [-0.06, 0.11, -0.04],
        [0.09, 0.07, 0.13],
        [-0.11, -0.05, 0.02],
        [0.04, 0.13, -0.09],
        [-0.08, -0.12, 0.06],
        [0.10, 0.03, 0.11],
        [-0.05, 0.09, -0.12],
    ];
    Hex8::new(std::array::from_fn(|i| {
        std::array::from_fn(|m| REFERENCE_CORNERS[i][m] + OFFSETS[i][m])
    }))
}

/// The perturbed benchmark mesh: 343 elements, fixed seed.
pub fn bench_mesh() -> Mesh {
    generate(&MeshSpec::Perturbed {
        grid: GridSpec {
            origin: [0.0; 3],
            edge_u: [7.0, 0.0, 0.0],
            edge_v: [0.0, 7.0, 0.0],
            edge_w: [0.0, 0.0, 7.0],
            divisions: [7, 7, 7],
        },
        amplitude: 0.25,
        seed: 1,
    })
    .expect("benchmark mesh generates")
}
