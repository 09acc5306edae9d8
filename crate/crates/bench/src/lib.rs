//! Shared fixtures for the benchmarks.

use eigensum::{Polytope, SquareMatrix};

/// A fixed shear-and-stretch of the plane, far from orthogonal.
pub fn planar_transform() -> SquareMatrix {
    SquareMatrix::from_rows(&[vec![1.4, 0.35], vec![-0.2, 0.8]]).expect("2x2")
}

/// Its three-dimensional counterpart.
pub fn spatial_transform() -> SquareMatrix {
    SquareMatrix::from_rows(&[vec![1.3, 0.2, 0.0], vec![0.1, 0.9, -0.25], vec![0.0, 0.3, 1.1]]).expect("3x3")
}

/// Regular pentagon mapped by [`planar_transform`].
pub fn sheared_pentagon() -> Polytope {
    Polytope::regular_polygon(5, 1.0)
        .and_then(|p| p.map(&planar_transform()))
        .expect("valid polygon")
}

/// Regular tetrahedron mapped by [`spatial_transform`].
pub fn sheared_tetrahedron() -> Polytope {
    Polytope::regular_simplex(3)
        .and_then(|p| p.map(&spatial_transform()))
        .expect("valid simplex")
}
