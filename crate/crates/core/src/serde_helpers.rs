//! Row-major JSON forms for small nalgebra types.

use nalgebra::{Matrix3, Vector3};
use serde::Serializer;

pub fn matrix3_rows<S: Serializer>(m: &Matrix3<f64>, s: S) -> Result<S::Ok, S::Error> {
    let rows: [[f64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]));
    s.collect_seq(rows)
}

pub fn vector3<S: Serializer>(v: &Vector3<f64>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq([v.x, v.y, v.z])
}
