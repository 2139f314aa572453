//! Horoball packings of ideally triangulated punctured spheres.
//!
//! The crate builds the icosahedral subdivision family, decorates it with
//! corner areas, checks that a decoration is geometric, develops it into the
//! upper half-plane, renders figures, and searches for decorations that
//! maximize the smallest cusp area.

// `!(x > 0.0)` is used on purpose so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod decor;
pub mod develop;
pub mod hyp2;
pub mod optimize;
pub mod persist;
pub mod surface;

pub use hyp2::{Contact, GeometryError, Horoball, IdealPoint, IdealTriangle, Mobius};
pub use surface::{
    classify_vertices, color_faces, family_member, icosahedron, subdivide, Corner, FaceColor, Side,
    SurfaceError, Triangulation, VertexType,
};
