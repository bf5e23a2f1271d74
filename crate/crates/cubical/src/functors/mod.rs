//! Functors between the presheaf categories: the adjoint triple along an inclusion of
//! flavors, triangulation and its nerve, and the marking functors.

pub mod adjoint;
pub mod marking;
pub mod nerve;
pub mod triangulate;

pub use adjoint::{
    cofree, counit_map, default_cap, forget_connections, forget_map, free_connections, free_connections_map, unit_map,
    Cofree, Forgotten, ForgottenCubes,
};
pub use marking::{core, flat, forget_markings, sharp, trivialize, trivialize_by_pushouts};
pub use nerve::Nerve;
pub use triangulate::{cubify, triangulate, triangulate_map, Cubified, TriangulatedCubes, Triangulation};
