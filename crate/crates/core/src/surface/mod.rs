//! The once-punctured torus as a Fuchsian group: generators, enumeration,
//! fundamental domains, quadrature and closed geodesics.

mod dirichlet;
mod enumerate;
mod ford;
mod frame;
mod geodesic;
mod mesh;
mod model;
mod tiles;
mod word;

pub use dirichlet::{DirichletDomain, DirichletSide, ReducedPoint};
pub use enumerate::{free_word_count, generators_hash, GroupTable, DEFAULT_BUDGET};
pub use ford::{FordArc, FordDomain};
pub use frame::CuspFrame;
pub use geodesic::{
    coset_reps, default_samples, geodesic_representative, AxisTranslate, ClosedGeodesic,
};
pub use mesh::{build_mesh, order_for_cells, QuadratureMesh, DEFAULT_Y_MAX};
pub use model::{fn_generators, punctured_torus_from_fn, FuchsianSurface, DEFAULT_MAX_WORD_LEN};
pub use tiles::{distance_to_geodesic, tile_word, Tile};
pub use word::{Letter, Word};

use crate::{Point, Result};

/// Freely reduced words up to `max_word_len` with their matrices.
pub fn enumerate_group(surface: &FuchsianSurface, max_word_len: usize) -> Result<GroupTable> {
    GroupTable::build(&surface.a, &surface.b, max_word_len, DEFAULT_BUDGET)
}

pub fn dirichlet_domain(surface: &FuchsianSurface, center: Point) -> Result<DirichletDomain> {
    DirichletDomain::new(surface, center)
}
