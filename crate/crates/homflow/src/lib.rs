//! Numerical machinery for homogeneous Ricci flow on compact Lie groups:
//! structure constants of isotropy decompositions, curvature of diagonal
//! invariant metrics, Einstein metrics, flow integration, and construction
//! and diagnosis of collapsed ancient solutions.

pub mod algebra;
pub mod roots;
pub mod space;
pub mod decomp;
pub mod presets;
pub mod structure;
pub mod nr;
pub mod curvature;
pub mod submersion;
pub mod rk;
pub mod flow;
pub mod analysis;
pub mod io;
pub mod specfile;
pub mod error;
pub mod la;

pub use error::{Error, Result};
