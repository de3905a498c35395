//! Billiard complexity constants for regular polygons, computed both from
//! closed forms and by direct enumeration of generalized diagonals and
//! saddle connections.

pub mod constants;
pub mod count;
pub mod error;
pub mod expr;
pub mod geom;
pub mod polygon;
pub mod real;
pub mod surface;
pub mod unfold;
