//! Piecewise conformal maps on the Riemann sphere.

pub mod error;
pub mod fatou;
pub mod gallery;
pub mod index;
pub mod kleinian;
pub mod piecewise;
pub mod prediscontinuity;
pub mod render;
pub mod scene;
pub mod sphere;
pub mod stability;
pub mod verify;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/sphere.md")]
    struct Sphere;
    #[doc = include_str!("../../../book/src/maps.md")]
    struct Maps;
    #[doc = include_str!("../../../book/src/strata.md")]
    struct Strata;
    #[doc = include_str!("../../../book/src/fatou.md")]
    struct Fatou;
    #[doc = include_str!("../../../book/src/limit_sets.md")]
    struct LimitSets;
    #[doc = include_str!("../../../book/src/stability.md")]
    struct Stability;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
}
