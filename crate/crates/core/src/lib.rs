pub mod binom;
pub mod bounded;
pub mod claw;
pub mod clique;
pub mod constructions;
pub mod error;
pub mod gamma;
pub mod ground;
pub mod iso;
pub mod report;
pub mod search;
pub mod shift;
pub mod verify;

pub use error::{Error, Result};
pub use gamma::{Family, IndSet, Params, Vertex};
pub use ground::{GroundFamily, GroundSet};

/// The guide's snippets, compiled and run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/families.md")]
    struct Families;
    #[doc = include_str!("../../../book/src/constructions.md")]
    struct Constructions;
    #[doc = include_str!("../../../book/src/compression.md")]
    struct Compression;
    #[doc = include_str!("../../../book/src/search.md")]
    struct Search;
    #[doc = include_str!("../../../book/src/isomorphism.md")]
    struct Isomorphism;
    #[doc = include_str!("../../../book/src/claw.md")]
    struct Claw;
    #[doc = include_str!("../../../book/src/verification.md")]
    struct Verification;
}
