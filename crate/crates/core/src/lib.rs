//! Knowledge spaces and learning spaces over finite domains.
//!
//! A space is held in one of three interchangeable forms:
//!
//! * a disjoint union of wildcard rows ([`rows`], built by [`engine`]);
//! * its base of union-irreducible states ([`base`]);
//! * dimplications `A ⇝ B` ([`prime`]) or, for learning spaces, implications
//!   over the join-irreducible poset ([`lattice`]).
//!
//! [`analytics`] counts and conditions directly on rows, [`explore`] builds a
//! space from yes/no answers, [`generate`] draws seeded instances and
//! [`bench`] runs suites of them. Files use the formats in [`format`].
//!
//! ```
//! use learnspace::base::base_from_rows;
//! use learnspace::engine::compress_space;
//! use learnspace::format::read_dimplications;
//!
//! let (dom, theta) = read_dimplications("domain: a b c d e\ne ~> a\na ~> b\nb d ~> c")?;
//! let rows = compress_space(&dom, &theta)?;
//! assert_eq!(rows.count(), 13u32.into());
//! assert_eq!(base_from_rows(&rows)?.len(), 6);
//! # Ok::<(), learnspace::Error>(())
//! ```

pub mod analytics;
pub mod base;
pub mod bench;
pub mod engine;
pub mod error;
pub mod explore;
pub mod format;
pub mod generate;
pub mod lattice;
pub mod model;
pub mod prime;
pub mod rows;

pub use error::{Error, ResourceAbort, Result};
pub use model::{Dimplication, Domain, Implication, ItemSet, RootedSet};
pub use rows::{Cell, Mode, RowFamily, SymbolRow};

// The guide's snippets run as doctests, one module per chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/rows.md")]
    mod rows {}
    #[doc = include_str!("../../../book/src/compression.md")]
    mod compression {}
    #[doc = include_str!("../../../book/src/bases.md")]
    mod bases {}
    #[doc = include_str!("../../../book/src/dimplications.md")]
    mod dimplications {}
    #[doc = include_str!("../../../book/src/implications.md")]
    mod implications {}
    #[doc = include_str!("../../../book/src/analytics.md")]
    mod analytics {}
    #[doc = include_str!("../../../book/src/generators.md")]
    mod generators {}
    #[doc = include_str!("../../../book/src/exploration.md")]
    mod exploration {}
    #[doc = include_str!("../../../book/src/benchmarks.md")]
    mod benchmarks {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/server.md")]
    mod server {}
}
