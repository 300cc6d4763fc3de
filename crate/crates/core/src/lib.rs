//! Maximal left-compressed intersecting families: enumeration,
//! classification, extension to larger ground sets, weight optimization,
//! and the Young-lattice counting behind their growth.

// Family caches its members in a OnceLock; Hash and Ord only see the boundary.
#![allow(clippy::mutable_key_type)]

pub mod config;
pub mod enumerate;
pub mod error;
pub mod extension;
pub mod family;
pub mod report;
pub mod sets;
pub mod store;
pub mod suite;
pub mod weights;
pub mod young;

pub use error::{Error, Result};
