//! Two-pass rendering of adaptive heightfields.
//!
//! An [`AdaptiveGrid`](grid::AdaptiveGrid) of square cells is approximated
//! with truncated Gaussian radial basis functions ([`rbf`]), discretized into
//! three view-dependent cascade rasters ([`cascade`], [`discretize`]) and then
//! ray cast as a regular bilinear heightfield with maximum-mipmap empty-space
//! skipping ([`raycast`]). [`render`] ties the passes together per pixel.
//!
//! The crate is `no_std` and only needs `alloc`. IO, file formats, timing and
//! thread pools live in the `hfcast` crate.

#![cfg_attr(not(any(test, feature = "std")), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod cascade;
pub mod discretize;
pub mod geom;
pub mod grid;
pub mod math;
pub mod raycast;
pub mod rbf;
pub mod render;

pub use cascade::{CameraView, CascadeError, CascadeLayout, CascadePolygon, CascadeSet, CascadeSettings};
pub use discretize::CascadeRaster;
pub use grid::{AdaptiveGrid, Cell, GridError, InfluenceTable, Rect};
pub use math::{Vec2, Vec3};
pub use raycast::{HitRecord, Layer, MaxMipmap, Ray};
pub use rbf::{RbfParams, SampleValue};
pub use render::{Frame, FrameConfig, PixelSample, PreparedFrame, Rgb};
