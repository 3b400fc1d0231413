//! File formats, synthetic scenes, the parallel frame pipeline and the
//! command-line front end for `hfcast-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ahf;
pub mod cli;
pub mod image;
pub mod pipeline;
pub mod scene;
pub mod synth;
