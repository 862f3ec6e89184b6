//! Tooling for putting NeRF renders into VFX shots.
//!
//! * [`xform`]: affine matrix algebra and camera-to-proxy alignment.
//! * [`fov`]: per-frame vertical field of view from lens and sensor data.
//! * [`interchange`]: the versioned scene export read from the 3D editor.
//! * [`pathgen`]: renderer camera paths built from a scene export.
//! * [`compositor`]: accumulation-as-alpha, over, shadow, and PNG sequences.
//! * [`cli`]: the `nerf-vfx` command line.
//!
//! The guide in `book/` walks through each of these; its code listings are
//! compiled and run as doc-tests of this crate.

pub mod cli;
pub mod compositor;
pub mod fov;
mod fsio;
pub mod interchange;
pub mod pathgen;
pub mod xform;

pub use fsio::write_atomic;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/alignment.md")]
    mod alignment {}
    #[doc = include_str!("../../../book/src/field-of-view.md")]
    mod field_of_view {}
    #[doc = include_str!("../../../book/src/interchange.md")]
    mod interchange {}
    #[doc = include_str!("../../../book/src/camera-paths.md")]
    mod camera_paths {}
    #[doc = include_str!("../../../book/src/compositing.md")]
    mod compositing {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
