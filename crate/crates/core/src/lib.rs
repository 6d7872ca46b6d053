//! Aggregates labeled LiDAR sequences into dense world models and re-renders
//! them as new LiDAR frames under arbitrary cylindrical sensor
//! configurations, augmented poses and spin/ego-motion distortion.
//!
//! The hot path is [`pipeline::augment`]: sample a sensor, render each
//! cached [`WorldModel`] through a z-buffer, distort, mix by azimuth sector
//! and back-project into a labeled point cloud.

pub mod cloud;
pub mod distortion;
pub mod error;
pub mod io;
pub mod mixer;
pub mod pipeline;
pub mod pose;
pub mod render;
pub mod sampling;
pub mod sensor;
pub mod synth;
pub mod textcfg;
pub mod world;

pub use cloud::{ClassId, PointCloud, UNLABELED};
pub use distortion::{distort, DistortOptions, MotionParams};
pub use error::{Error, Result};
pub use mixer::{mix, Sector};
pub use pipeline::{augment, AugmentOutput, AugmentSpec};
pub use pose::Pose;
pub use render::{extract_cloud, render, RangeMap};
pub use sensor::{LidarConfig, Preset};
pub use world::WorldModel;

/// Environment variable that overrides the master seed of an augmentation.
pub const SEED_ENV: &str = "LIDOMAUG_SEED";
