//! Rotor blade vibration analysis toolkit.
//!
//! Detects defective rotor blades from dual-sensor vibration recordings:
//! CSV ingestion and windowing, time/frequency feature extraction (time
//! statistics, STFT, wavelet packet energies, spectral moments),
//! leakage-safe preparation (stratified split, standardization, PCA), four
//! native classifiers (decision tree, random forest, kNN, SVM), study
//! runners with machine-readable reports, and a seeded synthetic corpus
//! generator for end-to-end testing at desk scale.
//!
//! The numeric core is generic over the scalar type via [`Scalar`]
//! (`f32` or `f64`); the aliases below pin the common `f64` instantiation.

pub mod analysis;
pub mod features;
pub mod ingest;
pub mod matrix;
pub mod models;
pub mod pipeline;
pub mod scalar;
pub mod seed;
pub mod synth;

pub use scalar::Scalar;

/// Default scalar for the shipped pipeline.
pub type Real = f64;

pub type Matrix64 = matrix::Matrix<f64>;
pub type Window64 = ingest::Window<f64>;
pub type WindowPair64 = ingest::WindowPair<f64>;
pub type FeatureVector64 = features::FeatureVector<f64>;
pub type Dataset64 = pipeline::Dataset<f64>;
pub type Scaler64 = pipeline::Scaler<f64>;
pub type PcaModel64 = pipeline::PcaModel<f64>;
pub type TrainedModel64 = models::TrainedModel<f64>;
pub type ModelBundle64 = models::ModelBundle<f64>;
pub type RotorProfile64 = synth::RotorProfile<f64>;

pub type Matrix32 = matrix::Matrix<f32>;
pub type Dataset32 = pipeline::Dataset<f32>;
pub type TrainedModel32 = models::TrainedModel<f32>;
