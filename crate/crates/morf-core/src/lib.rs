//! Mean Oriented Riesz Features (MORF) for subtle-motion classification.
//!
//! Pipeline: grayscale sequences pass through an invertible Laplacian
//! pyramid, each subband through an approximate Riesz transform into
//! quaternionic phase, which is temporally filtered, averaged over the
//! onset..apex window into a mean oriented image pair, and histogrammed
//! into grid descriptors. A one-vs-all polynomial SVM with
//! leave-one-subject-out evaluation closes the loop.

pub mod dataset;
pub mod error;
pub mod frame;
pub mod io;
pub mod morf;
pub mod pyramid;
pub mod riesz;
pub mod svm;
pub mod synth;

pub use dataset::{load_manifest, load_sequence, loso_splits, DatasetManifest, SequenceAnnotation};
pub use error::{MorfError, Result};
pub use frame::GrayFrame;
pub use morf::{
    extract_morf, grid_histogram, magnitude_orientation, mean_oriented_riesz, AmplifyMode,
    MorPair, MorfDescriptor, MorfParams,
};
pub use pyramid::{build_pyramid, collapse_pyramid, ImagePyramid};
pub use riesz::{
    amplify_phase, amplify_phase_linear, extract_quat_phase, filter_phase_sequence,
    monogenic_from_spherical, phase_difference, riesz_transform, AmplitudeField, MonogenicLevel,
    QuatPhaseField, TemporalFilterConfig,
};
pub use svm::{
    evaluate_loso_features, feature_set_from_rows, grid_search, macro_f1, predict, train_svm,
    FeatureSet, FoldRecord, GridSpec, KernelParams, Metrics, SvmModel,
};
pub use synth::{
    annulus_bandpass, make_motion_dataset, render_bandpassed_noise, render_circle_sequence,
    spectral_riesz_oracle, MotionClass, MotionDatasetSpec, SyntheticSpec,
};
