//! Configuration files, rating matrices and result files.

pub mod config;
pub mod matrix;
pub mod movielens;
pub mod output;

pub use config::{load_config, parse_config, ExperimentConfig};
pub use matrix::{load_rating_matrix, synthetic_rating_matrix, RatingMatrix, DEFAULT_NOISE_SD};
pub use movielens::movielens_experiment;
pub use output::write_results;
