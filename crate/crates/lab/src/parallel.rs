//! Rayon-parallel survey driver. Samples are pure functions of
//! `(body, index, seed, opts)`, so fanning out and aggregating in index
//! order reproduces the serial stats byte for byte.

use rayon::prelude::*;
use tame_opt_core::body::ConvexBody;
use tame_opt_core::harness::{aggregate_survey, survey_sample, DiagnoseOptions, SurveyStats};

pub fn survey_parallel(
    body: &ConvexBody,
    count: usize,
    seed: u64,
    opts: &DiagnoseOptions,
) -> SurveyStats {
    let samples: Vec<_> = (0..count)
        .into_par_iter()
        .map(|i| survey_sample(body, i, seed, opts))
        .collect();
    aggregate_survey(samples, seed)
}
