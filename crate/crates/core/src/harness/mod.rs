//! File formats, command implementations and the error-rate experiments.

mod commands;
mod data;
mod experiments;
mod network;

pub use commands::{
    cmd_detect, cmd_discover, cmd_score, cmd_simulate, parse_diagram_list, DiscoverArgs, DiscoverOutput, SimulateArgs,
};
pub use data::{infer_variables, load_manifest, parse_dataset, write_dataset, LoadedManifest, Manifest};
pub use experiments::{
    evaluate_claims, og_claim_experiment, og_claim_run, reports_to_tsv, run_seed, type_error_experiment,
    type_error_run, ClaimTally, OgClaimReport, RunConfig, TypeErrorReport, TypeErrorRun, VariableTally,
};
pub use network::{benchmark_network, load_network, parse_network, write_network};
