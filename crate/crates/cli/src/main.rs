//! `dcoal`: command-line runner for distinguished-coalescent experiments.
//!
//! Every subcommand writes JSON (with the resolved configuration embedded
//! under `config`) or CSV; see `docs/csv-schema.md` for the CSV columns.
//! Exit codes: 0 success, 2 usage or parse error, 3 quadrature subdivision
//! cap exceeded, 1 any other failure.

mod args;
mod commands;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{
    BridgeTestArgs, CdiCheckArgs, DualityArgs, FixationArgs, GfviArgs, RatesArgs, SimulateArgs,
};

#[derive(Debug, Parser)]
#[command(name = "dcoal", version, about = "Distinguished coalescent experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tables of the rates λ_{b,k} and r_{b,k}.
    ///
    /// CSV columns: b,k,lambda,r (lambda is empty for k = 1).
    Rates(RatesArgs),
    /// Coalescent trajectories of Π⁰|[n] started from singletons.
    ///
    /// CSV columns: t,count for one replica, replica,t,count otherwise;
    /// count is the number of blocks not containing 0.
    Simulate(SimulateArgs),
    /// Coming-down-from-infinity verdict with numerical evidence.
    ///
    /// CSV columns: window,q_lo,q_hi,increment,ratio,raabe.
    CdiCheck(CdiCheckArgs),
    /// Monte-Carlo fixation time and the series bound on its mean.
    ///
    /// CSV columns: replica,zeta.
    Fixation(FixationArgs),
    /// Forward GFVI trajectory.
    ///
    /// CSV columns: t,w0,lebesgue,atoms,mean (atoms is the atom count).
    Gfvi(GfviArgs),
    /// Monte-Carlo check of the coalescent/GFVI moment duality.
    ///
    /// CSV columns: p,f,t,replicas,seed,lhs,lhs_se,rhs,rhs_se,z_score.
    Duality(DualityArgs),
    /// Bridge composition against coagulation of paint-box partitions.
    ///
    /// CSV columns: partition,composite,coagulated,exact.
    BridgeTest(BridgeTestArgs),
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<dcoal::Error>() {
        Some(dcoal::Error::Parse(_) | dcoal::Error::InvalidMeasure(_)) => 2,
        Some(dcoal::Error::QuadratureCap { .. }) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Rates(a) => commands::rates(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::CdiCheck(a) => commands::cdi_check(a),
        Command::Fixation(a) => commands::fixation(a),
        Command::Gfvi(a) => commands::gfvi(a),
        Command::Duality(a) => commands::duality(a),
        Command::BridgeTest(a) => commands::bridge_test(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_kinds_map_to_exit_codes() {
        let code = |e: dcoal::Error| exit_code(&anyhow::Error::new(e));
        assert_eq!(code(dcoal::Error::Parse("x".into())), 2);
        assert_eq!(code(dcoal::Error::QuadratureCap { limit: 10, error: 1.0 }), 3);
        assert_eq!(code(dcoal::Error::InfiniteIntensity("x".into())), 1);
        assert_eq!(exit_code(&anyhow::anyhow!("io")), 1);
    }

    #[test]
    fn command_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
