use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use tank_core::analysis::{impulse_response_comb, transfer_closed_form, transfer_resolvent_oracle, transfer_series};
use tank_core::{Complex64, PhysicalParams};

use crate::{load, Failure, Source};

/// Physical parameters from a config or preset, experiment1 by default.
#[derive(Args)]
pub struct ParamSource {
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
}

impl ParamSource {
    fn params(&self) -> Result<PhysicalParams, Failure> {
        let source = Source {
            config: self.config.clone(),
            preset: Some(self.preset.clone().unwrap_or_else(|| "experiment1".into())),
        };
        Ok(load(&source)?.params)
    }
}

#[derive(Args)]
pub struct TransferArgs {
    #[command(flatten)]
    source: ParamSource,
    /// Real parts of the lambda grid.
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 1.0, 10.0])]
    re: Vec<f64>,
    /// Imaginary parts of the lambda grid.
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 1.0, 10.0, 100.0])]
    im: Vec<f64>,
    /// Extra lambda samples drawn uniformly from [0.1, 10] x [-50, 50].
    #[arg(long, default_value_t = 0)]
    random: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Modal series terms.
    #[arg(long, default_value_t = 10_000)]
    terms: usize,
    /// Nodes of the boundary-value oracle.
    #[arg(long, default_value_t = 10_000)]
    oracle_points: usize,
    /// CSV destination (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct ImpulseArgs {
    #[command(flatten)]
    source: ParamSource,
    /// Number of atoms after the one at the origin.
    #[arg(long, default_value_t = 200)]
    terms: usize,
    /// CSV destination (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn transfer(args: &TransferArgs) -> Result<(), Failure> {
    let p = args.source.params()?;
    let mut lambdas: Vec<Complex64> = args
        .re
        .iter()
        .flat_map(|&re| args.im.iter().map(move |&im| Complex64::new(re, im)))
        .collect();
    let mut rng = StdRng::seed_from_u64(args.seed);
    for _ in 0..args.random {
        lambdas.push(Complex64::new(rng.gen_range(0.1..10.0), rng.gen_range(-50.0..50.0)));
    }

    let mut csv = String::from(
        "re,im,closed_re,closed_im,series_re,series_im,oracle_re,oracle_im,series_rel_err,oracle_rel_err,oracle_sum_trace\n",
    );
    let mut worst = (0.0f64, 0.0f64);
    for lambda in lambdas {
        let exact = transfer_closed_form(lambda, &p)?;
        let series = transfer_series(lambda, args.terms, &p)?;
        let oracle = transfer_resolvent_oracle(lambda, &p, args.oracle_points)?;
        let (es, eo) = (series.relative_error(&exact), oracle.h.relative_error(&exact));
        worst = (worst.0.max(es), worst.1.max(eo));
        writeln!(
            csv,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            lambda.re,
            lambda.im,
            exact.value.re,
            exact.value.im,
            series.value.re,
            series.value.im,
            oracle.h.value.re,
            oracle.h.value.im,
            es,
            eo,
            oracle.sum_trace.norm()
        )
        .expect("writing to a String");
    }
    emit(&args.out, &csv)?;
    eprintln!("max relative error: series {:.3e}, oracle {:.3e}", worst.0, worst.1);
    Ok(())
}

pub fn impulse(args: &ImpulseArgs) -> Result<(), Failure> {
    let p = args.source.params()?;
    let comb = impulse_response_comb(&p, args.terms);
    let mut csv = String::from("k,location,weight\n");
    for (k, (x, w)) in comb.atoms.iter().enumerate() {
        writeln!(csv, "{k},{x:.16e},{w:.16e}").expect("writing to a String");
    }
    emit(&args.out, &csv)?;
    let tv = comb.total_variation();
    let truncated = comb.truncated_closed_form();
    eprintln!("atoms               {}", comb.atoms.len());
    eprintln!("total variation     {tv:.16e}");
    eprintln!("geometric (K terms) {truncated:.16e}  relative gap {:.3e}", (tv - truncated).abs() / truncated);
    eprintln!("geometric (all)     {:.16e}", comb.total_variation_closed_form());
    eprintln!("tail beyond K       {:.16e}", comb.tail_variation());
    Ok(())
}
