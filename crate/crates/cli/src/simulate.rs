use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use serde_json::json;
use tank_core::closed_loop::Snapshot;
use tank_core::{run_models, validate_trace, write_csv, ExperimentConfig, TraceRecord};

use crate::{plots, Failure};

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Runtime(format!("{}: {e}", path.display()))
}

/// `t_requested,t,zeta,height,velocity`, one row per node and snapshot.
fn snapshots_csv(snapshots: &[Snapshot]) -> String {
    let mut out = String::from("t_requested,t,zeta,height,velocity\n");
    for s in snapshots {
        let n = s.field.len();
        for i in 0..n {
            let zeta = i as f64 / (n - 1) as f64;
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                s.requested, s.field.t, zeta, s.field.first[i], s.field.second[i]
            )
            .expect("writing to a String");
        }
    }
    out
}

pub fn simulate(cfg: &ExperimentConfig, source: &str, out: &Path, with_plots: bool) -> Result<(), Failure> {
    let loop_cfg = cfg.to_closed_loop_config()?;
    fs::create_dir_all(out).map_err(|e| io_failure(out, e))?;

    let models = cfg.model.models();
    let start = Instant::now();
    let results = run_models(&loop_cfg, &models);
    let wall = start.elapsed().as_secs_f64();

    let mut records: Vec<TraceRecord> = Vec::new();
    let mut runs = Vec::new();
    let mut failures = Vec::new();
    for (model, result) in models.iter().zip(results) {
        let record = match result.and_then(|r| validate_trace(&r.rows).map(|_| r)) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("{}: {e}", model.name());
                failures.push(json!({
                    "model": model.name(),
                    "error": e.to_string(),
                    "t": e.failure_time(),
                }));
                continue;
            }
        };
        let trace = out.join(format!("trace_{}.csv", model.name()));
        write_csv(&trace, &record.rows)?;
        if !record.snapshots.is_empty() {
            let path = out.join(format!("snapshots_{}.csv", model.name()));
            fs::write(&path, snapshots_csv(&record.snapshots)).map_err(|e| io_failure(&path, e))?;
        }
        let s = record.summary();
        println!(
            "{:<9} margin {:.6e}  max|u| {:.6e}  max k0 {:.4}  max k1 {:.4}  final|e| {:.6e}  mass drift {:.3e}",
            model.name(),
            s.funnel_margin,
            s.max_abs_u,
            s.max_k0,
            s.max_k1,
            s.final_abs_e,
            s.mass_drift
        );
        runs.push(serde_json::to_value(s).expect("summary serializes"));
        records.push(record);
    }

    let summary = json!({
        "source": source,
        "time_points": cfg.time_points,
        "space_points": loop_cfg.grid.n_points(),
        "dt": loop_cfg.dt,
        "horizon": cfg.horizon,
        "wall_clock_seconds": wall,
        "runs": runs,
        "failures": failures,
    });
    let path = out.join("summary.json");
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    fs::write(&path, text + "\n").map_err(|e| io_failure(&path, e))?;

    if with_plots && !records.is_empty() {
        plots::emit_plots(&records, &loop_cfg, out).map_err(Failure::Runtime)?;
    }
    println!("wrote {} ({wall:.2} s)", out.display());

    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Runtime(format!("{} of {} runs failed", failures.len(), models.len())))
    }
}
