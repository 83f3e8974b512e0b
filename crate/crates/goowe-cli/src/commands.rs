//! The four subcommands: generate, run, compare, stats.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use goowe::eval::{test_then_train, EvalOptions, RunTrace};
use goowe::instance::{AttributeKind, FeatureValue};
use goowe::stats::{friedman, wilcoxon_signed_rank, ResultMatrix};
use goowe::streams::StreamSource;

use crate::descriptor::{
    EnsembleSection, EvalSection, RunDescriptor, StreamSection, SuiteDescriptor,
};
use crate::spec;

/// Write `count` instances of a synthetic stream to CSV plus a JSON schema
/// sidecar. Same spec and seed always produce identical files.
pub fn generate(stream_spec: &str, count: u64, seed: u64, out: &Path) -> Result<()> {
    let mut stream = spec::build_stream(stream_spec, seed, Some(count))?;
    let schema = stream.schema().clone();

    let schema_path = spec::sidecar_schema_path(out);
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(&schema_path, serde_json::to_string_pretty(schema.as_ref())?)?;

    let mut file = std::io::BufWriter::new(fs::File::create(out)?);
    for _ in 0..count {
        let Some(inst) = stream.next_instance()? else {
            break;
        };
        let mut row = String::new();
        for (value, attr) in inst.features.iter().zip(schema.attributes()) {
            match (value, &attr.kind) {
                (FeatureValue::Numeric(v), _) => row.push_str(&format!("{v}")),
                (FeatureValue::Nominal(v), AttributeKind::Nominal { values }) => {
                    row.push_str(&values[*v as usize])
                }
                (FeatureValue::Nominal(v), AttributeKind::Numeric) => row.push_str(&v.to_string()),
            }
            row.push(',');
        }
        row.push_str(&schema.classes()[inst.label]);
        row.push('\n');
        file.write_all(row.as_bytes())?;
    }
    file.flush()?;
    println!(
        "wrote {count} instances of '{stream_spec}' (seed {seed}) to {} (+ {})",
        out.display(),
        schema_path.display()
    );
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RunSummary {
    pub ensemble: String,
    pub stream: String,
    pub seed: u64,
    pub instances: u64,
    pub aggregate_accuracy_pct: f64,
    pub max_memory_mb: f64,
    /// Overall throughput in centiseconds per thousand instances.
    pub time_cs_per_1k: f64,
    pub wall_time_s: f64,
    pub config_hash: String,
}

impl RunSummary {
    fn from_trace(trace: &RunTrace, config_hash: String) -> Self {
        RunSummary {
            ensemble: trace.ensemble.clone(),
            stream: trace.stream.clone(),
            seed: trace.seed,
            instances: trace.instances,
            aggregate_accuracy_pct: trace.aggregate_accuracy_pct,
            max_memory_mb: trace.max_memory_mb,
            time_cs_per_1k: trace.wall_time_s * 100.0 * 1000.0 / trace.instances as f64,
            wall_time_s: trace.wall_time_s,
            config_hash,
        }
    }
}

fn open_stream(desc: &RunDescriptor) -> Result<Box<dyn StreamSource<f64>>> {
    match (&desc.stream.spec, &desc.stream.path) {
        (Some(spec), None) => spec::build_stream(spec, desc.stream.seed, desc.stream.count),
        (None, Some(path)) => spec::open_data_file(path, desc.stream.schema.as_deref()),
        _ => bail!("stream needs exactly one of spec or path"),
    }
}

/// Execute one run and write `<base>.trace.csv` and `<base>.summary.json`.
pub fn run(desc: &RunDescriptor, out_dir: &Path) -> Result<RunSummary> {
    desc.validate()?;
    let mut stream = open_stream(desc)?;
    let schema = stream.schema().clone();
    let mut classifier = spec::build_classifier(&desc.ensemble.spec, schema)?;
    let opts = EvalOptions {
        report_interval: desc.eval.report_every,
        max_instances: desc.stream.count,
    };
    let trace = test_then_train(
        classifier.as_mut(),
        stream.as_mut(),
        &opts,
        &desc.run_name(),
        &desc.stream_name(),
        desc.stream.seed,
    )?;

    fs::create_dir_all(out_dir)?;
    let base = format!(
        "{}__{}__s{}",
        spec::sanitize(&desc.run_name()),
        spec::sanitize(&desc.stream_name()),
        desc.stream.seed
    );
    let trace_path = out_dir.join(format!("{base}.trace.csv"));
    trace.write_csv(fs::File::create(&trace_path)?)?;
    let summary = RunSummary::from_trace(&trace, desc.config_hash());
    let summary_path = out_dir.join(format!("{base}.summary.json"));
    fs::write(&summary_path, serde_json::to_string_pretty(&summary)?)?;
    Ok(summary)
}

fn cell_descriptor(
    suite: &SuiteDescriptor,
    ensemble: &str,
    stream: &str,
    seed: u64,
) -> RunDescriptor {
    RunDescriptor {
        name: Some(ensemble.to_string()),
        ensemble: EnsembleSection {
            spec: ensemble.to_string(),
        },
        stream: StreamSection {
            spec: Some(stream.to_string()),
            path: None,
            schema: None,
            seed,
            count: Some(suite.count),
        },
        eval: EvalSection {
            report_every: suite.report_every,
        },
    }
}

/// Run every (ensemble, stream, seed) combination, write one trace per run
/// and matrix CSVs of per-cell means. Returns false when any run failed
/// (failed cells are written as `NA`).
pub fn compare(
    suite: &SuiteDescriptor,
    out_dir: &Path,
    resume: bool,
    threads: Option<usize>,
) -> Result<bool> {
    suite.validate()?;
    let runs_dir = out_dir.join("runs");
    fs::create_dir_all(&runs_dir)?;

    struct Job {
        ensemble: String,
        stream: String,
        seed: u64,
        desc: RunDescriptor,
    }
    let mut jobs = Vec::new();
    for stream in &suite.streams {
        for ensemble in &suite.ensembles {
            for &seed in &suite.seeds {
                jobs.push(Job {
                    ensemble: ensemble.clone(),
                    stream: stream.clone(),
                    seed,
                    desc: cell_descriptor(suite, ensemble, stream, seed),
                });
            }
        }
    }

    let worker_count = threads
        .unwrap_or_else(|| {
            std::thread::available_parallelism().map_or(1, |n| n.get().saturating_sub(1))
        })
        .max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count)
        .build()
        .map_err(|e| anyhow!("thread pool: {e}"))?;

    let results: Vec<Result<RunSummary>> = pool.install(|| {
        use rayon::prelude::*;
        jobs.par_iter()
            .map(|job| {
                let base = format!(
                    "{}__{}__s{}",
                    spec::sanitize(&job.ensemble),
                    spec::sanitize(&job.stream),
                    job.seed
                );
                let summary_path = runs_dir.join(format!("{base}.summary.json"));
                if resume {
                    if let Ok(text) = fs::read_to_string(&summary_path) {
                        if let Ok(prev) = serde_json::from_str::<RunSummary>(&text) {
                            if prev.config_hash == job.desc.config_hash() {
                                return Ok(prev);
                            }
                        }
                    }
                }
                run(&job.desc, &runs_dir)
            })
            .collect()
    });

    // Deterministic reduce in job order: mean over seeds per cell.
    let n_seeds = suite.seeds.len();
    let mut all_ok = true;
    let mut accuracy = Vec::new();
    let mut time = Vec::new();
    let mut memory = Vec::new();
    let mut idx = 0;
    for stream in &suite.streams {
        let mut acc_row = Vec::new();
        let mut time_row = Vec::new();
        let mut mem_row = Vec::new();
        for ensemble in &suite.ensembles {
            let mut acc = 0.0;
            let mut cs = 0.0;
            let mut mb = 0.0;
            let mut ok = 0usize;
            for _ in 0..n_seeds {
                match &results[idx] {
                    Ok(summary) => {
                        acc += summary.aggregate_accuracy_pct;
                        cs += summary.time_cs_per_1k;
                        mb += summary.max_memory_mb;
                        ok += 1;
                    }
                    Err(err) => {
                        eprintln!("run failed ({ensemble} on {stream}): {err:#}");
                        all_ok = false;
                    }
                }
                idx += 1;
            }
            if ok == n_seeds {
                acc_row.push(Some(acc / n_seeds as f64));
                time_row.push(Some(cs / n_seeds as f64));
                mem_row.push(Some(mb / n_seeds as f64));
            } else {
                acc_row.push(None);
                time_row.push(None);
                mem_row.push(None);
            }
        }
        accuracy.push(acc_row);
        time.push(time_row);
        memory.push(mem_row);
    }

    write_matrix(&out_dir.join("accuracy.csv"), suite, &accuracy)?;
    write_matrix(&out_dir.join("time.csv"), suite, &time)?;
    write_matrix(&out_dir.join("memory.csv"), suite, &memory)?;
    println!(
        "suite '{}': {} runs, matrices in {}",
        suite.name.clone().unwrap_or_else(|| "unnamed".into()),
        jobs.len(),
        out_dir.display()
    );
    Ok(all_ok)
}

fn write_matrix(path: &Path, suite: &SuiteDescriptor, cells: &[Vec<Option<f64>>]) -> Result<()> {
    let file = fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
    let mut w = csv::Writer::from_writer(file);
    let mut header = vec!["dataset".to_string()];
    header.extend(suite.ensembles.iter().cloned());
    w.write_record(&header)?;
    for (stream, row) in suite.streams.iter().zip(cells) {
        let mut record = vec![stream.clone()];
        record.extend(row.iter().map(|cell| match cell {
            Some(v) => format!("{v:.3}"),
            None => "NA".to_string(),
        }));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Friedman test over a matrix CSV; prints average ranks and statistics.
pub fn stats_friedman(matrix_path: &PathBuf, lower_is_better: bool) -> Result<()> {
    let matrix = ResultMatrix::from_csv_path(matrix_path)?;
    let report = friedman(&matrix, !lower_is_better)?;
    println!(
        "Friedman test over {} algorithms x {} datasets",
        matrix.algorithms().len(),
        matrix.datasets().len()
    );
    let direction = if report.higher_is_better {
        "higher average rank = better"
    } else {
        "lower average rank = better"
    };
    println!("average ranks ({direction}):");
    for (name, rank) in report.algorithms.iter().zip(&report.average_ranks) {
        println!("  {name:<12} {rank:.3}");
    }
    println!(
        "chi-square = {:.3} (p = {:.3e})",
        report.chi_square, report.chi_square_p
    );
    println!(
        "F = {:.3} with ({}, {}) dof (p = {:.3e})",
        report.f_statistic, report.f_dof.0, report.f_dof.1, report.f_p
    );
    match report.nemenyi_cd {
        Some(cd) => println!("Nemenyi critical difference (alpha = 0.05): {cd:.3}"),
        None => println!("Nemenyi critical difference: not tabulated for this k"),
    }
    Ok(())
}

/// Wilcoxon signed-rank test between two algorithm columns.
pub fn stats_wilcoxon(matrix_path: &PathBuf, first: &str, second: &str) -> Result<()> {
    let matrix = ResultMatrix::from_csv_path(matrix_path)?;
    let lookup = |name: &str| {
        matrix.column(name).ok_or_else(|| {
            anyhow!(
                "no column '{name}'; available: {}",
                matrix.algorithms().join(", ")
            )
        })
    };
    let a = lookup(first)?;
    let b = lookup(second)?;
    let report = wilcoxon_signed_rank(&a, &b)?;
    println!(
        "Wilcoxon signed-rank: {first} vs {second} over {} pairs",
        report.n_used
    );
    println!("positive differences: {}", report.positive);
    println!("negative differences: {}", report.negative);
    println!("T = {:.1}", report.t_statistic);
    println!(
        "two-tailed p = {:.4} ({})",
        report.p_two_tailed,
        if report.exact {
            "exact"
        } else {
            "normal approximation"
        }
    );
    Ok(())
}
