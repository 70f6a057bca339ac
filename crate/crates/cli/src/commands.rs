// SPDX-License-Identifier: Apache-2.0

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use dollar_game::engine::{run_realization, RunResult};
use dollar_game::ensemble::{
    estimate_crossover_from, run_ensemble_runs, sweep_runs_with, CellResult, EnsembleSummary, Executor,
};
use dollar_game::glmodel::{
    empirical_landscape, exponent_fit, fit_landscape, order_parameter_samples, stationary_points,
};
use dollar_game::io::{
    emit_heatmap, emit_landscape, emit_trajectory, read_json, write_csv, write_json, write_summary_csv,
    write_trajectory_csv, ConfigDocument, HeatmapSpec, JsonDocument, LandscapeCell, RunRow, JSON_SCHEMA_VERSION,
};
use dollar_game::phase::temperature_with;
use dollar_game::{SimulationConfig, TrajectoryDetail};

use crate::{Common, ConfigError, Format, PlotArgs, Switch};

fn load_config(path: Option<&Path>) -> Result<ConfigDocument> {
    let path = path.ok_or_else(|| ConfigError("missing --config".into()))?;
    let text = fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
    let doc = ConfigDocument::parse(&text).with_context(|| format!("in {}", path.display()))?;
    Ok(doc)
}

fn apply_flags(doc: &mut ConfigDocument, args: &Common) {
    if args.no_early_stop {
        doc.early_stop = false;
    }
    if let Some(s) = args.fundamental {
        doc.fundamental = s == Switch::On;
    }
}

fn single_config(doc: &ConfigDocument) -> Result<SimulationConfig> {
    Ok(doc.simulation_config()?)
}

fn executor(args: &Common) -> Result<Executor> {
    Ok(Executor::new(args.workers)?)
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok((path, BufWriter::new(file)))
}

fn finish(path: PathBuf, mut w: BufWriter<File>) -> Result<()> {
    w.flush().with_context(|| format!("writing {}", path.display()))?;
    println!("{}", path.display());
    Ok(())
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<()> {
    let (path, mut w) = create(dir, name)?;
    w.write_all(text.as_bytes()).with_context(|| format!("writing {}", path.display()))?;
    finish(path, w)
}

fn write_doc(dir: &Path, name: &str, doc: &JsonDocument) -> Result<()> {
    let (path, mut w) = create(dir, name)?;
    write_json(doc, &mut w).with_context(|| format!("writing {}", path.display()))?;
    finish(path, w)
}

fn write_rows(dir: &Path, rows: &[RunRow]) -> Result<()> {
    let (path, mut w) = create(dir, "runs.csv")?;
    write_csv(rows, &mut w).with_context(|| format!("writing {}", path.display()))?;
    finish(path, w)
}

fn write_summaries(dir: &Path, cells: &[CellResult], doc: &ConfigDocument) -> Result<()> {
    let (path, mut w) = create(dir, "summary.csv")?;
    write_summary_csv(cells, doc.temperature, &mut w).with_context(|| format!("writing {}", path.display()))?;
    finish(path, w)
}

fn heatmap_spec(doc: &ConfigDocument) -> HeatmapSpec {
    HeatmapSpec { x: doc.heatmap_x, y: doc.heatmap_y, temperature: doc.temperature }
}

fn write_heatmaps(dir: &Path, cells: &[CellResult], spec: &HeatmapSpec) -> Result<()> {
    for panel in emit_heatmap(cells, spec)? {
        write_text(dir, &format!("{}.svg", panel.file_stem()), &panel.svg)?;
    }
    Ok(())
}

fn run_title(run: &RunResult) -> String {
    format!("seed {}: {} after {} steps", run.seed, run.label, run.stop_step)
}

/// One realization seeded directly with `--seed`, full trajectory kept.
pub fn run(args: &Common) -> Result<()> {
    let mut doc = load_config(args.config.as_deref())?;
    apply_flags(&mut doc, args);
    let config = single_config(&doc)?.with_detail(TrajectoryDetail::Full);
    let result = run_realization(&config, args.seed)?;
    let trajectory = result.trajectory.as_ref().expect("full detail keeps the trajectory");
    match args.format {
        Format::Csv => {
            let row = RunRow::new(0, &config, &result, doc.temperature);
            write_rows(&args.out, &[row])?;
            let (path, mut w) = create(&args.out, "trajectory.csv")?;
            write_trajectory_csv(trajectory, &mut w)?;
            finish(path, w)?;
        }
        Format::Json => {
            let t = temperature_with(config.memory, config.n_agents, config.strategies, doc.temperature);
            write_doc(
                &args.out,
                "run.json",
                &JsonDocument::Run {
                    schema_version: JSON_SCHEMA_VERSION,
                    config: config.clone(),
                    temperature: t.value(),
                    run: result.clone(),
                },
            )?;
        }
    }
    let svg = emit_trajectory(&trajectory.prices, config.fundamental_price, &run_title(&result));
    write_text(&args.out, "trajectory.svg", &svg)
}

fn cell_of(summary: EnsembleSummary) -> CellResult {
    CellResult {
        config: summary.config.clone(),
        temperature: summary.temperature,
        summary: Some(summary),
        error: None,
    }
}

pub fn ensemble(args: &Common) -> Result<()> {
    let mut doc = load_config(args.config.as_deref())?;
    apply_flags(&mut doc, args);
    let config = single_config(&doc)?;
    let runs = run_ensemble_runs(&config, doc.realizations, args.seed, &executor(args)?)?;
    let summary = EnsembleSummary::from_runs(&config, args.seed, &runs);
    eprintln!(
        "f_spec {:.3}  f_fund {:.3}  f_undet {:.3}  f_abort {:.3}  T {:.4}",
        summary.f_spec, summary.f_fund, summary.f_undet, summary.f_abort, summary.temperature.value()
    );
    match args.format {
        Format::Csv => {
            let rows: Vec<RunRow> = runs
                .iter()
                .enumerate()
                .map(|(k, r)| RunRow::new(k as u64, &config, r, doc.temperature))
                .collect();
            write_rows(&args.out, &rows)?;
            write_summaries(&args.out, &[cell_of(summary)], &doc)
        }
        Format::Json => write_doc(
            &args.out,
            "summary.json",
            &JsonDocument::Ensemble { schema_version: JSON_SCHEMA_VERSION, summary },
        ),
    }
}

pub fn sweep(args: &Common) -> Result<()> {
    let mut doc = load_config(args.config.as_deref())?;
    apply_flags(&mut doc, args);
    let grid = doc.sweep_grid(args.seed);
    let results = sweep_runs_with(&grid, &executor(args)?)?;
    let cells: Vec<CellResult> = results.iter().map(|(c, _)| c.clone()).collect();
    for cell in &cells {
        if let Some(e) = &cell.error {
            eprintln!(
                "cell N={} m={} s={} lambda={} d={} failed: {e}",
                cell.config.n_agents, cell.config.memory, cell.config.strategies, cell.config.liquidity,
                cell.config.dividend
            );
        }
    }
    let spec = heatmap_spec(&doc);
    match args.format {
        Format::Csv => {
            let rows: Vec<RunRow> = results
                .iter()
                .flat_map(|(cell, runs)| {
                    runs.iter()
                        .enumerate()
                        .map(|(k, r)| RunRow::new(k as u64, &cell.config, r, doc.temperature))
                })
                .collect();
            write_rows(&args.out, &rows)?;
            write_summaries(&args.out, &cells, &doc)?;
        }
        Format::Json => write_doc(
            &args.out,
            "summary.json",
            &JsonDocument::Sweep { schema_version: JSON_SCHEMA_VERSION, heatmap: spec, cells: cells.clone() },
        )?,
    }
    write_heatmaps(&args.out, &cells, &spec)
}

/// Landscape fit per cell, then an exponent fit of `mean |o|` against
/// temperature across cells.
pub fn gl_fit(args: &Common) -> Result<()> {
    let mut doc = load_config(args.config.as_deref())?;
    apply_flags(&mut doc, args);
    let grid = doc.sweep_grid(args.seed);
    grid.validate()?;
    let exec = executor(args)?;
    let mut cells = Vec::new();
    let mut summaries = Vec::new();
    for config in grid.cells() {
        let config = config.with_detail(TrajectoryDetail::Full);
        let t = temperature_with(config.memory, config.n_agents, config.strategies, doc.temperature).value();
        let mut cell = LandscapeCell {
            config: config.clone(),
            temperature: t,
            samples: 0,
            landscape: None,
            fit: None,
            stationary: None,
            error: None,
        };
        let outcome = (|| -> dollar_game::Result<()> {
            let runs = run_ensemble_runs(&config, doc.realizations, args.seed, &exec)?;
            summaries.push(EnsembleSummary::from_runs(&config, args.seed, &runs));
            let samples = order_parameter_samples(&runs, config.burn_in, doc.gl_samples)?;
            cell.samples = samples.len();
            cell.landscape = Some(empirical_landscape(&samples, doc.gl_bins)?);
            let fit = fit_landscape(&samples, doc.gl_bins)?;
            cell.fit = Some(fit);
            cell.stationary = Some(stationary_points(fit.alpha, fit.beta)?);
            Ok(())
        })();
        if let Err(e) = outcome {
            eprintln!("cell N={} m={} s={}: {e}", config.n_agents, config.memory, config.strategies);
            cell.error = Some(e.to_string());
        }
        cells.push(cell);
    }

    let pairs: Vec<(f64, f64)> = summaries
        .iter()
        .filter_map(|s| {
            let t = temperature_with(s.config.memory, s.config.n_agents, s.config.strategies, doc.temperature);
            s.mean_abs_o.map(|o| (t.value(), o))
        })
        .collect();
    let t_max = pairs.iter().map(|p| p.0).fold(0.0, f64::max);
    let guess = estimate_crossover_from(&summaries).unwrap_or(1.1 * t_max);
    let (exponent, exponent_error) = match exponent_fit(&pairs, guess) {
        Ok(fit) => (Some(fit), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let document = JsonDocument::GlFit {
        schema_version: JSON_SCHEMA_VERSION,
        bins: doc.gl_bins,
        sample_mode: doc.gl_samples,
        cells,
        exponent,
        exponent_error,
    };
    write_doc(&args.out, "gl_fit.json", &document)?;
    write_plots(&args.out, &document, None)
}

fn write_landscapes(dir: &Path, cells: &[LandscapeCell]) -> Result<()> {
    for (k, cell) in cells.iter().enumerate() {
        if let Some(land) = &cell.landscape {
            let c = &cell.config;
            let title = format!("N={} m={} s={} lambda={} d={}", c.n_agents, c.memory, c.strategies, c.liquidity, c.dividend);
            write_text(dir, &format!("landscape_{k}.svg"), &emit_landscape(land, cell.fit.as_ref(), &title))?;
        }
    }
    Ok(())
}

fn write_plots(dir: &Path, document: &JsonDocument, axes: Option<&ConfigDocument>) -> Result<()> {
    match document {
        JsonDocument::Run { config, run, .. } => {
            let traj = run
                .trajectory
                .as_ref()
                .ok_or_else(|| ConfigError("run document has no trajectory".into()))?;
            write_text(dir, "trajectory.svg", &emit_trajectory(&traj.prices, config.fundamental_price, &run_title(run)))
        }
        JsonDocument::Ensemble { summary, .. } => {
            let spec = axes.map(heatmap_spec).unwrap_or_default();
            write_heatmaps(dir, &[cell_of(summary.clone())], &spec)
        }
        JsonDocument::Sweep { heatmap, cells, .. } => {
            let spec = axes.map(heatmap_spec).unwrap_or(*heatmap);
            write_heatmaps(dir, cells, &spec)
        }
        JsonDocument::GlFit { cells, .. } => write_landscapes(dir, cells),
    }
}

pub fn plot(args: &PlotArgs) -> Result<()> {
    let file = File::open(&args.input).with_context(|| format!("opening {}", args.input.display()))?;
    let document = read_json(std::io::BufReader::new(file)).with_context(|| format!("reading {}", args.input.display()))?;
    let axes = match &args.config {
        Some(p) => Some(load_config(Some(p))?),
        None => None,
    };
    write_plots(&args.out, &document, axes.as_ref())
}
