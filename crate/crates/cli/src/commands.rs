//! Subcommand handlers.

use std::fs;
use std::io::Write;
use std::path::Path;

use clap::{Args, ValueEnum};
use serde::Deserialize;
use serde_json::json;

use rds_ss::estimators::{mu_mean, mu_vh};
use rds_ss::harness::{self, presets, run_study, Scenario};
use rds_ss::netgen::{graph_descriptors, sample_mixing_graph, NetParams};
use rds_ss::rds_sim::{run_rds, RdsDesign, SeedRegime};
use rds_ss::ss::{estimate as ss_estimate, fit_ss, mu_from_fit, sensitivity_sweep, Method};
use rds_ss::{stream, RealSample, SimConfig};

use crate::errors::{CliError, CliResult};
use crate::formats;
use crate::manifest::RunManifest;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Ss,
    Vh,
    Mean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    Random,
    AllInfected,
    AllUninfected,
}

impl From<RegimeArg> for SeedRegime {
    fn from(r: RegimeArg) -> Self {
        match r {
            RegimeArg::Random => Self::Random,
            RegimeArg::AllInfected => Self::AllInfected,
            RegimeArg::AllUninfected => Self::AllUninfected,
        }
    }
}

/// Fitting knobs shared by the estimation commands.
#[derive(Debug, Args)]
pub struct FitArgs {
    /// Monte-Carlo replicates M per inclusion-probability estimate.
    #[arg(long, default_value_t = 2000)]
    pub trials: usize,

    /// Fixed-point iterations r.
    #[arg(long, default_value_t = 3)]
    pub iterations: usize,

    /// Master 64-bit seed; omitted means a logged random seed.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Disable the isotonic (monotone-in-degree) cleanup of estimated
    /// inclusion maps.
    #[arg(long)]
    pub no_isotonic: bool,
}

/// Explicit seed, or a fresh random one (logged so the run can be
/// reproduced).
pub fn resolve_seed(seed: Option<u64>) -> u64 {
    match seed {
        Some(s) => s,
        None => {
            let s: u64 = rand::random();
            log::info!("no --seed given; using random seed {s}");
            eprintln!("seed: {s}");
            s
        }
    }
}

fn fit_config(fit: &FitArgs, seed: u64) -> SimConfig {
    SimConfig {
        trials: fit.trials,
        iterations: fit.iterations,
        seed,
        isotonic: !fit.no_isotonic,
        converge_tol: None,
    }
}

fn check_sample(
    sample: RealSample,
    population: Option<usize>,
    repair: bool,
) -> CliResult<(RealSample, Vec<String>)> {
    let (sample, repairs) = if repair {
        let (s, r) = sample.repaired(population);
        (s, r.iter().map(|x| x.to_string()).collect())
    } else {
        (sample, Vec::new())
    };
    let violations = sample.validate(population);
    if !violations.is_empty() {
        let msgs: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(CliError::validation(format!(
            "invalid sample ({} violations):\n  {}",
            msgs.len(),
            msgs.join("\n  ")
        )));
    }
    Ok((sample, repairs))
}

fn degree_scale_warnings(sample: &RealSample, population: Option<usize>) -> Vec<String> {
    let mut warnings = Vec::new();
    if let Some(pop) = population {
        let max_degree = sample.degrees().max().unwrap_or(0);
        if (max_degree as f64) >= (pop as f64).sqrt() {
            warnings.push(format!(
                "max degree {max_degree} >= sqrt(assumed population {pop}); \
                 the configuration-model approximation degrades"
            ));
        }
    }
    warnings
}

pub fn estimate(
    input: &Path,
    method: MethodArg,
    population_size: Option<usize>,
    fit: &FitArgs,
    repair: bool,
    out_dir: Option<&Path>,
) -> CliResult<()> {
    let seed = resolve_seed(fit.seed);
    let config = fit_config(fit, seed);
    let (sample, repairs) = check_sample(formats::read_sample(input)?, population_size, repair)?;
    if sample.is_empty() {
        return Err(CliError::validation("sample file contains no records"));
    }

    let mut diagnostics = json!({ "repairs": repairs });
    let est: rds_ss::RealEstimate = match method {
        MethodArg::Mean => ss_estimate(&sample, Method::Mean, None, &config)?,
        MethodArg::Vh => ss_estimate(&sample, Method::Vh, None, &config)?,
        MethodArg::Ss => {
            let population = population_size
                .ok_or_else(|| CliError::validation("method ss requires --population-size"))?;
            let fitted = fit_ss(&sample, population, &config)?;
            diagnostics["moment_residual"] = json!(fitted.moment_residual);
            diagnostics["iterations_run"] = json!(fitted.iterations_run);
            diagnostics["warnings"] = json!(degree_scale_warnings(&sample, Some(population)));
            rds_ss::Estimate {
                value: mu_from_fit(&sample, &fitted)?,
                method: Method::Ss,
                assumed_population: Some(population),
                config: config.clone(),
            }
        }
    };

    let manifest = RunManifest::new(
        "estimate",
        seed,
        json!({
            "input": input.display().to_string(),
            "method": est.method,
            "population_size": est.assumed_population,
            "repair": repair,
            "config": config,
        }),
    );
    let report = json!({
        "method": est.method,
        "estimate": est.value,
        "n": sample.n(),
        "assumed_N": est.assumed_population,
        "config": est.config,
        "diagnostics": diagnostics,
        "manifest_hash": manifest.hash,
    });
    let pretty = serde_json::to_string_pretty(&report).expect("report serializes");
    println!("{pretty}");
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("estimate.json"), pretty + "\n")?;
        manifest.write(dir)?;
    }
    Ok(())
}

fn parse_grid(spec: &str) -> CliResult<Vec<usize>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [min, max, points] = parts.as_slice() else {
        return Err(CliError::validation(format!(
            "grid must be min:max:points, got {spec}"
        )));
    };
    let min: usize = min
        .parse()
        .map_err(|e| CliError::validation(format!("bad grid min: {e}")))?;
    let max: usize = max
        .parse()
        .map_err(|e| CliError::validation(format!("bad grid max: {e}")))?;
    let points: usize = points
        .parse()
        .map_err(|e| CliError::validation(format!("bad grid points: {e}")))?;
    if points == 0 || max < min {
        return Err(CliError::validation(
            "grid needs max >= min and points >= 1",
        ));
    }
    let mut grid: Vec<usize> = if points == 1 {
        vec![min]
    } else {
        (0..points)
            .map(|i| min + (max - min) * i / (points - 1))
            .collect()
    };
    grid.dedup();
    Ok(grid)
}

fn write_sensitivity_csv<W: Write>(
    mut w: W,
    sweep: &[(usize, rds_ss::RealEstimate)],
    mean: f64,
    vh: f64,
    tag: &str,
) -> CliResult<()> {
    writeln!(w, "# manifest {tag}")?;
    writeln!(w, "assumed_N,method,estimate")?;
    for (population, est) in sweep {
        writeln!(w, "{population},ss,{}", est.value)?;
    }
    writeln!(w, ",mean,{mean}")?;
    writeln!(w, ",vh,{vh}")?;
    Ok(())
}

pub fn sensitivity(
    input: Option<&Path>,
    grid: Option<&str>,
    preset: Option<&str>,
    fit: &FitArgs,
    repair: bool,
    out_dir: Option<&Path>,
) -> CliResult<()> {
    let seed = resolve_seed(fit.seed);

    let (sample, grid, config, fixture, manifest_config) = match preset {
        Some(name) => {
            let scale = parse_scale(name, "fig6")?;
            let p = presets::fig6(scale);
            let graph = sample_mixing_graph(&p.net, &mut stream::rng(seed, &[100]))?;
            let run = run_rds(&graph, &p.design, &mut stream::rng(seed, &[101]))?;
            if run.exhausted {
                log::warn!(
                    "preset referral process exhausted at n = {}",
                    run.sample.n()
                );
            }
            let config = p.sim.clone().with_seed(stream::derive(seed, &[102]));
            let cfg = json!({ "preset": name, "net": p.net, "design": p.design, "config": config });
            (run.sample, p.grid, config, true, cfg)
        }
        None => {
            let input = input.expect("clap requires --input without --preset");
            let grid = parse_grid(grid.expect("clap requires --grid without --preset"))?;
            let config = fit_config(fit, seed);
            let (sample, _) = check_sample(formats::read_sample(input)?, None, repair)?;
            let cfg = json!({
                "input": input.display().to_string(),
                "grid": grid,
                "repair": repair,
                "config": config,
            });
            (sample, grid, config, false, cfg)
        }
    };
    if sample.is_empty() {
        return Err(CliError::validation("sample contains no records"));
    }

    let sweep = sensitivity_sweep(&sample, &grid, &config)?;
    let mean = mu_mean(&sample)?;
    let vh = mu_vh(&sample)?;
    let manifest = RunManifest::new("sensitivity", seed, manifest_config);

    let mut stdout = Vec::new();
    write_sensitivity_csv(&mut stdout, &sweep, mean, vh, manifest.tag())?;
    print!("{}", String::from_utf8(stdout).expect("csv is utf-8"));
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
        write_sensitivity_csv(
            formats::create_file(&dir.join("sensitivity.csv"))?,
            &sweep,
            mean,
            vh,
            manifest.tag(),
        )?;
        if fixture {
            formats::write_sample(
                formats::create_file(&dir.join("fixture_sample.csv"))?,
                &sample,
                Some(manifest.tag()),
            )?;
        }
        manifest.write(dir)?;
    }
    Ok(())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulateConfig {
    net: NetParams<f64>,
    design: RdsDesign,
    #[serde(default = "one")]
    graphs: usize,
}

fn one() -> usize {
    1
}

pub struct InlineSimulate {
    pub population: Option<usize>,
    pub prevalence: Option<f64>,
    pub mean_degree: Option<f64>,
    pub activity_ratio: Option<f64>,
    pub homophily: Option<f64>,
    pub target_n: Option<usize>,
    pub seed_count: usize,
    pub coupons: usize,
    pub regime: SeedRegime,
    pub reseed: bool,
    pub graphs: usize,
}

fn read_json_config<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let body = fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&body)
        .map_err(|e| CliError::validation(format!("config {}: {e}", path.display())))
}

pub fn simulate(
    config: Option<&Path>,
    inline: InlineSimulate,
    seed: u64,
    out_dir: &Path,
) -> CliResult<()> {
    let cfg = match config {
        Some(path) => read_json_config::<SimulateConfig>(path)?,
        None => {
            let missing =
                |flag: &str| CliError::validation(format!("--{flag} is required without --config"));
            SimulateConfig {
                net: NetParams {
                    population: inline.population.ok_or_else(|| missing("population"))?,
                    prevalence: inline.prevalence.ok_or_else(|| missing("prevalence"))?,
                    mean_degree: inline.mean_degree.ok_or_else(|| missing("mean-degree"))?,
                    activity_ratio: inline
                        .activity_ratio
                        .ok_or_else(|| missing("activity-ratio"))?,
                    homophily: inline.homophily.ok_or_else(|| missing("homophily"))?,
                },
                design: RdsDesign {
                    seed_count: inline.seed_count,
                    coupons: inline.coupons,
                    target_n: inline.target_n.ok_or_else(|| missing("target-n"))?,
                    regime: inline.regime,
                    reseed: inline.reseed,
                },
                graphs: inline.graphs,
            }
        }
    };
    if cfg.graphs == 0 {
        return Err(CliError::validation("--graphs must be >= 1"));
    }

    let manifest = RunManifest::new(
        "simulate",
        seed,
        json!({ "net": cfg.net, "design": cfg.design, "graphs": cfg.graphs }),
    );
    fs::create_dir_all(out_dir)?;
    let tag = manifest.tag().to_string();
    let mut summaries = Vec::new();
    for g in 0..cfg.graphs {
        let graph = sample_mixing_graph(&cfg.net, &mut stream::rng(seed, &[g as u64, 0]))?;
        let run = run_rds(&graph, &cfg.design, &mut stream::rng(seed, &[g as u64, 1]))?;
        formats::write_edge_list(
            formats::create_file(&out_dir.join(format!("graph_{g}.edges")))?,
            &graph,
            Some(&tag),
        )?;
        formats::write_node_attrs(
            formats::create_file(&out_dir.join(format!("graph_{g}.nodes.csv")))?,
            &graph,
            Some(&tag),
        )?;
        if let Ok(dist) = graph.degree_distribution() {
            formats::write_distribution(
                formats::create_file(&out_dir.join(format!("dist_{g}.csv")))?,
                &dist,
                Some(&tag),
            )?;
        }
        formats::write_sample(
            formats::create_file(&out_dir.join(format!("sample_{g}.csv")))?,
            &run.sample,
            Some(&tag),
        )?;
        let descriptors = graph_descriptors(&graph).ok();
        summaries.push(json!({
            "graph": g,
            "nodes": graph.node_count(),
            "edges": graph.edge_count(),
            "sample_n": run.sample.n(),
            "exhausted": run.exhausted,
            "reseeds": run.reseeds,
            "realized": descriptors,
        }));
    }
    manifest.write(out_dir)?;
    let summary = json!({ "manifest_hash": manifest.hash, "graphs": summaries });
    println!(
        "{}",
        serde_json::to_string_pretty(&summary).expect("summary serializes")
    );
    Ok(())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StudyConfig {
    scenarios: Vec<Scenario>,
}

fn parse_scale(name: &str, expected: &str) -> CliResult<presets::Scale> {
    let (kind, scale) = name.split_once('-').ok_or_else(|| {
        CliError::validation(format!("preset must be <name>-<desk|paper>, got {name}"))
    })?;
    if kind != expected {
        return Err(CliError::validation(format!(
            "this command supports the {expected}-* presets, got {name}"
        )));
    }
    match scale {
        "desk" => Ok(presets::Scale::Desk),
        "paper" => Ok(presets::Scale::Paper),
        other => Err(CliError::validation(format!(
            "unknown preset scale {other}; use desk or paper"
        ))),
    }
}

fn study_preset(name: &str) -> CliResult<Vec<Scenario>> {
    let (kind, _) = name.split_once('-').ok_or_else(|| {
        CliError::validation(format!("preset must be <name>-<desk|paper>, got {name}"))
    })?;
    let scale = parse_scale(name, kind)?;
    match kind {
        "fig1" => Ok(presets::fig1(scale)),
        "fig3" => Ok(presets::fig3(scale)),
        "table2" => Ok(presets::table2(scale)),
        other => Err(CliError::validation(format!(
            "unknown study preset {other}; use fig1, fig3, or table2 (fig6 belongs to `sensitivity`)"
        ))),
    }
}

pub fn study(
    config: Option<&Path>,
    preset: Option<&str>,
    replicates: Option<usize>,
    seed: u64,
    out_dir: Option<&Path>,
) -> CliResult<()> {
    let mut scenarios = match preset {
        Some(name) => study_preset(name)?,
        None => {
            let path = config.expect("clap requires --config without --preset");
            read_json_config::<StudyConfig>(path)?.scenarios
        }
    };
    if let Some(r) = replicates {
        for s in &mut scenarios {
            s.replicates = r;
        }
    }
    let manifest = RunManifest::new("study", seed, json!({ "scenarios": scenarios }));
    let result = run_study(&scenarios, seed)?;

    let mut csv = Vec::new();
    writeln!(csv, "# manifest {}", manifest.tag())?;
    result.write_csv(&mut csv)?;
    print!("{}", String::from_utf8(csv.clone()).expect("csv is utf-8"));
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("study.csv"), csv)?;
        let body = json!({
            "manifest_hash": manifest.hash,
            "master_seed": seed,
            "rows": result.rows,
        });
        fs::write(
            dir.join("study.json"),
            serde_json::to_string_pretty(&body).expect("study serializes") + "\n",
        )?;
        manifest.write(dir)?;
    }
    Ok(())
}

pub fn curves(
    input: &Path,
    fractions: Option<&str>,
    sizes: Option<&str>,
    fit: &FitArgs,
    out_dir: Option<&Path>,
) -> CliResult<()> {
    let seed = resolve_seed(fit.seed);
    let config = fit_config(fit, seed);
    let dist = formats::read_distribution(input)?;
    let population = dist.population();
    let mut sample_sizes: Vec<usize> = match (sizes, fractions) {
        (Some(list), _) => list
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|e| CliError::validation(format!("bad size {s}: {e}")))
            })
            .collect::<CliResult<_>>()?,
        (None, Some(list)) => list
            .split(',')
            .map(|s| {
                let f = s
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| CliError::validation(format!("bad fraction {s}: {e}")))?;
                if !(0.0..=1.0).contains(&f) {
                    return Err(CliError::validation(format!("fraction {f} outside [0, 1]")));
                }
                Ok(((f * population as f64).round() as usize).clamp(1, population))
            })
            .collect::<CliResult<_>>()?,
        (None, None) => unreachable!("clap requires --fractions or --sizes"),
    };
    sample_sizes.sort_unstable();
    sample_sizes.dedup();

    let manifest = RunManifest::new(
        "curves",
        seed,
        json!({
            "input": input.display().to_string(),
            "sample_sizes": sample_sizes,
            "config": config,
        }),
    );
    let table = harness::inclusion_curves(&dist, &sample_sizes, &config)?;

    let mut csv = Vec::new();
    writeln!(csv, "# manifest {}", manifest.tag())?;
    table.write_csv(&mut csv)?;
    print!("{}", String::from_utf8(csv.clone()).expect("csv is utf-8"));
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("curves.csv"), csv)?;
        manifest.write(dir)?;
    }
    Ok(())
}
