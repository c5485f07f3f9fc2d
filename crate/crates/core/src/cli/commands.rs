use serde::Serialize;

use super::table::Table;
use super::{
    BalanceArgs, Cli, CliError, DemoArgs, DiscretizeArgs, EstimateArgs, Experiment, Format,
    SampleArgs,
};
use crate::continuous::{discretize as draw_cloud, discretize_is, DistributionSpec, ISSpec};
use crate::distance::Distance;
use crate::estimation::{
    check_neighborhood, global_mean_variance, ht_estimate, local_mean_variance, spatial_balance,
    SCHEMA_VERSION,
};
use crate::experiments::{
    self, ExperimentConfig, ExperimentReport, Method, OptionParams, RainforestParams,
};
use crate::pivotal::{sample as pivotal_sample, InclusionProbabilities, Variant};
use crate::points::Points;
use crate::rng::seeded;

fn parse_distance(name: &str) -> Result<Distance, CliError> {
    Distance::from_name(name).ok_or_else(|| CliError::format(format!("unknown distance '{name}'")))
}

fn parse_variant(name: &str) -> Result<Variant, CliError> {
    match name.to_ascii_lowercase().as_str() {
        "lpm1" => Ok(Variant::Lpm1),
        "lpm2" => Ok(Variant::Lpm2),
        other => Err(CliError::format(format!(
            "unknown sampling method '{other}'"
        ))),
    }
}

fn json<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("report serializes");
    bytes.push(b'\n');
    bytes
}

fn csv_bytes<I, R>(rows: I) -> Result<Vec<u8>, CliError>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.write_record(r)
            .map_err(|e| CliError::format(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::format(e.to_string()))
}

fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

#[derive(Serialize)]
struct SampleOutput<'a> {
    schema_version: u32,
    method: &'static str,
    population_size: usize,
    n: usize,
    steps: usize,
    selected: &'a [usize],
}

pub fn sample(cli: &Cli, a: &SampleArgs) -> Result<Vec<u8>, CliError> {
    let table = Table::read(&a.input)?;
    let variant = parse_variant(&a.method)?;
    let distance = parse_distance(&a.distance)?;
    let big_n = table.rows.len();
    let prob_col = table.column_index(&a.prob_col);
    let coords_idx = match &a.coord_cols {
        Some(names) => table.named_columns(names)?,
        None => table.other_columns(&[a.prob_col.as_str(), "index", "weight"]),
    };
    if coords_idx.is_empty() {
        return Err(CliError::format("no coordinate columns"));
    }
    let probs = match (a.n, prob_col) {
        (Some(n), _) => {
            if n > big_n {
                return Err(CliError::domain(format!(
                    "sample size {n} exceeds {big_n} rows"
                )));
            }
            InclusionProbabilities::equal(n, big_n)?
        }
        (None, Some(k)) => InclusionProbabilities::new(table.column(k))?,
        (None, None) => {
            return Err(CliError::format(format!(
                "need --n or a '{}' probability column",
                a.prob_col
            )))
        }
    };
    let coords = Points::new(table.gather(&coords_idx), coords_idx.len())?;
    let result = pivotal_sample(variant, &probs, &coords, &distance, &mut seeded(cli.seed))?;

    if a.with_rows {
        let mut header = vec!["index".to_string()];
        header.extend(table.headers.iter().cloned());
        let rows = result.selected.iter().map(|&i| {
            let mut r = vec![i.to_string()];
            r.extend(table.rows[i].iter().map(|&v| fmt_f64(v)));
            r
        });
        return csv_bytes(std::iter::once(header).chain(rows));
    }
    match cli.format {
        Some(Format::Json) => Ok(json(&SampleOutput {
            schema_version: SCHEMA_VERSION,
            method: variant.name(),
            population_size: big_n,
            n: result.selected.len(),
            steps: result.steps,
            selected: &result.selected,
        })),
        _ => {
            let mut out = String::new();
            for i in &result.selected {
                out.push_str(&i.to_string());
                out.push('\n');
            }
            Ok(out.into_bytes())
        }
    }
}

pub fn estimate(cli: &Cli, a: &EstimateArgs) -> Result<Vec<u8>, CliError> {
    let table = Table::read(&a.input)?;
    let y_col = table
        .column_index(&a.y_col)
        .ok_or_else(|| CliError::format(format!("no '{}' column", a.y_col)))?;
    let p_col = table
        .column_index(&a.prob_col)
        .ok_or_else(|| CliError::format(format!("no '{}' column", a.prob_col)))?;
    let w_col = table.column_index(&a.weight_col);
    let y = table.column(y_col);
    let probs = table.column(p_col);
    if let Some((i, &p)) = probs
        .iter()
        .enumerate()
        .find(|(_, &p)| !(p > 0.0 && p <= 1.0))
    {
        return Err(CliError::domain(format!(
            "probability {p} in row {i} is not in (0, 1]"
        )));
    }
    let weights = w_col.map(|k| table.column(k));
    let population = match a.population {
        Some(v) => v,
        None => probs.iter().map(|p| 1.0 / p).sum(),
    };
    let mut report = ht_estimate(&y, &probs, population, weights.as_deref())?;

    if let Some(n_prime) = a.nprime {
        let n = y.len();
        check_neighborhood(n, n_prime)?;
        // each unit's contribution to the mean, scaled so equal probabilities
        // give back w * y
        let z: Vec<f64> = (0..n)
            .map(|i| {
                n as f64 * weights.as_ref().map_or(1.0, |w| w[i]) * y[i] / (population * probs[i])
            })
            .collect();
        let coord_idx = match &a.coord_cols {
            Some(names) => table.named_columns(names)?,
            None => table.other_columns(&[&a.y_col, &a.prob_col, &a.weight_col, "index"]),
        };
        let variance = if n_prime == n {
            global_mean_variance(&z)
        } else {
            if coord_idx.is_empty() {
                return Err(CliError::format(format!(
                    "--nprime {n_prime} < n = {n} needs coordinate columns to find neighbours"
                )));
            }
            let coords = Points::new(table.gather(&coord_idx), coord_idx.len())?;
            local_mean_variance(&z, &coords, &parse_distance(&a.distance)?, n_prime)?
        };
        report.variance = Some(variance);
        report.n_prime = Some(n_prime);
        report.method = "horvitz-thompson+local-mean".into();
    }
    let _ = cli;
    Ok(json(&report))
}

pub fn balance(cli: &Cli, a: &BalanceArgs) -> Result<Vec<u8>, CliError> {
    if let (Some(sample_path), Some(reference_path)) = (&a.sample, &a.reference) {
        let s = Table::read(sample_path)?;
        let r = Table::read(reference_path)?;
        let skip = ["index", "weight", "prob"];
        let (si, ri) = (s.other_columns(&skip), r.other_columns(&skip));
        if si.len() != ri.len() {
            return Err(CliError::format(format!(
                "sample has {} coordinate columns, reference {}",
                si.len(),
                ri.len()
            )));
        }
        let sample = Points::new(s.gather(&si), si.len())?;
        let reference = Points::new(r.gather(&ri), ri.len())?;
        let report = spatial_balance(&sample, &reference, &mut seeded(cli.seed))?;
        return Ok(json(&report));
    }
    let method: Method = a.method.parse()?;
    let cfg = ExperimentConfig::new("balance", method, a.n, a.population, a.replicates, cli.seed);
    let mut report = experiments::run_balance_experiment(&cfg, a.q, a.fresh_reference)?;
    report.wall_time_secs = None;
    Ok(json(&report))
}

fn broadcast(values: &[f64], q: usize, what: &str) -> Result<Vec<f64>, CliError> {
    match values.len() {
        1 => Ok(vec![values[0]; q]),
        k if k == q => Ok(values.to_vec()),
        k => Err(CliError::format(format!(
            "{what} has {k} values for dimension {q}"
        ))),
    }
}

pub fn discretize(cli: &Cli, a: &DiscretizeArgs) -> Result<Vec<u8>, CliError> {
    if a.q == 0 {
        return Err(CliError::format("dimension must be >= 1"));
    }
    let target = match a.dist.to_ascii_lowercase().as_str() {
        "normal" => DistributionSpec::normal(
            broadcast(&a.mean, a.q, "--mean")?,
            broadcast(&a.sd, a.q, "--sd")?,
        )?,
        "uniform" => DistributionSpec::uniform(
            broadcast(&a.lower, a.q, "--lower")?,
            broadcast(&a.upper, a.q, "--upper")?,
        )?,
        other => return Err(CliError::format(format!("unknown distribution '{other}'"))),
    };
    let mut rng = seeded(cli.seed);
    let pop = match (&a.proposal_mean, &a.proposal_sd) {
        (None, None) => draw_cloud(&target, a.population, &mut rng)?,
        (mean, sd) => {
            let mean = broadcast(mean.as_deref().unwrap_or(&[0.0]), a.q, "--proposal-mean")?;
            let sd = broadcast(sd.as_deref().unwrap_or(&[1.0]), a.q, "--proposal-sd")?;
            let spec = ISSpec::new(target, DistributionSpec::normal(mean, sd)?)?;
            discretize_is(&spec, a.population, &mut rng)?
        }
    };
    let mut out = Vec::new();
    pop.write_csv(&mut out)
        .map_err(|e| CliError::format(e.to_string()))?;
    Ok(out)
}

fn default_methods(e: Experiment) -> &'static [Method] {
    match e {
        Experiment::Integral => &[Method::Iid, Method::Lpm2, Method::Stratified],
        Experiment::Option => &[Method::Iid, Method::Lpm2],
        Experiment::RareEvent => &[Method::Iid, Method::Lpm2, Method::Is, Method::IsLpm2],
        Experiment::Rainforest => &[Method::Iid, Method::Lpm2],
    }
}

fn experiment_name(e: Experiment) -> &'static str {
    match e {
        Experiment::Integral => "integral",
        Experiment::Option => "option",
        Experiment::RareEvent => "rare-event",
        Experiment::Rainforest => "rainforest",
    }
}

pub fn demo(cli: &Cli, a: &DemoArgs) -> Result<Vec<u8>, CliError> {
    let methods: Vec<Method> = match &a.method {
        Some(list) => list
            .iter()
            .map(|m| m.parse())
            .collect::<crate::Result<_>>()?,
        None => default_methods(a.experiment).to_vec(),
    };
    let n = a.n.unwrap_or(if a.experiment == Experiment::Rainforest {
        50
    } else {
        100
    });
    let sizes = a.sweep.clone().unwrap_or_else(|| vec![a.population]);
    let name = experiment_name(a.experiment);
    let mut reports: Vec<ExperimentReport> = Vec::new();
    for &big_n in &sizes {
        for &method in &methods {
            // iid and stratified ignore N but still need n <= N to validate
            let cfg = ExperimentConfig::new(name, method, n, big_n.max(n), a.m, cli.seed);
            match a.experiment {
                Experiment::Integral => reports.push(experiments::run_integral_experiment(&cfg)?),
                Experiment::Option => {
                    let p = OptionParams {
                        spot: a.spot,
                        strike: a.strike,
                        rate: a.rate,
                        sigma: a.sigma,
                        maturity: a.maturity,
                    };
                    reports.push(experiments::run_option_experiment(&cfg, &p)?)
                }
                Experiment::RareEvent => {
                    reports.push(experiments::run_rare_event_experiment(&cfg)?)
                }
                Experiment::Rainforest => {
                    let p = RainforestParams {
                        growth: a.growth,
                        death: a.death,
                        x_crit: a.xcrit.first().copied().unwrap_or(0.0),
                        epsilon: a.epsilon,
                        t_max: a.t_max,
                    };
                    reports.extend(experiments::run_rainforest_experiment(&cfg, &p, &a.xcrit)?)
                }
            }
        }
    }
    if !a.timing {
        for r in reports.iter_mut() {
            r.wall_time_secs = None;
        }
    }
    match cli.format {
        Some(Format::Csv) => {
            let rainforest = a.experiment == Experiment::Rainforest;
            let mut header: Vec<String> = ExperimentReport::CSV_HEADER
                .iter()
                .map(|s| s.to_string())
                .collect();
            if rainforest {
                header.push("x_crit".into());
            }
            let rows = reports.iter().map(|r| {
                let mut row = r.csv_row().to_vec();
                if rainforest {
                    row.push(fmt_f64(
                        r.parameters.get("x_crit").copied().unwrap_or(f64::NAN),
                    ));
                }
                row
            });
            csv_bytes(std::iter::once(header).chain(rows))
        }
        _ => Ok(json(&reports)),
    }
}
