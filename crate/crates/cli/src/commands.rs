use qctf_core::acceptance;
use qctf_core::analytics::{derivative_exact, edge_fit, transient};
use qctf_core::oracle::evolve_closed_form;
use qctf_core::spectrum::{enumerate_poles, SpectrumMode};
use qctf_core::{Params, Series};
use rayon::prelude::*;
use serde_json::json;

use crate::config::{Command, Format, Mode, RunConfig};
use crate::output::{emit, num, Body, Csv, Metadata};
use crate::CliError;

pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| CliError::Validation(format!("cannot start {} workers: {e}", config.workers)))?;
    pool.install(|| match config.command {
        Command::Spectrum => spectrum(config),
        Command::Evolve => evolve(config),
        Command::Heatmap => heatmap(config),
        Command::Derivatives => derivatives(config),
        Command::Transient => transient_table(config),
        Command::Edge => edge(config),
        Command::Verify => verify(config),
    })
}

fn single_q(config: &RunConfig) -> i64 {
    config.q.expect("resolved for single-spin commands")
}

fn spectrum(config: &RunConfig) -> Result<(), CliError> {
    let params = config.params()?;
    let s = enumerate_poles(&params, single_q(config), config.mode.into())?;
    let body = match config.format {
        Format::Csv => {
            let mut csv = Csv::new(&["omega", "intensity", "count", "class"]);
            for p in &s.poles {
                csv.row(&[num(p.omega), num(p.intensity), p.tuple_count.to_string(), p.class.as_str().into()]);
            }
            Body::Csv(csv)
        }
        Format::Json => Body::Json(json!(s)),
    };
    emit(config, body)
}

fn evolve(config: &RunConfig) -> Result<(), CliError> {
    let series = evolve_closed_form(&config.params()?, single_q(config), &config.times())?;
    let body = match config.format {
        Format::Csv => {
            let mut csv = Csv::new(&["t", "value"]);
            for (t, v) in series.iter() {
                csv.row(&[num(t), num(v)]);
            }
            Body::Csv(csv)
        }
        Format::Json => Body::Json(json!(series)),
    };
    emit(config, body)
}

fn series_over_range(config: &RunConfig, params: &Params, times: &[f64]) -> Result<Vec<Series>, CliError> {
    let qs: Vec<i64> = config.q_range().collect();
    Ok(qs
        .par_iter()
        .map(|&q| evolve_closed_form(params, q, times))
        .collect::<Result<Vec<_>, _>>()?)
}

fn heatmap(config: &RunConfig) -> Result<(), CliError> {
    let params = config.params()?;
    let times = config.times();
    let all = series_over_range(config, &params, &times)?;
    let body = match config.format {
        Format::Csv => {
            let mut csv = Csv::new(&["t", "q", "value"]);
            for (i, &t) in times.iter().enumerate() {
                for s in &all {
                    csv.row(&[num(t), s.q.to_string(), num(s.values[i])]);
                }
            }
            Body::Csv(csv)
        }
        Format::Json => Body::Json(json!(all)),
    };
    emit(config, body)
}

fn derivatives(config: &RunConfig) -> Result<(), CliError> {
    let params = config.params()?;
    let with_moments = config.mode == Mode::Full;
    let mut records = Vec::new();
    for q in config.q_range() {
        if q < 1 {
            return Err(CliError::Validation(format!("derivative table expects q ≥ 1, got {q}")));
        }
        let spectrum = if with_moments {
            Some(enumerate_poles(&params, q, SpectrumMode::Full)?)
        } else {
            None
        };
        for kbar in 0..=q as u64 {
            let rec = derivative_exact(&params, q as u64, kbar)?;
            records.push(match &spectrum {
                Some(s) => rec.with_moment(s),
                None => rec,
            });
        }
    }
    let body = match config.format {
        Format::Csv => {
            let mut csv = Csv::new(&["q", "kbar", "order", "exact_value", "moment_value", "exactness_flag"]);
            for r in &records {
                csv.row(&[
                    r.q.to_string(),
                    r.kbar.to_string(),
                    r.order.to_string(),
                    num(r.exact_value),
                    r.moment_value.map(num).unwrap_or_default(),
                    r.exactness_flag.to_string(),
                ]);
            }
            Body::Csv(csv)
        }
        Format::Json => Body::Json(json!(records)),
    };
    emit(config, body)
}

fn transient_table(config: &RunConfig) -> Result<(), CliError> {
    let params = config.params()?;
    let q = single_q(config);
    if q < 1 {
        return Err(CliError::Validation(format!("transient comparison expects q ≥ 1, got {q}")));
    }
    let series = evolve_closed_form(&params, q, &config.times())?;
    let approx = series
        .times
        .iter()
        .map(|&t| transient(&params, q as u64, t))
        .collect::<Result<Vec<_>, _>>()?;
    let body = match config.format {
        Format::Csv => {
            let mut csv = Csv::new(&["t", "exact", "bessel_approx"]);
            for ((t, v), a) in series.iter().zip(&approx) {
                csv.row(&[num(t), num(v), num(*a)]);
            }
            Body::Csv(csv)
        }
        Format::Json => Body::Json(json!({
            "q": q,
            "t": series.times,
            "exact": series.values,
            "bessel_approx": approx,
        })),
    };
    emit(config, body)
}

fn edge(config: &RunConfig) -> Result<(), CliError> {
    let params = config.params()?;
    let all = series_over_range(config, &params, &config.times())?;
    let est = edge_fit(&all)?;
    let body = match config.format {
        Format::Csv => {
            let mut csv = Csv::new(&["q", "arrival_time"]);
            for &(q, tau) in &est.per_q {
                csv.row(&[q.to_string(), num(tau)]);
            }
            csv.comment(&format!("fitted_velocity={}", num(est.fitted_velocity)));
            Body::Csv(csv)
        }
        Format::Json => Body::Json(json!(est)),
    };
    emit(config, body)
}

fn verify(config: &RunConfig) -> Result<(), CliError> {
    let ids: Vec<u8> = config.only.clone().unwrap_or_else(|| acceptance::IDS.to_vec());
    let header = serde_json::to_string(&Metadata::new(config)).expect("metadata serializes");
    println!("# {header}");
    let mut outcomes = Vec::new();
    for id in ids {
        let o = acceptance::run(id).expect("ids checked at resolution");
        println!("{o}");
        outcomes.push(o);
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("{} passed, {failed} failed", outcomes.len() - failed);

    if config.out.is_some() {
        let body = match config.format {
            Format::Csv => {
                let mut csv = Csv::new(&["id", "passed", "name", "detail"]);
                for o in &outcomes {
                    csv.row(&[
                        o.id.to_string(),
                        o.passed.to_string(),
                        o.name.to_string(),
                        format!("\"{}\"", o.detail.replace('"', "\"\"")),
                    ]);
                }
                Body::Csv(csv)
            }
            Format::Json => Body::Json(json!(outcomes)),
        };
        emit(config, body)?;
    }
    if failed > 0 {
        return Err(CliError::Verify { failed });
    }
    Ok(())
}
