use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use risfda::optimize::{
    argmax, m_s_objective, optimal_m_s, optimize as optimize_sizes, sweep_m_s, sweep_n_s,
};
use risfda::secrecy::lambda_approx;
use risfda::sweep::{
    heatmap as heatmap_rows, sweep as sweep_rows, EveSpec, GridSpec, McSettings, SweepPoint,
};
use risfda::units::linear_to_db;
use risfda::verify::{run_suite, Suite};
use risfda::{FdaPlan, Scenario, SelectionSizes, Technique};
use serde::Serialize;

use crate::config::Resolved;
use crate::error::CliError;

/// Where tabular output goes.
pub struct Output<'a> {
    pub path: Option<&'a Path>,
    pub json: bool,
}

impl Output<'_> {
    fn sink(&self) -> Result<Box<dyn Write>, CliError> {
        Ok(match self.path {
            Some(p) => Box::new(io::BufWriter::new(File::create(p).map_err(|e| CliError::Io {
                path: p.display().to_string(),
                source: e,
            })?)),
            None => Box::new(io::stdout().lock()),
        })
    }

    fn write_csv<T: Serialize>(&self, rows: &[T]) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(self.sink()?);
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn flag(flag: &'static str, message: impl Into<String>) -> CliError {
    CliError::Flag {
        flag,
        message: message.into(),
    }
}

fn parse_numbers(flag_name: &'static str, text: &str, sep: char, count: usize) -> Result<Vec<f64>, CliError> {
    let parts: Vec<f64> = text
        .split(sep)
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| flag(flag_name, format!("`{text}`: {e}")))?;
    if parts.len() != count {
        return Err(flag(
            flag_name,
            format!("`{text}`: expected {count} values separated by `{sep}`"),
        ));
    }
    Ok(parts)
}

fn eve_point(resolved: &Resolved, eve: Option<&str>) -> Result<SweepPoint, CliError> {
    let spec = match (eve, resolved.eve) {
        (Some(text), _) => {
            let v = parse_numbers("eve", text, ',', 2)?;
            EveSpec::Point { x: v[0], y: v[1] }
        }
        (None, Some(spec @ (EveSpec::Point { .. } | EveSpec::Polar { .. }))) => spec,
        _ => {
            return Err(flag(
                "eve",
                "required unless the scenario's `eve` is a single position",
            ))
        }
    };
    Ok(spec.locations(&resolved.scenario)?[0])
}

pub fn report(
    resolved: &Resolved,
    eve: Option<&str>,
    technique: Option<&str>,
    out: &Output<'_>,
) -> Result<(), CliError> {
    let technique = match technique {
        Some(t) => Technique::parse(t).ok_or_else(|| {
            let names: Vec<_> = Technique::ALL.iter().map(|t| t.name()).collect();
            flag("technique", format!("`{t}` is not one of {}", names.join(", ")))
        })?,
        None => resolved.technique,
    };
    let scn = &resolved.scenario;
    let eve = eve_point(resolved, eve)?;
    let point = eve.xy;
    let report = scn.evaluate(&eve.loc, technique)?;
    let worst = scn.worst_case()?;
    if out.json {
        #[derive(Serialize)]
        struct Full<'a> {
            report: &'a risfda::SecrecyReport,
            x_m: f64,
            y_m: f64,
            worst_case: risfda::secrecy::WorstCase,
        }
        let full = Full {
            report: &report,
            x_m: point.x,
            y_m: point.y,
            worst_case: worst,
        };
        let text = serde_json::to_string_pretty(&full).map_err(|e| CliError::Output(e.to_string()))?;
        writeln!(io::stdout().lock(), "{text}")?;
        return Ok(());
    }
    let mut o = io::stdout().lock();
    let db = |g: f64| format!("{g:.6e} ({:.2} dB)", linear_to_db(g));
    writeln!(o, "technique       {}", report.technique.name())?;
    writeln!(
        o,
        "eve             ({:.3}, {:.3}) m; R = {:.4} m, theta = {:.5} rad",
        point.x, point.y, report.eve.range_m, report.eve.aoa_rad
    )?;
    writeln!(
        o,
        "in wiretap area {}",
        if report.in_wiretap { "yes" } else { "no" }
    )?;
    writeln!(o, "delta_f         {} Hz", report.delta_f_hz)?;
    writeln!(o, "snr bob         {}", db(report.gamma_bob))?;
    writeln!(o, "snr eve         {}", db(report.gamma_eve))?;
    writeln!(o, "secrecy rate    {:.6} bits/s/Hz", report.rate_bits)?;
    writeln!(o, "rate ceiling    {:.6} bits/s/Hz", report.rate_ceiling_bits)?;
    if let Some(b) = report.bounds {
        writeln!(o, "eve bound range {}", b.ub_range)?;
        writeln!(o, "eve bound angle {} (lambda {:.4})", b.ub_angle, b.lambda)?;
    }
    writeln!(
        o,
        "worst case rate {:.6} bits/s/Hz (M_s = {}, N_s = {})",
        worst.rate_bits, scn.sizes.m_s, scn.sizes.n_s
    )?;
    Ok(())
}

fn grid_axis(flag_name: &'static str, text: &str) -> Result<(f64, f64, usize), CliError> {
    let v = parse_numbers(flag_name, text, ':', 3)?;
    if v[2] < 1.0 || v[2].fract() != 0.0 {
        return Err(flag(
            flag_name,
            format!("point count {} must be a positive integer", v[2]),
        ));
    }
    Ok((v[0], v[1], v[2] as usize))
}

pub fn heatmap(
    resolved: &Resolved,
    x: Option<&str>,
    y: Option<&str>,
    out: &Output<'_>,
) -> Result<(), CliError> {
    let mut grid = match resolved.eve {
        Some(EveSpec::Grid(g)) => g,
        _ => GridSpec::baseline_heatmap(),
    };
    if let Some(x) = x {
        (grid.x_min, grid.x_max, grid.nx) = grid_axis("x", x)?;
    }
    if let Some(y) = y {
        (grid.y_min, grid.y_max, grid.ny) = grid_axis("y", y)?;
    }
    let rows = heatmap_rows(&resolved.scenario, &grid)?;
    out.write_csv(&rows)
}

pub fn sweep(resolved: &Resolved, samples: Option<usize>, out: &Output<'_>) -> Result<(), CliError> {
    let spec = resolved
        .eve
        .ok_or_else(|| flag("config", "field `eve` must describe the sweep"))?;
    let points = spec.locations(&resolved.scenario)?;
    let mc = samples.map(|samples| McSettings {
        samples,
        seed: resolved.seed,
    });
    let rows = sweep_rows(&resolved.scenario, &points, mc)?;
    out.write_csv(&rows)
}

#[derive(Serialize)]
struct ObjectiveRow {
    parameter: &'static str,
    size: usize,
    objective_bits: f64,
}

#[derive(Serialize)]
struct SizeRow {
    m: usize,
    m_s_closed_form: usize,
    method: risfda::Method,
    m_s_sweep: usize,
    objective_gap_bits: f64,
}

fn parse_range(text: &str) -> Result<Vec<usize>, CliError> {
    let v: Vec<usize> = text
        .split(':')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| flag("vary-m", format!("`{text}`: {e}")))?;
    match v[..] {
        [start, end, step] if step > 0 && start >= 2 && start <= end => {
            Ok((start..=end).step_by(step).collect())
        }
        _ => Err(flag(
            "vary-m",
            format!("`{text}`: expected START:END:STEP with 2 <= START <= END and STEP > 0"),
        )),
    }
}

pub fn optimize(resolved: &Resolved, vary_m: Option<&str>, out: &Output<'_>) -> Result<(), CliError> {
    let scn = &resolved.scenario;
    if let Some(range) = vary_m {
        let mut rows = Vec::new();
        for m in parse_range(range)? {
            let plan = FdaPlan::new(scn.plan.f0_hz, scn.plan.delta_f_hz, m)
                .map_err(|e| flag("vary-m", format!("M = {m}: {e}")))?;
            let s = Scenario {
                plan,
                sizes: SelectionSizes::full(m, scn.n()),
                ..*scn
            };
            let choice = optimal_m_s(&s)?;
            let swept = argmax(&sweep_m_s(&s)?);
            rows.push(SizeRow {
                m,
                m_s_closed_form: choice.size,
                method: choice.method,
                m_s_sweep: swept,
                objective_gap_bits: m_s_objective(&s, swept)? - m_s_objective(&s, choice.size)?,
            });
        }
        return if out.path.is_some() || !out.json {
            out.write_csv(&rows)
        } else {
            let text = serde_json::to_string(&rows).map_err(|e| CliError::Output(e.to_string()))?;
            writeln!(io::stdout().lock(), "{text}")?;
            Ok(())
        };
    }

    let result = optimize_sizes(scn)?;
    let lambda = lambda_approx(&scn.geom, scn.bob().aoa_rad);
    let m_curve = sweep_m_s(&scn.with_sizes(scn.m(), scn.n())?)?;
    let n_curve = sweep_n_s(&scn.with_sizes(scn.m(), scn.n())?, lambda)?;
    if out.json {
        let text = serde_json::to_string_pretty(&result).map_err(|e| CliError::Output(e.to_string()))?;
        writeln!(io::stdout().lock(), "{text}")?;
    } else {
        let mut o = io::stdout().lock();
        writeln!(o, "M_s*            {}", result.m_s_star)?;
        writeln!(o, "N_s*            {}", result.n_s_star)?;
        writeln!(o, "method          {:?}", result.method)?;
        writeln!(o, "worst case rate {:.6} bits/s/Hz", result.objective_bits)?;
    }
    if out.path.is_some() {
        let rows: Vec<ObjectiveRow> = m_curve
            .iter()
            .map(|&(size, objective_bits)| ObjectiveRow {
                parameter: "m_s",
                size,
                objective_bits,
            })
            .chain(n_curve.iter().map(|&(size, objective_bits)| ObjectiveRow {
                parameter: "n_s",
                size,
                objective_bits,
            }))
            .collect();
        out.write_csv(&rows)?;
    }
    Ok(())
}

pub fn verify(
    resolved: &Resolved,
    suite: Suite,
    samples: Option<usize>,
    out: &Output<'_>,
) -> Result<(), CliError> {
    let records = run_suite(
        &resolved.scenario,
        suite,
        samples.unwrap_or(100_000),
        resolved.seed,
    )?;
    if out.path.is_some() || out.json {
        let mut sink = out.sink()?;
        for r in &records {
            writeln!(sink, "{}", r.to_json_line())?;
        }
        sink.flush()?;
    }
    let failed = records.iter().filter(|r| !r.pass).count();
    if !out.json {
        let mut o = io::stderr().lock();
        for r in records.iter().filter(|r| !r.pass) {
            writeln!(
                o,
                "FAIL {}: error {:.3e} > tolerance {:.3e}",
                r.name, r.error, r.tolerance
            )?;
        }
        writeln!(
            o,
            "{} checks, {} passed, {failed} failed",
            records.len(),
            records.len() - failed
        )?;
    }
    if failed > 0 {
        return Err(CliError::Verification {
            failed,
            total: records.len(),
        });
    }
    Ok(())
}
