//! Artifact emission and the inverse parsers that freeze the CSV contracts.
//!
//! Every CSV starts with a '#'-prefixed metadata block (artifact version,
//! RNG algorithm identifier, seed, split rule, and the full config as one
//! JSON line), then the declared header, then the rows. JSON mirrors carry
//! the same config echo. All numeric CSV cells round-trip exactly: floats
//! print either in shortest form ({}) or with 17 fractional digits ({:.17e}).

use std::fs;
use std::path::PathBuf;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fisher::FisherReport;
use crate::rng::RNG_ALGORITHM;
use crate::states::CatParity;

use super::bayes_sim::{BayesAggregate, BayesGroup, RunSummary};
use super::config::{ExperimentConfig, SweepSpec};
use super::qfi::QfiRow;
use super::svg::{line_plot, Series};

/// Bumped whenever a column contract or metadata line changes.
pub const ARTIFACT_VERSION: u32 = 1;

pub const BAYES_RUNS_CSV_HEADER: &str =
    "mean_total,run_index,seed_used,delta_phi,mean_estimate,map_estimate,unimodal_at";
pub const BAYES_AGG_CSV_HEADER: &str =
    "mean_total,fc,qcrb,hl_bound,hsm_delta_phi,ci68_lo,ci68_hi,min_delta_phi";

fn metadata_block(config: &ExperimentConfig) -> Result<String> {
    Ok(format!(
        "# artifact_version = {ARTIFACT_VERSION}\n\
         # rng_algorithm = {RNG_ALGORITHM}\n\
         # seed = {}\n\
         # split_rule = {}\n\
         # config = {}\n",
        config.seed,
        config.split_rule.as_str(),
        serde_json::to_string(config)?
    ))
}

fn fmt_opt_f(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.17e}")).unwrap_or_default()
}

fn fmt_opt_u(v: Option<usize>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// QFI sweep table as one CSV document.
pub fn qfi_csv(rows: &[QfiRow], config: &ExperimentConfig) -> Result<String> {
    let mut s = metadata_block(config)?;
    s.push_str(QfiRow::CSV_HEADER);
    s.push('\n');
    for row in rows {
        s.push_str(&row.csv_row());
        s.push('\n');
    }
    Ok(s)
}

/// Per-run Bayesian table as one CSV document.
pub fn bayes_runs_csv(groups: &[BayesGroup], config: &ExperimentConfig) -> Result<String> {
    let mut s = metadata_block(config)?;
    s.push_str(BAYES_RUNS_CSV_HEADER);
    s.push('\n');
    for g in groups {
        for r in &g.runs {
            s.push_str(&format!(
                "{},{},{},{:.17e},{:.17e},{:.17e},{}\n",
                g.mean_total,
                r.run_index,
                r.seed_used,
                r.delta_phi,
                r.mean_estimate,
                r.map_estimate,
                fmt_opt_u(r.unimodal_at)
            ));
        }
    }
    Ok(s)
}

/// Aggregate Bayesian table as one CSV document.
pub fn bayes_aggregate_csv(
    groups: &[BayesGroup],
    config: &ExperimentConfig,
) -> Result<String> {
    let mut s = metadata_block(config)?;
    s.push_str(BAYES_AGG_CSV_HEADER);
    s.push('\n');
    for g in groups {
        let a = &g.aggregate;
        s.push_str(&format!(
            "{},{:.17e},{},{},{:.17e},{:.17e},{:.17e},{:.17e}\n",
            a.mean_total,
            a.fc,
            fmt_opt_f(a.qcrb),
            fmt_opt_f(a.hl_bound),
            a.hsm_delta_phi,
            a.ci68_lo,
            a.ci68_hi,
            a.min_delta_phi
        ));
    }
    Ok(s)
}

#[derive(Serialize)]
struct QfiArtifact<'a> {
    artifact_version: u32,
    rng_algorithm: &'static str,
    config: &'a ExperimentConfig,
    rows: &'a [QfiRow],
}

#[derive(Serialize)]
struct BayesArtifact<'a> {
    artifact_version: u32,
    rng_algorithm: &'static str,
    config: &'a ExperimentConfig,
    groups: &'a [BayesGroup],
}

fn output_dir(config: &ExperimentConfig) -> Result<PathBuf> {
    let dir = config.output_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

/// Write {base}.csv, {base}.json, and optionally {base}.svg for a QFI sweep.
/// Returns the written paths. An empty table writes nothing and errors.
pub fn emit_qfi_outputs(
    rows: &[QfiRow],
    config: &ExperimentConfig,
    base: &str,
    with_svg: bool,
) -> Result<Vec<PathBuf>> {
    if rows.is_empty() {
        return Err(Error::EmptySweep);
    }
    let dir = output_dir(config)?;
    let mut paths = Vec::new();

    let csv_path = dir.join(format!("{base}.csv"));
    fs::write(&csv_path, qfi_csv(rows, config)?)?;
    paths.push(csv_path);

    let json_path = dir.join(format!("{base}.json"));
    let artifact = QfiArtifact {
        artifact_version: ARTIFACT_VERSION,
        rng_algorithm: RNG_ALGORITHM,
        config,
        rows,
    };
    fs::write(&json_path, format!("{}\n", serde_json::to_string_pretty(&artifact)?))?;
    paths.push(json_path);

    if with_svg {
        let svg_path = dir.join(format!("{base}.svg"));
        fs::write(&svg_path, qfi_svg(rows, config)?)?;
        paths.push(svg_path);
    }
    Ok(paths)
}

/// Render the sweep-appropriate figure: F_Q against the per-mode mean (one
/// series per q), or against q when the sweep varies q at one total.
fn qfi_svg(rows: &[QfiRow], config: &ExperimentConfig) -> Result<String> {
    match &config.sweep {
        Some(SweepSpec::QfiVsQ { .. }) => {
            let fq: Vec<(f64, f64)> =
                rows.iter().map(|r| (r.fisher.q, r.fisher.fq_closed)).collect();
            let fc: Vec<(f64, f64)> =
                rows.iter().map(|r| (r.fisher.q, r.fisher.fc)).collect();
            line_plot(
                "Fisher information vs deformation",
                "q",
                "information",
                &[
                    Series { label: "F_Q".into(), points: fq },
                    Series { label: "F_C".into(), points: fc },
                ],
                false,
            )
        }
        _ => {
            let mut qs: Vec<f64> = rows.iter().map(|r| r.fisher.q).collect();
            qs.sort_unstable_by(f64::total_cmp);
            qs.dedup();
            let series: Vec<Series> = qs
                .iter()
                .map(|&q| Series {
                    label: format!("q={q}"),
                    points: rows
                        .iter()
                        .filter(|r| r.fisher.q == q)
                        .map(|r| (r.fisher.mean_a, r.fisher.fq_closed))
                        .collect(),
                })
                .collect();
            line_plot(
                "QFI vs per-mode photon number",
                "per-mode mean photon number",
                "F_Q",
                &series,
                false,
            )
        }
    }
}

/// Write {base}_runs.csv, {base}_aggregate.csv, {base}.json, and optionally
/// {base}.svg for a Bayesian experiment.
pub fn emit_bayes_outputs(
    groups: &[BayesGroup],
    config: &ExperimentConfig,
    base: &str,
    with_svg: bool,
) -> Result<Vec<PathBuf>> {
    if groups.is_empty() {
        return Err(Error::EmptySweep);
    }
    let dir = output_dir(config)?;
    let mut paths = Vec::new();

    let runs_path = dir.join(format!("{base}_runs.csv"));
    fs::write(&runs_path, bayes_runs_csv(groups, config)?)?;
    paths.push(runs_path);

    let agg_path = dir.join(format!("{base}_aggregate.csv"));
    fs::write(&agg_path, bayes_aggregate_csv(groups, config)?)?;
    paths.push(agg_path);

    let json_path = dir.join(format!("{base}.json"));
    let artifact = BayesArtifact {
        artifact_version: ARTIFACT_VERSION,
        rng_algorithm: RNG_ALGORITHM,
        config,
        groups,
    };
    fs::write(&json_path, format!("{}\n", serde_json::to_string_pretty(&artifact)?))?;
    paths.push(json_path);

    if with_svg {
        let svg_path = dir.join(format!("{base}.svg"));
        fs::write(&svg_path, bayes_svg(groups)?)?;
        paths.push(svg_path);
    }
    Ok(paths)
}

/// Posterior width against total photon number on a log-10 y axis, with the
/// Cramer-Rao and Heisenberg reference curves.
fn bayes_svg(groups: &[BayesGroup]) -> Result<String> {
    let pick = |f: &dyn Fn(&BayesAggregate) -> Option<f64>| -> Vec<(f64, f64)> {
        groups
            .iter()
            .filter_map(|g| f(&g.aggregate).map(|y| (g.mean_total, y)))
            .collect()
    };
    let series = vec![
        Series { label: "HSM dphi".into(), points: pick(&|a| Some(a.hsm_delta_phi)) },
        Series { label: "min dphi".into(), points: pick(&|a| Some(a.min_delta_phi)) },
        Series { label: "QCRB".into(), points: pick(&|a| a.qcrb) },
        Series { label: "HL".into(), points: pick(&|a| a.hl_bound) },
    ];
    line_plot(
        "Bayesian phase uncertainty vs total photon number",
        "total mean photon number",
        "delta phi",
        &series,
        true,
    )
}

fn data_lines(doc: &str, header: &str) -> Result<Vec<String>> {
    let mut lines = doc.lines().filter(|l| !l.starts_with('#'));
    match lines.next() {
        Some(h) if h == header => {}
        Some(h) => {
            return Err(Error::Parse(format!(
                "unexpected header {h:?} (want {header:?})"
            )))
        }
        None => return Err(Error::Parse("empty document".into())),
    }
    Ok(lines.filter(|l| !l.trim().is_empty()).map(str::to_string).collect())
}

fn cols(line: &str, n: usize) -> Result<Vec<&str>> {
    let c: Vec<&str> = line.split(',').collect();
    if c.len() != n {
        return Err(Error::Parse(format!(
            "expected {n} columns, got {} in {line:?}",
            c.len()
        )));
    }
    Ok(c)
}

fn p_f64(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad {what} value {s:?}")))
}

fn p_usize(s: &str, what: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad {what} value {s:?}")))
}

fn p_opt_f64(s: &str, what: &str) -> Result<Option<f64>> {
    if s.trim().is_empty() { Ok(None) } else { p_f64(s, what).map(Some) }
}

fn p_opt_usize(s: &str, what: &str) -> Result<Option<usize>> {
    if s.trim().is_empty() { Ok(None) } else { p_usize(s, what).map(Some) }
}

fn p_parity(s: &str) -> Result<CatParity> {
    match s.trim() {
        "even" => Ok(CatParity::Even),
        "odd" => Ok(CatParity::Odd),
        other => Err(Error::Parse(format!("bad parity value {other:?}"))),
    }
}

/// Inverse of [`qfi_csv`] (metadata lines are skipped, not reconstructed).
pub fn parse_qfi_csv(doc: &str) -> Result<Vec<QfiRow>> {
    let n = QfiRow::CSV_HEADER.split(',').count();
    data_lines(doc, QfiRow::CSV_HEADER)?
        .iter()
        .map(|line| {
            let c = cols(line, n)?;
            Ok(QfiRow {
                fisher: FisherReport {
                    q: p_f64(c[0], "q")?,
                    mean_a: p_f64(c[1], "mean_a")?,
                    mean_b: p_f64(c[2], "mean_b")?,
                    parity: p_parity(c[3])?,
                    fq_closed: p_f64(c[4], "fq_closed")?,
                    fq_variance: p_f64(c[5], "fq_variance")?,
                    fc: p_f64(c[6], "fc")?,
                    phi_eval: p_f64(c[7], "phi_eval")?,
                    nu: None,
                },
                mean_total: p_f64(c[8], "mean_total")?,
                f_hl: p_f64(c[9], "f_hl")?,
                alpha_a: p_f64(c[10], "alpha_a")?,
                alpha_b: p_f64(c[11], "alpha_b")?,
                tail_bound_a: p_f64(c[12], "tail_bound_a")?,
                tail_bound_b: p_f64(c[13], "tail_bound_b")?,
            })
        })
        .collect()
}

/// Inverse of [`bayes_runs_csv`]: (mean_total, run) pairs in file order.
pub fn parse_bayes_runs_csv(doc: &str) -> Result<Vec<(f64, RunSummary)>> {
    data_lines(doc, BAYES_RUNS_CSV_HEADER)?
        .iter()
        .map(|line| {
            let c = cols(line, 7)?;
            Ok((
                p_f64(c[0], "mean_total")?,
                RunSummary {
                    run_index: p_usize(c[1], "run_index")? as u32,
                    seed_used: c[2]
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad seed {:?}", c[2])))?,
                    delta_phi: p_f64(c[3], "delta_phi")?,
                    mean_estimate: p_f64(c[4], "mean_estimate")?,
                    map_estimate: p_f64(c[5], "map_estimate")?,
                    unimodal_at: p_opt_usize(c[6], "unimodal_at")?,
                },
            ))
        })
        .collect()
}

/// Inverse of [`bayes_aggregate_csv`].
pub fn parse_bayes_aggregate_csv(doc: &str) -> Result<Vec<BayesAggregate>> {
    data_lines(doc, BAYES_AGG_CSV_HEADER)?
        .iter()
        .map(|line| {
            let c = cols(line, 8)?;
            Ok(BayesAggregate {
                mean_total: p_f64(c[0], "mean_total")?,
                fc: p_f64(c[1], "fc")?,
                qcrb: p_opt_f64(c[2], "qcrb")?,
                hl_bound: p_opt_f64(c[3], "hl_bound")?,
                hsm_delta_phi: p_f64(c[4], "hsm_delta_phi")?,
                ci68_lo: p_f64(c[5], "ci68_lo")?,
                ci68_hi: p_f64(c[6], "ci68_hi")?,
                min_delta_phi: p_f64(c[7], "min_delta_phi")?,
            })
        })
        .collect()
}
