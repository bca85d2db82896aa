use std::io::Write;
use std::path::{Path, PathBuf};

use pcd_core::design_search::{enumerate, pareto_front};
use pcd_core::quasistatic::{solve_case, DriveCase, PowerFlowReport};
use pcd_core::sweep::run_sweep;
use pcd_core::{compound_efficiencies, Direction, MeshEfficiencySet, StageGeometry};
use serde::Serialize;

use crate::config::{load, AnalysisConfig, Format, OperatingPoint, QueryFile, SweepFile};
use crate::error::CliError;
use crate::report::{
    sig, AnalysisReport, CandidateRow, SearchReport, StagePowerFlow, SweepReport,
    TrainPowerFlow, CANDIDATE_HEADER,
};
use crate::IoArgs;

pub fn analyze(io: &IoArgs) -> Result<(), CliError> {
    let cfg: AnalysisConfig = load(&io.config)?;
    let report = analysis_report(&cfg).map_err(|e| CliError::from_core(&io.config, e))?;
    let format = io.format.or(cfg.format).unwrap_or(Format::Json);
    let body = match format {
        Format::Json => to_json(&report),
        Format::Csv => to_csv(&["quantity", "value", "unit"], report.csv_rows()),
    };
    emit(&io.out, &body)
}

/// Builds the analysis report for a config; validation happens here.
pub fn analysis_report(cfg: &AnalysisConfig) -> pcd_core::Result<AnalysisReport> {
    let geom = cfg.train.geometry();
    let mesh = cfg.mesh.resolve();
    geom.ensure_valid()?;
    mesh.validate()?;
    let eff = compound_efficiencies(&geom, &mesh)?;
    let flow = cfg
        .operating_point
        .map(|op| train_power_flow(&geom, &mesh, &op))
        .transpose()?;
    AnalysisReport::new(&cfg.train, &mesh, &eff, flow)
}

/// Runs the stages in the order power passes through them, handing each
/// stage's output power to the next at the shared carrier speed.
pub fn train_power_flow(
    geom: &pcd_core::CompoundTrainGeometry,
    mesh: &MeshEfficiencySet,
    op: &OperatingPoint,
) -> pcd_core::Result<TrainPowerFlow> {
    let stages: [(&str, StageGeometry); 2] = match op.direction {
        Direction::Forward => [
            ("2K-H", geom.input_stage.into()),
            ("K-H-V", geom.output_stage.into()),
        ],
        Direction::Backward => [
            ("K-H-V", geom.output_stage.into()),
            ("2K-H", geom.input_stage.into()),
        ],
    };
    let mut torque = op.input_torque;
    let mut speed = op.input_speed;
    let mut solved: Vec<(&str, PowerFlowReport)> = Vec::new();
    for (label, stage) in stages {
        let r = solve_case(&stage, &DriveCase::new(op.direction, torque, speed, *mesh))?;
        let carrier = r.speeds.carrier.absolute;
        let stop = r.power_out <= 0.0;
        solved.push((label, r));
        if stop {
            break;
        }
        // The carrier is the output of the first forward stage and of the
        // first backward stage alike.
        speed = carrier;
        torque = r.power_out / carrier.abs();
    }
    let power_in = solved[0].1.power_in;
    let complete = solved.len() == 2;
    let last = solved.last().expect("at least one stage").1;
    let efficiency: f64 = solved.iter().map(|(_, r)| r.efficiency).product();
    Ok(TrainPowerFlow {
        direction: op.direction,
        input_torque: sig(op.input_torque),
        input_speed: sig(op.input_speed),
        stages: solved
            .iter()
            .map(|(label, r)| StagePowerFlow::new(label, r))
            .collect(),
        power_in: sig(power_in),
        power_out: sig(last.power_out),
        efficiency: sig(efficiency),
        self_locking: !complete || last.self_locking,
    })
}

pub fn sweep(io: &IoArgs) -> Result<(), CliError> {
    let file: SweepFile = load(&io.config)?;
    let spec = file.to_spec().map_err(|message| CliError::Config {
        path: io.config.clone(),
        message,
    })?;
    let table = run_sweep(&spec).map_err(|e| CliError::from_core(&io.config, e))?;
    let report = SweepReport::new(&spec, &table);
    let body = match io.format.or(file.format).unwrap_or(Format::Csv) {
        Format::Json => to_json(&report),
        Format::Csv => {
            let header = report.csv_header();
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            to_csv(&header, report.csv_rows())
        }
    };
    emit(&io.out, &body)
}

pub fn search(io: &IoArgs) -> Result<(), CliError> {
    let file: QueryFile = load(&io.config)?;
    let report = search_report(&file).map_err(|e| CliError::from_core(&io.config, e))?;
    let body = match io.format.or(file.format).unwrap_or(Format::Csv) {
        Format::Json => to_json(&report),
        Format::Csv => to_csv(
            &CANDIDATE_HEADER,
            report.candidates.iter().map(CandidateRow::csv_record),
        ),
    };
    emit(&io.out, &body)?;
    if report.candidates.is_empty() {
        return Err(CliError::EmptyResult);
    }
    Ok(())
}

pub fn search_report(file: &QueryFile) -> pcd_core::Result<SearchReport> {
    let query = file.to_query();
    let mut found = enumerate(&query)?;
    if file.pareto_only {
        found = pareto_front(&found);
    }
    Ok(SearchReport {
        target_ratio: sig(query.target_ratio),
        ratio_tolerance: sig(query.ratio_tolerance),
        direction_of_merit: query.direction_of_merit,
        pareto_only: file.pareto_only,
        count: found.len(),
        candidates: found
            .iter()
            .enumerate()
            .map(|(k, c)| CandidateRow::new(k + 1, c))
            .collect(),
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn to_csv<R, I>(header: &[&str], rows: I) -> String
where
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
    I: IntoIterator<Item = R>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn emit(out: &str, body: &str) -> Result<(), CliError> {
    if out == "-" || out == "stdout" {
        let mut stdout = std::io::stdout().lock();
        return stdout
            .write_all(body.as_bytes())
            .and_then(|_| stdout.flush())
            .map_err(|source| CliError::Write {
                path: PathBuf::from("<stdout>"),
                source,
            });
    }
    std::fs::write(Path::new(out), body).map_err(|source| CliError::Write {
        path: PathBuf::from(out),
        source,
    })
}
