//! CSV enrichment of study records.
//!
//! Input header: `study_id,n,min,q1,median,q3,max` optionally followed by
//! `mean_method,sd_method`. Empty cells are absent fields. Each valid row is
//! written back unchanged with the columns
//! `scenario,est_mean,est_sd,applied_mean_method,applied_sd_method,flags`
//! appended. Rows that cannot be estimated go to `<output>.rejects.csv` as
//! `line_no,reason`.

use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::{
    default_methods, estimate, Estimate, FiveNumberSummary, MethodId, QuartileSummary,
    RangeSummary, Scenario, ScenarioInput,
};
use crate::format::format_trimmed;

const BASE_COLUMNS: [&str; 7] = ["study_id", "n", "min", "q1", "median", "q3", "max"];
const METHOD_COLUMNS: [&str; 2] = ["mean_method", "sd_method"];
const ADDED_COLUMNS: [&str; 6] = [
    "scenario",
    "est_mean",
    "est_sd",
    "applied_mean_method",
    "applied_sd_method",
    "flags",
];

/// Decimal places in emitted estimates.
pub const OUTPUT_DECIMALS: u32 = 6;

/// One parsed input row.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyRecord {
    pub study_id: String,
    pub n: u64,
    pub min: Option<f64>,
    pub q1: Option<f64>,
    pub median: f64,
    pub q3: Option<f64>,
    pub max: Option<f64>,
    pub mean_method: Option<MethodId>,
    pub sd_method: Option<MethodId>,
}

/// A record with its estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct EnrichedRecord {
    pub record: StudyRecord,
    pub estimate: Estimate,
}

/// Methods applied to rows that do not name their own.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MethodDefaults {
    pub mean: Option<MethodId>,
    pub sd: Option<MethodId>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BatchCounts {
    pub processed: u64,
    pub enriched: u64,
    pub rejected: u64,
}

/// Scenario implied by which fields are present.
pub fn detect_scenario(record: &StudyRecord) -> Result<Scenario> {
    let present = [
        ("min", record.min.is_some()),
        ("q1", record.q1.is_some()),
        ("q3", record.q3.is_some()),
        ("max", record.max.is_some()),
    ];
    let extremes = record.min.is_some() || record.max.is_some();
    let quartiles = record.q1.is_some() || record.q3.is_some();
    let missing: Vec<&str> = present
        .iter()
        .filter(|(name, has)| {
            let wanted = match *name {
                "min" | "max" => extremes || !quartiles,
                _ => quartiles,
            };
            wanted && !has
        })
        .map(|(name, _)| *name)
        .collect();
    if !missing.is_empty() {
        return Err(Error::UnsupportedPattern(format!(
            "missing {}",
            missing.join(", ")
        )));
    }
    Ok(match (extremes, quartiles) {
        (true, true) => Scenario::C2,
        (true, false) => Scenario::C1,
        _ => Scenario::C3,
    })
}

impl StudyRecord {
    /// Validated estimator input for the detected scenario.
    pub fn scenario_input(&self) -> Result<ScenarioInput> {
        let scenario = detect_scenario(self)?;
        // detect_scenario guarantees the fields used below are present
        let get = |v: Option<f64>| v.unwrap_or(f64::NAN);
        Ok(match scenario {
            Scenario::C1 => {
                RangeSummary::new(get(self.min), self.median, get(self.max), self.n)?.into()
            }
            Scenario::C2 => FiveNumberSummary::new(
                get(self.min),
                get(self.q1),
                self.median,
                get(self.q3),
                get(self.max),
                self.n,
            )?
            .into(),
            Scenario::C3 => {
                QuartileSummary::new(get(self.q1), self.median, get(self.q3), self.n)?.into()
            }
        })
    }

    /// Estimate with row methods first, then `defaults`, then the scenario
    /// defaults.
    pub fn enrich(self, defaults: MethodDefaults) -> Result<EnrichedRecord> {
        let input = self.scenario_input()?;
        let (scenario_mean, scenario_sd) = default_methods(input.scenario());
        let mean = self.mean_method.or(defaults.mean).unwrap_or(scenario_mean);
        let sd = self.sd_method.or(defaults.sd).unwrap_or(scenario_sd);
        let estimate = estimate(&input, Some(mean), Some(sd))?;
        Ok(EnrichedRecord {
            record: self,
            estimate,
        })
    }
}

fn parse_optional(name: &str, raw: &str) -> Result<Option<f64>> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Ok(None);
    }
    let v: f64 = raw
        .parse()
        .map_err(|_| Error::Domain(format!("{name}: '{raw}' is not a number")))?;
    if !v.is_finite() {
        return Err(Error::Domain(format!("{name}: '{raw}' is not finite")));
    }
    Ok(Some(v))
}

fn parse_method(name: &str, raw: &str, want_mean: bool) -> Result<Option<MethodId>> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Ok(None);
    }
    let m: MethodId = raw.parse()?;
    if m.is_mean() != want_mean {
        return Err(Error::Domain(format!(
            "{name}: '{raw}' is not a {} method",
            if want_mean {
                "mean"
            } else {
                "standard deviation"
            }
        )));
    }
    Ok(Some(m))
}

fn parse_record(fields: &csv::StringRecord, with_methods: bool) -> Result<StudyRecord> {
    let expected = BASE_COLUMNS.len()
        + if with_methods {
            METHOD_COLUMNS.len()
        } else {
            0
        };
    if fields.len() != expected {
        return Err(Error::Domain(format!(
            "expected {expected} fields, found {}",
            fields.len()
        )));
    }
    let n_raw = fields[1].trim();
    let n: u64 = n_raw
        .parse()
        .map_err(|_| Error::Domain(format!("n: '{n_raw}' is not a positive integer")))?;
    let median = parse_optional("median", &fields[4])?
        .ok_or_else(|| Error::UnsupportedPattern("missing median".into()))?;
    let (mean_method, sd_method) = if with_methods {
        (
            parse_method("mean_method", &fields[7], true)?,
            parse_method("sd_method", &fields[8], false)?,
        )
    } else {
        (None, None)
    };
    Ok(StudyRecord {
        study_id: fields[0].to_string(),
        n,
        min: parse_optional("min", &fields[2])?,
        q1: parse_optional("q1", &fields[3])?,
        median,
        q3: parse_optional("q3", &fields[5])?,
        max: parse_optional("max", &fields[6])?,
        mean_method,
        sd_method,
    })
}

/// Whether the header carries the optional method columns.
fn check_header(header: &csv::StringRecord) -> Result<bool> {
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    let full: Vec<&str> = BASE_COLUMNS
        .iter()
        .chain(METHOD_COLUMNS.iter())
        .copied()
        .collect();
    if names == BASE_COLUMNS {
        Ok(false)
    } else if names == full {
        Ok(true)
    } else {
        Err(Error::Csv(format!(
            "header must be '{}' optionally followed by ',{}', found '{}'",
            BASE_COLUMNS.join(","),
            METHOD_COLUMNS.join(","),
            names.join(",")
        )))
    }
}

/// Path of the rejects file belonging to `output`.
pub fn rejects_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".rejects.csv");
    PathBuf::from(s)
}

/// Outcome of [`process`] on in-memory streams.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchReport {
    pub counts: BatchCounts,
    /// `(line_no, reason)` for every rejected row.
    pub rejects: Vec<(u64, String)>,
}

/// Enrich CSV from `input` into `output`. Rows are estimated in parallel and
/// written in input order.
pub fn process<R: Read, W: Write>(
    input: R,
    output: W,
    defaults: MethodDefaults,
) -> Result<BatchReport> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(input);
    let header = reader.headers()?.clone();
    let with_methods = check_header(&header)?;

    let mut rows = Vec::new();
    for result in reader.records() {
        let record = result?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        rows.push((line, record));
    }

    let outcomes: Vec<std::result::Result<EnrichedRecord, String>> = rows
        .par_iter()
        .map(|(_, fields)| {
            parse_record(fields, with_methods)
                .and_then(|r| r.enrich(defaults))
                .map_err(|e| e.to_string())
        })
        .collect();

    let mut writer = csv::Writer::from_writer(output);
    let mut out_header = header.clone();
    for c in ADDED_COLUMNS {
        out_header.push_field(c);
    }
    writer.write_record(&out_header)?;

    let mut counts = BatchCounts::default();
    let mut rejects = Vec::new();
    for ((line, fields), outcome) in rows.iter().zip(outcomes) {
        counts.processed += 1;
        match outcome {
            Ok(enriched) => {
                let e = &enriched.estimate;
                let mut out = fields.clone();
                out.push_field(&e.scenario.to_string());
                out.push_field(&format_trimmed(e.mean, OUTPUT_DECIMALS));
                out.push_field(&format_trimmed(e.sd, OUTPUT_DECIMALS));
                out.push_field(e.mean_method.token());
                out.push_field(e.sd_method.token());
                let flags: Vec<&str> = e.flags.iter().map(|f| f.token()).collect();
                out.push_field(&flags.join(";"));
                writer.write_record(&out)?;
                counts.enriched += 1;
            }
            Err(reason) => {
                rejects.push((*line, reason));
                counts.rejected += 1;
            }
        }
    }
    writer.flush()?;
    Ok(BatchReport { counts, rejects })
}

/// Enrich the file at `input` into `output` and write the rejects file next
/// to it.
pub fn process_file(input: &Path, output: &Path, defaults: MethodDefaults) -> Result<BatchCounts> {
    let source = File::open(input)
        .map_err(|e| Error::Io(format!("cannot open {}: {e}", input.display())))?;
    let mut enriched = Vec::new();
    let report = process(source, &mut enriched, defaults)?;

    let mut rejects = csv::Writer::from_writer(Vec::new());
    rejects.write_record(["line_no", "reason"])?;
    for (line, reason) in &report.rejects {
        rejects.write_record([line.to_string(), reason.clone()])?;
    }
    let rejects = rejects.into_inner().map_err(|e| Error::Io(e.to_string()))?;

    std::fs::write(output, enriched)
        .map_err(|e| Error::Io(format!("cannot write {}: {e}", output.display())))?;
    let path = rejects_path(output);
    std::fs::write(&path, rejects)
        .map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(report.counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(min: Option<f64>, q1: Option<f64>, q3: Option<f64>, max: Option<f64>) -> StudyRecord {
        StudyRecord {
            study_id: "s".into(),
            n: 9,
            min,
            q1,
            median: 5.0,
            q3,
            max,
            mean_method: None,
            sd_method: None,
        }
    }

    fn run(text: &str) -> (String, BatchReport) {
        let mut out = Vec::new();
        let report = process(text.as_bytes(), &mut out, MethodDefaults::default()).unwrap();
        (String::from_utf8(out).unwrap(), report)
    }

    #[test]
    fn scenario_detection() {
        assert_eq!(
            detect_scenario(&record(Some(1.0), None, None, Some(9.0))).unwrap(),
            Scenario::C1
        );
        assert_eq!(
            detect_scenario(&record(Some(1.0), Some(3.0), Some(7.0), Some(9.0))).unwrap(),
            Scenario::C2
        );
        assert_eq!(
            detect_scenario(&record(None, Some(3.0), Some(7.0), None)).unwrap(),
            Scenario::C3
        );
        let err = detect_scenario(&record(Some(1.0), None, None, None)).unwrap_err();
        assert_eq!(err, Error::UnsupportedPattern("missing max".into()));
        let err = detect_scenario(&record(Some(1.0), Some(3.0), None, Some(9.0))).unwrap_err();
        assert_eq!(err, Error::UnsupportedPattern("missing q3".into()));
        let err = detect_scenario(&record(None, None, None, None)).unwrap_err();
        assert_eq!(err, Error::UnsupportedPattern("missing min, max".into()));
    }

    #[test]
    fn exact_constants_row() {
        let text = "study_id,n,min,q1,median,q3,max,mean_method,sd_method\n\
                    a,5,0,0,0.5,0.990,2.326,,sd_wan_exact\n";
        let (out, report) = run(text);
        assert_eq!(
            report.counts,
            BatchCounts {
                processed: 1,
                enriched: 1,
                rejected: 0
            }
        );
        let row = out.lines().nth(1).unwrap();
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells[9], "C2");
        let sd: f64 = cells[11].parse().unwrap();
        assert!((sd - 1.0).abs() < 1e-3);
        assert_eq!(cells[13], "sd_wan_exact");
    }

    #[test]
    fn empty_file() {
        let (out, report) = run("study_id,n,min,q1,median,q3,max\n");
        assert_eq!(report.counts, BatchCounts::default());
        assert_eq!(
            out,
            "study_id,n,min,q1,median,q3,max,scenario,est_mean,est_sd,applied_mean_method,applied_sd_method,flags\n"
        );
    }

    #[test]
    fn passthrough_and_rejects() {
        let text = "study_id,n,min,q1,median,q3,max\n\
                    ok, 11 ,1.50,,3,,7.0\n\
                    bad,11,4,,3,,7\n\
                    pat,11,1,,3,,\n\
                    num,x,1,,3,,7\n\
                    c3,21,,2,3,4.25,\n";
        let (out, report) = run(text);
        assert_eq!(
            report.counts,
            BatchCounts {
                processed: 5,
                enriched: 2,
                rejected: 3
            }
        );
        let lines: Vec<&str> = out.lines().collect();
        assert!(lines[1].starts_with("ok, 11 ,1.50,,3,,7.0,C1,"));
        assert!(lines[2].starts_with("c3,21,,2,3,4.25,,C3,3.083333,"));
        assert_eq!(report.rejects[0].0, 3);
        assert!(report.rejects[0].1.contains("ordering"));
        assert_eq!(report.rejects[1].0, 4);
        assert!(report.rejects[1].1.contains("missing max"));
        assert_eq!(report.rejects[2].0, 5);
    }

    #[test]
    fn method_precedence() {
        let text = "study_id,n,min,q1,median,q3,max,mean_method,sd_method\n\
                    a,9,1,,3,,7,,\n\
                    b,9,1,,3,,7,mean_full,sd_range_rule\n\
                    c,9,1,,3,,7,,sd_bland\n\
                    d,9,1,,3,,7,sd_bland,\n";
        let defaults = MethodDefaults {
            mean: None,
            sd: Some(MethodId::SdHozoAdaptive),
        };
        let mut out = Vec::new();
        let report = process(text.as_bytes(), &mut out, defaults).unwrap();
        let out = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert!(lines[1].ends_with(",mean_simple,sd_hozo_adaptive,"));
        assert!(lines[2].ends_with(",mean_full,sd_range_rule,"));
        assert_eq!(report.counts.rejected, 2);
        assert!(report.rejects[0]
            .1
            .contains("not available for scenario C1"));
        assert!(report.rejects[1].1.contains("not a mean method"));
    }

    #[test]
    fn flags_are_joined() {
        let text = "study_id,n,min,q1,median,q3,max,mean_method,sd_method\n\
                    a,10,,2,3,5,,,sd_wan_exact\n";
        let (out, _) = run(text);
        assert!(out
            .lines()
            .nth(1)
            .unwrap()
            .ends_with(",BLOM_APPROXIMATION_USED;ETA_FALLBACK_USED"));
    }

    #[test]
    fn bad_header_is_file_error() {
        let mut out = Vec::new();
        let err = process(
            "id,n,min,q1,median,q3,max\n".as_bytes(),
            &mut out,
            MethodDefaults::default(),
        );
        assert!(matches!(err, Err(Error::Csv(_))));
        let err = process(
            &b"study_id,n,min,q1,median,q3,max\n\xff,1,2,,3,,4\n"[..],
            &mut out,
            MethodDefaults::default(),
        );
        assert!(err.is_err());
    }

    #[test]
    fn wrong_field_count_is_row_error() {
        let (_, report) = run("study_id,n,min,q1,median,q3,max\na,9,1,3,7\n");
        assert_eq!(report.counts.rejected, 1);
        assert!(report.rejects[0].1.contains("expected 7 fields"));
    }

    #[test]
    fn rejects_file_name() {
        assert_eq!(
            rejects_path(Path::new("/tmp/out.csv")),
            PathBuf::from("/tmp/out.csv.rejects.csv")
        );
    }
}
