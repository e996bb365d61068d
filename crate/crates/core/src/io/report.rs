use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::experiments::{ComparisonTable, MetricStats, TrialSummary};
use crate::metrics::{BiasMetrics, DecompositionReport, MetricValue, UStatistic};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

/// Anything the command line can print.
#[derive(Debug, Clone, Copy)]
pub enum Report<'a> {
    Bias(&'a [BiasMetrics]),
    Decomposition(&'a [DecompositionReport]),
    Summary(&'a TrialSummary),
    Comparison(&'a ComparisonTable),
}

impl Serialize for Report<'_> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Report::Bias(r) => r.serialize(s),
            Report::Decomposition(r) => r.serialize(s),
            Report::Summary(r) => r.serialize(s),
            Report::Comparison(r) => r.serialize(s),
        }
    }
}

/// Renders a report. Csv floats have 6 decimals and absent values are
/// written `null:<reason>`; json keeps full precision and writes absent
/// values as `{"value": null, "reason": ...}`. Output is a pure function of
/// the report.
pub fn render_report(report: &Report<'_>, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report)?;
            s.push('\n');
            Ok(s)
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            match report {
                Report::Bias(rows) => bias_csv(&mut w, rows)?,
                Report::Decomposition(rows) => decomposition_csv(&mut w, rows)?,
                Report::Summary(s) => summary_csv(&mut w, s)?,
                Report::Comparison(t) => comparison_csv(&mut w, t)?,
            }
            let bytes = w.into_inner().map_err(|e| e.into_error())?;
            Ok(String::from_utf8(bytes).expect("csv output is built from strings"))
        }
    }
}

pub fn write_report(
    report: &Report<'_>,
    path: impl AsRef<Path>,
    format: ReportFormat,
) -> Result<()> {
    std::fs::write(path, render_report(report, format)?)?;
    Ok(())
}

type Writer = csv::Writer<Vec<u8>>;

fn float(x: f64) -> String {
    format!("{x:.6}")
}

fn opt_float(x: Option<f64>) -> String {
    x.map_or_else(|| "null".to_string(), float)
}

fn metric(v: MetricValue) -> String {
    match v {
        MetricValue::Value(x) => float(x),
        MetricValue::Absent(r) => format!("null:{r}"),
    }
}

fn bias_csv(w: &mut Writer, rows: &[BiasMetrics]) -> Result<()> {
    w.write_record([
        "subgroup",
        "subgroup_auc",
        "bpsn_auc",
        "bnsp_auc",
        "pinned_auc",
        "subgroup_negative",
        "subgroup_positive",
        "background_negative",
        "background_positive",
    ])?;
    for r in rows {
        let c = r.counts;
        w.write_record([
            r.subgroup.clone(),
            metric(r.subgroup_auc),
            metric(r.bpsn_auc),
            metric(r.bnsp_auc),
            metric(r.pinned_auc),
            c.subgroup_negative.to_string(),
            c.subgroup_positive.to_string(),
            c.background_negative.to_string(),
            c.background_positive.to_string(),
        ])?;
    }
    Ok(())
}

/// Four term rows per subgroup, then `weighted_sum` (the reconstruction) and
/// `pinned_auc` (computed directly over the whole pinned set).
fn decomposition_csv(w: &mut Writer, reports: &[DecompositionReport]) -> Result<()> {
    w.write_record(["subgroup", "term", "pair_count", "weight", "mwu", "auc"])?;
    for r in reports {
        for t in &r.terms {
            w.write_record([
                r.subgroup.clone(),
                t.pair_label.to_string(),
                t.pair_count.to_string(),
                float(t.weight),
                t.mwu.to_string(),
                opt_float(t.auc),
            ])?;
        }
        let weight_sum: f64 = r.terms.iter().map(|t| t.weight).sum();
        w.write_record([
            r.subgroup.clone(),
            "weighted_sum".into(),
            r.total_pair_count.to_string(),
            float(weight_sum),
            r.terms
                .iter()
                .map(|t| t.mwu)
                .sum::<UStatistic>()
                .to_string(),
            float(r.reconstructed_pinned_auc),
        ])?;
        w.write_record([
            r.subgroup.clone(),
            "pinned_auc".into(),
            r.total_pair_count.to_string(),
            float(1.0),
            r.union_mwu.to_string(),
            float(r.direct_pinned_auc()),
        ])?;
    }
    Ok(())
}

fn stats_fields(s: &MetricStats) -> [String; 4] {
    [
        metric(s.as_metric_value()),
        opt_float(s.std_dev),
        opt_float(s.std_error),
        s.count.to_string(),
    ]
}

fn summary_csv(w: &mut Writer, s: &TrialSummary) -> Result<()> {
    w.write_record([
        "subgroup",
        "model",
        "metric",
        "baseline_mean",
        "baseline_sd",
        "baseline_se",
        "baseline_n",
        "skewed_mean",
        "skewed_sd",
        "skewed_se",
        "skewed_n",
        "delta",
    ])?;
    for r in &s.rows {
        let mut record = vec![r.subgroup.clone(), r.model.clone(), r.metric.to_string()];
        record.extend(stats_fields(&r.baseline));
        record.extend(stats_fields(&r.skewed));
        record.push(opt_float(r.delta()));
        w.write_record(&record)?;
    }
    Ok(())
}

/// Columns `subgroup,metric,model_a,model_b,improved`; `metric` is
/// `<scenario>/<metric>`, e.g. `skewed/pinned_auc`.
fn comparison_csv(w: &mut Writer, t: &ComparisonTable) -> Result<()> {
    w.write_record(["subgroup", "metric", "model_a", "model_b", "improved"])?;
    for r in &t.rows {
        w.write_record([
            r.subgroup.clone(),
            format!("{}/{}", r.scenario.as_str(), r.metric.as_str()),
            metric(r.model_a),
            metric(r.model_b),
            r.improved.to_string(),
        ])?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{AbsentReason, CellCounts};

    fn bias_rows() -> Vec<BiasMetrics> {
        vec![BiasMetrics {
            subgroup: "gay".into(),
            subgroup_auc: MetricValue::Absent(AbsentReason::EmptyNegativeSide),
            bpsn_auc: MetricValue::Value(0.5),
            bnsp_auc: MetricValue::Value(2.0 / 3.0),
            pinned_auc: MetricValue::Value(0.75),
            counts: CellCounts {
                subgroup_negative: 0,
                subgroup_positive: 2,
                background_negative: 3,
                background_positive: 4,
            },
        }]
    }

    #[test]
    fn absent_values_carry_reason() {
        let rows = bias_rows();
        let csv = render_report(&Report::Bias(&rows), ReportFormat::Csv).unwrap();
        assert_eq!(
            csv.lines().nth(1).unwrap(),
            "gay,null:empty-negative-side,0.500000,0.666667,0.750000,0,2,3,4"
        );
        let json: serde_json::Value =
            serde_json::from_str(&render_report(&Report::Bias(&rows), ReportFormat::Json).unwrap())
                .unwrap();
        assert_eq!(json[0]["subgroup_auc"]["value"], serde_json::Value::Null);
        assert_eq!(json[0]["subgroup_auc"]["reason"], "empty-negative-side");
    }

    #[test]
    fn deterministic_files() {
        let rows = bias_rows();
        let dir = tempfile::tempdir().unwrap();
        for format in [ReportFormat::Csv, ReportFormat::Json] {
            let (a, b) = (dir.path().join("a"), dir.path().join("b"));
            write_report(&Report::Bias(&rows), &a, format).unwrap();
            write_report(&Report::Bias(&rows), &b, format).unwrap();
            assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
        }
    }
}
