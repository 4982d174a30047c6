//! Machine-readable run outputs.
//!
//! Every float is printed with 17 significant digits so values round-trip
//! exactly and repeated runs compare byte-for-byte. The JSON writer is
//! hand-rolled for that reason: field order, indentation and number format
//! are all pinned here.

use decotime_core::cpoles::PoleLocation;
use decotime_core::models::DecoherenceEstimate;
use decotime_core::vanhove::ExpectationSeries;
use std::fmt::Write as _;

/// One estimate with the route label it is reported under.
#[derive(Debug, Clone)]
pub struct LabeledEstimate {
    pub label: String,
    pub estimate: DecoherenceEstimate,
}

/// Pairwise relative difference between two routes' times.
#[derive(Debug, Clone)]
pub struct AgreementEntry {
    pub a: String,
    pub b: String,
    pub relative_difference: f64,
}

/// A published order-of-magnitude value compared against the computed one.
#[derive(Debug, Clone)]
pub struct ReferenceEntry {
    pub label: String,
    pub quoted_seconds: f64,
    pub computed_seconds: Option<f64>,
    pub within_one_decade: Option<bool>,
    pub note: String,
}

#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub scenario: String,
    pub model_type: String,
    pub estimates: Vec<LabeledEstimate>,
    pub agreement: Vec<AgreementEntry>,
    pub paper_reference_values: Vec<ReferenceEntry>,
    pub warnings: Vec<String>,
    pub error: Option<String>,
    pub outputs_written: Vec<String>,
}

impl RunReport {
    /// Pairwise agreement among all finite estimates, in report order.
    pub fn compute_agreement(&mut self) {
        self.agreement.clear();
        for i in 0..self.estimates.len() {
            for j in (i + 1)..self.estimates.len() {
                let a = &self.estimates[i];
                let b = &self.estimates[j];
                let (ta, tb) = (a.estimate.t_d_seconds, b.estimate.t_d_seconds);
                if !ta.is_finite() || !tb.is_finite() {
                    continue;
                }
                self.agreement.push(AgreementEntry {
                    a: a.label.clone(),
                    b: b.label.clone(),
                    relative_difference: (ta - tb).abs() / ta.abs().max(tb.abs()),
                });
            }
        }
    }

    /// Collected warnings from the report and every estimate.
    pub fn all_warnings(&self) -> Vec<String> {
        let mut out = self.warnings.clone();
        for e in &self.estimates {
            for w in &e.estimate.diagnostics.warnings {
                out.push(format!("{}: {w}", e.label));
            }
        }
        out
    }
}

/// 17-significant-digit float, the format used in every output file.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn json_float_or_null(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => fmt_float(x),
        _ => "null".to_string(),
    }
}

fn json_bool_or_null(v: Option<bool>) -> String {
    match v {
        Some(true) => "true".into(),
        Some(false) => "false".into(),
        None => "null".into(),
    }
}

fn write_string_array(out: &mut String, indent: &str, items: &[String]) {
    if items.is_empty() {
        out.push_str("[]");
        return;
    }
    out.push_str("[\n");
    for (i, item) in items.iter().enumerate() {
        let _ = write!(out, "{indent}  {}", json_string(item));
        out.push_str(if i + 1 == items.len() { "\n" } else { ",\n" });
    }
    let _ = write!(out, "{indent}]");
}

fn write_estimate(out: &mut String, e: &LabeledEstimate) {
    let est = &e.estimate;
    let _ = write!(out, "    {{\n      \"label\": {},\n", json_string(&e.label));
    let _ = writeln!(out, "      \"method\": {},", json_string(est.method.as_str()));
    let t_d = if est.is_infinite() {
        "null".to_string()
    } else {
        fmt_float(est.t_d_seconds)
    };
    let _ = writeln!(out, "      \"t_d_seconds\": {t_d},");
    let _ = writeln!(out, "      \"infinite\": {},", est.is_infinite());
    let _ = writeln!(out, "      \"gamma_ev\": {},", fmt_float(est.gamma_ev));
    out.push_str("      \"diagnostics\": {\n");
    let _ = writeln!(
        out,
        "        \"background_to_pole_ratio\": {},",
        json_float_or_null(est.diagnostics.background_to_pole_ratio)
    );
    let _ = writeln!(
        out,
        "        \"fit_residual\": {},",
        json_float_or_null(est.diagnostics.fit_residual)
    );
    let _ = writeln!(
        out,
        "        \"pole_count\": {},",
        est.diagnostics.poles.len()
    );
    match est.diagnostics.envelope_ratios {
        Some(r) => {
            let _ = writeln!(
                out,
                "        \"envelope_ratios\": [{}, {}, {}],",
                json_float_or_null(Some(r[0])),
                json_float_or_null(Some(r[1])),
                json_float_or_null(Some(r[2]))
            );
        }
        None => out.push_str("        \"envelope_ratios\": null,\n"),
    }
    out.push_str("        \"warnings\": ");
    write_string_array(out, "        ", &est.diagnostics.warnings);
    out.push_str("\n      }\n    }");
}

/// Render the report as deterministic JSON.
pub fn render_report(report: &RunReport) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(out, "  \"scenario\": {},", json_string(&report.scenario));
    let _ = writeln!(out, "  \"model_type\": {},", json_string(&report.model_type));

    out.push_str("  \"estimates\": [");
    for (i, e) in report.estimates.iter().enumerate() {
        out.push_str(if i == 0 { "\n" } else { ",\n" });
        write_estimate(&mut out, e);
    }
    out.push_str(if report.estimates.is_empty() { "],\n" } else { "\n  ],\n" });

    out.push_str("  \"agreement\": [");
    for (i, a) in report.agreement.iter().enumerate() {
        out.push_str(if i == 0 { "\n" } else { ",\n" });
        let _ = write!(
            out,
            "    {{\"a\": {}, \"b\": {}, \"relative_difference\": {}}}",
            json_string(&a.a),
            json_string(&a.b),
            fmt_float(a.relative_difference)
        );
    }
    out.push_str(if report.agreement.is_empty() { "],\n" } else { "\n  ],\n" });

    out.push_str("  \"paper_reference_values\": [");
    for (i, r) in report.paper_reference_values.iter().enumerate() {
        out.push_str(if i == 0 { "\n" } else { ",\n" });
        let _ = write!(
            out,
            "    {{\n      \"label\": {},\n      \"quoted_seconds\": {},\n      \"computed_seconds\": {},\n      \"within_one_decade\": {},\n      \"note\": {}\n    }}",
            json_string(&r.label),
            fmt_float(r.quoted_seconds),
            json_float_or_null(r.computed_seconds),
            json_bool_or_null(r.within_one_decade),
            json_string(&r.note)
        );
    }
    out.push_str(if report.paper_reference_values.is_empty() {
        "],\n"
    } else {
        "\n  ],\n"
    });

    out.push_str("  \"warnings\": ");
    write_string_array(&mut out, "  ", &report.all_warnings());
    out.push_str(",\n");

    let _ = writeln!(
        out,
        "  \"error\": {},",
        report
            .error
            .as_ref()
            .map(|e| json_string(e))
            .unwrap_or_else(|| "null".into())
    );

    out.push_str("  \"outputs_written\": ");
    write_string_array(&mut out, "  ", &report.outputs_written);
    out.push_str("\n}\n");
    out
}

/// Series CSV: one row per time point.
pub fn render_series_csv(series: &ExpectationSeries) -> String {
    let mut out = String::from("t_seconds,re,im,abs\n");
    for i in 0..series.len() {
        let v = series.values()[i];
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_float(series.times()[i]),
            fmt_float(v.re),
            fmt_float(v.im),
            fmt_float(v.norm())
        );
    }
    out
}

/// Poles CSV: one row per pole, sorted by position for determinism.
pub fn render_poles_csv(poles: &[PoleLocation]) -> String {
    let mut sorted: Vec<&PoleLocation> = poles.iter().collect();
    sorted.sort_by(|a, b| {
        (a.position.re, a.position.im)
            .partial_cmp(&(b.position.re, b.position.im))
            .unwrap()
    });
    let mut out = String::from("re_eV,im_eV,residue_re,residue_im,multiplicity,source\n");
    for p in sorted {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_float(p.position.re),
            fmt_float(p.position.im),
            fmt_float(p.residue.re),
            fmt_float(p.residue.im),
            p.multiplicity,
            p.source.as_str()
        );
    }
    out
}
