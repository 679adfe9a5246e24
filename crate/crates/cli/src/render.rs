//! Plain-text tables for the human output format.

use std::collections::BTreeMap;
use std::fmt::Write;

use mcmul::array::PartitionPlan;
use mcmul::cost::{CostReport, RatioSet};

use crate::csvio;
use crate::CliError;

pub fn plan_header(plan: &PartitionPlan) -> String {
    let widths: Vec<String> = plan.widths().iter().map(|w| w.to_string()).collect();
    let c = plan.controls();
    format!(
        "n={} widths={}\nh={} v={}\n",
        plan.n(),
        widths.join(","),
        c.h_string(),
        c.v_string()
    )
}

fn ratio_cell(ours: f64, reference: Option<f64>) -> String {
    match reference {
        Some(r) => format!("{ours:.3} (published {r:.2})"),
        None => format!("{ours:.3}"),
    }
}

/// One row per entry, then the ratios of every entry that carries them.
/// `baseline` names the entry the ratios are taken against, if known.
pub fn cost_table(cost: &BTreeMap<String, CostReport>, baseline: &str) -> String {
    let mut t = String::new();
    let _ = writeln!(
        t,
        "{:<16}{:>12}{:>14}{:>12}{:>12}{:>8}",
        "", "delay ns", "energy pJ", "power mW", "area", "gates"
    );
    for (name, r) in cost {
        let _ = writeln!(
            t,
            "{:<16}{:>12.4}{:>14.3}{:>12.4}{:>12.1}{:>8}",
            name,
            r.delay_s * 1e9,
            r.energy_j * 1e12,
            r.avg_power_w * 1e3,
            r.area_units,
            r.gate_count
        );
    }
    for (name, r) in cost {
        let Some(ours) = r.ratios else { continue };
        let p = r.published_ratios;
        let against = if baseline.is_empty() {
            String::new()
        } else {
            format!(" / {baseline}")
        };
        let _ = writeln!(
            t,
            "\n{name}{against}:\n  delay {}\n  power {}\n  area  {}",
            ratio_cell(ours.delay, p.map(|p| p.delay)),
            ratio_cell(ours.power, p.map(|p| p.power)),
            ratio_cell(ours.area, p.map(|p| p.area)),
        );
    }
    t
}

pub fn cost_csv(cost: &BTreeMap<String, CostReport>) -> Result<Vec<u8>, CliError> {
    let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
    let rows: Vec<Vec<String>> = cost
        .iter()
        .map(|(name, r)| {
            let (o, p) = (r.ratios, r.published_ratios);
            vec![
                name.clone(),
                format!("{:e}", r.delay_s),
                format!("{:e}", r.energy_j),
                format!("{:e}", r.avg_power_w),
                format!("{:e}", r.area_units),
                r.gate_count.to_string(),
                opt(o.map(|o| o.delay)),
                opt(o.map(|o| o.power)),
                opt(o.map(|o| o.area)),
                opt(p.map(|p| p.delay)),
                opt(p.map(|p| p.power)),
                opt(p.map(|p| p.area)),
            ]
        })
        .collect();
    csvio::write_rows(
        &[
            "entry",
            "delay_s",
            "energy_j",
            "avg_power_w",
            "area_units",
            "gate_count",
            "delay_ratio",
            "power_ratio",
            "area_ratio",
            "published_delay_ratio",
            "published_power_ratio",
            "published_area_ratio",
        ],
        &rows,
    )
}

pub fn ratio_table(candidate: &str, baseline: &str, ratios: &BTreeMap<String, RatioSet>) -> String {
    let mut t = format!("{candidate} / {baseline}\n");
    let _ = writeln!(t, "{:<16}{:>10}{:>10}{:>10}", "", "delay", "power", "area");
    for (name, r) in ratios {
        let _ = writeln!(t, "{name:<16}{:>10.4}{:>10.4}{:>10.4}", r.delay, r.power, r.area);
    }
    t
}

pub fn device_summary(lines: &[(&str, String)]) -> String {
    let width = lines.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    lines.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
}
