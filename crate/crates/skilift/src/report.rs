//! Metrics records and text tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use skilift_core::accounting::BenchReport;
use skilift_core::{CostModel, Metrics};

pub const SCHEMA: u32 = 1;

/// Versioned metrics record, one per synthesized circuit or accounted step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub schema: u32,
    pub m: usize,
    pub b: usize,
    pub mode: String,
    pub cost_model: String,
    pub rotation_depth: u64,
    pub total_depth: u64,
    pub swap_depth: u64,
    pub width: u64,
    pub gate_counts: BTreeMap<String, u64>,
    pub ratios: BTreeMap<String, f64>,
}

impl MetricsRecord {
    pub fn new(m: usize, b: usize, mode: &str, model: &CostModel, metrics: &Metrics) -> Self {
        MetricsRecord {
            schema: SCHEMA,
            m,
            b,
            mode: mode.into(),
            cost_model: model.name.into(),
            rotation_depth: metrics.rotation_depth,
            total_depth: metrics.total_depth,
            swap_depth: metrics.swap_depth,
            width: metrics.width,
            gate_counts: metrics.gate_counts.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            ratios: BTreeMap::new(),
        }
    }

    /// Baseline over optimized for depths, optimized over baseline for width.
    pub fn comparison(baseline: &MetricsRecord, optimized: &MetricsRecord) -> BTreeMap<String, f64> {
        let r = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        BTreeMap::from([
            ("rotation_depth".to_string(), r(baseline.rotation_depth, optimized.rotation_depth)),
            ("total_depth".to_string(), r(baseline.total_depth, optimized.total_depth)),
            ("width".to_string(), r(optimized.width, baseline.width)),
        ])
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} (m={} b={} cost={})", self.mode, self.m, self.b, self.cost_model);
        let _ = writeln!(out, "  rotation_depth {}", self.rotation_depth);
        let _ = writeln!(out, "  total_depth    {}", self.total_depth);
        let _ = writeln!(out, "  swap_depth     {}", self.swap_depth);
        let _ = writeln!(out, "  width          {}", self.width);
        let counts: Vec<String> = self.gate_counts.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(out, "  gates          {}", counts.join(" "));
        for (k, v) in &self.ratios {
            let _ = writeln!(out, "  ratio {k:<14} {v:.3}");
        }
        out
    }
}

/// JSON form of a bench run: one record pair and factor set per `b`.
pub fn bench_json(reports: &[BenchReport]) -> serde_json::Value {
    let runs: Vec<serde_json::Value> = reports
        .iter()
        .map(|r| {
            let model = if r.cost_model == CostModel::CIRCUIT.name { CostModel::CIRCUIT } else { CostModel::LATTICE_SURGERY };
            let mut opt = MetricsRecord::new(r.m, r.b, "optimized", &model, &r.optimized.step);
            let base = MetricsRecord::new(r.m, r.b, "baseline", &model, &r.baseline);
            opt.ratios = MetricsRecord::comparison(&base, &opt);
            let f = &r.factors;
            serde_json::json!({
                "b": r.b,
                "optimized": opt,
                "baseline": base,
                "factors": {
                    "rotation_depth": f.rotation_depth,
                    "total_depth": f.total_depth,
                    "width": f.width,
                    "sweep_rotation_depth": f.sweep_rotation_depth,
                    "template": f.template,
                    "parallel": f.parallel,
                    "quad_template": f.quad_template,
                    "quad_parallel": f.quad_parallel,
                    "mean_quad_blocks": f.mean_quad_blocks,
                },
                "terms": r.terms,
                "distinct_stage_shapes": r.optimized.distinct_shapes,
                "peak_copies": r.optimized.peak_copies,
                "peak_flags": r.optimized.peak_flags,
                "stages": r.kinds.iter().map(|(k, t)| (k.name().to_string(), serde_json::json!({
                    "stages": t.stages,
                    "blocks": t.blocks,
                    "terms": t.terms,
                    "swap_layers": t.swap_layers,
                    "swaps": t.swap_count,
                }))).collect::<serde_json::Map<_, _>>(),
            })
        })
        .collect();
    serde_json::json!({ "schema": SCHEMA, "runs": runs })
}

pub fn bench_text(reports: &[BenchReport]) -> String {
    let mut out = String::new();
    let Some(first) = reports.first() else {
        return out;
    };
    let _ = writeln!(out, "bench m={} cost={} terms={}", first.m, first.cost_model, first.terms);
    let _ = writeln!(out, "{:>3} {:>14} {:>14} {:>10} {:>8} {:>8} {:>9}", "b", "base_rot", "opt_rot", "rot_ratio", "base_w", "opt_w", "w_ratio");
    for r in reports {
        let _ = writeln!(
            out,
            "{:>3} {:>14} {:>14} {:>10.2} {:>8} {:>8} {:>9.3}",
            r.b,
            r.baseline.rotation_depth,
            r.optimized.step.rotation_depth,
            r.factors.rotation_depth,
            r.baseline.width,
            r.optimized.step.width,
            r.factors.width
        );
    }
    for r in reports {
        let f = &r.factors;
        let _ = writeln!(out, "factors b={}:", r.b);
        let _ = writeln!(out, "  rotation ratio per sweep {:.3} = template {:.4} x parallel {:.3}", f.sweep_rotation_depth, f.template, f.parallel);
        let _ = writeln!(out, "  quad: template {:.4}, parallel {:.3}, blocks per stage {:.3}", f.quad_template, f.quad_parallel, f.mean_quad_blocks);
        let _ = writeln!(out, "  total depth ratio {:.3}, swap depth {}", f.total_depth, r.optimized.step.swap_depth);
        let _ = writeln!(out, "  ancillas: copies {} flags {}", r.optimized.peak_copies, r.optimized.peak_flags);
    }
    out
}
