//! Evaluation rows, per-scenario aggregates, CSV serialization.

use std::io::Write;

/// One (scenario, seed) evaluation cell.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    pub scenario_id: String,
    pub seed: u64,
    /// Scenario parameters actually drawn for this cell.
    pub drop_m: f64,
    pub incline_deg: f64,
    pub sigma: f64,
    pub steps: u32,
    pub standing_duration_s: f64,
    pub total_reward: f64,
    pub termination: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub scenario_id: String,
    pub cells: usize,
    pub mean_duration_s: f64,
    pub median_duration_s: f64,
    pub q1_duration_s: f64,
    pub q3_duration_s: f64,
    pub mean_reward: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvalReport {
    pub rows: Vec<EvalRow>,
}

/// Linearly interpolated quantile of a sorted slice (numpy's default rule).
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    if sorted.len() == 1 {
        return sorted[0];
    }
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

impl EvalReport {
    pub fn extend(&mut self, other: EvalReport) {
        self.rows.extend(other.rows);
    }

    /// Per-scenario statistics, in first-appearance order.
    pub fn aggregates(&self) -> Vec<AggregateRow> {
        let mut order: Vec<&str> = Vec::new();
        for row in &self.rows {
            if !order.contains(&row.scenario_id.as_str()) {
                order.push(&row.scenario_id);
            }
        }
        order
            .into_iter()
            .map(|id| {
                let cells: Vec<&EvalRow> =
                    self.rows.iter().filter(|r| r.scenario_id == id).collect();
                let mut durations: Vec<f64> =
                    cells.iter().map(|r| r.standing_duration_s).collect();
                durations.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let mean = durations.iter().sum::<f64>() / durations.len() as f64;
                AggregateRow {
                    scenario_id: id.to_string(),
                    cells: cells.len(),
                    mean_duration_s: mean,
                    median_duration_s: quantile(&durations, 0.5),
                    q1_duration_s: quantile(&durations, 0.25),
                    q3_duration_s: quantile(&durations, 0.75),
                    mean_reward: cells.iter().map(|r| r.total_reward).sum::<f64>()
                        / cells.len() as f64,
                }
            })
            .collect()
    }

    pub fn write_rows_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(
            w,
            "scenario,seed,drop_m,incline_deg,sigma,steps,standing_duration_s,total_reward,termination"
        )?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                r.scenario_id,
                r.seed,
                r.drop_m,
                r.incline_deg,
                r.sigma,
                r.steps,
                r.standing_duration_s,
                r.total_reward,
                r.termination
            )?;
        }
        Ok(())
    }

    pub fn write_aggregate_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(
            w,
            "scenario,cells,mean_duration_s,median_duration_s,q1_duration_s,q3_duration_s,mean_reward"
        )?;
        for a in self.aggregates() {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                a.scenario_id,
                a.cells,
                a.mean_duration_s,
                a.median_duration_s,
                a.q1_duration_s,
                a.q3_duration_s,
                a.mean_reward
            )?;
        }
        Ok(())
    }
}
