//! Delimited-text output: per-trial results, per-method summaries, and
//! visit-probability plot data for the bar game.

use std::io::{Read, Write};

use twinsgame_core::trial::SummaryRow;
use twinsgame_core::{ResultRow, ResultTable};

pub fn write_results_csv<W: Write>(table: &ResultTable, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in &table.rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_results_csv<R: Read>(input: R) -> csv::Result<Vec<ResultRow>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

pub fn write_summary_csv<W: Write>(summary: &[SummaryRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in summary {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Tab-separated `capacity method mean_p std_p trials` lines for every
/// method that reports a visit probability.
pub fn write_plot_data<W: Write>(summary: &[SummaryRow], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().delimiter(b'\t').from_writer(out);
    w.write_record(["capacity", "method", "mean_p", "std_p", "trials"])?;
    for row in summary {
        let (Some(c), Some(m), Some(s)) = (row.capacity, row.visit_prob_mean, row.visit_prob_std) else {
            continue;
        };
        w.write_record([c.to_string(), row.method.to_string(), format!("{m:.6}"), format!("{s:.6}"), row.ok.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Fixed-width summary for terminals.
pub fn format_summary(summary: &[SummaryRow]) -> String {
    let mut out = format!("{:<10} {:<14} {:>12} {:>12} {:>8} {:>6}\n", "capacity", "method", "payoff", "regret", "visit_p", "ok");
    for r in summary {
        let cap = r.capacity.map_or("-".to_string(), |c| c.to_string());
        let visit = r.visit_prob_mean.map_or("-".to_string(), |p| format!("{p:.4}"));
        out.push_str(&format!(
            "{:<10} {:<14} {:>12.4} {:>12.4} {:>8} {:>3}/{:<2}\n",
            cap,
            r.method.to_string(),
            r.mean_payoff,
            r.mean_regret,
            visit,
            r.ok,
            r.ok + r.failed
        ));
    }
    out
}
