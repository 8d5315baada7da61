//! Human-readable tables and CSV for evaluation output.

use std::fmt::Write;

use super::protocol::{EvalReport, RerankComparison, SweepRow};

pub const SWEEP_CSV_HEADER: &str = "candidates,w_sem,w_lex,p_at_10,ndcg_at_10";

pub fn report_table(label: &str, r: &EvalReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<18} {:>20} {:>20}",
        "configuration",
        format!("P@{}", r.k),
        format!("nDCG@{}", r.k)
    );
    let _ = writeln!(
        out,
        "{:<18} {:>20} {:>20}",
        label,
        format!("{:.4} ± {:.4}", r.mean_precision_at_k, r.std_precision_at_k),
        format!("{:.4} ± {:.4}", r.mean_ndcg_at_k, r.std_ndcg_at_k),
    );
    let _ = writeln!(out, "seeds: {}", r.n_seeds);
    out
}

pub fn comparison_table(c: &RerankComparison) -> String {
    let mut out = String::new();
    let k = c.baseline.k;
    let _ = writeln!(
        out,
        "{:<18} {:>20} {:>20}",
        "configuration",
        format!("P@{k}"),
        format!("nDCG@{k}")
    );
    for (label, r) in [("baseline hybrid", &c.baseline), ("reranked", &c.reranked)] {
        let _ = writeln!(
            out,
            "{:<18} {:>20} {:>20}",
            label,
            format!("{:.4} ± {:.4}", r.mean_precision_at_k, r.std_precision_at_k),
            format!("{:.4} ± {:.4}", r.mean_ndcg_at_k, r.std_ndcg_at_k),
        );
    }
    let _ = writeln!(
        out,
        "{:<18} {:>20} {:>20}",
        "delta",
        format!("{:+.4}", c.delta_p),
        format!("{:+.4}", c.delta_ndcg)
    );
    out
}

pub fn sweep_table(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>10} {:>6} {:>6} {:>8} {:>10}",
        "candidates", "sem", "lex", "P@10", "nDCG@10"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:>10} {:>6.1} {:>6.1} {:>8.4} {:>10.4}",
            r.candidates, r.w_sem, r.w_lex, r.p_at_10, r.ndcg_at_10
        );
    }
    out
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{:.6},{:.6}",
            r.candidates, r.w_sem, r.w_lex, r.p_at_10, r.ndcg_at_10
        );
    }
    out
}
