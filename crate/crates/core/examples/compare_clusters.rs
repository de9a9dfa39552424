//! Nonparametric comparisons between clusters and coder agreement.
//!
//! Run with `cargo run --example compare_clusters`.

use engagenet::stats::{
    cohens_kappa, fisher_exact, mann_whitney_u, mann_whitney_u_with, odds_ratio_woolf_ci, Alternative, MwuMethod,
};

fn main() -> engagenet::Result<()> {
    // Satisfaction ratings on a 1-7 scale.
    let cluster_a = [6.0, 5.0, 7.0, 6.0, 5.0, 6.0, 4.0];
    let cluster_b = [4.0, 3.0, 5.0, 4.0, 2.0, 4.0];
    let exact = mann_whitney_u(&cluster_a, &cluster_b, Alternative::TwoSided)?;
    let approx = mann_whitney_u_with(&cluster_a, &cluster_b, Alternative::TwoSided, MwuMethod::NormalApprox)?;
    println!(
        "U = {}, exact p = {:.4}, normal p = {:.4}, rank-biserial = {:.3}, common-language = {:.3}",
        exact.u, exact.p_value, approx.p_value, exact.rank_biserial, exact.common_language
    );

    // Rows: cluster; columns: high / low performing team.
    let table = [[12, 3], [4, 10]];
    let f = fisher_exact(&table, Alternative::Greater)?;
    println!(
        "Fisher one-tailed p = {:.5}, two-tailed p = {:.5}, OR = {:.2} (95% CI {:.2}-{:.2})",
        f.p_one_tailed, f.p_two_tailed, f.odds_ratio, f.ci_low, f.ci_high
    );

    let zero_cell = odds_ratio_woolf_ci(&[[10, 0], [5, 5]], 0.95)?;
    println!(
        "with a zero cell: OR = {:.2} (corrected: {})",
        zero_cell.odds_ratio, zero_cell.corrected
    );

    let k = cohens_kappa(&[vec![20, 5], vec![10, 15]])?;
    println!(
        "kappa = {:.3} (observed {:.2}, chance {:.2})",
        k.kappa, k.observed_agreement, k.expected_agreement
    );
    Ok(())
}
