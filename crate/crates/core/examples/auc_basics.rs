//! Mann-Whitney U and AUC with tied scores.

use pinned_auc::metrics::{auc, auc_labeled, mann_whitney_u, Label};

fn main() -> pinned_auc::Result<()> {
    let negatives = [0.1, 0.4, 0.4, 0.7];
    let positives = [0.4, 0.8, 0.9];

    // The tie at 0.4 counts half for each of the two negatives it meets.
    let u = mann_whitney_u(&negatives, &positives)?;
    println!("U = {u} over {} pairs", negatives.len() * positives.len());
    println!("AUC = {:.4}", auc(&negatives, &positives)?);

    let labeled = [
        (0.2, Label::Negative),
        (0.6, Label::Positive),
        (0.6, Label::Negative),
    ];
    println!("AUC from labeled scores = {:.4}", auc_labeled(labeled)?);

    // An empty side is an error, not a silent 0.5.
    println!("empty positives: {}", auc(&negatives, &[]).unwrap_err());
    Ok(())
}
