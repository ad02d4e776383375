use crate::model::TokenBag;

/// Dice coefficient over token multisets: `2|a ∩ b| / (|a| + |b|)`.
/// Two empty bags are identical (1.0).
pub fn similarity(a: &TokenBag, b: &TokenBag) -> f64 {
    let total = a.len() + b.len();
    if total == 0 {
        return 1.0;
    }
    2.0 * a.intersection_len(b) as f64 / total as f64
}
