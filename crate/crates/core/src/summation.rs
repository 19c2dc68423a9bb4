//! Floating-point summation helpers.
//!
//! Two flavours are provided. [`neumaier_sum`] is an error-free-transformation
//! running sum used wherever a long list of terms nearly cancels (series
//! evaluated close to `s = 1`). [`tree_sum`] reduces over a fixed binary
//! partition of the input, so the result depends only on the order of the
//! slice and never on how many workers produced the entries.

/// Compensated (Kahan–Babuška–Neumaier) sum.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

const LEAF: usize = 8;

/// Pairwise sum over a fixed partition: leaves of at most 8 entries are
/// summed with [`neumaier_sum`], then halves are combined recursively.
pub fn tree_sum(values: &[f64]) -> f64 {
    if values.len() <= LEAF {
        return neumaier_sum(values.iter().copied());
    }
    let mid = values.len() / 2;
    tree_sum(&values[..mid]) + tree_sum(&values[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let v = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(neumaier_sum(v), 2.0);
    }

    #[test]
    fn tree_sum_is_exact_on_integers() {
        let v: Vec<f64> = (1..=1000).map(f64::from).collect();
        assert_eq!(tree_sum(&v), 500_500.0);
        assert_eq!(tree_sum(&[]), 0.0);
    }
}
