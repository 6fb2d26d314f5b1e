//! One-dimensional cell-count uniformity check.

use super::pvalue::chi2_pvalue;
use super::stream::{StreamView, WordSource};
use crate::error::{Error, Result};

/// Pearson statistic of `counts` against a flat expectation.
pub fn uniform_chi2(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum()
}

pub fn validate(n: usize, cells: usize) -> Result<()> {
    if cells < 2 || n < 10 * cells {
        return Err(Error::Params(format!(
            "SerialUniformity needs cells >= 2 and n >= 10 * cells, got n={n} cells={cells}"
        )));
    }
    Ok(())
}

pub fn serial_uniformity_test<S: WordSource>(
    view: &mut StreamView<S>,
    n: usize,
    cells: usize,
) -> Result<Vec<(String, f64)>> {
    validate(n, cells)?;
    let mut counts = vec![0u64; cells];
    for _ in 0..n {
        counts[(view.next_uniform() * cells as f64) as usize] += 1;
    }
    let p = chi2_pvalue(uniform_chi2(&counts), cells as u32 - 1);
    Ok(vec![("chi2".to_string(), p)])
}
