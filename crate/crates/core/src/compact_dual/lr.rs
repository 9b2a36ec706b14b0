//! Littlewood–Richardson coefficients by exhaustive tableau enumeration, an independent
//! check on the Pieri/Giambelli product for small boxes.

use super::schubert::{BoxPartition, Grassmannian, SchubertClass};
use crate::error::Result;

/// Number of LR tableaux of shape ν/λ and content μ: semistandard fillings whose reverse
/// row reading word is a lattice word.
pub fn lr_coefficient(lambda: &BoxPartition, mu: &BoxPartition, nu: &BoxPartition) -> u64 {
    if lambda.size() + mu.size() != nu.size() {
        return 0;
    }
    let rows = nu.0.len();
    if (0..rows.max(lambda.0.len())).any(|i| lambda.part(i) > nu.part(i)) {
        return 0;
    }
    // Cells in reverse reading order: rows top to bottom, each right to left.
    let cells: Vec<(usize, usize)> =
        (0..rows).flat_map(|r| (lambda.part(r)..nu.part(r)).rev().map(move |c| (r, c))).collect();
    let mut grid: Vec<Vec<usize>> = (0..rows).map(|r| vec![0; nu.part(r)]).collect();
    let mut counts = vec![0usize; mu.0.len() + 1];
    fn rec(
        idx: usize,
        cells: &[(usize, usize)],
        lambda: &BoxPartition,
        mu: &BoxPartition,
        grid: &mut Vec<Vec<usize>>,
        counts: &mut Vec<usize>,
    ) -> u64 {
        if idx == cells.len() {
            return u64::from((1..counts.len()).all(|v| counts[v] == mu.part(v - 1)));
        }
        let (r, c) = cells[idx];
        let mut total = 0;
        for v in 1..counts.len() {
            if counts[v] == mu.part(v - 1) {
                continue;
            }
            // Lattice condition on the reading word so far.
            if v > 1 && counts[v] + 1 > counts[v - 1] {
                continue;
            }
            // Rows weakly increase left to right; the cell to the right is already filled.
            if c + 1 < grid[r].len() && grid[r][c + 1] < v {
                continue;
            }
            // Columns strictly increase downwards.
            if r > 0 && c >= lambda.part(r - 1) && grid[r - 1][c] >= v {
                continue;
            }
            grid[r][c] = v;
            counts[v] += 1;
            total += rec(idx + 1, cells, lambda, mu, grid, counts);
            counts[v] -= 1;
            grid[r][c] = 0;
        }
        total
    }
    rec(0, &cells, lambda, mu, &mut grid, &mut counts)
}

/// σ_λ · σ_μ = Σ_ν c^ν_{λμ} σ_ν over ν in the box.
pub fn lr_product(space: Grassmannian, lambda: &BoxPartition, mu: &BoxPartition) -> Result<SchubertClass> {
    let mut out = SchubertClass::zero(space);
    for nu in space.basis() {
        let c = lr_coefficient(lambda, mu, &nu);
        if c > 0 {
            out = out.add(&SchubertClass::sigma(space, nu).scale(c as i64)?)?;
        }
    }
    Ok(out)
}
