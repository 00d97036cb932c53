//! Minimum-cost assignment (Hungarian method with potentials, O(n^3)).

/// Solves the square assignment problem for `cost` (n x n). Returns the
/// column assigned to each row and the total cost.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let n = cost.len();
    if n == 0 {
        return (Vec::new(), 0.0);
    }
    assert!(cost.iter().all(|r| r.len() == n), "cost matrix must be square");
    // 1-based arrays; p[j] is the row matched to column j, 0 meaning none.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut rows = vec![0usize; n];
    for j in 1..=n {
        rows[p[j] - 1] = j - 1;
    }
    let total = rows.iter().enumerate().map(|(i, j)| cost[i][*j]).sum();
    (rows, total)
}

/// Pads an `r x c` matrix to square with `fill`.
pub fn pad_square(cost: &[Vec<f64>], cols: usize, fill: f64) -> Vec<Vec<f64>> {
    let n = cost.len().max(cols);
    let mut out = vec![vec![fill; n]; n];
    for (i, row) in cost.iter().enumerate() {
        out[i][..row.len()].copy_from_slice(row);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_example() {
        let cost = vec![vec![4.0, 1.0, 3.0], vec![2.0, 0.0, 5.0], vec![3.0, 2.0, 2.0]];
        let (rows, total) = min_cost_assignment(&cost);
        assert_eq!(total, 5.0);
        assert_eq!(rows, vec![1, 0, 2]);
    }

    #[test]
    fn padding() {
        let padded = pad_square(&[vec![0.5]], 3, 1.0);
        assert_eq!(padded.len(), 3);
        assert_eq!(min_cost_assignment(&padded).1, 2.5);
    }
}
