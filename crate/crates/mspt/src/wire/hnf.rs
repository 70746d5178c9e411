//! Row-style Hermite normal form over the integers.

/// Hermite normal form of the row lattice spanned by `rows`.
///
/// Zero rows are dropped. Pivots are positive and strictly increase in
/// column index; entries above a pivot lie in `[0, pivot)`. The result is
/// unique for a given lattice, so it doubles as a canonical basis.
pub fn hermite_normal_form(rows: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut a: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| {
            assert_eq!(r.len(), ncols, "ragged input to hermite_normal_form");
            r.iter().map(|&v| i128::from(v)).collect()
        })
        .collect();
    let mut pivot_row = 0;
    for col in 0..ncols {
        if pivot_row == a.len() {
            break;
        }
        // Euclid on column `col` among rows pivot_row.. until one nonzero remains.
        loop {
            let mut best: Option<usize> = None;
            for (r, row) in a.iter().enumerate().skip(pivot_row) {
                if row[col] != 0 && best.map_or(true, |b| row[col].abs() < a[b][col].abs()) {
                    best = Some(r);
                }
            }
            let Some(b) = best else { break };
            a.swap(pivot_row, b);
            let mut done = true;
            for r in pivot_row + 1..a.len() {
                if a[r][col] != 0 {
                    let q = a[r][col].div_euclid(a[pivot_row][col]);
                    for c in col..ncols {
                        a[r][c] -= q * a[pivot_row][c];
                    }
                    if a[r][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if a.get(pivot_row).map_or(true, |r| r[col] == 0) {
            continue;
        }
        if a[pivot_row][col] < 0 {
            for c in col..ncols {
                a[pivot_row][c] = -a[pivot_row][c];
            }
        }
        let p = a[pivot_row][col];
        for r in 0..pivot_row {
            let q = a[r][col].div_euclid(p);
            if q != 0 {
                for c in col..ncols {
                    a[r][c] -= q * a[pivot_row][c];
                }
            }
        }
        pivot_row += 1;
    }
    a.truncate(pivot_row);
    a.into_iter()
        .map(|r| {
            r.into_iter()
                .map(|v| i64::try_from(v).expect("hermite normal form entry overflow"))
                .collect()
        })
        .collect()
}

pub fn lattice_rank(rows: &[Vec<i64>]) -> usize {
    hermite_normal_form(rows).len()
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiples_reduce_to_primitive_generator() {
        let rows = vec![vec![-2, 2, 2, -2], vec![1, -1, -1, 1], vec![3, -3, -3, 3]];
        assert_eq!(hermite_normal_form(&rows), vec![vec![1, -1, -1, 1]]);
    }

    #[test]
    fn known_two_dimensional_form() {
        let rows = vec![vec![2, 4], vec![3, 5]];
        // Lattice has determinant 2: basis (1,1), (0,2).
        assert_eq!(hermite_normal_form(&rows), vec![vec![1, 1], vec![0, 2]]);
    }

    #[test]
    fn zero_rows_vanish() {
        assert!(hermite_normal_form(&[vec![0, 0, 0]]).is_empty());
        assert_eq!(lattice_rank(&[vec![1, 2], vec![2, 4]]), 1);
    }
}
