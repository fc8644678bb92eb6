/// Dense-tableau primal simplex for `max c·x, Ax ≤ b, x ≥ 0` with `b ≥ 0`.
///
/// Starts from the all-slack basis; slack `k` is column `k`. Columns can be added
/// after a solve and priced from the slack part of the tableau, which holds `B⁻¹`.
/// Pivoting follows Bland's rule.
#[derive(Clone, Debug)]
pub struct Tableau {
    tab: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    reduced: Vec<f64>,
    basis: Vec<usize>,
}

pub const TOL: f64 = 1e-9;
const ZERO: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SimplexError {
    Unbounded,
    PivotLimit,
}

impl Tableau {
    pub fn new(rhs: Vec<f64>) -> Self {
        let rows = rhs.len();
        let tab = (0..rows)
            .map(|r| (0..rows).map(|c| if r == c { 1.0 } else { 0.0 }).collect())
            .collect();
        Tableau {
            tab,
            rhs,
            reduced: vec![0.0; rows],
            basis: (0..rows).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn cols(&self) -> usize {
        self.reduced.len()
    }

    /// Adds a column given as sparse `(row, coefficient)` pairs of the original `A`.
    pub fn add_column(&mut self, entries: &[(usize, f64)], cost: f64) -> usize {
        let mut d = cost;
        for &(k, a) in entries {
            d += a * self.reduced[k];
        }
        for r in 0..self.rows() {
            let v: f64 = entries.iter().map(|&(k, a)| a * self.tab[r][k]).sum();
            self.tab[r].push(if v.abs() < ZERO { 0.0 } else { v });
        }
        self.reduced.push(d);
        self.cols() - 1
    }

    /// Dual price of row `k`, clamped at zero.
    pub fn dual(&self, k: usize) -> f64 {
        (-self.reduced[k]).max(0.0)
    }

    /// Current value of variable `col`.
    pub fn value(&self, col: usize) -> f64 {
        self.basis
            .iter()
            .position(|&b| b == col)
            .map_or(0.0, |r| self.rhs[r].max(0.0))
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.tab[row][col];
        for v in &mut self.tab[row] {
            *v /= p;
        }
        self.rhs[row] /= p;
        let pivot_row = self.tab[row].clone();
        let pivot_rhs = self.rhs[row];
        for r in 0..self.rows() {
            if r == row {
                continue;
            }
            let f = self.tab[r][col];
            if f == 0.0 {
                continue;
            }
            for (v, &pv) in self.tab[r].iter_mut().zip(&pivot_row) {
                *v -= f * pv;
                if v.abs() < ZERO {
                    *v = 0.0;
                }
            }
            self.rhs[r] -= f * pivot_rhs;
            if self.rhs[r].abs() < ZERO {
                self.rhs[r] = 0.0;
            }
        }
        let f = self.reduced[col];
        for (v, &pv) in self.reduced.iter_mut().zip(&pivot_row) {
            *v -= f * pv;
            if v.abs() < ZERO {
                *v = 0.0;
            }
        }
        self.basis[row] = col;
    }

    /// Pivots to optimality.
    pub fn solve(&mut self, max_pivots: usize) -> Result<(), SimplexError> {
        for _ in 0..max_pivots {
            let Some(col) = (0..self.cols()).find(|&c| self.reduced[c] > TOL) else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows() {
                let a = self.tab[r][col];
                if a <= TOL {
                    continue;
                }
                let ratio = self.rhs[r] / a;
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((best, br)) => {
                        if ratio < br - ZERO
                            || (ratio <= br + ZERO && self.basis[r] < self.basis[best])
                        {
                            Some((r, ratio))
                        } else {
                            Some((best, br))
                        }
                    }
                };
            }
            let Some((row, _)) = leave else {
                return Err(SimplexError::Unbounded);
            };
            self.pivot(row, col);
        }
        Err(SimplexError::PivotLimit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_lp() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), 36
        let mut t = Tableau::new(vec![4.0, 12.0, 18.0]);
        let x = t.add_column(&[(0, 1.0), (2, 3.0)], 3.0);
        let y = t.add_column(&[(1, 2.0), (2, 2.0)], 5.0);
        t.solve(100).unwrap();
        assert!((t.value(x) - 2.0).abs() < 1e-9);
        assert!((t.value(y) - 6.0).abs() < 1e-9);
        // duals of the binding rows: 0, 1.5, 1
        assert!((t.dual(1) - 1.5).abs() < 1e-9);
        assert!((t.dual(2) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn column_added_after_solve() {
        let mut t = Tableau::new(vec![1.0]);
        let a = t.add_column(&[(0, 1.0)], 1.0);
        t.solve(10).unwrap();
        assert_eq!(t.value(a), 1.0);
        let b = t.add_column(&[(0, 1.0)], 2.0);
        t.solve(10).unwrap();
        assert_eq!(t.value(a), 0.0);
        assert_eq!(t.value(b), 1.0);
    }

    #[test]
    fn unbounded() {
        let mut t = Tableau::new(vec![1.0]);
        t.add_column(&[(0, -1.0)], 1.0);
        assert_eq!(t.solve(10), Err(SimplexError::Unbounded));
    }
}
