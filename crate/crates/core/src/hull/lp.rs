//! Dense two-phase simplex for the small LPs used in wrench space.
//!
//! Problems have a handful of equality rows (at most a dozen) and up to a
//! few thousand nonnegative columns, so a full tableau is the simplest
//! robust choice.

/// Feasibility tolerance on the phase-one objective.
pub const FEAS_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-11;
const MAX_DEGENERATE_RUN: usize = 64;

/// `maximize cᵀx  s.t.  A x = b,  x ≥ 0`, with `A` stored row-major.
#[derive(Debug, Clone)]
pub struct StandardLp {
    pub rows: usize,
    pub cols: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

impl StandardLp {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            a: vec![0.0; rows * cols],
            b: vec![0.0; rows],
            c: vec![0.0; cols],
        }
    }

    pub fn set(&mut self, row: usize, col: usize, v: f64) {
        self.a[row * self.cols + col] = v;
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).run(self)
    }
}

struct Tableau {
    m: usize,
    /// Structural plus artificial columns; the right-hand side is stored last.
    width: usize,
    n_struct: usize,
    t: Vec<f64>,
    obj: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn build(lp: &StandardLp) -> Self {
        let m = lp.rows;
        let n = lp.cols;
        let width = n + m + 1;
        let mut t = vec![0.0; m * width];
        for i in 0..m {
            let sign = if lp.b[i] < 0.0 { -1.0 } else { 1.0 };
            for j in 0..n {
                t[i * width + j] = sign * lp.a[i * n + j];
            }
            t[i * width + n + i] = 1.0;
            t[i * width + width - 1] = sign * lp.b[i];
        }
        Self {
            m,
            width,
            n_struct: n,
            t,
            obj: vec![0.0; width],
            basis: (n..n + m).collect(),
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.width + j]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.t[r * w + c];
        for j in 0..w {
            self.t[r * w + j] /= p;
        }
        let (before, rest) = self.t.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        for row in before.chunks_exact_mut(w).chain(after.chunks_exact_mut(w)) {
            let f = row[c];
            if f != 0.0 {
                for j in 0..w {
                    row[j] -= f * prow[j];
                }
                row[c] = 0.0;
            }
        }
        let f = self.obj[c];
        if f != 0.0 {
            for j in 0..w {
                self.obj[j] -= f * prow[j];
            }
            self.obj[c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Reduced-cost row for maximizing `cost` over the current basis:
    /// `obj_j = c_Bᵀ B⁻¹ A_j - c_j`, last entry the objective value.
    fn price(&mut self, cost: &[f64]) {
        let w = self.width;
        let mut obj = vec![0.0; w];
        for j in 0..w - 1 {
            obj[j] = -cost.get(j).copied().unwrap_or(0.0);
        }
        for i in 0..self.m {
            let cb = cost.get(self.basis[i]).copied().unwrap_or(0.0);
            if cb != 0.0 {
                for j in 0..w {
                    obj[j] += cb * self.t[i * w + j];
                }
            }
        }
        self.obj = obj;
    }

    /// Runs simplex iterations over columns `< allowed`. Returns false when unbounded.
    fn iterate(&mut self, allowed: usize) -> bool {
        let w = self.width;
        let mut degenerate_run = 0usize;
        let max_iter = 50 * (self.m + allowed) + 1000;
        for _ in 0..max_iter {
            let bland = degenerate_run > MAX_DEGENERATE_RUN;
            let mut enter = None;
            let mut best = -COST_TOL;
            for j in 0..allowed {
                let r = self.obj[j];
                if r < best {
                    enter = Some(j);
                    if bland {
                        break;
                    }
                    best = r;
                }
            }
            let Some(c) = enter else { return true };
            let mut leave: Option<usize> = None;
            let mut ratio = f64::INFINITY;
            for i in 0..self.m {
                let a = self.at(i, c);
                if a > PIVOT_TOL {
                    let q = self.at(i, w - 1) / a;
                    let better = match leave {
                        None => true,
                        Some(l) => {
                            q < ratio - 1e-14
                                || (q <= ratio + 1e-14 && self.basis[i] < self.basis[l])
                        }
                    };
                    if better {
                        ratio = q;
                        leave = Some(i);
                    }
                }
            }
            let Some(r) = leave else { return false };
            if ratio <= 1e-14 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, c);
        }
        true
    }

    fn run(mut self, lp: &StandardLp) -> LpOutcome {
        let n = self.n_struct;
        let m = self.m;
        let w = self.width;

        // Phase one: maximize -Σ artificials.
        let mut phase1 = vec![0.0; n + m];
        for a in phase1.iter_mut().skip(n) {
            *a = -1.0;
        }
        self.price(&phase1);
        self.iterate(n + m);
        let infeas: f64 = (0..m)
            .filter(|&i| self.basis[i] >= n)
            .map(|i| self.at(i, w - 1))
            .sum();
        let bnorm = lp.b.iter().fold(1.0f64, |a, &v| a.max(v.abs()));
        if infeas > FEAS_TOL * bnorm {
            return LpOutcome::Infeasible;
        }

        // Drive zero-level artificials out of the basis where possible.
        for i in 0..m {
            if self.basis[i] >= n {
                let mut best = None;
                let mut mag = PIVOT_TOL;
                for j in 0..n {
                    let v = self.at(i, j).abs();
                    if v > mag {
                        mag = v;
                        best = Some(j);
                    }
                }
                if let Some(j) = best {
                    self.pivot(i, j);
                }
            }
        }

        // Phase two over structural columns only.
        self.price(&lp.c);
        if !self.iterate(n) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![0.0; n];
        for i in 0..m {
            if self.basis[i] < n {
                x[self.basis[i]] = self.at(i, w - 1).max(0.0);
            }
        }
        let value = x.iter().zip(&lp.c).map(|(a, b)| a * b).sum();
        LpOutcome::Optimal { x, value }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y s.t. x + s1 = 4, 2y + s2 = 12, 3x + 2y + s3 = 18
        let mut lp = StandardLp::new(3, 5);
        lp.c = vec![3.0, 5.0, 0.0, 0.0, 0.0];
        lp.set(0, 0, 1.0);
        lp.set(0, 2, 1.0);
        lp.set(1, 1, 2.0);
        lp.set(1, 3, 1.0);
        lp.set(2, 0, 3.0);
        lp.set(2, 1, 2.0);
        lp.set(2, 4, 1.0);
        lp.b = vec![4.0, 12.0, 18.0];
        match lp.solve() {
            LpOutcome::Optimal { x, value } => {
                assert!((value - 36.0).abs() < 1e-9);
                assert!((x[0] - 2.0).abs() < 1e-9);
                assert!((x[1] - 6.0).abs() < 1e-9);
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        // x + y = -1 with x, y ≥ 0.
        let mut lp = StandardLp::new(1, 2);
        lp.set(0, 0, 1.0);
        lp.set(0, 1, 1.0);
        lp.b = vec![-1.0];
        assert_eq!(lp.solve(), LpOutcome::Infeasible);

        // max x s.t. x - y = 1.
        let mut lp = StandardLp::new(1, 2);
        lp.c = vec![1.0, 0.0];
        lp.set(0, 0, 1.0);
        lp.set(0, 1, -1.0);
        lp.b = vec![1.0];
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_rows() {
        // x + y = 1 stated twice; max x.
        let mut lp = StandardLp::new(2, 2);
        lp.c = vec![1.0, 0.0];
        for r in 0..2 {
            lp.set(r, 0, 1.0);
            lp.set(r, 1, 1.0);
        }
        lp.b = vec![1.0, 1.0];
        match lp.solve() {
            LpOutcome::Optimal { value, .. } => assert!((value - 1.0).abs() < 1e-12),
            o => panic!("{o:?}"),
        }
    }
}
