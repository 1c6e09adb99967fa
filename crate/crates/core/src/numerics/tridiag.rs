//! Eigenpairs of symmetric tridiagonal matrices by Sturm bisection and
//! inverse iteration.

/// Symmetric tridiagonal matrix with a constant off-diagonal.
pub(crate) struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: f64,
}

impl Tridiagonal {
    /// Number of eigenvalues below `lambda`.
    pub fn sturm_count(&self, lambda: f64) -> usize {
        let e2 = self.off * self.off;
        let mut q = 1.0;
        let mut count = 0;
        for (i, d) in self.diag.iter().enumerate() {
            q = d - lambda - if i == 0 { 0.0 } else { e2 / q };
            if q == 0.0 {
                q = -1e-300;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    pub fn bounds(&self) -> (f64, f64) {
        let r = 2.0 * self.off.abs();
        let lo = self.diag.iter().fold(f64::INFINITY, |m, d| m.min(*d)) - r;
        let hi = self.diag.iter().fold(f64::NEG_INFINITY, |m, d| m.max(*d)) + r;
        (lo, hi)
    }

    /// The k-th smallest eigenvalue.
    pub fn eigenvalue(&self, k: usize, lo: f64, hi: f64) -> f64 {
        let (mut a, mut b) = (lo, hi);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if self.sturm_count(m) > k {
                b = m;
            } else {
                a = m;
            }
            if b - a <= 4.0 * f64::EPSILON * a.abs().max(b.abs()) {
                break;
            }
        }
        0.5 * (a + b)
    }

    /// Solves (T − λ)y = r with partial pivoting; returns y.
    pub fn shifted_solve(&self, lambda: f64, r: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        let e = self.off;
        // rows hold (main, upper1, upper2) after elimination
        let mut main: Vec<f64> = self.diag.iter().map(|d| d - lambda).collect();
        let mut up1 = vec![e; n];
        let mut up2 = vec![0.0; n];
        let mut lower = vec![e; n];
        let mut rhs = r.to_vec();
        for i in 0..n.saturating_sub(1) {
            if lower[i].abs() > main[i].abs() {
                // swap rows i and i+1
                let (m, u1, u2) = (main[i], up1[i], up2[i]);
                main[i] = lower[i];
                up1[i] = main[i + 1];
                up2[i] = if i + 1 < n - 1 { up1[i + 1] } else { 0.0 };
                lower[i] = m;
                main[i + 1] = u1;
                if i + 1 < n - 1 {
                    up1[i + 1] = u2;
                }
                rhs.swap(i, i + 1);
            }
            let piv = if main[i] == 0.0 { 1e-300 } else { main[i] };
            let l = lower[i] / piv;
            main[i + 1] -= l * up1[i];
            if i + 1 < n - 1 {
                up1[i + 1] -= l * up2[i];
            }
            rhs[i + 1] -= l * rhs[i];
        }
        let mut y = vec![0.0; n];
        for i in (0..n).rev() {
            let mut v = rhs[i];
            if i + 1 < n {
                v -= up1[i] * y[i + 1];
            }
            if i + 2 < n {
                v -= up2[i] * y[i + 2];
            }
            let piv = if main[i] == 0.0 { 1e-300 } else { main[i] };
            y[i] = v / piv;
        }
        y
    }

    pub fn eigenvector(&self, lambda: f64, scale: f64) -> Vec<f64> {
        let n = self.diag.len();
        let shift = lambda + 1e-13 * scale;
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 101) as f64 / 101.0).collect();
        for _ in 0..4 {
            v = self.shifted_solve(shift, &v);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
        }
        v
    }
}

impl Tridiagonal {
    /// All eigenvalues, ascending, by the implicit QL method with
    /// Wilkinson shifts.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.diag.len();
        let mut d = self.diag.clone();
        // e[i] couples rows i and i + 1
        let mut e = vec![self.off; n];
        if n > 0 {
            e[n - 1] = 0.0;
        }
        for l in 0..n {
            let mut iterations = 0;
            loop {
                let mut m = l;
                while m + 1 < n {
                    let dd = d[m].abs() + d[m + 1].abs();
                    if e[m].abs() <= f64::EPSILON * dd {
                        break;
                    }
                    m += 1;
                }
                if m == l || iterations == 60 {
                    break;
                }
                iterations += 1;
                let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                let mut r = g.hypot(1.0);
                g = d[m] - d[l] + e[l] / (g + r.copysign(g));
                let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
                let mut i = m;
                let mut deflated = false;
                while i > l {
                    i -= 1;
                    let f = s * e[i];
                    let b = c * e[i];
                    r = f.hypot(g);
                    e[i + 1] = r;
                    if r == 0.0 {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        deflated = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                }
                if deflated {
                    continue;
                }
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        }
        d.sort_by(f64::total_cmp);
        d
    }
}
