//! Real roots of cubic polynomials: Cardano's formula with a bracketed
//! bisection fallback.

use std::f64::consts::PI;

/// `c3 x³ + c2 x² + c1 x + c0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cubic {
    pub c3: f64,
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootMethod {
    Cardano,
    Bisection,
}

/// Relative size of the discriminant below which Cardano's branches are not trusted.
pub const MARGINAL_DISCRIMINANT: f64 = 1e-12;

impl Cubic {
    pub fn eval(&self, x: f64) -> f64 {
        ((self.c3 * x + self.c2) * x + self.c1) * x + self.c0
    }

    fn derivative(&self, x: f64) -> f64 {
        (3.0 * self.c3 * x + 2.0 * self.c2) * x + self.c1
    }

    /// Scale for residual checks: the largest term magnitude at `x`.
    pub fn term_scale(&self, x: f64) -> f64 {
        let a = x.abs();
        (self.c3.abs() * a * a * a).max(self.c2.abs() * a * a).max(self.c1.abs() * a).max(self.c0.abs())
    }

    /// Depressed form `t³ + p t + q` with `x = t - shift`, and its discriminant `(q/2)² + (p/3)³`
    /// together with the scale used to judge it.
    fn depressed(&self) -> (f64, f64, f64, f64, f64) {
        let (a, b, c) = (self.c2 / self.c3, self.c1 / self.c3, self.c0 / self.c3);
        let shift = a / 3.0;
        let p = b - a * a / 3.0;
        let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
        let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
        let scale = (q / 2.0).powi(2) + (p / 3.0).abs().powi(3);
        (shift, p, q, disc, scale)
    }

    /// True when the discriminant is too close to zero to pick a branch reliably.
    pub fn is_marginal(&self) -> bool {
        if self.c3 == 0.0 {
            return true;
        }
        let (_, _, _, disc, scale) = self.depressed();
        disc.abs() <= MARGINAL_DISCRIMINANT * scale
    }

    /// All real roots by Cardano's formula, ascending and Newton-polished.
    ///
    /// A degenerate leading coefficient falls back to the quadratic formula.
    pub fn cardano_roots(&self) -> Vec<f64> {
        if self.c3 == 0.0 {
            return quadratic_roots(self.c2, self.c1, self.c0);
        }
        let (shift, p, q, disc, _) = self.depressed();
        let mut roots = if disc > 0.0 {
            let s = disc.sqrt();
            vec![(-q / 2.0 + s).cbrt() + (-q / 2.0 - s).cbrt() - shift]
        } else if p == 0.0 {
            vec![-shift]
        } else {
            let r = 2.0 * (-p / 3.0).sqrt();
            let arg = (3.0 * q / (p * r)).clamp(-1.0, 1.0);
            let phi = arg.acos() / 3.0;
            (0..3).map(|k| r * (phi - 2.0 * PI * k as f64 / 3.0).cos() - shift).collect()
        };
        for x in &mut roots {
            *x = self.polish(*x);
        }
        roots.sort_by(f64::total_cmp);
        roots
    }

    fn polish(&self, mut x: f64) -> f64 {
        for _ in 0..4 {
            let d = self.derivative(x);
            if d == 0.0 {
                break;
            }
            let step = self.eval(x) / d;
            if !step.is_finite() {
                break;
            }
            let next = x - step;
            if self.eval(next).abs() >= self.eval(x).abs() {
                break;
            }
            x = next;
        }
        x
    }

    /// Roots in the open interval `(lo, hi)` found by scanning `samples` cells
    /// for sign changes and bisecting each bracket to full precision.
    pub fn bisection_roots(&self, lo: f64, hi: f64, samples: usize) -> Vec<f64> {
        bracketed_roots(|x| self.eval(x), lo, hi, samples)
    }

    /// Real roots in `(lo, hi)`: Cardano unless the discriminant is marginal, bisection otherwise.
    pub fn roots_in(&self, lo: f64, hi: f64) -> (Vec<f64>, RootMethod) {
        if self.is_marginal() {
            (self.bisection_roots(lo, hi, 4096), RootMethod::Bisection)
        } else {
            (self.cardano_roots().into_iter().filter(|&x| x > lo && x < hi).collect(), RootMethod::Cardano)
        }
    }
}

fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        return if b == 0.0 { vec![] } else { vec![-c / b] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return vec![];
    }
    // avoid cancellation in the smaller root
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let mut r = if q == 0.0 { vec![0.0] } else { vec![q / a, c / q] };
    r.sort_by(f64::total_cmp);
    r.dedup();
    r
}

/// Sign-change roots of `f` on `(lo, hi)`.
///
/// Points where `f` is not finite break brackets rather than joining them.
pub fn bracketed_roots<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, samples: usize) -> Vec<f64> {
    let mut roots = Vec::new();
    if !(hi > lo) || samples == 0 {
        return roots;
    }
    let h = (hi - lo) / samples as f64;
    let mut xa = lo + h * 1e-9;
    let mut fa = f(xa);
    for i in 1..=samples {
        let xb = if i == samples { hi - h * 1e-9 } else { lo + h * i as f64 };
        let fb = f(xb);
        if fa.is_finite() && fb.is_finite() {
            if fa == 0.0 {
                roots.push(xa);
            } else if fa.signum() != fb.signum() && fb != 0.0 {
                roots.push(bisect(&f, xa, xb, fa));
            }
        }
        xa = xb;
        fa = fb;
    }
    if fa == 0.0 {
        roots.push(xa);
    }
    roots
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.is_nan() {
            break;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}
