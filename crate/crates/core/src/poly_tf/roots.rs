//! Polynomial root finding by simultaneous Aberth–Ehrlich iteration.
//!
//! The polynomial is first balanced: exact roots at the origin are split off,
//! the variable is rescaled so the constant and leading coefficients have
//! equal magnitude, and coefficients are normalized by their maximum. Starting
//! points are spread over circles whose radii come from the upper convex hull
//! of `(k, log|c_k|)`, which keeps the iteration well behaved when root
//! magnitudes span several decades (filter cutoffs at 1e3–1e4 rad/s next to
//! unit gains).

use std::f64::consts::PI;

use num_complex::Complex64;

use super::Polynomial;
use crate::error::{Error, Result};

const MAX_ITER: usize = 800;

impl Polynomial {
    /// All `degree()` complex roots, with multiplicity, sorted by real part
    /// then imaginary part.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        let n = match self.degree() {
            None => return Err(Error::DegenerateInput("roots of the zero polynomial".into())),
            Some(0) => return Err(Error::DegenerateInput("roots of a constant polynomial".into())),
            Some(n) => n,
        };
        if self.coeffs().iter().any(|c| !c.is_finite()) {
            return Err(Error::DegenerateInput("non-finite polynomial coefficient".into()));
        }

        let zeros_at_origin = self.coeffs().iter().take_while(|&&c| c == 0.0).count();
        let reduced = Polynomial::new(self.coeffs()[zeros_at_origin..].to_vec());
        let mut roots = vec![Complex64::new(0.0, 0.0); zeros_at_origin];

        if reduced.degree().unwrap_or(0) > 0 {
            roots.extend(aberth(&reduced)?);
        }
        debug_assert_eq!(roots.len(), n);

        roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        Ok(roots)
    }
}

/// Roots of a polynomial with nonzero constant term and degree >= 1.
fn aberth(p: &Polynomial) -> Result<Vec<Complex64>> {
    let n = p.degree().expect("nonzero");
    let c0 = p.coeff(0).abs();
    let cn = p.leading().expect("nonzero").abs();
    let rho = (c0 / cn).powf(1.0 / n as f64);
    let rho = if rho.is_finite() && rho > 0.0 { rho } else { 1.0 };

    let balanced = p.scale_variable(rho);
    let balanced = balanced.scale(1.0 / balanced.max_abs_coeff());
    let deriv = balanced.derivative();

    if n == 1 {
        let r = -balanced.coeff(0) / balanced.coeff(1);
        return Ok(vec![Complex64::new(r * rho, 0.0)]);
    }

    let mut z = initial_guesses(&balanced);
    let mut done = vec![false; n];
    let eps = f64::EPSILON;

    for _ in 0..MAX_ITER {
        let mut all_done = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let zi = z[i];
            let pv = balanced.eval_complex(zi);
            let bound = 4.0 * eps * balanced.abs_eval(zi.norm());
            if pv.norm() <= bound {
                done[i] = true;
                continue;
            }
            all_done = false;
            let dv = deriv.eval_complex(zi);
            let ratio = pv / dv;
            let mut repulsion = Complex64::new(0.0, 0.0);
            for (j, &zj) in z.iter().enumerate() {
                if j != i {
                    let d = zi - zj;
                    if d.norm() > 0.0 {
                        repulsion += d.inv();
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - ratio * repulsion;
            let step = if denom.norm() > 0.0 && denom.is_finite() { ratio / denom } else { ratio };
            if !step.is_finite() {
                // derivative vanished; nudge off the critical point
                z[i] = zi + Complex64::new(1e-3, 1e-3) * zi.norm().max(1.0);
                continue;
            }
            z[i] = zi - step;
            if step.norm() <= eps * z[i].norm() {
                done[i] = true;
            }
        }
        if all_done {
            break;
        }
    }

    if z.iter().any(|r| !r.is_finite()) {
        return Err(Error::RootFinder(format!("non-finite iterate for polynomial [{p}]")));
    }

    // Newton polish on the original (unbalanced) polynomial, accepted only
    // when it lowers the residual.
    let dp = p.derivative();
    let roots = z
        .into_iter()
        .map(|t| {
            let mut r = t * rho;
            for _ in 0..3 {
                let pv = p.eval_complex(r);
                let dv = dp.eval_complex(r);
                if dv.norm() == 0.0 {
                    break;
                }
                let cand = r - pv / dv;
                if cand.is_finite() && p.eval_complex(cand).norm() < pv.norm() {
                    r = cand;
                } else {
                    break;
                }
            }
            r
        })
        .collect();
    Ok(roots)
}

/// Starting points on circles whose radii follow the Newton polygon.
fn initial_guesses(p: &Polynomial) -> Vec<Complex64> {
    let n = p.degree().expect("nonzero");
    let pts: Vec<(usize, f64)> = p
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(k, c)| (k, c.abs().ln()))
        .collect();

    // upper convex hull, left to right
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (k1, y1) = hull[hull.len() - 2];
            let (k2, y2) = hull[hull.len() - 1];
            let cross = (k2 as f64 - k1 as f64) * (pt.1 - y1) - (y2 - y1) * (pt.0 as f64 - k1 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }

    let mut guesses = Vec::with_capacity(n);
    let offset = 0.4;
    for w in hull.windows(2) {
        let (k1, y1) = w[0];
        let (k2, y2) = w[1];
        let m = k2 - k1;
        let radius = ((y1 - y2) / m as f64).exp();
        for j in 0..m {
            let theta = 2.0 * PI * (j as f64) / (m as f64) + offset + 0.7 * guesses.len() as f64 / n as f64;
            guesses.push(Complex64::from_polar(radius, theta));
        }
    }
    guesses
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(p: &Polynomial, r: Complex64) -> f64 {
        let n = p.degree().unwrap() as i32;
        p.eval_complex(r).norm() / (p.max_abs_coeff() * r.norm().max(1.0).powi(n))
    }

    #[test]
    fn real_pair() {
        let p = Polynomial::new(vec![2.0, 3.0, 1.0]);
        let r = p.roots().unwrap();
        assert!((r[0] - Complex64::new(-2.0, 0.0)).norm() < 1e-12);
        assert!((r[1] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn imaginary_pair() {
        let p = Polynomial::new(vec![1.0, 0.0, 1.0]);
        let r = p.roots().unwrap();
        assert!((r[0] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        assert!((r[1] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn five_known_factors() {
        let p = (1..=5).fold(Polynomial::one(), |acc, k| &acc * &Polynomial::linear(k as f64));
        let r = p.roots().unwrap();
        for (k, root) in r.iter().enumerate() {
            let expected = -(5 - k as i32) as f64;
            assert!((root - Complex64::new(expected, 0.0)).norm() < 1e-6, "{root} vs {expected}");
        }
    }

    #[test]
    fn constant_and_zero_rejected() {
        assert!(matches!(Polynomial::constant(3.0).roots(), Err(Error::DegenerateInput(_))));
        assert!(matches!(Polynomial::zero().roots(), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn roots_at_origin_split_exactly() {
        let p = Polynomial::new(vec![0.0, 0.0, 2.0, 1.0]);
        let r = p.roots().unwrap();
        assert_eq!(r.iter().filter(|z| z.norm() == 0.0).count(), 2);
        assert!((r[0] + 2.0).norm() < 1e-12);
    }

    #[test]
    fn wide_magnitude_spread() {
        // roots spanning 1e-2 .. 1e4, typical of the filtered observer loops
        let roots: Vec<Complex64> = [-0.01, -3.0, -300.0, -1000.0, -2.0e4]
            .iter()
            .map(|&x| Complex64::new(x, 0.0))
            .chain([Complex64::new(-20.0, 35.0), Complex64::new(-20.0, -35.0)])
            .collect();
        let p = Polynomial::from_roots(&roots);
        for r in p.roots().unwrap() {
            assert!(residual(&p, r) <= 1e-8, "residual {} at {r}", residual(&p, r));
        }
    }

    #[test]
    fn double_root() {
        let p = &Polynomial::linear(20.0).pow(2) * &Polynomial::linear(300.0);
        let r = p.roots().unwrap();
        assert!((r[0] + 300.0).norm() < 1e-6);
        assert!((r[1] + 20.0).norm() < 1e-6);
        assert!((r[2] + 20.0).norm() < 1e-6);
    }
}
