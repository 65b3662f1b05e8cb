use crate::error::{Error, Result};
use crate::poly_tf::Polynomial;

#[derive(Debug, Clone, PartialEq)]
pub struct RouthReport {
    pub stable: bool,
    /// Open right-half-plane roots predicted by the first column.
    pub rhp_count: usize,
    /// Rows from `s^n` down to `s^0`.
    pub array: Vec<Vec<f64>>,
    /// A zero pivot or a zero row had to be worked around.
    pub degenerate: bool,
}

/// Routh–Hurwitz test. The polynomial is sign-normalized first. A zero
/// first-column entry is replaced by `±ε` (`ε = 1e-9·max|row|`) and the table
/// is finished for both signs; a zero row is replaced by the derivative of the
/// auxiliary polynomial above it. Either case marks the report degenerate and
/// not stable, since it implies roots on or mirrored across the imaginary axis.
pub fn routh_hurwitz(p: &Polynomial) -> Result<RouthReport> {
    let n = match p.degree() {
        None => return Err(Error::DegenerateInput("Routh test of the zero polynomial".into())),
        Some(0) => return Err(Error::DegenerateInput("Routh test of a constant".into())),
        Some(n) => n,
    };
    let p = if p.leading().unwrap_or(1.0) < 0.0 { p.scale(-1.0) } else { p.clone() };

    let plus = build(&p, n, 1.0);
    if !plus.degenerate {
        let rhp_count = sign_changes(&plus.array);
        return Ok(RouthReport { stable: rhp_count == 0, rhp_count, array: plus.array, degenerate: false });
    }
    let minus = build(&p, n, -1.0);
    let rhp_count = sign_changes(&plus.array).max(sign_changes(&minus.array));
    Ok(RouthReport { stable: false, rhp_count, array: plus.array, degenerate: true })
}

struct Table {
    array: Vec<Vec<f64>>,
    degenerate: bool,
}

fn build(p: &Polynomial, n: usize, eps_sign: f64) -> Table {
    let desc = p.descending();
    let width = n / 2 + 1;
    let mut rows: Vec<Vec<f64>> = vec![
        (0..width).map(|j| desc.get(2 * j).copied().unwrap_or(0.0)).collect(),
        (0..width).map(|j| desc.get(2 * j + 1).copied().unwrap_or(0.0)).collect(),
    ];
    let mut degenerate = false;

    for r in 1..=n {
        if rows[r].iter().all(|&x| x == 0.0) {
            // auxiliary polynomial from the row above, of order n - r + 1
            degenerate = true;
            let order = (n - r + 1) as f64;
            rows[r] = rows[r - 1]
                .iter()
                .enumerate()
                .map(|(j, &a)| a * (order - 2.0 * j as f64).max(0.0))
                .collect();
        }
        if rows[r][0] == 0.0 {
            degenerate = true;
            let scale = rows[r].iter().fold(0.0_f64, |m, x| m.max(x.abs()));
            rows[r][0] = eps_sign * 1e-9 * scale;
        }
        if r == n {
            break;
        }
        let (above, pivot_row) = (&rows[r - 1], &rows[r]);
        let pivot = pivot_row[0];
        let next: Vec<f64> = (0..width)
            .map(|j| {
                let a = above.get(j + 1).copied().unwrap_or(0.0);
                let b = pivot_row.get(j + 1).copied().unwrap_or(0.0);
                (pivot * a - above[0] * b) / pivot
            })
            .collect();
        rows.push(next);
    }
    rows.truncate(n + 1);
    Table { array: rows, degenerate }
}

fn sign_changes(rows: &[Vec<f64>]) -> usize {
    rows.windows(2)
        .filter(|w| (w[0][0] > 0.0) != (w[1][0] > 0.0))
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[f64]) -> Polynomial {
        Polynomial::new(c.to_vec())
    }

    #[test]
    fn third_order_stable() {
        let r = routh_hurwitz(&poly(&[1.0, 3.0, 2.0, 1.0])).unwrap();
        assert!(r.stable);
        assert!(!r.degenerate);
        assert_eq!(r.array.len(), 4);
        assert!(poly(&[1.0, 3.0, 2.0, 1.0]).roots().unwrap().iter().all(|z| z.re < 0.0));
    }

    #[test]
    fn saddle() {
        let r = routh_hurwitz(&poly(&[-1.0, 0.0, 1.0])).unwrap();
        assert!(!r.stable);
        assert_eq!(r.rhp_count, 1);
    }

    #[test]
    fn negative_leading_normalized() {
        let r = routh_hurwitz(&poly(&[-1.0, -3.0, -2.0, -1.0])).unwrap();
        assert!(r.stable);
    }

    #[test]
    fn two_rhp_roots() {
        // (s-1)(s-2)(s+3)
        let p = &(&Polynomial::linear(-1.0) * &Polynomial::linear(-2.0)) * &Polynomial::linear(3.0);
        let r = routh_hurwitz(&p).unwrap();
        assert_eq!(r.rhp_count, 2);
    }

    #[test]
    fn zero_row_imaginary_pair() {
        // (s²+1)(s+1) = s³ + s² + s + 1
        let r = routh_hurwitz(&poly(&[1.0, 1.0, 1.0, 1.0])).unwrap();
        assert!(r.degenerate);
        assert!(!r.stable);
        assert_eq!(r.rhp_count, 0);
    }

    #[test]
    fn zero_row_mirrored_pair() {
        // (s²−1)(s+2): one RHP root hidden behind a zero row
        let p = &poly(&[-1.0, 0.0, 1.0]) * &Polynomial::linear(2.0);
        let r = routh_hurwitz(&p).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.rhp_count, 1);
    }

    #[test]
    fn zero_pivot_epsilon() {
        // s⁴ + s³ + 2s² + 2s + 3 has a zero pivot and two RHP roots
        let p = poly(&[3.0, 2.0, 2.0, 1.0, 1.0]);
        let r = routh_hurwitz(&p).unwrap();
        assert!(r.degenerate);
        assert!(!r.stable);
        assert_eq!(r.rhp_count, 2);
        assert_eq!(p.roots().unwrap().iter().filter(|z| z.re > 0.0).count(), 2);
    }

    #[test]
    fn root_at_origin_not_stable() {
        let r = routh_hurwitz(&poly(&[0.0, 2.0, 1.0])).unwrap();
        assert!(!r.stable);
    }

    #[test]
    fn constant_rejected() {
        assert!(routh_hurwitz(&Polynomial::constant(1.0)).is_err());
        assert!(routh_hurwitz(&Polynomial::zero()).is_err());
    }
}
