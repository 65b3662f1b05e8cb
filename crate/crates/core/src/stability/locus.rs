use num_complex::Complex64;
use rayon::prelude::*;

use super::spectral_abscissa;
use crate::error::{Error, Result};
use crate::poly_tf::Polynomial;

/// One continuation-matched pole trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct RootLocusBranch {
    pub gains: Vec<f64>,
    pub points: Vec<Complex64>,
}

/// Where the closed loop first leaves the open left half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Crossing {
    /// Bisected gain at which the rightmost pole reaches `Re = 0`.
    At(f64),
    /// Already unstable (or marginal) at the first gain of the grid.
    AtGridStart,
    /// Stable over the whole grid.
    NoneInGrid,
}

impl Crossing {
    pub fn gain(&self) -> Option<f64> {
        match self {
            Crossing::At(k) => Some(*k),
            _ => None,
        }
    }

    /// Critical gain with "never" mapped to infinity, for ordering comparisons.
    pub fn as_critical(&self) -> f64 {
        match self {
            Crossing::At(k) => *k,
            Crossing::AtGridStart => 0.0,
            Crossing::NoneInGrid => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootLocus {
    pub branches: Vec<RootLocusBranch>,
    pub crossing: Crossing,
}

fn closed_loop(num: &Polynomial, den: &Polynomial, k: f64) -> Polynomial {
    den + &num.scale(k)
}

fn roots_at(num: &Polynomial, den: &Polynomial, k: f64) -> Result<Vec<Complex64>> {
    closed_loop(num, den, k)
        .roots()
        .map_err(|e| Error::RootLocus { gain: k, source: Box::new(e) })
}

/// Rightmost closed-loop pole at gain `k`.
pub fn max_real_at(num: &Polynomial, den: &Polynomial, k: f64) -> Result<f64> {
    Ok(spectral_abscissa(&roots_at(num, den, k)?))
}

/// Roots of `den + K·num` over `gains`, matched into continuous branches by
/// greedy global nearest-neighbour assignment between consecutive gains.
pub fn root_locus(num: &Polynomial, den: &Polynomial, gains: &[f64]) -> Result<RootLocus> {
    let (Some(dn), dm) = (den.degree(), num.degree()) else {
        return Err(Error::DegenerateInput("root locus with zero denominator".into()));
    };
    if dm.unwrap_or(0) > dn {
        return Err(Error::DegenerateInput("root locus needs a proper loop gain".into()));
    }
    if dn == 0 {
        return Err(Error::DegenerateInput("root locus of a constant loop".into()));
    }
    if gains.is_empty() {
        return Err(Error::InvalidParameter("empty gain grid".into()));
    }
    if gains.iter().any(|k| !(*k > 0.0 && k.is_finite())) || gains.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("gain grid must be positive and strictly ascending".into()));
    }
    if (dm == Some(dn)) && gains.iter().any(|k| closed_loop(num, den, *k).degree() != Some(dn)) {
        return Err(Error::AlgebraicDegeneracy("closed-loop degree drops on the gain grid".into()));
    }

    let raw: Vec<Vec<Complex64>> = gains.par_iter().map(|&k| roots_at(num, den, k)).collect::<Result<_>>()?;

    let mut tracks: Vec<Vec<Complex64>> = raw[0].iter().map(|&r| vec![r]).collect();
    for next in &raw[1..] {
        let prev: Vec<Complex64> = tracks.iter().map(|t| *t.last().expect("nonempty")).collect();
        let assignment = match_nearest(&prev, next);
        for (track, idx) in tracks.iter_mut().zip(assignment) {
            track.push(next[idx]);
        }
    }

    let branches = tracks
        .into_iter()
        .map(|points| RootLocusBranch { gains: gains.to_vec(), points })
        .collect();
    let crossing = find_crossing(num, den, gains, &raw)?;
    Ok(RootLocus { branches, crossing })
}

/// `assignment[i]` is the index in `next` matched to `prev[i]`.
fn match_nearest(prev: &[Complex64], next: &[Complex64]) -> Vec<usize> {
    let mut pairs: Vec<(f64, usize, usize)> = prev
        .iter()
        .enumerate()
        .flat_map(|(i, p)| next.iter().enumerate().map(move |(j, q)| ((p - q).norm(), i, j)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut assignment = vec![usize::MAX; prev.len()];
    let mut taken = vec![false; next.len()];
    for (_, i, j) in pairs {
        if assignment[i] == usize::MAX && !taken[j] {
            assignment[i] = j;
            taken[j] = true;
        }
    }
    assignment
}

fn find_crossing(num: &Polynomial, den: &Polynomial, gains: &[f64], raw: &[Vec<Complex64>]) -> Result<Crossing> {
    let abscissa: Vec<f64> = raw.iter().map(|r| spectral_abscissa(r)).collect();
    if abscissa[0] >= 0.0 {
        return Ok(Crossing::AtGridStart);
    }
    let Some(i) = abscissa.iter().position(|&a| a >= 0.0) else {
        return Ok(Crossing::NoneInGrid);
    };
    Ok(Crossing::At(bisect_crossing(num, den, gains[i - 1], gains[i])?))
}

/// Bisection in log-gain on the sign of the rightmost pole, `lo` stable and `hi` not.
pub fn bisect_crossing(num: &Polynomial, den: &Polynomial, mut lo: f64, mut hi: f64) -> Result<f64> {
    for _ in 0..80 {
        if hi / lo - 1.0 < 1e-12 {
            break;
        }
        let mid = (lo * hi).sqrt();
        if max_real_at(num, den, mid)? >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo * hi).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly_tf::log_grid;

    #[test]
    fn second_order_locus_always_stable() {
        let num = Polynomial::one();
        let den = Polynomial::new(vec![0.0, 2.0, 1.0]);
        let grid = log_grid(1e-3, 1e3, 40).unwrap();
        let loc = root_locus(&num, &den, &grid).unwrap();
        assert_eq!(loc.branches.len(), 2);
        assert_eq!(loc.crossing, Crossing::NoneInGrid);
        let starts: Vec<f64> = loc.branches.iter().map(|b| b.points[0].re).collect();
        assert!(starts.iter().any(|r| r.abs() < 1e-2));
        assert!(starts.iter().any(|r| (r + 2.0).abs() < 1e-2));
        // vertical departure after the break-away at -1
        for b in &loc.branches {
            assert!((b.points.last().unwrap().re + 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn rhp_zero_attracts_branch() {
        // (s−1)/(s(s+2)): char s² + (2+K)s − K is unstable for every K > 0
        let num = Polynomial::new(vec![-1.0, 1.0]);
        let den = Polynomial::new(vec![0.0, 2.0, 1.0]);
        let loc = root_locus(&num, &den, &log_grid(1e-2, 1e2, 20).unwrap()).unwrap();
        assert_eq!(loc.crossing, Crossing::AtGridStart);
        // (s−1)/((s+1)(s+2)): char s² + (3+K)s + 2 − K crosses at K = 2
        let den = Polynomial::new(vec![2.0, 3.0, 1.0]);
        let loc = root_locus(&num, &den, &log_grid(1e-2, 1e2, 20).unwrap()).unwrap();
        let k = loc.crossing.gain().unwrap();
        assert!((k - 2.0).abs() < 1e-8, "{k}");
    }

    #[test]
    fn third_order_crossing() {
        // 1/(s(s+1)(s+2)) crosses at K = 6
        let den = Polynomial::new(vec![0.0, 2.0, 3.0, 1.0]);
        let loc = root_locus(&Polynomial::one(), &den, &log_grid(0.1, 100.0, 10).unwrap()).unwrap();
        assert!((loc.crossing.gain().unwrap() - 6.0).abs() < 1e-8);
    }

    #[test]
    fn rejects_bad_grids() {
        let den = Polynomial::new(vec![0.0, 1.0]);
        assert!(root_locus(&Polynomial::one(), &den, &[]).is_err());
        assert!(root_locus(&Polynomial::one(), &den, &[2.0, 1.0]).is_err());
        assert!(root_locus(&Polynomial::new(vec![0.0, 0.0, 1.0]), &den, &[1.0]).is_err());
    }
}
