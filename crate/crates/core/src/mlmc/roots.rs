//! Bracketed bisection.

/// Root of `f` on `[lo, hi]` by bisection, or `None` if the endpoints do not
/// bracket a sign change.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if !(flo.signum() != fhi.signum()) || flo.is_nan() || fhi.is_nan() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Scans `grid` (in order) for the first adjacent pair where `f` changes
/// sign and refines it by bisection.
pub fn first_crossing<F: Fn(f64) -> f64>(f: F, grid: &[f64], tol: f64) -> Option<f64> {
    let vals: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    for k in 1..grid.len() {
        if vals[k - 1] == 0.0 {
            return Some(grid[k - 1]);
        }
        if vals[k - 1].signum() != vals[k].signum() {
            let (a, b) = if grid[k - 1] < grid[k] {
                (grid[k - 1], grid[k])
            } else {
                (grid[k], grid[k - 1])
            };
            return bisect(&f, a, b, tol);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_square_root() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-12);
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_none());
    }

    #[test]
    fn scans_descending_grid() {
        let grid: Vec<f64> = (0..10).rev().map(|k| k as f64).collect();
        let r = first_crossing(|x| x - 3.5, &grid, 1e-12).unwrap();
        assert!((r - 3.5).abs() < 1e-10);
    }
}
