use std::f64::consts::PI;

use rayon::prelude::*;

use super::{check_count, BoundaryCondition, Provenance, Spectrum};
use crate::error::{Error, Result};

const SCAN_STEP: f64 = 0.1;

/// `J_m(x)` from the ascending series. Accurate for moderate `x`; used as
/// an independent oracle.
pub fn bessel_j_series(m: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=m {
        term *= half / k as f64;
    }
    let mut sum = term;
    let q = -half * half;
    for k in 1..300 {
        term *= q / (k as f64 * (k + m as usize) as f64);
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// `J_m(x)` from `(1/2pi) int_0^{2pi} cos(m t - x sin t) dt`; the trapezoidal
/// rule is exponentially convergent for this periodic analytic integrand.
pub fn bessel_j(m: u32, x: f64) -> f64 {
    let n = 2 * (x.abs().ceil() as usize + m as usize) + 64;
    let h = 2.0 * PI / n as f64;
    let mf = m as f64;
    let s: f64 = (0..n)
        .map(|k| {
            let t = k as f64 * h;
            (mf * t - x * t.sin()).cos()
        })
        .sum();
    s / n as f64
}

fn bessel_j_prime(m: u32, x: f64) -> f64 {
    if m == 0 {
        -bessel_j(1, x)
    } else {
        0.5 * (bessel_j(m - 1, x) - bessel_j(m + 1, x))
    }
}

/// Spherical Bessel `j_l(x)`: series below `x = l + 1`, upward recurrence
/// from `j_0, j_1` above.
pub fn spherical_bessel_j(l: u32, x: f64) -> f64 {
    if x < l as f64 + 1.0 {
        let mut pre = 1.0;
        for k in 0..l {
            pre *= x / (2 * k + 3) as f64;
        }
        let q = -0.5 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..200 {
            term *= q / (k as f64 * (2 * l as usize + 2 * k + 1) as f64);
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
        }
        return pre * sum;
    }
    let (s, c) = x.sin_cos();
    let j0 = s / x;
    if l == 0 {
        return j0;
    }
    let mut prev = j0;
    let mut cur = s / (x * x) - c / x;
    for k in 1..l {
        let next = (2 * k + 1) as f64 / x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn spherical_bessel_j_prime(l: u32, x: f64) -> f64 {
    if l == 0 {
        -spherical_bessel_j(1, x)
    } else {
        spherical_bessel_j(l - 1, x) - (l as f64 + 1.0) / x * spherical_bessel_j(l, x)
    }
}

fn bisect(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Positive zeros of `f` in `(start, limit]`, scanning for sign changes.
fn zeros_below(f: &dyn Fn(f64) -> f64, start: f64, limit: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut a = start;
    let mut fa = f(a);
    while a < limit {
        let b = a + SCAN_STEP;
        let fb = f(b);
        if fb == 0.0 {
            out.push(b);
        } else if fa != 0.0 && fa.signum() != fb.signum() {
            out.push(bisect(f, a, b));
        }
        a = b;
        fa = fb;
    }
    out
}

/// Bracket `[lo, hi]` of the first zero of `J_0` with `hi - lo <= 1e-12`,
/// certified by opposite signs of the series evaluation at both ends.
pub fn bessel_j0_first_zero_bracket() -> (f64, f64) {
    let f = |x: f64| bessel_j_series(0, x);
    let (mut lo, mut hi) = (2.0, 3.0);
    assert!(f(lo) > 0.0 && f(hi) < 0.0);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Scaled zeros `x/R` with multiplicity for each angular order, collected
/// until the `n`-th smallest is known to be below the scan limit.
pub fn ball_spectrum(radius: f64, d: usize, bc: BoundaryCondition, n: usize) -> Result<Spectrum> {
    check_count(n)?;
    if !(radius > 0.0) {
        return Err(Error::InvalidInput("radius must be positive".into()));
    }
    if !(2..=3).contains(&d) {
        return Err(Error::Unsupported(format!("ball spectrum in dimension {d}")));
    }
    let neumann = match bc {
        BoundaryCondition::Dirichlet => false,
        BoundaryCondition::Neumann => true,
        BoundaryCondition::Robin { .. } => {
            return Err(Error::Unsupported("Robin spectrum of the ball".into()));
        }
    };
    let mut limit = 2.0 * (n as f64).sqrt() + 8.0;
    loop {
        let orders: Vec<u32> = (0..).take_while(|&m| (m as f64) < limit).collect();
        let per_order: Vec<Vec<(f64, usize)>> = orders
            .par_iter()
            .map(|&m| {
                let (f, mult): (Box<dyn Fn(f64) -> f64 + Sync>, usize) = match (d, neumann) {
                    (2, false) => (Box::new(move |x| bessel_j(m, x)), if m == 0 { 1 } else { 2 }),
                    (2, true) => (Box::new(move |x| bessel_j_prime(m, x)), if m == 0 { 1 } else { 2 }),
                    (_, false) => (Box::new(move |x| spherical_bessel_j(m, x)), 2 * m as usize + 1),
                    (_, true) => (Box::new(move |x| spherical_bessel_j_prime(m, x)), 2 * m as usize + 1),
                };
                let start = m as f64 + 1e-3;
                let mut zs: Vec<(f64, usize)> =
                    zeros_below(&*f, start, limit).into_iter().map(|z| (z, mult)).collect();
                if neumann && m == 0 {
                    zs.insert(0, (0.0, 1));
                }
                zs
            })
            .collect();
        let mut all: Vec<(f64, usize)> = per_order.into_iter().flatten().collect();
        all.sort_by(|a, b| a.0.total_cmp(&b.0));
        let count: usize = all.iter().map(|z| z.1).sum();
        if count >= n {
            let values: Vec<f64> = all
                .into_iter()
                .flat_map(|(z, m)| std::iter::repeat_n((z / radius).powi(2), m))
                .take(n)
                .collect();
            return Ok(Spectrum::new(values, Some(bc), Provenance::RootFound { tol: 1e-14 }));
        }
        limit *= 1.5;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integral_matches_series() {
        for m in 0..6 {
            for x in [0.1, 1.0, 3.7, 8.0] {
                let a = bessel_j(m, x);
                let b = bessel_j_series(m, x);
                assert!((a - b).abs() < 1e-13, "m={m} x={x}: {a} {b}");
            }
        }
    }

    #[test]
    fn integral_satisfies_recurrence_at_large_argument() {
        // the series cancels badly here, so check J_{m-1} + J_{m+1} = 2m/x J_m
        for m in 1..8 {
            for x in [12.5, 25.0, 40.3] {
                let lhs = bessel_j(m - 1, x) + bessel_j(m + 1, x);
                let rhs = 2.0 * m as f64 / x * bessel_j(m, x);
                assert!((lhs - rhs).abs() < 1e-14, "m={m} x={x}");
            }
        }
    }

    #[test]
    fn spherical_j_branches_agree_at_switch() {
        for l in 1..6u32 {
            let x = l as f64 + 1.0;
            let below = spherical_bessel_j(l, x - 1e-9);
            let above = spherical_bessel_j(l, x);
            assert!((below - above).abs() < 1e-8, "l={l}");
        }
        assert!((spherical_bessel_j(0, 2.0) - 2f64.sin() / 2.0).abs() < 1e-16);
    }

    #[test]
    fn j0_bracket() {
        let (lo, hi) = bessel_j0_first_zero_bracket();
        assert!(hi - lo <= 1e-12);
        assert!(lo <= 2.404825557695773 && 2.404825557695773 <= hi + 1e-15);
    }

    #[test]
    fn unit_ball_dirichlet() {
        let s = ball_spectrum(1.0, 3, BoundaryCondition::Dirichlet, 4).unwrap();
        assert!((s.values()[0] - PI * PI).abs() < 1e-12);
        // l = 1 zero 4.4934 with multiplicity 3
        assert_eq!(s.clusters()[1].1, 3);
    }

    #[test]
    fn disk_neumann_starts_at_zero() {
        let s = ball_spectrum(1.0, 2, BoundaryCondition::Neumann, 3).unwrap();
        assert_eq!(s.values()[0], 0.0);
        // j'_{1,1} = 1.8411837813406593
        assert!((s.values()[1] - 1.8411837813406593f64.powi(2)).abs() < 1e-12);
        assert_eq!(s.values()[1], s.values()[2]);
    }
}
