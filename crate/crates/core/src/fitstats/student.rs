//! Student-t confidence factors by numeric inversion of the distribution.

/// Normalization prefactor of the density, built from the double-factorial
/// ratios; evaluated with interleaved products so large `nu` stays finite.
fn gamma_prime(nu: u64) -> f64 {
    debug_assert!(nu >= 1);
    if nu % 2 == 0 {
        // (nu-1)(nu-3)...5.3 / (2 sqrt(nu) (nu-2)(nu-4)...4.2)
        let mut acc = 1.0 / (2.0 * (nu as f64).sqrt());
        let mut j = 3u64;
        while j <= nu - 1 {
            acc *= j as f64 / (j - 1) as f64;
            j += 2;
        }
        acc
    } else if nu == 1 {
        1.0 / (std::f64::consts::PI)
    } else {
        // (nu-1)(nu-3)...4.2 / (pi sqrt(nu) (nu-2)(nu-4)...5.3)
        let mut acc = 2.0 / (std::f64::consts::PI * (nu as f64).sqrt());
        let mut j = 4u64;
        while j <= nu - 1 {
            acc *= j as f64 / (j - 1) as f64;
            j += 2;
        }
        acc
    }
}

fn density(nu: u64, t: f64) -> f64 {
    gamma_prime(nu) * (1.0 + t * t / nu as f64).powf(-((nu as f64 + 1.0) / 2.0))
}

/// Central probability mass in `[-t, t]` by adaptive Simpson quadrature.
fn central_mass(nu: u64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    // Simpson on a fixed fine grid is plenty at these accuracy needs.
    let steps = 4000usize;
    let h = t / steps as f64;
    let mut acc = density(nu, 0.0) + density(nu, t);
    for k in 1..steps {
        let x = k as f64 * h;
        acc += density(nu, x) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    2.0 * acc * h / 3.0
}

/// The factor `t_ci` with central Student-t mass `level` at `nu` degrees of
/// freedom.
pub fn t_factor(nu: u64, level: f64) -> f64 {
    assert!(nu >= 1, "need at least one degree of freedom");
    assert!((0.0..1.0).contains(&level), "level must lie in [0, 1)");
    if level == 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while central_mass(nu, hi) < level {
        hi *= 2.0;
        assert!(hi < 1e9, "confidence level out of reach");
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if central_mass(nu, mid) < level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
