//! Derivatives of fractional powers p^β along rays, assembled with the
//! higher-order chain rule from exact derivatives of the restriction.

use crate::polyalg::SparsePoly;

use super::WhitneyError;

/// Coefficients of t ↦ p(x + t·v) as a dense univariate polynomial.
/// Exact expansion of each term through binomial convolution, carried out
/// in f64 (the consumers are numeric fits).
pub fn restrict_to_ray(p: &SparsePoly, x: &[f64], v: &[f64]) -> Vec<f64> {
    let deg = match p.degree() {
        crate::polyalg::Degree::Finite(d) => d as usize,
        crate::polyalg::Degree::NegInfinity => return vec![0.0],
    };
    let mut out = vec![0.0; deg + 1];
    for (m, c) in p.terms() {
        // ∏_i (x_i + t v_i)^{e_i}, accumulated coefficient-wise
        let mut acc = vec![c.to_f64()];
        for (i, &e) in m.0.iter().enumerate() {
            for _ in 0..e {
                let mut next = vec![0.0; acc.len() + 1];
                for (j, &a) in acc.iter().enumerate() {
                    next[j] += a * x[i];
                    next[j + 1] += a * v[i];
                }
                acc = next;
            }
        }
        for (j, &a) in acc.iter().enumerate() {
            out[j] += a;
        }
    }
    out
}

/// Taylor coefficients of ψ at t₀: c_j = D^jψ(t₀)/j!.
fn shift_coefficients(coeffs: &[f64], t0: f64) -> Vec<f64> {
    let n = coeffs.len();
    let mut out = vec![0.0; n];
    // c_j(t0) = Σ_{i ≥ j} C(i, j) coeffs[i] t0^{i−j}
    for j in 0..n {
        let mut binom = 1.0;
        let mut acc = 0.0;
        let mut power = 1.0;
        for i in j..n {
            acc += binom * coeffs[i] * power;
            power *= t0;
            binom = binom * (i + 1) as f64 / (i + 1 - j) as f64;
        }
        out[j] = acc;
    }
    out
}

/// All tuples (μ₁,…,μ_k) with Σ j·μ_j = k, visited in a fixed order.
fn partitions(k: u32, visit: &mut impl FnMut(&[u32])) {
    let mut mu = vec![0u32; k as usize];
    fn rec(j: u32, left: u32, mu: &mut Vec<u32>, visit: &mut impl FnMut(&[u32])) {
        if j == 0 || left == 0 {
            if left == 0 {
                visit(mu);
            }
            return;
        }
        let max = left / j;
        for count in 0..=max {
            mu[(j - 1) as usize] = count;
            rec(j - 1, left - count * j, mu, visit);
        }
        mu[(j - 1) as usize] = 0;
    }
    if k == 0 {
        visit(&[]);
        return;
    }
    rec(k, k, &mut mu, visit);
}

fn falling_factorial(beta: f64, p: u32) -> f64 {
    (0..p).map(|i| beta - i as f64).product()
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// D^k (ψ^β)(t₀) for a univariate polynomial ψ given by its coefficients:
/// Σ over {Σ jμ_j = k} of k!/(∏ μ_j!) · β^{(p)} ψ^{β−p} ∏ (D^jψ/j!)^{μ_j}
/// with p = Σ μ_j and β^{(p)} the falling factorial.
pub fn faa_di_bruno_univariate(
    coeffs: &[f64],
    beta: f64,
    k: u32,
    t0: f64,
) -> Result<f64, WhitneyError> {
    let shifted = shift_coefficients(coeffs, t0);
    let base = shifted[0];
    if k == 0 {
        if base <= 0.0 && beta.fract() != 0.0 {
            return Err(WhitneyError::NonpositiveBase);
        }
        return Ok(base.powf(beta));
    }
    let mut total = 0.0;
    let mut err: Option<WhitneyError> = None;
    partitions(k, &mut |mu| {
        if err.is_some() {
            return;
        }
        let p: u32 = mu.iter().sum();
        let ff = falling_factorial(beta, p);
        if ff == 0.0 {
            return;
        }
        // ψ(t₀)^{β−p}
        let exponent = beta - p as f64;
        let base_pow = if base > 0.0 {
            base.powf(exponent)
        } else if exponent.fract() == 0.0 && exponent >= 0.0 {
            base.powi(exponent as i32)
        } else {
            err = Some(WhitneyError::NonpositiveBase);
            return;
        };
        let mut coef_prod = 1.0;
        let mut mult = 1.0;
        for (idx, &m) in mu.iter().enumerate() {
            if m == 0 {
                continue;
            }
            let j = idx + 1;
            let cj = shifted.get(j).copied().unwrap_or(0.0);
            coef_prod *= cj.powi(m as i32);
            mult *= factorial(m);
        }
        total += factorial(k) / mult * ff * base_pow * coef_prod;
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(total)
}

/// D^k of (p^β) restricted to the line x + t·v, evaluated at t = 0: the
/// k-th directional derivative of p^β along v at the point x.
pub fn faa_di_bruno(
    p: &SparsePoly,
    beta: f64,
    k: u32,
    x: &[f64],
    v: &[f64],
) -> Result<f64, WhitneyError> {
    assert_eq!(x.len(), p.nvars());
    assert_eq!(v.len(), p.nvars());
    let coeffs = restrict_to_ray(p, x, v);
    faa_di_bruno_univariate(&coeffs, beta, k, 0.0)
}
