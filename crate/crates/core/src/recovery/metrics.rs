use crate::{CVector, Error, Result};

/// `‖x̂ − x₀‖₂`.
pub fn recovery_error(x_hat: &CVector, x0: &CVector) -> Result<f64> {
    if x_hat.len() != x0.len() {
        return Err(Error::Dimension(format!(
            "estimate has length {}, truth {}",
            x_hat.len(),
            x0.len()
        )));
    }
    Ok((x_hat - x0).norm())
}

/// Best `k`-term approximation error of `x` in the ℓp norm: the norm of
/// what remains after dropping the `k` largest-modulus entries.
pub fn sparsity_index(x: &CVector, k: usize, p: f64) -> Result<f64> {
    if k > x.len() {
        return Err(Error::Domain(format!("k = {k} exceeds length {}", x.len())));
    }
    if !(p >= 1.0) {
        return Err(Error::Domain(format!("norm order must be at least 1, got {p}")));
    }
    let mut moduli: Vec<f64> = x.iter().map(|c| c.norm()).collect();
    moduli.sort_by(|a, b| b.total_cmp(a));
    let tail = &moduli[k..];
    Ok(if p.is_infinite() {
        tail.iter().copied().fold(0.0, f64::max)
    } else {
        tail.iter().map(|m| m.powf(p)).sum::<f64>().powf(1.0 / p)
    })
}
