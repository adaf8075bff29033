//! Masked binary cross-entropy.

use super::NnError;
use crate::real::Real;

/// Mean over masked entries of `-[t·ln p + (1-t)·ln(1-p)]`.
///
/// `mask` entries of zero exclude padding positions. Errors when the mask
/// selects nothing.
pub fn bce_loss<R: Real>(probs: &[R], targets: &[R], mask: &[R]) -> Result<R, NnError> {
    let (sum, count) = bce_sum_and_count(probs, targets, mask)?;
    if count == 0 {
        return Err(NnError::EmptyMask);
    }
    Ok(sum / R::of(count as f64))
}

/// Sum form plus the masked-entry count, for callers that aggregate a global
/// mean across several rows.
pub fn bce_sum_and_count<R: Real>(
    probs: &[R],
    targets: &[R],
    mask: &[R],
) -> Result<(R, usize), NnError> {
    if probs.len() != targets.len() || probs.len() != mask.len() {
        return Err(NnError::ShapeMismatch(format!(
            "bce lengths {} / {} / {}",
            probs.len(),
            targets.len(),
            mask.len()
        )));
    }
    let mut sum = R::zero();
    let mut count = 0usize;
    for ((&p, &t), &m) in probs.iter().zip(targets).zip(mask) {
        if m == R::zero() {
            continue;
        }
        count += 1;
        sum -= t * p.ln() + (R::one() - t) * (R::one() - p).ln();
    }
    Ok((sum, count))
}

/// Derivative of the *sum-form* loss with respect to each probability,
/// multiplied by `scale` (use `1/total_count` to differentiate a global
/// mean). Masked-out entries get zero.
pub fn bce_grad_scaled<R: Real>(probs: &[R], targets: &[R], mask: &[R], scale: R) -> Vec<R> {
    probs
        .iter()
        .zip(targets)
        .zip(mask)
        .map(|((&p, &t), &m)| {
            if m == R::zero() {
                R::zero()
            } else {
                scale * (-t / p + (R::one() - t) / (R::one() - p))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::PROB_FLOOR;

    #[test]
    fn half_probability_is_ln2() {
        let loss = bce_loss(&[0.5], &[1.0], &[1.0]).unwrap();
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn perfect_predictions_at_clamp_boundary() {
        let hi = 1.0 - PROB_FLOOR;
        let loss = bce_loss(&[hi, PROB_FLOOR], &[1.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!(loss > 0.0 && loss < 2e-7, "loss {loss}");
    }

    #[test]
    fn empty_mask_rejected() {
        assert!(matches!(
            bce_loss(&[0.5], &[1.0], &[0.0]),
            Err(NnError::EmptyMask)
        ));
    }

    #[test]
    fn matches_scalar_oracle() {
        // Independent scalar-loop computation.
        let probs: [f64; 5] = [0.13, 0.77, 0.5001, 0.9, 0.02];
        let targets = [1.0, 0.0, 1.0, 1.0, 0.0];
        let mask = [1.0, 1.0, 0.0, 1.0, 1.0];
        let mut acc = 0.0;
        let mut n = 0.0;
        for i in 0..5 {
            if mask[i] == 0.0 {
                continue;
            }
            acc += -(targets[i] * probs[i].ln() + (1.0 - targets[i]) * (1.0 - probs[i]).ln());
            n += 1.0;
        }
        let got = bce_loss(&probs, &targets, &mask).unwrap();
        assert!((got - acc / n).abs() < 1e-12);
    }

    #[test]
    fn grad_matches_finite_differences() {
        let probs: [f64; 3] = [0.3, 0.8, 0.5];
        let targets = [1.0, 0.0, 1.0];
        let mask = [1.0, 1.0, 1.0];
        let grad = bce_grad_scaled(&probs, &targets, &mask, 1.0 / 3.0);
        let h = 1e-7;
        for i in 0..3 {
            let mut pp = probs;
            let mut pm = probs;
            pp[i] += h;
            pm[i] -= h;
            let fd = (bce_loss(&pp, &targets, &mask).unwrap()
                - bce_loss(&pm, &targets, &mask).unwrap())
                / (2.0 * h);
            assert!((grad[i] - fd).abs() < 1e-6);
        }
    }
}
