use std::fmt::Debug;

use super::{ElicitationError, Gap, Result};

/// Interval scale from cumulative intensities: element `k` gets
/// `(c_k - c_zero) / (c_one - c_zero)` where `c_k` is the sum of the first
/// `k` gap values.
pub fn value_scale_from_intensities(gaps: &[f64], anchor_zero: usize, anchor_one: usize) -> Result<Vec<f64>> {
    let n = gaps.len() + 1;
    if anchor_zero >= n || anchor_one >= n {
        return Err(ElicitationError::AnchorNotFound(format!("index {}", anchor_zero.max(anchor_one))));
    }
    if anchor_zero == anchor_one {
        return Err(ElicitationError::AnchorsCoincide);
    }
    if anchor_one < anchor_zero {
        return Err(ElicitationError::AnchorOrder);
    }
    let mut cumulative = Vec::with_capacity(n);
    let mut acc = 0.0;
    cumulative.push(acc);
    for &g in gaps {
        acc += g;
        cumulative.push(acc);
    }
    let (c0, c1) = (cumulative[anchor_zero], cumulative[anchor_one]);
    let span = c1 - c0;
    if span == 0.0 {
        return Err(ElicitationError::ZeroIntensity);
    }
    Ok(cumulative.iter().map(|&c| (c - c0) / span).collect())
}

/// Values for `elements` (ranked worst first) from the labelled gaps between
/// consecutive elements, anchored at `anchor_zero -> 0` and `anchor_one -> 1`.
pub fn derive_value_scale<T: PartialEq + Debug>(
    elements: &[T],
    gaps: &[Gap],
    anchor_zero: &T,
    anchor_one: &T,
) -> Result<Vec<f64>> {
    if gaps.len() + 1 != elements.len() {
        return Err(ElicitationError::GapCount {
            elements: elements.len(),
            expected: elements.len().saturating_sub(1),
            found: gaps.len(),
        });
    }
    let find = |a: &T| {
        elements.iter().position(|e| e == a).ok_or_else(|| ElicitationError::AnchorNotFound(format!("{a:?}")))
    };
    let zero = find(anchor_zero)?;
    let one = find(anchor_one)?;
    let values: Vec<f64> = gaps.iter().map(|g| g.value()).collect();
    value_scale_from_intensities(&values, zero, one)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elicitation::IntensityLabel::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn maxcut_reference_scale() {
        let elements = [0.0, 17.0, 70.0, 140.0, 1000.0];
        let gaps = [Weak.into(), Strong.into(), Strong.into(), VeryStrong.into()];
        let u = derive_value_scale(&elements, &gaps, &0.0, &1000.0).unwrap();
        // cumulative 0, 2, 6, 10, 15 over a span of 15
        let expected = [0.0, 2.0 / 15.0, 6.0 / 15.0, 10.0 / 15.0, 1.0];
        for (a, b) in u.iter().zip(expected) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(u[1], 0.133, epsilon = 1e-3);
        assert_abs_diff_eq!(u[3], 0.667, epsilon = 1e-3);
    }

    #[test]
    fn trivial_scales() {
        assert_eq!(derive_value_scale(&["a", "b"], &[Extreme.into()], &"a", &"b").unwrap(), [0.0, 1.0]);
        assert_eq!(
            derive_value_scale(&["a", "b", "c"], &[Moderate.into(), Moderate.into()], &"a", &"c").unwrap(),
            [0.0, 0.5, 1.0]
        );
    }

    #[test]
    fn anchors_may_sit_inside_the_ranking() {
        // elements beyond the one-anchor get values above 1
        let u = value_scale_from_intensities(&[2.0, 2.0, 4.0], 0, 2).unwrap();
        assert_eq!(u, [0.0, 0.5, 1.0, 2.0]);
    }

    #[test]
    fn errors() {
        let g = [Weak.into()];
        assert_eq!(derive_value_scale(&["a", "b"], &g, &"a", &"a"), Err(ElicitationError::AnchorsCoincide));
        assert!(matches!(derive_value_scale(&["a", "b"], &g, &"a", &"z"), Err(ElicitationError::AnchorNotFound(_))));
        assert_eq!(derive_value_scale(&["a", "b"], &[Gap::Tie], &"a", &"b"), Err(ElicitationError::ZeroIntensity));
        assert!(matches!(derive_value_scale(&["a", "b", "c"], &g, &"a", &"c"), Err(ElicitationError::GapCount { .. })));
        assert_eq!(derive_value_scale(&["a", "b"], &g, &"b", &"a"), Err(ElicitationError::AnchorOrder));
    }

    proptest! {
        #[test]
        fn invariant_under_uniform_scaling(gaps in prop::collection::vec(1u8..=6, 1..8), factor in 0.01f64..100.0) {
            let base: Vec<f64> = gaps.iter().map(|&g| g as f64).collect();
            let scaled: Vec<f64> = base.iter().map(|g| g * factor).collect();
            let a = value_scale_from_intensities(&base, 0, base.len()).unwrap();
            let b = value_scale_from_intensities(&scaled, 0, base.len()).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
