//! Binary-set similarity measures for implicit feedback.

use crate::error::{Error, Result};

/// Similarity flavor used by the neighborhood models. The cosine variant
/// takes an asymmetry exponent `alpha`, 0.5 by default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SimilarityKind {
    SetJaccard,
    SetCosine { alpha: f64 },
}

impl SimilarityKind {
    pub fn set_cosine_default() -> Self {
        SimilarityKind::SetCosine { alpha: 0.5 }
    }

    pub fn validate(&self) -> Result<()> {
        if let SimilarityKind::SetCosine { alpha } = self {
            if !alpha.is_finite() || !(0.0..=1.0).contains(alpha) {
                return Err(Error::Config(format!("cosine alpha {alpha} not in [0, 1]")));
            }
        }
        Ok(())
    }

    /// Similarity from intersection and set sizes.
    pub fn from_counts(&self, intersection: usize, len_a: usize, len_b: usize) -> f64 {
        match *self {
            SimilarityKind::SetJaccard => {
                let union = len_a + len_b - intersection;
                if union == 0 {
                    0.0
                } else {
                    intersection as f64 / union as f64
                }
            }
            SimilarityKind::SetCosine { alpha } => {
                if len_a == 0 || len_b == 0 {
                    0.0
                } else {
                    intersection as f64
                        / ((len_a as f64).powf(alpha) * (len_b as f64).powf(1.0 - alpha))
                }
            }
        }
    }
}

impl std::fmt::Display for SimilarityKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SimilarityKind::SetJaccard => write!(f, "sj"),
            SimilarityKind::SetCosine { alpha } => write!(f, "sc({alpha})"),
        }
    }
}

/// |A n B| for sorted, duplicate-free slices.
pub fn intersection_size<T: Ord>(a: &[T], b: &[T]) -> usize {
    debug_assert!(a.windows(2).all(|w| w[0] < w[1]));
    debug_assert!(b.windows(2).all(|w| w[0] < w[1]));
    let mut count = 0;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// |A n B| / |A u B|; 0 when both sets are empty.
pub fn set_jaccard<T: Ord>(a: &[T], b: &[T]) -> f64 {
    SimilarityKind::SetJaccard.from_counts(intersection_size(a, b), a.len(), b.len())
}

/// |A n B| / (|A|^alpha * |B|^(1-alpha)); 0 when either set is empty.
pub fn set_cosine<T: Ord>(a: &[T], b: &[T], alpha: f64) -> f64 {
    SimilarityKind::SetCosine { alpha }.from_counts(intersection_size(a, b), a.len(), b.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jaccard_of_identical_sets_is_one() {
        assert_eq!(set_jaccard(&[1, 2], &[1, 2]), 1.0);
    }

    #[test]
    fn jaccard_partial_overlap() {
        // {a,b} vs {b,c}: one shared out of three
        assert!((set_jaccard(&[1, 2], &[2, 3]) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn jaccard_with_empty_set_is_zero() {
        assert_eq!(set_jaccard::<u32>(&[], &[1]), 0.0);
        assert_eq!(set_jaccard::<u32>(&[], &[]), 0.0);
    }

    #[test]
    fn cosine_partial_overlap_default_alpha() {
        // 1 / (sqrt(2) * sqrt(2))
        assert!((set_cosine(&[1, 2], &[2, 3], 0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cosine_of_identical_sets_is_one() {
        assert!((set_cosine(&[4, 7, 9], &[4, 7, 9], 0.5) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cosine_alpha_zero_divides_by_second_set() {
        // |A n B| / |B|
        assert_eq!(set_cosine(&[1, 2], &[2], 0.0), 1.0);
    }

    #[test]
    fn cosine_with_empty_set_is_zero() {
        assert_eq!(set_cosine::<u32>(&[], &[1, 2], 0.5), 0.0);
    }

    #[test]
    fn alpha_validation() {
        assert!(SimilarityKind::SetCosine { alpha: 1.5 }.validate().is_err());
        assert!(SimilarityKind::SetCosine { alpha: 0.5 }.validate().is_ok());
        assert!(SimilarityKind::SetJaccard.validate().is_ok());
    }
}
