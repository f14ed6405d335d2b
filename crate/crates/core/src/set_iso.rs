//! Regular set isomorphisms of the positive integers.
//!
//! A regular set isomorphism is determined by the images of singletons, and
//! those images form a pairwise-disjoint family of nonempty sets. We store the
//! family `T{1}, ..., T{K}` for a finite truncation `K` (the domain bound) and
//! extend to sets by unions and to sequences by copying `a_k` onto `T{k}`.

use std::collections::BTreeSet;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::space::SparseSequence;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularSetIso {
    images: Vec<BTreeSet<usize>>,
}

/// Largest image size over the stored family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundedImageCertificate {
    pub max_image_size: usize,
}

impl RegularSetIso {
    /// `T{k} = sets[k - 1]`. Fails if a set is empty, contains 0, or meets
    /// another set.
    pub fn from_family(sets: Vec<BTreeSet<usize>>) -> Result<Self> {
        let mut owner: std::collections::HashMap<usize, usize> = Default::default();
        for (i, set) in sets.iter().enumerate() {
            let k = i + 1;
            if set.is_empty() {
                return Err(Error::EmptyImage(k));
            }
            for &n in set {
                if n == 0 {
                    return Err(Error::InvalidIndex(0));
                }
                if let Some(first) = owner.insert(n, k) {
                    return Err(Error::DisjointnessViolation {
                        first,
                        second: k,
                        index: n,
                    });
                }
            }
        }
        Ok(Self { images: sets })
    }

    /// `T{k} = {k}` for `k <= bound`.
    pub fn identity(bound: usize) -> Self {
        Self {
            images: (1..=bound).map(|k| BTreeSet::from([k])).collect(),
        }
    }

    pub fn domain_bound(&self) -> usize {
        self.images.len()
    }

    /// `T{k}`, or `None` outside the domain.
    pub fn image(&self, k: usize) -> Option<&BTreeSet<usize>> {
        k.checked_sub(1).and_then(|i| self.images.get(i))
    }

    pub fn images(&self) -> impl Iterator<Item = (usize, &BTreeSet<usize>)> {
        self.images.iter().enumerate().map(|(i, s)| (i + 1, s))
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.domain_bound() {
            Err(Error::OutOfDomain {
                index: k,
                bound: self.domain_bound(),
            })
        } else {
            Ok(())
        }
    }

    /// `TA = union of T{k} over k in A`.
    pub fn apply_to_set(&self, set: &BTreeSet<usize>) -> Result<BTreeSet<usize>> {
        let mut out = BTreeSet::new();
        for &k in set {
            self.check_index(k)?;
            out.extend(self.images[k - 1].iter().copied());
        }
        Ok(out)
    }

    /// `T(1..=K)`, the image of the whole truncated domain.
    pub fn range(&self) -> BTreeSet<usize> {
        self.images.iter().flatten().copied().collect()
    }

    /// `(Ta)_n = a_k` for `n` in `T{k}`, zero elsewhere.
    pub fn extend_to_sequence(&self, a: &SparseSequence) -> Result<SparseSequence> {
        let mut out = SparseSequence::zero();
        for (k, v) in a.iter() {
            self.check_index(k)?;
            for &n in &self.images[k - 1] {
                out.insert_nonzero(n, v);
            }
        }
        Ok(out)
    }

    pub fn bounded_image_certificate(&self) -> BoundedImageCertificate {
        BoundedImageCertificate {
            max_image_size: self.images.iter().map(BTreeSet::len).max().unwrap_or(0),
        }
    }
}

/// Checks `||T(a - b)||_inf <= ||a - b||_inf`.
pub fn sup_norm_contraction_check(
    t: &RegularSetIso,
    a: &SparseSequence,
    b: &SparseSequence,
) -> Result<bool> {
    let diff = a - b;
    let image = t.extend_to_sequence(&diff)?;
    Ok(image.sup_norm() <= diff.sup_norm())
}

#[derive(Serialize, Deserialize)]
struct WireIso {
    images: Vec<(usize, Vec<usize>)>,
}

impl Serialize for RegularSetIso {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        WireIso {
            images: self
                .images()
                .map(|(k, s)| (k, s.iter().copied().collect()))
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RegularSetIso {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = WireIso::deserialize(deserializer)?;
        let mut sets = Vec::with_capacity(wire.images.len());
        for (i, (k, elems)) in wire.images.into_iter().enumerate() {
            if k != i + 1 {
                return Err(D::Error::custom(format!(
                    "images must be listed for k = 1, 2, ... in order; found k = {k} at position {}",
                    i + 1
                )));
            }
            if elems.windows(2).any(|w| w[0] >= w[1]) {
                return Err(D::Error::custom(format!(
                    "image of {k} must be strictly ascending"
                )));
            }
            sets.push(elems.into_iter().collect());
        }
        RegularSetIso::from_family(sets).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Complex64;

    fn family(sets: &[&[usize]]) -> Result<RegularSetIso> {
        RegularSetIso::from_family(sets.iter().map(|s| s.iter().copied().collect()).collect())
    }

    fn set(xs: &[usize]) -> BTreeSet<usize> {
        xs.iter().copied().collect()
    }

    #[test]
    fn construction() {
        let t = family(&[&[2], &[3], &[1]]).unwrap();
        assert_eq!(t.domain_bound(), 3);
        let t = family(&[&[1, 2], &[3]]).unwrap();
        assert_eq!(t.image(1).unwrap().len(), 2);
        assert_eq!(t.bounded_image_certificate().max_image_size, 2);
        assert_eq!(
            family(&[&[1], &[1]]),
            Err(Error::DisjointnessViolation {
                first: 1,
                second: 2,
                index: 1
            })
        );
        assert_eq!(family(&[&[1], &[]]), Err(Error::EmptyImage(2)));
    }

    #[test]
    fn set_application() {
        let t = family(&[&[2], &[3]]).unwrap();
        assert_eq!(t.apply_to_set(&set(&[1, 2])).unwrap(), set(&[2, 3]));
        assert_eq!(t.apply_to_set(&set(&[])).unwrap(), set(&[]));
        let t = family(&[&[1, 2], &[5]]).unwrap();
        assert_eq!(t.apply_to_set(&set(&[2])).unwrap(), set(&[5]));
        assert_eq!(
            t.apply_to_set(&set(&[3])),
            Err(Error::OutOfDomain { index: 3, bound: 2 })
        );
    }

    #[test]
    fn sequence_extension() {
        let t = family(&[&[2], &[3], &[1]]).unwrap();
        let a = SparseSequence::from_real([(1, 5.0), (3, 7.0)]).unwrap();
        let expected = SparseSequence::from_real([(2, 5.0), (1, 7.0)]).unwrap();
        assert_eq!(t.extend_to_sequence(&a).unwrap(), expected);

        let t = family(&[&[1, 2]]).unwrap();
        let a = SparseSequence::from_real([(1, 4.0)]).unwrap();
        let expected = SparseSequence::from_real([(1, 4.0), (2, 4.0)]).unwrap();
        assert_eq!(t.extend_to_sequence(&a).unwrap(), expected);

        let t = family(&[&[4, 9], &[1], &[2, 3, 7]]).unwrap();
        for m in 1..=3 {
            let image = t.extend_to_sequence(&SparseSequence::basis(m)).unwrap();
            let indicator =
                SparseSequence::from_entries(t.image(m).unwrap().iter().map(|&n| (n, Complex64::new(1.0, 0.0))))
                    .unwrap();
            assert_eq!(image, indicator);
        }
        assert!(t.extend_to_sequence(&SparseSequence::basis(4)).is_err());
    }

    #[test]
    fn contraction_examples() {
        let t = family(&[&[1, 2]]).unwrap();
        let a = SparseSequence::from_real([(1, 3.0)]).unwrap();
        assert!(sup_norm_contraction_check(&t, &a, &a).unwrap());
        assert!(sup_norm_contraction_check(&t, &a, &SparseSequence::zero()).unwrap());
    }

    #[test]
    fn json_shape() {
        let t = family(&[&[1, 2], &[5]]).unwrap();
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(s, r#"{"images":[[1,[1,2]],[2,[5]]]}"#);
        assert_eq!(serde_json::from_str::<RegularSetIso>(&s).unwrap(), t);
        assert!(serde_json::from_str::<RegularSetIso>(r#"{"images":[[2,[1]]]}"#).is_err());
        assert!(serde_json::from_str::<RegularSetIso>(r#"{"images":[[1,[1]],[2,[1]]]}"#).is_err());
    }
}
