use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::ontology::{ClassId, Taxonomy};

/// Memo of disjointness verdicts shared by every supply of one ranking pass.
///
/// Disjointness is symmetric, so a pair is keyed without regard to order and
/// the not-among test reuses the verdicts the disjointness test produced.
#[derive(Debug, Default)]
pub struct ComparisonCache {
    memo: HashMap<(ClassId, ClassId), bool>,
    lookups: u64,
    evaluations: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CacheStats {
    pub lookups: u64,
    pub evaluations: u64,
}

impl ComparisonCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn disjoint(&mut self, taxonomy: &Taxonomy, a: ClassId, b: ClassId) -> bool {
        self.lookups += 1;
        let key = if a <= b { (a, b) } else { (b, a) };
        if let Some(&verdict) = self.memo.get(&key) {
            return verdict;
        }
        self.evaluations += 1;
        let verdict = taxonomy.disjoint_id(a, b);
        self.memo.insert(key, verdict);
        verdict
    }

    /// True iff every concept of `first` is disjoint from every concept of
    /// `second`. Each pair is consulted, in the reverse orientation of the
    /// disjointness pass, so prior verdicts are reused.
    pub fn not_among(&mut self, taxonomy: &Taxonomy, first: &[ClassId], second: &[ClassId]) -> bool {
        let mut all = true;
        for &a in first {
            for &b in second {
                all &= self.disjoint(taxonomy, a, b);
            }
        }
        all
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats { lookups: self.lookups, evaluations: self.evaluations }
    }

    pub fn distinct_pairs(&self) -> usize {
        self.memo.len()
    }
}

pub fn cache_stats(cache: &ComparisonCache) -> (u64, u64) {
    let s = cache.stats();
    (s.lookups, s.evaluations)
}

/// `A ∩ D` computed as `A − (A − D)`.
pub fn intersection_by_difference<T: Ord + Clone>(a: &BTreeSet<T>, d: &BTreeSet<T>) -> BTreeSet<T> {
    let a_minus_d: BTreeSet<T> = a.difference(d).cloned().collect();
    a.difference(&a_minus_d).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::{ClassDef, OntologySchema};

    fn fig5() -> Taxonomy {
        let classes = ["A", "B", "C", "D", "E"].map(ClassDef::new).to_vec();
        let mut classes = classes;
        classes[3] = ClassDef::new("D").disjoint("A").disjoint("B").disjoint("C");
        Taxonomy::build(&OntologySchema { uri: "u".into(), classes, ..Default::default() }).unwrap()
    }

    #[test]
    fn fig5_shape_halves_evaluations() {
        let t = fig5();
        let id = |n: &str| t.class_id(n).unwrap();
        let supply = [id("D"), id("E")];
        let demand = [id("A"), id("B"), id("C")];
        let mut cache = ComparisonCache::new();
        for &s in &supply {
            for &d in &demand {
                cache.disjoint(&t, s, d);
            }
        }
        let among = cache.not_among(&t, &demand, &supply);
        assert!(!among, "E is not disjoint from the demand concepts");
        let (lookups, evaluations) = cache_stats(&cache);
        assert_eq!(lookups, 12);
        assert!(evaluations <= 6);
    }

    #[test]
    fn symmetric_memoization() {
        let t = fig5();
        let (a, d) = (t.class_id("A").unwrap(), t.class_id("D").unwrap());
        let mut cache = ComparisonCache::new();
        assert!(cache.disjoint(&t, a, d));
        assert!(cache.disjoint(&t, d, a));
        assert_eq!(cache.stats(), CacheStats { lookups: 2, evaluations: 1 });
    }

    #[test]
    fn set_identity_exhaustive() {
        // Every pair of subsets of a 5-element universe.
        for a_bits in 0u32..32 {
            for d_bits in 0u32..32 {
                let a: BTreeSet<u32> = (0..5).filter(|i| a_bits & (1 << i) != 0).collect();
                let d: BTreeSet<u32> = (0..5).filter(|i| d_bits & (1 << i) != 0).collect();
                let direct: BTreeSet<u32> = a.intersection(&d).copied().collect();
                assert_eq!(intersection_by_difference(&a, &d), direct);
            }
        }
    }
}
