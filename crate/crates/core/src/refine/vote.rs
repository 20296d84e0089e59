use crate::error::Result;
use crate::model::{ClusterMap, ConfidenceMap};
use crate::scalar::Scalar;

/// Per-pixel foreground likelihood from cluster majority voting.
///
/// Every member of a cluster receives the fraction of that cluster's pixels
/// whose original score is strictly above `tau0`. Orphans receive 0.
pub fn cluster_vote<T: Scalar>(clusters: &ClusterMap, m: &ConfidenceMap<T>, tau0: T) -> Result<Vec<T>> {
    clusters.size().ensure_same(m.size())?;
    let mut positive = vec![0usize; clusters.clusters().len()];
    for (a, &s) in clusters.assignment().iter().zip(m.scores()) {
        if let Some(k) = a {
            if s > tau0 {
                positive[*k as usize] += 1;
            }
        }
    }
    let ratio: Vec<T> = positive
        .iter()
        .zip(clusters.clusters())
        .map(|(&p, meta)| T::of_usize(p) / T::of_usize(meta.pixel_count.max(1)))
        .collect();
    Ok(clusters
        .assignment()
        .iter()
        .map(|a| a.map_or(T::zero(), |k| ratio[k as usize]))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ClusterMeta, ImageSize, SeedOrigin};

    fn map(assignment: Vec<Option<u32>>, clusters: usize) -> ClusterMap {
        let size = ImageSize::new(assignment.len(), 1).unwrap();
        let mut meta = vec![
            ClusterMeta {
                origin: SeedOrigin::Foreground,
                pixel_count: 0
            };
            clusters
        ];
        for k in assignment.iter().flatten() {
            meta[*k as usize].pixel_count += 1;
        }
        ClusterMap::from_parts(size, assignment, meta)
    }

    #[test]
    fn two_of_three() {
        let c = map(vec![Some(0), Some(0), Some(0)], 1);
        let m = ConfidenceMap::new(c.size(), vec![0.5, 0.3, 0.45]).unwrap();
        let v = cluster_vote(&c, &m, 0.4).unwrap();
        assert!(v.iter().all(|&x| (x - 2.0 / 3.0f64).abs() < 1e-15));
    }

    #[test]
    fn pure_clusters_and_orphans() {
        let c = map(vec![Some(0), Some(0), None, Some(1), Some(1)], 2);
        let m = ConfidenceMap::new(c.size(), vec![0.9, 0.41, 0.99, 0.4, 0.1]).unwrap();
        let v = cluster_vote(&c, &m, 0.4).unwrap();
        assert_eq!(v, vec![1.0, 1.0, 0.0, 0.0, 0.0]);
    }
}
