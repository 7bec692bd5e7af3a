//! Pareto dominance, non-dominated sorting, crowding distance, dominated
//! hypervolume and a Pareto archive. Every objective is minimized.

use crate::gbm::HyperparamConfig;
use crate::groupstruct::GroupStructure;
use crate::measures::ObjectiveVector;

/// `a` is no worse than `b` everywhere and strictly better somewhere.
pub fn dominates_slice(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly = true;
        }
    }
    strictly
}

pub fn dominates(a: &ObjectiveVector, b: &ObjectiveVector) -> bool {
    dominates_slice(&a.as_array(), &b.as_array())
}

/// Fast non-dominated sort; returns fronts of indices, best first.
pub fn nondominated_sort(points: &[ObjectiveVector]) -> Vec<Vec<usize>> {
    let arrays: Vec<[f64; 4]> = points.iter().map(ObjectiveVector::as_array).collect();
    nondominated_sort_slices(&arrays)
}

pub fn nondominated_sort_slices<P: AsRef<[f64]>>(points: &[P]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_by: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut domination_count = vec![0usize; n];
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (points[i].as_ref(), points[j].as_ref());
            if dominates_slice(a, b) {
                dominated_by[i].push(j);
                domination_count[j] += 1;
            } else if dominates_slice(b, a) {
                dominated_by[j].push(i);
                domination_count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| domination_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated_by[i] {
                domination_count[j] -= 1;
                if domination_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// NSGA-II crowding distance within one front.
///
/// Boundary points of every objective get infinity; an objective with zero
/// range in the front adds nothing to interior points.
pub fn crowding_distance(front: &[ObjectiveVector]) -> Vec<f64> {
    let arrays: Vec<[f64; 4]> = front.iter().map(ObjectiveVector::as_array).collect();
    crowding_distance_slices(&arrays)
}

pub fn crowding_distance_slices<P: AsRef<[f64]>>(front: &[P]) -> Vec<f64> {
    let n = front.len();
    let mut distance = vec![0.0; n];
    if n == 0 {
        return distance;
    }
    let m = front[0].as_ref().len();
    let mut order: Vec<usize> = (0..n).collect();
    for obj in 0..m {
        let value = |i: usize| front[i].as_ref()[obj];
        order.sort_by(|&a, &b| value(a).total_cmp(&value(b)));
        let (lo, hi) = (value(order[0]), value(order[n - 1]));
        distance[order[0]] = f64::INFINITY;
        distance[order[n - 1]] = f64::INFINITY;
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        for k in 1..n.saturating_sub(1) {
            let gap = value(order[k + 1]) - value(order[k - 1]);
            distance[order[k]] += gap / range;
        }
    }
    distance
}

/// Dominated hypervolume of `points` with respect to `reference`.
pub fn hypervolume(points: &[ObjectiveVector], reference: &ObjectiveVector) -> f64 {
    let arrays: Vec<Vec<f64>> = points.iter().map(|p| p.as_array().to_vec()).collect();
    hypervolume_slices(&arrays, &reference.as_array())
}

/// Exact hypervolume by recursive dimension sweep.
///
/// Points are clipped to the reference first; points without dominated
/// volume are dropped.
pub fn hypervolume_slices(points: &[Vec<f64>], reference: &[f64]) -> f64 {
    let clipped: Vec<Vec<f64>> = points
        .iter()
        .filter(|p| p.iter().zip(reference).all(|(x, r)| x < r))
        .cloned()
        .collect();
    hv_recursive(clipped, reference)
}

fn nondominated_only(points: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let keep: Vec<bool> = (0..points.len())
        .map(|i| {
            !points.iter().enumerate().any(|(j, q)| {
                j != i && (dominates_slice(q, &points[i]) || (q == &points[i] && j < i))
            })
        })
        .collect();
    points.into_iter().zip(keep).filter_map(|(p, k)| k.then_some(p)).collect()
}

fn hv_recursive(points: Vec<Vec<f64>>, reference: &[f64]) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let d = reference.len();
    match d {
        1 => reference[0] - points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min),
        2 => {
            let mut pts = points;
            pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
            let mut area = 0.0;
            let mut best_y = reference[1];
            for (k, p) in pts.iter().enumerate() {
                if p[1] < best_y {
                    let next_x = pts[k + 1..]
                        .iter()
                        .find(|q| q[1] < p[1])
                        .map_or(reference[0], |q| q[0]);
                    area += (next_x - p[0]) * (reference[1] - p[1]);
                    best_y = p[1];
                }
            }
            area
        }
        _ => {
            let mut pts = nondominated_only(points);
            pts.sort_by(|a, b| a[d - 1].total_cmp(&b[d - 1]));
            let mut volume = 0.0;
            for k in 0..pts.len() {
                let next = pts.get(k + 1).map_or(reference[d - 1], |q| q[d - 1]);
                let height = next - pts[k][d - 1];
                if height <= 0.0 {
                    continue;
                }
                let slice: Vec<Vec<f64>> = pts[..=k].iter().map(|p| p[..d - 1].to_vec()).collect();
                volume += height * hv_recursive(nondominated_only(slice), &reference[..d - 1]);
            }
            volume
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArchiveEntry {
    pub objectives: ObjectiveVector,
    pub hp: HyperparamConfig,
    pub structure: GroupStructure,
    pub eval_index: usize,
}

/// Mutually non-dominated set of evaluated configurations.
#[derive(Debug, Clone, Default)]
pub struct ParetoArchive {
    entries: Vec<ArchiveEntry>,
}

impl ParetoArchive {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[ArchiveEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Inserts unless dominated by or equal to an incumbent; returns whether accepted.
    pub fn insert(&mut self, entry: ArchiveEntry) -> bool {
        let rejected = self.entries.iter().any(|e| {
            e.objectives == entry.objectives || dominates(&e.objectives, &entry.objectives)
        });
        if rejected {
            return false;
        }
        self.entries.retain(|e| !dominates(&entry.objectives, &e.objectives));
        self.entries.push(entry);
        true
    }

    pub fn objectives(&self) -> Vec<ObjectiveVector> {
        self.entries.iter().map(|e| e.objectives).collect()
    }

    pub fn hypervolume(&self, reference: &ObjectiveVector) -> f64 {
        hypervolume(&self.objectives(), reference)
    }
}
