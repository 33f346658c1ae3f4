//! Finite causal sets: sprinkling, longest-chain separations and exhaustive
//! Ptolemy scans.
//!
//! The order is kept as strict future/past bitsets of the transitive
//! closure. The separation table is one of: the restriction of the ambient
//! backend (sprinkles), weighted longest chains, or an unchecked user table.

use std::collections::VecDeque;
use std::time::Instant;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::backend::{Backend, SpaceSpec};
use crate::error::{Error, Result};
use crate::sampling::{substream_rng, Diamond, DiamondSampler};
use crate::scan::{check_delta, finish, with_threads, Accumulator, ScanReport};
use crate::space::{Chart, Event, LorentzianSpace, Separations6};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EllMode {
    AmbientRestricted,
    LongestPath,
    RawTable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CausalSet {
    n: usize,
    relations: Vec<(usize, usize)>,
    weights: Vec<f64>,
    above: Vec<FixedBitSet>,
    below: Vec<FixedBitSet>,
    topo: Vec<usize>,
    coords: Option<Vec<Event>>,
    ambient: Option<String>,
    ambient_ell: Option<Vec<f64>>,
    ell_mode: EllMode,
    ell: Vec<f64>,
}

/// Kahn's algorithm; on a cycle returns an element on or behind it.
fn topological_order(n: usize, edges: &[(usize, usize)]) -> Result<Vec<usize>> {
    let mut indeg = vec![0usize; n];
    let mut succ = vec![Vec::new(); n];
    for &(i, j) in edges {
        succ[i].push(j);
        indeg[j] += 1;
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(i) = queue.pop_front() {
        order.push(i);
        for &j in &succ[i] {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                queue.push_back(j);
            }
        }
    }
    if order.len() < n {
        let stuck = (0..n).find(|&i| indeg[i] > 0).unwrap_or(0);
        return Err(Error::Cycle(stuck));
    }
    Ok(order)
}

impl CausalSet {
    /// The order generated by `relations` (pairs `i < j`), with unit weights
    /// and the longest-chain separation.
    pub fn new(n: usize, relations: Vec<(usize, usize)>) -> Result<Self> {
        let weights = vec![1.0; relations.len()];
        Self::with_order(n, relations, weights)
    }

    fn with_order(n: usize, relations: Vec<(usize, usize)>, weights: Vec<f64>) -> Result<Self> {
        for &(i, j) in &relations {
            if i >= n || j >= n {
                return Err(Error::Input(format!("relation ({i}, {j}) out of range for n = {n}")));
            }
            if i == j {
                return Err(Error::Cycle(i));
            }
        }
        let topo = topological_order(n, &relations)?;
        let mut succ = vec![Vec::new(); n];
        for &(i, j) in &relations {
            succ[i].push(j);
        }
        let mut above = vec![FixedBitSet::with_capacity(n); n];
        for &i in topo.iter().rev() {
            let mut set = FixedBitSet::with_capacity(n);
            for &j in &succ[i] {
                set.insert(j);
                set.union_with(&above[j]);
            }
            above[i] = set;
        }
        let mut below = vec![FixedBitSet::with_capacity(n); n];
        for (i, a) in above.iter().enumerate() {
            for j in a.ones() {
                below[j].insert(i);
            }
        }
        let mut cs = CausalSet {
            n,
            relations,
            weights,
            above,
            below,
            topo,
            coords: None,
            ambient: None,
            ambient_ell: None,
            ell_mode: EllMode::LongestPath,
            ell: Vec::new(),
        };
        cs.ell = cs.longest_path_table()?;
        Ok(cs)
    }

    /// Replaces the edge weights (aligned with [`Self::relations`]) and
    /// switches to the longest-chain separation.
    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.relations.len() {
            return Err(Error::Input(format!(
                "{} weights for {} relations",
                weights.len(),
                self.relations.len()
            )));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::Input("weights must be finite and non-negative".into()));
        }
        self.weights = weights;
        self.with_longest_path()
    }

    /// Switches to the longest-chain separation with the current weights.
    pub fn with_longest_path(mut self) -> Result<Self> {
        self.ell = self.longest_path_table()?;
        self.ell_mode = EllMode::LongestPath;
        Ok(self)
    }

    /// Installs an unchecked row-major separation table.
    pub fn with_raw_table(mut self, table: Vec<f64>) -> Result<Self> {
        if table.len() != self.n * self.n {
            return Err(Error::Input(format!("ell table needs {} entries", self.n * self.n)));
        }
        if table.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Input("ell table entries must be finite and non-negative".into()));
        }
        self.ell = table;
        self.ell_mode = EllMode::RawTable;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn relations(&self) -> &[(usize, usize)] {
        &self.relations
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn ell_mode(&self) -> EllMode {
        self.ell_mode
    }

    pub fn coords(&self) -> Option<&[Event]> {
        self.coords.as_deref()
    }

    pub fn ambient(&self) -> Option<&str> {
        self.ambient.as_deref()
    }

    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    /// Strict causal future of `i`.
    pub fn above(&self, i: usize) -> &FixedBitSet {
        &self.above[i]
    }

    /// Strict causal past of `i`.
    pub fn below(&self, i: usize) -> &FixedBitSet {
        &self.below[i]
    }

    /// `i <= j` (reflexive).
    pub fn precedes(&self, i: usize, j: usize) -> bool {
        i == j || self.above[i].contains(j)
    }

    /// `i << j`: related with positive separation.
    pub fn chronological(&self, i: usize, j: usize) -> bool {
        self.above[i].contains(j) && self.ell(i, j) > 0.0
    }

    #[inline]
    pub fn ell(&self, i: usize, j: usize) -> f64 {
        self.ell[i * self.n + j]
    }

    /// Row-major separation table.
    pub fn ell_table(&self) -> &[f64] {
        &self.ell
    }

    /// `true` when closing the stored closure again changes nothing.
    pub fn closure_is_idempotent(&self) -> bool {
        (0..self.n).all(|i| self.above[i].ones().all(|j| self.above[j].is_subset(&self.above[i])))
    }

    /// Covering pairs of the order.
    pub fn transitive_reduction(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in self.above[i].ones() {
                if self.above[i].is_disjoint(&self.below[j]) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Maximum weight over chains of relations, in `O(n m)`.
    fn longest_path_table(&self) -> Result<Vec<f64>> {
        let n = self.n;
        let mut succ: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (&(i, j), &w) in self.relations.iter().zip(&self.weights) {
            succ[i].push((j, w));
        }
        let mut rank = vec![0; n];
        for (r, &i) in self.topo.iter().enumerate() {
            rank[i] = r;
        }
        let mut table = vec![0.0; n * n];
        let mut dist = vec![f64::NEG_INFINITY; n];
        for s in 0..n {
            dist.fill(f64::NEG_INFINITY);
            dist[s] = 0.0;
            for &u in &self.topo[rank[s]..] {
                if dist[u] == f64::NEG_INFINITY {
                    continue;
                }
                for &(v, w) in &succ[u] {
                    let d = dist[u] + w;
                    if d > dist[v] {
                        dist[v] = d;
                    }
                }
            }
            for v in self.above[s].ones() {
                table[s * n + v] = dist[v].max(0.0);
            }
        }
        Ok(table)
    }

    /// Longest-chain separation table for the current weights.
    pub fn longest_path_ell(&self) -> Result<Vec<f64>> {
        self.longest_path_table()
    }

    /// Minimum of `ℓ(i,k) - ℓ(i,j) - ℓ(j,k)` over chains `i < j < k`.
    pub fn reverse_triangle_min(&self) -> Option<(f64, [usize; 3])> {
        let mut best: Option<(f64, [usize; 3])> = None;
        for i in 0..self.n {
            for j in self.above[i].ones() {
                for k in self.above[j].ones() {
                    let d = self.ell(i, k) - self.ell(i, j) - self.ell(j, k);
                    if best.is_none_or(|(b, _)| d < b) {
                        best = Some((d, [i, j, k]));
                    }
                }
            }
        }
        best
    }

    /// Ratios of longest-chain to ambient separations over chronological
    /// ambient pairs; `None` without an ambient table.
    pub fn convergence(&self) -> Result<Option<ConvergenceStats>> {
        let Some(amb) = &self.ambient_ell else {
            return Ok(None);
        };
        let lp = self.longest_path_table()?;
        let (mut pairs, mut sum, mut lo, mut hi) = (0u64, 0.0, f64::INFINITY, f64::NEG_INFINITY);
        for (a, b) in amb.iter().zip(&lp) {
            if *a > 0.0 {
                let r = b / a;
                pairs += 1;
                sum += r;
                lo = lo.min(r);
                hi = hi.max(r);
            }
        }
        Ok((pairs > 0).then(|| ConvergenceStats {
            pairs,
            mean_ratio: sum / pairs as f64,
            min_ratio: lo,
            max_ratio: hi,
        }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStats {
    pub pairs: u64,
    pub mean_ratio: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

/// `n` seeded points of `region`, ordered by the ambient relation, with the
/// ambient separation restricted to them. Reduction edges carry their
/// ambient separation as weight.
pub fn sprinkle<S>(space: &S, descriptor: &str, region: &Diamond, n: usize, seed: u64) -> Result<CausalSet>
where
    S: LorentzianSpace<Point = Event> + DiamondSampler,
{
    if n == 0 {
        return Err(Error::Input("sprinkle needs n >= 1".into()));
    }
    region.check(space)?;
    let mut rng = substream_rng(seed, 0);
    let pts = (0..n)
        .map(|_| space.sample_in_diamond(&region.past, &region.future, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    from_points(space, descriptor, pts)
}

/// The causal set of given points of a backend.
pub fn from_points<S>(space: &S, descriptor: &str, pts: Vec<Event>) -> Result<CausalSet>
where
    S: LorentzianSpace<Point = Event>,
{
    let n = pts.len();
    let mut pairs = Vec::new();
    let mut table = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j && space.causal_le(&pts[i], &pts[j]) && !space.causal_le(&pts[j], &pts[i]) {
                pairs.push((i, j));
                table[i * n + j] = space.time_separation(&pts[i], &pts[j]);
            }
        }
    }
    let full = CausalSet::new(n, pairs)?;
    let reduction = full.transitive_reduction();
    let weights = reduction.iter().map(|&(i, j)| table[i * n + j]).collect();
    let mut cs = CausalSet::with_order(n, reduction, weights)?;
    cs.coords = Some(pts);
    cs.ambient = Some(descriptor.to_string());
    cs.ambient_ell = Some(table.clone());
    cs.ell = table;
    cs.ell_mode = EllMode::AmbientRestricted;
    Ok(cs)
}

/// Minimum Ptolemy slack over all quadruples `i < j << k < l` of distinct
/// elements. Quadruples with `i = j` or `k = l` have slack exactly zero and
/// are skipped. The minimum is tie-broken by lexicographic index order.
pub fn exhaustive_ptolemy(cs: &CausalSet, delta: f64, threads: Option<usize>) -> Result<ScanReport> {
    check_delta(delta)?;
    let start = Instant::now();
    let n = cs.n;
    let key = |q: [usize; 4]| (((q[0] * n + q[1]) * n + q[2]) * n + q[3]) as u64;
    let parts: Vec<Accumulator<[usize; 4]>> = with_threads(threads, || {
        (0..n)
            .into_par_iter()
            .map(|j| {
                let mut acc = Accumulator::new(delta, false);
                for k in cs.above[j].ones() {
                    let l23 = cs.ell(j, k);
                    if !(l23 > 0.0) {
                        continue;
                    }
                    for i in cs.below[j].ones() {
                        let (l12, l13) = (cs.ell(i, j), cs.ell(i, k));
                        for l in cs.above[k].ones() {
                            let s = Separations6::new(l12, l13, cs.ell(i, l), l23, cs.ell(j, l), cs.ell(k, l));
                            let q = [i, j, k, l];
                            acc.push(key(q), s, || q);
                        }
                    }
                }
                acc
            })
            .collect()
    })?;
    let mut total = Accumulator::new(delta, false);
    for p in parts {
        total.merge(p);
    }
    let descriptor = match (&cs.ambient, cs.ell_mode) {
        (Some(a), EllMode::AmbientRestricted) => format!("causet:ambient_restricted:{a}"),
        (_, EllMode::AmbientRestricted) => "causet:ambient_restricted".into(),
        (_, EllMode::LongestPath) => "causet:longest_path".into(),
        (_, EllMode::RawTable) => "causet:raw_table".into(),
    };
    let (mut report, witness) = finish(total, &descriptor, delta);
    if let Some(q) = witness {
        report.witness_indices = Some(q);
        report.witness = cs.coords.as_ref().map(|c| q.map(|i| c[i].clone()));
    }
    report.raw_table = cs.ell_mode == EllMode::RawTable;
    report.wall_time_secs = Some(start.elapsed().as_secs_f64());
    Ok(report)
}

/// Causal-set file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalSetJson {
    pub n: usize,
    pub relations: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell_table: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell_mode: Option<EllMode>,
    /// Backend descriptor of the coordinates, e.g. `minkowski:1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ambient: Option<String>,
}

impl CausalSet {
    pub fn to_json(&self) -> CausalSetJson {
        CausalSetJson {
            n: self.n,
            relations: self.relations.iter().map(|&(i, j)| [i, j]).collect(),
            coords: self.coords.as_ref().map(|c| c.iter().map(|e| e.coords.clone()).collect()),
            weights: Some(self.weights.clone()),
            ell_table: Some(self.ell.clone()),
            ell_mode: Some(self.ell_mode),
            ambient: self.ambient.clone(),
        }
    }

    /// Without an explicit mode: a table with coordinates is ambient, a bare
    /// table is raw, otherwise longest chains. Ambient separations are
    /// recomputed from the backend and the stored order is checked against it.
    pub fn from_json(j: CausalSetJson) -> Result<Self> {
        let mode = j.ell_mode.unwrap_or(match (&j.ell_table, &j.coords) {
            (Some(_), Some(_)) => EllMode::AmbientRestricted,
            (Some(_), None) => EllMode::RawTable,
            _ => EllMode::LongestPath,
        });
        let relations: Vec<(usize, usize)> = j.relations.iter().map(|r| (r[0], r[1])).collect();
        match mode {
            EllMode::AmbientRestricted => {
                let (Some(coords), Some(amb)) = (j.coords, j.ambient) else {
                    return Err(Error::Input("ambient mode needs coords and an ambient backend".into()));
                };
                if coords.len() != j.n {
                    return Err(Error::Input("one coordinate row per element required".into()));
                }
                let backend = Backend::new(amb.parse::<SpaceSpec>()?)?;
                let pts = coords.into_iter().map(|c| backend.event(c)).collect::<Result<Vec<_>>>()?;
                let cs = from_points(&backend, &amb, pts)?;
                let given = CausalSet::new(j.n, relations)?;
                if given.above != cs.above {
                    return Err(Error::Input("relations disagree with the ambient order".into()));
                }
                Ok(cs)
            }
            EllMode::LongestPath => {
                let cs = CausalSet::new(j.n, relations)?;
                match j.weights {
                    Some(w) => cs.with_weights(w),
                    None => Ok(cs),
                }
            }
            EllMode::RawTable => {
                let table = j.ell_table.ok_or_else(|| Error::Input("raw mode needs ell_table".into()))?;
                let mut cs = CausalSet::new(j.n, relations)?;
                if let Some(w) = j.weights {
                    cs = cs.with_weights(w)?;
                }
                cs.with_raw_table(table)
            }
        }
    }

    /// Chart of the stored coordinates.
    pub fn chart(&self) -> Option<Chart> {
        self.coords.as_ref().and_then(|c| c.first()).map(|e| e.chart)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkowski::MinkowskiSpace;

    fn flat_diamond() -> (MinkowskiSpace, Diamond) {
        let m = MinkowskiSpace::new(1).unwrap();
        let d = Diamond::new(Event::minkowski(vec![0.0, 0.0]), Event::minkowski(vec![2.0, 0.0]));
        (m, d)
    }

    #[test]
    fn longest_path_examples() {
        let chain = CausalSet::new(3, vec![(0, 1), (1, 2)]).unwrap();
        assert_eq!(chain.ell(0, 2), 2.0);
        assert_eq!(chain.ell(2, 0), 0.0);

        let diamond = CausalSet::new(4, vec![(0, 1), (1, 3), (0, 2), (2, 3)])
            .unwrap()
            .with_weights(vec![1.0, 1.0, 0.5, 0.5])
            .unwrap();
        assert_eq!(diamond.ell(0, 3), 2.0);

        let anti = CausalSet::new(5, vec![]).unwrap();
        assert!(anti.ell_table().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn cycles_are_detected() {
        assert!(matches!(CausalSet::new(3, vec![(0, 1), (1, 2), (2, 0)]), Err(Error::Cycle(_))));
        assert!(matches!(CausalSet::new(2, vec![(1, 1)]), Err(Error::Cycle(1))));
        assert!(CausalSet::new(2, vec![(0, 5)]).is_err());
    }

    #[test]
    fn closure_and_reduction() {
        let cs = CausalSet::new(4, vec![(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap();
        assert!(cs.closure_is_idempotent());
        assert!(cs.precedes(0, 3) && !cs.precedes(3, 0));
        assert_eq!(cs.transitive_reduction(), vec![(0, 1), (1, 2), (2, 3)]);
    }

    #[test]
    fn sprinkles_are_reproducible() {
        let (m, d) = flat_diamond();
        let a = sprinkle(&m, "minkowski:1", &d, 100, 7).unwrap();
        let b = sprinkle(&m, "minkowski:1", &d, 100, 7).unwrap();
        assert_eq!(a, b);
        let c = sprinkle(&m, "minkowski:1", &d, 100, 8).unwrap();
        assert_ne!(a.coords(), c.coords());
        let pts = a.coords().unwrap();
        for i in 0..100 {
            for j in 0..100 {
                assert_eq!(a.precedes(i, j), i == j || m.causal_le(&pts[i], &pts[j]));
            }
        }
        assert!(a.closure_is_idempotent());
        let one = sprinkle(&m, "minkowski:1", &d, 1, 7).unwrap();
        assert_eq!(one.n(), 1);
        assert!(one.relations().is_empty());
        assert!(sprinkle(&m, "minkowski:1", &d, 0, 7).is_err());
    }

    #[test]
    fn scanner_examples() {
        let chain = CausalSet::new(4, vec![(0, 1), (1, 2), (2, 3)]).unwrap();
        let r = exhaustive_ptolemy(&chain, 0.0, Some(1)).unwrap();
        assert_eq!(r.samples, 1);
        assert_eq!(r.min_slack, Some(0.0));

        // l12, l13, l14, l23, l24, l34 = 1, 1, 3, 1, 1, 1
        let mut t = vec![0.0; 16];
        for (i, j, v) in [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 3.0), (1, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0)] {
            t[i * 4 + j] = v;
        }
        let raw = chain.with_raw_table(t).unwrap();
        let r = exhaustive_ptolemy(&raw, 0.0, None).unwrap();
        assert_eq!(r.min_slack, Some(-3.0));
        assert_eq!(r.witness_indices, Some([0, 1, 2, 3]));
        assert!(r.raw_table);
        assert_eq!(r.violations, 1);
    }

    #[test]
    fn sprinkled_flat_set_is_ptolemaic() {
        let (m, d) = flat_diamond();
        let cs = sprinkle(&m, "minkowski:1", &d, 40, 3).unwrap();
        let r = exhaustive_ptolemy(&cs, 0.0, None).unwrap();
        assert!(r.samples > 0);
        assert_eq!(r.violations, 0);
        let w = r.witness.clone().unwrap();
        assert_eq!(m.separations(&w).slack(), r.min_slack.unwrap());
        let lp = cs.clone().with_longest_path().unwrap();
        assert!(lp.reverse_triangle_min().unwrap().0 >= -1e-12);
        let conv = cs.convergence().unwrap().unwrap();
        assert!(conv.max_ratio <= 1.0 + 1e-12 && conv.min_ratio > 0.0);
    }

    #[test]
    fn json_round_trip() {
        let (m, d) = flat_diamond();
        let cs = sprinkle(&m, "minkowski:1", &d, 30, 11).unwrap();
        let back = CausalSet::from_json(cs.to_json()).unwrap();
        assert_eq!(back, cs);
        let text = serde_json::to_string(&cs.to_json()).unwrap();
        let again = CausalSet::from_json(serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(again, cs);

        let plain: CausalSetJson = serde_json::from_str(r#"{"n":3,"relations":[[0,1],[1,2]],"weights":[0.5,2]}"#).unwrap();
        let lp = CausalSet::from_json(plain).unwrap();
        assert_eq!(lp.ell(0, 2), 2.5);

        let mut bad = cs.to_json();
        bad.relations.pop();
        assert!(CausalSet::from_json(bad).is_err());
    }
}
