//! Weighted graphs, exhaustive and sweep Cheeger estimates, and the
//! Dirichlet eigenvalue bound.

use super::{CheegerEstimate, Method, Witness};
use crate::error::{Error, Result};
use crate::tolerances;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest graph accepted by [`bruteforce_cheeger`].
pub const BRUTEFORCE_MAX_VERTICES: usize = 20;

/// Which subsets compete in the discrete isoperimetric infimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// Subsets with at most half the total volume.
    #[default]
    HalfVolume,
    /// Every nonempty proper subset. On finite graphs the infimum is driven
    /// by complements of single vertices.
    Unnormalized,
}

/// A connected graph with positive vertex volumes and edge areas.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedGraph {
    volumes: Vec<f64>,
    edges: Vec<(usize, usize, f64)>,
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl WeightedGraph {
    pub fn new(volumes: Vec<f64>, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        let n = volumes.len();
        if n == 0 {
            return Err(Error::Invalid("graph has no vertices".into()));
        }
        if let Some(v) = volumes.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Invalid(format!("vertex {v} has non-positive volume {}", volumes[v])));
        }
        let mut adjacency = vec![Vec::new(); n];
        let mut seen = std::collections::HashSet::new();
        for &(u, v, a) in &edges {
            if u >= n || v >= n {
                return Err(Error::Invalid(format!("edge ({u}, {v}) refers to a missing vertex")));
            }
            if u == v {
                return Err(Error::Invalid(format!("self-loop at vertex {u}")));
            }
            if !(a.is_finite() && a > 0.0) {
                return Err(Error::Invalid(format!("edge ({u}, {v}) has non-positive area {a}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::Invalid(format!("duplicate edge ({u}, {v})")));
            }
            adjacency[u].push((v, a));
            adjacency[v].push((u, a));
        }
        let g = Self { volumes, edges, adjacency };
        if !g.is_connected(&(0..n).collect::<Vec<_>>()) {
            return Err(Error::Disconnected);
        }
        Ok(g)
    }

    /// Reads `v volume` and `u v area` lines; `#` starts a comment. Vertices
    /// are numbered from zero and default to volume one.
    pub fn parse(text: &str) -> Result<Self> {
        let mut volumes: Vec<Option<f64>> = Vec::new();
        let mut edges = Vec::new();
        let grow = |volumes: &mut Vec<Option<f64>>, v: usize| {
            if volumes.len() <= v {
                volumes.resize(v + 1, None);
            }
        };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = content.split_whitespace().collect();
            let err = |message: String| Error::Line { line, message };
            let vertex = |t: &str| t.parse::<usize>().map_err(|_| err(format!("`{t}` is not a vertex index")));
            let weight = |t: &str| match t.parse::<f64>() {
                Ok(w) if w.is_finite() && w > 0.0 => Ok(w),
                _ => Err(err(format!("`{t}` is not a positive weight"))),
            };
            match tokens.as_slice() {
                [] => {}
                [v, vol] => {
                    let v = vertex(v)?;
                    let vol = weight(vol)?;
                    grow(&mut volumes, v);
                    if volumes[v].replace(vol).is_some() {
                        return Err(err(format!("volume of vertex {v} given twice")));
                    }
                }
                [u, v, a] => {
                    let (u, v, a) = (vertex(u)?, vertex(v)?, weight(a)?);
                    grow(&mut volumes, u.max(v));
                    edges.push((u, v, a));
                }
                _ => return Err(err(format!("expected `v volume` or `u v area`, found {} fields", tokens.len()))),
            }
        }
        Self::new(volumes.into_iter().map(|v| v.unwrap_or(1.0)).collect(), edges)
    }

    /// The text form read by [`WeightedGraph::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (v, vol) in self.volumes.iter().enumerate() {
            out.push_str(&format!("{v} {vol:?}\n"));
        }
        for (u, v, a) in &self.edges {
            out.push_str(&format!("{u} {v} {a:?}\n"));
        }
        out
    }

    pub fn len(&self) -> usize {
        self.volumes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.volumes.is_empty()
    }

    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    /// Total area of the edges at `v`.
    pub fn degree(&self, v: usize) -> f64 {
        self.adjacency[v].iter().map(|(_, a)| a).sum()
    }

    pub fn total_volume(&self) -> f64 {
        self.volumes.iter().sum()
    }

    /// `max_v deg(v) / vol(v)`.
    pub fn degree_ratio(&self) -> f64 {
        (0..self.len()).map(|v| self.degree(v) / self.volumes[v]).fold(0.0, f64::max)
    }

    /// The same graph with every vertex volume multiplied by `factor`.
    pub fn scale_volumes(&self, factor: f64) -> Result<Self> {
        Self::new(self.volumes.iter().map(|v| v * factor).collect(), self.edges.clone())
    }

    fn membership(&self, set: &[usize]) -> Result<Vec<bool>> {
        let mut inside = vec![false; self.len()];
        for &v in set {
            if v >= self.len() {
                return Err(Error::Invalid(format!("vertex {v} is not in the graph")));
            }
            inside[v] = true;
        }
        Ok(inside)
    }

    /// `(A(∂S), V(S))`: area of the edges leaving `S` and its volume.
    pub fn cut_and_volume(&self, set: &[usize]) -> Result<(f64, f64)> {
        let inside = self.membership(set)?;
        let cut = self.edges.iter().filter(|(u, v, _)| inside[*u] != inside[*v]).map(|e| e.2).sum();
        let vol = (0..self.len()).filter(|&v| inside[v]).map(|v| self.volumes[v]).sum();
        Ok((cut, vol))
    }

    /// `A(∂S) / V(S)` for a nonempty subset.
    pub fn ratio(&self, set: &[usize]) -> Result<f64> {
        if set.is_empty() {
            return Err(Error::Invalid("the empty set has no isoperimetric ratio".into()));
        }
        let (cut, vol) = self.cut_and_volume(set)?;
        Ok(cut / vol)
    }

    /// Whether `set` induces a connected subgraph.
    pub fn is_connected(&self, set: &[usize]) -> bool {
        let Ok(inside) = self.membership(set) else { return false };
        let Some(&start) = set.first() else { return false };
        let mut seen = vec![false; self.len()];
        seen[start] = true;
        let mut stack = vec![start];
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &(u, _) in &self.adjacency[v] {
                if inside[u] && !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == set.iter().filter(|&&v| v < self.len()).collect::<std::collections::HashSet<_>>().len()
    }
}

/// A random connected graph: a random spanning tree plus each remaining
/// pair with probability `p`. Areas lie in `[0.2, 1]` and volumes are chosen
/// so that `deg / vol ≤ 2`.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64) -> WeightedGraph {
    let mut edges = Vec::new();
    let mut present = std::collections::HashSet::new();
    for v in 1..n {
        let u = rng.random_range(0..v);
        present.insert((u, v));
        edges.push((u, v, rng.random_range(0.2..=1.0)));
    }
    for u in 0..n {
        for v in u + 1..n {
            if !present.contains(&(u, v)) && rng.random_bool(p) {
                edges.push((u, v, rng.random_range(0.2..=1.0)));
            }
        }
    }
    let mut deg = vec![0.0; n];
    for (u, v, a) in &edges {
        deg[*u] += a;
        deg[*v] += a;
    }
    let volumes = deg.iter().map(|d: &f64| d.max(0.2) * rng.random_range(0.5..=1.0)).collect();
    WeightedGraph::new(volumes, edges).expect("random graphs are connected with positive weights")
}

fn mask_members(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|v| mask & (1 << v) != 0).collect()
}

/// Exact minimum of `A(∂S)/V(S)` over connected subsets admitted by the
/// convention, by enumeration of all subsets. Ties go to the smallest bitmask.
pub fn bruteforce_cheeger(g: &WeightedGraph, convention: Convention) -> Result<CheegerEstimate> {
    let n = g.len();
    if n > BRUTEFORCE_MAX_VERTICES {
        return Err(Error::Invalid(format!(
            "exhaustive search is capped at {BRUTEFORCE_MAX_VERTICES} vertices, graph has {n}"
        )));
    }
    if n < 2 {
        return Err(Error::Invalid("a single vertex has no proper subsets".into()));
    }
    let nbr: Vec<u32> = (0..n).map(|v| g.adjacency[v].iter().fold(0u32, |m, (u, _)| m | (1 << u))).collect();
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let total = g.total_volume();
    let best = (1..full)
        .into_par_iter()
        .filter_map(|mask| {
            let mut vol = 0.0;
            for v in 0..n {
                if mask & (1 << v) != 0 {
                    vol += g.volumes[v];
                }
            }
            if convention == Convention::HalfVolume && vol > 0.5 * total {
                return None;
            }
            // Flood fill inside the mask from its lowest vertex.
            let mut reached = mask & mask.wrapping_neg();
            loop {
                let mut next = reached;
                let mut bits = reached;
                while bits != 0 {
                    let v = bits.trailing_zeros() as usize;
                    next |= nbr[v] & mask;
                    bits &= bits - 1;
                }
                if next == reached {
                    break;
                }
                reached = next;
            }
            if reached != mask {
                return None;
            }
            let cut: f64 = g
                .edges
                .iter()
                .filter(|(u, v, _)| ((mask >> u) & 1) != ((mask >> v) & 1))
                .map(|e| e.2)
                .sum();
            Some((cut / vol, mask))
        })
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .ok_or_else(|| Error::Invalid("no admissible subset".into()))?;
    Ok(CheegerEstimate {
        value: best.0,
        witness: Witness::Vertices(mask_members(best.1, n)),
        method: Method::BruteForce,
        convention,
    })
}

/// Minimum ratio over the sublevel sets `{f ≤ t}` of a vertex function.
/// Under [`Convention::HalfVolume`] a sublevel set heavier than half the
/// total is replaced by its complement.
pub fn sweep_cheeger(g: &WeightedGraph, f: &[f64], convention: Convention) -> Result<CheegerEstimate> {
    let n = g.len();
    if f.len() != n {
        return Err(Error::Dimension(format!("vertex function has {} values for {n} vertices", f.len())));
    }
    if let Some(v) = f.iter().position(|x| !x.is_finite()) {
        return Err(Error::Invalid(format!("vertex function is not finite at vertex {v}")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| f[a].total_cmp(&f[b]).then(a.cmp(&b)));
    if f[order[0]] == f[order[n - 1]] {
        return Err(Error::Invalid("constant vertex function has no sublevel cuts".into()));
    }
    let total = g.total_volume();
    let mut inside = vec![false; n];
    let mut cut = 0.0;
    let mut vol = 0.0;
    let mut best: Option<(f64, f64, Vec<usize>)> = None;
    for (k, &v) in order.iter().enumerate() {
        inside[v] = true;
        vol += g.volumes[v];
        for &(u, a) in &g.adjacency[v] {
            cut += if inside[u] { -a } else { a };
        }
        let last_at_level = k + 1 == n || f[order[k + 1]] != f[v];
        if !last_at_level || k + 1 == n {
            continue;
        }
        let (side_vol, members): (f64, Vec<usize>) = if convention == Convention::HalfVolume && vol > 0.5 * total {
            (total - vol, order[k + 1..].to_vec())
        } else {
            (vol, order[..=k].to_vec())
        };
        let r = cut.max(0.0) / side_vol;
        if best.as_ref().is_none_or(|b| r < b.0) {
            best = Some((r, f[v], members));
        }
    }
    let (value, level, mut vertices) = best.expect("a non-constant function has a proper sublevel set");
    vertices.sort_unstable();
    // Recompute the winner from scratch so the witness reproduces it exactly.
    let value = g.ratio(&vertices).unwrap_or(value);
    Ok(CheegerEstimate { value, witness: Witness::Level { level, vertices }, method: Method::Sweep, convention })
}

/// The indicator profile of a vertex set: zero on the set, one elsewhere.
pub fn indicator_profile(g: &WeightedGraph, set: &[usize]) -> Result<Vec<f64>> {
    Ok(g.membership(set)?.iter().map(|&b| if b { 0.0 } else { 1.0 }).collect())
}

/// Smallest Dirichlet eigenvalue on an interior vertex set.
#[derive(Debug, Clone, Serialize)]
pub struct DirichletEigen {
    pub lambda1: f64,
    /// `2√λ₁`, an upper bound for the Cheeger constant of any
    /// graph with `deg / vol ≤ 2` whose admissible sets include the interior.
    pub cheeger_upper: f64,
    /// Eigenfunction on the interior, `Σ vol f² = 1`, positive.
    pub eigenvector: Vec<f64>,
    pub interior: Vec<usize>,
    pub iterations: usize,
    /// `‖M x − λ x‖` for the symmetrized operator.
    pub residual: f64,
    /// `max deg/vol` over the interior.
    pub degree_ratio: f64,
}

/// The symmetrized Dirichlet operator `V^{-1/2} L_U V^{-1/2}` on `U`, where
/// `L_U` keeps every edge at `U` in the diagonal (boundary values vanish).
pub fn dirichlet_operator(g: &WeightedGraph, interior: &[usize]) -> Result<DMatrix<f64>> {
    let index = interior_index(g, interior)?;
    let k = interior.len();
    let mut m = DMatrix::zeros(k, k);
    for (i, &v) in interior.iter().enumerate() {
        m[(i, i)] = g.degree(v) / g.volumes[v];
        for &(u, a) in &g.adjacency[v] {
            if let Some(j) = index[u] {
                m[(i, j)] -= a / (g.volumes[v] * g.volumes[u]).sqrt();
            }
        }
    }
    Ok(m)
}

fn interior_index(g: &WeightedGraph, interior: &[usize]) -> Result<Vec<Option<usize>>> {
    if interior.is_empty() {
        return Err(Error::Invalid("Dirichlet problem needs a nonempty interior".into()));
    }
    let mut index = vec![None; g.len()];
    for (i, &v) in interior.iter().enumerate() {
        if v >= g.len() {
            return Err(Error::Invalid(format!("vertex {v} is not in the graph")));
        }
        if index[v].replace(i).is_some() {
            return Err(Error::Invalid(format!("vertex {v} repeated in the interior")));
        }
    }
    // Every component of the interior must touch the boundary.
    let mut seen = vec![false; g.len()];
    for &start in interior {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut touches = false;
        while let Some(v) = stack.pop() {
            for &(u, _) in &g.adjacency[v] {
                if index[u].is_none() {
                    touches = true;
                } else if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        if !touches {
            return Err(Error::Singular(format!(
                "interior component containing vertex {start} does not reach the boundary"
            )));
        }
    }
    Ok(index)
}

const MAX_INVERSE_ITERATIONS: usize = 100_000;

/// Smallest eigenvalue of `L_U f = λ V f` by inverse iteration on the
/// Cholesky factor of the symmetrized operator.
pub fn dirichlet_lambda1(g: &WeightedGraph, interior: &[usize]) -> Result<DirichletEigen> {
    let m = dirichlet_operator(g, interior)?;
    let chol = m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Singular("Dirichlet operator is not positive definite".into()))?;
    let sqrt_vol = DVector::from_iterator(interior.len(), interior.iter().map(|&v| g.volumes[v].sqrt()));
    let mut x = sqrt_vol.normalize();
    let mut lambda = x.dot(&(&m * &x));
    let mut iterations = 0;
    while iterations < MAX_INVERSE_ITERATIONS {
        iterations += 1;
        let y = chol.solve(&x).normalize();
        let next = y.dot(&(&m * &y));
        let converged = (next - lambda).abs() <= tolerances::INVERSE_ITERATION * next.abs()
            && (&y - &x).norm() <= 1e-10;
        x = y;
        lambda = next;
        if converged {
            break;
        }
    }
    let residual = (&m * &x - &x * lambda).norm();
    if x.sum() < 0.0 {
        x = -x;
    }
    let eigenvector = x.iter().zip(sqrt_vol.iter()).map(|(a, s)| a / s).collect();
    let degree_ratio = interior.iter().map(|&v| g.degree(v) / g.volumes[v]).fold(0.0, f64::max);
    Ok(DirichletEigen {
        lambda1: lambda,
        cheeger_upper: 2.0 * lambda.max(0.0).sqrt(),
        eigenvector,
        interior: interior.to_vec(),
        iterations,
        residual,
        degree_ratio,
    })
}

/// `min A(∂S)/V(S)` over nonempty `S ⊆ U`, by enumeration (`|U| ≤ 20`).
pub fn dirichlet_cheeger(g: &WeightedGraph, interior: &[usize]) -> Result<f64> {
    interior_index(g, interior)?;
    let k = interior.len();
    if k > BRUTEFORCE_MAX_VERTICES {
        return Err(Error::Invalid(format!("interior larger than {BRUTEFORCE_MAX_VERTICES} vertices")));
    }
    (1u32..(1u32 << k))
        .into_par_iter()
        .map(|mask| {
            let set: Vec<usize> = mask_members(mask, k).into_iter().map(|i| interior[i]).collect();
            g.ratio(&set)
        })
        .try_reduce(|| f64::INFINITY, |a, b| Ok(a.min(b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{seeded, sym_eigenvalues};

    fn unit(n: usize, edges: &[(usize, usize)]) -> WeightedGraph {
        WeightedGraph::new(vec![1.0; n], edges.iter().map(|&(u, v)| (u, v, 1.0)).collect()).unwrap()
    }

    fn path(n: usize) -> WeightedGraph {
        unit(n, &(0..n - 1).map(|i| (i, i + 1)).collect::<Vec<_>>())
    }

    #[test]
    fn small_graphs_have_the_enumerated_constants() {
        let c4 = unit(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let h = bruteforce_cheeger(&c4, Convention::HalfVolume).unwrap();
        assert_eq!(h.value, 1.0);
        let w = h.witness.vertices().unwrap();
        assert_eq!(w.len(), 2);
        assert!(c4.is_connected(w));
        assert_eq!(bruteforce_cheeger(&unit(2, &[(0, 1)]), Convention::HalfVolume).unwrap().value, 1.0);
        let p3 = bruteforce_cheeger(&path(3), Convention::HalfVolume).unwrap();
        assert_eq!(p3.value, 1.0);
        assert_eq!(p3.witness.vertices().unwrap(), &[0]);
    }

    #[test]
    fn unnormalized_convention_degenerates() {
        // On P_5 the complement of an endpoint has ratio 1/4.
        let g = path(5);
        let h = bruteforce_cheeger(&g, Convention::Unnormalized).unwrap();
        assert_eq!(h.value, 0.25);
        assert_eq!(h.witness.vertices().unwrap().len(), 4);
        assert!(bruteforce_cheeger(&g, Convention::HalfVolume).unwrap().value > h.value);
    }

    #[test]
    fn bruteforce_rejects_large_graphs() {
        assert!(bruteforce_cheeger(&path(21), Convention::HalfVolume).is_err());
    }

    #[test]
    fn construction_rejects_bad_graphs() {
        assert_eq!(WeightedGraph::new(vec![1.0; 3], vec![(0, 1, 1.0)]), Err(Error::Disconnected));
        assert!(WeightedGraph::new(vec![1.0, 0.0], vec![(0, 1, 1.0)]).is_err());
        assert!(WeightedGraph::new(vec![1.0; 2], vec![(0, 1, -1.0)]).is_err());
        assert!(WeightedGraph::new(vec![1.0; 2], vec![(0, 1, 1.0), (1, 0, 1.0)]).is_err());
    }

    #[test]
    fn parser_reads_volumes_edges_and_comments() {
        let g = WeightedGraph::parse("# a triangle\n0 2.0\n0 1 0.5\n1 2 1.5 # heavy\n\n2 0 1\n").unwrap();
        assert_eq!(g.volumes(), &[2.0, 1.0, 1.0]);
        assert_eq!(g.edges().len(), 3);
        assert_eq!(WeightedGraph::parse(&g.to_text()).unwrap(), g);
        match WeightedGraph::parse("0 1 1\n1 2 x\n") {
            Err(Error::Line { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match WeightedGraph::parse("0 1 1\n\n1 2 3 4\n") {
            Err(Error::Line { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert_eq!(WeightedGraph::parse("0 1 1\n2 3 1\n"), Err(Error::Disconnected));
    }

    #[test]
    fn sweep_recovers_the_bruteforce_witness() {
        let mut rng = seeded(11);
        for _ in 0..20 {
            let n = rng.random_range(4..=12);
            let g = random_graph(&mut rng, n, 0.3);
            let h = bruteforce_cheeger(&g, Convention::HalfVolume).unwrap();
            let f = indicator_profile(&g, h.witness.vertices().unwrap()).unwrap();
            let s = sweep_cheeger(&g, &f, Convention::HalfVolume).unwrap();
            assert_eq!(s.value, h.value);
            assert_eq!(s.reevaluate(&g).unwrap(), s.value);
            assert_eq!(h.reevaluate(&g).unwrap(), h.value);
            let random: Vec<f64> = (0..n).map(|_| rng.random()).collect();
            assert!(sweep_cheeger(&g, &random, Convention::HalfVolume).unwrap().value >= h.value);
        }
    }

    #[test]
    fn sweep_rejects_constant_functions() {
        assert!(sweep_cheeger(&path(4), &[2.0; 4], Convention::HalfVolume).is_err());
        assert!(sweep_cheeger(&path(4), &[1.0, 2.0], Convention::HalfVolume).is_err());
    }

    #[test]
    fn dirichlet_eigenvalue_of_the_path_interior() {
        let g = path(5);
        let d = dirichlet_lambda1(&g, &[1, 2, 3]).unwrap();
        let dense = sym_eigenvalues(&dirichlet_operator(&g, &[1, 2, 3]).unwrap())[0];
        assert!((d.lambda1 - dense).abs() < 1e-10);
        // Interior of P_5 is P_3 with Dirichlet ends: 2 − 2cos(π/4).
        assert!((d.lambda1 - (2.0 - 2f64.sqrt())).abs() < 1e-12);
        assert!(d.eigenvector.iter().all(|v| *v > 0.0));
        assert!(matches!(dirichlet_lambda1(&g, &[0, 1, 2, 3, 4]), Err(Error::Singular(_))));
        assert!(dirichlet_lambda1(&g, &[]).is_err());
    }

    #[test]
    fn cheeger_is_bounded_by_the_dirichlet_eigenvalue() {
        let mut rng = seeded(12);
        for _ in 0..30 {
            let n = rng.random_range(3..=12);
            let g = random_graph(&mut rng, n, 0.25);
            assert!(g.degree_ratio() <= 2.0 + 1e-12);
            let h = bruteforce_cheeger(&g, Convention::HalfVolume).unwrap();
            let witness = h.witness.vertices().unwrap();
            assert!((dirichlet_cheeger(&g, witness).unwrap() - h.value).abs() < 1e-12);
            let d = dirichlet_lambda1(&g, witness).unwrap();
            let dense = sym_eigenvalues(&dirichlet_operator(&g, witness).unwrap())[0];
            assert!((d.lambda1 - dense).abs() < 1e-10);
            assert!(h.value <= d.cheeger_upper + 1e-9, "{} > {}", h.value, d.cheeger_upper);
        }
    }

    #[test]
    fn scaling_volumes_scales_the_estimates() {
        let mut rng = seeded(13);
        let g = random_graph(&mut rng, 9, 0.3);
        let s = g.scale_volumes(4.0).unwrap();
        let h = bruteforce_cheeger(&g, Convention::HalfVolume).unwrap();
        let hs = bruteforce_cheeger(&s, Convention::HalfVolume).unwrap();
        assert!((hs.value - h.value / 4.0).abs() < 1e-12);
        let w = h.witness.vertices().unwrap();
        let d = dirichlet_lambda1(&g, w).unwrap();
        let ds = dirichlet_lambda1(&s, w).unwrap();
        assert!((ds.lambda1 - d.lambda1 / 4.0).abs() < 1e-12);
        assert!((ds.cheeger_upper - d.cheeger_upper / 2.0).abs() < 1e-12);
        assert!(hs.value <= ds.cheeger_upper);
    }
}
