//! Degree-preserving rewiring that changes the triangle count, and relative
//! higher-order densities.
//!
//! The triangle-raising move picks a chain `D-B-A-C-E` with `B`, `C` non-adjacent
//! neighbors of `A`, removes `[B,D]` and `[C,E]`, and adds `[B,C]` and `[D,E]`.
//! A sampled chain is kept only if the exact triangle delta has the wanted sign.

use std::collections::BTreeSet;

use log::debug;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{Graph, SimplicialComplex};
use crate::error::{Error, Result};
use crate::synth;

/// Accepted move: removed `[b,d]`, `[c,e]`; added `[b,c]`, `[d,e]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rewire {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
    pub e: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    AddTriangle,
    /// Inverse move: removes `[b,c]`, `[d,e]` and adds `[b,d]`, `[c,e]`.
    RemoveTriangle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewireLog {
    pub accepted: Vec<(Direction, Rewire)>,
    pub attempts: usize,
}

/// Mutable working copy of a graph's adjacency.
#[derive(Debug, Clone)]
pub struct Rewirer {
    adj: Vec<BTreeSet<usize>>,
    eligible: Vec<usize>,
    triangles: usize,
    rng: ChaCha8Rng,
    pub max_attempts: usize,
    pub log: RewireLog,
}

fn pick<T: Copy>(items: &[T], rng: &mut ChaCha8Rng) -> Option<T> {
    (!items.is_empty()).then(|| items[rng.random_range(0..items.len())])
}

impl Rewirer {
    pub fn new(g: &Graph, seed: u64) -> Self {
        let adj: Vec<BTreeSet<usize>> = g.adjacency_lists().into_iter().map(|l| l.into_iter().collect()).collect();
        let eligible = (0..adj.len()).filter(|&v| adj[v].len() >= 2).collect();
        let mut r = Rewirer {
            adj,
            eligible,
            triangles: 0,
            rng: synth::rng(seed),
            max_attempts: 10 * g.node_count(),
            log: RewireLog { accepted: Vec::new(), attempts: 0 },
        };
        r.triangles = r.count_triangles();
        r
    }

    fn common(&self, u: usize, v: usize) -> usize {
        self.adj[u].intersection(&self.adj[v]).count()
    }

    fn count_triangles(&self) -> usize {
        let mut t = 0;
        for (u, nu) in self.adj.iter().enumerate() {
            for &v in nu.range(u + 1..) {
                t += self.adj[v].range(v + 1..).filter(|w| nu.contains(w)).count();
            }
        }
        t
    }

    pub fn triangles(&self) -> usize {
        self.triangles
    }

    pub fn graph(&self) -> Graph {
        let edges = self.adj.iter().enumerate().flat_map(|(u, nu)| nu.range(u + 1..).map(move |&v| (u, v)));
        Graph::new(self.adj.len(), edges)
    }

    fn remove(&mut self, u: usize, v: usize) {
        self.adj[u].remove(&v);
        self.adj[v].remove(&u);
    }

    fn insert(&mut self, u: usize, v: usize) {
        self.adj[u].insert(v);
        self.adj[v].insert(u);
    }

    fn sample_add(&mut self) -> Option<Rewire> {
        let a = pick(&self.eligible, &mut self.rng)?;
        let na: Vec<usize> = self.adj[a].iter().copied().collect();
        let i = self.rng.random_range(0..na.len());
        let mut j = self.rng.random_range(0..na.len() - 1);
        if j >= i {
            j += 1;
        }
        let (b, c) = (na[i], na[j]);
        if self.adj[b].contains(&c) {
            return None;
        }
        let ds: Vec<usize> =
            self.adj[b].iter().copied().filter(|&d| d != a && d != c && !self.adj[a].contains(&d)).collect();
        let d = pick(&ds, &mut self.rng)?;
        let es: Vec<usize> = self.adj[c]
            .iter()
            .copied()
            .filter(|&e| e != a && e != b && e != d && !self.adj[a].contains(&e) && !self.adj[d].contains(&e))
            .collect();
        let e = pick(&es, &mut self.rng)?;
        Some(Rewire { a, b, c, d, e })
    }

    /// Removes `[u1,v1]`, `[u2,v2]`, adds `[x1,y1]`, `[x2,y2]`, returning the exact
    /// change in triangle count.
    fn relink(&mut self, removed: [(usize, usize); 2], added: [(usize, usize); 2]) -> i64 {
        let mut delta = 0i64;
        for (u, v) in removed {
            self.remove(u, v);
            delta -= self.common(u, v) as i64;
        }
        for (u, v) in added {
            delta += self.common(u, v) as i64;
            self.insert(u, v);
        }
        delta
    }

    /// Applies the move when it changes the triangle count in the wanted
    /// direction, otherwise restores the graph.
    fn try_apply(&mut self, m: Rewire, direction: Direction) -> bool {
        let outer = [(m.b, m.d), (m.c, m.e)];
        let inner = [(m.b, m.c), (m.d, m.e)];
        let (removed, added) = match direction {
            Direction::AddTriangle => (outer, inner),
            Direction::RemoveTriangle => (inner, outer),
        };
        let delta = self.relink(removed, added);
        let wanted = match direction {
            Direction::AddTriangle => delta > 0,
            Direction::RemoveTriangle => delta < 0,
        };
        if wanted {
            self.triangles = (self.triangles as i64 + delta) as usize;
        } else {
            self.relink(added, removed);
        }
        wanted
    }

    fn sample_remove(&mut self) -> Option<Rewire> {
        let b = pick(&self.eligible, &mut self.rng)?;
        let nb: Vec<usize> = self.adj[b].iter().copied().collect();
        let c = pick(&nb, &mut self.rng)?;
        let shared: Vec<usize> = self.adj[b].intersection(&self.adj[c]).copied().collect();
        let a = pick(&shared, &mut self.rng)?;
        let d = self.rng.random_range(0..self.adj.len());
        if d == b || d == c || self.adj[b].contains(&d) {
            return None;
        }
        let es: Vec<usize> =
            self.adj[d].iter().copied().filter(|&e| e != b && e != c && !self.adj[c].contains(&e)).collect();
        let e = pick(&es, &mut self.rng)?;
        Some(Rewire { a, b, c, d, e })
    }

    /// One accepted move within `max_attempts` samples, or [`Error::Saturated`].
    pub fn step(&mut self, direction: Direction) -> Result<Rewire> {
        for attempt in 1..=self.max_attempts {
            self.log.attempts += 1;
            let accepted = match direction {
                Direction::AddTriangle => self.sample_add(),
                Direction::RemoveTriangle => self.sample_remove(),
            }
            .filter(|&m| self.try_apply(m, direction));
            if let Some(m) = accepted {
                debug!("rewire accepted after {attempt} attempt(s): {m:?}");
                self.log.accepted.push((direction, m));
                return Ok(m);
            }
        }
        Err(Error::Saturated { attempts: self.max_attempts, achieved: None })
    }
}

/// One triangle-raising rewire on a copy of `g`.
pub fn rewire_add_triangle(g: &Graph, seed: u64) -> Result<(Graph, Rewire)> {
    let mut r = Rewirer::new(g, seed);
    let m = r.step(Direction::AddTriangle)?;
    Ok((r.graph(), m))
}

/// `ρ_p = n_p' / n_p − 1`.
pub fn relative_density(original: &SimplicialComplex, modified: &SimplicialComplex, p: usize) -> Result<f64> {
    let base = original.count(p);
    if base == 0 {
        return Err(Error::UndefinedDensity(p));
    }
    Ok(modified.count(p) as f64 / base as f64 - 1.0)
}

#[derive(Debug, Clone)]
pub struct RewireOutcome {
    pub graph: Graph,
    pub log: RewireLog,
    pub original_triangles: usize,
    pub triangles: usize,
    pub achieved_rho2: f64,
    pub saturated: bool,
}

/// Rewires until `ρ_2` reaches `target` (from below with triangle-raising moves,
/// from above with the inverse move when `allow_remove` is set). Saturation stops
/// the loop and is reported in the outcome.
pub fn rewire_until(g: &Graph, target: f64, seed: u64, allow_remove: bool) -> Result<RewireOutcome> {
    if !target.is_finite() {
        return Err(Error::InvalidArgument(format!("target rho_2 {target} is not finite")));
    }
    if target < 0.0 && !allow_remove {
        return Err(Error::InvalidArgument("negative targets need the triangle-removing move".into()));
    }
    let mut r = Rewirer::new(g, seed);
    let base = r.triangles();
    if base == 0 {
        return Err(Error::UndefinedDensity(2));
    }
    let rho = |t: usize| t as f64 / base as f64 - 1.0;
    let direction = if target >= 0.0 { Direction::AddTriangle } else { Direction::RemoveTriangle };
    let mut saturated = false;
    loop {
        let current = rho(r.triangles());
        let done = match direction {
            Direction::AddTriangle => current >= target,
            Direction::RemoveTriangle => current <= target,
        };
        if done {
            break;
        }
        match r.step(direction) {
            Ok(_) => {}
            Err(Error::Saturated { .. }) => {
                saturated = true;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(RewireOutcome {
        graph: r.graph(),
        achieved_rho2: rho(r.triangles()),
        triangles: r.triangles(),
        original_triangles: base,
        log: r.log,
        saturated,
    })
}

/// Triangle-raising rewires until `ρ_2 ≥ target`; saturation is an error carrying
/// the achieved density.
pub fn rewire_to_target(g: &Graph, target: f64, seed: u64) -> Result<(Graph, f64)> {
    let out = rewire_until(g, target, seed, false)?;
    if out.saturated {
        return Err(Error::Saturated { attempts: out.log.attempts, achieved: Some(out.achieved_rho2) });
    }
    Ok((out.graph, out.achieved_rho2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::clique_lift;

    fn triangles(g: &Graph) -> usize {
        clique_lift(g, 2).unwrap().count(2)
    }

    #[test]
    fn p5_hand_example() {
        let g = crate::synth::path_graph(5);
        let mut r = Rewirer::new(&g, 0);
        let m = Rewire { a: 2, b: 1, c: 3, d: 0, e: 4 };
        assert!(r.try_apply(m, Direction::AddTriangle));
        assert_eq!(r.triangles(), 1);
        let h = r.graph();
        assert_eq!(h.edges(), &[(0, 4), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(h.degrees(), g.degrees());
        assert_eq!(triangles(&h), 1);
        // The sampler finds the same (unique) chain, up to the B/C mirror.
        let (s, m) = rewire_add_triangle(&g, 3).unwrap();
        assert_eq!(m.a, 2);
        assert_eq!(triangles(&s), 1);
        let k = clique_lift(&g, 2).unwrap();
        assert!(matches!(relative_density(&k, &clique_lift(&s, 2).unwrap(), 2), Err(Error::UndefinedDensity(2))));
    }

    #[test]
    fn complete_graph_saturates() {
        let e = rewire_add_triangle(&crate::synth::complete_graph(4), 0).unwrap_err();
        assert!(matches!(e, Error::Saturated { attempts: 40, .. }));
    }

    #[test]
    fn density_arithmetic() {
        let k = clique_lift(&crate::synth::complete_graph(4), 2).unwrap();
        assert_eq!(relative_density(&k, &k, 2).unwrap(), 0.0);
        assert_eq!(relative_density(&k, &k, 1).unwrap(), 0.0);
    }

    #[test]
    fn incremental_count_matches_recount() {
        let g = crate::synth::erdos_renyi(40, 0.15, 8);
        let mut r = Rewirer::new(&g, 1);
        for i in 0..20 {
            let dir = if i % 3 == 2 { Direction::RemoveTriangle } else { Direction::AddTriangle };
            r.step(dir).unwrap();
            assert_eq!(r.triangles(), triangles(&r.graph()));
            assert_eq!(r.graph().degrees(), g.degrees());
        }
    }

    #[test]
    fn target_loop_and_guards() {
        let g = crate::synth::erdos_renyi(128, 0.1, 2);
        assert_eq!(rewire_to_target(&g, 0.0, 0).unwrap().0, g);
        let out = rewire_until(&g, -0.2, 4, true).unwrap();
        assert!(out.achieved_rho2 <= -0.2 && !out.saturated);
        assert!(rewire_until(&g, -0.2, 4, false).is_err());
        let e = rewire_to_target(&crate::synth::complete_graph(5), 10.0, 0).unwrap_err();
        assert!(matches!(e, Error::Saturated { achieved: Some(_), .. }));
        assert!(matches!(rewire_to_target(&crate::synth::cycle_graph(6), 0.2, 0), Err(Error::UndefinedDensity(2))));
    }
}
