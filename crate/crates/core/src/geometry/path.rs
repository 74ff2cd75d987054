use super::Domain;
use crate::error::{BergmanError, Result};
use num_complex::Complex64;
use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

type C = Complex64;

/// Polyline inside a domain.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerPath {
    pub vertices: Vec<C>,
    pub length: f64,
}

/// Node keys: lattice nodes are `(i, j)`; free points use `i = i64::MIN`.
type Key = (i64, i64);

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    dist: f64,
    key: Key,
}

impl Eq for Entry {}

impl Ord for Entry {
    // min-heap on distance, ties broken by lexicographic node index
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.key.cmp(&self.key))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const NEIGHBORS: [(i64, i64); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

/// 8-connected lattice graph `step·(i + i j)` restricted to the domain, with
/// nodes discovered lazily so only the explored part of the lattice is tested.
pub struct GridGraph<'a> {
    domain: &'a Domain,
    step: f64,
    inside: RefCell<HashMap<Key, bool>>,
}

impl<'a> GridGraph<'a> {
    pub fn new(domain: &'a Domain, step: f64) -> Result<Self> {
        if !(step > 0.0) {
            return Err(BergmanError::InvalidInput(format!("step must be positive, got {step}")));
        }
        Ok(GridGraph {
            domain,
            step,
            inside: RefCell::new(HashMap::new()),
        })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    fn lattice_point(&self, k: Key) -> C {
        C::new(k.0 as f64 * self.step, k.1 as f64 * self.step)
    }

    fn lattice_inside(&self, k: Key) -> bool {
        if let Some(&v) = self.inside.borrow().get(&k) {
            return v;
        }
        let v = self.domain.contains(self.lattice_point(k));
        self.inside.borrow_mut().insert(k, v);
        v
    }

    /// Lattice nodes within one diagonal step of a free point, joined by clear segments.
    fn attach(&self, z: C) -> Vec<(Key, f64)> {
        let i0 = (z.re / self.step).floor() as i64;
        let j0 = (z.im / self.step).floor() as i64;
        let reach = self.step * std::f64::consts::SQRT_2 * (1.0 + 1e-12);
        let mut out = Vec::new();
        for i in i0 - 1..=i0 + 2 {
            for j in j0 - 1..=j0 + 2 {
                let k = (i, j);
                let p = self.lattice_point(k);
                let d = (p - z).norm();
                if d <= reach && self.lattice_inside(k) && self.domain.segment_clear(z, p) {
                    out.push((k, d));
                }
            }
        }
        out
    }

    /// Single-source Dijkstra from `source` to every target; returns the path
    /// to each target, or `None` when it is unreachable at this step.
    pub fn shortest_paths(&self, source: C, targets: &[C]) -> Vec<Option<InnerPath>> {
        let src_key: Key = (i64::MIN, -1);
        let target_key = |t: usize| -> Key { (i64::MIN, t as i64) };
        let point_of = |k: Key| -> C {
            if k.0 == i64::MIN {
                if k.1 < 0 {
                    source
                } else {
                    targets[k.1 as usize]
                }
            } else {
                self.lattice_point(k)
            }
        };
        // lattice node -> free targets attached to it
        let mut target_links: HashMap<Key, Vec<(usize, f64)>> = HashMap::new();
        for (t, &z) in targets.iter().enumerate() {
            for (k, d) in self.attach(z) {
                target_links.entry(k).or_default().push((t, d));
            }
        }
        let mut dist: HashMap<Key, f64> = HashMap::new();
        let mut prev: HashMap<Key, Key> = HashMap::new();
        let mut done: HashMap<Key, bool> = HashMap::new();
        let mut heap = BinaryHeap::new();
        dist.insert(src_key, 0.0);
        heap.push(Entry {
            dist: 0.0,
            key: src_key,
        });
        let mut remaining = targets.len();
        let reach = self.step * std::f64::consts::SQRT_2 * (1.0 + 1e-12);

        let relax = |from: Key,
                     to: Key,
                     w: f64,
                     base: f64,
                     dist: &mut HashMap<Key, f64>,
                     prev: &mut HashMap<Key, Key>,
                     heap: &mut BinaryHeap<Entry>| {
            let nd = base + w;
            let better = match dist.get(&to) {
                Some(&d) => nd < d || (nd == d && prev.get(&to).is_some_and(|p| from < *p)),
                None => true,
            };
            if better {
                dist.insert(to, nd);
                prev.insert(to, from);
                heap.push(Entry { dist: nd, key: to });
            }
        };

        while let Some(Entry { dist: d, key }) = heap.pop() {
            if done.get(&key).copied().unwrap_or(false) {
                continue;
            }
            if dist.get(&key).is_some_and(|&best| d > best) {
                continue;
            }
            done.insert(key, true);
            if key.0 == i64::MIN && key.1 >= 0 {
                remaining -= 1;
                if remaining == 0 {
                    break;
                }
                continue;
            }
            let here = point_of(key);
            if key == src_key {
                for (k, w) in self.attach(source) {
                    relax(key, k, w, d, &mut dist, &mut prev, &mut heap);
                }
                for (t, &z) in targets.iter().enumerate() {
                    let w = (z - source).norm();
                    if w <= reach && self.domain.segment_clear(source, z) {
                        relax(key, target_key(t), w, d, &mut dist, &mut prev, &mut heap);
                    }
                }
                continue;
            }
            for (di, dj) in NEIGHBORS {
                let k = (key.0 + di, key.1 + dj);
                if done.get(&k).copied().unwrap_or(false) || !self.lattice_inside(k) {
                    continue;
                }
                let p = self.lattice_point(k);
                if !self.domain.segment_clear(here, p) {
                    continue;
                }
                relax(key, k, (p - here).norm(), d, &mut dist, &mut prev, &mut heap);
            }
            if let Some(links) = target_links.get(&key) {
                for &(t, w) in links {
                    relax(key, target_key(t), w, d, &mut dist, &mut prev, &mut heap);
                }
            }
        }

        (0..targets.len())
            .map(|t| {
                let tk = target_key(t);
                if !done.get(&tk).copied().unwrap_or(false) {
                    return None;
                }
                let mut verts = vec![point_of(tk)];
                let mut k = tk;
                while let Some(&p) = prev.get(&k) {
                    verts.push(point_of(p));
                    k = p;
                }
                verts.reverse();
                Some(InnerPath {
                    vertices: verts,
                    length: dist[&tk],
                })
            })
            .collect()
    }
}

/// Shortest polyline from `x` to `y` through the 8-connected interior lattice
/// of spacing `step`.
pub fn shortest_inner_path(domain: &Domain, x: C, y: C, step: f64) -> Result<InnerPath> {
    if !domain.contains(x) {
        return Err(BergmanError::OutsideDomain(x));
    }
    if !domain.contains(y) {
        return Err(BergmanError::OutsideDomain(y));
    }
    let graph = GridGraph::new(domain, step)?;
    if x == y {
        return Ok(InnerPath {
            vertices: vec![x],
            length: 0.0,
        });
    }
    graph
        .shortest_paths(x, &[y])
        .pop()
        .flatten()
        .ok_or(BergmanError::DisconnectedAtResolution { step })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn disc_path_close_to_straight() {
        let d = Domain::disc(1.0).unwrap();
        let p = shortest_inner_path(&d, c(-0.5, 0.0), c(0.5, 0.0), 0.05).unwrap();
        assert!(p.length >= 1.0 && p.length <= 1.1, "{}", p.length);
        for w in p.vertices.windows(2) {
            assert!(d.contains(w[0]));
            assert!(d.contains(0.5 * (w[0] + w[1])));
        }
    }

    #[test]
    fn slit_forces_detour_around_tip() {
        let d = Domain::slit_disc(0.0, 1.0).unwrap();
        let p = shortest_inner_path(&d, c(0.5, 0.1), c(0.5, -0.1), 0.02).unwrap();
        // straight-line detour through the tip: 2·|0.5+0.1i|
        let lower = 2.0 * c(0.5, 0.1).norm();
        assert!(p.length >= lower - 1e-12, "{}", p.length);
        assert!(p.vertices.iter().any(|v| v.re < 0.0));
        for w in p.vertices.windows(2) {
            assert!(d.segment_clear(w[0], w[1]));
        }
    }

    #[test]
    fn identical_endpoints_have_zero_length() {
        let d = Domain::disc(1.0).unwrap();
        let p = shortest_inner_path(&d, c(0.2, 0.1), c(0.2, 0.1), 0.1).unwrap();
        assert_eq!(p.length, 0.0);
    }

    #[test]
    fn outside_points_are_rejected() {
        let d = Domain::disc(1.0).unwrap();
        assert!(shortest_inner_path(&d, c(2.0, 0.0), c(0.0, 0.0), 0.1).is_err());
    }

    #[test]
    fn disconnected_at_coarse_resolution() {
        // annulus too thin to contain lattice nodes at this step
        let d = Domain::annulus(0.95, 1.0).unwrap();
        let r = shortest_inner_path(&d, c(0.97, 0.0), c(-0.97, 0.0), 0.5);
        assert!(matches!(r, Err(BergmanError::DisconnectedAtResolution { .. })));
    }

    #[test]
    fn deterministic_paths() {
        let d = Domain::square(1.0).unwrap();
        let a = shortest_inner_path(&d, c(-0.73, -0.41), c(0.62, 0.55), 0.05).unwrap();
        let b = shortest_inner_path(&d, c(-0.73, -0.41), c(0.62, 0.55), 0.05).unwrap();
        assert_eq!(a, b);
    }
}
