use std::collections::{BTreeSet, HashMap, HashSet};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::search::{shortest_path, Region};
use crate::config::{Limits, Parallelism};
use crate::error::{Error, Result};
use crate::flows::{classify, directed_edge, flow_of_walk, lattice_path, support, BalanceKind, CayleyGraph, EdgeKey, Flow, UnionFind};
use crate::geodesic::Ball;
use crate::tower::{GroupSpec, SolubleElement, SolubleGroup};
use crate::words::{enumerate_irreducible, FreeWord, Letter};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Multipliers {
    /// Loop `i` gets weight `2^i`; no edge can cancel.
    #[default]
    PowersOfTwo,
    /// Every loop gets weight 1; cancellation is checked afterwards.
    Unit,
}

#[derive(Clone, Debug)]
pub struct ConstructionOptions {
    pub multipliers: Multipliers,
    pub limits: Limits,
    pub parallelism: Parallelism,
    /// Vertex budget for a direct path between two sphere vertices.
    pub path_budget: usize,
}

impl Default for ConstructionOptions {
    fn default() -> Self {
        ConstructionOptions {
            multipliers: Multipliers::PowersOfTwo,
            limits: Limits::default(),
            parallelism: Parallelism::sequential(),
            path_budget: 10_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepthCertificate {
    pub k: usize,
    /// Weight of the flow, in decimal.
    #[serde(rename = "N")]
    pub weight: String,
    pub rho_lower: u64,
    pub sphere_coverage: bool,
    pub support_connected: bool,
    pub distance_check: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionStats {
    pub sphere_size: usize,
    pub connecting_paths: usize,
    /// Sphere pairs joined through the shared hub instead of a direct path.
    pub hub_routes: usize,
    pub loops: usize,
    pub sigma_edges: usize,
    pub sigma_vertices: usize,
}

#[derive(Clone, Debug)]
pub struct Construction {
    pub element: SolubleElement,
    pub certificate: DepthCertificate,
    pub stats: ConstructionStats,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub valid: bool,
    pub failures: Vec<String>,
}

fn tree_condition(k: usize, rho_lower: u64) -> bool {
    2 * k as u64 + 1 < rho_lower
}

/// Builds a strict dead end of depth at least `k` in `spec` (degree ≥ 2).
///
/// In the Cayley graph `C` of the next group down, the `k`-sphere is joined
/// by paths outside `B_{k−1}`, every edge of that graph is put on a simple
/// loop outside `B_{k−1}`, and loop `i` contributes `2^i` times its
/// characteristic flow. `rho_lower` bounds the shortest relation of the
/// lower group from below; `2k + 1 < rho_lower` makes `B_k` a tree.
pub fn construct_dead_end(
    spec: GroupSpec,
    k: usize,
    rho_lower: u64,
    options: &ConstructionOptions,
) -> Result<Construction> {
    let base = spec
        .lower()
        .ok_or_else(|| Error::Unsupported("dead ends are built in degree 2 or higher".into()))?;
    if k == 0 || !tree_condition(k, rho_lower) {
        return Err(Error::DepthTooLarge { k, rho: rho_lower });
    }
    let graph = SolubleGroup::new(base);
    let m = spec.m;
    let ball = Ball::grow(base, k as u64, &options.limits, &options.parallelism);
    if ball.truncated {
        return Err(Error::MemoryGuard {
            used: options.limits.mem_limit_bytes,
            limit: options.limits.mem_limit_bytes,
        });
    }
    let blocked: HashSet<SolubleElement> = ball.spheres[..k].iter().flatten().cloned().collect();
    // the sphere in shortlex order of the reduced words reaching it
    let sphere_words: Vec<FreeWord> = enumerate_irreducible(m, k).collect();
    let sphere: Vec<SolubleElement> = sphere_words
        .iter()
        .map(|w| SolubleElement::from_word(w, base))
        .collect::<Result<_>>()?;
    if sphere.len() != ball.spheres[k].len() {
        return Err(Error::Invariant(format!(
            "ball of radius {k} in {base} is not a tree although 2k+1 < {rho_lower}"
        )));
    }
    let region = Region {
        graph: &graph,
        blocked: &blocked,
        removed_edge: None,
    };

    let mut index: HashMap<SolubleElement, usize> = HashMap::new();
    let mut uf = UnionFind::new(0);
    let mut skeleton: BTreeSet<EdgeKey<SolubleElement>> = BTreeSet::new();
    let mut add_walk = |start: &SolubleElement, letters: &[Letter], uf: &mut UnionFind| {
        let mut at = start.clone();
        let mut i = *index.entry(at.clone()).or_insert_with(|| uf.push());
        for &l in letters {
            let (edge, _) = directed_edge(&graph, &at, l);
            at = graph.step(&at, l);
            let j = *index.entry(at.clone()).or_insert_with(|| uf.push());
            uf.union(i, j);
            skeleton.insert(edge);
            i = j;
        }
        i
    };
    let sphere_ids: Vec<usize> = sphere.iter().map(|s| add_walk(s, &[], &mut uf)).collect();
    let mut stats = ConstructionStats {
        sphere_size: sphere.len(),
        ..Default::default()
    };
    for i in 1..sphere.len() {
        if uf.find(sphere_ids[i - 1]) == uf.find(sphere_ids[i]) {
            continue;
        }
        let (a, b) = (&sphere[i - 1], &sphere[i]);
        match shortest_path(&region, a, b, options.path_budget) {
            Ok(Some(path)) => {
                add_walk(a, &path, &mut uf);
                stats.connecting_paths += 1;
            }
            Ok(None) => {
                return Err(Error::LoopSearchFailed(format!(
                    "no path outside the {}-ball between sphere vertices",
                    k - 1
                )))
            }
            Err(e) if e.is_budget() && base.d == 2 => {
                for (start, word) in [(a, &sphere_words[i - 1]), (b, &sphere_words[i])] {
                    let route = hub_route(&graph, word, k, &blocked).ok_or_else(|| {
                        Error::LoopSearchFailed(format!("no hub route from {word} outside the ball"))
                    })?;
                    add_walk(start, &route, &mut uf);
                }
                stats.hub_routes += 1;
            }
            Err(e) => return Err(e),
        }
    }

    let mut covered: HashSet<EdgeKey<SolubleElement>> = HashSet::new();
    let mut flow: Flow<SolubleElement> = Flow::zero(m);
    let mut loop_index = 0usize;
    for edge in &skeleton {
        if covered.contains(edge) {
            continue;
        }
        let letter = Letter::positive(edge.generator);
        let target = graph.step(&edge.source, letter);
        let region = Region {
            graph: &graph,
            blocked: &blocked,
            removed_edge: Some(edge),
        };
        let back = shortest_path(&region, &target, &edge.source, options.limits.search_budget)?.ok_or_else(|| {
            Error::LoopSearchFailed(format!(
                "edge {} has no loop outside the {}-ball",
                graph.vertex_form(&edge.source),
                k - 1
            ))
        })?;
        let mut letters = vec![letter];
        letters.extend(back);
        let (chi, _) = flow_of_walk(&graph, &edge.source, &letters);
        if chi.weight() != BigUint::from(letters.len()) {
            return Err(Error::Invariant("loop found by the search is not simple".into()));
        }
        covered.extend(chi.edges().cloned());
        let factor = match options.multipliers {
            Multipliers::PowersOfTwo => BigInt::one() << loop_index,
            Multipliers::Unit => BigInt::one(),
        };
        flow.add_assign(&chi.scale(&factor));
        loop_index += 1;
    }
    stats.loops = loop_index;
    stats.sigma_edges = covered.len();
    for edge in &covered {
        if flow.get(edge).is_zero() {
            return Err(Error::Invariant(format!(
                "flow vanishes on an edge at {} (multipliers {:?})",
                graph.vertex_form(&edge.source),
                options.multipliers
            )));
        }
    }
    if flow.len() != covered.len() {
        return Err(Error::Invariant("flow support differs from the loop union".into()));
    }

    let element = SolubleElement::from_flow(spec, flow)?;
    let sup = support(&graph, element.flow().unwrap());
    stats.sigma_vertices = sup.vertices.len();
    let certificate = DepthCertificate {
        k,
        weight: element.flow().unwrap().weight().to_string(),
        rho_lower,
        sphere_coverage: ball.spheres[k].iter().all(|s| sup.vertices.contains(s)),
        support_connected: sup.is_connected(),
        distance_check: distance_is(&ball, k, &sup.vertices),
    };
    Ok(Construction {
        element,
        certificate,
        stats,
    })
}

/// Route from the sphere vertex reached by `word` to a hub shared by every
/// sphere vertex, for bases of degree 2. It runs along a monotone lattice path
/// `α` to the far point `P = (k+1, …, k+1)`, once around a square there, back
/// along `α`, and back down `word`. The end is the square at `P` conjugated
/// from the identity, which depends on `P` only. Each coordinate order for
/// `α` is tried until every vertex of the route lies outside the blocked ball.
fn hub_route(
    graph: &SolubleGroup,
    word: &FreeWord,
    k: usize,
    blocked: &HashSet<SolubleElement>,
) -> Option<Vec<Letter>> {
    let m = word.rank();
    let far = k as i64 + 1;
    let end = word.exponent_sums();
    let side = k / 4 + 2;
    let square: Vec<Letter> = [Letter::positive(0), Letter::positive(1), Letter::negative(0), Letter::negative(1)]
        .iter()
        .flat_map(|&l| std::iter::repeat_n(l, side))
        .collect();
    let start = SolubleElement::from_word(word, graph.spec()).ok()?;
    for rotation in 0..m {
        let mut out_path = Vec::new();
        for i in (0..m).map(|i| (i + rotation) % m) {
            let mut diff = vec![0; m];
            diff[i] = far - end[i];
            out_path.extend_from_slice(lattice_path(&diff, m).letters());
        }
        let back: Vec<Letter> = out_path.iter().rev().map(|l| l.inv()).collect();
        let down: Vec<Letter> = word.inverse().letters().to_vec();
        let route: Vec<Letter> = [out_path, square.clone(), back, down].concat();
        let mut at = start.clone();
        let clear = route.iter().all(|&l| {
            at = graph.step(&at, l);
            !blocked.contains(&at)
        });
        if clear {
            return Some(route);
        }
    }
    None
}

/// No vertex within distance `k − 1` and at least one at distance `k`.
fn distance_is(ball: &Ball, k: usize, vertices: &BTreeSet<SolubleElement>) -> bool {
    let mut hits_k = false;
    for v in vertices {
        match ball.distance_of(v) {
            Some(d) if (d as usize) < k => return false,
            Some(d) if d as usize == k => hits_k = true,
            _ => {}
        }
    }
    hits_k
}

/// Recomputes every certificate field from `x`. Valid certificates certify
/// strict depth at least `cert.k`.
pub fn verify_certificate(cert: &DepthCertificate, x: &SolubleElement, limits: &Limits) -> Verification {
    let mut failures = Vec::new();
    let Some(base) = x.spec().lower() else {
        return Verification {
            valid: false,
            failures: vec!["element has no flow payload".into()],
        };
    };
    let graph = SolubleGroup::new(base);
    let flow = x.flow().unwrap();
    if !tree_condition(cert.k, cert.rho_lower) {
        failures.push(format!("2k+1 = {} is not below rho_lower = {}", 2 * cert.k + 1, cert.rho_lower));
    }
    if flow.is_zero() || classify(&graph, flow).kind != BalanceKind::Balanced {
        failures.push("flow is not a nonzero balanced flow".into());
    }
    let weight = flow.weight().to_string();
    if weight != cert.weight {
        failures.push(format!("weight is {weight}, certificate says {}", cert.weight));
    }
    let sup = support(&graph, flow);
    let connected = sup.is_connected();
    if !(connected && cert.support_connected) {
        failures.push(format!("support has {} components", sup.components.len()));
    }
    let ball = Ball::grow(base, cert.k as u64, limits, &Parallelism::sequential());
    if ball.truncated {
        failures.push(format!("memory guard stopped the {}-ball", cert.k));
    } else {
        let tree_size = enumerate_irreducible(base.m, cert.k).count();
        if ball.spheres[cert.k].len() != tree_size {
            failures.push(format!("ball of radius {} is not a tree", cert.k));
        }
        let covered = ball.spheres[cert.k].iter().all(|s| sup.vertices.contains(s));
        if !(covered && cert.sphere_coverage) {
            failures.push(format!("support misses part of the {}-sphere", cert.k));
        }
        if !(distance_is(&ball, cert.k, &sup.vertices) && cert.distance_check) {
            failures.push(format!("distance from the identity to the support is not {}", cert.k));
        }
    }
    Verification {
        valid: failures.is_empty(),
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deadend::strict_depth;
    use crate::geodesic::exact_length;

    fn build() -> Construction {
        construct_dead_end(GroupSpec::new(2, 2).unwrap(), 1, 4, &ConstructionOptions::default()).unwrap()
    }

    #[test]
    fn lattice_k1() {
        let c = build();
        assert_eq!(c.stats.sphere_size, 4);
        assert!(verify_certificate(&c.certificate, &c.element, &Limits::default()).valid);
        let r = strict_depth(&c.element, 1, &exact_length, &Parallelism::sequential()).unwrap();
        assert_eq!(r.strict_depth, 1);
        let n: u64 = c.certificate.weight.parse().unwrap();
        assert_eq!(exact_length(&c.element).unwrap(), n + 2);
    }

    #[test]
    fn inflated_k_fails() {
        let c = build();
        let mut cert = c.certificate.clone();
        cert.k = 2;
        let v = verify_certificate(&cert, &c.element, &Limits::default());
        assert!(!v.valid);
    }

    #[test]
    fn disconnected_support_fails() {
        let c = build();
        let flow = c.element.flow().unwrap();
        // add a far-away square: balanced, but a second component
        let g = SolubleGroup::new(GroupSpec::new(2, 1).unwrap());
        let far = SolubleElement::from_point(2, vec![20, 20]);
        let letters: Vec<Letter> = crate::words::FreeWord::parse("abAB", 2).unwrap().letters().to_vec();
        let (sq, _) = flow_of_walk(&g, &far, &letters);
        let x = SolubleElement::from_flow(c.element.spec(), flow.add(&sq)).unwrap();
        let mut cert = c.certificate.clone();
        cert.weight = x.flow().unwrap().weight().to_string();
        assert!(!verify_certificate(&cert, &x, &Limits::default()).valid);
    }

    #[test]
    fn too_deep_is_rejected() {
        let err = construct_dead_end(GroupSpec::new(2, 2).unwrap(), 2, 4, &ConstructionOptions::default());
        assert!(matches!(err, Err(Error::DepthTooLarge { k: 2, rho: 4 })));
    }
}
