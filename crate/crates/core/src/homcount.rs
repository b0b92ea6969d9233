//! Homomorphism counts and indistinguishability over graph families.
//!
//! Sources are collapsed to their underlying simple graph (a parallel edge
//! imposes the same constraint twice), and counts are arbitrary precision.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::canon;
use crate::error::{Budget, Error, Result};
use crate::graph::{DenseGraph, MultiGraph, VertexId};
use crate::twidth::exact_treewidth;

/// Counts maps `V(f) -> V(g)` preserving every edge by extending partial
/// maps vertex by vertex in id order, one budget unit per partial map.
pub fn hom_count_bruteforce(f: &MultiGraph, g: &MultiGraph, budget: &mut Budget) -> Result<BigUint> {
    let src = f.dense();
    let dst = g.dense();
    let n = src.len();
    let mut image = vec![0usize; n];

    fn go(src: &DenseGraph, dst: &DenseGraph, image: &mut [usize], i: usize, budget: &mut Budget) -> Result<u64> {
        budget.tick()?;
        if i == image.len() {
            return Ok(1);
        }
        let mut total = 0u64;
        for x in 0..dst.len() {
            if src.adj[i]
                .iter()
                .filter(|&&j| j < i)
                .all(|&j| dst.adjacent(image[j], x))
            {
                image[i] = x;
                total += go(src, dst, image, i + 1, budget)?;
            }
        }
        Ok(total)
    }

    Ok(BigUint::from(go(&src, &dst, &mut image, 0, budget)?))
}

/// Counts homomorphisms by dynamic programming over an optimal tree
/// decomposition of `f`.
///
/// The table of a bag maps each edge-respecting assignment of its vertices
/// to the number of homomorphisms of the part of `f` below that bag
/// extending it; children are summed per assignment of the shared vertices.
pub fn hom_count_td(f: &MultiGraph, g: &MultiGraph, budget: &mut Budget) -> Result<BigUint> {
    if f.vertex_count() == 0 {
        return Ok(BigUint::one());
    }
    let (_, td) = exact_treewidth(f, budget)?;
    let dst = g.dense();
    let src = f.dense();
    let index: BTreeMap<VertexId, usize> = src.ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let bags: BTreeMap<VertexId, Vec<usize>> = td
        .bags
        .iter()
        .map(|(&b, bag)| (b, bag.iter().map(|v| index[v]).collect()))
        .collect();

    // root at the smallest bag id; children in id order
    let root = *bags.keys().next().expect("at least one bag");
    let mut order = vec![root];
    let mut parent: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    let mut i = 0;
    while i < order.len() {
        let b = order[i];
        for c in td.tree.neighbours(b)? {
            if c != root && !parent.contains_key(&c) {
                parent.insert(c, b);
                order.push(c);
            }
        }
        i += 1;
    }

    let mut tables: HashMap<VertexId, HashMap<Vec<usize>, BigUint>> = HashMap::new();
    for &b in order.iter().rev() {
        let bag = &bags[&b];
        let children: Vec<VertexId> = order.iter().copied().filter(|c| parent.get(c) == Some(&b)).collect();
        // for each child: positions (in child bag, in this bag) of shared vertices and summed table
        let mut summed = Vec::new();
        for c in &children {
            let cbag = &bags[c];
            let shared: Vec<(usize, usize)> = cbag
                .iter()
                .enumerate()
                .filter_map(|(ci, v)| bag.iter().position(|w| w == v).map(|bi| (ci, bi)))
                .collect();
            let mut sums: HashMap<Vec<usize>, BigUint> = HashMap::new();
            for (assignment, count) in tables.remove(c).expect("child done first") {
                let key: Vec<usize> = shared.iter().map(|&(ci, _)| assignment[ci]).collect();
                *sums.entry(key).or_insert_with(BigUint::zero) += count;
            }
            summed.push((shared, sums));
        }
        let mut table = HashMap::new();
        let k = bag.len();
        let mut assignment = vec![0usize; k];
        let total = dst.len().checked_pow(k as u32).unwrap_or(usize::MAX);
        budget.charge(total as u64)?;
        if !dst.is_empty() || k == 0 {
            'assign: for code in 0..total {
                let mut rest = code;
                for slot in assignment.iter_mut() {
                    *slot = rest % dst.len();
                    rest /= dst.len();
                }
                for a in 0..k {
                    for b2 in a + 1..k {
                        if src.adjacent(bag[a], bag[b2]) && !dst.adjacent(assignment[a], assignment[b2]) {
                            continue 'assign;
                        }
                    }
                }
                let mut count = BigUint::one();
                for (shared, sums) in &summed {
                    let key: Vec<usize> = shared.iter().map(|&(_, bi)| assignment[bi]).collect();
                    match sums.get(&key) {
                        Some(s) => count *= s,
                        None => continue 'assign,
                    }
                }
                table.insert(assignment.clone(), count);
            }
        }
        tables.insert(b, table);
    }
    Ok(tables.remove(&root).unwrap().into_values().sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountMethod {
    Brute,
    Td,
}

pub fn hom_count(f: &MultiGraph, g: &MultiGraph, method: CountMethod, budget: &mut Budget) -> Result<BigUint> {
    match method {
        CountMethod::Brute => hom_count_bruteforce(f, g, budget),
        CountMethod::Td => hom_count_td(f, g, budget),
    }
}

/// A class of test graphs, bounded by vertex count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilySpec {
    Trees(usize),
    Cycles(usize),
    /// Disjoint unions of paths.
    Paths(usize),
    /// Every simple graph.
    All(usize),
    /// An explicit list, used in the given order.
    List(Vec<MultiGraph>),
}

/// Largest bound accepted for the enumerated families.
pub const FAMILY_CAP: usize = 10;
/// Largest bound for [`FamilySpec::All`]; there are about 12 million graphs on 10 vertices.
pub const ALL_CAP: usize = 9;

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Trees(n) => write!(f, "trees<={n}"),
            FamilySpec::Cycles(n) => write!(f, "cycles<={n}"),
            FamilySpec::Paths(n) => write!(f, "paths<={n}"),
            FamilySpec::All(n) => write!(f, "all<={n}"),
            FamilySpec::List(l) => write!(f, "list({})", l.len()),
        }
    }
}

fn partitions(n: usize, max_part: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if n == 0 {
        out.push(prefix.clone());
        return;
    }
    for p in (1..=n.min(max_part)).rev() {
        prefix.push(p);
        partitions(n - p, p, prefix, out);
        prefix.pop();
    }
}

/// Members of a family: isomorph-free, ordered by vertex count and then
/// canonical form (list families keep their order), starting at one vertex.
pub fn generate_family(fam: &FamilySpec) -> Result<Vec<MultiGraph>> {
    let check = |n: usize, cap: usize| {
        if n > cap {
            Err(Error::TooLarge(format!("family bound {n} exceeds {cap}")))
        } else {
            Ok(())
        }
    };
    Ok(match fam {
        FamilySpec::Trees(n) => {
            check(*n, FAMILY_CAP)?;
            let mut out = Vec::new();
            let mut layer = if *n >= 1 { vec![MultiGraph::empty(1)] } else { vec![] };
            for k in 1..=*n {
                out.extend(layer.iter().cloned());
                if k == *n {
                    break;
                }
                layer = canon::dedup_sorted(layer.iter().flat_map(|t| {
                    t.vertices().map(move |v| {
                        let mut bigger = t.clone();
                        let leaf = bigger.add_vertex();
                        bigger.add_edge(v, leaf).expect("new leaf");
                        bigger
                    })
                }));
            }
            out
        }
        FamilySpec::Cycles(n) => {
            check(*n, FAMILY_CAP)?;
            (3..=*n as u32).map(MultiGraph::cycle).collect()
        }
        FamilySpec::Paths(n) => {
            check(*n, FAMILY_CAP)?;
            let mut out = Vec::new();
            for k in 1..=*n {
                let mut parts = Vec::new();
                partitions(k, k, &mut Vec::new(), &mut parts);
                out.extend(canon::dedup_sorted(parts.into_iter().map(|parts| {
                    parts.iter().fold(MultiGraph::new(), |acc, &p| {
                        acc.disjoint_union(&MultiGraph::path(p as u32))
                    })
                })));
            }
            out
        }
        FamilySpec::All(n) => {
            check(*n, ALL_CAP)?;
            canon::all_graphs_by_order(*n).into_iter().skip(1).flatten().collect()
        }
        FamilySpec::List(list) => list.clone(),
    })
}

/// A family member with different counts into the two graphs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distinguisher {
    pub graph: MultiGraph,
    /// Position in the family's generation order.
    pub index: usize,
    pub count_g: BigUint,
    pub count_h: BigUint,
}

/// First member `F` (in generation order) with `hom(F, g) != hom(F, h)`.
pub fn distinguish(
    g: &MultiGraph,
    h: &MultiGraph,
    fam: &FamilySpec,
    budget: &mut Budget,
) -> Result<Option<Distinguisher>> {
    for (index, member) in generate_family(fam)?.into_iter().enumerate() {
        let cg = hom_count_td(&member, g, budget)?;
        let ch = hom_count_td(&member, h, budget)?;
        if cg != ch {
            return Ok(Some(Distinguisher {
                graph: member,
                index,
                count_g: cg,
                count_h: ch,
            }));
        }
    }
    Ok(None)
}

/// [`distinguish`] with members counted on `jobs` threads; each member gets
/// its own budget of `per_member` units. The answer is the same as the
/// sequential one: the lowest index that differs.
pub fn distinguish_parallel(
    g: &MultiGraph,
    h: &MultiGraph,
    fam: &FamilySpec,
    jobs: usize,
    per_member: u64,
) -> Result<Option<Distinguisher>> {
    let members = generate_family(fam)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Precondition(format!("cannot start {jobs} threads: {e}")))?;
    let results: Vec<Result<Option<(BigUint, BigUint)>>> = pool.install(|| {
        members
            .par_iter()
            .map(|member| {
                let mut budget = Budget::new(per_member);
                let cg = hom_count_td(member, g, &mut budget)?;
                let ch = hom_count_td(member, h, &mut budget)?;
                Ok((cg != ch).then_some((cg, ch)))
            })
            .collect()
    });
    for (index, (member, result)) in members.into_iter().zip(results).enumerate() {
        if let Some((count_g, count_h)) = result? {
            return Ok(Some(Distinguisher {
                graph: member,
                index,
                count_g,
                count_h,
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn both(f: &MultiGraph, g: &MultiGraph) -> BigUint {
        let mut b = Budget::default();
        let brute = hom_count_bruteforce(f, g, &mut b).unwrap();
        let td = hom_count_td(f, g, &mut b).unwrap();
        assert_eq!(brute, td);
        brute
    }

    fn two_k3() -> MultiGraph {
        MultiGraph::complete(3).disjoint_union(&MultiGraph::complete(3))
    }

    #[test]
    fn named_counts() {
        let k3 = MultiGraph::complete(3);
        let c6 = MultiGraph::cycle(6);
        assert_eq!(both(&MultiGraph::empty(1), &c6), BigUint::from(6u32));
        assert_eq!(both(&MultiGraph::complete(2), &c6), BigUint::from(12u32));
        assert_eq!(both(&k3, &c6), BigUint::zero());
        assert_eq!(both(&k3, &two_k3()), BigUint::from(12u32));
        assert_eq!(both(&MultiGraph::path(3), &k3), BigUint::from(12u32));
        assert_eq!(both(&c6, &two_k3()), BigUint::from(132u32));
        assert_eq!(both(&c6, &c6), BigUint::from(132u32));
    }

    #[test]
    fn degenerate_cases() {
        let empty = MultiGraph::new();
        assert_eq!(both(&empty, &MultiGraph::cycle(4)), BigUint::one());
        assert_eq!(both(&empty, &empty), BigUint::one());
        assert_eq!(both(&MultiGraph::path(2), &empty), BigUint::zero());
        // parallel edges in the source change nothing
        let dbl = MultiGraph::cycle(2);
        assert_eq!(both(&dbl, &MultiGraph::complete(4)), BigUint::from(12u32));
    }

    #[test]
    fn large_counts_do_not_overflow() {
        // hom(15 isolated vertices, K_30) = 30^15 > 2^64
        let f = MultiGraph::empty(15);
        let g = MultiGraph::complete(30);
        assert_eq!(
            hom_count_td(&f, &g, &mut Budget::default()).unwrap(),
            BigUint::from(30u32).pow(15)
        );
    }

    #[test]
    fn family_examples() {
        assert_eq!(generate_family(&FamilySpec::Trees(4)).unwrap().len(), 5);
        let counts: Vec<usize> = (1..=10)
            .map(|n| {
                generate_family(&FamilySpec::Trees(n))
                    .unwrap()
                    .iter()
                    .filter(|t| t.vertex_count() == n)
                    .count()
            })
            .collect();
        // OEIS A000055
        assert_eq!(counts, vec![1, 1, 1, 2, 3, 6, 11, 23, 47, 106]);
        let cycles = generate_family(&FamilySpec::Cycles(5)).unwrap();
        assert_eq!(
            cycles.iter().map(MultiGraph::vertex_count).collect::<Vec<_>>(),
            vec![3, 4, 5]
        );
        let paths = generate_family(&FamilySpec::Paths(3)).unwrap();
        let shapes: Vec<(usize, usize)> = paths.iter().map(|p| (p.vertex_count(), p.edge_count())).collect();
        assert_eq!(shapes, vec![(1, 0), (2, 0), (2, 1), (3, 0), (3, 1), (3, 2)]);
        assert!(generate_family(&FamilySpec::All(ALL_CAP + 1)).is_err());
        assert!(generate_family(&FamilySpec::Trees(FAMILY_CAP + 1)).is_err());
    }

    #[test]
    fn distinguish_examples() {
        let mut b = Budget::default();
        let c6 = MultiGraph::cycle(6);
        assert_eq!(distinguish(&c6, &c6, &FamilySpec::All(4), &mut b).unwrap(), None);
        let d = distinguish(&two_k3(), &c6, &FamilySpec::All(3), &mut b)
            .unwrap()
            .unwrap();
        assert!(canon::are_isomorphic(&d.graph, &MultiGraph::complete(3)));
        assert_eq!((d.count_g, d.count_h), (BigUint::from(12u32), BigUint::zero()));
        let p = distinguish_parallel(&two_k3(), &c6, &FamilySpec::All(3), 3, Budget::DEFAULT).unwrap();
        assert_eq!(p.map(|d| d.index), Some(d.index));
    }
}
