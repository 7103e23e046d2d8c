use crate::NodeId;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Route {
    pub next_hop: NodeId,
    pub hop_count: u32,
}

/// Minimum-hop routes from `self_id` over its symmetric neighbors and the
/// advertised `(dest, last_hop)` topology links.
///
/// Equal-length candidates are ordered by next hop id, then last-hop id.
pub fn compute_routes(
    self_id: NodeId,
    sym_neighbors: impl IntoIterator<Item = NodeId>,
    topology: impl IntoIterator<Item = (NodeId, NodeId)>,
) -> BTreeMap<NodeId, Route> {
    let mut routes = BTreeMap::new();
    let mut frontier: BTreeSet<NodeId> = BTreeSet::new();
    for n in sym_neighbors {
        if n != self_id {
            routes.insert(
                n,
                Route {
                    next_hop: n,
                    hop_count: 1,
                },
            );
            frontier.insert(n);
        }
    }
    let mut adjacency: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for (dest, last) in topology {
        adjacency.entry(last).or_default().push(dest);
    }
    let mut hops = 1;
    while !frontier.is_empty() {
        hops += 1;
        // dest -> (next_hop, last_hop)
        let mut found: BTreeMap<NodeId, (NodeId, NodeId)> = BTreeMap::new();
        for &last in &frontier {
            let via = routes[&last].next_hop;
            for &dest in adjacency.get(&last).map(Vec::as_slice).unwrap_or(&[]) {
                if dest == self_id || routes.contains_key(&dest) {
                    continue;
                }
                let cand = (via, last);
                found
                    .entry(dest)
                    .and_modify(|cur| {
                        if cand < *cur {
                            *cur = cand;
                        }
                    })
                    .or_insert(cand);
            }
        }
        frontier.clear();
        for (dest, (next_hop, _)) in found {
            routes.insert(
                dest,
                Route {
                    next_hop,
                    hop_count: hops,
                },
            );
            frontier.insert(dest);
        }
    }
    routes
}
