//! Multipoint relay selection (RFC 3626 greedy heuristic).

use super::config::{WILL_ALWAYS, WILL_NEVER};
use crate::NodeId;
use std::collections::{BTreeMap, BTreeSet};

/// Selects MPRs for `self_id`.
///
/// `neighbors` maps each symmetric one-hop neighbor to its willingness;
/// `two_hop` maps a neighbor to the symmetric neighbors it advertises. Strict
/// two-hop nodes are those not equal to `self_id` and not themselves one-hop
/// neighbors. Nodes reachable only through willingness-0 neighbors are dropped
/// from the coverage requirement.
///
/// Willingness-7 neighbors are always selected. The rest are picked greedily
/// by: sole provider of an uncovered node, then highest willingness, then most
/// uncovered nodes reached, then lowest id.
pub fn select_mprs(
    self_id: NodeId,
    neighbors: &BTreeMap<NodeId, u8>,
    two_hop: &BTreeMap<NodeId, BTreeSet<NodeId>>,
) -> BTreeSet<NodeId> {
    // strict two-hop node -> eligible providers
    let mut providers: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    let mut reachable: BTreeSet<NodeId> = BTreeSet::new();
    for (&via, reached) in two_hop {
        let Some(&will) = neighbors.get(&via) else { continue };
        for &n2 in reached {
            if n2 == self_id || neighbors.contains_key(&n2) {
                continue;
            }
            reachable.insert(n2);
            if will != WILL_NEVER {
                providers.entry(n2).or_default().push(via);
            }
        }
    }
    let dropped = reachable.len() - providers.len();
    if dropped > 0 {
        log::debug!("node {self_id}: {dropped} two-hop node(s) reachable only via willingness-0 neighbors");
    }

    let mut mprs: BTreeSet<NodeId> = neighbors
        .iter()
        .filter(|(_, &w)| w == WILL_ALWAYS)
        .map(|(&id, _)| id)
        .collect();
    let mut uncovered: BTreeSet<NodeId> = providers
        .iter()
        .filter(|(_, via)| !via.iter().any(|v| mprs.contains(v)))
        .map(|(&n2, _)| n2)
        .collect();

    while !uncovered.is_empty() {
        let mut best: Option<((bool, u8, usize, std::cmp::Reverse<NodeId>), NodeId)> = None;
        for (&cand, &will) in neighbors {
            if will == WILL_NEVER || mprs.contains(&cand) {
                continue;
            }
            let Some(reached) = two_hop.get(&cand) else { continue };
            let covers = reached.iter().filter(|n| uncovered.contains(n)).count();
            if covers == 0 {
                continue;
            }
            let sole = reached
                .iter()
                .filter(|n| uncovered.contains(n))
                .any(|n| providers[n].len() == 1);
            let key = (sole, will, covers, std::cmp::Reverse(cand));
            if best.as_ref().is_none_or(|(k, _)| key > *k) {
                best = Some((key, cand));
            }
        }
        let Some((_, chosen)) = best else { break };
        mprs.insert(chosen);
        for n in &two_hop[&chosen] {
            uncovered.remove(n);
        }
    }
    mprs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nb(list: &[(NodeId, u8)]) -> BTreeMap<NodeId, u8> {
        list.iter().copied().collect()
    }

    fn th(list: &[(NodeId, &[NodeId])]) -> BTreeMap<NodeId, BTreeSet<NodeId>> {
        list.iter().map(|(k, v)| (*k, v.iter().copied().collect())).collect()
    }

    #[test]
    fn nothing_to_cover() {
        let s = select_mprs(0, &nb(&[(1, 3), (2, 3)]), &BTreeMap::new());
        assert!(s.is_empty());
    }

    #[test]
    fn star_sole_provider() {
        let s = select_mprs(0, &nb(&[(1, 3)]), &th(&[(1, &[2, 3, 0])]));
        assert_eq!(s, BTreeSet::from([1]));
    }

    #[test]
    fn redundant_neighbor_skipped() {
        // B=1 reaches D=3 and E=4; C=2 reaches only D.
        let s = select_mprs(0, &nb(&[(1, 3), (2, 3)]), &th(&[(1, &[3, 4]), (2, &[3])]));
        assert_eq!(s, BTreeSet::from([1]));
    }

    #[test]
    fn willingness_extremes() {
        // 1 is the only provider of 5 but never willing; 2 always willing.
        let s = select_mprs(0, &nb(&[(1, 0), (2, 7), (3, 3)]), &th(&[(1, &[5]), (3, &[6])]));
        assert!(!s.contains(&1));
        assert!(s.contains(&2));
        assert!(s.contains(&3));
    }

    #[test]
    fn one_hop_neighbors_are_not_two_hop() {
        let s = select_mprs(0, &nb(&[(1, 3), (2, 3)]), &th(&[(1, &[2]), (2, &[1])]));
        assert!(s.is_empty());
    }

    #[test]
    fn higher_willingness_wins_ties() {
        let s = select_mprs(0, &nb(&[(1, 3), (2, 6)]), &th(&[(1, &[5]), (2, &[5])]));
        assert_eq!(s, BTreeSet::from([2]));
        let s = select_mprs(0, &nb(&[(1, 3), (2, 3)]), &th(&[(1, &[5]), (2, &[5])]));
        assert_eq!(s, BTreeSet::from([1]));
    }
}
