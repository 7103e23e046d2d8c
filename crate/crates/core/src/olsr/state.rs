use super::config::{OlsrConfig, WILL_DEFAULT};
use super::message::{ControlMessage, HelloEntry, LinkStatus, Payload};
use super::mpr::select_mprs;
use super::routes::{compute_routes, Route};
use crate::NodeId;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkTuple {
    pub sym: bool,
    /// When the symmetric status lapses; `None` while asymmetric.
    pub sym_expiry: Option<f64>,
    pub expiry: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopologyTuple {
    pub seq_no: u32,
    pub expiry: f64,
}

/// Protocol state of one OLSR node.
#[derive(Debug, Clone)]
pub struct OlsrNodeState {
    node_id: NodeId,
    willingness: u8,
    links: BTreeMap<NodeId, LinkTuple>,
    neighbor_willingness: BTreeMap<NodeId, u8>,
    // neighbor -> (two-hop node -> expiry)
    two_hop: BTreeMap<NodeId, BTreeMap<NodeId, f64>>,
    mpr_set: BTreeSet<NodeId>,
    mpr_selectors: BTreeMap<NodeId, f64>,
    // (dest, last_hop)
    topology: BTreeMap<(NodeId, NodeId), TopologyTuple>,
    // (originator, seq_no)
    duplicates: BTreeMap<(NodeId, u32), f64>,
    routes: BTreeMap<NodeId, Route>,
    routes_dirty: bool,
    hello_seq: u32,
    tc_seq: u32,
    // lower bound on every stored expiry
    earliest: f64,
}

impl OlsrNodeState {
    pub fn new(node_id: NodeId, willingness: u8) -> Self {
        Self {
            node_id,
            willingness,
            links: BTreeMap::new(),
            neighbor_willingness: BTreeMap::new(),
            two_hop: BTreeMap::new(),
            mpr_set: BTreeSet::new(),
            mpr_selectors: BTreeMap::new(),
            topology: BTreeMap::new(),
            duplicates: BTreeMap::new(),
            routes: BTreeMap::new(),
            routes_dirty: false,
            hello_seq: 0,
            tc_seq: 0,
            earliest: f64::INFINITY,
        }
    }

    pub fn node_id(&self) -> NodeId {
        self.node_id
    }

    pub fn willingness(&self) -> u8 {
        self.willingness
    }

    pub fn links(&self) -> &BTreeMap<NodeId, LinkTuple> {
        &self.links
    }

    pub fn two_hop_set(&self) -> &BTreeMap<NodeId, BTreeMap<NodeId, f64>> {
        &self.two_hop
    }

    pub fn mpr_set(&self) -> &BTreeSet<NodeId> {
        &self.mpr_set
    }

    pub fn mpr_selectors(&self) -> &BTreeMap<NodeId, f64> {
        &self.mpr_selectors
    }

    pub fn topology_set(&self) -> &BTreeMap<(NodeId, NodeId), TopologyTuple> {
        &self.topology
    }

    pub fn duplicate_set(&self) -> &BTreeMap<(NodeId, u32), f64> {
        &self.duplicates
    }

    pub fn neighbor_willingness(&self, neighbor: NodeId) -> u8 {
        self.neighbor_willingness
            .get(&neighbor)
            .copied()
            .unwrap_or(WILL_DEFAULT)
    }

    pub fn is_symmetric(&self, neighbor: NodeId) -> bool {
        self.links.get(&neighbor).is_some_and(|l| l.sym)
    }

    pub fn symmetric_neighbors(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.links.iter().filter(|(_, l)| l.sym).map(|(&n, _)| n)
    }

    pub fn is_mpr_selector(&self, node: NodeId) -> bool {
        self.mpr_selectors.contains_key(&node)
    }

    /// Inserts a link tuple directly, bypassing HELLO processing.
    pub fn add_link(&mut self, neighbor: NodeId, sym: bool, expiry: f64) {
        self.links.insert(
            neighbor,
            LinkTuple {
                sym,
                sym_expiry: sym.then_some(expiry),
                expiry,
            },
        );
        self.note_expiry(expiry);
        self.neighborhood_changed();
    }

    /// Inserts a topology tuple directly, bypassing TC processing.
    pub fn add_topology(&mut self, dest: NodeId, last_hop: NodeId, seq_no: u32, expiry: f64) {
        self.topology.insert((dest, last_hop), TopologyTuple { seq_no, expiry });
        self.note_expiry(expiry);
        self.routes_dirty = true;
    }

    /// Handles a HELLO heard from `msg.sender`.
    pub fn process_hello(&mut self, msg: &ControlMessage, now: f64, config: &OlsrConfig) {
        let Payload::Hello { willingness, entries } = &msg.payload else {
            return;
        };
        let sender = msg.sender;
        if sender == self.node_id {
            return;
        }
        let hold = now + config.neighb_hold_time;
        self.note_expiry(hold);
        let me = entries.iter().find(|e| e.neighbor == self.node_id);
        let mut changed = false;

        let link = self.links.entry(sender).or_insert_with(|| {
            changed = true;
            LinkTuple {
                sym: false,
                sym_expiry: None,
                expiry: hold,
            }
        });
        link.expiry = link.expiry.max(hold);
        if me.is_some() {
            changed |= !link.sym;
            link.sym = true;
            link.sym_expiry = Some(hold);
        }
        let sym = link.sym;

        if self.neighbor_willingness.insert(sender, *willingness) != Some(*willingness) {
            changed = true;
        }

        if sym {
            let advertised: BTreeMap<NodeId, f64> = entries
                .iter()
                .filter(|e| e.neighbor != self.node_id && e.status != LinkStatus::Asym)
                .map(|e| (e.neighbor, hold))
                .collect();
            let same = self
                .two_hop
                .get(&sender)
                .is_some_and(|old| old.keys().eq(advertised.keys()));
            changed |= !same;
            if advertised.is_empty() {
                self.two_hop.remove(&sender);
            } else {
                self.two_hop.insert(sender, advertised);
            }
        }

        match me.map(|e| e.status) {
            Some(LinkStatus::Mpr) => {
                self.mpr_selectors.insert(sender, hold);
            }
            Some(_) => {
                self.mpr_selectors.remove(&sender);
            }
            None => {}
        }

        if changed {
            self.neighborhood_changed();
        }
    }

    /// MPR set for the current link and two-hop sets.
    pub fn select_mprs(&self) -> BTreeSet<NodeId> {
        let neighbors: BTreeMap<NodeId, u8> = self
            .symmetric_neighbors()
            .map(|n| (n, self.neighbor_willingness(n)))
            .collect();
        let two_hop: BTreeMap<NodeId, BTreeSet<NodeId>> = self
            .two_hop
            .iter()
            .filter(|(n, _)| neighbors.contains_key(n))
            .map(|(&n, set)| (n, set.keys().copied().collect()))
            .collect();
        select_mprs(self.node_id, &neighbors, &two_hop)
    }

    /// Handles a TC message. Stale messages (older sequence number than one
    /// already recorded for the originator) are ignored.
    pub fn process_tc(&mut self, msg: &ControlMessage, now: f64, config: &OlsrConfig) {
        let Payload::Tc { selectors } = &msg.payload else {
            return;
        };
        let origin = msg.originator;
        if origin == self.node_id {
            return;
        }
        let newest = self
            .topology
            .iter()
            .filter(|((_, last), _)| *last == origin)
            .map(|(_, t)| t.seq_no)
            .max();
        if newest.is_some_and(|s| s > msg.seq_no) {
            return;
        }
        self.topology
            .retain(|&(_, last), t| last != origin || t.seq_no >= msg.seq_no);
        let expiry = now + config.top_hold_time;
        self.note_expiry(expiry);
        for &dest in selectors {
            self.topology.insert(
                (dest, origin),
                TopologyTuple {
                    seq_no: msg.seq_no,
                    expiry,
                },
            );
        }
        self.routes_dirty = true;
    }

    /// Duplicate check plus MPR forwarding rule for a flooded message.
    ///
    /// Records `(originator, seq_no)` on first receipt and returns whether
    /// this node must retransmit it, which is the case only when `sender`
    /// selected this node as MPR. Later copies are never retransmitted.
    pub fn should_forward(
        &mut self,
        originator: NodeId,
        seq_no: u32,
        sender: NodeId,
        now: f64,
        config: &OlsrConfig,
    ) -> bool {
        if originator == self.node_id {
            return false;
        }
        if self.duplicates.get(&(originator, seq_no)).is_some_and(|&exp| exp > now) {
            return false;
        }
        self.duplicates.insert((originator, seq_no), now + config.dup_hold_time);
        self.note_expiry(now + config.dup_hold_time);
        self.mpr_selectors.get(&sender).is_some_and(|&exp| exp > now)
    }

    pub fn compute_routes(&self) -> BTreeMap<NodeId, Route> {
        let two_hop = self
            .two_hop
            .iter()
            .filter(|(n, _)| self.is_symmetric(**n))
            .flat_map(|(n, set)| set.keys().map(move |z| (*z, *n)));
        compute_routes(
            self.node_id,
            self.symmetric_neighbors(),
            two_hop.chain(self.topology.keys().copied()),
        )
    }

    /// Current routing table, recomputed if the inputs changed.
    pub fn routing_table(&mut self) -> &BTreeMap<NodeId, Route> {
        if self.routes_dirty {
            self.routes = self.compute_routes();
            self.routes_dirty = false;
        }
        &self.routes
    }

    pub fn route_to(&mut self, dest: NodeId) -> Option<Route> {
        self.routing_table().get(&dest).copied()
    }

    /// Drops every entry whose expiry is at or before `now`.
    pub fn expire(&mut self, now: f64) {
        if now < self.earliest {
            return;
        }
        let mut neighborhood = false;
        let before = self.links.len();
        self.links.retain(|_, l| l.expiry > now);
        neighborhood |= self.links.len() != before;
        for l in self.links.values_mut() {
            if l.sym_expiry.is_some_and(|e| e <= now) {
                l.sym = false;
                l.sym_expiry = None;
                neighborhood = true;
            }
        }
        let links = &self.links;
        self.neighbor_willingness.retain(|n, _| links.contains_key(n));
        let before: usize = self.two_hop.values().map(BTreeMap::len).sum();
        self.two_hop.retain(|n, set| {
            if !links.get(n).is_some_and(|l| l.sym) {
                return false;
            }
            set.retain(|_, &mut e| e > now);
            !set.is_empty()
        });
        neighborhood |= self.two_hop.values().map(BTreeMap::len).sum::<usize>() != before;

        self.mpr_selectors.retain(|_, &mut e| e > now);
        self.duplicates.retain(|_, &mut e| e > now);
        let before = self.topology.len();
        self.topology.retain(|_, t| t.expiry > now);
        if self.topology.len() != before {
            self.routes_dirty = true;
        }
        if neighborhood {
            self.neighborhood_changed();
        }
        self.earliest = self.next_expiry().unwrap_or(f64::INFINITY);
    }

    fn note_expiry(&mut self, expiry: f64) {
        self.earliest = self.earliest.min(expiry);
    }

    fn neighborhood_changed(&mut self) {
        self.mpr_set = self.select_mprs();
        self.routes_dirty = true;
    }

    /// Earliest expiry among all stored entries.
    pub fn next_expiry(&self) -> Option<f64> {
        let links = self
            .links
            .values()
            .flat_map(|l| [Some(l.expiry), l.sym_expiry])
            .flatten();
        let two = self.two_hop.values().flat_map(|s| s.values().copied());
        links
            .chain(two)
            .chain(self.mpr_selectors.values().copied())
            .chain(self.topology.values().map(|t| t.expiry))
            .chain(self.duplicates.values().copied())
            .reduce(f64::min)
    }

    /// Builds the next HELLO advertising every known link.
    pub fn make_hello(&mut self) -> ControlMessage {
        let entries = self
            .links
            .iter()
            .map(|(&n, l)| HelloEntry {
                neighbor: n,
                status: if !l.sym {
                    LinkStatus::Asym
                } else if self.mpr_set.contains(&n) {
                    LinkStatus::Mpr
                } else {
                    LinkStatus::Sym
                },
                willingness: self.neighbor_willingness(n),
            })
            .collect();
        let seq_no = self.hello_seq;
        self.hello_seq += 1;
        ControlMessage {
            originator: self.node_id,
            sender: self.node_id,
            seq_no,
            payload: Payload::Hello {
                willingness: self.willingness,
                entries,
            },
        }
    }

    /// Builds the next TC, or `None` when no neighbor selected this node as MPR.
    pub fn make_tc(&mut self) -> Option<ControlMessage> {
        if self.mpr_selectors.is_empty() {
            return None;
        }
        let seq_no = self.tc_seq;
        self.tc_seq += 1;
        Some(ControlMessage {
            originator: self.node_id,
            sender: self.node_id,
            seq_no,
            payload: Payload::Tc {
                selectors: self.mpr_selectors.keys().copied().collect(),
            },
        })
    }
}
