//! Event loop for one simulation run.

use super::energy::{packet_airtime, EnergyLedger, NicProfile};
use super::metrics::SimMetrics;
use super::queue::EventQueue;
use crate::error::{Error, Result};
use crate::olsr::{hello_emission_interval, ControlMessage, MessageKind, OlsrConfig, OlsrNodeState, Payload};
use crate::scenario::{MobilityTrace, Scenario};
use crate::seed::{self, SimRng};
use crate::NodeId;
use rand::Rng;
use std::collections::BTreeSet;
use std::rc::Rc;

/// Relay processing delay added per hop, seconds.
pub const DEFAULT_PROCESSING_DELAY: f64 = 0.002;
/// Data packets are dropped after this many hops (guards against loops).
pub const MAX_DATA_HOPS: u32 = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct SimOptions {
    /// Run without CBR flows and report control-plane metrics only.
    pub allow_no_flows: bool,
    pub processing_delay: f64,
    /// Keep a log of every transmission in the result.
    pub record_transmissions: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            allow_no_flows: false,
            processing_delay: DEFAULT_PROCESSING_DELAY,
            record_transmissions: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transmission {
    pub time: f64,
    pub sender: NodeId,
    pub size_bits: u64,
    pub receivers: Vec<NodeId>,
    pub control: bool,
}

/// Metrics plus the optional transmission log.
#[derive(Debug, Clone)]
pub struct SimOutput {
    pub metrics: SimMetrics,
    pub transmissions: Vec<Transmission>,
    /// Final protocol state of every node.
    pub nodes: Vec<OlsrNodeState>,
}

/// Nodes within `range` meters of `node` at time `t`.
pub fn neighbors_in_range(trace: &MobilityTrace, node: NodeId, t: f64, range: f64) -> Result<BTreeSet<NodeId>> {
    let (x, y) = trace.position_at(node, t)?;
    let mut out = BTreeSet::new();
    for other in 0..trace.node_count() as NodeId {
        if other == node {
            continue;
        }
        let (ox, oy) = trace.position_at(other, t)?;
        if ((ox - x).powi(2) + (oy - y).powi(2)).sqrt() <= range {
            out.insert(other);
        }
    }
    Ok(out)
}

/// Runs one simulation with default options.
pub fn run_simulation(
    scenario: &Scenario,
    config: &OlsrConfig,
    nic: &NicProfile<f64>,
    seed: u64,
) -> Result<SimMetrics> {
    Ok(run_simulation_with(scenario, config, nic, seed, &SimOptions::default())?.metrics)
}

pub fn run_simulation_with(
    scenario: &Scenario,
    config: &OlsrConfig,
    nic: &NicProfile<f64>,
    seed: u64,
    options: &SimOptions,
) -> Result<SimOutput> {
    config.validate()?;
    nic.validate()?;
    scenario.validate()?;
    if scenario.flows.is_empty() && !options.allow_no_flows {
        return Err(Error::Config("no data flows".into()));
    }
    let mut sim = Simulator::new(scenario, config, nic, seed, options);
    sim.run();
    Ok(sim.finish())
}

#[derive(Debug, Clone, Copy)]
struct DataPacket {
    flow: usize,
    destination: NodeId,
    created: f64,
    hops: u32,
    size_bits: u64,
}

enum Event {
    EmitHello { node: NodeId, nominal: f64 },
    EmitTc { node: NodeId, nominal: f64 },
    CbrSend { flow: usize, index: u64 },
    ControlArrival { node: NodeId, msg: Rc<ControlMessage> },
    DataArrival { node: NodeId, packet: DataPacket },
}

const JITTER_HELLO: u64 = 1;
const JITTER_TC: u64 = 2;
const LOSS_STREAM: u64 = 0x4c05_5000;

struct Simulator<'a> {
    scenario: &'a Scenario,
    config: &'a OlsrConfig,
    nic: &'a NicProfile<f64>,
    options: &'a SimOptions,
    nodes: Vec<OlsrNodeState>,
    queue: EventQueue<Event>,
    hello_jitter: Vec<SimRng>,
    tc_jitter: Vec<SimRng>,
    loss_rng: SimRng,
    ledger: EnergyLedger,
    positions: Vec<(f64, f64)>,
    positions_at: f64,
    receivers: Vec<(NodeId, f64)>,
    log: Vec<Transmission>,
    data_sent: u64,
    data_delivered: u64,
    control_tx: u64,
    delay_sum: f64,
    hops_sum: u64,
}

impl<'a> Simulator<'a> {
    fn new(
        scenario: &'a Scenario,
        config: &'a OlsrConfig,
        nic: &'a NicProfile<f64>,
        seed: u64,
        options: &'a SimOptions,
    ) -> Self {
        let n = scenario.node_count();
        let stream = |kind: u64, node: usize| seed::rng(seed::combine(&[seed, kind, node as u64]));
        Self {
            scenario,
            config,
            nic,
            options,
            nodes: (0..n)
                .map(|i| OlsrNodeState::new(i as NodeId, config.willingness))
                .collect(),
            queue: EventQueue::new(),
            hello_jitter: (0..n).map(|i| stream(JITTER_HELLO, i)).collect(),
            tc_jitter: (0..n).map(|i| stream(JITTER_TC, i)).collect(),
            loss_rng: seed::rng(seed::combine(&[seed, LOSS_STREAM])),
            ledger: EnergyLedger::new(n),
            positions: Vec::with_capacity(n),
            positions_at: f64::NAN,
            receivers: Vec::new(),
            log: Vec::new(),
            data_sent: 0,
            data_delivered: 0,
            control_tx: 0,
            delay_sum: 0.0,
            hops_sum: 0,
        }
    }

    fn run(&mut self) {
        let hello_period = hello_emission_interval(self.config);
        for node in 0..self.nodes.len() as NodeId {
            let t = self.jitter(MessageKind::Hello, node, 0.0, hello_period);
            self.queue.push(t, Event::EmitHello { node, nominal: 0.0 });
            let t = self.jitter(MessageKind::Tc, node, 0.0, self.config.tc_interval);
            self.queue.push(t, Event::EmitTc { node, nominal: 0.0 });
        }
        for (flow, f) in self.scenario.flows.iter().enumerate() {
            self.queue.push(f.start, Event::CbrSend { flow, index: 0 });
        }
        let end = self.scenario.sim_duration;
        while let Some((now, event)) = self.queue.pop() {
            if now > end {
                break;
            }
            match event {
                Event::EmitHello { node, nominal } => {
                    self.emit_hello(node, now);
                    let next = nominal + hello_period;
                    let t = self.jitter(MessageKind::Hello, node, next, hello_period);
                    self.queue.push(t, Event::EmitHello { node, nominal: next });
                }
                Event::EmitTc { node, nominal } => {
                    self.emit_tc(node, now);
                    let next = nominal + self.config.tc_interval;
                    let t = self.jitter(MessageKind::Tc, node, next, self.config.tc_interval);
                    self.queue.push(t, Event::EmitTc { node, nominal: next });
                }
                Event::CbrSend { flow, index } => self.cbr_send(flow, index, now),
                Event::ControlArrival { node, msg } => self.receive_control(node, &msg, now),
                Event::DataArrival { node, packet } => self.receive_data(node, packet, now),
            }
        }
    }

    // Emission time `nominal + u * period / 4` with `u` from the node's own
    // stream, so emission times scale with the period.
    fn jitter(&mut self, kind: MessageKind, node: NodeId, nominal: f64, period: f64) -> f64 {
        let rng = match kind {
            MessageKind::Hello => &mut self.hello_jitter[node as usize],
            MessageKind::Tc => &mut self.tc_jitter[node as usize],
        };
        let u: f64 = rng.gen();
        nominal + u * period / 4.0
    }

    fn emit_hello(&mut self, node: NodeId, now: f64) {
        let state = &mut self.nodes[node as usize];
        state.expire(now);
        let msg = state.make_hello();
        self.send_control(node, Rc::new(msg), now);
    }

    fn emit_tc(&mut self, node: NodeId, now: f64) {
        let state = &mut self.nodes[node as usize];
        state.expire(now);
        if let Some(msg) = state.make_tc() {
            self.send_control(node, Rc::new(msg), now);
        }
    }

    fn send_control(&mut self, sender: NodeId, msg: Rc<ControlMessage>, now: f64) {
        let bits = msg.size_bits();
        self.control_tx += 1;
        self.transmit(sender, bits, now, true);
        let arrival = now + packet_airtime(bits as f64, self.scenario.bandwidth);
        for i in 0..self.receivers.len() {
            let (node, distance) = self.receivers[i];
            if !self.lost(distance) {
                self.queue.push(
                    arrival,
                    Event::ControlArrival {
                        node,
                        msg: Rc::clone(&msg),
                    },
                );
            }
        }
    }

    fn receive_control(&mut self, node: NodeId, msg: &ControlMessage, now: f64) {
        let state = &mut self.nodes[node as usize];
        state.expire(now);
        match &msg.payload {
            Payload::Hello { .. } => state.process_hello(msg, now, self.config),
            Payload::Tc { .. } => {
                if msg.originator == node || !state.is_symmetric(msg.sender) {
                    return;
                }
                state.process_tc(msg, now, self.config);
                if state.should_forward(msg.originator, msg.seq_no, msg.sender, now, self.config) {
                    let copy = ControlMessage {
                        sender: node,
                        ..msg.clone()
                    };
                    self.send_control(node, Rc::new(copy), now);
                }
            }
        }
    }

    fn cbr_send(&mut self, flow: usize, index: u64, now: f64) {
        let f = self.scenario.flows[flow];
        let next = f.start + (index + 1) as f64 / f.rate;
        if next < f.end() && next <= self.scenario.sim_duration {
            self.queue.push(next, Event::CbrSend { flow, index: index + 1 });
        }
        self.data_sent += 1;
        let packet = DataPacket {
            flow,
            destination: f.destination,
            created: now,
            hops: 0,
            size_bits: u64::from(f.packet_size) * 8,
        };
        self.forward_data(f.source, packet, now);
    }

    fn receive_data(&mut self, node: NodeId, packet: DataPacket, now: f64) {
        if node == packet.destination {
            self.data_delivered += 1;
            self.delay_sum += now - packet.created;
            self.hops_sum += u64::from(packet.hops);
        } else {
            self.forward_data(node, packet, now);
        }
    }

    fn forward_data(&mut self, node: NodeId, mut packet: DataPacket, now: f64) {
        if packet.hops >= MAX_DATA_HOPS {
            log::trace!("flow {} packet dropped at {node}: hop limit", packet.flow);
            return;
        }
        let state = &mut self.nodes[node as usize];
        state.expire(now);
        let Some(route) = state.route_to(packet.destination) else {
            return;
        };
        self.transmit(node, packet.size_bits, now, false);
        let Some(&(_, distance)) = self.receivers.iter().find(|(n, _)| *n == route.next_hop) else {
            return;
        };
        if self.lost(distance) {
            return;
        }
        packet.hops += 1;
        let arrival =
            now + packet_airtime(packet.size_bits as f64, self.scenario.bandwidth) + self.options.processing_delay;
        self.queue.push(
            arrival,
            Event::DataArrival {
                node: route.next_hop,
                packet,
            },
        );
    }

    /// Charges one transmission and leaves the in-range nodes in `self.receivers`.
    fn transmit(&mut self, sender: NodeId, size_bits: u64, now: f64, control: bool) {
        if self.positions_at != now {
            self.scenario.trace.positions_at(now, &mut self.positions);
            self.positions_at = now;
        }
        let (sx, sy) = self.positions[sender as usize];
        let range = self.scenario.radio_range;
        self.receivers.clear();
        for (i, &(x, y)) in self.positions.iter().enumerate() {
            if i == sender as usize {
                continue;
            }
            let d = ((x - sx).powi(2) + (y - sy).powi(2)).sqrt();
            if d <= range {
                self.receivers.push((i as NodeId, d));
            }
        }
        let idx: Vec<usize> = self.receivers.iter().map(|(n, _)| *n as usize).collect();
        self.ledger
            .charge(self.nic, sender as usize, &idx, size_bits as f64, control);
        if self.options.record_transmissions {
            self.log.push(Transmission {
                time: now,
                sender,
                size_bits,
                receivers: self.receivers.iter().map(|(n, _)| *n).collect(),
                control,
            });
        }
    }

    fn lost(&mut self, distance: f64) -> bool {
        let p = self
            .scenario
            .loss_model
            .loss_probability(distance, self.scenario.radio_range);
        p > 0.0 && self.loss_rng.gen::<f64>() < p
    }

    fn finish(self) -> SimOutput {
        let delivered = self.data_delivered;
        let has_data = self.data_sent > 0;
        let metrics = SimMetrics {
            pdr: has_data.then(|| 100.0 * delivered as f64 / self.data_sent as f64),
            e2ed_ms: (delivered > 0).then(|| 1000.0 * self.delay_sum / delivered as f64),
            nrl: (delivered > 0).then(|| 100.0 * self.control_tx as f64 / delivered as f64),
            hops: (delivered > 0).then(|| self.hops_sum as f64 / delivered as f64),
            energy: self.ledger,
            data_sent: self.data_sent,
            data_delivered: delivered,
            control_transmissions: self.control_tx,
        };
        SimOutput {
            metrics,
            transmissions: self.log,
            nodes: self.nodes,
        }
    }
}
