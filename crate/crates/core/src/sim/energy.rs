//! Per-packet energy model.
//!
//! A transmission costs the sender `I_send * V_send * size / bandwidth` and
//! each node in range `I_recv * V_recv * size / bandwidth`. Currents are in
//! mA and voltages in V, so energies come out in millijoules.

use crate::error::{Error, Result};
use crate::num::Scalar;
use serde::{Deserialize, Serialize};

/// Electrical characteristics of the network interface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NicProfile<T> {
    pub i_send_ma: T,
    pub v_send: T,
    pub i_recv_ma: T,
    pub v_recv: T,
    pub bandwidth_bps: T,
}

impl<T: Scalar> NicProfile<T> {
    /// 802.11p card drawing 440 mA (tx) / 260 mA (rx) at 5 V over 6 Mbps.
    pub fn unex_dcma_86p2() -> Self {
        Self {
            i_send_ma: T::lit(440.0),
            v_send: T::lit(5.0),
            i_recv_ma: T::lit(260.0),
            v_recv: T::lit(5.0),
            bandwidth_bps: T::lit(6.0e6),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            self.i_send_ma,
            self.v_send,
            self.i_recv_ma,
            self.v_recv,
            self.bandwidth_bps,
        ];
        if fields.iter().all(|&v| v > T::zero() && v.is_finite()) {
            Ok(())
        } else {
            Err(Error::Validation(
                "NIC currents, voltages and bandwidth must be positive".into(),
            ))
        }
    }

    /// Transmit power in mW.
    pub fn p_send(&self) -> T {
        self.i_send_ma * self.v_send
    }

    /// Receive power in mW.
    pub fn p_recv(&self) -> T {
        self.i_recv_ma * self.v_recv
    }
}

impl<T: Scalar> Default for NicProfile<T> {
    fn default() -> Self {
        Self::unex_dcma_86p2()
    }
}

/// Seconds needed to put `size_bits` on the air.
pub fn packet_airtime<T: Scalar>(size_bits: T, bandwidth_bps: T) -> T {
    size_bits / bandwidth_bps
}

pub fn energy_send<T: Scalar>(nic: &NicProfile<T>, size_bits: T) -> T {
    nic.p_send() * packet_airtime(size_bits, nic.bandwidth_bps)
}

pub fn energy_recv<T: Scalar>(nic: &NicProfile<T>, size_bits: T) -> T {
    nic.p_recv() * packet_airtime(size_bits, nic.bandwidth_bps)
}

/// Sender cost plus the cost of `receivers` nodes hearing the packet.
pub fn broadcast_energy<T: Scalar>(nic: &NicProfile<T>, size_bits: T, receivers: usize) -> T {
    energy_send(nic, size_bits) + T::from_count(receivers) * energy_recv(nic, size_bits)
}

/// Energy accumulators, per node and global.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyLedger {
    pub per_node_sent: Vec<f64>,
    pub per_node_recv: Vec<f64>,
    pub e_sent: f64,
    pub e_recv: f64,
    /// Portion of `e_sent + e_recv` spent on control traffic.
    pub e_control: f64,
    pub e_data: f64,
}

impl EnergyLedger {
    pub fn new(node_count: usize) -> Self {
        Self {
            per_node_sent: vec![0.0; node_count],
            per_node_recv: vec![0.0; node_count],
            e_sent: 0.0,
            e_recv: 0.0,
            e_control: 0.0,
            e_data: 0.0,
        }
    }

    pub fn charge(&mut self, nic: &NicProfile<f64>, sender: usize, receivers: &[usize], size_bits: f64, control: bool) {
        let tx = energy_send(nic, size_bits);
        let rx = energy_recv(nic, size_bits);
        self.per_node_sent[sender] += tx;
        self.e_sent += tx;
        for &r in receivers {
            self.per_node_recv[r] += rx;
        }
        let rx_total = rx * receivers.len() as f64;
        self.e_recv += rx_total;
        if control {
            self.e_control += tx + rx_total;
        } else {
            self.e_data += tx + rx_total;
        }
    }

    pub fn e_total(&self) -> f64 {
        self.e_sent + self.e_recv
    }

    pub fn e_total_per_vehicle(&self) -> f64 {
        match self.per_node_sent.len() {
            0 => 0.0,
            n => self.e_total() / n as f64,
        }
    }
}
