use crate::NodeId;

pub const HELLO_HEADER_BYTES: u32 = 24;
pub const HELLO_ENTRY_BYTES: u32 = 8;
pub const TC_HEADER_BYTES: u32 = 20;
pub const TC_ENTRY_BYTES: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MessageKind {
    Hello,
    Tc,
}

/// Link state advertised for one neighbor in a HELLO.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkStatus {
    /// Heard, not confirmed bidirectional.
    Asym,
    Sym,
    /// Symmetric and selected as MPR by the sender.
    Mpr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HelloEntry {
    pub neighbor: NodeId,
    pub status: LinkStatus,
    pub willingness: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Hello { willingness: u8, entries: Vec<HelloEntry> },
    Tc { selectors: Vec<NodeId> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlMessage {
    pub originator: NodeId,
    /// Node that (re)transmitted this copy.
    pub sender: NodeId,
    pub seq_no: u32,
    pub payload: Payload,
}

impl ControlMessage {
    pub fn kind(&self) -> MessageKind {
        match self.payload {
            Payload::Hello { .. } => MessageKind::Hello,
            Payload::Tc { .. } => MessageKind::Tc,
        }
    }

    pub fn size_bytes(&self) -> u32 {
        match &self.payload {
            Payload::Hello { entries, .. } => HELLO_HEADER_BYTES + HELLO_ENTRY_BYTES * entries.len() as u32,
            Payload::Tc { selectors } => TC_HEADER_BYTES + TC_ENTRY_BYTES * selectors.len() as u32,
        }
    }

    pub fn size_bits(&self) -> u64 {
        u64::from(self.size_bytes()) * 8
    }
}
